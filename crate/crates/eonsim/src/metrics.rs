//! Bandwidth blocking probability with per-priority breakdowns, and
//! windowed instantaneous throughput/BBP time series.

/// Per-window tallies.
#[derive(Debug, Clone, Copy, Default)]
struct Window {
    /// Carried volume inside the window, Gbps-hours.
    carried: f64,
    offered_bw: f64,
    blocked_bw: f64,
}

/// One point of the instantaneous series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    /// Window start, hours.
    pub t_start: f64,
    /// Carried throughput averaged over the window, Gbps.
    pub throughput_gbps: f64,
    /// BBP of the arrivals falling inside the window.
    pub bbp: f64,
}

/// Accumulates offered/blocked bandwidth and integrates carried throughput.
#[derive(Debug, Clone)]
pub struct MetricsAccumulator {
    window_h: f64,
    /// Aggregate plus per-priority (index = class, 1-based; 0 = aggregate).
    offered: Vec<f64>,
    blocked: Vec<f64>,
    windows: Vec<Window>,
    last_t: f64,
    delivered: f64,
}

impl MetricsAccumulator {
    pub fn new(window_h: f64, priority_levels: u8) -> Self {
        assert!(window_h > 0.0);
        MetricsAccumulator {
            window_h,
            offered: vec![0.0; priority_levels as usize + 1],
            blocked: vec![0.0; priority_levels as usize + 1],
            windows: Vec::new(),
            last_t: 0.0,
            delivered: 0.0,
        }
    }

    fn window_mut(&mut self, t: f64) -> &mut Window {
        let idx = (t / self.window_h).floor() as usize;
        if idx >= self.windows.len() {
            self.windows.resize(idx + 1, Window::default());
        }
        &mut self.windows[idx]
    }

    pub fn on_offered(&mut self, t: f64, priority: u8, bw: f64) {
        self.offered[0] += bw;
        self.offered[priority as usize] += bw;
        self.window_mut(t).offered_bw += bw;
    }

    pub fn on_blocked(&mut self, t: f64, priority: u8, bw: f64) {
        self.blocked[0] += bw;
        self.blocked[priority as usize] += bw;
        self.window_mut(t).blocked_bw += bw;
    }

    /// Integrates the carried rate from the previous event time up to `t`,
    /// splitting across window boundaries.
    pub fn advance(&mut self, t: f64, carried_rate_gbps: f64) {
        assert!(t >= self.last_t - 1e-9, "time went backwards");
        let mut cur = self.last_t;
        let mut idx = (cur / self.window_h).floor() as usize;
        // the division may round onto the next boundary exactly
        while (idx + 1) as f64 * self.window_h <= cur {
            idx += 1;
        }
        while cur < t {
            let window_end = (idx + 1) as f64 * self.window_h;
            let seg_end = window_end.min(t);
            if idx >= self.windows.len() {
                self.windows.resize(idx + 1, Window::default());
            }
            self.windows[idx].carried += carried_rate_gbps * (seg_end - cur);
            self.delivered += carried_rate_gbps * (seg_end - cur);
            cur = seg_end;
            idx += 1;
        }
        self.last_t = t;
    }

    /// Blocked over offered bandwidth, optionally restricted to one
    /// priority class. Zero offered bandwidth yields zero.
    pub fn bbp(&self, priority: Option<u8>) -> f64 {
        let i = priority.map_or(0, |p| p as usize);
        if self.offered[i] <= 0.0 {
            0.0
        } else {
            self.blocked[i] / self.offered[i]
        }
    }

    pub fn offered_bw(&self, priority: Option<u8>) -> f64 {
        self.offered[priority.map_or(0, |p| p as usize)]
    }

    pub fn blocked_bw(&self, priority: Option<u8>) -> f64 {
        self.blocked[priority.map_or(0, |p| p as usize)]
    }

    /// Total volume integrated through [`advance`], Gbps-hours.
    pub fn delivered_volume(&self) -> f64 {
        self.delivered
    }

    pub fn series(&self) -> Vec<SeriesPoint> {
        self.windows
            .iter()
            .enumerate()
            .map(|(i, w)| SeriesPoint {
                t_start: i as f64 * self.window_h,
                throughput_gbps: w.carried / self.window_h,
                bbp: if w.offered_bw > 0.0 { w.blocked_bw / w.offered_bw } else { 0.0 },
            })
            .collect()
    }
}
