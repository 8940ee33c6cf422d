//! Seeded stochastic workload generation: Poisson arrivals between uniform
//! node pairs with exponential holding times, uniform bandwidths and
//! degradation tolerances, and equiprobable priorities.

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use crate::electric::ServiceRequest;
use crate::net::RequestId;

/// Name of the generator, recorded in run metadata so streams stay
/// reproducible across builds.
pub const GENERATOR: &str = "pcg64";

/// Workload parameters for one simulation run.
#[derive(Debug, Clone)]
pub struct WorkloadConfig {
    /// Arrival rate per node, 1/hours.
    pub lambda_per_node: f64,
    /// Holding-time rate; mean holding is `1/mu` hours.
    pub mu: f64,
    /// Requested bandwidth range, Gbps.
    pub bw_range: (f64, f64),
    /// Tolerated degradation ratio range.
    pub tolerance_range: (f64, f64),
    /// Number of equiprobable priority classes, highest last.
    pub priority_levels: u8,
    /// Arrivals are generated up to this time, hours.
    pub duration_h: f64,
    pub seed: u64,
    /// When set, bandwidths snap to this grid instead of being continuous.
    pub bw_step: Option<f64>,
}

impl WorkloadConfig {
    /// The experimental defaults: bandwidths in [5, 150] Gbps, tolerances
    /// in [0.25, 1.0], five priorities.
    pub fn new(lambda_per_node: f64, mu: f64, duration_h: f64, seed: u64) -> Self {
        assert!(lambda_per_node > 0.0 && mu > 0.0 && duration_h > 0.0);
        WorkloadConfig {
            lambda_per_node,
            mu,
            bw_range: (5.0, 150.0),
            tolerance_range: (0.25, 1.0),
            priority_levels: 5,
            duration_h,
            seed,
            bw_step: None,
        }
    }

    /// Offered load per node in Erlang.
    pub fn erlang_per_node(&self) -> f64 {
        self.lambda_per_node / self.mu
    }
}

fn exp_sample(rng: &mut Pcg64, rate: f64) -> f64 {
    let u: f64 = rng.gen();
    -(1.0 - u).ln() / rate
}

/// Generates the time-ordered arrival stream for `node_count` nodes.
///
/// The deadline allowance is derived from the tolerance so that running at
/// the tolerance-floor rate exactly meets the deadline:
/// `eta = tau * (1/tolerance - 1)`.
pub fn generate(cfg: &WorkloadConfig, node_count: usize) -> Vec<ServiceRequest> {
    assert!(node_count >= 2, "need at least two nodes");
    let mut rng = Pcg64::seed_from_u64(cfg.seed);
    let aggregate_rate = cfg.lambda_per_node * node_count as f64;
    let mut out = Vec::new();
    let mut t = 0.0;
    let mut seq = 0u64;
    loop {
        t += exp_sample(&mut rng, aggregate_rate);
        if t > cfg.duration_h {
            break;
        }
        let s = rng.gen_range(0..node_count);
        let mut d = rng.gen_range(0..node_count - 1);
        if d >= s {
            d += 1;
        }
        let mut bw = rng.gen_range(cfg.bw_range.0..=cfg.bw_range.1);
        if let Some(step) = cfg.bw_step {
            bw = (bw / step).round() * step;
            bw = bw.clamp(cfg.bw_range.0, cfg.bw_range.1);
        }
        let holding = exp_sample(&mut rng, cfg.mu);
        let tolerance = rng.gen_range(cfg.tolerance_range.0..=cfg.tolerance_range.1);
        let priority = rng.gen_range(1..=cfg.priority_levels);
        let eta = holding * (1.0 / tolerance - 1.0);
        out.push(ServiceRequest::new(
            RequestId(seq),
            s,
            d,
            bw,
            t,
            holding,
            eta,
            priority,
            tolerance,
        ));
        seq += 1;
    }
    out
}

/// Serializes a workload as CSV for export/replay.
pub fn trace_to_csv(requests: &[ServiceRequest]) -> String {
    let mut out = String::from("arrival_time,s,d,bw_gbps,holding_h,deadline_h,priority,tolerance\n");
    for r in requests {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.arrival, r.s, r.d, r.bw, r.holding, r.deadline_slack, r.priority, r.tolerance
        ));
    }
    out
}

/// Parses a workload trace written by [`trace_to_csv`].
pub fn trace_from_csv(text: &str) -> Result<Vec<ServiceRequest>, String> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        if no == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(format!("trace line {}: expected 8 fields", no + 1));
        }
        let parse = |i: usize| -> Result<f64, String> {
            fields[i].parse().map_err(|_| format!("trace line {}: bad number {:?}", no + 1, fields[i]))
        };
        out.push(ServiceRequest::new(
            RequestId((no - 1) as u64),
            fields[1].parse().map_err(|_| format!("trace line {}: bad node", no + 1))?,
            fields[2].parse().map_err(|_| format!("trace line {}: bad node", no + 1))?,
            parse(3)?,
            parse(0)?,
            parse(4)?,
            parse(5)?,
            fields[6].parse().map_err(|_| format!("trace line {}: bad priority", no + 1))?,
            parse(7)?,
        ));
    }
    Ok(out)
}
