//! Electric-layer Degraded Bandwidth Allocation (ED-BA): picking which
//! existing requests on a degraded route to slow down, and by how much,
//! honoring priorities and prolongation deadlines.

use std::collections::BTreeMap;

use crate::net::{LightpathId, MultiLayerNet, NodeId, RequestId};

/// A service request and its runtime transfer state.
///
/// QoS assurance means the delivered volume at completion equals
/// `bw * holding` and the completion time never exceeds
/// `arrival + holding + deadline_slack`.
#[derive(Debug, Clone)]
pub struct ServiceRequest {
    pub id: RequestId,
    pub s: NodeId,
    pub d: NodeId,
    /// Requested rate in Gbps.
    pub bw: f64,
    /// Arrival time, hours.
    pub arrival: f64,
    /// Nominal holding time, hours.
    pub holding: f64,
    /// Prolongation deadline allowance beyond the nominal holding, hours.
    pub deadline_slack: f64,
    /// Priority in 1..=5, 5 highest.
    pub priority: u8,
    /// Smallest tolerated rate ratio, in [0.25, 1.0].
    pub tolerance: f64,
    /// Current transmission rate, Gbps.
    pub current_rate: f64,
    /// Volume delivered up to `last_update`, Gbps-hours.
    pub delivered: f64,
    pub last_update: f64,
    /// Electric route: the lightpath chain carrying this request.
    pub route: Vec<LightpathId>,
}

impl ServiceRequest {
    /// A fresh, not-yet-admitted request.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: RequestId,
        s: NodeId,
        d: NodeId,
        bw: f64,
        arrival: f64,
        holding: f64,
        deadline_slack: f64,
        priority: u8,
        tolerance: f64,
    ) -> Self {
        assert!(bw > 0.0 && holding > 0.0 && deadline_slack >= 0.0);
        assert!((1..=5).contains(&priority), "priority out of range");
        assert!((0.0..=1.0).contains(&tolerance) && tolerance > 0.0);
        ServiceRequest {
            id,
            s,
            d,
            bw,
            arrival,
            holding,
            deadline_slack,
            priority,
            tolerance,
            current_rate: bw,
            delivered: 0.0,
            last_update: arrival,
            route: Vec::new(),
        }
    }

    /// Total volume to deliver, Gbps-hours.
    pub fn volume(&self) -> f64 {
        self.bw * self.holding
    }

    /// Hard completion deadline.
    pub fn deadline(&self) -> f64 {
        self.arrival + self.holding + self.deadline_slack
    }

    /// Smallest rate this request tolerates.
    pub fn floor_rate(&self) -> f64 {
        self.bw * self.tolerance
    }

    /// Volume delivered by time `t >= last_update` at the current rate.
    pub fn delivered_at(&self, t: f64) -> f64 {
        self.delivered + self.current_rate * (t - self.last_update)
    }

    pub fn remaining_at(&self, t: f64) -> f64 {
        (self.volume() - self.delivered_at(t)).max(0.0)
    }

    /// Projected completion time at the current rate.
    pub fn finish_time(&self) -> f64 {
        self.last_update + (self.volume() - self.delivered).max(0.0) / self.current_rate
    }

    /// Folds elapsed time into `delivered` so the rate can change at `t`.
    pub fn settle(&mut self, t: f64) {
        self.delivered = self.delivered_at(t);
        self.last_update = t;
    }
}

/// Largest rate reduction for `r` at time `t_c` that still meets the
/// prolongation deadline: the remaining volume must drain inside the
/// remaining window, and the rate may not drop below the tolerance floor.
///
/// Returns the current rate when no slack remains.
pub fn max_degraded_rate(r: &ServiceRequest, t_c: f64) -> f64 {
    let window = r.deadline() - t_c;
    if window <= 0.0 {
        return r.current_rate;
    }
    let ideal = r.remaining_at(t_c) / window;
    ideal.max(r.floor_rate()).min(r.current_rate)
}

/// One planned rate change.
#[derive(Debug, Clone, PartialEq)]
pub struct RateChange {
    pub id: RequestId,
    pub new_rate: f64,
    /// Completion time recomputed from the remaining volume.
    pub new_finish: f64,
}

/// Result of ED-BA: existing requests to degrade (ascending priority
/// order of selection) and the rate granted to the arrival itself.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AllocationPlan {
    pub degradations: Vec<RateChange>,
    /// Rate granted to the arriving request (its full `bw` when the plan
    /// did not have to degrade it).
    pub r0_rate: f64,
}

impl AllocationPlan {
    pub fn is_degraded(&self) -> bool {
        !self.degradations.is_empty()
    }
}

/// Why ED-BA refused the route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdBaBlocked;

/// Runs ED-BA over an electric route (a lightpath chain) for arrival `r0`
/// at time `t_c`, without mutating the network.
///
/// Per congested link the candidate set is `r0` plus the carried requests
/// with priority not above `r0`'s; they are degraded in ascending priority
/// order, each to its maximum extent, until the freed bandwidth exceeds
/// `r0.bw`. Blocked outcomes leave no plan at all.
pub fn ed_ba(
    net: &MultiLayerNet,
    route: &[LightpathId],
    r0: &ServiceRequest,
    t_c: f64,
) -> Result<AllocationPlan, EdBaBlocked> {
    // planned rates so far; a request degraded for an earlier link keeps
    // contributing its freed bandwidth on later links it also rides
    let mut planned: BTreeMap<RequestId, f64> = BTreeMap::new();
    let mut r0_rate = r0.bw;
    let mut order: Vec<RequestId> = Vec::new();

    for lp_id in route {
        let lp = &net.lightpaths[lp_id];
        if lp.free_capacity() >= r0.bw {
            continue;
        }
        // PDL: the arrival itself plus carried requests it may preempt
        let mut pdl: Vec<(u8, Option<RequestId>)> = vec![(r0.priority, None)];
        for id in lp.groomed.keys() {
            let r = &net.requests[id];
            if r.priority <= r0.priority {
                pdl.push((r.priority, Some(*id)));
            }
        }
        // ascending priority; the arrival sorts after existing equals
        pdl.sort_by_key(|&(p, id)| (p, id.map_or(u64::MAX, |i| i.0)));

        // feasibility: the clamped maximum freeable bandwidth must cover bw
        let freeable: f64 = pdl
            .iter()
            .map(|&(_, id)| match id {
                Some(id) => {
                    let r = &net.requests[&id];
                    r.current_rate - max_degraded_rate(r, t_c)
                }
                None => r0.bw - max_degraded_rate(r0, t_c),
            })
            .sum();
        if freeable < r0.bw {
            return Err(EdBaBlocked);
        }

        let mut freed = 0.0;
        for &(_, id) in &pdl {
            match id {
                Some(id) => {
                    let r = &net.requests[&id];
                    match planned.get(&id) {
                        Some(rate) => freed += r.current_rate - rate,
                        None => {
                            let rate = max_degraded_rate(r, t_c);
                            if rate < r.current_rate {
                                planned.insert(id, rate);
                                order.push(id);
                                freed += r.current_rate - rate;
                            }
                        }
                    }
                }
                None => {
                    if r0_rate < r0.bw {
                        freed += r0.bw - r0_rate;
                    } else {
                        let rate = max_degraded_rate(r0, t_c);
                        if rate < r0.bw {
                            r0_rate = rate;
                            freed += r0.bw - rate;
                        }
                    }
                }
            }
            if freed > r0.bw {
                break;
            }
        }
        if freed <= r0.bw {
            return Err(EdBaBlocked);
        }
    }

    let degradations = order
        .into_iter()
        .map(|id| {
            let r = &net.requests[&id];
            let new_rate = planned[&id];
            RateChange { id, new_rate, new_finish: t_c + r.remaining_at(t_c) / new_rate }
        })
        .collect();
    Ok(AllocationPlan { degradations, r0_rate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{load_topology, RequestId};
    use crate::optical::{Lightpath, ModulationTable};

    fn request(id: u64, bw: f64, t: f64, tau: f64, eta: f64, prio: u8) -> ServiceRequest {
        let mut r = ServiceRequest::new(RequestId(id), 0, 1, bw, t, tau, eta, prio, 0.25);
        r.current_rate = bw;
        r
    }

    #[test]
    fn max_rate_mid_transfer() {
        // bw=10, tau=2, eta=2, arrived at 0, queried at 1: remaining volume
        // 10 over a 3 hour window
        let r = request(0, 10.0, 0.0, 2.0, 2.0, 3);
        let got = max_degraded_rate(&r, 1.0);
        assert!((got - 10.0 / 3.0).abs() < 1e-12, "{got}");
    }

    #[test]
    fn max_rate_at_arrival() {
        let r = request(0, 10.0, 5.0, 2.0, 2.0, 3);
        let got = max_degraded_rate(&r, 5.0);
        assert!((got - 10.0 * 2.0 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn max_rate_no_slack() {
        let r = request(0, 10.0, 0.0, 2.0, 0.0, 3);
        assert_eq!(max_degraded_rate(&r, 1.0), 10.0);
    }

    #[test]
    fn max_rate_respects_tolerance_floor() {
        let mut r = request(0, 10.0, 0.0, 1.0, 100.0, 3);
        r.tolerance = 0.5;
        // huge slack would allow a tiny rate; the floor caps it
        assert_eq!(max_degraded_rate(&r, 0.0), 5.0);
    }

    /// One lightpath 0->1 with the given capacity and groomed requests.
    fn net_with_link(capacity_slots: usize, groomed: &[(ServiceRequest, f64)]) -> MultiLayerNet {
        let mut net = load_topology("nodes 2 slots 40\nlink 0 1 100\n").unwrap();
        let table = ModulationTable::table_i();
        let id = net.next_lightpath_id();
        // level 2 at 12.5 Gbps per slot
        let mut lp = Lightpath::new(id, vec![0], vec![0, 1], 1, capacity_slots, 2, 100.0, &table);
        for (r, rate) in groomed {
            lp.groomed.insert(r.id, *rate);
        }
        net.install_lightpath(lp);
        for (r, _) in groomed {
            let mut r = r.clone();
            r.route = vec![id];
            net.requests.insert(r.id, r);
        }
        net
    }

    #[test]
    fn admits_undegraded_when_capacity_suffices() {
        let net = net_with_link(8, &[]); // 100 Gbps free
        let r0 = request(10, 50.0, 0.0, 2.0, 2.0, 3);
        let route = vec![net.lightpaths.keys().next().copied().unwrap()];
        let plan = ed_ba(&net, &route, &r0, 0.0).unwrap();
        assert!(plan.degradations.is_empty());
        assert_eq!(plan.r0_rate, 50.0);
    }

    #[test]
    fn degrades_only_lower_priority() {
        // 100 Gbps pipe, r1 (prio 1) holds 60, r2 (prio 5) holds 40;
        // arrival r0 (prio 3, 30 Gbps) can only squeeze r1
        let r1 = request(1, 60.0, 0.0, 2.0, 6.0, 1);
        let r2 = request(2, 40.0, 0.0, 2.0, 6.0, 5);
        let net = net_with_link(8, &[(r1, 60.0), (r2, 40.0)]);
        let r0 = request(10, 30.0, 0.0, 2.0, 2.0, 3);
        let route = vec![net.lightpaths.keys().next().copied().unwrap()];
        let plan = ed_ba(&net, &route, &r0, 0.0).unwrap();
        assert!(plan.degradations.iter().all(|c| c.id != RequestId(2)));
        assert_eq!(plan.degradations.len(), 1);
        assert_eq!(plan.degradations[0].id, RequestId(1));
        // r1 drained to its max extent: 60 * 2 / 8 = 15
        assert!((plan.degradations[0].new_rate - 15.0).abs() < 1e-12);
        // freeing 45 > 30 needed; r0 itself untouched
        assert_eq!(plan.r0_rate, 30.0);
    }

    #[test]
    fn blocked_when_infeasible_leaves_no_plan() {
        // full pipe, nothing can free enough for a 90 Gbps arrival
        let r1 = request(1, 60.0, 0.0, 2.0, 0.5, 1);
        let net = net_with_link(5, &[(r1, 60.0)]); // 62.5 Gbps capacity
        let r0 = request(10, 90.0, 0.0, 2.0, 0.5, 3);
        let route = vec![net.lightpaths.keys().next().copied().unwrap()];
        assert_eq!(ed_ba(&net, &route, &r0, 0.0), Err(EdBaBlocked));
    }

    #[test]
    fn arrival_itself_may_be_degraded() {
        // 50 Gbps pipe fully held by an equal-priority request with little
        // slack; r0 must contribute its own degradation
        let r1 = request(1, 50.0, 0.0, 2.0, 2.0, 3);
        let net = net_with_link(4, &[(r1, 50.0)]);
        let r0 = request(10, 40.0, 0.0, 2.0, 6.0, 3);
        let route = vec![net.lightpaths.keys().next().copied().unwrap()];
        let plan = ed_ba(&net, &route, &r0, 0.0).unwrap();
        // r1 frees 50 - 50*2/4 = 25 < 40, so r0 degrades too:
        // 40 * 2 / 8 = 10, freeing 30 more
        assert_eq!(plan.degradations.len(), 1);
        assert!((plan.r0_rate - 10.0).abs() < 1e-12);
    }

    #[test]
    fn multi_link_route_reuses_degradations() {
        // one request rides both hops; its single degradation must count
        // toward both congested links
        let mut net = load_topology("nodes 3 slots 40\nlink 0 1 100\nlink 1 2 100\n").unwrap();
        let table = ModulationTable::table_i();
        let mut chain = Vec::new();
        for u in 0..2 {
            let f = net.fiber_between(u, u + 1).unwrap();
            let id = net.next_lightpath_id();
            let lp = Lightpath::new(id, vec![f], vec![u, u + 1], 1, 4, 2, 100.0, &table);
            net.install_lightpath(lp);
            chain.push(id);
        }
        let mut r1 = request(1, 50.0, 0.0, 2.0, 6.0, 1);
        r1.s = 0;
        r1.d = 2;
        r1.route = chain.clone();
        for id in &chain {
            net.lightpaths.get_mut(id).unwrap().groomed.insert(r1.id, 50.0);
        }
        net.requests.insert(r1.id, r1);
        let r0 = request(10, 20.0, 0.0, 2.0, 2.0, 3);
        let plan = ed_ba(&net, &chain, &r0, 0.0).unwrap();
        // r1 degraded once: 100 volume over 8 h window = 12.5, freeing
        // 37.5 > 20 on each of the two links
        assert_eq!(plan.degradations.len(), 1);
        assert!((plan.degradations[0].new_rate - 12.5).abs() < 1e-12);
        assert_eq!(plan.r0_rate, 20.0);
    }

    #[test]
    fn ed_ba_does_not_mutate_network() {
        let r1 = request(1, 60.0, 0.0, 2.0, 6.0, 1);
        let net = net_with_link(8, &[(r1, 60.0)]);
        let r0 = request(10, 90.0, 0.0, 2.0, 2.0, 3);
        let route = vec![net.lightpaths.keys().next().copied().unwrap()];
        let rate_before = net.requests[&RequestId(1)].current_rate;
        let _ = ed_ba(&net, &route, &r0, 0.0);
        assert_eq!(net.requests[&RequestId(1)].current_rate, rate_before);
    }
}
