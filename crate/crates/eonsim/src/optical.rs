//! Optical-layer machinery: the modulation/reach table, spectrum scans
//! (ASSI and SBTL), capacity-preserving lightpath degradation, the OD-MSA
//! establishment procedure with single- and double-side degradation, and
//! threshold-based grooming.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::electric::ServiceRequest;
use crate::net::{FiberId, Layer, LightpathId, MultiLayerNet, NodeId, RequestId};
use crate::routing::{self, RoutePolicy};

/// One modulation format: level is the constellation size.
#[derive(Debug, Clone)]
pub struct ModulationRow {
    pub name: &'static str,
    pub level: u8,
    pub bits_per_symbol: u32,
    pub slot_bandwidth_ghz: f64,
    pub data_rate_gbps: f64,
    pub reach_km: f64,
}

/// The default modulation level new lightpaths are established at (BPSK).
/// Establishing wide and raising the level later is what gives optical
/// degradation its headroom.
pub const DEFAULT_LEVEL: u8 = 2;

/// Modulation format vs. data rate vs. transmission reach.
#[derive(Debug, Clone)]
pub struct ModulationTable {
    rows: Vec<ModulationRow>,
}

impl ModulationTable {
    /// The four-format table used throughout: BPSK (default), QPSK, 8QAM,
    /// 16QAM, at 12.5 GHz slot width.
    pub fn table_i() -> Self {
        let rows = vec![
            ModulationRow { name: "BPSK", level: 2, bits_per_symbol: 1, slot_bandwidth_ghz: 12.5, data_rate_gbps: 12.5, reach_km: 9600.0 },
            ModulationRow { name: "QPSK", level: 4, bits_per_symbol: 2, slot_bandwidth_ghz: 12.5, data_rate_gbps: 25.0, reach_km: 4800.0 },
            ModulationRow { name: "8QAM", level: 8, bits_per_symbol: 3, slot_bandwidth_ghz: 12.5, data_rate_gbps: 37.5, reach_km: 2400.0 },
            ModulationRow { name: "16QAM", level: 16, bits_per_symbol: 4, slot_bandwidth_ghz: 12.5, data_rate_gbps: 50.0, reach_km: 1200.0 },
        ];
        ModulationTable { rows }
    }

    pub fn rows(&self) -> &[ModulationRow] {
        &self.rows
    }

    fn row(&self, level: u8) -> &ModulationRow {
        self.rows
            .iter()
            .find(|r| r.level == level)
            .unwrap_or_else(|| panic!("unknown modulation level {level}"))
    }

    /// Transmission reach of a modulation level, in kilometers.
    pub fn reach(&self, level: u8) -> f64 {
        self.row(level).reach_km
    }

    /// Data rate of one slot at a modulation level, in Gbps.
    pub fn rate_per_slot(&self, level: u8) -> f64 {
        self.row(level).data_rate_gbps
    }

    /// Highest modulation level whose reach covers `distance_km`, or `None`
    /// if the distance exceeds every format's reach.
    pub fn best_level_for_distance(&self, distance_km: f64) -> Option<u8> {
        self.rows
            .iter()
            .filter(|r| distance_km <= r.reach_km)
            .max_by_key(|r| r.level)
            .map(|r| r.level)
    }
}

/// An optical channel: fiber route, spectrum span (1-based inclusive),
/// modulation level, physical length, and the groomed reservations.
#[derive(Debug, Clone)]
pub struct Lightpath {
    pub id: LightpathId,
    pub from: NodeId,
    pub to: NodeId,
    pub fiber_route: Vec<FiberId>,
    pub route_nodes: Vec<NodeId>,
    pub xi_l: usize,
    pub xi_r: usize,
    pub level: u8,
    pub length_km: f64,
    /// Reserved Gbps per groomed request.
    pub groomed: BTreeMap<RequestId, f64>,
    pub capacity_gbps: f64,
}

impl Lightpath {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: LightpathId,
        fiber_route: Vec<FiberId>,
        route_nodes: Vec<NodeId>,
        xi_l: usize,
        xi_r: usize,
        level: u8,
        length_km: f64,
        table: &ModulationTable,
    ) -> Self {
        assert!(xi_l >= 1 && xi_l <= xi_r, "bad spectrum span [{xi_l}, {xi_r}]");
        assert!(
            length_km <= table.reach(level),
            "route length {length_km} km exceeds reach of level {level}"
        );
        let capacity = (xi_r - xi_l + 1) as f64 * table.rate_per_slot(level);
        Lightpath {
            id,
            from: route_nodes[0],
            to: *route_nodes.last().unwrap(),
            fiber_route,
            route_nodes,
            xi_l,
            xi_r,
            level,
            length_km,
            groomed: BTreeMap::new(),
            capacity_gbps: capacity,
        }
    }

    pub fn slot_count(&self) -> usize {
        self.xi_r - self.xi_l + 1
    }

    pub fn groomed_load(&self) -> f64 {
        self.groomed.values().sum()
    }

    pub fn free_capacity(&self) -> f64 {
        self.capacity_gbps - self.groomed_load()
    }
}

/// A lightpath request: endpoints and the demanded slot count.
#[derive(Debug, Clone, Copy)]
pub struct LightpathRequest {
    pub i: NodeId,
    pub j: NodeId,
    pub theta: usize,
}

/// Available Spectrum Slots Intersection: slots free on every fiber of the
/// route, 1-based, sorted ascending.
pub fn compute_assi(net: &MultiLayerNet, route: &[FiberId]) -> Vec<usize> {
    assert!(!route.is_empty(), "empty optical route");
    (1..=net.slots_per_fiber)
        .filter(|&p| route.iter().all(|&f| !net.fibers[f].spectrum.is_set(p)))
        .collect()
}

/// Slot Borders Through Lightpaths: borders `w` in `1..=B+1` that no
/// lightpath on any route fiber strictly straddles.
pub fn compute_sbtl(net: &MultiLayerNet, route: &[FiberId]) -> Vec<usize> {
    assert!(!route.is_empty(), "empty optical route");
    let route_set: BTreeSet<FiberId> = route.iter().copied().collect();
    let spans: Vec<(usize, usize)> = net
        .lightpaths
        .values()
        .filter(|lp| lp.fiber_route.iter().any(|f| route_set.contains(f)))
        .map(|lp| (lp.xi_l, lp.xi_r))
        .collect();
    (1..=net.slots_per_fiber + 1)
        .filter(|&w| !spans.iter().any(|&(l, r)| l < w && w <= r))
        .collect()
}

/// Which edge of the span stays fixed while a degradation shrinks it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    /// Keep `xi_l`; free slots on the right.
    Left,
    /// Keep `xi_r`; free slots on the left.
    Right,
}

#[derive(Debug, Error, PartialEq)]
pub enum DegradeError {
    #[error("level {new} is not higher than current level {current}")]
    NotADegradation { current: u8, new: u8 },
    #[error("route length {length} km exceeds reach {reach} km of level {level}")]
    ReachExceeded { length: f64, reach: f64, level: u8 },
    #[error("groomed load {load} Gbps exceeds post-degradation capacity {capacity} Gbps")]
    CapacityBelowLoad { load: f64, capacity: f64 },
}

/// Raises a lightpath's modulation level and shrinks its span so that
/// `slot_count * log2(level)` is conserved (rounded up to whole slots),
/// keeping `xi_l` anchored and freeing slots on the right.
pub fn degrade_lightpath(
    net: &mut MultiLayerNet,
    id: LightpathId,
    new_level: u8,
    table: &ModulationTable,
) -> Result<(), DegradeError> {
    degrade_lightpath_anchored(net, id, new_level, Anchor::Left, table)
}

/// As [`degrade_lightpath`], with an explicit anchor side.
pub fn degrade_lightpath_anchored(
    net: &mut MultiLayerNet,
    id: LightpathId,
    new_level: u8,
    anchor: Anchor,
    table: &ModulationTable,
) -> Result<(), DegradeError> {
    let lp = &net.lightpaths[&id];
    let new_count = plan_degradation(lp, new_level, table)?;
    let (xi_l, xi_r) = (lp.xi_l, lp.xi_r);
    let (new_l, new_r) = match anchor {
        Anchor::Left => (xi_l, xi_l + new_count - 1),
        Anchor::Right => (xi_r - new_count + 1, xi_r),
    };
    let fiber_route = lp.fiber_route.clone();
    for &f in &fiber_route {
        if new_l > xi_l {
            net.fibers[f].spectrum.clear_range(xi_l, new_l - 1);
        }
        if new_r < xi_r {
            net.fibers[f].spectrum.clear_range(new_r + 1, xi_r);
        }
    }
    let lp = net.lightpaths.get_mut(&id).unwrap();
    lp.xi_l = new_l;
    lp.xi_r = new_r;
    lp.level = new_level;
    lp.capacity_gbps = new_count as f64 * table.rate_per_slot(new_level);
    Ok(())
}

/// Checks feasibility and returns the post-degradation slot count.
fn plan_degradation(
    lp: &Lightpath,
    new_level: u8,
    table: &ModulationTable,
) -> Result<usize, DegradeError> {
    if new_level <= lp.level {
        return Err(DegradeError::NotADegradation { current: lp.level, new: new_level });
    }
    let reach = table.reach(new_level);
    if lp.length_km > reach {
        return Err(DegradeError::ReachExceeded { length: lp.length_km, reach, level: new_level });
    }
    let old_bits = lp.slot_count() as f64 * f64::from(new_level_log2(lp.level));
    let new_count = (old_bits / f64::from(new_level_log2(new_level))).ceil() as usize;
    let capacity = new_count as f64 * table.rate_per_slot(new_level);
    if lp.groomed_load() > capacity + 1e-9 {
        return Err(DegradeError::CapacityBelowLoad { load: lp.groomed_load(), capacity });
    }
    Ok(new_count)
}

fn new_level_log2(level: u8) -> u32 {
    assert!(level.is_power_of_two() && level >= 2, "bad modulation level {level}");
    level.trailing_zeros()
}

/// Outcome of OD-MSA: the degradations to apply plus the span and level of
/// the new lightpath. Application is atomic across all route fibers.
#[derive(Debug, Clone)]
pub struct OdMsaPlan {
    pub degradations: Vec<(LightpathId, u8, Anchor)>,
    pub span: (usize, usize),
    pub level: u8,
}

/// Runs the OD-MSA procedure on an optical route for lightpath request
/// `l0`, without mutating the network. `distance_km` is the route length.
///
/// Returns the establishment plan, or `None` when the request is blocked
/// (in which case nothing may be applied).
pub fn od_msa(
    net: &MultiLayerNet,
    route: &[FiberId],
    l0: LightpathRequest,
    distance_km: f64,
    table: &ModulationTable,
) -> Option<OdMsaPlan> {
    assert!(l0.theta >= 1, "lightpath request demands no slots");
    if distance_km > table.reach(DEFAULT_LEVEL) {
        return None;
    }
    let level = DEFAULT_LEVEL;
    let assi = compute_assi(net, route);

    // A run already wide enough: First-Fit, no degradation.
    if let Some(&(l, _)) = runs(&assi).iter().find(|&&(l, r)| r - l + 1 >= l0.theta) {
        return Some(OdMsaPlan { degradations: Vec::new(), span: (l, l + l0.theta - 1), level });
    }

    // Candidate seed regions: the widest free run when one exists, else
    // the slot borders in First-Fit order (the earliest border whose
    // neighbor degradations make room wins).
    let seeds: Vec<(usize, usize)> = if !assi.is_empty() {
        let widest = runs(&assi)
            .into_iter()
            .max_by(|a, b| (a.1 - a.0).cmp(&(b.1 - b.0)).then(b.0.cmp(&a.0)))
            .unwrap();
        vec![widest]
    } else {
        compute_sbtl(net, route).into_iter().map(|w| (w, w - 1)).collect()
    };

    for seed in seeds {
        let (l, r) = seed;
        // Single-side: degrade the lightpaths ending just below the seed.
        let mut degradations = plan_side(net, route, l, Anchor::Left, table);
        if let Some(plan) = placement(net, route, seed, &degradations, l0.theta, level, false, table) {
            return Some(plan);
        }
        // Double-side: also degrade the lightpaths starting just above it.
        degradations.extend(plan_side(net, route, r, Anchor::Right, table));
        if let Some(plan) = placement(net, route, seed, &degradations, l0.theta, level, true, table) {
            return Some(plan);
        }
    }
    None
}

/// Applies an OD-MSA plan and installs the new lightpath.
pub fn apply_od_msa(
    net: &mut MultiLayerNet,
    route: &[FiberId],
    plan: &OdMsaPlan,
    table: &ModulationTable,
) -> LightpathId {
    for &(id, level, anchor) in &plan.degradations {
        degrade_lightpath_anchored(net, id, level, anchor, table)
            .expect("planned degradation must be feasible");
    }
    let id = net.next_lightpath_id();
    let nodes = net.fiber_route_nodes(route);
    let length = net.fiber_route_length(route);
    let lp = Lightpath::new(id, route.to_vec(), nodes, plan.span.0, plan.span.1, plan.level, length, table);
    net.install_lightpath(lp);
    id
}

/// Maximal consecutive runs of a sorted slot list, as `(l, r)` inclusive.
fn runs(slots: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &p in slots {
        match out.last_mut() {
            Some((_, r)) if *r + 1 == p => *r = p,
            _ => out.push((p, p)),
        }
    }
    out
}

/// Plans distance-best degradations for the neighbor set on one side of a
/// seed region. `edge` is the occupied slot adjacent to the region (l-1 for
/// the left side given as `l` with `Anchor::Left`, r+1 for the right side
/// given as `r` with `Anchor::Right`). Members that cannot be degraded
/// contribute nothing and are skipped.
fn plan_side(
    net: &MultiLayerNet,
    route: &[FiberId],
    seed_edge: usize,
    anchor: Anchor,
    table: &ModulationTable,
) -> Vec<(LightpathId, u8, Anchor)> {
    let route_set: BTreeSet<FiberId> = route.iter().copied().collect();
    let adjacent = match anchor {
        Anchor::Left => {
            if seed_edge <= 1 {
                return Vec::new();
            }
            seed_edge - 1
        }
        Anchor::Right => {
            if seed_edge >= net.slots_per_fiber {
                return Vec::new();
            }
            seed_edge + 1
        }
    };
    let mut plans = Vec::new();
    for lp in net.lightpaths.values() {
        if !lp.fiber_route.iter().any(|f| route_set.contains(f)) {
            continue;
        }
        let touches = match anchor {
            Anchor::Left => lp.xi_r == adjacent,
            Anchor::Right => lp.xi_l == adjacent,
        };
        if !touches {
            continue;
        }
        if let Some(best) = table.best_level_for_distance(lp.length_km) {
            if best > lp.level && plan_degradation(lp, best, table).is_ok() {
                plans.push((lp.id, best, anchor));
            }
        }
    }
    plans
}

/// Evaluates a planned state: frees the planned slots on copies of the
/// route fibers' masks, grows the seed region over slots free on every
/// fiber, and places the new lightpath First-Fit inside it if it fits.
#[allow(clippy::too_many_arguments)]
fn placement(
    net: &MultiLayerNet,
    route: &[FiberId],
    seed: (usize, usize),
    degradations: &[(LightpathId, u8, Anchor)],
    theta: usize,
    level: u8,
    allow_right: bool,
    table: &ModulationTable,
) -> Option<OdMsaPlan> {
    let b = net.slots_per_fiber;
    let mut masks: BTreeMap<FiberId, crate::net::SpectrumMask> = route
        .iter()
        .map(|&f| (f, net.fibers[f].spectrum.clone()))
        .collect();
    for &(id, new_level, anchor) in degradations {
        let lp = &net.lightpaths[&id];
        let new_count = plan_degradation(lp, new_level, table).expect("side plan is pre-validated");
        let (clear_l, clear_r) = match anchor {
            Anchor::Left => (lp.xi_l + new_count, lp.xi_r),
            Anchor::Right => (lp.xi_l, lp.xi_r - new_count),
        };
        if clear_l <= clear_r {
            for &f in &lp.fiber_route {
                if let Some(mask) = masks.get_mut(&f) {
                    mask.clear_range(clear_l, clear_r);
                }
            }
        }
    }
    let free_everywhere = |p: usize| masks.values().all(|m| !m.is_set(p));
    let (l, r) = seed;
    let mut start = l;
    while start > 1 && free_everywhere(start - 1) {
        start -= 1;
    }
    let mut end = r;
    if allow_right {
        while end < b && free_everywhere(end + 1) {
            end += 1;
        }
    }
    if end >= start && end - start + 1 >= theta {
        Some(OdMsaPlan {
            degradations: degradations.to_vec(),
            span: (start, start + theta - 1),
            level,
        })
    } else {
        None
    }
}

/// First-Fit: the smallest starting slot of a `theta`-wide span free on
/// every fiber of the route.
pub fn first_fit(net: &MultiLayerNet, route: &[FiberId], theta: usize) -> Option<usize> {
    let assi = compute_assi(net, route);
    runs(&assi)
        .into_iter()
        .find(|&(l, r)| r - l + 1 >= theta)
        .map(|(l, _)| l)
}

/// How a request was accommodated in the optical layer.
#[derive(Debug, Clone, PartialEq)]
pub enum OpticalOutcome {
    /// Reserved capacity on an existing lightpath chain.
    Groomed { chain: Vec<LightpathId> },
    /// A new lightpath was established (possibly after OD-MSA degradation).
    Established { lightpath: LightpathId, degradations: usize },
    Blocked,
}

/// Provisioning controls for the lightpath layer.
#[derive(Debug, Clone, Copy)]
pub struct OpticalPolicy {
    pub routing: RoutePolicy,
    pub allow_degradation: bool,
}

/// Threshold-based grooming with new-lightpath establishment:
/// (a) groom into an existing chain with spare capacity; else (b) establish
/// a new threshold-sized lightpath First-Fit on the policy route; else
/// (c) if enabled, invoke OD-MSA; else blocked.
///
/// On success the request's reservation is applied to the chain.
pub fn provision_lightpath_layer(
    net: &mut MultiLayerNet,
    req: &ServiceRequest,
    policy: OpticalPolicy,
    threshold_gbps: f64,
    table: &ModulationTable,
) -> OpticalOutcome {
    if let Some(chain) = routing::groomable_chain(net, req.s, req.d, req.bw) {
        for id in &chain {
            net.lightpaths.get_mut(id).unwrap().groomed.insert(req.id, req.bw);
        }
        return OpticalOutcome::Groomed { chain };
    }

    let route = match policy.routing {
        RoutePolicy::MinRh => routing::min_rh_route(net, Layer::Optical, req.s, req.d, req.bw),
        RoutePolicy::MinPdr => routing::min_pdr_route(net, Layer::Optical, req.s, req.d, req.bw),
    };
    let Some(route) = route else {
        return OpticalOutcome::Blocked;
    };
    let fibers: Vec<FiberId> = route.links.iter().map(|&u| u as FiberId).collect();
    let distance = net.fiber_route_length(&fibers);
    if distance > table.reach(DEFAULT_LEVEL) {
        return OpticalOutcome::Blocked;
    }
    // establish at the default level so later degradations have headroom;
    // theta is the slot demand at that level
    let level = DEFAULT_LEVEL;
    let theta = (req.bw.max(threshold_gbps) / table.rate_per_slot(level)).ceil() as usize;

    if let Some(l) = first_fit(net, &fibers, theta) {
        let id = net.next_lightpath_id();
        let nodes = net.fiber_route_nodes(&fibers);
        let mut lp = Lightpath::new(id, fibers, nodes, l, l + theta - 1, level, distance, table);
        lp.groomed.insert(req.id, req.bw);
        net.install_lightpath(lp);
        return OpticalOutcome::Established { lightpath: id, degradations: 0 };
    }

    if policy.allow_degradation {
        let l0 = LightpathRequest { i: req.s, j: req.d, theta };
        if let Some(plan) = od_msa(net, &fibers, l0, distance, table) {
            let count = plan.degradations.len();
            let id = apply_od_msa(net, &fibers, &plan, table);
            net.lightpaths.get_mut(&id).unwrap().groomed.insert(req.id, req.bw);
            return OpticalOutcome::Established { lightpath: id, degradations: count };
        }
    }
    OpticalOutcome::Blocked
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::load_topology;

    fn table() -> ModulationTable {
        ModulationTable::table_i()
    }

    #[test]
    fn table_i_values() {
        let t = table();
        assert_eq!(t.reach(2), 9600.0);
        assert_eq!(t.reach(4), 4800.0);
        assert_eq!(t.reach(8), 2400.0);
        assert_eq!(t.reach(16), 1200.0);
        assert_eq!(t.rate_per_slot(2), 12.5);
        assert_eq!(t.rate_per_slot(4), 25.0);
        assert_eq!(t.rate_per_slot(8), 37.5);
        assert_eq!(t.rate_per_slot(16), 50.0);
        for r in t.rows() {
            assert_eq!(r.data_rate_gbps, f64::from(r.bits_per_symbol) * 12.5);
        }
    }

    #[test]
    #[should_panic(expected = "unknown modulation level")]
    fn unknown_level_is_contract_violation() {
        table().reach(3);
    }

    #[test]
    fn best_level_brackets() {
        let t = table();
        assert_eq!(t.best_level_for_distance(1000.0), Some(16));
        assert_eq!(t.best_level_for_distance(1200.0), Some(16)); // boundary inclusive
        assert_eq!(t.best_level_for_distance(4800.5), Some(2));
        assert_eq!(t.best_level_for_distance(9600.0), Some(2));
        assert_eq!(t.best_level_for_distance(9600.1), None);
    }

    fn one_fiber_net() -> MultiLayerNet {
        load_topology("nodes 2 slots 10\nlink 0 1 1000\n").unwrap()
    }

    fn add_lp(net: &mut MultiLayerNet, fibers: Vec<FiberId>, l: usize, r: usize, level: u8, km: f64) -> LightpathId {
        let id = net.next_lightpath_id();
        let nodes = net.fiber_route_nodes(&fibers);
        let lp = Lightpath::new(id, fibers, nodes, l, r, level, km, &table());
        net.install_lightpath(lp);
        id
    }

    #[test]
    fn assi_masks() {
        let mut net = load_topology("nodes 3 slots 10\nlink 0 1 100\nlink 1 2 100\n").unwrap();
        let f01 = net.fiber_between(0, 1).unwrap();
        let f12 = net.fiber_between(1, 2).unwrap();
        assert_eq!(compute_assi(&net, &[f01, f12]), (1..=10).collect::<Vec<_>>());
        // masks 1100000000 and 1010000000 (1 = utilized)
        add_lp(&mut net, vec![f01], 1, 2, 2, 100.0);
        add_lp(&mut net, vec![f12], 1, 1, 2, 100.0);
        add_lp(&mut net, vec![f12], 3, 3, 2, 100.0);
        assert_eq!(compute_assi(&net, &[f01, f12]), vec![4, 5, 6, 7, 8, 9, 10]);
    }

    #[test]
    fn assi_fully_loaded() {
        let mut net = one_fiber_net();
        add_lp(&mut net, vec![0], 1, 10, 2, 1000.0);
        assert_eq!(compute_assi(&net, &[0]), Vec::<usize>::new());
    }

    #[test]
    fn sbtl_straddles() {
        let mut net = one_fiber_net();
        assert_eq!(compute_sbtl(&net, &[0]), (1..=11).collect::<Vec<_>>());
        add_lp(&mut net, vec![0], 3, 5, 2, 1000.0);
        let expect: Vec<usize> = (1..=11).filter(|w| *w != 4 && *w != 5).collect();
        assert_eq!(compute_sbtl(&net, &[0]), expect);
    }

    #[test]
    fn sbtl_abutment_is_not_straddling() {
        let mut net = one_fiber_net();
        add_lp(&mut net, vec![0], 1, 2, 2, 1000.0);
        add_lp(&mut net, vec![0], 3, 4, 2, 1000.0);
        assert!(compute_sbtl(&net, &[0]).contains(&3));
    }

    #[test]
    fn degradation_conserves_capacity() {
        let mut net = one_fiber_net();
        let id = add_lp(&mut net, vec![0], 1, 4, 2, 1000.0);
        degrade_lightpath(&mut net, id, 4, &table()).unwrap();
        let lp = &net.lightpaths[&id];
        assert_eq!((lp.xi_l, lp.xi_r), (1, 2));
        assert_eq!(lp.capacity_gbps, 50.0);
        assert!(net.fibers[0].spectrum.range_free(3, 10));
        assert!(net.spectrum_consistent());
    }

    #[test]
    fn degradation_refused_beyond_reach() {
        let mut net = load_topology("nodes 2 slots 10\nlink 0 1 5000\n").unwrap();
        let id = add_lp(&mut net, vec![0], 1, 4, 2, 5000.0);
        let err = degrade_lightpath(&mut net, id, 4, &table()).unwrap_err();
        assert!(matches!(err, DegradeError::ReachExceeded { .. }));
    }

    #[test]
    fn degradation_ceiling_rule() {
        let mut net = one_fiber_net();
        let id = add_lp(&mut net, vec![0], 1, 3, 2, 1000.0);
        degrade_lightpath(&mut net, id, 4, &table()).unwrap();
        let lp = &net.lightpaths[&id];
        assert_eq!(lp.slot_count(), 2); // ceil(3/2)
        assert!(net.fibers[0].spectrum.range_free(3, 3));
    }

    #[test]
    fn od_msa_single_side() {
        // B=10: L1 on slots 1-4 (level 2, 1000 km), slots 5-6 free, rest
        // occupied; theta=4 requires degrading L1 to level 4.
        let mut net = one_fiber_net();
        let l1 = add_lp(&mut net, vec![0], 1, 4, 2, 1000.0);
        add_lp(&mut net, vec![0], 7, 10, 2, 1000.0);
        let plan = od_msa(&net, &[0], LightpathRequest { i: 0, j: 1, theta: 4 }, 1000.0, &table()).unwrap();
        assert_eq!(plan.degradations, vec![(l1, 16, Anchor::Left)]);
        let id = apply_od_msa(&mut net, &[0], &plan, &table());
        let lp = &net.lightpaths[&id];
        assert_eq!((lp.xi_l, lp.xi_r), (2, 5));
        assert!(net.spectrum_consistent());
    }

    #[test]
    fn od_msa_blocked_when_nothing_degradable() {
        let mut net = one_fiber_net();
        add_lp(&mut net, vec![0], 1, 4, 16, 1000.0);
        add_lp(&mut net, vec![0], 7, 10, 16, 1000.0);
        let before = net.fibers[0].spectrum.clone();
        let plan = od_msa(&net, &[0], LightpathRequest { i: 0, j: 1, theta: 4 }, 1000.0, &table());
        assert!(plan.is_none());
        assert_eq!(net.fibers[0].spectrum, before);
    }

    #[test]
    fn od_msa_no_degradation_needed() {
        let net = one_fiber_net();
        let plan = od_msa(&net, &[0], LightpathRequest { i: 0, j: 1, theta: 3 }, 1000.0, &table()).unwrap();
        assert!(plan.degradations.is_empty());
        assert_eq!(plan.span, (1, 3));
        assert_eq!(plan.level, DEFAULT_LEVEL);
    }

    #[test]
    fn provision_grooms_then_establishes_default_level() {
        use crate::net::RequestId;
        use crate::electric::ServiceRequest;
        let mut net = load_topology("nodes 2 slots 40\nlink 0 1 1000\n").unwrap();
        let r1 = ServiceRequest::new(RequestId(1), 0, 1, 5.0, 0.0, 1.0, 0.0, 3, 1.0);
        let policy = OpticalPolicy { routing: RoutePolicy::MinRh, allow_degradation: false };
        let out = provision_lightpath_layer(&mut net, &r1, policy, 150.0, &table());
        // any request below the threshold triggers a 150 Gbps lightpath:
        // 12 slots at the default level
        let OpticalOutcome::Established { lightpath, degradations: 0 } = out else {
            panic!("want establishment, got {out:?}");
        };
        let lp = &net.lightpaths[&lightpath];
        assert_eq!((lp.level, lp.slot_count()), (DEFAULT_LEVEL, 12));
        assert_eq!(lp.capacity_gbps, 150.0);
        // a second small request between the same endpoints grooms into it
        let r2 = ServiceRequest::new(RequestId(2), 0, 1, 5.0, 0.1, 1.0, 0.0, 3, 1.0);
        let out = provision_lightpath_layer(&mut net, &r2, policy, 150.0, &table());
        assert_eq!(out, OpticalOutcome::Groomed { chain: vec![lightpath] });
        assert_eq!(net.lightpaths.len(), 1);
        assert_eq!(net.lightpaths[&lightpath].free_capacity(), 140.0);
    }
}
