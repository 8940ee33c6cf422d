//! Three-layer network state: optical fibers with spectrum masks, the
//! electric virtual topology of lightpaths, and the auxiliary service layer
//! of active requests, plus the weighted auxiliary graphs used by degraded
//! routing.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::electric::ServiceRequest;
use crate::optical::Lightpath;

/// Node index inside one simulation. Nodes are `0..node_count`.
pub type NodeId = usize;

/// Identifier of a unidirectional fiber (index into `MultiLayerNet::fibers`).
pub type FiberId = usize;

/// Identifier of a lightpath, unique over a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LightpathId(pub u64);

/// Identifier of a service request, unique over a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RequestId(pub u64);

/// Which layer a route lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layer {
    /// Virtual topology of lightpaths; links carry service requests.
    Electric,
    /// Fiber topology; links carry lightpaths.
    Optical,
}

/// Bitmask over the `B` spectrum slots of one fiber. Slot indices are
/// 1-based; a set bit means the slot is utilized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumMask {
    words: Vec<u64>,
    len: usize,
}

impl SpectrumMask {
    pub fn new(slots: usize) -> Self {
        SpectrumMask {
            words: vec![0; slots.div_ceil(64)],
            len: slots,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    /// True if 1-based slot `p` is utilized.
    pub fn is_set(&self, p: usize) -> bool {
        assert!(p >= 1 && p <= self.len, "slot {p} out of range");
        let bit = p - 1;
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    /// Marks slots `l..=r` utilized. Panics if any is already set.
    pub fn set_range(&mut self, l: usize, r: usize) {
        for p in l..=r {
            assert!(!self.is_set(p), "slot {p} already utilized");
            let bit = p - 1;
            self.words[bit / 64] |= 1 << (bit % 64);
        }
    }

    /// Clears slots `l..=r`.
    pub fn clear_range(&mut self, l: usize, r: usize) {
        for p in l..=r {
            let bit = p - 1;
            self.words[bit / 64] &= !(1 << (bit % 64));
        }
    }

    /// True if every slot in `l..=r` is free.
    pub fn range_free(&self, l: usize, r: usize) -> bool {
        (l..=r).all(|p| !self.is_set(p))
    }

    pub fn count_utilized(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_free(&self) -> usize {
        self.len - self.count_utilized()
    }
}

/// A unidirectional fiber with its spectrum occupation mask.
#[derive(Debug, Clone)]
pub struct FiberLink {
    pub id: FiberId,
    pub from: NodeId,
    pub to: NodeId,
    pub length_km: f64,
    pub spectrum: SpectrumMask,
}

/// View of one link of a layer: the carried upper entities and the free
/// capacity (Gbps in the electric layer, slots in the optical layer).
#[derive(Debug, Clone)]
pub struct LayerLink {
    pub from: NodeId,
    pub to: NodeId,
    /// Ordinal among parallel links from `from` to `to`.
    pub k: usize,
    /// Identifier of the underlying lightpath or fiber.
    pub uid: u64,
    /// Requests (electric) or lightpaths (optical) routed on this link.
    pub carried: Vec<u64>,
    pub free_capacity: f64,
}

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: duplicate directed link {u} -> {v}")]
    DuplicateLink { line: usize, u: NodeId, v: NodeId },
    #[error("line {line}: self-loop {u} -> {u}")]
    SelfLoop { line: usize, u: NodeId },
    #[error("line {line}: non-positive length {len}")]
    BadLength { line: usize, len: f64 },
}

/// The three-layer state of one simulated network.
#[derive(Debug, Clone)]
pub struct MultiLayerNet {
    pub node_count: usize,
    pub slots_per_fiber: usize,
    pub fibers: Vec<FiberLink>,
    /// Outgoing fiber ids per node.
    pub fiber_out: Vec<Vec<FiberId>>,
    /// Active lightpaths, keyed by id (deterministic iteration order).
    pub lightpaths: BTreeMap<LightpathId, Lightpath>,
    /// Active service requests, keyed by id.
    pub requests: BTreeMap<RequestId, ServiceRequest>,
    next_lightpath: u64,
}

/// Parses a topology description.
///
/// The format is one header `nodes <N> slots <B>` followed by lines
/// `link <u> <v> <length_km>`; each link line creates both directions.
/// Blank lines and lines starting with `#` are ignored.
pub fn load_topology(text: &str) -> Result<MultiLayerNet, TopologyError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_no, header) = lines
        .next()
        .ok_or_else(|| TopologyError::Parse { line: 1, msg: "empty topology".into() })?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let (node_count, slots) = match parts.as_slice() {
        ["nodes", n, "slots", b] => {
            let n: usize = n.parse().map_err(|_| TopologyError::Parse {
                line: header_no,
                msg: format!("bad node count {n:?}"),
            })?;
            let b: usize = b.parse().map_err(|_| TopologyError::Parse {
                line: header_no,
                msg: format!("bad slot count {b:?}"),
            })?;
            (n, b)
        }
        _ => {
            return Err(TopologyError::Parse {
                line: header_no,
                msg: format!("expected `nodes <N> slots <B>`, got {header:?}"),
            })
        }
    };
    if node_count == 0 || slots == 0 {
        return Err(TopologyError::Parse {
            line: header_no,
            msg: "node and slot counts must be positive".into(),
        });
    }

    let mut net = MultiLayerNet {
        node_count,
        slots_per_fiber: slots,
        fibers: Vec::new(),
        fiber_out: vec![Vec::new(); node_count],
        lightpaths: BTreeMap::new(),
        requests: BTreeMap::new(),
        next_lightpath: 0,
    };
    let mut seen: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();

    for (line_no, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let (u, v, len): (NodeId, NodeId, f64) = match parts.as_slice() {
            ["link", u, v, len] => {
                let parse = |s: &str, what: &str| -> Result<usize, TopologyError> {
                    s.parse().map_err(|_| TopologyError::Parse {
                        line: line_no,
                        msg: format!("bad {what} {s:?}"),
                    })
                };
                let u = parse(u, "node")?;
                let v = parse(v, "node")?;
                let len: f64 = len.parse().map_err(|_| TopologyError::Parse {
                    line: line_no,
                    msg: format!("bad length {len:?}"),
                })?;
                (u, v, len)
            }
            _ => {
                return Err(TopologyError::Parse {
                    line: line_no,
                    msg: format!("expected `link <u> <v> <length_km>`, got {line:?}"),
                })
            }
        };
        if u == v {
            return Err(TopologyError::SelfLoop { line: line_no, u });
        }
        if u >= node_count || v >= node_count {
            return Err(TopologyError::Parse {
                line: line_no,
                msg: format!("node out of range (N={node_count})"),
            });
        }
        if !len.is_finite() || len <= 0.0 {
            return Err(TopologyError::BadLength { line: line_no, len });
        }
        for (a, b) in [(u, v), (v, u)] {
            if !seen.insert((a, b)) {
                return Err(TopologyError::DuplicateLink { line: line_no, u: a, v: b });
            }
            let id = net.fibers.len();
            net.fibers.push(FiberLink {
                id,
                from: a,
                to: b,
                length_km: len,
                spectrum: SpectrumMask::new(slots),
            });
            net.fiber_out[a].push(id);
        }
    }
    Ok(net)
}

/// The bundled 24-node, 43-link USNet topology (km link lengths), with the
/// full 300-slot spectrum.
pub fn usnet_text() -> &'static str {
    include_str!("../data/usnet.topo")
}

impl MultiLayerNet {
    /// Directed fiber from `u` to `v`, if one exists.
    pub fn fiber_between(&self, u: NodeId, v: NodeId) -> Option<FiberId> {
        self.fiber_out[u]
            .iter()
            .copied()
            .find(|&f| self.fibers[f].to == v)
    }

    pub fn fiber_route_length(&self, route: &[FiberId]) -> f64 {
        route.iter().map(|&f| self.fibers[f].length_km).sum()
    }

    /// Node sequence of a connected fiber route.
    pub fn fiber_route_nodes(&self, route: &[FiberId]) -> Vec<NodeId> {
        let mut nodes = Vec::with_capacity(route.len() + 1);
        for (i, &f) in route.iter().enumerate() {
            let fiber = &self.fibers[f];
            if i == 0 {
                nodes.push(fiber.from);
            } else {
                assert_eq!(fiber.from, *nodes.last().unwrap(), "disconnected fiber route");
            }
            nodes.push(fiber.to);
        }
        nodes
    }

    pub fn next_lightpath_id(&mut self) -> LightpathId {
        let id = LightpathId(self.next_lightpath);
        self.next_lightpath += 1;
        id
    }

    /// Installs a lightpath, marking its slots on every route fiber.
    /// The span must be free on every fiber of the route.
    pub fn install_lightpath(&mut self, lp: Lightpath) {
        for &f in &lp.fiber_route {
            self.fibers[f].spectrum.set_range(lp.xi_l, lp.xi_r);
        }
        self.lightpaths.insert(lp.id, lp);
    }

    /// Removes a lightpath and clears its slots.
    pub fn remove_lightpath(&mut self, id: LightpathId) -> Lightpath {
        let lp = self.lightpaths.remove(&id).expect("unknown lightpath");
        for &f in &lp.fiber_route {
            self.fibers[f].spectrum.clear_range(lp.xi_l, lp.xi_r);
        }
        lp
    }

    /// Links of one layer, ordered by (from, to, k).
    pub fn layer_links(&self, layer: Layer) -> Vec<LayerLink> {
        let mut links: Vec<LayerLink> = match layer {
            Layer::Electric => self
                .lightpaths
                .values()
                .map(|lp| LayerLink {
                    from: lp.from,
                    to: lp.to,
                    k: 0,
                    uid: lp.id.0,
                    carried: lp.groomed.keys().map(|r| r.0).collect(),
                    free_capacity: lp.free_capacity(),
                })
                .collect(),
            Layer::Optical => self
                .fibers
                .iter()
                .map(|f| LayerLink {
                    from: f.from,
                    to: f.to,
                    k: 0,
                    uid: f.id as u64,
                    carried: self
                        .lightpaths
                        .values()
                        .filter(|lp| lp.fiber_route.contains(&f.id))
                        .map(|lp| lp.id.0)
                        .collect(),
                    free_capacity: f.spectrum.count_free() as f64,
                })
                .collect(),
        };
        links.sort_by_key(|l| (l.from, l.to, l.uid));
        let mut prev: Option<(NodeId, NodeId)> = None;
        let mut k = 0;
        for l in &mut links {
            if prev == Some((l.from, l.to)) {
                k += 1;
            } else {
                k = 0;
                prev = Some((l.from, l.to));
            }
            l.k = k;
        }
        links
    }

    /// Upper-layer entities relative to routing on `layer`: active requests
    /// (for the electric layer) or lightpaths (for the optical layer), as
    /// `(uid, source, destination, lower-layer route nodes)`.
    pub fn upper_entities(&self, layer: Layer) -> Vec<(u64, NodeId, NodeId, Vec<NodeId>)> {
        match layer {
            Layer::Electric => self
                .requests
                .values()
                .map(|r| (r.id.0, r.s, r.d, self.electric_route_nodes(&r.route)))
                .collect(),
            Layer::Optical => self
                .lightpaths
                .values()
                .map(|lp| (lp.id.0, lp.from, lp.to, lp.route_nodes.clone()))
                .collect(),
        }
    }

    /// Node sequence of a request's electric route (chain of lightpaths).
    pub fn electric_route_nodes(&self, route: &[LightpathId]) -> Vec<NodeId> {
        let mut nodes = Vec::with_capacity(route.len() + 1);
        for (i, id) in route.iter().enumerate() {
            let lp = &self.lightpaths[id];
            if i == 0 {
                nodes.push(lp.from);
            } else {
                assert_eq!(lp.from, *nodes.last().unwrap(), "disconnected electric route");
            }
            nodes.push(lp.to);
        }
        nodes
    }

    /// Full-rescan spectrum consistency check: per fiber, the mask must
    /// equal the union of resident lightpath spans, and spans must be
    /// pairwise disjoint.
    pub fn spectrum_consistent(&self) -> bool {
        for fiber in &self.fibers {
            let mut rebuilt = SpectrumMask::new(self.slots_per_fiber);
            for lp in self.lightpaths.values() {
                if lp.fiber_route.contains(&fiber.id) {
                    if !rebuilt.range_free(lp.xi_l, lp.xi_r) {
                        return false; // overlap
                    }
                    rebuilt.set_range(lp.xi_l, lp.xi_r);
                }
            }
            if rebuilt != fiber.spectrum {
                return false;
            }
        }
        true
    }
}

/// Weighted auxiliary graph over the upper layer, used by MinPDR routing.
///
/// Edge weight is `M * request_bit + resource_bit`: `M` if an upper-layer
/// request (or lightpath) connects the pair, plus one if a lower-layer link
/// with free capacity connects it directly. Pairs with neither have no edge.
#[derive(Debug, Clone)]
pub struct AuxGraph {
    pub nodes: usize,
    pub m: u64,
    weights: BTreeMap<(NodeId, NodeId), u64>,
}

impl AuxGraph {
    pub fn weight(&self, i: NodeId, j: NodeId) -> Option<u64> {
        self.weights.get(&(i, j)).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, u64)> + '_ {
        self.weights.iter().map(|(&(i, j), &w)| (i, j, w))
    }
}

/// Default auxiliary-graph weight constant: strictly larger than any
/// possible hop count times resource bit, so one request-crossing always
/// outweighs any number of resource hops.
pub fn default_aux_m(net: &MultiLayerNet) -> u64 {
    (net.node_count * net.slots_per_fiber + 1) as u64
}

/// Builds the auxiliary graph for routing on `layer`.
///
/// For the electric layer the upper layer is the service layer (edges from
/// active requests); for the optical layer it is the electric layer (edges
/// from lightpaths). `m` must exceed the node count.
pub fn build_aux_graph(net: &MultiLayerNet, layer: Layer, m: u64) -> AuxGraph {
    assert!(m > net.node_count as u64, "M must exceed the node count");
    let mut weights: BTreeMap<(NodeId, NodeId), u64> = BTreeMap::new();
    for (_, s, d, _) in net.upper_entities(layer) {
        weights.insert((s, d), m);
    }
    for link in net.layer_links(layer) {
        if link.free_capacity > 0.0 {
            let w = weights.entry((link.from, link.to)).or_insert(0);
            *w = (*w / m) * m + 1; // set the resource bit once
        }
    }
    AuxGraph { nodes: net.node_count, m, weights }
}

/// For an endpoint isolated in the upper layer of `layer` (no incident
/// request/lightpath edge), returns the originating and terminating nodes
/// of upper-layer entities whose lower-layer route passes through the
/// endpoint without terminating there.
///
/// Panics if the endpoint is not isolated.
pub fn replace_isolated_endpoint(
    net: &MultiLayerNet,
    layer: Layer,
    endpoint: NodeId,
) -> BTreeSet<NodeId> {
    let entities = net.upper_entities(layer);
    assert!(
        entities.iter().all(|&(_, s, d, _)| s != endpoint && d != endpoint),
        "endpoint {endpoint} is not isolated in the upper layer"
    );
    let mut out = BTreeSet::new();
    for (_, s, d, via) in &entities {
        if via.len() > 2 && via[1..via.len() - 1].contains(&endpoint) {
            out.insert(*s);
            out.insert(*d);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optical::{ModulationTable, Lightpath};

    fn line2() -> MultiLayerNet {
        load_topology("nodes 2 slots 10\nlink 0 1 100\n").unwrap()
    }

    #[test]
    fn parses_minimal_topology() {
        let net = line2();
        assert_eq!(net.node_count, 2);
        assert_eq!(net.fibers.len(), 2);
        assert_eq!(net.slots_per_fiber, 10);
        assert_eq!(net.fibers[0].length_km, 100.0);
        assert!(net.fibers.iter().all(|f| f.spectrum.count_free() == 10));
        assert_eq!(net.fiber_between(0, 1), Some(0));
        assert_eq!(net.fiber_between(1, 0), Some(1));
    }

    #[test]
    fn parses_usnet() {
        let net = load_topology(usnet_text()).unwrap();
        assert_eq!(net.node_count, 24);
        assert_eq!(net.fibers.len(), 86);
        assert!(net.fibers.iter().all(|f| f.length_km > 0.0));
        // both directions share the length
        for f in &net.fibers {
            let back = net.fiber_between(f.to, f.from).unwrap();
            assert_eq!(net.fibers[back].length_km, f.length_km);
        }
    }

    #[test]
    fn rejects_self_loop() {
        let err = load_topology("nodes 2 slots 10\nlink 0 0 5\n").unwrap_err();
        assert!(matches!(err, TopologyError::SelfLoop { line: 2, u: 0 }));
    }

    #[test]
    fn rejects_duplicate_and_bad_length() {
        let err = load_topology("nodes 2 slots 10\nlink 0 1 5\nlink 1 0 5\n").unwrap_err();
        assert!(matches!(err, TopologyError::DuplicateLink { line: 3, .. }));
        let err = load_topology("nodes 2 slots 10\nlink 0 1 0\n").unwrap_err();
        assert!(matches!(err, TopologyError::BadLength { line: 2, .. }));
        let err = load_topology("nodes 2 slots 10\nlink 0 1\n").unwrap_err();
        assert!(matches!(err, TopologyError::Parse { line: 2, .. }));
    }

    #[test]
    fn spectrum_mask_ranges() {
        let mut m = SpectrumMask::new(70);
        assert!(m.range_free(1, 70));
        m.set_range(3, 5);
        m.set_range(64, 66);
        assert!(m.is_set(3) && m.is_set(5) && m.is_set(64) && m.is_set(66));
        assert!(!m.is_set(6) && !m.is_set(63));
        assert_eq!(m.count_utilized(), 6);
        m.clear_range(4, 4);
        assert!(!m.is_set(4));
        assert_eq!(m.count_free(), 70 - 5);
    }

    #[test]
    fn aux_graph_resource_only() {
        let net = line2();
        let g = build_aux_graph(&net, Layer::Electric, 21);
        // free fiber exists but the electric layer is empty: no edges at all
        assert_eq!(g.weight(0, 1), None);
        let g = build_aux_graph(&net, Layer::Optical, 21);
        // fiber 0->1 free: resource link of weight 1
        assert_eq!(g.weight(0, 1), Some(1));
        assert_eq!(g.weight(1, 0), Some(1));
    }

    #[test]
    fn aux_graph_request_plus_resource() {
        // one lightpath 0->1 with spare capacity: optical-layer aux graph
        // sees request edge (M) plus resource edge (1)
        let mut net = line2();
        let table = ModulationTable::table_i();
        let id = net.next_lightpath_id();
        let lp = Lightpath::new(id, vec![0], vec![0, 1], 1, 4, 2, 100.0, &table);
        net.install_lightpath(lp);
        let g = build_aux_graph(&net, Layer::Optical, 21);
        assert_eq!(g.weight(0, 1), Some(22)); // M + 1
        // weight decomposition invariant
        for (_, _, w) in g.edges() {
            assert!(w / 21 <= 1 && w % 21 <= 1);
        }
    }

    #[test]
    fn isolated_endpoint_substitutes() {
        // two lightpaths passing through node 1 without terminating there
        let mut net = load_topology(
            "nodes 6 slots 10\nlink 0 1 100\nlink 1 2 100\nlink 3 1 100\nlink 1 4 100\n",
        )
        .unwrap();
        let table = ModulationTable::table_i();
        let f01 = net.fiber_between(0, 1).unwrap();
        let f12 = net.fiber_between(1, 2).unwrap();
        let f31 = net.fiber_between(3, 1).unwrap();
        let f14 = net.fiber_between(1, 4).unwrap();
        let id = net.next_lightpath_id();
        net.install_lightpath(Lightpath::new(id, vec![f01, f12], vec![0, 1, 2], 1, 2, 2, 200.0, &table));
        let id = net.next_lightpath_id();
        net.install_lightpath(Lightpath::new(id, vec![f31, f14], vec![3, 1, 4], 3, 4, 2, 200.0, &table));
        // node 1 is isolated in the electric layer (no lightpath ends there)
        let subs = replace_isolated_endpoint(&net, Layer::Optical, 1);
        assert_eq!(subs.into_iter().collect::<Vec<_>>(), vec![0, 2, 3, 4]);
        // an isolated node bypassed by nothing
        let subs = replace_isolated_endpoint(&net, Layer::Optical, 5);
        assert!(subs.is_empty());
    }

    #[test]
    fn aux_graph_electric_layer() {
        // a two-hop lightpath chain carrying one active request 0->2
        let mut net = load_topology("nodes 3 slots 10\nlink 0 1 100\nlink 1 2 100\n").unwrap();
        let table = ModulationTable::table_i();
        let f01 = net.fiber_between(0, 1).unwrap();
        let f12 = net.fiber_between(1, 2).unwrap();
        let mut chain = Vec::new();
        for (f, nodes) in [(f01, vec![0, 1]), (f12, vec![1, 2])] {
            let id = net.next_lightpath_id();
            net.install_lightpath(Lightpath::new(id, vec![f], nodes, 1, 4, 2, 100.0, &table));
            chain.push(id);
        }
        let mut r = crate::electric::ServiceRequest::new(RequestId(0), 0, 2, 10.0, 0.0, 1.0, 1.0, 3, 0.5);
        r.route = chain.clone();
        for id in &chain {
            net.lightpaths.get_mut(id).unwrap().groomed.insert(r.id, 10.0);
        }
        net.requests.insert(r.id, r);

        let m = default_aux_m(&net);
        let g = build_aux_graph(&net, Layer::Electric, m);
        // request edge plus spare capacity on the direct lightpaths
        assert_eq!(g.weight(0, 2), Some(m)); // request only, no direct lightpath
        assert_eq!(g.weight(0, 1), Some(1));
        assert_eq!(g.weight(1, 2), Some(1));

        // with the chain fully groomed, the resource bits vanish
        for id in &chain {
            let lp = net.lightpaths.get_mut(id).unwrap();
            let spare = lp.free_capacity();
            lp.groomed.insert(RequestId(99), spare);
        }
        let g = build_aux_graph(&net, Layer::Electric, m);
        assert_eq!(g.weight(0, 1), None);
        assert_eq!(g.weight(0, 2), Some(m));
    }

    #[test]
    fn isolated_endpoint_on_service_layer() {
        // request 0->2 routed through node 1: node 1 is isolated on the
        // service layer and the request's endpoints substitute for it
        let mut net = load_topology("nodes 3 slots 10\nlink 0 1 100\nlink 1 2 100\n").unwrap();
        let table = ModulationTable::table_i();
        let f01 = net.fiber_between(0, 1).unwrap();
        let f12 = net.fiber_between(1, 2).unwrap();
        let mut chain = Vec::new();
        for (f, nodes) in [(f01, vec![0, 1]), (f12, vec![1, 2])] {
            let id = net.next_lightpath_id();
            net.install_lightpath(Lightpath::new(id, vec![f], nodes, 1, 4, 2, 100.0, &table));
            chain.push(id);
        }
        let mut r = crate::electric::ServiceRequest::new(RequestId(0), 0, 2, 10.0, 0.0, 1.0, 1.0, 3, 0.5);
        r.route = chain.clone();
        for id in &chain {
            net.lightpaths.get_mut(id).unwrap().groomed.insert(r.id, 10.0);
        }
        net.requests.insert(r.id, r);
        let subs = replace_isolated_endpoint(&net, Layer::Electric, 1);
        assert_eq!(subs.into_iter().collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn spectrum_consistency_rescan() {
        let mut net = line2();
        let table = ModulationTable::table_i();
        let id = net.next_lightpath_id();
        net.install_lightpath(Lightpath::new(id, vec![0], vec![0, 1], 2, 5, 2, 100.0, &table));
        assert!(net.spectrum_consistent());
        // corrupt a mask
        net.fibers[0].spectrum.set_range(7, 7);
        assert!(!net.spectrum_consistent());
    }
}
