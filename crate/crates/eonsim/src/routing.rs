//! Degraded-route computation in either layer under the two policies,
//! MinRH (fewest route hops first) and MinPDR (fewest potentially degraded
//! requests first), plus the RH/PDR route metrics.
//!
//! All links of a layer are admissible regardless of current free capacity:
//! whether the requests riding them can actually be degraded is decided by
//! the allocation stage.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use crate::net::{
    build_aux_graph, default_aux_m, replace_isolated_endpoint, AuxGraph, Layer, LayerLink,
    LightpathId, MultiLayerNet, NodeId,
};

/// Routing objective order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoutePolicy {
    /// Minimize route hops, then potential degraded requests.
    MinRh,
    /// Minimize potential degraded requests, then route hops.
    MinPdr,
}

/// A computed degraded route with its two evaluation metrics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegradedRoute {
    pub layer: Layer,
    /// Underlying link identifiers (lightpath ids or fiber ids), in order.
    pub links: Vec<u64>,
    /// Visited nodes from source to destination.
    pub nodes: Vec<NodeId>,
    /// Route hops.
    pub rh: usize,
    /// Distinct existing requests sharing any link of the route.
    pub pdr: usize,
}

/// Route hops: the number of links.
pub fn count_rh(links: &[LayerLink]) -> usize {
    links.len()
}

/// Potential degraded requests: distinct carried entities over all links.
/// A request crossing several links counts once. Panics when one link
/// lists the same carried request twice.
pub fn count_pdr(links: &[LayerLink]) -> usize {
    let mut union = BTreeSet::new();
    for link in links {
        let mut seen = BTreeSet::new();
        for &id in &link.carried {
            assert!(seen.insert(id), "link {}->{} carries request {id} twice", link.from, link.to);
            union.insert(id);
        }
    }
    union.len()
}

/// Resolves a route's links back to their layer-link views.
pub fn route_links(net: &MultiLayerNet, route: &DegradedRoute) -> Vec<LayerLink> {
    let all = net.layer_links(route.layer);
    route
        .links
        .iter()
        .map(|uid| all.iter().find(|l| l.uid == *uid).expect("route link vanished").clone())
        .collect()
}

// ---------------------------------------------------------------------------
// Search graph
// ---------------------------------------------------------------------------

/// Fixed-width bit set over the carried entities of one layer snapshot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Bits(Vec<u64>);

impl Bits {
    fn zero(words: usize) -> Self {
        Bits(vec![0; words])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn union(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }

    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

struct SearchLink {
    uid: u64,
    from: NodeId,
    to: NodeId,
    bits: Bits,
}

/// Immutable per-call snapshot of one layer as a multigraph.
struct SearchGraph {
    nodes: usize,
    links: Vec<SearchLink>,
    /// Outgoing link indices per node, ordered by (to, uid).
    out: Vec<Vec<usize>>,
    /// Incoming link indices per node (for backward scans).
    rin: Vec<Vec<usize>>,
    words: usize,
}

impl SearchGraph {
    fn build(net: &MultiLayerNet, layer: Layer) -> Self {
        let layer_links = net.layer_links(layer);
        let ids: Vec<u64> = layer_links
            .iter()
            .flat_map(|l| l.carried.iter().copied())
            .collect::<BTreeSet<u64>>()
            .into_iter()
            .collect();
        let words = ids.len().div_ceil(64).max(1);
        let mut g = SearchGraph {
            nodes: net.node_count,
            links: Vec::with_capacity(layer_links.len()),
            out: vec![Vec::new(); net.node_count],
            rin: vec![Vec::new(); net.node_count],
            words,
        };
        for l in &layer_links {
            let mut bits = Bits::zero(words);
            for id in &l.carried {
                bits.set(ids.binary_search(id).unwrap());
            }
            let idx = g.links.len();
            g.links.push(SearchLink { uid: l.uid, from: l.from, to: l.to, bits });
            g.out[l.from].push(idx);
            g.rin[l.to].push(idx);
        }
        g
    }
}

// ---------------------------------------------------------------------------
// Union-aware label search
// ---------------------------------------------------------------------------

/// Labels stored per node stop growing past this bound; the bound is never
/// reached on oracle-sized instances and keeps heavy simulation states
/// polynomial.
const LABEL_CAP: usize = 64;

struct Label {
    node: NodeId,
    hops: u32,
    bits: Bits,
    parent: usize,
    via: usize,
}

const NO_PARENT: usize = usize::MAX;

/// Heap key: policy-ordered metric pair, node, bit set, arena index.
type SearchKey = ((u32, u32), NodeId, Bits, usize);

fn reconstruct(arena: &[Label], mut idx: usize) -> (Vec<NodeId>, Vec<usize>) {
    let mut nodes = vec![arena[idx].node];
    let mut links = Vec::new();
    while arena[idx].parent != NO_PARENT {
        links.push(arena[idx].via);
        idx = arena[idx].parent;
        nodes.push(arena[idx].node);
    }
    nodes.reverse();
    links.reverse();
    (nodes, links)
}

/// Best-first search minimizing `(pdr, hops)` or `(hops, pdr)` depending on
/// `pdr_primary`, with subset-dominance pruning. Labels with identical
/// `(bits, hops)` at a node are merged, keeping the lexicographically
/// smallest prefix, so optimal-value labels stay within the cap and the
/// returned optimum carries the lexicographically smallest node sequence.
/// Returns every optimal terminal label as `(nodes, link indices)`.
fn label_search(
    g: &SearchGraph,
    s: NodeId,
    d: NodeId,
    pdr_primary: bool,
) -> Vec<(Vec<NodeId>, Vec<usize>)> {
    let key_of = |count: u32, hops: u32| if pdr_primary { (count, hops) } else { (hops, count) };

    let mut arena: Vec<Label> = Vec::new();
    let mut at_node: Vec<Vec<usize>> = vec![Vec::new(); g.nodes];
    let mut heap: BinaryHeap<Reverse<SearchKey>> = BinaryHeap::new();

    arena.push(Label { node: s, hops: 0, bits: Bits::zero(g.words), parent: NO_PARENT, via: 0 });
    at_node[s].push(0);
    heap.push(Reverse((key_of(0, 0), s, arena[0].bits.clone(), 0)));

    let mut best: Option<(u32, u32)> = None;
    let mut finals: Vec<usize> = Vec::new();

    while let Some(Reverse((key, _, _, idx))) = heap.pop() {
        if let Some(b) = best {
            if key > b {
                break; // keys are monotone along expansions
            }
        }
        let (node, hops) = (arena[idx].node, arena[idx].hops);
        let bits = arena[idx].bits.clone();
        // skip labels strictly dominated by a sibling at the same node
        let dominated = at_node[node].iter().any(|&j| {
            j != idx
                && arena[j].hops <= hops
                && arena[j].bits.is_subset(&bits)
                && (arena[j].hops, &arena[j].bits) != (hops, &bits)
        });
        if dominated {
            continue;
        }
        if node == d {
            best = Some(key);
            finals.push(idx);
            continue;
        }
        for &li in &g.out[node] {
            let link = &g.links[li];
            let nbits = bits.union(&link.bits);
            let nhops = hops + 1;
            let target = link.to;
            // merge with an equal-cost twin: equal (bits, hops) labels have
            // identical continuations, so only the smaller prefix survives
            if let Some(&twin) = at_node[target]
                .iter()
                .find(|&&j| arena[j].hops == nhops && arena[j].bits == nbits)
            {
                let (old_nodes, _) = reconstruct(&arena, twin);
                let mut new_nodes = reconstruct(&arena, idx).0;
                new_nodes.push(target);
                if new_nodes < old_nodes {
                    arena[twin].parent = idx;
                    arena[twin].via = li;
                }
                continue;
            }
            let dominated = at_node[target].iter().any(|&j| {
                arena[j].hops <= nhops && arena[j].bits.is_subset(&nbits)
            });
            if dominated || at_node[target].len() >= LABEL_CAP {
                continue;
            }
            let nidx = arena.len();
            arena.push(Label { node: target, hops: nhops, bits: nbits, parent: idx, via: li });
            at_node[target].push(nidx);
            heap.push(Reverse((key_of(arena[nidx].bits.count(), nhops), target, arena[nidx].bits.clone(), nidx)));
        }
    }

    finals.into_iter().map(|idx| reconstruct(&arena, idx)).collect()
}

/// Removes cycles from a walk, keeping the portion outside each cycle.
fn cancel_loops(nodes: &mut Vec<NodeId>, links: &mut Vec<usize>) {
    'outer: loop {
        for i in 0..nodes.len() {
            if let Some(j) = (i + 1..nodes.len()).rev().find(|&j| nodes[j] == nodes[i]) {
                nodes.drain(i + 1..=j);
                links.drain(i..j);
                continue 'outer;
            }
        }
        break;
    }
}

fn route_of(g: &SearchGraph, layer: Layer, nodes: Vec<NodeId>, links: Vec<usize>) -> DegradedRoute {
    let mut bits = Bits::zero(g.words);
    for &li in &links {
        bits = bits.union(&g.links[li].bits);
    }
    DegradedRoute {
        layer,
        rh: links.len(),
        pdr: bits.count() as usize,
        links: links.into_iter().map(|li| g.links[li].uid).collect(),
        nodes,
    }
}

/// Orders candidate routes: metric pair, then lexicographic node sequence,
/// then link identifiers.
fn candidate_key(primary_pdr: bool, r: &DegradedRoute) -> (usize, usize, Vec<NodeId>, Vec<u64>) {
    let (a, b) = if primary_pdr { (r.pdr, r.rh) } else { (r.rh, r.pdr) };
    (a, b, r.nodes.clone(), r.links.clone())
}

// ---------------------------------------------------------------------------
// Fewest-hop segments (expansion step and MinRH baseline)
// ---------------------------------------------------------------------------

/// Lexicographically smallest fewest-hop path from `a` to `b`, as
/// `(nodes, link indices)`. `admit` filters usable links.
fn fewest_hop_segment(
    g: &SearchGraph,
    a: NodeId,
    b: NodeId,
    admit: &dyn Fn(usize) -> bool,
) -> Option<(Vec<NodeId>, Vec<usize>)> {
    // backward BFS from b gives the remaining-hop distance
    let mut dist = vec![u32::MAX; g.nodes];
    dist[b] = 0;
    let mut frontier = vec![b];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &n in &frontier {
            for &li in &g.rin[n] {
                if !admit(li) {
                    continue;
                }
                let from = g.links[li].from;
                if dist[from] == u32::MAX {
                    dist[from] = dist[n] + 1;
                    next.push(from);
                }
            }
        }
        frontier = next;
    }
    if dist[a] == u32::MAX {
        return None;
    }
    // forward greedy walk: smallest next node, then smallest link id
    let mut nodes = vec![a];
    let mut links = Vec::new();
    let mut cur = a;
    while cur != b {
        let step = g.out[cur]
            .iter()
            .copied()
            .filter(|&li| admit(li) && dist[g.links[li].to] != u32::MAX && dist[g.links[li].to] + 1 == dist[cur])
            .min_by_key(|&li| (g.links[li].to, g.links[li].uid))?;
        cur = g.links[step].to;
        nodes.push(cur);
        links.push(step);
    }
    Some((nodes, links))
}

// ---------------------------------------------------------------------------
// Algorithm-style auxiliary-graph route (MinPDR fast path)
// ---------------------------------------------------------------------------

/// Shortest path on the auxiliary graph by total weight, reconstructed as
/// the lexicographically smallest optimal node sequence.
fn aux_shortest_path(aux: &AuxGraph, s: NodeId, d: NodeId) -> Option<Vec<NodeId>> {
    let mut radj: Vec<Vec<(NodeId, u64)>> = vec![Vec::new(); aux.nodes];
    let mut fadj: Vec<Vec<(NodeId, u64)>> = vec![Vec::new(); aux.nodes];
    for (i, j, w) in aux.edges() {
        radj[j].push((i, w));
        fadj[i].push((j, w));
    }
    // backward Dijkstra: cost to reach d
    let mut dist = vec![u64::MAX; aux.nodes];
    dist[d] = 0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u64, d)));
    while let Some(Reverse((c, n))) = heap.pop() {
        if c > dist[n] {
            continue;
        }
        for &(p, w) in &radj[n] {
            if c + w < dist[p] {
                dist[p] = c + w;
                heap.push(Reverse((dist[p], p)));
            }
        }
    }
    if dist[s] == u64::MAX {
        return None;
    }
    let mut path = vec![s];
    let mut cur = s;
    while cur != d {
        let (next, _) = fadj[cur]
            .iter()
            .copied()
            .filter(|&(n, w)| dist[n] != u64::MAX && dist[n] + w == dist[cur])
            .min_by_key(|&(n, _)| n)?;
        path.push(next);
        cur = next;
    }
    Some(path)
}

fn is_aux_isolated(aux: &AuxGraph, node: NodeId) -> bool {
    aux.edges().all(|(i, j, _)| i != node && j != node)
}

/// The auxiliary-graph procedure: substitute isolated endpoints, run a
/// weighted shortest path on the upper layer, expand every upper edge into
/// its fewest-hop lower segment (counting through the isolated node when
/// substituted), concatenate and cancel loops.
fn aux_route(net: &MultiLayerNet, g: &SearchGraph, layer: Layer, s: NodeId, d: NodeId) -> Option<DegradedRoute> {
    let aux = build_aux_graph(net, layer, default_aux_m(net));
    let s_subs: Vec<NodeId> = if is_aux_isolated(&aux, s) {
        replace_isolated_endpoint(net, layer, s)
            .into_iter()
            .filter(|&n| n != d)
            .collect()
    } else {
        vec![s]
    };
    let d_subs: Vec<NodeId> = if is_aux_isolated(&aux, d) {
        replace_isolated_endpoint(net, layer, d)
            .into_iter()
            .filter(|&n| n != s)
            .collect()
    } else {
        vec![d]
    };

    let admit_all = |_: usize| true;
    let mut best: Option<DegradedRoute> = None;
    for &se in &s_subs {
        for &de in &d_subs {
            if se == de {
                continue;
            }
            let Some(aux_path) = aux_shortest_path(&aux, se, de) else {
                continue;
            };
            // expand on the lower layer, mapping substituted endpoints back
            let mut eff = aux_path.clone();
            *eff.first_mut().unwrap() = s;
            *eff.last_mut().unwrap() = d;
            let mut nodes: Vec<NodeId> = vec![s];
            let mut links: Vec<usize> = Vec::new();
            let mut ok = true;
            for w in eff.windows(2) {
                match fewest_hop_segment(g, w[0], w[1], &admit_all) {
                    Some((seg_nodes, seg_links)) => {
                        nodes.extend_from_slice(&seg_nodes[1..]);
                        links.extend_from_slice(&seg_links);
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            cancel_loops(&mut nodes, &mut links);
            let cand = route_of(g, layer, nodes, links);
            if best.as_ref().is_none_or(|b| candidate_key(true, &cand) < candidate_key(true, b)) {
                best = Some(cand);
            }
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Public route computations
// ---------------------------------------------------------------------------

fn check_endpoints(net: &MultiLayerNet, s: NodeId, d: NodeId) {
    assert!(s < net.node_count && d < net.node_count, "unknown node");
    assert!(s != d, "source equals destination");
}

/// Fewest-hop degraded route; ties broken by smaller PDR, then the
/// lexicographically smallest node sequence. `needed` is advisory: routes
/// are not filtered by free capacity because degradation can create it.
pub fn min_rh_route(
    net: &MultiLayerNet,
    layer: Layer,
    s: NodeId,
    d: NodeId,
    needed: f64,
) -> Option<DegradedRoute> {
    check_endpoints(net, s, d);
    let _ = needed;
    let g = SearchGraph::build(net, layer);
    label_search(&g, s, d, false)
        .into_iter()
        .map(|(nodes, links)| route_of(&g, layer, nodes, links))
        .min_by_key(|r| candidate_key(false, r))
}

/// Minimum-PDR degraded route; ties broken by smaller RH, then the
/// lexicographically smallest node sequence. `needed` is advisory (see
/// [`min_rh_route`]).
pub fn min_pdr_route(
    net: &MultiLayerNet,
    layer: Layer,
    s: NodeId,
    d: NodeId,
    needed: f64,
) -> Option<DegradedRoute> {
    check_endpoints(net, s, d);
    let _ = needed;
    let g = SearchGraph::build(net, layer);
    let mut candidates: Vec<DegradedRoute> = label_search(&g, s, d, true)
        .into_iter()
        .map(|(nodes, links)| route_of(&g, layer, nodes, links))
        .collect();
    if let Some(r) = aux_route(net, &g, layer, s, d) {
        candidates.push(r);
    }
    // the fewest-hop route keeps the PDR ordering invariant against MinRH
    // even in states where the label cap bites
    candidates.extend(
        label_search(&g, s, d, false)
            .into_iter()
            .map(|(nodes, links)| route_of(&g, layer, nodes, links)),
    );
    candidates.into_iter().min_by_key(|r| candidate_key(true, r))
}

/// Fewest-hop chain of lightpaths from `s` to `d` with at least `bw` Gbps
/// spare on every link: the grooming route. Deterministic tie-breaking as
/// in [`min_rh_route`].
pub fn groomable_chain(net: &MultiLayerNet, s: NodeId, d: NodeId, bw: f64) -> Option<Vec<LightpathId>> {
    if s == d {
        return None;
    }
    let g = SearchGraph::build(net, Layer::Electric);
    let free: Vec<f64> = {
        let links = net.layer_links(Layer::Electric);
        links.iter().map(|l| l.free_capacity).collect()
    };
    let admit = move |li: usize| free[li] >= bw;
    let (_, links) = fewest_hop_segment(&g, s, d, &admit)?;
    Some(links.into_iter().map(|li| LightpathId(g.links[li].uid)).collect())
}
