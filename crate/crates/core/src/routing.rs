//! The three candidate routing protocols.
//!
//! Every protocol is expressed as a next-hop rule over the *current*
//! network state, so a packet re-evaluates its route after each step.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CostKind, CostMatrix, NetworkState, NodeId};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProtocolKind {
    /// Greedy store-and-forward: the best-quality neighbour that is closer to
    /// the destination.
    BundleProtocol,
    /// Dijkstra over transmission time.
    DistanceDijkstra,
    /// Dijkstra over `1 - quality`.
    QualityDijkstra,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 3] = [
        ProtocolKind::BundleProtocol,
        ProtocolKind::DistanceDijkstra,
        ProtocolKind::QualityDijkstra,
    ];

    /// Stable identifier used in reports and configuration files.
    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolKind::BundleProtocol => "bundle",
            ProtocolKind::DistanceDijkstra => "distance_dijkstra",
            ProtocolKind::QualityDijkstra => "quality_dijkstra",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.as_str() == s)
    }

    pub fn cost_kind(self) -> Option<CostKind> {
        match self {
            ProtocolKind::BundleProtocol => None,
            ProtocolKind::DistanceDijkstra => Some(CostKind::TransmissionTime),
            ProtocolKind::QualityDijkstra => Some(CostKind::QualityComplement),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An ordered sequence of visited nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Route(Vec<NodeId>);

impl Route {
    pub fn new(nodes: Vec<NodeId>) -> Self {
        Route(nodes)
    }

    pub fn starting_at(src: NodeId) -> Self {
        Route(vec![src])
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.0
    }

    pub fn push(&mut self, node: NodeId) {
        self.0.push(node);
    }

    pub fn first(&self) -> Option<NodeId> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<NodeId> {
        self.0.last().copied()
    }

    pub fn hop_count(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.0.contains(&node)
    }

    /// No node appears twice.
    pub fn is_simple(&self) -> bool {
        let mut seen = self.0.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    pub fn cost(&self, costs: &CostMatrix) -> f64 {
        self.0.windows(2).map(|w| costs.get(w[0], w[1])).sum()
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

/// Single-destination shortest-path tree.
///
/// `next[v]` is the first hop of the chosen shortest path from `v`. Among
/// equal-cost alternatives the lowest next node id wins.
#[derive(Clone, Debug)]
pub struct ShortestPathTree {
    dst: NodeId,
    next: Vec<Option<NodeId>>,
    dist: Vec<f64>,
}

impl ShortestPathTree {
    /// Dijkstra from `dst` outwards over a dense cost table. Costs must be
    /// non-negative; they are read in the `v -> u` direction so asymmetric
    /// tables are handled correctly.
    pub fn toward(costs: &CostMatrix, dst: NodeId) -> Self {
        let n = costs.node_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut next: Vec<Option<NodeId>> = vec![None; n];
        let mut settled = vec![false; n];
        dist[dst.0] = 0.0;

        for _ in 0..n {
            let Some(u) = (0..n)
                .filter(|&i| !settled[i] && dist[i].is_finite())
                .min_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)))
            else {
                break;
            };
            settled[u] = true;
            for v in (0..n).filter(|&v| !settled[v]) {
                let c = costs.get(NodeId(v), NodeId(u));
                if !c.is_finite() {
                    continue;
                }
                let candidate = dist[u] + c;
                let better = candidate < dist[v]
                    || (candidate == dist[v] && next[v].is_some_and(|w| u < w.0));
                if better {
                    dist[v] = candidate;
                    next[v] = Some(NodeId(u));
                }
            }
        }
        ShortestPathTree { dst, next, dist }
    }

    pub fn destination(&self) -> NodeId {
        self.dst
    }

    pub fn next_hop(&self, from: NodeId) -> Option<NodeId> {
        self.next[from.0]
    }

    pub fn cost_from(&self, from: NodeId) -> f64 {
        self.dist[from.0]
    }

    pub fn path_from(&self, src: NodeId) -> Option<Route> {
        let mut route = Route::starting_at(src);
        let mut cur = src;
        while cur != self.dst {
            cur = self.next[cur.0]?;
            if route.contains(cur) {
                return None;
            }
            route.push(cur);
        }
        Some(route)
    }
}

/// Minimum-cost path from `src` to `dst` over an arbitrary cost table.
pub fn shortest_path(costs: &CostMatrix, src: NodeId, dst: NodeId) -> Result<Route> {
    if src == dst {
        return Err(Error::Usage(format!(
            "source and destination are both node {src}"
        )));
    }
    let n = costs.node_count();
    if src.0 >= n || dst.0 >= n {
        return Err(Error::Usage(format!("node id out of range for {n} nodes")));
    }
    ShortestPathTree::toward(costs, dst)
        .path_from(src)
        .ok_or_else(|| Error::Usage(format!("no path from {src} to {dst}")))
}

/// Minimum-cost path through the network under the given edge-cost view.
pub fn dijkstra_path(
    network: &NetworkState,
    kind: CostKind,
    src: NodeId,
    dst: NodeId,
) -> Result<Route> {
    shortest_path(&network.cost_matrix(kind), src, dst)
}

/// Outcome of one routing decision.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct HopDecision {
    pub next: NodeId,
    /// The bundle rule found no admissible neighbour and fell back to the
    /// destination.
    pub degenerate: bool,
}

/// Greedy bundle rule over `(candidate, distance_to_dst, link_quality)`
/// triples: keep candidates strictly closer to the destination than
/// `current_distance`, then take the best quality, lowest id on ties.
pub fn select_bundle_candidate<I>(current_distance: f64, candidates: I) -> Option<NodeId>
where
    I: IntoIterator<Item = (NodeId, f64, f64)>,
{
    candidates
        .into_iter()
        .filter(|&(_, d, _)| d < current_distance)
        .fold(None, |best: Option<(NodeId, f64)>, (id, _, q)| match best {
            Some((bid, bq)) if bq > q || (bq == q && bid < id) => Some((bid, bq)),
            _ => Some((id, q)),
        })
        .map(|(id, _)| id)
}

/// Bundle protocol next hop.
///
/// Nodes in `visited` are never revisited. The direct probe–ground hop is
/// not admissible.
pub fn bundle_hop(
    network: &NetworkState,
    current: NodeId,
    dst: NodeId,
    visited: &[NodeId],
) -> HopDecision {
    let here = network.distance(current, dst);
    let candidates = network
        .node_ids()
        .filter(|&v| v != current && !visited.contains(&v) && !network.is_direct(current, v))
        .map(|v| (v, network.distance(v, dst), network.quality(current, v)));
    match select_bundle_candidate(here, candidates) {
        Some(next) => HopDecision {
            next,
            degenerate: false,
        },
        None => {
            log::warn!(
                "no admissible bundle hop from node {current} toward {dst}; forwarding directly"
            );
            HopDecision {
                next: dst,
                degenerate: true,
            }
        }
    }
}

/// Route one hop for `protocol`, with a precomputed shortest-path tree for
/// Dijkstra protocols.
pub(crate) fn decide_with_tree(
    network: &NetworkState,
    protocol: ProtocolKind,
    tree: Option<&ShortestPathTree>,
    current: NodeId,
    dst: NodeId,
    visited: &[NodeId],
) -> HopDecision {
    match (protocol, tree) {
        (ProtocolKind::BundleProtocol, _) => bundle_hop(network, current, dst, visited),
        (_, Some(tree)) => HopDecision {
            next: tree.next_hop(current).unwrap_or(dst),
            degenerate: false,
        },
        (_, None) => {
            let kind = protocol
                .cost_kind()
                .expect("dijkstra protocol has a cost kind");
            let tree = ShortestPathTree::toward(&network.cost_matrix(kind), dst);
            decide_with_tree(network, protocol, Some(&tree), current, dst, visited)
        }
    }
}

/// Full routing decision for one copy, including whether the bundle rule
/// degenerated.
pub fn decide_hop(
    network: &NetworkState,
    protocol: ProtocolKind,
    current: NodeId,
    dst: NodeId,
    visited: &[NodeId],
) -> HopDecision {
    decide_with_tree(network, protocol, None, current, dst, visited)
}

/// Next node for a copy at `current` heading to `dst`.
///
/// Dijkstra protocols return the second node of the freshly computed
/// shortest path; `visited` only affects the bundle protocol.
pub fn next_hop(
    network: &NetworkState,
    protocol: ProtocolKind,
    current: NodeId,
    dst: NodeId,
    visited: &[NodeId],
) -> NodeId {
    decide_hop(network, protocol, current, dst, visited).next
}

/// Modal route, ties going to whichever appeared first.
pub fn most_frequent_path(routes: &[Route]) -> Result<Route> {
    let mut counts: HashMap<&Route, (usize, usize)> = HashMap::new();
    for (i, r) in routes.iter().enumerate() {
        counts.entry(r).or_insert((0, i)).0 += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))
        .map(|(r, _)| r.clone())
        .ok_or_else(|| Error::Usage("most frequent path of an empty route list".into()))
}

/// Occurrence count of each distinct route, most frequent first.
pub fn path_frequencies(routes: &[Route]) -> Vec<(Route, usize)> {
    let mut counts: HashMap<&Route, (usize, usize)> = HashMap::new();
    for (i, r) in routes.iter().enumerate() {
        counts.entry(r).or_insert((0, i)).0 += 1;
    }
    let mut out: Vec<_> = counts.into_iter().collect();
    out.sort_by(|a, b| b.1 .0.cmp(&a.1 .0).then(a.1 .1.cmp(&b.1 .1)));
    out.into_iter().map(|(r, (c, _))| (r.clone(), c)).collect()
}
