//! Relay network model: node placement, link state, edge costs and the
//! per-step stochastic perturbation applied during a packet's flight.
//!
//! The network is a complete graph. Link quality and distance are stored once
//! per unordered node pair, so both traversal directions always agree.

use std::fmt;

use rand::Rng;
use rand_distr::{Beta, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, km/s.
pub const SPEED_OF_LIGHT_KM_S: f64 = 299_792.458;

/// Maximum Earth–Titan separation, km.
pub const DEFAULT_END_TO_END_KM: f64 = 1.27e9;

/// Closest any two coordinates are allowed to be, km (roughly low Earth orbit).
pub const DEFAULT_MIN_COORD_KM: f64 = 1.0e4;

pub const DEFAULT_RELAY_COUNT: usize = 10;
pub const DEFAULT_BETA_A: f64 = 3.0;
pub const DEFAULT_BETA_B: f64 = 2.0;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Probe,
    Relay,
    Ground,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Probe => "probe",
            NodeKind::Relay => "relay",
            NodeKind::Ground => "ground",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x_km: f64,
    pub y_km: f64,
}

impl Position {
    pub const fn new(x_km: f64, y_km: f64) -> Self {
        Position { x_km, y_km }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub position: Position,
}

/// The two graph views a Dijkstra router can search.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CostKind {
    /// Hop distance divided by the speed of light, in seconds.
    TransmissionTime,
    /// `1 - quality` of the hop.
    QualityComplement,
}

impl CostKind {
    pub const ALL: [CostKind; 2] = [CostKind::TransmissionTime, CostKind::QualityComplement];
}

/// Geometry and link-quality parameters for a randomly generated network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub relay_count: usize,
    /// Probe–Ground separation, km.
    pub end_to_end_km: f64,
    /// Coordinate and distance floor, km.
    pub min_coord_km: f64,
    pub beta_a: f64,
    pub beta_b: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            relay_count: DEFAULT_RELAY_COUNT,
            end_to_end_km: DEFAULT_END_TO_END_KM,
            min_coord_km: DEFAULT_MIN_COORD_KM,
            beta_a: DEFAULT_BETA_A,
            beta_b: DEFAULT_BETA_B,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.relay_count == 0 {
            return Err(Error::config(
                "relay_count",
                "at least one relay is required for a relay path to exist",
            ));
        }
        if !(self.min_coord_km.is_finite() && self.min_coord_km > 0.0) {
            return Err(Error::config("min_coord_km", "must be finite and positive"));
        }
        if !self.end_to_end_km.is_finite() || self.end_to_end_km <= 2.0 * self.min_coord_km {
            return Err(Error::config(
                "end_to_end_km",
                "must be finite and greater than twice min_coord_km",
            ));
        }
        check_shape("beta_a", self.beta_a)?;
        check_shape("beta_b", self.beta_b)?;
        Ok(())
    }

    /// Total number of nodes including the probe and ground station.
    pub fn node_count(&self) -> usize {
        self.relay_count + 2
    }
}

fn check_shape(key: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::config(
            key,
            format!("beta shape must be positive, got {value}"),
        ))
    }
}

/// Place the probe, ground station and relays.
///
/// Node ids are assigned as: probe `0`, relays `1..=relay_count`, ground
/// `relay_count + 1`. The ground station sits at the origin and the probe at
/// `(end_to_end_km, 0)`. Relay x is uniform over
/// `[min_coord_km, end_to_end_km - min_coord_km]` and relay y is uniform over
/// `[-end_to_end_km / 2, end_to_end_km / 2]`.
pub fn place_nodes<R: Rng + ?Sized>(config: &NetworkConfig, rng: &mut R) -> Result<Vec<Node>> {
    config.validate()?;
    let l = config.end_to_end_km;
    let mut nodes = Vec::with_capacity(config.node_count());
    nodes.push(Node {
        id: NodeId(0),
        kind: NodeKind::Probe,
        position: Position::new(l, 0.0),
    });
    for i in 1..=config.relay_count {
        let x = rng.random_range(config.min_coord_km..=l - config.min_coord_km);
        let y = rng.random_range(-l / 2.0..=l / 2.0);
        nodes.push(Node {
            id: NodeId(i),
            kind: NodeKind::Relay,
            position: Position::new(x, y),
        });
    }
    nodes.push(Node {
        id: NodeId(config.relay_count + 1),
        kind: NodeKind::Ground,
        position: Position::new(0.0, 0.0),
    });
    Ok(nodes)
}

pub fn euclidean_distance(a: Position, b: Position) -> f64 {
    (b.x_km - a.x_km).hypot(b.y_km - a.y_km)
}

/// Beta-distributed link quality generator.
#[derive(Clone, Debug)]
pub struct QualitySampler {
    beta: Beta<f64>,
}

impl QualitySampler {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        check_shape("beta_a", a)?;
        check_shape("beta_b", b)?;
        let beta = Beta::new(a, b).map_err(|e| Error::config("beta", e.to_string()))?;
        Ok(QualitySampler { beta })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.beta.sample(rng).clamp(0.0, 1.0)
    }
}

/// Draw a single link quality from `Beta(a, b)`.
pub fn sample_quality<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> Result<f64> {
    Ok(QualitySampler::new(a, b)?.sample(rng))
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkState {
    /// Lower-numbered endpoint.
    pub a: NodeId,
    /// Higher-numbered endpoint.
    pub b: NodeId,
    pub default_quality: f64,
    pub current_quality: f64,
    pub default_distance_km: f64,
    pub current_distance_km: f64,
}

impl LinkState {
    pub fn connects(&self, x: NodeId, y: NodeId) -> bool {
        (self.a == x && self.b == y) || (self.a == y && self.b == x)
    }
}

/// Dense `n x n` edge-cost table for one [`CostKind`], direct-link penalty
/// already applied. The diagonal is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct CostMatrix {
    n: usize,
    costs: Vec<f64>,
}

impl CostMatrix {
    /// Build from a row-major `n x n` table.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Usage("cost matrix must be square".into()));
        }
        Ok(CostMatrix {
            n,
            costs: rows.concat(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, from: NodeId, to: NodeId) -> f64 {
        self.costs[from.0 * self.n + to.0]
    }
}

/// The complete relay graph with its default and current link state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkState {
    nodes: Vec<Node>,
    current_positions: Vec<Position>,
    links: Vec<LinkState>,
    min_coord_km: f64,
    probe: NodeId,
    ground: NodeId,
}

impl NetworkState {
    /// Link every pair of nodes, assigning Euclidean distances and beta
    /// qualities. Distances below `min_coord_km` are raised to it.
    pub fn build<R: Rng + ?Sized>(
        nodes: Vec<Node>,
        config: &NetworkConfig,
        rng: &mut R,
    ) -> Result<Self> {
        let sampler = QualitySampler::new(config.beta_a, config.beta_b)?;
        let probe = find_kind(&nodes, NodeKind::Probe)?;
        let ground = find_kind(&nodes, NodeKind::Ground)?;
        for (i, node) in nodes.iter().enumerate() {
            if node.id.0 != i {
                return Err(Error::Usage(format!(
                    "node at position {i} has id {}; ids must be dense and ordered",
                    node.id
                )));
            }
        }

        let n = nodes.len();
        let mut links = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                let d = euclidean_distance(nodes[i].position, nodes[j].position)
                    .max(config.min_coord_km);
                let q = sampler.sample(rng);
                links.push(LinkState {
                    a: NodeId(i),
                    b: NodeId(j),
                    default_quality: q,
                    current_quality: q,
                    default_distance_km: d,
                    current_distance_km: d,
                });
            }
        }
        let current_positions = nodes.iter().map(|n| n.position).collect();
        Ok(NetworkState {
            nodes,
            current_positions,
            links,
            min_coord_km: config.min_coord_km,
            probe,
            ground,
        })
    }

    /// Place nodes and build the network in one go.
    pub fn generate<R: Rng + ?Sized>(config: &NetworkConfig, rng: &mut R) -> Result<Self> {
        let nodes = place_nodes(config, rng)?;
        Self::build(nodes, config, rng)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn links(&self) -> &[LinkState] {
        &self.links
    }

    pub fn probe(&self) -> NodeId {
        self.probe
    }

    pub fn ground(&self) -> NodeId {
        self.ground
    }

    pub fn min_coord_km(&self) -> f64 {
        self.min_coord_km
    }

    pub fn current_position(&self, id: NodeId) -> Position {
        self.current_positions[id.0]
    }

    /// True for the probe–ground link in either direction.
    pub fn is_direct(&self, x: NodeId, y: NodeId) -> bool {
        (x == self.probe && y == self.ground) || (x == self.ground && y == self.probe)
    }

    pub fn direct_link(&self) -> &LinkState {
        self.link(self.probe, self.ground)
    }

    fn pair_index(&self, x: NodeId, y: NodeId) -> usize {
        let n = self.nodes.len();
        let (i, j) = if x.0 < y.0 { (x.0, y.0) } else { (y.0, x.0) };
        assert!(i != j && j < n, "no link between {x} and {y}");
        i * n - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn link(&self, x: NodeId, y: NodeId) -> &LinkState {
        &self.links[self.pair_index(x, y)]
    }

    /// Current hop distance; zero from a node to itself.
    pub fn distance(&self, x: NodeId, y: NodeId) -> f64 {
        if x == y {
            0.0
        } else {
            self.link(x, y).current_distance_km
        }
    }

    pub fn quality(&self, x: NodeId, y: NodeId) -> f64 {
        self.link(x, y).current_quality
    }

    fn raw_cost(link: &LinkState, kind: CostKind) -> f64 {
        match kind {
            CostKind::TransmissionTime => link.current_distance_km / SPEED_OF_LIGHT_KM_S,
            CostKind::QualityComplement => 1.0 - link.current_quality,
        }
    }

    fn direct_penalty(&self, kind: CostKind) -> f64 {
        let direct = self.pair_index(self.probe, self.ground);
        let others: f64 = self
            .links
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != direct)
            .map(|(_, l)| Self::raw_cost(l, kind))
            .sum();
        others + 1.0
    }

    /// Edge cost of the hop `x -> y` under `kind`.
    ///
    /// The probe–ground link is priced at the sum of every other link's cost
    /// plus one, so it can never beat a path through the relays.
    pub fn edge_cost(&self, x: NodeId, y: NodeId, kind: CostKind) -> f64 {
        if self.is_direct(x, y) {
            self.direct_penalty(kind)
        } else {
            Self::raw_cost(self.link(x, y), kind)
        }
    }

    pub fn cost_matrix(&self, kind: CostKind) -> CostMatrix {
        let n = self.nodes.len();
        let mut costs = vec![0.0; n * n];
        for l in &self.links {
            let c = if self.is_direct(l.a, l.b) {
                self.direct_penalty(kind)
            } else {
                Self::raw_cost(l, kind)
            };
            costs[l.a.0 * n + l.b.0] = c;
            costs[l.b.0 * n + l.a.0] = c;
        }
        CostMatrix { n, costs }
    }

    /// Redraw the current link state around the defaults.
    ///
    /// Each quality is drawn from `Normal(q0, sigma_frac * q0)` and clamped to
    /// `[0, 1]`. Each relay coordinate is drawn from
    /// `Normal(c0, sigma_frac * |c0|)`; probe and ground stay fixed. Link
    /// distances are then recomputed from the jittered positions and floored
    /// at `min_coord_km`. Every draw is centred on the default, never on the
    /// previous step.
    pub fn perturb<R: Rng + ?Sized>(&mut self, rng: &mut R, sigma_frac: f64) -> Result<()> {
        if !(sigma_frac.is_finite() && sigma_frac >= 0.0) {
            return Err(Error::config(
                "sigma_frac",
                format!("must be finite and non-negative, got {sigma_frac}"),
            ));
        }
        if sigma_frac == 0.0 {
            self.reset();
            return Ok(());
        }

        for link in &mut self.links {
            link.current_quality = jitter(rng, link.default_quality, sigma_frac).clamp(0.0, 1.0);
        }
        for (node, current) in self.nodes.iter().zip(self.current_positions.iter_mut()) {
            if node.kind == NodeKind::Relay {
                current.x_km = jitter(rng, node.position.x_km, sigma_frac);
                current.y_km = jitter(rng, node.position.y_km, sigma_frac);
            }
        }
        for link in &mut self.links {
            link.current_distance_km = euclidean_distance(
                self.current_positions[link.a.0],
                self.current_positions[link.b.0],
            )
            .max(self.min_coord_km);
        }
        Ok(())
    }

    /// Restore every link and position to its default.
    pub fn reset(&mut self) {
        for link in &mut self.links {
            link.current_quality = link.default_quality;
            link.current_distance_km = link.default_distance_km;
        }
        for (node, current) in self.nodes.iter().zip(self.current_positions.iter_mut()) {
            *current = node.position;
        }
    }

    pub fn is_at_default(&self) -> bool {
        self.links.iter().all(|l| {
            l.current_quality == l.default_quality && l.current_distance_km == l.default_distance_km
        }) && self
            .nodes
            .iter()
            .zip(&self.current_positions)
            .all(|(n, p)| n.position == *p)
    }
}

fn jitter<R: Rng + ?Sized>(rng: &mut R, mean: f64, sigma_frac: f64) -> f64 {
    let sd = sigma_frac * mean.abs();
    if sd == 0.0 {
        return mean;
    }
    // sd is finite and positive here, so construction cannot fail.
    Normal::new(mean, sd).map(|d| d.sample(rng)).unwrap_or(mean)
}

fn find_kind(nodes: &[Node], kind: NodeKind) -> Result<NodeId> {
    let mut found = nodes.iter().filter(|n| n.kind == kind);
    match (found.next(), found.next()) {
        (Some(n), None) => Ok(n.id),
        _ => Err(Error::Usage(format!(
            "network needs exactly one {} node",
            kind.as_str()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn default_network(seed: u64) -> NetworkState {
        NetworkState::generate(&NetworkConfig::default(), &mut rng(seed)).unwrap()
    }

    #[test]
    fn default_placement_separates_endpoints_exactly() {
        let nodes = place_nodes(&NetworkConfig::default(), &mut rng(1)).unwrap();
        assert_eq!(nodes.len(), 12);
        let probe = nodes.iter().find(|n| n.kind == NodeKind::Probe).unwrap();
        let ground = nodes.iter().find(|n| n.kind == NodeKind::Ground).unwrap();
        assert_eq!(euclidean_distance(probe.position, ground.position), 1.27e9);
        assert_eq!(ground.position, Position::new(0.0, 0.0));
    }

    #[test]
    fn relays_stay_inside_placement_rectangle() {
        let cfg = NetworkConfig::default();
        for seed in 0..50 {
            for n in place_nodes(&cfg, &mut rng(seed)).unwrap() {
                if n.kind == NodeKind::Relay {
                    assert!(n.position.x_km >= cfg.min_coord_km);
                    assert!(n.position.x_km <= cfg.end_to_end_km - cfg.min_coord_km);
                    assert!(n.position.y_km.abs() <= cfg.end_to_end_km / 2.0);
                }
            }
        }
    }

    #[test]
    fn zero_relays_is_a_config_error() {
        let cfg = NetworkConfig {
            relay_count: 0,
            ..NetworkConfig::default()
        };
        assert!(matches!(
            place_nodes(&cfg, &mut rng(0)),
            Err(Error::Config { ref key, .. }) if key == "relay_count"
        ));
    }

    #[test]
    fn placement_is_deterministic() {
        let cfg = NetworkConfig::default();
        let a = place_nodes(&cfg, &mut rng(99)).unwrap();
        let b = place_nodes(&cfg, &mut rng(99)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn distance_examples() {
        let o = Position::new(0.0, 0.0);
        assert_eq!(euclidean_distance(o, Position::new(3.0, 4.0)), 5.0);
        let p = Position::new(-7.5, 12.25);
        assert_eq!(euclidean_distance(p, p), 0.0);
        assert_eq!(euclidean_distance(o, Position::new(1.27e9, 0.0)), 1.27e9);
    }

    #[test]
    fn non_positive_beta_shape_rejected() {
        assert!(sample_quality(&mut rng(0), 0.0, 2.0).is_err());
        assert!(sample_quality(&mut rng(0), 3.0, -1.0).is_err());
        assert!(sample_quality(&mut rng(0), f64::NAN, 2.0).is_err());
    }

    #[test]
    fn beta_3_2_moments() {
        let sampler = QualitySampler::new(3.0, 2.0).unwrap();
        let mut r = rng(2024);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| sampler.sample(&mut r)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // a/(a+b) and ab/((a+b)^2 (a+b+1))
        assert!((mean - 0.6).abs() < 0.005, "mean {mean}");
        assert!((var - 0.04).abs() < 0.003, "var {var}");
    }

    #[test]
    fn beta_1_1_is_uniform_by_ks() {
        let sampler = QualitySampler::new(1.0, 1.0).unwrap();
        let mut r = rng(7);
        let n = 20_000;
        let mut xs: Vec<f64> = (0..n).map(|_| sampler.sample(&mut r)).collect();
        xs.sort_by(f64::total_cmp);
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let lo = x - i as f64 / n as f64;
                let hi = (i + 1) as f64 / n as f64 - x;
                lo.max(hi)
            })
            .fold(0.0, f64::max);
        let critical = 1.628 / (n as f64).sqrt();
        assert!(d < critical, "KS statistic {d} >= {critical}");
    }

    #[test]
    fn complete_graph_cardinality() {
        let net = default_network(3);
        assert_eq!(net.links().len(), 66);
        for relays in 1..8 {
            let cfg = NetworkConfig {
                relay_count: relays,
                ..NetworkConfig::default()
            };
            let net = NetworkState::generate(&cfg, &mut rng(relays as u64)).unwrap();
            let n = relays + 2;
            assert_eq!(net.links().len(), n * (n - 1) / 2);
        }
    }

    #[test]
    fn built_links_match_geometry() {
        let net = default_network(4);
        assert!(net.is_at_default());
        for l in net.links() {
            assert!((0.0..=1.0).contains(&l.default_quality));
            let geo = euclidean_distance(net.nodes()[l.a.0].position, net.nodes()[l.b.0].position);
            assert_eq!(l.default_distance_km, geo.max(net.min_coord_km()));
        }
        assert_eq!(net.direct_link().default_distance_km, 1.27e9);
    }

    #[test]
    fn cost_examples() {
        let mut net = default_network(5);
        let (x, y) = (NodeId(1), NodeId(2));
        let i = net.pair_index(x, y);
        net.links[i].current_quality = 0.75;
        net.links[i].current_distance_km = SPEED_OF_LIGHT_KM_S;
        assert_eq!(net.edge_cost(x, y, CostKind::QualityComplement), 0.25);
        assert_eq!(net.edge_cost(y, x, CostKind::TransmissionTime), 1.0);
    }

    #[test]
    fn direct_penalty_exceeds_sum_of_everything_else() {
        let net = default_network(6);
        for kind in CostKind::ALL {
            let total: f64 = net
                .links()
                .iter()
                .filter(|l| !net.is_direct(l.a, l.b))
                .map(|l| net.edge_cost(l.a, l.b, kind))
                .sum();
            let direct = net.edge_cost(net.probe(), net.ground(), kind);
            assert_eq!(direct, total + 1.0);
            let m = net.cost_matrix(kind);
            assert_eq!(m.get(net.ground(), net.probe()), direct);
        }
    }

    #[test]
    fn zero_sigma_perturbation_is_identity() {
        let mut net = default_network(8);
        let before = net.clone();
        net.perturb(&mut rng(1), 0.0).unwrap();
        assert_eq!(net, before);
    }

    #[test]
    fn negative_sigma_rejected() {
        let mut net = default_network(8);
        assert!(net.perturb(&mut rng(1), -0.1).is_err());
    }

    #[test]
    fn perturbation_centres_on_default_quality() {
        let mut net = default_network(9);
        let (x, y) = (NodeId(2), NodeId(5));
        let q0 = net.link(x, y).default_quality;
        let mut r = rng(10);
        let n = 10_000;
        let samples: Vec<f64> = (0..n)
            .map(|_| {
                net.perturb(&mut r, 0.05).unwrap();
                net.quality(x, y)
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let sd = (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        let sem = sd / (n as f64).sqrt();
        assert!(
            (mean - q0).abs() <= 3.0 * sem,
            "mean {mean} vs default {q0}"
        );
    }

    #[test]
    fn perturb_keeps_endpoints_fixed() {
        let mut net = default_network(11);
        net.perturb(&mut rng(12), 0.2).unwrap();
        assert_eq!(net.direct_link().current_distance_km, 1.27e9);
        assert_eq!(
            net.current_position(net.probe()),
            Position::new(1.27e9, 0.0)
        );
    }

    #[test]
    fn reset_restores_fresh_state() {
        let fresh = default_network(13);
        let mut net = fresh.clone();
        net.perturb(&mut rng(14), 0.3).unwrap();
        assert_ne!(net, fresh);
        net.reset();
        assert_eq!(net, fresh);
        net.reset();
        assert_eq!(net, fresh);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn clamp_safety(seed in any::<u64>(), sigma in 0.0f64..2.0, steps in 1usize..20) {
                let mut net = default_network(seed);
                let mut r = rng(seed ^ 0xdead_beef);
                for _ in 0..steps {
                    net.perturb(&mut r, sigma).unwrap();
                    for l in net.links() {
                        prop_assert!((0.0..=1.0).contains(&l.current_quality));
                        prop_assert!(l.current_distance_km >= net.min_coord_km());
                    }
                }
            }

            #[test]
            fn costs_are_symmetric(seed in any::<u64>(), sigma in 0.0f64..0.5) {
                let mut net = default_network(seed);
                net.perturb(&mut rng(seed.wrapping_add(1)), sigma).unwrap();
                for kind in CostKind::ALL {
                    for x in net.node_ids() {
                        for y in net.node_ids().filter(|&y| y != x) {
                            prop_assert_eq!(net.edge_cost(x, y, kind), net.edge_cost(y, x, kind));
                        }
                    }
                }
            }

            #[test]
            fn generation_is_deterministic(seed in any::<u64>()) {
                prop_assert_eq!(default_network(seed), default_network(seed));
            }
        }
    }
}
