//! Monte Carlo packet simulation.
//!
//! Each packet is flown as three copies, one per protocol, through the same
//! sequence of perturbed network states. A step perturbs the network once and
//! then advances every unfinished copy by one hop. Loss draws are independent
//! per copy and per hop. A damaged copy keeps routing to the destination so
//! that every copy yields a transmission time.
//!
//! Relays move between steps, so a hop is flown from the point where the
//! packet was delivered to the next node's current position. A copy's
//! transmission time is therefore the light time along a connected polyline
//! from probe to ground and can never undercut the straight-line bound.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    euclidean_distance, NetworkConfig, NetworkState, NodeId, Position, SPEED_OF_LIGHT_KM_S,
};
use crate::routing::{decide_with_tree, ProtocolKind, Route, ShortestPathTree};
use crate::stats;

pub const DEFAULT_PACKET_COUNT: usize = 500;
pub const DEFAULT_RUN_COUNT: usize = 5;
pub const DEFAULT_SIGMA_FRAC: f64 = 0.05;
pub const DEFAULT_SEED: u64 = 2022;

/// Steps allowed per packet, as a multiple of the node count.
pub const STEP_BUDGET_FACTOR: usize = 10;

const SECONDS_PER_HOUR: f64 = 3600.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub network: NetworkConfig,
    pub packet_count: usize,
    pub run_count: usize,
    /// Standard deviation of the per-step perturbation as a fraction of each
    /// default value.
    pub sigma_frac: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            network: NetworkConfig::default(),
            packet_count: DEFAULT_PACKET_COUNT,
            run_count: DEFAULT_RUN_COUNT,
            sigma_frac: DEFAULT_SIGMA_FRAC,
            seed: DEFAULT_SEED,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        if self.packet_count == 0 {
            return Err(Error::config("packet_count", "must be at least 1"));
        }
        if self.run_count == 0 {
            return Err(Error::config("run_count", "must be at least 1"));
        }
        if !(self.sigma_frac.is_finite() && self.sigma_frac >= 0.0) {
            return Err(Error::config(
                "sigma_frac",
                "must be finite and non-negative",
            ));
        }
        Ok(())
    }

    /// Lower bound on any copy's transmission time: the straight line from
    /// probe to ground at light speed, in hours.
    pub fn min_transmission_time_hr(&self) -> f64 {
        self.network.end_to_end_km / SPEED_OF_LIGHT_KM_S / SECONDS_PER_HOUR
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HopOutcome {
    Survived,
    Lost,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PacketState {
    Intact,
    Damaged,
}

impl PacketState {
    pub fn as_str(self) -> &'static str {
        match self {
            PacketState::Intact => "intact",
            PacketState::Damaged => "damaged",
        }
    }
}

/// Survival rule for a uniform draw `u` on `[0, 1)`: survive iff `u < quality`.
pub fn outcome_for_draw(u: f64, quality: f64) -> HopOutcome {
    if u < quality {
        HopOutcome::Survived
    } else {
        HopOutcome::Lost
    }
}

pub fn hop_outcome<R: Rng + ?Sized>(rng: &mut R, quality: f64) -> HopOutcome {
    outcome_for_draw(rng.random::<f64>(), quality)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PacketRecord {
    pub packet_index: usize,
    pub protocol: ProtocolKind,
    pub route: Route,
    /// Light time over the hops actually flown, in hours.
    pub transmission_time_hr: f64,
    pub state: PacketState,
    /// Hops where the bundle rule had no admissible neighbour.
    pub degenerate_hops: usize,
}

/// One hop taken during a step.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TakenHop {
    pub protocol: ProtocolKind,
    pub from: NodeId,
    pub to: NodeId,
    pub outcome: HopOutcome,
}

/// What an observer sees after each step: the network state the hops were
/// decided and flown under, and the hops themselves.
#[derive(Debug)]
pub struct StepView<'a> {
    pub step: usize,
    pub network: &'a NetworkState,
    pub hops: &'a [TakenHop],
}

struct PacketCopy {
    protocol: ProtocolKind,
    route: Route,
    /// Where the packet was delivered on its last hop.
    location: Position,
    time_s: f64,
    damaged: bool,
    done: bool,
    degenerate: usize,
}

/// Fly one packet from probe to ground under all three protocols.
///
/// `network` should be at its default state on entry; it is left in the
/// last perturbed state on return.
pub fn simulate_packet<R: Rng + ?Sized>(
    network: &mut NetworkState,
    rng: &mut R,
    sigma_frac: f64,
    packet_index: usize,
) -> Result<[PacketRecord; 3]> {
    simulate_packet_observed(network, rng, sigma_frac, packet_index, |_| {})
}

pub fn simulate_packet_observed<R, F>(
    network: &mut NetworkState,
    rng: &mut R,
    sigma_frac: f64,
    packet_index: usize,
    mut observer: F,
) -> Result<[PacketRecord; 3]>
where
    R: Rng + ?Sized,
    F: FnMut(&StepView<'_>),
{
    let src = network.probe();
    let dst = network.ground();
    let budget = STEP_BUDGET_FACTOR * network.node_count();
    let mut copies = ProtocolKind::ALL.map(|protocol| PacketCopy {
        protocol,
        route: Route::starting_at(src),
        location: network.current_position(src),
        time_s: 0.0,
        damaged: false,
        done: false,
        degenerate: 0,
    });
    let mut hops = Vec::with_capacity(copies.len());

    let mut step = 0;
    while copies.iter().any(|c| !c.done) {
        if step >= budget {
            let stuck: Vec<String> = copies
                .iter()
                .filter(|c| !c.done)
                .map(|c| format!("{} at route {}", c.protocol, c.route))
                .collect();
            return Err(Error::SimulationFault {
                run: None,
                message: format!(
                    "packet {packet_index} exceeded the {budget}-step budget: {}",
                    stuck.join(", ")
                ),
            });
        }
        network.perturb(rng, sigma_frac)?;

        hops.clear();
        for copy in copies.iter_mut().filter(|c| !c.done) {
            let tree = copy
                .protocol
                .cost_kind()
                .map(|kind| ShortestPathTree::toward(&network.cost_matrix(kind), dst));
            let current = copy.route.last().expect("route starts at the source");
            let decision = decide_with_tree(
                network,
                copy.protocol,
                tree.as_ref(),
                current,
                dst,
                copy.route.nodes(),
            );
            let next = decision.next;
            copy.degenerate += usize::from(decision.degenerate);
            let arrival = network.current_position(next);
            let flown = euclidean_distance(copy.location, arrival).max(network.min_coord_km());
            copy.time_s += flown / SPEED_OF_LIGHT_KM_S;
            copy.location = arrival;
            let outcome = hop_outcome(rng, network.quality(current, next));
            if outcome == HopOutcome::Lost {
                copy.damaged = true;
            }
            copy.route.push(next);
            copy.done = next == dst;
            hops.push(TakenHop {
                protocol: copy.protocol,
                from: current,
                to: next,
                outcome,
            });
        }
        observer(&StepView {
            step,
            network,
            hops: &hops,
        });
        step += 1;
    }

    Ok(copies.map(|c| PacketRecord {
        packet_index,
        protocol: c.protocol,
        route: c.route,
        transmission_time_hr: c.time_s / SECONDS_PER_HOUR,
        state: if c.damaged {
            PacketState::Damaged
        } else {
            PacketState::Intact
        },
        degenerate_hops: c.degenerate,
    }))
}

/// Element `k` is the mean of the first `k + 1` samples.
pub fn cumulative_running_mean(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::Usage("running mean of an empty series".into()));
    }
    let mut sum = 0.0;
    Ok(samples
        .iter()
        .enumerate()
        .map(|(i, x)| {
            sum += x;
            sum / (i + 1) as f64
        })
        .collect())
}

pub fn percent_error(damaged: usize, total: usize) -> f64 {
    100.0 * damaged as f64 / total as f64
}

/// Per-protocol results of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub protocol: ProtocolKind,
    pub packet_count: usize,
    pub damaged_count: usize,
    pub percent_error: f64,
    pub time_mean_hr: f64,
    /// `None` when fewer than two packets were simulated.
    pub time_std_hr: Option<f64>,
    pub time_sem_hr: Option<f64>,
    pub crm_hr: Vec<f64>,
    pub degenerate_hops: usize,
}

impl RunSummary {
    pub fn from_records(protocol: ProtocolKind, records: &[&PacketRecord]) -> Result<Self> {
        let times: Vec<f64> = records.iter().map(|r| r.transmission_time_hr).collect();
        let crm_hr = cumulative_running_mean(&times)?;
        let damaged_count = records
            .iter()
            .filter(|r| r.state == PacketState::Damaged)
            .count();
        let spread = stats::summarize(&times).ok();
        Ok(RunSummary {
            protocol,
            packet_count: records.len(),
            damaged_count,
            percent_error: percent_error(damaged_count, records.len()),
            time_mean_hr: *crm_hr.last().expect("non-empty"),
            time_std_hr: spread.map(|s| s.std),
            time_sem_hr: spread.map(|s| s.sem),
            crm_hr,
            degenerate_hops: records.iter().map(|r| r.degenerate_hops).sum(),
        })
    }
}

/// Everything produced by one run: the generated network at its default
/// state, every packet record, and the per-protocol summaries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub network: NetworkState,
    /// Three records per packet, in [`ProtocolKind::ALL`] order.
    pub records: Vec<PacketRecord>,
    pub summaries: Vec<RunSummary>,
}

impl RunOutcome {
    pub fn summary(&self, protocol: ProtocolKind) -> &RunSummary {
        &self.summaries[protocol.index()]
    }

    pub fn records_for(&self, protocol: ProtocolKind) -> impl Iterator<Item = &PacketRecord> {
        self.records.iter().filter(move |r| r.protocol == protocol)
    }
}

/// Generate a fresh network and fly `packet_count` packets through it,
/// resetting the network between packets.
pub fn run_simulation<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> Result<RunOutcome> {
    config.validate()?;
    let mut network = NetworkState::generate(&config.network, rng)?;
    let pristine = network.clone();
    let mut records = Vec::with_capacity(3 * config.packet_count);
    for packet in 0..config.packet_count {
        records.extend(simulate_packet(
            &mut network,
            rng,
            config.sigma_frac,
            packet,
        )?);
        network.reset();
    }
    let summaries = ProtocolKind::ALL
        .into_iter()
        .map(|p| {
            let mine: Vec<&PacketRecord> = records.iter().filter(|r| r.protocol == p).collect();
            RunSummary::from_records(p, &mine)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunOutcome {
        network: pristine,
        records,
        summaries,
    })
}
