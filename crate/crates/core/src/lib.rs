//! Monte Carlo trade study of routing protocols for a deep-space relay
//! network.
//!
//! A probe and a ground station sit at Earth–Titan distance with a field of
//! relay satellites between them. Packets are flown through the network under
//! three protocols at once (greedy bundle forwarding, distance-weighted
//! Dijkstra and quality-weighted Dijkstra) while link state fluctuates every
//! step. Run-level results feed Welch t-tests and a swing-weighted
//! multi-attribute value function that ranks the protocols.
//!
//! ```no_run
//! use dtn_tradesim_core::{run_study, write_report, StudyConfig};
//!
//! let config = StudyConfig::default();
//! let report = run_study(&config)?;
//! println!("ranking: {:?}", report.ranking);
//! write_report(&report, &config)?;
//! # Ok::<(), dtn_tradesim_core::Error>(())
//! ```

pub mod config;
pub mod decision;
pub mod error;
pub mod model;
pub mod report;
pub mod routing;
pub mod sim;
pub mod stats;
pub mod study;

pub use config::{load_config, ConfigOverrides, OutputFormat, StudyConfig};
pub use decision::{
    mavf_score, practicality_correction, rank, value_linear, DecisionTable, SwingWeights,
};
pub use error::{Error, Result};
pub use model::{
    euclidean_distance, place_nodes, sample_quality, CostKind, LinkState, NetworkConfig,
    NetworkState, Node, NodeId, NodeKind, Position, SPEED_OF_LIGHT_KM_S,
};
pub use report::write_report;
pub use routing::{dijkstra_path, most_frequent_path, next_hop, ProtocolKind, Route};
pub use sim::{
    cumulative_running_mean, hop_outcome, run_simulation, simulate_packet, HopOutcome,
    PacketRecord, PacketState, RunOutcome, RunSummary, SimConfig,
};
pub use stats::{significance_matrix, summarize, welch_t, Metric, SummaryStats, TTestResult};
pub use study::{run_seed, run_study, StudyReport};
