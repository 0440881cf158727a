//! Multi-run study: independent networks, run-level aggregation, Welch tests
//! and the decision tables, assembled into a single report.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::StudyConfig;
use crate::decision::{practicality_correction, rank, DecisionTable};
use crate::error::Result;
use crate::routing::{path_frequencies, ProtocolKind, Route};
use crate::sim::{run_simulation, RunOutcome};
use crate::stats::{self, significance_matrix, Metric, SignificanceMatrix, StudySummary};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Seed for run `run` of a study with the given master seed.
///
/// `splitmix64(master + 0x9E3779B97F4A7C15 * (run + 1))`, so each run can be
/// reproduced on its own.
pub fn run_seed(master: u64, run: usize) -> u64 {
    let mut z = master.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(run as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub outcome: RunOutcome,
}

/// One cell of the study summary. Spread is absent for a single run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyCell {
    pub protocol: ProtocolKind,
    pub metric: Metric,
    pub mean: f64,
    pub std: Option<f64>,
    pub sem: Option<f64>,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequentPath {
    pub run: usize,
    pub protocol: ProtocolKind,
    pub route: Route,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TTests {
    Computed(Vec<SignificanceMatrix>),
    Skipped { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub master_seed: u64,
    /// SHA-256 of the canonical configuration, hex.
    pub config_hash: String,
    pub tool_version: String,
    pub config: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub provenance: Provenance,
    pub runs: Vec<RunRecord>,
    pub summary: Vec<StudyCell>,
    pub t_tests: TTests,
    pub decision: DecisionTable,
    pub decision_corrected: DecisionTable,
    /// Protocols by corrected MAVF, best first.
    pub ranking: Vec<ProtocolKind>,
    pub frequent_paths: Vec<FrequentPath>,
}

impl StudyReport {
    pub fn cell(&self, protocol: ProtocolKind, metric: Metric) -> Option<&StudyCell> {
        self.summary
            .iter()
            .find(|c| c.protocol == protocol && c.metric == metric)
    }

    /// Run-level values of `metric` for `protocol`, in run order.
    pub fn run_values(&self, protocol: ProtocolKind, metric: Metric) -> Vec<f64> {
        self.runs
            .iter()
            .map(|r| {
                let s = r.outcome.summary(protocol);
                match metric {
                    Metric::PercentError => s.percent_error,
                    Metric::TransmissionTime => s.time_mean_hr,
                }
            })
            .collect()
    }

    /// Protocol with the lowest study mean of `metric`.
    pub fn best_on(&self, metric: Metric) -> ProtocolKind {
        ProtocolKind::ALL
            .into_iter()
            .min_by(|&a, &b| {
                let ma = self.cell(a, metric).map_or(f64::INFINITY, |c| c.mean);
                let mb = self.cell(b, metric).map_or(f64::INFINITY, |c| c.mean);
                ma.total_cmp(&mb)
            })
            .expect("three protocols")
    }
}

pub fn config_hash(config: &StudyConfig) -> String {
    let digest = Sha256::digest(config.canonical().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Simulate `run_count` independent networks and assemble the report.
///
/// Runs execute in parallel; each uses its own stream seeded by
/// [`run_seed`], so the result does not depend on scheduling.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport> {
    config.validate()?;
    let sim = &config.sim;
    let runs = (0..sim.run_count)
        .into_par_iter()
        .map(|run| {
            let seed = run_seed(sim.seed, run);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            run_simulation(sim, &mut rng)
                .map(|outcome| RunRecord { run, seed, outcome })
                .map_err(|e| e.in_run(run))
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(config, runs)
}

fn assemble(config: &StudyConfig, runs: Vec<RunRecord>) -> Result<StudyReport> {
    let n = runs.len();
    let values = |p: ProtocolKind| -> Vec<(f64, f64)> {
        runs.iter()
            .map(|r| {
                let s = r.outcome.summary(p);
                (s.percent_error, s.time_mean_hr)
            })
            .collect()
    };

    let mut summary = Vec::new();
    for p in ProtocolKind::ALL {
        let v = values(p);
        for metric in Metric::ALL {
            let xs: Vec<f64> = v
                .iter()
                .map(|&(pe, tt)| match metric {
                    Metric::PercentError => pe,
                    Metric::TransmissionTime => tt,
                })
                .collect();
            let spread = stats::summarize(&xs).ok();
            summary.push(StudyCell {
                protocol: p,
                metric,
                mean: stats::mean(&xs).expect("at least one run"),
                std: spread.map(|s| s.std),
                sem: spread.map(|s| s.sem),
                n,
            });
        }
    }

    let t_tests = if n >= 2 {
        let per_protocol: Vec<(ProtocolKind, Vec<(f64, f64)>)> = ProtocolKind::ALL
            .into_iter()
            .map(|p| (p, values(p)))
            .collect();
        let study =
            StudySummary::from_run_values(per_protocol.iter().map(|(p, v)| (*p, v.as_slice())))?;
        TTests::Computed(significance_matrix(&study, stats::DEFAULT_ALPHA)?)
    } else {
        log::warn!("t-tests skipped: {n} run(s), at least 2 required");
        TTests::Skipped {
            reason: format!("run_count = {n}, at least 2 runs required"),
        }
    };

    let means: Vec<(ProtocolKind, f64, f64)> = ProtocolKind::ALL
        .into_iter()
        .map(|p| {
            let get = |m| {
                summary
                    .iter()
                    .find(|c| c.protocol == p && c.metric == m)
                    .map(|c| c.mean)
                    .expect("cell computed above")
            };
            (p, get(Metric::PercentError), get(Metric::TransmissionTime))
        })
        .collect();
    let decision = DecisionTable::from_means(&means, config.weights)?;
    let decision_corrected = practicality_correction(&decision, config.baseline)?;
    let ranking = rank(&decision_corrected);

    let mut frequent_paths = Vec::new();
    for r in &runs {
        for p in ProtocolKind::ALL {
            let routes: Vec<Route> = r
                .outcome
                .records_for(p)
                .map(|rec| rec.route.clone())
                .collect();
            if let Some((route, count)) = path_frequencies(&routes).into_iter().next() {
                frequent_paths.push(FrequentPath {
                    run: r.run,
                    protocol: p,
                    route,
                    count,
                });
            }
        }
    }

    Ok(StudyReport {
        provenance: Provenance {
            master_seed: config.sim.seed,
            config_hash: config_hash(config),
            tool_version: TOOL_VERSION.to_string(),
            config: config.canonical(),
        },
        runs,
        summary,
        t_tests,
        decision,
        decision_corrected,
        ranking,
        frequent_paths,
    })
}
