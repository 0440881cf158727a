//! Multi-attribute value scoring of the routing protocols.
//!
//! Each metric is mapped to `[0, 1]` by a linear value function anchored at
//! the worst and best observed option (both metrics are lower-is-better),
//! then combined by a swing-weight normalized sum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::routing::ProtocolKind;
use crate::stats::StudySummary;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwingWeights {
    /// Mission-critical metric.
    pub percent_error: f64,
    /// Mission-effectiveness metric.
    pub transmission_time: f64,
}

impl Default for SwingWeights {
    fn default() -> Self {
        SwingWeights {
            percent_error: 100.0,
            transmission_time: 20.0,
        }
    }
}

impl SwingWeights {
    pub fn validate(&self) -> Result<()> {
        for (key, w) in [
            ("weight_percent_error", self.percent_error),
            ("weight_transmission_time", self.transmission_time),
        ] {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::config(
                    key,
                    format!("weight must be positive, got {w}"),
                ));
            }
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.percent_error + self.transmission_time
    }
}

/// Linear value of `x` on a scale where `worst` scores 0 and `best` scores 1.
pub fn value_linear(x: f64, worst: f64, best: f64) -> Result<f64> {
    if worst == best {
        return Err(Error::DegenerateScale(worst));
    }
    Ok(((worst - x) / (worst - best)).clamp(0.0, 1.0))
}

pub fn mavf_score(v_percent_error: f64, v_transmission_time: f64, weights: &SwingWeights) -> f64 {
    (weights.percent_error * v_percent_error + weights.transmission_time * v_transmission_time)
        / weights.total()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionRow {
    pub protocol: ProtocolKind,
    pub percent_error_mean: f64,
    pub transmission_time_mean: f64,
    pub v_percent_error: f64,
    pub v_transmission_time: f64,
    pub mavf: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTable {
    pub weights: SwingWeights,
    pub rows: Vec<DecisionRow>,
}

/// Worst/best anchors over the option set for a lower-is-better metric.
/// When every option ties, all of them score 1.
fn local_values(xs: &[f64]) -> Vec<f64> {
    let worst = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let best = xs.iter().copied().fold(f64::INFINITY, f64::min);
    xs.iter()
        .map(|&x| value_linear(x, worst, best).unwrap_or(1.0))
        .collect()
}

impl DecisionTable {
    /// Score options from `(protocol, percent_error_mean, transmission_time_mean)`.
    pub fn from_means(means: &[(ProtocolKind, f64, f64)], weights: SwingWeights) -> Result<Self> {
        weights.validate()?;
        if means.is_empty() {
            return Err(Error::Usage(
                "decision table needs at least one option".into(),
            ));
        }
        let pe: Vec<f64> = means.iter().map(|m| m.1).collect();
        let tt: Vec<f64> = means.iter().map(|m| m.2).collect();
        let rows = means
            .iter()
            .zip(local_values(&pe))
            .zip(local_values(&tt))
            .map(|((&(protocol, pe, tt), v_pe), v_tt)| DecisionRow {
                protocol,
                percent_error_mean: pe,
                transmission_time_mean: tt,
                v_percent_error: v_pe,
                v_transmission_time: v_tt,
                mavf: mavf_score(v_pe, v_tt, &weights),
            })
            .collect();
        Ok(DecisionTable { weights, rows })
    }

    pub fn from_study(study: &StudySummary, weights: SwingWeights) -> Result<Self> {
        let means: Vec<_> = study
            .rows
            .iter()
            .map(|r| (r.protocol, r.percent_error.mean, r.transmission_time.mean))
            .collect();
        Self::from_means(&means, weights)
    }

    pub fn row(&self, protocol: ProtocolKind) -> Option<&DecisionRow> {
        self.rows.iter().find(|r| r.protocol == protocol)
    }
}

/// Zero the transmission-time value of every option whose percent error is
/// worse than the baseline's, and rescore it.
pub fn practicality_correction(
    table: &DecisionTable,
    baseline: ProtocolKind,
) -> Result<DecisionTable> {
    let reference = table
        .row(baseline)
        .ok_or_else(|| Error::Usage(format!("baseline {baseline} is not in the decision table")))?
        .percent_error_mean;
    let rows = table
        .rows
        .iter()
        .map(|r| {
            if r.percent_error_mean > reference {
                DecisionRow {
                    v_transmission_time: 0.0,
                    mavf: mavf_score(r.v_percent_error, 0.0, &table.weights),
                    ..r.clone()
                }
            } else {
                r.clone()
            }
        })
        .collect();
    Ok(DecisionTable {
        weights: table.weights,
        rows,
    })
}

/// Options by descending MAVF; ties go to the lower percent error.
pub fn rank(table: &DecisionTable) -> Vec<ProtocolKind> {
    let mut rows: Vec<&DecisionRow> = table.rows.iter().collect();
    rows.sort_by(|a, b| {
        b.mavf
            .total_cmp(&a.mavf)
            .then(a.percent_error_mean.total_cmp(&b.percent_error_mean))
    });
    rows.into_iter().map(|r| r.protocol).collect()
}
