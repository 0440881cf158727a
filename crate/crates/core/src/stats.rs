//! Descriptive statistics and one-tailed Welch (unequal-variance) t-tests.
//!
//! The Student-t tail is evaluated through the regularized incomplete beta
//! function, implemented here with a Lentz continued fraction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::routing::ProtocolKind;

pub const DEFAULT_ALPHA: f64 = 0.05;

const BETA_CF_TOL: f64 = 1e-10;
const BETA_CF_MAX_ITER: usize = 1000;

/// Mean, sample standard deviation (`n - 1` divisor) and standard error.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
    pub sem: f64,
}

impl SummaryStats {
    /// Rebuild from published moments.
    pub fn from_moments(mean: f64, std: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Usage(format!("summary needs n >= 2, got {n}")));
        }
        if !(std.is_finite() && std >= 0.0) || !mean.is_finite() {
            return Err(Error::Usage("mean and std must be finite, std >= 0".into()));
        }
        Ok(SummaryStats {
            mean,
            std,
            n,
            sem: std / (n as f64).sqrt(),
        })
    }

    pub fn variance(&self) -> f64 {
        self.std * self.std
    }
}

pub fn mean(samples: &[f64]) -> Option<f64> {
    if samples.is_empty() {
        None
    } else {
        Some(samples.iter().sum::<f64>() / samples.len() as f64)
    }
}

pub fn summarize(samples: &[f64]) -> Result<SummaryStats> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::Usage(format!(
            "summary statistics need at least 2 samples, got {n}"
        )));
    }
    let m = samples.iter().sum::<f64>() / n as f64;
    let ss: f64 = samples.iter().map(|x| (x - m) * (x - m)).sum();
    let std = (ss / (n - 1) as f64).sqrt();
    Ok(SummaryStats {
        mean: m,
        std,
        n,
        sem: std / (n as f64).sqrt(),
    })
}

/// ln Γ(x) for x > 0 (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection keeps accuracy for small arguments.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=BETA_CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < BETA_CF_TOL {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

/// `P(T > t)` for Student's t with `df` degrees of freedom.
pub fn student_t_sf(t: f64, df: f64) -> f64 {
    if t.is_nan() || df.is_nan() || df <= 0.0 {
        return f64::NAN;
    }
    if t == f64::INFINITY {
        return 0.0;
    }
    if t == f64::NEG_INFINITY {
        return 1.0;
    }
    let tail = 0.5 * regularized_incomplete_beta(df / (df + t * t), 0.5 * df, 0.5);
    if t >= 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    /// Welch–Satterthwaite degrees of freedom.
    pub df: f64,
    /// One-tailed probability in the direction of the observed difference.
    pub p: f64,
    pub significant: bool,
}

/// Welch's t-test at the default 0.05 level.
pub fn welch_t(s1: &SummaryStats, s2: &SummaryStats) -> Result<TTestResult> {
    welch_t_at(s1, s2, DEFAULT_ALPHA)
}

pub fn welch_t_at(s1: &SummaryStats, s2: &SummaryStats, alpha: f64) -> Result<TTestResult> {
    if s1.n < 2 || s2.n < 2 {
        return Err(Error::Usage("Welch test needs n >= 2 on both sides".into()));
    }
    let v1 = s1.variance() / s1.n as f64;
    let v2 = s2.variance() / s2.n as f64;
    if v1 == 0.0 && v2 == 0.0 {
        return Err(Error::DegenerateTest);
    }
    let t = (s1.mean - s2.mean) / (v1 + v2).sqrt();
    let df = (v1 + v2).powi(2) / (v1 * v1 / (s1.n - 1) as f64 + v2 * v2 / (s2.n - 1) as f64);
    let p = student_t_sf(t.abs(), df).clamp(0.0, 1.0);
    Ok(TTestResult {
        t,
        df,
        p,
        significant: p < alpha,
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    PercentError,
    TransmissionTime,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::PercentError, Metric::TransmissionTime];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::PercentError => "percent_error",
            Metric::TransmissionTime => "transmission_time",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub protocol: ProtocolKind,
    pub percent_error: SummaryStats,
    pub transmission_time: SummaryStats,
}

impl StudyRow {
    pub fn metric(&self, metric: Metric) -> &SummaryStats {
        match metric {
            Metric::PercentError => &self.percent_error,
            Metric::TransmissionTime => &self.transmission_time,
        }
    }
}

/// Per-protocol summaries of the run-level metrics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub rows: Vec<StudyRow>,
}

impl StudySummary {
    /// Summarize run-level `(percent_error, mean_transmission_time)` pairs
    /// for each protocol.
    pub fn from_run_values<'a, I>(per_protocol: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ProtocolKind, &'a [(f64, f64)])>,
    {
        let rows = per_protocol
            .into_iter()
            .map(|(protocol, runs)| {
                let pe: Vec<f64> = runs.iter().map(|r| r.0).collect();
                let tt: Vec<f64> = runs.iter().map(|r| r.1).collect();
                Ok(StudyRow {
                    protocol,
                    percent_error: summarize(&pe)?,
                    transmission_time: summarize(&tt)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StudySummary { rows })
    }

    pub fn row(&self, protocol: ProtocolKind) -> Option<&StudyRow> {
        self.rows.iter().find(|r| r.protocol == protocol)
    }

    pub fn protocols(&self) -> Vec<ProtocolKind> {
        self.rows.iter().map(|r| r.protocol).collect()
    }
}

/// Pairwise Welch tests for one metric. `cells[i][j]` compares protocol `i`
/// against protocol `j`; the diagonal is `None`, as is any pair whose
/// variances are both zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificanceMatrix {
    pub metric: Metric,
    pub protocols: Vec<ProtocolKind>,
    pub cells: Vec<Vec<Option<TTestResult>>>,
}

impl SignificanceMatrix {
    pub fn get(&self, a: ProtocolKind, b: ProtocolKind) -> Option<&TTestResult> {
        let i = self.protocols.iter().position(|&p| p == a)?;
        let j = self.protocols.iter().position(|&p| p == b)?;
        self.cells[i][j].as_ref()
    }
}

pub fn significance_matrix(study: &StudySummary, alpha: f64) -> Result<Vec<SignificanceMatrix>> {
    if study.rows.len() < 2 {
        return Err(Error::Usage(
            "significance matrix needs at least two protocols".into(),
        ));
    }
    Metric::ALL
        .into_iter()
        .map(|metric| {
            let cells = study
                .rows
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    study
                        .rows
                        .iter()
                        .enumerate()
                        .map(|(j, b)| {
                            if i == j {
                                return Ok(None);
                            }
                            match welch_t_at(a.metric(metric), b.metric(metric), alpha) {
                                Ok(r) => Ok(Some(r)),
                                Err(Error::DegenerateTest) => Ok(None),
                                Err(e) => Err(e),
                            }
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SignificanceMatrix {
                metric,
                protocols: study.protocols(),
                cells,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(mean: f64, std: f64, n: usize) -> SummaryStats {
        SummaryStats::from_moments(mean, std, n).unwrap()
    }

    /// Composite Simpson integral of the t density over `[t, t_max]`, with
    /// the remaining tail handled by the substitution `u = 1/x`.
    fn t_sf_by_quadrature(t: f64, df: f64) -> f64 {
        let norm = (ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0)).exp()
            / (df * std::f64::consts::PI).sqrt();
        let pdf = |x: f64| norm * (1.0 + x * x / df).powf(-(df + 1.0) / 2.0);
        let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize| {
            let h = (b - a) / n as f64;
            let mut acc = f(a) + f(b);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * f(a + i as f64 * h);
            }
            acc * h / 3.0
        };
        let cut = t.abs().max(1.0) * 20.0;
        let body = simpson(&pdf, t.abs(), cut, 200_000);
        let tail = simpson(
            &|u: f64| {
                if u == 0.0 {
                    0.0
                } else {
                    pdf(1.0 / u) / (u * u)
                }
            },
            0.0,
            1.0 / cut,
            200_000,
        );
        let upper = body + tail;
        if t >= 0.0 {
            upper
        } else {
            1.0 - upper
        }
    }

    #[test]
    fn summarize_examples() {
        let st = summarize(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(st.mean, 2.0);
        assert_eq!(st.std, 1.0);
        assert!((st.sem - 0.577_350_269).abs() < 1e-9);
        let c = summarize(&[4.2; 6]).unwrap();
        assert_eq!(c.std, 0.0);
        assert!(summarize(&[1.0]).is_err());
    }

    #[test]
    fn published_standard_error() {
        let st = s(2.703, 0.994, 500);
        assert!((st.sem - 0.04446).abs() < 5e-5);
        assert!((st.sem * (500f64).sqrt() - st.std).abs() < 1e-12);
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
        assert!((ln_gamma(10.5) - 13.940_625_219_403_763).abs() < 1e-10);
    }

    #[test]
    fn incomplete_beta_closed_forms() {
        // I_x(1, 1) = x and I_x(a, 1) = x^a.
        for &x in &[0.01, 0.2, 0.5, 0.77, 0.99] {
            assert!((regularized_incomplete_beta(x, 1.0, 1.0) - x).abs() < 1e-12);
            assert!((regularized_incomplete_beta(x, 3.0, 1.0) - x.powi(3)).abs() < 1e-12);
        }
        assert_eq!(regularized_incomplete_beta(0.0, 2.0, 3.0), 0.0);
        assert_eq!(regularized_incomplete_beta(1.0, 2.0, 3.0), 1.0);
    }

    #[test]
    fn t_tail_matches_quadrature() {
        for &df in &[1.0, 2.5, 4.0, 7.3, 30.0] {
            for &t in &[-2.0, 0.0, 0.3, 1.0, 2.5, 6.3] {
                let got = student_t_sf(t, df);
                let want = t_sf_by_quadrature(t, df);
                assert!((got - want).abs() < 1e-6, "t={t} df={df}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn cauchy_tail_closed_form() {
        // df = 1 is Cauchy: P(T > t) = 1/2 - atan(t)/pi.
        for &t in &[0.5f64, 1.0, 3.0] {
            let want = 0.5 - t.atan() / std::f64::consts::PI;
            assert!((student_t_sf(t, 1.0) - want).abs() < 1e-10);
        }
    }

    #[test]
    fn welch_transmission_time_cells() {
        let bundle = s(3.120, 0.684, 5);
        let distance = s(1.189, 0.004, 5);
        let quality = s(1.820, 0.280, 5);

        let bd = welch_t(&bundle, &distance).unwrap();
        assert!((bd.t - 6.3125).abs() < 1e-3, "t {}", bd.t);
        assert!((bd.df - 4.0).abs() < 0.01, "df {}", bd.df);
        assert!(((bd.p - 0.00170) / 0.00170).abs() < 0.10, "p {}", bd.p);

        let bq = welch_t(&bundle, &quality).unwrap();
        assert!((bq.t - 3.933).abs() < 1e-3, "t {}", bq.t);
        assert!(((bq.p - 0.00500) / 0.00500).abs() < 0.10, "p {}", bq.p);
    }

    #[test]
    fn equal_summaries_give_null_result() {
        let a = s(10.0, 2.0, 5);
        let r = welch_t(&a, &a).unwrap();
        assert_eq!(r.t, 0.0);
        assert!((r.p - 0.5).abs() < 1e-12);
        assert!(!r.significant);
    }

    #[test]
    fn zero_variance_pair_is_degenerate() {
        let a = s(1.0, 0.0, 5);
        assert!(matches!(welch_t(&a, &a), Err(Error::DegenerateTest)));
    }

    #[test]
    fn matrix_is_symmetric_in_magnitude() {
        let study = StudySummary {
            rows: vec![
                StudyRow {
                    protocol: ProtocolKind::BundleProtocol,
                    percent_error: s(56.44, 7.41, 5),
                    transmission_time: s(3.12, 0.684, 5),
                },
                StudyRow {
                    protocol: ProtocolKind::DistanceDijkstra,
                    percent_error: s(64.2, 4.864, 5),
                    transmission_time: s(1.189, 0.004, 5),
                },
                StudyRow {
                    protocol: ProtocolKind::QualityDijkstra,
                    percent_error: s(41.04, 4.498, 5),
                    transmission_time: s(1.82, 0.28, 5),
                },
            ],
        };
        for m in significance_matrix(&study, 0.05).unwrap() {
            for i in 0..3 {
                assert!(m.cells[i][i].is_none());
                for j in 0..3 {
                    if i != j {
                        let (a, b) = (m.cells[i][j].unwrap(), m.cells[j][i].unwrap());
                        assert_eq!(a.t, -b.t);
                        assert_eq!(a.df, b.df);
                        assert_eq!(a.p, b.p);
                    }
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn stats() -> impl Strategy<Value = SummaryStats> {
            (-100.0f64..100.0, 0.01f64..50.0, 2usize..40).prop_map(|(m, sd, n)| s(m, sd, n))
        }

        proptest! {
            #[test]
            fn antisymmetry(a in stats(), b in stats()) {
                let ab = welch_t(&a, &b).unwrap();
                let ba = welch_t(&b, &a).unwrap();
                prop_assert_eq!(ab.t, -ba.t);
                prop_assert_eq!(ab.df, ba.df);
                prop_assert!((0.0..=1.0).contains(&ab.p));
                prop_assert_eq!(ab.significant, ab.p < 0.05);
            }

            #[test]
            fn df_bounds(a in stats(), b in stats()) {
                let r = welch_t(&a, &b).unwrap();
                let lo = (a.n.min(b.n) - 1) as f64;
                let hi = (a.n + b.n - 2) as f64;
                prop_assert!(r.df >= lo * (1.0 - 1e-12) && r.df <= hi * (1.0 + 1e-12), "df {} not in [{lo}, {hi}]", r.df);
            }

            #[test]
            fn scale_invariance(a in stats(), b in stats(), k in 0.001f64..1000.0) {
                let r = welch_t(&a, &b).unwrap();
                let ka = s(a.mean * k, a.std * k, a.n);
                let kb = s(b.mean * k, b.std * k, b.n);
                let rk = welch_t(&ka, &kb).unwrap();
                prop_assert!((r.t - rk.t).abs() <= 1e-9 * r.t.abs().max(1.0));
            }
        }
    }
}
