//! Study configuration: a flat `key = value` file, command-line overrides on
//! top, defaults for everything left unset.
//!
//! ```text
//! # comments and blank lines are ignored
//! seed = 7
//! runs = 5
//! packets = 500
//! sigma_frac = 0.05
//! format = both
//! ```

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::decision::SwingWeights;
use crate::error::{Error, Result};
use crate::routing::ProtocolKind;
use crate::sim::SimConfig;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Both => "both",
        }
    }

    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            other => Err(Error::config(
                "format",
                format!("expected csv, json or both, got `{other}`"),
            )),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    /// Simulation parameters; `sim.seed` is the master seed.
    pub sim: SimConfig,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
    /// Reference protocol for the practicality correction.
    pub baseline: ProtocolKind,
    pub weights: SwingWeights,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            sim: SimConfig::default(),
            output_dir: PathBuf::from("dtn-tradesim-out"),
            format: OutputFormat::default(),
            baseline: ProtocolKind::BundleProtocol,
            weights: SwingWeights::default(),
        }
    }
}

/// Values given explicitly on the command line. Unset fields leave the file
/// or default value alone.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigOverrides {
    pub seed: Option<u64>,
    pub runs: Option<usize>,
    pub packets: Option<usize>,
    pub relays: Option<usize>,
    pub sigma_frac: Option<f64>,
    pub beta_a: Option<f64>,
    pub beta_b: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

fn parse_count(key: &str, value: &str, min: usize) -> Result<usize> {
    let n: i128 = value
        .parse()
        .map_err(|_| Error::config(key, format!("expected an integer, got `{value}`")))?;
    if n < min as i128 {
        return Err(Error::config(
            key,
            format!("out of range: {n} (must be >= {min})"),
        ));
    }
    usize::try_from(n).map_err(|_| Error::config(key, format!("out of range: {n}")))
}

fn parse_float(key: &str, value: &str) -> Result<f64> {
    let x: f64 = value
        .parse()
        .map_err(|_| Error::config(key, format!("expected a number, got `{value}`")))?;
    if !x.is_finite() {
        return Err(Error::config(key, format!("must be finite, got `{value}`")));
    }
    Ok(x)
}

fn parse_positive(key: &str, value: &str) -> Result<f64> {
    let x = parse_float(key, value)?;
    if x <= 0.0 {
        return Err(Error::config(
            key,
            format!("out of range: {x} (must be > 0)"),
        ));
    }
    Ok(x)
}

impl StudyConfig {
    /// Apply one `key = value` setting. Hyphens in keys are accepted as
    /// underscores.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim().trim_matches('"');
        let key = key.as_str();
        match key {
            "seed" => {
                self.sim.seed = value.parse().map_err(|_| {
                    Error::config(key, format!("expected an unsigned 64-bit integer, got `{value}`"))
                })?
            }
            "runs" | "run_count" => self.sim.run_count = parse_count(key, value, 1)?,
            "packets" | "packet_count" => self.sim.packet_count = parse_count(key, value, 1)?,
            "relays" | "relay_count" => self.sim.network.relay_count = parse_count(key, value, 1)?,
            "sigma_frac" => {
                let s = parse_float(key, value)?;
                if s < 0.0 {
                    return Err(Error::config(key, format!("out of range: {s} (must be >= 0)")));
                }
                self.sim.sigma_frac = s;
            }
            "beta_a" => self.sim.network.beta_a = parse_positive(key, value)?,
            "beta_b" => self.sim.network.beta_b = parse_positive(key, value)?,
            "end_to_end_km" => self.sim.network.end_to_end_km = parse_positive(key, value)?,
            "min_coord_km" => self.sim.network.min_coord_km = parse_positive(key, value)?,
            "out" | "output_dir" => {
                if value.is_empty() {
                    return Err(Error::config(key, "output directory must not be empty"));
                }
                self.output_dir = PathBuf::from(value);
            }
            "format" => self.format = value.parse()?,
            "baseline" => {
                self.baseline = ProtocolKind::parse(value).ok_or_else(|| {
                    Error::config(
                        key,
                        format!(
                            "unknown protocol `{value}` (expected bundle, distance_dijkstra or quality_dijkstra)"
                        ),
                    )
                })?
            }
            "weight_percent_error" => self.weights.percent_error = parse_positive(key, value)?,
            "weight_transmission_time" => {
                self.weights.transmission_time = parse_positive(key, value)?
            }
            _ => return Err(Error::config(key, "unknown configuration key")),
        }
        Ok(())
    }

    /// Parse flat `key = value` text over the defaults.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = StudyConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(line, format!("line {}: expected `key = value`", lineno + 1))
            })?;
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &ConfigOverrides) {
        if let Some(v) = o.seed {
            self.sim.seed = v;
        }
        if let Some(v) = o.runs {
            self.sim.run_count = v;
        }
        if let Some(v) = o.packets {
            self.sim.packet_count = v;
        }
        if let Some(v) = o.relays {
            self.sim.network.relay_count = v;
        }
        if let Some(v) = o.sigma_frac {
            self.sim.sigma_frac = v;
        }
        if let Some(v) = o.beta_a {
            self.sim.network.beta_a = v;
        }
        if let Some(v) = o.beta_b {
            self.sim.network.beta_b = v;
        }
        if let Some(v) = &o.output_dir {
            self.output_dir = v.clone();
        }
        if let Some(v) = o.format {
            self.format = v;
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        self.weights.validate()?;
        if self.output_dir.as_os_str().is_empty() {
            return Err(Error::config(
                "output_dir",
                "output directory must not be empty",
            ));
        }
        Ok(())
    }

    /// Canonical `key = value` rendering of every setting that influences
    /// results. The output directory is left out.
    pub fn canonical(&self) -> String {
        let s = &self.sim;
        let n = &s.network;
        let mut out = String::new();
        let _ = writeln!(out, "seed = {}", s.seed);
        let _ = writeln!(out, "runs = {}", s.run_count);
        let _ = writeln!(out, "packets = {}", s.packet_count);
        let _ = writeln!(out, "relays = {}", n.relay_count);
        let _ = writeln!(out, "sigma_frac = {}", s.sigma_frac);
        let _ = writeln!(out, "beta_a = {}", n.beta_a);
        let _ = writeln!(out, "beta_b = {}", n.beta_b);
        let _ = writeln!(out, "end_to_end_km = {}", n.end_to_end_km);
        let _ = writeln!(out, "min_coord_km = {}", n.min_coord_km);
        let _ = writeln!(out, "format = {}", self.format);
        let _ = writeln!(out, "baseline = {}", self.baseline);
        let _ = writeln!(out, "weight_percent_error = {}", self.weights.percent_error);
        let _ = writeln!(
            out,
            "weight_transmission_time = {}",
            self.weights.transmission_time
        );
        out
    }
}

/// Read an optional config file, apply overrides, and validate.
pub fn load_config(path: Option<&Path>, overrides: &ConfigOverrides) -> Result<StudyConfig> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            StudyConfig::from_text(&text)?
        }
        None => StudyConfig::default(),
    };
    cfg.apply(overrides);
    cfg.validate()?;
    if cfg.sim.run_count < 2 {
        log::warn!(
            "run_count = {}: at least 2 runs are needed for t-tests, they will be skipped",
            cfg.sim.run_count
        );
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(e: Error) -> String {
        match e {
            Error::Config { key, .. } => key,
            other => panic!("expected config error, got {other}"),
        }
    }

    #[test]
    fn empty_config_gives_defaults() {
        let cfg = StudyConfig::from_text("").unwrap();
        assert_eq!(cfg.sim.packet_count, 500);
        assert_eq!(cfg.sim.run_count, 5);
        assert_eq!(cfg.sim.network.relay_count, 10);
        assert_eq!(cfg.sim.network.beta_a, 3.0);
        assert_eq!(cfg.sim.network.beta_b, 2.0);
        assert_eq!(cfg.sim.network.end_to_end_km, 1.27e9);
        assert_eq!(cfg.weights, SwingWeights::default());
        assert_eq!(cfg.baseline, ProtocolKind::BundleProtocol);
    }

    #[test]
    fn negative_packet_count_is_range_error() {
        let err = StudyConfig::from_text("packet_count = -1").unwrap_err();
        assert!(err.to_string().contains("out of range"), "{err}");
        assert_eq!(key_of(err), "packet_count");
    }

    #[test]
    fn unknown_key_named_in_error() {
        assert_eq!(
            key_of(StudyConfig::from_text("pakets = 3").unwrap_err()),
            "pakets"
        );
    }

    #[test]
    fn overrides_beat_file_values() {
        let mut cfg = StudyConfig::from_text("runs = 5\nseed = 3").unwrap();
        cfg.apply(&ConfigOverrides {
            runs: Some(7),
            ..Default::default()
        });
        assert_eq!(cfg.sim.run_count, 7);
        assert_eq!(cfg.sim.seed, 3);
    }

    #[test]
    fn parses_every_key() {
        let text = "\
            # full file\n\
            seed = 11\n\
            runs = 3\n\
            packets = 200   # trailing comment\n\
            relays = 6\n\
            sigma-frac = 0.1\n\
            beta_a = 2.5\n\
            beta_b = 1.5\n\
            end_to_end_km = 1e9\n\
            min_coord_km = 5000\n\
            out = \"results\"\n\
            format = csv\n\
            baseline = quality_dijkstra\n\
            weight_percent_error = 50\n\
            weight_transmission_time = 10\n";
        let cfg = StudyConfig::from_text(text).unwrap();
        assert_eq!(cfg.sim.seed, 11);
        assert_eq!(cfg.sim.run_count, 3);
        assert_eq!(cfg.sim.packet_count, 200);
        assert_eq!(cfg.sim.network.relay_count, 6);
        assert_eq!(cfg.sim.sigma_frac, 0.1);
        assert_eq!(cfg.sim.network.end_to_end_km, 1e9);
        assert_eq!(cfg.output_dir, PathBuf::from("results"));
        assert_eq!(cfg.format, OutputFormat::Csv);
        assert_eq!(cfg.baseline, ProtocolKind::QualityDijkstra);
        assert_eq!(cfg.weights.percent_error, 50.0);
        assert_eq!(
            StudyConfig::from_text(&cfg.canonical())
                .unwrap()
                .canonical(),
            cfg.canonical()
        );
    }

    #[test]
    fn range_and_syntax_errors() {
        for (text, key) in [
            ("runs = 0", "runs"),
            ("relays = 0", "relays"),
            ("sigma_frac = -0.2", "sigma_frac"),
            ("beta_a = 0", "beta_a"),
            ("format = xml", "format"),
            ("baseline = ospf", "baseline"),
            ("seed = -4", "seed"),
            ("packets = many", "packets"),
        ] {
            assert_eq!(
                key_of(StudyConfig::from_text(text).unwrap_err()),
                key,
                "{text}"
            );
        }
        assert!(StudyConfig::from_text("just words").is_err());
    }

    #[test]
    fn cross_field_validation() {
        let mut cfg = StudyConfig::from_text("end_to_end_km = 15000").unwrap();
        assert_eq!(key_of(cfg.validate().unwrap_err()), "end_to_end_km");
        cfg = StudyConfig::default();
        cfg.apply(&ConfigOverrides {
            sigma_frac: Some(f64::NAN),
            ..Default::default()
        });
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_config(
            Some(Path::new("/nonexistent/x.cfg")),
            &ConfigOverrides::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
