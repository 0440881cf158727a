//! On-disk report bundle.
//!
//! CSV schemas (headers are fixed):
//!
//! | file                        | columns |
//! |-----------------------------|---------|
//! | `runs.csv`                  | run,protocol,percent_error,time_mean_hr,time_std_hr,time_sem_hr |
//! | `packets.csv`               | run,packet,protocol,state,transmission_time_hr,route |
//! | `crm.csv`                   | run,protocol,sample_index,crm_hr |
//! | `study_summary.csv`         | protocol,metric,mean,std,sem,n |
//! | `ttest.csv`                 | metric,protocol_a,protocol_b,t,df,p,significant |
//! | `decision.csv`              | protocol,v_percent_error,v_transmission_time,mavf,mavf_corrected,rank |
//! | `paths.csv`                 | run,protocol,path,count |
//! | `network/run<k>_nodes.csv`  | node_id,kind,x_km,y_km |
//! | `network/run<k>_links.csv`  | node_a,node_b,default_distance_km,default_quality |
//!
//! Routes are node ids joined by `-`. JSON output is `report.json` (the full
//! report) and `decision.json`. `manifest.txt` is always written and lists
//! every other file plus the provenance block.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::StudyConfig;
use crate::error::{Error, Result};
use crate::study::{StudyReport, TTests};

pub const MANIFEST: &str = "manifest.txt";

#[derive(Serialize)]
struct RunRow<'a> {
    run: usize,
    protocol: &'a str,
    percent_error: f64,
    time_mean_hr: f64,
    time_std_hr: Option<f64>,
    time_sem_hr: Option<f64>,
}

#[derive(Serialize)]
struct PacketRow<'a> {
    run: usize,
    packet: usize,
    protocol: &'a str,
    state: &'a str,
    transmission_time_hr: f64,
    route: String,
}

#[derive(Serialize)]
struct CrmRow<'a> {
    run: usize,
    protocol: &'a str,
    sample_index: usize,
    crm_hr: f64,
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    protocol: &'a str,
    metric: &'a str,
    mean: f64,
    std: Option<f64>,
    sem: Option<f64>,
    n: usize,
}

#[derive(Serialize)]
struct TTestRow<'a> {
    metric: &'a str,
    protocol_a: &'a str,
    protocol_b: &'a str,
    t: f64,
    df: f64,
    p: f64,
    significant: bool,
}

#[derive(Serialize)]
pub struct DecisionRecord<'a> {
    pub protocol: &'a str,
    pub v_percent_error: f64,
    pub v_transmission_time: f64,
    pub mavf: f64,
    pub mavf_corrected: f64,
    pub rank: usize,
}

#[derive(Serialize)]
struct PathRow<'a> {
    run: usize,
    protocol: &'a str,
    path: String,
    count: usize,
}

#[derive(Serialize)]
struct NodeRow<'a> {
    node_id: usize,
    kind: &'a str,
    x_km: f64,
    y_km: f64,
}

#[derive(Serialize)]
struct LinkRow {
    node_a: usize,
    node_b: usize,
    default_distance_km: f64,
    default_quality: f64,
}

struct Bundle<'a> {
    root: &'a Path,
    files: Vec<PathBuf>,
}

impl Bundle<'_> {
    fn csv<T: Serialize>(&mut self, rel: &str, rows: impl IntoIterator<Item = T>) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let to_err = |source| Error::Csv {
            path: path.clone(),
            source,
        };
        let mut w = csv::Writer::from_path(&path).map_err(to_err)?;
        for row in rows {
            w.serialize(row).map_err(to_err)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        self.files.push(PathBuf::from(rel));
        Ok(())
    }

    fn json<T: Serialize + ?Sized>(&mut self, rel: &str, value: &T) -> Result<()> {
        let path = self.root.join(rel);
        let text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
            path: path.clone(),
            source,
        })?;
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        self.files.push(PathBuf::from(rel));
        Ok(())
    }
}

/// Rows of the decision table with the corrected score and rank attached.
pub fn decision_records(report: &StudyReport) -> Vec<DecisionRecord<'static>> {
    report
        .decision
        .rows
        .iter()
        .map(|r| {
            let corrected = report
                .decision_corrected
                .row(r.protocol)
                .map_or(r.mavf, |c| c.mavf);
            let rank = report
                .ranking
                .iter()
                .position(|&p| p == r.protocol)
                .map_or(0, |i| i + 1);
            DecisionRecord {
                protocol: r.protocol.as_str(),
                v_percent_error: r.v_percent_error,
                v_transmission_time: r.v_transmission_time,
                mavf: r.mavf,
                mavf_corrected: corrected,
                rank,
            }
        })
        .collect()
}

/// Write the report into `config.output_dir`, returning the emitted files
/// relative to it (manifest last).
pub fn write_report(report: &StudyReport, config: &StudyConfig) -> Result<Vec<PathBuf>> {
    let root = config.output_dir.as_path();
    fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let mut b = Bundle {
        root,
        files: Vec::new(),
    };

    if config.format.csv() {
        b.csv(
            "runs.csv",
            report.runs.iter().flat_map(|r| {
                r.outcome.summaries.iter().map(move |s| RunRow {
                    run: r.run,
                    protocol: s.protocol.as_str(),
                    percent_error: s.percent_error,
                    time_mean_hr: s.time_mean_hr,
                    time_std_hr: s.time_std_hr,
                    time_sem_hr: s.time_sem_hr,
                })
            }),
        )?;
        b.csv(
            "packets.csv",
            report.runs.iter().flat_map(|r| {
                r.outcome.records.iter().map(move |p| PacketRow {
                    run: r.run,
                    packet: p.packet_index,
                    protocol: p.protocol.as_str(),
                    state: p.state.as_str(),
                    transmission_time_hr: p.transmission_time_hr,
                    route: p.route.to_string(),
                })
            }),
        )?;
        b.csv(
            "crm.csv",
            report.runs.iter().flat_map(|r| {
                r.outcome.summaries.iter().flat_map(move |s| {
                    s.crm_hr.iter().enumerate().map(move |(i, &v)| CrmRow {
                        run: r.run,
                        protocol: s.protocol.as_str(),
                        sample_index: i + 1,
                        crm_hr: v,
                    })
                })
            }),
        )?;
        b.csv(
            "study_summary.csv",
            report.summary.iter().map(|c| SummaryRow {
                protocol: c.protocol.as_str(),
                metric: c.metric.as_str(),
                mean: c.mean,
                std: c.std,
                sem: c.sem,
                n: c.n,
            }),
        )?;
        if let TTests::Computed(matrices) = &report.t_tests {
            let mut rows = Vec::new();
            for m in matrices {
                for (i, a) in m.protocols.iter().enumerate() {
                    for (j, bp) in m.protocols.iter().enumerate() {
                        if let Some(t) = &m.cells[i][j] {
                            rows.push(TTestRow {
                                metric: m.metric.as_str(),
                                protocol_a: a.as_str(),
                                protocol_b: bp.as_str(),
                                t: t.t,
                                df: t.df,
                                p: t.p,
                                significant: t.significant,
                            });
                        }
                    }
                }
            }
            b.csv("ttest.csv", rows)?;
        }
        b.csv("decision.csv", decision_records(report))?;
        b.csv(
            "paths.csv",
            report.frequent_paths.iter().map(|f| PathRow {
                run: f.run,
                protocol: f.protocol.as_str(),
                path: f.route.to_string(),
                count: f.count,
            }),
        )?;
        for r in &report.runs {
            let net = &r.outcome.network;
            b.csv(
                &format!("network/run{}_nodes.csv", r.run),
                net.nodes().iter().map(|n| NodeRow {
                    node_id: n.id.index(),
                    kind: n.kind.as_str(),
                    x_km: n.position.x_km,
                    y_km: n.position.y_km,
                }),
            )?;
            b.csv(
                &format!("network/run{}_links.csv", r.run),
                net.links().iter().map(|l| LinkRow {
                    node_a: l.a.index(),
                    node_b: l.b.index(),
                    default_distance_km: l.default_distance_km,
                    default_quality: l.default_quality,
                }),
            )?;
        }
    }

    if config.format.json() {
        b.json("report.json", report)?;
        b.json("decision.json", &decision_records(report))?;
    }

    let mut manifest = String::new();
    let p = &report.provenance;
    let _ = writeln!(manifest, "# dtn-tradesim report manifest");
    let _ = writeln!(manifest, "tool_version = {}", p.tool_version);
    let _ = writeln!(manifest, "master_seed = {}", p.master_seed);
    let _ = writeln!(manifest, "config_hash = {}", p.config_hash);
    if let TTests::Skipped { reason } = &report.t_tests {
        let _ = writeln!(manifest, "t_tests = skipped ({reason})");
    }
    let _ = writeln!(manifest, "\n[config]");
    manifest.push_str(&p.config);
    let _ = writeln!(manifest, "\n[files]");
    for f in &b.files {
        let _ = writeln!(manifest, "{}", f.display());
    }
    let path = root.join(MANIFEST);
    fs::write(&path, manifest).map_err(|e| Error::io(&path, e))?;
    b.files.push(PathBuf::from(MANIFEST));
    Ok(b.files)
}
