//! CSV and JSON emission.
//!
//! CSV headers per experiment (every row ends with `config_hash,seed`):
//!
//! - fig5: `pc,pt,fidelity,delta_f,stderr,postselect_rate,f_critical,shots`
//! - fig6: `variant,depth,p,original_fidelity,original_stderr,filtered_fidelity,filtered_stderr,postselect_rate,postselect_stderr,gain,shots`
//! - bounds: `kind,n,p,w,direction,bound,exact,satisfied,slack`
//! - table1: `filter,location,fault,q1,q2,expected_q1,expected_q2,literal_match,equivalent`
//! - tgate: `px,py,pz,p_i,p_x,p_y,p_z,expected_p_i,expected_p_z,input_fidelity,distance,pass`
//! - ccz: `p,input_fidelity,filtered_fidelity,expected_fidelity,pass`
//! - run: `circuit,fidelity,stderr,postselect_rate,postselect_stderr,accepted,shots`
//!
//! Floats use the shortest representation that round-trips, so identical
//! results give identical bytes. Files are rewritten, never appended.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qfilter_core::analytics::{BoundDirection, BoundReport};
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::experiments::*;

#[derive(Clone, Debug, PartialEq)]
pub enum Report {
    Fig5(Vec<Fig5Row>),
    Fig6(Vec<Fig6Row>),
    Bounds(Vec<BoundReport>),
    Table1(Vec<Table1Row>),
    Tgate(Vec<TgateRow>),
    Ccz(Vec<CczRow>),
    Run(Vec<RunRow>),
}

pub struct OutputPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
}

fn f(x: f64) -> String {
    format!("{x:?}")
}

fn table(report: &Report) -> (Vec<&'static str>, Vec<Vec<String>>) {
    match report {
        Report::Fig5(rows) => (
            vec!["pc", "pt", "fidelity", "delta_f", "stderr", "postselect_rate", "f_critical", "shots"],
            rows.iter()
                .map(|r| vec![f(r.pc), f(r.pt), f(r.fidelity), f(r.delta_f), f(r.stderr), f(r.postselect_rate), f(r.f_critical), r.shots.to_string()])
                .collect(),
        ),
        Report::Fig6(rows) => (
            vec![
                "variant",
                "depth",
                "p",
                "original_fidelity",
                "original_stderr",
                "filtered_fidelity",
                "filtered_stderr",
                "postselect_rate",
                "postselect_stderr",
                "gain",
                "shots",
            ],
            rows.iter()
                .map(|r| {
                    vec![
                        r.variant.to_string(),
                        r.depth.to_string(),
                        f(r.p),
                        f(r.original_fidelity),
                        f(r.original_stderr),
                        f(r.filtered_fidelity),
                        f(r.filtered_stderr),
                        f(r.postselect_rate),
                        f(r.postselect_stderr),
                        f(r.gain),
                        r.shots.to_string(),
                    ]
                })
                .collect(),
        ),
        Report::Bounds(rows) => (
            vec!["kind", "n", "p", "w", "direction", "bound", "exact", "satisfied", "slack"],
            rows.iter()
                .map(|r| {
                    let dir = match r.direction {
                        BoundDirection::Upper => "upper",
                        BoundDirection::Lower => "lower",
                    };
                    vec![
                        r.kind.clone(),
                        r.n.to_string(),
                        f(r.p),
                        r.w.map(|w| w.to_string()).unwrap_or_default(),
                        dir.to_string(),
                        f(r.bound),
                        r.exact.map(f).unwrap_or_default(),
                        r.satisfied.to_string(),
                        f(r.slack),
                    ]
                })
                .collect(),
        ),
        Report::Table1(rows) => (
            vec!["filter", "location", "fault", "q1", "q2", "expected_q1", "expected_q2", "literal_match", "equivalent"],
            rows.iter()
                .map(|r| {
                    vec![
                        r.filter.to_string(),
                        r.location.to_string(),
                        r.fault.to_string(),
                        r.q1.to_string(),
                        r.q2.to_string(),
                        r.expected_q1.to_string(),
                        r.expected_q2.to_string(),
                        r.literal_match.to_string(),
                        r.equivalent.to_string(),
                    ]
                })
                .collect(),
        ),
        Report::Tgate(rows) => (
            vec!["px", "py", "pz", "p_i", "p_x", "p_y", "p_z", "expected_p_i", "expected_p_z", "input_fidelity", "distance", "pass"],
            rows.iter()
                .map(|r| {
                    vec![
                        f(r.px),
                        f(r.py),
                        f(r.pz),
                        f(r.p_i),
                        f(r.p_x),
                        f(r.p_y),
                        f(r.p_z),
                        f(r.expected_p_i),
                        f(r.expected_p_z),
                        f(r.input_fidelity),
                        f(r.distance),
                        r.pass.to_string(),
                    ]
                })
                .collect(),
        ),
        Report::Ccz(rows) => (
            vec!["p", "input_fidelity", "filtered_fidelity", "expected_fidelity", "pass"],
            rows.iter()
                .map(|r| vec![f(r.p), f(r.input_fidelity), f(r.filtered_fidelity), f(r.expected_fidelity), r.pass.to_string()])
                .collect(),
        ),
        Report::Run(rows) => (
            vec!["circuit", "fidelity", "stderr", "postselect_rate", "postselect_stderr", "accepted", "shots"],
            rows.iter()
                .map(|r| {
                    vec![
                        r.circuit.to_string(),
                        f(r.fidelity),
                        f(r.stderr),
                        f(r.postselect_rate),
                        f(r.postselect_stderr),
                        r.accepted.to_string(),
                        r.shots.to_string(),
                    ]
                })
                .collect(),
        ),
    }
}

/// CSV text for a report, each row tagged with the config hash and seed.
pub fn to_csv(cfg: &ExperimentConfig, report: &Report) -> Result<String> {
    let (header, rows) = table(report);
    let hash = cfg.hash();
    let seed = cfg.seed().to_string();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header.iter().copied().chain(["config_hash", "seed"]))?;
    for row in rows {
        w.write_record(row.iter().map(String::as_str).chain([hash.as_str(), seed.as_str()]))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn summary(report: &Report) -> serde_json::Value {
    match report {
        Report::Fig5(rows) => {
            let zero = rows.iter().find(|r| r.pc == 0.0 && r.pt == 0.0).map(|r| r.fidelity);
            json!({ "cells": rows.len(), "zero_noise_fidelity": zero, "rows": rows })
        }
        Report::Fig6(rows) => json!({ "cells": rows.len(), "crossovers": fig6_crossovers(rows), "rows": rows }),
        Report::Bounds(rows) => {
            let violations = rows.iter().filter(|r| !r.satisfied).count();
            json!({ "checks": rows.len(), "violations": violations })
        }
        Report::Table1(rows) => json!({
            "entries": rows.len(),
            "literal_matches": rows.iter().filter(|r| r.literal_match).count(),
            "equivalent_matches": rows.iter().filter(|r| r.equivalent).count(),
            "rows": rows,
        }),
        Report::Tgate(rows) => json!({ "all_pass": rows.iter().all(|r| r.pass), "rows": rows }),
        Report::Ccz(rows) => json!({ "all_pass": rows.iter().all(|r| r.pass), "rows": rows }),
        Report::Run(rows) => json!({ "rows": rows }),
    }
}

/// JSON summary: the effective config, its hash, the seed and per-experiment
/// aggregates. No timestamps, so reruns are byte-identical too.
pub fn to_json(cfg: &ExperimentConfig, report: &Report) -> Result<String> {
    let v = json!({
        "experiment": cfg.name(),
        "config_hash": cfg.hash(),
        "seed": cfg.seed(),
        "config": cfg,
        "summary": summary(report),
    });
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

/// Output file stem: the experiment name, plus the variant for fig6.
pub fn file_stem(cfg: &ExperimentConfig) -> String {
    match cfg {
        ExperimentConfig::Fig6(c) => format!("fig6_{}", c.variant.name()),
        other => other.name().to_string(),
    }
}

pub fn write_report(cfg: &ExperimentConfig, report: &Report, out_dir: &Path) -> Result<OutputPaths> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let stem = file_stem(cfg);
    let paths = OutputPaths { csv: out_dir.join(format!("{stem}.csv")), json: out_dir.join(format!("{stem}.json")) };
    fs::write(&paths.csv, to_csv(cfg, report)?).with_context(|| format!("writing {}", paths.csv.display()))?;
    fs::write(&paths.json, to_json(cfg, report)?).with_context(|| format!("writing {}", paths.json.display()))?;
    Ok(paths)
}
