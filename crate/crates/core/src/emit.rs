//! CSV and JSON output of sweep results.
//!
//! Numbers are written in fixed-point notation with six significant digits
//! so reruns of the same scenario produce byte-identical files.
//!
//! Files written to the output directory:
//! - `blocking.csv`: `epsilon_db,seed,blocking_probability`, one row per run
//!   followed by `mean` and `std` rows for each ε.
//! - `utilization.csv`: `epsilon_db,slot_index,utilization`, the seed-mean of
//!   the utilization averaged over every directed link.
//! - `links/utilization_<src>-<dst>.csv`: the same for each directed link.
//! - `manifest.json`: resolved scenario, seeds and per-run counters.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ScenarioConfig;
use crate::engine::BlockCounts;
use crate::sweep::SweepResult;

pub const BLOCKING_HEADER: &str = "epsilon_db,seed,blocking_probability";
pub const UTILIZATION_HEADER: &str = "epsilon_db,slot_index,utilization";

#[derive(Debug, Error)]
#[error("cannot write {path}: {source}")]
pub struct EmitError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

/// Formats `v` with six significant digits in fixed-point notation.
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v == 0.0 {
            "0".into()
        } else {
            v.to_string()
        };
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRun {
    pub epsilon_db: f64,
    pub seed: u64,
    pub generated: u64,
    pub blocked: u64,
    pub established: u64,
    pub jammed_established: u64,
    pub blocked_by: BlockCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub artifact: String,
    pub version: String,
    pub config: ScenarioConfig,
    pub seeds: Vec<u64>,
    pub epsilon_points: Vec<f64>,
    pub links: Vec<String>,
    pub runs: Vec<ManifestRun>,
}

impl Manifest {
    pub fn from_result(result: &SweepResult) -> Self {
        Self {
            artifact: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: result.config.clone(),
            seeds: result.config.seeds.clone(),
            epsilon_points: result.points.iter().map(|p| p.epsilon_db).collect(),
            links: result.link_labels.clone(),
            runs: result
                .points
                .iter()
                .flat_map(|p| &p.runs)
                .map(|r| ManifestRun {
                    epsilon_db: r.epsilon_db,
                    seed: r.seed,
                    generated: r.metrics.generated,
                    blocked: r.metrics.blocked,
                    established: r.metrics.established,
                    jammed_established: r.metrics.jammed_established,
                    blocked_by: r.metrics.blocked_by,
                })
                .collect(),
        }
    }
}

pub fn blocking_csv(result: &SweepResult) -> String {
    let mut out = String::from(BLOCKING_HEADER);
    out.push('\n');
    for p in &result.points {
        let eps = format_sig6(p.epsilon_db);
        for r in &p.runs {
            let _ = writeln!(
                out,
                "{eps},{},{}",
                r.seed,
                format_sig6(r.metrics.blocking_probability)
            );
        }
        let _ = writeln!(out, "{eps},mean,{}", format_sig6(p.aggregate.blocking_mean));
        let _ = writeln!(out, "{eps},std,{}", format_sig6(p.aggregate.blocking_std));
    }
    out
}

fn utilization_rows<'a>(rows: impl Iterator<Item = (f64, &'a [f64])>) -> String {
    let mut out = String::from(UTILIZATION_HEADER);
    out.push('\n');
    for (eps, util) in rows {
        let eps = format_sig6(eps);
        for (slot, u) in util.iter().enumerate() {
            let _ = writeln!(out, "{eps},{slot},{}", format_sig6(*u));
        }
    }
    out
}

pub fn utilization_csv(result: &SweepResult) -> String {
    utilization_rows(
        result
            .points
            .iter()
            .map(|p| (p.epsilon_db, p.aggregate.network_utilization_mean.as_slice())),
    )
}

pub fn link_utilization_csv(result: &SweepResult, link: usize) -> String {
    utilization_rows(
        result
            .points
            .iter()
            .map(|p| (p.epsilon_db, p.aggregate.slot_utilization_mean[link].as_slice())),
    )
}

/// Writes every output file under `out_dir` and returns their paths.
pub fn emit(result: &SweepResult, out_dir: &Path) -> Result<Vec<PathBuf>, EmitError> {
    let links_dir = out_dir.join("links");
    fs::create_dir_all(&links_dir).map_err(|source| EmitError {
        path: links_dir.clone(),
        source,
    })?;
    let mut files = vec![
        (out_dir.join("blocking.csv"), blocking_csv(result)),
        (out_dir.join("utilization.csv"), utilization_csv(result)),
    ];
    for (i, label) in result.link_labels.iter().enumerate() {
        files.push((
            links_dir.join(format!("utilization_{label}.csv")),
            link_utilization_csv(result, i),
        ));
    }
    let manifest = serde_json::to_string_pretty(&Manifest::from_result(result)).expect("manifest serializes");
    files.push((out_dir.join("manifest.json"), manifest + "\n"));

    let mut written = Vec::with_capacity(files.len());
    for (path, contents) in files {
        fs::write(&path, contents).map_err(|source| EmitError {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
