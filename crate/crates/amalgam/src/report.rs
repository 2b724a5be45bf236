//! CSV and line-delimited JSON output, run manifests and config hashing.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::experiments::{AtlasRow, ExperimentOutput, ExperimentReport, Params};
use crate::exponent::Rational;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Header `parameter,source_norm,target_norm,ratio`, one row per point.
pub fn write_points_csv(report: &ExperimentReport, w: impl Write) -> Result<(), ReportError> {
    let mut out = csv::Writer::from_writer(w);
    if report.points.is_empty() {
        out.write_record(["parameter", "source_norm", "target_norm", "ratio"])?;
    }
    for point in &report.points {
        out.serialize(point)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct AtlasRecord {
    inv_p: String,
    inv_q: String,
    region_alpha: String,
    region_beta: String,
    critical_s: String,
    s: String,
    holds: String,
    strict_required: String,
    error: String,
}

fn rational(r: Rational) -> String {
    r.to_string()
}

fn optional<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Header `inv_p,inv_q,region_alpha,region_beta,critical_s,s,holds,strict_required,error`;
/// rationals print as `a/b`, absent values as empty fields.
pub fn write_atlas_csv(rows: &[AtlasRow], w: impl Write) -> Result<(), ReportError> {
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(AtlasRecord {
            inv_p: rational(row.inv_p),
            inv_q: rational(row.inv_q),
            region_alpha: format!("{:?}", row.region_alpha),
            region_beta: format!("{:?}", row.region_beta),
            critical_s: optional(row.critical_s),
            s: optional(row.s),
            holds: optional(row.holds),
            strict_required: optional(row.strict_required),
            error: row.error.clone().unwrap_or_default(),
        })?;
    }
    out.flush()?;
    Ok(())
}

/// One JSON object per line.
pub fn write_jsonl<T: Serialize>(records: &[T], mut w: impl Write) -> Result<(), ReportError> {
    for record in records {
        serde_json::to_writer(&mut w, record)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// `sha256` over `experiment=<name>` followed by the canonical parameters.
pub fn config_hash(experiment: &str, params: &Params) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("experiment={experiment}\n"));
    hasher.update(params.canonical());
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn file_stem(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

/// Writes `<experiment>-<series>.csv` per report, `<experiment>.jsonl` with
/// every report, and `<experiment>-atlas.csv` for atlas rows. Returns the
/// file names in write order.
pub fn write_outputs(
    dir: &Path,
    experiment: &str,
    output: &ExperimentOutput,
) -> Result<Vec<String>, ReportError> {
    std::fs::create_dir_all(dir)?;
    let stem = file_stem(experiment);
    let mut names = Vec::new();
    let mut create = |name: String| -> Result<BufWriter<File>, ReportError> {
        let file = File::create(dir.join(&name))?;
        names.push(name);
        Ok(BufWriter::new(file))
    };
    for report in &output.reports {
        let mut w = create(format!("{stem}-{}.csv", file_stem(&report.series)))?;
        write_points_csv(report, &mut w)?;
        w.flush()?;
    }
    if !output.reports.is_empty() {
        let mut w = create(format!("{stem}.jsonl"))?;
        write_jsonl(&output.reports, &mut w)?;
        w.flush()?;
    }
    if !output.atlas.is_empty() {
        let mut w = create(format!("{stem}-atlas.csv"))?;
        write_atlas_csv(&output.atlas, &mut w)?;
        w.flush()?;
    }
    Ok(names)
}

/// Provenance of one run; outputs sit next to it in the same directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub experiment: String,
    pub params: Params,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub grid: Option<String>,
    pub version: String,
    /// Seconds since the Unix epoch at the start of the run.
    pub timestamp: u64,
    pub runtime_seconds: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command_line: Vec<String>, experiment: &str, params: &Params) -> Self {
        let seed = params.get("seed").and_then(|s| s.parse().ok());
        let grid = match (params.get("extent"), params.get("samples")) {
            (None, None) => None,
            (extent, samples) => Some(format!(
                "L={} M={}",
                extent.unwrap_or("default"),
                samples.unwrap_or("default")
            )),
        };
        Self {
            command_line,
            experiment: experiment.to_string(),
            params: params.clone(),
            config_hash: config_hash(experiment, params),
            seed,
            grid,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            runtime_seconds: 0.0,
            outputs: Vec::new(),
        }
    }

    pub fn finish(&mut self, runtime: Duration, outputs: Vec<String>) {
        self.runtime_seconds = runtime.as_secs_f64();
        self.outputs = outputs;
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, ReportError> {
        let path = dir.join(MANIFEST_FILE);
        let mut w = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, self)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self, ReportError> {
        Ok(serde_json::from_reader(std::io::BufReader::new(
            File::open(path)?,
        ))?)
    }

    /// Whether the parameters still hash to the recorded value.
    pub fn is_consistent(&self) -> bool {
        config_hash(&self.experiment, &self.params) == self.config_hash
    }
}
