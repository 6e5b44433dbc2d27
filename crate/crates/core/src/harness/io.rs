//! On-disk artifacts. Reals are written as `{:.16e}` (17 significant digits),
//! which reads back to the identical `f64`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::extremes::NormingConstants;
use crate::harness::experiment::{ExperimentData, SimulationOutput, WeightSummary};
use crate::harness::report::Report;
use crate::harness::ExperimentConfig;
use crate::sde::TrajectoryBatch;

pub const ENDPOINTS_INTERACTING: &str = "endpoints_interacting.csv";
pub const ENDPOINTS_IID: &str = "endpoints_iid.csv";
pub const PATTERNS_INTERACTING: &str = "patterns_interacting.csv";
pub const PATTERNS_IID: &str = "patterns_iid.csv";
pub const WEIGHTS: &str = "weights.csv";
pub const MAXIMA: &str = "maxima.csv";
pub const NORMING: &str = "norming.json";
pub const REPORT: &str = "report.json";
pub const CONFIG: &str = "config.toml";
pub const PATHS_INTERACTING: &str = "paths_interacting_r0.bin";
pub const PATHS_IID: &str = "paths_iid_r0.bin";

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn data_error(path: &Path, reason: impl Into<String>) -> Error {
    Error::Data {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

/// One row per particle: `replication_id,particle,x_t`.
pub fn write_endpoints(path: &Path, replications: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["replication_id", "particle", "x_t"])?;
    for (r, values) in replications.iter().enumerate() {
        let r = r.to_string();
        for (i, x) in values.iter().enumerate() {
            w.write_record([r.as_str(), &i.to_string(), &real(*x)])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct EndpointRow {
    replication_id: u64,
    particle: usize,
    x_t: f64,
}

pub fn read_endpoints(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut out: Vec<Vec<f64>> = Vec::new();
    for row in reader.deserialize() {
        let row: EndpointRow = row?;
        let r = row.replication_id as usize;
        if r == out.len() {
            out.push(Vec::new());
        } else if r + 1 != out.len() {
            return Err(data_error(path, format!("replication {r} out of order")));
        }
        let current = out.last_mut().expect("pushed above");
        if row.particle != current.len() {
            return Err(data_error(
                path,
                format!("replication {r}: particle {} out of order", row.particle),
            ));
        }
        current.push(row.x_t);
    }
    if let Some(n) = out.first().map(Vec::len) {
        if out.iter().any(|v| v.len() != n) {
            return Err(data_error(path, "replications have different particle counts"));
        }
    }
    Ok(out)
}

/// Points with normalized value at least `cut`:
/// `replication_id,index_fraction,normalized_value`.
pub fn write_patterns(path: &Path, replications: &[Vec<f64>], norming: &NormingConstants, cut: f64) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["replication_id", "index_fraction", "normalized_value"])?;
    for (r, values) in replications.iter().enumerate() {
        let r = r.to_string();
        let n = values.len() as f64;
        for (i, x) in values.iter().enumerate() {
            let v = norming.normalize(*x);
            if v >= cut {
                w.write_record([r.as_str(), &real((i + 1) as f64 / n), &real(v)])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct PatternRow {
    pub replication_id: u64,
    pub index_fraction: f64,
    pub normalized_value: f64,
}

pub fn read_patterns(path: &Path) -> Result<Vec<PatternRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let rows = reader.deserialize().collect::<std::result::Result<Vec<PatternRow>, _>>()?;
    Ok(rows)
}

/// `replication_id,log_weight,martingale,quad_variation`
pub fn write_weights(path: &Path, weights: &[WeightSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["replication_id", "log_weight", "martingale", "quad_variation"])?;
    for (r, s) in weights.iter().enumerate() {
        w.write_record([
            r.to_string(),
            real(s.log_weight),
            real(s.martingale),
            real(s.quad_variation),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct WeightRow {
    replication_id: usize,
    log_weight: f64,
    martingale: f64,
    quad_variation: f64,
}

pub fn read_weights(path: &Path) -> Result<Vec<WeightSummary>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in reader.deserialize() {
        let row: WeightRow = row?;
        if row.replication_id != out.len() {
            return Err(data_error(path, format!("replication {} out of order", row.replication_id)));
        }
        out.push(WeightSummary {
            log_weight: row.log_weight,
            martingale: row.martingale,
            quad_variation: row.quad_variation,
        });
    }
    Ok(out)
}

/// Raw and normalized maxima of both systems, one row per replication.
pub fn write_maxima(path: &Path, data: &ExperimentData) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "replication_id",
        "interacting_max",
        "iid_max",
        "interacting_normalized",
        "iid_normalized",
    ])?;
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for (r, inter) in data.interacting.iter().enumerate() {
        let mi = max(inter);
        let (mc, nc) = match data.iid.get(r) {
            Some(v) => {
                let m = max(v);
                (real(m), real(data.norming.normalize(m)))
            }
            None => (String::new(), String::new()),
        };
        w.write_record([r.to_string(), real(mi), mc, real(data.norming.normalize(mi)), nc])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_norming(path: &Path, norming: &NormingConstants) -> Result<()> {
    let mut text = serde_json::to_string_pretty(norming)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_norming(path: &Path) -> Result<NormingConstants> {
    let text = std::fs::read_to_string(path)?;
    let norming: NormingConstants = serde_json::from_str(&text)?;
    NormingConstants::new(norming.a, norming.b, norming.n, norming.source)
}

/// Little-endian `N: u64`, `steps: u64`, `T: f64`, then the row-major values.
pub fn write_paths(path: &Path, batch: &TrajectoryBatch) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&(batch.particles() as u64).to_le_bytes())?;
    w.write_all(&(batch.steps() as u64).to_le_bytes())?;
    w.write_all(&batch.t_end().to_le_bytes())?;
    for v in batch.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_paths(path: &Path) -> Result<TrajectoryBatch> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    if bytes.len() < 24 || (bytes.len() - 24) % 8 != 0 {
        return Err(data_error(path, "truncated path file"));
    }
    let word = |i: usize| -> [u8; 8] { bytes[8 * i..8 * i + 8].try_into().expect("8-byte slice") };
    let n = u64::from_le_bytes(word(0)) as usize;
    let steps = u64::from_le_bytes(word(1)) as usize;
    let t_end = f64::from_le_bytes(word(2));
    let values: Vec<f64> = (3..bytes.len() / 8).map(|i| f64::from_le_bytes(word(i))).collect();
    if n.checked_mul(steps + 1) != Some(values.len()) {
        return Err(data_error(path, "header does not match payload size"));
    }
    TrajectoryBatch::from_parts(n, steps, t_end, values, None)
}

pub fn write_report(path: &Path, report: &Report) -> Result<()> {
    let mut text = report.to_json()?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_report(path: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes every data artifact of a simulation into `config.output.directory`.
pub fn save_simulation(config: &ExperimentConfig, output: &SimulationOutput) -> Result<()> {
    let dir = &config.output.directory;
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(CONFIG), config.canonical().to_toml()?)?;
    let data = &output.data;
    write_norming(&dir.join(NORMING), &data.norming)?;
    if config.output.save_endpoints {
        write_endpoints(&dir.join(ENDPOINTS_INTERACTING), &data.interacting)?;
        write_endpoints(&dir.join(ENDPOINTS_IID), &data.iid)?;
    }
    let cut = config.output.pattern_cut;
    write_patterns(&dir.join(PATTERNS_INTERACTING), &data.interacting, &data.norming, cut)?;
    write_patterns(&dir.join(PATTERNS_IID), &data.iid, &data.norming, cut)?;
    write_maxima(&dir.join(MAXIMA), data)?;
    if let Some(weights) = &data.weights {
        write_weights(&dir.join(WEIGHTS), weights)?;
    }
    if let Some((inter, iid)) = &output.sample_paths {
        write_paths(&dir.join(PATHS_INTERACTING), inter)?;
        write_paths(&dir.join(PATHS_IID), iid)?;
    }
    Ok(())
}

/// Reloads what [`save_simulation`] wrote; endpoints must have been saved.
pub fn load_experiment_data(dir: &Path) -> Result<ExperimentData> {
    let norming = read_norming(&dir.join(NORMING))?;
    let interacting = read_endpoints(&dir.join(ENDPOINTS_INTERACTING))?;
    let iid = read_endpoints(&dir.join(ENDPOINTS_IID))?;
    let weights_path = dir.join(WEIGHTS);
    let weights = if weights_path.exists() {
        Some(read_weights(&weights_path)?)
    } else {
        None
    };
    Ok(ExperimentData {
        norming,
        interacting,
        iid,
        weights,
    })
}
