//! CSV, heatmap and manifest files for a finished comparison.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{ExperimentConfig, ExperimentContext, ExperimentResult};
use crate::error::{Error, Result};
use crate::mdp::write_mdp;
use crate::room::RoomDomain;

/// Pixels per grid cell in the heatmap.
const CELL_PX: usize = 8;

/// `state,row,col,value` with one line per state.
pub fn map_csv(domain: &RoomDomain, values: &[f64]) -> String {
    let mut out = String::from("state,row,col,value\n");
    for (s, v) in values.iter().enumerate() {
        let (r, c) = domain.coords[s];
        out.push_str(&format!("{s},{r},{c},{v:?}\n"));
    }
    out
}

/// Binary PGM of `values` on the grid, `[−max|d|, max|d|]` mapped onto
/// `[0, 255]` so that zero is mid-gray.
pub fn heatmap_pgm(domain: &RoomDomain, values: &[f64]) -> Vec<u8> {
    let n = domain.size;
    let side = n * CELL_PX;
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut out = format!("P5\n{side} {side}\n255\n").into_bytes();
    let mut pixels = vec![0u8; side * side];
    for (s, v) in values.iter().enumerate() {
        let (r, c) = domain.coords[s];
        let scaled = if peak > 0.0 { v / peak } else { 0.0 };
        let gray = (127.5 + 127.5 * scaled).round().clamp(0.0, 255.0) as u8;
        for y in (r - 1) * CELL_PX..r * CELL_PX {
            pixels[y * side + (c - 1) * CELL_PX..y * side + c * CELL_PX].fill(gray);
        }
    }
    out.extend_from_slice(&pixels);
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub crate_version: &'static str,
    pub config: ExperimentConfig,
    pub seed: u64,
    /// SHA-256 of the configuration and both MDP files.
    pub input_hash: String,
    pub trials_used_a: usize,
    pub trials_used_b: usize,
    pub redraws_a: u64,
    pub redraws_b: u64,
    pub files: Vec<String>,
}

fn input_hash(cfg: &ExperimentConfig, ctx: &ExperimentContext) -> String {
    let mut h = Sha256::new();
    h.update(cfg.to_json().as_bytes());
    for data in [&ctx.free, &ctx.stable] {
        h.update(write_mdp(&data.domain.mdp).as_bytes());
    }
    hex::encode(h.finalize())
}

fn write(path: PathBuf, bytes: &[u8]) -> Result<PathBuf> {
    fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes `error_A.csv`, `error_B.csv`, `diff.csv`, `diff.pgm` and
/// `manifest.json` into `out_dir`, creating it if needed.
pub fn emit_outputs(result: &ExperimentResult, ctx: &ExperimentContext, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let domain = &ctx.variant(result.config.side_b.variant).domain;
    let mut files = vec![
        write(out_dir.join("error_A.csv"), map_csv(domain, &result.map_a.mean_abs_error).as_bytes())?,
        write(out_dir.join("error_B.csv"), map_csv(domain, &result.map_b.mean_abs_error).as_bytes())?,
        write(out_dir.join("diff.csv"), map_csv(domain, &result.diff).as_bytes())?,
        write(out_dir.join("diff.pgm"), &heatmap_pgm(domain, &result.diff))?,
    ];
    let manifest = Manifest {
        crate_version: env!("CARGO_PKG_VERSION"),
        config: result.config.clone(),
        seed: result.config.seed,
        input_hash: input_hash(&result.config, ctx),
        trials_used_a: result.map_a.trials_used,
        trials_used_b: result.map_b.trials_used,
        redraws_a: result.redraws_a,
        redraws_b: result.redraws_b,
        files: files
            .iter()
            .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
            .collect(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    files.push(write(out_dir.join("manifest.json"), json.as_bytes())?);
    Ok(files)
}
