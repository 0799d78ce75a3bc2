//! Executing a configuration and writing its artifacts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::pml::PmlCoefficients;
use crate::scenario::{Simulation, StepperKind};
use crate::snapshot::emit_field_snapshot;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub status: String,
    pub dim: usize,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub dt: f64,
    pub steps: u64,
    pub stepper: String,
    pub config_sha256: String,
    pub coefficient_sha256: BTreeMap<String, String>,
    pub wall_clock_seconds: f64,
    pub files: Vec<FileEntry>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn f64_bytes(v: &[f64]) -> Vec<u8> {
    v.iter().flat_map(|x| x.to_le_bytes()).collect()
}

/// Sampled sigma/kappa arrays, one row per staggered location.
pub fn profile_csv(grid: &Grid, coeffs: &PmlCoefficients) -> String {
    let mut out = String::from("axis,location,index,coord,sigma,kappa\n");
    let mut rows = |axis: &str, loc: &str, s: &[f64], k: &[f64], coord: &dyn Fn(usize) -> f64| {
        for (n, (s, k)) in s.iter().zip(k).enumerate() {
            let _ = writeln!(out, "{axis},{loc},{n},{},{s},{k}", coord(n));
        }
    };
    rows("x", "u", &coeffs.sigma_x_u, &coeffs.kappa_x_u, &|i| {
        grid.cell_x(i)
    });
    rows("x", "v", &coeffs.sigma_x_v, &coeffs.kappa_x_v, &|i| {
        grid.face_x(i)
    });
    if grid.is_2d() {
        rows("y", "u", &coeffs.sigma_y_u, &coeffs.kappa_y_u, &|j| {
            grid.cell_y(j)
        });
        rows("y", "v", &coeffs.sigma_y_v, &coeffs.kappa_y_v, &|j| {
            grid.face_y(j)
        });
    }
    out
}

struct ArtifactWriter {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl ArtifactWriter {
    fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.files.push(FileEntry {
            path: rel.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    fn record_existing(&mut self, rel: &str) -> Result<()> {
        let path = self.dir.join(rel);
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        self.files.push(FileEntry {
            path: rel.to_string(),
            sha256: sha256_hex(&bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }
}

fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<()> {
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

/// Runs a configuration, writing probe CSVs, optional snapshots and the
/// sigma/kappa profile into `out_dir`, with `manifest.json` written first
/// and finalized last.
pub fn run_scenario(config: &ScenarioConfig, out_dir: &Path) -> Result<RunManifest> {
    let started = Instant::now();
    let scenario = config.to_scenario()?;
    let mut sim = Simulation::new(&scenario)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let coefficient_sha256 = sim
        .coeffs
        .arrays()
        .iter()
        .map(|(name, v)| (name.to_string(), sha256_hex(&f64_bytes(v))))
        .collect();
    let mut manifest = RunManifest {
        tool: "pmlwave".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        status: "running".into(),
        dim: sim.grid.dim,
        nx: sim.grid.nx,
        ny: sim.grid.ny,
        dx: sim.grid.dx,
        dy: sim.grid.dy,
        dt: sim.dt,
        steps: sim.total_steps,
        stepper: match sim.stepper {
            StepperKind::Plain => "plain",
            StepperKind::Pml => "pml",
            StepperKind::NonpmlScalar => "nonpml_scalar",
        }
        .into(),
        config_sha256: sha256_hex(config.to_json().as_bytes()),
        coefficient_sha256,
        wall_clock_seconds: 0.0,
        files: Vec::new(),
    };
    write_manifest(out_dir, &manifest)?;

    let mut writer = ArtifactWriter {
        dir: out_dir.to_path_buf(),
        files: Vec::new(),
    };
    writer.write("config.json", config.to_json().as_bytes())?;
    if config.outputs.profile {
        writer.write(
            "profile.csv",
            profile_csv(&sim.grid, &sim.coeffs).as_bytes(),
        )?;
    }

    let stride = config.run.snapshot_stride;
    let format = config.outputs.snapshot_format;
    let mut snapshots = Vec::new();
    let mut snap = |sim: &Simulation| -> Result<()> {
        if stride > 0 && sim.state.step.is_multiple_of(stride) {
            let rel = format!("snapshots/u_{:08}.{}", sim.state.step, format.extension());
            let path = out_dir.join(&rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            emit_field_snapshot(&sim.state, &sim.grid, sim.time(), &path, format)?;
            snapshots.push(rel);
        }
        Ok(())
    };
    snap(&sim)?;
    let result = sim.run_with(&mut snap);
    if let Err(err) = result {
        manifest.status = match &err {
            Error::Instability { step } => format!("unstable at step {step}"),
            other => format!("failed: {other}"),
        };
        manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
        write_manifest(out_dir, &manifest)?;
        return Err(err);
    }
    for rel in &snapshots {
        writer.record_existing(rel)?;
    }
    if config.outputs.probes {
        for p in &sim.probes {
            writer.write(&format!("{}.csv", p.spec.name), p.to_csv().as_bytes())?;
        }
    }

    manifest.status = "complete".into();
    manifest.steps = sim.state.step;
    manifest.files = writer.files;
    manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
    write_manifest(out_dir, &manifest)?;
    Ok(manifest)
}
