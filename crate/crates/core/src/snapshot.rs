//! Field snapshots of `u`.
//!
//! `csv`: a header `# t=<t> nx=<nx> ny=<ny> dx=<dx> dy=<dy>` followed by `ny`
//! rows of `nx` comma-separated values.
//!
//! `raw` (all little-endian):
//!
//! | bytes | content            |
//! |-------|--------------------|
//! | 4     | magic `PMLW`       |
//! | 4     | u32 version = 1    |
//! | 4     | u32 dim            |
//! | 4     | u32 nx             |
//! | 4     | u32 ny             |
//! | 8     | f64 t              |
//! | 8     | f64 dx             |
//! | 8     | f64 dy             |
//! | 8 n   | f64 u, row-major   |

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::grid::Grid;

pub const RAW_MAGIC: &[u8; 4] = b"PMLW";
pub const RAW_VERSION: u32 = 1;
pub const RAW_HEADER_BYTES: usize = 4 + 4 + 4 + 4 + 4 + 8 + 8 + 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotFormat {
    #[default]
    Csv,
    Raw,
}

impl SnapshotFormat {
    pub fn extension(self) -> &'static str {
        match self {
            SnapshotFormat::Csv => "csv",
            SnapshotFormat::Raw => "raw",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub dim: u32,
    pub nx: u32,
    pub ny: u32,
    pub t: f64,
    pub dx: f64,
    pub dy: f64,
    pub u: Vec<f64>,
}

impl Snapshot {
    pub fn of(state: &FieldState, grid: &Grid, t: f64) -> Self {
        Snapshot {
            dim: grid.dim as u32,
            nx: grid.nx as u32,
            ny: grid.ny as u32,
            t,
            dx: grid.dx,
            dy: grid.dy,
            u: state.u.clone(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# t={} nx={} ny={} dx={} dy={}\n",
            self.t, self.nx, self.ny, self.dx, self.dy
        );
        for row in self.u.chunks(self.nx as usize) {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_raw(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(RAW_HEADER_BYTES + 8 * self.u.len());
        out.extend_from_slice(RAW_MAGIC);
        for v in [RAW_VERSION, self.dim, self.nx, self.ny] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in [self.t, self.dx, self.dy] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in &self.u {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_raw(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::InvalidArgument(format!("malformed raw snapshot: {m}"));
        if bytes.len() < RAW_HEADER_BYTES {
            return Err(bad("truncated header"));
        }
        if &bytes[..4] != RAW_MAGIC {
            return Err(bad("bad magic"));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        if u32_at(4) != RAW_VERSION {
            return Err(bad("unsupported version"));
        }
        let (dim, nx, ny) = (u32_at(8), u32_at(12), u32_at(16));
        let n = nx as usize * ny as usize;
        if bytes.len() != RAW_HEADER_BYTES + 8 * n {
            return Err(bad("payload size does not match nx * ny"));
        }
        let u = bytes[RAW_HEADER_BYTES..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Snapshot {
            dim,
            nx,
            ny,
            t: f64_at(20),
            dx: f64_at(28),
            dy: f64_at(36),
            u,
        })
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |m: String| Error::InvalidArgument(format!("malformed csv snapshot: {m}"));
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty".into()))?;
        let mut fields = std::collections::HashMap::new();
        for kv in header.trim_start_matches('#').split_whitespace() {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| bad(format!("bad header item {kv}")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| bad(format!("missing {k}")))
        };
        let parse_f =
            |k: &str| -> Result<f64> { get(k)?.parse().map_err(|_| bad(format!("bad {k}"))) };
        let parse_u =
            |k: &str| -> Result<u32> { get(k)?.parse().map_err(|_| bad(format!("bad {k}"))) };
        let u = lines
            .flat_map(|l| l.split(','))
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("bad value {v}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let (nx, ny) = (parse_u("nx")?, parse_u("ny")?);
        if u.len() != nx as usize * ny as usize {
            return Err(bad("value count does not match nx * ny".into()));
        }
        Ok(Snapshot {
            dim: if ny > 1 { 2 } else { 1 },
            nx,
            ny,
            t: parse_f("t")?,
            dx: parse_f("dx")?,
            dy: parse_f("dy")?,
            u,
        })
    }
}

pub fn emit_field_snapshot(
    state: &FieldState,
    grid: &Grid,
    t: f64,
    path: &Path,
    format: SnapshotFormat,
) -> Result<()> {
    let snap = Snapshot::of(state, grid, t);
    let bytes = match format {
        SnapshotFormat::Csv => snap.to_csv().into_bytes(),
        SnapshotFormat::Raw => snap.to_raw(),
    };
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(RAW_MAGIC) {
        Snapshot::from_raw(&bytes)
    } else {
        let text = String::from_utf8(bytes).map_err(|_| {
            Error::InvalidArgument(format!("{} is neither raw nor text", path.display()))
        })?;
        Snapshot::from_csv(&text)
    }
}
