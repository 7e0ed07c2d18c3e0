//! Little-endian grid files: a fixed header, then values with `x` fastest.
//!
//! ```text
//! "SRFM" | version u32 | preset u8 | Nx Ny Nθ u32 | Δx Δy Δθ f64 | ξ f64 | ε f64 | values f64…
//! ```
//!
//! A cost map uses the same layout with `Nθ = 0`. Each file has a JSON sidecar
//! at `<path>.json`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Cost2D, CostField, DistanceGrid, Grid3D, MetricSpec, NodeState, Preset, Problem};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"SRFM";
const VERSION: u32 = 1;

/// Sidecar metadata of a grid file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMetadata {
    pub kind: String,
    pub preset: Preset,
    pub dims: Vec<usize>,
    pub spacing: Vec<f64>,
    pub xi: f64,
    pub eps: f64,
    #[serde(default)]
    pub scheme: Option<String>,
    #[serde(default)]
    pub seed: Option<[f64; 3]>,
    /// Cost map the distance was computed with, relative to this file.
    #[serde(default)]
    pub cost_file: Option<String>,
    #[serde(default)]
    pub uniform_cost: Option<f64>,
    #[serde(default)]
    pub accepted: Option<usize>,
    #[serde(default)]
    pub w_max: Option<f64>,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

struct Header {
    preset: Preset,
    dims: [usize; 3],
    spacing: [f64; 3],
    xi: f64,
    eps: f64,
}

fn write_header(out: &mut impl Write, h: &Header) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&[h.preset.code()])?;
    for d in h.dims {
        out.write_all(&(d as u32).to_le_bytes())?;
    }
    for v in [h.spacing[0], h.spacing[1], h.spacing[2], h.xi, h.eps] {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_header(inp: &mut impl Read) -> Result<Header> {
    let mut magic = [0u8; 4];
    inp.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("not an SRFM grid file".into()));
    }
    let mut b4 = [0u8; 4];
    inp.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported grid version {version}")));
    }
    let mut b1 = [0u8; 1];
    inp.read_exact(&mut b1)?;
    let preset = Preset::from_code(b1[0])?;
    let mut dims = [0usize; 3];
    for d in &mut dims {
        inp.read_exact(&mut b4)?;
        *d = u32::from_le_bytes(b4) as usize;
    }
    let mut f = [0.0; 5];
    let mut b8 = [0u8; 8];
    for v in &mut f {
        inp.read_exact(&mut b8)?;
        *v = f64::from_le_bytes(b8);
    }
    Ok(Header { preset, dims, spacing: [f[0], f[1], f[2]], xi: f[3], eps: f[4] })
}

fn write_values(out: &mut impl Write, values: &[f64]) -> Result<()> {
    for v in values {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_values(inp: &mut impl Read, n: usize) -> Result<Vec<f64>> {
    let mut bytes = vec![0u8; n * 8];
    inp.read_exact(&mut bytes).map_err(|_| Error::Format(format!("grid file truncated (expected {n} values)")))?;
    let mut rest = Vec::new();
    inp.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::Format("trailing bytes after grid values".into()));
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

/// Write a distance map and its sidecar; `cost_file` names the cost map used.
pub fn write_distance_grid(path: &Path, d: &DistanceGrid, cost_file: Option<&str>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_header(&mut out, &Header { preset: d.spec.preset, dims: d.grid.dims, spacing: d.grid.spacing, xi: d.spec.xi, eps: d.spec.eps })?;
    // Tentative values on the front are not distances yet.
    let w: Vec<f64> = d.w.iter().zip(&d.state).map(|(&w, s)| if *s == NodeState::Accepted { w } else { f64::INFINITY }).collect();
    write_values(&mut out, &w)?;
    out.flush()?;
    let uniform = d.cost.first().copied().filter(|c| d.cost.iter().all(|v| v == c));
    let meta = GridMetadata {
        kind: "distance".into(),
        preset: d.spec.preset,
        dims: d.grid.dims.to_vec(),
        spacing: d.grid.spacing.to_vec(),
        xi: d.spec.xi,
        eps: d.spec.eps,
        scheme: Some(d.spec.scheme.clone()),
        seed: Some(d.seed),
        cost_file: cost_file.map(str::to_owned),
        uniform_cost: if cost_file.is_none() { uniform } else { None },
        accepted: Some(d.accepted()),
        w_max: w.iter().cloned().filter(|v| v.is_finite()).reduce(f64::max),
    };
    std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

/// Read a distance map; the sidecar, when present, restores the scheme, seed and cost.
pub fn read_distance_grid(path: &Path) -> Result<DistanceGrid> {
    let mut inp = BufReader::new(File::open(path)?);
    let h = read_header(&mut inp)?;
    if h.dims[2] == 0 {
        return Err(Error::Format("file holds a cost map, not a distance map".into()));
    }
    let grid = Grid3D::from_parts(h.dims, h.spacing)?;
    let w = read_values(&mut inp, grid.len())?;
    let meta: Option<GridMetadata> = match std::fs::read_to_string(sidecar_path(path)) {
        Ok(s) => Some(serde_json::from_str(&s)?),
        Err(_) => None,
    };
    let mut spec = MetricSpec::new(h.preset, h.xi, h.eps);
    let mut seed = [0.0; 3];
    let mut cost = CostField::Uniform(1.0);
    if let Some(m) = &meta {
        if let Some(s) = &m.scheme {
            spec.scheme = s.clone();
        }
        seed = m.seed.unwrap_or(seed);
        if let Some(f) = &m.cost_file {
            let p = path.parent().map(|d| d.join(f)).unwrap_or_else(|| PathBuf::from(f));
            let p = if p.exists() { p } else { PathBuf::from(f) };
            cost = CostField::Grid(Arc::new(read_cost_grid(&p)?.1));
        } else if let Some(c) = m.uniform_cost {
            cost = CostField::Uniform(c);
        }
    }
    let problem = Problem::new(grid, spec.clone(), seed).with_cost(cost);
    let state = (0..grid.len())
        .map(|n| {
            let (i, _, _) = grid.unravel(n);
            if problem.excluded_row(i) {
                NodeState::Excluded
            } else if w[n].is_finite() {
                NodeState::Accepted
            } else {
                NodeState::Far
            }
        })
        .collect();
    Ok(DistanceGrid { grid, spec, w, state, seed, cost: problem.node_costs()? })
}

/// Write a cost map in the 2D variant of the grid format.
pub fn write_cost_grid(path: &Path, preset: Preset, cost: &Cost2D, xi: f64) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_header(&mut out, &Header { preset, dims: [cost.dims[0], cost.dims[1], 0], spacing: [cost.spacing[0], cost.spacing[1], 0.0], xi, eps: 0.0 })?;
    write_values(&mut out, &cost.values)?;
    out.flush()?;
    let meta = GridMetadata {
        kind: "cost".into(),
        preset,
        dims: cost.dims.to_vec(),
        spacing: cost.spacing.to_vec(),
        xi,
        eps: 0.0,
        scheme: None,
        seed: None,
        cost_file: None,
        uniform_cost: None,
        accepted: None,
        w_max: Some(cost.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
    };
    std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

pub fn read_cost_grid(path: &Path) -> Result<(Preset, Cost2D)> {
    let mut inp = BufReader::new(File::open(path)?);
    let h = read_header(&mut inp)?;
    if h.dims[2] != 0 {
        return Err(Error::Format("file holds a distance map, not a cost map".into()));
    }
    let values = read_values(&mut inp, h.dims[0] * h.dims[1])?;
    let c = Cost2D::new([h.dims[0], h.dims[1]], [h.spacing[0], h.spacing[1]], values).map_err(|e| Error::Format(e.to_string()))?;
    Ok((h.preset, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_fixed() {
        let mut buf = Vec::new();
        write_header(&mut buf, &Header { preset: Preset::Se2, dims: [3, 5, 7], spacing: [0.1, 0.2, 0.3], xi: 1.5, eps: 0.1 }).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 1 + 12 + 40);
        assert_eq!(&buf[..4], b"SRFM");
        assert_eq!(buf[8], 1);
        let h = read_header(&mut buf.as_slice()).unwrap();
        assert_eq!((h.dims, h.spacing, h.xi, h.eps), ([3, 5, 7], [0.1, 0.2, 0.3], 1.5, 0.1));
        assert!(read_header(&mut &b"XXXX\x01\0\0\0"[..]).is_err());
    }
}
