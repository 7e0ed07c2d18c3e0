use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Regular grid centred at the origin of the chart.
///
/// Node `(i, j, k)` sits at `((i − (Nx−1)/2) Δx, (j − (Ny−1)/2) Δy, (k − (Nθ−1)/2) Δθ)`.
/// The last axis is always a full period; the second one is periodic when it
/// spans `2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid3D {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub periodic: [bool; 3],
}

impl Grid3D {
    /// Whole group: `x ∈ [−π/2, π/2]` with the pole rows included, `y` and `θ` periodic.
    pub fn so3_full(nx: usize, ny: usize, nt: usize) -> Result<Self> {
        Self::check_dims(nx, ny, nt)?;
        Ok(Self { dims: [nx, ny, nt], spacing: [PI / (nx - 1) as f64, 2.0 * PI / ny as f64, 2.0 * PI / nt as f64], periodic: [false, true, true] })
    }

    /// Window `|x| ≤ x_half`, `|y| ≤ y_half` of the first two axes, full circle in `θ`.
    pub fn window(nx: usize, ny: usize, nt: usize, x_half: f64, y_half: f64) -> Result<Self> {
        Self::check_dims(nx, ny, nt)?;
        if !(x_half > 0.0 && y_half > 0.0) {
            return Err(Error::Config(format!("window half-widths must be positive ({x_half}, {y_half})")));
        }
        Ok(Self {
            dims: [nx, ny, nt],
            spacing: [2.0 * x_half / (nx - 1) as f64, 2.0 * y_half / (ny - 1) as f64, 2.0 * PI / nt as f64],
            periodic: [false, false, true],
        })
    }

    /// Rebuild from dimensions and spacings as stored in a grid file.
    pub fn from_parts(dims: [usize; 3], spacing: [f64; 3]) -> Result<Self> {
        Self::check_dims(dims[0], dims[1], dims[2])?;
        let per = |n: usize, d: f64| ((n as f64) * d - 2.0 * PI).abs() < 1e-9;
        if !per(dims[2], spacing[2]) {
            return Err(Error::Format("third axis must cover a full period".into()));
        }
        Ok(Self { dims, spacing, periodic: [false, per(dims[1], spacing[1]), true] })
    }

    fn check_dims(nx: usize, ny: usize, nt: usize) -> Result<()> {
        if nx < 3 || ny < 3 || nt < 3 || nx % 2 == 0 || ny % 2 == 0 || nt % 2 == 0 {
            return Err(Error::Config(format!("grid dimensions must be odd and ≥ 3 (got {nx}×{ny}×{nt})")));
        }
        if nx > u16::MAX as usize || ny > u16::MAX as usize || nt > u16::MAX as usize {
            return Err(Error::Config("grid dimension too large".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Linear index with `x` fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> (usize, usize, usize) {
        let i = idx % self.dims[0];
        let r = idx / self.dims[0];
        (i, r % self.dims[1], r / self.dims[1])
    }

    /// Chart coordinate of index `n` along `axis`.
    #[inline]
    pub fn coord(&self, axis: usize, n: f64) -> f64 {
        (n - 0.5 * (self.dims[axis] - 1) as f64) * self.spacing[axis]
    }

    pub fn point(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [self.coord(0, i as f64), self.coord(1, j as f64), self.coord(2, k as f64)]
    }

    /// Fractional index of a chart coordinate; periodic axes are wrapped into range.
    pub fn fractional(&self, axis: usize, v: f64) -> f64 {
        let n = self.dims[axis] as f64;
        let u = v / self.spacing[axis] + 0.5 * (n - 1.0);
        if self.periodic[axis] {
            u.rem_euclid(n)
        } else {
            u
        }
    }

    /// Neighbour index along `axis`, wrapping periodic axes; `None` outside.
    #[inline]
    pub fn shift(&self, axis: usize, n: usize, by: i32) -> Option<usize> {
        let m = self.dims[axis] as i64;
        let v = n as i64 + by as i64;
        if self.periodic[axis] {
            Some(v.rem_euclid(m) as usize)
        } else if (0..m).contains(&v) {
            Some(v as usize)
        } else {
            None
        }
    }

    /// Nearest node to a chart point, if inside the grid.
    pub fn nearest(&self, p: &[f64; 3]) -> Option<(usize, usize, usize)> {
        let mut out = [0usize; 3];
        for a in 0..3 {
            let u = self.fractional(a, p[a]).round();
            let n = self.dims[a] as f64;
            let u = if self.periodic[a] { u.rem_euclid(n) } else { u };
            if !(0.0..n).contains(&u) {
                return None;
            }
            out[a] = u as usize;
        }
        Some((out[0], out[1], out[2]))
    }

    /// Half-widths covered by the first two axes.
    pub fn half_extent(&self) -> [f64; 2] {
        [0.5 * (self.dims[0] - 1) as f64 * self.spacing[0], 0.5 * (self.dims[1] - 1) as f64 * self.spacing[1]]
    }

    /// Smallest spacing.
    pub fn min_spacing(&self) -> f64 {
        self.spacing.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn so3_grid_is_centred_and_symmetric() {
        let g = Grid3D::so3_full(11, 21, 21).unwrap();
        assert_eq!(g.point(5, 10, 10), [0.0, 0.0, 0.0]);
        assert!((g.coord(0, 0.0) + PI / 2.0).abs() < 1e-15);
        assert!((g.coord(1, 0.0) + g.coord(1, 20.0)).abs() < 1e-15);
        assert_eq!(g.shift(1, 0, -1), Some(20));
        assert_eq!(g.shift(0, 0, -1), None);
        assert!(Grid3D::so3_full(10, 21, 21).is_err());
    }

    #[test]
    fn index_round_trip() {
        let g = Grid3D::window(5, 7, 9, 0.5, 0.5).unwrap();
        for idx in [0, 17, 100, g.len() - 1] {
            let (i, j, k) = g.unravel(idx);
            assert_eq!(g.index(i, j, k), idx);
        }
        assert_eq!(g.nearest(&[0.01, -0.01, 0.0]), Some((2, 3, 4)));
        assert_eq!(g.nearest(&[2.0, 0.0, 0.0]), None);
        let back = Grid3D::from_parts(g.dims, g.spacing).unwrap();
        assert_eq!(back, g);
    }
}
