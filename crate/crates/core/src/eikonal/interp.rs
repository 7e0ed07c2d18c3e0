use super::DistanceGrid;
use crate::error::{Error, Result};

/// Interpolated value function at a chart point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WSample {
    pub w: f64,
    /// `(∂x W, ∂y W, ∂θ W)`.
    pub grad: [f64; 3],
    /// `(X1 W, X2 W, X3 W)`.
    pub frame: [f64; 3],
    /// Stencil touched the `x` border or fell back to trilinear.
    pub flagged: bool,
}

/// Catmull–Rom weights and their derivatives at `t ∈ [0, 1]` for nodes −1..=2.
fn catmull_rom(t: f64) -> ([f64; 4], [f64; 4]) {
    let (t2, t3) = (t * t, t * t * t);
    (
        [0.5 * (-t3 + 2.0 * t2 - t), 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0), 0.5 * (-3.0 * t3 + 4.0 * t2 + t), 0.5 * (t3 - t2)],
        [0.5 * (-3.0 * t2 + 4.0 * t - 1.0), 0.5 * (9.0 * t2 - 10.0 * t), 0.5 * (-9.0 * t2 + 8.0 * t + 1.0), 0.5 * (3.0 * t2 - 2.0 * t)],
    )
}

/// Tricubic Hermite interpolation of `W` with Catmull–Rom tangents, and its frame
/// derivatives. Falls back to trilinear when a cubic stencil meets an
/// unreached node.
pub fn sample_w(dist: &DistanceGrid, p: &[f64; 3]) -> Result<WSample> {
    let g = &dist.grid;
    let mut base = [0i64; 3];
    let mut frac = [0.0; 3];
    let mut flagged = false;
    for a in 0..3 {
        let u = g.fractional(a, p[a]);
        let hi = (g.dims[a] - 1) as f64;
        if !g.periodic[a] && !(-1e-9..=hi + 1e-9).contains(&u) {
            return Err(Error::OutOfView { x: p[0], y: p[1] });
        }
        let u = if g.periodic[a] { u } else { u.clamp(0.0, hi) };
        let b = (u.floor() as i64).min(if g.periodic[a] { i64::MAX } else { g.dims[a] as i64 - 2 });
        base[a] = b;
        frac[a] = u - b as f64;
        if !g.periodic[a] && (b < 1 || b + 2 > g.dims[a] as i64 - 1) {
            flagged = true;
        }
    }
    let idx = |a: usize, off: i64| -> usize {
        let n = g.dims[a] as i64;
        let v = base[a] + off;
        if g.periodic[a] {
            v.rem_euclid(n) as usize
        } else {
            v.clamp(0, n - 1) as usize
        }
    };
    let ids: [[usize; 4]; 3] = std::array::from_fn(|a| std::array::from_fn(|o| idx(a, o as i64 - 1)));

    let (wx, dx) = catmull_rom(frac[0]);
    let (wy, dy) = catmull_rom(frac[1]);
    let (wt, dt) = catmull_rom(frac[2]);
    let mut val = 0.0;
    let mut grad = [0.0; 3];
    let mut finite = true;
    'cubic: for c in 0..4 {
        for b in 0..4 {
            for a in 0..4 {
                let v = dist.w[g.index(ids[0][a], ids[1][b], ids[2][c])];
                if !v.is_finite() {
                    finite = false;
                    break 'cubic;
                }
                val += wx[a] * wy[b] * wt[c] * v;
                grad[0] += dx[a] * wy[b] * wt[c] * v;
                grad[1] += wx[a] * dy[b] * wt[c] * v;
                grad[2] += wx[a] * wy[b] * dt[c] * v;
            }
        }
    }
    if !finite {
        flagged = true;
        let (lx, ly, lt) = ([1.0 - frac[0], frac[0]], [1.0 - frac[1], frac[1]], [1.0 - frac[2], frac[2]]);
        let (sx, sy, st) = ([-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]);
        val = 0.0;
        grad = [0.0; 3];
        for c in 0..2 {
            for b in 0..2 {
                for a in 0..2 {
                    let v = dist.w[g.index(ids[0][a + 1], ids[1][b + 1], ids[2][c + 1])];
                    if !v.is_finite() {
                        return Err(Error::Unreachable);
                    }
                    val += lx[a] * ly[b] * lt[c] * v;
                    grad[0] += sx[a] * ly[b] * lt[c] * v;
                    grad[1] += lx[a] * sy[b] * lt[c] * v;
                    grad[2] += lx[a] * ly[b] * st[c] * v;
                }
            }
        }
    }
    for a in 0..3 {
        grad[a] /= g.spacing[a];
    }
    let frame_vecs = dist.spec.preset.frame(p).ok_or(Error::ChartSingularity { x: p[0] })?;
    let frame = std::array::from_fn(|i| (0..3).map(|a| frame_vecs[i][a] * grad[a]).sum());
    Ok(WSample { w: val, grad, frame, flagged })
}
