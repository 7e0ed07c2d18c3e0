//! Selling's obtuse superbase reduction for 3×3 positive definite matrices.
//!
//! The result writes `D = Σ ρ_k e_k e_kᵀ` with `ρ_k ≥ 0` and six integer offsets
//! `e_k`, which is the stencil of a monotone finite-difference scheme.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Weight and integer offset of one stencil term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SellingTerm {
    pub weight: f64,
    pub offset: [i32; 3],
}

const MAX_ITER: usize = 100_000;

/// Decompose a symmetric positive definite matrix.
///
/// Terms with zero weight are kept so that the output always has six entries.
pub fn selling_decomposition(d: &Matrix3<f64>) -> Result<[SellingTerm; 6]> {
    let scale = d.abs().max();
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Numeric("Selling decomposition of a degenerate matrix".into()));
    }
    let e = |v: [i64; 3]| Vector3::new(v[0] as f64, v[1] as f64, v[2] as f64);
    let mut b: [[i64; 3]; 4] = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]];
    let tol = 1e-14 * scale;
    let mut iter = 0;
    'outer: loop {
        for i in 0..4 {
            for j in (i + 1)..4 {
                let s = e(b[i]).dot(&(d * e(b[j])));
                if s > tol {
                    let (k, l) = others(i, j);
                    for a in 0..3 {
                        b[k][a] += b[i][a];
                        b[l][a] += b[i][a];
                        b[i][a] = -b[i][a];
                    }
                    iter += 1;
                    if iter > MAX_ITER {
                        return Err(Error::Numeric("Selling reduction did not terminate".into()));
                    }
                    continue 'outer;
                }
            }
        }
        break;
    }
    let mut out = [SellingTerm { weight: 0.0, offset: [0; 3] }; 6];
    let mut n = 0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            let (k, l) = others(i, j);
            let w = -e(b[i]).dot(&(d * e(b[j])));
            let (p, q) = (b[k], b[l]);
            let cross = [p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]];
            out[n] = SellingTerm { weight: w.max(0.0), offset: [cross[0] as i32, cross[1] as i32, cross[2] as i32] };
            n += 1;
        }
    }
    Ok(out)
}

fn others(i: usize, j: usize) -> (usize, usize) {
    let mut rest = (0..4).filter(|&m| m != i && m != j);
    (rest.next().unwrap(), rest.next().unwrap())
}

/// `Σ ρ e eᵀ` of a stencil, for checks.
pub fn reconstruct(terms: &[SellingTerm]) -> Matrix3<f64> {
    terms.iter().fold(Matrix3::zeros(), |acc, t| {
        let v = Vector3::new(t.offset[0] as f64, t.offset[1] as f64, t.offset[2] as f64);
        acc + t.weight * v * v.transpose()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_uses_axis_offsets() {
        let terms = selling_decomposition(&Matrix3::identity()).unwrap();
        assert!((reconstruct(&terms) - Matrix3::identity()).abs().max() < 1e-15);
        let used: Vec<_> = terms.iter().filter(|t| t.weight > 0.0).map(|t| t.offset).collect();
        assert_eq!(used.len(), 3);
    }

    #[test]
    fn reconstructs_anisotropic_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let q = nalgebra::Rotation3::from_euler_angles(rng.gen_range(-3.0..3.0), rng.gen_range(-1.5..1.5), rng.gen_range(-3.0..3.0));
            let diag = Matrix3::from_diagonal(&Vector3::new(1.0, rng.gen_range(0.01..1.0), rng.gen_range(1e-3..1.0)));
            let d = q.matrix() * diag * q.matrix().transpose();
            let terms = selling_decomposition(&d).unwrap();
            assert!(terms.iter().all(|t| t.weight >= 0.0));
            assert!((reconstruct(&terms) - d).abs().max() < 1e-10);
        }
    }
}
