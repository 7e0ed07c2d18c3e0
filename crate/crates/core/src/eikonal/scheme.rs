//! Finite-difference stencils of the discretized Hamiltonians.

use nalgebra::{Matrix3, Vector3};

use super::geometry::GroupGeometry;
use super::selling::selling_decomposition;
use crate::error::{Error, Result};
use crate::registry::Registry;

/// One term `ρ · max(0, u(x) − u(x − e))²`; symmetric terms use the smaller of
/// the two neighbours `x ± e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilTerm {
    pub offset: [i32; 3],
    pub weight: f64,
    pub symmetric: bool,
}

/// Discretization of `H(x, ∇W) = 1` at unit cost; a cost `C` divides every weight by `C²`.
pub trait EikonalScheme: Send + Sync {
    fn name(&self) -> &'static str;

    /// Stencil in index units at a regular chart point.
    fn stencil(&self, geometry: &dyn GroupGeometry, p: &[f64; 3], spacing: &[f64; 3], xi: f64, eps: f64) -> Result<Vec<StencilTerm>>;

    /// Whether motion against `X1` is forbidden.
    fn forward_only(&self) -> bool {
        false
    }
}

/// Symmetric scheme for the Riemannian metric with dual `Σ X_i X_iᵀ / λ_i`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RiemannianScheme;

/// `max(0, X1 W)` in place of `X1 W`: the dual tensor is split into a one-sided
/// part carrying `X1` and a symmetric part along `X2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CusplessScheme;

fn to_index_units(d: Matrix3<f64>, spacing: &[f64; 3]) -> Matrix3<f64> {
    let s = Matrix3::from_diagonal(&Vector3::new(1.0 / spacing[0], 1.0 / spacing[1], 1.0 / spacing[2]));
    s * d * s
}

fn outer(v: [f64; 3]) -> Matrix3<f64> {
    let v = Vector3::from(v);
    v * v.transpose()
}

impl EikonalScheme for RiemannianScheme {
    fn name(&self) -> &'static str {
        "riemannian"
    }

    fn stencil(&self, geometry: &dyn GroupGeometry, p: &[f64; 3], spacing: &[f64; 3], xi: f64, eps: f64) -> Result<Vec<StencilTerm>> {
        let f = geometry.frame(p).ok_or(Error::ChartSingularity { x: p[0] })?;
        let d = outer(f[0]) / (xi * xi) + outer(f[1]) + outer(f[2]) * (eps * eps / (xi * xi));
        let terms = selling_decomposition(&to_index_units(d, spacing))?;
        Ok(terms.iter().filter(|t| t.weight > 0.0).map(|t| StencilTerm { offset: t.offset, weight: t.weight, symmetric: true }).collect())
    }
}

impl EikonalScheme for CusplessScheme {
    fn name(&self) -> &'static str {
        "cuspless"
    }

    fn stencil(&self, geometry: &dyn GroupGeometry, p: &[f64; 3], spacing: &[f64; 3], xi: f64, eps: f64) -> Result<Vec<StencilTerm>> {
        let f = geometry.frame(p).ok_or(Error::ChartSingularity { x: p[0] })?;
        let w1 = geometry.coframe(p)[0];
        let e2 = eps * eps;
        let forward = (outer(f[0]) + outer(f[2]) * e2) / (xi * xi) + outer(f[1]) * e2;
        let mut out = Vec::with_capacity(7);
        for t in selling_decomposition(&to_index_units(forward, spacing))? {
            if t.weight <= 0.0 {
                continue;
            }
            // Orient each offset along +X1.
            let along: f64 = (0..3).map(|a| w1[a] * t.offset[a] as f64 * spacing[a]).sum();
            let offset = if along < 0.0 { t.offset.map(|c| -c) } else { t.offset };
            out.push(StencilTerm { offset, weight: t.weight, symmetric: false });
        }
        // X2 = ∂θ in both presets, so the remaining part is a single axis term.
        if (f[1][0], f[1][1]) != (0.0, 0.0) {
            return Err(Error::Numeric("cuspless scheme expects X2 along the angular axis".into()));
        }
        let axial = (1.0 - e2) * f[1][2] * f[1][2] / (spacing[2] * spacing[2]);
        if axial > 0.0 {
            out.push(StencilTerm { offset: [0, 0, 1], weight: axial, symmetric: true });
        }
        Ok(out)
    }

    fn forward_only(&self) -> bool {
        true
    }
}

/// Schemes selectable by name.
pub fn schemes() -> Registry<dyn EikonalScheme> {
    Registry::<dyn EikonalScheme>::new("eikonal scheme")
        .register("riemannian", || Box::new(RiemannianScheme))
        .register("cuspless", || Box::new(CusplessScheme))
}

/// Quadratic form `Σ ρ max(0, ⟨p, e⟩)²` (one-sided) or `Σ ρ ⟨p, e⟩²` (symmetric)
/// of a stencil applied to an index-unit gradient.
pub fn stencil_hamiltonian(terms: &[StencilTerm], p: &[f64; 3]) -> f64 {
    terms
        .iter()
        .map(|t| {
            let s: f64 = (0..3).map(|a| p[a] * t.offset[a] as f64).sum();
            let s = if t.symmetric { s.abs() } else { s.max(0.0) };
            t.weight * s * s
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eikonal::geometry::{Se2Geometry, So3Geometry};

    #[test]
    fn riemannian_stencil_reproduces_dual_metric() {
        let spacing = [0.03, 0.031, 0.032];
        let p = [0.3, 0.5, 1.1];
        let (xi, eps) = (1.5, 0.1);
        let terms = RiemannianScheme.stencil(&So3Geometry, &p, &spacing, xi, eps).unwrap();
        // Gradient with frame derivatives (a, b, c): H = a²/ξ² + b² + ε²c²/ξ².
        let w = So3Geometry.coframe(&p);
        let (a, b, c) = (0.7, -0.2, 0.4);
        let grad: [f64; 3] = std::array::from_fn(|k| a * w[0][k] + b * w[1][k] + c * w[2][k]);
        let idx = [grad[0] * spacing[0], grad[1] * spacing[1], grad[2] * spacing[2]];
        let h = stencil_hamiltonian(&terms, &idx);
        assert!((h - (a * a / (xi * xi) + b * b + eps * eps * c * c / (xi * xi))).abs() < 1e-10);
    }

    #[test]
    fn cuspless_hamiltonian_cuts_backward_gradients() {
        let spacing = [0.05, 0.05, 0.05];
        let p = [0.0, 0.0, 0.4];
        let terms = CusplessScheme.stencil(&Se2Geometry, &p, &spacing, 1.0, 0.1).unwrap();
        let w = Se2Geometry.coframe(&p);
        let g = |a: f64, b: f64| -> [f64; 3] { std::array::from_fn(|k| (a * w[0][k] + b * w[1][k]) * spacing[k]) };
        // Forward gradient: the full X1 term survives.
        assert!((stencil_hamiltonian(&terms, &g(1.0, 0.0)) - 1.0).abs() < 1e-10);
        // Backward gradient: only the angular part remains, up to O(ε²).
        assert!(stencil_hamiltonian(&terms, &g(-1.0, 0.0)) < 1e-10);
        assert!((stencil_hamiltonian(&terms, &g(-1.0, 0.5)) - 0.25).abs() < 0.01);
    }
}
