use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::lie_so3::{self, Chart};
use crate::registry::Registry;

/// Left-invariant frame of a group written in a three-dimensional chart.
///
/// The frame may depend on the first and last coordinates only; the solver
/// shares stencils along the second axis.
pub trait GroupGeometry: Send + Sync {
    fn name(&self) -> &'static str;

    /// Frame vectors `[X1, X2, X3]` in chart components, or `None` at a chart
    /// singularity.
    fn frame(&self, p: &[f64; 3]) -> Option<[[f64; 3]; 3]>;

    /// Dual coframe `[ω1, ω2, ω3]`.
    fn coframe(&self, p: &[f64; 3]) -> [[f64; 3]; 3];
}

/// SO(3) in the chart `exp(y A3) exp(−x A2) exp(θ A1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct So3Geometry;

impl GroupGeometry for So3Geometry {
    fn name(&self) -> &'static str {
        "so3"
    }

    fn frame(&self, p: &[f64; 3]) -> Option<[[f64; 3]; 3]> {
        lie_so3::frame_at(&Chart::new(p[0], p[1], p[2])).ok().map(|f| f.vectors)
    }

    fn coframe(&self, p: &[f64; 3]) -> [[f64; 3]; 3] {
        lie_so3::coframe_at(&Chart::new(p[0], p[1], p[2]))
    }
}

/// SE(2) on `(X, Y, Θ)`, oriented so that it is the tangent model of the SO(3)
/// chart at the origin: `A1 = cosΘ ∂X − sinΘ ∂Y`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Se2Geometry;

impl GroupGeometry for Se2Geometry {
    fn name(&self) -> &'static str {
        "se2"
    }

    fn frame(&self, p: &[f64; 3]) -> Option<[[f64; 3]; 3]> {
        let (s, c) = p[2].sin_cos();
        Some([[c, -s, 0.0], [0.0, 0.0, 1.0], [s, c, 0.0]])
    }

    fn coframe(&self, p: &[f64; 3]) -> [[f64; 3]; 3] {
        // The frame matrix is orthogonal, so the coframe has the same rows.
        self.frame(p).expect("SE(2) frame is global")
    }
}

/// Geometries selectable by name.
pub fn geometries() -> Registry<dyn GroupGeometry> {
    Registry::<dyn GroupGeometry>::new("group preset")
        .register("so3", || Box::new(So3Geometry))
        .register("se2", || Box::new(Se2Geometry))
}

/// Riemannian tensor `M = Σ λ_i ω_i ω_iᵀ` with `λ = (C²ξ², C², C²ξ²/ε²)` and its
/// inverse `Σ X_i X_iᵀ / λ_i`.
pub fn assemble_metric(geometry: &dyn GroupGeometry, p: &[f64; 3], xi: f64, eps: f64, cost: f64) -> Result<(Matrix3<f64>, Matrix3<f64>)> {
    if !(cost > 0.0) {
        return Err(Error::Config(format!("cost must be positive, got {cost}")));
    }
    let frame = geometry.frame(p).ok_or(Error::ChartSingularity { x: p[0] })?;
    let coframe = geometry.coframe(p);
    let lambda = metric_eigenvalues(xi, eps, cost);
    let mut m = Matrix3::zeros();
    let mut inv = Matrix3::zeros();
    for a in 0..3 {
        let w = Vector3::from(coframe[a]);
        let v = Vector3::from(frame[a]);
        m += lambda[a] * w * w.transpose();
        inv += v * v.transpose() / lambda[a];
    }
    Ok((m, inv))
}

/// Frame-diagonal entries of the metric.
pub fn metric_eigenvalues(xi: f64, eps: f64, cost: f64) -> [f64; 3] {
    let c2 = cost * cost;
    [c2 * xi * xi, c2, c2 * xi * xi / (eps * eps)]
}
