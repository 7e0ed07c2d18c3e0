//! The rotation group SO(3) in the chart used throughout the crate.
//!
//! A rotation is written as a product of three one-parameter subgroups
//!
//! ```text
//! R(x, y, θ) = exp(y A3) · exp(−x A2) · exp(θ A1),
//! ```
//!
//! with `x ∈ [−π/2, π/2]` and `y, θ` on the circle. The first column of `R` is the
//! point `n = (cos x cos y, cos x sin y, sin x)` on the unit sphere and `θ`
//! records the orientation of a tangent direction at `n`. The chart degenerates at
//! the poles `x = ±π/2`, where only `y + θ` (or `y − θ`) is determined.
//!
//! Left-invariant vector fields `X1, X2, X3` are obtained by left translation of
//! `−A2, A1, A3`; `X1` moves the spherical point, `X2` spins the orientation.

use nalgebra::{Matrix3, Vector3};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Slack allowed on `|x| ≤ π/2` before a domain error is raised.
const CHART_SLACK: f64 = 1e-12;

/// Orthogonality drift that triggers re-orthonormalization of a product.
const DRIFT_LIMIT: f64 = 1e-10;

/// Reduce an angle to `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Generator `A1`: rotation about `e1`.
pub fn a1() -> Matrix3<f64> {
    Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0)
}

/// Generator `A2`: rotation about `e2`.
pub fn a2() -> Matrix3<f64> {
    Matrix3::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0)
}

/// Generator `A3`: rotation about `e3`.
pub fn a3() -> Matrix3<f64> {
    Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
}

/// Element `a1 A1 + a2 A2 + a3 A3` of the Lie algebra so(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraElement {
    pub coeffs: [f64; 3],
}

impl AlgebraElement {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Self {
        Self { coeffs: [a1, a2, a3] }
    }

    /// Skew-symmetric matrix representative.
    pub fn hat(&self) -> Matrix3<f64> {
        let [c1, c2, c3] = self.coeffs;
        a1() * c1 + a2() * c2 + a3() * c3
    }

    /// Recover the coefficients from a skew-symmetric matrix.
    pub fn vee(m: &Matrix3<f64>) -> Self {
        Self::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
    }

    /// Lie bracket; with this basis it is the cross product of coefficient vectors.
    pub fn bracket(&self, other: &Self) -> Self {
        let u = Vector3::from(self.coeffs);
        let v = Vector3::from(other.coeffs);
        let w = u.cross(&v);
        Self::new(w[0], w[1], w[2])
    }

    /// Matrix exponential via Rodrigues' formula.
    pub fn exp(&self) -> Matrix3<f64> {
        let k = self.hat();
        let angle = Vector3::from(self.coeffs).norm();
        if angle < 1e-12 {
            return Matrix3::identity() + k;
        }
        Matrix3::identity() + k * (angle.sin() / angle) + k * k * ((1.0 - angle.cos()) / (angle * angle))
    }
}

/// Matrix commutator `AB − BA`.
pub fn commutator(a: &Matrix3<f64>, b: &Matrix3<f64>) -> Matrix3<f64> {
    a * b - b * a
}

/// Chart coordinates `(x, y, θ)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Chart {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Chart {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.theta]
    }

    /// Same point with `y` and `θ` reduced to `(−π, π]`.
    pub fn normalized(&self) -> Self {
        Self::new(self.x, wrap_angle(self.y), wrap_angle(self.theta))
    }
}

/// A rotation together with its chart coordinates.
///
/// The matrix is authoritative; near the poles the chart carries a canonical
/// choice `y = 0` and `degenerate` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupPoint {
    pub matrix: Matrix3<f64>,
    pub chart: Chart,
    pub degenerate: bool,
}

impl GroupPoint {
    pub fn identity() -> Self {
        Self { matrix: Matrix3::identity(), chart: Chart::new(0.0, 0.0, 0.0), degenerate: false }
    }

    /// Build from chart coordinates.
    pub fn from_chart(c: Chart) -> Result<Self> {
        rotation_from_angles(c.x, c.y, c.theta)
    }

    /// Build from a rotation matrix, re-orthonormalizing if it has drifted.
    pub fn from_matrix(m: Matrix3<f64>) -> Self {
        let m = if orthogonality_defect(&m) > DRIFT_LIMIT { reorthonormalize(&m) } else { m };
        let (chart, degenerate) = angles_from_rotation(&m);
        Self { matrix: m, chart, degenerate }
    }

    /// Group product `self · other`.
    pub fn compose(&self, other: &GroupPoint) -> GroupPoint {
        GroupPoint::from_matrix(self.matrix * other.matrix)
    }

    pub fn inverse(&self) -> GroupPoint {
        GroupPoint::from_matrix(self.matrix.transpose())
    }

    /// Point `R e1` on the unit sphere.
    pub fn spherical_projection(&self) -> Vector3<f64> {
        self.matrix.column(0).into_owned()
    }
}

/// Largest entry of `MᵀM − I`.
pub fn orthogonality_defect(m: &Matrix3<f64>) -> f64 {
    (m.transpose() * m - Matrix3::identity()).abs().max()
}

/// Closest rotation in the Frobenius sense.
pub fn reorthonormalize(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut r = u * vt;
    if r.determinant() < 0.0 {
        let mut u = u;
        u.column_mut(2).neg_mut();
        r = u * vt;
    }
    r
}

/// The rotation `exp(y A3) exp(−x A2) exp(θ A1)` written out entry by entry.
pub fn rotation_matrix(x: f64, y: f64, theta: f64) -> Matrix3<f64> {
    let (sx, cx) = x.sin_cos();
    let (sy, cy) = y.sin_cos();
    let (st, ct) = theta.sin_cos();
    Matrix3::new(
        cx * cy,
        -sx * cy * st - sy * ct,
        sy * st - sx * cy * ct,
        cx * sy,
        cy * ct - sx * sy * st,
        -cy * st - sx * sy * ct,
        sx,
        cx * st,
        cx * ct,
    )
}

/// Group element with chart `(x, y, θ)`; `x` must lie in `[−π/2, π/2]`.
pub fn rotation_from_angles(x: f64, y: f64, theta: f64) -> Result<GroupPoint> {
    if !(x.abs() <= PI / 2.0 + CHART_SLACK) || !y.is_finite() || !theta.is_finite() {
        return Err(Error::Domain(format!("chart point ({x}, {y}, {theta}) outside x ∈ [−π/2, π/2]")));
    }
    let x = x.clamp(-PI / 2.0, PI / 2.0);
    let matrix = rotation_matrix(x, y, theta);
    let (chart, degenerate) = angles_from_rotation(&matrix);
    Ok(GroupPoint { matrix, chart, degenerate })
}

/// Chart coordinates of a rotation and a flag for the pole configuration.
pub fn angles_from_rotation(r: &Matrix3<f64>) -> (Chart, bool) {
    let rho = r[(0, 0)].hypot(r[(1, 0)]);
    let x = r[(2, 0)].atan2(rho);
    if rho < 1e-12 {
        // At the poles only the sum/difference of y and θ is fixed; keep y = 0.
        let sx = x.signum();
        let theta = (-sx * r[(0, 1)]).atan2(r[(1, 1)]);
        return (Chart::new(x, 0.0, wrap_angle(theta)), true);
    }
    let y = r[(1, 0)].atan2(r[(0, 0)]);
    let theta = r[(2, 1)].atan2(r[(2, 2)]);
    (Chart::new(x, wrap_angle(y), wrap_angle(theta)), false)
}

/// Components of the left-invariant frame over `(∂x, ∂y, ∂θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameCoefficients {
    /// `vectors[i]` holds the chart components of `X_{i+1}`.
    pub vectors: [[f64; 3]; 3],
}

impl FrameCoefficients {
    /// Matrix whose columns are `X1, X2, X3`.
    pub fn as_columns(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[
            Vector3::from(self.vectors[0]),
            Vector3::from(self.vectors[1]),
            Vector3::from(self.vectors[2]),
        ])
    }

    /// Derivatives `X_i W` from the chart gradient of `W`.
    pub fn apply(&self, grad: &[f64; 3]) -> [f64; 3] {
        let d = |v: &[f64; 3]| v[0] * grad[0] + v[1] * grad[1] + v[2] * grad[2];
        [d(&self.vectors[0]), d(&self.vectors[1]), d(&self.vectors[2])]
    }
}

/// Left-invariant frame at a chart point; undefined at the poles.
pub fn frame_at(c: &Chart) -> Result<FrameCoefficients> {
    let cx = c.x.cos();
    if c.x.abs() >= PI / 2.0 || cx.abs() < 1e-14 {
        return Err(Error::ChartSingularity { x: c.x });
    }
    let (st, ct) = c.theta.sin_cos();
    let (sec, tan) = (1.0 / cx, c.x.tan());
    Ok(FrameCoefficients { vectors: [[ct, -sec * st, tan * st], [0.0, 0.0, 1.0], [st, sec * ct, -tan * ct]] })
}

/// Dual coframe `ω1, ω2, ω3` over `(dx, dy, dθ)`; regular everywhere.
pub fn coframe_at(c: &Chart) -> [[f64; 3]; 3] {
    let (sx, cx) = c.x.sin_cos();
    let (st, ct) = c.theta.sin_cos();
    [[ct, -cx * st, 0.0], [0.0, sx, 1.0], [st, cx * ct, 0.0]]
}

/// Unit vector `(cos x cos y, cos x sin y, sin x)`.
pub fn spherical_projection(c: &Chart) -> Vector3<f64> {
    let (sx, cx) = c.x.sin_cos();
    let (sy, cy) = c.y.sin_cos();
    Vector3::new(cx * cy, cx * sy, sx)
}
