//! Sub-Riemannian geodesics on SO(3) with the metric `ξ² ω1² + ω2²` on the
//! distribution spanned by `X1, X2`.
//!
//! Normal extremals are governed by the momentum `h = (h1, h2, h3)` with
//!
//! ```text
//! ḣ1 = −h2 h3,   ḣ2 = h1 h3 / ξ²,   ḣ3 = (1 − 1/ξ²) h1 h2,
//! ```
//!
//! controls `u1 = h1/ξ²`, `u2 = h2`, the Hamiltonian `H = (h1²/ξ² + h2²)/2` (equal
//! to `1/2` for arclength-parametrized curves) and the Casimir `M² = h1² + h2² + h3²`.
//!
//! Two parametrizations are provided: sub-Riemannian arclength `t`, which passes
//! through cusps, and spherical arclength `s` of the projected curve, valid up to
//! the first cusp.

mod closed_form;
pub mod elliptic;
mod flow;
mod reparam;
mod solver;
mod vertical;
mod wavefront;

pub use closed_form::{closed_form_s_ytilde, geodesic_closed_form_s, geodesic_closed_form_t, ClosedFormS, ClosedFormT, YPrefactor};
pub use flow::{flow_endpoint, hamiltonian_flow_t, pendulum_flow};
pub use reparam::{reparametrize, sr_time_at_s};
pub use solver::{geodesic_solvers, ClosedFormSolver, GeodesicSolver, OdeSolver};
pub use vertical::{cusp_time_smax, vertical_solution_s, ChiParam};
pub use wavefront::{wavefront_sample, WavefrontConfig};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::lie_so3::GroupPoint;

/// Covector components over the left-invariant coframe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Momentum {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
}

impl Momentum {
    pub fn new(h1: f64, h2: f64, h3: f64) -> Self {
        Self { h1, h2, h3 }
    }

    /// Momentum on the level `H = 1/2` with `h1 ≥ 0` and given `h2, h3`.
    pub fn from_h2_h3(h2: f64, h3: f64, xi: f64) -> Self {
        Self::new(xi * (1.0 - h2 * h2).max(0.0).sqrt(), h2, h3)
    }

    pub fn hamiltonian(&self, xi: f64) -> f64 {
        0.5 * (self.h1 * self.h1 / (xi * xi) + self.h2 * self.h2)
    }

    /// Casimir `M = |h|`.
    pub fn casimir(&self) -> f64 {
        (self.h1 * self.h1 + self.h2 * self.h2 + self.h3 * self.h3).sqrt()
    }

    /// Controls `(u1, u2) = (h1/ξ², h2)`.
    pub fn controls(&self, xi: f64) -> (f64, f64) {
        (self.h1 / (xi * xi), self.h2)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.h1, self.h2, self.h3]
    }

    /// Time derivative under the vertical Hamiltonian flow.
    pub fn vertical_rate(&self, xi: f64) -> [f64; 3] {
        let x2 = xi * xi;
        [-self.h2 * self.h3, self.h1 * self.h3 / x2, (1.0 - 1.0 / x2) * self.h1 * self.h2]
    }
}

/// Pendulum coordinates of a momentum on `H = 1/2`.
///
/// `h1 = ξ cos(β/2)`, `h2 = sin(β/2)`, `h3 = ξ c / 2`, with `β̇ = c`, `ċ = −r sin β`
/// and `r = 1/ξ² − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendulumState {
    pub beta: f64,
    pub c: f64,
    pub r: f64,
}

impl PendulumState {
    pub fn from_momentum(h: &Momentum, xi: f64) -> Self {
        let beta = 2.0 * h.h2.atan2(h.h1 / xi);
        Self { beta: beta.rem_euclid(4.0 * std::f64::consts::PI), c: 2.0 * h.h3 / xi, r: 1.0 / (xi * xi) - 1.0 }
    }

    pub fn to_momentum(&self, xi: f64) -> Momentum {
        let (s, c) = (0.5 * self.beta).sin_cos();
        Momentum::new(xi * c, s, 0.5 * xi * self.c)
    }

    /// Right-hand side of the pendulum system.
    pub fn rate(&self) -> (f64, f64) {
        (self.c, -self.r * self.beta.sin())
    }
}

/// Parameter along a geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parametrization {
    /// Sub-Riemannian arclength `t`.
    SrArclength,
    /// Spherical arclength `s` of the projected curve.
    SphericalArclength,
}

impl fmt::Display for Parametrization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parametrization::SrArclength => "t",
            Parametrization::SphericalArclength => "s",
        })
    }
}

/// How a path was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    ClosedForm,
    Ode,
    /// Backtracked through a distance map.
    FastMarching,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::Ode => "ode",
            Provenance::FastMarching => "fast-marching",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicSample {
    pub param: f64,
    pub point: GroupPoint,
    pub momentum: Momentum,
    pub u1: f64,
    pub u2: f64,
    /// Set when the chart is degenerate or a fallback was used.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath {
    pub samples: Vec<GeodesicSample>,
    pub parametrization: Parametrization,
    pub xi: f64,
    pub provenance: Provenance,
}

impl GeodesicPath {
    pub fn endpoint(&self) -> Option<&GroupPoint> {
        self.samples.last().map(|s| &s.point)
    }

    /// CSV rendering with a commented header line.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# xi={} parametrization={} provenance={}\nparam,x,y,theta,n1,n2,n3,h1,h2,h3,u1,u2\n",
            self.xi, self.parametrization, self.provenance
        );
        for s in &self.samples {
            let n = s.point.spherical_projection();
            let c = s.point.chart;
            out.push_str(&format!(
                "{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12}\n",
                s.param, c.x, c.y, c.theta, n[0], n[1], n[2], s.momentum.h1, s.momentum.h2, s.momentum.h3, s.u1, s.u2
            ));
        }
        out
    }
}

/// Largest entry of the difference of two matrices.
pub fn matrix_distance(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    (a - b).abs().max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pendulum_special_values() {
        let xi = 1.7;
        assert_eq!(PendulumState::from_momentum(&Momentum::new(xi, 0.0, 0.0), xi).beta, 0.0);
        let p = PendulumState::from_momentum(&Momentum::new(0.0, 1.0, 0.0), xi);
        assert!((p.beta - PI).abs() < 1e-15);
    }

    #[test]
    fn pendulum_round_trip() {
        for &(xi, b, c) in &[(0.5, 0.3, -1.0), (1.0, 5.0, 2.0), (2.5, 12.0, 0.1)] {
            let p = PendulumState { beta: b, c, r: 1.0 / (xi * xi) - 1.0 };
            let h = p.to_momentum(xi);
            assert!((h.hamiltonian(xi) - 0.5).abs() < 1e-14);
            let q = PendulumState::from_momentum(&h, xi);
            assert!((q.beta - b).abs() < 1e-12 && (q.c - c).abs() < 1e-12);
            let h2 = q.to_momentum(xi);
            assert!((h2.h1 - h.h1).abs() < 1e-12 && (h2.h2 - h.h2).abs() < 1e-12 && (h2.h3 - h.h3).abs() < 1e-12);
        }
    }
}
