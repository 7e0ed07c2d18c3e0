//! Explicit geodesics from the identity.
//!
//! With `D0` the rotation taking the initial momentum to `(0, 0, M)`, every
//! geodesic reads `R(t) = D0ᵀ · R(x̃, ỹ, θ̃)` where
//!
//! ```text
//! x̃ = arg(√(h1² + h3²) + i h2),   θ̃ = arg(h3 − i h1),   ỹ' = (M/ξ²) · h1² / (h1² + h3²).
//! ```
//!
//! In spherical arclength `ds = (h1/ξ²) dt` the last equation becomes
//! `ỹ' = ξ M √(1 − h2²) / (M² − h2²)`. Both constants were confirmed against the
//! RK4 flow.

use nalgebra::Matrix3;

use super::elliptic::{ellip_f_diff, ellip_pi_diff};
use super::flow::pendulum_flow;
use super::vertical::{cusp_time_smax, vertical_h2_h3};
use super::{GeodesicPath, GeodesicSample, Momentum, Parametrization, PendulumState, Provenance};
use crate::error::{Error, Result};
use crate::lie_so3::{rotation_matrix, GroupPoint};
use crate::quadrature::adaptive_simpson;

/// Constant in front of the `ỹ` integral.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum YPrefactor {
    /// `M/ξ²` in `t`, `ξ M` in `s`.
    #[default]
    Derived,
    /// The derived constant multiplied by the given factor.
    Scaled(f64),
}

impl YPrefactor {
    fn factor(&self) -> f64 {
        match self {
            YPrefactor::Derived => 1.0,
            YPrefactor::Scaled(f) => *f,
        }
    }
}

/// Rotation with rows built from the initial momentum.
fn d0_matrix(h1: f64, h2: f64, h3: f64, m: f64, mu: f64) -> Matrix3<f64> {
    Matrix3::new(mu, h2 * h1 / mu, -h2 * h3 / mu, 0.0, m * h3 / mu, m * h1 / mu, h2, -h1, h3) / m
}

/// Geodesic in sub-Riemannian arclength, valid on `[0, t_max]`.
#[derive(Debug, Clone)]
pub struct ClosedFormT {
    xi: f64,
    m: f64,
    d0: Matrix3<f64>,
    table: Vec<PendulumState>,
    dt: f64,
    prefactor: YPrefactor,
    /// `Some(±1)` on the fixed points `h = (0, ±1, 0)`.
    fiber: Option<f64>,
}

impl ClosedFormT {
    pub fn new(h0: Momentum, xi: f64, t_max: f64) -> Result<Self> {
        Self::with_prefactor(h0, xi, t_max, YPrefactor::Derived)
    }

    pub fn with_prefactor(h0: Momentum, xi: f64, t_max: f64, prefactor: YPrefactor) -> Result<Self> {
        if !(xi > 0.0) || !(t_max >= 0.0) || !t_max.is_finite() {
            return Err(Error::Config(format!("closed form needs ξ > 0 and finite T ≥ 0 (ξ={xi}, T={t_max})")));
        }
        if (h0.hamiltonian(xi) - 0.5).abs() > 1e-10 {
            return Err(Error::Domain(format!("initial momentum has H = {} instead of 1/2", h0.hamiltonian(xi))));
        }
        let m = h0.casimir();
        let mu = (h0.h1 * h0.h1 + h0.h3 * h0.h3).sqrt();
        if mu <= 1e-12 * m {
            return Ok(Self {
                xi,
                m,
                d0: Matrix3::identity(),
                table: vec![],
                dt: 1.0,
                prefactor,
                fiber: Some(h0.h2.signum()),
            });
        }
        let d0 = d0_matrix(h0.h1, h0.h2, h0.h3, m, mu);
        let p0 = PendulumState::from_momentum(&h0, xi);
        let c_bound = (p0.c * p0.c + 4.0 * p0.r.abs()).sqrt();
        let step = 1e-3f64.min(0.02 / c_bound.max(1e-9));
        let table = pendulum_flow(p0, t_max.max(step), step);
        let dt = t_max.max(step) / (table.len() - 1) as f64;
        Ok(Self { xi, m, d0, table, dt, prefactor, fiber: None })
    }

    /// Pendulum state at time `t` by cubic Hermite interpolation of the table.
    fn pendulum_at(&self, t: f64) -> PendulumState {
        let n = self.table.len() - 1;
        let u = (t / self.dt).clamp(0.0, n as f64);
        let k = (u.floor() as usize).min(n.saturating_sub(1));
        let (p, q) = (self.table[k], self.table[k + 1]);
        let s = u - k as f64;
        let (h00, h10, h01, h11) = hermite_basis(s);
        let (dp, dq) = (p.rate(), q.rate());
        let dt = self.dt;
        PendulumState {
            beta: h00 * p.beta + h10 * dt * dp.0 + h01 * q.beta + h11 * dt * dq.0,
            c: h00 * p.c + h10 * dt * dp.1 + h01 * q.c + h11 * dt * dq.1,
            r: p.r,
        }
    }

    /// Momentum at time `t`.
    pub fn momentum_at(&self, t: f64) -> Momentum {
        match self.fiber {
            Some(s) => Momentum::new(0.0, s, 0.0),
            None => self.pendulum_at(t).to_momentum(self.xi),
        }
    }

    fn integrand(&self, t: f64) -> f64 {
        let h = self.momentum_at(t);
        let den = h.h1 * h.h1 + h.h3 * h.h3;
        if den == 0.0 {
            0.0
        } else {
            h.h1 * h.h1 / den
        }
    }

    /// Increment of `ỹ` between two times.
    fn ytilde_between(&self, a: f64, b: f64) -> f64 {
        self.prefactor.factor() * self.m / (self.xi * self.xi) * adaptive_simpson(|s| self.integrand(s), a, b, 1e-12)
    }

    fn assemble(&self, t: f64, yt: f64) -> Result<GroupPoint> {
        if let Some(s) = self.fiber {
            return Ok(GroupPoint::from_matrix(rotation_matrix(0.0, 0.0, s * t)));
        }
        let t_max = self.dt * (self.table.len() - 1) as f64;
        if t < 0.0 || t > t_max * (1.0 + 1e-12) {
            return Err(Error::Domain(format!("t = {t} outside [0, {t_max}]")));
        }
        let h = self.momentum_at(t);
        let xt = h.h2.atan2(h.h1.hypot(h.h3));
        let tt = (-h.h1).atan2(h.h3);
        Ok(GroupPoint::from_matrix(self.d0.transpose() * rotation_matrix(xt, yt, tt)))
    }

    /// Group element at time `t ∈ [0, t_max]`.
    pub fn point_at(&self, t: f64) -> Result<GroupPoint> {
        let yt = if self.fiber.is_some() { 0.0 } else { self.ytilde_between(0.0, t) };
        self.assemble(t, yt)
    }

    /// Path sampled at `n + 1` equally spaced times on `[0, t_end]`.
    pub fn path(&self, t_end: f64, n: usize) -> Result<GeodesicPath> {
        let mut samples = Vec::with_capacity(n + 1);
        let (mut yt, mut prev) = (0.0, 0.0);
        for k in 0..=n {
            let t = t_end * k as f64 / n.max(1) as f64;
            if self.fiber.is_none() {
                yt += self.ytilde_between(prev, t);
            }
            prev = t;
            let point = self.assemble(t, yt)?;
            let momentum = self.momentum_at(t);
            let (u1, u2) = momentum.controls(self.xi);
            samples.push(GeodesicSample { param: t, point, momentum, u1, u2, flagged: self.fiber.is_some() || point.degenerate });
        }
        Ok(GeodesicPath { samples, parametrization: Parametrization::SrArclength, xi: self.xi, provenance: Provenance::ClosedForm })
    }
}

fn hermite_basis(s: f64) -> (f64, f64, f64, f64) {
    let (s2, s3) = (s * s, s * s * s);
    (2.0 * s3 - 3.0 * s2 + 1.0, s3 - 2.0 * s2 + s, -2.0 * s3 + 3.0 * s2, s3 - s2)
}

/// Group element at time `t` of the geodesic with initial momentum `h0`.
pub fn geodesic_closed_form_t(h0: Momentum, xi: f64, t: f64) -> Result<GroupPoint> {
    ClosedFormT::new(h0, xi, t)?.point_at(t)
}

/// Geodesic in spherical arclength, valid on `[0, s_max]`.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormS {
    pub h2_0: f64,
    pub h3_0: f64,
    pub xi: f64,
    pub m: f64,
    pub s_max: f64,
    d0: Matrix3<f64>,
    prefactor: YPrefactor,
}

impl ClosedFormS {
    pub fn new(h2_0: f64, h3_0: f64, xi: f64) -> Result<Self> {
        Self::with_prefactor(h2_0, h3_0, xi, YPrefactor::Derived)
    }

    pub fn with_prefactor(h2_0: f64, h3_0: f64, xi: f64, prefactor: YPrefactor) -> Result<Self> {
        if !(xi > 0.0) || !(h2_0.abs() < 1.0) || !h3_0.is_finite() {
            return Err(Error::Domain(format!("spherical arclength form needs ξ > 0 and |h2⁰| < 1 (ξ={xi}, h2⁰={h2_0})")));
        }
        let h1_0 = xi * (1.0 - h2_0 * h2_0).sqrt();
        let m = (h1_0 * h1_0 + h2_0 * h2_0 + h3_0 * h3_0).sqrt();
        let mu = h1_0.hypot(h3_0);
        Ok(Self { h2_0, h3_0, xi, m, s_max: cusp_time_smax(h2_0, h3_0, xi), d0: d0_matrix(h1_0, h2_0, h3_0, m, mu), prefactor })
    }

    /// Momentum `(h1, h2, h3)` at `s`, with `h1 ≥ 0`.
    pub fn momentum_at(&self, s: f64) -> Momentum {
        let (h2, h3) = vertical_h2_h3(self.h2_0, self.h3_0, self.xi, s);
        let h2 = h2.clamp(-1.0, 1.0);
        Momentum::new(self.xi * (1.0 - h2 * h2).sqrt(), h2, h3)
    }

    fn integrand(&self, s: f64) -> f64 {
        let (h2, h3) = vertical_h2_h3(self.h2_0, self.h3_0, self.xi, s);
        let q = (1.0 - h2 * h2).max(0.0);
        // M² − h2² = ξ²(1 − h2²) + h3².
        q.sqrt() / (self.xi * self.xi * q + h3 * h3)
    }

    /// `ỹ(s)` by adaptive Simpson quadrature.
    pub fn ytilde_quadrature(&self, s: f64) -> f64 {
        self.prefactor.factor() * self.xi * self.m * adaptive_simpson(|v| self.integrand(v), 0.0, s, 1e-12)
    }

    /// `ỹ(s)` through incomplete elliptic integrals; requires `ξ < 1`.
    pub fn ytilde_elliptic(&self, s: f64) -> Result<f64> {
        if self.xi >= 1.0 {
            return Err(Error::Domain(format!("elliptic form needs ξ < 1 (ξ = {})", self.xi)));
        }
        let w = (1.0 - self.xi * self.xi).sqrt();
        let m2 = self.m * self.m;
        let rho2 = (m2 - self.xi * self.xi) / (1.0 - self.xi * self.xi);
        let psi0 = self.h2_0.atan2(self.h3_0 / w);
        let psi = psi0 + w * s;
        let n = rho2 / m2;
        let val = ellip_f_diff(psi0, psi, rho2) - (1.0 - 1.0 / m2) * ellip_pi_diff(n, psi0, psi, rho2);
        Ok(self.prefactor.factor() * self.xi * self.m / w * val)
    }

    fn ytilde(&self, s: f64) -> f64 {
        if self.xi < 1.0 && self.prefactor == YPrefactor::Derived {
            if let Ok(v) = self.ytilde_elliptic(s) {
                if v.is_finite() {
                    return v;
                }
            }
        }
        self.ytilde_quadrature(s)
    }

    /// Group element at spherical arclength `s ∈ [0, s_max]`.
    pub fn point_at(&self, s: f64) -> Result<GroupPoint> {
        if s < 0.0 || s > self.s_max * (1.0 + 1e-12) {
            return Err(Error::PastCusp { s, s_max: self.s_max });
        }
        let h = self.momentum_at(s);
        let xt = h.h2.atan2((self.m * self.m - h.h2 * h.h2).max(0.0).sqrt());
        let tt = (-h.h1).atan2(h.h3);
        let yt = self.ytilde(s);
        Ok(GroupPoint::from_matrix(self.d0.transpose() * rotation_matrix(xt, yt, tt)))
    }

    /// Path sampled at `n + 1` equally spaced values on `[0, s_end]`; controls `(1, k_g)`.
    pub fn path(&self, s_end: f64, n: usize) -> Result<GeodesicPath> {
        let mut samples = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let s = s_end * k as f64 / n.max(1) as f64;
            let point = self.point_at(s)?;
            let momentum = self.momentum_at(s);
            let kg = if momentum.h1 > 0.0 { self.xi * self.xi * momentum.h2 / momentum.h1 } else { momentum.h2.signum() * 1e9 };
            samples.push(GeodesicSample { param: s, point, momentum, u1: 1.0, u2: kg, flagged: momentum.h1 <= 0.0 });
        }
        Ok(GeodesicPath { samples, parametrization: Parametrization::SphericalArclength, xi: self.xi, provenance: Provenance::ClosedForm })
    }
}

/// `ỹ(s)` of the spherical-arclength form, by quadrature or elliptic integrals.
pub fn closed_form_s_ytilde(h2_0: f64, h3_0: f64, xi: f64, s: f64, elliptic: bool) -> Result<f64> {
    let g = ClosedFormS::new(h2_0, h3_0, xi)?;
    if elliptic {
        g.ytilde_elliptic(s)
    } else {
        Ok(g.ytilde_quadrature(s))
    }
}

/// Group element at spherical arclength `s` for initial `(h2⁰, h3⁰)`.
pub fn geodesic_closed_form_s(h2_0: f64, h3_0: f64, xi: f64, s: f64) -> Result<GroupPoint> {
    ClosedFormS::new(h2_0, h3_0, xi)?.point_at(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starts_at_identity() {
        let xi = 1.5;
        let h0 = Momentum::from_h2_h3(0.45, 0.3, xi);
        let g = geodesic_closed_form_t(h0, xi, 0.0).unwrap();
        assert!((g.matrix - Matrix3::identity()).abs().max() < 1e-12);
        let g = geodesic_closed_form_s(0.45, 0.3, xi, 0.0).unwrap();
        assert!((g.matrix - Matrix3::identity()).abs().max() < 1e-12);
    }

    #[test]
    fn great_circles() {
        let xi = 2.0;
        let g = geodesic_closed_form_t(Momentum::new(xi, 0.0, 0.0), xi, 1.2).unwrap();
        let c = g.chart;
        assert!((c.x - 0.6).abs() < 1e-12 && c.y.abs() < 1e-12 && c.theta.abs() < 1e-12);
        let g = geodesic_closed_form_s(0.0, 0.0, xi, 0.8).unwrap();
        assert!((g.chart.x - 0.8).abs() < 1e-12);
    }

    #[test]
    fn fixed_point_is_fiber_rotation() {
        let g = geodesic_closed_form_t(Momentum::new(0.0, -1.0, 0.0), 1.3, 0.7).unwrap();
        let want = rotation_matrix(0.0, 0.0, -0.7);
        assert!((g.matrix - want).abs().max() < 1e-14);
    }

    #[test]
    fn past_cusp_rejected() {
        assert!(matches!(geodesic_closed_form_s(0.0, 1.0, 1.0, 1.2), Err(Error::PastCusp { .. })));
    }
}
