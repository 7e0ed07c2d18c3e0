//! Endpoints of all geodesics of a given length.

use std::f64::consts::PI;

use super::solver::{ClosedFormSolver, GeodesicSolver, OdeSolver};
use super::{Momentum, PendulumState};
use crate::lie_so3::GroupPoint;

/// Sampling of the cylinder `H = 1/2` of initial momenta in pendulum coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavefrontConfig {
    /// Samples of `β0 ∈ [0, 4π)`.
    pub n_beta: usize,
    /// Samples of `c0 ∈ [−c_max, c_max]`, uniform in `asinh(c0)`.
    pub n_c: usize,
    pub c_max: f64,
}

impl WavefrontConfig {
    pub fn square(n: usize) -> Self {
        Self { n_beta: n, n_c: n, c_max: 40.0 }
    }

    /// Initial momenta of the sample.
    pub fn momenta(&self, xi: f64) -> Vec<Momentum> {
        let r = 1.0 / (xi * xi) - 1.0;
        let u_max = self.c_max.asinh();
        let mut out = Vec::with_capacity(self.n_beta * self.n_c);
        for j in 0..self.n_c {
            let u = if self.n_c == 1 { 0.0 } else { -u_max + 2.0 * u_max * j as f64 / (self.n_c - 1) as f64 };
            for i in 0..self.n_beta {
                let beta = 4.0 * PI * i as f64 / self.n_beta as f64;
                out.push(PendulumState { beta, c: u.sinh(), r }.to_momentum(xi));
            }
        }
        out
    }
}

/// Endpoints at time `T` of the geodesics with the sampled initial momenta.
///
/// The closed form is used, with the ODE flow as fallback.
pub fn wavefront_sample(xi: f64, t: f64, cfg: &WavefrontConfig) -> Vec<(Momentum, GroupPoint)> {
    let (cf, ode) = (ClosedFormSolver, OdeSolver);
    cfg.momenta(xi)
        .into_iter()
        .filter_map(|h| {
            let p = cf.endpoint(h, xi, t).or_else(|_| ode.endpoint(h, xi, t)).ok()?;
            Some((h, p))
        })
        .collect()
}
