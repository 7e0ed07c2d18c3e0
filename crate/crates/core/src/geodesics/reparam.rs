//! Conversion between sub-Riemannian arclength `t` and spherical arclength `s`.
//!
//! Along a cuspless curve `dt/ds = 𝔊(n) √(ξ² + k_g²)`, and in `t` the controls are
//! `u1 = ds/dt`, `u2 = k_g ds/dt`. Both directions integrate `dt/ds` with the
//! trapezoidal rule in `s`, so converting back and forth returns the original
//! parameter values.

use nalgebra::Vector3;

use super::vertical::{cusp_time_smax, vertical_h2_h3};
use super::{GeodesicPath, Parametrization};
use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;

/// Re-express a sampled path in the other parametrization; `cost` is evaluated on
/// the spherical projection of each sample.
pub fn reparametrize(path: &GeodesicPath, target: Parametrization, cost: &dyn Fn(&Vector3<f64>) -> f64) -> Result<GeodesicPath> {
    if path.parametrization == target {
        return Ok(path.clone());
    }
    let xi = path.xi;
    let mut out = path.clone();
    out.parametrization = target;
    match target {
        Parametrization::SphericalArclength => {
            // dt/ds = 1/u1.
            if let Some(bad) = path.samples.iter().find(|s| !(s.u1 > 0.0)) {
                return Err(Error::Cusp(bad.param));
            }
            let mut s_acc = 0.0;
            for (k, smp) in out.samples.iter_mut().enumerate() {
                if k > 0 {
                    let (a, b) = (&path.samples[k - 1], &path.samples[k]);
                    s_acc += 2.0 * (b.param - a.param) / (1.0 / a.u1 + 1.0 / b.u1);
                }
                let kg = smp.u2 / smp.u1;
                smp.param = s_acc;
                smp.u1 = 1.0;
                smp.u2 = kg;
            }
        }
        Parametrization::SrArclength => {
            let rate: Vec<f64> = path
                .samples
                .iter()
                .map(|s| {
                    let kg = s.u2 / s.u1;
                    cost(&s.point.spherical_projection()) * (xi * xi + kg * kg).sqrt()
                })
                .collect();
            let mut t_acc = 0.0;
            for (k, smp) in out.samples.iter_mut().enumerate() {
                if k > 0 {
                    t_acc += 0.5 * (path.samples[k].param - path.samples[k - 1].param) * (rate[k - 1] + rate[k]);
                }
                let kg = smp.u2 / smp.u1;
                smp.param = t_acc;
                smp.u1 = 1.0 / rate[k];
                smp.u2 = kg / rate[k];
            }
        }
    }
    Ok(out)
}

/// Sub-Riemannian length `t(s) = ∫ ξ / √(1 − h2²) ds` of a uniform-cost geodesic
/// up to spherical arclength `s ≤ s_max`.
///
/// Near the cusp the integrand blows up like `(s_max − s)^{−1/2}`; the tail is
/// integrated after the substitution `s = s_max − u²`.
pub fn sr_time_at_s(h2_0: f64, h3_0: f64, xi: f64, s: f64) -> Result<f64> {
    let s_max = cusp_time_smax(h2_0, h3_0, xi);
    if s < 0.0 || s > s_max * (1.0 + 1e-12) {
        return Err(Error::PastCusp { s, s_max });
    }
    let rate = |v: f64| {
        let (h2, _) = vertical_h2_h3(h2_0, h3_0, xi, v);
        xi / (1.0 - h2 * h2).max(0.0).sqrt()
    };
    if !s_max.is_finite() {
        return Ok(adaptive_simpson(rate, 0.0, s, 1e-11));
    }
    let split = (0.75 * s_max).min(s);
    let mut t = adaptive_simpson(rate, 0.0, split, 1e-11);
    if s > split {
        let (u_lo, u_hi) = ((s_max - s).max(0.0).sqrt(), (s_max - split).sqrt());
        // Evolve backwards from the cusp state (σ, h3_c) so that 1 − h2² keeps full
        // relative precision: with d = σ − h2 one has 1 − h2² = σ d (2 − σ d).
        let (h2_c, h3_c) = vertical_h2_h3(h2_0, h3_0, xi, s_max);
        let sigma = h2_c.signum();
        let chi = super::vertical::ChiParam::new(xi).chi;
        let tail = |u: f64| {
            if u == 0.0 {
                return 2.0 * xi / (2.0 * h3_c.abs()).sqrt();
            }
            let v = u * u;
            let d = if chi.norm() == 0.0 {
                h3_c * v
            } else {
                let z = chi * v;
                let half = (z * 0.5).sinh();
                (half * half * (-2.0 * sigma) + z.sinh() / chi * h3_c).re
            };
            let q = sigma * d * (2.0 - sigma * d);
            2.0 * u * xi / q.max(f64::MIN_POSITIVE).sqrt()
        };
        t += adaptive_simpson(tail, u_lo, u_hi, 1e-11);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::ClosedFormS;

    #[test]
    fn straight_path_has_t_equal_xi_s() {
        let xi = 1.7;
        let path = ClosedFormS::new(0.0, 0.0, xi).unwrap().path(1.0, 20).unwrap();
        let t = reparametrize(&path, Parametrization::SrArclength, &|_| 1.0).unwrap();
        for (a, b) in path.samples.iter().zip(&t.samples) {
            assert!((b.param - xi * a.param).abs() < 1e-14);
            assert!((xi * xi * b.u1 * b.u1 + b.u2 * b.u2 - 1.0).abs() < 1e-12);
        }
        assert!((sr_time_at_s(0.0, 0.0, xi, 1.0).unwrap() - xi).abs() < 1e-10);
    }

    #[test]
    fn cusp_tail_is_finite() {
        let (h2, h3, xi) = (0.3, 0.6, 1.5);
        let s_max = cusp_time_smax(h2, h3, xi);
        let full = sr_time_at_s(h2, h3, xi, s_max).unwrap();
        assert!(full.is_finite());
        let near = sr_time_at_s(h2, h3, xi, s_max - 1e-10).unwrap();
        assert!((full - near).abs() < 1e-4);
    }
}
