//! Fixed-step RK4 integration of the Hamiltonian system.
//!
//! The horizontal part is propagated as the matrix equation `Ṙ = R Ω` with
//! `Ω = −u1 A2 + u2 A1`, which is regular at the chart poles; chart coordinates
//! are read off each sample afterwards.

use nalgebra::Matrix3;

use super::{GeodesicPath, GeodesicSample, Momentum, Parametrization, PendulumState, Provenance};
use crate::error::{Error, Result};
use crate::lie_so3::{a1, a2, GroupPoint};

/// Chart rows closer than this to the poles are flagged.
const POLE_GUARD: f64 = 1e-6;

type State = ([f64; 3], Matrix3<f64>);

fn rate(s: &State, xi: f64) -> State {
    let h = Momentum::new(s.0[0], s.0[1], s.0[2]);
    let (u1, u2) = h.controls(xi);
    let omega = a2() * (-u1) + a1() * u2;
    (h.vertical_rate(xi), s.1 * omega)
}

fn axpy(s: &State, k: &State, dt: f64) -> State {
    ([s.0[0] + dt * k.0[0], s.0[1] + dt * k.0[1], s.0[2] + dt * k.0[2]], s.1 + k.1 * dt)
}

fn rk4_step(s: &State, xi: f64, dt: f64) -> State {
    let k1 = rate(s, xi);
    let k2 = rate(&axpy(s, &k1, 0.5 * dt), xi);
    let k3 = rate(&axpy(s, &k2, 0.5 * dt), xi);
    let k4 = rate(&axpy(s, &k3, dt), xi);
    let mut h = s.0;
    for i in 0..3 {
        h[i] += dt / 6.0 * (k1.0[i] + 2.0 * k2.0[i] + 2.0 * k3.0[i] + k4.0[i]);
    }
    (h, s.1 + (k1.1 + k2.1 * 2.0 + k3.1 * 2.0 + k4.1) * (dt / 6.0))
}

fn check(h0: &Momentum, xi: f64, t_end: f64, step: f64) -> Result<usize> {
    if !(xi > 0.0) || !(t_end >= 0.0) || !(step > 0.0 && step <= 1e-3 * (1.0 + 1e-12)) {
        return Err(Error::Config(format!("flow needs ξ > 0, T ≥ 0 and 0 < step ≤ 1e-3 (ξ={xi}, T={t_end}, step={step})")));
    }
    if (h0.hamiltonian(xi) - 0.5).abs() > 1e-10 {
        return Err(Error::Domain(format!("initial momentum has H = {} instead of 1/2", h0.hamiltonian(xi))));
    }
    Ok(((t_end / step).ceil() as usize).max(1))
}

fn sample(t: f64, s: &State, xi: f64) -> GeodesicSample {
    let point = GroupPoint::from_matrix(s.1);
    let momentum = Momentum::new(s.0[0], s.0[1], s.0[2]);
    let (u1, u2) = momentum.controls(xi);
    let flagged = point.degenerate || point.chart.x.abs() > std::f64::consts::FRAC_PI_2 - POLE_GUARD;
    GeodesicSample { param: t, point, momentum, u1, u2, flagged }
}

/// Geodesic from the identity with initial momentum `h0`, sampled at every step.
pub fn hamiltonian_flow_t(h0: Momentum, xi: f64, t_end: f64, step: f64) -> Result<GeodesicPath> {
    let n = check(&h0, xi, t_end, step)?;
    let dt = t_end / n as f64;
    let mut s: State = (h0.as_array(), Matrix3::identity());
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(sample(0.0, &s, xi));
    for k in 1..=n {
        s = rk4_step(&s, xi, dt);
        samples.push(sample(k as f64 * dt, &s, xi));
    }
    Ok(GeodesicPath { samples, parametrization: Parametrization::SrArclength, xi, provenance: Provenance::Ode })
}

/// Endpoint and final momentum of the flow without storing the path.
pub fn flow_endpoint(h0: Momentum, xi: f64, t_end: f64, step: f64) -> Result<(GroupPoint, Momentum)> {
    let n = check(&h0, xi, t_end, step)?;
    let dt = t_end / n as f64;
    let mut s: State = (h0.as_array(), Matrix3::identity());
    for _ in 0..n {
        s = rk4_step(&s, xi, dt);
    }
    Ok((GroupPoint::from_matrix(s.1), Momentum::new(s.0[0], s.0[1], s.0[2])))
}

/// RK4 trajectory of the pendulum `β̇ = c, ċ = −r sin β` on a uniform grid.
pub fn pendulum_flow(p0: PendulumState, t_end: f64, step: f64) -> Vec<PendulumState> {
    let n = ((t_end / step).ceil() as usize).max(1);
    let dt = t_end / n as f64;
    let r = p0.r;
    let f = |b: f64, c: f64| (c, -r * b.sin());
    let mut out = Vec::with_capacity(n + 1);
    let (mut b, mut c) = (p0.beta, p0.c);
    out.push(p0);
    for _ in 0..n {
        let k1 = f(b, c);
        let k2 = f(b + 0.5 * dt * k1.0, c + 0.5 * dt * k1.1);
        let k3 = f(b + 0.5 * dt * k2.0, c + 0.5 * dt * k2.1);
        let k4 = f(b + dt * k3.0, c + dt * k3.1);
        b += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        c += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        out.push(PendulumState { beta: b, c, r });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn great_circle() {
        let xi = 1.3;
        let path = hamiltonian_flow_t(Momentum::new(xi, 0.0, 0.0), xi, 1.0, 1e-3).unwrap();
        for s in &path.samples {
            let c = s.point.chart;
            assert!((c.x - s.param / xi).abs() < 1e-12);
            assert!(c.y.abs() < 1e-12 && c.theta.abs() < 1e-12);
        }
    }

    #[test]
    fn fiber_rotation() {
        let path = hamiltonian_flow_t(Momentum::new(0.0, 1.0, 0.0), 0.8, 2.0, 1e-3).unwrap();
        for s in &path.samples {
            let c = s.point.chart;
            assert!(c.x.abs() < 1e-12 && c.y.abs() < 1e-12);
            assert!((c.theta - s.param).abs() < 1e-11);
        }
    }

    #[test]
    fn conservation_at_pi() {
        for &(xi, beta, c) in &[(0.5, 1.0, 2.0), (1.0, 3.0, -1.5), (2.0, 0.2, 0.7)] {
            let h0 = PendulumState { beta, c, r: 0.0 }.to_momentum(xi);
            let m0 = h0.casimir();
            let path = hamiltonian_flow_t(h0, xi, PI, 1e-3).unwrap();
            for s in &path.samples {
                assert!((s.momentum.hamiltonian(xi) - 0.5).abs() < 1e-8);
                assert!((s.momentum.casimir() - m0).abs() < 1e-8);
                assert!((xi * xi * s.u1 * s.u1 + s.u2 * s.u2 - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn rejects_off_shell_momentum() {
        assert!(hamiltonian_flow_t(Momentum::new(1.0, 1.0, 0.0), 1.0, 1.0, 1e-3).is_err());
        assert!(hamiltonian_flow_t(Momentum::new(1.0, 0.0, 0.0), 1.0, 1.0, 1e-2).is_err());
    }
}
