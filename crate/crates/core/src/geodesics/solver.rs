use super::closed_form::ClosedFormT;
use super::flow::{flow_endpoint, hamiltonian_flow_t};
use super::{GeodesicPath, Momentum};
use crate::error::Result;
use crate::lie_so3::GroupPoint;
use crate::registry::Registry;

/// Source of geodesics from the identity in sub-Riemannian arclength.
pub trait GeodesicSolver: Send + Sync {
    fn name(&self) -> &'static str;

    /// Group element reached at time `t`.
    fn endpoint(&self, h0: Momentum, xi: f64, t: f64) -> Result<GroupPoint>;

    /// Path sampled at `n + 1` equally spaced times on `[0, t_end]`.
    fn path(&self, h0: Momentum, xi: f64, t_end: f64, n: usize) -> Result<GeodesicPath>;
}

/// Explicit formulas with the pendulum integrated numerically.
pub struct ClosedFormSolver;

impl GeodesicSolver for ClosedFormSolver {
    fn name(&self) -> &'static str {
        "closed-form"
    }

    fn endpoint(&self, h0: Momentum, xi: f64, t: f64) -> Result<GroupPoint> {
        ClosedFormT::new(h0, xi, t)?.point_at(t)
    }

    fn path(&self, h0: Momentum, xi: f64, t_end: f64, n: usize) -> Result<GeodesicPath> {
        ClosedFormT::new(h0, xi, t_end)?.path(t_end, n)
    }
}

/// RK4 integration of the full Hamiltonian system with step `1e-3`.
pub struct OdeSolver;

impl GeodesicSolver for OdeSolver {
    fn name(&self) -> &'static str {
        "ode"
    }

    fn endpoint(&self, h0: Momentum, xi: f64, t: f64) -> Result<GroupPoint> {
        Ok(flow_endpoint(h0, xi, t, 1e-3)?.0)
    }

    fn path(&self, h0: Momentum, xi: f64, t_end: f64, n: usize) -> Result<GeodesicPath> {
        let n = n.max(1);
        let per = ((t_end / n as f64 / 1e-3).ceil() as usize).max(1);
        let mut full = hamiltonian_flow_t(h0, xi, t_end, (t_end / (n * per) as f64).max(1e-12))?;
        full.samples = full.samples.into_iter().step_by(per).collect();
        Ok(full)
    }
}

/// Registry of geodesic solvers: `closed-form` and `ode`.
pub fn geodesic_solvers() -> Registry<dyn GeodesicSolver> {
    Registry::<dyn GeodesicSolver>::new("geodesic solver")
        .register("closed-form", || Box::new(ClosedFormSolver))
        .register("ode", || Box::new(OdeSolver))
}
