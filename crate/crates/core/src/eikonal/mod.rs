//! Sub-Riemannian distance maps from the Riemannian ε-approximation.
//!
//! A seed point is propagated through a grid on the chart `(x, y, θ)` with a
//! monotone scheme for
//!
//! ```text
//! (X1 W)² / ξ² + (X2 W)² + ε² (X3 W)² / ξ² = C²
//! ```
//!
//! The cuspless variant replaces `X1 W` by `max(0, X1 W)`.

mod cost_field;
mod fast_marching;
pub mod geometry;
mod grid;
mod heap;
mod interp;
mod io;
pub mod scheme;
pub mod selling;
mod semi_lagrangian;

pub use cost_field::{Cost2D, CostField};
pub use fast_marching::SellingFastMarching;
pub use geometry::{assemble_metric, geometries, GroupGeometry, Se2Geometry, So3Geometry};
pub use grid::Grid3D;
pub use interp::{sample_w, WSample};
pub use io::{read_cost_grid, read_distance_grid, sidecar_path, write_cost_grid, write_distance_grid, GridMetadata};
pub use scheme::{schemes, CusplessScheme, EikonalScheme, RiemannianScheme, StencilTerm};
pub use semi_lagrangian::SemiLagrangian;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::registry::Registry;

/// Group preset of a distance computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    So3,
    Se2,
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::So3 => "so3",
            Preset::Se2 => "se2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "so3" => Ok(Preset::So3),
            "se2" => Ok(Preset::Se2),
            other => Err(Error::Config(format!("unknown preset '{other}' (expected so3 or se2)"))),
        }
    }

    pub fn code(&self) -> u8 {
        match self {
            Preset::So3 => 0,
            Preset::Se2 => 1,
        }
    }

    pub fn from_code(c: u8) -> Result<Self> {
        match c {
            0 => Ok(Preset::So3),
            1 => Ok(Preset::Se2),
            _ => Err(Error::Format(format!("unknown preset code {c}"))),
        }
    }

    pub fn geometry(&self) -> Box<dyn GroupGeometry> {
        geometries().create(self.name()).expect("presets are registered")
    }

    /// Frame at a chart point without going through the registry.
    pub fn frame(&self, p: &[f64; 3]) -> Option<[[f64; 3]; 3]> {
        match self {
            Preset::So3 => So3Geometry.frame(p),
            Preset::Se2 => Se2Geometry.frame(p),
        }
    }
}

/// Metric parameters of a distance computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub preset: Preset,
    pub xi: f64,
    pub eps: f64,
    /// Registered scheme name, `riemannian` or `cuspless`.
    pub scheme: String,
}

impl MetricSpec {
    pub fn new(preset: Preset, xi: f64, eps: f64) -> Self {
        Self { preset, xi, eps, scheme: "riemannian".into() }
    }

    pub fn cuspless(mut self) -> Self {
        self.scheme = "cuspless".into();
        self
    }

    pub fn is_cuspless(&self) -> bool {
        self.scheme == "cuspless"
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xi > 0.0 && self.xi.is_finite()) {
            return Err(Error::Config(format!("ξ must be positive, got {}", self.xi)));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::Config(format!("ε must lie in (0, 1], got {}", self.eps)));
        }
        schemes().create(&self.scheme).map(|_| ())
    }
}

/// Life-cycle of a grid node during propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum NodeState {
    Far = 0,
    Trial = 1,
    Accepted = 2,
    /// Chart singularity; never updated.
    Excluded = 3,
}

/// A solved distance map.
#[derive(Debug, Clone)]
pub struct DistanceGrid {
    pub grid: Grid3D,
    pub spec: MetricSpec,
    pub w: Vec<f64>,
    pub state: Vec<NodeState>,
    pub seed: [f64; 3],
    /// Cost sampled at the `(i, j)` nodes, `x` fastest.
    pub cost: Vec<f64>,
}

impl DistanceGrid {
    #[inline]
    pub fn value(&self, i: usize, j: usize, k: usize) -> f64 {
        self.w[self.grid.index(i, j, k)]
    }

    /// Cost at a chart point by bilinear interpolation of the node costs.
    pub fn cost_at(&self, x: f64, y: f64) -> f64 {
        let g = &self.grid;
        let (nx, ny) = (g.dims[0], g.dims[1]);
        let u = g.fractional(0, x).clamp(0.0, (nx - 1) as f64);
        let v = g.fractional(1, y);
        let v = if g.periodic[1] { v } else { v.clamp(0.0, (ny - 1) as f64) };
        let (i0, j0) = (u.floor() as usize, v.floor() as usize);
        let (fu, fv) = (u - i0 as f64, v - j0 as f64);
        let i1 = (i0 + 1).min(nx - 1);
        let j1 = if g.periodic[1] { (j0 + 1) % ny } else { (j0 + 1).min(ny - 1) };
        let j0 = j0.min(ny - 1);
        let c = |i: usize, j: usize| self.cost[i + nx * j];
        (1.0 - fu) * (1.0 - fv) * c(i0, j0) + fu * (1.0 - fv) * c(i1, j0) + (1.0 - fu) * fv * c(i0, j1) + fu * fv * c(i1, j1)
    }

    pub fn geometry(&self) -> Box<dyn GroupGeometry> {
        self.spec.preset.geometry()
    }

    /// Number of accepted nodes.
    pub fn accepted(&self) -> usize {
        self.state.iter().filter(|s| **s == NodeState::Accepted).count()
    }
}

/// Input of a distance computation.
#[derive(Debug, Clone)]
pub struct Problem {
    pub grid: Grid3D,
    pub spec: MetricSpec,
    pub cost: CostField,
    pub seed: [f64; 3],
    /// Stop once the accepted front exceeds this value.
    pub stop_radius: Option<f64>,
}

impl Problem {
    pub fn new(grid: Grid3D, spec: MetricSpec, seed: [f64; 3]) -> Self {
        Self { grid, spec, cost: CostField::Uniform(1.0), seed, stop_radius: None }
    }

    pub fn with_cost(mut self, cost: CostField) -> Self {
        self.cost = cost;
        self
    }

    pub fn with_stop_radius(mut self, r: f64) -> Self {
        self.stop_radius = Some(r);
        self
    }

    /// Costs at the `(i, j)` nodes, checked to be positive.
    pub(crate) fn node_costs(&self) -> Result<Vec<f64>> {
        let g = &self.grid;
        let mut out = Vec::with_capacity(g.dims[0] * g.dims[1]);
        for j in 0..g.dims[1] {
            for i in 0..g.dims[0] {
                let c = self.cost.value(g.coord(0, i as f64), g.coord(1, j as f64));
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::Config(format!("cost must be positive and finite, got {c} at node ({i}, {j})")));
                }
                out.push(c);
            }
        }
        Ok(out)
    }

    /// Rows of the first axis sitting on a chart singularity.
    pub(crate) fn excluded_row(&self, i: usize) -> bool {
        self.spec.preset.frame(&self.grid.point(i, 0, 0)).is_none()
    }
}

/// Algorithm computing a distance map.
pub trait EikonalSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, problem: &Problem) -> Result<DistanceGrid>;
}

/// Solvers selectable by name.
pub fn solvers() -> Registry<dyn EikonalSolver> {
    Registry::<dyn EikonalSolver>::new("eikonal solver")
        .register("fast-marching", || Box::new(SellingFastMarching::default()))
        .register("fast-marching-first-order", || Box::new(SellingFastMarching { second_order: false }))
        .register("semi-lagrangian", || Box::new(SemiLagrangian::default()))
}

/// Distance from the seed with the default solver.
pub fn solve(problem: &Problem) -> Result<DistanceGrid> {
    SellingFastMarching::default().solve(problem)
}

/// Distance with the cuspless Hamiltonian.
pub fn solve_cuspless(problem: &Problem) -> Result<DistanceGrid> {
    let mut p = problem.clone();
    p.spec = p.spec.cuspless();
    SellingFastMarching::default().solve(&p)
}

/// Distance on SE(2) with the same solver.
pub fn se2_solve(problem: &Problem) -> Result<DistanceGrid> {
    if problem.spec.preset != Preset::Se2 {
        return Err(Error::Config("se2_solve needs the se2 preset".into()));
    }
    SellingFastMarching::default().solve(problem)
}
