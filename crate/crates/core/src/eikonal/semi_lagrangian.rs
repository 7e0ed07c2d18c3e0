//! Label-correcting solver with semi-Lagrangian updates on the 26-neighbourhood.
//!
//! The boundary of the unit cube around a node is split into 48 triangles. A
//! node takes the smallest `u(z) + ‖x − z‖_M` over points `z` of those triangles,
//! with `u` linear on each triangle. Values are relaxed in priority order until
//! no node decreases any more. Only the riemannian scheme is supported.

use nalgebra::{Matrix3, Vector3};

use super::fast_marching::{neighbour, seed_values};
use super::geometry::assemble_metric;
use super::heap::IndexedHeap;
use super::{DistanceGrid, EikonalSolver, NodeState, Problem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct SemiLagrangian {
    /// Relative decrease below which a node is not re-queued.
    pub tolerance: f64,
}

impl Default for SemiLagrangian {
    fn default() -> Self {
        Self { tolerance: 1e-10 }
    }
}

/// Neighbourhood triangulation shared by all nodes.
struct Simplices {
    offsets: Vec<[i32; 3]>,
    /// Triangles as indices into `offsets`, with the inverse of `[p_a p_b p_c]ᵀ`.
    triangles: Vec<([usize; 3], Matrix3<f64>)>,
    edges: Vec<[usize; 2]>,
    /// For each offset, triangles and edges touching it.
    incident_triangles: Vec<Vec<usize>>,
    incident_edges: Vec<Vec<usize>>,
}

impl Simplices {
    fn new(spacing: &[f64; 3]) -> Self {
        let mut offsets = Vec::new();
        for k in -1..=1 {
            for j in -1..=1 {
                for i in -1..=1 {
                    if (i, j, k) != (0, 0, 0) {
                        offsets.push([i, j, k]);
                    }
                }
            }
        }
        let id = |o: [i32; 3]| offsets.iter().position(|&p| p == o).unwrap();
        let mut tri_ids = Vec::new();
        for axis in 0..3 {
            for side in [-1, 1] {
                let (a, b) = ((axis + 1) % 3, (axis + 2) % 3);
                let mut centre = [0; 3];
                centre[axis] = side;
                for sa in [-1, 1] {
                    for sb in [-1, 1] {
                        let (mut pa, mut pb, mut corner) = (centre, centre, centre);
                        pa[a] = sa;
                        pb[b] = sb;
                        corner[a] = sa;
                        corner[b] = sb;
                        tri_ids.push([id(centre), id(pa), id(corner)]);
                        tri_ids.push([id(centre), id(pb), id(corner)]);
                    }
                }
            }
        }
        let phys = |o: [i32; 3]| Vector3::new(o[0] as f64 * spacing[0], o[1] as f64 * spacing[1], o[2] as f64 * spacing[2]);
        let mut triangles = Vec::new();
        let mut edges: Vec<[usize; 2]> = Vec::new();
        for t in tri_ids {
            let p = Matrix3::from_columns(&[phys(offsets[t[0]]), phys(offsets[t[1]]), phys(offsets[t[2]])]);
            let inv_t = p.transpose().try_inverse().expect("face triangles avoid the origin");
            triangles.push((t, inv_t));
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
                let e = [a.min(b), a.max(b)];
                if !edges.contains(&e) {
                    edges.push(e);
                }
            }
        }
        let mut incident_triangles = vec![Vec::new(); offsets.len()];
        for (n, (t, _)) in triangles.iter().enumerate() {
            for &v in t {
                incident_triangles[v].push(n);
            }
        }
        let mut incident_edges = vec![Vec::new(); offsets.len()];
        for (n, e) in edges.iter().enumerate() {
            incident_edges[e[0]].push(n);
            incident_edges[e[1]].push(n);
        }
        Self { offsets, triangles, edges, incident_triangles, incident_edges }
    }
}

/// Smallest `u_a + s δ + ‖p_a + s e‖_M` over `s ∈ [0, 1]`, interior critical point only.
fn edge_value(m: &Matrix3<f64>, pa: &Vector3<f64>, pb: &Vector3<f64>, ua: f64, ub: f64) -> f64 {
    let e = pb - pa;
    let delta = ub - ua;
    let a = e.dot(&(m * e));
    let b = pa.dot(&(m * e));
    let c = pa.dot(&(m * pa));
    let d2 = delta * delta;
    if a <= d2 {
        return f64::INFINITY;
    }
    let w = -delta.signum() * delta.abs() * ((a * c - b * b).max(0.0) / (a - d2)).sqrt();
    let s = (w - b) / a;
    if !(0.0..=1.0).contains(&s) {
        return f64::INFINITY;
    }
    ua + s * delta + (a * s * s + 2.0 * b * s + c).max(0.0).sqrt()
}

/// Value with `u` linear on the cone of a triangle, if the characteristic enters
/// through that triangle.
fn triangle_value(dual: &Matrix3<f64>, inv_t: &Matrix3<f64>, u: &Vector3<f64>) -> f64 {
    let ones = Vector3::new(1.0, 1.0, 1.0);
    let a = inv_t * ones;
    let b = inv_t * u;
    let da = dual * a;
    let alpha = a.dot(&da);
    let beta = b.dot(&da);
    let gamma = b.dot(&(dual * b)) - 1.0;
    let disc = beta * beta - alpha * gamma;
    if disc < 0.0 {
        return f64::INFINITY;
    }
    let v = (beta + disc.sqrt()) / alpha;
    if v < u.max() {
        return f64::INFINITY;
    }
    // The characteristic arrives from −D∇u, which must lie in the triangle's cone.
    let grad = b - v * a;
    let lambda = inv_t.transpose() * (-(dual * grad));
    if lambda.iter().any(|&l| l < -1e-12) {
        return f64::INFINITY;
    }
    v
}

impl EikonalSolver for SemiLagrangian {
    fn name(&self) -> &'static str {
        "semi-lagrangian"
    }

    fn solve(&self, problem: &Problem) -> Result<DistanceGrid> {
        problem.spec.validate()?;
        if problem.spec.is_cuspless() {
            return Err(Error::Config("the semi-lagrangian solver supports the riemannian scheme only".into()));
        }
        let g = &problem.grid;
        let geometry = problem.spec.preset.geometry();
        let costs = problem.node_costs()?;
        let (nx, nt) = (g.dims[0], g.dims[2]);
        let excluded: Vec<bool> = (0..nx).map(|i| problem.excluded_row(i)).collect();
        // Unit-cost metric and dual per (x, θ) column pair.
        let mut metrics = vec![(Matrix3::zeros(), Matrix3::zeros()); nx * nt];
        for k in 0..nt {
            for i in 0..nx {
                if !excluded[i] {
                    let p = [g.coord(0, i as f64), 0.0, g.coord(2, k as f64)];
                    metrics[i + nx * k] = assemble_metric(geometry.as_ref(), &p, problem.spec.xi, problem.spec.eps, 1.0)?;
                }
            }
        }
        let simplices = Simplices::new(&g.spacing);
        let phys: Vec<Vector3<f64>> =
            simplices.offsets.iter().map(|o| Vector3::new(o[0] as f64 * g.spacing[0], o[1] as f64 * g.spacing[1], o[2] as f64 * g.spacing[2])).collect();

        let n = g.len();
        let mut w = vec![f64::INFINITY; n];
        let mut state = vec![NodeState::Far; n];
        for (idx, s) in state.iter_mut().enumerate() {
            if excluded[idx % nx] {
                *s = NodeState::Excluded;
            }
        }
        let mut heap = IndexedHeap::new(n);
        for (y, v) in seed_values(problem, |i| excluded[i], false)? {
            w[y] = v;
            state[y] = NodeState::Trial;
            heap.push_or_decrease(y, v);
        }

        let mut values = [f64::INFINITY; 26];
        while let Some((_, x)) = heap.pop() {
            state[x] = NodeState::Accepted;
            if problem.stop_radius.is_some_and(|r| w[x] > r) {
                break;
            }
            let (xi_, xj, xk) = g.unravel(x);
            for (q, o) in simplices.offsets.iter().enumerate() {
                // The list is symmetric: −o sits at 25 − q, and x is at −o from y.
                let from = 25 - q;
                let Some(y) = neighbour(g, xi_, xj, xk, *o) else { continue };
                if state[y] == NodeState::Excluded {
                    continue;
                }
                let (i, j, k) = g.unravel(y);
                let c2 = costs[i + nx * j].powi(2);
                let (m0, d0) = &metrics[i + nx * k];
                let (m, dual) = (m0 * c2, d0 / c2);
                values.iter_mut().for_each(|v| *v = f64::NAN);
                let mut fetch = |v: usize| -> f64 {
                    if values[v].is_nan() {
                        values[v] = neighbour(g, i, j, k, simplices.offsets[v]).map_or(f64::INFINITY, |z| w[z]);
                    }
                    values[v]
                };
                let ux = fetch(from);
                let mut best = ux + phys[from].dot(&(m * phys[from])).sqrt();
                for &e in &simplices.incident_edges[from] {
                    let [a, b] = simplices.edges[e];
                    let (ua, ub) = (fetch(a), fetch(b));
                    if ua.is_finite() && ub.is_finite() {
                        best = best.min(edge_value(&m, &phys[a], &phys[b], ua, ub));
                    }
                }
                for &t in &simplices.incident_triangles[from] {
                    let (ids, inv_t) = &simplices.triangles[t];
                    let u = Vector3::new(fetch(ids[0]), fetch(ids[1]), fetch(ids[2]));
                    if u.iter().all(|v| v.is_finite()) {
                        best = best.min(triangle_value(&dual, inv_t, &u));
                    }
                }
                if best < w[y] * (1.0 - self.tolerance) {
                    w[y] = best;
                    state[y] = NodeState::Trial;
                    heap.push_or_decrease(y, best);
                }
            }
        }
        Ok(DistanceGrid { grid: *g, spec: problem.spec.clone(), w, state, seed: problem.seed, cost: costs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangulation_covers_the_cube_surface() {
        let s = Simplices::new(&[1.0, 1.0, 1.0]);
        assert_eq!(s.offsets.len(), 26);
        assert_eq!(s.triangles.len(), 48);
        // Euler characteristic of a sphere: V − E + F = 2.
        assert_eq!(26 - s.edges.len() as i64 + 48, 2);
        for (q, o) in s.offsets.iter().enumerate() {
            assert_eq!(s.offsets[25 - q], o.map(|c| -c));
        }
    }

    #[test]
    fn linear_data_is_exact_in_the_isotropic_case() {
        // u(z) = ⟨g, z⟩ with |g| = 1 gives u(0) = 0 through the triangle it points into.
        let s = Simplices::new(&[1.0, 1.0, 1.0]);
        let g = Vector3::new(0.6, 0.48, 0.64);
        let eye = Matrix3::identity();
        let mut best = f64::INFINITY;
        for (ids, inv_t) in &s.triangles {
            let u = Vector3::from_fn(|r, _| {
                let o = s.offsets[ids[r]];
                -g.dot(&Vector3::new(o[0] as f64, o[1] as f64, o[2] as f64))
            });
            best = best.min(triangle_value(&eye, inv_t, &(u + Vector3::repeat(5.0))));
        }
        assert!((best - 5.0).abs() < 1e-12);
    }
}
