//! Fast marching with adaptive stencils from Selling's decomposition.
//!
//! Every scheme term is `ρ max(0, u(x) − u(x − e))²`, so the discrete equation
//! at a node is a monotone quadratic in its value. The decomposition depends on
//! the first and last chart coordinates only, and a cost divides it by `C²`, so
//! the stencils and their reverses are tabulated once per `(x, θ)` column pair.

use nalgebra::Vector3;

use super::geometry::{assemble_metric, GroupGeometry};
use super::heap::IndexedHeap;
use super::scheme::{schemes, EikonalScheme};
use super::{DistanceGrid, EikonalSolver, Grid3D, NodeState, Problem};
use crate::error::{Error, Result};
use crate::lie_so3::wrap_angle;

#[derive(Debug, Clone, Copy)]
pub struct SellingFastMarching {
    /// Replace `u(x − e)` by `(4u(x − e) − u(x − 2e))/3` where the front allows it.
    pub second_order: bool,
}

impl Default for SellingFastMarching {
    fn default() -> Self {
        Self { second_order: true }
    }
}

#[derive(Clone, Copy)]
struct Term {
    off: [i32; 3],
    weight: f64,
    symmetric: bool,
}

struct Tables {
    nx: usize,
    starts: Vec<u32>,
    terms: Vec<Term>,
    rstarts: Vec<u32>,
    roffs: Vec<[i32; 3]>,
}

impl Tables {
    fn build(problem: &Problem, scheme: &dyn EikonalScheme, geometry: &dyn GroupGeometry) -> Result<Self> {
        let g = &problem.grid;
        let (nx, nt) = (g.dims[0], g.dims[2]);
        let mut starts = Vec::with_capacity(nx * nt + 1);
        let mut terms = Vec::new();
        let mut reverse: Vec<Vec<[i32; 3]>> = vec![Vec::new(); nx * nt];
        for k in 0..nt {
            for i in 0..nx {
                starts.push(terms.len() as u32);
                if problem.excluded_row(i) {
                    continue;
                }
                let p = [g.coord(0, i as f64), 0.0, g.coord(2, k as f64)];
                for t in scheme.stencil(geometry, &p, &g.spacing, problem.spec.xi, problem.spec.eps)? {
                    terms.push(Term { off: t.offset, weight: t.weight, symmetric: t.symmetric });
                    let signs: &[i32] = if t.symmetric { &[1, -1] } else { &[-1] };
                    for &s in signs {
                        let o = t.offset.map(|c| s * c);
                        let Some(ti) = g.shift(0, i, o[0]) else { continue };
                        let tk = g.shift(2, k, o[2]).expect("angle axis is periodic");
                        reverse[ti + nx * tk].push(o.map(|c| -c));
                    }
                }
            }
        }
        starts.push(terms.len() as u32);
        let mut rstarts = Vec::with_capacity(nx * nt + 1);
        let mut roffs = Vec::new();
        for mut r in reverse {
            r.sort_unstable();
            r.dedup();
            rstarts.push(roffs.len() as u32);
            roffs.extend(r);
        }
        rstarts.push(roffs.len() as u32);
        Ok(Self { nx, starts, terms, rstarts, roffs })
    }

    #[inline]
    fn stencil(&self, i: usize, k: usize) -> &[Term] {
        let key = i + self.nx * k;
        &self.terms[self.starts[key] as usize..self.starts[key + 1] as usize]
    }

    #[inline]
    fn reverse(&self, i: usize, k: usize) -> &[[i32; 3]] {
        let key = i + self.nx * k;
        &self.roffs[self.rstarts[key] as usize..self.rstarts[key + 1] as usize]
    }
}

#[inline]
pub(crate) fn neighbour(g: &Grid3D, i: usize, j: usize, k: usize, o: [i32; 3]) -> Option<usize> {
    Some(g.index(g.shift(0, i, o[0])?, g.shift(1, j, o[1])?, g.shift(2, k, o[2])?))
}

/// Root of `Σ ρ max(0, u − a)² = 1` for pairs `(a, ρ)`.
pub(crate) fn solve_local(pairs: &mut [(f64, f64)]) -> f64 {
    if pairs.is_empty() {
        return f64::INFINITY;
    }
    pairs.sort_unstable_by(|p, q| p.0.total_cmp(&q.0));
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    let mut u = f64::INFINITY;
    for (n, &(a, r)) in pairs.iter().enumerate() {
        s0 += r;
        s1 += r * a;
        s2 += r * a * a;
        let disc = (s1 * s1 - s0 * (s2 - 1.0)).max(0.0);
        u = (s1 + disc.sqrt()) / s0;
        if n + 1 == pairs.len() || u <= pairs[n + 1].0 {
            break;
        }
    }
    u
}

struct State<'a> {
    g: &'a Grid3D,
    tables: &'a Tables,
    w: Vec<f64>,
    state: Vec<NodeState>,
    inv_c2: Vec<f64>,
    second_order: bool,
}

impl State<'_> {
    #[inline]
    fn accepted(&self, n: Option<usize>) -> f64 {
        match n {
            Some(n) if self.state[n] == NodeState::Accepted => self.w[n],
            _ => f64::INFINITY,
        }
    }

    /// Upwind value along `o` and the factor on the term weight.
    #[inline]
    fn upwind(&self, i: usize, j: usize, k: usize, o: [i32; 3]) -> (f64, f64) {
        let u1 = self.accepted(neighbour(self.g, i, j, k, o));
        if self.second_order && u1.is_finite() {
            let u2 = self.accepted(neighbour(self.g, i, j, k, o.map(|c| 2 * c)));
            if u2 <= u1 {
                return ((4.0 * u1 - u2) / 3.0, 2.25);
            }
        }
        (u1, 1.0)
    }

    fn update(&self, i: usize, j: usize, k: usize) -> f64 {
        let scale = self.inv_c2[i + self.g.dims[0] * j];
        let mut pairs = [(0.0, 0.0); 8];
        let mut n = 0;
        for t in self.tables.stencil(i, k) {
            let (mut a, mut r) = self.upwind(i, j, k, t.off.map(|c| -c));
            if t.symmetric {
                let (b, q) = self.upwind(i, j, k, t.off);
                if b < a {
                    (a, r) = (b, q);
                }
            }
            if a.is_finite() && n < pairs.len() {
                pairs[n] = (a, t.weight * r * scale);
                n += 1;
            }
        }
        solve_local(&mut pairs[..n])
    }
}

impl EikonalSolver for SellingFastMarching {
    fn name(&self) -> &'static str {
        "fast-marching"
    }

    fn solve(&self, problem: &Problem) -> Result<DistanceGrid> {
        problem.spec.validate()?;
        let g = &problem.grid;
        let geometry = problem.spec.preset.geometry();
        let scheme = schemes().create(&problem.spec.scheme)?;
        let costs = problem.node_costs()?;
        let tables = Tables::build(problem, scheme.as_ref(), geometry.as_ref())?;
        let n = g.len();
        let mut st = State {
            g,
            tables: &tables,
            w: vec![f64::INFINITY; n],
            state: vec![NodeState::Far; n],
            inv_c2: costs.iter().map(|c| 1.0 / (c * c)).collect(),
            second_order: self.second_order,
        };
        for k in 0..g.dims[2] {
            for j in 0..g.dims[1] {
                for i in 0..g.dims[0] {
                    if tables.stencil(i, k).is_empty() {
                        st.state[g.index(i, j, k)] = NodeState::Excluded;
                    }
                }
            }
        }

        let mut heap = IndexedHeap::new(n);
        for (y, v) in seed_values(problem, |i| tables.stencil(i, 0).is_empty(), scheme.forward_only())? {
            st.w[y] = v;
            st.state[y] = NodeState::Trial;
            heap.push_or_decrease(y, v);
        }

        let mut last = 0.0f64;
        while let Some((_, x)) = heap.pop() {
            let wx = st.w[x];
            if wx < last - 1e-9 * last.max(1.0) {
                return Err(Error::Numeric(format!("causality violated: accepted {wx} after {last}")));
            }
            last = last.max(wx);
            st.state[x] = NodeState::Accepted;
            if problem.stop_radius.is_some_and(|r| wx > r) {
                break;
            }
            let (i, j, k) = g.unravel(x);
            for &d in tables.reverse(i, k) {
                let Some(y) = neighbour(g, i, j, k, d) else { continue };
                if matches!(st.state[y], NodeState::Accepted | NodeState::Excluded) {
                    continue;
                }
                let (yi, yj, yk) = g.unravel(y);
                let u = st.update(yi, yj, yk);
                if u < st.w[y] {
                    st.w[y] = u;
                    st.state[y] = NodeState::Trial;
                    heap.push_or_decrease(y, u);
                }
            }
        }

        Ok(DistanceGrid { grid: *g, spec: problem.spec.clone(), w: st.w, state: st.state, seed: problem.seed, cost: costs })
    }
}

/// Local metric distance from the seed to the nodes of its surrounding cell.
///
/// Forward-only schemes skip the nodes behind the seed.
pub(crate) fn seed_values(problem: &Problem, excluded: impl Fn(usize) -> bool, forward_only: bool) -> Result<Vec<(usize, f64)>> {
    let g = &problem.grid;
    let seed = problem.seed;
    let geometry = problem.spec.preset.geometry();
    let (si, sj, sk) = g.nearest(&seed).ok_or_else(|| Error::Config(format!("seed {seed:?} lies outside the grid")))?;
    if excluded(si) {
        return Err(Error::Config(format!("seed {seed:?} sits on a chart singularity")));
    }
    let c = problem.cost.value(seed[0], seed[1]);
    let (m, _) = assemble_metric(geometry.as_ref(), &seed, problem.spec.xi, problem.spec.eps, c)?;
    let w1 = Vector3::from(geometry.coframe(&seed)[0]);
    let mut out = Vec::with_capacity(27);
    for dk in -1..=1 {
        for dj in -1..=1 {
            for di in -1..=1 {
                let Some(y) = neighbour(g, si, sj, sk, [di, dj, dk]) else { continue };
                let (i, j, k) = g.unravel(y);
                if excluded(i) {
                    continue;
                }
                let p = g.point(i, j, k);
                let mut d = Vector3::new(p[0] - seed[0], p[1] - seed[1], wrap_angle(p[2] - seed[2]));
                if g.periodic[1] {
                    d[1] = wrap_angle(d[1]);
                }
                let centre = (di, dj, dk) == (0, 0, 0);
                if forward_only && !centre && w1.dot(&d) < 0.0 {
                    continue;
                }
                out.push((y, (d.transpose() * m * d)[0].max(0.0).sqrt()));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_solver_matches_closed_forms() {
        // One term: u = a + 1/√ρ.
        assert!((solve_local(&mut [(2.0, 4.0)]) - 2.5).abs() < 1e-15);
        // Two equal terms: 2ρ(u − a)² = 1.
        assert!((solve_local(&mut [(1.0, 1.0), (1.0, 1.0)]) - (1.0 + 0.5f64.sqrt())).abs() < 1e-15);
        // A far neighbour is ignored.
        assert!((solve_local(&mut [(10.0, 1.0), (0.0, 1.0)]) - 1.0).abs() < 1e-15);
        assert!(solve_local(&mut []).is_infinite());
    }
}
