//! Distance maps on small grids: symmetries, scaling and the interpolant.

use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use srgeo::eikonal::{
    read_distance_grid, sample_w, se2_solve, solve, solve_cuspless, solvers, write_distance_grid, Cost2D, CostField, DistanceGrid, Grid3D,
    MetricSpec, NodeState, Preset, Problem,
};
use srgeo::Error;

const XI: f64 = 1.5;

fn so3_problem(eps: f64) -> Problem {
    Problem::new(Grid3D::so3_full(101, 201, 201).unwrap(), MetricSpec::new(Preset::So3, XI, eps), [0.0; 3]).with_stop_radius(2.0)
}

fn base() -> &'static DistanceGrid {
    static D: OnceLock<DistanceGrid> = OnceLock::new();
    D.get_or_init(|| solve(&so3_problem(0.1)).unwrap())
}

fn finite_pairs<'a>(a: &'a DistanceGrid, b: &'a DistanceGrid) -> impl Iterator<Item = (f64, f64)> + 'a {
    a.w.iter().zip(&b.w).filter(|(u, v)| u.is_finite() && v.is_finite()).map(|(u, v)| (*u, *v))
}

#[test]
fn seed_is_zero_and_values_are_nonnegative() {
    let d = base();
    let (i, j, k) = d.grid.nearest(&[0.0; 3]).unwrap();
    assert_eq!(d.value(i, j, k), 0.0);
    assert!(d.w.iter().all(|v| *v >= 0.0));
    // Pole rows stay excluded and unreached.
    assert_eq!(d.state[d.grid.index(0, 3, 3)], NodeState::Excluded);
    assert!(d.value(0, 3, 3).is_infinite());
}

#[test]
fn uniform_cost_scales_distance_exactly() {
    let d2 = solve(&so3_problem(0.1).with_cost(CostField::Uniform(1.5)).with_stop_radius(3.0)).unwrap();
    let mut n = 0;
    for (u, v) in finite_pairs(base(), &d2) {
        if u <= 1.9 {
            assert!((v - 1.5 * u).abs() <= 1e-12 * v.max(1.0), "{u} {v}");
            n += 1;
        }
    }
    assert!(n > 10_000);
}

#[test]
fn raising_cost_locally_never_lowers_distance() {
    let g = base().grid;
    let values = (0..g.dims[0] * g.dims[1])
        .map(|n| {
            let (x, y) = (g.coord(0, (n % g.dims[0]) as f64), g.coord(1, (n / g.dims[0]) as f64));
            1.0 + 2.0 * (-((x - 0.3).powi(2) + y * y) / 0.02).exp()
        })
        .collect();
    let cost = Cost2D::new([g.dims[0], g.dims[1]], [g.spacing[0], g.spacing[1]], values).unwrap();
    let raised = so3_problem(0.1).with_cost(CostField::Grid(Arc::new(cost)));
    // The first-order scheme is monotone, so the comparison holds node by node.
    let first = solvers().create("fast-marching-first-order").unwrap();
    let (a, b) = (first.solve(&so3_problem(0.1)).unwrap(), first.solve(&raised).unwrap());
    let both = |n: usize| a.state[n] == NodeState::Accepted && b.state[n] == NodeState::Accepted;
    assert!((0..a.w.len()).filter(|&n| both(n)).all(|n| b.w[n] >= a.w[n]));
    // The second-order correction gives up strict monotonicity by a small margin.
    let b = solve(&raised).unwrap();
    for (n, (&u, &v)) in base().w.iter().zip(&b.w).enumerate() {
        if base().state[n] == NodeState::Accepted && b.state[n] == NodeState::Accepted {
            assert!(v >= u * (1.0 - 1e-2), "{u} {v}");
        }
    }
}

#[test]
fn mirror_symmetry_through_the_initial_great_circle() {
    let d = base();
    let [nx, ny, nt] = d.grid.dims;
    let mut worst = 0.0f64;
    for k in 0..nt {
        for j in 0..ny {
            for i in 0..nx {
                let (a, b) = (d.value(i, j, k), d.value(i, ny - 1 - j, nt - 1 - k));
                if a.is_finite() && b.is_finite() && a.max(b) < 1.9 {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    assert!(worst < 0.5 * d.grid.spacing[0] * XI, "mirror mismatch {worst}");
}

#[test]
fn smaller_eps_gives_larger_distances() {
    let stiff = solve(&so3_problem(0.05)).unwrap();
    let tol = 2.0 * base().grid.spacing[0] * XI;
    let mut larger = 0;
    let mut total = 0;
    for (u, v) in finite_pairs(base(), &stiff) {
        if u < 1.8 && v < 1.8 {
            assert!(u <= v + tol, "W(ε=0.1) = {u}, W(ε=0.05) = {v}");
            total += 1;
            larger += (v > u) as usize;
        }
    }
    assert!(larger * 10 > total * 8, "{larger} of {total}");
}

#[test]
fn moving_straight_ahead_costs_xi_per_radian() {
    let d = base();
    for i in [60, 68, 76] {
        let x = d.grid.coord(0, i as f64);
        let w = d.value(i, 100, 100);
        assert!((w - XI * x).abs() < 0.03 * XI * x, "x={x} W={w}");
    }
}

#[test]
fn eikonal_residual_is_small_at_regular_points() {
    let d = base();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut residuals = Vec::new();
    while residuals.len() < 1000 {
        let p = [rng.gen_range(-1.2..1.2), rng.gen_range(-1.5..1.5), rng.gen_range(-3.0..3.0)];
        let Ok(s) = sample_w(d, &p) else { continue };
        if !(s.w > 0.4 && s.w < 1.8) || s.flagged {
            continue;
        }
        let h = (s.frame[0] / XI).powi(2) + s.frame[1].powi(2) + (0.1 * s.frame[2] / XI).powi(2);
        residuals.push((h.sqrt() - 1.0).abs());
    }
    residuals.sort_by(f64::total_cmp);
    let median = residuals[residuals.len() / 2];
    let within = residuals.iter().filter(|r| **r < 0.05).count();
    // Points near the cut locus, where W has a kink, make up the tail.
    assert!(median < 0.02 && within >= 850, "median {median}, {within} of 1000 below 0.05");
}

#[test]
fn interpolant_derivatives_match_finite_differences() {
    let d = base();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 50 {
        let p = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.5..1.5), rng.gen_range(-3.0..3.0)];
        let Ok(s) = sample_w(d, &p) else { continue };
        if !(s.w > 0.3 && s.w < 1.8) {
            continue;
        }
        let h = 1e-6;
        for a in 0..3 {
            let (mut lo, mut hi) = (p, p);
            lo[a] -= h;
            hi[a] += h;
            let fd = (sample_w(d, &hi).unwrap().w - sample_w(d, &lo).unwrap().w) / (2.0 * h);
            let scale = s.grad.iter().map(|g| g.abs()).fold(0.0, f64::max);
            assert!((fd - s.grad[a]).abs() < 1e-3 * scale, "axis {a}: {fd} vs {}", s.grad[a]);
        }
        checked += 1;
    }
    // Nodes reproduce the stored values.
    let (i, j, k) = (67, 83, 117);
    assert!((sample_w(d, &d.grid.point(i, j, k)).unwrap().w - d.value(i, j, k)).abs() < 1e-12);
}

#[test]
fn cuspless_distance_dominates_and_agrees_ahead() {
    let d = base();
    let c = solve_cuspless(&so3_problem(0.1)).unwrap();
    // The two schemes use different stencils; allow one cell of metric length.
    let tol = XI * d.grid.spacing[0];
    for (n, (&u, &v)) in d.w.iter().zip(&c.w).enumerate() {
        if u < 1.8 && v.is_finite() {
            assert!(v >= u - tol, "node {n}: {v} < {u}");
        }
    }
    // Ahead of the seed along its direction both agree.
    for i in [60, 68, 76] {
        let (u, v) = (d.value(i, 100, 100), c.value(i, 100, 100));
        assert!((u - v).abs() < 0.02 * u, "{u} {v}");
    }
    // Straight behind it the cuspless distance is much larger.
    let (u, v) = (d.value(35, 100, 100), c.value(35, 100, 100));
    assert!(v > 1.5 * u, "{u} {v}");
}

#[test]
fn semi_lagrangian_solver_agrees_with_fast_marching() {
    let p = Problem::new(Grid3D::so3_full(31, 61, 61).unwrap(), MetricSpec::new(Preset::So3, XI, 0.1), [0.0; 3]);
    let a = solvers().create("fast-marching").unwrap().solve(&p).unwrap();
    let b = solvers().create("semi-lagrangian").unwrap().solve(&p).unwrap();
    let (mut sum, mut n) = (0.0, 0);
    for (u, v) in finite_pairs(&a, &b) {
        if u > 0.3 && u < 1.5 {
            sum += ((u - v) / u).abs();
            n += 1;
        }
    }
    assert!(n > 300 && sum / (n as f64) < 0.1, "mean relative gap {} over {n} nodes", sum / n as f64);
}

#[test]
fn non_positive_cost_is_rejected() {
    let e = solve(&so3_problem(0.1).with_cost(CostField::Uniform(0.0))).unwrap_err();
    assert!(matches!(e, Error::Config(_)));
    assert_eq!(e.exit_code(), 2);
}

fn se2_problem(seed: [f64; 3]) -> Problem {
    Problem::new(Grid3D::window(61, 61, 63, 1.5, 1.5).unwrap(), MetricSpec::new(Preset::Se2, 2.0, 0.1), seed)
}

#[test]
fn se2_straight_line_and_translation() {
    let d = se2_solve(&se2_problem([0.0; 3])).unwrap();
    let g = d.grid;
    for i in [38, 45, 55] {
        let x = g.coord(0, i as f64);
        let w = d.value(i, 30, 31);
        assert!((w - 2.0 * x).abs() < 0.02 * 2.0 * x, "x={x} W={w}");
    }
    // Shifting the seed by whole cells shifts the map.
    let shift = 5;
    let moved = se2_solve(&se2_problem([shift as f64 * g.spacing[0], 0.0, 0.0])).unwrap();
    for (i, j, k) in [(40, 30, 31), (35, 38, 20), (31, 25, 45)] {
        let (u, v) = (d.value(i, j, k), moved.value(i + shift, j, k));
        assert!((u - v).abs() < 1e-9 * u.max(1.0), "{u} {v}");
    }
    assert!(se2_solve(&so3_problem(0.1)).is_err());
}

#[test]
fn distance_grid_file_round_trip() {
    let d = solve(&Problem::new(Grid3D::so3_full(11, 21, 21).unwrap(), MetricSpec::new(Preset::So3, 1.0, 0.2).cuspless(), [0.0; 3])).unwrap();
    let dir = std::env::temp_dir().join(format!("srgeo-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("w.srfm");
    write_distance_grid(&path, &d, None).unwrap();
    let back = read_distance_grid(&path).unwrap();
    assert_eq!(back.grid, d.grid);
    assert_eq!(back.spec, d.spec);
    assert_eq!(back.seed, d.seed);
    assert_eq!(back.cost, d.cost);
    assert!(back.w.iter().zip(&d.w).all(|(a, b)| a.to_bits() == b.to_bits()));
    std::fs::remove_dir_all(&dir).unwrap();
}
