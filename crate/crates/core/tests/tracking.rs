//! Backtracking through distance maps computed with uniform cost.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use srgeo::eikonal::{solve, solve_cuspless, DistanceGrid, Grid3D, MetricSpec, Preset, Problem};
use srgeo::geodesics::ClosedFormS;
use srgeo::lie_so3::{wrap_angle, Chart};
use srgeo::optics::EyeModel;
use srgeo::tracking::{backtrack, backtrack_cuspless, flags, Track, TrackSample};
use srgeo::Error;

const XI: f64 = 1.5;

fn problem() -> Problem {
    Problem::new(Grid3D::so3_full(101, 201, 201).unwrap(), MetricSpec::new(Preset::So3, XI, 0.1), [0.0; 3]).with_stop_radius(2.3)
}

fn dist() -> &'static DistanceGrid {
    static D: OnceLock<DistanceGrid> = OnceLock::new();
    D.get_or_init(|| solve(&problem()).unwrap())
}

fn cuspless_dist() -> &'static DistanceGrid {
    static D: OnceLock<DistanceGrid> = OnceLock::new();
    D.get_or_init(|| solve_cuspless(&problem()).unwrap())
}

/// Largest per-axis offset in cells.
fn cells(d: &DistanceGrid, a: &Chart, b: &Chart) -> f64 {
    let s = d.grid.spacing;
    [(a.x - b.x) / s[0], wrap_angle(a.y - b.y) / s[1], wrap_angle(a.theta - b.theta) / s[2]].iter().map(|v| v.abs()).fold(0.0, f64::max)
}

fn check_invariants(d: &DistanceGrid, track: &Track, g1: [f64; 3]) {
    let first = track.samples[0].chart;
    assert_eq!(first.as_array(), g1);
    let last = track.samples.last().unwrap().chart;
    assert!(cells(d, &last, &Chart::new(0.0, 0.0, 0.0)) <= 1.0 + 1e-9, "last sample {last:?}");
    for p in track.samples.windows(2) {
        assert!(p[1].w < p[0].w - 1e-12, "W not decreasing: {} then {}", p[0].w, p[1].w);
    }
}

#[test]
fn great_circle_ahead_is_recovered() {
    let d = dist();
    let g1 = [0.6, 0.0, 0.0];
    let track = backtrack(d, g1, None).unwrap();
    check_invariants(d, &track, g1);
    for s in &track.samples {
        assert!(cells(d, &s.chart, &Chart::new(s.chart.x, 0.0, 0.0)) < 1.0, "{:?}", s.chart);
        assert!(s.kappa_g.abs() < 0.05, "κ_g = {}", s.kappa_g);
    }
    assert!((track.length - XI * 0.6).abs() < 0.02 * XI * 0.6);
}

fn exact_end(h2: f64, frac: f64) -> (ClosedFormS, f64, [f64; 3]) {
    let g = ClosedFormS::new(h2, 0.0, XI).unwrap();
    let s_end = frac * g.s_max.min(std::f64::consts::FRAC_PI_2);
    let c = g.point_at(s_end).unwrap().chart;
    (g, s_end, [c.x, c.y, c.theta])
}

#[test]
fn tracks_follow_exact_cuspless_geodesics() {
    let d = dist();
    for h2 in [-0.45, 0.45, 0.99] {
        let (g, s_end, g1) = exact_end(h2, 0.8);
        let track = backtrack(d, g1, None).unwrap();
        check_invariants(d, &track, g1);
        let exact: Vec<_> = (0..=1000).map(|k| g.point_at(s_end * k as f64 / 1000.0).unwrap().spherical_projection()).collect();
        for p in track.spherical_points() {
            let gap = exact.iter().map(|e| (p - e).norm()).fold(f64::INFINITY, f64::min);
            assert!(gap < 2.0 * d.grid.spacing[0], "h2={h2}: gap {gap}");
        }
        // Length of the recomputed SR functional, plus the remainder inside the seed cell.
        let length = track.sr_length() + track.samples.last().unwrap().w;
        assert!((length - track.length).abs() < 0.03 * track.length, "{length} vs {}", track.length);
    }
}

fn interpolate(samples: &[TrackSample], t: f64) -> (f64, f64) {
    let k = samples.partition_point(|s| s.t < t).clamp(1, samples.len() - 1);
    let (a, b) = (&samples[k - 1], &samples[k]);
    let f = ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
    (a.u1 + f * (b.u1 - a.u1), a.u2 + f * (b.u2 - a.u2))
}

#[test]
fn forward_integration_with_recorded_controls_returns_to_the_endpoint() {
    let d = dist();
    let (_, _, g1) = exact_end(0.45, 0.8);
    let track = backtrack(d, g1, None).unwrap();
    let samples = &track.samples;
    let t_end = samples.last().unwrap().t;
    let field = |p: &[f64; 3], t_back: f64| -> [f64; 3] {
        let (u1, u2) = interpolate(samples, t_back);
        let f = Preset::So3.frame(p).unwrap();
        std::array::from_fn(|a| u1 * f[0][a] + u2 * f[1][a])
    };
    // Forward time runs from the seed end, so the backtracking clock runs down.
    let n = 4000;
    let h = t_end / n as f64;
    let mut p = samples.last().unwrap().chart.as_array();
    for k in 0..n {
        let tb = t_end - k as f64 * h;
        let at = |q: &[f64; 3], v: &[f64; 3], f: f64| -> [f64; 3] { std::array::from_fn(|a| q[a] + f * h * v[a]) };
        let k1 = field(&p, tb);
        let k2 = field(&at(&p, &k1, 0.5), tb - 0.5 * h);
        let k3 = field(&at(&p, &k2, 0.5), tb - 0.5 * h);
        let k4 = field(&at(&p, &k3, 1.0), tb - h);
        p = std::array::from_fn(|a| p[a] + h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]));
    }
    let end = Chart::new(p[0], p[1], p[2]);
    assert!(cells(d, &end, &Chart::new(g1[0], g1[1], g1[2])) < 2.0, "{end:?} vs {g1:?}");
}

#[test]
fn corollary_curvature_matches_gauss_bonnet_away_from_endpoints() {
    let d = dist();
    let (_, _, g1) = exact_end(0.45, 0.8);
    let track = backtrack(d, g1, None).unwrap();
    let gb = track.gauss_bonnet_curvature(3.0 * d.grid.spacing[0]);
    let mut checked = 0;
    for (s, k) in track.samples.iter().zip(&gb) {
        if s.tau > 0.1 && s.tau < 0.7 {
            assert!((s.kappa_g - k).abs() < 0.05 * k.abs(), "τ={}: {} vs {k}", s.tau, s.kappa_g);
            checked += 1;
        }
    }
    assert!(checked > 50);
}

#[test]
fn planar_curvature_has_the_sign_pattern_of_geodesic_curvature() {
    let d = dist();
    let eye = EyeModel::default();
    for h2 in [-0.45, 0.45] {
        let (_, _, g1) = exact_end(h2, 0.6);
        let track = backtrack(d, g1, Some(&eye)).unwrap();
        let inner: Vec<_> = track.samples.iter().filter(|s| s.tau > 0.1 && s.tau < 0.7).collect();
        assert!(inner.iter().all(|s| s.kappa_planar.signum() == s.kappa_g.signum()), "h2={h2}");
        assert!(inner.iter().any(|s| (s.kappa_planar - s.kappa_g).abs() > 1e-3));
    }
}

#[test]
fn cuspless_backtracking_keeps_forward_motion() {
    let d = cuspless_dist();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut done = 0;
    while done < 5 {
        let g1 = [rng.gen_range(0.25..0.8), rng.gen_range(-0.6..0.6), rng.gen_range(-1.5..1.5)];
        if !srgeo::eikonal::sample_w(d, &g1).is_ok_and(|s| s.w.is_finite() && s.w < 2.0 && s.w > 0.3) {
            continue;
        }
        let track = backtrack_cuspless(d, g1, None).unwrap();
        assert_eq!(track.rule, "cuspless");
        assert!(track.samples.iter().all(|s| s.u1 >= -1e-9));
        done += 1;
    }
    // Ahead of the seed the two descents agree.
    let g1 = [0.5, 0.05, 0.1];
    let (a, b) = (backtrack(dist(), g1, None).unwrap(), backtrack(d, g1, None).unwrap());
    assert!((a.length - b.length).abs() < 0.02 * a.length);
    for q in &b.samples {
        let gap = a.samples.iter().map(|p| cells(d, &p.chart, &q.chart)).fold(f64::INFINITY, f64::min);
        assert!(gap < 2.0, "{:?} {gap}", q.chart);
    }
}

#[test]
fn invalid_endpoints_are_reported() {
    let d = dist();
    assert!(matches!(backtrack(d, [0.0, 0.0, 0.0], None), Err(Error::Config(_))));
    // Beyond the stop radius the map holds no values.
    let far = backtrack(d, [0.0, 3.1, 0.0], None).unwrap_err();
    assert_eq!(far.exit_code(), 4, "{far}");
}

#[test]
fn csv_has_the_documented_columns_and_no_nan() {
    let d = dist();
    let (_, _, g1) = exact_end(0.99, 1.0);
    let track = backtrack(d, g1, None).unwrap();
    let csv = track.to_csv();
    let mut lines = csv.lines().skip(1);
    assert_eq!(lines.next().unwrap(), "tau,x,y,theta,X,Y,n1,n2,n3,u1,u2,kappa_g,kappa_planar,W,flags");
    assert!(!csv.contains("NaN") && !csv.contains("inf"));
    // The endpoint sits at the cusp, where κ_g is reported by sentinel.
    let first = &track.samples[0];
    assert!(first.flags & flags::CUSP != 0 || first.kappa_g.abs() > 10.0, "{first:?}");
    let path = track.to_geodesic_path();
    assert_eq!(path.samples.len(), track.samples.len());
    assert!(path.samples[0].param.abs() < 1e-12);
}
