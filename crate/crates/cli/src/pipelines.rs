//! Multi-step experiments: SE(2) against SO(3), and sub-Riemannian against
//! isotropic Riemannian tracking.

use serde::Serialize;
use srgeo::cost::synthetic::{render, Tube};
use srgeo::cost::{build_cost, CostMap, ScalarImage, VesselnessParams};
use srgeo::eikonal::{se2_solve, solve, Grid3D, MetricSpec, Preset, Problem};
use srgeo::optics::EyeModel;
use srgeo::tracking::{backtrack, Track, KAPPA_SENTINEL};
use srgeo::{Error, Result};

/// Sphere chart point and orientation of a planar point and direction.
pub fn lift_planar(eye: &EyeModel, v: [f64; 3]) -> Result<[f64; 3]> {
    if !eye.in_view(v[0], v[1]) {
        return Err(Error::OutOfView { x: v[0], y: v[1] });
    }
    let (x, y) = eye.unproject_to_sphere(v[0], v[1])?;
    Ok([x, y, eye.lift_direction(v[0], v[1], v[2])?])
}

fn planar_points(t: &Track) -> Vec<[f64; 2]> {
    t.samples.iter().map(|s| s.planar).collect()
}

fn nearest(p: [f64; 2], curve: &[[f64; 2]]) -> (usize, f64) {
    curve.iter().enumerate().map(|(k, q)| (k, (p[0] - q[0]).hypot(p[1] - q[1]))).fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
}

/// Symmetric Hausdorff distance between two sampled curves.
pub fn hausdorff(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    let one = |u: &[[f64; 2]], v: &[[f64; 2]]| u.iter().map(|p| nearest(*p, v).1).fold(0.0, f64::max);
    one(a, b).max(one(b, a))
}

fn mean_abs(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.filter(|k| k.abs() < KAPPA_SENTINEL).fold((0.0, 0usize), |(s, n), k| (s + k.abs(), n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

#[derive(Debug, Clone)]
pub struct CompareConfig {
    pub v0: [f64; 3],
    pub v1: [f64; 3],
    pub xi: f64,
    pub eps: f64,
    pub eye: EyeModel,
    /// `n, n, nθ` for both groups.
    pub grid: [usize; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    /// Start and end coincide; nothing was solved.
    pub trivial: bool,
    pub se2_length: f64,
    pub so3_length: f64,
    /// Planar distance from the seed end of each track to `V0`.
    pub se2_seed_mismatch: f64,
    pub so3_seed_mismatch: f64,
    /// Planar distance from the first sample of each track to `V1`.
    pub se2_end_mismatch: f64,
    pub so3_end_mismatch: f64,
    /// Hausdorff distance between the planar curves.
    pub hausdorff: f64,
    /// Planar size of one SE(2) cell.
    pub cell: f64,
    pub se2_mean_abs_kappa_planar: f64,
    pub so3_mean_abs_kappa_planar: f64,
    pub so3_mean_abs_kappa_g: f64,
    /// Largest planar curvature gap between nearest samples of the two tracks.
    pub max_kappa_planar_gap: f64,
}

pub struct CompareOutcome {
    pub se2: Option<Track>,
    pub so3: Option<Track>,
    pub report: CompareReport,
}

/// Solve and backtrack in both groups between the same planar endpoints.
pub fn compare_se2_so3(cfg: &CompareConfig) -> Result<CompareOutcome> {
    cfg.eye.validate()?;
    let (nu0, nu1) = (lift_planar(&cfg.eye, cfg.v0)?, lift_planar(&cfg.eye, cfg.v1)?);
    let x_max = cfg.eye.x_max();
    let [n, n2, nt] = cfg.grid;
    if n != n2 {
        return Err(Error::Config(format!("compare needs a square grid, got {n}×{n2}")));
    }
    let se2_grid = Grid3D::window(n, n, nt, x_max, x_max)?;
    let cell = se2_grid.spacing[0];
    if (0..3).all(|a| (cfg.v0[a] - cfg.v1[a]).abs() < 1e-12) {
        let report = CompareReport {
            trivial: true,
            se2_length: 0.0,
            so3_length: 0.0,
            se2_seed_mismatch: 0.0,
            so3_seed_mismatch: 0.0,
            se2_end_mismatch: 0.0,
            so3_end_mismatch: 0.0,
            hausdorff: 0.0,
            cell,
            se2_mean_abs_kappa_planar: 0.0,
            so3_mean_abs_kappa_planar: 0.0,
            so3_mean_abs_kappa_g: 0.0,
            max_kappa_planar_gap: 0.0,
        };
        return Ok(CompareOutcome { se2: None, so3: None, report });
    }

    let se2 = se2_solve(&Problem::new(se2_grid, MetricSpec::new(Preset::Se2, cfg.xi, cfg.eps), cfg.v0))?;
    let se2_track = backtrack(&se2, cfg.v1, None)?;

    // The sphere window covers the image of the planar field of view.
    let (mut hx, mut hy) = (0.0f64, 0.0f64);
    for k in 0..=100 {
        let u = -x_max + 2.0 * x_max * k as f64 / 100.0;
        for (px, py) in [(u, x_max), (u, -x_max), (x_max, u), (-x_max, u)] {
            let (x, y) = cfg.eye.unproject_to_sphere(px, py)?;
            hx = hx.max(x.abs());
            hy = hy.max(y.abs());
        }
    }
    let so3_grid = Grid3D::window(n, n, nt, 1.05 * hx, 1.05 * hy)?;
    let so3 = solve(&Problem::new(so3_grid, MetricSpec::new(Preset::So3, cfg.xi, cfg.eps), nu0))?;
    let so3_track = backtrack(&so3, nu1, Some(&cfg.eye))?;

    let (a, b) = (planar_points(&se2_track), planar_points(&so3_track));
    let dist = |p: [f64; 2], v: [f64; 3]| (p[0] - v[0]).hypot(p[1] - v[1]);
    let gap = so3_track
        .samples
        .iter()
        .filter(|s| s.kappa_planar.abs() < KAPPA_SENTINEL)
        .map(|s| (s.kappa_planar - se2_track.samples[nearest(s.planar, &a).0].kappa_planar).abs())
        .filter(|g| g.is_finite() && *g < KAPPA_SENTINEL)
        .fold(0.0, f64::max);
    let report = CompareReport {
        trivial: false,
        se2_length: se2_track.length,
        so3_length: so3_track.length,
        se2_seed_mismatch: dist(*a.last().unwrap(), cfg.v0),
        so3_seed_mismatch: dist(*b.last().unwrap(), cfg.v0),
        se2_end_mismatch: dist(a[0], cfg.v1),
        so3_end_mismatch: dist(b[0], cfg.v1),
        hausdorff: hausdorff(&a, &b),
        cell,
        se2_mean_abs_kappa_planar: mean_abs(se2_track.samples.iter().map(|s| s.kappa_planar)),
        so3_mean_abs_kappa_planar: mean_abs(so3_track.samples.iter().map(|s| s.kappa_planar)),
        so3_mean_abs_kappa_g: mean_abs(so3_track.samples.iter().map(|s| s.kappa_g)),
        max_kappa_planar_gap: gap,
    };
    Ok(CompareOutcome { se2: Some(se2_track), so3: Some(so3_track), report })
}

/// An image with a centreline the tracks are measured against.
#[derive(Debug, Clone)]
pub struct Scene {
    pub image: ScalarImage,
    /// Centreline the tracks should follow, in pixels.
    pub reference: Option<Tube>,
    /// Planar endpoints `X, Y, Θ`.
    pub v0: [f64; 3],
    pub v1: [f64; 3],
}

/// Planar point and direction at fraction `f` of a tube.
pub fn tube_endpoint(image: &ScalarImage, tube: &Tube, f: f64) -> [f64; 3] {
    let (p, d) = (tube.point_at(f), tube.tangent_at(f));
    let [u, v] = image.from_pixel(p[0], p[1]);
    // Rows grow downwards, so the planar angle of (dc, dr) is atan2(dr, dc).
    [u, v, d[1].atan2(d[0])]
}

fn scene(tubes: &[Tube], reference: Tube, eye: &EyeModel) -> Scene {
    let image = render(101, 101, tubes).fit_to_view(eye);
    let (v0, v1) = (tube_endpoint(&image, &reference, 0.1), tube_endpoint(&image, &reference, 0.9));
    Scene { image, reference: Some(reference), v0, v1 }
}

/// A gently curved tube across a 101-pixel image.
pub fn curved_tube_scene(eye: &EyeModel) -> Scene {
    use std::f64::consts::FRAC_PI_2;
    let t = Tube::arc([50.0, 170.0], 120.0, -FRAC_PI_2 - 0.4, -FRAC_PI_2 + 0.4, 2.0, 0.5);
    scene(&[t.clone()], t, eye)
}

/// A tube interrupted in the middle, next to an unbroken parallel one.
pub fn parallel_tubes_scene(eye: &EyeModel) -> Scene {
    let (gap, sep, w, depth) = (12.0, 8.0, 2.0, 0.5);
    let tubes = [
        Tube::segment([10.0, 50.0], [50.0 - gap, 50.0], w, depth),
        Tube::segment([50.0 + gap, 50.0], [90.0, 50.0], w, depth),
        Tube::segment([5.0, 50.0 + sep], [95.0, 50.0 + sep], w, depth),
    ];
    scene(&tubes, Tube::segment([10.0, 50.0], [90.0, 50.0], w, depth), eye)
}

#[derive(Debug, Clone)]
pub struct RiemannConfig {
    pub xi: f64,
    pub lambda: f64,
    /// ε of the sub-Riemannian run.
    pub eps: f64,
    pub eye: EyeModel,
    pub grid: [usize; 3],
    pub window: [f64; 2],
}

impl RiemannConfig {
    pub fn new(eye: EyeModel) -> Self {
        Self { xi: 3.0, lambda: 50.0, eps: 0.1, eye, grid: [101, 101, 81], window: [0.7, 0.7] }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RiemannReport {
    pub sr_length: f64,
    pub riemannian_length: f64,
    /// Largest `|u3|` along the Riemannian track, the use of the forbidden direction.
    pub riemannian_max_abs_u3: f64,
    /// Hausdorff distance between the two planar curves, in pixels.
    pub hausdorff_px: f64,
    /// Largest distance from the reference centreline, in pixels.
    pub sr_excursion_px: Option<f64>,
    pub riemannian_excursion_px: Option<f64>,
    pub cost_floor: f64,
}

pub struct RiemannOutcome {
    pub sr: Track,
    pub riemannian: Track,
    pub cost: CostMap,
    pub report: RiemannReport,
}

/// Track one solve with ε and one with `ε = 1` on the same image cost.
pub fn riemann_compare(scene: &Scene, cfg: &RiemannConfig) -> Result<RiemannOutcome> {
    let cost = build_cost(&scene.image, &VesselnessParams::default(), cfg.lambda, cfg.eye)?;
    let [nx, ny, nt] = cfg.grid;
    let grid = Grid3D::window(nx, ny, nt, cfg.window[0], cfg.window[1])?;
    let field = cost.lift(&grid)?;
    let (g0, g1) = (lift_planar(&cfg.eye, scene.v0)?, lift_planar(&cfg.eye, scene.v1)?);
    let run = |eps: f64| -> Result<Track> {
        let d = solve(&Problem::new(grid, MetricSpec::new(Preset::So3, cfg.xi, eps), g0).with_cost(field.clone()))?;
        backtrack(&d, g1, Some(&cfg.eye))
    };
    let (sr, riemannian) = (run(cfg.eps)?, run(1.0)?);
    let px = |t: &Track| -> Vec<[f64; 2]> { t.samples.iter().map(|s| scene.image.to_pixel(s.planar[0], s.planar[1])).collect() };
    let excursion = |t: &Track| scene.reference.as_ref().map(|r| px(t).into_iter().map(|p| r.distance(p)).fold(0.0, f64::max));
    let report = RiemannReport {
        sr_length: sr.length,
        riemannian_length: riemannian.length,
        riemannian_max_abs_u3: riemannian.samples.iter().map(|s| s.u3.abs()).fold(0.0, f64::max),
        hausdorff_px: hausdorff(&px(&sr), &px(&riemannian)),
        sr_excursion_px: excursion(&sr),
        riemannian_excursion_px: excursion(&riemannian),
        cost_floor: cost.floor(),
    };
    Ok(RiemannOutcome { sr, riemannian, cost, report })
}
