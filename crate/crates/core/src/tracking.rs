//! Steepest-descent backtracking through a distance map, and curvature along
//! the tracked curves.
//!
//! From an endpoint `g1` the curve `γ̇ = −u1 X1 − u2 X2` is integrated with
//! `u1 = X1W / (ξ² C²)`, `u2 = X2W / C²` until it reaches the seed cell. Along it
//! `W` decreases at unit rate, and reversing it gives the forward geodesic with
//! controls `(u1, u2)`.

use nalgebra::Vector3;

use crate::eikonal::{assemble_metric, sample_w, DistanceGrid, Preset};
use crate::error::{Error, Result};
use crate::geodesics::{GeodesicPath, GeodesicSample, Momentum, Parametrization, Provenance};
use crate::lie_so3::{rotation_matrix, wrap_angle, Chart, GroupPoint};
use crate::optics::EyeModel;
use crate::registry::Registry;

/// Stand-in for an infinite curvature in outputs.
pub const KAPPA_SENTINEL: f64 = 1e9;

/// Bits of [`TrackSample::flags`].
pub mod flags {
    /// Interpolation touched the grid border or fell back to trilinear.
    pub const INTERPOLATION: u8 = 1;
    /// `X1 W ≤ 0`: the sample sits at or past a cusp.
    pub const CUSP: u8 = 2;
    /// Planar projection outside the field of view.
    pub const OUT_OF_VIEW: u8 = 4;
}

/// Controls of the descent from the frame derivatives of `W`.
pub trait DescentRule: Send + Sync {
    fn name(&self) -> &'static str;
    /// `(u1, u2, u3)`; horizontal rules leave `u3 = 0`.
    fn controls(&self, frame_w: &[f64; 3], xi: f64, eps: f64, cost: f64) -> [f64; 3];
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SubRiemannianDescent;

/// Only forward motion along `X1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CusplessDescent;

/// Gradient flow of the ε-Riemannian metric, including `X3` motion.
#[derive(Debug, Clone, Copy, Default)]
pub struct RiemannianDescent;

impl DescentRule for SubRiemannianDescent {
    fn name(&self) -> &'static str {
        "sub-riemannian"
    }

    fn controls(&self, fw: &[f64; 3], xi: f64, _eps: f64, cost: f64) -> [f64; 3] {
        let c2 = cost * cost;
        [fw[0] / (xi * xi * c2), fw[1] / c2, 0.0]
    }
}

impl DescentRule for CusplessDescent {
    fn name(&self) -> &'static str {
        "cuspless"
    }

    fn controls(&self, fw: &[f64; 3], xi: f64, _eps: f64, cost: f64) -> [f64; 3] {
        let c2 = cost * cost;
        [fw[0].max(0.0) / (xi * xi * c2), fw[1] / c2, 0.0]
    }
}

impl DescentRule for RiemannianDescent {
    fn name(&self) -> &'static str {
        "riemannian"
    }

    fn controls(&self, fw: &[f64; 3], xi: f64, eps: f64, cost: f64) -> [f64; 3] {
        let c2 = cost * cost;
        [fw[0] / (xi * xi * c2), fw[1] / c2, eps * eps * fw[2] / (xi * xi * c2)]
    }
}

pub fn descent_rules() -> Registry<dyn DescentRule> {
    Registry::<dyn DescentRule>::new("descent rule")
        .register("sub-riemannian", || Box::new(SubRiemannianDescent))
        .register("cuspless", || Box::new(CusplessDescent))
        .register("riemannian", || Box::new(RiemannianDescent))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackSample {
    /// Normalized backtracking time in `[0, 1]`.
    pub tau: f64,
    /// Backtracking time `τ W(g1)`.
    pub t: f64,
    pub chart: Chart,
    pub w: f64,
    /// `(X1 W, X2 W, X3 W)`.
    pub frame_w: [f64; 3],
    /// Controls of the forward geodesic.
    pub u1: f64,
    pub u2: f64,
    /// Zero unless the descent leaves the horizontal plane.
    pub u3: f64,
    pub cost: f64,
    pub kappa_g: f64,
    pub kappa_planar: f64,
    /// Position in the camera plane.
    pub planar: [f64; 2],
    pub flags: u8,
}

/// Backtracked curve, ordered from the endpoint to the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub samples: Vec<TrackSample>,
    pub xi: f64,
    pub eps: f64,
    pub preset: Preset,
    pub rule: String,
    /// `W(g1)`.
    pub length: f64,
}

impl Track {
    /// Samples from the seed to the endpoint.
    pub fn forward(&self) -> Vec<TrackSample> {
        self.samples.iter().rev().cloned().collect()
    }

    /// Forward geodesic parametrized by `t`, with `dW` as momentum.
    pub fn to_geodesic_path(&self) -> GeodesicPath {
        let t_end = self.samples.last().map_or(0.0, |s| s.t);
        let samples = self
            .forward()
            .iter()
            .map(|s| {
                let point = GroupPoint::from_matrix(rotation_matrix(s.chart.x, s.chart.y, s.chart.theta));
                GeodesicSample {
                    param: t_end - s.t,
                    point,
                    momentum: Momentum::new(s.frame_w[0], s.frame_w[1], s.frame_w[2]),
                    u1: s.u1,
                    u2: s.u2,
                    flagged: s.flags != 0,
                }
            })
            .collect();
        GeodesicPath { samples, parametrization: Parametrization::SrArclength, xi: self.xi, provenance: Provenance::FastMarching }
    }

    /// Spherical projections in backtracking order.
    pub fn spherical_points(&self) -> Vec<Vector3<f64>> {
        self.samples.iter().map(|s| sphere_point(self.preset, &s)).collect()
    }

    /// Geodesic curvature of the spherical projection from the curve itself,
    /// signed for forward traversal, in backtracking order.
    pub fn gauss_bonnet_curvature(&self, window: f64) -> Vec<f64> {
        let mut pts = self.spherical_points();
        pts.reverse();
        let mut k = spherical_curvature(&pts, window);
        k.reverse();
        k
    }

    /// `∫ C √(ξ² u1² + u2² + ξ² u3²/ε²) dt` by the trapezoidal rule. The piece
    /// inside the seed cell is not included; it is `W` at the last sample.
    pub fn sr_length(&self) -> f64 {
        let x2 = self.xi * self.xi;
        let f = |s: &TrackSample| s.cost * (x2 * s.u1 * s.u1 + s.u2 * s.u2 + x2 * (s.u3 / self.eps).powi(2)).sqrt();
        self.samples.windows(2).map(|p| 0.5 * (p[1].t - p[0].t) * (f(&p[0]) + f(&p[1]))).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# xi={} preset={} rule={} W={}\n", self.xi, self.preset.name(), self.rule, self.length);
        out.push_str("tau,x,y,theta,X,Y,n1,n2,n3,u1,u2,kappa_g,kappa_planar,W,flags\n");
        for s in &self.samples {
            let n = sphere_point(self.preset, s);
            out.push_str(&format!(
                "{:.10},{:.10},{:.10},{:.10},{:.10},{:.10},{:.10},{:.10},{:.10},{:.10},{:.10},{:.6},{:.6},{:.10},{}\n",
                s.tau, s.chart.x, s.chart.y, s.chart.theta, s.planar[0], s.planar[1], n[0], n[1], n[2], s.u1, s.u2, s.kappa_g, s.kappa_planar, s.w, s.flags
            ));
        }
        out
    }
}

fn sphere_point(preset: Preset, s: &TrackSample) -> Vector3<f64> {
    match preset {
        Preset::So3 => crate::lie_so3::spherical_projection(&s.chart),
        // The SE(2) chart is planar; use the tangent-plane embedding.
        Preset::Se2 => Vector3::new(1.0, s.chart.x, s.chart.y).normalize(),
    }
}

/// Tuning of the descent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacktrackOptions {
    /// Largest step as a fraction of a cell along every axis.
    pub cell_fraction: f64,
    pub max_steps: usize,
}

impl Default for BacktrackOptions {
    fn default() -> Self {
        Self { cell_fraction: 0.25, max_steps: 1_000_000 }
    }
}

/// Backtrack with the rule matching the map: cuspless, isotropic (`ε = 1`) or sub-Riemannian.
pub fn backtrack(dist: &DistanceGrid, g1: [f64; 3], eye: Option<&EyeModel>) -> Result<Track> {
    let name = if dist.spec.is_cuspless() {
        "cuspless"
    } else if dist.spec.eps >= 1.0 {
        "riemannian"
    } else {
        "sub-riemannian"
    };
    let rule = descent_rules().create(name)?;
    backtrack_with(dist, g1, rule.as_ref(), eye, BacktrackOptions::default())
}

/// Backtrack with `u1 = max(0, X1 W)/(ξ² C²)`.
pub fn backtrack_cuspless(dist: &DistanceGrid, g1: [f64; 3], eye: Option<&EyeModel>) -> Result<Track> {
    backtrack_with(dist, g1, &CusplessDescent, eye, BacktrackOptions::default())
}

fn wrap_point(dist: &DistanceGrid, p: [f64; 3]) -> [f64; 3] {
    let y = if dist.grid.periodic[1] { wrap_angle(p[1]) } else { p[1] };
    [p[0], y, wrap_angle(p[2])]
}

fn near_seed(dist: &DistanceGrid, p: &[f64; 3]) -> bool {
    let g = &dist.grid;
    let s = dist.seed;
    let d = [p[0] - s[0], if g.periodic[1] { wrap_angle(p[1] - s[1]) } else { p[1] - s[1] }, wrap_angle(p[2] - s[2])];
    (0..3).all(|a| d[a].abs() <= g.spacing[a] * (1.0 + 1e-9))
}

pub fn backtrack_with(dist: &DistanceGrid, g1: [f64; 3], rule: &dyn DescentRule, eye: Option<&EyeModel>, opts: BacktrackOptions) -> Result<Track> {
    let (xi, eps) = (dist.spec.xi, dist.spec.eps);
    let preset = dist.spec.preset;
    let first = sample_w(dist, &g1)?;
    if !first.w.is_finite() {
        return Err(Error::Unreachable);
    }
    if near_seed(dist, &g1) {
        return Err(Error::Config(format!("endpoint {g1:?} lies within one cell of the seed")));
    }
    let length = first.w;
    let velocity = |p: &[f64; 3]| -> Result<([f64; 3], f64)> {
        let s = sample_w(dist, p)?;
        let c = dist.cost_at(p[0], p[1]);
        let u = rule.controls(&s.frame, xi, eps, c);
        if u[0].hypot(u[1]).hypot(u[2]) < 1e-9 {
            return Err(Error::Stall { w: s.w, steps: 0 });
        }
        let f = preset.frame(p).ok_or(Error::ChartSingularity { x: p[0] })?;
        Ok((std::array::from_fn(|a| -(u[0] * f[0][a] + u[1] * f[1][a] + u[2] * f[2][a])), s.w))
    };
    let spacing = dist.grid.spacing;
    // Below this value W is dominated by the seed initialization.
    let (m, _) = assemble_metric(dist.geometry().as_ref(), &dist.seed, xi, dist.spec.eps, dist.cost_at(dist.seed[0], dist.seed[1]))?;
    let cell = Vector3::from(spacing);
    let arrival = 2.0 * (cell.transpose() * m * cell)[0].sqrt();
    let mut p = g1;
    let mut t = 0.0;
    let mut raw = vec![(0.0, p)];
    let mut w_prev = length;
    let mut steps = 0;
    while !near_seed(dist, &p) {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Stall { w: w_prev, steps });
        }
        let stalled = |e: Error| match e {
            Error::Stall { w, .. } => Error::Stall { w, steps },
            other => other,
        };
        let (k1, _) = velocity(&p).map_err(stalled)?;
        let rate = (0..3).map(|a| k1[a].abs() / spacing[a]).fold(0.0, f64::max);
        let mut h = (opts.cell_fraction / rate).min(opts.cell_fraction * dist.grid.min_spacing());
        // Halve the step where W has a kink inside it.
        let (next, w_next) = loop {
            let step = rk4_step(&p, &k1, h, &velocity, |q| wrap_point(dist, q)).map_err(stalled)?;
            let w = sample_w(dist, &step)?.w;
            if w < w_prev - 1e-12 {
                break (step, w);
            }
            if w <= arrival {
                break (p, w);
            }
            h *= 0.5;
            if h * rate < 1e-6 {
                return Err(Error::Stall { w: w_prev, steps });
            }
        };
        if next == p {
            break;
        }
        t += h;
        p = next;
        w_prev = w_next;
        raw.push((t, p));
    }

    let mut samples = Vec::with_capacity(raw.len());
    for (t, p) in raw {
        let s = sample_w(dist, &p)?;
        let c = dist.cost_at(p[0], p[1]);
        let [u1, u2, u3] = rule.controls(&s.frame, xi, eps, c);
        let mut fl = if s.flagged { flags::INTERPOLATION } else { 0 };
        let kappa_g = if s.frame[0] > 0.0 {
            (xi * xi * s.frame[1] / s.frame[0]).clamp(-KAPPA_SENTINEL, KAPPA_SENTINEL)
        } else {
            fl |= flags::CUSP;
            if s.frame[1] < 0.0 {
                -KAPPA_SENTINEL
            } else {
                KAPPA_SENTINEL
            }
        };
        let planar = match (preset, eye) {
            (Preset::Se2, _) => [p[0], p[1]],
            (Preset::So3, Some(e)) => match e.project_to_plane(p[0], p[1]) {
                Ok((x, y)) => {
                    if !e.in_view(x, y) {
                        fl |= flags::OUT_OF_VIEW;
                    }
                    [x, y]
                }
                Err(_) => {
                    fl |= flags::OUT_OF_VIEW;
                    [KAPPA_SENTINEL, KAPPA_SENTINEL]
                }
            },
            (Preset::So3, None) => [p[0], p[1]],
        };
        samples.push(TrackSample {
            tau: (t / length).min(1.0),
            t,
            chart: Chart::new(p[0], p[1], p[2]),
            w: s.w,
            frame_w: s.frame,
            u1,
            u2,
            u3,
            cost: c,
            kappa_g,
            kappa_planar: 0.0,
            planar,
            flags: fl,
        });
    }
    // Curvature of the planar curve in forward order.
    let fwd: Vec<[f64; 2]> = samples.iter().rev().map(|s| s.planar).collect();
    let kp = planar_curvature(&fwd, 2.0 * dist.grid.min_spacing());
    let n = samples.len();
    for (k, s) in samples.iter_mut().enumerate() {
        s.kappa_planar = kp[n - 1 - k].clamp(-KAPPA_SENTINEL, KAPPA_SENTINEL);
    }
    Ok(Track { samples, xi, eps, preset, rule: rule.name().into(), length })
}

fn rk4_step(
    p: &[f64; 3],
    k1: &[f64; 3],
    h: f64,
    velocity: &impl Fn(&[f64; 3]) -> Result<([f64; 3], f64)>,
    wrap: impl Fn([f64; 3]) -> [f64; 3],
) -> Result<[f64; 3]> {
    let at = |k: &[f64; 3], f: f64| wrap(std::array::from_fn(|a| p[a] + f * h * k[a]));
    let (k2, _) = velocity(&at(k1, 0.5))?;
    let (k3, _) = velocity(&at(&k2, 0.5))?;
    let (k4, _) = velocity(&at(&k3, 1.0))?;
    Ok(wrap(std::array::from_fn(|a| p[a] + h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]))))
}

/// Indices `(a, c)` around `i` whose chord distance from `i` first reaches `window`.
fn window_ends(cum: &[f64], i: usize, window: f64) -> Option<(usize, usize)> {
    let n = cum.len();
    if n < 3 {
        return None;
    }
    let i = i.clamp(1, n - 2);
    let mut a = i - 1;
    while a > 0 && cum[i] - cum[a] < window {
        a -= 1;
    }
    let mut c = i + 1;
    while c < n - 1 && cum[c] - cum[i] < window {
        c += 1;
    }
    Some((a, c))
}

fn cumulative<const D: usize>(pts: &[[f64; D]]) -> Vec<f64> {
    let mut cum = vec![0.0; pts.len()];
    for k in 1..pts.len() {
        let d: f64 = (0..D).map(|a| (pts[k][a] - pts[k - 1][a]).powi(2)).sum::<f64>().sqrt();
        cum[k] = cum[k - 1] + d;
    }
    cum
}

/// Signed curvature of a planar curve from three-point circles over an arc-length
/// window.
///
/// Positive when the tangent `(cos Θ, −sin Θ)` turns towards increasing `Θ`, the
/// orientation convention of the group frame.
pub fn planar_curvature(pts: &[[f64; 2]], window: f64) -> Vec<f64> {
    let cum = cumulative(pts);
    (0..pts.len())
        .map(|i| {
            let Some((a, c)) = window_ends(&cum, i, window) else { return 0.0 };
            let b = i.clamp(1, pts.len() - 2);
            let (p, q, r) = (pts[a], pts[b], pts[c]);
            let (u, v) = ([q[0] - p[0], q[1] - p[1]], [r[0] - q[0], r[1] - q[1]]);
            let cross = u[0] * v[1] - u[1] * v[0];
            let den = u[0].hypot(u[1]) * v[0].hypot(v[1]) * (r[0] - p[0]).hypot(r[1] - p[1]);
            if den == 0.0 {
                0.0
            } else {
                -2.0 * cross / den
            }
        })
        .collect()
}

/// Geodesic curvature `n'' · (n × n') / |n'|³` of a curve on the unit sphere, by
/// second-order differences over an arc-length window.
pub fn spherical_curvature(pts: &[Vector3<f64>], window: f64) -> Vec<f64> {
    let arr: Vec<[f64; 3]> = pts.iter().map(|p| [p[0], p[1], p[2]]).collect();
    let cum = cumulative(&arr);
    (0..pts.len())
        .map(|i| {
            let Some((a, c)) = window_ends(&cum, i, window) else { return 0.0 };
            let b = i.clamp(1, pts.len() - 2);
            let (s0, s2) = (cum[a] - cum[b], cum[c] - cum[b]);
            // Derivatives at b of the quadratic through the three samples.
            let d1 = pts[a] * (s2 / (s0 * (s2 - s0))) - pts[b] * ((s0 + s2) / (s0 * s2)) + pts[c] * (s0 / (s2 * (s0 - s2)));
            let d2 = (pts[a] * (1.0 / (s0 * (s0 - s2))) + pts[b] * (1.0 / (s0 * s2)) + pts[c] * (1.0 / (s2 * (s2 - s0)))) * 2.0;
            let n = pts[b];
            d2.dot(&n.cross(&d1)) / d1.norm().powi(3)
        })
        .collect()
}
