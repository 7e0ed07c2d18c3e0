//! Schematic eye: maps between the image sphere and a flat camera plane.
//!
//! The eyeball is the unit sphere. Rays pass through a nodal point at distance
//! `a` from the centre and reach a camera at distance `c` on the other side, so a
//! point `(x, y)` of the sphere chart lands at
//!
//! ```text
//! X = η (a + c) sin x / (a + cos x cos y),    Y = η (a + c) cos x sin y / (a + cos x cos y).
//! ```

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Geometry of the schematic eye, in units of the eyeball radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EyeModel {
    /// Offset of the nodal point from the centre.
    pub a: f64,
    /// Offset of the camera from the centre.
    pub c_eye: f64,
    /// Eyeball radius; the formulas are written for 1.
    pub r_eye: f64,
    /// Camera distance scale.
    pub eta: f64,
    /// Maximal camera half-angle.
    pub psi_max: f64,
}

impl Default for EyeModel {
    fn default() -> Self {
        Self { a: 13.0 / 21.0, c_eye: 4.0 / 5.0, r_eye: 1.0, eta: 1.0, psi_max: PI / 8.0 }
    }
}

/// Summary of the distortion introduced by the flat projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticsReport {
    pub y_max: f64,
    #[serde(rename = "J_min")]
    pub j_min: f64,
    #[serde(rename = "J_max")]
    pub j_max: f64,
    #[serde(rename = "GD_max")]
    pub gd_max: f64,
}

impl EyeModel {
    pub fn new(a: f64, c_eye: f64, eta: f64) -> Result<Self> {
        let m = Self { a, c_eye, eta, ..Self::default() };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.a) || !(self.c_eye > 0.0) || !(self.eta > 0.0) || self.r_eye != 1.0 {
            return Err(Error::Config(format!(
                "eye model needs 0 ≤ a < 1, c > 0, η > 0 and unit radius (got a={}, c={}, η={}, R={})",
                self.a, self.c_eye, self.eta, self.r_eye
            )));
        }
        if !(self.psi_max > 0.0 && self.psi_max < PI / 2.0) {
            return Err(Error::Config(format!("ψ_max = {} must lie in (0, π/2)", self.psi_max)));
        }
        Ok(())
    }

    /// Planar scale `η (a + c)`.
    fn scale(&self) -> f64 {
        self.eta * (self.a + self.c_eye)
    }

    /// Half-width of the square camera field of view.
    pub fn x_max(&self) -> f64 {
        self.scale() * self.psi_max.tan()
    }

    /// Largest retinal angle seen by the camera.
    pub fn y_max(&self) -> f64 {
        max_retina_angle(self.a, self.r_eye, self.psi_max).unwrap_or(f64::NAN)
    }

    /// Whether a planar point is inside the square field of view.
    pub fn in_view(&self, xp: f64, yp: f64) -> bool {
        let m = self.x_max() * (1.0 + 1e-12);
        xp.abs() <= m && yp.abs() <= m
    }

    /// Central projection of the sphere chart onto the camera plane.
    pub fn project_to_plane(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let (sx, cx) = x.sin_cos();
        let (sy, cy) = y.sin_cos();
        let den = self.a + cx * cy;
        if !(den > 0.0) {
            return Err(Error::OutOfView { x, y });
        }
        let k = self.scale() / den;
        Ok((k * sx, k * cx * sy))
    }

    /// Inverse of [`EyeModel::project_to_plane`].
    pub fn unproject_to_sphere(&self, xp: f64, yp: f64) -> Result<(f64, f64)> {
        // Reduce to η = 1, R = 1 by scaling.
        let (xs, ys) = (xp / (self.eta * self.r_eye), yp / (self.eta * self.r_eye));
        let (a, ac) = (self.a, self.a + self.c_eye);
        let q = xs * xs + ys * ys;
        let disc = q * (1.0 - a * a) + ac * ac;
        let xi = disc.sqrt();
        let den = q + ac * ac;
        let p_bar = (a * ac + xi) / den;
        let p1 = (ac * xi - a * q) / den;
        let sx = xs * p_bar;
        if !(sx.abs() <= 1.0 + 1e-12) {
            return Err(Error::OutOfView { x: xp, y: yp });
        }
        let x = sx.clamp(-1.0, 1.0).asin();
        let y = (ys * p_bar).atan2(p1);
        Ok((x, y))
    }

    /// Jacobian determinant of the projection.
    pub fn local_jacobian(&self, x: f64, y: f64) -> f64 {
        let cx = x.cos();
        let cxy = cx * y.cos();
        let s = self.scale();
        s * s * cx * (1.0 + self.a * cxy) / (self.a + cxy).powi(3)
    }

    /// Relative length error along the line `x = 0`; zero at the axis.
    pub fn global_distortion(&self, y: f64) -> f64 {
        if y == 0.0 {
            return 0.0;
        }
        let unit = Self { eta: 1.0, ..*self };
        let (_, yp) = unit.project_to_plane(0.0, y).unwrap_or((f64::NAN, f64::NAN));
        (y - yp).abs() / y.abs()
    }

    /// Derivative of the projection, rows `(∂X, ∂Y)` and columns `(∂x, ∂y)`.
    pub fn projection_derivative(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        let (sx, cx) = x.sin_cos();
        let (sy, cy) = y.sin_cos();
        let den = self.a + cx * cy;
        let k = self.scale() / (den * den);
        // ∂den/∂x = −sx cy, ∂den/∂y = −cx sy.
        [
            [k * (cx * den + sx * sx * cy), k * (sx * cx * sy)],
            [k * (-sx * sy * den + cx * sy * sx * cy), k * (cx * cy * den + cx * cx * sy * sy)],
        ]
    }

    /// Orientation `θ` on the sphere of a planar direction at `(X, Y)`.
    ///
    /// Planar angles follow the orientation convention of the group frame: the
    /// planar direction of angle `Θ` is `(cos Θ, −sin Θ)`, matching `X1 = cos θ ∂x − sin θ ∂y`
    /// at the optical axis.
    pub fn lift_direction(&self, xp: f64, yp: f64, big_theta: f64) -> Result<f64> {
        let (x, y) = self.unproject_to_sphere(xp, yp)?;
        let d = self.projection_derivative(x, y);
        let det = d[0][0] * d[1][1] - d[0][1] * d[1][0];
        let (u, v) = (big_theta.cos(), -big_theta.sin());
        let xd = (d[1][1] * u - d[0][1] * v) / det;
        let yd = (-d[1][0] * u + d[0][0] * v) / det;
        let (e1, e2) = (xd, x.cos() * yd);
        if e1.hypot(e2) < 1e-12 {
            return Err(Error::Numeric(format!("degenerate pushforward at ({xp}, {yp})")));
        }
        Ok((-e2).atan2(e1))
    }

    /// Planar angle `Θ` of the projected direction of a sphere orientation `θ`.
    pub fn project_direction(&self, x: f64, y: f64, theta: f64) -> f64 {
        let d = self.projection_derivative(x, y);
        let (st, ct) = theta.sin_cos();
        let (xd, yd) = (ct, -st / x.cos());
        let u = d[0][0] * xd + d[0][1] * yd;
        let v = d[1][0] * xd + d[1][1] * yd;
        (-v).atan2(u)
    }

    /// Extremes of the Jacobian over the square `[−ȳ, ȳ]²` and the maximal distortion.
    pub fn report(&self) -> OpticsReport {
        let y_max = self.y_max();
        let n = 201;
        let (mut j_min, mut j_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            for k in 0..n {
                let x = -y_max + 2.0 * y_max * i as f64 / (n - 1) as f64;
                let y = -y_max + 2.0 * y_max * k as f64 / (n - 1) as f64;
                let j = self.local_jacobian(x, y);
                j_min = j_min.min(j);
                j_max = j_max.max(j);
            }
        }
        OpticsReport { y_max, j_min, j_max, gd_max: self.global_distortion(y_max) }
    }
}

/// Maximal angle on the retina reached by rays of camera half-angle `ψ`.
pub fn max_retina_angle(a: f64, r_eye: f64, psi: f64) -> Result<f64> {
    if !(0.0..r_eye).contains(&a) || !(0.0..PI / 2.0).contains(&psi) {
        return Err(Error::Domain(format!("max_retina_angle needs 0 ≤ a < R and 0 ≤ ψ < π/2 (a={a}, ψ={psi})")));
    }
    let s2 = psi.sin().powi(2);
    let arg = psi.cos() * (1.0 - a * a * s2 / (r_eye * r_eye)).sqrt() - a * s2 / r_eye;
    if arg.abs() > 1.0 + 1e-12 {
        return Err(Error::Numeric(format!("arccos argument {arg} out of range")));
    }
    Ok(arg.clamp(-1.0, 1.0).acos())
}
