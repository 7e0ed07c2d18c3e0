//! Incomplete elliptic integrals of the first and third kind via Carlson's
//! symmetric forms, with the parameter convention `m = k²`.

use std::f64::consts::PI;

const TOL: f64 = 1e-4;

/// Carlson's `R_C(x, y)` for `y > 0`.
pub fn carlson_rc(mut x: f64, mut y: f64) -> f64 {
    loop {
        let lam = 2.0 * x.sqrt() * y.sqrt() + y;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        let ave = (x + 2.0 * y) / 3.0;
        let s = (y - ave) / ave;
        if s.abs() < TOL {
            return (1.0 + s * s * (0.3 + s * (1.0 / 7.0 + s * (0.375 + s * 9.0 / 22.0)))) / ave.sqrt();
        }
    }
}

/// Carlson's `R_F(x, y, z)` for nonnegative arguments, at most one zero.
pub fn carlson_rf(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        let ave = (x + y + z) / 3.0;
        let (dx, dy, dz) = ((ave - x) / ave, (ave - y) / ave, (ave - z) / ave);
        if dx.abs().max(dy.abs()).max(dz.abs()) < TOL {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 + (e2 / 24.0 - 0.1 - 3.0 / 44.0 * e3) * e2 + e3 / 14.0) / ave.sqrt();
        }
    }
}

/// Carlson's `R_J(x, y, z, p)` for nonnegative `x, y, z` and `p > 0`.
pub fn carlson_rj(mut x: f64, mut y: f64, mut z: f64, mut p: f64) -> f64 {
    let (c1, c2, c3, c4) = (3.0 / 14.0, 1.0 / 3.0, 3.0 / 22.0, 3.0 / 26.0);
    let (c5, c6, c7, c8) = (0.75 * c3, 1.5 * c4, 0.5 * c2, 2.0 * c3);
    let mut sum = 0.0;
    let mut fac = 1.0;
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * (sy + sz) + sy * sz;
        let alpha = (p * (sx + sy + sz) + sx * sy * sz).powi(2);
        let beta = p * (p + lam).powi(2);
        sum += fac * carlson_rc(alpha, beta);
        fac *= 0.25;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        p = 0.25 * (p + lam);
        let ave = 0.2 * (x + y + z + 2.0 * p);
        let (dx, dy, dz, dp) = ((ave - x) / ave, (ave - y) / ave, (ave - z) / ave, (ave - p) / ave);
        if dx.abs().max(dy.abs()).max(dz.abs()).max(dp.abs()) < TOL {
            let ea = dx * (dy + dz) + dy * dz;
            let eb = dx * dy * dz;
            let ec = dp * dp;
            let ed = ea - 3.0 * ec;
            let ee = eb + 2.0 * dp * (ea - ec);
            let series = 1.0 + ed * (-c1 + c5 * ed - c6 * ee) + eb * (c7 + dp * (-c8 + dp * c4)) + dp * ea * (c2 - dp * c3)
                - c2 * dp * ec;
            return 3.0 * sum + fac * series / (ave * ave.sqrt());
        }
    }
}

/// `F(φ | m)` for `|φ| ≤ π/2` and `m sin²φ ≤ 1`.
fn f_principal(phi: f64, m: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    s * carlson_rf(c * c, 1.0 - m * s * s, 1.0)
}

/// `Π(n; φ | m)` for `|φ| ≤ π/2`, `m sin²φ ≤ 1` and `n sin²φ < 1`.
fn pi_principal(n: f64, phi: f64, m: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    let (cc, q) = (c * c, 1.0 - m * s * s);
    s * carlson_rf(cc, q, 1.0) + n / 3.0 * s.powi(3) * carlson_rj(cc, q, 1.0, 1.0 - n * s * s)
}

/// Split `φ = jπ + φ_r` with `φ_r ∈ (−π/2, π/2]`.
fn reduce(phi: f64) -> (f64, f64) {
    let j = (phi / PI).round();
    (j, phi - j * PI)
}

/// Incomplete integral of the first kind `F(φ | m)`; any `φ` when `m < 1`.
pub fn ellip_f(phi: f64, m: f64) -> f64 {
    let (j, r) = reduce(phi);
    if j == 0.0 {
        return f_principal(r, m);
    }
    2.0 * j * f_principal(PI / 2.0, m) + f_principal(r, m)
}

/// Incomplete integral of the third kind `Π(n; φ | m)`; any `φ` when `m < 1`, `n < 1`.
pub fn ellip_pi(n: f64, phi: f64, m: f64) -> f64 {
    let (j, r) = reduce(phi);
    if j == 0.0 {
        return pi_principal(n, r, m);
    }
    2.0 * j * pi_principal(n, PI / 2.0, m) + pi_principal(n, r, m)
}

/// Difference `F(φ1) − F(φ0)` valid also for `m ≥ 1` when both angles lie in one
/// branch interval `(jπ − π/2, jπ + π/2]`.
pub fn ellip_f_diff(phi0: f64, phi1: f64, m: f64) -> f64 {
    if m < 1.0 {
        return ellip_f(phi1, m) - ellip_f(phi0, m);
    }
    let (j, r0) = reduce(phi0);
    f_principal(phi1 - j * PI, m) - f_principal(r0, m)
}

/// Difference `Π(n; φ1) − Π(n; φ0)` with the same branch convention as [`ellip_f_diff`].
pub fn ellip_pi_diff(n: f64, phi0: f64, phi1: f64, m: f64) -> f64 {
    if m < 1.0 && n < 1.0 {
        return ellip_pi(n, phi1, m) - ellip_pi(n, phi0, m);
    }
    let (j, r0) = reduce(phi0);
    pi_principal(n, phi1 - j * PI, m) - pi_principal(n, r0, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive_simpson;

    #[test]
    fn first_kind_against_quadrature() {
        for &(phi, m) in &[(0.3, 0.2), (1.2, 0.9), (-0.7, 0.5), (4.0, 0.3), (-5.5, 0.7), (0.4, 3.0)] {
            let q = adaptive_simpson(|t: f64| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, phi, 1e-13);
            assert!((ellip_f(phi, m) - q).abs() < 1e-11, "F({phi}|{m})");
        }
    }

    #[test]
    fn third_kind_against_quadrature() {
        for &(n, phi, m) in &[(0.3, 0.3, 0.2), (-0.5, 1.2, 0.9), (0.8, -0.7, 0.5), (0.2, 4.0, 0.3), (0.5, -5.5, 0.7), (0.9, 0.4, 3.0)] {
            let q = adaptive_simpson(
                |t: f64| {
                    let s2 = t.sin().powi(2);
                    1.0 / ((1.0 - n * s2) * (1.0 - m * s2).sqrt())
                },
                0.0,
                phi,
                1e-13,
            );
            assert!((ellip_pi(n, phi, m) - q).abs() < 1e-10, "Π({n}; {phi}|{m})");
        }
    }

    #[test]
    fn rc_closed_form() {
        assert!((carlson_rc(0.0, 1.0) - PI / 2.0).abs() < 1e-14);
        assert!((carlson_rc(2.0, 1.0) - (2f64.sqrt()).acosh()).abs() < 1e-14);
    }
}
