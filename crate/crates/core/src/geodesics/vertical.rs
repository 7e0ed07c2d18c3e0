//! Vertical part in spherical arclength and the first cusp time.
//!
//! Away from cusps `ds = (h1/ξ²) dt` turns the vertical system into the linear
//! equation `h2'' = (ξ² − 1) h2`, solved with `χ = √(ξ² − 1)` taken as a complex
//! principal root.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `χ = √(ξ² − 1)`: imaginary for `ξ < 1`, zero for `ξ = 1`, real for `ξ > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiParam {
    pub xi: f64,
    pub chi: Complex64,
}

impl ChiParam {
    pub fn new(xi: f64) -> Self {
        Self { xi, chi: Complex64::new(xi * xi - 1.0, 0.0).sqrt() }
    }

    pub fn is_linear(&self) -> bool {
        self.chi.norm() == 0.0
    }
}

fn real(z: Complex64, what: &str) -> f64 {
    debug_assert!(z.im.abs() <= 1e-10 * (1.0 + z.re.abs()), "{what} has imaginary part {}", z.im);
    z.re
}

/// `(h1, h2, h3)` at spherical arclength `s` for initial `(h2⁰, h3⁰)` and `h1 ≥ 0`.
pub fn vertical_solution_s(h2_0: f64, h3_0: f64, xi: f64, s: f64) -> Result<(f64, f64, f64)> {
    if h2_0.abs() > 1.0 {
        return Err(Error::Domain(format!("|h2⁰| = {} exceeds 1", h2_0.abs())));
    }
    let (h2, h3) = vertical_h2_h3(h2_0, h3_0, xi, s);
    if h2 * h2 > 1.0 + 1e-12 {
        return Err(Error::PastCusp { s, s_max: cusp_time_smax(h2_0, h3_0, xi) });
    }
    Ok((xi * (1.0 - h2 * h2).max(0.0).sqrt(), h2, h3))
}

/// Unchecked `(h2, h3)`; continues the linear solution past cusps.
pub(crate) fn vertical_h2_h3(h2_0: f64, h3_0: f64, xi: f64, s: f64) -> (f64, f64) {
    let p = ChiParam::new(xi);
    if p.is_linear() {
        return (h2_0 + h3_0 * s, h3_0);
    }
    let chi = p.chi;
    let z = chi * s;
    let (ch, sh) = (z.cosh(), z.sinh());
    let h2 = real(ch * h2_0 + sh / chi * h3_0, "h2");
    let h3 = real(ch * h3_0 + sh * chi * h2_0, "h3");
    (h2, h3)
}

/// First spherical arclength at which `|h2| = 1`, or `+∞` when the projected
/// curve never develops a cusp.
pub fn cusp_time_smax(h2_0: f64, h3_0: f64, xi: f64) -> f64 {
    if h2_0.abs() >= 1.0 {
        return 0.0;
    }
    let p = ChiParam::new(xi);
    if p.is_linear() {
        if h3_0 == 0.0 {
            return f64::INFINITY;
        }
        return (h3_0.signum() - h2_0) / h3_0;
    }
    let chi = p.chi;
    let kappa = h3_0 * h3_0 + (1.0 - h2_0 * h2_0) * (xi * xi - 1.0);
    if kappa < 0.0 {
        return f64::INFINITY;
    }
    let d = chi * h2_0 + h3_0;
    if d.norm() == 0.0 || d.re == 0.0 {
        return f64::INFINITY;
    }
    let s1 = d.re.signum();
    let z = (Complex64::new(kappa.sqrt(), 0.0) + chi) * s1 / d;
    if z.norm() == 0.0 {
        return f64::INFINITY;
    }
    let v = z.ln() / chi;
    let s = real(v, "s_max");
    if !s.is_finite() || s < 0.0 {
        // For real χ a negative root means h2 only reached ±1 in the past.
        if chi.im == 0.0 {
            return f64::INFINITY;
        }
        // For imaginary χ the solution is periodic with period 2π/|χ|.
        return s + 2.0 * std::f64::consts::PI / chi.im;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_case() {
        let (_, h2, h3) = vertical_solution_s(0.0, 1.0, 1.0, 0.5).unwrap();
        assert_eq!((h2, h3), (0.5, 1.0));
        assert_eq!(cusp_time_smax(0.0, 1.0, 1.0), 1.0);
        assert_eq!(cusp_time_smax(0.2, 0.0, 1.0), f64::INFINITY);
    }

    #[test]
    fn elliptic_real_form() {
        let (xi, h2, h3, s) = (0.6f64, 0.2, 0.3, 1.7);
        let w = (1.0 - xi * xi).sqrt();
        let (_, a, _) = vertical_solution_s(h2, h3, xi, s).unwrap();
        assert!((a - (h2 * (s * w).cos() + h3 * (s * w).sin() / w)).abs() < 1e-14);
    }

    #[test]
    fn elliptic_without_cusp() {
        // (h3⁰)²/(1 − ξ²) + (h2⁰)² < 1.
        assert_eq!(cusp_time_smax(0.3, 0.2, 0.5), f64::INFINITY);
    }

    #[test]
    fn chi_branches() {
        assert!(ChiParam::new(0.5).chi.re == 0.0 && ChiParam::new(0.5).chi.im > 0.0);
        assert!(ChiParam::new(1.0).is_linear());
        assert!(ChiParam::new(1.5).chi.im == 0.0 && ChiParam::new(1.5).chi.re > 0.0);
    }

    #[test]
    fn past_cusp_is_an_error() {
        assert!(matches!(vertical_solution_s(0.0, 1.0, 1.0, 1.5), Err(Error::PastCusp { .. })));
    }
}
