//! Synthetic images of dark tubes on a bright background.

use super::ScalarImage;

/// Tube along a polyline in pixel coordinates `(col, row)`, with a Gaussian profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Tube {
    pub points: Vec<[f64; 2]>,
    /// Standard deviation of the profile in pixels.
    pub width: f64,
    /// Depth of the intensity dip at the centreline.
    pub contrast: f64,
}

impl Tube {
    pub fn segment(a: [f64; 2], b: [f64; 2], width: f64, contrast: f64) -> Self {
        Self { points: vec![a, b], width, contrast }
    }

    /// Circular arc from angle `start` to `end` (radians, counter-clockwise in pixel axes).
    pub fn arc(centre: [f64; 2], radius: f64, start: f64, end: f64, width: f64, contrast: f64) -> Self {
        let n = ((end - start).abs() * radius).ceil().max(8.0) as usize * 2;
        let points = (0..=n)
            .map(|k| start + (end - start) * k as f64 / n as f64)
            .map(|a| [centre[0] + radius * a.cos(), centre[1] + radius * a.sin()])
            .collect();
        Self { points, width, contrast }
    }

    /// Distance in pixels from a point to the centreline.
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        self.points
            .windows(2)
            .map(|s| {
                let (a, b) = (s[0], s[1]);
                let d = [b[0] - a[0], b[1] - a[1]];
                let len2 = d[0] * d[0] + d[1] * d[1];
                let t = if len2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
                (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Point at fraction `f` of the polyline length.
    pub fn point_at(&self, f: f64) -> [f64; 2] {
        let lens: Vec<f64> = self.points.windows(2).map(|s| (s[1][0] - s[0][0]).hypot(s[1][1] - s[0][1])).collect();
        let mut rest = f.clamp(0.0, 1.0) * lens.iter().sum::<f64>();
        for (s, l) in self.points.windows(2).zip(&lens) {
            if rest <= *l {
                let t = if *l > 0.0 { rest / l } else { 0.0 };
                return [s[0][0] + t * (s[1][0] - s[0][0]), s[0][1] + t * (s[1][1] - s[0][1])];
            }
            rest -= l;
        }
        *self.points.last().expect("tube has points")
    }

    /// Direction of travel at fraction `f`, as a unit vector in pixel axes.
    pub fn tangent_at(&self, f: f64) -> [f64; 2] {
        let (a, b) = (self.point_at((f - 1e-3).max(0.0)), self.point_at((f + 1e-3).min(1.0)));
        let n = (b[0] - a[0]).hypot(b[1] - a[1]);
        [(b[0] - a[0]) / n, (b[1] - a[1]) / n]
    }
}

/// Bright background of value 1 with the tubes drawn as dips; the deepest tube wins.
pub fn render(width: usize, height: usize, tubes: &[Tube]) -> ScalarImage {
    let mut values = Vec::with_capacity(width * height);
    for row in 0..height {
        for col in 0..width {
            let p = [col as f64, row as f64];
            let dip = tubes.iter().map(|t| t.contrast * (-t.distance(p).powi(2) / (2.0 * t.width * t.width)).exp()).fold(0.0, f64::max);
            values.push(1.0 - dip);
        }
    }
    ScalarImage::new(width, height, values).expect("dimensions are consistent")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_distance_and_rendering() {
        let t = Tube::arc([50.0, 50.0], 20.0, 0.0, std::f64::consts::PI, 2.0, 0.5);
        assert!(t.distance([50.0, 70.0]) < 0.1);
        assert!((t.distance([50.0, 50.0]) - 20.0).abs() < 0.1);
        let img = render(101, 101, &[t.clone()]);
        assert!((img.at(70, 50) - 0.5).abs() < 1e-3);
        assert!((img.at(0, 0) - 1.0).abs() < 1e-9);
        let p = t.point_at(0.5);
        assert!((p[0] - 50.0).abs() < 0.2 && (p[1] - 70.0).abs() < 0.2, "{p:?}");
        let d = t.tangent_at(0.0);
        assert!(d[0].abs() < 0.05 && (d[1] - 1.0).abs() < 0.01, "{d:?}");
    }
}
