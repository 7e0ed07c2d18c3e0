use std::sync::Arc;

use crate::error::{Error, Result};

/// Cost on a centred 2D grid over the first two chart axes, `x` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Cost2D {
    pub dims: [usize; 2],
    pub spacing: [f64; 2],
    pub values: Vec<f64>,
}

impl Cost2D {
    pub fn new(dims: [usize; 2], spacing: [f64; 2], values: Vec<f64>) -> Result<Self> {
        if dims[0] < 2 || dims[1] < 2 || values.len() != dims[0] * dims[1] {
            return Err(Error::Config(format!("cost grid {}×{} does not match {} values", dims[0], dims[1], values.len())));
        }
        if !(spacing[0] > 0.0 && spacing[1] > 0.0) {
            return Err(Error::Config("cost grid spacing must be positive".into()));
        }
        Ok(Self { dims, spacing, values })
    }

    /// Chart coordinate of a node.
    pub fn coord(&self, axis: usize, n: f64) -> f64 {
        (n - 0.5 * (self.dims[axis] - 1) as f64) * self.spacing[axis]
    }

    /// Bilinear interpolation, clamped to the border outside the grid.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let u = (x / self.spacing[0] + 0.5 * (self.dims[0] - 1) as f64).clamp(0.0, (self.dims[0] - 1) as f64);
        let v = (y / self.spacing[1] + 0.5 * (self.dims[1] - 1) as f64).clamp(0.0, (self.dims[1] - 1) as f64);
        let (i0, j0) = ((u.floor() as usize).min(self.dims[0] - 2), (v.floor() as usize).min(self.dims[1] - 2));
        let (fu, fv) = (u - i0 as f64, v - j0 as f64);
        let at = |i: usize, j: usize| self.values[i + self.dims[0] * j];
        (1.0 - fu) * (1.0 - fv) * at(i0, j0) + fu * (1.0 - fv) * at(i0 + 1, j0) + (1.0 - fu) * fv * at(i0, j0 + 1) + fu * fv * at(i0 + 1, j0 + 1)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Cost `C(x, y)`; it never depends on the orientation.
#[derive(Debug, Clone, PartialEq)]
pub enum CostField {
    Uniform(f64),
    Grid(Arc<Cost2D>),
}

impl CostField {
    pub fn value(&self, x: f64, y: f64) -> f64 {
        match self {
            CostField::Uniform(c) => *c,
            CostField::Grid(g) => g.sample(x, y),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bilinear_reproduces_affine_fields() {
        let dims = [5, 7];
        let spacing = [0.1, 0.2];
        let mut values = Vec::new();
        for j in 0..7 {
            for i in 0..5 {
                values.push(1.0 + 2.0 * (i as f64 - 2.0) * 0.1 - (j as f64 - 3.0) * 0.2);
            }
        }
        let c = Cost2D::new(dims, spacing, values).unwrap();
        for (x, y) in [(0.0, 0.0), (0.13, -0.31), (-0.2, 0.6)] {
            assert!((c.sample(x, y) - (1.0 + 2.0 * x - y)).abs() < 1e-12);
        }
        // Clamped outside.
        assert!((c.sample(5.0, 0.0) - c.sample(0.2, 0.0)).abs() < 1e-12);
    }
}
