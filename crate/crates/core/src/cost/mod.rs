//! External cost from image data.
//!
//! An image is filtered with multiscale Hessian vesselness `VF` and turned into
//! `𝔊 = 1 / (1 + VF / (λ ‖VF‖∞²))` on the sphere chart by pulling back through
//! the eye projection. The cost does not depend on the orientation.

mod filters;
pub mod synthetic;

use std::path::Path;
use std::sync::Arc;

pub use filters::{gaussian_hessian_eigs, vesselness, HessianEigs};

use crate::eikonal::{Cost2D, CostField, Grid3D};
use crate::error::{Error, Result};
use crate::optics::EyeModel;

/// Default scales `s = σ²/2` in pixels.
pub const DEFAULT_SCALES: [f64; 4] = [2.0, 3.0, 4.0, 5.0];

/// What the pixel grid of an image is laid out over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ImageCoordinates {
    /// Camera plane `(X, Y)`.
    Planar,
    /// Sphere chart `(x, y)`.
    Spherical,
}

/// Grayscale image with intensities in `[0, 1]`, rows top to bottom.
///
/// Pixel `(col, row)` sits at `((col − (w−1)/2) p, ((h−1)/2 − row) p)` for pixel size `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarImage {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
    pub pixel_size: f64,
    pub coordinates: ImageCoordinates,
}

impl ScalarImage {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width < 2 || height < 2 || values.len() != width * height {
            return Err(Error::Config(format!("image {width}×{height} does not match {} values", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("image holds non-finite values".into()));
        }
        Ok(Self { width, height, values, pixel_size: 1.0, coordinates: ImageCoordinates::Planar })
    }

    /// Read a PNG or PGM. Colour images keep their green channel.
    pub fn load(path: &Path) -> Result<Self> {
        let img = image::open(path)?.to_rgb32f();
        let (w, h) = (img.width() as usize, img.height() as usize);
        let values = img.pixels().map(|p| p.0[1] as f64).collect();
        Self::new(w, h, values)
    }

    /// Write as 16-bit grayscale PNG.
    pub fn save_png(&self, path: &Path) -> Result<()> {
        let data: Vec<u16> = self.values.iter().map(|v| (v.clamp(0.0, 1.0) * 65535.0).round() as u16).collect();
        let buf = image::ImageBuffer::<image::Luma<u16>, _>::from_raw(self.width as u32, self.height as u32, data)
            .ok_or_else(|| Error::Numeric("image buffer size mismatch".into()))?;
        buf.save(path)?;
        Ok(())
    }

    /// Stretch the image over the square camera field of view of `eye`.
    pub fn fit_to_view(mut self, eye: &EyeModel) -> Self {
        self.pixel_size = 2.0 * eye.x_max() / (self.width.max(self.height) - 1) as f64;
        self.coordinates = ImageCoordinates::Planar;
        self
    }

    pub fn with_pixel_size(mut self, p: f64, coordinates: ImageCoordinates) -> Self {
        self.pixel_size = p;
        self.coordinates = coordinates;
        self
    }

    #[inline]
    pub fn at(&self, col: usize, row: usize) -> f64 {
        self.values[col + self.width * row]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Continuous pixel position `(col, row)` of a coordinate pair.
    pub fn to_pixel(&self, u: f64, v: f64) -> [f64; 2] {
        [u / self.pixel_size + 0.5 * (self.width - 1) as f64, 0.5 * (self.height - 1) as f64 - v / self.pixel_size]
    }

    pub fn from_pixel(&self, col: f64, row: f64) -> [f64; 2] {
        [(col - 0.5 * (self.width - 1) as f64) * self.pixel_size, (0.5 * (self.height - 1) as f64 - row) * self.pixel_size]
    }

    /// Bilinear value at a continuous pixel position; `None` outside the image.
    pub fn bilinear(&self, col: f64, row: f64) -> Option<f64> {
        let (wm, hm) = ((self.width - 1) as f64, (self.height - 1) as f64);
        if !(col >= 0.0 && col <= wm && row >= 0.0 && row <= hm) {
            return None;
        }
        let (c0, r0) = ((col.floor() as usize).min(self.width - 2), (row.floor() as usize).min(self.height - 2));
        let (fc, fr) = (col - c0 as f64, row - r0 as f64);
        Some(
            (1.0 - fc) * (1.0 - fr) * self.at(c0, r0)
                + fc * (1.0 - fr) * self.at(c0 + 1, r0)
                + (1.0 - fc) * fr * self.at(c0, r0 + 1)
                + fc * fr * self.at(c0 + 1, r0 + 1),
        )
    }
}

/// Parameters of the vesselness filter.
#[derive(Debug, Clone, PartialEq)]
pub struct VesselnessParams {
    pub scales: Vec<f64>,
    pub beta: f64,
    pub c: f64,
}

impl Default for VesselnessParams {
    fn default() -> Self {
        Self { scales: DEFAULT_SCALES.to_vec(), beta: 0.3, c: 0.3 }
    }
}

/// `𝔊` as a function on the sphere chart.
#[derive(Debug, Clone)]
pub struct CostMap {
    pub vf: ScalarImage,
    pub lambda: f64,
    pub eye: EyeModel,
    vf_max: f64,
}

impl CostMap {
    pub fn new(vf: ScalarImage, lambda: f64, eye: EyeModel) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!("λ must be positive, got {lambda}")));
        }
        eye.validate()?;
        let vf_max = vf.max();
        if vf_max <= 0.0 {
            eprintln!("warning: vesselness vanishes everywhere; using uniform cost 1");
        }
        Ok(Self { vf, lambda, eye, vf_max })
    }

    /// Smallest value `𝔊` can take.
    pub fn floor(&self) -> f64 {
        if self.vf_max > 0.0 {
            1.0 / (1.0 + 1.0 / (self.lambda * self.vf_max))
        } else {
            1.0
        }
    }

    /// Vesselness seen from a sphere chart point; zero outside the image.
    pub fn vesselness_at(&self, x: f64, y: f64) -> f64 {
        let (u, v) = match self.vf.coordinates {
            ImageCoordinates::Spherical => (x, y),
            ImageCoordinates::Planar => match self.eye.project_to_plane(x, y) {
                Ok(p) => p,
                Err(_) => return 0.0,
            },
        };
        let [c, r] = self.vf.to_pixel(u, v);
        self.vf.bilinear(c, r).unwrap_or(0.0)
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        if self.vf_max <= 0.0 {
            return 1.0;
        }
        1.0 / (1.0 + self.vesselness_at(x, y) / (self.lambda * self.vf_max * self.vf_max))
    }

    /// Sample at the `(x, y)` nodes of a solver grid.
    pub fn to_grid(&self, grid: &Grid3D) -> Result<Cost2D> {
        let [nx, ny, _] = grid.dims;
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(self.value(grid.coord(0, i as f64), grid.coord(1, j as f64)));
            }
        }
        Cost2D::new([nx, ny], [grid.spacing[0], grid.spacing[1]], values)
    }

    /// Group cost `C(x, y, θ) = 𝔊(x, y)` on a solver grid.
    pub fn lift(&self, grid: &Grid3D) -> Result<CostField> {
        Ok(CostField::Grid(Arc::new(self.to_grid(grid)?)))
    }
}

/// Vesselness of an image followed by the cost map.
pub fn build_cost(image: &ScalarImage, params: &VesselnessParams, lambda: f64, eye: EyeModel) -> Result<CostMap> {
    CostMap::new(vesselness(image, &params.scales, params.beta, params.c)?, lambda, eye)
}
