use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A `pixels_x × pixels_y` grid over a rectangle of the complex plane.
///
/// Pixels are square with side `h = width / pixels_x`. Pixel `(i, j)` (column
/// `i`, row `j`, row-major, rows running downward) is the point
/// `center + ((i + ½) - W/2)·h - i((j + ½) - H/2)·h`, its center. A grid
/// centered at 0 is therefore exactly symmetric under `z -> -z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub center: Complex64,
    pub width: f64,
    pub pixels_x: usize,
    pub pixels_y: usize,
}

impl GridSpec {
    pub fn new(center: Complex64, width: f64, pixels_x: usize, pixels_y: usize) -> Result<Self> {
        let g = Self {
            center,
            width,
            pixels_x,
            pixels_y,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::Config("grid width must be positive".into()));
        }
        if !self.center.is_finite() {
            return Err(Error::Config("grid center must be finite".into()));
        }
        if self.pixels_x == 0 || self.pixels_y == 0 {
            return Err(Error::Config("grid needs at least one pixel per axis".into()));
        }
        Ok(())
    }

    pub fn pixel_size(&self) -> f64 {
        self.width / self.pixels_x as f64
    }

    pub fn len(&self) -> usize {
        self.pixels_x * self.pixels_y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        let h = self.pixel_size();
        let dx = (i as f64 + 0.5) - self.pixels_x as f64 / 2.0;
        let dy = (j as f64 + 0.5) - self.pixels_y as f64 / 2.0;
        self.center + Complex64::new(dx * h, -dy * h)
    }

    /// The pixel containing `z`, if any.
    pub fn pixel_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let h = self.pixel_size();
        let u = (z.re - self.center.re) / h + self.pixels_x as f64 / 2.0;
        let v = -(z.im - self.center.im) / h + self.pixels_y as f64 / 2.0;
        if !(u >= 0.0 && v >= 0.0) {
            return None;
        }
        let (i, j) = (u.floor() as usize, v.floor() as usize);
        (i < self.pixels_x && j < self.pixels_y).then_some((i, j))
    }

    /// Index of the pixel `(i, j)` in row-major order.
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.pixels_x + i
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pixel_round_trip() {
        let g = GridSpec::new(Complex64::new(-0.5, 0.25), 3.0, 64, 48).unwrap();
        for j in 0..48 {
            for i in 0..64 {
                assert_eq!(g.pixel_of(g.point(i, j)), Some((i, j)));
            }
        }
        assert_eq!(g.pixel_of(Complex64::new(10.0, 0.0)), None);
    }

    #[test]
    fn centered_grid_is_symmetric() {
        let g = GridSpec::new(Complex64::new(0.0, 0.0), 4.0, 32, 32).unwrap();
        for j in 0..32 {
            for i in 0..32 {
                assert_eq!(g.point(i, j), -g.point(31 - i, 31 - j));
            }
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(Complex64::new(0.0, 0.0), 0.0, 4, 4).is_err());
        assert!(GridSpec::new(Complex64::new(0.0, 0.0), 1.0, 0, 4).is_err());
    }
}
