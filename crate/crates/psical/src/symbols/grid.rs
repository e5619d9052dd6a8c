//! The sampling grid all empirical symbol estimates run over.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Log-spaced samples in `h` and radial frequency, a set of ray directions,
/// and z sample points. Enumeration order is fixed (ray, radius, h, z) so
/// every sweep is deterministic.
#[derive(Debug, Clone)]
pub struct SampleGrid {
    pub hs: Vec<f64>,
    pub radii: Vec<f64>,
    pub rays: Vec<Vec<f64>>,
    pub z_points: Vec<Vec<f64>>,
    dim: usize,
}

impl SampleGrid {
    pub fn new(
        hs: Vec<f64>,
        radii: Vec<f64>,
        rays: Vec<Vec<f64>>,
        z_points: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if hs.is_empty() || radii.is_empty() || rays.is_empty() || z_points.is_empty() {
            return Err(Error::Domain("sample grid axes must be nonempty".into()));
        }
        if hs.iter().any(|&h| h.is_nan() || h <= 0.0 || h > 1.0) {
            return Err(Error::Domain("sample grid h values must lie in (0, 1]".into()));
        }
        if radii.iter().any(|&r| !r.is_finite() || r <= 0.0) {
            return Err(Error::Domain("sample grid radii must be positive and finite".into()));
        }
        let dim = rays[0].len();
        if dim == 0 || rays.iter().any(|r| r.len() != dim) || z_points.iter().any(|z| z.len() != dim)
        {
            return Err(Error::Dimension("rays and z points must share one dimension".into()));
        }
        Ok(SampleGrid { hs, radii, rays, z_points, dim })
    }

    /// Default grid: `h = 2^-j (j=0..12)`, `|zeta| = 2^i (i=0..14)`,
    /// rays `+/-1` in d=1 (8 compass directions in d=2), 8 z samples.
    pub fn default_for_dim(dim: usize) -> Self {
        let hs: Vec<f64> = (0..=12).map(|j| 2f64.powi(-j)).collect();
        let radii: Vec<f64> = (0..=14).map(|i| 2f64.powi(i)).collect();
        let (rays, z_points) = match dim {
            1 => {
                let rays = vec![vec![1.0], vec![-1.0]];
                let z: Vec<Vec<f64>> = (0..8).map(|k| vec![2.0 * PI * k as f64 / 8.0]).collect();
                (rays, z)
            }
            2 => {
                let rays = (0..8)
                    .map(|k| {
                        let t = PI * k as f64 / 4.0;
                        vec![t.cos(), t.sin()]
                    })
                    .collect();
                let mut z = Vec::new();
                for a in 0..4 {
                    for b in 0..4 {
                        z.push(vec![2.0 * PI * a as f64 / 4.0, 2.0 * PI * b as f64 / 4.0]);
                    }
                }
                (rays, z)
            }
            d => panic!("no default sample grid for dimension {d}"),
        };
        SampleGrid::new(hs, radii, rays, z_points).expect("default grid is valid")
    }

    /// A grid confined to the frequencies a quantization grid can resolve.
    pub fn clipped_to(&self, max_radius: f64, hs: Vec<f64>) -> Result<Self> {
        let radii: Vec<f64> = self.radii.iter().cloned().filter(|&r| r <= max_radius).collect();
        SampleGrid::new(hs, radii, self.rays.clone(), self.z_points.clone())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rays.len() * self.radii.len() * self.hs.len() * self.z_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn zeta_at(&self, ray: usize, radius: usize) -> Vec<f64> {
        self.rays[ray].iter().map(|c| c * self.radii[radius]).collect()
    }

    /// Iterate `(ray, radius, h, z)` index tuples in canonical order.
    pub fn indices(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
        let (nr, ni, nj, nz) =
            (self.rays.len(), self.radii.len(), self.hs.len(), self.z_points.len());
        (0..nr).flat_map(move |r| {
            (0..ni).flat_map(move |i| {
                (0..nj).flat_map(move |j| (0..nz).map(move |w| (r, i, j, w)))
            })
        })
    }
}
