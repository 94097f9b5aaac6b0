use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported embedding dimension.
pub const MAX_DIM: usize = 4;

/// Points in `R^d`, `1 <= d <= 4`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    /// Sampler descriptor and seed the points came from.
    pub provenance: String,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>, provenance: impl Into<String>) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidArgument(format!("point dimension must be 1..={MAX_DIM}, got {dim}")));
        }
        if coords.len() % dim != 0 {
            return Err(Error::InvalidArgument("coordinate count is not a multiple of the dimension".into()));
        }
        if coords.is_empty() {
            return Err(Error::TooFewPoints { needed: 1, got: 0 });
        }
        if let Some(i) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinitePoint(i / dim));
        }
        Ok(Self {
            dim,
            coords,
            provenance: provenance.into(),
        })
    }

    pub fn from_points<const D: usize>(points: &[[f64; D]], provenance: impl Into<String>) -> Result<Self> {
        Self::new(D, points.iter().flatten().copied().collect(), provenance)
    }

    pub fn from_values(values: &[f64], provenance: impl Into<String>) -> Result<Self> {
        Self::new(1, values.to_vec(), provenance)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// The first `n` points. Clouds of independent draws make this a random
    /// subsample.
    pub fn prefix(&self, n: usize) -> PointCloud {
        let n = n.clamp(1, self.len());
        Self {
            dim: self.dim,
            coords: self.coords[..n * self.dim].to_vec(),
            provenance: format!("{} [first {n}]", self.provenance),
        }
    }

    /// Keeps the listed coordinates, in order.
    pub fn project(&self, axes: &[usize]) -> Result<PointCloud> {
        if axes.iter().any(|&a| a >= self.dim) {
            return Err(Error::InvalidArgument(format!("axis out of range for dimension {}", self.dim)));
        }
        let coords = self.points().flat_map(|p| axes.iter().map(move |&a| p[a])).collect();
        Self::new(axes.len(), coords, format!("{} [axes {axes:?}]", self.provenance))
    }

    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.points() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Diagonal of the bounding box.
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounds();
        lo.iter().zip(&hi).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt()
    }

    /// Points padded with zeros to four coordinates.
    pub(crate) fn padded(&self) -> Vec<[f64; 4]> {
        self.points()
            .map(|p| {
                let mut q = [0.0; 4];
                q[..self.dim].copy_from_slice(p);
                q
            })
            .collect()
    }
}

#[inline]
pub(crate) fn dist2(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let d0 = a[0] - b[0];
    let d1 = a[1] - b[1];
    let d2 = a[2] - b[2];
    let d3 = a[3] - b[3];
    d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3
}
