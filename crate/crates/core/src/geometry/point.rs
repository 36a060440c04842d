use crate::error::{Error, Result};

/// A single point in R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Point { coords }
    }
}

/// An indexed set of points sharing one dimension, stored flat.
///
/// Indices `0..len()` are stable for the lifetime of the set; every
/// structure in this crate refers to points by these indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if coords.len() % dim != 0 {
            return Err(Error::InvalidParameter(format!(
                "{} coordinates do not divide into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: pos / dim });
        }
        Ok(PointSet { dim, coords })
    }

    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            coords.extend_from_slice(p);
        }
        PointSet::new(dim, coords)
    }

    pub fn empty(dim: usize) -> Self {
        PointSet { dim, coords: Vec::new() }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn coord(&self, i: usize, k: usize) -> f64 {
        self.coords[i * self.dim + k]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn raw(&self) -> &[f64] {
        &self.coords
    }

    /// Per-coordinate minimum and maximum. `None` for an empty set.
    pub fn bounds(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut it = self.iter();
        let first = it.next()?;
        let mut lo = first.to_vec();
        let mut hi = first.to_vec();
        for p in it {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        Some((lo, hi))
    }

    /// Largest absolute coordinate value, 0 for an empty set.
    pub fn max_abs(&self) -> f64 {
        self.coords.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// A new set whose point `i` is `f(point(i))`.
    pub fn map<F>(&self, out_dim: usize, mut f: F) -> Result<PointSet>
    where
        F: FnMut(&[f64], &mut Vec<f64>),
    {
        let mut coords = Vec::with_capacity(self.len() * out_dim);
        let mut buf = Vec::with_capacity(out_dim);
        for p in self.iter() {
            buf.clear();
            f(p, &mut buf);
            if buf.len() != out_dim {
                return Err(Error::DimensionMismatch { expected: out_dim, got: buf.len() });
            }
            coords.extend_from_slice(&buf);
        }
        PointSet::new(out_dim, coords)
    }
}
