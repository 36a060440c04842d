use crate::error::{Error, Result};

/// Distance function used by a closest-pair computation.
///
/// `Projected(k)` measures Euclidean distance on the first `k` coordinates
/// only. On lifted points `(x, |x|^2)` with `k = d` it reproduces the
/// Euclidean distance of the original points exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Euclidean,
    Projected(usize),
}

impl Metric {
    /// Number of leading coordinates the metric looks at for points of dimension `dim`.
    #[inline]
    pub fn compared_dims(self, dim: usize) -> usize {
        match self {
            Metric::Euclidean => dim,
            Metric::Projected(k) => k.min(dim),
        }
    }

    pub fn check(self, dim: usize) -> Result<()> {
        match self {
            Metric::Projected(k) if k > dim => Err(Error::ProjectionTooWide { keep: k, dim }),
            Metric::Projected(0) => Err(Error::InvalidParameter("projected metric must keep at least one coordinate".into())),
            _ => Ok(()),
        }
    }

    /// Squared distance. Summation runs over coordinates in index order, so
    /// the result is bit-identical for `(a, b)` and `(b, a)`.
    #[inline]
    pub fn dist2(self, a: &[f64], b: &[f64]) -> f64 {
        let k = self.compared_dims(a.len());
        let mut s = 0.0;
        for t in 0..k {
            let diff = a[t] - b[t];
            s += diff * diff;
        }
        s
    }
}

/// `euclidean` or `projected:k`.
impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Metric::Euclidean => f.write_str("euclidean"),
            Metric::Projected(k) => write!(f, "projected:{k}"),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "euclidean" {
            return Ok(Metric::Euclidean);
        }
        s.strip_prefix("projected:")
            .and_then(|k| k.parse().ok())
            .map(Metric::Projected)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown metric `{s}`, expected `euclidean` or `projected:k`")))
    }
}

/// Checked distance between two points under `m`.
pub fn distance(a: &[f64], b: &[f64], m: Metric) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    m.check(a.len())?;
    Ok(m.dist2(a, b).sqrt())
}
