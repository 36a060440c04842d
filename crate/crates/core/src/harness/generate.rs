//! Seeded point sets and query workloads.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};

use crate::error::{Error, Result};
use crate::geometry::{BallRange, BoxRange, HalfspaceRange, Hyperplane, PointSet, Range, Side, SimplexRange};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// Uniform in `[0, 1)^d`.
    Uniform,
    /// Gaussian blobs (spread 0.02) around `ceil(n / 100)` uniform centers.
    Clustered,
    /// The first `n` points of the integer grid `{0..s-1}^d`, `s = ceil(n^(1/d))`,
    /// in lexicographic order.
    Grid,
    /// Uniform, with about 1% of the points replaced by exact copies of others.
    DegenerateDuplicates,
}

impl Distribution {
    pub const ALL: [Distribution; 4] =
        [Distribution::Uniform, Distribution::Clustered, Distribution::Grid, Distribution::DegenerateDuplicates];
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distribution::Uniform => "uniform",
            Distribution::Clustered => "clustered",
            Distribution::Grid => "grid",
            Distribution::DegenerateDuplicates => "degenerate-duplicates",
        })
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Distribution::ALL
            .into_iter()
            .find(|d| d.to_string() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown distribution `{s}`")))
    }
}

pub fn generate(dist: Distribution, n: usize, d: usize, seed: u64) -> Result<PointSet> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = match dist {
        Distribution::Uniform => (0..n * d).map(|_| rng.random::<f64>()).collect(),
        Distribution::Clustered => {
            let k = n.div_ceil(100).max(1);
            let centers: Vec<f64> = (0..k * d).map(|_| rng.random::<f64>()).collect();
            let noise = Normal::new(0.0, 0.02).expect("valid spread");
            let mut out = Vec::with_capacity(n * d);
            for _ in 0..n {
                let c = rng.random_range(0..k);
                for t in 0..d {
                    out.push(centers[c * d + t] + noise.sample(&mut rng));
                }
            }
            out
        }
        Distribution::Grid => {
            let mut s = (n as f64).powf(1.0 / d as f64).round() as usize;
            while s.pow(d as u32) < n {
                s += 1;
            }
            let mut out = Vec::with_capacity(n * d);
            for i in 0..n {
                let mut rest = i;
                let mut p = vec![0.0; d];
                for t in (0..d).rev() {
                    p[t] = (rest % s) as f64;
                    rest /= s;
                }
                out.extend(p);
            }
            out
        }
        Distribution::DegenerateDuplicates => {
            let mut out: Vec<f64> = (0..n * d).map(|_| rng.random::<f64>()).collect();
            if n >= 2 {
                for _ in 0..n.div_ceil(100) {
                    let dst = rng.random_range(1..n);
                    let src = rng.random_range(0..dst);
                    out.copy_within(src * d..src * d + d, dst * d);
                }
            }
            out
        }
    };
    PointSet::new(d, coords)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    Box,
    Simplex,
    Halfspace,
    Ball,
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryKind::Box => "box",
            QueryKind::Simplex => "simplex",
            QueryKind::Halfspace => "halfspace",
            QueryKind::Ball => "ball",
        })
    }
}

impl FromStr for QueryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [QueryKind::Box, QueryKind::Simplex, QueryKind::Halfspace, QueryKind::Ball]
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown query kind `{s}`")))
    }
}

/// `count` ranges of one kind fitted to the data's bounding box.
///
/// Even-numbered queries are large (spanning a good part of the data), odd
/// ones are local, placed around a random data point. Halfspaces pass near a
/// data point and take either side.
pub fn generate_queries(kind: QueryKind, ps: &PointSet, count: usize, seed: u64) -> Result<Vec<Range>> {
    let d = ps.dim();
    if kind == QueryKind::Halfspace && d < 2 {
        return Err(Error::InvalidParameter("halfspace queries need dimension >= 2".into()));
    }
    let (lo, hi) = ps.bounds().unwrap_or((vec![0.0; d], vec![1.0; d]));
    let w: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| if b > a { b - a } else { 1.0 }).collect();
    let diag = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let anchor = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        if ps.is_empty() {
            (0..d).map(|t| lo[t] + w[t] * rng.random::<f64>()).collect()
        } else {
            ps.point(rng.random_range(0..ps.len())).to_vec()
        }
    };
    let mut out = Vec::with_capacity(count);
    for q in 0..count {
        let local = q % 2 == 1;
        let range = match kind {
            QueryKind::Box => {
                let (a, b) = if local {
                    let c = anchor(&mut rng);
                    let h: Vec<f64> = (0..d).map(|t| w[t] * 0.3 * rng.random::<f64>().powi(2)).collect();
                    ((0..d).map(|t| c[t] - h[t]).collect(), (0..d).map(|t| c[t] + h[t]).collect())
                } else {
                    let mut a = Vec::with_capacity(d);
                    let mut b = Vec::with_capacity(d);
                    for t in 0..d {
                        let x = lo[t] - 0.05 * w[t] + 1.1 * w[t] * rng.random::<f64>();
                        let y = lo[t] - 0.05 * w[t] + 1.1 * w[t] * rng.random::<f64>();
                        a.push(x.min(y));
                        b.push(x.max(y));
                    }
                    (a, b)
                };
                Range::Box(BoxRange::new(a, b)?)
            }
            QueryKind::Simplex => {
                let (c, spread) = if local {
                    (anchor(&mut rng), 0.4 * rng.random::<f64>() + 0.05)
                } else {
                    ((0..d).map(|t| lo[t] + w[t] / 2.0).collect(), 1.4)
                };
                let verts = (0..=d)
                    .map(|_| (0..d).map(|t| c[t] + spread * w[t] * (rng.random::<f64>() - 0.5)).collect())
                    .collect();
                Range::Simplex(SimplexRange::new(verts)?)
            }
            QueryKind::Halfspace => {
                let p = anchor(&mut rng);
                let coeffs: Vec<f64> = (0..d - 1).map(|_| rng.random_range(-2.0..2.0)).collect();
                let through = coeffs.iter().zip(&p).map(|(a, x)| a * x).sum::<f64>() - p[d - 1];
                let offset = through + 0.1 * w[d - 1] * (rng.random::<f64>() - 0.5);
                let side = if rng.random_bool(0.5) { Side::Below } else { Side::Above };
                Range::Halfspace(HalfspaceRange::new(Hyperplane::new(coeffs, offset)?, side))
            }
            QueryKind::Ball => {
                let (c, r) = if local {
                    (anchor(&mut rng), 0.25 * diag * rng.random::<f64>().powi(2))
                } else {
                    let c = (0..d).map(|t| lo[t] + w[t] * rng.random::<f64>()).collect();
                    (c, 0.6 * diag * rng.random::<f64>())
                };
                Range::Ball(BallRange::new(c, r)?)
            }
        };
        out.push(range);
    }
    Ok(out)
}
