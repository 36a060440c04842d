//! One handle over the four index kinds, with query-type checking.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{Metric, PairResult, PointSet, Range, Side};
use crate::rcp::{BallRcpIndex, HalfspaceRcpIndex, OrthoRcpIndex, QueryStats, SimplexRcpIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    Ortho,
    Simplex,
    Halfspace,
    Ball,
}

impl Structure {
    pub const ALL: [Structure; 4] = [Structure::Ortho, Structure::Simplex, Structure::Halfspace, Structure::Ball];
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Structure::Ortho => "ortho",
            Structure::Simplex => "simplex",
            Structure::Halfspace => "halfspace",
            Structure::Ball => "ball",
        })
    }
}

impl FromStr for Structure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Structure::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown structure `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Partition or cutting parameter; `None` picks the default for `n`.
    pub r: Option<usize>,
    pub seed: u64,
    pub metric: Metric,
    /// Halfspace index only: also build the twin answering above queries.
    pub mirror: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { r: None, seed: 0, metric: Metric::Euclidean, mirror: true }
    }
}

pub enum AnyIndex {
    Ortho(OrthoRcpIndex),
    Simplex(SimplexRcpIndex),
    Halfspace(HalfspaceRcpIndex),
    Ball(BallRcpIndex),
}

impl AnyIndex {
    pub fn build(structure: Structure, points: Arc<PointSet>, opts: &BuildOptions) -> Result<AnyIndex> {
        let euclid_only = |what: &str| {
            if opts.metric == Metric::Euclidean {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("the {what} index supports the euclidean metric only")))
            }
        };
        opts.metric.check(points.dim())?;
        Ok(match structure {
            Structure::Ortho => {
                euclid_only("ortho")?;
                AnyIndex::Ortho(OrthoRcpIndex::build(points))
            }
            Structure::Simplex => AnyIndex::Simplex(SimplexRcpIndex::build_with(points, opts.metric, opts.r, None)?),
            Structure::Halfspace if opts.mirror => {
                AnyIndex::Halfspace(HalfspaceRcpIndex::build_mirrored(points, opts.metric, opts.r, opts.seed)?)
            }
            Structure::Halfspace => {
                AnyIndex::Halfspace(HalfspaceRcpIndex::build_with(points, opts.metric, opts.r, opts.seed)?)
            }
            Structure::Ball => {
                euclid_only("ball")?;
                AnyIndex::Ball(BallRcpIndex::build(points, opts.r, opts.seed)?)
            }
        })
    }

    pub fn structure(&self) -> Structure {
        match self {
            AnyIndex::Ortho(_) => Structure::Ortho,
            AnyIndex::Simplex(_) => Structure::Simplex,
            AnyIndex::Halfspace(_) => Structure::Halfspace,
            AnyIndex::Ball(_) => Structure::Ball,
        }
    }

    pub fn points(&self) -> &Arc<PointSet> {
        match self {
            AnyIndex::Ortho(x) => x.points(),
            AnyIndex::Simplex(x) => x.points(),
            AnyIndex::Halfspace(x) => x.points(),
            AnyIndex::Ball(x) => x.points(),
        }
    }

    pub fn metric(&self) -> Metric {
        match self {
            AnyIndex::Simplex(x) => x.metric(),
            AnyIndex::Halfspace(x) => x.metric(),
            AnyIndex::Ortho(_) | AnyIndex::Ball(_) => Metric::Euclidean,
        }
    }

    /// Checks that this index can answer `q`.
    pub fn accepts(&self, q: &Range) -> Result<()> {
        let d = self.points().dim();
        if q.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: q.dim() });
        }
        let ok = match (self, q) {
            (AnyIndex::Ortho(_), Range::Box(_)) => true,
            (AnyIndex::Simplex(_), Range::Box(_) | Range::Simplex(_) | Range::Halfspace(_) | Range::Polytope(_)) => true,
            (AnyIndex::Halfspace(x), Range::Halfspace(h)) => h.side == Side::Below || x.mirror().is_some(),
            (AnyIndex::Ball(_), Range::Ball(_)) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("the {} index cannot answer a {} query", self.structure(), kind_name(q))))
        }
    }

    pub fn query(&self, q: &Range) -> Result<PairResult> {
        self.query_with_stats(q, false).map(|(r, _)| r)
    }

    pub fn query_with_stats(&self, q: &Range, count_windows: bool) -> Result<(PairResult, QueryStats)> {
        self.accepts(q)?;
        Ok(match (self, q) {
            (AnyIndex::Ortho(x), Range::Box(b)) => x.query_with_stats(b, count_windows),
            (AnyIndex::Simplex(x), q) => x.query_with_stats(q, count_windows),
            (AnyIndex::Halfspace(x), Range::Halfspace(h)) => x.query_with_stats(h, count_windows),
            (AnyIndex::Ball(x), Range::Ball(b)) => x.query_with_stats(b, count_windows),
            _ => unreachable!("checked by accepts"),
        })
    }
}

pub(crate) fn kind_name(q: &Range) -> &'static str {
    match q {
        Range::Box(_) => "box",
        Range::Simplex(_) => "simplex",
        Range::Halfspace(_) => "halfspace",
        Range::Ball(_) => "ball",
        Range::Polytope(_) => "polytope",
    }
}
