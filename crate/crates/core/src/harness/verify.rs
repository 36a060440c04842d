//! Index answers against the brute-force oracle.

use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::{PairResult, Range};
use crate::harness::brute::{brute_rcp, pack_bound};
use crate::harness::format::{fmt_f64, Report};
use crate::harness::index::AnyIndex;

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub query: usize,
    pub expected: PairResult,
    pub got: PairResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub structure: String,
    pub metric: String,
    pub n: usize,
    pub d: usize,
    pub queries: usize,
    pub mismatches: Vec<Mismatch>,
    /// Largest `|P_a|` seen over all queries.
    pub max_window: usize,
    pub pack_bound: usize,
    /// Queries whose largest `|P_a|` exceeded `pack_bound`.
    pub packing_violations: usize,
    /// Queries answered without the index.
    pub fallbacks: usize,
    /// Largest per-query sum of window occupancies ignoring the range, when
    /// counted.
    pub max_window_total: Option<usize>,
    /// Queries whose window total exceeded `pack_bound * n`.
    pub window_total_violations: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.packing_violations == 0 && self.window_total_violations == 0
    }

    pub fn to_report(&self) -> Report {
        let fields = [
            ("structure", self.structure.clone()),
            ("metric", self.metric.clone()),
            ("n", self.n.to_string()),
            ("d", self.d.to_string()),
            ("queries", self.queries.to_string()),
            ("mismatches", self.mismatches.len().to_string()),
            ("max_window", self.max_window.to_string()),
            ("pack_bound", self.pack_bound.to_string()),
            ("packing_violations", self.packing_violations.to_string()),
            ("fallbacks", self.fallbacks.to_string()),
            ("max_window_total", self.max_window_total.map_or_else(|| "-".to_string(), |x| x.to_string())),
            ("window_total_violations", self.window_total_violations.to_string()),
            ("status", if self.passed() { "PASS" } else { "FAIL" }.to_string()),
        ];
        let cols = ["query", "expected_i", "expected_j", "expected_dist", "got_i", "got_j", "got_dist"];
        let cells = |p: &PairResult| match p {
            Some(p) => [p.i.to_string(), p.j.to_string(), fmt_f64(p.dist())],
            None => ["-".to_string(), "-".to_string(), "-".to_string()],
        };
        Report {
            fields: fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            columns: cols.into_iter().map(String::from).collect(),
            rows: self
                .mismatches
                .iter()
                .map(|m| {
                    let mut row = vec![m.query.to_string()];
                    row.extend(cells(&m.expected));
                    row.extend(cells(&m.got));
                    row
                })
                .collect(),
        }
    }
}

/// Answers every query with `index` and with the oracle, in parallel on the
/// current rayon pool. The report does not depend on the thread count.
///
/// With `count_windows`, each query also counts the data points in every
/// window regardless of the range, and the per-query total is checked
/// against `pack_bound * n`.
pub fn run_verify(index: &AnyIndex, queries: &[Range], count_windows: bool) -> Result<VerifyReport> {
    for q in queries {
        index.accepts(q)?;
    }
    let ps = index.points();
    let metric = index.metric();
    let pack = pack_bound(metric.compared_dims(ps.dim()));
    let results: Vec<_> = queries
        .par_iter()
        .map(|q| {
            let (got, stats) = index.query_with_stats(q, count_windows).expect("accepted above");
            (got, brute_rcp(ps, q, metric), stats)
        })
        .collect();
    let mut rep = VerifyReport {
        structure: index.structure().to_string(),
        metric: metric.to_string(),
        n: ps.len(),
        d: ps.dim(),
        queries: queries.len(),
        mismatches: Vec::new(),
        max_window: 0,
        pack_bound: pack,
        packing_violations: 0,
        fallbacks: 0,
        max_window_total: None,
        window_total_violations: 0,
    };
    for (k, (got, expected, stats)) in results.into_iter().enumerate() {
        if got != expected {
            rep.mismatches.push(Mismatch { query: k, expected, got });
        }
        rep.max_window = rep.max_window.max(stats.max_window);
        rep.packing_violations += usize::from(stats.max_window > pack);
        rep.fallbacks += usize::from(stats.fallback);
        if count_windows {
            // no light set means an empty sum
            let total = stats.sum_window_all.unwrap_or(0);
            rep.max_window_total = Some(rep.max_window_total.unwrap_or(0).max(total));
            rep.window_total_violations += usize::from(total > pack * ps.len());
        }
    }
    Ok(rep)
}
