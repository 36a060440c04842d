//! Query-time scaling over a ladder of input sizes.

use std::hint::black_box;
use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::{HalfspaceRange, Range, Side};
use crate::harness::brute::baseline_rcp;
use crate::harness::format::{fmt_f64, Report};
use crate::harness::generate::{generate, generate_queries, Distribution, QueryKind};
use crate::harness::index::{AnyIndex, BuildOptions, Structure};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub structure: Structure,
    pub dist: Distribution,
    pub d: usize,
    pub sizes: Vec<usize>,
    pub queries: usize,
    pub seed: u64,
    pub r: Option<usize>,
    pub warmup: usize,
    pub reps: usize,
    /// Repetitions for the filter-and-sweep baseline; 0 skips it.
    pub baseline_reps: usize,
}

impl BenchConfig {
    /// 200 queries per size, 10 warmup queries, 30 timed passes, and a
    /// 5-pass baseline.
    pub fn new(structure: Structure, dist: Distribution, d: usize, sizes: Vec<usize>, seed: u64) -> Self {
        BenchConfig { structure, dist, d, sizes, queries: 200, seed, r: None, warmup: 10, reps: 30, baseline_reps: 5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub build_ns: u64,
    /// Mean over passes of the per-query time of one pass.
    pub mean_ns: f64,
    /// Median over passes of the per-query time of one pass.
    pub median_ns: f64,
    /// Mean size of the explicitly collected set per query.
    pub light: f64,
    /// Mean total window occupancy per query.
    pub window: f64,
    pub baseline_mean_ns: Option<f64>,
    pub baseline_median_ns: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub structure: Structure,
    pub dist: Distribution,
    pub d: usize,
    pub seed: u64,
    pub queries: usize,
    pub reps: usize,
    pub rows: Vec<BenchRow>,
    /// Log-log slope of median query time against `n`.
    pub slope: Option<f64>,
    pub baseline_slope: Option<f64>,
    pub environment: Vec<(String, String)>,
}

/// Least-squares slope of `ln y` against `ln x`. Needs at least 5 points,
/// all positive.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 5 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return None;
    }
    let k = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn environment() -> Vec<(String, String)> {
    let cpus = std::thread::available_parallelism().map_or(1, |c| c.get());
    vec![
        ("env_os".into(), std::env::consts::OS.into()),
        ("env_arch".into(), std::env::consts::ARCH.into()),
        ("env_cpus".into(), cpus.to_string()),
        ("env_threads".into(), rayon::current_num_threads().to_string()),
        ("env_build".into(), if cfg!(debug_assertions) { "debug" } else { "optimized" }.into()),
    ]
}

fn query_kind(s: Structure) -> QueryKind {
    match s {
        Structure::Ortho => QueryKind::Box,
        Structure::Simplex => QueryKind::Simplex,
        Structure::Halfspace => QueryKind::Halfspace,
        Structure::Ball => QueryKind::Ball,
    }
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// Times `reps` passes over `qs`. Returns the mean query time and the
/// median over queries of each query's fastest pass, which filters out
/// interruptions shorter than the whole run.
fn time_passes(qs: &[Range], reps: usize, mut run: impl FnMut(&Range)) -> (f64, f64) {
    let mut samples = vec![Vec::with_capacity(reps); qs.len()];
    for _ in 0..reps {
        for (q, times) in qs.iter().zip(&mut samples) {
            let t = Instant::now();
            run(q);
            times.push(t.elapsed().as_nanos() as f64);
        }
    }
    let total: f64 = samples.iter().flatten().sum();
    let mut per_query: Vec<f64> =
        samples.iter().map(|times| times.iter().copied().fold(f64::INFINITY, f64::min)).collect();
    (total / (qs.len() * reps) as f64, median(&mut per_query))
}

/// Builds the structure at every size and times its queries.
///
/// Halfspace benchmarks use queries below a hyperplane only and build the
/// index without its mirror twin, which would double the build time
/// without changing the query path being measured.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.queries > 0 && cfg.reps == 0 {
        return Err(Error::InvalidParameter("at least one timed repetition is needed".into()));
    }
    let mirror = cfg.structure != Structure::Halfspace;
    let opts = BuildOptions { r: cfg.r, seed: cfg.seed, mirror, ..BuildOptions::default() };
    let mut rows = Vec::with_capacity(cfg.sizes.len());
    for (k, &n) in cfg.sizes.iter().enumerate() {
        let seed = cfg.seed.wrapping_add(k as u64);
        let ps = Arc::new(generate(cfg.dist, n, cfg.d, seed)?);
        let mut qs = generate_queries(query_kind(cfg.structure), &ps, cfg.queries, seed ^ 0x9e37_79b9)?;
        if !mirror {
            for q in &mut qs {
                if let Range::Halfspace(h) = q {
                    *q = Range::Halfspace(HalfspaceRange::new(h.plane.clone(), Side::Below));
                }
            }
        }
        let t = Instant::now();
        let index = AnyIndex::build(cfg.structure, ps.clone(), &opts)?;
        let build_ns = t.elapsed().as_nanos() as u64;
        let mut row = BenchRow {
            n,
            build_ns,
            mean_ns: 0.0,
            median_ns: 0.0,
            light: 0.0,
            window: 0.0,
            baseline_mean_ns: None,
            baseline_median_ns: None,
        };
        if !qs.is_empty() {
            let mut light = 0usize;
            let mut window = 0usize;
            for q in &qs {
                let (_, st) = index.query_with_stats(q, false)?;
                light += st.light;
                window += st.sum_window;
            }
            row.light = light as f64 / qs.len() as f64;
            row.window = window as f64 / qs.len() as f64;
            for q in qs.iter().cycle().take(cfg.warmup) {
                black_box(index.query(q)?);
            }
            (row.mean_ns, row.median_ns) = time_passes(&qs, cfg.reps, |q| {
                black_box(index.query(q).expect("checked above"));
            });
            if cfg.baseline_reps > 0 {
                let metric = index.metric();
                for q in qs.iter().cycle().take(cfg.warmup) {
                    black_box(baseline_rcp(&ps, q, metric));
                }
                let (m, med) = time_passes(&qs, cfg.baseline_reps, |q| {
                    black_box(baseline_rcp(&ps, q, metric));
                });
                row.baseline_mean_ns = Some(m);
                row.baseline_median_ns = Some(med);
            }
        }
        rows.push(row);
    }
    let slope = fit_slope(&rows.iter().map(|r| (r.n as f64, r.median_ns)).collect::<Vec<_>>());
    let baseline: Option<Vec<(f64, f64)>> = rows.iter().map(|r| Some((r.n as f64, r.baseline_median_ns?))).collect();
    Ok(BenchReport {
        structure: cfg.structure,
        dist: cfg.dist,
        d: cfg.d,
        seed: cfg.seed,
        queries: cfg.queries,
        reps: cfg.reps,
        rows,
        slope,
        baseline_slope: baseline.and_then(|b| fit_slope(&b)),
        environment: environment(),
    })
}

const COLUMNS: [&str; 8] =
    ["n", "build_ns", "mean_ns", "median_ns", "light", "window", "baseline_mean_ns", "baseline_median_ns"];

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), fmt_f64)
}

impl BenchReport {
    pub fn to_report(&self) -> Report {
        let mut fields: Vec<(String, String)> = vec![
            ("structure".into(), self.structure.to_string()),
            ("dist".into(), self.dist.to_string()),
            ("d".into(), self.d.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("queries".into(), self.queries.to_string()),
            ("reps".into(), self.reps.to_string()),
            ("slope".into(), opt(self.slope)),
            ("baseline_slope".into(), opt(self.baseline_slope)),
        ];
        fields.extend(self.environment.iter().cloned());
        Report {
            fields,
            columns: COLUMNS.iter().map(|c| c.to_string()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.build_ns.to_string(),
                        fmt_f64(r.mean_ns),
                        fmt_f64(r.median_ns),
                        fmt_f64(r.light),
                        fmt_f64(r.window),
                        opt(r.baseline_mean_ns),
                        opt(r.baseline_median_ns),
                    ]
                })
                .collect(),
        }
    }

    pub fn from_report(rep: &Report) -> Result<BenchReport> {
        let bad = |what: &str| Error::Parse { line: 0, message: format!("bench report: bad or missing {what}") };
        let field = |k: &str| rep.field(k).ok_or_else(|| bad(k));
        let num = |s: &str, what: &str| s.parse::<f64>().map_err(|_| bad(what));
        let opt_num = |s: &str, what: &str| if s == "-" { Ok(None) } else { num(s, what).map(Some) };
        if rep.columns.iter().map(String::as_str).ne(COLUMNS) {
            return Err(bad("columns"));
        }
        let rows = rep
            .rows
            .iter()
            .map(|r| {
                Ok(BenchRow {
                    n: r[0].parse().map_err(|_| bad("n"))?,
                    build_ns: r[1].parse().map_err(|_| bad("build_ns"))?,
                    mean_ns: num(&r[2], "mean_ns")?,
                    median_ns: num(&r[3], "median_ns")?,
                    light: num(&r[4], "light")?,
                    window: num(&r[5], "window")?,
                    baseline_mean_ns: opt_num(&r[6], "baseline_mean_ns")?,
                    baseline_median_ns: opt_num(&r[7], "baseline_median_ns")?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BenchReport {
            structure: field("structure")?.parse()?,
            dist: field("dist")?.parse()?,
            d: field("d")?.parse().map_err(|_| bad("d"))?,
            seed: field("seed")?.parse().map_err(|_| bad("seed"))?,
            queries: field("queries")?.parse().map_err(|_| bad("queries"))?,
            reps: field("reps")?.parse().map_err(|_| bad("reps"))?,
            rows,
            slope: opt_num(field("slope")?, "slope")?,
            baseline_slope: opt_num(field("baseline_slope")?, "baseline_slope")?,
            environment: rep.fields.iter().filter(|(k, _)| k.starts_with("env_")).cloned().collect(),
        })
    }

    /// Aligned table for terminals.
    pub fn human(&self) -> String {
        let mut out = format!(
            "{} on {} data, d={}, {} queries x {} passes\n",
            self.structure, self.dist, self.d, self.queries, self.reps
        );
        out.push_str(&format!(
            "{:>8} {:>12} {:>12} {:>12} {:>10} {:>10} {:>14}\n",
            "n", "build ms", "mean us", "median us", "light", "window", "baseline us"
        ));
        for r in &self.rows {
            out.push_str(&format!(
                "{:>8} {:>12.1} {:>12.2} {:>12.2} {:>10.1} {:>10.1} {:>14}\n",
                r.n,
                r.build_ns as f64 / 1e6,
                r.mean_ns / 1e3,
                r.median_ns / 1e3,
                r.light,
                r.window,
                r.baseline_median_ns.map_or_else(|| "-".to_string(), |b| format!("{:.2}", b / 1e3)),
            ));
        }
        let s = |x: Option<f64>| x.map_or_else(|| "n/a (fewer than 5 sizes)".to_string(), |v| format!("{v:.3}"));
        out.push_str(&format!("slope {}\n", s(self.slope)));
        if self.rows.iter().any(|r| r.baseline_median_ns.is_some()) {
            out.push_str(&format!("baseline slope {}\n", s(self.baseline_slope)));
        }
        out
    }
}
