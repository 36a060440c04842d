use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use rcp_core::geometry::{Metric, PairResult, PointSet, Range};
use rcp_core::harness::format::{fmt_f64, Report};
use rcp_core::harness::{
    generate, generate_queries, parse_points, parse_queries, parse_sets, run_bench, run_verify, write_points,
    write_queries, write_sets, AnyIndex, BenchConfig, BuildOptions, Distribution, QueryKind, Structure,
};
use rcp_core::hardness::{SetIntersectionInstance, SetIntersectionSolver};

/// Range closest-pair structures: build, query, verify against brute force,
/// benchmark, and run the set-intersection reduction.
///
/// RCP_THREADS caps the worker threads used by verify (0 runs sequentially).
#[derive(Parser)]
#[command(name = "rcp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index over a point file and print its summary.
    Build(IndexArgs),
    /// Answer every query in a query file.
    Query {
        #[command(flatten)]
        index: IndexArgs,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare an index against brute force on a query file. Exits with
    /// status 1 on any mismatch.
    Verify {
        #[command(flatten)]
        index: IndexArgs,
        #[arg(long)]
        queries: PathBuf,
        /// Also count window occupancy ignoring the range and check the
        /// per-query total against the packing bound.
        #[arg(long)]
        count_windows: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time queries over a ladder of input sizes.
    Bench(BenchArgs),
    /// Answer set-disjointness queries through the range closest-pair
    /// reduction and compare with direct answers.
    Reduce {
        /// Set family file: a count line, then `size v1 .. v_size` per set.
        #[arg(long)]
        sets: PathBuf,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write generated inputs.
    #[command(subcommand)]
    Generate(Generate),
}

#[derive(Args)]
struct IndexArgs {
    #[arg(long)]
    structure: Structure,
    #[arg(long)]
    points: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Partition or cutting parameter (default depends on n and d).
    #[arg(long)]
    r: Option<usize>,
    /// `euclidean` or `projected:k`.
    #[arg(long, default_value = "euclidean")]
    metric: Metric,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    structure: Structure,
    #[arg(long, default_value = "uniform")]
    dist: Distribution,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Comma-separated sizes, e.g. `1024,2048,4096`.
    #[arg(long, value_delimiter = ',', default_values_t = [1024, 2048, 4096, 8192, 16384])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    queries: usize,
    #[arg(long, default_value_t = 30)]
    reps: usize,
    #[arg(long, default_value_t = 5)]
    baseline_reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    r: Option<usize>,
    /// Machine-readable report file; the table goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Generate {
    Points {
        #[arg(long, default_value = "uniform")]
        dist: Distribution,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Queries {
        /// box, simplex, halfspace or ball.
        #[arg(long)]
        kind: QueryKind,
        /// Point file the queries are fitted to.
        #[arg(long)]
        points: PathBuf,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Sets {
        #[arg(long)]
        m: usize,
        /// Total number of elements over all sets.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        universe: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_points(path: &Path) -> Result<Arc<PointSet>> {
    Ok(Arc::new(parse_points(&read(path)?).with_context(|| format!("in {}", path.display()))?))
}

fn load_queries(path: &Path) -> Result<Vec<Range>> {
    parse_queries(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn build_index(a: &IndexArgs) -> Result<(AnyIndex, u64)> {
    let ps = load_points(&a.points)?;
    let opts = BuildOptions { r: a.r, seed: a.seed, metric: a.metric, ..BuildOptions::default() };
    let t = Instant::now();
    let idx = AnyIndex::build(a.structure, ps, &opts)?;
    Ok((idx, t.elapsed().as_nanos() as u64))
}

fn pair_cells(p: &PairResult) -> Vec<String> {
    match p {
        Some(p) => vec![p.i.to_string(), p.j.to_string(), fmt_f64(p.dist())],
        None => vec!["-".into(), "-".into(), "-".into()],
    }
}

fn summary(idx: &AnyIndex, build_ns: u64) -> Report {
    let ps = idx.points();
    let mut fields = vec![
        ("structure".to_string(), idx.structure().to_string()),
        ("metric".to_string(), idx.metric().to_string()),
        ("n".to_string(), ps.len().to_string()),
        ("d".to_string(), ps.dim().to_string()),
        ("build_ns".to_string(), build_ns.to_string()),
    ];
    let mut add = |k: &str, v: String| fields.push((k.to_string(), v));
    match idx {
        AnyIndex::Ortho(x) => {
            add("heavy_nodes", x.heavy_count().to_string());
            add("heavy_pairs", x.phi_len().to_string());
        }
        AnyIndex::Simplex(x) => add("r", x.r().to_string()),
        AnyIndex::Halfspace(x) => {
            add("r", x.r().to_string());
            add("cells", x.cutting().map_or(0, |c| c.cell_count()).to_string());
        }
        AnyIndex::Ball(x) => {
            add("r", x.inner().r().to_string());
            add("cells", x.inner().cutting().map_or(0, |c| c.cell_count()).to_string());
        }
    }
    Report { fields, columns: Vec::new(), rows: Vec::new() }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Build(a) => {
            let (idx, ns) = build_index(&a)?;
            print!("{}", summary(&idx, ns).write());
        }
        Command::Query { index, queries, out } => {
            let (idx, _) = build_index(&index)?;
            let qs = load_queries(&queries)?;
            let mut rows = Vec::with_capacity(qs.len());
            for (k, q) in qs.iter().enumerate() {
                let ans = idx.query(q).with_context(|| format!("query {} of {}", k + 1, queries.display()))?;
                let mut row = vec![k.to_string()];
                row.extend(pair_cells(&ans));
                rows.push(row);
            }
            let rep = Report {
                fields: vec![("structure".into(), idx.structure().to_string()), ("queries".into(), qs.len().to_string())],
                columns: ["query", "i", "j", "dist"].map(String::from).to_vec(),
                rows,
            };
            emit(out.as_deref(), &rep.write())?;
        }
        Command::Verify { index, queries, count_windows, out } => {
            let (idx, _) = build_index(&index)?;
            let qs = load_queries(&queries)?;
            let rep = run_verify(&idx, &qs, count_windows)?;
            emit(out.as_deref(), &rep.to_report().write())?;
            if out.is_some() {
                println!("{} mismatches={}", if rep.passed() { "PASS" } else { "FAIL" }, rep.mismatches.len());
            }
            if !rep.passed() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Bench(b) => {
            if b.sizes.len() < 5 {
                eprintln!("note: fewer than 5 sizes, no slope will be fitted");
            }
            let cfg = BenchConfig {
                queries: b.queries,
                r: b.r,
                reps: b.reps,
                baseline_reps: b.baseline_reps,
                ..BenchConfig::new(b.structure, b.dist, b.d, b.sizes, b.seed)
            };
            let rep = run_bench(&cfg)?;
            print!("{}", rep.human());
            if let Some(p) = &b.out {
                emit(Some(p), &rep.to_report().write())?;
            }
        }
        Command::Reduce { sets, eps, out } => {
            let inst = parse_sets(&read(&sets)?).with_context(|| format!("in {}", sets.display()))?;
            let (rep, ok) = reduce(&inst, eps)?;
            emit(out.as_deref(), &rep.write())?;
            if !ok {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Generate(g) => match g {
            Generate::Points { dist, n, d, seed, out } => emit(out.as_deref(), &write_points(&generate(dist, n, d, seed)?))?,
            Generate::Queries { kind, points, count, seed, out } => {
                let ps = load_points(&points)?;
                emit(out.as_deref(), &write_queries(&generate_queries(kind, &ps, count, seed)?)?)?
            }
            Generate::Sets { m, n, universe, seed, out } => {
                emit(out.as_deref(), &write_sets(&SetIntersectionInstance::random(m, n, universe, seed)?))?
            }
        },
    }
    Ok(ExitCode::SUCCESS)
}

/// All pairs `j < i`, answered through the reduction and directly.
fn reduce(inst: &SetIntersectionInstance, eps: f64) -> Result<(Report, bool)> {
    let solver = SetIntersectionSolver::build(inst, eps)?;
    let mut rows = Vec::new();
    let mut mismatches = 0;
    for i in 0..inst.len() {
        for j in 0..i {
            let via = solver.disjoint(i, j);
            let direct = inst.disjoint(i, j);
            mismatches += usize::from(via != direct);
            rows.push(vec![i.to_string(), j.to_string(), via.to_string(), direct.to_string()]);
        }
    }
    let fields = vec![
        ("sets".to_string(), inst.len().to_string()),
        ("elements".to_string(), inst.size().to_string()),
        ("points".to_string(), solver.embedding.points.len().to_string()),
        ("dmax".to_string(), fmt_f64(solver.embedding.dmax)),
        ("pairs".to_string(), rows.len().to_string()),
        ("mismatches".to_string(), mismatches.to_string()),
    ];
    let rep = Report { fields, columns: ["i", "j", "disjoint_via_rcp", "disjoint_direct"].map(String::from).to_vec(), rows };
    Ok((rep, mismatches == 0))
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("RCP_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().with_context(|| format!("RCP_THREADS must be a number, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_report() {
        let inst = SetIntersectionInstance::new(vec![vec![1.0, 2.0], vec![2.0], vec![3.0]]).unwrap();
        let (rep, ok) = reduce(&inst, 0.25).unwrap();
        assert!(ok);
        assert_eq!(rep.rows.len(), 3);
        assert_eq!(rep.rows[0], ["1", "0", "false", "false"]);
        if let Err(e) = reduce(&inst, 0.7) {
            assert!(e.to_string().contains("eps"));
        } else {
            panic!("eps out of range accepted");
        }
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
