//! Acceptance suite. Each test prints one `ACCEPTANCE criterion N ... PASS|FAIL`
//! line to stderr (uncaptured) and then asserts. Tests hold a shared lock so
//! timings are never taken while another criterion is running.

use std::io::Write;
use std::sync::{Arc, Mutex, MutexGuard, OnceLock};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rcp_core::geometry::{
    ball_to_lifted_halfspace, dualize_point, lift, BallRange, Hyperplane, Metric,
};
use rcp_core::hardness::{SetIntersectionInstance, SetIntersectionSolver};
use rcp_core::harness::{
    generate, generate_queries, run_bench, run_verify, AnyIndex, BenchConfig, BuildOptions, Distribution,
    QueryKind, Structure, VerifyReport,
};
use rcp_core::partition::{build_cutting, build_partition};
use rcp_core::reporting::RangeTree;

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(n: usize, name: &str, pass: bool, detail: &str) {
    let word = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "ACCEPTANCE criterion {n} ({name}): {word} {detail}");
}

fn kind_for(s: Structure) -> QueryKind {
    match s {
        Structure::Ortho => QueryKind::Box,
        Structure::Simplex => QueryKind::Simplex,
        Structure::Halfspace => QueryKind::Halfspace,
        Structure::Ball => QueryKind::Ball,
    }
}

struct Case {
    label: String,
    report: VerifyReport,
}

/// The grid of criterion 1, computed once and shared with criterion 2.
fn sweep() -> &'static (Vec<Case>, f64) {
    static SWEEP: OnceLock<(Vec<Case>, f64)> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let t = Instant::now();
        let mut cases = Vec::new();
        for s in Structure::ALL {
            for d in [2, 3] {
                for dist in Distribution::ALL {
                    for n in [50, 500, 2000] {
                        for seed in 1..=5u64 {
                            let ps = Arc::new(generate(dist, n, d, seed).unwrap());
                            let qs = generate_queries(kind_for(s), &ps, 200, 1000 + seed).unwrap();
                            let opts = BuildOptions { seed, ..BuildOptions::default() };
                            let idx = AnyIndex::build(s, ps, &opts).unwrap();
                            let report = run_verify(&idx, &qs, true).unwrap();
                            cases.push(Case { label: format!("{s} d={d} {dist} n={n} seed={seed}"), report });
                        }
                    }
                }
            }
        }
        (cases, t.elapsed().as_secs_f64())
    })
}

#[test]
fn criterion_1_oracle_equivalence() {
    let _g = serial();
    let (cases, secs) = sweep();
    let bad: Vec<&Case> = cases.iter().filter(|c| !c.report.mismatches.is_empty()).collect();
    let queries: usize = cases.iter().map(|c| c.report.queries).sum();
    let mismatches: usize = cases.iter().map(|c| c.report.mismatches.len()).sum();
    let pass = bad.is_empty() && cases.len() == 480 && queries == 96_000;
    verdict(
        1,
        "oracle equivalence",
        pass,
        &format!("{} cases, {queries} queries, {mismatches} mismatches, sweep {secs:.0}s", cases.len()),
    );
    for c in bad.iter().take(5) {
        let _ = writeln!(std::io::stderr(), "  mismatch in {}: {:?}", c.label, c.report.mismatches.first());
    }
    assert!(pass);
}

#[test]
fn criterion_2_packing_bounds() {
    let _g = serial();
    let (cases, _) = sweep();
    let mut worst = [0usize; 4];
    let mut over_pack = 0;
    let mut over_total = 0;
    for c in cases.iter() {
        let r = &c.report;
        let want = if r.d == 2 { 11 } else { 51 };
        assert_eq!(r.pack_bound, want, "{}", c.label);
        worst[r.d] = worst[r.d].max(r.max_window);
        over_pack += r.packing_violations;
        over_total += r.window_total_violations;
        assert!(r.max_window_total.is_some());
        if r.packing_violations + r.window_total_violations > 0 {
            let _ = writeln!(std::io::stderr(), "  packing violated in {}", c.label);
        }
    }
    let pass = over_pack == 0 && over_total == 0;
    verdict(
        2,
        "packing bounds",
        pass,
        &format!(
            "max |P_a| d=2: {} (bound 11), d=3: {} (bound 51); queries over |P_a| bound: {over_pack}, over window-total bound: {over_total}",
            worst[2], worst[3]
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_3_heavy_node_census() {
    let _g = serial();
    let d = 2;
    let mut ratios = Vec::new();
    let mut ok = true;
    let mut detail = String::new();
    for k in 10..=17u32 {
        let n = 1usize << k;
        let ps = generate(Distribution::Uniform, n, d, u64::from(k)).unwrap();
        let tree = RangeTree::build(&ps);
        let heavy = tree.heavy_nodes().len();
        let canon = tree.total_canonical_size();
        let sqrt_up = (n as f64).sqrt().ceil() as usize;
        let log_up = k as usize;
        ok &= heavy <= canon / sqrt_up;
        ok &= canon <= n * (log_up + 1).pow(d as u32);
        let ratio = heavy as f64 / ((n as f64).sqrt() * (k as f64).powi(d as i32));
        detail.push_str(&format!(" 2^{k}:H={heavy},ratio={ratio:.4}"));
        ratios.push(ratio);
    }
    let monotone = ratios.windows(2).all(|w| w[1] <= 1.10 * w[0]);
    let pass = ok && monotone;
    verdict(3, "heavy-node census", pass, &format!("d={d};{detail}"));
    assert!(ok, "census bounds");
    assert!(monotone, "ratio not non-increasing within 10%: {ratios:?}");
}

fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0.ln()).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1.ln()).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0.ln() - mx) * (p.1.ln() - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0.ln() - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn criterion_4_partition_and_cutting_quality() {
    let _g = serial();
    let n = 1 << 14;
    let rs = [4usize, 16, 64, 256];
    let mut pass = true;
    let mut detail = String::new();
    let mut resamples = 0;
    for d in [2usize, 3] {
        let ps = generate(Distribution::Uniform, n, d, 44).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let family: Vec<Hyperplane> = (0..300)
            .map(|_| {
                let coeffs: Vec<f64> = (0..d - 1).map(|_| rng.random_range(-2.0..2.0)).collect();
                let through: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
                let offset = coeffs.iter().zip(&through).map(|(a, x)| a * x).sum::<f64>() - through[d - 1];
                Hyperplane::new(coeffs, offset).unwrap()
            })
            .collect();
        let mut means = Vec::new();
        for &r in &rs {
            let part = build_partition(&ps, r).unwrap();
            let mut seen = vec![false; n];
            for (i, class) in part.classes().iter().enumerate() {
                for &a in class {
                    assert!(!seen[a], "point in two classes");
                    seen[a] = true;
                    assert!(part.cell(i).contains(ps.point(a)));
                }
            }
            assert!(seen.iter().all(|&s| s));
            let total: usize = family.iter().map(|h| part.crossing_count(h)).sum();
            means.push((r as f64, total as f64 / family.len() as f64));
        }
        let slope = ls_slope(&means);
        let limit = (1.0 - 1.0 / d as f64) + 0.15;
        pass &= slope <= limit;
        detail.push_str(&format!(" d={d}: crossing slope {slope:.3} (limit {limit:.3});"));

        let duals: Vec<Hyperplane> = ps.iter().map(dualize_point).collect();
        for &r in &rs {
            let cut = build_cutting(&duals, r, 7).unwrap();
            let over = (0..cut.cell_count()).filter(|&i| cut.conflicts(i).len() > cut.cap()).count();
            assert_eq!(cut.cap(), (8 * n / r).max(1));
            pass &= over == 0;
            resamples += cut.resamples();
            detail.push_str(&format!(" r={r}: {} cells, max conflict {}/{};", cut.cell_count(), cut.max_conflict(), cut.cap()));
        }
    }
    pass &= resamples <= 64;
    verdict(4, "partition/cutting quality", pass, &format!("{detail} resamples {resamples}"));
    assert!(pass);
}

#[test]
fn criterion_5_query_time_scaling() {
    let _g = serial();
    let full: Vec<usize> = (10..=17).map(|k| 1usize << k).collect();
    let short: Vec<usize> = (10..=14).map(|k| 1usize << k).collect();
    let runs = [
        (Structure::Ortho, full.clone()),
        (Structure::Simplex, full.clone()),
        (Structure::Halfspace, full),
        (Structure::Ball, short),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for (s, sizes) in runs {
        let t = Instant::now();
        let rep = run_bench(&BenchConfig::new(s, Distribution::Uniform, 2, sizes, 5)).unwrap();
        let slope = rep.slope.expect("at least five sizes");
        let base = rep.baseline_slope.expect("baseline timed");
        let ok = match s {
            Structure::Ortho => slope <= 0.8 && base >= 0.9,
            _ => slope <= 0.95 && slope < base,
        };
        pass &= ok;
        detail.push_str(&format!(
            " {s}: slope {slope:.3}, baseline {base:.3}, sizes 2^{}..2^{} ({:.0}s){};",
            rep.rows[0].n.trailing_zeros(),
            rep.rows.last().unwrap().n.trailing_zeros(),
            t.elapsed().as_secs_f64(),
            if ok { "" } else { " FAIL" }
        ));
        let _ = write!(std::io::stderr(), "{}", rep.human());
    }
    verdict(5, "query-time scaling", pass, &detail);
    assert!(pass);
}

#[test]
fn criterion_6_reduction_soundness() {
    let _g = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut pairs = 0;
    let mut mismatches = 0;
    let mut separations = 0;
    let mut intersecting = 0;
    for k in 0..50u64 {
        let m = rng.random_range(2..=40);
        let n = rng.random_range(0..=600);
        let universe = [n / 8 + 1, n + 1, 10 * n + 1][k as usize % 3];
        let inst = SetIntersectionInstance::random(m, n, universe, k).unwrap();
        assert!(inst.len() <= 40 && inst.size() <= 600);
        let solver = SetIntersectionSolver::build(&inst, 0.25).unwrap();
        for i in 0..inst.len() {
            for j in 0..i {
                pairs += 1;
                let direct = inst.disjoint(i, j);
                intersecting += usize::from(!direct);
                mismatches += usize::from(solver.disjoint(i, j) != direct);
            }
        }
        let e = &solver.embedding;
        let sep2 = (2.0 * e.dmax) * (2.0 * e.dmax);
        for a in 0..e.points.len() {
            for b in a + 1..e.points.len() {
                if e.color_of[a] != e.color_of[b] {
                    separations += 1;
                    let d2 = Metric::Euclidean.dist2(e.points.point(a), e.points.point(b));
                    assert!(d2 >= sep2, "colors {a} and {b} closer than 2 dmax in instance {k}");
                }
            }
        }
    }
    let pass = mismatches == 0;
    verdict(
        6,
        "reduction soundness",
        pass,
        &format!("50 instances, {pairs} pairs ({intersecting} intersecting), {mismatches} mismatches, {separations} cross-color separations checked"),
    );
    assert!(pass);
}

#[test]
fn criterion_7_lifting_identities() {
    let _g = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut dist_bad = 0;
    let mut ball_bad = 0;
    let mut boundary = 0;
    for t in 0..10_000 {
        let d = 2 + t % 2;
        // half the draws use small integers so that boundary cases occur and
        // both sides are computed exactly
        let ints = t % 4 >= 2;
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..d)
                .map(|_| if ints { rng.random_range(-20i32..=20) as f64 } else { rng.random_range(-10.0..10.0) })
                .collect()
        };
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let lifted = Metric::Projected(d).dist2(&lift(&a), &lift(&b));
        dist_bad += usize::from(lifted.to_bits() != Metric::Euclidean.dist2(&a, &b).to_bits());

        let c = draw(&mut rng);
        let r = if ints { rng.random_range(0..=25) as f64 } else { rng.random_range(0.0..15.0) };
        let ball = BallRange::new(c, r).unwrap();
        let p = draw(&mut rng);
        boundary += usize::from(Metric::Euclidean.dist2(&p, &ball.center) == r * r);
        ball_bad += usize::from(ball.contains(&p) != ball_to_lifted_halfspace(&ball).contains(&lift(&p)));
    }
    let pass = dist_bad == 0 && ball_bad == 0;
    verdict(
        7,
        "lifting identities",
        pass,
        &format!("10000 distance pairs ({dist_bad} violations), 10000 point/ball pairs ({ball_bad} violations, {boundary} on the sphere)"),
    );
    assert!(pass);
}

