//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use walkbound::bounds::{self, Check, GOption, Status, TheoremConfig};
use walkbound::cli;
use walkbound::exact;
use walkbound::flows;
use walkbound::generators;
use walkbound::montecarlo::{self, Estimator, GraphWalker, IntegerWalker, SimConfig};
use walkbound::reference;
use walkbound::WeightedGraph;

const CORPUS_SEED: u64 = 0;
const CORPUS_SIZE: usize = 1000;
const CORPUS_TIME_LIMIT: Duration = Duration::from_secs(120);

const FLOW_BETAS: [f64; 3] = [0.1, 0.5, 0.9];
const NODE_LAW_TOL: f64 = 1e-10;
const CYCLE_GAP_TOL: f64 = 1e-9;
const RECONSTRUCTION_TOL: f64 = 1e-9;
const CONVEX_TOL: f64 = 1e-9;
const ARRAY_TOL: f64 = 1e-9;

const UNIT_PATH_TOL: f64 = 1e-10;
const FAST_PATH_TOL: f64 = 1e-9;
const SERIES_TOL: f64 = 1e-12;
const COMMUTE_TOL: f64 = 1e-9;

const RATE_TOL: f64 = 1e-12;
const CONVEXITY_TOL: f64 = 1e-9;

/// `E T (p + 2) log n / (2 n^2)` on the polynomial fast path.
const POLY_GOLDEN: [(f64, [f64; 4]); 2] = [
    (
        0.0,
        [
            1.7983915822846057,
            1.578538139533399,
            1.4564802137559334,
            1.3788863649833842,
        ],
    ),
    (
        2.0,
        [
            1.376330181882106,
            1.285180787538807,
            1.230727154862232,
            1.1946304833188364,
        ],
    ),
];
const POLY_NS: [usize; 4] = [1_000, 10_000, 100_000, 1_000_000];
const POLY_GOLDEN_TOL: f64 = 1e-9;

/// `(n, t = floor(alpha n^2 / log n), P(X_t >= n))` for `p = 0`, `alpha = 1/2`.
const TAPP_GOLDEN: [(u64, u64, f64); 3] = [
    (200, 3774, 0.009698062934849766),
    (400, 13352, 0.00734424056013886),
    (800, 47871, 0.005582844517828544),
];
const TAPP_GOLDEN_TOL: f64 = 1e-9;

const MC_GRAPHS: usize = 20;
const MC_REPS: u64 = 100_000;
const MC_SIGMAS: f64 = 4.0;
const SPEED_STEPS: u64 = 100_000;
const SPEED_REPS: u64 = 200;
const SPEED_TOL: f64 = 0.01;

const FACT_PAIRS: usize = 100;
const FACT_TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct CorpusRun {
    graphs: Vec<WeightedGraph>,
    reports: Vec<bounds::BoundReport>,
    elapsed: Duration,
}

fn corpus_run() -> CorpusRun {
    let start = Instant::now();
    let graphs = generators::corpus(CORPUS_SEED, CORPUS_SIZE).expect("corpus");
    let config = TheoremConfig::default();
    let reports = graphs
        .iter()
        .map(|g| bounds::check_theorem1(g, &config).expect("bounds"))
        .collect();
    CorpusRun {
        graphs,
        reports,
        elapsed: start.elapsed(),
    }
}

fn count(run: &CorpusRun, checks: &[Check], status: Status) -> usize {
    run.reports
        .iter()
        .flat_map(|r| &r.verdicts)
        .filter(|v| checks.contains(&v.check) && v.status == status)
        .count()
}

fn criterion_1(run: &CorpusRun) -> Outcome {
    let checks = [Check::Mean, Check::Tail];
    let fails = count(run, &checks, Status::Fail);
    let unchecked = count(run, &checks, Status::Unchecked);
    let passes = count(run, &checks, Status::Pass);
    let tails_per_option = run.reports.iter().all(|r| {
        [GOption::A, GOption::B].iter().all(|&o| {
            let g = r.g(o);
            g <= 1.0 + bounds::VACUOUS_GAP || r.ld_curve(o).len() == 12
        })
    });
    outcome(
        fails == 0 && unchecked == 0 && tails_per_option && run.elapsed < CORPUS_TIME_LIMIT,
        format!(
            "{} graphs, {passes} passing mean/tail verdicts, {fails} violations, {unchecked} unchecked, {:.1}s",
            run.graphs.len(),
            run.elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2(run: &CorpusRun) -> Outcome {
    let fails = count(run, &[Check::Laplace], Status::Fail);
    let total: usize = run
        .reports
        .iter()
        .map(|r| {
            r.verdicts
                .iter()
                .filter(|v| v.check == Check::Laplace)
                .count()
        })
        .sum();
    outcome(
        fails == 0 && total == run.graphs.len() * 2 * 19,
        format!("{total} transform verdicts, {fails} violations"),
    )
}

fn criterion_3(run: &CorpusRun) -> Outcome {
    let mut worst = [0.0f64; 6];
    let mut short_paths = 0;
    let mut r_violations = 0;
    let mut checked = 0;
    for (i, g) in run.graphs.iter().enumerate() {
        let reduced = bounds::reduce(g);
        let dist = reduced.origin_target_distance().expect("connected");
        for &beta in &FLOW_BETAS {
            let flow = flows::build_flow(&reduced, beta).expect("flow");
            let cycles = flows::sample_cycles(&flow, 32, i as u64);
            let d = flows::decompose(&flow).expect("decomposition");
            let exact = exact::walk_parameters(&reduced, beta).expect("parameters");
            let combined = d.combined_parameters().expect("combined");
            let arrays = flows::array_representation(&d);
            let convex = (exact.s - combined.s)
                .abs()
                .max((exact.r - combined.r).abs())
                .max((exact.gamma - combined.gamma).abs());
            let values = [
                flows::verify_node_law(&flow),
                flows::verify_reversibility(&flow, &cycles),
                d.reconstruction_error(&flow),
                convex,
                (arrays.survival() - exact.s).abs(),
                (arrays.gamma().expect("gamma") - exact.gamma).abs(),
            ];
            for (w, v) in worst.iter_mut().zip(values) {
                *w = w.max(v);
            }
            short_paths += d
                .components
                .iter()
                .filter(|c| c.path.len() - 1 < dist)
                .count();
            if exact.r > arrays.visits_bound() * (1.0 + 1e-12) {
                r_violations += 1;
            }
            checked += 1;
        }
    }
    let limits = [
        NODE_LAW_TOL,
        CYCLE_GAP_TOL,
        RECONSTRUCTION_TOL,
        CONVEX_TOL,
        ARRAY_TOL,
        ARRAY_TOL,
    ];
    let within = worst.iter().zip(limits).all(|(w, l)| *w < l);
    outcome(
        within && short_paths == 0 && r_violations == 0,
        format!(
            "{checked} flows; node law {:.1e}, cycle gap {:.1e}, reconstruction {:.1e}, convexity {:.1e}, S array {:.1e}, Gamma array {:.1e}; {short_paths} short paths, {r_violations} R violations",
            worst[0], worst[1], worst[2], worst[3], worst[4], worst[5]
        ),
    )
}

fn criterion_4(run: &CorpusRun) -> Outcome {
    let mut unit = 0.0f64;
    for n in 1..=50 {
        let et = exact::expected_hitting_time(&generators::unit_path(n).unwrap()).unwrap();
        let nn = (n * n) as f64;
        unit = unit.max((et - nn).abs() / nn);
    }
    let mut fast = 0.0f64;
    for n in [4, 5, 10, 50, 200, 1000] {
        for g in [1.05, 1.5, 2.0, 3.0, 10.0] {
            // largest weight is about g^n; stay inside f64
            if n as f64 * f64::ln(g) > 700.0 {
                continue;
            }
            let graph = generators::fast_path(n, g).unwrap();
            let et = exact::expected_hitting_time(&graph).unwrap();
            let closed = generators::fast_path_expected_time(n, g);
            fast = fast.max((et - closed).abs() / closed);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut series = 0.0f64;
    for _ in 0..50 {
        let len = rng.random_range(1..=60);
        let weights: Vec<f64> = (0..len).map(|_| rng.random_range(0.1..10.0)).collect();
        let labels = (0..=len).map(|i| i.to_string()).collect();
        let edges = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (i, i + 1, w))
            .collect();
        let g = WeightedGraph::from_parts(labels, edges, 0, vec![len], None).unwrap();
        let r = exact::effective_resistance(&g).unwrap();
        let expected: f64 = weights.iter().map(|w| 1.0 / w).sum();
        series = series.max((r - expected).abs() / expected);
    }
    let commute = run
        .graphs
        .iter()
        .map(|g| cli::commute_error(g).unwrap())
        .fold(0.0, f64::max);
    outcome(
        unit < UNIT_PATH_TOL && fast < FAST_PATH_TOL && series < SERIES_TOL && commute < COMMUTE_TOL,
        format!(
            "unit path {unit:.1e}, fast path {fast:.1e}, series rule {series:.1e}, commute {commute:.1e}"
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut worst_mean = 0.0f64;
    let mut worst_one = 0.0f64;
    let mut worst_convex = 0.0f64;
    for g in [1.01, 1.1, 1.5, 2.0, 3.0, 5.0, 20.0] {
        let m = reference::mean_m(g);
        worst_mean = worst_mean.max(reference::rate_i(g, m).unwrap().abs());
        let e1 = (-reference::rate_i(g, 1.0).unwrap()).exp();
        worst_one = worst_one.max((e1 - g / (g + 1.0)).abs());
        let grid: Vec<f64> = (0..=40)
            .map(|i| 1.0 + (m - 1.0) * i as f64 / 40.0)
            .collect();
        let vals: Vec<f64> = grid
            .iter()
            .map(|&a| reference::rate_i(g, a).unwrap())
            .collect();
        for w in vals.windows(3) {
            worst_convex = worst_convex.min(w[0] - 2.0 * w[1] + w[2]);
        }
    }
    outcome(
        worst_mean < RATE_TOL && worst_one < RATE_TOL && worst_convex >= -CONVEXITY_TOL,
        format!(
            "I(m_g) {worst_mean:.1e}, exp(-I(1)) vs g/(g+1) {worst_one:.1e}, min second difference {worst_convex:.1e}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (p, golden) in POLY_GOLDEN {
        let args = cli::SweepArgs {
            family: cli::SweepFamily::PolyFastPath,
            n_list: POLY_NS.to_vec(),
            g: None,
            p,
            max_vertices: 1_000_001,
            out: None,
        };
        let rows = cli::sweep_rows(&args).expect("sweep");
        let ratios: Vec<f64> = rows
            .iter()
            .map(|r| {
                let n = r.n as f64;
                r.closed_form_et * (p + 2.0) * n.ln() / (2.0 * n * n)
            })
            .collect();
        let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
        let above_one = ratios.iter().all(|&r| r >= 1.0);
        let bounded = rows.iter().all(|r| r.mean_bound <= r.closed_form_et);
        let golden_ok = ratios
            .iter()
            .zip(golden)
            .all(|(r, g)| (r - g).abs() <= POLY_GOLDEN_TOL * g);
        // informational: the linear solve loses accuracy as g approaches 1
        let solve_drift = rows
            .iter()
            .filter_map(|r| {
                r.exact_et
                    .map(|e| (e - r.closed_form_et).abs() / r.closed_form_et)
            })
            .fold(0.0, f64::max);
        pass &= decreasing && above_one && bounded && golden_ok;
        detail.push(format!(
            "p={p}: ratios {}, exact solve drift {solve_drift:.1e}",
            ratios
                .iter()
                .map(|r| format!("{r:.4}"))
                .collect::<Vec<_>>()
                .join(" > ")
        ));
    }
    outcome(pass, detail.join("; "))
}

fn criterion_7() -> Outcome {
    let (alpha, p) = (0.5, 0.0);
    let target = reference::tapp_exponent(alpha, p).unwrap();
    let mut gaps = Vec::new();
    let mut golden_ok = true;
    for (n, t, golden) in TAPP_GOLDEN {
        let nf = n as f64;
        let g = generators::polyg_g(nf, p).unwrap();
        let steps = (alpha * nf * nf / nf.ln()).floor() as u64;
        let prob = reference::position_tail(g, steps, n).unwrap();
        golden_ok &= steps == t && (prob - golden).abs() <= TAPP_GOLDEN_TOL * golden;
        gaps.push((-prob.ln() / nf.ln() - target).abs());
    }
    let shrinking = gaps.windows(2).all(|w| w[1] < w[0]);
    outcome(
        (target - 0.25).abs() < 1e-15 && golden_ok && shrinking,
        format!(
            "gaps to 0.25: {}",
            gaps.iter()
                .map(|g| format!("{g:.4}"))
                .collect::<Vec<_>>()
                .join(" > ")
        ),
    )
}

fn criterion_8(run: &CorpusRun) -> Outcome {
    let mut worst_z = 0.0f64;
    let mut censored = 0;
    for (i, g) in run.graphs.iter().take(MC_GRAPHS).enumerate() {
        let reduced = bounds::reduce(g);
        let (mean, second) = exact::hitting_moments(&reduced).unwrap();
        let se = ((second - mean * mean) / MC_REPS as f64).sqrt();
        let walker = GraphWalker::new(g).unwrap();
        let samples = montecarlo::simulate_hitting(
            &walker,
            &SimConfig::hitting(1000 + i as u64, MC_REPS, u64::MAX),
        );
        censored += samples.censored();
        let (estimate, _) = samples.mean();
        worst_z = worst_z.max((estimate - mean).abs() / se);
    }

    let walker = IntegerWalker::new(2.0, None).unwrap();
    let config = SimConfig::escape(8, SPEED_REPS, vec![SPEED_STEPS], Estimator::SpeedRatio);
    let speed = montecarlo::escape_ratios(&walker, &config)
        .unwrap()
        .summary(Estimator::SpeedRatio)[0]
        .mean;

    let dir = tempfile::tempdir().unwrap();
    let graph_path = dir.path().join("g.json");
    std::fs::write(&graph_path, walkbound::graph::serialize(&run.graphs[0])).unwrap();
    let csv = |name: &str| {
        let out = dir.path().join(name);
        let code = cli::main_with([
            "walkbound".as_ref(),
            "simulate".as_ref(),
            graph_path.as_os_str(),
            "--seed".as_ref(),
            "17".as_ref(),
            "--reps".as_ref(),
            "2000".as_ref(),
            "--out".as_ref(),
            out.as_os_str(),
        ]);
        assert_eq!(code, std::process::ExitCode::SUCCESS);
        std::fs::read(out).unwrap()
    };
    let identical = csv("a.csv") == csv("b.csv");

    outcome(
        worst_z <= MC_SIGMAS && censored == 0 && (speed - 1.0 / 3.0).abs() <= SPEED_TOL && identical,
        format!(
            "worst |mean - E T| = {worst_z:.2} standard errors over {MC_GRAPHS} graphs, speed {speed:.5}, identical CSVs: {identical}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_order = f64::INFINITY;
    let mut worst_equation = f64::INFINITY;
    for _ in 0..FACT_PAIRS {
        let n: usize = rng.random_range(3..=500);
        let ratio = 10f64.powf(rng.random_range(-3.0..8.0));
        let ga = bounds::solve_g_a(n, ratio).unwrap();
        let gp = bounds::g_prime(n, ratio).unwrap();
        worst_order = worst_order.min((gp - ga) / ga);
        // (g' - 1)^2 g'^(n-2) against 2 ratio, in logs
        let lhs = 2.0 * (gp - 1.0).ln() + (n as f64 - 2.0) * gp.ln();
        worst_equation = worst_equation.min(lhs - (2.0 * ratio).ln());
    }
    outcome(
        worst_order >= -FACT_TOL && worst_equation >= -FACT_TOL,
        format!("min (g' - g_a)/g_a {worst_order:.3e}, min log margin {worst_equation:.3e}"),
    )
}

fn main() {
    let run = corpus_run();
    let results = [
        ("bound soundness", criterion_1(&run)),
        ("Laplace domination", criterion_2(&run)),
        ("flow laws and decomposition", criterion_3(&run)),
        ("closed forms", criterion_4(&run)),
        ("rate function", criterion_5()),
        ("polynomial scaling trend", criterion_6()),
        ("polynomial tail exponent trend", criterion_7()),
        ("Monte Carlo consistency", criterion_8(&run)),
        ("explicit odds bound", criterion_9()),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!(
            "{} criterion {}: {name} ({})",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
