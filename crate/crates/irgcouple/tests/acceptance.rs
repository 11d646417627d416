//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed.
//! Exits non-zero if any criterion fails.

use std::path::PathBuf;
use std::time::Instant;

use irgcouple::config::{KernelSpec, ScalingSpec};
use irgcouple::{run_experiment, ExperimentConfig, ExperimentReport};
use irgcouple_core::properties::predict_chromatic_sparse_from_product;
use irgcouple_core::{
    chromatic_number_exact, kl_divergence_bernoulli, predict_chromatic_dense_d,
    predict_chromatic_sparse_ell, predict_quasi_clique, quasi_clique_number_exact, sample_er,
    Graph, PredictionWindow, SolveBudget, UniformStream,
};

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn load(name: &str) -> ExperimentConfig {
    ExperimentConfig::load(&config_path(name)).expect("config loads")
}

fn run(cfg: &ExperimentConfig) -> ExperimentReport {
    run_experiment(cfg).expect("experiment runs")
}

fn failed_assertions(r: &ExperimentReport) -> Vec<String> {
    r.assertions
        .iter()
        .filter(|a| !a.passed)
        .map(|a| format!("{}: {}", a.name, a.detail))
        .collect()
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn coupling_sandwich() -> Outcome {
    let kernels = [
        KernelSpec::Constant { p: 0.5 },
        KernelSpec::Block {
            grid: Some(vec![vec![0.2, 0.1], vec![0.1, 0.6]]),
            grid_path: None,
            breakpoints: None,
        },
        KernelSpec::Bump {
            m: 0.5,
            peak: 0.9,
            width: 0.3,
        },
    ];
    let scalings = [
        ScalingSpec::Constant { c: 1.0 },
        ScalingSpec::Linear { c: 1.0 },
    ];
    let mut base = load("coupling_bump.toml");
    base.n = vec![50, 200, 500];
    base.trials = 560;
    let mut triples = 0;
    let mut violations = 0;
    for kernel in &kernels {
        for scaling in &scalings {
            let mut cfg = base.clone();
            cfg.kernel = kernel.clone();
            cfg.scaling = scaling.clone();
            let r = run(&cfg);
            triples += r.records.len();
            violations += r
                .records
                .iter()
                .filter(|x| x.fields["violation"] != serde_json::Value::Bool(false))
                .count();
        }
    }
    outcome(
        violations == 0 && triples >= 10_000,
        format!("{triples} triples over 3 kernels x 2 scalings x n in {{50,200,500}}, {violations} violations"),
    )
}

/// Smallest `k` admitting a proper coloring, by exhaustive assignment.
fn brute_chromatic(g: &Graph) -> usize {
    fn assign(g: &Graph, v: usize, k: usize, colors: &mut Vec<usize>) -> bool {
        if v == g.n() {
            return true;
        }
        for c in 0..k {
            if g.neighbors(v)
                .iter()
                .all(|&u| (u as usize) >= v || colors[u as usize] != c)
            {
                colors[v] = c;
                if assign(g, v + 1, k, colors) {
                    return true;
                }
            }
        }
        false
    }
    (0..=g.n())
        .find(|&k| assign(g, 0, k, &mut vec![usize::MAX; g.n()]))
        .expect("n colors always suffice")
}

/// Largest subset whose edge count is at least `gamma · C(s, 2)`.
fn brute_quasi_clique(g: &Graph, gamma: f64) -> usize {
    let n = g.n();
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let s = mask.count_ones() as usize;
        if s <= best {
            continue;
        }
        let e = g
            .edges()
            .iter()
            .filter(|&&(u, v)| mask >> u & 1 == 1 && mask >> v & 1 == 1)
            .count();
        if e as f64 >= gamma * (s * (s - 1)) as f64 / 2.0 {
            best = s;
        }
    }
    best
}

fn random_graph(seed: u64, index: u64, max_n: u64) -> Graph {
    let stream = UniformStream::new(seed).split(index);
    let mut rd = stream.reader(0);
    let n = 1 + rd.below(max_n) as usize;
    let p = rd.next_f64();
    sample_er(n, p, &stream.split(1)).expect("valid probability")
}

fn solver_oracles() -> Outcome {
    let budget = SolveBudget::unlimited();
    let chi_bad = (0..500)
        .filter(|&i| {
            let g = random_graph(71, i, 8);
            chromatic_number_exact(&g, &budget).value() != Some(brute_chromatic(&g))
        })
        .count();
    let mut qc_bad = 0;
    for i in 0..200 {
        let g = random_graph(72, i, 12);
        for gamma in [0.5, 0.75, 1.0] {
            if quasi_clique_number_exact(&g, gamma, &budget).value()
                != Some(brute_quasi_clique(&g, gamma))
            {
                qc_bad += 1;
            }
        }
    }
    outcome(
        chi_bad == 0 && qc_bad == 0,
        format!("chromatic: {chi_bad}/500 mismatches; quasi-clique: {qc_bad}/600 mismatches"),
    )
}

fn predictor_values() -> Outcome {
    let mut notes = Vec::new();
    let ell = predict_chromatic_sparse_from_product(10.0, 1e-6)
        .map(|x| x.0)
        .ok();
    let ell_pn = predict_chromatic_sparse_ell(0.1, 101).map(|x| x.0).ok();
    let d3 = predict_chromatic_dense_d(3.0).map(|x| x.0).ok();
    let d20 = predict_chromatic_dense_d(20.0).map(|x| x.0).ok();
    let kl = kl_divergence_bernoulli(1.0, 0.5).unwrap_or(f64::NAN);
    let omega = match predict_quasi_clique(1000, 0.9, 0.5, 0.1) {
        Ok(PredictionWindow::QuasiClique { center, .. }) => center,
        _ => f64::NAN,
    };
    // 2 ln 1000 / (0.9 ln 1.8 + 0.1 ln 0.2), 30-digit evaluation.
    let omega_oracle = 37.535_599_194_082_01;
    let checks = [
        (
            ell == Some(4) && ell_pn == Some(4),
            format!("ell(10) = {ell:?}, ell(0.1 * 100) = {ell_pn:?}"),
        ),
        (d3 == Some(3), format!("d(3) = {d3:?}")),
        (d20 == Some(6), format!("d(20) = {d20:?}")),
        (
            (kl - std::f64::consts::LN_2).abs() <= 1e-12,
            format!("D(1, 0.5) = {kl}"),
        ),
        (
            (omega - omega_oracle).abs() <= 1e-2,
            format!("omega(1000, 0.9, 0.5) = {omega}"),
        ),
    ];
    let mut passed = true;
    for (ok, note) in checks {
        passed &= ok;
        notes.push(note);
    }
    outcome(passed, notes.join("; "))
}

fn coverage(name: &str, n: usize, refined: bool) -> Outcome {
    let r = run(&load(name));
    let s = r.summary(n).expect("summary for n");
    let (cov, interval) = if refined {
        (s.refined_coverage, s.refined_interval)
    } else {
        (s.coverage, s.coverage_interval)
    };
    let window = if refined { s.refined_window } else { s.window };
    let failed = failed_assertions(&r);
    outcome(
        cov.is_some_and(|c| c >= 0.8) && failed.is_empty(),
        format!(
            "window {window:?}, coverage {cov:?} over {} trials, Wilson 95% {interval:?}, mean {:?}; failed: {failed:?}",
            s.trials, s.mean_value
        ),
    )
}

fn hoeffding() -> Outcome {
    let r = run(&load("concentration.toml"));
    let s = r.summary(1000).expect("n = 1000");
    let tails = s.extra["tails"].as_array().cloned().unwrap_or_default();
    let mut passed = r.records.len() >= 10_000;
    let mut notes = Vec::new();
    for t in [50.0, 100.0, 150.0] {
        let row = tails.iter().find(|x| x["t"].as_f64() == Some(t));
        let Some(row) = row else {
            passed = false;
            notes.push(format!("t = {t} missing"));
            continue;
        };
        let emp = row["empirical"].as_f64().unwrap_or(f64::NAN);
        let bound = row["hoeffding_bound"].as_f64().unwrap_or(f64::NAN);
        let sigma = row["sigma"].as_f64().unwrap_or(f64::NAN);
        let exact = row["binomial_tail"].as_f64().unwrap_or(f64::NAN);
        passed &= emp <= bound + 3.0 * sigma;
        notes.push(format!(
            "t={t}: empirical {emp:.3e} <= {bound:.3e} + 3 sigma, binomial {exact:.3e}"
        ));
    }
    let failed = failed_assertions(&r);
    passed &= failed.is_empty();
    notes.push(format!("failed: {failed:?}"));
    outcome(passed, notes.join("; "))
}

fn assumption_suites() -> Outcome {
    let suite = run(&load("assumptions.toml"));
    let counter = run(&load("counterexample.toml"));
    let fixed = &counter.extras["fixed_witness"];
    let before = fixed["before"].as_f64();
    let after = fixed["after"].as_f64();
    let triangle = suite
        .assertion("h2_omega_triangle_witness")
        .is_some_and(|a| a.passed);
    let mut failed = failed_assertions(&suite);
    failed.extend(failed_assertions(&counter));
    let fixtures = suite.records.len();
    outcome(
        failed.is_empty() && triangle && before == Some(1.0) && after == Some(4.0 / 3.0) && fixtures >= 500,
        format!(
            "{fixtures} fixtures; triangle witness 3 -> 4: {triangle}; average distance {before:?} -> {after:?}; failed: {failed:?}"
        ),
    )
}

fn determinism() -> Outcome {
    let mut notes = Vec::new();
    let mut passed = true;
    for (name, trials) in [
        ("coupling_bump.toml", 50),
        ("chromatic_bump.toml", 6),
        ("clique_er.toml", 2),
        ("concentration.toml", 2000),
        ("assumptions.toml", 20),
        ("counterexample.toml", 2000),
    ] {
        let mut cfg = load(name);
        cfg.trials = trials;
        let texts: Vec<(String, String)> = [1, 3]
            .into_iter()
            .map(|threads| {
                cfg.threads = threads;
                let r = run(&cfg);
                (r.to_json().expect("json"), r.to_csv().expect("csv"))
            })
            .collect();
        let same = texts[0] == texts[1];
        passed &= same;
        notes.push(format!(
            "{}: {}",
            cfg.kind.tag(),
            if same { "identical" } else { "DIFFERS" }
        ));
    }
    outcome(passed, notes.join(", "))
}

fn main() {
    type Criterion = (u32, &'static str, Option<f64>, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        (1, "coupling sandwich", Some(300.0), coupling_sandwich),
        (2, "solver oracle equivalence", Some(600.0), solver_oracles),
        (3, "predictor values", None, predictor_values),
        (
            4,
            "chromatic window coverage, bump k(m,m)=3, n=300",
            Some(1200.0),
            || coverage("chromatic_bump.toml", 300, false),
        ),
        (
            5,
            "clique number in refined window, G(500, 1/2)",
            Some(900.0),
            || coverage("clique_er.toml", 500, true),
        ),
        (6, "Hoeffding concentration", Some(60.0), hoeffding),
        (
            7,
            "assumption suites and counterexample",
            None,
            assumption_suites,
        ),
        (8, "determinism across thread counts", None, determinism),
    ];
    let mut all = true;
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let o = f();
        let secs = start.elapsed().as_secs_f64();
        let in_time = limit.is_none_or(|l| secs < l);
        let passed = o.passed && in_time;
        all &= passed;
        let limit_note = limit
            .map(|l| format!(" (limit {l:.0} s)"))
            .unwrap_or_default();
        println!(
            "criterion {id} {}: {name} [{secs:.1} s{limit_note}] {}",
            if passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if !all {
        std::process::exit(1);
    }
}
