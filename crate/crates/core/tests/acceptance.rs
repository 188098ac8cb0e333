//! Acceptance checks. Prints one line per criterion. With `--strict` the
//! process exits nonzero when any check fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use caga_core::bench::{baseline_config, run_suite, write_history, Overrides, Problem, Suite};
use caga_core::elementary::{demo_rule, evolve, random_row};
use caga_core::genome::{decode, encode, random_genome, Genome, Layout, VariableSpec};
use caga_core::lattice::{classify, sweep_with_order, RuleCase, SweepOrder};
use caga_core::operators::{
    crossover, mutate_best, regular_mutation, CrossoverKind, MutationVersion,
};
use caga_core::truss::{
    analyze, assess, benchmark_model, global_stiffness, penalty, reduced_stiffness,
    violation_factor, PenaltyConfig, TrussModel, TrussPenalty, FEASIBILITY_TOL,
};
use caga_core::{Cell, Evaluation, RunConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RUNS: usize = 60;
const TRUSS_RUNS: usize = 30;
const SEED: u64 = 1;

const PUBLISHED_TEN_BAR: [f64; 10] = [
    150.59, 137.91, 48.25, 194.64, 0.65, 98.75, 0.65, 137.24, 0.65, 3.54,
];
const PUBLISHED_SEVENTEEN_BAR: [f64; 17] = [
    67.32, 36.49, 0.65, 91.48, 0.67, 83.15, 0.65, 32.33, 50.65, 0.67, 24.83, 41.49, 0.65, 54.82,
    0.65, 28.16, 40.66,
];
const IN: f64 = 2.54;

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: &str, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("[{}] {id}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn suite(name: &str, config: &RunConfig, runs: usize) -> Suite {
    let problem = Problem::resolve(name).expect("known problem");
    run_suite(config, &problem, runs, SEED).expect("suite runs")
}

fn baseline(name: &str) -> Suite {
    suite(name, &baseline_config(name).unwrap(), RUNS)
}

fn with(name: &str, pairs: &[(&str, &str)]) -> RunConfig {
    let mut cfg = baseline_config(name).unwrap();
    let mut o = Overrides::default();
    for (k, v) in pairs {
        o.set(k, v).unwrap();
    }
    o.apply(&mut cfg).unwrap();
    cfg
}

fn criterion_1(r: &mut Report) {
    let t = Instant::now();
    let s = baseline("f1");
    let secs = t.elapsed().as_secs_f64();
    r.line(
        "1 f1 table reproduction",
        s.stats.mean >= 0.995 && secs < 60.0,
        format!("mean {:.6} (>= 0.995), {secs:.1} s (< 60 s)", s.stats.mean),
    );
}

fn criterion_2(r: &mut Report) {
    let s = baseline("f2");
    r.line(
        "2 f2 table reproduction",
        s.stats.mean <= 0.30,
        format!("mean {:.5} (<= 0.30), std {:.4}", s.stats.mean, s.stats.std),
    );
}

fn criterion_3(r: &mut Report) {
    for (name, limit) in [("f4", -6200.0), ("f6", 0.05), ("f7", 0.01), ("f3", 1.0)] {
        let s = baseline(name);
        r.line(
            &format!("3 {name} spot check"),
            s.stats.mean <= limit,
            format!("mean {:.5} (<= {limit})", s.stats.mean),
        );
    }
    let s = baseline("f10");
    r.line(
        "3 f10 below -550",
        s.stats.mean < -550.0,
        format!(
            "mean {:.2}, worst {:.2} (mean < -550)",
            s.stats.mean, s.stats.worst
        ),
    );
}

fn criterion_4(r: &mut Report) {
    let base = baseline("f1").stats.mean;
    let cfg = with(
        "f1",
        &[
            ("regular-period", "0"),
            ("best-period", "0"),
            ("hyper-period", "0"),
        ],
    );
    let off = suite("f1", &cfg, RUNS).stats.mean;
    r.line(
        "4a f1 without mutation degrades",
        base - off >= 0.02,
        format!("baseline {base:.5}, no mutation {off:.5} (drop >= 0.02)"),
    );
    let base = baseline("f2").stats.mean;
    let cfg = with("f2", &[("regular-period", "50")]);
    let rare = suite("f2", &cfg, RUNS).stats.mean;
    r.line(
        "4b f2 rare regular mutation degrades",
        rare > base,
        format!("period 1: {base:.5}, period 50: {rare:.5} (minimizing; expect larger)"),
    );
}

fn best_feasible(name: &str) -> (Option<(f64, f64)>, usize) {
    let cfg = baseline_config(name).unwrap();
    let s = suite(name, &cfg, TRUSS_RUNS);
    let model = benchmark_model(name).unwrap();
    let penalty = TrussPenalty::default();
    let mut best: Option<(f64, f64)> = None;
    for res in &s.results {
        if let Some(sol) = &res.best_feasible {
            let a = assess(&model, &sol.design, &penalty, 1.0).unwrap();
            let w = a.analysis.weight;
            if a.true_violation <= FEASIBILITY_TOL && best.is_none_or(|(bw, _)| w < bw) {
                best = Some((w, a.true_violation));
            }
        }
    }
    (best, s.stats.missing())
}

fn max_ratio(model: &TrussModel, areas: &[f64]) -> f64 {
    let a = analyze(model, areas).unwrap();
    let d = model
        .free_dofs()
        .iter()
        .map(|&i| a.displacements[i].abs() / model.displacement_limit)
        .fold(0.0, f64::max);
    let s = a.max_abs_stress() / model.stress_limit;
    d.max(s)
}

fn criterion_5(r: &mut Report) {
    let (best, missing) = best_feasible("ten_bar");
    let ok = best.is_some_and(|(w, _)| w <= 23.2);
    let detail = match best {
        Some((w, v)) => format!(
            "best feasible {w:.3} kN (<= 23.2), violation {v:.1e}, {missing} runs without feasible"
        ),
        None => "no feasible design".into(),
    };
    r.line("5 ten-bar GA", ok, detail);

    let model = benchmark_model("ten_bar").unwrap();
    let w = model.weight(&PUBLISHED_TEN_BAR);
    let ratio = max_ratio(&model, &PUBLISHED_TEN_BAR);
    r.line(
        "5 ten-bar published design",
        (w - 22.51).abs() / 22.51 <= 0.005 && ratio <= 1.0 + 1e-3,
        format!("weight {w:.3} kN (22.51 +- 0.5%), max constraint ratio {ratio:.5} (<= 1.001)"),
    );
}

fn criterion_6(r: &mut Report) {
    let (best, missing) = best_feasible("seventeen_bar");
    let ok = best.is_some_and(|(w, _)| w <= 11.8);
    let detail = match best {
        Some((w, v)) => format!(
            "best feasible {w:.3} kN (<= 11.8), violation {v:.1e}, {missing} runs without feasible"
        ),
        None => "no feasible design".into(),
    };
    r.line("6 seventeen-bar GA", ok, detail);

    let model = benchmark_model("seventeen_bar").unwrap();
    let w = model.weight(&PUBLISHED_SEVENTEEN_BAR);
    let a = analyze(&model, &PUBLISHED_SEVENTEEN_BAR).unwrap();
    let tip = a.vertical(model.node(5).unwrap()).abs() / IN;
    r.line(
        "6 seventeen-bar published design",
        (w - 11.43).abs() / 11.43 <= 0.01 && (tip - 2.0024).abs() / 2.0024 <= 0.005,
        format!("weight {w:.3} kN (11.43 +- 1%), node 5 deflection {tip:.4} in (2.0024 +- 0.5%)"),
    );
}

fn expected_case(c: f64, l: f64, r: f64) -> RuleCase {
    if c == l && c == r {
        return RuleCase::AllEqual;
    }
    match (l > c, r > c) {
        (false, false) => RuleCase::Survive,
        (false, true) => RuleCase::CrossWithRight,
        (true, false) => RuleCase::CrossWithLeft,
        (true, true) => RuleCase::CrossLeftRight,
    }
}

fn lattice_properties(rng: &mut ChaCha8Rng) -> bool {
    let layout = Arc::new(Layout::from_lengths(&[3, 4, 2]));
    for _ in 0..1000 {
        let n = rng.random_range(2..10);
        let cells: Vec<Cell> = (0..n)
            .map(|_| {
                let f = rng.random_range(-2..3) as f64;
                Cell::new(random_genome(&layout, rng), Evaluation::maximize(f))
            })
            .collect();
        for i in 1..n - 1 {
            let (c, l, r) = (
                cells[i].fitness(),
                cells[i - 1].fitness(),
                cells[i + 1].fitness(),
            );
            if classify(c, l, r).ok() != Some(expected_case(c, l, r)) {
                return false;
            }
        }
        let seed = rng.random();
        let a = sweep_with_order(
            &cells,
            CrossoverKind::TwoPoint,
            &mut ChaCha8Rng::seed_from_u64(seed),
            SweepOrder::LeftToRight,
        );
        let b = sweep_with_order(
            &cells,
            CrossoverKind::TwoPoint,
            &mut ChaCha8Rng::seed_from_u64(seed),
            SweepOrder::RightToLeft,
        );
        if a.unwrap() != b.unwrap() {
            return false;
        }
    }
    true
}

fn genome_properties(rng: &mut ChaCha8Rng) -> bool {
    for _ in 0..10_000 {
        let step = [1.0, 0.1, 0.01, 0.001][rng.random_range(0..4)];
        let grid: u64 = rng.random_range(1..100_000);
        let spec = VariableSpec::new(-5.0, -5.0 + grid as f64 * step, step).unwrap();
        let k = rng.random_range(0..=grid);
        let v = if k == grid {
            spec.upper
        } else {
            spec.lower + k as f64 * step
        };
        let g = encode(&[v], &[spec]).unwrap();
        let back = decode(&g, &[spec]).unwrap()[0];
        if (back - v).abs() > 1e-9 {
            return false;
        }
        let width = grid.to_string().len();
        let digits: Vec<u8> = (0..width).map(|_| rng.random_range(0..10)).collect();
        let idx = digits.iter().fold(0u64, |a, &d| a * 10 + d as u64);
        let g = Genome::from_digits(digits, Arc::new(Layout::from_lengths(&[width]))).unwrap();
        let x = decode(&g, &[spec]).unwrap()[0];
        if x > spec.upper || (idx >= grid && x != spec.upper) {
            return false;
        }
    }
    true
}

fn operator_properties(rng: &mut ChaCha8Rng) -> bool {
    let layout = Arc::new(Layout::from_lengths(&[5, 5, 1, 4]));
    for i in 0..10_000 {
        let mut cells: Vec<Cell> = (0..5)
            .map(|_| {
                Cell::new(
                    random_genome(&layout, rng),
                    Evaluation::maximize(rng.random()),
                )
            })
            .collect();
        let version = if i % 2 == 0 {
            MutationVersion::Ordinary
        } else {
            MutationVersion::Gaussian
        };
        match i % 3 {
            0 => {
                let kind = [
                    CrossoverKind::OnePoint,
                    CrossoverKind::TwoPoint,
                    CrossoverKind::VariableToVariable,
                ][i % 9 / 3];
                cells[0].genome = crossover(&cells[1].genome, &cells[2].genome, kind, rng).unwrap();
            }
            1 => regular_mutation(&mut cells, 2, version, rng),
            _ => mutate_best(&mut cells, version, rng),
        }
        if !cells
            .iter()
            .all(|c| c.genome.len() == 15 && c.genome.digits().iter().all(|&d| d <= 9))
        {
            return false;
        }
    }
    true
}

fn stiffness_properties(rng: &mut ChaCha8Rng) -> bool {
    let model = benchmark_model("ten_bar").unwrap();
    for _ in 0..200 {
        let areas: Vec<f64> = (0..10).map(|_| rng.random_range(0.65..222.0)).collect();
        let k = global_stiffness(&model, &areas);
        if (&k - k.transpose()).amax() > 1e-12 * k.amax() {
            return false;
        }
        let (kr, _) = reduced_stiffness(&model, &areas);
        if kr.symmetric_eigen().eigenvalues.iter().any(|&l| l <= 0.0) {
            return false;
        }
    }
    // single bar: E 200 GPa, L 300 cm, A 10 cm^2, P 50 kN
    let bar = TrussModel::from_toml(
        r#"
        name = "bar"
        youngs_modulus_gpa = 200.0
        density_kn_per_m3 = 1.0
        displacement_limit_cm = 1.0
        stress_limit_mpa = 1.0
        area_min_cm2 = 1.0
        area_max_cm2 = 100.0
        area_step_cm2 = 0.01
        nodes = [
          { id = 1, x = 0.0, y = 0.0, fix_x = true, fix_y = true },
          { id = 2, x = 300.0, y = 0.0, fix_y = true },
        ]
        members = [{ id = 1, nodes = [1, 2] }]
        loads = [{ node = 2, fx = 50.0 }]
        "#,
    )
    .unwrap();
    let expected = 50.0 * 300.0 / (20_000.0 * 10.0);
    let tip = analyze(&bar, &[10.0]).unwrap().displacements[2];
    (tip - expected).abs() <= 1e-10 * expected
}

fn penalty_properties() -> bool {
    let cfg = PenaltyConfig::default();
    let eps = 1e-9;
    let close =
        |v: f64, f: f64, p: f64| (penalty(v, &cfg, f) - p * v * v).abs() <= 1e-12 * p * v * v;
    let (e, l) = (cfg.early, cfg.late);
    close(e.v1 - eps, 0.0, e.p1)
        && close(e.v1 + eps, 0.0, e.p2)
        && close(e.v2 - eps, 0.0, e.p2)
        && close(e.v2 + eps, 0.0, e.p3)
        && close(l.v1 - eps, 0.9, l.p1)
        && close(l.v1 + eps, 0.9, l.p2)
        && close(l.v2 - eps, 0.9, l.p2)
        && close(l.v2 + eps, 0.9, l.p3)
        && violation_factor(&[1.0, -2.0, 0.5], &[1.0, 2.0, 1.0]) == 0.0
        && penalty(0.0, &cfg, 0.9) == 0.0
}

fn rule_properties(rng: &mut ChaCha8Rng) -> bool {
    let rule = demo_rule();
    if rule.wolfram_code() != 165 {
        return false;
    }
    let plain = |row: &[u8]| {
        evolve(&rule, row, 30, 0.0, &mut ChaCha8Rng::seed_from_u64(0))
            .unwrap()
            .rows()
            .to_vec()
    };
    for _ in 0..100 {
        let a = random_row(64, rng);
        let b = random_row(64, rng);
        let ab: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let (ea, eb, e0, eab) = (plain(&a), plain(&b), plain(&[0; 64]), plain(&ab));
        for t in 0..ea.len() {
            if (0..64).any(|i| eab[t][i] != ea[t][i] ^ eb[t][i] ^ e0[t][i]) {
                return false;
            }
        }
    }
    true
}

fn csv_determinism() -> bool {
    let once = || {
        let mut cfg = baseline_config("f5").unwrap();
        cfg.evaluations = 1000;
        let p = Problem::resolve("f5").unwrap();
        let s = run_suite(&cfg, &p, 8, 7).unwrap();
        let mut out = Vec::new();
        write_history(&s.results, &mut out).unwrap();
        out
    };
    once() == once()
}

fn criterion_7(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let checks = [
        (
            "lattice case partition and sweep order",
            lattice_properties(&mut rng),
        ),
        (
            "genome round trip and saturation",
            genome_properties(&mut rng),
        ),
        ("operator alphabet closure", operator_properties(&mut rng)),
        (
            "stiffness symmetry, definiteness, single bar",
            stiffness_properties(&mut rng),
        ),
        (
            "penalty branches and zero at feasibility",
            penalty_properties(),
        ),
        ("rule table is 165 and affine", rule_properties(&mut rng)),
        ("byte-identical CSV for identical suites", csv_determinism()),
    ];
    for (name, ok) in checks {
        r.line(
            &format!("7 {name}"),
            ok,
            if ok {
                "holds".into()
            } else {
                "violated".into()
            },
        );
    }
}

fn main() -> ExitCode {
    let mut report = Report { failed: 0 };
    criterion_1(&mut report);
    criterion_2(&mut report);
    criterion_3(&mut report);
    criterion_4(&mut report);
    criterion_5(&mut report);
    criterion_6(&mut report);
    criterion_7(&mut report);
    let strict = std::env::args().any(|a| a == "--strict");
    if report.failed == 0 {
        println!("all acceptance criteria met");
        ExitCode::SUCCESS
    } else {
        println!("{} acceptance checks failed", report.failed);
        if strict {
            ExitCode::FAILURE
        } else {
            ExitCode::SUCCESS
        }
    }
}
