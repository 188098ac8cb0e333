//! Plain-text tables and the JSON summary.

use std::fmt::Write as _;

use caga_core::bench::{Problem, Suite, SuiteStats, SweepPoint};
use caga_core::lattice::RunConfig;
use caga_core::truss::{Assessment, TrussModel};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Summary {
    pub problem: String,
    pub runs: usize,
    pub seed: u64,
    pub config: RunConfig,
    pub stats: SuiteStats,
    pub best_design: Option<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct SweepSummary<'a> {
    pub problem: &'a str,
    pub key: &'a str,
    pub runs: usize,
    pub seed: u64,
    pub base_config: &'a RunConfig,
    pub points: Vec<SweepRow<'a>>,
}

#[derive(Debug, Serialize)]
pub struct SweepRow<'a> {
    pub value: &'a str,
    pub stats: &'a SuiteStats,
}

pub fn sweep_summary<'a>(
    problem: &'a str,
    key: &'a str,
    runs: usize,
    seed: u64,
    base_config: &'a RunConfig,
    points: &'a [SweepPoint],
) -> SweepSummary<'a> {
    SweepSummary {
        problem,
        key,
        runs,
        seed,
        base_config,
        points: points
            .iter()
            .map(|p| SweepRow {
                value: &p.value,
                stats: &p.stats,
            })
            .collect(),
    }
}

/// Design reported for the suite: the best final value over all runs.
pub fn best_design(problem: &Problem, suite: &Suite) -> Option<Vec<f64>> {
    let sense = suite.stats.sense;
    let mut best: Option<(f64, &Vec<f64>)> = None;
    for r in &suite.results {
        let Some(value) = problem.final_value(r) else {
            continue;
        };
        let design = match problem {
            Problem::Function(_) => &r.best.design,
            Problem::Truss(_) => &r.best_feasible.as_ref()?.design,
        };
        if best.is_none_or(|(b, _)| sense.at_least_as_good(value, b) && value != b) {
            best = Some((value, design));
        }
    }
    best.map(|(_, d)| d.clone())
}

pub fn config_text(name: &str, runs: usize, seed: u64, c: &RunConfig) -> String {
    let m = &c.mutation;
    let period = |p: Option<usize>| p.map_or("off".to_string(), |p| format!("every {p}"));
    let mut s = String::new();
    let _ = writeln!(s, "problem      {name}");
    let _ = writeln!(
        s,
        "runs         {runs} (seeds {seed}..{})",
        seed + runs as u64 - 1
    );
    let _ = writeln!(
        s,
        "lattice      {} cells, {} evaluations, {} generations",
        c.population,
        c.evaluations,
        c.generations()
    );
    let mut cross = c.crossover.kind.to_string();
    if let Some((at, late)) = c.crossover.switch {
        let _ = write!(cross, " -> {late} at {at:.3}");
    }
    let _ = writeln!(s, "crossover    {cross}");
    let _ = writeln!(
        s,
        "mutation     regular {} {}, best {} {}, hyper {}",
        m.regular_version,
        period(m.regular_period),
        m.best_version,
        period(m.best_period),
        period(m.hyper_period)
    );
    let reinit = c.reinit.map_or("off".to_string(), |r| {
        format!("every {} after {:.2}", r.period, r.start_fraction)
    });
    let _ = writeln!(s, "reinit       {reinit}");
    let _ = writeln!(s, "overflow     {}", c.overflow);
    s
}

pub fn stats_text(stats: &SuiteStats) -> String {
    let mut s = String::new();
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:>16} {:>16} {:>16} {:>16}",
        "mean", "std", "best", "worst"
    );
    let _ = writeln!(
        s,
        "{:>16.6} {:>16.6} {:>16.6} {:>16.6}",
        stats.mean, stats.std, stats.best, stats.worst
    );
    if stats.missing() > 0 {
        let _ = writeln!(
            s,
            "{} of {} runs found no feasible design",
            stats.missing(),
            stats.runs()
        );
    }
    s
}

pub fn truss_text(model: &TrussModel, areas: &[f64], a: &Assessment) -> String {
    let mut s = String::new();
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "best feasible design, weight {:.4} kN",
        a.analysis.weight
    );
    let _ = writeln!(
        s,
        "{:>8} {:>12} {:>14} {:>8}",
        "member", "area cm2", "stress MPa", "ratio"
    );
    for (m, (&area, &stress)) in model
        .members
        .iter()
        .zip(areas.iter().zip(&a.analysis.stresses))
    {
        let _ = writeln!(
            s,
            "{:>8} {:>12.2} {:>14.2} {:>8.4}",
            m.id,
            area,
            stress * 10.0,
            stress.abs() / model.stress_limit
        );
    }
    let worst = model.free_dofs().into_iter().max_by(|&i, &j| {
        a.analysis.displacements[i]
            .abs()
            .total_cmp(&a.analysis.displacements[j].abs())
    });
    if let Some(dof) = worst {
        let d = a.analysis.displacements[dof];
        let _ = writeln!(
            s,
            "largest displacement {:.4} cm at node {} {} (ratio {:.5})",
            d,
            model.node_ids[dof / 2],
            if dof % 2 == 0 { "x" } else { "y" },
            d.abs() / model.displacement_limit
        );
    }
    let _ = writeln!(s, "true violation factor {:.2e}", a.true_violation);
    s
}

pub fn sweep_text(key: &str, points: &[SweepPoint]) -> String {
    let w = key.len().max(8);
    let mut s = String::new();
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{key:>w$} {:>16} {:>16} {:>16} {:>16}",
        "mean", "std", "best", "worst"
    );
    for p in points {
        let st = &p.stats;
        let _ = writeln!(
            s,
            "{:>w$} {:>16.6} {:>16.6} {:>16.6} {:>16.6}",
            p.value, st.mean, st.std, st.best, st.worst
        );
    }
    s
}

pub fn sweep_csv(key: &str, points: &[SweepPoint]) -> String {
    let mut s = format!("{key},mean,std,best,worst,missing\n");
    for p in points {
        let st = &p.stats;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            p.value,
            st.mean,
            st.std,
            st.best,
            st.worst,
            st.missing()
        );
    }
    s
}
