//! Experiment harness: baseline settings, multi-run suites, statistics,
//! history export and parameter sweeps.

use std::io::Write;
use std::ops::RangeInclusive;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::{Overflow, VariableSpec};
use crate::lattice::{run, CrossoverPlan, Reinitialization, RunConfig, RunResult};
use crate::objectives::{Evaluation, Objective, Progress, Sense, TestFunction};
use crate::operators::{
    Archive, CrossoverKind, MutationConfig, MutationCount, MutationVersion, VersionSwitch,
};
use crate::truss::{resolve_model, TrussPenalty, TrussProblem};

/// A test function or a truss, selected by name.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Problem {
    Function(TestFunction),
    Truss(TrussProblem),
}

impl Problem {
    /// `"f1"`..`"f10"`, a benchmark truss name, or a truss file path.
    pub fn resolve(name: &str) -> Result<Self> {
        let looks_like_function = name.len() > 1
            && name.starts_with('f')
            && name[1..].bytes().all(|b| b.is_ascii_digit());
        match TestFunction::from_name(name) {
            Ok(f) => Ok(Problem::Function(f)),
            Err(e) if looks_like_function => Err(e),
            Err(_) => Ok(Problem::Truss(TrussProblem::new(
                resolve_model(name)?,
                TrussPenalty::default(),
            )?)),
        }
    }

    /// The number reported for a finished run: the best raw objective for
    /// test functions, the weight of the best feasible design for trusses.
    pub fn final_value(&self, result: &RunResult) -> Option<f64> {
        match self {
            Problem::Function(_) => Some(result.best.raw),
            Problem::Truss(t) => result
                .best_feasible
                .as_ref()
                .map(|s| t.model.weight(&s.design)),
        }
    }
}

impl Objective for Problem {
    fn variables(&self) -> &[VariableSpec] {
        match self {
            Problem::Function(f) => f.variables(),
            Problem::Truss(t) => t.variables(),
        }
    }

    fn sense(&self) -> Sense {
        match self {
            Problem::Function(f) => f.sense(),
            Problem::Truss(t) => t.sense(),
        }
    }

    fn evaluate(&self, x: &[f64], progress: Progress) -> Result<Evaluation> {
        match self {
            Problem::Function(f) => f.evaluate(x, progress),
            Problem::Truss(t) => t.evaluate(x, progress),
        }
    }

    fn name(&self) -> String {
        match self {
            Problem::Function(f) => f.name(),
            Problem::Truss(t) => t.name(),
        }
    }
}

fn every_third_after(start_fraction: f64) -> Option<Reinitialization> {
    Some(Reinitialization {
        period: 3,
        start_fraction,
    })
}

fn function_baseline(id: u8) -> Result<RunConfig> {
    let mut config = RunConfig {
        population: 5,
        evaluations: 20_000,
        crossover: CrossoverPlan::fixed(CrossoverKind::VariableToVariable),
        mutation: MutationConfig {
            regular_period: Some(1),
            regular_count: MutationCount::Fixed(1),
            regular_version: MutationVersion::Gaussian,
            best_period: Some(2),
            best_version: MutationVersion::Gaussian,
            hyper_period: None,
            switch: None,
        },
        reinit: every_third_after(0.25),
        archive_capacity: Archive::DEFAULT_CAPACITY,
        overflow: Overflow::Saturate,
    };
    match id {
        1 => config.evaluations = 10_000,
        2 => {
            config.evaluations = 10_000;
            config.crossover = CrossoverPlan::fixed(CrossoverKind::OnePoint);
            config.mutation.regular_count = MutationCount::Fixed(5);
            config.mutation.regular_version = MutationVersion::Ordinary;
            config.mutation.best_period = Some(10);
            config.mutation.best_version = MutationVersion::Ordinary;
            config.reinit = every_third_after(0.75);
        }
        3..=7 => {}
        8..=10 => {
            config.evaluations = 5_000;
            config.reinit = every_third_after(0.5);
        }
        _ => {
            return Err(Error::Unknown {
                kind: "test function",
                name: format!("f{id}"),
            })
        }
    }
    Ok(config)
}

fn truss_baseline(generations: usize) -> RunConfig {
    let population = 5;
    RunConfig {
        population,
        evaluations: generations * population,
        crossover: CrossoverPlan {
            kind: CrossoverKind::OnePoint,
            switch: Some((1.0 / 3.0, CrossoverKind::VariableToVariable)),
        },
        mutation: MutationConfig {
            regular_period: Some(1),
            regular_count: MutationCount::Fixed(1),
            regular_version: MutationVersion::Ordinary,
            best_period: Some(5),
            best_version: MutationVersion::Ordinary,
            hyper_period: Some(10),
            switch: Some(VersionSwitch {
                at_fraction: 1.0 / 3.0,
                regular: MutationVersion::Gaussian,
                best: MutationVersion::Gaussian,
            }),
        },
        reinit: every_third_after(0.25),
        archive_capacity: Archive::DEFAULT_CAPACITY,
        overflow: Overflow::Saturate,
    }
}

/// Published settings for `f1`..`f10`, `ten_bar` and `seventeen_bar`. Other
/// truss models get the ten-bar settings.
pub fn baseline_config(name: &str) -> Result<RunConfig> {
    if let Ok(f) = TestFunction::from_name(name) {
        return function_baseline(f.id());
    }
    match name {
        "seventeen_bar" | "seventeen-bar" | "17" => Ok(truss_baseline(2500)),
        "ten_bar" | "ten-bar" | "10" => Ok(truss_baseline(2100)),
        other if Path::new(other).exists() => Ok(truss_baseline(2100)),
        other => Err(Error::Unknown {
            kind: "objective",
            name: other.to_string(),
        }),
    }
}

/// Summary of the final values of a set of runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteStats {
    pub sense: Sense,
    /// One entry per run in seed order; `None` when a run found no feasible
    /// design.
    pub values: Vec<Option<f64>>,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub best: f64,
    pub worst: f64,
}

impl SuiteStats {
    pub fn new(sense: Sense, values: Vec<Option<f64>>) -> Result<Self> {
        let present: Vec<f64> = values.iter().flatten().copied().collect();
        if present.is_empty() {
            return Err(Error::Evaluation(
                "no run produced a reportable value".into(),
            ));
        }
        let n = present.len() as f64;
        let mean = present.iter().sum::<f64>() / n;
        let var = present.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let better = |a: f64, b: f64| if sense.at_least_as_good(a, b) { a } else { b };
        let worse = |a: f64, b: f64| if sense.at_least_as_good(a, b) { b } else { a };
        let best = present.iter().copied().reduce(better).expect("non-empty");
        let worst = present.iter().copied().reduce(worse).expect("non-empty");
        Ok(SuiteStats {
            sense,
            values,
            mean,
            std: var.sqrt(),
            best,
            worst,
        })
    }

    pub fn runs(&self) -> usize {
        self.values.len()
    }

    pub fn missing(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }
}

/// All runs of a suite plus their summary.
#[derive(Debug, Clone)]
pub struct Suite {
    pub results: Vec<RunResult>,
    pub stats: SuiteStats,
}

/// Runs with seeds `base_seed..base_seed + runs`, in seed order. Uses all
/// cores when built with the `parallel` feature.
pub fn run_suite(
    config: &RunConfig,
    problem: &Problem,
    runs: usize,
    base_seed: u64,
) -> Result<Suite> {
    if runs == 0 {
        return Err(Error::Config("at least one run is required".into()));
    }
    config.validate()?;
    let seeds: Vec<u64> = (0..runs as u64)
        .map(|i| base_seed.wrapping_add(i))
        .collect();
    let results = run_seeds(config, problem, &seeds)?;
    let values = results.iter().map(|r| problem.final_value(r)).collect();
    let stats = SuiteStats::new(problem.sense(), values)?;
    Ok(Suite { results, stats })
}

#[cfg(feature = "parallel")]
fn run_seeds(config: &RunConfig, problem: &Problem, seeds: &[u64]) -> Result<Vec<RunResult>> {
    use rayon::prelude::*;
    seeds.par_iter().map(|&s| run(config, problem, s)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_seeds(config: &RunConfig, problem: &Problem, seeds: &[u64]) -> Result<Vec<RunResult>> {
    seeds.iter().map(|&s| run(config, problem, s)).collect()
}

/// CSV with header `generation,run_id,best_so_far_raw`, rows ordered by run
/// then generation. `run_id` is the position in `results`.
pub fn write_history<W: Write>(results: &[RunResult], mut out: W) -> std::io::Result<()> {
    writeln!(out, "generation,run_id,best_so_far_raw")?;
    for (run_id, r) in results.iter().enumerate() {
        for (generation, raw) in r.raw_history().enumerate() {
            writeln!(out, "{generation},{run_id},{raw}")?;
        }
    }
    out.flush()
}

pub fn export_history(results: &[RunResult], path: &Path) -> Result<()> {
    let io = |e| Error::io(path, e);
    let file = std::fs::File::create(path).map_err(io)?;
    write_history(results, std::io::BufWriter::new(file)).map_err(io)
}

/// Optional changes to a [`RunConfig`], read from a flat TOML file or set key
/// by key. Periods of 0 disable the operator.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Overrides {
    pub population: Option<usize>,
    pub evaluations: Option<usize>,
    /// Generations; sets `evaluations` to `generations * population`.
    pub generations: Option<usize>,
    pub crossover: Option<CrossoverKind>,
    pub crossover_switch_at: Option<f64>,
    pub late_crossover: Option<CrossoverKind>,
    pub regular_period: Option<usize>,
    pub regular_count: Option<usize>,
    pub regular_version: Option<MutationVersion>,
    pub best_period: Option<usize>,
    pub best_version: Option<MutationVersion>,
    pub hyper_period: Option<usize>,
    pub version_switch_at: Option<f64>,
    pub late_regular_version: Option<MutationVersion>,
    pub late_best_version: Option<MutationVersion>,
    pub reinit_period: Option<usize>,
    pub reinit_start: Option<f64>,
    pub archive_capacity: Option<usize>,
    pub overflow: Option<Overflow>,
    /// Fraction of the run at which truss penalties switch to the late set.
    pub penalty_switch_at: Option<f64>,
}

/// Keys accepted by [`Overrides::set`], as written in config files.
pub const OVERRIDE_KEYS: [&str; 20] = [
    "population",
    "evaluations",
    "generations",
    "crossover",
    "crossover-switch-at",
    "late-crossover",
    "regular-period",
    "regular-count",
    "regular-version",
    "best-period",
    "best-version",
    "hyper-period",
    "version-switch-at",
    "late-regular-version",
    "late-best-version",
    "reinit-period",
    "reinit-start",
    "archive-capacity",
    "overflow",
    "penalty-switch-at",
];

fn period(p: usize) -> Option<usize> {
    (p > 0).then_some(p)
}

impl Overrides {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Overrides::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Set one key from its textual value, e.g. `("best-period", "4")`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !OVERRIDE_KEYS.contains(&key) {
            return Err(Error::Unknown {
                kind: "config key",
                name: key.to_string(),
            });
        }
        let parsed = Overrides::from_toml(&format!("{key} = {value}"))
            .or_else(|_| Overrides::from_toml(&format!("{key} = \"{value}\"")))?;
        self.merge(&parsed);
        Ok(())
    }

    /// Copy every field that is set in `other`.
    pub fn merge(&mut self, other: &Overrides) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            population,
            evaluations,
            generations,
            crossover,
            crossover_switch_at,
            late_crossover,
            regular_period,
            regular_count,
            regular_version,
            best_period,
            best_version,
            hyper_period,
            version_switch_at,
            late_regular_version,
            late_best_version,
            reinit_period,
            reinit_start,
            archive_capacity,
            overflow,
            penalty_switch_at
        );
    }

    pub fn apply(&self, config: &mut RunConfig) -> Result<()> {
        if let Some(p) = self.population {
            config.population = p;
        }
        if let Some(e) = self.evaluations {
            config.evaluations = e;
        }
        if let Some(g) = self.generations {
            if self.evaluations.is_some() {
                return Err(Error::Config(
                    "set either evaluations or generations, not both".into(),
                ));
            }
            config.evaluations = g * config.population;
        }
        if let Some(k) = self.crossover {
            config.crossover.kind = k;
        }
        match (
            self.crossover_switch_at,
            self.late_crossover,
            config.crossover.switch,
        ) {
            (Some(at), Some(late), _) => config.crossover.switch = Some((at, late)),
            (Some(at), None, Some((_, late))) => config.crossover.switch = Some((at, late)),
            (None, Some(late), Some((at, _))) => config.crossover.switch = Some((at, late)),
            (None, None, _) => {}
            _ => {
                return Err(Error::Config(
                    "crossover switch needs both crossover-switch-at and late-crossover".into(),
                ))
            }
        }

        let m = &mut config.mutation;
        if let Some(p) = self.regular_period {
            m.regular_period = period(p);
        }
        if let Some(c) = self.regular_count {
            m.regular_count = MutationCount::Fixed(c);
        }
        if let Some(v) = self.regular_version {
            m.regular_version = v;
        }
        if let Some(p) = self.best_period {
            m.best_period = period(p);
        }
        if let Some(v) = self.best_version {
            m.best_version = v;
        }
        if let Some(p) = self.hyper_period {
            m.hyper_period = period(p);
        }
        if self.version_switch_at.is_some()
            || self.late_regular_version.is_some()
            || self.late_best_version.is_some()
        {
            let base = m.switch.unwrap_or(VersionSwitch {
                at_fraction: f64::NAN,
                regular: m.regular_version,
                best: m.best_version,
            });
            let sw = VersionSwitch {
                at_fraction: self.version_switch_at.unwrap_or(base.at_fraction),
                regular: self.late_regular_version.unwrap_or(base.regular),
                best: self.late_best_version.unwrap_or(base.best),
            };
            if sw.at_fraction.is_nan() {
                return Err(Error::Config(
                    "mutation switch needs version-switch-at".into(),
                ));
            }
            m.switch = Some(sw);
        }

        match (self.reinit_period, self.reinit_start) {
            (Some(0), _) => config.reinit = None,
            (p, s) if p.is_some() || s.is_some() => {
                let base = config.reinit.unwrap_or(Reinitialization {
                    period: 3,
                    start_fraction: 0.25,
                });
                config.reinit = Some(Reinitialization {
                    period: p.unwrap_or(base.period),
                    start_fraction: s.unwrap_or(base.start_fraction),
                });
            }
            _ => {}
        }
        if let Some(a) = self.archive_capacity {
            config.archive_capacity = a;
        }
        if let Some(o) = self.overflow {
            config.overflow = o;
        }
        config.validate()
    }

    pub fn apply_penalty(&self, penalty: &mut TrussPenalty) -> Result<()> {
        if let Some(at) = self.penalty_switch_at {
            penalty.displacement.switch_fraction = at;
            penalty.stress.switch_fraction = at;
        }
        penalty.validate()
    }
}

/// One parameter varied over a list of values, e.g. `best-period=1..20` or
/// `reinit-start=0.1,0.25,0.5`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub key: String,
    pub values: Vec<String>,
}

impl std::str::FromStr for SweepSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("expected key=a..b or key=v1,v2,..., got {s:?}"));
        let (key, rhs) = s.split_once('=').ok_or_else(bad)?;
        let key = key.trim().to_string();
        if !OVERRIDE_KEYS.contains(&key.as_str()) {
            return Err(Error::Unknown {
                kind: "config key",
                name: key,
            });
        }
        let values = if let Some((a, b)) = rhs.split_once("..") {
            let range: RangeInclusive<usize> =
                a.trim().parse().map_err(|_| bad())?..=b.trim().parse().map_err(|_| bad())?;
            if range.is_empty() {
                return Err(bad());
            }
            range.map(|v| v.to_string()).collect()
        } else {
            rhs.split(',')
                .map(|v| v.trim().to_string())
                .collect::<Vec<_>>()
        };
        if values.iter().any(|v| v.is_empty()) {
            return Err(bad());
        }
        Ok(SweepSpec { key, values })
    }
}

/// Result of one sweep point.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: String,
    pub stats: SuiteStats,
}

/// Run a suite for every value of `spec`, everything else taken from `base`.
pub fn sweep(
    base: &RunConfig,
    problem: &Problem,
    spec: &SweepSpec,
    runs: usize,
    base_seed: u64,
) -> Result<Vec<SweepPoint>> {
    spec.values
        .iter()
        .map(|value| {
            let mut o = Overrides::default();
            o.set(&spec.key, value)?;
            let mut config = base.clone();
            o.apply(&mut config)?;
            let mut problem = problem.clone();
            if let Problem::Truss(t) = &mut problem {
                o.apply_penalty(&mut t.penalty)?;
            }
            let suite = run_suite(&config, &problem, runs, base_seed)?;
            Ok(SweepPoint {
                value: value.clone(),
                stats: suite.stats,
            })
        })
        .collect()
}
