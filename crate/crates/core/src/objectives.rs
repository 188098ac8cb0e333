//! The objective interface the engine optimizes, and the ten benchmark
//! functions with their bounds, resolutions and senses.

use std::f64::consts::{E, LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::VariableSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Max,
    Min,
}

impl Sense {
    pub fn fitness(self, raw: f64) -> f64 {
        match self {
            Sense::Max => raw,
            Sense::Min => -raw,
        }
    }

    pub fn raw(self, fitness: f64) -> f64 {
        self.fitness(fitness)
    }

    /// True if `a` is at least as good as `b` in raw units.
    pub fn at_least_as_good(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Max => a >= b,
            Sense::Min => a <= b,
        }
    }
}

/// One objective evaluation. The engine always maximizes `fitness`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub raw: f64,
    pub fitness: f64,
    /// False when a constrained objective's true limits are violated.
    pub feasible: bool,
}

impl Evaluation {
    pub fn new(raw: f64, sense: Sense) -> Self {
        Evaluation {
            raw,
            fitness: sense.fitness(raw),
            feasible: true,
        }
    }

    pub fn maximize(raw: f64) -> Self {
        Evaluation::new(raw, Sense::Max)
    }
}

/// Where a run is when an evaluation happens; constrained objectives use it to
/// pick penalty parameters and constraint tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Progress {
    pub generation: usize,
    pub total_generations: usize,
}

impl Progress {
    pub fn fraction(&self) -> f64 {
        if self.total_generations == 0 {
            0.0
        } else {
            self.generation as f64 / self.total_generations as f64
        }
    }
}

pub trait Objective: Send + Sync {
    fn variables(&self) -> &[VariableSpec];

    fn sense(&self) -> Sense;

    fn evaluate(&self, x: &[f64], progress: Progress) -> Result<Evaluation>;

    fn name(&self) -> String;
}

/// One row of the benchmark table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub id: u8,
    pub dimension: usize,
    pub variable: VariableSpec,
    pub sense: Sense,
}

impl ObjectiveSpec {
    pub fn variables(&self) -> Vec<VariableSpec> {
        vec![self.variable; self.dimension]
    }
}

/// `(dimension, lower, upper, resolution, sense)` for f1..f10.
const TABLE: [(usize, f64, f64, f64, Sense); 10] = [
    (5, 0.0, 1.0, 0.0001, Sense::Max),
    (3, -5.0, 5.0, 0.00001, Sense::Min),
    (15, -100.0, 100.0, 0.0002, Sense::Min),
    (15, -500.0, 500.0, 1.0, Sense::Min),
    (15, -500.0, 500.0, 0.1, Sense::Min),
    (15, -5.0, 5.0, 0.001, Sense::Min),
    (15, -50.0, 50.0, 0.001, Sense::Min),
    (4, 0.0, 100.0, 0.0001, Sense::Max),
    (15, 0.0, 10.0, 0.0001, Sense::Max),
    (15, -5.0, 5.0, 0.0001, Sense::Min),
];

pub fn spec(id: u8) -> Result<ObjectiveSpec> {
    let (dimension, lower, upper, step, sense) = *TABLE
        .get((id as usize).wrapping_sub(1))
        .ok_or_else(|| Error::Unknown {
            kind: "test function",
            name: format!("f{id}"),
        })?;
    Ok(ObjectiveSpec {
        id,
        dimension,
        variable: VariableSpec { lower, upper, step },
        sense,
    })
}

/// Raw value of test function `id` at `x`.
pub fn evaluate(id: u8, x: &[f64]) -> Result<Evaluation> {
    let spec = spec(id)?;
    if x.len() != spec.dimension {
        return Err(Error::Layout(format!(
            "f{id} takes {} variables, got {}",
            spec.dimension,
            x.len()
        )));
    }
    let raw = raw_value(id, x);
    if !raw.is_finite() {
        return Err(Error::Evaluation(format!("f{id} is not finite at {x:?}")));
    }
    Ok(Evaluation::new(raw, spec.sense))
}

fn raw_value(id: u8, x: &[f64]) -> f64 {
    let n = x.len() as f64;
    match id {
        1 => x
            .iter()
            .map(|&xi| {
                (5.1 * PI * xi + 0.5).sin().powi(30)
                    * (-4.0 * LN_2 * (xi - 0.0667).powi(2) / 0.64).exp()
            })
            .product(),
        2 => x
            .windows(2)
            .map(|w| 100.0 * (w[1] - w[0]).powi(2) + (1.0 - w[0]).powi(2))
            .sum(),
        3 => {
            let sq = x.iter().map(|xi| xi * xi).sum::<f64>() / n;
            let cs = x.iter().map(|xi| (2.0 * PI * xi).cos()).sum::<f64>() / n;
            20.0 + E - 20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp()
        }
        4 => -x.iter().map(|&xi| xi * xi.abs().sqrt().sin()).sum::<f64>(),
        5 => {
            let sum = x.iter().map(|xi| xi * xi).sum::<f64>() / 4000.0;
            let prod: f64 = x
                .iter()
                .enumerate()
                .map(|(i, xi)| (xi / ((i + 1) as f64).sqrt()).cos())
                .product();
            sum - prod + 1.0
        }
        6 => x
            .iter()
            .map(|xi| xi * xi - 10.0 * (2.0 * PI * xi).cos() + 10.0)
            .sum(),
        7 => x.iter().map(|xi| xi * xi).sum(),
        8 => {
            let mut partial = 1.0;
            let mut total = 0.0;
            for &xi in x {
                partial *= xi;
                total += partial * partial.cos();
            }
            total
        }
        9 => x.iter().map(|xi| xi * (10.0 * PI * xi).sin()).sum(),
        10 => x
            .iter()
            .enumerate()
            .map(|(i, xi)| (i + 1) as f64 * xi)
            .sum(),
        _ => unreachable!("id checked by spec()"),
    }
}

/// Benchmark function `f1`..`f10` behind the [`Objective`] interface.
#[derive(Debug, Clone)]
pub struct TestFunction {
    spec: ObjectiveSpec,
    variables: Vec<VariableSpec>,
}

impl TestFunction {
    pub fn new(id: u8) -> Result<Self> {
        let spec = spec(id)?;
        let variables = spec.variables();
        Ok(TestFunction { spec, variables })
    }

    /// Parse `"f4"` or `"4"`.
    pub fn from_name(name: &str) -> Result<Self> {
        let digits = name.strip_prefix('f').unwrap_or(name);
        let id = digits.parse::<u8>().map_err(|_| Error::Unknown {
            kind: "test function",
            name: name.to_string(),
        })?;
        TestFunction::new(id)
    }

    pub fn id(&self) -> u8 {
        self.spec.id
    }

    pub fn spec(&self) -> &ObjectiveSpec {
        &self.spec
    }
}

impl Objective for TestFunction {
    fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    fn sense(&self) -> Sense {
        self.spec.sense
    }

    fn evaluate(&self, x: &[f64], _progress: Progress) -> Result<Evaluation> {
        evaluate(self.spec.id, x)
    }

    fn name(&self) -> String {
        format!("f{}", self.spec.id)
    }
}
