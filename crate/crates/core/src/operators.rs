//! Crossover kinds, the three mutation families and the archive that feeds
//! hyper-mutation.

use std::collections::VecDeque;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::Genome;
use crate::lattice::Cell;

/// Standard deviation of the half-normal digit increment.
pub const GAUSSIAN_SIGMA: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossoverKind {
    OnePoint,
    TwoPoint,
    VariableToVariable,
}

impl std::str::FromStr for CrossoverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-point" | "one_point" | "1p" => Ok(CrossoverKind::OnePoint),
            "two-point" | "two_point" | "2p" => Ok(CrossoverKind::TwoPoint),
            "variable-to-variable" | "var-to-var" | "variable_to_variable" | "v2v" => {
                Ok(CrossoverKind::VariableToVariable)
            }
            other => Err(Error::Unknown {
                kind: "crossover kind",
                name: other.to_string(),
            }),
        }
    }
}

impl std::fmt::Display for CrossoverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CrossoverKind::OnePoint => "one-point",
            CrossoverKind::TwoPoint => "two-point",
            CrossoverKind::VariableToVariable => "variable-to-variable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutationVersion {
    /// Replace a digit by a different uniform digit.
    Ordinary,
    /// Add a small signed integer to a digit, modulo 10.
    Gaussian,
}

impl std::str::FromStr for MutationVersion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ordinary" => Ok(MutationVersion::Ordinary),
            "gaussian" => Ok(MutationVersion::Gaussian),
            other => Err(Error::Unknown {
                kind: "mutation version",
                name: other.to_string(),
            }),
        }
    }
}

impl std::fmt::Display for MutationVersion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MutationVersion::Ordinary => "ordinary",
            MutationVersion::Gaussian => "gaussian",
        })
    }
}

/// Rounds of regular mutation per firing: fixed, or drawn anew each firing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutationCount {
    Fixed(usize),
    Uniform { min: usize, max: usize },
}

impl MutationCount {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match *self {
            MutationCount::Fixed(n) => n,
            MutationCount::Uniform { min, max } => rng.random_range(min..=max),
        }
    }

    fn min(&self) -> usize {
        match *self {
            MutationCount::Fixed(n) => n,
            MutationCount::Uniform { min, .. } => min,
        }
    }
}

/// Switch of both mutation versions part-way through a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VersionSwitch {
    /// Fraction of the run's generations after which the new versions apply.
    pub at_fraction: f64,
    pub regular: MutationVersion,
    pub best: MutationVersion,
}

/// Periods are in generations; `None` disables the operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationConfig {
    pub regular_period: Option<usize>,
    pub regular_count: MutationCount,
    pub regular_version: MutationVersion,
    pub best_period: Option<usize>,
    pub best_version: MutationVersion,
    pub hyper_period: Option<usize>,
    pub switch: Option<VersionSwitch>,
}

impl MutationConfig {
    pub fn disabled() -> Self {
        MutationConfig {
            regular_period: None,
            regular_count: MutationCount::Fixed(1),
            regular_version: MutationVersion::Gaussian,
            best_period: None,
            best_version: MutationVersion::Gaussian,
            hyper_period: None,
            switch: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, period) in [
            ("regular", self.regular_period),
            ("best", self.best_period),
            ("hyper", self.hyper_period),
        ] {
            if period == Some(0) {
                return Err(Error::Config(format!(
                    "{name} mutation period must be >= 1"
                )));
            }
        }
        if self.regular_count.min() == 0 {
            return Err(Error::Config("regular mutation count must be >= 1".into()));
        }
        if let MutationCount::Uniform { min, max } = self.regular_count {
            if max < min {
                return Err(Error::Config(
                    "regular mutation count range is empty".into(),
                ));
            }
        }
        if let Some(sw) = &self.switch {
            if !(0.0..=1.0).contains(&sw.at_fraction) {
                return Err(Error::Config(
                    "mutation switch fraction must be in [0, 1]".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Ring buffer of past best-of-generation genomes.
#[derive(Debug, Clone)]
pub struct Archive {
    entries: VecDeque<Genome>,
    capacity: usize,
}

impl Archive {
    pub const DEFAULT_CAPACITY: usize = 50;

    pub fn new(capacity: usize) -> Self {
        Archive {
            entries: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    pub fn push(&mut self, genome: Genome) {
        if self.capacity == 0 {
            return;
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(genome);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn get(&self, i: usize) -> Option<&Genome> {
        self.entries.get(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Genome> {
        self.entries.iter()
    }
}

/// Child of `a` and `b`. Both parents must share a layout.
pub fn crossover<R: Rng + ?Sized>(
    a: &Genome,
    b: &Genome,
    kind: CrossoverKind,
    rng: &mut R,
) -> Result<Genome> {
    if !a.same_layout(b) {
        return Err(Error::Layout(
            "crossover parents have different layouts".into(),
        ));
    }
    let len = a.len();
    let child = match kind {
        CrossoverKind::OnePoint => {
            if len < 2 {
                a.clone()
            } else {
                one_point(a, b, rng.random_range(1..len))
            }
        }
        CrossoverKind::TwoPoint => {
            if len < 3 {
                // fewer than two distinct interior cuts
                return crossover(a, b, CrossoverKind::OnePoint, rng);
            }
            let cuts = index::sample(rng, len - 1, 2);
            let (x, y) = (cuts.index(0) + 1, cuts.index(1) + 1);
            two_point(a, b, x.min(y), x.max(y))
        }
        CrossoverKind::VariableToVariable => {
            let mut child = a.clone();
            for v in 0..a.layout().variables() {
                if rng.random_bool(0.5) {
                    child.substring_mut(v).copy_from_slice(b.substring(v));
                }
            }
            child
        }
    };
    Ok(child)
}

/// `a[..cut] ++ b[cut..]`.
pub fn one_point(a: &Genome, b: &Genome, cut: usize) -> Genome {
    let mut child = a.clone();
    child.digits_mut()[cut..].copy_from_slice(&b.digits()[cut..]);
    child
}

/// `a[..lo] ++ b[lo..hi] ++ a[hi..]`.
pub fn two_point(a: &Genome, b: &Genome, lo: usize, hi: usize) -> Genome {
    let mut child = a.clone();
    child.digits_mut()[lo..hi].copy_from_slice(&b.digits()[lo..hi]);
    child
}

/// Magnitude and sign of one Gaussian digit increment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigitStep {
    pub magnitude: u8,
    pub negative: bool,
}

impl DigitStep {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let normal = Normal::new(0.0, GAUSSIAN_SIGMA).expect("positive sigma");
        let magnitude = normal.sample(rng).abs().round().min(9.0) as u8;
        DigitStep {
            magnitude,
            negative: rng.random_bool(0.5),
        }
    }

    pub fn apply(self, digit: u8) -> u8 {
        let delta = if self.negative {
            -(self.magnitude as i32)
        } else {
            self.magnitude as i32
        };
        (digit as i32 + delta).rem_euclid(10) as u8
    }
}

/// Add a signed half-normal increment to one digit of substring `variable`.
pub fn gaussian_digit_perturb<R: Rng + ?Sized>(
    genome: &Genome,
    variable: usize,
    rng: &mut R,
) -> Genome {
    let mut out = genome.clone();
    perturb_in_place(&mut out, variable, rng);
    out
}

fn perturb_in_place<R: Rng + ?Sized>(genome: &mut Genome, variable: usize, rng: &mut R) {
    let sub = genome.substring_mut(variable);
    let pos = rng.random_range(0..sub.len());
    let step = DigitStep::sample(rng);
    sub[pos] = step.apply(sub[pos]);
}

/// A digit different from `digit`, uniform over the other nine.
pub fn ordinary_digit<R: Rng + ?Sized>(digit: u8, rng: &mut R) -> u8 {
    (digit + rng.random_range(1..10u8)) % 10
}

fn ordinary_in_substring<R: Rng + ?Sized>(genome: &mut Genome, variable: usize, rng: &mut R) {
    let sub = genome.substring_mut(variable);
    let pos = rng.random_range(0..sub.len());
    sub[pos] = ordinary_digit(sub[pos], rng);
}

/// `rounds` passes; each pass mutates substring `i` of a uniformly chosen cell,
/// for every variable `i`.
pub fn regular_mutation<R: Rng + ?Sized>(
    cells: &mut [Cell],
    rounds: usize,
    version: MutationVersion,
    rng: &mut R,
) {
    if cells.is_empty() {
        return;
    }
    let variables = cells[0].genome.layout().variables();
    for _ in 0..rounds {
        for v in 0..variables {
            let target = rng.random_range(0..cells.len());
            let genome = &mut cells[target].genome;
            match version {
                MutationVersion::Ordinary => ordinary_in_substring(genome, v, rng),
                MutationVersion::Gaussian => perturb_in_place(genome, v, rng),
            }
        }
    }
}

/// Index of the highest-fitness cell; the leftmost wins ties.
pub fn best_cell(cells: &[Cell]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, cell) in cells.iter().enumerate() {
        match best {
            Some(b) if cells[b].fitness() >= cell.fitness() => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Mutate the best cell currently on the lattice.
pub fn mutate_best<R: Rng + ?Sized>(cells: &mut [Cell], version: MutationVersion, rng: &mut R) {
    let Some(target) = best_cell(cells) else {
        return;
    };
    let genome = &mut cells[target].genome;
    let variables = genome.layout().variables();
    match version {
        MutationVersion::Ordinary => {
            let count = rng.random_range(1..=variables).min(genome.len());
            let positions = index::sample(rng, genome.len(), count);
            let digits = genome.digits_mut();
            for pos in positions.iter() {
                digits[pos] = ordinary_digit(digits[pos], rng);
            }
        }
        MutationVersion::Gaussian => {
            let v = rng.random_range(0..variables);
            perturb_in_place(genome, v, rng);
        }
    }
}

/// Replace one whole substring of one cell with the same substring of an
/// archived genome. No-op on an empty archive.
pub fn hyper_mutation<R: Rng + ?Sized>(cells: &mut [Cell], archive: &Archive, rng: &mut R) {
    if archive.is_empty() || cells.is_empty() {
        return;
    }
    let target = rng.random_range(0..cells.len());
    let variables = cells[target].genome.layout().variables();
    let v = rng.random_range(0..variables);
    let donor = archive.get(rng.random_range(0..archive.len())).unwrap();
    cells[target]
        .genome
        .substring_mut(v)
        .copy_from_slice(donor.substring(v));
}
