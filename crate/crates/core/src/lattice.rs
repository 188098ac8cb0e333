//! The one-dimensional CA lattice and its generation loop.
//!
//! Each cell holds one individual. Every generation, each cell compares its
//! fitness with its neighbours in the pre-generation snapshot and either
//! survives, crosses with the better neighbour, or is replaced by a child of
//! both neighbours. Mutation, evaluation and reinitialization follow.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::{decode_unchecked, random_genome, DesignVector, Genome, Layout, Overflow};
use crate::objectives::{Evaluation, Objective, Progress, Sense};
use crate::operators::{
    self, best_cell, Archive, CrossoverKind, MutationConfig, MutationCount, MutationVersion,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub genome: Genome,
    pub eval: Evaluation,
}

impl Cell {
    pub fn new(genome: Genome, eval: Evaluation) -> Self {
        Cell { genome, eval }
    }

    pub fn fitness(&self) -> f64 {
        self.eval.fitness
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleCase {
    Survive,
    CrossWithRight,
    CrossWithLeft,
    CrossLeftRight,
    AllEqual,
}

/// Local rule for an interior cell. Ties count in the centre's favour.
pub fn classify(center: f64, left: f64, right: f64) -> Result<RuleCase> {
    if !(center.is_finite() && left.is_finite() && right.is_finite()) {
        return Err(Error::Evaluation(format!(
            "non-finite fitness in neighbourhood ({left}, {center}, {right})"
        )));
    }
    let beats_left = center >= left;
    let beats_right = center >= right;
    Ok(if center == left && center == right {
        RuleCase::AllEqual
    } else {
        match (beats_left, beats_right) {
            (true, true) => RuleCase::Survive,
            (true, false) => RuleCase::CrossWithRight,
            (false, true) => RuleCase::CrossWithLeft,
            (false, false) => RuleCase::CrossLeftRight,
        }
    })
}

/// Which parents, if any, produce the next occupant of cell `i`.
fn plan(cells: &[Cell], i: usize) -> Result<Option<(usize, usize)>> {
    let n = cells.len();
    let f = |j: usize| cells[j].fitness();
    if i == 0 || i == n - 1 {
        let other = if i == 0 { 1 } else { n - 2 };
        if !(f(i).is_finite() && f(other).is_finite()) {
            return Err(Error::Evaluation("non-finite fitness on boundary".into()));
        }
        return Ok(if f(i) >= f(other) {
            None
        } else {
            Some((i, other))
        });
    }
    Ok(match classify(f(i), f(i - 1), f(i + 1))? {
        RuleCase::Survive | RuleCase::AllEqual => None,
        RuleCase::CrossWithRight => Some((i, i + 1)),
        RuleCase::CrossWithLeft => Some((i, i - 1)),
        RuleCase::CrossLeftRight => Some((i - 1, i + 1)),
    })
}

/// Order in which [`sweep_with_order`] visits cells. The result does not
/// depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepOrder {
    LeftToRight,
    RightToLeft,
}

/// One synchronous application of the lattice rule.
pub fn sweep<R: Rng + ?Sized>(
    cells: &[Cell],
    kind: CrossoverKind,
    rng: &mut R,
) -> Result<Vec<Cell>> {
    sweep_with_order(cells, kind, rng, SweepOrder::LeftToRight)
}

pub fn sweep_with_order<R: Rng + ?Sized>(
    cells: &[Cell],
    kind: CrossoverKind,
    rng: &mut R,
    order: SweepOrder,
) -> Result<Vec<Cell>> {
    if cells.len() < 2 {
        return Err(Error::Config(format!(
            "lattice needs at least 2 cells, has {}",
            cells.len()
        )));
    }
    // One stream per cell, drawn in index order, so visiting order cannot
    // change which random numbers a cell sees.
    let seeds: Vec<u64> = (0..cells.len()).map(|_| rng.next_u64()).collect();
    let mut next = cells.to_vec();
    let indices: Box<dyn Iterator<Item = usize>> = match order {
        SweepOrder::LeftToRight => Box::new(0..cells.len()),
        SweepOrder::RightToLeft => Box::new((0..cells.len()).rev()),
    };
    for i in indices {
        if let Some((a, b)) = plan(cells, i)? {
            let mut cell_rng = ChaCha8Rng::seed_from_u64(seeds[i]);
            next[i].genome =
                operators::crossover(&cells[a].genome, &cells[b].genome, kind, &mut cell_rng)?;
        }
    }
    Ok(next)
}

/// Crossover kind for the early part of a run and an optional later kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossoverPlan {
    pub kind: CrossoverKind,
    /// `(fraction of generations, kind used from then on)`.
    pub switch: Option<(f64, CrossoverKind)>,
}

impl CrossoverPlan {
    pub fn fixed(kind: CrossoverKind) -> Self {
        CrossoverPlan { kind, switch: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reinitialization {
    pub period: usize,
    /// Fraction of the evaluation budget after which reinitialization starts.
    pub start_fraction: f64,
}

/// Everything that defines one CA-GA run apart from the objective and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub population: usize,
    /// Evaluation budget.
    pub evaluations: usize,
    pub crossover: CrossoverPlan,
    pub mutation: MutationConfig,
    pub reinit: Option<Reinitialization>,
    pub archive_capacity: usize,
    #[serde(default)]
    pub overflow: Overflow,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::Config(format!(
                "population must be at least 2, got {}",
                self.population
            )));
        }
        if self.evaluations < self.population {
            return Err(Error::Config(format!(
                "budget {} is smaller than the population {}",
                self.evaluations, self.population
            )));
        }
        if let Some((at, _)) = self.crossover.switch {
            if !(0.0..=1.0).contains(&at) {
                return Err(Error::Config(
                    "crossover switch fraction must be in [0, 1]".into(),
                ));
            }
        }
        if let Some(r) = &self.reinit {
            if r.period == 0 {
                return Err(Error::Config("reinitialization period must be >= 1".into()));
            }
            if !(0.0..=1.0).contains(&r.start_fraction) {
                return Err(Error::Config(
                    "reinitialization start must be in [0, 1]".into(),
                ));
            }
        }
        self.mutation.validate()
    }

    /// Generations including the initial one; each costs `population`
    /// evaluations.
    pub fn generations(&self) -> usize {
        self.evaluations / self.population
    }

    pub fn schedule(&self) -> OperatorSchedule {
        OperatorSchedule::new(self)
    }
}

/// Per-generation operator decisions resolved from a [`RunConfig`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSchedule {
    pub total_generations: usize,
    crossover: CrossoverPlan,
    crossover_switch_at: Option<usize>,
    mutation: MutationConfig,
    version_switch_at: Option<usize>,
    reinit: Option<(usize, usize)>,
}

fn fraction_of(fraction: f64, total: usize) -> usize {
    (fraction * total as f64).round() as usize
}

impl OperatorSchedule {
    pub fn new(config: &RunConfig) -> Self {
        let total = config.generations();
        OperatorSchedule {
            total_generations: total,
            crossover: config.crossover,
            crossover_switch_at: config
                .crossover
                .switch
                .map(|(at, _)| fraction_of(at, total)),
            mutation: config.mutation.clone(),
            version_switch_at: config
                .mutation
                .switch
                .map(|s| fraction_of(s.at_fraction, total)),
            reinit: config
                .reinit
                .map(|r| (r.period, fraction_of(r.start_fraction, total))),
        }
    }

    pub fn crossover_kind(&self, generation: usize) -> CrossoverKind {
        match (self.crossover.switch, self.crossover_switch_at) {
            (Some((_, late)), Some(at)) if generation >= at => late,
            _ => self.crossover.kind,
        }
    }

    fn versions(&self, generation: usize) -> (MutationVersion, MutationVersion) {
        match (self.mutation.switch, self.version_switch_at) {
            (Some(sw), Some(at)) if generation >= at => (sw.regular, sw.best),
            _ => (self.mutation.regular_version, self.mutation.best_version),
        }
    }

    pub fn regular(&self, generation: usize) -> Option<(MutationCount, MutationVersion)> {
        due(self.mutation.regular_period, generation)
            .then(|| (self.mutation.regular_count, self.versions(generation).0))
    }

    pub fn best(&self, generation: usize) -> Option<MutationVersion> {
        due(self.mutation.best_period, generation).then(|| self.versions(generation).1)
    }

    pub fn hyper(&self, generation: usize) -> bool {
        due(self.mutation.hyper_period, generation)
    }

    pub fn reinit(&self, generation: usize) -> bool {
        match self.reinit {
            Some((period, start)) => generation >= start && generation.is_multiple_of(period),
            None => false,
        }
    }
}

fn due(period: Option<usize>, generation: usize) -> bool {
    matches!(period, Some(p) if generation.is_multiple_of(p))
}

/// The CA population plus the off-lattice records that go with it.
#[derive(Debug, Clone)]
pub struct LatticeState {
    pub cells: Vec<Cell>,
    pub generation: usize,
    pub evaluations: usize,
    pub best_so_far: Cell,
    /// Best evaluated individual whose true constraints hold.
    pub best_feasible: Option<Cell>,
    pub archive: Archive,
    pub overflow: Overflow,
    specs_layout: Arc<Layout>,
}

impl LatticeState {
    /// Random lattice of `config.population` cells, evaluated as generation 0.
    pub fn initialize<O: Objective + ?Sized, R: Rng + ?Sized>(
        objective: &O,
        config: &RunConfig,
        rng: &mut R,
    ) -> Result<Self> {
        let layout = Arc::new(Layout::from_specs(objective.variables()));
        let genomes: Vec<Genome> = (0..config.population)
            .map(|_| random_genome(&layout, rng))
            .collect();
        Self::from_genomes(objective, genomes, config)
    }

    /// Lattice holding `genomes`; only the archive, overflow and run length
    /// settings of `config` are used.
    pub fn from_genomes<O: Objective + ?Sized>(
        objective: &O,
        genomes: Vec<Genome>,
        config: &RunConfig,
    ) -> Result<Self> {
        if genomes.len() < 2 {
            return Err(Error::Config(format!(
                "population must be at least 2, got {}",
                genomes.len()
            )));
        }
        let layout = Arc::new(Layout::from_specs(objective.variables()));
        if let Some(g) = genomes.iter().find(|g| **g.layout() != *layout) {
            return Err(Error::Layout(format!(
                "genome {g} does not match the objective"
            )));
        }
        let progress = Progress {
            generation: 0,
            total_generations: config.generations(),
        };
        let overflow = config.overflow;
        let cells = genomes
            .into_iter()
            .map(|g| {
                let eval = evaluate(objective, &g, progress, overflow)?;
                Ok(Cell::new(g, eval))
            })
            .collect::<Result<Vec<_>>>()?;
        let best = cells[best_cell(&cells).expect("non-empty")].clone();
        let mut state = LatticeState {
            evaluations: cells.len(),
            cells,
            generation: 0,
            best_so_far: best.clone(),
            best_feasible: None,
            archive: Archive::new(config.archive_capacity),
            overflow,
            specs_layout: layout,
        };
        state.record_feasible();
        state.archive.push(best.genome);
        Ok(state)
    }

    /// Design vector stored in `genome` under this run's overflow policy.
    pub fn decode<O: Objective + ?Sized>(&self, objective: &O, genome: &Genome) -> DesignVector {
        decode_unchecked(genome, objective.variables(), self.overflow)
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.specs_layout
    }

    fn record_feasible(&mut self) {
        for cell in &self.cells {
            if !cell.eval.feasible {
                continue;
            }
            let better = match &self.best_feasible {
                Some(b) => cell.fitness() > b.fitness(),
                None => true,
            };
            if better {
                self.best_feasible = Some(cell.clone());
            }
        }
    }

    /// Advance one generation.
    pub fn step<O: Objective + ?Sized, R: Rng + ?Sized>(
        &mut self,
        objective: &O,
        schedule: &OperatorSchedule,
        rng: &mut R,
    ) -> Result<()> {
        let generation = self.generation + 1;

        let mut cells = sweep(&self.cells, schedule.crossover_kind(generation), rng)?;
        if let Some((count, version)) = schedule.regular(generation) {
            let rounds = count.sample(rng);
            operators::regular_mutation(&mut cells, rounds, version, rng);
        }
        if let Some(version) = schedule.best(generation) {
            operators::mutate_best(&mut cells, version, rng);
        }
        if schedule.hyper(generation) {
            operators::hyper_mutation(&mut cells, &self.archive, rng);
        }

        let progress = Progress {
            generation,
            total_generations: schedule.total_generations,
        };
        for cell in cells.iter_mut() {
            cell.eval = evaluate(objective, &cell.genome, progress, self.overflow)?;
        }
        self.evaluations += cells.len();
        self.cells = cells;
        self.generation = generation;

        let top = best_cell(&self.cells).expect("non-empty lattice");
        if self.cells[top].fitness() > self.best_so_far.fitness() {
            self.best_so_far = self.cells[top].clone();
        }
        self.record_feasible();
        self.archive.push(self.cells[top].genome.clone());

        if schedule.reinit(generation) {
            for cell in self.cells.iter_mut() {
                *cell = self.best_so_far.clone();
            }
        }
        Ok(())
    }
}

fn evaluate<O: Objective + ?Sized>(
    objective: &O,
    genome: &Genome,
    progress: Progress,
    overflow: Overflow,
) -> Result<Evaluation> {
    let x = decode_unchecked(genome, objective.variables(), overflow);
    let eval = objective.evaluate(&x, progress)?;
    if !eval.fitness.is_finite() {
        return Err(Error::Evaluation(format!(
            "{} returned non-finite fitness at {x:?}",
            objective.name()
        )));
    }
    Ok(eval)
}

/// A final answer of a run: genome, decoded design and evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub genome: String,
    pub design: DesignVector,
    pub raw: f64,
    pub fitness: f64,
}

impl Solution {
    fn from_cell<O: Objective + ?Sized>(cell: &Cell, state: &LatticeState, objective: &O) -> Self {
        Solution {
            genome: cell.genome.to_string(),
            design: state.decode(objective, &cell.genome),
            raw: cell.eval.raw,
            fitness: cell.eval.fitness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub sense: Sense,
    /// Best-so-far fitness after each generation, generation 0 first.
    pub history: Vec<f64>,
    pub best: Solution,
    pub best_feasible: Option<Solution>,
    pub evaluations: usize,
}

impl RunResult {
    pub fn generations(&self) -> usize {
        self.history.len()
    }

    pub fn raw_history(&self) -> impl Iterator<Item = f64> + '_ {
        self.history.iter().map(|&f| self.sense.raw(f))
    }
}

/// Run the CA-GA on `objective` with a seeded ChaCha8 stream.
pub fn run<O: Objective + ?Sized>(
    config: &RunConfig,
    objective: &O,
    seed: u64,
) -> Result<RunResult> {
    run_observed(config, objective, seed, |_| {})
}

/// As [`run`], calling `observe` with the state after every generation.
pub fn run_observed<O, F>(
    config: &RunConfig,
    objective: &O,
    seed: u64,
    mut observe: F,
) -> Result<RunResult>
where
    O: Objective + ?Sized,
    F: FnMut(&LatticeState),
{
    config.validate()?;
    let schedule = config.schedule();
    let generations = schedule.total_generations;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = LatticeState::initialize(objective, config, &mut rng)?;
    let mut history = Vec::with_capacity(generations);
    history.push(state.best_so_far.fitness());
    observe(&state);
    for _ in 1..generations {
        state.step(objective, &schedule, &mut rng)?;
        history.push(state.best_so_far.fitness());
        observe(&state);
    }
    Ok(RunResult {
        seed,
        sense: objective.sense(),
        history,
        best: Solution::from_cell(&state.best_so_far, &state, objective),
        best_feasible: state
            .best_feasible
            .as_ref()
            .map(|c| Solution::from_cell(c, &state, objective)),
        evaluations: state.evaluations,
    })
}
