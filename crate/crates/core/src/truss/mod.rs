//! Truss sizing: stiffness analysis, penalized weight and the shipped
//! benchmark structures.

mod analysis;
mod model;
mod penalty;

pub use analysis::{analyze, global_stiffness, reduced_stiffness, AnalysisResult};
pub use model::{
    benchmark_model, resolve_model, LoadDef, Member, MemberDef, NodeDef, TrussFile, TrussModel,
    BENCHMARKS,
};
pub use penalty::{
    penalty, violation_factor, PenaltyConfig, PenaltySegments, ToleranceSchedule, TrussPenalty,
};

use crate::error::Result;
use crate::genome::VariableSpec;
use crate::objectives::{Evaluation, Objective, Progress, Sense};

/// Largest true violation factor a design may have and still count as
/// feasible.
pub const FEASIBILITY_TOL: f64 = 1e-4;

/// Constraint bookkeeping for one design at one point of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub analysis: AnalysisResult,
    /// Violation factors against the relaxed limits.
    pub displacement_violation: f64,
    pub stress_violation: f64,
    pub displacement_penalty: f64,
    pub stress_penalty: f64,
    /// Violation factor (both channels) against the true limits.
    pub true_violation: f64,
}

impl Assessment {
    pub fn penalized_weight(&self) -> f64 {
        self.analysis.weight * (1.0 + self.displacement_penalty + self.stress_penalty)
    }

    pub fn feasible(&self) -> bool {
        self.true_violation <= FEASIBILITY_TOL
    }
}

fn channel_violations(model: &TrussModel, r: &AnalysisResult, multiplier: f64) -> (f64, f64) {
    let d_limit = model.displacement_limit * multiplier;
    let s_limit = model.stress_limit * multiplier;
    let free: Vec<f64> = model
        .free_dofs()
        .iter()
        .map(|&d| r.displacements[d])
        .collect();
    let disp = violation_factor(&free, &vec![d_limit; free.len()]);
    let stress = violation_factor(&r.stresses, &vec![s_limit; r.stresses.len()]);
    (disp, stress)
}

/// Analyze `areas` and apply the penalty active at `fraction` of the run.
pub fn assess(
    model: &TrussModel,
    areas: &[f64],
    config: &TrussPenalty,
    fraction: f64,
) -> Result<Assessment> {
    let analysis = analyze(model, areas)?;
    let multiplier = config.tolerance.multiplier(fraction);
    let (dv, sv) = channel_violations(model, &analysis, multiplier);
    let (td, ts) = channel_violations(model, &analysis, 1.0);
    Ok(Assessment {
        displacement_penalty: penalty(dv, &config.displacement, fraction),
        stress_penalty: penalty(sv, &config.stress, fraction),
        displacement_violation: dv,
        stress_violation: sv,
        true_violation: td + ts,
        analysis,
    })
}

/// `W (1 + P_d + P_s)` in kN.
pub fn penalized_weight(
    model: &TrussModel,
    areas: &[f64],
    config: &TrussPenalty,
    fraction: f64,
) -> Result<f64> {
    assess(model, areas, config, fraction).map(|a| a.penalized_weight())
}

/// Weight minimization of a truss as an [`Objective`].
#[derive(Debug, Clone)]
pub struct TrussProblem {
    pub model: TrussModel,
    pub penalty: TrussPenalty,
    variables: Vec<VariableSpec>,
}

impl TrussProblem {
    pub fn new(model: TrussModel, penalty: TrussPenalty) -> Result<Self> {
        penalty.validate()?;
        let variables = model.area_specs();
        Ok(TrussProblem {
            model,
            penalty,
            variables,
        })
    }

    pub fn benchmark(name: &str) -> Result<Self> {
        TrussProblem::new(benchmark_model(name)?, TrussPenalty::default())
    }

    pub fn assess(&self, areas: &[f64], progress: Progress) -> Result<Assessment> {
        assess(&self.model, areas, &self.penalty, progress.fraction())
    }
}

impl Objective for TrussProblem {
    fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    fn sense(&self) -> Sense {
        Sense::Min
    }

    fn evaluate(&self, x: &[f64], progress: Progress) -> Result<Evaluation> {
        let a = self.assess(x, progress)?;
        let mut eval = Evaluation::new(a.penalized_weight(), Sense::Min);
        eval.feasible = a.feasible();
        Ok(eval)
    }

    fn name(&self) -> String {
        self.model.name.clone()
    }
}
