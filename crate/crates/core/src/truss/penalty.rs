//! Three-segment penalty and the staged constraint-tolerance schedule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `sum(<|c_i| / allowed_i - 1>)` with Macaulay brackets.
pub fn violation_factor(values: &[f64], allowables: &[f64]) -> f64 {
    values
        .iter()
        .zip(allowables)
        .map(|(c, a)| (c.abs() / a - 1.0).max(0.0))
        .sum()
}

/// Segment thresholds and penalty parameters of one stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltySegments {
    pub v1: f64,
    pub v2: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl PenaltySegments {
    pub fn parameter(&self, violation: f64) -> f64 {
        if violation < self.v1 {
            self.p1
        } else if violation < self.v2 {
            self.p2
        } else {
            self.p3
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0 < self.v1 && self.v1 < self.v2) {
            return Err(Error::Config(format!(
                "penalty thresholds need 0 < v1 < v2, got {} and {}",
                self.v1, self.v2
            )));
        }
        if !(self.p1 < self.p2 && self.p2 < self.p3) {
            return Err(Error::Config("penalty parameters need P1 < P2 < P3".into()));
        }
        Ok(())
    }
}

/// Early and late segment sets for one constraint channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyConfig {
    pub early: PenaltySegments,
    pub late: PenaltySegments,
    /// Fraction of the run at which the late set takes over.
    pub switch_fraction: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig {
            early: PenaltySegments {
                v1: 0.01,
                v2: 0.10,
                p1: 1.0,
                p2: 5.0,
                p3: 1000.0,
            },
            late: PenaltySegments {
                v1: 0.001,
                v2: 0.01,
                p1: 5.0,
                p2: 25.0,
                p3: 10000.0,
            },
            switch_fraction: 0.5,
        }
    }
}

impl PenaltyConfig {
    pub fn validate(&self) -> Result<()> {
        self.early.validate()?;
        self.late.validate()?;
        if !(0.0..=1.0).contains(&self.switch_fraction) {
            return Err(Error::Config("penalty switch must be in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn segments(&self, fraction: f64) -> &PenaltySegments {
        if fraction < self.switch_fraction {
            &self.early
        } else {
            &self.late
        }
    }
}

/// `p * violation^2`, with `p` picked by segment; zero when feasible.
pub fn penalty(violation: f64, config: &PenaltyConfig, fraction: f64) -> f64 {
    if violation <= 0.0 {
        return 0.0;
    }
    config.segments(fraction).parameter(violation) * violation * violation
}

/// Multipliers on the true constraint limits, each active from a fraction of
/// the run onwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceSchedule {
    pub steps: Vec<(f64, f64)>,
}

impl Default for ToleranceSchedule {
    fn default() -> Self {
        ToleranceSchedule {
            steps: vec![(0.0, 2.001 / 2.0), (0.4, 2.0005 / 2.0), (0.7, 1.0)],
        }
    }
}

impl ToleranceSchedule {
    pub fn exact() -> Self {
        ToleranceSchedule {
            steps: vec![(0.0, 1.0)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps.is_empty() {
            return Err(Error::Config("tolerance schedule is empty".into()));
        }
        let mut prev: Option<(f64, f64)> = None;
        for &(at, mult) in &self.steps {
            if !(0.0..=1.0).contains(&at) || mult < 1.0 {
                return Err(Error::Config(format!(
                    "tolerance step ({at}, {mult}) needs fraction in [0, 1] and multiplier >= 1"
                )));
            }
            if let Some((p_at, p_mult)) = prev {
                if at <= p_at || mult > p_mult {
                    return Err(Error::Config(
                        "tolerance steps must be increasing in time and non-increasing in multiplier"
                            .into(),
                    ));
                }
            }
            prev = Some((at, mult));
        }
        if prev.map(|(_, m)| m) != Some(1.0) {
            return Err(Error::Config(
                "last tolerance multiplier must be 1.0".into(),
            ));
        }
        Ok(())
    }

    pub fn multiplier(&self, fraction: f64) -> f64 {
        self.steps
            .iter()
            .rev()
            .find(|(at, _)| fraction >= *at)
            .or(self.steps.first())
            .map_or(1.0, |&(_, m)| m)
    }
}

/// Penalty settings for both constraint channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TrussPenalty {
    pub displacement: PenaltyConfig,
    pub stress: PenaltyConfig,
    pub tolerance: ToleranceSchedule,
}

impl TrussPenalty {
    pub fn validate(&self) -> Result<()> {
        self.displacement.validate()?;
        self.stress.validate()?;
        self.tolerance.validate()
    }
}
