//! Decimal-digit encoding of real design vectors.
//!
//! Each variable lives on a grid `lower + k * step`, `k = 0..=grid_size`. The
//! index `k` is written as a zero-padded decimal substring whose length is the
//! number of digits of `grid_size`, and the substrings are concatenated into
//! one genome. Mutation and crossover act on the digits; indices above
//! `grid_size` saturate to the upper bound when decoded (see [`Overflow`]).

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real design vector, one value per variable.
pub type DesignVector = Vec<f64>;

/// What an index above `grid_size` decodes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Overflow {
    /// Clamp to the upper bound.
    #[default]
    Saturate,
    /// Reduce modulo `grid_size + 1`.
    Wrap,
}

impl std::str::FromStr for Overflow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "saturate" => Ok(Overflow::Saturate),
            "wrap" => Ok(Overflow::Wrap),
            other => Err(Error::Unknown {
                kind: "overflow policy",
                name: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for Overflow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Overflow::Saturate => "saturate",
            Overflow::Wrap => "wrap",
        })
    }
}

/// Bounds and resolution of a single design variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub lower: f64,
    pub upper: f64,
    pub step: f64,
}

impl VariableSpec {
    pub fn new(lower: f64, upper: f64, step: f64) -> Result<Self> {
        let spec = VariableSpec { lower, upper, step };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lower.is_finite() && self.upper.is_finite() && self.step.is_finite()) {
            return Err(Error::InvalidSpec("bounds and step must be finite".into()));
        }
        if self.upper <= self.lower {
            return Err(Error::InvalidSpec(format!(
                "upper bound {} must exceed lower bound {}",
                self.upper, self.lower
            )));
        }
        if self.step <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "step {} must be positive",
                self.step
            )));
        }
        if self.grid_size() < 1 {
            return Err(Error::InvalidSpec(format!(
                "step {} is coarser than the range [{}, {}]",
                self.step, self.lower, self.upper
            )));
        }
        Ok(())
    }

    /// Number of grid intervals; valid indices are `0..=grid_size`.
    pub fn grid_size(&self) -> u64 {
        ((self.upper - self.lower) / self.step).round() as u64
    }

    /// Decimal digits needed to write `grid_size`.
    pub fn digit_count(&self) -> usize {
        decimal_digits(self.grid_size())
    }

    /// Value at grid index `k`, saturating at the upper bound.
    pub fn value_at(&self, k: u64) -> f64 {
        self.value_with(k, Overflow::Saturate)
    }

    pub fn value_with(&self, k: u64, overflow: Overflow) -> f64 {
        let k = match overflow {
            Overflow::Saturate => k.min(self.grid_size()),
            Overflow::Wrap => k % (self.grid_size() + 1),
        };
        if k == self.grid_size() {
            self.upper
        } else {
            self.lower + k as f64 * self.step
        }
    }

    /// Nearest grid index of `value`.
    pub fn index_of(&self, value: f64) -> u64 {
        ((value - self.lower) / self.step).round().max(0.0) as u64
    }

    /// Round `value` onto the grid.
    pub fn snap(&self, value: f64) -> f64 {
        self.value_at(self.index_of(value.clamp(self.lower, self.upper)))
    }

    fn contains(&self, value: f64) -> bool {
        let slack = 1e-9 * self.step;
        value >= self.lower - slack && value <= self.upper + slack
    }
}

fn decimal_digits(mut n: u64) -> usize {
    let mut digits = 1;
    while n >= 10 {
        n /= 10;
        digits += 1;
    }
    digits
}

/// Substring offsets of a genome. Depends only on the variable specs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    offsets: Vec<usize>,
}

impl Layout {
    pub fn from_specs(specs: &[VariableSpec]) -> Self {
        let mut offsets = Vec::with_capacity(specs.len() + 1);
        offsets.push(0);
        let mut total = 0;
        for spec in specs {
            total += spec.digit_count();
            offsets.push(total);
        }
        Layout { offsets }
    }

    pub fn from_lengths(lengths: &[usize]) -> Self {
        let mut offsets = vec![0];
        for len in lengths {
            offsets.push(offsets.last().unwrap() + len);
        }
        Layout { offsets }
    }

    pub fn variables(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn total_len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Digit range of variable `i`.
    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.offsets.windows(2).map(|w| w[1] - w[0])
    }
}

/// Fixed-length string of decimal digits split into per-variable substrings.
#[derive(Clone, PartialEq, Eq)]
pub struct Genome {
    digits: Vec<u8>,
    layout: Arc<Layout>,
}

impl Genome {
    pub fn from_digits(digits: Vec<u8>, layout: Arc<Layout>) -> Result<Self> {
        if digits.len() != layout.total_len() {
            return Err(Error::Layout(format!(
                "{} digits for a layout of {}",
                digits.len(),
                layout.total_len()
            )));
        }
        if let Some(d) = digits.iter().find(|&&d| d > 9) {
            return Err(Error::Layout(format!("digit {d} outside 0..=9")));
        }
        Ok(Genome { digits, layout })
    }

    /// Parse a string like `"00667"` against `layout`.
    pub fn parse(text: &str, layout: Arc<Layout>) -> Result<Self> {
        let digits = text
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::Layout(format!("non-digit character {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Genome::from_digits(digits, layout)
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn substring(&self, variable: usize) -> &[u8] {
        &self.digits[self.layout.range(variable)]
    }

    pub(crate) fn digits_mut(&mut self) -> &mut [u8] {
        &mut self.digits
    }

    pub(crate) fn substring_mut(&mut self, variable: usize) -> &mut [u8] {
        let range = self.layout.range(variable);
        &mut self.digits[range]
    }

    pub fn same_layout(&self, other: &Genome) -> bool {
        Arc::ptr_eq(&self.layout, &other.layout) || self.layout == other.layout
    }

    /// Integer index stored in substring `variable`.
    pub fn index(&self, variable: usize) -> u64 {
        self.substring(variable)
            .iter()
            .fold(0u64, |acc, &d| acc * 10 + d as u64)
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Genome(\"{self}\")")
    }
}

fn check_specs(specs: &[VariableSpec], layout: &Layout) -> Result<()> {
    if layout.variables() != specs.len() {
        return Err(Error::Layout(format!(
            "genome has {} substrings, specs describe {} variables",
            layout.variables(),
            specs.len()
        )));
    }
    for (i, (spec, len)) in specs.iter().zip(layout.lengths()).enumerate() {
        if spec.digit_count() != len {
            return Err(Error::Layout(format!(
                "substring {i} has {len} digits, spec needs {}",
                spec.digit_count()
            )));
        }
    }
    Ok(())
}

/// Write `values` as a genome on the grids of `specs`.
pub fn encode(values: &[f64], specs: &[VariableSpec]) -> Result<Genome> {
    encode_with(values, specs, Arc::new(Layout::from_specs(specs)))
}

pub fn encode_with(values: &[f64], specs: &[VariableSpec], layout: Arc<Layout>) -> Result<Genome> {
    if values.len() != specs.len() {
        return Err(Error::Layout(format!(
            "{} values for {} variables",
            values.len(),
            specs.len()
        )));
    }
    check_specs(specs, &layout)?;
    let mut digits = Vec::with_capacity(layout.total_len());
    for (i, (&value, spec)) in values.iter().zip(specs).enumerate() {
        if !value.is_finite() || !spec.contains(value) {
            return Err(Error::OutOfBounds {
                index: i,
                value,
                lower: spec.lower,
                upper: spec.upper,
            });
        }
        let k = spec.index_of(value).min(spec.grid_size());
        let width = spec.digit_count();
        let text = format!("{k:0width$}");
        digits.extend(text.bytes().map(|b| b - b'0'));
    }
    Genome::from_digits(digits, layout)
}

/// Read the design vector stored in `genome`.
pub fn decode(genome: &Genome, specs: &[VariableSpec]) -> Result<DesignVector> {
    decode_with(genome, specs, Overflow::Saturate)
}

pub fn decode_with(
    genome: &Genome,
    specs: &[VariableSpec],
    overflow: Overflow,
) -> Result<DesignVector> {
    check_specs(specs, genome.layout())?;
    Ok(decode_unchecked(genome, specs, overflow))
}

/// Decode without re-validating the layout; callers guarantee it matches.
pub(crate) fn decode_unchecked(
    genome: &Genome,
    specs: &[VariableSpec],
    overflow: Overflow,
) -> DesignVector {
    specs
        .iter()
        .enumerate()
        .map(|(i, spec)| spec.value_with(genome.index(i), overflow))
        .collect()
}

/// Genome with every digit drawn uniformly from 0..=9.
pub fn random_genome<R: Rng + ?Sized>(layout: &Arc<Layout>, rng: &mut R) -> Genome {
    let digits = (0..layout.total_len())
        .map(|_| rng.random_range(0..10u8))
        .collect();
    Genome {
        digits,
        layout: Arc::clone(layout),
    }
}
