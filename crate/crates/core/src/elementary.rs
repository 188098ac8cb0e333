//! Elementary (radius-1, binary) cellular automata on a ring, with optional
//! random cell flips after every step.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};

/// Lookup table from a 3-cell neighbourhood to the next state of the centre.
///
/// Entry `4*l + 2*c + r` holds the output for `(l, c, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BinaryRule {
    table: [u8; 8],
}

impl BinaryRule {
    pub fn new(table: [u8; 8]) -> Result<Self> {
        if table.iter().any(|&b| b > 1) {
            return Err(Error::Config("rule table entries must be 0 or 1".into()));
        }
        Ok(BinaryRule { table })
    }

    pub fn from_wolfram(code: u8) -> Self {
        let mut table = [0; 8];
        for (i, t) in table.iter_mut().enumerate() {
            *t = (code >> i) & 1;
        }
        BinaryRule { table }
    }

    pub fn wolfram_code(&self) -> u8 {
        self.table
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (b << i))
    }

    pub fn apply(&self, left: u8, center: u8, right: u8) -> u8 {
        self.table[usize::from((left << 2) | (center << 1) | right)]
    }

    pub fn table(&self) -> [u8; 8] {
        self.table
    }
}

/// The rule
///
/// ```text
/// 111 110 100 101 011 010 001 000
///  1   0   0   1   0   1   0   1
/// ```
pub fn demo_rule() -> BinaryRule {
    let printed = [
        (0b111, 1),
        (0b110, 0),
        (0b100, 0),
        (0b101, 1),
        (0b011, 0),
        (0b010, 1),
        (0b001, 0),
        (0b000, 1),
    ];
    let mut table = [0; 8];
    for (pattern, out) in printed {
        table[pattern] = out;
    }
    BinaryRule { table }
}

/// Successive rows of an evolution; row 0 is the initial row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TapeHistory {
    rows: Vec<Vec<u8>>,
    /// Cells flipped after computing each row (empty for row 0).
    flips: Vec<Vec<usize>>,
}

impl TapeHistory {
    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn flips(&self) -> &[Vec<usize>] {
        &self.flips
    }

    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    /// PBM (`P1`) image, one pixel per cell, black = 1.
    pub fn to_pbm(&self) -> String {
        let mut out = format!("P1\n{} {}\n", self.width(), self.height());
        for row in &self.rows {
            out.push_str(&join_row(row, " "));
            out.push('\n');
        }
        out
    }

    /// One line of `0`/`1` characters per step.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.height() * (self.width() + 1));
        for row in &self.rows {
            out.push_str(&join_row(row, ""));
            out.push('\n');
        }
        out
    }
}

fn join_row(row: &[u8], sep: &str) -> String {
    let mut s = String::with_capacity(row.len() * (1 + sep.len()));
    for (i, b) in row.iter().enumerate() {
        if i > 0 {
            s.push_str(sep);
        }
        let _ = write!(s, "{b}");
    }
    s
}

/// One synchronous update with periodic boundary.
pub fn step(rule: &BinaryRule, row: &[u8]) -> Vec<u8> {
    let n = row.len();
    (0..n)
        .map(|i| rule.apply(row[(i + n - 1) % n], row[i], row[(i + 1) % n]))
        .collect()
}

/// Evolve `initial` for `steps` steps. After each step a
/// Poisson(`perturb_rate`) number of uniformly chosen cells is flipped.
pub fn evolve<R: Rng + ?Sized>(
    rule: &BinaryRule,
    initial: &[u8],
    steps: usize,
    perturb_rate: f64,
    rng: &mut R,
) -> Result<TapeHistory> {
    if initial.is_empty() {
        return Err(Error::Config("initial row is empty".into()));
    }
    if initial.iter().any(|&b| b > 1) {
        return Err(Error::Config("initial row must hold 0/1 cells".into()));
    }
    if !(perturb_rate >= 0.0 && perturb_rate.is_finite()) {
        return Err(Error::Config(format!(
            "perturbation rate must be finite and >= 0, got {perturb_rate}"
        )));
    }
    let poisson = if perturb_rate > 0.0 {
        Some(Poisson::new(perturb_rate).map_err(|e| Error::Config(e.to_string()))?)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(steps + 1);
    let mut flips = Vec::with_capacity(steps + 1);
    rows.push(initial.to_vec());
    flips.push(Vec::new());
    for _ in 0..steps {
        let mut next = step(rule, rows.last().expect("non-empty"));
        let mut flipped = Vec::new();
        if let Some(p) = &poisson {
            let count = p.sample(rng) as usize;
            for _ in 0..count {
                let i = rng.random_range(0..next.len());
                next[i] ^= 1;
                flipped.push(i);
            }
        }
        rows.push(next);
        flips.push(flipped);
    }
    Ok(TapeHistory { rows, flips })
}

/// A row of `width` independent fair coin flips.
pub fn random_row<R: Rng + ?Sized>(width: usize, rng: &mut R) -> Vec<u8> {
    (0..width).map(|_| rng.random_range(0..=1)).collect()
}

/// Write the PBM image to `path`, and the text dump to `text` if given.
pub fn render(history: &TapeHistory, path: &Path, text: Option<&Path>) -> Result<()> {
    write_file(path, &history.to_pbm())?;
    if let Some(t) = text {
        write_file(t, &history.to_text())?;
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| Error::io(path, e))
}
