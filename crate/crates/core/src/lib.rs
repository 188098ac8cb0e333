//! Cellular-automaton genetic algorithm (CA-GA).
//!
//! A small population lives on a 1-D lattice. Each generation every cell
//! compares its fitness with its two neighbours and either survives or is
//! replaced by a crossover child of the better neighbours; heavy mutation,
//! an archive-driven hyper-mutation and periodic reinitialization to the
//! best-so-far keep the search moving. Designs are decimal digit strings
//! over a per-variable grid (see [`genome`]).

pub mod bench;
pub mod elementary;
pub mod error;
pub mod genome;
pub mod lattice;
pub mod objectives;
pub mod operators;
pub mod truss;

pub use error::{Error, Result};
pub use genome::{decode, encode, DesignVector, Genome, Layout, Overflow, VariableSpec};
pub use lattice::{run, run_observed, Cell, RunConfig, RunResult, Solution};
pub use objectives::{Evaluation, Objective, Progress, Sense, TestFunction};
pub use truss::{TrussModel, TrussProblem};
