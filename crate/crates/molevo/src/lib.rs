//! In-silico molecular evolution engine.
//!
//! Populations of DNA sequences evolve under biologically motivated
//! variation operators (transition-biased point mutation, bounded
//! indels, recombination) and a multi-objective, bioinformatics-based
//! fitness function. Selection is NSGA-II; runs report Pareto-optimal
//! candidate proteins. Two run modes are supported: evolving random
//! sequence toward a known consensus, and forward-evolving a known gene
//! toward a target phenotype.
//!
//! With the default `parallel` feature, fitness evaluation runs as a
//! rayon data-parallel map; results are bit-identical to the sequential
//! build and independent of worker count.

pub mod cli;
pub mod engine;
pub mod error;
pub mod filter;
pub mod genome;
pub mod grammar;
pub mod mutation;
pub mod objectives;
pub mod rng;

pub use engine::{Engine, RunConfig, RunMode};
pub use error::{MolevoError, Result};
pub use genome::{Dna, Protein};
