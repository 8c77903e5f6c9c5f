//! Benchmark input parameter models for combinatorial interaction testing:
//! a model core, the CTWedge text format with ACTS/PICT exporters, a
//! finite-domain satisfiability oracle, decision-diagram and Monte Carlo
//! validity ratios, a randomized benchmark generator and a model analyzer.

pub mod analyzer;
pub mod format;
pub mod generator;
pub mod mdd;
pub mod model;
pub mod ratios;
pub mod sat;

#[cfg(test)]
mod testing;
