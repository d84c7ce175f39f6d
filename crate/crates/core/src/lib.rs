//! Exact computation over the Walsh–Paley system, greedy approximants, and a
//! certified construction of an `L¹` function whose greedy approximants along
//! a Walsh subsystem fail to converge.
//!
//! Every value that enters a certificate is an exact [`Rational`]; floats only
//! appear when exporting samples.

pub mod cli;
pub mod counterexample;
pub mod dirichlet;
pub mod dyadic;
pub mod error;
pub mod greedy;
pub mod rational;
pub mod report;
pub mod walsh;

pub use counterexample::{
    assemble_expansion, block_terms, choose_m_nu, choose_sequences, divergence_bound, split_g_h,
    verify_theorem, BlockSpec, ConstructionConfig, DivergenceRecord, KPolicy, VerificationReport,
};
pub use dirichlet::{
    block_max_search, dirichlet_pow2, dirichlet_step, lebesgue_constant, KernelNormRecord,
};
pub use dyadic::DyadicStep;
pub use error::{Error, Result};
pub use greedy::{
    coeff_compare, coeff_value, greedy_approximant, greedy_gap_norm, greedy_order,
    quasi_greedy_scan, Coefficient, Expansion, Term,
};
pub use rational::Rational;
pub use walsh::{rademacher_sign, walsh_sign, walsh_step, Sign, WalshIndex};
