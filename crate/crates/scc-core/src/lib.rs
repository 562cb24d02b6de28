//! Exact sufficient-component-cause analysis for binary outcomes under
//! an arbitrary number of binary causes.
//!
//! The crate has two halves. The counterfactual half works on complete
//! potential-outcome tables: sufficient-cause predicates, representation
//! synthesis and verification, prime implicants, and witness searches for
//! irreducible and singular interactions. The empirical half works on
//! stratified cohort or case-control counts: the interaction contrasts
//! with delta-method intervals, risk-ratio coefficients, and the linear
//! restrictions tying the two together.
//!
//! Assignments are encoded with X1 as the most significant bit, so file
//! columns `D000..D111` read left to right in index order.

pub mod empirical;
pub mod engine;
pub mod error;
pub mod interaction;
pub mod io;
pub mod outcome;
pub mod report;
pub mod trees;

pub use error::{Error, Result};
pub use outcome::{
    count_monotone_tables, Assignment, Individual, Literal, LiteralSet, MonotoneClass,
    OutcomeTable, Population, WeightMode,
};
