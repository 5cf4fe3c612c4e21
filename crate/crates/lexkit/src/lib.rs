//! A toolkit for the lambda calculus with explicit substitutions whose
//! composition is safe: substitutions may be swapped when independent and
//! composed when one really occurs in the other, and the rewrite relation
//! works modulo that swap equation.
//!
//! The crate provides the term language (including labelled substitutions
//! and decorated metavariables), parsing and printing, the rewrite engine
//! with bounded exploration and termination certificates, a perpetual
//! reduction strategy, measures on labelled terms, intersection-type
//! derivations, and superdevelopments.

pub mod gen;
pub mod labelled;
pub mod rewrite;
pub mod strategy;
pub mod suite;
pub mod superdev;
pub mod syntax;
pub mod term;
pub mod types;

pub use rewrite::{
    explore, normalize_leftmost, reducts, EngineError, Fuels, Oracle, Policy, ReductionGraph,
    RuleId, RuleSet, RuleSetName, SnVerdict, Step,
};
pub use suite::{run_suite, CheckResult, SUITE_NAMES};
pub use superdev::{
    confluence_check, lambda_x_nonconfluence_demo, superdev, z_check, ConfluenceReport,
    ConfluenceResult, NonconfluenceDemo, ZReport, ZStatus,
};
pub use syntax::{parse_term, parse_type, print_term, print_type, ParseError};
pub use term::{alpha_eq, CanonicalKey, GenTerm, KeyMode, Name, TermError};
pub use types::{Environment, Type, TypeDerivation, TypeError};
