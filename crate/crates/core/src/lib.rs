//! Set-constraint solving over hereditarily finite sets.
//!
//! The crate provides the term language, a parser and printer for the
//! constraint language, set unification, a rewriting solver with negated
//! constraints, restricted intensional sets, linear integer arithmetic, a
//! clause engine, and a brute-force ground oracle used for cross-checking.

#![cfg_attr(all(not(feature = "std"), not(test)), no_std)]

extern crate alloc;

pub mod arith;
pub mod engine;
pub mod generate;
pub mod ground;
pub mod oracle;
pub mod prover;
pub mod ris;
pub mod solver;
pub mod syntax;
pub mod term;
pub mod unify;

pub use engine::{Clause, ClauseDB, LoadError};
pub use prover::{
    Category, Expect, NegConsistency, Obligation, ObligationManifest, ProofResult, RunReport,
};
pub use solver::{
    solve, solve_with_clock, Answer, Clock, Interrupt, LimitKind, Limits, NoClock, Search,
    SolveError, Verdict,
};
pub use syntax::{parse_goal, parse_program, SourceProgram, SyntaxError};
pub use term::{Formula, Prim, PrimOp, Subst, Term, Var, VarGen};
