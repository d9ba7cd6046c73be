//! Static grounding-size estimation for answer set programs.
//!
//! The crate takes a logic program in a textual ASP-Core-2 subset and
//! predicts how many rules an intelligent grounder would produce for it,
//! without grounding. The pipeline is:
//!
//! 1. [`syntax`] — lex and parse the program, map symbolic constants to
//!    numbers.
//! 2. [`normalize`] — expand pools and intervals, strip aggregates, split
//!    disjunctive and choice heads, lower function and arithmetic terms,
//!    and check safety. The result is a [`Program`] of plain
//!    [`EstimationRule`]s whose terms are only integers and variables.
//! 3. [`depgraph`] — predicate dependency graph, strongly connected
//!    components, strata ranks, and per-component rule partitions.
//! 4. [`estimator`] — per-argument minimum/maximum/range/size estimates and
//!    key-aware per-rule grounding-size products.
//! 5. [`oracle`] — a reference bottom-up grounder used to measure true
//!    grounding sizes at small scale.
//!
//! The crate is `no_std` (with `alloc`); all IO lives in the companion CLI
//! crate.

#![no_std]

extern crate alloc;

pub mod depgraph;
pub mod estimator;
pub mod normalize;
pub mod oracle;
pub mod syntax;
#[cfg(feature = "test-support")]
pub mod testsupport;

pub use depgraph::{ComponentAnalysis, DependencyGraph};
pub use estimator::{EstimateTable, KeyMap, RewriteDecision};
pub use normalize::{ArgumentId, EstimationRule, NormalizeError, Program};
pub use oracle::{GroundLimits, GroundProgram};
pub use syntax::{ConstantTable, ParseError, RawRule};
