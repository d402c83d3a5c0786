//! Exact inconsistency measurement for relational databases with denial
//! constraints.
//!
//! The crate loads a typed database and a set of denial constraints
//! (functional and numerical dependencies included as sugar), grounds
//! the constraints into a conflict hypergraph of minimal inconsistent
//! tuple sets, and computes twenty inconsistency measures with exact
//! rational results: ten by transforming the database into a
//! propositional knowledge base and ten blaming tuples only. A postulate
//! harness machine-checks the rationality-postulate tables, and naive
//! brute-force oracles validate every optimized path on small instances.
//!
//! Start with the `examples/` directory: each example is a runnable tour
//! of one capability. The `incmeter` binary exposes the same operations
//! as subcommands for batch use.

pub mod constraint;
pub mod error;
pub mod gen;
pub mod ground;
pub mod kb;
pub mod lp;
pub mod measure;
pub mod model;
pub mod oracle;
pub mod postulate;
pub mod rational;
pub mod schema_io;
pub mod threevl;
pub mod transversal;

pub mod cli;

#[cfg(test)]
pub(crate) mod fixtures_test;

pub use error::Error;
pub use measure::{measure_all, Evaluator, MeasureId, MeasureKind, MeasureReport};
pub use model::{Database, Schema, TupleId, Value};
pub use rational::MeasureValue;
