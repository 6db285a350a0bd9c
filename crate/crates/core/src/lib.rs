//! Logic-bug hunter for an embedded SQL engine.
//!
//! The tool synthesizes queries that are guaranteed, by an independent
//! expression interpreter, to fetch one previously chosen row (the pivot
//! row). A query whose result set omits that row exposes a logic bug. A
//! second oracle flags statements that fail with errors outside a
//! per-statement expected list.
//!
//! Pipeline per round: generate a random database state, pick a pivot row
//! per table, generate random expressions over the schema, evaluate them
//! on the pivot row, rectify them to be TRUE, wrap them into a query, and
//! check that the engine's result set contains the expected row.

pub mod ast;
pub mod engine;
pub mod gen;
pub mod interp;
pub mod oracle;
pub mod pattern;
pub mod rectify;
pub mod schema;
pub mod state;
pub mod value;

pub use value::{Collation, StorageClass, TriBool, TypeAffinity, Value};
