//! A workbench for Parigot's λμ-calculus with strict intersection types.
//!
//! The crate covers terms and both substitution forms, →βμ reduction,
//! Böhm-style approximants, the strict type algebra, and derivations in
//! three type assignment systems (`S`, `Bot` and `SN`) together with a
//! checker, constructive typers and bounded search.

pub mod approx;
pub mod corpus;
pub mod deriv;
pub mod exhaustive;
pub mod expand;
pub mod graph;
pub mod infer;
pub mod json;
pub mod parse;
pub mod pretty;
pub mod reduce;
pub mod term;
pub mod transform;
pub mod type_syntax;
pub mod typer;
pub mod types;

pub use parse::{parse, ParseError};
pub use pretty::pretty;
pub use term::{Position, Ref, Step, Term};
