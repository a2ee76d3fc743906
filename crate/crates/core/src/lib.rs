//! A workbench for a calculus of node replication: terms with explicit
//! substitutions and distributors, termination measures, rewriting,
//! evaluation strategies and a quantitative intersection type system.

pub mod error;
pub mod measures;
pub mod oracle;
pub mod rewrite;
pub mod strategies;
pub mod term;
pub mod trace;
pub mod types;

pub use error::{Error, Result};
pub use term::{parse, print, FreshSupply, Term};
