//! Temporal answer set programming through reification and meta-encodings.
//!
//! A temporal program is checked against a theory grammar, rewritten so
//! that a standard grounder keeps its theory expressions, grounded, reified
//! into integer-identified facts and combined with a timed meta-encoding of
//! the chosen logic. The stable models of the result are its temporal
//! models. An independent brute-force [`oracle`] serves as reference.

pub mod ast;
pub mod error;
pub mod grammar;
pub mod ground;
pub mod meta;
pub mod oracle;
pub mod pipeline;
pub mod reify;
pub mod solver;
pub mod trace;
pub mod transform;

pub use ast::{parse_program, parse_term, Program, Term};
pub use error::{Error, Result};
pub use grammar::{Logic, TheoryGrammar};
pub use pipeline::Config;
pub use trace::Trace;
