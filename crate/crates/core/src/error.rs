use thiserror::Error;

use crate::ast::Span;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{line}:{col}: syntax error: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("grammar error: {0}")]
    Grammar(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("{span}: unsafe rule, unbound variables: {}", vars.join(", "))]
    Unsafe { span: Span, vars: Vec<String> },
    #[error("grounding error: {0}")]
    Ground(String),
    #[error("reification error: {0}")]
    Reify(String),
    #[error("meta-encoding error: {0}")]
    Meta(String),
    #[error("solver error: {0}")]
    Solve(String),
    #[error("oracle error: {0}")]
    Oracle(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
