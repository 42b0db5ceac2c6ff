//! The command language: a line-oriented `verb args [as NAME]` syntax with a
//! lexer, parser, canonical formatter and an evaluator over [`Session`].
//!
//! ```text
//! synth qcd_lumps dims=16x16x16x16 lumps=12 seed=7 as qcd
//! slice qcd axis=t index=1..8 as s
//! view add s1
//! iso add view=0 level=0.005
//! cut add view=0 axis=x offset=center
//! snapshot "fig1.ppm" size=1920x1200
//! ```
//!
//! [`Session`]: crate::session::Session

mod ast;
mod eval;
mod parser;
mod token;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ast::{AxisRef, Command, CutOrientation, IndexSpec, Offset, ViewDerive, VERBS};
pub use eval::{
    evaluate, run_script, run_script_strict, EvalContext, EvalError, EvalResult, LineError, LineErrorKind,
    ScriptOutcome, MAX_SOURCE_DEPTH,
};
pub use parser::{nearest_verbs, parse, parse_script, ScriptLine};
pub use token::{tokenize, Token, TokenKind};

/// A syntax error at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub column: usize,
    pub offending: String,
}

/// Canonical text of a command; `parse(&format(c)) == Ok(c)`.
pub fn format(cmd: &Command) -> String {
    cmd.to_string()
}
