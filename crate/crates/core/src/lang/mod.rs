//! The specification language: parsing, expansion and validation.

pub mod ast;
mod diag;
mod expand;
mod lexer;
mod parser;
mod pretty;
mod validate;

pub use diag::{Diagnostic, Diagnostics, Loc, Pos, Severity};
pub use expand::{expand_spec, ExpandError, MAX_AGENTS, MAX_ARRAY_SIZE};
pub use parser::{parse_spec, ParseError};
pub use pretty::{print_expr, print_spec};
pub use validate::validate_spec;

use crate::system::SystemSpec;

/// Parses, expands and validates `text`.
///
/// On success returns the system together with any warnings. On failure the
/// diagnostics contain at least one error.
pub fn load_system(text: &str) -> Result<(SystemSpec, Diagnostics), Diagnostics> {
    let raw = parse_spec(text).map_err(|e| Diagnostics::from(e.to_diagnostic()))?;
    let sys = expand_spec(&raw).map_err(|e| Diagnostics::from(e.to_diagnostic()))?;
    let diags = validate_spec(&sys);
    if diags.has_errors() {
        Err(diags)
    } else {
        Ok((sys, diags))
    }
}
