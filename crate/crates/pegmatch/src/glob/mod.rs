//! Glob pattern compilation and matching.
//!
//! Patterns follow the LSP 3.17 dialect, pinned down strictly (see
//! [`tokenize_glob`]). Compile once with [`compile_glob`], then test
//! paths with [`CompiledGlob::matches`]; matching is whole-path and
//! yields only a boolean. [`oracle_match`] is the brute-force reference
//! the compiled matcher is differentially tested against.

mod brace;
mod compile;
mod oracle;
mod token;

pub use brace::{check_opt, expand_braces, BraceCut};
pub use compile::{
    compile_glob, compile_glob_with, get_first, CompiledGlob, GlobOptions, OptimizationUse,
};
pub use oracle::oracle_match;
pub use token::{tokenize_glob, GlobError, GlobErrorKind, GlobToken};
