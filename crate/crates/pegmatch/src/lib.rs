//! A PEG pattern-matching engine with two front-ends built on top of it:
//! an ECMA-404 JSON parser and a glob-to-PEG compiler for LSP-style glob
//! patterns.
//!
//! The engine ([`peg`]) matches byte subjects against grammars built from
//! pattern combinators, with the full capture family: simple, group,
//! table, fold, function, constant, match-time, and substitution
//! captures. Matching runs on an explicit heap stack with tail-call
//! elimination, so deeply nested or deeply recursive input cannot
//! overflow the native stack.
//!
//! The JSON front-end ([`json`]) builds its parser as an engine grammar
//! and exposes ablation switches for its two construction strategies
//! (collect-then-build objects vs. accumulator folding, substitution
//! strings vs. fragment merging) so the cost of each can be measured.
//!
//! The glob front-end ([`glob`]) compiles LSP 3.17-constrained glob
//! patterns to engine patterns: segment-confined stars with
//! skipping-false-starts search, flattened star chains, cross-segment
//! globstar search, and brace expansion with a segment-boundary cut that
//! keeps branchy patterns from expanding against the whole tail. A
//! brute-force oracle matcher ships alongside for differential testing.
//!
//! Start with the runnable examples:
//!
//! ```text
//! cargo run -p pegmatch --example grammar_basics
//! cargo run -p pegmatch --example substitution_capture
//! cargo run -p pegmatch --example json_parsing
//! cargo run -p pegmatch --example json_ablation
//! cargo run -p pegmatch --example glob_matching
//! cargo run -p pegmatch --example brace_expansion
//! cargo run -p pegmatch --example differential_testing
//! cargo run -p pegmatch --example stress_bench
//! ```

pub mod bench;
pub mod glob;
pub mod json;
pub mod peg;
