//! Reference glob matcher for differential testing.
//!
//! Takes the dumbest correct route: expand every brace into flat
//! variants, then decide each variant by exhaustive backtracking over
//! token/path alignments (memoized, which changes cost but not
//! decisions). No search tricks, no cuts, no commitment — if any
//! alignment works, the pattern matches.

use std::collections::HashMap;

use crate::glob::brace::{expand_sequence, validate_expanded};
use crate::glob::token::{tokenize_glob, GlobError, GlobToken};

/// Decides `pattern` against `path` by brute force. Rejects exactly the
/// patterns [`tokenize_glob`] and expansion-level validation reject.
pub fn oracle_match(pattern: &str, path: &str) -> Result<bool, GlobError> {
    let tokens = tokenize_glob(pattern)?;
    let variants = expand_sequence(&tokens);
    for v in &variants {
        validate_expanded(v)?;
    }
    let chars: Vec<char> = path.chars().collect();
    Ok(variants.iter().any(|v| variant_matches(v, &chars)))
}

fn variant_matches(tokens: &[GlobToken], path: &[char]) -> bool {
    let mut memo: HashMap<(usize, usize), bool> = HashMap::new();
    align(tokens, path, 0, 0, &mut memo)
}

fn align(
    tokens: &[GlobToken],
    path: &[char],
    ti: usize,
    pi: usize,
    memo: &mut HashMap<(usize, usize), bool>,
) -> bool {
    if let Some(&known) = memo.get(&(ti, pi)) {
        return known;
    }
    let result = step(tokens, path, ti, pi, memo);
    memo.insert((ti, pi), result);
    result
}

fn step(
    tokens: &[GlobToken],
    path: &[char],
    ti: usize,
    pi: usize,
    memo: &mut HashMap<(usize, usize), bool>,
) -> bool {
    let Some(token) = tokens.get(ti) else {
        return pi == path.len();
    };
    match token {
        GlobToken::Literal(c) => {
            path.get(pi) == Some(c) && align(tokens, path, ti + 1, pi + 1, memo)
        }
        GlobToken::Separator => {
            path.get(pi) == Some(&'/') && align(tokens, path, ti + 1, pi + 1, memo)
        }
        GlobToken::Ques => {
            matches!(path.get(pi), Some(c) if *c != '/')
                && align(tokens, path, ti + 1, pi + 1, memo)
        }
        GlobToken::Class { ranges, negated } => {
            matches!(
                path.get(pi), Some(c) if class_matches(ranges, *negated, *c)
            ) && align(tokens, path, ti + 1, pi + 1, memo)
        }
        GlobToken::Star => {
            // Zero or more non-slash characters: try every split.
            let mut end = pi;
            loop {
                if align(tokens, path, ti + 1, end, memo) {
                    return true;
                }
                match path.get(end) {
                    Some(c) if *c != '/' => end += 1,
                    _ => return false,
                }
            }
        }
        GlobToken::GlobStar => {
            if ti + 1 == tokens.len() {
                // Terminal `**` swallows any remaining suffix.
                return true;
            }
            debug_assert!(
                matches!(tokens[ti + 1], GlobToken::Separator),
                "validated: ** is slash-delimited"
            );
            // `**/rest`: zero segments, or resume after any later slash.
            let rest = ti + 2;
            if align(tokens, path, rest, pi, memo) {
                return true;
            }
            for j in pi..path.len() {
                if path[j] == '/' && align(tokens, path, rest, j + 1, memo) {
                    return true;
                }
            }
            false
        }
        GlobToken::Brace(_) => unreachable!("variants are brace-free"),
    }
}

fn class_matches(ranges: &[(char, char)], negated: bool, c: char) -> bool {
    if c == '/' {
        return false;
    }
    let inside = ranges.iter().any(|&(lo, hi)| lo <= c && c <= hi);
    inside != negated
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_decisions() {
        assert!(oracle_match("*.{ts,js}", "a.ts").unwrap());
        assert!(oracle_match("*.{ts,js}", "b.js").unwrap());
        assert!(!oracle_match("*.{ts,js}", "c.rs").unwrap());
        assert!(!oracle_match("example.[!0-9]", "example.0").unwrap());
        assert!(oracle_match("example.[!0-9]", "example.a").unwrap());
    }

    #[test]
    fn globstar_spans() {
        assert!(oracle_match("**", "").unwrap());
        assert!(oracle_match("**", "a/b/c").unwrap());
        assert!(oracle_match("**/a", "a").unwrap());
        assert!(oracle_match("**/a", "x/x/x/a").unwrap());
        assert!(!oracle_match("**/a", "x/x/ay").unwrap());
        assert!(oracle_match("**/b/d/**", "a/b/c/b/d/e").unwrap());
    }

    #[test]
    fn stars_stay_in_segment() {
        assert!(!oracle_match("a*", "a/b").unwrap());
        assert!(oracle_match("a*b", "aXbYb").unwrap());
        assert!(!oracle_match("*{*/b,c}", "x/y/b").unwrap());
        assert!(oracle_match("*{*/b,c}", "x/b").unwrap());
    }

    #[test]
    fn same_errors_as_the_tokenizer() {
        assert!(oracle_match("a**", "x").is_err());
        assert!(oracle_match("[abc", "x").is_err());
        assert!(oracle_match("{a}", "x").is_err());
        assert!(oracle_match("{a/**,b}x", "x").is_err());
    }

    #[test]
    fn exhaustive_backtracking_finds_late_witnesses() {
        // A committed first-occurrence match would stop at the first 'b'.
        assert!(oracle_match("*b", "abab").unwrap());
        assert!(oracle_match("*b*b", "abab").unwrap());
        assert!(!oracle_match("*b*b*b", "abab").unwrap());
    }
}
