//! Brace expansion and the segment-boundary cut decision.
//!
//! Expansion works over token sequences, not text: concatenating branch
//! and tail text could fuse `*` and `*` into a spurious `**`, which token
//! sequences cannot do. The textual forms exposed here are renderings of
//! the token-level result.

use crate::glob::token::{render_tokens, GlobError, GlobErrorKind, GlobToken};

/// Expands every brace inside `tokens` into flat variants: a Cartesian
/// product across braces, branches in written order, leftmost brace
/// varying slowest. Duplicates are preserved. The result contains no
/// brace tokens.
pub(crate) fn expand_sequence(tokens: &[GlobToken]) -> Vec<Vec<GlobToken>> {
    let mut variants: Vec<Vec<GlobToken>> = vec![Vec::new()];
    for token in tokens {
        match token {
            GlobToken::Brace(branches) => {
                let choices: Vec<Vec<GlobToken>> =
                    branches.iter().flat_map(|b| expand_sequence(b)).collect();
                let mut next = Vec::with_capacity(variants.len() * choices.len());
                for v in &variants {
                    for choice in &choices {
                        let mut joined = v.clone();
                        joined.extend(choice.iter().cloned());
                        next.push(joined);
                    }
                }
                variants = next;
            }
            other => {
                for v in &mut variants {
                    v.push(other.clone());
                }
            }
        }
    }
    variants
}

/// Expands one brace's branches (including nested braces) into flat
/// token sequences, in left-to-right Cartesian order.
pub(crate) fn expand_branches(branches: &[Vec<GlobToken>]) -> Vec<Vec<GlobToken>> {
    branches.iter().flat_map(|b| expand_sequence(b)).collect()
}

/// Fully expands a brace token into its branch texts.
///
/// Panics when handed a non-brace token; braces are the only expandable
/// token.
pub fn expand_braces(brace: &GlobToken) -> Vec<String> {
    match brace {
        GlobToken::Brace(branches) => expand_branches(branches)
            .iter()
            .map(|tokens| render_tokens(tokens))
            .collect(),
        other => panic!("expand_braces needs a brace token, got {other:?}"),
    }
}

/// How a braced condition's tail splits at a segment boundary.
///
/// `branches` are the fully expanded branch texts; `prefix` is the part
/// of the tail before its first `/` (that slash removed); `rest` is the
/// remainder starting at that slash. `prefix + rest` reconstructs the
/// tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BraceCut {
    pub branches: Vec<String>,
    pub prefix: String,
    pub rest: String,
    pub(crate) branch_tokens: Vec<Vec<GlobToken>>,
    pub(crate) prefix_tokens: Vec<GlobToken>,
    pub(crate) rest_tokens: Vec<GlobToken>,
}

/// Decides whether the cut applies: every expanded branch must stay
/// inside a segment (no `/`, no `**`), and the tail must reach a `/`
/// without passing a `/`, `{`, or `**` first. When it applies, the
/// branch choice only has to match up to that slash; the rest of the
/// tail is compiled once, after the choice.
pub(crate) fn check_opt_tokens(
    expanded_branches: &[Vec<GlobToken>],
    tail: &[GlobToken],
) -> Option<BraceCut> {
    for branch in expanded_branches {
        for t in branch {
            if matches!(t, GlobToken::Separator | GlobToken::GlobStar) {
                return None;
            }
            debug_assert!(!matches!(t, GlobToken::Brace(_)), "branches are expanded");
        }
    }

    let slash_at = tail
        .iter()
        .position(|t| matches!(t, GlobToken::Separator))?;
    for t in &tail[..slash_at] {
        if matches!(t, GlobToken::Brace(_) | GlobToken::GlobStar) {
            return None;
        }
    }

    let prefix_tokens = tail[..slash_at].to_vec();
    let rest_tokens = tail[slash_at..].to_vec();
    Some(BraceCut {
        branches: expanded_branches.iter().map(|b| render_tokens(b)).collect(),
        prefix: render_tokens(&prefix_tokens),
        rest: render_tokens(&rest_tokens),
        branch_tokens: expanded_branches.to_vec(),
        prefix_tokens,
        rest_tokens,
    })
}

/// Text-level view of the cut decision. Branches must already be fully
/// expanded. Inputs that do not tokenize never cut.
pub fn check_opt(branches: &[&str], tail: &str) -> Option<BraceCut> {
    let branch_tokens: Option<Vec<Vec<GlobToken>>> = branches
        .iter()
        .map(|b| crate::glob::token::tokenize_glob(b).ok())
        .collect();
    let tail_tokens = crate::glob::token::tokenize_glob(tail).ok()?;
    check_opt_tokens(&branch_tokens?, &tail_tokens)
}

/// Validates `**` delimitation in a brace-free (or brace-opaque) token
/// stream produced by expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Adjacency {
    Ok,
    /// A `**` touches an unexpanded brace; only deeper expansion can tell.
    Undecidable,
    Invalid,
}

pub(crate) fn globstar_adjacency(tokens: &[GlobToken]) -> Adjacency {
    let mut verdict = Adjacency::Ok;
    for (i, t) in tokens.iter().enumerate() {
        if !matches!(t, GlobToken::GlobStar) {
            continue;
        }
        for neighbor in [
            i.checked_sub(1).and_then(|j| tokens.get(j)),
            tokens.get(i + 1),
        ] {
            match neighbor {
                None | Some(GlobToken::Separator) => {}
                Some(GlobToken::Brace(_)) => {
                    if verdict == Adjacency::Ok {
                        verdict = Adjacency::Undecidable;
                    }
                }
                Some(_) => return Adjacency::Invalid,
            }
        }
    }
    verdict
}

/// Expansion-level validation: every flat variant must keep `**`
/// delimited.
pub(crate) fn validate_expanded(tokens: &[GlobToken]) -> Result<(), GlobError> {
    match globstar_adjacency(tokens) {
        Adjacency::Ok => Ok(()),
        Adjacency::Undecidable => unreachable!("flat variants contain no braces"),
        Adjacency::Invalid => Err(GlobError::expanded(GlobErrorKind::GlobstarAdjacent)),
    }
}
