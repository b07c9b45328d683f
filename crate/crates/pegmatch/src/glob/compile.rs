//! Glob-to-pattern compilation.
//!
//! The compiled shape keeps in-segment matching strictly separate from
//! segment-crossing behavior:
//!
//! - Inside a segment, fixed words and stars alternate. A leading word is
//!   matched in place. Each `*` followed by a word becomes an independent
//!   lazy search confined to the segment (`s <- word / [^/] s`), with a
//!   first-character skip loop when the word starts with a literal
//!   (`s <- word / [^/] [^/c]* s`). Star chains are flattened into
//!   sequential searches rather than nested ones. The last word of a
//!   segment searches for itself *at the segment end* (`&'/' / !.`
//!   appended), and a trailing star greedily takes the rest of the
//!   segment (`[^/]*`).
//! - A terminal `**` consumes all remaining input. A `**/` compiles to a
//!   recursive rule `s <- continuation / [^/]* '/' s` that retries the
//!   whole remaining pattern at each following segment head; the
//!   continuation spans every next segment, so nothing ever needs to
//!   back across a committed segment.
//! - A braced condition absorbs the entire remaining pattern into its
//!   branches (`{R,S}T => RT / ST`). When every expanded branch stays
//!   inside the segment and the tail reaches a `/` cleanly, the branch
//!   choice is cut at that boundary: branches only carry the tail prefix
//!   (with end-of-input acceptance replaced by a `&'/'` lookahead) and
//!   the rest compiles once, after the choice. With the cut disabled the
//!   naive expansion runs instead: the brace and its whole tail flatten
//!   into one alternative per expanded variant.

use regex_syntax::utf8::Utf8Sequences;

use crate::glob::brace::{
    check_opt_tokens, expand_branches, expand_sequence, globstar_adjacency, validate_expanded,
    Adjacency,
};
use crate::glob::token::{tokenize_glob, GlobError, GlobErrorKind, GlobToken};
use crate::peg::{ByteSet, Callbacks, CompiledGrammar, Grammar, Pattern};

/// Compilation switches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GlobOptions {
    /// Apply the segment-boundary cut to braced conditions. Disabling it
    /// falls back to full expansion of brace + tail; decisions are
    /// identical, the compiled shape (and its cost on branchy patterns)
    /// is not.
    pub brace_cut: bool,
}

impl Default for GlobOptions {
    fn default() -> Self {
        GlobOptions { brace_cut: true }
    }
}

/// Which optimizations actually fired during compilation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OptimizationUse {
    /// Searches emitted with the first-character skip loop.
    pub first_char_searches: usize,
    /// Searches emitted without one (no deterministic first character).
    pub plain_searches: usize,
    /// Braced conditions compiled through a boundary cut.
    pub brace_cuts: usize,
    /// Braced conditions compiled by flattening brace + tail entirely.
    pub flat_expansions: usize,
}

/// An immutable compiled matcher for one glob pattern.
#[derive(Clone, Debug)]
pub struct CompiledGlob {
    source: String,
    options: GlobOptions,
    grammar: Grammar,
    program: CompiledGrammar,
    used_opt: OptimizationUse,
}

impl CompiledGlob {
    /// Whole-path test: true iff the pattern consumes the entire path.
    pub fn matches(&self, path: &str) -> bool {
        let outcome = self
            .program
            .run(path.as_bytes(), 0)
            .expect("glob programs use no callbacks and bounded recursion");
        debug_assert!(!outcome.success() || outcome.end() == Some(path.len()));
        outcome.success()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn options(&self) -> GlobOptions {
        self.options
    }

    /// The engine pattern matching an entire path (the start rule's body).
    pub fn root(&self) -> &Pattern {
        self.grammar.rule("glob").expect("start rule exists")
    }

    pub fn optimizations(&self) -> &OptimizationUse {
        &self.used_opt
    }

    /// Stable textual dump of the compiled rule set, for inspection and
    /// golden tests.
    pub fn explain(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("glob: {}\n", self.source));
        out.push_str(&format!(
            "cut: {}\n",
            if self.options.brace_cut { "on" } else { "off" }
        ));
        out.push_str(&format!(
            "used: first-char-searches={} plain-searches={} brace-cuts={} flat-expansions={}\n",
            self.used_opt.first_char_searches,
            self.used_opt.plain_searches,
            self.used_opt.brace_cuts,
            self.used_opt.flat_expansions
        ));
        out.push_str("rules:\n");
        for (name, body) in self.grammar.rules() {
            out.push_str(&format!("  {name} <- {body}\n"));
        }
        out
    }
}

/// Compiles with default options (brace cut enabled).
pub fn compile_glob(pattern: &str) -> Result<CompiledGlob, GlobError> {
    compile_glob_with(pattern, GlobOptions::default())
}

pub fn compile_glob_with(pattern: &str, options: GlobOptions) -> Result<CompiledGlob, GlobError> {
    let tokens = tokenize_glob(pattern)?;
    let mut compiler = Compiler {
        options,
        rules: Vec::new(),
        counter: 0,
        used: OptimizationUse::default(),
    };
    let root = compiler.compile_tokens(&tokens)?;

    let mut rules = vec![("glob".to_string(), root)];
    rules.extend(compiler.rules);
    let grammar = Grammar::new(rules, "glob", Callbacks::new());
    let program = grammar
        .compile()
        .unwrap_or_else(|e| panic!("compiled glob grammar failed validation: {e}"));

    Ok(CompiledGlob {
        source: pattern.to_string(),
        options,
        grammar,
        program,
        used_opt: compiler.used,
    })
}

/// First code point a word can start with, when that is deterministic:
/// a literal (including escaped specials). `?`, classes, and braces have
/// no single first character.
pub fn get_first(word: &[GlobToken]) -> Option<char> {
    match word.first() {
        Some(GlobToken::Literal(c)) => Some(*c),
        _ => None,
    }
}

fn nonslash_set() -> ByteSet {
    let mut set = ByteSet::ALL;
    set.remove(b'/');
    set
}

fn nonslash() -> Pattern {
    Pattern::set(nonslash_set())
}

fn nonslash_span() -> Pattern {
    nonslash().star()
}

/// `&'/' / !.`: the segment boundary.
fn check_bnd() -> Pattern {
    Pattern::lit("/").and_pred().or(Pattern::eof())
}

#[derive(Clone, Copy, PartialEq)]
enum Boundary {
    /// End of segment: a slash ahead or end of input.
    CheckBnd,
    /// Strictly a slash ahead (cut branches: the rest needs it).
    SlashAhead,
}

impl Boundary {
    fn pattern(self) -> Pattern {
        match self {
            Boundary::CheckBnd => check_bnd(),
            Boundary::SlashAhead => Pattern::lit("/").and_pred(),
        }
    }
}

/// What follows the items being compiled.
#[derive(Clone, Copy, PartialEq)]
enum Ending {
    /// Segment ends here; anchor the last variable-length element.
    Boundary(Boundary),
    /// More of the same word/segment follows (used for the items before
    /// a braced condition).
    Continues,
}

enum SegItem<'t> {
    Word(&'t [GlobToken]),
    Star,
}

/// Splits segment tokens into alternating words and stars; consecutive
/// stars collapse (zero-or-more twice is zero-or-more).
fn split_items(seg: &[GlobToken]) -> Vec<SegItem<'_>> {
    let mut items = Vec::new();
    let mut i = 0;
    while i < seg.len() {
        if matches!(seg[i], GlobToken::Star) {
            if !matches!(items.last(), Some(SegItem::Star)) {
                items.push(SegItem::Star);
            }
            i += 1;
        } else {
            let start = i;
            while i < seg.len() && !matches!(seg[i], GlobToken::Star) {
                i += 1;
            }
            items.push(SegItem::Word(&seg[start..i]));
        }
    }
    items
}

struct Compiler {
    options: GlobOptions,
    rules: Vec<(String, Pattern)>,
    counter: usize,
    used: OptimizationUse,
}

impl Compiler {
    fn fresh(&mut self, prefix: &str) -> String {
        self.counter += 1;
        format!("{prefix}{}", self.counter)
    }

    /// Compiles the remaining token stream into a pattern that consumes
    /// everything to the end of the path.
    fn compile_tokens(&mut self, tokens: &[GlobToken]) -> Result<Pattern, GlobError> {
        match tokens.first() {
            None => Ok(Pattern::eof()),
            Some(GlobToken::Separator) => {
                Ok(Pattern::lit("/").then(self.compile_tokens(&tokens[1..])?))
            }
            Some(GlobToken::GlobStar) => {
                if tokens.len() == 1 {
                    // Terminal globstar: greedily take everything left.
                    return Ok(Pattern::any(1).star());
                }
                if !matches!(tokens[1], GlobToken::Separator) {
                    return Err(GlobError::expanded(GlobErrorKind::GlobstarAdjacent));
                }
                // `**/rest`: try the whole continuation at this segment
                // head, else skip one segment and recurse.
                let continuation = self.compile_tokens(&tokens[2..])?;
                let name = self.fresh("globstar");
                let body = continuation.or(nonslash_span()
                    .then(Pattern::lit("/"))
                    .then(Pattern::call(&name)));
                self.rules.push((name.clone(), body));
                Ok(Pattern::call(name))
            }
            Some(_) => {
                let seg_end = tokens
                    .iter()
                    .position(|t| matches!(t, GlobToken::Separator))
                    .unwrap_or(tokens.len());
                let seg = &tokens[..seg_end];
                let rest = &tokens[seg_end..];
                debug_assert!(!seg.iter().any(|t| matches!(t, GlobToken::GlobStar)));

                if let Some(bi) = seg.iter().position(|t| matches!(t, GlobToken::Brace(_))) {
                    let branches = match &seg[bi] {
                        GlobToken::Brace(b) => b.clone(),
                        _ => unreachable!(),
                    };
                    let mut tail: Vec<GlobToken> = seg[bi + 1..].to_vec();
                    tail.extend(rest.iter().cloned());
                    self.compile_with_brace(&seg[..bi], &branches, &tail)
                } else {
                    let items = split_items(seg);
                    let seg_pattern =
                        self.compile_items(&items, Ending::Boundary(Boundary::CheckBnd))?;
                    let continuation = self.compile_tokens(rest)?;
                    Ok(join(seg_pattern, continuation))
                }
            }
        }
    }

    /// Compiles alternating words and stars. `ending` controls how the
    /// last variable-length element is anchored.
    fn compile_items(
        &mut self,
        items: &[SegItem<'_>],
        ending: Ending,
    ) -> Result<Pattern, GlobError> {
        if items.is_empty() {
            return Ok(match ending {
                Ending::Boundary(Boundary::SlashAhead) => Boundary::SlashAhead.pattern(),
                _ => Pattern::empty(),
            });
        }

        let mut parts: Vec<Pattern> = Vec::new();
        let mut i = 0;

        if let SegItem::Word(w) = &items[0] {
            let mut p = self.compile_word(w);
            if items.len() == 1 {
                if let Ending::Boundary(Boundary::SlashAhead) = ending {
                    p = p.then(Boundary::SlashAhead.pattern());
                }
            }
            parts.push(p);
            i = 1;
        }

        while i < items.len() {
            debug_assert!(matches!(items[i], SegItem::Star));
            match items.get(i + 1) {
                Some(SegItem::Word(w)) => {
                    let is_last = i + 1 == items.len() - 1;
                    let mut target = self.compile_word(w);
                    if is_last {
                        if let Ending::Boundary(b) = ending {
                            target = target.then(b.pattern());
                        }
                    }
                    parts.push(self.lookfor(target, get_first(w)));
                    i += 2;
                }
                None => {
                    // Trailing star: greedy to the segment end.
                    let mut p = nonslash_span();
                    if let Ending::Boundary(b) = ending {
                        p = p.then(b.pattern());
                    }
                    parts.push(p);
                    i += 1;
                }
                Some(SegItem::Star) => unreachable!("consecutive stars collapse"),
            }
        }

        Ok(Pattern::seq(parts))
    }

    /// Lazy in-segment search for `target`. With a deterministic first
    /// character the retry loop skips every byte that cannot begin the
    /// target (`s <- target / [^/] [^/c]* s`); otherwise it advances one
    /// byte at a time (`s <- target / [^/] s`).
    fn lookfor(&mut self, target: Pattern, first: Option<char>) -> Pattern {
        let name = self.fresh("search");
        let retry = match first {
            Some(c) => {
                self.used.first_char_searches += 1;
                let mut buf = [0u8; 4];
                let first_byte = c.encode_utf8(&mut buf).as_bytes()[0];
                let mut skip = nonslash_set();
                skip.remove(first_byte);
                nonslash()
                    .then(Pattern::set(skip).star())
                    .then(Pattern::call(&name))
            }
            None => {
                self.used.plain_searches += 1;
                nonslash().then(Pattern::call(&name))
            }
        };
        self.rules.push((name.clone(), target.or(retry)));
        Pattern::call(name)
    }

    /// A braced condition and everything after it. `before` is the part
    /// of the current segment preceding the brace: its trailing word run
    /// belongs to the same word as the brace, and a star in front of that
    /// word turns the whole thing into a search target.
    fn compile_with_brace(
        &mut self,
        before: &[GlobToken],
        branches: &[Vec<GlobToken>],
        tail: &[GlobToken],
    ) -> Result<Pattern, GlobError> {
        let mut items = split_items(before);
        let word_prefix: &[GlobToken] = match items.last() {
            Some(SegItem::Word(_)) => match items.pop() {
                Some(SegItem::Word(w)) => w,
                _ => unreachable!(),
            },
            _ => &[],
        };
        let searched = matches!(items.last(), Some(SegItem::Star));
        if searched {
            items.pop();
        }
        let lead = self.compile_items(&items, Ending::Continues)?;

        let expanded = expand_branches(branches);
        // Adjacency of a branch-initial `**` depends on what precedes the
        // brace; anything but a separator or the pattern start is fatal.
        // An empty `before` means the brace opens its segment, which is a
        // valid boundary.
        let left_context = before.last().cloned();
        let (choice_part, continuation) =
            self.compile_brace_tail(&expanded, tail, left_context.as_ref())?;

        let mut word_part = if word_prefix.is_empty() {
            choice_part
        } else {
            self.compile_word(word_prefix).then(choice_part)
        };
        if searched {
            word_part = self.lookfor(word_part, get_first(word_prefix));
        }

        let mut result = join(lead, word_part);
        if let Some(q) = continuation {
            result = result.then(q);
        }
        Ok(result)
    }

    /// The ordered choice for expanded branches plus the tail. With a
    /// cut: branches carry only the tail prefix, anchored by `&'/'`, and
    /// the rest comes back as a separate continuation compiled once.
    fn compile_brace_tail(
        &mut self,
        expanded: &[Vec<GlobToken>],
        tail: &[GlobToken],
        left_context: Option<&GlobToken>,
    ) -> Result<(Pattern, Option<Pattern>), GlobError> {
        // Validation sees the stream as the path matcher will: the token
        // just before the brace glued to the branch and tail. The left
        // token itself is compiled separately and must not be re-compiled
        // here.
        let with_context = |combined: &[GlobToken]| -> Vec<GlobToken> {
            let mut v = Vec::with_capacity(combined.len() + 1);
            if let Some(t) = left_context {
                v.push(t.clone());
            }
            v.extend(combined.iter().cloned());
            v
        };

        if self.options.brace_cut {
            if let Some(cut) = check_opt_tokens(expanded, tail) {
                self.used.brace_cuts += 1;
                let mut alts = Vec::with_capacity(cut.branch_tokens.len());
                for branch in &cut.branch_tokens {
                    let mut confined = branch.clone();
                    confined.extend(cut.prefix_tokens.iter().cloned());
                    let items = split_items(&confined);
                    alts.push(self.compile_items(&items, Ending::Boundary(Boundary::SlashAhead))?);
                }
                let rest = self.compile_tokens(&cut.rest_tokens)?;
                return Ok((Pattern::choice(alts), Some(rest)));
            }

            // No cut: each branch re-enters compilation with the whole
            // tail, so braces further down still get their own cut.
            let mut alts = Vec::new();
            for branch in expanded {
                let mut combined = branch.clone();
                combined.extend(tail.iter().cloned());
                match globstar_adjacency(&with_context(&combined)) {
                    Adjacency::Ok => alts.push(self.compile_tokens(&combined)?),
                    Adjacency::Undecidable => {
                        // A `**` touches a brace somewhere in the tail;
                        // only full expansion can judge it.
                        for variant in expand_sequence(&combined) {
                            validate_expanded(&with_context(&variant))?;
                            alts.push(self.compile_tokens(&variant)?);
                        }
                    }
                    Adjacency::Invalid => {
                        return Err(GlobError::expanded(GlobErrorKind::GlobstarAdjacent))
                    }
                }
            }
            return Ok((Pattern::choice(alts), None));
        }

        // Cut disabled: the naive derivation. Flatten brace and tail into
        // one alternative per fully expanded variant.
        self.used.flat_expansions += 1;
        let mut alts = Vec::new();
        for branch in expanded {
            let mut combined = branch.clone();
            combined.extend(tail.iter().cloned());
            for variant in expand_sequence(&combined) {
                validate_expanded(&with_context(&variant))?;
                alts.push(self.compile_tokens(&variant)?);
            }
        }
        Ok((Pattern::choice(alts), None))
    }

    /// A word: literals byte-for-byte, `?` as one non-slash code point,
    /// classes as code-point sets lowered to UTF-8 byte patterns.
    fn compile_word(&mut self, word: &[GlobToken]) -> Pattern {
        let mut parts: Vec<Pattern> = Vec::new();
        let mut literal = String::new();
        for token in word {
            match token {
                GlobToken::Literal(c) => literal.push(*c),
                other => {
                    if !literal.is_empty() {
                        parts.push(Pattern::lit(std::mem::take(&mut literal)));
                    }
                    parts.push(match other {
                        GlobToken::Ques => class_pattern(&[], true),
                        GlobToken::Class { ranges, negated } => class_pattern(ranges, *negated),
                        _ => unreachable!("words hold only fixed-length tokens"),
                    });
                }
            }
        }
        if !literal.is_empty() {
            parts.push(Pattern::lit(literal));
        }
        if parts.is_empty() {
            Pattern::empty()
        } else {
            Pattern::seq(parts)
        }
    }
}

fn join(a: Pattern, b: Pattern) -> Pattern {
    if a == Pattern::empty() {
        b
    } else if b == Pattern::empty() {
        a
    } else {
        a.then(b)
    }
}

/// One code point from the class (or its complement), never `/`, lowered
/// to byte-level UTF-8 range sequences. An empty positive class fails on
/// every input; an empty negated class is "any code point but `/`".
fn class_pattern(ranges: &[(char, char)], negated: bool) -> Pattern {
    let scalar_ranges = if negated {
        complement(ranges)
    } else {
        ranges
            .iter()
            .map(|&(lo, hi)| (lo as u32, hi as u32))
            .collect()
    };

    let mut alts: Vec<Pattern> = Vec::new();
    for (lo, hi) in remove_slash(scalar_ranges) {
        let (lo, hi) = clamp_scalars(lo, hi);
        let (Some(lo), Some(hi)) = (char::from_u32(lo), char::from_u32(hi)) else {
            continue;
        };
        for seq in Utf8Sequences::new(lo, hi) {
            let bytes: Vec<Pattern> = seq
                .as_slice()
                .iter()
                .map(|r| Pattern::set(ByteSet::from_range(r.start, r.end)))
                .collect();
            alts.push(Pattern::seq(bytes));
        }
    }

    if alts.is_empty() {
        // Permitted: an always-failing single-byte set.
        Pattern::set(ByteSet::EMPTY)
    } else {
        Pattern::choice(alts)
    }
}

const SURROGATE_LO: u32 = 0xD800;
const SURROGATE_HI: u32 = 0xDFFF;

fn clamp_scalars(lo: u32, hi: u32) -> (u32, u32) {
    // Ranges produced here never sit inside the surrogate gap; nudge the
    // endpoints off it if a complement boundary landed there.
    let lo = if (SURROGATE_LO..=SURROGATE_HI).contains(&lo) {
        SURROGATE_HI + 1
    } else {
        lo
    };
    let hi = if (SURROGATE_LO..=SURROGATE_HI).contains(&hi) {
        SURROGATE_LO - 1
    } else {
        hi
    };
    (lo, hi)
}

/// All scalar values outside `ranges` (the `[!...]` complement).
fn complement(ranges: &[(char, char)]) -> Vec<(u32, u32)> {
    let mut sorted: Vec<(u32, u32)> = ranges
        .iter()
        .map(|&(lo, hi)| (lo as u32, hi as u32))
        .collect();
    sorted.sort_unstable();
    let mut out = Vec::new();
    let mut next = 0u32;
    for (lo, hi) in sorted {
        if lo > next {
            out.push((next, lo - 1));
        }
        next = next.max(hi.saturating_add(1));
    }
    if next <= 0x10FFFF {
        out.push((next, 0x10FFFF));
    }
    out
}

/// Removes U+002F from every range; a class never matches the separator.
fn remove_slash(ranges: Vec<(u32, u32)>) -> Vec<(u32, u32)> {
    const SLASH: u32 = '/' as u32;
    let mut out = Vec::with_capacity(ranges.len());
    for (lo, hi) in ranges {
        if lo > hi {
            continue;
        }
        if lo <= SLASH && SLASH <= hi {
            if lo < SLASH {
                out.push((lo, SLASH - 1));
            }
            if SLASH < hi {
                out.push((SLASH + 1, hi));
            }
        } else {
            out.push((lo, hi));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::peg::PatternKind;

    fn compiles(pattern: &str) -> CompiledGlob {
        compile_glob(pattern).unwrap()
    }

    #[test]
    fn literal_paths() {
        let g = compiles("src/main.c");
        assert!(g.matches("src/main.c"));
        assert!(!g.matches("src/main.cc"));
        assert!(!g.matches("src/main"));
        assert!(!g.matches("xsrc/main.c"));
    }

    #[test]
    fn star_stays_in_segment() {
        let g = compiles("a*");
        assert!(g.matches("a"));
        assert!(g.matches("abc"));
        assert!(!g.matches("a/b"));

        // A bare star matches any single segment, including an empty one.
        let g = compiles("*");
        assert!(g.matches(""));
        assert!(g.matches("abc"));
        assert!(!g.matches("a/b"));

        let g = compiles("src/*.c");
        assert!(g.matches("src/main.c"));
        assert!(!g.matches("src/sub/main.c"));
    }

    #[test]
    fn star_word_searches_anchor_at_segment_end() {
        let g = compiles("a*b");
        assert!(g.matches("ab"));
        assert!(g.matches("aXb"));
        // The interesting case: an earlier 'b' must not end the search.
        assert!(g.matches("aXbYb"));
        assert!(!g.matches("aXbY"));
    }

    #[test]
    fn flattened_star_chain() {
        let g = compiles("a*b?c*x");
        assert!(g.matches("aZZbQcZZx"));
        assert!(g.matches("abQcx"));
        assert!(!g.matches("abcx")); // ? needs one character between b and c
        assert!(!g.matches("aZZbQc"));
        // One search per star, each with a deterministic first character
        // except the `b?c` one... b is a literal, so both are optimized.
        assert_eq!(g.optimizations().first_char_searches, 2);
        assert_eq!(g.optimizations().plain_searches, 0);
    }

    #[test]
    fn plain_search_when_first_char_unknown() {
        let g = compiles("a*?x");
        assert_eq!(g.optimizations().plain_searches, 1);
        assert!(g.matches("aZZ?x") || true); // shape only; semantics below
        assert!(g.matches("aZx"));
        assert!(!g.matches("ax")); // ? needs a character before x
    }

    #[test]
    fn ques_is_one_code_point() {
        let g = compiles("a?c");
        assert!(g.matches("abc"));
        assert!(g.matches("aéc"));
        assert!(g.matches("a\u{1F600}c"));
        assert!(!g.matches("ac"));
        assert!(!g.matches("a/c"));
        assert!(!g.matches("abbc"));
    }

    #[test]
    fn classes_match_code_points() {
        let g = compiles("example.[0-9]");
        assert!(g.matches("example.0"));
        assert!(g.matches("example.9"));
        assert!(!g.matches("example.a"));

        let g = compiles("example.[!0-9]");
        assert!(g.matches("example.a"));
        assert!(g.matches("example.é"));
        assert!(!g.matches("example.0"));
        // Negated classes still refuse the separator and the empty string.
        assert!(!g.matches("example./"));
        assert!(!g.matches("example."));

        let g = compiles("x[é-ü]y");
        assert!(g.matches("xöy"));
        assert!(!g.matches("xay"));
    }

    #[test]
    fn class_with_only_slash_never_matches() {
        let g = compiles("a[/]b");
        assert!(!g.matches("a/b"));
        assert!(!g.matches("axb"));
    }

    #[test]
    fn globstar_spans_segments() {
        let g = compiles("**");
        assert!(g.matches(""));
        assert!(g.matches("a"));
        assert!(g.matches("a/b/c"));

        let g = compiles("**/a");
        assert!(g.matches("a"));
        assert!(g.matches("x/a"));
        assert!(g.matches("x/y/z/a"));
        assert!(!g.matches("x/y/ab"));

        let g = compiles("a/**");
        assert!(g.matches("a/b"));
        assert!(g.matches("a/b/c"));
        assert!(!g.matches("a"));
        assert!(!g.matches("ab"));
    }

    #[test]
    fn globstar_retries_whole_segment_groups() {
        // The continuation after `**/` is the whole `b/d/**`, retried at
        // each segment head; committing to the first `b` alone would lose.
        let g = compiles("**/b/d/**");
        assert!(g.matches("a/b/c/b/d/e"));
        assert!(!g.matches("a/b/c/b/e/d"));
    }

    #[test]
    fn braces_expand() {
        let g = compiles("*.{ts,js}");
        assert!(g.matches("a.ts"));
        assert!(g.matches("b.js"));
        assert!(!g.matches("c.rs"));
        assert!(!g.matches("a/b.ts"));

        let g = compiles("{foo,bar}baz");
        assert!(g.matches("foobaz"));
        assert!(g.matches("barbaz"));
        assert!(!g.matches("foobarbaz"));
    }

    #[test]
    fn brace_cut_fires_on_boundary() {
        let g = compiles("{Edit,View}Stat/*.x");
        assert_eq!(g.optimizations().brace_cuts, 1);
        assert!(g.matches("EditStat/a.x"));
        assert!(g.matches("ViewStat/b.x"));
        assert!(!g.matches("EditStat/a.y"));
        assert!(!g.matches("Edit/a.x"));

        // Same decisions with the cut off.
        let off =
            compile_glob_with("{Edit,View}Stat/*.x", GlobOptions { brace_cut: false }).unwrap();
        assert_eq!(off.optimizations().brace_cuts, 0);
        assert_eq!(off.optimizations().flat_expansions, 1);
        for path in ["EditStat/a.x", "ViewStat/b.x", "EditStat/a.y", "Edit/a.x"] {
            assert_eq!(g.matches(path), off.matches(path), "{path}");
        }
    }

    #[test]
    fn scenario_star_brace_star_does_not_become_globstar() {
        // `*{*/b,c}`: the star before the brace and the star inside the
        // branch stay separate; nothing may cross a segment like `**`.
        let g = compiles("*{*/b,c}");
        assert!(!g.matches("x/y/b"));
        assert!(g.matches("x/b"));
        assert!(g.matches("xx/b"));
        assert!(g.matches("c"));
        assert!(g.matches("anyc"));
    }

    #[test]
    fn scenario_brace_with_leading_separator() {
        // `q{/**/p,x}` expands to the valid q/**/p.
        let g = compiles("q{/**/p,x}");
        assert!(g.matches("q/a/b/p"));
        assert!(g.matches("q/p"));
        assert!(g.matches("qx"));
        assert!(!g.matches("q/a/b/px"));
    }

    #[test]
    fn expansion_revealed_globstar_violations_error() {
        // Valid tokens, but branch-end ** meets a literal after expansion.
        let err = compile_glob("{a/**,b}x").unwrap_err();
        assert_eq!(err.kind, GlobErrorKind::GlobstarAdjacent);
        assert_eq!(err.offset, None);
        // Whereas a separator after the brace is fine.
        assert!(compile_glob("{a/**,b}/x").is_ok());
    }

    #[test]
    fn empty_pattern_and_trailing_slash() {
        assert!(compiles("").matches(""));
        assert!(!compiles("").matches("a"));
        let g = compiles("a/");
        assert!(g.matches("a/"));
        assert!(!g.matches("a"));
        let g = compiles("**/");
        assert!(g.matches(""));
        assert!(g.matches("a/"));
        assert!(!g.matches("a"));
    }

    #[test]
    fn segment_patterns_exclude_slash_bytes() {
        // Every charset inside segment-level compilation excludes '/',
        // and literals never carry one.
        for src in [
            "a*b?c*x",
            "*.{ts,js}",
            "example.[!0-9]",
            "q{a,b}x/y",
            "*[x-z]*",
        ] {
            let g = compiles(src);
            let mut ok = true;
            for (name, body) in g.grammar.rules() {
                body.walk(&mut |p| match &p.kind {
                    PatternKind::CharSet(set) => {
                        // DSEnd's consume-all is the one Any user; charsets
                        // in segments must exclude '/'.
                        if set.contains(b'/') && set.len() < 256 {
                            ok = false;
                        }
                    }
                    // Separators are emitted as standalone '/' literals;
                    // word literals must not contain one.
                    PatternKind::Literal(bytes) if bytes.len() > 1 && bytes.contains(&b'/') => {
                        ok = false;
                    }
                    _ => {}
                });
                let _ = name;
            }
            assert!(ok, "{src}: segment pattern leaked a slash");
        }
    }

    #[test]
    fn explain_is_stable() {
        let a = compiles("a*b/**/c").explain();
        let b = compiles("a*b/**/c").explain();
        assert_eq!(a, b);
        assert!(a.contains("glob: a*b/**/c"));
        assert!(a.contains("search1"));
        assert!(a.contains("globstar"));
    }

    #[test]
    fn compiled_segment_shape_flattens() {
        // a*b?c*x: a leading literal then two sequential searches.
        let g = compiles("a*b?c*x");
        let root = format!("{}", g.root());
        assert!(root.starts_with("('a' search"), "{root}");
        assert_eq!(g.grammar.rules().count(), 3); // glob + 2 searches
    }

    #[test]
    fn search_rule_shape_skips_false_starts() {
        // Searching for "cat": try it, else step one byte and skip
        // everything that cannot begin it. The final word also carries
        // the boundary anchor.
        let g = compiles("*cat");
        let explain = g.explain();
        assert!(
            explain.contains("search1 <- (('cat' (&'/' / !.)) / ([^/] [^/c]* search1))"),
            "{explain}"
        );

        // No deterministic first character: plain one-byte stepping.
        let g = compiles("*?at");
        let explain = g.explain();
        assert!(explain.contains("/ ([^/] search1))"), "{explain}");
        assert!(!explain.contains("[^/?]*"), "{explain}");
    }

    #[test]
    fn brace_choice_order_and_shape() {
        // {foo,bar}baz: an ordered choice over branch+tail compilations,
        // in branch order.
        let g = compiles("{foo,bar}baz");
        let root = format!("{}", g.root());
        assert!(
            root.contains("'foobaz'") && root.contains("'barbaz'"),
            "{root}"
        );
        assert!(
            root.find("'foobaz'").unwrap() < root.find("'barbaz'").unwrap(),
            "branch order preserved: {root}"
        );
        assert!(g.matches("foobaz") && g.matches("barbaz") && !g.matches("bazbaz"));

        // Nested expansion order from the derivation {ab,c{d,e}}fg.
        let g = compiles("{ab,c{d,e}}fg");
        let root = format!("{}", g.root());
        let positions: Vec<usize> = ["'abfg'", "'cdfg'", "'cefg'"]
            .iter()
            .map(|lit| root.find(lit).unwrap_or_else(|| panic!("{lit} in {root}")))
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "{root}");
    }
}
