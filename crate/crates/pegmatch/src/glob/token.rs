//! Glob pattern tokenizer.
//!
//! The dialect is the LSP 3.17 one, pinned down strictly: `*` and `?`
//! stay inside a path segment, `**` matches whole segments and must be
//! delimited by `/` or the pattern boundaries, `[...]`/`[!...]` are
//! code-point classes that never match `/`, braces hold two or more
//! comma-separated branches, and `\x` escapes any character. Unmatched
//! `{`, unclosed `[`, empty or single-branch braces, and misplaced `**`
//! are errors rather than literals.

use std::fmt;

/// One lexical element of a glob pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GlobToken {
    /// A concrete code point (escapes already resolved).
    Literal(char),
    /// `?`: one code point within a segment.
    Ques,
    /// `[...]` or `[!...]`: one code point from (or outside) the ranges.
    Class {
        ranges: Vec<(char, char)>,
        negated: bool,
    },
    /// `*`: zero or more code points within a segment.
    Star,
    /// `**`: zero or more whole segments.
    GlobStar,
    /// `{a,b,...}`: ordered branches, each a token sequence.
    Brace(Vec<Vec<GlobToken>>),
    /// `/`.
    Separator,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlobErrorKind {
    /// `\` at the end of the pattern.
    DanglingEscape,
    /// `[` without a closing `]`.
    UnclosedClass,
    /// `[]` or `[!]`: a class needs at least one member.
    EmptyClass,
    /// `[z-a]`: range ends before it starts.
    InvalidClassRange,
    /// `{` without a closing `}`.
    UnclosedBrace,
    /// `{}` or `{a}`: braces need at least two branches.
    NotEnoughBranches,
    /// `**` adjacent to something other than `/` or a boundary
    /// (directly, or after brace expansion).
    GlobstarAdjacent,
}

impl fmt::Display for GlobErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            GlobErrorKind::DanglingEscape => "escape at end of pattern",
            GlobErrorKind::UnclosedClass => "unclosed character class",
            GlobErrorKind::EmptyClass => "empty character class",
            GlobErrorKind::InvalidClassRange => "character range out of order",
            GlobErrorKind::UnclosedBrace => "unclosed brace",
            GlobErrorKind::NotEnoughBranches => "braces need at least two branches",
            GlobErrorKind::GlobstarAdjacent => "** must be delimited by / or pattern boundaries",
        };
        f.write_str(msg)
    }
}

/// An invalid glob pattern. `offset` is the byte offset of the offending
/// construct when it is visible in the source text; violations that only
/// appear after brace expansion carry no offset.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct GlobError {
    pub kind: GlobErrorKind,
    pub offset: Option<usize>,
}

impl fmt::Display for GlobError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.offset {
            Some(o) => write!(f, "invalid glob at byte {o}: {}", self.kind),
            None => write!(f, "invalid glob (after brace expansion): {}", self.kind),
        }
    }
}

impl GlobError {
    fn at(kind: GlobErrorKind, offset: usize) -> GlobError {
        GlobError {
            kind,
            offset: Some(offset),
        }
    }

    pub(crate) fn expanded(kind: GlobErrorKind) -> GlobError {
        GlobError { kind, offset: None }
    }
}

struct Lexer {
    chars: Vec<(usize, char)>,
    pos: usize,
    src_len: usize,
}

impl Lexer {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|&(o, _)| o)
            .unwrap_or(self.src_len)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn eat(&mut self, want: char) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
}

/// Tokenizes a glob pattern, enforcing the structural constraints that
/// are visible without brace expansion.
pub fn tokenize_glob(pattern: &str) -> Result<Vec<GlobToken>, GlobError> {
    let mut lexer = Lexer {
        chars: pattern.char_indices().collect(),
        pos: 0,
        src_len: pattern.len(),
    };
    let tokens = parse_sequence(&mut lexer, false)?;
    debug_assert_eq!(lexer.pos, lexer.chars.len());
    Ok(tokens)
}

/// Parses tokens until end of input, or until `,`/`}` when inside a brace
/// (which are left unconsumed).
fn parse_sequence(lexer: &mut Lexer, in_brace: bool) -> Result<Vec<GlobToken>, GlobError> {
    let mut tokens: Vec<GlobToken> = Vec::new();
    // Offset of a `**` that still needs a `/` (or boundary) after it.
    let mut open_globstar: Option<usize> = None;

    loop {
        let offset = lexer.offset();
        let c = match lexer.peek() {
            None => break,
            Some(c) if in_brace && (c == ',' || c == '}') => break,
            Some(c) => c,
        };

        let token = match c {
            '\\' => {
                lexer.bump();
                match lexer.bump() {
                    // An escaped slash is still a path separator; a
                    // segment pattern cannot match one anyway.
                    Some('/') => GlobToken::Separator,
                    Some(c) => GlobToken::Literal(c),
                    None => return Err(GlobError::at(GlobErrorKind::DanglingEscape, offset)),
                }
            }
            '/' => {
                lexer.bump();
                GlobToken::Separator
            }
            '?' => {
                lexer.bump();
                GlobToken::Ques
            }
            '*' => {
                let mut run = 0;
                while lexer.eat('*') {
                    run += 1;
                }
                match run {
                    1 => GlobToken::Star,
                    2 => {
                        match tokens.last() {
                            None | Some(GlobToken::Separator) => {}
                            _ => {
                                return Err(GlobError::at(GlobErrorKind::GlobstarAdjacent, offset))
                            }
                        }
                        open_globstar = Some(offset);
                        tokens.push(GlobToken::GlobStar);
                        continue;
                    }
                    _ => return Err(GlobError::at(GlobErrorKind::GlobstarAdjacent, offset)),
                }
            }
            '[' => parse_class(lexer)?,
            '{' => parse_brace(lexer)?,
            // A stray `}` or a comma outside braces is a literal.
            other => {
                lexer.bump();
                GlobToken::Literal(other)
            }
        };

        if let Some(gs_offset) = open_globstar.take() {
            if !matches!(token, GlobToken::Separator) {
                return Err(GlobError::at(GlobErrorKind::GlobstarAdjacent, gs_offset));
            }
        }
        tokens.push(token);
    }

    Ok(tokens)
}

fn parse_class(lexer: &mut Lexer) -> Result<GlobToken, GlobError> {
    let open = lexer.offset();
    lexer.bump(); // '['
    let negated = lexer.eat('!');

    let mut ranges: Vec<(char, char)> = Vec::new();
    loop {
        let offset = lexer.offset();
        let lo = match lexer.bump() {
            None => return Err(GlobError::at(GlobErrorKind::UnclosedClass, open)),
            Some(']') => {
                if ranges.is_empty() {
                    return Err(GlobError::at(GlobErrorKind::EmptyClass, open));
                }
                break;
            }
            Some('\\') => match lexer.bump() {
                Some(c) => c,
                None => return Err(GlobError::at(GlobErrorKind::UnclosedClass, open)),
            },
            Some(c) => c,
        };

        // `a-z` forms a range unless the `-` is the last member.
        if lexer.peek() == Some('-') {
            let dash_pos = lexer.pos;
            lexer.bump();
            match lexer.peek() {
                Some(']') | None => {
                    // Trailing dash is a literal member; rewind.
                    lexer.pos = dash_pos;
                    ranges.push((lo, lo));
                }
                Some(_) => {
                    let hi = match lexer.bump() {
                        Some('\\') => match lexer.bump() {
                            Some(c) => c,
                            None => return Err(GlobError::at(GlobErrorKind::UnclosedClass, open)),
                        },
                        Some(c) => c,
                        None => unreachable!(),
                    };
                    if hi < lo {
                        return Err(GlobError::at(GlobErrorKind::InvalidClassRange, offset));
                    }
                    ranges.push((lo, hi));
                }
            }
        } else {
            ranges.push((lo, lo));
        }
    }

    Ok(GlobToken::Class { ranges, negated })
}

fn parse_brace(lexer: &mut Lexer) -> Result<GlobToken, GlobError> {
    let open = lexer.offset();
    lexer.bump(); // '{'

    let mut branches: Vec<Vec<GlobToken>> = Vec::new();
    loop {
        let branch = parse_sequence(lexer, true)?;
        branches.push(branch);
        match lexer.bump() {
            Some(',') => continue,
            Some('}') => break,
            _ => return Err(GlobError::at(GlobErrorKind::UnclosedBrace, open)),
        }
    }

    if branches.len() < 2 {
        return Err(GlobError::at(GlobErrorKind::NotEnoughBranches, open));
    }
    Ok(GlobToken::Brace(branches))
}

/// Renders tokens back to glob text, escaping wherever a character would
/// otherwise read as syntax. Adjacent stars (which brace expansion can
/// produce, and which mean the same as one star) collapse to a single
/// `*` so the text never reads as a globstar.
pub(crate) fn render_tokens(tokens: &[GlobToken]) -> String {
    let mut out = String::new();
    let mut prev_star = false;
    for t in tokens {
        let is_star = matches!(t, GlobToken::Star);
        if !(is_star && prev_star) {
            render_token(t, &mut out);
        }
        prev_star = is_star;
    }
    out
}

fn render_token(token: &GlobToken, out: &mut String) {
    match token {
        GlobToken::Literal(c) => {
            if matches!(c, '*' | '?' | '[' | ']' | '{' | '}' | ',' | '\\') {
                out.push('\\');
            }
            out.push(*c);
        }
        GlobToken::Ques => out.push('?'),
        GlobToken::Star => out.push('*'),
        GlobToken::GlobStar => out.push_str("**"),
        GlobToken::Separator => out.push('/'),
        GlobToken::Class { ranges, negated } => {
            out.push('[');
            if *negated {
                out.push('!');
            }
            for (lo, hi) in ranges {
                render_class_char(*lo, out);
                if hi != lo {
                    out.push('-');
                    render_class_char(*hi, out);
                }
            }
            out.push(']');
        }
        GlobToken::Brace(branches) => {
            out.push('{');
            for (i, b) in branches.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&render_tokens(b));
            }
            out.push('}');
        }
    }
}

fn render_class_char(c: char, out: &mut String) {
    if matches!(c, ']' | '\\' | '-' | '!') {
        out.push('\\');
    }
    out.push(c);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(c: char) -> GlobToken {
        GlobToken::Literal(c)
    }

    #[test]
    fn literals_and_class() {
        // example.[0-9]
        let tokens = tokenize_glob("example.[0-9]").unwrap();
        let mut expect: Vec<GlobToken> = "example.".chars().map(lit).collect();
        expect.push(GlobToken::Class {
            ranges: vec![('0', '9')],
            negated: false,
        });
        assert_eq!(tokens, expect);
    }

    #[test]
    fn negated_class() {
        let tokens = tokenize_glob("[!a-z_]").unwrap();
        assert_eq!(
            tokens,
            vec![GlobToken::Class {
                ranges: vec![('a', 'z'), ('_', '_')],
                negated: true,
            }]
        );
    }

    #[test]
    fn globstar_positions() {
        assert_eq!(
            tokenize_glob("**/p").unwrap(),
            vec![
                GlobToken::GlobStar,
                GlobToken::Separator,
                GlobToken::Literal('p')
            ]
        );
        assert!(tokenize_glob("**").is_ok());
        assert!(tokenize_glob("a/**").is_ok());
        assert!(tokenize_glob("a/**/b").is_ok());

        for bad in ["a**", "**a", "**{a,b}", "a**/b", "***", "a{b,c}**"] {
            let err = tokenize_glob(bad).unwrap_err();
            assert_eq!(err.kind, GlobErrorKind::GlobstarAdjacent, "{bad}");
            assert!(err.offset.is_some());
        }
    }

    #[test]
    fn globstar_inside_branches() {
        // Scenario-4 shape: delimited within its branch.
        let tokens = tokenize_glob("q{/**/p,x}").unwrap();
        match &tokens[1] {
            GlobToken::Brace(branches) => {
                assert_eq!(
                    branches[0],
                    vec![
                        GlobToken::Separator,
                        GlobToken::GlobStar,
                        GlobToken::Separator,
                        lit('p')
                    ]
                );
                assert_eq!(branches[1], vec![lit('x')]);
            }
            other => panic!("expected brace, got {other:?}"),
        }
        // Scenario 2/3 shapes are cut off at tokenize time.
        assert!(tokenize_glob("a**{*p,q}").is_err());
        assert!(tokenize_glob("x**{**/p,q}").is_err());
    }

    #[test]
    fn escapes() {
        assert_eq!(tokenize_glob(r"\*x").unwrap(), vec![lit('*'), lit('x')]);
        assert_eq!(
            tokenize_glob(r"a\{b").unwrap(),
            vec![lit('a'), lit('{'), lit('b')]
        );
        assert_eq!(
            tokenize_glob(r"a\/b").unwrap(),
            vec![lit('a'), GlobToken::Separator, lit('b')]
        );
        assert_eq!(tokenize_glob(r"\\").unwrap(), vec![lit('\\')]);
        assert_eq!(
            tokenize_glob("\\").unwrap_err().kind,
            GlobErrorKind::DanglingEscape
        );
    }

    #[test]
    fn braces() {
        let tokens = tokenize_glob("{ab,c{d,e}}").unwrap();
        match &tokens[0] {
            GlobToken::Brace(branches) => {
                assert_eq!(branches.len(), 2);
                assert_eq!(branches[0], vec![lit('a'), lit('b')]);
            }
            other => panic!("expected brace, got {other:?}"),
        }
        // Empty branch is allowed; empty or single-branch braces are not.
        assert!(tokenize_glob("{a,}").is_ok());
        assert!(tokenize_glob("{,}").is_ok());
        assert_eq!(
            tokenize_glob("{a}").unwrap_err().kind,
            GlobErrorKind::NotEnoughBranches
        );
        assert_eq!(
            tokenize_glob("{}").unwrap_err().kind,
            GlobErrorKind::NotEnoughBranches
        );
        assert_eq!(
            tokenize_glob("{a,b").unwrap_err().kind,
            GlobErrorKind::UnclosedBrace
        );
    }

    #[test]
    fn commas_and_stray_closers_are_literals() {
        assert_eq!(
            tokenize_glob("a,b").unwrap(),
            vec![lit('a'), lit(','), lit('b')]
        );
        assert_eq!(
            tokenize_glob("a}b").unwrap(),
            vec![lit('a'), lit('}'), lit('b')]
        );
    }

    #[test]
    fn class_errors() {
        assert_eq!(
            tokenize_glob("[abc").unwrap_err().kind,
            GlobErrorKind::UnclosedClass
        );
        assert_eq!(
            tokenize_glob("[]").unwrap_err().kind,
            GlobErrorKind::EmptyClass
        );
        assert_eq!(
            tokenize_glob("[z-a]").unwrap_err().kind,
            GlobErrorKind::InvalidClassRange
        );
        // Trailing dash is a literal member.
        assert_eq!(
            tokenize_glob("[a-]").unwrap(),
            vec![GlobToken::Class {
                ranges: vec![('a', 'a'), ('-', '-')],
                negated: false,
            }]
        );
        // Escaped ']' inside a class.
        assert_eq!(
            tokenize_glob(r"[\]]").unwrap(),
            vec![GlobToken::Class {
                ranges: vec![(']', ']')],
                negated: false,
            }]
        );
    }

    #[test]
    fn render_round_trips() {
        for src in [
            "a*b?c*x",
            "**/p",
            "{ab,c{d,e}}fg",
            "example.[!0-9]",
            r"\*x\,y",
            "src/**/*.{ts,js}",
            "[a-c_]",
        ] {
            let tokens = tokenize_glob(src).unwrap();
            let rendered = render_tokens(&tokens);
            assert_eq!(
                tokenize_glob(&rendered).unwrap(),
                tokens,
                "{src} -> {rendered}"
            );
        }
    }
}
