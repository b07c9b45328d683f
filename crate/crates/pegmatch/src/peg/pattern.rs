//! Pattern AST: the expressions the engine compiles and matches.
//!
//! Patterns are plain data. They match bytes, not code points; front-ends
//! that need UTF-8 awareness build it out of byte patterns. Repetition is
//! possessive (standard PEG): once a repetition consumes input it never
//! gives any back.

use std::fmt;
use std::sync::Arc;

use crate::peg::capture::CaptureKind;

/// A set of byte values, represented as a 256-bit table.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct ByteSet {
    bits: [u64; 4],
}

impl ByteSet {
    pub const EMPTY: ByteSet = ByteSet { bits: [0; 4] };
    pub const ALL: ByteSet = ByteSet {
        bits: [u64::MAX; 4],
    };

    pub fn new() -> ByteSet {
        ByteSet::EMPTY
    }

    pub fn from_bytes(bytes: &[u8]) -> ByteSet {
        let mut s = ByteSet::new();
        for &b in bytes {
            s.insert(b);
        }
        s
    }

    /// Inclusive range of byte values.
    pub fn from_range(lo: u8, hi: u8) -> ByteSet {
        let mut s = ByteSet::new();
        let mut b = lo;
        while b <= hi {
            s.insert(b);
            if b == hi {
                break;
            }
            b += 1;
        }
        s
    }

    pub fn insert(&mut self, b: u8) {
        self.bits[(b >> 6) as usize] |= 1 << (b & 63);
    }

    pub fn remove(&mut self, b: u8) {
        self.bits[(b >> 6) as usize] &= !(1 << (b & 63));
    }

    pub fn contains(&self, b: u8) -> bool {
        self.bits[(b >> 6) as usize] & (1 << (b & 63)) != 0
    }

    pub fn union(&self, other: &ByteSet) -> ByteSet {
        let mut bits = self.bits;
        for (word, o) in bits.iter_mut().zip(other.bits) {
            *word |= o;
        }
        ByteSet { bits }
    }

    pub fn intersect(&self, other: &ByteSet) -> ByteSet {
        let mut bits = self.bits;
        for (word, o) in bits.iter_mut().zip(other.bits) {
            *word &= o;
        }
        ByteSet { bits }
    }

    pub fn complement(&self) -> ByteSet {
        let mut bits = self.bits;
        for b in bits.iter_mut() {
            *b = !*b;
        }
        ByteSet { bits }
    }

    pub fn is_empty(&self) -> bool {
        self.bits == [0; 4]
    }

    pub fn is_disjoint(&self, other: &ByteSet) -> bool {
        self.intersect(other).is_empty()
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0u16..=255).map(|b| b as u8).filter(|&b| self.contains(b))
    }
}

impl Default for ByteSet {
    fn default() -> Self {
        ByteSet::new()
    }
}

impl fmt::Debug for ByteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ByteSet({})", render_set(self))
    }
}

/// The shape of a pattern expression.
#[derive(Clone, Debug, PartialEq)]
pub enum PatternKind {
    /// Match a fixed byte string. Empty literals match without consuming.
    Literal(Arc<[u8]>),
    /// Match one byte in the set. Empty sets always fail.
    CharSet(ByteSet),
    /// Consume exactly `n` bytes, whatever they are.
    Any(usize),
    /// Match children in order; all must succeed.
    Sequence(Vec<Pattern>),
    /// Ordered choice: commit to the first child that succeeds.
    OrderedChoice(Vec<Pattern>),
    /// Greedy, possessive repetition: at least `n` occurrences.
    RepeatAtLeast(Box<Pattern>, usize),
    /// Greedy, possessive repetition: at most `n` occurrences.
    RepeatAtMost(Box<Pattern>, usize),
    /// Succeed iff the child matches here; consumes nothing.
    AndPredicate(Box<Pattern>),
    /// Succeed iff the child does not match here; consumes nothing.
    NotPredicate(Box<Pattern>),
    /// Invoke a named grammar rule.
    RuleRef(String),
    /// Attach capture semantics to the child pattern.
    Capture(CaptureKind, Box<Pattern>),
}

/// A PEG expression. Construct with the combinator methods below.
#[derive(Clone, Debug, PartialEq)]
pub struct Pattern {
    pub kind: PatternKind,
}

impl Pattern {
    fn new(kind: PatternKind) -> Pattern {
        Pattern { kind }
    }

    /// Literal byte string.
    pub fn lit(s: impl AsRef<[u8]>) -> Pattern {
        Pattern::new(PatternKind::Literal(s.as_ref().into()))
    }

    /// One byte from the set.
    pub fn set(s: ByteSet) -> Pattern {
        Pattern::new(PatternKind::CharSet(s))
    }

    /// One byte in the inclusive range.
    pub fn range(lo: u8, hi: u8) -> Pattern {
        Pattern::set(ByteSet::from_range(lo, hi))
    }

    /// One byte out of the listed values.
    pub fn one_of(bytes: impl AsRef<[u8]>) -> Pattern {
        Pattern::set(ByteSet::from_bytes(bytes.as_ref()))
    }

    /// One byte not among the listed values.
    pub fn none_of(bytes: impl AsRef<[u8]>) -> Pattern {
        Pattern::set(ByteSet::from_bytes(bytes.as_ref()).complement())
    }

    /// Exactly `n` arbitrary bytes. `any(1)` is PEG's `.`.
    pub fn any(n: usize) -> Pattern {
        Pattern::new(PatternKind::Any(n))
    }

    /// The empty pattern: matches everywhere, consumes nothing.
    pub fn empty() -> Pattern {
        Pattern::lit("")
    }

    pub fn seq(children: Vec<Pattern>) -> Pattern {
        assert!(!children.is_empty(), "sequence needs at least one child");
        if children.len() == 1 {
            children.into_iter().next().unwrap()
        } else {
            Pattern::new(PatternKind::Sequence(children))
        }
    }

    pub fn choice(children: Vec<Pattern>) -> Pattern {
        assert!(!children.is_empty(), "choice needs at least one child");
        if children.len() == 1 {
            children.into_iter().next().unwrap()
        } else {
            Pattern::new(PatternKind::OrderedChoice(children))
        }
    }

    /// `p.then(q)` matches `p` followed by `q`.
    pub fn then(self, next: Pattern) -> Pattern {
        match self.kind {
            PatternKind::Sequence(mut children) => {
                children.push(next);
                Pattern::new(PatternKind::Sequence(children))
            }
            _ => Pattern::new(PatternKind::Sequence(vec![self, next])),
        }
    }

    /// `p.or(q)` tries `p`, then `q`.
    pub fn or(self, alt: Pattern) -> Pattern {
        match self.kind {
            PatternKind::OrderedChoice(mut children) => {
                children.push(alt);
                Pattern::new(PatternKind::OrderedChoice(children))
            }
            _ => Pattern::new(PatternKind::OrderedChoice(vec![self, alt])),
        }
    }

    /// At least `n` repetitions, greedy. `at_least(0)` is `p*`, `at_least(1)` is `p+`.
    pub fn at_least(self, n: usize) -> Pattern {
        Pattern::new(PatternKind::RepeatAtLeast(Box::new(self), n))
    }

    /// At most `n` repetitions, greedy. `at_most(1)` is `p?`.
    pub fn at_most(self, n: usize) -> Pattern {
        Pattern::new(PatternKind::RepeatAtMost(Box::new(self), n))
    }

    pub fn star(self) -> Pattern {
        self.at_least(0)
    }

    pub fn plus(self) -> Pattern {
        self.at_least(1)
    }

    pub fn opt(self) -> Pattern {
        self.at_most(1)
    }

    /// `&p`: positive lookahead.
    pub fn and_pred(self) -> Pattern {
        Pattern::new(PatternKind::AndPredicate(Box::new(self)))
    }

    /// `!p`: negative lookahead.
    pub fn not_pred(self) -> Pattern {
        Pattern::new(PatternKind::NotPredicate(Box::new(self)))
    }

    /// `!.`: succeeds only at end of input.
    pub fn eof() -> Pattern {
        Pattern::any(1).not_pred()
    }

    /// Call the named grammar rule.
    pub fn call(name: impl Into<String>) -> Pattern {
        Pattern::new(PatternKind::RuleRef(name.into()))
    }

    pub fn capture(self, kind: CaptureKind) -> Pattern {
        Pattern::new(PatternKind::Capture(kind, Box::new(self)))
    }

    /// `{ p }`: captures the matched substring, then any inner values.
    pub fn simple(self) -> Pattern {
        self.capture(CaptureKind::Simple)
    }

    /// `{: p :}`: joins the child's values into a single list value.
    pub fn group(self) -> Pattern {
        self.capture(CaptureKind::Group(None))
    }

    /// `{:name: p :}`: records the child's value under `name` for callbacks;
    /// produces nothing itself.
    pub fn group_named(self, name: impl Into<String>) -> Pattern {
        self.capture(CaptureKind::Group(Some(name.into())))
    }

    /// `{| p |}`: collects the child's values into a list.
    pub fn table(self) -> Pattern {
        self.capture(CaptureKind::Table)
    }

    /// `p >> f`: folds the child's values left to right through the callback.
    pub fn fold(self, callback: impl Into<String>) -> Pattern {
        self.capture(CaptureKind::Fold(callback.into()))
    }

    /// `p -> f`: replaces the child's values with the callback's results.
    /// A child that produced no values passes the matched substring instead.
    pub fn apply(self, callback: impl Into<String>) -> Pattern {
        self.capture(CaptureKind::Function(callback.into()))
    }

    /// `p -> v`: produces the fixed value, discarding the child's values.
    pub fn constant(self, value: crate::peg::capture::CapturedValue) -> Pattern {
        self.capture(CaptureKind::Constant(value))
    }

    /// `p => f`: match-time capture; the callback steers the match.
    pub fn match_time(self, callback: impl Into<String>) -> Pattern {
        self.capture(CaptureKind::MatchTime(callback.into()))
    }

    /// `{~ p ~}`: substitution capture; see [`CaptureKind::Substitution`].
    pub fn subst(self) -> Pattern {
        self.capture(CaptureKind::Substitution)
    }

    /// Visit this pattern and all descendants, depth-first.
    pub fn walk<'a>(&'a self, visit: &mut dyn FnMut(&'a Pattern)) {
        visit(self);
        match &self.kind {
            PatternKind::Sequence(cs) | PatternKind::OrderedChoice(cs) => {
                for c in cs {
                    c.walk(visit);
                }
            }
            PatternKind::RepeatAtLeast(c, _)
            | PatternKind::RepeatAtMost(c, _)
            | PatternKind::AndPredicate(c)
            | PatternKind::NotPredicate(c)
            | PatternKind::Capture(_, c) => c.walk(visit),
            _ => {}
        }
    }
}

fn escape_byte(b: u8, out: &mut String) {
    match b {
        b'\n' => out.push_str("\\n"),
        b'\r' => out.push_str("\\r"),
        b'\t' => out.push_str("\\t"),
        b'\'' => out.push_str("\\'"),
        b'\\' => out.push_str("\\\\"),
        0x20..=0x7e => out.push(b as char),
        _ => out.push_str(&format!("\\x{b:02x}")),
    }
}

fn render_set(s: &ByteSet) -> String {
    // Render the complement when that is shorter to read.
    let (set, neg) = if s.len() > 128 {
        (s.complement(), true)
    } else {
        (*s, false)
    };
    let mut out = String::from("[");
    if neg {
        out.push('^');
    }
    let mut b = 0u16;
    while b <= 255 {
        let byte = b as u8;
        if set.contains(byte) {
            let mut hi = byte;
            while hi < 255 && set.contains(hi + 1) {
                hi += 1;
            }
            escape_byte(byte, &mut out);
            if hi > byte.saturating_add(1) {
                out.push('-');
                escape_byte(hi, &mut out);
            } else if hi == byte + 1 {
                escape_byte(hi, &mut out);
            }
            b = hi as u16 + 1;
        } else {
            b += 1;
        }
    }
    out.push(']');
    out
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PatternKind::Literal(s) => {
                let mut out = String::from("'");
                for &b in s.iter() {
                    escape_byte(b, &mut out);
                }
                out.push('\'');
                f.write_str(&out)
            }
            PatternKind::CharSet(s) => f.write_str(&render_set(s)),
            PatternKind::Any(n) => {
                if *n == 1 {
                    f.write_str(".")
                } else {
                    write!(f, ".^{n}")
                }
            }
            PatternKind::Sequence(cs) => {
                write!(f, "(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            PatternKind::OrderedChoice(cs) => {
                write!(f, "(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " / ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            PatternKind::RepeatAtLeast(c, 0) => write!(f, "{c}*"),
            PatternKind::RepeatAtLeast(c, 1) => write!(f, "{c}+"),
            PatternKind::RepeatAtLeast(c, n) => write!(f, "{c}^+{n}"),
            PatternKind::RepeatAtMost(c, 1) => write!(f, "{c}?"),
            PatternKind::RepeatAtMost(c, n) => write!(f, "{c}^-{n}"),
            PatternKind::AndPredicate(c) => write!(f, "&{c}"),
            PatternKind::NotPredicate(c) => write!(f, "!{c}"),
            PatternKind::RuleRef(name) => f.write_str(name),
            PatternKind::Capture(kind, c) => match kind {
                CaptureKind::Simple => write!(f, "{{ {c} }}"),
                CaptureKind::Group(None) => write!(f, "{{: {c} :}}"),
                CaptureKind::Group(Some(n)) => write!(f, "{{:{n}: {c} :}}"),
                CaptureKind::Table => write!(f, "{{| {c} |}}"),
                CaptureKind::Fold(cb) => write!(f, "({c} >> {cb})"),
                CaptureKind::Function(cb) => write!(f, "({c} -> {cb})"),
                CaptureKind::Constant(v) => write!(f, "({c} -> {v})"),
                CaptureKind::MatchTime(cb) => write!(f, "({c} => {cb})"),
                CaptureKind::Substitution => write!(f, "{{~ {c} ~}}"),
            },
        }
    }
}
