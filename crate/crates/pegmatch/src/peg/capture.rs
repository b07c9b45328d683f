//! Capture kinds, captured values, callbacks, and capture-log evaluation.
//!
//! Matching is two-phase: the engine records a log of capture events
//! (open/close/value entries) while it matches, and only after overall
//! success evaluates the log bottom-up into [`CapturedValue`]s. The one
//! exception is match-time captures, whose sub-log is evaluated immediately
//! during matching so the callback can steer the match.
//!
//! Evaluation is iterative (explicit frame stack) so deeply nested captures
//! never exhaust the native stack.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::peg::engine::EngineError;

/// What a capture node does with its child's match and values.
#[derive(Clone, Debug, PartialEq)]
pub enum CaptureKind {
    /// The matched substring, followed by any inner values.
    Simple,
    /// Anonymous group: joins inner values into one list value.
    /// Named group: exposes its value to callbacks under the name and
    /// produces nothing itself. Names must be non-empty.
    Group(Option<String>),
    /// Collects inner values into a list.
    Table,
    /// Left fold of the inner values through a binary callback.
    /// The child must produce at least one value; a single value is
    /// returned unchanged.
    Fold(String),
    /// Replaces the inner values with the callback's results. When the
    /// child produced no values, the callback receives the matched
    /// substring as its single argument.
    Function(String),
    /// Produces the given value, discarding inner values.
    Constant(CapturedValue),
    /// Calls the callback as soon as the child matches; the callback can
    /// fail the match, keep the position, or move it (see [`MatchTimeReply`]).
    MatchTime(String),
    /// The matched substring with each directly nested capture's span
    /// replaced by that capture's value, assembled in one output buffer.
    Substitution,
}

/// A semantic value produced by capture evaluation.
///
/// Text holds raw bytes: the engine matches bytes and front-ends decide
/// what encoding to impose.
#[derive(Clone, Debug, PartialEq)]
pub enum CapturedValue {
    Text(Vec<u8>),
    Number(f64),
    Bool(bool),
    Null,
    List(Vec<CapturedValue>),
    Map(IndexMap<Vec<u8>, CapturedValue>),
}

impl CapturedValue {
    pub fn text(s: impl AsRef<[u8]>) -> CapturedValue {
        CapturedValue::Text(s.as_ref().to_vec())
    }

    pub fn as_text(&self) -> Option<&[u8]> {
        match self {
            CapturedValue::Text(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        self.as_text().and_then(|t| std::str::from_utf8(t).ok())
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            CapturedValue::Number(n) => Some(*n),
            _ => None,
        }
    }
}

impl fmt::Display for CapturedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapturedValue::Text(t) => write!(f, "\"{}\"", String::from_utf8_lossy(t)),
            CapturedValue::Number(n) => write!(f, "{n}"),
            CapturedValue::Bool(b) => write!(f, "{b}"),
            CapturedValue::Null => write!(f, "null"),
            CapturedValue::List(items) => {
                write!(f, "[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
            CapturedValue::Map(entries) => {
                write!(f, "{{")?;
                for (i, (k, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "\"{}\": {v}", String::from_utf8_lossy(k))?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// Arguments handed to a match-time callback.
pub struct MatchTimeArgs<'a> {
    /// The full subject being matched.
    pub subject: &'a [u8],
    /// Offset where the capture's child began matching.
    pub capture_start: usize,
    /// Offset one past the child's match (the current position).
    pub position: usize,
    /// Values the child produced, already evaluated.
    pub values: &'a [CapturedValue],
    /// Lookup for named-group values completed earlier in the match.
    pub names: &'a NameScope<'a>,
}

/// What a match-time callback tells the engine to do.
pub enum MatchTimeReply {
    /// Fail the capture (the match backtracks as if the child failed).
    Fail,
    /// Keep the current position. `values`, when given, replace the
    /// child's pending values.
    Keep { values: Option<Vec<CapturedValue>> },
    /// Continue from `pos`, which must lie in
    /// `capture_start ..= subject.len()`. Positions before the current
    /// one truncate what the capture consumed.
    AdvanceTo {
        pos: usize,
        values: Option<Vec<CapturedValue>>,
    },
}

pub type FunctionFn = Arc<dyn Fn(&[CapturedValue]) -> Vec<CapturedValue> + Send + Sync>;
pub type FoldFn = Arc<dyn Fn(CapturedValue, CapturedValue) -> CapturedValue + Send + Sync>;
pub type MatchTimeFn = Arc<dyn Fn(&MatchTimeArgs<'_>) -> MatchTimeReply + Send + Sync>;

/// Registry of callbacks a grammar's captures refer to by name.
///
/// Callbacks must be pure functions of their inputs; grammars holding them
/// are shared across threads.
#[derive(Clone, Default)]
pub struct Callbacks {
    functions: HashMap<String, FunctionFn>,
    folds: HashMap<String, FoldFn>,
    match_times: HashMap<String, MatchTimeFn>,
}

impl Callbacks {
    pub fn new() -> Callbacks {
        Callbacks::default()
    }

    pub fn function(
        &mut self,
        name: impl Into<String>,
        f: impl Fn(&[CapturedValue]) -> Vec<CapturedValue> + Send + Sync + 'static,
    ) -> &mut Self {
        self.functions.insert(name.into(), Arc::new(f));
        self
    }

    pub fn fold(
        &mut self,
        name: impl Into<String>,
        f: impl Fn(CapturedValue, CapturedValue) -> CapturedValue + Send + Sync + 'static,
    ) -> &mut Self {
        self.folds.insert(name.into(), Arc::new(f));
        self
    }

    pub fn match_time(
        &mut self,
        name: impl Into<String>,
        f: impl Fn(&MatchTimeArgs<'_>) -> MatchTimeReply + Send + Sync + 'static,
    ) -> &mut Self {
        self.match_times.insert(name.into(), Arc::new(f));
        self
    }

    pub fn get_function(&self, name: &str) -> Option<&FunctionFn> {
        self.functions.get(name)
    }

    pub fn get_fold(&self, name: &str) -> Option<&FoldFn> {
        self.folds.get(name)
    }

    pub fn get_match_time(&self, name: &str) -> Option<&MatchTimeFn> {
        self.match_times.get(name)
    }

    /// True when a capture kind's callback (if any) is registered.
    pub fn resolves(&self, kind: &CaptureKind) -> bool {
        match kind {
            CaptureKind::Fold(cb) => self.folds.contains_key(cb),
            CaptureKind::Function(cb) => self.functions.contains_key(cb),
            CaptureKind::MatchTime(cb) => self.match_times.contains_key(cb),
            _ => true,
        }
    }
}

impl fmt::Debug for Callbacks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Callbacks")
            .field("functions", &self.functions.keys().collect::<Vec<_>>())
            .field("folds", &self.folds.keys().collect::<Vec<_>>())
            .field("match_times", &self.match_times.keys().collect::<Vec<_>>())
            .finish()
    }
}

/// One entry in the capture event log.
#[derive(Clone, Debug)]
pub enum LogEntry {
    /// A capture began at `start`. `cap` indexes the program's capture table.
    Open { cap: u32, start: usize },
    /// Closes the most recent unmatched open at `end`.
    Close { end: usize },
    /// A pre-evaluated value spanning `start..end` (from match-time captures).
    Value {
        start: usize,
        end: usize,
        value: CapturedValue,
    },
}

/// Counters the engine reports alongside a match.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MatchStats {
    /// High-water mark of the engine's explicit stack (calls + backtrack
    /// entries). Heap-allocated; bounded by the configured limit.
    pub max_stack_depth: usize,
    /// Owned, non-empty text buffers materialized during capture
    /// evaluation (fragments, substitution buffers, callback-returned
    /// and constant text). Empty texts allocate nothing and do not
    /// count.
    pub text_allocs: u64,
    /// Match-time callbacks invoked.
    pub match_time_calls: u64,
}

impl MatchStats {
    fn count_text(&mut self, bytes: &[u8]) {
        if !bytes.is_empty() {
            self.text_allocs += 1;
        }
    }

    pub(crate) fn count_texts(&mut self, values: &[CapturedValue]) {
        for v in values {
            if let CapturedValue::Text(t) = v {
                self.count_text(t);
            }
        }
    }
}

/// Lazy lookup of completed named-group values, for match-time callbacks.
pub struct NameScope<'a> {
    pub(crate) subject: &'a [u8],
    pub(crate) log: &'a [LogEntry],
    pub(crate) caps: &'a [CaptureKind],
    pub(crate) callbacks: &'a Callbacks,
}

impl<'a> NameScope<'a> {
    /// Value of the most recent complete outermost group named `name`.
    pub fn get(&self, name: &str) -> Option<CapturedValue> {
        let mut depth = 0usize;
        let mut close_end = 0usize;
        for idx in (0..self.log.len()).rev() {
            match &self.log[idx] {
                LogEntry::Close { .. } => {
                    if depth == 0 {
                        close_end = idx;
                    }
                    depth += 1;
                }
                LogEntry::Open { cap, .. } => {
                    if depth == 0 {
                        // Still-open enclosing capture: not complete, skip.
                        continue;
                    }
                    depth -= 1;
                    if depth == 0 {
                        if let CaptureKind::Group(Some(n)) = &self.caps[*cap as usize] {
                            if n == name {
                                let mut stats = MatchStats::default();
                                let inner = evaluate_log(
                                    &self.log[idx + 1..close_end],
                                    self.subject,
                                    self.caps,
                                    self.callbacks,
                                    &mut stats,
                                )
                                .ok()?;
                                return match inner.len() {
                                    0 => None,
                                    1 => inner.into_iter().next(),
                                    _ => Some(CapturedValue::List(inner)),
                                };
                            }
                        }
                    }
                }
                LogEntry::Value { .. } => {}
            }
        }
        None
    }
}

/// Renders a value into a substitution buffer.
fn render_into(value: &CapturedValue, buf: &mut Vec<u8>) -> Result<(), EngineError> {
    match value {
        CapturedValue::Text(t) => buf.extend_from_slice(t),
        CapturedValue::Number(n) => buf.extend_from_slice(format!("{n}").as_bytes()),
        CapturedValue::Bool(b) => buf.extend_from_slice(if *b { b"true" } else { b"false" }),
        CapturedValue::Null => buf.extend_from_slice(b"null"),
        CapturedValue::List(_) | CapturedValue::Map(_) => {
            return Err(EngineError::Callback(
                "cannot render a list or map inside a substitution capture".into(),
            ))
        }
    }
    Ok(())
}

enum FrameState {
    Plain {
        values: Vec<CapturedValue>,
    },
    Subst {
        buf: Vec<u8>,
        /// Subject offset up to which bytes have been copied.
        copied: usize,
    },
}

struct Frame {
    cap: u32,
    start: usize,
    state: FrameState,
}

/// Evaluates a balanced capture log slice into its produced values.
pub(crate) fn evaluate_log(
    log: &[LogEntry],
    subject: &[u8],
    caps: &[CaptureKind],
    callbacks: &Callbacks,
    stats: &mut MatchStats,
) -> Result<Vec<CapturedValue>, EngineError> {
    let mut root: Vec<CapturedValue> = Vec::new();
    let mut stack: Vec<Frame> = Vec::new();

    // Appends `values` (with span `start..end`) to the innermost frame.
    // Inside a substitution frame the span is replaced by the rendered
    // values; zero values drop the span.
    fn deliver(
        stack: &mut [Frame],
        root: &mut Vec<CapturedValue>,
        subject: &[u8],
        start: usize,
        end: usize,
        values: Vec<CapturedValue>,
    ) -> Result<(), EngineError> {
        match stack.last_mut() {
            None => root.extend(values),
            Some(frame) => match &mut frame.state {
                FrameState::Plain { values: vs } => vs.extend(values),
                FrameState::Subst { buf, copied } => {
                    buf.extend_from_slice(&subject[*copied..start]);
                    for v in &values {
                        render_into(v, buf)?;
                    }
                    *copied = end;
                }
            },
        }
        Ok(())
    }

    for entry in log {
        match entry {
            LogEntry::Open { cap, start } => {
                let state = match &caps[*cap as usize] {
                    CaptureKind::Substitution => FrameState::Subst {
                        buf: Vec::new(),
                        copied: *start,
                    },
                    _ => FrameState::Plain { values: Vec::new() },
                };
                stack.push(Frame {
                    cap: *cap,
                    start: *start,
                    state,
                });
            }
            LogEntry::Close { end } => {
                let frame = stack.pop().expect("unbalanced capture log");
                let kind = &caps[frame.cap as usize];
                let produced: Vec<CapturedValue> = match (kind, frame.state) {
                    (CaptureKind::Substitution, FrameState::Subst { mut buf, copied }) => {
                        buf.extend_from_slice(&subject[copied..*end]);
                        stats.count_text(&buf);
                        vec![CapturedValue::Text(buf)]
                    }
                    (kind, FrameState::Plain { values }) => match kind {
                        CaptureKind::Simple => {
                            stats.count_text(&subject[frame.start..*end]);
                            let mut out =
                                vec![CapturedValue::Text(subject[frame.start..*end].to_vec())];
                            out.extend(values);
                            out
                        }
                        CaptureKind::Group(None) => vec![CapturedValue::List(values)],
                        CaptureKind::Group(Some(_)) => Vec::new(),
                        CaptureKind::Table => vec![CapturedValue::List(values)],
                        CaptureKind::Fold(cb) => {
                            let f = callbacks.get_fold(cb).ok_or_else(|| {
                                EngineError::Callback(format!("unknown fold callback '{cb}'"))
                            })?;
                            let mut it = values.into_iter();
                            let mut acc = it.next().ok_or_else(|| {
                                EngineError::Callback(format!(
                                    "fold '{cb}' has no initial value: child produced nothing"
                                ))
                            })?;
                            for v in it {
                                acc = f(acc, v);
                            }
                            vec![acc]
                        }
                        CaptureKind::Function(cb) => {
                            let f = callbacks.get_function(cb).ok_or_else(|| {
                                EngineError::Callback(format!("unknown function callback '{cb}'"))
                            })?;
                            let out = if values.is_empty() {
                                stats.count_text(&subject[frame.start..*end]);
                                f(&[CapturedValue::Text(subject[frame.start..*end].to_vec())])
                            } else {
                                f(&values)
                            };
                            stats.count_texts(&out);
                            out
                        }
                        CaptureKind::Constant(v) => {
                            stats.count_texts(std::slice::from_ref(v));
                            vec![v.clone()]
                        }
                        CaptureKind::MatchTime(_) => {
                            unreachable!("match-time capture left in final log")
                        }
                        CaptureKind::Substitution => unreachable!(),
                    },
                    _ => unreachable!("frame state mismatch"),
                };
                deliver(&mut stack, &mut root, subject, frame.start, *end, produced)?;
            }
            LogEntry::Value { start, end, value } => {
                deliver(
                    &mut stack,
                    &mut root,
                    subject,
                    *start,
                    *end,
                    vec![value.clone()],
                )?;
            }
        }
    }
    assert!(stack.is_empty(), "unbalanced capture log");
    Ok(root)
}
