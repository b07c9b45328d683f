//! The matching engine: an explicit-stack machine over compiled programs.
//!
//! The engine never recurses on the native stack. Rule calls and
//! backtrack entries live in one heap-allocated stack, so deeply nested
//! input is bounded only by the configured frame limit, and rule calls in
//! tail position (compiled to jumps) do not grow the stack at all.
//!
//! Positions are 0-based byte offsets. On success, `end` is the offset
//! one past the last consumed byte; `end_one_based` exposes the
//! "length + 1" convention for a whole-input match starting at 0.

use std::fmt;

use crate::peg::capture::{
    evaluate_log, Callbacks, CapturedValue, LogEntry, MatchStats, MatchTimeArgs, MatchTimeReply,
    NameScope,
};
use crate::peg::compile::{compile, CompileError, Inst, Program};
use crate::peg::grammar::Grammar;

/// Engine runtime failure. Match *failure* is not an error; these are
/// conditions that abort matching entirely.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    /// The explicit stack outgrew the configured limit.
    #[error("rule-call depth limit exceeded ({limit} frames)")]
    DepthLimit { limit: usize },
    /// A callback broke its contract (bad position, missing registration,
    /// fold without an initial value, unrenderable substitution value).
    #[error("callback contract violation: {0}")]
    Callback(String),
}

/// Knobs for a single match run.
#[derive(Clone, Copy, Debug)]
pub struct MatchOptions {
    /// Hard cap on the engine stack (calls plus backtrack entries).
    /// Runaway recursion becomes a clean [`EngineError::DepthLimit`].
    pub max_stack: usize,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions { max_stack: 200_000 }
    }
}

/// Result of a match attempt.
#[derive(Clone, Debug)]
pub struct MatchOutcome {
    success: bool,
    end: usize,
    values: Vec<CapturedValue>,
    furthest: usize,
    stats: MatchStats,
}

impl MatchOutcome {
    pub fn success(&self) -> bool {
        self.success
    }

    /// Offset one past the last consumed byte (0-based), when successful.
    pub fn end(&self) -> Option<usize> {
        self.success.then_some(self.end)
    }

    /// The classic PEG convention: for a full match of an n-byte subject
    /// from offset 0 this is n + 1.
    pub fn end_one_based(&self) -> Option<usize> {
        self.end().map(|e| e + 1)
    }

    /// Values produced by capture evaluation; empty on failure.
    pub fn values(&self) -> &[CapturedValue] {
        &self.values
    }

    pub fn into_values(self) -> Vec<CapturedValue> {
        self.values
    }

    /// Furthest byte offset any attempt failed at; useful for diagnostics.
    pub fn furthest_failure(&self) -> usize {
        self.furthest
    }

    pub fn stats(&self) -> MatchStats {
        self.stats
    }
}

impl fmt::Display for MatchOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.success {
            write!(f, "match (end {})", self.end)
        } else {
            write!(f, "no match (furthest {})", self.furthest)
        }
    }
}

/// A validated grammar lowered to instructions. Immutable and shareable;
/// concurrent matches are safe.
#[derive(Clone, Debug)]
pub struct CompiledGrammar {
    program: Program,
    callbacks: Callbacks,
}

impl Grammar {
    /// Validates and compiles. All matching goes through the result.
    pub fn compile(&self) -> Result<CompiledGrammar, CompileError> {
        Ok(CompiledGrammar {
            program: compile(self)?,
            callbacks: self.callbacks().clone(),
        })
    }
}

enum StackEntry {
    Backtrack {
        ip: u32,
        pos: usize,
        log_len: usize,
        opens_len: usize,
    },
    Return {
        ip: u32,
    },
}

impl CompiledGrammar {
    pub fn run(&self, subject: &[u8], start: usize) -> Result<MatchOutcome, EngineError> {
        self.run_with(subject, start, &MatchOptions::default())
    }

    pub fn run_with(
        &self,
        subject: &[u8],
        start: usize,
        options: &MatchOptions,
    ) -> Result<MatchOutcome, EngineError> {
        assert!(
            start <= subject.len(),
            "start position {start} past end of subject ({})",
            subject.len()
        );
        let insts = &self.program.insts;
        let sets = &self.program.sets;
        let caps = &self.program.caps;

        let mut ip: u32 = 0;
        let mut pos = start;
        let mut stack: Vec<StackEntry> = Vec::new();
        let mut log: Vec<LogEntry> = Vec::new();
        let mut opens: Vec<usize> = Vec::new();
        let mut furthest = start;
        let mut stats = MatchStats::default();

        macro_rules! push_entry {
            ($e:expr) => {{
                if stack.len() >= options.max_stack {
                    return Err(EngineError::DepthLimit {
                        limit: options.max_stack,
                    });
                }
                stack.push($e);
                if stack.len() > stats.max_stack_depth {
                    stats.max_stack_depth = stack.len();
                }
            }};
        }

        // Unwinds to the innermost backtrack entry; returns false when the
        // overall match has failed.
        macro_rules! fail {
            () => {{
                let mut resumed = false;
                while let Some(entry) = stack.pop() {
                    if let StackEntry::Backtrack {
                        ip: rip,
                        pos: rpos,
                        log_len,
                        opens_len,
                    } = entry
                    {
                        ip = rip;
                        pos = rpos;
                        log.truncate(log_len);
                        opens.truncate(opens_len);
                        resumed = true;
                        break;
                    }
                }
                if !resumed {
                    return Ok(MatchOutcome {
                        success: false,
                        end: 0,
                        values: Vec::new(),
                        furthest,
                        stats,
                    });
                }
                continue;
            }};
        }

        loop {
            match &insts[ip as usize] {
                Inst::Str(s) => {
                    if subject[pos..].starts_with(s) {
                        pos += s.len();
                        ip += 1;
                    } else {
                        let mismatch = subject[pos..]
                            .iter()
                            .zip(s.iter())
                            .take_while(|(a, b)| a == b)
                            .count();
                        furthest = furthest.max(pos + mismatch);
                        fail!();
                    }
                }
                Inst::Set(idx) => {
                    if pos < subject.len() && sets[*idx as usize].contains(subject[pos]) {
                        pos += 1;
                        ip += 1;
                    } else {
                        furthest = furthest.max(pos);
                        fail!();
                    }
                }
                Inst::Span(idx) => {
                    let set = &sets[*idx as usize];
                    while pos < subject.len() && set.contains(subject[pos]) {
                        pos += 1;
                    }
                    ip += 1;
                }
                Inst::Any(n) => {
                    let n = *n as usize;
                    if pos + n <= subject.len() {
                        pos += n;
                        ip += 1;
                    } else {
                        furthest = furthest.max(subject.len());
                        fail!();
                    }
                }
                Inst::TestSet { set, otherwise } => {
                    if pos < subject.len() && sets[*set as usize].contains(subject[pos]) {
                        ip += 1;
                    } else {
                        ip = *otherwise;
                    }
                }
                Inst::Choice(alt) => {
                    push_entry!(StackEntry::Backtrack {
                        ip: *alt,
                        pos,
                        log_len: log.len(),
                        opens_len: opens.len(),
                    });
                    ip += 1;
                }
                Inst::Jump(t) => ip = *t,
                Inst::Call(entry) => {
                    push_entry!(StackEntry::Return { ip: ip + 1 });
                    ip = *entry;
                }
                Inst::Return => match stack.pop() {
                    Some(StackEntry::Return { ip: rip }) => ip = rip,
                    _ => panic!("return without call frame"),
                },
                Inst::Commit(t) => {
                    let popped = stack.pop();
                    debug_assert!(matches!(popped, Some(StackEntry::Backtrack { .. })));
                    ip = *t;
                }
                Inst::PartialCommit(t) => {
                    match stack.last_mut() {
                        Some(StackEntry::Backtrack {
                            pos: rpos,
                            log_len,
                            opens_len,
                            ..
                        }) => {
                            *rpos = pos;
                            *log_len = log.len();
                            *opens_len = opens.len();
                        }
                        _ => panic!("partial commit without choice point"),
                    }
                    ip = *t;
                }
                Inst::BackCommit(t) => {
                    match stack.pop() {
                        Some(StackEntry::Backtrack {
                            pos: rpos,
                            log_len,
                            opens_len,
                            ..
                        }) => {
                            pos = rpos;
                            log.truncate(log_len);
                            opens.truncate(opens_len);
                        }
                        _ => panic!("back commit without choice point"),
                    }
                    ip = *t;
                }
                Inst::Fail => {
                    furthest = furthest.max(pos);
                    fail!();
                }
                Inst::FailTwice => {
                    // Negative lookahead whose child matched: discard our
                    // own choice point, then fail to the outer one. The
                    // predicate's start is the meaningful failure offset.
                    match stack.pop() {
                        Some(StackEntry::Backtrack { pos: started, .. }) => {
                            furthest = furthest.max(started);
                        }
                        _ => panic!("fail-twice without choice point"),
                    }
                    fail!();
                }
                Inst::OpenCapture(ci) => {
                    opens.push(log.len());
                    log.push(LogEntry::Open {
                        cap: *ci,
                        start: pos,
                    });
                    ip += 1;
                }
                Inst::CloseCapture => {
                    opens.pop().expect("close without open capture");
                    log.push(LogEntry::Close { end: pos });
                    ip += 1;
                }
                Inst::CloseMatchTime(ci) => {
                    let open_idx = opens.pop().expect("close without open capture");
                    let capture_start = match &log[open_idx] {
                        LogEntry::Open { start, .. } => *start,
                        _ => unreachable!(),
                    };
                    let sub_values = evaluate_log(
                        &log[open_idx + 1..],
                        subject,
                        caps,
                        &self.callbacks,
                        &mut stats,
                    )?;
                    let cb_name = match &caps[*ci as usize] {
                        crate::peg::capture::CaptureKind::MatchTime(name) => name,
                        _ => unreachable!(),
                    };
                    let callback = self.callbacks.get_match_time(cb_name).ok_or_else(|| {
                        EngineError::Callback(format!("unknown match-time callback '{cb_name}'"))
                    })?;
                    let scope = NameScope {
                        subject,
                        log: &log,
                        caps,
                        callbacks: &self.callbacks,
                    };
                    let reply = callback(&MatchTimeArgs {
                        subject,
                        capture_start,
                        position: pos,
                        values: &sub_values,
                        names: &scope,
                    });
                    stats.match_time_calls += 1;
                    let (new_pos, replacement) = match reply {
                        MatchTimeReply::Fail => {
                            furthest = furthest.max(pos);
                            log.truncate(open_idx);
                            fail!();
                        }
                        MatchTimeReply::Keep { values } => (pos, values),
                        MatchTimeReply::AdvanceTo { pos: p, values } => (p, values),
                    };
                    if new_pos < capture_start || new_pos > subject.len() {
                        return Err(EngineError::Callback(format!(
                            "match-time callback '{cb_name}' returned position {new_pos} \
                             outside {capture_start}..={}",
                            subject.len()
                        )));
                    }
                    let final_values = replacement.unwrap_or(sub_values);
                    stats.count_texts(&final_values);
                    log.truncate(open_idx);
                    for value in final_values {
                        log.push(LogEntry::Value {
                            start: capture_start,
                            end: new_pos,
                            value,
                        });
                    }
                    pos = new_pos;
                    ip += 1;
                }
                Inst::End => {
                    let values = evaluate_log(&log, subject, caps, &self.callbacks, &mut stats)?;
                    return Ok(MatchOutcome {
                        success: true,
                        end: pos,
                        values,
                        furthest,
                        stats,
                    });
                }
            }
        }
    }
}
