//! Compiles a validated grammar into the engine's instruction program.
//!
//! The generated code follows the usual PEG machine scheme: choice points
//! push backtrack entries, commits pop them, rule calls push return
//! entries. Two optimizations matter for the engine's observable
//! guarantees:
//!
//! - Rule calls in final position compile to jumps instead of calls, so
//!   branch-final recursion runs in constant stack depth.
//! - An ordered-choice branch whose first-byte set is disjoint from the
//!   first bytes of the remaining alternatives is compiled as a
//!   non-backtracking test-and-enter: if the branch is entered and later
//!   fails, no later alternative could have matched, so the whole choice
//!   fails without a stacked choice point. This is what lets calls inside
//!   earlier branches sit in final position.

use std::sync::Arc;

use indexmap::IndexMap;

use crate::peg::capture::CaptureKind;
use crate::peg::grammar::{Analysis, Grammar, ValidationReport};
use crate::peg::pattern::{ByteSet, Pattern, PatternKind};

#[derive(Clone, Debug)]
pub(crate) enum Inst {
    /// Match the literal bytes or fail.
    Str(Arc<[u8]>),
    /// Match one byte from `sets[arg]` or fail.
    Set(u16),
    /// Consume the longest run of bytes from `sets[arg]` (possessive).
    Span(u16),
    /// Consume exactly `arg` bytes or fail.
    Any(u32),
    /// If the current byte is outside `sets[set]` (or at end of input),
    /// jump to `otherwise`. Never consumes, never fails.
    TestSet {
        set: u16,
        otherwise: u32,
    },
    /// Push a backtrack entry resuming at `arg`.
    Choice(u32),
    Jump(u32),
    /// Push a return entry and jump to the rule's body.
    Call(u32),
    Return,
    /// Pop the top backtrack entry and jump.
    Commit(u32),
    /// Reset the top backtrack entry to the current state and jump
    /// (loop iteration).
    PartialCommit(u32),
    /// Pop the top backtrack entry, restore its state, and jump
    /// (positive lookahead success).
    BackCommit(u32),
    Fail,
    /// Pop one backtrack entry, then fail (negative lookahead success
    /// path inverted).
    FailTwice,
    OpenCapture(u32),
    CloseCapture,
    /// Close a match-time capture: evaluate its sub-log and consult the
    /// callback.
    CloseMatchTime(u32),
    End,
}

/// A grammar lowered to instructions, ready to run.
#[derive(Clone, Debug)]
pub(crate) struct Program {
    pub(crate) insts: Vec<Inst>,
    pub(crate) sets: Vec<ByteSet>,
    pub(crate) caps: Vec<CaptureKind>,
}

/// Grammar compilation failure.
#[derive(Debug, Clone, thiserror::Error)]
pub enum CompileError {
    #[error("invalid grammar: {0}")]
    Invalid(ValidationReport),
}

struct Compiler {
    analysis: Analysis,
    insts: Vec<Inst>,
    sets: Vec<ByteSet>,
    caps: Vec<CaptureKind>,
    /// Call sites awaiting rule-entry resolution: (inst index, rule name).
    pending_calls: Vec<(usize, String)>,
}

pub(crate) fn compile(grammar: &Grammar) -> Result<Program, CompileError> {
    let report = grammar.validate();
    if !report.is_ok() {
        return Err(CompileError::Invalid(report));
    }
    let mut c = Compiler {
        analysis: Analysis::build(grammar),
        insts: Vec::new(),
        sets: Vec::new(),
        caps: Vec::new(),
        pending_calls: Vec::new(),
    };

    // Bootstrap: call the start rule, then finish.
    c.pending_calls.push((0, grammar.start().to_string()));
    c.insts.push(Inst::Call(0));
    c.insts.push(Inst::End);

    let mut rule_entries: IndexMap<String, u32> = IndexMap::new();
    for (name, body) in grammar.rules() {
        rule_entries.insert(name.to_string(), c.insts.len() as u32);
        c.gen(body);
        c.insts.push(Inst::Return);
    }

    for (at, name) in std::mem::take(&mut c.pending_calls) {
        let entry = rule_entries[&name];
        c.insts[at] = Inst::Call(entry);
    }

    let mut program = Program {
        insts: c.insts,
        sets: c.sets,
        caps: c.caps,
    };
    optimize(&mut program);
    Ok(program)
}

impl Compiler {
    fn here(&self) -> u32 {
        self.insts.len() as u32
    }

    fn set_idx(&mut self, set: ByteSet) -> u16 {
        if let Some(i) = self.sets.iter().position(|s| *s == set) {
            return i as u16;
        }
        self.sets.push(set);
        (self.sets.len() - 1) as u16
    }

    fn patch(&mut self, at: u32, target: u32) {
        match &mut self.insts[at as usize] {
            Inst::TestSet { otherwise, .. } => *otherwise = target,
            Inst::Choice(t)
            | Inst::Jump(t)
            | Inst::Commit(t)
            | Inst::PartialCommit(t)
            | Inst::BackCommit(t) => *t = target,
            other => panic!("patching non-jump instruction {other:?}"),
        }
    }

    fn gen(&mut self, p: &Pattern) {
        match &p.kind {
            PatternKind::Literal(s) => {
                if !s.is_empty() {
                    self.insts.push(Inst::Str(s.clone()));
                }
            }
            PatternKind::CharSet(s) => {
                let idx = self.set_idx(*s);
                self.insts.push(Inst::Set(idx));
            }
            PatternKind::Any(n) => {
                if *n > 0 {
                    self.insts.push(Inst::Any(*n as u32));
                }
            }
            PatternKind::Sequence(children) => {
                for c in children {
                    self.gen(c);
                }
            }
            PatternKind::OrderedChoice(children) => self.gen_choice(children),
            PatternKind::RepeatAtLeast(child, n) => {
                for _ in 0..*n {
                    self.gen(child);
                }
                if let PatternKind::CharSet(s) = &child.kind {
                    let idx = self.set_idx(*s);
                    self.insts.push(Inst::Span(idx));
                } else {
                    let choice_at = self.here();
                    self.insts.push(Inst::Choice(0));
                    let body = self.here();
                    self.gen(child);
                    self.insts.push(Inst::PartialCommit(body));
                    let out = self.here();
                    self.patch(choice_at, out);
                }
            }
            PatternKind::RepeatAtMost(child, n) => self.gen_at_most(child, *n),
            PatternKind::AndPredicate(child) => {
                let choice_at = self.here();
                self.insts.push(Inst::Choice(0));
                self.gen(child);
                let back_at = self.here();
                self.insts.push(Inst::BackCommit(0));
                let on_fail = self.here();
                self.insts.push(Inst::Fail);
                self.patch(choice_at, on_fail);
                let out = self.here();
                self.patch(back_at, out);
            }
            PatternKind::NotPredicate(child) => {
                let choice_at = self.here();
                self.insts.push(Inst::Choice(0));
                self.gen(child);
                self.insts.push(Inst::FailTwice);
                let out = self.here();
                self.patch(choice_at, out);
            }
            PatternKind::RuleRef(name) => {
                self.pending_calls.push((self.insts.len(), name.clone()));
                self.insts.push(Inst::Call(0));
            }
            PatternKind::Capture(kind, child) => {
                self.caps.push(kind.clone());
                let ci = (self.caps.len() - 1) as u32;
                self.insts.push(Inst::OpenCapture(ci));
                self.gen(child);
                if matches!(kind, CaptureKind::MatchTime(_)) {
                    self.insts.push(Inst::CloseMatchTime(ci));
                } else {
                    self.insts.push(Inst::CloseCapture);
                }
            }
        }
    }

    fn gen_at_most(&mut self, child: &Pattern, n: usize) {
        if n == 0 {
            return;
        }
        let choice_at = self.here();
        self.insts.push(Inst::Choice(0));
        self.gen(child);
        self.gen_at_most(child, n - 1);
        let commit_at = self.here();
        self.insts.push(Inst::Commit(0));
        let out = self.here();
        self.patch(choice_at, out);
        self.patch(commit_at, out);
    }

    fn gen_choice(&mut self, children: &[Pattern]) {
        let mut end_jumps: Vec<u32> = Vec::new();
        for (i, child) in children.iter().enumerate() {
            let is_last = i == children.len() - 1;
            if is_last {
                self.gen(child);
                break;
            }
            let rest = &children[i + 1..];
            if self.can_dispatch(child, rest) {
                let (first, _) = self.analysis.first(child);
                let idx = self.set_idx(first);
                let test_at = self.here();
                self.insts.push(Inst::TestSet {
                    set: idx,
                    otherwise: 0,
                });
                self.gen(child);
                end_jumps.push(self.here());
                self.insts.push(Inst::Jump(0));
                let next = self.here();
                self.patch(test_at, next);
            } else {
                let choice_at = self.here();
                self.insts.push(Inst::Choice(0));
                self.gen(child);
                end_jumps.push(self.here());
                self.insts.push(Inst::Commit(0));
                let next = self.here();
                self.patch(choice_at, next);
            }
        }
        let end = self.here();
        for at in end_jumps {
            self.patch(at, end);
        }
    }

    /// A branch can use test dispatch when skipping it on a first-byte
    /// mismatch and abandoning the rest on a later failure are both
    /// sound: the branch and the remaining alternatives consume at least
    /// one byte, and their possible first bytes do not overlap.
    fn can_dispatch(&self, branch: &Pattern, rest: &[Pattern]) -> bool {
        let (branch_first, branch_nullable) = self.analysis.first(branch);
        if branch_nullable {
            return false;
        }
        let mut rest_first = ByteSet::EMPTY;
        for p in rest {
            let (f, nullable) = self.analysis.first(p);
            if nullable {
                return false;
            }
            rest_first = rest_first.union(&f);
        }
        branch_first.is_disjoint(&rest_first)
    }
}

/// Threads jump chains, folds jumps-to-returns, and rewrites tail calls.
fn optimize(program: &mut Program) {
    let n = program.insts.len();

    // Resolve a jump target through chains of unconditional jumps.
    let resolve = |insts: &[Inst], mut t: u32| -> u32 {
        let mut hops = 0;
        while let Inst::Jump(next) = insts[t as usize] {
            t = next;
            hops += 1;
            if hops > n {
                break; // defensive: cyclic jumps cannot happen from our codegen
            }
        }
        t
    };

    for i in 0..n {
        let threaded = match &program.insts[i] {
            Inst::Jump(t)
            | Inst::Choice(t)
            | Inst::Commit(t)
            | Inst::PartialCommit(t)
            | Inst::BackCommit(t) => Some(resolve(&program.insts, *t)),
            Inst::TestSet { otherwise, .. } => Some(resolve(&program.insts, *otherwise)),
            _ => None,
        };
        if let Some(t) = threaded {
            match &mut program.insts[i] {
                Inst::Jump(x)
                | Inst::Choice(x)
                | Inst::Commit(x)
                | Inst::PartialCommit(x)
                | Inst::BackCommit(x) => *x = t,
                Inst::TestSet { otherwise, .. } => *otherwise = t,
                _ => unreachable!(),
            }
        }
    }

    // A jump that lands on a return/fail/end behaves exactly like that
    // instruction.
    for i in 0..n {
        if let Inst::Jump(t) = program.insts[i] {
            match program.insts[t as usize] {
                Inst::Return => program.insts[i] = Inst::Return,
                Inst::Fail => program.insts[i] = Inst::Fail,
                Inst::End => program.insts[i] = Inst::End,
                _ => {}
            }
        }
    }

    // Tail calls: a call immediately followed by a return becomes a jump,
    // so branch-final recursion does not grow the stack.
    for i in 0..n.saturating_sub(1) {
        if let (Inst::Call(entry), Inst::Return) = (&program.insts[i], &program.insts[i + 1]) {
            program.insts[i] = Inst::Jump(*entry);
        }
    }
}
