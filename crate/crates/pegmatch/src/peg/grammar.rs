//! Named rule sets, validation, and the static analyses behind both
//! validation and the compiler's choice dispatch.
//!
//! Validation rejects grammars the engine cannot run safely:
//! unresolved rule references, left recursion (a rule reachable from
//! itself without consuming input, directly or through other rules),
//! unregistered callbacks, and repetition of nullable patterns (which
//! would loop forever under possessive semantics).

use std::collections::{HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;

use crate::peg::capture::Callbacks;
use crate::peg::pattern::{ByteSet, Pattern, PatternKind};

/// A named set of rules with a start rule and the callbacks its captures use.
///
/// Immutable once built; safe to share across threads and to match against
/// concurrently.
#[derive(Clone, Debug)]
pub struct Grammar {
    rules: IndexMap<String, Pattern>,
    start: String,
    callbacks: Callbacks,
}

/// One problem found by validation. Diagnoses are values, not errors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GrammarIssue {
    /// `rule` references `target`, which does not exist.
    UnresolvedRef { rule: String, target: String },
    /// `rule` can invoke itself without consuming input.
    LeftRecursion { rule: String },
    /// The start rule is missing from the rule set.
    MissingStart { start: String },
    /// A capture in `rule` names a callback that is not registered.
    UnknownCallback { rule: String, callback: String },
    /// A named group in `rule` has an empty name.
    EmptyGroupName { rule: String },
    /// `rule` repeats a pattern that can succeed without consuming input.
    NullableRepeat { rule: String },
}

impl fmt::Display for GrammarIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrammarIssue::UnresolvedRef { rule, target } => {
                write!(f, "rule '{rule}' references unknown rule '{target}'")
            }
            GrammarIssue::LeftRecursion { rule } => {
                write!(f, "rule '{rule}' is left-recursive")
            }
            GrammarIssue::MissingStart { start } => {
                write!(f, "start rule '{start}' is not defined")
            }
            GrammarIssue::UnknownCallback { rule, callback } => {
                write!(f, "rule '{rule}' uses unregistered callback '{callback}'")
            }
            GrammarIssue::EmptyGroupName { rule } => {
                write!(f, "rule '{rule}' contains a named group with an empty name")
            }
            GrammarIssue::NullableRepeat { rule } => {
                write!(
                    f,
                    "rule '{rule}' repeats a pattern that can match the empty string"
                )
            }
        }
    }
}

/// Outcome of [`Grammar::validate`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    issues: Vec<GrammarIssue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn issues(&self) -> &[GrammarIssue] {
        &self.issues
    }

    pub fn into_issues(self) -> Vec<GrammarIssue> {
        self.issues
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl Grammar {
    /// Builds a grammar. Call [`Grammar::validate`] (or compile, which
    /// validates) before matching.
    pub fn new(
        rules: impl IntoIterator<Item = (impl Into<String>, Pattern)>,
        start: impl Into<String>,
        callbacks: Callbacks,
    ) -> Grammar {
        let rules: IndexMap<String, Pattern> =
            rules.into_iter().map(|(n, p)| (n.into(), p)).collect();
        Grammar {
            rules,
            start: start.into(),
            callbacks,
        }
    }

    /// Single-rule grammar without callbacks, for quick patterns.
    pub fn single(pattern: Pattern) -> Grammar {
        Grammar::new(vec![("start", pattern)], "start", Callbacks::new())
    }

    pub fn rules(&self) -> impl Iterator<Item = (&str, &Pattern)> {
        self.rules.iter().map(|(n, p)| (n.as_str(), p))
    }

    pub fn rule(&self, name: &str) -> Option<&Pattern> {
        self.rules.get(name)
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn callbacks(&self) -> &Callbacks {
        &self.callbacks
    }

    /// Checks the grammar and reports every problem found.
    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();

        if !self.rules.contains_key(&self.start) {
            issues.push(GrammarIssue::MissingStart {
                start: self.start.clone(),
            });
        }

        for (name, body) in &self.rules {
            body.walk(&mut |p| match &p.kind {
                PatternKind::RuleRef(target) => {
                    if !self.rules.contains_key(target) {
                        let issue = GrammarIssue::UnresolvedRef {
                            rule: name.clone(),
                            target: target.clone(),
                        };
                        if !issues.contains(&issue) {
                            issues.push(issue);
                        }
                    }
                }
                PatternKind::Capture(kind, _) => {
                    if let crate::peg::capture::CaptureKind::Group(Some(n)) = kind {
                        if n.is_empty() {
                            issues.push(GrammarIssue::EmptyGroupName { rule: name.clone() });
                        }
                    }
                    if !self.callbacks.resolves(kind) {
                        let cb = match kind {
                            crate::peg::capture::CaptureKind::Fold(c)
                            | crate::peg::capture::CaptureKind::Function(c)
                            | crate::peg::capture::CaptureKind::MatchTime(c) => c.clone(),
                            _ => unreachable!(),
                        };
                        let issue = GrammarIssue::UnknownCallback {
                            rule: name.clone(),
                            callback: cb,
                        };
                        if !issues.contains(&issue) {
                            issues.push(issue);
                        }
                    }
                }
                _ => {}
            });
        }

        // The remaining analyses assume resolvable references.
        if !issues.is_empty() {
            return ValidationReport { issues };
        }

        let analysis = Analysis::build(self);

        for (name, body) in &self.rules {
            if analysis.repeats_nullable(body) {
                issues.push(GrammarIssue::NullableRepeat { rule: name.clone() });
            }
        }

        // Left recursion: a rule that can reach a call to itself at
        // position 0 (through nullable prefixes, predicates, or other
        // rules) never terminates under PEG semantics.
        let mut head_edges: HashMap<&str, HashSet<&str>> = HashMap::new();
        for (name, body) in &self.rules {
            let mut refs = HashSet::new();
            analysis.head_refs(body, &mut refs);
            head_edges.insert(name.as_str(), refs);
        }
        for name in self.rules.keys() {
            if reaches(name.as_str(), name.as_str(), &head_edges) {
                issues.push(GrammarIssue::LeftRecursion { rule: name.clone() });
            }
        }

        ValidationReport { issues }
    }
}

/// True when `to` is reachable from `from` over head edges (one or more steps).
fn reaches(from: &str, to: &str, edges: &HashMap<&str, HashSet<&str>>) -> bool {
    let mut seen = HashSet::new();
    let mut work: Vec<&str> = edges
        .get(from)
        .map(|s| s.iter().copied().collect())
        .unwrap_or_default();
    while let Some(r) = work.pop() {
        if r == to {
            return true;
        }
        if seen.insert(r) {
            if let Some(next) = edges.get(r) {
                work.extend(next.iter().copied());
            }
        }
    }
    false
}

/// Per-grammar static facts: rule nullability and first-byte sets.
///
/// Nullability is a least fixpoint (a rule is nullable only when some
/// derivation actually consumes nothing). First sets over-approximate the
/// bytes a pattern can start with; `(set, nullable)` where `nullable`
/// means the pattern may succeed without consuming, in which case the set
/// alone says nothing about whether it matches.
pub(crate) struct Analysis {
    nullable_rules: HashMap<String, bool>,
    first_rules: HashMap<String, (ByteSet, bool)>,
}

impl Analysis {
    pub(crate) fn build(grammar: &Grammar) -> Analysis {
        // Least fixpoint for nullability: start from all-false, iterate.
        let mut nullable: HashMap<String, bool> =
            grammar.rules.keys().map(|k| (k.clone(), false)).collect();
        loop {
            let mut changed = false;
            for (name, body) in &grammar.rules {
                if !nullable[name] && pattern_nullable(body, &nullable) {
                    nullable.insert(name.clone(), true);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        // Greatest-safe fixpoint for first sets: start from empty,
        // iterate unions until stable.
        let mut first: HashMap<String, (ByteSet, bool)> = grammar
            .rules
            .keys()
            .map(|k| (k.clone(), (ByteSet::EMPTY, nullable[k])))
            .collect();
        loop {
            let mut changed = false;
            for (name, body) in &grammar.rules {
                let computed = pattern_first(body, &first);
                let current = &first[name];
                let merged = (current.0.union(&computed.0), current.1 || computed.1);
                if merged != *current {
                    first.insert(name.clone(), merged);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        Analysis {
            nullable_rules: nullable,
            first_rules: first,
        }
    }

    pub(crate) fn nullable(&self, p: &Pattern) -> bool {
        pattern_nullable(p, &self.nullable_rules)
    }

    /// `(first-bytes, nullable)` for a pattern in this grammar.
    pub(crate) fn first(&self, p: &Pattern) -> (ByteSet, bool) {
        pattern_first(p, &self.first_rules)
    }

    /// Does any repetition inside `p` have a nullable body?
    fn repeats_nullable(&self, p: &Pattern) -> bool {
        let mut found = false;
        p.walk(&mut |node| {
            if let PatternKind::RepeatAtLeast(child, _) = &node.kind {
                if self.nullable(child) {
                    found = true;
                }
            }
        });
        found
    }

    /// Rules callable from `p` before any input is consumed.
    fn head_refs<'g>(&self, p: &'g Pattern, out: &mut HashSet<&'g str>) {
        match &p.kind {
            PatternKind::Literal(_) | PatternKind::CharSet(_) | PatternKind::Any(_) => {}
            PatternKind::Sequence(children) => {
                for c in children {
                    self.head_refs(c, out);
                    if !self.nullable(c) {
                        break;
                    }
                }
            }
            PatternKind::OrderedChoice(children) => {
                for c in children {
                    self.head_refs(c, out);
                }
            }
            PatternKind::RepeatAtLeast(c, _) | PatternKind::RepeatAtMost(c, _) => {
                self.head_refs(c, out);
            }
            PatternKind::AndPredicate(c) | PatternKind::NotPredicate(c) => {
                self.head_refs(c, out);
            }
            PatternKind::RuleRef(name) => {
                out.insert(name.as_str());
            }
            PatternKind::Capture(_, c) => self.head_refs(c, out),
        }
    }
}

fn pattern_nullable(p: &Pattern, rules: &HashMap<String, bool>) -> bool {
    match &p.kind {
        PatternKind::Literal(s) => s.is_empty(),
        PatternKind::CharSet(_) => false,
        PatternKind::Any(n) => *n == 0,
        PatternKind::Sequence(cs) => cs.iter().all(|c| pattern_nullable(c, rules)),
        PatternKind::OrderedChoice(cs) => cs.iter().any(|c| pattern_nullable(c, rules)),
        PatternKind::RepeatAtLeast(c, n) => *n == 0 || pattern_nullable(c, rules),
        PatternKind::RepeatAtMost(_, _) => true,
        PatternKind::AndPredicate(_) | PatternKind::NotPredicate(_) => true,
        PatternKind::RuleRef(name) => rules.get(name).copied().unwrap_or(true),
        PatternKind::Capture(_, c) => pattern_nullable(c, rules),
    }
}

fn pattern_first(p: &Pattern, rules: &HashMap<String, (ByteSet, bool)>) -> (ByteSet, bool) {
    match &p.kind {
        PatternKind::Literal(s) => {
            if s.is_empty() {
                (ByteSet::EMPTY, true)
            } else {
                (ByteSet::from_bytes(&s[..1]), false)
            }
        }
        PatternKind::CharSet(s) => (*s, false),
        PatternKind::Any(n) => {
            if *n == 0 {
                (ByteSet::EMPTY, true)
            } else {
                (ByteSet::ALL, false)
            }
        }
        PatternKind::Sequence(cs) => {
            let mut set = ByteSet::EMPTY;
            for c in cs {
                let (f, nullable) = pattern_first(c, rules);
                set = set.union(&f);
                if !nullable {
                    return (set, false);
                }
            }
            (set, true)
        }
        PatternKind::OrderedChoice(cs) => {
            let mut set = ByteSet::EMPTY;
            let mut nullable = false;
            for c in cs {
                let (f, n) = pattern_first(c, rules);
                set = set.union(&f);
                nullable |= n;
            }
            (set, nullable)
        }
        PatternKind::RepeatAtLeast(c, n) => {
            let (f, nullable) = pattern_first(c, rules);
            (f, *n == 0 || nullable)
        }
        PatternKind::RepeatAtMost(c, _) => {
            let (f, _) = pattern_first(c, rules);
            (f, true)
        }
        // A predicate consumes nothing; treat it as nullable with the
        // child's first set so sequence analysis stays a superset.
        PatternKind::AndPredicate(c) => {
            let (f, nullable) = pattern_first(c, rules);
            if nullable {
                (ByteSet::ALL, true)
            } else {
                (f, true)
            }
        }
        PatternKind::NotPredicate(_) => (ByteSet::ALL, true),
        PatternKind::RuleRef(name) => rules.get(name).copied().unwrap_or((ByteSet::ALL, true)),
        PatternKind::Capture(kind, c) => {
            let (f, nullable) = pattern_first(c, rules);
            // A match-time callback may truncate consumption back to the
            // capture's start, so assume it can succeed on empty.
            if matches!(kind, crate::peg::capture::CaptureKind::MatchTime(_)) {
                (f, true)
            } else {
                (f, nullable)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bare(rules: Vec<(&str, Pattern)>, start: &str) -> Grammar {
        Grammar::new(rules, start, Callbacks::new())
    }

    #[test]
    fn right_recursion_is_legal() {
        // S <- 'a' S / 'a'
        let g = bare(
            vec![(
                "S",
                Pattern::lit("a")
                    .then(Pattern::call("S"))
                    .or(Pattern::lit("a")),
            )],
            "S",
        );
        assert!(g.validate().is_ok());
    }

    #[test]
    fn direct_left_recursion_detected() {
        // S <- S 'a'
        let g = bare(vec![("S", Pattern::call("S").then(Pattern::lit("a")))], "S");
        let report = g.validate();
        assert_eq!(
            report.issues(),
            &[GrammarIssue::LeftRecursion { rule: "S".into() }]
        );
    }

    #[test]
    fn indirect_left_recursion_through_nullable_prefix() {
        // S <- 'a'? T ; T <- S 'b'  — T reaches S at position 0 and S
        // reaches T through the nullable 'a'?.
        let g = bare(
            vec![
                ("S", Pattern::lit("a").opt().then(Pattern::call("T"))),
                ("T", Pattern::call("S").then(Pattern::lit("b"))),
            ],
            "S",
        );
        let report = g.validate();
        assert!(!report.is_ok());
        assert!(report
            .issues()
            .iter()
            .any(|i| matches!(i, GrammarIssue::LeftRecursion { .. })));
    }

    #[test]
    fn unresolved_ref_reported() {
        let g = bare(vec![("S", Pattern::call("T"))], "S");
        assert_eq!(
            g.validate().issues(),
            &[GrammarIssue::UnresolvedRef {
                rule: "S".into(),
                target: "T".into()
            }]
        );
    }

    #[test]
    fn nullable_repeat_rejected() {
        let g = bare(vec![("S", Pattern::lit("a").opt().star())], "S");
        assert_eq!(
            g.validate().issues(),
            &[GrammarIssue::NullableRepeat { rule: "S".into() }]
        );
    }

    #[test]
    fn unknown_callback_reported() {
        let g = bare(vec![("S", Pattern::lit("a").apply("missing"))], "S");
        assert_eq!(
            g.validate().issues(),
            &[GrammarIssue::UnknownCallback {
                rule: "S".into(),
                callback: "missing".into()
            }]
        );
    }

    #[test]
    fn first_sets_follow_nullable_prefixes() {
        let g = bare(
            vec![("S", Pattern::one_of(b" \t").star().then(Pattern::lit("x")))],
            "S",
        );
        let analysis = Analysis::build(&g);
        let (first, nullable) = analysis.first(g.rule("S").unwrap());
        assert!(!nullable);
        assert!(first.contains(b' ') && first.contains(b'\t') && first.contains(b'x'));
        assert!(!first.contains(b'y'));
    }
}
