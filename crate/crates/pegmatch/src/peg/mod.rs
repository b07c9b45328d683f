//! The PEG engine: pattern AST, grammars, compilation, and matching with
//! full capture semantics.

pub mod capture;
mod compile;
mod engine;
mod grammar;
mod pattern;

pub use capture::{
    Callbacks, CaptureKind, CapturedValue, MatchStats, MatchTimeArgs, MatchTimeReply, NameScope,
};
pub use compile::CompileError;
pub use engine::{CompiledGrammar, EngineError, MatchOptions, MatchOutcome};
pub use grammar::{Grammar, GrammarIssue, ValidationReport};
pub use pattern::{ByteSet, Pattern, PatternKind};

#[cfg(test)]
mod tests {
    use super::*;

    fn run(g: &Grammar, subject: &str) -> MatchOutcome {
        g.compile().unwrap().run(subject.as_bytes(), 0).unwrap()
    }

    #[test]
    fn exact_match_end_convention() {
        // S <- 'ab' !.
        let g = Grammar::single(Pattern::lit("ab").then(Pattern::eof()));
        let out = run(&g, "ab");
        assert!(out.success());
        assert_eq!(out.end(), Some(2));
        assert_eq!(out.end_one_based(), Some(3)); // length + 1
        assert!(!run(&g, "abc").success());
    }

    #[test]
    fn ordered_choice_commits() {
        // S <- 'ab' / 'a'; on "ab" the first alternative wins.
        let g = Grammar::single(Pattern::lit("ab").or(Pattern::lit("a")));
        assert_eq!(run(&g, "ab").end(), Some(2));
        assert_eq!(run(&g, "a").end(), Some(1));
        // Once an alternative succeeds it is never revisited: ('a'/'ab') 'c'
        // cannot match "abc" because 'a' commits and 'c' then fails on 'b'.
        let g = Grammar::single(
            Pattern::lit("a")
                .or(Pattern::lit("ab"))
                .then(Pattern::lit("c")),
        );
        assert!(!run(&g, "abc").success());
        assert!(run(&g, "ac").success());
    }

    #[test]
    fn predicates_consume_nothing() {
        // S <- &'ab' 'a' !'c' 'b'
        let g = Grammar::single(
            Pattern::lit("ab")
                .and_pred()
                .then(Pattern::lit("a"))
                .then(Pattern::lit("c").not_pred())
                .then(Pattern::lit("b")),
        );
        let out = run(&g, "ab");
        assert!(out.success());
        assert_eq!(out.end(), Some(2));
        assert!(out.values().is_empty());
    }

    #[test]
    fn repetition_is_possessive() {
        // S <- 'a'* 'a' can never match: the star eats every 'a'.
        let g = Grammar::single(Pattern::lit("a").star().then(Pattern::lit("a")));
        assert!(!run(&g, "aaa").success());
    }

    #[test]
    fn repeat_bounds() {
        let g = Grammar::single(Pattern::lit("a").at_least(2).then(Pattern::eof()));
        assert!(!run(&g, "a").success());
        assert!(run(&g, "aa").success());
        assert!(run(&g, "aaaa").success());

        let g = Grammar::single(Pattern::lit("a").at_most(2).then(Pattern::lit("b")));
        assert!(run(&g, "b").success());
        assert!(run(&g, "ab").success());
        assert!(run(&g, "aab").success());
        assert!(!run(&g, "aaab").success());
    }

    #[test]
    fn substitution_replaces_constants() {
        // S <- {~ ('a' -> "b")* ~} over "aaa" yields "bbb".
        let g = Grammar::single(
            Pattern::lit("a")
                .constant(CapturedValue::text("b"))
                .star()
                .subst(),
        );
        let out = run(&g, "aaa");
        assert!(out.success());
        assert_eq!(out.values(), &[CapturedValue::text("bbb")]);
    }

    #[test]
    fn substitution_identity_without_inner_captures() {
        let g = Grammar::single(Pattern::one_of(b"ab").star().subst());
        let out = run(&g, "abba");
        assert_eq!(out.values(), &[CapturedValue::text("abba")]);
    }

    #[test]
    fn right_recursive_grammar_matches() {
        // S <- 'a' S / 'a'
        let g = Grammar::new(
            vec![(
                "S",
                Pattern::lit("a")
                    .then(Pattern::call("S"))
                    .or(Pattern::lit("a")),
            )],
            "S",
            Callbacks::new(),
        );
        let out = run(&g, "aaa");
        assert!(out.success());
        assert_eq!(out.end(), Some(3));
    }

    #[test]
    fn tail_recursion_runs_in_constant_stack() {
        // S <- 'a' S / 'b' S / '!' — recursion only in branch-final
        // position, first bytes disjoint: depth must not scale with input.
        let g = Grammar::new(
            vec![(
                "S",
                Pattern::lit("a")
                    .then(Pattern::call("S"))
                    .or(Pattern::lit("b").then(Pattern::call("S")))
                    .or(Pattern::lit("!")),
            )],
            "S",
            Callbacks::new(),
        );
        let compiled = g.compile().unwrap();
        let mut subject = "ab".repeat(5_000);
        subject.push('!');
        let out = compiled.run(subject.as_bytes(), 0).unwrap();
        assert!(out.success());
        assert!(
            out.stats().max_stack_depth <= 4,
            "expected constant depth, got {}",
            out.stats().max_stack_depth
        );
    }

    #[test]
    fn depth_limit_is_a_clean_error() {
        // S <- '(' S ')' / 'x' — non-tail recursion needs one frame per level.
        let g = Grammar::new(
            vec![(
                "S",
                Pattern::lit("(")
                    .then(Pattern::call("S"))
                    .then(Pattern::lit(")"))
                    .or(Pattern::lit("x")),
            )],
            "S",
            Callbacks::new(),
        );
        let compiled = g.compile().unwrap();
        let deep = format!("{}x{}", "(".repeat(500), ")".repeat(500));
        let opts = MatchOptions { max_stack: 100 };
        match compiled.run_with(deep.as_bytes(), 0, &opts) {
            Err(EngineError::DepthLimit { limit: 100 }) => {}
            other => panic!("expected depth limit, got {other:?}"),
        }
        // And with room it succeeds.
        assert!(compiled.run(deep.as_bytes(), 0).unwrap().success());
    }

    #[test]
    fn match_time_callback_steers() {
        // get_first-style: succeed with the current character without
        // consuming anything, when it is a plain letter.
        let mut cbs = Callbacks::new();
        cbs.match_time("first_letter", |args| {
            match args.subject.get(args.capture_start) {
                Some(b) if b.is_ascii_alphabetic() => MatchTimeReply::Keep {
                    values: Some(vec![CapturedValue::Text(vec![*b])]),
                },
                _ => MatchTimeReply::Fail,
            }
        });
        let g = Grammar::new(
            vec![(
                "S",
                Pattern::empty()
                    .match_time("first_letter")
                    .then(Pattern::any(1).star()),
            )],
            "S",
            cbs,
        );
        let compiled = g.compile().unwrap();
        let out = compiled.run(b"cat", 0).unwrap();
        assert!(out.success());
        assert_eq!(out.values(), &[CapturedValue::text("c")]);
        assert!(!compiled.run(b"?at", 0).unwrap().success());
    }

    #[test]
    fn match_time_advance_and_truncate() {
        // The callback may move the position anywhere between the
        // capture's start and the end of input.
        let mut cbs = Callbacks::new();
        cbs.match_time("cut_to_three", |args| MatchTimeReply::AdvanceTo {
            pos: args.capture_start + 3,
            values: None,
        });
        let g = Grammar::new(
            vec![(
                "S",
                Pattern::any(1)
                    .star()
                    .match_time("cut_to_three")
                    .then(Pattern::lit("xyz"))
                    .then(Pattern::eof()),
            )],
            "S",
            cbs,
        );
        let compiled = g.compile().unwrap();
        // The star consumes everything; the callback hands back all but
        // the first three bytes, and matching continues from there.
        let out = compiled.run(b"abcxyz", 0).unwrap();
        assert!(out.success());
        assert_eq!(out.end(), Some(6));
    }

    #[test]
    fn match_time_bad_position_aborts() {
        let mut cbs = Callbacks::new();
        cbs.match_time("bad", |args| MatchTimeReply::AdvanceTo {
            pos: args.subject.len() + 5,
            values: None,
        });
        let g = Grammar::new(vec![("S", Pattern::lit("a").match_time("bad"))], "S", cbs);
        match g.compile().unwrap().run(b"a", 0) {
            Err(EngineError::Callback(_)) => {}
            other => panic!("expected contract violation, got {other:?}"),
        }
    }

    #[test]
    fn named_groups_visible_to_match_time() {
        let mut cbs = Callbacks::new();
        cbs.match_time("starts_with_f", |args| {
            let f = args.names.get("F");
            match f {
                Some(CapturedValue::Text(t)) if args.subject[args.position..].starts_with(&t) => {
                    MatchTimeReply::Keep { values: None }
                }
                _ => MatchTimeReply::Fail,
            }
        });
        // S <- {:F: {.} :} ('' => starts_with_f) . .
        let g = Grammar::new(
            vec![(
                "S",
                Pattern::any(1)
                    .simple()
                    .group_named("F")
                    .then(Pattern::empty().match_time("starts_with_f"))
                    .then(Pattern::any(2))
                    .then(Pattern::eof()),
            )],
            "S",
            cbs,
        );
        let compiled = g.compile().unwrap();
        assert!(compiled.run(b"aab", 0).unwrap().success());
        assert!(!compiled.run(b"abb", 0).unwrap().success());
    }

    #[test]
    fn fold_with_single_value_is_identity() {
        let mut cbs = Callbacks::new();
        cbs.fold("never", |_, _| {
            panic!("fold callback must not run for one value")
        });
        let g = Grammar::new(
            vec![(
                "S",
                Pattern::lit("x")
                    .constant(CapturedValue::Number(7.0))
                    .fold("never"),
            )],
            "S",
            cbs,
        );
        let out = g.compile().unwrap().run(b"x", 0).unwrap();
        assert_eq!(out.values(), &[CapturedValue::Number(7.0)]);
    }

    #[test]
    fn furthest_failure_points_at_trailing_garbage() {
        // doc <- 'a'+ !. over "aa b": the negative lookahead fails at
        // offset 2.
        let g = Grammar::single(Pattern::lit("a").plus().then(Pattern::eof()));
        let out = g.compile().unwrap().run(b"aa b", 0).unwrap();
        assert!(!out.success());
        assert_eq!(out.furthest_failure(), 2);
    }

    #[test]
    fn group_joins_values() {
        let g = Grammar::single(
            Pattern::lit("a")
                .simple()
                .then(Pattern::lit("b").simple())
                .group(),
        );
        let out = g.compile().unwrap().run(b"ab", 0).unwrap();
        assert_eq!(
            out.values(),
            &[CapturedValue::List(vec![
                CapturedValue::text("a"),
                CapturedValue::text("b")
            ])]
        );
    }

    #[test]
    fn empty_charset_always_fails() {
        let g = Grammar::single(Pattern::set(ByteSet::EMPTY));
        assert!(!run(&g, "a").success());
        assert!(!run(&g, "").success());
    }

    #[test]
    fn match_from_offset() {
        let g = Grammar::single(Pattern::lit("bc"));
        let out = g.compile().unwrap().run(b"abc", 1).unwrap();
        assert!(out.success());
        assert_eq!(out.end(), Some(3));
    }

    #[test]
    fn determinism() {
        let g = Grammar::single(
            Pattern::one_of(b"ab")
                .star()
                .subst()
                .then(Pattern::lit("!").opt()),
        );
        let compiled = g.compile().unwrap();
        let a = compiled.run(b"abab!", 0).unwrap();
        let b = compiled.run(b"abab!", 0).unwrap();
        assert_eq!(a.success(), b.success());
        assert_eq!(a.end(), b.end());
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn committed_choice_never_tries_later_alternatives() {
        // Probe each alternative with a logging match-time capture: once
        // alternative 1 succeeds at a position, alternative 2's probe
        // must never fire there, even though the overall match then fails.
        use std::sync::{Arc, Mutex};
        let log: Arc<Mutex<Vec<&'static str>>> = Arc::new(Mutex::new(Vec::new()));
        let mut cbs = Callbacks::new();
        for name in ["alt1", "alt2"] {
            let log = Arc::clone(&log);
            cbs.match_time(name, move |_| {
                log.lock().unwrap().push(name);
                MatchTimeReply::Keep { values: None }
            });
        }
        // S <- ('a' => alt1 / 'a' => alt2) 'x'
        let g = Grammar::new(
            vec![(
                "S",
                Pattern::lit("a")
                    .match_time("alt1")
                    .or(Pattern::lit("a").match_time("alt2"))
                    .then(Pattern::lit("x")),
            )],
            "S",
            cbs,
        );
        let compiled = g.compile().unwrap();
        assert!(!compiled.run(b"ab", 0).unwrap().success());
        assert_eq!(*log.lock().unwrap(), vec!["alt1"]);
    }

    #[test]
    fn compiled_grammars_share_across_threads() {
        let g = Grammar::new(
            vec![(
                "S",
                Pattern::lit("a")
                    .then(Pattern::call("S"))
                    .or(Pattern::lit("b").simple()),
            )],
            "S",
            Callbacks::new(),
        );
        let compiled = std::sync::Arc::new(g.compile().unwrap());
        let handles: Vec<_> = (0..4)
            .map(|i| {
                let compiled = std::sync::Arc::clone(&compiled);
                std::thread::spawn(move || {
                    let subject = format!("{}b", "a".repeat(i * 100));
                    let out = compiled.run(subject.as_bytes(), 0).unwrap();
                    assert!(out.success());
                    assert_eq!(out.values(), &[CapturedValue::text("b")]);
                })
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
    }
}
