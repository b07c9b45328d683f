//! ECMA-404 JSON parsing built on the PEG engine.
//!
//! [`parse_json`] covers the common case; [`JsonParser`] holds a compiled
//! grammar for one [`AblationConfig`] when you parse repeatedly or want
//! to compare configurations. All four configurations accept exactly the
//! same documents and produce equal values; they differ only in how the
//! grammar assembles objects and strings.

mod escape;
mod grammar;
mod value;

pub use escape::{decode_escape, decode_unicode_escape, UnicodeEscapeError};
pub use grammar::{build_json_grammar, make_table, AblationConfig};
pub use value::JsonValue;

use crate::peg::{CompiledGrammar, EngineError, MatchStats};

/// Why a document failed to parse.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JsonError {
    /// The text does not match the grammar; `offset` is the furthest byte
    /// any parse attempt reached.
    #[error("parse error at byte offset {offset}")]
    Parse { offset: usize },
    /// A string's raw bytes are not valid UTF-8.
    #[error("string content is not valid UTF-8")]
    InvalidUtf8,
    /// Engine aborts (depth limit, callback contract) surface unchanged.
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// A reusable JSON parser for one ablation configuration.
#[derive(Clone, Debug)]
pub struct JsonParser {
    cfg: AblationConfig,
    compiled: CompiledGrammar,
}

impl JsonParser {
    pub fn new(cfg: AblationConfig) -> JsonParser {
        let compiled = build_json_grammar(cfg)
            .compile()
            .expect("the JSON grammar always validates");
        JsonParser { cfg, compiled }
    }

    pub fn config(&self) -> AblationConfig {
        self.cfg
    }

    pub fn parse(&self, text: impl AsRef<[u8]>) -> Result<JsonValue, JsonError> {
        self.parse_with_stats(text).map(|(v, _)| v)
    }

    /// Parse and report engine counters (stack depth, text allocations),
    /// for the optimization-path assertions and benchmarks.
    pub fn parse_with_stats(
        &self,
        text: impl AsRef<[u8]>,
    ) -> Result<(JsonValue, MatchStats), JsonError> {
        let subject = text.as_ref();
        let outcome = self.compiled.run(subject, 0)?;
        if !outcome.success() {
            return Err(JsonError::Parse {
                offset: outcome.furthest_failure(),
            });
        }
        let stats = outcome.stats();
        let mut values = outcome.into_values();
        debug_assert_eq!(values.len(), 1, "doc rule produces exactly one value");
        let root = values.pop().expect("doc value");
        Ok((value::capture_to_json(root)?, stats))
    }

    /// Accept/reject only, skipping value construction.
    pub fn validate(&self, text: impl AsRef<[u8]>) -> Result<(), JsonError> {
        self.parse(text).map(|_| ())
    }
}

/// Parses with the fully optimized configuration.
pub fn parse_json(text: impl AsRef<[u8]>) -> Result<JsonValue, JsonError> {
    parse_json_with(text, AblationConfig::FULLOPT)
}

pub fn parse_json_with(
    text: impl AsRef<[u8]>,
    cfg: AblationConfig,
) -> Result<JsonValue, JsonError> {
    JsonParser::new(cfg).parse(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use indexmap::IndexMap;
    use proptest::prelude::*;

    fn parsers() -> Vec<JsonParser> {
        AblationConfig::ALL
            .iter()
            .map(|&c| JsonParser::new(c))
            .collect()
    }

    fn obj(entries: Vec<(&str, JsonValue)>) -> JsonValue {
        JsonValue::Object(
            entries
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect::<IndexMap<_, _>>(),
        )
    }

    #[test]
    fn scalars() {
        assert_eq!(parse_json("null").unwrap(), JsonValue::Null);
        assert_eq!(parse_json("true").unwrap(), JsonValue::Bool(true));
        assert_eq!(parse_json("false").unwrap(), JsonValue::Bool(false));
        assert_eq!(parse_json("42").unwrap(), JsonValue::Number(42.0));
        assert_eq!(parse_json("-0.5e2").unwrap(), JsonValue::Number(-50.0));
        assert_eq!(
            parse_json("\"hi\"").unwrap(),
            JsonValue::String("hi".into())
        );
    }

    #[test]
    fn nested_document() {
        let v = parse_json(r#"{"a":1,"b":[true,false]}"#).unwrap();
        assert_eq!(
            v,
            obj(vec![
                ("a", JsonValue::Number(1.0)),
                (
                    "b",
                    JsonValue::Array(vec![JsonValue::Bool(true), JsonValue::Bool(false)])
                ),
            ])
        );
    }

    #[test]
    fn whitespace_placement() {
        assert!(parse_json(" { \"a\" : [ 1 , 2 ] } ").is_ok());
        assert!(parse_json("\t\n{}\r\n").is_ok());
        assert!(parse_json("  ").is_err());
    }

    #[test]
    fn trailing_content_rejected() {
        match parse_json("1 2") {
            Err(JsonError::Parse { offset }) => assert_eq!(offset, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn leading_zero_rejected() {
        // IntPart is '0' / [1-9][0-9]*: "0123" parses "0" and then the
        // end-of-input check fails at offset 1.
        match parse_json("0123") {
            Err(JsonError::Parse { offset }) => assert_eq!(offset, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn string_escapes() {
        assert_eq!(
            parse_json(r#""a\nb\t\"\\\/""#).unwrap(),
            JsonValue::String("a\nb\t\"\\/".into())
        );
        assert_eq!(
            parse_json("\"\\u0041\\u00e9\"").unwrap(),
            JsonValue::String("Aé".into())
        );
        assert_eq!(
            parse_json("\"\\ud834\\udd1e\"").unwrap(),
            JsonValue::String("\u{1D11E}".into())
        );
        assert_eq!(
            parse_json(r#""\b\f""#).unwrap(),
            JsonValue::String("\u{8}\u{c}".into())
        );
    }

    #[test]
    fn lone_surrogates_are_parse_errors() {
        assert!(parse_json(r#""\ud800""#).is_err());
        assert!(parse_json(r#""\udc00""#).is_err());
        assert!(parse_json(r#""\ud800A""#).is_err());
        assert!(parse_json(r#""\ud800x""#).is_err());
    }

    #[test]
    fn unescaped_control_characters_rejected() {
        assert!(parse_json(b"\"a\x01b\"").is_err());
        assert!(parse_json(b"\"a\x1fb\"").is_err());
        assert!(parse_json(b"\"a\x20b\"").is_ok());
    }

    #[test]
    fn duplicate_keys_last_wins() {
        let v = parse_json(r#"{"a":1,"a":2}"#).unwrap();
        assert_eq!(v, obj(vec![("a", JsonValue::Number(2.0))]));
        for p in parsers() {
            assert_eq!(p.parse(r#"{"a":1,"a":2}"#).unwrap(), v);
        }
    }

    #[test]
    fn malformed_inputs() {
        for bad in [
            "",
            "{",
            "[1,]",
            "{\"a\":}",
            "{\"a\" 1}",
            "[1 2]",
            "tru",
            "nul",
            "+1",
            "1.",
            ".5",
            "1e",
            "\"abc",
            "{'a':1}",
            "[,]",
            "{,}",
            "{\"a\":1,}",
        ] {
            for p in parsers() {
                assert!(p.parse(bad).is_err(), "{bad:?} should be rejected");
            }
        }
    }

    #[test]
    fn invalid_utf8_in_string() {
        assert_eq!(parse_json(b"\"\xff\xfe\""), Err(JsonError::InvalidUtf8));
    }

    #[test]
    fn ablation_configs_agree_on_examples() {
        let inputs = [
            r#"{"k":[1,2,{"n":null}],"s":"a\nbA","e":{},"t":[[]]}"#,
            r#"[1.5e-3,"😀",{"x":"\\"}]"#,
            "[\"\\ud83d\\ude00\",\"\\u0041\"]",
            "  [ ]  ",
            r#""only a string""#,
        ];
        for input in inputs {
            let reference = parse_json(input).unwrap();
            for p in parsers() {
                assert_eq!(p.parse(input).unwrap(), reference, "{}", p.config().name());
            }
        }
    }

    #[test]
    fn deep_nesting_smoke() {
        let depth = 2_000;
        let doc = format!("{}{}", "[".repeat(depth), "]".repeat(depth));
        for p in parsers() {
            let v = p.parse(&doc).unwrap();
            let mut node = &v;
            let mut measured = 1;
            while let JsonValue::Array(items) = node {
                match items.first() {
                    Some(inner) => {
                        node = inner;
                        measured += 1;
                    }
                    None => break,
                }
            }
            assert_eq!(measured, depth);
        }
    }

    #[test]
    fn substitution_allocates_less_on_escape_heavy_strings() {
        let doc = format!(
            "[{}]",
            (0..50)
                .map(|_| r#""a\nb\tcAd""#)
                .collect::<Vec<_>>()
                .join(",")
        );
        let (v1, subst) = JsonParser::new(AblationConfig::FULLOPT)
            .parse_with_stats(&doc)
            .unwrap();
        let (v2, frag) = JsonParser::new(AblationConfig::NOSUBST)
            .parse_with_stats(&doc)
            .unwrap();
        assert_eq!(v1, v2);
        assert!(
            subst.text_allocs < frag.text_allocs,
            "substitution {} vs fragments {}",
            subst.text_allocs,
            frag.text_allocs
        );
    }

    // --- property tests -------------------------------------------------

    fn json_value_strategy() -> impl Strategy<Value = JsonValue> {
        let leaf = prop_oneof![
            Just(JsonValue::Null),
            any::<bool>().prop_map(JsonValue::Bool),
            // Finite doubles; the canonical form round-trips exactly.
            any::<f64>()
                .prop_filter("finite", |f| f.is_finite())
                .prop_map(JsonValue::Number),
            "[a-zA-Z0-9 \\\\\"\\n\\t\u{00e9}\u{1F600}]{0,12}".prop_map(JsonValue::String),
        ];
        leaf.prop_recursive(4, 48, 6, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 0..6).prop_map(JsonValue::Array),
                prop::collection::vec(("[a-z]{0,5}", inner), 0..6)
                    .prop_map(|entries| { JsonValue::Object(entries.into_iter().collect()) }),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn roundtrip_canonical(v in json_value_strategy()) {
            let text = v.to_canonical_string();
            let parsed = parse_json(&text).unwrap();
            prop_assert_eq!(parsed, v);
        }

        #[test]
        fn ablation_equivalence(v in json_value_strategy(), pad in "[ \\t\\n\\r]{0,3}") {
            let text = format!("{}{}{}", pad, v.to_canonical_string(), pad);
            let reference = parse_json(&text).unwrap();
            for cfg in AblationConfig::ALL {
                let got = parse_json_with(&text, cfg).unwrap();
                prop_assert_eq!(&got, &reference);
            }
        }
    }
}
