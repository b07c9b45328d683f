//! The JSON grammar, built from engine combinators.
//!
//! Whitespace handling is shared by every configuration: the value rule
//! carries no trailing whitespace (so branch-final rule calls compile to
//! tail jumps and nesting depth stays cheap), and call sites add the
//! whitespace they need instead. Object keys are matched as
//! `String __ ':'`.
//!
//! Two construction strategies are switchable per [`AblationConfig`]:
//!
//! - Objects: collect the flat key/value list with a table capture and
//!   build the map once at the end (`make_table`, with the hash capacity
//!   reserved up front), or fold each pair into a growing map
//!   (`add_prop` as the accumulator).
//! - Strings: a substitution capture merges literal runs and decoded
//!   escapes in one output buffer, or each run/escape is captured as a
//!   fragment, collected, and concatenated (`fast_merge`).

use indexmap::IndexMap;

use crate::json::escape::{decode_escape, decode_unicode_escape};
use crate::peg::{ByteSet, Callbacks, CapturedValue, Grammar, Pattern};

/// Which of the two grammar-level optimizations are active.
///
/// The four combinations carry the bench config names: `fullopt` (both),
/// `nomtab` (no table construction optimization), `nosubst` (no
/// substitution capture), `noopt` (neither).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AblationConfig {
    pub table_construction_opt: bool,
    pub substitution_capture_opt: bool,
}

impl AblationConfig {
    pub const FULLOPT: AblationConfig = AblationConfig {
        table_construction_opt: true,
        substitution_capture_opt: true,
    };
    pub const NOMTAB: AblationConfig = AblationConfig {
        table_construction_opt: false,
        substitution_capture_opt: true,
    };
    pub const NOSUBST: AblationConfig = AblationConfig {
        table_construction_opt: true,
        substitution_capture_opt: false,
    };
    pub const NOOPT: AblationConfig = AblationConfig {
        table_construction_opt: false,
        substitution_capture_opt: false,
    };

    pub const ALL: [AblationConfig; 4] = [
        AblationConfig::FULLOPT,
        AblationConfig::NOMTAB,
        AblationConfig::NOSUBST,
        AblationConfig::NOOPT,
    ];

    pub fn name(&self) -> &'static str {
        match (self.table_construction_opt, self.substitution_capture_opt) {
            (true, true) => "fullopt",
            (false, true) => "nomtab",
            (true, false) => "nosubst",
            (false, false) => "noopt",
        }
    }

    pub fn from_name(name: &str) -> Option<AblationConfig> {
        AblationConfig::ALL
            .iter()
            .copied()
            .find(|c| c.name() == name)
    }
}

impl Default for AblationConfig {
    fn default() -> Self {
        AblationConfig::FULLOPT
    }
}

fn ws() -> Pattern {
    Pattern::one_of(b" \t\n\r").star()
}

fn digits1() -> Pattern {
    Pattern::range(b'0', b'9').plus()
}

fn hex_digit() -> Pattern {
    let mut set = ByteSet::from_range(b'0', b'9');
    set = set.union(&ByteSet::from_range(b'a', b'f'));
    set = set.union(&ByteSet::from_range(b'A', b'F'));
    Pattern::set(set)
}

/// `\uXXXX` bodies after the `u`: a high surrogate must be followed by
/// `\u` and a low surrogate; BMP code points must not be surrogates.
fn unicode_escape(substitution: bool) -> Pattern {
    let hi_half = Pattern::one_of(b"dD")
        .then(Pattern::one_of(b"89aAbB"))
        .then(hex_digit())
        .then(hex_digit())
        .simple();
    let lo_half = Pattern::one_of(b"dD")
        .then(Pattern::one_of(b"cdefCDEF"))
        .then(hex_digit())
        .then(hex_digit())
        .simple();
    let surrogate_pair = hi_half
        .then(Pattern::lit("\\u"))
        .then(lo_half)
        .apply("surrogate");

    let any_surrogate_prefix = Pattern::one_of(b"dD").then(Pattern::one_of(b"89abcdefABCDEF"));
    let bmp = any_surrogate_prefix
        .not_pred()
        .then(
            hex_digit()
                .then(hex_digit())
                .then(hex_digit())
                .then(hex_digit())
                .simple(),
        )
        .apply("proc_uesc");

    let u = if substitution {
        Pattern::lit("u").constant(CapturedValue::text(""))
    } else {
        Pattern::lit("u")
    };
    u.then(surrogate_pair.or(bmp))
}

/// Bytes allowed raw inside a string: everything but `"`, `\`, and
/// control characters 0x00–0x1F.
fn string_plain_set() -> ByteSet {
    let mut set = ByteSet::ALL;
    for b in 0x00..=0x1f {
        set.remove(b);
    }
    set.remove(b'"');
    set.remove(b'\\');
    set
}

/// String rule body. With substitution: `{~ StringBody ~}` where escapes
/// replace their spans in one buffer. Without: fragments are captured,
/// collected into a list, and merged.
fn string_rule(substitution: bool) -> Pattern {
    let plain = Pattern::set(string_plain_set()).plus();
    let identity_escapes = Pattern::one_of(b"\"\\/");
    let control_escapes = Pattern::one_of(b"bfnrt").apply("str_esc");

    let body = if substitution {
        let backslash = Pattern::lit("\\").constant(CapturedValue::text(""));
        let escape = backslash.then(
            identity_escapes
                .or(control_escapes)
                .or(unicode_escape(true)),
        );
        plain.or(escape.plus()).star().subst()
    } else {
        let escape = Pattern::lit("\\").then(
            identity_escapes
                .simple()
                .or(control_escapes)
                .or(unicode_escape(false)),
        );
        plain
            .simple()
            .or(escape.plus())
            .star()
            .table()
            .apply("fast_merge")
    };

    ws().then(Pattern::lit("\""))
        .then(body)
        .then(Pattern::lit("\""))
}

fn number_rule() -> Pattern {
    let int_part =
        Pattern::lit("0").or(Pattern::range(b'1', b'9').then(Pattern::range(b'0', b'9').star()));
    let fract = Pattern::lit(".").then(digits1()).opt();
    let exp = Pattern::one_of(b"eE")
        .then(Pattern::one_of(b"+-").opt())
        .then(digits1())
        .opt();
    Pattern::lit("-")
        .opt()
        .then(int_part)
        .then(fract)
        .then(exp)
        .apply("tonumber")
}

/// Collect-then-build: gather the flat key/value list, make the map once.
fn object_rule_table() -> Pattern {
    let member = Pattern::call("String")
        .then(ws())
        .then(Pattern::lit(":"))
        .then(Pattern::call("JSON"))
        .then(ws());
    let members = member.clone().then(Pattern::lit(",").then(member).star());
    Pattern::lit("{")
        .then(members.or(ws()))
        .then(Pattern::lit("}"))
        .table()
        .apply("make_table")
}

/// Accumulator construction: start from an empty map and fold pairs in.
fn object_rule_fold() -> Pattern {
    let pair = Pattern::call("String")
        .then(ws())
        .then(Pattern::lit(":"))
        .then(Pattern::call("JSON"))
        .group()
        .then(ws());
    let members = pair.clone().then(Pattern::lit(",").then(pair).star());
    Pattern::lit("{")
        .constant(CapturedValue::Map(IndexMap::new()))
        .then(members.or(ws()))
        .then(Pattern::lit("}"))
        .fold("add_prop")
}

fn array_rule() -> Pattern {
    let element = Pattern::call("JSON").then(ws());
    let elements = element.clone().then(Pattern::lit(",").then(element).star());
    Pattern::lit("[")
        .then(elements.or(ws()))
        .then(Pattern::lit("]"))
        .table()
}

/// Builds a map from the even-length flat list `[k1, v1, k2, v2, ...]`,
/// reserving the hash capacity up front. Later duplicates win.
pub fn make_table(flat: Vec<CapturedValue>) -> CapturedValue {
    assert!(
        flat.len().is_multiple_of(2),
        "object key/value list has odd length {}",
        flat.len()
    );
    let mut map: IndexMap<Vec<u8>, CapturedValue> = IndexMap::with_capacity(flat.len() / 2);
    let mut it = flat.into_iter();
    while let Some(key) = it.next() {
        let value = it.next().expect("even-length list");
        let key = match key {
            CapturedValue::Text(t) => t,
            other => panic!("object key is not a string: {other:?}"),
        };
        map.insert(key, value);
    }
    CapturedValue::Map(map)
}

fn callbacks() -> Callbacks {
    let mut cbs = Callbacks::new();
    cbs.function("tonumber", |vals| {
        let text = vals[0].as_str().expect("number text is ASCII");
        let n: f64 = text.parse().expect("grammar-shaped number parses");
        vec![CapturedValue::Number(n)]
    });
    cbs.function("make_table", |vals| {
        let flat = match &vals[0] {
            CapturedValue::List(items) => items.clone(),
            other => panic!("make_table expects a list, got {other:?}"),
        };
        vec![make_table(flat)]
    });
    cbs.fold("add_prop", |acc, pair| {
        let mut map = match acc {
            CapturedValue::Map(m) => m,
            other => panic!("add_prop accumulator is not a map: {other:?}"),
        };
        match pair {
            CapturedValue::List(mut kv) if kv.len() == 2 => {
                let value = kv.pop().expect("pair value");
                let key = match kv.pop().expect("pair key") {
                    CapturedValue::Text(t) => t,
                    other => panic!("object key is not a string: {other:?}"),
                };
                map.insert(key, value);
            }
            other => panic!("add_prop expects a [key, value] pair, got {other:?}"),
        }
        CapturedValue::Map(map)
    });
    cbs.function("fast_merge", |vals| {
        let fragments = match &vals[0] {
            CapturedValue::List(items) => items,
            other => panic!("fast_merge expects a list, got {other:?}"),
        };
        let total: usize = fragments
            .iter()
            .map(|f| f.as_text().map_or(0, <[u8]>::len))
            .sum();
        let mut merged = Vec::with_capacity(total);
        for f in fragments {
            merged.extend_from_slice(f.as_text().expect("string fragment"));
        }
        vec![CapturedValue::Text(merged)]
    });
    cbs.function("str_esc", |vals| {
        let tag = vals[0].as_text().expect("escape tag")[0];
        vec![CapturedValue::text(decode_escape(tag))]
    });
    cbs.function("proc_uesc", |vals| {
        let hex = vals[0].as_str().expect("hex digits");
        let decoded = decode_unicode_escape(hex, None).expect("grammar excludes surrogates");
        vec![CapturedValue::text(decoded)]
    });
    cbs.function("surrogate", |vals| {
        let hi = vals[0].as_str().expect("high surrogate hex");
        let lo = vals[1].as_str().expect("low surrogate hex");
        let decoded = decode_unicode_escape(hi, Some(lo)).expect("grammar shapes a valid pair");
        vec![CapturedValue::text(decoded)]
    });
    cbs
}

/// Builds the JSON grammar for one configuration. Always validates.
pub fn build_json_grammar(cfg: AblationConfig) -> Grammar {
    let object = if cfg.table_construction_opt {
        object_rule_table()
    } else {
        object_rule_fold()
    };

    let value_choice = Pattern::call("Number")
        .or(Pattern::call("Object"))
        .or(Pattern::call("Array"))
        .or(Pattern::call("String"))
        .or(Pattern::call("True"))
        .or(Pattern::call("False"))
        .or(Pattern::call("Null"));

    let rules = vec![
        ("doc", Pattern::call("JSON").then(ws()).then(Pattern::eof())),
        ("JSON", ws().then(value_choice)),
        ("Object", object),
        ("Array", array_rule()),
        ("String", string_rule(cfg.substitution_capture_opt)),
        ("Number", number_rule()),
        (
            "True",
            Pattern::lit("true").constant(CapturedValue::Bool(true)),
        ),
        (
            "False",
            Pattern::lit("false").constant(CapturedValue::Bool(false)),
        ),
        ("Null", Pattern::lit("null").constant(CapturedValue::Null)),
    ];

    let grammar = Grammar::new(rules, "doc", callbacks());
    debug_assert!(grammar.validate().is_ok(), "{}", grammar.validate());
    grammar
}
