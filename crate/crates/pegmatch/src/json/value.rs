//! Parsed JSON values and the canonical serializer.

use indexmap::IndexMap;

use crate::json::JsonError;
use crate::peg::CapturedValue;

/// A parsed JSON document value.
///
/// Strings are valid UTF-8 with escapes decoded and surrogate pairs
/// combined. Object keys are unique; when the input repeats a key, the
/// later value wins. Null inside containers is an explicit value, never
/// an absence.
#[derive(Clone, Debug, PartialEq)]
pub enum JsonValue {
    Null,
    Bool(bool),
    Number(f64),
    String(String),
    Array(Vec<JsonValue>),
    Object(IndexMap<String, JsonValue>),
}

impl JsonValue {
    pub fn get(&self, key: &str) -> Option<&JsonValue> {
        match self {
            JsonValue::Object(m) => m.get(key),
            _ => None,
        }
    }

    pub fn index(&self, i: usize) -> Option<&JsonValue> {
        match self {
            JsonValue::Array(a) => a.get(i),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            JsonValue::Number(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            JsonValue::String(s) => Some(s),
            _ => None,
        }
    }

    /// Canonical text: object keys in sorted byte order, compact
    /// separators, numbers in shortest round-trip decimal digits.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        write_canonical(self, &mut out);
        out
    }
}

/// Shortest decimal digits that parse back to the same double. Display
/// never switches to exponent notation, so overflow sentinels keep the
/// round trip: `1e999` re-parses to infinity.
pub(crate) fn format_number(n: f64) -> String {
    if n.is_finite() {
        format!("{n}")
    } else if n.is_nan() {
        unreachable!("JSON numbers cannot be NaN")
    } else if n > 0.0 {
        "1e999".to_string()
    } else {
        "-1e999".to_string()
    }
}

fn write_string(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\u{0008}' => out.push_str("\\b"),
            '\u{000C}' => out.push_str("\\f"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

fn write_canonical(root: &JsonValue, out: &mut String) {
    // Explicit work stack: canonical output of arbitrarily deep documents
    // must not recurse natively.
    enum Task<'a> {
        Value(&'a JsonValue),
        Text(&'static str),
        Key(&'a str),
    }
    let mut work = vec![Task::Value(root)];
    while let Some(task) = work.pop() {
        match task {
            Task::Text(t) => out.push_str(t),
            Task::Key(k) => {
                write_string(k, out);
                out.push(':');
            }
            Task::Value(v) => match v {
                JsonValue::Null => out.push_str("null"),
                JsonValue::Bool(true) => out.push_str("true"),
                JsonValue::Bool(false) => out.push_str("false"),
                JsonValue::Number(n) => out.push_str(&format_number(*n)),
                JsonValue::String(s) => write_string(s, out),
                JsonValue::Array(items) => {
                    out.push('[');
                    work.push(Task::Text("]"));
                    for (i, item) in items.iter().enumerate().rev() {
                        work.push(Task::Value(item));
                        if i > 0 {
                            work.push(Task::Text(","));
                        }
                    }
                }
                JsonValue::Object(map) => {
                    out.push('{');
                    work.push(Task::Text("}"));
                    let mut entries: Vec<(&String, &JsonValue)> = map.iter().collect();
                    entries.sort_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()));
                    for (i, (k, v)) in entries.iter().enumerate().rev() {
                        work.push(Task::Value(v));
                        work.push(Task::Key(k));
                        if i > 0 {
                            work.push(Task::Text(","));
                        }
                    }
                }
            },
        }
    }
}

fn utf8(bytes: Vec<u8>) -> Result<String, JsonError> {
    String::from_utf8(bytes).map_err(|_| JsonError::InvalidUtf8)
}

/// Converts an engine value into a JSON value, validating string UTF-8.
/// Iterative: document depth is bounded by memory, not the native stack.
pub(crate) fn capture_to_json(root: CapturedValue) -> Result<JsonValue, JsonError> {
    enum Frame {
        Arr(Vec<JsonValue>, std::vec::IntoIter<CapturedValue>),
        Obj(
            IndexMap<String, JsonValue>,
            String,
            indexmap::map::IntoIter<Vec<u8>, CapturedValue>,
        ),
    }

    let mut frames: Vec<Frame> = Vec::new();
    let mut pending = root;

    loop {
        let finished = match pending {
            CapturedValue::Text(t) => JsonValue::String(utf8(t)?),
            CapturedValue::Number(n) => JsonValue::Number(n),
            CapturedValue::Bool(b) => JsonValue::Bool(b),
            CapturedValue::Null => JsonValue::Null,
            CapturedValue::List(items) => {
                let cap = items.len();
                let mut it = items.into_iter();
                match it.next() {
                    None => JsonValue::Array(Vec::new()),
                    Some(first) => {
                        frames.push(Frame::Arr(Vec::with_capacity(cap), it));
                        pending = first;
                        continue;
                    }
                }
            }
            CapturedValue::Map(map) => {
                let cap = map.len();
                let mut it = map.into_iter();
                match it.next() {
                    None => JsonValue::Object(IndexMap::new()),
                    Some((k, v)) => {
                        frames.push(Frame::Obj(IndexMap::with_capacity(cap), utf8(k)?, it));
                        pending = v;
                        continue;
                    }
                }
            }
        };

        let mut done = finished;
        loop {
            match frames.last_mut() {
                None => return Ok(done),
                Some(Frame::Arr(out, it)) => {
                    out.push(done);
                    if let Some(next) = it.next() {
                        pending = next;
                        break;
                    }
                    match frames.pop() {
                        Some(Frame::Arr(out, _)) => done = JsonValue::Array(out),
                        _ => unreachable!(),
                    }
                }
                Some(Frame::Obj(out, key, it)) => {
                    out.insert(std::mem::take(key), done);
                    if let Some((k, next)) = it.next() {
                        *key = utf8(k)?;
                        pending = next;
                        break;
                    }
                    match frames.pop() {
                        Some(Frame::Obj(out, _, _)) => done = JsonValue::Object(out),
                        _ => unreachable!(),
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_sorts_keys_and_compacts() {
        let mut m = IndexMap::new();
        m.insert("b".to_string(), JsonValue::Number(2.0));
        m.insert("a".to_string(), JsonValue::Array(vec![JsonValue::Null]));
        let v = JsonValue::Object(m);
        assert_eq!(v.to_canonical_string(), r#"{"a":[null],"b":2}"#);
    }

    #[test]
    fn canonical_escapes() {
        let v = JsonValue::String("a\"\\\n\u{0001}é".to_string());
        assert_eq!(v.to_canonical_string(), "\"a\\\"\\\\\\n\\u0001é\"");
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(-0.5), "-0.5");
        assert_eq!(format_number(1e21), "1000000000000000000000");
        assert_eq!(format_number(f64::INFINITY), "1e999");
    }
}
