//! Parse JSON text, print its canonical form, and see how errors are
//! reported.
//!
//! ```bash
//! cargo run -p pegmatch --example json_parsing
//! ```

use pegmatch::json::{parse_json, JsonValue};

fn main() {
    let doc = r#"
        {
            "name": "deep thought",
            "answer": 42,
            "tags": ["big", "slow"],
            "ratio": 1.5e-3,
            "noted": null,
            "escape": "tab\there, music \ud834\udd1e"
        }
    "#;

    let value = parse_json(doc).unwrap();
    println!("canonical: {}", value.to_canonical_string());
    println!(
        "answer:    {:?}",
        value.get("answer").and_then(JsonValue::as_f64)
    );
    println!(
        "escape:    {:?}",
        value.get("escape").and_then(JsonValue::as_str)
    );

    // Parse errors carry the furthest byte offset reached.
    for bad in ["1 2", "0123", r#"{"a":}"#, r#""\ud800""#] {
        match parse_json(bad) {
            Err(err) => println!("{bad:>10} -> {err}"),
            Ok(v) => println!("{bad:>10} -> unexpectedly parsed {v:?}"),
        }
    }

    // Nesting depth is limited by the engine's heap stack, not the
    // native call stack.
    let deep = format!("{}{}", "[".repeat(10_000), "]".repeat(10_000));
    let parsed = parse_json(&deep).is_ok();
    println!("10k-deep array parses: {parsed}");
}
