//! Substitution captures rewrite matched text in a single output buffer:
//! uncaptured bytes are copied verbatim, each inner capture's span is
//! replaced by its value.
//!
//! ```bash
//! cargo run -p pegmatch --example substitution_capture
//! ```

use pegmatch::peg::{Callbacks, CapturedValue, Grammar, Pattern};

fn main() {
    // Decode backslash escapes the way a string parser would:
    //   body   <- {~ (plain+ / escape)* ~}
    //   escape <- ('\' -> '') ([nt] -> decode)
    let mut callbacks = Callbacks::new();
    callbacks.function("decode", |values| {
        let tag = values[0].as_text().unwrap()[0];
        let decoded = match tag {
            b'n' => "\n",
            b't' => "\t",
            _ => unreachable!(),
        };
        vec![CapturedValue::text(decoded)]
    });

    let plain = Pattern::none_of(b"\\").plus();
    let escape = Pattern::lit("\\")
        .constant(CapturedValue::text(""))
        .then(Pattern::one_of(b"nt").apply("decode"));
    let body = plain.or(escape).star().subst();

    let grammar = Grammar::new(vec![("body", body)], "body", callbacks)
        .compile()
        .unwrap();

    let input = r"col1\tcol2\nrow";
    let outcome = grammar.run(input.as_bytes(), 0).unwrap();
    let decoded = outcome.values()[0].as_str().unwrap().to_string();
    println!("input ({} bytes):   {input}", input.len());
    println!("decoded ({} bytes):", decoded.len());
    println!("{decoded}");

    // A substitution with no inner captures is the identity; the counter
    // in the match stats shows the single buffer it allocates.
    let identity = Grammar::single(Pattern::any(1).star().subst())
        .compile()
        .unwrap();
    let outcome = identity.run(b"untouched", 0).unwrap();
    println!(
        "identity: {:?} ({} text buffer)",
        outcome.values()[0].as_str().unwrap(),
        outcome.stats().text_allocs,
    );
}
