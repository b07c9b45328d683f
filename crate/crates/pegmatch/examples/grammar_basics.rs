//! Build a grammar from pattern combinators, validate it, and match.
//!
//! ```bash
//! cargo run -p pegmatch --example grammar_basics
//! ```

use pegmatch::peg::{Callbacks, CapturedValue, Grammar, Pattern};

fn main() {
    // A classic: balanced 'a'..'b' pairs.
    //   S <- 'a' S 'b' / ''
    let grammar = Grammar::new(
        vec![(
            "S",
            Pattern::lit("a")
                .then(Pattern::call("S"))
                .then(Pattern::lit("b"))
                .or(Pattern::empty()),
        )],
        "S",
        Callbacks::new(),
    );
    println!("validation: {}", grammar.validate());

    let compiled = grammar.compile().unwrap();
    for subject in ["", "ab", "aabb", "aab"] {
        let outcome = compiled.run(subject.as_bytes(), 0).unwrap();
        println!(
            "{subject:>6} -> {} (consumed {} of {} bytes)",
            if outcome.success() {
                "match"
            } else {
                "no match"
            },
            outcome.end().unwrap_or(0),
            subject.len(),
        );
    }

    // Left recursion is detected, not looped on.
    let bad = Grammar::new(
        vec![("S", Pattern::call("S").then(Pattern::lit("a")))],
        "S",
        Callbacks::new(),
    );
    println!("\nleft-recursive grammar: {}", bad.validate());

    // Captures: sum a comma-separated list of integers with a fold.
    //   list <- (int (',' int)*) >> add
    let mut callbacks = Callbacks::new();
    callbacks.function("int", |values| {
        let text = values[0].as_str().unwrap();
        vec![CapturedValue::Number(text.parse().unwrap())]
    });
    callbacks.fold("add", |acc, next| {
        CapturedValue::Number(acc.as_number().unwrap() + next.as_number().unwrap())
    });

    let int = Pattern::range(b'0', b'9').plus().apply("int");
    let list = int
        .clone()
        .then(Pattern::lit(",").then(int).star())
        .fold("add");
    let sum = Grammar::new(vec![("list", list)], "list", callbacks)
        .compile()
        .unwrap();

    let outcome = sum.run(b"10,20,12", 0).unwrap();
    println!("\nsum of \"10,20,12\" = {}", outcome.values()[0]);
}
