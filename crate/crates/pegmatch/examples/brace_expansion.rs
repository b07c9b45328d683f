//! Brace expansion and the segment-boundary cut.
//!
//! ```bash
//! cargo run -p pegmatch --example brace_expansion
//! ```

use pegmatch::glob::{
    check_opt, compile_glob, compile_glob_with, expand_braces, tokenize_glob, GlobOptions,
};

fn main() {
    for src in ["{audio,video}", "{ab,c{d,e}}", "{a,}"] {
        let tokens = tokenize_glob(src).unwrap();
        println!("{src:<14} expands to {:?}", expand_braces(&tokens[0]));
    }

    // The cut: when no branch crosses a segment and the tail reaches a
    // '/' cleanly, branches only need to match up to that slash.
    println!();
    let cases = [
        (vec!["Edit", "View"], "Stat/deep/*.x"),
        (vec!["a/b", "c"], "x/y"),
        (vec!["a", "b"], "x{y,z}/w"),
        (vec!["a", "b"], "no-slash-here"),
    ];
    for (branches, tail) in cases {
        match check_opt(&branches, tail) {
            Some(cut) => println!(
                "branches {branches:?} + tail {tail:?}: cut at P={:?}, Q={:?}",
                cut.prefix, cut.rest
            ),
            None => println!("branches {branches:?} + tail {tail:?}: no cut"),
        }
    }

    // What the cut buys: a chain of braces against a non-matching path.
    let pattern = format!("{}/end", "{a,b}".repeat(12));
    let subject = format!("{}/nope", "a".repeat(12));
    println!("\npattern {pattern}");

    let with_cut = compile_glob(&pattern).unwrap();
    let without = compile_glob_with(&pattern, GlobOptions { brace_cut: false }).unwrap();
    assert_eq!(with_cut.matches(&subject), without.matches(&subject));

    for (name, compiled) in [("cut on ", &with_cut), ("cut off", &without)] {
        let start = std::time::Instant::now();
        for _ in 0..100 {
            std::hint::black_box(compiled.matches(&subject));
        }
        println!(
            "  {name}: {:>10.1} us for 100 matches ({:?})",
            start.elapsed().as_secs_f64() * 1e6,
            compiled.optimizations()
        );
    }
}
