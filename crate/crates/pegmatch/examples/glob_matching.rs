//! Compile glob patterns and match paths; dump a compiled pattern to see
//! what the translator built.
//!
//! ```bash
//! cargo run -p pegmatch --example glob_matching
//! ```

use pegmatch::glob::compile_glob;

fn main() {
    let cases = [
        (
            "src/*.c",
            &["src/main.c", "src/sub/main.c", "src/main.h"][..],
        ),
        (
            "**/test/**/*.{ts,js}",
            &[
                "pkg/test/unit/a.ts",
                "test/b.js",
                "pkg/test/b.rs",
                "pkg/src/a.ts",
            ][..],
        ),
        ("example.[!0-9]", &["example.a", "example.0", "example"][..]),
        ("a*b?c*x", &["aZZbQcZZx", "abQcx", "abcx"][..]),
        ("**/b/d/**", &["a/b/c/b/d/e", "b/d/x", "a/b/c"][..]),
    ];

    for (pattern, paths) in cases {
        let compiled = compile_glob(pattern).unwrap();
        println!("pattern: {pattern}");
        for path in paths {
            println!(
                "  {:<20} {}",
                path,
                if compiled.matches(path) {
                    "match"
                } else {
                    "nomatch"
                }
            );
        }
        println!();
    }

    // Invalid patterns are rejected with a reason and an offset.
    for bad in ["a**", "[abc", "{only}"] {
        println!("{bad:>8}: {}", compile_glob(bad).unwrap_err());
    }

    // The explain dump shows the compiled rule set, including which
    // searches got a first-character skip loop.
    let compiled = compile_glob("a*b?c*x").unwrap();
    println!("\n{}", compiled.explain());
}
