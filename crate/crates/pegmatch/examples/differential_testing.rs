//! Check the compiled matcher against the brute-force oracle on a batch
//! of randomized pattern/path pairs.
//!
//! ```bash
//! cargo run -p pegmatch --example differential_testing
//! ```

use pegmatch::glob::{compile_glob, oracle_match};

fn main() {
    // A tiny deterministic generator is enough here; the test suite runs
    // the full randomized corpus.
    let mut seed = 0x2545F4914F6CDD1Du64;
    let mut next = move || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        seed
    };

    const PATTERN_CHARS: &[char] = &['a', 'b', '/', '*', '?', '[', ']', '!', '{', '}', ','];
    const PATH_CHARS: &[char] = &['a', 'b', '/'];

    let mut valid = 0u32;
    let mut invalid = 0u32;
    let mut matched = 0u32;
    let mut disagreements = 0u32;

    while valid < 2_000 {
        let len = (next() % 13) as usize;
        let pattern: String = (0..len)
            .map(|_| PATTERN_CHARS[(next() % PATTERN_CHARS.len() as u64) as usize])
            .collect();
        let compiled = match compile_glob(&pattern) {
            Ok(c) => c,
            Err(_) => {
                invalid += 1;
                continue;
            }
        };
        let path: String = (0..(next() % 17) as usize)
            .map(|_| PATH_CHARS[(next() % PATH_CHARS.len() as u64) as usize])
            .collect();

        let fast = compiled.matches(&path);
        let slow = oracle_match(&pattern, &path).unwrap();
        if fast != slow {
            disagreements += 1;
            println!("DISAGREE: pattern {pattern:?} path {path:?} fast={fast} slow={slow}");
        }
        matched += fast as u32;
        valid += 1;
    }

    println!("checked {valid} valid pairs ({invalid} invalid patterns skipped)");
    println!("matches: {matched}, disagreements: {disagreements}");
    assert_eq!(disagreements, 0);
}
