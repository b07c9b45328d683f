//! Benchmark harness and stress-case generators.
//!
//! Measurements follow a fixed protocol: a number of untimed warmup
//! iterations (default 3), then a number of timed iterations (default
//! 10); the reported median is taken over the timed iterations only.
//! Callers time exactly the work they pass in — compile or setup cost
//! stays outside the closure.

use std::fmt;
use std::time::Instant;

/// Iteration counts for one measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchOptions {
    pub warmup: u32,
    pub runs: u32,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            warmup: 3,
            runs: 10,
        }
    }
}

/// One measurement's summary.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub name: String,
    pub warmup_runs: u32,
    pub timed_runs: u32,
    /// Median over the timed runs (for an even count, the mean of the
    /// two middle samples).
    pub median_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    /// Bytes the measured work processes per iteration.
    pub bytes: u64,
    /// Throughput at the median, in MB/s (1 MB = 10^6 bytes).
    pub mbps: f64,
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<40} median {:>9.3} ms  min {:>9.3}  max {:>9.3}  {:>10} B  {:>8.2} MB/s",
            self.name, self.median_ms, self.min_ms, self.max_ms, self.bytes, self.mbps
        )
    }
}

/// Runs `work` under the warmup/timed protocol and summarizes the timed
/// samples. `bytes` is the per-iteration payload size used for the
/// throughput figure (pass 0 when throughput is meaningless).
pub fn measure<F: FnMut()>(
    name: impl Into<String>,
    opts: BenchOptions,
    bytes: u64,
    mut work: F,
) -> BenchReport {
    assert!(opts.runs > 0, "need at least one timed run");
    for _ in 0..opts.warmup {
        work();
    }
    let mut samples_ms: Vec<f64> = Vec::with_capacity(opts.runs as usize);
    for _ in 0..opts.runs {
        let start = Instant::now();
        work();
        samples_ms.push(start.elapsed().as_secs_f64() * 1e3);
    }
    summarize(name.into(), opts, bytes, samples_ms)
}

fn summarize(
    name: String,
    opts: BenchOptions,
    bytes: u64,
    mut samples_ms: Vec<f64>,
) -> BenchReport {
    samples_ms.sort_by(|a, b| a.partial_cmp(b).expect("timings are finite"));
    let n = samples_ms.len();
    let median_ms = if n % 2 == 1 {
        samples_ms[n / 2]
    } else {
        (samples_ms[n / 2 - 1] + samples_ms[n / 2]) / 2.0
    };
    let mbps = if bytes == 0 || median_ms == 0.0 {
        0.0
    } else {
        bytes as f64 / (1_000.0 * median_ms)
    };
    BenchReport {
        name,
        warmup_runs: opts.warmup,
        timed_runs: opts.runs,
        median_ms,
        min_ms: samples_ms[0],
        max_ms: samples_ms[n - 1],
        bytes,
        mbps,
    }
}

/// The machine-readable line format: one record per line, fixed field
/// names, plottable without further tooling.
pub fn record_line(suite: &str, case: &str, config: &str, report: &BenchReport) -> String {
    format!(
        "suite={suite} case={case} config={config} median_ms={:.6} min_ms={:.6} max_ms={:.6} bytes={} mbps={:.3}",
        report.median_ms, report.min_ms, report.max_ms, report.bytes, report.mbps
    )
}

/// The stress families: patterns with gradually growing variable-length
/// structure, in matching and non-matching flavors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StressFamilyId {
    /// `a*a*...a*b` against a long run of `a`s.
    StarChain,
    /// `**/a` against ever deeper `x/x/.../` paths.
    DsegDepth,
    /// `{a,b}{a,b}.../end` against `aa...a/...`.
    BracePower,
}

impl StressFamilyId {
    pub const ALL: [StressFamilyId; 3] = [
        StressFamilyId::StarChain,
        StressFamilyId::DsegDepth,
        StressFamilyId::BracePower,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StressFamilyId::StarChain => "star-chain",
            StressFamilyId::DsegDepth => "dseg-depth",
            StressFamilyId::BracePower => "brace-power",
        }
    }

    pub fn from_name(name: &str) -> Option<StressFamilyId> {
        StressFamilyId::ALL
            .iter()
            .copied()
            .find(|f| f.name() == name)
    }
}

/// One stress case: family, size, and whether the subject should match.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StressFamily {
    pub id: StressFamilyId,
    pub n: usize,
    pub expect_match: bool,
}

/// Deterministic generator: `(glob pattern, subject path)`.
pub fn gen_stress(family: &StressFamily) -> (String, String) {
    assert!(family.n >= 1, "stress size must be at least 1");
    match family.id {
        StressFamilyId::StarChain => {
            let pattern = format!("{}b", "a*".repeat(family.n));
            let mut subject = "a".repeat(10_000);
            if family.expect_match {
                subject.push('b');
            }
            (pattern, subject)
        }
        StressFamilyId::DsegDepth => {
            let pattern = "**/a".to_string();
            let mut subject = "x/".repeat(family.n);
            subject.push_str(if family.expect_match { "a" } else { "y" });
            (pattern, subject)
        }
        StressFamilyId::BracePower => {
            let pattern = format!("{}/end", "{a,b}".repeat(family.n));
            let subject = format!(
                "{}{}",
                "a".repeat(family.n),
                if family.expect_match { "/end" } else { "/nope" }
            );
            (pattern, subject)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;

    #[test]
    fn warmup_and_timed_counts() {
        let calls = Cell::new(0u32);
        let opts = BenchOptions { warmup: 4, runs: 7 };
        let report = measure("counts", opts, 0, || calls.set(calls.get() + 1));
        assert_eq!(calls.get(), 11); // exactly warmup + runs
        assert_eq!(report.warmup_runs, 4);
        assert_eq!(report.timed_runs, 7);
        assert!(report.min_ms <= report.median_ms && report.median_ms <= report.max_ms);
    }

    #[test]
    fn median_of_even_count_is_middle_mean() {
        let opts = BenchOptions { warmup: 0, runs: 4 };
        let report = summarize("even".into(), opts, 0, vec![4.0, 1.0, 3.0, 2.0]);
        assert_eq!(report.median_ms, 2.5);
        assert_eq!(report.min_ms, 1.0);
        assert_eq!(report.max_ms, 4.0);
    }

    #[test]
    fn throughput_uses_decimal_megabytes() {
        let opts = BenchOptions { warmup: 0, runs: 1 };
        let report = summarize("tp".into(), opts, 2_000_000, vec![10.0]);
        assert!((report.mbps - 200.0).abs() < 1e-9);
    }

    #[test]
    fn stress_generators_match_their_definitions() {
        let (p, s) = gen_stress(&StressFamily {
            id: StressFamilyId::StarChain,
            n: 2,
            expect_match: true,
        });
        assert_eq!(p, "a*a*b");
        assert_eq!(s.len(), 10_001);
        assert!(s.starts_with("aaaa") && s.ends_with('b'));

        let (p, s) = gen_stress(&StressFamily {
            id: StressFamilyId::BracePower,
            n: 2,
            expect_match: false,
        });
        assert_eq!(p, "{a,b}{a,b}/end");
        assert_eq!(s, "aa/nope");

        let (p, s) = gen_stress(&StressFamily {
            id: StressFamilyId::DsegDepth,
            n: 3,
            expect_match: true,
        });
        assert_eq!(p, "**/a");
        assert_eq!(s, "x/x/x/a");
    }

    #[test]
    fn generators_are_deterministic() {
        for id in StressFamilyId::ALL {
            for expect_match in [false, true] {
                let fam = StressFamily {
                    id,
                    n: 5,
                    expect_match,
                };
                assert_eq!(gen_stress(&fam), gen_stress(&fam));
            }
        }
    }

    #[test]
    fn stress_cases_really_match_or_not() {
        for id in StressFamilyId::ALL {
            for expect_match in [false, true] {
                let fam = StressFamily {
                    id,
                    n: 4,
                    expect_match,
                };
                let (pattern, subject) = gen_stress(&fam);
                let compiled = crate::glob::compile_glob(&pattern).unwrap();
                assert_eq!(
                    compiled.matches(&subject),
                    expect_match,
                    "{} n=4 expect_match={expect_match}",
                    id.name()
                );
            }
        }
    }

    #[test]
    fn record_schema_is_stable() {
        let opts = BenchOptions { warmup: 0, runs: 1 };
        let report = summarize("x".into(), opts, 10, vec![1.0]);
        assert_eq!(
            record_line("json", "tiny", "fullopt", &report),
            "suite=json case=tiny config=fullopt median_ms=1.000000 min_ms=1.000000 \
             max_ms=1.000000 bytes=10 mbps=0.010"
        );
    }
}
