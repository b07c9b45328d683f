//! Command-line front end: glob matching and filtering, JSON parsing,
//! benchmarks, and stress-case generation.
//!
//! Exit codes: 0 success (all paths matched / document valid), 1 semantic
//! negative (some path did not match / parse error), 2 usage or invalid
//! input.

use std::fs;
use std::io::{self, BufRead, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pegmatch::bench::{
    gen_stress, measure, record_line, BenchOptions, BenchReport, StressFamily, StressFamilyId,
};
use pegmatch::glob::{compile_glob_with, CompiledGlob, GlobOptions};
use pegmatch::json::{AblationConfig, JsonError, JsonParser};

#[derive(Parser)]
#[command(
    name = "pegmatch",
    version,
    about = "PEG-based glob matching and JSON parsing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Glob pattern operations.
    Glob {
        #[command(subcommand)]
        command: GlobCommand,
    },
    /// Parse a JSON file; optionally print its canonical form.
    Json {
        /// File to parse.
        file: String,
        /// Grammar configuration to parse with.
        #[arg(long, default_value = "fullopt")]
        ablation: String,
        /// Print the canonical serialization on success.
        #[arg(long)]
        canonical: bool,
    },
    /// Run a benchmark suite.
    Bench(BenchArgs),
    /// Emit one stress case: pattern on the first line, subject on the second.
    StressGen {
        /// star-chain, dseg-depth, or brace-power.
        family: String,
        /// Size parameter.
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Generate the matching flavor instead of the non-matching one.
        #[arg(long)]
        expect_match: bool,
    },
}

#[derive(Subcommand)]
enum GlobCommand {
    /// Match paths against a pattern; prints match/nomatch per path.
    Match {
        pattern: String,
        paths: Vec<String>,
        /// Dump the compiled rule set before matching.
        #[arg(long)]
        explain: bool,
        /// Brace-cut optimization toggle.
        #[arg(long, value_enum, default_value_t = CutFlag::On)]
        cut: CutFlag,
    },
    /// Echo the stdin paths that match the pattern.
    Filter {
        pattern: String,
        #[arg(long, value_enum, default_value_t = CutFlag::On)]
        cut: CutFlag,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// json, glob, or stress.
    suite: String,
    /// json: a JSON file. glob: a pattern file and a path file.
    inputs: Vec<String>,
    /// Untimed iterations before measurement.
    #[arg(long, default_value_t = 3)]
    warmup: u32,
    /// Timed iterations per report.
    #[arg(long, default_value_t = 10)]
    runs: u32,
    /// Matches per timed iteration in the stress suite (steadies
    /// microsecond-scale cases).
    #[arg(long, default_value_t = 100)]
    repeat: u32,
    /// Stress size parameter.
    #[arg(long, default_value_t = 12)]
    n: usize,
    /// Restrict the stress suite to one family.
    #[arg(long)]
    family: Option<String>,
    /// Brace-cut toggle for the glob suite.
    #[arg(long, value_enum, default_value_t = CutFlag::On)]
    cut: CutFlag,
    /// table for humans, records for machines.
    #[arg(long, value_enum, default_value_t = FormatFlag::Table)]
    format: FormatFlag,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CutFlag {
    On,
    Off,
}

impl CutFlag {
    fn options(self) -> GlobOptions {
        GlobOptions {
            brace_cut: self == CutFlag::On,
        }
    }

    fn config_name(self) -> &'static str {
        match self {
            CutFlag::On => "cut-on",
            CutFlag::Off => "cut-off",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatFlag {
    Table,
    Records,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Glob { command } => match command {
            GlobCommand::Match {
                pattern,
                paths,
                explain,
                cut,
            } => glob_match(&pattern, &paths, explain, cut),
            GlobCommand::Filter { pattern, cut } => glob_filter(&pattern, cut),
        },
        Command::Json {
            file,
            ablation,
            canonical,
        } => json_cmd(&file, &ablation, canonical),
        Command::Bench(args) => bench_cmd(args),
        Command::StressGen {
            family,
            n,
            expect_match,
        } => stress_gen_cmd(&family, n, expect_match),
    }
}

fn compile_pattern(pattern: &str, cut: CutFlag) -> Result<CompiledGlob, String> {
    compile_glob_with(pattern, cut.options()).map_err(|e| e.to_string())
}

fn glob_match(
    pattern: &str,
    paths: &[String],
    explain: bool,
    cut: CutFlag,
) -> Result<ExitCode, String> {
    let compiled = compile_pattern(pattern, cut)?;
    if explain {
        print!("{}", compiled.explain());
    }
    let mut all = true;
    for path in paths {
        let hit = compiled.matches(path);
        all &= hit;
        println!("{}", if hit { "match" } else { "nomatch" });
    }
    Ok(ExitCode::from(if all { 0 } else { 1 }))
}

fn glob_filter(pattern: &str, cut: CutFlag) -> Result<ExitCode, String> {
    let compiled = compile_pattern(pattern, cut)?;
    let stdin = io::stdin();
    let mut out = io::stdout().lock();
    for line in stdin.lock().lines() {
        let line = line.map_err(|e| e.to_string())?;
        let path = line.strip_suffix('\r').unwrap_or(&line);
        if compiled.matches(path) {
            writeln!(out, "{path}").map_err(|e| e.to_string())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn json_cmd(file: &str, ablation: &str, canonical: bool) -> Result<ExitCode, String> {
    let cfg = AblationConfig::from_name(ablation).ok_or_else(|| {
        format!("unknown ablation '{ablation}' (fullopt, nomtab, nosubst, noopt)")
    })?;
    let bytes = fs::read(file).map_err(|e| format!("cannot read {file}: {e}"))?;
    match JsonParser::new(cfg).parse(&bytes) {
        Ok(value) => {
            if canonical {
                println!("{}", value.to_canonical_string());
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(err @ JsonError::Parse { .. }) => {
            eprintln!("{file}: {err}");
            Ok(ExitCode::from(1))
        }
        Err(err) => {
            eprintln!("{file}: {err}");
            Ok(ExitCode::from(1))
        }
    }
}

fn emit(format: FormatFlag, suite: &str, case: &str, config: &str, report: &BenchReport) {
    match format {
        FormatFlag::Table => println!("{report}"),
        FormatFlag::Records => println!("{}", record_line(suite, case, config, report)),
    }
}

fn bench_cmd(args: BenchArgs) -> Result<ExitCode, String> {
    let opts = BenchOptions {
        warmup: args.warmup,
        runs: args.runs,
    };
    match args.suite.as_str() {
        "json" => {
            let [file] = args.inputs.as_slice() else {
                return Err("bench json needs exactly one input file".into());
            };
            let bytes = fs::read(file).map_err(|e| format!("cannot read {file}: {e}"))?;
            for cfg in AblationConfig::ALL {
                let parser = JsonParser::new(cfg);
                let report = measure(
                    format!("json {} {}", file, cfg.name()),
                    opts,
                    bytes.len() as u64,
                    || {
                        let _ = parser.validate(&bytes);
                    },
                );
                emit(args.format, "json", file, cfg.name(), &report);
            }
            Ok(ExitCode::SUCCESS)
        }
        "glob" => {
            let [pattern_file, path_file] = args.inputs.as_slice() else {
                return Err("bench glob needs a pattern file and a path file".into());
            };
            let patterns = read_lines(pattern_file)?;
            let paths = read_lines(path_file)?;
            let bytes: u64 = paths.iter().map(|p| p.len() as u64).sum();
            for (i, pattern) in patterns.iter().enumerate() {
                let compiled = compile_pattern(pattern, args.cut)
                    .map_err(|e| format!("pattern {}: {e}", i + 1))?;
                let report = measure(format!("glob {pattern}"), opts, bytes, || {
                    for path in &paths {
                        std::hint::black_box(compiled.matches(path));
                    }
                });
                emit(
                    args.format,
                    "glob",
                    &format!("p{:02}", i + 1),
                    args.cut.config_name(),
                    &report,
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        "stress" => {
            let families: Vec<StressFamilyId> = match &args.family {
                Some(name) => vec![StressFamilyId::from_name(name)
                    .ok_or_else(|| format!("unknown family '{name}'"))?],
                None => StressFamilyId::ALL.to_vec(),
            };
            for id in families {
                for expect_match in [true, false] {
                    let family = StressFamily {
                        id,
                        n: args.n,
                        expect_match,
                    };
                    let (pattern, subject) = gen_stress(&family);
                    let case = format!(
                        "{}-n{}-{}",
                        id.name(),
                        args.n,
                        if expect_match { "match" } else { "nomatch" }
                    );
                    // The cut only changes braced patterns; report both
                    // sides where it matters, the default side otherwise.
                    let cuts: &[CutFlag] = if id == StressFamilyId::BracePower {
                        &[CutFlag::On, CutFlag::Off]
                    } else {
                        &[CutFlag::On]
                    };
                    for &cut in cuts {
                        let compiled = compile_pattern(&pattern, cut)?;
                        let repeat = args.repeat.max(1);
                        let report = measure(
                            format!("stress {case} {}", cut.config_name()),
                            opts,
                            subject.len() as u64 * repeat as u64,
                            || {
                                for _ in 0..repeat {
                                    std::hint::black_box(compiled.matches(&subject));
                                }
                            },
                        );
                        emit(args.format, "stress", &case, cut.config_name(), &report);
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        other => Err(format!("unknown suite '{other}' (json, glob, stress)")),
    }
}

fn stress_gen_cmd(family: &str, n: usize, expect_match: bool) -> Result<ExitCode, String> {
    let id = StressFamilyId::from_name(family).ok_or_else(|| {
        format!("unknown family '{family}' (star-chain, dseg-depth, brace-power)")
    })?;
    if n == 0 {
        return Err("--n must be at least 1".into());
    }
    let (pattern, subject) = gen_stress(&StressFamily {
        id,
        n,
        expect_match,
    });
    println!("{pattern}");
    println!("{subject}");
    Ok(ExitCode::SUCCESS)
}

/// Newline-separated entries; CRLF tolerated, blank lines skipped.
fn read_lines(file: &str) -> Result<Vec<String>, String> {
    let text = fs::read_to_string(file).map_err(|e| format!("cannot read {file}: {e}"))?;
    Ok(text
        .lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
        .filter(|l| !l.is_empty())
        .collect())
}
