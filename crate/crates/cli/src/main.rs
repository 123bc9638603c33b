use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use twoproduct_cli::report::read_report;
use twoproduct_cli::{diff_reports, exit, run, ConfigError, Format, SuiteConfig, Verdict};

#[derive(Parser)]
#[command(name = "twoproduct", version, about = "Run the two-product verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run suites and write a report.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Restrict to these suites; repeatable.
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
    },
    /// List suites with their anchors and expected verdicts.
    Suites,
    /// Compare two JSON reports.
    Diff { old: PathBuf, new: PathBuf },
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn configure(
    config: Option<PathBuf>,
    suites: Vec<String>,
    seed: Option<u64>,
    report: Option<PathBuf>,
    format: Option<String>,
) -> Result<SuiteConfig, ConfigError> {
    let mut cfg = match config {
        Some(p) => SuiteConfig::load(&p)?,
        None => SuiteConfig::default(),
    };
    if !suites.is_empty() {
        cfg.suites = suites;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if report.is_some() {
        cfg.report = report;
    }
    if let Some(f) = format {
        cfg.format = f.parse::<Format>()?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn verify(cfg: SuiteConfig) -> ExitCode {
    let (report, timings) = run(&cfg);
    for (s, (_, t)) in report.suites.iter().zip(&timings) {
        eprintln!(
            "{:<4} {:<28} {:>9} samples  {:>8.2?}",
            s.verdict.to_string().to_uppercase(),
            s.name,
            s.samples,
            t
        );
    }
    let body = match cfg.format {
        Format::Json => report.to_json(),
        Format::Md => report.to_markdown(),
    };
    match cfg.report_path() {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                if let Err(e) = std::fs::create_dir_all(dir) {
                    eprintln!("error: cannot create {}: {e}", dir.display());
                    return code(exit::CONFIG_ERROR);
                }
            }
            if let Err(e) = std::fs::write(&path, body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return code(exit::CONFIG_ERROR);
            }
            eprintln!("report written to {}", path.display());
        }
        None => print!("{body}"),
    }
    code(if report.verdict == Verdict::Pass {
        exit::PASS
    } else {
        exit::SUITE_FAILURE
    })
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify {
            config,
            suites,
            seed,
            report,
            format,
        } => match configure(config, suites, seed, report, format) {
            Ok(cfg) => verify(cfg),
            Err(e) => {
                eprintln!("error: {e}");
                code(exit::CONFIG_ERROR)
            }
        },
        Command::Suites => {
            for s in twoproduct_cli::suites::CATALOG {
                println!("{:<28} {:<8} {}", s.name, s.expected, s.anchor);
            }
            code(exit::PASS)
        }
        Command::Diff { old, new } => match (read_report(&old), read_report(&new)) {
            (Ok(a), Ok(b)) => {
                let d = diff_reports(&a, &b);
                print!("{d}");
                code(if d.suites.is_empty() {
                    exit::PASS
                } else {
                    exit::SUITE_FAILURE
                })
            }
            (Err(e), _) | (_, Err(e)) => {
                eprintln!("error: {e}");
                code(exit::CONFIG_ERROR)
            }
        },
    }
}
