//! Batch suite runner: executes named verification suites against
//! configurable truncation sizes and writes a deterministic JSON report.
//!
//! Exit codes: 0 when every check passes, 1 when any check fails, 2 on
//! configuration or usage errors.

mod config;
mod report;
mod suites;

use clap::Parser;
use config::{parse_cutoff, RawConfig, SuiteConfig};
use report::VerificationReport;

#[derive(Debug, Parser)]
#[command(
    name = "picp",
    version,
    about = "Verification suites for partial-isometric shift representations at finite truncation"
)]
struct Cli {
    /// JSON configuration file; command-line flags override its fields.
    #[arg(long)]
    config: Option<std::path::PathBuf>,

    /// Comma-separated suite names (or "all").
    #[arg(long, value_delimiter = ',')]
    suite: Option<Vec<String>>,

    /// Truncation cutoff for half-line suites.
    #[arg(long)]
    cutoff: Option<u64>,

    /// Grid side length for the grid representation.
    #[arg(long)]
    grid: Option<usize>,

    /// Equality tolerance (spectral-norm residual threshold).
    #[arg(long)]
    tol: Option<f64>,

    /// Seed for the randomized checks.
    #[arg(long)]
    seed: Option<u64>,

    /// Report output path.
    #[arg(long)]
    out: Option<std::path::PathBuf>,

    /// List the available suites and exit.
    #[arg(long)]
    list: bool,

    /// Inject a deliberately failing check (negative control).
    #[arg(long)]
    inject_failure: bool,
}

fn main() {
    // Die quietly when a downstream pager closes the pipe instead of
    // panicking in println.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(run());
}

fn run() -> i32 {
    picp_core::tune_allocator();
    let cli = Cli::parse();

    if cli.list {
        for info in suites::registry() {
            println!("{:<20} {}  [{}]", info.name, info.description, info.paper_anchor);
        }
        return 0;
    }

    let mut raw: RawConfig = match &cli.config {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read config {}: {e}", path.display());
                    return 2;
                }
            };
            match serde_json::from_str(&text) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: invalid config: {e}");
                    return 2;
                }
            }
        }
        None => RawConfig::default(),
    };

    if let Some(suites) = cli.suite {
        raw.suites = Some(suites);
    }
    if let Some(cutoff) = cli.cutoff {
        raw.cutoff = Some(serde_json::json!(cutoff));
    }
    if let Some(grid) = cli.grid {
        raw.grid_n = Some(grid);
    }
    if let Some(tol) = cli.tol {
        let mut tols = raw.tolerances.unwrap_or_default();
        tols.eq_tol = Some(tol);
        raw.tolerances = Some(tols);
    }
    if let Some(seed) = cli.seed {
        raw.seed = Some(seed);
    }
    if let Some(out) = &cli.out {
        raw.out_path = Some(out.display().to_string());
    }
    if cli.inject_failure {
        raw.inject_failure = Some(true);
    }

    // Surface malformed embedded cutoffs before running anything.
    if let Some(v) = &raw.cutoff {
        if let Err(e) = parse_cutoff(v) {
            eprintln!("error: {e}");
            return 2;
        }
    }

    let config = match SuiteConfig::from_raw(raw, &suites::suite_names()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };

    let checks = suites::run_suites(&config);
    let report = VerificationReport::assemble(checks);

    for check in &report.checks {
        println!(
            "{} {:<45} residual {:>12.3e}  (threshold {:.1e}, {} ms)",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            check.residual,
            check.threshold,
            check.millis
        );
    }
    println!(
        "{}/{} checks passed",
        report.summary.passed, report.summary.total
    );

    let json = report.to_json_string();
    if let Some(path) = &config.out_path {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("error: cannot write report to {path}: {e}");
            return 2;
        }
    }

    if report.all_passed() {
        0
    } else {
        1
    }
}
