//! Driver for the `weil` command: validated configuration, verification
//! suites over `weil-core`, and deterministic JSON or CSV output.

pub mod config;
pub mod dump;
pub mod error;
pub mod report;
pub mod suites;

use std::io::Write as _;

pub use config::{Args, Format, Mode, RunConfig};
pub use error::{CliError, Result};
pub use report::{Report, SuiteResult};
pub use suites::Context;

/// Instantiates `$body` with the const `$P` bound to the runtime prime.
#[macro_export]
macro_rules! with_prime {
    ($p:expr, $P:ident => $body:expr) => {
        match $p {
            3 => {
                const $P: u32 = 3;
                $body
            }
            5 => {
                const $P: u32 = 5;
                $body
            }
            7 => {
                const $P: u32 = 7;
                $body
            }
            11 => {
                const $P: u32 = 11;
                $body
            }
            13 => {
                const $P: u32 = 13;
                $body
            }
            other => Err($crate::CliError::UnsupportedPrime(other)),
        }
    };
}

/// Rendered output and whether every check passed.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub success: bool,
}

pub fn verify<const P: u32>(config: RunConfig) -> Result<Report> {
    let ctx = Context::<P>::new(config)?;
    let suites = suites::all_suites(&ctx)?;
    let normalization = suites::normalization_report(&ctx);
    Ok(Report::new(ctx.config.clone(), suites, Some(normalization)))
}

fn render_report(report: &Report) -> Result<Outcome> {
    let text = match report.config.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            s
        }
        Format::Csv => report.to_csv(),
    };
    Ok(Outcome { text, success: report.passed })
}

fn run_typed<const P: u32>(config: RunConfig) -> Result<Outcome> {
    match config.mode {
        Mode::Verify => render_report(&verify::<P>(config)?),
        Mode::Reduce => {
            let ctx = Context::<P>::new(config)?;
            let suites = vec![suites::reduction_suite(&ctx)?, suites::duality_suite(&ctx)?];
            render_report(&Report::new(ctx.config.clone(), suites, None))
        }
        Mode::Weil => {
            let text = config.matrix.clone().unwrap_or_default();
            let ctx = Context::<P>::new(config)?;
            Ok(Outcome { text: dump::weil_matrix(&ctx, &text)?, success: true })
        }
        Mode::Kernels => Ok(Outcome { text: dump::kernels(&Context::<P>::new(config)?)?, success: true }),
        Mode::Lagrangians => Ok(Outcome { text: dump::lagrangians(&Context::<P>::new(config)?)?, success: true }),
        Mode::Correspondences => {
            Ok(Outcome { text: dump::correspondences(&Context::<P>::new(config)?)?, success: true })
        }
    }
}

pub fn run(config: RunConfig) -> Result<Outcome> {
    config.validate()?;
    with_prime!(config.p, P => run_typed::<P>(config))
}

/// Writes to `--out` when given, else to standard output.
pub fn emit(config: &RunConfig, text: &str) -> Result<()> {
    match &config.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}
