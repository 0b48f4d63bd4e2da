use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use weil_core::check_modulus;
use weil_core::symplectic::oriented_lagrangian_count;

use crate::error::{CliError, Result};

pub const DEFAULT_CAP: u128 = 10_000;
pub const DEFAULT_SAMPLE: u64 = 10_000;
pub const EXHAUSTIVE_LIMIT: u128 = 1_000_000;
pub const SUPPORTED_PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Verify,
    Weil,
    Kernels,
    Lagrangians,
    Reduce,
    Correspondences,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Exact verification of the canonical Weil representation over `F_p`.
#[derive(Clone, Debug, Parser)]
#[command(name = "weil", version)]
pub struct Args {
    /// Odd prime modulus.
    #[arg(long)]
    pub p: u64,
    /// Half the dimension of the symplectic space.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Mode::Verify)]
    pub mode: Mode,
    /// Number of sampled items for checks too large to run exhaustively.
    #[arg(long)]
    pub sample: Option<u64>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Symplectic matrix for `--mode weil`, rows separated by `;`.
    #[arg(long)]
    pub matrix: Option<String>,
    /// Report zero for every timing so that reports are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
    /// Triple count above which multiplicativity is sampled.
    #[arg(long, default_value_t = EXHAUSTIVE_LIMIT)]
    pub exhaustive_limit: u128,
}

/// A validated run configuration.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub p: u64,
    pub n: usize,
    pub mode: Mode,
    pub sample: Option<u64>,
    pub seed: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<String>,
    pub cap: u128,
    pub exhaustive_limit: u128,
    #[serde(skip)]
    pub no_timing: bool,
}

impl RunConfig {
    pub fn new(p: u64, n: usize) -> Self {
        Self {
            p,
            n,
            mode: Mode::Verify,
            sample: None,
            seed: 42,
            out: None,
            format: Format::Json,
            matrix: None,
            cap: DEFAULT_CAP,
            exhaustive_limit: EXHAUSTIVE_LIMIT,
            no_timing: false,
        }
    }

    /// Builds a configuration from parsed arguments and the `WEIL_CAP`
    /// environment variable.
    pub fn from_args(args: Args) -> Result<Self> {
        let cap = match std::env::var("WEIL_CAP") {
            Ok(s) => s
                .trim()
                .parse::<u128>()
                .map_err(|_| CliError::Config(format!("WEIL_CAP must be a positive integer (got {s:?})")))?,
            Err(_) => DEFAULT_CAP,
        };
        let config = Self {
            p: args.p,
            n: args.n,
            mode: args.mode,
            sample: args.sample,
            seed: args.seed,
            out: args.out,
            format: args.format,
            matrix: args.matrix,
            cap,
            exhaustive_limit: args.exhaustive_limit,
            no_timing: args.no_timing,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        check_modulus(self.p)?;
        if !SUPPORTED_PRIMES.contains(&self.p) {
            return Err(CliError::UnsupportedPrime(self.p));
        }
        if self.n == 0 {
            return Err(CliError::Config("n must be at least 1".into()));
        }
        if self.sample == Some(0) {
            return Err(CliError::Config("sample size must be positive".into()));
        }
        let count = oriented_lagrangian_count(self.p as u32, self.n);
        if count > self.cap {
            return Err(weil_core::WeilError::CapExceeded { count, cap: self.cap }.into());
        }
        if self.mode == Mode::Weil && self.matrix.is_none() {
            return Err(CliError::Config("--mode weil needs --matrix".into()));
        }
        Ok(())
    }

    pub fn with_sample(mut self, sample: u64) -> Self {
        self.sample = Some(sample);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn sample_size(&self) -> u64 {
        self.sample.unwrap_or(DEFAULT_SAMPLE)
    }
}
