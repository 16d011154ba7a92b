//! `validate` and `orthant` subcommands.

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use onebit_mmse::linalg::RMatrix;
use onebit_mmse::orthant::{
    orthant_closed, orthant_from_precision, orthant_mc, orthant_prob, orthant_qmc, orthant_quadrature_p4,
    OrthantOptions,
};
use onebit_mmse::validation::{run_suite, CheckOutcome, Suite};

use crate::parse::parse_rows;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Orthant,
    Consistency,
    Asymptotic,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(value_enum)]
    pub suite: SuiteArg,
    /// Emit the outcomes as JSON instead of one line per check.
    #[arg(long)]
    pub json: bool,
}

/// The report text and whether every check passed.
pub fn run_validate(args: &ValidateArgs) -> Result<(String, bool)> {
    let suite = match args.suite {
        SuiteArg::Orthant => Suite::Orthant,
        SuiteArg::Consistency => Suite::Consistency,
        SuiteArg::Asymptotic => Suite::Asymptotic,
        SuiteArg::All => Suite::All,
    };
    let outcomes = run_suite(suite)?;
    let all_passed = outcomes.iter().all(|o| o.passed);
    let text = if args.json {
        serde_json::to_string_pretty(&outcomes)?
    } else {
        let mut lines: Vec<String> = outcomes.iter().map(line).collect();
        let failed = outcomes.iter().filter(|o| !o.passed).count();
        lines.push(format!("{} checks, {} failed", outcomes.len(), failed));
        lines.join("\n")
    };
    Ok((text, all_passed))
}

fn line(o: &CheckOutcome) -> String {
    format!(
        "{} [{}] {}: measured {:.3e}, bound {:.3e}",
        if o.passed { "PASS" } else { "FAIL" },
        o.suite,
        o.name,
        o.measured,
        o.bound
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrthantMethodArg {
    /// Closed form, four-variate quadrature or quasi-Monte Carlo by dimension.
    Auto,
    Closed,
    P4,
    Qmc,
    Mc,
}

#[derive(Debug, Clone, Args)]
pub struct OrthantArgs {
    /// Symmetric positive definite matrix, rows separated by ';'.
    #[arg(long, allow_hyphen_values = true)]
    pub cov: String,
    /// Interpret the matrix as a precision (inverse covariance).
    #[arg(long)]
    pub precision: bool,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: OrthantMethodArg,
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Samples for the plain Monte Carlo method.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
}

pub fn run_orthant(args: &OrthantArgs) -> Result<String> {
    let rows = parse_rows(&args.cov, |e| Ok(e.parse::<f64>()?))?;
    let p = rows.len();
    if rows[0].len() != p {
        bail!(onebit_mmse::Error::DimensionMismatch {
            context: "orthant matrix",
            expected: format!("{p}x{p}"),
            actual: format!("{p}x{}", rows[0].len()),
        });
    }
    let m = RMatrix::from_fn(p, p, |i, j| rows[i][j]);
    let opts = OrthantOptions::with_target(args.tolerance, args.seed);
    let result = if args.precision {
        if args.method != OrthantMethodArg::Auto {
            bail!("--precision only supports --method auto");
        }
        orthant_from_precision(&m, &opts)?
    } else {
        match args.method {
            OrthantMethodArg::Auto => orthant_prob(&m, &opts)?,
            OrthantMethodArg::Closed => orthant_closed(&m)?,
            OrthantMethodArg::P4 => orthant_quadrature_p4(&m)?,
            OrthantMethodArg::Qmc => orthant_qmc(&m, &opts)?,
            OrthantMethodArg::Mc => orthant_mc(&m, args.samples, args.seed)?,
        }
    };
    Ok(serde_json::to_string_pretty(&result)?)
}
