//! `estimate`: one conditional-mean estimate as JSON.

use anyhow::{bail, Result};
use clap::Args;
use onebit_mmse::estimators::{EstimateReport, EstimatorKind, PreparedEstimator};
use onebit_mmse::linalg::CMatrix;
use onebit_mmse::model::{CorrelationKind, CovariancePair, OneBitWord, SystemConfig};
use onebit_mmse::orthant::OrthantOptions;
use onebit_mmse::{db_to_linear, Complex64};
use serde::Serialize;

use crate::parse::{parse_complex, parse_rows, resolve_complex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KindArg {
    Complex,
    Real,
}

impl From<KindArg> for CorrelationKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Complex => CorrelationKind::Complex,
            KindArg::Real => CorrelationKind::Real,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodArg {
    Auto,
    General,
    Linear,
    Prop1,
    Prop2,
}

impl From<MethodArg> for EstimatorKind {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => EstimatorKind::Auto,
            MethodArg::General => EstimatorKind::General,
            MethodArg::Linear => EstimatorKind::Linear,
            MethodArg::Prop1 => EstimatorKind::Prop1,
            MethodArg::Prop2 => EstimatorKind::Prop2,
        }
    }
}

/// Constant correlation parameters shared by several commands.
#[derive(Debug, Clone, Args)]
pub struct CorrelationArgs {
    /// Correlation family of both covariances.
    #[arg(long, value_enum, default_value = "complex")]
    pub kind: KindArg,
    /// Channel correlation, Cartesian form such as 0.3+0.4j.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub phi: Option<Complex64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi_mag: Option<f64>,
    /// Radians.
    #[arg(long, allow_hyphen_values = true)]
    pub phi_arg: Option<f64>,
    /// Noise correlation, Cartesian form.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub xi: Option<Complex64>,
    #[arg(long, allow_hyphen_values = true)]
    pub xi_mag: Option<f64>,
    /// Radians.
    #[arg(long, allow_hyphen_values = true)]
    pub xi_arg: Option<f64>,
}

impl CorrelationArgs {
    pub fn resolve(&self) -> Result<(Complex64, Complex64)> {
        Ok((
            resolve_complex("phi", self.phi, self.phi_mag, self.phi_arg)?,
            resolve_complex("xi", self.xi, self.xi_mag, self.xi_arg)?,
        ))
    }
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    /// Single transmit antenna and pilot slot (the default unless --pilot is given).
    #[arg(long)]
    pub simo: bool,
    /// Receive antennas.
    #[arg(short = 'n', long = "n")]
    pub n: usize,
    /// Pilot SNR in dB (SIMO).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub gamma_db: f64,
    /// Unit-modulus SIMO pilot symbol s.
    #[arg(long, value_parser = parse_complex, default_value = "1", allow_hyphen_values = true)]
    pub pilot_symbol: Complex64,
    /// MIMO pilot matrix S (m × τ), rows separated by ';', entries by ','.
    #[arg(long, conflicts_with = "simo", allow_hyphen_values = true)]
    pub pilot: Option<String>,
    #[command(flatten)]
    pub correlation: CorrelationArgs,
    /// Observation word, e.g. "+1+1j,-1+1j".
    #[arg(long, allow_hyphen_values = true)]
    pub r: String,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
    /// Target absolute error of sampled orthant probabilities.
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
}

#[derive(Serialize)]
struct Echo {
    m: usize,
    n: usize,
    tau: usize,
    gamma: f64,
    gamma_db: Option<f64>,
    pilot_symbol: Option<Complex64>,
    kind: KindArg,
    phi: Complex64,
    xi: Complex64,
    r: OneBitWord,
    tolerance: f64,
    seed: u64,
}

#[derive(Serialize)]
struct Output {
    #[serde(flatten)]
    report: EstimateReport,
    input: Echo,
}

pub fn run(args: &EstimateArgs) -> Result<String> {
    let (phi, xi) = args.correlation.resolve()?;
    let config = match &args.pilot {
        Some(text) => {
            let rows = parse_rows(text, parse_complex)?;
            let pilot = CMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
            SystemConfig::mimo(args.n, pilot)?
        }
        None => SystemConfig::simo(args.n, db_to_linear(args.gamma_db), args.pilot_symbol)?,
    };
    let cov = CovariancePair::constant(&config, args.correlation.kind.into(), phi, xi)?;
    let r: OneBitWord = args.r.parse()?;
    if r.len() != config.observation_len() {
        bail!(onebit_mmse::Error::DimensionMismatch {
            context: "observation word",
            expected: config.observation_len().to_string(),
            actual: r.len().to_string(),
        });
    }
    let options = OrthantOptions::with_target(args.tolerance, args.seed);
    let estimator = PreparedEstimator::new(args.method.into(), &config, &cov, &options)?;
    let report = estimator.estimate(&r)?;
    let simo = args.pilot.is_none();
    let out = Output {
        report,
        input: Echo {
            m: config.m(),
            n: config.n(),
            tau: config.tau(),
            gamma: config.gamma(),
            gamma_db: simo.then_some(args.gamma_db),
            pilot_symbol: simo.then_some(args.pilot_symbol),
            kind: args.correlation.kind,
            phi,
            xi,
            r,
            tolerance: args.tolerance,
            seed: args.seed,
        },
    };
    Ok(serde_json::to_string_pretty(&out)?)
}
