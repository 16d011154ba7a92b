//! `figure`: sweep tables behind the MMSE figures, as CSV plus a JSON
//! sidecar that is sufficient to regenerate the CSV exactly.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use onebit_mmse::estimators::EstimatorKind;
use onebit_mmse::evaluation::{sweep, Evaluation, McConfig, SweepAxis, SweepRow, SweepSpec};
use onebit_mmse::model::{real_correlation_bounds, CorrelationKind};
use onebit_mmse::orthant::OrthantOptions;
use onebit_mmse::{db_to_linear, Complex64};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureName {
    /// MMSE against SNR, two antennas, complex correlation.
    Fig1a,
    /// MMSE over the phases of φ and ξ at fixed SNR.
    Fig1b,
    /// MMSE against SNR, sixteen antennas, real correlation.
    Fig2,
    /// MMSE at the noise-induced linear point over a real (φ, ξ) grid.
    Fig3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationArg {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[arg(value_enum, required_unless_present = "from_metadata")]
    pub name: Option<FigureName>,
    /// Output CSV path; the sidecar is written next to it with a `.json` extension.
    #[arg(long)]
    pub out: PathBuf,
    /// Regenerate from a previously written sidecar, ignoring other options.
    #[arg(long)]
    pub from_metadata: Option<PathBuf>,
    /// Points per grid axis (SNR points for fig1a/fig2).
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, value_enum, default_value = "exact")]
    pub evaluation: EvaluationArg,
    /// Monte Carlo samples per grid point.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Lowest SNR in dB for SNR sweeps.
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    pub gamma_db_min: f64,
    #[arg(long, default_value_t = 30.0, allow_hyphen_values = true)]
    pub gamma_db_max: f64,
}

/// Everything needed to regenerate a figure table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureMetadata {
    pub figure: FigureName,
    pub tool_version: String,
    pub columns: Vec<String>,
    /// SNR grid in dB for SNR sweeps, or the fixed SNR for fig1b.
    pub gamma_db: Vec<f64>,
    /// Phase grid (radians) for fig1b.
    pub phase_grid: Vec<f64>,
    pub spec: SweepSpec,
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

/// Cell midpoints of `count` equal cells over `(lo, hi)`.
fn midpoints(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / count as f64).collect()
}

fn build_metadata(args: &FigureArgs, figure: FigureName) -> Result<FigureMetadata> {
    let evaluation = match args.evaluation {
        EvaluationArg::Exact => Evaluation::Exact,
        EvaluationArg::Mc => Evaluation::Mc,
    };
    let mc = McConfig::new(args.samples, args.seed);
    mc.validate()?;
    let orthant = OrthantOptions::with_target(1e-6, args.seed);
    let snr_grid = || linspace(args.gamma_db_min, args.gamma_db_max, args.grid.unwrap_or(41));
    let (axis, n, kind, gamma_db, phase_grid, columns) = match figure {
        FigureName::Fig1a => {
            let db = snr_grid();
            let mut pairs = Vec::new();
            for phi_mag in [0.0, 0.9] {
                for xi_mag in [0.0, 0.8] {
                    pairs.push((Complex64::from_polar(phi_mag, -PI / 6.0), Complex64::from_polar(xi_mag, -PI / 3.0)));
                }
            }
            let axis = SweepAxis::Gamma {
                gamma: db.iter().map(|d| db_to_linear(*d)).collect(),
                pairs,
            };
            let cols = "phi_mag,phi_arg,xi_mag,xi_arg,gamma_db,gamma,mmse,std_error,method";
            (axis, 2, CorrelationKind::Complex, db, Vec::new(), cols)
        }
        FigureName::Fig1b => {
            let k = args.grid.unwrap_or(64);
            let phases: Vec<f64> = (0..k).map(|i| -PI + 2.0 * PI * i as f64 / k as f64).collect();
            let axis = SweepAxis::Phase {
                gamma: db_to_linear(5.0),
                phi_mag: 0.9,
                xi_mag: 0.8,
                phi_args: phases.clone(),
                xi_args: phases.clone(),
            };
            let cols = "phi_arg,xi_arg,gamma_db,mmse,std_error,method";
            (axis, 2, CorrelationKind::Complex, vec![5.0], phases, cols)
        }
        FigureName::Fig2 => {
            let db = snr_grid();
            let mut pairs = Vec::new();
            for phi in [0.0, 0.9] {
                for xi in [0.0, 0.5, 0.9] {
                    pairs.push((Complex64::new(phi, 0.0), Complex64::new(xi, 0.0)));
                }
            }
            let axis = SweepAxis::Gamma {
                gamma: db.iter().map(|d| db_to_linear(*d)).collect(),
                pairs,
            };
            let cols = "phi,xi,gamma_db,gamma,mmse,std_error,method";
            (axis, 16, CorrelationKind::Real, db, Vec::new(), cols)
        }
        FigureName::Fig3 => {
            let n = 4;
            let (lo, hi) = real_correlation_bounds(n);
            let k = args.grid.unwrap_or(40);
            let grid = midpoints(lo, hi, k);
            let axis = SweepAxis::LinearRegion {
                phi: grid.clone(),
                xi: grid,
            };
            let cols = "phi,xi,gamma_tilde,gamma_tilde_db,mmse,std_error,method";
            (axis, n, CorrelationKind::Real, Vec::new(), Vec::new(), cols)
        }
    };
    Ok(FigureMetadata {
        figure,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        columns: columns.split(',').map(String::from).collect(),
        gamma_db,
        phase_grid,
        spec: SweepSpec {
            axis,
            n,
            kind,
            estimator: EstimatorKind::Auto,
            evaluation,
            mc,
            orthant,
        },
    })
}

/// Shortest representation that parses back to the same `f64`.
fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn records(meta: &FigureMetadata, rows: &[SweepRow]) -> Vec<Vec<String>> {
    let tail = |r: &SweepRow| vec![opt(r.mmse), opt(r.std_error), r.method.clone()];
    match meta.figure {
        FigureName::Fig1a | FigureName::Fig2 => {
            let per_curve = meta.gamma_db.len();
            rows.iter()
                .enumerate()
                .map(|(i, r)| {
                    let db = meta.gamma_db[i % per_curve];
                    let mut rec = if meta.figure == FigureName::Fig1a {
                        vec![num(r.phi.norm()), num(-PI / 6.0), num(r.xi.norm()), num(-PI / 3.0)]
                    } else {
                        vec![num(r.phi.re), num(r.xi.re)]
                    };
                    rec.extend([num(db), opt(r.gamma)]);
                    rec.extend(tail(r));
                    rec
                })
                .collect()
        }
        FigureName::Fig1b => {
            let k = meta.phase_grid.len();
            rows.iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut rec = vec![num(meta.phase_grid[i / k]), num(meta.phase_grid[i % k]), num(meta.gamma_db[0])];
                    rec.extend(tail(r));
                    rec
                })
                .collect()
        }
        FigureName::Fig3 => rows
            .iter()
            .map(|r| {
                let mut rec = vec![
                    num(r.phi.re),
                    num(r.xi.re),
                    opt(r.gamma),
                    opt(r.gamma.map(onebit_mmse::linear_to_db)),
                ];
                rec.extend(tail(r));
                rec
            })
            .collect(),
    }
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

fn write_csv(path: &Path, header: &[String], recs: &[Vec<String>]) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    w.write_record(header)?;
    for rec in recs {
        w.write_record(rec)?;
    }
    w.flush().with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Returns a one-line summary for the terminal.
pub fn run(args: &FigureArgs) -> Result<String> {
    let meta = match &args.from_metadata {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            serde_json::from_str::<FigureMetadata>(&text)
                .with_context(|| format!("invalid metadata in {}", path.display()))?
        }
        None => build_metadata(args, args.name.expect("clap enforces a figure name"))?,
    };
    let rows = sweep(&meta.spec)?;
    let recs = records(&meta, &rows);
    write_csv(&args.out, &meta.columns, &recs)?;
    let sidecar = sidecar_path(&args.out);
    if args.from_metadata.as_deref() != Some(sidecar.as_path()) {
        let text = serde_json::to_string_pretty(&meta)?;
        fs::write(&sidecar, text + "\n").with_context(|| format!("cannot write {}", sidecar.display()))?;
    }
    let skipped = rows.iter().filter(|r| !r.is_applicable()).count();
    Ok(format!(
        "wrote {} rows ({} not applicable) to {} and metadata to {}",
        rows.len(),
        skipped,
        args.out.display(),
        sidecar.display()
    ))
}
