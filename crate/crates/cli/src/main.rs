//! Command-line front end: isotonic fitting, limit-law sampling, data
//! generation, confidence intervals, and the batch experiment runner.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use monoreg::data_gen::{draw, Covariate, DgpSpec, MeanFn, Noise};
use monoreg::harness;
use monoreg::inference::{hulc_ci, oracle_pivot_ci, subsample_ci};
use monoreg::isotonic::{diagnostics, pava, sort_sample};
use monoreg::limit_law::{sample_slgcm_zero, DriftSpec, EmpiricalLaw, GridConfig, RateSpec};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "monoreg", about = "Isotonic regression with limit-law based inference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DriftArg {
    Wright,
    SlowVarying,
    Asymmetric,
    NearFlat,
}

#[derive(Clone, Copy, ValueEnum)]
enum DgpArg {
    /// fixed truth a |x|^theta sgn(x)
    Wright,
    /// truth sqrt(s_n/n) psi(s_n x) built from a Wright-type local shape
    FromDrift,
    /// truth x / n^(1/5) + x^3 / 6
    NearFlat,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Hulc,
    Subsample,
    Oracle,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the isotonic least-squares step function to a two-column CSV
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Output CSV of (knot, level) pairs
        #[arg(long)]
        output: PathBuf,
        /// Seed for randomized tie-breaking among equal covariates
        #[arg(long, default_value_t = 0)]
        tie_seed: u64,
    },
    /// Sample the left slope at zero of the drifted-motion convex minorant
    SampleLimit {
        #[arg(long, value_enum)]
        drift: DriftArg,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 2.0)]
        theta: f64,
        /// Second-side coefficient (asymmetric drift)
        #[arg(long, default_value_t = 1.0)]
        a2: f64,
        /// Second-side exponent (asymmetric drift)
        #[arg(long, default_value_t = 1.0)]
        theta2: f64,
        /// Taylor coefficients a_1,a_2,... (near-flat drift)
        #[arg(long, default_value = "1.0")]
        coeffs: String,
        /// Rate exponent for the near-flat drift's s_n = n^alpha
        #[arg(long, default_value_t = 0.2)]
        rate_alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        h0: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        #[arg(long, default_value_t = 1000)]
        draws: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated probabilities; prints one JSON line of quantiles
        #[arg(long)]
        emit_quantiles: Option<String>,
    },
    /// Generate a synthetic regression sample
    Gen {
        #[arg(long, value_enum)]
        dgp: DgpArg,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 2.0)]
        theta: f64,
        /// Rate exponent s_n = n^alpha for the from-drift design
        #[arg(long, default_value_t = 0.2)]
        rate_alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Confidence interval for the regression function at x0
    Ci {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long = "A", default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 0.5)]
        h0: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        /// One-column CSV of pre-sampled standardized law draws (oracle)
        #[arg(long)]
        law: Option<PathBuf>,
        /// Draws to sample when --law is not given (oracle)
        #[arg(long, default_value_t = 10000)]
        law_draws: usize,
        #[arg(long, default_value_t = 11)]
        seed: u64,
    },
    /// Run a batch study from a JSON config
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
}

fn read_pairs(path: &PathBuf) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut pairs = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() < 2 {
            bail!("row {} has fewer than two columns", i + 1);
        }
        match (rec[0].trim().parse::<f64>(), rec[1].trim().parse::<f64>()) {
            (Ok(x), Ok(y)) => pairs.push((x, y)),
            // tolerate a single header row
            _ if i == 0 => continue,
            _ => bail!("row {} is not numeric", i + 1),
        }
    }
    if pairs.is_empty() {
        bail!("no data rows in {}", path.display());
    }
    Ok(pairs)
}

fn read_draws(path: &PathBuf) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    let mut draws = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        match rec[0].trim().parse::<f64>() {
            Ok(v) => draws.push(v),
            _ if i == 0 => continue,
            _ => bail!("row {} is not numeric", i + 1),
        }
    }
    if draws.is_empty() {
        bail!("no draws in {}", path.display());
    }
    Ok(draws)
}

fn parse_coeffs(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().context("bad coefficient"))
        .collect()
}

fn build_drift(
    kind: DriftArg,
    a: f64,
    theta: f64,
    a2: f64,
    theta2: f64,
    coeffs: &str,
    rate_alpha: f64,
    h0: f64,
    sigma2: f64,
) -> Result<DriftSpec> {
    Ok(match kind {
        DriftArg::Wright => DriftSpec::wright(a, theta, h0, sigma2)?,
        DriftArg::SlowVarying => DriftSpec::slow_varying(a, theta, h0, sigma2)?,
        DriftArg::Asymmetric => DriftSpec::asymmetric(a, theta, a2, theta2, h0, sigma2)?,
        DriftArg::NearFlat => DriftSpec::near_flat(
            parse_coeffs(coeffs)?,
            RateSpec::Power { alpha: rate_alpha },
            h0,
            sigma2,
        )?,
    })
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Fit { input, output, tie_seed } => {
            let pairs = read_pairs(&input)?;
            let sample = sort_sample(&pairs, tie_seed)?;
            let fit = pava(&sample, None)?;
            let mut w = csv::Writer::from_path(&output)?;
            w.write_record(["knot", "level"])?;
            for (k, l) in fit.knots.iter().zip(&fit.levels) {
                w.write_record([format!("{k:?}"), format!("{l:?}")])?;
            }
            w.flush()?;
            let d = diagnostics(&sample, &fit);
            println!(
                "{}",
                serde_json::json!({
                    "n": pairs.len(),
                    "n_blocks": d.n_blocks,
                    "sse": d.sse,
                    "sup_norm": d.sup_norm,
                    "output": output.display().to_string(),
                })
            );
        }
        Command::SampleLimit {
            drift,
            a,
            theta,
            a2,
            theta2,
            coeffs,
            rate_alpha,
            h0,
            sigma2,
            draws,
            seed,
            out,
            emit_quantiles,
        } => {
            let spec = build_drift(drift, a, theta, a2, theta2, &coeffs, rate_alpha, h0, sigma2)?;
            let grid = GridConfig::default_for(&spec);
            let law = sample_slgcm_zero(&spec, &grid, draws, seed)?;
            let mut w = csv::Writer::from_path(&out)?;
            w.write_record(["draw"])?;
            for d in &law.draws {
                w.write_record([format!("{d:?}")])?;
            }
            w.flush()?;
            if let Some(ps) = emit_quantiles {
                let mut qs = serde_json::Map::new();
                for p in parse_coeffs(&ps)? {
                    qs.insert(format!("{p}"), serde_json::json!(law.quantile(p)?));
                }
                println!("{}", serde_json::Value::Object(qs));
            }
        }
        Command::Gen { dgp, a, theta, rate_alpha, sigma, n, seed, out } => {
            let mean_fn = match dgp {
                DgpArg::Wright => MeanFn::WrightFixed { a, theta },
                DgpArg::NearFlat => MeanFn::NearFlatExample,
                DgpArg::FromDrift => MeanFn::FromDrift {
                    drift: DriftSpec {
                        rate: RateSpec::Power { alpha: rate_alpha },
                        ..DriftSpec::wright(a, theta, 0.5, 1.0)?
                    },
                    alpha0: 0.0,
                    x0: 0.0,
                },
            };
            let spec = DgpSpec {
                mean_fn,
                covariate: Covariate::Uniform { lo: -1.0, hi: 1.0 },
                noise: Noise::Gaussian { sigma },
                n,
                x0: 0.0,
            };
            let sample = draw(&spec, seed)?;
            let mut w = csv::Writer::from_path(&out)?;
            w.write_record(["x", "y"])?;
            for (x, y) in &sample.pairs {
                w.write_record([format!("{x:?}"), format!("{y:?}")])?;
            }
            w.flush()?;
            println!(
                "{}",
                serde_json::json!({
                    "n": n,
                    "seed": seed,
                    "truth_at_x0": sample.truth_at_x0,
                    "out": out.display().to_string(),
                })
            );
        }
        Command::Ci {
            method,
            alpha,
            x0,
            input,
            theta,
            a,
            h0,
            sigma2,
            law,
            law_draws,
            seed,
        } => {
            let pairs = read_pairs(&input)?;
            let sample = monoreg::data_gen::RawSample {
                pairs,
                seed,
                truth_at_x0: f64::NAN,
            };
            let ci = match method {
                MethodArg::Hulc => hulc_ci(&sample, x0, alpha, seed)?,
                MethodArg::Subsample => subsample_ci(&sample, x0, alpha, seed)?,
                MethodArg::Oracle => {
                    let law = match law {
                        Some(path) => {
                            let draws = read_draws(&path)?;
                            let drift = DriftSpec::wright(theta + 1.0, theta, 1.0, 1.0)?;
                            let grid = GridConfig::default_for(&drift);
                            EmpiricalLaw { draws, master_seed: 0, drift, grid }
                        }
                        None => harness::standard_power_law(theta, law_draws, seed)?,
                    };
                    oracle_pivot_ci(&sample, x0, alpha, theta, a, h0, sigma2, &law, seed)?
                }
            };
            println!("{}", serde_json::to_string(&ci)?);
        }
        Command::Experiment { config } => {
            let cfg = harness::read_config(&config)?;
            let result = harness::run(&cfg)?;
            let (csv_path, manifest_path) = harness::write_outputs(&cfg, &result)?;
            let failures = harness::evaluate_gates(&result, &cfg.asserts);
            println!(
                "{}",
                serde_json::json!({
                    "rows": result.rows.len(),
                    "csv": csv_path.display().to_string(),
                    "manifest": manifest_path.display().to_string(),
                    "gate_failures": failures,
                })
            );
            if !failures.is_empty() {
                std::process::exit(2);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
