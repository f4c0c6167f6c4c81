//! Batch experiment runner: the rate, shape, coverage, distributional
//! agreement, and boundedness studies, driven by a JSON config and
//! emitting tidy CSV rows plus a manifest with a config hash.  Every
//! statistic is reproducible from (config, master_seed) alone; the
//! parallel schedule never enters the seeding.

use crate::data_gen::{draw, Covariate, DgpSpec, MeanFn, Noise};
use crate::inference::{hulc_ci, oracle_pivot_ci, subsample_ci, ConfidenceInterval};
use crate::isotonic::{diagnostics, interp_value_at, pava, sort_sample};
use crate::limit_law::{sample_slgcm_zero, DriftKind, DriftSpec, EmpiricalLaw, GridConfig, RateSpec};
use crate::stats::{derive_seed, ks_two_sample, ks_two_sample_critical, ols_slope_with_se};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Study {
    Rates,
    Shapes,
    Coverage,
    Qq,
    Boundedness,
}

/// A bound on one emitted statistic, checked after the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Gate {
    pub cell: String,
    pub stat: String,
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub study: Study,
    /// Sample sizes; defaults to 8 points log-spaced from 665 to 22026
    /// (coverage uses {50, 100, 250, 1000} instead).
    #[serde(default)]
    pub n_grid: Option<Vec<usize>>,
    /// Flatness exponents for the coverage study; defaults to
    /// {0.2, 0.5, 1, 2, 5, 10}.
    #[serde(default)]
    pub theta_grid: Option<Vec<f64>>,
    pub replications: usize,
    pub master_seed: u64,
    pub out_dir: PathBuf,
    /// Monte Carlo draws per reference law (coverage and QQ studies).
    #[serde(default)]
    pub law_draws: Option<usize>,
    #[serde(default)]
    pub asserts: Vec<Gate>,
}

pub fn default_n_grid() -> Vec<usize> {
    // e^6.5 through e^10, equally spaced on the log scale
    (0..8)
        .map(|k| (6.5 + 0.5 * k as f64).exp().round() as usize)
        .collect()
}

fn default_coverage_n_grid() -> Vec<usize> {
    vec![50, 100, 250, 1000]
}

fn default_theta_grid() -> Vec<f64> {
    vec![0.2, 0.5, 1.0, 2.0, 5.0, 10.0]
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub cell: String,
    pub stat: String,
    pub value: f64,
    pub mc_se: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
    pub config_hash: String,
    pub master_seed: u64,
    pub version: String,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidInput("replications must be >= 1".into()));
        }
        if let Some(grid) = &self.n_grid {
            if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidInput(
                    "n_grid must be non-empty and increasing".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config is serializable");
        let mut h = Sha256::new();
        h.update(json.as_bytes());
        hex::encode(h.finalize())
    }
}

fn study_id(study: Study) -> u64 {
    match study {
        Study::Rates => 1,
        Study::Shapes => 2,
        Study::Coverage => 3,
        Study::Qq => 4,
        Study::Boundedness => 5,
    }
}

/// Isotonic estimator of the sample at zero: the monotone interpolant of
/// the fitted values (zero is almost surely strictly between
/// observations, where the fit is pinned down only up to monotone
/// interpolation).
fn fit_at_zero(pairs: &[(f64, f64)], seed: u64) -> Result<f64> {
    let s = sort_sample(pairs, derive_seed(seed, &[9]))?;
    let f = pava(&s, None)?;
    Ok(interp_value_at(&s, &f, 0.0))
}

fn mean_and_se(vals: &[f64]) -> (f64, f64) {
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, (var / n).sqrt())
}

/// Squared errors of the fit at zero over fresh replications of the design.
fn replicate_sq_errors(
    dgp: &DgpSpec,
    reps: usize,
    master: u64,
    study: u64,
    cell: u64,
) -> Result<Vec<f64>> {
    (0..reps)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(master, &[study, cell, r as u64]);
            let s = draw(dgp, seed)?;
            let fhat = fit_at_zero(&s.pairs, seed)?;
            Ok((fhat - s.truth_at_x0) * (fhat - s.truth_at_x0))
        })
        .collect()
}

fn from_drift_dgp(drift: DriftSpec, n: usize) -> DgpSpec {
    DgpSpec {
        mean_fn: MeanFn::FromDrift {
            drift,
            alpha0: 0.0,
            x0: 0.0,
        },
        covariate: Covariate::Uniform { lo: -1.0, hi: 1.0 },
        noise: Noise::Gaussian { sigma: 1.0 },
        n,
        x0: 0.0,
    }
}

/// Same local shape psi(x) = x^2 sgn(x) paired with rates n^alpha for
/// alpha in {1/6, ..., 5/6}: the mean squared error at zero scales like
/// s_n / n, so its log-log slope against n is alpha - 1 while the slope
/// against n / s_n is -1 regardless of alpha.
pub fn run_rates(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let n_grid = cfg.n_grid.clone().unwrap_or_else(default_n_grid);
    let sid = study_id(Study::Rates);
    let mut rows = Vec::new();
    for num in 1..=5u32 {
        let alpha = num as f64 / 6.0;
        let drift = DriftSpec {
            kind: DriftKind::WrightPoly { a: 1.0, theta: 2.0 },
            h0: 0.5,
            sigma0_sq: 1.0,
            rate: RateSpec::Power { alpha },
        };
        let mut log_n = Vec::new();
        let mut log_n_over_sn = Vec::new();
        let mut log_mse = Vec::new();
        for (ni, &n) in n_grid.iter().enumerate() {
            let cell_id = (num as usize * n_grid.len() + ni) as u64;
            let dgp = from_drift_dgp(drift.clone(), n);
            let errs = replicate_sq_errors(&dgp, cfg.replications, cfg.master_seed, sid, cell_id)?;
            let (mse, se) = mean_and_se(&errs);
            rows.push(ResultRow {
                cell: format!("alpha={num}/6,n={n}"),
                stat: "mse".into(),
                value: mse,
                mc_se: se,
            });
            log_n.push((n as f64).ln());
            log_n_over_sn.push((n as f64 / drift.rate.eval(n)).ln());
            log_mse.push(mse.ln());
        }
        let (slope, se) = ols_slope_with_se(&log_n, &log_mse);
        rows.push(ResultRow {
            cell: format!("alpha={num}/6"),
            stat: "slope_log_n".into(),
            value: slope,
            mc_se: se,
        });
        let (slope, se) = ols_slope_with_se(&log_n_over_sn, &log_mse);
        rows.push(ResultRow {
            cell: format!("alpha={num}/6"),
            stat: "slope_log_n_over_sn".into(),
            value: slope,
            mc_se: se,
        });
    }
    Ok(finish(cfg, rows))
}

/// The four local shapes sharing s_n = n^(1/3): smooth odd, kinked,
/// one-sided quadratic/cubic, and discontinuous flat-with-jumps.
pub fn shape_drifts() -> Vec<(String, DriftSpec)> {
    let rate = RateSpec::Power { alpha: 1.0 / 3.0 };
    let psis: Vec<(String, Arc<dyn Fn(f64) -> f64 + Send + Sync>)> = vec![
        ("psi1".into(), Arc::new(|x: f64| x)),
        (
            "psi2".into(),
            Arc::new(|x: f64| if x >= 0.0 { x / 2.0 } else { x }),
        ),
        (
            "psi3".into(),
            Arc::new(|x: f64| if x >= 0.0 { x * x / 2.0 } else { x * x * x / 3.0 }),
        ),
        (
            "psi4".into(),
            Arc::new(|x: f64| if x.abs() > 0.1 { x.signum() } else { 0.0 }),
        ),
    ];
    psis.into_iter()
        .map(|(name, psi)| {
            (
                name,
                DriftSpec::custom(psi, rate, 0.5, 1.0).expect("shape psis are monotone"),
            )
        })
        .collect()
}

fn law_grid(drift: &DriftSpec) -> GridConfig {
    GridConfig {
        n_pts: 1 << 12,
        ..GridConfig::default_for(drift)
    }
}

/// Scaled estimator draws (h0/sigma0^2) sqrt(n/s_n) (fhat(0) - truth).
fn scaled_estimator_draws(
    dgp: &DgpSpec,
    drift: &DriftSpec,
    reps: usize,
    master: u64,
    study: u64,
    cell: u64,
) -> Result<Vec<f64>> {
    let scale = drift.h0 / drift.sigma0_sq * (dgp.n as f64 / drift.rate.eval(dgp.n)).sqrt();
    (0..reps)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(master, &[study, cell, r as u64]);
            let s = draw(dgp, seed)?;
            let fhat = fit_at_zero(&s.pairs, seed)?;
            Ok(scale * (fhat - s.truth_at_x0))
        })
        .collect()
}

fn qq_rows(
    cell: &str,
    estimator: &[f64],
    law: &EmpiricalLaw,
    rows: &mut Vec<ResultRow>,
) {
    let ks = ks_two_sample(estimator, &law.draws);
    let crit = ks_two_sample_critical(0.001, estimator.len(), law.draws.len());
    rows.push(ResultRow {
        cell: cell.into(),
        stat: "qq_ks".into(),
        value: ks,
        mc_se: 0.0,
    });
    rows.push(ResultRow {
        cell: cell.into(),
        stat: "qq_ks_crit_0.001".into(),
        value: crit,
        mc_se: 0.0,
    });
}

/// MSE slopes (expected -2/3 for every shape) and distributional
/// agreement at the largest n for the four shared-rate shapes.
pub fn run_shapes(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let n_grid = cfg.n_grid.clone().unwrap_or_else(default_n_grid);
    let sid = study_id(Study::Shapes);
    let law_n = cfg.law_draws.unwrap_or(500).max(cfg.replications);
    let mut rows = Vec::new();
    for (k, (name, drift)) in shape_drifts().into_iter().enumerate() {
        let mut log_n = Vec::new();
        let mut log_mse = Vec::new();
        for (ni, &n) in n_grid.iter().enumerate() {
            let cell_id = (k * n_grid.len() + ni) as u64;
            let dgp = from_drift_dgp(drift.clone(), n);
            let errs = replicate_sq_errors(&dgp, cfg.replications, cfg.master_seed, sid, cell_id)?;
            let (mse, se) = mean_and_se(&errs);
            rows.push(ResultRow {
                cell: format!("{name},n={n}"),
                stat: "mse".into(),
                value: mse,
                mc_se: se,
            });
            log_n.push((n as f64).ln());
            log_mse.push(mse.ln());
        }
        let (slope, se) = ols_slope_with_se(&log_n, &log_mse);
        rows.push(ResultRow {
            cell: name.clone(),
            stat: "slope_log_n".into(),
            value: slope,
            mc_se: se,
        });

        let n_big = *n_grid.last().unwrap();
        let dgp = from_drift_dgp(drift.clone(), n_big);
        let qq_cell = 1000 + k as u64;
        let est = scaled_estimator_draws(&dgp, &drift, cfg.replications, cfg.master_seed, sid, qq_cell)?;
        let law = sample_slgcm_zero(
            &drift,
            &law_grid(&drift),
            law_n,
            derive_seed(cfg.master_seed, &[sid, qq_cell, u64::MAX]),
        )?;
        qq_rows(&format!("{name},n={n_big}"), &est, &law, &mut rows);
    }
    Ok(finish(cfg, rows))
}

/// The four worked examples: each pairs a data-generating family with
/// its limiting law, compared by two-sample KS at the largest n.
pub fn run_qq(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let n_grid = cfg.n_grid.clone().unwrap_or_else(default_n_grid);
    let n_big = *n_grid.last().unwrap();
    let sid = study_id(Study::Qq);
    let law_n = cfg.law_draws.unwrap_or(500).max(cfg.replications);
    let mut rows = Vec::new();

    let wright = DriftSpec::wright(1.0, 2.0, 0.5, 1.0)?;
    let slow = DriftSpec::slow_varying(1.0, 2.0, 0.5, 1.0)?;
    let asym = DriftSpec::asymmetric(1.0, 1.0, 1.0 / 3.0, 1.0, 0.5, 1.0)?;
    let near_flat = DriftSpec::near_flat(vec![1.0], RateSpec::Power { alpha: 0.2 }, 0.5, 1.0)?;

    let cells: Vec<(String, DgpSpec, DriftSpec)> = vec![
        (
            "wright_theta2".into(),
            from_drift_dgp(wright.clone(), n_big),
            wright,
        ),
        (
            "slow_varying".into(),
            from_drift_dgp(slow.clone(), n_big),
            slow,
        ),
        (
            "asymmetric".into(),
            from_drift_dgp(asym.clone(), n_big),
            asym,
        ),
        (
            "near_flat".into(),
            DgpSpec {
                mean_fn: MeanFn::NearFlatExample,
                covariate: Covariate::Uniform { lo: -1.0, hi: 1.0 },
                noise: Noise::Gaussian { sigma: 1.0 },
                n: n_big,
                x0: 0.0,
            },
            near_flat,
        ),
    ];

    for (cell_id, (name, dgp, drift)) in cells.into_iter().enumerate() {
        let est = scaled_estimator_draws(
            &dgp,
            &drift,
            cfg.replications,
            cfg.master_seed,
            sid,
            cell_id as u64,
        )?;
        let law = sample_slgcm_zero(
            &drift,
            &law_grid(&drift),
            law_n,
            derive_seed(cfg.master_seed, &[sid, cell_id as u64, u64::MAX]),
        )?;
        qq_rows(&format!("{name},n={n_big}"), &est, &law, &mut rows);
    }
    Ok(finish(cfg, rows))
}

/// Standardized power-drift law with exponent theta: the drifted-motion
/// left slope with drift |t|^(theta+1), as needed by the pivot interval.
pub fn standard_power_law(theta: f64, draws: usize, seed: u64) -> Result<EmpiricalLaw> {
    let drift = DriftSpec::wright(theta + 1.0, theta, 1.0, 1.0)?;
    sample_slgcm_zero(&drift, &law_grid(&drift), draws, seed)
}

/// Coverage and width of the three interval methods on the fixed-truth
/// power family f0(x) = |x|^theta sgn(x) with standard normal noise.
pub fn run_coverage(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let n_grid = cfg.n_grid.clone().unwrap_or_else(default_coverage_n_grid);
    let thetas = cfg.theta_grid.clone().unwrap_or_else(default_theta_grid);
    let sid = study_id(Study::Coverage);
    let alpha = 0.05;
    let law_n = cfg.law_draws.unwrap_or(10_000);
    let mut rows = Vec::new();

    for (ti, &theta) in thetas.iter().enumerate() {
        let law = standard_power_law(
            theta,
            law_n,
            derive_seed(cfg.master_seed, &[sid, ti as u64, u64::MAX]),
        )?;
        for (ni, &n) in n_grid.iter().enumerate() {
            let cell_id = (ti * n_grid.len() + ni) as u64;
            let dgp = DgpSpec {
                mean_fn: MeanFn::WrightFixed { a: 1.0, theta },
                covariate: Covariate::Uniform { lo: -1.0, hi: 1.0 },
                noise: Noise::Gaussian { sigma: 1.0 },
                n,
                x0: 0.0,
            };
            // three CIs per replication: (covered, width) for each method
            let per_rep: Result<Vec<[(bool, f64); 3]>> = (0..cfg.replications)
                .into_par_iter()
                .map(|r| {
                    let seed = derive_seed(cfg.master_seed, &[sid, cell_id, r as u64]);
                    let s = draw(&dgp, seed)?;
                    let truth = s.truth_at_x0;
                    let cover = |ci: &ConfidenceInterval| {
                        (ci.lo <= truth && truth <= ci.hi, ci.hi - ci.lo)
                    };
                    let h = hulc_ci(&s, 0.0, alpha, derive_seed(seed, &[1]))?;
                    let sub = subsample_ci(&s, 0.0, alpha, derive_seed(seed, &[2]))?;
                    let or = oracle_pivot_ci(
                        &s,
                        0.0,
                        alpha,
                        theta,
                        1.0,
                        0.5,
                        1.0,
                        &law,
                        derive_seed(seed, &[3]),
                    )?;
                    Ok([cover(&h), cover(&sub), cover(&or)])
                })
                .collect();
            let per_rep = per_rep?;
            for (mi, mname) in ["hulc", "subsample", "oracle"].iter().enumerate() {
                let covered: Vec<f64> = per_rep
                    .iter()
                    .map(|r| if r[mi].0 { 1.0 } else { 0.0 })
                    .collect();
                let widths: Vec<f64> = per_rep.iter().map(|r| r[mi].1).collect();
                let (cov, _) = mean_and_se(&covered);
                let binom_se = (cov * (1.0 - cov) / covered.len() as f64).sqrt();
                let (w, w_se) = mean_and_se(&widths);
                let cell = format!("theta={theta},n={n},method={mname}");
                rows.push(ResultRow {
                    cell: cell.clone(),
                    stat: "coverage".into(),
                    value: cov,
                    mc_se: binom_se,
                });
                rows.push(ResultRow {
                    cell,
                    stat: "width".into(),
                    value: w,
                    mc_se: w_se,
                });
            }
        }
    }
    Ok(finish(cfg, rows))
}

/// Moment-bound constant 2^(2 + 1/p) / (2^(p-1) - 1)^(1/p).
pub fn c_p(p: f64) -> f64 {
    (2.0f64).powf(2.0 + 1.0 / p) / ((2.0f64).powf(p - 1.0) - 1.0).powf(1.0 / p)
}

/// Empirical (E ||fhat||_inf^2)^(1/2) against the bound
/// ||mu||_inf + C_2 ||eta||_inf on the linear-truth design, where the
/// sup-norm of the fit is attained at its extreme levels.
pub fn run_boundedness(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let n_grid = cfg.n_grid.clone().unwrap_or_else(default_n_grid);
    let sid = study_id(Study::Boundedness);
    // f0(x) = x on [-1, 1]: ||mu||_inf = 1; unit Gaussian noise:
    // eta(x) = (E[xi^2 | X = x])^(1/2) = 1
    let (mu_sup, eta_sup) = (1.0, 1.0);
    let bound = mu_sup + c_p(2.0) * eta_sup;
    let mut rows = Vec::new();
    for (ni, &n) in n_grid.iter().enumerate() {
        let dgp = DgpSpec {
            mean_fn: MeanFn::WrightFixed { a: 1.0, theta: 1.0 },
            covariate: Covariate::Uniform { lo: -1.0, hi: 1.0 },
            noise: Noise::Gaussian { sigma: 1.0 },
            n,
            x0: 0.0,
        };
        let sups_sq: Result<Vec<f64>> = (0..cfg.replications)
            .into_par_iter()
            .map(|r| {
                let seed = derive_seed(cfg.master_seed, &[sid, ni as u64, r as u64]);
                let s = draw(&dgp, seed)?;
                let sorted = sort_sample(&s.pairs, derive_seed(seed, &[9]))?;
                let f = pava(&sorted, None)?;
                let sup = diagnostics(&sorted, &f).sup_norm;
                Ok(sup * sup)
            })
            .collect();
        let (m2, m2_se) = mean_and_se(&sups_sq?);
        let emp = m2.sqrt();
        rows.push(ResultRow {
            cell: format!("n={n}"),
            stat: "empirical_l2_sup_norm".into(),
            value: emp,
            // delta method: d sqrt(m)/dm = 1/(2 sqrt(m))
            mc_se: m2_se / (2.0 * emp),
        });
        rows.push(ResultRow {
            cell: format!("n={n}"),
            stat: "bound".into(),
            value: bound,
            mc_se: 0.0,
        });
    }
    Ok(finish(cfg, rows))
}

fn finish(cfg: &ExperimentConfig, rows: Vec<ResultRow>) -> ExperimentResult {
    ExperimentResult {
        rows,
        config_hash: cfg.hash(),
        master_seed: cfg.master_seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    match cfg.study {
        Study::Rates => run_rates(cfg),
        Study::Shapes => run_shapes(cfg),
        Study::Coverage => run_coverage(cfg),
        Study::Qq => run_qq(cfg),
        Study::Boundedness => run_boundedness(cfg),
    }
}

/// Returns a description of every gate that fails (or matches no row).
pub fn evaluate_gates(result: &ExperimentResult, gates: &[Gate]) -> Vec<String> {
    let mut failures = Vec::new();
    for g in gates {
        let matched: Vec<&ResultRow> = result
            .rows
            .iter()
            .filter(|r| r.cell == g.cell && r.stat == g.stat)
            .collect();
        if matched.is_empty() {
            failures.push(format!("gate {}/{}: no matching rows", g.cell, g.stat));
            continue;
        }
        for row in matched {
            if let Some(min) = g.min {
                if row.value < min {
                    failures.push(format!(
                        "gate {}/{}: value {} below min {min}",
                        g.cell, g.stat, row.value
                    ));
                }
            }
            if let Some(max) = g.max {
                if row.value > max {
                    failures.push(format!(
                        "gate {}/{}: value {} above max {max}",
                        g.cell, g.stat, row.value
                    ));
                }
            }
        }
    }
    failures
}

/// Writes results.csv and manifest.jsonl into `out_dir`; returns their paths.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    result: &ExperimentResult,
) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let csv_path = cfg.out_dir.join("results.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(["cell", "stat", "value", "mc_se"])?;
    for row in &result.rows {
        w.write_record([
            row.cell.as_str(),
            row.stat.as_str(),
            &format!("{:?}", row.value),
            &format!("{:?}", row.mc_se),
        ])?;
    }
    w.flush()?;

    let manifest_path = cfg.out_dir.join("manifest.jsonl");
    let manifest = serde_json::json!({
        "study": cfg.study,
        "config_hash": result.config_hash,
        "master_seed": result.master_seed,
        "version": result.version,
        "rows": result.rows.len(),
        "config": cfg,
    });
    let mut f = std::fs::File::create(&manifest_path)?;
    writeln!(f, "{}", serde_json::to_string(&manifest)?)?;
    Ok((csv_path, manifest_path))
}

pub fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    let cfg: ExperimentConfig = serde_json::from_str(&text)?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smoke_cfg(study: Study, dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            study,
            n_grid: Some(vec![30, 60]),
            theta_grid: Some(vec![1.0]),
            replications: 3,
            master_seed: 11,
            out_dir: dir.to_path_buf(),
            law_draws: Some(50),
            asserts: vec![],
        }
    }

    #[test]
    fn c2_value() {
        assert!((c_p(2.0) - (2.0f64).powf(2.5)).abs() < 1e-12);
        assert!((c_p(2.0) - 5.656854).abs() < 1e-5);
    }

    #[test]
    fn default_grid_spans_665_to_22026() {
        let g = default_n_grid();
        assert_eq!(g.len(), 8);
        assert_eq!(g[0], 665);
        assert_eq!(g[7], 22026);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn all_studies_smoke_and_emit_rows() {
        let dir = tempfile::tempdir().unwrap();
        for study in [
            Study::Rates,
            Study::Shapes,
            Study::Coverage,
            Study::Qq,
            Study::Boundedness,
        ] {
            let mut cfg = smoke_cfg(study, dir.path());
            if study == Study::Coverage {
                cfg.n_grid = Some(vec![40, 80]);
            }
            let res = run(&cfg).unwrap_or_else(|e| panic!("{study:?}: {e}"));
            assert!(!res.rows.is_empty(), "{study:?} emitted no rows");
            for row in &res.rows {
                assert!(row.value.is_finite(), "{study:?} {}/{}", row.cell, row.stat);
            }
        }
    }

    #[test]
    fn rerun_is_byte_identical() {
        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let cfg1 = smoke_cfg(Study::Boundedness, dir1.path());
        let mut cfg2 = smoke_cfg(Study::Boundedness, dir2.path());
        cfg2.out_dir = dir2.path().to_path_buf();
        let r1 = run(&cfg1).unwrap();
        let r2 = run(&cfg2).unwrap();
        let (csv1, _) = write_outputs(&cfg1, &r1).unwrap();
        let (csv2, _) = write_outputs(&cfg2, &r2).unwrap();
        let b1 = std::fs::read(csv1).unwrap();
        let b2 = std::fs::read(csv2).unwrap();
        assert_eq!(b1, b2);
    }

    #[test]
    fn gates_pass_and_fail_as_bounded() {
        let res = ExperimentResult {
            rows: vec![ResultRow {
                cell: "a".into(),
                stat: "s".into(),
                value: 0.5,
                mc_se: 0.0,
            }],
            config_hash: "x".into(),
            master_seed: 0,
            version: "t".into(),
        };
        let ok = Gate { cell: "a".into(), stat: "s".into(), min: Some(0.0), max: Some(1.0) };
        let bad = Gate { cell: "a".into(), stat: "s".into(), min: Some(0.9), max: None };
        let missing = Gate { cell: "zzz".into(), stat: "s".into(), min: None, max: None };
        assert!(evaluate_gates(&res, &[ok]).is_empty());
        assert_eq!(evaluate_gates(&res, &[bad]).len(), 1);
        assert_eq!(evaluate_gates(&res, &[missing]).len(), 1);
    }

    #[test]
    fn config_roundtrips_through_json() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = smoke_cfg(Study::Rates, dir.path());
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
        let back = read_config(&path).unwrap();
        assert_eq!(back.hash(), cfg.hash());
        assert_eq!(back.replications, 3);
    }

    #[test]
    fn noiseless_sup_norm_stays_below_truth_sup() {
        // eta = 0: the fit interpolates monotone data, so its sup-norm
        // cannot exceed that of the truth
        let dgp = DgpSpec {
            mean_fn: MeanFn::WrightFixed { a: 1.0, theta: 1.0 },
            covariate: Covariate::Uniform { lo: -1.0, hi: 1.0 },
            noise: Noise::Gaussian { sigma: 0.0 },
            n: 200,
            x0: 0.0,
        };
        for seed in 0..10 {
            let s = draw(&dgp, seed).unwrap();
            let sorted = sort_sample(&s.pairs, 1).unwrap();
            let f = pava(&sorted, None).unwrap();
            assert!(diagnostics(&sorted, &f).sup_norm <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = smoke_cfg(Study::Rates, dir.path());
        cfg.replications = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = smoke_cfg(Study::Rates, dir.path());
        cfg.n_grid = Some(vec![100, 50]);
        assert!(cfg.validate().is_err());
    }
}
