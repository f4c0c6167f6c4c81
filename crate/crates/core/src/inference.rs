//! Confidence intervals for the regression function at a point under a
//! monotonicity constraint only: batched hull intervals, subsampling with
//! an estimated rate, and the known-parameter pivot.  Also the Monte
//! Carlo median-bias diagnostic that the batched interval's validity
//! rests on.

use crate::data_gen::{draw, DgpSpec, RawSample};
use crate::isotonic::{interp_value_at, pava, sort_sample, SortedSample, StepFunction};
use crate::limit_law::EmpiricalLaw;
use crate::stats::{derive_seed, quantile_sorted, rng_from};
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Hulc,
    Subsample,
    OraclePivot,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConfidenceInterval {
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
    pub method: Method,
    pub x0: f64,
}

/// Batch layout for one hull interval: the number of batches after
/// randomization and which batch each observation landed in.
#[derive(Debug, Clone)]
pub struct HulcPlan {
    pub alpha: f64,
    pub b_alpha: usize,
    pub b_star: usize,
    pub u: f64,
    /// batch_assignment[i] in 0..b_star for observation i
    pub batch_assignment: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct MedianBiasReport {
    pub estimate: f64,
    pub reps: usize,
    pub mc_se: f64,
}

/// Smallest batch count whose ideal miscoverage 2^(1-B) is at most alpha.
fn b_alpha(alpha: f64) -> usize {
    (2.0 / alpha).log2().ceil() as usize
}

/// Chooses between B_alpha and B_alpha - 1 batches so the ideal
/// miscoverage interpolates to exactly alpha: with
/// tau = (alpha - 2^(1-B)) / (2^(2-B) - 2^(1-B)), use B - 1 batches when
/// U <= tau.  At alpha = 2^-k the threshold is zero and B* = B_alpha
/// always.  Then assigns observations to batches round-robin after a
/// random shuffle, so batch sizes differ by at most one.
pub fn hulc_plan(alpha: f64, seed: u64, n: usize) -> Result<HulcPlan> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha {alpha} outside (0, 1)")));
    }
    let b = b_alpha(alpha);
    if n < b {
        return Err(Error::SampleTooSmall { n, needed: b });
    }
    let mut rng = rng_from(seed);
    let u: f64 = rng.gen_range(0.0..1.0);
    let lo_mis = (2.0f64).powi(1 - b as i32);
    let hi_mis = (2.0f64).powi(2 - b as i32);
    let tau = ((alpha - lo_mis) / (hi_mis - lo_mis)).max(0.0);
    let b_star = if b > 1 && u <= tau { b - 1 } else { b };

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut assignment = vec![0usize; n];
    for (pos, &i) in order.iter().enumerate() {
        assignment[i] = pos % b_star;
    }
    Ok(HulcPlan {
        alpha,
        b_alpha: b,
        b_star,
        u,
        batch_assignment: assignment,
    })
}

/// Estimator value at `x0` for one set of observations: sort, fit, and
/// evaluate the monotone interpolant of the fitted values.
fn fit_value(pairs: &[(f64, f64)], x0: f64, tie_seed: u64) -> Result<f64> {
    let s = sort_sample(pairs, tie_seed)?;
    let f = pava(&s, None)?;
    Ok(interp_value_at(&s, &f, x0))
}

fn fitted_batches(
    data: &RawSample,
    plan: &HulcPlan,
    seed: u64,
) -> Result<Vec<(SortedSample, StepFunction)>> {
    (0..plan.b_star)
        .map(|b| {
            let pairs: Vec<(f64, f64)> = data
                .pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| plan.batch_assignment[*i] == b)
                .map(|(_, &p)| p)
                .collect();
            let s = sort_sample(&pairs, derive_seed(seed, &[b as u64 + 1]))?;
            let f = pava(&s, None)?;
            Ok((s, f))
        })
        .collect()
}

/// Hull interval: [min over batches, max over batches] of the per-batch
/// isotonic fits evaluated at x0.  No tuning parameters beyond alpha.
pub fn hulc_ci(data: &RawSample, x0: f64, alpha: f64, seed: u64) -> Result<ConfidenceInterval> {
    let plan = hulc_plan(alpha, seed, data.pairs.len())?;
    let batches = fitted_batches(data, &plan, seed)?;
    let vals: Vec<f64> = batches
        .iter()
        .map(|(s, f)| interp_value_at(s, f, x0))
        .collect();
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(ConfidenceInterval {
        lo,
        hi,
        level: 1.0 - alpha,
        method: Method::Hulc,
        x0,
    })
}

/// Pointwise hull intervals on a grid, tightened using monotonicity: the
/// lower envelope is replaced by its running maximum and the upper
/// envelope by its reverse running minimum.  A monotone function inside
/// every pointwise interval is still inside every tightened one.
pub fn hulc_band(
    data: &RawSample,
    grid: &[f64],
    alpha: f64,
    seed: u64,
) -> Result<Vec<ConfidenceInterval>> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty band grid".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("band grid must be increasing".into()));
    }
    let plan = hulc_plan(alpha, seed, data.pairs.len())?;
    let batches = fitted_batches(data, &plan, seed)?;
    let mut los: Vec<f64> = Vec::with_capacity(grid.len());
    let mut his: Vec<f64> = Vec::with_capacity(grid.len());
    for &x in grid {
        let vals: Vec<f64> = batches
            .iter()
            .map(|(s, f)| interp_value_at(s, f, x))
            .collect();
        los.push(vals.iter().cloned().fold(f64::INFINITY, f64::min));
        his.push(vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    }
    let mut run = f64::NEG_INFINITY;
    for v in los.iter_mut() {
        run = run.max(*v);
        *v = run;
    }
    run = f64::INFINITY;
    for v in his.iter_mut().rev() {
        run = run.min(*v);
        *v = run;
    }
    Ok(grid
        .iter()
        .zip(los.iter().zip(&his))
        .map(|(&x, (&lo, &hi))| ConfidenceInterval {
            lo,
            hi,
            level: 1.0 - alpha,
            method: Method::Hulc,
            x0: x,
        })
        .collect())
}

/// Number of subsamples per subsample size.
pub const SUBSAMPLE_K: usize = 200;

/// Rate exponent from two subsample sizes: beta = log(IQR_1 / IQR_2) /
/// log(m_2 / m_1), where IQR_j is the interquartile range of the point
/// estimates on subsamples of size m_j.
pub fn rate_from_subsample_estimates(
    ests1: &[f64],
    ests2: &[f64],
    m1: usize,
    m2: usize,
) -> Result<f64> {
    let iqr = |ests: &[f64]| -> f64 {
        let mut v = ests.to_vec();
        v.sort_unstable_by(|a, b| a.total_cmp(b));
        quantile_sorted(&v, 0.75) - quantile_sorted(&v, 0.25)
    };
    let (i1, i2) = (iqr(ests1), iqr(ests2));
    if !(i1 > 0.0) || !(i2 > 0.0) {
        return Err(Error::DegenerateSubsampling);
    }
    Ok((i1 / i2).ln() / (m2 as f64 / m1 as f64).ln())
}

fn subsample_estimates(
    data: &RawSample,
    x0: f64,
    m: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let n = data.pairs.len();
    (0..SUBSAMPLE_K)
        .map(|k| {
            let mut rng = rng_from(derive_seed(seed, &[k as u64]));
            let idx = rand::seq::index::sample(&mut rng, n, m);
            let pairs: Vec<(f64, f64)> = idx.iter().map(|i| data.pairs[i]).collect();
            fit_value(&pairs, x0, derive_seed(seed, &[k as u64, 1]))
        })
        .collect()
}

/// Estimated rate exponent for the data at hand, from subsample sizes
/// floor(n^(1/2)) and floor(n^(2/3)) with [`SUBSAMPLE_K`] subsamples
/// drawn without replacement at each size.
pub fn estimate_rate(data: &RawSample, x0: f64, seed: u64) -> Result<f64> {
    let n = data.pairs.len();
    if n < 16 {
        return Err(Error::SampleTooSmall { n, needed: 16 });
    }
    let m1 = (n as f64).powf(0.5).floor() as usize;
    let m2 = (n as f64).powf(2.0 / 3.0).floor() as usize;
    let e1 = subsample_estimates(data, x0, m1, derive_seed(seed, &[1]))?;
    let e2 = subsample_estimates(data, x0, m2, derive_seed(seed, &[2]))?;
    rate_from_subsample_estimates(&e1, &e2, m1, m2)
}

/// Subsampling interval with the estimated rate: approximates the law of
/// n^beta (fhat_n - truth) by the subsample distribution of
/// m1^beta (fhat_m - fhat_n) and inverts it around fhat_n.
pub fn subsample_ci(
    data: &RawSample,
    x0: f64,
    alpha: f64,
    seed: u64,
) -> Result<ConfidenceInterval> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha {alpha} outside (0, 1)")));
    }
    let n = data.pairs.len();
    if n < 16 {
        return Err(Error::SampleTooSmall { n, needed: 16 });
    }
    let fhat_n = fit_value(&data.pairs, x0, derive_seed(seed, &[0]))?;
    let m1 = (n as f64).powf(0.5).floor() as usize;
    let m2 = (n as f64).powf(2.0 / 3.0).floor() as usize;
    let e1 = subsample_estimates(data, x0, m1, derive_seed(seed, &[1]))?;
    let e2 = subsample_estimates(data, x0, m2, derive_seed(seed, &[2]))?;
    let beta = rate_from_subsample_estimates(&e1, &e2, m1, m2)?;

    let mut root: Vec<f64> = e1
        .iter()
        .map(|&fm| (m1 as f64).powf(beta) * (fm - fhat_n))
        .collect();
    root.sort_unstable_by(|a, b| a.total_cmp(b));
    let scale = (n as f64).powf(beta);
    let lo = fhat_n - quantile_sorted(&root, 1.0 - alpha / 2.0) / scale;
    let hi = fhat_n - quantile_sorted(&root, alpha / 2.0) / scale;
    Ok(ConfidenceInterval {
        lo: lo.min(hi),
        hi: lo.max(hi),
        level: 1.0 - alpha,
        method: Method::Subsample,
        x0,
    })
}

/// Pivot scale constant (sigma0^2^theta A / ((theta+1) h0^theta))^(1/(2 theta + 1)).
pub fn oracle_scale(theta: f64, a: f64, h0: f64, sigma0_sq: f64) -> f64 {
    (sigma0_sq.powf(theta) * a / ((theta + 1.0) * h0.powf(theta))).powf(1.0 / (2.0 * theta + 1.0))
}

/// Pivot interval with known local parameters: fhat_n(x0) plus or minus
/// n^(-theta/(2 theta + 1)) times the scale constant times the symmetric
/// (1 - alpha) quantile of the standardized limit law.  `law` must be the
/// standardized power law with exponent theta (unit coefficient drift
/// |t|^(theta+1)/(theta+1), h0 = 1, sigma0^2 = 1); the nuisance
/// parameters enter only through the scale constant.
pub fn oracle_pivot_ci(
    data: &RawSample,
    x0: f64,
    alpha: f64,
    theta: f64,
    a: f64,
    h0: f64,
    sigma0_sq: f64,
    law: &EmpiricalLaw,
    seed: u64,
) -> Result<ConfidenceInterval> {
    let n = data.pairs.len() as f64;
    let fhat = fit_value(&data.pairs, x0, derive_seed(seed, &[0]))?;
    let half = n.powf(-theta / (2.0 * theta + 1.0))
        * oracle_scale(theta, a, h0, sigma0_sq)
        * law.symmetric_quantile(alpha)?;
    Ok(ConfidenceInterval {
        lo: fhat - half,
        hi: fhat + half,
        level: 1.0 - alpha,
        method: Method::OraclePivot,
        x0,
    })
}

/// Median-bias estimate from a vector of (fhat - truth) values; exact
/// zeros count toward both one-sided probabilities.
pub fn median_bias_from_diffs(diffs: &[f64]) -> MedianBiasReport {
    let reps = diffs.len();
    let le = diffs.iter().filter(|&&d| d <= 0.0).count() as f64;
    let ge = diffs.iter().filter(|&&d| d >= 0.0).count() as f64;
    let r = reps as f64;
    let estimate = (0.5 - (le / r).min(ge / r)).max(0.0);
    MedianBiasReport {
        estimate,
        reps,
        mc_se: (0.25 / r).sqrt(),
    }
}

/// Monte Carlo median bias of the isotonic fit at x0 under the given
/// design: (1/2 - min of the two one-sided probabilities)_+ over fresh
/// replications.
pub fn median_bias(dgp: &DgpSpec, x0: f64, reps: usize, seed: u64) -> Result<MedianBiasReport> {
    if reps < 100 {
        return Err(Error::InvalidInput("need at least 100 replications".into()));
    }
    let diffs: Result<Vec<f64>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let s = draw(dgp, derive_seed(seed, &[r as u64]))?;
            let fhat = fit_value(&s.pairs, x0, derive_seed(seed, &[r as u64, 1]))?;
            Ok(fhat - s.truth_at_x0)
        })
        .collect();
    Ok(median_bias_from_diffs(&diffs?))
}
