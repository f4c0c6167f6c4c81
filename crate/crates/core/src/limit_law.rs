//! Monte Carlo sampling of the pointwise limiting distributions: the
//! slope from the left at zero of the greatest convex minorant of a
//! two-sided Brownian motion plus a convex drift.
//!
//! A draw simulates the drifted process on a uniform symmetric grid,
//! takes the lower convex hull, and reads off the left slope at zero.
//! A window guard doubles the time window whenever the hull segment
//! covering zero reaches into the outer quarter of the window, so
//! truncation error is detected rather than assumed.

use crate::gcm::{covering_segment, left_slope, lower_hull, PolyLine};
use crate::stats::{derive_seed, ks_two_sample, rng_from};
use crate::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::fmt;
use std::sync::Arc;

/// Values beyond this are treated as an infinite drift branch.
pub const DRIFT_SENTINEL: f64 = 1e12;

/// Rate sequence s_n, evaluable at integer n.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum RateSpec {
    /// s_n = n^alpha
    Power { alpha: f64 },
    /// s_n = (sqrt(n) ln n / (2 theta + 1))^(2 / (2 theta + 1)),
    /// clamped to >= 1 so tiny n stay well-defined.
    PowerLog { theta: f64 },
}

impl RateSpec {
    pub fn eval(&self, n: usize) -> f64 {
        let nf = n as f64;
        match *self {
            RateSpec::Power { alpha } => nf.powf(alpha),
            RateSpec::PowerLog { theta } => {
                let e = 2.0 / (2.0 * theta + 1.0);
                (nf.sqrt() * nf.ln() / (2.0 * theta + 1.0)).powf(e).max(1.0)
            }
        }
    }
}

/// Local shape function psi and its drift antiderivative Psi.
#[derive(Clone)]
pub enum DriftKind {
    /// psi(c) = A sign(c) |c|^theta, Psi(t) = A |t|^(theta+1) / (theta+1)
    WrightPoly { a: f64, theta: f64 },
    /// Same psi as WrightPoly; only the rate carries the slowly varying
    /// logarithmic factor.
    SlowVarying { a: f64, theta: f64 },
    /// Different polynomial behavior on each side of zero; the side with
    /// the smaller exponent has an infinite drift branch when the
    /// exponents differ, represented by [`DRIFT_SENTINEL`].
    Asymmetric { a1: f64, theta1: f64, a2: f64, theta2: f64 },
    /// psi(c) = sum_j a_j c^j / j!, Psi(t) = sum_j a_j t^(j+1) / (j+1)!
    NearFlat { coeffs: Vec<f64> },
    /// Arbitrary non-decreasing psi with psi(0) = 0; Psi by adaptive
    /// numeric integration.
    Custom { psi: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
}

impl fmt::Debug for DriftKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriftKind::WrightPoly { a, theta } => {
                write!(f, "WrightPoly {{ a: {a}, theta: {theta} }}")
            }
            DriftKind::SlowVarying { a, theta } => {
                write!(f, "SlowVarying {{ a: {a}, theta: {theta} }}")
            }
            DriftKind::Asymmetric { a1, theta1, a2, theta2 } => write!(
                f,
                "Asymmetric {{ a1: {a1}, theta1: {theta1}, a2: {a2}, theta2: {theta2} }}"
            ),
            DriftKind::NearFlat { coeffs } => write!(f, "NearFlat {{ coeffs: {coeffs:?} }}"),
            DriftKind::Custom { .. } => write!(f, "Custom {{ .. }}"),
        }
    }
}

/// A limit law: the drift pair (psi, Psi), the local nuisance constants
/// h0 and sigma0^2, and the rate sequence of the data-generating family.
#[derive(Debug, Clone)]
pub struct DriftSpec {
    pub kind: DriftKind,
    pub h0: f64,
    pub sigma0_sq: f64,
    pub rate: RateSpec,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) {
        return Err(Error::InvalidDrift(format!("{name} must be > 0, got {v}")));
    }
    Ok(())
}

impl DriftSpec {
    pub fn wright(a: f64, theta: f64, h0: f64, sigma0_sq: f64) -> Result<Self> {
        check_positive("A", a)?;
        check_positive("theta", theta)?;
        check_positive("h0", h0)?;
        check_positive("sigma0_sq", sigma0_sq)?;
        Ok(DriftSpec {
            kind: DriftKind::WrightPoly { a, theta },
            h0,
            sigma0_sq,
            rate: RateSpec::Power { alpha: 1.0 / (2.0 * theta + 1.0) },
        })
    }

    pub fn slow_varying(a: f64, theta: f64, h0: f64, sigma0_sq: f64) -> Result<Self> {
        check_positive("A", a)?;
        check_positive("theta", theta)?;
        check_positive("h0", h0)?;
        check_positive("sigma0_sq", sigma0_sq)?;
        Ok(DriftSpec {
            kind: DriftKind::SlowVarying { a, theta },
            h0,
            sigma0_sq,
            rate: RateSpec::PowerLog { theta },
        })
    }

    pub fn asymmetric(
        a1: f64,
        theta1: f64,
        a2: f64,
        theta2: f64,
        h0: f64,
        sigma0_sq: f64,
    ) -> Result<Self> {
        for (name, v) in [("A1", a1), ("theta1", theta1), ("A2", a2), ("theta2", theta2)] {
            check_positive(name, v)?;
        }
        check_positive("h0", h0)?;
        check_positive("sigma0_sq", sigma0_sq)?;
        let theta = theta1.max(theta2);
        Ok(DriftSpec {
            kind: DriftKind::Asymmetric { a1, theta1, a2, theta2 },
            h0,
            sigma0_sq,
            rate: RateSpec::Power { alpha: 1.0 / (2.0 * theta + 1.0) },
        })
    }

    pub fn near_flat(coeffs: Vec<f64>, rate: RateSpec, h0: f64, sigma0_sq: f64) -> Result<Self> {
        check_positive("h0", h0)?;
        check_positive("sigma0_sq", sigma0_sq)?;
        let spec = DriftSpec {
            kind: DriftKind::NearFlat { coeffs },
            h0,
            sigma0_sq,
            rate,
        };
        spec.probe_monotone()?;
        Ok(spec)
    }

    pub fn custom(
        psi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        rate: RateSpec,
        h0: f64,
        sigma0_sq: f64,
    ) -> Result<Self> {
        check_positive("h0", h0)?;
        check_positive("sigma0_sq", sigma0_sq)?;
        let spec = DriftSpec {
            kind: DriftKind::Custom { psi },
            h0,
            sigma0_sq,
            rate,
        };
        spec.probe_monotone()?;
        Ok(spec)
    }

    fn probe_monotone(&self) -> Result<()> {
        let probes: Vec<f64> = (-200..=200).map(|k| k as f64 * 0.05).collect();
        let mut prev = f64::NEG_INFINITY;
        for &c in &probes {
            let v = self.psi(c);
            if v < prev - 1e-12 {
                return Err(Error::InvalidDrift(format!(
                    "psi is decreasing near c = {c}"
                )));
            }
            prev = v;
        }
        if self.psi(0.0).abs() > 1e-12 {
            return Err(Error::InvalidDrift("psi(0) must be 0".into()));
        }
        Ok(())
    }

    /// Local shape function psi(c); infinite branches return +-infinity.
    pub fn psi(&self, c: f64) -> f64 {
        if c == 0.0 {
            return 0.0;
        }
        match &self.kind {
            DriftKind::WrightPoly { a, theta } | DriftKind::SlowVarying { a, theta } => {
                a * c.signum() * c.abs().powf(*theta)
            }
            DriftKind::Asymmetric { a1, theta1, a2, theta2 } => {
                let theta = theta1.max(*theta2);
                if c > 0.0 {
                    if theta1 >= theta2 {
                        a1 * c.powf(theta)
                    } else {
                        f64::INFINITY
                    }
                } else if theta1 <= theta2 {
                    -a2 * (-c).powf(theta)
                } else {
                    f64::NEG_INFINITY
                }
            }
            DriftKind::NearFlat { coeffs } => {
                let mut acc = 0.0;
                let mut pow = 1.0;
                let mut fact = 1.0;
                for (j, &aj) in coeffs.iter().enumerate() {
                    pow *= c;
                    fact *= (j + 1) as f64;
                    acc += aj * pow / fact;
                }
                acc
            }
            DriftKind::Custom { psi } => psi(c),
        }
    }

    /// Drift Psi(t): the signed antiderivative of psi, non-negative and
    /// convex, with infinite branches clamped to [`DRIFT_SENTINEL`].
    pub fn big_psi(&self, t: f64) -> f64 {
        let v = match &self.kind {
            DriftKind::WrightPoly { a, theta } | DriftKind::SlowVarying { a, theta } => {
                a * t.abs().powf(theta + 1.0) / (theta + 1.0)
            }
            DriftKind::Asymmetric { a1, theta1, a2, theta2 } => {
                let theta = theta1.max(*theta2);
                if t >= 0.0 {
                    if theta1 >= theta2 {
                        a1 * t.abs().powf(theta + 1.0) / (theta + 1.0)
                    } else {
                        DRIFT_SENTINEL
                    }
                } else if theta1 <= theta2 {
                    a2 * t.abs().powf(theta + 1.0) / (theta + 1.0)
                } else {
                    DRIFT_SENTINEL
                }
            }
            DriftKind::NearFlat { coeffs } => {
                let mut acc = 0.0;
                let mut pow = t;
                let mut fact = 1.0;
                for (j, &aj) in coeffs.iter().enumerate() {
                    pow *= t;
                    fact *= (j + 2) as f64;
                    acc += aj * pow / fact;
                }
                // Psi(t) = integral of psi from 0 to t, which is >= 0 on
                // both sides because psi is non-decreasing with psi(0) = 0
                acc
            }
            DriftKind::Custom { psi } => {
                if t >= 0.0 {
                    adaptive_simpson(psi.as_ref(), 0.0, t, 1e-9)
                } else {
                    -adaptive_simpson(psi.as_ref(), t, 0.0, 1e-9)
                }
            }
        };
        v.min(DRIFT_SENTINEL)
    }

    /// Drift values Psi(h0 t / sigma0^2) on an increasing grid of times.
    /// For [`DriftKind::Custom`] the integral is accumulated across
    /// adjacent grid points instead of re-integrating from zero.
    pub fn drift_values(&self, ts: &[f64]) -> Vec<f64> {
        match &self.kind {
            DriftKind::Custom { psi } => {
                let scale = self.h0 / self.sigma0_sq;
                let us: Vec<f64> = ts.iter().map(|&t| scale * t).collect();
                let zero_pos = us.partition_point(|&u| u < 0.0);
                let mut vals = vec![0.0; us.len()];
                // integrate outward from 0 in both directions
                let mut acc = 0.0;
                let mut prev = 0.0;
                for k in zero_pos..us.len() {
                    acc += adaptive_simpson(psi.as_ref(), prev, us[k], 1e-9);
                    prev = us[k];
                    vals[k] = acc.min(DRIFT_SENTINEL);
                }
                acc = 0.0;
                prev = 0.0;
                for k in (0..zero_pos).rev() {
                    acc += adaptive_simpson(psi.as_ref(), us[k], prev, 1e-9);
                    prev = us[k];
                    vals[k] = (-acc).min(DRIFT_SENTINEL);
                }
                vals
            }
            _ => {
                let scale = self.h0 / self.sigma0_sq;
                ts.iter().map(|&t| self.big_psi(scale * t)).collect()
            }
        }
    }
}

fn adaptive_simpson(f: &(dyn Fn(f64) -> f64 + Send + Sync), a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &(dyn Fn(f64) -> f64 + Send + Sync), a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), fm)
    }
    fn rec(
        f: &(dyn Fn(f64) -> f64 + Send + Sync),
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (left, flm) = simpson(f, a, fa, m, fm);
        let (right, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, fa, m, fm, left, flm, tol / 2.0, depth - 1)
                + rec(f, m, fm, b, fb, right, frm, tol / 2.0, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, fm) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, whole, fm, tol, 40)
}

/// Symmetric uniform time grid: 2 n_pts + 1 points on [-t_half, t_half],
/// step t_half / n_pts, zero included.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct GridConfig {
    pub t_half: f64,
    pub n_pts: usize,
    pub max_doublings: usize,
}

impl GridConfig {
    /// Window wide enough that the drift dominates the Brownian part well
    /// inside it for the default laws; 2^14 points per side.
    pub fn default_for(drift: &DriftSpec) -> Self {
        GridConfig {
            t_half: 8.0 * (drift.sigma0_sq / drift.h0).max(1.0),
            n_pts: 1 << 14,
            max_doublings: 3,
        }
    }

    pub fn times(&self) -> Vec<f64> {
        let delta = self.t_half / self.n_pts as f64;
        (-(self.n_pts as i64)..=self.n_pts as i64)
            .map(|k| k as f64 * delta)
            .collect()
    }

    fn doubled(&self) -> Self {
        GridConfig {
            t_half: 2.0 * self.t_half,
            ..*self
        }
    }
}

/// Seeded Monte Carlo draws from a limit law, with quantile queries.
#[derive(Debug, Clone)]
pub struct EmpiricalLaw {
    pub draws: Vec<f64>,
    pub master_seed: u64,
    pub drift: DriftSpec,
    pub grid: GridConfig,
}

impl EmpiricalLaw {
    /// Order-statistic quantile with linear interpolation.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidInput(format!("quantile level {p} outside (0, 1)")));
        }
        if self.draws.is_empty() {
            return Err(Error::InvalidInput("no draws".into()));
        }
        let mut sorted = self.draws.clone();
        sorted.sort_unstable_by(|a, b| a.total_cmp(b));
        Ok(crate::stats::quantile_sorted(&sorted, p))
    }

    /// Symmetric half-width: the (1 - alpha) quantile of |draws|.  For a
    /// symmetric law this equals the 1 - alpha/2 quantile of the draws,
    /// with lower Monte Carlo variance.
    pub fn symmetric_quantile(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidInput(format!("level {alpha} outside (0, 1)")));
        }
        let mut abs: Vec<f64> = self.draws.iter().map(|d| d.abs()).collect();
        abs.sort_unstable_by(|a, b| a.total_cmp(b));
        Ok(crate::stats::quantile_sorted(&abs, 1.0 - alpha))
    }
}

/// Drifted two-sided Brownian path on the grid: two independent Gaussian
/// random walks extending left and right from B(0) = 0, plus the drift.
pub fn simulate_path(drift: &DriftSpec, grid: &GridConfig, seed: u64) -> PolyLine {
    let ts = grid.times();
    let drift_vals = drift.drift_values(&ts);
    simulate_path_with_drift(&ts, &drift_vals, grid, seed)
}

fn simulate_path_with_drift(
    ts: &[f64],
    drift_vals: &[f64],
    grid: &GridConfig,
    seed: u64,
) -> PolyLine {
    let n = grid.n_pts;
    let sd = (grid.t_half / n as f64).sqrt();
    let mut rng = rng_from(seed);
    let mut vs = vec![0.0f64; 2 * n + 1];
    let mut b = 0.0;
    for k in 1..=n {
        let z: f64 = rng.sample(StandardNormal);
        b += sd * z;
        vs[n + k] = b;
    }
    b = 0.0;
    for k in 1..=n {
        let z: f64 = rng.sample(StandardNormal);
        b += sd * z;
        vs[n - k] = b;
    }
    for (v, d) in vs.iter_mut().zip(drift_vals) {
        *v += d;
    }
    PolyLine {
        ts: ts.to_vec(),
        vs,
    }
}

struct WindowLevels {
    grids: Vec<GridConfig>,
    times: Vec<Vec<f64>>,
    drifts: Vec<Vec<f64>>,
}

impl WindowLevels {
    fn build(drift: &DriftSpec, grid: &GridConfig) -> Self {
        let mut grids = vec![*grid];
        for _ in 0..grid.max_doublings {
            grids.push(grids.last().unwrap().doubled());
        }
        let times: Vec<Vec<f64>> = grids.iter().map(|g| g.times()).collect();
        let drifts: Vec<Vec<f64>> = times.iter().map(|ts| drift.drift_values(ts)).collect();
        WindowLevels { grids, times, drifts }
    }
}

fn one_draw(levels: &WindowLevels, draw: usize, master_seed: u64) -> Result<f64> {
    for (lvl, g) in levels.grids.iter().enumerate() {
        // fresh variates per level: reusing the draw seed would make the
        // doubled-window path an exact Brownian-scaled copy of the failing
        // one, with the covering segment doubling along with the window
        let seed = derive_seed(master_seed, &[draw as u64, lvl as u64]);
        let path = simulate_path_with_drift(&levels.times[lvl], &levels.drifts[lvl], g, seed);
        let hull = lower_hull(&path)?;
        let (seg_lo, seg_hi) = covering_segment(&hull, &path, 0.0)?;
        let inner = 0.75 * g.t_half;
        if seg_lo >= -inner && seg_hi <= inner {
            return left_slope(&hull, &path, 0.0);
        }
    }
    Err(Error::WindowError {
        draw,
        max_doublings: levels.grids.len() - 1,
    })
}

/// Samples `n_draws` independent draws of the left slope at zero.  Draw i
/// at window level l uses the derived seed `derive_seed(master_seed, [i, l])`,
/// so the result is identical under any parallel schedule.
pub fn sample_slgcm_zero(
    drift: &DriftSpec,
    grid: &GridConfig,
    n_draws: usize,
    master_seed: u64,
) -> Result<EmpiricalLaw> {
    if n_draws == 0 {
        return Err(Error::InvalidInput("n_draws must be >= 1".into()));
    }
    let levels = WindowLevels::build(drift, grid);
    let draws: Result<Vec<f64>> = (0..n_draws)
        .into_par_iter()
        .map(|i| one_draw(&levels, i, master_seed))
        .collect();
    Ok(EmpiricalLaw {
        draws: draws?,
        master_seed,
        drift: drift.clone(),
        grid: *grid,
    })
}

/// Monte Carlo check of the representation identity
/// slGCM[B + Psi(h0 t / s0^2)](0) =d sqrt(D) slGCM[B + sqrt(D) Psi(h0 t / (D s0^2))](0).
/// Returns the two-sample KS statistic between the two samplers, each with
/// `n_draws` draws and independent seed streams.  The right-hand window is
/// stretched by D so the lattice identity is exact and only Monte Carlo
/// noise remains.
pub fn scaling_identity_check(
    drift: &DriftSpec,
    d: f64,
    grid: &GridConfig,
    n_draws: usize,
    master_seed: u64,
) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::InvalidInput(format!("D must be > 0, got {d}")));
    }
    let law_a = sample_slgcm_zero(drift, grid, n_draws, derive_seed(master_seed, &[1]))?;

    let grid_b = GridConfig {
        t_half: grid.t_half * d,
        ..*grid
    };
    let seed_b = derive_seed(master_seed, &[2]);
    let levels = {
        let mut grids = vec![grid_b];
        for _ in 0..grid_b.max_doublings {
            grids.push(grids.last().unwrap().doubled());
        }
        let times: Vec<Vec<f64>> = grids.iter().map(|g| g.times()).collect();
        let drifts: Vec<Vec<f64>> = times
            .iter()
            .map(|ts| {
                // sqrt(D) Psi(h0 t / (D sigma0^2)) via the scaled-argument grid
                let scaled: Vec<f64> = ts.iter().map(|&t| t / d).collect();
                drift
                    .drift_values(&scaled)
                    .into_iter()
                    .map(|v| (d.sqrt() * v).min(DRIFT_SENTINEL))
                    .collect()
            })
            .collect();
        WindowLevels { grids, times, drifts }
    };
    let draws_b: Result<Vec<f64>> = (0..n_draws)
        .into_par_iter()
        .map(|i| one_draw(&levels, i, seed_b).map(|s| d.sqrt() * s))
        .collect();
    Ok(ks_two_sample(&law_a.draws, &draws_b?))
}
