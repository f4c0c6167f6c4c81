//! Triangular-array regression designs whose local shape at a point x0
//! matches a prescribed drift, plus numeric verification that the local
//! expansion actually holds along a grid of sample sizes.

use crate::limit_law::DriftSpec;
use crate::stats::rng_from;
use crate::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;

/// Regression mean function, possibly depending on the sample size n.
#[derive(Debug, Clone)]
pub enum MeanFn {
    /// f(x) = alpha0 + sqrt(s_n / n) psi(s_n (x - x0)): the generic
    /// construction that realizes any admissible local shape exactly.
    FromDrift {
        drift: DriftSpec,
        alpha0: f64,
        x0: f64,
    },
    /// f(x) = x / n^(1/5) + x^3 / 6: a fixed family whose derivative at
    /// zero is nonzero for every n yet vanishes in the limit.
    NearFlatExample,
    /// f(x) = a |x|^theta sign(x), not depending on n: the classical
    /// fixed-truth power family.
    WrightFixed { a: f64, theta: f64 },
}

impl MeanFn {
    pub fn eval(&self, x: f64, n: usize) -> f64 {
        match self {
            MeanFn::FromDrift { drift, alpha0, x0 } => {
                let s = drift.rate.eval(n);
                alpha0 + (s / n as f64).sqrt() * drift.psi(s * (x - x0))
            }
            MeanFn::NearFlatExample => x / (n as f64).powf(0.2) + x * x * x / 6.0,
            MeanFn::WrightFixed { a, theta } => a * x.signum() * x.abs().powf(*theta),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Covariate {
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy)]
pub enum Noise {
    Gaussian { sigma: f64 },
    /// sigma(x) = 1 + x^2 / 2: bounded on compacta, continuous at any x0,
    /// and not independent of the covariate.
    Heteroscedastic,
}

impl Noise {
    fn sigma_at(&self, x: f64) -> f64 {
        match *self {
            Noise::Gaussian { sigma } => sigma,
            Noise::Heteroscedastic => 1.0 + x * x / 2.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DgpSpec {
    pub mean_fn: MeanFn,
    pub covariate: Covariate,
    pub noise: Noise,
    pub n: usize,
    pub x0: f64,
}

impl DgpSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("n must be >= 1".into()));
        }
        let Covariate::Uniform { lo, hi } = self.covariate;
        if !(lo < hi) {
            return Err(Error::InvalidInput(format!(
                "empty covariate support [{lo}, {hi}]"
            )));
        }
        if !(self.x0 > lo && self.x0 < hi) {
            return Err(Error::InvalidInput(format!(
                "x0 = {} not interior to [{lo}, {hi}]",
                self.x0
            )));
        }
        if let Noise::Gaussian { sigma } = self.noise {
            if sigma < 0.0 {
                return Err(Error::InvalidInput("negative noise scale".into()));
            }
        }
        Ok(())
    }

    pub fn mean_at(&self, x: f64) -> f64 {
        self.mean_fn.eval(x, self.n)
    }
}

#[derive(Debug, Clone)]
pub struct RawSample {
    pub pairs: Vec<(f64, f64)>,
    pub seed: u64,
    pub truth_at_x0: f64,
}

/// Draws n iid pairs (X, Y) with Y = f(X) + sigma(X) Z, Z standard normal.
pub fn draw(dgp: &DgpSpec, seed: u64) -> Result<RawSample> {
    dgp.validate()?;
    let Covariate::Uniform { lo, hi } = dgp.covariate;
    let mut rng = rng_from(seed);
    let pairs = (0..dgp.n)
        .map(|_| {
            let x = rng.gen_range(lo..hi);
            let z: f64 = rng.sample(StandardNormal);
            (x, dgp.mean_at(x) + dgp.noise.sigma_at(x) * z)
        })
        .collect();
    Ok(RawSample {
        pairs,
        seed,
        truth_at_x0: dgp.mean_at(dgp.x0),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct A3Row {
    pub n: usize,
    pub psi_n: f64,
    pub deviation: f64,
}

/// Finite-n local shape psi_n(c) = sqrt(n / s_n) (f_n(x0 + c/s_n) - f_n(x0))
/// along a grid of sample sizes, with its deviation from the limiting
/// psi(c) of the drift.
pub fn check_a3(
    mean: &MeanFn,
    drift: &DriftSpec,
    x0: f64,
    c: f64,
    n_grid: &[usize],
) -> Result<Vec<A3Row>> {
    if c == 0.0 {
        return Err(Error::InvalidInput("c must be nonzero".into()));
    }
    Ok(n_grid
        .iter()
        .map(|&n| {
            let s = drift.rate.eval(n);
            let psi_n =
                (n as f64 / s).sqrt() * (mean.eval(x0 + c / s, n) - mean.eval(x0, n));
            A3Row {
                n,
                psi_n,
                deviation: (psi_n - drift.psi(c)).abs(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit_law::RateSpec;
    use crate::stats::{ks_two_sample, ks_two_sample_critical};

    fn wright_drift() -> DriftSpec {
        DriftSpec::wright(1.0, 2.0, 1.0, 1.0).unwrap()
    }

    fn from_drift_dgp(n: usize) -> DgpSpec {
        DgpSpec {
            mean_fn: MeanFn::FromDrift {
                drift: wright_drift(),
                alpha0: 0.0,
                x0: 0.0,
            },
            covariate: Covariate::Uniform { lo: -1.0, hi: 1.0 },
            noise: Noise::Gaussian { sigma: 1.0 },
            n,
            x0: 0.0,
        }
    }

    #[test]
    fn from_drift_matches_closed_form() {
        // theta = 2, s_n = n^{1/5}: f(x) = n^{-2/5} psi(n^{1/5} x)
        let dgp = from_drift_dgp(100);
        let nf = 100.0f64;
        for x in [-0.7, -0.1, 0.05, 0.9] {
            let s = nf.powf(0.2);
            let want = nf.powf(-0.4) * (s * x).signum() * (s * x).abs().powi(2);
            assert!((dgp.mean_at(x) - want).abs() < 1e-12);
        }
        assert_eq!(dgp.mean_at(0.0), 0.0); // alpha0 at x0
    }

    #[test]
    fn from_drift_is_non_decreasing() {
        let dgp = from_drift_dgp(50);
        let mut prev = f64::NEG_INFINITY;
        for k in -20..=20 {
            let v = dgp.mean_at(k as f64 * 0.05);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn near_flat_example_values() {
        let f = MeanFn::NearFlatExample;
        assert_eq!(f.eval(0.0, 32), 0.0);
        // 32^{1/5} = 2
        assert!((f.eval(1.0, 32) - (0.5 + 1.0 / 6.0)).abs() < 1e-12);
        // derivative at 0 is n^{-1/5}, by central difference
        let h = 1e-6;
        let d = (f.eval(h, 32) - f.eval(-h, 32)) / (2.0 * h);
        assert!((d - 0.5).abs() < 1e-8);
    }

    #[test]
    fn a3_exact_for_constructed_family() {
        let drift = wright_drift();
        let mean = MeanFn::FromDrift {
            drift: drift.clone(),
            alpha0: 0.3,
            x0: 0.1,
        };
        for c in [-2.0, -0.5, 1.0, 3.0] {
            let rows = check_a3(&mean, &drift, 0.1, c, &[5, 50, 500, 50_000]).unwrap();
            for row in rows {
                assert!(row.deviation < 1e-12, "n = {}, dev = {}", row.n, row.deviation);
            }
        }
    }

    #[test]
    fn a3_exact_for_fixed_power_family() {
        // f0(x) = a |x|^theta sign(x) with s_n = n^{1/(2 theta + 1)}:
        // the powers cancel and psi_n == psi for every n
        let drift = DriftSpec::wright(1.5, 3.0, 1.0, 1.0).unwrap();
        let mean = MeanFn::WrightFixed { a: 1.5, theta: 3.0 };
        let rows = check_a3(&mean, &drift, 0.0, 0.8, &[10, 1000, 100_000]).unwrap();
        for row in rows {
            assert!(row.deviation < 1e-12);
        }
    }

    #[test]
    fn a3_near_flat_converges_monotonically() {
        // limiting shape is psi(c) = c with s_n = n^{1/5}
        let drift = DriftSpec::near_flat(
            vec![1.0],
            RateSpec::Power { alpha: 0.2 },
            1.0,
            1.0,
        )
        .unwrap();
        let rows = check_a3(
            &MeanFn::NearFlatExample,
            &drift,
            0.0,
            1.0,
            &[10, 100, 1000, 10_000, 100_000, 10_000_000],
        )
        .unwrap();
        let mut prev = f64::INFINITY;
        for row in &rows {
            // deviation is n^{-1/5} / 6, shrinking monotonically
            assert!(row.deviation < prev + 1e-15);
            assert!((row.deviation - (row.n as f64).powf(-0.2) / 6.0).abs() < 1e-10);
            prev = row.deviation;
        }
        assert!(rows.last().unwrap().deviation < 0.01);
    }

    #[test]
    fn a3_rejects_zero_c() {
        let drift = wright_drift();
        let mean = MeanFn::WrightFixed { a: 1.0, theta: 2.0 };
        assert!(check_a3(&mean, &drift, 0.0, 0.0, &[10]).is_err());
    }

    #[test]
    fn noiseless_draw_returns_mean_exactly() {
        let mut dgp = from_drift_dgp(200);
        dgp.noise = Noise::Gaussian { sigma: 0.0 };
        let s = draw(&dgp, 11).unwrap();
        assert_eq!(s.pairs.len(), 200);
        for &(x, y) in &s.pairs {
            assert_eq!(y, dgp.mean_at(x));
        }
        assert_eq!(s.truth_at_x0, 0.0);
    }

    #[test]
    fn draw_is_seed_reproducible() {
        let dgp = from_drift_dgp(50);
        let a = draw(&dgp, 4).unwrap();
        let b = draw(&dgp, 4).unwrap();
        assert_eq!(a.pairs, b.pairs);
        let c = draw(&dgp, 5).unwrap();
        assert_ne!(a.pairs, c.pairs);
    }

    #[test]
    fn noise_mean_is_zero_by_clt() {
        let mut dgp = from_drift_dgp(1_000_000);
        dgp.noise = Noise::Gaussian { sigma: 1.0 };
        let s = draw(&dgp, 8).unwrap();
        let resid_mean: f64 = s
            .pairs
            .iter()
            .map(|&(x, y)| y - dgp.mean_at(x))
            .sum::<f64>()
            / dgp.n as f64;
        // 4 standard errors of the mean at sigma = 1
        assert!(resid_mean.abs() < 4.0 / (dgp.n as f64).sqrt());
    }

    #[test]
    fn covariate_is_uniform_by_ks() {
        let dgp = from_drift_dgp(20_000);
        let s = draw(&dgp, 21).unwrap();
        let xs: Vec<f64> = s.pairs.iter().map(|p| p.0).collect();
        // compare against a deterministic uniform grid on (-1, 1)
        let m = 20_000;
        let grid: Vec<f64> = (0..m)
            .map(|k| -1.0 + 2.0 * (k as f64 + 0.5) / m as f64)
            .collect();
        let d = ks_two_sample(&xs, &grid);
        assert!(d < ks_two_sample_critical(0.001, xs.len(), m));
    }

    #[test]
    fn heteroscedastic_noise_centered_in_bins() {
        let mut dgp = from_drift_dgp(400_000);
        dgp.noise = Noise::Heteroscedastic;
        let s = draw(&dgp, 30).unwrap();
        let n_bins = 8;
        let mut sums = vec![0.0f64; n_bins];
        let mut sumsq = vec![0.0f64; n_bins];
        let mut counts = vec![0usize; n_bins];
        for &(x, y) in &s.pairs {
            let b = (((x + 1.0) / 2.0 * n_bins as f64) as usize).min(n_bins - 1);
            let r = y - dgp.mean_at(x);
            sums[b] += r;
            sumsq[b] += r * r;
            counts[b] += 1;
        }
        for b in 0..n_bins {
            let nb = counts[b] as f64;
            let mean = sums[b] / nb;
            let sd = (sumsq[b] / nb - mean * mean).sqrt();
            assert!(mean.abs() < 4.0 * sd / nb.sqrt(), "bin {b}: mean {mean}");
        }
    }

    #[test]
    fn validate_rejects_bad_specs() {
        let mut dgp = from_drift_dgp(10);
        dgp.x0 = 1.5;
        assert!(dgp.validate().is_err());
        let mut dgp = from_drift_dgp(10);
        dgp.n = 0;
        assert!(dgp.validate().is_err());
    }
}
