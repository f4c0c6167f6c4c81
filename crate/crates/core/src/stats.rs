//! Small statistical helpers shared across the crate: empirical
//! distribution queries, the two-sample Kolmogorov-Smirnov statistic,
//! least-squares slopes, and counter-based seed derivation.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer. Used as the published draw-level seed hash:
/// `seed_i = splitmix64(master ^ splitmix64(i + 1))`, see [`derive_seed`].
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derives a stream seed from a master seed and a sequence of counters.
/// Order-independent execution schedules get identical per-item seeds
/// because only the counters enter the hash.
pub fn derive_seed(master: u64, counters: &[u64]) -> u64 {
    let mut s = splitmix64(master);
    for &c in counters {
        s = splitmix64(s ^ splitmix64(c.wrapping_add(1)));
    }
    s
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Order-statistic quantile with linear interpolation between adjacent
/// order statistics; `sorted` must be ascending and non-empty.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = p * (n - 1) as f64;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xs: Vec<f64> = a.to_vec();
    let mut ys: Vec<f64> = b.to_vec();
    xs.sort_unstable_by(|u, v| u.total_cmp(v));
    ys.sort_unstable_by(|u, v| u.total_cmp(v));
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        // advance past all copies of the smaller value in both samples
        // before comparing the empirical cdfs, so ties are handled exactly
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        let diff = (i as f64 / n - j as f64 / m).abs();
        if diff > d {
            d = diff;
        }
    }
    d
}

/// Asymptotic two-sample KS critical value c(alpha) * sqrt((n+m)/(nm))
/// with c(alpha) = sqrt(-ln(alpha/2)/2). At alpha = 0.001 and n = m this
/// is 1.9495 * sqrt(2/n), the gate used throughout the test suites.
pub fn ks_two_sample_critical(alpha: f64, n: usize, m: usize) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * (((n + m) as f64) / ((n * m) as f64)).sqrt()
}

/// Ordinary least-squares slope of y on x, with its classical standard
/// error from the residual variance.
pub fn ols_slope_with_se(x: &[f64], y: &[f64]) -> (f64, f64) {
    let slope = ols_slope(x, y);
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let intercept = my - slope * mx;
    let mut ss_res = 0.0;
    let mut sxx = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let r = yi - intercept - slope * xi;
        ss_res += r * r;
        sxx += (xi - mx) * (xi - mx);
    }
    let se = if x.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, se)
}

/// Ordinary least-squares slope of y on x.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
    }
    sxy / sxx
}

/// Two-sided sign test for median zero: rejects at level `alpha` when the
/// count of positive draws deviates from n/2 by more than the normal
/// critical value times sqrt(n)/2. Exact zeros are dropped.
pub fn sign_test_rejects(draws: &[f64], alpha: f64) -> bool {
    let pos = draws.iter().filter(|&&v| v > 0.0).count() as f64;
    let n = draws.iter().filter(|&&v| v != 0.0).count() as f64;
    if n == 0.0 {
        return false;
    }
    let z = (pos - n / 2.0).abs() / (n.sqrt() / 2.0);
    z > normal_quantile(1.0 - alpha / 2.0)
}

/// Standard normal quantile (Acklam's rational approximation, relative
/// error below 1.15e-9 over (0, 1)).
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let p_low = 0.02425;
    if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -normal_quantile(1.0 - p)
    }
}
