//! Isotonic least-squares estimation.
//!
//! [`pava`] solves the order-constrained least-squares problem with a
//! single left-to-right pass over a block stack (weighted pooling,
//! O(n)).  [`minmax_at`] is an independent O(n^2) route through the
//! closed-form max-min window-average formula; the two must agree at
//! every observed covariate, which the test suites assert.

use crate::stats::{derive_seed, rng_from};
use crate::{Error, Result};
use rand::seq::SliceRandom;

/// Covariate-ordered sample with tie-break provenance.
///
/// Equal covariate values are put in a uniformly random relative order
/// driven by `tie_seed`, so repeated runs with the same seed produce the
/// same ordering.
#[derive(Debug, Clone)]
pub struct SortedSample {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// `perm[i]` is the input index of the pair now at sorted position `i`.
    pub perm: Vec<usize>,
    pub tie_seed: u64,
}

impl SortedSample {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

/// Left-continuous non-decreasing step function: value is `levels[j]` on
/// `(knots[j-1], knots[j]]`, extended by a constant on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    pub knots: Vec<f64>,
    pub levels: Vec<f64>,
}

impl StepFunction {
    pub fn eval(&self, x: f64) -> f64 {
        // first knot >= x; left-continuity puts x == knots[j] in block j
        let j = self.knots.partition_point(|&k| k < x);
        if j >= self.knots.len() {
            *self.levels.last().unwrap()
        } else {
            self.levels[j]
        }
    }

    pub fn n_blocks(&self) -> usize {
        self.levels.len()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FitDiagnostics {
    /// Least-squares objective at the fit, on the 1/n scale.
    pub sse: f64,
    pub n_blocks: usize,
    /// max(|levels[0]|, |levels[last]|); the fit attains its sup-norm at
    /// an endpoint because it is monotone and constant beyond the data.
    pub sup_norm: f64,
}

/// Sorts `pairs` by covariate, breaking exact ties by a uniformly random
/// permutation within each tie group (seeded, reproducible).
pub fn sort_sample(pairs: &[(f64, f64)], tie_seed: u64) -> Result<SortedSample> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    for &(x, y) in pairs {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite pair ({x}, {y})")));
        }
    }
    let mut idx: Vec<usize> = (0..pairs.len()).collect();
    idx.sort_by(|&a, &b| pairs[a].0.total_cmp(&pairs[b].0));

    // shuffle each maximal run of equal covariates
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && pairs[idx[end]].0 == pairs[idx[start]].0 {
            end += 1;
        }
        if end - start > 1 {
            let mut rng = rng_from(derive_seed(tie_seed, &[start as u64]));
            idx[start..end].shuffle(&mut rng);
        }
        start = end;
    }

    Ok(SortedSample {
        xs: idx.iter().map(|&i| pairs[i].0).collect(),
        ys: idx.iter().map(|&i| pairs[i].1).collect(),
        perm: idx,
        tie_seed,
    })
}

/// Weighted pool-adjacent-violators fit; weights default to 1.
///
/// Pooling uses exact `<=` comparisons: merging blocks with equal levels
/// leaves the fitted function unchanged.
pub fn pava(sample: &SortedSample, weights: Option<&[f64]>) -> Result<StepFunction> {
    let n = sample.len();
    if let Some(w) = weights {
        if w.len() != n {
            return Err(Error::InvalidInput(format!(
                "{} weights for {} observations",
                w.len(),
                n
            )));
        }
        if w.iter().any(|&wi| !(wi > 0.0)) {
            return Err(Error::InvalidInput("non-positive weight".into()));
        }
    }

    // block stack: (weight sum, level, index of last observation)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        let wi = weights.map_or(1.0, |w| w[i]);
        let mut bw = wi;
        let mut bv = sample.ys[i];
        while let Some(&(pw, pv, _)) = blocks.last() {
            if pv <= bv {
                break;
            }
            bv = (pw * pv + bw * bv) / (pw + bw);
            bw += pw;
            blocks.pop();
        }
        blocks.push((bw, bv, i));
    }

    let mut knots = Vec::with_capacity(blocks.len());
    let mut levels = Vec::with_capacity(blocks.len());
    for &(_, v, last) in &blocks {
        // merge degenerate equal-level neighbours (possible with ties)
        if levels.last().is_some_and(|&p: &f64| p == v) {
            *knots.last_mut().unwrap() = sample.xs[last];
        } else {
            knots.push(sample.xs[last]);
            levels.push(v);
        }
    }
    Ok(StepFunction { knots, levels })
}

/// Closed-form max-min window-average value of the isotonic fit at `x0`:
/// max over i with xs[i] <= x0 of min over j with xs[j] >= x0 of the
/// average of ys[i..=j].  Outside the covariate range one of the index
/// sets is empty and the surviving min-prefix (max-suffix) average is the
/// constant extension of the fit.  O(n^2).
pub fn minmax_at(sample: &SortedSample, x0: f64) -> f64 {
    let n = sample.len();
    let mut prefix = vec![0.0f64; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + sample.ys[i];
    }
    let avg = |i: usize, j: usize| (prefix[j + 1] - prefix[i]) / (j - i + 1) as f64;

    let k_hi = sample.xs.partition_point(|&x| x <= x0); // i in 0..k_hi
    let j0 = sample.xs.partition_point(|&x| x < x0); // j in j0..n

    if k_hi == 0 {
        return (0..n).map(|j| avg(0, j)).fold(f64::INFINITY, f64::min);
    }
    if j0 == n {
        return (0..n).map(|i| avg(i, n - 1)).fold(f64::NEG_INFINITY, f64::max);
    }
    let mut best = f64::NEG_INFINITY;
    for i in 0..k_hi {
        let mut inner = f64::INFINITY;
        for j in j0.max(i)..n {
            inner = inner.min(avg(i, j));
        }
        best = best.max(inner);
    }
    best
}

/// Exact max-min window-average value at an arbitrary `x0` in O(n).
///
/// Between observations this differs from the left-continuous step
/// extension of the fitted values: the window constraints split the
/// cumulative-sum diagram into the points left of `x0` and the points
/// right of it, and the max-min value is the slope of the lower common
/// tangent bridging the two sides.  At observed covariates it coincides
/// with [`pava`] and [`minmax_at`]; outside the covariate range it is
/// the constant extension.
pub fn fit_value_at(sample: &SortedSample, x0: f64) -> f64 {
    let n = sample.len();
    let k_hi = sample.xs.partition_point(|&x| x <= x0);
    let j0 = sample.xs.partition_point(|&x| x < x0);
    if k_hi - j0 >= 2 {
        // several observations exactly at x0: the two index sets overlap
        // and the tangent construction below does not apply
        return minmax_at(sample, x0);
    }
    let mut prefix = vec![0.0f64; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + sample.ys[i];
    }
    // candidate window starts are cumulative points 0..=l_end, candidate
    // window ends are r_start..=n; the empty-side fallbacks collapse each
    // side to a single point, reproducing the constant extension
    let l_end = k_hi.saturating_sub(1);
    let r_start = if j0 == n { n } else { j0 + 1 };
    let left = lower_hull_of_prefix(&prefix, 0, l_end);
    let right = lower_hull_of_prefix(&prefix, r_start, n);

    // signed area: positive iff P lies above the line through A then B
    let above = |p: usize, a: usize, b: usize| -> f64 {
        (b - a) as f64 * (prefix[p] - prefix[a]) - (prefix[b] - prefix[a]) * (p as f64 - a as f64)
    };
    let mut a = left.len() - 1;
    let mut b = 0usize;
    loop {
        let mut moved = false;
        while a > 0 && above(left[a - 1], left[a], right[b]) < 0.0 {
            a -= 1;
            moved = true;
        }
        while b + 1 < right.len() && above(right[b + 1], left[a], right[b]) < 0.0 {
            b += 1;
            moved = true;
        }
        if !moved {
            break;
        }
    }
    (prefix[right[b]] - prefix[left[a]]) / (right[b] - left[a]) as f64
}

/// Value at `x0` of the monotone interpolant of the fitted values:
/// the fitted value itself at an observed covariate, linear between
/// neighbouring observations, and constant outside the covariate range.
///
/// The least-squares problem pins the fit down only at the observations,
/// so any monotone function through the fitted values is a valid
/// estimator; this is the interpolating choice used for point evaluation
/// in the simulation studies and confidence intervals.  `fit` must be
/// the [`pava`] fit of `sample`.
pub fn interp_value_at(sample: &SortedSample, fit: &StepFunction, x0: f64) -> f64 {
    let n = sample.len();
    let lo = sample.xs.partition_point(|&x| x < x0);
    if lo < n && sample.xs[lo] == x0 {
        return fit.eval(x0);
    }
    if lo == 0 {
        return fit.eval(sample.xs[0]);
    }
    if lo == n {
        return fit.eval(sample.xs[n - 1]);
    }
    let (xl, xr) = (sample.xs[lo - 1], sample.xs[lo]);
    let (yl, yr) = (fit.eval(xl), fit.eval(xr));
    yl + (yr - yl) * (x0 - xl) / (xr - xl)
}

/// Lower convex hull indices of the cumulative-sum points (k, prefix[k])
/// for k in lo..=hi.
fn lower_hull_of_prefix(prefix: &[f64], lo: usize, hi: usize) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(hi - lo + 1);
    for k in lo..=hi {
        while hull.len() >= 2 {
            let (p, q) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop q if it lies on or above the chord p -> k
            let keep = (prefix[q] - prefix[p]) * ((k - p) as f64)
                < (prefix[k] - prefix[p]) * ((q - p) as f64);
            if keep {
                break;
            }
            hull.pop();
        }
        hull.push(k);
    }
    hull
}

/// Fit diagnostics for `f` produced from `sample`.
pub fn diagnostics(sample: &SortedSample, f: &StepFunction) -> FitDiagnostics {
    let n = sample.len() as f64;
    let sse = sample
        .xs
        .iter()
        .zip(&sample.ys)
        .map(|(&x, &y)| {
            let r = y - f.eval(x);
            r * r
        })
        .sum::<f64>()
        / n;
    let sup_norm = f.levels.first().unwrap().abs().max(f.levels.last().unwrap().abs());
    FitDiagnostics {
        sse,
        n_blocks: f.n_blocks(),
        sup_norm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::rng_from;
    use rand::Rng;

    fn sample_from_ys(ys: &[f64]) -> SortedSample {
        let pairs: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (i as f64, y)).collect();
        sort_sample(&pairs, 0).unwrap()
    }

    #[test]
    fn sort_plain() {
        let s = sort_sample(&[(1.0, 2.0), (0.0, 5.0)], 0).unwrap();
        assert_eq!(s.xs, vec![0.0, 1.0]);
        assert_eq!(s.ys, vec![5.0, 2.0]);
        assert_eq!(s.perm, vec![1, 0]);
    }

    #[test]
    fn sort_rejects_bad_input() {
        assert!(sort_sample(&[], 0).is_err());
        assert!(sort_sample(&[(f64::NAN, 1.0)], 0).is_err());
        assert!(sort_sample(&[(0.0, f64::INFINITY)], 0).is_err());
    }

    #[test]
    fn tie_break_hits_both_orders() {
        let pairs = [(0.0, 1.0), (0.0, 2.0)];
        let mut seen = std::collections::HashSet::new();
        for seed in 0..32 {
            let s = sort_sample(&pairs, seed).unwrap();
            seen.insert(s.ys[0] as i64);
        }
        assert_eq!(seen.len(), 2, "both tie orders should occur across seeds");
    }

    #[test]
    fn sort_matches_reference_sort() {
        let mut rng = rng_from(42);
        let pairs: Vec<(f64, f64)> =
            (0..100).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
        let s = sort_sample(&pairs, 1).unwrap();
        let mut want: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        want.sort_by(|a, b| a.total_cmp(b));
        assert_eq!(s.xs, want);
        let mut got_y: Vec<f64> = s.ys.clone();
        let mut want_y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        got_y.sort_by(|a, b| a.total_cmp(b));
        want_y.sort_by(|a, b| a.total_cmp(b));
        assert_eq!(got_y, want_y);
    }

    #[test]
    fn pava_monotone_identity() {
        let s = sample_from_ys(&[1.0, 2.0, 3.0]);
        let f = pava(&s, None).unwrap();
        assert_eq!(f.levels, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn pava_pools_to_grand_mean() {
        let s = sample_from_ys(&[3.0, 1.0, 2.0]);
        let f = pava(&s, None).unwrap();
        assert_eq!(f.levels, vec![2.0]);
        for &x in &s.xs {
            assert_eq!(f.eval(x), 2.0);
        }
    }

    #[test]
    fn pava_constant_input_single_block() {
        let s = sample_from_ys(&[4.0; 7]);
        let f = pava(&s, None).unwrap();
        assert_eq!(f.levels, vec![4.0]);
        assert_eq!(f.n_blocks(), 1);
    }

    #[test]
    fn pava_rejects_bad_weights() {
        let s = sample_from_ys(&[1.0, 2.0]);
        assert!(pava(&s, Some(&[1.0, 0.0])).is_err());
        assert!(pava(&s, Some(&[1.0])).is_err());
    }

    // exhaustive minimization over monotone candidates on a fine grid
    fn brute_force_fit(ys: &[f64], lo: f64, hi: f64, steps: usize) -> Vec<f64> {
        let n = ys.len();
        let grid: Vec<f64> = (0..=steps)
            .map(|k| lo + (hi - lo) * k as f64 / steps as f64)
            .collect();
        let mut best = vec![0.0; n];
        let mut best_obj = f64::INFINITY;
        // enumerate non-decreasing assignments recursively
        fn rec(
            ys: &[f64],
            grid: &[f64],
            cur: &mut Vec<f64>,
            min_idx: usize,
            best: &mut Vec<f64>,
            best_obj: &mut f64,
        ) {
            if cur.len() == ys.len() {
                let obj: f64 = ys.iter().zip(cur.iter()).map(|(y, t)| (y - t) * (y - t)).sum();
                if obj < *best_obj {
                    *best_obj = obj;
                    best.clone_from(cur);
                }
                return;
            }
            for (k, &g) in grid.iter().enumerate().skip(min_idx) {
                cur.push(g);
                rec(ys, grid, cur, k, best, best_obj);
                cur.pop();
            }
        }
        rec(ys, &grid, &mut Vec::new(), 0, &mut best, &mut best_obj);
        best
    }

    #[test]
    fn pava_matches_grid_enumeration() {
        let ys = [3.0, 1.0, 2.0];
        let brute = brute_force_fit(&ys, 0.0, 4.0, 40);
        let s = sample_from_ys(&ys);
        let f = pava(&s, None).unwrap();
        for (i, &x) in s.xs.iter().enumerate() {
            assert!((f.eval(x) - brute[i]).abs() <= 0.1 + 1e-12);
        }
    }

    #[test]
    fn pava_kkt_block_means() {
        let mut rng = rng_from(9);
        for _ in 0..50 {
            let n = rng.gen_range(1..40);
            let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let s = sample_from_ys(&ys);
            let f = pava(&s, None).unwrap();
            let fitted: Vec<f64> = s.xs.iter().map(|&x| f.eval(x)).collect();
            // cumulative residual sums are non-negative, zero at block ends
            let mut cum = 0.0;
            for i in 0..n {
                cum += s.ys[i] - fitted[i];
                assert!(cum >= -1e-9, "cumulative residual sum must stay >= 0");
                let block_end = i + 1 == n || fitted[i + 1] != fitted[i];
                if block_end {
                    assert!(cum.abs() < 1e-9, "residuals must sum to zero per block");
                }
            }
            // mean preservation
            let total_fit: f64 = fitted.iter().sum();
            let total_y: f64 = s.ys.iter().sum();
            assert!((total_fit - total_y).abs() < 1e-8);
        }
    }

    #[test]
    fn pava_is_projection_optimal() {
        let mut rng = rng_from(11);
        for _ in 0..30 {
            let n = rng.gen_range(2..30);
            let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..2.0)).collect();
            let s = sample_from_ys(&ys);
            let f = pava(&s, Some(&w)).unwrap();
            let sse_fit: f64 = (0..n).map(|i| w[i] * (ys[i] - f.eval(s.xs[i])).powi(2)).sum();
            // random non-decreasing candidate
            let mut cand: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            cand.sort_by(|a, b| a.total_cmp(b));
            let sse_cand: f64 = (0..n).map(|i| w[i] * (ys[i] - cand[i]).powi(2)).sum();
            assert!(sse_fit <= sse_cand + 1e-9);
        }
    }

    #[test]
    fn shift_invariance() {
        let mut rng = rng_from(13);
        let ys: Vec<f64> = (0..25).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let shifted: Vec<f64> = ys.iter().map(|y| y + 2.5).collect();
        let f = pava(&sample_from_ys(&ys), None).unwrap();
        let g = pava(&sample_from_ys(&shifted), None).unwrap();
        assert_eq!(f.knots, g.knots);
        for (a, b) in f.levels.iter().zip(&g.levels) {
            assert!((b - a - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn minmax_examples() {
        let s = sample_from_ys(&[1.0, 2.0, 3.0]);
        assert_eq!(minmax_at(&s, s.xs[1]), 2.0);
        let s = sample_from_ys(&[3.0, 1.0, 2.0]);
        assert_eq!(minmax_at(&s, s.xs[0]), 2.0);
    }

    #[test]
    fn minmax_outside_range_is_constant_extension() {
        let s = sample_from_ys(&[3.0, 1.0, 2.0]);
        let f = pava(&s, None).unwrap();
        assert_eq!(minmax_at(&s, -100.0), f.levels[0]);
        assert_eq!(minmax_at(&s, 100.0), *f.levels.last().unwrap());
    }

    #[test]
    fn minmax_equals_pava_at_observations() {
        let mut rng = rng_from(17);
        for _ in 0..100 {
            let n = rng.gen_range(1..60);
            let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let s = sample_from_ys(&ys);
            let f = pava(&s, None).unwrap();
            for &x in &s.xs {
                assert!((f.eval(x) - minmax_at(&s, x)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn fit_value_between_points_is_the_bridge_slope() {
        // increasing data: between two observations the max-min window
        // formula averages the two neighbours, unlike the step extension
        let s = sample_from_ys(&[1.0, 2.0, 3.0]);
        let mid = 0.5 * (s.xs[0] + s.xs[1]);
        assert!((fit_value_at(&s, mid) - 1.5).abs() < 1e-12);
        assert_eq!(pava(&s, None).unwrap().eval(mid), 2.0);
    }

    #[test]
    fn fit_value_matches_quadratic_reference_everywhere() {
        let mut rng = rng_from(23);
        for _ in 0..200 {
            let n = rng.gen_range(1..60);
            let pairs: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let s = sort_sample(&pairs, 0).unwrap();
            let mut probes: Vec<f64> = s.xs.clone();
            probes.extend(s.xs.windows(2).map(|w| 0.5 * (w[0] + w[1])));
            probes.push(s.xs[0] - 1.0);
            probes.push(s.xs[n - 1] + 1.0);
            for &x0 in &probes {
                let want = minmax_at(&s, x0);
                let got = fit_value_at(&s, x0);
                assert!(
                    (got - want).abs() < 1e-9,
                    "x0 {x0}: tangent {got} vs reference {want}"
                );
            }
        }
    }

    #[test]
    fn fit_value_handles_ties_at_the_query_point() {
        let pairs = [(0.0, 1.0), (1.0, 3.0), (1.0, 2.0), (2.0, 4.0)];
        let s = sort_sample(&pairs, 5).unwrap();
        assert!((fit_value_at(&s, 1.0) - minmax_at(&s, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn fit_value_interpolates_between_neighbouring_levels() {
        let mut rng = rng_from(29);
        for _ in 0..50 {
            let n = rng.gen_range(2..50);
            let pairs: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let s = sort_sample(&pairs, 0).unwrap();
            let f = pava(&s, None).unwrap();
            for w in s.xs.windows(2) {
                if w[0] == w[1] {
                    continue;
                }
                let mid = 0.5 * (w[0] + w[1]);
                let v = fit_value_at(&s, mid);
                assert!(f.eval(w[0]) - 1e-9 <= v && v <= f.eval(w[1]) + 1e-9);
            }
        }
    }

    #[test]
    fn interp_value_matches_fit_at_observations_and_is_linear_between() {
        let mut rng = rng_from(41);
        for _ in 0..50 {
            let n = rng.gen_range(2..50);
            let pairs: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let s = sort_sample(&pairs, 0).unwrap();
            let f = pava(&s, None).unwrap();
            for &x in &s.xs {
                assert!((interp_value_at(&s, &f, x) - f.eval(x)).abs() < 1e-12);
            }
            for w in s.xs.windows(2) {
                if w[0] == w[1] {
                    continue;
                }
                for frac in [0.25, 0.5, 0.75] {
                    let x = w[0] + frac * (w[1] - w[0]);
                    let want = f.eval(w[0]) + frac * (f.eval(w[1]) - f.eval(w[0]));
                    assert!((interp_value_at(&s, &f, x) - want).abs() < 1e-9);
                }
            }
            // constant extension outside the covariate range
            let lo = interp_value_at(&s, &f, s.xs[0] - 1.0);
            let hi = interp_value_at(&s, &f, s.xs[s.len() - 1] + 1.0);
            assert_eq!(lo, f.eval(s.xs[0]));
            assert_eq!(hi, f.eval(s.xs[s.len() - 1]));
        }
    }

    #[test]
    fn interp_value_is_monotone_in_x() {
        let pairs = [(0.0, 3.0), (1.0, 1.0), (2.0, 2.0), (3.0, 0.5), (4.0, 5.0)];
        let s = sort_sample(&pairs, 0).unwrap();
        let f = pava(&s, None).unwrap();
        let mut prev = f64::NEG_INFINITY;
        let mut x = -0.5;
        while x <= 4.5 {
            let v = interp_value_at(&s, &f, x);
            assert!(v >= prev - 1e-12);
            prev = v;
            x += 0.05;
        }
    }

    #[test]
    fn step_function_eval_rules() {
        let f = StepFunction {
            knots: vec![0.0, 1.0],
            levels: vec![1.0, 2.0],
        };
        assert_eq!(f.eval(0.5), 2.0); // value on (0, 1]
        assert_eq!(f.eval(-10.0), 1.0); // left extension
        assert_eq!(f.eval(0.0), 1.0); // left-continuity at a knot
        assert_eq!(f.eval(1.0), 2.0);
        assert_eq!(f.eval(5.0), 2.0); // right extension
    }

    #[test]
    fn diagnostics_examples() {
        let s = sample_from_ys(&[1.0, 2.0, 3.0]);
        let f = pava(&s, None).unwrap();
        let d = diagnostics(&s, &f);
        assert_eq!(d.sse, 0.0);

        let s = sample_from_ys(&[3.0, 1.0, 2.0]);
        let f = pava(&s, None).unwrap();
        let d = diagnostics(&s, &f);
        assert!((d.sse - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(d.n_blocks, 1);

        let f = StepFunction {
            knots: vec![0.0, 1.0],
            levels: vec![-5.0, 1.0],
        };
        let d = diagnostics(&s, &f);
        assert_eq!(d.sup_norm, 5.0);
    }
}
