//! Greatest convex minorants of piecewise-linear functions on a grid,
//! their left slopes, the dual least-concave-majorant slope, and the
//! CUSUM-diagram route to the isotonic fit.

use crate::isotonic::{SortedSample, StepFunction};
use crate::{Error, Result};

/// Piecewise-linear function given by its breakpoints.
#[derive(Debug, Clone)]
pub struct PolyLine {
    pub ts: Vec<f64>,
    pub vs: Vec<f64>,
}

impl PolyLine {
    pub fn new(ts: Vec<f64>, vs: Vec<f64>) -> Result<Self> {
        if ts.len() < 2 || ts.len() != vs.len() {
            return Err(Error::InvalidInput(format!(
                "polyline needs >= 2 points with matching lengths, got {} ts / {} vs",
                ts.len(),
                vs.len()
            )));
        }
        if ts.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("abscissae not strictly increasing".into()));
        }
        if vs.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite ordinate".into()));
        }
        Ok(PolyLine { ts, vs })
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }
}

/// Greatest convex minorant of a [`PolyLine`], stored as the indices of
/// the grid points it touches plus one slope per hull segment.
#[derive(Debug, Clone)]
pub struct ConvexHullMinorant {
    pub vertex_idx: Vec<usize>,
    pub slopes: Vec<f64>,
}

impl ConvexHullMinorant {
    /// Hull value at grid index `k` (linear interpolation between the
    /// enclosing vertices).
    pub fn value_at(&self, line: &PolyLine, k: usize) -> f64 {
        match self.vertex_idx.binary_search(&k) {
            Ok(_) => line.vs[k],
            Err(pos) => {
                let (a, b) = (self.vertex_idx[pos - 1], self.vertex_idx[pos]);
                let w = (line.ts[k] - line.ts[a]) / (line.ts[b] - line.ts[a]);
                line.vs[a] + w * (line.vs[b] - line.vs[a])
            }
        }
    }
}

// Relative collinearity tolerance for the cross-product turn test.
const COLLINEAR_TOL: f64 = 1e-12;

/// Lower convex hull (greatest convex minorant) by a single monotone-chain
/// pass; O(n).  Near-collinear interior vertices are merged so segment
/// slopes are strictly increasing.
pub fn lower_hull(line: &PolyLine) -> Result<ConvexHullMinorant> {
    if line.len() < 2 {
        return Err(Error::InvalidInput("fewer than 2 points".into()));
    }
    let mut stack: Vec<usize> = Vec::with_capacity(line.len());
    for c in 0..line.len() {
        while stack.len() >= 2 {
            let b = stack[stack.len() - 1];
            let a = stack[stack.len() - 2];
            let (ax, ay) = (line.ts[a], line.vs[a]);
            let (bx, by) = (line.ts[b], line.vs[b]);
            let (cx, cy) = (line.ts[c], line.vs[c]);
            let cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
            let scale = (bx - ax).abs() * (cy - ay).abs() + (by - ay).abs() * (cx - ax).abs();
            // pop b unless (a, b, c) makes a strict convex (left) turn
            if cross > COLLINEAR_TOL * scale {
                break;
            }
            stack.pop();
        }
        stack.push(c);
    }
    let slopes = stack
        .windows(2)
        .map(|w| (line.vs[w[1]] - line.vs[w[0]]) / (line.ts[w[1]] - line.ts[w[0]]))
        .collect();
    Ok(ConvexHullMinorant {
        vertex_idx: stack,
        slopes,
    })
}

/// Slope from the left of the hull at `t0`: the slope of the segment whose
/// half-open interval (t_{j-1}, t_j] contains `t0`.  A `t0` exactly at a
/// vertex gets the slope of the segment ending there.
pub fn left_slope(hull: &ConvexHullMinorant, line: &PolyLine, t0: f64) -> Result<f64> {
    let lo = line.ts[0];
    let hi = *line.ts.last().unwrap();
    if !(t0 > lo && t0 <= hi) {
        return Err(Error::OutOfDomain { t0, lo, hi });
    }
    // first hull vertex with ts >= t0 ends the covering segment
    let pos = hull
        .vertex_idx
        .partition_point(|&v| line.ts[v] < t0);
    Ok(hull.slopes[pos - 1])
}

/// Slope from the left of the least concave majorant at `t0`, via the
/// duality slLCM[v] = -slGCM[-v].
pub fn sl_lcm(line: &PolyLine, t0: f64) -> Result<f64> {
    let neg = PolyLine {
        ts: line.ts.clone(),
        vs: line.vs.iter().map(|v| -v).collect(),
    };
    let hull = lower_hull(&neg)?;
    Ok(-left_slope(&hull, &neg, t0)?)
}

/// Segment of the hull whose half-open interval contains `t0`, as the pair
/// of abscissae of its endpoints.  Used by the limit-law window guard.
pub fn covering_segment(
    hull: &ConvexHullMinorant,
    line: &PolyLine,
    t0: f64,
) -> Result<(f64, f64)> {
    let lo = line.ts[0];
    let hi = *line.ts.last().unwrap();
    if !(t0 > lo && t0 <= hi) {
        return Err(Error::OutOfDomain { t0, lo, hi });
    }
    let pos = hull.vertex_idx.partition_point(|&v| line.ts[v] < t0);
    let a = hull.vertex_idx[pos - 1];
    let b = hull.vertex_idx[pos];
    Ok((line.ts[a], line.ts[b]))
}

/// Isotonic fit through the CUSUM diagram: left slopes of the greatest
/// convex minorant of (0, 0), (k/n, sum_{l<=k} ys[l]/n) at k/n.  A second
/// independent route to the PAVA fit.
pub fn isotonic_via_cusum(sample: &SortedSample) -> Result<StepFunction> {
    let n = sample.len();
    let nf = n as f64;
    let mut ts = Vec::with_capacity(n + 1);
    let mut vs = Vec::with_capacity(n + 1);
    ts.push(0.0);
    vs.push(0.0);
    let mut cum = 0.0;
    for (k, &y) in sample.ys.iter().enumerate() {
        cum += y;
        ts.push((k + 1) as f64 / nf);
        vs.push(cum / nf);
    }
    if n == 1 {
        return Ok(StepFunction {
            knots: vec![sample.xs[0]],
            levels: vec![sample.ys[0]],
        });
    }
    let line = PolyLine::new(ts, vs)?;
    let hull = lower_hull(&line)?;

    // observations k in (v_a, v_b] share the slope of segment (v_a, v_b)
    let mut knots = Vec::new();
    let mut levels = Vec::new();
    for (seg, w) in hull.vertex_idx.windows(2).enumerate() {
        let level = hull.slopes[seg];
        let last_obs = w[1] - 1; // polyline index k corresponds to obs k-1
        if levels.last().is_some_and(|&p: &f64| p == level) {
            *knots.last_mut().unwrap() = sample.xs[last_obs];
        } else {
            knots.push(sample.xs[last_obs]);
            levels.push(level);
        }
    }
    Ok(StepFunction { knots, levels })
}
