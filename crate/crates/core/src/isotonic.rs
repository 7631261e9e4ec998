//! Weighted isotonic least squares via pool-adjacent-violators.
//!
//! The fit is returned as a [`MonotoneStepFunction`] whose knots are the
//! distinct abscissae of the input and whose levels are the fitted values at
//! those abscissae. Between knots the function holds the level of the knot to
//! its left; outside the knot range it is extended by the boundary levels.

use crate::error::{Error, Result};

/// One observation `(t, y)` where `t` is the projected covariate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterPoint {
    pub t: f64,
    pub y: f64,
}

impl ScatterPoint {
    pub fn new(t: f64, y: f64) -> Self {
        Self { t, y }
    }
}

/// Nondecreasing step function produced by [`fit_isotonic`].
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneStepFunction {
    knots: Vec<f64>,
    levels: Vec<f64>,
}

impl MonotoneStepFunction {
    /// Builds a step function from explicit knots and levels, checking the invariants.
    pub fn from_parts(knots: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if knots.len() != levels.len() {
            return Err(Error::LengthMismatch {
                expected: knots.len(),
                got: levels.len(),
            });
        }
        if knots.iter().chain(&levels).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "knots must be strictly increasing".into(),
            ));
        }
        if levels.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter("levels must be nondecreasing".into()));
        }
        Ok(Self { knots, levels })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// The closed interval `[a, b]` spanned by the knots.
    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    /// Evaluates the step function.
    ///
    /// On `[τ_i, τ_{i+1})` the value is `levels[i]`; at a knot the value is
    /// that knot's own level; left of the first knot the first level is used.
    pub fn eval(&self, u: f64) -> f64 {
        // number of knots <= u
        let idx = self.knots.partition_point(|&k| k <= u);
        if idx == 0 {
            self.levels[0]
        } else {
            self.levels[idx - 1]
        }
    }

    /// Jump locations and (strictly positive) jump sizes.
    pub fn jumps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.knots[1..]
            .iter()
            .zip(self.levels.windows(2))
            .map(|(&loc, w)| (loc, w[1] - w[0]))
            .filter(|&(_, delta)| delta > 0.0)
    }

    /// `ψ(b) − ψ(a)`, the total mass of the Stieltjes measure `dψ`.
    pub fn total_increase(&self) -> f64 {
        self.levels[self.levels.len() - 1] - self.levels[0]
    }

    pub fn is_constant(&self) -> bool {
        self.total_increase() == 0.0
    }
}

/// Fits the nondecreasing weighted least-squares regression of `y` on `t`.
///
/// Points are stably sorted by `t`; points sharing an identical `t` are
/// pooled into one point carrying their weighted mean and summed weight.
/// `weights` defaults to all ones.
pub fn fit_isotonic(points: &[ScatterPoint], weights: Option<&[f64]>) -> Result<MonotoneStepFunction> {
    if points.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if let Some(w) = weights {
        if w.len() != points.len() {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                got: w.len(),
            });
        }
    }
    let weight = |i: usize| weights.map_or(1.0, |w| w[i]);
    for (i, p) in points.iter().enumerate() {
        if !p.t.is_finite() || !p.y.is_finite() || !weight(i).is_finite() {
            return Err(Error::NonFinite);
        }
        if weight(i) <= 0.0 {
            return Err(Error::NonPositiveWeight);
        }
    }

    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].t.total_cmp(&points[b].t));

    // Pool ties: (t, Σ w·y, Σ w).
    let mut pooled: Vec<(f64, f64, f64)> = Vec::with_capacity(points.len());
    for &i in &order {
        let p = points[i];
        let w = weight(i);
        match pooled.last_mut() {
            Some(last) if last.0 == p.t => {
                last.1 += w * p.y;
                last.2 += w;
            }
            _ => pooled.push((p.t, w * p.y, w)),
        }
    }

    let knots: Vec<f64> = pooled.iter().map(|p| p.0).collect();
    let levels = pava(pooled.iter().map(|p| (p.1, p.2)));
    Ok(MonotoneStepFunction { knots, levels })
}

#[derive(Clone, Copy)]
struct Block {
    sum_wy: f64,
    sum_w: f64,
    len: usize,
}

impl Block {
    fn mean(&self) -> f64 {
        self.sum_wy / self.sum_w
    }
}

/// Stack-based PAVA over `(Σ w·y, Σ w)` pairs already ordered by abscissa.
/// Returns one fitted level per input pair.
fn pava(items: impl Iterator<Item = (f64, f64)>) -> Vec<f64> {
    let mut stack: Vec<Block> = Vec::new();
    for (sum_wy, sum_w) in items {
        let mut cur = Block {
            sum_wy,
            sum_w,
            len: 1,
        };
        while let Some(prev) = stack.last() {
            if prev.mean() > cur.mean() {
                cur.sum_wy += prev.sum_wy;
                cur.sum_w += prev.sum_w;
                cur.len += prev.len;
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(cur);
    }
    let mut levels = Vec::with_capacity(stack.iter().map(|b| b.len).sum());
    for b in &stack {
        let m = b.mean();
        levels.extend(std::iter::repeat_n(m, b.len));
    }
    // Rounding in the block means can never produce a decrease, but clamp anyway.
    for i in 1..levels.len() {
        if levels[i] < levels[i - 1] {
            levels[i] = levels[i - 1];
        }
    }
    levels
}
