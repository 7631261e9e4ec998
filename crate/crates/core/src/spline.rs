//! Natural cubic smoothing splines (Reinsch form).
//!
//! The fit minimizes `Σ w_i (y_i − g(t_i))² + μ ∫ g''(t)² dt` over twice
//! differentiable `g`. With knot values `g` and interior second derivatives
//! `γ`, the minimizer solves the pentadiagonal system
//! `(R + μ Qᵀ W⁻¹ Q) γ = Qᵀ y` and then `g = y − μ W⁻¹ Q γ`.

use crate::error::{Error, Result};
use crate::isotonic::ScatterPoint;

/// Positive roughness penalty `μ`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PenaltyParameter(f64);

impl PenaltyParameter {
    pub fn new(mu: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::NonFinite);
        }
        if mu <= 0.0 {
            return Err(Error::InvalidParameter(format!("penalty must be > 0, got {mu}")));
        }
        Ok(Self(mu))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Multiplier `c_μ` of the default penalty schedule.
pub const DEFAULT_MU_CONST: f64 = 0.1;

/// Default penalty for the mean-normalized criterion
/// `n⁻¹ Σ (y_i − g(t_i))² + μ_n ∫ g''²`: `μ_n = c · (b − a)³ · n^{-0.6}`.
pub fn default_penalty_rate(c: f64, n: usize, range: f64) -> Result<PenaltyParameter> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be ≥ 1".into()));
    }
    PenaltyParameter::new(c * range.powi(3) * (n as f64).powf(-0.6))
}

/// Natural cubic spline with linear extension outside `[t_1, t_m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalCubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second_derivs: Vec<f64>,
}

impl NaturalCubicSpline {
    /// Builds a spline from knot values and second derivatives.
    /// The first and last second derivatives must be zero.
    pub fn from_parts(knots: Vec<f64>, values: Vec<f64>, second_derivs: Vec<f64>) -> Result<Self> {
        let m = knots.len();
        if m < 2 {
            return Err(Error::DegenerateDesign);
        }
        if values.len() != m || second_derivs.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                got: values.len().min(second_derivs.len()),
            });
        }
        if knots
            .iter()
            .chain(&values)
            .chain(&second_derivs)
            .any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite);
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "knots must be strictly increasing".into(),
            ));
        }
        if second_derivs[0] != 0.0 || second_derivs[m - 1] != 0.0 {
            return Err(Error::InvalidParameter(
                "natural spline needs zero second derivative at the boundary".into(),
            ));
        }
        Ok(Self {
            knots,
            values,
            second_derivs,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn second_derivs(&self) -> &[f64] {
        &self.second_derivs
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    /// Power-basis coefficients `(c0, c1, c2, c3)` of segment `i` in `s = t − t_i`.
    pub fn segment_coefficients(&self, i: usize) -> [f64; 4] {
        let h = self.knots[i + 1] - self.knots[i];
        let (g0, g1) = (self.values[i], self.values[i + 1]);
        let (c0, c1) = (self.second_derivs[i], self.second_derivs[i + 1]);
        [
            g0,
            (g1 - g0) / h - h * (2.0 * c0 + c1) / 6.0,
            c0 / 2.0,
            (c1 - c0) / (6.0 * h),
        ]
    }

    fn segment_of(&self, u: f64) -> usize {
        let m = self.knots.len();
        let idx = self.knots.partition_point(|&k| k <= u);
        idx.clamp(1, m - 1) - 1
    }

    fn left_slope(&self) -> f64 {
        self.segment_coefficients(0)[1]
    }

    fn right_slope(&self) -> f64 {
        let last = self.knots.len() - 2;
        let h = self.knots[last + 1] - self.knots[last];
        let c = self.segment_coefficients(last);
        c[1] + 2.0 * c[2] * h + 3.0 * c[3] * h * h
    }

    pub fn eval(&self, u: f64) -> f64 {
        let (a, b) = self.domain();
        let m = self.knots.len();
        if u < a {
            return self.values[0] + self.left_slope() * (u - a);
        }
        if u > b {
            return self.values[m - 1] + self.right_slope() * (u - b);
        }
        let i = self.segment_of(u);
        if u == self.knots[i] {
            return self.values[i];
        }
        if u == self.knots[i + 1] {
            return self.values[i + 1];
        }
        let c = self.segment_coefficients(i);
        let s = u - self.knots[i];
        c[0] + s * (c[1] + s * (c[2] + s * c[3]))
    }

    pub fn eval_derivative(&self, u: f64) -> f64 {
        let (a, b) = self.domain();
        if u <= a {
            return self.left_slope();
        }
        if u >= b {
            return self.right_slope();
        }
        let i = self.segment_of(u);
        let c = self.segment_coefficients(i);
        let s = u - self.knots[i];
        c[1] + s * (2.0 * c[2] + 3.0 * s * c[3])
    }

    /// Second derivative; zero outside the knot range.
    pub fn eval_second_derivative(&self, u: f64) -> f64 {
        let (a, b) = self.domain();
        if u < a || u > b {
            return 0.0;
        }
        let i = self.segment_of(u);
        let h = self.knots[i + 1] - self.knots[i];
        let w = (u - self.knots[i]) / h;
        (1.0 - w) * self.second_derivs[i] + w * self.second_derivs[i + 1]
    }

    /// Exact `∫_a^b g''(t)² dt = γᵀ R γ`.
    pub fn roughness(&self) -> f64 {
        self.knots
            .windows(2)
            .zip(self.second_derivs.windows(2))
            .map(|(t, g)| (t[1] - t[0]) / 3.0 * (g[0] * g[0] + g[0] * g[1] + g[1] * g[1]))
            .sum()
    }

    /// `Σ (y_i − g(t_i))² + μ ∫ g''²` on the original (unpooled) points.
    pub fn penalized_criterion(&self, points: &[ScatterPoint], mu: PenaltyParameter) -> f64 {
        let rss: f64 = points
            .iter()
            .map(|p| {
                let r = p.y - self.eval(p.t);
                r * r
            })
            .sum();
        rss + mu.get() * self.roughness()
    }
}

/// Abscissae within this fraction of the data range of each other share a knot.
pub const KNOT_MERGE_TOL: f64 = 1e-7;

/// Fits the penalized least-squares natural cubic spline with unit weights.
pub fn fit_smoothing_spline(points: &[ScatterPoint], mu: PenaltyParameter) -> Result<NaturalCubicSpline> {
    fit_smoothing_spline_weighted(points, None, mu)
}

/// Weighted variant: minimizes `Σ w_i (y_i − g(t_i))² + μ ∫ g''²`.
pub fn fit_smoothing_spline_weighted(
    points: &[ScatterPoint],
    weights: Option<&[f64]>,
    mu: PenaltyParameter,
) -> Result<NaturalCubicSpline> {
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
    // Abscissae closer than a tiny fraction of the range make the system
    // numerically singular; they are pooled like exact ties.
    let lo = points[order[0]].t;
    let tol = KNOT_MERGE_TOL * (points[order[points.len() - 1]].t - lo);
    let mut start = f64::NEG_INFINITY;
    let mut wt: Vec<f64> = Vec::new();
    let mut wy: Vec<f64> = Vec::new();
    let mut w: Vec<f64> = Vec::new();
    for &i in &order {
        let p = points[i];
        if p.t - start <= tol {
            *wt.last_mut().unwrap() += weight(i) * p.t;
            *wy.last_mut().unwrap() += weight(i) * p.y;
            *w.last_mut().unwrap() += weight(i);
        } else {
            start = p.t;
            wt.push(weight(i) * p.t);
            wy.push(weight(i) * p.y);
            w.push(weight(i));
        }
    }
    let t: Vec<f64> = wt.iter().zip(&w).map(|(a, b)| a / b).collect();
    let m = t.len();
    if m < 3 {
        return Err(Error::DegenerateDesign);
    }
    let y: Vec<f64> = wy.iter().zip(&w).map(|(a, b)| a / b).collect();
    let h: Vec<f64> = t.windows(2).map(|p| p[1] - p[0]).collect();
    let mu = mu.get();

    // Column j of Q (interior knot j+1) has entries at knot rows j, j+1, j+2.
    let q = |j: usize| -> [f64; 3] {
        let (ha, hb) = (h[j], h[j + 1]);
        [1.0 / ha, -1.0 / ha - 1.0 / hb, 1.0 / hb]
    };
    let k = m - 2;
    let mut band = BandedSpd::zeros(k, 2);
    for j in 0..k {
        let qj = q(j);
        // diagonal: R_jj + μ Σ_r q_j[r]² / w_r
        let mut d = (h[j] + h[j + 1]) / 3.0;
        for r in 0..3 {
            d += mu * qj[r] * qj[r] / w[j + r];
        }
        band.set(j, 0, d);
        if j + 1 < k {
            let qn = q(j + 1);
            // overlap on knot rows j+1, j+2
            let off = h[j + 1] / 6.0 + mu * (qj[1] * qn[0] / w[j + 1] + qj[2] * qn[1] / w[j + 2]);
            band.set(j + 1, 1, off);
        }
        if j + 2 < k {
            let qn = q(j + 2);
            band.set(j + 2, 2, mu * qj[2] * qn[0] / w[j + 2]);
        }
    }
    let rhs: Vec<f64> = (0..k)
        .map(|j| {
            let qj = q(j);
            qj[0] * y[j] + qj[1] * y[j + 1] + qj[2] * y[j + 2]
        })
        .collect();
    let gamma_inner = band.cholesky_solve(rhs)?;

    // g = y − μ W⁻¹ Q γ
    let mut qg = vec![0.0; m];
    for (j, &gj) in gamma_inner.iter().enumerate() {
        let qj = q(j);
        for r in 0..3 {
            qg[j + r] += qj[r] * gj;
        }
    }
    let values: Vec<f64> = (0..m).map(|i| y[i] - mu * qg[i] / w[i]).collect();
    let mut second_derivs = Vec::with_capacity(m);
    second_derivs.push(0.0);
    second_derivs.extend_from_slice(&gamma_inner);
    second_derivs.push(0.0);

    Ok(NaturalCubicSpline {
        knots: t,
        values,
        second_derivs,
    })
}

/// Symmetric positive definite band matrix, lower band stored row-wise:
/// `a[i * (p + 1) + k] = A[i][i − k]`.
#[derive(Debug, Clone)]
struct BandedSpd {
    n: usize,
    p: usize,
    a: Vec<f64>,
}

impl BandedSpd {
    fn zeros(n: usize, p: usize) -> Self {
        Self {
            n,
            p,
            a: vec![0.0; n * (p + 1)],
        }
    }

    fn idx(&self, i: usize, k: usize) -> usize {
        i * (self.p + 1) + k
    }

    fn set(&mut self, i: usize, k: usize, v: f64) {
        let ix = self.idx(i, k);
        self.a[ix] = v;
    }

    /// In-place banded Cholesky `A = L Lᵀ`, then solves `A x = b`.
    #[allow(clippy::needless_range_loop)]
    fn cholesky_solve(mut self, mut b: Vec<f64>) -> Result<Vec<f64>> {
        let (n, p) = (self.n, self.p);
        // L[i][j] stored at idx(i, i − j)
        for i in 0..n {
            let j0 = i.saturating_sub(p);
            for j in j0..=i {
                let mut s = self.a[self.idx(i, i - j)];
                let l0 = j0.max(j.saturating_sub(p));
                for l in l0..j {
                    s -= self.a[self.idx(i, i - l)] * self.a[self.idx(j, j - l)];
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(Error::DegenerateDesign);
                    }
                    let ix = self.idx(i, 0);
                    self.a[ix] = s.sqrt();
                } else {
                    let ix = self.idx(i, i - j);
                    self.a[ix] = s / self.a[self.idx(j, 0)];
                }
            }
        }
        for i in 0..n {
            let mut s = b[i];
            for j in i.saturating_sub(p)..i {
                s -= self.a[self.idx(i, i - j)] * b[j];
            }
            b[i] = s / self.a[self.idx(i, 0)];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in (i + 1)..n.min(i + p + 1) {
                s -= self.a[self.idx(j, j - i)] * b[j];
            }
            b[i] = s / self.a[self.idx(i, 0)];
        }
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pts(t: &[f64], y: &[f64]) -> Vec<ScatterPoint> {
        t.iter().zip(y).map(|(&t, &y)| ScatterPoint::new(t, y)).collect()
    }

    fn noisy() -> Vec<ScatterPoint> {
        let t = [0.0, 0.13, 0.3, 0.41, 0.55, 0.62, 0.8, 0.9, 1.0, 1.2];
        let y = [0.2, -0.4, 0.9, 0.1, 1.3, 0.7, 1.9, 1.1, 2.4, 1.5];
        pts(&t, &y)
    }

    #[test]
    fn banded_solver_matches_dense() {
        let n = 7;
        let mut band = BandedSpd::zeros(n, 2);
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            let d = 6.0 + i as f64;
            band.set(i, 0, d);
            dense[i][i] = d;
            if i >= 1 {
                band.set(i, 1, -1.5);
                dense[i][i - 1] = -1.5;
                dense[i - 1][i] = -1.5;
            }
            if i >= 2 {
                band.set(i, 2, 0.5);
                dense[i][i - 2] = 0.5;
                dense[i - 2][i] = 0.5;
            }
        }
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = band.cholesky_solve(b.clone()).unwrap();
        for i in 0..n {
            let ax: f64 = (0..n).map(|j| dense[i][j] * x[j]).sum();
            assert_relative_eq!(ax, b[i], epsilon = 1e-13);
        }
    }

    #[test]
    fn line_is_reproduced_for_any_penalty() {
        let t = [0.0, 0.5, 0.7, 1.3, 2.0];
        let y: Vec<f64> = t.iter().map(|t| 2.0 * t + 1.0).collect();
        for mu in [1e-6, 1.0, 1e6] {
            let s = fit_smoothing_spline(&pts(&t, &y), PenaltyParameter::new(mu).unwrap()).unwrap();
            for (v, yy) in s.values().iter().zip(&y) {
                assert_relative_eq!(*v, *yy, epsilon = 1e-9);
            }
            assert_relative_eq!(s.eval(-1.0), -1.0, epsilon = 1e-8);
            assert_relative_eq!(s.eval(3.0), 7.0, epsilon = 1e-8);
            assert_relative_eq!(s.eval_derivative(0.9), 2.0, epsilon = 1e-8);
            assert_relative_eq!(s.eval_derivative(10.0), 2.0, epsilon = 1e-8);
            assert!(s.roughness() < 1e-12);
        }
    }

    #[test]
    fn huge_penalty_gives_least_squares_line() {
        let p = noisy();
        let n = p.len() as f64;
        let (mt, my) = (
            p.iter().map(|q| q.t).sum::<f64>() / n,
            p.iter().map(|q| q.y).sum::<f64>() / n,
        );
        let sxy: f64 = p.iter().map(|q| (q.t - mt) * (q.y - my)).sum();
        let sxx: f64 = p.iter().map(|q| (q.t - mt) * (q.t - mt)).sum();
        let slope = sxy / sxx;
        let mu = PenaltyParameter::new(1e12 * 1.2f64.powi(3)).unwrap();
        let s = fit_smoothing_spline(&p, mu).unwrap();
        for (t, v) in s.knots().iter().zip(s.values()) {
            assert!((v - (my + slope * (t - mt))).abs() < 1e-6);
        }
    }

    #[test]
    fn tiny_penalty_interpolates() {
        let p = noisy();
        let s = fit_smoothing_spline(&p, PenaltyParameter::new(1e-12 * 1.2f64.powi(3)).unwrap()).unwrap();
        for q in &p {
            assert!((s.eval(q.t) - q.y).abs() < 1e-6);
        }
    }

    #[test]
    fn natural_boundary_and_c2_continuity() {
        let s = fit_smoothing_spline(&noisy(), PenaltyParameter::new(0.01).unwrap()).unwrap();
        let g = s.second_derivs();
        assert_eq!(g[0], 0.0);
        assert_eq!(g[g.len() - 1], 0.0);
        for i in 1..s.knots().len() - 1 {
            let left = s.segment_coefficients(i - 1);
            let right = s.segment_coefficients(i);
            let h = s.knots()[i] - s.knots()[i - 1];
            let val_l = left[0] + h * (left[1] + h * (left[2] + h * left[3]));
            let d1_l = left[1] + 2.0 * left[2] * h + 3.0 * left[3] * h * h;
            let d2_l = 2.0 * left[2] + 6.0 * left[3] * h;
            assert_relative_eq!(val_l, right[0], epsilon = 1e-10);
            assert_relative_eq!(d1_l, right[1], epsilon = 1e-9);
            assert_relative_eq!(d2_l, 2.0 * right[2], epsilon = 1e-9);
        }
    }

    #[test]
    fn segment_midpoint_matches_polynomial() {
        let s =
            NaturalCubicSpline::from_parts(vec![0.0, 1.0, 3.0], vec![1.0, 2.0, 0.0], vec![0.0, -1.5, 0.0])
                .unwrap();
        // Segment [1, 3]: evaluate the Hermite-style form independently.
        let (t0, t1, g0, g1, c0, c1) = (1.0f64, 3.0f64, 2.0f64, 0.0f64, -1.5f64, 0.0f64);
        let u = 2.0;
        let h = t1 - t0;
        let direct = ((u - t0) * g1 + (t1 - u) * g0) / h
            - (u - t0) * (t1 - u) / 6.0 * ((1.0 + (u - t0) / h) * c1 + (1.0 + (t1 - u) / h) * c0);
        assert_relative_eq!(s.eval(u), direct, epsilon = 1e-14);
        assert_eq!(s.eval(1.0), 2.0);
        assert_eq!(s.eval(3.0), 0.0);
    }

    #[test]
    fn linear_extension_outside_domain() {
        let s = fit_smoothing_spline(&noisy(), PenaltyParameter::new(0.05).unwrap()).unwrap();
        let (a, b) = s.domain();
        let da = s.eval_derivative(a);
        let db = s.eval_derivative(b);
        assert_relative_eq!(s.eval(a - 0.5), s.eval(a) - 0.5 * da, epsilon = 1e-12);
        assert_relative_eq!(s.eval(b + 0.7), s.eval(b) + 0.7 * db, epsilon = 1e-12);
        assert_eq!(s.eval_derivative(b + 5.0), db);
        // one-sided derivative at b from the last cubic piece
        let eps = 1e-7;
        assert!(((s.eval(b) - s.eval(b - eps)) / eps - db).abs() < 1e-5);
    }

    #[test]
    fn roughness_ordering_and_quadrature() {
        let p = noisy();
        let rough = fit_smoothing_spline(&p, PenaltyParameter::new(1e-4).unwrap()).unwrap();
        let smooth = fit_smoothing_spline(&p, PenaltyParameter::new(1.0).unwrap()).unwrap();
        assert!(rough.roughness() > smooth.roughness());

        // 4-knot spline: Simpson on eval-based second differences.
        let s = NaturalCubicSpline::from_parts(
            vec![0.0, 0.4, 1.0, 1.5],
            vec![0.0, 1.0, 0.5, 2.0],
            vec![0.0, -3.0, 4.0, 0.0],
        )
        .unwrap();
        let d = 1e-4;
        let second = |u: f64| (s.eval(u + d) - 2.0 * s.eval(u) + s.eval(u - d)) / (d * d);
        let mut total = 0.0;
        for w in s.knots().windows(2) {
            let n = 200;
            let (a, b) = (w[0] + 2.0 * d, w[1] - 2.0 * d);
            let hh = (b - a) / n as f64;
            let mut acc = second(a).powi(2) + second(b).powi(2);
            for i in 1..n {
                let x = a + i as f64 * hh;
                acc += if i % 2 == 1 { 4.0 } else { 2.0 } * second(x).powi(2);
            }
            total += acc * hh / 3.0;
            // add the trimmed ends using exact linear second derivative values
            let g = |u: f64| s.eval_second_derivative(u).powi(2);
            total += 2.0 * d * 0.5 * (g(w[0]) + g(a)) + 2.0 * d * 0.5 * (g(b) + g(w[1]));
        }
        assert!(
            (total - s.roughness()).abs() < 1e-5,
            "{total} vs {}",
            s.roughness()
        );
    }

    #[test]
    fn ties_are_pooled_with_weights() {
        let p = pts(&[0.0, 0.0, 1.0, 2.0, 3.0], &[1.0, 3.0, 0.0, 5.0, 4.0]);
        let mu = PenaltyParameter::new(0.3).unwrap();
        let a = fit_smoothing_spline(&p, mu).unwrap();
        let pooled = pts(&[0.0, 1.0, 2.0, 3.0], &[2.0, 0.0, 5.0, 4.0]);
        let b = fit_smoothing_spline_weighted(&pooled, Some(&[2.0, 1.0, 1.0, 1.0]), mu).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_relative_eq!(*x, *y, epsilon = 1e-12);
        }
    }

    #[test]
    fn error_paths() {
        let mu = PenaltyParameter::new(1.0).unwrap();
        assert_eq!(
            fit_smoothing_spline(&pts(&[0.0, 1.0, 1.0], &[0.0, 1.0, 2.0]), mu),
            Err(Error::DegenerateDesign)
        );
        assert!(PenaltyParameter::new(0.0).is_err());
        assert!(PenaltyParameter::new(-2.0).is_err());
        assert_eq!(fit_smoothing_spline(&[], mu), Err(Error::EmptyDataset));
    }

    #[test]
    fn default_penalty_rate_formula() {
        let mu = default_penalty_rate(0.1, 1000, 2.0).unwrap();
        assert_relative_eq!(mu.get(), 0.1 * 8.0 * 1000f64.powf(-0.6), epsilon = 1e-15);
    }
}
