//! Profile criteria for the direction `α` of a monotone single-index model.
//!
//! For a fixed unit vector `α` the link is re-estimated from the projected
//! pairs `(αᵀX_i, Y_i)`, either by isotonic regression or by a smoothing
//! spline, and one of four scalar criteria is returned:
//!
//! * [`lse_loss`]: mean squared residual.
//! * [`sse_loss`]: squared norm of `n⁻¹ Σ r_i X_i`.
//! * [`ese_loss`]: as SSE, with each term weighted by a kernel estimate of the
//!   link derivative at `αᵀX_i`.
//! * [`spline_score_loss`]: spline link and spline derivative in place of the
//!   isotonic fit and the kernel derivative.

mod search;

pub use search::{
    golden_section_min, minimize_angle, profile_fit, AngleSearch, EstimateResult, Link, Orientation,
    SearchOptions,
};

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::isotonic::{fit_isotonic, MonotoneStepFunction, ScatterPoint};
use crate::kernel::{Bandwidth, DerivativeSmoother, Kernel};
use crate::spline::{fit_smoothing_spline, NaturalCubicSpline, PenaltyParameter};

/// A direction on the unit sphere `S^{d−1}`, `d ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Normalizes `v` to unit length.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.len() < 2 {
            return Err(Error::UnsupportedDimension(v.len()));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero vector has no direction".into()));
        }
        Ok(Self(v.into_iter().map(|x| x / norm).collect()))
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

/// `α = (cos β, sin β)`.
pub fn angle_to_alpha(beta: f64) -> UnitVector {
    UnitVector(vec![beta.cos(), beta.sin()])
}

/// Angle of a two-dimensional direction, in `(−π, π]`.
pub fn alpha_to_angle(alpha: &UnitVector) -> Result<f64> {
    match alpha.components() {
        &[a1, a2] => {
            let b = a2.atan2(a1);
            Ok(if b <= -PI { PI } else { b })
        }
        c => Err(Error::UnsupportedDimension(c.len())),
    }
}

/// Maps an angle into `(−π, π]`.
pub fn wrap_angle(beta: f64) -> f64 {
    let w = beta - 2.0 * PI * ((beta - PI) / (2.0 * PI)).ceil();
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Covariates and responses, `n ≥ 1` observations of dimension `d ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    d: usize,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Dataset {
    /// `x` is row-major with `y.len()` rows of `d` entries.
    pub fn new(d: usize, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if d < 2 {
            return Err(Error::UnsupportedDimension(d));
        }
        if x.len() != d * y.len() {
            return Err(Error::LengthMismatch {
                expected: d * y.len(),
                got: x.len(),
            });
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { d, x, y })
    }

    pub fn from_rows(rows: &[Vec<f64>], y: Vec<f64>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::LengthMismatch {
                expected: d,
                got: bad.len(),
            });
        }
        Self::new(d, rows.concat(), y)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.x.chunks_exact(self.d)
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn project(&self, alpha: &UnitVector) -> Vec<f64> {
        self.rows().map(|r| alpha.dot(r)).collect()
    }

    /// Copy with negated responses, for fitting a nonincreasing link.
    pub fn negated(&self) -> Self {
        Self {
            d: self.d,
            x: self.x.clone(),
            y: self.y.iter().map(|v| -v).collect(),
        }
    }

    /// Copy with responses multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            d: self.d,
            x: self.x.clone(),
            y: self.y.iter().map(|v| c * v).collect(),
        }
    }

    fn check_dim(&self, alpha: &UnitVector) -> Result<()> {
        if alpha.dim() != self.d {
            return Err(Error::LengthMismatch {
                expected: self.d,
                got: alpha.dim(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    Lse,
    Sse,
    Ese,
    Spline,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] = [Self::Lse, Self::Sse, Self::Ese, Self::Spline];

    pub fn name(self) -> &'static str {
        match self {
            Self::Lse => "lse",
            Self::Sse => "sse",
            Self::Ese => "ese",
            Self::Spline => "spline",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lse" => Ok(Self::Lse),
            "sse" => Ok(Self::Sse),
            "ese" => Ok(Self::Ese),
            "spline" => Ok(Self::Spline),
            other => Err(Error::InvalidParameter(format!("unknown estimator '{other}'"))),
        }
    }
}

/// Isotonic fit at a fixed `α` with residuals in observation order.
struct IsotonicProfile {
    t: Vec<f64>,
    fit: MonotoneStepFunction,
    residuals: Vec<f64>,
}

impl IsotonicProfile {
    fn at(alpha: &UnitVector, data: &Dataset) -> Result<Self> {
        data.check_dim(alpha)?;
        let t = data.project(alpha);
        let points: Vec<ScatterPoint> = t
            .iter()
            .zip(data.y())
            .map(|(&t, &y)| ScatterPoint::new(t, y))
            .collect();
        let fit = fit_isotonic(&points, None)?;
        let residuals = points.iter().map(|p| p.y - fit.eval(p.t)).collect();
        Ok(Self { t, fit, residuals })
    }
}

fn squared_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// `‖n⁻¹ Σ_i c_i X_i‖²`.
fn weighted_covariate_sum(data: &Dataset, coef: impl Iterator<Item = f64>) -> f64 {
    let mut acc = vec![0.0; data.dim()];
    for (row, c) in data.rows().zip(coef) {
        for (a, x) in acc.iter_mut().zip(row) {
            *a += c * x;
        }
    }
    let n = data.n() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    squared_norm(&acc)
}

fn projected_range(t: &[f64]) -> f64 {
    let (lo, hi) = t.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    hi - lo
}

/// `n⁻¹ Σ (Y_i − ψ̂_α(αᵀX_i))²`.
pub fn lse_loss(alpha: &UnitVector, data: &Dataset) -> Result<f64> {
    let p = IsotonicProfile::at(alpha, data)?;
    Ok(squared_norm(&p.residuals) / data.n() as f64)
}

/// `‖n⁻¹ Σ (Y_i − ψ̂_α(αᵀX_i)) X_i‖²`.
pub fn sse_loss(alpha: &UnitVector, data: &Dataset) -> Result<f64> {
    let p = IsotonicProfile::at(alpha, data)?;
    Ok(weighted_covariate_sum(data, p.residuals.iter().copied()))
}

/// `‖n⁻¹ Σ (Y_i − ψ̂_α(αᵀX_i)) X_i ψ̃'_{h,α}(αᵀX_i)‖²` with a fixed bandwidth.
pub fn ese_loss(alpha: &UnitVector, data: &Dataset, kernel: Kernel, h: Bandwidth) -> Result<f64> {
    let p = IsotonicProfile::at(alpha, data)?;
    Ok(ese_from_profile(&p, data, kernel, h))
}

fn ese_from_profile(p: &IsotonicProfile, data: &Dataset, kernel: Kernel, h: Bandwidth) -> f64 {
    let smoother = DerivativeSmoother::new(&p.fit, kernel, h);
    weighted_covariate_sum(
        data,
        p.residuals.iter().zip(&p.t).map(|(r, &t)| r * smoother.eval(t)),
    )
}

/// `‖n⁻¹ Σ (ψ̂_{α,μ}(αᵀX_i) − Y_i) X_i ψ̂'_{α,μ}(αᵀX_i)‖²`, where `ψ̂_{α,μ}`
/// minimizes `Σ (Y_i − ψ(αᵀX_i))² + μ ∫ ψ''²`.
pub fn spline_score_loss(alpha: &UnitVector, data: &Dataset, mu: PenaltyParameter) -> Result<f64> {
    Ok(spline_profile(alpha, data, mu)?.0)
}

fn spline_profile(
    alpha: &UnitVector,
    data: &Dataset,
    mu: PenaltyParameter,
) -> Result<(f64, NaturalCubicSpline)> {
    data.check_dim(alpha)?;
    let t = data.project(alpha);
    let points: Vec<ScatterPoint> = t
        .iter()
        .zip(data.y())
        .map(|(&t, &y)| ScatterPoint::new(t, y))
        .collect();
    let s = fit_smoothing_spline(&points, mu)?;
    let loss = weighted_covariate_sum(
        data,
        points
            .iter()
            .map(|p| (s.eval(p.t) - p.y) * s.eval_derivative(p.t)),
    );
    Ok((loss, s))
}

/// A profile criterion together with its tuning constants.
///
/// ESE recomputes its bandwidth at each `α` as `c_h · range · n^{-1/7}` and
/// the spline criterion its penalty as `n · c_μ · range³ · n^{-0.6}`, where
/// `range` is the spread of the projected covariates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Criterion {
    pub kind: EstimatorKind,
    pub kernel: Kernel,
    pub bandwidth_const: f64,
    pub mu_const: f64,
}

impl Criterion {
    pub fn new(kind: EstimatorKind) -> Self {
        Self {
            kind,
            kernel: Kernel::default(),
            bandwidth_const: crate::kernel::DEFAULT_BANDWIDTH_CONST,
            mu_const: crate::spline::DEFAULT_MU_CONST,
        }
    }

    pub fn loss(&self, alpha: &UnitVector, data: &Dataset) -> Result<f64> {
        Ok(self.evaluate(alpha, data)?.0)
    }

    /// Loss and fitted link at `α`.
    pub fn evaluate(&self, alpha: &UnitVector, data: &Dataset) -> Result<(f64, Link)> {
        match self.kind {
            EstimatorKind::Lse => {
                let p = IsotonicProfile::at(alpha, data)?;
                let loss = squared_norm(&p.residuals) / data.n() as f64;
                Ok((loss, Link::Isotonic(p.fit)))
            }
            EstimatorKind::Sse => {
                let p = IsotonicProfile::at(alpha, data)?;
                let loss = weighted_covariate_sum(data, p.residuals.iter().copied());
                Ok((loss, Link::Isotonic(p.fit)))
            }
            EstimatorKind::Ese => {
                let p = IsotonicProfile::at(alpha, data)?;
                let loss = if p.fit.is_constant() {
                    0.0
                } else {
                    let h = crate::kernel::scaled_bandwidth(
                        self.bandwidth_const,
                        data.n(),
                        projected_range(&p.t),
                    )?;
                    ese_from_profile(&p, data, self.kernel, h)
                };
                Ok((loss, Link::Isotonic(p.fit)))
            }
            EstimatorKind::Spline => {
                let mu = self.spline_penalty(alpha, data)?;
                let (loss, s) = spline_profile(alpha, data, mu)?;
                Ok((loss, Link::Spline(s)))
            }
        }
    }

    /// Penalty handed to the (sum-normalized) spline fit at `α`.
    pub fn spline_penalty(&self, alpha: &UnitVector, data: &Dataset) -> Result<PenaltyParameter> {
        data.check_dim(alpha)?;
        let range = projected_range(&data.project(alpha));
        if !(range > 0.0) {
            return Err(Error::DegenerateDesign);
        }
        let rate = crate::spline::default_penalty_rate(self.mu_const, data.n(), range)?;
        PenaltyParameter::new(data.n() as f64 * rate.get())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small() -> Dataset {
        Dataset::from_rows(
            &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![0.0, 3.0, 1.0],
        )
        .unwrap()
    }

    fn unit(a: f64, b: f64) -> UnitVector {
        UnitVector::new(vec![a, b]).unwrap()
    }

    /// Deterministic scatter used by several tests.
    fn scatter(n: usize, noise: f64) -> Dataset {
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let a = ((i * 37 + 11) % 101) as f64 / 101.0;
            let b = ((i * 53 + 7) % 97) as f64 / 97.0;
            let u = (a + b) / 2f64.sqrt();
            let e = noise * (((i * 29 + 3) % 31) as f64 / 31.0 - 0.5);
            rows.push(vec![a, b]);
            y.push(u.powi(3) + e);
        }
        Dataset::from_rows(&rows, y).unwrap()
    }

    #[test]
    fn lse_small_instance() {
        // projections (0, 1, 0): tie at t=0 pooled to 0.5, then 3 at t=1
        let loss = lse_loss(&unit(1.0, 0.0), &small()).unwrap();
        assert_relative_eq!(loss, 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn noiseless_monotone_data_has_zero_loss() {
        let alpha = unit(1.0, 1.0);
        let data = scatter(50, 0.0);
        let data = Dataset::new(
            2,
            data.rows().flatten().copied().collect(),
            data.rows().map(|r| alpha.dot(r)).collect(),
        )
        .unwrap();
        assert!(lse_loss(&alpha, &data).unwrap() < 1e-28);
        assert!(sse_loss(&alpha, &data).unwrap() < 1e-28);
        let mu = PenaltyParameter::new(1.0).unwrap();
        assert!(spline_score_loss(&alpha, &data, mu).unwrap() < 1e-20);
    }

    #[test]
    fn permutation_invariance() {
        let data = scatter(40, 0.5);
        let perm: Vec<usize> = (0..40).map(|i| (i * 17) % 40).collect();
        let rows: Vec<Vec<f64>> = perm.iter().map(|&i| data.row(i).to_vec()).collect();
        let y: Vec<f64> = perm.iter().map(|&i| data.y()[i]).collect();
        let shuffled = Dataset::from_rows(&rows, y).unwrap();
        let alpha = unit(0.6, 0.8);
        assert_relative_eq!(
            lse_loss(&alpha, &data).unwrap(),
            lse_loss(&alpha, &shuffled).unwrap(),
            epsilon = 1e-14
        );
        let mu = PenaltyParameter::new(0.5).unwrap();
        assert_relative_eq!(
            spline_score_loss(&alpha, &data, mu).unwrap(),
            spline_score_loss(&alpha, &shuffled, mu).unwrap(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn sse_matches_direct_recomputation() {
        let rows = vec![vec![0.1, 0.9], vec![0.5, 0.25], vec![0.8, 0.7], vec![0.25, 0.5]];
        let y = vec![1.0, 0.2, 0.9, 1.4];
        let data = Dataset::from_rows(&rows, y.clone()).unwrap();
        let alpha = unit(1.0, 1.0);
        // t = (1.0, 0.75, 1.5, 0.75)/√2 sorted: 0.75 (tie: y 0.2, 1.4 → 0.8), 1.0 → 1.0, 1.5 → 0.9
        // PAVA: 0.8, 1.0, 0.9 → pool last two → 0.95
        let fitted = [0.95, 0.8, 0.95, 0.8];
        let mut v = [0.0; 2];
        for i in 0..4 {
            let r = y[i] - fitted[i];
            v[0] += r * rows[i][0] / 4.0;
            v[1] += r * rows[i][1] / 4.0;
        }
        let direct = v[0] * v[0] + v[1] * v[1];
        assert_relative_eq!(sse_loss(&alpha, &data).unwrap(), direct, epsilon = 1e-15);
    }

    #[test]
    fn zero_covariate_column_contributes_nothing() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 / 10.0, 0.0]).collect();
        let y: Vec<f64> = (0..10).map(|i| ((i * 7) % 5) as f64).collect();
        let data = Dataset::from_rows(&rows, y.clone()).unwrap();
        let alpha = unit(1.0, 0.0);
        let p = IsotonicProfile::at(&alpha, &data).unwrap();
        let first: f64 = p.residuals.iter().zip(&rows).map(|(r, x)| r * x[0]).sum::<f64>() / 10.0;
        assert_relative_eq!(sse_loss(&alpha, &data).unwrap(), first * first, epsilon = 1e-15);
    }

    #[test]
    fn ese_constant_fit_is_zero() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let data = Dataset::from_rows(&rows, vec![2.0; 10]).unwrap();
        let h = Bandwidth::new(0.3).unwrap();
        assert_eq!(
            ese_loss(&unit(1.0, 1.0), &data, Kernel::Epanechnikov, h).unwrap(),
            0.0
        );
        assert_eq!(
            Criterion::new(EstimatorKind::Ese)
                .loss(&unit(1.0, 1.0), &data)
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn ese_matches_direct_summation() {
        let data = scatter(30, 0.8);
        let alpha = unit(0.3, 0.9);
        let h = Bandwidth::new(0.05).unwrap();
        let p = IsotonicProfile::at(&alpha, &data).unwrap();
        let jumps: Vec<(f64, f64)> = p.fit.jumps().collect();
        let mut v = [0.0; 2];
        for i in 0..data.n() {
            let t = p.t[i];
            let mut dpsi = 0.0;
            for &(tau, delta) in &jumps {
                let z = (t - tau) / 0.05;
                if z.abs() < 1.0 {
                    dpsi += 0.75 * (1.0 - z * z) * delta / 0.05;
                }
            }
            let fitted = p.fit.eval(t);
            v[0] += (data.y()[i] - fitted) * data.row(i)[0] * dpsi / 30.0;
            v[1] += (data.y()[i] - fitted) * data.row(i)[1] * dpsi / 30.0;
        }
        let direct = v[0] * v[0] + v[1] * v[1];
        assert_relative_eq!(
            ese_loss(&alpha, &data, Kernel::Epanechnikov, h).unwrap(),
            direct,
            max_relative = 1e-12
        );
    }

    #[test]
    fn ese_scales_with_fourth_power() {
        let data = scatter(60, 0.8);
        let alpha = unit(0.5, 0.7);
        let h = Bandwidth::new(0.2).unwrap();
        let base = ese_loss(&alpha, &data, Kernel::Epanechnikov, h).unwrap();
        let scaled = ese_loss(&alpha, &data.scaled(3.0), Kernel::Epanechnikov, h).unwrap();
        assert_relative_eq!(scaled, 81.0 * base, max_relative = 1e-10);
    }

    #[test]
    fn spline_score_matches_direct_summation() {
        let data = scatter(25, 0.6);
        let alpha = unit(0.8, 0.6);
        let mu = PenaltyParameter::new(0.2).unwrap();
        let t = data.project(&alpha);
        let pts: Vec<ScatterPoint> = t
            .iter()
            .zip(data.y())
            .map(|(&t, &y)| ScatterPoint::new(t, y))
            .collect();
        let s = fit_smoothing_spline(&pts, mu).unwrap();
        let mut v = [0.0; 2];
        for (i, &ti) in t.iter().enumerate() {
            let c = (s.eval(ti) - data.y()[i]) * s.eval_derivative(ti) / 25.0;
            v[0] += c * data.row(i)[0];
            v[1] += c * data.row(i)[1];
        }
        assert_relative_eq!(
            spline_score_loss(&alpha, &data, mu).unwrap(),
            v[0] * v[0] + v[1] * v[1],
            max_relative = 1e-12
        );
    }

    #[test]
    fn angles() {
        let a = angle_to_alpha(PI / 4.0);
        assert_relative_eq!(a.components()[0], 2f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_relative_eq!(a.components()[1], 2f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_relative_eq!(alpha_to_angle(&unit(0.0, 1.0)).unwrap(), PI / 2.0);
        assert_eq!(alpha_to_angle(&UnitVector(vec![-1.0, -0.0])).unwrap(), PI);
        assert!(alpha_to_angle(&UnitVector::new(vec![1.0, 0.0, 0.0]).unwrap()).is_err());
        for k in 0..50 {
            let b = -PI + 0.1 + k as f64 * 0.12;
            assert!((alpha_to_angle(&angle_to_alpha(b)).unwrap() - b).abs() < 1e-12);
        }
        assert_relative_eq!(wrap_angle(3.0 * PI), PI, epsilon = 1e-12);
        assert_relative_eq!(wrap_angle(-PI), PI, epsilon = 1e-12);
        assert_relative_eq!(wrap_angle(-3.0), -3.0, epsilon = 1e-15);
        assert_relative_eq!(wrap_angle(7.0), 7.0 - 2.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn dataset_validation() {
        assert_eq!(Dataset::new(2, vec![], vec![]), Err(Error::EmptyDataset));
        assert!(Dataset::new(1, vec![1.0], vec![1.0]).is_err());
        assert!(Dataset::new(2, vec![1.0], vec![1.0]).is_err());
        assert_eq!(
            Dataset::new(2, vec![1.0, f64::NAN], vec![1.0]),
            Err(Error::NonFinite)
        );
        assert!(UnitVector::new(vec![0.0, 0.0]).is_err());
        assert!(UnitVector::new(vec![1.0]).is_err());
    }

    #[test]
    fn kind_parsing() {
        for k in EstimatorKind::ALL {
            assert_eq!(k.name().parse::<EstimatorKind>().unwrap(), k);
        }
        assert!("bogus".parse::<EstimatorKind>().is_err());
    }
}
