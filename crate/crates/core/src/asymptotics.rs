//! Population quantities for the two uniform-square simulation models.
//!
//! Covariates are uniform on `[0, 1]²`, so conditioning on `αᵀX = u`
//! restricts `X` to a chord of the square on which it is uniformly
//! distributed, and the density of `αᵀX` at `u` is the chord length.
//! Everything here is computed by Gauss–Legendre quadrature along chords
//! (inner) and over `u` (outer, split at the kinks of the chord length).

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::estimators::{EstimatorKind, UnitVector};
use crate::quadrature::GaussLegendre;

/// The two simulation models. Both use `α₀ = (1/√2, 1/√2)` and
/// `X ~ Uniform[0, 1]²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// `Y = (α₀ᵀX)³ + ε`, `ε ~ N(0, 1)` independent of `X`.
    Cubic,
    /// `Y ~ Bin(10, logistic(α₀ᵀX))`.
    Binomial,
}

impl Model {
    pub fn id(self) -> u8 {
        match self {
            Model::Cubic => 1,
            Model::Binomial => 2,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Model::Cubic),
            2 => Ok(Model::Binomial),
            other => Err(Error::InvalidParameter(format!("unknown model {other}"))),
        }
    }

    pub fn alpha0(self) -> UnitVector {
        UnitVector::new(vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]).expect("unit vector")
    }

    /// `ψ₀(u)`.
    pub fn link(self, u: f64) -> f64 {
        match self {
            Model::Cubic => u * u * u,
            Model::Binomial => 10.0 * logistic(u),
        }
    }

    /// `ψ₀'(u)`.
    pub fn link_derivative(self, u: f64) -> f64 {
        match self {
            Model::Cubic => 3.0 * u * u,
            Model::Binomial => {
                let p = logistic(u);
                10.0 * p * (1.0 - p)
            }
        }
    }

    /// `Var(Y | α₀ᵀX = u)`.
    pub fn noise_variance(self, u: f64) -> f64 {
        match self {
            Model::Cubic => 1.0,
            Model::Binomial => {
                let p = logistic(u);
                10.0 * p * (1.0 - p)
            }
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let id: u8 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("unknown model '{s}'")))?;
        Self::from_id(id)
    }
}

pub(crate) fn logistic(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

/// The chord `{x ∈ [0,1]² : αᵀx = u}`, parameterized as `u·α + s·α⊥`.
#[derive(Debug, Clone, Copy)]
struct Chord {
    base: [f64; 2],
    dir: [f64; 2],
    s_lo: f64,
    s_hi: f64,
}

impl Chord {
    fn new(alpha: &[f64], u: f64) -> Result<Self> {
        let (lo, hi) = projected_support(alpha);
        if !(u >= lo && u <= hi) {
            return Err(Error::OutsideSupport);
        }
        let base = [u * alpha[0], u * alpha[1]];
        let dir = [-alpha[1], alpha[0]];
        let (mut s_lo, mut s_hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for k in 0..2 {
            if dir[k] == 0.0 {
                if base[k] < 0.0 || base[k] > 1.0 {
                    return Err(Error::OutsideSupport);
                }
            } else {
                let a = -base[k] / dir[k];
                let b = (1.0 - base[k]) / dir[k];
                s_lo = s_lo.max(a.min(b));
                s_hi = s_hi.min(a.max(b));
            }
        }
        if !(s_hi > s_lo) {
            return Err(Error::OutsideSupport);
        }
        Ok(Self {
            base,
            dir,
            s_lo,
            s_hi,
        })
    }

    fn length(&self) -> f64 {
        self.s_hi - self.s_lo
    }

    /// Quadrature points on the chord with weights summing to one.
    fn points<'a>(&'a self, q: &'a GaussLegendre) -> impl Iterator<Item = ([f64; 2], f64)> + 'a {
        let len = self.length();
        q.mapped(self.s_lo, self.s_hi).map(move |(s, w)| {
            (
                [self.base[0] + s * self.dir[0], self.base[1] + s * self.dir[1]],
                w / len,
            )
        })
    }
}

/// `[min, max]` of `αᵀx` over the unit square.
fn projected_support(alpha: &[f64]) -> (f64, f64) {
    let corners = [0.0, alpha[0], alpha[1], alpha[0] + alpha[1]];
    corners
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &c| {
            (lo.min(c), hi.max(c))
        })
}

/// Sorted corner projections: the chord length is linear between them.
fn support_breaks(alpha: &[f64]) -> Vec<f64> {
    let mut b = vec![0.0, alpha[0], alpha[1], alpha[0] + alpha[1]];
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// Quadrature engine for one model.
#[derive(Debug, Clone)]
pub struct Population {
    model: Model,
    rule: GaussLegendre,
}

/// Default node count for both chord and index quadrature.
pub const DEFAULT_NODES: usize = 128;

/// Relative eigenvalue cutoff used for Moore–Penrose inverses.
pub const PINV_TOL: f64 = 1e-10;

impl Population {
    pub fn new(model: Model) -> Self {
        Self::with_nodes(model, DEFAULT_NODES)
    }

    pub fn with_nodes(model: Model, nodes: usize) -> Self {
        Self {
            model,
            rule: GaussLegendre::new(nodes),
        }
    }

    pub fn model(&self) -> Model {
        self.model
    }

    fn check(alpha: &UnitVector) -> Result<&[f64]> {
        match alpha.components() {
            c @ [_, _] => Ok(c),
            c => Err(Error::UnsupportedDimension(c.len())),
        }
    }

    /// `E{ψ₀(α₀ᵀX) | αᵀX = u}`, which equals the monotone population link
    /// `ψ_α` for `α` near `α₀`.
    pub fn psi_alpha(&self, alpha: &UnitVector, u: f64) -> Result<f64> {
        let a = Self::check(alpha)?;
        let chord = Chord::new(a, u)?;
        let a0 = self.model.alpha0();
        Ok(chord
            .points(&self.rule)
            .map(|(x, w)| w * self.model.link(a0.dot(&x)))
            .sum())
    }

    /// `E(X | αᵀX = u)` and `Cov(X | αᵀX = u)`.
    pub fn conditional_moments(&self, alpha: &UnitVector, u: f64) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let a = Self::check(alpha)?;
        let chord = Chord::new(a, u)?;
        let mut mean = DVector::zeros(2);
        for (x, w) in chord.points(&self.rule) {
            mean[0] += w * x[0];
            mean[1] += w * x[1];
        }
        let mut cov = DMatrix::zeros(2, 2);
        for (x, w) in chord.points(&self.rule) {
            let d = [x[0] - mean[0], x[1] - mean[1]];
            for i in 0..2 {
                for j in 0..2 {
                    cov[(i, j)] += w * d[i] * d[j];
                }
            }
        }
        Ok((mean, cov))
    }

    /// `E[g(α₀ᵀX) Cov(X | α₀ᵀX)]`.
    fn weighted_conditional_cov(&self, g: impl Fn(f64) -> f64) -> Result<DMatrix<f64>> {
        let a0 = self.model.alpha0();
        let a = a0.components();
        let mut out = DMatrix::zeros(2, 2);
        for piece in support_breaks(a).windows(2) {
            for (u, w) in self.rule.mapped(piece[0], piece[1]) {
                let chord = Chord::new(a, u)?;
                let (_, cov) = self.conditional_moments(&a0, u)?;
                out += cov * (w * chord.length() * g(u));
            }
        }
        Ok(out)
    }

    /// `A = E[ψ₀'(α₀ᵀX) Cov(X | α₀ᵀX)]`.
    pub fn matrix_a(&self) -> Result<DMatrix<f64>> {
        let m = self.model;
        self.weighted_conditional_cov(|u| m.link_derivative(u))
    }

    /// `Σ = E[{Y − ψ₀(α₀ᵀX)}² (X − E(X|α₀ᵀX))(X − E(X|α₀ᵀX))ᵀ]`.
    pub fn matrix_sigma(&self) -> Result<DMatrix<f64>> {
        let m = self.model;
        self.weighted_conditional_cov(|u| m.noise_variance(u))
    }

    /// `Ã = E[ψ₀'(α₀ᵀX)² Cov(X | α₀ᵀX)]`.
    pub fn matrix_a_tilde(&self) -> Result<DMatrix<f64>> {
        let m = self.model;
        self.weighted_conditional_cov(|u| m.link_derivative(u).powi(2))
    }

    /// `Σ̃`: as `Σ` with the extra factor `ψ₀'(α₀ᵀX)²`.
    pub fn matrix_sigma_tilde(&self) -> Result<DMatrix<f64>> {
        let m = self.model;
        self.weighted_conditional_cov(|u| m.noise_variance(u) * m.link_derivative(u).powi(2))
    }

    /// The "bread" and "meat" matrices used by `kind`.
    pub fn sandwich_parts(&self, kind: EstimatorKind) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        match kind {
            EstimatorKind::Lse => Err(Error::UnknownAsymptotics),
            EstimatorKind::Sse => Ok((self.matrix_a()?, self.matrix_sigma()?)),
            EstimatorKind::Ese | EstimatorKind::Spline => {
                Ok((self.matrix_a_tilde()?, self.matrix_sigma_tilde()?))
            }
        }
    }

    /// Limiting covariance of `√n(α̂_n − α₀)`: `A⁻ΣA⁻` for SSE and
    /// `Ã⁻Σ̃Ã⁻` for ESE and spline. Unknown for LSE.
    pub fn asymptotic_covariance(&self, kind: EstimatorKind) -> Result<DMatrix<f64>> {
        let (bread, meat) = self.sandwich_parts(kind)?;
        Ok(sandwich(&bread, &meat))
    }

    /// Population loss along `α = (α₁, √(1 − α₁²))` for `α₁` in `grid`.
    ///
    /// LSE: `E{Y − ψ_α(αᵀX)}²`; SSE: `‖E{Y − ψ_α(αᵀX)} X‖²`.
    pub fn population_loss(&self, kind: EstimatorKind, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
        if !matches!(kind, EstimatorKind::Lse | EstimatorKind::Sse) {
            return Err(Error::InvalidParameter(format!(
                "population loss is defined for lse and sse, not {kind}"
            )));
        }
        grid.iter()
            .map(|&a1| {
                if !(0.0..=1.0).contains(&a1) {
                    return Err(Error::InvalidParameter(format!("alpha1 = {a1} outside [0, 1]")));
                }
                let alpha = UnitVector::new(vec![a1, (1.0 - a1 * a1).max(0.0).sqrt()])?;
                let v = match kind {
                    EstimatorKind::Lse => self.population_lse(&alpha)?,
                    _ => self.population_sse(&alpha)?,
                };
                Ok((a1, v))
            })
            .collect()
    }

    fn population_lse(&self, alpha: &UnitVector) -> Result<f64> {
        let a = alpha.components();
        let a0 = self.model.alpha0();
        let m = self.model;
        let mut total = 0.0;
        for piece in support_breaks(a).windows(2) {
            for (u, w) in self.rule.mapped(piece[0], piece[1]) {
                let chord = Chord::new(a, u)?;
                let psi = self.psi_alpha(alpha, u)?;
                let inner: f64 = chord
                    .points(&self.rule)
                    .map(|(x, wx)| {
                        let v = a0.dot(&x);
                        wx * (m.noise_variance(v) + (m.link(v) - psi).powi(2))
                    })
                    .sum();
                total += w * chord.length() * inner;
            }
        }
        Ok(total)
    }

    fn population_sse(&self, alpha: &UnitVector) -> Result<f64> {
        let a = alpha.components();
        let a0 = self.model.alpha0();
        let m = self.model;
        let mut acc = [0.0; 2];
        for piece in support_breaks(a).windows(2) {
            for (u, w) in self.rule.mapped(piece[0], piece[1]) {
                let chord = Chord::new(a, u)?;
                let psi = self.psi_alpha(alpha, u)?;
                for (x, wx) in chord.points(&self.rule) {
                    let r = m.link(a0.dot(&x)) - psi;
                    let c = w * chord.length() * wx * r;
                    acc[0] += c * x[0];
                    acc[1] += c * x[1];
                }
            }
        }
        Ok(acc[0] * acc[0] + acc[1] * acc[1])
    }
}

/// Moore–Penrose inverse of a symmetric matrix by spectral decomposition.
///
/// Eigenvalues with `|λ| ≤ tol · max|λ|` are treated as zero.
pub fn moore_penrose_pinv(m: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::InvalidParameter(format!(
            "pinv needs a square matrix, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let eig = SymmetricEigen::new(m.clone());
    let max = eig.eigenvalues.iter().fold(0.0f64, |acc, l| acc.max(l.abs()));
    let inv = eig.eigenvalues.map(|l| {
        if max == 0.0 || l.abs() <= tol * max {
            0.0
        } else {
            1.0 / l
        }
    });
    let q = &eig.eigenvectors;
    Ok(q * DMatrix::from_diagonal(&inv) * q.transpose())
}

/// `B⁻ M B⁻` with the Moore–Penrose inverse of `B`, symmetrized.
pub fn sandwich(bread: &DMatrix<f64>, meat: &DMatrix<f64>) -> DMatrix<f64> {
    let b = moore_penrose_pinv(bread, PINV_TOL).expect("finite square bread");
    let s = &b * meat * &b;
    (&s + s.transpose()) * 0.5
}
