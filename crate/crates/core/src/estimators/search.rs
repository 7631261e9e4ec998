//! Profile search over the angle `β` of `α = (cos β, sin β)`.

use std::f64::consts::PI;

use super::{angle_to_alpha, wrap_angle, Criterion, Dataset, EstimatorKind, UnitVector};
use crate::error::{Error, Result};
use crate::isotonic::MonotoneStepFunction;
use crate::kernel::Kernel;
use crate::spline::NaturalCubicSpline;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Which monotone direction the link is fitted in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Increasing,
    /// Fits a nonincreasing link by negating the responses.
    Decreasing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    /// Golden-section stopping width, in radians.
    pub tol: f64,
    /// Half-width of the bracket around the LSE angle for SSE, ESE and spline.
    pub bracket: f64,
    /// Number of coarse grid angles for the LSE start.
    pub grid: usize,
    pub kernel: Kernel,
    pub bandwidth_const: f64,
    pub mu_const: f64,
    pub orientation: Orientation,
    /// Record every `(angle, loss)` evaluation.
    pub trace: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            bracket: 0.3,
            grid: 64,
            kernel: Kernel::default(),
            bandwidth_const: crate::kernel::DEFAULT_BANDWIDTH_CONST,
            mu_const: crate::spline::DEFAULT_MU_CONST,
            orientation: Orientation::default(),
            trace: false,
        }
    }
}

impl SearchOptions {
    fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Error::InvalidParameter(format!("{what} must be > 0, got {v}"));
        if !(self.tol > 0.0) {
            return Err(bad("tol", self.tol));
        }
        if !(self.bracket > 0.0) {
            return Err(bad("bracket", self.bracket));
        }
        if !(self.bandwidth_const > 0.0) {
            return Err(bad("bandwidth constant", self.bandwidth_const));
        }
        if !(self.mu_const > 0.0) {
            return Err(bad("mu constant", self.mu_const));
        }
        if self.grid < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid must be ≥ 3, got {}",
                self.grid
            )));
        }
        Ok(())
    }

    fn criterion(&self, kind: EstimatorKind) -> Criterion {
        Criterion {
            kind,
            kernel: self.kernel,
            bandwidth_const: self.bandwidth_const,
            mu_const: self.mu_const,
        }
    }
}

/// The fitted link at the estimated direction.
#[derive(Debug, Clone, PartialEq)]
pub enum Link {
    Isotonic(MonotoneStepFunction),
    Spline(NaturalCubicSpline),
}

impl Link {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Link::Isotonic(f) => f.eval(u),
            Link::Spline(s) => s.eval(u),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub kind: EstimatorKind,
    pub alpha_hat: UnitVector,
    /// Angle of `alpha_hat` in `(−π, π]`.
    pub angle: f64,
    pub loss: f64,
    pub link: Link,
    /// Number of criterion evaluations, including the LSE start.
    pub evaluations: usize,
    pub trace: Option<Vec<(f64, f64)>>,
}

/// Outcome of a one-dimensional angle search.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSearch {
    /// Best angle found (not wrapped).
    pub angle: f64,
    pub loss: f64,
    pub evaluations: usize,
    pub trace: Vec<(f64, f64)>,
}

/// Counts evaluations and keeps the best point seen.
struct Tracker<F> {
    f: F,
    best: (f64, f64),
    evaluations: usize,
    trace: Vec<(f64, f64)>,
}

impl<F: FnMut(f64) -> Result<f64>> Tracker<F> {
    fn new(f: F) -> Self {
        Self {
            f,
            best: (f64::NAN, f64::INFINITY),
            evaluations: 0,
            trace: Vec::new(),
        }
    }

    fn eval(&mut self, x: f64) -> Result<f64> {
        let v = (self.f)(x)?;
        self.evaluations += 1;
        self.trace.push((x, v));
        if v < self.best.1 {
            self.best = (x, v);
        }
        Ok(v)
    }

    fn finish(self) -> AngleSearch {
        AngleSearch {
            angle: self.best.0,
            loss: self.best.1,
            evaluations: self.evaluations,
            trace: self.trace,
        }
    }
}

fn golden<F: FnMut(f64) -> Result<f64>>(t: &mut Tracker<F>, lo: f64, hi: f64, tol: f64) -> Result<()> {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = t.eval(c)?;
    let mut fd = t.eval(d)?;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = t.eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = t.eval(d)?;
        }
    }
    Ok(())
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
///
/// Returns the best point evaluated; for a unimodal `f` it lies within `tol`
/// of the minimizer.
pub fn golden_section_min<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<AngleSearch>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need lo < hi and tol > 0 (lo = {lo}, hi = {hi}, tol = {tol})"
        )));
    }
    let mut t = Tracker::new(f);
    golden(&mut t, lo, hi, tol)?;
    Ok(t.finish())
}

/// Minimizes an arbitrary function of the angle with the profile-search recipe.
///
/// Without `start`, a grid of `opts.grid` angles over `(−π, π]` is scanned
/// and golden section refines between the neighbours of the best grid point.
/// With `start`, golden section runs on `start ± opts.bracket` and the start
/// itself is evaluated, so the result is never worse than the start.
pub fn minimize_angle<F>(f: F, start: Option<f64>, opts: &SearchOptions) -> Result<AngleSearch>
where
    F: FnMut(f64) -> Result<f64>,
{
    opts.validate()?;
    let mut t = Tracker::new(f);
    match start {
        None => {
            let step = 2.0 * PI / opts.grid as f64;
            let mut best_k = 0;
            let mut best_v = f64::INFINITY;
            for k in 0..opts.grid {
                let v = t.eval(-PI + step * (k + 1) as f64)?;
                if v < best_v {
                    best_v = v;
                    best_k = k;
                }
            }
            let center = -PI + step * (best_k + 1) as f64;
            golden(&mut t, center - step, center + step, opts.tol)?;
        }
        Some(s) => {
            t.eval(s)?;
            golden(&mut t, s - opts.bracket, s + opts.bracket, opts.tol)?;
        }
    }
    Ok(t.finish())
}

fn degenerate(data: &Dataset, grid: usize) -> bool {
    (0..grid).all(|k| {
        let alpha = angle_to_alpha(-PI + 2.0 * PI * (k + 1) as f64 / grid as f64);
        let t = data.project(&alpha);
        t.iter().all(|&v| v == t[0])
    })
}

/// Estimates `α` for a two-dimensional dataset.
///
/// LSE: coarse grid plus golden-section refinement. SSE, ESE and spline:
/// golden section on a bracket centred at the LSE angle.
pub fn profile_fit(kind: EstimatorKind, data: &Dataset, opts: &SearchOptions) -> Result<EstimateResult> {
    opts.validate()?;
    if data.dim() != 2 {
        return Err(Error::UnsupportedDimension(data.dim()));
    }
    if data.n() < 3 {
        return Err(Error::InvalidParameter(format!("need n ≥ 3, got {}", data.n())));
    }
    if degenerate(data, opts.grid) {
        return Err(Error::DegenerateDesign);
    }
    let negated;
    let data = match opts.orientation {
        Orientation::Increasing => data,
        Orientation::Decreasing => {
            negated = data.negated();
            &negated
        }
    };

    let lse = opts.criterion(EstimatorKind::Lse);
    let start = minimize_angle(|b| lse.loss(&angle_to_alpha(b), data), None, opts)?;
    let (search, prior_evals, mut trace) = if kind == EstimatorKind::Lse {
        (start, 0, Vec::new())
    } else {
        let crit = opts.criterion(kind);
        let s = minimize_angle(|b| crit.loss(&angle_to_alpha(b), data), Some(start.angle), opts)?;
        (s, start.evaluations, start.trace)
    };
    trace.extend_from_slice(&search.trace);

    let alpha_hat = angle_to_alpha(search.angle);
    let (loss, link) = opts.criterion(kind).evaluate(&alpha_hat, data)?;
    Ok(EstimateResult {
        kind,
        alpha_hat,
        angle: wrap_angle(search.angle),
        loss,
        link,
        evaluations: prior_evals + search.evaluations,
        trace: opts
            .trace
            .then(|| trace.into_iter().map(|(b, v)| (wrap_angle(b), v)).collect()),
    })
}
