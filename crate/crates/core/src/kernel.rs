//! Kernel-smoothed derivative of an isotonic fit.
//!
//! The derivative estimate integrates a scaled kernel against the jump measure
//! of the step function: `(1/h) Σ_j K((u − τ_j)/h) Δ_j`.

use crate::error::{Error, Result};
use crate::isotonic::MonotoneStepFunction;

/// Symmetric kernels supported on `[-1, 1]` that integrate to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Kernel {
    #[default]
    Epanechnikov,
    Triweight,
}

impl Kernel {
    pub fn eval(self, v: f64) -> f64 {
        if v.abs() >= 1.0 {
            return 0.0;
        }
        let q = 1.0 - v * v;
        match self {
            Kernel::Epanechnikov => 0.75 * q,
            Kernel::Triweight => 35.0 / 32.0 * q * q * q,
        }
    }
}

/// Positive smoothing bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Bandwidth(f64);

impl Bandwidth {
    pub fn new(h: f64) -> Result<Self> {
        if !h.is_finite() {
            return Err(Error::NonFinite);
        }
        if h <= 0.0 {
            return Err(Error::InvalidParameter(format!("bandwidth must be > 0, got {h}")));
        }
        Ok(Self(h))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Multiplier of `range · n^{-1/7}` in [`default_bandwidth`].
pub const DEFAULT_BANDWIDTH_CONST: f64 = 0.5;

/// `h = 0.5 · range · n^{-1/7}`.
pub fn default_bandwidth(n: usize, range: f64) -> Result<Bandwidth> {
    scaled_bandwidth(DEFAULT_BANDWIDTH_CONST, n, range)
}

/// `h = c · range · n^{-1/7}`.
pub fn scaled_bandwidth(c: f64, n: usize, range: f64) -> Result<Bandwidth> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be ≥ 1".into()));
    }
    if !(range > 0.0) || !(c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bandwidth constant and range must be > 0 (c = {c}, range = {range})"
        )));
    }
    Bandwidth::new(c * range * (n as f64).powf(-1.0 / 7.0))
}

/// Smoothed derivative of `f` at a single point.
pub fn smoothed_derivative(f: &MonotoneStepFunction, k: Kernel, h: Bandwidth, u: f64) -> f64 {
    let h = h.get();
    f.jumps()
        .map(|(tau, delta)| k.eval((u - tau) / h) * delta)
        .sum::<f64>()
        / h
}

/// Evaluates the smoothed derivative at many points.
///
/// Equivalent to calling [`smoothed_derivative`] for each point, but only
/// visits jumps inside the kernel window.
#[derive(Debug, Clone)]
pub struct DerivativeSmoother {
    locations: Vec<f64>,
    sizes: Vec<f64>,
    kernel: Kernel,
    h: f64,
}

impl DerivativeSmoother {
    pub fn new(f: &MonotoneStepFunction, kernel: Kernel, h: Bandwidth) -> Self {
        let (locations, sizes) = f.jumps().unzip();
        Self {
            locations,
            sizes,
            kernel,
            h: h.get(),
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        let lo = self.locations.partition_point(|&t| t <= u - self.h);
        let hi = self.locations.partition_point(|&t| t < u + self.h);
        let mut acc = 0.0;
        for j in lo..hi {
            acc += self.kernel.eval((u - self.locations[j]) / self.h) * self.sizes[j];
        }
        acc / self.h
    }
}
