//! Data generation and Monte Carlo replication studies.

use rayon::prelude::*;

use crate::asymptotics::{logistic, Model};
use crate::error::{Error, Result};
use crate::estimators::{profile_fit, Criterion, Dataset, EstimatorKind, SearchOptions, UnitVector};
use crate::rng::{replication_seed, Stream};

/// Draws `n` observations from `model` using the stream keyed by `seed`.
///
/// Per observation the stream yields `X₁`, `X₂`, then the noise: one
/// uniform inverted to a standard normal for the cubic model, ten Bernoulli
/// uniforms for the binomial model.
pub fn generate(model: Model, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut s = Stream::new(seed);
    let a0 = model.alpha0();
    let mut x = Vec::with_capacity(2 * n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let row = [s.uniform(), s.uniform()];
        let u = a0.dot(&row);
        let resp = match model {
            Model::Cubic => model.link(u) + s.standard_normal(),
            Model::Binomial => f64::from(s.binomial(10, logistic(u))),
        };
        x.extend_from_slice(&row);
        y.push(resp);
    }
    Dataset::new(2, x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplicationPlan {
    pub model: Model,
    pub kind: EstimatorKind,
    pub n: usize,
    pub reps: usize,
    pub master_seed: u64,
}

impl ReplicationPlan {
    fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return Err(Error::InvalidParameter(format!("need n ≥ 10, got {}", self.n)));
        }
        if self.reps < 2 {
            return Err(Error::TooFewReplications);
        }
        Ok(())
    }
}

/// One replication: its seed and either `α̂` or the error that stopped it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    pub index: usize,
    pub seed: u64,
    pub outcome: Result<(UnitVector, f64)>,
}

/// Component means of `α̂` and `n · cov(α̂_i, α̂_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary {
    pub mu_hat: Vec<f64>,
    /// Row-major `d × d`.
    pub scaled_cov: Vec<Vec<f64>>,
    pub reps_used: usize,
    pub failures: usize,
}

/// Runs every replication of `plan`, in parallel on the current rayon pool.
/// Records are returned in replication order.
pub fn run_replications(plan: &ReplicationPlan, opts: &SearchOptions) -> Result<Vec<ReplicationRecord>> {
    plan.validate()?;
    Ok((0..plan.reps)
        .into_par_iter()
        .map(|r| {
            let seed = replication_seed(plan.master_seed, r as u64);
            let outcome = generate(plan.model, plan.n, seed)
                .and_then(|data| profile_fit(plan.kind, &data, opts))
                .map(|fit| (fit.alpha_hat, fit.loss));
            ReplicationRecord {
                index: r,
                seed,
                outcome,
            }
        })
        .collect())
}

/// Aggregates replication records with pairwise summation.
pub fn summarize(n: usize, records: &[ReplicationRecord]) -> Result<SimulationSummary> {
    let alphas: Vec<&[f64]> = records
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok().map(|(a, _)| a.components()))
        .collect();
    let failures = records.len() - alphas.len();
    match alphas.len() {
        0 => return Err(Error::AllReplicationsFailed),
        1 => return Err(Error::TooFewReplications),
        _ => {}
    }
    let used = alphas.len();
    let d = alphas[0].len();
    let column = |j: usize| -> Vec<f64> { alphas.iter().map(|a| a[j]).collect() };
    let mu_hat: Vec<f64> = (0..d).map(|j| pairwise_sum(&column(j)) / used as f64).collect();
    let mut scaled_cov = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in i..d {
            let prods: Vec<f64> = alphas
                .iter()
                .map(|a| (a[i] - mu_hat[i]) * (a[j] - mu_hat[j]))
                .collect();
            let c = n as f64 * pairwise_sum(&prods) / (used - 1) as f64;
            scaled_cov[i][j] = c;
            scaled_cov[j][i] = c;
        }
    }
    Ok(SimulationSummary {
        mu_hat,
        scaled_cov,
        reps_used: used,
        failures,
    })
}

/// Replicates `plan` and summarizes the estimates.
pub fn run_monte_carlo(plan: &ReplicationPlan, opts: &SearchOptions) -> Result<SimulationSummary> {
    let records = run_replications(plan, opts)?;
    summarize(plan.n, &records)
}

/// Sum by recursive halving; the result does not depend on thread layout.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Empirical criterion along `α = (α₁, √(1 − α₁²))`.
pub fn loss_curve(data: &Dataset, kind: EstimatorKind, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    loss_curve_with(data, &Criterion::new(kind), grid)
}

pub fn loss_curve_with(data: &Dataset, criterion: &Criterion, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if data.dim() != 2 {
        return Err(Error::UnsupportedDimension(data.dim()));
    }
    grid.iter()
        .map(|&a1| {
            if !(0.0..=1.0).contains(&a1) {
                return Err(Error::InvalidParameter(format!("alpha1 = {a1} outside [0, 1]")));
            }
            let alpha = UnitVector::new(vec![a1, (1.0 - a1 * a1).max(0.0).sqrt()])?;
            Ok((a1, criterion.loss(&alpha, data)?))
        })
        .collect()
}

/// `points` equally spaced values from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo <= hi) || points == 0 || (points == 1 && lo != hi) {
        return Err(Error::InvalidParameter(format!(
            "invalid grid: min = {lo}, max = {hi}, points = {points}"
        )));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|k| {
            if k + 1 == points {
                hi
            } else {
                lo + (hi - lo) * (k as f64 / last)
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let a = generate(Model::Cubic, 50, 9).unwrap();
        let b = generate(Model::Cubic, 50, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate(Model::Cubic, 50, 10).unwrap());
    }

    #[test]
    fn binomial_support() {
        let d = generate(Model::Binomial, 2000, 3).unwrap();
        assert!(d.y().iter().all(|&y| y == y.round() && (0.0..=10.0).contains(&y)));
        assert!(d.rows().all(|r| r.iter().all(|&v| v > 0.0 && v < 1.0)));
    }

    #[test]
    fn summary_of_known_records() {
        let mk = |i: usize, a: f64, b: f64| ReplicationRecord {
            index: i,
            seed: 0,
            outcome: Ok((UnitVector::new(vec![a, b]).unwrap(), 0.0)),
        };
        let recs = vec![
            mk(0, 0.6, 0.8),
            mk(1, 0.8, 0.6),
            ReplicationRecord {
                index: 2,
                seed: 0,
                outcome: Err(Error::DegenerateDesign),
            },
        ];
        let s = summarize(100, &recs).unwrap();
        assert_eq!((s.reps_used, s.failures), (2, 1));
        assert!((s.mu_hat[0] - 0.7).abs() < 1e-15);
        // var of {0.6, 0.8} with divisor 1 is 0.02
        assert!((s.scaled_cov[0][0] - 2.0).abs() < 1e-12);
        assert!((s.scaled_cov[0][1] + 2.0).abs() < 1e-12);
        assert_eq!(summarize(100, &recs[2..]), Err(Error::AllReplicationsFailed));
        assert_eq!(summarize(100, &recs[1..]), Err(Error::TooFewReplications));
    }

    #[test]
    fn plan_validation() {
        let plan = ReplicationPlan {
            model: Model::Cubic,
            kind: EstimatorKind::Sse,
            n: 100,
            reps: 1,
            master_seed: 1,
        };
        assert_eq!(
            run_monte_carlo(&plan, &SearchOptions::default()),
            Err(Error::TooFewReplications)
        );
        let small = ReplicationPlan {
            n: 5,
            reps: 3,
            ..plan
        };
        assert!(run_monte_carlo(&small, &SearchOptions::default()).is_err());
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sqrt()).collect();
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-9);
    }

    #[test]
    fn grids() {
        assert_eq!(linear_grid(0.0, 1.0, 3).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(linear_grid(0.2, 0.2, 1).unwrap(), vec![0.2]);
        assert!(linear_grid(1.0, 0.0, 5).is_err());
        assert!(linear_grid(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn loss_curve_rejects_out_of_range() {
        let d = generate(Model::Cubic, 20, 1).unwrap();
        assert!(loss_curve(&d, EstimatorKind::Lse, &[1.5]).is_err());
        let c = loss_curve(&d, EstimatorKind::Lse, &[0.0, 0.5, 1.0]).unwrap();
        assert!(c.iter().all(|&(_, v)| v >= 0.0));
    }
}
