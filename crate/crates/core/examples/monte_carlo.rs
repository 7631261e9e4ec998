//! Desk-scale replication study: mean and `n · cov` of `α̂` for one
//! model / estimator pair.
//!
//! ```text
//! cargo run --release --example monte_carlo -- [model] [estimator] [n] [reps] [seed]
//! cargo run --release --example monte_carlo -- 2 spline 1000 200 1
//! ```

use std::time::Instant;

use monoindex::simulation::{run_monte_carlo, ReplicationPlan};
use monoindex::{EstimatorKind, Model, Population, SearchOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let model: Model = arg(0, "1").parse()?;
    let kind: EstimatorKind = arg(1, "sse").parse()?;
    let plan = ReplicationPlan {
        model,
        kind,
        n: arg(2, "1000").parse()?,
        reps: arg(3, "200").parse()?,
        master_seed: arg(4, "1").parse()?,
    };

    let start = Instant::now();
    let s = run_monte_carlo(&plan, &SearchOptions::default())?;
    println!(
        "model {model}, {kind}, n = {}, {} reps ({} failed)",
        plan.n, s.reps_used, s.failures
    );
    println!("  mu     = ({:.6}, {:.6})", s.mu_hat[0], s.mu_hat[1]);
    println!(
        "  n·cov  = [{:.6} {:.6}; {:.6} {:.6}]",
        s.scaled_cov[0][0], s.scaled_cov[0][1], s.scaled_cov[1][0], s.scaled_cov[1][1]
    );
    if let Ok(limit) = Population::new(model).asymptotic_covariance(kind) {
        println!(
            "  limit  = [{:.6} {:.6}; {:.6} {:.6}]",
            limit[(0, 0)],
            limit[(0, 1)],
            limit[(1, 0)],
            limit[(1, 1)]
        );
    }
    println!("  {:.1?}", start.elapsed());
    Ok(())
}
