//! Asymptotic covariance matrices of the score estimators by quadrature.
//!
//! ```text
//! cargo run --release --example asymptotic_covariance
//! ```

use monoindex::{EstimatorKind, Model, Population};

fn main() -> monoindex::Result<()> {
    for model in [Model::Cubic, Model::Binomial] {
        let pop = Population::new(model);
        for kind in [EstimatorKind::Sse, EstimatorKind::Ese] {
            let (bread, meat) = pop.sandwich_parts(kind)?;
            let cov = pop.asymptotic_covariance(kind)?;
            println!("model {model}, {kind}");
            println!("  bread diag    {:.8}", bread[(0, 0)]);
            println!("  meat diag     {:.8}", meat[(0, 0)]);
            println!(
                "  sandwich      [{:.6} {:.6}; {:.6} {:.6}]",
                cov[(0, 0)],
                cov[(0, 1)],
                cov[(1, 0)],
                cov[(1, 1)]
            );
        }
        // The spline estimator shares the efficient limit.
        match pop.asymptotic_covariance(EstimatorKind::Lse) {
            Ok(_) => unreachable!(),
            Err(e) => println!("  lse: {e}"),
        }
    }
    Ok(())
}
