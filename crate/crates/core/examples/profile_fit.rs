//! Estimate the index direction with all four criteria on one seeded dataset.
//!
//! ```text
//! cargo run --release --example profile_fit -- [model] [n] [seed]
//! ```

use monoindex::simulation::generate;
use monoindex::{profile_fit, EstimatorKind, Model, SearchOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let model: Model = args.first().map_or(Ok(Model::Cubic), |s| s.parse())?;
    let n: usize = args.get(1).map_or(Ok(2000), |s| s.parse())?;
    let seed: u64 = args.get(2).map_or(Ok(1), |s| s.parse())?;

    let data = generate(model, n, seed)?;
    let truth = model.alpha0();
    println!(
        "model {model}, n = {n}, truth ({:.6}, {:.6})",
        truth.components()[0],
        truth.components()[1]
    );
    for kind in EstimatorKind::ALL {
        let fit = profile_fit(kind, &data, &SearchOptions::default())?;
        let a = fit.alpha_hat.components();
        println!(
            "{:>6}: alpha = ({:.6}, {:.6})  loss = {:.3e}  evaluations = {}",
            kind.name(),
            a[0],
            a[1],
            fit.loss,
            fit.evaluations
        );
    }
    Ok(())
}
