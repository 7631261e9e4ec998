//! Empirical and population criterion curves along `α = (α₁, √(1−α₁²))`,
//! plus the zoomed plateau comparison between the LSE and SSE curves.
//!
//! ```text
//! cargo run --release --example loss_curves -- [n] [seed] > curves.txt
//! ```

use monoindex::simulation::{generate, linear_grid, loss_curve};
use monoindex::{EstimatorKind, Model, Population};

fn distinct(curve: &[(f64, f64)]) -> usize {
    let mut v: Vec<f64> = curve.iter().map(|&(_, l)| l).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

/// `Σ|Δ²L| / Σ|ΔL|`: near 0 for a smooth curve, near 2 for a jagged one.
fn roughness(curve: &[(f64, f64)]) -> f64 {
    let second: f64 = curve
        .windows(3)
        .map(|w| (w[2].1 - 2.0 * w[1].1 + w[0].1).abs())
        .sum();
    let first: f64 = curve.windows(2).map(|w| (w[1].1 - w[0].1).abs()).sum();
    second / first
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(10_000), |s| s.parse())?;
    let seed: u64 = args.get(1).map_or(Ok(1), |s| s.parse())?;
    let data = generate(Model::Cubic, n, seed)?;
    let pop = Population::new(Model::Cubic);

    let grid = linear_grid(0.0, 1.0, 101)?;
    let lse = loss_curve(&data, EstimatorKind::Lse, &grid)?;
    let sse = loss_curve(&data, EstimatorKind::Sse, &grid)?;
    let lse_pop = pop.population_loss(EstimatorKind::Lse, &grid)?;
    let sse_pop = pop.population_loss(EstimatorKind::Sse, &grid)?;
    println!("alpha1,lse,lse_population,sse,sse_population");
    for i in 0..grid.len() {
        println!(
            "{},{},{},{},{}",
            grid[i], lse[i].1, lse_pop[i].1, sse[i].1, sse_pop[i].1
        );
    }

    let argmin = |c: &[(f64, f64)]| c.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0;
    eprintln!("grid minimizers: lse {}, sse {}", argmin(&lse), argmin(&sse));

    let zoom = linear_grid(0.65, 0.80, 500)?;
    let lse_zoom = loss_curve(&data, EstimatorKind::Lse, &zoom)?;
    let sse_zoom = loss_curve(&data, EstimatorKind::Sse, &zoom)?;
    eprintln!(
        "on [0.65, 0.80] with 500 points: lse takes {} distinct values, sse {}",
        distinct(&lse_zoom),
        distinct(&sse_zoom)
    );
    eprintln!(
        "roughness on the same grid: lse {:.3}, sse {:.3}",
        roughness(&lse_zoom),
        roughness(&sse_zoom)
    );
    // Both curves are step functions of α; the steps only show at fine scale.
    let fine = linear_grid(0.72, 0.7201, 500)?;
    eprintln!(
        "on [0.72, 0.7201] with 500 points: lse takes {} distinct values, sse {}",
        distinct(&loss_curve(&data, EstimatorKind::Lse, &fine)?),
        distinct(&loss_curve(&data, EstimatorKind::Sse, &fine)?)
    );
    Ok(())
}
