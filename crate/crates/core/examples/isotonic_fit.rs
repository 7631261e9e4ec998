//! Weighted isotonic regression by pool-adjacent-violators.
//!
//! ```text
//! cargo run --example isotonic_fit
//! ```

use monoindex::{fit_isotonic, ScatterPoint};

fn main() -> monoindex::Result<()> {
    let points: Vec<ScatterPoint> = [
        (0.1, 1.0),
        (0.4, 3.0),
        (0.5, 2.0),
        (0.7, 2.5),
        (0.9, 5.0),
        (0.9, 4.0),
    ]
    .iter()
    .map(|&(t, y)| ScatterPoint::new(t, y))
    .collect();

    let fit = fit_isotonic(&points, None)?;
    println!("knots  {:?}", fit.knots());
    println!("levels {:?}", fit.levels());
    for (at, size) in fit.jumps() {
        println!("jump of {size:.4} at {at}");
    }
    for u in [0.0, 0.45, 0.5, 0.95] {
        println!("f({u}) = {}", fit.eval(u));
    }

    // Heavier weight on the third point drags the pooled block toward it.
    let w = [1.0, 1.0, 10.0, 1.0, 1.0, 1.0];
    let weighted = fit_isotonic(&points, Some(&w))?;
    println!("weighted levels {:?}", weighted.levels());
    Ok(())
}
