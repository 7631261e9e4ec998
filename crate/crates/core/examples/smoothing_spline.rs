//! Penalized natural cubic smoothing spline across penalty levels.
//!
//! ```text
//! cargo run --release --example smoothing_spline
//! ```

use monoindex::rng::Stream;
use monoindex::{fit_smoothing_spline, PenaltyParameter, ScatterPoint};

fn main() -> monoindex::Result<()> {
    let mut s = Stream::new(3);
    let points: Vec<ScatterPoint> = (0..200)
        .map(|_| {
            let t = 2.0 * s.uniform() - 1.0;
            ScatterPoint::new(t, t.powi(3) + 0.1 * s.standard_normal())
        })
        .collect();

    println!(
        "{:>10} {:>12} {:>12} {:>10} {:>10}",
        "mu", "rss", "roughness", "g(0.5)", "g'(0.5)"
    );
    for mu in [1e-6, 1e-3, 1e-1, 1e1, 1e4] {
        let g = fit_smoothing_spline(&points, PenaltyParameter::new(mu)?)?;
        let rss: f64 = points.iter().map(|p| (p.y - g.eval(p.t)).powi(2)).sum();
        println!(
            "{mu:>10.0e} {rss:>12.5} {:>12.5} {:>10.4} {:>10.4}",
            g.roughness(),
            g.eval(0.5),
            g.eval_derivative(0.5)
        );
    }
    println!("truth: g(0.5) = 0.125, g'(0.5) = 0.75; large mu tends to the least-squares line");
    Ok(())
}
