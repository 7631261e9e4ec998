//! Kernel-smoothed derivative of an isotonic fit, the `ψ′` estimate used by
//! the efficient score criterion.
//!
//! ```text
//! cargo run --release --example kernel_derivative
//! ```

use monoindex::kernel::{default_bandwidth, DerivativeSmoother};
use monoindex::rng::Stream;
use monoindex::{fit_isotonic, Kernel, ScatterPoint};

fn main() -> monoindex::Result<()> {
    // y = 3t² + noise on [0, 1]; the true derivative is 6t.
    let n = 5000;
    let mut s = Stream::new(7);
    let points: Vec<ScatterPoint> = (0..n)
        .map(|_| {
            let t = s.uniform();
            ScatterPoint::new(t, 3.0 * t * t + 0.3 * s.standard_normal())
        })
        .collect();
    let fit = fit_isotonic(&points, None)?;
    let h = default_bandwidth(n, 1.0)?;
    println!("{} jumps, bandwidth {:.4}", fit.jumps().count(), h.get());

    for kernel in [Kernel::Epanechnikov, Kernel::Triweight] {
        let d = DerivativeSmoother::new(&fit, kernel, h);
        println!("{kernel:?}");
        for u in [0.2, 0.4, 0.6, 0.8] {
            println!("  u = {u}: estimate {:.3}, truth {:.3}", d.eval(u), 6.0 * u);
        }
    }
    Ok(())
}
