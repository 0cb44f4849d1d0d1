//! Multiplicative convolution on (0, inf) and the transform of the trace kernel.

use boundary_growth::mellin::{k_hat_closed, k_hat_numeric, log_convolve, weighted_moment, LogLineFunction};
use boundary_growth::Dimension;

fn main() -> boundary_growth::Result<()> {
    let n = Dimension::new(3)?;
    let alpha = 0.5;
    println!("  y      |k_hat|            |closed - numeric|");
    for y in [-8.0, -2.0, 0.0, 1.0, 4.0, 10.0] {
        let c = k_hat_closed(y, alpha, n)?;
        let v = k_hat_numeric(y, alpha, n)?;
        println!("{y:>5}  {:.12e}  {:.2e}", c.norm(), (c - v).norm());
    }

    // t^alpha is an eigenfunction of convolution with any box
    let chi = LogLineFunction::character(alpha);
    let g = LogLineFunction::boxcar(0.5, 3.0, 2.0)?;
    let m = weighted_moment(&g, -alpha)?;
    println!("\n t       (chi * g)(t) / t^alpha   moment {m:.12}");
    for t in [1e-3, 1.0, 1e3] {
        println!("{t:<7} {:.12}", log_convolve(&chi, &g, t)? / f64::powf(t, alpha));
    }

    let k = LogLineFunction::kernel(n);
    println!("\nint k dln s = {:.12}", weighted_moment(&k, 0.0)?);
    Ok(())
}
