//! Poisson extension of a few boundary measures, and the two ways of
//! computing the normal trace.

use boundary_growth::halfspace::lower_bound_check;
use boundary_growth::{
    extend, normal_trace_convolution, normal_trace_direct, power_law_measure, BoundaryMeasure, Dimension,
    HalfSpacePoint,
};

fn main() -> boundary_growth::Result<()> {
    let n = Dimension::new(3)?;
    let mu = power_law_measure(0.5, 1.0, n, 1.0)?
        .combine(&BoundaryMeasure::atom(n, vec![0.3, 0.0], 0.2)?)?
        .combine(&BoundaryMeasure::patch(n, vec![-1.0, 0.5], vec![0.0, 1.0], 2.0)?)?;
    println!("{}", serde_json::to_string(&mu).unwrap());

    for (x, t) in [(vec![0.0, 0.0], 1.0), (vec![0.3, 0.0], 0.01), (vec![-0.5, 0.7], 0.1), (vec![5.0, 5.0], 0.5)] {
        let p = HalfSpacePoint::new(x.clone(), t)?;
        println!("u({x:?}, {t}) = {:.10e}", extend(&mu, &p)?);
    }

    println!("\n t          direct             convolution        lower bound ok");
    for t in [1.0, 1e-1, 1e-2, 1e-3, 1e-4] {
        let a = normal_trace_direct(&mu, t)?;
        let b = normal_trace_convolution(&mu, t)?;
        println!("{t:<10} {a:.12e} {b:.12e} {}", lower_bound_check(&mu, t)?.ok);
    }
    Ok(())
}
