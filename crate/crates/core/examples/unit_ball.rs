//! Measures on the unit sphere in R^3: cap masses, the ball extension along the
//! normal, the tangent-plane projection, and the growth comparison.

use boundary_growth::ball::{ball_extend, cap_mass, cap_power_measure, distance_ratio_probe, BallPoint, SphereMeasure};
use boundary_growth::harness::verify_ball_growth;
use boundary_growth::{tauberian_constant, Dimension};

fn main() -> boundary_growth::Result<()> {
    let n = Dimension::new(3)?;
    let uniform = SphereMeasure::uniform(n, 1.0)?;
    let y = BallPoint::new(vec![0.2, -0.1, 0.5])?;
    println!("uniform density 1: u = {:.12}", ball_extend(&uniform, &y)?);

    let mu = cap_power_measure(0.5, 1.0, n, 0.5)?;
    println!("\n r       mu(cap) / r^(2 - alpha)");
    for r in [0.4, 0.1, 0.01] {
        println!("{r:<7} {:.10}", cap_mass(&mu, r)? / f64::powf(r, 1.5));
    }
    let c = tauberian_constant(0.5, n)?;
    println!("\n t       C_alpha u(x0 (1 - t)) t^alpha");
    for t in [1e-1, 1e-2, 1e-3] {
        println!("{t:<7} {:.10}", c * ball_extend(&mu, &BallPoint::along_normal(mu.base_point(), t)?)? * f64::powf(t, 0.5));
    }

    // interior points at height h over sphere points at chordal distance sqrt(h)
    let (mut z, mut s) = (Vec::new(), Vec::new());
    for h in [1e-2f64, 1e-3, 1e-4, 1e-5] {
        let a = h.sqrt();
        z.push(BallPoint::along_normal(&[0.0, 0.0, 1.0], h)?);
        s.push(vec![a * (1.0 - a * a / 4.0).sqrt(), 0.0, 1.0 - a * a / 2.0]);
    }
    let probe = distance_ratio_probe(&[0.0, 0.0, 1.0], &z, &s)?;
    println!("\ndistance ratios {:?}", probe.ratios);

    for alpha in [0.0, 0.5, 1.0] {
        let r = verify_ball_growth(alpha, 1.0, 0.5, 1e-3, 0.02)?;
        println!("alpha = {alpha}: ball {:.6}, half-space {:.6}, passed {}", r.ball, r.halfspace, r.passed);
    }
    Ok(())
}
