//! Gamma, the Poisson normalisation and the Tauberian constant.

use boundary_growth::specfun::{complete_elliptic_e, gamma, ln_gamma, sphere_area};
use boundary_growth::{kappa_n, tauberian_constant, Dimension};

fn main() -> boundary_growth::Result<()> {
    println!("gamma(0.5)^2 = {:.16} (pi = {:.16})", gamma(0.5)?.powi(2), std::f64::consts::PI);
    println!("ln gamma(100) = {:.12}", ln_gamma(100.0)?);
    println!("E(0.5) = {:.15}", complete_elliptic_e(0.5)?);

    println!("\n n   kappa_n            kappa_n * |S^(n-1)|");
    for n in 2..=6 {
        let dim = Dimension::new(n)?;
        println!("{n:>2}   {:.15}  {:.15}", kappa_n(dim), kappa_n(dim) * sphere_area(n - 1));
    }

    println!("\nC_alpha in R^3_+:");
    for alpha in [-0.5, 0.0, 0.5, 1.0, 1.5, 2.0] {
        println!("  alpha = {alpha:>4}: {:.12}", tauberian_constant(alpha, Dimension::new(3)?)?);
    }
    Ok(())
}
