//! Growth of the normal trace against the growth of the boundary measure,
//! in both directions, for a few exponents.

use boundary_growth::harness::{verify_theorem1_converse, verify_theorem1_forward, VerificationCase};

fn main() -> boundary_growth::Result<()> {
    for (n, alpha) in [(2, 0.0), (3, -0.5), (3, 0.0), (3, 1.0), (4, 2.0)] {
        let t_min = if alpha < 0.0 { 1e-5 } else { 1e-4 };
        let case = VerificationCase::new(n, alpha, 1.0, t_min);
        let forward = verify_theorem1_forward(&case)?;
        let converse = verify_theorem1_converse(&case)?;
        println!("n = {n}, alpha = {alpha:>4}: C_alpha = {:.6}", forward.c_alpha);
        for d in &forward.deviations {
            println!("    t = {:.0e}  C u t^alpha = {:.8}  |. - b| = {:.2e}", d.t, d.value, d.deviation);
        }
        println!("    truncation bound {:.2e}", forward.truncation_bound);
        println!("    forward {}, converse {}", forward.passed, converse.passed);
        if let Some(w) = &converse.weak_limit {
            println!("    weak limit {:?} vs {:?} ({})", w.observed.extrapolated_limit, w.predicted, w.ok);
        }
    }
    Ok(())
}
