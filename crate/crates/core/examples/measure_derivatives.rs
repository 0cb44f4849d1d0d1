//! Symmetric and strong derivatives of boundary measures, against normal and
//! non-tangential limits of their extensions.

use boundary_growth::harness::{verify_nl1, verify_nt1, NT_APERTURES};
use boundary_growth::quad::log_grid;
use boundary_growth::{BoundaryMeasure, Dimension};

fn main() -> boundary_growth::Result<()> {
    let n = Dimension::new(3)?;
    let grid = log_grid(1e-2, 1e-5, 10);
    let cases = [
        ("patch", BoundaryMeasure::uniform_patch(n, 1.0, 2.0)?),
        ("atom", BoundaryMeasure::atom_at_origin(n, 1.0)?),
        ("half plane", BoundaryMeasure::patch(n, vec![0.0, -1e7], vec![1e7, 1e7], 1.0)?),
    ];
    for (name, mu) in &cases {
        let nl = verify_nl1(mu, &grid)?;
        let nt = verify_nt1(mu, &NT_APERTURES, &[2.0], &grid)?;
        println!("{name}:");
        println!("    symmetric {:?}, trace {:?}, agree {}", nl.symmetric.status, nl.trace.status, nl.agree);
        println!("    {}", nt.diagnostics);
    }
    Ok(())
}
