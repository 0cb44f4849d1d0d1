//! Point sequences approaching the origin: separation, the Beurling sum, and
//! what a lower bound along the sequence says about the mass at the origin.

use boundary_growth::harness::{beurling_report, normal_dyadic_sequence, tangential_sequence};
use boundary_growth::{BoundaryMeasure, Dimension};

fn main() -> boundary_growth::Result<()> {
    let n = Dimension::new(3)?;
    let mu = BoundaryMeasure::atom_at_origin(n, 2.0)?.combine(&BoundaryMeasure::uniform_patch(n, 1.0, 1.0)?)?;
    for (name, seq) in [("normal", normal_dyadic_sequence(n, 20)?), ("tangential", tangential_sequence(n, 20)?)] {
        let r = beurling_report(&seq, &mu, 1.0)?;
        println!("{name}:");
        println!("    separation {:?}", r.separation_index);
        println!("    sum {:?}, last partial {:.4e}", r.sum.classification, r.sum.partial_sums.last().unwrap());
        println!("    min u / K = {:.4e}, hypothesis {}, implication {:?}", r.min_ratio, r.hypothesis_holds, r.implication);
    }
    Ok(())
}
