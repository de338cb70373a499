//! Normalized pullbacks of the Kähler class on tori: convergence for the cat
//! map, divergence along subsequences for an automorphism with an irrational
//! rotation among its dominant eigenvalues.
use kahlerdyn::cohomology::{torus_action, TorusAutomorphism};
use kahlerdyn::green::{green_limit_torus, recurrence_machinery};
use kahlerdyn::matrix::ExactMatrix;

fn main() -> kahlerdyn::error::Result<()> {
    let cases = [
        ("cat map", ExactMatrix::from_ints(&[&[2, 1], &[1, 1]])),
        ("x³ + x + 1 companion", ExactMatrix::from_ints(&[&[0, 0, -1], &[1, 0, -1], &[0, 1, 0]])),
    ];
    for (name, a) in cases {
        let t = TorusAutomorphism::new(a)?;
        let rep = green_limit_torus(&t, 120, 20_000, 128)?;
        println!("{name}: mode {:?}, d_1 = {:.10}, m = {}", rep.mode, rep.d1.to_f64(), rep.multiplicity);
        println!("  coefficient eigenvalues {:?}", rep.coefficient_eigenvalues);
        println!("  sample separation {:.4}", rep.sample_separation);
        let rec = recurrence_machinery(&torus_action(&t)?, 128)?;
        println!("  recurrence of order {}: radius matches {}", rec.m, rec.radius_matches);
    }
    Ok(())
}
