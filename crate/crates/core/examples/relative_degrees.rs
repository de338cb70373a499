//! Relative dynamical degrees of a 3-torus automorphism with respect to the
//! fundamental class and to a dominant eigenclass.
use kahlerdyn::cohomology::{torus_action, TorusAutomorphism};
use kahlerdyn::degrees::{dominant_eigenclass, mass_bound_check, relative_degrees, submultiplicativity_check, EigenClass};
use kahlerdyn::matrix::ExactMatrix;

fn main() -> kahlerdyn::error::Result<()> {
    let t = TorusAutomorphism::new(ExactMatrix::from_ints(&[&[0, 0, -1], &[1, 0, 3], &[0, 1, 0]]))?;
    let action = torus_action(&t)?;
    let classes = [EigenClass::fundamental(), dominant_eigenclass(&action, 1, 128)?];
    for class in &classes {
        let rel = relative_degrees(&action, class, 128)?;
        println!("s = {}, λ_T = {:.10}", rel.s, rel.lambda_t.to_f64());
        for p in 1..=rel.max_p() {
            println!("  λ_{p} = {:.10}  (quotient dim {})", rel.degree(p).to_f64(), rel.quotient_dims[p - 1]);
        }
        for p1 in 1..=rel.max_p() {
            for p2 in p1..=rel.max_p() - p1 {
                let r = submultiplicativity_check(&rel, p1, p2, 1e-9)?;
                println!("  λ_{} ≤ λ_{p1} λ_{p2}: {} (margin {:.3e})", p1 + p2, r.holds, r.margin);
            }
        }
        let mass = mass_bound_check(&rel, 1e-9);
        println!("  mass bound {:.6} vs {:.6}: {}", mass.lhs, mass.rhs, mass.holds);
    }
    Ok(())
}
