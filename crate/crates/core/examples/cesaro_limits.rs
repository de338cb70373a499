//! Cesàro limits of classes under pullback, with the class rescaled by the
//! degree.
use kahlerdyn::cohomology::{torus_action, TorusAutomorphism};
use kahlerdyn::degrees::{cesaro_class_limit, cesaro_kernel_basis};
use kahlerdyn::matrix::ExactMatrix;

fn main() -> kahlerdyn::error::Result<()> {
    let t = TorusAutomorphism::new(ExactMatrix::from_ints(&[&[2, 1], &[1, 1]]))?;
    let action = torus_action(&t)?;
    let omega = action.kahler_class[1].clone();
    let rep = cesaro_class_limit(&action, 1, &omega, 150, 20_000, 128)?;
    println!("degree {:.12}, multiplicity {}", rep.degree.to_f64(), rep.multiplicity);
    for z in &rep.limit {
        println!("  {}", z.to_string_radix(10, Some(12)));
    }
    println!("rate slope {:.3}, eigen residual {:.2e}", rep.rate.slope, rep.eigen_residual);
    let kernel = cesaro_kernel_basis(&action, 1, 128)?;
    println!("{} rational classes with vanishing limit", kernel.len());
    Ok(())
}
