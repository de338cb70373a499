//! Dynamical degrees and entropy of the cat map on a complex 2-torus.
use kahlerdyn::cohomology::{torus_action, TorusAutomorphism};
use kahlerdyn::degrees::{check_concavity, dynamical_degrees};
use kahlerdyn::matrix::ExactMatrix;

fn main() -> kahlerdyn::error::Result<()> {
    let t = TorusAutomorphism::new(ExactMatrix::from_ints(&[&[2, 1], &[1, 1]]))?;
    let action = torus_action(&t)?;
    let profile = dynamical_degrees(&action, 128)?;
    for (p, d) in profile.degrees.iter().enumerate() {
        println!("d_{p} = {}", d.to_string_radix(10, Some(30)));
    }
    println!("entropy = {}", profile.entropy.to_string_radix(10, Some(30)));
    println!("concavity margins = {:?}", check_concavity(&profile).margins);

    let inverse = dynamical_degrees(&action.inverse()?, 128)?;
    let k = profile.k;
    for p in 0..=k {
        println!("d_{p}(f⁻¹) = {:.12}  d_{}(f) = {:.12}", inverse.degrees[p].to_f64(), k - p, profile.degrees[k - p].to_f64());
    }
    Ok(())
}
