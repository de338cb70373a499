//! Checks the chain of lower bounds that log-concavity imposes on the
//! increasing part of the degree sequence.
use kahlerdyn::cohomology::{torus_action, TorusAutomorphism};
use kahlerdyn::degrees::{degree_chain_check, dynamical_degrees};
use kahlerdyn::matrix::ExactMatrix;

fn main() -> kahlerdyn::error::Result<()> {
    let t = TorusAutomorphism::new(ExactMatrix::from_ints(&[&[3, 1, 0], &[1, 1, 1], &[0, 1, 1]]))?;
    let profile = dynamical_degrees(&torus_action(&t)?, 128)?;
    println!("degrees {:?}", profile.degrees_f64());
    let chain = degree_chain_check(&profile);
    if !chain.applicable {
        println!("not applicable: {}", chain.reason.unwrap_or_default());
        return Ok(());
    }
    for e in &chain.entries {
        println!("s = {}: lower bound {:.6}, holds {}", e.s, e.lower_bound, e.holds);
    }
    Ok(())
}
