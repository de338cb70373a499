//! Prints the cat-map torus action as a raw-matrix model config.
use kahlerdyn::cohomology::{torus_action, TorusAutomorphism};
use kahlerdyn::config::{raw_model_of, RunConfig};
use kahlerdyn::matrix::ExactMatrix;

fn main() -> kahlerdyn::error::Result<()> {
    let t = TorusAutomorphism::new(ExactMatrix::from_ints(&[&[2, 1], &[1, 1]]))?;
    let action = torus_action(&t)?;
    let mut cfg: RunConfig = kahlerdyn::config::parse_config("")?;
    cfg.model = Some(raw_model_of(&action));
    print!("{}", cfg.to_toml());
    Ok(())
}
