//! Solves `v = Λ·v∘g + u` on the circle for the Weierstrass-type function
//! `Σ 2⁻ⁿ cos(2π 3ⁿ x)` and estimates its Hölder exponent.
use kahlerdyn::green::{default_scales, holder_exponent_estimate, holder_iteration, smallest_admissible_power, GridValues, IterationSetup, TorusGrid};
use kahlerdyn::matrix::ExactMatrix;
use nalgebra::Complex;

fn main() -> kahlerdyn::error::Result<()> {
    let grid = TorusGrid::new(1, 1 << 14);
    let u = GridValues::sample(grid, |x| vec![Complex::new(0.0, 0.0), Complex::new((std::f64::consts::TAU * x[0]).cos(), 0.0)]);
    let lambda = ExactMatrix::from_ints(&[&[2, 1], &[0, 2]]);
    let setup = IterationSetup::new(vec![vec![3]], u, 1.0, lambda.clone(), 128)?;
    let rep = holder_iteration(&setup, 40, 40, 128)?;
    println!("twisted slope {:.3}, sup |v| = {:.6}", rep.twisted_rate.slope, rep.v.sup_norm());
    let est = holder_exponent_estimate(&rep.v.component(0), &default_scales(grid), Some(setup.admissible_bound()))?;
    println!("Hölder exponent ≈ {:.4} (log 2 / log 3 = {:.4})", est.exponent, 2f64.ln() / 3f64.ln());
    for nu in [0.5, 1.0] {
        match smallest_admissible_power(&ExactMatrix::from_ints(&[&[3]]), setup.lambda(), nu, 64) {
            Ok(p) => println!("ν = {nu}: {p:?}"),
            Err(e) => println!("ν = {nu}: {e}"),
        }
    }
    Ok(())
}
