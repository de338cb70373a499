//! Jordan data of a matrix and the convergence of its normalized powers.
use kahlerdyn::jordan::{eigen_structure, lambda_infinity, power_asymptotics, LimitOptions};
use kahlerdyn::matrix::ExactMatrix;

fn main() -> kahlerdyn::error::Result<()> {
    // J_{2,2} ⊕ (−2): two dominant eigenvalues, the Jordan block dominates.
    let a = ExactMatrix::from_ints(&[&[2, 1, 0], &[0, 2, 0], &[0, 0, -2]]);
    let j = eigen_structure(&a, 128)?;
    println!("char poly {}", j.char_poly);
    println!("lambda = {}, m = {}, theta = {:?}", j.spectral_radius.to_f64(), j.multiplicity, j.theta.iter().map(|t| t.to_f64()).collect::<Vec<_>>());
    for e in &j.eigenvalues {
        println!("  eigenvalue {} blocks {:?}", e.value.to_string_radix(10, Some(8)), e.block_sizes);
    }

    let opts = LimitOptions { n_max: 120, fit_range: (20, 50), validate_range: (51, 120), ..Default::default() };
    let lim = lambda_infinity(&a, &j, &opts)?;
    println!("twisted rate: slope {:.3}, holds {}", lim.twisted_rate.slope, lim.twisted_rate.holds);
    println!("rank of the averaged limit = {}", lim.averaged_rank);

    let ns: Vec<u64> = (20..=120).collect();
    let asym = power_asymptotics(&a, &j, &ns, 20_000)?;
    let (lo, hi, inside) = asym.band_check((20, 50), 0.5);
    println!("‖Aⁿ‖/(n^(m−1) λⁿ) in [{lo:.4}, {hi:.4}]: {inside}");
    Ok(())
}
