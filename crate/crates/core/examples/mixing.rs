//! Correlations of characters and trigonometric polynomials under the cat map.
use kahlerdyn::cohomology::TorusAutomorphism;
use kahlerdyn::equilibrium::{default_resolution, grid_correlation, haar_character_correlation, trig_correlation, MixingContext, TrigPoly};
use kahlerdyn::matrix::ExactMatrix;

fn main() -> kahlerdyn::error::Result<()> {
    let t = TorusAutomorphism::new(ExactMatrix::from_ints(&[&[2, 1], &[1, 1]]))?;
    let ctx = MixingContext::new(&t, 128)?;
    println!("hyperbolic {}, real dimension {}", ctx.hyperbolic, ctx.dim());

    let m = vec![1, 0, 0, 0];
    let rep = haar_character_correlation(&ctx, &m, &[-1, 0, 0, 0], (0, 20))?;
    println!("C_n(χ_m, χ_-m): last coincidence {:?}, escape index {:?} ({:?})", rep.last_coincidence, rep.escape_index, rep.escape);

    let phi = TrigPoly::cosine(vec![1, 1, 0, 0]);
    let psi = TrigPoly::cosine(vec![1, 1, 0, 0]);
    let exact = trig_correlation(&ctx, &phi, &psi, (0, 10))?;
    let grid = grid_correlation(&ctx, &phi, &psi, (0, 10), default_resolution(ctx.dim()))?;
    for (n, (e, g)) in exact.n_values.iter().zip(exact.values.iter().zip(&grid.values)) {
        println!("  n = {n:>2}: exact {:+.6}  grid {:+.6}", e[0], g[0]);
    }
    Ok(())
}
