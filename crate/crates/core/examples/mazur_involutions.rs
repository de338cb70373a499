//! Compositions of the Mazur involutions on a hypersurface of (P¹)³.
use kahlerdyn::cohomology::{mazur_action, mazur_involutions};
use kahlerdyn::degrees::dynamical_degrees;
use kahlerdyn::jordan::eigen_structure;

fn main() -> kahlerdyn::error::Result<()> {
    let model = mazur_involutions(2)?.with_word(vec![1, 2, 3]);
    println!("preserves the intersection form: {}", model.preserves_intersection_form());
    let action = mazur_action(&model)?;
    let j = eigen_structure(&action.blocks[1], 128)?;
    println!("char poly on H^(1,1): {}", j.char_poly);
    let profile = dynamical_degrees(&action, 128)?;
    for (p, d) in profile.degrees.iter().enumerate() {
        println!("d_{p} = {}", d.to_string_radix(10, Some(20)));
    }
    Ok(())
}
