use kahlerdyn::arith::{Field, Gq};
use kahlerdyn::cohomology::*;
use kahlerdyn::error::Error;
use kahlerdyn::jordan::eigen_structure;
use kahlerdyn::matrix::ExactMatrix;

fn m(rows: &[&[i64]]) -> ExactMatrix {
    ExactMatrix::from_ints(rows)
}

fn torus(rows: &[&[i64]]) -> GradedCohomologyAction {
    torus_action(&TorusAutomorphism::new(m(rows)).unwrap()).unwrap()
}

fn rho(a: &ExactMatrix) -> f64 {
    eigen_structure(a, 128).unwrap().spectral_radius_f64()
}

#[test]
fn torus_identity_and_cat_map() {
    let id = torus(&[&[1, 0], &[0, 1]]);
    assert_eq!(id.dims(), vec![1, 4, 1]);
    for b in &id.blocks {
        assert_eq!(*b, ExactMatrix::identity(b.rows()));
    }
    let cat = torus(&[&[2, 1], &[1, 1]]);
    assert_eq!(cat.blocks[1].rows(), 4);
    let golden2 = ((3.0 + 5f64.sqrt()) / 2.0).powi(2);
    assert!((rho(&cat.blocks[1]) - golden2).abs() < 1e-12);
    assert_eq!(cat.blocks[2], m(&[&[1]]));
    // ω² = 2·b[12;12]
    assert_eq!(cat.kahler_class[2], vec![Gq::int(2)]);
    let cup = cat.cup.as_ref().unwrap();
    assert_eq!(cup.power(1, &cat.kahler_class[1], 2), cat.kahler_class[2]);
    check_cup_compatibility(&cat.blocks, cup).unwrap();
}

#[test]
fn torus_rejects_non_units() {
    let a = ExactMatrix::from_rows(vec![vec![Gq::gauss(1, 1), Gq::zero()], vec![Gq::zero(), Gq::one()]]);
    assert!(matches!(TorusAutomorphism::new(a), Err(Error::NotUnitDeterminant { .. })));
    assert!(matches!(TorusAutomorphism::new(m(&[&[2, 0], &[0, 1]])), Err(Error::NotUnitDeterminant { .. })));
    let unit = ExactMatrix::from_rows(vec![vec![Gq::i(), Gq::one()], vec![Gq::zero(), Gq::one()]]);
    assert!(TorusAutomorphism::new(unit).is_ok());
}

#[test]
fn torus_threefold_cup_and_top_degree() {
    let a = m(&[&[0, 0, 1], &[1, 0, -1], &[0, 1, 0]]);
    let act = torus_action(&TorusAutomorphism::new(a).unwrap()).unwrap();
    assert_eq!(act.dims(), vec![1, 9, 9, 1]);
    let cup = act.cup.as_ref().unwrap();
    check_cup_compatibility(&act.blocks, cup).unwrap();
    for p in 2..=3 {
        assert_eq!(cup.power(1, &act.kahler_class[1], p), act.kahler_class[p]);
    }
    assert_eq!(act.blocks[3].get(0, 0).norm_sqr(), 1);
    for (b, f) in act.blocks.iter().zip(act.pushforward_blocks.as_ref().unwrap()) {
        assert_eq!(b.mul(f), ExactMatrix::identity(b.rows()));
    }
}

#[test]
fn mazur_involutions_match_closed_form() {
    for k in 2..=4 {
        let model = mazur_involutions(k).unwrap();
        assert!(model.closed_form_agrees);
        assert_eq!(model.form_preserved, k == 2);
        for (i, t) in model.involutions.iter().enumerate() {
            assert_eq!(t.mul(t), ExactMatrix::identity(k + 1));
            for j in (0..=k).filter(|&j| j != i) {
                let mut e = vec![Gq::zero(); k + 1];
                e[j] = Gq::one();
                assert_eq!(t.mul_vec(&e), e);
            }
        }
    }
    // k = 3: ∫(τ₁*h₁)³ = −48 while h₁³ = 0; 48 = ∫(2H₂+2H₃+2H₄)³ counts the
    // lines contracted by π₁
    let model = mazur_involutions(3).unwrap();
    let img = model.involutions[0].column(0);
    assert_eq!(model.integrate(&[img.clone(), img.clone(), img]), Gq::int(-48));

    let model = mazur_involutions(2).unwrap();
    assert_eq!(model.involutions[0].column(0), vec![Gq::int(-1), Gq::int(2), Gq::int(2)]);
    let g = model.gram().unwrap();
    for t in &model.involutions {
        assert_eq!(t.transpose().mul(&g).mul(t), g);
    }
}

#[test]
fn mazur_words() {
    let model = mazur_involutions(2).unwrap();
    assert_eq!(model.word_matrix(&[1, 1]).unwrap(), ExactMatrix::identity(3));
    assert_eq!(model.word_matrix(&[]).unwrap_err(), Error::EmptyWord);
    let single = mazur_action(&model.clone().with_word(vec![1])).unwrap();
    assert_eq!(single.blocks[1], model.involutions[0]);
    assert_eq!(rho(&single.blocks[1]), 1.0);

    let act = mazur_action(&model.clone().with_word(vec![1, 2, 3])).unwrap();
    assert!(act.sublattice);
    assert_eq!(act.dims(), vec![1, 3, 1]);
    let r = rho(&act.blocks[1]);
    assert!(r > 1.0);
    let rev = model.word_matrix(&[3, 2, 1]).unwrap();
    assert!((rho(&rev) - r).abs() < 1e-15);
    assert_eq!(act.blocks[2].get(0, 0).norm_sqr(), 1);
    check_cup_compatibility(&act.blocks, act.cup.as_ref().unwrap()).unwrap();
    assert_eq!(
        act.cup.as_ref().unwrap().power(1, &act.kahler_class[1], 2),
        act.kahler_class[2],
    );

    for k in 3..=4 {
        let model = mazur_involutions(k).unwrap().with_word((1..=k + 1).collect());
        assert!(matches!(mazur_action(&model), Err(Error::HypothesisViolated(_))));
        assert_eq!(model.word_matrix(&model.word).unwrap().rows(), k + 1);
    }
}

#[test]
fn raw_validation() {
    let ones = RawModel {
        blocks: vec![m(&[&[1]]); 3],
        kahler_class: vec![vec![Gq::one()]; 3],
        pushforward_blocks: None,
        cup: None,
    };
    assert_eq!(raw_action(&ones).unwrap().model_tag, ModelTag::Raw);

    let mut bad = ones.clone();
    bad.kahler_class[1] = vec![Gq::one(), Gq::one()];
    assert!(matches!(raw_action(&bad), Err(Error::DimensionMismatch(_))));
    let mut sing = ones.clone();
    sing.blocks[1] = m(&[&[0]]);
    assert_eq!(raw_action(&sing).unwrap_err(), Error::NotInvertible);

    let cat = torus(&[&[2, 1], &[1, 1]]);
    let back = raw_action(&cat.to_raw()).unwrap();
    assert_eq!(back.blocks, cat.blocks);

    let mut corrupted = cat.to_raw();
    let mut cup = corrupted.cup.take().unwrap();
    cup.insert(1, 0, 1, 3, &[Gq::int(3)]);
    corrupted.cup = Some(cup);
    assert!(matches!(raw_action(&corrupted), Err(Error::CupIncompatible(_))));
}
