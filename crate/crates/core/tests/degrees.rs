use kahlerdyn::arith::{Field, Gq};
use kahlerdyn::cohomology::*;
use kahlerdyn::degrees::*;
use kahlerdyn::error::Error;
use kahlerdyn::matrix::ExactMatrix;

const PREC: u32 = 128;

fn m(rows: &[&[i64]]) -> ExactMatrix {
    ExactMatrix::from_ints(rows)
}

fn torus(rows: &[&[i64]]) -> GradedCohomologyAction {
    torus_action(&TorusAutomorphism::new(m(rows)).unwrap()).unwrap()
}

fn golden2() -> f64 {
    ((3.0 + 5f64.sqrt()) / 2.0).powi(2)
}

#[test]
fn cat_map_degrees() {
    let cat = torus(&[&[2, 1], &[1, 1]]);
    let prof = dynamical_degrees(&cat, PREC).unwrap();
    let d = prof.degrees_f64();
    assert_eq!(d[0], 1.0);
    assert!((d[1] - golden2()).abs() < 1e-12);
    assert!((d[2] - 1.0).abs() < 1e-30);
    assert!((prof.entropy.to_f64() - 2.0 * ((3.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-12);
    assert_eq!(prof.plateau, (1, 1));
    assert_eq!(prof.multiplicities, vec![1, 1, 1]);

    let seq = degree_sequence(&cat, 1, &(1..=40).collect::<Vec<_>>(), 20_000, PREC).unwrap();
    assert!((seq.fitted_limit - golden2()).abs() < 1e-6);
    assert!((seq.roots[39] - golden2()).abs() < 0.1);
}

#[test]
fn identity_torus_is_flat() {
    let id = torus(&[&[1, 0], &[0, 1]]);
    let prof = dynamical_degrees(&id, PREC).unwrap();
    assert_eq!(prof.degrees_f64(), vec![1.0, 1.0, 1.0]);
    assert_eq!(prof.entropy.to_f64(), 0.0);
    assert_eq!(check_concavity(&prof).severity, Severity::None);
    assert!(!degree_chain_check(&prof).applicable);
}

#[test]
fn concavity_examples() {
    let ok = check_concavity(&DegreeProfile::from_degrees(&[1.0, 6.854, 1.0], ModelTag::Raw));
    assert!(ok.concave && ok.ratios_increasing);
    let flat = check_concavity(&DegreeProfile::from_degrees(&[1.0, 1.0, 1.0, 1.0], ModelTag::Raw));
    assert!(flat.concave);
    assert!(flat.margins.iter().all(|&x| x == 0.0));
    let bad = check_concavity(&DegreeProfile::from_degrees(&[1.0, 2.0, 5.0, 1.0], ModelTag::Raw));
    assert!(!bad.concave);
    assert_eq!(bad.violations, vec![1]);
    assert_eq!(bad.severity, Severity::ModelInconsistency);
    assert!((bad.margins[0] - (4.0 - 5.0) / 4.0).abs() < 1e-15);
    let geo = check_concavity(&DegreeProfile::from_degrees(&[1.0, 2.0, 5.0, 1.0], ModelTag::Torus));
    assert_eq!(geo.severity, Severity::ComputationError);
}

#[test]
fn relative_degrees_of_fundamental_class_are_dynamical_degrees() {
    let act = torus(&[&[0, 0, -1], &[1, 0, 3], &[0, 1, 0]]);
    let prof = dynamical_degrees(&act, PREC).unwrap();
    let rel = relative_degrees(&act, &EigenClass::fundamental(), PREC).unwrap();
    assert!(rel.exact);
    for p in 1..=3 {
        let diff = (rel.degree(p).to_f64() - prof.degrees[p].to_f64()).abs();
        assert!(diff < 1e-12 * prof.degrees[p].to_f64(), "p = {p}");
        assert_eq!(rel.kernel_dims[p - 1], 0);
    }
    let sub = submultiplicativity_check(&rel, 1, 1, 1e-9).unwrap();
    assert!(sub.holds);
    let sub = submultiplicativity_check(&rel, 1, 2, 1e-9).unwrap();
    assert!(sub.holds);
    assert!(mass_bound_check(&rel, 1e-9).holds);
}

#[test]
fn relative_degree_of_dominant_class_on_cat_map() {
    let cat = torus(&[&[2, 1], &[1, 1]]);
    let t = dominant_eigenclass(&cat, 1, PREC).unwrap();
    assert!(!t.is_rational());
    assert!((t.eigenvalue_value(PREC).real().to_f64() - golden2()).abs() < 1e-12);
    let rel = relative_degrees(&cat, &t, PREC).unwrap();
    assert_eq!(rel.kernel_dims, vec![3]);
    assert_eq!(rel.quotient_dims, vec![1]);
    assert!((rel.degree(1).to_f64() - 1.0 / golden2()).abs() < 1e-12);
    let mb = mass_bound_check(&rel, 1e-12);
    assert!(mb.holds);
    assert!((mb.lhs - mb.rhs).abs() < 1e-12);

    // T ∪ (f^n)*ω = λ_T^{-n} (T ∪ ω)
    let seq = relative_degree_sequence(&cat, &t, 1, &[5, 10, 20], 20_000, PREC).unwrap();
    let r0 = seq[0].to_f64();
    for (v, n) in seq.iter().zip([5, 10, 20]) {
        assert!((v.to_f64() / r0 * golden2().powi(n - 5) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn relative_degrees_reject_bad_classes() {
    let cat = torus(&[&[2, 1], &[1, 1]]);
    let not_eigen = EigenClass::exact(1, &[Gq::one(), Gq::zero(), Gq::zero(), Gq::zero()], &Gq::one());
    assert!(matches!(relative_degrees(&cat, &not_eigen, PREC), Err(Error::NotEigenclass { .. })));
    let mut raw = cat.to_raw();
    raw.cup = None;
    let no_cup = raw_action(&raw).unwrap();
    assert_eq!(relative_degrees(&no_cup, &EigenClass::fundamental(), PREC).unwrap_err(), Error::CupMissing);
}

#[test]
fn cesaro_limit_of_jordan_block() {
    // f* = [[2,1],[0,2]] on H^{1,1}: (f^n)*(0,1) = (n 2^{n−1}, 2^n), so the
    // normalized orbit tends to (1/2, 0)
    let raw = RawModel {
        blocks: vec![m(&[&[1]]), m(&[&[2, 1], &[0, 2]]), m(&[&[1]])],
        kahler_class: vec![vec![Gq::one()], vec![Gq::zero(), Gq::one()], vec![Gq::one()]],
        pushforward_blocks: None,
        cup: None,
    };
    let act = raw_action(&raw).unwrap();
    let rep = cesaro_class_limit(&act, 1, &[Gq::zero(), Gq::one()], 400, 20_000, PREC).unwrap();
    assert_eq!(rep.multiplicity, 2);
    assert!((rep.limit[0].real().to_f64() - 0.5).abs() < 1e-30);
    assert!(rep.limit[1].real().to_f64().abs() < 1e-30);
    assert!(rep.rate.holds);
    assert!(rep.eigen_residual < 1e-30);

    let zero = cesaro_class_limit(&act, 1, &[Gq::zero(), Gq::zero()], 50, 20_000, PREC).unwrap();
    assert!(zero.limit.iter().all(|z| z.real().is_zero() && z.imag().is_zero()));
}

#[test]
fn cesaro_kernel_is_killed() {
    let cat = torus(&[&[2, 1], &[1, 1]]);
    // rational classes only: the d_1^{-1} eigenvector is irrational
    let ker = cesaro_kernel_basis(&cat, 1, PREC).unwrap();
    assert_eq!(ker.len(), 2);
    for v in &ker {
        let rep = cesaro_class_limit(&cat, 1, v, 60, 20_000, PREC).unwrap();
        assert!(rep.limit.iter().all(|z| z.clone().abs().real().to_f64() < 1e-30));
    }
    let omega = &cat.kahler_class[1];
    let rep = cesaro_class_limit(&cat, 1, omega, 60, 20_000, PREC).unwrap();
    let t = dominant_eigenclass(&cat, 1, PREC).unwrap();
    // the limit is a positive multiple of the dominant eigenclass
    let tv = t.numeric(PREC);
    let i = (0..tv.len()).find(|&i| tv[i].clone().abs().real().to_f64() > 1e-9).unwrap();
    let scale = rep.limit[i].clone() / tv[i].clone();
    assert!(scale.real().to_f64() > 0.0 && scale.imag().to_f64().abs() < 1e-20);
    for (a, b) in rep.limit.iter().zip(&tv) {
        let d = a.clone() - b.clone() * scale.clone();
        assert!(d.abs().real().to_f64() < 1e-20);
    }
}

#[test]
fn degree_chain() {
    let cat = dynamical_degrees(&torus(&[&[2, 1], &[1, 1]]), PREC).unwrap();
    let r = degree_chain_check(&cat);
    assert!(r.applicable && r.holds);
    assert_eq!(r.m, 1);
    assert!((r.entries[0].lower_bound - golden2()).abs() < 1e-9);

    // x³ − 3x + 1: roots −1.879, 1.532, 0.347
    let act = torus(&[&[0, 0, -1], &[1, 0, 3], &[0, 1, 0]]);
    let prof = dynamical_degrees(&act, PREC).unwrap();
    let r = degree_chain_check(&prof);
    assert!(r.applicable && r.holds);
    assert_eq!(r.m, 2);
    let d = prof.degrees_f64();
    assert!(d[1] < d[2] && d[2] > d[3]);
    assert!((r.entries[0].lower_bound - d[2]).abs() < 1e-9);

    let ones = DegreeProfile::from_degrees(&[1.0, 1.0, 1.0], ModelTag::Raw);
    assert!(!degree_chain_check(&ones).applicable);
}
