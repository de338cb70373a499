use kahlerdyn::arith::{Gq, Poly};
use kahlerdyn::error::Error;
use kahlerdyn::jordan::*;
use kahlerdyn::matrix::{CMatrix, ExactMatrix};
use rug::ops::Pow;
use rug::{Complex, Float};

fn m(rows: &[&[i64]]) -> ExactMatrix {
    ExactMatrix::from_ints(rows)
}

fn poly(v: &[i64]) -> Poly<Gq> {
    Poly::new(v.iter().map(|&x| Gq::int(x)).collect())
}

fn close(a: &CMatrix, expect: &[(f64, f64)], tol: f64) -> bool {
    a.to_f64().iter().zip(expect).all(|(x, y)| (x.0 - y.0).abs() < tol && (x.1 - y.1).abs() < tol)
}

#[test]
fn char_poly_examples() {
    let (cp, fs) = char_poly(&m(&[&[2, 1], &[1, 1]]));
    assert_eq!(cp, poly(&[1, -3, 1]));
    assert_eq!(fs.len(), 1);
    let (cp, fs) = char_poly(&ExactMatrix::identity(3));
    assert_eq!(cp, poly(&[-1, 1]).pow(3));
    assert_eq!(fs, vec![(poly(&[-1, 1]), 3)]);
    let (cp, fs) = char_poly(&m(&[&[0, -2], &[2, 0]]));
    assert_eq!(cp, poly(&[4, 0, 1]));
    assert_eq!(fs.len(), 1, "x^2 + 4 is irreducible over Q");
}

#[test]
fn eigen_structure_examples() {
    let j = eigen_structure(&m(&[&[2, 1], &[0, 2]]), 128).unwrap();
    assert_eq!((j.spectral_radius_f64(), j.multiplicity, j.blocks.len()), (2.0, 2, 1));
    assert_eq!(j.theta_group, ThetaGroup::Trivial);
    assert!(j.theta[0].is_zero());

    let j = eigen_structure(&m(&[&[2, 1], &[1, 1]]), 128).unwrap();
    let golden = (3.0 + 5f64.sqrt()) / 2.0;
    assert!((j.spectral_radius_f64() - golden).abs() < 1e-15);
    assert_eq!((j.multiplicity, j.theta_group), (1, ThetaGroup::Trivial));

    let j = eigen_structure(&m(&[&[0, -2], &[2, 0]]), 128).unwrap();
    assert_eq!((j.spectral_radius_f64(), j.multiplicity, j.nu()), (2.0, 1, 2));
    let mut th: Vec<f64> = j.theta.iter().map(Float::to_f64).collect();
    th.sort_by(f64::total_cmp);
    let pi = std::f64::consts::PI;
    assert!((th[0] - pi / 2.0).abs() < 1e-15 && (th[1] - 3.0 * pi / 2.0).abs() < 1e-15);
    assert_eq!(j.theta_group, ThetaGroup::FiniteCyclic(4));

    assert_eq!(eigen_structure(&m(&[&[1, 2], &[2, 4]]), 128).unwrap_err(), Error::NotInvertible);
}

#[test]
fn gaussian_and_irrational_angles() {
    // eigenvalues 1+2i and 1-2i: equal modulus, ratio not a root of unity
    let j = eigen_structure(&m(&[&[1, -2], &[2, 1]]), 128).unwrap();
    assert_eq!(j.nu(), 2);
    assert_eq!(j.theta_group, ThetaGroup::PositiveDimensional);
    // Gaussian diagonal: 2i and 2 have equal modulus, ratio i
    let a = ExactMatrix::from_rows(vec![vec![Gq::gauss(0, 2), Gq::int(0)], vec![Gq::int(0), Gq::int(2)]]);
    let j = eigen_structure(&a, 128).unwrap();
    assert_eq!(j.theta_group, ThetaGroup::FiniteCyclic(4));
    // (1+i) and (1-i)·i = 1+i ... use 1+i and 1-i: ratio -i
    let b = ExactMatrix::from_rows(vec![vec![Gq::gauss(1, 1), Gq::int(0)], vec![Gq::int(0), Gq::gauss(1, -1)]]);
    let j = eigen_structure(&b, 128).unwrap();
    assert_eq!(j.nu(), 2);
    assert_eq!(j.theta_group, ThetaGroup::FiniteCyclic(8));
}

#[test]
fn exact_tie_between_distinct_factors() {
    // eigenvalues √2 (from x²−2) and the pair ±i√2 (from x²+2): all modulus √2
    let a = m(&[&[0, 2, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -2], &[0, 0, 1, 0]]);
    let j = eigen_structure(&a, 128).unwrap();
    assert_eq!(j.nu(), 4);
    assert_eq!(j.theta_group, ThetaGroup::FiniteCyclic(4));
    // near tie that is not a tie: 3 versus a root of x² − 9x + 1/1000 would be fine,
    // use 2 versus (1+√(1+... )) in the integer world: 2 and √5 − 0.236... are distinct
    let b = m(&[&[2, 0, 0], &[0, 0, 1], &[0, 1, 1]]);
    let j = eigen_structure(&b, 128).unwrap();
    assert_eq!(j.nu(), 1);
}

#[test]
fn power_asymptotics_examples() {
    let j22 = m(&[&[2, 1], &[0, 2]]);
    let mut entry = Vec::new();
    exact_powers(&j22, 30, 10_000, |n, pw| entry.push((n, pw.get(0, 1).clone()))).unwrap();
    for (n, e) in entry {
        assert_eq!(e, Gq::real(rug::Integer::from(n) * rug::Integer::from(2).pow(n as u32 - 1)));
    }
    let id = ExactMatrix::identity(3);
    let j = eigen_structure(&id, 128).unwrap();
    let r = power_asymptotics(&id, &j, &(1..=20).collect::<Vec<_>>(), 10_000).unwrap();
    assert!(r.normalized_norms.iter().all(|v| *v == 1));
    assert_eq!(r.rate_kind, kahlerdyn::rate::RateKind::Exact);

    let cat = m(&[&[2, 1], &[1, 1]]);
    let j = eigen_structure(&cat, 128).unwrap();
    let r = power_asymptotics(&cat, &j, &(10..=60).collect::<Vec<_>>(), 10_000).unwrap();
    assert_eq!(r.rate_kind, kahlerdyn::rate::RateKind::Geometric);
    let (_, _, ok) = r.band_check((10, 60), 0.1);
    assert!(ok);
    // limit of the normalized norm equals the norm of the spectral projector
    let comps = dominant_components(&cat, &j, 128);
    let pnorm = comps[0].projector.norm_inf().to_f64();
    assert!((r.normalized_norms.last().unwrap().to_f64() - pnorm).abs() < 1e-40f64.max(1e-20));

    assert!(matches!(power_asymptotics(&cat, &j, &[2000], 50), Err(Error::Overflow { .. })));
}

#[test]
fn lambda_infinity_examples() {
    let j22 = m(&[&[2, 1], &[0, 2]]);
    let j = eigen_structure(&j22, 128).unwrap();
    let r = lambda_infinity(&j22, &j, &LimitOptions::default()).unwrap();
    assert!(close(&r.lambda_infinity, &[(0.0, 0.0), (0.5, 0.0), (0.0, 0.0), (0.0, 0.0)], 1e-30));
    assert!(r.twisted_rate.holds && r.averaged_rate.holds);
    assert_eq!((r.averaged_rank, r.dim_f_prime), (1, 1));

    let rot = m(&[&[0, -2], &[2, 0]]);
    let j = eigen_structure(&rot, 128).unwrap();
    let r = lambda_infinity(&rot, &j, &LimitOptions { request_plain: true, ..Default::default() }).unwrap();
    assert!(r.averaged.norm_inf() == 0);
    assert_eq!((r.averaged_rank, r.dim_f_prime), (0, 0));
    assert_eq!(r.plain_limits.len(), 4);
    assert!(r.averaged_rate.holds);

    let two = ExactMatrix::identity(3).scale(&Gq::int(2));
    let j = eigen_structure(&two, 128).unwrap();
    let r = lambda_infinity(&two, &j, &LimitOptions::default()).unwrap();
    assert!(r.lambda_infinity.sub(&CMatrix::identity(3, 160)).norm_inf() < 1e-35);
    assert_eq!(r.averaged_rank, 3);

    let irr = m(&[&[1, -2], &[2, 1]]);
    let j = eigen_structure(&irr, 128).unwrap();
    let err = lambda_infinity(&irr, &j, &LimitOptions { request_plain: true, ..Default::default() }).unwrap_err();
    assert_eq!(err, Error::ThetaNotResolved);
    assert!(lambda_infinity(&irr, &j, &LimitOptions::default()).unwrap().twisted_rate.holds);
}

#[test]
fn perron_frobenius_examples() {
    let e = |i: usize| -> Vec<Gq> { (0..2).map(|k| Gq::int(i64::from(k == i))).collect() };
    let quadrant = vec![e(0), e(1)];
    let cat = m(&[&[2, 1], &[1, 1]]);
    let j = eigen_structure(&cat, 128).unwrap();
    let r = perron_frobenius_check(&cat, &j, &quadrant, 1e-20).unwrap();
    assert!(r.nonnegative);
    let v: Vec<f64> = r.eigenvector.iter().map(|z| z.real().to_f64()).collect();
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((v[0] / v[1] - golden).abs() < 1e-14);

    let id = ExactMatrix::identity(2);
    let j = eigen_structure(&id, 128).unwrap();
    let r = perron_frobenius_check(&id, &j, &quadrant, 1e-20).unwrap();
    assert!(r.nonnegative && r.eigenvalue == 1);

    let rot = m(&[&[0, -1], &[1, 0]]);
    let j = eigen_structure(&rot, 128).unwrap();
    assert!(matches!(perron_frobenius_check(&rot, &j, &quadrant, 1e-20), Err(Error::ConeNotPreserved { .. })));

    // a non-simplicial cone in the plane: four generators
    let gens: Vec<Vec<Gq>> = [(1, 0), (0, 1), (1, 1), (2, 1)].iter().map(|&(a, b)| vec![Gq::int(a), Gq::int(b)]).collect();
    let j = eigen_structure(&cat, 128).unwrap();
    assert!(perron_frobenius_check(&cat, &j, &gens, 1e-20).unwrap().nonnegative);
    let _ = Complex::new(64);
}

#[test]
fn rational_factor_splitting_over_gaussian_rationals() {
    // [[R, I], [0, R]] with R the rotation by ±2i: x² + 4 is irreducible over ℚ
    // but not over ℚ(i); each of ±2i carries one block of size 2
    let a = m(&[&[0, -2, 1, 0], &[2, 0, 0, 1], &[0, 0, 0, -2], &[0, 0, 2, 0]]);
    let j = eigen_structure(&a, 128).unwrap();
    assert_eq!((j.multiplicity, j.nu()), (2, 2));
    assert!(j.eigenvalues.iter().all(|e| e.block_sizes == vec![2]));
    let comps = dominant_components(&a, &j, 128);
    assert!(comps.iter().all(|c| c.limit_rank == 1));
    let r = lambda_infinity(&a, &j, &LimitOptions::default()).unwrap();
    assert!(r.twisted_rate.holds && r.averaged_rank == 0);
}
