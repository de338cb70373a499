use kahlerdyn::arith::{Field, Gq};
use kahlerdyn::cohomology::{mazur_action, mazur_involutions, torus_action, TorusAutomorphism};
use kahlerdyn::degrees::{cesaro_class_limit, cesaro_kernel_basis, check_concavity, dynamical_degrees};
use kahlerdyn::equilibrium::{haar_character_correlation, MixingContext};
use kahlerdyn::jordan::eigen_structure;
use kahlerdyn::matrix::{CMatrix, ExactMatrix};
use proptest::prelude::*;
use rug::{Complex, Float};

const PREC: u32 = 128;

/// Elementary row operations `row_i += c·row_j`, as `(i, j, c)`.
fn elementary_ops(k: usize, gaussian: bool) -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    let coeff = if gaussian { 0..6i64 } else { 0..4i64 };
    proptest::collection::vec((0..k, 0..k, coeff), 2..(3 * k + 3))
}

fn unimodular(k: usize, ops: &[(usize, usize, i64)]) -> ExactMatrix {
    let mut a = ExactMatrix::identity(k);
    for &(i, j, c) in ops {
        if i == j {
            continue;
        }
        let c = match c {
            0 => Gq::int(1),
            1 => Gq::int(-1),
            2 => Gq::int(2),
            3 => Gq::int(-2),
            4 => Gq::i(),
            _ => Gq::gauss(0, -1),
        };
        let row: Vec<Gq> = (0..k).map(|col| a.get(i, col).add(&c.mul(a.get(j, col)))).collect();
        for (col, v) in row.into_iter().enumerate() {
            a.set(i, col, v);
        }
    }
    a
}

fn jordan_sum(blocks: &[(i64, usize)]) -> ExactMatrix {
    let n: usize = blocks.iter().map(|b| b.1).sum();
    let mut j = ExactMatrix::zeros(n, n);
    let mut at = 0;
    for &(ev, size) in blocks {
        for r in 0..size {
            j.set(at + r, at + r, Gq::int(ev));
            if r + 1 < size {
                j.set(at + r, at + r + 1, Gq::one());
            }
        }
        at += size;
    }
    j
}

/// Multiset of eigenvalues, each repeated by its algebraic multiplicity.
fn spectrum(m: &ExactMatrix) -> Vec<Complex> {
    let j = eigen_structure(m, PREC).unwrap();
    j.eigenvalues.iter().flat_map(|e| std::iter::repeat_n(e.value.clone(), j.factors[e.factor].1)).collect()
}

fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    (0..1usize << n).filter(|m| m.count_ones() as usize == p).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
}

fn rho(m: &ExactMatrix) -> f64 {
    eigen_structure(m, PREC).unwrap().spectral_radius.to_f64()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn block_sizes_match_numeric_ranks(
        blocks in proptest::collection::vec((prop_oneof![-2i64..=-1, 1i64..=3], 1usize..=3), 1..=3),
        ops in elementary_ops(6, false),
    ) {
        let j = jordan_sum(&blocks);
        let n = j.rows();
        prop_assume!(n <= 6);
        let p = unimodular(n, &ops.iter().map(|&(i, k, c)| (i % n, k % n, c)).collect::<Vec<_>>());
        let m = p.mul(&j).mul(&p.inverse().unwrap());
        let data = eigen_structure(&m, PREC).unwrap();
        let mc = m.to_complex(None, 256);
        let tol = Float::with_val(256, Float::i_exp(1, -128));
        for e in &data.eigenvalues {
            let shifted = mc.sub(&CMatrix::identity(n, 256).scale(&Complex::with_val(256, &e.value)));
            let mut pw = CMatrix::identity(n, 256);
            let top = e.block_sizes.iter().copied().max().unwrap();
            for s in 1..=top + 1 {
                pw = pw.mul(&shifted);
                let want = n - e.block_sizes.iter().map(|&b| b.min(s)).sum::<usize>();
                prop_assert_eq!(pw.numeric_rank(&tol), want, "eigenvalue {} power {}", e.value, s);
            }
        }
    }

    #[test]
    fn torus_blocks_have_product_spectra(ops in elementary_ops(2, true)) {
        let a = unimodular(2, &ops);
        prop_assume!(a.digit_size() <= 4);
        let action = torus_action(&TorusAutomorphism::new(a.clone()).unwrap()).unwrap();
        let lambdas = spectrum(&a.transpose());
        let k = lambdas.len();
        for p in 0..=k {
            let mut want: Vec<Complex> = Vec::new();
            for i in subsets(k, p) {
                for jj in subsets(k, p) {
                    let mut z = Complex::with_val(PREC, (1, 0));
                    for &x in &i {
                        z *= &lambdas[x];
                    }
                    for &x in &jj {
                        z *= Complex::with_val(PREC, lambdas[x].conj_ref());
                    }
                    want.push(z);
                }
            }
            let got = spectrum(&action.blocks[p]);
            prop_assert_eq!(got.len(), want.len());
            // equal multisets ⇔ equal monic polynomials; compare at deg + 1 points
            for t in 0..=want.len() {
                let z = Complex::with_val(PREC, (2.5, t as f64 * 0.7 - 1.0));
                let ev = |roots: &[Complex]| roots.iter().fold(Complex::with_val(PREC, (1, 0)), |acc, r| acc * Complex::with_val(PREC, &z - r));
                let (g, w) = (ev(&got), ev(&want));
                let scale = Float::with_val(PREC, w.abs_ref()).to_f64().max(1.0);
                let d = Float::with_val(PREC, Complex::with_val(PREC, &g - &w).abs_ref()).to_f64();
                prop_assert!(d <= 1e-20 * scale, "p = {}: polynomial mismatch {}", p, d);
            }
        }
        prop_assert!((rho(&action.blocks[k]) - 1.0).abs() < 1e-30);
    }

    #[test]
    fn torus_entropy_symmetry_and_concavity(ops in elementary_ops(3, true)) {
        let a = unimodular(3, &ops);
        prop_assume!(a.digit_size() <= 4);
        let action = torus_action(&TorusAutomorphism::new(a).unwrap()).unwrap();
        let f = dynamical_degrees(&action, PREC).unwrap();
        let g = dynamical_degrees(&action.inverse().unwrap(), PREC).unwrap();
        let diff = Float::with_val(PREC, &f.entropy - &g.entropy).abs().to_f64();
        prop_assert!(diff <= 1e-9, "entropy {} vs {}", f.entropy, g.entropy);
        prop_assert!(check_concavity(&f).margins.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn mazur_words_and_their_reversals(word in proptest::collection::vec(1usize..=3, 1..=6)) {
        let model = mazur_involutions(2).unwrap();
        let gram = model.gram().unwrap();
        for tau in &model.involutions {
            prop_assert_eq!(tau.transpose().mul(&gram).mul(tau), gram.clone());
        }
        let fwd = mazur_action(&model.clone().with_word(word.clone())).unwrap();
        let rev: Vec<usize> = word.iter().rev().copied().collect();
        let bwd = mazur_action(&model.with_word(rev)).unwrap();
        prop_assert!((rho(&fwd.blocks[1]) - rho(&bwd.blocks[1])).abs() <= 1e-9 * rho(&fwd.blocks[1]));
    }

    #[test]
    fn cesaro_limit_ignores_the_kernel(ops in elementary_ops(2, false), c in -3i64..=3) {
        let a = unimodular(2, &ops);
        prop_assume!(a.digit_size() <= 3);
        let action = torus_action(&TorusAutomorphism::new(a).unwrap()).unwrap();
        let omega = action.kahler_class[1].clone();
        let base = cesaro_class_limit(&action, 1, &omega, 80, 20_000, PREC).unwrap();
        for v in cesaro_kernel_basis(&action, 1, PREC).unwrap() {
            let shifted: Vec<Gq> = omega.iter().zip(&v).map(|(x, y)| x.add(&Gq::int(c).mul(y))).collect();
            let rep = cesaro_class_limit(&action, 1, &shifted, 80, 20_000, PREC).unwrap();
            for (x, y) in base.limit.iter().zip(&rep.limit) {
                let d = Float::with_val(PREC, Complex::with_val(PREC, x - y).abs_ref()).to_f64();
                prop_assert!(d <= 1e-9, "limit moved by {}", d);
            }
        }
    }

    #[test]
    fn character_correlations_are_symmetric_under_inversion(
        ops in elementary_ops(2, true),
        m in proptest::collection::vec(-2i64..=2, 4),
        mp in proptest::collection::vec(-2i64..=2, 4),
    ) {
        prop_assume!(m.iter().any(|&x| x != 0) && mp.iter().any(|&x| x != 0));
        let a = unimodular(2, &ops);
        prop_assume!(a.digit_size() <= 3);
        let t = TorusAutomorphism::new(a).unwrap();
        let f = MixingContext::new(&t, PREC).unwrap();
        let g = MixingContext::new(&t.inverse(), PREC).unwrap();
        let x = haar_character_correlation(&f, &m, &mp, (0, 25)).unwrap();
        let y = haar_character_correlation(&g, &mp, &m, (0, 25)).unwrap();
        prop_assert_eq!(x.values, y.values);
    }
}
