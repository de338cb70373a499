//! Numerical roots at arbitrary precision (Aberth–Ehrlich iteration in MPFR)
//! and exact real-root counting with Sturm sequences.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use super::gauss::Gq;
use super::poly::Poly;

/// All complex roots (with repetition) of the polynomial with the given
/// coefficients, low degree first. Multiple roots converge only linearly,
/// so their accuracy is roughly `prec / multiplicity` bits.
pub fn complex_roots(coeffs: &[Complex], prec: u32) -> Vec<Complex> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let wp = prec + 32;
    let c: Vec<Complex> = coeffs.iter().map(|z| Complex::with_val(wp, z)).collect();
    if n == 1 {
        return vec![Complex::with_val(prec, -Complex::with_val(wp, &c[0] / &c[1]))];
    }
    let lead = Float::with_val(wp, c[n].abs_ref());
    let mut radius = Float::with_val(wp, 0);
    for a in &c[..n] {
        let r = Float::with_val(wp, a.abs_ref()) / &lead;
        if r > radius {
            radius = r;
        }
    }
    radius += 1;
    let pi = Float::with_val(wp, Constant::Pi);
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            let ang = Float::with_val(wp, 2 * k as u32) * &pi / n as u32 + 0.4f64;
            let r = Float::with_val(wp, &radius) * (0.5f64 + 0.5 * (k as f64 + 1.0) / n as f64);
            Complex::with_val(wp, (Float::with_val(wp, ang.cos_ref()) * &r, Float::with_val(wp, ang.sin_ref()) * &r))
        })
        .collect();
    let eps = Float::with_val(wp, Float::i_exp(1, -(prec as i32 + 8)));
    let mut converged = vec![false; n];
    for _ in 0..(40 * n + 20 * prec as usize) {
        let mut moved = false;
        for k in 0..n {
            if converged[k] {
                continue;
            }
            let (p, dp) = horner_with_derivative(&c, &z[k], wp);
            if p.is_zero() {
                converged[k] = true;
                continue;
            }
            let w = Complex::with_val(wp, &p / &dp);
            let mut s = Complex::new(wp);
            for j in 0..n {
                if j != k {
                    let d = Complex::with_val(wp, &z[k] - &z[j]);
                    if !d.is_zero() {
                        s += d.recip();
                    }
                }
            }
            let denom = Complex::with_val(wp, 1) - Complex::with_val(wp, &w * &s);
            let corr = if denom.is_zero() { w } else { w / denom };
            let size = Float::with_val(wp, corr.abs_ref());
            let scale = Float::with_val(wp, z[k].abs_ref()).max(&Float::with_val(wp, 1));
            z[k] -= &corr;
            if size <= Float::with_val(wp, &eps * &scale) {
                converged[k] = true;
            } else {
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    z.into_iter().map(|x| Complex::with_val(prec, x)).collect()
}

fn horner_with_derivative(c: &[Complex], x: &Complex, wp: u32) -> (Complex, Complex) {
    let mut p = Complex::new(wp);
    let mut dp = Complex::new(wp);
    for a in c.iter().rev() {
        dp *= x;
        dp += &p;
        p *= x;
        p += a;
    }
    (p, dp)
}

/// Newton polishing of an isolated simple root.
pub fn newton_polish(coeffs: &[Complex], root: &Complex, prec: u32, steps: usize) -> Complex {
    let wp = prec + 32;
    let c: Vec<Complex> = coeffs.iter().map(|z| Complex::with_val(wp, z)).collect();
    let mut x = Complex::with_val(wp, root);
    for _ in 0..steps {
        let (p, dp) = horner_with_derivative(&c, &x, wp);
        if dp.is_zero() || p.is_zero() {
            break;
        }
        x -= p / dp;
    }
    Complex::with_val(prec, x)
}

/// Roots of a square-free polynomial over ℚ(i), polished at `prec` bits.
pub fn roots_of(p: &Poly<Gq>, prec: u32) -> Vec<Complex> {
    let coeffs: Vec<Complex> = p.coeffs().iter().map(|a| a.to_complex(prec + 64)).collect();
    complex_roots(&coeffs, prec + 32)
        .iter()
        .map(|r| newton_polish(&coeffs, r, prec, 4))
        .collect()
}

/// Roots of an irreducible `p` over ℚ(i), with the ones that are exactly real
/// (decided by a Sturm count) snapped to the real axis and listed first.
pub fn roots_with_real_flags(p: &Poly<Gq>, prec: u32) -> Vec<(Complex, bool)> {
    let mut roots = roots_of(p, prec);
    let n_real = if p.coeffs().iter().all(Gq::is_real) { count_real_roots(p) } else { 0 };
    roots.sort_by(|a, b| {
        let ia = Float::with_val(prec, a.imag().abs_ref());
        let ib = Float::with_val(prec, b.imag().abs_ref());
        ia.partial_cmp(&ib).expect("finite")
    });
    roots
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            if i < n_real {
                (Complex::with_val(prec, (r.real(), 0)), true)
            } else {
                (r, false)
            }
        })
        .collect()
}

/// Sturm sequence of a polynomial with real rational coefficients.
pub fn sturm_sequence(p: &Poly<Gq>) -> Vec<Poly<Gq>> {
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let r = seq[n - 2].rem(&seq[n - 1]).neg();
        if r.is_zero() {
            break;
        }
        seq.push(r);
    }
    seq
}

fn sign_changes(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn sign_at(p: &Poly<Gq>, x: &Rational) -> i32 {
    p.eval(&Gq::real(x.clone())).re.cmp0() as i32
}

fn sign_at_infinity(p: &Poly<Gq>, positive: bool) -> i32 {
    let s = p.lc().re.cmp0() as i32;
    if positive || p.degree().is_multiple_of(2) {
        s
    } else {
        -s
    }
}

/// Number of distinct real roots in the half-open interval `(a, b]`.
pub fn count_in(seq: &[Poly<Gq>], a: &Rational, b: &Rational) -> usize {
    let va = sign_changes(seq.iter().map(|q| sign_at(q, a)));
    let vb = sign_changes(seq.iter().map(|q| sign_at(q, b)));
    va.saturating_sub(vb)
}

/// Number of distinct real roots.
pub fn count_real_roots(p: &Poly<Gq>) -> usize {
    let seq = sturm_sequence(p);
    let lo = sign_changes(seq.iter().map(|q| sign_at_infinity(q, false)));
    let hi = sign_changes(seq.iter().map(|q| sign_at_infinity(q, true)));
    lo.saturating_sub(hi)
}

/// Cauchy bound: every root has modulus below the returned value.
pub fn cauchy_bound(p: &Poly<Gq>) -> Rational {
    let lc = p.lc().norm_sqr();
    let mut m = Rational::from(0);
    for a in &p.coeffs()[..p.degree()] {
        let r = a.norm_sqr() / &lc;
        if r > m {
            m = r;
        }
    }
    // |a/lc| ≤ max(1, |a/lc|²)
    m.max(Rational::from(1)) + 1
}

/// Disjoint intervals `(lo, hi]`, each containing exactly one real root of
/// the square-free real polynomial `p`, refined to width at most `width`.
pub fn isolate_real_roots(p: &Poly<Gq>, width: &Rational) -> Vec<(Rational, Rational)> {
    let seq = sturm_sequence(p);
    let b = cauchy_bound(p);
    let mut stack = vec![(Rational::from(-&b), b)];
    let mut out = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        let n = count_in(&seq, &lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 && Rational::from(&hi - &lo) <= *width {
            out.push((lo, hi));
            continue;
        }
        let mid: Rational = Rational::from(&lo + &hi) / 2u32;
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// `2^-bits` as a rational.
pub fn dyadic(bits: u32) -> Rational {
    Rational::from((1, rug::Integer::from(2).pow(bits)))
}
