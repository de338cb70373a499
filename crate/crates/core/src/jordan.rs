//! Spectral analysis of a single invertible linear map: exact Jordan
//! structure, dominant data, normalized power asymptotics and the limit
//! operators `Λ∞` and `π∘Λ∞`.
//!
//! Block sizes come from exact ranks of `(M − α)^j` computed in
//! `K = ℚ(i)[x]/(p)` for each irreducible factor `p` of the characteristic
//! polynomial, so they never depend on a tolerance. Magnitudes and angles are
//! MPFR floats at the requested precision.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use serde::Serialize;

use crate::arith::factor::{cyclotomic, euler_phi, factor, Domain};
use crate::arith::roots::{self, dyadic, isolate_real_roots, roots_with_real_flags};
use crate::arith::{Field, Gq, NfElem, NumberField, Poly};
use crate::error::{Error, Result};
use crate::lp;
use crate::matrix::{CMatrix, ExactMatrix, Matrix};
use crate::rate::{fit_rate, RateFit, RateKind};

pub const DEFAULT_PRECISION: u32 = 128;
pub const DEFAULT_DIGIT_BUDGET: usize = 20_000;

/// Deviations below this level are rounding noise at `prec` bits.
pub fn rounding_floor(prec: u32) -> f64 {
    2f64.powi(-(prec as i32 - 24).min(1000))
}

/// Closed subgroup of the angle torus generated by the dominant direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ThetaGroup {
    Trivial,
    FiniteCyclic(u64),
    PositiveDimensional,
}

#[derive(Debug, Clone)]
pub struct Eigenvalue {
    /// Index into [`JordanData::factors`].
    pub factor: usize,
    pub value: Complex,
    pub modulus: Float,
    pub is_real: bool,
    /// Jordan block sizes, largest first.
    pub block_sizes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct JordanBlock {
    /// Index into [`JordanData::eigenvalues`].
    pub eigenvalue: usize,
    pub value: Complex,
    pub size: usize,
}

#[derive(Debug, Clone)]
pub struct JordanData {
    pub dim: usize,
    pub precision: u32,
    pub char_poly: Poly<Gq>,
    pub domain: Domain,
    /// Monic irreducible factors of the characteristic polynomial with multiplicities.
    pub factors: Vec<(Poly<Gq>, usize)>,
    pub eigenvalues: Vec<Eigenvalue>,
    /// Sorted by decreasing `(|λ_i|, m_i)`; dominant blocks come first.
    pub blocks: Vec<JordanBlock>,
    pub spectral_radius: Float,
    pub multiplicity: usize,
    pub dominant_indices: Vec<usize>,
    /// Distinct eigenvalues carrying a dominant block.
    pub dominant_eigenvalues: Vec<usize>,
    /// One angle in `[0, 2π)` per dominant block.
    pub theta: Vec<Float>,
    /// Order of `exp(iθ_j)` when it is a root of unity.
    pub theta_orders: Vec<Option<u64>>,
    pub theta_group: ThetaGroup,
}

impl JordanData {
    pub fn nu(&self) -> usize {
        self.dominant_indices.len()
    }

    /// `dim F'`: dominant blocks whose eigenvalue equals the spectral radius.
    pub fn strictly_dominant_dim(&self) -> usize {
        self.theta_orders.iter().filter(|o| **o == Some(1)).count()
    }

    pub fn eigenvalue_of_block(&self, b: usize) -> &Eigenvalue {
        &self.eigenvalues[self.blocks[b].eigenvalue]
    }

    /// Angle and root-of-unity order for a dominant distinct eigenvalue.
    pub fn theta_of_eigenvalue(&self, ev: usize) -> (Float, Option<u64>) {
        let pos = self
            .dominant_indices
            .iter()
            .position(|&b| self.blocks[b].eigenvalue == ev)
            .expect("dominant eigenvalue");
        (self.theta[pos].clone(), self.theta_orders[pos])
    }

    pub fn spectral_radius_f64(&self) -> f64 {
        self.spectral_radius.to_f64()
    }
}

/// Characteristic polynomial and its factorization over ℚ (real input) or ℚ(i).
pub fn char_poly(m: &ExactMatrix) -> (Poly<Gq>, Vec<(Poly<Gq>, usize)>) {
    let cp = m.char_poly();
    let fs = factor(&cp, Domain::of(m.entries()));
    (cp, fs)
}

pub fn companion(p: &Poly<Gq>) -> ExactMatrix {
    let p = p.monic();
    let d = p.degree();
    let mut c = ExactMatrix::zeros(d, d);
    for i in 0..d {
        if i + 1 < d {
            c.set(i + 1, i, Gq::one());
        }
        c.set(i, d - 1, p.coeff(i).neg());
    }
    c
}

fn lift(m: &ExactMatrix) -> Matrix<NfElem> {
    m.map(NfElem::from_gq)
}

/// The factor of `p` over ℚ(i) having `root` as a root (any factor when
/// `root` is `None`). A factor over ℚ such as `x² + 4` splits over ℚ(i), and
/// `ℚ(i)[x]/(p)` is only a field when `p` stays irreducible there.
pub fn residue_modulus(p: &Poly<Gq>, root: Option<&Complex>) -> Poly<Gq> {
    if p.degree() < 2 || !p.coeffs().iter().all(Gq::is_real) {
        return p.clone();
    }
    let fs = factor(p, Domain::GaussianRationals);
    if fs.len() == 1 {
        return p.clone();
    }
    match root {
        None => fs[0].0.clone(),
        Some(z) => {
            let prec = z.prec().0;
            fs.into_iter()
                .map(|(g, _)| {
                    let v = Float::with_val(prec, g.eval_complex(z, None, prec).abs_ref());
                    (v, g)
                })
                .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"))
                .expect("nonempty")
                .1
        }
    }
}

/// `M − α I` over `K = ℚ(i)[x]/(p)` with `α` the class of `x`; `p` must be
/// irreducible over ℚ(i).
fn shifted_over_field(m: &ExactMatrix, p: &Poly<Gq>) -> Matrix<NfElem> {
    let k = NumberField::new(p);
    let a = k.generator();
    let n = m.rows();
    lift(m).sub(&Matrix::<NfElem>::identity(n).scale(&a))
}

/// Jordan block sizes of any root of the irreducible factor `p`, which
/// divides the characteristic polynomial exactly `e` times.
pub fn block_sizes(m: &ExactMatrix, p: &Poly<Gq>, e: usize) -> Vec<usize> {
    if e == 1 {
        return vec![1];
    }
    let n = m.rows();
    let b = shifted_over_field(m, &residue_modulus(p, None));
    let mut nullity = vec![0usize];
    let mut pw = b.clone();
    loop {
        let null = n - pw.rank();
        nullity.push(null);
        if null >= e {
            break;
        }
        pw = pw.mul(&b);
    }
    let ge: Vec<usize> = (1..nullity.len()).map(|j| nullity[j] - nullity[j - 1]).collect();
    let mut sizes = Vec::new();
    for j in (1..=ge.len()).rev() {
        let exactly = ge[j - 1] - ge.get(j).copied().unwrap_or(0);
        sizes.extend(std::iter::repeat_n(j, exactly));
    }
    sizes
}

fn two_pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi) * 2u32
}

fn angle(z: &Complex, prec: u32) -> Float {
    let mut a = Float::with_val(prec, z.arg_ref());
    if a.is_sign_negative() && !a.is_zero() {
        a += two_pi(prec);
    }
    if a.is_zero() {
        a = Float::with_val(prec, 0);
    }
    a
}

fn real_part_poly(p: &Poly<Gq>) -> Poly<Gq> {
    debug_assert!(p.coeffs().iter().all(Gq::is_real));
    p.clone()
}

/// Exact decision of `|a| = |b|` for algebraic `a`, `b` given as roots of
/// irreducible factors: `|a|²` is a real root of `charpoly(C_a ⊗ C̄_a)`,
/// and equality holds iff both squares are the same root of the gcd of the
/// two such polynomials, which is located by Sturm isolation.
fn moduli_equal(pa: &Poly<Gq>, a: &Complex, pb: &Poly<Gq>, b: &Complex, prec: u32) -> bool {
    let ca = companion(pa);
    let cb = companion(pb);
    let qa = real_part_poly(&ca.kron(&ca.conj()).char_poly());
    let qb = if pa == pb { qa.clone() } else { real_part_poly(&cb.kron(&cb.conj()).char_poly()) };
    let g = qa.gcd(&qb);
    if g.degree() == 0 {
        return false;
    }
    let h = g.squarefree_part();
    let width = dyadic(prec / 2);
    let intervals = isolate_real_roots(&h, &width);
    let va = Float::with_val(prec, a.abs_ref()).square();
    let vb = Float::with_val(prec, b.abs_ref()).square();
    let locate = |v: &Float| -> Option<usize> {
        let vq = v.to_rational().expect("finite");
        let slack = Rational::from(&width * 4u32);
        intervals.iter().position(|(lo, hi)| {
            Rational::from(lo - &slack) <= vq && vq <= Rational::from(hi + &slack)
        })
    };
    match (locate(&va), locate(&vb)) {
        (Some(i), Some(j)) => i == j,
        _ => false,
    }
}

/// Order of `ρ = λ_j / conj(λ_j)` as a root of unity. `ρ` has degree at most
/// `d²` over ℚ(i), so any order `N` satisfies `φ(N) ≤ 2d²`; these are screened
/// numerically and a surviving candidate is confirmed exactly by finding the
/// minimal polynomial `q` of `ρ` among the factors of `charpoly(C ⊗ C̄⁻¹)`
/// and testing `q | Φ_N`.
fn rho_order(p: &Poly<Gq>, root: &Complex, prec: u32) -> Option<u64> {
    let wp = prec + 64;
    let rho = Complex::with_val(wp, root / Complex::with_val(wp, root.conj_ref()));
    let d = p.degree() as u64;
    let max_phi = 2 * d * d;
    let bound = 2 * max_phi * max_phi + 2;
    let tol = Float::with_val(wp, Float::i_exp(1, -(prec as i32) / 2));
    let mut z = Complex::with_val(wp, (1, 0));
    let mut candidate = None;
    for n in 1..=bound {
        z *= &rho;
        if euler_phi(n) > max_phi {
            continue;
        }
        let dist = Float::with_val(wp, Complex::with_val(wp, &z - 1u32).abs_ref());
        if dist < tol {
            candidate = Some(n);
            break;
        }
    }
    let n = candidate?;
    let c = companion(p);
    let r = c.kron(&c.conj().inverse().expect("invertible companion")).char_poly();
    let domain = Domain::of(r.coeffs());
    let mut best: Option<(Float, Poly<Gq>)> = None;
    for (q, _) in factor(&r, domain) {
        for w in roots::roots_of(&q, prec) {
            let dist = Float::with_val(prec, Complex::with_val(prec, &w - &rho).abs_ref());
            if best.as_ref().is_none_or(|(bd, _)| dist < *bd) {
                best = Some((dist, q.clone()));
            }
        }
    }
    let (_, q) = best.expect("ρ is a root of R");
    cyclotomic(n).rem(&q).is_zero().then_some(n)
}

fn unit_root_order(zeta: &Complex, candidates: u64, prec: u32) -> u64 {
    let divisors = (1..=candidates).filter(|d| candidates.is_multiple_of(*d));
    for d in divisors {
        let z = Complex::with_val(prec, zeta).pow(d as u32);
        let dist = Float::with_val(prec, Complex::with_val(prec, &z - 1u32).abs_ref());
        if dist < 1e-6 {
            return d;
        }
    }
    candidates
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Jordan structure with dominant data, at `prec` bits.
pub fn eigen_structure(m: &ExactMatrix, prec: u32) -> Result<JordanData> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", m.rows(), m.cols())));
    }
    if m.det().is_zero() {
        return Err(Error::NotInvertible);
    }
    let wp = prec + 64;
    let (cp, factors) = char_poly(m);
    let mut eigenvalues = Vec::new();
    for (fi, (p, e)) in factors.iter().enumerate() {
        let sizes = block_sizes(m, p, *e);
        for (z, is_real) in roots_with_real_flags(p, wp) {
            let modulus = Float::with_val(wp, z.abs_ref());
            eigenvalues.push(Eigenvalue { factor: fi, value: z, modulus, is_real, block_sizes: sizes.clone() });
        }
    }

    // top modulus class, ties resolved exactly
    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eigenvalues[b].modulus.partial_cmp(&eigenvalues[a].modulus).expect("finite"));
    let top = order[0];
    let tie = Float::with_val(wp, &eigenvalues[top].modulus) * Float::with_val(wp, Float::i_exp(1, -64));
    let mut top_class = vec![top];
    for &i in &order[1..] {
        let diff = Float::with_val(wp, &eigenvalues[top].modulus - &eigenvalues[i].modulus);
        if diff > tie {
            break;
        }
        let (pa, pb) = (&factors[eigenvalues[top].factor].0, &factors[eigenvalues[i].factor].0);
        let conj_gap: Complex = Complex::with_val(wp, eigenvalues[i].value.conj_ref()) - &eigenvalues[top].value;
        let conj_pair = eigenvalues[top].factor == eigenvalues[i].factor
            && pa.coeffs().iter().all(Gq::is_real)
            && Float::with_val(wp, conj_gap.abs_ref()) < tie;
        if conj_pair || moduli_equal(pa, &eigenvalues[top].value, pb, &eigenvalues[i].value, wp) {
            top_class.push(i);
        }
    }
    let multiplicity = top_class.iter().map(|&i| eigenvalues[i].block_sizes[0]).max().expect("nonempty");

    // blocks: top class first by size, then everything else
    let mut blocks = Vec::new();
    let mut top_sorted = top_class.clone();
    top_sorted.sort_by(|&a, &b| {
        angle(&eigenvalues[a].value, wp).partial_cmp(&angle(&eigenvalues[b].value, wp)).expect("finite")
    });
    let mut head: Vec<JordanBlock> = Vec::new();
    for &i in &top_sorted {
        for &s in &eigenvalues[i].block_sizes {
            head.push(JordanBlock { eigenvalue: i, value: eigenvalues[i].value.clone(), size: s });
        }
    }
    head.sort_by(|a, b| b.size.cmp(&a.size));
    blocks.extend(head);
    let mut tail: Vec<JordanBlock> = Vec::new();
    for (i, ev) in eigenvalues.iter().enumerate() {
        if top_class.contains(&i) {
            continue;
        }
        for &s in &ev.block_sizes {
            tail.push(JordanBlock { eigenvalue: i, value: ev.value.clone(), size: s });
        }
    }
    tail.sort_by(|a, b| {
        let ma = &eigenvalues[a.eigenvalue].modulus;
        let mb = &eigenvalues[b.eigenvalue].modulus;
        mb.partial_cmp(ma).expect("finite").then(b.size.cmp(&a.size))
    });
    blocks.extend(tail);
    let dominant_indices: Vec<usize> =
        (0..blocks.len()).filter(|&b| top_class.contains(&blocks[b].eigenvalue) && blocks[b].size == multiplicity).collect();
    let mut dominant_eigenvalues: Vec<usize> = dominant_indices.iter().map(|&b| blocks[b].eigenvalue).collect();
    dominant_eigenvalues.dedup();

    // spectral radius: prefer a real positive dominant eigenvalue when present
    let spectral_radius = dominant_eigenvalues
        .iter()
        .find(|&&i| eigenvalues[i].is_real && eigenvalues[i].value.real().is_sign_positive())
        .map(|&i| eigenvalues[i].modulus.clone())
        .unwrap_or_else(|| eigenvalues[dominant_eigenvalues[0]].modulus.clone());

    let mut theta = Vec::new();
    let mut theta_orders = Vec::new();
    let mut cache: Vec<(usize, Float, Option<u64>)> = Vec::new();
    for &b in &dominant_indices {
        let i = blocks[b].eigenvalue;
        if let Some((_, t, o)) = cache.iter().find(|c| c.0 == i) {
            theta.push(t.clone());
            theta_orders.push(*o);
            continue;
        }
        let ev = &eigenvalues[i];
        let (t, o) = if ev.is_real {
            if ev.value.real().is_sign_positive() {
                (Float::with_val(wp, 0), Some(1))
            } else {
                (Float::with_val(wp, Constant::Pi), Some(2))
            }
        } else {
            let t = angle(&ev.value, wp);
            let o = rho_order(&factors[ev.factor].0, &ev.value, wp).map(|n| {
                let zeta = Complex::with_val(wp, &ev.value / &spectral_radius);
                unit_root_order(&zeta, 2 * n, wp)
            });
            (t, o)
        };
        cache.push((i, t.clone(), o));
        theta.push(t);
        theta_orders.push(o);
    }
    let theta_group = if theta_orders.iter().all(|o| *o == Some(1)) {
        ThetaGroup::Trivial
    } else if theta_orders.iter().all(Option::is_some) {
        ThetaGroup::FiniteCyclic(theta_orders.iter().map(|o| o.expect("some")).fold(1, lcm))
    } else {
        ThetaGroup::PositiveDimensional
    };

    let round = |z: &Complex| Complex::with_val(prec, z);
    let eigenvalues = eigenvalues
        .into_iter()
        .map(|e| Eigenvalue { value: round(&e.value), modulus: Float::with_val(prec, &e.modulus), ..e })
        .collect();
    let blocks = blocks.into_iter().map(|b| JordanBlock { value: round(&b.value), ..b }).collect();
    Ok(JordanData {
        dim: m.rows(),
        precision: prec,
        char_poly: cp,
        domain: Domain::of(m.entries()),
        factors,
        eigenvalues,
        blocks,
        spectral_radius: Float::with_val(prec, spectral_radius),
        multiplicity,
        dominant_indices,
        dominant_eigenvalues,
        theta: theta.into_iter().map(|t| Float::with_val(prec, t)).collect(),
        theta_orders,
        theta_group,
    })
}

/// Projector onto the generalized eigenspace of the roots of `p` (along the
/// other generalized eigenspaces) and the nilpotent part `N = (M − α)P`,
/// both exact over `K = ℚ(i)[x]/(p)`. `p` must be irreducible over ℚ(i);
/// see [`residue_modulus`].
pub fn exact_spectral_pieces(m: &ExactMatrix, p: &Poly<Gq>, e: usize) -> (Matrix<NfElem>, Matrix<NfElem>) {
    let n = m.rows();
    let b = shifted_over_field(m, p);
    let be = b.pow(e as u64);
    let mut cols = be.kernel();
    debug_assert_eq!(cols.len(), e);
    cols.extend(be.image());
    let s = Matrix::from_columns(&cols);
    let s_inv = s.inverse().expect("generalized eigenspaces span");
    let d: Vec<NfElem> = (0..n).map(|i| if i < e { NfElem::one() } else { NfElem::zero() }).collect();
    let proj = s.mul(&Matrix::diagonal(&d)).mul(&s_inv);
    let nil = b.mul(&proj);
    (proj, nil)
}

/// `N^{k} P v` for the same `P` and `N` as [`exact_spectral_pieces`], without
/// forming `P`: with `R`, `L` spanning the right and left kernels of
/// `(M − α)^e`, `P = R (LᵀR)⁻¹ Lᵀ`.
/// A simple root uses `P = adj(α − M)/χ'(α)` and no elimination.
pub fn exact_spectral_apply(m: &ExactMatrix, p: &Poly<Gq>, e: usize, k: usize, v: &[NfElem]) -> Vec<NfElem> {
    let b = shifted_over_field(m, p);
    if e == 1 {
        if k > 0 {
            return vec![NfElem::zero(); v.len()];
        }
        let field = NumberField::new(p);
        let alpha = field.generator();
        let chi = m.char_poly();
        let c = chi.coeffs();
        let n = m.rows();
        let lm = lift(m);
        let mut powers = vec![v.to_vec()];
        for i in 1..n {
            powers.push(lm.mul_vec(&powers[i - 1]));
        }
        let mut acc = vec![NfElem::zero(); n];
        for j in (0..n).rev() {
            let mut bj = vec![NfElem::zero(); n];
            for (i, pw) in powers.iter().enumerate().take(n - j) {
                let coef = NfElem::from_gq(&c[i + j + 1]);
                for (x, y) in bj.iter_mut().zip(pw) {
                    *x = x.add(&coef.mul(y));
                }
            }
            acc = acc.iter().zip(&bj).map(|(a, y)| a.mul(&alpha).add(y)).collect();
        }
        let d = NfElem::from_poly(&field, chi.derivative().rem(p));
        let inv = d.inv().expect("simple root");
        return acc.iter().map(|x| x.mul(&inv)).collect();
    }
    let be = b.pow(e as u64);
    let r = Matrix::from_columns(&be.kernel());
    let l = Matrix::from_columns(&be.transpose().kernel());
    let lt = l.transpose();
    let c = lt.mul(&r).solve(&lt.mul_vec(v)).expect("generalized eigenspaces span");
    let mut out = r.mul_vec(&c);
    for _ in 0..k {
        out = b.mul_vec(&out);
    }
    out
}

/// Per-dominant-eigenvalue data of the limit operator.
#[derive(Debug, Clone)]
pub struct DominantComponent {
    pub eigenvalue: usize,
    pub value: Complex,
    pub theta: Float,
    pub order: Option<u64>,
    /// Spectral projector `P_j`.
    pub projector: CMatrix,
    /// `λ_j^{-(m-1)}/(m-1)! · N_j^{m-1} P_j`.
    pub limit: CMatrix,
    /// Exact rank of `N_j^{m-1} P_j`.
    pub limit_rank: usize,
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Components of `Λ∞` at precision `prec`.
pub fn dominant_components(m: &ExactMatrix, j: &JordanData, prec: u32) -> Vec<DominantComponent> {
    let mm = j.multiplicity;
    let mut out = Vec::new();
    let mut done_factors: Vec<(Poly<Gq>, Matrix<NfElem>, Matrix<NfElem>, usize)> = Vec::new();
    for &ev in &j.dominant_eigenvalues {
        let e = &j.eigenvalues[ev];
        let (p, mult) = &j.factors[e.factor];
        let g = residue_modulus(p, Some(&e.value));
        if !done_factors.iter().any(|d| d.0 == g) {
            let (proj, nil) = exact_spectral_pieces(m, &g, *mult);
            let top = if mm > 1 { nil.pow(mm as u64 - 1).mul(&proj) } else { proj.clone() };
            let rank = top.rank();
            done_factors.push((g.clone(), proj, top, rank));
        }
        let (_, proj, top, rank) = done_factors.iter().find(|d| d.0 == g).expect("computed");
        let gen = Complex::with_val(prec + 32, &e.value);
        let p_num = proj.to_complex(Some(&gen), prec + 32);
        let top_num = top.to_complex(Some(&gen), prec + 32);
        let scale = gen.clone().pow(-(mm as i32 - 1)) / factorial(mm - 1);
        let (theta, order) = j.theta_of_eigenvalue(ev);
        out.push(DominantComponent {
            eigenvalue: ev,
            value: e.value.clone(),
            theta,
            order,
            projector: p_num,
            limit: top_num.scale(&scale),
            limit_rank: *rank,
        });
    }
    out
}

/// `Σ_j exp(iθ'_j) L_j`: the subsequential limit of `Λ_n` along `nθ → θ'`.
pub fn subsequential_limit(components: &[DominantComponent], theta_prime: &[Float], dim: usize, prec: u32) -> CMatrix {
    let mut acc = CMatrix::zeros(dim, dim, prec + 32);
    for (c, t) in components.iter().zip(theta_prime) {
        let phase = Complex::with_val(prec + 32, (Float::with_val(prec + 32, t.cos_ref()), Float::with_val(prec + 32, t.sin_ref())));
        acc = acc.add(&c.limit.scale(&phase));
    }
    acc
}

/// Iterates exact powers `M^n`, `n = 1..=n_max`, enforcing the digit budget.
pub fn exact_powers(m: &ExactMatrix, n_max: u64, budget: usize, mut visit: impl FnMut(u64, &ExactMatrix)) -> Result<()> {
    let mut pw = m.clone();
    for n in 1..=n_max {
        if n > 1 {
            pw = pw.mul(m);
        }
        let digits = pw.digit_size();
        if digits > budget {
            return Err(Error::Overflow { digits, budget });
        }
        visit(n, &pw);
    }
    Ok(())
}

/// Normalized power `M^n / (n^{m-1} λ^n)` at `prec` bits.
pub fn normalized_power(pw: &ExactMatrix, n: u64, j: &JordanData, prec: u32) -> CMatrix {
    let lam = Float::with_val(prec, &j.spectral_radius);
    let denom = Float::with_val(prec, lam.pow(n as u32)) * Float::with_val(prec, n).pow(j.multiplicity as u32 - 1);
    let inv = Complex::with_val(prec, denom.recip());
    pw.to_complex(None, prec).scale(&inv)
}

/// Applies the twist `exp(-inθ)` to the dominant components of `L`.
pub fn twist(l: &CMatrix, n: u64, components: &[DominantComponent], prec: u32) -> CMatrix {
    let dim = l.rows;
    let mut rest = CMatrix::identity(dim, prec);
    let mut acc = CMatrix::zeros(dim, dim, prec);
    for c in components {
        let t = Float::with_val(prec, &c.theta) * n;
        let phase = Complex::with_val(prec, (Float::with_val(prec, t.cos_ref()), -Float::with_val(prec, t.sin_ref())));
        let piece = c.projector.mul(l);
        acc = acc.add(&piece.scale(&phase));
        rest = rest.sub(&c.projector);
    }
    acc.add(&rest.mul(l))
}

#[derive(Debug, Clone)]
pub struct AsymptoticReport {
    pub n_values: Vec<u64>,
    /// `‖M^n‖ / (n^{m-1} λ^n)`.
    pub normalized_norms: Vec<Float>,
    /// `‖exp(-inθ)Λ_n − Λ∞‖`.
    pub deviations: Vec<Float>,
    /// Log-log slope of the deviations.
    pub fitted_rate: f64,
    pub rate_kind: RateKind,
}

impl AsymptoticReport {
    /// Band `[c₁, c₂]` from the normalized norms with `n` in `band_range`,
    /// widened by `inflate` (relative), and whether every reported value lies inside.
    pub fn band_check(&self, band_range: (u64, u64), inflate: f64) -> (f64, f64, bool) {
        let vals: Vec<f64> = self
            .n_values
            .iter()
            .zip(&self.normalized_norms)
            .filter(|(n, _)| **n >= band_range.0 && **n <= band_range.1)
            .map(|(_, v)| v.to_f64())
            .collect();
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min) * (1.0 - inflate);
        let hi = vals.iter().cloned().fold(0.0, f64::max) * (1.0 + inflate);
        let ok = lo > 0.0 && self.normalized_norms.iter().all(|v| v.to_f64() >= lo && v.to_f64() <= hi);
        (lo, hi, ok)
    }
}

/// Normalized norms of exact powers over `n_values` (ascending).
pub fn power_asymptotics(m: &ExactMatrix, j: &JordanData, n_values: &[u64], budget: usize) -> Result<AsymptoticReport> {
    if n_values.is_empty() {
        return Err(Error::Invalid("empty n range".into()));
    }
    let prec = j.precision;
    let components = dominant_components(m, j, prec);
    let lim = subsequential_limit(&components, &vec![Float::with_val(prec, 0); components.len()], m.rows(), prec);
    let n_max = *n_values.iter().max().expect("nonempty");
    let mut norms = Vec::new();
    let mut devs = Vec::new();
    exact_powers(m, n_max, budget, |n, pw| {
        if n_values.contains(&n) {
            let ln = normalized_power(pw, n, j, prec + 32);
            norms.push(Float::with_val(prec, ln.norm_inf()));
            devs.push(Float::with_val(prec, twist(&ln, n, &components, prec + 32).sub(&lim).norm_inf()));
        }
    })?;
    let mut ns: Vec<u64> = n_values.to_vec();
    ns.sort_unstable();
    let devs_f: Vec<f64> = devs.iter().map(Float::to_f64).collect();
    let fit = fit_rate(&ns, &devs_f, (ns[0], ns[ns.len() - 1]), (ns[0], ns[ns.len() - 1]), false, rounding_floor(prec));
    Ok(AsymptoticReport { n_values: ns, normalized_norms: norms, deviations: devs, fitted_rate: fit.slope, rate_kind: fit.kind })
}

#[derive(Debug, Clone, Copy)]
pub struct LimitOptions {
    pub n_max: u64,
    pub fit_range: (u64, u64),
    pub validate_range: (u64, u64),
    /// Ask for plain (untwisted) limits along residue classes.
    pub request_plain: bool,
    pub digit_budget: usize,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions { n_max: 200, fit_range: (20, 50), validate_range: (51, 200), request_plain: false, digit_budget: DEFAULT_DIGIT_BUDGET }
    }
}

#[derive(Debug, Clone)]
pub struct LimitReport {
    pub lambda_infinity: CMatrix,
    /// `π∘Λ∞`, the limit of the Cesàro means `Λ'_N`.
    pub averaged: CMatrix,
    pub averaged_rank: usize,
    pub dim_f_prime: usize,
    pub components: Vec<DominantComponent>,
    pub n_values: Vec<u64>,
    pub twisted_deviation: Vec<f64>,
    pub averaged_deviation: Vec<f64>,
    pub twisted_rate: RateFit,
    pub averaged_rate: RateFit,
    /// Plain limits along `n ≡ r (mod |Θ|)`, when requested and Θ is finite.
    pub plain_limits: Vec<CMatrix>,
    pub warnings: Vec<String>,
}

/// `Λ∞`, `π∘Λ∞` and the measured `O(1/n)` and `O(log N/N)` deviations.
pub fn lambda_infinity(m: &ExactMatrix, j: &JordanData, opts: &LimitOptions) -> Result<LimitReport> {
    let prec = j.precision;
    let wp = prec + 32;
    let mut warnings = Vec::new();
    if j.spectral_radius < 1 {
        return Err(Error::HypothesisViolated("spectral radius < 1".into()));
    }
    if j.spectral_radius == 1 {
        warnings.push("spectral radius is 1: the averaged error rate is not meaningful".to_string());
    }
    if opts.request_plain && j.theta_group == ThetaGroup::PositiveDimensional {
        return Err(Error::ThetaNotResolved);
    }
    let dim = m.rows();
    let components = dominant_components(m, j, prec);
    let zero_angles = vec![Float::with_val(prec, 0); components.len()];
    let lam_inf = subsequential_limit(&components, &zero_angles, dim, prec);
    let mut averaged = CMatrix::zeros(dim, dim, wp);
    let mut averaged_rank = 0;
    for c in components.iter().filter(|c| c.order == Some(1)) {
        averaged = averaged.add(&c.limit);
        averaged_rank += c.limit_rank;
    }
    let mut ns = Vec::new();
    let mut tw = Vec::new();
    let mut av = Vec::new();
    let mut running = CMatrix::zeros(dim, dim, wp);
    exact_powers(m, opts.n_max, opts.digit_budget, |n, pw| {
        let ln = normalized_power(pw, n, j, wp);
        running = running.add(&ln);
        let mean = running.scale(&Complex::with_val(wp, Float::with_val(wp, n).recip()));
        ns.push(n);
        tw.push(twist(&ln, n, &components, wp).sub(&lam_inf).norm_inf().to_f64());
        av.push(mean.sub(&averaged).norm_inf().to_f64());
    })?;
    let twisted_rate = fit_rate(&ns, &tw, opts.fit_range, opts.validate_range, false, rounding_floor(prec));
    let averaged_rate = fit_rate(&ns, &av, opts.fit_range, opts.validate_range, true, rounding_floor(prec));
    let mut plain_limits = Vec::new();
    if opts.request_plain {
        let period = match j.theta_group {
            ThetaGroup::Trivial => 1,
            ThetaGroup::FiniteCyclic(q) => q,
            ThetaGroup::PositiveDimensional => unreachable!(),
        };
        for r in 0..period {
            let angles: Vec<Float> = components.iter().map(|c| Float::with_val(wp, &c.theta) * r).collect();
            plain_limits.push(subsequential_limit(&components, &angles, dim, prec));
        }
    }
    Ok(LimitReport {
        lambda_infinity: lam_inf,
        averaged,
        averaged_rank,
        dim_f_prime: j.strictly_dominant_dim(),
        components,
        n_values: ns,
        twisted_deviation: tw,
        averaged_deviation: av,
        twisted_rate,
        averaged_rate,
        plain_limits,
        warnings,
    })
}

#[derive(Debug, Clone)]
pub struct PerronFrobeniusReport {
    pub eigenvalue: Float,
    /// Normalized to max-norm 1.
    pub eigenvector: Vec<Complex>,
    /// Coordinates of the eigenvector over the cone generators.
    pub coefficients: Vec<f64>,
    /// Residual `‖M v − λ v‖∞`.
    pub residual: f64,
    pub nonnegative: bool,
}

/// Perron–Frobenius check for the cone spanned by `generators`.
pub fn perron_frobenius_check(m: &ExactMatrix, j: &JordanData, generators: &[Vec<Gq>], tol: f64) -> Result<PerronFrobeniusReport> {
    let n = m.rows();
    if generators.is_empty() || generators.iter().any(|g| g.len() != n) {
        return Err(Error::DimensionMismatch("cone generators must be vectors of the matrix dimension".into()));
    }
    if !m.is_real() || generators.iter().flatten().any(|v| !v.is_real()) {
        return Err(Error::Invalid("cone checks need real matrices and generators".into()));
    }
    let g = Matrix::from_columns(generators);
    if g.rank() < n {
        return Err(Error::Invalid("cone generators do not span the space".into()));
    }
    let a: Vec<Vec<Rational>> = (0..n).map(|i| g.row(i).iter().map(|v| v.re.clone()).collect()).collect();
    for (k, gen) in generators.iter().enumerate() {
        let image: Vec<Rational> = m.mul_vec(gen).into_iter().map(|v| v.re).collect();
        if lp::feasible_point(&a, &image).is_none() {
            return Err(Error::ConeNotPreserved { generator: k });
        }
    }
    let prec = j.precision;
    let wp = prec + 32;
    let components = dominant_components(m, j, prec);
    let Some(real) = components.iter().find(|c| c.order == Some(1)) else {
        return Err(Error::NoDominantRealEigenvalue);
    };
    let sum: Vec<Complex> = (0..n)
        .map(|i| generators.iter().fold(Complex::new(wp), |acc, gv| acc + gv[i].to_complex(wp)))
        .collect();
    let mut v = real.limit.mul_vec(&sum);
    let scale = crate::matrix::vec_norm_inf(&v);
    if scale.is_zero() {
        return Err(Error::NoDominantRealEigenvalue);
    }
    for z in v.iter_mut() {
        *z /= &scale;
    }
    let lam = Complex::with_val(wp, &j.spectral_radius);
    let mv = m.to_complex(None, wp).mul_vec(&v);
    let residual = mv
        .iter()
        .zip(&v)
        .map(|(a, b)| Float::with_val(wp, Complex::with_val(wp, a - Complex::with_val(wp, b * &lam)).abs_ref()).to_f64())
        .fold(0.0, f64::max);

    // coordinates over the generators: minimize t with |G c − v| ≤ t, c ≥ 0
    let r = generators.len();
    let vq: Vec<Rational> = v.iter().map(|z| z.real().to_rational().expect("finite")).collect();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..n {
        for sign in [1i32, -1] {
            let mut row: Vec<Rational> = a[i].iter().map(|x| Rational::from(x * sign)).collect();
            row.push(Rational::from(-1));
            for s in 0..2 * n {
                row.push(Rational::from(i32::from(s == 2 * i + usize::from(sign < 0))));
            }
            rows.push(row);
            rhs.push(Rational::from(&vq[i] * sign));
        }
    }
    let mut cost = vec![Rational::new(); r];
    cost.push(Rational::from(1));
    cost.extend((0..2 * n).map(|_| Rational::new()));
    let (coefficients, slack) = match lp::minimize(&rows, &rhs, &cost) {
        lp::LpResult::Optimal { x, value } => (x[..r].iter().map(Rational::to_f64).collect::<Vec<_>>(), value.to_f64()),
        _ => (vec![f64::NAN; r], f64::INFINITY),
    };
    let nonnegative = slack <= tol && residual <= tol;
    Ok(PerronFrobeniusReport { eigenvalue: j.spectral_radius.clone(), eigenvector: v, coefficients, residual, nonnegative })
}
