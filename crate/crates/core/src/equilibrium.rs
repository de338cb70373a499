//! Mixing of Haar measure under torus automorphisms: exact character
//! correlations, grid correlations and ergodic averages.
//!
//! A torus automorphism `A` of `ℂ^k/ℤ[i]^k` acts on real coordinates
//! `(Re z, Im z) ∈ ℝ^{2k}/ℤ^{2k}` by `A_ℝ = [[P, −Q], [Q, P]]` with `A = P + iQ`.
//! The character `χ_m(x) = exp(2πi⟨m, x⟩)` pulls back to `χ_{A_ℝᵀ m}`.

use nalgebra::Complex as C64;
use rayon::prelude::*;
use rug::{Complex, Float, Integer};
use serde::Serialize;

use crate::arith::{Field, Gq, NfElem, NumberField};
use crate::cohomology::TorusAutomorphism;
use crate::error::{Error, Result};
use crate::green::TorusGrid;
use crate::jordan::{eigen_structure, residue_modulus};
use crate::matrix::ExactMatrix;
use crate::rate::{fit_rate, RateFit};

/// Grid correlations within this of a multiple of `2^-24` are snapped to it.
pub const SNAP_TOL: f64 = 1e-10;

/// The real `2k × 2k` integer matrix of `A`.
pub fn real_matrix(t: &TorusAutomorphism) -> Vec<Vec<i64>> {
    let k = t.k();
    let mut out = vec![vec![0i64; 2 * k]; 2 * k];
    let to_i = |q: &rug::Rational| q.numer().to_i64().expect("entries fit in i64");
    for i in 0..k {
        for j in 0..k {
            let z = t.a.get(i, j);
            let (p, q) = (to_i(&z.re), to_i(&z.im));
            out[i][j] = p;
            out[i][k + j] = -q;
            out[k + i][j] = q;
            out[k + i][k + j] = p;
        }
    }
    out
}

fn transpose(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

fn apply_int(m: &[Vec<i64>], v: &[Integer]) -> Vec<Integer> {
    m.iter().map(|r| r.iter().zip(v).fold(Integer::new(), |acc, (a, x)| acc + Integer::from(*a) * x)).collect()
}

fn max_abs(v: &[Integer]) -> Integer {
    v.iter().map(|x| x.clone().abs()).max().unwrap_or_default()
}

fn to_int(v: &[i64]) -> Vec<Integer> {
    v.iter().map(|&x| Integer::from(x)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EscapeKind {
    /// From `ℓ((Aᵀ)^n m) = μ^n ℓ(m)` with an expanding eigenvalue `μ`.
    Certified,
    /// First `n` with `‖(Aᵀ)^n m‖∞ > ‖m'‖∞`; not a proof in general.
    NormHeuristic,
    /// No escape bound; the whole range was searched.
    None,
}

struct Expanding {
    vectors: Vec<Vec<NfElem>>,
    root: Option<Complex>,
    modulus: f64,
}

/// Exact data of a torus automorphism for frequency computations.
pub struct MixingContext {
    pub k: usize,
    /// `A_ℝᵀ`, acting on frequencies.
    pub at: Vec<Vec<i64>>,
    /// Whether no eigenvalue of `A_ℝ` has modulus 1.
    pub hyperbolic: bool,
    expanding: Vec<Expanding>,
    prec: u32,
}

impl MixingContext {
    pub fn new(t: &TorusAutomorphism, prec: u32) -> Result<Self> {
        let ar = real_matrix(t);
        let at = transpose(&ar);
        let m = ExactMatrix::from_rows(ar.iter().map(|r| r.iter().map(|&x| Gq::int(x)).collect()).collect());
        let j = eigen_structure(&m, prec)?;
        let tol = 2f64.powi(-64);
        let mut hyperbolic = true;
        let mut expanding = Vec::new();
        let mut seen = Vec::new();
        for e in &j.eigenvalues {
            let modulus = Float::with_val(prec, e.value.abs_ref()).to_f64();
            if (modulus - 1.0).abs() <= tol {
                hyperbolic = false;
            }
            if modulus <= 1.0 + tol {
                continue;
            }
            let (p, _) = &j.factors[e.factor];
            let g = residue_modulus(p, Some(&e.value));
            if seen.contains(&(g.clone(), e.value.real().to_f64().to_bits(), e.value.imag().to_f64().to_bits())) {
                continue;
            }
            seen.push((g.clone(), e.value.real().to_f64().to_bits(), e.value.imag().to_f64().to_bits()));
            let (a, root) = if g.degree() == 1 {
                (NfElem::from_gq(&g.coeff(0).neg()), None)
            } else {
                (NumberField::new(&g).generator(), Some(e.value.clone()))
            };
            let n = ar.len();
            let mut shifted = m.map(NfElem::from_gq);
            for i in 0..n {
                let d = shifted.get(i, i).sub(&a);
                shifted.set(i, i, d);
            }
            let vectors = shifted.kernel();
            expanding.push(Expanding { vectors, root, modulus });
        }
        Ok(MixingContext { k: t.k(), at, hyperbolic, expanding, prec })
    }

    pub fn dim(&self) -> usize {
        2 * self.k
    }

    /// Largest `n` at which `(Aᵀ)^n m = −m'` is still possible.
    pub fn escape_index(&self, m: &[i64], m_prime: &[i64]) -> (Option<u64>, EscapeKind) {
        let prec = self.prec;
        let embed = |x: &NfElem, root: &Option<Complex>| match root {
            Some(r) => x.embed(r, prec),
            None => x.to_complex_at(None, prec),
        };
        let dot = |l: &[NfElem], v: &[i64]| {
            l.iter().zip(v).fold(NfElem::zero(), |acc, (a, &x)| acc.add(&a.mul(&NfElem::from_gq(&Gq::int(x)))))
        };
        let mut best: Option<u64> = None;
        for ex in &self.expanding {
            for l in &ex.vectors {
                let s = dot(l, m);
                if s.is_zero() {
                    continue;
                }
                let t = dot(l, m_prime);
                let idx = if t.is_zero() {
                    0
                } else {
                    let ratio = Float::with_val(prec, embed(&t, &ex.root).abs_ref())
                        / Float::with_val(prec, embed(&s, &ex.root).abs_ref());
                    let n = ratio.to_f64().ln() / ex.modulus.ln();
                    (n + 1e-9).floor().max(0.0) as u64
                };
                best = Some(best.map_or(idx, |b| b.min(idx)));
            }
        }
        if best.is_some() {
            return (best, EscapeKind::Certified);
        }
        if self.expanding.is_empty() {
            return (None, EscapeKind::None);
        }
        let target = max_abs(&to_int(m_prime));
        let mut v = to_int(m);
        for n in 1..=10_000u64 {
            v = apply_int(&self.at, &v);
            if max_abs(&v) > target {
                return (Some(n - 1), EscapeKind::NormHeuristic);
            }
        }
        (None, EscapeKind::None)
    }

    /// All `n` in `0..=n_max` with `(Aᵀ)^n m = −m'`.
    pub fn coincidences(&self, m: &[i64], m_prime: &[i64], n_max: u64) -> Vec<u64> {
        let target: Vec<Integer> = m_prime.iter().map(|&x| Integer::from(-x)).collect();
        let mut v = to_int(m);
        let mut out = Vec::new();
        for n in 0..=n_max {
            if n > 0 {
                v = apply_int(&self.at, &v);
            }
            if v == target {
                out.push(n);
            }
        }
        out
    }

    /// `‖(Aᵀ)^n‖∞` for `n = 0..=n_max`.
    fn power_norms(&self, n_max: u64) -> Vec<Integer> {
        let d = self.dim();
        let mut cols: Vec<Vec<Integer>> = (0..d)
            .map(|j| {
                let mut e = vec![Integer::new(); d];
                e[j] = Integer::from(1);
                e
            })
            .collect();
        let norm = |cols: &[Vec<Integer>]| {
            (0..d).map(|i| cols.iter().fold(Integer::new(), |acc, c| acc + c[i].clone().abs())).max().expect("d > 0")
        };
        let mut out = vec![norm(&cols)];
        for _ in 0..n_max {
            cols = cols.iter().map(|c| apply_int(&self.at, c)).collect();
            out.push(norm(&cols));
        }
        out
    }
}

/// Trigonometric polynomial `Σ c_m χ_m` on `ℝ^{2k}/ℤ^{2k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    pub dim: usize,
    pub terms: Vec<(Vec<i64>, C64<f64>)>,
}

impl TrigPoly {
    pub fn character(m: Vec<i64>) -> Self {
        TrigPoly { dim: m.len(), terms: vec![(m, C64::new(1.0, 0.0))] }
    }

    /// `cos 2π⟨m, x⟩`.
    pub fn cosine(m: Vec<i64>) -> Self {
        let neg: Vec<i64> = m.iter().map(|x| -x).collect();
        TrigPoly { dim: m.len(), terms: vec![(m, C64::new(0.5, 0.0)), (neg, C64::new(0.5, 0.0))] }
    }

    pub fn mean(&self) -> C64<f64> {
        self.terms.iter().filter(|(m, _)| m.iter().all(|&x| x == 0)).map(|(_, c)| *c).sum()
    }

    /// `‖φ‖₂`.
    pub fn l2_norm(&self) -> f64 {
        let mut merged: Vec<(Vec<i64>, C64<f64>)> = Vec::new();
        for (m, c) in &self.terms {
            match merged.iter_mut().find(|(n, _)| n == m) {
                Some((_, a)) => *a += c,
                None => merged.push((m.clone(), *c)),
            }
        }
        merged.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_frequency(&self) -> i64 {
        self.terms.iter().flat_map(|(m, _)| m.iter().map(|x| x.abs())).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> C64<f64> {
        self.terms
            .iter()
            .map(|(m, c)| {
                let phase = std::f64::consts::TAU * m.iter().zip(x).map(|(a, b)| *a as f64 * b).sum::<f64>();
                c * C64::new(phase.cos(), phase.sin())
            })
            .sum()
    }

    /// Values at grid index coordinates, with the phase reduced exactly mod `res`.
    pub fn eval_grid(&self, grid: &TorusGrid, idx: usize) -> C64<f64> {
        let c = grid.coords(idx);
        let r = grid.res as i64;
        self.terms
            .iter()
            .map(|(m, a)| {
                let k = m.iter().zip(&c).map(|(f, &x)| f * x as i64).sum::<i64>().rem_euclid(r);
                let phase = std::f64::consts::TAU * k as f64 / r as f64;
                a * C64::new(phase.cos(), phase.sin())
            })
            .sum()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    pub pairs: Vec<(String, String)>,
    pub n_values: Vec<u64>,
    /// `C_n` as `[re, im]`.
    pub values: Vec<[f64; 2]>,
    /// `(n, term of φ, term of ψ)` with `(Aᵀ)^n m = −m'`.
    pub coincidences: Vec<(u64, usize, usize)>,
    pub last_coincidence: Option<u64>,
    /// No coincidence is possible beyond this index.
    pub escape_index: Option<u64>,
    pub escape: EscapeKind,
    /// `C_n = 0` exactly (or below tolerance on grids) for all reported `n`
    /// past the last coincidence.
    pub decay: bool,
    /// `‖φ‖₂‖ψ‖₂`.
    pub bound: f64,
    pub alias_safe_until: Option<u64>,
    pub warnings: Vec<String>,
}

fn freq_label(m: &[i64]) -> String {
    format!("{m:?}")
}

fn check_dim(ctx: &MixingContext, v: &[i64]) -> Result<()> {
    if v.len() != ctx.dim() {
        return Err(Error::DimensionMismatch(format!("frequency of length {}, expected {}", v.len(), ctx.dim())));
    }
    Ok(())
}

/// `C_n = ∫ χ_m∘f^n · χ_{m'} dμ`, which is 1 when `(A_ℝᵀ)^n m = −m'` and 0 otherwise.
pub fn haar_character_correlation(
    ctx: &MixingContext,
    m: &[i64],
    m_prime: &[i64],
    n_range: (u64, u64),
) -> Result<CorrelationReport> {
    check_dim(ctx, m)?;
    check_dim(ctx, m_prime)?;
    if m.iter().all(|&x| x == 0) || m_prime.iter().all(|&x| x == 0) {
        return Err(Error::ZeroFrequency);
    }
    let hits = ctx.coincidences(m, m_prime, n_range.1);
    let (escape_index, escape) = ctx.escape_index(m, m_prime);
    let n_values: Vec<u64> = (n_range.0..=n_range.1).collect();
    let values: Vec<[f64; 2]> = n_values.iter().map(|n| [if hits.contains(n) { 1.0 } else { 0.0 }, 0.0]).collect();
    let in_range: Vec<u64> = hits.iter().copied().filter(|&n| n >= n_range.0).collect();
    let last = in_range.last().copied();
    let mut warnings = Vec::new();
    if let (Some(l), Some(e)) = (last, escape_index) {
        if l > e {
            warnings.push(format!("coincidence at n = {l} beyond the escape index {e}"));
        }
    }
    Ok(CorrelationReport {
        pairs: vec![(freq_label(m), freq_label(m_prime))],
        decay: decay_after(&n_values, &values, last, 0.0),
        n_values,
        values,
        coincidences: in_range.iter().map(|&n| (n, 0, 0)).collect(),
        last_coincidence: last,
        escape_index,
        escape,
        bound: 1.0,
        alias_safe_until: None,
        warnings,
    })
}

fn decay_after(ns: &[u64], values: &[[f64; 2]], last: Option<u64>, tol: f64) -> bool {
    ns.iter().zip(values).filter(|(n, _)| last.is_none_or(|l| **n > l)).all(|(_, v)| v[0].abs() <= tol && v[1].abs() <= tol)
}

/// Exact centered correlation of two trigonometric polynomials by exhaustive
/// coincidence search over their frequency pairs.
pub fn trig_correlation(ctx: &MixingContext, phi: &TrigPoly, psi: &TrigPoly, n_range: (u64, u64)) -> Result<CorrelationReport> {
    for (m, _) in phi.terms.iter().chain(&psi.terms) {
        check_dim(ctx, m)?;
    }
    let n_values: Vec<u64> = (n_range.0..=n_range.1).collect();
    let mut values = vec![C64::new(0.0, 0.0); n_values.len()];
    let mut coincidences = Vec::new();
    let mut escape_index: Option<u64> = Some(0);
    let mut escape = EscapeKind::Certified;
    for (i, (m, a)) in phi.terms.iter().enumerate() {
        if m.iter().all(|&x| x == 0) {
            continue;
        }
        for (j, (mp, b)) in psi.terms.iter().enumerate() {
            if mp.iter().all(|&x| x == 0) {
                continue;
            }
            for n in ctx.coincidences(m, mp, n_range.1).into_iter().filter(|&n| n >= n_range.0) {
                values[(n - n_range.0) as usize] += a * b;
                coincidences.push((n, i, j));
            }
            let (e, kind) = ctx.escape_index(m, mp);
            match (e, kind) {
                (Some(e), EscapeKind::Certified) => escape_index = escape_index.map(|x| x.max(e)),
                (Some(e), EscapeKind::NormHeuristic) => {
                    escape_index = escape_index.map(|x| x.max(e));
                    if escape == EscapeKind::Certified {
                        escape = EscapeKind::NormHeuristic;
                    }
                }
                _ => {
                    escape_index = None;
                    escape = EscapeKind::None;
                }
            }
        }
    }
    coincidences.sort_unstable();
    let last = coincidences.last().map(|c| c.0);
    let values: Vec<[f64; 2]> = values.iter().map(|z| [z.re, z.im]).collect();
    Ok(CorrelationReport {
        pairs: vec![("phi".into(), "psi".into())],
        decay: decay_after(&n_values, &values, last, 0.0),
        n_values,
        values,
        coincidences,
        last_coincidence: last,
        escape_index: if escape == EscapeKind::None { None } else { escape_index },
        escape,
        bound: phi.l2_norm() * psi.l2_norm(),
        alias_safe_until: None,
        warnings: Vec::new(),
    })
}

/// Default grid resolution per axis: about `2^20` points in total, at most
/// `2^10` per axis.
const SUM_CHUNK: usize = 4096;

/// Sums fixed-size chunk partials in index order, so the result does not
/// depend on how the work was split across threads.
fn ordered_sum(parts: impl IndexedParallelIterator<Item = C64<f64>>) -> C64<f64> {
    parts.collect::<Vec<_>>().into_iter().sum()
}

pub fn default_resolution(dim: usize) -> usize {
    1 << (20 / dim.max(1)).min(10)
}

fn snap(x: f64) -> f64 {
    let s = (x * 16_777_216.0).round() / 16_777_216.0;
    if (x - s).abs() <= SNAP_TOL {
        s
    } else {
        x
    }
}

/// `C_n = ⟨(φ∘f^n)·ψ⟩ − ⟨φ⟩⟨ψ⟩` on the grid with `res` points per axis, where
/// `f^n` permutes grid points exactly. The range is truncated where
/// frequencies could alias.
pub fn grid_correlation(
    ctx: &MixingContext,
    phi: &TrigPoly,
    psi: &TrigPoly,
    n_range: (u64, u64),
    res: usize,
) -> Result<CorrelationReport> {
    for (m, _) in phi.terms.iter().chain(&psi.terms) {
        check_dim(ctx, m)?;
    }
    let grid = TorusGrid::new(ctx.dim(), res);
    let norms = ctx.power_norms(n_range.1);
    let fmax = Integer::from(phi.max_frequency());
    let gmax = Integer::from(psi.max_frequency());
    let safe = (0..=n_range.1).take_while(|&n| Integer::from(&norms[n as usize] * &fmax) + &gmax < res).last();
    let mut warnings = Vec::new();
    let hi = match safe {
        Some(s) if s < n_range.1 => {
            warnings.push(format!("AliasWarning: frequencies fold beyond the grid after n = {s}; range truncated"));
            s
        }
        Some(s) => s,
        None => {
            warnings.push("AliasWarning: the inputs already alias on this grid".into());
            0
        }
    };
    let ar = transpose(&ctx.at);
    let gmap = grid.affine_map(&ar);
    let phi_v: Vec<C64<f64>> = (0..grid.len()).into_par_iter().map(|i| phi.eval_grid(&grid, i)).collect();
    let psi_v: Vec<C64<f64>> = (0..grid.len()).into_par_iter().map(|i| psi.eval_grid(&grid, i)).collect();
    let npts = grid.len() as f64;
    let mean = |v: &[C64<f64>]| ordered_sum(v.par_chunks(SUM_CHUNK).map(|c| c.iter().sum())) / npts;
    let centre = mean(&phi_v) * mean(&psi_v);
    let mut pos: Vec<usize> = (0..grid.len()).collect();
    let mut n_values = Vec::new();
    let mut values = Vec::new();
    for n in 0..=hi {
        if n > 0 {
            pos = pos.par_iter().map(|&p| gmap[p]).collect();
        }
        if n < n_range.0 {
            continue;
        }
        let s = ordered_sum(
            pos.par_chunks(SUM_CHUNK)
                .zip(psi_v.par_chunks(SUM_CHUNK))
                .map(|(ps, bs)| ps.iter().zip(bs).map(|(&p, b)| phi_v[p] * b).sum()),
        ) / npts
            - centre;
        n_values.push(n);
        values.push([snap(s.re), snap(s.im)]);
    }
    let exact = trig_correlation(ctx, phi, psi, (n_range.0, hi.max(n_range.0)))?;
    let last = exact.last_coincidence;
    Ok(CorrelationReport {
        pairs: vec![("phi".into(), "psi".into())],
        decay: decay_after(&n_values, &values, last, SNAP_TOL),
        n_values,
        values,
        coincidences: exact.coincidences,
        last_coincidence: last,
        escape_index: exact.escape_index,
        escape: exact.escape,
        bound: phi.l2_norm() * psi.l2_norm(),
        alias_safe_until: safe,
        warnings,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ErgodicReport {
    pub n_values: Vec<u64>,
    /// `|N^{-1} Σ_{j=1}^N ⟨φ∘f^j, ψ⟩|`.
    pub averages: Vec<f64>,
    pub coincidence_count: usize,
    pub last_coincidence: Option<u64>,
    pub rate: RateFit,
}

/// Birkhoff averages of `φ∘f^j` against a fixed test function `ψ`, summed
/// exactly from coincidences.
pub fn ergodic_average_check(ctx: &MixingContext, phi: &TrigPoly, psi: &TrigPoly, n_max: u64) -> Result<ErgodicReport> {
    if phi.mean().norm() != 0.0 {
        return Err(Error::Invalid("φ must have zero mean".into()));
    }
    let corr = trig_correlation(ctx, phi, psi, (1, n_max))?;
    let mut acc = C64::new(0.0, 0.0);
    let mut averages = Vec::new();
    for (n, v) in corr.n_values.iter().zip(&corr.values) {
        acc += C64::new(v[0], v[1]);
        averages.push((acc / *n as f64).norm());
    }
    let fit_hi = (n_max / 4).max(2);
    let rate = fit_rate(&corr.n_values, &averages, (1, fit_hi), (fit_hi + 1, n_max), false, 0.0);
    Ok(ErgodicReport {
        n_values: corr.n_values,
        averages,
        coincidence_count: corr.coincidences.len(),
        last_coincidence: corr.last_coincidence,
        rate,
    })
}

/// Spectral check that `A_ℝ` has no eigenvalue on the unit circle.
pub fn is_hyperbolic(t: &TorusAutomorphism, prec: u32) -> Result<bool> {
    Ok(MixingContext::new(t, prec)?.hyperbolic)
}
