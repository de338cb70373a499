//! Dynamical degrees, relative degrees on cup-product quotients, concavity,
//! class-level Cesàro limits and the degree chain of distinct degrees.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float};
use serde::Serialize;

use crate::arith::roots::complex_roots;
use crate::arith::{Field, Gq, NfElem, NumberField, Poly};
use crate::cohomology::{CupProduct, GradedCohomologyAction, ModelTag};
use crate::error::{Error, Result};
use crate::jordan::{
    dominant_components, eigen_structure, exact_spectral_apply, exact_spectral_pieces, residue_modulus, rounding_floor, JordanData,
};
use crate::matrix::{vec_norm_inf, CMatrix, ExactMatrix, Matrix};
use crate::rate::{fit_rate, RateFit};

/// Degrees closer than this (relatively) are treated as equal.
pub const PLATEAU_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct DegreeProfile {
    pub k: usize,
    pub degrees: Vec<Float>,
    pub multiplicities: Vec<usize>,
    pub entropy: Float,
    pub plateau: (usize, usize),
    pub model_tag: ModelTag,
    pub sublattice: bool,
    pub precision: u32,
    /// Spectral data of every block; empty for profiles built from bare degrees.
    pub jordan: Vec<JordanData>,
}

impl DegreeProfile {
    /// A profile from given degrees (multiplicities 1), e.g. to test the checks.
    pub fn from_degrees(degrees: &[f64], model_tag: ModelTag) -> Self {
        let prec = 64;
        let degrees: Vec<Float> = degrees.iter().map(|&d| Float::with_val(prec, d)).collect();
        let k = degrees.len() - 1;
        DegreeProfile {
            k,
            entropy: entropy_of(&degrees),
            plateau: plateau_of(&degrees),
            multiplicities: vec![1; k + 1],
            degrees,
            model_tag,
            sublattice: false,
            precision: prec,
            jordan: Vec::new(),
        }
    }

    pub fn degrees_f64(&self) -> Vec<f64> {
        self.degrees.iter().map(Float::to_f64).collect()
    }
}

fn entropy_of(degrees: &[Float]) -> Float {
    let prec = degrees[0].prec();
    degrees.iter().map(|d| Float::with_val(prec, d.ln_ref())).fold(Float::with_val(prec, 0), |a, b| a.max(&b))
}

fn close(a: &Float, b: &Float) -> bool {
    let diff = Float::with_val(a.prec(), a - b).abs();
    diff <= Float::with_val(a.prec(), a.clone().abs().max(&b.clone().abs())) * PLATEAU_TOL
}

/// First and last index in `1..=k-1` (or `1..=k` when `k = 1`) where the
/// maximal degree is attained.
pub fn plateau_of(degrees: &[Float]) -> (usize, usize) {
    let k = degrees.len() - 1;
    let hi = if k >= 2 { k - 1 } else { k };
    let range = 1.min(hi)..=hi;
    let max = degrees[range.clone()].iter().fold(degrees[*range.start()].clone(), |a, b| a.max(b));
    let at: Vec<usize> = range.filter(|&p| close(&degrees[p], &max)).collect();
    (at[0], *at.last().expect("nonempty"))
}

/// `d_p` and `l_p` for every block, in parallel over `p`.
pub fn dynamical_degrees(action: &GradedCohomologyAction, prec: u32) -> Result<DegreeProfile> {
    let jordan: Vec<JordanData> =
        action.blocks.par_iter().map(|b| eigen_structure(b, prec)).collect::<Result<Vec<_>>>()?;
    let degrees: Vec<Float> = jordan.iter().map(|j| Float::with_val(prec, &j.spectral_radius)).collect();
    Ok(DegreeProfile {
        k: action.k,
        entropy: entropy_of(&degrees),
        plateau: plateau_of(&degrees),
        multiplicities: jordan.iter().map(|j| j.multiplicity).collect(),
        degrees,
        model_tag: action.model_tag,
        sublattice: action.sublattice,
        precision: prec,
        jordan,
    })
}

#[derive(Debug, Clone)]
pub struct DegreeSequence {
    pub p: usize,
    pub n_values: Vec<u64>,
    /// `d_{p,n} = ‖(f^n)*[ω^p]‖`.
    pub values: Vec<Float>,
    /// `d_{p,n} / (n^{l_p-1} d_p^n)`.
    pub normalized: Vec<Float>,
    /// `d_{p,n}^{1/n}`.
    pub roots: Vec<f64>,
    /// `exp` of the slope of `log d_{p,n} − (l_p−1) log n` against `n` over the
    /// upper half of the range.
    pub fitted_limit: f64,
}

fn embed_at(x: &NfElem, root: Option<&Complex>, prec: u32) -> Complex {
    match root {
        Some(r) => x.embed(r, prec),
        None => x.to_complex_at(None, prec),
    }
}

fn vec_digits(v: &[Gq]) -> usize {
    v.iter().map(Gq::digit_size).max().unwrap_or(0)
}

fn to_complex_vec(v: &[Gq], prec: u32) -> Vec<Complex> {
    v.iter().map(|x| x.to_complex(prec)).collect()
}

/// Exact orbit `B^n x` for `n = 1..=n_max` under the digit budget.
fn exact_orbit(b: &ExactMatrix, x: &[Gq], n_max: u64, budget: usize, mut visit: impl FnMut(u64, &[Gq])) -> Result<()> {
    let mut v = x.to_vec();
    for n in 1..=n_max {
        v = b.mul_vec(&v);
        let digits = vec_digits(&v);
        if digits > budget {
            return Err(Error::Overflow { digits, budget });
        }
        visit(n, &v);
    }
    Ok(())
}

pub fn degree_sequence(
    action: &GradedCohomologyAction,
    p: usize,
    n_values: &[u64],
    budget: usize,
    prec: u32,
) -> Result<DegreeSequence> {
    if p > action.k {
        return Err(Error::Invalid(format!("degree {p} exceeds k = {}", action.k)));
    }
    if n_values.is_empty() {
        return Err(Error::Invalid("empty n range".into()));
    }
    let j = eigen_structure(&action.blocks[p], prec)?;
    let d = Float::with_val(prec, &j.spectral_radius);
    let l = j.multiplicity;
    let n_max = *n_values.iter().max().expect("nonempty");
    let mut values = Vec::new();
    exact_orbit(&action.blocks[p], &action.kahler_class[p], n_max, budget, |n, v| {
        if n_values.contains(&n) {
            values.push((n, vec_norm_inf(&to_complex_vec(v, prec))));
        }
    })?;
    let mut ns = Vec::new();
    let mut vals = Vec::new();
    let mut normalized = Vec::new();
    let mut roots = Vec::new();
    for (n, v) in values {
        let denom = Float::with_val(prec, (&d).pow(n as u32)) * Float::with_val(prec, n).pow(l as u32 - 1);
        normalized.push(Float::with_val(prec, &v / &denom));
        roots.push((Float::with_val(prec, v.ln_ref()) / n as f64).exp().to_f64());
        ns.push(n);
        vals.push(v);
    }
    let half = ns.len() / 2;
    let xs: Vec<f64> = ns[half..].iter().map(|&n| n as f64).collect();
    let ys: Vec<f64> = ns[half..]
        .iter()
        .zip(&vals[half..])
        .map(|(&n, v)| Float::with_val(prec, v.ln_ref()).to_f64() - (l as f64 - 1.0) * (n as f64).ln())
        .collect();
    let fitted_limit = if xs.len() >= 2 { crate::rate::linear_fit(&xs, &ys).0.exp() } else { roots[0] };
    Ok(DegreeSequence { p, n_values: ns, values: vals, normalized, roots, fitted_limit })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Severity {
    None,
    /// Raw input whose degrees cannot come from a Kähler automorphism.
    ModelInconsistency,
    /// A geometric model violated concavity: a bug or precision failure.
    ComputationError,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcavityReport {
    /// `(d_p² − d_{p−1}d_{p+1}) / d_p²` for `p = 1..k−1`.
    pub margins: Vec<f64>,
    /// `d_{p−1}/d_p` for `p = 1..=k`.
    pub ratios: Vec<f64>,
    pub ratios_increasing: bool,
    pub concave: bool,
    pub violations: Vec<usize>,
    pub severity: Severity,
    pub tolerance: f64,
}

/// Relative tolerance of the concavity test.
pub fn concavity_tolerance() -> f64 {
    2f64.powi(-64)
}

pub fn check_concavity(profile: &DegreeProfile) -> ConcavityReport {
    let prec = profile.precision.max(64);
    let tol = concavity_tolerance();
    let d = &profile.degrees;
    let k = profile.k;
    let mut margins = Vec::new();
    let mut violations = Vec::new();
    for p in 1..k {
        let sq = Float::with_val(prec, &d[p] * &d[p]);
        let prod = Float::with_val(prec, &d[p - 1] * &d[p + 1]);
        let m = Float::with_val(prec, &sq - &prod) / &sq;
        let m = m.to_f64();
        if m < -tol {
            violations.push(p);
        }
        margins.push(m);
    }
    let ratios: Vec<f64> = (1..=k).map(|p| Float::with_val(prec, &d[p - 1] / &d[p]).to_f64()).collect();
    let ratios_increasing = ratios.windows(2).all(|w| w[1] >= w[0] * (1.0 - tol) - tol);
    let concave = violations.is_empty();
    let severity = match (concave, profile.model_tag) {
        (true, _) => Severity::None,
        (false, ModelTag::Raw) => Severity::ModelInconsistency,
        (false, _) => Severity::ComputationError,
    };
    ConcavityReport { margins, ratios, ratios_increasing, concave, violations, severity, tolerance: tol }
}

/// A class `[T] ∈ H^{s,s}` with `f*[T] = λ_T [T]`, exact over a number field
/// `K = ℚ(i)[a]/(q)` embedded by sending `a` to `embedding`.
#[derive(Debug, Clone)]
pub struct EigenClass {
    pub s: usize,
    pub coords: Vec<NfElem>,
    pub eigenvalue: NfElem,
    pub embedding: Option<Complex>,
}

impl EigenClass {
    /// The class of `X` itself in `H^{0,0}`.
    pub fn fundamental() -> Self {
        EigenClass { s: 0, coords: vec![NfElem::one()], eigenvalue: NfElem::one(), embedding: None }
    }

    pub fn exact(s: usize, coords: &[Gq], eigenvalue: &Gq) -> Self {
        EigenClass {
            s,
            coords: coords.iter().map(NfElem::from_gq).collect(),
            eigenvalue: NfElem::from_gq(eigenvalue),
            embedding: None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.coords.iter().chain([&self.eigenvalue]).all(|x| x.as_scalar().is_some())
    }

    pub fn numeric(&self, prec: u32) -> Vec<Complex> {
        self.coords.iter().map(|x| embed_at(x, self.embedding.as_ref(), prec)).collect()
    }

    pub fn eigenvalue_value(&self, prec: u32) -> Complex {
        embed_at(&self.eigenvalue, self.embedding.as_ref(), prec)
    }
}

/// The top of the dominant Jordan chains applied to `[ω^s]`:
/// `N^{l_s−1} P [ω^s]` for the eigenvalue `d_s`, exact over its number field.
/// Up to a positive factor this is the limit of `(f^n)*[ω^s] / (n^{l_s−1} d_s^n)`.
pub fn dominant_eigenclass(action: &GradedCohomologyAction, s: usize, prec: u32) -> Result<EigenClass> {
    let b = &action.blocks[s];
    let j = eigen_structure(b, prec)?;
    let &ev = j
        .dominant_eigenvalues
        .iter()
        .find(|&&e| j.theta_of_eigenvalue(e).1 == Some(1))
        .ok_or(Error::NoDominantRealEigenvalue)?;
    let e = &j.eigenvalues[ev];
    let (p, mult) = &j.factors[e.factor];
    let g = residue_modulus(p, Some(&e.value));
    let omega: Vec<NfElem> = action.kahler_class[s].iter().map(NfElem::from_gq).collect();
    let mut coords = exact_spectral_apply(b, &g, *mult, j.multiplicity - 1, &omega);
    if coords.iter().all(Field::is_zero) {
        let (proj, nil) = exact_spectral_pieces(b, &g, *mult);
        let top = if j.multiplicity > 1 { nil.pow(j.multiplicity as u64 - 1).mul(&proj) } else { proj };
        let c = (0..top.cols()).find(|&c| top.column(c).iter().any(|x| !x.is_zero())).expect("nonzero chain top");
        coords = top.column(c);
    }
    let (eigenvalue, embedding) = if g.degree() == 1 {
        let root = g.coeff(0).neg();
        coords = coords.iter().map(|x| NfElem::from_gq(&x.poly().eval(&root))).collect();
        (NfElem::from_gq(&root), None)
    } else {
        let field = NumberField::new(&g);
        (field.generator(), Some(e.value.clone()))
    };
    Ok(EigenClass { s, coords, eigenvalue, embedding })
}

/// Matrix of `x ↦ t ∪ x` from `H^{p,p}` to `H^{p+s,p+s}` over the field of `t`.
fn cup_with(cup: &CupProduct, s: usize, t: &[NfElem], p: usize) -> Matrix<NfElem> {
    let rows = cup.dims[p + s];
    let mut out = Matrix::<NfElem>::zeros(rows, cup.dims[p]);
    for (jj, tj) in t.iter().enumerate() {
        if tj.is_zero() {
            continue;
        }
        for i in 0..cup.dims[p] {
            let prod = cup.basis_product(s, jj, p, i);
            for (r, v) in prod.iter().enumerate() {
                if !v.is_zero() {
                    let acc = out.get(r, i).add(&tj.mul(&NfElem::from_gq(v)));
                    out.set(r, i, acc);
                }
            }
        }
    }
    out
}

/// Spectral radius and multiplicity of a matrix over a number field.
fn spectral_data_nf(q: &Matrix<NfElem>, embedding: Option<&Complex>, prec: u32) -> Result<(Float, usize, bool)> {
    let n = q.rows();
    if n == 0 {
        return Ok((Float::with_val(prec, 0), 0, true));
    }
    if q.entries().iter().all(|x| x.as_scalar().is_some()) {
        let e = q.map(|x| x.as_scalar().expect("scalar"));
        let j = eigen_structure(&e, prec)?;
        return Ok((Float::with_val(prec, &j.spectral_radius), j.multiplicity, true));
    }
    let wp = prec + 64;
    let qc = q.to_complex(embedding, wp);
    let cp: Poly<NfElem> = q.char_poly();
    let mut cands: Vec<(Complex, usize)> = Vec::new();
    for (g, mult) in cp.squarefree_decomposition() {
        let coeffs: Vec<Complex> = g.coeffs().iter().map(|c| embed_at(c, embedding, wp)).collect();
        for z in complex_roots(&coeffs, wp) {
            cands.push((z, mult));
        }
    }
    let modulus = |z: &Complex| Float::with_val(wp, z.abs_ref());
    let rho = cands.iter().map(|(z, _)| modulus(z)).fold(Float::with_val(wp, 0), |a, b| a.max(&b));
    let tie = Float::with_val(wp, &rho * Float::with_val(wp, Float::i_exp(1, -(prec as i32) / 2)));
    let tol = Float::with_val(wp, Float::i_exp(1, -(prec as i32) / 2));
    let mut best = 0;
    for (z, mult) in cands.iter().filter(|(z, _)| Float::with_val(wp, &rho - modulus(z)) <= tie) {
        let shifted = qc.sub(&CMatrix::identity(n, wp).scale(z));
        let mut pw = shifted.clone();
        let mut size = 1;
        while size < *mult && n - pw.numeric_rank(&tol) < *mult {
            pw = pw.mul(&shifted);
            size += 1;
        }
        best = best.max(size);
    }
    Ok((Float::with_val(prec, &rho), best, false))
}

#[derive(Debug, Clone)]
pub struct RelativeDegreeProfile {
    pub s: usize,
    pub t_class: Vec<Complex>,
    pub lambda_t: Float,
    /// `λ_p(T)` for `p = 1..=k−s` (index `p − 1`).
    pub relative_degrees: Vec<Float>,
    pub relative_multiplicities: Vec<usize>,
    /// `dim N^{p,p}(T)` and `dim H^{p,p}(T)`.
    pub kernel_dims: Vec<usize>,
    pub quotient_dims: Vec<usize>,
    /// Whether the spectra were computed exactly (rational `T`) rather than
    /// from numerical roots of the exact characteristic polynomial.
    pub exact: bool,
    pub precision: u32,
}

impl RelativeDegreeProfile {
    pub fn degree(&self, p: usize) -> &Float {
        &self.relative_degrees[p - 1]
    }

    pub fn max_p(&self) -> usize {
        self.relative_degrees.len()
    }
}

/// Induced action of `f*` on `H^{p,p}(X) / N^{p,p}(T)` with
/// `N^{p,p}(T) = ker([T] ∪ ·)`, over the field of `T`.
pub fn quotient_action(action: &GradedCohomologyAction, t: &EigenClass, p: usize) -> Result<(Matrix<NfElem>, usize)> {
    let cup = action.cup.as_ref().ok_or(Error::CupMissing)?;
    let n = action.blocks[p].rows();
    let mult = cup_with(cup, t.s, &t.coords, p);
    let kernel = mult.kernel();
    let kdim = kernel.len();
    if kdim == n {
        return Ok((Matrix::zeros(0, 0), kdim));
    }
    let mut cols = kernel;
    if kdim > 0 {
        let mut aug = Matrix::<NfElem>::zeros(n, kdim + n);
        for (c, v) in cols.iter().enumerate() {
            for (r, x) in v.iter().enumerate() {
                aug.set(r, c, x.clone());
            }
        }
        for r in 0..n {
            aug.set(r, kdim + r, NfElem::one());
        }
        let (_, pivots) = aug.rref();
        for &pc in pivots.iter().filter(|&&c| c >= kdim) {
            let mut e = vec![NfElem::zero(); n];
            e[pc - kdim] = NfElem::one();
            cols.push(e);
        }
    } else {
        cols = (0..n)
            .map(|i| {
                let mut e = vec![NfElem::zero(); n];
                e[i] = NfElem::one();
                e
            })
            .collect();
    }
    let s = Matrix::from_columns(&cols);
    let b = action.blocks[p].map(NfElem::from_gq);
    let conj = s.inverse().expect("basis").mul(&b).mul(&s);
    let idx: Vec<usize> = (kdim..n).collect();
    Ok((conj.submatrix(&idx, &idx), kdim))
}

pub fn relative_degrees(action: &GradedCohomologyAction, t: &EigenClass, prec: u32) -> Result<RelativeDegreeProfile> {
    let cup = action.cup.as_ref().ok_or(Error::CupMissing)?;
    let s = t.s;
    if s >= action.k || t.coords.len() != cup.dims[s] {
        return Err(Error::DimensionMismatch(format!("class of length {} in degree {s}", t.coords.len())));
    }
    let b = action.blocks[s].map(NfElem::from_gq);
    let image = b.mul_vec(&t.coords);
    let residual: Vec<NfElem> = image.iter().zip(&t.coords).map(|(x, y)| x.sub(&t.eigenvalue.mul(y))).collect();
    if residual.iter().any(|x| !x.is_zero()) {
        let num: Vec<Complex> = residual.iter().map(|x| embed_at(x, t.embedding.as_ref(), 64)).collect();
        return Err(Error::NotEigenclass { residual: format!("{:.3e}", vec_norm_inf(&num).to_f64()) });
    }
    if t.coords.iter().all(Field::is_zero) {
        return Err(Error::Invalid("the class T is zero".into()));
    }
    let lambda_t = Float::with_val(prec, t.eigenvalue_value(prec).abs_ref());
    let results: Vec<Result<(Float, usize, usize, usize, bool)>> = (1..=action.k - s)
        .into_par_iter()
        .map(|p| {
            let (q, kdim) = quotient_action(action, t, p)?;
            let (rho, l, exact) = spectral_data_nf(&q, t.embedding.as_ref(), prec)?;
            Ok((rho, l, kdim, q.rows(), exact))
        })
        .collect();
    let mut out = RelativeDegreeProfile {
        s,
        t_class: t.numeric(prec),
        lambda_t,
        relative_degrees: Vec::new(),
        relative_multiplicities: Vec::new(),
        kernel_dims: Vec::new(),
        quotient_dims: Vec::new(),
        exact: true,
        precision: prec,
    };
    for r in results {
        let (rho, l, kdim, qdim, exact) = r?;
        out.relative_degrees.push(rho);
        out.relative_multiplicities.push(l);
        out.kernel_dims.push(kdim);
        out.quotient_dims.push(qdim);
        out.exact &= exact;
    }
    Ok(out)
}

/// `λ_{p,n}(T) = ‖[T] ∪ (f^n)*[ω^p]‖` for the requested `n`.
pub fn relative_degree_sequence(
    action: &GradedCohomologyAction,
    t: &EigenClass,
    p: usize,
    n_values: &[u64],
    budget: usize,
    prec: u32,
) -> Result<Vec<Float>> {
    let cup = action.cup.as_ref().ok_or(Error::CupMissing)?;
    let mult = cup_with(cup, t.s, &t.coords, p);
    let n_max = n_values.iter().copied().max().unwrap_or(0);
    let mut out = Vec::new();
    exact_orbit(&action.blocks[p], &action.kahler_class[p], n_max, budget, |n, v| {
        if n_values.contains(&n) {
            let v: Vec<NfElem> = v.iter().map(NfElem::from_gq).collect();
            let w: Vec<Complex> =
                mult.mul_vec(&v).iter().map(|x| embed_at(x, t.embedding.as_ref(), prec)).collect();
            out.push(vec_norm_inf(&w));
        }
    })?;
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct SubmultiplicativityReport {
    pub p1: usize,
    pub p2: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `λ_{p1} λ_{p2} − λ_{p1+p2}`.
    pub margin: f64,
    pub tolerance: f64,
    pub holds: bool,
}

pub fn submultiplicativity_check(
    rel: &RelativeDegreeProfile,
    p1: usize,
    p2: usize,
    tol: f64,
) -> Result<SubmultiplicativityReport> {
    if p1 == 0 || p2 == 0 || p1 + p2 > rel.max_p() {
        return Err(Error::Invalid(format!("need p1, p2 ≥ 1 and p1 + p2 ≤ {}", rel.max_p())));
    }
    let prec = rel.precision;
    let lhs = Float::with_val(prec, rel.degree(p1 + p2));
    let rhs = Float::with_val(prec, rel.degree(p1) * rel.degree(p2));
    let margin = Float::with_val(prec, &rhs - &lhs).to_f64();
    Ok(SubmultiplicativityReport {
        p1,
        p2,
        lhs: lhs.to_f64(),
        rhs: rhs.to_f64(),
        margin,
        tolerance: tol,
        holds: margin >= -tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MassBoundReport {
    /// `λ_1(T)^{k−s}`.
    pub lhs: f64,
    /// `λ_T^{-1}`.
    pub rhs: f64,
    pub holds: bool,
}

/// `λ_1(T)^{k−s} ≥ λ_T^{-1}`.
pub fn mass_bound_check(rel: &RelativeDegreeProfile, tol: f64) -> MassBoundReport {
    let prec = rel.precision;
    let lhs = Float::with_val(prec, rel.degree(1).pow(rel.max_p() as u32));
    let rhs = Float::with_val(prec, rel.lambda_t.recip_ref());
    MassBoundReport { lhs: lhs.to_f64(), rhs: rhs.to_f64(), holds: Float::with_val(prec, &lhs - &rhs).to_f64() >= -tol }
}

#[derive(Debug, Clone)]
pub struct CesaroReport {
    pub s: usize,
    pub degree: Float,
    pub multiplicity: usize,
    /// Limit of `S_N` computed from the dominant spectral projector.
    pub limit: Vec<Complex>,
    /// Last Cesàro average `S_{N_max}`.
    pub last_average: Vec<Complex>,
    pub n_values: Vec<u64>,
    /// `‖S_N − limit‖∞`.
    pub deviations: Vec<f64>,
    pub rate: RateFit,
    /// `‖f*·limit − d_s·limit‖∞`.
    pub eigen_residual: f64,
}

/// `S_N = (1/N) Σ_{n=1}^N (f^n)*S / (n^{l_s−1} d_s^n)` and its limit
/// `π∘Λ∞ S`, where `π∘Λ∞` keeps the components with eigenvalue exactly `d_s`.
pub fn cesaro_class_limit(
    action: &GradedCohomologyAction,
    s: usize,
    class: &[Gq],
    n_max: u64,
    budget: usize,
    prec: u32,
) -> Result<CesaroReport> {
    let b = &action.blocks[s];
    if class.len() != b.rows() {
        return Err(Error::DimensionMismatch(format!("class of length {} in degree {s}", class.len())));
    }
    let j = eigen_structure(b, prec)?;
    let wp = prec + 32;
    let dim = b.rows();
    let mut avg_op = CMatrix::zeros(dim, dim, wp);
    for c in dominant_components(b, &j, prec).iter().filter(|c| c.order == Some(1)) {
        avg_op = avg_op.add(&c.limit);
    }
    let sc = to_complex_vec(class, wp);
    let limit = avg_op.mul_vec(&sc);
    let d = Float::with_val(wp, &j.spectral_radius);
    let l = j.multiplicity;
    let mut acc = vec![Complex::new(wp); dim];
    let mut ns = Vec::new();
    let mut devs = Vec::new();
    let mut last = acc.clone();
    let zero = class.iter().all(Field::is_zero);
    exact_orbit(b, class, n_max, budget, |n, v| {
        let denom = Float::with_val(wp, (&d).pow(n as u32)) * Float::with_val(wp, n).pow(l as u32 - 1);
        for (a, x) in acc.iter_mut().zip(v) {
            *a += Complex::with_val(wp, x.to_complex(wp) / &denom);
        }
        let avg: Vec<Complex> = acc.iter().map(|a| Complex::with_val(wp, a / n)).collect();
        let dev: Vec<Complex> = avg.iter().zip(&limit).map(|(a, b)| Complex::with_val(wp, a - b)).collect();
        ns.push(n);
        devs.push(vec_norm_inf(&dev).to_f64());
        last = avg;
    })?;
    let fit_hi = (n_max / 4).max(2);
    let rate = fit_rate(&ns, &devs, (fit_hi.min(20).max(1), fit_hi), (fit_hi + 1, n_max), true, rounding_floor(prec));
    let image = b.to_complex(None, wp).mul_vec(&limit);
    let resid: Vec<Complex> =
        image.iter().zip(&limit).map(|(x, y)| Complex::with_val(wp, x - Complex::with_val(wp, y * &d))).collect();
    let limit = if zero { vec![Complex::new(wp); dim] } else { limit };
    Ok(CesaroReport {
        s,
        degree: Float::with_val(prec, &d),
        multiplicity: l,
        limit,
        last_average: last,
        n_values: ns,
        deviations: devs,
        rate,
        eigen_residual: vec_norm_inf(&resid).to_f64(),
    })
}

/// Classes over ℚ(i) killed by the Cesàro limit: the generalized eigenspaces
/// of every irreducible factor other than the one carrying `d_s`. Conjugates
/// of `d_s` share its factor, so their eigenvectors are not included.
pub fn cesaro_kernel_basis(action: &GradedCohomologyAction, s: usize, prec: u32) -> Result<Vec<Vec<Gq>>> {
    let b = &action.blocks[s];
    let j = eigen_structure(b, prec)?;
    let keep: Vec<usize> = j
        .dominant_eigenvalues
        .iter()
        .filter(|&&e| j.theta_of_eigenvalue(e).1 == Some(1))
        .map(|&e| j.eigenvalues[e].factor)
        .collect();
    let n = b.rows();
    let mut prod = ExactMatrix::identity(n);
    let mut any = false;
    for (fi, (p, e)) in j.factors.iter().enumerate() {
        if keep.contains(&fi) {
            continue;
        }
        any = true;
        let pe = p.pow(*e as u32);
        let mut m = ExactMatrix::zeros(n, n);
        for c in pe.coeffs().iter().rev() {
            m = m.mul(b).add(&ExactMatrix::identity(n).scale(c));
        }
        prod = prod.mul(&m);
    }
    if !any {
        return Ok(Vec::new());
    }
    // the product kills exactly the generalized eigenspaces of the other factors
    Ok(prod.kernel())
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainEntry {
    pub s: usize,
    /// Lower bound `d_m / d_{k−s+m}` for `c_s`.
    pub lower_bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub applicable: bool,
    pub reason: Option<String>,
    pub m: usize,
    /// `c_s = d_s` for `s ≤ m`.
    pub increasing_part: Vec<f64>,
    pub entries: Vec<ChainEntry>,
    pub holds: bool,
}

/// With all degrees distinct, `1 < d_1 < … < d_m > … > d_k = 1`, and the
/// invariant classes built for `s > m` have eigenvalues `c_s ≥ d_m / d_{k−s+m} > 1`
/// for `m ≤ s ≤ k − 1`.
pub fn degree_chain_check(profile: &DegreeProfile) -> ChainReport {
    let k = profile.k;
    let d = &profile.degrees;
    let not_applicable = |why: &str| ChainReport {
        applicable: false,
        reason: Some(why.to_string()),
        m: 0,
        increasing_part: Vec::new(),
        entries: Vec::new(),
        holds: false,
    };
    for a in 1..=k {
        for b in a + 1..=k {
            if close(&d[a], &d[b]) {
                return not_applicable(&format!("d_{a} and d_{b} coincide"));
            }
        }
    }
    if d[1] <= 1 {
        return not_applicable("d_1 is not larger than 1");
    }
    let df: Vec<f64> = profile.degrees_f64();
    let m = (1..=k).max_by(|&a, &b| df[a].total_cmp(&df[b])).expect("k ≥ 1");
    let mut holds = (1..m).all(|p| df[p] < df[p + 1]) && (m..k).all(|p| df[p] > df[p + 1]);
    let mut entries = Vec::new();
    for s in m..k {
        let bound = df[m] / df[k - s + m];
        let ok = bound > 1.0;
        holds &= ok;
        entries.push(ChainEntry { s, lower_bound: bound, holds: ok });
    }
    ChainReport { applicable: true, reason: None, m, increasing_part: df[1..=m].to_vec(), entries, holds }
}
