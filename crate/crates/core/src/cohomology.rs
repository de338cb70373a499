//! Graded actions `f*` on `H^{p,p}` for complex tori, Mazur hypersurfaces in
//! `(P¹)^{k+1}` and user-supplied matrices.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arith::{Field, Gq};
use crate::error::{Error, Result};
use crate::matrix::{subsets, ExactMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModelTag {
    Torus,
    Mazur,
    Raw,
}

/// Structure constants of the cup product `H^{p,p} × H^{q,q} → H^{p+q,p+q}`
/// for `p, q ≥ 1`; products with `H^{0,0}` are scalar multiplication.
///
/// Entries are keyed by `(p, i, q, j)` with `(p, i) ≤ (q, j)`; missing keys
/// are zero products.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CupProduct {
    pub dims: Vec<usize>,
    table: BTreeMap<(usize, usize, usize, usize), Vec<(usize, Gq)>>,
}

impl CupProduct {
    pub fn new(dims: Vec<usize>) -> Self {
        CupProduct { dims, table: BTreeMap::new() }
    }

    pub fn k(&self) -> usize {
        self.dims.len() - 1
    }

    fn key(p: usize, i: usize, q: usize, j: usize) -> (usize, usize, usize, usize) {
        if (p, i) <= (q, j) {
            (p, i, q, j)
        } else {
            (q, j, p, i)
        }
    }

    /// Sets `e^p_i ∪ e^q_j` (and, by commutativity, `e^q_j ∪ e^p_i`).
    pub fn insert(&mut self, p: usize, i: usize, q: usize, j: usize, value: &[Gq]) {
        let sparse: Vec<(usize, Gq)> =
            value.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(c, v)| (c, v.clone())).collect();
        let key = Self::key(p, i, q, j);
        if sparse.is_empty() {
            self.table.remove(&key);
        } else {
            self.table.insert(key, sparse);
        }
    }

    pub fn basis_product(&self, p: usize, i: usize, q: usize, j: usize) -> Vec<Gq> {
        let mut out = vec![Gq::zero(); self.dims[p + q]];
        if p == 0 || q == 0 {
            let idx = if p == 0 { j } else { i };
            out[idx] = Gq::one();
            return out;
        }
        if let Some(terms) = self.table.get(&Self::key(p, i, q, j)) {
            for (c, v) in terms {
                out[*c] = v.clone();
            }
        }
        out
    }

    /// Nonzero entries as `((p, i, q, j), sparse value)`.
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, usize, usize), &Vec<(usize, Gq)>)> {
        self.table.iter()
    }

    pub fn product(&self, p: usize, a: &[Gq], q: usize, b: &[Gq]) -> Vec<Gq> {
        let mut out = vec![Gq::zero(); self.dims[p + q]];
        if p == 0 || q == 0 {
            let (s, v) = if p == 0 { (&a[0], b) } else { (&b[0], a) };
            return v.iter().map(|x| x.mul(s)).collect();
        }
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                if let Some(terms) = self.table.get(&Self::key(p, i, q, j)) {
                    let c = ai.mul(bj);
                    for (t, v) in terms {
                        out[*t] = out[*t].add(&c.mul(v));
                    }
                }
            }
        }
        out
    }

    /// `a ∪ a ∪ … ∪ a` (`n` factors) for `a ∈ H^{p,p}`.
    pub fn power(&self, p: usize, a: &[Gq], n: usize) -> Vec<Gq> {
        let mut acc = vec![Gq::one()];
        for step in 0..n {
            acc = self.product(step * p, &acc, p, a);
        }
        acc
    }

    /// Matrix of `x ↦ t ∪ x` from `H^{p,p}` to `H^{p+s,p+s}` for `t ∈ H^{s,s}`.
    pub fn multiplication_matrix(&self, s: usize, t: &[Gq], p: usize) -> ExactMatrix {
        let cols: Vec<Vec<Gq>> = (0..self.dims[p])
            .map(|i| {
                let mut e = vec![Gq::zero(); self.dims[p]];
                e[i] = Gq::one();
                self.product(s, t, p, &e)
            })
            .collect();
        if cols.is_empty() {
            return ExactMatrix::zeros(self.dims[p + s], 0);
        }
        ExactMatrix::from_columns(&cols)
    }
}

/// Matrices of `f*` on every `H^{p,p}`, `p = 0..=k`, acting on coordinate columns.
#[derive(Debug, Clone)]
pub struct GradedCohomologyAction {
    pub k: usize,
    pub blocks: Vec<ExactMatrix>,
    /// Coordinates of `[ω^p]`.
    pub kahler_class: Vec<Vec<Gq>>,
    /// Matrices of `f_*`.
    pub pushforward_blocks: Option<Vec<ExactMatrix>>,
    pub cup: Option<CupProduct>,
    pub model_tag: ModelTag,
    /// Set when the blocks act on an invariant sublattice only, so that
    /// degrees are lower bounds rather than degrees of the manifold.
    pub sublattice: bool,
    pub basis_labels: Vec<Vec<String>>,
    pub warnings: Vec<String>,
}

impl GradedCohomologyAction {
    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(ExactMatrix::rows).collect()
    }

    /// The action of `f⁻¹`, whose pullback is `f_*`.
    pub fn inverse(&self) -> Result<GradedCohomologyAction> {
        let push = match &self.pushforward_blocks {
            Some(p) => p.clone(),
            None => self.blocks.iter().map(|b| b.inverse().ok_or(Error::NotInvertible)).collect::<Result<_>>()?,
        };
        Ok(GradedCohomologyAction {
            blocks: push,
            pushforward_blocks: Some(self.blocks.clone()),
            warnings: Vec::new(),
            ..self.clone()
        })
    }

    /// Re-expresses the action as raw input data.
    pub fn to_raw(&self) -> RawModel {
        RawModel {
            blocks: self.blocks.clone(),
            kahler_class: self.kahler_class.clone(),
            pushforward_blocks: self.pushforward_blocks.clone(),
            cup: self.cup.clone(),
        }
    }
}

/// Verifies `f*(e_i ∪ e_j) = f*e_i ∪ f*e_j` on every pair of basis classes.
pub fn check_cup_compatibility(blocks: &[ExactMatrix], cup: &CupProduct) -> Result<()> {
    let k = blocks.len() - 1;
    let images: Vec<Vec<Vec<Gq>>> = blocks.iter().map(|b| (0..b.cols()).map(|c| b.column(c)).collect()).collect();
    for p in 1..=k {
        for q in p..=k - p {
            for i in 0..cup.dims[p] {
                let j0 = if p == q { i } else { 0 };
                for j in j0..cup.dims[q] {
                    let lhs = blocks[p + q].mul_vec(&cup.basis_product(p, i, q, j));
                    let rhs = cup.product(p, &images[p][i], q, &images[q][j]);
                    if lhs != rhs {
                        return Err(Error::CupIncompatible(format!(
                            "f*(e{p}_{i} ∪ e{q}_{j}) differs from f*e{p}_{i} ∪ f*e{q}_{j}"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Linear automorphism `z ↦ A z` of `ℂ^k / ℤ[i]^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusAutomorphism {
    pub a: ExactMatrix,
}

impl TorusAutomorphism {
    pub fn new(a: ExactMatrix) -> Result<Self> {
        if !a.is_square() || a.rows() == 0 {
            return Err(Error::DimensionMismatch(format!("torus matrix is {}×{}", a.rows(), a.cols())));
        }
        if !a.entries().iter().all(Gq::is_gaussian_integer) {
            return Err(Error::Invalid("torus matrix entries must be Gaussian integers".into()));
        }
        let det = a.det();
        if det.norm_sqr() != 1 {
            return Err(Error::NotUnitDeterminant { det: det.to_string() });
        }
        Ok(TorusAutomorphism { a })
    }

    pub fn k(&self) -> usize {
        self.a.rows()
    }

    pub fn inverse(&self) -> TorusAutomorphism {
        TorusAutomorphism { a: self.a.inverse().expect("unit determinant") }
    }
}

/// Sign of the shuffle that sorts `a ++ b`; zero when they meet.
fn shuffle_sign(a: &[usize], b: &[usize]) -> i64 {
    let mut inversions = 0;
    for x in a {
        for y in b {
            if x == y {
                return 0;
            }
            if x > y {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn union_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    u
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Cohomology of the torus in the basis
/// `b_IJ = i^p (−1)^{p(p−1)/2} dz_I ∧ dz̄_J`, `|I| = |J| = p`, ordered `I`-major.
///
/// In this basis `b_IJ ∪ b_KL = ε(I,K) ε(J,L) b_{I∪K, J∪L}`, complex conjugation
/// sends `b_IJ` to `b_JI`, and real classes have Hermitian coefficient matrices.
pub fn torus_action(t: &TorusAutomorphism) -> Result<GradedCohomologyAction> {
    let k = t.k();
    let at = t.a.transpose();
    let mut blocks = Vec::with_capacity(k + 1);
    let mut push = Vec::with_capacity(k + 1);
    let mut kahler = Vec::with_capacity(k + 1);
    let mut labels = Vec::with_capacity(k + 1);
    let subs: Vec<Vec<Vec<usize>>> = (0..=k).map(|p| subsets(k, p)).collect();
    for p in 0..=k {
        let c = at.compound(p);
        let b = c.kron(&c.conj());
        push.push(b.inverse().ok_or(Error::NotInvertible)?);
        blocks.push(b);
        let n = subs[p].len();
        let mut w = vec![Gq::zero(); n * n];
        for i in 0..n {
            w[i * n + i] = Gq::int(factorial(p));
        }
        kahler.push(w);
        let fmt = |s: &[usize]| s.iter().map(|x| (x + 1).to_string()).collect::<String>();
        labels.push(
            subs[p].iter().flat_map(|i| subs[p].iter().map(move |j| format!("b[{};{}]", fmt(i), fmt(j)))).collect(),
        );
    }
    let dims: Vec<usize> = blocks.iter().map(ExactMatrix::rows).collect();
    let mut cup = CupProduct::new(dims.clone());
    let index: Vec<BTreeMap<Vec<usize>, usize>> =
        subs.iter().map(|s| s.iter().enumerate().map(|(n, v)| (v.clone(), n)).collect()).collect();
    for p in 1..=k {
        for q in p..=k - p {
            let (np, nq) = (subs[p].len(), subs[q].len());
            let nr = subs[p + q].len();
            for (ii, i) in subs[p].iter().enumerate() {
                for (jj, j) in subs[p].iter().enumerate() {
                    for (kk, kset) in subs[q].iter().enumerate() {
                        let s1 = shuffle_sign(i, kset);
                        if s1 == 0 {
                            continue;
                        }
                        for (ll, l) in subs[q].iter().enumerate() {
                            let s2 = shuffle_sign(j, l);
                            if s2 == 0 {
                                continue;
                            }
                            let a = ii * np + jj;
                            let b = kk * nq + ll;
                            if p == q && b < a {
                                continue;
                            }
                            let r = index[p + q][&union_sorted(i, kset)] * nr + index[p + q][&union_sorted(j, l)];
                            let mut v = vec![Gq::zero(); dims[p + q]];
                            v[r] = Gq::int(s1 * s2);
                            cup.insert(p, a, q, b, &v);
                        }
                    }
                }
            }
        }
    }
    Ok(GradedCohomologyAction {
        k,
        blocks,
        kahler_class: kahler,
        pushforward_blocks: Some(push),
        cup: Some(cup),
        model_tag: ModelTag::Torus,
        sublattice: false,
        basis_labels: labels,
        warnings: Vec::new(),
    })
}

/// Hypersurface of multidegree `(2,…,2)` in `(P¹)^{k+1}` with its `k+1`
/// covering involutions, acting on the span of the hyperplane classes `h_j`.
#[derive(Debug, Clone)]
pub struct MazurModel {
    pub k: usize,
    /// Nonzero intersection numbers `∫ h_{j₁}⋯h_{j_k}`, keyed by sorted index lists.
    pub intersection_numbers: BTreeMap<Vec<usize>, i64>,
    /// `τ_i*` on `span(h_1, …, h_{k+1})`, columns are images.
    pub involutions: Vec<ExactMatrix>,
    /// Whether the push-pull computation reproduced the closed form.
    pub closed_form_agrees: bool,
    /// Whether every `τ_i*` preserves the `k`-linear intersection form.
    /// Fails for `k ≥ 3`: the three coefficient sections of `π_i` are ample on
    /// `(P¹)^k` and always vanish together, so `π_i` is never finite there and
    /// `τ_i` is only birational.
    pub form_preserved: bool,
    /// One-based indices; `f = τ_{i₁} ∘ … ∘ τ_{i_ℓ}`.
    pub word: Vec<usize>,
}

impl MazurModel {
    pub fn with_word(mut self, word: Vec<usize>) -> Self {
        self.word = word;
        self
    }

    /// `∫ h_{j₁}⋯h_{j_k}` for any multiset of zero-based indices.
    pub fn intersection(&self, idx: &[usize]) -> i64 {
        let mut s = idx.to_vec();
        s.sort_unstable();
        *self.intersection_numbers.get(&s).unwrap_or(&0)
    }

    /// `∫ v₁ ∪ … ∪ v_k` for classes in `span(h_j)`.
    pub fn integrate(&self, vs: &[Vec<Gq>]) -> Gq {
        let mut total = Gq::zero();
        for (s, val) in &self.intersection_numbers {
            let m: Vec<Vec<Gq>> = vs.iter().map(|v| s.iter().map(|&j| v[j].clone()).collect()).collect();
            total = total.add(&permanent(&m).mul(&Gq::int(*val)));
        }
        total
    }

    /// Matrix of `f*` on `span(h_j)`: `τ_{i_ℓ}* ⋯ τ_{i₁}*`.
    pub fn word_matrix(&self, word: &[usize]) -> Result<ExactMatrix> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        let mut m = ExactMatrix::identity(self.k + 1);
        for &i in word {
            if i == 0 || i > self.k + 1 {
                return Err(Error::Invalid(format!("word index {i} outside 1..={}", self.k + 1)));
            }
            m = self.involutions[i - 1].mul(&m);
        }
        Ok(m)
    }

    /// Checks that every involution preserves the intersection form.
    /// For `k = 2` this is `τᵀ G τ = G` for the Gram matrix `G`.
    pub fn preserves_intersection_form(&self) -> bool {
        let n = self.k + 1;
        let basis: Vec<Vec<Gq>> = (0..n).map(|j| unit(n, j)).collect();
        let tuples = multisets(n, self.k);
        self.involutions.iter().all(|t| {
            let imgs: Vec<Vec<Gq>> = (0..n).map(|j| t.column(j)).collect();
            tuples.iter().all(|tu| {
                let a: Vec<Vec<Gq>> = tu.iter().map(|&j| imgs[j].clone()).collect();
                let b: Vec<Vec<Gq>> = tu.iter().map(|&j| basis[j].clone()).collect();
                self.integrate(&a) == self.integrate(&b)
            })
        })
    }

    /// Intersection pairing on `span(h_j)` for `k = 2`.
    pub fn gram(&self) -> Option<ExactMatrix> {
        (self.k == 2).then(|| {
            let n = 3;
            let mut g = ExactMatrix::zeros(n, n);
            for a in 0..n {
                for b in 0..n {
                    g.set(a, b, Gq::int(self.intersection(&[a, b])));
                }
            }
            g
        })
    }
}

fn unit(n: usize, j: usize) -> Vec<Gq> {
    let mut v = vec![Gq::zero(); n];
    v[j] = Gq::one();
    v
}

fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Permanent of a square matrix given by rows (Laplace expansion; sizes are small).
pub fn permanent(m: &[Vec<Gq>]) -> Gq {
    fn rec(m: &[Vec<Gq>], row: usize, used: &mut Vec<bool>) -> Gq {
        if row == m.len() {
            return Gq::one();
        }
        let mut acc = Gq::zero();
        for c in 0..m.len() {
            if used[c] || m[row][c].is_zero() {
                continue;
            }
            used[c] = true;
            acc = acc.add(&m[row][c].mul(&rec(m, row + 1, used)));
            used[c] = false;
        }
        acc
    }
    rec(m, 0, &mut vec![false; m.len()])
}

/// Involutions from the push-pull identity `Id + τ_i* = π_i* π_{i*}`.
pub fn mazur_involutions(k: usize) -> Result<MazurModel> {
    if k < 2 {
        return Err(Error::Invalid("Mazur models need k ≥ 2".into()));
    }
    let n = k + 1;
    let intersection_numbers: BTreeMap<Vec<usize>, i64> = subsets(n, k).into_iter().map(|s| (s, 2)).collect();
    let integral = |idx: &[usize]| -> i64 {
        let mut s = idx.to_vec();
        s.sort_unstable();
        *intersection_numbers.get(&s).unwrap_or(&0)
    };
    let mut involutions = Vec::with_capacity(n);
    let mut agrees = true;
    for i in 0..n {
        let mut t = ExactMatrix::zeros(n, n);
        for a in 0..n {
            // π_{i*} h_a = Σ_{j≠i} c_j H_j with c_j the degree of h_a on the
            // curve π_i*(∏_{l∉{i,j}} H_l)
            for j in (0..n).filter(|&j| j != i) {
                let mut idx: Vec<usize> = (0..n).filter(|&l| l != i && l != j).collect();
                idx.push(a);
                t.set(j, a, Gq::int(integral(&idx)));
            }
            t.set(a, a, t.get(a, a).sub(&Gq::one()));
        }
        let mut closed = ExactMatrix::identity(n);
        closed.set(i, i, Gq::int(-1));
        for j in (0..n).filter(|&j| j != i) {
            closed.set(j, i, Gq::int(2));
        }
        agrees &= t == closed;
        involutions.push(t);
    }
    let mut model = MazurModel {
        k,
        intersection_numbers,
        involutions,
        closed_form_agrees: agrees,
        form_preserved: false,
        word: Vec::new(),
    };
    model.form_preserved = model.preserves_intersection_form();
    Ok(model)
}

/// Degree-`p` piece of the subring generated by the `h_j`, modulo classes
/// that pair to zero with every complementary monomial.
struct MonomialQuotient {
    monomials: Vec<Vec<usize>>,
    /// Monomials forming the basis of the quotient.
    basis: Vec<usize>,
    pairing: ExactMatrix,
    /// Invertible square piece of the pairing on the basis columns.
    rows: Vec<usize>,
    reducer: ExactMatrix,
}

impl MonomialQuotient {
    fn new(model: &MazurModel, p: usize) -> Self {
        let n = model.k + 1;
        let monomials = subsets(n, p);
        let duals = subsets(n, model.k - p);
        let mut pairing = ExactMatrix::zeros(duals.len(), monomials.len());
        for (r, t) in duals.iter().enumerate() {
            for (c, s) in monomials.iter().enumerate() {
                let idx: Vec<usize> = s.iter().chain(t).copied().collect();
                pairing.set(r, c, Gq::int(model.intersection(&idx)));
            }
        }
        let (_, basis) = pairing.rref();
        let sub = pairing.submatrix(&(0..duals.len()).collect::<Vec<_>>(), &basis);
        let (_, rows) = sub.transpose().rref();
        let reducer = sub.submatrix(&rows, &(0..basis.len()).collect::<Vec<_>>()).inverse().expect("independent rows");
        MonomialQuotient { monomials, basis, pairing, rows, reducer }
    }

    fn reduce(&self, x: &[Gq]) -> Vec<Gq> {
        let paired = self.pairing.mul_vec(x);
        let picked: Vec<Gq> = self.rows.iter().map(|&r| paired[r].clone()).collect();
        self.reducer.mul_vec(&picked)
    }

    fn position(&self, s: &[usize]) -> usize {
        self.monomials.iter().position(|m| m == s).expect("monomial")
    }
}

/// `f*` on the numerical quotients of the subring generated by `h_1..h_{k+1}`.
///
/// `blocks[1]` is the word matrix on the `h_j`; `blocks[p]` comes from
/// expanding `∏_{s∈S} f*h_s` with `h_j² = 0`. Always flagged as a sublattice.
pub fn mazur_action(model: &MazurModel) -> Result<GradedCohomologyAction> {
    let f1 = model.word_matrix(&model.word)?;
    if !model.form_preserved {
        return Err(Error::HypothesisViolated(format!(
            "for k = {} the projections π_i cannot all be finite, so τ_i* does not preserve the intersection form",
            model.k
        )));
    }
    let k = model.k;
    let n = k + 1;
    let quotients: Vec<MonomialQuotient> = (0..=k).map(|p| MonomialQuotient::new(model, p)).collect();
    let mut blocks = Vec::with_capacity(k + 1);
    let mut kahler = Vec::with_capacity(k + 1);
    let mut labels = Vec::with_capacity(k + 1);
    for (p, q) in quotients.iter().enumerate() {
        let cols: Vec<Vec<Gq>> = q
            .basis
            .iter()
            .map(|&b| {
                let s = &q.monomials[b];
                let image: Vec<Gq> = q
                    .monomials
                    .iter()
                    .map(|t| {
                        let m: Vec<Vec<Gq>> =
                            t.iter().map(|&r| s.iter().map(|&c| f1.get(r, c).clone()).collect()).collect();
                        permanent(&m)
                    })
                    .collect();
                q.reduce(&image)
            })
            .collect();
        blocks.push(ExactMatrix::from_columns(&cols));
        let omega: Vec<Gq> = vec![Gq::int(factorial(p)); q.monomials.len()];
        kahler.push(q.reduce(&omega));
        labels.push(
            q.basis
                .iter()
                .map(|&b| {
                    let s = &q.monomials[b];
                    if s.is_empty() {
                        "1".to_string()
                    } else {
                        s.iter().map(|j| format!("h{}", j + 1)).collect::<Vec<_>>().join("·")
                    }
                })
                .collect(),
        );
    }
    let dims: Vec<usize> = blocks.iter().map(ExactMatrix::rows).collect();
    let mut cup = CupProduct::new(dims.clone());
    for p in 1..=k {
        for q in p..=k - p {
            for (a, &sa) in quotients[p].basis.iter().enumerate() {
                for (b, &sb) in quotients[q].basis.iter().enumerate() {
                    if p == q && b < a {
                        continue;
                    }
                    let s = &quotients[p].monomials[sa];
                    let t = &quotients[q].monomials[sb];
                    if s.iter().any(|x| t.contains(x)) {
                        continue;
                    }
                    let target = &quotients[p + q];
                    let mut v = vec![Gq::zero(); target.monomials.len()];
                    v[target.position(&union_sorted(s, t))] = Gq::one();
                    cup.insert(p, a, q, b, &target.reduce(&v));
                }
            }
        }
    }
    let push = blocks.iter().map(|b| b.inverse().ok_or(Error::NotInvertible)).collect::<Result<Vec<_>>>()?;
    debug_assert_eq!(n, model.involutions.len());
    Ok(GradedCohomologyAction {
        k,
        blocks,
        kahler_class: kahler,
        pushforward_blocks: Some(push),
        cup: Some(cup),
        model_tag: ModelTag::Mazur,
        sublattice: true,
        basis_labels: labels,
        warnings: vec!["degrees are computed on the subring generated by h_1..h_{k+1} and are lower bounds".into()],
    })
}

/// User-supplied blocks, before validation.
#[derive(Debug, Clone, PartialEq)]
pub struct RawModel {
    pub blocks: Vec<ExactMatrix>,
    pub kahler_class: Vec<Vec<Gq>>,
    pub pushforward_blocks: Option<Vec<ExactMatrix>>,
    pub cup: Option<CupProduct>,
}

pub fn raw_action(raw: &RawModel) -> Result<GradedCohomologyAction> {
    let n = raw.blocks.len();
    if n < 2 {
        return Err(Error::DimensionMismatch("need blocks for p = 0..k with k ≥ 1".into()));
    }
    let k = n - 1;
    for (p, b) in raw.blocks.iter().enumerate() {
        if !b.is_square() || b.rows() == 0 {
            return Err(Error::DimensionMismatch(format!("block {p} is {}×{}", b.rows(), b.cols())));
        }
    }
    for p in [0, k] {
        if raw.blocks[p].rows() != 1 {
            return Err(Error::DimensionMismatch(format!("block {p} must be 1×1")));
        }
    }
    let dims: Vec<usize> = raw.blocks.iter().map(ExactMatrix::rows).collect();
    if raw.kahler_class.len() != n {
        return Err(Error::DimensionMismatch(format!("{} Kähler vectors for {n} blocks", raw.kahler_class.len())));
    }
    for (p, w) in raw.kahler_class.iter().enumerate() {
        if w.len() != dims[p] {
            return Err(Error::DimensionMismatch(format!("Kähler vector {p} has length {}, block is {}", w.len(), dims[p])));
        }
    }
    if let Some(push) = &raw.pushforward_blocks {
        if push.len() != n || push.iter().zip(&dims).any(|(m, &d)| m.rows() != d || m.cols() != d) {
            return Err(Error::DimensionMismatch("pushforward blocks do not match the pullback blocks".into()));
        }
    }
    if raw.blocks.iter().any(|b| b.det().is_zero()) {
        return Err(Error::NotInvertible);
    }
    let mut warnings = Vec::new();
    for p in [0, k] {
        if raw.blocks[p].get(0, 0).norm_sqr() != 1 {
            warnings.push(format!("block {p} entry {} does not have modulus 1", raw.blocks[p].get(0, 0)));
        }
    }
    if let Some(cup) = &raw.cup {
        if cup.dims != dims {
            return Err(Error::DimensionMismatch(format!("cup dimensions {:?} differ from block dimensions {dims:?}", cup.dims)));
        }
        for (&(p, i, q, j), v) in cup.entries() {
            if p == 0 || p + q > k || i >= dims[p] || j >= dims[q] || v.iter().any(|(c, _)| *c >= dims[p + q]) {
                return Err(Error::DimensionMismatch(format!("cup entry ({p},{i})×({q},{j}) out of range")));
            }
        }
        check_cup_compatibility(&raw.blocks, cup)?;
        for p in 2..=k {
            if cup.power(1, &raw.kahler_class[1], p) != raw.kahler_class[p] {
                return Err(Error::CupIncompatible(format!("Kähler vector {p} is not the {p}-th cup power of vector 1")));
            }
        }
    }
    Ok(GradedCohomologyAction {
        k,
        blocks: raw.blocks.clone(),
        kahler_class: raw.kahler_class.clone(),
        pushforward_blocks: raw.pushforward_blocks.clone(),
        cup: raw.cup.clone(),
        model_tag: ModelTag::Raw,
        sublattice: false,
        basis_labels: dims.iter().enumerate().map(|(p, &d)| (0..d).map(|i| format!("e{p}_{i}")).collect()).collect(),
        warnings,
    })
}
