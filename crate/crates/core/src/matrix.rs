//! Dense matrices over an exact field, plus MPFR complex matrices for the
//! numerical side of every computation.

use std::fmt;

use rayon::prelude::*;
use rug::{Complex, Float};

use crate::arith::{Field, Gq, Poly};

#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

/// Square matrix over the Gaussian rationals.
pub type ExactMatrix = Matrix<Gq>;

impl<F: Field> Matrix<F> {
    pub fn new(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = F::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_columns(cols: &[Vec<F>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn diagonal(d: &[F]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map(|a| a.mul(s))
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let row = |i: usize| -> Vec<F> {
            (0..o.cols)
                .map(|j| {
                    let mut acc = F::zero();
                    for k in 0..self.cols {
                        let a = self.get(i, k);
                        if !a.is_zero() {
                            let b = o.get(k, j);
                            if !b.is_zero() {
                                acc = acc.add(&a.mul(b));
                            }
                        }
                    }
                    acc
                })
                .collect()
        };
        let data: Vec<F> = if self.rows * o.cols >= 64 {
            (0..self.rows).into_par_iter().flat_map_iter(row).collect()
        } else {
            (0..self.rows).flat_map(row).collect()
        };
        Matrix { rows: self.rows, cols: o.cols, data }
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(F::zero(), |acc, (a, b)| acc.add(&a.mul(b))))
            .collect()
    }

    pub fn pow(&self, mut e: u64) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Field::is_zero)
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j).mul(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i != r && !m.get(i, c).is_zero() {
                    let f = m.get(i, c).clone();
                    for j in c..m.cols {
                        let v = m.get(i, j).sub(&f.mul(m.get(r, j)));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{v : M v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![F::zero(); self.cols];
                v[f] = F::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = r.get(row, f).neg();
                }
                v
            })
            .collect()
    }

    /// Basis of the column space, taken from the original pivot columns.
    pub fn image(&self) -> Vec<Vec<F>> {
        let (_, pivots) = self.rref();
        pivots.iter().map(|&c| self.column(c)).collect()
    }

    pub fn det(&self) -> F {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = self.rows;
        let mut det = F::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return F::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = det.neg();
            }
            let piv = m.get(c, c).clone();
            det = det.mul(&piv);
            let inv = piv.inv().expect("nonzero pivot");
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).mul(&inv);
                for j in c..n {
                    let v = m.get(i, j).sub(&f.mul(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, F::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    /// Some solution of `M x = b`, if one exists.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![F::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    /// Characteristic polynomial `det(x I − M)` by Hessenberg reduction.
    pub fn char_poly(&self) -> Poly<F> {
        assert!(self.is_square(), "characteristic polynomial of a non-square matrix");
        let n = self.rows;
        let mut h = self.clone();
        for m in 1..n.saturating_sub(1) {
            let Some(i) = (m..n).find(|&i| !h.get(i, m - 1).is_zero()) else {
                continue;
            };
            if i != m {
                h.swap_rows(i, m);
                for r in 0..n {
                    h.data.swap(r * n + i, r * n + m);
                }
            }
            let inv = h.get(m, m - 1).inv().expect("nonzero pivot");
            for j in m + 1..n {
                if h.get(j, m - 1).is_zero() {
                    continue;
                }
                let u = h.get(j, m - 1).mul(&inv);
                for c in 0..n {
                    let v = h.get(j, c).sub(&u.mul(h.get(m, c)));
                    h.set(j, c, v);
                }
                for r in 0..n {
                    let v = h.get(r, m).add(&u.mul(h.get(r, j)));
                    h.set(r, m, v);
                }
            }
        }
        let mut p: Vec<Poly<F>> = vec![Poly::one()];
        for m in 1..=n {
            let mut next = Poly::new(vec![h.get(m - 1, m - 1).neg(), F::one()]).mul(&p[m - 1]);
            let mut prod = F::one();
            for i in (1..m).rev() {
                prod = prod.mul(h.get(i, i - 1));
                let coef = h.get(i - 1, m - 1).mul(&prod);
                if !coef.is_zero() {
                    next = next.sub(&p[i - 1].scale(&coef));
                }
            }
            p.push(next);
        }
        p.pop().expect("nonempty")
    }

    pub fn kron(&self, o: &Self) -> Self {
        let mut out = Self::zeros(self.rows * o.rows, self.cols * o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..o.rows {
                    for l in 0..o.cols {
                        out.set(i * o.rows + k, j * o.cols + l, a.mul(o.get(k, l)));
                    }
                }
            }
        }
        out
    }

    /// The `p`-th compound matrix (matrix of `Λ^p`), rows and columns indexed
    /// by `p`-subsets in lexicographic order.
    pub fn compound(&self, p: usize) -> Self {
        let rs = subsets(self.rows, p);
        let cs = subsets(self.cols, p);
        let mut out = Self::zeros(rs.len(), cs.len());
        for (a, r) in rs.iter().enumerate() {
            for (b, c) in cs.iter().enumerate() {
                out.set(a, b, self.submatrix(r, c).det());
            }
        }
        out
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &r) in rows.iter().enumerate() {
            for (b, &c) in cols.iter().enumerate() {
                out.set(a, b, self.get(r, c).clone());
            }
        }
        out
    }

    /// Numerical image under the embedding sending the field generator to `generator`.
    pub fn to_complex(&self, generator: Option<&Complex>, prec: u32) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.to_complex_at(generator, prec)).collect(),
        }
    }
}

impl ExactMatrix {
    pub fn conj(&self) -> Self {
        self.map(Gq::conj)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(Gq::is_real)
    }

    /// Largest decimal digit count among entries.
    pub fn digit_size(&self) -> usize {
        self.data.iter().map(Gq::digit_size).max().unwrap_or(0)
    }

    pub fn parse(rows: &[Vec<String>]) -> Result<Self, crate::arith::ParseGqError> {
        let parsed: Result<Vec<Vec<Gq>>, _> = rows.iter().map(|r| r.iter().map(|s| s.parse()).collect()).collect();
        Ok(Self::from_rows(parsed?))
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| Gq::int(v)).collect()).collect())
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(Gq::to_string).collect()).collect()
    }
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// All `p`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, p, &mut Vec::new(), &mut out);
    out
}

/// Dense complex matrix at a fixed MPFR precision.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        CMatrix { rows, cols, data: vec![Complex::new(prec); rows * cols] }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = Self::zeros(n, n, prec);
        for i in 0..n {
            m.data[i * n + i] = Complex::with_val(prec, 1);
        }
        m
    }

    pub fn prec(&self) -> u32 {
        self.data.first().map_or(64, |z| z.prec().0)
    }

    pub fn get(&self, i: usize, j: usize) -> &Complex {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = self.prec();
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| Complex::with_val(prec, a + b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let prec = self.prec();
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| Complex::with_val(prec, a - b)).collect(),
        }
    }

    pub fn scale(&self, s: &Complex) -> Self {
        let prec = self.prec();
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| Complex::with_val(prec, a * s)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let prec = self.prec();
        let mut out = Self::zeros(self.rows, o.cols, prec);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    out.data[i * o.cols + j] += Complex::with_val(prec, a * o.get(k, j));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex]) -> Vec<Complex> {
        let prec = self.prec();
        (0..self.rows)
            .map(|i| {
                let mut acc = Complex::new(prec);
                for j in 0..self.cols {
                    acc += Complex::with_val(prec, self.get(i, j) * &v[j]);
                }
                acc
            })
            .collect()
    }

    /// Operator norm induced by the max-norm: the largest absolute row sum.
    pub fn norm_inf(&self) -> Float {
        let prec = self.prec();
        let mut best = Float::with_val(prec, 0);
        for i in 0..self.rows {
            let mut s = Float::with_val(prec, 0);
            for j in 0..self.cols {
                s += Float::with_val(prec, self.get(i, j).abs_ref());
            }
            if s > best {
                best = s;
            }
        }
        best
    }

    /// Rank by Gaussian elimination with complete pivoting; pivots below
    /// `tol · max|entry|` count as zero.
    pub fn numeric_rank(&self, tol: &Float) -> usize {
        let prec = self.prec();
        let mut a = self.data.clone();
        let (r, c) = (self.rows, self.cols);
        let scale = a.iter().fold(Float::with_val(prec, 0), |m, z| m.max(&Float::with_val(prec, z.abs_ref())));
        if scale == 0 {
            return 0;
        }
        let cut = Float::with_val(prec, &scale * tol);
        let mut rank = 0;
        let mut rows: Vec<usize> = (0..r).collect();
        let mut cols: Vec<usize> = (0..c).collect();
        while rank < r.min(c) {
            let mut best = (Float::with_val(prec, -1), 0, 0);
            for (ri, &i) in rows.iter().enumerate().skip(rank) {
                for (ci, &j) in cols.iter().enumerate().skip(rank) {
                    let v = Float::with_val(prec, a[i * c + j].abs_ref());
                    if v > best.0 {
                        best = (v, ri, ci);
                    }
                }
            }
            if best.0 <= cut {
                break;
            }
            rows.swap(rank, best.1);
            cols.swap(rank, best.2);
            let (pi, pj) = (rows[rank], cols[rank]);
            let piv = a[pi * c + pj].clone();
            for &i in &rows[rank + 1..] {
                let f = Complex::with_val(prec, &a[i * c + pj] / &piv);
                for &j in &cols[rank..] {
                    let d = Complex::with_val(prec, &f * &a[pi * c + j]);
                    a[i * c + j] -= d;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn to_f64(&self) -> Vec<(f64, f64)> {
        self.data.iter().map(|z| (z.real().to_f64(), z.imag().to_f64())).collect()
    }
}

/// Max-norm of a complex vector.
pub fn vec_norm_inf(v: &[Complex]) -> Float {
    let prec = v.first().map_or(64, |z| z.prec().0);
    v.iter().fold(Float::with_val(prec, 0), |acc, z| acc.max(&Float::with_val(prec, z.abs_ref())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> Poly<Gq> {
        Poly::new(v.iter().map(|&x| Gq::int(x)).collect())
    }

    #[test]
    fn char_polys() {
        assert_eq!(ExactMatrix::from_ints(&[&[2, 1], &[1, 1]]).char_poly(), p(&[1, -3, 1]));
        assert_eq!(ExactMatrix::identity(3).char_poly(), p(&[-1, 1]).pow(3));
        assert_eq!(ExactMatrix::from_ints(&[&[0, -2], &[2, 0]]).char_poly(), p(&[4, 0, 1]));
        // needs a row swap during the Hessenberg reduction
        let m = ExactMatrix::from_ints(&[&[1, 2, 3, 0], &[0, 0, 1, 1], &[4, 0, 1, 2], &[1, 1, 0, 5]]);
        let cp = m.char_poly();
        assert_eq!(cp.coeff(0), m.det());
        assert_eq!(cp.coeff(3), Gq::int(-7));
    }

    #[test]
    fn inverse_kernel_solve() {
        let m = ExactMatrix::from_ints(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), ExactMatrix::identity(2));
        let s = ExactMatrix::from_ints(&[&[1, 2], &[2, 4]]);
        assert!(s.inverse().is_none());
        let k = s.kernel();
        assert_eq!(k.len(), 1);
        assert!(s.mul_vec(&k[0]).iter().all(Field::is_zero));
        assert_eq!(s.solve(&[Gq::int(3), Gq::int(6)]).map(|x| s.mul_vec(&x)), Some(vec![Gq::int(3), Gq::int(6)]));
        assert!(s.solve(&[Gq::int(1), Gq::int(0)]).is_none());
    }

    #[test]
    fn compound_and_kron() {
        let a = ExactMatrix::from_ints(&[&[1, 2, 0], &[0, 1, 3], &[1, 0, 1]]);
        assert_eq!(a.compound(3).get(0, 0), &a.det());
        assert_eq!(a.compound(1), a);
        // Cauchy–Binet: compound is multiplicative
        let b = ExactMatrix::from_ints(&[&[0, 1, 1], &[2, 1, 0], &[1, 1, 1]]);
        assert_eq!(a.mul(&b).compound(2), a.compound(2).mul(&b.compound(2)));
        let k = a.kron(&b);
        assert_eq!(k.det(), a.det().mul(&a.det()).mul(&a.det()).mul(&b.det()).mul(&b.det()).mul(&b.det()));
    }
}
