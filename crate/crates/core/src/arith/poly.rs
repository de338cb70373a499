//! Dense univariate polynomials over an exact [`Field`].

use std::fmt;

use rug::Complex;

use super::field::Field;

/// Coefficients stored low degree first, never with trailing zeros.
#[derive(Clone, PartialEq)]
pub struct Poly<F> {
    c: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn new(mut c: Vec<F>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { c: vec![F::one()] }
    }

    pub fn constant(v: F) -> Self {
        Poly::new(vec![v])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Poly { c: vec![F::zero(), F::one()] }
    }

    pub fn monomial(coef: F, deg: usize) -> Self {
        let mut c = vec![F::zero(); deg + 1];
        c[deg] = coef;
        Poly::new(c)
    }

    /// `x - root`.
    pub fn linear(root: &F) -> Self {
        Poly { c: vec![root.neg(), F::one()] }
    }

    pub fn coeffs(&self) -> &[F] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.c
    }

    pub fn coeff(&self, i: usize) -> F {
        self.c.get(i).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lc(&self) -> F {
        self.c.last().cloned().unwrap_or_else(F::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.c.last().is_some_and(|x| x.is_one())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i).add(&o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i).sub(&o.coeff(i))).collect())
    }

    pub fn neg(&self) -> Self {
        Poly { c: self.c.iter().map(F::neg).collect() }
    }

    pub fn scale(&self, s: &F) -> Self {
        Poly::new(self.c.iter().map(|x| x.mul(s)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![F::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        if self.c.len() < d.c.len() {
            return (Poly::zero(), self.clone());
        }
        let inv_lc = d.lc().inv().expect("leading coefficient is invertible");
        let mut r = self.c.clone();
        let dd = d.degree();
        let mut q = vec![F::zero(); self.c.len() - d.c.len() + 1];
        for k in (0..q.len()).rev() {
            let coef = r[k + dd].mul(&inv_lc);
            if coef.is_zero() {
                continue;
            }
            for (j, dc) in d.c.iter().enumerate() {
                r[k + j] = r[k + j].sub(&coef.mul(dc));
            }
            q[k] = coef;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    /// Quotient of an exact division; `None` if the remainder is nonzero.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.divrem(d);
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.rem(self).is_zero()
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = self.lc().inv().expect("nonzero leading coefficient");
        self.scale(&inv)
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s·self + t·o = g`, `g` the monic gcd.
    pub fn xgcd(&self, o: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lc().inv().expect("nonzero");
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Inverse of `self` modulo `m`, if coprime.
    pub fn inv_mod(&self, m: &Self) -> Option<Self> {
        let (g, s, _) = self.rem(m).xgcd(m);
        (g.degree() == 0 && !g.is_zero()).then(|| s.rem(m))
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a.mul(&F::from_i64(i as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &F) -> F {
        self.c.iter().rev().fold(F::zero(), |acc, a| acc.mul(x).add(a))
    }

    /// Evaluate a polynomial in another polynomial: `self(g(x))`.
    pub fn compose(&self, g: &Self) -> Self {
        self.c.iter().rev().fold(Poly::zero(), |acc, a| acc.mul(g).add(&Poly::constant(a.clone())))
    }

    /// `self(x + c)`.
    pub fn shift(&self, c: &F) -> Self {
        self.compose(&Poly::new(vec![c.clone(), F::one()]))
    }

    /// `x^deg · self(1/x)`.
    pub fn reversed(&self) -> Self {
        let mut c = self.c.clone();
        c.reverse();
        Poly::new(c)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        Poly::new(self.c.iter().map(f).collect())
    }

    /// `self^e mod m` by repeated squaring.
    pub fn pow_mod(&self, mut e: u64, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Poly::one().rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// Yun's square-free decomposition: monic `(q_i, i)` with
    /// `self = lc · ∏ q_i^i`, the `q_i` square-free and pairwise coprime.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly<F>, usize)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let mut a = f.gcd(&df);
        let mut b = f.exact_div(&a).expect("gcd divides");
        let mut c = df.exact_div(&a).expect("gcd divides");
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree() > 0 {
            a = b.gcd(&d);
            if a.degree() > 0 {
                out.push((a.clone(), i));
            }
            b = b.exact_div(&a).expect("gcd divides");
            c = d.exact_div(&a).expect("gcd divides");
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Product of the distinct monic irreducible-free factors, i.e. `f / gcd(f, f')`.
    pub fn squarefree_part(&self) -> Self {
        if self.degree() == 0 {
            return Poly::one();
        }
        let g = self.gcd(&self.derivative());
        self.monic().exact_div(&g).expect("gcd divides")
    }

    pub fn eval_complex(&self, x: &Complex, generator: Option<&Complex>, prec: u32) -> Complex {
        let mut acc = Complex::new(prec);
        for a in self.c.iter().rev() {
            acc *= x;
            acc += a.to_complex_at(generator, prec);
        }
        acc
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms = Vec::new();
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let s = a.to_string();
            let compound = s[1..].contains(['+', '-']) || (s.contains('i') && s.len() > 2);
            let coef = match (s.as_str(), i) {
                (_, 0) => s.clone(),
                ("1", _) => String::new(),
                ("-1", _) => "-".to_string(),
                _ if compound => format!("({s})"),
                _ => s.clone(),
            };
            let var = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            terms.push(format!("{coef}{var}"));
        }
        let joined = terms.join(" + ").replace("+ -", "- ");
        write!(f, "{joined}")
    }
}

impl<F: Field> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Gq;

    fn p(v: &[i64]) -> Poly<Gq> {
        Poly::new(v.iter().map(|&x| Gq::int(x)).collect())
    }

    #[test]
    fn division_and_gcd() {
        // (x-1)(x-2) and (x-1)(x+3)
        let a = p(&[2, -3, 1]);
        let b = p(&[-3, 2, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        let (g, s, t) = a.xgcd(&b);
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
        let (q, r) = p(&[1, 0, 0, 1]).divrem(&p(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(q, p(&[1, -1, 1]));
    }

    #[test]
    fn yun_decomposition() {
        // (x-1)^3 (x+2)^2 (x+5)
        let f = p(&[-1, 1]).pow(3).mul(&p(&[2, 1]).pow(2)).mul(&p(&[5, 1]));
        let sqf = f.squarefree_decomposition();
        assert_eq!(sqf, vec![(p(&[5, 1]), 1), (p(&[2, 1]), 2), (p(&[-1, 1]), 3)]);
        assert_eq!(f.squarefree_part(), p(&[-1, 1]).mul(&p(&[2, 1])).mul(&p(&[5, 1])));
    }

    #[test]
    fn shift_and_display() {
        let f = p(&[1, -3, 1]);
        assert_eq!(f.to_string(), "x^2 - 3x + 1");
        assert_eq!(f.shift(&Gq::int(1)), p(&[-1, -1, 1]));
        let g = Poly::new(vec![Gq::gauss(1, 2), Gq::one()]);
        assert_eq!(g.to_string(), "x + 1+2i");
    }
}
