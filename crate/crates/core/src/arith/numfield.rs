//! Simple algebraic extensions `ℚ(i)[a]/(p(a))` of the Gaussian rationals.
//!
//! Elements carry an optional shared handle to their field so that the
//! constants `0` and `1` can be produced without a context, which keeps the
//! generic [`Field`] trait context free. Two elements with different fields
//! must never be combined.

use std::fmt;
use std::sync::Arc;

use rug::Complex;

use super::field::Field;
use super::gauss::Gq;
use super::poly::Poly;
use super::roots::newton_polish;

#[derive(Debug, PartialEq)]
pub struct NumberField {
    /// Monic, irreducible over the coefficient field used to build it.
    pub modulus: Poly<Gq>,
}

impl NumberField {
    pub fn new(modulus: &Poly<Gq>) -> Arc<Self> {
        assert!(modulus.degree() >= 1, "number field modulus must be non-constant");
        Arc::new(NumberField { modulus: modulus.monic() })
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree()
    }

    /// The class of `a` itself, a root of the modulus.
    pub fn generator(self: &Arc<Self>) -> NfElem {
        NfElem::from_poly(self, Poly::x())
    }
}

#[derive(Clone)]
pub struct NfElem {
    field: Option<Arc<NumberField>>,
    c: Poly<Gq>,
}

impl NfElem {
    pub fn from_poly(field: &Arc<NumberField>, p: Poly<Gq>) -> Self {
        let c = p.rem(&field.modulus);
        NfElem { field: Some(field.clone()), c }
    }

    pub fn scalar(q: Gq) -> Self {
        NfElem { field: None, c: Poly::constant(q) }
    }

    pub fn poly(&self) -> &Poly<Gq> {
        &self.c
    }

    pub fn field(&self) -> Option<&Arc<NumberField>> {
        self.field.as_ref()
    }

    /// `Some(q)` when the element lies in the base field.
    pub fn as_scalar(&self) -> Option<Gq> {
        (self.c.degree() == 0).then(|| self.c.coeff(0))
    }

    /// Value under the embedding sending the generator near `root`, correct to
    /// about `prec` bits: the root is refined first so that cancellation among
    /// large coefficients does not eat the result.
    pub fn embed(&self, root: &Complex, prec: u32) -> Complex {
        let Some(field) = &self.field else {
            return self.c.coeff(0).to_complex(prec);
        };
        if self.c.degree() == 0 {
            return self.c.coeff(0).to_complex(prec);
        }
        let digits = self.c.coeffs().iter().map(Gq::digit_size).max().unwrap_or(0);
        let wp = prec + 4 * digits as u32 + 64;
        let coeffs: Vec<Complex> = field.modulus.coeffs().iter().map(|c| c.to_complex(wp)).collect();
        let steps = (wp as f64 / root.prec().0.max(16) as f64).log2().ceil() as usize + 3;
        let g = newton_polish(&coeffs, &Complex::with_val(wp, root), wp, steps);
        let v = self.c.eval_complex(&g, None, wp);
        Complex::with_val(prec, v)
    }

    fn ctx(&self, o: &Self) -> Option<Arc<NumberField>> {
        match (&self.field, &o.field) {
            (Some(a), Some(b)) => {
                debug_assert!(Arc::ptr_eq(a, b) || a == b, "mixing elements of different number fields");
                Some(a.clone())
            }
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        }
    }
}

impl PartialEq for NfElem {
    fn eq(&self, o: &Self) -> bool {
        self.c == o.c
    }
}

impl fmt::Display for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.c.to_string().replace('x', "a");
        write!(f, "{s}")
    }
}

impl fmt::Debug for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Field for NfElem {
    fn zero() -> Self {
        NfElem { field: None, c: Poly::zero() }
    }

    fn one() -> Self {
        NfElem { field: None, c: Poly::one() }
    }

    fn is_zero(&self) -> bool {
        self.c.is_zero()
    }

    fn add(&self, o: &Self) -> Self {
        NfElem { field: self.ctx(o), c: self.c.add(&o.c) }
    }

    fn sub(&self, o: &Self) -> Self {
        NfElem { field: self.ctx(o), c: self.c.sub(&o.c) }
    }

    fn mul(&self, o: &Self) -> Self {
        let field = self.ctx(o);
        let prod = self.c.mul(&o.c);
        let c = match &field {
            Some(k) if prod.degree() >= k.degree() => prod.rem(&k.modulus),
            _ => prod,
        };
        NfElem { field, c }
    }

    fn neg(&self) -> Self {
        NfElem { field: self.field.clone(), c: self.c.neg() }
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.as_scalar() {
            return Some(NfElem { field: self.field.clone(), c: Poly::constant(q.inv()?) });
        }
        let k = self.field.as_ref()?;
        let c = self.c.inv_mod(&k.modulus)?;
        Some(NfElem { field: Some(k.clone()), c })
    }

    fn from_gq(q: &Gq) -> Self {
        NfElem::scalar(q.clone())
    }

    fn to_complex_at(&self, generator: Option<&Complex>, prec: u32) -> Complex {
        match generator {
            Some(g) => self.c.eval_complex(g, None, prec),
            None => {
                assert!(self.c.degree() == 0, "embedding requires the generator value");
                self.c.coeff(0).to_complex(prec)
            }
        }
    }
}
