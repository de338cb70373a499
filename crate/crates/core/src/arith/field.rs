use std::fmt;

use rug::Complex;

use super::gauss::Gq;

/// Exact field arithmetic shared by [`Gq`] and number-field elements.
///
/// Methods take references and return fresh values; no operator overloading
/// so that generic code reads the same for every field.
pub trait Field: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    /// Embedding of the base field ℚ(i).
    fn from_gq(q: &Gq) -> Self;
    /// Numerical value under the embedding that sends the field generator to
    /// `generator` (ignored for ℚ(i) itself).
    fn to_complex_at(&self, generator: Option<&Complex>, prec: u32) -> Complex;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.inv()?))
    }

    fn from_i64(v: i64) -> Self {
        Self::from_gq(&Gq::int(v))
    }
}
