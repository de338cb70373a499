//! Exact arithmetic: Gaussian rationals, polynomials, number fields,
//! factorization, and certified real-root isolation.

pub mod factor;
pub mod field;
pub mod gauss;
pub mod numfield;
pub mod poly;
pub mod roots;

pub use factor::{cyclotomic, euler_phi, factor, Domain};
pub use field::Field;
pub use gauss::{Gq, ParseGqError};
pub use numfield::{NfElem, NumberField};
pub use poly::Poly;
