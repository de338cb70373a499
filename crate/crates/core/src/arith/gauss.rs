//! Gaussian rationals `a + b i` with `a, b ∈ ℚ`.
//!
//! Every exact matrix in the crate is stored over this field; real rational
//! data simply has a zero imaginary part.

use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Complex, Integer, Rational};

use super::field::Field;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Gq {
    pub re: Rational,
    pub im: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{input}` as an exact number: {reason}")]
pub struct ParseGqError {
    pub input: String,
    pub reason: &'static str,
}

impl Gq {
    pub fn new(re: Rational, im: Rational) -> Self {
        Gq { re, im }
    }

    pub fn real(re: impl Into<Rational>) -> Self {
        Gq { re: re.into(), im: Rational::new() }
    }

    pub fn int(v: i64) -> Self {
        Gq::real(Rational::from(v))
    }

    pub fn gauss(re: i64, im: i64) -> Self {
        Gq { re: Rational::from(re), im: Rational::from(im) }
    }

    pub fn i() -> Self {
        Gq::gauss(0, 1)
    }

    pub fn is_real(&self) -> bool {
        self.im.cmp0().is_eq()
    }

    pub fn is_gaussian_integer(&self) -> bool {
        *self.re.denom() == 1 && *self.im.denom() == 1
    }

    pub fn conj(&self) -> Self {
        Gq { re: self.re.clone(), im: Rational::from(-&self.im) }
    }

    /// `|z|²`, always an exact rational.
    pub fn norm_sqr(&self) -> Rational {
        Rational::from(&self.re * &self.re) + Rational::from(&self.im * &self.im)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Gq { re: Rational::from(&self.re * q), im: Rational::from(&self.im * q) }
    }

    pub fn to_complex(&self, prec: u32) -> Complex {
        Complex::with_val(prec, (&self.re, &self.im))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Least common multiple of the denominators of both parts.
    pub fn denom_lcm(&self) -> Integer {
        self.re.denom().clone().lcm(self.im.denom())
    }

    /// Number of decimal digits in the largest numerator or denominator.
    pub fn digit_size(&self) -> usize {
        [self.re.numer(), self.re.denom(), self.im.numer(), self.im.denom()]
            .iter()
            .map(|z| z.significant_bits() as usize)
            .max()
            .unwrap_or(0)
            * 30103
            / 100000
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.cmp0().is_eq() {
            return None;
        }
        return Some(n / d);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: Integer = if digits.is_empty() { Integer::new() } else { digits.parse().ok()? };
    let shift = exponent - frac_part.len() as i32;
    let ten = Integer::from(10);
    let mut q = Rational::from(numer);
    if shift >= 0 {
        q *= ten.pow(shift as u32);
    } else {
        q /= ten.pow((-shift) as u32);
    }
    if neg {
        q = -q;
    }
    Some(q)
}

impl FromStr for Gq {
    type Err = ParseGqError;

    /// Accepts `3`, `-3/2`, `1.5`, `2e-3`, `1+2i`, `0.1-0.2i`, `-i`, `3/2i`.
    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let err = |reason| ParseGqError { input: input.to_string(), reason };
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err("empty string"));
        }
        let Some(body) = s.strip_suffix('i') else {
            return parse_rational(&s).map(Gq::real).ok_or_else(|| err("not a rational literal"));
        };
        // split at the last sign that is not the leading one and not an exponent sign
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            if (bytes[idx] == b'+' || bytes[idx] == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
                split = Some(idx);
                break;
            }
        }
        let (re_str, im_str) = match split {
            Some(idx) => (&body[..idx], &body[idx..]),
            None => ("", body),
        };
        let im = match im_str {
            "" | "+" => Rational::from(1),
            "-" => Rational::from(-1),
            other => parse_rational(other).ok_or_else(|| err("bad imaginary part"))?,
        };
        let re = if re_str.is_empty() {
            Rational::new()
        } else {
            parse_rational(re_str).ok_or_else(|| err("bad real part"))?
        };
        Ok(Gq { re, im })
    }
}

impl fmt::Display for Gq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re0 = self.re.cmp0().is_eq();
        let im0 = self.im.cmp0().is_eq();
        if im0 {
            return write!(f, "{}", self.re);
        }
        let im = match (self.im == 1, self.im == -1) {
            (true, _) => String::new(),
            (_, true) => "-".to_string(),
            _ => self.im.to_string(),
        };
        if re0 {
            write!(f, "{im}i")
        } else if self.im.cmp0().is_lt() {
            write!(f, "{}{im}i", self.re)
        } else {
            write!(f, "{}+{im}i", self.re)
        }
    }
}

impl fmt::Debug for Gq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for Gq {
    fn from(v: i64) -> Self {
        Gq::int(v)
    }
}

impl From<Rational> for Gq {
    fn from(v: Rational) -> Self {
        Gq::real(v)
    }
}

impl From<Integer> for Gq {
    fn from(v: Integer) -> Self {
        Gq::real(Rational::from(v))
    }
}

impl Field for Gq {
    fn zero() -> Self {
        Gq::default()
    }

    fn one() -> Self {
        Gq::int(1)
    }

    fn is_zero(&self) -> bool {
        self.re.cmp0().is_eq() && self.im.cmp0().is_eq()
    }

    fn add(&self, o: &Self) -> Self {
        Gq { re: Rational::from(&self.re + &o.re), im: Rational::from(&self.im + &o.im) }
    }

    fn sub(&self, o: &Self) -> Self {
        Gq { re: Rational::from(&self.re - &o.re), im: Rational::from(&self.im - &o.im) }
    }

    fn mul(&self, o: &Self) -> Self {
        if self.is_real() && o.is_real() {
            return Gq::real(Rational::from(&self.re * &o.re));
        }
        let re = Rational::from(&self.re * &o.re) - Rational::from(&self.im * &o.im);
        let im = Rational::from(&self.re * &o.im) + Rational::from(&self.im * &o.re);
        Gq { re, im }
    }

    fn neg(&self) -> Self {
        Gq { re: Rational::from(-&self.re), im: Rational::from(-&self.im) }
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.is_real() {
            return Some(Gq::real(Rational::from(self.re.recip_ref())));
        }
        let n = self.norm_sqr();
        Some(Gq { re: Rational::from(&self.re / &n), im: Rational::from(-&self.im) / n })
    }

    fn from_gq(q: &Gq) -> Self {
        q.clone()
    }

    fn to_complex_at(&self, _generator: Option<&Complex>, prec: u32) -> Complex {
        self.to_complex(prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Gq {
        s.parse().unwrap()
    }

    #[test]
    fn parses_exact_literals() {
        assert_eq!(q("1.5"), Gq::real(Rational::from((3, 2))));
        assert_eq!(q("0.1+0.2i"), Gq::new(Rational::from((1, 10)), Rational::from((2, 10))));
        assert_eq!(q("-3/2"), Gq::real(Rational::from((-3, 2))));
        assert_eq!(q("1+2i"), Gq::gauss(1, 2));
        assert_eq!(q("1-i"), Gq::gauss(1, -1));
        assert_eq!(q("-i"), Gq::gauss(0, -1));
        assert_eq!(q("i"), Gq::i());
        assert_eq!(q("2e-3"), Gq::real(Rational::from((1, 500))));
        assert_eq!(q("1e2+1e-1i"), Gq::new(Rational::from(100), Rational::from((1, 10))));
        assert_eq!(q(" 7 "), Gq::int(7));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "abc", "1/0", "1..2", "1+2j", "--1"] {
            assert!(bad.parse::<Gq>().is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["3/2", "-7", "2i", "-i", "1+2i", "1/3-5/7i", "0"] {
            let v = q(s);
            assert_eq!(q(&v.to_string()), v, "{s}");
        }
    }

    #[test]
    fn field_ops() {
        let a = Gq::gauss(1, 1);
        let inv = a.inv().unwrap();
        assert_eq!(a.mul(&inv), Gq::one());
        assert_eq!(a.mul(&a.conj()), Gq::int(2));
        assert!(Gq::zero().inv().is_none());
    }
}
