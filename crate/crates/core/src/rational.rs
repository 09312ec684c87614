//! Exact rational scalars, their text form, and certified root bounds.

use std::fmt;

use num::bigint::{BigInt, Sign};
use num::{BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Bits of precision used when an irrational root has to be bracketed.
const ROOT_PRECISION_BITS: u64 = 48;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-0.25"`.
pub fn parse(text: &str) -> Result<Rational, Error> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if whole_digits.is_empty() { "0" } else { whole_digits }, frac);
        let mut n: BigInt = digits.parse().map_err(|_| bad())?;
        if negative {
            n = -n;
        }
        let d = num::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(n, d));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Canonical `"p/q"` text; integers keep the `/1` so the form is uniform.
pub fn format(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Display adapter for `"p/q"` text.
pub struct Fmt<'a>(pub &'a Rational);

impl fmt::Display for Fmt<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite double.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

/// Nearest rational with denominator `2^bits`; used to keep cut directions small.
pub fn round_to_dyadic(x: f64, bits: u32) -> Rational {
    let scale = (1u64 << bits) as f64;
    let n = (x * scale).round();
    Rational::new(BigInt::from(n as i128), BigInt::from(1u64 << bits))
}

pub fn max_of<'a, I: IntoIterator<Item = &'a Rational>>(items: I) -> Option<Rational> {
    items.into_iter().max().cloned()
}

pub fn pow(x: &Rational, k: u32) -> Rational {
    num::pow(x.clone(), k as usize)
}

/// A certified enclosure `lower <= true value <= upper`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    #[serde(with = "serde_rational")]
    pub lower: Rational,
    #[serde(with = "serde_rational")]
    pub upper: Rational,
}

impl Bounds {
    pub fn exact(value: Rational) -> Self {
        Bounds { lower: value.clone(), upper: value }
    }

    pub fn new(lower: Rational, upper: Rational) -> Self {
        debug_assert!(lower <= upper);
        Bounds { lower, upper }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn exact_value(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.lower)
    }

    pub fn overlaps(&self, other: &Bounds) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }

    /// Width of the hull of both enclosures relative to its upper end.
    pub fn joint_relative_gap(&self, other: &Bounds) -> Rational {
        let hi = std::cmp::max(&self.upper, &other.upper).clone();
        let lo = std::cmp::min(&self.lower, &other.lower).clone();
        if hi.is_zero() {
            return Rational::zero();
        }
        (hi.clone() - lo) / hi
    }

    pub fn relative_width(&self) -> Rational {
        if self.upper.is_zero() {
            Rational::zero()
        } else {
            (&self.upper - &self.lower) / &self.upper
        }
    }

    pub fn mid_f64(&self) -> f64 {
        0.5 * (to_f64(&self.lower) + to_f64(&self.upper))
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", Fmt(&self.lower))
        } else {
            write!(f, "[{}, {}]", Fmt(&self.lower), Fmt(&self.upper))
        }
    }
}

/// Encloses `x^(1/k)` for `x >= 0`; exact (equal ends) when `x` is a perfect k-th power.
pub fn root_bounds(x: &Rational, k: u32) -> Bounds {
    assert!(k >= 1, "root of order zero");
    assert!(!x.is_negative(), "root of a negative number");
    if k == 1 || x.is_zero() {
        return Bounds::exact(x.clone());
    }
    // x^(1/k) = (n d^(k-1))^(1/k) / d
    let n = x.numer();
    let d = x.denom();
    let radicand = n * num::pow(d.clone(), (k - 1) as usize);
    let r = radicand.nth_root(k);
    if num::pow(r.clone(), k as usize) == radicand {
        return Bounds::exact(Rational::new(r, d.clone()));
    }
    let scale = BigInt::one() << ROOT_PRECISION_BITS;
    let scaled = radicand * num::pow(scale.clone(), k as usize);
    let r = scaled.nth_root(k);
    let denom = d * &scale;
    Bounds::new(Rational::new(r.clone(), denom.clone()), Rational::new(r + 1, denom))
}

/// Encloses `|t|^p` for a rational exponent `p = a/c >= 0`; exact when `p` is an integer.
pub fn pow_bounds(t: &Rational, p: &Rational) -> Bounds {
    let base = t.abs();
    let a = p.numer().to_u32().expect("exponent numerator too large");
    let c = p.denom().to_u32().expect("exponent denominator too large");
    let powered = num::pow(base, a as usize);
    root_bounds(&powered, c)
}

/// Encloses `m^(1/p)` for a rational exponent `p = a/c >= 1`.
pub fn inverse_pow_bounds(m: &Bounds, p: &Rational) -> Bounds {
    let a = p.numer().to_u32().expect("exponent numerator too large");
    let c = p.denom().to_u32().expect("exponent denominator too large");
    // m^(c/a): raise to c exactly, then take the a-th root
    let lo = root_bounds(&num::pow(m.lower.clone(), c as usize), a).lower;
    let hi = root_bounds(&num::pow(m.upper.clone(), c as usize), a).upper;
    Bounds::new(lo, hi)
}

pub fn is_integer_exponent(p: &Rational) -> bool {
    p.is_integer()
}

pub fn sign(r: &Rational) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Serde adapter storing a rational as a `"p/q"` string.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = RationalText::deserialize(d)?;
        text.into_rational().map_err(serde::de::Error::custom)
    }

    /// Accepts either a JSON string or a JSON integer.
    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum RationalText {
        Text(String),
        Int(i64),
    }

    impl RationalText {
        pub(crate) fn into_rational(self) -> Result<Rational, Error> {
            match self {
                RationalText::Text(s) => parse(&s),
                RationalText::Int(n) => Ok(int(n)),
            }
        }
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod serde_vec {
    use super::serde_rational::RationalText;
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let items = Vec::<RationalText>::deserialize(d)?;
        items.into_iter().map(|t| t.into_rational().map_err(serde::de::Error::custom)).collect()
    }
}

/// Serde adapter for `Vec<Vec<Rational>>`.
pub mod serde_vec2 {
    use super::serde_rational::RationalText;
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = v.iter().map(|row| row.iter().map(format).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let rows = Vec::<Vec<RationalText>>::deserialize(d)?;
        rows.into_iter()
            .map(|row| row.into_iter().map(|t| t.into_rational().map_err(serde::de::Error::custom)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse("-4").unwrap(), int(-4));
        assert_eq!(parse("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse(" 7 / -14 ").unwrap(), ratio(-1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn format_keeps_denominator() {
        assert_eq!(format(&int(3)), "3/1");
        assert_eq!(format(&ratio(-2, 4)), "-1/2");
    }

    #[test]
    fn perfect_roots_are_exact() {
        assert_eq!(root_bounds(&ratio(9, 4), 2), Bounds::exact(ratio(3, 2)));
        assert_eq!(root_bounds(&int(27), 3), Bounds::exact(int(3)));
    }

    #[test]
    fn irrational_roots_are_bracketed() {
        let b = root_bounds(&int(2), 2);
        assert!(!b.is_exact());
        assert!(pow(&b.lower, 2) < int(2));
        assert!(pow(&b.upper, 2) > int(2));
        assert!(to_f64(&(&b.upper - &b.lower)) < 1e-12);
    }

    #[test]
    fn fractional_powers() {
        let b = pow_bounds(&int(4), &ratio(3, 2));
        assert_eq!(b, Bounds::exact(int(8)));
        let b = inverse_pow_bounds(&Bounds::exact(int(8)), &ratio(3, 2));
        assert_eq!(b, Bounds::exact(int(4)));
    }
}
