//! Exact rational scalars and their text/JSON encodings.
//!
//! All exact computation in the crate runs over [`Rational`], a thin alias for
//! `num_rational::BigRational` (always normalized, positive denominator).
//! On the wire a rational is a two-element array `[num, den]`; each entry is a
//! JSON integer when it fits in an `i64` and a decimal string otherwise, so
//! large coefficients survive a round trip without loss.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

/// Integer as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den`, normalized. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_bigint(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Binomial coefficient `C(n, k)` for signed `n` (zero when `k > n >= 0`,
/// generalized falling-factorial form for negative `n`).
pub fn binomial(n: i64, k: u64) -> BigInt {
    let mut num = BigInt::one();
    for i in 0..k as i64 {
        num *= BigInt::from(n - i);
    }
    num / factorial(k)
}

/// Parses `"7"`, `"-3/4"` or `"0.25"`-free exact forms. Decimals are rejected:
/// every numeric CLI parameter is exact.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(n).map_err(|_| format!("invalid rational numerator `{n}`"))?;
    let den = BigInt::from_str(d).map_err(|_| format!("invalid rational denominator `{d}`"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Rational::new(num, den))
}

/// Human-readable form: `3`, `-1/144`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Very large numerators: fall back to ratio of rounded parts.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

fn int_to_json<S>(n: &BigInt, ser: &mut S::SerializeTuple) -> Result<(), S::Error>
where
    S: Serializer,
{
    match n.to_i64() {
        Some(v) => ser.serialize_element(&v),
        None => ser.serialize_element(&n.to_string()),
    }
}

/// Serde adapter for a single rational as `[num, den]`.
pub mod pair {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        RationalRef(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        RationalPair::deserialize(d).map(|p| p.0)
    }
}

/// Serde adapter for `Vec<Rational>` as a list of `[num, den]` pairs.
pub mod pair_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(RationalRef))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw: Vec<RationalPair> = Vec::deserialize(d)?;
        Ok(raw.into_iter().map(|p| p.0).collect())
    }
}

/// Borrowed rational that serializes as `[num, den]`.
pub struct RationalRef<'a>(pub &'a Rational);

impl Serialize for RationalRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        int_to_json::<S>(self.0.numer(), &mut t)?;
        int_to_json::<S>(self.0.denom(), &mut t)?;
        t.end()
    }
}

/// Owned rational decoded from `[num, den]`.
pub struct RationalPair(pub Rational);

impl Serialize for RationalPair {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RationalRef(&self.0).serialize(s)
    }
}

struct IntVisitor;

impl Visitor<'_> for IntVisitor {
    type Value = BigInt;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str("an integer or a decimal integer string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<BigInt, E> {
        Ok(BigInt::from(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<BigInt, E> {
        Ok(BigInt::from(v))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<BigInt, E> {
        BigInt::from_str(v).map_err(|_| E::custom(format!("invalid integer `{v}`")))
    }
}

struct JsonInt(BigInt);

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(IntVisitor).map(JsonInt)
    }
}

impl<'de> Deserialize<'de> for RationalPair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct PairVisitor;

        impl<'de> Visitor<'de> for PairVisitor {
            type Value = RationalPair;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a [numerator, denominator] pair")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<RationalPair, A::Error> {
                let num: JsonInt = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let den: JsonInt = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                if den.0.is_zero() {
                    return Err(de::Error::custom("zero denominator"));
                }
                Ok(RationalPair(Rational::new(num.0, den.0)))
            }
        }

        d.deserialize_seq(PairVisitor)
    }
}
