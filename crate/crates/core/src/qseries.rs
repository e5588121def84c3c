//! Truncated power series in `q` with exact rational coefficients.
//!
//! A [`QSeries`] of precision `N` stores `c_0, ..., c_{N-1}` and is known only
//! modulo `q^N`. Binary operations truncate to the smaller precision of the two
//! operands, so no result ever claims a coefficient its inputs did not determine.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::SeriesError;
use crate::rational::{self, fmt_rational, rat, Rational};

/// Default number of known coefficients.
pub const DEFAULT_PRECISION: usize = 80;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<Rational>,
}

impl QSeries {
    /// Builds a series known modulo `q^coeffs.len()`.
    ///
    /// Panics if `coeffs` is empty; precision must be positive.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "QSeries precision must be positive");
        QSeries { coeffs }
    }

    pub fn from_integers(coeffs: &[i64], precision: usize) -> Self {
        let mut c: Vec<Rational> = coeffs.iter().take(precision).map(|&n| rat(n)).collect();
        c.resize(precision, Rational::zero());
        QSeries::new(c)
    }

    pub fn zero(precision: usize) -> Self {
        QSeries::new(vec![Rational::zero(); precision])
    }

    pub fn constant(c: Rational, precision: usize) -> Self {
        let mut s = QSeries::zero(precision);
        s.coeffs[0] = c;
        s
    }

    pub fn one(precision: usize) -> Self {
        QSeries::constant(rat(1), precision)
    }

    /// `q^n` (zero if `n >= precision`).
    pub fn monomial(n: usize, precision: usize) -> Self {
        let mut s = QSeries::zero(precision);
        if n < precision {
            s.coeffs[n] = rat(1);
        }
        s
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Option<&Rational> {
        self.coeffs.get(n)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Drops coefficients at index `>= n`. A larger `n` leaves the series unchanged.
    pub fn truncate(&self, n: usize) -> Self {
        QSeries::new(self.coeffs[..n.min(self.precision())].to_vec())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QSeries::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// `θ = q d/dq`: multiplies the `n`-th coefficient by `n`.
    pub fn theta(&self) -> Self {
        QSeries::new(self.coeffs.iter().enumerate().map(|(n, c)| c * rat(n as i64)).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = QSeries::one(self.precision());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Numeric value at `z` (upper half plane) with `q = exp(2πiz)`, plus a
    /// bound on the neglected tail `Σ_{n≥N} c_n q^n`.
    pub fn evaluate(&self, z: Complex64, opts: &EvalOptions) -> Result<Evaluation, SeriesError> {
        let r = nome_modulus(z, opts)?;
        let q = nome(z);
        // Horner in q.
        let mut value = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            value = value * q + rational::to_f64(c);
        }
        let tail_bound = self.tail_bound(r, opts.growth_exponent)?;
        Ok(Evaluation { value, tail_bound })
    }

    /// Geometric tail estimate assuming `|c_n| <= C n^g`, with `C` the largest
    /// ratio `|c_n| / n^g` seen among the known coefficients (`n >= 1`).
    pub fn tail_bound(&self, r: f64, growth_exponent: f64) -> Result<f64, SeriesError> {
        let n_terms = self.precision();
        let constant = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| rational::to_f64(&c.abs()) / (n as f64).powf(growth_exponent))
            .fold(0.0_f64, f64::max);
        if constant == 0.0 {
            return Ok(0.0);
        }
        let n = n_terms as f64;
        let rho = (1.0 + 1.0 / n).powf(growth_exponent) * r;
        if rho >= 1.0 {
            return Err(SeriesError::EvaluationDomain(format!(
                "tail ratio {rho:.3e} >= 1 at |q| = {r:.3e}; increase Im(z)"
            )));
        }
        Ok(constant * n.powf(growth_exponent) * r.powf(n) / (1.0 - rho))
    }
}

/// Lower bound on `Im z` and coefficient growth exponent used by
/// [`QSeries::evaluate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalOptions {
    pub min_imag: f64,
    pub growth_exponent: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { min_imag: 0.3, growth_exponent: 12.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// `q = exp(2πiz)`.
pub fn nome(z: Complex64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * z).exp()
}

/// `|q|` after checking the evaluation threshold.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn nome_modulus(z: Complex64, opts: &EvalOptions) -> Result<f64, SeriesError> {
    // Negated so that NaN is rejected too.
    if !(z.im >= opts.min_imag) {
        return Err(SeriesError::EvaluationDomain(format!(
            "Im(z) = {} is below the evaluation threshold {}",
            z.im, opts.min_imag
        )));
    }
    Ok((-2.0 * std::f64::consts::PI * z.im).exp())
}

fn zip_with(a: &QSeries, b: &QSeries, f: impl Fn(&Rational, &Rational) -> Rational) -> QSeries {
    QSeries::new(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| f(x, y)).collect())
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        let n = self.precision().min(rhs.precision());
        let mut out = vec![Rational::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(n - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        QSeries::new(out)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for QSeries {
            type Output = QSeries;
            fn $m(self, rhs: QSeries) -> QSeries {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl fmt::Display for QSeries {
    /// `1 + 240q + 2160q^2 + O(q^3)`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = fmt_rational(&c.abs());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let unit = mag == "1";
            match n {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !unit {
                        write!(f, "{mag}")?;
                    }
                    if n == 1 {
                        write!(f, "q")?;
                    } else {
                        write!(f, "q^{n}")?;
                    }
                }
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.precision())
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    precision: usize,
    #[serde(with = "crate::rational::pair_vec")]
    coeffs: Vec<Rational>,
}

impl Serialize for QSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SeriesJson { precision: self.precision(), coeffs: self.coeffs.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = SeriesJson::deserialize(d)?;
        if raw.precision == 0 || raw.coeffs.len() != raw.precision {
            return Err(serde::de::Error::custom(format!(
                "series precision {} does not match {} coefficients",
                raw.precision,
                raw.coeffs.len()
            )));
        }
        Ok(QSeries::new(raw.coeffs))
    }
}
