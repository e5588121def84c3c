//! The quasimodular ring of the full modular group as the free graded algebra
//! `Q[E2, E4, E6]`, with the operators `D`, `δ`, `H` acting exactly.
//!
//! `D` is the normalized derivative `q d/dq` (so `D(E2) = (E2^2 - E4)/12`
//! etc.), `δ` is the derivation with `δ(E2) = 12` and `δ(E4) = δ(E6) = 0`,
//! and `H` multiplies a weight-`k` component by `k`. With these constants
//! `[H, D] = 2D`, `[H, δ] = -2δ` and `[δ, D] = H`.
//!
//! Operators act on arbitrary (possibly non-homogeneous) polynomials weight
//! component by weight component; [`WeightedForm`] pins a single weight.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::FormError;
use crate::qseries::QSeries;
use crate::rational::{fmt_rational, rat, ratio, Rational};

/// Exponents `(a, b, c)` of `E2^a E4^b E6^c`.
pub type Exponent = [u32; 3];

pub fn monomial_weight(e: &Exponent) -> u32 {
    2 * e[0] + 4 * e[1] + 6 * e[2]
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QmPolynomial {
    terms: BTreeMap<Exponent, Rational>,
}

impl QmPolynomial {
    pub fn zero() -> Self {
        QmPolynomial::default()
    }

    pub fn constant(c: Rational) -> Self {
        QmPolynomial::monomial([0, 0, 0], c)
    }

    pub fn one() -> Self {
        QmPolynomial::constant(rat(1))
    }

    pub fn monomial(exp: Exponent, c: Rational) -> Self {
        let mut p = QmPolynomial::zero();
        p.add_term(exp, c);
        p
    }

    pub fn e2() -> Self {
        QmPolynomial::monomial([1, 0, 0], rat(1))
    }

    pub fn e4() -> Self {
        QmPolynomial::monomial([0, 1, 0], rat(1))
    }

    pub fn e6() -> Self {
        QmPolynomial::monomial([0, 0, 1], rat(1))
    }

    /// The discriminant `(E4^3 - E6^2) / 1728`.
    pub fn delta() -> Self {
        let e4 = QmPolynomial::e4();
        let e6 = QmPolynomial::e6();
        (&e4.pow(3) - &e6.pow(2)).scale(&ratio(1, 1728))
    }

    /// `φ = E2/12`, the weight-2 form with `δφ = 1`.
    pub fn phi() -> Self {
        QmPolynomial::e2().scale(&ratio(1, 12))
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, Rational)>>(it: I) -> Self {
        let mut p = QmPolynomial::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exp: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exp: &Exponent) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return QmPolynomial::zero();
        }
        QmPolynomial { terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = QmPolynomial::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Weight if homogeneous, `None` for the zero polynomial.
    pub fn weight(&self) -> Result<Option<u32>, FormError> {
        let mut it = self.terms.keys().map(monomial_weight);
        match it.next() {
            None => Ok(None),
            Some(w) if it.all(|x| x == w) => Ok(Some(w)),
            Some(_) => Err(FormError::NotHomogeneous),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.weight().is_ok()
    }

    /// Splits into homogeneous components keyed by weight.
    pub fn components(&self) -> BTreeMap<u32, QmPolynomial> {
        let mut out: BTreeMap<u32, QmPolynomial> = BTreeMap::new();
        for (e, c) in &self.terms {
            out.entry(monomial_weight(e)).or_default().add_term(*e, c.clone());
        }
        out
    }

    /// Largest power of `E2` present (the depth of a homogeneous form).
    pub fn e2_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e[0]).max()
    }

    /// Applies the derivation determined by the images of `E2, E4, E6`.
    pub fn derive(&self, images: [&QmPolynomial; 3]) -> QmPolynomial {
        let mut out = QmPolynomial::zero();
        for (e, c) in &self.terms {
            for i in 0..3 {
                if e[i] == 0 || images[i].is_zero() {
                    continue;
                }
                let mut rest = *e;
                rest[i] -= 1;
                let factor = c * rat(e[i] as i64);
                for (ie, ic) in &images[i].terms {
                    let ex = [rest[0] + ie[0], rest[1] + ie[1], rest[2] + ie[2]];
                    out.add_term(ex, &factor * ic);
                }
            }
        }
        out
    }

    /// `D = q d/dq` via the Ramanujan identities.
    pub fn apply_d(&self) -> QmPolynomial {
        let imgs = ramanujan_images();
        self.derive([&imgs[0], &imgs[1], &imgs[2]])
    }

    pub fn apply_d_n(&self, n: u32) -> QmPolynomial {
        (0..n).fold(self.clone(), |f, _| f.apply_d())
    }

    /// `δ`, the derivation with `δ(E2) = 12` killing `E4` and `E6`.
    pub fn apply_delta(&self) -> QmPolynomial {
        let mut out = QmPolynomial::zero();
        for (e, c) in &self.terms {
            if e[0] > 0 {
                out.add_term([e[0] - 1, e[1], e[2]], c * rat(12 * e[0] as i64));
            }
        }
        out
    }

    pub fn apply_delta_n(&self, n: u32) -> QmPolynomial {
        (0..n).fold(self.clone(), |f, _| f.apply_delta())
    }

    /// `H`: multiplication by the weight, component by component. This is
    /// also the Euler operator `E`.
    pub fn apply_h(&self) -> QmPolynomial {
        QmPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| monomial_weight(e) != 0)
                .map(|(e, c)| (*e, c * rat(monomial_weight(e) as i64)))
                .collect(),
        }
    }

    /// Substitutes q-expansions of the Eisenstein series to precision `n`.
    pub fn qexpansion(&self, n: usize) -> QSeries {
        QExpander::new(n).expand(self)
    }
}

fn ramanujan_images() -> [QmPolynomial; 3] {
    let e2 = QmPolynomial::e2();
    let e4 = QmPolynomial::e4();
    let e6 = QmPolynomial::e6();
    [
        (&(&e2 * &e2) - &e4).scale(&ratio(1, 12)),
        (&(&e2 * &e4) - &e6).scale(&ratio(1, 3)),
        (&(&e2 * &e6) - &(&e4 * &e4)).scale(&ratio(1, 2)),
    ]
}

impl Add for &QmPolynomial {
    type Output = QmPolynomial;
    fn add(self, rhs: &QmPolynomial) -> QmPolynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &QmPolynomial {
    type Output = QmPolynomial;
    fn sub(self, rhs: &QmPolynomial) -> QmPolynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Neg for &QmPolynomial {
    type Output = QmPolynomial;
    fn neg(self) -> QmPolynomial {
        self.scale(&rat(-1))
    }
}

impl Mul for &QmPolynomial {
    type Output = QmPolynomial;
    fn mul(self, rhs: &QmPolynomial) -> QmPolynomial {
        let mut out = QmPolynomial::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($t:ty; $($tr:ident $m:ident),*) => {$(
        impl $tr for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(QmPolynomial; Add add, Sub sub, Mul mul);

impl fmt::Display for QmPolynomial {
    /// `E2^2*E4 - 1/3*E6`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mag = c.abs();
            let mut factors = Vec::new();
            for (k, name) in ["E2", "E4", "E6"].iter().enumerate() {
                match e[k] {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    n => factors.push(format!("{name}^{n}")),
                }
            }
            if factors.is_empty() {
                write!(f, "{}", fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&mag), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Exponent,
    #[serde(with = "crate::rational::pair")]
    coeff: Rational,
}

impl Serialize for QmPolynomial {
    /// Canonical form: terms sorted lexicographically by exponent.
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.terms.iter().map(|(e, c)| TermJson { exp: *e, coeff: c.clone() }))
    }
}

impl<'de> Deserialize<'de> for QmPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<TermJson> = Vec::deserialize(d)?;
        Ok(QmPolynomial::from_terms(raw.into_iter().map(|t| (t.exp, t.coeff))))
    }
}

/// Homogeneous form of a fixed even weight (the zero form carries a weight too).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct WeightedForm {
    weight: u32,
    poly: QmPolynomial,
}

impl WeightedForm {
    pub fn new(poly: QmPolynomial, weight: u32) -> Result<Self, FormError> {
        if !weight.is_multiple_of(2) {
            return Err(FormError::Invalid(format!("odd weight {weight}")));
        }
        match poly.weight()? {
            Some(w) if w != weight => {
                Err(FormError::Invalid(format!("polynomial has weight {w}, expected {weight}")))
            }
            _ => Ok(WeightedForm { weight, poly }),
        }
    }

    /// Infers the weight; the zero polynomial is rejected since it has none.
    pub fn from_poly(poly: QmPolynomial) -> Result<Self, FormError> {
        match poly.weight()? {
            Some(w) => Ok(WeightedForm { weight: w, poly }),
            None => Err(FormError::Invalid("cannot infer the weight of the zero form".into())),
        }
    }

    pub fn zero(weight: u32) -> Self {
        WeightedForm { weight, poly: QmPolynomial::zero() }
    }

    pub fn constant(c: Rational) -> Self {
        WeightedForm { weight: 0, poly: QmPolynomial::constant(c) }
    }

    pub fn e2() -> Self {
        WeightedForm { weight: 2, poly: QmPolynomial::e2() }
    }

    pub fn e4() -> Self {
        WeightedForm { weight: 4, poly: QmPolynomial::e4() }
    }

    pub fn e6() -> Self {
        WeightedForm { weight: 6, poly: QmPolynomial::e6() }
    }

    pub fn delta() -> Self {
        WeightedForm { weight: 12, poly: QmPolynomial::delta() }
    }

    pub fn phi() -> Self {
        WeightedForm { weight: 2, poly: QmPolynomial::phi() }
    }

    /// `E2^a E4^b E6^c`.
    pub fn monomial(exp: Exponent) -> Self {
        WeightedForm { weight: monomial_weight(&exp), poly: QmPolynomial::monomial(exp, rat(1)) }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn poly(&self) -> &QmPolynomial {
        &self.poly
    }

    pub fn into_poly(self) -> QmPolynomial {
        self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn apply_d(&self) -> WeightedForm {
        WeightedForm { weight: self.weight + 2, poly: self.poly.apply_d() }
    }

    pub fn apply_d_n(&self, n: u32) -> WeightedForm {
        (0..n).fold(self.clone(), |f, _| f.apply_d())
    }

    /// Lowers the weight by two. Weight-0 forms are constants, killed by `δ`.
    pub fn apply_delta(&self) -> WeightedForm {
        if self.weight == 0 {
            return WeightedForm::zero(0);
        }
        WeightedForm { weight: self.weight - 2, poly: self.poly.apply_delta() }
    }

    pub fn apply_delta_n(&self, n: u32) -> WeightedForm {
        (0..n).fold(self.clone(), |f, _| f.apply_delta())
    }

    pub fn apply_h(&self) -> WeightedForm {
        self.scale(&rat(self.weight as i64))
    }

    /// Maximal `E2`-degree; equals the largest `n` with `δ^n f != 0`.
    pub fn depth(&self) -> Result<u32, FormError> {
        self.poly.e2_degree().ok_or(FormError::UndefinedDepth)
    }

    pub fn is_modular(&self) -> bool {
        self.poly.e2_degree().unwrap_or(0) == 0
    }

    pub fn require_modular(&self) -> Result<(), FormError> {
        match self.poly.e2_degree() {
            Some(d) if d > 0 => Err(FormError::NotModular(d)),
            _ => Ok(()),
        }
    }

    pub fn scale(&self, c: &Rational) -> WeightedForm {
        WeightedForm { weight: self.weight, poly: self.poly.scale(c) }
    }

    pub fn checked_add(&self, rhs: &WeightedForm) -> Result<WeightedForm, FormError> {
        self.same_weight(rhs)?;
        Ok(WeightedForm { weight: self.weight, poly: &self.poly + &rhs.poly })
    }

    pub fn checked_sub(&self, rhs: &WeightedForm) -> Result<WeightedForm, FormError> {
        self.same_weight(rhs)?;
        Ok(WeightedForm { weight: self.weight, poly: &self.poly - &rhs.poly })
    }

    fn same_weight(&self, rhs: &WeightedForm) -> Result<(), FormError> {
        if self.weight != rhs.weight {
            return Err(FormError::Invalid(format!("weight mismatch: {} vs {}", self.weight, rhs.weight)));
        }
        Ok(())
    }

    pub fn qexpansion(&self, n: usize) -> QSeries {
        self.poly.qexpansion(n)
    }
}

/// Panics on a weight mismatch; use [`WeightedForm::checked_add`] for fallible addition.
impl Add for &WeightedForm {
    type Output = WeightedForm;
    fn add(self, rhs: &WeightedForm) -> WeightedForm {
        self.checked_add(rhs).expect("adding forms of different weights")
    }
}

/// Panics on a weight mismatch.
impl Sub for &WeightedForm {
    type Output = WeightedForm;
    fn sub(self, rhs: &WeightedForm) -> WeightedForm {
        self.checked_sub(rhs).expect("subtracting forms of different weights")
    }
}

impl Mul for &WeightedForm {
    type Output = WeightedForm;
    fn mul(self, rhs: &WeightedForm) -> WeightedForm {
        WeightedForm { weight: self.weight + rhs.weight, poly: &self.poly * &rhs.poly }
    }
}

forward_owned!(WeightedForm; Add add, Sub sub, Mul mul);

impl fmt::Display for WeightedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt(f)
    }
}

impl<'de> Deserialize<'de> for WeightedForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            weight: u32,
            poly: QmPolynomial,
        }
        let raw = Raw::deserialize(d)?;
        WeightedForm::new(raw.poly, raw.weight).map_err(serde::de::Error::custom)
    }
}

/// Monomials `E2^a E4^b E6^c` of weight exactly `k`, in lexicographic order.
pub fn monomials_of_weight(k: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    if !k.is_multiple_of(2) {
        return out;
    }
    for c in 0..=k / 6 {
        for b in 0..=(k - 6 * c) / 4 {
            let rest = k - 6 * c - 4 * b;
            out.push([rest / 2, b, c]);
        }
    }
    out.sort();
    out
}

/// `E2`-free monomials of weight `k`: a basis of `M_k = Q[E4, E6]_k`.
pub fn modular_monomials_of_weight(k: u32) -> Vec<Exponent> {
    monomials_of_weight(k).into_iter().filter(|e| e[0] == 0).collect()
}

/// `σ_r(n)`, the sum of `d^r` over divisors `d` of `n`.
pub fn divisor_sigma(r: u32, n: u64) -> num_bigint::BigInt {
    let mut s = num_bigint::BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += num_bigint::BigInt::from(d).pow(r);
            let e = n / d;
            if e != d {
                s += num_bigint::BigInt::from(e).pow(r);
            }
        }
        d += 1;
    }
    s
}

/// q-expansion of `E2`, `E4` or `E6` to precision `n`.
pub fn eisenstein_qexp(k: u32, n: usize) -> Result<QSeries, FormError> {
    let (scale, r) = match k {
        2 => (-24, 1),
        4 => (240, 3),
        6 => (-504, 5),
        _ => return Err(FormError::UnsupportedWeight(k)),
    };
    let mut coeffs = vec![rat(1)];
    for m in 1..n as u64 {
        coeffs.push(Rational::from_integer(divisor_sigma(r, m) * scale));
    }
    coeffs.truncate(n.max(1));
    Ok(QSeries::new(coeffs))
}

/// Evaluates polynomials at the Eisenstein q-expansions, caching generator
/// powers across calls.
pub struct QExpander {
    precision: usize,
    gens: [QSeries; 3],
    powers: HashMap<(usize, u32), QSeries>,
}

impl QExpander {
    pub fn new(precision: usize) -> Self {
        let gens = [2, 4, 6].map(|k| eisenstein_qexp(k, precision).expect("supported weight"));
        QExpander { precision, gens, powers: HashMap::new() }
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    fn power(&mut self, i: usize, e: u32) -> QSeries {
        if e == 0 {
            return QSeries::one(self.precision);
        }
        if let Some(s) = self.powers.get(&(i, e)) {
            return s.clone();
        }
        let s = &self.power(i, e - 1) * &self.gens[i];
        self.powers.insert((i, e), s.clone());
        s
    }

    pub fn expand(&mut self, f: &QmPolynomial) -> QSeries {
        let mut acc = QSeries::zero(self.precision);
        for (e, c) in f.terms() {
            let mut m = self.power(0, e[0]);
            if e[1] > 0 {
                m = &m * &self.power(1, e[1]);
            }
            if e[2] > 0 {
                m = &m * &self.power(2, e[2]);
            }
            acc = &acc + &m.scale(c);
        }
        acc
    }
}
