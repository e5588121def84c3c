//! PBW normal forms in the universal enveloping algebra of `sl2` generated by
//! `D`, `H`, `δ` with `[H, D] = 2D`, `[H, δ] = -2δ`, `[δ, D] = H`.
//!
//! Elements are rational combinations of ordered monomials `D^a H^b δ^c` with
//! `δ` rightmost, so the left ideal `Uδ` is exactly the span of the monomials
//! with `c >= 1` and reduction modulo `Uδ` is a filter.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::qm::QmPolynomial;
use crate::rational::{binomial, factorial, fmt_rational, rat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    D,
    H,
    Delta,
}

impl Letter {
    fn rank(self) -> u8 {
        match self {
            Letter::D => 0,
            Letter::H => 1,
            Letter::Delta => 2,
        }
    }

    pub fn grading(self) -> i64 {
        match self {
            Letter::D => 2,
            Letter::H => 0,
            Letter::Delta => -2,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Letter::D => "D",
            Letter::H => "H",
            Letter::Delta => "d",
        })
    }
}

/// Parses words such as `"ddDD"`, `"d^2 D^2"` or `"δHD"`. `d` and `δ` both
/// denote the lowering operator.
pub fn parse_word(s: &str) -> Result<Vec<Letter>, String> {
    let mut out = Vec::new();
    let mut chars = s.chars().filter(|c| !c.is_whitespace() && *c != '*').peekable();
    while let Some(c) = chars.next() {
        let letter = match c {
            'D' => Letter::D,
            'H' => Letter::H,
            'd' | 'δ' => Letter::Delta,
            other => return Err(format!("unexpected character `{other}` in word")),
        };
        let mut reps = 1usize;
        if chars.peek() == Some(&'^') {
            chars.next();
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            reps = digits.parse().map_err(|_| format!("missing exponent after `{c}^`"))?;
        }
        out.extend(std::iter::repeat_n(letter, reps));
    }
    Ok(out)
}

/// `(a, b, c)` for `D^a H^b δ^c`.
pub type PbwExponent = [u32; 3];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UeaElement {
    terms: BTreeMap<PbwExponent, Rational>,
}

impl UeaElement {
    pub fn zero() -> Self {
        UeaElement::default()
    }

    pub fn one() -> Self {
        UeaElement::monomial([0, 0, 0], rat(1))
    }

    pub fn monomial(exp: PbwExponent, c: Rational) -> Self {
        let mut e = UeaElement::zero();
        e.add_term(exp, c);
        e
    }

    /// Polynomial `Σ c_b H^b` from coefficients in increasing degree.
    pub fn h_polynomial(coeffs: &[Rational]) -> Self {
        let mut e = UeaElement::zero();
        for (b, c) in coeffs.iter().enumerate() {
            e.add_term([0, b as u32, 0], c.clone());
        }
        e
    }

    pub fn add_term(&mut self, exp: PbwExponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PbwExponent, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &PbwExponent) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = UeaElement::zero();
        for (e, x) in &self.terms {
            out.add_term(*e, x * c);
        }
        out
    }

    /// The `sl2` grading `2(a - c)` shared by all monomials, or `None` if the
    /// element is zero or mixes gradings.
    pub fn degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|e| 2 * (e[0] as i64 - e[2] as i64));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// `letter · self`, staying in PBW form.
    pub fn left_mul_letter(&self, letter: Letter) -> UeaElement {
        let mut out = UeaElement::zero();
        for (&[a, b, c], x) in &self.terms {
            match letter {
                Letter::D => out.add_term([a + 1, b, c], x.clone()),
                // H D^a = D^a (H + 2a)
                Letter::H => {
                    out.add_term([a, b + 1, c], x.clone());
                    out.add_term([a, b, c], x * rat(2 * a as i64));
                }
                // δ D^a = D^a δ + a D^(a-1) (H + a - 1), and δ H^b = (H + 2)^b δ
                Letter::Delta => {
                    for i in 0..=b {
                        let coef =
                            Rational::from_integer(binomial(b as i64, i as u64) * BigInt::from(2).pow(b - i));
                        out.add_term([a, i, c + 1], x * coef);
                    }
                    if a > 0 {
                        let xa = x * rat(a as i64);
                        out.add_term([a - 1, b + 1, c], xa.clone());
                        out.add_term([a - 1, b, c], xa * rat(a as i64 - 1));
                    }
                }
            }
        }
        out
    }

    /// Keeps the monomials without `δ`, i.e. the class modulo `Uδ`.
    pub fn mod_u_delta(&self) -> UeaElement {
        UeaElement {
            terms: self.terms.iter().filter(|(e, _)| e[2] == 0).map(|(e, c)| (*e, c.clone())).collect(),
        }
    }

    /// Applies the operator to a quasimodular polynomial: each monomial acts as
    /// `D^a ∘ H^b ∘ δ^c`.
    pub fn act(&self, f: &QmPolynomial) -> QmPolynomial {
        let mut out = QmPolynomial::zero();
        for (&[a, b, c], x) in &self.terms {
            let mut g = f.apply_delta_n(c);
            for _ in 0..b {
                g = g.apply_h();
            }
            g = g.apply_d_n(a);
            out = &out + &g.scale(x);
        }
        out
    }

    /// Renders one monomial per line as `coeff D^a H^b d^c`, sorted by `(a, b, c)`.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(e, c)| format!("{} D^{} H^{} d^{}", fmt_rational(c), e[0], e[1], e[2]))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl fmt::Display for UeaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Add for &UeaElement {
    type Output = UeaElement;
    fn add(self, rhs: &UeaElement) -> UeaElement {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &UeaElement {
    type Output = UeaElement;
    fn sub(self, rhs: &UeaElement) -> UeaElement {
        self + &rhs.scale(&rat(-1))
    }
}

impl Mul for &UeaElement {
    type Output = UeaElement;
    /// Product of PBW forms: each left monomial `D^a H^b δ^c` is pushed onto
    /// the right factor letter by letter.
    fn mul(self, rhs: &UeaElement) -> UeaElement {
        let mut out = UeaElement::zero();
        for (&[a, b, c], x) in &self.terms {
            let mut acc = rhs.clone();
            for _ in 0..c {
                acc = acc.left_mul_letter(Letter::Delta);
            }
            for _ in 0..b {
                acc = acc.left_mul_letter(Letter::H);
            }
            for _ in 0..a {
                acc = acc.left_mul_letter(Letter::D);
            }
            out = &out + &acc.scale(x);
        }
        out
    }
}

fn word_degree(word: &[Letter]) -> i64 {
    word.iter().map(|l| l.grading()).sum()
}

/// PBW normal form of a word, obtained by multiplying letters onto the
/// identity from the right end.
///
/// Panics if the result breaks the `sl2` grading of the word, which would
/// indicate a rewriting bug.
pub fn pbw_reduce(word: &[Letter]) -> UeaElement {
    let out = word.iter().rev().fold(UeaElement::one(), |acc, &l| acc.left_mul_letter(l));
    check_grading(word, &out);
    out
}

fn check_grading(word: &[Letter], e: &UeaElement) {
    let deg = word_degree(word);
    for (&[a, _, c], _) in e.terms() {
        assert_eq!(
            2 * (a as i64 - c as i64),
            deg,
            "grading violated by D^{a} H^* d^{c} in reduction of {word:?}"
        );
    }
}

/// Reduces a word by literal application of `δD -> Dδ + H`, `HD -> DH + 2D`,
/// `δH -> Hδ + 2δ`. `choose` receives the positions of all out-of-order
/// adjacent pairs in the word being rewritten and returns the one to rewrite,
/// which makes the rewrite order fully controllable.
pub fn rewrite_word<F>(word: &[Letter], mut choose: F) -> UeaElement
where
    F: FnMut(&[usize]) -> usize,
{
    let mut pending: BTreeMap<Vec<Letter>, Rational> = BTreeMap::new();
    pending.insert(word.to_vec(), rat(1));
    let mut done = UeaElement::zero();
    while let Some((w, x)) = pending.pop_first() {
        if x.is_zero() {
            continue;
        }
        let bad: Vec<usize> =
            (0..w.len().saturating_sub(1)).filter(|&i| w[i].rank() > w[i + 1].rank()).collect();
        if bad.is_empty() {
            let count = |l: Letter| w.iter().filter(|&&m| m == l).count() as u32;
            done.add_term([count(Letter::D), count(Letter::H), count(Letter::Delta)], x);
            continue;
        }
        let i = choose(&bad);
        assert!(bad.contains(&i), "chooser returned a position that is not a redex");
        let (left, right) = (w[i], w[i + 1]);
        let splice = |mid: &[Letter]| -> Vec<Letter> {
            let mut v = w[..i].to_vec();
            v.extend_from_slice(mid);
            v.extend_from_slice(&w[i + 2..]);
            v
        };
        let replacements: Vec<(Vec<Letter>, Rational)> = match (left, right) {
            (Letter::Delta, Letter::D) => {
                vec![(splice(&[Letter::D, Letter::Delta]), rat(1)), (splice(&[Letter::H]), rat(1))]
            }
            (Letter::H, Letter::D) => {
                vec![(splice(&[Letter::D, Letter::H]), rat(1)), (splice(&[Letter::D]), rat(2))]
            }
            (Letter::Delta, Letter::H) => {
                vec![(splice(&[Letter::H, Letter::Delta]), rat(1)), (splice(&[Letter::Delta]), rat(2))]
            }
            _ => unreachable!("only out-of-order pairs are rewritten"),
        };
        for (nw, c) in replacements {
            *pending.entry(nw).or_insert_with(Rational::zero) += &x * c;
        }
    }
    check_grading(word, &done);
    done
}

/// `δ^n D^n` as a word.
pub fn delta_n_d_n(n: usize) -> Vec<Letter> {
    let mut w = vec![Letter::Delta; n];
    w.extend(std::iter::repeat_n(Letter::D, n));
    w
}

/// `n! H (H+1) ... (H+n-1)` expanded in powers of `H`.
pub fn prop4_rhs(n: u32) -> UeaElement {
    // coefficients of the rising product, lowest degree first
    let mut poly: Vec<BigInt> = vec![BigInt::from(1)];
    for j in 0..n {
        let mut next = vec![BigInt::zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] += c;
            next[i] += c * BigInt::from(j);
        }
        poly = next;
    }
    let nf = factorial(n as u64);
    let coeffs: Vec<Rational> = poly.into_iter().map(|c| Rational::from_integer(c * &nf)).collect();
    UeaElement::h_polynomial(&coeffs)
}

/// `n!^2 C(k+n-1, n)`, the eigenvalue of `δ^n D^n` on `M_k`.
pub fn lowest_weight_eigenvalue(n: u32, k: u32) -> Rational {
    let nf = factorial(n as u64);
    Rational::from_integer(&nf * &nf * binomial(k as i64 + n as i64 - 1, n as u64))
}

/// Whether `mod_u_delta(pbw_reduce(δ^n D^n)) == prop4_rhs(n)`, with both sides.
pub fn verify_prop4(n: u32) -> (bool, UeaElement, UeaElement) {
    let lhs = pbw_reduce(&delta_n_d_n(n as usize)).mod_u_delta();
    let rhs = prop4_rhs(n);
    (lhs == rhs, lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qm::WeightedForm;
    use Letter::*;

    fn h_poly(c: &[i64]) -> UeaElement {
        UeaElement::h_polynomial(&c.iter().map(|&x| rat(x)).collect::<Vec<_>>())
    }

    #[test]
    fn basic_commutators() {
        let expected = &UeaElement::monomial([1, 0, 1], rat(1)) + &UeaElement::monomial([0, 1, 0], rat(1));
        assert_eq!(pbw_reduce(&[Delta, D]), expected);
        let expected = &UeaElement::monomial([1, 1, 0], rat(1)) + &UeaElement::monomial([1, 0, 0], rat(2));
        assert_eq!(pbw_reduce(&[H, D]), expected);
        let expected = &UeaElement::monomial([0, 1, 1], rat(1)) + &UeaElement::monomial([0, 0, 1], rat(2));
        assert_eq!(pbw_reduce(&[Delta, H]), expected);
    }

    #[test]
    fn delta2_d2_normal_form() {
        let e = pbw_reduce(&delta_n_d_n(2));
        let mut expected = UeaElement::zero();
        for (exp, c) in [([2, 0, 2], 1), ([1, 1, 1], 4), ([1, 0, 1], 8), ([0, 2, 0], 2), ([0, 1, 0], 2)] {
            expected.add_term(exp, rat(c));
        }
        assert_eq!(e, expected, "{e}");
        assert_eq!(e.mod_u_delta(), h_poly(&[0, 2, 2]));
    }

    #[test]
    fn mod_u_delta_examples() {
        assert_eq!(pbw_reduce(&[Delta, D]).mod_u_delta(), h_poly(&[0, 1]));
        assert_eq!(h_poly(&[0, 0, 1]).mod_u_delta(), h_poly(&[0, 0, 1]));
    }

    #[test]
    fn prop4_rhs_values() {
        assert_eq!(prop4_rhs(1), h_poly(&[0, 1]));
        assert_eq!(prop4_rhs(2), h_poly(&[0, 2, 2]));
        assert_eq!(prop4_rhs(3), h_poly(&[0, 12, 18, 6]));
    }

    #[test]
    fn eigenvalues() {
        assert_eq!(lowest_weight_eigenvalue(1, 4), rat(4));
        assert_eq!(lowest_weight_eigenvalue(0, 10), rat(1));
        assert_eq!(lowest_weight_eigenvalue(2, 4), rat(40));
        let e4 = WeightedForm::e4();
        assert_eq!(e4.apply_d().apply_delta(), e4.scale(&rat(4)));
        assert_eq!(e4.apply_d_n(2).apply_delta_n(2), e4.scale(&rat(40)));
    }

    #[test]
    fn leftmost_and_rightmost_rewriting_agree() {
        let w = parse_word("dHdDDHD").unwrap();
        let l = rewrite_word(&w, |b| b[0]);
        let r = rewrite_word(&w, |b| *b.last().unwrap());
        assert_eq!(l, r);
        assert_eq!(l, pbw_reduce(&w));
    }

    #[test]
    fn multiplication_is_word_concatenation() {
        let u = parse_word("dDH").unwrap();
        let v = parse_word("DdD").unwrap();
        let uv: Vec<Letter> = u.iter().chain(&v).copied().collect();
        assert_eq!(&pbw_reduce(&u) * &pbw_reduce(&v), pbw_reduce(&uv));
    }

    #[test]
    fn parse_word_forms() {
        assert_eq!(parse_word("d^2 D^2").unwrap(), delta_n_d_n(2));
        assert_eq!(parse_word("δHD").unwrap(), vec![Delta, H, D]);
        assert!(parse_word("DX").is_err());
        assert!(parse_word("D^").is_err());
    }

    #[test]
    fn text_rendering() {
        assert_eq!(pbw_reduce(&[Delta, D]).to_text(), "1 D^0 H^1 d^0\n1 D^1 H^0 d^1");
        assert_eq!(UeaElement::zero().to_text(), "0");
    }
}
