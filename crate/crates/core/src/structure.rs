//! Stacks, the depth decomposition `M̃ = C ⊕ ⊕_i D^i(M) ⊕ ⊕_i C·D^i(φ)`,
//! the lowering action on `D`-strings of modular forms, and numeric checks of
//! the transformation laws.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::FormError;
use crate::linalg::{self, EchelonBasis};
use crate::qm::{
    eisenstein_qexp, modular_monomials_of_weight, monomials_of_weight, Exponent, QmPolynomial, WeightedForm,
};
use crate::qseries::{EvalOptions, DEFAULT_PRECISION};
use crate::rational::{self, binomial, factorial, rat, Rational, RationalPair, RationalRef};

/// `(f_0, ..., f_p)` with `f_j = δ^j f / j!` of weight `k - 2j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularStack {
    pub weight: u32,
    pub coeffs: Vec<WeightedForm>,
}

impl ModularStack {
    pub fn depth(&self) -> usize {
        self.coeffs.len() - 1
    }
}

pub fn to_stack(f: &WeightedForm) -> ModularStack {
    let p = f.depth().unwrap_or(0);
    let mut coeffs = vec![f.clone()];
    let mut cur = f.clone();
    for j in 1..=p {
        cur = cur.apply_delta();
        coeffs.push(cur.scale(&Rational::from_integer(factorial(j as u64)).recip()));
    }
    ModularStack { weight: f.weight(), coeffs }
}

/// `f = Σ_i D^i(g_i) + Σ_i c_i D^i(φ) + constant`, with `g_i` modular of
/// weight `k - 2i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub weight: u32,
    pub modular_parts: BTreeMap<u32, WeightedForm>,
    pub phi_coeffs: BTreeMap<u32, Rational>,
    pub constant: Rational,
}

impl Decomposition {
    pub fn empty(weight: u32) -> Self {
        Decomposition {
            weight,
            modular_parts: BTreeMap::new(),
            phi_coeffs: BTreeMap::new(),
            constant: Rational::zero(),
        }
    }

    fn add_modular(&mut self, i: u32, g: WeightedForm) {
        let slot = self.modular_parts.entry(i).or_insert_with(|| WeightedForm::zero(g.weight()));
        *slot = &*slot + &g;
        if slot.is_zero() {
            self.modular_parts.remove(&i);
        }
    }

    fn add_phi(&mut self, i: u32, c: Rational) {
        let slot = self.phi_coeffs.entry(i).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.phi_coeffs.remove(&i);
        }
    }
}

/// `D^i(φ)`, weight `2i + 2`.
pub fn d_phi(i: u32) -> WeightedForm {
    WeightedForm::phi().apply_d_n(i)
}

/// `δ^p D^p` acts on `M_{k-2p}` as this scalar.
fn lowering_scalar(k: u32, p: u32) -> Rational {
    let pf = factorial(p as u64);
    Rational::from_integer(&pf * &pf * binomial(k as i64 - p as i64 - 1, p as u64))
}

fn weight_zero_scalar(f: &WeightedForm) -> Rational {
    debug_assert_eq!(f.weight(), 0);
    f.poly().coeff(&[0, 0, 0])
}

/// Depth-stripping decomposition: repeatedly removes the top-depth component
/// using the lowering operator.
pub fn decompose(f: &WeightedForm) -> Decomposition {
    let k = f.weight();
    let mut out = Decomposition::empty(k);
    let mut rest = f.clone();
    while let Ok(p) = rest.depth() {
        if p == 0 {
            break;
        }
        let top = rest.apply_delta_n(p);
        if 2 * p < k {
            let m = top.scale(&lowering_scalar(k, p).recip());
            rest = &rest - &m.apply_d_n(p);
            out.add_modular(p, m);
        } else {
            // 2p == k: only the φ-line reaches this depth
            let t = weight_zero_scalar(&d_phi(p - 1).apply_delta_n(p));
            let c = weight_zero_scalar(&top) / t;
            rest = &rest - &d_phi(p - 1).scale(&c);
            out.add_phi(p - 1, c);
        }
    }
    if k == 0 {
        out.constant = weight_zero_scalar(&rest);
    } else if !rest.is_zero() {
        out.add_modular(0, rest);
    }
    out
}

/// Spanning set used by [`decompose_linear`]: `D^i(m)` for modular monomials
/// `m` of weight `k - 2i > 0`, then `D^{k/2-1}(φ)` (or `1` when `k = 0`).
fn graded_basis(k: u32) -> Vec<(BasisLabel, WeightedForm)> {
    let mut out = Vec::new();
    for i in 0..=k / 2 {
        let w = k - 2 * i;
        if w == 0 {
            continue;
        }
        for e in modular_monomials_of_weight(w) {
            out.push((BasisLabel::Modular(i, e), WeightedForm::monomial(e).apply_d_n(i)));
        }
    }
    if k == 0 {
        out.push((BasisLabel::Constant, WeightedForm::constant(rat(1))));
    } else {
        out.push((BasisLabel::Phi(k / 2 - 1), d_phi(k / 2 - 1)));
    }
    out
}

enum BasisLabel {
    Modular(u32, Exponent),
    Phi(u32),
    Constant,
}

fn coordinates(f: &WeightedForm, monomials: &[Exponent]) -> Vec<Rational> {
    monomials.iter().map(|e| f.poly().coeff(e)).collect()
}

/// The same decomposition obtained by solving one linear system in the
/// monomial basis. Returns `None` if the spanning set fails to be a basis.
pub fn decompose_linear(f: &WeightedForm) -> Option<Decomposition> {
    let k = f.weight();
    if !k.is_multiple_of(2) {
        return None;
    }
    let monos = monomials_of_weight(k);
    let basis = graded_basis(k);
    let cols: Vec<Vec<Rational>> = basis.iter().map(|(_, b)| coordinates(b, &monos)).collect();
    let x = linalg::solve_unique(&cols, &coordinates(f, &monos))?;
    let mut out = Decomposition::empty(k);
    for ((label, _), c) in basis.into_iter().zip(x) {
        if c.is_zero() {
            continue;
        }
        match label {
            BasisLabel::Modular(i, e) => out.add_modular(i, WeightedForm::monomial(e).scale(&c)),
            BasisLabel::Phi(i) => out.add_phi(i, c),
            BasisLabel::Constant => out.constant += c,
        }
    }
    Some(out)
}

pub fn recompose(d: &Decomposition) -> WeightedForm {
    let mut acc = QmPolynomial::constant(d.constant.clone());
    for (&i, g) in &d.modular_parts {
        acc = acc + g.apply_d_n(i).into_poly();
    }
    for (&i, c) in &d.phi_coeffs {
        acc = acc + d_phi(i).scale(c).into_poly();
    }
    WeightedForm::new(acc, d.weight).expect("recomposed parts share the declared weight")
}

/// `dim M̃_k` as the number of monomials `E2^a E4^b E6^c` of weight `k`.
pub fn quasimodular_dim(k: u32) -> usize {
    monomials_of_weight(k).len()
}

/// `Σ_i dim M_{k-2i} + 1` (the `D^i M_0` terms for `i ≥ 1` vanish); the count
/// predicted by the decomposition.
pub fn decomposition_dim(k: u32) -> usize {
    if !k.is_multiple_of(2) {
        return 0;
    }
    let modular: usize =
        (0..=k / 2).map(|i| k - 2 * i).filter(|&w| w > 0).map(|w| modular_monomials_of_weight(w).len()).sum();
    modular + 1
}

/// Checks `δ(D^j f) = j(k+j-1) D^{j-1} f` for `f ∈ M_k`; for `j = 0`, checks `δ f = 0`.
pub fn uk_action_check(k: u32, f: &WeightedForm, j: u32) -> Result<bool, FormError> {
    f.require_modular()?;
    if f.weight() != k {
        return Err(FormError::Invalid(format!("form has weight {}, expected {k}", f.weight())));
    }
    if j == 0 {
        return Ok(f.apply_delta().is_zero());
    }
    let lhs = f.apply_d_n(j).apply_delta();
    let rhs = f.apply_d_n(j - 1).scale(&rat(j as i64 * (k as i64 + j as i64 - 1)));
    Ok(lhs == rhs)
}

/// Integer matrix `(a b; c d)` of determinant one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl GroupElement {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, FormError> {
        if a * d - b * c != 1 {
            return Err(FormError::Invalid(format!(
                "({a},{b};{c},{d}) has determinant {}, expected 1",
                a * d - b * c
            )));
        }
        Ok(GroupElement { a, b, c, d })
    }

    pub fn identity() -> Self {
        GroupElement { a: 1, b: 0, c: 0, d: 1 }
    }

    pub fn s() -> Self {
        GroupElement { a: 0, b: -1, c: 1, d: 0 }
    }

    pub fn t() -> Self {
        GroupElement { a: 1, b: 1, c: 0, d: 1 }
    }

    pub fn t_inv() -> Self {
        GroupElement { a: 1, b: -1, c: 0, d: 1 }
    }

    pub fn compose(&self, o: &GroupElement) -> GroupElement {
        GroupElement {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// `T, S, TS, S T^{-1} S`: the default sample, with `c ∈ {0, 1, -1}`.
    pub fn default_samples() -> Vec<(String, GroupElement)> {
        let (s, t) = (Self::s(), Self::t());
        vec![
            ("T".into(), t),
            ("S".into(), s),
            ("TS".into(), t.compose(&s)),
            ("ST^-1S".into(), s.compose(&Self::t_inv()).compose(&s)),
        ]
    }

    /// `cz + d`.
    pub fn j_factor(&self, z: Complex64) -> Complex64 {
        z * self.c as f64 + self.d as f64
    }

    pub fn act(&self, z: Complex64) -> Complex64 {
        (z * self.a as f64 + self.b as f64) / self.j_factor(z)
    }
}

pub fn default_sample_points() -> Vec<Complex64> {
    vec![Complex64::new(0.0, 1.1), Complex64::new(0.3, 1.2), Complex64::new(-0.25, 0.9)]
}

/// Numeric values of `E2, E4, E6` at one point, with truncation bounds.
struct GeneratorValues {
    values: [Complex64; 3],
    bounds: [f64; 3],
}

fn generator_values(
    z: Complex64,
    precision: usize,
    opts: &EvalOptions,
) -> Result<GeneratorValues, FormError> {
    let mut values = [Complex64::zero(); 3];
    let mut bounds = [0.0; 3];
    for (i, k) in [2u32, 4, 6].into_iter().enumerate() {
        let series = eisenstein_qexp(k, precision)?;
        // E_k has coefficients O(n^{k-1} log n); exponent k dominates that.
        let o = EvalOptions { growth_exponent: k as f64, ..*opts };
        let ev = series.evaluate(z, &o)?;
        values[i] = ev.value;
        bounds[i] = ev.tail_bound;
    }
    Ok(GeneratorValues { values, bounds })
}

/// Value of the polynomial and a bound on the error propagated from the
/// generator truncation bounds.
fn eval_poly(p: &QmPolynomial, g: &GeneratorValues) -> (Complex64, f64) {
    let mut value = Complex64::zero();
    let mut err = 0.0;
    for (e, c) in p.terms() {
        let c = rational::to_f64(c);
        let mut v = Complex64::new(c, 0.0);
        let mut upper = c.abs();
        let mut exact = c.abs();
        for i in 0..3 {
            v *= g.values[i].powu(e[i]);
            let m = g.values[i].norm();
            upper *= (m + g.bounds[i]).powi(e[i] as i32);
            exact *= m.powi(e[i] as i32);
        }
        value += v;
        err += upper - exact;
    }
    (value, err)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelResidual {
    pub level: usize,
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub rhs_re: f64,
    pub rhs_im: f64,
    pub residual: f64,
}

/// Residuals of the stack transformation law at every level `l`:
/// `(cz+d)^{-k+2l} f_l(γz) = Σ_{j≥l} C(j,l) f_j(z) (c/(cz+d))^{j-l}`.
/// Level 0 is the quasimodular transformation law of `f` itself.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub weight: u32,
    pub gamma: GroupElement,
    pub z_re: f64,
    pub z_im: f64,
    pub levels: Vec<LevelResidual>,
    pub max_residual: f64,
    /// Bound on the error introduced by truncating the q-expansions.
    pub truncation_bound: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckOptions {
    pub precision: usize,
    pub eval: EvalOptions,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { precision: DEFAULT_PRECISION, eval: EvalOptions::default() }
    }
}

pub fn check_functional_equation(
    f: &WeightedForm,
    gamma: &GroupElement,
    z: Complex64,
    tol: f64,
) -> Result<ResidualReport, FormError> {
    check_functional_equation_with(f, gamma, z, tol, &CheckOptions::default())
}

pub fn check_functional_equation_with(
    f: &WeightedForm,
    gamma: &GroupElement,
    z: Complex64,
    tol: f64,
    opts: &CheckOptions,
) -> Result<ResidualReport, FormError> {
    let k = f.weight() as i32;
    let w = gamma.act(z);
    let at_z = generator_values(z, opts.precision, &opts.eval)?;
    let at_w = generator_values(w, opts.precision, &opts.eval)?;
    let stack = to_stack(f);
    // algebraic stack entries carry δ(E2) = 12; analytic ones carry 12/(2πi)
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let mut fz = Vec::new();
    let mut fw = Vec::new();
    let mut bound = 0.0;
    for (j, fj) in stack.coeffs.iter().enumerate() {
        let norm = two_pi_i.powi(-(j as i32));
        let (vz, ez) = eval_poly(fj.poly(), &at_z);
        let (vw, ew) = eval_poly(fj.poly(), &at_w);
        fz.push((vz * norm, ez * norm.norm()));
        fw.push((vw * norm, ew * norm.norm()));
    }
    let jf = gamma.j_factor(z);
    let x = Complex64::new(gamma.c as f64, 0.0) / jf;
    let mut levels = Vec::new();
    let mut max_residual: f64 = 0.0;
    for l in 0..fz.len() {
        let factor = jf.powi(-k + 2 * l as i32);
        let lhs = fw[l].0 * factor;
        bound_add(&mut bound, fw[l].1 * factor.norm());
        let mut rhs = Complex64::zero();
        for (j, (v, e)) in fz.iter().enumerate().skip(l) {
            let b = rational::to_f64(&Rational::from_integer(binomial(j as i64, (j - l) as u64)));
            let t = x.powu((j - l) as u32) * b;
            rhs += v * t;
            bound_add(&mut bound, e * t.norm());
        }
        let residual = (lhs - rhs).norm();
        max_residual = max_residual.max(residual);
        levels.push(LevelResidual {
            level: l,
            lhs_re: lhs.re,
            lhs_im: lhs.im,
            rhs_re: rhs.re,
            rhs_im: rhs.im,
            residual,
        });
    }
    Ok(ResidualReport {
        weight: f.weight(),
        gamma: *gamma,
        z_re: z.re,
        z_im: z.im,
        levels,
        max_residual,
        truncation_bound: bound,
        tol,
        passed: max_residual < tol,
    })
}

fn bound_add(acc: &mut f64, e: f64) {
    *acc = acc.max(e);
}

/// For each even `k` in `2..=k_max`, `dim Ĩ_k - dim (Ĩ²)_k` where `Ĩ` is the
/// ideal of positive-weight elements of `Q[E2, E4, E6]`.
pub fn new_generator_dims_sl2z(k_max: u32) -> Vec<(u32, usize)> {
    let mut out = Vec::new();
    for k in (2..=k_max).step_by(2) {
        let monos = monomials_of_weight(k);
        let mut span = EchelonBasis::new();
        for a in (2..k).step_by(2) {
            if a > k - a {
                break;
            }
            for ea in monomials_of_weight(a) {
                for eb in monomials_of_weight(k - a) {
                    let prod = &WeightedForm::monomial(ea) * &WeightedForm::monomial(eb);
                    span.insert(coordinates(&prod, &monos));
                }
            }
        }
        out.push((k, monos.len() - span.rank()));
    }
    out
}

#[derive(Serialize, Deserialize)]
struct ModularPartJson {
    index: u32,
    form: WeightedForm,
}

#[derive(Serialize)]
struct PhiCoeffOut<'a> {
    index: u32,
    coeff: RationalRef<'a>,
}

#[derive(Deserialize)]
struct PhiCoeffIn {
    index: u32,
    coeff: RationalPair,
}

impl Serialize for Decomposition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            weight: u32,
            modular_parts: Vec<ModularPartJson>,
            phi_coeffs: Vec<PhiCoeffOut<'a>>,
            constant: RationalRef<'a>,
        }
        Out {
            weight: self.weight,
            modular_parts: self
                .modular_parts
                .iter()
                .map(|(&index, form)| ModularPartJson { index, form: form.clone() })
                .collect(),
            phi_coeffs: self
                .phi_coeffs
                .iter()
                .map(|(&index, c)| PhiCoeffOut { index, coeff: RationalRef(c) })
                .collect(),
            constant: RationalRef(&self.constant),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Decomposition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        #[derive(Deserialize)]
        struct In {
            weight: u32,
            modular_parts: Vec<ModularPartJson>,
            phi_coeffs: Vec<PhiCoeffIn>,
            constant: RationalPair,
        }
        let raw = In::deserialize(d)?;
        let mut out = Decomposition::empty(raw.weight);
        for part in raw.modular_parts {
            if part.form.weight() + 2 * part.index != raw.weight {
                return Err(D::Error::custom(format!(
                    "modular part {} has weight {}, expected {}",
                    part.index,
                    part.form.weight(),
                    raw.weight as i64 - 2 * part.index as i64
                )));
            }
            if !part.form.is_modular() {
                return Err(D::Error::custom(format!("modular part {} has positive depth", part.index)));
            }
            out.add_modular(part.index, part.form);
        }
        for c in raw.phi_coeffs {
            if 2 * c.index + 2 != raw.weight {
                return Err(D::Error::custom(format!(
                    "D^{}(phi) has weight {}, expected {}",
                    c.index,
                    2 * c.index + 2,
                    raw.weight
                )));
            }
            out.add_phi(c.index, c.coeff.0);
        }
        if !raw.constant.0.is_zero() && raw.weight != 0 {
            return Err(D::Error::custom("nonzero constant in positive weight"));
        }
        out.constant = raw.constant.0;
        Ok(out)
    }
}
