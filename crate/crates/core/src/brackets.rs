//! First Rankin–Cohen bracket and the Serre derivative `∂ = D - φE`.

use serde::Serialize;

use crate::error::FormError;
use crate::qm::{QmPolynomial, WeightedForm};
use crate::rational::rat;

/// `[f, g] = k·f·D(g) - l·g·D(f)` for `f ∈ M_k`, `g ∈ M_l`.
pub fn rc1(f: &WeightedForm, g: &WeightedForm) -> Result<WeightedForm, FormError> {
    f.require_modular()?;
    g.require_modular()?;
    let out = &(f * &g.apply_d()).scale(&rat(f.weight() as i64))
        - &(g * &f.apply_d()).scale(&rat(g.weight() as i64));
    debug_assert!(out.is_modular());
    Ok(out)
}

/// `D(f) - k·(E2/12)·f`, of weight `k + 2`.
pub fn serre_derivative(f: &WeightedForm) -> WeightedForm {
    let k = rat(f.weight() as i64);
    &f.apply_d() - &(&WeightedForm::phi() * f).scale(&k)
}

/// `H(f)·∂(g) - H(g)·∂(f)` with `H` multiplication by the weight.
fn trivialized_bracket(f: &WeightedForm, g: &WeightedForm) -> WeightedForm {
    &(&f.apply_h() * &serre_derivative(g)) - &(&g.apply_h() * &serre_derivative(f))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BracketReport {
    pub left: QmPolynomial,
    pub right: QmPolynomial,
    pub equal: bool,
}

/// Compares `rc1(f, g)` with its expression through `∂`, in which `D` is
/// replaced by a derivation preserving modularity.
pub fn check_trivialization(f: &WeightedForm, g: &WeightedForm) -> Result<BracketReport, FormError> {
    let left = rc1(f, g)?.into_poly();
    let right = trivialized_bracket(f, g).into_poly();
    let equal = (&left - &right).is_zero();
    Ok(BracketReport { left, right, equal })
}

/// Cyclic sum `[[f,g],h] + [[g,h],f] + [[h,f],g]` vanishes.
pub fn jacobi_check(f: &WeightedForm, g: &WeightedForm, h: &WeightedForm) -> Result<bool, FormError> {
    let a = rc1(&rc1(f, g)?, h)?;
    let b = rc1(&rc1(g, h)?, f)?;
    let c = rc1(&rc1(h, f)?, g)?;
    Ok((&(&a + &b) + &c).is_zero())
}

/// `ω = D(φ) - φ²`, which is modular of weight 4.
pub fn phi_omega() -> WeightedForm {
    let phi = WeightedForm::phi();
    let w = &phi.apply_d() - &(&phi * &phi);
    assert_eq!(w.weight(), 4);
    assert_eq!(w.depth(), Ok(0), "D(φ) - φ² must be modular");
    w
}
