//! Hilbert series of graded rings of modular forms and of their differential
//! closures, generator counts, and growth fits.

use serde::{Deserialize, Serialize};

use crate::error::GrowthError;

/// A graded ring of modular forms described by its generator weights, either
/// free (polynomial ring on the generators) or through an explicit dimension
/// table `dim M_k` indexed by `k / 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedRingSpec {
    pub generator_weights: Vec<u32>,
    pub cocompact: bool,
    #[serde(default)]
    pub dimension_table: Option<Vec<u64>>,
}

impl GradedRingSpec {
    pub fn free(generator_weights: Vec<u32>, cocompact: bool) -> Result<Self, GrowthError> {
        let spec = GradedRingSpec { generator_weights, cocompact, dimension_table: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_table(
        generator_weights: Vec<u32>,
        cocompact: bool,
        table: Vec<u64>,
    ) -> Result<Self, GrowthError> {
        let spec = GradedRingSpec { generator_weights, cocompact, dimension_table: Some(table) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), GrowthError> {
        if let Some(w) = self.generator_weights.iter().find(|&&w| w == 0 || w % 2 != 0) {
            return Err(GrowthError::InvalidSpec(format!("generator weight {w} is not positive and even")));
        }
        if let Some(t) = &self.dimension_table {
            if t.first() != Some(&1) {
                return Err(GrowthError::InvalidSpec("dimension table must have dim M_0 = 1".into()));
            }
        }
        Ok(())
    }

    /// `ε`, the number of generators.
    pub fn epsilon(&self) -> usize {
        self.generator_weights.len()
    }
}

/// Dimensions of the even-weight graded pieces; `dims[i]` is the dimension in
/// weight `2i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertSeries {
    pub dims: Vec<u64>,
}

impl HilbertSeries {
    /// Dimension in weight `k`; zero for odd `k` and beyond the computed range.
    pub fn dim(&self, k: u32) -> u64 {
        if !k.is_multiple_of(2) {
            return 0;
        }
        self.dims.get((k / 2) as usize).copied().unwrap_or(0)
    }

    pub fn k_max(&self) -> u32 {
        2 * (self.dims.len() as u32).saturating_sub(1)
    }
}

fn require_even(k_max: u32) -> Result<(), GrowthError> {
    if !k_max.is_multiple_of(2) {
        return Err(GrowthError::InvalidSpec(format!("k_max = {k_max} is odd")));
    }
    Ok(())
}

/// `dim M_k` for even `k ≤ k_max`: coefficients of `∏ 1/(1 - t^{w_i})`, or the
/// supplied table.
pub fn hilbert_modular(spec: &GradedRingSpec, k_max: u32) -> Result<HilbertSeries, GrowthError> {
    spec.validate()?;
    require_even(k_max)?;
    let n = (k_max / 2) as usize + 1;
    if let Some(t) = &spec.dimension_table {
        if t.len() < n {
            return Err(GrowthError::InvalidSpec(format!(
                "dimension table covers weights up to {}, need {k_max}",
                2 * (t.len() - 1)
            )));
        }
        return Ok(HilbertSeries { dims: t[..n].to_vec() });
    }
    let mut dims = vec![0u64; n];
    dims[0] = 1;
    for &w in &spec.generator_weights {
        let step = (w / 2) as usize;
        for i in step..n {
            dims[i] += dims[i - step];
        }
    }
    Ok(HilbertSeries { dims })
}

/// `dim CL_k = Σ_{j ≥ 0} dim M_{k-2j}` with `D^j M_0 = 0` for `j ≥ 1`, plus
/// one for the `D^{k/2-1} φ` line in every weight `k ≥ 2` of a non-cocompact model.
pub fn hilbert_closure(spec: &GradedRingSpec, k_max: u32) -> Result<HilbertSeries, GrowthError> {
    let m = hilbert_modular(spec, k_max)?;
    let mut dims = Vec::with_capacity(m.dims.len());
    let mut running = 0u64; // Σ_{1 ≤ i ≤ k/2} dim M_{2i}
    for (i, &d) in m.dims.iter().enumerate() {
        if i == 0 {
            dims.push(1);
            continue;
        }
        running += d;
        dims.push(running + u64::from(!spec.cocompact));
    }
    Ok(HilbertSeries { dims })
}

/// `#{i : w_i ≤ k}`: the new generators `D^{(k-w_i)/2}(A_i)` needed in weight
/// `k` by the differential closure of a free model.
pub fn new_generator_count(spec: &GradedRingSpec, k: u32) -> Result<usize, GrowthError> {
    spec.validate()?;
    if spec.dimension_table.is_some() {
        return Err(GrowthError::UnsupportedModel(
            "generator counts need a free model; rings with relations are handled by exact \
             linear algebra in the concrete SL(2,Z) model (structure::new_generator_dims_sl2z)"
                .into(),
        ));
    }
    if !k.is_multiple_of(2) {
        return Ok(0);
    }
    Ok(spec.generator_weights.iter().filter(|&&w| w <= k).count())
}

/// `dim M̃_2 = dim M_2 + (0 if cocompact else 1)`.
pub fn dichotomy_dim2(spec: &GradedRingSpec) -> Result<u64, GrowthError> {
    let m = hilbert_modular(spec, 2)?;
    Ok(m.dim(2) + u64::from(!spec.cocompact))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthTarget {
    Modular,
    Closure,
}

/// Least-squares fit `dim ≈ a k² + b k + c` over even `2 ≤ k ≤ k_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    pub target: GrowthTarget,
    pub k_max: u32,
    pub quadratic: f64,
    pub linear: f64,
    pub constant: f64,
    /// `dims[k_max] / k_max²`.
    pub ratio_at_k_max: f64,
}

pub fn growth_fit(spec: &GradedRingSpec, k_max: u32, target: GrowthTarget) -> Result<GrowthFit, GrowthError> {
    if k_max < 4 {
        return Err(GrowthError::InvalidSpec("growth fit needs k_max ≥ 4".into()));
    }
    let series = match target {
        GrowthTarget::Modular => hilbert_modular(spec, k_max)?,
        GrowthTarget::Closure => hilbert_closure(spec, k_max)?,
    };
    // fit in the scaled variable s = k / k_max for conditioning
    let scale = k_max as f64;
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for (i, &d) in series.dims.iter().enumerate().skip(1) {
        let s = (2 * i) as f64 / scale;
        let row = [s * s, s, 1.0];
        for r in 0..3 {
            for c in 0..3 {
                ata[r][c] += row[r] * row[c];
            }
            atb[r] += row[r] * d as f64;
        }
    }
    let [a, b, c] = solve3(ata, atb);
    Ok(GrowthFit {
        target,
        k_max,
        quadratic: a / (scale * scale),
        linear: b / scale,
        constant: c,
        ratio_at_k_max: series.dim(k_max) as f64 / (scale * scale),
    })
}

fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let p = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        m.swap(col, p);
        v.swap(col, p);
        for r in col + 1..3 {
            let f = m[r][col] / m[col][col];
            for c in col..3 {
                m[r][c] -= f * m[col][c];
            }
            v[r] -= f * v[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| m[r][c] * x[c]).sum();
        x[r] = (v[r] - s) / m[r][r];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free(w: &[u32], cocompact: bool) -> GradedRingSpec {
        GradedRingSpec::free(w.to_vec(), cocompact).unwrap()
    }

    /// Direct count of `w · n = k` solutions.
    fn brute_count(weights: &[u32], k: u32) -> u64 {
        match weights.split_first() {
            None => u64::from(k == 0),
            Some((&w, rest)) => (0..=k / w).map(|n| brute_count(rest, k - n * w)).sum(),
        }
    }

    #[test]
    fn modular_examples() {
        let h = hilbert_modular(&free(&[4, 6], true), 60).unwrap();
        assert_eq!(h.dim(12), 2);
        assert_eq!(h.dim(0), 1);
        assert_eq!(h.dim(2), 0);
        assert_eq!(hilbert_modular(&free(&[2], true), 10).unwrap().dim(10), 1);
        for k in (0..=60).step_by(2) {
            assert_eq!(h.dim(k), brute_count(&[4, 6], k));
        }
    }

    #[test]
    fn closure_examples() {
        assert_eq!(hilbert_closure(&free(&[4, 6], true), 12).unwrap().dim(12), 6);
        assert_eq!(hilbert_closure(&free(&[4, 6], false), 12).unwrap().dim(12), 7);
        assert_eq!(hilbert_closure(&free(&[4, 6], false), 12).unwrap().dim(0), 1);
    }

    #[test]
    fn closure_of_the_sl2z_model_counts_monomials_in_three_generators() {
        let h = hilbert_closure(&free(&[4, 6], false), 80).unwrap();
        for k in (0..=80).step_by(2) {
            assert_eq!(h.dim(k), brute_count(&[2, 4, 6], k), "k = {k}");
        }
    }

    #[test]
    fn generator_counts() {
        let s = free(&[4, 6], true);
        assert_eq!(new_generator_count(&s, 4), Ok(1));
        assert_eq!(new_generator_count(&s, 2), Ok(0));
        for k in (6..=60).step_by(2) {
            assert_eq!(new_generator_count(&s, k), Ok(2));
        }
        assert_eq!(new_generator_count(&free(&[], true), 10), Ok(0));
        let rel = GradedRingSpec::with_table(vec![4, 6], true, vec![1, 0, 1]).unwrap();
        assert!(matches!(new_generator_count(&rel, 4), Err(GrowthError::UnsupportedModel(_))));
    }

    #[test]
    fn dichotomy() {
        assert_eq!(dichotomy_dim2(&free(&[4, 6], true)), Ok(0));
        assert_eq!(dichotomy_dim2(&free(&[4, 6], false)), Ok(1));
        assert_eq!(dichotomy_dim2(&free(&[2, 4], true)), Ok(1));
    }

    #[test]
    fn invalid_specs() {
        assert!(GradedRingSpec::free(vec![3], true).is_err());
        assert!(GradedRingSpec::free(vec![0], true).is_err());
        assert!(GradedRingSpec::with_table(vec![], true, vec![2]).is_err());
        assert!(hilbert_modular(&free(&[4], true), 5).is_err());
    }

    #[test]
    fn growth_fits() {
        // three generators of weights 2, 4, 6: dim_k = round((k/2 + 3)^2 / 12) for even k
        let f = growth_fit(&free(&[2, 4, 6], false), 400, GrowthTarget::Modular).unwrap();
        assert_eq!(hilbert_modular(&free(&[2, 4, 6], false), 400).unwrap().dim(400), 3434);
        assert!((f.ratio_at_k_max - 1.0 / 48.0).abs() < 0.05 / 48.0, "{f:?}");
        assert!((f.quadratic - 1.0 / 48.0).abs() < 1e-3, "{f:?}");

        let f = growth_fit(&free(&[2], true), 200, GrowthTarget::Closure).unwrap();
        assert!(f.quadratic.abs() < 1e-9 && (f.linear - 0.5).abs() < 1e-9, "{f:?}");

        let f = growth_fit(&free(&[4, 6], true), 200, GrowthTarget::Closure).unwrap();
        assert!(f.quadratic > 1e-3, "{f:?}");
    }
}
