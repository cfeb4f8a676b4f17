use alloc::vec::Vec;

use crate::vector::dot_slices;
use crate::{Error, FeatureVector, Label, Result, SampleSet};

/// Slack on the unit-ball constraint ‖w‖₂ ≤ 1.
pub(crate) const NORM_SLACK: f64 = 1e-9;

/// A centered halfspace `x ↦ sign(⟨w, x⟩)` with ‖w‖₂ ≤ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    w: FeatureVector,
}

impl Halfspace {
    pub fn new(w: FeatureVector) -> Result<Self> {
        let norm = w.norm();
        if norm > 1.0 + NORM_SLACK {
            return Err(Error::OutsideUnitBall { norm });
        }
        Ok(Halfspace { w })
    }

    pub(crate) fn from_projected(w: FeatureVector) -> Self {
        debug_assert!(w.norm() <= 1.0 + NORM_SLACK);
        Halfspace { w }
    }

    #[inline]
    pub fn weights(&self) -> &FeatureVector {
        &self.w
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.w.dim()
    }

    pub fn into_weights(self) -> FeatureVector {
        self.w
    }

    #[inline]
    pub(crate) fn raw_score(&self, x: &[f64]) -> f64 {
        dot_slices(self.w.as_slice(), x)
    }
}

/// A halfspace trusted only where |⟨w, x⟩| ≥ γ.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdedHalfspace {
    pub halfspace: Halfspace,
    gamma: f64,
}

impl ThresholdedHalfspace {
    pub fn new(halfspace: Halfspace, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::invalid("gamma", "must be finite and non-negative"));
        }
        Ok(ThresholdedHalfspace { halfspace, gamma })
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    #[inline]
    pub(crate) fn covers(&self, x: &[f64]) -> bool {
        libm::fabs(self.halfspace.raw_score(x)) >= self.gamma
    }
}

/// The ordered cascade `[(w⁽¹⁾, γ⁽¹⁾), …, (w⁽ᵐ⁾, γ⁽ᵐ⁾)]`, m ≥ 1.
///
/// The fallback classifier is always the first pair's halfspace.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfspaceList {
    pairs: Vec<ThresholdedHalfspace>,
}

impl HalfspaceList {
    pub fn new(pairs: Vec<ThresholdedHalfspace>) -> Result<Self> {
        let first = pairs.first().ok_or(Error::Empty("halfspace list"))?;
        let dim = first.halfspace.dim();
        for p in &pairs {
            p.halfspace.weights().check_dim(dim)?;
        }
        Ok(HalfspaceList { pairs })
    }

    pub fn pairs(&self) -> &[ThresholdedHalfspace] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.pairs[0].halfspace.dim()
    }

    pub fn fallback(&self) -> &Halfspace {
        &self.pairs[0].halfspace
    }
}

/// |⟨w, x⟩|
pub fn unsigned_margin(w: &FeatureVector, x: &FeatureVector) -> Result<f64> {
    crate::dot(w, x).map(libm::fabs)
}

#[inline]
pub(crate) fn label_of_score(score: f64) -> Label {
    // sign(0) is taken as +1
    if score < 0.0 {
        Label::Negative
    } else {
        Label::Positive
    }
}

pub fn sign_predict(h: &Halfspace, x: &FeatureVector) -> Result<Label> {
    x.check_dim(h.dim())?;
    Ok(label_of_score(h.raw_score(x.as_slice())))
}

/// `-y⟨w,x⟩ · 1[y⟨w,x⟩ ≤ 0]`
pub fn perceptron_loss(y: Label, w: &FeatureVector, x: &FeatureVector) -> Result<f64> {
    let signed = y.as_f64() * crate::dot(w, x)?;
    Ok(if signed < 0.0 { -signed } else { 0.0 })
}

/// Fraction of `s` misclassified by `h`.
pub fn zero_one_error(h: &Halfspace, s: &SampleSet) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::Empty("sample set"));
    }
    if s.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: s.dim(),
        });
    }
    let wrong = s
        .iter()
        .filter(|e| label_of_score(h.raw_score(e.x.as_slice())) != e.y)
        .count();
    Ok(wrong as f64 / s.len() as f64)
}

pub fn list_predict(list: &HalfspaceList, x: &FeatureVector) -> Result<Label> {
    list_predict_with_position(list, x).map(|(y, _)| y)
}

/// Like [`list_predict`], also reporting which pair fired: `1..=m` for a
/// list position, `0` for the fallback.
pub fn list_predict_with_position(list: &HalfspaceList, x: &FeatureVector) -> Result<(Label, usize)> {
    x.check_dim(list.dim())?;
    let x = x.as_slice();
    for (i, pair) in list.pairs.iter().enumerate() {
        let score = pair.halfspace.raw_score(x);
        if libm::fabs(score) >= pair.gamma {
            return Ok((label_of_score(score), i + 1));
        }
    }
    Ok((label_of_score(list.fallback().raw_score(x)), 0))
}
