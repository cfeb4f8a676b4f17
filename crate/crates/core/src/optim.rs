//! Projected stochastic subgradient descent on the empirical perceptron risk
//! over the unit ball.
//!
//! Each step draws one example uniformly with replacement, moves against its
//! perceptron-loss subgradient with step `1 / (M √t)`, and projects back onto
//! `‖w‖₂ ≤ 1`. The returned hypothesis is the average of the projected
//! iterates `w⁽¹⁾ … w⁽ᵀ⁾`, starting from `w⁽⁰⁾ = 0`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::vector::{dot_slices, l2_norm};
use crate::{Error, FeatureVector, Halfspace, LabeledExample, Result, SampleSet};

/// Step count used when `StepBudget::Auto` is requested: 100 steps per example.
pub const AUTO_STEPS_PER_EXAMPLE: usize = 100;
/// Upper bound on the automatic step count.
pub const AUTO_STEPS_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepBudget {
    /// `min(100·|S|, 200 000)`
    Auto,
    Fixed(usize),
}

impl StepBudget {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            StepBudget::Auto => n.saturating_mul(AUTO_STEPS_PER_EXAMPLE).clamp(1, AUTO_STEPS_CAP),
            StepBudget::Fixed(t) => t,
        }
    }
}

/// Bound `M` on subgradient norms, used in the step size `1 / (M √t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradientBound {
    /// `max ‖x‖₂` over the training set (1 if every point is zero).
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgdConfig {
    pub steps: StepBudget,
    pub gradient_bound: GradientBound,
    pub seed: u64,
    /// Target accuracy. Informational; the step budget is what bounds the run.
    pub epsilon: f64,
}

impl Default for SgdConfig {
    fn default() -> Self {
        SgdConfig {
            steps: StepBudget::Auto,
            gradient_bound: GradientBound::Auto,
            seed: 0,
            epsilon: 0.01,
        }
    }
}

impl SgdConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        SgdConfig { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == StepBudget::Fixed(0) {
            return Err(Error::invalid("steps", "must be at least 1"));
        }
        if let GradientBound::Fixed(m) = self.gradient_bound {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::invalid("gradient_bound", "must be positive and finite"));
            }
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::invalid("epsilon", "must be positive and finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgdResult {
    /// The averaged iterate w̄.
    pub halfspace: Halfspace,
    /// R̂_S(w̄)
    pub final_empirical_risk: f64,
    pub steps_run: usize,
}

/// Subgradient of the perceptron loss at `w`: `-y·x` when `y⟨w,x⟩ ≤ 0`, else 0.
pub fn subgradient(w: &FeatureVector, ex: &LabeledExample) -> Result<FeatureVector> {
    ex.x.check_dim(w.dim())?;
    let y = ex.y.as_f64();
    let g = if y * dot_slices(w.as_slice(), ex.x.as_slice()) <= 0.0 {
        ex.x.as_slice().iter().map(|c| -y * c).collect()
    } else {
        vec![0.0; w.dim()]
    };
    Ok(FeatureVector::from_vec_unchecked(g))
}

/// Euclidean projection onto the closed unit ball.
pub fn project_unit_ball(v: Vec<f64>) -> Result<FeatureVector> {
    let mut v = FeatureVector::new(v)?.into_vec();
    project_in_place(&mut v);
    Ok(FeatureVector::from_vec_unchecked(v))
}

#[inline]
pub(crate) fn project_in_place(v: &mut [f64]) {
    let norm = l2_norm(v);
    if norm > 1.0 {
        for c in v.iter_mut() {
            *c /= norm;
        }
    }
}

/// Mean perceptron loss of `w` over `s`.
pub fn empirical_risk(s: &SampleSet, w: &FeatureVector) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::Empty("sample set"));
    }
    if s.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            found: s.dim(),
        });
    }
    let total: f64 = s
        .iter()
        .map(|e| {
            let signed = e.y.as_f64() * dot_slices(w.as_slice(), e.x.as_slice());
            if signed < 0.0 {
                -signed
            } else {
                0.0
            }
        })
        .sum();
    Ok(total / s.len() as f64)
}

pub fn projected_sgd(s: &SampleSet, cfg: &SgdConfig) -> Result<SgdResult> {
    cfg.validate()?;
    if s.is_empty() {
        return Err(Error::Empty("sample set"));
    }
    let n = s.len();
    let d = s.dim();
    let steps = cfg.steps.resolve(n);
    let m = match cfg.gradient_bound {
        GradientBound::Fixed(m) => m,
        GradientBound::Auto => {
            let r = s.radius();
            if r > 0.0 {
                r
            } else {
                1.0
            }
        }
    };

    let examples = s.as_slice();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut w = vec![0.0; d];
    let mut sum = vec![0.0; d];
    for t in 1..=steps {
        let ex = &examples[rng.random_range(0..n)];
        let x = ex.x.as_slice();
        let y = ex.y.as_f64();
        if y * dot_slices(&w, x) <= 0.0 {
            // w − α·g with g = −y·x
            let alpha = 1.0 / (m * libm::sqrt(t as f64));
            for (wi, xi) in w.iter_mut().zip(x) {
                *wi += alpha * y * xi;
            }
            project_in_place(&mut w);
        }
        for (si, wi) in sum.iter_mut().zip(&w) {
            *si += wi;
        }
    }

    let inv = 1.0 / steps as f64;
    for si in sum.iter_mut() {
        *si *= inv;
    }
    project_in_place(&mut sum);
    let w_bar = FeatureVector::from_vec_unchecked(sum);
    let final_empirical_risk = empirical_risk(s, &w_bar)?;
    Ok(SgdResult {
        halfspace: Halfspace::from_projected(w_bar),
        final_empirical_risk,
        steps_run: steps,
    })
}
