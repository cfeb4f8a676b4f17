//! Massart label corruption and synthetic data for controlled experiments.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::halfspace::label_of_score;
use crate::vector::{dot_slices, l2_norm};
use crate::{Error, FeatureVector, Label, LabeledExample, Result, SampleSet, UnlabeledSet};

/// Planted concept `f(x) = sign(⟨w*, x⟩)` with ‖w*‖₂ = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetConcept {
    w_star: FeatureVector,
}

impl TargetConcept {
    pub fn new(w_star: FeatureVector) -> Result<Self> {
        let norm = w_star.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("w_star", format!("norm {norm} is not 1")));
        }
        Ok(TargetConcept { w_star })
    }

    /// Normalizes `direction` to unit length.
    pub fn from_direction(direction: FeatureVector) -> Result<Self> {
        if direction.norm() == 0.0 {
            return Err(Error::invalid("w_star", "direction must be non-zero"));
        }
        TargetConcept::new(direction.normalized())
    }

    /// A direction drawn uniformly from the unit sphere in `d` dimensions.
    pub fn random(d: usize, seed: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = nonzero_gaussian(&mut rng, d);
        TargetConcept::from_direction(FeatureVector::from_vec_unchecked(v))
    }

    pub fn w_star(&self) -> &FeatureVector {
        &self.w_star
    }

    pub fn score(&self, x: &FeatureVector) -> Result<f64> {
        crate::dot(&self.w_star, x)
    }

    /// `f(x)`, with sign(0) = +1.
    pub fn label(&self, x: &FeatureVector) -> Result<Label> {
        self.score(x).map(label_of_score)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    /// η(x) = η_max everywhere.
    Constant,
    /// η(x) = η_max · exp(−c · |⟨w*, x⟩|)
    MarginDecay { c: f64 },
}

/// A flip-probability function bounded by η_max < 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    kind: NoiseKind,
    eta_max: f64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, eta_max: f64) -> Result<Self> {
        if !(eta_max.is_finite() && (0.0..0.5).contains(&eta_max)) {
            return Err(Error::invalid(
                "eta_max",
                format!("{eta_max} is outside [0, 0.5)"),
            ));
        }
        if let NoiseKind::MarginDecay { c } = kind {
            if !(c.is_finite() && c >= 0.0) {
                return Err(Error::invalid("decay", "must be finite and non-negative"));
            }
        }
        Ok(NoiseSpec { kind, eta_max })
    }

    pub fn constant(eta_max: f64) -> Result<Self> {
        NoiseSpec::new(NoiseKind::Constant, eta_max)
    }

    pub fn margin_decay(eta_max: f64, c: f64) -> Result<Self> {
        NoiseSpec::new(NoiseKind::MarginDecay { c }, eta_max)
    }

    pub fn noiseless() -> Self {
        NoiseSpec {
            kind: NoiseKind::Constant,
            eta_max: 0.0,
        }
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn eta_max(&self) -> f64 {
        self.eta_max
    }

    /// Flip probability for a point with signed score `⟨w*, x⟩`.
    pub fn eta(&self, score: f64) -> f64 {
        match self.kind {
            NoiseKind::Constant => self.eta_max,
            NoiseKind::MarginDecay { c } => self.eta_max * libm::exp(-c * libm::fabs(score)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputDistribution {
    /// Uniform in the radius-R ball.
    UniformBall,
    /// Standard normal coordinates, rescaled onto the radius-R sphere when outside it.
    GaussianClipped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub d: usize,
    pub n: usize,
    pub radius: f64,
    pub distribution: InputDistribution,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::ZeroDimension);
        }
        if self.n == 0 {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::invalid("radius", "must be positive and finite"));
        }
        Ok(())
    }
}

fn nonzero_gaussian(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        if l2_norm(&v) > 0.0 {
            return v;
        }
    }
}

/// Draws `n` points of dimension `d` with ‖x‖₂ ≤ R.
pub fn sample_inputs(spec: &SyntheticSpec) -> Result<UnlabeledSet> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let r = spec.radius;
    let inv_d = 1.0 / spec.d as f64;
    let points = (0..spec.n)
        .map(|_| {
            let mut v = nonzero_gaussian(&mut rng, spec.d);
            let norm = l2_norm(&v);
            let scale = match spec.distribution {
                InputDistribution::UniformBall => {
                    let u: f64 = rng.random();
                    r * libm::pow(u, inv_d) / norm
                }
                InputDistribution::GaussianClipped if norm > r => r / norm,
                InputDistribution::GaussianClipped => 1.0,
            };
            for c in v.iter_mut() {
                *c *= scale;
            }
            // rounding can leave a rescaled point a hair past R
            while l2_norm(&v) > r {
                for c in v.iter_mut() {
                    *c *= 1.0 - f64::EPSILON;
                }
            }
            FeatureVector::from_vec_unchecked(v)
        })
        .collect();
    Ok(UnlabeledSet::from_vectors_unchecked(spec.d, points))
}

/// Labels each point with `f(x)`, flipped independently with probability η(x).
pub fn massart_corrupt(
    f: &TargetConcept,
    xs: &UnlabeledSet,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<SampleSet> {
    let d = f.w_star.dim();
    if !xs.is_empty() && xs.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: xs.dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items = xs
        .iter()
        .map(|x| {
            let score = dot_slices(f.w_star.as_slice(), x.as_slice());
            let clean = label_of_score(score);
            // one draw per point keeps the stream aligned across noise settings
            let u: f64 = rng.random();
            let y = if u < noise.eta(score) {
                clean.flipped()
            } else {
                clean
            };
            LabeledExample::new(x.clone(), y)
        })
        .collect();
    Ok(SampleSet::from_examples_unchecked(d, items))
}

/// Fraction of `s` whose label disagrees with `f`.
pub fn flip_fraction(f: &TargetConcept, s: &SampleSet) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::Empty("sample set"));
    }
    let mut flipped = 0usize;
    for e in s {
        if f.label(&e.x)? != e.y {
            flipped += 1;
        }
    }
    Ok(flipped as f64 / s.len() as f64)
}

/// A labeled/unlabeled partition of a sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiSupervisedSplit {
    pub labeled: SampleSet,
    pub unlabeled: UnlabeledSet,
    /// True labels of `unlabeled`, index for index. Evaluation only.
    pub hidden_labels: SampleSet,
}

/// Keeps the labels of a uniformly random ℓ-subset of `s` and hides the rest.
pub fn make_semisup_split(s: &SampleSet, ell: usize, seed: u64) -> Result<SemiSupervisedSplit> {
    if ell > s.len() {
        return Err(Error::InsufficientData(format!(
            "cannot label {ell} of {} examples",
            s.len()
        )));
    }
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let items = s.as_slice();
    let labeled = order[..ell].iter().map(|&i| items[i].clone()).collect();
    let hidden: Vec<LabeledExample> = order[ell..].iter().map(|&i| items[i].clone()).collect();
    let unlabeled = hidden.iter().map(|e| e.x.clone()).collect();
    Ok(SemiSupervisedSplit {
        labeled: SampleSet::from_examples_unchecked(s.dim(), labeled),
        unlabeled: UnlabeledSet::from_vectors_unchecked(s.dim(), unlabeled),
        hidden_labels: SampleSet::from_examples_unchecked(s.dim(), hidden),
    })
}
