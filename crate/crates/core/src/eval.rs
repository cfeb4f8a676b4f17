//! Repeated-trial evaluation: train/test splitting, supervised baseline vs.
//! self-trained list, aggregation and a Wilcoxon rank-sum comparison.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::noise::make_semisup_split;
use crate::optim::projected_sgd;
use crate::selftrain::{self_train, SelfTrainConfig};
use crate::{list_predict, mix_seed, sign_predict, Error, FeatureVector, Label, Result, SampleSet};

/// Two-sided 0.01 critical value of the standard normal.
pub const Z_CRITICAL_0_01: f64 = 2.576;

pub const DEFAULT_TRIALS: usize = 20;
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSpec {
    pub ell: usize,
    pub trials: usize,
    pub train_fraction: f64,
    pub base_seed: u64,
    /// Its `seed` is replaced per trial.
    pub selftrain: SelfTrainConfig,
}

impl Default for TrialSpec {
    fn default() -> Self {
        TrialSpec {
            ell: 10,
            trials: DEFAULT_TRIALS,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            base_seed: 0,
            selftrain: SelfTrainConfig::default(),
        }
    }
}

impl TrialSpec {
    pub fn validate(&self) -> Result<()> {
        if self.ell == 0 {
            return Err(Error::invalid("ell", "must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::invalid(
                "train_fraction",
                "must lie strictly between 0 and 1",
            ));
        }
        self.selftrain.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Supervised halfspace fitted on the labeled examples only.
    Ltf,
    /// Self-trained halfspace list.
    Lm,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ltf => "LTF",
            Method::Lm => "L_m",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodResult {
    pub method: Method,
    pub per_trial_accuracy: Vec<f64>,
    pub mean: f64,
    /// Population (divide-by-n) standard deviation.
    pub std: f64,
}

impl MethodResult {
    pub fn from_accuracies(method: Method, per_trial_accuracy: Vec<f64>) -> Result<Self> {
        if per_trial_accuracy.is_empty() {
            return Err(Error::Empty("accuracy list"));
        }
        let (mean, std) = mean_and_population_std(&per_trial_accuracy);
        Ok(MethodResult {
            method,
            per_trial_accuracy,
            mean,
            std,
        })
    }
}

pub(crate) fn mean_and_population_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, libm::sqrt(var))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSumResult {
    /// Mann–Whitney U of the first sample.
    pub u_statistic: f64,
    /// Positive when the first sample tends to be larger.
    pub z_score: f64,
    pub significant_at_0_01: bool,
}

/// Test accuracies of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub ltf: f64,
    pub lm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub ltf: MethodResult,
    pub lm: MethodResult,
    /// L_m accuracies (first sample) against LTF accuracies.
    pub rank_sum: RankSumResult,
}

impl BenchmarkReport {
    /// Aggregates outcomes listed in trial-index order.
    pub fn from_outcomes(outcomes: &[TrialOutcome]) -> Result<Self> {
        let ltf: Vec<f64> = outcomes.iter().map(|o| o.ltf).collect();
        let lm: Vec<f64> = outcomes.iter().map(|o| o.lm).collect();
        let rank_sum = if outcomes.len() >= MIN_RANK_SUM_SAMPLE {
            wilcoxon_rank_sum(&lm, &ltf)?
        } else {
            // too few trials for the normal approximation
            RankSumResult {
                u_statistic: f64::NAN,
                z_score: f64::NAN,
                significant_at_0_01: false,
            }
        };
        Ok(BenchmarkReport {
            ltf: MethodResult::from_accuracies(Method::Ltf, ltf)?,
            lm: MethodResult::from_accuracies(Method::Lm, lm)?,
            rank_sum,
        })
    }
}

/// Fraction of `test` on which `predict` returns the true label.
pub fn accuracy<F>(predict: F, test: &SampleSet) -> Result<f64>
where
    F: Fn(&FeatureVector) -> Result<Label>,
{
    if test.is_empty() {
        return Err(Error::Empty("test set"));
    }
    let mut correct = 0usize;
    for e in test {
        if predict(&e.x)? == e.y {
            correct += 1;
        }
    }
    Ok(correct as f64 / test.len() as f64)
}

/// Seed of trial `trial_index`; depends on nothing else.
pub fn trial_seed(base_seed: u64, trial_index: usize) -> u64 {
    mix_seed(base_seed, trial_index as u64)
}

/// Shuffles `full` and returns `(train, test)` with `round(fraction·n)`
/// training examples.
pub fn train_test_split(full: &SampleSet, fraction: f64, seed: u64) -> Result<(SampleSet, SampleSet)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(
            "train_fraction",
            "must lie strictly between 0 and 1",
        ));
    }
    let n = full.len();
    let n_train = libm::round(fraction * n as f64) as usize;
    if n_train == 0 || n_train >= n {
        return Err(Error::InsufficientData(format!(
            "{n} examples leave an empty train or test split at fraction {fraction}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let items = full.as_slice();
    let pick = |idx: &[usize]| {
        SampleSet::from_examples_unchecked(full.dim(), idx.iter().map(|&i| items[i].clone()).collect())
    };
    Ok((pick(&order[..n_train]), pick(&order[n_train..])))
}

/// One trial: split 70/30 (or as configured), draw ℓ labeled training
/// examples, fit LTF on them alone and L_m on labeled + unlabeled, and score
/// both on the test split.
///
/// The LTF fit uses the same seed as round 0 of self-training, so it is
/// exactly the first halfspace the self-training loop computes.
pub fn run_trial(full: &SampleSet, spec: &TrialSpec, trial_index: usize) -> Result<TrialOutcome> {
    spec.validate()?;
    let seed = trial_seed(spec.base_seed, trial_index);
    let (train, test) = train_test_split(full, spec.train_fraction, mix_seed(seed, 0))?;
    if train.len() < spec.ell {
        return Err(Error::InsufficientData(format!(
            "training split has {} examples, fewer than ell = {}",
            train.len(),
            spec.ell
        )));
    }
    let split = make_semisup_split(&train, spec.ell, mix_seed(seed, 1))?;
    let cfg = SelfTrainConfig {
        seed: mix_seed(seed, 2),
        ..spec.selftrain
    };

    let ltf = projected_sgd(&split.labeled, &cfg.round_sgd(0))?.halfspace;
    let (list, _) = self_train(&split.labeled, &split.unlabeled, &cfg)?;

    Ok(TrialOutcome {
        ltf: accuracy(|x| sign_predict(&ltf, x), &test)?,
        lm: accuracy(|x| list_predict(&list, x), &test)?,
    })
}

/// Runs trials `0..spec.trials` in order and aggregates them.
pub fn run_benchmark(full: &SampleSet, spec: &TrialSpec) -> Result<BenchmarkReport> {
    spec.validate()?;
    let outcomes = (0..spec.trials)
        .map(|i| run_trial(full, spec, i))
        .collect::<Result<Vec<_>>>()?;
    BenchmarkReport::from_outcomes(&outcomes)
}

/// Smallest per-group size accepted by [`wilcoxon_rank_sum`].
pub const MIN_RANK_SUM_SAMPLE: usize = 5;

/// Two-sided Wilcoxon rank-sum test, normal approximation with tie-corrected
/// variance and no continuity correction.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<RankSumResult> {
    if a.len() < MIN_RANK_SUM_SAMPLE || b.len() < MIN_RANK_SUM_SAMPLE {
        return Err(Error::InsufficientData(format!(
            "rank-sum needs at least {MIN_RANK_SUM_SAMPLE} values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if let Some(v) = a.iter().chain(b).find(|v| !v.is_finite()) {
        return Err(Error::invalid("sample", format!("non-finite value {v}")));
    }

    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|p, q| p.0.total_cmp(&q.0));

    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        // positions i+1 ..= j share the average rank
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        let in_a = pooled[i..j].iter().filter(|p| p.1).count();
        rank_sum_a += avg_rank * in_a as f64;
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }

    let (naf, nbf, nf) = (na as f64, nb as f64, n as f64);
    let u = rank_sum_a - naf * (naf + 1.0) / 2.0;
    let mean = naf * nbf / 2.0;
    let var = naf * nbf / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    let z = if var > 0.0 {
        (u - mean) / libm::sqrt(var)
    } else {
        0.0
    };
    Ok(RankSumResult {
        u_statistic: u,
        z_score: z,
        significant_at_0_01: libm::fabs(z) > Z_CRITICAL_0_01,
    })
}
