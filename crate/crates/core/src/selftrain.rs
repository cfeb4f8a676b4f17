//! The self-training loop: threshold selection, pseudo-labeling, pruning,
//! and assembly of the halfspace list.

use alloc::vec::Vec;

use crate::halfspace::label_of_score;
use crate::optim::{projected_sgd, SgdConfig};
use crate::{
    mix_seed, Error, Halfspace, HalfspaceList, LabeledExample, Result, SampleSet, ThresholdedHalfspace,
    UnlabeledSet,
};

/// Number of threshold tests used when none is given.
pub const DEFAULT_THRESHOLD_TESTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfTrainConfig {
    /// Number of candidate ranks tried by [`select_threshold`].
    pub p: usize,
    /// Per-round SGD settings. The `seed` field is ignored: round `k` uses
    /// [`round_seed`]`(seed, k)`.
    pub sgd: SgdConfig,
    pub seed: u64,
}

impl Default for SelfTrainConfig {
    fn default() -> Self {
        SelfTrainConfig {
            p: DEFAULT_THRESHOLD_TESTS,
            sgd: SgdConfig::default(),
            seed: 0,
        }
    }
}

impl SelfTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::invalid("p", "must be at least 1"));
        }
        self.sgd.validate()
    }

    /// SGD configuration for round `k`.
    pub fn round_sgd(&self, k: usize) -> SgdConfig {
        self.sgd.with_seed(round_seed(self.seed, k))
    }
}

/// Seed of the SGD run in round `k`. Round 0 fits on the labeled set alone,
/// so a supervised baseline trained with this seed reproduces it exactly.
pub fn round_seed(seed: u64, k: usize) -> u64 {
    mix_seed(seed, k as u64)
}

/// Outcome of [`select_threshold`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdChoice {
    pub gamma: f64,
    /// 1-based position in the descending-margin order.
    pub rank: usize,
}

/// Candidate ranks `[ω, 2ω, …, pω]` for a set of `n` samples, with
/// `ω = max(1, ⌊n/p⌋)`, clipped to `n` and deduplicated.
pub fn candidate_ranks(n: usize, p: usize) -> Vec<usize> {
    let omega = (n / p.max(1)).max(1);
    let mut ranks: Vec<usize> = (1..=p).map(|i| (i * omega).min(n)).collect();
    ranks.dedup();
    ranks
}

/// Picks the margin threshold for `h` on `s`.
///
/// Samples are ordered by decreasing unsigned margin (stable, so ties keep
/// insertion order). For each candidate rank `i` the misclassification rate
/// over the top-`i` samples is computed; the smallest rate wins, ties going
/// to the smallest rank. γ is the margin of the sample at the winning rank.
pub fn select_threshold(s: &SampleSet, h: &Halfspace, p: usize) -> Result<ThresholdChoice> {
    if s.is_empty() {
        return Err(Error::Empty("sample set"));
    }
    if p == 0 {
        return Err(Error::invalid("p", "must be at least 1"));
    }
    if s.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: s.dim(),
        });
    }

    let scored: Vec<(f64, bool)> = s
        .iter()
        .map(|e| {
            let score = h.raw_score(e.x.as_slice());
            (libm::fabs(score), label_of_score(score) != e.y)
        })
        .collect();
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_by(|&a, &b| scored[b].0.total_cmp(&scored[a].0));

    // wrong_prefix[i] = mistakes among the top-i samples
    let mut wrong_prefix = Vec::with_capacity(order.len() + 1);
    wrong_prefix.push(0u64);
    let mut acc = 0u64;
    for &i in &order {
        acc += u64::from(scored[i].1);
        wrong_prefix.push(acc);
    }

    let mut best: Option<(usize, u64)> = None;
    for rank in candidate_ranks(s.len(), p) {
        let wrong = wrong_prefix[rank];
        // wrong/rank < best_wrong/best_rank, compared exactly
        let better = match best {
            None => true,
            Some((br, bw)) => wrong * (br as u64) < bw * (rank as u64),
        };
        if better {
            best = Some((rank, wrong));
        }
    }
    let (rank, _) = best.expect("at least one candidate rank");
    Ok(ThresholdChoice {
        gamma: scored[order[rank - 1]].0,
        rank,
    })
}

/// Splits `u` into points that clear the threshold (labeled by the
/// halfspace) and the rest. Order is preserved within both parts.
pub fn pseudo_label(u: &UnlabeledSet, th: &ThresholdedHalfspace) -> Result<(SampleSet, UnlabeledSet)> {
    let dim = th.halfspace.dim();
    if !u.is_empty() && u.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: u.dim(),
        });
    }
    let mut labeled = Vec::new();
    let mut remaining = Vec::new();
    for x in u {
        let score = th.halfspace.raw_score(x.as_slice());
        if libm::fabs(score) >= th.gamma() {
            labeled.push(LabeledExample::new(x.clone(), label_of_score(score)));
        } else {
            remaining.push(x.clone());
        }
    }
    Ok((
        SampleSet::from_examples_unchecked(dim, labeled),
        UnlabeledSet::from_vectors_unchecked(dim, remaining),
    ))
}

/// Keeps exactly the members of `s` whose unsigned margin is strictly below γ.
pub fn prune(s: &SampleSet, th: &ThresholdedHalfspace) -> Result<SampleSet> {
    let dim = th.halfspace.dim();
    if !s.is_empty() && s.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: s.dim(),
        });
    }
    let kept = s.iter().filter(|e| !th.covers(e.x.as_slice())).cloned().collect();
    Ok(SampleSet::from_examples_unchecked(dim, kept))
}

/// One iteration of the training loop. Sizes are taken at the start of the
/// round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    pub labeled_size: usize,
    pub unlabeled_size: usize,
    pub gamma: f64,
    pub rank: usize,
    pub pseudo_labeled: usize,
    pub pruned: usize,
    pub appended: bool,
    /// Set on an append round whose prune removed nothing; the loop stops.
    pub forced_stop: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainTrace {
    pub rounds: Vec<RoundRecord>,
    /// |S| after the last round (the unaccounted residual).
    pub residual_labeled: usize,
    /// Unlabeled points never pseudo-labeled.
    pub residual_unlabeled: usize,
}

impl TrainTrace {
    pub fn total_rounds(&self) -> usize {
        self.rounds.len()
    }

    /// Number of pairs appended to the list.
    pub fn appended_rounds(&self) -> usize {
        self.rounds.iter().filter(|r| r.appended).count()
    }
}

/// Runs self-training on `labeled` (ℓ examples) and `unlabeled`.
///
/// While |S| ≥ ℓ: fit `w` on S by projected SGD (fresh start, per-round
/// seed), select γ, and pseudo-label every unlabeled point with margin ≥ γ.
/// If none qualifies, append `(w, γ)` to the list and drop from S every
/// member with margin ≥ γ. The first appended halfspace doubles as the
/// fallback classifier.
pub fn self_train(
    labeled: &SampleSet,
    unlabeled: &UnlabeledSet,
    cfg: &SelfTrainConfig,
) -> Result<(HalfspaceList, TrainTrace)> {
    cfg.validate()?;
    if labeled.is_empty() {
        return Err(Error::Empty("labeled set"));
    }
    let dim = labeled.dim();
    if !unlabeled.is_empty() && unlabeled.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: unlabeled.dim(),
        });
    }

    let ell = labeled.len();
    let mut active = labeled.clone();
    let mut pool = unlabeled.clone();
    let mut pairs: Vec<ThresholdedHalfspace> = Vec::new();
    let mut trace = TrainTrace::default();
    let mut k = 0usize;

    while active.len() >= ell {
        let fit = projected_sgd(&active, &cfg.round_sgd(k))?;
        let choice = select_threshold(&active, &fit.halfspace, cfg.p)?;
        let th = ThresholdedHalfspace::new(fit.halfspace, choice.gamma)?;

        let mut record = RoundRecord {
            round: k,
            labeled_size: active.len(),
            unlabeled_size: pool.len(),
            gamma: choice.gamma,
            rank: choice.rank,
            pseudo_labeled: 0,
            pruned: 0,
            appended: false,
            forced_stop: false,
        };

        let (newly_labeled, remaining) = pseudo_label(&pool, &th)?;
        if !newly_labeled.is_empty() {
            record.pseudo_labeled = newly_labeled.len();
            active.extend_from(newly_labeled)?;
            pool = remaining;
        } else {
            let kept = prune(&active, &th)?;
            record.pruned = active.len() - kept.len();
            record.appended = true;
            record.forced_stop = record.pruned == 0;
            pairs.push(th);
            active = kept;
        }

        let stop = record.forced_stop;
        trace.rounds.push(record);
        k += 1;
        if stop {
            break;
        }
    }

    trace.residual_labeled = active.len();
    trace.residual_unlabeled = pool.len();
    Ok((HalfspaceList::new(pairs)?, trace))
}
