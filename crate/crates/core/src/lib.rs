//! Self-training with thresholded halfspaces.
//!
//! The crate learns an ordered list of `(w, γ)` pairs from a small labeled
//! set and a pool of unlabeled points. Each round fits a centered halfspace
//! with projected stochastic subgradient descent on the perceptron loss,
//! picks a margin threshold from a window of candidate ranks, and then either
//! pseudo-labels the unlabeled points that clear the threshold or, when none
//! do, appends the pair to the list and retires the training points it
//! covers. Prediction walks the list and answers with the first halfspace
//! whose threshold the point clears, falling back to the first halfspace.
//!
//! Everything here is `no_std` (with `alloc`) and free of IO. File formats,
//! the command line and parallel benchmarking live in the `selftrain` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod halfspace;
mod sample;
mod seed;
mod vector;

pub mod eval;
pub mod noise;
pub mod optim;
pub mod selftrain;

pub use error::{Error, Result};
pub use halfspace::{
    list_predict, list_predict_with_position, perceptron_loss, sign_predict, unsigned_margin, zero_one_error,
    Halfspace, HalfspaceList, ThresholdedHalfspace,
};
pub use sample::{Label, LabeledExample, SampleSet, UnlabeledSet};
pub use seed::mix_seed;
pub use vector::{dot, FeatureVector};

pub mod prelude {
    pub use crate::eval::{
        accuracy, run_benchmark, run_trial, wilcoxon_rank_sum, BenchmarkReport, Method, MethodResult,
        RankSumResult, TrialOutcome, TrialSpec,
    };
    pub use crate::noise::{
        make_semisup_split, massart_corrupt, sample_inputs, InputDistribution, NoiseKind, NoiseSpec,
        SemiSupervisedSplit, SyntheticSpec, TargetConcept,
    };
    pub use crate::optim::{projected_sgd, GradientBound, SgdConfig, SgdResult, StepBudget};
    pub use crate::selftrain::{self_train, RoundRecord, SelfTrainConfig, TrainTrace};
    pub use crate::{
        dot, list_predict, sign_predict, unsigned_margin, Error, FeatureVector, Halfspace, HalfspaceList,
        Label, LabeledExample, SampleSet, ThresholdedHalfspace, UnlabeledSet,
    };
}
