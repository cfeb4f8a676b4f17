//! Command-line surface: `synth`, `train`, `predict`, `bench`, `inspect`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use selftrain_core::eval::TrialSpec;
use selftrain_core::noise::{
    flip_fraction, make_semisup_split, massart_corrupt, sample_inputs, InputDistribution, NoiseSpec,
    SyntheticSpec, TargetConcept,
};
use selftrain_core::optim::{SgdConfig, StepBudget};
use selftrain_core::selftrain::{self_train, SelfTrainConfig};
use selftrain_core::{list_predict_with_position, mix_seed, SampleSet};

use crate::{bench, io, trace};

#[derive(Debug, Parser)]
#[command(
    name = "selftrain",
    version,
    about = "Self-training with thresholded halfspaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a synthetic dataset from a planted halfspace through a Massart noise oracle.
    Synth(SynthArgs),
    /// Split a dataset into labeled/unlabeled parts and run self-training.
    Train(TrainArgs),
    /// Predict labels with a saved halfspace list.
    Predict(PredictArgs),
    /// Repeated-trial comparison of the supervised halfspace (LTF) and the self-trained list (L_m).
    Bench(BenchArgs),
    /// Pretty-print a training trace.
    Inspect(InspectArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dist {
    UniformBall,
    GaussianClipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Noise {
    Constant,
    MarginDecay,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, value_enum, default_value_t = Dist::UniformBall)]
    pub dist: Dist,
    #[arg(long, value_enum, default_value_t = Noise::Constant)]
    pub noise: Noise,
    /// Flip probability (constant) or its maximum (margin-decay); must be below 0.5.
    #[arg(long, default_value_t = 0.0)]
    pub eta_max: f64,
    /// Decay rate c of η(x) = η_max·exp(−c·|⟨w*,x⟩|); margin-decay only.
    #[arg(long)]
    pub decay_c: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// svmlight file, or CSV (label in the last column) when the extension is .csv.
    #[arg(long)]
    pub data: PathBuf,
    /// Scale every row to unit L2 norm after reading.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args)]
pub struct TrainingArgs {
    /// Number of threshold tests.
    #[arg(long, default_value_t = 5)]
    pub p: usize,
    /// SGD steps per round; defaults to 100 per training example, capped at 200000.
    #[arg(long)]
    pub sgd_steps: Option<usize>,
}

impl TrainingArgs {
    fn config(&self, seed: u64) -> SelfTrainConfig {
        SelfTrainConfig {
            p: self.p,
            sgd: SgdConfig {
                steps: self.sgd_steps.map_or(StepBudget::Auto, StepBudget::Fixed),
                ..SgdConfig::default()
            },
            seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Number of labeled examples ℓ; the rest of the dataset is used unlabeled.
    #[arg(long)]
    pub labeled: usize,
    #[command(flatten)]
    pub training: TrainingArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub model_out: PathBuf,
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 10)]
    pub labeled: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.7)]
    pub train_frac: f64,
    #[command(flatten)]
    pub training: TrainingArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub trace: PathBuf,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Synth(a) => synth(&a),
        Command::Train(a) => train(&a),
        Command::Predict(a) => predict(&a),
        Command::Bench(a) => run_bench(&a),
        Command::Inspect(a) => inspect(&a),
    }
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn load(data: &DataArgs, dim: Option<usize>) -> anyhow::Result<SampleSet> {
    let s = io::read_dataset(&data.data, dim).with_context(|| format!("reading {}", data.data.display()))?;
    Ok(if data.normalize { s.l2_normalized() } else { s })
}

pub fn synth(a: &SynthArgs) -> anyhow::Result<()> {
    let noise = match (a.noise, a.decay_c) {
        (Noise::Constant, Some(_)) => bail!("--decay-c only applies to --noise margin-decay"),
        (Noise::Constant, None) => NoiseSpec::constant(a.eta_max)?,
        (Noise::MarginDecay, Some(c)) => NoiseSpec::margin_decay(a.eta_max, c)?,
        (Noise::MarginDecay, None) => bail!("--noise margin-decay requires --decay-c"),
    };
    let spec = SyntheticSpec {
        d: a.d,
        n: a.n,
        radius: a.radius,
        distribution: match a.dist {
            Dist::UniformBall => InputDistribution::UniformBall,
            Dist::GaussianClipped => InputDistribution::GaussianClipped,
        },
        seed: mix_seed(a.seed, 1),
    };
    let concept = TargetConcept::random(a.d, mix_seed(a.seed, 0))?;
    let xs = sample_inputs(&spec)?;
    let samples = massart_corrupt(&concept, &xs, &noise, mix_seed(a.seed, 2))?;
    io::write_svmlight(&a.out, &samples)?;

    let w: Vec<String> = concept
        .w_star()
        .as_slice()
        .iter()
        .map(|c| format!("{c:.6}"))
        .collect();
    eprintln!("planted w* = [{}]", w.join(", "));
    eprintln!("flip fraction = {:.6}", flip_fraction(&concept, &samples)?);
    Ok(())
}

pub fn train(a: &TrainArgs) -> anyhow::Result<()> {
    if a.labeled == 0 {
        bail!("--labeled must be at least 1");
    }
    let data = load(&a.data, None)?;
    if a.labeled > data.len() {
        bail!(
            "--labeled {} exceeds the {} rows in {}",
            a.labeled,
            data.len(),
            a.data.data.display()
        );
    }
    let split = make_semisup_split(&data, a.labeled, mix_seed(a.seed, 0))?;
    let cfg = a.training.config(mix_seed(a.seed, 1));
    let (list, tr) = self_train(&split.labeled, &split.unlabeled, &cfg)?;

    write_file(&a.model_out, &io::format_model(&list))?;
    if let Some(path) = &a.trace_out {
        write_file(path, &trace::format_trace(&tr))?;
    }
    eprintln!(
        "{} rounds, {} halfspaces, {} of {} unlabeled pseudo-labeled, residual |S| = {}",
        tr.total_rounds(),
        list.len(),
        split.unlabeled.len() - tr.residual_unlabeled,
        split.unlabeled.len(),
        tr.residual_labeled
    );
    Ok(())
}

pub fn predict(a: &PredictArgs) -> anyhow::Result<()> {
    let list = io::read_model(&a.model).with_context(|| format!("reading {}", a.model.display()))?;
    let d = list.dim();
    let data = match io::DataFormat::from_path(&a.data.data) {
        io::DataFormat::Svmlight => {
            // sparse rows may omit trailing coordinates, so only a larger inferred d is a mismatch
            let inferred = load(&a.data, None)?;
            if inferred.dim() > d {
                bail!(
                    "dimension mismatch: model has d={d}, data has d={}",
                    inferred.dim()
                );
            }
            load(&a.data, Some(d))?
        }
        io::DataFormat::Csv => {
            let s = load(&a.data, None)?;
            if !s.is_empty() && s.dim() != d {
                bail!("dimension mismatch: model has d={d}, data has d={}", s.dim());
            }
            s
        }
    };

    let mut out = String::new();
    for ex in &data {
        let (y, pos) = list_predict_with_position(&list, &ex.x)?;
        writeln!(out, "{y}\t{pos}").unwrap();
    }
    match &a.out {
        Some(path) => write_file(path, &out)?,
        None => std::io::stdout().lock().write_all(out.as_bytes())?,
    }
    Ok(())
}

pub fn run_bench(a: &BenchArgs) -> anyhow::Result<()> {
    let spec = TrialSpec {
        ell: a.labeled,
        trials: a.trials,
        train_fraction: a.train_frac,
        base_seed: a.seed,
        selftrain: a.training.config(0),
    };
    spec.validate()?;
    let data = load(&a.data, None)?;
    let report = bench::run_benchmark_parallel(&data, &spec)?;
    if let Some(path) = &a.report_out {
        write_file(path, &bench::format_report(&report, &spec))?;
    }
    print!("{}", bench::render_summary(&report));
    Ok(())
}

pub fn inspect(a: &InspectArgs) -> anyhow::Result<()> {
    let text = fs::read_to_string(&a.trace).with_context(|| format!("reading {}", a.trace.display()))?;
    let rows = trace::parse_trace(&text).with_context(|| format!("parsing {}", a.trace.display()))?;
    print!("{}", trace::render_trace(&rows));
    Ok(())
}
