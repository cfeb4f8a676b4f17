//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any failed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use selftrain::bench::run_benchmark_parallel;
use selftrain::io::read_dataset;
use selftrain_core::eval::{run_trial, TrialSpec};
use selftrain_core::noise::{
    flip_fraction, massart_corrupt, sample_inputs, InputDistribution, NoiseSpec, SyntheticSpec, TargetConcept,
};
use selftrain_core::optim::{projected_sgd, subgradient, SgdConfig, StepBudget};
use selftrain_core::selftrain::{candidate_ranks, select_threshold, self_train, SelfTrainConfig};
use selftrain_core::{
    mix_seed, perceptron_loss, FeatureVector, Halfspace, Label, LabeledExample, SampleSet, UnlabeledSet,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coords(r: &mut ChaCha8Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d).map(|_| r.random_range(-scale..=scale)).collect()
}

fn unit_ball_point(r: &mut ChaCha8Rng, d: usize) -> FeatureVector {
    let mut v = coords(r, d, 1.0);
    let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if n > 1.0 {
        v.iter_mut().for_each(|c| *c /= n);
    }
    FeatureVector::new(v).unwrap()
}

fn random_label(r: &mut ChaCha8Rng) -> Label {
    if r.random_bool(0.5) {
        Label::Positive
    } else {
        Label::Negative
    }
}

fn random_samples(r: &mut ChaCha8Rng, d: usize, n: usize, scale: f64) -> SampleSet {
    let items = (0..n)
        .map(|_| LabeledExample::new(FeatureVector::new(coords(r, d, scale)).unwrap(), random_label(r)))
        .collect();
    SampleSet::from_examples(d, items).unwrap()
}

fn plain_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (p, q) in a.iter().zip(b) {
        s += p * q;
    }
    s
}

fn loss_error_identity() -> Outcome {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let d = r.random_range(1..=20);
        let n = r.random_range(1..=100);
        let w = unit_ball_point(&mut r, d);
        let s = random_samples(&mut r, d, n, 3.0);
        let mut loss = 0.0;
        let mut weighted = 0.0;
        for e in &s {
            loss += perceptron_loss(e.y, &w, &e.x).unwrap();
            let score = plain_dot(w.as_slice(), e.x.as_slice());
            let predicted = if score >= 0.0 { 1.0 } else { -1.0 };
            if predicted != e.y.as_f64() {
                weighted += score.abs();
            }
        }
        loss /= n as f64;
        weighted /= n as f64;
        let scale = loss.abs().max(weighted.abs());
        let rel = if scale == 0.0 {
            0.0
        } else {
            (loss - weighted).abs() / scale
        };
        worst = worst.max(rel);
    }
    if worst <= 1e-12 {
        Ok(format!("max relative difference {worst:.2e} over 1000 pairs"))
    } else {
        Err(format!("max relative difference {worst:.2e} exceeds 1e-12"))
    }
}

fn norm_invariants() -> Outcome {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for i in 0..100 {
        let d = r.random_range(1..=12);
        let ell = r.random_range(1..=30);
        let u = r.random_range(0..=120);
        let scale = [0.5, 1.0, 5.0, 40.0][i % 4];
        let labeled = random_samples(&mut r, d, ell, scale);
        let pool = random_samples(&mut r, d, u, scale).features();
        let cfg = SelfTrainConfig {
            p: r.random_range(1..=8),
            seed: r.random(),
            ..SelfTrainConfig::default()
        };
        let ltf = projected_sgd(&labeled, &cfg.round_sgd(0)).unwrap();
        worst = worst.max(ltf.halfspace.weights().norm());
        let (list, _) = self_train(&labeled, &pool, &cfg).unwrap();
        for pair in list.pairs() {
            worst = worst.max(pair.halfspace.weights().norm());
        }
        worst = worst.max(list.fallback().weights().norm());
        checked += list.len() + 2;
    }
    if worst <= 1.0 + 1e-9 {
        Ok(format!(
            "max ‖w‖ = {worst:.12} over {checked} vectors from 100 runs"
        ))
    } else {
        Err(format!("‖w‖ = {worst:.12} exceeds 1 + 1e-9"))
    }
}

/// Independent minimizer: f64 error rates, explicit index tie-break, set-based ranks.
fn brute_force_threshold(s: &SampleSet, w: &FeatureVector, p: usize) -> (usize, f64) {
    let n = s.len();
    let mut rows: Vec<(f64, usize, bool)> = s
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let score = plain_dot(w.as_slice(), e.x.as_slice());
            let predicted = if score >= 0.0 { 1.0 } else { -1.0 };
            (score.abs(), i, predicted != e.y.as_f64())
        })
        .collect();
    rows.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let omega = std::cmp::max(1, n / p);
    let ranks: std::collections::BTreeSet<usize> = (1..=p).map(|k| std::cmp::min(k * omega, n)).collect();
    let mut best_rank = 0;
    let mut best_err = f64::INFINITY;
    for &t in &ranks {
        let wrong = rows[..t].iter().filter(|row| row.2).count();
        let err = wrong as f64 / t as f64;
        if err < best_err {
            best_err = err;
            best_rank = t;
        }
    }
    (best_rank, rows[best_rank - 1].0)
}

fn threshold_oracle() -> Outcome {
    let mut r = rng(3);
    for case in 0..2000 {
        let d = r.random_range(1..=6);
        let n = r.random_range(1..=50);
        let p = r.random_range(1..=10);
        // coarse grids produce many tied margins
        let grid = [0.0, 1.0, 4.0, 1e6][case % 4];
        let items = (0..n)
            .map(|_| {
                let mut x = coords(&mut r, d, 2.0);
                if grid > 0.0 {
                    x.iter_mut().for_each(|c| *c = (*c * grid).round() / grid);
                }
                LabeledExample::new(FeatureVector::new(x).unwrap(), random_label(&mut r))
            })
            .collect();
        let s = SampleSet::from_examples(d, items).unwrap();
        let w = if case % 7 == 0 {
            FeatureVector::zeros(d).unwrap()
        } else {
            unit_ball_point(&mut r, d)
        };
        let h = Halfspace::new(w.clone()).unwrap();
        let got = select_threshold(&s, &h, p).unwrap();
        let (rank, gamma) = brute_force_threshold(&s, &w, p);
        if got.rank != rank || got.gamma.to_bits() != gamma.to_bits() {
            return Err(format!(
                "case {case}: library (rank {}, γ {}) vs oracle (rank {rank}, γ {gamma}); candidates {:?}",
                got.rank,
                got.gamma,
                candidate_ranks(n, p)
            ));
        }
    }
    Ok("2000 instances agree on rank and γ".into())
}

fn termination_conservation() -> Outcome {
    let mut r = rng(4);
    let mut rounds = 0usize;
    for case in 0..1000 {
        let d = r.random_range(1..=8);
        let ell = r.random_range(1..=25);
        let u = if case % 4 == 3 { 0 } else { r.random_range(0..=60) };
        let (labeled, pool) = match case % 4 {
            // all margins equal
            1 => {
                let x = FeatureVector::new(coords(&mut r, d, 2.0)).unwrap();
                let items = (0..ell)
                    .map(|_| LabeledExample::new(x.clone(), random_label(&mut r)))
                    .collect();
                let pool = UnlabeledSet::from_vectors(d, vec![x.clone(); u]).unwrap();
                (SampleSet::from_examples(d, items).unwrap(), pool)
            }
            // every margin is zero, so γ = 0
            2 => {
                let x = FeatureVector::zeros(d).unwrap();
                let items = (0..ell)
                    .map(|_| LabeledExample::new(x.clone(), random_label(&mut r)))
                    .collect();
                let pool = UnlabeledSet::from_vectors(d, vec![x.clone(); u]).unwrap();
                (SampleSet::from_examples(d, items).unwrap(), pool)
            }
            _ => (
                random_samples(&mut r, d, ell, 3.0),
                random_samples(&mut r, d, u, 3.0).features(),
            ),
        };
        let steps = if case % 5 == 0 {
            StepBudget::Auto
        } else {
            StepBudget::Fixed(r.random_range(1..=400))
        };
        let cfg = SelfTrainConfig {
            p: r.random_range(1..=8),
            sgd: SgdConfig {
                steps,
                ..SgdConfig::default()
            },
            seed: r.random(),
        };
        let (_, trace) = self_train(&labeled, &pool, &cfg).unwrap();
        let total = ell + u;
        let mut pruned = 0;
        for rec in &trace.rounds {
            if rec.labeled_size + rec.unlabeled_size + pruned != total {
                return Err(format!("case {case} round {}: conservation broken", rec.round));
            }
            if rec.pseudo_labeled > 0 && rec.appended {
                return Err(format!(
                    "case {case} round {}: pseudo-labeled and appended",
                    rec.round
                ));
            }
            pruned += rec.pruned;
        }
        if trace.residual_labeled + trace.residual_unlabeled + pruned != total {
            return Err(format!("case {case}: final counts do not add up to ℓ + u"));
        }
        if trace.total_rounds() > total + 1 {
            return Err(format!(
                "case {case}: {} rounds for {total} points",
                trace.total_rounds()
            ));
        }
        rounds += trace.total_rounds();
    }
    Ok(format!(
        "1000 runs halted ({rounds} rounds), counts conserved every round"
    ))
}

fn subgradient_correctness() -> Outcome {
    let mut r = rng(5);
    let mut worst_gap = 0.0f64;
    for _ in 0..1000 {
        let d = r.random_range(1..=20);
        let w = unit_ball_point(&mut r, d);
        let w2 = unit_ball_point(&mut r, d);
        let ex = LabeledExample::new(
            FeatureVector::new(coords(&mut r, d, 3.0)).unwrap(),
            random_label(&mut r),
        );
        let g = subgradient(&w, &ex).unwrap();
        let lhs = perceptron_loss(ex.y, &w2, &ex.x).unwrap();
        let diff: Vec<f64> = w2
            .as_slice()
            .iter()
            .zip(w.as_slice())
            .map(|(a, b)| a - b)
            .collect();
        let rhs = perceptron_loss(ex.y, &w, &ex.x).unwrap() + plain_dot(g.as_slice(), &diff);
        worst_gap = worst_gap.max(rhs - lhs);
    }
    if worst_gap > 1e-9 {
        return Err(format!("first-order inequality violated by {worst_gap:.2e}"));
    }

    let h = 1e-6;
    let mut worst_fd = 0.0f64;
    let mut active = 0usize;
    while active < 1000 {
        let d = r.random_range(1..=20);
        let w = unit_ball_point(&mut r, d);
        let ex = LabeledExample::new(
            FeatureVector::new(coords(&mut r, d, 3.0)).unwrap(),
            random_label(&mut r),
        );
        let signed = ex.y.as_f64() * plain_dot(w.as_slice(), ex.x.as_slice());
        // strictly active: stays on one linear piece within the stencil
        if signed.abs() < 1e-3 {
            continue;
        }
        active += 1;
        let g = subgradient(&w, &ex).unwrap();
        for j in 0..d {
            let mut up = w.as_slice().to_vec();
            let mut down = up.clone();
            up[j] += h;
            down[j] -= h;
            let fd = (perceptron_loss(ex.y, &FeatureVector::new(up).unwrap(), &ex.x).unwrap()
                - perceptron_loss(ex.y, &FeatureVector::new(down).unwrap(), &ex.x).unwrap())
                / (2.0 * h);
            worst_fd = worst_fd.max((fd - g.as_slice()[j]).abs());
        }
    }
    if worst_fd <= 1e-5 {
        Ok(format!(
            "first-order gap ≤ {worst_gap:.2e}; finite-difference error ≤ {worst_fd:.2e} on 1000 points"
        ))
    } else {
        Err(format!("finite-difference error {worst_fd:.2e} exceeds 1e-5"))
    }
}

fn no_degradation() -> Outcome {
    let noise = NoiseSpec::constant(0.2).unwrap();
    let outcomes: Vec<(f64, f64)> = (0..50u64)
        .into_par_iter()
        .map(|i| {
            let seed = mix_seed(0x5eed, i);
            let concept = TargetConcept::random(10, mix_seed(seed, 0)).unwrap();
            let xs = sample_inputs(&SyntheticSpec {
                d: 10,
                n: 3000,
                radius: 1.0,
                distribution: InputDistribution::UniformBall,
                seed: mix_seed(seed, 1),
            })
            .unwrap();
            let full = massart_corrupt(&concept, &xs, &noise, mix_seed(seed, 2)).unwrap();
            let spec = TrialSpec {
                ell: 20,
                trials: 1,
                train_fraction: 2.0 / 3.0,
                base_seed: mix_seed(seed, 3),
                selftrain: SelfTrainConfig::default(),
            };
            let out = run_trial(&full, &spec, 0).unwrap();
            (out.ltf, out.lm)
        })
        .collect();
    let ltf = outcomes.iter().map(|o| o.0).sum::<f64>() / 50.0;
    let lm = outcomes.iter().map(|o| o.1).sum::<f64>() / 50.0;
    let detail = format!(
        "mean L_m {:.4} vs LTF {:.4} over 50 trials (need L_m ≥ LTF − 0.005)",
        lm, ltf
    );
    if lm >= ltf - 0.005 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn banknote() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/banknote.csv");
    let data = read_dataset(&path, None).map_err(|e| e.to_string())?;
    if data.len() != 1372 || data.dim() != 4 {
        return Err(format!("unexpected banknote shape {}×{}", data.len(), data.dim()));
    }
    let run = |ell: usize| {
        let spec = TrialSpec {
            ell,
            trials: 20,
            // 919 train / 453 test
            train_fraction: 919.0 / 1372.0,
            base_seed: 0,
            selftrain: SelfTrainConfig::default(),
        };
        run_benchmark_parallel(&data, &spec).unwrap()
    };
    let small = run(10);
    let large = run(100);
    let (lm10, ltf10) = (100.0 * small.lm.mean, 100.0 * small.ltf.mean);
    let (lm100, ltf100) = (100.0 * large.lm.mean, 100.0 * large.ltf.mean);
    let checks = [
        (
            (lm10 - 77.24).abs() <= 8.0,
            format!("ℓ=10 L_m {lm10:.2} within 77.24±8"),
        ),
        (lm10 > ltf10, format!("ℓ=10 L_m {lm10:.2} > LTF {ltf10:.2}")),
        (
            (lm100 - 90.82).abs() <= 6.0,
            format!("ℓ=100 L_m {lm100:.2} within 90.82±6"),
        ),
        (
            lm100 >= ltf100 - 1.0,
            format!("ℓ=100 L_m {lm100:.2} ≥ LTF {ltf100:.2} − 1"),
        ),
    ];
    let detail = checks
        .iter()
        .map(|(ok, text)| format!("{text} [{}]", if *ok { "ok" } else { "miss" }))
        .collect::<Vec<_>>()
        .join("; ");
    if checks.iter().all(|c| c.0) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn massart_statistics() -> Outcome {
    let xs = sample_inputs(&SyntheticSpec {
        d: 10,
        n: 10_000,
        radius: 1.0,
        distribution: InputDistribution::UniformBall,
        seed: 8,
    })
    .unwrap();
    let f = TargetConcept::random(10, 9).unwrap();
    let noisy = flip_fraction(
        &f,
        &massart_corrupt(&f, &xs, &NoiseSpec::constant(0.3).unwrap(), 10).unwrap(),
    )
    .unwrap();
    let clean = flip_fraction(
        &f,
        &massart_corrupt(&f, &xs, &NoiseSpec::noiseless(), 10).unwrap(),
    )
    .unwrap();
    let detail = format!("η=0.3 flip fraction {noisy:.4}; η=0 flip fraction {clean}");
    if (0.285..=0.315).contains(&noisy) && clean == 0.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cli_run(dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_selftrain"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "`{}` failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    let mut bytes = out.stdout;
    bytes.extend_from_slice(&out.stderr);
    Ok(bytes)
}

fn determinism() -> Outcome {
    let script: [&[&str]; 6] = [
        &[
            "synth",
            "--d",
            "6",
            "--n",
            "600",
            "--noise",
            "margin-decay",
            "--eta-max",
            "0.3",
            "--decay-c",
            "2",
            "--seed",
            "7",
            "--out",
            "data.svm",
        ],
        &[
            "train",
            "--data",
            "data.svm",
            "--labeled",
            "50",
            "--seed",
            "3",
            "--model-out",
            "model.txt",
            "--trace-out",
            "trace.tsv",
        ],
        &[
            "predict",
            "--model",
            "model.txt",
            "--data",
            "data.svm",
            "--out",
            "pred.tsv",
        ],
        &["predict", "--model", "model.txt", "--data", "data.svm"],
        &[
            "bench",
            "--data",
            "data.svm",
            "--labeled",
            "10",
            "--trials",
            "6",
            "--seed",
            "4",
            "--report-out",
            "report.tsv",
        ],
        &["inspect", "--trace", "trace.tsv"],
    ];
    let files = ["data.svm", "model.txt", "trace.tsv", "pred.tsv", "report.tsv"];
    let dirs: Vec<tempfile::TempDir> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    let mut streams: Vec<Vec<Vec<u8>>> = vec![Vec::new(), Vec::new()];
    for (k, dir) in dirs.iter().enumerate() {
        for args in script {
            streams[k].push(cli_run(dir.path(), args)?);
        }
    }
    for (i, args) in script.iter().enumerate() {
        if streams[0][i] != streams[1][i] {
            return Err(format!("console output of `{}` differs between runs", args[0]));
        }
    }
    let read =
        |dir: &tempfile::TempDir, name: &str| std::fs::read(PathBuf::from(dir.path()).join(name)).unwrap();
    for name in files {
        if read(&dirs[0], name) != read(&dirs[1], name) {
            return Err(format!("{name} differs between runs"));
        }
    }
    Ok(format!(
        "{} commands, {} output files byte-identical across two runs",
        script.len(),
        files.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("loss/error identity", loss_error_identity),
        ("projection and norm invariants", norm_invariants),
        ("threshold-selection oracle equivalence", threshold_oracle),
        ("termination and conservation", termination_conservation),
        ("subgradient correctness", subgradient_correctness),
        (
            "no degradation vs. supervised baseline (synthetic Massart)",
            no_degradation,
        ),
        ("banknote reproduction", banknote),
        ("Massart oracle statistics", massart_statistics),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {}. {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {}. {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
