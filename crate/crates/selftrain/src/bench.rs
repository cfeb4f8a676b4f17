//! Trial-parallel benchmarking and the tab-separated report.

use std::fmt::Write as _;

use rayon::prelude::*;
use selftrain_core::eval::{run_trial, BenchmarkReport, TrialOutcome, TrialSpec, Z_CRITICAL_0_01};
use selftrain_core::SampleSet;

use crate::Result;

/// Same result as `selftrain_core::eval::run_benchmark`, with trials spread
/// over the rayon pool. Outcomes are collected in trial-index order.
pub fn run_benchmark_parallel(full: &SampleSet, spec: &TrialSpec) -> Result<BenchmarkReport> {
    spec.validate()?;
    let outcomes = (0..spec.trials)
        .into_par_iter()
        .map(|i| run_trial(full, spec, i))
        .collect::<Result<Vec<TrialOutcome>, _>>()?;
    Ok(BenchmarkReport::from_outcomes(&outcomes)?)
}

pub fn format_report(report: &BenchmarkReport, spec: &TrialSpec) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "# ell={} trials={} train_fraction={} seed={} p={}",
        spec.ell, spec.trials, spec.train_fraction, spec.base_seed, spec.selftrain.p
    )
    .unwrap();
    writeln!(
        out,
        "# std: population (divide by n); rank-sum: two-sided normal approximation, tie-corrected, L_m vs LTF, significant when |z| > {Z_CRITICAL_0_01}"
    )
    .unwrap();
    out.push_str("method\tmean\tstd\taccuracies\n");
    for m in [&report.ltf, &report.lm] {
        let accs: Vec<String> = m.per_trial_accuracy.iter().map(|a| format!("{a:.6}")).collect();
        writeln!(
            out,
            "{}\t{:.6}\t{:.6}\t{}",
            m.method,
            m.mean,
            m.std,
            accs.join(",")
        )
        .unwrap();
    }
    let rs = &report.rank_sum;
    writeln!(
        out,
        "rank_sum\tU={}\tz={:.6}\tsignificant={}",
        rs.u_statistic, rs.z_score, rs.significant_at_0_01
    )
    .unwrap();
    out
}

/// Short table for the terminal, accuracies in percent.
pub fn render_summary(report: &BenchmarkReport) -> String {
    let mut out = String::new();
    writeln!(out, "{:<8} {:>8} {:>8}", "method", "mean%", "std%").unwrap();
    for m in [&report.ltf, &report.lm] {
        writeln!(
            out,
            "{:<8} {:>8.2} {:>8.2}",
            m.method.to_string(),
            100.0 * m.mean,
            100.0 * m.std
        )
        .unwrap();
    }
    let rs = &report.rank_sum;
    writeln!(
        out,
        "rank-sum z = {:.3} ({})",
        rs.z_score,
        if rs.significant_at_0_01 {
            "significant at 0.01"
        } else {
            "not significant at 0.01"
        }
    )
    .unwrap();
    out
}
