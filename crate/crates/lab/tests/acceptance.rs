//! Acceptance run: one line per criterion, exit status 1 if any fails.
//!
//! Each criterion returns `Ok(summary)` or `Err(reason)`; nothing here is
//! retried or re-seeded.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use semimarkov::limits::limit_parameters;
use semimarkov::reference;
use semimarkov::rng::stream;
use semimarkov::simulate::Sampler;
use semimarkov::telegraph::alternating_poisson_pmf;
use semimarkov::verify::*;
use semimarkov::{Observable, SemiMarkovKernel};
use semimarkov_lab::output::strip_header;
use semimarkov_lab::runner::{default_workers, RayonRunner};

type Outcome = Result<String, String>;

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(format!("{name}.toml"))
        .to_string_lossy()
        .into_owned()
}

fn runner() -> RayonRunner {
    RayonRunner::new(default_workers()).expect("thread pool")
}

fn estimate(report: &VerificationReport, name: &str) -> Result<f64, String> {
    report
        .find_estimate(name)
        .map(|e| e.value)
        .ok_or_else(|| format!("{} report has no estimate {name}", report.suite))
}

fn target(report: &VerificationReport, name: &str) -> Result<f64, String> {
    report
        .targets
        .iter()
        .find(|t| t.name == name)
        .map(|t| t.value)
        .ok_or_else(|| format!("{} report has no target {name}", report.suite))
}

fn require_passed(report: &VerificationReport) -> Result<(), String> {
    if report.passed {
        return Ok(());
    }
    let failed: Vec<String> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} = {:.4e} (threshold {:.4e})", c.name, c.statistic, c.threshold))
        .collect();
    Err(format!("{} failed: {}", report.suite, failed.join("; ")))
}

fn ensure(condition: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if condition {
        Ok(())
    } else {
        Err(message())
    }
}

fn symmetric_clt() -> Outcome {
    let kernel = reference::symmetric_telegraph();
    let params = limit_parameters(&kernel).map_err(|e| e.to_string())?;
    let options = CltOptions {
        lambda: 400.0,
        n_reps: 20_000,
        ..CltOptions::default()
    };
    let start = Instant::now();
    let single = semimarkov::exec::Serial;
    let report = clt_suite(&kernel, &params, &options, &single).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let mean = estimate(&report, "mean[t=1]")?;
    let variance = estimate(&report, "variance[t=1]")?;
    let p = report.find_check("ks_p[t=1]").ok_or("no KS check")?.statistic;
    ensure(mean.abs() <= 0.022, || format!("mean {mean} outside ±0.022"))?;
    ensure((0.95..=1.05).contains(&variance), || format!("variance {variance} outside [0.95, 1.05]"))?;
    ensure(p >= 1e-3, || format!("KS p-value {p} below 0.001"))?;
    ensure(elapsed < 30.0, || format!("took {elapsed:.1} s single-threaded"))?;
    Ok(format!("mean {mean:.4}, variance {variance:.4}, KS p {p:.3}, {elapsed:.2} s single-threaded"))
}

fn asymmetric_limit() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_smlab"))
        .args(["analyze", "--config", &config("asymmetric_telegraph")])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let drift = record["theta"].as_f64().ok_or("no theta")?;
    let diffusion = record["diffusion"].as_f64().ok_or("no diffusion")?;
    ensure((drift - 1.0).abs() <= 1e-12, || format!("drift {drift}"))?;
    ensure((diffusion - 4.0 / 3.0).abs() <= 1e-12, || format!("diffusion {diffusion}"))?;

    let kernel = reference::asymmetric_telegraph();
    let params = limit_parameters(&kernel).map_err(|e| e.to_string())?;
    ensure(params.diffusion == diffusion, || "CLI and library disagree".into())?;
    let report = clt_suite(&kernel, &params, &CltOptions::default(), &runner()).map_err(|e| e.to_string())?;
    let variance = estimate(&report, "variance[t=1]")?;
    let relative = (variance / (4.0 / 3.0) - 1.0).abs();
    ensure(relative <= 0.05, || format!("variance {variance} is {relative:.3} from 4/3"))?;
    Ok(format!("drift {drift}, diffusion {diffusion}, simulated variance {variance:.4}"))
}

fn dual_gamma2() -> Outcome {
    let options = Gamma2Options {
        n_cycles: 100_000,
        ..Gamma2Options::default()
    };
    let report = gamma2_suite(&reference::three_state(), &options, &runner()).map_err(|e| e.to_string())?;
    require_passed(&report)?;
    let series = target(&report, "gamma2_series")?;
    let worst = report.checks.iter().map(|c| c.statistic).fold(0.0, f64::max);
    let cycles: Vec<String> = (0..3)
        .map(|v| estimate(&report, &format!("gamma2_cycles[v0={v}]")).map(|x| format!("{x:.4}")))
        .collect::<Result<_, _>>()?;
    Ok(format!("series {series:.6}, cycles [{}], max |z| {worst:.2}", cycles.join(", ")))
}

fn renewal() -> Outcome {
    let report = renewal_suite(&reference::symmetric_telegraph(), &RenewalOptions::default(), &runner())
        .map_err(|e| e.to_string())?;
    require_passed(&report)?;
    let freqs: Vec<String> = [100, 1_000, 10_000]
        .iter()
        .map(|n| estimate(&report, &format!("exceedance[n={n}]")).map(|x| format!("{x:.2}")))
        .collect::<Result<_, _>>()?;
    Ok(format!("exceedance frequencies {}", freqs.join(", ")))
}

fn ergodic() -> Outcome {
    let mut parts = Vec::new();
    for (label, kernel) in [
        ("symmetric", reference::symmetric_telegraph()),
        ("three_state", reference::three_state()),
    ] {
        for f in [Observable::Time, Observable::VelocityTime] {
            let report = ergodic_suite(&kernel, &ErgodicOptions { f, ..ErgodicOptions::default() })
                .map_err(|e| e.to_string())?;
            require_passed(&report).map_err(|e| format!("{label}: {e}"))?;
            let error = report.checks[0].statistic;
            parts.push(format!("{label} f={f} err {error:.1e}"));
        }
    }
    Ok(parts.join(", "))
}

fn wald() -> Outcome {
    let report = wald_suite(&reference::asymmetric_telegraph(), &WaldOptions::default(), &runner())
        .map_err(|e| e.to_string())?;
    require_passed(&report)?;
    let rhs = target(&report, "cycle_sum[f=x]")?;
    ensure((rhs - 1.5).abs() <= 1e-12, || format!("rhs for f=x is {rhs}, expected 1.5"))?;
    let worst = report.checks.iter().map(|c| c.statistic).fold(0.0, f64::max);
    Ok(format!("rhs[f=x] = {rhs}, max |z| {worst:.2} over {} observables", report.checks.len()))
}

fn residual() -> Outcome {
    let report = residual_suite(&reference::symmetric_telegraph(), &ResidualOptions::default(), &runner())
        .map_err(|e| e.to_string())?;
    require_passed(&report)?;
    let medians: Vec<String> = [100, 1_000, 10_000]
        .iter()
        .map(|n| estimate(&report, &format!("median_sup_residual[n={n}]")).map(|x| format!("{x:.4}")))
        .collect::<Result<_, _>>()?;
    Ok(format!("medians {}", medians.join(", ")))
}

fn occupancy() -> Outcome {
    let mut parts = Vec::new();
    for (label, kernel) in [
        ("asymmetric", reference::asymmetric_telegraph()),
        ("three_state", reference::three_state()),
    ] {
        let report = occupancy_suite(&kernel, &OccupancyOptions::default()).map_err(|e| e.to_string())?;
        require_passed(&report).map_err(|e| format!("{label}: {e}"))?;
        let tv = report.find_check("total variation").ok_or("no TV check")?.statistic;
        parts.push(format!("{label} TV {tv:.1e}"));
    }
    Ok(parts.join(", "))
}

fn mixing() -> Outcome {
    let mut parts = Vec::new();
    for (label, kernel) in [
        ("three_state", reference::three_state()),
        ("lazy_pair", reference::lazy_pair()),
        ("equal_rows", reference::equal_rows()),
    ] {
        let report = mixing_suite(&kernel, &MixingOptions::default()).map_err(|e| e.to_string())?;
        require_passed(&report).map_err(|e| format!("{label}: {e}"))?;
        parts.push(label.to_string());
    }
    Ok(format!("envelope and TV slope hold on {}", parts.join(", ")))
}

/// `P{N(t) = 1}`: one switch from `v1` at `s ≤ t`, then no switch from `v2`
/// during `t − s`, integrated in closed form.
fn one_switch(l1: f64, l2: f64, t: f64) -> f64 {
    if l1 == l2 {
        l1 * t * (-l1 * t).exp()
    } else {
        l1 / (l2 - l1) * ((-l1 * t).exp() - (-l2 * t).exp())
    }
}

/// Empirical law of `N(t)` from state 0; the last bin collects the tail.
fn empirical_counts(kernel: &SemiMarkovKernel, t: f64, reps: usize, size: usize) -> Vec<f64> {
    use semimarkov::exec::Runner;
    let sampler = Sampler::new(kernel);
    let n: Vec<usize> = runner().map(reps, |r| {
        let mut rng = stream(2024, r as u64);
        let (mut state, mut time, mut n) = (0, 0.0, 0);
        loop {
            let step = sampler.step(state, &mut rng);
            time += step.sojourn;
            if time > t {
                return n;
            }
            n += 1;
            state = step.state;
        }
    });
    let mut counts = vec![0u64; size];
    for k in n {
        counts[k.min(size - 1)] += 1;
    }
    counts.iter().map(|&c| c as f64 / reps as f64).collect()
}

fn alternating_pmf() -> Outcome {
    let mut worst_oracle: f64 = 0.0;
    for (l1, l2, t) in [(1.0, 2.0, 1.0), (2.0, 1.0, 1.0), (0.3, 5.0, 2.0), (4.0, 0.5, 0.7)] {
        let formula = alternating_poisson_pmf(l1, l2, t, 1).map_err(|e| e.to_string())?;
        worst_oracle = worst_oracle.max((formula - one_switch(l1, l2, t)).abs());
    }
    ensure(worst_oracle <= 1e-10, || format!("n=1 differs from the convolution by {worst_oracle:e}"))?;

    const REPS: usize = 1_000_000;
    const SIZE: usize = 40;
    let mut worst_tv: f64 = 0.0;
    for (l1, l2) in [(1.0, 2.0), (2.0, 1.0)] {
        let kernel = semimarkov::telegraph::TelegraphSpec::new(2.0, -1.0, l1, l2, 1.0)
            .and_then(|s| s.kernel())
            .map_err(|e| e.to_string())?;
        let empirical = empirical_counts(&kernel, 1.0, REPS, SIZE);
        let mut tv = 0.0;
        let mut mass = 0.0;
        for (n, e) in empirical.iter().enumerate().take(SIZE - 1) {
            let p = alternating_poisson_pmf(l1, l2, 1.0, n as u64).map_err(|e| e.to_string())?;
            mass += p;
            tv += (p - e).abs();
        }
        tv += ((1.0 - mass) - empirical[SIZE - 1]).abs();
        worst_tv = worst_tv.max(tv / 2.0);
    }
    ensure(worst_tv < 0.005, || format!("empirical TV {worst_tv:.4}"))?;

    let mut worst_poisson: f64 = 0.0;
    let (rate, t) = (1.7, 1.3);
    let a: f64 = rate * t;
    let mut poisson = (-a).exp();
    for n in 0..30u64 {
        if n > 0 {
            poisson *= a / n as f64;
        }
        let p = alternating_poisson_pmf(rate, rate, t, n).map_err(|e| e.to_string())?;
        worst_poisson = worst_poisson.max((p - poisson).abs() / poisson);
    }
    ensure(worst_poisson <= 1e-12, || format!("equal rates deviate from Poisson by {worst_poisson:e} relative"))?;
    Ok(format!(
        "n=1 error {worst_oracle:.1e}, empirical TV {worst_tv:.4} over 10^6 paths, Poisson relative error {worst_poisson:.1e}"
    ))
}

fn determinism() -> Outcome {
    let mut parts = Vec::new();
    for name in ["three_state", "asymmetric_telegraph"] {
        let mut runs = Vec::new();
        for workers in ["1", "4"] {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let out = Command::new(env!("CARGO_BIN_EXE_smlab"))
                .args(["verify", "--config", &config(name), "--workers", workers, "--out"])
                .arg(dir.path())
                .output()
                .map_err(|e| e.to_string())?;
            ensure(matches!(out.status.code(), Some(0 | 1)), || {
                String::from_utf8_lossy(&out.stderr).into_owned()
            })?;
            let json = std::fs::read(dir.path().join("reports.json")).map_err(|e| e.to_string())?;
            let txt = std::fs::read(dir.path().join("reports.txt")).map_err(|e| e.to_string())?;
            runs.push((out.stdout, json, txt, out.status.code()));
        }
        ensure(runs[0] == runs[1], || format!("{name}: outputs differ between 1 and 4 workers"))?;
        let reports: serde_json::Value =
            serde_json::from_str(strip_header(&String::from_utf8_lossy(&runs[0].1))).map_err(|e| e.to_string())?;
        parts.push(format!("{name} ({} reports)", reports.as_array().map_or(0, Vec::len)));
    }
    Ok(format!("byte-identical with 1 and 4 workers: {}", parts.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("symmetric telegraph CLT", symmetric_clt),
        ("asymmetric telegraph limit", asymmetric_limit),
        ("dual gamma2 equality", dual_gamma2),
        ("uniform renewal theorem", renewal),
        ("ergodic theorem", ergodic),
        ("Wald identity", wald),
        ("residual life", residual),
        ("occupancy limit", occupancy),
        ("mixing proxy", mixing),
        ("alternating Poisson PMF", alternating_pmf),
        ("determinism across workers", determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let seconds = start.elapsed().as_secs_f64();
        match outcome {
            Ok(summary) => println!("criterion {:>2} PASS  {name}: {summary} [{seconds:.1} s]", i + 1),
            Err(reason) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {reason} [{seconds:.1} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
