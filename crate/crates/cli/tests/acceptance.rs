//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so each criterion reports its own
//! timing; the process exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use besselkit_cli::suite::standard_suite;
use besselkit_core::experiments::{
    default_ensemble, estimate_embedding_constant, run_experiment, ExperimentReport, SuiteKind,
};
use besselkit_core::interpolation::{
    k2_envelope_p2, k_exact_l1_linf_split, k_numeric, truncation_split, CoupleNorm, NormCouple,
};
use besselkit_core::kernel::kernel_mass;
use besselkit_core::norms::{bessel_norm, decreasing_rearrangement, lorentz_norm, sum_norm_l1_linf};
use besselkit_core::{
    make_grid, quadrature_lp, synthesize, ExperimentParams, FunctionSpec, GridFunction, TheoremTag,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let elapsed = start.elapsed();
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn ensemble(n: usize, big_n: usize, count: usize) -> Vec<GridFunction> {
    let g = make_grid(n, big_n).unwrap();
    default_ensemble(&g, count, 0)
        .iter()
        .map(|m| m.sample(&g, false).unwrap())
        .collect()
}

/// Every ratio in a report, primary and companion, labelled by family.
fn all_ratios(report: &ExperimentReport) -> Vec<(&str, f64)> {
    let primary = report.per_member.iter().map(|m| ("primary", m.ratio));
    let companions = report
        .companions
        .iter()
        .flat_map(|f| f.per_member.iter().map(move |m| (f.name.as_str(), m.ratio)));
    primary.chain(companions).collect()
}

fn kernel_normalisation() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for s in [0.25, 0.5, 0.75] {
        let (lo, hi) = kernel_mass(s, 1).map_err(|e| e.to_string())?.bounds();
        let err = (lo - 1.0).abs().max((hi - 1.0).abs());
        ensure(err <= 1e-3, || format!("s={s}: mass bounds [{lo}, {hi}]"))?;
        worst = worst.max(err);
    }
    within_time(start, Duration::from_secs(10))?;
    Ok(format!("max |bound - 1| = {worst:.2e}"))
}

fn operator_identities() -> Outcome {
    use TheoremTag::*;
    let mut worst: f64 = 0.0;
    for tag in [IdentityOrder, Semigroup, Lifting, RieszSemigroup, GradientOrderings, Fftc, ImaginaryIsometry] {
        let start = Instant::now();
        let report = run_experiment(tag, &ExperimentParams::new(1, 64, 0.5, 2.0), 20).map_err(|e| e.to_string())?;
        within_time(start, Duration::from_secs(5)).map_err(|e| format!("{tag}: {e}"))?;
        let max = report.aggregate.max;
        ensure(max <= 1e-10 && report.pass, || format!("{tag}: max relative error {max:e}"))?;
        worst = worst.max(max);
    }
    Ok(format!("7 identities, max relative error {worst:.2e}"))
}

fn k_functional_oracles() -> Outcome {
    let start = Instant::now();
    let g = make_grid(1, 16).unwrap();
    let couple = NormCouple::l1_linf(16).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let x = synthesize(&FunctionSpec::random(6, seed, false), &g).unwrap().real_samples();
        for t in log_grid(0.01, 2.0, 20) {
            let exact = k_exact_l1_linf_split(&x, t).unwrap().value;
            let k = k_numeric(&couple, &x, t, 1e-4).map_err(|e| e.to_string())?.value;
            let rel = (k - exact).abs() / exact;
            ensure(rel <= 1e-3, || format!("seed {seed}, t {t}: {k} vs {exact}"))?;
            worst = worst.max(rel);
        }
    }

    let x = synthesize(&FunctionSpec::random(3, 99, false), &make_grid(1, 8).unwrap())
        .unwrap()
        .real_samples();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let tol = 1e-8;
    for c in [1.0, 3.0] {
        let couple = NormCouple::new(x.len(), CoupleNorm::euclidean(1.0).unwrap(), CoupleNorm::euclidean(c).unwrap())
            .unwrap();
        for t in [0.01, 0.3, 1.0 / c, 2.0, 50.0] {
            let k = k_numeric(&couple, &x, t, tol).map_err(|e| e.to_string())?.value;
            let oracle = (c * t).min(1.0) * norm;
            ensure((k - oracle).abs() <= tol * oracle, || format!("euclidean c={c}, t={t}: {k} vs {oracle}"))?;
        }
    }

    let g = make_grid(1, 32).unwrap();
    for seed in 0..4 {
        let u = synthesize(&FunctionSpec::random(8, seed, false), &g).unwrap();
        let x = u.real_samples();
        for s in [0.5, 1.0] {
            let couple = NormCouple::l2_hs2(&g, s).unwrap();
            for t in [1e-3, 1e-2, 0.1, 1.0] {
                let tol = 1e-6;
                let k = k_numeric(&couple, &x, t, tol).map_err(|e| e.to_string())?.value;
                let k2 = k2_envelope_p2(&u, t, s).unwrap();
                ensure(k >= k2 * (1.0 - tol) && k <= std::f64::consts::SQRT_2 * k2 * (1.0 + tol), || {
                    format!("sandwich seed {seed}, s {s}, t {t}: K={k}, K2={k2}")
                })?;
            }
        }
    }
    within_time(start, Duration::from_secs(60))?;
    Ok(format!("max solver error {worst:.2e}"))
}

fn decomposition_chain() -> Outcome {
    let slack = 1e-12;
    let mut cases = 0;
    for n in [1, 2] {
        for u in ensemble(n, 32, 20) {
            for p in [1.5f64, 2.0, 3.0] {
                let up = quadrature_lp(&u, p).unwrap();
                let level = (p - 1.0).powf(1.0 / p) * up;
                let (gp, hp) = truncation_split(&u, level).unwrap();
                let sum_err = gp.add(&hp).unwrap().sub(&u).unwrap().magnitudes().into_iter().fold(0.0, f64::max);
                ensure(sum_err == 0.0, || format!("g + h differs from u by {sum_err:e}"))?;
                let h_inf = quadrature_lp(&hp, f64::INFINITY).unwrap();
                ensure(h_inf <= level * (1.0 + slack), || format!("|h|_inf = {h_inf} above {level}"))?;
                let g1 = quadrature_lp(&gp, 1.0).unwrap();
                let g_bound = level.powf(1.0 - p) * up.powf(p);
                ensure(g1 <= g_bound * (1.0 + slack), || format!("|g|_1 = {g1} above {g_bound}"))?;
                let c = (p - 1.0).powf((1.0 - p) / p) + (p - 1.0).powf(1.0 / p);
                let sum = sum_norm_l1_linf(&u);
                ensure(sum <= c * up * (1.0 + slack), || format!("sum norm {sum} above {}", c * up))?;
                ensure(g1 + h_inf <= c * up * (1.0 + slack), || format!("split cost above {}", c * up))?;
                cases += 1;
            }
        }
    }
    let c2 = (1.0f64).powf(-0.5) + (1.0f64).powf(0.5);
    ensure(c2 == 2.0, || format!("p=2 constant is {c2}"))?;
    Ok(format!("{cases} cases, p=2 constant exactly 2"))
}

fn lorentz_layer() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [1, 2] {
        for u in ensemble(n, 32, 50) {
            let r = decreasing_rearrangement(&u);
            for p in [1.0, 1.5, 2.0, 3.0, 4.0, f64::INFINITY] {
                let lp = quadrature_lp(&u, p).unwrap();
                let rp = r.lp_norm(p).unwrap();
                let rel = (rp - lp).abs() / lp;
                ensure(rel <= 1e-12, || format!("rearrangement L^{p}: {rp} vs {lp}"))?;
                if p.is_finite() {
                    let lpp = lorentz_norm(&u, p, p).unwrap();
                    let rel = (lpp - lp).abs() / lp;
                    ensure(rel <= 1e-10, || format!("L^({p},{p}) = {lpp} vs L^{p} = {lp}"))?;
                    worst = worst.max(rel);
                }
            }
        }
    }
    let g = make_grid(1, 64).unwrap();
    let mut samples = vec![0.0; 64];
    samples[10..30].iter_mut().for_each(|v| *v = 1.0);
    let m: f64 = 20.0 / 64.0;
    let ind = GridFunction::from_real(g, &samples).unwrap();
    for p in [1.5f64, 2.0, 3.0] {
        for q in [1.0, p, 2.0 * p] {
            let got = lorentz_norm(&ind, p, q).unwrap();
            let want = (p / q).powf(1.0 / q) * m.powf(1.0 / p);
            ensure((got - want).abs() <= 1e-10 * want, || format!("indicator p={p}, q={q}: {got} vs {want}"))?;
        }
    }
    Ok(format!("max |L^(p,p) - L^p| relative {worst:.2e}"))
}

fn interpolation_inequalities() -> Outcome {
    let slack = 1e-10;
    let thetas: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let mut checks = 0;
    for n in [1, 2] {
        for u in ensemble(n, 32, 50) {
            for (p0, p1) in [(1.0, 2.0), (1.5, 4.0), (2.0, f64::INFINITY), (1.0, f64::INFINITY)] {
                let (a, b) = (quadrature_lp(&u, p0).unwrap(), quadrature_lp(&u, p1).unwrap());
                for &th in &thetas {
                    let p = 1.0 / ((1.0 - th) / p0 + th / p1);
                    let mid = quadrature_lp(&u, p).unwrap();
                    let bound = a.powf(1.0 - th) * b.powf(th);
                    ensure(mid <= bound * (1.0 + slack), || format!("Holder p0={p0}, p1={p1}, theta={th}"))?;
                    checks += 1;
                }
            }
            for (s0, s1) in [(-0.5, 0.5), (0.0, 1.0), (0.25, 2.0)] {
                let (a, b) = (bessel_norm(&u, s0, 2.0).unwrap(), bessel_norm(&u, s1, 2.0).unwrap());
                for &th in &thetas {
                    let mid = bessel_norm(&u, (1.0 - th) * s0 + th * s1, 2.0).unwrap();
                    let bound = a.powf(1.0 - th) * b.powf(th);
                    ensure(mid <= bound * (1.0 + slack), || format!("log-convexity s0={s0}, s1={s1}, theta={th}"))?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} inequalities, no violations"))
}

fn embedding_suites() -> Outcome {
    use TheoremTag::*;
    let start = Instant::now();
    let tags = [FsetSubcritical, FsetCritical, FsetSupercritical, CriticalI, Frset, LorentzOptimal, BmoEstimate];
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for entry in standard_suite(0, 50).into_iter().filter(|e| tags.contains(&e.tag)) {
        let report = run_experiment(entry.tag, &entry.params, entry.ensemble_size).map_err(|e| format!("{}: {e}", entry.name))?;
        for (family, r) in all_ratios(&report) {
            ensure(r.is_finite(), || format!("{}: ratio {r} in {family}", entry.name))?;
        }
        let constant = estimate_embedding_constant(&report).map_err(|e| e.to_string())?;
        ensure(constant.is_finite(), || format!("{}: estimate {constant}", entry.name))?;
        let drift = report
            .refinement
            .as_ref()
            .map(|r| r.statistic_drift())
            .ok_or_else(|| format!("{}: no refinement", entry.name))?;
        ensure(drift < 0.25 && report.pass, || format!("{}: drift {drift:.3}", entry.name))?;
        worst = worst.max(drift);
        runs += 1;
    }
    within_time(start, Duration::from_secs(300))?;
    Ok(format!("{runs} runs, max drift {worst:.3}"))
}

fn scale_comparisons() -> Outcome {
    use TheoremTag::*;
    let mut notes = Vec::new();
    let mut nesting = Vec::new();
    for entry in standard_suite(0, 50)
        .into_iter()
        .filter(|e| e.tag.kind() == SuiteKind::Scale && e.tag != GagliardoVsInterp)
    {
        let report = run_experiment(entry.tag, &entry.params, entry.ensemble_size).map_err(|e| format!("{}: {e}", entry.name))?;
        for (family, r) in all_ratios(&report) {
            ensure(r.is_finite() && r > 0.0, || format!("{}: ratio {r} in {family}", entry.name))?;
        }
        match entry.tag {
            Hilbertcase => {
                let band = report.refinement.as_ref().map(|r| r.band_drift).unwrap_or(f64::INFINITY);
                ensure(band < 0.20, || format!("Hilbertcase band drift {band:.3}"))?;
                notes.push(format!("band drift {band:.3}"));
            }
            Contiguity => {
                let check = report
                    .checks
                    .iter()
                    .find(|c| c.name == "median-ordering")
                    .ok_or("contiguity report lacks the median ordering check")?;
                ensure(check.pass, || format!("median ordering {}", check.value))?;
                notes.push(format!("median ratio {:.3}", check.value));
            }
            Nesting => nesting.push(entry.params.p),
            _ => {}
        }
        ensure(report.pass, || format!("{} failed its checks", entry.name))?;
    }
    ensure(nesting.contains(&1.5) && nesting.contains(&3.0), || format!("nesting ran for p in {nesting:?}"))?;
    notes.push("nesting p=1.5, 3 finite".into());
    Ok(notes.join(", "))
}

fn run_suite_all(bin: &str, dir: &Path) -> Result<(), String> {
    let status = Command::new(bin)
        .args(["suite-all", "--seed", "42", "--out"])
        .arg(dir)
        .stderr(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    ensure(status.code() == Some(0), || format!("suite-all exited with {status}"))
}

fn read_tree(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .map(|entry| {
            let path = entry.map_err(|e| e.to_string())?.path();
            let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
            Ok((path.file_name().unwrap().to_string_lossy().into_owned(), bytes))
        })
        .collect::<Result<_, String>>()?;
    files.sort();
    Ok(files)
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_besselkit");
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_suite_all(bin, a.path())?;
    run_suite_all(bin, b.path())?;
    let (fa, fb) = (read_tree(a.path())?, read_tree(b.path())?);
    ensure(!fa.is_empty(), || "suite-all wrote no files".into())?;
    ensure(fa.len() == fb.len(), || format!("{} vs {} files", fa.len(), fb.len()))?;
    for ((na, ba), (nb, bb)) in fa.iter().zip(&fb) {
        ensure(na == nb && ba == bb, || format!("{na} differs between runs"))?;
    }
    Ok(format!("{} files byte-identical", fa.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("kernel normalisation", kernel_normalisation),
        ("exact operator identities", operator_identities),
        ("K-functional oracles", k_functional_oracles),
        ("L1+Linf decomposition chain", decomposition_chain),
        ("Lorentz layer", lorentz_layer),
        ("Holder and log-convexity inequalities", interpolation_inequalities),
        ("embedding suites", embedding_suites),
        ("scale comparisons", scale_comparisons),
        ("suite-all determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail} ({elapsed:.2?})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail} ({elapsed:.2?})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
