//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance`.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use classeval::class_measures::{self as cm, MeanKind, MeasureValue};
use classeval::generate::{composition, random_ensemble, random_matrix};
use classeval::gti::{fit_gti, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE};
use classeval::overall::{self, agreement, ChanceModel};
use classeval::ranking::{rank, tau_b, RankingKey};
use classeval::report::{evaluate_all, EntryValues, EvalConfig, MeasureReport};
use classeval::{ConfusionMatrix, Error, Measure, MeasureContext, WeightMatrix};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(name: &str, actual: f64, expected: f64, tol: f64) -> Result<(), String> {
    check((actual - expected).abs() <= tol, || {
        format!("{name}: expected {expected}, got {actual} (tol {tol:e})")
    })
}

fn defined(v: classeval::Result<MeasureValue>) -> Option<f64> {
    v.ok().and_then(|v| v.value())
}

fn rows(cells: &[&[f64]]) -> ConfusionMatrix {
    ConfusionMatrix::from_rows(&cells.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn m1() -> ConfusionMatrix {
    rows(&[&[40.0, 10.0], &[5.0, 45.0]])
}

fn m2() -> ConfusionMatrix {
    rows(&[&[30.0, 2.0, 3.0], &[4.0, 25.0, 1.0], &[1.0, 3.0, 31.0]])
}

/// k in 2..=8, n log-uniform in 10..=1e6.
fn random_case(rng: &mut ChaCha8Rng) -> ConfusionMatrix {
    let k = rng.gen_range(2..=8);
    let n = 10f64.powf(rng.gen_range(1.0..=6.0)).round() as u64;
    random_matrix(rng, k, n)
}

fn c1_hand_oracles() -> Outcome {
    let tol = 1e-9;
    let m = m1();
    let v = |x| defined(x).ok_or_else(|| "undefined".to_string());
    close("OSR(M1)", overall::osr(&m).value().unwrap(), 0.85, tol)?;
    close("TPR0", v(cm::tpr(&m, 0))?, 8.0 / 9.0, tol)?;
    close("PPV0", v(cm::ppv(&m, 0))?, 0.8, tol)?;
    close("TNR0", v(cm::tnr(&m, 0))?, 9.0 / 11.0, tol)?;
    close("NPV0", v(cm::npv(&m, 0))?, 0.9, tol)?;
    close("F0", v(cm::f_measure(&m, 0))?, 16.0 / 19.0, tol)?;
    close("JCC0", v(cm::jaccard(&m, 0))?, 8.0 / 11.0, tol)?;
    close("ICSI0", v(cm::icsi(&m, 0))?, 0.8 + 8.0 / 9.0 - 1.0, tol)?;
    let kappa = agreement(&m, &ChanceModel::CohenMarginals).map_err(|e| e.to_string())?;
    close("kappa(M1)", kappa.value, 0.70, tol)?;
    close("OSR(M2)", overall::osr(&m2()).value().unwrap(), 0.86, tol)?;
    let re = agreement(&m2(), &ChanceModel::MaxwellUniform).map_err(|e| e.to_string())?;
    close("MRE(M2)", re.value, 0.79, tol)?;
    Ok("M1/M2 values within 1e-9".into())
}

fn c2_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tol = 1e-12;
    let mut checked = 0usize;
    for _ in 0..10_000 {
        let m = random_case(&mut rng);
        for i in 0..m.k() {
            let f = defined(cm::f_measure(&m, i));
            let j = defined(cm::jaccard(&m, i));
            if let (Some(f), Some(j)) = (f, j) {
                close("JCC = F/(2-F)", j, f / (2.0 - f), tol)?;
                checked += 1;
            }
            if let (Some(icsi), Some(kul)) = (defined(cm::icsi(&m, i)), defined(cm::kulczynski(&m, i))) {
                close("ICSI = 2K - 1", icsi, 2.0 * kul - 1.0, tol)?;
                checked += 1;
            }
            if let (Some(h), Some(f)) = (defined(cm::combine(&m, i, MeanKind::Harmonic)), f) {
                close("harmonic = F", h, f, tol)?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} identity checks on 10000 matrices"))
}

fn c3_mean_chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut classes = 0usize;
    for _ in 0..10_000 {
        let m = random_case(&mut rng);
        for i in 0..m.k() {
            let values: Option<Vec<f64>> = MeanKind::ALL
                .iter()
                .map(|&kind| defined(cm::combine(&m, i, kind)))
                .collect();
            let Some(values) = values else { continue };
            for (w, kinds) in values.windows(2).zip(MeanKind::ALL.windows(2)) {
                check(w[0] <= w[1] + 1e-12, || {
                    format!("{} {} > {} {} on {:?} class {i}", kinds[0], w[0], kinds[1], w[1], m.cells())
                })?;
            }
            classes += 1;
        }
    }
    Ok(format!("chain holds on {classes} classes"))
}

fn report_with(m: &ConfusionMatrix, id: String, priors: Option<Vec<f64>>) -> MeasureReport {
    let config = EvalConfig {
        measures: vec![
            Measure::Osr,
            Measure::ReMaxwell,
            Measure::PiScott,
            Measure::FMeasure,
            Measure::Jaccard,
            Measure::Icsi,
            Measure::Kulczynski,
        ],
        context: MeasureContext {
            scott_priors: priors,
            ..MeasureContext::default()
        },
        ..EvalConfig::default()
    };
    evaluate_all(&id, m, &config).unwrap()
}

fn c4_ranking_equivalences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let tol = 1e-9;
    let mut comparisons = 0usize;
    for e in 0..1_000 {
        let k = rng.gen_range(2..=8);
        let n = 10f64.powf(rng.gen_range(1.3..=5.0)).round() as u64;
        let ensemble = random_ensemble(&mut rng, k, n, 5);
        // strictly positive priors summing to one
        let raw: Vec<f64> = composition(&mut rng, 1000, k).iter().map(|c| (*c + 1) as f64).collect();
        let total: f64 = raw.iter().sum();
        let priors: Vec<f64> = raw.iter().map(|r| r / total).collect();
        let reports: Vec<MeasureReport> = ensemble
            .iter()
            .enumerate()
            .map(|(i, m)| report_with(m, format!("clf{i}"), Some(priors.clone())))
            .collect();
        let mut pairs = vec![
            (RankingKey::overall(Measure::ReMaxwell), RankingKey::overall(Measure::Osr)),
            (RankingKey::overall(Measure::PiScott), RankingKey::overall(Measure::Osr)),
        ];
        for c in 0..k {
            pairs.push((RankingKey::class(Measure::FMeasure, c), RankingKey::class(Measure::Jaccard, c)));
            pairs.push((RankingKey::class(Measure::Icsi, c), RankingKey::class(Measure::Kulczynski, c)));
        }
        for (a, b) in pairs {
            let ra = rank(&reports, a, tol).map_err(|e| e.to_string())?;
            let rb = rank(&reports, b, tol).map_err(|e| e.to_string())?;
            check(ra.same_order(&rb), || format!("ensemble {e}: {} {ra} vs {} {rb}", a.measure, b.measure))?;
            if let Some(t) = tau_b(&ra, &rb) {
                check(t == 1.0, || format!("ensemble {e}: tau_b({}, {}) = {t}", a.measure, b.measure))?;
            }
            comparisons += 1;
        }
    }
    Ok(format!("{comparisons} ranking comparisons, zero violations"))
}

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_classeval")
}

fn run_cli(args: &[&str]) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(binary()).args(args).output().map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn c5_probe_witness() -> Outcome {
    let (code, out) = run_cli(&[
        "probe", "--measures", "harmonic,arithmetic", "--seed", "7", "--budget", "10000", "--classes", "2",
        "--mass", "100",
    ])?;
    let text = String::from_utf8_lossy(&out);
    check(code == 0, || format!("exit status {code}"))?;
    check(text.contains("\nresult witness\n"), || format!("no witness:\n{text}"))?;
    let sample = text
        .lines()
        .find_map(|l| l.strip_prefix("sample "))
        .unwrap_or("?")
        .to_string();
    Ok(format!("witness found (sample {sample} of its sub-budget)"))
}

fn c6_association_paradox() -> Outcome {
    let anti = rows(&[&[0.0, 10.0], &[10.0, 0.0]]);
    close("V(anti)", overall::cramers_v(&anti).value().unwrap(), 1.0, 1e-12)?;
    close("phi(anti)", overall::phi(&anti).unwrap().value().unwrap(), 1.0, 1e-12)?;
    close("OSR(anti)", overall::osr(&anti).value().unwrap(), 0.0, 0.0)?;
    close("ICSI(anti)", defined(cm::icsi(&anti, 0)).unwrap(), -1.0, 1e-12)?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let k = rng.gen_range(2..=8);
        let n = 10f64.powf(rng.gen_range(1.0..=6.0));
        let r: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
        let c: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
        let (rs, cs): (f64, f64) = (r.iter().sum(), c.iter().sum());
        let cells: Vec<Vec<f64>> = r
            .iter()
            .map(|ri| c.iter().map(|cj| n * (ri / rs) * (cj / cs)).collect())
            .collect();
        let m = ConfusionMatrix::from_rows(&cells).unwrap();
        let chi = overall::chi_square(&m);
        let mi = overall::mutual_information(&m);
        let v = overall::cramers_v(&m).value().unwrap();
        check(chi <= 1e-9 && mi <= 1e-9 && v <= 1e-9, || {
            format!("independent matrix k={k}: chi2 {chi:e}, MI {mi:e}, V {v:e}")
        })?;
    }
    Ok("anti-diagonal V=phi=1, OSR=0, ICSI=-1; 200 product matrices at zero association".into())
}

/// Draws `n` instances: true class from `q`; with probability `theta[j]` the
/// infallible component labels it correctly, otherwise the estimate is drawn
/// from `a` regardless of the true class.
fn sample_model(rng: &mut ChaCha8Rng, theta: &[f64], q: &[f64], a: &[f64], n: usize) -> ConfusionMatrix {
    let k = q.len();
    let truth = WeightedIndex::new(q).unwrap();
    let random = WeightedIndex::new(a).unwrap();
    let mut cells = vec![0.0; k * k];
    for _ in 0..n {
        let j = truth.sample(rng);
        let i = if rng.gen::<f64>() < theta[j] { j } else { random.sample(rng) };
        cells[i * k + j] += 1.0;
    }
    ConfusionMatrix::new((0..k).map(|i| format!("c{i}")).collect(), cells).unwrap()
}

fn positive_simplex(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.5..1.5)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

fn c7_gti() -> Outcome {
    let start = Instant::now();
    let two = m1();
    check(fit_gti(&two, DEFAULT_TOLERANCE, DEFAULT_MAX_ITERATIONS) == Err(Error::GtiTooFewClasses), || {
        "k = 2 not rejected".into()
    })?;
    let diag = rows(&[&[5.0, 0.0, 0.0], &[0.0, 4.0, 0.0], &[0.0, 0.0, 9.0]]);
    check(fit_gti(&diag, DEFAULT_TOLERANCE, DEFAULT_MAX_ITERATIONS) == Err(Error::GtiPerfect), || {
        "diagonal matrix not rejected".into()
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_overall: f64 = 0.0;
    let mut worst_class: f64 = 0.0;
    let mut max_iter = 0;
    for &theta in &[0.3, 0.6, 0.9] {
        for rep in 0..20 {
            let q = positive_simplex(&mut rng, 4);
            let a = positive_simplex(&mut rng, 4);
            let m = sample_model(&mut rng, &[theta; 4], &q, &a, 100_000);
            let fit = fit_gti(&m, DEFAULT_TOLERANCE, DEFAULT_MAX_ITERATIONS)
                .map_err(|e| format!("theta {theta} replicate {rep}: {e}"))?;
            check(fit.converged && fit.iterations < 10_000, || {
                format!("theta {theta} replicate {rep}: no convergence after {}", fit.iterations)
            })?;
            max_iter = max_iter.max(fit.iterations);
            let err = (fit.theta_overall - theta).abs();
            worst_overall = worst_overall.max(err);
            check(err <= 0.02, || format!("theta {theta} replicate {rep}: overall {}", fit.theta_overall))?;
            for (c, t) in fit.theta_class.iter().enumerate() {
                let err = (t - theta).abs();
                worst_class = worst_class.max(err);
                check(err <= 0.03, || format!("theta {theta} replicate {rep}: class {c} {t}"))?;
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(elapsed < 10.0, || format!("took {elapsed:.1} s"))?;
    Ok(format!(
        "60 replicates, worst overall error {worst_overall:.4}, worst class error {worst_class:.4}, max {max_iter} iterations, {elapsed:.2} s"
    ))
}

fn c8_one_vs_rest() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    for _ in 0..2_000 {
        let m = random_case(&mut rng);
        for i in 0..m.k() {
            let c = m.binary_counts(i).unwrap();
            let collapsed = m.collapse_one_vs_rest(i).unwrap();
            close("OSR(collapse)", overall::osr(&collapsed).value().unwrap(), (c.tp + c.tn) / m.total(), 1e-12)?;
            checked += 1;
        }
        let weighted = m.apply_weights(&WeightMatrix::ones(m.k())).unwrap();
        let a = evaluate_all("x", &m, &EvalConfig::default()).unwrap();
        let b = evaluate_all("x", &weighted, &EvalConfig::default()).unwrap();
        check(a.same_values(&b), || "identity weights changed a measure".to_string())?;
    }
    Ok(format!("{checked} collapses; identity weights inert on 2000 matrices"))
}

fn c9_determinism(dir: &Path) -> Outcome {
    let matrix = dir.join("m1.txt");
    let labels = dir.join("m1.csv");
    std::fs::write(&matrix, "2 A B\n40 10\n5 45\n").unwrap();
    // true,estimated pairs reproducing M1: cell(est, true)
    let mut csv = String::from("true,estimated\n");
    for (t, e, count) in [("A", "A", 40), ("B", "A", 10), ("A", "B", 5), ("B", "B", 45)] {
        for _ in 0..count {
            csv.push_str(&format!("{t},{e}\n"));
        }
    }
    std::fs::write(&labels, csv).unwrap();
    let m = matrix.to_str().unwrap();
    let l = labels.to_str().unwrap();
    let first = run_cli(&["eval", "--matrix", m])?;
    let second = run_cli(&["eval", "--matrix", m])?;
    let from_labels = run_cli(&["eval", "--labels", l])?;
    check(first.0 == 0, || format!("eval exit {}", first.0))?;
    check(first == second, || "repeated eval differs".into())?;
    check(first == from_labels, || "matrix vs label ingestion differs".into())?;
    let probe = ["probe", "--measures", "harmonic,arithmetic", "--seed", "7", "--budget", "5000"];
    check(run_cli(&probe)? == run_cli(&probe)?, || "repeated probe differs".into())?;
    let m2 = dir.join("m2.txt");
    std::fs::write(&m2, "2 A B\n41 10\n4 45\n").unwrap();
    let rank = ["rank", "--matrix", m, m2.to_str().unwrap()];
    check(run_cli(&rank)? == run_cli(&rank)?, || "repeated rank differs".into())?;
    Ok("eval, rank and probe byte-identical across runs; matrix and label ingestion identical".into())
}

fn entry_values(r: &MeasureReport) -> Vec<(Measure, Option<usize>, Option<f64>)> {
    let mut out = Vec::new();
    for e in &r.entries {
        match &e.values {
            EntryValues::Overall(o) => out.push((e.measure, None, o.as_ref().ok().and_then(|v| v.value()))),
            EntryValues::PerClass(v) => {
                for (c, o) in v {
                    out.push((e.measure, Some(*c), o.as_ref().ok().and_then(|v| v.value())));
                }
            }
        }
    }
    out
}

fn c10_scale_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut checked = 0;
    for _ in 0..300 {
        let k = rng.gen_range(3..=6);
        let n = rng.gen_range(200..20_000);
        let m = random_matrix(&mut rng, k, n);
        let base = evaluate_all("x", &m, &EvalConfig::default()).unwrap();
        let base_values = entry_values(&base);
        for c in [2.0, 10.0, 0.5] {
            let scaled = evaluate_all("x", &m.scaled(c).unwrap(), &EvalConfig::default()).unwrap();
            for ((measure, class, a), (_, _, b)) in base_values.iter().zip(entry_values(&scaled)) {
                let (a, b) = match (a, b) {
                    (Some(a), Some(b)) => (*a, b),
                    (None, None) => continue,
                    _ => return Err(format!("{measure} class {class:?}: definedness changed at c = {c}")),
                };
                if *measure == Measure::ChiSquare {
                    // the raw statistic grows with the mass
                    close("chi2(c m) = c chi2(m)", b, c * a, 1e-9 * c * a.max(1.0))?;
                } else {
                    close(&format!("{measure} class {class:?} at c = {c}"), b, a, 1e-9)?;
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} scaled values unchanged to 1e-9 (chi-square scales linearly)"))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<Criterion> = vec![
        ("1 hand-oracle values", Box::new(c1_hand_oracles)),
        ("2 functional identities", Box::new(c2_identities)),
        ("3 pointwise mean chain", Box::new(c3_mean_chain)),
        ("4 ranking equivalences", Box::new(c4_ranking_equivalences)),
        ("5 harmonic/arithmetic witness", Box::new(c5_probe_witness)),
        ("6 association paradox", Box::new(c6_association_paradox)),
        ("7 GTI constraints and recovery", Box::new(c7_gti)),
        ("8 one-vs-rest consistency", Box::new(c8_one_vs_rest)),
        ("9 determinism", Box::new(|| c9_determinism(dir.path()))),
        ("10 scale invariance", Box::new(c10_scale_invariance)),
    ];
    let mut failed = 0;
    for (name, criterion) in &criteria {
        let start = Instant::now();
        let outcome = criterion();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{secs:.2}s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} [{secs:.2}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
