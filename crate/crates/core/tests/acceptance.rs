//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lxcim_core::lxc::{check_categorical_lxc_invariance, f1_score, matthews_correlation};
use lxcim_core::verify::{
    brute_auroc, brute_lxcim, convergence_study, generate, verify_crossing_point,
    verify_doubling_identity, GeneratorConfig, GeneratorKind, WeightMode,
};
use lxcim_core::{
    accuracy, accuracy_rate_curve, audrc, auroc, check_rank_lxc_invariance, cumulative_accuracy_slopes,
    duplicate_dataset, exchange_subset, lxcim, ConfusionMatrix, Dataset, Error, ExchangeMask,
    SymmetricSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{d0, mixed_datasets, D0_CSV};

const SPEC: SymmetricSpec = SymmetricSpec::DEFAULT;
const DATASETS: u64 = 200;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn within(elapsed: Duration, limit_secs: f64, what: &str) -> Result<(), String> {
    if elapsed.as_secs_f64() < limit_secs {
        Ok(())
    } else {
        Err(format!("{what} took {:.2}s, limit {limit_secs}s", elapsed.as_secs_f64()))
    }
}

fn c1_rank_invariance() -> Check {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (seed, d) in mixed_datasets(DATASETS).enumerate() {
        let lx = check_rank_lxc_invariance(|x| lxcim(x, &SPEC), &d, &SPEC, 20, seed as u64).map_err(|e| e.to_string())?;
        let au = check_rank_lxc_invariance(|x| audrc(x, &SPEC), &d, &SPEC, 20, seed as u64).map_err(|e| e.to_string())?;
        worst = worst.max(lx.max_deviation).max(au.max_deviation);
    }
    within(start.elapsed(), 10.0, "invariance sweep")?;
    if worst <= 1e-9 {
        Ok(format!("max deviation {worst:e} over {DATASETS} datasets x 20 masks"))
    } else {
        Err(format!("max deviation {worst:e}"))
    }
}

fn c2_doubling() -> Check {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for d in mixed_datasets(DATASETS) {
        let omega = duplicate_dataset(&d, &SPEC).map_err(|e| e.to_string())?;
        let a = auroc(&omega).map_err(|e| e.to_string())?;
        let l = lxcim(&d, &SPEC).map_err(|e| e.to_string())?;
        worst = worst.max((a - l).abs());
    }
    within(start.elapsed(), 5.0, "doubling sweep")?;
    if worst <= 1e-9 {
        Ok(format!("max |auroc(dup) - lxcim| {worst:e}"))
    } else {
        Err(format!("max |auroc(dup) - lxcim| {worst:e}"))
    }
}

fn c3_crossing() -> Check {
    let mut worst: f64 = 0.0;
    for d in mixed_datasets(DATASETS) {
        let r = verify_crossing_point(&d, &SPEC).map_err(|e| e.to_string())?;
        worst = worst.max(r.error);
    }
    if worst <= 1e-9 {
        Ok(format!("max crossing error {worst:e}"))
    } else {
        Err(format!("max crossing error {worst:e}"))
    }
}

fn c4_decomposition() -> Check {
    let mut worst: f64 = 0.0;
    for d in mixed_datasets(DATASETS) {
        let r = verify_doubling_identity(&d, &SPEC).map_err(|e| e.to_string())?;
        worst = worst.max(r.decomposition_error);
    }
    if worst <= 1e-9 {
        Ok(format!("max |auroc(dup) - (acc^2 + 2H)| {worst:e}"))
    } else {
        Err(format!("max |auroc(dup) - (acc^2 + 2H)| {worst:e}"))
    }
}

fn auroc_agreement(d: &Dataset) -> Result<f64, String> {
    match (auroc(d), brute_auroc(d)) {
        (Ok(a), Ok(b)) => Ok((a - b).abs()),
        (Err(Error::SingleClass), Err(Error::SingleClass)) => Ok(0.0),
        (a, b) => Err(format!("sweep {a:?} vs brute {b:?}")),
    }
}

fn c5_oracles() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut auroc_worst: f64 = 0.0;
    let mut exhaustive = 0;
    for n in 1..=10usize {
        let mut scores: Vec<f64> = (1..=n).map(|k| k as f64 - 0.5 * n as f64 - 0.25).collect();
        for k in (1..n).rev() {
            scores.swap(k, rng.random_range(0..=k));
        }
        let weights: Vec<f64> = (0..n).map(|_| 2.0 * (1.0 - rng.random::<f64>())).collect();
        for pattern in 0u32..(1 << n) {
            let labels: Vec<u8> = (0..n).map(|k| ((pattern >> k) & 1) as u8).collect();
            for w in [None, Some(weights.as_slice())] {
                let d = Dataset::from_parts(&scores, &labels, w).map_err(|e| e.to_string())?;
                auroc_worst = auroc_worst.max(auroc_agreement(&d)?);
                exhaustive += 1;
            }
        }
    }
    let tied: Vec<Dataset> = (0..50).map(|k| common::mixed_dataset(2 * k + 1)).collect();
    for d in &tied {
        auroc_worst = auroc_worst.max(auroc_agreement(d)?);
    }
    let mut lxcim_worst: f64 = 0.0;
    for d in mixed_datasets(DATASETS) {
        let a = lxcim(&d, &SPEC).map_err(|e| e.to_string())?;
        let b = brute_lxcim(&d, &SPEC).map_err(|e| e.to_string())?;
        lxcim_worst = lxcim_worst.max((a - b).abs());
    }
    within(start.elapsed(), 30.0, "oracle sweep")?;
    let detail = format!(
        "auroc vs pairwise {auroc_worst:e} ({exhaustive} exhaustive + 50 tied), lxcim vs quadrature {lxcim_worst:e}"
    );
    if auroc_worst <= 1e-12 && lxcim_worst <= 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn all_four(d: &Dataset) -> Result<[f64; 4], String> {
    let e = |r: lxcim_core::Result<f64>| r.map_err(|e| e.to_string());
    Ok([
        e(lxcim(d, &SPEC))?,
        e(audrc(d, &SPEC))?,
        e(auroc(d))?,
        e(accuracy(d, &SPEC))?,
    ])
}

fn mean_lxcim(kind: GeneratorKind, n: usize, count: u64) -> Result<f64, String> {
    let mut total = 0.0;
    for seed in 0..count {
        let d = generate(&GeneratorConfig::new(kind, n, seed)).map_err(|e| e.to_string())?;
        total += lxcim(&d, &SPEC).map_err(|e| e.to_string())?;
    }
    Ok(total / count as f64)
}

fn c6_scale_anchors() -> Check {
    for mode in [WeightMode::Uniform, WeightMode::RandomPositive] {
        for seed in 0..10 {
            let ideal = generate(&GeneratorConfig::new(GeneratorKind::Ideal, 1000, seed).with_weights(mode))
                .map_err(|e| e.to_string())?;
            if all_four(&ideal)? != [1.0; 4] {
                return Err(format!("ideal gave {:?}", all_four(&ideal)?));
            }
            let adversarial =
                generate(&GeneratorConfig::new(GeneratorKind::Adversarial, 1000, seed).with_weights(mode))
                    .map_err(|e| e.to_string())?;
            if all_four(&adversarial)? != [0.0; 4] {
                return Err(format!("adversarial gave {:?}", all_four(&adversarial)?));
            }
        }
    }
    let random = mean_lxcim(GeneratorKind::Random, 1000, 1000)?;
    if !(0.49..=0.51).contains(&random) {
        return Err(format!("random mean lxcim {random}"));
    }
    let mut detail = format!("ideal 1, adversarial 0, random mean {random:.4}");
    for p in [0.6, 0.8] {
        let m = mean_lxcim(GeneratorKind::Biased(p), 1000, 200)?;
        if (m - p).abs() > 0.02 {
            return Err(format!("biased({p}) mean lxcim {m}"));
        }
        detail.push_str(&format!(", biased({p}) mean {m:.4}"));
    }
    Ok(detail)
}

fn run_check(metric: &str) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_lxcim"))
        .args(["check", "--input", D0_CSV, "--metric", metric, "--trials", "100", "--seed", "7"])
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned()))
}

fn c7_auroc_witness() -> Check {
    let d = d0();
    let exchanged = exchange_subset(&d, &ExchangeMask::new([2]), &SPEC).map_err(|e| e.to_string())?;
    let before = (auroc(&d).unwrap(), lxcim(&d, &SPEC).unwrap());
    let after = (auroc(&exchanged).unwrap(), lxcim(&exchanged, &SPEC).unwrap());
    if before != (0.75, 0.625) || after != (1.0, 0.625) {
        return Err(format!("(auroc, lxcim) {before:?} -> {after:?}"));
    }
    let (code, first) = run_check("auroc")?;
    let (code2, second) = run_check("auroc")?;
    if code != 1 || code2 != 1 || first != second || !first.contains("violation") {
        return Err(format!("check --metric auroc exited {code}/{code2}:\n{first}"));
    }
    let (code, _) = run_check("lxcim")?;
    if code != 0 {
        return Err(format!("check --metric lxcim exited {code}"));
    }
    let witness = first.lines().find(|l| l.contains("violation")).unwrap_or_default();
    Ok(format!("auroc 0.75 -> 1, lxcim 0.625 kept; cli: {witness}"))
}

fn c8_smoothness_surrogate() -> Check {
    for seed in 0..DATASETS {
        let kind = match seed % 3 {
            0 => GeneratorKind::Random,
            1 => GeneratorKind::Biased(0.8),
            _ => GeneratorKind::Biased(0.3),
        };
        let n = 1 + (seed as usize * 37) % 256;
        let d = generate(&GeneratorConfig::new(kind, n, seed).with_weights(WeightMode::RandomPositive))
            .map_err(|e| e.to_string())?;
        let first = accuracy_rate_curve(&d, &SPEC).map_err(|e| e.to_string())?.points[0].1;
        if first != 0.0 && first != 1.0 {
            return Err(format!("first accuracy point {first} for seed {seed}"));
        }
    }
    for d in mixed_datasets(DATASETS) {
        let slopes = cumulative_accuracy_slopes(&d, &SPEC).map_err(|e| e.to_string())?;
        if let Some(s) = slopes.into_iter().find(|s| !(0.0..=1.0).contains(s)) {
            return Err(format!("slope {s} outside [0,1]"));
        }
    }
    let table = convergence_study(GeneratorKind::Random, &[10, 100, 1000, 10_000], 100, 0)
        .map_err(|e| e.to_string())?;
    let devs: Vec<f64> = table.rows.iter().map(|r| r.mean_cumulative_deviation).collect();
    if !devs.windows(2).all(|w| w[1] < w[0]) {
        return Err(format!("mean sup|G - i/2| not decreasing: {devs:?}"));
    }
    let devs: Vec<String> = devs.iter().map(|v| format!("{v:.4}")).collect();
    Ok(format!("first point in {{0,1}}, slopes in [0,1], mean sup|G - i/2| {}", devs.join(" > ")))
}

fn c9_categorical() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 0..100 {
        let mut entry = || rng.random_range(0..=50) as f64;
        let cm = ConfusionMatrix::new(entry(), entry(), entry(), entry());
        let r = check_categorical_lxc_invariance(|m| m.accuracy(), &cm, 50, k);
        if !r.is_invariant() {
            return Err(format!("accuracy changed on {cm:?}: {:?}", r.witness));
        }
    }
    let cm = ConfusionMatrix::new(5.0, 3.0, 2.0, 4.0);
    let f1 = check_categorical_lxc_invariance(f1_score, &cm, 0, 0);
    let mcc = check_categorical_lxc_invariance(matthews_correlation, &cm, 0, 0);
    match (f1.witness, mcc.witness) {
        (Some(a), Some(b)) => Ok(format!(
            "accuracy invariant on 100 matrices; f1 witness ({}, {}), mcc witness ({}, {})",
            a.delta1, a.delta2, b.delta1, b.delta2
        )),
        _ => Err("f1 or mcc produced no witness on the integer grid".into()),
    }
}

fn eval_d0(output: &str) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_lxcim"))
        .args(["eval", "--input", D0_CSV, "--output", output])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("eval --output {output} failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn c10_cli() -> Check {
    let expected = [("accuracy", 0.5), ("lxcim", 0.625), ("auroc", 0.75), ("audrc", 0.6667)];
    let json: serde_json::Value = serde_json::from_str(&eval_d0("json")?).map_err(|e| e.to_string())?;
    let table = eval_d0("table")?;
    for (key, want) in expected {
        let got = json[key].as_f64().ok_or(format!("json lacks {key}"))?;
        if (got - want).abs() > 1e-4 {
            return Err(format!("json {key} = {got}"));
        }
        let row = table
            .lines()
            .find(|l| l.split_whitespace().next() == Some(key))
            .ok_or(format!("table lacks {key}"))?;
        let got: f64 = row.split_whitespace().nth(1).and_then(|v| v.parse().ok()).ok_or(format!("bad row {row}"))?;
        if (got - want).abs() > 1e-4 {
            return Err(format!("table {key} = {got}"));
        }
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (seed, d) in mixed_datasets(50).enumerate() {
        for format in [lxcim_core::io::Format::Csv, lxcim_core::io::Format::Jsonl] {
            let path = dir.path().join(format!("d{seed}.{format}"));
            let labels = lxcim_core::io::LabelNames::default();
            lxcim_core::io::write_dataset_file(&path, &d, format, &labels, true).map_err(|e| e.to_string())?;
            let back = lxcim_core::io::ingest(&path, format, &labels.positive, 0.0).map_err(|e| e.to_string())?;
            if back.dataset != d {
                return Err(format!("round trip changed dataset {seed} ({format})"));
            }
        }
    }
    Ok("d0 eval matches in table and json; csv and jsonl round trips exact".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("LxC-invariance of LxCIM and AUDRC", c1_rank_invariance),
        ("doubling identity", c2_doubling),
        ("crossing point of the duplicated ROC", c3_crossing),
        ("ACC^2 + 2H decomposition", c4_decomposition),
        ("oracle equivalence", c5_oracles),
        ("scale anchors", c6_scale_anchors),
        ("AUROC non-invariance witness", c7_auroc_witness),
        ("curve smoothness surrogate", c8_smoothness_surrogate),
        ("categorical checker", c9_categorical),
        ("CLI end to end", c10_cli),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = check();
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.2}s]", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.2}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
