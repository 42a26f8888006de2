//! Independent oracles, identity verifiers and synthetic datasets.
//!
//! The oracles here share no code with the metric implementations they check:
//! [`brute_auroc`] enumerates every positive/negative pair and
//! [`brute_lxcim`] integrates the cumulative accuracy curve numerically,
//! evaluating it sample by sample.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lxc::duplicate_dataset;
use crate::metrics::{
    accuracy, accuracy_rate_curve, auroc, audrc, cumulative_accuracy_curve, lxcim, roc_curve, Curve,
};
use crate::model::{Dataset, DecisionSpec, Label, Sample, SymmetricSpec};

/// Tolerance for the analytic identities on the duplicated dataset.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// Midpoints used by [`brute_lxcim`].
pub const QUADRATURE_POINTS: usize = 200_000;

/// Weighted Mann-Whitney statistic by pair enumeration, ties earning half.
pub fn brute_auroc(d: &Dataset) -> Result<f64> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let positives: Vec<&Sample> = d.iter().filter(|s| s.label() == Label::Positive).collect();
    let negatives: Vec<&Sample> = d.iter().filter(|s| s.label() == Label::Negative).collect();
    if positives.is_empty() || negatives.is_empty() {
        return Err(Error::SingleClass);
    }
    let mut concordant = 0.0;
    let mut pos_weight = 0.0;
    let mut neg_weight = 0.0;
    for n in &negatives {
        neg_weight += n.weight();
    }
    for p in &positives {
        pos_weight += p.weight();
        for n in &negatives {
            let credit = if p.score() > n.score() {
                1.0
            } else if p.score() == n.score() {
                0.5
            } else {
                0.0
            };
            concordant += p.weight() * n.weight() * credit;
        }
    }
    Ok(concordant / (pos_weight * neg_weight))
}

/// Midpoint quadrature of `2 * integral of G` over the unit decision rate.
///
/// `G` at rate `t` is evaluated directly from the ranked samples: all fully
/// covered confidence levels contribute their correct weight, and the level
/// straddling `t` contributes its correct fraction times the covered part.
pub fn brute_lxcim<S: DecisionSpec + ?Sized>(d: &Dataset, spec: &S) -> Result<f64> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    // Aggregate (confidence, weight, correct weight) per distinct confidence.
    let mut rows: Vec<(f64, f64, f64)> = d
        .iter()
        .map(|s| {
            let ok = spec.predict(s.score()) == s.label();
            (spec.confidence(s.score()), s.weight(), if ok { s.weight() } else { 0.0 })
        })
        .collect();
    rows.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut levels: Vec<(f64, f64, f64)> = Vec::new();
    for (c, w, wc) in rows {
        match levels.last_mut() {
            Some(last) if last.0 == c => {
                last.1 += w;
                last.2 += wc;
            }
            _ => levels.push((c, w, wc)),
        }
    }
    let total: f64 = levels.iter().map(|l| l.1).sum();

    let h = 1.0 / QUADRATURE_POINTS as f64;
    let mut level = 0;
    let mut covered = 0.0; // normalised weight of levels before `level`
    let mut covered_correct = 0.0;
    let mut integral = 0.0;
    for k in 0..QUADRATURE_POINTS {
        let t = (k as f64 + 0.5) * h;
        while level < levels.len() - 1 && covered + levels[level].1 / total <= t {
            covered += levels[level].1 / total;
            covered_correct += levels[level].2 / total;
            level += 1;
        }
        let (_, w, wc) = levels[level];
        let partial = (t - covered).clamp(0.0, w / total);
        integral += covered_correct + partial * wc / w;
    }
    Ok(2.0 * integral * h)
}

/// Polyline area for `x` in `[0, x_max]`.
fn area_left_of(points: &[(f64, f64)], x_max: f64) -> f64 {
    let mut area = 0.0;
    for seg in points.windows(2) {
        let ((x0, y0), (x1, y1)) = (seg[0], seg[1]);
        if x0 >= x_max {
            break;
        }
        if x1 <= x_max {
            area += (x1 - x0) * (y0 + y1) / 2.0;
        } else {
            let y = y0 + (y1 - y0) * (x_max - x0) / (x1 - x0);
            area += (x_max - x0) * (y0 + y) / 2.0;
        }
    }
    area
}

/// Where a monotone polyline from (0,0) to (1,1) meets `x + y = 1`.
fn anti_diagonal_crossing(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    for seg in points.windows(2) {
        let ((x0, y0), (x1, y1)) = (seg[0], seg[1]);
        let f0 = x0 + y0 - 1.0;
        let f1 = x1 + y1 - 1.0;
        if f0 == 0.0 {
            return Some((x0, y0));
        }
        if f0 < 0.0 && f1 >= 0.0 {
            let t = -f0 / (f1 - f0);
            return Some((x0 + t * (x1 - x0), y0 + t * (y1 - y0)));
        }
    }
    None
}

fn ensure_off_threshold<S: DecisionSpec + ?Sized>(d: &Dataset, spec: &S) -> Result<()> {
    match d.iter().position(|s| s.score() == spec.s_star()) {
        Some(index) => Err(Error::SampleAtThreshold { index }),
        None => Ok(()),
    }
}

/// Both sides of `AUROC(Ω) = ACC² + 2H = LxCIM`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublingReport {
    pub accuracy: f64,
    /// Area under ROC(Ω) left of `FPR = 1 - ACC`.
    pub h: f64,
    pub auroc_duplicated: f64,
    pub lxcim: f64,
    /// `|AUROC(Ω) - (ACC² + 2H)|`.
    pub decomposition_error: f64,
    /// `|LxCIM - AUROC(Ω)|`.
    pub doubling_error: f64,
}

impl DoublingReport {
    pub fn holds(&self) -> bool {
        self.decomposition_error <= IDENTITY_TOLERANCE && self.doubling_error <= IDENTITY_TOLERANCE
    }
}

pub fn verify_doubling_identity<S: DecisionSpec + ?Sized>(
    d: &Dataset,
    spec: &S,
) -> Result<DoublingReport> {
    ensure_off_threshold(d, spec)?;
    let omega = duplicate_dataset(d, spec)?;
    let acc = accuracy(d, spec)?;
    let roc = roc_curve(&omega)?;
    let h = area_left_of(&roc.points, 1.0 - acc);
    let auroc_duplicated = auroc(&omega)?;
    let lx = lxcim(d, spec)?;
    Ok(DoublingReport {
        accuracy: acc,
        h,
        auroc_duplicated,
        lxcim: lx,
        decomposition_error: (auroc_duplicated - (acc * acc + 2.0 * h)).abs(),
        doubling_error: (lx - auroc_duplicated).abs(),
    })
}

/// Where ROC(Ω) meets the anti-diagonal, against `(1 - ACC, ACC)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub expected: (f64, f64),
    pub found: (f64, f64),
    /// Larger of the two coordinate errors.
    pub error: f64,
}

impl CrossingReport {
    pub fn holds(&self) -> bool {
        self.error <= IDENTITY_TOLERANCE
    }
}

pub fn verify_crossing_point<S: DecisionSpec + ?Sized>(
    d: &Dataset,
    spec: &S,
) -> Result<CrossingReport> {
    ensure_off_threshold(d, spec)?;
    let omega = duplicate_dataset(d, spec)?;
    let acc = accuracy(d, spec)?;
    let roc = roc_curve(&omega)?;
    let found = anti_diagonal_crossing(&roc.points).expect("ROC runs from (0,0) to (1,1)");
    let expected = (1.0 - acc, acc);
    Ok(CrossingReport {
        expected,
        found,
        error: (found.0 - expected.0).abs().max((found.1 - expected.1).abs()),
    })
}

/// How synthetic labels relate to predictions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GeneratorKind {
    /// Labels are fair coins.
    Random,
    /// Every prediction correct.
    Ideal,
    /// Every prediction wrong.
    Adversarial,
    /// Each prediction correct with probability `p`, whatever its confidence.
    Biased(f64),
}

impl GeneratorKind {
    /// Probability that a generated sample is predicted correctly.
    pub fn expected_accuracy(self) -> f64 {
        match self {
            GeneratorKind::Random => 0.5,
            GeneratorKind::Ideal => 1.0,
            GeneratorKind::Adversarial => 0.0,
            GeneratorKind::Biased(p) => p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum WeightMode {
    #[default]
    Uniform,
    /// Independent weights uniform in (0, 2].
    RandomPositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub kind: GeneratorKind,
    pub n: usize,
    pub seed: u64,
    pub weight_mode: WeightMode,
}

impl GeneratorConfig {
    pub fn new(kind: GeneratorKind, n: usize, seed: u64) -> Self {
        Self {
            kind,
            n,
            seed,
            weight_mode: WeightMode::Uniform,
        }
    }

    pub fn with_weights(mut self, weight_mode: WeightMode) -> Self {
        self.weight_mode = weight_mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        if let GeneratorKind::Biased(p) = self.kind {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!("p must lie in [0, 1], got {p}")));
            }
        }
        Ok(())
    }
}

/// Scores uniform in `[-1, 1]` without 0, thresholded at 0. Deterministic per seed.
pub fn generate(cfg: &GeneratorConfig) -> Result<Dataset> {
    cfg.validate()?;
    let spec = SymmetricSpec::DEFAULT;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut samples = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let score = loop {
            let s: f64 = rng.random_range(-1.0..=1.0);
            if s != 0.0 {
                break s;
            }
        };
        let predicted = spec.predict(score);
        let label = match cfg.kind {
            GeneratorKind::Random => Label::from(rng.random::<bool>()),
            GeneratorKind::Ideal => predicted,
            GeneratorKind::Adversarial => predicted.flip(),
            GeneratorKind::Biased(p) => {
                if rng.random_bool(p) {
                    predicted
                } else {
                    predicted.flip()
                }
            }
        };
        let weight = match cfg.weight_mode {
            WeightMode::Uniform => 1.0,
            WeightMode::RandomPositive => 2.0 * (1.0 - rng.random::<f64>()),
        };
        samples.push(Sample::new(score, label, weight)?);
    }
    Ok(Dataset::new(samples))
}

/// Largest `|G(i) - slope * i|` over the breakpoints of a cumulative curve.
pub fn max_deviation_from_line(curve: &Curve, slope: f64) -> f64 {
    curve
        .points
        .iter()
        .map(|&(x, y)| (y - slope * x).abs())
        .fold(0.0, f64::max)
}

/// Largest `|acc(i) - level|` over accuracy-rate points with `i <= window`.
/// The first point always counts.
pub fn early_deviation(curve: &Curve, level: f64, window: f64) -> f64 {
    curve
        .points
        .iter()
        .enumerate()
        .take_while(|(k, p)| *k == 0 || p.0 <= window)
        .map(|(_, p)| (p.1 - level).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub n: usize,
    pub seeds: usize,
    /// Mean over seeds of `sup |G(i) - p i|`.
    pub mean_cumulative_deviation: f64,
    /// Mean over seeds of `sup |acc(i) - p|` over the first 10% of decision rates.
    pub mean_early_accuracy_deviation: f64,
    pub mean_lxcim: f64,
    pub mean_audrc: f64,
    /// Cumulative accuracy curve of the first seed.
    pub cumulative_curve: Curve,
    /// Accuracy-rate curve of the first seed.
    pub accuracy_curve: Curve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyTable {
    pub kind: GeneratorKind,
    pub rows: Vec<StudyRow>,
}

/// Fraction of decision rates treated as "early" by the study.
pub const EARLY_WINDOW: f64 = 0.1;

/// Runs `seeds` datasets per size and averages the smoothness statistics.
/// `p` is the expected accuracy of `kind` (1/2 for random labels). Seed `k`
/// of every size is `base_seed + k`.
pub fn convergence_study(
    kind: GeneratorKind,
    sizes: &[usize],
    seeds: usize,
    base_seed: u64,
) -> Result<StudyTable> {
    if seeds == 0 {
        return Err(Error::NoTrials);
    }
    let spec = SymmetricSpec::DEFAULT;
    let level = kind.expected_accuracy();
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mut cum_dev = 0.0;
        let mut early_dev = 0.0;
        let mut lx = 0.0;
        let mut au = 0.0;
        let mut first = None;
        for k in 0..seeds {
            let d = generate(&GeneratorConfig::new(kind, n, base_seed.wrapping_add(k as u64)))?;
            let g = cumulative_accuracy_curve(&d, &spec)?;
            let acc = accuracy_rate_curve(&d, &spec)?;
            cum_dev += max_deviation_from_line(&g, level);
            early_dev += early_deviation(&acc, level, EARLY_WINDOW);
            lx += lxcim(&d, &spec)?;
            au += audrc(&d, &spec)?;
            if first.is_none() {
                first = Some((g, acc));
            }
        }
        let s = seeds as f64;
        let (cumulative_curve, accuracy_curve) = first.expect("seeds >= 1");
        rows.push(StudyRow {
            n,
            seeds,
            mean_cumulative_deviation: cum_dev / s,
            mean_early_accuracy_deviation: early_dev / s,
            mean_lxcim: lx / s,
            mean_audrc: au / s,
            cumulative_curve,
            accuracy_curve,
        });
    }
    Ok(StudyTable { kind, rows })
}
