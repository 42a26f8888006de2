//! Accuracy, AUROC, LxCIM and AUDRC, plus the curves they integrate.
//!
//! All rank-based quantities are built from tie groups of the
//! confidence-descending ranking. A group of total weight `W` whose correctly
//! predicted members weigh `Wc` is one linear piece of the cumulative
//! accuracy curve with slope `Wc / W`, which is the average over every
//! ordering of the group's members. Sums run in raw weight units and are
//! normalised once at the end, so uniform-weight inputs stay in exact
//! integer arithmetic.
//!
//! AUDRC is the per-sample Riemann sum of running accuracy. Its segment-exact
//! counterpart over one linear piece `[a, a + W]` starting at height `g` would
//! be `Wc + (g - a Wc / W) ln((a + W) / a)`; it is not used.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{rank_by_confidence, Dataset, DecisionSpec, Label, RankedView};

/// Weighted confusion counts.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_positive: f64,
    pub false_positive: f64,
    pub false_negative: f64,
    pub true_negative: f64,
}

impl ConfusionMatrix {
    pub fn new(tp: f64, fp: f64, fn_: f64, tn: f64) -> Self {
        Self {
            true_positive: tp,
            false_positive: fp,
            false_negative: fn_,
            true_negative: tn,
        }
    }

    /// Weight of correct decisions, `TP + TN`.
    pub fn correct(&self) -> f64 {
        self.true_positive + self.true_negative
    }

    /// Weight of incorrect decisions, `FP + FN`.
    pub fn incorrect(&self) -> f64 {
        self.false_positive + self.false_negative
    }

    pub fn total(&self) -> f64 {
        self.correct() + self.incorrect()
    }

    pub fn accuracy(&self) -> f64 {
        self.correct() / self.total()
    }

    pub fn min_entry(&self) -> f64 {
        self.true_positive
            .min(self.false_positive)
            .min(self.false_negative)
            .min(self.true_negative)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    /// TPR against FPR.
    Roc,
    /// Cumulative accuracy `G` against normalised decision rate.
    CumulativeAccuracy,
    /// Running accuracy `G(i) / i` against normalised decision rate.
    AccuracyRate,
}

/// A polyline with non-decreasing x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub kind: CurveKind,
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    /// Trapezoidal area under the polyline.
    pub fn area(&self) -> f64 {
        self.points
            .windows(2)
            .map(|p| (p[1].0 - p[0].0) * (p[0].1 + p[1].1) / 2.0)
            .sum()
    }

    /// Slope of each segment with non-zero width.
    pub fn slopes(&self) -> Vec<f64> {
        self.points
            .windows(2)
            .filter(|p| p[1].0 > p[0].0)
            .map(|p| (p[1].1 - p[0].1) / (p[1].0 - p[0].0))
            .collect()
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }
}

/// All four headline metrics for one dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub lxcim: f64,
    pub accuracy: f64,
    /// `None` when the dataset holds a single class.
    pub auroc: Option<f64>,
    pub audrc: f64,
    pub n: usize,
    pub total_weight: f64,
}

/// The rank-based metrics selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    Lxcim,
    Audrc,
    Auroc,
    Accuracy,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Lxcim, Metric::Audrc, Metric::Auroc, Metric::Accuracy];

    pub fn evaluate<S: DecisionSpec + ?Sized>(self, d: &Dataset, spec: &S) -> Result<f64> {
        match self {
            Metric::Lxcim => lxcim(d, spec),
            Metric::Audrc => audrc(d, spec),
            Metric::Auroc => auroc(d),
            Metric::Accuracy => accuracy(d, spec),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Lxcim => "lxcim",
            Metric::Audrc => "audrc",
            Metric::Auroc => "auroc",
            Metric::Accuracy => "accuracy",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lxcim" => Ok(Metric::Lxcim),
            "audrc" | "auacc" => Ok(Metric::Audrc),
            "auroc" | "auc" => Ok(Metric::Auroc),
            "accuracy" | "acc" => Ok(Metric::Accuracy),
            other => Err(format!("unknown metric `{other}`")),
        }
    }
}

pub fn confusion_matrix<S: DecisionSpec + ?Sized>(d: &Dataset, spec: &S) -> Result<ConfusionMatrix> {
    d.ensure_nonempty()?;
    let mut cm = ConfusionMatrix::default();
    for s in d {
        let w = s.weight();
        match (spec.predict(s.score()), s.label()) {
            (Label::Positive, Label::Positive) => cm.true_positive += w,
            (Label::Positive, Label::Negative) => cm.false_positive += w,
            (Label::Negative, Label::Positive) => cm.false_negative += w,
            (Label::Negative, Label::Negative) => cm.true_negative += w,
        }
    }
    Ok(cm)
}

/// Correct weight over total weight, summed in input order. Exchanging
/// samples leaves both sums bit-for-bit unchanged.
pub fn accuracy<S: DecisionSpec + ?Sized>(d: &Dataset, spec: &S) -> Result<f64> {
    d.ensure_nonempty()?;
    let (mut correct, mut total) = (0.0, 0.0);
    for s in d {
        if spec.predict(s.score()) == s.label() {
            correct += s.weight();
        }
        total += s.weight();
    }
    Ok(correct / total)
}

/// One tie group in raw weight units.
#[derive(Debug, Clone, Copy)]
struct Block {
    weight: f64,
    correct_weight: f64,
}

fn blocks(d: &Dataset, view: &RankedView) -> Vec<Block> {
    let samples = d.samples();
    view.tie_groups
        .iter()
        .map(|g| {
            let mut block = Block {
                weight: 0.0,
                correct_weight: 0.0,
            };
            for &i in &view.order[g.clone()] {
                let w = samples[i].weight();
                block.weight += w;
                if view.correct[i] {
                    block.correct_weight += w;
                }
            }
            block
        })
        .collect()
}

fn cumulative_accuracy_from_view(d: &Dataset, view: &RankedView) -> Curve {
    let blocks = blocks(d, view);
    let total: f64 = blocks.iter().map(|b| b.weight).sum();
    let mut points = Vec::with_capacity(blocks.len() + 1);
    points.push((0.0, 0.0));
    let (mut a, mut g) = (0.0, 0.0);
    for b in &blocks {
        a += b.weight;
        g += b.correct_weight;
        points.push((a / total, g / total));
    }
    Curve {
        kind: CurveKind::CumulativeAccuracy,
        points,
    }
}

/// Cumulative accuracy `G` against decision rate, weights normalised to sum 1.
pub fn cumulative_accuracy_curve<S: DecisionSpec + ?Sized>(d: &Dataset, spec: &S) -> Result<Curve> {
    let view = rank_by_confidence(d, spec)?;
    Ok(cumulative_accuracy_from_view(d, &view))
}

fn lxcim_from_view(d: &Dataset, view: &RankedView) -> f64 {
    // Areas under G and under its complement B = i - G. They sum to 1/2 in
    // normalized units, so their ratio is twice the area under G, and it is
    // exactly 1 or 0 when no weight, or all weight, is wrong.
    let (mut right, mut wrong) = (0.0, 0.0);
    let (mut g, mut b) = (0.0, 0.0);
    for block in blocks(d, view) {
        let bad = block.weight - block.correct_weight;
        right += g * block.weight + block.correct_weight * block.weight / 2.0;
        wrong += b * block.weight + bad * block.weight / 2.0;
        g += block.correct_weight;
        b += bad;
    }
    (right / (right + wrong)).clamp(0.0, 1.0)
}

/// Twice the exact area under the cumulative accuracy curve.
pub fn lxcim<S: DecisionSpec + ?Sized>(d: &Dataset, spec: &S) -> Result<f64> {
    let view = rank_by_confidence(d, spec)?;
    Ok(lxcim_from_view(d, &view))
}

/// Slope `Wc / W` of each tie group's piece of the cumulative accuracy curve,
/// in rank order. Unlike differencing the curve points this stays in `[0, 1]`.
pub fn cumulative_accuracy_slopes<S: DecisionSpec + ?Sized>(d: &Dataset, spec: &S) -> Result<Vec<f64>> {
    let view = rank_by_confidence(d, spec)?;
    Ok(blocks(d, &view)
        .iter()
        .map(|b| b.correct_weight / b.weight)
        .collect())
}

fn accuracy_rate_from_view(d: &Dataset, view: &RankedView) -> Curve {
    let blocks = blocks(d, view);
    let total: f64 = blocks.iter().map(|b| b.weight).sum();
    let (mut a, mut g) = (0.0, 0.0);
    let points = blocks
        .iter()
        .map(|b| {
            a += b.weight;
            g += b.correct_weight;
            (a / total, g / a)
        })
        .collect();
    Curve {
        kind: CurveKind::AccuracyRate,
        points,
    }
}

/// Running accuracy sampled at each tie-group boundary. There is no point at
/// rate 0, where running accuracy is undefined.
pub fn accuracy_rate_curve<S: DecisionSpec + ?Sized>(d: &Dataset, spec: &S) -> Result<Curve> {
    let view = rank_by_confidence(d, spec)?;
    Ok(accuracy_rate_from_view(d, &view))
}

fn audrc_from_view(d: &Dataset, view: &RankedView) -> f64 {
    let samples = d.samples();
    let (mut a, mut g) = (0.0, 0.0);
    let mut sum = 0.0;
    for (group, b) in view.tie_groups.iter().zip(blocks(d, view)) {
        let slope = b.correct_weight / b.weight;
        let mut r = 0.0;
        for &i in &view.order[group.clone()] {
            let w = samples[i].weight();
            r += w;
            sum += w * (g + slope * r) / (a + r);
        }
        a += b.weight;
        g += b.correct_weight;
    }
    (sum / a).clamp(0.0, 1.0)
}

/// Area under the accuracy/decision-rate curve as the weighted Riemann sum of
/// running accuracy at each sample. Inside a tie group running accuracy is read
/// off the group's linear piece, which equals the average over member
/// orderings when the members share one weight.
pub fn audrc<S: DecisionSpec + ?Sized>(d: &Dataset, spec: &S) -> Result<f64> {
    let view = rank_by_confidence(d, spec)?;
    Ok(audrc_from_view(d, &view))
}

/// Score-descending groups of (positive weight, negative weight).
fn score_groups(d: &Dataset) -> Result<Vec<(f64, f64)>> {
    d.ensure_nonempty()?;
    if !d.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let samples = d.samples();
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[b].score().total_cmp(&samples[a].score()));

    let mut groups: Vec<(f64, f64)> = Vec::new();
    let mut last: Option<f64> = None;
    for &i in &order {
        let s = &samples[i];
        if last != Some(s.score()) {
            groups.push((0.0, 0.0));
            last = Some(s.score());
        }
        let g = groups.last_mut().expect("group pushed above");
        match s.label() {
            Label::Positive => g.0 += s.weight(),
            Label::Negative => g.1 += s.weight(),
        }
    }
    Ok(groups)
}

/// ROC polyline from a descending threshold sweep. Tied scores move TPR and
/// FPR together along one diagonal segment.
pub fn roc_curve(d: &Dataset) -> Result<Curve> {
    let groups = score_groups(d)?;
    let (pos, neg) = groups
        .iter()
        .fold((0.0, 0.0), |(p, n), g| (p + g.0, n + g.1));
    let mut points = Vec::with_capacity(groups.len() + 1);
    points.push((0.0, 0.0));
    let (mut tp, mut fp) = (0.0, 0.0);
    for (pw, nw) in groups {
        tp += pw;
        fp += nw;
        points.push((fp / neg, tp / pos));
    }
    Ok(Curve {
        kind: CurveKind::Roc,
        points,
    })
}

/// Exact trapezoidal area under [`roc_curve`]; ties earn half credit.
pub fn auroc(d: &Dataset) -> Result<f64> {
    let groups = score_groups(d)?;
    // Concordant and discordant pair weight, ties split evenly. Their sum is
    // P * N; the ratio keeps perfect and inverted rankings exact.
    let (mut tp, mut fp) = (0.0, 0.0);
    let (mut concordant, mut discordant) = (0.0, 0.0);
    for (pw, nw) in groups {
        concordant += nw * (tp + pw / 2.0);
        discordant += pw * (fp + nw / 2.0);
        tp += pw;
        fp += nw;
    }
    Ok((concordant / (concordant + discordant)).clamp(0.0, 1.0))
}

pub fn report<S: DecisionSpec + ?Sized>(d: &Dataset, spec: &S) -> Result<MetricsReport> {
    let view = rank_by_confidence(d, spec)?;
    let auroc = match auroc(d) {
        Ok(v) => Some(v),
        Err(Error::SingleClass) => None,
        Err(e) => return Err(e),
    };
    Ok(MetricsReport {
        lxcim: lxcim_from_view(d, &view),
        accuracy: accuracy(d, spec)?,
        auroc,
        audrc: audrc_from_view(d, &view),
        n: d.len(),
        total_weight: d.total_weight(),
    })
}

/// The three curve families for one dataset; ROC is `None` on single-class data.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSet {
    pub cumulative_accuracy: Curve,
    pub accuracy_rate: Curve,
    pub roc: Option<Curve>,
}

pub fn curves<S: DecisionSpec + ?Sized>(d: &Dataset, spec: &S) -> Result<CurveSet> {
    let view = rank_by_confidence(d, spec)?;
    let roc = match roc_curve(d) {
        Ok(c) => Some(c),
        Err(Error::SingleClass) => None,
        Err(e) => return Err(e),
    };
    Ok(CurveSet {
        cumulative_accuracy: cumulative_accuracy_from_view(d, &view),
        accuracy_rate: accuracy_rate_from_view(d, &view),
        roc,
    })
}
