//! Samples, datasets, decision functions and confidence ranking.
//!
//! A scoring model emits one real score per sample. A [`DecisionSpec`] turns
//! that score into a hard prediction (positive iff the score exceeds the
//! threshold `s_star`) and into a confidence level which is zero at the
//! threshold and grows in both directions away from it. Every metric in this
//! crate consumes the confidence-descending [`RankedView`] built here.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn flip(self) -> Self {
        match self {
            Label::Negative => Label::Positive,
            Label::Positive => Label::Negative,
        }
    }

    pub fn as_bit(self) -> u8 {
        match self {
            Label::Negative => 0,
            Label::Positive => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Option<Self> {
        match bit {
            0 => Some(Label::Negative),
            1 => Some(Label::Positive),
            _ => None,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

impl From<bool> for Label {
    fn from(positive: bool) -> Self {
        if positive {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

/// One prediction: a finite score, its true label and a strictly positive weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    score: f64,
    label: Label,
    weight: f64,
}

impl Sample {
    pub fn new(score: f64, label: Label, weight: f64) -> Result<Self> {
        if !score.is_finite() {
            return Err(Error::NonFiniteScore(score));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::InvalidWeight(weight));
        }
        Ok(Self {
            score,
            label,
            weight,
        })
    }

    /// Unit-weight sample.
    pub fn unit(score: f64, label: Label) -> Result<Self> {
        Self::new(score, label, 1.0)
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

/// An ordered collection of samples.
///
/// Construction only validates the samples themselves; emptiness is reported
/// by the metrics that need at least one sample.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>) -> Self {
        Self { samples }
    }

    /// Builds a dataset from parallel score/label/weight slices. Labels are
    /// 0 or 1; `weights = None` gives every sample weight 1.
    pub fn from_parts(scores: &[f64], labels: &[u8], weights: Option<&[f64]>) -> Result<Self> {
        assert_eq!(scores.len(), labels.len(), "scores and labels differ in length");
        if let Some(w) = weights {
            assert_eq!(scores.len(), w.len(), "scores and weights differ in length");
        }
        let samples = scores
            .iter()
            .zip(labels)
            .enumerate()
            .map(|(i, (&s, &y))| {
                let label = Label::from_bit(y).unwrap_or_else(|| panic!("label {y} is not 0 or 1"));
                let w = weights.map_or(1.0, |w| w[i]);
                Sample::new(s, label, w)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sample> {
        self.samples.iter()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.samples.iter().map(Sample::weight).sum()
    }

    /// Total weight of positive and negative samples, in that order.
    pub fn class_weights(&self) -> (f64, f64) {
        self.samples.iter().fold((0.0, 0.0), |(p, n), s| match s.label {
            Label::Positive => (p + s.weight, n),
            Label::Negative => (p, n + s.weight),
        })
    }

    pub fn has_both_classes(&self) -> bool {
        let mut pos = false;
        let mut neg = false;
        for s in &self.samples {
            match s.label {
                Label::Positive => pos = true,
                Label::Negative => neg = true,
            }
        }
        pos && neg
    }

    pub(crate) fn ensure_nonempty(&self) -> Result<()> {
        if self.samples.is_empty() {
            Err(Error::EmptyDataset)
        } else {
            Ok(())
        }
    }

    pub fn into_samples(self) -> Vec<Sample> {
        self.samples
    }
}

impl FromIterator<Sample> for Dataset {
    fn from_iter<I: IntoIterator<Item = Sample>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a Sample;
    type IntoIter = std::slice::Iter<'a, Sample>;

    fn into_iter(self) -> Self::IntoIter {
        self.samples.iter()
    }
}

/// A decision function: a threshold, a confidence map with its unique
/// minimum at the threshold, and the reflection that maps a score to the
/// other score of equal confidence.
pub trait DecisionSpec {
    fn s_star(&self) -> f64;

    fn confidence(&self, score: f64) -> f64;

    fn reflect(&self, score: f64) -> f64;

    /// Positive iff `score > s_star`; the threshold itself predicts negative.
    fn predict(&self, score: f64) -> Label {
        Label::from(score > self.s_star())
    }
}

impl<T: DecisionSpec + ?Sized> DecisionSpec for &T {
    fn s_star(&self) -> f64 {
        (**self).s_star()
    }

    fn confidence(&self, score: f64) -> f64 {
        (**self).confidence(score)
    }

    fn reflect(&self, score: f64) -> f64 {
        (**self).reflect(score)
    }
}

pub fn predict<S: DecisionSpec + ?Sized>(score: f64, spec: &S) -> Label {
    spec.predict(score)
}

/// `confidence(s) = |s - s_star|`, `reflect(s) = 2 s_star - s`.
///
/// Any bi-monotonic decision function can be remapped onto this one, so it
/// is the only built-in spec. With `s_star = 0` the reflection is an exact
/// negation and confidences of reflected scores match bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricSpec {
    s_star: f64,
}

impl SymmetricSpec {
    /// Threshold at zero.
    pub const DEFAULT: Self = Self { s_star: 0.0 };

    pub fn new(s_star: f64) -> Self {
        assert!(s_star.is_finite(), "decision threshold must be finite");
        Self { s_star }
    }
}

impl Default for SymmetricSpec {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl DecisionSpec for SymmetricSpec {
    fn s_star(&self) -> f64 {
        self.s_star
    }

    fn confidence(&self, score: f64) -> f64 {
        (score - self.s_star).abs()
    }

    fn reflect(&self, score: f64) -> f64 {
        if self.s_star == 0.0 {
            -score
        } else {
            2.0 * self.s_star - score
        }
    }
}

pub fn make_abs_spec(s_star: f64) -> SymmetricSpec {
    SymmetricSpec::new(s_star)
}

/// A decision spec assembled from user closures. Check it with
/// [`validate_decision_spec`] before trusting any metric computed with it.
#[derive(Clone)]
pub struct FnSpec<C, R> {
    s_star: f64,
    confidence: C,
    reflect: R,
}

impl<C, R> FnSpec<C, R>
where
    C: Fn(f64) -> f64,
    R: Fn(f64) -> f64,
{
    pub fn new(s_star: f64, confidence: C, reflect: R) -> Self {
        Self {
            s_star,
            confidence,
            reflect,
        }
    }
}

impl<C, R> DecisionSpec for FnSpec<C, R>
where
    C: Fn(f64) -> f64,
    R: Fn(f64) -> f64,
{
    fn s_star(&self) -> f64 {
        self.s_star
    }

    fn confidence(&self, score: f64) -> f64 {
        (self.confidence)(score)
    }

    fn reflect(&self, score: f64) -> f64 {
        (self.reflect)(score)
    }
}

/// One broken decision-spec contract, located at a grid point.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecViolation {
    GridNotSorted { at: f64 },
    GridMissingThreshold,
    NonZeroAtThreshold { value: f64 },
    NotPositive { at: f64, value: f64 },
    NotDecreasingBelowThreshold { left: f64, right: f64 },
    NotIncreasingAboveThreshold { left: f64, right: f64 },
    ReflectionChangesConfidence { at: f64 },
    ReflectionNotInvolutive { at: f64 },
    ThresholdNotFixed { image: f64 },
    ReflectionDoesNotCross { at: f64 },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpecReport {
    pub violations: Vec<SpecViolation>,
}

impl SpecReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Checks every decision-spec contract on a sorted grid containing `s_star`.
/// Violations are collected, never raised.
pub fn validate_decision_spec<S: DecisionSpec + ?Sized>(spec: &S, grid: &[f64]) -> SpecReport {
    let mut violations = Vec::new();
    let s_star = spec.s_star();

    for pair in grid.windows(2) {
        if pair[1] < pair[0] {
            violations.push(SpecViolation::GridNotSorted { at: pair[1] });
        }
    }
    if !grid.contains(&s_star) {
        violations.push(SpecViolation::GridMissingThreshold);
    }

    let at_threshold = spec.confidence(s_star);
    if at_threshold != 0.0 {
        violations.push(SpecViolation::NonZeroAtThreshold {
            value: at_threshold,
        });
    }

    for &s in grid {
        let c = spec.confidence(s);
        if s != s_star && (c.is_nan() || c <= 0.0) {
            violations.push(SpecViolation::NotPositive { at: s, value: c });
        }
    }

    for pair in grid.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a >= b {
            continue;
        }
        let (ca, cb) = (spec.confidence(a), spec.confidence(b));
        if b <= s_star && (ca.is_nan() || cb.is_nan() || ca <= cb) {
            violations.push(SpecViolation::NotDecreasingBelowThreshold { left: a, right: b });
        }
        if a >= s_star && (ca.is_nan() || cb.is_nan() || cb <= ca) {
            violations.push(SpecViolation::NotIncreasingAboveThreshold { left: a, right: b });
        }
    }

    let image = spec.reflect(s_star);
    if image != s_star {
        violations.push(SpecViolation::ThresholdNotFixed { image });
    }

    for &s in grid {
        if s == s_star {
            continue;
        }
        let r = spec.reflect(s);
        if !close(spec.confidence(r), spec.confidence(s)) {
            violations.push(SpecViolation::ReflectionChangesConfidence { at: s });
        }
        if !close(spec.reflect(r), s) {
            violations.push(SpecViolation::ReflectionNotInvolutive { at: s });
        }
        if (r - s_star).signum() != -(s - s_star).signum() || r == s_star {
            violations.push(SpecViolation::ReflectionDoesNotCross { at: s });
        }
    }

    SpecReport { violations }
}

/// Confidence-descending view of a dataset.
///
/// `order[k]` is the sample index at rank `k`. Samples of equal confidence
/// share a tie group; inside a group they are arranged by ascending weight
/// (then input index), so everything downstream of the groups is independent
/// of input order.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedView {
    pub order: Vec<usize>,
    /// Confidence at each rank.
    pub confidence: Vec<f64>,
    /// Maximal runs of ranks with equal confidence.
    pub tie_groups: Vec<Range<usize>>,
    /// Prefix sums of weights along `order`.
    pub cum_weight: Vec<f64>,
    /// `correct[i]` is whether sample `i` (input index) is predicted correctly.
    pub correct: Vec<bool>,
}

impl RankedView {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.cum_weight.last().copied().unwrap_or(0.0)
    }

    /// Correctness indicator at each rank.
    pub fn correct_by_rank(&self) -> impl Iterator<Item = bool> + '_ {
        self.order.iter().map(move |&i| self.correct[i])
    }
}

pub fn rank_by_confidence<S: DecisionSpec + ?Sized>(d: &Dataset, spec: &S) -> Result<RankedView> {
    d.ensure_nonempty()?;
    let samples = d.samples();
    let conf: Vec<f64> = samples.iter().map(|s| spec.confidence(s.score())).collect();

    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| {
        conf[b]
            .total_cmp(&conf[a])
            .then_with(|| samples[a].weight().total_cmp(&samples[b].weight()))
    });

    let confidence: Vec<f64> = order.iter().map(|&i| conf[i]).collect();

    let mut tie_groups = Vec::new();
    let mut start = 0;
    for k in 1..=order.len() {
        if k == order.len() || confidence[k] != confidence[start] {
            tie_groups.push(start..k);
            start = k;
        }
    }

    let mut acc = 0.0;
    let cum_weight = order
        .iter()
        .map(|&i| {
            acc += samples[i].weight();
            acc
        })
        .collect();

    let correct = samples
        .iter()
        .map(|s| spec.predict(s.score()) == s.label())
        .collect();

    Ok(RankedView {
        order,
        confidence,
        tie_groups,
        cum_weight,
        correct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d0() -> Dataset {
        Dataset::from_parts(&[-4.0, -3.0, 1.0, 2.0], &[0, 1, 0, 1], None).unwrap()
    }

    #[test]
    fn predict_sign_cases() {
        let spec = make_abs_spec(0.0);
        assert_eq!(predict(2.0, &spec), Label::Positive);
        assert_eq!(predict(0.0, &spec), Label::Negative);
        assert_eq!(predict(-3.0, &spec), Label::Negative);
    }

    #[test]
    fn abs_spec_maps() {
        assert_eq!(make_abs_spec(0.0).reflect(1.0), -1.0);
        assert!((make_abs_spec(0.5).reflect(0.9) - 0.1).abs() < 1e-15);
        assert_eq!(make_abs_spec(0.0).confidence(-4.0), 4.0);
    }

    #[test]
    fn sample_rejects_bad_values() {
        assert!(matches!(
            Sample::new(f64::NAN, Label::Positive, 1.0),
            Err(Error::NonFiniteScore(_))
        ));
        assert!(matches!(
            Sample::new(f64::INFINITY, Label::Positive, 1.0),
            Err(Error::NonFiniteScore(_))
        ));
        assert!(matches!(Sample::new(1.0, Label::Positive, 0.0), Err(Error::InvalidWeight(_))));
        assert!(matches!(Sample::new(1.0, Label::Positive, -2.0), Err(Error::InvalidWeight(_))));
        assert!(matches!(
            Sample::new(1.0, Label::Positive, f64::NAN),
            Err(Error::InvalidWeight(_))
        ));
    }

    #[test]
    fn abs_spec_is_valid_on_grid() {
        let report = validate_decision_spec(&make_abs_spec(0.0), &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert!(report.is_valid(), "{:?}", report.violations);
    }

    #[test]
    fn identity_confidence_is_not_bimonotonic() {
        let spec = FnSpec::new(0.0, |s| s, |s| -s);
        let report = validate_decision_spec(&spec, &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, SpecViolation::NotDecreasingBelowThreshold { .. })));
    }

    #[test]
    fn identity_reflection_does_not_cross() {
        let spec = FnSpec::new(0.0, f64::abs, |s| s);
        let report = validate_decision_spec(&spec, &[-1.0, 0.0, 1.0]);
        assert!(report
            .violations
            .contains(&SpecViolation::ReflectionDoesNotCross { at: 1.0 }));
    }

    #[test]
    fn grid_without_threshold_is_reported() {
        let report = validate_decision_spec(&make_abs_spec(0.0), &[-1.0, 1.0]);
        assert!(report.violations.contains(&SpecViolation::GridMissingThreshold));
    }

    #[test]
    fn rank_d0() {
        let d = d0();
        let view = rank_by_confidence(&d, &make_abs_spec(0.0)).unwrap();
        let scores: Vec<f64> = view.order.iter().map(|&i| d.samples()[i].score()).collect();
        assert_eq!(scores, vec![-4.0, -3.0, 2.0, 1.0]);
        let correct: Vec<bool> = view.correct_by_rank().collect();
        assert_eq!(correct, vec![true, false, true, false]);
        assert_eq!(view.cum_weight, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(view.tie_groups.len(), 4);
    }

    #[test]
    fn equal_confidence_forms_one_group() {
        let d = Dataset::from_parts(&[1.0, -1.0], &[1, 1], None).unwrap();
        let view = rank_by_confidence(&d, &make_abs_spec(0.0)).unwrap();
        assert_eq!(view.tie_groups, vec![0..2]);
    }

    #[test]
    fn singleton() {
        let d = Dataset::from_parts(&[5.0], &[1], None).unwrap();
        let view = rank_by_confidence(&d, &make_abs_spec(0.0)).unwrap();
        assert_eq!(view.order, vec![0]);
        assert_eq!(view.correct, vec![true]);
    }

    #[test]
    fn empty_dataset_is_rejected() {
        let d = Dataset::default();
        assert_eq!(
            rank_by_confidence(&d, &make_abs_spec(0.0)).unwrap_err(),
            Error::EmptyDataset
        );
    }

    #[test]
    fn reflection_flips_prediction() {
        let spec = make_abs_spec(0.0);
        for s in [-3.5, -0.1, 0.2, 7.0] {
            assert_eq!(spec.predict(spec.reflect(s)), spec.predict(s).flip());
            assert_eq!(spec.confidence(spec.reflect(s)), spec.confidence(s));
        }
    }
}
