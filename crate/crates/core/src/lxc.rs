//! Local exchange of classes.
//!
//! Exchanging a sample flips its label and moves its score to the other score
//! of equal confidence, so its confidence and its correctness are untouched.
//! A metric is LxC-invariant when exchanging any subset of samples leaves it
//! unchanged. The categorical analogue moves weight between `TP` and `TN` and
//! between `FP` and `FN` while keeping `TP + TN` and `FP + FN` fixed.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metrics::ConfusionMatrix;
use crate::model::{Dataset, DecisionSpec, Sample};

/// Absolute deviation above which a metric counts as changed.
pub const INVARIANCE_TOLERANCE: f64 = 1e-9;

/// Exchanges the class of one sample. Samples scored exactly at the threshold
/// are returned unchanged. Applying it twice is the identity.
pub fn exchange_sample<S: DecisionSpec + ?Sized>(x: &Sample, spec: &S) -> Sample {
    if x.score() == spec.s_star() {
        return *x;
    }
    Sample::new(spec.reflect(x.score()), x.label().flip(), x.weight())
        .expect("reflection of a finite score is finite")
}

/// A subset of sample positions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExchangeMask {
    indices: BTreeSet<usize>,
}

impl ExchangeMask {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        Self {
            indices: indices.into_iter().collect(),
        }
    }

    /// Every position of a dataset of length `n`.
    pub fn all(n: usize) -> Self {
        Self::new(0..n)
    }

    /// Uniform over all subsets: one fair bit per position.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self::new((0..n).filter(|_| rng.random::<bool>()))
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.contains(&index)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn validate(&self, len: usize) -> Result<()> {
        match self.indices.iter().next_back() {
            Some(&index) if index >= len => Err(Error::InvalidMask { index, len }),
            _ => Ok(()),
        }
    }
}

/// Exchanges exactly the masked samples; order and size are preserved.
pub fn exchange_subset<S: DecisionSpec + ?Sized>(
    d: &Dataset,
    mask: &ExchangeMask,
    spec: &S,
) -> Result<Dataset> {
    mask.validate(d.len())?;
    Ok(d.iter()
        .enumerate()
        .map(|(i, x)| if mask.contains(i) { exchange_sample(x, spec) } else { *x })
        .collect())
}

/// The original samples followed by the exchanged image of each one.
pub fn duplicate_dataset<S: DecisionSpec + ?Sized>(d: &Dataset, spec: &S) -> Result<Dataset> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut samples = Vec::with_capacity(2 * d.len());
    samples.extend(d.iter().copied());
    samples.extend(d.iter().map(|x| exchange_sample(x, spec)));
    Ok(Dataset::new(samples))
}

/// First mask found to change a rank-based metric.
#[derive(Debug, Clone, PartialEq)]
pub struct RankViolation {
    /// Zero-based trial index.
    pub trial: usize,
    pub mask: ExchangeMask,
    /// Metric on the exchanged dataset, or `None` when it could not be computed.
    pub value: Option<f64>,
    /// Why the metric could not be computed, if it could not.
    pub error: Option<Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankCheckReport {
    pub trials: usize,
    pub baseline: f64,
    /// Largest deviation seen; infinite once the metric became undefined.
    pub max_deviation: f64,
    pub violation: Option<RankViolation>,
}

impl RankCheckReport {
    pub fn is_invariant(&self) -> bool {
        self.violation.is_none()
    }
}

/// Exchanges `trials` random subsets and compares the metric against its value
/// on `d`. A metric error on an exchanged dataset counts as a violation; an
/// error on `d` itself is returned.
pub fn check_rank_lxc_invariance<F, S>(
    metric: F,
    d: &Dataset,
    spec: &S,
    trials: usize,
    seed: u64,
) -> Result<RankCheckReport>
where
    F: Fn(&Dataset) -> Result<f64>,
    S: DecisionSpec + ?Sized,
{
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let baseline = metric(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_deviation: f64 = 0.0;
    let mut violation = None;

    for trial in 0..trials {
        let mask = ExchangeMask::random(d.len(), &mut rng);
        let exchanged = exchange_subset(d, &mask, spec)?;
        let (deviation, value, error) = match metric(&exchanged) {
            Ok(v) => ((v - baseline).abs(), Some(v), None),
            Err(e) => (f64::INFINITY, None, Some(e)),
        };
        max_deviation = max_deviation.max(deviation);
        if violation.is_none() && (deviation.is_nan() || deviation > INVARIANCE_TOLERANCE) {
            violation = Some(RankViolation {
                trial,
                mask,
                value,
                error,
            });
        }
    }

    Ok(RankCheckReport {
        trials,
        baseline,
        max_deviation,
        violation,
    })
}

/// `(TP + d1, FP - d2, FN + d2, TN - d1)`.
pub fn perturb_confusion(cm: &ConfusionMatrix, delta1: f64, delta2: f64) -> Result<ConfusionMatrix> {
    let out = ConfusionMatrix::new(
        cm.true_positive + delta1,
        cm.false_positive - delta2,
        cm.false_negative + delta2,
        cm.true_negative - delta1,
    );
    if out.min_entry() < 0.0 {
        return Err(Error::InfeasiblePerturbation { delta1, delta2 });
    }
    Ok(out)
}

/// A perturbation that changed a categorical metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CategoricalWitness {
    pub delta1: f64,
    pub delta2: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalCheckReport {
    pub baseline: f64,
    /// Perturbations evaluated: the integer grid first, then the random draws.
    pub evaluated: usize,
    pub max_deviation: f64,
    pub witness: Option<CategoricalWitness>,
}

impl CategoricalCheckReport {
    pub fn is_invariant(&self) -> bool {
        self.witness.is_none()
    }
}

/// Evaluates the metric on every integer perturbation with
/// `|d1|, |d2| <= floor(min entry)`, then on `trials` uniform draws from the
/// full feasible box `d1 in [-TP, TN]`, `d2 in [-FN, FP]`. A non-finite value
/// where the baseline is finite counts as a change.
pub fn check_categorical_lxc_invariance<F>(
    metric: F,
    cm: &ConfusionMatrix,
    trials: usize,
    seed: u64,
) -> CategoricalCheckReport
where
    F: Fn(&ConfusionMatrix) -> f64,
{
    let baseline = metric(cm);
    let mut max_deviation: f64 = 0.0;
    let mut witness = None;
    let mut evaluated = 0;

    let mut visit = |delta1: f64, delta2: f64| {
        let Ok(perturbed) = perturb_confusion(cm, delta1, delta2) else {
            return;
        };
        evaluated += 1;
        let value = metric(&perturbed);
        let deviation = if value.is_nan() && baseline.is_nan() {
            0.0
        } else {
            let d = (value - baseline).abs();
            if d.is_nan() {
                f64::INFINITY
            } else {
                d
            }
        };
        max_deviation = max_deviation.max(deviation);
        if witness.is_none() && deviation > INVARIANCE_TOLERANCE {
            witness = Some(CategoricalWitness {
                delta1,
                delta2,
                value,
            });
        }
    };

    let m = cm.min_entry().floor() as i64;
    for d1 in -m..=m {
        for d2 in -m..=m {
            visit(d1 as f64, d2 as f64);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let delta1 = -cm.true_positive + rng.random::<f64>() * (cm.true_positive + cm.true_negative);
        let delta2 = -cm.false_negative + rng.random::<f64>() * (cm.false_negative + cm.false_positive);
        visit(delta1, delta2);
    }

    CategoricalCheckReport {
        baseline,
        evaluated,
        max_deviation,
        witness,
    }
}

/// `2 TP / (2 TP + FP + FN)`; NaN when undefined.
pub fn f1_score(cm: &ConfusionMatrix) -> f64 {
    let tp = cm.true_positive;
    2.0 * tp / (2.0 * tp + cm.false_positive + cm.false_negative)
}

/// Matthews correlation coefficient; NaN when a marginal is zero.
pub fn matthews_correlation(cm: &ConfusionMatrix) -> f64 {
    let (tp, fp, fn_, tn) = (
        cm.true_positive,
        cm.false_positive,
        cm.false_negative,
        cm.true_negative,
    );
    (tp * tn - fp * fn_) / ((tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_)).sqrt()
}
