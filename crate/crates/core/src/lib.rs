//! LxCIM: a rank-based binary classifier metric invariant to local exchange
//! of classes, alongside accuracy, AUROC and AUDRC.
//!
//! ```
//! use lxcim_core::{lxcim, auroc, make_abs_spec, Dataset};
//!
//! let d = Dataset::from_parts(&[-4.0, -3.0, 1.0, 2.0], &[0, 1, 0, 1], None).unwrap();
//! let spec = make_abs_spec(0.0);
//! assert_eq!(lxcim(&d, &spec).unwrap(), 0.625);
//! assert_eq!(auroc(&d).unwrap(), 0.75);
//! ```

pub mod cli;
pub mod error;
pub mod io;
pub mod lxc;
pub mod metrics;
pub mod model;
pub mod plot;
pub mod verify;

pub use error::{Error, Result};
pub use lxc::{
    check_categorical_lxc_invariance, check_rank_lxc_invariance, duplicate_dataset,
    exchange_sample, exchange_subset, perturb_confusion, ExchangeMask,
};
pub use metrics::{
    accuracy, accuracy_rate_curve, audrc, auroc, confusion_matrix, cumulative_accuracy_curve,
    cumulative_accuracy_slopes,
    lxcim, report, roc_curve, ConfusionMatrix, Curve, CurveKind, Metric, MetricsReport,
};
pub use model::{
    make_abs_spec, predict, rank_by_confidence, validate_decision_spec, Dataset, DecisionSpec,
    FnSpec, Label, RankedView, Sample, SymmetricSpec,
};
