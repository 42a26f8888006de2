use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by dataset construction and the metric machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset contains a single class, AUROC is undefined")]
    SingleClass,
    #[error("score must be finite, got {0}")]
    NonFiniteScore(f64),
    #[error("weight must be finite and strictly positive, got {0}")]
    InvalidWeight(f64),
    #[error("mask index {index} out of range for a dataset of {len} samples")]
    InvalidMask { index: usize, len: usize },
    #[error("perturbation (delta1={delta1}, delta2={delta2}) drives a confusion entry below zero")]
    InfeasiblePerturbation { delta1: f64, delta2: f64 },
    #[error("sample {index} sits exactly at the decision threshold")]
    SampleAtThreshold { index: usize },
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("trial count must be at least 1")]
    NoTrials,
}
