//! End-to-end evaluation: corpus generation, blame ranking, baselines,
//! metrics and cross-validation.

mod blame;
mod generate;
mod metrics;
mod pipeline;

use thiserror::Error;

use crate::labeler::FilterError;
use crate::models::ModelError;

pub use blame::{
    baseline_first_error, baseline_random, baseline_random_from, blame, BlameEntry, BlameReport,
    DEFAULT_K,
};
pub use generate::{
    generate_corpus, mutate, mutation_pair, single_edit_pair, to_program, well_typed_program,
    CorpusSpec, EditShape, Gen, Mutation, STANDARD_SEED,
};
pub use metrics::{recall, top_k_accuracy, Recall};
pub use pipeline::{
    analyze, cross_validate, cross_validate_analyzed, prepare, run_pipeline,
    run_pipeline_with_model, train_and_evaluate, Analyzed, BaselineRow, CrossValidation,
    EvalReport, PipelineConfig,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("need at least {needed} programs, got {got}")]
    TooFewPrograms { needed: usize, got: usize },
    #[error("program is well-typed")]
    NotIllTyped,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error("thread pool: {0}")]
    Pool(String),
}
