//! Datasets, answer-set scoring, the stage-override pipeline and the
//! question complexity categorizer.

mod categorize;
mod dataset;
mod metrics;
mod pipeline;
mod report;

pub use categorize::categorize;
pub use dataset::{load_dataset, Category, DatasetError, DatasetRecord};
pub use metrics::{normalize_answer, normalize_term, score, Prf};
pub use pipeline::{
    gold_answers, run_pipeline, Executor, PipelineContext, PipelineError, PipelineRun, Stage, StoreExecutor, Trace,
};
pub use report::{evaluate, QuestionScore, ScoreReport};
