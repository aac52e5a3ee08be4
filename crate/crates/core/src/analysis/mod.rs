//! Evaluation metrics and the emotional analyses: information gain,
//! Welch t-tests, top emotions per class and low-dimensional projection of
//! learned document representations.

mod export;
mod ig;
mod metrics;
mod pca;
mod topn;
mod ttest;

pub use export::{
    export_penultimate, read_embedding_csv, write_penultimate, write_projection_csv, EmbeddingRows,
};
pub use ig::{
    emotion_part, entropy, feature_information_gain, information_gain, FeatureRanking, DEFAULT_BINS,
};
pub use metrics::{
    compute_metrics, compute_metrics_indexed, macro_f1, ClassMetrics, MetricsReport,
};
pub use pca::{pca_project, Projection};
pub use topn::top_n_emotions;
pub use ttest::{welch_t_test, TTestResult};
