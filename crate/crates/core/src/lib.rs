//! Emotion-aware false-information classification.
//!
//! The crate bundles everything needed to characterise propaganda, hoax,
//! clickbait, satire and real news from an emotional point of view:
//!
//! * [`lexicon`]: the five emotion-lexicon schemas over a closed registry of
//!   17 canonical emotions, plus a plain-text lexicon loader.
//! * [`corpus`]: tokenization, ingestion (JSONL/CSV), cleaning, truncation and
//!   seeded (stratified) splitting.
//! * [`features`]: length-normalised emotion frequencies, bag-of-words and
//!   averaged word embeddings.
//! * [`neural`]: a from-scratch LSTM + attention content branch fused with a
//!   dense emotion branch, trained with Adam/RMSprop/Adadelta and early
//!   stopping.
//! * [`classifiers`]: majority/random baselines, random forest, linear SVM and
//!   multinomial logistic regression.
//! * [`analysis`]: macro metrics, information gain, Welch t-tests, top-N
//!   emotions and PCA projection of learned document representations.
//! * [`synthetic`]: deterministic toy lexicons and corpora used by the tests,
//!   benchmarks and the bundled demo configuration.

pub mod analysis;
pub mod classifiers;
pub mod corpus;
mod error;
pub mod features;
pub mod lexicon;
pub mod neural;
pub mod rng;
pub mod synthetic;

pub use error::{Error, Result};

pub use analysis::{FeatureRanking, MetricsReport, TTestResult};
pub use classifiers::{LinearModel, RandomForest};
pub use corpus::{Corpus, Document, Source, SplitSpec};
pub use features::{EmbeddingTable, EmotionVector, WordList};
pub use lexicon::{EmotionLabel, Lexicon, LexiconSchema, SchemaName};
pub use neural::{EinConfig, EinModel, TrainHistory};
