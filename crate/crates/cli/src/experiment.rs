//! prepare → featurize → train → evaluate.

use std::path::Path;

use ein_core::analysis::{compute_metrics, MetricsReport};
use ein_core::classifiers::{
    train_linear_svm, train_logistic_regression, train_random_forest, trivial_baselines,
    LinearModel, RandomForest,
};
use ein_core::corpus::{kfold, split, Split};
use ein_core::features::{avg_embedding, BagOfWords, EmotionFeaturizer, SparseVector};
use ein_core::neural::{fit, load_checkpoint, save_checkpoint, EinModel, TrainHistory};
use ein_core::rng::derive_seed;
use ein_core::{Corpus, Error, Result};
use serde::{Deserialize, Serialize};

use crate::config::{streams, Evaluation, ExperimentConfig, FeatureSet, ModelSpec};
use crate::error::{AtStage, Stage, StageResult};
use crate::run::{Artifacts, Inputs, Manifest, Run};

pub const METRICS_FILE: &str = "metrics.json";
pub const HISTORY_FILE: &str = "history.json";
pub const CHECKPOINT_FILE: &str = "model.ein";
pub const MODEL_FILE: &str = "model.json";
pub const VOCABULARY_FILE: &str = "bow_vocabulary.json";
pub const PREDICTIONS_FILE: &str = "predictions.csv";

/// Unweighted means over folds (a single fold for hold-out runs).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
}

/// Contents of `metrics.json`. Holds no timings, so equal configs give
/// byte-identical files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsFile {
    pub model: String,
    pub evaluation: String,
    pub seed: u64,
    pub config_hash: String,
    pub classes: Vec<String>,
    pub folds: Vec<MetricsReport>,
    pub mean: MeanMetrics,
}

impl MetricsFile {
    fn new(config: &ExperimentConfig, classes: Vec<String>, folds: Vec<MetricsReport>) -> Self {
        let n = folds.len() as f64;
        let mean = |f: fn(&MetricsReport) -> f64| folds.iter().map(f).sum::<f64>() / n;
        let mean = MeanMetrics {
            accuracy: mean(|m| m.accuracy),
            macro_precision: mean(|m| m.macro_precision),
            macro_recall: mean(|m| m.macro_recall),
            macro_f1: mean(|m| m.macro_f1),
        };
        MetricsFile {
            model: config.model.name().to_string(),
            evaluation: match config.evaluation {
                Evaluation::Holdout(_) => "holdout".into(),
                Evaluation::KFold { k, .. } => format!("kfold-{k}"),
            },
            seed: config.seed,
            config_hash: config.hash.clone(),
            classes,
            folds,
            mean,
        }
    }
}

#[derive(Debug)]
pub struct ExperimentReport {
    pub metrics: MetricsFile,
    pub history: Option<TrainHistory>,
    pub manifest: Manifest,
}

/// Input representation for the classical models.
#[derive(Clone, Debug)]
pub enum Featurizer {
    /// The network and the baselines featurize on their own.
    None,
    Emotion,
    BagOfWords(BagOfWords),
    Embedding,
}

impl Featurizer {
    pub fn fit(spec: &ModelSpec, train: &Corpus) -> Result<Self> {
        let set = match spec {
            ModelSpec::RandomForest(_, f)
            | ModelSpec::LinearSvm(_, f)
            | ModelSpec::Logistic(_, f) => f,
            _ => return Ok(Featurizer::None),
        };
        Ok(match set {
            FeatureSet::Emotion => Featurizer::Emotion,
            FeatureSet::BagOfWords { min_df, max_vocab } => {
                Featurizer::BagOfWords(BagOfWords::fit(train, *min_df, *max_vocab)?)
            }
            FeatureSet::Embedding => Featurizer::Embedding,
        })
    }

    pub fn names(&self, inputs: &Inputs) -> Vec<String> {
        match self {
            Featurizer::None => Vec::new(),
            Featurizer::Emotion => EmotionFeaturizer::new(&inputs.lexicons)
                .layout()
                .iter()
                .map(|c| c.name())
                .collect(),
            Featurizer::BagOfWords(b) => b.vocabulary().to_vec(),
            Featurizer::Embedding => {
                let d = inputs.embeddings.as_ref().map_or(0, |t| t.dimension());
                (0..d).map(|i| format!("emb{i}")).collect()
            }
        }
    }

    pub fn dense(&self, corpus: &Corpus, inputs: &Inputs) -> Result<Vec<Vec<f64>>> {
        Ok(match self {
            Featurizer::None => return Err(Error::Config("model has no feature matrix".into())),
            Featurizer::Emotion => EmotionFeaturizer::new(&inputs.lexicons).matrix(corpus),
            Featurizer::BagOfWords(b) => corpus
                .documents
                .iter()
                .map(|d| b.transform(d).to_dense())
                .collect(),
            Featurizer::Embedding => {
                let table = inputs
                    .embeddings
                    .as_ref()
                    .ok_or_else(|| Error::Config("embedding features need 'embeddings'".into()))?;
                corpus
                    .documents
                    .iter()
                    .map(|d| avg_embedding(d, table, true))
                    .collect()
            }
        })
    }

    fn sparse(&self, corpus: &Corpus) -> Option<Vec<SparseVector>> {
        match self {
            Featurizer::BagOfWords(b) => {
                Some(corpus.documents.iter().map(|d| b.transform(d)).collect())
            }
            _ => None,
        }
    }
}

/// A trained model together with what it needs to predict.
#[derive(Clone, Debug)]
pub enum Trained {
    Network(EinModel),
    Forest(RandomForest),
    Linear(LinearModel),
    /// Majority or random selection learned from the training labels.
    Baseline {
        train_labels: Vec<String>,
        random: bool,
        seed: u64,
    },
}

fn labels(corpus: &Corpus) -> Vec<String> {
    corpus.documents.iter().map(|d| d.label.clone()).collect()
}

/// Training part for models without early stopping: train and validation.
fn fitting_corpus(train: &Corpus, validation: &Corpus) -> Corpus {
    let mut docs = train.documents.clone();
    docs.extend(validation.documents.iter().cloned());
    let mut c = Corpus::new(docs);
    c.labels.extend(train.labels.iter().cloned());
    c
}

pub fn train_model(
    config: &ExperimentConfig,
    featurizer: &Featurizer,
    train: &Corpus,
    validation: &Corpus,
    inputs: &Inputs,
) -> Result<(Trained, Option<TrainHistory>)> {
    if let ModelSpec::Ein(c) = &config.model {
        let (model, history) = fit(
            c,
            train,
            validation,
            &inputs.lexicons,
            inputs.embeddings.as_ref(),
        )?;
        // Evaluate exactly what the checkpoint stores.
        return Ok((Trained::Network(model.quantized()), Some(history)));
    }
    let all = fitting_corpus(train, validation);
    let y = labels(&all);
    let names = featurizer.names(inputs);
    let trained = match &config.model {
        ModelSpec::RandomForest(p, _) => Trained::Forest(train_random_forest(
            &featurizer.dense(&all, inputs)?,
            &y,
            &names,
            p,
        )?),
        ModelSpec::LinearSvm(p, _) => Trained::Linear(match featurizer.sparse(&all) {
            Some(rows) => train_linear_svm(&rows, &y, &names, p)?,
            None => train_linear_svm(&featurizer.dense(&all, inputs)?, &y, &names, p)?,
        }),
        ModelSpec::Logistic(p, _) => Trained::Linear(match featurizer.sparse(&all) {
            Some(rows) => train_logistic_regression(&rows, &y, &names, p)?,
            None => train_logistic_regression(&featurizer.dense(&all, inputs)?, &y, &names, p)?,
        }),
        ModelSpec::Majority | ModelSpec::Random => Trained::Baseline {
            train_labels: y,
            random: config.model == ModelSpec::Random,
            seed: derive_seed(config.seed, streams::BASELINE),
        },
        ModelSpec::Ein(_) => unreachable!("handled above"),
    };
    Ok((trained, None))
}

impl Trained {
    pub fn predict(
        &self,
        featurizer: &Featurizer,
        corpus: &Corpus,
        inputs: &Inputs,
    ) -> Result<Vec<String>> {
        Ok(match self {
            Trained::Network(m) => corpus
                .documents
                .iter()
                .map(|d| m.predict(d, &inputs.lexicons).map(|p| p.label))
                .collect::<Result<_>>()?,
            Trained::Forest(f) => {
                let rows = featurizer.dense(corpus, inputs)?;
                f.predict_all(&rows)
                    .into_iter()
                    .map(|i| f.classes[i].clone())
                    .collect()
            }
            Trained::Linear(m) => {
                let idx = match featurizer.sparse(corpus) {
                    Some(rows) => m.predict_all(&rows),
                    None => m.predict_all(&featurizer.dense(corpus, inputs)?),
                };
                idx.into_iter().map(|i| m.classes[i].clone()).collect()
            }
            Trained::Baseline {
                train_labels,
                random,
                seed,
            } => {
                let b = trivial_baselines(train_labels, corpus.len(), *seed)?;
                if *random {
                    b.random
                } else {
                    b.majority
                }
            }
        })
    }

    /// Writes the model (and bag-of-words vocabulary) to the output directory.
    pub fn save(&self, featurizer: &Featurizer, artifacts: &mut Artifacts) -> Result<()> {
        match self {
            Trained::Network(m) => {
                save_checkpoint(m, artifacts.path(CHECKPOINT_FILE))?;
                artifacts.adopt(CHECKPOINT_FILE)?;
            }
            Trained::Forest(f) => artifacts.write(MODEL_FILE, (f.to_json()? + "\n").as_bytes())?,
            Trained::Linear(m) => artifacts.write(MODEL_FILE, (m.to_json()? + "\n").as_bytes())?,
            Trained::Baseline { .. } => {}
        }
        if let Featurizer::BagOfWords(b) = featurizer {
            artifacts.write_json(VOCABULARY_FILE, b.vocabulary())?;
        }
        Ok(())
    }

    /// Reads back what [`Trained::save`] wrote for `config`'s model.
    pub fn load(
        config: &ExperimentConfig,
        dir: &Path,
        train: &Corpus,
    ) -> Result<(Self, Featurizer)> {
        let read = |name: &str| {
            let p = dir.join(name);
            std::fs::read_to_string(&p).map_err(|source| Error::Io { path: p, source })
        };
        let featurizer = match &config.model {
            ModelSpec::RandomForest(_, FeatureSet::BagOfWords { .. })
            | ModelSpec::LinearSvm(_, FeatureSet::BagOfWords { .. })
            | ModelSpec::Logistic(_, FeatureSet::BagOfWords { .. }) => {
                let vocabulary: Vec<String> = serde_json::from_str(&read(VOCABULARY_FILE)?)?;
                Featurizer::BagOfWords(BagOfWords::from_vocabulary(vocabulary))
            }
            spec => Featurizer::fit(spec, train)?,
        };
        let trained = match &config.model {
            ModelSpec::Ein(_) => Trained::Network(load_checkpoint(dir.join(CHECKPOINT_FILE))?),
            ModelSpec::RandomForest(..) => {
                Trained::Forest(RandomForest::from_json(&read(MODEL_FILE)?)?)
            }
            ModelSpec::LinearSvm(..) | ModelSpec::Logistic(..) => {
                Trained::Linear(LinearModel::from_json(&read(MODEL_FILE)?)?)
            }
            ModelSpec::Majority | ModelSpec::Random => Trained::Baseline {
                train_labels: labels(train),
                random: config.model == ModelSpec::Random,
                seed: derive_seed(config.seed, streams::BASELINE),
            },
        };
        Ok((trained, featurizer))
    }
}

/// Hold-out split for `config`, or an error for k-fold configs.
pub fn holdout(config: &ExperimentConfig, corpus: &Corpus) -> Result<Split> {
    match &config.evaluation {
        Evaluation::Holdout(spec) => split(corpus, spec),
        Evaluation::KFold { .. } => Err(Error::Config(
            "this command needs a hold-out split, not kfold".into(),
        )),
    }
}

fn predictions_csv(corpus: &Corpus, predicted: &[String]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Data(format!("CSV: {e}"));
    w.write_record(["id", "gold", "predicted"]).map_err(err)?;
    for (d, p) in corpus.documents.iter().zip(predicted) {
        w.write_record([d.id.as_str(), d.label.as_str(), p.as_str()])
            .map_err(err)?;
    }
    w.into_inner().map_err(|e| Error::Data(format!("CSV: {e}")))
}

/// Runs the whole pipeline and writes metrics, history, model and manifest
/// into `config.out`. Hold-out runs keep the model; k-fold runs only report
/// metrics.
pub fn run_experiment(config: &ExperimentConfig) -> StageResult<ExperimentReport> {
    config.validate().at(Stage::Config)?;
    let mut run = Run::start("train", config)?;
    let inputs = run.stage(Stage::Prepare, |_| Inputs::load(config))?;
    let classes = inputs.corpus.label_list();
    let mut history = None;

    let folds: Vec<(Corpus, Corpus, Corpus)> = run.stage(Stage::Prepare, |_| {
        Ok(match &config.evaluation {
            Evaluation::Holdout(spec) => {
                let s = split(&inputs.corpus, spec)?;
                vec![(s.train, s.validation, s.test)]
            }
            Evaluation::KFold { k, stratified } => {
                let seed = derive_seed(config.seed, streams::SPLIT);
                kfold(&inputs.corpus, *k, seed, *stratified)?
                    .into_iter()
                    .map(|f| {
                        let empty = f.train.subset(&[]);
                        (f.train, empty, f.test)
                    })
                    .collect()
            }
        })
    })?;
    let keep_model = folds.len() == 1;

    let mut reports = Vec::new();
    for (train, validation, test) in &folds {
        let featurizer = run.stage(Stage::Featurize, |_| Featurizer::fit(&config.model, train))?;
        let (trained, h) = run.stage(Stage::Train, |_| {
            train_model(config, &featurizer, train, validation, &inputs)
        })?;
        let predicted = run.stage(Stage::Evaluate, |_| {
            trained.predict(&featurizer, test, &inputs)
        })?;
        let report = run.stage(Stage::Evaluate, |_| {
            compute_metrics(&predicted, &labels(test), &classes)
        })?;
        if keep_model {
            run.stage(Stage::Write, |a| {
                trained.save(&featurizer, a)?;
                if let Some(h) = &h {
                    a.write_json(HISTORY_FILE, h)?;
                }
                a.write(PREDICTIONS_FILE, &predictions_csv(test, &predicted)?)
            })?;
            history = h;
        }
        reports.push(report);
    }
    let metrics = MetricsFile::new(config, classes, reports);
    run.stage(Stage::Write, |a| a.write_json(METRICS_FILE, &metrics))?;
    let manifest = run.finish()?;
    Ok(ExperimentReport {
        metrics,
        history,
        manifest,
    })
}

/// Re-evaluates the saved model of a hold-out run on its test part and
/// writes `evaluation.json`.
pub fn run_evaluation(config: &ExperimentConfig) -> StageResult<MetricsFile> {
    config.validate().at(Stage::Config)?;
    let mut run = Run::start("evaluate", config)?;
    let inputs = run.stage(Stage::Prepare, |_| Inputs::load(config))?;
    let parts = run.stage(Stage::Prepare, |_| holdout(config, &inputs.corpus))?;
    let (trained, featurizer) = run.stage(Stage::Evaluate, |a| {
        Trained::load(
            config,
            a.dir(),
            &fitting_corpus(&parts.train, &parts.validation),
        )
    })?;
    let classes = inputs.corpus.label_list();
    let report = run.stage(Stage::Evaluate, |_| {
        let predicted = trained.predict(&featurizer, &parts.test, &inputs)?;
        compute_metrics(&predicted, &labels(&parts.test), &classes)
    })?;
    let metrics = MetricsFile::new(config, classes, vec![report]);
    run.stage(Stage::Write, |a| a.write_json("evaluation.json", &metrics))?;
    run.finish()?;
    Ok(metrics)
}
