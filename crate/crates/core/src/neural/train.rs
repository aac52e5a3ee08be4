use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::config::EinConfig;
use super::model::{DropoutMasks, EinModel, Example, Vocabulary};
use super::optim::Optimizer;
use crate::analysis::macro_f1;
use crate::corpus::Corpus;
use crate::features::{EmbeddingTable, EmotionFeaturizer};
use crate::lexicon::Lexicon;
use crate::rng::{derive_seed, seeded};
use crate::{Error, Result};

const SHUFFLE_STREAM: u64 = 1;
const DROPOUT_STREAM: u64 = 2;

/// Per-epoch training record. Epoch numbers are 1-based.
///
/// `val_loss` and `val_macro_f1` stay empty when training without a
/// validation set; `train_accuracy` is filled only when the config asks
/// for it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    /// Mean training-mode (dropout on) loss over the epoch's batches.
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
    /// Macro-F1 on the validation set, in percent.
    pub val_macro_f1: Vec<f64>,
    /// Inference-mode accuracy on the training set, in percent.
    pub train_accuracy: Vec<f64>,
    pub stopped_epoch: usize,
    pub best_epoch: usize,
}

/// Encodes every document of `corpus` for `model`.
pub fn encode_corpus(
    model: &EinModel,
    corpus: &Corpus,
    featurizer: &EmotionFeaturizer<'_>,
) -> Result<Vec<Example>> {
    corpus
        .documents
        .iter()
        .map(|d| model.encode(d, featurizer))
        .collect()
}

/// Mini-batch training with early stopping on the monitored loss
/// (validation loss, or inference-mode training loss when `validation` is
/// empty). Returns the best snapshot.
pub fn train(
    mut model: EinModel,
    train: &[Example],
    validation: &[Example],
) -> Result<(EinModel, TrainHistory)> {
    if train.is_empty() {
        return Err(Error::Data("no training examples".into()));
    }
    for ex in train.iter().chain(validation) {
        model.check_input(&ex.ids, &ex.emotions)?;
        if ex.target >= model.classes().len() {
            return Err(Error::Data(format!("target {} out of range", ex.target)));
        }
    }
    let config = model.config().clone();
    let mut shuffle_rng = seeded(derive_seed(config.seed, SHUFFLE_STREAM));
    let mut dropout_rng = seeded(derive_seed(config.seed, DROPOUT_STREAM));
    let mut optimizer = Optimizer::new(config.optimizer, config.learning_rate, model.params());
    let classes = model.classes().len();

    let mut history = TrainHistory::default();
    let mut best_loss = f64::INFINITY;
    let mut best_params = model.params().clone();
    let mut wait = 0usize;
    let mut order: Vec<usize> = (0..train.len()).collect();

    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for (b, chunk) in order.chunks(config.batch_size).enumerate() {
            let batch: Vec<Example> = chunk.iter().map(|&i| train[i].clone()).collect();
            let masks: Vec<DropoutMasks> = batch
                .iter()
                .map(|_| DropoutMasks::sample(&config, &mut dropout_rng))
                .collect();
            let (loss, grads) = model.loss_and_gradient(&batch, Some(&masks));
            if !loss.is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite loss {loss} at epoch {epoch}, batch {}",
                    b + 1
                )));
            }
            epoch_loss += loss * batch.len() as f64;
            optimizer.apply(model.params_mut(), &grads, !config.trainable_embeddings);
        }
        history.train_loss.push(epoch_loss / train.len() as f64);

        let monitored = if validation.is_empty() {
            model.mean_loss(train)
        } else {
            let val_loss = model.mean_loss(validation);
            let gold: Vec<usize> = validation.iter().map(|e| e.target).collect();
            let pred = model.predict_examples(validation)?;
            history.val_loss.push(val_loss);
            history.val_macro_f1.push(macro_f1(&gold, &pred, classes));
            val_loss
        };
        if config.monitor_train_accuracy {
            let pred = model.predict_examples(train)?;
            let correct = pred
                .iter()
                .zip(train)
                .filter(|(p, e)| **p == e.target)
                .count();
            history
                .train_accuracy
                .push(100.0 * correct as f64 / train.len() as f64);
        }
        if !monitored.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite monitored loss at epoch {epoch}"
            )));
        }
        history.stopped_epoch = epoch;
        if monitored < best_loss {
            best_loss = monitored;
            best_params = model.params().clone();
            history.best_epoch = epoch;
            wait = 0;
        } else {
            wait += 1;
            if wait >= config.early_stop_patience {
                break;
            }
        }
    }
    *model.params_mut() = best_params;
    Ok((model, history))
}

/// Builds the vocabulary and model for `config` and trains it on
/// `train_corpus`, early-stopping on `validation`.
///
/// The vocabulary covers the training documents only. Emotion features
/// are computed from each document's full token stream.
pub fn fit(
    config: &EinConfig,
    train_corpus: &Corpus,
    validation: &Corpus,
    lexicons: &[Lexicon],
    embeddings: Option<&EmbeddingTable>,
) -> Result<(EinModel, TrainHistory)> {
    let train_ids: BTreeSet<&str> = train_corpus
        .documents
        .iter()
        .map(|d| d.id.as_str())
        .collect();
    if let Some(d) = validation
        .documents
        .iter()
        .find(|d| train_ids.contains(d.id.as_str()))
    {
        return Err(Error::Validation(format!(
            "document {} appears in both training and validation data",
            d.id
        )));
    }
    let classes: Vec<String> = train_corpus
        .labels
        .union(&validation.labels)
        .cloned()
        .collect();
    let featurizer = EmotionFeaturizer::new(lexicons);
    let vocab = Vocabulary::build(train_corpus, config.remove_stop_words, embeddings);
    let model = EinModel::new(
        config.clone(),
        &classes,
        vocab,
        featurizer.dimension(),
        embeddings,
    )?;
    let train_examples = encode_corpus(&model, train_corpus, &featurizer)?;
    let val_examples = encode_corpus(&model, validation, &featurizer)?;
    train(model, &train_examples, &val_examples)
}
