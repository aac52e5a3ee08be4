use std::collections::{BTreeSet, HashMap};

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::attention::{attention_backward, attention_forward, AttentionOutput};
use super::config::{EinConfig, OutputMode};
use super::loss::loss;
use super::lstm::{lstm_backward, lstm_forward, LstmCache, LstmGrads, LstmWeights};
use super::params::{EinParams, Shapes};
use super::tensor::{sigmoid, softmax, Matrix};
use crate::corpus::{Corpus, Document};
use crate::features::{is_stop_word, EmbeddingTable, EmotionFeaturizer};
use crate::lexicon::Lexicon;
use crate::rng::{seeded, Rng};
use crate::{Error, Result};

/// Word → row index of the embedding matrix. Index 0 is reserved for
/// out-of-vocabulary tokens.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl From<Vec<String>> for Vocabulary {
    fn from(words: Vec<String>) -> Self {
        Vocabulary::from_words(words)
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.words
    }
}

impl Vocabulary {
    /// Duplicates keep their first position.
    pub fn from_words(words: Vec<String>) -> Self {
        let mut index = HashMap::with_capacity(words.len());
        let mut kept = Vec::with_capacity(words.len());
        for w in words {
            if !index.contains_key(&w) {
                index.insert(w.clone(), kept.len() + 1);
                kept.push(w);
            }
        }
        Vocabulary { words: kept, index }
    }

    /// Sorted set of content-branch tokens in `corpus`. With a pretrained
    /// table, only words the table covers get their own row; the rest share
    /// the OOV vector.
    pub fn build(corpus: &Corpus, remove_stop_words: bool, table: Option<&EmbeddingTable>) -> Self {
        let words: BTreeSet<&str> = corpus
            .documents
            .iter()
            .flat_map(|d| d.tokens.iter())
            .map(String::as_str)
            .filter(|t| !(remove_stop_words && is_stop_word(t)))
            .filter(|t| table.is_none_or(|tab| tab.get(t).is_some()))
            .collect();
        Vocabulary::from_words(words.into_iter().map(str::to_string).collect())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Embedding row of `word`, 0 when unknown.
    pub fn id(&self, word: &str) -> usize {
        self.index.get(word).copied().unwrap_or(0)
    }
}

/// One encoded training or evaluation instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    /// Embedding rows of the content tokens, never empty.
    pub ids: Vec<usize>,
    pub emotions: Vec<f64>,
    /// Index into [`EinModel::classes`].
    pub target: usize,
}

/// Inverted-dropout multipliers: each entry is 0 or `1 / (1 - p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DropoutMasks {
    pub content: Vec<f64>,
    pub emotion: Vec<f64>,
}

impl DropoutMasks {
    pub fn sample(config: &EinConfig, rng: &mut Rng) -> Self {
        let draw = |n: usize, p: f64, rng: &mut Rng| -> Vec<f64> {
            if p == 0.0 {
                return vec![1.0; n];
            }
            let keep = 1.0 / (1.0 - p);
            (0..n)
                .map(|_| if rng.gen::<f64>() < p { 0.0 } else { keep })
                .collect()
        };
        let content = draw(config.lstm_units, config.drop_d, rng);
        let emotion = draw(config.dense_a_units, config.drop_c, rng);
        DropoutMasks { content, emotion }
    }
}

/// Intermediate activations of one forward pass.
#[derive(Clone, Debug)]
pub struct Forward {
    inputs: Matrix,
    hidden: Matrix,
    lstm: LstmCache,
    attention: AttentionOutput,
    /// Pre-activation and output of the emotion dense layer.
    za: Vec<f64>,
    ya: Vec<f64>,
    concat: Vec<f64>,
    zb: Vec<f64>,
    yb: Vec<f64>,
    /// Class distribution (`[1 - p, p]` in binary mode).
    pub probs: Vec<f64>,
}

impl Forward {
    pub fn attention_weights(&self) -> &[f64] {
        &self.attention.weights
    }

    pub fn penultimate(&self) -> &[f64] {
        &self.yb
    }
}

/// Label and class distribution returned by [`EinModel::predict`].
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub label: String,
    pub class_index: usize,
    pub distribution: Vec<f64>,
}

/// The emotionally-infused network: an embedding → LSTM → attention content
/// branch, an optional dense emotion branch, and a shared dense + output
/// head.
#[derive(Clone, Debug, PartialEq)]
pub struct EinModel {
    config: EinConfig,
    classes: Vec<String>,
    vocab: Vocabulary,
    emotion_dim: usize,
    params: EinParams,
}

impl EinModel {
    /// Builds a freshly initialised model.
    ///
    /// `classes` are sorted; in binary mode they must be exactly two labels,
    /// one of which is `config.positive_label`, and are stored as
    /// `[negative, positive]`. Rows of `embeddings` (and its OOV vector, if
    /// set) overwrite the random initialisation.
    pub fn new(
        config: EinConfig,
        classes: &[String],
        vocab: Vocabulary,
        emotion_dim: usize,
        embeddings: Option<&EmbeddingTable>,
    ) -> Result<Self> {
        config.validate()?;
        let classes = arrange_classes(&config, classes)?;
        if config.emotion_branch() && emotion_dim == 0 {
            return Err(Error::Config(
                "emotion branch enabled but emotion_dim is 0".into(),
            ));
        }
        if let Some(table) = embeddings {
            if table.dimension() != config.embedding_dim {
                return Err(Error::Config(format!(
                    "embedding table has dimension {}, config expects {}",
                    table.dimension(),
                    config.embedding_dim
                )));
            }
        }
        let shapes = Shapes {
            vocab: vocab.len(),
            embedding_dim: config.embedding_dim,
            lstm_units: config.lstm_units,
            emotion_dim,
            dense_a: config.dense_a_units,
            dense_b: config.dense_b_units,
            outputs: output_width(config.output_mode, classes.len()),
        };
        let mut params = EinParams::init(&shapes, &mut seeded(config.seed));
        if let Some(table) = embeddings {
            let oov = table.oov();
            if oov.iter().any(|&v| v != 0.0) {
                params.embedding.row_mut(0).copy_from_slice(oov);
            }
            for (i, w) in vocab.words().iter().enumerate() {
                if let Some(v) = table.get(w) {
                    params.embedding.row_mut(i + 1).copy_from_slice(v);
                }
            }
        }
        Ok(EinModel {
            config,
            classes,
            vocab,
            emotion_dim,
            params,
        })
    }

    /// Reassembles a model from stored parts, checking every tensor shape.
    pub fn from_parts(
        config: EinConfig,
        classes: Vec<String>,
        vocab: Vocabulary,
        emotion_dim: usize,
        params: EinParams,
    ) -> Result<Self> {
        config.validate()?;
        let model = EinModel {
            config,
            classes,
            vocab,
            emotion_dim,
            params,
        };
        let shapes = model.shapes();
        for (name, m) in model.params.tensors() {
            if m.shape() != shapes.of(name) {
                return Err(Error::Config(format!(
                    "tensor {name} has shape {:?}, expected {:?}",
                    m.shape(),
                    shapes.of(name)
                )));
            }
        }
        Ok(model)
    }

    pub fn config(&self) -> &EinConfig {
        &self.config
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn emotion_dim(&self) -> usize {
        self.emotion_dim
    }

    pub fn params(&self) -> &EinParams {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut EinParams {
        &mut self.params
    }

    pub fn shapes(&self) -> Shapes {
        Shapes {
            vocab: self.vocab.len(),
            embedding_dim: self.config.embedding_dim,
            lstm_units: self.config.lstm_units,
            emotion_dim: self.emotion_dim,
            dense_a: self.config.dense_a_units,
            dense_b: self.config.dense_b_units,
            outputs: output_width(self.config.output_mode, self.classes.len()),
        }
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == label)
    }

    /// Content-branch embedding rows: optional stop-word removal, truncation
    /// to `max_sequence`, and a lone OOV row for documents left empty.
    pub fn encode_tokens(&self, tokens: &[String]) -> Vec<usize> {
        let mut ids: Vec<usize> = tokens
            .iter()
            .filter(|t| !(self.config.remove_stop_words && is_stop_word(t)))
            .take(self.config.max_sequence)
            .map(|t| self.vocab.id(t))
            .collect();
        if ids.is_empty() {
            ids.push(0);
        }
        ids
    }

    /// `n x d` input matrix for `tokens`.
    pub fn embed_sequence(&self, tokens: &[String]) -> Matrix {
        self.embed_ids(&self.encode_tokens(tokens))
    }

    fn embed_ids(&self, ids: &[usize]) -> Matrix {
        let d = self.config.embedding_dim;
        let mut x = Matrix::zeros(ids.len(), d);
        for (r, &id) in ids.iter().enumerate() {
            x.row_mut(r).copy_from_slice(self.params.embedding.row(id));
        }
        x
    }

    /// Encodes a document: content ids, full-stream emotion features and the
    /// class index of its label.
    pub fn encode(&self, doc: &Document, featurizer: &EmotionFeaturizer<'_>) -> Result<Example> {
        let target = self.class_index(&doc.label).ok_or_else(|| {
            Error::Data(format!(
                "document {} has unknown label '{}'",
                doc.id, doc.label
            ))
        })?;
        Ok(Example {
            ids: self.encode_tokens(&doc.tokens),
            emotions: featurizer.values(&doc.tokens),
            target,
        })
    }

    pub fn check_input(&self, ids: &[usize], emotions: &[f64]) -> Result<()> {
        if self.config.emotion_branch() && emotions.len() != self.emotion_dim {
            return Err(Error::Config(format!(
                "emotion vector has length {}, model expects {}",
                emotions.len(),
                self.emotion_dim
            )));
        }
        if ids.is_empty() {
            return Err(Error::Config("empty token sequence".into()));
        }
        if let Some(&bad) = ids.iter().find(|&&i| i > self.vocab.len()) {
            return Err(Error::Config(format!(
                "token id {bad} outside the vocabulary"
            )));
        }
        Ok(())
    }

    /// Full forward pass. Dropout applies only when `masks` is given.
    pub fn forward(
        &self,
        ids: &[usize],
        emotions: &[f64],
        masks: Option<&DropoutMasks>,
    ) -> Forward {
        let p = &self.params;
        let act = self.config.hidden_activation;
        let inputs = self.embed_ids(ids);
        let (hidden, lstm) = lstm_forward(&inputs, self.lstm_weights());
        let attention = attention_forward(&hidden, p.attn_w.as_slice(), p.attn_b.as_slice()[0]);

        let mut concat = attention.context.clone();
        if let Some(m) = masks {
            concat.iter_mut().zip(&m.content).for_each(|(v, k)| *v *= k);
        }
        let (mut za, mut ya) = (Vec::new(), Vec::new());
        if self.config.emotion_branch() {
            za = p.dense_a_b.as_slice().to_vec();
            p.dense_a_w.matvec_acc(emotions, &mut za);
            ya = za.iter().map(|&z| act.apply(z)).collect();
            let mut dropped = ya.clone();
            if let Some(m) = masks {
                dropped
                    .iter_mut()
                    .zip(&m.emotion)
                    .for_each(|(v, k)| *v *= k);
            }
            concat.extend(dropped);
        }
        let mut zb = p.dense_b_b.as_slice().to_vec();
        p.dense_b_w.matvec_acc(&concat, &mut zb);
        let yb: Vec<f64> = zb.iter().map(|&z| act.apply(z)).collect();
        let mut zo = p.out_b.as_slice().to_vec();
        p.out_w.matvec_acc(&yb, &mut zo);
        let probs = match self.config.output_mode {
            OutputMode::SoftmaxMulticlass => softmax(&zo),
            OutputMode::SigmoidBinary => {
                let s = sigmoid(zo[0]);
                vec![1.0 - s, s]
            }
        };
        Forward {
            inputs,
            hidden,
            lstm,
            attention,
            za,
            ya,
            concat,
            zb,
            yb,
            probs,
        }
    }

    /// Gradient of the single-example loss, scaled by `scale`. The
    /// embedding gradient is returned as `(row, gradient)` pairs and the
    /// `embedding` tensor of the returned parameters is left empty.
    ///
    /// The output gradient is `p - y`, i.e. the clamp applied to the
    /// reported loss is not differentiated through.
    fn backward(
        &self,
        fwd: &Forward,
        ex: &Example,
        masks: Option<&DropoutMasks>,
        scale: f64,
    ) -> (EinParams, Vec<(usize, Vec<f64>)>) {
        let p = &self.params;
        let act = self.config.hidden_activation;
        let mut g = p.zeros_like_dense();
        let mut dzo = match self.config.output_mode {
            OutputMode::SoftmaxMulticlass => fwd.probs.clone(),
            OutputMode::SigmoidBinary => vec![fwd.probs[1]],
        };
        match self.config.output_mode {
            OutputMode::SoftmaxMulticlass => dzo[ex.target] -= 1.0,
            OutputMode::SigmoidBinary => dzo[0] -= ex.target as f64,
        }
        dzo.iter_mut().for_each(|v| *v *= scale);

        g.out_w.outer_acc(&dzo, &fwd.yb);
        g.out_b.as_mut_slice().copy_from_slice(&dzo);
        let mut dyb = vec![0.0; fwd.yb.len()];
        p.out_w.matvec_t_acc(&dzo, &mut dyb);
        let dzb: Vec<f64> = dyb
            .iter()
            .zip(fwd.zb.iter().zip(&fwd.yb))
            .map(|(d, (&z, &y))| d * act.derivative(z, y))
            .collect();
        g.dense_b_w.outer_acc(&dzb, &fwd.concat);
        g.dense_b_b.as_mut_slice().copy_from_slice(&dzb);
        let mut dconcat = vec![0.0; fwd.concat.len()];
        p.dense_b_w.matvec_t_acc(&dzb, &mut dconcat);

        let u = self.config.lstm_units;
        let (dctx, dya) = dconcat.split_at_mut(u);
        if let Some(m) = masks {
            dctx.iter_mut().zip(&m.content).for_each(|(v, k)| *v *= k);
            dya.iter_mut().zip(&m.emotion).for_each(|(v, k)| *v *= k);
        }
        if self.config.emotion_branch() {
            let dza: Vec<f64> = dya
                .iter()
                .zip(fwd.za.iter().zip(&fwd.ya))
                .map(|(d, (&z, &y))| d * act.derivative(z, y))
                .collect();
            g.dense_a_w.outer_acc(&dza, &ex.emotions);
            g.dense_a_b.as_mut_slice().copy_from_slice(&dza);
        }

        let mut db = 0.0;
        let d_hidden = attention_backward(
            &fwd.hidden,
            &fwd.attention,
            dctx,
            p.attn_w.as_slice(),
            g.attn_w.as_mut_slice(),
            &mut db,
        );
        g.attn_b.as_mut_slice()[0] = db;
        let d_inputs = lstm_backward(
            &fwd.inputs,
            &fwd.hidden,
            &fwd.lstm,
            &d_hidden,
            self.lstm_weights(),
            LstmGrads {
                wx: &mut g.lstm_wx,
                wh: &mut g.lstm_wh,
                b: &mut g.lstm_b,
            },
        );
        let rows = if self.config.trainable_embeddings {
            ex.ids
                .iter()
                .enumerate()
                .map(|(r, &id)| (id, d_inputs.row(r).to_vec()))
                .collect()
        } else {
            Vec::new()
        };
        (g, rows)
    }

    /// Mean loss over `batch` and its gradient w.r.t. every parameter.
    ///
    /// Examples are processed in parallel; partial gradients are summed in
    /// batch order, so the result does not depend on thread scheduling.
    pub fn loss_and_gradient(
        &self,
        batch: &[Example],
        masks: Option<&[DropoutMasks]>,
    ) -> (f64, EinParams) {
        let scale = 1.0 / batch.len().max(1) as f64;
        let parts: Vec<(f64, EinParams, Vec<(usize, Vec<f64>)>)> = batch
            .par_iter()
            .enumerate()
            .map(|(i, ex)| {
                let m = masks.map(|ms| &ms[i]);
                let fwd = self.forward(&ex.ids, &ex.emotions, m);
                let l = loss(&fwd.probs, ex.target, self.config.output_mode);
                let (g, rows) = self.backward(&fwd, ex, m, scale);
                (l, g, rows)
            })
            .collect();
        let mut total = self.params.zeros_like();
        let mut sum = 0.0;
        for (l, g, rows) in parts {
            sum += l;
            for ((name, t), (_, s)) in total.tensors_mut().into_iter().zip(g.tensors()) {
                if name == "embedding" {
                    continue;
                }
                t.as_mut_slice()
                    .iter_mut()
                    .zip(s.as_slice())
                    .for_each(|(a, b)| *a += b);
            }
            for (id, row) in rows {
                total
                    .embedding
                    .row_mut(id)
                    .iter_mut()
                    .zip(&row)
                    .for_each(|(a, b)| *a += b);
            }
        }
        (sum * scale, total)
    }

    /// Mean inference-mode loss over `examples`.
    pub fn mean_loss(&self, examples: &[Example]) -> f64 {
        if examples.is_empty() {
            return 0.0;
        }
        let losses: Vec<f64> = examples
            .par_iter()
            .map(|ex| self.example_loss(ex))
            .collect();
        losses.iter().sum::<f64>() / examples.len() as f64
    }

    /// Inference-mode loss of one example.
    pub fn example_loss(&self, ex: &Example) -> f64 {
        loss(
            &self.forward(&ex.ids, &ex.emotions, None).probs,
            ex.target,
            self.config.output_mode,
        )
    }

    /// Class distribution for pre-encoded input.
    pub fn predict_proba(&self, ids: &[usize], emotions: &[f64]) -> Result<Vec<f64>> {
        self.check_input(ids, emotions)?;
        Ok(self.forward(ids, emotions, None).probs)
    }

    /// Predicted class index for a distribution: argmax (lowest index on
    /// ties) or `p >= 0.5` for the positive class in binary mode.
    pub fn decide(&self, probs: &[f64]) -> usize {
        match self.config.output_mode {
            OutputMode::SigmoidBinary => usize::from(probs[1] >= 0.5),
            OutputMode::SoftmaxMulticlass => argmax(probs),
        }
    }

    pub fn predict_example(&self, ex: &Example) -> Result<usize> {
        Ok(self.decide(&self.predict_proba(&ex.ids, &ex.emotions)?))
    }

    /// Predicted classes for many examples, in order.
    pub fn predict_examples(&self, examples: &[Example]) -> Result<Vec<usize>> {
        for ex in examples {
            self.check_input(&ex.ids, &ex.emotions)?;
        }
        Ok(examples
            .par_iter()
            .map(|ex| self.decide(&self.forward(&ex.ids, &ex.emotions, None).probs))
            .collect())
    }

    /// Classifies a raw document, computing its emotion vector from
    /// `lexicons` (which must match the ones used in training).
    pub fn predict(&self, doc: &Document, lexicons: &[Lexicon]) -> Result<Prediction> {
        let emotions = EmotionFeaturizer::new(lexicons).values(&doc.tokens);
        let ids = self.encode_tokens(&doc.tokens);
        let distribution = self.predict_proba(&ids, &emotions)?;
        let class_index = self.decide(&distribution);
        Ok(Prediction {
            label: self.classes[class_index].clone(),
            class_index,
            distribution,
        })
    }

    /// Output of the last hidden dense layer at inference.
    pub fn penultimate(&self, ids: &[usize], emotions: &[f64]) -> Result<Vec<f64>> {
        self.check_input(ids, emotions)?;
        Ok(self.forward(ids, emotions, None).yb)
    }

    /// Copy with every parameter rounded to `f32`, which is exactly what a
    /// checkpoint stores.
    pub fn quantized(&self) -> Self {
        let mut m = self.clone();
        for (_, t) in m.params.tensors_mut() {
            t.as_mut_slice()
                .iter_mut()
                .for_each(|v| *v = *v as f32 as f64);
        }
        m
    }

    fn lstm_weights(&self) -> LstmWeights<'_> {
        LstmWeights {
            wx: &self.params.lstm_wx,
            wh: &self.params.lstm_wh,
            b: &self.params.lstm_b,
        }
    }
}

impl EinParams {
    /// Zeroed copy without the (potentially large) embedding matrix.
    fn zeros_like_dense(&self) -> EinParams {
        let z = |m: &Matrix| Matrix::zeros(m.rows(), m.cols());
        EinParams {
            embedding: Matrix::zeros(0, self.embedding.cols()),
            lstm_wx: z(&self.lstm_wx),
            lstm_wh: z(&self.lstm_wh),
            lstm_b: z(&self.lstm_b),
            attn_w: z(&self.attn_w),
            attn_b: z(&self.attn_b),
            dense_a_w: z(&self.dense_a_w),
            dense_a_b: z(&self.dense_a_b),
            dense_b_w: z(&self.dense_b_w),
            dense_b_b: z(&self.dense_b_b),
            out_w: z(&self.out_w),
            out_b: z(&self.out_b),
        }
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn output_width(mode: OutputMode, classes: usize) -> usize {
    match mode {
        OutputMode::SoftmaxMulticlass => classes,
        OutputMode::SigmoidBinary => 1,
    }
}

fn arrange_classes(config: &EinConfig, classes: &[String]) -> Result<Vec<String>> {
    let mut sorted: Vec<String> = classes
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    match config.output_mode {
        OutputMode::SoftmaxMulticlass => {
            if sorted.len() < 2 {
                return Err(Error::Config(format!(
                    "need at least 2 classes, got {}",
                    sorted.len()
                )));
            }
            Ok(sorted)
        }
        OutputMode::SigmoidBinary => {
            let positive = config.positive_label.as_deref().unwrap_or_default();
            if sorted.len() != 2 || !sorted.iter().any(|c| c == positive) {
                return Err(Error::Config(format!(
                    "binary mode needs exactly two classes including '{positive}', got {sorted:?}"
                )));
            }
            if sorted[0] == positive {
                sorted.swap(0, 1);
            }
            Ok(sorted)
        }
    }
}
