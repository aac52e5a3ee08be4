//! Flat `key = value` experiment configuration.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! # full-line comment
//! key = value
//! ```
//!
//! Keys are dotted lowercase identifiers, values run to the end of the line
//! with surrounding whitespace trimmed. Blank lines are ignored, a key may
//! appear only once and unknown keys are rejected. Relative paths are
//! resolved against the directory holding the config file.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ein_core::classifiers::{ForestParams, LogisticParams, MaxFeatures, SvmParams};
use ein_core::corpus::{CorpusFormat, PreprocessOptions};
use ein_core::neural::{EinConfig, Preset};
use ein_core::{Error, Result, SchemaName, Source, SplitSpec};
use sha2::{Digest, Sha256};

/// Parsed but not yet interpreted entries, with their 1-based line numbers.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
    origin: String,
}

impl RawConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: origin.to_string(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
            let key = key.trim().to_ascii_lowercase();
            let valid = !key.is_empty()
                && key
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '-');
            if !valid {
                return Err(err(format!("invalid key '{key}'")));
            }
            if let Some((_, first)) = entries.insert(key.clone(), (value.trim().to_string(), i + 1))
            {
                return Err(err(format!(
                    "duplicate key '{key}' (first set on line {first})"
                )));
            }
        }
        Ok(RawConfig {
            entries,
            origin: origin.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Sets or replaces a key, as done for command-line overrides.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries
            .insert(key.to_ascii_lowercase(), (value.into(), 0));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    /// SHA-256 over the sorted `key=value` lines, leaving out `out`: where
    /// results are written does not change them.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, (v, _)) in &self.entries {
            if k != "out" {
                h.update(format!("{k}={v}\n").as_bytes());
            }
        }
        hex::encode(h.finalize())
    }
}

/// Which representation classical models are trained on.
#[derive(Clone, Debug, PartialEq)]
pub enum FeatureSet {
    Emotion,
    BagOfWords {
        min_df: usize,
        max_vocab: usize,
    },
    /// Averaged word embeddings; needs `embeddings`.
    Embedding,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    /// The two-branch network, or the LSTM-only baseline when
    /// `dense_a_units` is 0.
    Ein(EinConfig),
    RandomForest(ForestParams, FeatureSet),
    LinearSvm(SvmParams, FeatureSet),
    Logistic(LogisticParams, FeatureSet),
    Majority,
    Random,
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Ein(c) if c.emotion_branch() => "ein",
            ModelSpec::Ein(_) => "lstm",
            ModelSpec::RandomForest(..) => "random_forest",
            ModelSpec::LinearSvm(..) => "linear_svm",
            ModelSpec::Logistic(..) => "logistic_regression",
            ModelSpec::Majority => "majority",
            ModelSpec::Random => "random",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Evaluation {
    Holdout(SplitSpec),
    KFold { k: usize, stratified: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisSettings {
    pub bins: usize,
    pub top_n: usize,
    pub alpha: f64,
    /// Label of the real class; every other label counts as false.
    pub real_label: String,
    /// Hinge weight of the SVM fitted for the top-emotion ranking.
    pub svm_c: f64,
    /// Previously trained linear model to take coefficients from instead.
    pub linear_model: Option<PathBuf>,
}

/// Preprocessing overrides; unset fields fall back to the corpus source's
/// defaults once the corpus is loaded.
#[derive(Clone, Debug, PartialEq)]
pub struct PreprocessSettings {
    pub enabled: bool,
    pub max_tokens: Option<usize>,
    pub min_tokens: Option<usize>,
    pub dedup: bool,
}

impl PreprocessSettings {
    pub fn resolve(&self, source: Source) -> PreprocessOptions {
        let mut o = PreprocessOptions::for_source(source);
        if let Some(m) = self.max_tokens {
            o.max_tokens = m;
        }
        if let Some(m) = self.min_tokens {
            o.min_tokens = m;
        }
        o.dedup = self.dedup;
        o
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub corpus: PathBuf,
    pub corpus_format: CorpusFormat,
    pub preprocess: PreprocessSettings,
    /// In builtin schema order.
    pub lexicons: Vec<(SchemaName, PathBuf)>,
    pub lexicon_mapping: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub word_lists: Vec<(String, PathBuf)>,
    /// Second corpus for the lexical mean-value comparison.
    pub compare_corpus: Option<PathBuf>,
    pub model: ModelSpec,
    pub evaluation: Evaluation,
    pub analysis: AnalysisSettings,
    pub seed: u64,
    pub out: PathBuf,
    pub hash: String,
}

/// Seed streams derived from the master seed.
pub mod streams {
    pub const SPLIT: u64 = 1;
    pub const MODEL: u64 = 2;
    pub const BASELINE: u64 = 3;
    pub const PROJECTION: u64 = 4;
}

struct Reader<'a> {
    raw: &'a RawConfig,
    used: std::collections::BTreeSet<String>,
}

impl Reader<'_> {
    fn str(&mut self, key: &str) -> Option<String> {
        self.used.insert(key.to_string());
        self.raw.get(key).map(str::to_string)
    }

    fn parse<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        match self.str(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| self.bad(key, &v, e)),
        }
    }

    fn or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T>
    where
        T::Err: Display,
    {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    fn bad(&self, key: &str, value: &str, e: impl Display) -> Error {
        let line = self.raw.entries.get(key).map_or(0, |(_, l)| *l);
        let at = if line > 0 {
            format!("{}:{line}", self.raw.origin)
        } else {
            "command line".to_string()
        };
        Error::Config(format!("{at}: bad value '{value}' for {key}: {e}"))
    }

    fn path(&mut self, key: &str, base: &Path) -> Option<PathBuf> {
        self.str(key).map(|p| base.join(p))
    }
}

impl ExperimentConfig {
    /// Reads and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let raw = RawConfig::load(path)?;
        Self::from_raw(&raw, path.parent().unwrap_or(Path::new(".")))
    }

    /// Interprets `raw`, resolving relative paths against `base`, and
    /// validates the result.
    pub fn from_raw(raw: &RawConfig, base: &Path) -> Result<Self> {
        let mut r = Reader {
            raw,
            used: Default::default(),
        };
        let seed: u64 = r
            .parse("seed")?
            .ok_or_else(|| Error::Config("'seed' is mandatory".into()))?;
        let corpus = r
            .path("corpus", base)
            .ok_or_else(|| Error::Config("'corpus' is mandatory".into()))?;
        let corpus_format = match r.parse::<CorpusFormat>("corpus.format")? {
            Some(f) => f,
            None => match corpus.extension().and_then(|e| e.to_str()) {
                Some("csv") => CorpusFormat::Csv,
                _ => CorpusFormat::Jsonl,
            },
        };
        let preprocess = PreprocessSettings {
            enabled: r.or("preprocess", true)?,
            max_tokens: r.parse("preprocess.max_tokens")?,
            min_tokens: r.parse("preprocess.min_tokens")?,
            dedup: r.or("preprocess.dedup", true)?,
        };

        let mut lexicons = Vec::new();
        for name in SchemaName::ALL {
            let key = format!("lexicon.{}", name.as_str().to_ascii_lowercase());
            if let Some(p) = r.path(&key, base) {
                lexicons.push((name, p));
            }
        }
        let lexicon_mapping = r.path("lexicon.mapping", base);
        let embeddings = r.path("embeddings", base);
        let compare_corpus = r.path("compare.corpus", base);
        let list_keys: Vec<String> = raw
            .entries
            .keys()
            .filter(|k| k.starts_with("wordlist."))
            .cloned()
            .collect();
        let mut word_lists = Vec::new();
        for key in list_keys {
            let name = key["wordlist.".len()..].to_string();
            word_lists.push((name, r.path(&key, base).expect("key exists")));
        }

        let model_name = r.str("model").unwrap_or_else(|| "ein".into());
        let model_seed = ein_core::rng::derive_seed(seed, streams::MODEL);
        let model = match model_name.as_str() {
            "ein" | "lstm" => ModelSpec::Ein(ein_config(&mut r, model_name == "lstm", model_seed)?),
            "random_forest" => {
                let d = ForestParams::default();
                let max_features = match r.str("forest.max_features").as_deref() {
                    None | Some("sqrt") => MaxFeatures::Sqrt,
                    Some("all") => MaxFeatures::All,
                    Some(n) => MaxFeatures::Count(
                        n.parse().map_err(|e| r.bad("forest.max_features", n, e))?,
                    ),
                };
                let params = ForestParams {
                    n_trees: r.or("forest.n_trees", d.n_trees)?,
                    max_depth: r.parse("forest.max_depth")?,
                    max_features,
                    min_samples_leaf: r.or("forest.min_samples_leaf", d.min_samples_leaf)?,
                    bootstrap: r.or("forest.bootstrap", d.bootstrap)?,
                    seed: model_seed,
                };
                ModelSpec::RandomForest(params, feature_set(&mut r)?)
            }
            "linear_svm" => {
                let d = SvmParams::default();
                let params = SvmParams {
                    c: r.or("svm.c", d.c)?,
                    epochs: r.or("svm.epochs", d.epochs)?,
                    tolerance: r.or("svm.tolerance", d.tolerance)?,
                    seed: model_seed,
                };
                ModelSpec::LinearSvm(params, feature_set(&mut r)?)
            }
            "logistic_regression" => {
                let d = LogisticParams::default();
                let params = LogisticParams {
                    l2: r.or("logistic.l2", d.l2)?,
                    epochs: r.or("logistic.epochs", d.epochs)?,
                    seed: model_seed,
                };
                ModelSpec::Logistic(params, feature_set(&mut r)?)
            }
            "majority" => ModelSpec::Majority,
            "random" => ModelSpec::Random,
            other => {
                return Err(Error::Config(format!(
                    "unknown model '{other}' (expected ein, lstm, random_forest, linear_svm, \
                     logistic_regression, majority or random)"
                )))
            }
        };

        let split_seed = ein_core::rng::derive_seed(seed, streams::SPLIT);
        let stratified = r.or("split.stratified", true)?;
        let evaluation = match r.parse::<usize>("kfold")? {
            Some(k) => Evaluation::KFold { k, stratified },
            None => {
                let d = SplitSpec::default();
                Evaluation::Holdout(SplitSpec {
                    test_fraction: r.or("split.test_fraction", d.test_fraction)?,
                    validation_fraction: r
                        .or("split.validation_fraction", d.validation_fraction)?,
                    seed: split_seed,
                    stratified,
                })
            }
        };

        let analysis = AnalysisSettings {
            bins: r.or("analysis.bins", ein_core::analysis::DEFAULT_BINS)?,
            top_n: r.or("analysis.top_n", 3)?,
            alpha: r.or("analysis.alpha", 0.05)?,
            real_label: r
                .str("analysis.real_label")
                .unwrap_or_else(|| "real_news".into()),
            svm_c: r.or("analysis.svm_c", 1.0)?,
            linear_model: r.path("analysis.linear_model", base),
        };
        let out = r.path("out", base).unwrap_or_else(|| base.join("out"));

        if let Some(unknown) = raw.entries.keys().find(|k| !r.used.contains(*k)) {
            let line = raw.entries[unknown].1;
            return Err(Error::Config(format!(
                "{}:{line}: unknown key '{unknown}'",
                raw.origin
            )));
        }

        let config = ExperimentConfig {
            corpus,
            corpus_format,
            preprocess,
            lexicons,
            lexicon_mapping,
            embeddings,
            word_lists,
            compare_corpus,
            model,
            evaluation,
            analysis,
            seed,
            out,
            hash: raw.hash(),
        };
        config.validate()?;
        Ok(config)
    }

    /// Checks settings and that every referenced input file exists.
    pub fn validate(&self) -> Result<()> {
        let mut inputs: Vec<(String, &Path)> = vec![("corpus".into(), &self.corpus)];
        for (name, p) in &self.lexicons {
            inputs.push((format!("lexicon.{}", name.as_str().to_ascii_lowercase()), p));
        }
        for (key, p) in [
            ("lexicon.mapping", &self.lexicon_mapping),
            ("embeddings", &self.embeddings),
            ("compare.corpus", &self.compare_corpus),
            ("analysis.linear_model", &self.analysis.linear_model),
        ] {
            if let Some(p) = p {
                inputs.push((key.into(), p));
            }
        }
        for (name, p) in &self.word_lists {
            inputs.push((format!("wordlist.{name}"), p));
        }
        for (key, path) in inputs {
            if !path.is_file() {
                return Err(Error::Config(format!(
                    "{key}: no such file {}",
                    path.display()
                )));
            }
        }
        match &self.model {
            ModelSpec::Ein(c) => {
                c.validate()?;
                if c.emotion_branch() && self.lexicons.is_empty() {
                    return Err(Error::Config(
                        "the emotion branch needs at least one lexicon".into(),
                    ));
                }
            }
            ModelSpec::RandomForest(_, f)
            | ModelSpec::LinearSvm(_, f)
            | ModelSpec::Logistic(_, f) => {
                if *f == FeatureSet::Emotion && self.lexicons.is_empty() {
                    return Err(Error::Config(
                        "emotion features need at least one lexicon".into(),
                    ));
                }
                if *f == FeatureSet::Embedding && self.embeddings.is_none() {
                    return Err(Error::Config("embedding features need 'embeddings'".into()));
                }
            }
            ModelSpec::Majority | ModelSpec::Random => {}
        }
        match &self.evaluation {
            Evaluation::Holdout(s) => s.validate()?,
            Evaluation::KFold { k, .. } if *k < 2 => {
                return Err(Error::Config(format!("kfold must be at least 2, got {k}")))
            }
            Evaluation::KFold { .. } => {}
        }
        let a = &self.analysis;
        if a.bins < 2 {
            return Err(Error::Config(format!(
                "analysis.bins must be at least 2, got {}",
                a.bins
            )));
        }
        if !(a.alpha > 0.0 && a.alpha < 1.0) {
            return Err(Error::Config(format!(
                "analysis.alpha must lie in (0,1), got {}",
                a.alpha
            )));
        }
        if a.top_n == 0 {
            return Err(Error::Config("analysis.top_n must be at least 1".into()));
        }
        Ok(())
    }
}

fn feature_set(r: &mut Reader) -> Result<FeatureSet> {
    Ok(match r.str("features").as_deref().unwrap_or("emotion") {
        "emotion" => FeatureSet::Emotion,
        "bow" => FeatureSet::BagOfWords {
            min_df: r.or("bow.min_df", 2)?,
            max_vocab: r.or("bow.max_vocab", 20_000)?,
        },
        "embedding" => FeatureSet::Embedding,
        other => {
            return Err(Error::Config(format!(
                "unknown feature set '{other}' (expected emotion, bow or embedding)"
            )))
        }
    })
}

fn ein_config(r: &mut Reader, lstm_only: bool, seed: u64) -> Result<EinConfig> {
    let mut c = match r.parse::<Preset>("ein.preset")? {
        Some(p) => EinConfig::preset(p),
        None => EinConfig::default(),
    };
    macro_rules! field {
        ($($name:ident),+) => {
            $(if let Some(v) = r.parse(concat!("ein.", stringify!($name)))? {
                c.$name = v;
            })+
        };
    }
    field!(
        embedding_dim,
        lstm_units,
        dense_a_units,
        dense_b_units,
        batch_size,
        hidden_activation,
        optimizer,
        drop_c,
        drop_d,
        max_sequence,
        output_mode,
        remove_stop_words,
        trainable_embeddings,
        early_stop_patience,
        max_epochs,
        monitor_train_accuracy
    );
    if let Some(lr) = r.parse("ein.learning_rate")? {
        c.learning_rate = Some(lr);
    }
    if let Some(p) = r.str("ein.positive_label") {
        c.positive_label = Some(p);
    }
    if lstm_only {
        c.dense_a_units = 0;
    }
    c.seed = seed;
    Ok(c)
}
