//! Labeled news/tweet corpora: ingestion, cleaning and splitting.

mod io;
mod split;
mod tokenize;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use io::{load_corpus, read_csv, read_jsonl, write_csv, write_jsonl, CorpusFormat};
pub use split::{kfold, kfold_indices, split, Fold, Split, SplitSpec};
pub use tokenize::tokenize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    NewsArticles,
    Twitter,
    Other,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::NewsArticles => "news_articles",
            Source::Twitter => "twitter",
            Source::Other => "other",
        }
    }

    /// Default minimum token count below which a document is dropped.
    pub fn default_min_tokens(self) -> usize {
        match self {
            Source::Twitter => 5,
            Source::NewsArticles | Source::Other => 20,
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "news_articles" => Ok(Source::NewsArticles),
            "twitter" => Ok(Source::Twitter),
            "other" => Ok(Source::Other),
            other => Err(Error::Validation(format!("unknown source '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub tokens: Vec<String>,
    pub label: String,
    pub source: Source,
}

impl Document {
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        label: impl Into<String>,
        source: Source,
    ) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        Document {
            id: id.into(),
            text,
            tokens,
            label: label.into(),
            source,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub labels: BTreeSet<String>,
    pub provenance: Source,
}

impl Corpus {
    /// Builds a corpus whose label set is the set of labels observed.
    pub fn new(documents: Vec<Document>) -> Self {
        let labels = documents.iter().map(|d| d.label.clone()).collect();
        let provenance = common_source(&documents);
        Corpus {
            documents,
            labels,
            provenance,
        }
    }

    /// Builds a corpus with an explicitly declared label set.
    pub fn with_labels(documents: Vec<Document>, labels: BTreeSet<String>) -> Result<Self> {
        if let Some(d) = documents.iter().find(|d| !labels.contains(&d.label)) {
            return Err(Error::Validation(format!(
                "document '{}' has undeclared label '{}'",
                d.id, d.label
            )));
        }
        let provenance = common_source(&documents);
        Ok(Corpus {
            documents,
            labels,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Sub-corpus of the given document indices, keeping the declared labels.
    pub fn subset(&self, indices: &[usize]) -> Corpus {
        let documents: Vec<Document> = indices.iter().map(|&i| self.documents[i].clone()).collect();
        Corpus {
            provenance: if documents.is_empty() {
                self.provenance
            } else {
                common_source(&documents)
            },
            documents,
            labels: self.labels.clone(),
        }
    }

    /// Label names in sorted order; class indices everywhere follow this order.
    pub fn label_list(&self) -> Vec<String> {
        self.labels.iter().cloned().collect()
    }

    /// Relabels documents through `map`; labels missing from `map` are kept.
    pub fn relabel(&self, map: &BTreeMap<String, String>) -> Corpus {
        let documents = self
            .documents
            .iter()
            .map(|d| Document {
                label: map
                    .get(&d.label)
                    .cloned()
                    .unwrap_or_else(|| d.label.clone()),
                ..d.clone()
            })
            .collect();
        Corpus::new(documents)
    }
}

fn common_source(documents: &[Document]) -> Source {
    match documents.first() {
        Some(first) if documents.iter().all(|d| d.source == first.source) => first.source,
        _ => Source::Other,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessOptions {
    pub max_tokens: usize,
    pub min_tokens: usize,
    pub dedup: bool,
}

impl PreprocessOptions {
    pub fn for_source(source: Source) -> Self {
        PreprocessOptions {
            max_tokens: 300,
            min_tokens: source.default_min_tokens(),
            dedup: true,
        }
    }
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions::for_source(Source::NewsArticles)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessReport {
    pub input: usize,
    pub truncated: usize,
    pub too_short: usize,
    pub duplicate: usize,
    pub output: usize,
}

/// Truncates, drops short documents and removes exact token-sequence
/// duplicates (first occurrence wins). Input order is preserved.
pub fn preprocess(
    corpus: &Corpus,
    options: PreprocessOptions,
) -> Result<(Corpus, PreprocessReport)> {
    if options.min_tokens == 0 || options.max_tokens < options.min_tokens {
        return Err(Error::Config(format!(
            "need max_tokens >= min_tokens >= 1, got max {} min {}",
            options.max_tokens, options.min_tokens
        )));
    }
    let mut report = PreprocessReport {
        input: corpus.len(),
        ..Default::default()
    };
    let mut seen: HashSet<Vec<String>> = HashSet::new();
    let mut kept = Vec::with_capacity(corpus.len());
    for doc in &corpus.documents {
        let mut doc = doc.clone();
        if doc.tokens.len() > options.max_tokens {
            doc.tokens.truncate(options.max_tokens);
            report.truncated += 1;
        }
        if doc.tokens.len() < options.min_tokens {
            report.too_short += 1;
            continue;
        }
        if options.dedup && !seen.insert(doc.tokens.clone()) {
            report.duplicate += 1;
            continue;
        }
        kept.push(doc);
    }
    report.output = kept.len();
    let out = Corpus {
        provenance: corpus.provenance,
        labels: corpus.labels.clone(),
        documents: kept,
    };
    Ok((out, report))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassStat {
    pub label: String,
    pub count: usize,
    pub percentage: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub total: usize,
    pub classes: Vec<ClassStat>,
}

impl CorpusStats {
    pub fn get(&self, label: &str) -> Option<&ClassStat> {
        self.classes.iter().find(|c| c.label == label)
    }
}

/// Per-class document counts and percentages (classes with no documents are
/// omitted).
pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for d in &corpus.documents {
        *counts.entry(d.label.as_str()).or_default() += 1;
    }
    let total = corpus.len();
    let classes = counts
        .into_iter()
        .map(|(label, count)| ClassStat {
            label: label.to_string(),
            count,
            percentage: 100.0 * count as f64 / total as f64,
        })
        .collect();
    CorpusStats { total, classes }
}
