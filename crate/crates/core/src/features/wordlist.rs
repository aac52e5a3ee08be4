use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document};
use crate::{Error, Result};

/// A named set of lowercase words (e.g. sexual or insulting terms).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordList {
    pub name: String,
    pub words: BTreeSet<String>,
}

impl WordList {
    pub fn new<I, S>(name: impl Into<String>, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        WordList {
            name: name.into(),
            words: words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .collect(),
        }
    }

    /// One word per line; blank lines and `#` comments are skipped.
    pub fn load(name: impl Into<String>, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let list = WordList::new(
            name,
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        );
        if list.words.is_empty() {
            return Err(Error::Validation(format!(
                "word list {} is empty",
                path.display()
            )));
        }
        Ok(list)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }
}

/// Share of the document's tokens that belong to `list` (0 for empty documents).
pub fn lexical_mean_value(doc: &Document, list: &WordList) -> f64 {
    if doc.tokens.is_empty() {
        return 0.0;
    }
    let hits = doc.tokens.iter().filter(|t| list.contains(t)).count();
    hits as f64 / doc.tokens.len() as f64
}

/// Unweighted mean of the per-document values.
pub fn corpus_lexical_mean(corpus: &Corpus, list: &WordList) -> f64 {
    if corpus.is_empty() {
        return 0.0;
    }
    corpus
        .documents
        .iter()
        .map(|d| lexical_mean_value(d, list))
        .sum::<f64>()
        / corpus.len() as f64
}
