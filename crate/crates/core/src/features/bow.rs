use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document};
use crate::{Error, Result};

/// Sparse vector with strictly increasing indices.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    pub dim: usize,
    pub entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for &(i, x) in &self.entries {
            v[i] = x;
        }
        v
    }
}

/// Count-based bag-of-words vocabulary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BagOfWords {
    vocabulary: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl BagOfWords {
    /// Keeps the `max_vocab` most frequent tokens (by total count, ties broken
    /// lexicographically) among those with document frequency >= `min_df`.
    pub fn fit(corpus: &Corpus, min_df: usize, max_vocab: usize) -> Result<Self> {
        let mut counts: HashMap<&str, (usize, usize)> = HashMap::new();
        for doc in &corpus.documents {
            let mut seen = HashSet::new();
            for t in &doc.tokens {
                let entry = counts.entry(t.as_str()).or_default();
                entry.0 += 1;
                if seen.insert(t.as_str()) {
                    entry.1 += 1;
                }
            }
        }
        let mut candidates: Vec<(&str, usize)> = counts
            .into_iter()
            .filter(|(_, (_, df))| *df >= min_df)
            .map(|(w, (tf, _))| (w, tf))
            .collect();
        candidates.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        candidates.truncate(max_vocab);
        if candidates.is_empty() {
            return Err(Error::Data("bag-of-words vocabulary is empty".into()));
        }
        Ok(Self::from_vocabulary(
            candidates.into_iter().map(|(w, _)| w.to_string()).collect(),
        ))
    }

    pub fn from_vocabulary(vocabulary: Vec<String>) -> Self {
        let index = vocabulary
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        BagOfWords { vocabulary, index }
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn len(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocabulary.is_empty()
    }

    pub fn transform(&self, doc: &Document) -> SparseVector {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for t in &doc.tokens {
            if let Some(&i) = self.index.get(t) {
                *counts.entry(i).or_default() += 1.0;
            }
        }
        SparseVector {
            dim: self.vocabulary.len(),
            entries: counts.into_iter().collect(),
        }
    }
}

/// Fits a vocabulary on `corpus` and returns it with one count vector per document.
pub fn bow_features(
    corpus: &Corpus,
    min_df: usize,
    max_vocab: usize,
) -> Result<(BagOfWords, Vec<SparseVector>)> {
    let bow = BagOfWords::fit(corpus, min_df, max_vocab)?;
    let vectors = corpus.documents.iter().map(|d| bow.transform(d)).collect();
    Ok((bow, vectors))
}
