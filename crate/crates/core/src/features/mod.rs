//! Document representations: emotion frequencies, bag-of-words, averaged
//! embeddings and word-list statistics.
//!
//! The emotion vector of a document concatenates one block per lexicon, in
//! lexicon order. Within a block, coordinate `e` is the number of tokens that
//! carry emotion `e` in that lexicon divided by the document's token count.
//! A token tagged with several emotions increments each of them once.

mod bow;
mod embedding;
mod stopwords;
mod wordlist;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document};
use crate::lexicon::{EmotionLabel, Lexicon, SchemaName};
use crate::{Error, Result};

pub use bow::{bow_features, BagOfWords, SparseVector};
pub use embedding::{avg_embedding, EmbeddingTable};
pub use stopwords::{is_stop_word, stop_words};
pub use wordlist::{corpus_lexical_mean, lexical_mean_value, WordList};

/// One `(lexicon, emotion)` coordinate of an emotion vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coordinate {
    pub lexicon: SchemaName,
    pub emotion: EmotionLabel,
}

impl Coordinate {
    /// Column name used in exports, e.g. `EmoLex:joy`.
    pub fn name(&self) -> String {
        format!("{}:{}", self.lexicon, self.emotion)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmotionVector {
    pub values: Vec<f64>,
    pub layout: Vec<Coordinate>,
}

impl EmotionVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, lexicon: SchemaName, emotion: EmotionLabel) -> Option<f64> {
        self.layout
            .iter()
            .position(|c| c.lexicon == lexicon && c.emotion == emotion)
            .map(|i| self.values[i])
    }
}

/// Coordinate layout for an ordered lexicon list.
pub fn emotion_layout(lexicons: &[Lexicon]) -> Vec<Coordinate> {
    lexicons
        .iter()
        .flat_map(|l| {
            l.schema().emotions.iter().map(move |&emotion| Coordinate {
                lexicon: l.schema().name,
                emotion,
            })
        })
        .collect()
}

/// Sum of the lexicons' schema dimensions.
pub fn feature_dimension(lexicons: &[Lexicon]) -> usize {
    lexicons.iter().map(|l| l.schema().dimension()).sum()
}

/// Emotion featurizer. By default stop words count toward the length
/// normalisation; `count_stop_words = false` removes them from both the
/// numerator and the denominator.
#[derive(Clone, Debug)]
pub struct EmotionFeaturizer<'a> {
    lexicons: &'a [Lexicon],
    count_stop_words: bool,
    offsets: Vec<Vec<Option<usize>>>,
    layout: Vec<Coordinate>,
}

impl<'a> EmotionFeaturizer<'a> {
    pub fn new(lexicons: &'a [Lexicon]) -> Self {
        let mut offsets = Vec::with_capacity(lexicons.len());
        let mut base = 0;
        for l in lexicons {
            let emotions = &l.schema().emotions;
            let mut table = vec![None; EmotionLabel::ALL.len()];
            for (k, e) in emotions.iter().enumerate() {
                table[*e as usize] = Some(base + k);
            }
            base += emotions.len();
            offsets.push(table);
        }
        EmotionFeaturizer {
            lexicons,
            count_stop_words: true,
            offsets,
            layout: emotion_layout(lexicons),
        }
    }

    pub fn count_stop_words(mut self, yes: bool) -> Self {
        self.count_stop_words = yes;
        self
    }

    pub fn dimension(&self) -> usize {
        self.layout.len()
    }

    pub fn layout(&self) -> &[Coordinate] {
        &self.layout
    }

    pub fn values(&self, tokens: &[String]) -> Vec<f64> {
        let mut values = vec![0.0; self.layout.len()];
        let mut n = 0usize;
        for t in tokens {
            if !self.count_stop_words && is_stop_word(t) {
                continue;
            }
            n += 1;
            for (lexicon, offsets) in self.lexicons.iter().zip(&self.offsets) {
                for e in lexicon.lookup(t) {
                    if let Some(i) = offsets[*e as usize] {
                        values[i] += 1.0;
                    }
                }
            }
        }
        if n > 0 {
            let n = n as f64;
            for v in &mut values {
                *v /= n;
            }
        }
        values
    }

    pub fn featurize(&self, doc: &Document) -> EmotionVector {
        EmotionVector {
            values: self.values(&doc.tokens),
            layout: self.layout.clone(),
        }
    }

    /// Row-per-document feature matrix.
    pub fn matrix(&self, corpus: &Corpus) -> Vec<Vec<f64>> {
        corpus
            .documents
            .iter()
            .map(|d| self.values(&d.tokens))
            .collect()
    }
}

pub fn emotion_features(doc: &Document, lexicons: &[Lexicon]) -> EmotionVector {
    EmotionFeaturizer::new(lexicons).featurize(doc)
}

/// Writes a feature matrix as CSV: `id,label,<feature names...>`.
pub fn write_feature_csv(
    corpus: &Corpus,
    feature_names: &[String],
    rows: &[Vec<f64>],
    writer: impl Write,
) -> Result<()> {
    if rows.len() != corpus.len() {
        return Err(Error::Data(format!(
            "{} feature rows for {} documents",
            rows.len(),
            corpus.len()
        )));
    }
    let mut wtr = csv::Writer::from_writer(writer);
    let csv_err = |e: csv::Error| Error::Data(format!("csv write failed: {e}"));
    let mut header = vec!["id".to_string(), "label".to_string()];
    header.extend(feature_names.iter().cloned());
    wtr.write_record(&header).map_err(csv_err)?;
    for (doc, row) in corpus.documents.iter().zip(rows) {
        let mut record = vec![doc.id.clone(), doc.label.clone()];
        record.extend(row.iter().map(|v| v.to_string()));
        wtr.write_record(&record).map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Source;
    use crate::lexicon::{builtin_schemas, LexiconSchema};
    use proptest::prelude::*;

    fn emolex() -> Lexicon {
        Lexicon::from_entries(
            LexiconSchema::builtin(SchemaName::EmoLex),
            [
                ("happy", EmotionLabel::Joy),
                ("win", EmotionLabel::Joy),
                ("win", EmotionLabel::Trust),
                ("war", EmotionLabel::Fear),
            ],
        )
        .unwrap()
    }

    fn liwc() -> Lexicon {
        Lexicon::from_entries(
            LexiconSchema::builtin(SchemaName::Liwc),
            [
                ("war", EmotionLabel::NegEmo),
                ("happy", EmotionLabel::PosEmo),
            ],
        )
        .unwrap()
    }

    fn doc(text: &str) -> Document {
        Document::new("d", text, "x", Source::Other)
    }

    #[test]
    fn two_joy_tokens_in_ten() {
        let d = doc("happy days are here and we all win the day");
        assert_eq!(d.tokens.len(), 10);
        let v = emotion_features(&d, &[emolex()]);
        assert!((v.get(SchemaName::EmoLex, EmotionLabel::Joy).unwrap() - 0.2).abs() < 1e-15);
        assert!((v.get(SchemaName::EmoLex, EmotionLabel::Trust).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(v.get(SchemaName::EmoLex, EmotionLabel::Fear).unwrap(), 0.0);
    }

    #[test]
    fn empty_document_is_zero() {
        let v = emotion_features(&doc(""), &[emolex(), liwc()]);
        assert_eq!(v.values, vec![0.0; 12]);
    }

    #[test]
    fn dimensions() {
        let all: Vec<Lexicon> = builtin_schemas().into_iter().map(Lexicon::new).collect();
        assert_eq!(feature_dimension(&all), 38);
        assert_eq!(feature_dimension(&all[1..2]), 8);
        assert_eq!(feature_dimension(&[]), 0);
        assert_eq!(emotion_features(&doc("x"), &all).len(), 38);
    }

    #[test]
    fn layout_is_concatenated_in_lexicon_order() {
        let layout = emotion_layout(&[liwc(), emolex()]);
        assert_eq!(layout.len(), 12);
        assert!(layout[..4].iter().all(|c| c.lexicon == SchemaName::Liwc));
        assert!(layout[4..].iter().all(|c| c.lexicon == SchemaName::EmoLex));
        assert_eq!(layout[0].name(), "LIWC:sadness");
    }

    #[test]
    fn stop_words_can_be_excluded() {
        let d = doc("the war and the win");
        let with = EmotionFeaturizer::new(std::slice::from_ref(&emolex())).values(&d.tokens);
        let lex = [emolex()];
        let without = EmotionFeaturizer::new(&lex)
            .count_stop_words(false)
            .values(&d.tokens);
        // fear is at index 3 of EmoLex
        assert!((with[3] - 0.2).abs() < 1e-15);
        assert!((without[3] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn csv_export_header() {
        let c = Corpus::new(vec![doc("happy war")]);
        let lex = [emolex()];
        let f = EmotionFeaturizer::new(&lex);
        let names: Vec<String> = f.layout().iter().map(Coordinate::name).collect();
        let mut buf = Vec::new();
        write_feature_csv(&c, &names, &f.matrix(&c), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("id,label,EmoLex:anger,EmoLex:anticipation"));
    }

    const WORDS: &[&str] = &["happy", "war", "win", "the", "cat", "WAR", "Win"];

    proptest! {
        #[test]
        fn order_and_duplication_invariance(idx in proptest::collection::vec(0usize..WORDS.len(), 0..30), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            let lex = [emolex(), liwc()];
            let f = EmotionFeaturizer::new(&lex);
            let tokens: Vec<String> = idx.iter().map(|&i| WORDS[i].to_lowercase()).collect();
            let base = f.values(&tokens);
            prop_assert_eq!(base.len(), feature_dimension(&lex));
            let mut shuffled = tokens.clone();
            shuffled.shuffle(&mut crate::rng::seeded(seed));
            let doubled: Vec<String> = tokens.iter().chain(tokens.iter()).cloned().collect();
            for (a, (b, c)) in base.iter().zip(f.values(&shuffled).iter().zip(f.values(&doubled))) {
                prop_assert!((a - b).abs() < 1e-12);
                prop_assert!((a - c).abs() < 1e-12);
                prop_assert!((0.0..=1.0).contains(a));
            }
        }
    }
}
