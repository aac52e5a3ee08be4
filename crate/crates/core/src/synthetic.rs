//! Deterministic toy lexicons and corpora.
//!
//! The real lexicons, news corpora and pretrained embeddings are external
//! resources; these generators produce small stand-ins whose statistical
//! structure is known, for tests, benchmarks and the bundled demo.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::corpus::{Corpus, Document, Source};
use crate::features::{EmbeddingTable, WordList};
use crate::lexicon::{EmotionLabel, Lexicon, LexiconSchema, SchemaName};
use crate::rng::{derive_seed, seeded};

/// The five classes of the news-article setting.
pub const NEWS_CLASSES: [&str; 5] = ["clickbait", "hoax", "propaganda", "real_news", "satire"];

/// Words carrying `emotion` in every toy lexicon whose schema has it.
pub fn emotion_words(emotion: EmotionLabel, per_emotion: usize) -> Vec<String> {
    let stem = emotion.name().replace('_', "");
    (1..=per_emotion).map(|i| format!("{stem}{i}")).collect()
}

/// One lexicon per builtin schema, three words per emotion. A word carries
/// the same emotion in every lexicon that covers it.
pub fn toy_lexicons() -> Vec<Lexicon> {
    SchemaName::ALL
        .iter()
        .map(|&name| {
            let schema = LexiconSchema::builtin(name);
            let words: Vec<(String, EmotionLabel)> = name
                .emotions()
                .iter()
                .flat_map(|&e| emotion_words(e, 3).into_iter().map(move |w| (w, e)))
                .collect();
            Lexicon::from_entries(schema, words.iter().map(|(w, e)| (w.as_str(), *e)))
                .expect("toy lexicon is valid")
        })
        .collect()
}

fn filler(i: usize) -> String {
    format!("f{i}")
}

/// Settings of [`emotion_corpus`].
#[derive(Clone, Debug, PartialEq)]
pub struct EmotionCorpusSpec {
    pub docs_per_class: usize,
    pub tokens_per_doc: usize,
    /// Probability that a token is an emotion word.
    pub emotion_rate: f64,
    /// Share of emotion tokens drawn from the class's two dominant emotions.
    pub dominant_share: f64,
    /// Probability that a token is a class-group content word (0 disables).
    pub content_rate: f64,
    pub seed: u64,
}

impl Default for EmotionCorpusSpec {
    fn default() -> Self {
        EmotionCorpusSpec {
            docs_per_class: 200,
            tokens_per_doc: 40,
            emotion_rate: 0.2,
            dominant_share: 0.5,
            content_rate: 0.0,
            seed: 0,
        }
    }
}

/// Dominant emotions per news class. The first one is the class's rank-1
/// emotion in the top-emotion fixture.
pub fn dominant_emotions(class: &str) -> [EmotionLabel; 2] {
    use EmotionLabel::*;
    match class {
        "clickbait" => [Surprise, Anticipation],
        "hoax" => [Hope, Fear],
        "propaganda" => [Joy, Trust],
        "satire" => [Disgust, Anger],
        _ => [Calmness, Like],
    }
}

/// Content-word group of a news class. Hoax and propaganda share a group,
/// as do clickbait and satire, so content words alone cannot tell the
/// members of a pair apart.
pub fn content_group(class: &str) -> usize {
    match class {
        "hoax" | "propaganda" => 0,
        "clickbait" | "satire" => 1,
        _ => 2,
    }
}

fn content_word(group: usize, i: usize) -> String {
    format!("g{group}w{i}")
}

const FILLER_WORDS: usize = 150;
const CONTENT_WORDS: usize = 20;

/// Five-class corpus in which classes differ in the rates of their emotion
/// words, optionally with class-group content words.
pub fn emotion_corpus(spec: &EmotionCorpusSpec) -> Corpus {
    let mut rng = seeded(spec.seed);
    let mut docs = Vec::new();
    for class in NEWS_CLASSES {
        let dominant = dominant_emotions(class);
        for k in 0..spec.docs_per_class {
            let mut tokens = Vec::with_capacity(spec.tokens_per_doc);
            for _ in 0..spec.tokens_per_doc {
                let u: f64 = rng.gen();
                if u < spec.emotion_rate {
                    let e = if rng.gen::<f64>() < spec.dominant_share {
                        dominant[rng.gen_range(0..2)]
                    } else {
                        *EmotionLabel::ALL.choose(&mut rng).unwrap()
                    };
                    tokens.push(emotion_words(e, 3)[rng.gen_range(0..3)].clone());
                } else if u < spec.emotion_rate + spec.content_rate {
                    tokens.push(content_word(
                        content_group(class),
                        rng.gen_range(0..CONTENT_WORDS),
                    ));
                } else {
                    tokens.push(filler(rng.gen_range(0..FILLER_WORDS)));
                }
            }
            docs.push(Document::new(
                format!("{class}-{k:04}"),
                tokens.join(" "),
                class,
                Source::NewsArticles,
            ));
        }
    }
    Corpus::new(docs)
}

/// Random embeddings for the filler and content words of the synthetic
/// corpora. Emotion words are deliberately absent, so a content branch
/// built on this table sees them only as out-of-vocabulary tokens.
pub fn content_embeddings(dim: usize, seed: u64) -> EmbeddingTable {
    let mut rng = seeded(seed);
    let mut table = EmbeddingTable::new(dim);
    let mut words: Vec<String> = (0..FILLER_WORDS).map(filler).collect();
    for g in 0..3 {
        words.extend((0..CONTENT_WORDS).map(|i| content_word(g, i)));
    }
    words.extend(
        CLICKBAIT_CUES
            .iter()
            .chain(NEWS_CUES)
            .map(|s| s.to_string()),
    );
    for w in words {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
        table.insert(&w, &v).expect("dimension matches");
    }
    table
}

const CLICKBAIT_CUES: &[&str] = &[
    "shocking",
    "amazing",
    "unbelievable",
    "secret",
    "trick",
    "insane",
    "epic",
    "hilarious",
    "adorable",
    "reasons",
    "viral",
    "wow",
];
const NEWS_CUES: &[&str] = &[
    "minister",
    "parliament",
    "economy",
    "report",
    "court",
    "agency",
    "budget",
    "official",
    "election",
    "policy",
    "inflation",
    "talks",
];

/// Binary headline corpus (`clickbait` vs `news`) that is separable by
/// cue words; clickbait headlines also lean towards surprise.
pub fn clickbait_corpus(per_class: usize, seed: u64) -> Corpus {
    let mut rng = seeded(seed);
    let mut docs = Vec::new();
    for (label, cues) in [("clickbait", CLICKBAIT_CUES), ("news", NEWS_CUES)] {
        for k in 0..per_class {
            let len = rng.gen_range(8..=12);
            let mut tokens: Vec<String> = (0..len)
                .map(|_| filler(rng.gen_range(0..FILLER_WORDS)))
                .collect();
            for _ in 0..3 {
                let pos = rng.gen_range(0..tokens.len());
                tokens[pos] = cues.choose(&mut rng).unwrap().to_string();
            }
            if label == "clickbait" && rng.gen::<f64>() < 0.7 {
                tokens.push(emotion_words(EmotionLabel::Surprise, 3)[rng.gen_range(0..3)].clone());
            }
            docs.push(Document::new(
                format!("{label}-{k:04}"),
                tokens.join(" "),
                label,
                Source::Twitter,
            ));
        }
    }
    Corpus::new(docs)
}

/// Corpus for the top-emotion fixture: each false class over-expresses its
/// rank-1 emotion (clickbait → surprise, hoax → hope, propaganda → joy,
/// satire → disgust); real news draws emotions uniformly.
pub fn top_emotion_corpus(per_class: usize, seed: u64) -> Corpus {
    let mut rng = seeded(seed);
    let mut docs = Vec::new();
    for class in NEWS_CLASSES {
        let rank1 = (class != "real_news").then(|| dominant_emotions(class)[0]);
        for k in 0..per_class {
            let tokens: Vec<String> = (0..30)
                .map(|_| {
                    if rng.gen::<f64>() < 0.3 {
                        let e = match rank1 {
                            Some(e) if rng.gen::<f64>() < 0.6 => e,
                            _ => *EmotionLabel::ALL.choose(&mut rng).unwrap(),
                        };
                        emotion_words(e, 3)[rng.gen_range(0..3)].clone()
                    } else {
                        filler(rng.gen_range(0..FILLER_WORDS))
                    }
                })
                .collect();
            docs.push(Document::new(
                format!("{class}-{k:04}"),
                tokens.join(" "),
                class,
                Source::NewsArticles,
            ));
        }
    }
    Corpus::new(docs)
}

/// 16 short documents over four classes, each class marked by its own
/// words; small enough to memorise.
pub fn overfit_corpus(seed: u64) -> Corpus {
    let mut rng = seeded(seed);
    let classes = ["alpha", "beta", "gamma", "delta"];
    let mut docs = Vec::new();
    for (c, class) in classes.iter().enumerate() {
        for k in 0..4 {
            let mut tokens: Vec<String> = (0..6)
                .map(|_| filler(rng.gen_range(0..FILLER_WORDS)))
                .collect();
            tokens.insert(rng.gen_range(0..=tokens.len()), content_word(c, k));
            let e = dominant_emotions(NEWS_CLASSES[c])[0];
            tokens.push(emotion_words(e, 3)[k % 3].clone());
            docs.push(Document::new(
                format!("{class}-{k}"),
                tokens.join(" "),
                *class,
                Source::Other,
            ));
        }
    }
    Corpus::new(docs)
}

/// Two word lists for the lexical mean-value analysis.
pub fn toy_word_lists() -> Vec<WordList> {
    vec![
        WordList::new(
            "assertives",
            ["claim", "insist", "declare", "prove", "reveal"],
        ),
        WordList::new("hedges", ["may", "might", "perhaps", "possibly", "suggest"]),
    ]
}

/// Corpus whose documents use `words` at roughly `rate` per token.
pub fn word_rate_corpus(
    label: &str,
    words: &WordList,
    rate: f64,
    docs: usize,
    seed: u64,
) -> Corpus {
    let mut rng = seeded(derive_seed(seed, docs as u64));
    let list: Vec<&String> = words.words.iter().collect();
    let out = (0..docs)
        .map(|k| {
            let tokens: Vec<String> = (0..200)
                .map(|_| {
                    if rng.gen::<f64>() < rate {
                        list.choose(&mut rng).unwrap().to_string()
                    } else {
                        filler(rng.gen_range(0..FILLER_WORDS))
                    }
                })
                .collect();
            Document::new(
                format!("{label}-{k:04}"),
                tokens.join(" "),
                label,
                Source::NewsArticles,
            )
        })
        .collect();
    Corpus::new(out)
}

/// Class counts of a corpus, for quick inspection.
pub fn class_counts(corpus: &Corpus) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for d in &corpus.documents {
        *m.entry(d.label.clone()).or_insert(0) += 1;
    }
    m
}
