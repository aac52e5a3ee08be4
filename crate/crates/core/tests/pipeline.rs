use std::collections::BTreeSet;

use ein_core::analysis::{compute_metrics, information_gain, top_n_emotions};
use ein_core::classifiers::{
    train_linear_svm, train_random_forest, trivial_baselines, ForestParams, SvmParams,
};
use ein_core::corpus::{read_jsonl, split, write_jsonl};
use ein_core::features::EmotionFeaturizer;
use ein_core::synthetic::{emotion_corpus, top_emotion_corpus, toy_lexicons, EmotionCorpusSpec};
use ein_core::{Corpus, SplitSpec};

fn labels(c: &Corpus) -> Vec<String> {
    c.documents.iter().map(|d| d.label.clone()).collect()
}

#[test]
fn split_parts_are_disjoint_and_cover_the_corpus() {
    let corpus = emotion_corpus(&EmotionCorpusSpec {
        docs_per_class: 30,
        ..Default::default()
    });
    let s = split(
        &corpus,
        &SplitSpec {
            seed: 2,
            ..Default::default()
        },
    )
    .unwrap();
    let ids =
        |c: &Corpus| -> BTreeSet<String> { c.documents.iter().map(|d| d.id.clone()).collect() };
    let (a, b, c) = (ids(&s.train), ids(&s.validation), ids(&s.test));
    assert!(a.is_disjoint(&b) && a.is_disjoint(&c) && b.is_disjoint(&c));
    assert_eq!(a.len() + b.len() + c.len(), corpus.len());
}

#[test]
fn jsonl_round_trip_preserves_documents() {
    let corpus = emotion_corpus(&EmotionCorpusSpec {
        docs_per_class: 5,
        ..Default::default()
    });
    let mut buf = Vec::new();
    write_jsonl(&corpus, &mut buf).unwrap();
    let back = read_jsonl(buf.as_slice()).unwrap();
    assert_eq!(labels(&back), labels(&corpus));
    assert_eq!(back.documents[3].tokens, corpus.documents[3].tokens);
}

#[test]
fn emotion_forest_beats_chance() {
    let lexicons = toy_lexicons();
    let corpus = emotion_corpus(&EmotionCorpusSpec {
        docs_per_class: 60,
        seed: 4,
        ..Default::default()
    });
    let s = split(
        &corpus,
        &SplitSpec {
            seed: 1,
            validation_fraction: 0.0,
            ..Default::default()
        },
    )
    .unwrap();
    let f = EmotionFeaturizer::new(&lexicons);
    let names: Vec<String> = f.layout().iter().map(|c| c.name()).collect();
    let params = ForestParams {
        n_trees: 30,
        seed: 2,
        ..Default::default()
    };
    let rf = train_random_forest(&f.matrix(&s.train), &labels(&s.train), &names, &params).unwrap();
    let predicted: Vec<String> = f
        .matrix(&s.test)
        .iter()
        .map(|x| rf.predict(x).to_string())
        .collect();
    let classes = corpus.label_list();
    let forest = compute_metrics(&predicted, &labels(&s.test), &classes)
        .unwrap()
        .macro_f1;
    let random = trivial_baselines(&labels(&s.train), s.test.len(), 3)
        .unwrap()
        .random;
    let chance = compute_metrics(&random, &labels(&s.test), &classes)
        .unwrap()
        .macro_f1;
    assert!(forest > chance + 20.0, "forest {forest} vs random {chance}");
}

#[test]
fn rank_one_emotions_are_recovered_and_informative() {
    let lexicons = toy_lexicons();
    let corpus = top_emotion_corpus(80, 5);
    let f = EmotionFeaturizer::new(&lexicons);
    let names: Vec<String> = f.layout().iter().map(|c| c.name()).collect();
    let rows = f.matrix(&corpus);
    let y = labels(&corpus);
    let svm = train_linear_svm(&rows, &y, &names, &SvmParams::default()).unwrap();
    let top = top_n_emotions(&svm.coefficients(), 1).unwrap();
    assert_eq!(top["hoax"][0].0, "hope");
    assert_eq!(top["satire"][0].0, "disgust");
    let ranking = information_gain(&rows, &y, &names, 10)
        .unwrap()
        .by_emotion();
    let leaders: Vec<&str> = ranking
        .entries
        .iter()
        .take(6)
        .map(|e| e.0.as_str())
        .collect();
    for e in ["surprise", "hope", "joy", "disgust"] {
        assert!(leaders.contains(&e), "{e} not among {leaders:?}");
    }
}
