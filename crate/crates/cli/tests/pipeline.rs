use std::path::Path;

use ein_cli::analysis::SectionStatus;
use ein_cli::synth::write_demo_bundle;
use ein_cli::{
    run_analysis, run_experiment, run_prepare, run_projection, run_stats, ExperimentConfig,
    RawConfig,
};
use ein_core::corpus::write_jsonl;
use ein_core::synthetic::{toy_word_lists, word_rate_corpus};
use ein_core::{Corpus, Document, Error, Source};
use proptest::prelude::*;

fn bundle(dir: &Path) {
    write_demo_bundle(dir, 40, 3).unwrap();
}

fn config(dir: &Path, name: &str, overrides: &[(&str, &str)]) -> ExperimentConfig {
    let mut raw = RawConfig::load(&dir.join(name)).unwrap();
    raw.set("out", dir.join("out").join(name).display().to_string());
    for (k, v) in overrides {
        raw.set(k, *v);
    }
    ExperimentConfig::from_raw(&raw, dir).unwrap()
}

#[test]
fn every_bundled_config_parses() {
    let dir = tempfile::tempdir().unwrap();
    bundle(dir.path());
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".conf"))
        .collect();
    names.sort();
    assert_eq!(names.len(), 8, "{names:?}");
    for n in names {
        ExperimentConfig::load(&dir.path().join(&n)).unwrap_or_else(|e| panic!("{n}: {e}"));
    }
}

#[test]
fn missing_lexicon_is_rejected_before_any_work() {
    let dir = tempfile::tempdir().unwrap();
    bundle(dir.path());
    let mut raw = RawConfig::load(&dir.path().join("forest.conf")).unwrap();
    raw.set("lexicon.liwc", "lexicons/nowhere.tsv");
    let out = dir.path().join("never");
    raw.set("out", out.display().to_string());
    let err = ExperimentConfig::from_raw(&raw, dir.path()).unwrap_err();
    assert!(matches!(err, Error::Config(_)), "{err}");
    assert!(err.to_string().contains("nowhere.tsv"), "{err}");
    assert!(!out.exists());
}

#[test]
fn unknown_and_duplicate_keys_are_errors() {
    let base = "seed = 1\ncorpus = news.jsonl\n";
    assert!(RawConfig::parse(&format!("{base}seed = 2\n"), "t").is_err());
    let raw = RawConfig::parse(&format!("{base}ein.lstm_unitz = 3\n"), "t").unwrap();
    let dir = tempfile::tempdir().unwrap();
    bundle(dir.path());
    let err = ExperimentConfig::from_raw(&raw, dir.path()).unwrap_err();
    assert!(err.to_string().contains("lstm_unitz"), "{err}");
}

#[test]
fn forest_run_writes_metrics_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    bundle(dir.path());
    let cfg = config(dir.path(), "forest.conf", &[("forest.n_trees", "20")]);
    let report = run_experiment(&cfg).unwrap();
    assert!(
        report.metrics.mean.macro_f1 > 60.0,
        "{:?}",
        report.metrics.mean
    );
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(cfg.out.join("manifest-train.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["status"], "complete");
    assert_eq!(manifest["config_hash"], cfg.hash.as_str());
    let names: Vec<&str> = manifest["artifacts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["path"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"metrics.json"), "{names:?}");
}

#[test]
fn kfold_reports_one_entry_per_fold() {
    let dir = tempfile::tempdir().unwrap();
    bundle(dir.path());
    let cfg = config(dir.path(), "majority.conf", &[("kfold", "4")]);
    let report = run_experiment(&cfg).unwrap();
    assert_eq!(report.metrics.folds.len(), 4);
}

#[test]
fn prepare_stats_and_projection() {
    let dir = tempfile::tempdir().unwrap();
    bundle(dir.path());
    let cfg = config(dir.path(), "ein.conf", &[("ein.max_epochs", "2")]);
    let manifest = run_prepare(&cfg).unwrap();
    let names: Vec<&str> = manifest.artifacts.iter().map(|a| a.path.as_str()).collect();
    assert_eq!(
        names,
        [
            "emotion_features.csv",
            "prepared.jsonl",
            "preprocess.json",
            "split.json"
        ]
    );

    let stats = run_stats(&cfg).unwrap();
    assert_eq!(stats.raw.total, 200);

    assert!(
        run_projection(&cfg).is_err(),
        "projection before training must fail"
    );
    assert!(cfg.out.join("manifest-project.json").exists());
    run_experiment(&cfg).unwrap();
    let projection = run_projection(&cfg).unwrap();
    assert_eq!(projection.explained_variance_ratio.len(), 2);
    assert!(projection.explained_variance_ratio.iter().sum::<f64>() <= 1.0 + 1e-9);
}

fn write_corpus(path: &Path, corpus: &Corpus) {
    let mut buf = Vec::new();
    write_jsonl(corpus, &mut buf).unwrap();
    std::fs::write(path, buf).unwrap();
}

#[test]
fn single_class_analysis_degrades_gracefully() {
    let dir = tempfile::tempdir().unwrap();
    bundle(dir.path());
    let docs = (0..12)
        .map(|i| {
            Document::new(
                format!("d{i}"),
                "joy fear hope calm news about things",
                "real_news",
                Source::Other,
            )
        })
        .collect();
    write_corpus(&dir.path().join("one.jsonl"), &Corpus::new(docs));
    let cfg = config(
        dir.path(),
        "analysis.conf",
        &[("corpus", "one.jsonl"), ("compare.corpus", "one.jsonl")],
    );
    let report = run_analysis(&cfg).unwrap();
    assert!(report
        .information_gain
        .coordinates
        .iter()
        .all(|(_, ig)| *ig == 0.0));
    assert_eq!(report.t_tests.status, SectionStatus::Skipped);
    assert!(report.t_tests.notice.is_some());
    assert_eq!(report.top_emotions.status, SectionStatus::Skipped);
    for m in &report.lexical_means {
        assert_eq!(m.ordering.as_deref(), Some("equal"));
    }
}

#[test]
fn word_list_ordering_follows_usage_rates() {
    let dir = tempfile::tempdir().unwrap();
    bundle(dir.path());
    let lists = toy_word_lists();
    write_corpus(
        &dir.path().join("heavy.jsonl"),
        &word_rate_corpus("hoax", &lists[0], 0.05, 60, 1),
    );
    write_corpus(
        &dir.path().join("light.jsonl"),
        &word_rate_corpus("real_news", &lists[0], 0.005, 60, 2),
    );
    let cfg = config(
        dir.path(),
        "analysis.conf",
        &[("corpus", "heavy.jsonl"), ("compare.corpus", "light.jsonl")],
    );
    let report = run_analysis(&cfg).unwrap();
    let m = report
        .lexical_means
        .iter()
        .find(|m| m.list == lists[0].name)
        .unwrap();
    assert_eq!(m.ordering.as_deref(), Some("corpus > compare"), "{m:?}");
    assert!(m.corpus_mean > m.compare_mean.unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_hash_ignores_line_order_and_out(
        perm in Just((0..6usize).collect::<Vec<_>>()).prop_shuffle(),
        out in "[a-z]{1,8}",
    ) {
        let lines = [
            "seed = 7", "corpus = a.jsonl", "model = random_forest",
            "forest.n_trees = 10", "features = emotion", "# a comment",
        ];
        let shuffled: String = perm.iter().map(|&i| format!("{}\n", lines[i])).collect();
        let ordered: String = lines.iter().map(|l| format!("{l}\n")).collect();
        let a = RawConfig::parse(&ordered, "a").unwrap();
        let mut b = RawConfig::parse(&shuffled, "b").unwrap();
        b.set("out", out);
        prop_assert_eq!(a.hash(), b.hash());
    }
}

#[test]
fn checked_in_demo_bundle_matches_the_generator() {
    let dir = tempfile::tempdir().unwrap();
    let written = write_demo_bundle(dir.path(), 200, 42).unwrap();
    let repo = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/demo");
    for path in written {
        let rel = path.strip_prefix(dir.path()).unwrap();
        let checked_in =
            std::fs::read(repo.join(rel)).unwrap_or_else(|e| panic!("{}: {e}", rel.display()));
        assert!(
            checked_in == std::fs::read(&path).unwrap(),
            "{} is stale; rerun `ein synth --out data/demo`",
            rel.display()
        );
    }
}
