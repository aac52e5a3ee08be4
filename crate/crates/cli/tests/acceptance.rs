//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits non-zero if any fails or overruns its time budget.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ein_cli::{run_experiment, ExperimentConfig, RawConfig};
use ein_core::analysis::{compute_metrics, feature_information_gain, top_n_emotions, welch_t_test};
use ein_core::classifiers::{train_linear_svm, trivial_baselines, SvmParams};
use ein_core::features::{emotion_features, feature_dimension, EmotionFeaturizer};
use ein_core::lexicon::LexiconSchema;
use ein_core::neural::tensor::softmax;
use ein_core::neural::{
    fit, gradient_check, read_checkpoint, write_checkpoint, Activation, EinConfig, EinModel,
    Example, Vocabulary,
};
use ein_core::synthetic::{dominant_emotions, overfit_corpus, top_emotion_corpus, toy_lexicons};
use ein_core::{Corpus, Document, Lexicon, SchemaName, Source};
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn labels(n: usize, label: &str) -> Vec<String> {
    vec![label.to_string(); n]
}

fn majority_class() -> Outcome {
    let classes: Vec<String> = ["clickbait", "hoax", "propaganda", "real_news", "satire"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut detail = Vec::new();
    for (prevalence, expected) in [
        (0.3407, (6.81, 20.00, 10.16)),
        (0.4410, (8.82, 20.00, 12.24)),
    ] {
        let n = 10_000;
        let major = (prevalence * n as f64).round() as usize;
        let mut gold = labels(major, "propaganda");
        for (k, c) in ["clickbait", "hoax", "real_news", "satire"]
            .iter()
            .enumerate()
        {
            let share = (n - major) / 4 + usize::from(k < (n - major) % 4);
            gold.extend(labels(share, c));
        }
        let train: Vec<String> = gold.iter().rev().cloned().collect();
        let predicted = trivial_baselines(&train, gold.len(), 1)
            .map_err(|e| e.to_string())?
            .majority;
        let m = compute_metrics(&predicted, &gold, &classes).map_err(|e| e.to_string())?;
        let got = (m.macro_precision, m.macro_recall, m.macro_f1);
        let round = |x: f64| (x * 100.0).round() / 100.0;
        ensure(
            (round(got.0) - expected.0).abs() <= 0.01
                && (round(got.1) - expected.1).abs() <= 0.01
                && (round(got.2) - expected.2).abs() <= 0.01,
            || format!("p={prevalence}: got {got:?}, expected {expected:?}"),
        )?;
        detail.push(format!(
            "p={prevalence}: ({:.2}, {:.2}, {:.2})",
            got.0, got.1, got.2
        ));
    }
    Ok(detail.join("; "))
}

fn dimension_law() -> Outcome {
    let lexicons: Vec<Lexicon> = SchemaName::ALL
        .iter()
        .map(|&s| Lexicon::new(LexiconSchema::builtin(s)))
        .collect();
    let dims: Vec<usize> = lexicons.iter().map(|l| l.schema().dimension()).collect();
    ensure(dims == [6, 8, 14, 4, 6], || {
        format!("schema dimensions {dims:?}")
    })?;
    ensure(feature_dimension(&lexicons) == 38, || {
        "feature dimension is not 38".into()
    })?;
    let toy = toy_lexicons();
    for text in ["", "the", "joyful news of fear and hope", "x y z"] {
        let doc = Document::new("d", text, "real_news", Source::Other);
        let v = emotion_features(&doc, &toy);
        ensure(v.values.len() == 38, || {
            format!("'{text}' gave {} features", v.values.len())
        })?;
    }
    Ok("dimension 38 = 6+8+14+4+6".into())
}

fn gradient_correctness() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let vocab = Vocabulary::from_words((0..12).map(|i| format!("w{i}")).collect());
        let classes: Vec<String> = (0..5).map(|i| format!("c{i}")).collect();
        let config = EinConfig {
            embedding_dim: 8,
            lstm_units: 6,
            dense_a_units: 4,
            dense_b_units: 6,
            hidden_activation: Activation::Tanh,
            seed,
            ..EinConfig::default()
        };
        let model = EinModel::new(config, &classes, vocab, 38, None).map_err(|e| e.to_string())?;
        let mut rng = ein_core::rng::seeded(seed + 1000);
        let batch: Vec<Example> = (0..4)
            .map(|k| Example {
                ids: (0..3 + k).map(|_| rng.gen_range(0..=12)).collect(),
                emotions: (0..38).map(|_| rng.gen_range(0.0..0.3)).collect(),
                target: k % 5,
            })
            .collect();
        let r = gradient_check(&model, &batch, 2e-4, |_| true).map_err(|e| e.to_string())?;
        ensure(r.max_relative_error < 1e-4, || {
            format!("seed {seed}: {r:?}")
        })?;
        worst = worst.max(r.max_relative_error);
    }
    Ok(format!("max relative error {worst:.2e} over 20 seeds"))
}

fn overfit() -> Outcome {
    let corpus = overfit_corpus(0);
    ensure(corpus.len() == 16, || format!("{} documents", corpus.len()))?;
    let config = EinConfig {
        embedding_dim: 16,
        lstm_units: 16,
        dense_a_units: 8,
        dense_b_units: 16,
        batch_size: 4,
        learning_rate: Some(0.01),
        drop_c: 0.0,
        drop_d: 0.0,
        max_epochs: 200,
        early_stop_patience: 200,
        monitor_train_accuracy: true,
        seed: 1,
        ..EinConfig::default()
    };
    let (_, history) = fit(
        &config,
        &corpus,
        &Corpus::new(vec![]),
        &toy_lexicons(),
        None,
    )
    .map_err(|e| e.to_string())?;
    let reached = history.train_accuracy.iter().position(|&a| a >= 100.0);
    ensure(reached.is_some(), || {
        format!(
            "final training accuracy {:?}",
            history.train_accuracy.last()
        )
    })?;
    Ok(format!(
        "100% training accuracy at epoch {}",
        reached.unwrap() + 1
    ))
}

/// Trains the bundled config `name` with its outputs under `out`.
fn train_bundled(bundle: &Path, name: &str, out: &Path) -> Result<f64, String> {
    let path = bundle.join(name);
    let mut raw = RawConfig::load(&path).map_err(|e| e.to_string())?;
    raw.set(
        "out",
        out.join(name.trim_end_matches(".conf"))
            .display()
            .to_string(),
    );
    let config = ExperimentConfig::from_raw(&raw, bundle).map_err(|e| e.to_string())?;
    let report = run_experiment(&config).map_err(|e| e.to_string())?;
    Ok(report.metrics.mean.macro_f1)
}

fn emotion_forest_vs_random(bundle: &Path, out: &Path) -> Outcome {
    let forest = train_bundled(bundle, "forest.conf", out)?;
    let random = train_bundled(bundle, "random.conf", out)?;
    ensure(forest >= random + 20.0, || {
        format!("forest {forest:.2} vs random {random:.2}")
    })?;
    ensure((random - 20.0).abs() <= 5.0, || {
        format!("random baseline {random:.2}")
    })?;
    Ok(format!("forest {forest:.2} vs random {random:.2}"))
}

fn ein_vs_lstm(bundle: &Path, out: &Path) -> Outcome {
    let ein = train_bundled(bundle, "ein.conf", out)?;
    let lstm = train_bundled(bundle, "lstm.conf", out)?;
    ensure(ein >= lstm + 2.0, || {
        format!("ein {ein:.2} vs lstm {lstm:.2}")
    })?;
    Ok(format!("ein {ein:.2} vs lstm {lstm:.2}"))
}

fn clickbait(bundle: &Path, out: &Path) -> Outcome {
    let f1 = train_bundled(bundle, "clickbait.conf", out)?;
    ensure(f1 >= 95.0, || format!("macro-F1 {f1:.2}"))?;
    Ok(format!("macro-F1 {f1:.2}"))
}

fn welch_fixtures() -> Vec<(Vec<f64>, Vec<f64>, f64, f64, f64)> {
    let parse =
        |s: &str| -> Vec<f64> { s.split_whitespace().map(|x| x.parse().unwrap()).collect() };
    include_str!("../../core/tests/data/welch_oracle.txt")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(';').collect();
            (
                parse(f[0]),
                parse(f[1]),
                f[2].parse().unwrap(),
                f[3].parse().unwrap(),
                f[4].parse().unwrap(),
            )
        })
        .collect()
}

fn analysis_oracles() -> Outcome {
    let y: Vec<usize> = (0..100).map(|i| i % 2).collect();
    let perfect: Vec<f64> = y.iter().map(|&c| c as f64).collect();
    let ig = feature_information_gain(&perfect, &y, 10);
    ensure((ig - std::f64::consts::LN_2).abs() < 1e-9, || {
        format!("perfect feature IG {ig}")
    })?;
    let constant = feature_information_gain(&vec![0.25; 100], &y, 10);
    ensure(constant == 0.0, || {
        format!("constant feature IG {constant}")
    })?;

    let fixtures = welch_fixtures();
    ensure(fixtures.len() == 10, || {
        format!("{} fixtures", fixtures.len())
    })?;
    let mut worst = 0.0f64;
    for (a, b, t, df, p) in &fixtures {
        let r = welch_t_test(a, b).map_err(|e| e.to_string())?;
        let err = (r.t - t).abs().max((r.df - df).abs()).max((r.p - p).abs());
        ensure(err < 1e-6, || {
            format!(
                "{a:?} vs {b:?}: got ({}, {}, {}), want ({t}, {df}, {p})",
                r.t, r.df, r.p
            )
        })?;
        worst = worst.max(err);
    }

    let mut rng = ein_core::rng::seeded(8);
    for k in 0..1000 {
        let sample = |rng: &mut ein_core::rng::Rng| -> Vec<f64> {
            let n = rng.gen_range(2..30);
            let shift = rng.gen_range(-2.0..2.0);
            let scale = rng.gen_range(0.1..10.0);
            (0..n)
                .map(|_| shift + scale * rng.gen_range(-1.0..1.0))
                .collect()
        };
        let (a, b) = (sample(&mut rng), sample(&mut rng));
        let ab = welch_t_test(&a, &b).map_err(|e| e.to_string())?;
        let ba = welch_t_test(&b, &a).map_err(|e| e.to_string())?;
        ensure(ab.t == -ba.t && ab.p == ba.p, || {
            format!("pair {k}: t {} vs {}", ab.t, ba.t)
        })?;
        ensure(ab.p > 0.0 && ab.p <= 1.0, || {
            format!("pair {k}: p {}", ab.p)
        })?;
    }
    Ok(format!(
        "ig ln2 exact to 1e-9, Welch max error {worst:.1e}, 1000 random pairs"
    ))
}

fn invariance(bundle: &Path, out: &Path) -> Outcome {
    let mut rng = ein_core::rng::seeded(9);
    for _ in 0..200 {
        let n = rng.gen_range(1..20);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-50.0..50.0)).collect();
        let s: f64 = softmax(&x).iter().sum();
        ensure((s - 1.0).abs() < 1e-6, || format!("softmax sums to {s}"))?;
    }

    let lexicons = toy_lexicons();
    let vocab = Vocabulary::from_words((0..30).map(|i| format!("w{i}")).collect());
    let classes: Vec<String> = (0..5).map(|i| format!("c{i}")).collect();
    let config = EinConfig {
        embedding_dim: 8,
        lstm_units: 8,
        dense_a_units: 4,
        dense_b_units: 8,
        ..EinConfig::default()
    };
    let model = EinModel::new(config, &classes, vocab, 38, None).map_err(|e| e.to_string())?;
    for _ in 0..200 {
        let ids: Vec<usize> = (0..rng.gen_range(1..40))
            .map(|_| rng.gen_range(0..=30))
            .collect();
        let emotions: Vec<f64> = (0..38).map(|_| rng.gen_range(0.0..0.5)).collect();
        let fwd = model.forward(&ids, &emotions, None);
        let a: f64 = fwd.attention_weights().iter().sum();
        let p: f64 = fwd.probs.iter().sum();
        ensure((a - 1.0).abs() < 1e-6, || format!("attention sums to {a}"))?;
        ensure((p - 1.0).abs() < 1e-6, || {
            format!("class distribution sums to {p}")
        })?;
    }

    let corpus = top_emotion_corpus(4, 3);
    let featurizer = EmotionFeaturizer::new(&lexicons);
    for doc in &corpus.documents {
        let base = featurizer.values(&doc.tokens);
        let mut shuffled = doc.tokens.clone();
        shuffled.shuffle(&mut rng);
        let doubled: Vec<String> = doc.tokens.iter().chain(&doc.tokens).cloned().collect();
        for (what, other) in [
            ("shuffled", featurizer.values(&shuffled)),
            ("doubled", featurizer.values(&doubled)),
        ] {
            let diff = base
                .iter()
                .zip(&other)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            ensure(diff < 1e-12, || {
                format!("{what} {} differs by {diff}", doc.id)
            })?;
        }
    }

    let quantized = model.quantized();
    let mut bytes = Vec::new();
    write_checkpoint(&model, &mut bytes).map_err(|e| e.to_string())?;
    let restored = read_checkpoint(bytes.as_slice()).map_err(|e| e.to_string())?;
    for _ in 0..50 {
        let ids: Vec<usize> = (0..rng.gen_range(1..20))
            .map(|_| rng.gen_range(0..=30))
            .collect();
        let emotions: Vec<f64> = (0..38).map(|_| rng.gen_range(0.0..0.5)).collect();
        let want = quantized
            .predict_proba(&ids, &emotions)
            .map_err(|e| e.to_string())?;
        let got = restored
            .predict_proba(&ids, &emotions)
            .map_err(|e| e.to_string())?;
        let same = want
            .iter()
            .zip(&got)
            .all(|(a, b)| a.to_bits() == b.to_bits());
        ensure(same, || {
            format!("checkpoint round trip changed {want:?} into {got:?}")
        })?;
    }

    let metrics = |dir: &str| -> Result<Vec<u8>, String> {
        train_bundled(bundle, "ein.conf", &out.join(dir))?;
        std::fs::read(out.join(dir).join("ein").join("metrics.json")).map_err(|e| e.to_string())
    };
    let (first, second) = (metrics("rerun-a")?, metrics("rerun-b")?);
    ensure(first == second, || {
        "reruns wrote different metrics.json".into()
    })?;
    Ok(format!(
        "all invariants hold, metrics.json reruns identical ({} bytes)",
        first.len()
    ))
}

fn top_emotions() -> Outcome {
    let lexicons = toy_lexicons();
    let corpus = top_emotion_corpus(200, 11);
    let featurizer = EmotionFeaturizer::new(&lexicons);
    let names: Vec<String> = featurizer.layout().iter().map(|c| c.name()).collect();
    let y: Vec<String> = corpus.documents.iter().map(|d| d.label.clone()).collect();
    let svm = train_linear_svm(
        &featurizer.matrix(&corpus),
        &y,
        &names,
        &SvmParams::default(),
    )
    .map_err(|e| e.to_string())?;
    let top = top_n_emotions(&svm.coefficients(), 1).map_err(|e| e.to_string())?;
    let mut found = Vec::new();
    for class in ["clickbait", "hoax", "propaganda", "satire"] {
        let want = dominant_emotions(class)[0].name();
        let got = top
            .get(class)
            .and_then(|v| v.first())
            .map(|e| e.0.as_str())
            .unwrap_or("");
        ensure(got == want, || {
            format!("{class}: top emotion {got}, expected {want}")
        })?;
        found.push(format!("{class}->{got}"));
    }
    Ok(found.join(", "))
}

fn main() -> ExitCode {
    let scratch = tempfile::tempdir().expect("temporary directory");
    let bundle = scratch.path().join("bundle");
    let out = scratch.path().join("out");
    let bundle_ready = ein_cli::synth::write_demo_bundle(&bundle, 200, 42).map(|_| ());

    let criteria: Vec<(&str, Duration, Box<dyn Fn() -> Outcome>)> = vec![
        (
            "1 majority-class metrics",
            Duration::from_secs(1),
            Box::new(majority_class),
        ),
        (
            "2 dimension law",
            Duration::from_secs(1),
            Box::new(dimension_law),
        ),
        (
            "3 gradient correctness",
            Duration::from_secs(30),
            Box::new(gradient_correctness),
        ),
        (
            "4 overfit sanity",
            Duration::from_secs(60),
            Box::new(overfit),
        ),
        (
            "5 emotion forest vs random",
            Duration::from_secs(120),
            Box::new(|| emotion_forest_vs_random(&bundle, &out)),
        ),
        (
            "6 ein vs lstm",
            Duration::from_secs(600),
            Box::new(|| ein_vs_lstm(&bundle, &out)),
        ),
        (
            "7 binary clickbait",
            Duration::from_secs(300),
            Box::new(|| clickbait(&bundle, &out)),
        ),
        (
            "8 analysis oracles",
            Duration::from_secs(30),
            Box::new(analysis_oracles),
        ),
        (
            "9 invariance suite",
            Duration::from_secs(60),
            Box::new(|| invariance(&bundle, &out)),
        ),
        (
            "10 top emotions",
            Duration::from_secs(60),
            Box::new(top_emotions),
        ),
    ];
    let only: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (name, budget, check) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.starts_with(&format!("{o} "))) {
            continue;
        }
        let start = Instant::now();
        let outcome = match &bundle_ready {
            Err(e) => Err(format!("demo bundle: {e}")),
            Ok(()) => check(),
        };
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed <= budget {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {elapsed:.1?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(msg) => println!("PASS  {name:<28} {:>8.2?}  {msg}", elapsed),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name:<28} {:>8.2?}  {msg}", elapsed);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
