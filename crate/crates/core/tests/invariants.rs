use ein_core::analysis::{compute_metrics, feature_information_gain};
use ein_core::features::EmotionFeaturizer;
use ein_core::neural::{
    read_checkpoint, write_checkpoint, EinConfig, EinModel, OutputMode, Vocabulary,
};
use ein_core::synthetic::toy_lexicons;
use proptest::prelude::*;

fn model(seed: u64, mode: OutputMode) -> EinModel {
    let vocab = Vocabulary::from_words((0..20).map(|i| format!("w{i}")).collect());
    let (classes, positive): (Vec<String>, _) = match mode {
        OutputMode::SigmoidBinary => (vec!["no".into(), "yes".into()], Some("yes".to_string())),
        _ => ((0..4).map(|i| format!("c{i}")).collect(), None),
    };
    let config = EinConfig {
        embedding_dim: 6,
        lstm_units: 5,
        dense_a_units: 3,
        dense_b_units: 4,
        output_mode: mode,
        positive_label: positive,
        seed,
        ..EinConfig::default()
    };
    EinModel::new(config, &classes, vocab, 38, None).unwrap()
}

fn input() -> impl Strategy<Value = (Vec<usize>, Vec<f64>)> {
    (
        prop::collection::vec(0usize..=20, 1..30),
        prop::collection::vec(0.0f64..1.0, 38),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn attention_and_output_are_distributions(seed in 0u64..1000, (ids, emotions) in input()) {
        for mode in [OutputMode::SoftmaxMulticlass, OutputMode::SigmoidBinary] {
            let fwd = model(seed, mode).forward(&ids, &emotions, None);
            let a: f64 = fwd.attention_weights().iter().sum();
            prop_assert!((a - 1.0).abs() < 1e-6);
            prop_assert!(fwd.attention_weights().iter().all(|&w| w >= 0.0));
            let p: f64 = fwd.probs.iter().sum();
            prop_assert!((p - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn checkpoint_round_trip_is_bit_exact(seed in 0u64..1000, (ids, emotions) in input()) {
        let m = model(seed, OutputMode::SoftmaxMulticlass);
        let mut bytes = Vec::new();
        write_checkpoint(&m, &mut bytes).unwrap();
        let restored = read_checkpoint(bytes.as_slice()).unwrap();
        let want = m.quantized().predict_proba(&ids, &emotions).unwrap();
        let got = restored.predict_proba(&ids, &emotions).unwrap();
        prop_assert_eq!(
            want.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            got.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn emotion_features_ignore_order_and_repetition(
        words in prop::collection::vec(prop::sample::select(vec![
            "joy", "fear", "hope", "news", "the", "anger", "calm", "surprise", "x",
        ]), 1..40),
        reps in 1usize..4,
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        let lexicons = toy_lexicons();
        let f = EmotionFeaturizer::new(&lexicons);
        let tokens: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        let base = f.values(&tokens);
        let mut shuffled: Vec<String> = (0..reps).flat_map(|_| tokens.clone()).collect();
        shuffled.shuffle(&mut ein_core::rng::seeded(seed));
        for (a, b) in base.iter().zip(f.values(&shuffled)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn information_gain_is_bounded_by_label_entropy(
        values in prop::collection::vec(-5.0f64..5.0, 2..80),
        seed in any::<u64>(),
    ) {
        use rand::Rng;
        let mut rng = ein_core::rng::seeded(seed);
        let labels: Vec<usize> = values.iter().map(|_| rng.gen_range(0..3)).collect();
        let ig = feature_information_gain(&values, &labels, 10);
        prop_assert!(ig >= 0.0 && ig <= 3f64.ln() + 1e-12);
    }

    #[test]
    fn macro_scores_stay_in_range(gold in prop::collection::vec(0usize..4, 1..60), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ein_core::rng::seeded(seed);
        let classes: Vec<String> = (0..4).map(|i| format!("c{i}")).collect();
        let g: Vec<String> = gold.iter().map(|&i| classes[i].clone()).collect();
        let p: Vec<String> = gold.iter().map(|_| classes[rng.gen_range(0..4)].clone()).collect();
        let m = compute_metrics(&p, &g, &classes).unwrap();
        for s in [m.accuracy, m.macro_precision, m.macro_recall, m.macro_f1] {
            prop_assert!((0.0..=100.0).contains(&s));
        }
        let perfect = compute_metrics(&g, &g, &classes).unwrap();
        prop_assert_eq!(perfect.accuracy, 100.0);
    }
}
