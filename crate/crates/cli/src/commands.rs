//! The smaller subcommands: prepare, stats and project.

use ein_core::analysis::{
    pca_project, read_embedding_csv, write_penultimate, write_projection_csv, Projection,
};
use ein_core::corpus::{corpus_stats, kfold_indices, write_jsonl, CorpusStats, PreprocessReport};
use ein_core::features::{write_feature_csv, EmotionFeaturizer};
use ein_core::neural::load_checkpoint;
use ein_core::rng::derive_seed;
use ein_core::{Corpus, Error};
use serde::Serialize;

use crate::config::{streams, Evaluation, ExperimentConfig};
use crate::error::{AtStage, Stage, StageResult};
use crate::experiment::{holdout, CHECKPOINT_FILE};
use crate::run::{Inputs, Manifest, Run};

fn ids(corpus: &Corpus) -> Vec<&str> {
    corpus.documents.iter().map(|d| d.id.as_str()).collect()
}

#[derive(Serialize)]
#[serde(untagged)]
enum SplitIds<'a> {
    Holdout {
        train: Vec<&'a str>,
        validation: Vec<&'a str>,
        test: Vec<&'a str>,
    },
    /// Test ids of each fold.
    Folds { folds: Vec<Vec<&'a str>> },
}

/// Writes the cleaned corpus, the preprocessing report, the document ids of
/// every split part and, with lexicons, the emotion feature matrix.
pub fn run_prepare(config: &ExperimentConfig) -> StageResult<Manifest> {
    config.validate().at(Stage::Config)?;
    let mut run = Run::start("prepare", config)?;
    let inputs = run.stage(Stage::Prepare, |_| Inputs::load(config))?;
    let corpus = &inputs.corpus;
    run.stage(Stage::Prepare, |a| {
        let mut buf = Vec::new();
        write_jsonl(corpus, &mut buf)?;
        a.write("prepared.jsonl", &buf)?;
        a.write_json("preprocess.json", &inputs.preprocess)?;
        match &config.evaluation {
            Evaluation::Holdout(_) => {
                let s = holdout(config, corpus)?;
                a.write_json(
                    "split.json",
                    &SplitIds::Holdout {
                        train: ids(&s.train),
                        validation: ids(&s.validation),
                        test: ids(&s.test),
                    },
                )
            }
            Evaluation::KFold { k, stratified } => {
                let seed = derive_seed(config.seed, streams::SPLIT);
                let folds = kfold_indices(corpus, *k, seed, *stratified)?
                    .into_iter()
                    .map(|f| {
                        f.into_iter()
                            .map(|i| corpus.documents[i].id.as_str())
                            .collect()
                    })
                    .collect();
                a.write_json("split.json", &SplitIds::Folds { folds })
            }
        }
    })?;
    if !inputs.lexicons.is_empty() {
        run.stage(Stage::Featurize, |a| {
            let f = EmotionFeaturizer::new(&inputs.lexicons);
            let names: Vec<String> = f.layout().iter().map(|c| c.name()).collect();
            let mut buf = Vec::new();
            write_feature_csv(corpus, &names, &f.matrix(corpus), &mut buf)?;
            a.write("emotion_features.csv", &buf)
        })?;
    }
    run.finish()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsReport {
    pub raw: CorpusStats,
    pub prepared: CorpusStats,
    pub preprocess: Option<PreprocessReport>,
}

/// Per-class document counts before and after preprocessing.
pub fn run_stats(config: &ExperimentConfig) -> StageResult<StatsReport> {
    config.validate().at(Stage::Config)?;
    let mut run = Run::start("stats", config)?;
    let inputs = run.stage(Stage::Prepare, |_| Inputs::load(config))?;
    let report = StatsReport {
        raw: corpus_stats(&inputs.raw_corpus),
        prepared: corpus_stats(&inputs.corpus),
        preprocess: inputs.preprocess,
    };
    run.stage(Stage::Write, |a| a.write_json("stats.json", &report))?;
    run.finish()?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectionReport {
    pub documents: usize,
    pub explained_variance_ratio: Vec<f64>,
    pub components: Vec<Vec<f64>>,
}

/// Exports the saved network's last hidden layer for the test documents
/// and projects it onto two principal components.
pub fn run_projection(config: &ExperimentConfig) -> StageResult<ProjectionReport> {
    config.validate().at(Stage::Config)?;
    let mut run = Run::start("project", config)?;
    let inputs = run.stage(Stage::Prepare, |_| Inputs::load(config))?;
    let test = run.stage(Stage::Prepare, |_| {
        holdout(config, &inputs.corpus).map(|s| s.test)
    })?;
    let model = run.stage(Stage::Project, |a| load_checkpoint(a.path(CHECKPOINT_FILE)))?;
    let rows = run.stage(Stage::Project, |a| {
        let mut buf = Vec::new();
        write_penultimate(&model, &test, &inputs.lexicons, &mut buf)?;
        a.write("penultimate.csv", &buf)?;
        read_embedding_csv(buf.as_slice())
    })?;
    let projection: Projection = run.stage(Stage::Project, |_| {
        if rows.len() < 3 {
            return Err(Error::Data(format!(
                "projection needs at least 3 documents, got {}",
                rows.len()
            )));
        }
        let vectors: Vec<Vec<f64>> = rows.iter().map(|r| r.2.clone()).collect();
        pca_project(&vectors, 2, derive_seed(config.seed, streams::PROJECTION))
    })?;
    let report = ProjectionReport {
        documents: rows.len(),
        explained_variance_ratio: projection.explained_variance_ratio.clone(),
        components: projection.components.clone(),
    };
    run.stage(Stage::Write, |a| {
        let ids: Vec<String> = rows.iter().map(|r| r.0.clone()).collect();
        let labels: Vec<String> = rows.iter().map(|r| r.1.clone()).collect();
        let mut buf = Vec::new();
        write_projection_csv(&ids, &labels, &projection.coordinates, &mut buf)?;
        a.write("projection.csv", &buf)?;
        a.write_json("projection.json", &report)
    })?;
    run.finish()?;
    Ok(report)
}
