//! Emotional characterisation of a corpus: which emotions separate the
//! classes, which differ between real and false items, and which words
//! lists are used more.

use std::collections::BTreeMap;

use ein_core::analysis::{information_gain, top_n_emotions, welch_t_test};
use ein_core::classifiers::{train_linear_svm, Coefficients, LinearModel, SvmParams};
use ein_core::corpus::load_corpus;
use ein_core::features::{corpus_lexical_mean, EmotionFeaturizer};
use ein_core::rng::derive_seed;
use ein_core::{Corpus, Error, Result};
use serde::Serialize;

use crate::config::{streams, ExperimentConfig};
use crate::error::{AtStage, Stage, StageResult};
use crate::run::{Inputs, Run};

pub const ANALYSIS_FILE: &str = "analysis.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionStatus {
    Done,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InformationGainSection {
    pub bins: usize,
    /// Every emotion coordinate, best first.
    pub coordinates: Vec<(String, f64)>,
    /// One entry per emotion: the best of its coordinates.
    pub emotions: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TTestRow {
    pub feature: String,
    pub mean_real: f64,
    pub mean_false: f64,
    pub t: f64,
    pub df: f64,
    pub p: f64,
    pub significant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TTestSection {
    pub status: SectionStatus,
    pub notice: Option<String>,
    pub real_label: String,
    pub alpha: f64,
    pub rows: Vec<TTestRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopEmotionSection {
    pub status: SectionStatus,
    pub notice: Option<String>,
    pub n: usize,
    /// Where the coefficients came from.
    pub source: String,
    pub classes: BTreeMap<String, Vec<(String, f64)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LexicalMean {
    pub list: String,
    pub corpus_mean: f64,
    pub by_class: BTreeMap<String, f64>,
    pub compare_mean: Option<f64>,
    /// `corpus > compare`, `corpus < compare` or `equal`.
    pub ordering: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub documents: usize,
    pub classes: Vec<String>,
    pub information_gain: InformationGainSection,
    pub t_tests: TTestSection,
    pub top_emotions: TopEmotionSection,
    pub lexical_means: Vec<LexicalMean>,
}

fn labels(corpus: &Corpus) -> Vec<String> {
    corpus.documents.iter().map(|d| d.label.clone()).collect()
}

/// Welch t-test per coordinate, real documents against all others.
pub fn real_vs_false(
    rows: &[Vec<f64>],
    labels: &[String],
    names: &[String],
    real_label: &str,
    alpha: f64,
) -> Result<TTestSection> {
    let mut section = TTestSection {
        status: SectionStatus::Skipped,
        notice: None,
        real_label: real_label.to_string(),
        alpha,
        rows: Vec::new(),
    };
    let real: Vec<usize> = (0..labels.len())
        .filter(|&i| labels[i] == real_label)
        .collect();
    let fake: Vec<usize> = (0..labels.len())
        .filter(|&i| labels[i] != real_label)
        .collect();
    if real.len() < 2 || fake.len() < 2 {
        section.notice = Some(format!(
            "t-tests skipped: need at least 2 '{real_label}' and 2 other documents, found {} and {}",
            real.len(),
            fake.len()
        ));
        return Ok(section);
    }
    for (j, name) in names.iter().enumerate() {
        let a: Vec<f64> = real.iter().map(|&i| rows[i][j]).collect();
        let b: Vec<f64> = fake.iter().map(|&i| rows[i][j]).collect();
        let r = welch_t_test(&a, &b)?;
        section.rows.push(TTestRow {
            feature: name.clone(),
            mean_real: r.mean_a,
            mean_false: r.mean_b,
            t: r.t,
            df: r.df,
            p: r.p,
            significant: r.significant_at(alpha),
        });
    }
    section.status = SectionStatus::Done;
    Ok(section)
}

fn top_emotions(
    config: &ExperimentConfig,
    rows: &[Vec<f64>],
    labels: &[String],
    names: &[String],
    classes: usize,
) -> Result<TopEmotionSection> {
    let n = config.analysis.top_n;
    let mut section = TopEmotionSection {
        status: SectionStatus::Skipped,
        notice: None,
        n,
        source: String::new(),
        classes: BTreeMap::new(),
    };
    let coeffs: Coefficients = match &config.analysis.linear_model {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| Error::Io {
                path: p.clone(),
                source,
            })?;
            section.source = p.display().to_string();
            LinearModel::from_json(&text)?.coefficients()
        }
        None if classes < 2 => {
            section.notice =
                Some("top emotions skipped: a linear model needs at least 2 classes".into());
            return Ok(section);
        }
        None => {
            let params = SvmParams {
                c: config.analysis.svm_c,
                seed: derive_seed(config.seed, streams::MODEL),
                ..SvmParams::default()
            };
            section.source = format!("linear_svm(c={})", params.c);
            train_linear_svm(rows, labels, names, &params)?.coefficients()
        }
    };
    section.classes = top_n_emotions(&coeffs, n)?;
    section.status = SectionStatus::Done;
    Ok(section)
}

fn lexical_means(inputs: &Inputs, compare: Option<&Corpus>) -> Vec<LexicalMean> {
    let corpus = &inputs.corpus;
    inputs
        .word_lists
        .iter()
        .map(|list| {
            let by_class = corpus
                .label_list()
                .into_iter()
                .map(|l| {
                    let idx: Vec<usize> = (0..corpus.len())
                        .filter(|&i| corpus.documents[i].label == l)
                        .collect();
                    let m = corpus_lexical_mean(&corpus.subset(&idx), list);
                    (l, m)
                })
                .collect();
            let corpus_mean = corpus_lexical_mean(corpus, list);
            let compare_mean = compare.map(|c| corpus_lexical_mean(c, list));
            let ordering = compare_mean.map(|c| {
                match corpus_mean.partial_cmp(&c) {
                    Some(std::cmp::Ordering::Greater) => "corpus > compare",
                    Some(std::cmp::Ordering::Less) => "corpus < compare",
                    _ => "equal",
                }
                .to_string()
            });
            LexicalMean {
                list: list.name.clone(),
                corpus_mean,
                by_class,
                compare_mean,
                ordering,
            }
        })
        .collect()
}

fn ranking_csv(entries: &[(String, f64)]) -> String {
    let mut out = String::from("feature,information_gain\n");
    for (name, score) in entries {
        out.push_str(&format!("{name},{score}\n"));
    }
    out
}

fn ttest_csv(rows: &[TTestRow]) -> String {
    let mut out = String::from("feature,mean_real,mean_false,t,df,p,significant\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.feature, r.mean_real, r.mean_false, r.t, r.df, r.p, r.significant
        ));
    }
    out
}

/// Computes every analysis over the prepared corpus and writes
/// `analysis.json` plus CSV copies of the ranking and the t-test table.
pub fn run_analysis(config: &ExperimentConfig) -> StageResult<AnalysisReport> {
    config.validate().at(Stage::Config)?;
    if config.lexicons.is_empty() {
        return Err(Error::Config("analysis needs at least one lexicon".into())).at(Stage::Config);
    }
    let mut run = Run::start("analyze", config)?;
    let (inputs, compare) = run.stage(Stage::Prepare, |_| {
        let inputs = Inputs::load(config)?;
        let compare = match &config.compare_corpus {
            Some(p) => Some(load_corpus(p, config.corpus_format)?),
            None => None,
        };
        Ok((inputs, compare))
    })?;
    let corpus = &inputs.corpus;
    let featurizer = EmotionFeaturizer::new(&inputs.lexicons);
    let names: Vec<String> = featurizer.layout().iter().map(|c| c.name()).collect();
    let rows = run.stage(Stage::Featurize, |_| Ok(featurizer.matrix(corpus)))?;
    let y = labels(corpus);
    let classes = corpus.label_list();

    let report = run.stage(Stage::Analyze, |_| {
        let ranking = information_gain(&rows, &y, &names, config.analysis.bins)?;
        let information_gain = InformationGainSection {
            bins: config.analysis.bins,
            emotions: ranking.by_emotion().entries,
            coordinates: ranking.entries,
        };
        let a = &config.analysis;
        Ok(AnalysisReport {
            documents: corpus.len(),
            information_gain,
            t_tests: real_vs_false(&rows, &y, &names, &a.real_label, a.alpha)?,
            top_emotions: top_emotions(config, &rows, &y, &names, classes.len())?,
            lexical_means: lexical_means(&inputs, compare.as_ref()),
            classes: classes.clone(),
        })
    })?;
    run.stage(Stage::Write, |a| {
        a.write_json(ANALYSIS_FILE, &report)?;
        a.write(
            "information_gain.csv",
            ranking_csv(&report.information_gain.coordinates).as_bytes(),
        )?;
        a.write("ttests.csv", ttest_csv(&report.t_tests.rows).as_bytes())
    })?;
    run.finish()?;
    Ok(report)
}
