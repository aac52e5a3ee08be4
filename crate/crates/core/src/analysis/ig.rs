use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DEFAULT_BINS: usize = 10;

/// Features ordered by descending score, ties broken by name.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking {
    pub entries: Vec<(String, f64)>,
}

impl FeatureRanking {
    pub fn from_scores(scores: impl IntoIterator<Item = (String, f64)>) -> Self {
        let mut entries: Vec<(String, f64)> = scores.into_iter().collect();
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        FeatureRanking { entries }
    }

    pub fn score(&self, name: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| *s)
    }

    pub fn top(&self, n: usize) -> &[(String, f64)] {
        &self.entries[..n.min(self.entries.len())]
    }

    /// Collapses `lexicon:emotion` coordinates to one entry per emotion,
    /// keeping the largest score.
    pub fn by_emotion(&self) -> FeatureRanking {
        let mut best: BTreeMap<String, f64> = BTreeMap::new();
        for (name, s) in &self.entries {
            let key = emotion_part(name).to_string();
            best.entry(key).and_modify(|v| *v = v.max(*s)).or_insert(*s);
        }
        FeatureRanking::from_scores(best)
    }
}

/// The part after the last `:` of a coordinate name.
pub fn emotion_part(name: &str) -> &str {
    name.rsplit(':').next().unwrap_or(name)
}

/// Shannon entropy (nats) of a count histogram.
pub fn entropy(counts: impl IntoIterator<Item = usize>) -> f64 {
    let counts: Vec<usize> = counts.into_iter().filter(|&c| c > 0).collect();
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    -counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum::<f64>()
}

/// Information gain of one feature column after equal-width binning over
/// its observed range, clamped to `[0, H(labels)]`.
pub fn feature_information_gain(values: &[f64], labels: &[usize], bins: usize) -> f64 {
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    let h = entropy(histogram(labels, classes));
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
            (l.min(v), h.max(v))
        });
    if !(hi > lo) || h == 0.0 {
        return 0.0;
    }
    let mut table = vec![vec![0usize; classes]; bins];
    for (&v, &y) in values.iter().zip(labels) {
        let b = (((v - lo) / (hi - lo)) * bins as f64).floor() as usize;
        table[b.min(bins - 1)][y] += 1;
    }
    let n = labels.len() as f64;
    let conditional: f64 = table
        .iter()
        .map(|row| {
            let m: usize = row.iter().sum();
            m as f64 / n * entropy(row.iter().copied())
        })
        .sum();
    (h - conditional).clamp(0.0, h)
}

fn histogram(labels: &[usize], classes: usize) -> Vec<usize> {
    let mut counts = vec![0; classes];
    for &y in labels {
        counts[y] += 1;
    }
    counts
}

/// Ranks the columns of `features` (one row per document) by information
/// gain about `labels`.
pub fn information_gain(
    features: &[Vec<f64>],
    labels: &[String],
    names: &[String],
    bins: usize,
) -> Result<FeatureRanking> {
    if bins < 2 {
        return Err(Error::Config(format!("need at least 2 bins, got {bins}")));
    }
    if features.len() != labels.len() {
        return Err(Error::Validation(format!(
            "{} feature rows for {} labels",
            features.len(),
            labels.len()
        )));
    }
    if let Some(row) = features.iter().find(|r| r.len() != names.len()) {
        return Err(Error::Validation(format!(
            "feature row of width {} for {} names",
            row.len(),
            names.len()
        )));
    }
    if features.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Validation("features must be finite".into()));
    }
    let mut ids: HashMap<&str, usize> = HashMap::new();
    let mut sorted: Vec<&str> = labels.iter().map(String::as_str).collect();
    sorted.sort_unstable();
    sorted.dedup();
    for (i, l) in sorted.into_iter().enumerate() {
        ids.insert(l, i);
    }
    let y: Vec<usize> = labels.iter().map(|l| ids[l.as_str()]).collect();
    let scores = names.iter().enumerate().map(|(j, name)| {
        let column: Vec<f64> = features.iter().map(|r| r[j]).collect();
        (name.clone(), feature_information_gain(&column, &y, bins))
    });
    Ok(FeatureRanking::from_scores(scores))
}
