use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: String,
    /// Percentages.
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold count.
    pub support: usize,
}

/// Classification quality. All scores are percentages.
///
/// A class that is never predicted has precision 0; a class with no gold
/// examples has recall 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub classes: Vec<String>,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub per_class: Vec<ClassMetrics>,
    /// `confusion[gold][predicted]`, in `classes` order.
    pub confusion: Vec<Vec<usize>>,
    /// Diagonal over gold count, in `[0, 1]`.
    pub per_class_tp_ratio: BTreeMap<String, f64>,
}

impl MetricsReport {
    pub fn class(&self, label: &str) -> Option<&ClassMetrics> {
        self.per_class.iter().find(|c| c.label == label)
    }
}

fn safe_div(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

/// Metrics over class indices into `classes`.
pub fn compute_metrics_indexed(
    predictions: &[usize],
    gold: &[usize],
    classes: &[String],
) -> Result<MetricsReport> {
    if predictions.len() != gold.len() {
        return Err(Error::Validation(format!(
            "{} predictions for {} gold labels",
            predictions.len(),
            gold.len()
        )));
    }
    if gold.is_empty() {
        return Err(Error::Validation(
            "cannot score an empty prediction set".into(),
        ));
    }
    let k = classes.len();
    if let Some(&bad) = predictions.iter().chain(gold).find(|&&c| c >= k) {
        return Err(Error::Validation(format!(
            "class index {bad} outside the label set"
        )));
    }
    let mut confusion = vec![vec![0usize; k]; k];
    for (&p, &g) in predictions.iter().zip(gold) {
        confusion[g][p] += 1;
    }
    let mut per_class = Vec::with_capacity(k);
    let mut per_class_tp_ratio = BTreeMap::new();
    for c in 0..k {
        let tp = confusion[c][c] as f64;
        let support: usize = confusion[c].iter().sum();
        let predicted: usize = (0..k).map(|r| confusion[r][c]).sum();
        let precision = safe_div(tp, predicted as f64);
        let recall = safe_div(tp, support as f64);
        let f1 = safe_div(2.0 * precision * recall, precision + recall);
        per_class_tp_ratio.insert(classes[c].clone(), recall);
        per_class.push(ClassMetrics {
            label: classes[c].clone(),
            precision: 100.0 * precision,
            recall: 100.0 * recall,
            f1: 100.0 * f1,
            support,
        });
    }
    let mean = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / k as f64;
    let trace: usize = (0..k).map(|c| confusion[c][c]).sum();
    Ok(MetricsReport {
        classes: classes.to_vec(),
        accuracy: 100.0 * trace as f64 / gold.len() as f64,
        macro_precision: mean(|c| c.precision),
        macro_recall: mean(|c| c.recall),
        macro_f1: mean(|c| c.f1),
        per_class,
        confusion,
        per_class_tp_ratio,
    })
}

/// Metrics over string labels; `labels` fixes the class set and order.
pub fn compute_metrics(
    predictions: &[String],
    gold: &[String],
    labels: &[String],
) -> Result<MetricsReport> {
    let index = |s: &String| {
        labels
            .iter()
            .position(|l| l == s)
            .ok_or_else(|| Error::Validation(format!("label '{s}' outside the label set")))
    };
    let p = predictions.iter().map(index).collect::<Result<Vec<_>>>()?;
    let g = gold.iter().map(index).collect::<Result<Vec<_>>>()?;
    compute_metrics_indexed(&p, &g, labels)
}

/// Macro-F1 in percent; 0 for empty input.
pub fn macro_f1(gold: &[usize], predictions: &[usize], classes: usize) -> f64 {
    let names: Vec<String> = (0..classes).map(|c| c.to_string()).collect();
    compute_metrics_indexed(predictions, gold, &names)
        .map(|r| r.macro_f1)
        .unwrap_or(0.0)
}
