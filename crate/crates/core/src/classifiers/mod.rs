//! Classical classifiers: majority/random baselines, a CART random forest,
//! a one-vs-rest linear SVM and multinomial logistic regression.
//!
//! Classes are always the sorted set of training labels, so every
//! "lowest index wins" tie-break is lexicographic on the class name.

mod baselines;
mod forest;
mod linear;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use baselines::{trivial_baselines, Baselines};
pub use forest::{
    train_random_forest, DecisionTree, ForestParams, MaxFeatures, Node, RandomForest,
};
pub use linear::{
    logistic_loss_and_gradient, train_linear_svm, train_logistic_regression, LinearKind,
    LinearModel, LogisticParams, SvmParams,
};

use crate::features::SparseVector;
use crate::{Error, Result};

/// A feature vector the linear trainers can consume, dense or sparse.
pub trait FeatureRow: Sync {
    fn dim(&self) -> usize;
    fn dot(&self, w: &[f64]) -> f64;
    /// `w += a * self`
    fn add_scaled_to(&self, a: f64, w: &mut [f64]);
    fn squared_norm(&self) -> f64;
    fn is_finite(&self) -> bool;
}

impl FeatureRow for Vec<f64> {
    fn dim(&self) -> usize {
        self.len()
    }

    fn dot(&self, w: &[f64]) -> f64 {
        self.iter().zip(w).map(|(a, b)| a * b).sum()
    }

    fn add_scaled_to(&self, a: f64, w: &mut [f64]) {
        w.iter_mut().zip(self).for_each(|(wi, x)| *wi += a * x);
    }

    fn squared_norm(&self) -> f64 {
        self.iter().map(|x| x * x).sum()
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }
}

impl FeatureRow for SparseVector {
    fn dim(&self) -> usize {
        self.dim
    }

    fn dot(&self, w: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, x)| w[i] * x).sum()
    }

    fn add_scaled_to(&self, a: f64, w: &mut [f64]) {
        for &(i, x) in &self.entries {
            w[i] += a * x;
        }
    }

    fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|(_, x)| x * x).sum()
    }

    fn is_finite(&self) -> bool {
        self.entries.iter().all(|(_, x)| x.is_finite())
    }
}

/// Per-class feature weights of a linear model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub classes: Vec<String>,
    pub features: Vec<String>,
    /// `weights[class][feature]`
    pub weights: Vec<Vec<f64>>,
}

impl Coefficients {
    pub fn get(&self, class: &str, feature: &str) -> Option<f64> {
        let c = self.classes.iter().position(|x| x == class)?;
        let f = self.features.iter().position(|x| x == feature)?;
        Some(self.weights[c][f])
    }

    /// `(class, feature, weight)` triples in class-major order.
    pub fn entries(&self) -> Vec<(&str, &str, f64)> {
        let mut out = Vec::with_capacity(self.classes.len() * self.features.len());
        for (c, row) in self.classes.iter().zip(&self.weights) {
            for (f, &w) in self.features.iter().zip(row) {
                out.push((c.as_str(), f.as_str(), w));
            }
        }
        out
    }
}

/// Sorted distinct labels and each label's class index.
pub(crate) fn index_labels(
    labels: &[String],
    min_classes: usize,
) -> Result<(Vec<String>, Vec<usize>)> {
    let classes: Vec<String> = labels
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if classes.len() < min_classes {
        return Err(Error::Validation(format!(
            "need at least {min_classes} classes, got {}",
            classes.len()
        )));
    }
    let y = labels
        .iter()
        .map(|l| classes.binary_search(l).expect("label present"))
        .collect();
    Ok((classes, y))
}

pub(crate) fn check_rows<R: FeatureRow>(
    rows: &[R],
    labels: &[String],
    names: &[String],
) -> Result<usize> {
    if rows.len() != labels.len() {
        return Err(Error::Validation(format!(
            "{} rows for {} labels",
            rows.len(),
            labels.len()
        )));
    }
    if rows.is_empty() {
        return Err(Error::Validation("no training rows".into()));
    }
    let dim = rows[0].dim();
    if rows.iter().any(|r| r.dim() != dim) {
        return Err(Error::Validation("feature rows differ in width".into()));
    }
    if names.len() != dim {
        return Err(Error::Validation(format!(
            "{} feature names for width {dim}",
            names.len()
        )));
    }
    if !rows.iter().all(FeatureRow::is_finite) {
        return Err(Error::Validation("features must be finite".into()));
    }
    Ok(dim)
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}
