use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{argmax, check_rows, index_labels, Coefficients, FeatureRow};
use crate::neural::tensor::softmax;
use crate::rng::{derive_seed, seeded};
use crate::{Error, Result};

const FORMAT: &str = "ein-linear-model";
const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearKind {
    HingeOvr,
    MultinomialLogistic,
}

/// Per-class weights over named features plus a per-class bias.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub format: String,
    pub version: u32,
    pub kind: LinearKind,
    pub classes: Vec<String>,
    pub features: Vec<String>,
    /// `weights[class][feature]`
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl LinearModel {
    pub fn scores<R: FeatureRow + ?Sized>(&self, x: &R) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| x.dot(w) + b)
            .collect()
    }

    /// Highest-scoring class, lowest index on ties.
    pub fn predict_index<R: FeatureRow + ?Sized>(&self, x: &R) -> usize {
        argmax(&self.scores(x))
    }

    pub fn predict<R: FeatureRow + ?Sized>(&self, x: &R) -> &str {
        &self.classes[self.predict_index(x)]
    }

    pub fn predict_all<R: FeatureRow>(&self, rows: &[R]) -> Vec<usize> {
        rows.par_iter().map(|x| self.predict_index(x)).collect()
    }

    /// Class probabilities; only logistic models are calibrated.
    pub fn predict_proba<R: FeatureRow + ?Sized>(&self, x: &R) -> Result<Vec<f64>> {
        match self.kind {
            LinearKind::MultinomialLogistic => Ok(softmax(&self.scores(x))),
            LinearKind::HingeOvr => Err(Error::Config(
                "hinge models do not produce probabilities".into(),
            )),
        }
    }

    pub fn coefficients(&self) -> Coefficients {
        Coefficients {
            classes: self.classes.clone(),
            features: self.features.clone(),
            weights: self.weights.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: LinearModel = serde_json::from_str(text)?;
        if m.format != FORMAT || m.version != VERSION {
            return Err(Error::Data(format!(
                "unsupported linear model document {} v{}",
                m.format, m.version
            )));
        }
        if m.weights.len() != m.classes.len()
            || m.weights.iter().any(|w| w.len() != m.features.len())
        {
            return Err(Error::Data(
                "linear model weights do not match its classes and features".into(),
            ));
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// Hinge-loss weight; larger means weaker regularisation.
    pub c: f64,
    /// Maximum passes over the data.
    pub epochs: usize,
    /// Stop once the projected-gradient spread falls below this.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            epochs: 1000,
            tolerance: 1e-6,
            seed: 0,
        }
    }
}

/// One-vs-rest L2-regularised hinge-loss SVM.
///
/// Each binary problem `min ½(‖w‖² + β²) + C Σ max(0, 1 − yᵢ(w·xᵢ + βB))`
/// is solved by dual coordinate descent over a freshly shuffled (seeded)
/// order of examples every epoch. The bias `b = βB` is the weight of a
/// constant feature `B`, the root-mean-square row norm, so rescaling every
/// input by `s` together with `C` by `1/s²` yields the same predictions.
pub fn train_linear_svm<R: FeatureRow>(
    rows: &[R],
    labels: &[String],
    names: &[String],
    params: &SvmParams,
) -> Result<LinearModel> {
    let dim = check_rows(rows, labels, names)?;
    let (classes, y) = index_labels(labels, 2)?;
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(Error::Config(format!(
            "C must be positive, got {}",
            params.c
        )));
    }
    let norms: Vec<f64> = rows.iter().map(FeatureRow::squared_norm).collect();
    let mean_sq = norms.iter().sum::<f64>() / rows.len() as f64;
    let intercept = if mean_sq > 0.0 { mean_sq.sqrt() } else { 1.0 };
    let q: Vec<f64> = norms.iter().map(|n| n + intercept * intercept).collect();
    let fitted: Vec<(Vec<f64>, f64)> = (0..classes.len())
        .into_par_iter()
        .map(|c| {
            let sign: Vec<f64> = y.iter().map(|&k| if k == c { 1.0 } else { -1.0 }).collect();
            let mut rng = seeded(derive_seed(params.seed, c as u64));
            let mut alpha = vec![0.0; rows.len()];
            let mut w = vec![0.0; dim];
            let mut beta = 0.0;
            let mut order: Vec<usize> = (0..rows.len()).collect();
            for _ in 0..params.epochs {
                order.shuffle(&mut rng);
                let (mut pg_max, mut pg_min) = (f64::NEG_INFINITY, f64::INFINITY);
                for &i in &order {
                    let g = sign[i] * (rows[i].dot(&w) + beta * intercept) - 1.0;
                    let pg = if alpha[i] == 0.0 {
                        g.min(0.0)
                    } else if alpha[i] == params.c {
                        g.max(0.0)
                    } else {
                        g
                    };
                    pg_max = pg_max.max(pg);
                    pg_min = pg_min.min(pg);
                    if pg != 0.0 {
                        let old = alpha[i];
                        alpha[i] = (old - g / q[i]).clamp(0.0, params.c);
                        let d = (alpha[i] - old) * sign[i];
                        rows[i].add_scaled_to(d, &mut w);
                        beta += d * intercept;
                    }
                }
                if pg_max - pg_min < params.tolerance {
                    break;
                }
            }
            (w, beta * intercept)
        })
        .collect();
    let (weights, bias) = fitted.into_iter().unzip();
    Ok(LinearModel {
        format: FORMAT.into(),
        version: VERSION,
        kind: LinearKind::HingeOvr,
        classes,
        features: names.to_vec(),
        weights,
        bias,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    /// L2 penalty `λ/2 ‖W‖²` on the weights (not the biases).
    pub l2: f64,
    /// Gradient-descent iterations.
    pub epochs: usize,
    pub seed: u64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            l2: 1e-3,
            epochs: 500,
            seed: 0,
        }
    }
}

/// Mean cross-entropy plus L2 penalty, and its gradient with the same
/// layout as `(weights, bias)`.
pub fn logistic_loss_and_gradient<R: FeatureRow>(
    rows: &[R],
    y: &[usize],
    weights: &[Vec<f64>],
    bias: &[f64],
    l2: f64,
) -> (f64, Vec<Vec<f64>>, Vec<f64>) {
    let n = rows.len() as f64;
    let k = bias.len();
    let parts: Vec<(f64, Vec<f64>)> = rows
        .par_iter()
        .zip(y)
        .map(|(x, &t)| {
            let z: Vec<f64> = weights
                .iter()
                .zip(bias)
                .map(|(w, b)| x.dot(w) + b)
                .collect();
            let p = softmax(&z);
            let mut d = p.clone();
            d[t] -= 1.0;
            (-p[t].max(f64::MIN_POSITIVE).ln(), d)
        })
        .collect();
    let mut gw: Vec<Vec<f64>> = weights
        .iter()
        .map(|w| w.iter().map(|v| l2 * v).collect())
        .collect();
    let mut gb = vec![0.0; k];
    let mut loss = 0.5 * l2 * weights.iter().flatten().map(|v| v * v).sum::<f64>();
    for ((l, d), x) in parts.iter().zip(rows) {
        loss += l / n;
        for c in 0..k {
            x.add_scaled_to(d[c] / n, &mut gw[c]);
            gb[c] += d[c] / n;
        }
    }
    (loss, gw, gb)
}

/// Multinomial logistic regression by full-batch gradient descent with a
/// backtracking (Armijo) step size, from small seeded initial weights.
pub fn train_logistic_regression<R: FeatureRow>(
    rows: &[R],
    labels: &[String],
    names: &[String],
    params: &LogisticParams,
) -> Result<LinearModel> {
    let dim = check_rows(rows, labels, names)?;
    let (classes, y) = index_labels(labels, 2)?;
    if !(params.l2 >= 0.0 && params.l2.is_finite()) {
        return Err(Error::Config(format!(
            "l2 must be non-negative, got {}",
            params.l2
        )));
    }
    let k = classes.len();
    let mut rng = seeded(params.seed);
    let mut w: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..dim).map(|_| rng.gen_range(-0.01..0.01)).collect())
        .collect();
    let mut b = vec![0.0; k];
    let mut step = 1.0;
    let (mut loss, mut gw, mut gb) = logistic_loss_and_gradient(rows, &y, &w, &b, params.l2);
    for _ in 0..params.epochs {
        let g2: f64 = gw.iter().flatten().chain(&gb).map(|g| g * g).sum();
        if g2 < 1e-20 {
            break;
        }
        loop {
            let nw: Vec<Vec<f64>> = w
                .iter()
                .zip(&gw)
                .map(|(wr, gr)| wr.iter().zip(gr).map(|(a, g)| a - step * g).collect())
                .collect();
            let nb: Vec<f64> = b.iter().zip(&gb).map(|(a, g)| a - step * g).collect();
            let (nl, ngw, ngb) = logistic_loss_and_gradient(rows, &y, &nw, &nb, params.l2);
            if nl <= loss - 0.5 * step * g2 || step < 1e-12 {
                (w, b, loss, gw, gb) = (nw, nb, nl, ngw, ngb);
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
    }
    Ok(LinearModel {
        format: FORMAT.into(),
        version: VERSION,
        kind: LinearKind::MultinomialLogistic,
        classes,
        features: names.to_vec(),
        weights: w,
        bias: b,
    })
}
