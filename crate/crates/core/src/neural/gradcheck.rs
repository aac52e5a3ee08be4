use rayon::prelude::*;

use super::model::{EinModel, Example};
use crate::{Error, Result};

/// Outcome of a finite-difference comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    /// Tensor name and flat index of the worst coordinate.
    pub worst: (String, usize),
    pub analytic: f64,
    pub numeric: f64,
    pub checked: usize,
}

/// `|a - n| / max(|a|, |n|, 1e-8)`
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Compares backpropagated gradients of the mean inference-mode loss over
/// `batch` with central differences `(f(θ+ε) − f(θ−ε)) / 2ε` for every
/// parameter of the tensors accepted by `include`. A frozen embedding is
/// skipped.
///
/// The difference is taken per example before averaging, which keeps the
/// rounding of the batch sum out of the numerator.
pub fn gradient_check(
    model: &EinModel,
    batch: &[Example],
    epsilon: f64,
    include: impl Fn(&str) -> bool,
) -> Result<GradCheckReport> {
    for ex in batch {
        model.check_input(&ex.ids, &ex.emotions)?;
    }
    let (base, grads) = model.loss_and_gradient(batch, None);
    if !base.is_finite() {
        return Err(Error::Numeric(format!("non-finite loss {base}")));
    }
    let names: Vec<&'static str> = grads.tensors().iter().map(|(n, _)| *n).collect();
    let coords: Vec<(usize, usize)> = names
        .iter()
        .enumerate()
        .filter(|(_, &name)| {
            include(name) && (name != "embedding" || model.config().trainable_embeddings)
        })
        .flat_map(|(t, _)| (0..grads.tensors()[t].1.len()).map(move |i| (t, i)))
        .collect();
    let n = batch.len() as f64;
    let numeric: Vec<Result<f64>> = coords
        .par_iter()
        .map_init(
            || model.clone(),
            |probe, &(t, i)| {
                let original = model.params().tensors()[t].1.as_slice()[i];
                let mut losses = |value: f64| -> Result<Vec<f64>> {
                    probe.params_mut().tensors_mut()[t].1.as_mut_slice()[i] = value;
                    let l: Vec<f64> = batch.iter().map(|ex| probe.example_loss(ex)).collect();
                    if l.iter().all(|x| x.is_finite()) {
                        Ok(l)
                    } else {
                        Err(Error::Numeric(format!(
                            "non-finite loss perturbing {}[{i}]",
                            names[t]
                        )))
                    }
                };
                let plus = losses(original + epsilon)?;
                let minus = losses(original - epsilon)?;
                probe.params_mut().tensors_mut()[t].1.as_mut_slice()[i] = original;
                let diff: f64 = plus.iter().zip(&minus).map(|(p, m)| p - m).sum();
                Ok(diff / (2.0 * epsilon * n))
            },
        )
        .collect();
    let mut report = GradCheckReport {
        max_relative_error: 0.0,
        worst: (String::new(), 0),
        analytic: 0.0,
        numeric: 0.0,
        checked: 0,
    };
    for (&(t, i), num) in coords.iter().zip(numeric) {
        let num = num?;
        let analytic = grads.tensors()[t].1.as_slice()[i];
        let err = relative_error(analytic, num);
        report.checked += 1;
        if err > report.max_relative_error || report.checked == 1 {
            report.max_relative_error = err;
            report.worst = (names[t].to_string(), i);
            report.analytic = analytic;
            report.numeric = num;
        }
    }
    Ok(report)
}
