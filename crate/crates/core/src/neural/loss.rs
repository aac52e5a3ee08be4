use super::config::OutputMode;

/// Probabilities are clamped to `[EPSILON, 1 - EPSILON]` before the log.
pub const EPSILON: f64 = 1e-7;

fn clamp(p: f64) -> f64 {
    p.clamp(EPSILON, 1.0 - EPSILON)
}

/// Negative log-likelihood of `target` under `pred`.
///
/// `pred` is the class distribution: for binary mode it is `[1 - p, p]`
/// and `target` is 1 for the positive class.
pub fn loss(pred: &[f64], target: usize, mode: OutputMode) -> f64 {
    match mode {
        OutputMode::SoftmaxMulticlass => -clamp(pred[target]).ln(),
        OutputMode::SigmoidBinary => {
            let p = clamp(pred[1]);
            if target == 1 {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        }
    }
}

/// Mean loss over a batch of `(prediction, target)` pairs.
pub fn batch_loss<'a>(
    items: impl IntoIterator<Item = (&'a [f64], usize)>,
    mode: OutputMode,
) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for (pred, target) in items {
        sum += loss(pred, target, mode);
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certain_prediction_has_near_zero_loss() {
        assert!(loss(&[0.0, 1.0, 0.0], 1, OutputMode::SoftmaxMulticlass) < 1e-6);
    }

    #[test]
    fn uniform_five_classes() {
        let l = loss(&[0.2; 5], 3, OutputMode::SoftmaxMulticlass);
        assert!((l - 5f64.ln()).abs() < 1e-12);
        assert!((l - 1.6094).abs() < 1e-4);
    }

    #[test]
    fn binary_cross_entropy() {
        let l = loss(&[0.2, 0.8], 1, OutputMode::SigmoidBinary);
        assert!((l - 0.223_143_551_314_209_7).abs() < 1e-12);
        let l = loss(&[0.2, 0.8], 0, OutputMode::SigmoidBinary);
        assert!((l - 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn clamped_when_wrong_and_certain() {
        let l = loss(&[1.0, 0.0], 1, OutputMode::SoftmaxMulticlass);
        assert!((l - (-(EPSILON.ln()))).abs() < 1e-12);
        let mean = batch_loss(
            [(&[0.5, 0.5][..], 0), (&[0.5, 0.5][..], 1)],
            OutputMode::SoftmaxMulticlass,
        );
        assert!((mean - 2f64.ln()).abs() < 1e-12);
    }
}
