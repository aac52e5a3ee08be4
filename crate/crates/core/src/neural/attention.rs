//! Feed-forward attention: one scalar score per timestep,
//! `e_j = tanh(w · h_j + b)`, weights `α = softmax(e)` and context
//! `c = Σ_j α_j h_j`.

use super::tensor::{axpy, dot, softmax, Matrix};

#[derive(Clone, Debug, PartialEq)]
pub struct AttentionOutput {
    pub context: Vec<f64>,
    pub weights: Vec<f64>,
    /// `tanh` scores before normalisation.
    pub scores: Vec<f64>,
}

pub fn attention_forward(hidden: &Matrix, w: &[f64], b: f64) -> AttentionOutput {
    let n = hidden.rows();
    let scores: Vec<f64> = (0..n).map(|j| (dot(w, hidden.row(j)) + b).tanh()).collect();
    let weights = softmax(&scores);
    let mut context = vec![0.0; hidden.cols()];
    for (j, &a) in weights.iter().enumerate() {
        axpy(a, hidden.row(j), &mut context);
    }
    AttentionOutput {
        context,
        weights,
        scores,
    }
}

/// Returns `dL/dhidden`; accumulates `dL/dw` and `dL/db`.
pub fn attention_backward(
    hidden: &Matrix,
    out: &AttentionOutput,
    d_context: &[f64],
    w: &[f64],
    dw: &mut [f64],
    db: &mut f64,
) -> Matrix {
    let n = hidden.rows();
    let mut d_hidden = Matrix::zeros(n, hidden.cols());
    let d_alpha: Vec<f64> = (0..n).map(|j| dot(d_context, hidden.row(j))).collect();
    let mean: f64 = out.weights.iter().zip(&d_alpha).map(|(a, d)| a * d).sum();
    for j in 0..n {
        let alpha = out.weights[j];
        let de = alpha * (d_alpha[j] - mean);
        let ds = de * (1.0 - out.scores[j] * out.scores[j]);
        let row = d_hidden.row_mut(j);
        axpy(alpha, d_context, row);
        axpy(ds, w, row);
        axpy(ds, hidden.row(j), dw);
        *db += ds;
    }
    d_hidden
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_state() {
        let h = Matrix::from_vec(1, 3, vec![0.3, -1.0, 2.0]);
        let out = attention_forward(&h, &[1.0, 2.0, 3.0], 0.5);
        assert_eq!(out.weights, vec![1.0]);
        assert_eq!(out.context, h.row(0).to_vec());
    }

    #[test]
    fn identical_states_get_uniform_weights() {
        let h = Matrix::from_vec(4, 2, [0.5, -0.2].repeat(4));
        let out = attention_forward(&h, &[0.7, 0.1], -0.3);
        for a in &out.weights {
            assert!((a - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn two_states_by_hand() {
        // h1 = (1, 0), h2 = (0, 1), w = (1, -1), b = 0
        // e1 = tanh(1), e2 = tanh(-1); α1 = 1 / (1 + exp(e2 - e1))
        let h = Matrix::from_vec(2, 2, vec![1.0, 0.0, 0.0, 1.0]);
        let out = attention_forward(&h, &[1.0, -1.0], 0.0);
        let t = 1f64.tanh();
        let a1 = 1.0 / (1.0 + (-2.0 * t).exp());
        assert!((out.weights[0] - a1).abs() < 1e-15);
        assert!((out.context[0] - a1).abs() < 1e-15);
        assert!((out.context[1] - (1.0 - a1)).abs() < 1e-15);
        // a1 = 1 / (1 + e^{-2 tanh 1}) from an independent evaluation
        assert!((a1 - 0.821_007_496_006).abs() < 1e-12);
    }

    #[test]
    fn zero_hidden_gives_zero_score_gradient() {
        let h = Matrix::zeros(3, 2);
        let out = attention_forward(&h, &[0.0, 0.0], 0.0);
        let mut dw = vec![0.0; 2];
        let mut db = 0.0;
        attention_backward(&h, &out, &[1.0, -1.0], &[0.0, 0.0], &mut dw, &mut db);
        assert_eq!(dw, vec![0.0, 0.0]);
        assert_eq!(db, 0.0);
    }

    proptest! {
        #[test]
        fn weights_form_a_distribution_and_context_is_convex(
            n in 1usize..8,
            values in proptest::collection::vec(-3.0f64..3.0, 24),
            w in proptest::collection::vec(-2.0f64..2.0, 3),
            b in -1.0f64..1.0,
        ) {
            let h = Matrix::from_vec(n, 3, values[..n * 3].to_vec());
            let out = attention_forward(&h, &w, b);
            prop_assert!((out.weights.iter().sum::<f64>() - 1.0).abs() < 1e-6);
            prop_assert!(out.weights.iter().all(|&a| a >= 0.0));
            for k in 0..3 {
                let col: Vec<f64> = (0..n).map(|j| h.get(j, k)).collect();
                let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(out.context[k] >= lo - 1e-12 && out.context[k] <= hi + 1e-12);
            }
        }
    }
}
