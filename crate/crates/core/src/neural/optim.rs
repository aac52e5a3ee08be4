//! First-order optimizers with Keras-style update rules and defaults.

use serde::{Deserialize, Serialize};

use super::config::OptimizerKind;
use super::params::EinParams;

/// Optimizer hyper-parameters. Fields an optimizer does not use are ignored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyper {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub rho: f64,
    pub epsilon: f64,
}

impl Hyper {
    pub fn defaults(kind: OptimizerKind) -> Self {
        match kind {
            OptimizerKind::Adam => Hyper {
                learning_rate: 1e-3,
                beta1: 0.9,
                beta2: 0.999,
                rho: 0.0,
                epsilon: 1e-7,
            },
            OptimizerKind::Rmsprop => Hyper {
                learning_rate: 1e-3,
                beta1: 0.0,
                beta2: 0.0,
                rho: 0.9,
                epsilon: 1e-7,
            },
            OptimizerKind::Adadelta => Hyper {
                learning_rate: 1.0,
                beta1: 0.0,
                beta2: 0.0,
                rho: 0.95,
                epsilon: 1e-6,
            },
        }
    }
}

/// Per-parameter accumulators. Adam keeps the first and second moments,
/// RMSprop only the second, Adadelta the squared-gradient (`second`) and
/// squared-update (`first`) averages.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotState {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

impl SlotState {
    pub fn new(len: usize) -> Self {
        SlotState {
            first: vec![0.0; len],
            second: vec![0.0; len],
        }
    }
}

/// Applies one update in place. `step` is the 1-based update count, used by
/// Adam's bias correction.
pub fn optimizer_step(
    params: &mut [f64],
    grads: &[f64],
    state: &mut SlotState,
    step: u64,
    which: OptimizerKind,
    hyper: &Hyper,
) {
    debug_assert_eq!(params.len(), grads.len());
    let lr = hyper.learning_rate;
    let eps = hyper.epsilon;
    match which {
        OptimizerKind::Adam => {
            let t = step.max(1) as i32;
            let lr_t = lr * (1.0 - hyper.beta2.powi(t)).sqrt() / (1.0 - hyper.beta1.powi(t));
            for i in 0..params.len() {
                let g = grads[i];
                let m = &mut state.first[i];
                let v = &mut state.second[i];
                *m = hyper.beta1 * *m + (1.0 - hyper.beta1) * g;
                *v = hyper.beta2 * *v + (1.0 - hyper.beta2) * g * g;
                params[i] -= lr_t * *m / (v.sqrt() + eps);
            }
        }
        OptimizerKind::Rmsprop => {
            for i in 0..params.len() {
                let g = grads[i];
                let v = &mut state.second[i];
                *v = hyper.rho * *v + (1.0 - hyper.rho) * g * g;
                params[i] -= lr * g / (v.sqrt() + eps);
            }
        }
        OptimizerKind::Adadelta => {
            for i in 0..params.len() {
                let g = grads[i];
                let acc = &mut state.second[i];
                *acc = hyper.rho * *acc + (1.0 - hyper.rho) * g * g;
                let delta_acc = &mut state.first[i];
                let update = g * (*delta_acc + eps).sqrt() / (*acc + eps).sqrt();
                params[i] -= lr * update;
                *delta_acc = hyper.rho * *delta_acc + (1.0 - hyper.rho) * update * update;
            }
        }
    }
}

/// Optimizer state for a whole [`EinParams`].
#[derive(Clone, Debug)]
pub struct Optimizer {
    kind: OptimizerKind,
    hyper: Hyper,
    step: u64,
    slots: Vec<SlotState>,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, learning_rate: Option<f64>, params: &EinParams) -> Self {
        let mut hyper = Hyper::defaults(kind);
        if let Some(lr) = learning_rate {
            hyper.learning_rate = lr;
        }
        Optimizer {
            kind,
            hyper,
            step: 0,
            slots: params
                .tensors()
                .iter()
                .map(|(_, m)| SlotState::new(m.len()))
                .collect(),
        }
    }

    pub fn hyper(&self) -> &Hyper {
        &self.hyper
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    /// Updates every tensor; the embedding is left alone when `freeze_embedding`.
    pub fn apply(&mut self, params: &mut EinParams, grads: &EinParams, freeze_embedding: bool) {
        self.step += 1;
        let tensors = params
            .tensors_mut()
            .into_iter()
            .zip(grads.tensors())
            .zip(&mut self.slots);
        for (((name, p), (_, g)), slot) in tensors {
            if freeze_embedding && name == "embedding" {
                continue;
            }
            optimizer_step(
                p.as_mut_slice(),
                g.as_slice(),
                slot,
                self.step,
                self.kind,
                &self.hyper,
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(kind: OptimizerKind, g: f64, steps: u64) -> Vec<f64> {
        let hyper = Hyper::defaults(kind);
        let mut p = [0.0];
        let mut s = SlotState::new(1);
        let mut trace = Vec::new();
        for t in 1..=steps {
            let before = p[0];
            optimizer_step(&mut p, &[g], &mut s, t, kind, &hyper);
            trace.push(p[0] - before);
        }
        trace
    }

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        for kind in [
            OptimizerKind::Adam,
            OptimizerKind::Rmsprop,
            OptimizerKind::Adadelta,
        ] {
            let hyper = Hyper::defaults(kind);
            let mut p = [0.7, -1.2];
            let mut s = SlotState::new(2);
            for t in 1..=3 {
                optimizer_step(&mut p, &[0.0, 0.0], &mut s, t, kind, &hyper);
            }
            assert_eq!(p, [0.7, -1.2]);
            if kind == OptimizerKind::Adam {
                assert_eq!(s.first, vec![0.0, 0.0]);
                assert_eq!(s.second, vec![0.0, 0.0]);
            }
        }
    }

    #[test]
    fn first_adam_step_moves_by_the_learning_rate() {
        // m = 0.1, v = 0.001, lr_t = 1e-3 * sqrt(0.001) / 0.1,
        // step = lr_t * 0.1 / (sqrt(0.001) + 1e-7)
        let d = run(OptimizerKind::Adam, 1.0, 1)[0];
        let expected = -1e-3 * 0.001f64.sqrt() / (0.001f64.sqrt() + 1e-7);
        assert!((d - expected).abs() < 1e-18);
        assert!((d + 1e-3).abs() < 1e-8);
    }

    #[test]
    fn rmsprop_step_converges_to_learning_rate() {
        // Scalar simulation: v_t = 1 - 0.9^t for g = 1, so the step is
        // lr / (sqrt(1 - 0.9^t) + eps).
        let trace = run(OptimizerKind::Rmsprop, 1.0, 200);
        assert!((trace[0] + 1e-3 / (0.1f64.sqrt() + 1e-7)).abs() < 1e-15);
        assert!(trace.windows(2).all(|w| w[1].abs() <= w[0].abs()));
        assert!((trace[199] + 1e-3).abs() < 1e-9);
    }

    #[test]
    fn adadelta_first_step() {
        // acc = 0.05, update = sqrt(1e-6) / sqrt(0.05 + 1e-6)
        let d = run(OptimizerKind::Adadelta, 1.0, 1)[0];
        let expected = -(1e-6f64).sqrt() / (0.05f64 + 1e-6).sqrt();
        assert!((d - expected).abs() < 1e-15);
    }

    #[test]
    fn adam_is_nearly_scale_invariant() {
        // Only epsilon breaks exact invariance: it shifts the first step of
        // g = 1 by a relative eps / sqrt(v) ≈ 3e-6.
        let a = run(OptimizerKind::Adam, 1.0, 5);
        let b = run(OptimizerKind::Adam, 100.0, 5);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-8);
        }
    }
}
