//! Single-layer LSTM with forward pass over all timesteps and full
//! backpropagation through time.
//!
//! Gate rows of the stacked weight matrices are ordered input, forget,
//! output, candidate: `z = Wx x_t + Wh h_{t-1} + b`, `i, f, o = σ(z_·)`,
//! `g = tanh(z_g)`, `c_t = f ⊙ c_{t-1} + i ⊙ g`, `h_t = o ⊙ tanh(c_t)`,
//! with `h_0 = c_0 = 0`.

use super::tensor::{sigmoid, Matrix};

#[derive(Clone, Copy, Debug)]
pub struct LstmWeights<'a> {
    /// `4u x d`
    pub wx: &'a Matrix,
    /// `4u x u`
    pub wh: &'a Matrix,
    /// `4u x 1`
    pub b: &'a Matrix,
}

impl LstmWeights<'_> {
    pub fn units(&self) -> usize {
        self.wh.cols()
    }
}

pub struct LstmGrads<'a> {
    pub wx: &'a mut Matrix,
    pub wh: &'a mut Matrix,
    pub b: &'a mut Matrix,
}

/// Activations kept for the backward pass.
#[derive(Clone, Debug)]
pub struct LstmCache {
    /// Post-activation gates per step, `[i | f | o | g]`, each `u` wide.
    gates: Vec<Vec<f64>>,
    /// Cell states `c_1..c_n`.
    cells: Vec<Vec<f64>>,
    /// `tanh(c_t)`
    cell_tanh: Vec<Vec<f64>>,
}

/// Runs the recurrence over the rows of `inputs` (`n x d`) and returns the
/// hidden states (`n x u`).
pub fn lstm_forward(inputs: &Matrix, w: LstmWeights<'_>) -> (Matrix, LstmCache) {
    let n = inputs.rows();
    let u = w.units();
    let mut hidden = Matrix::zeros(n, u);
    let mut cache = LstmCache {
        gates: Vec::with_capacity(n),
        cells: Vec::with_capacity(n),
        cell_tanh: Vec::with_capacity(n),
    };
    let mut h_prev = vec![0.0; u];
    let mut c_prev = vec![0.0; u];
    for t in 0..n {
        let mut z = w.b.as_slice().to_vec();
        w.wx.matvec_acc(inputs.row(t), &mut z);
        w.wh.matvec_acc(&h_prev, &mut z);
        for v in &mut z[..3 * u] {
            *v = sigmoid(*v);
        }
        for v in &mut z[3 * u..] {
            *v = v.tanh();
        }
        let (i, rest) = z.split_at(u);
        let (f, rest) = rest.split_at(u);
        let (o, g) = rest.split_at(u);
        let mut c = vec![0.0; u];
        let mut ct = vec![0.0; u];
        let h = hidden.row_mut(t);
        for k in 0..u {
            c[k] = f[k] * c_prev[k] + i[k] * g[k];
            ct[k] = c[k].tanh();
            h[k] = o[k] * ct[k];
        }
        h_prev.copy_from_slice(h);
        c_prev.clone_from(&c);
        cache.gates.push(z);
        cache.cells.push(c);
        cache.cell_tanh.push(ct);
    }
    (hidden, cache)
}

/// Backpropagates `d_hidden` (`n x u`, the loss gradient w.r.t. every hidden
/// state) through time. Accumulates weight gradients into `grads` and
/// returns the gradient w.r.t. the inputs (`n x d`).
pub fn lstm_backward(
    inputs: &Matrix,
    hidden: &Matrix,
    cache: &LstmCache,
    d_hidden: &Matrix,
    w: LstmWeights<'_>,
    grads: LstmGrads<'_>,
) -> Matrix {
    let n = inputs.rows();
    let u = w.units();
    let mut d_inputs = Matrix::zeros(n, inputs.cols());
    let mut dh_next = vec![0.0; u];
    let mut dc_next = vec![0.0; u];
    let zeros = vec![0.0; u];
    let mut dz = vec![0.0; 4 * u];
    for t in (0..n).rev() {
        let gates = &cache.gates[t];
        let (i, rest) = gates.split_at(u);
        let (f, rest) = rest.split_at(u);
        let (o, g) = rest.split_at(u);
        let ct = &cache.cell_tanh[t];
        let c_prev = if t > 0 { &cache.cells[t - 1] } else { &zeros };
        let h_prev = if t > 0 { hidden.row(t - 1) } else { &zeros[..] };
        let dh_ext = d_hidden.row(t);
        for k in 0..u {
            let dh = dh_ext[k] + dh_next[k];
            let d_o = dh * ct[k];
            let dc = dc_next[k] + dh * o[k] * (1.0 - ct[k] * ct[k]);
            let d_i = dc * g[k];
            let d_g = dc * i[k];
            let d_f = dc * c_prev[k];
            dc_next[k] = dc * f[k];
            dz[k] = d_i * i[k] * (1.0 - i[k]);
            dz[u + k] = d_f * f[k] * (1.0 - f[k]);
            dz[2 * u + k] = d_o * o[k] * (1.0 - o[k]);
            dz[3 * u + k] = d_g * (1.0 - g[k] * g[k]);
        }
        grads.wx.outer_acc(&dz, inputs.row(t));
        grads.wh.outer_acc(&dz, h_prev);
        for (gb, d) in grads.b.as_mut_slice().iter_mut().zip(&dz) {
            *gb += d;
        }
        w.wx.matvec_t_acc(&dz, d_inputs.row_mut(t));
        dh_next.fill(0.0);
        w.wh.matvec_t_acc(&dz, &mut dh_next);
    }
    d_inputs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weights(u: usize, d: usize, wx: f64, wh: f64, b: f64) -> (Matrix, Matrix, Matrix) {
        let mut mx = Matrix::zeros(4 * u, d);
        mx.fill(wx);
        let mut mh = Matrix::zeros(4 * u, u);
        mh.fill(wh);
        let mut mb = Matrix::zeros(4 * u, 1);
        mb.fill(b);
        (mx, mh, mb)
    }

    #[test]
    fn zero_weights_and_inputs_give_zero_states() {
        let (wx, wh, b) = weights(3, 2, 0.0, 0.0, 0.0);
        let (h, _) = lstm_forward(
            &Matrix::zeros(4, 2),
            LstmWeights {
                wx: &wx,
                wh: &wh,
                b: &b,
            },
        );
        assert!(h.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_step_is_one_cell_application() {
        let (wx, wh, b) = weights(1, 1, 0.5, 0.0, 0.1);
        let x = Matrix::from_vec(1, 1, vec![2.0]);
        let (h, _) = lstm_forward(
            &x,
            LstmWeights {
                wx: &wx,
                wh: &wh,
                b: &b,
            },
        );
        let z = 0.5 * 2.0 + 0.1;
        let (i, o, g) = (sigmoid(z), sigmoid(z), z.tanh());
        let expected = o * (i * g).tanh();
        assert!((h.get(0, 0) - expected).abs() < 1e-15);
    }

    #[test]
    fn two_steps_hand_computed() {
        // Distinct gate weights: rows i, f, o, g.
        let wx = Matrix::from_vec(4, 1, vec![0.5, -0.3, 0.8, 1.2]);
        let wh = Matrix::from_vec(4, 1, vec![0.1, 0.4, -0.2, 0.7]);
        let b = Matrix::from_vec(4, 1, vec![0.0, 1.0, 0.1, -0.1]);
        let x = Matrix::from_vec(2, 1, vec![1.0, -0.5]);
        let (h, _) = lstm_forward(
            &x,
            LstmWeights {
                wx: &wx,
                wh: &wh,
                b: &b,
            },
        );

        let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
        let step = |x: f64, h: f64, c: f64| {
            let i = sig(0.5 * x + 0.1 * h);
            let f = sig(-0.3 * x + 0.4 * h + 1.0);
            let o = sig(0.8 * x - 0.2 * h + 0.1);
            let g = (1.2 * x + 0.7 * h - 0.1).tanh();
            let c = f * c + i * g;
            (o * c.tanh(), c)
        };
        let (h1, c1) = step(1.0, 0.0, 0.0);
        let (h2, _) = step(-0.5, h1, c1);
        assert!((h.get(0, 0) - h1).abs() < 1e-14);
        assert!((h.get(1, 0) - h2).abs() < 1e-14);
        // Independent scalar evaluation (Python, math module).
        assert!((h.get(0, 0) - 0.327_578_432_675_044_2).abs() < 1e-15);
        assert!((h.get(1, 0) - 0.078_611_633_629_821_61).abs() < 1e-15);
    }
}
