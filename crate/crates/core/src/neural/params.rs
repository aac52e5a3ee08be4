use rand::Rng as _;

use super::tensor::Matrix;
use crate::rng::Rng;

/// Names of the parameter tensors in storage and checkpoint order.
pub const TENSOR_NAMES: [&str; 12] = [
    "embedding",
    "lstm_wx",
    "lstm_wh",
    "lstm_b",
    "attn_w",
    "attn_b",
    "dense_a_w",
    "dense_a_b",
    "dense_b_w",
    "dense_b_b",
    "out_w",
    "out_b",
];

/// Every trainable tensor of the network. Biases are column vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct EinParams {
    /// `(V + 1) x d`; row 0 is the shared out-of-vocabulary vector.
    pub embedding: Matrix,
    pub lstm_wx: Matrix,
    pub lstm_wh: Matrix,
    pub lstm_b: Matrix,
    pub attn_w: Matrix,
    pub attn_b: Matrix,
    /// `a x q`, empty when the emotion branch is disabled.
    pub dense_a_w: Matrix,
    pub dense_a_b: Matrix,
    /// `b x (u + a)`
    pub dense_b_w: Matrix,
    pub dense_b_b: Matrix,
    /// `k x b`, with `k = 1` for the sigmoid output.
    pub out_w: Matrix,
    pub out_b: Matrix,
}

/// Layer sizes that fix every tensor shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shapes {
    pub vocab: usize,
    pub embedding_dim: usize,
    pub lstm_units: usize,
    pub emotion_dim: usize,
    pub dense_a: usize,
    pub dense_b: usize,
    pub outputs: usize,
}

impl Shapes {
    pub fn of(&self, name: &str) -> (usize, usize) {
        let (u, a) = (self.lstm_units, self.dense_a);
        match name {
            "embedding" => (self.vocab + 1, self.embedding_dim),
            "lstm_wx" => (4 * u, self.embedding_dim),
            "lstm_wh" => (4 * u, u),
            "lstm_b" => (4 * u, 1),
            "attn_w" => (u, 1),
            "attn_b" => (1, 1),
            "dense_a_w" => (a, if a == 0 { 0 } else { self.emotion_dim }),
            "dense_a_b" => (a, 1),
            "dense_b_w" => (self.dense_b, u + a),
            "dense_b_b" => (self.dense_b, 1),
            "out_w" => (self.outputs, self.dense_b),
            "out_b" => (self.outputs, 1),
            other => panic!("unknown tensor {other}"),
        }
    }
}

fn glorot(rows: usize, cols: usize, rng: &mut Rng) -> Matrix {
    let limit = (6.0 / (rows + cols).max(1) as f64).sqrt();
    let data = (0..rows * cols)
        .map(|_| rng.gen_range(-limit..=limit))
        .collect();
    Matrix::from_vec(rows, cols, data)
}

impl EinParams {
    pub fn zeros(shapes: &Shapes) -> Self {
        let z = |name| {
            let (r, c) = shapes.of(name);
            Matrix::zeros(r, c)
        };
        EinParams {
            embedding: z("embedding"),
            lstm_wx: z("lstm_wx"),
            lstm_wh: z("lstm_wh"),
            lstm_b: z("lstm_b"),
            attn_w: z("attn_w"),
            attn_b: z("attn_b"),
            dense_a_w: z("dense_a_w"),
            dense_a_b: z("dense_a_b"),
            dense_b_w: z("dense_b_w"),
            dense_b_b: z("dense_b_b"),
            out_w: z("out_w"),
            out_b: z("out_b"),
        }
    }

    /// Glorot-uniform weights, zero biases except the LSTM forget gate (1),
    /// small uniform embeddings.
    pub fn init(shapes: &Shapes, rng: &mut Rng) -> Self {
        let mut p = EinParams::zeros(shapes);
        let (v, d) = shapes.of("embedding");
        p.embedding = Matrix::from_vec(
            v,
            d,
            (0..v * d).map(|_| rng.gen_range(-0.05..=0.05)).collect(),
        );
        let u = shapes.lstm_units;
        // Fan-in/out per gate, not for the stacked matrix.
        p.lstm_wx = {
            let limit = (6.0 / (u + shapes.embedding_dim) as f64).sqrt();
            let n = 4 * u * shapes.embedding_dim;
            Matrix::from_vec(
                4 * u,
                shapes.embedding_dim,
                (0..n).map(|_| rng.gen_range(-limit..=limit)).collect(),
            )
        };
        p.lstm_wh = {
            let limit = (6.0 / (2 * u) as f64).sqrt();
            Matrix::from_vec(
                4 * u,
                u,
                (0..4 * u * u)
                    .map(|_| rng.gen_range(-limit..=limit))
                    .collect(),
            )
        };
        p.lstm_b.as_mut_slice()[u..2 * u].fill(1.0);
        p.attn_w = glorot(u, 1, rng);
        let (r, c) = shapes.of("dense_a_w");
        p.dense_a_w = glorot(r, c, rng);
        let (r, c) = shapes.of("dense_b_w");
        p.dense_b_w = glorot(r, c, rng);
        let (r, c) = shapes.of("out_w");
        p.out_w = glorot(r, c, rng);
        p
    }

    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.tensors_mut().into_iter().for_each(|(_, m)| m.fill(0.0));
        z
    }

    pub fn tensors(&self) -> [(&'static str, &Matrix); 12] {
        [
            (TENSOR_NAMES[0], &self.embedding),
            (TENSOR_NAMES[1], &self.lstm_wx),
            (TENSOR_NAMES[2], &self.lstm_wh),
            (TENSOR_NAMES[3], &self.lstm_b),
            (TENSOR_NAMES[4], &self.attn_w),
            (TENSOR_NAMES[5], &self.attn_b),
            (TENSOR_NAMES[6], &self.dense_a_w),
            (TENSOR_NAMES[7], &self.dense_a_b),
            (TENSOR_NAMES[8], &self.dense_b_w),
            (TENSOR_NAMES[9], &self.dense_b_b),
            (TENSOR_NAMES[10], &self.out_w),
            (TENSOR_NAMES[11], &self.out_b),
        ]
    }

    pub fn tensors_mut(&mut self) -> [(&'static str, &mut Matrix); 12] {
        [
            (TENSOR_NAMES[0], &mut self.embedding),
            (TENSOR_NAMES[1], &mut self.lstm_wx),
            (TENSOR_NAMES[2], &mut self.lstm_wh),
            (TENSOR_NAMES[3], &mut self.lstm_b),
            (TENSOR_NAMES[4], &mut self.attn_w),
            (TENSOR_NAMES[5], &mut self.attn_b),
            (TENSOR_NAMES[6], &mut self.dense_a_w),
            (TENSOR_NAMES[7], &mut self.dense_a_b),
            (TENSOR_NAMES[8], &mut self.dense_b_w),
            (TENSOR_NAMES[9], &mut self.dense_b_b),
            (TENSOR_NAMES[10], &mut self.out_w),
            (TENSOR_NAMES[11], &mut self.out_b),
        ]
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|(_, m)| m.len()).sum()
    }

    /// `self += scale * other`, tensor by tensor.
    pub fn add_scaled(&mut self, scale: f64, other: &EinParams) {
        for ((_, a), (_, b)) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (x, y) in a.as_mut_slice().iter_mut().zip(b.as_slice()) {
                *x += scale * y;
            }
        }
    }
}
