//! The emotionally-infused network and its training machinery.
//!
//! Content branch: embedding → LSTM → attention → dropout. Emotion branch:
//! dense layer over the lexicon emotion vector → dropout. Both are
//! concatenated and passed through a dense layer to a softmax (multiclass)
//! or sigmoid (binary) output. Setting `dense_a_units = 0` removes the
//! emotion branch.
//!
//! Everything runs in `f64` on the CPU. Sequences are processed unpadded,
//! one document at a time; examples inside a batch run in parallel and
//! their gradients are reduced in batch order, keeping training
//! bit-deterministic for a given seed.

pub mod attention;
pub mod checkpoint;
pub mod config;
pub mod gradcheck;
pub mod loss;
pub mod lstm;
pub mod model;
pub mod optim;
pub mod params;
pub mod tensor;
pub mod train;

pub use attention::{attention_backward, attention_forward, AttentionOutput};
pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint};
pub use config::{Activation, EinConfig, OptimizerKind, OutputMode, Preset};
pub use gradcheck::{gradient_check, relative_error, GradCheckReport};
pub use loss::{batch_loss, loss};
pub use lstm::{lstm_backward, lstm_forward};
pub use model::{DropoutMasks, EinModel, Example, Forward, Prediction, Vocabulary};
pub use optim::{optimizer_step, Hyper, Optimizer, SlotState};
pub use params::EinParams;
pub use tensor::Matrix;
pub use train::{encode_corpus, fit, train, TrainHistory};
