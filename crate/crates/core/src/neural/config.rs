use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `y`.
    pub fn derivative(self, z: f64, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Adam,
    Adadelta,
    Rmsprop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputMode {
    SoftmaxMulticlass,
    SigmoidBinary,
}

macro_rules! impl_from_str {
    ($ty:ty, $what:literal, { $($name:literal => $variant:expr),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($name => Ok($variant),)+
                    other => Err(Error::Config(format!(concat!("unknown ", $what, " '{}'"), other))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let name = match self {
                    $(v if *v == $variant => $name,)+
                    _ => unreachable!(),
                };
                f.write_str(name)
            }
        }
    };
}

impl_from_str!(Activation, "activation", { "relu" => Activation::Relu, "tanh" => Activation::Tanh });
impl_from_str!(OptimizerKind, "optimizer", {
    "adam" => OptimizerKind::Adam,
    "adadelta" => OptimizerKind::Adadelta,
    "rmsprop" => OptimizerKind::Rmsprop,
});
impl_from_str!(OutputMode, "output mode", {
    "softmax_multiclass" => OutputMode::SoftmaxMulticlass,
    "sigmoid_binary" => OutputMode::SigmoidBinary,
});

/// Architecture and training settings of the emotionally-infused network.
///
/// `dense_a_units = 0` disables the emotion branch, which turns the model
/// into the plain LSTM + attention baseline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EinConfig {
    pub embedding_dim: usize,
    pub lstm_units: usize,
    pub dense_a_units: usize,
    pub dense_b_units: usize,
    pub batch_size: usize,
    pub hidden_activation: Activation,
    pub optimizer: OptimizerKind,
    /// Overrides the optimizer's default learning rate.
    pub learning_rate: Option<f64>,
    pub drop_c: f64,
    pub drop_d: f64,
    pub max_sequence: usize,
    pub output_mode: OutputMode,
    /// Label treated as the positive class in binary mode.
    pub positive_label: Option<String>,
    pub remove_stop_words: bool,
    pub trainable_embeddings: bool,
    pub seed: u64,
    pub early_stop_patience: usize,
    pub max_epochs: usize,
    /// Record inference-mode training accuracy after every epoch.
    pub monitor_train_accuracy: bool,
}

impl Default for EinConfig {
    fn default() -> Self {
        EinConfig {
            embedding_dim: 300,
            lstm_units: 90,
            dense_a_units: 320,
            dense_b_units: 60,
            batch_size: 64,
            hidden_activation: Activation::Relu,
            optimizer: OptimizerKind::Adam,
            learning_rate: None,
            drop_c: 0.5,
            drop_d: 0.1,
            max_sequence: 300,
            output_mode: OutputMode::SoftmaxMulticlass,
            positive_label: None,
            remove_stop_words: true,
            trainable_embeddings: true,
            seed: 0,
            early_stop_patience: 5,
            max_epochs: 100,
            monitor_train_accuracy: false,
        }
    }
}

/// Tuned per-dataset layer sizes for the LSTM baseline and the full model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    NewsArticlesLstm,
    NewsArticlesEin,
    TwitterLstm,
    TwitterEin,
    ClickbaitLstm,
    ClickbaitEin,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "news_articles_lstm" => Preset::NewsArticlesLstm,
            "news_articles_ein" => Preset::NewsArticlesEin,
            "twitter_lstm" => Preset::TwitterLstm,
            "twitter_ein" => Preset::TwitterEin,
            "clickbait_lstm" => Preset::ClickbaitLstm,
            "clickbait_ein" => Preset::ClickbaitEin,
            other => return Err(Error::Config(format!("unknown preset '{other}'"))),
        })
    }
}

impl EinConfig {
    pub fn preset(preset: Preset) -> Self {
        use Activation::*;
        use OptimizerKind::*;
        let (lstm, a, b, batch, act, opt, drop_c, drop_d) = match preset {
            Preset::NewsArticlesLstm => (140, 0, 320, 64, Relu, Adadelta, 0.5, 0.2),
            Preset::NewsArticlesEin => (90, 320, 60, 64, Relu, Adam, 0.5, 0.1),
            Preset::TwitterLstm => (180, 0, 120, 64, Relu, Adadelta, 0.5, 0.2),
            Preset::TwitterEin => (180, 100, 60, 64, Relu, Rmsprop, 0.2, 0.2),
            Preset::ClickbaitLstm => (120, 0, 260, 32, Tanh, Rmsprop, 0.2, 0.2),
            Preset::ClickbaitEin => (120, 60, 120, 32, Relu, Adam, 0.2, 0.2),
        };
        let binary = matches!(preset, Preset::ClickbaitLstm | Preset::ClickbaitEin);
        EinConfig {
            lstm_units: lstm,
            dense_a_units: a,
            dense_b_units: b,
            batch_size: batch,
            hidden_activation: act,
            optimizer: opt,
            drop_c,
            drop_d,
            output_mode: if binary {
                OutputMode::SigmoidBinary
            } else {
                OutputMode::SoftmaxMulticlass
            },
            positive_label: binary.then(|| "clickbait".to_string()),
            ..EinConfig::default()
        }
    }

    pub fn emotion_branch(&self) -> bool {
        self.dense_a_units > 0
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("embedding_dim", self.embedding_dim),
            ("lstm_units", self.lstm_units),
            ("dense_b_units", self.dense_b_units),
            ("batch_size", self.batch_size),
            ("max_sequence", self.max_sequence),
            ("max_epochs", self.max_epochs),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        for (name, p) in [("drop_c", self.drop_c), ("drop_d", self.drop_d)] {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must lie in [0,1), got {p}")));
            }
        }
        if let Some(lr) = self.learning_rate {
            if !(lr.is_finite() && lr > 0.0) {
                return Err(Error::Config(format!(
                    "learning_rate must be positive, got {lr}"
                )));
            }
        }
        if self.output_mode == OutputMode::SigmoidBinary && self.positive_label.is_none() {
            return Err(Error::Config(
                "binary output mode needs positive_label".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_tuned_sizes() {
        let c = EinConfig::preset(Preset::NewsArticlesEin);
        assert_eq!(
            (c.lstm_units, c.dense_a_units, c.dense_b_units, c.batch_size),
            (90, 320, 60, 64)
        );
        assert_eq!(c.optimizer, OptimizerKind::Adam);
        assert_eq!((c.drop_c, c.drop_d), (0.5, 0.1));
        let c = EinConfig::preset(Preset::ClickbaitLstm);
        assert!(!c.emotion_branch());
        assert_eq!(c.hidden_activation, Activation::Tanh);
        assert_eq!(c.output_mode, OutputMode::SigmoidBinary);
        c.validate().unwrap();
    }

    #[test]
    fn validation() {
        let bad = EinConfig {
            drop_c: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = EinConfig {
            output_mode: OutputMode::SigmoidBinary,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        EinConfig::default().validate().unwrap();
    }

    #[test]
    fn names_parse() {
        assert_eq!(
            "RMSprop".parse::<OptimizerKind>().unwrap(),
            OptimizerKind::Rmsprop
        );
        assert_eq!(OptimizerKind::Adadelta.to_string(), "adadelta");
        assert!("sgd".parse::<OptimizerKind>().is_err());
        assert_eq!(Activation::Tanh.to_string(), "tanh");
    }
}
