use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::{Error, Result};

/// Welch's unequal-variance t-test, two-sided.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    /// Welch–Satterthwaite degrees of freedom (NaN when both variances are 0).
    pub df: f64,
    pub p: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    pub significant_05: bool,
    pub significant_01: bool,
}

impl TTestResult {
    pub fn significant_at(&self, alpha: f64) -> bool {
        self.p < alpha
    }
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Two-sided Welch t-test of `a` against `b`.
///
/// With both sample variances zero: equal means give `t = 0, p = 1`,
/// different means give `t = ±∞, p = 0`.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Validation(format!(
            "t-test needs at least 2 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Validation("t-test samples must be finite".into()));
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (sa, sb) = (va / a.len() as f64, vb / b.len() as f64);
    let se = sa + sb;
    let (t, df, p) = if se == 0.0 {
        if ma == mb {
            (0.0, f64::NAN, 1.0)
        } else {
            let t = if ma > mb {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
            (t, f64::NAN, 0.0)
        }
    } else {
        let t = (ma - mb) / se.sqrt();
        let df = se * se / (sa * sa / (a.len() - 1) as f64 + sb * sb / (b.len() - 1) as f64);
        let x = df / (df + t * t);
        let p = if x >= 1.0 {
            1.0
        } else {
            beta_reg(df / 2.0, 0.5, x)
        };
        (t, df, p.clamp(0.0, 1.0))
    };
    Ok(TTestResult {
        t,
        df,
        p,
        mean_a: ma,
        mean_b: mb,
        significant_05: p < 0.05,
        significant_01: p < 0.01,
    })
}
