use std::collections::BTreeMap;

use super::ig::emotion_part;
use crate::classifiers::Coefficients;
use crate::{Error, Result};

/// Per class, the `n` emotions with the largest signed coefficient,
/// descending, ties broken by name.
///
/// Coordinate names of the form `lexicon:emotion` are first collapsed to
/// one weight per emotion, the maximum over lexicons.
pub fn top_n_emotions(
    coeffs: &Coefficients,
    n: usize,
) -> Result<BTreeMap<String, Vec<(String, f64)>>> {
    let mut out = BTreeMap::new();
    for (class, weights) in coeffs.classes.iter().zip(&coeffs.weights) {
        let mut best: BTreeMap<&str, f64> = BTreeMap::new();
        for (name, &w) in coeffs.features.iter().zip(weights) {
            best.entry(emotion_part(name))
                .and_modify(|v| *v = v.max(w))
                .or_insert(w);
        }
        if n > best.len() {
            return Err(Error::Validation(format!(
                "asked for the top {n} emotions but only {} are present",
                best.len()
            )));
        }
        let mut ranked: Vec<(String, f64)> =
            best.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(n);
        out.insert(class.clone(), ranked);
    }
    Ok(out)
}
