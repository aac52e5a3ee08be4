use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Corpus;
use crate::rng;
use crate::{Error, Result};

/// Hold-out split parameters. `validation_fraction` is taken from what is
/// left after the test part has been removed; zero disables validation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub validation_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            test_fraction: 0.2,
            validation_fraction: 0.2,
            seed: 0,
            stratified: true,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = |f: f64| f > 0.0 && f < 1.0;
        if !ok(self.test_fraction) {
            return Err(Error::Config(format!(
                "test_fraction must lie in (0,1), got {}",
                self.test_fraction
            )));
        }
        if !(self.validation_fraction == 0.0 || ok(self.validation_fraction)) {
            return Err(Error::Config(format!(
                "validation_fraction must lie in [0,1), got {}",
                self.validation_fraction
            )));
        }
        let train_share = (1.0 - self.test_fraction) * (1.0 - self.validation_fraction);
        if train_share <= 0.0 {
            return Err(Error::Config("split leaves no training data".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub train: Corpus,
    pub validation: Corpus,
    pub test: Corpus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fold {
    pub train: Corpus,
    pub test: Corpus,
}

fn round_count(n: usize, fraction: f64) -> usize {
    ((n as f64) * fraction).round() as usize
}

/// Document indices grouped by label (sorted label order), each group
/// shuffled with `rng`.
fn shuffled_groups(corpus: &Corpus, rng: &mut rng::Rng) -> Vec<(String, Vec<usize>)> {
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, d) in corpus.documents.iter().enumerate() {
        groups.entry(d.label.as_str()).or_default().push(i);
    }
    groups
        .into_iter()
        .map(|(label, mut idx)| {
            idx.shuffle(rng);
            (label.to_string(), idx)
        })
        .collect()
}

/// Rounds the table `rows[c] * cols[p] / total` to integers so that every
/// cell is the floor or ceiling of its exact value while row and column sums
/// are preserved exactly. Solved as a small max-flow over the fractional cells.
fn controlled_round(rows: &[usize], cols: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = rows.iter().sum();
    debug_assert_eq!(total, cols.iter().sum::<usize>());
    let mut table: Vec<Vec<usize>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| r * c / total.max(1)).collect())
        .collect();
    let fractional: Vec<Vec<bool>> = rows
        .iter()
        .map(|&r| {
            cols.iter()
                .map(|&c| total > 0 && (r * c) % total != 0)
                .collect()
        })
        .collect();
    let mut row_deficit: Vec<usize> = rows
        .iter()
        .zip(&table)
        .map(|(&r, cells)| r - cells.iter().sum::<usize>())
        .collect();
    let mut col_deficit: Vec<usize> = (0..cols.len())
        .map(|p| cols[p] - table.iter().map(|cells| cells[p]).sum::<usize>())
        .collect();
    // used[c][p]: a +1 has been routed through cell (c, p).
    let mut used = vec![vec![false; cols.len()]; rows.len()];

    // Augmenting paths alternate row -> col (unused fractional cell) and
    // col -> row (used cell, cancelling it).
    fn augment(
        row: usize,
        fractional: &[Vec<bool>],
        used: &mut [Vec<bool>],
        col_deficit: &mut [usize],
        seen_cols: &mut [bool],
    ) -> bool {
        for p in 0..col_deficit.len() {
            if !fractional[row][p] || used[row][p] || seen_cols[p] {
                continue;
            }
            seen_cols[p] = true;
            if col_deficit[p] > 0 {
                col_deficit[p] -= 1;
                used[row][p] = true;
                return true;
            }
            for other in 0..used.len() {
                if used[other][p] {
                    used[other][p] = false;
                    if augment(other, fractional, used, col_deficit, seen_cols) {
                        used[row][p] = true;
                        return true;
                    }
                    used[other][p] = true;
                }
            }
        }
        false
    }

    for c in 0..rows.len() {
        while row_deficit[c] > 0 {
            let mut seen = vec![false; cols.len()];
            let ok = augment(c, &fractional, &mut used, &mut col_deficit, &mut seen);
            assert!(ok, "controlled rounding is always feasible");
            row_deficit[c] -= 1;
        }
    }
    for (c, cells) in table.iter_mut().enumerate() {
        for (p, cell) in cells.iter_mut().enumerate() {
            *cell += used[c][p] as usize;
        }
    }
    table
}

/// Seeded train/validation/test partition.
pub fn split(corpus: &Corpus, spec: &SplitSpec) -> Result<Split> {
    spec.validate()?;
    let mut rng = rng::seeded(spec.seed);
    let n = corpus.len();
    let n_test = round_count(n, spec.test_fraction);
    let n_val = round_count(n - n_test, spec.validation_fraction);

    let (mut train, mut val, mut test) = (Vec::new(), Vec::new(), Vec::new());
    if spec.stratified {
        let groups = shuffled_groups(corpus, &mut rng);
        if let Some((label, idx)) = groups.iter().find(|(_, idx)| idx.len() < 3) {
            return Err(Error::Data(format!(
                "class '{label}' has {} documents; stratified splitting needs at least 3",
                idx.len()
            )));
        }
        let sizes: Vec<usize> = groups.iter().map(|(_, idx)| idx.len()).collect();
        let counts = controlled_round(&sizes, &[n_test, n_val, n - n_test - n_val]);
        for (g, (_, idx)) in groups.iter().enumerate() {
            let (t, v) = (counts[g][0], counts[g][1]);
            test.extend_from_slice(&idx[..t]);
            val.extend_from_slice(&idx[t..t + v]);
            train.extend_from_slice(&idx[t + v..]);
        }
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        test.extend_from_slice(&idx[..n_test]);
        val.extend_from_slice(&idx[n_test..n_test + n_val]);
        train.extend_from_slice(&idx[n_test + n_val..]);
    }
    for part in [&mut train, &mut val, &mut test] {
        part.sort_unstable();
    }
    Ok(Split {
        train: corpus.subset(&train),
        validation: corpus.subset(&val),
        test: corpus.subset(&test),
    })
}

/// Test-fold index lists for k-fold cross-validation. Fold sizes differ by
/// at most one; with `stratified` each class is dealt round-robin.
pub fn kfold_indices(
    corpus: &Corpus,
    k: usize,
    seed: u64,
    stratified: bool,
) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::Config(format!("k must be at least 2, got {k}")));
    }
    if k > corpus.len() {
        return Err(Error::Data(format!(
            "k = {k} exceeds corpus size {}",
            corpus.len()
        )));
    }
    let mut rng = rng::seeded(seed);
    let order: Vec<usize> = if stratified {
        let groups = shuffled_groups(corpus, &mut rng);
        if let Some((label, idx)) = groups.iter().find(|(_, idx)| idx.len() < k) {
            return Err(Error::Data(format!(
                "class '{label}' has {} documents, fewer than k = {k}",
                idx.len()
            )));
        }
        groups.into_iter().flat_map(|(_, idx)| idx).collect()
    } else {
        let mut idx: Vec<usize> = (0..corpus.len()).collect();
        idx.shuffle(&mut rng);
        idx
    };
    let mut folds = vec![Vec::new(); k];
    for (pos, i) in order.into_iter().enumerate() {
        folds[pos % k].push(i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

pub fn kfold(corpus: &Corpus, k: usize, seed: u64, stratified: bool) -> Result<Vec<Fold>> {
    let folds = kfold_indices(corpus, k, seed, stratified)?;
    Ok(folds
        .iter()
        .map(|test_idx| {
            let mut in_test = vec![false; corpus.len()];
            for &i in test_idx {
                in_test[i] = true;
            }
            let train_idx: Vec<usize> = (0..corpus.len()).filter(|&i| !in_test[i]).collect();
            Fold {
                train: corpus.subset(&train_idx),
                test: corpus.subset(test_idx),
            }
        })
        .collect())
}
