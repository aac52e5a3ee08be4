use rand::Rng as _;

use super::index_labels;
use crate::rng::seeded;
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct Baselines {
    /// Most frequent training label, repeated.
    pub majority: Vec<String>,
    /// Uniform draws over the training label set.
    pub random: Vec<String>,
}

/// Majority-class and random-selection predictions for `test_size` items.
/// Count ties go to the lexicographically smallest label.
pub fn trivial_baselines(
    train_labels: &[String],
    test_size: usize,
    seed: u64,
) -> Result<Baselines> {
    let (classes, y) = index_labels(train_labels, 1)?;
    let mut counts = vec![0usize; classes.len()];
    for c in y {
        counts[c] += 1;
    }
    let top = counts
        .iter()
        .enumerate()
        .fold(0, |best, (i, &c)| if c > counts[best] { i } else { best });
    let mut rng = seeded(seed);
    Ok(Baselines {
        majority: vec![classes[top].clone(); test_size],
        random: (0..test_size)
            .map(|_| classes[rng.gen_range(0..classes.len())].clone())
            .collect(),
    })
}
