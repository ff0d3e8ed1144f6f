use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::schema::{Corpus, Task};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FoldError {
    #[error("k must be at least 2, got {0}")]
    TooFewFolds(usize),
    #[error("{class} class has {count} items, fewer than k = {k}")]
    ClassTooSmall {
        class: &'static str,
        count: usize,
        k: usize,
    },
}

/// Splits item indices into `k` disjoint folds, preserving the class ratio.
///
/// Each class is shuffled with a seeded ChaCha stream and dealt round-robin;
/// the second class continues dealing where the first stopped so fold sizes
/// differ by at most one. Indices inside each fold are sorted.
pub fn stratified_folds_for_labels(
    labels: &[bool],
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, FoldError> {
    if k < 2 {
        return Err(FoldError::TooFewFolds(k));
    }
    let mut positives: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let mut negatives: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    for (class, members) in [("positive", &positives), ("negative", &negatives)] {
        if members.len() < k {
            return Err(FoldError::ClassTooSmall {
                class,
                count: members.len(),
                k,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    positives.shuffle(&mut rng);
    negatives.shuffle(&mut rng);

    let mut folds = vec![Vec::new(); k];
    let mut slot = 0;
    for idx in positives.into_iter().chain(negatives) {
        folds[slot].push(idx);
        slot = (slot + 1) % k;
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Stratified folds over the items of `task` (posts for ES, responses for ER,
/// in [`Corpus::task_items`] order).
pub fn stratified_folds(
    corpus: &Corpus,
    k: usize,
    seed: u64,
    task: Task,
) -> Result<Vec<Vec<usize>>, FoldError> {
    stratified_folds_for_labels(&corpus.task_labels(task), k, seed)
}

/// Stratified holdout split: returns `(train, holdout)` with roughly
/// `holdout_fraction` of each class held out (at least one per class).
pub fn stratified_holdout(
    labels: &[bool],
    holdout_fraction: f64,
    seed: u64,
) -> (Vec<usize>, Vec<usize>) {
    let classes: Vec<usize> = labels.iter().map(|&b| usize::from(!b)).collect();
    stratified_holdout_classes(&classes, holdout_fraction, seed)
}

/// [`stratified_holdout`] over integer class labels; classes are visited in
/// ascending order. Classes with fewer than two members stay in train.
pub fn stratified_holdout_classes(
    labels: &[usize],
    holdout_fraction: f64,
    seed: u64,
) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut holdout = Vec::new();
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    for class in 0..n_classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        let n_hold = if members.len() < 2 {
            0
        } else {
            ((members.len() as f64 * holdout_fraction).round() as usize).clamp(1, members.len() - 1)
        };
        holdout.extend_from_slice(&members[..n_hold]);
        train.extend_from_slice(&members[n_hold..]);
    }
    train.sort_unstable();
    holdout.sort_unstable();
    (train, holdout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn divisible_case_is_exact() {
        let labels: Vec<bool> = (0..100).map(|i| i < 50).collect();
        let folds = stratified_folds_for_labels(&labels, 10, 7).unwrap();
        assert_eq!(folds.len(), 10);
        for f in &folds {
            assert_eq!(f.len(), 10);
            assert_eq!(f.iter().filter(|&&i| labels[i]).count(), 5);
        }
    }

    #[test]
    fn deterministic() {
        let labels: Vec<bool> = (0..37).map(|i| i % 3 == 0).collect();
        assert_eq!(
            stratified_folds_for_labels(&labels, 4, 11).unwrap(),
            stratified_folds_for_labels(&labels, 4, 11).unwrap()
        );
    }

    #[test]
    fn small_class_rejected() {
        let labels: Vec<bool> = (0..50).map(|i| i < 9).collect();
        assert_eq!(
            stratified_folds_for_labels(&labels, 10, 1),
            Err(FoldError::ClassTooSmall {
                class: "positive",
                count: 9,
                k: 10
            })
        );
        assert_eq!(
            stratified_folds_for_labels(&labels, 1, 1),
            Err(FoldError::TooFewFolds(1))
        );
    }

    #[test]
    fn holdout_is_stratified_partition() {
        let labels: Vec<bool> = (0..50).map(|i| i % 2 == 0).collect();
        let (train, hold) = stratified_holdout(&labels, 0.2, 3);
        assert_eq!(train.len() + hold.len(), 50);
        assert_eq!(hold.iter().filter(|&&i| labels[i]).count(), 5);
        assert_eq!(hold.iter().filter(|&&i| !labels[i]).count(), 5);
    }

    proptest! {
        #[test]
        fn folds_partition_and_stay_balanced(
            labels in proptest::collection::vec(any::<bool>(), 20..120),
            k in 2usize..6,
            seed in any::<u64>(),
        ) {
            let pos = labels.iter().filter(|&&l| l).count();
            let neg = labels.len() - pos;
            prop_assume!(pos >= k && neg >= k);
            let folds = stratified_folds_for_labels(&labels, k, seed).unwrap();
            let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
            let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            for f in &folds {
                let p = f.iter().filter(|&&i| labels[i]).count() as f64;
                let expected = pos as f64 / k as f64;
                prop_assert!((p - expected).abs() <= 1.0);
            }
        }
    }
}
