//! Fleiss' kappa for a fixed number of raters assigning categorical labels.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AgreementError {
    #[error("need at least 2 items, got {0}")]
    TooFewItems(usize),
    #[error("need at least 2 raters, got {0}")]
    TooFewRaters(usize),
    #[error("need at least 2 label categories, got {0}")]
    TooFewCategories(usize),
    #[error("row {row} has {found} ratings, expected {expected}")]
    Ragged {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("row {row} uses label {label} outside 0..{n_categories}")]
    LabelOutOfRange {
        row: usize,
        label: usize,
        n_categories: usize,
    },
    /// Every rating uses one label, so expected agreement is 1.
    #[error("kappa undefined: expected agreement is 1")]
    Undefined,
}

/// Items × raters grid of label indices in `0..n_categories`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMatrix {
    rows: Vec<Vec<usize>>,
    n_categories: usize,
}

impl LabelMatrix {
    pub fn new(rows: Vec<Vec<usize>>, n_categories: usize) -> Result<Self, AgreementError> {
        let raters = rows.first().map_or(0, Vec::len);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != raters {
                return Err(AgreementError::Ragged {
                    row,
                    found: r.len(),
                    expected: raters,
                });
            }
            if let Some(&label) = r.iter().find(|&&l| l >= n_categories) {
                return Err(AgreementError::LabelOutOfRange {
                    row,
                    label,
                    n_categories,
                });
            }
        }
        Ok(LabelMatrix { rows, n_categories })
    }

    /// Builds a matrix from arbitrary labels, numbering categories in sorted
    /// order. `n_categories` is the size of `label_set` when given, otherwise
    /// the number of distinct labels seen.
    pub fn from_labels<T: Ord + Clone>(
        rows: &[Vec<T>],
        label_set: Option<&[T]>,
    ) -> Result<Self, AgreementError> {
        let mut index = BTreeMap::new();
        if let Some(set) = label_set {
            for l in set {
                let next = index.len();
                index.entry(l.clone()).or_insert(next);
            }
        }
        let mut seen: Vec<T> = rows.iter().flatten().cloned().collect();
        seen.sort();
        seen.dedup();
        for l in seen {
            let next = index.len();
            index.entry(l).or_insert(next);
        }
        let n_categories = index.len();
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|l| index[l]).collect())
            .collect();
        LabelMatrix::new(rows, n_categories)
    }

    pub fn n_items(&self) -> usize {
        self.rows.len()
    }

    pub fn n_raters(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn n_categories(&self) -> usize {
        self.n_categories
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }
}

/// Fleiss' kappa: `(P̄ − P̄e) / (1 − P̄e)` where `P̄` is the mean per-item
/// pairwise agreement and `P̄e` the sum of squared category proportions.
pub fn fleiss_kappa(m: &LabelMatrix) -> Result<f64, AgreementError> {
    let n_items = m.n_items();
    let n_raters = m.n_raters();
    if n_items < 2 {
        return Err(AgreementError::TooFewItems(n_items));
    }
    if n_raters < 2 {
        return Err(AgreementError::TooFewRaters(n_raters));
    }
    if m.n_categories < 2 {
        return Err(AgreementError::TooFewCategories(m.n_categories));
    }

    let n = n_raters as f64;
    let mut totals = vec![0usize; m.n_categories];
    let mut p_bar = 0.0;
    let mut counts = vec![0usize; m.n_categories];
    for row in &m.rows {
        counts.iter_mut().for_each(|c| *c = 0);
        for &l in row {
            counts[l] += 1;
        }
        let agreeing: usize = counts.iter().map(|&c| c * c).sum::<usize>() - n_raters;
        p_bar += agreeing as f64 / (n * (n - 1.0));
        for (t, c) in totals.iter_mut().zip(&counts) {
            *t += c;
        }
    }
    p_bar /= n_items as f64;

    let total = (n_items * n_raters) as f64;
    let p_e: f64 = totals
        .iter()
        .map(|&t| {
            let p = t as f64 / total;
            p * p
        })
        .sum();
    if totals.iter().filter(|&&t| t > 0).count() < 2 {
        return Err(AgreementError::Undefined);
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

/// Number of items whose ratings split evenly between two labels (2–2 with
/// four raters). Gold labels for these need an adjudication rule.
pub fn count_ties(m: &LabelMatrix) -> usize {
    m.rows
        .iter()
        .filter(|row| {
            let mut counts = vec![0usize; m.n_categories];
            for &l in row.iter() {
                counts[l] += 1;
            }
            let max = counts.iter().copied().max().unwrap_or(0);
            counts.iter().filter(|&&c| c == max).count() > 1
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent route: count agreeing ordered rater pairs per item by
    /// enumeration, and chance agreement by enumerating label pairs.
    fn kappa_by_enumeration(rows: &[Vec<usize>], q: usize) -> f64 {
        let n = rows[0].len();
        let mut agree = 0.0;
        for row in rows {
            let mut pairs = 0usize;
            for a in 0..n {
                for b in 0..n {
                    if a != b && row[a] == row[b] {
                        pairs += 1;
                    }
                }
            }
            agree += pairs as f64 / (n * (n - 1)) as f64;
        }
        agree /= rows.len() as f64;
        let all: Vec<usize> = rows.iter().flatten().copied().collect();
        let mut chance = 0.0;
        for c in 0..q {
            let share = all.iter().filter(|&&l| l == c).count() as f64 / all.len() as f64;
            chance += share * share;
        }
        (agree - chance) / (1.0 - chance)
    }

    #[test]
    fn perfect_agreement_is_exactly_one() {
        let rows: Vec<Vec<usize>> = (0..10).map(|i| vec![i % 2; 4]).collect();
        let m = LabelMatrix::new(rows, 2).unwrap();
        assert_eq!(fleiss_kappa(&m).unwrap(), 1.0);
    }

    #[test]
    fn two_item_split_matches_hand_value() {
        // P_i = (2² + 2² − 4) / (4·3) = 1/3; P̄e = 0.5² + 0.5² = 1/2;
        // κ = (1/3 − 1/2) / (1/2) = −1/3.
        let rows = vec![vec![0, 0, 1, 1], vec![0, 0, 1, 1]];
        let oracle = kappa_by_enumeration(&rows, 2);
        assert!((oracle - (-1.0 / 3.0)).abs() < 1e-15);
        let k = fleiss_kappa(&LabelMatrix::new(rows, 2).unwrap()).unwrap();
        assert!((k - oracle).abs() < 1e-9, "{k} vs {oracle}");
    }

    #[test]
    fn single_label_everywhere_is_undefined() {
        let m = LabelMatrix::new(vec![vec![0; 4]; 5], 2).unwrap();
        assert_eq!(fleiss_kappa(&m), Err(AgreementError::Undefined));
    }

    #[test]
    fn preconditions() {
        let one_item = LabelMatrix::new(vec![vec![0, 1]], 2).unwrap();
        assert_eq!(fleiss_kappa(&one_item), Err(AgreementError::TooFewItems(1)));
        let one_rater = LabelMatrix::new(vec![vec![0], vec![1]], 2).unwrap();
        assert_eq!(
            fleiss_kappa(&one_rater),
            Err(AgreementError::TooFewRaters(1))
        );
        let one_cat = LabelMatrix::new(vec![vec![0, 0], vec![0, 0]], 1).unwrap();
        assert_eq!(
            fleiss_kappa(&one_cat),
            Err(AgreementError::TooFewCategories(1))
        );
        assert!(matches!(
            LabelMatrix::new(vec![vec![0, 1], vec![0]], 2),
            Err(AgreementError::Ragged { row: 1, .. })
        ));
    }

    #[test]
    fn from_labels_uses_label_set() {
        let rows = vec![vec!["ES", "ES"], vec!["ES", "ES"]];
        let m = LabelMatrix::from_labels(&rows, Some(&["ES", "NES"])).unwrap();
        assert_eq!(m.n_categories(), 2);
        assert_eq!(fleiss_kappa(&m), Err(AgreementError::Undefined));
    }

    #[test]
    fn ties_counted() {
        let m = LabelMatrix::new(vec![vec![0, 0, 1, 1], vec![0, 0, 0, 1]], 2).unwrap();
        assert_eq!(count_ties(&m), 1);
    }

    fn matrix() -> impl Strategy<Value = Vec<Vec<usize>>> {
        (2usize..12, 2usize..6).prop_flat_map(|(items, raters)| {
            proptest::collection::vec(proptest::collection::vec(0usize..3, raters), items)
        })
    }

    proptest! {
        #[test]
        fn matches_enumeration(rows in matrix()) {
            let m = LabelMatrix::new(rows.clone(), 3).unwrap();
            if let Ok(k) = fleiss_kappa(&m) {
                prop_assert!((k - kappa_by_enumeration(&rows, 3)).abs() < 1e-9);
                prop_assert!(k <= 1.0 + 1e-12);
            }
        }

        #[test]
        fn invariant_under_relabel_and_rater_permutation(rows in matrix(), shift in 1usize..3, rot in 0usize..6) {
            let base = fleiss_kappa(&LabelMatrix::new(rows.clone(), 3).unwrap());
            let permuted: Vec<Vec<usize>> = rows
                .iter()
                .map(|r| {
                    let mut r: Vec<usize> = r.iter().map(|&l| (l + shift) % 3).collect();
                    let k = rot % r.len();
                    r.rotate_left(k);
                    r
                })
                .collect();
            let other = fleiss_kappa(&LabelMatrix::new(permuted, 3).unwrap());
            match (base, other) {
                (Ok(a), Ok(b)) => prop_assert!((a - b).abs() < 1e-12),
                (a, b) => prop_assert_eq!(a, b),
            }
        }
    }
}
