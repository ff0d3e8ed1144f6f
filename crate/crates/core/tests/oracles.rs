use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use empathy_gate::corpus::{generate_synthetic, SyntheticSpec};
use empathy_gate::lexical::tokenize;

fn token_counts(strength: f64, seed: u64) -> (BTreeMap<String, [f64; 2]>, [f64; 2]) {
    let c = generate_synthetic(&SyntheticSpec {
        n_positive: 400,
        n_negative: 400,
        signal_strength: strength,
        seed,
        with_images: false,
        ..SyntheticSpec::default()
    })
    .unwrap()
    .corpus;
    let mut table: BTreeMap<String, [f64; 2]> = BTreeMap::new();
    let mut totals = [0.0; 2];
    for p in &c.posts {
        let col = usize::from(!p.category.is_positive());
        for t in tokenize(&p.text).texts() {
            table.entry(t.to_string()).or_default()[col] += 1.0;
            totals[col] += 1.0;
        }
    }
    (table, totals)
}

/// Pearson chi-square test of homogeneity on the token × class table.
/// Tokens with an expected count below 5 in either class are pooled.
fn homogeneity_p_value(table: &BTreeMap<String, [f64; 2]>, totals: [f64; 2]) -> f64 {
    let grand = totals[0] + totals[1];
    let mut rows: Vec<[f64; 2]> = Vec::new();
    let mut pooled = [0.0; 2];
    for counts in table.values() {
        let row = counts[0] + counts[1];
        let small = (0..2).any(|j| row * totals[j] / grand < 5.0);
        if small {
            pooled[0] += counts[0];
            pooled[1] += counts[1];
        } else {
            rows.push(*counts);
        }
    }
    if pooled[0] + pooled[1] > 0.0 {
        rows.push(pooled);
    }
    let mut stat = 0.0;
    for r in &rows {
        let row = r[0] + r[1];
        for j in 0..2 {
            let e = row * totals[j] / grand;
            stat += (r[j] - e).powi(2) / e;
        }
    }
    let dof = (rows.len() - 1) as f64;
    1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
}

#[test]
fn zero_strength_token_distributions_are_indistinguishable() {
    let (table, totals) = token_counts(0.0, 42);
    let p = homogeneity_p_value(&table, totals);
    assert!(p > 0.01, "p = {p}");
}

#[test]
fn full_strength_token_distributions_differ() {
    let (table, totals) = token_counts(1.0, 42);
    let p = homogeneity_p_value(&table, totals);
    assert!(p < 1e-6, "p = {p}");
}
