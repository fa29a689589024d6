//! Correlating per-relation preservation with external scores, e.g. parser
//! F-scores per label.

use std::collections::BTreeMap;

use clmd::stats::{correlate_preservation, spearman, LabeledScores};

fn main() {
    let preservation: BTreeMap<String, f64> = [
        ("nsubj", 0.81),
        ("obj", 0.72),
        ("amod", 0.66),
        ("advmod", 0.41),
        ("acl", 0.48),
        ("compound", 0.12),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();

    // Labels missing on either side are ignored.
    let scores = LabeledScores::from_tsv(
        "label\tf1\nnsubj\t0.78\nobj\t0.70\namod\t0.74\nadvmod\t0.52\nacl\t0.39\ncompound\t0.20\ncase\t0.90\n",
    )
    .unwrap();

    let c = correlate_preservation(&preservation, &scores).unwrap();
    println!(
        "rho = {:.4} over {} labels: {}",
        c.rho,
        c.n,
        c.labels.join(", ")
    );

    println!(
        "monotone: {}",
        spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap()
    );
    println!(
        "tied:     {:.4}",
        spearman(&[1.0, 2.0, 2.0, 3.0], &[1.0, 3.0, 2.0, 4.0]).unwrap()
    );
}
