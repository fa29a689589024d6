//! POS and relation confusion matrices, percentages, translation entropy and
//! preservation over the bundled toy corpus.

use std::path::Path;

use clmd::divergence::{edge_confusion, pos_confusion, ContentPolicy, EdgeOptions};
use clmd::report::{self, Format};
use clmd::{load_corpus, LoadOptions};

fn main() {
    let toy = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let corpus = load_corpus(
        &toy.join("src.conllu"),
        &toy.join("tgt.conllu"),
        &toy.join("align.txt"),
        LoadOptions::default(),
    )
    .expect("toy corpus loads");
    let policy = ContentPolicy::default();

    let pos = pos_confusion(&corpus.pairs, &policy);
    println!(
        "== POS counts\n{}",
        report::render_counts(&pos, Format::Tsv)
    );

    let rows = ["nsubj", "obj", "obl", "nmod", "advmod", "xcomp"];
    let opts = EdgeOptions {
        row_labels: rows.iter().map(|s| s.to_string()).collect(),
        column_labels: rows.iter().map(|s| s.to_string()).collect(),
        ..Default::default()
    };
    let edge = edge_confusion(&corpus.pairs, &policy, &opts);
    println!(
        "== relation counts\n{}",
        report::render_counts(&edge, Format::Tsv)
    );
    println!(
        "== relation percentages\n{}",
        report::render_percent(&edge, Format::Tsv)
    );
    println!(
        "== entropy\n{}",
        report::render_entropy(&edge, false, Format::Tsv)
    );
    println!(
        "== preservation\n{}",
        report::render_preservation(&edge, Format::Tsv)
    );
}
