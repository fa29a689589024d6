//! Classic divergence classes detected on the toy corpus, which holds one
//! sentence pair per class.

use std::path::Path;

use clmd::divergence::{ContentPolicy, CsrOptions};
use clmd::dorr::{dorr_corpus, DorrOptions};
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

    let report = dorr_corpus(
        &corpus.pairs,
        &ContentPolicy::default(),
        CsrOptions::default(),
        DorrOptions::default(),
    );
    print!("{}", report.to_tsv());
    println!();
    for hit in &report.per_sentence_hits {
        let sid = corpus.pairs[hit.sentence]
            .src
            .sentence()
            .sent_id
            .as_deref()
            .unwrap_or("?");
        println!(
            "{:<13} {:<28} src {:?} tgt {:?}",
            sid,
            hit.kind.row_name(),
            hit.src_ids,
            hit.tgt_ids
        );
    }
}
