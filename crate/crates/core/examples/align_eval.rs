//! Scoring a predicted alignment against the gold one, overall and per
//! source relation.

use std::path::Path;

use clmd::cli::{cmd_align_eval, render_align_eval};
use clmd::config::RunConfig;
use clmd::report::Format;

fn main() {
    let toy = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let config = RunConfig {
        src: Some(toy.join("src.conllu")),
        align: Some(toy.join("align.txt")),
        pred: Some(toy.join("pred.txt")),
        ..Default::default()
    };
    for all_links in [false, true] {
        let scores = cmd_align_eval(&config, all_links).expect("toy files score");
        println!(
            "== {} links",
            if all_links { "all" } else { "content-word" }
        );
        print!("{}", render_align_eval(&scores, Format::Tsv));
        println!();
    }
}
