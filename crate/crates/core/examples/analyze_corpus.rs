//! Full analysis bundle written to a directory, as `clmd analyze` does.
//!
//! Usage: cargo run --example analyze_corpus [OUT_DIR]

use std::path::{Path, PathBuf};

use clmd::cli::cmd_analyze;
use clmd::config::RunConfig;

fn main() {
    let toy = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("clmd-toy-report"));

    let config = RunConfig {
        src: Some(toy.join("src.conllu")),
        tgt: Some(toy.join("tgt.conllu")),
        align: Some(toy.join("align.txt")),
        out: Some(out.clone()),
        ..Default::default()
    };
    match cmd_analyze(&config) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            println!(
                "\n{}",
                std::fs::read_to_string(out.join("edge_percent.tsv")).unwrap()
            );
        }
        Err(e) => {
            eprintln!("{:?}", e);
            std::process::exit(e.exit_code());
        }
    }
}
