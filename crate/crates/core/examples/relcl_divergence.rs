//! The English phrase "The article by Thompson" against its Korean
//! translation, where a nominal modifier becomes a relative clause.

use clmd::alignment::AlignmentGraph;
use clmd::conllu::{build_tree, Sentence, Token};
use clmd::divergence::{extract_csr, ContentPolicy, CsrOptions};
use clmd::SentencePair;

fn main() {
    let en = build_tree(Sentence::from_tokens(
        Some("relcl"),
        vec![
            Token::new(1, "The", "DET", 2, "det"),
            Token::new(2, "article", "NOUN", 0, "root"),
            Token::new(3, "by", "ADP", 4, "case"),
            Token::new(4, "Thompson", "PROPN", 2, "nmod"),
        ],
    ))
    .expect("valid tree");
    let ko = build_tree(Sentence::from_tokens(
        Some("relcl"),
        vec![
            Token::new(1, "Tomseuni", "PROPN", 2, "nsubj"),
            Token::new(2, "gigohan", "VERB", 3, "acl:relcl"),
            Token::new(3, "nonmuneun", "NOUN", 0, "root"),
        ],
    ))
    .expect("valid tree");
    // article <-> nonmuneun, Thompson <-> Tomseuni; gigohan is unaligned.
    let pair = SentencePair::new(0, en, ko, AlignmentGraph::from_links([(2, 3), (4, 1)]));

    for strip in [false, true] {
        let opts = CsrOptions {
            strip_subtypes: strip,
            ..Default::default()
        };
        for csr in extract_csr(&pair, &ContentPolicy::default(), opts) {
            let tgt = csr.target.path().map_or("-".to_string(), |p| p.to_string());
            println!(
                "strip={:<5} source {:?} {:>6}  ->  target {:?} {}",
                strip,
                csr.src_endpoints,
                csr.src_path.to_string(),
                csr.tgt_endpoints,
                tgt
            );
        }
    }
}
