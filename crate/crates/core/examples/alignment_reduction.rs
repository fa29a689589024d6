//! Alignment components and their reduction to a one-to-one
//! correspondence by keeping the highest word of each group.

use clmd::alignment::{components, parse_alignment, reduce, AlignmentOptions};
use clmd::conllu::{build_tree, Sentence, Token};

fn main() {
    // 1 John <- 2 gave(root) -> 4 book ; 3 a -> 4
    let src = build_tree(Sentence::from_tokens(
        None,
        vec![
            Token::new(1, "John", "PROPN", 2, "nsubj"),
            Token::new(2, "gave", "VERB", 0, "root"),
            Token::new(3, "a", "DET", 4, "det"),
            Token::new(4, "book", "NOUN", 2, "obj"),
        ],
    ))
    .unwrap();
    let tgt = build_tree(Sentence::from_tokens(
        None,
        vec![
            Token::new(1, "Juan", "PROPN", 2, "nsubj"),
            Token::new(2, "dio", "VERB", 0, "root"),
            Token::new(3, "un", "DET", 4, "det"),
            Token::new(4, "libro", "NOUN", 2, "obj"),
        ],
    ))
    .unwrap();

    // "a" and "book" both map to "libro"; "gave" maps to "dio" and "un".
    let graph = parse_alignment("1-1 2-2 2-3 3-4 4-4\n", AlignmentOptions::default())
        .unwrap()
        .remove(0);
    println!("links: {}", graph.to_line());
    for c in components(&graph) {
        println!(
            "{:>12}: src {:?} tgt {:?}",
            c.kind.name(),
            c.src_ids,
            c.tgt_ids
        );
    }

    let reduced = reduce(&graph, &src, &tgt);
    println!("reduced: {:?}", reduced.pairs().collect::<Vec<_>>());
    for d in &reduced.dropped_components {
        println!("dropped {:?} ({:?})", d.component.src_ids, d.reason);
    }
}
