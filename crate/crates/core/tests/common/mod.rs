//! Random trees, corpora and independent reference implementations shared by
//! the integration and acceptance tests.

#![allow(dead_code)]

use std::collections::VecDeque;

use clmd::alignment::AlignmentGraph;
use clmd::conllu::{build_tree, DepTree, Sentence, Token};
use clmd::divergence::Direction;
use clmd::SentencePair;
use rand::seq::SliceRandom;
use rand::Rng;

/// Relations in the default content list, minus `root`.
pub const CONTENT_RELS: [&str; 12] = [
    "nsubj", "obj", "obl", "nmod", "amod", "advmod", "acl", "advcl", "xcomp", "compound", "nummod",
    "flat",
];

pub const FUNCTION_RELS: [&str; 5] = ["det", "case", "aux", "cop", "mark"];

fn upos_for(rel: &str) -> &'static str {
    match rel {
        "det" => "DET",
        "case" => "ADP",
        "aux" | "cop" => "AUX",
        "mark" => "SCONJ",
        "amod" => "ADJ",
        "advmod" => "ADV",
        "nummod" => "NUM",
        "acl" | "advcl" | "xcomp" | "root" => "VERB",
        _ => "NOUN",
    }
}

/// Random single-rooted tree with `n` tokens. Heads are drawn so that the
/// tokens form a tree in a random attachment order; relations are drawn
/// from `rels`, with an occasional subtype.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize, rels: &[&str]) -> DepTree {
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut heads = vec![0usize; n + 1];
    for (k, &id) in order.iter().enumerate().skip(1) {
        heads[id] = order[rng.gen_range(0..k)];
    }
    let tokens = (1..=n)
        .map(|id| {
            if heads[id] == 0 {
                Token::new(id, &format!("w{id}"), "VERB", 0, "root")
            } else {
                let rel = *rels.choose(rng).unwrap();
                let label = if rng.gen_bool(0.1) {
                    format!("{rel}:sub")
                } else {
                    rel.to_string()
                };
                Token::new(id, &format!("w{id}"), upos_for(rel), heads[id], &label)
            }
        })
        .collect();
    build_tree(Sentence::from_tokens(None, tokens)).expect("generated tree is valid")
}

/// Relations mixing content and function labels.
pub fn mixed_rels() -> Vec<&'static str> {
    CONTENT_RELS
        .iter()
        .chain(FUNCTION_RELS.iter())
        .copied()
        .collect()
}

/// Path between two tokens found by breadth-first search over the
/// undirected tree, as (relation, direction) steps from `u` to `v`.
pub fn bfs_path(tree: &DepTree, u: usize, v: usize) -> Vec<(String, Direction)> {
    let n = tree.len();
    let mut adj = vec![Vec::new(); n + 1];
    for t in tree.tokens() {
        if t.head != 0 {
            adj[t.id].push(t.head);
            adj[t.head].push(t.id);
        }
    }
    let mut prev = vec![usize::MAX; n + 1];
    prev[u] = u;
    let mut queue = VecDeque::from([u]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if prev[y] == usize::MAX {
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    let mut nodes = vec![v];
    while *nodes.last().unwrap() != u {
        nodes.push(prev[*nodes.last().unwrap()]);
    }
    nodes.reverse();
    nodes
        .windows(2)
        .map(|w| {
            let (x, y) = (w[0], w[1]);
            if tree.token(x).head == y {
                (tree.token(x).deprel.clone(), Direction::Up)
            } else {
                (tree.token(y).deprel.clone(), Direction::Down)
            }
        })
        .collect()
}

/// Depth by walking heads, independent of the tree's cached depths.
pub fn walk_depth(tree: &DepTree, id: usize) -> usize {
    let mut d = 0;
    let mut cur = id;
    while tree.token(cur).head != 0 {
        cur = tree.token(cur).head;
        d += 1;
    }
    d
}

/// A random sentence pair whose alignment mixes one-to-one links with
/// many-to-one, one-to-many, unaligned and collapsed head/dependent cases.
pub fn random_pair<R: Rng>(rng: &mut R, index: usize) -> SentencePair {
    let rels = mixed_rels();
    let (n, m) = (rng.gen_range(2..=12), rng.gen_range(2..=12));
    let src = random_tree(rng, n, &rels);
    let tgt = random_tree(rng, m, &rels);
    let m = tgt.len();
    let mut align = AlignmentGraph::new();
    for s in 1..=src.len() {
        let roll: f64 = rng.gen();
        if roll < 0.15 {
            continue;
        }
        align.insert(s, rng.gen_range(1..=m));
        if roll > 0.85 {
            align.insert(s, rng.gen_range(1..=m));
        }
    }
    // Collapse a head and its dependent onto one target word.
    if rng.gen_bool(0.5) {
        if let Some(t) = src.tokens().iter().find(|t| t.head != 0) {
            let w = rng.gen_range(1..=m);
            align.insert(t.id, w);
            align.insert(t.head, w);
        }
    }
    SentencePair::new(index, src, tgt, align)
}

pub fn identity_pair(tree: DepTree, index: usize) -> SentencePair {
    let align = AlignmentGraph::from_links((1..=tree.len()).map(|i| (i, i)));
    SentencePair::new(index, tree.clone(), tree, align)
}

/// Average ranks by counting, not by sorting.
pub fn count_ranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let below = xs.iter().filter(|&&y| y < x).count() as f64;
            let equal = xs.iter().filter(|&&y| y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx.sqrt() * vy.sqrt())
}

/// Shannon entropy in bits, straight from the definition.
pub fn plogp_entropy(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.log2()
        })
        .sum()
}
