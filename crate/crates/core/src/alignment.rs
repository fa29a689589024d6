//! Word alignments between a source and a target sentence.
//!
//! Alignments are read from Pharaoh-style lines (`2-1 5-7`), split into
//! connected components, and reduced to a one-to-one correspondence by
//! keeping the shallowest word of every many-to-one or one-to-many group.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::conllu::{strip_subtype, DepTree};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlignmentError {
    #[error("alignment line {line}: malformed link '{token}'")]
    Malformed { line: usize, token: String },
    #[error("alignment line {line}: index 0 in a 1-based file ('{token}')")]
    ZeroIndex { line: usize, token: String },
    #[error("gold has {gold} sentence pairs but prediction has {pred}")]
    LengthMismatch { gold: usize, pred: usize },
    #[error("{trees} source trees given for {pairs} sentence pairs")]
    TreeCountMismatch { trees: usize, pairs: usize },
    #[error("label restriction requires source trees")]
    RestrictionWithoutTrees,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum IndexBase {
    Zero,
    #[default]
    One,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AlignmentOptions {
    pub index_base: IndexBase,
}

/// Links between 1-based source and target token ids of one sentence pair.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AlignmentGraph {
    links: BTreeSet<(usize, usize)>,
}

impl AlignmentGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_links<I: IntoIterator<Item = (usize, usize)>>(links: I) -> Self {
        AlignmentGraph {
            links: links.into_iter().collect(),
        }
    }

    /// Returns false if the link was already present.
    pub fn insert(&mut self, src: usize, tgt: usize) -> bool {
        self.links.insert((src, tgt))
    }

    pub fn links(&self) -> &BTreeSet<(usize, usize)> {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn contains(&self, src: usize, tgt: usize) -> bool {
        self.links.contains(&(src, tgt))
    }

    /// Target ids linked to `src`.
    pub fn targets_of(&self, src: usize) -> impl Iterator<Item = usize> + '_ {
        self.links
            .range((src, 0)..=(src, usize::MAX))
            .map(|&(_, t)| t)
    }

    /// Whether `a` and `b` share at least one target token.
    pub fn share_target(&self, a: usize, b: usize) -> bool {
        self.targets_of(a).any(|t| self.contains(b, t))
    }

    /// Links whose ids fall outside the given sentence lengths.
    pub fn out_of_range(&self, src_len: usize, tgt_len: usize) -> Vec<(usize, usize)> {
        self.links
            .iter()
            .copied()
            .filter(|&(s, t)| s == 0 || t == 0 || s > src_len || t > tgt_len)
            .collect()
    }

    /// Pharaoh line with 1-based ids.
    pub fn to_line(&self) -> String {
        self.links
            .iter()
            .map(|(s, t)| format!("{}-{}", s, t))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Parses one alignment per non-comment line.
pub fn parse_alignment(
    text: &str,
    opts: AlignmentOptions,
) -> Result<Vec<AlignmentGraph>, AlignmentError> {
    Ok(parse_alignment_numbered(text, opts)?
        .into_iter()
        .map(|(_, g)| g)
        .collect())
}

/// Like [`parse_alignment`], keeping the 1-based line number of each graph.
pub fn parse_alignment_numbered(
    text: &str,
    opts: AlignmentOptions,
) -> Result<Vec<(usize, AlignmentGraph)>, AlignmentError> {
    let mut graphs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim_start().starts_with('#') {
            continue;
        }

        let mut graph = AlignmentGraph::new();
        for token in raw.split_whitespace() {
            let malformed = || AlignmentError::Malformed {
                line,
                token: token.to_owned(),
            };
            let (s, t) = token.split_once('-').ok_or_else(malformed)?;
            let s: usize = s.parse().map_err(|_| malformed())?;
            let t: usize = t.parse().map_err(|_| malformed())?;
            let (s, t) = match opts.index_base {
                IndexBase::Zero => (s + 1, t + 1),
                IndexBase::One => {
                    if s == 0 || t == 0 {
                        return Err(AlignmentError::ZeroIndex {
                            line,
                            token: token.to_owned(),
                        });
                    }
                    (s, t)
                }
            };
            graph.insert(s, t);
        }
        graphs.push((line, graph));
    }
    Ok(graphs)
}

/// Serializes alignments, one 1-based Pharaoh line per graph.
pub fn write_alignment(graphs: &[AlignmentGraph]) -> String {
    let mut out = String::new();
    for g in graphs {
        out.push_str(&g.to_line());
        out.push('\n');
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ComponentKind {
    OneToOne,
    ManyToOne,
    OneToMany,
    ManyToMany,
}

impl ComponentKind {
    pub fn classify(src: usize, tgt: usize) -> Self {
        match (src, tgt) {
            (1, 1) => ComponentKind::OneToOne,
            (_, 1) => ComponentKind::ManyToOne,
            (1, _) => ComponentKind::OneToMany,
            _ => ComponentKind::ManyToMany,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ComponentKind::OneToOne => "one-to-one",
            ComponentKind::ManyToOne => "many-to-one",
            ComponentKind::OneToMany => "one-to-many",
            ComponentKind::ManyToMany => "many-to-many",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlignmentComponent {
    pub src_ids: BTreeSet<usize>,
    pub tgt_ids: BTreeSet<usize>,
    pub kind: ComponentKind,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Connected components of the bipartite link graph, ordered by their
/// smallest source id.
pub fn components(a: &AlignmentGraph) -> Vec<AlignmentComponent> {
    let src: BTreeSet<usize> = a.links.iter().map(|&(s, _)| s).collect();
    let tgt: BTreeSet<usize> = a.links.iter().map(|&(_, t)| t).collect();
    let src_idx: BTreeMap<usize, usize> = src.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let tgt_idx: BTreeMap<usize, usize> = tgt
        .iter()
        .enumerate()
        .map(|(i, &t)| (t, i + src.len()))
        .collect();

    let mut uf = UnionFind::new(src.len() + tgt.len());
    for (s, t) in &a.links {
        uf.union(src_idx[s], tgt_idx[t]);
    }

    let mut groups: BTreeMap<usize, (BTreeSet<usize>, BTreeSet<usize>)> = BTreeMap::new();
    for (&s, &i) in &src_idx {
        groups.entry(uf.find(i)).or_default().0.insert(s);
    }
    for (&t, &i) in &tgt_idx {
        groups.entry(uf.find(i)).or_default().1.insert(t);
    }

    // Union by minimum index keeps every source-containing root at a source
    // slot, and source slots are ordered by id.
    groups
        .into_values()
        .map(|(src_ids, tgt_ids)| AlignmentComponent {
            kind: ComponentKind::classify(src_ids.len(), tgt_ids.len()),
            src_ids,
            tgt_ids,
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum DropReason {
    ManyToMany,
    DepthTie,
    /// A linked id does not exist in its tree.
    InvalidId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DroppedComponent {
    pub component: AlignmentComponent,
    pub reason: DropReason,
}

/// A one-to-one correspondence between source and target ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReducedAlignment {
    src_to_tgt: BTreeMap<usize, usize>,
    tgt_to_src: BTreeMap<usize, usize>,
    pub dropped_components: Vec<DroppedComponent>,
}

impl ReducedAlignment {
    fn insert(&mut self, src: usize, tgt: usize) {
        debug_assert!(!self.src_to_tgt.contains_key(&src));
        debug_assert!(!self.tgt_to_src.contains_key(&tgt));
        self.src_to_tgt.insert(src, tgt);
        self.tgt_to_src.insert(tgt, src);
    }

    /// Pairs in source id order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.src_to_tgt.iter().map(|(&s, &t)| (s, t))
    }

    pub fn len(&self) -> usize {
        self.src_to_tgt.len()
    }

    pub fn is_empty(&self) -> bool {
        self.src_to_tgt.is_empty()
    }

    pub fn target(&self, src: usize) -> Option<usize> {
        self.src_to_tgt.get(&src).copied()
    }

    pub fn source(&self, tgt: usize) -> Option<usize> {
        self.tgt_to_src.get(&tgt).copied()
    }
}

/// Keeps only one-to-one components, without consulting the trees.
pub fn one_to_one(a: &AlignmentGraph) -> ReducedAlignment {
    let mut reduced = ReducedAlignment::default();
    for c in components(a) {
        if c.kind == ComponentKind::OneToOne {
            let s = *c.src_ids.first().unwrap();
            let t = *c.tgt_ids.first().unwrap();
            reduced.insert(s, t);
        }
    }
    reduced
}

/// The id with strictly minimal depth, or `None` on a tie.
fn shallowest(ids: &BTreeSet<usize>, tree: &DepTree) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    let mut tied = false;
    for &id in ids {
        let d = tree.depth(id);
        match best {
            Some((bd, _)) if d > bd => {}
            Some((bd, _)) if d == bd => tied = true,
            _ => {
                best = Some((d, id));
                tied = false;
            }
        }
    }
    if tied {
        None
    } else {
        best.map(|(_, id)| id)
    }
}

/// Reduces an alignment to a one-to-one correspondence.
///
/// Many-to-one groups keep the source word closest to its tree root, and
/// one-to-many groups the closest target word. Ties and many-to-many
/// components are dropped and reported.
pub fn reduce(a: &AlignmentGraph, src: &DepTree, tgt: &DepTree) -> ReducedAlignment {
    let mut reduced = ReducedAlignment::default();
    for c in components(a) {
        if !c.src_ids.iter().all(|&s| src.contains(s))
            || !c.tgt_ids.iter().all(|&t| tgt.contains(t))
        {
            reduced.dropped_components.push(DroppedComponent {
                component: c,
                reason: DropReason::InvalidId,
            });
            continue;
        }

        let pair = match c.kind {
            ComponentKind::OneToOne => {
                Some((*c.src_ids.first().unwrap(), *c.tgt_ids.first().unwrap()))
            }
            ComponentKind::ManyToOne => {
                shallowest(&c.src_ids, src).map(|s| (s, *c.tgt_ids.first().unwrap()))
            }
            ComponentKind::OneToMany => {
                shallowest(&c.tgt_ids, tgt).map(|t| (*c.src_ids.first().unwrap(), t))
            }
            ComponentKind::ManyToMany => {
                reduced.dropped_components.push(DroppedComponent {
                    component: c,
                    reason: DropReason::ManyToMany,
                });
                continue;
            }
        };

        match pair {
            Some((s, t)) => reduced.insert(s, t),
            None => reduced.dropped_components.push(DroppedComponent {
                component: c,
                reason: DropReason::DepthTie,
            }),
        }
    }
    reduced
}

/// Precision and recall of predicted links against gold links.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlignmentScores {
    pub gold_links: usize,
    pub pred_links: usize,
    pub correct: usize,
    /// `None` when nothing was predicted.
    pub precision: Option<f64>,
    /// `None` when the gold standard is empty.
    pub recall: Option<f64>,
    /// Recall per source deprel; only filled when source trees are given.
    pub per_label_recall: BTreeMap<String, f64>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PrOptions<'a> {
    /// Source trees, index-aligned with the alignments.
    pub src_trees: Option<&'a [DepTree]>,
    /// Only links whose source token carries one of these labels count.
    pub restrict: Option<&'a BTreeSet<String>>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Link-level precision and recall, optionally restricted to source words
/// with given (subtype-stripped) relations.
pub fn alignment_pr(
    gold: &[AlignmentGraph],
    pred: &[AlignmentGraph],
    opts: PrOptions<'_>,
) -> Result<AlignmentScores, AlignmentError> {
    if gold.len() != pred.len() {
        return Err(AlignmentError::LengthMismatch {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    if let Some(trees) = opts.src_trees {
        if trees.len() != gold.len() {
            return Err(AlignmentError::TreeCountMismatch {
                trees: trees.len(),
                pairs: gold.len(),
            });
        }
    } else if opts.restrict.is_some() {
        return Err(AlignmentError::RestrictionWithoutTrees);
    }

    let label_of = |i: usize, src: usize| -> Option<&str> {
        let tree = &opts.src_trees?[i];
        tree.contains(src)
            .then(|| strip_subtype(&tree.token(src).deprel))
    };
    let keep = |i: usize, src: usize| -> bool {
        match opts.restrict {
            None => true,
            Some(labels) => label_of(i, src).is_some_and(|l| labels.contains(l)),
        }
    };

    let (mut n_gold, mut n_pred, mut correct) = (0, 0, 0);
    let mut per_label: BTreeMap<String, (usize, usize)> = BTreeMap::new();

    for (i, (g, p)) in gold.iter().zip(pred).enumerate() {
        for &(s, t) in g.links() {
            if !keep(i, s) {
                continue;
            }
            n_gold += 1;
            let hit = p.contains(s, t);
            if hit {
                correct += 1;
            }
            if let Some(label) = label_of(i, s) {
                let entry = per_label.entry(label.to_owned()).or_default();
                entry.0 += usize::from(hit);
                entry.1 += 1;
            }
        }
        n_pred += p.links().iter().filter(|&&(s, _)| keep(i, s)).count();
    }

    Ok(AlignmentScores {
        gold_links: n_gold,
        pred_links: n_pred,
        correct,
        precision: ratio(correct, n_pred),
        recall: ratio(correct, n_gold),
        per_label_recall: per_label
            .into_iter()
            .map(|(l, (hit, total))| (l, hit as f64 / total as f64))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::{build_tree, Sentence, Token};

    fn one(text: &str) -> AlignmentGraph {
        parse_alignment(text, AlignmentOptions::default())
            .unwrap()
            .remove(0)
    }

    #[test]
    fn parses_pharaoh_lines() {
        let g = one("2-1 5-7");
        assert_eq!(
            g.links().iter().copied().collect::<Vec<_>>(),
            [(2, 1), (5, 7)]
        );
        assert!(one("\n").is_empty());

        let zero = AlignmentOptions {
            index_base: IndexBase::Zero,
        };
        let g = parse_alignment("0-3", zero).unwrap().remove(0);
        assert!(g.contains(1, 4));

        let dup = one("1-1 1-1  2-2");
        assert_eq!(dup.len(), 2);
    }

    #[test]
    fn comments_and_blank_lines() {
        let graphs =
            parse_alignment("# header\n1-1\n\n2-2 3-3\n", AlignmentOptions::default()).unwrap();
        assert_eq!(graphs.len(), 3);
        assert!(graphs[1].is_empty());
        assert_eq!(write_alignment(&graphs), "1-1\n\n2-2 3-3\n");
    }

    #[test]
    fn parse_errors_carry_line() {
        let opts = AlignmentOptions::default();
        assert_eq!(
            parse_alignment("1-1\n1-x", opts).unwrap_err(),
            AlignmentError::Malformed {
                line: 2,
                token: "1-x".into()
            }
        );
        assert_eq!(
            parse_alignment("0-3", opts).unwrap_err(),
            AlignmentError::ZeroIndex {
                line: 1,
                token: "0-3".into()
            }
        );
        assert!(parse_alignment("13", opts).is_err());
    }

    #[test]
    fn component_kinds() {
        let c = components(&AlignmentGraph::from_links([(1, 1), (2, 1)]));
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].kind, ComponentKind::ManyToOne);
        assert_eq!(c[0].src_ids, BTreeSet::from([1, 2]));

        let c = components(&AlignmentGraph::from_links([(1, 1), (2, 2)]));
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|c| c.kind == ComponentKind::OneToOne));

        let c = components(&AlignmentGraph::from_links([(1, 1), (1, 2), (2, 2)]));
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].kind, ComponentKind::ManyToMany);

        let c = components(&AlignmentGraph::from_links([(4, 1), (4, 3)]));
        assert_eq!(c[0].kind, ComponentKind::OneToMany);
    }

    // 1 <- 2 <- 3 (root), 4 and 5 attached to 3, 6 attached to 4.
    fn tree() -> DepTree {
        let toks = vec![
            Token::new(1, "a", "NOUN", 2, "nmod"),
            Token::new(2, "b", "NOUN", 3, "obj"),
            Token::new(3, "c", "VERB", 0, "root"),
            Token::new(4, "d", "NOUN", 3, "obl"),
            Token::new(5, "e", "NOUN", 3, "nsubj"),
            Token::new(6, "f", "NOUN", 4, "nmod"),
        ];
        build_tree(Sentence::from_tokens(None, toks)).unwrap()
    }

    #[test]
    fn reduce_keeps_shallowest() {
        let (s, t) = (tree(), tree());
        // depth(4) = 1, depth(6) = 2
        let r = reduce(&AlignmentGraph::from_links([(4, 5), (6, 5)]), &s, &t);
        assert_eq!(r.pairs().collect::<Vec<_>>(), [(4, 5)]);
        assert!(r.dropped_components.is_empty());

        // depth(4) = depth(5) = 1
        let r = reduce(&AlignmentGraph::from_links([(4, 6), (5, 6)]), &s, &t);
        assert!(r.is_empty());
        assert_eq!(r.dropped_components[0].reason, DropReason::DepthTie);

        let r = reduce(&AlignmentGraph::from_links([(5, 1), (5, 2)]), &s, &t);
        assert_eq!(r.pairs().collect::<Vec<_>>(), [(5, 2)]);

        let links = [(1, 2), (2, 1), (3, 3)];
        let r = reduce(&AlignmentGraph::from_links(links), &s, &t);
        assert_eq!(r.pairs().collect::<Vec<_>>(), links);
        assert_eq!(r.source(1), Some(2));

        let r = reduce(
            &AlignmentGraph::from_links([(1, 1), (1, 2), (2, 2)]),
            &s,
            &t,
        );
        assert!(r.is_empty());
        assert_eq!(r.dropped_components[0].reason, DropReason::ManyToMany);

        let r = reduce(&AlignmentGraph::from_links([(9, 1)]), &s, &t);
        assert_eq!(r.dropped_components[0].reason, DropReason::InvalidId);
    }

    #[test]
    fn one_to_one_scope() {
        let g = AlignmentGraph::from_links([(1, 1), (2, 2), (3, 2), (4, 4)]);
        let r = one_to_one(&g);
        assert_eq!(r.pairs().collect::<Vec<_>>(), [(1, 1), (4, 4)]);
    }

    #[test]
    fn precision_recall() {
        let gold = vec![AlignmentGraph::from_links([(1, 1), (2, 2), (3, 3), (4, 4)])];
        let s = alignment_pr(&gold, &gold, PrOptions::default()).unwrap();
        assert_eq!((s.precision, s.recall), (Some(1.0), Some(1.0)));

        let half = vec![AlignmentGraph::from_links([(1, 1), (2, 2)])];
        let s = alignment_pr(&gold, &half, PrOptions::default()).unwrap();
        assert_eq!((s.precision, s.recall), (Some(1.0), Some(0.5)));

        let none = vec![AlignmentGraph::new()];
        let s = alignment_pr(&gold, &none, PrOptions::default()).unwrap();
        assert_eq!((s.precision, s.recall), (None, Some(0.0)));

        assert!(matches!(
            alignment_pr(&gold, &[], PrOptions::default()),
            Err(AlignmentError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn restricted_precision_recall() {
        let trees = vec![tree()];
        let gold = vec![AlignmentGraph::from_links([(1, 1), (2, 2), (5, 5)])];
        let pred = vec![AlignmentGraph::from_links([(1, 1), (5, 4), (3, 3)])];
        let labels: BTreeSet<String> = ["nmod", "nsubj"].iter().map(|s| s.to_string()).collect();
        let s = alignment_pr(
            &gold,
            &pred,
            PrOptions {
                src_trees: Some(&trees),
                restrict: Some(&labels),
            },
        )
        .unwrap();
        // gold: (1,1) nmod, (5,5) nsubj; pred: (1,1) nmod, (5,4) nsubj
        assert_eq!((s.gold_links, s.pred_links, s.correct), (2, 2, 1));
        assert_eq!(s.per_label_recall["nmod"], 1.0);
        assert_eq!(s.per_label_recall["nsubj"], 0.0);
        assert!(!s.per_label_recall.contains_key("obj"));

        assert_eq!(
            alignment_pr(
                &gold,
                &pred,
                PrOptions {
                    src_trees: None,
                    restrict: Some(&labels)
                }
            )
            .unwrap_err(),
            AlignmentError::RestrictionWithoutTrees
        );
    }
}
