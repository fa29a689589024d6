//! Sentence-aligned parallel corpora: pairing source and target treebanks
//! with an alignment file and collecting data problems along the way.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::alignment::{
    components, parse_alignment_numbered, reduce, AlignmentError, AlignmentGraph, AlignmentOptions,
    ComponentKind, DropReason, IndexBase,
};
use crate::conllu::{
    build_tree_indexed, parse_conllu, ConlluError, DepTree, ParseOptions, Sentence,
};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Conllu { path: PathBuf, source: ConlluError },
    #[error("{path}: {source}")]
    Alignment {
        path: PathBuf,
        source: AlignmentError,
    },
}

/// One source sentence, its translation, and their word alignment.
#[derive(Clone, Debug)]
pub struct SentencePair {
    /// Position in the corpus (0-based).
    pub index: usize,
    pub src: DepTree,
    pub tgt: DepTree,
    pub align: AlignmentGraph,
}

impl SentencePair {
    pub fn new(index: usize, src: DepTree, tgt: DepTree, align: AlignmentGraph) -> Self {
        SentencePair {
            index,
            src,
            tgt,
            align,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum PairBy {
    #[default]
    Position,
    SentId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Severity {
    Warning,
    Fatal,
}

/// A data problem found while pairing. `pair` is 0-based, `line` is the
/// alignment file line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub severity: Severity,
    pub pair: Option<usize>,
    pub line: Option<usize>,
    pub message: String,
}

impl Issue {
    fn fatal(pair: Option<usize>, line: Option<usize>, message: String) -> Self {
        Issue {
            severity: Severity::Fatal,
            pair,
            line,
            message,
        }
    }

    fn warning(pair: usize, line: Option<usize>, message: String) -> Self {
        Issue {
            severity: Severity::Warning,
            pair: Some(pair),
            line,
            message,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LoadOptions {
    pub pair_by: PairBy,
    pub index_base: IndexBase,
    pub strip_subtypes: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            pair_by: PairBy::Position,
            index_base: IndexBase::One,
            strip_subtypes: true,
        }
    }
}

/// Pairs that could be analysed, plus everything wrong with the input.
#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub pairs: Vec<SentencePair>,
    pub issues: Vec<Issue>,
}

impl Corpus {
    pub fn fatal_count(&self) -> usize {
        self.issues
            .iter()
            .filter(|i| i.severity == Severity::Fatal)
            .count()
    }

    pub fn has_fatal(&self) -> bool {
        self.fatal_count() > 0
    }
}

/// Joins parsed treebanks and alignments into sentence pairs.
///
/// Alignment line `k` always belongs to source sentence `k`. Targets are
/// matched by position or by `sent_id`.
pub fn pair_up(
    src: Vec<Sentence>,
    tgt: Vec<Sentence>,
    aligns: Vec<(usize, AlignmentGraph)>,
    pair_by: PairBy,
) -> Corpus {
    let mut issues = Vec::new();

    if aligns.len() != src.len() {
        issues.push(Issue::fatal(
            None,
            None,
            format!(
                "alignment has {} lines but the source has {} sentences",
                aligns.len(),
                src.len()
            ),
        ));
    }

    let mut tgt: Vec<Option<Sentence>> = tgt.into_iter().map(Some).collect();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    match pair_by {
        PairBy::Position => {
            if tgt.len() != src.len() {
                issues.push(Issue::fatal(
                    None,
                    None,
                    format!(
                        "source has {} sentences but the target has {}",
                        src.len(),
                        tgt.len()
                    ),
                ));
            }
        }
        PairBy::SentId => {
            for (i, s) in tgt.iter().enumerate() {
                if let Some(id) = s.as_ref().and_then(|s| s.sent_id.clone()) {
                    by_id.entry(id).or_insert(i);
                }
            }
        }
    }

    let mut pairs = Vec::new();
    for (index, (src_sentence, (line, align))) in src.into_iter().zip(aligns).enumerate() {
        let tgt_slot = match pair_by {
            PairBy::Position => tgt.get_mut(index).and_then(Option::take),
            PairBy::SentId => {
                let Some(id) = src_sentence.sent_id.clone() else {
                    issues.push(Issue::fatal(
                        Some(index),
                        Some(line),
                        "source sentence has no sent_id".into(),
                    ));
                    continue;
                };
                match by_id.get(&id) {
                    Some(&i) => tgt[i].take(),
                    None => {
                        issues.push(Issue::fatal(
                            Some(index),
                            Some(line),
                            format!("no target sentence with sent_id {}", id),
                        ));
                        continue;
                    }
                }
            }
        };
        let Some(tgt_sentence) = tgt_slot else {
            continue;
        };

        let bad = align.out_of_range(src_sentence.len(), tgt_sentence.len());
        if !bad.is_empty() {
            let links: Vec<String> = bad.iter().map(|(s, t)| format!("{}-{}", s, t)).collect();
            issues.push(Issue::fatal(
                Some(index),
                Some(line),
                format!(
                    "links {} out of range for {} source and {} target tokens",
                    links.join(" "),
                    src_sentence.len(),
                    tgt_sentence.len()
                ),
            ));
            continue;
        }

        let trees = build_tree_indexed(src_sentence, index)
            .and_then(|s| build_tree_indexed(tgt_sentence, index).map(|t| (s, t)));
        let (src_tree, tgt_tree) = match trees {
            Ok(t) => t,
            Err(e) => {
                issues.push(Issue::fatal(Some(index), Some(line), e.to_string()));
                continue;
            }
        };

        for c in components(&align) {
            if c.kind == ComponentKind::ManyToMany {
                issues.push(Issue::warning(
                    index,
                    Some(line),
                    format!("many-to-many component {:?} x {:?}", c.src_ids, c.tgt_ids),
                ));
            }
        }
        for d in reduce(&align, &src_tree, &tgt_tree).dropped_components {
            if d.reason == DropReason::DepthTie {
                issues.push(Issue::warning(
                    index,
                    Some(line),
                    format!(
                        "{} component {:?} x {:?} dropped: no unique highest word",
                        d.component.kind.name(),
                        d.component.src_ids,
                        d.component.tgt_ids
                    ),
                ));
            }
        }

        pairs.push(SentencePair::new(index, src_tree, tgt_tree, align));
    }

    Corpus { pairs, issues }
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn read_treebank(path: &Path, strip_subtypes: bool) -> Result<Vec<Sentence>, LoadError> {
    let opts = ParseOptions {
        strip_subtypes,
        check_trees: false,
    };
    parse_conllu(&read(path)?, opts).map_err(|source| LoadError::Conllu {
        path: path.to_owned(),
        source,
    })
}

pub fn read_alignment(
    path: &Path,
    index_base: IndexBase,
) -> Result<Vec<(usize, AlignmentGraph)>, LoadError> {
    parse_alignment_numbered(&read(path)?, AlignmentOptions { index_base }).map_err(|source| {
        LoadError::Alignment {
            path: path.to_owned(),
            source,
        }
    })
}

/// Reads and pairs the three input files.
pub fn load_corpus(
    src: &Path,
    tgt: &Path,
    align: &Path,
    opts: LoadOptions,
) -> Result<Corpus, LoadError> {
    let src = read_treebank(src, opts.strip_subtypes)?;
    let tgt = read_treebank(tgt, opts.strip_subtypes)?;
    let align = read_alignment(align, opts.index_base)?;
    Ok(pair_up(src, tgt, align, opts.pair_by))
}
