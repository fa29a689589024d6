use serde::Serialize;

use crate::alignment::{one_to_one, reduce, ReducedAlignment};
use crate::corpus::SentencePair;

use super::path::{dependency_path, PathType};
use super::policy::ContentPolicy;

/// Which alignment links define correspondents.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum CsrScope {
    /// Only one-to-one components.
    #[default]
    OneToOneOnly,
    /// The reduced one-to-one correspondence (shallowest word per group).
    Reduced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CsrOptions {
    pub scope: CsrScope,
    pub with_direction: bool,
    pub strip_subtypes: bool,
}

impl Default for CsrOptions {
    fn default() -> Self {
        CsrOptions {
            scope: CsrScope::OneToOneOnly,
            with_direction: false,
            strip_subtypes: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CsrTarget {
    Path(PathType),
    /// Both source words align to one target token.
    Collapsed,
    /// At least one source word lacks a correspondent. `no_path` marks the
    /// case where both have one but they sit in different target fragments.
    Unaligned {
        no_path: bool,
    },
}

impl CsrTarget {
    pub fn path(&self) -> Option<&PathType> {
        match self {
            CsrTarget::Path(p) => Some(p),
            _ => None,
        }
    }
}

/// A pair of corresponding relations between two source content words and
/// their target correspondents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Csr {
    pub src_path: PathType,
    pub target: CsrTarget,
    /// Source ids, leftmost first.
    pub src_endpoints: (usize, usize),
    pub tgt_endpoints: Option<(usize, usize)>,
}

/// Correspondence used for one sentence pair under a scope.
pub fn correspondence(pair: &SentencePair, scope: CsrScope) -> ReducedAlignment {
    match scope {
        CsrScope::OneToOneOnly => one_to_one(&pair.align),
        CsrScope::Reduced => reduce(&pair.align, &pair.src, &pair.tgt),
    }
}

struct Extractor<'a> {
    pair: &'a SentencePair,
    corr: ReducedAlignment,
    opts: CsrOptions,
}

impl Extractor<'_> {
    fn path_of(&self, tree: &crate::conllu::DepTree, u: usize, v: usize) -> Option<PathType> {
        let p = dependency_path(tree, u, v, self.opts.with_direction).ok()?;
        Some(if self.opts.strip_subtypes {
            p.stripped()
        } else {
            p
        })
    }

    /// `a < b`; `None` when the source words are in different fragments.
    fn csr(&self, a: usize, b: usize) -> Option<Csr> {
        let src_path = self.path_of(&self.pair.src, a, b)?;

        let shared = self
            .pair
            .align
            .targets_of(a)
            .find(|&t| self.pair.align.contains(b, t));
        if let Some(t) = shared {
            return Some(Csr {
                src_path,
                target: CsrTarget::Collapsed,
                src_endpoints: (a, b),
                tgt_endpoints: Some((t, t)),
            });
        }

        let (target, tgt_endpoints) = match (self.corr.target(a), self.corr.target(b)) {
            (Some(ta), Some(tb)) => match self.path_of(&self.pair.tgt, ta, tb) {
                Some(p) => (CsrTarget::Path(p), Some((ta, tb))),
                None => (CsrTarget::Unaligned { no_path: true }, Some((ta, tb))),
            },
            _ => (CsrTarget::Unaligned { no_path: false }, None),
        };

        Some(Csr {
            src_path,
            target,
            src_endpoints: (a, b),
            tgt_endpoints,
        })
    }
}

fn content_ids(pair: &SentencePair, policy: &ContentPolicy) -> Vec<usize> {
    pair.src
        .tokens()
        .iter()
        .filter(|t| policy.is_content(t))
        .map(|t| t.id)
        .collect()
}

/// CSRs for every pair of source content words in a sentence pair, ordered by
/// their source endpoints.
pub fn extract_csr(pair: &SentencePair, policy: &ContentPolicy, opts: CsrOptions) -> Vec<Csr> {
    let ex = Extractor {
        pair,
        corr: correspondence(pair, opts.scope),
        opts,
    };
    let ids = content_ids(pair, policy);

    let mut out = Vec::new();
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            out.extend(ex.csr(a, b));
        }
    }
    out
}

/// Only the CSRs whose source path is a single edge, i.e. head/dependent
/// pairs of content words. Same order as [`extract_csr`].
pub fn extract_edge_csrs(
    pair: &SentencePair,
    policy: &ContentPolicy,
    opts: CsrOptions,
) -> Vec<Csr> {
    let ex = Extractor {
        pair,
        corr: correspondence(pair, opts.scope),
        opts,
    };
    let src = &pair.src;
    let mut edges: Vec<(usize, usize)> = src
        .tokens()
        .iter()
        .filter(|t| t.head != 0 && policy.is_content(t) && policy.is_content(src.token(t.head)))
        .map(|t| (t.id.min(t.head), t.id.max(t.head)))
        .collect();
    edges.sort_unstable();

    edges
        .into_iter()
        .filter_map(|(a, b)| ex.csr(a, b))
        .collect()
}
