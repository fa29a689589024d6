use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::alignment::reduce;
use crate::corpus::SentencePair;

use super::csr::{extract_edge_csrs, CsrOptions, CsrScope, CsrTarget};
use super::policy::ContentPolicy;

/// Rows of the relation matrix reported by default.
pub const DEFAULT_ROWS: [&str; 17] = [
    "acl",
    "advcl",
    "advmod",
    "amod",
    "appos",
    "ccomp",
    "compound",
    "conj",
    "fixed",
    "flat",
    "nmod",
    "nsubj",
    "nummod",
    "obj",
    "obl",
    "parataxis",
    "xcomp",
];

/// POS label for words without a correspondent.
pub const NONE_LABEL: &str = "None";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("unknown row '{0}'")]
    UnknownRow(String),
    #[error("row '{0}' has no observations")]
    EmptyRow(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MatrixKind {
    /// Part-of-speech mappings; labels are the observed tags, sorted.
    Pos,
    /// Relation mappings over configured row and column labels.
    Edge,
}

/// Outcomes for one source label.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RowCounts {
    pub cells: BTreeMap<String, u64>,
    pub collapsed: u64,
    /// Not part of the row total.
    pub unaligned: u64,
    /// Target paths outside the column set, keyed by rendered path.
    pub other: BTreeMap<String, u64>,
}

impl RowCounts {
    pub fn cell(&self, col: &str) -> u64 {
        self.cells.get(col).copied().unwrap_or(0)
    }

    pub fn other_total(&self) -> u64 {
        self.other.values().sum()
    }

    /// Cells, collapsed and other; unaligned observations are excluded.
    pub fn total(&self) -> u64 {
        self.cells.values().sum::<u64>() + self.collapsed + self.other_total()
    }

    /// Most common other path; ties go to the lexicographically smallest.
    pub fn mcop(&self) -> Option<(&str, u64)> {
        self.other
            .iter()
            .fold(None, |best: Option<(&str, u64)>, (path, &n)| match best {
                Some((_, m)) if m >= n => best,
                _ => Some((path.as_str(), n)),
            })
    }

    /// Counts of every distinct outcome: each cell label, collapsed, and each
    /// other path.
    pub fn outcomes(&self, include_unaligned: bool) -> Vec<u64> {
        let mut v: Vec<u64> = self.cells.values().copied().collect();
        v.push(self.collapsed);
        v.extend(self.other.values().copied());
        if include_unaligned {
            v.push(self.unaligned);
        }
        v.retain(|&n| n > 0);
        v
    }

    fn merge(&mut self, other: &RowCounts) {
        for (k, v) in &other.cells {
            *self.cells.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.other {
            *self.other.entry(k.clone()).or_default() += v;
        }
        self.collapsed += other.collapsed;
        self.unaligned += other.unaligned;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    kind: MatrixKind,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    rows: BTreeMap<String, RowCounts>,
}

fn insert_sorted(labels: &mut Vec<String>, label: &str) {
    if let Err(pos) = labels.binary_search_by(|l| l.as_str().cmp(label)) {
        labels.insert(pos, label.to_owned());
    }
}

impl ConfusionMatrix {
    pub fn pos() -> Self {
        ConfusionMatrix {
            kind: MatrixKind::Pos,
            row_labels: Vec::new(),
            col_labels: Vec::new(),
            rows: BTreeMap::new(),
        }
    }

    pub fn edge<R: AsRef<str>, C: AsRef<str>>(rows: &[R], cols: &[C]) -> Self {
        let mut row_labels: Vec<String> = Vec::new();
        for r in rows {
            if !row_labels.iter().any(|l| l == r.as_ref()) {
                row_labels.push(r.as_ref().to_owned());
            }
        }
        let mut col_labels: Vec<String> = Vec::new();
        for c in cols {
            if !col_labels.iter().any(|l| l == c.as_ref()) {
                col_labels.push(c.as_ref().to_owned());
            }
        }
        ConfusionMatrix {
            kind: MatrixKind::Edge,
            row_labels,
            col_labels,
            rows: BTreeMap::new(),
        }
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn has_row(&self, label: &str) -> bool {
        self.row_labels.iter().any(|l| l == label)
    }

    pub fn has_col(&self, label: &str) -> bool {
        self.col_labels.iter().any(|l| l == label)
    }

    /// Counts for a row; rows without observations read as empty.
    pub fn row(&self, label: &str) -> Option<RowCounts> {
        self.has_row(label)
            .then(|| self.rows.get(label).cloned().unwrap_or_default())
    }

    pub fn row_ref(&self, label: &str) -> Option<&RowCounts> {
        self.rows.get(label)
    }

    pub fn count(&self, row: &str, col: &str) -> u64 {
        self.rows.get(row).map_or(0, |r| r.cell(col))
    }

    /// Row slot for an observation, or `None` if the row is not tracked.
    fn slot(&mut self, row: &str) -> Option<&mut RowCounts> {
        match self.kind {
            MatrixKind::Pos => insert_sorted(&mut self.row_labels, row),
            MatrixKind::Edge if !self.has_row(row) => return None,
            MatrixKind::Edge => {}
        }
        Some(self.rows.entry(row.to_owned()).or_default())
    }

    /// Records a cell observation. For an edge matrix, a column outside the
    /// column set is recorded as an other path instead.
    pub fn add_cell(&mut self, row: &str, col: &str) -> bool {
        match self.kind {
            MatrixKind::Pos => insert_sorted(&mut self.col_labels, col),
            MatrixKind::Edge if !self.has_col(col) => return self.add_other(row, col),
            MatrixKind::Edge => {}
        }
        match self.slot(row) {
            Some(r) => {
                *r.cells.entry(col.to_owned()).or_default() += 1;
                true
            }
            None => false,
        }
    }

    pub fn add_collapsed(&mut self, row: &str) -> bool {
        self.slot(row).map(|r| r.collapsed += 1).is_some()
    }

    pub fn add_unaligned(&mut self, row: &str) -> bool {
        self.slot(row).map(|r| r.unaligned += 1).is_some()
    }

    pub fn add_other(&mut self, row: &str, path: &str) -> bool {
        self.slot(row)
            .map(|r| *r.other.entry(path.to_owned()).or_default() += 1)
            .is_some()
    }

    /// Adds another matrix's counts. Edge matrices must share their row and
    /// column configuration; rows the receiver does not track are ignored.
    pub fn merge(&mut self, other: &ConfusionMatrix) {
        debug_assert_eq!(self.kind, other.kind);
        if self.kind == MatrixKind::Pos {
            for l in &other.row_labels {
                insert_sorted(&mut self.row_labels, l);
            }
            for l in &other.col_labels {
                insert_sorted(&mut self.col_labels, l);
            }
        }
        for (label, counts) in &other.rows {
            if self.has_row(label) {
                self.rows.entry(label.clone()).or_default().merge(counts);
            }
        }
    }

    /// Sum of the diagonal over the sum of row totals.
    pub fn diagonal_share(&self) -> Option<f64> {
        let (diag, total) = self.rows.iter().fold((0, 0), |(d, t), (label, r)| {
            (d + r.cell(label), t + r.total())
        });
        (total > 0).then(|| diag as f64 / total as f64)
    }
}

/// POS mappings under the reduced correspondence.
///
/// Every source content word adds one observation in the row of its tag: the
/// tag of its correspondent, or `None`. Target content words without a
/// correspondent are counted in the `None` row under their own tag.
pub fn pos_confusion(corpus: &[SentencePair], policy: &ContentPolicy) -> ConfusionMatrix {
    corpus
        .par_iter()
        .map(|pair| pos_confusion_pair(pair, policy))
        .reduce(ConfusionMatrix::pos, |mut a, b| {
            a.merge(&b);
            a
        })
}

fn pos_confusion_pair(pair: &SentencePair, policy: &ContentPolicy) -> ConfusionMatrix {
    let mut m = ConfusionMatrix::pos();
    let corr = reduce(&pair.align, &pair.src, &pair.tgt);
    for token in pair.src.tokens().iter().filter(|t| policy.is_content(t)) {
        let col = corr
            .target(token.id)
            .map_or(NONE_LABEL, |t| pair.tgt.token(t).upos.as_str());
        m.add_cell(&token.upos, col);
    }
    for token in pair.tgt.tokens().iter().filter(|t| policy.is_content(t)) {
        if corr.source(token.id).is_none() {
            m.add_cell(NONE_LABEL, &token.upos);
        }
    }
    m
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeOptions {
    pub row_labels: Vec<String>,
    pub column_labels: Vec<String>,
    pub strip_subtypes: bool,
    pub with_direction: bool,
    pub scope: CsrScope,
}

impl Default for EdgeOptions {
    fn default() -> Self {
        let labels: Vec<String> = DEFAULT_ROWS.iter().map(|s| s.to_string()).collect();
        EdgeOptions {
            row_labels: labels.clone(),
            column_labels: labels,
            strip_subtypes: true,
            with_direction: false,
            scope: CsrScope::OneToOneOnly,
        }
    }
}

impl EdgeOptions {
    fn csr_options(&self) -> CsrOptions {
        CsrOptions {
            scope: self.scope,
            with_direction: self.with_direction,
            strip_subtypes: self.strip_subtypes,
        }
    }
}

/// Target outcomes of single-edge source relations.
///
/// A target single edge whose label is a column lands in that cell (with
/// directions enabled, only if its direction matches the source edge);
/// every other target path is counted under its rendered form in `other`.
pub fn edge_confusion(
    corpus: &[SentencePair],
    policy: &ContentPolicy,
    opts: &EdgeOptions,
) -> ConfusionMatrix {
    let empty = || ConfusionMatrix::edge(&opts.row_labels, &opts.column_labels);
    corpus
        .par_iter()
        .map(|pair| {
            let mut m = empty();
            record_edges(&mut m, pair, policy, opts);
            m
        })
        .reduce(empty, |mut a, b| {
            a.merge(&b);
            a
        })
}

fn record_edges(
    m: &mut ConfusionMatrix,
    pair: &SentencePair,
    policy: &ContentPolicy,
    opts: &EdgeOptions,
) {
    for csr in extract_edge_csrs(pair, policy, opts.csr_options()) {
        let row = csr.src_path.labels[0].as_str();
        if !m.has_row(row) {
            continue;
        }
        match &csr.target {
            CsrTarget::Collapsed => m.add_collapsed(row),
            CsrTarget::Unaligned { .. } => m.add_unaligned(row),
            CsrTarget::Path(p) => {
                let same_direction = p.first_direction() == csr.src_path.first_direction();
                if p.is_single_edge() && same_direction && m.has_col(&p.labels[0]) {
                    m.add_cell(row, &p.labels[0])
                } else {
                    m.add_other(row, &p.to_string())
                }
            }
        };
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PercentRow {
    pub label: String,
    pub total: u64,
    /// One entry per column label.
    pub cells: Vec<f64>,
    pub collapsed: f64,
    pub other: f64,
    pub mcop: Option<String>,
    pub mcop_percent: f64,
}

impl PercentRow {
    pub fn sum(&self) -> f64 {
        self.cells.iter().sum::<f64>() + self.collapsed + self.other
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Percentages {
    pub kind: MatrixKind,
    pub col_labels: Vec<String>,
    pub rows: Vec<PercentRow>,
    /// Rows without observations.
    pub omitted: Vec<String>,
}

/// Row-normalised percentages; unaligned observations are not in the
/// denominator.
pub fn percentages(m: &ConfusionMatrix) -> Percentages {
    let mut rows = Vec::new();
    let mut omitted = Vec::new();
    for label in m.row_labels() {
        let counts = m.row_ref(label).cloned().unwrap_or_default();
        let total = counts.total();
        if total == 0 {
            omitted.push(label.clone());
            continue;
        }
        let pct = |n: u64| 100.0 * n as f64 / total as f64;
        let mcop = counts.mcop();
        rows.push(PercentRow {
            label: label.clone(),
            total,
            cells: m.col_labels().iter().map(|c| pct(counts.cell(c))).collect(),
            collapsed: pct(counts.collapsed),
            other: pct(counts.other_total()),
            mcop: mcop.map(|(p, _)| p.to_owned()),
            mcop_percent: mcop.map_or(0.0, |(_, n)| pct(n)),
        });
    }
    Percentages {
        kind: m.kind(),
        col_labels: m.col_labels().to_vec(),
        rows,
        omitted,
    }
}

/// Base-2 entropy of a count vector, computed as
/// `log2(N) - sum(c * log2 c) / N`.
pub fn entropy_of_counts(counts: &[u64]) -> f64 {
    let nonzero: Vec<f64> = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| c as f64)
        .collect();
    if nonzero.len() <= 1 {
        return 0.0;
    }
    let n: f64 = nonzero.iter().sum();
    let weighted: f64 = nonzero.iter().map(|c| c * c.log2()).sum();
    (n.log2() - weighted / n).max(0.0)
}

/// Entropy of a row's outcome distribution, unaligned excluded.
pub fn translation_entropy(m: &ConfusionMatrix, row: &str) -> Result<f64, MatrixError> {
    translation_entropy_with(m, row, false)
}

pub fn translation_entropy_with(
    m: &ConfusionMatrix,
    row: &str,
    include_unaligned: bool,
) -> Result<f64, MatrixError> {
    let counts = m
        .row(row)
        .ok_or_else(|| MatrixError::UnknownRow(row.to_owned()))?;
    let outcomes = counts.outcomes(include_unaligned);
    if outcomes.is_empty() {
        return Err(MatrixError::EmptyRow(row.to_owned()));
    }
    Ok(entropy_of_counts(&outcomes))
}

/// Share of identity mappings per row with at least one observation.
pub fn preservation(m: &ConfusionMatrix) -> BTreeMap<String, f64> {
    m.row_labels()
        .iter()
        .filter_map(|label| {
            let counts = m.row_ref(label)?;
            let total = counts.total();
            (total > 0).then(|| (label.clone(), counts.cell(label) as f64 / total as f64))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pos_labels_sort_ascii() {
        let mut m = ConfusionMatrix::pos();
        m.add_cell("NOUN", "NOUN");
        m.add_cell("NUM", NONE_LABEL);
        m.add_cell(NONE_LABEL, "PART");
        m.add_cell("ADJ", "NOUN");
        assert_eq!(m.row_labels(), ["ADJ", "NOUN", "NUM", "None"]);
        assert_eq!(m.col_labels(), ["NOUN", "None", "PART"]);
        assert_eq!(m.count("NOUN", "NOUN"), 1);
    }

    #[test]
    fn edge_rows_and_columns() {
        let mut m = ConfusionMatrix::edge(&["acl", "nmod"], &["acl", "nmod"]);
        assert!(m.add_cell("acl", "acl"));
        assert!(m.add_cell("acl", "obj"));
        assert!(!m.add_cell("det", "det"));
        assert!(m.add_collapsed("nmod"));
        assert!(m.add_unaligned("nmod"));
        let acl = m.row("acl").unwrap();
        assert_eq!(acl.cell("acl"), 1);
        assert_eq!(acl.other["obj"], 1);
        assert_eq!(m.row("nmod").unwrap().total(), 1);
        assert!(m.row("det").is_none());
    }

    #[test]
    fn mcop_ties_break_lexicographically() {
        let mut r = RowCounts::default();
        r.other.insert("nmod+acl".into(), 3);
        r.other.insert("acl+nsubj".into(), 3);
        r.other.insert("obj".into(), 1);
        assert_eq!(r.mcop(), Some(("acl+nsubj", 3)));
        r.other.insert("zz".into(), 4);
        assert_eq!(r.mcop(), Some(("zz", 4)));
    }

    #[test]
    fn percentages_follow_row_totals() {
        // The En-Ru acl row of the published raw counts.
        let cols = DEFAULT_ROWS;
        let mut m = ConfusionMatrix::edge(&["acl"], &cols);
        let cells = [
            ("acl", 151),
            ("advcl", 2),
            ("advmod", 1),
            ("amod", 5),
            ("appos", 1),
            ("ccomp", 2),
            ("conj", 1),
            ("nmod", 27),
            ("nsubj", 7),
            ("obj", 5),
            ("obl", 3),
            ("parataxis", 3),
            ("xcomp", 13),
        ];
        for (col, n) in cells {
            for _ in 0..n {
                m.add_cell("acl", col);
            }
        }
        for _ in 0..2 {
            m.add_collapsed("acl");
        }
        for _ in 0..15 {
            m.add_other("acl", "nmod+acl");
        }
        for i in 0..74 {
            m.add_other("acl", &format!("tail{}", i % 37));
        }
        let p = percentages(&m);
        let row = &p.rows[0];
        assert_eq!(row.total, 312);
        assert_eq!(row.cells[0].round(), 48.0);
        assert_eq!(row.other.round(), 29.0);
        assert_eq!(row.mcop.as_deref(), Some("nmod+acl"));
        assert_eq!(row.mcop_percent.round(), 5.0);
        assert!((row.sum() - 100.0).abs() < 1e-9);
        assert!((preservation(&m)["acl"] - 151.0 / 312.0).abs() < 1e-12);
        assert_eq!((preservation(&m)["acl"] * 100.0).round() / 100.0, 0.48);
    }

    #[test]
    fn empty_rows_are_omitted() {
        let mut m = ConfusionMatrix::edge(&["acl", "nmod"], &["acl"]);
        m.add_cell("acl", "acl");
        m.add_unaligned("nmod");
        let p = percentages(&m);
        assert_eq!(p.rows.len(), 1);
        assert_eq!(p.rows[0].cells, vec![100.0]);
        assert_eq!(p.omitted, ["nmod"]);
        assert!(!preservation(&m).contains_key("nmod"));
    }

    #[test]
    fn entropy_cases() {
        assert_eq!(entropy_of_counts(&[7]), 0.0);
        assert_eq!(entropy_of_counts(&[]), 0.0);
        assert!((entropy_of_counts(&[1, 1, 1, 1, 1]) - 5f64.log2()).abs() < 1e-12);
        assert!((entropy_of_counts(&[2, 2]) - 1.0).abs() < 1e-12);

        let mut m = ConfusionMatrix::edge(&["obj", "iobj"], &["obj"]);
        m.add_cell("obj", "obj");
        m.add_unaligned("obj");
        assert_eq!(translation_entropy(&m, "obj").unwrap(), 0.0);
        assert_eq!(translation_entropy_with(&m, "obj", true).unwrap(), 1.0);
        assert_eq!(
            translation_entropy(&m, "det"),
            Err(MatrixError::UnknownRow("det".into()))
        );
        assert_eq!(
            translation_entropy(&m, "iobj"),
            Err(MatrixError::EmptyRow("iobj".into()))
        );
    }

    #[test]
    fn merge_is_additive() {
        let mut a = ConfusionMatrix::pos();
        a.add_cell("NOUN", "NOUN");
        let mut b = ConfusionMatrix::pos();
        b.add_cell("VERB", "NOUN");
        b.add_cell("NOUN", "NOUN");
        let mut ab = a.clone();
        ab.merge(&b);
        let mut ba = b.clone();
        ba.merge(&a);
        assert_eq!(ab, ba);
        assert_eq!(ab.count("NOUN", "NOUN"), 2);
    }
}
