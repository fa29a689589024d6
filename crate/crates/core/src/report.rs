//! Deterministic TSV and JSON renderings of analysis results.
//!
//! All output is UTF-8 with LF line endings. Numbers in TSV are printed with
//! fixed precision so reruns are byte-identical.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::alignment::{components, reduce, ComponentKind, DropReason};
use crate::corpus::SentencePair;
use crate::divergence::{
    percentages, translation_entropy_with, ConfusionMatrix, MatrixKind, Percentages,
};
use crate::dorr::{DorrKind, DorrReport};
use crate::stats::Correlation;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Format {
    #[default]
    Tsv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Tsv => "tsv",
            Format::Json => "json",
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report values serialize");
    s.push('\n');
    s
}

fn pct(x: f64) -> String {
    format!("{:.1}", x)
}

fn fixed(x: f64) -> String {
    format!("{:.4}", x)
}

fn tsv_line(out: &mut String, cells: impl IntoIterator<Item = String>) {
    let cells: Vec<String> = cells.into_iter().collect();
    out.push_str(&cells.join("\t"));
    out.push('\n');
}

#[derive(Serialize)]
struct CountsRowJson<'a> {
    label: &'a str,
    cells: BTreeMap<&'a str, u64>,
    collapsed: u64,
    other: u64,
    mcop: Option<&'a str>,
    mcop_count: u64,
    total: u64,
    unaligned: u64,
    other_paths: &'a BTreeMap<String, u64>,
}

/// Raw counts. Edge matrices carry `Collapsed`, `Other`, `MCOP` and `MCOP#`
/// columns after the label columns; POS matrices only the label columns.
pub fn render_counts(m: &ConfusionMatrix, format: Format) -> String {
    let empty = Default::default();
    match format {
        Format::Tsv => {
            let mut out = String::new();
            let mut header = vec!["label".to_string()];
            header.extend(m.col_labels().iter().cloned());
            if m.kind() == MatrixKind::Edge {
                header.extend(["Collapsed", "Other", "MCOP", "MCOP#"].map(String::from));
            }
            header.push("Total".into());
            tsv_line(&mut out, header);
            for label in m.row_labels() {
                let r = m.row_ref(label).unwrap_or(&empty);
                let mut line = vec![label.clone()];
                line.extend(m.col_labels().iter().map(|c| r.cell(c).to_string()));
                if m.kind() == MatrixKind::Edge {
                    let (mcop, n) = r
                        .mcop()
                        .map_or(("-".to_string(), 0), |(p, n)| (p.to_string(), n));
                    line.extend([
                        r.collapsed.to_string(),
                        r.other_total().to_string(),
                        mcop,
                        n.to_string(),
                    ]);
                }
                line.push(r.total().to_string());
                tsv_line(&mut out, line);
            }
            out
        }
        Format::Json => {
            let rows: Vec<CountsRowJson> = m
                .row_labels()
                .iter()
                .map(|label| {
                    let r = m.row_ref(label).unwrap_or(&empty);
                    CountsRowJson {
                        label,
                        cells: m
                            .col_labels()
                            .iter()
                            .map(|c| (c.as_str(), r.cell(c)))
                            .collect(),
                        collapsed: r.collapsed,
                        other: r.other_total(),
                        mcop: r.mcop().map(|(p, _)| p),
                        mcop_count: r.mcop().map_or(0, |(_, n)| n),
                        total: r.total(),
                        unaligned: r.unaligned,
                        other_paths: &r.other,
                    }
                })
                .collect();
            json(&serde_json::json!({
                "kind": m.kind(),
                "columns": m.col_labels(),
                "rows": rows,
            }))
        }
    }
}

/// Row percentages; rows without observations are listed in a trailing
/// comment (TSV) or an `omitted` array (JSON).
pub fn render_percent(m: &ConfusionMatrix, format: Format) -> String {
    let p: Percentages = percentages(m);
    match format {
        Format::Json => json(&p),
        Format::Tsv => {
            let mut out = String::new();
            let mut header = vec!["label".to_string()];
            header.extend(p.col_labels.iter().cloned());
            if p.kind == MatrixKind::Edge {
                header.extend(["Collapsed", "Other", "MCOP", "MCOP%"].map(String::from));
            }
            header.push("Total".into());
            tsv_line(&mut out, header);
            for row in &p.rows {
                let mut line = vec![row.label.clone()];
                line.extend(row.cells.iter().map(|&c| pct(c)));
                if p.kind == MatrixKind::Edge {
                    line.extend([
                        pct(row.collapsed),
                        pct(row.other),
                        row.mcop.clone().unwrap_or_else(|| "-".into()),
                        pct(row.mcop_percent),
                    ]);
                }
                line.push(row.total.to_string());
                tsv_line(&mut out, line);
            }
            if !p.omitted.is_empty() {
                out.push_str(&format!(
                    "# omitted (no observations): {}\n",
                    p.omitted.join(", ")
                ));
            }
            out
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyRow {
    pub label: String,
    /// `None` for rows without observations.
    pub entropy: Option<f64>,
    pub total: u64,
}

pub fn entropy_rows(m: &ConfusionMatrix, include_unaligned: bool) -> Vec<EntropyRow> {
    m.row_labels()
        .iter()
        .map(|label| {
            let r = m.row(label).unwrap_or_default();
            EntropyRow {
                label: label.clone(),
                entropy: translation_entropy_with(m, label, include_unaligned).ok(),
                total: r.total() + if include_unaligned { r.unaligned } else { 0 },
            }
        })
        .collect()
}

pub fn render_entropy(m: &ConfusionMatrix, include_unaligned: bool, format: Format) -> String {
    let rows = entropy_rows(m, include_unaligned);
    match format {
        Format::Json => json(&rows),
        Format::Tsv => {
            let mut out = String::from("label\tentropy\ttotal\n");
            for r in rows {
                let e = r.entropy.map_or_else(|| "NA".to_string(), fixed);
                tsv_line(&mut out, [r.label, e, r.total.to_string()]);
            }
            out
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreservationRow {
    pub label: String,
    pub preservation: f64,
    pub total: u64,
}

/// Preservation indices in row order, skipping empty rows.
pub fn preservation_rows(m: &ConfusionMatrix) -> Vec<PreservationRow> {
    m.row_labels()
        .iter()
        .filter_map(|label| {
            let r = m.row_ref(label)?;
            let total = r.total();
            (total > 0).then(|| PreservationRow {
                label: label.clone(),
                preservation: r.cell(label) as f64 / total as f64,
                total,
            })
        })
        .collect()
}

pub fn render_preservation(m: &ConfusionMatrix, format: Format) -> String {
    let rows = preservation_rows(m);
    match format {
        Format::Json => json(&rows),
        Format::Tsv => {
            let mut out = String::from("label\tpreservation\ttotal\n");
            for r in rows {
                tsv_line(
                    &mut out,
                    [r.label, fixed(r.preservation), r.total.to_string()],
                );
            }
            out
        }
    }
}

/// Source relations whose correspondents were missing, per row.
pub fn render_unaligned(m: &ConfusionMatrix, format: Format) -> String {
    let rows: Vec<(String, u64)> = m
        .row_labels()
        .iter()
        .map(|l| (l.clone(), m.row_ref(l).map_or(0, |r| r.unaligned)))
        .collect();
    match format {
        Format::Json => json(
            &rows
                .iter()
                .map(|(l, n)| serde_json::json!({"label": l, "unaligned": n}))
                .collect::<Vec<_>>(),
        ),
        Format::Tsv => {
            let mut out = String::from("label\tunaligned\n");
            for (l, n) in rows {
                tsv_line(&mut out, [l, n.to_string()]);
            }
            out
        }
    }
}

pub fn render_dorr(report: &DorrReport, format: Format) -> String {
    match format {
        Format::Tsv => report.to_tsv(),
        Format::Json => {
            let counts: Vec<_> = DorrKind::ALL
                .iter()
                .map(|&k| serde_json::json!({"divergence": k.row_name(), "count": report.count(k)}))
                .collect();
            json(&serde_json::json!({
                "counts": counts,
                "sentences": report.sentences,
                "hits": report.per_sentence_hits,
            }))
        }
    }
}

/// One JSON object per line for every detected divergence.
pub fn render_dorr_hits(report: &DorrReport) -> String {
    let mut out = String::new();
    for h in &report.per_sentence_hits {
        out.push_str(&serde_json::to_string(h).expect("hits serialize"));
        out.push('\n');
    }
    out
}

/// How alignments decompose into components across a corpus.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AlignmentSummary {
    pub pairs: usize,
    pub components: BTreeMap<String, usize>,
    pub component_shares: BTreeMap<String, f64>,
    pub src_tokens: usize,
    pub aligned_src_tokens: usize,
    pub one_to_one_src_tokens: usize,
    /// One-to-one source tokens over aligned source tokens.
    pub one_to_one_fraction: Option<f64>,
    pub dropped_many_to_many: usize,
    pub dropped_depth_tie: usize,
}

pub fn alignment_summary(corpus: &[SentencePair]) -> AlignmentSummary {
    let mut s = AlignmentSummary {
        pairs: corpus.len(),
        ..Default::default()
    };
    for kind in [
        ComponentKind::OneToOne,
        ComponentKind::ManyToOne,
        ComponentKind::OneToMany,
        ComponentKind::ManyToMany,
    ] {
        s.components.insert(kind.name().to_string(), 0);
    }
    for pair in corpus {
        s.src_tokens += pair.src.len();
        for c in components(&pair.align) {
            *s.components.entry(c.kind.name().to_string()).or_default() += 1;
            s.aligned_src_tokens += c.src_ids.len();
            if c.kind == ComponentKind::OneToOne {
                s.one_to_one_src_tokens += 1;
            }
        }
        for d in reduce(&pair.align, &pair.src, &pair.tgt).dropped_components {
            match d.reason {
                DropReason::ManyToMany => s.dropped_many_to_many += 1,
                DropReason::DepthTie => s.dropped_depth_tie += 1,
                DropReason::InvalidId => {}
            }
        }
    }
    let total: usize = s.components.values().sum();
    s.component_shares = s
        .components
        .iter()
        .map(|(k, &n)| {
            (
                k.clone(),
                if total == 0 {
                    0.0
                } else {
                    n as f64 / total as f64
                },
            )
        })
        .collect();
    s.one_to_one_fraction = (s.aligned_src_tokens > 0)
        .then(|| s.one_to_one_src_tokens as f64 / s.aligned_src_tokens as f64);
    s
}

pub fn render_alignment_summary(s: &AlignmentSummary, format: Format) -> String {
    match format {
        Format::Json => json(s),
        Format::Tsv => {
            let mut out = String::from("key\tvalue\n");
            let mut kv = |k: &str, v: String| tsv_line(&mut out, [k.to_string(), v]);
            kv("pairs", s.pairs.to_string());
            for (k, n) in &s.components {
                kv(&format!("components.{}", k), n.to_string());
            }
            for (k, f) in &s.component_shares {
                kv(&format!("share.{}", k), fixed(*f));
            }
            kv("src_tokens", s.src_tokens.to_string());
            kv("aligned_src_tokens", s.aligned_src_tokens.to_string());
            kv("one_to_one_src_tokens", s.one_to_one_src_tokens.to_string());
            kv(
                "one_to_one_fraction",
                s.one_to_one_fraction.map_or_else(|| "NA".into(), fixed),
            );
            kv("dropped_many_to_many", s.dropped_many_to_many.to_string());
            kv("dropped_depth_tie", s.dropped_depth_tie.to_string());
            out
        }
    }
}

pub fn render_correlation(c: &Correlation) -> String {
    json(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> ConfusionMatrix {
        let mut m = ConfusionMatrix::edge(&["nsubj", "obj", "acl"], &["nsubj", "obj"]);
        for _ in 0..3 {
            m.add_cell("nsubj", "nsubj");
        }
        m.add_cell("nsubj", "obj");
        m.add_collapsed("nsubj");
        m.add_other("nsubj", "nmod+case");
        m.add_other("nsubj", "nmod+case");
        m.add_other("nsubj", "acl");
        m.add_unaligned("nsubj");
        m.add_cell("obj", "obj");
        m
    }

    #[test]
    fn counts_tsv() {
        let tsv = render_counts(&toy(), Format::Tsv);
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(
            lines[0],
            "label\tnsubj\tobj\tCollapsed\tOther\tMCOP\tMCOP#\tTotal"
        );
        assert_eq!(lines[1], "nsubj\t3\t1\t1\t3\tnmod+case\t2\t8");
        assert_eq!(lines[3], "acl\t0\t0\t0\t0\t-\t0\t0");
    }

    #[test]
    fn percent_tsv_omits_empty_rows() {
        let tsv = render_percent(&toy(), Format::Tsv);
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(
            lines[1],
            "nsubj\t37.5\t12.5\t12.5\t37.5\tnmod+case\t25.0\t8"
        );
        assert_eq!(lines[2], "obj\t0.0\t100.0\t0.0\t0.0\t-\t0.0\t1");
        assert_eq!(lines[3], "# omitted (no observations): acl");
    }

    #[test]
    fn entropy_and_preservation() {
        let m = toy();
        let e = render_entropy(&m, false, Format::Tsv);
        assert!(e.contains("obj\t0.0000\t1\n"));
        assert!(e.contains("acl\tNA\t0\n"));
        let p = render_preservation(&m, Format::Tsv);
        assert_eq!(
            p,
            "label\tpreservation\ttotal\nnsubj\t0.3750\t8\nobj\t1.0000\t1\n"
        );
    }

    #[test]
    fn json_is_parseable() {
        let m = toy();
        for s in [
            render_counts(&m, Format::Json),
            render_percent(&m, Format::Json),
            render_entropy(&m, true, Format::Json),
            render_unaligned(&m, Format::Json),
        ] {
            serde_json::from_str::<serde_json::Value>(&s).unwrap();
            assert!(s.ends_with('\n'));
        }
    }
}
