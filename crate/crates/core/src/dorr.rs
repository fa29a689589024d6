//! Classic translation divergence classes expressed as patterns over
//! corresponding relations: thematic, promotional, demotional, structural,
//! conflational and categorial. Lexical divergences have no structural
//! signature and are not detected.

use rayon::prelude::*;
use serde::Serialize;

use crate::alignment::{components, ComponentKind};
use crate::conllu::strip_subtype;
use crate::corpus::SentencePair;
use crate::divergence::{extract_edge_csrs, ContentPolicy, Csr, CsrOptions, CsrTarget};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum DorrKind {
    ThematicFull,
    Thematic,
    Promotional,
    Demotional,
    Structural,
    Conflational,
    CategorialNsubjObj,
    CategorialNsubjIobjObl,
}

impl DorrKind {
    pub const ALL: [DorrKind; 8] = [
        DorrKind::ThematicFull,
        DorrKind::Thematic,
        DorrKind::Promotional,
        DorrKind::Demotional,
        DorrKind::Structural,
        DorrKind::Conflational,
        DorrKind::CategorialNsubjObj,
        DorrKind::CategorialNsubjIobjObl,
    ];

    /// Row heading in the summary table.
    pub fn row_name(self) -> &'static str {
        match self {
            DorrKind::ThematicFull => "Thematic-Full",
            DorrKind::Thematic => "Thematic nsubj→obj/obl",
            DorrKind::Promotional => "Promotional",
            DorrKind::Demotional => "Demotional",
            DorrKind::Structural => "Structural",
            DorrKind::Conflational => "Conflational",
            DorrKind::CategorialNsubjObj => "Categorial nsubj+obj",
            DorrKind::CategorialNsubjIobjObl => "Categorial nsubj+(i)obj/obl",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DorrHit {
    pub sentence: usize,
    pub kind: DorrKind,
    pub src_ids: Vec<usize>,
    pub tgt_ids: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DorrReport {
    pub thematic_full: u64,
    pub thematic_nsubj_to_obj_obl: u64,
    pub promotional: u64,
    pub demotional: u64,
    pub structural: u64,
    pub conflational: u64,
    pub categorial_nsubj_obj: u64,
    pub categorial_nsubj_iobj_obl: u64,
    pub sentences: u64,
    pub per_sentence_hits: Vec<DorrHit>,
}

impl DorrReport {
    pub fn count(&self, kind: DorrKind) -> u64 {
        match kind {
            DorrKind::ThematicFull => self.thematic_full,
            DorrKind::Thematic => self.thematic_nsubj_to_obj_obl,
            DorrKind::Promotional => self.promotional,
            DorrKind::Demotional => self.demotional,
            DorrKind::Structural => self.structural,
            DorrKind::Conflational => self.conflational,
            DorrKind::CategorialNsubjObj => self.categorial_nsubj_obj,
            DorrKind::CategorialNsubjIobjObl => self.categorial_nsubj_iobj_obl,
        }
    }

    fn counter(&mut self, kind: DorrKind) -> &mut u64 {
        match kind {
            DorrKind::ThematicFull => &mut self.thematic_full,
            DorrKind::Thematic => &mut self.thematic_nsubj_to_obj_obl,
            DorrKind::Promotional => &mut self.promotional,
            DorrKind::Demotional => &mut self.demotional,
            DorrKind::Structural => &mut self.structural,
            DorrKind::Conflational => &mut self.conflational,
            DorrKind::CategorialNsubjObj => &mut self.categorial_nsubj_obj,
            DorrKind::CategorialNsubjIobjObl => &mut self.categorial_nsubj_iobj_obl,
        }
    }

    fn hit(&mut self, sentence: usize, kind: DorrKind, src_ids: Vec<usize>, tgt_ids: Vec<usize>) {
        *self.counter(kind) += 1;
        self.per_sentence_hits.push(DorrHit {
            sentence,
            kind,
            src_ids,
            tgt_ids,
        });
    }

    /// Adds counters and concatenates hits, keeping hits sorted.
    pub fn merge(&mut self, other: &DorrReport) {
        for kind in DorrKind::ALL {
            *self.counter(kind) += other.count(kind);
        }
        self.sentences += other.sentences;
        self.per_sentence_hits
            .extend(other.per_sentence_hits.iter().cloned());
        self.per_sentence_hits.sort();
    }

    /// The summary table: one `name\tcount` row per class plus `#Sentences`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("divergence\tcount\n");
        for kind in DorrKind::ALL {
            out.push_str(&format!("{}\t{}\n", kind.row_name(), self.count(kind)));
        }
        out.push_str(&format!("#Sentences\t{}\n", self.sentences));
        out
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DorrOptions {
    /// Also require the first target edge to run in the same direction as the
    /// source edge. Needs CSRs extracted with directions.
    pub direction_sensitive: bool,
}

/// Per-pattern classification of one CSR.
fn csr_kinds(csr: &Csr, opts: DorrOptions) -> Vec<DorrKind> {
    let CsrTarget::Path(tgt) = &csr.target else {
        return Vec::new();
    };
    if opts.direction_sensitive && tgt.first_direction() != csr.src_path.first_direction() {
        return Vec::new();
    }
    let src = csr.src_path.label_string();
    let tgt = tgt.label_string();

    let mut kinds = Vec::new();
    match (src.as_str(), tgt.as_str()) {
        ("nsubj", "obj" | "obl") => kinds.push(DorrKind::Thematic),
        ("advmod", "xcomp") => kinds.push(DorrKind::Promotional),
        ("xcomp", "advmod") => kinds.push(DorrKind::Demotional),
        ("obj", "obl") => kinds.push(DorrKind::Structural),
        ("nsubj", "nsubj+obj") => {
            kinds.push(DorrKind::CategorialNsubjObj);
            kinds.push(DorrKind::CategorialNsubjIobjObl);
        }
        ("nsubj", "nsubj+iobj" | "nsubj+obl") => kinds.push(DorrKind::CategorialNsubjIobjObl),
        _ => {}
    }
    kinds
}

fn is_inverse_thematic(csr: &Csr) -> bool {
    let Some(tgt) = csr.target.path() else {
        return false;
    };
    matches!(csr.src_path.label_string().as_str(), "obj" | "obl") && tgt.label_string() == "nsubj"
}

fn endpoints(csr: &Csr) -> (Vec<usize>, Vec<usize>) {
    let (a, b) = csr.src_endpoints;
    let tgt = csr.tgt_endpoints.map_or_else(Vec::new, |(x, y)| vec![x, y]);
    (vec![a, b], tgt)
}

/// Divergence counts contributed by one sentence pair. `csrs` should be
/// extracted from `pair` with subtypes stripped.
pub fn detect_dorr(csrs: &[Csr], pair: &SentencePair, opts: DorrOptions) -> DorrReport {
    let mut report = DorrReport {
        sentences: 1,
        ..Default::default()
    };
    let sentence = pair.index;

    let mut forward = Vec::new();
    let mut inverse = Vec::new();
    for csr in csrs {
        let kinds = csr_kinds(csr, opts);
        if kinds.contains(&DorrKind::Thematic) {
            forward.push(csr);
        }
        for kind in kinds {
            let (s, t) = endpoints(csr);
            report.hit(sentence, kind, s, t);
        }
        if is_inverse_thematic(csr)
            && !(opts.direction_sensitive
                && csr.target.path().and_then(|p| p.first_direction())
                    != csr.src_path.first_direction())
        {
            inverse.push(csr);
        }
    }
    if let (Some(f), Some(i)) = (forward.first(), inverse.first()) {
        let (mut s, mut t) = endpoints(f);
        let (s2, t2) = endpoints(i);
        s.extend(s2);
        t.extend(t2);
        for ids in [&mut s, &mut t] {
            ids.sort_unstable();
            ids.dedup();
        }
        report.hit(sentence, DorrKind::ThematicFull, s, t);
    }

    for c in components(&pair.align) {
        if c.kind != ComponentKind::OneToMany {
            continue;
        }
        let root = *c.src_ids.first().unwrap();
        if !pair.src.contains(root) || !pair.src.token(root).is_root() {
            continue;
        }
        if !c.tgt_ids.iter().all(|&t| pair.tgt.contains(t)) {
            continue;
        }
        let conflated = c.tgt_ids.iter().any(|&r| {
            pair.tgt.token(r).is_root()
                && c.tgt_ids.iter().any(|&o| {
                    pair.tgt.parent(o) == Some(r)
                        && strip_subtype(&pair.tgt.token(o).deprel) == "obj"
                })
        });
        if conflated {
            report.hit(
                sentence,
                DorrKind::Conflational,
                vec![root],
                c.tgt_ids.iter().copied().collect(),
            );
        }
    }

    report
}

/// Runs the detector over a corpus. Subtypes are always stripped.
pub fn dorr_corpus(
    corpus: &[SentencePair],
    policy: &ContentPolicy,
    csr_opts: CsrOptions,
    opts: DorrOptions,
) -> DorrReport {
    let csr_opts = CsrOptions {
        strip_subtypes: true,
        ..csr_opts
    };
    corpus
        .par_iter()
        .map(|pair| detect_dorr(&extract_edge_csrs(pair, policy, csr_opts), pair, opts))
        .reduce(DorrReport::default, |mut a, b| {
            a.merge(&b);
            a
        })
}
