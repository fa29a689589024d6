use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::conllu::{strip_subtype, Token};

/// Relations whose dependents count as content words by default.
pub const CONTENT_RELATIONS: [&str; 13] = [
    "root", "nsubj", "amod", "nmod", "advmod", "nummod", "acl", "advcl", "xcomp", "compound",
    "flat", "obj", "obl",
];

/// A wider content-relation list used by the hybrid policy: every clausal,
/// nominal and modifier relation that is not a function-word marker.
pub const EXTENDED_CONTENT_RELATIONS: [&str; 27] = [
    "root",
    "nsubj",
    "obj",
    "iobj",
    "csubj",
    "ccomp",
    "xcomp",
    "obl",
    "vocative",
    "expl",
    "dislocated",
    "advcl",
    "advmod",
    "discourse",
    "nmod",
    "appos",
    "nummod",
    "acl",
    "amod",
    "conj",
    "fixed",
    "flat",
    "compound",
    "list",
    "parataxis",
    "orphan",
    "goeswith",
];

pub const CONTENT_UPOS: [&str; 8] = ["ADJ", "ADV", "INTJ", "NOUN", "NUM", "PRON", "PROPN", "VERB"];

pub const FUNCTION_UPOS: [&str; 7] = ["ADP", "AUX", "CCONJ", "DET", "PUNCT", "SCONJ", "SYM"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PolicyMode {
    /// Content iff the (stripped) relation is whitelisted.
    DeprelList,
    /// Content iff the UPOS tag is in the content set.
    UposList,
    /// Relation whitelist, overridden by a function-UPOS blacklist, with
    /// spatial adpositions optionally promoted to content.
    Hybrid,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolicyError {
    #[error("content policy {0:?} has an empty word list")]
    EmptyList(PolicyMode),
}

/// Decides which tokens are content words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContentPolicy {
    pub mode: PolicyMode,
    pub deprel_whitelist: BTreeSet<String>,
    pub upos_content: BTreeSet<String>,
    pub upos_function: BTreeSet<String>,
    pub spatial_adp_as_content: bool,
    pub spatial_lemmas: BTreeSet<String>,
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

impl Default for ContentPolicy {
    fn default() -> Self {
        ContentPolicy {
            mode: PolicyMode::DeprelList,
            deprel_whitelist: set(&CONTENT_RELATIONS),
            upos_content: set(&CONTENT_UPOS),
            upos_function: set(&FUNCTION_UPOS),
            spatial_adp_as_content: false,
            spatial_lemmas: BTreeSet::new(),
        }
    }
}

impl ContentPolicy {
    pub fn deprel_list() -> Self {
        Self::default()
    }

    pub fn upos_list() -> Self {
        ContentPolicy {
            mode: PolicyMode::UposList,
            ..Self::default()
        }
    }

    pub fn hybrid() -> Self {
        ContentPolicy {
            mode: PolicyMode::Hybrid,
            deprel_whitelist: set(&EXTENDED_CONTENT_RELATIONS),
            ..Self::default()
        }
    }

    /// Every token with one of the given tags is content.
    pub fn upos(tags: &[&str]) -> Self {
        ContentPolicy {
            mode: PolicyMode::UposList,
            upos_content: set(tags),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        let empty = match self.mode {
            PolicyMode::DeprelList | PolicyMode::Hybrid => self.deprel_whitelist.is_empty(),
            PolicyMode::UposList => self.upos_content.is_empty(),
        };
        if empty {
            Err(PolicyError::EmptyList(self.mode))
        } else {
            Ok(())
        }
    }

    pub fn is_content(&self, token: &Token) -> bool {
        let deprel_ok = || self.deprel_whitelist.contains(strip_subtype(&token.deprel));
        match self.mode {
            PolicyMode::DeprelList => deprel_ok(),
            PolicyMode::UposList => self.upos_content.contains(&token.upos),
            PolicyMode::Hybrid => {
                if token.upos == "ADP" {
                    self.spatial_adp_as_content
                        && self.spatial_lemmas.contains(&token.lemma.to_lowercase())
                } else if self.upos_function.contains(&token.upos) {
                    false
                } else {
                    deprel_ok()
                }
            }
        }
    }
}
