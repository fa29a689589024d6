//! Extraction and quantification of morphosyntactic divergences between
//! dependency-parsed, word-aligned parallel sentences.
//!
//! The pipeline reads two CoNLL-U treebanks and a Pharaoh alignment file,
//! pairs sentences ([`corpus`]), finds pairs of corresponding syntactic
//! relations ([`divergence`]), and summarises them as confusion matrices,
//! translation entropies, preservation indices and classic divergence
//! counts ([`dorr`]).

pub mod alignment;
pub mod cli;
pub mod config;
pub mod conllu;
pub mod corpus;
pub mod divergence;
pub mod dorr;
pub mod report;
pub mod stats;

pub use alignment::{AlignmentGraph, ComponentKind, IndexBase, ReducedAlignment};
pub use conllu::{DepTree, Sentence, Token};
pub use corpus::{load_corpus, Corpus, LoadOptions, PairBy, SentencePair};
pub use divergence::{ConfusionMatrix, ContentPolicy, Csr, CsrTarget, PathType};
pub use dorr::{DorrKind, DorrReport};
