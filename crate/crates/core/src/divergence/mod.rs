//! Corresponding syntactic relations and the confusion statistics built on
//! top of them.

pub mod csr;
pub mod matrix;
pub mod path;
pub mod policy;

pub use csr::{
    correspondence, extract_csr, extract_edge_csrs, Csr, CsrOptions, CsrScope, CsrTarget,
};
pub use matrix::{
    edge_confusion, entropy_of_counts, percentages, pos_confusion, preservation,
    translation_entropy, translation_entropy_with, ConfusionMatrix, EdgeOptions, MatrixError,
    MatrixKind, PercentRow, Percentages, RowCounts, DEFAULT_ROWS, NONE_LABEL,
};
pub use path::{dependency_path, Direction, PathError, PathType};
pub use policy::{ContentPolicy, PolicyError, PolicyMode, CONTENT_RELATIONS};
