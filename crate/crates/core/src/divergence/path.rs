use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::conllu::{strip_subtype, DepTree};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PathError {
    #[error("path endpoints are the same token ({0})")]
    SameNode(usize),
    #[error("token {0} is not in the tree")]
    UnknownNode(usize),
    #[error("tokens {0} and {1} are in different root fragments")]
    Disconnected(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Direction {
    /// Traversed from dependent to head.
    Up,
    /// Traversed from head to dependent.
    Down,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }

    fn marker(self) -> char {
        match self {
            Direction::Up => '<',
            Direction::Down => '>',
        }
    }
}

/// The relation labels along a tree path, rendered `a+b+c`. With directions,
/// each label carries `<` (up) or `>` (down): `nsubj<+obj>`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PathType {
    pub labels: Vec<String>,
    pub directions: Option<Vec<Direction>>,
}

impl PathType {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        PathType {
            labels: labels.into_iter().map(Into::into).collect(),
            directions: None,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_single_edge(&self) -> bool {
        self.labels.len() == 1
    }

    /// Labels joined by `+`, ignoring directions.
    pub fn label_string(&self) -> String {
        self.labels.join("+")
    }

    pub fn stripped(&self) -> PathType {
        PathType {
            labels: self
                .labels
                .iter()
                .map(|l| strip_subtype(l).to_owned())
                .collect(),
            directions: self.directions.clone(),
        }
    }

    pub fn without_directions(&self) -> PathType {
        PathType {
            labels: self.labels.clone(),
            directions: None,
        }
    }

    pub fn first_direction(&self) -> Option<Direction> {
        self.directions.as_ref().and_then(|d| d.first().copied())
    }

    /// The same path walked from the other end.
    pub fn reversed(&self) -> PathType {
        PathType {
            labels: self.labels.iter().rev().cloned().collect(),
            directions: self
                .directions
                .as_ref()
                .map(|d| d.iter().rev().map(|d| d.flip()).collect()),
        }
    }

    /// Rendering for terminal reports: paths longer than `max_edges` are cut
    /// and suffixed with the number of omitted edges.
    pub fn display_truncated(&self, max_edges: usize) -> String {
        if self.len() <= max_edges {
            return self.to_string();
        }
        let head = PathType {
            labels: self.labels[..max_edges].to_vec(),
            directions: self.directions.as_ref().map(|d| d[..max_edges].to_vec()),
        };
        format!("{}+...({} more)", head, self.len() - max_edges)
    }
}

impl fmt::Display for PathType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, label) in self.labels.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            f.write_str(label)?;
            if let Some(dirs) = &self.directions {
                write!(f, "{}", dirs[i].marker())?;
            }
        }
        Ok(())
    }
}

/// The labelled path from `u` to `v` through their lowest common ancestor.
///
/// Every edge contributes the relation of its dependent. The artificial root
/// is never traversed, so tokens in different root fragments have no path.
pub fn dependency_path(
    tree: &DepTree,
    u: usize,
    v: usize,
    with_direction: bool,
) -> Result<PathType, PathError> {
    for id in [u, v] {
        if !tree.contains(id) {
            return Err(PathError::UnknownNode(id));
        }
    }
    if u == v {
        return Err(PathError::SameNode(u));
    }

    let mut up = Vec::new();
    let mut down = Vec::new();
    let (mut a, mut b) = (u, v);

    while tree.depth(a) > tree.depth(b) {
        up.push(a);
        a = tree.parent(a).expect("non-root token has a head");
    }
    while tree.depth(b) > tree.depth(a) {
        down.push(b);
        b = tree.parent(b).expect("non-root token has a head");
    }
    while a != b {
        match (tree.parent(a), tree.parent(b)) {
            (Some(pa), Some(pb)) => {
                up.push(a);
                down.push(b);
                a = pa;
                b = pb;
            }
            _ => return Err(PathError::Disconnected(u, v)),
        }
    }

    let n_up = up.len();
    let labels = up
        .into_iter()
        .chain(down.into_iter().rev())
        .map(|id| tree.token(id).deprel.clone())
        .collect::<Vec<_>>();
    let directions = with_direction.then(|| {
        (0..labels.len())
            .map(|i| {
                if i < n_up {
                    Direction::Up
                } else {
                    Direction::Down
                }
            })
            .collect()
    });

    Ok(PathType { labels, directions })
}
