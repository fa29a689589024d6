//! Rank correlation between preservation indices and external per-label
//! scores such as parser F-scores.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least two observations, got {0}")]
    TooFew(usize),
    #[error("ranks have zero variance")]
    ZeroVariance,
    #[error("non-finite value")]
    NonFinite,
    #[error("score file line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Fractional ranks (1-based); ties share the mean of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rho with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooFew(x.len()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Per-label scores supplied by the user.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LabeledScores {
    pub scores: BTreeMap<String, f64>,
}

impl LabeledScores {
    /// Two-column TSV: `label<TAB>score`. Blank lines and `#` comments are
    /// skipped, as is a first line whose score column is not numeric.
    pub fn from_tsv(text: &str) -> Result<Self, StatsError> {
        let mut scores = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let (Some(label), Some(value), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(StatsError::Parse {
                    line: i + 1,
                    message: "expected two tab-separated columns".into(),
                });
            };
            let value = match value.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => v,
                Ok(_) => return Err(StatsError::NonFinite),
                Err(_) if i == 0 => continue,
                Err(_) => {
                    return Err(StatsError::Parse {
                        line: i + 1,
                        message: format!("not a number: {:?}", value),
                    })
                }
            };
            scores.insert(label.trim().to_string(), value);
        }
        Ok(LabeledScores { scores })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Correlation {
    pub rho: f64,
    pub n: usize,
    pub labels: Vec<String>,
}

/// Spearman's rho over the labels present on both sides.
pub fn correlate_preservation(
    pres: &BTreeMap<String, f64>,
    scores: &LabeledScores,
) -> Result<Correlation, StatsError> {
    let labels: Vec<String> = pres
        .keys()
        .filter(|l| scores.scores.contains_key(*l))
        .cloned()
        .collect();
    if labels.len() < 2 {
        return Err(StatsError::TooFew(labels.len()));
    }
    let x: Vec<f64> = labels.iter().map(|l| pres[l]).collect();
    let y: Vec<f64> = labels.iter().map(|l| scores.scores[l]).collect();
    Ok(Correlation {
        rho: spearman(&x, &y)?,
        n: labels.len(),
        labels,
    })
}
