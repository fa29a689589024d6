//! Run configuration: command-line flags layered over an optional flat
//! `key = value` file, layered over defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::alignment::IndexBase;
use crate::corpus::{LoadOptions, PairBy};
use crate::divergence::{ContentPolicy, CsrOptions, CsrScope, EdgeOptions, DEFAULT_ROWS};
use crate::report::Format;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("config line {line}: expected key = value")]
    Syntax { line: usize },
    #[error("unknown config key '{0}'")]
    UnknownKey(String),
    #[error("invalid value '{value}' for {key}")]
    BadValue { key: String, value: String },
    #[error("missing required setting '{0}'")]
    Missing(&'static str),
    #[error("label list '{0}' is empty")]
    EmptyLabels(&'static str),
}

const KEYS: [&str; 17] = [
    "src",
    "tgt",
    "align",
    "pred",
    "scores",
    "pair_by",
    "index_base",
    "policy",
    "spatial_adp",
    "keep_subtypes",
    "direction",
    "scope",
    "rows",
    "cols",
    "format",
    "out",
    "include_unaligned",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PolicyChoice {
    #[default]
    Deprel,
    Upos,
    Hybrid,
}

impl PolicyChoice {
    pub fn build(self, spatial_lemmas: &[String]) -> ContentPolicy {
        match self {
            PolicyChoice::Deprel => ContentPolicy::deprel_list(),
            PolicyChoice::Upos => ContentPolicy::upos_list(),
            PolicyChoice::Hybrid => {
                let mut p = ContentPolicy::hybrid();
                if !spatial_lemmas.is_empty() {
                    p.spatial_adp_as_content = true;
                    p.spatial_lemmas = spatial_lemmas.iter().cloned().collect();
                }
                p
            }
        }
    }
}

/// Values as given on the command line or in a config file, before
/// defaults are applied. Every field is a raw string so that both sources
/// go through the same validation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses a flat config file. `#` starts a comment line; keys may use
    /// `-` or `_`.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut s = Settings::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or(ConfigError::Syntax { line: i + 1 })?;
            s.set(k.trim(), v.trim())?;
        }
        Ok(s)
    }

    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey(key));
        }
        self.values.insert(key, value.to_owned());
        Ok(())
    }

    /// Sets `key` only if `value` is present.
    pub fn set_opt(&mut self, key: &str, value: Option<impl ToString>) {
        if let Some(v) = value {
            self.set(key, &v.to_string()).expect("known key");
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// `self` wins over `lower`.
    pub fn layered_over(mut self, lower: &Settings) -> Settings {
        for (k, v) in &lower.values {
            self.values.entry(k.clone()).or_insert_with(|| v.clone());
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub src: Option<PathBuf>,
    pub tgt: Option<PathBuf>,
    pub align: Option<PathBuf>,
    pub pred: Option<PathBuf>,
    pub scores: Option<PathBuf>,
    pub pair_by: PairBy,
    pub index_base: IndexBase,
    pub policy: PolicyChoice,
    pub spatial_lemmas: Vec<String>,
    pub strip_subtypes: bool,
    pub with_direction: bool,
    pub scope: CsrScope,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub include_unaligned: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let labels: Vec<String> = DEFAULT_ROWS.iter().map(|s| s.to_string()).collect();
        RunConfig {
            src: None,
            tgt: None,
            align: None,
            pred: None,
            scores: None,
            pair_by: PairBy::Position,
            index_base: IndexBase::One,
            policy: PolicyChoice::Deprel,
            spatial_lemmas: Vec::new(),
            strip_subtypes: true,
            with_direction: false,
            scope: CsrScope::OneToOneOnly,
            row_labels: labels.clone(),
            col_labels: labels,
            format: Format::Tsv,
            out: None,
            include_unaligned: false,
        }
    }
}

fn bad(key: &str, value: &str) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_owned(),
        value: value.to_owned(),
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(bad(key, v)),
    }
}

fn parse_list(v: &str) -> Vec<String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

impl RunConfig {
    /// Applies settings on top of the defaults.
    pub fn from_settings(s: &Settings) -> Result<Self, ConfigError> {
        let mut c = RunConfig::default();
        for (key, v) in &s.values {
            let v = v.as_str();
            match key.as_str() {
                "src" => c.src = Some(v.into()),
                "tgt" => c.tgt = Some(v.into()),
                "align" => c.align = Some(v.into()),
                "pred" => c.pred = Some(v.into()),
                "scores" => c.scores = Some(v.into()),
                "out" => c.out = Some(v.into()),
                "pair_by" => {
                    c.pair_by = match v {
                        "position" => PairBy::Position,
                        "sent_id" | "sent-id" => PairBy::SentId,
                        _ => return Err(bad(key, v)),
                    }
                }
                "index_base" => {
                    c.index_base = match v {
                        "0" => IndexBase::Zero,
                        "1" => IndexBase::One,
                        _ => return Err(bad(key, v)),
                    }
                }
                "policy" => {
                    c.policy = match v {
                        "deprel" => PolicyChoice::Deprel,
                        "upos" => PolicyChoice::Upos,
                        "hybrid" => PolicyChoice::Hybrid,
                        _ => return Err(bad(key, v)),
                    }
                }
                "spatial_adp" => c.spatial_lemmas = parse_list(v),
                "keep_subtypes" => c.strip_subtypes = !parse_bool(key, v)?,
                "direction" => c.with_direction = parse_bool(key, v)?,
                "include_unaligned" => c.include_unaligned = parse_bool(key, v)?,
                "scope" => {
                    c.scope = match v {
                        "one-to-one" | "one_to_one" => CsrScope::OneToOneOnly,
                        "reduced" => CsrScope::Reduced,
                        _ => return Err(bad(key, v)),
                    }
                }
                "rows" => c.row_labels = parse_list(v),
                "cols" => c.col_labels = parse_list(v),
                "format" => {
                    c.format = match v {
                        "tsv" => Format::Tsv,
                        "json" => Format::Json,
                        _ => return Err(bad(key, v)),
                    }
                }
                _ => return Err(ConfigError::UnknownKey(key.clone())),
            }
        }
        if c.row_labels.is_empty() {
            return Err(ConfigError::EmptyLabels("rows"));
        }
        if c.col_labels.is_empty() {
            return Err(ConfigError::EmptyLabels("cols"));
        }
        Ok(c)
    }

    pub fn content_policy(&self) -> ContentPolicy {
        self.policy.build(&self.spatial_lemmas)
    }

    pub fn load_options(&self) -> LoadOptions {
        LoadOptions {
            pair_by: self.pair_by,
            index_base: self.index_base,
            strip_subtypes: self.strip_subtypes,
        }
    }

    pub fn csr_options(&self) -> CsrOptions {
        CsrOptions {
            scope: self.scope,
            with_direction: self.with_direction,
            strip_subtypes: self.strip_subtypes,
        }
    }

    pub fn edge_options(&self) -> EdgeOptions {
        EdgeOptions {
            row_labels: self.row_labels.clone(),
            column_labels: self.col_labels.clone(),
            strip_subtypes: self.strip_subtypes,
            with_direction: self.with_direction,
            scope: self.scope,
        }
    }

    pub fn require_src(&self) -> Result<&Path, ConfigError> {
        self.src.as_deref().ok_or(ConfigError::Missing("src"))
    }

    /// The three corpus paths.
    pub fn corpus_paths(&self) -> Result<(&Path, &Path, &Path), ConfigError> {
        Ok((
            self.require_src()?,
            self.tgt.as_deref().ok_or(ConfigError::Missing("tgt"))?,
            self.align.as_deref().ok_or(ConfigError::Missing("align"))?,
        ))
    }
}
