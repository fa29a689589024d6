//! CoNLL-U reading, writing and dependency tree construction.
//!
//! Only syntactic words (integer ids) take part in trees. Multiword token
//! ranges (`3-4`) and empty nodes (`5.1`) are kept verbatim so a sentence can
//! be written back unchanged, but they are invisible to everything else.

use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConlluError {
    #[error("line {line}: expected 10 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: invalid token id '{value}'")]
    InvalidId { line: usize, value: String },
    #[error("line {line}: invalid head '{value}'")]
    InvalidHead { line: usize, value: String },
    #[error("line {line}: duplicate token id {id}")]
    DuplicateId { line: usize, id: usize },
    #[error("line {line}: expected token id {expected}, found {found}")]
    IdGap {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("self-loop at line {line} (token {id})")]
    SelfLoop { line: usize, id: usize },
    #[error("line {line}: empty {column} column")]
    EmptyField { line: usize, column: &'static str },
    #[error("line {line}: head {head} is outside the sentence (1..={len})")]
    HeadOutOfRange {
        line: usize,
        head: usize,
        len: usize,
    },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum TreeError {
    #[error("sentence {sent_id}: head cycle through token {id}")]
    Cycle { sent_id: String, id: usize },
    #[error("sentence {sent_id}: token {id} has head {head} outside the sentence")]
    DanglingHead {
        sent_id: String,
        id: usize,
        head: usize,
    },
    #[error("sentence {sent_id}: no token is attached to the root")]
    NoRoot { sent_id: String },
}

/// One syntactic word line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Token {
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: String,
    pub head: usize,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
}

impl Token {
    /// Token with only the fields the analysis reads; the rest are `_`.
    pub fn new(id: usize, form: &str, upos: &str, head: usize, deprel: &str) -> Self {
        Token {
            id,
            form: form.to_owned(),
            lemma: form.to_lowercase(),
            upos: upos.to_owned(),
            xpos: "_".to_owned(),
            feats: "_".to_owned(),
            head,
            deprel: deprel.to_owned(),
            deps: "_".to_owned(),
            misc: "_".to_owned(),
        }
    }

    pub fn is_root(&self) -> bool {
        self.head == 0
    }
}

/// A multiword token range line such as `1-2\tdel\t_...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiwordToken {
    pub start: usize,
    pub end: usize,
    pub line: String,
}

/// An empty node line such as `8.1\t...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmptyNode {
    /// Integer part of the decimal id; the node follows this word.
    pub after: usize,
    pub line: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Sentence {
    pub sent_id: Option<String>,
    pub text: Option<String>,
    /// All comment lines, without the leading `#`, in file order.
    pub comments: Vec<String>,
    pub tokens: Vec<Token>,
    pub multiword_ranges: Vec<MultiwordToken>,
    pub empty_nodes: Vec<EmptyNode>,
}

impl Sentence {
    /// Builds a sentence from tokens alone. Ids must already be `1..=n`.
    pub fn from_tokens(sent_id: Option<&str>, tokens: Vec<Token>) -> Self {
        Sentence {
            sent_id: sent_id.map(str::to_owned),
            comments: sent_id
                .map(|id| vec![format!(" sent_id = {}", id)])
                .unwrap_or_default(),
            tokens,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token by 1-based id.
    pub fn token(&self, id: usize) -> Option<&Token> {
        id.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    /// Identifier used in diagnostics: the `sent_id` or `#<index>`.
    pub fn label(&self, index: usize) -> String {
        self.sent_id
            .clone()
            .unwrap_or_else(|| format!("#{}", index + 1))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ParseOptions {
    /// Replace every deprel by its universal part (`acl:relcl` -> `acl`).
    pub strip_subtypes: bool,
    /// Reject sentences whose heads contain a cycle.
    pub check_trees: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            strip_subtypes: false,
            check_trees: true,
        }
    }
}

/// Returns the universal part of a relation label.
pub fn strip_subtype(label: &str) -> &str {
    match label.find(':') {
        Some(idx) => &label[..idx],
        None => label,
    }
}

enum LineId {
    Word(usize),
    Range(usize, usize),
    Empty(usize),
}

fn parse_line_id(field: &str, line: usize) -> Result<LineId, ConlluError> {
    let invalid = || ConlluError::InvalidId {
        line,
        value: field.to_owned(),
    };

    if let Some((a, b)) = field.split_once('-') {
        let start = a.parse().map_err(|_| invalid())?;
        let end = b.parse().map_err(|_| invalid())?;
        return Ok(LineId::Range(start, end));
    }
    if let Some((a, b)) = field.split_once('.') {
        let after = a.parse().map_err(|_| invalid())?;
        b.parse::<usize>().map_err(|_| invalid())?;
        return Ok(LineId::Empty(after));
    }

    match field.parse::<usize>() {
        Ok(id) if id >= 1 => Ok(LineId::Word(id)),
        _ => Err(invalid()),
    }
}

struct SentenceBuilder {
    sentence: Sentence,
    token_lines: Vec<usize>,
}

impl SentenceBuilder {
    fn new() -> Self {
        SentenceBuilder {
            sentence: Sentence::default(),
            token_lines: Vec::new(),
        }
    }

    fn is_empty(&self) -> bool {
        self.sentence.comments.is_empty()
            && self.sentence.tokens.is_empty()
            && self.sentence.multiword_ranges.is_empty()
            && self.sentence.empty_nodes.is_empty()
    }

    fn comment(&mut self, body: &str) {
        if let Some((key, value)) = body.split_once('=') {
            match key.trim() {
                "sent_id" => self.sentence.sent_id = Some(value.trim().to_owned()),
                "text" => self.sentence.text = Some(value.trim().to_owned()),
                _ => {}
            }
        }
        self.sentence.comments.push(body.to_owned());
    }

    fn line(&mut self, raw: &str, line: usize, opts: &ParseOptions) -> Result<(), ConlluError> {
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 10 {
            return Err(ConlluError::ColumnCount {
                line,
                found: fields.len(),
            });
        }

        match parse_line_id(fields[0], line)? {
            LineId::Range(start, end) => {
                self.sentence.multiword_ranges.push(MultiwordToken {
                    start,
                    end,
                    line: raw.to_owned(),
                });
                Ok(())
            }
            LineId::Empty(after) => {
                self.sentence.empty_nodes.push(EmptyNode {
                    after,
                    line: raw.to_owned(),
                });
                Ok(())
            }
            LineId::Word(id) => self.word(&fields, id, line, opts),
        }
    }

    fn word(
        &mut self,
        fields: &[&str],
        id: usize,
        line: usize,
        opts: &ParseOptions,
    ) -> Result<(), ConlluError> {
        let expected = self.sentence.tokens.len() + 1;
        if id < expected {
            return Err(ConlluError::DuplicateId { line, id });
        }
        if id > expected {
            return Err(ConlluError::IdGap {
                line,
                expected,
                found: id,
            });
        }

        let head: usize = fields[6].parse().map_err(|_| ConlluError::InvalidHead {
            line,
            value: fields[6].to_owned(),
        })?;
        if head == id {
            return Err(ConlluError::SelfLoop { line, id });
        }
        if fields[3].is_empty() {
            return Err(ConlluError::EmptyField {
                line,
                column: "UPOS",
            });
        }
        if fields[7].is_empty() {
            return Err(ConlluError::EmptyField {
                line,
                column: "DEPREL",
            });
        }

        let deprel = if opts.strip_subtypes {
            strip_subtype(fields[7])
        } else {
            fields[7]
        };

        self.sentence.tokens.push(Token {
            id,
            form: fields[1].to_owned(),
            lemma: fields[2].to_owned(),
            upos: fields[3].to_owned(),
            xpos: fields[4].to_owned(),
            feats: fields[5].to_owned(),
            head,
            deprel: deprel.to_owned(),
            deps: fields[8].to_owned(),
            misc: fields[9].to_owned(),
        });
        self.token_lines.push(line);
        Ok(())
    }

    fn finish(self, index: usize, opts: &ParseOptions) -> Result<Sentence, ConlluError> {
        let len = self.sentence.tokens.len();
        for (token, &line) in self.sentence.tokens.iter().zip(&self.token_lines) {
            if token.head > len {
                return Err(ConlluError::HeadOutOfRange {
                    line,
                    head: token.head,
                    len,
                });
            }
        }
        if opts.check_trees && len > 0 {
            compute_depths(&self.sentence, index)?;
        }
        Ok(self.sentence)
    }
}

/// Parses a CoNLL-U document into sentences.
pub fn parse_conllu(text: &str, opts: ParseOptions) -> Result<Vec<Sentence>, ConlluError> {
    let mut sentences = Vec::new();
    let mut current = SentenceBuilder::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);

        if raw.trim().is_empty() {
            if !current.is_empty() {
                let done = std::mem::replace(&mut current, SentenceBuilder::new());
                sentences.push(done.finish(sentences.len(), &opts)?);
            }
            continue;
        }

        if let Some(body) = raw.strip_prefix('#') {
            current.comment(body);
        } else {
            current.line(raw, line, &opts)?;
        }
    }

    if !current.is_empty() {
        sentences.push(current.finish(sentences.len(), &opts)?);
    }

    Ok(sentences)
}

fn write_token(out: &mut String, t: &Token) {
    let _ = writeln!(
        out,
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        t.id, t.form, t.lemma, t.upos, t.xpos, t.feats, t.head, t.deprel, t.deps, t.misc
    );
}

/// Writes sentences back in CoNLL-U, each followed by a blank line.
pub fn write_conllu(sentences: &[Sentence]) -> String {
    let mut out = String::new();
    for sentence in sentences {
        for comment in &sentence.comments {
            out.push('#');
            out.push_str(comment);
            out.push('\n');
        }

        let empty_after = |id: usize, out: &mut String| {
            for node in sentence.empty_nodes.iter().filter(|n| n.after == id) {
                out.push_str(&node.line);
                out.push('\n');
            }
        };

        empty_after(0, &mut out);
        for token in &sentence.tokens {
            for range in sentence
                .multiword_ranges
                .iter()
                .filter(|r| r.start == token.id)
            {
                out.push_str(&range.line);
                out.push('\n');
            }
            write_token(&mut out, token);
            empty_after(token.id, &mut out);
        }
        out.push('\n');
    }
    out
}

/// Depth of every token (index 0 unused), or the first cycle found.
fn compute_depths(sentence: &Sentence, index: usize) -> Result<Vec<usize>, TreeError> {
    const UNSET: usize = usize::MAX;
    let n = sentence.len();
    let mut depth = vec![UNSET; n + 1];
    let mut on_path = vec![false; n + 1];

    for start in 1..=n {
        if depth[start] != UNSET {
            continue;
        }
        let mut path = Vec::new();
        let mut node = start;
        // Walk up until a token with known depth or a root.
        let base = loop {
            if depth[node] != UNSET {
                break depth[node] + 1;
            }
            if on_path[node] {
                return Err(TreeError::Cycle {
                    sent_id: sentence.label(index),
                    id: node,
                });
            }
            on_path[node] = true;
            path.push(node);

            let head = sentence.tokens[node - 1].head;
            if head > n {
                return Err(TreeError::DanglingHead {
                    sent_id: sentence.label(index),
                    id: node,
                    head,
                });
            }
            if head == 0 {
                break 0;
            }
            node = head;
        };

        for (offset, &id) in path.iter().rev().enumerate() {
            depth[id] = base + offset;
            on_path[id] = false;
        }
    }

    Ok(depth)
}

/// A sentence with parent, children and depth indices.
#[derive(Clone, Debug)]
pub struct DepTree {
    sentence: Sentence,
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
}

impl DepTree {
    pub fn sentence(&self) -> &Sentence {
        &self.sentence
    }

    pub fn len(&self) -> usize {
        self.sentence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentence.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        id >= 1 && id <= self.len()
    }

    /// Panics if `id` is not in the tree.
    pub fn token(&self, id: usize) -> &Token {
        &self.sentence.tokens[id - 1]
    }

    pub fn tokens(&self) -> &[Token] {
        &self.sentence.tokens
    }

    /// Head of `id`, or `None` for tokens attached to the artificial root.
    pub fn parent(&self, id: usize) -> Option<usize> {
        match self.parent[id] {
            0 => None,
            head => Some(head),
        }
    }

    /// Dependents of `id` in id order; `children(0)` are the roots.
    pub fn children(&self, id: usize) -> &[usize] {
        &self.children[id]
    }

    pub fn roots(&self) -> &[usize] {
        &self.children[0]
    }

    pub fn depth(&self, id: usize) -> usize {
        self.depth[id]
    }

    /// The head-0 token whose fragment contains `id`.
    pub fn root_of(&self, mut id: usize) -> usize {
        while let Some(head) = self.parent(id) {
            id = head;
        }
        id
    }
}

/// Indexes a sentence as a tree. Multiple roots are accepted.
pub fn build_tree(sentence: Sentence) -> Result<DepTree, TreeError> {
    build_tree_indexed(sentence, 0)
}

pub(crate) fn build_tree_indexed(sentence: Sentence, index: usize) -> Result<DepTree, TreeError> {
    let depth = compute_depths(&sentence, index)?;
    let n = sentence.len();
    if n > 0 && sentence.tokens.iter().all(|t| t.head != 0) {
        // Unreachable in practice: a cycle would have been reported first.
        return Err(TreeError::NoRoot {
            sent_id: sentence.label(index),
        });
    }

    let mut parent = vec![0; n + 1];
    let mut children = vec![Vec::new(); n + 1];
    for token in &sentence.tokens {
        parent[token.id] = token.head;
        children[token.head].push(token.id);
    }

    Ok(DepTree {
        sentence,
        parent,
        children,
        depth,
    })
}

impl fmt::Display for DepTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_conllu(std::slice::from_ref(&self.sentence)))
    }
}
