//! The `clmd` command line. Exit codes: 0 success, 1 usage error, 2 data
//! error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::alignment::{alignment_pr, AlignmentScores, PrOptions};
use crate::config::{ConfigError, RunConfig, Settings};
use crate::conllu::{build_tree_indexed, DepTree};
use crate::corpus::{load_corpus, read_alignment, read_treebank, Corpus, Issue, Severity};
use crate::divergence::{edge_confusion, pos_confusion, preservation, ConfusionMatrix};
use crate::dorr::{dorr_corpus, DorrOptions};
use crate::report::{self, Format};
use crate::stats::{correlate_preservation, LabeledScores};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "clmd",
    version,
    about = "Cross-linguistic morphosyntactic divergence statistics from aligned treebanks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that the three inputs parse and pair up.
    Validate(Flags),
    /// Write the full report bundle to --out.
    Analyze(Flags),
    /// POS confusion matrix.
    PosMatrix(Flags),
    /// Relation confusion matrix over corresponding relations.
    PathMatrix(Flags),
    /// Translation entropy per relation.
    Entropy(Flags),
    /// Preservation index per relation, optionally correlated with --scores.
    Preservation(Flags),
    /// Classic divergence counts.
    Dorr(Flags),
    /// Precision and recall of --pred against the gold --align.
    AlignEval(Flags),
}

#[derive(Debug, Args)]
struct Flags {
    /// Flat key = value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Source-side CoNLL-U treebank.
    #[arg(long)]
    src: Option<PathBuf>,
    /// Target-side CoNLL-U treebank.
    #[arg(long)]
    tgt: Option<PathBuf>,
    /// Gold alignment, one Pharaoh line per source sentence.
    #[arg(long)]
    align: Option<PathBuf>,
    /// Predicted alignment (align-eval).
    #[arg(long)]
    pred: Option<PathBuf>,
    /// Two-column label/score TSV to correlate with preservation.
    #[arg(long)]
    scores: Option<PathBuf>,
    /// How target sentences are matched: position or sent_id.
    #[arg(long, value_name = "position|sent_id")]
    pair_by: Option<String>,
    /// Index base of the alignment files.
    #[arg(long, value_name = "0|1")]
    index_base: Option<String>,
    /// Content-word policy.
    #[arg(long, value_name = "deprel|upos|hybrid")]
    policy: Option<String>,
    /// Comma-separated adposition lemmas treated as content (hybrid policy).
    #[arg(long, value_name = "LEMMAS")]
    spatial_adp: Option<String>,
    /// Keep relation subtypes such as acl:relcl.
    #[arg(long)]
    keep_subtypes: bool,
    /// Mark edge directions in paths.
    #[arg(long)]
    direction: bool,
    /// Correspondence used for relations.
    #[arg(long, value_name = "one-to-one|reduced")]
    scope: Option<String>,
    /// Comma-separated row labels.
    #[arg(long)]
    rows: Option<String>,
    /// Comma-separated column labels.
    #[arg(long)]
    cols: Option<String>,
    /// Output format.
    #[arg(long, value_name = "tsv|json")]
    format: Option<String>,
    /// Output directory (required by analyze; otherwise print to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print row percentages instead of counts (matrix commands).
    #[arg(long)]
    percent: bool,
    /// Count unaligned relations as an outcome in entropy.
    #[arg(long)]
    include_unaligned: bool,
    /// Score every link, not only links from content-relation words (align-eval).
    #[arg(long)]
    all_links: bool,
}

impl Flags {
    fn settings(&self) -> Settings {
        let mut s = Settings::new();
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        s.set_opt("src", path(&self.src));
        s.set_opt("tgt", path(&self.tgt));
        s.set_opt("align", path(&self.align));
        s.set_opt("pred", path(&self.pred));
        s.set_opt("scores", path(&self.scores));
        s.set_opt("out", path(&self.out));
        s.set_opt("pair_by", self.pair_by.as_ref());
        s.set_opt("index_base", self.index_base.as_ref());
        s.set_opt("policy", self.policy.as_ref());
        s.set_opt("spatial_adp", self.spatial_adp.as_ref());
        s.set_opt("scope", self.scope.as_ref());
        s.set_opt("rows", self.rows.as_ref());
        s.set_opt("cols", self.cols.as_ref());
        s.set_opt("format", self.format.as_ref());
        s.set_opt("keep_subtypes", self.keep_subtypes.then_some(true));
        s.set_opt("direction", self.direction.then_some(true));
        s.set_opt("include_unaligned", self.include_unaligned.then_some(true));
        s
    }

    fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let file = match &self.config {
            Some(p) => Settings::read(p)?,
            None => Settings::new(),
        };
        RunConfig::from_settings(&self.settings().layered_over(&file))
    }
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => CliError::Data(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn data<E: ToString>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

fn describe(issue: &Issue) -> String {
    let sev = match issue.severity {
        Severity::Warning => "warning",
        Severity::Fatal => "fatal",
    };
    let mut where_ = String::new();
    if let Some(p) = issue.pair {
        where_.push_str(&format!(" pair {}", p + 1));
    }
    if let Some(l) = issue.line {
        where_.push_str(&format!(" (alignment line {})", l));
    }
    if where_.is_empty() {
        format!("{}: {}", sev, issue.message)
    } else {
        format!("{}:{}: {}", sev, where_, issue.message)
    }
}

/// Result of `validate`.
#[derive(Clone, Debug)]
pub struct Diagnostics {
    pub pairs: usize,
    pub issues: Vec<Issue>,
}

impl Diagnostics {
    pub fn has_fatal(&self) -> bool {
        self.issues.iter().any(|i| i.severity == Severity::Fatal)
    }

    pub fn render(&self) -> String {
        let mut out = format!("{} pairs, {} issues\n", self.pairs, self.issues.len());
        for i in &self.issues {
            out.push_str(&describe(i));
            out.push('\n');
        }
        out
    }
}

fn load(config: &RunConfig) -> Result<Corpus, CliError> {
    let (src, tgt, align) = config.corpus_paths()?;
    load_corpus(src, tgt, align, config.load_options()).map_err(data)
}

/// Loads a corpus and refuses to continue on fatal issues.
fn load_clean(config: &RunConfig) -> Result<Corpus, CliError> {
    let corpus = load(config)?;
    if corpus.has_fatal() {
        let d = Diagnostics {
            pairs: corpus.pairs.len(),
            issues: corpus.issues,
        };
        return Err(CliError::Data(d.render().trim_end().to_string()));
    }
    Ok(corpus)
}

pub fn cmd_validate(config: &RunConfig) -> Result<Diagnostics, CliError> {
    let corpus = load(config)?;
    Ok(Diagnostics {
        pairs: corpus.pairs.len(),
        issues: corpus.issues,
    })
}

fn edge_matrix(config: &RunConfig, corpus: &Corpus) -> ConfusionMatrix {
    edge_confusion(
        &corpus.pairs,
        &config.content_policy(),
        &config.edge_options(),
    )
}

/// Every report file of a full analysis, as `(file name, contents)`.
pub fn analysis_files(config: &RunConfig, corpus: &Corpus) -> Vec<(String, String)> {
    let f = config.format;
    let ext = f.extension();
    let policy = config.content_policy();
    let pos = pos_confusion(&corpus.pairs, &policy);
    let edge = edge_matrix(config, corpus);
    let dorr = dorr_corpus(
        &corpus.pairs,
        &policy,
        config.csr_options(),
        DorrOptions {
            direction_sensitive: config.with_direction,
        },
    );
    let summary = report::alignment_summary(&corpus.pairs);
    vec![
        (format!("pos_counts.{ext}"), report::render_counts(&pos, f)),
        (
            format!("pos_percent.{ext}"),
            report::render_percent(&pos, f),
        ),
        (
            format!("edge_counts.{ext}"),
            report::render_counts(&edge, f),
        ),
        (
            format!("edge_percent.{ext}"),
            report::render_percent(&edge, f),
        ),
        (
            format!("edge_unaligned.{ext}"),
            report::render_unaligned(&edge, f),
        ),
        (
            format!("entropy.{ext}"),
            report::render_entropy(&edge, config.include_unaligned, f),
        ),
        (
            format!("preservation.{ext}"),
            report::render_preservation(&edge, f),
        ),
        (format!("dorr.{ext}"), report::render_dorr(&dorr, f)),
        (
            "dorr_hits.jsonl".to_string(),
            report::render_dorr_hits(&dorr),
        ),
        (
            format!("alignment_summary.{ext}"),
            report::render_alignment_summary(&summary, f),
        ),
    ]
}

/// Runs the full analysis and writes the bundle into `config.out`.
pub fn cmd_analyze(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let out = config
        .out
        .clone()
        .ok_or_else(|| CliError::Usage("analyze needs --out".into()))?;
    let corpus = load_clean(config)?;
    fs::create_dir_all(&out).map_err(|e| CliError::Data(format!("{}: {}", out.display(), e)))?;
    let mut written = Vec::new();
    for (name, contents) in analysis_files(config, &corpus) {
        let path = out.join(name);
        write_file(&path, &contents)?;
        written.push(path);
    }
    Ok(written)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Data(format!("{}: {}", path.display(), e)))
}

fn source_trees(config: &RunConfig) -> Result<Vec<DepTree>, CliError> {
    let src = read_treebank(config.require_src()?, config.strip_subtypes).map_err(data)?;
    src.into_iter()
        .enumerate()
        .map(|(i, s)| build_tree_indexed(s, i).map_err(data))
        .collect()
}

/// Scores `config.pred` against `config.align`. Unless `all_links` is set,
/// only links from source words whose relation is in the content-relation
/// list are scored.
pub fn cmd_align_eval(config: &RunConfig, all_links: bool) -> Result<AlignmentScores, CliError> {
    let gold_path = config
        .align
        .as_deref()
        .ok_or(ConfigError::Missing("align"))?;
    let pred_path = config.pred.as_deref().ok_or(ConfigError::Missing("pred"))?;
    let gold: Vec<_> = read_alignment(gold_path, config.index_base)
        .map_err(data)?
        .into_iter()
        .map(|(_, g)| g)
        .collect();
    let pred: Vec<_> = read_alignment(pred_path, config.index_base)
        .map_err(data)?
        .into_iter()
        .map(|(_, g)| g)
        .collect();
    let trees = source_trees(config)?;
    let policy = config.content_policy();
    let restrict = (!all_links).then_some(&policy.deprel_whitelist);
    alignment_pr(
        &gold,
        &pred,
        PrOptions {
            src_trees: Some(&trees),
            restrict,
        },
    )
    .map_err(data)
}

pub fn render_align_eval(scores: &AlignmentScores, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(scores).expect("scores serialize");
            s.push('\n');
            s
        }
        Format::Tsv => {
            let num =
                |x: Option<f64>| x.map_or_else(|| "undefined".to_string(), |v| format!("{:.4}", v));
            let mut out = String::from("metric\tvalue\n");
            out.push_str(&format!("precision\t{}\n", num(scores.precision)));
            out.push_str(&format!("recall\t{}\n", num(scores.recall)));
            out.push_str(&format!("gold_links\t{}\n", scores.gold_links));
            out.push_str(&format!("pred_links\t{}\n", scores.pred_links));
            out.push_str(&format!("correct\t{}\n", scores.correct));
            out.push_str("\nlabel\trecall\n");
            for (l, r) in &scores.per_label_recall {
                out.push_str(&format!("{}\t{:.4}\n", l, r));
            }
            out
        }
    }
}

/// Writes single-report output to stdout, or to `<out>/<name>` if set.
fn emit(
    config: &RunConfig,
    name: &str,
    contents: &str,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    match &config.out {
        Some(dir) => {
            fs::create_dir_all(dir)
                .map_err(|e| CliError::Data(format!("{}: {}", dir.display(), e)))?;
            write_file(
                &dir.join(format!("{}.{}", name, config.format.extension())),
                contents,
            )
        }
        None => stdout.write_all(contents.as_bytes()).map_err(data),
    }
}

fn dispatch(
    command: Command,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    match command {
        Command::Validate(flags) => {
            let config = flags.resolve()?;
            let d = cmd_validate(&config)?;
            stdout.write_all(d.render().as_bytes()).map_err(data)?;
            Ok(if d.has_fatal() { EXIT_DATA } else { EXIT_OK })
        }
        Command::Analyze(flags) => {
            let config = flags.resolve()?;
            let written = cmd_analyze(&config)?;
            writeln!(
                stderr,
                "wrote {} files to {}",
                written.len(),
                config.out.as_ref().unwrap().display()
            )
            .map_err(data)?;
            Ok(EXIT_OK)
        }
        Command::PosMatrix(flags) => {
            let config = flags.resolve()?;
            let corpus = load_clean(&config)?;
            let m = pos_confusion(&corpus.pairs, &config.content_policy());
            let (name, body) = if flags.percent {
                ("pos_percent", report::render_percent(&m, config.format))
            } else {
                ("pos_counts", report::render_counts(&m, config.format))
            };
            emit(&config, name, &body, stdout)?;
            Ok(EXIT_OK)
        }
        Command::PathMatrix(flags) => {
            let config = flags.resolve()?;
            let corpus = load_clean(&config)?;
            let m = edge_matrix(&config, &corpus);
            let (name, body) = if flags.percent {
                ("edge_percent", report::render_percent(&m, config.format))
            } else {
                ("edge_counts", report::render_counts(&m, config.format))
            };
            emit(&config, name, &body, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Entropy(flags) => {
            let config = flags.resolve()?;
            let corpus = load_clean(&config)?;
            let m = edge_matrix(&config, &corpus);
            let body = report::render_entropy(&m, config.include_unaligned, config.format);
            emit(&config, "entropy", &body, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Preservation(flags) => {
            let config = flags.resolve()?;
            let corpus = load_clean(&config)?;
            let m = edge_matrix(&config, &corpus);
            let body = match &config.scores {
                None => report::render_preservation(&m, config.format),
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| CliError::Data(format!("{}: {}", path.display(), e)))?;
                    let scores = LabeledScores::from_tsv(&text)
                        .map_err(|e| CliError::Data(format!("{}: {}", path.display(), e)))?;
                    let c = correlate_preservation(&preservation(&m), &scores).map_err(data)?;
                    report::render_correlation(&c)
                }
            };
            let name = if config.scores.is_some() {
                "correlation"
            } else {
                "preservation"
            };
            emit(&config, name, &body, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Dorr(flags) => {
            let config = flags.resolve()?;
            let corpus = load_clean(&config)?;
            let r = dorr_corpus(
                &corpus.pairs,
                &config.content_policy(),
                config.csr_options(),
                DorrOptions {
                    direction_sensitive: config.with_direction,
                },
            );
            emit(
                &config,
                "dorr",
                &report::render_dorr(&r, config.format),
                stdout,
            )?;
            Ok(EXIT_OK)
        }
        Command::AlignEval(flags) => {
            let config = flags.resolve()?;
            let scores = cmd_align_eval(&config, flags.all_links)?;
            emit(
                &config,
                "align_eval",
                &render_align_eval(&scores, config.format),
                stdout,
            )?;
            Ok(EXIT_OK)
        }
    }
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>, CliError> {
    let Ok(v) = std::env::var("CLMD_THREADS") else {
        return Ok(None);
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "CLMD_THREADS must be a positive integer, got '{}'",
            v
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(shown.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(shown.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };

    // Output is buffered so the work can run inside a dedicated pool.
    let mut out_buf = Vec::new();
    let mut err_buf = Vec::new();
    let result = thread_pool().and_then(|pool| {
        let work = || dispatch(cli.command, &mut out_buf, &mut err_buf);
        match pool {
            Some(pool) => pool.install(work),
            None => work(),
        }
    });
    let _ = stdout.write_all(&out_buf);
    let _ = stderr.write_all(&err_buf);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "clmd: {}", e.message());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("clmd").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(&[]).0, EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["validate", "--policy", "nope"]).0, EXIT_USAGE);
        let (code, _, err) = run_args(&["validate"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("src"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("path-matrix"));
    }

    #[test]
    fn missing_file_is_a_data_error() {
        let (code, _, err) = run_args(&[
            "validate",
            "--src",
            "/nonexistent/a.conllu",
            "--tgt",
            "/nonexistent/b.conllu",
            "--align",
            "/nonexistent/c.txt",
        ]);
        assert_eq!(code, EXIT_DATA);
        assert!(err.contains("/nonexistent/a.conllu"));
    }
}
