use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clmd::conllu::{write_conllu, Sentence, Token};
use tempfile::TempDir;

fn clmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clmd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Self {
        Files {
            dir: TempDir::new().unwrap(),
        }
    }

    fn write(&self, name: &str, contents: &str) -> String {
        let p = self.dir.path().join(name);
        fs::write(&p, contents).unwrap();
        p.display().to_string()
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

/// root verb with `n - 1` dependents alternating nsubj/obj/obl.
fn clause(id: &str, n: usize) -> Sentence {
    let rels = ["nsubj", "obj", "obl"];
    let toks = (1..=n)
        .map(|i| {
            if i == 1 {
                Token::new(1, "v", "VERB", 0, "root")
            } else {
                Token::new(i, &format!("n{i}"), "NOUN", 1, rels[i % 3])
            }
        })
        .collect();
    Sentence::from_tokens(Some(id), toks)
}

fn identity_line(n: usize) -> String {
    (1..=n)
        .map(|i| format!("{i}-{i}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Writes an identity corpus and returns the three path strings.
fn identity_corpus(f: &Files, sizes: &[usize]) -> (String, String, String) {
    let sents: Vec<Sentence> = sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| clause(&format!("s{i}"), n))
        .collect();
    let text = write_conllu(&sents);
    let align: String = sizes.iter().map(|&n| identity_line(n) + "\n").collect();
    (
        f.write("src.conllu", &text),
        f.write("tgt.conllu", &text),
        f.write("align.txt", &align),
    )
}

fn toy(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data/toy")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn validate_clean_corpus() {
    let f = Files::new();
    let (s, t, a) = identity_corpus(&f, &[3, 4, 5]);
    let o = clmd(&["validate", "--src", &s, "--tgt", &t, "--align", &a]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "3 pairs, 0 issues\n");
}

#[test]
fn validate_reports_count_mismatch() {
    let f = Files::new();
    let (s, t, _) = identity_corpus(&f, &[3, 4, 5]);
    let a = f.write("short.txt", "1-1\n2-2\n");
    let o = clmd(&["validate", "--src", &s, "--tgt", &t, "--align", &a]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("fatal: alignment has 2 lines but the source has 3 sentences"));
}

#[test]
fn validate_flags_out_of_range_index() {
    let f = Files::new();
    let (s, t, _) = identity_corpus(&f, &[7, 7]);
    let a = f.write("bad.txt", &format!("{}\n1-1 99-2\n", identity_line(7)));
    let o = clmd(&["validate", "--src", &s, "--tgt", &t, "--align", &a]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.contains("pair 2 (alignment line 2)"), "{out}");
    assert!(out.contains("99-2"), "{out}");
}

#[test]
fn analysis_commands_refuse_fatal_input() {
    let f = Files::new();
    let (s, t, _) = identity_corpus(&f, &[3, 4]);
    let a = f.write("short.txt", "1-1\n");
    let o = clmd(&["path-matrix", "--src", &s, "--tgt", &t, "--align", &a]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("fatal"));
}

#[test]
fn analyze_relcl_records_other_path() {
    let f = Files::new();
    let out = f.path("report");
    let o = clmd(&[
        "analyze",
        "--src",
        &toy("src.conllu"),
        "--tgt",
        &toy("tgt.conllu"),
        "--align",
        &toy("align.txt"),
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("edge_counts.json")).unwrap()).unwrap();
    let nmod = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["label"] == "nmod")
        .unwrap();
    assert_eq!(nmod["other_paths"]["acl+nsubj"], 1);
    assert_eq!(nmod["mcop"], "acl+nsubj");
}

#[test]
fn identity_corpus_has_zero_entropy_and_full_preservation() {
    let f = Files::new();
    let (s, t, a) = identity_corpus(&f, &[3, 4, 5, 6, 7]);
    let out = f.path("report");
    let o = clmd(&[
        "analyze",
        "--src",
        &s,
        "--tgt",
        &t,
        "--align",
        &a,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let entropy = fs::read_to_string(out.join("entropy.tsv")).unwrap();
    let observed: Vec<&str> = entropy
        .lines()
        .skip(1)
        .filter(|l| !l.contains("\tNA\t"))
        .collect();
    assert_eq!(observed.len(), 3);
    for line in observed {
        assert_eq!(line.split('\t').nth(1), Some("0.0000"), "{line}");
    }
    let pres = fs::read_to_string(out.join("preservation.tsv")).unwrap();
    for line in pres.lines().skip(1) {
        assert_eq!(line.split('\t').nth(1), Some("1.0000"), "{line}");
    }
}

#[test]
fn analyze_is_byte_deterministic() {
    let f = Files::new();
    let run = |dir: &str| {
        let out = f.path(dir);
        let o = clmd(&[
            "analyze",
            "--src",
            &toy("src.conllu"),
            "--tgt",
            &toy("tgt.conllu"),
            "--align",
            &toy("align.txt"),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        out
    };
    let (a, b) = (run("a"), run("b"));
    let mut names: Vec<_> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 10);
    for n in names {
        let x = fs::read(a.join(&n)).unwrap();
        assert_eq!(x, fs::read(b.join(&n)).unwrap(), "{:?}", n);
        assert!(!x.contains(&b'\r'));
    }
}

fn align_eval(pred_line: &str) -> Output {
    let f = Files::new();
    let src = f.write("src.conllu", &write_conllu(&[clause("s", 10)]));
    let gold = f.write("gold.txt", &format!("{}\n", identity_line(10)));
    let pred = f.write("pred.txt", &format!("{pred_line}\n"));
    clmd(&[
        "align-eval",
        "--src",
        &src,
        "--align",
        &gold,
        "--pred",
        &pred,
    ])
}

#[test]
fn align_eval_cases() {
    let o = align_eval(&identity_line(10));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("metric\tvalue\nprecision\t1.0000\nrecall\t1.0000\n"));

    let o = align_eval("");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("metric\tvalue\nprecision\tundefined\nrecall\t0.0000\n"));

    // 4 of 10 gold links kept, 1 wrong link added.
    let o = align_eval("1-1 2-2 3-3 4-4 5-6");
    assert!(stdout(&o).starts_with("metric\tvalue\nprecision\t0.8000\nrecall\t0.4000\n"));
}

#[test]
fn align_eval_count_mismatch_is_fatal() {
    let f = Files::new();
    let src = f.write("src.conllu", &write_conllu(&[clause("s", 3)]));
    let gold = f.write("gold.txt", "1-1\n");
    let pred = f.write("pred.txt", "1-1\n2-2\n");
    let o = clmd(&[
        "align-eval",
        "--src",
        &src,
        "--align",
        &gold,
        "--pred",
        &pred,
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let f = Files::new();
    let cfg = f.write(
        "run.cfg",
        &format!(
            "# toy run\nsrc = {}\ntgt = {}\nalign = {}\nformat = json\nrows = nmod\ncols = nmod\n",
            toy("src.conllu"),
            toy("tgt.conllu"),
            toy("align.txt")
        ),
    );
    let o = clmd(&["path-matrix", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).trim_start().starts_with('{'));

    let o = clmd(&["path-matrix", "--config", &cfg, "--format", "tsv"]);
    assert_eq!(
        stdout(&o),
        "label\tnmod\tCollapsed\tOther\tMCOP\tMCOP#\tTotal\nnmod\t0\t0\t1\tacl+nsubj\t1\t1\n"
    );

    let o = clmd(&[
        "path-matrix",
        "--config",
        &cfg,
        "--keep-subtypes",
        "--format",
        "tsv",
    ]);
    assert!(stdout(&o).contains("acl:relcl+nsubj"));
}

#[test]
fn usage_errors() {
    assert_eq!(clmd(&[]).status.code(), Some(1));
    assert_eq!(clmd(&["analyze", "--bogus"]).status.code(), Some(1));
    let f = Files::new();
    let cfg = f.write("bad.cfg", "colour = blue\n");
    assert_eq!(clmd(&["validate", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn thread_cap_is_honoured_and_checked() {
    let args = [
        "dorr",
        "--src",
        &toy("src.conllu"),
        "--tgt",
        &toy("tgt.conllu"),
        "--align",
        &toy("align.txt"),
    ];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_clmd"))
            .args(args)
            .env("CLMD_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(stdout(&one), stdout(&run("4")));
    assert!(stdout(&one).contains("Conflational\t1\n"));
    assert_eq!(run("zero").status.code(), Some(1));
}

#[test]
fn preservation_correlates_with_scores() {
    let f = Files::new();
    let scores = f.write(
        "scores.tsv",
        "label\tf1\nnsubj\t0.9\nobj\t0.5\nobl\t0.7\nnmod\t0.1\n",
    );
    let o = clmd(&[
        "preservation",
        "--src",
        &toy("src.conllu"),
        "--tgt",
        &toy("tgt.conllu"),
        "--align",
        &toy("align.txt"),
        "--scores",
        &scores,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 4);
    assert!(v["rho"].as_f64().unwrap().abs() <= 1.0);
}
