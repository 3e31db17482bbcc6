//! Word-LCS precision/recall/F1 scoring and corpus evaluation.
//!
//! A corpus is a directory of cases:
//!
//! ```text
//! <corpus>/<case_id>/page.html
//! <corpus>/<case_id>/context.json   {"trace": "...", "code": "..."}
//! <corpus>/<case_id>/gold.txt
//! <corpus>/<case_id>/meta.json      optional, {"group": "so"}
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::ContextFile;
use crate::dom::parse_html;
use crate::error::{Error, Result};
use crate::extract::{extract, Mode};
use crate::metrics::MetricWeights;
use crate::tokenize::lcs_length;

/// Default cap on words per side before LCS scoring.
pub const DEFAULT_WORD_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self { precision, recall, f1 }
    }
}

/// Lowercased words with punctuation trimmed from their edges.
pub fn normalize_words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

pub fn word_lcs(a: &[String], b: &[String]) -> usize {
    lcs_length(a, b)
}

pub fn score_case(extracted_text: &str, gold_text: &str) -> Prf {
    score_case_capped(extracted_text, gold_text, DEFAULT_WORD_CAP)
}

pub fn score_case_capped(extracted_text: &str, gold_text: &str, word_cap: usize) -> Prf {
    let cap = |mut words: Vec<String>, which: &str| {
        if words.len() > word_cap {
            log::warn!("{which} text truncated from {} to {word_cap} words", words.len());
            words.truncate(word_cap);
        }
        words
    };
    let a = cap(normalize_words(extracted_text), "extracted");
    let b = cap(normalize_words(gold_text), "gold");
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return Prf::from_pr(1.0, 1.0),
        (true, false) | (false, true) => return Prf::default(),
        _ => {}
    }
    let l = word_lcs(&a, &b) as f64;
    Prf::from_pr(l / a.len() as f64, l / b.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusCase {
    pub case_id: String,
    pub page_path: PathBuf,
    pub context_path: PathBuf,
    pub gold_path: PathBuf,
    pub group: Option<String>,
}

#[derive(Deserialize)]
struct CaseMeta {
    group: Option<String>,
}

/// Lists the cases of a corpus, sorted by id, or reports every malformed one.
pub fn discover_corpus(dir: &Path) -> Result<Vec<CorpusCase>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();

    let mut cases = Vec::new();
    let mut problems = Vec::new();
    for d in dirs {
        let case_id = d.file_name().unwrap_or_default().to_string_lossy().into_owned();
        let page_path = d.join("page.html");
        let context_path = d.join("context.json");
        let gold_path = d.join("gold.txt");
        let mut missing = Vec::new();
        for p in [&page_path, &context_path, &gold_path] {
            match std::fs::metadata(p) {
                Ok(m) if m.is_file() && m.len() > 0 => {}
                Ok(_) => missing.push(format!("{} is empty", p.file_name().unwrap().to_string_lossy())),
                Err(_) => missing.push(format!("{} missing", p.file_name().unwrap().to_string_lossy())),
            }
        }
        let meta_path = d.join("meta.json");
        let mut group = None;
        if meta_path.exists() {
            match std::fs::read_to_string(&meta_path)
                .map_err(|e| e.to_string())
                .and_then(|s| serde_json::from_str::<CaseMeta>(&s).map_err(|e| e.to_string()))
            {
                Ok(meta) => group = meta.group,
                Err(e) => missing.push(format!("meta.json unreadable: {e}")),
            }
        }
        if missing.is_empty() {
            cases.push(CorpusCase {
                case_id,
                page_path,
                context_path,
                gold_path,
                group,
            });
        } else {
            problems.push(format!("{case_id}: {}", missing.join(", ")));
        }
    }
    if !problems.is_empty() {
        return Err(Error::CorpusLayout { problems });
    }
    if cases.is_empty() {
        return Err(Error::CorpusLayout {
            problems: vec![format!("{}: no cases found", dir.display())],
        });
    }
    Ok(cases)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRow {
    pub case_id: String,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// No section survived the threshold.
    pub empty_result: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeMeans {
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub cases: usize,
    pub mp: f64,
    pub mr: f64,
    pub mf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub modes: Vec<Mode>,
    pub weights: MetricWeights,
    pub per_case: Vec<CaseRow>,
    pub means: Vec<ModeMeans>,
    pub group_means: Vec<ModeMeans>,
}

impl EvalReport {
    pub fn means_for(&self, mode: Mode) -> Option<&ModeMeans> {
        self.means.iter().find(|m| m.mode == mode)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseRow> {
        self.per_case.iter().filter(|r| r.error.is_some())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    pub weights: MetricWeights,
    /// Worker threads; 0 means available parallelism.
    pub workers: usize,
    pub word_cap: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            weights: MetricWeights::default(),
            workers: 0,
            word_cap: DEFAULT_WORD_CAP,
        }
    }
}

pub fn run_corpus(corpus_dir: &Path, modes: &[Mode], opts: &EvalOptions) -> Result<EvalReport> {
    if modes.is_empty() {
        return Err(Error::Usage("at least one mode is required".into()));
    }
    let cases = discover_corpus(corpus_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
    let per_case: Vec<Vec<CaseRow>> =
        pool.install(|| cases.par_iter().map(|case| evaluate_case(case, modes, opts)).collect());
    let per_case: Vec<CaseRow> = per_case.into_iter().flatten().collect();

    let mut means = Vec::new();
    let mut group_means = Vec::new();
    let mut groups: Vec<String> = cases.iter().filter_map(|c| c.group.clone()).collect();
    groups.sort();
    groups.dedup();
    for &mode in modes {
        means.push(mean_rows(mode, None, per_case.iter().filter(|r| r.mode == mode)));
        for g in &groups {
            group_means.push(mean_rows(
                mode,
                Some(g.clone()),
                per_case
                    .iter()
                    .filter(|r| r.mode == mode && r.group.as_deref() == Some(g.as_str())),
            ));
        }
    }
    Ok(EvalReport {
        modes: modes.to_vec(),
        weights: opts.weights,
        per_case,
        means,
        group_means,
    })
}

fn mean_rows<'a>(mode: Mode, group: Option<String>, rows: impl Iterator<Item = &'a CaseRow>) -> ModeMeans {
    let (mut n, mut p, mut r, mut f) = (0usize, 0.0, 0.0, 0.0);
    for row in rows {
        n += 1;
        p += row.precision;
        r += row.recall;
        f += row.f1;
    }
    let d = n.max(1) as f64;
    ModeMeans {
        mode,
        group,
        cases: n,
        mp: p / d,
        mr: r / d,
        mf: f / d,
    }
}

fn evaluate_case(case: &CorpusCase, modes: &[Mode], opts: &EvalOptions) -> Vec<CaseRow> {
    let row = |mode: Mode, prf: Prf, empty_result: bool, error: Option<String>| CaseRow {
        case_id: case.case_id.clone(),
        mode,
        group: case.group.clone(),
        precision: prf.precision,
        recall: prf.recall,
        f1: prf.f1,
        empty_result,
        error,
    };
    let loaded = (|| -> Result<_> {
        let bytes = std::fs::read(&case.page_path).map_err(|e| Error::io(&case.page_path, e))?;
        let doc = parse_html(&bytes, None)?;
        let ctx = ContextFile::load(&case.context_path)?.build()?;
        let gold = std::fs::read_to_string(&case.gold_path).map_err(|e| Error::io(&case.gold_path, e))?;
        Ok((doc, ctx, gold))
    })();
    match loaded {
        Err(e) => {
            log::warn!("case {} failed: {e}", case.case_id);
            modes
                .iter()
                .map(|&m| row(m, Prf::default(), false, Some(e.to_string())))
                .collect()
        }
        Ok((doc, ctx, gold)) => modes
            .iter()
            .map(|&mode| {
                let result = extract(&doc, &ctx, &opts.weights, mode);
                match result.recommended_section() {
                    Some(s) => row(mode, score_case_capped(&s.text, &gold, opts.word_cap), false, None),
                    None => row(mode, Prf::default(), true, None),
                }
            })
            .collect(),
    }
}

/// Side-by-side means per mode, with deltas against the first mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeComparison {
    pub rows: Vec<ModeMeans>,
    pub baseline: Mode,
}

pub fn compare_modes(report: &EvalReport) -> Result<ModeComparison> {
    if report.means.len() < 2 {
        return Err(Error::Usage("need ≥2 modes to compare".into()));
    }
    Ok(ModeComparison {
        rows: report.means.clone(),
        baseline: report.means[0].mode,
    })
}

impl fmt::Display for ModeComparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = &self.rows[0];
        writeln!(
            f,
            "{:<10} {:>8} {:>8} {:>8}   {:>9} {:>9} {:>9}",
            "mode", "MP", "MR", "MF", "dMP", "dMR", "dMF"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<10} {:>7.2}% {:>7.2}% {:>7.2}%   {:>+8.2}% {:>+8.2}% {:>+8.2}%",
                r.mode.as_str(),
                r.mp * 100.0,
                r.mr * 100.0,
                r.mf * 100.0,
                (r.mp - base.mp) * 100.0,
                (r.mr - base.mr) * 100.0,
                (r.mf - base.mf) * 100.0,
            )?;
        }
        write!(f, "deltas relative to {}", self.baseline)
    }
}

/// Plain-text summary: one block per mode with overall and per-group means.
pub fn summary_table(report: &EvalReport) -> String {
    let mut groups: Vec<&str> = report.group_means.iter().filter_map(|m| m.group.as_deref()).collect();
    groups.sort_unstable();
    groups.dedup();
    let mut out = String::new();
    let mut header = format!("{:<10} {:<6}", "mode", "metric");
    for g in &groups {
        header.push_str(&format!(" {:>10}", g));
    }
    header.push_str(&format!(" {:>10}\n", "all"));
    out.push_str(&header);
    for m in &report.means {
        for (name, get) in [
            ("MP", (|x: &ModeMeans| x.mp) as fn(&ModeMeans) -> f64),
            ("MR", |x: &ModeMeans| x.mr),
            ("MF", |x: &ModeMeans| x.mf),
        ] {
            out.push_str(&format!("{:<10} {:<6}", m.mode.as_str(), name));
            for g in &groups {
                let v = report
                    .group_means
                    .iter()
                    .find(|x| x.mode == m.mode && x.group.as_deref() == Some(g))
                    .map(get)
                    .unwrap_or(0.0);
                out.push_str(&format!(" {:>9.2}%", v * 100.0));
            }
            out.push_str(&format!(" {:>9.2}%\n", get(m) * 100.0));
        }
    }
    out
}
