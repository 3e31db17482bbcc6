//! Threshold filtering, content/noise marking and section recommendation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::context::ExceptionContext;
use crate::dom::{Document, NodeId};
use crate::error::Error;
use crate::metrics::{DensityVariant, Label, MetricWeights, NodeMetrics, PageMetrics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Density only, context-free baseline.
    Density,
    /// Content relevance only.
    Relevance,
    /// Normalized density plus normalized relevance.
    Combined,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Density, Mode::Relevance, Mode::Combined];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Density => "density",
            Mode::Relevance => "relevance",
            Mode::Combined => "combined",
        }
    }

    fn score(&self, m: &NodeMetrics) -> f64 {
        match self {
            Mode::Density => m.ctd_norm,
            Mode::Relevance => m.ctr_norm,
            Mode::Combined => m.cts,
        }
    }

    /// Key used to pick the recommended section among the kept ones.
    fn recommend_key(&self, m: &NodeMetrics) -> f64 {
        match self {
            Mode::Density => m.ctd,
            Mode::Relevance | Mode::Combined => m.ctr,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "density" => Ok(Mode::Density),
            "relevance" => Ok(Mode::Relevance),
            "combined" => Ok(Mode::Combined),
            other => Err(Error::Usage(format!(
                "unknown mode `{other}` (expected density, relevance or combined)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub node_id: NodeId,
    pub text: String,
    pub html: String,
    pub metrics: NodeMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub mode: Mode,
    /// Body score; body children must beat it strictly to be preserved.
    pub threshold: f64,
    /// In document order.
    pub kept_sections: Vec<Section>,
    /// Node id of the recommended section, if any survived.
    pub recommended: Option<NodeId>,
    /// Label of every node, indexed by node id.
    pub labels: Vec<Label>,
}

impl ExtractionResult {
    /// True when no body child beat the threshold.
    pub fn is_empty(&self) -> bool {
        self.kept_sections.is_empty()
    }

    pub fn recommended_section(&self) -> Option<&Section> {
        let id = self.recommended?;
        self.kept_sections.iter().find(|s| s.node_id == id)
    }

    /// Kept sections, best first: raw CTR descending (CTD in density mode),
    /// ties in document order.
    pub fn ranked(&self) -> Vec<&Section> {
        let mut v: Vec<&Section> = self.kept_sections.iter().collect();
        v.sort_by(|a, b| {
            self.mode
                .recommend_key(&b.metrics)
                .total_cmp(&self.mode.recommend_key(&a.metrics))
                .then(a.node_id.cmp(&b.node_id))
        });
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("extraction results always serialize")
    }
}

/// Runs the full pipeline for `mode`. Density mode ignores `ctx`.
pub fn extract(doc: &Document, ctx: &ExceptionContext, w: &MetricWeights, mode: Mode) -> ExtractionResult {
    let page = match mode {
        Mode::Density => PageMetrics::compute(doc, &ExceptionContext::empty(), w, DensityVariant::Baseline),
        Mode::Relevance | Mode::Combined => PageMetrics::compute(doc, ctx, w, DensityVariant::Full),
    };
    extract_with_metrics(doc, &page, mode)
}

/// The context-free density extractor: plain text/link density with every
/// link counted as noise.
pub fn extract_density_only(doc: &Document, w: &MetricWeights) -> ExtractionResult {
    extract(doc, &ExceptionContext::empty(), w, Mode::Density)
}

/// Section selection over precomputed metrics.
pub fn extract_with_metrics(doc: &Document, page: &PageMetrics, mode: Mode) -> ExtractionResult {
    let score = |id: NodeId| mode.score(page.get(id));
    let body = doc.body_id();
    let threshold = score(body);
    let mut labels = vec![Label::Unlabeled; doc.len()];
    let mut kept = Vec::new();

    for &child in &doc.body().children {
        if !page.candidates[child] || score(child) <= threshold {
            labels[doc.subtree(child)].fill(Label::Noise);
            continue;
        }
        // The best-scoring inner descendant holds the section; everything
        // else under the preserved child is noise.
        let best = doc
            .subtree(child)
            .skip(1)
            .filter(|&id| page.candidates[id] && doc.is_inner(id))
            .fold(None, |acc: Option<NodeId>, id| match acc {
                Some(b) if score(b) >= score(id) => Some(b),
                _ => Some(id),
            })
            .unwrap_or(child);
        labels[doc.subtree(child)].fill(Label::Noise);
        labels[doc.subtree(best)].fill(Label::Content);
        kept.push(best);
    }
    labels[body] = Label::Content;

    let kept_sections: Vec<Section> = kept
        .into_iter()
        .map(|id| Section {
            node_id: id,
            text: doc.text(id),
            html: doc.outer_html(id),
            metrics: NodeMetrics {
                label: Label::Content,
                ..*page.get(id)
            },
        })
        .collect();
    let recommended = kept_sections
        .iter()
        .fold(None, |acc: Option<&Section>, s| match acc {
            Some(b) if mode.recommend_key(&b.metrics) >= mode.recommend_key(&s.metrics) => Some(b),
            _ => Some(s),
        })
        .map(|s| s.node_id);

    ExtractionResult {
        mode,
        threshold,
        kept_sections,
        recommended,
        labels,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Html,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "text" => Ok(Format::Text),
            "html" => Ok(Format::Html),
            "json" => Ok(Format::Json),
            other => Err(Error::Usage(format!(
                "unknown format `{other}` (expected text, html or json)"
            ))),
        }
    }
}

#[derive(Serialize)]
struct SectionJson<'a> {
    node_id: NodeId,
    text: &'a str,
    html: &'a str,
    metrics: &'a NodeMetrics,
}

pub fn render_section(section: &Section, format: Format) -> Vec<u8> {
    match format {
        Format::Text => section.text.clone().into_bytes(),
        Format::Html => section.html.clone().into_bytes(),
        Format::Json => {
            let j = SectionJson {
                node_id: section.node_id,
                text: &section.text,
                html: &section.html,
                metrics: &section.metrics,
            };
            serde_json::to_vec_pretty(&j).expect("sections always serialize")
        }
    }
}
