//! Per-node density, relevance and content-score metrics.
//!
//! Densities (TD, LD, CD) are text characters per tag. They are folded into a
//! log-based content density (CTD) that rewards link-free and code-bearing
//! nodes. Relevance combines text relevance (TR, cosine against the exception
//! context) with code relevance (CR, best match among the node's code blocks)
//! into CTR. CTD and CTR are min-max normalized per page and summed with
//! weights into the content score (CTS).

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::context::{looks_like_stack_trace, parse_stack_trace, trace_tokens, ExceptionContext, FrameScope};
use crate::dom::{Document, NodeCounts, NodeId};
use crate::error::{Error, Result};
use crate::tokenize::{cosine, lcs_length, token_sequence, tokenize_text, TokenBag};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricWeights {
    /// Text relevance weight.
    pub alpha: f64,
    /// Code relevance weight.
    pub beta: f64,
    /// Content density weight.
    pub gamma: f64,
    /// Content relevance weight.
    pub delta: f64,
    /// Minimum link-text relevance for a link to count as legitimate text.
    pub eta: f64,
}

impl Default for MetricWeights {
    fn default() -> Self {
        Self {
            alpha: 1.00,
            beta: 0.59,
            gamma: 1.00,
            delta: 1.00,
            eta: 0.75,
        }
    }
}

impl MetricWeights {
    /// Parses `key=value` lines (`alpha`, `beta`, `gamma`, `delta`, `eta`).
    /// Blank lines and `#` comments are ignored; missing keys keep defaults.
    pub fn parse_config(text: &str) -> Result<Self> {
        let mut w = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("line {}: `{}` is not a number", lineno + 1, value.trim())))?;
            let slot = match key.trim() {
                "alpha" => &mut w.alpha,
                "beta" => &mut w.beta,
                "gamma" => &mut w.gamma,
                "delta" => &mut w.delta,
                "eta" => &mut w.eta,
                other => return Err(Error::Config(format!("line {}: unknown key `{other}`", lineno + 1))),
            };
            *slot = value;
        }
        w.validate()?;
        Ok(w)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_config(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("delta", self.delta),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} must be a non-negative number")));
            }
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::Config("eta must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkVerdict {
    Legitimate,
    Noise,
}

/// A link is legitimate text when its own text is at least `eta`-similar to
/// the exception context.
pub fn link_legitimacy(doc: &Document, link: NodeId, context: &TokenBag, eta: f64) -> LinkVerdict {
    let sim = cosine(&tokenize_text(&doc.text(link)), context);
    if sim >= eta {
        LinkVerdict::Legitimate
    } else {
        LinkVerdict::Noise
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    #[default]
    Unlabeled,
    Content,
    Noise,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NodeMetrics {
    pub node_id: NodeId,
    pub counts: NodeCounts,
    pub td: f64,
    pub ld: f64,
    pub cd: f64,
    pub ctd: f64,
    pub tr: f64,
    pub cr: f64,
    pub ctr: f64,
    pub ctd_norm: f64,
    pub ctr_norm: f64,
    pub cts: f64,
    pub label: Label,
}

/// Which density formulation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityVariant {
    /// Code density included; context-relevant links are exempt from LC.
    #[default]
    Full,
    /// Plain text/link composite: CD term zeroed, every link is noise, and
    /// relevance is not computed.
    Baseline,
}

/// Composite content density of one node given its densities and the body's.
/// Zero denominators are replaced by 1; a node without text scores 0.
pub fn content_density(td: f64, ld: f64, cd: f64, td_body: f64, ld_body: f64) -> f64 {
    if td <= 0.0 {
        return 0.0;
    }
    let nz = |x: f64| if x == 0.0 { 1.0 } else { x };
    let non_link = td - ld;
    let code_ratio = cd / nz(td);
    let prefactor = td + code_ratio;
    let shift = td * ld / nz(non_link) + ld_body * td / nz(td_body);
    // ln(ln(shift + e)) computed as ln_1p(ln_1p(shift / e)) so that a zero
    // shift yields exactly zero instead of a rounding residue.
    let log_of_base = (shift / std::f64::consts::E).ln_1p().ln_1p();
    let argument = td / nz(ld) + code_ratio;
    prefactor * argument.ln() / nz(log_of_base)
}

pub fn content_relevance(tr: f64, cr: f64, w: &MetricWeights) -> f64 {
    w.alpha * tr + w.beta * cr
}

/// Cosine between the non-code text of the subtree and the context bag.
pub fn text_relevance(doc: &Document, id: NodeId, context: &TokenBag) -> f64 {
    let in_code = doc.in_code_flags();
    let excluded = doc.excluded_flags();
    let mut bag = TokenBag::new();
    for n in doc.subtree(id) {
        if !in_code[n] && !excluded[n] {
            bag.merge(&tokenize_text(&doc.node(n).own_text));
        }
    }
    cosine(&bag, context)
}

/// Relevance of one code block: trace-token cosine for stack traces,
/// LCS coverage of the context code otherwise.
pub fn code_block_relevance(text: &str, ctx: &ExceptionContext) -> f64 {
    if looks_like_stack_trace(text) {
        return match parse_stack_trace(text) {
            Ok(trace) => {
                let bag: TokenBag = trace_tokens(&trace, FrameScope::default()).into_iter().collect();
                cosine(&bag, &ctx.trace_bag)
            }
            Err(_) => 0.0,
        };
    }
    if ctx.code_sequence.is_empty() {
        return 0.0;
    }
    let seq = token_sequence(text);
    lcs_length(&seq, &ctx.code_sequence) as f64 / ctx.code_sequence.len() as f64
}

/// Maximum code-block relevance over the code elements in the subtree.
pub fn code_relevance(doc: &Document, id: NodeId, ctx: &ExceptionContext) -> f64 {
    let excluded = doc.excluded_flags();
    doc.subtree(id)
        .filter(|&n| !excluded[n] && doc.node(n).class().is_code_element)
        .map(|n| code_block_relevance(&doc.raw_text(n), ctx))
        .fold(0.0, f64::max)
}

/// Metrics for every node of one page.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageMetrics {
    pub nodes: Vec<NodeMetrics>,
    pub body: NodeId,
    /// Nodes inside the body that take part in normalization and selection.
    pub candidates: Vec<bool>,
    pub variant: DensityVariant,
}

impl PageMetrics {
    pub fn compute(doc: &Document, ctx: &ExceptionContext, w: &MetricWeights, variant: DensityVariant) -> Self {
        let mut page = Self::compute_raw(doc, ctx, w, variant);
        page.normalize(w);
        page
    }

    /// Densities and relevances without normalization.
    pub fn compute_raw(doc: &Document, ctx: &ExceptionContext, w: &MetricWeights, variant: DensityVariant) -> Self {
        let counts = match variant {
            DensityVariant::Full => {
                doc.all_counts(|link| link_legitimacy(doc, link, &ctx.combined, w.eta) == LinkVerdict::Noise)
            }
            DensityVariant::Baseline => doc.all_counts(|_| true),
        };
        let excluded = doc.excluded_flags();
        let body = doc.body_id();
        let body_range = doc.subtree(body);
        let candidates: Vec<bool> = (0..doc.len())
            .map(|i| body_range.contains(&i) && !excluded[i])
            .collect();

        let density = |c: &NodeCounts| {
            let t = c.tags.max(1) as f64;
            (c.chars as f64 / t, c.link_chars as f64 / t, c.code_chars as f64 / t)
        };
        let (td_b, ld_b, _) = density(&counts[body]);

        let (tr, cr) = match variant {
            DensityVariant::Full if !ctx.is_empty() => relevance_bottom_up(doc, ctx, &excluded),
            _ => (vec![0.0; doc.len()], vec![0.0; doc.len()]),
        };

        let nodes = (0..doc.len())
            .map(|i| {
                let c = counts[i];
                let (td, ld, cd) = density(&c);
                let cd_term = match variant {
                    DensityVariant::Full => cd,
                    DensityVariant::Baseline => 0.0,
                };
                NodeMetrics {
                    node_id: i,
                    counts: c,
                    td,
                    ld,
                    cd,
                    ctd: if excluded[i] {
                        0.0
                    } else {
                        content_density(td, ld, cd_term, td_b, ld_b)
                    },
                    tr: tr[i],
                    cr: cr[i],
                    ctr: content_relevance(tr[i], cr[i], w),
                    ..NodeMetrics::default()
                }
            })
            .collect();
        Self {
            nodes,
            body,
            candidates,
            variant,
        }
    }

    /// Min-max normalizes CTD and CTR over the candidate nodes and derives
    /// CTS. A constant column normalizes to 0.
    pub fn normalize(&mut self, w: &MetricWeights) {
        let range = |f: fn(&NodeMetrics) -> f64| {
            self.nodes
                .iter()
                .filter(|m| self.candidates[m.node_id])
                .map(f)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
        };
        let (ctd_lo, ctd_hi) = range(|m| m.ctd);
        let (ctr_lo, ctr_hi) = range(|m| m.ctr);
        let scale = |v: f64, lo: f64, hi: f64| {
            if hi > lo {
                ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
            } else {
                0.0
            }
        };
        for m in &mut self.nodes {
            if self.candidates[m.node_id] {
                m.ctd_norm = scale(m.ctd, ctd_lo, ctd_hi);
                m.ctr_norm = scale(m.ctr, ctr_lo, ctr_hi);
            } else {
                m.ctd_norm = 0.0;
                m.ctr_norm = 0.0;
            }
            m.cts = content_score(m.ctd_norm, m.ctr_norm, w);
        }
    }

    /// Multiplies every raw CTR by `factor`; call [`normalize`](Self::normalize) afterwards.
    pub fn scale_relevance(&mut self, factor: f64) {
        for m in &mut self.nodes {
            m.ctr *= factor;
        }
    }

    pub fn get(&self, id: NodeId) -> &NodeMetrics {
        &self.nodes[id]
    }

    pub fn body_metrics(&self) -> &NodeMetrics {
        &self.nodes[self.body]
    }
}

pub fn content_score(ctd_norm: f64, ctr_norm: f64, w: &MetricWeights) -> f64 {
    w.gamma * ctd_norm + w.delta * ctr_norm
}

/// TR and CR for every node in one post-order pass.
fn relevance_bottom_up(doc: &Document, ctx: &ExceptionContext, excluded: &[bool]) -> (Vec<f64>, Vec<f64>) {
    let n = doc.len();
    let in_code = doc.in_code_flags();
    let mut tr = vec![0.0; n];
    let mut cr = vec![0.0; n];
    let mut bags: Vec<Option<HashMap<String, u32>>> = vec![None; n];
    for node in doc.nodes().iter().rev() {
        let id = node.node_id;
        if excluded[id] {
            continue;
        }
        let mut bag: HashMap<String, u32> = HashMap::new();
        if !in_code[id] {
            for t in token_sequence(&node.own_text) {
                *bag.entry(t).or_insert(0) += 1;
            }
        }
        let mut best_code: f64 = 0.0;
        for &child in &node.children {
            best_code = best_code.max(cr[child]);
            if let Some(child_bag) = bags[child].take() {
                if bag.len() < child_bag.len() {
                    let small = std::mem::replace(&mut bag, child_bag);
                    merge_into(&mut bag, small);
                } else {
                    merge_into(&mut bag, child_bag);
                }
            }
        }
        if node.class().is_code_element {
            best_code = best_code.max(code_block_relevance(&doc.raw_text(id), ctx));
        }
        cr[id] = best_code;
        tr[id] = cosine_map(&bag, &ctx.combined);
        bags[id] = Some(bag);
    }
    (tr, cr)
}

fn merge_into(dst: &mut HashMap<String, u32>, src: HashMap<String, u32>) {
    for (t, c) in src {
        *dst.entry(t).or_insert(0) += c;
    }
}

fn cosine_map(a: &HashMap<String, u32>, b: &TokenBag) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let dot: f64 = b
        .iter()
        .map(|(t, n)| f64::from(n) * f64::from(a.get(t).copied().unwrap_or(0)))
        .sum();
    if dot == 0.0 {
        return 0.0;
    }
    let na = a.values().map(|&c| f64::from(c) * f64::from(c)).sum::<f64>().sqrt();
    let nb = b.iter().map(|(_, c)| f64::from(c) * f64::from(c)).sum::<f64>().sqrt();
    (dot / (na * nb)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::build_context;
    use crate::dom::parse_str;

    const TRACE: &str = "Exception in thread \"main\" java.io.EOFException\n\
        at java.io.ObjectInputStream$PeekInputStream.readFully(ObjectInputStream.java:2325)\n\
        at java.io.ObjectInputStream$BlockDataInputStream.readShort(ObjectInputStream.java:2794)\n\
        at java.io.ObjectInputStream.readStreamHeader(ObjectInputStream.java:801)\n\
        at java.io.ObjectInputStream.<init>(ObjectInputStream.java:299)\n\
        at core.MyEOFTest.main(MyEOFTest.java:40)";

    const CODE: &str = "FileInputStream fis = new FileInputStream(file);\n\
        ObjectInputStream ois = new ObjectInputStream(fis);\n\
        ArrayList<Record> currentList = new ArrayList<>();\n\
        int size = ois.readInt();\n\
        for (int i = 0; i < size; i++) {\n\
        Record current = (Record) ois.readObject();\n\
        currentList.add(current); }";

    fn find(d: &Document, tag: &str) -> NodeId {
        d.nodes().iter().find(|n| n.tag_name == tag).unwrap().node_id
    }

    #[test]
    fn defaults() {
        let w = MetricWeights::default();
        assert_eq!((w.alpha, w.beta, w.gamma, w.delta, w.eta), (1.0, 0.59, 1.0, 1.0, 0.75));
    }

    #[test]
    fn config_parsing() {
        let w = MetricWeights::parse_config("# weights\nalpha = 0.5\n\nbeta=1\neta=0.2 # gate\n").unwrap();
        assert_eq!((w.alpha, w.beta, w.gamma, w.eta), (0.5, 1.0, 1.0, 0.2));
        assert!(MetricWeights::parse_config("zeta=1").is_err());
        assert!(MetricWeights::parse_config("alpha").is_err());
        assert!(MetricWeights::parse_config("alpha=x").is_err());
        assert!(MetricWeights::parse_config("eta=1.5").is_err());
        assert!(MetricWeights::parse_config("beta=-1").is_err());
    }

    #[test]
    fn text_density_example() {
        let d = parse_str(&format!(
            "<div><p>{}</p><p>{}</p></div>",
            "a".repeat(40),
            "b".repeat(50)
        ))
        .unwrap();
        let page = PageMetrics::compute(
            &d,
            &ExceptionContext::empty(),
            &MetricWeights::default(),
            DensityVariant::Full,
        );
        let div = page.get(find(&d, "div"));
        assert_eq!(div.counts.chars, 90);
        assert_eq!(div.counts.tags, 3);
        assert_eq!(div.td, 30.0);
    }

    #[test]
    fn content_density_is_finite_on_edge_cases() {
        for &(td, ld, cd, tdb, ldb) in &[
            (0.0, 0.0, 0.0, 0.0, 0.0),
            (5.0, 5.0, 0.0, 5.0, 5.0),
            (5.0, 0.0, 0.0, 5.0, 0.0),
            (0.25, 0.0, 0.25, 10.0, 0.0),
            (1e-9, 0.0, 0.0, 1e9, 1e9),
        ] {
            let v = content_density(td, ld, cd, tdb, ldb);
            assert!(v.is_finite(), "{td} {ld} {cd} {tdb} {ldb} -> {v}");
        }
    }

    #[test]
    fn content_density_all_link_node() {
        // TD = LD = 8, body TD = 20, LD_b = 4: non-link density is 0 and is
        // smoothed to 1.
        let (td, ld, tdb, ldb) = (8.0f64, 8.0f64, 20.0f64, 4.0f64);
        let shift = td * ld / 1.0 + ldb * td / tdb;
        let expected = td * (td / ld).ln() / (shift + std::f64::consts::E).ln().ln();
        assert_eq!(expected, 0.0);
        assert_eq!(content_density(td, ld, 0.0, tdb, ldb), 0.0);
        // With code text the argument exceeds 1 and the value is positive.
        let v = content_density(8.0, 8.0, 4.0, tdb, ldb);
        let code_ratio: f64 = 0.5;
        let expected = (8.0 + code_ratio) * (1.0 + code_ratio).ln() / (64.0f64 + 1.6 + std::f64::consts::E).ln().ln();
        assert!((v - expected).abs() < 1e-12, "{v} vs {expected}");
    }

    #[test]
    fn content_relevance_weights() {
        let w = MetricWeights::default();
        assert_eq!(content_relevance(0.0, 0.0, &w), 0.0);
        assert!((content_relevance(1.0, 1.0, &w) - 1.59).abs() < 1e-12);
        assert!((content_relevance(0.83, 0.84, &w) - 1.3256).abs() < 1e-12);
    }

    #[test]
    fn link_gate() {
        let d = parse_str("<a>java.io.EOFException readFully</a>").unwrap();
        let a = find(&d, "a");
        let ctx = build_context(TRACE, Some(CODE)).unwrap();
        let sim = cosine(&tokenize_text("java.io.EOFException readFully"), &ctx.combined);
        let verdict = link_legitimacy(&d, a, &ctx.combined, 0.75);
        assert_eq!(verdict == LinkVerdict::Legitimate, sim >= 0.75);
        assert_eq!(link_legitimacy(&d, a, &TokenBag::new(), 0.75), LinkVerdict::Noise);
        assert_eq!(
            link_legitimacy(&d, a, &tokenize_text("java.io.EOFException readFully"), 0.75),
            LinkVerdict::Legitimate
        );
    }

    #[test]
    fn relevance_examples() {
        let ctx = build_context(TRACE, Some(CODE)).unwrap();
        let d = parse_str(&format!(
            "<div id=q><p>EOFException when calling readInt</p><pre>{}</pre></div><div id=n><p>weather sports news</p></div>",
            TRACE.replace('<', "&lt;").replace('>', "&gt;")
        ))
        .unwrap();
        let q = d.body().children[0];
        let n = d.body().children[1];
        let expected_tr = cosine(&tokenize_text("EOFException when calling readInt"), &ctx.combined);
        assert!((text_relevance(&d, q, &ctx.combined) - expected_tr).abs() < 1e-12);
        assert_eq!(text_relevance(&d, n, &ctx.combined), 0.0);
        assert!((code_relevance(&d, q, &ctx) - 1.0).abs() < 1e-12);
        assert_eq!(code_relevance(&d, n, &ctx), 0.0);

        let page = PageMetrics::compute(&d, &ctx, &MetricWeights::default(), DensityVariant::Full);
        assert!((page.get(q).tr - expected_tr).abs() < 1e-12);
        assert!((page.get(q).cr - 1.0).abs() < 1e-12);
    }

    #[test]
    fn code_segment_relevance_is_lcs_coverage() {
        let ctx = build_context(TRACE, Some(CODE)).unwrap();
        let half = &ctx.code_sequence[..ctx.code_sequence.len() / 2];
        let v = code_block_relevance(&half.join(" "), &ctx);
        assert!((v - half.len() as f64 / ctx.code_sequence.len() as f64).abs() < 1e-12);
        assert!((v - 0.5).abs() < 0.05);
        let no_code = build_context(TRACE, None).unwrap();
        assert_eq!(code_block_relevance("int x = foo();", &no_code), 0.0);
    }

    #[test]
    fn scores_are_normalized() {
        let ctx = build_context(TRACE, Some(CODE)).unwrap();
        let d = parse_str(&format!(
            "<div><p>EOFException readInt problem</p><pre>{TRACE}</pre></div><ul><li><a>Home</a></li><li><a>About</a></li></ul>"
        ))
        .unwrap();
        let page = PageMetrics::compute(&d, &ctx, &MetricWeights::default(), DensityVariant::Full);
        let cands: Vec<&NodeMetrics> = page.nodes.iter().filter(|m| page.candidates[m.node_id]).collect();
        assert!(cands.iter().any(|m| m.ctd_norm == 1.0));
        assert!(cands.iter().any(|m| m.ctd_norm == 0.0));
        assert!(cands.iter().any(|m| m.ctr_norm == 1.0));
        for m in &cands {
            assert!((0.0..=1.0).contains(&m.ctd_norm));
            assert!((0.0..=1.0).contains(&m.ctr_norm));
            assert!((m.cts - (m.ctd_norm + m.ctr_norm)).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_context_has_zero_relevance() {
        let d = parse_str(&format!("<div><p>EOFException</p><pre>{TRACE}</pre></div>")).unwrap();
        let page = PageMetrics::compute(
            &d,
            &ExceptionContext::empty(),
            &MetricWeights::default(),
            DensityVariant::Full,
        );
        assert!(page
            .nodes
            .iter()
            .all(|m| m.tr == 0.0 && m.cr == 0.0 && m.ctr_norm == 0.0));
    }
}
