//! Prints every candidate node of a corpus case with its density and
//! relevance scores, indented by depth.
//!
//! cargo run -p secrec-core --example node_scores -- corpus/synthetic/case01

use std::path::PathBuf;

use secrec_core::context::ContextFile;
use secrec_core::metrics::DensityVariant;
use secrec_core::{parse_html, MetricWeights, PageMetrics};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).ok_or("usage: node_scores CASE_DIR")?);
    let doc = parse_html(&std::fs::read(dir.join("page.html"))?, None)?;
    let ctx = ContextFile::load(&dir.join("context.json"))?.build()?;
    let page = PageMetrics::compute(&doc, &ctx, &MetricWeights::default(), DensityVariant::Full);

    for id in doc.subtree(doc.body_id()).filter(|&id| page.candidates[id]) {
        let n = doc.node(id);
        let mut depth = 0;
        let mut cur = n.parent;
        while let Some(p) = cur {
            depth += 1;
            cur = doc.node(p).parent;
        }
        let label = n
            .attributes
            .get("class")
            .or(n.attributes.get("id"))
            .map_or("", String::as_str);
        let m = page.get(id);
        println!(
            "{id:>4} {:indent$}{:<8} {label:<16} td {:8.2} ld {:6.2} cd {:7.2} ctd {:8.2} tr {:.2} cr {:.2} ctr {:.2} cts {:.3}",
            "",
            n.tag_name,
            m.td,
            m.ld,
            m.cd,
            m.ctd,
            m.tr,
            m.cr,
            m.ctr,
            m.cts,
            indent = depth
        );
    }
    Ok(())
}
