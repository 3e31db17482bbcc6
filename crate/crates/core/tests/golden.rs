//! The rendered JSON of a recommended section is byte-stable across runs and
//! releases. Set `UPDATE_GOLDEN=1` to re-record after an intended change.

use std::path::PathBuf;

use secrec_core::{build_context, extract, parse_html, render_section, Format, MetricWeights, Mode};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn recommended_section_json_is_stable() {
    let page = std::fs::read(fixture("eof_answer.html")).unwrap();
    let doc = parse_html(&page, None).unwrap();
    let ctx = build_context(
        "Exception in thread \"main\" java.io.EOFException\n\
         \tat java.io.ObjectInputStream$BlockDataInputStream.readInt(ObjectInputStream.java:2793)\n\
         \tat java.io.ObjectInputStream.readInt(ObjectInputStream.java:972)",
        Some("while (true) { list.add(in.readInt()); }"),
    )
    .unwrap();
    let result = extract(&doc, &ctx, &MetricWeights::default(), Mode::Combined);
    let section = result.recommended_section().expect("a recommended section");
    let rendered = render_section(section, Format::Json);

    let golden = fixture("eof_answer.section.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&golden, &rendered).unwrap();
    }
    let expected = std::fs::read(&golden).expect("golden file; run with UPDATE_GOLDEN=1 to record");
    assert_eq!(String::from_utf8_lossy(&rendered), String::from_utf8_lossy(&expected));
    // Rendering the same section twice yields identical bytes.
    assert_eq!(render_section(section, Format::Json), rendered);
}
