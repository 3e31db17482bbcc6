use proptest::prelude::*;
use secrec_core::dom::parse_str;
use secrec_core::eval::normalize_words;
use secrec_core::metrics::DensityVariant;
use secrec_core::{
    build_context, cosine, extract, score_case, tokenize_text, ExceptionContext, MetricWeights, Mode, PageMetrics,
    TokenBag,
};

const WORDS: &[&str] = &[
    "readInt",
    "EOFException",
    "stream",
    "the",
    "file",
    "ObjectInputStream",
    "close",
    "buffer",
    "java.io",
    "null",
];

fn text() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS), 0..8).prop_map(|w| w.join(" "))
}

/// Small pages of nested blocks, links and code.
fn page() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        text().prop_map(|t| format!("<p>{t}</p>")),
        text().prop_map(|t| format!("<a href=\"#\">{t}</a>")),
        text().prop_map(|t| format!("<pre><code>{t}</code></pre>")),
        text().prop_map(|t| format!("<span>{t}</span>")),
    ];
    let tree = leaf.prop_recursive(4, 40, 5, |inner| {
        (
            prop::sample::select(&["div", "section", "ul", "article"][..]),
            prop::collection::vec(inner, 1..5),
        )
            .prop_map(|(tag, kids)| format!("<{tag}>{}</{tag}>", kids.concat()))
    });
    prop::collection::vec(tree, 1..4).prop_map(|b| format!("<html><body>{}</body></html>", b.concat()))
}

fn bag() -> impl Strategy<Value = TokenBag> {
    prop::collection::vec((prop::sample::select(WORDS), 1u32..4), 0..6).prop_map(|pairs| {
        let mut b = TokenBag::new();
        for (t, n) in pairs {
            b.add_n(t.to_lowercase(), n);
        }
        b
    })
}

fn context() -> ExceptionContext {
    build_context(
        "java.io.EOFException\n\tat java.io.ObjectInputStream.readInt(ObjectInputStream.java:392)",
        Some("int n = in.readInt();"),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn cosine_is_symmetric_and_bounded(a in bag(), b in bag()) {
        let (ab, ba) = (cosine(&a, &b), cosine(&b, &a));
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        if !a.is_empty() {
            prop_assert!((cosine(&a, &a) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tokens_are_lowercase_alphanumeric(t in "[ -~]{0,80}") {
        for (tok, _) in tokenize_text(&t).iter() {
            prop_assert!(!tok.is_empty());
            prop_assert!(tok.chars().all(|c| c.is_alphanumeric() && !c.is_uppercase()), "{tok:?}");
        }
    }

    #[test]
    fn precision_and_recall_swap(a in text(), b in text()) {
        let (ab, ba) = (score_case(&a, &b), score_case(&b, &a));
        prop_assert_eq!(ab.precision, ba.recall);
        prop_assert_eq!(ab.recall, ba.precision);
        prop_assert_eq!(ab.f1, ba.f1);
        for v in [ab.precision, ab.recall, ab.f1] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn normalized_words_are_stable(t in "[ -~]{0,80}") {
        let once = normalize_words(&t);
        prop_assert_eq!(normalize_words(&once.join(" ")), once);
    }

    #[test]
    fn reserializing_a_tree_is_idempotent(html in page()) {
        let doc = parse_str(&html).unwrap();
        let once = doc.outer_html(doc.root().node_id);
        let again = parse_str(&once).unwrap();
        prop_assert_eq!(again.outer_html(again.root().node_id), once);
        prop_assert_eq!(again.len(), doc.len());
    }

    #[test]
    fn counts_compose_over_children(html in page()) {
        let doc = parse_str(&html).unwrap();
        let counts = doc.all_counts(|_| true);
        for node in doc.nodes() {
            let c = counts[node.node_id];
            if node.class().is_structural {
                continue;
            }
            // Structural children (head, script, style) contribute nothing.
            let kids: Vec<_> = node.children.iter().filter(|&&k| !doc.node(k).class().is_structural).collect();
            let sum = |f: fn(&secrec_core::dom::NodeCounts) -> usize| kids.iter().map(|&&k| f(&counts[k])).sum::<usize>();
            prop_assert_eq!(c.tags, 1 + sum(|c| c.tags));
            prop_assert_eq!(c.chars, node.own_text.chars().count() + sum(|c| c.chars));
            prop_assert!(c.link_chars <= c.chars && c.code_chars <= c.chars);
        }
    }

    #[test]
    fn link_density_grows_with_eta(html in page(), lo in 0.0f64..1.0, step in 0.0f64..0.5) {
        let doc = parse_str(&html).unwrap();
        let ctx = context();
        let at = |eta| {
            let w = MetricWeights { eta, ..MetricWeights::default() };
            PageMetrics::compute(&doc, &ctx, &w, DensityVariant::Full)
        };
        let (a, b) = (at(lo), at(lo + step));
        for (x, y) in a.nodes.iter().zip(&b.nodes) {
            prop_assert!(x.ld <= y.ld, "node {}: {} > {}", x.node_id, x.ld, y.ld);
            prop_assert!(x.ctd.is_finite() && x.ctr.is_finite() && x.cts.is_finite());
        }
    }

    #[test]
    fn kept_sections_beat_the_body(html in page()) {
        let doc = parse_str(&html).unwrap();
        let ctx = context();
        for mode in [Mode::Density, Mode::Relevance, Mode::Combined] {
            let r = extract(&doc, &ctx, &MetricWeights::default(), mode);
            for s in &r.kept_sections {
                prop_assert!(doc.is_ancestor(doc.body_id(), s.node_id) && s.node_id != doc.body_id());
            }
            if let Some(rec) = r.recommended {
                prop_assert!(r.kept_sections.iter().any(|s| s.node_id == rec));
            }
        }
    }
}
