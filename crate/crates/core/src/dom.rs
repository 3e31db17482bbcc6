//! Lenient HTML parsing into an arena-backed element tree.
//!
//! Tree construction is delegated to html5ever (through `scraper`), which
//! implements the HTML5 recovery rules. The result is copied into a flat
//! arena whose indices are assigned in pre-order, so `NodeId` order is
//! document order and every child has a larger id than its parent.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ego_tree::NodeRef;
use encoding_rs::Encoding;
use scraper::{Html, Node};

use crate::error::{Error, Result};
use crate::metrics::{link_legitimacy, LinkVerdict};
use crate::tokenize::TokenBag;

pub type NodeId = usize;

/// Ordered content of an element: text runs interleaved with child elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Content {
    Element(NodeId),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomNode {
    pub node_id: NodeId,
    pub tag_name: String,
    pub attributes: BTreeMap<String, String>,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// Text directly under this element, whitespace-normalized. Empty for
    /// structural elements.
    pub own_text: String,
    content: Vec<Content>,
}

impl DomNode {
    pub fn content(&self) -> &[Content] {
        &self.content
    }

    pub fn class(&self) -> NodeClass {
        classify(&self.tag_name)
    }
}

/// Tag classification used by the density metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NodeClass {
    pub is_linked_element: bool,
    pub is_code_element: bool,
    /// Excluded from all text accounting.
    pub is_structural: bool,
}

pub const LINKED_TAGS: &[&str] = &["a", "input", "button"];
pub const CODE_TAGS: &[&str] = &["code", "pre", "blockquote"];
pub const STRUCTURAL_TAGS: &[&str] = &["script", "style", "head", "meta", "title", "noscript"];

pub fn classify(tag_name: &str) -> NodeClass {
    NodeClass {
        is_linked_element: LINKED_TAGS.contains(&tag_name),
        is_code_element: CODE_TAGS.contains(&tag_name),
        is_structural: STRUCTURAL_TAGS.contains(&tag_name),
    }
}

const VOID_TAGS: &[&str] = &[
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source", "track", "wbr",
];
const INLINE_TAGS: &[&str] = &[
    "a", "abbr", "b", "cite", "code", "em", "font", "i", "kbd", "label", "mark", "q", "s", "samp", "small", "span",
    "strong", "sub", "sup", "tt", "u", "var",
];
/// Inline-level elements that never make their parent a container.
const LEAF_LEVEL_TAGS: &[&str] = &["br", "img", "wbr", "input", "button"];
const RAW_TEXT_TAGS: &[&str] = &["script", "style", "noscript", "xmp", "iframe", "noembed", "noframes"];

/// Per-subtree text and tag counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub struct NodeCounts {
    /// C: characters of text.
    pub chars: usize,
    /// T: element nodes, the node itself included.
    pub tags: usize,
    /// LC: characters of noisy link text.
    pub link_chars: usize,
    /// CC: characters of code text.
    pub code_chars: usize,
}

#[derive(Debug, Clone)]
pub struct Document {
    nodes: Vec<DomNode>,
    body: NodeId,
}

impl Document {
    pub fn root(&self) -> &DomNode {
        &self.nodes[0]
    }

    pub fn body_id(&self) -> NodeId {
        self.body
    }

    pub fn body(&self) -> &DomNode {
        &self.nodes[self.body]
    }

    pub fn node(&self, id: NodeId) -> &DomNode {
        &self.nodes[id]
    }

    pub fn get(&self, id: NodeId) -> Option<&DomNode> {
        self.nodes.get(id)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[DomNode] {
        &self.nodes
    }

    /// Ids of `id` and all its descendants, in document order.
    pub fn subtree(&self, id: NodeId) -> std::ops::Range<NodeId> {
        id..self.subtree_end(id)
    }

    fn subtree_end(&self, id: NodeId) -> NodeId {
        let mut cur = id;
        while let Some(&last) = self.nodes[cur].children.last() {
            cur = last;
        }
        cur + 1
    }

    pub fn is_ancestor(&self, ancestor: NodeId, id: NodeId) -> bool {
        let mut cur = self.nodes[id].parent;
        while let Some(p) = cur {
            if p == ancestor {
                return true;
            }
            cur = self.nodes[p].parent;
        }
        false
    }

    /// An inner node has at least one block-level element child. Elements
    /// holding only text and inline markup are leaf blocks.
    pub fn is_inner(&self, id: NodeId) -> bool {
        self.nodes[id].children.iter().any(|&c| {
            let n = &self.nodes[c];
            !n.class().is_structural
                && !LEAF_LEVEL_TAGS.contains(&n.tag_name.as_str())
                && !INLINE_TAGS.contains(&n.tag_name.as_str())
        })
    }

    /// True for nodes that are structural or sit below a structural node.
    pub fn excluded_flags(&self) -> Vec<bool> {
        self.inherited_flags(|n| n.class().is_structural)
    }

    /// True for nodes that are code-classified or sit below one.
    pub fn in_code_flags(&self) -> Vec<bool> {
        self.inherited_flags(|n| n.class().is_code_element)
    }

    fn inherited_flags(&self, own: impl Fn(&DomNode) -> bool) -> Vec<bool> {
        let mut flags = vec![false; self.nodes.len()];
        for n in &self.nodes {
            let inherited = n.parent.is_some_and(|p| flags[p]);
            flags[n.node_id] = inherited || own(n);
        }
        flags
    }

    /// Whitespace-normalized text of the subtree, in document order.
    pub fn text(&self, id: NodeId) -> String {
        let mut buf = String::new();
        self.collect_text(id, &mut buf);
        normalize_whitespace(&buf)
    }

    /// Subtree text with line structure kept (`br` and newlines preserved).
    pub fn raw_text(&self, id: NodeId) -> String {
        let mut buf = String::new();
        self.collect_text(id, &mut buf);
        buf
    }

    fn collect_text(&self, id: NodeId, buf: &mut String) {
        let node = &self.nodes[id];
        if node.class().is_structural {
            return;
        }
        if node.tag_name == "br" {
            buf.push('\n');
        }
        for c in &node.content {
            match c {
                Content::Text(t) => buf.push_str(t),
                Content::Element(child) => {
                    let inline = INLINE_TAGS.contains(&self.nodes[*child].tag_name.as_str());
                    if !inline {
                        buf.push(' ');
                    }
                    self.collect_text(*child, buf);
                    if !inline {
                        buf.push(' ');
                    }
                }
            }
        }
    }

    /// Counts for every node, computed bottom-up. `is_noise_link` decides
    /// whether a linked element's text counts toward LC.
    pub fn all_counts(&self, is_noise_link: impl Fn(NodeId) -> bool) -> Vec<NodeCounts> {
        let mut counts = vec![NodeCounts::default(); self.nodes.len()];
        for node in self.nodes.iter().rev() {
            let id = node.node_id;
            let class = node.class();
            if class.is_structural {
                counts[id] = NodeCounts {
                    tags: 1,
                    ..NodeCounts::default()
                };
                continue;
            }
            let mut c = NodeCounts {
                chars: node.own_text.chars().count(),
                tags: 1,
                link_chars: 0,
                code_chars: 0,
            };
            for &child in &node.children {
                if self.nodes[child].class().is_structural {
                    continue;
                }
                let cc = counts[child];
                c.chars += cc.chars;
                c.tags += cc.tags;
                c.link_chars += cc.link_chars;
                c.code_chars += cc.code_chars;
            }
            if class.is_code_element {
                c.code_chars = c.chars;
            }
            if class.is_linked_element && is_noise_link(id) {
                c.link_chars = c.chars;
            }
            counts[id] = c;
        }
        counts
    }

    /// Serializes the subtree rooted at `id` as HTML.
    pub fn outer_html(&self, id: NodeId) -> String {
        let mut out = String::new();
        self.write_html(id, &mut out);
        out
    }

    fn write_html(&self, id: NodeId, out: &mut String) {
        let node = &self.nodes[id];
        let _ = write!(out, "<{}", node.tag_name);
        for (k, v) in &node.attributes {
            let _ = write!(out, " {}=\"{}\"", k, escape_attr(v));
        }
        out.push('>');
        if VOID_TAGS.contains(&node.tag_name.as_str()) {
            return;
        }
        let raw = RAW_TEXT_TAGS.contains(&node.tag_name.as_str());
        let leading_newline = matches!(node.tag_name.as_str(), "pre" | "textarea" | "listing");
        for (i, c) in node.content.iter().enumerate() {
            match c {
                Content::Text(t) => {
                    if i == 0 && leading_newline && t.starts_with('\n') {
                        out.push('\n');
                    }
                    if raw {
                        out.push_str(t);
                    } else {
                        out.push_str(&escape_text(t));
                    }
                }
                Content::Element(child) => self.write_html(*child, out),
            }
        }
        let _ = write!(out, "</{}>", node.tag_name);
    }
}

/// Bottom-up counts for one node, gating link text against `context`.
pub fn subtree_counts(doc: &Document, id: NodeId, context: &TokenBag, eta: f64) -> NodeCounts {
    let counts = doc.all_counts(|link| link_legitimacy(doc, link, context, eta) == LinkVerdict::Noise);
    counts[id]
}

/// Parses raw bytes into a [`Document`]. `encoding_hint` is an encoding label
/// such as `"iso-8859-1"`; without it the charset is sniffed from a BOM or a
/// `<meta>` declaration, falling back to UTF-8.
pub fn parse_html(raw_bytes: &[u8], encoding_hint: Option<&str>) -> Result<Document> {
    if raw_bytes.is_empty() {
        return Err(Error::UnparseableInput("empty input".into()));
    }
    let text = decode(raw_bytes, encoding_hint);
    parse_str(&text)
}

pub fn parse_str(text: &str) -> Result<Document> {
    if text.trim().is_empty() {
        return Err(Error::UnparseableInput("input has no content".into()));
    }
    let total = text.chars().count();
    let control = text.chars().filter(|c| c.is_control() && !c.is_whitespace()).count();
    if control * 10 > total * 3 {
        return Err(Error::UnparseableInput("input looks like binary data".into()));
    }

    let html = Html::parse_document(text);
    let Some(root_el) = html
        .tree
        .root()
        .children()
        .find(|n| matches!(n.value(), Node::Element(_)))
    else {
        return Err(Error::UnparseableInput("no element structure recovered".into()));
    };

    let mut nodes = Vec::new();
    build(root_el, None, &mut nodes);
    let body = match nodes.iter().find(|n| n.tag_name == "body" && n.parent == Some(0)) {
        Some(b) => b.node_id,
        None => {
            let id = nodes.len();
            nodes.push(DomNode {
                node_id: id,
                tag_name: "body".into(),
                attributes: BTreeMap::new(),
                parent: Some(0),
                children: Vec::new(),
                own_text: String::new(),
                content: Vec::new(),
            });
            nodes[0].children.push(id);
            nodes[0].content.push(Content::Element(id));
            id
        }
    };
    Ok(Document { nodes, body })
}

fn build(src: NodeRef<'_, Node>, parent: Option<NodeId>, nodes: &mut Vec<DomNode>) -> NodeId {
    let Node::Element(el) = src.value() else {
        unreachable!("build is only called on elements");
    };
    let id = nodes.len();
    let tag_name = el.name().to_ascii_lowercase();
    nodes.push(DomNode {
        node_id: id,
        attributes: el.attrs().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        tag_name,
        parent,
        children: Vec::new(),
        own_text: String::new(),
        content: Vec::new(),
    });

    let mut content = Vec::new();
    let mut children = Vec::new();
    let mut own = String::new();
    for child in src.children() {
        match child.value() {
            Node::Text(t) => {
                own.push_str(&t.text);
                own.push(' ');
                match content.last_mut() {
                    Some(Content::Text(prev)) => prev.push_str(&t.text),
                    _ => content.push(Content::Text(t.text.to_string())),
                }
            }
            Node::Element(_) => {
                let cid = build(child, Some(id), nodes);
                children.push(cid);
                content.push(Content::Element(cid));
            }
            _ => {}
        }
    }
    let node = &mut nodes[id];
    if !node.class().is_structural {
        node.own_text = normalize_whitespace(&own);
    }
    node.children = children;
    node.content = content;
    id
}

fn decode(raw: &[u8], hint: Option<&str>) -> String {
    let encoding = Encoding::for_bom(raw)
        .map(|(enc, _)| enc)
        .or_else(|| hint.and_then(|h| Encoding::for_label(h.trim().as_bytes())))
        .or_else(|| sniff_meta_charset(raw))
        .unwrap_or(encoding_rs::UTF_8);
    let (text, _, _) = encoding.decode(raw);
    text.into_owned()
}

fn sniff_meta_charset(raw: &[u8]) -> Option<&'static Encoding> {
    let head = &raw[..raw.len().min(1024)];
    let lower: Vec<u8> = head.to_ascii_lowercase();
    let needle = b"charset=";
    let pos = lower.windows(needle.len()).position(|w| w == needle)?;
    let rest = &lower[pos + needle.len()..];
    let rest = rest
        .iter()
        .position(|&b| !matches!(b, b'"' | b'\'' | b' '))
        .map(|i| &rest[i..])?;
    let end = rest
        .iter()
        .position(|&b| !(b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b':' | b'.')))
        .unwrap_or(rest.len());
    Encoding::for_label(&rest[..end])
}

pub fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn escape_text(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('\u{a0}', "&nbsp;")
}

fn escape_attr(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('"', "&quot;")
        .replace('\u{a0}', "&nbsp;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(html: &str) -> Document {
        parse_str(html).unwrap()
    }

    fn find(d: &Document, tag: &str) -> NodeId {
        d.nodes().iter().find(|n| n.tag_name == tag).unwrap().node_id
    }

    #[test]
    fn minimal_document_gets_body() {
        let d = doc("<p>hi</p>");
        assert_eq!(d.root().tag_name, "html");
        let body = d.body();
        assert_eq!(body.children.len(), 1);
        let p = d.node(body.children[0]);
        assert_eq!(p.tag_name, "p");
        assert_eq!(p.own_text, "hi");
    }

    #[test]
    fn listing_segment_builds_expected_tree() {
        let d = doc(r#"<div id="content">
<div id="question-header">
<h1 itemprop="name">
<a>How to instantiate inner class using reflection?</a>
</h1></div>
<div class="post-text" itemprop="description">
<p>I get this exception:</p>
<pre class="lang-java prettyprint prettyprinted">
<code>java.lang.InstantiationException ..</code>
</pre></div></div>"#);
        let shape = |id: NodeId| -> Vec<String> {
            d.node(id)
                .children
                .iter()
                .map(|&c| d.node(c).tag_name.clone())
                .collect()
        };
        let content = d.body().children[0];
        assert_eq!(d.node(content).attributes["id"], "content");
        assert_eq!(shape(content), ["div", "div"]);
        let header = d.node(content).children[0];
        assert_eq!(shape(header), ["h1"]);
        let h1 = d.node(header).children[0];
        assert_eq!(shape(h1), ["a"]);
        assert_eq!(
            d.node(d.node(h1).children[0]).own_text,
            "How to instantiate inner class using reflection?"
        );
        let post = d.node(content).children[1];
        assert_eq!(shape(post), ["p", "pre"]);
        let pre = d.node(post).children[1];
        assert_eq!(shape(pre), ["code"]);
    }

    #[test]
    fn unclosed_tags_recover_like_html5() {
        // html5ever: the unclosed <p> is closed by the block-level <div>,
        // which becomes its sibling inside the outer div.
        let d = doc("<div><p>unclosed<div>next");
        let outer = d.body().children[0];
        let kids: Vec<&str> = d
            .node(outer)
            .children
            .iter()
            .map(|&c| d.node(c).tag_name.as_str())
            .collect();
        assert_eq!(kids, ["p", "div"]);
        let p = d.node(d.node(outer).children[0]);
        assert_eq!(p.own_text, "unclosed");
        assert_eq!(d.node(d.node(outer).children[1]).own_text, "next");
    }

    #[test]
    fn script_style_and_comments_have_no_text() {
        let d = doc("<html><head><title>T</title><style>p{}</style></head><body><!-- c --><script>var x=1;</script><p>a  b\n c</p></body></html>");
        for n in d.nodes() {
            if n.class().is_structural {
                assert!(n.own_text.is_empty(), "{}", n.tag_name);
            }
        }
        assert_eq!(d.text(d.body_id()), "a b c");
        let counts = d.all_counts(|_| true);
        assert_eq!(counts[d.body_id()].chars, 5);
        assert_eq!(counts[d.body_id()].tags, 2);
    }

    #[test]
    fn ids_are_preorder() {
        let d = doc("<div><p>a<b>b</b></p><span>c</span></div><p>d</p>");
        for n in d.nodes() {
            assert_eq!(d.node(n.node_id).node_id, n.node_id);
            for &c in &n.children {
                assert!(c > n.node_id);
                assert_eq!(d.node(c).parent, Some(n.node_id));
            }
            for w in n.children.windows(2) {
                assert!(w[0] < w[1]);
                assert_eq!(d.subtree(w[0]).end, w[1]);
            }
        }
    }

    #[test]
    fn classification_table() {
        assert!(classify("a").is_linked_element);
        assert!(classify("input").is_linked_element);
        assert!(classify("button").is_linked_element);
        assert!(classify("pre").is_code_element);
        assert!(classify("blockquote").is_code_element);
        assert_eq!(classify("span"), NodeClass::default());
        assert!(classify("script").is_structural);
        for t in LINKED_TAGS {
            assert!(!classify(t).is_code_element);
        }
    }

    #[test]
    fn counts_examples() {
        let d = doc("<p>twelve chars</p>");
        let p = find(&d, "p");
        let c = d.all_counts(|_| true)[p];
        assert_eq!(
            c,
            NodeCounts {
                chars: 12,
                tags: 1,
                link_chars: 0,
                code_chars: 0
            }
        );

        let d = doc(&format!(
            "<div><p>{}</p><code>{}</code></div>",
            "x".repeat(20),
            "y".repeat(30)
        ));
        let c = d.all_counts(|_| true)[find(&d, "div")];
        assert_eq!(
            c,
            NodeCounts {
                chars: 50,
                tags: 3,
                link_chars: 0,
                code_chars: 30
            }
        );

        let d = doc("<div><a>eightchr</a></div>");
        let mut ctx = TokenBag::new();
        ctx.add("unrelated");
        let c = subtree_counts(&d, find(&d, "div"), &ctx, 0.75);
        assert_eq!(
            c,
            NodeCounts {
                chars: 8,
                tags: 2,
                link_chars: 8,
                code_chars: 0
            }
        );
    }

    #[test]
    fn legitimate_link_is_not_noise() {
        let d = doc("<div><a>readInt EOFException</a></div>");
        let ctx = crate::tokenize::tokenize_text("readInt EOFException");
        let c = subtree_counts(&d, find(&d, "div"), &ctx, 0.75);
        assert_eq!(c.link_chars, 0);
        assert_eq!(c.chars, 20);
    }

    #[test]
    fn nested_code_is_not_double_counted() {
        let d = doc("<pre><code>abc</code>de</pre>");
        let c = d.all_counts(|_| true)[find(&d, "pre")];
        assert_eq!(c.chars, 5);
        assert_eq!(c.code_chars, 5);
    }

    #[test]
    fn encoding_hint_and_meta_sniffing() {
        let latin1 = b"<html><body><p>caf\xe9</p></body></html>";
        let d = parse_html(latin1, Some("iso-8859-1")).unwrap();
        assert_eq!(d.text(d.body_id()), "café");
        let sniffed = b"<html><head><meta charset=\"windows-1252\"></head><body><p>caf\xe9</p></body></html>";
        let d = parse_html(sniffed, None).unwrap();
        assert_eq!(d.text(d.body_id()), "café");
        let d = parse_html("<p>café</p>".as_bytes(), None).unwrap();
        assert_eq!(d.text(d.body_id()), "café");
    }

    #[test]
    fn unparseable_inputs() {
        assert!(matches!(parse_html(b"", None), Err(Error::UnparseableInput(_))));
        assert!(matches!(parse_html(b"   \n ", None), Err(Error::UnparseableInput(_))));
        assert!(matches!(
            parse_html(&[1u8, 2, 3, 4, 5, 0], None),
            Err(Error::UnparseableInput(_))
        ));
    }

    #[test]
    fn serialization_round_trip() {
        let d = doc(
            "<div class=\"a&quot;b\"><p>x &lt; y &amp; z</p><pre>\nline1\nline2</pre><br><img src=\"i.png\"></div>",
        );
        let div = d.body().children[0];
        let html = d.outer_html(div);
        let again = doc(&html);
        let div2 = again.body().children[0];
        assert_eq!(again.outer_html(div2), html);
        assert_eq!(again.text(div2), d.text(div));
    }

    #[test]
    fn raw_text_keeps_lines() {
        let d = doc("<pre>a\nb<br>c</pre>");
        assert_eq!(d.raw_text(find(&d, "pre")).trim(), "a\nb \n c");
    }
}
