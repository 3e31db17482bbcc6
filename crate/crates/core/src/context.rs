//! Structured stack traces and the token representation of an exception.

use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tokenize::{token_sequence, TokenBag};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackFrame {
    pub package_name: String,
    /// May contain `$` for nested classes (`Outer$Inner`).
    pub class_name: String,
    pub method_name: String,
    pub file_name: String,
    pub line_number: Option<u32>,
}

impl StackFrame {
    fn root_package(&self) -> &str {
        self.package_name.split('.').next().unwrap_or("")
    }

    /// Package segments, nested class names and the method name, normalized.
    pub fn tokens(&self) -> Vec<String> {
        let mut out = Vec::new();
        for seg in self.package_name.split('.') {
            out.extend(token_sequence(seg));
        }
        for part in self.class_name.split('$') {
            out.extend(token_sequence(part));
        }
        let method = self.method_name.trim_start_matches('<').trim_end_matches('>');
        for part in method.split('$') {
            out.extend(token_sequence(part));
        }
        out
    }
}

/// A `Caused by:` section.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cause {
    pub exception_fqn: String,
    pub message: Option<String>,
    pub frames: Vec<StackFrame>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackTrace {
    /// `None` when the text held frames but no exception line.
    pub exception_fqn: Option<String>,
    pub message: Option<String>,
    /// Thread name from an `Exception in thread "..."` prefix.
    pub thread: Option<String>,
    /// The exception line as printed.
    pub headline: Option<String>,
    /// Innermost first, as printed.
    pub frames: Vec<StackFrame>,
    pub causes: Vec<Cause>,
    /// Lines that were neither frames, exception lines nor `... N more`.
    pub skipped_lines: usize,
}

impl StackTrace {
    pub fn frame_count(&self) -> usize {
        self.frames.len() + self.causes.iter().map(|c| c.frames.len()).sum::<usize>()
    }
}

/// Which frames of each trace segment contribute tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameScope {
    /// The leading run of frames sharing the top frame's root package. Frames
    /// past that boundary belong to the calling application, whose identifiers
    /// arrive through the context code instead.
    #[default]
    LeadingPackageRun,
    All,
}

impl FrameScope {
    pub fn select<'a>(&self, frames: &'a [StackFrame]) -> &'a [StackFrame] {
        match self {
            FrameScope::All => frames,
            FrameScope::LeadingPackageRun => {
                let Some(first) = frames.first() else {
                    return frames;
                };
                let root = first.root_package();
                let n = frames.iter().take_while(|f| f.root_package() == root).count();
                &frames[..n]
            }
        }
    }
}

static FRAME_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^at\s+(?:\S+/)?([A-Za-z_$][\w$]*(?:\.[A-Za-z_$][\w$]*)*)\.([\w$]+|<init>|<clinit>)\s*\(([^)]*)\)")
        .unwrap()
});

static EXCEPTION_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r#"^(?:Exception in thread "([^"]*)"\s+)?(Caused by:\s*|Suppressed:\s*)?([A-Za-z_$][\w$]*(?:\.[A-Za-z_$][\w$]*)*)(?::\s*(.*))?$"#,
    )
    .unwrap()
});

static MORE_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\.\.\.\s*\d+\s+(more|common frames omitted)").unwrap());

/// Inline frame markers, used to split traces whose newlines were lost.
static INLINE_AT_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\s+at\s+(?:\S+/)?[A-Za-z_$][\w$.]*\.(?:[\w$]+|<init>|<clinit>)\s*\(").unwrap());

fn looks_like_exception_name(fqn: &str) -> bool {
    let last = fqn.rsplit('.').next().unwrap_or(fqn);
    let named = ["Exception", "Error", "Throwable"].iter().any(|s| last.ends_with(s));
    named || (fqn.contains('.') && last.starts_with(|c: char| c.is_uppercase()))
}

fn parse_frame(line: &str) -> Option<StackFrame> {
    let caps = FRAME_RE.captures(line)?;
    let path = &caps[1];
    let (package_name, class_name) = match path.rsplit_once('.') {
        Some((p, c)) => (p.to_string(), c.to_string()),
        None => (String::new(), path.to_string()),
    };
    let location = caps[3].trim();
    let (file_name, line_number) = match location.rsplit_once(':') {
        Some((f, n)) => (f.to_string(), n.trim().parse().ok()),
        None => (location.to_string(), None),
    };
    Some(StackFrame {
        package_name,
        class_name,
        method_name: caps[2].to_string(),
        file_name,
        line_number,
    })
}

/// True if any line of `text` has the `at pkg.Class.method(...)` shape.
pub fn looks_like_stack_trace(text: &str) -> bool {
    split_inline_frames(text).lines().any(|l| FRAME_RE.is_match(l.trim()))
}

fn split_inline_frames(text: &str) -> String {
    INLINE_AT_RE
        .replace_all(text, |c: &regex::Captures<'_>| format!("\n{}", c[0].trim_start()))
        .into_owned()
}

pub fn parse_stack_trace(text: &str) -> Result<StackTrace> {
    let text = split_inline_frames(text);
    let mut trace = StackTrace {
        exception_fqn: None,
        message: None,
        thread: None,
        headline: None,
        frames: Vec::new(),
        causes: Vec::new(),
        skipped_lines: 0,
    };
    // Message continuation lines are accepted until the segment's first frame.
    let mut open_message = false;

    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(frame) = parse_frame(line) {
            open_message = false;
            match trace.causes.last_mut() {
                Some(cause) => cause.frames.push(frame),
                None => trace.frames.push(frame),
            }
            continue;
        }
        if MORE_RE.is_match(line) {
            continue;
        }
        if let Some(caps) = EXCEPTION_RE.captures(line) {
            let fqn = caps[3].to_string();
            let is_cause = caps.get(2).is_some();
            if looks_like_exception_name(&fqn) && (is_cause || trace.exception_fqn.is_none()) {
                let message = caps
                    .get(4)
                    .map(|m| m.as_str().trim().to_string())
                    .filter(|m| !m.is_empty());
                if is_cause {
                    trace.causes.push(Cause {
                        exception_fqn: fqn,
                        message,
                        frames: Vec::new(),
                    });
                } else if trace.frames.is_empty() {
                    trace.thread = caps.get(1).map(|m| m.as_str().to_string());
                    trace.headline = Some(line.to_string());
                    trace.exception_fqn = Some(fqn);
                    trace.message = message;
                } else {
                    trace.skipped_lines += 1;
                    continue;
                }
                open_message = true;
                continue;
            }
        }
        if open_message {
            let msg = match trace.causes.last_mut() {
                Some(cause) => &mut cause.message,
                None => &mut trace.message,
            };
            match msg {
                Some(m) => {
                    m.push('\n');
                    m.push_str(line);
                }
                None => *msg = Some(line.to_string()),
            }
            if trace.causes.is_empty() {
                if let Some(h) = trace.headline.as_mut() {
                    h.push('\n');
                    h.push_str(line);
                }
            }
            continue;
        }
        trace.skipped_lines += 1;
    }

    if trace.exception_fqn.is_none() && trace.frame_count() == 0 && trace.causes.is_empty() {
        return Err(Error::NoTraceFound);
    }
    if trace.skipped_lines > 0 {
        log::warn!("skipped {} unparseable stack trace line(s)", trace.skipped_lines);
    }
    Ok(trace)
}

/// Ordered tokens of a trace: the exception line, then the in-scope frames of
/// each segment.
pub fn trace_tokens(trace: &StackTrace, scope: FrameScope) -> Vec<String> {
    let mut out = Vec::new();
    match (&trace.headline, &trace.exception_fqn) {
        (Some(h), _) => out.extend(token_sequence(h)),
        (None, Some(fqn)) => out.extend(token_sequence(fqn)),
        _ => {}
    }
    for f in scope.select(&trace.frames) {
        out.extend(f.tokens());
    }
    for cause in &trace.causes {
        out.extend(token_sequence(&cause.exception_fqn));
        if let Some(m) = &cause.message {
            out.extend(token_sequence(m));
        }
        for f in scope.select(&cause.frames) {
            out.extend(f.tokens());
        }
    }
    out
}

const CONTROL_KEYWORDS: &[&str] = &[
    "if",
    "for",
    "while",
    "switch",
    "catch",
    "synchronized",
    "return",
    "new",
    "super",
    "this",
    "throw",
    "else",
    "do",
    "try",
    "assert",
    "case",
    "sizeof",
    "typeof",
    "instanceof",
    "foreach",
    "using",
    "lock",
    "when",
    "elif",
    "print",
];

/// Removes `//` and `/* */` comments and blanks out string and char literals.
fn strip_comments_and_literals(src: &str, keep_literals: bool) -> String {
    let mut out = String::with_capacity(src.len());
    let mut chars = src.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '/' if chars.peek() == Some(&'/') => {
                for n in chars.by_ref() {
                    if n == '\n' {
                        out.push('\n');
                        break;
                    }
                }
            }
            '/' if chars.peek() == Some(&'*') => {
                chars.next();
                let mut prev = '\0';
                for n in chars.by_ref() {
                    if prev == '*' && n == '/' {
                        break;
                    }
                    prev = n;
                }
                out.push(' ');
            }
            '"' | '\'' => {
                let quote = c;
                let mut literal = String::new();
                let mut escaped = false;
                for n in chars.by_ref() {
                    if n == '\n' {
                        break;
                    }
                    if escaped {
                        escaped = false;
                    } else if n == '\\' {
                        escaped = true;
                    } else if n == quote {
                        break;
                    }
                    literal.push(n);
                }
                out.push(' ');
                if keep_literals {
                    out.push_str(&literal);
                    out.push(' ');
                }
            }
            _ => out.push(c),
        }
    }
    out
}

#[derive(Debug, PartialEq)]
enum Lexeme<'a> {
    Chain(&'a str),
    Punct(char),
}

/// Identifier chains (`a.b.C`) and single punctuation characters.
fn lex(src: &str) -> Vec<Lexeme<'_>> {
    let bytes: Vec<(usize, char)> = src.char_indices().collect();
    let is_start = |c: char| c.is_alphabetic() || c == '_' || c == '$';
    let is_part = |c: char| c.is_alphanumeric() || c == '_' || c == '$';
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let (pos, c) = bytes[i];
        if c.is_whitespace() {
            i += 1;
        } else if is_start(c) {
            let mut j = i;
            loop {
                while j < bytes.len() && is_part(bytes[j].1) {
                    j += 1;
                }
                if j + 1 < bytes.len() && bytes[j].1 == '.' && is_start(bytes[j + 1].1) {
                    j += 1;
                } else {
                    break;
                }
            }
            let end = bytes.get(j).map_or(src.len(), |&(p, _)| p);
            out.push(Lexeme::Chain(&src[pos..end]));
            i = j;
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].1.is_alphanumeric() {
                i += 1;
            }
        } else {
            out.push(Lexeme::Punct(c));
            i += 1;
        }
    }
    out
}

/// Identifiers captured by island-style heuristics, in source order: call
/// targets (`x.name(`), capitalized types in declaration position
/// (`Type name`, `Type<`), and `new Type` targets.
pub fn extract_code_identifiers(source: &str) -> Vec<String> {
    let cleaned = strip_comments_and_literals(source, false);
    let lexemes = lex(&cleaned);
    let mut out = Vec::new();
    for (i, lx) in lexemes.iter().enumerate() {
        let Lexeme::Chain(chain) = lx else { continue };
        let last = chain.rsplit('.').next().unwrap_or(chain);
        let next = lexemes.get(i + 1);
        let after_new = i > 0 && lexemes[i - 1] == Lexeme::Chain("new");
        if next == Some(&Lexeme::Punct('(')) && !after_new {
            if !CONTROL_KEYWORDS.contains(&last) {
                out.push(last.to_string());
            }
            continue;
        }
        let capitalized = last.starts_with(|c: char| c.is_uppercase());
        let type_position = matches!(next, Some(Lexeme::Chain(_)) | Some(Lexeme::Punct('<')));
        if after_new || (capitalized && type_position) {
            out.push(chain.to_string());
        }
    }
    out
}

pub fn extract_code_tokens(source: &str) -> TokenBag {
    extract_code_identifiers(source)
        .iter()
        .flat_map(|id| token_sequence(id))
        .collect()
}

/// Token sequence of the context code with comments removed.
pub fn code_token_sequence(source: &str) -> Vec<String> {
    token_sequence(&strip_comments_and_literals(source, true))
}

/// Everything the relevance metrics need to know about one exception.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExceptionContext {
    pub trace: Option<StackTrace>,
    pub code_tokens: TokenBag,
    /// Exception line, in-scope frames and context-code identifiers.
    pub combined: TokenBag,
    /// Distinct tokens of `combined` in first-seen order.
    pub combined_list: Vec<String>,
    /// Tokens used when comparing against stack traces found on a page.
    pub trace_bag: TokenBag,
    /// Full token sequence of the context code.
    pub code_sequence: Vec<String>,
}

impl ExceptionContext {
    /// A context with no information; relevance metrics evaluate to zero.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.combined.is_empty() && self.code_sequence.is_empty()
    }
}

pub fn build_context(trace_text: &str, code_text: Option<&str>) -> Result<ExceptionContext> {
    build_context_with(trace_text, code_text, FrameScope::default())
}

pub fn build_context_with(trace_text: &str, code_text: Option<&str>, scope: FrameScope) -> Result<ExceptionContext> {
    let trace = parse_stack_trace(trace_text)?;
    let trace_seq = trace_tokens(&trace, scope);
    let code_ids: Vec<String> = code_text
        .map(|c| {
            extract_code_identifiers(c)
                .iter()
                .flat_map(|id| token_sequence(id))
                .collect()
        })
        .unwrap_or_default();

    let mut combined = TokenBag::new();
    let mut combined_list = Vec::new();
    for t in trace_seq.iter().chain(&code_ids) {
        if !combined.contains(t) {
            combined_list.push(t.clone());
        }
        combined.add(t.clone());
    }
    Ok(ExceptionContext {
        trace_bag: trace_seq.into_iter().collect(),
        code_tokens: code_ids.into_iter().collect(),
        combined,
        combined_list,
        code_sequence: code_text.map(code_token_sequence).unwrap_or_default(),
        trace: Some(trace),
    })
}

/// On-disk context: `{"trace": "...", "code": "..."}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextFile {
    pub trace: String,
    #[serde(default)]
    pub code: Option<String>,
}

impl ContextFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn build(&self) -> Result<ExceptionContext> {
        build_context(&self.trace, self.code.as_deref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    pub(crate) const LISTING_CODE: &str = r#"//more code goes here ...
FileInputStream fis = new FileInputStream(file);
ObjectInputStream ois = new ObjectInputStream(fis);
ArrayList<Record> currentList = new ArrayList<>();
int size = ois.readInt();
for (int i = 0; i < size; i++) {
	Record current = (Record) ois.readObject();
	currentList.add(current); }"#;

    pub(crate) const LISTING_TRACE: &str = r#"Exception in thread "main" java.io.EOFException
at java.io.ObjectInputStream$PeekInputStream.readFully(ObjectInputStream.java:2325)
at java.io.ObjectInputStream$BlockDataInputStream.readShort(ObjectInputStream.java:2794)
at java.io.ObjectInputStream.readStreamHeader(ObjectInputStream.java:801)
at java.io.ObjectInputStream.<init>(ObjectInputStream.java:299)
at core.MyEOFTest.main(MyEOFTest.java:40)"#;

    fn support(bag: &TokenBag) -> BTreeSet<String> {
        bag.support().map(str::to_string).collect()
    }

    #[test]
    fn parses_listing_frames() {
        let t = parse_stack_trace(LISTING_TRACE).unwrap();
        assert_eq!(t.exception_fqn.as_deref(), Some("java.io.EOFException"));
        assert_eq!(t.thread.as_deref(), Some("main"));
        assert_eq!(t.frames.len(), 5);
        assert_eq!(
            t.frames[2],
            StackFrame {
                package_name: "java.io".into(),
                class_name: "ObjectInputStream".into(),
                method_name: "readStreamHeader".into(),
                file_name: "ObjectInputStream.java".into(),
                line_number: Some(801),
            }
        );
        assert_eq!(t.frames[0].class_name, "ObjectInputStream$PeekInputStream");
        assert_eq!(t.frames[3].method_name, "<init>");
        assert!(t.frames[3].tokens().contains(&"init".to_string()));
        assert_eq!(t.skipped_lines, 0);
    }

    #[test]
    fn bare_exception_line() {
        let t = parse_stack_trace("java.io.EOFException").unwrap();
        assert_eq!(t.exception_fqn.as_deref(), Some("java.io.EOFException"));
        assert!(t.frames.is_empty());
        assert!(t.message.is_none());
    }

    #[test]
    fn non_trace_input() {
        assert!(matches!(parse_stack_trace("hello world"), Err(Error::NoTraceFound)));
        assert!(matches!(parse_stack_trace(""), Err(Error::NoTraceFound)));
        assert!(matches!(parse_stack_trace("hello"), Err(Error::NoTraceFound)));
    }

    #[test]
    fn message_and_caused_by() {
        let text = "java.lang.RuntimeException: outer failure\n\
            \tat com.app.Service.run(Service.java:10)\n\
            Caused by: java.sql.SQLException: Connection refused\n\
            \tat org.db.Driver.connect(Driver.java:55)\n\
            \t... 3 more\n\
            garbage line";
        let t = parse_stack_trace(text).unwrap();
        assert_eq!(t.message.as_deref(), Some("outer failure"));
        assert_eq!(t.frames.len(), 1);
        assert_eq!(t.causes.len(), 1);
        assert_eq!(t.causes[0].exception_fqn, "java.sql.SQLException");
        assert_eq!(t.causes[0].message.as_deref(), Some("Connection refused"));
        assert_eq!(t.causes[0].frames[0].method_name, "connect");
        assert_eq!(t.frame_count(), 2);
        assert_eq!(t.skipped_lines, 1);
        let toks = trace_tokens(&t, FrameScope::All);
        for t in ["javasqlsqlexception", "sql", "exception", "refused"] {
            assert!(toks.contains(&t.to_string()), "{t}");
        }
        assert!(toks.contains(&"connect".to_string()));
    }

    #[test]
    fn frames_without_exception_line_and_module_prefixes() {
        let t = parse_stack_trace(
            "  at java.base/java.util.ArrayList.get(ArrayList.java:427)\n  at Foo.bar(Native Method)",
        )
        .unwrap();
        assert!(t.exception_fqn.is_none());
        assert_eq!(t.frames[0].package_name, "java.util");
        assert_eq!(t.frames[1].package_name, "");
        assert_eq!(t.frames[1].file_name, "Native Method");
        assert_eq!(t.frames[1].line_number, None);
    }

    #[test]
    fn collapsed_whitespace_trace_still_splits() {
        let one_line = LISTING_TRACE.split_whitespace().collect::<Vec<_>>().join(" ");
        let t = parse_stack_trace(&one_line).unwrap();
        assert_eq!(t.frames.len(), 5);
        assert!(looks_like_stack_trace(&one_line));
        assert!(!looks_like_stack_trace("int x = foo(1);"));
    }

    #[test]
    fn frame_scope_stops_at_package_boundary() {
        let t = parse_stack_trace(LISTING_TRACE).unwrap();
        assert_eq!(FrameScope::LeadingPackageRun.select(&t.frames).len(), 4);
        assert_eq!(FrameScope::All.select(&t.frames).len(), 5);
    }

    #[test]
    fn code_identifiers_from_listing() {
        let bag = extract_code_tokens(LISTING_CODE);
        for t in [
            "fileinputstream",
            "objectinputstream",
            "arraylist",
            "record",
            "readint",
            "readobject",
            "add",
        ] {
            assert!(bag.contains(t), "{t}");
        }
        for t in ["for", "more", "size", "current", "fis", "ois", "currentlist"] {
            assert!(!bag.contains(t), "{t}");
        }
        assert!(extract_code_tokens("").is_empty());
        assert!(extract_code_tokens("int x = y + 1;").is_empty());
    }

    #[test]
    fn comments_and_strings_are_ignored() {
        let ids = extract_code_identifiers("foo(\"Bar baz(\"); // Hidden call()\n/* Type x */ bar();");
        assert_eq!(ids, ["foo", "bar"]);
    }

    #[test]
    fn listing_context_matches_expected_representation() {
        let ctx = build_context(LISTING_TRACE, Some(LISTING_CODE)).unwrap();
        let expected = crate::tokenize::tokenize_text(
            "Exception in thread \"main\" java.io.EOFException readInt \
             ObjectInputStream readStreamHeader BlockDataInputStream \
             readObject readShort add main readFully FileInputStream Record ArrayList PeekInputStream init",
        );
        assert_eq!(support(&ctx.combined), support(&expected));
        let list: BTreeSet<String> = ctx.combined_list.iter().cloned().collect();
        assert_eq!(list, support(&ctx.combined));
        assert_eq!(ctx.combined_list.len(), ctx.combined.len());
    }

    #[test]
    fn minimal_context_is_headline_only() {
        let ctx = build_context("java.lang.IllegalStateException: queue full", None).unwrap();
        assert_eq!(
            support(&ctx.combined),
            support(&crate::tokenize::tokenize_text(
                "java.lang.IllegalStateException queue full"
            ))
        );
        assert!(ctx.code_sequence.is_empty());
    }

    #[test]
    fn trace_as_code_adds_nothing() {
        let alone = build_context(LISTING_TRACE, None).unwrap();
        let twice = build_context(LISTING_TRACE, Some(LISTING_TRACE)).unwrap();
        assert_eq!(support(&alone.combined), support(&twice.combined));
    }

    #[test]
    fn code_sequence_drops_comments() {
        let ctx = build_context(LISTING_TRACE, Some(LISTING_CODE)).unwrap();
        assert_eq!(ctx.code_sequence[0], "fileinputstream");
        assert!(!ctx.code_sequence.contains(&"goes".to_string()));
    }

    #[test]
    fn context_file_json() {
        let cf: ContextFile = serde_json::from_str(r#"{"trace": "java.io.EOFException"}"#).unwrap();
        assert!(cf.code.is_none());
        let ctx = cf.build().unwrap();
        assert!(ctx.combined.contains("eof"));
    }
}
