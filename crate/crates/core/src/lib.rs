//! Recommends the sections of a programming web page that are most relevant
//! to a given exception.
//!
//! The pipeline:
//!
//! 1. [`dom::parse_html`] builds an element tree from (possibly malformed) HTML.
//! 2. [`context::build_context`] turns a stack trace and the code that raised
//!    it into token bags.
//! 3. [`metrics::PageMetrics`] scores every node for content density and
//!    relevance to the exception.
//! 4. [`extract::extract`] filters the page against the body's score and
//!    recommends the most relevant surviving section.
//! 5. [`eval`] scores extractions against gold sections with word-LCS
//!    precision, recall and F1.
//!
//! ```
//! use secrec_core::{build_context, extract, parse_html, MetricWeights, Mode};
//!
//! let page = br#"<html><body>
//!   <div id="nav"><a href="/">Home</a> <a href="/jobs">Jobs</a></div>
//!   <div id="answer"><div class="post">
//!     <p>The EOFException comes from readInt on an empty ObjectInputStream.</p>
//!     <pre>java.io.EOFException
//!   at java.io.DataInputStream.readInt(DataInputStream.java:392)</pre>
//!   </div></div>
//! </body></html>"#;
//! let doc = parse_html(page, None).unwrap();
//! let ctx = build_context(
//!     "java.io.EOFException\n\tat java.io.DataInputStream.readInt(DataInputStream.java:392)",
//!     Some("int n = in.readInt();"),
//! )
//! .unwrap();
//! let result = extract(&doc, &ctx, &MetricWeights::default(), Mode::Combined);
//! assert!(result.recommended_section().is_some());
//! ```

pub mod context;
pub mod dom;
pub mod error;
pub mod eval;
pub mod extract;
pub mod metrics;
pub mod tokenize;

pub use context::{build_context, parse_stack_trace, ExceptionContext, StackFrame, StackTrace};
pub use dom::{parse_html, Document, DomNode, NodeClass, NodeId};
pub use error::{Error, Result};
pub use eval::{compare_modes, run_corpus, score_case, EvalOptions, EvalReport, Prf};
pub use extract::{extract, extract_density_only, render_section, ExtractionResult, Format, Mode, Section};
pub use metrics::{MetricWeights, NodeMetrics, PageMetrics};
pub use tokenize::{cosine, lcs_length, token_sequence, tokenize_text, TokenBag};
