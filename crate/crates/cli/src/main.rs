//! `secrec`: recommend the page sections relevant to an exception.
//!
//! Exit codes: 0 success, 1 input or corpus error, 2 usage error,
//! 3 no relevant section found.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use secrec_core::context::ContextFile;
use secrec_core::eval::summary_table;
use secrec_core::{
    build_context, compare_modes, extract, parse_html, render_section, run_corpus, Error, EvalOptions,
    ExceptionContext, Format, MetricWeights, Mode,
};

const EXIT_INPUT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_EMPTY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "secrec",
    version,
    about = "Recommend the web page sections relevant to a programming exception"
)]
struct Cli {
    /// Log diagnostics to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract and recommend the sections of a page relevant to an exception.
    Extract(ExtractArgs),
    /// Score every mode on a corpus of pages with gold sections.
    Evaluate(EvaluateArgs),
    /// Print the context tokens built from a trace and its code.
    Context(ContextArgs),
}

#[derive(Args)]
struct TraceInput {
    /// Stack trace file.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["trace_inline", "context"])]
    trace: Option<PathBuf>,
    /// Stack trace given directly on the command line.
    #[arg(long, value_name = "TEXT", conflicts_with = "context")]
    trace_inline: Option<String>,
    /// Source code around the failing statement.
    #[arg(long, value_name = "FILE", conflicts_with = "context")]
    code: Option<PathBuf>,
    /// JSON context file: {"trace": "...", "code": "..."}.
    #[arg(long, value_name = "FILE")]
    context: Option<PathBuf>,
}

impl TraceInput {
    fn build(&self) -> Result<ExceptionContext, Error> {
        if let Some(path) = &self.context {
            return ContextFile::load(path)?.build();
        }
        let trace = match (&self.trace, &self.trace_inline) {
            (Some(path), _) => read_text(path)?,
            (None, Some(text)) => text.clone(),
            (None, None) => {
                return Err(Error::Usage(
                    "one of --trace, --trace-inline or --context is required".into(),
                ))
            }
        };
        let code = self.code.as_deref().map(read_text).transpose()?;
        build_context(&trace, code.as_deref())
    }
}

#[derive(Args)]
struct ExtractArgs {
    /// Saved HTML page.
    #[arg(long, value_name = "FILE")]
    page: PathBuf,
    #[command(flatten)]
    input: TraceInput,
    /// Character encoding of the page when it declares none.
    #[arg(long, value_name = "LABEL")]
    encoding: Option<String>,
    /// Scoring mode: density, relevance or combined.
    #[arg(long, default_value = "combined", value_parser = parse_mode)]
    mode: Mode,
    /// Number of sections to print, best first.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    top: u32,
    /// Output format: text, html or json.
    #[arg(long, default_value = "text", value_parser = parse_format)]
    format: Format,
    /// Weights file with key=value lines for alpha, beta, gamma, delta and eta.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long, value_name = "DIR")]
    corpus: PathBuf,
    /// Comma-separated modes to score: density, relevance, combined.
    #[arg(long, value_delimiter = ',', default_value = "density,relevance,combined", value_parser = parse_mode)]
    modes: Vec<Mode>,
    /// Where to write the JSON report.
    #[arg(long, value_name = "FILE")]
    report: PathBuf,
    /// Worker threads; 0 uses all available cores.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Also print mode-versus-mode deltas.
    #[arg(long)]
    compare: bool,
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ContextArgs {
    #[command(flatten)]
    input: TraceInput,
    /// Print a JSON array instead of one token per line.
    #[arg(long)]
    json: bool,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn read_text(path: &Path) -> Result<String, Error> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn load_weights(path: Option<&Path>) -> Result<MetricWeights, Error> {
    path.map(MetricWeights::load).transpose().map(Option::unwrap_or_default)
}

fn cmd_extract(args: &ExtractArgs) -> Result<u8, Error> {
    let weights = load_weights(args.config.as_deref())?;
    let bytes = std::fs::read(&args.page).map_err(|source| Error::Io {
        path: args.page.clone(),
        source,
    })?;
    let doc = parse_html(&bytes, args.encoding.as_deref())?;
    let ctx = match args.mode {
        Mode::Density => ExceptionContext::empty(),
        _ => args.input.build()?,
    };
    let result = extract(&doc, &ctx, &weights, args.mode);
    log::info!("mode {} threshold {:.6}", result.mode, result.threshold);
    for s in &result.kept_sections {
        let m = &s.metrics;
        log::info!(
            "kept <{}> #{}: ctd {:.4} ctr {:.4} ctd_norm {:.4} ctr_norm {:.4} cts {:.4}",
            doc.node(s.node_id).tag_name,
            s.node_id,
            m.ctd,
            m.ctr,
            m.ctd_norm,
            m.ctr_norm,
            m.cts
        );
    }
    if result.is_empty() {
        eprintln!("no relevant section found");
        return Ok(EXIT_EMPTY);
    }

    let ranked = result.ranked();
    let shown = &ranked[..ranked.len().min(args.top as usize)];
    let mut out = std::io::stdout().lock();
    let write = |out: &mut std::io::StdoutLock, bytes: &[u8]| out.write_all(bytes).and_then(|_| out.write_all(b"\n"));
    let io_err = |source| Error::Io {
        path: "<stdout>".into(),
        source,
    };
    match args.format {
        Format::Json => {
            let sections: Vec<serde_json::Value> = shown
                .iter()
                .map(|s| serde_json::from_slice(&render_section(s, Format::Json)).expect("section JSON"))
                .collect();
            let doc = serde_json::json!({
                "mode": result.mode,
                "threshold": result.threshold,
                "recommended": result.recommended,
                "sections": sections,
            });
            let text = serde_json::to_string_pretty(&doc).expect("JSON value");
            write(&mut out, text.as_bytes()).map_err(io_err)?;
        }
        format => {
            for (i, s) in shown.iter().enumerate() {
                if i > 0 {
                    out.write_all(b"\n").map_err(io_err)?;
                }
                write(&mut out, &render_section(s, format)).map_err(io_err)?;
            }
        }
    }
    Ok(0)
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<u8, Error> {
    if args.modes.is_empty() {
        return Err(Error::Usage("--modes needs at least one mode".into()));
    }
    let mut modes = Vec::new();
    for m in &args.modes {
        if !modes.contains(m) {
            modes.push(*m);
        }
    }
    if args.compare && modes.len() < 2 {
        return Err(Error::Usage("--compare needs at least two distinct modes".into()));
    }
    let opts = EvalOptions {
        weights: load_weights(args.config.as_deref())?,
        workers: args.workers,
        ..EvalOptions::default()
    };
    let report = run_corpus(&args.corpus, &modes, &opts)?;
    std::fs::write(&args.report, report.to_json() + "\n").map_err(|source| Error::Io {
        path: args.report.clone(),
        source,
    })?;
    for row in report.failures() {
        eprintln!(
            "case {} ({}) failed: {}",
            row.case_id,
            row.mode,
            row.error.as_deref().unwrap_or_default()
        );
    }
    print!("{}", summary_table(&report));
    if args.compare {
        println!();
        println!("{}", compare_modes(&report)?);
    }
    Ok(0)
}

fn cmd_context(args: &ContextArgs) -> Result<u8, Error> {
    let ctx = args.input.build()?;
    if args.json {
        println!("{}", serde_json::to_string(&ctx.combined_list).expect("token list"));
    } else {
        for t in &ctx.combined_list {
            println!("{t}");
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .format_target(false)
        .format_timestamp(None)
        .parse_default_env()
        .init();

    let outcome = match &cli.command {
        Command::Extract(a) => cmd_extract(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Context(a) => cmd_context(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e @ Error::Usage(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
