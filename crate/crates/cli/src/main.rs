//! `idl`: batch front-end for IDL-expressions.
//!
//! Exit status is 0 on success or acceptance, 1 when `recognize` rejects or
//! `best` finds no string, and 2 on any error.

use std::fs;
use std::io::{self, Read, Write};
use std::num::NonZeroUsize;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use idl_core::{
    build_graph, language, parse_expr_text, parse_grammar_text, sentence_to_string, width_of,
    zero_width_of, Cfg, CutStore, IdlExpr, ParseSession, DEFAULT_CUT_CAP, DEFAULT_SET_CAP,
};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(
    name = "idl",
    version,
    about = "IDL-expressions, their graphs and CFG intersection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print every string of the expression's language, sorted.
    Lang {
        #[command(flatten)]
        input: ExprInput,
        /// Enumerate through the cut automaton instead of the semantics.
        #[arg(long)]
        via_graph: bool,
    },
    /// Print the graph's edge list.
    Graph {
        #[command(flatten)]
        input: ExprInput,
    },
    /// Print the width and zero-width.
    Width {
        #[command(flatten)]
        input: ExprInput,
    },
    /// Enumerate the cut space and report the cut-count bound.
    Cuts {
        #[command(flatten)]
        input: ExprInput,
    },
    /// Decide whether the expression and the grammar share a string.
    Recognize {
        #[command(flatten)]
        input: GrammarInput,
        /// Also print parser statistics.
        #[arg(long)]
        stats: bool,
    },
    /// Print the highest-weighted string in the intersection.
    Best {
        #[command(flatten)]
        input: GrammarInput,
    },
    /// Run the recognizer and print only its statistics.
    Stats {
        #[command(flatten)]
        input: GrammarInput,
    },
}

#[derive(Args, Debug)]
struct ExprInput {
    /// Expression file, or `-` for stdin (the default when nothing is given).
    file: Option<String>,
    /// Inline expression text instead of a file.
    #[arg(
        short = 'e',
        long = "expr",
        value_name = "TEXT",
        conflicts_with = "file"
    )]
    text: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct GrammarInput {
    /// Expression file then grammar file; with `-e` only the grammar file.
    #[arg(required = true, num_args = 1..=2, value_name = "EXPR GRAMMAR")]
    files: Vec<String>,
    /// Inline expression text instead of a file.
    #[arg(short = 'e', long = "expr", value_name = "TEXT")]
    text: Option<String>,
    /// Start symbol, if not the left-hand side of the first production.
    #[arg(long)]
    start: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Emit a single JSON object.
    #[arg(long, global = true)]
    json: bool,
    /// Maximum number of cuts to enumerate.
    #[arg(long, value_name = "N", default_value_t = NonZeroUsize::new(DEFAULT_CUT_CAP).unwrap())]
    cap_cuts: NonZeroUsize,
    /// Maximum number of strings or sequences in any intermediate set.
    #[arg(long, value_name = "N", default_value_t = NonZeroUsize::new(DEFAULT_SET_CAP).unwrap())]
    cap_lang: NonZeroUsize,
}

fn read_source(path: Option<&str>) -> Result<String> {
    match path {
        None | Some("-") => {
            let mut text = String::new();
            io::stdin()
                .read_to_string(&mut text)
                .context("reading stdin")?;
            Ok(text)
        }
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {path}")),
    }
}

fn load_expr(file: Option<&str>, text: Option<&str>) -> Result<IdlExpr> {
    let source = match text {
        Some(t) => t.to_owned(),
        None => read_source(file)?,
    };
    Ok(parse_expr_text(&source)?)
}

impl ExprInput {
    fn expr(&self) -> Result<IdlExpr> {
        load_expr(self.file.as_deref(), self.text.as_deref())
    }
}

impl GrammarInput {
    fn load(&self) -> Result<(IdlExpr, Cfg)> {
        let (expr_file, grammar_file) = match (&self.text, self.files.as_slice()) {
            (Some(_), [g]) => (None, g),
            (None, [e, g]) => (Some(e.as_str()), g),
            (Some(_), _) => bail!("with -e give only the grammar file"),
            (None, _) => bail!("expected an expression file and a grammar file"),
        };
        let expr = load_expr(expr_file, self.text.as_deref())?;
        let text =
            fs::read_to_string(grammar_file).with_context(|| format!("reading {grammar_file}"))?;
        let mut grammar = parse_grammar_text(&text)?;
        if let Some(start) = &self.start {
            grammar = grammar.with_start(start)?;
        }
        Ok((expr, grammar))
    }
}

/// Runs one command, writing its report to `out`, and returns the exit code.
fn run(cli: &Cli, out: &mut impl Write) -> Result<u8> {
    match &cli.command {
        Command::Lang { input, via_graph } => {
            let e = input.expr()?;
            let cap = input.common.cap_lang.get();
            let strings = if *via_graph {
                CutStore::new(&build_graph(&e)).graph_language(input.common.cap_cuts.get(), cap)?
            } else {
                language(&e, cap)?
            };
            // Sort by rendered text so the order matches what a reader sees.
            let mut lines: Vec<String> = strings.iter().map(|s| sentence_to_string(s)).collect();
            lines.sort();
            if input.common.json {
                writeln!(out, "{}", json!({ "count": lines.len(), "strings": lines }))?;
            } else {
                for line in lines {
                    writeln!(out, "{line}")?;
                }
            }
        }
        Command::Graph { input } => {
            let g = build_graph(&input.expr()?);
            if input.common.json {
                let edges: Vec<_> = g
                    .edges()
                    .iter()
                    .map(|edge| {
                        json!({
                            "from": edge.from.0,
                            "to": edge.to.0,
                            "label": edge.label.to_string(),
                            "rank_from": g.rank(edge.from),
                            "rank_to": g.rank(edge.to),
                        })
                    })
                    .collect();
                let report = json!({
                    "vertices": g.vertex_count(),
                    "start": g.start().0,
                    "end": g.end().0,
                    "edges": edges,
                });
                writeln!(out, "{report}")?;
            } else {
                write!(out, "{}", g.dump())?;
            }
        }
        Command::Width { input } => {
            let e = input.expr()?;
            let (w, z) = (width_of(&e), zero_width_of(&e));
            if input.common.json {
                writeln!(out, "{}", json!({ "width": w, "zero_width": z }))?;
            } else {
                writeln!(out, "width={w} zero_width={z}")?;
            }
        }
        Command::Cuts { input } => {
            let e = input.expr()?;
            let g = build_graph(&e);
            let mut store = CutStore::new(&g);
            let report = store.check_cut_bound(input.common.cap_cuts.get())?;
            let transitions: usize = store
                .enumerate_cuts(input.common.cap_cuts.get())?
                .into_iter()
                .map(|c| store.successors(c).len())
                .sum();
            let zero = zero_width_of(&e);
            if input.common.json {
                let report = json!({
                    "cuts": report.count,
                    "width": report.width,
                    "zero_width": zero,
                    "bound": report.bound,
                    "transitions": transitions,
                    "vertices": report.vertices,
                    "bound_holds": report.holds,
                });
                writeln!(out, "{report}")?;
            } else {
                writeln!(out, "cuts={}", report.count)?;
                writeln!(out, "width={}", report.width)?;
                writeln!(out, "zero_width={zero}")?;
                writeln!(out, "bound={}", report.bound)?;
                writeln!(out, "transitions={transitions}")?;
                writeln!(out, "vertices={}", report.vertices)?;
                writeln!(out, "bound_holds={}", report.holds)?;
            }
        }
        Command::Recognize { input, stats } => {
            let (e, grammar) = input.load()?;
            let g = build_graph(&e);
            let mut session = ParseSession::new(&grammar, &g);
            let accepted = session.recognize();
            if input.common.json {
                let mut report = json!({ "accepted": accepted });
                if *stats {
                    report["stats"] = serde_json::to_value(session.stats())?;
                }
                writeln!(out, "{report}")?;
            } else {
                writeln!(out, "{}", if accepted { "ACCEPT" } else { "REJECT" })?;
                if *stats {
                    write_stats(out, &session)?;
                }
            }
            return Ok(if accepted { 0 } else { 1 });
        }
        Command::Best { input } => {
            let (e, grammar) = input.load()?;
            let g = build_graph(&e);
            let best = ParseSession::new(&grammar, &g).best_string()?;
            match (&best, input.common.json) {
                (Some(b), true) => writeln!(
                    out,
                    "{}",
                    json!({ "sentence": sentence_to_string(&b.sentence), "weight": b.weight })
                )?,
                (Some(b), false) => {
                    writeln!(out, "{}\t{}", sentence_to_string(&b.sentence), b.weight)?
                }
                (None, true) => writeln!(out, "{}", json!({ "sentence": null, "weight": null }))?,
                (None, false) => writeln!(out, "NONE")?,
            }
            return Ok(if best.is_some() { 0 } else { 1 });
        }
        Command::Stats { input } => {
            let (e, grammar) = input.load()?;
            let g = build_graph(&e);
            let mut session = ParseSession::new(&grammar, &g);
            let accepted = session.recognize();
            if input.common.json {
                let mut report = serde_json::to_value(session.stats())?;
                report["accepted"] = json!(accepted);
                writeln!(out, "{report}")?;
            } else {
                writeln!(out, "accepted={accepted}")?;
                write_stats(out, &session)?;
            }
        }
    }
    Ok(0)
}

fn write_stats(out: &mut impl Write, session: &ParseSession<'_>) -> Result<()> {
    let s = session.stats();
    writeln!(out, "interned_cuts={}", s.interned_cuts)?;
    writeln!(out, "expanded_cuts={}", s.expanded_cuts)?;
    writeln!(out, "cached_transitions={}", s.cached_transitions)?;
    writeln!(out, "dotted_items={}", s.dotted_items)?;
    writeln!(out, "closure_items={}", s.closure_items)?;
    writeln!(out, "scan_items={}", s.scan_items)?;
    writeln!(out, "agenda_pops={}", s.agenda_pops)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            // Help and version requests are not errors.
            return if err.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            let _ = out.flush();
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
