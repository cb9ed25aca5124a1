//! IDL-expressions: a compact notation for finite languages built from
//! interleave (`||`), disjunction (`\/`), lock (`x`) and concatenation (`.`).
//!
//! The crate compiles expressions to IDL-graphs, walks their cut space on
//! demand, and intersects that space with a context-free grammar using an
//! Earley-style chart keyed by pairs of cuts.
//!
//! ```
//! use idl_core::{parse_expr_text, parse_grammar_text, recognize};
//!
//! let e = parse_expr_text("||(\\/(necessarily, must), we . x(play . piano))").unwrap();
//! let g = parse_grammar_text("S -> we must play piano").unwrap();
//! assert!(recognize(&g, &e).accepted);
//! ```

pub mod cuts;
pub mod expr;
pub mod families;
pub mod grammar;
pub mod graph;
pub mod parser;

pub use cuts::{
    CutBoundReport, CutError, CutId, CutStore, Transition, TransitionLabel, DEFAULT_CUT_CAP,
};
pub use expr::{
    comb_pair, language, lock_hom, parse_expr_text, render_expr_text, sentence_to_string, sigma,
    ExprError, IdlExpr, MarkedString, Sentence, Symbol, DEFAULT_SET_CAP,
};
pub use grammar::{
    earley_recognize_string, grammar_size, parse_grammar_text, Cfg, GrammarError, GrammarSymbol,
    NonTerminal, Production,
};
pub use graph::{
    build_graph, is_l_free, width_of, zero_width_of, Edge, EdgeLabel, IdlGraph, VertexId,
};
pub use parser::{
    best_string, recognize, BestString, DottedItem, ParseError, ParseSession, ParseStats,
    Recognition,
};
