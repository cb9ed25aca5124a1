//! IDL-expression syntax trees, their concrete text form, and the set-based
//! semantics used as the reference oracle for everything built on top.

mod semantics;
mod syntax;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use semantics::{
    comb_pair, language, lock_hom, sentence_to_string, sigma, MarkedString, Sentence,
    DEFAULT_SET_CAP,
};
pub use syntax::{parse_expr_text, render_expr_text};

/// Tokens with a fixed meaning in the expression syntax.
pub const RESERVED_TOKENS: [&str; 8] = ["eps", "x", "\\/", "||", ".", "(", ")", ","];

/// Characters that always terminate a word.
pub(crate) const PUNCTUATION: [char; 4] = ['(', ')', ',', '.'];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{operator} needs at least 2 arguments, got {found} (at {line}:{column})")]
    Arity {
        operator: &'static str,
        found: usize,
        line: usize,
        column: usize,
    },
    #[error("invalid symbol {0:?}")]
    InvalidSymbol(String),
    #[error("set size exceeded cap of {cap} while expanding the expression")]
    CapExceeded { cap: usize },
}

/// A terminal word. Cheap to clone; compares by content.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Symbol(Arc<str>);

impl Symbol {
    /// Validated constructor: rejects empty names, whitespace, punctuation and
    /// reserved tokens so every symbol can be written back as expression text.
    pub fn new(name: &str) -> Result<Self, ExprError> {
        if name.is_empty()
            || name
                .chars()
                .any(|c| c.is_whitespace() || PUNCTUATION.contains(&c))
            || RESERVED_TOKENS.contains(&name)
        {
            return Err(ExprError::InvalidSymbol(name.to_string()));
        }
        Ok(Symbol(Arc::from(name)))
    }

    /// Grammar terminals may be any whitespace-free token, even ones that can
    /// never occur in an expression.
    pub(crate) fn from_token(token: &str) -> Self {
        Symbol(Arc::from(token))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Abstract syntax of an IDL-expression.
///
/// `Or` and `Interleave` must have at least two children. The smart
/// constructors enforce this; building the variants directly is allowed but
/// [`IdlExpr::validate`] should be called on untrusted trees.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IdlExpr {
    Terminal(Symbol),
    Epsilon,
    Lock(Box<IdlExpr>),
    Or(Vec<IdlExpr>),
    Interleave(Vec<IdlExpr>),
    Concat(Box<IdlExpr>, Box<IdlExpr>),
}

impl IdlExpr {
    pub fn word(name: &str) -> Result<Self, ExprError> {
        Symbol::new(name).map(IdlExpr::Terminal)
    }

    pub fn lock(child: IdlExpr) -> Self {
        IdlExpr::Lock(Box::new(child))
    }

    pub fn concat(left: IdlExpr, right: IdlExpr) -> Self {
        IdlExpr::Concat(Box::new(left), Box::new(right))
    }

    pub fn or(children: Vec<IdlExpr>) -> Result<Self, ExprError> {
        check_arity("\\/", children.len())?;
        Ok(IdlExpr::Or(children))
    }

    pub fn interleave(children: Vec<IdlExpr>) -> Result<Self, ExprError> {
        check_arity("||", children.len())?;
        Ok(IdlExpr::Interleave(children))
    }

    /// Right-nested concatenation of a non-empty list.
    pub fn concat_all(mut parts: Vec<IdlExpr>) -> Option<Self> {
        let mut acc = parts.pop()?;
        while let Some(prev) = parts.pop() {
            acc = IdlExpr::concat(prev, acc);
        }
        Some(acc)
    }

    /// Checks the arity invariant over the whole tree.
    pub fn validate(&self) -> Result<(), ExprError> {
        match self {
            IdlExpr::Terminal(_) | IdlExpr::Epsilon => Ok(()),
            IdlExpr::Lock(child) => child.validate(),
            IdlExpr::Or(children) => {
                check_arity("\\/", children.len())?;
                children.iter().try_for_each(IdlExpr::validate)
            }
            IdlExpr::Interleave(children) => {
                check_arity("||", children.len())?;
                children.iter().try_for_each(IdlExpr::validate)
            }
            IdlExpr::Concat(left, right) => {
                left.validate()?;
                right.validate()
            }
        }
    }

    /// Number of I, D, L and concatenation operator occurrences.
    pub fn op_count(&self) -> usize {
        match self {
            IdlExpr::Terminal(_) | IdlExpr::Epsilon => 0,
            IdlExpr::Lock(child) => 1 + child.op_count(),
            IdlExpr::Or(children) | IdlExpr::Interleave(children) => {
                1 + children.iter().map(IdlExpr::op_count).sum::<usize>()
            }
            IdlExpr::Concat(left, right) => 1 + left.op_count() + right.op_count(),
        }
    }

    pub fn has_interleave(&self) -> bool {
        match self {
            IdlExpr::Terminal(_) | IdlExpr::Epsilon => false,
            IdlExpr::Interleave(_) => true,
            IdlExpr::Lock(child) => child.has_interleave(),
            IdlExpr::Or(children) => children.iter().any(IdlExpr::has_interleave),
            IdlExpr::Concat(left, right) => left.has_interleave() || right.has_interleave(),
        }
    }

    /// Distinct terminal symbols, in first-occurrence order.
    pub fn symbols(&self) -> Vec<Symbol> {
        fn walk(e: &IdlExpr, out: &mut Vec<Symbol>) {
            match e {
                IdlExpr::Terminal(s) => {
                    if !out.contains(s) {
                        out.push(s.clone());
                    }
                }
                IdlExpr::Epsilon => {}
                IdlExpr::Lock(child) => walk(child, out),
                IdlExpr::Or(children) | IdlExpr::Interleave(children) => {
                    children.iter().for_each(|c| walk(c, out))
                }
                IdlExpr::Concat(left, right) => {
                    walk(left, out);
                    walk(right, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

impl fmt::Display for IdlExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_expr_text(self))
    }
}

impl std::str::FromStr for IdlExpr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr_text(s)
    }
}

fn check_arity(operator: &'static str, found: usize) -> Result<(), ExprError> {
    if found < 2 {
        return Err(ExprError::Arity {
            operator,
            found,
            line: 0,
            column: 0,
        });
    }
    Ok(())
}
