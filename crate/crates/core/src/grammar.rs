//! Context-free grammars and a plain string Earley recognizer.
//!
//! Grammar text is one production per line:
//!
//! ```text
//! # comment
//! S -> NP VP @ -0.5
//! NP -> we
//! VP ->
//! ```
//!
//! Tokens that appear on the left of some production are nonterminals;
//! every other right-hand-side token is a terminal. The first left-hand side
//! is the start symbol. The `@ weight` suffix is all-or-nothing.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::expr::Symbol;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrammarError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("grammar has no productions")]
    Empty,
    #[error("line {line}: weights must be given on every production or on none")]
    PartialWeights { line: usize },
    #[error("unknown nonterminal {0:?}")]
    UnknownNonterminal(String),
    #[error("production {index} has weight {weight}, but weights must be <= 0")]
    PositiveWeight { index: usize, weight: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NonTerminal(pub u32);

impl NonTerminal {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GrammarSymbol {
    N(NonTerminal),
    T(Symbol),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Production {
    pub lhs: NonTerminal,
    pub rhs: Vec<GrammarSymbol>,
    pub weight: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Cfg {
    nonterminals: Vec<String>,
    terminals: BTreeSet<Symbol>,
    productions: Vec<Production>,
    by_lhs: Vec<Vec<usize>>,
    start: NonTerminal,
}

impl Cfg {
    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn start(&self) -> NonTerminal {
        self.start
    }

    pub fn nonterminal_name(&self, n: NonTerminal) -> &str {
        &self.nonterminals[n.index()]
    }

    pub fn nonterminal(&self, name: &str) -> Option<NonTerminal> {
        self.nonterminals
            .iter()
            .position(|n| n == name)
            .map(|i| NonTerminal(i as u32))
    }

    pub fn nonterminal_count(&self) -> usize {
        self.nonterminals.len()
    }

    pub fn terminals(&self) -> &BTreeSet<Symbol> {
        &self.terminals
    }

    /// Indices of the productions rewriting `n`, in file order.
    pub fn productions_for(&self, n: NonTerminal) -> &[usize] {
        &self.by_lhs[n.index()]
    }

    pub fn is_weighted(&self) -> bool {
        self.productions.iter().any(|p| p.weight.is_some())
    }

    /// Copy of this grammar with a different start symbol.
    pub fn with_start(mut self, name: &str) -> Result<Self, GrammarError> {
        self.start = self
            .nonterminal(name)
            .ok_or_else(|| GrammarError::UnknownNonterminal(name.to_string()))?;
        Ok(self)
    }

    /// Fails if any weight is positive.
    pub fn check_weights(&self) -> Result<(), GrammarError> {
        match self
            .productions
            .iter()
            .enumerate()
            .find(|(_, p)| p.weight.is_some_and(|w| w > 0.0))
        {
            Some((index, p)) => Err(GrammarError::PositiveWeight {
                index,
                weight: p.weight.unwrap_or_default(),
            }),
            None => Ok(()),
        }
    }

    /// Weight of production `p`, zero when unweighted.
    pub fn weight(&self, p: usize) -> f64 {
        self.productions[p].weight.unwrap_or(0.0)
    }

    fn symbol_name(&self, s: &GrammarSymbol) -> String {
        match s {
            GrammarSymbol::N(n) => self.nonterminal_name(*n).to_string(),
            GrammarSymbol::T(t) => t.to_string(),
        }
    }
}

impl fmt::Display for Cfg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.productions {
            write!(f, "{} ->", self.nonterminal_name(p.lhs))?;
            for s in &p.rhs {
                write!(f, " {}", self.symbol_name(s))?;
            }
            if let Some(w) = p.weight {
                write!(f, " @ {w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Parses the line-oriented grammar format.
pub fn parse_grammar_text(text: &str) -> Result<Cfg, GrammarError> {
    struct Raw<'a> {
        line: usize,
        lhs: &'a str,
        rhs: Vec<&'a str>,
        weight: Option<f64>,
    }

    let mut raw = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        let mut tokens: Vec<&str> = line
            .split([' ', '\t'])
            .filter(|t| !t.is_empty())
            .take_while(|t| !t.starts_with('#'))
            .collect();
        if tokens.is_empty() {
            continue;
        }
        let syntax = |message: String| GrammarError::Syntax {
            line: line_no,
            message,
        };
        if tokens.len() < 2 || tokens[1] != "->" {
            return Err(syntax("expected `LHS -> rhs`".into()));
        }
        let mut weight = None;
        if let Some(at) = tokens.iter().position(|&t| t == "@") {
            if at + 2 != tokens.len() {
                return Err(syntax("`@` must be followed by exactly one weight".into()));
            }
            let w: f64 = tokens[at + 1]
                .parse()
                .map_err(|_| syntax(format!("bad weight {:?}", tokens[at + 1])))?;
            if !w.is_finite() {
                return Err(syntax(format!("weight {w} is not finite")));
            }
            weight = Some(w);
            tokens.truncate(at);
        }
        let lhs = tokens[0];
        if lhs == "->" || lhs == "@" {
            return Err(syntax(format!("bad left-hand side {lhs:?}")));
        }
        let rhs = tokens[2..].to_vec();
        if let Some(bad) = rhs.iter().find(|&&t| t == "->") {
            return Err(syntax(format!("unexpected {bad:?} in right-hand side")));
        }
        raw.push(Raw {
            line: line_no,
            lhs,
            rhs,
            weight,
        });
    }
    if raw.is_empty() {
        return Err(GrammarError::Empty);
    }
    let weighted = raw[0].weight.is_some();
    if let Some(r) = raw.iter().find(|r| r.weight.is_some() != weighted) {
        return Err(GrammarError::PartialWeights { line: r.line });
    }

    let mut nonterminals: Vec<String> = Vec::new();
    let mut index: HashMap<&str, NonTerminal> = HashMap::new();
    for r in &raw {
        index.entry(r.lhs).or_insert_with(|| {
            nonterminals.push(r.lhs.to_string());
            NonTerminal(nonterminals.len() as u32 - 1)
        });
    }
    let mut terminals = BTreeSet::new();
    let mut by_lhs = vec![Vec::new(); nonterminals.len()];
    let productions = raw
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let lhs = index[r.lhs];
            by_lhs[lhs.index()].push(i);
            let rhs = r
                .rhs
                .iter()
                .map(|&t| match index.get(t) {
                    Some(&n) => GrammarSymbol::N(n),
                    None => {
                        let sym = Symbol::from_token(t);
                        terminals.insert(sym.clone());
                        GrammarSymbol::T(sym)
                    }
                })
                .collect();
            Production {
                lhs,
                rhs,
                weight: r.weight,
            }
        })
        .collect();
    Ok(Cfg {
        nonterminals,
        terminals,
        productions,
        by_lhs,
        start: NonTerminal(0),
    })
}

/// Sum over productions of one plus the right-hand-side length.
pub fn grammar_size(g: &Cfg) -> usize {
    g.productions.iter().map(|p| 1 + p.rhs.len()).sum()
}

/// Classic Earley recognition of a single string.
pub fn earley_recognize_string(g: &Cfg, w: &[Symbol]) -> bool {
    // Item: (production, dot, origin, end).
    type Item = (usize, usize, usize, usize);
    let mut chart: HashSet<Item> = HashSet::new();
    let mut agenda: Vec<Item> = Vec::new();
    // (nonterminal, position) -> items whose dot faces it there.
    let mut waiting: HashMap<(NonTerminal, usize), Vec<Item>> = HashMap::new();
    // (nonterminal, origin) -> end positions of completed items.
    let mut completed: HashMap<(NonTerminal, usize), Vec<usize>> = HashMap::new();
    let mut predicted: HashSet<(NonTerminal, usize)> = HashSet::new();

    let add = |item: Item, chart: &mut HashSet<Item>, agenda: &mut Vec<Item>| {
        if chart.insert(item) {
            agenda.push(item);
        }
    };
    predicted.insert((g.start, 0));
    for &p in g.productions_for(g.start) {
        add((p, 0, 0, 0), &mut chart, &mut agenda);
    }
    while let Some(item @ (p, dot, i, j)) = agenda.pop() {
        let prod = &g.productions[p];
        match prod.rhs.get(dot) {
            Some(GrammarSymbol::T(a)) => {
                if w.get(j) == Some(a) {
                    add((p, dot + 1, i, j + 1), &mut chart, &mut agenda);
                }
            }
            Some(GrammarSymbol::N(b)) => {
                waiting.entry((*b, j)).or_default().push(item);
                if predicted.insert((*b, j)) {
                    for &q in g.productions_for(*b) {
                        add((q, 0, j, j), &mut chart, &mut agenda);
                    }
                }
                if let Some(ends) = completed.get(&(*b, j)) {
                    for &k in ends.clone().iter() {
                        add((p, dot + 1, i, k), &mut chart, &mut agenda);
                    }
                }
            }
            None => {
                completed.entry((prod.lhs, i)).or_default().push(j);
                if let Some(parents) = waiting.get(&(prod.lhs, i)) {
                    for &(q, qdot, qi, _) in parents.clone().iter() {
                        add((q, qdot + 1, qi, j), &mut chart, &mut agenda);
                    }
                }
            }
        }
    }
    g.productions_for(g.start)
        .iter()
        .any(|&p| chart.contains(&(p, g.productions[p].rhs.len(), 0, w.len())))
}
