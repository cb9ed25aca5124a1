//! Shared generators and brute-force oracles for the integration tests.
//!
//! The oracles here never call into the parser or the graph code: string
//! membership and best derivation weights come from a span table filled by
//! fixpoint iteration, and cut-path membership from a direct walk over
//! successors.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use idl_core::{
    parse_grammar_text, Cfg, CutId, CutStore, GrammarSymbol, IdlExpr, Sentence, Symbol,
    TransitionLabel,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub const WORDS: [&str; 3] = ["a", "b", "c"];

pub fn sym(s: &str) -> Symbol {
    Symbol::new(s).unwrap()
}

pub fn words(s: &str) -> Sentence {
    s.split_whitespace().map(sym).collect()
}

/// Random expression with exactly `ops` operator occurrences (concatenation
/// included), over the three-word alphabet. `eps_rate` is the chance that a
/// leaf is `eps`.
pub fn random_expr<R: Rng>(rng: &mut R, ops: usize, eps_rate: f64) -> IdlExpr {
    if ops == 0 {
        return if rng.gen_bool(eps_rate) {
            IdlExpr::Epsilon
        } else {
            IdlExpr::word(WORDS.choose(rng).unwrap()).unwrap()
        };
    }
    let rest = ops - 1;
    match rng.gen_range(0..4) {
        0 => IdlExpr::lock(random_expr(rng, rest, eps_rate)),
        1 => {
            let left = rng.gen_range(0..=rest);
            IdlExpr::concat(
                random_expr(rng, left, eps_rate),
                random_expr(rng, rest - left, eps_rate),
            )
        }
        kind => {
            let arity = rng.gen_range(2..=3);
            let budgets = split_budget(rng, rest, arity);
            let children = budgets
                .into_iter()
                .map(|b| random_expr(rng, b, eps_rate))
                .collect();
            if kind == 2 {
                IdlExpr::Or(children)
            } else {
                IdlExpr::Interleave(children)
            }
        }
    }
}

fn split_budget<R: Rng>(rng: &mut R, total: usize, parts: usize) -> Vec<usize> {
    let mut out = vec![0; parts];
    for _ in 0..total {
        out[rng.gen_range(0..parts)] += 1;
    }
    out
}

/// Random small grammar over `a b c` with nonterminals `S A B`.
pub fn random_grammar_text<R: Rng>(rng: &mut R, weighted: bool) -> String {
    const WEIGHTS: [f64; 6] = [0.0, -0.25, -0.5, -1.0, -1.5, -2.0];
    let nts = ["S", "A", "B"];
    let rhs_pool = ["a", "b", "c", "a", "b", "c", "S", "A", "B"];
    let mut lines = Vec::new();
    // Every nonterminal gets at least one production so references resolve
    // to nonterminals rather than terminals named A or B.
    for nt in nts {
        let count = if nt == "S" {
            rng.gen_range(1..=3)
        } else {
            rng.gen_range(1..=2)
        };
        for _ in 0..count {
            let len = rng.gen_range(0..=3);
            let rhs: Vec<&str> = (0..len).map(|_| *rhs_pool.choose(rng).unwrap()).collect();
            let mut line = format!("{nt} -> {}", rhs.join(" "));
            if weighted {
                line.push_str(&format!(" @ {}", WEIGHTS.choose(rng).unwrap()));
            }
            lines.push(line);
        }
    }
    lines.join("\n")
}

pub fn random_grammar<R: Rng>(rng: &mut R, weighted: bool) -> Cfg {
    parse_grammar_text(&random_grammar_text(rng, weighted)).unwrap()
}

/// Best derivation weight of `w` from the start symbol, `None` if `w` is
/// not in the language. Unweighted grammars score 0.
///
/// `best[A][i][j]` is filled by repeated relaxation until nothing changes;
/// with weights <= 0 the optimum is reached by derivations that never
/// repeat an item along a path, so the iteration terminates.
pub fn span_best(g: &Cfg, w: &[Symbol]) -> Option<f64> {
    let table = span_table(g, w);
    let v = table[g.start().index()][0][w.len()];
    v.is_finite().then_some(v)
}

pub fn span_table(g: &Cfg, w: &[Symbol]) -> Vec<Vec<Vec<f64>>> {
    let n = w.len();
    let mut best = vec![vec![vec![f64::NEG_INFINITY; n + 1]; n + 1]; g.nonterminal_count()];
    loop {
        let mut changed = false;
        for (p, prod) in g.productions().iter().enumerate() {
            let weight = g.weight(p);
            for i in 0..=n {
                let reach = sequence_from(&best, &prod.rhs, w, i);
                for j in i..=n {
                    let cand = reach[j] + weight;
                    let cell = &mut best[prod.lhs.index()][i][j];
                    if cand > *cell {
                        *cell = cand;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return best;
        }
    }
}

/// `out[j]` = best weight for `rhs` covering `w[i..j]`.
pub fn sequence_from(
    best: &[Vec<Vec<f64>>],
    rhs: &[GrammarSymbol],
    w: &[Symbol],
    i: usize,
) -> Vec<f64> {
    let n = w.len();
    let mut cur = vec![f64::NEG_INFINITY; n + 1];
    cur[i] = 0.0;
    for s in rhs {
        let mut next = vec![f64::NEG_INFINITY; n + 1];
        for k in i..=n {
            if !cur[k].is_finite() {
                continue;
            }
            match s {
                GrammarSymbol::T(a) => {
                    if w.get(k) == Some(a) {
                        next[k + 1] = next[k + 1].max(cur[k]);
                    }
                }
                GrammarSymbol::N(b) => {
                    for j in k..=n {
                        next[j] = next[j].max(cur[k] + best[b.index()][k][j]);
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

/// Every terminal string of length <= `max_len` reachable by leftmost
/// rewriting within `max_steps` steps.
pub fn bounded_derivations(g: &Cfg, max_len: usize, max_steps: usize) -> BTreeSet<Sentence> {
    let mut out = BTreeSet::new();
    let mut frontier: Vec<Vec<GrammarSymbol>> = vec![vec![GrammarSymbol::N(g.start())]];
    let mut seen: HashSet<Vec<GrammarSymbol>> = frontier.iter().cloned().collect();
    for _ in 0..=max_steps {
        let mut next = Vec::new();
        for form in frontier {
            let terminals = form
                .iter()
                .filter(|s| matches!(s, GrammarSymbol::T(_)))
                .count();
            if terminals > max_len {
                continue;
            }
            let Some(at) = form.iter().position(|s| matches!(s, GrammarSymbol::N(_))) else {
                out.insert(
                    form.iter()
                        .map(|s| match s {
                            GrammarSymbol::T(t) => t.clone(),
                            GrammarSymbol::N(_) => unreachable!(),
                        })
                        .collect(),
                );
                continue;
            };
            let GrammarSymbol::N(nt) = form[at] else {
                unreachable!()
            };
            for &p in g.productions_for(nt) {
                let mut rewritten = form[..at].to_vec();
                rewritten.extend(g.productions()[p].rhs.iter().cloned());
                rewritten.extend(form[at + 1..].iter().cloned());
                if rewritten.len() <= max_len + 6 && seen.insert(rewritten.clone()) {
                    next.push(rewritten);
                }
            }
        }
        frontier = next;
    }
    out
}

/// Whether some path of cut transitions from `from` to `to` spells `w`.
pub fn spells(store: &mut CutStore<'_>, from: CutId, to: CutId, w: &[Symbol]) -> bool {
    let mut stack = vec![(from, 0usize)];
    let mut seen = HashSet::new();
    while let Some((c, k)) = stack.pop() {
        if !seen.insert((c, k)) {
            continue;
        }
        if c == to && k == w.len() {
            return true;
        }
        for t in store.successors(c).iter() {
            match &t.label {
                TransitionLabel::Eps => stack.push((t.to, k)),
                TransitionLabel::Sym(a) => {
                    if w.get(k) == Some(a) {
                        stack.push((t.to, k + 1));
                    }
                }
            }
        }
    }
    false
}

/// True if some string leads from `from` to `to` (the cut is reachable).
pub fn reachable(store: &mut CutStore<'_>, from: CutId, to: CutId) -> bool {
    let mut stack = vec![from];
    let mut seen = HashSet::new();
    while let Some(c) = stack.pop() {
        if c == to {
            return true;
        }
        if seen.insert(c) {
            stack.extend(store.successors(c).iter().map(|t| t.to));
        }
    }
    false
}
