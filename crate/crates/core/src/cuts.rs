//! Cuts of an IDL-graph and the one-step relation between them.
//!
//! A cut is a duplicate-free sequence of vertices being traversed in
//! parallel. Successors are computed on demand and cached per cut, so the
//! cut space is only unfolded as far as a caller walks it.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::rc::Rc;

use indexmap::IndexSet;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{Sentence, Symbol};
use crate::graph::{EdgeLabel, IdlGraph, VertexId};

/// Default bound on the number of cuts visited by exhaustive enumeration.
pub const DEFAULT_CUT_CAP: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CutError {
    #[error("cut space exceeds cap of {cap} cuts")]
    CutCapExceeded { cap: usize },
    #[error("language exceeds cap of {cap} strings")]
    LanguageCapExceeded { cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct CutId(pub u32);

impl CutId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for CutId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TransitionLabel {
    Sym(Symbol),
    Eps,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub from: CutId,
    pub label: TransitionLabel,
    pub to: CutId,
}

/// Result of checking `|cut| <= (|V| / k)^k` with `k` the maximum cut length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutBoundReport {
    pub count: usize,
    pub vertices: usize,
    pub width: usize,
    pub bound: f64,
    pub holds: bool,
}

/// Interned cuts plus the lazily built transition cache for one graph.
pub struct CutStore<'g> {
    graph: &'g IdlGraph,
    cuts: IndexSet<Box<[VertexId]>>,
    successors: Vec<Option<Rc<[Transition]>>>,
    transitions: usize,
}

impl<'g> CutStore<'g> {
    pub fn new(graph: &'g IdlGraph) -> Self {
        CutStore {
            graph,
            cuts: IndexSet::new(),
            successors: Vec::new(),
            transitions: 0,
        }
    }

    pub fn graph(&self) -> &'g IdlGraph {
        self.graph
    }

    fn intern(&mut self, cut: Box<[VertexId]>) -> CutId {
        let (index, fresh) = self.cuts.insert_full(cut);
        if fresh {
            self.successors.push(None);
        }
        CutId(index as u32)
    }

    /// The singleton cut holding the start vertex.
    pub fn initial_cut(&mut self) -> CutId {
        self.intern(Box::new([self.graph.start()]))
    }

    /// The singleton cut holding the end vertex, if it has been reached.
    pub fn final_cut(&self) -> Option<CutId> {
        self.lookup(&[self.graph.end()])
    }

    pub fn lookup(&self, vertices: &[VertexId]) -> Option<CutId> {
        self.cuts.get_index_of(vertices).map(|i| CutId(i as u32))
    }

    pub fn cut(&self, id: CutId) -> &[VertexId] {
        &self.cuts[id.index()]
    }

    /// Number of cuts interned so far.
    pub fn interned(&self) -> usize {
        self.cuts.len()
    }

    /// Number of cuts whose successors have been computed.
    pub fn expanded(&self) -> usize {
        self.successors.iter().filter(|s| s.is_some()).count()
    }

    /// Number of cached transitions.
    pub fn cached_transitions(&self) -> usize {
        self.transitions
    }

    /// The outgoing transitions of `c`, computed on first request.
    pub fn successors(&mut self, c: CutId) -> Rc<[Transition]> {
        if let Some(cached) = &self.successors[c.index()] {
            return Rc::clone(cached);
        }
        let targets = self.expand(c);
        let list: Rc<[Transition]> = targets
            .into_iter()
            .map(|(label, cut)| Transition {
                from: c,
                label,
                to: self.intern(cut),
            })
            .collect();
        debug_assert!(
            {
                let mut seen: Vec<_> = list.iter().map(|t| t.to).collect();
                seen.sort();
                seen.windows(2).all(|w| w[0] != w[1])
            },
            "two transitions between the same pair of cuts"
        );
        self.transitions += list.len();
        self.successors[c.index()] = Some(Rc::clone(&list));
        list
    }

    fn expand(&self, c: CutId) -> Vec<(TransitionLabel, Box<[VertexId]>)> {
        let g = self.graph;
        let cut = self.cut(c);
        let top = cut.iter().map(|&v| g.rank(v)).max().unwrap_or(0);
        let mut out = Vec::new();
        let replace = |at: usize, len: usize, with: &[VertexId]| -> Box<[VertexId]> {
            let mut next = Vec::with_capacity(cut.len() + with.len() - len);
            next.extend_from_slice(&cut[..at]);
            next.extend_from_slice(with);
            next.extend_from_slice(&cut[at + len..]);
            next.into_boxed_slice()
        };
        for (at, &v) in cut.iter().enumerate() {
            if g.rank(v) != top {
                continue;
            }
            let outs: Vec<_> = g.out_edges(v).collect();
            let Some(first) = outs.first() else {
                continue;
            };
            match first.label {
                EdgeLabel::IStart => {
                    assert!(
                        outs.iter().all(|e| e.label == EdgeLabel::IStart),
                        "mixed fan-out at {v}"
                    );
                    let targets: Vec<VertexId> = outs.iter().map(|e| e.to).collect();
                    out.push((TransitionLabel::Eps, replace(at, 1, &targets)));
                }
                EdgeLabel::IEnd => {
                    // Only the first member of a fan-in block fires the join.
                    let join = first.to;
                    let preds: Vec<VertexId> = g.in_edges(join).map(|e| e.from).collect();
                    if preds[0] != v || at + preds.len() > cut.len() {
                        continue;
                    }
                    let block = &cut[at..at + preds.len()];
                    if block == preds.as_slice() && block.iter().all(|&u| g.rank(u) == top) {
                        out.push((TransitionLabel::Eps, replace(at, preds.len(), &[join])));
                    }
                }
                _ => {
                    for e in &outs {
                        let label = match &e.label {
                            EdgeLabel::Sym(s) => TransitionLabel::Sym(s.clone()),
                            EdgeLabel::Eps => TransitionLabel::Eps,
                            other => panic!("mixed out-edges at {v}: {other}"),
                        };
                        out.push((label, replace(at, 1, &[e.to])));
                    }
                }
            }
        }
        out
    }

    /// Breadth-first closure from the initial cut. Returns every cut of the
    /// graph in discovery order, or an error once more than `cap` are found.
    pub fn enumerate_cuts(&mut self, cap: usize) -> Result<Vec<CutId>, CutError> {
        let start = self.initial_cut();
        let mut seen = vec![false; self.interned()];
        seen[start.index()] = true;
        let mut order = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for t in self.successors(c).iter() {
                if seen.len() <= t.to.index() {
                    seen.resize(t.to.index() + 1, false);
                }
                if !seen[t.to.index()] {
                    seen[t.to.index()] = true;
                    order.push(t.to);
                    if order.len() > cap {
                        return Err(CutError::CutCapExceeded { cap });
                    }
                    queue.push_back(t.to);
                }
            }
        }
        Ok(order)
    }

    /// Enumerates the cut space and checks the `(|V|/k)^k` bound.
    pub fn check_cut_bound(&mut self, cap: usize) -> Result<CutBoundReport, CutError> {
        let all = self.enumerate_cuts(cap)?;
        let count = all.len();
        let width = all.iter().map(|&c| self.cut(c).len()).max().unwrap_or(1);
        let vertices = self.graph.vertex_count();
        let bound = (vertices as f64 / width as f64).powi(width as i32);
        Ok(CutBoundReport {
            count,
            vertices,
            width,
            bound,
            holds: count as f64 <= bound * (1.0 + 1e-12),
        })
    }

    /// Every string spelled by a path from the initial cut to the final cut.
    pub fn graph_language(
        &mut self,
        cut_cap: usize,
        lang_cap: usize,
    ) -> Result<BTreeSet<Sentence>, CutError> {
        self.enumerate_cuts(cut_cap)?;
        let start = self.initial_cut();
        let end = self.final_cut().expect("the end cut is always reachable");
        let mut memo = HashMap::new();
        let lang = self.suffixes(start, end, lang_cap, &mut memo)?;
        Ok(Rc::try_unwrap(lang).unwrap_or_else(|shared| (*shared).clone()))
    }

    fn suffixes(
        &mut self,
        c: CutId,
        end: CutId,
        cap: usize,
        memo: &mut HashMap<CutId, Rc<BTreeSet<Sentence>>>,
    ) -> Result<Rc<BTreeSet<Sentence>>, CutError> {
        if let Some(done) = memo.get(&c) {
            return Ok(Rc::clone(done));
        }
        let mut out = BTreeSet::new();
        if c == end {
            out.insert(Vec::new());
        }
        for t in self.successors(c).iter() {
            let tail = self.suffixes(t.to, end, cap, memo)?;
            match &t.label {
                TransitionLabel::Eps => out.extend(tail.iter().cloned()),
                TransitionLabel::Sym(s) => out.extend(tail.iter().map(|w| {
                    let mut full = Vec::with_capacity(w.len() + 1);
                    full.push(s.clone());
                    full.extend(w.iter().cloned());
                    full
                })),
            }
            if out.len() > cap {
                return Err(CutError::LanguageCapExceeded { cap });
            }
        }
        let out = Rc::new(out);
        memo.insert(c, Rc::clone(&out));
        Ok(out)
    }
}
