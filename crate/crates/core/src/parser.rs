//! Earley-style recognition of an IDL-graph against a context-free grammar.
//!
//! Items live on pairs of cuts instead of pairs of string positions:
//!
//! * `[A -> α • β, c1, c2]`: dotted items,
//! * `[c1, c2]`: `c2` is reachable from `c1` through ε-transitions only,
//! * `[a, c1, c2]`: `c2` is reachable from `c1` by ε-transitions followed by
//!   one transition reading `a`.
//!
//! Closure items are only seeded where some dotted item waits for a
//! terminal, and cut successors are requested only when a closure item or a
//! completed start item needs them, so the cut space is unfolded lazily.
//!
//! A single agenda drives every rule. It is a max-heap on item weight; in
//! unweighted runs every weight is zero and the heap degenerates to FIFO
//! order. Weighted runs relax: an item whose weight strictly improves is
//! pushed again and recombined with its partners.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap, HashSet};

use ordered_float::OrderedFloat;
use serde::Serialize;
use thiserror::Error;

use crate::cuts::{CutId, CutStore, TransitionLabel};
use crate::expr::{IdlExpr, Sentence, Symbol};
use crate::grammar::{Cfg, GrammarError, GrammarSymbol, NonTerminal};
use crate::graph::{build_graph, IdlGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

/// Counters describing one parse session.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParseStats {
    pub interned_cuts: usize,
    pub expanded_cuts: usize,
    pub cached_transitions: usize,
    pub dotted_items: usize,
    pub closure_items: usize,
    pub scan_items: usize,
    pub agenda_pops: usize,
}

/// Outcome of [`recognize`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Recognition {
    pub accepted: bool,
    pub stats: ParseStats,
}

/// Highest-weight member of the intersection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestString {
    pub sentence: Sentence,
    pub weight: f64,
}

/// A dotted item as seen from outside the session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DottedItem {
    pub production: usize,
    pub dot: usize,
    pub left: CutId,
    pub right: CutId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct ItemId(u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Item {
    /// `pos` indexes the flattened (production, dot) table.
    Dotted {
        pos: u32,
        left: CutId,
        right: CutId,
    },
    Closure {
        anchor: CutId,
        frontier: CutId,
    },
    Scan {
        term: u32,
        from: CutId,
        to: CutId,
    },
}

#[derive(Debug, Clone, Copy)]
enum Back {
    Axiom,
    /// Advanced over a terminal by a scan item.
    Scan {
        prev: ItemId,
        scan: ItemId,
    },
    /// Advanced over a nonterminal by a completed child.
    Complete {
        prev: ItemId,
        child: ItemId,
    },
    /// Completed start item carried across an ε-transition.
    Extend {
        prev: ItemId,
    },
}

struct Record {
    item: Item,
    weight: f64,
    back: Back,
    processed: bool,
}

/// One row of the item table for a fixed pair of cuts.
#[derive(Default)]
struct Cell {
    dotted: Vec<Option<ItemId>>,
    closure: Option<ItemId>,
    scans: Vec<(u32, ItemId)>,
}

struct AgendaEntry {
    weight: OrderedFloat<f64>,
    seq: Reverse<u64>,
    id: ItemId,
}

impl PartialEq for AgendaEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for AgendaEntry {}

impl PartialOrd for AgendaEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AgendaEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.weight, self.seq).cmp(&(other.weight, other.seq))
    }
}

/// Grammar positions flattened to dense ids.
struct Positions {
    offset: Vec<u32>,
    table: Vec<(usize, usize)>,
    /// Terminal at each position (dense id), if the dot faces one.
    terminal: Vec<Option<u32>>,
    terms: HashMap<Symbol, u32>,
    symbols: Vec<Symbol>,
}

impl Positions {
    fn new(g: &Cfg) -> Self {
        let mut offset = Vec::new();
        let mut table = Vec::new();
        let mut terminal = Vec::new();
        let terms: HashMap<Symbol, u32> = g
            .terminals()
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        for (p, prod) in g.productions().iter().enumerate() {
            offset.push(table.len() as u32);
            for dot in 0..=prod.rhs.len() {
                table.push((p, dot));
                terminal.push(match prod.rhs.get(dot) {
                    Some(GrammarSymbol::T(a)) => Some(terms[a]),
                    _ => None,
                });
            }
        }
        Positions {
            offset,
            table,
            terminal,
            terms,
            symbols: g.terminals().iter().cloned().collect(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Recognize,
    Viterbi,
}

/// One parse of one graph with one grammar. Owns the cut store, so cuts and
/// transitions discovered by one run are reused by the next.
pub struct ParseSession<'a> {
    grammar: &'a Cfg,
    store: CutStore<'a>,
    pos: Positions,
    records: Vec<Record>,
    table: HashMap<(CutId, CutId), Cell>,
    agenda: BinaryHeap<AgendaEntry>,
    seq: u64,
    waiting_terminal: HashMap<(CutId, u32), Vec<ItemId>>,
    scans_from: HashMap<(CutId, u32), Vec<ItemId>>,
    waiting_nonterminal: HashMap<(CutId, NonTerminal), Vec<ItemId>>,
    completed: HashMap<(CutId, NonTerminal), Vec<ItemId>>,
    predicted: HashSet<(CutId, NonTerminal)>,
    initial: CutId,
    pops: usize,
    goal_seen: bool,
}

impl<'a> ParseSession<'a> {
    pub fn new(grammar: &'a Cfg, graph: &'a IdlGraph) -> Self {
        let mut store = CutStore::new(graph);
        let initial = store.initial_cut();
        ParseSession {
            grammar,
            store,
            pos: Positions::new(grammar),
            records: Vec::new(),
            table: HashMap::new(),
            agenda: BinaryHeap::new(),
            seq: 0,
            waiting_terminal: HashMap::new(),
            scans_from: HashMap::new(),
            waiting_nonterminal: HashMap::new(),
            completed: HashMap::new(),
            predicted: HashSet::new(),
            initial,
            pops: 0,
            goal_seen: false,
        }
    }

    pub fn cuts(&self) -> &CutStore<'a> {
        &self.store
    }

    /// Whether the graph's language meets the grammar's.
    pub fn recognize(&mut self) -> bool {
        self.run(Mode::Recognize);
        self.goal_seen
    }

    /// The best-weighted string of the intersection with that weight.
    pub fn best_string(&mut self) -> Result<Option<BestString>, ParseError> {
        self.grammar.check_weights()?;
        self.run(Mode::Viterbi);
        let goals: Vec<ItemId> = (0..self.records.len() as u32)
            .map(ItemId)
            .filter(|&id| self.is_goal(self.records[id.0 as usize].item))
            .collect();
        let Some(best) = goals
            .iter()
            .map(|id| OrderedFloat(self.records[id.0 as usize].weight))
            .max()
        else {
            return Ok(None);
        };
        let sentence = goals
            .iter()
            .filter(|id| OrderedFloat(self.records[id.0 as usize].weight) == best)
            .map(|&id| self.yield_of(id))
            .min()
            .expect("at least one goal item");
        Ok(Some(BestString {
            sentence,
            weight: best.0,
        }))
    }

    pub fn stats(&self) -> ParseStats {
        let mut stats = ParseStats {
            interned_cuts: self.store.interned(),
            expanded_cuts: self.store.expanded(),
            cached_transitions: self.store.cached_transitions(),
            agenda_pops: self.pops,
            ..ParseStats::default()
        };
        for r in &self.records {
            match r.item {
                Item::Dotted { .. } => stats.dotted_items += 1,
                Item::Closure { .. } => stats.closure_items += 1,
                Item::Scan { .. } => stats.scan_items += 1,
            }
        }
        stats
    }

    /// Every dotted item derived by the last run.
    pub fn dotted_items(&self) -> Vec<DottedItem> {
        self.records
            .iter()
            .filter_map(|r| match r.item {
                Item::Dotted { pos, left, right } => {
                    let (production, dot) = self.pos.table[pos as usize];
                    Some(DottedItem {
                        production,
                        dot,
                        left,
                        right,
                    })
                }
                _ => None,
            })
            .collect()
    }

    /// Terminals covered by the recorded derivation of a dotted item, with
    /// its weight.
    pub fn item_derivation(&self, item: &DottedItem) -> Option<(Sentence, f64)> {
        let pos = self.pos.offset[item.production] + item.dot as u32;
        let id = self
            .table
            .get(&(item.left, item.right))?
            .dotted
            .get(pos as usize)
            .copied()
            .flatten()?;
        Some((self.yield_of(id), self.records[id.0 as usize].weight))
    }

    fn reset(&mut self) {
        self.records.clear();
        self.table.clear();
        self.agenda.clear();
        self.waiting_terminal.clear();
        self.scans_from.clear();
        self.waiting_nonterminal.clear();
        self.completed.clear();
        self.predicted.clear();
        self.seq = 0;
        self.pops = 0;
        self.goal_seen = false;
    }

    fn run(&mut self, mode: Mode) {
        self.reset();
        let start = self.grammar.start();
        let vs = self.initial;
        self.predicted.insert((vs, start));
        for &p in self.grammar.productions_for(start) {
            let pos = self.pos.offset[p];
            self.offer(
                Item::Dotted {
                    pos,
                    left: vs,
                    right: vs,
                },
                self.weight_of(p, mode),
                Back::Axiom,
            );
        }
        while let Some(entry) = self.agenda.pop() {
            if mode == Mode::Recognize && self.goal_seen {
                break;
            }
            let record = &self.records[entry.id.0 as usize];
            if entry.weight.0 < record.weight {
                continue;
            }
            self.pops += 1;
            let first = !record.processed;
            self.records[entry.id.0 as usize].processed = true;
            self.process(entry.id, first, mode);
        }
    }

    fn weight_of(&self, production: usize, mode: Mode) -> f64 {
        match mode {
            Mode::Recognize => 0.0,
            Mode::Viterbi => self.grammar.weight(production),
        }
    }

    fn is_goal(&self, item: Item) -> bool {
        let Item::Dotted { pos, left, right } = item else {
            return false;
        };
        let (p, dot) = self.pos.table[pos as usize];
        let prod = &self.grammar.productions()[p];
        left == self.initial
            && prod.lhs == self.grammar.start()
            && dot == prod.rhs.len()
            && self.store.final_cut() == Some(right)
    }

    /// Adds `item` or improves its weight; returns its id.
    fn offer(&mut self, item: Item, weight: f64, back: Back) -> ItemId {
        let (left, right) = match item {
            Item::Dotted { left, right, .. } => (left, right),
            Item::Closure { anchor, frontier } => (anchor, frontier),
            Item::Scan { from, to, .. } => (from, to),
        };
        let positions = self.pos.table.len();
        let cell = self.table.entry((left, right)).or_default();
        let slot = match item {
            Item::Dotted { pos, .. } => {
                if cell.dotted.is_empty() {
                    cell.dotted = vec![None; positions];
                }
                cell.dotted[pos as usize]
            }
            Item::Closure { .. } => cell.closure,
            Item::Scan { term, .. } => cell
                .scans
                .iter()
                .find(|(t, _)| *t == term)
                .map(|&(_, id)| id),
        };
        let id = match slot {
            Some(id) => {
                let record = &mut self.records[id.0 as usize];
                if weight <= record.weight {
                    return id;
                }
                record.weight = weight;
                record.back = back;
                id
            }
            None => {
                let id = ItemId(self.records.len() as u32);
                match item {
                    Item::Dotted { pos, .. } => cell.dotted[pos as usize] = Some(id),
                    Item::Closure { .. } => cell.closure = Some(id),
                    Item::Scan { term, .. } => cell.scans.push((term, id)),
                }
                self.records.push(Record {
                    item,
                    weight,
                    back,
                    processed: false,
                });
                if self.is_goal(item) {
                    self.goal_seen = true;
                }
                id
            }
        };
        self.seq += 1;
        self.agenda.push(AgendaEntry {
            weight: OrderedFloat(weight),
            seq: Reverse(self.seq),
            id,
        });
        id
    }

    fn process(&mut self, id: ItemId, first: bool, mode: Mode) {
        let Record { item, weight, .. } = self.records[id.0 as usize];
        match item {
            Item::Dotted { pos, left, right } => {
                let (p, dot) = self.pos.table[pos as usize];
                let prod = &self.grammar.productions()[p];
                match prod.rhs.get(dot) {
                    Some(GrammarSymbol::T(_)) => {
                        let term = self.pos.terminal[pos as usize].expect("terminal position");
                        if first {
                            self.waiting_terminal
                                .entry((right, term))
                                .or_default()
                                .push(id);
                        }
                        self.offer(
                            Item::Closure {
                                anchor: right,
                                frontier: right,
                            },
                            0.0,
                            Back::Axiom,
                        );
                        let scans = self
                            .scans_from
                            .get(&(right, term))
                            .cloned()
                            .unwrap_or_default();
                        for scan in scans {
                            let Item::Scan { to, .. } = self.records[scan.0 as usize].item else {
                                unreachable!()
                            };
                            self.offer(
                                Item::Dotted {
                                    pos: pos + 1,
                                    left,
                                    right: to,
                                },
                                weight,
                                Back::Scan { prev: id, scan },
                            );
                        }
                    }
                    Some(GrammarSymbol::N(b)) => {
                        let b = *b;
                        if first {
                            self.waiting_nonterminal
                                .entry((right, b))
                                .or_default()
                                .push(id);
                        }
                        if self.predicted.insert((right, b)) {
                            for &q in self.grammar.productions_for(b) {
                                self.offer(
                                    Item::Dotted {
                                        pos: self.pos.offset[q],
                                        left: right,
                                        right,
                                    },
                                    self.weight_of(q, mode),
                                    Back::Axiom,
                                );
                            }
                        }
                        let children = self.completed.get(&(right, b)).cloned().unwrap_or_default();
                        for child in children {
                            let child_record = &self.records[child.0 as usize];
                            let Item::Dotted { right: end, .. } = child_record.item else {
                                unreachable!()
                            };
                            let w = weight + child_record.weight;
                            self.offer(
                                Item::Dotted {
                                    pos: pos + 1,
                                    left,
                                    right: end,
                                },
                                w,
                                Back::Complete { prev: id, child },
                            );
                        }
                    }
                    None => {
                        let lhs = prod.lhs;
                        if first {
                            self.completed.entry((left, lhs)).or_default().push(id);
                        }
                        let parents = self
                            .waiting_nonterminal
                            .get(&(left, lhs))
                            .cloned()
                            .unwrap_or_default();
                        for parent in parents {
                            let parent_record = &self.records[parent.0 as usize];
                            let Item::Dotted {
                                pos: ppos,
                                left: pleft,
                                ..
                            } = parent_record.item
                            else {
                                unreachable!()
                            };
                            let w = parent_record.weight + weight;
                            self.offer(
                                Item::Dotted {
                                    pos: ppos + 1,
                                    left: pleft,
                                    right,
                                },
                                w,
                                Back::Complete {
                                    prev: parent,
                                    child: id,
                                },
                            );
                        }
                        if lhs == self.grammar.start() && left == self.initial {
                            for t in self.store.successors(right).iter() {
                                if t.label == TransitionLabel::Eps {
                                    self.offer(
                                        Item::Dotted {
                                            pos,
                                            left,
                                            right: t.to,
                                        },
                                        weight,
                                        Back::Extend { prev: id },
                                    );
                                }
                            }
                        }
                    }
                }
            }
            Item::Closure { anchor, frontier } => {
                for t in self.store.successors(frontier).iter() {
                    match &t.label {
                        TransitionLabel::Eps => {
                            self.offer(
                                Item::Closure {
                                    anchor,
                                    frontier: t.to,
                                },
                                0.0,
                                Back::Axiom,
                            );
                        }
                        TransitionLabel::Sym(a) => {
                            // Symbols outside the grammar can never be scanned.
                            if let Some(&term) = self.pos.terms.get(a) {
                                self.offer(
                                    Item::Scan {
                                        term,
                                        from: anchor,
                                        to: t.to,
                                    },
                                    0.0,
                                    Back::Axiom,
                                );
                            }
                        }
                    }
                }
            }
            Item::Scan { term, from, to } => {
                if first {
                    self.scans_from.entry((from, term)).or_default().push(id);
                }
                let waiting = self
                    .waiting_terminal
                    .get(&(from, term))
                    .cloned()
                    .unwrap_or_default();
                for parent in waiting {
                    let parent_record = &self.records[parent.0 as usize];
                    let Item::Dotted {
                        pos: ppos,
                        left: pleft,
                        ..
                    } = parent_record.item
                    else {
                        unreachable!()
                    };
                    let w = parent_record.weight;
                    self.offer(
                        Item::Dotted {
                            pos: ppos + 1,
                            left: pleft,
                            right: to,
                        },
                        w,
                        Back::Scan {
                            prev: parent,
                            scan: id,
                        },
                    );
                }
            }
        }
    }

    fn yield_of(&self, id: ItemId) -> Sentence {
        enum Frame {
            Item(ItemId),
            Term(u32),
        }
        let mut out = Vec::new();
        let mut stack = vec![Frame::Item(id)];
        // Right parts are pushed first so the leftmost part is emitted first.
        while let Some(frame) = stack.pop() {
            let id = match frame {
                Frame::Term(term) => {
                    out.push(self.pos.symbols[term as usize].clone());
                    continue;
                }
                Frame::Item(id) => id,
            };
            match self.records[id.0 as usize].back {
                Back::Axiom => {}
                Back::Scan { prev, scan } => {
                    let Item::Scan { term, .. } = self.records[scan.0 as usize].item else {
                        unreachable!()
                    };
                    stack.push(Frame::Term(term));
                    stack.push(Frame::Item(prev));
                }
                Back::Complete { prev, child } => {
                    stack.push(Frame::Item(child));
                    stack.push(Frame::Item(prev));
                }
                Back::Extend { prev } => stack.push(Frame::Item(prev)),
            }
        }
        out
    }
}

/// Decides whether `L(e)` and `L(g)` share a string.
pub fn recognize(g: &Cfg, e: &IdlExpr) -> Recognition {
    let graph = build_graph(e);
    let mut session = ParseSession::new(g, &graph);
    let accepted = session.recognize();
    Recognition {
        accepted,
        stats: session.stats(),
    }
}

/// Highest-weight string of `L(e) ∩ L(g)`, or `None` if the intersection is
/// empty. Unweighted grammars score every derivation 0.
pub fn best_string(g: &Cfg, e: &IdlExpr) -> Result<Option<BestString>, ParseError> {
    let graph = build_graph(e);
    ParseSession::new(g, &graph).best_string()
}
