//! Compilation of expressions to IDL-graphs, and the width measures.

use std::fmt;

use serde::Serialize;

use crate::expr::{IdlExpr, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EdgeLabel {
    Sym(Symbol),
    Eps,
    /// Fan-out edge at the start of an interleave.
    IStart,
    /// Fan-in edge at the end of an interleave.
    IEnd,
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Sym(s) => write!(f, "{s}"),
            EdgeLabel::Eps => f.write_str("eps"),
            EdgeLabel::IStart => f.write_str("⊢"),
            EdgeLabel::IEnd => f.write_str("⊣"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
    pub label: EdgeLabel,
}

/// An IDL-graph. Immutable once built.
#[derive(Debug, Clone)]
pub struct IdlGraph {
    edges: Vec<Edge>,
    start: VertexId,
    end: VertexId,
    rank: Vec<u32>,
    /// Outermost lock occurrence whose argument subgraph contains the vertex.
    lock_scope: Vec<Option<u32>>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl IdlGraph {
    pub fn vertex_count(&self) -> usize {
        self.rank.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.rank.len() as u32).map(VertexId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn end(&self) -> VertexId {
        self.end
    }

    pub fn rank(&self, v: VertexId) -> u32 {
        self.rank[v.index()]
    }

    /// Index of the outermost lock whose argument contains `v`, if any.
    pub fn lock_scope(&self, v: VertexId) -> Option<u32> {
        self.lock_scope[v.index()]
    }

    /// Outgoing edges in construction (argument) order.
    pub fn out_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> + '_ {
        self.out_edges[v.index()]
            .iter()
            .map(move |&i| &self.edges[i])
    }

    /// Incoming edges in construction (argument) order.
    pub fn in_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> + '_ {
        self.in_edges[v.index()]
            .iter()
            .map(move |&i| &self.edges[i])
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_edges[v.index()].len()
    }

    /// One edge per line: `from -> to [label] rank(from) rank(to)`.
    pub fn dump(&self) -> String {
        let mut out = format!("start {} end {}\n", self.start, self.end);
        for e in &self.edges {
            out.push_str(&format!(
                "{} -> {} [{}] {} {}\n",
                e.from,
                e.to,
                e.label,
                self.rank(e.from),
                self.rank(e.to)
            ));
        }
        out
    }

    /// Vertices in topological order (Kahn). `None` if there is a cycle.
    pub fn topological_order(&self) -> Option<Vec<VertexId>> {
        let n = self.vertex_count();
        let mut indeg: Vec<usize> = self.in_edges.iter().map(Vec::len).collect();
        let mut queue: Vec<VertexId> = self.vertices().filter(|v| indeg[v.index()] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop() {
            order.push(v);
            for e in self.out_edges(v) {
                indeg[e.to.index()] -= 1;
                if indeg[e.to.index()] == 0 {
                    queue.push(e.to);
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

/// True iff `v` lies outside every lock argument, which is the same as
/// having rank 0.
pub fn is_l_free(g: &IdlGraph, v: VertexId) -> bool {
    g.rank(v) == 0
}

struct Builder {
    edges: Vec<Edge>,
    rank: Vec<u32>,
    lock_scope: Vec<Option<u32>>,
    locks: u32,
}

impl Builder {
    fn vertex(&mut self, rank: u32, scope: Option<u32>) -> VertexId {
        self.rank.push(rank);
        self.lock_scope.push(scope);
        VertexId(self.rank.len() as u32 - 1)
    }

    fn edge(&mut self, from: VertexId, to: VertexId, label: EdgeLabel) {
        self.edges.push(Edge { from, to, label });
    }

    // Returns (start, end) of the subgraph for `e` at lock depth `rank`.
    fn build(&mut self, e: &IdlExpr, rank: u32, scope: Option<u32>) -> (VertexId, VertexId) {
        match e {
            IdlExpr::Terminal(_) | IdlExpr::Epsilon => {
                let s = self.vertex(rank, scope);
                let t = self.vertex(rank, scope);
                let label = match e {
                    IdlExpr::Terminal(sym) => EdgeLabel::Sym(sym.clone()),
                    _ => EdgeLabel::Eps,
                };
                self.edge(s, t, label);
                (s, t)
            }
            IdlExpr::Lock(child) => {
                let s = self.vertex(rank, scope);
                let inner_scope = scope.or_else(|| {
                    self.locks += 1;
                    Some(self.locks - 1)
                });
                let (cs, ce) = self.build(child, rank + 1, inner_scope);
                let t = self.vertex(rank, scope);
                self.edge(s, cs, EdgeLabel::Eps);
                self.edge(ce, t, EdgeLabel::Eps);
                (s, t)
            }
            IdlExpr::Or(children) | IdlExpr::Interleave(children) => {
                let (open, close) = if matches!(e, IdlExpr::Or(_)) {
                    (EdgeLabel::Eps, EdgeLabel::Eps)
                } else {
                    (EdgeLabel::IStart, EdgeLabel::IEnd)
                };
                let s = self.vertex(rank, scope);
                let ends: Vec<_> = children
                    .iter()
                    .map(|c| self.build(c, rank, scope))
                    .collect();
                let t = self.vertex(rank, scope);
                for &(cs, _) in &ends {
                    self.edge(s, cs, open.clone());
                }
                for &(_, ce) in &ends {
                    self.edge(ce, t, close.clone());
                }
                (s, t)
            }
            IdlExpr::Concat(left, right) => {
                let (ls, le) = self.build(left, rank, scope);
                let (rs, re) = self.build(right, rank, scope);
                self.edge(le, rs, EdgeLabel::Eps);
                (ls, re)
            }
        }
    }
}

/// Compiles `e` into its IDL-graph at lock depth 0.
///
/// Vertex ids are assigned in pre-order: each construct numbers its own start
/// vertex before its children and its end vertex after them.
pub fn build_graph(e: &IdlExpr) -> IdlGraph {
    let mut b = Builder {
        edges: Vec::new(),
        rank: Vec::new(),
        lock_scope: Vec::new(),
        locks: 0,
    };
    let (start, end) = b.build(e, 0, None);
    let n = b.rank.len();
    let mut out_edges = vec![Vec::new(); n];
    let mut in_edges = vec![Vec::new(); n];
    for (i, edge) in b.edges.iter().enumerate() {
        out_edges[edge.from.index()].push(i);
        in_edges[edge.to.index()].push(i);
    }
    IdlGraph {
        edges: b.edges,
        start,
        end,
        rank: b.rank,
        lock_scope: b.lock_scope,
        out_edges,
        in_edges,
    }
}

/// Maximum cut length, computed structurally.
pub fn width_of(e: &IdlExpr) -> usize {
    widths(e).0
}

/// Maximum length of a cut made of rank-0 vertices only.
pub fn zero_width_of(e: &IdlExpr) -> usize {
    widths(e).1
}

fn widths(e: &IdlExpr) -> (usize, usize) {
    match e {
        IdlExpr::Terminal(_) | IdlExpr::Epsilon => (1, 1),
        IdlExpr::Lock(child) => (widths(child).0, 1),
        IdlExpr::Or(children) => children
            .iter()
            .map(widths)
            .fold((0, 0), |(w, z), (cw, cz)| (w.max(cw), z.max(cz))),
        IdlExpr::Interleave(children) => {
            let parts: Vec<_> = children.iter().map(widths).collect();
            let zero: usize = parts.iter().map(|p| p.1).sum();
            let width = parts.iter().map(|&(w, z)| w + zero - z).max().unwrap_or(0);
            (width, zero)
        }
        IdlExpr::Concat(left, right) => {
            let (lw, lz) = widths(left);
            let (rw, rz) = widths(right);
            (lw.max(rw), lz.max(rz))
        }
    }
}
