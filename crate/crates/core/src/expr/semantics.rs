//! Declarative semantics by explicit set construction.
//!
//! Everything here is exponential in the worst case and exists to provide
//! ground truth for the graph and parser modules. Set sizes are capped.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::{ExprError, IdlExpr, Symbol};

/// Default bound on any intermediate set built while expanding an expression.
pub const DEFAULT_SET_CAP: usize = 1_000_000;

/// A plain string over the terminal alphabet.
pub type Sentence = Vec<Symbol>;

/// Space-separated rendering of a sentence; the empty sentence is `""`.
pub fn sentence_to_string(s: &[Symbol]) -> String {
    let words: Vec<&str> = s.iter().map(Symbol::as_str).collect();
    words.join(" ")
}

/// A sequence of strings, written with `◇` between consecutive segments.
///
/// Stored segment-wise: a marked string with `n` separators has `n + 1`
/// segments, so the empty marked string is a single empty segment.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MarkedString {
    segments: Vec<Sentence>,
}

impl MarkedString {
    pub fn empty() -> Self {
        MarkedString {
            segments: vec![Vec::new()],
        }
    }

    pub fn single(sym: Symbol) -> Self {
        MarkedString {
            segments: vec![vec![sym]],
        }
    }

    /// Builds from segments; an empty list is treated as the empty string.
    pub fn from_segments(segments: Vec<Sentence>) -> Self {
        if segments.is_empty() {
            Self::empty()
        } else {
            MarkedString { segments }
        }
    }

    pub fn segments(&self) -> &[Sentence] {
        &self.segments
    }

    /// `x ◇ y`
    pub fn join(&self, other: &MarkedString) -> MarkedString {
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        MarkedString { segments }
    }

    /// True when no separator is leading, trailing or doubled.
    ///
    /// Holds for everything `sigma` produces from an expression without
    /// `eps`; an `eps` operand contributes a legitimately empty segment.
    pub fn is_well_placed(&self) -> bool {
        self.segments.len() == 1 || self.segments.iter().all(|s| !s.is_empty())
    }

    /// All symbols in order, separators dropped.
    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.segments.iter().flatten()
    }
}

impl fmt::Display for MarkedString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, seg) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str("◇")?;
            }
            f.write_str(&sentence_to_string(seg))?;
        }
        Ok(())
    }
}

impl fmt::Debug for MarkedString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{self}⟩")
    }
}

impl FromStr for MarkedString {
    type Err = ExprError;

    /// Inverse of `Display`: segments split on `◇`, symbols on whitespace.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let segments = s
            .split('◇')
            .map(|seg| seg.split_whitespace().map(Symbol::new).collect())
            .collect::<Result<Vec<Sentence>, _>>()?;
        Ok(MarkedString::from_segments(segments))
    }
}

/// The homomorphism that erases every separator.
pub fn lock_hom(m: &MarkedString) -> Sentence {
    m.symbols().cloned().collect()
}

/// All interleavings of the segment sequences `x` and `y`, each keeping its
/// internal segment order.
pub fn comb_pair(x: &MarkedString, y: &MarkedString) -> BTreeSet<MarkedString> {
    let mut out = Vec::new();
    comb(&x.segments, &y.segments, &mut Vec::new(), &mut out);
    out.into_iter().map(MarkedString::from_segments).collect()
}

fn comb(x: &[Sentence], y: &[Sentence], prefix: &mut Vec<Sentence>, out: &mut Vec<Vec<Sentence>>) {
    comb_first(x, y, prefix, out);
    comb_first(y, x, prefix, out);
}

// Sequences that start with the first segment of `x`.
fn comb_first(
    x: &[Sentence],
    y: &[Sentence],
    prefix: &mut Vec<Sentence>,
    out: &mut Vec<Vec<Sentence>>,
) {
    let (head, tail) = x.split_first().expect("marked strings have a segment");
    prefix.push(head.clone());
    if tail.is_empty() {
        let mut done = prefix.clone();
        done.extend(y.iter().cloned());
        out.push(done);
    } else {
        comb(tail, y, prefix, out);
    }
    prefix.pop();
}

fn comb_sets(
    left: &BTreeSet<MarkedString>,
    right: &BTreeSet<MarkedString>,
    cap: usize,
) -> Result<BTreeSet<MarkedString>, ExprError> {
    let mut out = BTreeSet::new();
    for x in left {
        for y in right {
            out.extend(comb_pair(x, y));
            if out.len() > cap {
                return Err(ExprError::CapExceeded { cap });
            }
        }
    }
    Ok(out)
}

/// The set of marked strings denoted by `e`. Any intermediate set larger than
/// `cap` aborts with [`ExprError::CapExceeded`].
pub fn sigma(e: &IdlExpr, cap: usize) -> Result<BTreeSet<MarkedString>, ExprError> {
    let checked = |set: BTreeSet<MarkedString>| {
        if set.len() > cap {
            Err(ExprError::CapExceeded { cap })
        } else {
            Ok(set)
        }
    };
    match e {
        IdlExpr::Terminal(s) => Ok(BTreeSet::from([MarkedString::single(s.clone())])),
        IdlExpr::Epsilon => Ok(BTreeSet::from([MarkedString::empty()])),
        IdlExpr::Lock(child) => Ok(sigma(child, cap)?
            .iter()
            .map(|m| MarkedString::from_segments(vec![lock_hom(m)]))
            .collect()),
        IdlExpr::Or(children) => {
            let mut out = BTreeSet::new();
            for child in children {
                out.append(&mut sigma(child, cap)?);
            }
            checked(out)
        }
        IdlExpr::Interleave(children) => {
            let mut iter = children.iter();
            let first = iter.next().expect("interleave has at least two arguments");
            let mut acc = sigma(first, cap)?;
            for child in iter {
                acc = comb_sets(&acc, &sigma(child, cap)?, cap)?;
            }
            Ok(acc)
        }
        IdlExpr::Concat(left, right) => {
            let left = sigma(left, cap)?;
            let right = sigma(right, cap)?;
            if left.len().saturating_mul(right.len()) > cap {
                return Err(ExprError::CapExceeded { cap });
            }
            Ok(left
                .iter()
                .flat_map(|x| right.iter().map(move |y| x.join(y)))
                .collect())
        }
    }
}

/// The finite language of `e`.
pub fn language(e: &IdlExpr, cap: usize) -> Result<BTreeSet<Sentence>, ExprError> {
    Ok(sigma(e, cap)?.iter().map(lock_hom).collect())
}
