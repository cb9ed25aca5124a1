//! Parameterised expression families used by tests and benchmarks.

use crate::expr::IdlExpr;

/// `||(a1 . … . ai, a(i+1) . … . a(2i), …)` with `k` chains of `i` distinct
/// words each. Its graph has `2ik + 2` vertices, width `k` and exactly
/// `(2i)^k + 2` cuts.
pub fn tight_interleave(i: usize, k: usize) -> IdlExpr {
    assert!(i >= 1 && k >= 2, "needs i >= 1 and k >= 2");
    let chains = (0..k)
        .map(|chain| {
            let words = (1..=i)
                .map(|j| IdlExpr::word(&format!("a{}", chain * i + j)).expect("valid word"))
                .collect();
            IdlExpr::concat_all(words).expect("non-empty chain")
        })
        .collect();
    IdlExpr::interleave(chains).expect("k >= 2")
}

/// A right-linear grammar accepting every string over `words`.
pub fn universal_grammar_text<'a>(words: impl IntoIterator<Item = &'a str>) -> String {
    let mut out = String::from("S ->\n");
    for w in words {
        out.push_str(&format!("S -> {w} S\n"));
    }
    out
}
