//! Property tests for the library invariants: serialization round trips,
//! subdivision invariance of the non-even verdict, packing monotonicity in
//! the denominator, and order-invariance of the dibrace decomposition.

use proptest::prelude::*;

use edt::cycles::enumerate_dicycles;
use edt::digraph::{isomorphic, parse_digraph, parse_edge_list, Digraph, VId};
use edt::erdos_posa::max_packing;
use edt::evenness::is_non_even;
use edt::separation::dibrace_decomposition_seeded;
use edt::walls::{cylindrical_grid, cylindrical_wall};

/// A small random digraph as an edge list.
fn digraph_strategy(max_n: usize) -> impl Strategy<Value = Digraph> {
    (2..=max_n, proptest::collection::vec((0..max_n, 0..max_n), 0..18)).prop_map(
        move |(n, pairs)| {
            let mut d = Digraph::new();
            for i in 0..n {
                d.add_vertex(&format!("v{i}"));
            }
            for (u, v) in pairs {
                let (u, v) = (u % n, v % n);
                if u != v {
                    d.add_edge(u as VId, v as VId).unwrap();
                }
            }
            d
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// serialize then parse is the identity on labeled structure, for both
    /// random digraphs and the text formats of walls and grids.
    #[test]
    fn roundtrip_random(d in digraph_strategy(8)) {
        let re = parse_edge_list(&d.to_edge_list()).unwrap();
        prop_assert!(re.same_labeled(&d));
        let re2 = parse_digraph(&d.to_dot()).unwrap();
        prop_assert!(re2.same_labeled(&d));
    }

    /// subdividing an edge never changes the non-even verdict.
    #[test]
    fn subdivision_invariance(d in digraph_strategy(6), pick in 0usize..64) {
        let edges: Vec<(VId, VId)> = d.edges().collect();
        prop_assume!(!edges.is_empty());
        let (u, v) = edges[pick % edges.len()];
        let mut sub = d.clone();
        sub.remove_edge(u, v);
        let w = sub.add_vertex("subdivision");
        sub.add_edge(u, w).unwrap();
        sub.add_edge(w, v).unwrap();
        let before = is_non_even(&d, 1_000_000).unwrap().is_non_even();
        let after = is_non_even(&sub, 1_000_000).unwrap().is_non_even();
        prop_assert_eq!(before, after);
    }

    /// packing size is monotone in the denominator.
    #[test]
    fn packing_monotone(d in digraph_strategy(7)) {
        let mut prev = 0usize;
        for denom in 1..=4usize {
            let p = max_packing(&d, denom, 1_000_000).unwrap();
            prop_assert!(p.len() >= prev);
            prev = p.len();
        }
    }

    /// the dibrace multiset is independent of the contraction order.
    #[test]
    fn dibrace_order_invariance(d in digraph_strategy(8), seed in 0u64..32) {
        prop_assume!(d.is_strongly_connected());
        let base = dibrace_decomposition_seeded(&d, None).unwrap();
        let other = dibrace_decomposition_seeded(&d, Some(seed)).unwrap();
        prop_assert_eq!(base.len(), other.len());
        let mut used = vec![false; other.len()];
        for b in &base {
            let hit = other
                .iter()
                .enumerate()
                .find(|(i, o)| !used[*i] && isomorphic(b, o, 10).unwrap_or(false));
            prop_assert!(hit.is_some(), "dibrace multiset mismatch");
            used[hit.unwrap().0] = true;
        }
    }

    /// every enumerated dicycle validates against the host digraph.
    #[test]
    fn enumerated_cycles_validate(d in digraph_strategy(7)) {
        for c in enumerate_dicycles(&d, 1_000_000).unwrap() {
            prop_assert!(c.validate(&d));
        }
    }

    /// strong components refine to singletons exactly on acyclic digraphs.
    #[test]
    fn singleton_components_iff_acyclic(d in digraph_strategy(7)) {
        let acyclic = enumerate_dicycles(&d, 1_000_000).unwrap().is_empty();
        let singletons = d.strong_components().iter().all(|c| c.len() == 1);
        prop_assert_eq!(acyclic, singletons);
    }
}

/// Generator round trips on the structured families (fixed orders; the
/// generators are deterministic).
#[test]
fn roundtrip_generated_structures() {
    for k in 1..=4 {
        let g = cylindrical_grid(k).unwrap();
        assert!(parse_edge_list(&g.to_edge_list()).unwrap().same_labeled(&g));
        let w = cylindrical_wall(k).unwrap().digraph;
        assert!(parse_edge_list(&w.to_edge_list()).unwrap().same_labeled(&w));
        assert!(parse_digraph(&w.to_dot()).unwrap().same_labeled(&w));
    }
}
