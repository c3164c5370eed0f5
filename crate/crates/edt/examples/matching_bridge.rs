//! The digraph ↔ matched-bipartite bridge: splits, M-directions, tight cuts,
//! Pfaffian orientations, and the Heawood graph.
//!
//! Run with `cargo run --example matching_bridge`.

use edt::digraph::{isomorphic, parse_edge_list};
use edt::evenness::f7;
use edt::matching::{
    count_perfect_matchings, enumerate_tight_cuts, has_pfaffian_orientation, heawood,
    is_k_extendable, k33, m_direction, split, tight_cut_decomposition,
};

fn main() -> edt::Result<()> {
    // round trip: the M-direction of the split recovers the digraph
    let d = parse_edge_list("a b\nb a\nb c\nc a")?;
    let back = m_direction(&split(&d));
    println!("m_direction(split(D)) == D: {}", back.same_labeled(&d));

    // Heawood: 24 perfect matchings, Pfaffian, its own single brace, and its
    // M-direction is F7
    let h = heawood();
    println!(
        "heawood: {} perfect matchings",
        count_perfect_matchings(&h.graph, 1000)?
    );
    println!(
        "heawood directs to F7: {}",
        isomorphic(&m_direction(&h), &f7(), 10)?
    );
    println!(
        "heawood is Pfaffian: {}",
        has_pfaffian_orientation(&h.graph, 10_000)?.is_some()
    );
    let braces = tight_cut_decomposition(&h, 1000)?;
    println!("heawood braces: {}", braces.len());

    // K3,3 admits no Pfaffian orientation
    println!(
        "k33 is Pfaffian: {}",
        has_pfaffian_orientation(&k33().graph, 10_000)?.is_some()
    );

    // the split of two glued digons carries the tight cuts matching the
    // digraph's order-1 directed separations
    let glued = split(&parse_edge_list("a v\nv a\nv b\nb v")?);
    let nontrivial = enumerate_tight_cuts(&glued, 1000)?
        .into_iter()
        .filter(|c| c.nontrivial)
        .count();
    println!("glued digons: {} non-trivial tight cuts in the split", nontrivial);

    println!("heawood 2-extendable: {}", is_k_extendable(&h, 2)?);
    Ok(())
}
