//! Packing versus hitting even dicycles: exact optima, the extraction on a
//! decomposition, and the planar counterexample family.
//!
//! Run with `cargo run --example packing_duality` (release mode recommended
//! for the k = 3 counterexample).

use edt::bits::Bitset;
use edt::decomposition::DirTreeDecomposition;
use edt::digraph::parse_edge_list;
use edt::erdos_posa::{
    counterexample_family, extract_main, max_packing, min_transversal, ExtractOutcome,
};
use edt::evenness::odd_bicycle;

fn main() -> edt::Result<()> {
    // in the odd bicycle any two even dicycles meet, yet killing them all
    // takes two vertices: the gap integral packing < transversal
    let bike = odd_bicycle(3)?;
    for denom in [1usize, 2] {
        let p = max_packing(&bike, denom, 100_000)?;
        println!("odd bicycle: 1/{denom}-integral packing of {}", p.len());
    }
    println!(
        "odd bicycle: min transversal {}",
        min_transversal(&bike, 100_000)?.verts.count()
    );

    // the extraction: two even components split by an arc give a packing of 2
    let d = parse_edge_list("a b\nb a\nc e\ne c")?;
    let dec = DirTreeDecomposition {
        parent: vec![None, Some(0)],
        bags: vec![d.vertex_set([0, 1]), d.vertex_set([2, 3])],
        guards: vec![Bitset::new(4), Bitset::new(4)],
        alpha: Some(vec![d.vertex_set([0, 1]), d.vertex_set([2, 3])]),
    };
    match extract_main(&d, &dec, 2, 100_000)? {
        ExtractOutcome::Packing(p) => println!("extraction packed {} even dicycles", p.len()),
        ExtractOutcome::Transversal(t) => println!("extraction hit {} vertices", t.verts.count()),
    }

    // the counterexample family: even dicycles pairwise intersect while the
    // transversal still needs k vertices
    let c = counterexample_family(2, 1_000_000)?;
    println!(
        "counterexample k=2: {} vertices, certified: {}",
        c.digraph.n(),
        c.certified
    );
    let packing = max_packing(&c.digraph, 1, 1_000_000)?;
    let trans = min_transversal(&c.digraph, 1_000_000)?;
    println!(
        "counterexample k=2: integral packing {}, transversal {}",
        packing.len(),
        trans.verts.count()
    );
    Ok(())
}
