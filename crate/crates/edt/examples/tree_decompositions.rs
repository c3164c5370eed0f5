//! Directed and odd directed tree-decompositions: validation, widths, exact
//! brute-force treewidth, tangles, and well-linked sets.
//!
//! Run with `cargo run --example tree_decompositions`.

use edt::bits::Bitset;
use edt::decomposition::{
    balanced_separator, brute_force_dtw, dtd_width, is_well_linked, linked_set_tangle,
    orientation_is_tangle, validate_dtd, validate_odd_dtd, wall_tangle, DirTreeDecomposition,
};
use edt::digraph::parse_edge_list;
use edt::walls::cylindrical_wall;

fn main() -> edt::Result<()> {
    // the digon has directed treewidth one; the witness validates
    let digon = parse_edge_list("a b\nb a")?;
    let (w, dec) = brute_force_dtw(&digon, 3, 7)?;
    println!(
        "digon: dtw {}, witness width {}, valid {}",
        w,
        dtd_width(&digon, &dec)?,
        validate_dtd(&digon, &dec).is_valid()
    );

    // directed cycles of any length have directed treewidth one
    let c5 = parse_edge_list("v0 v1\nv1 v2\nv2 v3\nv3 v4\nv4 v0")?;
    println!("C5: dtw {}", brute_force_dtw(&c5, 3, 7)?.0);

    // an odd decomposition: alpha kills the boundary even dicycles
    let d = parse_edge_list("a b\nb a\nb c\nc b")?;
    let mut odec = DirTreeDecomposition {
        parent: vec![None, Some(0)],
        bags: vec![d.vertex_set([0, 1]), d.vertex_set([2])],
        guards: vec![Bitset::new(3), d.vertex_set([1])],
        alpha: None,
    };
    odec.alpha = Some((0..2).map(|t| odec.big_gamma(t, 3)).collect());
    println!(
        "odd decomposition valid (strong): {}",
        validate_odd_dtd(&d, &odec, true, 100_000)?.is_valid()
    );

    // the wall tangle orients every low-order separation toward the side
    // holding an untouched vertical cycle
    let wall = cylindrical_wall(3)?;
    let host = wall.digraph.clone();
    let tangle = wall_tangle(&host, &wall, 1)?;
    println!("wall tangle covers {} separations", tangle.map.len());

    // linked sets induce tangles too
    let bike = edt::evenness::odd_bicycle(3)?;
    let z = bike.full_set();
    println!(
        "odd bicycle: balanced separator of size 0 exists: {}",
        balanced_separator(&bike, &z, 0)?.is_some()
    );
    let induced = linked_set_tangle(&bike, &z, 1)?;
    println!(
        "linked-set orientation is a tangle: {}",
        orientation_is_tangle(&bike, 1, &induced)?
    );

    let sample = bike.vertex_set([0, 1]);
    println!("{{v0, v1}} well-linked: {}", is_well_linked(&bike, &sample)?);
    Ok(())
}
