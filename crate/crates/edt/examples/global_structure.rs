//! The global decomposition recursion with the pluggable desk oracle, plus
//! the two downstream applications: disjoint paths and matching counting.
//!
//! Run with `cargo run --example global_structure`.

use edt::decomposition::validate_odd_dtd;
use edt::digraph::parse_edge_list;
use edt::erdos_posa::{
    check_global_properties, count_pm_via_transversal, global_decompose, t_ddpp, DeskOracle,
    GlobalOutcome,
};
use edt::matching::heawood;

fn main() -> edt::Result<()> {
    let d = parse_edge_list("a b\nb a\nb c\nc e\ne c")?;
    let oracle = DeskOracle { cap: 100_000 };
    let z = d.vertex_set([d.vid("a").unwrap(), d.vid("e").unwrap()]);
    match global_decompose(&d, 3, &z, &oracle, 12, 100_000)? {
        GlobalOutcome::Packing(p) => println!("packed {} even dicycles", p.len()),
        GlobalOutcome::Decomposition(g) => {
            println!(
                "decomposition with {} nodes from {}; strong odd valid: {}, claim properties: {}",
                g.dec.nodes(),
                g.oracle,
                validate_odd_dtd(&d, &g.dec, true, 100_000)?.is_valid(),
                check_global_properties(&d, &g.dec, &z, g.bound).is_valid()
            );
        }
    }

    // the t-DDPP at desk scale: one crossing pair on a path is unsolvable
    let line = parse_edge_list("a b\nb c\nc e")?;
    let pairs = vec![
        (line.vid("a").unwrap(), line.vid("e").unwrap()),
        (line.vid("c").unwrap(), line.vid("b").unwrap()),
    ];
    println!(
        "crossing pair on a path solvable: {}",
        t_ddpp(&line, &pairs, 12)?.is_some()
    );

    // perfect matchings counted two ways must agree; Heawood has 24
    println!(
        "heawood perfect matchings: {}",
        count_pm_via_transversal(&heawood(), 16, 1_000_000)?
    );
    Ok(())
}
