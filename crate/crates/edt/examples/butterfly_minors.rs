//! Butterfly contractions, directed tight cuts, and weak-odd-bicycle search.
//!
//! Run with `cargo run --example butterfly_minors`.

use edt::digraph::parse_edge_list;
use edt::evenness::{find_weak_odd_bicycle, verify_butterfly_minor_model};
use edt::separation::{butterfly_contract, dibrace_decomposition, find_order1_separation};

fn main() -> edt::Result<()> {
    // contracting the digon collapses it to a point: both edges are
    // contractible and loops disappear
    let digon = parse_edge_list("a b\nb a")?;
    let point = butterfly_contract(&digon, 0, 1)?;
    println!("digon contracts to {} vertex, {} edges", point.n(), point.m());

    // two digons glued at a cut vertex decompose into two dibraces
    let glued = parse_edge_list("a v\nv a\nv b\nb v")?;
    let sep = find_order1_separation(&glued, None).expect("order-1 separation");
    println!(
        "glued digons split at separator of order {}",
        sep.order()
    );
    let braces = dibrace_decomposition(&glued)?;
    println!("dibraces: {:?}", braces.iter().map(|b| (b.n(), b.m())).collect::<Vec<_>>());

    // a subdivided odd bicycle still contains the odd bicycle as a butterfly
    // minor; the search returns a verified model
    let subdivided = parse_edge_list("a b\nb a\nb c\nc b\nc x\nx y\ny a\na c")?;
    let model = find_weak_odd_bicycle(&subdivided, 12, 100_000)?.expect("weak odd bicycle");
    assert!(verify_butterfly_minor_model(&subdivided, &model));
    println!(
        "subdivided bicycle hosts a model of the odd bicycle of order {}",
        model.pattern.n()
    );

    // non-even digraphs contain no weak odd bicycle at all
    println!(
        "digon hosts a weak odd bicycle: {}",
        find_weak_odd_bicycle(&digon, 12, 1000)?.is_some()
    );
    Ok(())
}
