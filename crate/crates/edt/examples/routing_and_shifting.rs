//! Menger duality with verified certificates, X-paths, half-integral to
//! integral linkages, and planar shifting of an even dicycle.
//!
//! Run with `cargo run --example routing_and_shifting`.

use edt::digraph::parse_edge_list;
use edt::routing::{
    integralize, menger, planar_shift, random_planar_cycle_pair, x_paths_or_hitting, EvenPart,
    PathFamily, XPathsOutcome,
};

fn main() -> edt::Result<()> {
    // three middles between two terminals: max disjoint paths = min separator
    let d = parse_edge_list("s p\ns q\ns r\np t\nq t\nr t")?;
    let x = d.vertex_set([d.vid("s").unwrap()]);
    let y = d.vertex_set([d.vid("t").unwrap()]);
    let (paths, sep) = menger(&d, &x, &y)?;
    println!("menger: {} paths, separator {:?}", paths.len(), sep.verts);

    // X-paths: two disjoint ones between four terminals
    let d2 = parse_edge_list("a p\np b\nc q\nq e")?;
    let terms = d2.vertex_set(["a", "b", "c", "e"].iter().map(|n| d2.vid(n).unwrap()));
    match x_paths_or_hitting(&d2, &terms, 2)? {
        XPathsOutcome::Paths(f) => println!("x-paths: {} disjoint paths", f.len()),
        XPathsOutcome::HittingSet(s) => println!("x-paths: hitting set of {}", s.count()),
    }

    // a half-integral linkage of order two crossing at one vertex turns into
    // one fully disjoint path
    let d3 = parse_edge_list("a m\nm b\nc m\nm e")?;
    let half = PathFamily {
        paths: vec![
            vec![d3.vid("a").unwrap(), d3.vid("m").unwrap(), d3.vid("b").unwrap()],
            vec![d3.vid("c").unwrap(), d3.vid("m").unwrap(), d3.vid("e").unwrap()],
        ],
        multiplicity_bound: 2,
    };
    let xs = d3.vertex_set([d3.vid("a").unwrap(), d3.vid("c").unwrap()]);
    let ys = d3.vertex_set([d3.vid("b").unwrap(), d3.vid("e").unwrap()]);
    let integral = integralize(&d3, &xs, &ys, &half)?;
    println!("integralized to {} disjoint path(s)", integral.len());

    // planar shifting: the even dicycle moves to one side of the odd one
    let (host, ce, co) = random_planar_cycle_pair(7, 12);
    let shift = planar_shift(&host, &ce, &co, None)?;
    let part = match &shift.p_e {
        EvenPart::WholeCycle => "the whole even cycle".to_string(),
        EvenPart::Arc(a) => format!("an arc of {} vertices", a.len()),
    };
    println!(
        "planar shift: side {}, kept {}, even dicycle of length {}",
        shift.side,
        part,
        shift.even_dicycle.len()
    );
    Ok(())
}
