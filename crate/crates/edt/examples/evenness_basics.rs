//! Even dicycles and the non-even test: digons, bicycles, and F7.
//!
//! Run with `cargo run --example evenness_basics`.

use edt::digraph::parse_edge_list;
use edt::evenness::{contains_even_dicycle, f7, is_non_even, odd_bicycle, NonEvenVerdict};

fn main() -> edt::Result<()> {
    // the digon is the smallest even dicycle, and it is non-even: put weight
    // one on exactly one of its two edges and every dicycle gets odd weight
    let digon = parse_edge_list("a b\nb a")?;
    let cycle = contains_even_dicycle(&digon, 1000)?.expect("digon");
    println!("digon: shortest even dicycle has length {}", cycle.len());
    match is_non_even(&digon, 1000)? {
        NonEvenVerdict::NonEven { witness } => {
            println!("digon is non-even; witness weighting:");
            print!("{}", witness.to_lines(&digon));
        }
        NonEvenVerdict::Even { .. } => unreachable!(),
    }

    // the odd bicycle is the canonical even digraph: every weighting leaves
    // some dicycle with even total weight
    let bike = odd_bicycle(5)?;
    match is_non_even(&bike, 100_000)? {
        NonEvenVerdict::Even { certificate } => {
            println!(
                "odd bicycle of order 5 is even; {} dicycles certify infeasibility",
                certificate.len()
            );
        }
        NonEvenVerdict::NonEven { .. } => unreachable!(),
    }

    // F7, the one exceptional dibrace in the structure of non-even digraphs
    let f = f7();
    println!(
        "F7 has {} vertices, {} edges, non-even: {}",
        f.n(),
        f.m(),
        is_non_even(&f, 1_000_000)?.is_non_even()
    );
    Ok(())
}
