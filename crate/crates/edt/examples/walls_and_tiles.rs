//! Cylindrical grids, elementary walls, tilings, and the weak odd bicycle a
//! perimeter jump creates.
//!
//! Run with `cargo run --example walls_and_tiles`.

use edt::evenness::{contains_even_dicycle, verify_butterfly_minor_model};
use edt::walls::{
    cylindrical_grid, cylindrical_wall, grid_with_jump, odd_bicycle_from_jump, segregated_grid,
    standard_tiling, tile_at, triadic_slices,
};

fn main() -> edt::Result<()> {
    let g = cylindrical_grid(3)?;
    println!("cylindrical grid order 3: {} vertices, {} edges", g.n(), g.m());

    let w = cylindrical_wall(3)?;
    println!(
        "elementary 3-wall: {} vertices, {} edges, {} vertical cycles of length {}",
        w.digraph.n(),
        w.digraph.m(),
        w.order(),
        w.vertical_cycle(1).len()
    );
    let (q1, qk) = w.perimeter();
    println!("perimeter cycles: {} and {} vertices", q1.len(), qk.len());

    let s = segregated_grid(3)?;
    println!("segregated grid order 3: {} vertices, {} edges", s.n(), s.m());

    // tiles and tilings live on walls of order divisible by three
    let w6 = cylindrical_wall(6)?;
    let tile = tile_at(&w6, 2, 3, 1)?;
    println!(
        "tile at (2,3) width 1: {} vertices, centre brick of {}",
        tile.vertex_set(w6.digraph.n()).count(),
        tile.centre.len()
    );
    let tiling = standard_tiling(&w6, 1, 1, 1)?;
    println!(
        "standard tiling: {} tiles, disjoint: {}",
        tiling.tiles.len(),
        tiling.validate_disjoint(w6.digraph.n())
    );
    let middle = triadic_slices(&w6)?[1].count();
    println!("middle triadic slice holds {} vertices", middle);

    // a single-edge perimeter jump plants a weak odd bicycle in the grid
    let (host, grid, jump) = grid_with_jump(4, 0, 5, true, 1)?;
    let model = odd_bicycle_from_jump(&host, &grid, &jump, None)?;
    assert!(verify_butterfly_minor_model(&host, &model));
    let sub = model.host_subgraph(&host);
    println!(
        "grid + jump: verified odd-bicycle model on {} host vertices; its host carries an even dicycle: {}",
        sub.n(),
        contains_even_dicycle(&sub, 1_000_000)?.is_some()
    );
    Ok(())
}
