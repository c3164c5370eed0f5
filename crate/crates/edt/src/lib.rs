//! Even-dicycle toolkit.
//!
//! A library for the combinatorial machinery around packing and hitting even
//! directed cycles: evenness and non-evenness tests, butterfly minors, the
//! digraph/bipartite-matching bridge, cylindrical grids and walls with their
//! tilings, vertex-disjoint path routing, directed and odd directed
//! tree-decompositions, and the packing-versus-transversal extraction
//! routines, all verified at desk scale against independent brute-force
//! oracles.
//!
//! Start with the runnable examples under `examples/`; the `edt` binary
//! exposes the same analyses as subcommands.

pub mod bits;
pub mod cli;
pub mod cycles;
pub mod decomposition;
pub mod digraph;
pub mod error;
pub mod erdos_posa;
pub mod evenness;
pub mod gf2;
pub mod matching;
pub mod planar;
pub mod routing;
pub mod walls;
pub mod separation;

pub use cycles::{enumerate_dicycles, Dicycle};
pub use digraph::{parse_digraph, parse_dot, parse_edge_list, Digraph, VId};
pub use error::{EdtError, Result};
