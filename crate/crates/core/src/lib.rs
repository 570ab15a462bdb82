//! Maximal finite subgroups of `GL(L)` for lattices `L` over imaginary quadratic
//! fields, computed with Voronoi's algorithm on Hermitian forms.

pub mod classify;
pub mod cli;
pub mod equivariant;
pub mod error;
pub mod linalg;
pub mod forms;
pub mod ideals;
pub mod isometry;
pub mod lattice;
pub mod polyhedra;
pub mod qfield;
pub mod reduce;
pub mod voronoi;
