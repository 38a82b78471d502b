//! Exact p-adic tools for Mumford curves: Schottky groups in `PGL_2(Q_p)`,
//! reduction graphs, boundedness of representations of the free
//! fundamental group, normal forms and finite-level covers.

pub mod covers;
pub mod group;
pub mod io;
pub mod matrix;
pub mod normalforms;
pub mod padic;
pub mod pgl2;
pub mod phibound;
pub mod poly;
pub mod redgraph;
pub mod repcat;
pub mod word;
pub mod zmod;
