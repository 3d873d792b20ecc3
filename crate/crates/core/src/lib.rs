//! Finite loop workbench.
//!
//! Loops are stored as Cayley tables over `0..n` with `0` as the two-sided
//! identity. Permutations act on the right: `p.then(&q)` applies `p` first,
//! so the operator word `R_x R_y` is `r_x.then(&r_y)`.

pub mod construct;
pub mod fixtures;
pub mod identities;
pub mod report;
pub mod search;
pub mod structure;
pub mod suite;
pub mod table;

pub use identities::{Identity, PropertyReport, Term};
pub use table::{ElemSet, LoopTable, Perm, TableError};
