//! Exact dynamic-geometry kernel with a textual construction language and a
//! validated-numerics function analyzer.

pub mod analysis;
pub mod construct;
pub mod geom;
pub mod numeric;
pub mod theorems;
