//! Iterated-logarithm Lipschitz spaces on rooted trees and the
//! multiplication operators that act on them.
//!
//! Everything is computed on finite truncations. Quantities that are really
//! limits over the infinite tree come back with tail diagnostics and
//! three-valued verdicts instead of bare numbers.

pub mod catalog;
pub mod cli;
pub mod dsl;
pub mod error;
pub mod func;
pub mod multop;
pub mod tail;
pub mod tree;
pub mod verify;
pub mod weights;

pub use catalog::CatalogEntry;
pub use dsl::{parse, SymbolSpec, TailMeta};
pub use error::{Error, Result};
pub use func::TreeFunction;
pub use num_complex::Complex64;
pub use tail::TailPolicy;
pub use tree::{Tree, TreeSpec, VertexId};
pub use weights::WeightTable;
