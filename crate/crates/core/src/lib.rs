pub mod exact_algebra;
pub mod cyclic_quotient;
pub mod qresolution;
pub mod quasi_adjunction;
pub mod global_cover;
pub mod cli_io;

pub use exact_algebra::{Field, FieldElement, SparsePoly, TruncatedSeries};
