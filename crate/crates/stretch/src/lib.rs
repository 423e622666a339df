//! Generalized stretch of one graph over another, exactly (tree path sums
//! or grounded solves) or through a random resistance sketch, and the
//! pseudo-log-determinant bounds it yields.

pub mod bounds;
pub mod error;
pub mod exact;
pub mod sketch;

pub use bounds::pld_bounds_from_stretch;
pub use error::{Result, StretchError};
pub use exact::{generalized_stretch_exact, tree_stretch_exact, StretchMethod, StretchReport};
pub use sketch::{
    approx_effective_resistances, approx_stretch, sketch_size, ResistanceSketch, SKETCH_CONSTANT,
};
