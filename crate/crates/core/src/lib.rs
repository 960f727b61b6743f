//! Exact verification of two-colorings that avoid monochromatic
//! three-term progressions and equilateral triangles.

pub mod coloring;
pub mod constraint;
pub mod datasets;
pub mod encoder;
pub mod field;
pub mod geometry;
pub mod grid;
pub mod proof;
pub mod solver;
pub mod strategy;
pub mod svg;

pub use coloring::{Color, PartialColoring, Reason, Step};
pub use constraint::{Constraint, ConstraintKind, Implication, KindSet};
pub use field::{FieldScalar, PlanePoint, Quadruple};
pub use solver::{solve, Conflict, DerivationCertificate, Outcome, Problem, SolveError, Verdict};
