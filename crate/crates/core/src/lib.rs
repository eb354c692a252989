//! Exact homological algebra for transformation groupoids: groupoid homology
//! of odometer actions, homology of the torsion blow-up, equivariant
//! cohomology through coinvariant double complexes, and rational comparison
//! with K-theory data.

pub mod exactalg;
pub mod groups;
pub mod gsets;
pub mod equivmod;
pub mod gcomplex;
pub mod hkpipeline;
pub mod par;

pub use exactalg::{CoeffRing, FgAbGroup, IntMatrix};
pub use par::Exec;
