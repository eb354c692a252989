//! Group families with canonical forms, torsion classes, centralizers,
//! subgroup chains, group rings and free resolutions.

mod family;
mod resolution;
mod ring;
mod subgroup;

use thiserror::Error;

use crate::exactalg::AlgError;

pub use family::{Element, GenWord, Group, GroupDesc, MAX_FINITE_ORDER};
pub use resolution::{
    amalgam_resolution, bar_resolution, coefficient_complex, dihedral_resolution, group_homology,
    homology_from_resolution, integers_resolution, periodic_resolution, resolution_for, trivial_resolution,
    verify_exact, GModule, GResolution, RegularModule, TrivialModule, BAR_BUDGET, DEFAULT_DEPTH,
};
pub use ring::{GMatrix, GroupRingElt};
pub use subgroup::{
    centralizer, closure, greedy_generators, torsion_conjugacy_classes, ChainLevel, PermChainLevel, Subgroup, SubgroupChain,
    TorsionClass,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("invalid group data: {0}")]
    Invalid(String),
    #[error("size budget exceeded: {needed} cells needed, budget {budget}")]
    BudgetExceeded { needed: usize, budget: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Alg(#[from] AlgError),
}
