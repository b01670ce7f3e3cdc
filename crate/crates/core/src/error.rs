use std::path::PathBuf;

use thiserror::Error;

use crate::group::AxiomViolation;
use crate::Elem;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("invalid group spec `{spec}`: {reason}")]
    InvalidSpec { spec: String, reason: String },

    #[error("group order {order} exceeds the table cap of {cap}")]
    OrderTooLarge { order: usize, cap: usize },

    #[error("cannot read table file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed table file {path}: {reason}")]
    Parse { path: PathBuf, reason: String },

    #[error("table is not a group: {0}")]
    NotAGroup(AxiomViolation),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("subgroup is not normal: conjugating {member} by {by} leaves the subgroup")]
    NotNormal { member: Elem, by: Elem },

    #[error("group is trivial; no proper decomposition subgroup exists")]
    TrivialGroup,

    #[error("group `{0}` is not solvable")]
    NotSolvable(String),

    #[error("nonabelian group with trivial derived subgroup; the group table is inconsistent")]
    InconsistentDerivedSubgroup,
}

#[derive(Debug, Error)]
pub enum FactorError {
    #[error(transparent)]
    Structure(#[from] StructureError),

    #[error("representative {rep} is not in coset {coset}")]
    RepresentativeOutsideCoset { coset: usize, rep: Elem },

    #[error("expected {expected} coset representatives, got {got}")]
    RepresentativeCount { expected: usize, got: usize },

    #[error("factor system does not define a group: {0}")]
    NotAGroup(AxiomViolation),

    #[error("factor system tables have inconsistent shape: {0}")]
    Shape(String),
}
