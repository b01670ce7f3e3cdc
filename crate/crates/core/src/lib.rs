//! Finite-group sumset laboratory.
//!
//! Groups are dense Cayley tables on element indices `0..n` ([`group`]).
//! Subsets are bit masks ([`mask`]). On top of that sit subgroup and quotient
//! machinery ([`structure`]), the decomposition of a solvable group into
//! `K × G/K` with a twisted product ([`factor`]), product sets and bound
//! checks ([`sumset`]), exhaustive and sampled verification ([`verify`]), and
//! a step-by-step replay of the inductive argument for solvable groups
//! ([`replay`]).

pub mod error;
pub mod factor;
pub mod group;
pub mod mask;
pub mod replay;
pub mod structure;
pub mod sumset;
pub mod verify;

/// Index of a group element.
pub type Elem = u32;

pub use error::{FactorError, GroupError, StructureError};
pub use factor::{build_factor_system, Extension, FactorSystem, Pair, RepPolicy, SubsetDecomposition};
pub use group::{build_group, CORPUS, validate_table, AxiomViolation, FiniteGroup, GroupSpec, ValidationReport};
pub use mask::SubsetMask;
pub use replay::{replay_solvable_proof, ProofTrace, ReplayError};
pub use structure::{
    choose_decomposition_subgroup, commutator_subgroup, derived_series, generated_subgroup, is_normal,
    is_solvable, minimal_torsion, normal_subgroups_two_generated, quotient, smallest_prime_factor, solvable_chain, QuotientGroup,
    SolvableChain, Subgroup, Torsion,
};
pub use sumset::{cd_bound, product_set, restricted_product_set, BoundCheck, Theorem};
pub use verify::{
    find_extremal, verify_exhaustive, verify_sampled, Caps, SamplingPlan, SizeDistribution, VerificationReport,
    Verifier, VerifyError, VerifyMode,
};
