//! Step-by-step replay of the induction showing `|A·B| ≥ |A| + |B| − 1` in a
//! finite solvable group whenever `|A| + |B| − 1 ≤ p(G)`.
//!
//! Each level splits `G` along a normal `K` with abelian `G/K`, sorts the
//! coset blocks of `A` and `B` by size, and checks on the concrete sets:
//!
//! * `|A₁·B_j| ≥ a₁ + b_j − 1` for every block `B_j`, by recursing into `K` on
//!   the translated kernel sets `A₁¹` and `B′_j = φ_{h₁}(B_j¹)·η(h₁, h′_j)`;
//! * `|A²·B²| ≥ α + β − 1` in the abelian quotient;
//! * the sets `A₁·B_j` lie over pairwise distinct cosets;
//! * the closing chain of inequalities down to `|A| + |B| − 1`.
//!
//! Abelian and trivial groups are leaves, checked directly.
//!
//! The "assume `α ≤ β`" step needs care when `G` is nonabelian, because
//! `A·B` and `B·A` can differ in size. When `α > β` the replay continues with
//! `(B⁻¹, A⁻¹)` instead: `B⁻¹·A⁻¹ = (A·B)⁻¹` has the same size, and the roles
//! of the block counts swap.

use serde::Serialize;
use thiserror::Error;

use crate::error::{FactorError, StructureError};
use crate::factor::{build_factor_system, RepPolicy, SubsetDecomposition};
use crate::group::FiniteGroup;
use crate::mask::SubsetMask;
use crate::structure::{choose_decomposition_subgroup, is_solvable, minimal_torsion, Torsion};
use crate::sumset::product_set;
use crate::Elem;

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("group `{0}` is not solvable")]
    NotSolvable(String),

    #[error("both sets must be nonempty")]
    EmptySet,

    #[error("|A| + |B| - 1 = {sum} exceeds p(G) = {p}")]
    HypothesisFails { sum: usize, p: Torsion },

    #[error(transparent)]
    Structure(#[from] StructureError),

    #[error(transparent)]
    Factor(#[from] FactorError),

    /// An inequality failed on concrete data. The argument being replayed is a
    /// theorem, so this points at a bug in the group tables or the engine.
    #[error("replay check failed at {check}; this indicates an implementation bug, not a flaw in the argument")]
    CheckFailed { check: String, trace: Box<ProofTrace> },
}

/// Replay of one level of the induction on a concrete pair.
#[derive(Debug, Clone, Serialize)]
pub struct ProofTrace {
    pub group: String,
    pub order: usize,
    pub p_g: Torsion,
    pub a: SubsetMask,
    pub b: SubsetMask,
    pub size_a: usize,
    pub size_b: usize,
    /// `|A·B|`, computed directly.
    pub product_size: usize,
    /// `|A| + |B| − 1`
    pub target: i64,
    pub step: Step,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    Base(BaseCase),
    Inductive(Box<InductiveStep>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseReason {
    Trivial,
    Abelian,
}

/// Leaf: the bound checked directly.
#[derive(Debug, Clone, Serialize)]
pub struct BaseCase {
    pub reason: BaseReason,
    pub bound: i64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InductiveStep {
    pub kernel: Vec<Elem>,
    pub quotient_order: usize,
    pub p_kernel: Torsion,
    pub p_quotient: Torsion,
    /// True when `(A, B)` was replaced by `(B⁻¹, A⁻¹)` to get `α ≤ β`.
    pub swapped: bool,
    pub working_a: SubsetMask,
    pub working_b: SubsetMask,
    pub alpha: usize,
    pub beta: usize,
    pub a_sizes: Vec<usize>,
    pub b_sizes: Vec<usize>,
    pub a_cosets: Vec<Elem>,
    pub b_cosets: Vec<Elem>,
    pub block_checks: Vec<BlockCheck>,
    pub quotient_check: QuotientCheck,
    pub disjointness_check: DisjointnessCheck,
    pub final_chain: FinalChain,
}

/// `|A₁·B_j| ≥ a₁ + b_j − 1`, with the recursive trace in `K`.
#[derive(Debug, Clone, Serialize)]
pub struct BlockCheck {
    pub j: usize,
    pub coset_a: Elem,
    pub coset_b: Elem,
    pub product_coset: Elem,
    pub a1: usize,
    pub b_j: usize,
    /// `|A₁·B_j|` in `G`.
    pub product_size: usize,
    /// `|A₁¹·B′_j|` in `K`; must equal `product_size`.
    pub kernel_product_size: usize,
    /// `B′_j` on kernel-local indices.
    pub translated_b: SubsetMask,
    pub bound: i64,
    pub holds: bool,
    pub sub_trace: ProofTrace,
}

/// `|A²·B²| ≥ α + β − 1` in `G/K`.
#[derive(Debug, Clone, Serialize)]
pub struct QuotientCheck {
    pub a2: SubsetMask,
    pub b2: SubsetMask,
    pub product: SubsetMask,
    pub product_size: usize,
    pub bound: i64,
    /// `α + β − 1 ≤ p(G/K)`
    pub hypothesis_holds: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DisjointnessCheck {
    /// `h₁·h′_j` for `j = 1..β`.
    pub second_coordinates: Vec<Elem>,
    pub distinct: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainStep {
    pub claim: String,
    pub lhs: i64,
    pub relation: &'static str,
    pub rhs: i64,
    pub holds: bool,
}

impl ChainStep {
    fn ge(claim: &str, lhs: i64, rhs: i64) -> Self {
        ChainStep {
            claim: claim.to_string(),
            lhs,
            relation: ">=",
            rhs,
            holds: lhs >= rhs,
        }
    }

    fn eq(claim: &str, lhs: i64, rhs: i64) -> Self {
        ChainStep {
            claim: claim.to_string(),
            lhs,
            relation: "=",
            rhs,
            holds: lhs == rhs,
        }
    }
}

/// The numbers behind
/// `|A·B| ≥ Σ_j |A₁·B_j| + (α − 1) ≥ Σ_j (a₁ + b_j − 1) + α − 1
///        = βa₁ + |B| − β + α − 1 ≥ |A| + |B| − 1`.
#[derive(Debug, Clone, Serialize)]
pub struct FinalChain {
    pub product_size: i64,
    /// `Σ_j |A₁·B_j|`
    pub block_sum: i64,
    /// Cosets of `A²·B²` other than the `h₁·h′_j`.
    pub extra_cosets: i64,
    /// `block_sum + extra_cosets`, the bound the trace establishes.
    pub traced_bound: i64,
    /// `Σ_j (a₁ + b_j − 1)`
    pub block_bound_sum: i64,
    /// `βa₁ + |B| − β + α − 1`
    pub closed_form: i64,
    pub target: i64,
    pub steps: Vec<ChainStep>,
}

impl ProofTrace {
    /// The lower bound on `|A·B|` this trace establishes.
    pub fn traced_bound(&self) -> i64 {
        match &self.step {
            Step::Base(base) => base.bound,
            Step::Inductive(ind) => ind.final_chain.traced_bound,
        }
    }

    /// Paths of every check that does not hold, depth first.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_failures(&self.group, &mut out);
        out
    }

    pub fn all_checks_hold(&self) -> bool {
        self.failures().is_empty()
    }

    fn collect_failures(&self, path: &str, out: &mut Vec<String>) {
        if self.traced_bound() > self.product_size as i64 {
            out.push(format!("{path}: traced bound exceeds |A·B|"));
        }
        if (self.product_size as i64) < self.target {
            out.push(format!("{path}: |A·B| < |A| + |B| - 1"));
        }
        match &self.step {
            Step::Base(base) => {
                if !base.holds {
                    out.push(format!("{path}: base case"));
                }
            }
            Step::Inductive(ind) => {
                for bc in &ind.block_checks {
                    let here = format!("{path}/block[{}]", bc.j);
                    if !bc.holds {
                        out.push(here.clone());
                    }
                    bc.sub_trace.collect_failures(&here, out);
                }
                if !ind.quotient_check.holds || !ind.quotient_check.hypothesis_holds {
                    out.push(format!("{path}/quotient"));
                }
                if !ind.disjointness_check.distinct {
                    out.push(format!("{path}/disjointness"));
                }
                if ind.alpha > ind.beta {
                    out.push(format!("{path}/alpha<=beta"));
                }
                for s in ind.final_chain.steps.iter().filter(|s| !s.holds) {
                    out.push(format!("{path}/chain: {}", s.claim));
                }
            }
        }
    }
}

/// Replays the induction on `(A, B)` in `g`.
///
/// Requires `g` solvable, both sets nonempty, and `|A| + |B| − 1 ≤ p(G)`. Any
/// failing intermediate check is returned as [`ReplayError::CheckFailed`]
/// together with the full trace.
pub fn replay_solvable_proof(g: &FiniteGroup, a: &SubsetMask, b: &SubsetMask) -> Result<ProofTrace, ReplayError> {
    if !is_solvable(g) {
        return Err(ReplayError::NotSolvable(g.label().to_string()));
    }
    let trace = replay_level(g, a, b)?;
    if let Some(check) = trace.failures().into_iter().next() {
        return Err(ReplayError::CheckFailed {
            check,
            trace: Box::new(trace),
        });
    }
    Ok(trace)
}

fn replay_level(g: &FiniteGroup, a: &SubsetMask, b: &SubsetMask) -> Result<ProofTrace, ReplayError> {
    if a.is_empty() || b.is_empty() {
        return Err(ReplayError::EmptySet);
    }
    let p_g = minimal_torsion(g);
    let (size_a, size_b) = (a.len(), b.len());
    let target = size_a as i64 + size_b as i64 - 1;
    if p_g.cmp_int(target).is_lt() {
        return Err(ReplayError::HypothesisFails {
            sum: target as usize,
            p: p_g,
        });
    }
    let product_size = product_set(g, a, b).len();
    let mut trace = ProofTrace {
        group: g.label().to_string(),
        order: g.order(),
        p_g,
        a: a.clone(),
        b: b.clone(),
        size_a,
        size_b,
        product_size,
        target,
        step: Step::Base(BaseCase {
            reason: BaseReason::Trivial,
            bound: target,
            holds: product_size as i64 >= target,
        }),
    };
    if g.order() == 1 || g.is_abelian() {
        if g.order() > 1 {
            trace.step = Step::Base(BaseCase {
                reason: BaseReason::Abelian,
                bound: p_g.min_with(target),
                holds: product_size as i64 >= p_g.min_with(target),
            });
        }
        return Ok(trace);
    }

    let k = choose_decomposition_subgroup(g)?;
    let fs = build_factor_system(g, &k, &RepPolicy::LowestIndex)?;
    let ext = fs.extension();
    let kernel_group = k.to_group(g, format!("{}>K{}", g.label(), k.order()));
    let quot = fs.quotient().table();

    let mut da = fs.decompose_subset(a);
    let mut db = fs.decompose_subset(b);
    let swapped = da.blocks.len() > db.blocks.len();
    let (working_a, working_b) = if swapped {
        let inv = |s: &SubsetMask| SubsetMask::from_elements(g.order(), s.iter().map(|x| g.inv(x)));
        (inv(b), inv(a))
    } else {
        (a.clone(), b.clone())
    };
    if swapped {
        da = fs.decompose_subset(&working_a);
        db = fs.decompose_subset(&working_b);
    }
    let alpha = da.blocks.len();
    let beta = db.blocks.len();
    let first = &da.blocks[0];
    let (h1, a1) = (first.coset, first.size);

    let lift = |part: &SubsetMask, coset: Elem| {
        SubsetMask::from_elements(
            g.order(),
            part.iter()
                .map(|kk| fs.psi_inverse(crate::factor::Pair {
                    kernel: k.elements()[kk as usize],
                    coset,
                })),
        )
    };
    let a1_global = lift(&first.kernel_part, h1);

    let mut block_checks = Vec::with_capacity(beta);
    for (j, bj) in db.blocks.iter().enumerate() {
        let hj = bj.coset;
        let product_size = product_set(g, &a1_global, &lift(&bj.kernel_part, hj)).len();
        let shift = ext.eta(h1, hj);
        let translated_b = SubsetMask::from_elements(
            k.order(),
            bj.kernel_part
                .iter()
                .map(|kk| kernel_group.mul(ext.phi(h1, kk), shift)),
        );
        let kernel_product_size = product_set(&kernel_group, &first.kernel_part, &translated_b).len();
        let bound = a1 as i64 + bj.size as i64 - 1;
        let sub_trace = replay_level(&kernel_group, &first.kernel_part, &translated_b)?;
        block_checks.push(BlockCheck {
            j: j + 1,
            coset_a: h1,
            coset_b: hj,
            product_coset: quot.mul(h1, hj),
            a1,
            b_j: bj.size,
            product_size,
            kernel_product_size,
            translated_b,
            bound,
            holds: product_size as i64 >= bound && product_size == kernel_product_size,
            sub_trace,
        });
    }

    let p_quotient = minimal_torsion(quot);
    let quotient_product = product_set(quot, &da.s2, &db.s2);
    let q_bound = alpha as i64 + beta as i64 - 1;
    let quotient_check = QuotientCheck {
        a2: da.s2.clone(),
        b2: db.s2.clone(),
        product_size: quotient_product.len(),
        bound: q_bound,
        hypothesis_holds: !p_quotient.cmp_int(q_bound).is_lt(),
        holds: quotient_product.len() as i64 >= q_bound,
        product: quotient_product,
    };

    let second_coordinates: Vec<Elem> = block_checks.iter().map(|bc| bc.product_coset).collect();
    let mut seen = SubsetMask::empty(quot.order());
    for &h in &second_coordinates {
        seen.insert(h);
    }
    let disjointness_check = DisjointnessCheck {
        distinct: seen.len() == second_coordinates.len(),
        second_coordinates,
    };

    let final_chain = final_chain(
        product_set(g, &working_a, &working_b).len(),
        &da,
        &db,
        &block_checks,
        &quotient_check.product,
        &seen,
    );

    trace.step = Step::Inductive(Box::new(InductiveStep {
        kernel: k.elements().to_vec(),
        quotient_order: quot.order(),
        p_kernel: minimal_torsion(&kernel_group),
        p_quotient,
        swapped,
        working_a,
        working_b,
        alpha,
        beta,
        a_sizes: da.sizes(),
        b_sizes: db.sizes(),
        a_cosets: da.blocks.iter().map(|b| b.coset).collect(),
        b_cosets: db.blocks.iter().map(|b| b.coset).collect(),
        block_checks,
        quotient_check,
        disjointness_check,
        final_chain,
    }));
    Ok(trace)
}

fn final_chain(
    working_product: usize,
    da: &SubsetDecomposition,
    db: &SubsetDecomposition,
    blocks: &[BlockCheck],
    quotient_product: &SubsetMask,
    first_row: &SubsetMask,
) -> FinalChain {
    let alpha = da.blocks.len() as i64;
    let beta = db.blocks.len() as i64;
    let a1 = da.blocks[0].size as i64;
    let size_a: i64 = da.sizes().iter().sum::<usize>() as i64;
    let size_b: i64 = db.sizes().iter().sum::<usize>() as i64;
    let block_sum: i64 = blocks.iter().map(|b| b.product_size as i64).sum();
    let block_bound_sum: i64 = blocks.iter().map(|b| b.bound).sum();
    let extra_cosets = quotient_product.iter().filter(|&h| !first_row.contains(h)).count() as i64;
    let traced_bound = block_sum + extra_cosets;
    let closed_form = beta * a1 + size_b - beta + alpha - 1;
    let target = size_a + size_b - 1;
    let product_size = working_product as i64;
    let steps = vec![
        ChainStep::ge("|A·B| >= sum_j |A_1·B_j| + extra cosets", product_size, traced_bound),
        ChainStep::ge("extra cosets >= alpha - 1", extra_cosets, alpha - 1),
        ChainStep::ge("sum_j |A_1·B_j| >= sum_j (a_1 + b_j - 1)", block_sum, block_bound_sum),
        ChainStep::eq(
            "sum_j (a_1 + b_j - 1) + alpha - 1 = beta·a_1 + |B| - beta + alpha - 1",
            block_bound_sum + alpha - 1,
            closed_form,
        ),
        ChainStep::ge("beta·a_1 >= alpha·a_1", beta * a1, alpha * a1),
        ChainStep::ge("alpha·a_1 >= |A|", alpha * a1, size_a),
        ChainStep::ge("beta·a_1 + |B| - beta + alpha - 1 >= |A| + |B| - 1", closed_form, target),
        ChainStep::ge("traced bound >= |A| + |B| - 1", traced_bound, target),
    ];
    FinalChain {
        product_size,
        block_sum,
        extra_cosets,
        traced_bound,
        block_bound_sum,
        closed_form,
        target,
        steps,
    }
}
