//! Product sets, restricted product sets, and single-pair bound checks.

use serde::Serialize;

use crate::group::FiniteGroup;
use crate::mask::SubsetMask;
use crate::structure::{minimal_torsion, Torsion};

/// Which lower bound a check uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Theorem {
    /// `|A·B| ≥ min(p(G), |A| + |B| − 1)`
    #[serde(rename = "cd")]
    CauchyDavenport,
    /// `|A ∔ B| ≥ min(p(G), |A| + |B| − 3)` over pairs with `a ≠ b`
    #[serde(rename = "eh")]
    ErdosHeilbronn,
}

impl Theorem {
    pub fn bound(self, p: Torsion, size_a: usize, size_b: usize) -> i64 {
        let slack = match self {
            Theorem::CauchyDavenport => 1,
            Theorem::ErdosHeilbronn => 3,
        };
        p.min_with(size_a as i64 + size_b as i64 - slack)
    }

    pub fn name(self) -> &'static str {
        match self {
            Theorem::CauchyDavenport => "cd",
            Theorem::ErdosHeilbronn => "eh",
        }
    }
}

/// Writes `A·B` into `out` (cleared first), one left translate `x·B` per
/// `x ∈ A`.
pub(crate) fn product_into(g: &FiniteGroup, a: &SubsetMask, b: &SubsetMask, out: &mut SubsetMask) {
    out.clear();
    if b.is_empty() {
        return;
    }
    let words = out.words_mut();
    for x in a {
        g.left_translate_into(x, b, words);
    }
}

/// Writes `{ab : a ∈ A, b ∈ B, a ≠ b}` into `out`, reusing `scratch`.
pub(crate) fn restricted_product_into(
    g: &FiniteGroup,
    a: &SubsetMask,
    b: &SubsetMask,
    out: &mut SubsetMask,
    scratch: &mut SubsetMask,
) {
    out.clear();
    scratch.clone_from(b);
    let words = out.words_mut();
    for x in a {
        let had = scratch.contains(x);
        if had {
            scratch.remove(x);
        }
        g.left_translate_into(x, scratch, words);
        if had {
            scratch.insert(x);
        }
    }
}

/// `A·B = {ab : a ∈ A, b ∈ B}`.
pub fn product_set(g: &FiniteGroup, a: &SubsetMask, b: &SubsetMask) -> SubsetMask {
    let mut out = SubsetMask::empty(g.order());
    product_into(g, a, b, &mut out);
    out
}

/// `{ab : a ∈ A, b ∈ B, a ≠ b}`; the condition compares elements.
pub fn restricted_product_set(g: &FiniteGroup, a: &SubsetMask, b: &SubsetMask) -> SubsetMask {
    let mut out = SubsetMask::empty(g.order());
    let mut scratch = SubsetMask::empty(g.order());
    restricted_product_into(g, a, b, &mut out, &mut scratch);
    out
}

/// One pair checked against one bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub group: String,
    pub theorem: Theorem,
    pub size_a: usize,
    pub size_b: usize,
    pub product_size: usize,
    pub p_g: Torsion,
    pub bound: i64,
    pub holds: bool,
    pub a: SubsetMask,
    pub b: SubsetMask,
}

impl BoundCheck {
    pub fn new(
        g: &FiniteGroup,
        theorem: Theorem,
        p_g: Torsion,
        a: SubsetMask,
        b: SubsetMask,
        product_size: usize,
    ) -> Self {
        let (size_a, size_b) = (a.len(), b.len());
        let bound = theorem.bound(p_g, size_a, size_b);
        BoundCheck {
            group: g.label().to_string(),
            theorem,
            size_a,
            size_b,
            product_size,
            p_g,
            bound,
            holds: product_size as i64 >= bound,
            a,
            b,
        }
    }

    pub fn is_extremal(&self) -> bool {
        self.product_size as i64 == self.bound
    }
}

/// Checks one pair. For CD with `|A| + |B| − 1 > p(G)` the bound is capped at
/// `p(G)`: any `A* ⊆ A`, `B* ⊆ B` with `|A*| + |B*| − 1 = p(G)` already has
/// `|A*·B*| ≥ p(G)`, and `A·B ⊇ A*·B*`.
pub fn cd_bound(g: &FiniteGroup, a: &SubsetMask, b: &SubsetMask, theorem: Theorem) -> BoundCheck {
    cd_bound_with(g, minimal_torsion(g), a, b, theorem)
}

pub fn cd_bound_with(g: &FiniteGroup, p_g: Torsion, a: &SubsetMask, b: &SubsetMask, theorem: Theorem) -> BoundCheck {
    let product = match theorem {
        Theorem::CauchyDavenport => product_set(g, a, b),
        Theorem::ErdosHeilbronn => restricted_product_set(g, a, b),
    };
    BoundCheck::new(g, theorem, p_g, a.clone(), b.clone(), product.len())
}
