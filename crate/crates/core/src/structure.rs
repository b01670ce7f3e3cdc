//! Subgroup machinery: closures, normality, commutators, derived series,
//! quotients, and the minimal torsion `p(G)`.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::StructureError;
use crate::group::FiniteGroup;
use crate::mask::SubsetMask;
use crate::Elem;

/// `p(G)`: a positive integer, or infinity for the trivial group.
///
/// `Infinite` orders above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Torsion {
    Finite(usize),
    Infinite,
}

impl Torsion {
    pub fn finite(self) -> Option<usize> {
        match self {
            Torsion::Finite(p) => Some(p),
            Torsion::Infinite => None,
        }
    }

    /// `min(self, x)` as a signed integer; `x` may be negative.
    pub fn min_with(self, x: i64) -> i64 {
        match self {
            Torsion::Finite(p) => x.min(p as i64),
            Torsion::Infinite => x,
        }
    }

    /// Compares against a signed integer with infinity above everything.
    pub fn cmp_int(self, x: i64) -> Ordering {
        match self {
            Torsion::Finite(p) => (p as i64).cmp(&x),
            Torsion::Infinite => Ordering::Greater,
        }
    }
}

impl fmt::Display for Torsion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Torsion::Finite(p) => write!(f, "{p}"),
            Torsion::Infinite => write!(f, "infinity"),
        }
    }
}

/// Finite values serialize as numbers, infinity as the string `"infinity"`.
impl Serialize for Torsion {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Torsion::Finite(p) => s.serialize_u64(*p as u64),
            Torsion::Infinite => s.serialize_str("infinity"),
        }
    }
}

/// A subgroup of some parent group, as a member mask plus sorted element list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    members: SubsetMask,
    elements: Vec<Elem>,
}

impl Subgroup {
    fn from_mask(members: SubsetMask) -> Self {
        let elements = members.to_vec();
        Subgroup { members, elements }
    }

    pub fn trivial(g: &FiniteGroup) -> Self {
        Self::from_mask(SubsetMask::from_elements(g.order(), [g.identity()]))
    }

    pub fn whole(g: &FiniteGroup) -> Self {
        Self::from_mask(SubsetMask::full(g.order()))
    }

    pub fn members(&self) -> &SubsetMask {
        &self.members
    }

    /// Members in ascending index order.
    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.members.contains(e)
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// Position of `e` in [`Subgroup::elements`].
    pub fn local_index(&self, e: Elem) -> Option<usize> {
        self.elements.binary_search(&e).ok()
    }

    /// The subgroup as a group in its own right, on local indices
    /// `0..order` that follow the ascending parent indices.
    pub fn to_group(&self, g: &FiniteGroup, label: impl Into<String>) -> FiniteGroup {
        let m = self.order();
        let mut op = Vec::with_capacity(m * m);
        for &a in &self.elements {
            for &b in &self.elements {
                let c = g.mul(a, b);
                op.push(self.local_index(c).expect("subgroup is closed") as Elem);
            }
        }
        let e = self.local_index(g.identity()).expect("subgroup contains the identity") as Elem;
        FiniteGroup::from_trusted(m, op, e, label.into())
    }

    /// Checks closure, identity, inverses, and Lagrange against `g`.
    pub fn is_subgroup_of(&self, g: &FiniteGroup) -> bool {
        self.contains(g.identity())
            && g.order().is_multiple_of(self.order())
            && self.elements.iter().all(|&a| {
                self.contains(g.inv(a)) && self.elements.iter().all(|&b| self.contains(g.mul(a, b)))
            })
    }
}

/// Smallest subgroup containing `gens`, by worklist closure.
pub fn generated_subgroup(g: &FiniteGroup, gens: &SubsetMask) -> Subgroup {
    let mut members = SubsetMask::from_elements(g.order(), [g.identity()]);
    let mut list = vec![g.identity()];
    let mut queue: VecDeque<Elem> = gens.iter().collect();
    while let Some(x) = queue.pop_front() {
        if members.contains(x) {
            continue;
        }
        members.insert(x);
        list.push(x);
        queue.push_back(g.inv(x));
        for &y in &list {
            for z in [g.mul(x, y), g.mul(y, x)] {
                if !members.contains(z) {
                    queue.push_back(z);
                }
            }
        }
    }
    Subgroup::from_mask(members)
}

/// First `(member, conjugator)` with `by · member · by⁻¹` outside `h`.
pub fn normality_witness(g: &FiniteGroup, h: &Subgroup) -> Option<(Elem, Elem)> {
    g.elements().find_map(|x| {
        h.elements()
            .iter()
            .find(|&&k| !h.contains(g.conjugate(k, x)))
            .map(|&k| (k, x))
    })
}

pub fn is_normal(g: &FiniteGroup, h: &Subgroup) -> bool {
    normality_witness(g, h).is_none()
}

fn commutator_subgroup_within(g: &FiniteGroup, h: &Subgroup) -> Subgroup {
    let mut gens = SubsetMask::empty(g.order());
    for &a in h.elements() {
        for &b in h.elements() {
            gens.insert(g.commutator(a, b));
        }
    }
    generated_subgroup(g, &gens)
}

/// `[G, G]`, generated by all `a b a⁻¹ b⁻¹`.
pub fn commutator_subgroup(g: &FiniteGroup) -> Subgroup {
    commutator_subgroup_within(g, &Subgroup::whole(g))
}

/// `G ⊇ G′ ⊇ G″ ⊇ …`, stopping at the first repeat. The first entry is `G`.
pub fn derived_series(g: &FiniteGroup) -> Vec<Subgroup> {
    let mut series = vec![Subgroup::whole(g)];
    loop {
        let last = series.last().expect("series is never empty");
        let next = commutator_subgroup_within(g, last);
        if next.order() == last.order() {
            return series;
        }
        series.push(next);
    }
}

pub fn is_solvable(g: &FiniteGroup) -> bool {
    derived_series(g).last().is_some_and(Subgroup::is_trivial)
}

/// Least prime dividing `n`; infinity for `n = 1`.
pub fn smallest_prime_factor(n: usize) -> Torsion {
    assert!(n >= 1, "smallest_prime_factor needs n >= 1");
    if n == 1 {
        return Torsion::Infinite;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return Torsion::Finite(d);
        }
        d += 1;
    }
    Torsion::Finite(n)
}

/// `p(G)`: the least order of a non-identity element.
pub fn minimal_torsion(g: &FiniteGroup) -> Torsion {
    g.elements()
        .filter(|&x| x != g.identity())
        .map(|x| g.element_order(x))
        .min()
        .map_or(Torsion::Infinite, Torsion::Finite)
}

/// Normal subgroups generated by at most two elements, ascending by order
/// then by member mask. For the small groups this crate targets that covers
/// every normal subgroup a decomposition would use.
pub fn normal_subgroups_two_generated(g: &FiniteGroup) -> Vec<Subgroup> {
    let n = g.order();
    let mut found: Vec<Subgroup> = vec![Subgroup::trivial(g)];
    let mut seen = std::collections::HashSet::new();
    seen.insert(found[0].members.clone());
    for x in g.elements() {
        let cyclic = generated_subgroup(g, &SubsetMask::from_elements(n, [x]));
        for y in g.elements().filter(|&y| y > x) {
            if cyclic.contains(y) {
                continue;
            }
            let h = generated_subgroup(g, &SubsetMask::from_elements(n, [x, y]));
            if seen.insert(h.members.clone()) && is_normal(g, &h) {
                found.push(h);
            }
        }
        if seen.insert(cyclic.members.clone()) && is_normal(g, &cyclic) {
            found.push(cyclic);
        }
    }
    found.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.members.cmp(&b.members)));
    found
}

/// `G/K` with cosets numbered in order of their smallest element, so the
/// kernel is always block 0.
#[derive(Debug, Clone)]
pub struct QuotientGroup {
    kernel: Subgroup,
    blocks: Vec<Vec<Elem>>,
    table: FiniteGroup,
    project: Vec<Elem>,
}

impl QuotientGroup {
    pub fn kernel(&self) -> &Subgroup {
        &self.kernel
    }

    /// Coset members in ascending order, indexed by block.
    pub fn blocks(&self) -> &[Vec<Elem>] {
        &self.blocks
    }

    pub fn block(&self, h: Elem) -> &[Elem] {
        &self.blocks[h as usize]
    }

    pub fn table(&self) -> &FiniteGroup {
        &self.table
    }

    pub fn order(&self) -> usize {
        self.blocks.len()
    }

    #[inline]
    pub fn project(&self, g: Elem) -> Elem {
        self.project[g as usize]
    }

    pub fn projection(&self) -> &[Elem] {
        &self.project
    }

    /// Checks that blocks are the cosets of the kernel and that projection is
    /// a homomorphism onto a valid group table.
    pub fn check(&self, g: &FiniteGroup) -> Result<(), String> {
        if self.table.order() * self.kernel.order() != g.order() {
            return Err("|G/K|·|K| != |G|".into());
        }
        if !self.table.validate().is_valid() {
            return Err("quotient table is not a group".into());
        }
        for (h, block) in self.blocks.iter().enumerate() {
            let rep = block[0];
            let mut coset: Vec<Elem> = self.kernel.elements().iter().map(|&k| g.mul(k, rep)).collect();
            coset.sort_unstable();
            if &coset != block {
                return Err(format!("block {h} is not the right coset K·{rep}"));
            }
        }
        for a in g.elements() {
            for b in g.elements() {
                if self.project(g.mul(a, b)) != self.table.mul(self.project(a), self.project(b)) {
                    return Err(format!("projection is not a homomorphism at ({a}, {b})"));
                }
            }
        }
        Ok(())
    }
}

pub fn quotient(g: &FiniteGroup, k: &Subgroup) -> Result<QuotientGroup, StructureError> {
    if let Some((member, by)) = normality_witness(g, k) {
        return Err(StructureError::NotNormal { member, by });
    }
    let n = g.order();
    let mut project = vec![Elem::MAX; n];
    let mut blocks: Vec<Vec<Elem>> = Vec::new();
    for x in g.elements() {
        if project[x as usize] != Elem::MAX {
            continue;
        }
        let h = blocks.len() as Elem;
        let mut block: Vec<Elem> = k.elements().iter().map(|&kk| g.mul(kk, x)).collect();
        block.sort_unstable();
        for &y in &block {
            project[y as usize] = h;
        }
        blocks.push(block);
    }
    let m = blocks.len();
    let mut op = Vec::with_capacity(m * m);
    for h1 in 0..m {
        for h2 in 0..m {
            op.push(project[g.mul(blocks[h1][0], blocks[h2][0]) as usize]);
        }
    }
    let identity = project[g.identity() as usize];
    let table = FiniteGroup::from_trusted(m, op, identity, format!("{}/K{}", g.label(), k.order()));
    Ok(QuotientGroup {
        kernel: k.clone(),
        blocks,
        table,
        project,
    })
}

/// `{1} = G₀ ⊴ G₁ ⊴ … ⊴ Gₙ = G` with abelian factors, plus the quotient
/// `G_i / G_{i−1}` for each step (computed inside `G_i`).
#[derive(Debug, Clone)]
pub struct SolvableChain {
    pub groups: Vec<Subgroup>,
    pub quotients: Vec<QuotientGroup>,
}

impl SolvableChain {
    pub fn check(&self, g: &FiniteGroup) -> Result<(), String> {
        let first = self.groups.first().ok_or("empty chain")?;
        let last = self.groups.last().ok_or("empty chain")?;
        if !first.is_trivial() {
            return Err("chain does not start at the trivial subgroup".into());
        }
        if last.order() != g.order() {
            return Err("chain does not end at G".into());
        }
        if self.quotients.len() + 1 != self.groups.len() {
            return Err("one quotient witness per step expected".into());
        }
        for (i, pair) in self.groups.windows(2).enumerate() {
            let (lower, upper) = (&pair[0], &pair[1]);
            if !lower.members().is_subset_of(upper.members()) {
                return Err(format!("G_{i} is not inside G_{}", i + 1));
            }
            let upper_group = upper.to_group(g, "G_i");
            let lower_local = local_subgroup(upper, lower);
            if !is_normal(&upper_group, &lower_local) {
                return Err(format!("G_{i} is not normal in G_{}", i + 1));
            }
            if !self.quotients[i].table().is_abelian() {
                return Err(format!("G_{}/G_{i} is not abelian", i + 1));
            }
        }
        Ok(())
    }
}

/// `inner` re-expressed on the local indices of `outer`.
fn local_subgroup(outer: &Subgroup, inner: &Subgroup) -> Subgroup {
    let mask = SubsetMask::from_elements(
        outer.order(),
        inner
            .elements()
            .iter()
            .map(|&e| outer.local_index(e).expect("inner lies in outer") as Elem),
    );
    Subgroup::from_mask(mask)
}

/// The reversed derived series, when it reaches the trivial group.
pub fn solvable_chain(g: &FiniteGroup) -> Option<SolvableChain> {
    let mut groups = derived_series(g);
    if !groups.last()?.is_trivial() {
        return None;
    }
    groups.reverse();
    let quotients = groups
        .windows(2)
        .map(|pair| {
            let upper_group = pair[1].to_group(g, "G_i");
            let lower_local = local_subgroup(&pair[1], &pair[0]);
            quotient(&upper_group, &lower_local).expect("derived subgroups are normal")
        })
        .collect();
    Some(SolvableChain { groups, quotients })
}

/// Picks the normal subgroup `K` used to split `G` into `K × G/K`.
///
/// Nonabelian: the derived subgroup. Abelian: `⟨x⟩` for the lowest-index `x`
/// of order `p(G)` when that is proper, otherwise the trivial subgroup.
pub fn choose_decomposition_subgroup(g: &FiniteGroup) -> Result<Subgroup, StructureError> {
    if g.order() == 1 {
        return Err(StructureError::TrivialGroup);
    }
    let derived = commutator_subgroup(g);
    if derived.order() == g.order() {
        return Err(StructureError::NotSolvable(g.label().to_string()));
    }
    if !derived.is_trivial() {
        if !is_solvable(g) {
            return Err(StructureError::NotSolvable(g.label().to_string()));
        }
        return Ok(derived);
    }
    if !g.is_abelian() {
        return Err(StructureError::InconsistentDerivedSubgroup);
    }
    let p = minimal_torsion(g).finite().expect("nontrivial group");
    let x = g
        .elements()
        .find(|&x| x != g.identity() && g.element_order(x) == p)
        .expect("some element attains the minimal order");
    let cyclic = generated_subgroup(g, &SubsetMask::from_elements(g.order(), [x]));
    if cyclic.order() < g.order() {
        Ok(cyclic)
    } else {
        Ok(Subgroup::trivial(g))
    }
}
