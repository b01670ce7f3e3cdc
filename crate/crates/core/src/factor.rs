//! Splitting a group along a normal subgroup `K` into pairs `(k, h)` with
//! `k ∈ K`, `h ∈ G/K`.
//!
//! Fix a representative `h̃` in each coset. Every `g` factors uniquely as
//! `g = k · h̃`, and the map `ψ(g) = (k, h)` turns the group product into
//!
//! ```text
//! (k₁, h₁) ⋆ (k₂, h₂) = (k₁ · φ_{h₁}(k₂) · η(h₁, h₂), h₁h₂)
//! φ_h(k)     = h̃ k h̃⁻¹
//! η(h₁, h₂) = h̃₁ h̃₂ (h₁h₂)~⁻¹
//! ```
//!
//! `φ` and `η` depend on the representatives; the isomorphism does not.
//! [`Extension`] holds the abstract data `(K, Q, φ, η)` on local indices and
//! can rebuild a group from it. [`FactorSystem`] ties that data back to a
//! concrete parent group.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::FactorError;
use crate::group::FiniteGroup;
use crate::mask::SubsetMask;
use crate::structure::{quotient, QuotientGroup, Subgroup};
use crate::Elem;

/// Kernel-local pair `(k, h)`: `k` indexes the kernel's sorted elements.
pub type LocalPair = (Elem, Elem);

/// A pair `(k, h)` with `k` a parent-group element of the kernel and `h` a
/// coset block index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Pair {
    pub kernel: Elem,
    pub coset: Elem,
}

/// Abstract factor-system data: kernel `K`, quotient `Q`, and dense `φ`/`η`
/// tables on local indices.
#[derive(Debug, Clone)]
pub struct Extension {
    kernel: FiniteGroup,
    quotient: FiniteGroup,
    /// `phi[h * |K| + k] = φ_h(k)`
    phi: Vec<Elem>,
    /// `eta[h₁ * |Q| + h₂] = η(h₁, h₂)`
    eta: Vec<Elem>,
}

impl Extension {
    pub fn new(
        kernel: FiniteGroup,
        quotient: FiniteGroup,
        phi: Vec<Elem>,
        eta: Vec<Elem>,
    ) -> Result<Self, FactorError> {
        let (nk, nq) = (kernel.order(), quotient.order());
        if phi.len() != nk * nq {
            return Err(FactorError::Shape(format!("phi has {} entries, expected {}", phi.len(), nk * nq)));
        }
        if eta.len() != nq * nq {
            return Err(FactorError::Shape(format!("eta has {} entries, expected {}", eta.len(), nq * nq)));
        }
        if let Some(&bad) = phi.iter().chain(&eta).find(|&&k| k as usize >= nk) {
            return Err(FactorError::Shape(format!("entry {bad} is not a kernel element")));
        }
        Ok(Extension {
            kernel,
            quotient,
            phi,
            eta,
        })
    }

    /// `φ ≡ id`, `η ≡ 1`: the direct product `K × Q`.
    pub fn trivial(kernel: FiniteGroup, quotient: FiniteGroup) -> Self {
        let (nk, nq) = (kernel.order(), quotient.order());
        let phi = (0..nq).flat_map(|_| 0..nk as Elem).collect();
        let eta = vec![kernel.identity(); nq * nq];
        Extension {
            kernel,
            quotient,
            phi,
            eta,
        }
    }

    pub fn kernel(&self) -> &FiniteGroup {
        &self.kernel
    }

    pub fn quotient(&self) -> &FiniteGroup {
        &self.quotient
    }

    #[inline]
    pub fn phi(&self, h: Elem, k: Elem) -> Elem {
        self.phi[h as usize * self.kernel.order() + k as usize]
    }

    #[inline]
    pub fn eta(&self, h1: Elem, h2: Elem) -> Elem {
        self.eta[h1 as usize * self.quotient.order() + h2 as usize]
    }

    /// Overwrites one cocycle entry. Meant for mutation tests; the result is
    /// generally no longer a factor system.
    pub fn set_eta(&mut self, h1: Elem, h2: Elem, k: Elem) {
        let nq = self.quotient.order();
        assert!((k as usize) < self.kernel.order());
        self.eta[h1 as usize * nq + h2 as usize] = k;
    }

    /// `(k₁, h₁) ⋆ (k₂, h₂)` on local indices.
    #[inline]
    pub fn star(&self, (k1, h1): LocalPair, (k2, h2): LocalPair) -> LocalPair {
        let k = &self.kernel;
        let first = k.mul(k.mul(k1, self.phi(h1, k2)), self.eta(h1, h2));
        (first, self.quotient.mul(h1, h2))
    }

    pub fn order(&self) -> usize {
        self.kernel.order() * self.quotient.order()
    }

    #[inline]
    pub fn pair_index(&self, (k, h): LocalPair) -> Elem {
        k * self.quotient.order() as Elem + h
    }

    #[inline]
    pub fn pair_at(&self, idx: Elem) -> LocalPair {
        let nq = self.quotient.order() as Elem;
        (idx / nq, idx % nq)
    }

    /// The ⋆ table on pair indices `k·|Q| + h`, unvalidated.
    pub fn star_table(&self) -> Vec<Elem> {
        let n = self.order() as Elem;
        let mut op = Vec::with_capacity((n * n) as usize);
        for x in 0..n {
            for y in 0..n {
                op.push(self.pair_index(self.star(self.pair_at(x), self.pair_at(y))));
            }
        }
        op
    }

    /// `(K × Q, ⋆)` as a group on pair indices. Fails when `⋆` is not a group
    /// law, which can only happen for hand-built data.
    pub fn to_group(&self, label: impl Into<String>) -> Result<FiniteGroup, FactorError> {
        FiniteGroup::from_table(self.order(), self.star_table(), label).map_err(|e| match e {
            crate::GroupError::NotAGroup(v) => FactorError::NotAGroup(v),
            other => FactorError::Shape(other.to_string()),
        })
    }

    /// Checks that every `φ_h` is an automorphism of `K`, and, when
    /// `normalized`, that `η` is trivial on the identity row and column.
    pub fn check(&self, normalized: bool) -> Result<(), String> {
        let k = &self.kernel;
        let nk = k.order() as Elem;
        for h in self.quotient.elements() {
            let mut seen = vec![false; nk as usize];
            for a in 0..nk {
                seen[self.phi(h, a) as usize] = true;
                for b in 0..nk {
                    if self.phi(h, k.mul(a, b)) != k.mul(self.phi(h, a), self.phi(h, b)) {
                        return Err(format!("φ_{h} is not multiplicative at ({a}, {b})"));
                    }
                }
            }
            if seen.iter().any(|s| !s) {
                return Err(format!("φ_{h} is not a bijection"));
            }
        }
        if normalized {
            let e = self.quotient.identity();
            for h in self.quotient.elements() {
                if self.eta(e, h) != k.identity() || self.eta(h, e) != k.identity() {
                    return Err(format!("η is not trivial at the identity for coset {h}"));
                }
            }
        }
        Ok(())
    }
}

/// How to pick one representative per coset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepPolicy {
    /// Smallest element index in each coset.
    LowestIndex,
    /// Uniform per coset from a ChaCha8 stream; the identity coset always
    /// gets the identity.
    SeededRandom(u64),
    /// One element per coset, listed in coset-block order.
    Explicit(Vec<Elem>),
}

/// The decomposition of a concrete group along a normal subgroup.
#[derive(Debug, Clone)]
pub struct FactorSystem {
    label: String,
    kernel: Subgroup,
    quotient: QuotientGroup,
    reps: Vec<Elem>,
    ext: Extension,
    forward: Vec<LocalPair>,
    backward: Vec<Elem>,
}

/// Outcome of checking that `ψ` is an isomorphism onto `(K × G/K, ⋆)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsomorphismCheck {
    pub bijective: bool,
    pub homomorphism: bool,
    /// First `(g₁, g₂)` in lexicographic order with `ψ(g₁g₂) ≠ ψ(g₁) ⋆ ψ(g₂)`.
    pub counterexample: Option<(Elem, Elem)>,
}

impl IsomorphismCheck {
    pub fn holds(&self) -> bool {
        self.bijective && self.homomorphism
    }
}

/// Splits `g` along the normal subgroup `k`.
pub fn build_factor_system(g: &FiniteGroup, k: &Subgroup, policy: &RepPolicy) -> Result<FactorSystem, FactorError> {
    let quot = quotient(g, k)?;
    let m = quot.order();
    let id_block = quot.project(g.identity()) as usize;
    let reps: Vec<Elem> = match policy {
        RepPolicy::LowestIndex => quot.blocks().iter().map(|b| b[0]).collect(),
        RepPolicy::SeededRandom(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            quot.blocks()
                .iter()
                .enumerate()
                .map(|(h, b)| {
                    if h == id_block {
                        g.identity()
                    } else {
                        b[rng.random_range(0..b.len())]
                    }
                })
                .collect()
        }
        RepPolicy::Explicit(reps) => {
            if reps.len() != m {
                return Err(FactorError::RepresentativeCount {
                    expected: m,
                    got: reps.len(),
                });
            }
            for (h, &r) in reps.iter().enumerate() {
                if r as usize >= g.order() || quot.project(r) as usize != h {
                    return Err(FactorError::RepresentativeOutsideCoset { coset: h, rep: r });
                }
            }
            reps.clone()
        }
    };

    let kernel_group = k.to_group(g, format!("K{}", k.order()));
    let local = |x: Elem| k.local_index(x).expect("element lies in the kernel") as Elem;
    let nk = k.order();

    let mut phi = Vec::with_capacity(m * nk);
    for &r in &reps {
        for &kk in k.elements() {
            phi.push(local(g.conjugate(kk, r)));
        }
    }
    let qt = quot.table();
    let mut eta = Vec::with_capacity(m * m);
    for h1 in 0..m as Elem {
        for h2 in 0..m as Elem {
            let h12 = qt.mul(h1, h2);
            let v = g.mul(g.mul(reps[h1 as usize], reps[h2 as usize]), g.inv(reps[h12 as usize]));
            eta.push(local(v));
        }
    }
    let ext = Extension::new(kernel_group, qt.clone(), phi, eta)?;

    let forward: Vec<LocalPair> = g
        .elements()
        .map(|x| {
            let h = quot.project(x);
            (local(g.mul(x, g.inv(reps[h as usize]))), h)
        })
        .collect();
    let mut backward = vec![Elem::MAX; g.order()];
    for (x, &pair) in forward.iter().enumerate() {
        backward[ext.pair_index(pair) as usize] = x as Elem;
    }

    Ok(FactorSystem {
        label: g.label().to_string(),
        kernel: k.clone(),
        quotient: quot,
        reps,
        ext,
        forward,
        backward,
    })
}

impl FactorSystem {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kernel(&self) -> &Subgroup {
        &self.kernel
    }

    pub fn quotient(&self) -> &QuotientGroup {
        &self.quotient
    }

    pub fn reps(&self) -> &[Elem] {
        &self.reps
    }

    pub fn extension(&self) -> &Extension {
        &self.ext
    }

    pub fn extension_mut(&mut self) -> &mut Extension {
        &mut self.ext
    }

    fn global(&self, k: Elem) -> Elem {
        self.kernel.elements()[k as usize]
    }

    fn local(&self, k: Elem) -> Elem {
        self.kernel.local_index(k).expect("element lies in the kernel") as Elem
    }

    /// `ψ(g)` with the kernel coordinate on local indices.
    #[inline]
    pub fn psi_local(&self, g: Elem) -> LocalPair {
        self.forward[g as usize]
    }

    /// `ψ(g)` as a pair index `k·|Q| + h` of the rebuilt group.
    #[inline]
    pub fn psi_index(&self, g: Elem) -> Elem {
        self.ext.pair_index(self.forward[g as usize])
    }

    pub fn psi(&self, g: Elem) -> Pair {
        let (k, h) = self.forward[g as usize];
        Pair {
            kernel: self.global(k),
            coset: h,
        }
    }

    pub fn psi_inverse(&self, p: Pair) -> Elem {
        self.backward[self.ext.pair_index((self.local(p.kernel), p.coset)) as usize]
    }

    pub fn phi(&self, h: Elem, k: Elem) -> Elem {
        self.global(self.ext.phi(h, self.local(k)))
    }

    pub fn eta(&self, h1: Elem, h2: Elem) -> Elem {
        self.global(self.ext.eta(h1, h2))
    }

    /// `x ⋆ y` with kernel coordinates given as parent-group elements.
    pub fn star(&self, x: Pair, y: Pair) -> Pair {
        let (k, h) = self
            .ext
            .star((self.local(x.kernel), x.coset), (self.local(y.kernel), y.coset));
        Pair {
            kernel: self.global(k),
            coset: h,
        }
    }

    /// Checks the factor-system invariants against the parent group.
    pub fn check(&self, g: &FiniteGroup) -> Result<(), String> {
        for (h, &r) in self.reps.iter().enumerate() {
            if self.quotient.project(r) as usize != h {
                return Err(format!("rep {r} is not in coset {h}"));
            }
        }
        let normalized = self.reps[self.quotient.project(g.identity()) as usize] == g.identity();
        self.ext.check(normalized)?;
        for x in g.elements() {
            let p = self.psi(x);
            if g.mul(p.kernel, self.reps[p.coset as usize]) != x {
                return Err(format!("ψ({x}) = ({}, {}) does not recompose", p.kernel, p.coset));
            }
        }
        Ok(())
    }

    /// Checks that `ψ` is a bijection and that `ψ(g₁g₂) = ψ(g₁) ⋆ ψ(g₂)`.
    pub fn verify_isomorphism(&self, g: &FiniteGroup) -> IsomorphismCheck {
        let bijective = self.backward.iter().all(|&x| x != Elem::MAX)
            && g.elements().all(|x| self.backward[self.psi_index(x) as usize] == x);
        let counterexample = g.elements().find_map(|a| {
            g.elements()
                .find(|&b| self.forward[g.mul(a, b) as usize] != self.ext.star(self.forward[a as usize], self.forward[b as usize]))
                .map(|b| (a, b))
        });
        IsomorphismCheck {
            bijective,
            homomorphism: counterexample.is_none(),
            counterexample,
        }
    }

    /// Rebuilds `(K × G/K, ⋆)` as a group on pair indices.
    pub fn extension_group(&self) -> Result<FiniteGroup, FactorError> {
        self.ext.to_group(format!("ext({})", self.label))
    }

    /// Pushes a subset of `G` through `ψ` and groups it by coset.
    pub fn decompose_subset(&self, s: &SubsetMask) -> SubsetDecomposition {
        let nk = self.kernel.order();
        let nq = self.quotient.order();
        let mut parts = vec![SubsetMask::empty(nk); nq];
        for x in s {
            let (k, h) = self.forward[x as usize];
            parts[h as usize].insert(k);
        }
        let mut s1 = SubsetMask::empty(nk);
        let mut s2 = SubsetMask::empty(nq);
        let mut blocks = Vec::new();
        for (h, part) in parts.into_iter().enumerate() {
            if part.is_empty() {
                continue;
            }
            s1.union_with(&part);
            s2.insert(h as Elem);
            blocks.push(CosetBlock {
                coset: h as Elem,
                size: part.len(),
                kernel_part: part,
            });
        }
        blocks.sort_by(|a, b| b.size.cmp(&a.size).then(a.coset.cmp(&b.coset)));
        SubsetDecomposition { s1, s2, blocks }
    }

    /// JSON-friendly view on parent-group element indices.
    pub fn to_document(&self, g: &FiniteGroup) -> FactorSystemDocument {
        let nq = self.quotient.order() as Elem;
        FactorSystemDocument {
            group: self.label.clone(),
            order: g.order(),
            kernel: self.kernel.elements().to_vec(),
            quotient_order: nq as usize,
            cosets: self.quotient.blocks().to_vec(),
            reps: self.reps.clone(),
            quotient_table: (0..nq).map(|h| self.quotient.table().row(h).to_vec()).collect(),
            phi: (0..nq)
                .map(|h| self.kernel.elements().iter().map(|&k| self.phi(h, k)).collect())
                .collect(),
            eta: (0..nq).map(|h1| (0..nq).map(|h2| self.eta(h1, h2)).collect()).collect(),
            psi: g.elements().map(|x| self.psi(x)).collect(),
        }
    }
}

/// Serialized form of a [`FactorSystem`]. Kernel coordinates are parent-group
/// element indices; cosets are block indices.
#[derive(Debug, Clone, Serialize)]
pub struct FactorSystemDocument {
    pub group: String,
    pub order: usize,
    pub kernel: Vec<Elem>,
    pub quotient_order: usize,
    /// Members of each coset, ascending; block 0 is the kernel.
    pub cosets: Vec<Vec<Elem>>,
    pub reps: Vec<Elem>,
    pub quotient_table: Vec<Vec<Elem>>,
    /// `phi[h][i] = φ_h(kernel[i])`
    pub phi: Vec<Vec<Elem>>,
    /// `eta[h1][h2]`
    pub eta: Vec<Vec<Elem>>,
    /// `psi[g]` for every element `g`.
    pub psi: Vec<Pair>,
}

/// The part of `ψ(S)` lying over one coset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetBlock {
    pub coset: Elem,
    /// Kernel coordinates on local indices.
    pub kernel_part: SubsetMask,
    pub size: usize,
}

/// `S¹`, `S²`, and the per-coset blocks of a subset, largest block first
/// (ties by ascending coset index).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubsetDecomposition {
    /// First coordinates, on kernel-local indices.
    pub s1: SubsetMask,
    /// Second coordinates (coset indices).
    pub s2: SubsetMask,
    pub blocks: Vec<CosetBlock>,
}

impl SubsetDecomposition {
    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.size).collect()
    }
}
