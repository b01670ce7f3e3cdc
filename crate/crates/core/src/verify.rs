//! Exhaustive, size-capped, and sampled verification of the CD and EH bounds.
//!
//! Work is split into index ranges, mapped in parallel, and merged in range
//! order, so reports do not depend on the number of workers.
//!
//! Sampled mode draws pair `i` from a ChaCha8 generator seeded with the plan's
//! seed and switched to stream `i`. Draws for `A` come before draws for `B`.

use std::time::{Duration, Instant};

use rand::seq::index;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::group::FiniteGroup;
use crate::mask::{words_for, SubsetMask};
use crate::structure::{minimal_torsion, Torsion};
use crate::sumset::{product_into, restricted_product_into, BoundCheck, Theorem};
use crate::Elem;

/// Full enumeration is allowed up to this order unless overridden.
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 11;

/// Subset-DP enumeration keeps a `2^n` table per worker; never go past this.
pub const HARD_EXHAUSTIVE_LIMIT: usize = 22;

/// Default cap on the number of pairs a capped or extremal search may visit.
pub const DEFAULT_MAX_PAIRS: u128 = 2_000_000_000;

/// Default number of extremal witnesses kept in a report.
pub const DEFAULT_MAX_WITNESSES: usize = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("group order {order} exceeds the exhaustive limit {limit}; use caps or sampling")]
    OrderTooLarge { order: usize, limit: usize },

    #[error("search space of {pairs} pairs exceeds the limit {limit}")]
    SearchTooLarge { pairs: u128, limit: u128 },

    #[error("invalid sampling plan: {0}")]
    InvalidPlan(String),

    #[error("invalid set sizes ({size_a}, {size_b}) for a group of order {order}")]
    InvalidSizes { size_a: usize, size_b: usize, order: usize },
}

/// Optional limits on `|A|`, `|B|`, and `|A| + |B|`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub max_a_size: Option<usize>,
    pub max_b_size: Option<usize>,
    pub sum_cap: Option<usize>,
}

impl Caps {
    pub fn sizes(max_a: usize, max_b: usize) -> Self {
        Caps {
            max_a_size: Some(max_a),
            max_b_size: Some(max_b),
            sum_cap: None,
        }
    }

    fn admits(&self, size_a: usize, size_b: usize) -> bool {
        self.sum_cap.is_none_or(|s| size_a + size_b <= s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SizeDistribution {
    /// Each set uniform over the nonempty subsets of `G`.
    UniformNonempty,
    /// Uniform over subsets of exactly these sizes.
    Fixed { size_a: usize, size_b: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SamplingPlan {
    pub seed: u64,
    pub count: u64,
    pub distribution: SizeDistribution,
}

impl SamplingPlan {
    pub fn uniform(seed: u64, count: u64) -> Self {
        SamplingPlan {
            seed,
            count,
            distribution: SizeDistribution::UniformNonempty,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerifyMode {
    Exhaustive,
    SizeCapped(Caps),
    Sampled(SamplingPlan),
}

/// A pair attaining its bound with equality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub a: SubsetMask,
    pub b: SubsetMask,
    pub product_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub group: String,
    pub order: usize,
    pub theorem: Theorem,
    pub mode: VerifyMode,
    pub p_g: Torsion,
    pub pairs_checked: u64,
    /// Every failing pair, in enumeration order.
    pub violations: Vec<BoundCheck>,
    pub extremal_count: u64,
    /// The first few extremal pairs in enumeration order.
    pub extremal_witnesses: Vec<Witness>,
    /// Not serialized, so repeated runs give identical JSON.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl VerificationReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Default)]
struct Partial {
    pairs: u64,
    violations: Vec<BoundCheck>,
    extremal: u64,
    witnesses: Vec<Witness>,
}

impl Partial {
    fn record(&mut self, ctx: &Ctx<'_>, a: impl Fn() -> SubsetMask, b: impl Fn() -> SubsetMask, sa: usize, sb: usize, product: usize) {
        self.pairs += 1;
        let bound = ctx.theorem.bound(ctx.p_g, sa, sb);
        let size = product as i64;
        if size < bound {
            self.violations
                .push(BoundCheck::new(ctx.group, ctx.theorem, ctx.p_g, a(), b(), product));
        } else if size == bound {
            self.extremal += 1;
            if self.witnesses.len() < ctx.max_witnesses {
                self.witnesses.push(Witness {
                    a: a(),
                    b: b(),
                    product_size: product,
                });
            }
        }
    }

    fn merge(parts: Vec<Partial>, max_witnesses: usize) -> Partial {
        let mut out = Partial::default();
        for p in parts {
            out.pairs += p.pairs;
            out.extremal += p.extremal;
            out.violations.extend(p.violations);
            let room = max_witnesses.saturating_sub(out.witnesses.len());
            out.witnesses.extend(p.witnesses.into_iter().take(room));
        }
        out
    }
}

struct Ctx<'g> {
    group: &'g FiniteGroup,
    theorem: Theorem,
    p_g: Torsion,
    max_witnesses: usize,
}

/// Verification settings shared by all modes.
#[derive(Debug, Clone)]
pub struct Verifier {
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    pub exhaustive_limit: usize,
    pub max_pairs: u128,
    pub max_witnesses: usize,
}

impl Default for Verifier {
    fn default() -> Self {
        Verifier {
            workers: None,
            exhaustive_limit: DEFAULT_EXHAUSTIVE_LIMIT,
            max_pairs: DEFAULT_MAX_PAIRS,
            max_witnesses: DEFAULT_MAX_WITNESSES,
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// All subsets with `lo <= |S| <= hi`, ascending by mask value.
fn subsets_by_size(n: usize, lo: usize, hi: usize) -> Vec<SubsetMask> {
    let mut out = Vec::new();
    let mut combo = Vec::new();
    for k in lo..=hi.min(n) {
        combo.clear();
        combo.extend(0..k as Elem);
        loop {
            out.push(SubsetMask::from_elements(n, combo.iter().copied()));
            // advance to the next k-combination in lexicographic order
            let Some(i) = (0..k).rev().find(|&i| (combo[i] as usize) < n - k + i) else {
                break;
            };
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    out.sort_unstable();
    out
}

impl Verifier {
    pub fn with_workers(workers: Option<usize>) -> Self {
        Verifier {
            workers,
            ..Verifier::default()
        }
    }

    fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        match self.workers {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .expect("thread pool")
                .install(f),
            None => f(),
        }
    }

    fn ctx<'g>(&self, g: &'g FiniteGroup, theorem: Theorem) -> Ctx<'g> {
        Ctx {
            group: g,
            theorem,
            p_g: minimal_torsion(g),
            max_witnesses: self.max_witnesses,
        }
    }

    fn report(&self, ctx: &Ctx<'_>, mode: VerifyMode, part: Partial, start: Instant) -> VerificationReport {
        VerificationReport {
            group: ctx.group.label().to_string(),
            order: ctx.group.order(),
            theorem: ctx.theorem,
            mode,
            p_g: ctx.p_g,
            pairs_checked: part.pairs,
            violations: part.violations,
            extremal_count: part.extremal,
            extremal_witnesses: part.witnesses,
            wall_time: start.elapsed(),
        }
    }

    /// Checks every ordered pair, or every pair within `caps`. Iteration is
    /// `A` outer, `B` inner, both ascending by mask value.
    pub fn exhaustive(
        &self,
        g: &FiniteGroup,
        theorem: Theorem,
        caps: Option<Caps>,
    ) -> Result<VerificationReport, VerifyError> {
        let start = Instant::now();
        let ctx = self.ctx(g, theorem);
        match caps {
            None => {
                let limit = self.exhaustive_limit.min(HARD_EXHAUSTIVE_LIMIT);
                if g.order() > limit {
                    return Err(VerifyError::OrderTooLarge {
                        order: g.order(),
                        limit,
                    });
                }
                let part = self.run(|| exhaustive_dp(&ctx));
                Ok(self.report(&ctx, VerifyMode::Exhaustive, part, start))
            }
            Some(caps) => {
                let n = g.order();
                let lo = 1;
                let hi_a = caps.max_a_size.unwrap_or(n).min(n);
                let hi_b = caps.max_b_size.unwrap_or(n).min(n);
                let count = |hi: usize| (lo..=hi).map(|k| binomial(n, k)).fold(0u128, u128::saturating_add);
                let total = count(hi_a).saturating_mul(count(hi_b));
                if total > self.max_pairs {
                    return Err(VerifyError::SearchTooLarge {
                        pairs: total,
                        limit: self.max_pairs,
                    });
                }
                let a_list = subsets_by_size(n, lo, hi_a);
                let b_list = subsets_by_size(n, lo, hi_b);
                let part = self.run(|| capped(&ctx, &a_list, &b_list, &caps));
                Ok(self.report(&ctx, VerifyMode::SizeCapped(caps), part, start))
            }
        }
    }

    /// Checks `plan.count` seeded random pairs.
    pub fn sampled(
        &self,
        g: &FiniteGroup,
        theorem: Theorem,
        plan: &SamplingPlan,
    ) -> Result<VerificationReport, VerifyError> {
        if plan.count == 0 {
            return Err(VerifyError::InvalidPlan("count must be at least 1".into()));
        }
        let n = g.order();
        if let SizeDistribution::Fixed { size_a, size_b } = plan.distribution {
            if size_a > n || size_b > n || size_a == 0 || size_b == 0 {
                return Err(VerifyError::InvalidSizes {
                    size_a,
                    size_b,
                    order: n,
                });
            }
        }
        let start = Instant::now();
        let ctx = self.ctx(g, theorem);
        const CHUNK: u64 = 1024;
        let chunks = plan.count.div_ceil(CHUNK);
        let parts = self.run(|| {
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut part = Partial::default();
                    let mut out = SubsetMask::empty(n);
                    let mut scratch = SubsetMask::empty(n);
                    for i in c * CHUNK..((c + 1) * CHUNK).min(plan.count) {
                        let (a, b) = draw_pair(n, plan, i);
                        let size = product_size(&ctx, &a, &b, &mut out, &mut scratch);
                        part.record(&ctx, || a.clone(), || b.clone(), a.len(), b.len(), size);
                    }
                    part
                })
                .collect::<Vec<_>>()
        });
        let part = Partial::merge(parts, self.max_witnesses);
        Ok(self.report(&ctx, VerifyMode::Sampled(*plan), part, start))
    }

    /// Pairs with `|A| = size_a`, `|B| = size_b` and `|A·B| = min(p(G),
    /// size_a + size_b − 1)`, in enumeration order, at most `limit` of them.
    pub fn extremal(
        &self,
        g: &FiniteGroup,
        size_a: usize,
        size_b: usize,
        limit: Option<usize>,
    ) -> Result<Vec<(SubsetMask, SubsetMask)>, VerifyError> {
        let n = g.order();
        if size_a == 0 || size_b == 0 || size_a > n || size_b > n {
            return Err(VerifyError::InvalidSizes {
                size_a,
                size_b,
                order: n,
            });
        }
        let total = binomial(n, size_a).saturating_mul(binomial(n, size_b));
        if total > self.max_pairs {
            return Err(VerifyError::SearchTooLarge {
                pairs: total,
                limit: self.max_pairs,
            });
        }
        let target = Theorem::CauchyDavenport.bound(minimal_torsion(g), size_a, size_b);
        let a_list = subsets_by_size(n, size_a, size_a);
        let b_list = subsets_by_size(n, size_b, size_b);
        let found = self.run(|| {
            a_list
                .par_iter()
                .map(|a| {
                    let mut out = SubsetMask::empty(n);
                    let mut hits = Vec::new();
                    for b in &b_list {
                        product_into(g, a, b, &mut out);
                        if out.len() as i64 == target {
                            hits.push((a.clone(), b.clone()));
                            if limit.is_some_and(|l| hits.len() >= l) {
                                break;
                            }
                        }
                    }
                    hits
                })
                .collect::<Vec<_>>()
        });
        let mut all: Vec<_> = found.into_iter().flatten().collect();
        if let Some(l) = limit {
            all.truncate(l);
        }
        Ok(all)
    }
}

#[inline]
fn product_size(ctx: &Ctx<'_>, a: &SubsetMask, b: &SubsetMask, out: &mut SubsetMask, scratch: &mut SubsetMask) -> usize {
    match ctx.theorem {
        Theorem::CauchyDavenport => product_into(ctx.group, a, b, out),
        Theorem::ErdosHeilbronn => restricted_product_into(ctx.group, a, b, out, scratch),
    }
    out.len()
}

/// Full enumeration for `n <= 22` using one-word masks.
///
/// For fixed `A`, `A·B = ⋃_{b∈B} A·b`, so with `R[b] = A·b` the products for
/// every `B` follow from `P[B] = P[B \ {min B}] | R[min B]`. In EH mode
/// `R[b] = (A \ {b})·b`.
fn exhaustive_dp(ctx: &Ctx<'_>) -> Partial {
    let g = ctx.group;
    let n = g.order();
    let full: u64 = 1 << n;
    // mask 0 is the empty set, which neither theorem admits
    let first = 1u64;
    let mask = |bits: u64| SubsetMask::from_u64(n, bits);
    const CHUNK: u64 = 64;
    let chunks = (full - first).div_ceil(CHUNK);
    let parts: Vec<Partial> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut part = Partial::default();
            let mut table = vec![0u64; full as usize];
            let mut right = vec![0u64; n];
            let lo = first + c * CHUNK;
            let hi = (lo + CHUNK).min(full);
            for a in lo..hi {
                for (b, r) in right.iter_mut().enumerate() {
                    let mut bits = 0u64;
                    let mut rest = a;
                    if ctx.theorem == Theorem::ErdosHeilbronn {
                        rest &= !(1 << b);
                    }
                    while rest != 0 {
                        let x = rest.trailing_zeros();
                        rest &= rest - 1;
                        bits |= 1 << g.mul(x, b as Elem);
                    }
                    *r = bits;
                }
                let sa = a.count_ones() as usize;
                for b in 1..full {
                    table[b as usize] = table[(b & (b - 1)) as usize] | right[b.trailing_zeros() as usize];
                }
                for b in first..full {
                    let product = table[b as usize].count_ones() as usize;
                    part.record(ctx, || mask(a), || mask(b), sa, b.count_ones() as usize, product);
                }
            }
            part
        })
        .collect();
    Partial::merge(parts, ctx.max_witnesses)
}

fn capped(ctx: &Ctx<'_>, a_list: &[SubsetMask], b_list: &[SubsetMask], caps: &Caps) -> Partial {
    let n = ctx.group.order();
    let parts: Vec<Partial> = a_list
        .par_iter()
        .map(|a| {
            let mut part = Partial::default();
            let mut out = SubsetMask::empty(n);
            let mut scratch = SubsetMask::empty(n);
            let sa = a.len();
            for b in b_list {
                let sb = b.len();
                if !caps.admits(sa, sb) {
                    continue;
                }
                let size = product_size(ctx, a, b, &mut out, &mut scratch);
                part.record(ctx, || a.clone(), || b.clone(), sa, sb, size);
            }
            part
        })
        .collect();
    Partial::merge(parts, ctx.max_witnesses)
}

fn draw_set(n: usize, rng: &mut ChaCha8Rng, size: Option<usize>) -> SubsetMask {
    match size {
        Some(k) => SubsetMask::from_elements(n, index::sample(rng, n, k).into_iter().map(|e| e as Elem)),
        None => {
            let mut words = vec![0u64; words_for(n)];
            loop {
                words.iter_mut().for_each(|w| *w = rng.next_u64());
                let m = SubsetMask::from_words(n, words.clone());
                if !m.is_empty() {
                    return m;
                }
            }
        }
    }
}

/// Pair number `i` of a sampling plan.
pub fn draw_pair(n: usize, plan: &SamplingPlan, i: u64) -> (SubsetMask, SubsetMask) {
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    rng.set_stream(i);
    let (sa, sb) = match plan.distribution {
        SizeDistribution::UniformNonempty => (None, None),
        SizeDistribution::Fixed { size_a, size_b } => (Some(size_a), Some(size_b)),
    };
    let a = draw_set(n, &mut rng, sa);
    let b = draw_set(n, &mut rng, sb);
    (a, b)
}

/// [`Verifier::exhaustive`] with default settings.
pub fn verify_exhaustive(
    g: &FiniteGroup,
    theorem: Theorem,
    caps: Option<Caps>,
) -> Result<VerificationReport, VerifyError> {
    Verifier::default().exhaustive(g, theorem, caps)
}

/// [`Verifier::sampled`] with default settings.
pub fn verify_sampled(g: &FiniteGroup, theorem: Theorem, plan: &SamplingPlan) -> Result<VerificationReport, VerifyError> {
    Verifier::default().sampled(g, theorem, plan)
}

/// [`Verifier::extremal`] with default settings.
pub fn find_extremal(
    g: &FiniteGroup,
    size_a: usize,
    size_b: usize,
    limit: Option<usize>,
) -> Result<Vec<(SubsetMask, SubsetMask)>, VerifyError> {
    Verifier::default().extremal(g, size_a, size_b, limit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(27, 3), 2925);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn subsets_are_sorted_and_complete() {
        let subs = subsets_by_size(5, 1, 5);
        assert_eq!(subs.len(), 31);
        let values: Vec<u64> = subs.iter().map(|m| m.as_u64().unwrap()).collect();
        assert_eq!(values, (1..32).collect::<Vec<_>>());
        assert_eq!(subsets_by_size(6, 0, 0).len(), 1);
        assert_eq!(subsets_by_size(27, 3, 3).len(), 2925);
    }

    #[test]
    fn z5_exhaustive_count() {
        let g = FiniteGroup::cyclic(5).unwrap();
        let r = verify_exhaustive(&g, Theorem::CauchyDavenport, None).unwrap();
        assert_eq!(r.pairs_checked, 961);
        assert!(r.holds());
    }

    #[test]
    fn z3_eh_nonempty_pairs() {
        let g = FiniteGroup::cyclic(3).unwrap();
        let r = verify_exhaustive(&g, Theorem::ErdosHeilbronn, None).unwrap();
        assert_eq!(r.pairs_checked, 49);
        assert!(r.holds());
    }

    #[test]
    fn too_large_without_caps() {
        let g = FiniteGroup::cyclic(13).unwrap();
        assert_eq!(
            verify_exhaustive(&g, Theorem::CauchyDavenport, None).unwrap_err(),
            VerifyError::OrderTooLarge { order: 13, limit: 11 }
        );
    }

    #[test]
    fn capped_matches_exhaustive_when_caps_cover_everything() {
        let g = FiniteGroup::dihedral(3).unwrap();
        let full = verify_exhaustive(&g, Theorem::CauchyDavenport, None).unwrap();
        let capped = verify_exhaustive(&g, Theorem::CauchyDavenport, Some(Caps::default())).unwrap();
        assert_eq!(full.pairs_checked, capped.pairs_checked);
        assert_eq!(full.extremal_count, capped.extremal_count);
        assert_eq!(full.extremal_witnesses, capped.extremal_witnesses);
    }

    #[test]
    fn sum_cap_filters_pairs() {
        let g = FiniteGroup::cyclic(7).unwrap();
        let caps = Caps {
            max_a_size: Some(2),
            max_b_size: Some(2),
            sum_cap: Some(3),
        };
        let r = verify_exhaustive(&g, Theorem::CauchyDavenport, Some(caps)).unwrap();
        // (1,1), (1,2), (2,1)
        assert_eq!(r.pairs_checked, 7 * 7 + 2 * 7 * 21);
    }

    #[test]
    fn sampled_is_worker_independent() {
        let g = FiniteGroup::frobenius(7, 3, 2).unwrap();
        let plan = SamplingPlan::uniform(9, 5000);
        let one = Verifier::with_workers(Some(1)).sampled(&g, Theorem::CauchyDavenport, &plan).unwrap();
        let four = Verifier::with_workers(Some(4)).sampled(&g, Theorem::CauchyDavenport, &plan).unwrap();
        assert_eq!(one, VerificationReport { wall_time: one.wall_time, ..four });
    }

    #[test]
    fn sampled_rejects_bad_plans() {
        let g = FiniteGroup::cyclic(5).unwrap();
        assert!(verify_sampled(&g, Theorem::CauchyDavenport, &SamplingPlan::uniform(1, 0)).is_err());
        let plan = SamplingPlan {
            seed: 1,
            count: 3,
            distribution: SizeDistribution::Fixed { size_a: 6, size_b: 1 },
        };
        assert!(verify_sampled(&g, Theorem::CauchyDavenport, &plan).is_err());
    }

    #[test]
    fn singleton_pair_on_trivial_group() {
        let g = FiniteGroup::cyclic(1).unwrap();
        let plan = SamplingPlan {
            seed: 0,
            count: 1,
            distribution: SizeDistribution::Fixed { size_a: 1, size_b: 1 },
        };
        let r = verify_sampled(&g, Theorem::CauchyDavenport, &plan).unwrap();
        assert_eq!(r.pairs_checked, 1);
        assert!(r.holds());
    }

    #[test]
    fn extremal_singletons() {
        let g = FiniteGroup::cyclic(5).unwrap();
        assert_eq!(find_extremal(&g, 1, 1, None).unwrap().len(), 25);
        assert_eq!(find_extremal(&g, 1, 1, Some(3)).unwrap().len(), 3);
    }
}
