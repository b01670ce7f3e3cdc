//! Finite groups as dense Cayley tables over element indices `0..n`.
//!
//! Every canonical constructor places the identity at index 0. Higher modules
//! only ever speak element indices, so subsets are plain bit masks.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::GroupError;
use crate::mask::{words_for, SubsetMask};
use crate::Elem;

/// Largest group order for which a table is stored.
pub const MAX_ORDER: usize = 4096;

/// Default order cap for the brute-force associativity check.
pub const DEFAULT_ASSOCIATIVITY_CAP: usize = 512;

/// Groups up to this order get byte-indexed left-translation tables.
const TRANSLATION_TABLE_MAX_ORDER: usize = 128;

/// Group specs used throughout the test suites: the trivial group, small
/// cyclic groups, small nonabelian 2-groups and dihedral groups, and odd-order
/// nonabelian groups.
pub const CORPUS: &[&str] = &[
    "cyclic:1",
    "cyclic:2",
    "cyclic:3",
    "cyclic:5",
    "cyclic:7",
    "cyclic:9",
    "cyclic:11",
    "cyclic:25",
    "quaternion",
    "dihedral:3",
    "dihedral:5",
    "heisenberg:3",
    "frobenius:7:3:2",
    "frobenius:13:3:3",
    "product:cyclic:3,cyclic:3",
    "product:cyclic:3,cyclic:9",
    "product:quaternion,cyclic:3",
];

/// Description of a group to build, parsed from the `kind:params` DSL.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(usize),
    DirectProduct(Vec<GroupSpec>),
    Quaternion,
    Dihedral(usize),
    Heisenberg(usize),
    /// `Z/p ⋊ Z/q` with `y` acting on `x` by multiplication with `k`.
    Frobenius { p: usize, q: usize, k: usize },
    Table(PathBuf),
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn pow_mod(base: usize, mut exp: usize, m: usize) -> usize {
    let mut result = 1 % m;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    result
}

impl GroupSpec {
    fn invalid(&self, reason: impl Into<String>) -> GroupError {
        GroupError::InvalidSpec {
            spec: self.to_string(),
            reason: reason.into(),
        }
    }

    /// Checks parameter constraints without building anything.
    pub fn check(&self) -> Result<(), GroupError> {
        match self {
            GroupSpec::Cyclic(n) if *n == 0 => Err(self.invalid("cyclic order must be >= 1")),
            GroupSpec::Dihedral(n) if *n == 0 => Err(self.invalid("dihedral n must be >= 1")),
            GroupSpec::Heisenberg(p) if !is_prime(*p) || *p == 2 => {
                Err(self.invalid("heisenberg needs an odd prime"))
            }
            GroupSpec::Frobenius { p, q, k } => {
                if !is_prime(*p) || !is_prime(*q) {
                    return Err(self.invalid("p and q must be prime"));
                }
                if q >= p {
                    return Err(self.invalid("need q < p"));
                }
                if pow_mod(*k, *q, *p) != 1 {
                    return Err(self.invalid(format!("{k}^{q} is not 1 mod {p}")));
                }
                if k % p == 1 {
                    return Err(self.invalid(format!("{k} is 1 mod {p}; the action is trivial")));
                }
                Ok(())
            }
            GroupSpec::DirectProduct(children) => {
                if children.len() < 2 {
                    return Err(self.invalid("a direct product needs at least two factors"));
                }
                children.iter().try_for_each(GroupSpec::check)
            }
            _ => Ok(()),
        }
    }

    /// Order of the group this spec describes, when known without I/O.
    pub fn order(&self) -> Option<usize> {
        Some(match self {
            GroupSpec::Cyclic(n) => *n,
            GroupSpec::Quaternion => 8,
            GroupSpec::Dihedral(n) => 2 * n,
            GroupSpec::Heisenberg(p) => p.checked_mul(*p)?.checked_mul(*p)?,
            GroupSpec::Frobenius { p, q, .. } => p.checked_mul(*q)?,
            GroupSpec::DirectProduct(children) => children
                .iter()
                .try_fold(1usize, |acc, c| acc.checked_mul(c.order()?))?,
            GroupSpec::Table(_) => return None,
        })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "cyclic:{n}"),
            GroupSpec::Quaternion => write!(f, "quaternion"),
            GroupSpec::Dihedral(n) => write!(f, "dihedral:{n}"),
            GroupSpec::Heisenberg(p) => write!(f, "heisenberg:{p}"),
            GroupSpec::Frobenius { p, q, k } => write!(f, "frobenius:{p}:{q}:{k}"),
            GroupSpec::Table(path) => write!(f, "table:{}", path.display()),
            GroupSpec::DirectProduct(children) => {
                write!(f, "product:")?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, GroupError> {
        let s = s.trim();
        let invalid = |reason: &str| GroupError::InvalidSpec {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k, Some(r)),
            None => (s, None),
        };
        if kind == "table" {
            let path = rest.filter(|r| !r.is_empty()).ok_or_else(|| invalid("missing path"))?;
            return Ok(GroupSpec::Table(PathBuf::from(path)));
        }
        if kind == "product" {
            let rest = rest.ok_or_else(|| invalid("missing factors"))?;
            let children = rest
                .split(',')
                .map(|c| {
                    let child: GroupSpec = c.parse()?;
                    if matches!(child, GroupSpec::DirectProduct(_)) {
                        return Err(invalid("nested products are not supported in the DSL"));
                    }
                    Ok(child)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let spec = GroupSpec::DirectProduct(children);
            spec.check()?;
            return Ok(spec);
        }
        let params: Vec<usize> = match rest {
            None => Vec::new(),
            Some(r) => r
                .split(':')
                .map(|p| p.trim().parse::<usize>().map_err(|_| invalid("parameters must be non-negative integers")))
                .collect::<Result<_, _>>()?,
        };
        let spec = match (kind, params.as_slice()) {
            ("cyclic", [n]) => GroupSpec::Cyclic(*n),
            ("quaternion", []) => GroupSpec::Quaternion,
            ("dihedral", [n]) => GroupSpec::Dihedral(*n),
            ("heisenberg", [p]) => GroupSpec::Heisenberg(*p),
            ("frobenius", [p, q, k]) => GroupSpec::Frobenius { p: *p, q: *q, k: *k },
            ("cyclic" | "dihedral" | "heisenberg" | "frobenius" | "quaternion", _) => {
                return Err(invalid("wrong number of parameters"))
            }
            _ => return Err(invalid("unknown group kind")),
        };
        spec.check()?;
        Ok(spec)
    }
}

/// A group axiom that a candidate Cayley table fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum AxiomViolation {
    /// `op(a, b)` is not an element index.
    EntryOutOfRange { a: Elem, b: Elem, value: Elem },
    RowNotPermutation { row: Elem },
    ColumnNotPermutation { column: Elem },
    /// No element `e` with `op(e, a) = op(a, e) = a` for all `a`.
    IdentityLaw,
    /// The designated identity fails `op(e, a) = op(a, e) = a` at `a`.
    IdentityLawAt { identity: Elem, a: Elem },
    InverseLaw { a: Elem },
    NotAssociative { a: Elem, b: Elem, c: Elem },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::EntryOutOfRange { a, b, value } => {
                write!(f, "op({a}, {b}) = {value} is out of range")
            }
            AxiomViolation::RowNotPermutation { row } => {
                write!(f, "Latin square: row {row} is not a permutation")
            }
            AxiomViolation::ColumnNotPermutation { column } => {
                write!(f, "Latin square: column {column} is not a permutation")
            }
            AxiomViolation::IdentityLaw => write!(f, "identity law: no two-sided identity"),
            AxiomViolation::IdentityLawAt { identity, a } => {
                write!(f, "identity law: {identity} does not fix {a}")
            }
            AxiomViolation::InverseLaw { a } => write!(f, "inverse law: {a} has no inverse"),
            AxiomViolation::NotAssociative { a, b, c } => {
                write!(f, "associativity fails at ({a}, {b}, {c})")
            }
        }
    }
}

/// Outcome of checking a candidate table against the group axioms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub order: usize,
    pub violations: Vec<AxiomViolation>,
    /// False when the order exceeded the associativity cap and the O(n³)
    /// check was skipped.
    pub associativity_checked: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a raw row-major table (`op[a * n + b]`) against the group axioms.
///
/// Latin-square violations are listed per row and column; associativity
/// stops at the first failing triple in lexicographic order.
pub fn validate_table(order: usize, op: &[Elem], associativity_cap: usize) -> ValidationReport {
    let n = order;
    let mut violations = Vec::new();
    let mut report = |v| violations.push(v);

    if op.len() != n * n {
        // Treat a short table as an out-of-range entry at the first missing cell.
        let idx = op.len().min(n * n);
        let (a, b) = (idx.checked_div(n).unwrap_or(0), idx.checked_rem(n).unwrap_or(0));
        report(AxiomViolation::EntryOutOfRange {
            a: a as Elem,
            b: b as Elem,
            value: Elem::MAX,
        });
        return ValidationReport {
            order,
            violations,
            associativity_checked: false,
        };
    }

    let mut in_range = true;
    for (idx, &v) in op.iter().enumerate() {
        if v as usize >= n {
            in_range = false;
            report(AxiomViolation::EntryOutOfRange {
                a: (idx / n) as Elem,
                b: (idx % n) as Elem,
                value: v,
            });
        }
    }
    if !in_range {
        return ValidationReport {
            order,
            violations,
            associativity_checked: false,
        };
    }

    let mut seen = vec![false; n];
    for a in 0..n {
        seen.iter_mut().for_each(|s| *s = false);
        for b in 0..n {
            seen[op[a * n + b] as usize] = true;
        }
        if seen.iter().any(|s| !s) {
            report(AxiomViolation::RowNotPermutation { row: a as Elem });
        }
    }
    for b in 0..n {
        seen.iter_mut().for_each(|s| *s = false);
        for a in 0..n {
            seen[op[a * n + b] as usize] = true;
        }
        if seen.iter().any(|s| !s) {
            report(AxiomViolation::ColumnNotPermutation { column: b as Elem });
        }
    }

    let identity = find_identity(n, op);
    match identity {
        None => report(AxiomViolation::IdentityLaw),
        Some(e) => {
            for a in 0..n {
                if !(0..n).any(|b| op[a * n + b] as usize == e && op[b * n + a] as usize == e) {
                    report(AxiomViolation::InverseLaw { a: a as Elem });
                }
            }
        }
    }

    let associativity_checked = n <= associativity_cap;
    if associativity_checked {
        if let Some((a, b, c)) = first_non_associative(n, op) {
            report(AxiomViolation::NotAssociative { a, b, c });
        }
    }
    ValidationReport {
        order,
        violations,
        associativity_checked,
    }
}

fn find_identity(n: usize, op: &[Elem]) -> Option<usize> {
    (0..n).find(|&e| (0..n).all(|a| op[e * n + a] as usize == a && op[a * n + e] as usize == a))
}

fn first_non_associative(n: usize, op: &[Elem]) -> Option<(Elem, Elem, Elem)> {
    for a in 0..n {
        for b in 0..n {
            let ab = op[a * n + b] as usize;
            for c in 0..n {
                let bc = op[b * n + c] as usize;
                if op[ab * n + c] != op[a * n + bc] {
                    return Some((a as Elem, b as Elem, c as Elem));
                }
            }
        }
    }
    None
}

/// Byte-chunked left-translation tables: for each `x`, chunk `c` and byte
/// value `v`, the mask `x · {8c + i : bit i of v}`.
pub(crate) struct Translations {
    chunks: usize,
    words: usize,
    table: Vec<u64>,
}

impl Translations {
    fn build(g: &FiniteGroup) -> Self {
        let n = g.order;
        let chunks = n.div_ceil(8);
        let words = words_for(n);
        let mut table = vec![0u64; n * chunks * 256 * words];
        for x in 0..n {
            for c in 0..chunks {
                let base = (x * chunks + c) * 256;
                for v in 1usize..256 {
                    let low = v.trailing_zeros() as usize;
                    let elem = c * 8 + low;
                    let prev = v & (v - 1);
                    let (dst, src) = ((base + v) * words, (base + prev) * words);
                    for w in 0..words {
                        table[dst + w] = table[src + w];
                    }
                    if elem < n {
                        let y = g.op[x * n + elem] as usize;
                        table[dst + y / 64] |= 1 << (y % 64);
                    }
                }
            }
        }
        Translations {
            chunks,
            words,
            table,
        }
    }

    /// ORs `x · b` into `out`.
    #[inline]
    pub(crate) fn left_translate_into(&self, x: usize, b: &[u64], out: &mut [u64]) {
        for c in 0..self.chunks {
            let byte = (b[c / 8] >> ((c % 8) * 8)) as usize & 0xff;
            if byte != 0 {
                let start = ((x * self.chunks + c) * 256 + byte) * self.words;
                for (o, t) in out.iter_mut().zip(&self.table[start..start + self.words]) {
                    *o |= t;
                }
            }
        }
    }
}

/// A validated finite group on element indices `0..order`.
pub struct FiniteGroup {
    order: usize,
    op: Vec<Elem>,
    identity: Elem,
    inv: Vec<Elem>,
    label: String,
    translations: OnceLock<Option<Translations>>,
}

impl Clone for FiniteGroup {
    fn clone(&self) -> Self {
        FiniteGroup {
            order: self.order,
            op: self.op.clone(),
            identity: self.identity,
            inv: self.inv.clone(),
            label: self.label.clone(),
            translations: OnceLock::new(),
        }
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && self.identity == other.identity
            && self.op == other.op
            && self.inv == other.inv
            && self.label == other.label
    }
}

impl Eq for FiniteGroup {}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("label", &self.label)
            .field("order", &self.order)
            .field("identity", &self.identity)
            .finish_non_exhaustive()
    }
}

impl FiniteGroup {
    /// Builds a group from a row-major table, rejecting anything that is not
    /// a group. The identity is found, not assumed.
    pub fn from_table(order: usize, op: Vec<Elem>, label: impl Into<String>) -> Result<Self, GroupError> {
        Self::from_table_with_cap(order, op, label, DEFAULT_ASSOCIATIVITY_CAP)
    }

    pub fn from_table_with_cap(
        order: usize,
        op: Vec<Elem>,
        label: impl Into<String>,
        associativity_cap: usize,
    ) -> Result<Self, GroupError> {
        if order == 0 {
            return Err(GroupError::NotAGroup(AxiomViolation::IdentityLaw));
        }
        if order > MAX_ORDER {
            return Err(GroupError::OrderTooLarge {
                order,
                cap: MAX_ORDER,
            });
        }
        let report = validate_table(order, &op, associativity_cap);
        if let Some(v) = report.violations.into_iter().next() {
            return Err(GroupError::NotAGroup(v));
        }
        let identity = find_identity(order, &op).expect("validated table has an identity");
        Ok(Self::from_trusted(order, op, identity as Elem, label.into()))
    }

    /// Assumes `op` is a group table with the given identity.
    pub(crate) fn from_trusted(order: usize, op: Vec<Elem>, identity: Elem, label: String) -> Self {
        let mut inv = vec![0; order];
        for a in 0..order {
            let row = &op[a * order..(a + 1) * order];
            inv[a] = row
                .iter()
                .position(|&v| v == identity)
                .expect("every element of a group has an inverse") as Elem;
        }
        FiniteGroup {
            order,
            op,
            identity,
            inv,
            label,
            translations: OnceLock::new(),
        }
    }

    fn from_fn(order: usize, label: String, mul: impl Fn(usize, usize) -> usize) -> Result<Self, GroupError> {
        if order > MAX_ORDER {
            return Err(GroupError::OrderTooLarge {
                order,
                cap: MAX_ORDER,
            });
        }
        let mut op = Vec::with_capacity(order * order);
        for a in 0..order {
            for b in 0..order {
                op.push(mul(a, b) as Elem);
            }
        }
        Ok(Self::from_trusted(order, op, 0, label))
    }

    pub fn cyclic(n: usize) -> Result<Self, GroupError> {
        GroupSpec::Cyclic(n).check()?;
        Self::from_fn(n, format!("cyclic:{n}"), |a, b| (a + b) % n)
    }

    /// Quaternion group with elements ordered `1, −1, i, −i, j, −j, k, −k`.
    pub fn quaternion() -> Self {
        // unit products: (sign flip, unit) for units 1, i, j, k
        const UNIT: [[(bool, usize); 4]; 4] = [
            [(false, 0), (false, 1), (false, 2), (false, 3)],
            [(false, 1), (true, 0), (false, 3), (true, 2)],
            [(false, 2), (true, 3), (true, 0), (false, 1)],
            [(false, 3), (false, 2), (true, 1), (true, 0)],
        ];
        Self::from_fn(8, "quaternion".into(), |a, b| {
            let (ua, sa) = (a / 2, a % 2 == 1);
            let (ub, sb) = (b / 2, b % 2 == 1);
            let (flip, u) = UNIT[ua][ub];
            2 * u + usize::from(sa ^ sb ^ flip)
        })
        .expect("order 8 is below the cap")
    }

    /// Dihedral group of order `2n`; index `b·n + a` encodes `r^a s^b`.
    pub fn dihedral(n: usize) -> Result<Self, GroupError> {
        GroupSpec::Dihedral(n).check()?;
        Self::from_fn(2 * n, format!("dihedral:{n}"), |x, y| {
            let (a, b) = (x % n, x / n);
            let (c, d) = (y % n, y / n);
            let rot = if b == 0 { a + c } else { a + n - c };
            ((b + d) % 2) * n + rot % n
        })
    }

    /// Upper unitriangular 3×3 matrices over `Z/p`, indexed lexicographically
    /// by `(a, b, c)` for `[[1, a, c], [0, 1, b], [0, 0, 1]]`.
    pub fn heisenberg(p: usize) -> Result<Self, GroupError> {
        GroupSpec::Heisenberg(p).check()?;
        let n = p * p * p;
        Self::from_fn(n, format!("heisenberg:{p}"), |x, y| {
            let (a, b, c) = (x / (p * p), x / p % p, x % p);
            let (a2, b2, c2) = (y / (p * p), y / p % p, y % p);
            let a3 = (a + a2) % p;
            let b3 = (b + b2) % p;
            let c3 = (c + c2 + a * b2) % p;
            a3 * p * p + b3 * p + c3
        })
    }

    /// `Z/p ⋊ Z/q` on pairs `(x, y)` indexed `x·q + y`, with
    /// `(x₁, y₁)(x₂, y₂) = (x₁ + k^{y₁} x₂, y₁ + y₂)`.
    pub fn frobenius(p: usize, q: usize, k: usize) -> Result<Self, GroupError> {
        GroupSpec::Frobenius { p, q, k }.check()?;
        let powers: Vec<usize> = (0..q).map(|y| pow_mod(k, y, p)).collect();
        Self::from_fn(p * q, format!("frobenius:{p}:{q}:{k}"), |s, t| {
            let (x1, y1) = (s / q, s % q);
            let (x2, y2) = (t / q, t % q);
            ((x1 + powers[y1] * x2) % p) * q + (y1 + y2) % q
        })
    }

    /// `G × H` with `(g, h)` at index `g·|H| + h`.
    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Result<Self, GroupError> {
        let m = h.order;
        let label = format!("{}×{}", g.label, h.label);
        let order = g.order.saturating_mul(m);
        let mut out = Self::from_fn(order, label, |x, y| {
            g.mul((x / m) as Elem, (y / m) as Elem) as usize * m + h.mul((x % m) as Elem, (y % m) as Elem) as usize
        })?;
        // from_fn assumes identity 0; products of identity-0 groups keep it there.
        let e = g.identity as usize * m + h.identity as usize;
        if e != 0 {
            out = Self::from_trusted(out.order, out.op, e as Elem, out.label);
        }
        Ok(out)
    }

    /// Reads the Cayley-table file format and relabels so the identity is 0.
    pub fn load_table(path: &Path) -> Result<Self, GroupError> {
        let text = fs::read_to_string(path).map_err(|source| GroupError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_table(&text, path)
    }

    pub fn parse_table(text: &str, path: &Path) -> Result<Self, GroupError> {
        let (n, op) = parse_table_text(text, path)?;
        if n > MAX_ORDER {
            return Err(GroupError::OrderTooLarge { order: n, cap: MAX_ORDER });
        }
        let report = validate_table(n, &op, DEFAULT_ASSOCIATIVITY_CAP);
        if let Some(v) = report.violations.into_iter().next() {
            return Err(GroupError::NotAGroup(v));
        }
        let e = find_identity(n, &op).expect("validated table has an identity");
        let mut label = format!("table:{}", path.display());
        let op = if e == 0 {
            op
        } else {
            label.push_str(&format!(" [relabeled 0<->{e}]"));
            let swap = |x: usize| {
                if x == 0 {
                    e
                } else if x == e {
                    0
                } else {
                    x
                }
            };
            let mut out = vec![0; n * n];
            for a in 0..n {
                for b in 0..n {
                    out[a * n + b] = swap(op[swap(a) * n + swap(b)] as usize) as Elem;
                }
            }
            out
        };
        Ok(Self::from_trusted(n, op, 0, label))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Elem {
        self.identity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.op[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inv[a as usize]
    }

    /// `a b a⁻¹ b⁻¹`
    pub fn commutator(&self, a: Elem, b: Elem) -> Elem {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    /// `x a x⁻¹`
    pub fn conjugate(&self, a: Elem, by: Elem) -> Elem {
        self.mul(self.mul(by, a), self.inv(by))
    }

    pub fn row(&self, a: Elem) -> &[Elem] {
        let a = a as usize;
        &self.op[a * self.order..(a + 1) * self.order]
    }

    /// Row-major multiplication table.
    pub fn table(&self) -> &[Elem] {
        &self.op
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.order as Elem
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order;
        (0..n).all(|a| (a + 1..n).all(|b| self.op[a * n + b] == self.op[b * n + a]))
    }

    pub fn pow(&self, x: Elem, mut exp: u64) -> Elem {
        let mut result = self.identity;
        let mut base = x;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        result
    }

    /// Smallest `m >= 1` with `x^m` equal to the identity.
    pub fn element_order(&self, x: Elem) -> usize {
        let mut m = 1;
        let mut y = x;
        while y != self.identity {
            y = self.mul(y, x);
            m += 1;
        }
        m
    }

    pub fn validate(&self) -> ValidationReport {
        self.validate_with_cap(DEFAULT_ASSOCIATIVITY_CAP)
    }

    pub fn validate_with_cap(&self, associativity_cap: usize) -> ValidationReport {
        let mut report = validate_table(self.order, &self.op, associativity_cap);
        if report.violations.is_empty() {
            let e = self.identity;
            if let Some(a) = self.elements().find(|&a| self.mul(e, a) != a || self.mul(a, e) != a) {
                report.violations.push(AxiomViolation::IdentityLawAt { identity: e, a });
            }
            if let Some(a) = self.elements().find(|&a| self.mul(a, self.inv(a)) != e) {
                report.violations.push(AxiomViolation::InverseLaw { a });
            }
        }
        report
    }

    pub(crate) fn translations(&self) -> Option<&Translations> {
        self.translations
            .get_or_init(|| (self.order <= TRANSLATION_TABLE_MAX_ORDER).then(|| Translations::build(self)))
            .as_ref()
    }

    /// `x · B` as a new mask.
    pub fn left_translate(&self, x: Elem, b: &SubsetMask) -> SubsetMask {
        let mut out = SubsetMask::empty(self.order);
        self.left_translate_into(x, b, out.words_mut());
        out
    }

    #[inline]
    pub(crate) fn left_translate_into(&self, x: Elem, b: &SubsetMask, out: &mut [u64]) {
        match self.translations() {
            Some(t) => t.left_translate_into(x as usize, b.words(), out),
            None => {
                let row = self.row(x);
                for y in b {
                    let z = row[y as usize] as usize;
                    out[z / 64] |= 1 << (z % 64);
                }
            }
        }
    }
}

/// Reads a table file without checking the group axioms, for
/// [`validate_table`]. Returns the order and the row-major entries.
pub fn read_raw_table(path: &Path) -> Result<(usize, Vec<Elem>), GroupError> {
    let text = fs::read_to_string(path).map_err(|source| GroupError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_table_text(&text, path)
}

fn parse_table_text(text: &str, path: &Path) -> Result<(usize, Vec<Elem>), GroupError> {
    let err = |reason: String| GroupError::Parse {
        path: path.to_path_buf(),
        reason,
    };
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let first = lines.next().ok_or_else(|| err("empty file".into()))?;
    let n: usize = first
        .trim()
        .parse()
        .map_err(|_| err(format!("first line `{}` is not an order", first.trim())))?;
    if n == 0 {
        return Err(err("order must be positive".into()));
    }
    if n > MAX_ORDER {
        return Err(GroupError::OrderTooLarge { order: n, cap: MAX_ORDER });
    }
    let mut op = Vec::with_capacity(n * n);
    for row in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| err(format!("expected {n} rows, found {row}")))?;
        let before = op.len();
        for tok in line.split_whitespace() {
            let v: Elem = tok
                .parse()
                .map_err(|_| err(format!("row {row}: `{tok}` is not an element index")))?;
            op.push(v);
        }
        if op.len() - before != n {
            return Err(err(format!("row {row} has {} entries, expected {n}", op.len() - before)));
        }
    }
    if lines.next().is_some() {
        return Err(err(format!("more than {n} rows")));
    }
    Ok((n, op))
}

/// Builds the group a spec describes.
pub fn build_group(spec: &GroupSpec) -> Result<FiniteGroup, GroupError> {
    spec.check()?;
    if let Some(order) = spec.order() {
        if order > MAX_ORDER {
            return Err(GroupError::OrderTooLarge { order, cap: MAX_ORDER });
        }
    }
    let g = match spec {
        GroupSpec::Cyclic(n) => FiniteGroup::cyclic(*n)?,
        GroupSpec::Quaternion => FiniteGroup::quaternion(),
        GroupSpec::Dihedral(n) => FiniteGroup::dihedral(*n)?,
        GroupSpec::Heisenberg(p) => FiniteGroup::heisenberg(*p)?,
        GroupSpec::Frobenius { p, q, k } => FiniteGroup::frobenius(*p, *q, *k)?,
        GroupSpec::Table(path) => FiniteGroup::load_table(path)?,
        GroupSpec::DirectProduct(children) => {
            let mut iter = children.iter();
            let first = build_group(iter.next().expect("checked: at least two factors"))?;
            let mut acc = first;
            for child in iter {
                acc = FiniteGroup::direct_product(&acc, &build_group(child)?)?;
            }
            acc.with_label(spec.to_string())
        }
    };
    Ok(g)
}
