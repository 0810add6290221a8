//! Finite group representation: abelian groups as sorted prime-power tuples
//! with mixed-radix element encoding, arbitrary groups as validated Cayley
//! tables. Also subsets, centers, normality, and abelian automorphism
//! enumeration.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Exhaustive associativity checking is done up to this order; beyond it a
/// fixed number of sampled triples is tested instead.
pub const ASSOC_EXHAUSTIVE_MAX: usize = 512;
const ASSOC_SAMPLES: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("element index {index} out of range for group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("table is not a Latin square: value {value} repeats in {axis} {line}")]
    NotLatinSquare { axis: &'static str, line: usize, value: usize },
    #[error("table entry {value} at ({row},{col}) is not a valid element index")]
    EntryOutOfRange { row: usize, col: usize, value: usize },
    #[error("table has no two-sided identity")]
    NoIdentity,
    #[error("element {element} has no inverse")]
    NoInverse { element: usize },
    #[error("associativity fails on triple ({a},{b},{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("operation requires an abelian group")]
    NotAbelian,
    #[error("table must be square, got {rows} rows of length {first_len}")]
    NotSquare { rows: usize, first_len: usize },
    #[error("cannot parse group description: {0}")]
    Parse(String),
}

/// One `Z_{p^a}` factor of an abelian group.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct PrimePower {
    pub prime: u64,
    pub exponent: u32,
}

impl PrimePower {
    pub fn value(&self) -> u64 {
        self.prime.pow(self.exponent)
    }
}

/// How the associativity of a loaded Cayley table was verified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssocCheck {
    Exhaustive,
    Sampled { triples: usize },
}

/// Validation summary produced when loading a Cayley table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LoadReport {
    pub order: usize,
    pub identity: usize,
    pub assoc_check: AssocCheck,
}

#[derive(Clone, Debug)]
enum GroupInner {
    Abelian {
        factors: Vec<PrimePower>,
        /// coords[i] = mixed-radix digits of element i, factor order as in `factors`
        coords: Vec<Vec<u16>>,
    },
    Cayley {
        table: Vec<u32>, // row-major n×n
        inv: Vec<u32>,
        identity: u32,
        report: LoadReport,
    },
}

/// A finite group with elements densely indexed `0..n`.
///
/// Immutable after construction; cheap to clone and safe to share across
/// worker threads.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    order: usize,
    inner: Arc<GroupInner>,
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        match (&*self.inner, &*other.inner) {
            (
                GroupInner::Abelian { factors: f1, .. },
                GroupInner::Abelian { factors: f2, .. },
            ) => f1 == f2,
            (GroupInner::Cayley { table: t1, .. }, GroupInner::Cayley { table: t2, .. }) => {
                t1 == t2
            }
            _ => false,
        }
    }
}

impl Eq for GroupSpec {}

/// An element index into a [`GroupSpec`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub u32);

impl GroupElement {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Conversion between the coordinates of a user-supplied cyclic factor list
/// (e.g. `Z6×Z6`) and the normalized sorted prime-power encoding.
#[derive(Clone, Debug)]
pub struct AbelianView {
    user_factors: Vec<u64>,
    /// per user factor: the (sorted position, modulus) of each CRT piece
    placement: Vec<Vec<(usize, u64)>>,
}

impl AbelianView {
    pub fn user_factors(&self) -> &[u64] {
        &self.user_factors
    }

    /// Element for a tuple in user coordinates.
    pub fn element(&self, group: &GroupSpec, user: &[u64]) -> Result<GroupElement, GroupError> {
        if user.len() != self.user_factors.len() {
            return Err(GroupError::Parse(format!(
                "expected {} coordinates, got {}",
                self.user_factors.len(),
                user.len()
            )));
        }
        let m = group.factors()?.len();
        let mut coords = vec![0u16; m];
        for (i, &v) in user.iter().enumerate() {
            if v >= self.user_factors[i] {
                return Err(GroupError::Parse(format!(
                    "coordinate {} out of range for Z_{}",
                    v, self.user_factors[i]
                )));
            }
            for &(pos, q) in &self.placement[i] {
                coords[pos] = (v % q) as u16;
            }
        }
        group.element_from_coords(&coords)
    }

    /// User-coordinate tuple of an element (CRT reconstruction per factor).
    pub fn user_coords(&self, group: &GroupSpec, e: GroupElement) -> Result<Vec<u64>, GroupError> {
        let coords = group.coords(e)?;
        let mut out = Vec::with_capacity(self.user_factors.len());
        for (i, &q_user) in self.user_factors.iter().enumerate() {
            // v ≡ coords[pos] (mod q) for each CRT piece; moduli are coprime
            let mut v = 0u64;
            let mut modulus = 1u64;
            for &(pos, q) in &self.placement[i] {
                let r = coords[pos] as u64;
                // lift v to satisfy the new congruence
                while v % q != r {
                    v += modulus;
                }
                modulus *= q;
            }
            debug_assert!(v < q_user.max(1));
            out.push(v);
        }
        Ok(out)
    }
}

impl GroupSpec {
    /// Abelian group from (not necessarily prime-power) cyclic factors.
    /// Composite factors are split by CRT and the resulting prime powers are
    /// sorted lexicographically by `(prime, exponent)`.
    pub fn abelian(cyclic_factors: &[u64]) -> Result<GroupSpec, GroupError> {
        Ok(GroupSpec::abelian_with_view(cyclic_factors)?.0)
    }

    /// Like [`GroupSpec::abelian`], also returning the coordinate view for
    /// the original factor list.
    pub fn abelian_with_view(
        cyclic_factors: &[u64],
    ) -> Result<(GroupSpec, AbelianView), GroupError> {
        if cyclic_factors.is_empty() || cyclic_factors.iter().any(|&q| q == 0) {
            return Err(GroupError::Parse("factors must be positive".into()));
        }
        // tag each prime power with its source factor, stable-sort, remember
        // where each piece landed
        let mut tagged: Vec<(PrimePower, usize)> = Vec::new();
        for (i, &q) in cyclic_factors.iter().enumerate() {
            for pp in factorize(q) {
                tagged.push((pp, i));
            }
        }
        tagged.sort_by_key(|(pp, _)| *pp);
        let factors: Vec<PrimePower> = tagged.iter().map(|(pp, _)| *pp).collect();
        let mut placement: Vec<Vec<(usize, u64)>> = vec![Vec::new(); cyclic_factors.len()];
        for (pos, (pp, src)) in tagged.iter().enumerate() {
            placement[*src].push((pos, pp.value()));
        }
        let view = AbelianView {
            user_factors: cyclic_factors.to_vec(),
            placement,
        };
        let order: usize = factors.iter().map(|f| f.value() as usize).product();
        let m = factors.len();
        let radices: Vec<u64> = factors.iter().map(|f| f.value()).collect();
        let mut coords = Vec::with_capacity(order);
        for idx in 0..order {
            let mut rem = idx as u64;
            let mut c = vec![0u16; m];
            for j in (0..m).rev() {
                c[j] = (rem % radices[j]) as u16;
                rem /= radices[j];
            }
            coords.push(c);
        }
        let group = GroupSpec {
            order,
            inner: Arc::new(GroupInner::Abelian { factors, coords }),
        };
        Ok((group, view))
    }

    /// Parse an abelian group description like `"2x2x9"` or `"6x6"`.
    pub fn parse_abelian(s: &str) -> Result<GroupSpec, GroupError> {
        Ok(GroupSpec::parse_abelian_with_view(s)?.0)
    }

    pub fn parse_abelian_with_view(s: &str) -> Result<(GroupSpec, AbelianView), GroupError> {
        let factors: Result<Vec<u64>, _> = s
            .split(['x', 'X', '*'])
            .map(|t| t.trim().parse::<u64>())
            .collect();
        let factors = factors.map_err(|e| GroupError::Parse(format!("{s:?}: {e}")))?;
        GroupSpec::abelian_with_view(&factors)
    }

    /// Validate and load an explicit multiplication table.
    pub fn load_cayley_table(rows: &[Vec<usize>]) -> Result<(GroupSpec, LoadReport), GroupError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(GroupError::NotSquare {
                rows: n,
                first_len: rows.first().map_or(0, |r| r.len()),
            });
        }
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v >= n {
                    return Err(GroupError::EntryOutOfRange { row: i, col: j, value: v });
                }
            }
        }
        // Latin square: every row and column is a permutation
        for (i, r) in rows.iter().enumerate() {
            let mut seen = vec![false; n];
            for &v in r {
                if seen[v] {
                    return Err(GroupError::NotLatinSquare { axis: "row", line: i, value: v });
                }
                seen[v] = true;
            }
        }
        for j in 0..n {
            let mut seen = vec![false; n];
            for (_, r) in rows.iter().enumerate() {
                let v = r[j];
                if seen[v] {
                    return Err(GroupError::NotLatinSquare { axis: "column", line: j, value: v });
                }
                seen[v] = true;
            }
        }
        // two-sided identity
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| rows[e][g] == g && rows[g][e] == g))
            .ok_or(GroupError::NoIdentity)?;
        // inverses
        let mut inv = vec![u32::MAX; n];
        for g in 0..n {
            match (0..n).find(|&h| rows[g][h] == identity && rows[h][g] == identity) {
                Some(h) => inv[g] = h as u32,
                None => return Err(GroupError::NoInverse { element: g }),
            }
        }
        // associativity
        let assoc_check;
        if n <= ASSOC_EXHAUSTIVE_MAX {
            for a in 0..n {
                for b in 0..n {
                    let ab = rows[a][b];
                    for c in 0..n {
                        if rows[ab][c] != rows[a][rows[b][c]] {
                            return Err(GroupError::NotAssociative { a, b, c });
                        }
                    }
                }
            }
            assoc_check = AssocCheck::Exhaustive;
        } else {
            let mut state = 0x9e3779b97f4a7c15u64 ^ (n as u64);
            let mut next = || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                state
            };
            for _ in 0..ASSOC_SAMPLES {
                let a = (next() % n as u64) as usize;
                let b = (next() % n as u64) as usize;
                let c = (next() % n as u64) as usize;
                if rows[rows[a][b]][c] != rows[a][rows[b][c]] {
                    return Err(GroupError::NotAssociative { a, b, c });
                }
            }
            assoc_check = AssocCheck::Sampled { triples: ASSOC_SAMPLES };
        }
        let table: Vec<u32> = rows.iter().flat_map(|r| r.iter().map(|&v| v as u32)).collect();
        let report = LoadReport {
            order: n,
            identity,
            assoc_check,
        };
        let g = GroupSpec {
            order: n,
            inner: Arc::new(GroupInner::Cayley {
                table,
                inv,
                identity: identity as u32,
                report: report.clone(),
            }),
        };
        Ok((g, report))
    }

    /// Parse the whitespace-separated text format: first token n, then n·n
    /// element indices.
    pub fn parse_cayley_text(text: &str) -> Result<(GroupSpec, LoadReport), GroupError> {
        let mut it = text.split_whitespace();
        let n: usize = it
            .next()
            .ok_or_else(|| GroupError::Parse("empty table file".into()))?
            .parse()
            .map_err(|e| GroupError::Parse(format!("bad order: {e}")))?;
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let tok = it.next().ok_or_else(|| {
                    GroupError::Parse(format!("table truncated at row {i}, col {j}"))
                })?;
                row.push(
                    tok.parse::<usize>()
                        .map_err(|e| GroupError::Parse(format!("bad entry {tok:?}: {e}")))?,
                );
            }
            rows.push(row);
        }
        GroupSpec::load_cayley_table(&rows)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_abelian(&self) -> bool {
        matches!(&*self.inner, GroupInner::Abelian { .. })
    }

    pub fn element(&self, index: usize) -> Result<GroupElement, GroupError> {
        if index < self.order {
            Ok(GroupElement(index as u32))
        } else {
            Err(GroupError::IndexOutOfRange { index, order: self.order })
        }
    }

    pub fn identity(&self) -> GroupElement {
        match &*self.inner {
            GroupInner::Abelian { .. } => GroupElement(0),
            GroupInner::Cayley { identity, .. } => GroupElement(*identity),
        }
    }

    #[inline]
    pub fn mul(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        debug_assert!(a.index() < self.order && b.index() < self.order);
        match &*self.inner {
            GroupInner::Abelian { factors, coords } => {
                let ca = &coords[a.index()];
                let cb = &coords[b.index()];
                let mut idx = 0u64;
                for j in 0..factors.len() {
                    let q = factors[j].value();
                    let s = (ca[j] as u64 + cb[j] as u64) % q;
                    idx = idx * q + s;
                }
                GroupElement(idx as u32)
            }
            GroupInner::Cayley { table, .. } => {
                GroupElement(table[a.index() * self.order + b.index()])
            }
        }
    }

    #[inline]
    pub fn inv(&self, a: GroupElement) -> GroupElement {
        debug_assert!(a.index() < self.order);
        match &*self.inner {
            GroupInner::Abelian { factors, coords } => {
                let ca = &coords[a.index()];
                let mut idx = 0u64;
                for j in 0..factors.len() {
                    let q = factors[j].value();
                    let s = (q - ca[j] as u64) % q;
                    idx = idx * q + s;
                }
                GroupElement(idx as u32)
            }
            GroupInner::Cayley { inv, .. } => GroupElement(inv[a.index()]),
        }
    }

    pub fn try_mul(&self, a: usize, b: usize) -> Result<GroupElement, GroupError> {
        Ok(self.mul(self.element(a)?, self.element(b)?))
    }

    pub fn try_inv(&self, a: usize) -> Result<GroupElement, GroupError> {
        Ok(self.inv(self.element(a)?))
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> {
        (0..self.order as u32).map(GroupElement)
    }

    /// Prime-power factors (abelian groups only).
    pub fn factors(&self) -> Result<&[PrimePower], GroupError> {
        match &*self.inner {
            GroupInner::Abelian { factors, .. } => Ok(factors),
            _ => Err(GroupError::NotAbelian),
        }
    }

    /// Mixed-radix coordinates of an element (abelian groups only).
    pub fn coords(&self, a: GroupElement) -> Result<&[u16], GroupError> {
        match &*self.inner {
            GroupInner::Abelian { coords, .. } => Ok(&coords[a.index()]),
            _ => Err(GroupError::NotAbelian),
        }
    }

    pub fn element_from_coords(&self, c: &[u16]) -> Result<GroupElement, GroupError> {
        match &*self.inner {
            GroupInner::Abelian { factors, .. } => {
                if c.len() != factors.len() {
                    return Err(GroupError::Parse(format!(
                        "expected {} coordinates, got {}",
                        factors.len(),
                        c.len()
                    )));
                }
                let mut idx = 0u64;
                for (j, f) in factors.iter().enumerate() {
                    let q = f.value();
                    if c[j] as u64 >= q {
                        return Err(GroupError::Parse(format!(
                            "coordinate {} out of range for Z_{}",
                            c[j], q
                        )));
                    }
                    idx = idx * q + c[j] as u64;
                }
                Ok(GroupElement(idx as u32))
            }
            _ => Err(GroupError::NotAbelian),
        }
    }

    /// Normalized abelian description like `"2x2x9"`.
    pub fn abelian_name(&self) -> Option<String> {
        match &*self.inner {
            GroupInner::Abelian { factors, .. } => {
                if factors.is_empty() {
                    Some("1".to_string())
                } else {
                    Some(
                        factors
                            .iter()
                            .map(|f| f.value().to_string())
                            .collect::<Vec<_>>()
                            .join("x"),
                    )
                }
            }
            _ => None,
        }
    }

    pub fn load_report(&self) -> Option<&LoadReport> {
        match &*self.inner {
            GroupInner::Cayley { report, .. } => Some(report),
            _ => None,
        }
    }

    pub fn cayley_rows(&self) -> Option<Vec<Vec<u32>>> {
        match &*self.inner {
            GroupInner::Cayley { table, .. } => Some(
                (0..self.order)
                    .map(|i| table[i * self.order..(i + 1) * self.order].to_vec())
                    .collect(),
            ),
            _ => None,
        }
    }

    /// All h commuting with every g.
    pub fn center(&self) -> Subset {
        if self.is_abelian() {
            return Subset::full(self.order);
        }
        let members = self
            .elements()
            .filter(|&h| self.elements().all(|g| self.mul(g, h) == self.mul(h, g)))
            .map(|e| e.0)
            .collect();
        Subset::from_sorted_unchecked(members)
    }

    /// True iff `s` is closed under conjugation (equivalently sg = gs ∀g).
    pub fn is_normal_subset(&self, s: &Subset) -> bool {
        if self.is_abelian() {
            return true;
        }
        let mask = s.mask(self.order);
        for g in self.elements() {
            let gi = self.inv(g);
            for &a in s.members() {
                let conj = self.mul(self.mul(g, GroupElement(a)), gi);
                if !mask[conj.index()] {
                    return false;
                }
            }
        }
        true
    }

    /// The conjugacy class of `h`.
    pub fn conjugacy_class(&self, h: GroupElement) -> Subset {
        let mut members: Vec<u32> = self
            .elements()
            .map(|g| self.mul(self.mul(g, h), self.inv(g)).0)
            .collect();
        members.sort_unstable();
        members.dedup();
        Subset::from_sorted_unchecked(members)
    }

    /// The subgroup {g·g : g ∈ G} for an abelian group, as a sorted list.
    pub fn doubles_subgroup(&self) -> Result<Vec<u32>, GroupError> {
        if !self.is_abelian() {
            return Err(GroupError::NotAbelian);
        }
        let mut d: Vec<u32> = self.elements().map(|g| self.mul(g, g).0).collect();
        d.sort_unstable();
        d.dedup();
        Ok(d)
    }
}

/// A sorted, duplicate-free set of element indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subset {
    members: Vec<u32>,
}

impl Subset {
    pub fn new(group: &GroupSpec, mut members: Vec<u32>) -> Result<Subset, GroupError> {
        members.sort_unstable();
        members.dedup();
        if let Some(&m) = members.last() {
            if m as usize >= group.order() {
                return Err(GroupError::IndexOutOfRange {
                    index: m as usize,
                    order: group.order(),
                });
            }
        }
        Ok(Subset { members })
    }

    pub fn empty() -> Subset {
        Subset { members: Vec::new() }
    }

    pub fn full(order: usize) -> Subset {
        Subset {
            members: (0..order as u32).collect(),
        }
    }

    pub(crate) fn from_sorted_unchecked(members: Vec<u32>) -> Subset {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Subset { members }
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, e: u32) -> bool {
        self.members.binary_search(&e).is_ok()
    }

    pub fn mask(&self, order: usize) -> Vec<bool> {
        let mut m = vec![false; order];
        for &e in &self.members {
            m[e as usize] = true;
        }
        m
    }

    pub fn iter(&self) -> impl Iterator<Item = GroupElement> + '_ {
        self.members.iter().map(|&e| GroupElement(e))
    }

    /// {a⁻¹ : a ∈ A}
    pub fn inverse(&self, group: &GroupSpec) -> Subset {
        let mut m: Vec<u32> = self.iter().map(|a| group.inv(a).0).collect();
        m.sort_unstable();
        Subset::from_sorted_unchecked(m)
    }

    /// {a·g : a ∈ A}
    pub fn mul_right(&self, group: &GroupSpec, g: GroupElement) -> Subset {
        let mut m: Vec<u32> = self.iter().map(|a| group.mul(a, g).0).collect();
        m.sort_unstable();
        Subset::from_sorted_unchecked(m)
    }

    /// {g·a : a ∈ A}
    pub fn mul_left(&self, group: &GroupSpec, g: GroupElement) -> Subset {
        let mut m: Vec<u32> = self.iter().map(|a| group.mul(g, a).0).collect();
        m.sort_unstable();
        Subset::from_sorted_unchecked(m)
    }

    /// {a·b : a ∈ A, b ∈ B}
    pub fn setwise_mul(&self, group: &GroupSpec, other: &Subset) -> Subset {
        let mut m: Vec<u32> = Vec::new();
        for a in self.iter() {
            for b in other.iter() {
                m.push(group.mul(a, b).0);
            }
        }
        m.sort_unstable();
        m.dedup();
        Subset::from_sorted_unchecked(m)
    }

    /// Symmetric difference.
    pub fn sym_diff(&self, other: &Subset) -> Subset {
        let mut m = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.members.len() || j < other.members.len() {
            match (self.members.get(i), other.members.get(j)) {
                (Some(&a), Some(&b)) if a == b => {
                    i += 1;
                    j += 1;
                }
                (Some(&a), Some(&b)) if a < b => {
                    m.push(a);
                    i += 1;
                }
                (Some(_), Some(&b)) => {
                    m.push(b);
                    j += 1;
                }
                (Some(&a), None) => {
                    m.push(a);
                    i += 1;
                }
                (None, Some(&b)) => {
                    m.push(b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Subset::from_sorted_unchecked(m)
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.members.iter().all(|e| other.contains(*e))
    }
}

fn factorize(mut q: u64) -> Vec<PrimePower> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= q {
        if q % p == 0 {
            let mut e = 0;
            while q % p == 0 {
                q /= p;
                e += 1;
            }
            out.push(PrimePower { prime: p, exponent: e });
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if q > 1 {
        out.push(PrimePower { prime: q, exponent: 1 });
    }
    out
}

/// An automorphism of an abelian group, materialized as an element
/// permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    perm: Vec<u32>,
}

impl Automorphism {
    pub fn apply(&self, e: GroupElement) -> GroupElement {
        GroupElement(self.perm[e.index()])
    }

    pub fn apply_subset(&self, s: &Subset) -> Subset {
        let mut m: Vec<u32> = s.members().iter().map(|&e| self.perm[e as usize]).collect();
        m.sort_unstable();
        Subset::from_sorted_unchecked(m)
    }

    pub fn identity(order: usize) -> Automorphism {
        Automorphism {
            perm: (0..order as u32).collect(),
        }
    }

    pub fn perm(&self) -> &[u32] {
        &self.perm
    }

    pub fn compose(&self, then: &Automorphism) -> Automorphism {
        Automorphism {
            perm: self.perm.iter().map(|&e| then.perm[e as usize]).collect(),
        }
    }
}

/// Enumerate every automorphism of an abelian group exactly once.
///
/// Automorphisms act independently on the per-prime blocks of the sorted
/// prime-power decomposition, so block automorphisms are enumerated
/// separately and combined as a product.
pub fn abelian_automorphisms(group: &GroupSpec) -> Result<Vec<Automorphism>, GroupError> {
    let factors = group.factors()?.to_vec();
    let n = group.order();
    // group factor indices by prime
    let mut blocks: Vec<(u64, Vec<usize>)> = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        match blocks.last_mut() {
            Some((p, idxs)) if *p == f.prime => idxs.push(i),
            _ => blocks.push((f.prime, vec![i])),
        }
    }
    // per-block automorphism matrices
    let mut block_maps: Vec<Vec<BlockMatrix>> = Vec::new();
    for (p, idxs) in &blocks {
        let exps: Vec<u32> = idxs.iter().map(|&i| factors[i].exponent).collect();
        block_maps.push(block_automorphisms(*p, &exps));
    }
    // cartesian product of block choices, materialized as permutations
    let mut result = Vec::new();
    let mut choice = vec![0usize; blocks.len()];
    loop {
        let mut perm = vec![0u32; n];
        for (e, slot) in perm.iter_mut().enumerate() {
            let c = group.coords(GroupElement(e as u32))?;
            let mut img = vec![0u16; factors.len()];
            for (bi, (_, idxs)) in blocks.iter().enumerate() {
                let m = &block_maps[bi][choice[bi]];
                let block_in: Vec<u16> = idxs.iter().map(|&i| c[i]).collect();
                let block_out = m.apply(&block_in);
                for (k, &i) in idxs.iter().enumerate() {
                    img[i] = block_out[k];
                }
            }
            *slot = group.element_from_coords(&img)?.0;
        }
        result.push(Automorphism { perm });
        // advance
        let mut bi = 0;
        loop {
            if bi == blocks.len() {
                return Ok(result);
            }
            choice[bi] += 1;
            if choice[bi] < block_maps[bi].len() {
                break;
            }
            choice[bi] = 0;
            bi += 1;
        }
    }
}

/// Cached variant of [`abelian_automorphisms`]: repeated canonicalizations
/// over the same group reuse the materialized permutations. Only groups
/// whose table stays small are cached.
pub fn abelian_automorphisms_cached(
    group: &GroupSpec,
) -> Result<Arc<Vec<Automorphism>>, GroupError> {
    use std::sync::Mutex;
    static CACHE: std::sync::OnceLock<Mutex<Vec<(Vec<PrimePower>, Arc<Vec<Automorphism>>)>>> =
        std::sync::OnceLock::new();
    let factors = group.factors()?.to_vec();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    {
        let guard = cache.lock().unwrap();
        if let Some((_, auts)) = guard.iter().find(|(f, _)| *f == factors) {
            return Ok(auts.clone());
        }
    }
    let auts = Arc::new(abelian_automorphisms(group)?);
    let words = auts.len().saturating_mul(group.order());
    if words <= 4_000_000 {
        let mut guard = cache.lock().unwrap();
        if guard.len() > 64 {
            guard.clear();
        }
        guard.push((factors, auts.clone()));
    }
    Ok(auts)
}

/// Number of automorphisms without materializing permutations.
pub fn abelian_automorphism_count(group: &GroupSpec) -> Result<usize, GroupError> {
    Ok(abelian_automorphisms_blocks(group)?
        .iter()
        .map(|b| b.len())
        .product())
}

fn abelian_automorphisms_blocks(group: &GroupSpec) -> Result<Vec<Vec<BlockMatrix>>, GroupError> {
    let factors = group.factors()?.to_vec();
    let mut blocks: Vec<(u64, Vec<u32>)> = Vec::new();
    for f in &factors {
        match blocks.last_mut() {
            Some((p, exps)) if *p == f.prime => exps.push(f.exponent),
            _ => blocks.push((f.prime, vec![f.exponent])),
        }
    }
    Ok(blocks
        .iter()
        .map(|(p, exps)| block_automorphisms(*p, exps))
        .collect())
}

/// Endomorphism matrix of `⊕_j Z_{p^{a_j}}` (single prime p).
#[derive(Clone, Debug)]
struct BlockMatrix {
    /// entry[i][j]: the hom Z_{p^{a_j}} → Z_{p^{a_i}} sending 1 ↦ entry.
    entry: Vec<Vec<u64>>,
    moduli: Vec<u64>,
}

impl BlockMatrix {
    fn apply(&self, x: &[u16]) -> Vec<u16> {
        let k = self.moduli.len();
        let mut out = vec![0u16; k];
        for i in 0..k {
            let mut acc = 0u64;
            for (j, &xj) in x.iter().enumerate() {
                acc = (acc + self.entry[i][j] * xj as u64) % self.moduli[i];
            }
            out[i] = acc as u16;
        }
        out
    }
}

/// All automorphisms of a single-prime block, by filtering candidate
/// endomorphism matrices for bijectivity.
fn block_automorphisms(p: u64, exps: &[u32]) -> Vec<BlockMatrix> {
    let k = exps.len();
    let moduli: Vec<u64> = exps.iter().map(|&a| p.pow(a)).collect();
    // entry (i,j) ranges over c·p^{max(a_i - a_j, 0)} for c in [0, p^{min(a_i,a_j)})
    let mut choices: Vec<Vec<u64>> = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let step = if exps[i] > exps[j] {
                p.pow(exps[i] - exps[j])
            } else {
                1
            };
            let count = p.pow(exps[i].min(exps[j]));
            choices.push((0..count).map(|c| c * step % moduli[i]).collect());
        }
    }
    let block_size: usize = moduli.iter().map(|&m| m as usize).product();
    // enumerate block elements once
    let mut elements: Vec<Vec<u16>> = Vec::with_capacity(block_size);
    {
        let mut cur = vec![0u16; k];
        loop {
            elements.push(cur.clone());
            let mut i = 0;
            loop {
                if i == k {
                    break;
                }
                cur[i] += 1;
                if (cur[i] as u64) < moduli[i] {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
            if cur.iter().all(|&c| c == 0) {
                break;
            }
        }
    }
    let mut out = Vec::new();
    let mut pick = vec![0usize; k * k];
    loop {
        let m = BlockMatrix {
            entry: (0..k)
                .map(|i| (0..k).map(|j| choices[i * k + j][pick[i * k + j]]).collect())
                .collect(),
            moduli: moduli.clone(),
        };
        // bijectivity test on all block elements
        let mut seen = vec![false; block_size];
        let mut ok = true;
        for e in &elements {
            let img = m.apply(e);
            let mut idx = 0usize;
            for (i, &c) in img.iter().enumerate() {
                idx = idx * moduli[i] as usize + c as usize;
            }
            if seen[idx] {
                ok = false;
                break;
            }
            seen[idx] = true;
        }
        if ok {
            out.push(m);
        }
        // advance
        let mut t = 0;
        loop {
            if t == k * k {
                return out;
            }
            pick[t] += 1;
            if pick[t] < choices[t].len() {
                break;
            }
            pick[t] = 0;
            t += 1;
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn s3() -> GroupSpec {
        // elements: 0=e, 1=(12), 2=(13), 3=(23), 4=(123), 5=(132)
        // composition f∘g (apply g first); table[a][b] = a·b with a applied second
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2], // e
            [1, 0, 2], // (12)
            [2, 1, 0], // (13)
            [0, 2, 1], // (23)
            [1, 2, 0], // (123): 0→1→2→0
            [2, 0, 1], // (132)
        ];
        let compose = |a: &[usize; 3], b: &[usize; 3]| -> [usize; 3] {
            [a[b[0]], a[b[1]], a[b[2]]]
        };
        let find = |p: &[usize; 3]| perms.iter().position(|q| q == p).unwrap();
        let rows: Vec<Vec<usize>> = (0..6)
            .map(|i| (0..6).map(|j| find(&compose(&perms[i], &perms[j]))).collect())
            .collect();
        GroupSpec::load_cayley_table(&rows).unwrap().0
    }

    #[test]
    fn z6_arithmetic() {
        let (g, view) = GroupSpec::parse_abelian_with_view("6").unwrap();
        assert_eq!(g.order(), 6);
        // addition mod 6 through the CRT relabeling
        let two = view.element(&g, &[2]).unwrap();
        let five = view.element(&g, &[5]).unwrap();
        let one = view.element(&g, &[1]).unwrap();
        let four = view.element(&g, &[4]).unwrap();
        assert_eq!(g.mul(two, five), one);
        assert_eq!(g.inv(two), four);
        assert_eq!(view.user_coords(&g, one).unwrap(), vec![1]);
        let e = g.identity();
        for a in g.elements() {
            assert_eq!(g.mul(e, a), a);
            assert_eq!(g.mul(a, g.inv(a)), e);
        }
    }

    #[test]
    fn z16_mul_inv_examples() {
        let g = GroupSpec::parse_abelian("16").unwrap();
        // single factor: index == value mod 16
        assert_eq!(g.mul(GroupElement(2), GroupElement(5)).0, 7);
        assert_eq!(g.inv(GroupElement(2)).0, 14);
        assert_eq!(g.inv(g.identity()), g.identity());
    }

    #[test]
    fn z2z9_componentwise() {
        let g = GroupSpec::parse_abelian("2x9").unwrap();
        let a = g.element_from_coords(&[1, 4]).unwrap();
        assert_eq!(g.coords(g.inv(a)).unwrap(), &[1, 5]);
    }

    #[test]
    fn normalization_sorts_factors() {
        let a = GroupSpec::parse_abelian("9x2x2").unwrap();
        assert_eq!(a.abelian_name().unwrap(), "2x2x9");
        let b = GroupSpec::parse_abelian("6x6").unwrap();
        assert_eq!(b.abelian_name().unwrap(), "2x2x3x3");
    }

    #[test]
    fn trivial_and_z2_tables() {
        let (t, _) = GroupSpec::load_cayley_table(&[vec![0]]).unwrap();
        assert_eq!(t.order(), 1);
        let (z2, rep) = GroupSpec::load_cayley_table(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(z2.order(), 2);
        assert_eq!(rep.assoc_check, AssocCheck::Exhaustive);
    }

    #[test]
    fn bad_latin_square_rejected() {
        let err = GroupSpec::load_cayley_table(&[vec![0, 1], vec![0, 1]]).unwrap_err();
        assert!(matches!(err, GroupError::NotLatinSquare { .. }));
    }

    #[test]
    fn s3_table_and_center() {
        let g = s3();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        let z = g.center();
        assert_eq!(z.members(), &[g.identity().0]);
        // mul read back from the loaded table: (12)·(13) is a 3-cycle
        let prod = g.mul(GroupElement(1), GroupElement(2));
        assert!(prod.0 == 4 || prod.0 == 5);
    }

    #[test]
    fn s3_normal_subsets() {
        let g = s3();
        let single = Subset::new(&g, vec![1]).unwrap();
        assert!(!g.is_normal_subset(&single));
        let transpositions = Subset::new(&g, vec![1, 2, 3]).unwrap();
        assert!(g.is_normal_subset(&transpositions));
        assert_eq!(g.conjugacy_class(GroupElement(1)), transpositions);
        // center is always normal
        assert!(g.is_normal_subset(&g.center()));
    }

    #[test]
    fn automorphism_counts() {
        let z3 = GroupSpec::parse_abelian("3").unwrap();
        assert_eq!(abelian_automorphisms(&z3).unwrap().len(), 2);
        let z2z2 = GroupSpec::parse_abelian("2x2").unwrap();
        assert_eq!(abelian_automorphisms(&z2z2).unwrap().len(), 6);
        let z4z3 = GroupSpec::parse_abelian("4x3").unwrap();
        assert_eq!(abelian_automorphisms(&z4z3).unwrap().len(), 4);
    }

    #[test]
    fn automorphisms_preserve_addition_and_form_group() {
        let g = GroupSpec::parse_abelian("2x2x3").unwrap();
        let auts = abelian_automorphisms(&g).unwrap();
        // contains identity
        assert!(auts.iter().any(|a| a.perm() == Automorphism::identity(g.order()).perm()));
        for phi in &auts {
            for a in g.elements() {
                for b in g.elements() {
                    assert_eq!(
                        phi.apply(g.mul(a, b)),
                        g.mul(phi.apply(a), phi.apply(b))
                    );
                }
            }
        }
        // closed under composition (spot check)
        let c = auts[1].compose(&auts[auts.len() - 1]);
        assert!(auts.iter().any(|a| a.perm() == c.perm()));
    }

    #[test]
    fn brute_force_aut_count_matches_z2z2() {
        // |Aut(Z2×Z2)| = |GL(2,F2)| = 6, via brute force over all bijections
        let g = GroupSpec::parse_abelian("2x2").unwrap();
        let n = g.order();
        let mut count = 0;
        let mut perm: Vec<u32> = (0..n as u32).collect();
        // all 4! permutations
        let mut stack = vec![(perm.clone(), 0usize)];
        let mut all = Vec::new();
        while let Some((p, k)) = stack.pop() {
            if k == n {
                all.push(p);
                continue;
            }
            for i in k..n {
                let mut q = p.clone();
                q.swap(k, i);
                stack.push((q, k + 1));
            }
        }
        for p in all {
            perm.copy_from_slice(&p);
            if perm[0] != 0 {
                continue;
            }
            let additive = g.elements().all(|a| {
                g.elements().all(|b| {
                    perm[g.mul(a, b).index()]
                        == g.mul(GroupElement(perm[a.index()]), GroupElement(perm[b.index()])).0
                })
            });
            if additive {
                count += 1;
            }
        }
        assert_eq!(count, 6);
    }
}
