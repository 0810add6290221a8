//! Mirror-code specs and stabilizer tableaux.
//!
//! A `(G, A, B)` mirror code has one qubit and one stabilizer per group
//! element. The stabilizer labeled `g` is `Z(Ag)·X(Bg⁻¹)` in the symmetric
//! form and `Z(Ag)·X(g⁻¹B)` in the asymmetric form, with `Z`/`X` overlaps
//! acting as `Y`.

use crate::groups::{GroupElement, GroupError, GroupSpec, Subset};
use crate::pauli::{PauliString, SignedRref};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Symmetric,
    Asymmetric,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MirrorError {
    #[error("spec is not a well-defined mirror code (kernel is not symmetric)")]
    InvalidSpec,
    #[error("subset is not normal in the group")]
    NotNormal,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("cannot parse mirror spec: {0}")]
    Parse(String),
}

/// The generative description of a mirror code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MirrorSpec {
    pub group: GroupSpec,
    pub a: Subset,
    pub b: Subset,
    pub variant: Variant,
}

/// `n` stabilizer generators over `n` qubits as signed symplectic rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTableau {
    pub n: usize,
    pub rows: Vec<PauliString>,
}

impl StabilizerTableau {
    pub fn max_row_weight(&self) -> usize {
        self.rows.iter().map(|r| r.weight()).max().unwrap_or(0)
    }

    /// Sorted multiset of row weights (a cheap gauge invariant).
    pub fn row_weight_multiset(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self.rows.iter().map(|r| r.weight()).collect();
        w.sort_unstable();
        w
    }

    /// Maximum number of rows touching any single qubit.
    pub fn max_qubit_degree(&self) -> usize {
        let mut deg = vec![0usize; self.n];
        for r in &self.rows {
            for q in 0..self.n {
                if r.z_mask.get(q) || r.x_mask.get(q) {
                    deg[q] += 1;
                }
            }
        }
        deg.into_iter().max().unwrap_or(0)
    }
}

impl MirrorSpec {
    pub fn new(group: GroupSpec, a: Subset, b: Subset, variant: Variant) -> MirrorSpec {
        MirrorSpec { group, a, b, variant }
    }

    pub fn n(&self) -> usize {
        self.group.order()
    }

    /// The mod-2 kernel `K(x) = |Ax ∩ B| mod 2` of the symmetric form.
    pub fn kernel_symmetric(&self) -> Vec<bool> {
        let n = self.group.order();
        let bmask = self.b.mask(n);
        let mut k = vec![false; n];
        for (x, slot) in k.iter_mut().enumerate() {
            let xe = GroupElement(x as u32);
            let mut c = 0usize;
            for a in self.a.iter() {
                if bmask[self.group.mul(a, xe).index()] {
                    c += 1;
                }
            }
            *slot = c % 2 == 1;
        }
        k
    }

    /// Decide whether the spec defines a well-defined (commuting) code.
    ///
    /// Symmetric form: `K_S(g,h) = |Agh ∩ B|` depends only on the product
    /// `gh`, and symmetry of the kernel is equivalent to `K` being constant
    /// on conjugacy classes — checked over the odd support only, which keeps
    /// this `O(n·|A|·|B|)`. Asymmetric form: direct symmetry check of
    /// `K_A(g,h) = |gAh ∩ B|`.
    pub fn is_valid(&self) -> bool {
        if self.group.is_abelian() {
            return true;
        }
        let n = self.group.order();
        match self.variant {
            Variant::Symmetric => {
                let k = self.kernel_symmetric();
                for (x, &kx) in k.iter().enumerate() {
                    if !kx {
                        continue;
                    }
                    let xe = GroupElement(x as u32);
                    for g in self.group.elements() {
                        let conj = self.group.mul(self.group.mul(g, xe), self.group.inv(g));
                        if !k[conj.index()] {
                            return false;
                        }
                    }
                }
                true
            }
            Variant::Asymmetric => {
                let bmask = self.b.mask(n);
                let ka = |g: GroupElement, h: GroupElement| -> bool {
                    let mut c = 0usize;
                    for a in self.a.iter() {
                        if bmask[self.group.mul(self.group.mul(g, a), h).index()] {
                            c += 1;
                        }
                    }
                    c % 2 == 1
                };
                for g in self.group.elements() {
                    for h in self.group.elements() {
                        if g < h && ka(g, h) != ka(h, g) {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    /// Unsigned Z/X masks of every row, in element-index order, with no
    /// validity check. Test oracles compare these against pairwise
    /// commutation directly.
    pub fn build_rows_unchecked(&self) -> Vec<PauliString> {
        let n = self.group.order();
        (0..n)
            .map(|gi| {
                let g = GroupElement(gi as u32);
                let gi_inv = self.group.inv(g);
                let mut p = PauliString::identity(n);
                for a in self.a.iter() {
                    p.z_mask.set(self.group.mul(a, g).index(), true);
                }
                match self.variant {
                    Variant::Symmetric => {
                        for b in self.b.iter() {
                            p.x_mask.set(self.group.mul(b, gi_inv).index(), true);
                        }
                    }
                    Variant::Asymmetric => {
                        for b in self.b.iter() {
                            p.x_mask.set(self.group.mul(gi_inv, b).index(), true);
                        }
                    }
                }
                p
            })
            .collect()
    }

    /// Build the signed stabilizer tableau.
    ///
    /// Rows are generated in element-index order. Whenever an unsigned row
    /// would put `−I` into the generated group, its sign is flipped instead,
    /// so the group never contains `−I` and the output is deterministic.
    pub fn build_tableau(&self) -> Result<StabilizerTableau, MirrorError> {
        if !self.is_valid() {
            return Err(MirrorError::InvalidSpec);
        }
        let n = self.group.order();
        let mut rows = self.build_rows_unchecked();
        let mut gen = SignedRref::new(n);
        for row in rows.iter_mut() {
            let red = gen.reduce(row);
            if red.is_identity() {
                if red.sign {
                    // the group element with this symplectic part has the
                    // opposite sign; flip ours to match
                    row.sign = !row.sign;
                }
            } else {
                gen.insert(row.clone());
            }
        }
        Ok(StabilizerTableau { n, rows })
    }

    /// Sufficiency shortcut: `A⁻¹B ⊆ Z(G)` (symmetric) or `AB ⊆ Z(G)`
    /// (asymmetric) forces validity.
    pub fn sufficient_center(&self) -> bool {
        let center = self.group.center();
        let prod = match self.variant {
            Variant::Symmetric => self.a.inverse(&self.group).setwise_mul(&self.group, &self.b),
            Variant::Asymmetric => self.a.setwise_mul(&self.group, &self.b),
        };
        prod.is_subset_of(&center)
    }

    /// Sufficiency shortcut: A and B both normal subsets force validity (and
    /// make the two variants coincide).
    pub fn sufficient_normal(&self) -> bool {
        self.group.is_normal_subset(&self.a) && self.group.is_normal_subset(&self.b)
    }
}

/// The group-algebra validity formulation: the symmetric mirror code is
/// well-defined iff `𝟙_A* 𝟙_B ∈ F2[G]` is central. Must agree with
/// `is_valid` for `variant = symmetric` on every input.
pub fn group_algebra_central_check(group: &GroupSpec, a: &Subset, b: &Subset) -> bool {
    // coefficient of g in 𝟙_A* 𝟙_B is |Ag ∩ B| mod 2
    let spec = MirrorSpec::new(group.clone(), a.clone(), b.clone(), Variant::Symmetric);
    let k = spec.kernel_symmetric();
    // central iff the coefficient function is constant on conjugacy classes
    for (x, &kx) in k.iter().enumerate() {
        let xe = GroupElement(x as u32);
        for h in group.elements() {
            let conj = group.mul(group.mul(h, xe), group.inv(h));
            if k[conj.index()] != kx {
                return false;
            }
        }
    }
    true
}

/// Reason a spec was rejected before parameter computation.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrefilterVerdict {
    Pass,
    /// `B = uA⁻¹v` (symmetric) or `B = A⁻¹w` (asymmetric): the code has
    /// `k = 0` or `d ≤ 2`.
    InvertedTranslate,
    /// `|A| = |B|`, equivalently CSS, and some row carries a `Y`: the code
    /// has `k = 0` or `d ≤ 2`.
    BalancedYCss,
}

/// Cheap bad-parameter screens applied before any expensive computation.
pub fn prefilter(spec: &MirrorSpec) -> PrefilterVerdict {
    if is_inverted_translate(spec) {
        return PrefilterVerdict::InvertedTranslate;
    }
    if spec.a.len() == spec.b.len() && some_row_has_y(spec) {
        if let crate::cssform::CssVerdict::EquivCss(_) = crate::cssform::is_equiv_css(spec) {
            return PrefilterVerdict::BalancedYCss;
        }
    }
    PrefilterVerdict::Pass
}

fn is_inverted_translate(spec: &MirrorSpec) -> bool {
    if spec.a.len() != spec.b.len() || spec.a.is_empty() {
        // empty sets: B = uA⁻¹v holds trivially when both empty
        return spec.a.is_empty() && spec.b.is_empty();
    }
    let g = &spec.group;
    let a_inv = spec.a.inverse(g);
    match spec.variant {
        Variant::Symmetric => {
            // enumerate u; solve v from the first element of uA⁻¹
            for u in g.elements() {
                let c = a_inv.mul_left(g, u);
                let c0 = GroupElement(c.members()[0]);
                for bb in spec.b.iter() {
                    let v = g.mul(g.inv(c0), bb);
                    if c.mul_right(g, v) == spec.b {
                        return true;
                    }
                }
            }
            false
        }
        Variant::Asymmetric => {
            let c0 = GroupElement(a_inv.members()[0]);
            for bb in spec.b.iter() {
                let w = g.mul(g.inv(c0), bb);
                if a_inv.mul_right(g, w) == spec.b {
                    return true;
                }
            }
            false
        }
    }
}

fn some_row_has_y(spec: &MirrorSpec) -> bool {
    // a Y appears iff some Ag intersects Bg⁻¹ (or g⁻¹B)
    let g = &spec.group;
    let bmask = spec.b.mask(g.order());
    for x in g.elements() {
        let xi = g.inv(x);
        for a in spec.a.iter() {
            let q = g.mul(a, x);
            // q ∈ Bx⁻¹ ⟺ qx ∈ B; q ∈ x⁻¹B ⟺ xq ∈ B
            let hit = match spec.variant {
                Variant::Symmetric => bmask[g.mul(q, x).index()],
                Variant::Asymmetric => bmask[g.mul(x, q).index()],
            };
            let _ = xi;
            if hit {
                return true;
            }
        }
    }
    false
}

/// The two alternative stabilizer layouts considered and reduced by the
/// equivalence lemma.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AltConstruction {
    /// rows `Z(gA) X(g⁻¹B)`
    LeftZLeftX,
    /// rows `Z(gA) X(Bg⁻¹)`
    LeftZRightX,
}

/// Map an alternative layout to its equivalent standard mirror spec:
/// `Z(gA)X(g⁻¹B) ≅ (G, A⁻¹, B⁻¹, symmetric)` under the qubit permutation
/// `q(g) = g⁻¹`, and `Z(gA)X(Bg⁻¹) ≅ (G, B, A, asymmetric)` under a global
/// Hadamard (up to phases).
pub fn alt_construction_equivalent(
    group: &GroupSpec,
    a: &Subset,
    b: &Subset,
    alt: AltConstruction,
) -> MirrorSpec {
    match alt {
        AltConstruction::LeftZLeftX => MirrorSpec::new(
            group.clone(),
            a.inverse(group),
            b.inverse(group),
            Variant::Symmetric,
        ),
        AltConstruction::LeftZRightX => {
            MirrorSpec::new(group.clone(), b.clone(), a.clone(), Variant::Asymmetric)
        }
    }
}

/// Unsigned rows of an alternative layout, for equivalence tests.
pub fn build_alt_rows(
    group: &GroupSpec,
    a: &Subset,
    b: &Subset,
    alt: AltConstruction,
) -> Vec<PauliString> {
    let n = group.order();
    (0..n)
        .map(|gi| {
            let g = GroupElement(gi as u32);
            let g_inv = group.inv(g);
            let mut p = PauliString::identity(n);
            for aa in a.iter() {
                p.z_mask.set(group.mul(g, aa).index(), true);
            }
            match alt {
                AltConstruction::LeftZLeftX => {
                    for bb in b.iter() {
                        p.x_mask.set(group.mul(g_inv, bb).index(), true);
                    }
                }
                AltConstruction::LeftZRightX => {
                    for bb in b.iter() {
                        p.x_mask.set(group.mul(bb, g_inv).index(), true);
                    }
                }
            }
            p
        })
        .collect()
}

/// Lift a normal 2BGA code `(G, A, B)` to the mirror spec
/// `(Z2×G, {0}×A, {1}×B⁻¹, symmetric)`.
pub fn lift_2bga(group: &GroupSpec, a: &Subset, b: &Subset) -> Result<MirrorSpec, MirrorError> {
    if !group.is_normal_subset(a) || !group.is_normal_subset(b) {
        return Err(MirrorError::NotNormal);
    }
    let n = group.order();
    if group.is_abelian() {
        let factor_values: Vec<u64> = std::iter::once(2u64)
            .chain(group.factors()?.iter().map(|f| f.value()))
            .collect();
        let (lifted, view) = GroupSpec::abelian_with_view(&factor_values)?;
        let map = |bit: u64, e: GroupElement| -> Result<u32, GroupError> {
            let coords = group.coords(e)?;
            let mut user: Vec<u64> = Vec::with_capacity(coords.len() + 1);
            user.push(bit);
            user.extend(coords.iter().map(|&c| c as u64));
            Ok(view.element(&lifted, &user)?.0)
        };
        let mut a2 = Vec::new();
        for e in a.iter() {
            a2.push(map(0, e)?);
        }
        let mut b2 = Vec::new();
        for e in b.iter() {
            b2.push(map(1, group.inv(e))?);
        }
        Ok(MirrorSpec::new(
            lifted.clone(),
            Subset::new(&lifted, a2)?,
            Subset::new(&lifted, b2)?,
            Variant::Symmetric,
        ))
    } else {
        // direct product table on indices (bit, g) → bit·n + g
        let rows: Vec<Vec<usize>> = (0..2 * n)
            .map(|i| {
                let (bi, gi) = (i / n, i % n);
                (0..2 * n)
                    .map(|j| {
                        let (bj, gj) = (j / n, j % n);
                        let bit = (bi + bj) % 2;
                        let prod = group.mul(GroupElement(gi as u32), GroupElement(gj as u32));
                        bit * n + prod.index()
                    })
                    .collect()
            })
            .collect();
        let (lifted, _) = GroupSpec::load_cayley_table(&rows)?;
        let a2: Vec<u32> = a.members().to_vec();
        let b2: Vec<u32> = b.iter().map(|e| n as u32 + group.inv(e).0).collect();
        Ok(MirrorSpec::new(
            lifted.clone(),
            Subset::new(&lifted, a2)?,
            Subset::new(&lifted, b2)?,
            Variant::Symmetric,
        ))
    }
}

/// Stabilizer rows of the plain `(G, A, B)` 2BGA CSS code on `2|G|` qubits,
/// used as the independent reference for the lift.
pub fn build_2bga_rows(group: &GroupSpec, a: &Subset, b: &Subset) -> Vec<PauliString> {
    let n = group.order();
    let mut rows = Vec::with_capacity(2 * n);
    for gi in 0..n {
        let g = GroupElement(gi as u32);
        // Z-type: Z_L(Ag) Z_R(gB)
        let mut p = PauliString::identity(2 * n);
        for aa in a.iter() {
            p.z_mask.set(group.mul(aa, g).index(), true);
        }
        for bb in b.iter() {
            p.z_mask.set(n + group.mul(g, bb).index(), true);
        }
        rows.push(p);
    }
    for gi in 0..n {
        let g = GroupElement(gi as u32);
        // X-type: X_L(gB⁻¹) X_R(A⁻¹g)
        let mut p = PauliString::identity(2 * n);
        for bb in b.iter() {
            p.x_mask.set(group.mul(g, group.inv(bb)).index(), true);
        }
        for aa in a.iter() {
            p.x_mask.set(n + group.mul(group.inv(aa), g).index(), true);
        }
        rows.push(p);
    }
    rows
}

// --- serialization -------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum GroupRepr {
    Abelian(String),
    Cayley { cayley: Vec<Vec<usize>> },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SubsetRepr {
    Tuples(Vec<Vec<u16>>),
    Indices(Vec<u32>),
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    group: GroupRepr,
    #[serde(rename = "A")]
    a: SubsetRepr,
    #[serde(rename = "B")]
    b: SubsetRepr,
    variant: Variant,
}

impl MirrorSpec {
    pub fn to_json(&self) -> String {
        let group_repr = if let Some(name) = self.group.abelian_name() {
            GroupRepr::Abelian(name)
        } else {
            GroupRepr::Cayley {
                cayley: self
                    .group
                    .cayley_rows()
                    .unwrap()
                    .into_iter()
                    .map(|r| r.into_iter().map(|v| v as usize).collect())
                    .collect(),
            }
        };
        let subset_repr = |s: &Subset| -> SubsetRepr {
            if self.group.is_abelian() {
                SubsetRepr::Tuples(
                    s.iter()
                        .map(|e| self.group.coords(e).unwrap().to_vec())
                        .collect(),
                )
            } else {
                SubsetRepr::Indices(s.members().to_vec())
            }
        };
        serde_json::to_string(&SpecRepr {
            group: group_repr,
            a: subset_repr(&self.a),
            b: subset_repr(&self.b),
            variant: self.variant,
        })
        .expect("spec serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<MirrorSpec, MirrorError> {
        let repr: SpecRepr =
            serde_json::from_str(s).map_err(|e| MirrorError::Parse(e.to_string()))?;
        let group = match &repr.group {
            GroupRepr::Abelian(name) => GroupSpec::parse_abelian(name)?,
            GroupRepr::Cayley { cayley } => GroupSpec::load_cayley_table(cayley)?.0,
        };
        let subset = |r: &SubsetRepr| -> Result<Subset, MirrorError> {
            match r {
                SubsetRepr::Tuples(ts) => {
                    let mut members = Vec::with_capacity(ts.len());
                    for t in ts {
                        members.push(group.element_from_coords(t)?.0);
                    }
                    Ok(Subset::new(&group, members)?)
                }
                SubsetRepr::Indices(idx) => Ok(Subset::new(&group, idx.clone())?),
            }
        };
        let a = subset(&repr.a)?;
        let b = subset(&repr.b)?;
        Ok(MirrorSpec::new(group, a, b, repr.variant))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::groups::tests::s3;

    fn subset(g: &GroupSpec, m: &[u32]) -> Subset {
        Subset::new(g, m.to_vec()).unwrap()
    }

    pub(crate) fn fig1_spec() -> MirrorSpec {
        let (g, view) = GroupSpec::parse_abelian_with_view("6x6").unwrap();
        let a = [[1u64, 2], [4, 3], [4, 4]];
        let b = [[2u64, 4], [3, 1], [4, 1]];
        let to_subset = |pts: &[[u64; 2]]| {
            Subset::new(
                &g,
                pts.iter()
                    .map(|p| view.element(&g, p).unwrap().0)
                    .collect::<Vec<_>>(),
            )
            .unwrap()
        };
        MirrorSpec::new(g.clone(), to_subset(&a), to_subset(&b), Variant::Symmetric)
    }

    #[test]
    fn abelian_specs_always_valid() {
        let spec = fig1_spec();
        assert!(spec.is_valid());
        // all row pairs commute
        let t = spec.build_tableau().unwrap();
        for i in 0..t.rows.len() {
            for j in (i + 1)..t.rows.len() {
                assert!(!t.rows[i].anticommutes_with(&t.rows[j]));
            }
        }
    }

    #[test]
    fn validity_matches_row_commutation_on_s3() {
        let g = s3();
        // exhaustive over small subset sizes
        let all: Vec<u32> = (0..6).collect();
        let mut checked = 0;
        for am in 1u32..64 {
            if am.count_ones() > 3 {
                continue;
            }
            for bm in 1u32..64 {
                if bm.count_ones() > 2 {
                    continue;
                }
                for variant in [Variant::Symmetric, Variant::Asymmetric] {
                    let a = subset(&g, &all.iter().filter(|&&e| am >> e & 1 == 1).copied().collect::<Vec<_>>());
                    let b = subset(&g, &all.iter().filter(|&&e| bm >> e & 1 == 1).copied().collect::<Vec<_>>());
                    let spec = MirrorSpec::new(g.clone(), a, b, variant);
                    let rows = spec.build_rows_unchecked();
                    let commutes = (0..rows.len()).all(|i| {
                        (i + 1..rows.len()).all(|j| !rows[i].anticommutes_with(&rows[j]))
                    });
                    assert_eq!(spec.is_valid(), commutes);
                    checked += 1;
                }
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn single_z_and_empty_rows() {
        let g = GroupSpec::parse_abelian("5").unwrap();
        let spec = MirrorSpec::new(g.clone(), subset(&g, &[0]), Subset::empty(), Variant::Symmetric);
        let t = spec.build_tableau().unwrap();
        for (i, row) in t.rows.iter().enumerate() {
            assert_eq!(row.weight(), 1);
            assert!(row.z_mask.get(i));
        }
        let empty = MirrorSpec::new(g.clone(), Subset::empty(), Subset::empty(), Variant::Symmetric);
        let t = empty.build_tableau().unwrap();
        assert!(t.rows.iter().all(|r| r.is_identity()));
    }

    #[test]
    fn fig1_rows_translate_in_opposite_directions() {
        let spec = fig1_spec();
        let t = spec.build_tableau().unwrap();
        let g = &spec.group;
        // row for identity has Z exactly on A, X exactly on B
        let row0 = &t.rows[0];
        for a in spec.a.iter() {
            assert!(row0.z_mask.get(a.index()));
        }
        for b in spec.b.iter() {
            assert!(row0.x_mask.get(b.index()));
        }
        // row for g has Z on A+g and X on B−g
        for gi in g.elements() {
            let row = &t.rows[gi.index()];
            let az = spec.a.mul_right(g, gi);
            let bx = spec.b.mul_right(g, g.inv(gi));
            assert_eq!(row.z_mask.count_ones(), az.len());
            for e in az.iter() {
                assert!(row.z_mask.get(e.index()));
            }
            for e in bx.iter() {
                assert!(row.x_mask.get(e.index()));
            }
        }
    }

    #[test]
    fn ldpc_bounds_hold() {
        let spec = fig1_spec();
        let t = spec.build_tableau().unwrap();
        let w = spec.a.len() + spec.b.len();
        assert!(t.max_row_weight() <= w);
        assert!(t.max_qubit_degree() <= w);
        assert_eq!(t.max_row_weight(), 6);
    }

    #[test]
    fn sufficiency_implies_validity_on_s3() {
        let g = s3();
        let mut rng_state = 12345u64;
        let mut next = || {
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            rng_state
        };
        for _ in 0..2000 {
            let am = (next() % 63 + 1) as u32;
            let bm = (next() % 63 + 1) as u32;
            let a = subset(&g, &(0..6).filter(|&e| am >> e & 1 == 1).collect::<Vec<_>>());
            let b = subset(&g, &(0..6).filter(|&e| bm >> e & 1 == 1).collect::<Vec<_>>());
            for variant in [Variant::Symmetric, Variant::Asymmetric] {
                let spec = MirrorSpec::new(g.clone(), a.clone(), b.clone(), variant);
                if spec.sufficient_center() || spec.sufficient_normal() {
                    assert!(spec.is_valid());
                }
            }
        }
    }

    #[test]
    fn s3_sufficient_examples() {
        let g = s3();
        // A={(12)}, B={(13)}: (12)⁻¹(13) not central
        let spec = MirrorSpec::new(g.clone(), subset(&g, &[1]), subset(&g, &[2]), Variant::Symmetric);
        assert!(!spec.sufficient_center());
        // transposition class and 3-cycle class are both normal
        let spec = MirrorSpec::new(
            g.clone(),
            subset(&g, &[1, 2, 3]),
            subset(&g, &[4, 5]),
            Variant::Symmetric,
        );
        assert!(spec.sufficient_normal());
        assert!(spec.is_valid());
    }

    #[test]
    fn group_algebra_check_agrees_with_validity() {
        let g = s3();
        for am in 0u32..64 {
            for bm in 0u32..64 {
                let a = subset(&g, &(0..6).filter(|&e| am >> e & 1 == 1).collect::<Vec<_>>());
                let b = subset(&g, &(0..6).filter(|&e| bm >> e & 1 == 1).collect::<Vec<_>>());
                let spec = MirrorSpec::new(g.clone(), a.clone(), b.clone(), Variant::Symmetric);
                assert_eq!(group_algebra_central_check(&g, &a, &b), spec.is_valid());
            }
        }
    }

    #[test]
    fn inverted_translate_detected() {
        let g = GroupSpec::parse_abelian("8").unwrap();
        let a = subset(&g, &[0, 1, 3]);
        let b = a.inverse(&g);
        let spec = MirrorSpec::new(g.clone(), a.clone(), b, Variant::Symmetric);
        assert_eq!(prefilter(&spec), PrefilterVerdict::InvertedTranslate);
        // fig1 passes
        assert_eq!(prefilter(&fig1_spec()), PrefilterVerdict::Pass);
    }

    #[test]
    fn abelian_variants_build_identical_tableaux() {
        let g = GroupSpec::parse_abelian("2x9").unwrap();
        let a = subset(&g, &[0, 1, 2]);
        let b = subset(&g, &[9, 10, 14]);
        let sym = MirrorSpec::new(g.clone(), a.clone(), b.clone(), Variant::Symmetric)
            .build_tableau()
            .unwrap();
        let asym = MirrorSpec::new(g.clone(), a, b, Variant::Asymmetric)
            .build_tableau()
            .unwrap();
        assert_eq!(sym, asym);
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec = fig1_spec();
        let s = spec.to_json();
        assert!(s.starts_with("{\"group\":\"2x2x3x3\""));
        let back = MirrorSpec::from_json(&s).unwrap();
        assert_eq!(back.a, spec.a);
        assert_eq!(back.b, spec.b);
        assert_eq!(back.variant, spec.variant);

        let g = s3();
        let spec = MirrorSpec::new(g.clone(), subset(&g, &[0, 1]), subset(&g, &[2]), Variant::Asymmetric);
        let back = MirrorSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back.a, spec.a);
        assert_eq!(back.variant, Variant::Asymmetric);
    }

    #[test]
    fn lift_2bga_small() {
        let g = GroupSpec::parse_abelian("3").unwrap();
        let a = subset(&g, &[0, 1]);
        let b = subset(&g, &[0, 2]);
        let lifted = lift_2bga(&g, &a, &b).unwrap();
        assert_eq!(lifted.n(), 6);
        assert_eq!(lifted.a.len(), 2);
        assert_eq!(lifted.b.len(), 2);
        assert!(lifted.is_valid());
    }
}
