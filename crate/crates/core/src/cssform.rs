//! Deciding when a mirror code is equivalently CSS.
//!
//! Three routes: the general local-Clifford 2-colouring algorithm, the
//! Hadamard-only coset-constraint-graph test, and an abelian fast path via
//! index-2 subgroups. Also the executable gauge transformations on specs.

use crate::groups::{Automorphism, GroupElement, GroupError, GroupSpec, Subset};
use crate::mirror::{MirrorSpec, StabilizerTableau, Variant};
use crate::pauli::{PauliKind, PauliString, SignedRref};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CssFormError {
    #[error("v must lie in the center of the group for symmetric specs")]
    CenterViolation,
    #[error("GL(2,F2) mixes need every group element to have order ≤ 2")]
    OrderViolation,
    #[error("mix matrix is singular")]
    SingularMix,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A 2-colouring of stabilizers plus a per-qubit injective label map that
/// witnesses local-Clifford CSS equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssColoring {
    /// colour of each stabilizer (indexed by group element)
    pub tau: Vec<u8>,
    /// per qubit: (ℓ_q(0), ℓ_q(1)), the Paulis mapped to Z and X
    pub local_basis: Vec<(PauliKind, PauliKind)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotCssWitness {
    /// some qubit sees three distinct Paulis across stabilizers
    ThreePauliQubit(usize),
    /// an odd red cycle in the merged constraint graph (stabilizer indices)
    OddCycle(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CssVerdict {
    EquivCss(CssColoring),
    NotCss(NotCssWitness),
}

/// Union-find with path halving.
struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Per-qubit stabilizer sets, indexed by the Pauli placed on the qubit.
fn qubit_pauli_sets(spec: &MirrorSpec, q: GroupElement) -> [Vec<u32>; 3] {
    let g = &spec.group;
    // stabilizers placing Z on q: g ∈ A⁻¹q; placing X: q⁻¹B (symmetric)
    // or Bq⁻¹ (asymmetric); Y = both
    let z_set = spec.a.inverse(g).mul_right(g, q);
    let x_set = match spec.variant {
        Variant::Symmetric => spec.b.mul_left(g, g.inv(q)),
        Variant::Asymmetric => spec.b.mul_right(g, g.inv(q)),
    };
    let mut z = Vec::new();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for &e in z_set.members() {
        if x_set.contains(e) {
            y.push(e);
        } else {
            z.push(e);
        }
    }
    for &e in x_set.members() {
        if !z_set.contains(e) {
            x.push(e);
        }
    }
    [z, x, y]
}

/// The 4-step 2-colouring algorithm deciding local-Clifford CSS equivalence.
///
/// Step (1) rejects any qubit carrying three Pauli kinds; step (2) collects
/// same-type (black) and opposite-type (red) constraints; step (3) merges
/// black components with union-find; step (4) 2-colours the red quotient
/// graph by BFS, accepting iff it is bipartite.
pub fn is_equiv_css(spec: &MirrorSpec) -> CssVerdict {
    let n = spec.n();
    let kinds = [PauliKind::Z, PauliKind::X, PauliKind::Y];
    let mut dsu = Dsu::new(n);
    // (qubit, kind index) of each set participating in a red edge
    let mut per_qubit: Vec<[Vec<u32>; 3]> = Vec::with_capacity(n);
    for qi in 0..n {
        let sets = qubit_pauli_sets(spec, GroupElement(qi as u32));
        let nonempty = sets.iter().filter(|s| !s.is_empty()).count();
        if nonempty == 3 {
            return CssVerdict::NotCss(NotCssWitness::ThreePauliQubit(qi));
        }
        // black edges: same Pauli on the same qubit
        for s in &sets {
            for w in s.windows(2) {
                dsu.union(w[0] as usize, w[1] as usize);
            }
        }
        per_qubit.push(sets);
    }
    // red edges between merged roots
    let mut red_edges: Vec<(usize, usize, usize)> = Vec::new(); // (root a, root b, qubit)
    for (qi, sets) in per_qubit.iter().enumerate() {
        let present: Vec<usize> = (0..3).filter(|&k| !sets[k].is_empty()).collect();
        if present.len() == 2 {
            let a = dsu.find(sets[present[0]][0] as usize);
            let b = dsu.find(sets[present[1]][0] as usize);
            red_edges.push((a, b, qi));
        }
    }
    // BFS 2-colouring of the quotient graph
    let mut colour: Vec<Option<u8>> = vec![None; n];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut parent: Vec<usize> = (0..n).collect();
    for &(a, b, _) in &red_edges {
        if a == b {
            // red self-loop: odd cycle of length 1 on the merged node
            return CssVerdict::NotCss(NotCssWitness::OddCycle(vec![a]));
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    for start in 0..n {
        if dsu.find(start) != start || colour[start].is_some() {
            continue;
        }
        colour[start] = Some(0);
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let cu = colour[u].unwrap();
            for &v in &adj[u] {
                match colour[v] {
                    None => {
                        colour[v] = Some(1 - cu);
                        parent[v] = u;
                        queue.push_back(v);
                    }
                    Some(cv) if cv == cu => {
                        // odd cycle: walk both nodes to the root
                        let mut path_u = vec![u];
                        let mut x = u;
                        while parent[x] != x {
                            x = parent[x];
                            path_u.push(x);
                        }
                        let mut path_v = vec![v];
                        let mut y = v;
                        while parent[y] != y {
                            y = parent[y];
                            path_v.push(y);
                        }
                        path_u.extend(path_v);
                        return CssVerdict::NotCss(NotCssWitness::OddCycle(path_u));
                    }
                    _ => {}
                }
            }
        }
    }
    // assemble τ and the per-qubit labels
    let mut tau = vec![0u8; n];
    for s in 0..n {
        tau[s] = colour[dsu.find(s)].unwrap_or(0);
    }
    let mut local_basis = Vec::with_capacity(n);
    for (qi, sets) in per_qubit.iter().enumerate() {
        let mut l0 = None;
        let mut l1 = None;
        for (k, s) in sets.iter().enumerate() {
            if let Some(&rep) = s.first() {
                let kind = kinds[k];
                match tau[rep as usize] {
                    0 => l0 = Some(kind),
                    _ => l1 = Some(kind),
                }
            }
        }
        let _ = qi;
        let basis = match (l0, l1) {
            (Some(a), Some(b)) => (a, b),
            (Some(a), None) => (a, if a == PauliKind::X { PauliKind::Z } else { PauliKind::X }),
            (None, Some(b)) => (if b == PauliKind::Z { PauliKind::X } else { PauliKind::Z }, b),
            (None, None) => (PauliKind::Z, PauliKind::X),
        };
        local_basis.push(basis);
    }
    CssVerdict::EquivCss(CssColoring { tau, local_basis })
}

/// Qubit subset whose Hadamard transform makes every row pure-Z or pure-X.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HadamardWitness {
    pub t: Subset,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HadamardVerdict {
    Witness(HadamardWitness),
    NotHadamardCss,
}

/// Subgroup generated by `gens`, via closure.
fn subgroup_closure(group: &GroupSpec, gens: &[u32]) -> Vec<u32> {
    let n = group.order();
    let mut in_sub = vec![false; n];
    let e = group.identity().0;
    in_sub[e as usize] = true;
    let mut frontier = vec![e];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            for prod in [
                group.mul(GroupElement(x), GroupElement(g)),
                group.mul(GroupElement(g), GroupElement(x)),
            ] {
                if !in_sub[prod.index()] {
                    in_sub[prod.index()] = true;
                    frontier.push(prod.0);
                }
            }
        }
    }
    (0..n as u32).filter(|&x| in_sub[x as usize]).collect()
}

/// `AA⁻¹` generator list.
fn difference_generators(group: &GroupSpec, s: &Subset, right_inverse: bool) -> Vec<u32> {
    let mut out = Vec::new();
    for a in s.iter() {
        for b in s.iter() {
            let v = if right_inverse {
                group.mul(a, group.inv(b)) // a b⁻¹ ∈ AA⁻¹
            } else {
                group.mul(group.inv(a), b) // a⁻¹ b ∈ A⁻¹A
            };
            out.push(v.0);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Partition of G into right cosets `Kg`, as (coset id per element, count).
fn right_cosets(group: &GroupSpec, k_members: &[u32]) -> (Vec<u32>, usize) {
    let n = group.order();
    let mut id = vec![u32::MAX; n];
    let mut count = 0;
    for g in 0..n as u32 {
        if id[g as usize] != u32::MAX {
            continue;
        }
        for &k in k_members {
            let e = group.mul(GroupElement(k), GroupElement(g));
            id[e.index()] = count;
        }
        count += 1;
    }
    (id, count as usize)
}

/// Partition of G into double cosets `K_L g K_R` by orbit flooding.
fn double_cosets(group: &GroupSpec, kl: &[u32], kr: &[u32]) -> (Vec<u32>, usize) {
    let n = group.order();
    let mut id = vec![u32::MAX; n];
    let mut count = 0;
    for g in 0..n as u32 {
        if id[g as usize] != u32::MAX {
            continue;
        }
        let mut frontier = vec![g];
        id[g as usize] = count;
        while let Some(x) = frontier.pop() {
            for &l in kl {
                let e = group.mul(GroupElement(l), GroupElement(x));
                if id[e.index()] == u32::MAX {
                    id[e.index()] = count;
                    frontier.push(e.0);
                }
            }
            for &r in kr {
                let e = group.mul(GroupElement(x), GroupElement(r));
                if id[e.index()] == u32::MAX {
                    id[e.index()] = count;
                    frontier.push(e.0);
                }
            }
        }
        count += 1;
    }
    (id, count as usize)
}

/// Hadamard-CSS test via bipartiteness of the (double) coset constraint
/// graph. The returned witness is verified by transforming the tableau.
pub fn is_hadamard_css(spec: &MirrorSpec) -> HadamardVerdict {
    let g = &spec.group;
    let n = g.order();
    if spec.a.is_empty() || spec.b.is_empty() {
        // already CSS: all rows pure X or pure Z
        return HadamardVerdict::Witness(HadamardWitness { t: Subset::empty() });
    }
    let (coset_id, m) = match spec.variant {
        Variant::Symmetric => {
            let mut gens = difference_generators(g, &spec.a, true);
            gens.extend(difference_generators(g, &spec.b, true));
            let k = subgroup_closure(g, &gens);
            right_cosets(g, &k)
        }
        Variant::Asymmetric => {
            let kl = subgroup_closure(g, &difference_generators(g, &spec.a, true));
            let kr = subgroup_closure(g, &difference_generators(g, &spec.b, false));
            double_cosets(g, &kl, &kr)
        }
    };
    // one edge per group element
    let a0 = GroupElement(spec.a.members()[0]);
    let b0 = GroupElement(spec.b.members()[0]);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    for x in g.elements() {
        let left = coset_id[g.mul(a0, x).index()] as usize;
        let right = match spec.variant {
            Variant::Symmetric => coset_id[g.mul(b0, g.inv(x)).index()] as usize,
            Variant::Asymmetric => coset_id[g.mul(g.inv(x), b0).index()] as usize,
        };
        adj[left].push(right);
        adj[right].push(left);
    }
    // bipartition
    let mut colour: Vec<Option<u8>> = vec![None; m];
    for start in 0..m {
        if colour[start].is_some() {
            continue;
        }
        colour[start] = Some(0);
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let cu = colour[u].unwrap();
            for &v in &adj[u] {
                match colour[v] {
                    None => {
                        colour[v] = Some(1 - cu);
                        queue.push_back(v);
                    }
                    Some(cv) if cv == cu => return HadamardVerdict::NotHadamardCss,
                    _ => {}
                }
            }
        }
    }
    let t_members: Vec<u32> = (0..n as u32)
        .filter(|&x| colour[coset_id[x as usize] as usize] == Some(1))
        .collect();
    let witness = HadamardWitness {
        t: Subset::from_sorted_unchecked(t_members),
    };
    debug_assert!(verify_hadamard_witness(spec, &witness));
    HadamardVerdict::Witness(witness)
}

/// Check that Hadamarding `T` really produces a CSS tableau.
pub fn verify_hadamard_witness(spec: &MirrorSpec, w: &HadamardWitness) -> bool {
    let rows = spec.build_rows_unchecked();
    let transformed = apply_hadamard_masks(&rows, &w.t);
    transformed
        .iter()
        .all(|r| r.z_mask.is_zero() || r.x_mask.is_zero())
}

/// Swap z/x bits on the qubits in `t` (sign-free mask transform).
pub fn apply_hadamard_masks(rows: &[PauliString], t: &Subset) -> Vec<PauliString> {
    rows.iter()
        .map(|r| {
            let mut out = r.clone();
            for q in t.iter() {
                let qi = q.index();
                let z = out.z_mask.get(qi);
                let x = out.x_mask.get(qi);
                out.z_mask.set(qi, x);
                out.x_mask.set(qi, z);
            }
            out.sign = false;
            out
        })
        .collect()
}

/// Apply the local Clifford reconstructed from a colouring: per qubit,
/// ℓ_q(0) ↦ Z and ℓ_q(1) ↦ X (the third kind goes to Y). Signs are
/// recomputed rather than tracked.
pub fn apply_coloring_masks(rows: &[PauliString], c: &CssColoring) -> Vec<PauliString> {
    let n = c.local_basis.len();
    rows.iter()
        .map(|r| {
            let mut out = PauliString::identity(n);
            for q in 0..n {
                let k = r.kind(q);
                if k == PauliKind::I {
                    continue;
                }
                let (l0, l1) = c.local_basis[q];
                let image = if k == l0 {
                    PauliKind::Z
                } else if k == l1 {
                    PauliKind::X
                } else {
                    PauliKind::Y
                };
                out.set_kind(q, image);
            }
            out
        })
        .collect()
}

/// Re-apply the deterministic sign convention to transformed (unsigned)
/// rows, so the generated group avoids −I.
pub fn resign_rows(n: usize, rows: &[PauliString]) -> StabilizerTableau {
    let mut out = rows.to_vec();
    let mut gen = SignedRref::new(n);
    for row in out.iter_mut() {
        row.sign = false;
        let red = gen.reduce(row);
        if red.is_identity() {
            if red.sign {
                row.sign = true;
            }
        } else {
            gen.insert(row.clone());
        }
    }
    StabilizerTableau { n, rows: out }
}

/// Abelian fast path: Hadamard-CSS iff some homomorphism φ: G → Z2 has
/// φ(A) = {μ} and φ(B) = {1−μ}; the witness Hadamards ker φ.
pub fn hadamard_css_abelian(spec: &MirrorSpec) -> Result<HadamardVerdict, CssFormError> {
    let g = &spec.group;
    let factors = g.factors()?; // NotAbelian for Cayley groups
    if spec.a.is_empty() || spec.b.is_empty() {
        return Ok(HadamardVerdict::Witness(HadamardWitness { t: Subset::empty() }));
    }
    let even: Vec<usize> = (0..factors.len()).filter(|&i| factors[i].prime == 2).collect();
    if even.is_empty() {
        // odd order: no index-2 subgroup
        return Ok(HadamardVerdict::NotHadamardCss);
    }
    // φ ranges over nonzero choices of parity masks on the even factors
    for mask in 1u64..(1 << even.len()) {
        let phi = |e: GroupElement| -> u8 {
            let coords = g.coords(e).expect("abelian");
            let mut acc = 0u16;
            for (bit, &fi) in even.iter().enumerate() {
                if (mask >> bit) & 1 == 1 {
                    acc ^= coords[fi] & 1;
                }
            }
            acc as u8
        };
        let mu = phi(spec.a.iter().next().unwrap());
        if spec.a.iter().any(|a| phi(a) != mu) {
            continue;
        }
        if spec.b.iter().any(|b| phi(b) != 1 - mu) {
            continue;
        }
        let t_members: Vec<u32> = g.elements().filter(|&e| phi(e) == 0).map(|e| e.0).collect();
        let witness = HadamardWitness {
            t: Subset::from_sorted_unchecked(t_members),
        };
        debug_assert!(verify_hadamard_witness(spec, &witness));
        return Ok(HadamardVerdict::Witness(witness));
    }
    Ok(HadamardVerdict::NotHadamardCss)
}

/// A gauge transformation on specs: `(G, A, B) ↦ (G, uφ(A)v, uφ(B)v⁻¹)` for
/// symmetric codes (`v⁻¹φ(B)u` for asymmetric), optionally followed by the
/// A↔B swap (the Hadamard LC symmetry) and, on exponent-2 groups, a
/// GL(2,F2) symmetric-difference mix.
#[derive(Clone, Debug)]
pub struct GaugeMap {
    pub phi: Automorphism,
    pub u: GroupElement,
    pub v: GroupElement,
    pub swap_ab: bool,
    /// row-major [[a, b], [c, d]]: A' = aA Δ cB, B' = bA Δ dB
    pub gl2_mix: Option<[[bool; 2]; 2]>,
}

impl GaugeMap {
    pub fn identity(group: &GroupSpec) -> GaugeMap {
        GaugeMap {
            phi: Automorphism::identity(group.order()),
            u: group.identity(),
            v: group.identity(),
            swap_ab: false,
            gl2_mix: None,
        }
    }
}

fn all_orders_at_most_2(group: &GroupSpec) -> bool {
    group.elements().all(|e| group.mul(e, e) == group.identity())
}

pub fn apply_gauge(spec: &MirrorSpec, map: &GaugeMap) -> Result<MirrorSpec, CssFormError> {
    let g = &spec.group;
    let center = g.center();
    match spec.variant {
        Variant::Symmetric => {
            if !center.contains(map.v.0) {
                return Err(CssFormError::CenterViolation);
            }
        }
        Variant::Asymmetric => {
            if !center.contains(map.u.0) {
                return Err(CssFormError::CenterViolation);
            }
        }
    }
    let phi_a = map.phi.apply_subset(&spec.a);
    let phi_b = map.phi.apply_subset(&spec.b);
    let (mut a, mut b) = match spec.variant {
        Variant::Symmetric => (
            phi_a.mul_left(g, map.u).mul_right(g, map.v),
            phi_b.mul_left(g, map.u).mul_right(g, g.inv(map.v)),
        ),
        Variant::Asymmetric => (
            phi_a.mul_left(g, map.u).mul_right(g, map.v),
            phi_b.mul_left(g, g.inv(map.v)).mul_right(g, map.u),
        ),
    };
    if map.swap_ab {
        std::mem::swap(&mut a, &mut b);
    }
    if let Some(m) = map.gl2_mix {
        if !all_orders_at_most_2(g) {
            return Err(CssFormError::OrderViolation);
        }
        let det = (m[0][0] & m[1][1]) ^ (m[0][1] & m[1][0]);
        if !det {
            return Err(CssFormError::SingularMix);
        }
        let pick = |take_a: bool, take_b: bool| -> Subset {
            let mut s = if take_a { a.clone() } else { Subset::empty() };
            if take_b {
                s = s.sym_diff(&b);
            }
            s
        };
        let new_a = pick(m[0][0], m[1][0]);
        let new_b = pick(m[0][1], m[1][1]);
        a = new_a;
        b = new_b;
    }
    Ok(MirrorSpec::new(g.clone(), a, b, spec.variant))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codeparams::{distance_exact, logical_dimension, DistanceOutcome};
    use crate::mirror::tests::fig1_spec;

    fn spec_from(group: &str, a: &[&[u16]], b: &[&[u16]]) -> MirrorSpec {
        let g = GroupSpec::parse_abelian(group).unwrap();
        let to = |pts: &[&[u16]]| {
            Subset::new(
                &g,
                pts.iter().map(|p| g.element_from_coords(p).unwrap().0).collect(),
            )
            .unwrap()
        };
        MirrorSpec::new(g.clone(), to(a), to(b), Variant::Symmetric)
    }

    fn spec_18_4_4() -> MirrorSpec {
        spec_from(
            "2x9",
            &[&[0, 0], &[0, 1], &[0, 2]],
            &[&[1, 0], &[1, 1], &[1, 5]],
        )
    }

    fn spec_36_6_6() -> MirrorSpec {
        spec_from(
            "2x2x3x3",
            &[&[0, 0, 0, 0], &[0, 1, 0, 1], &[1, 0, 0, 2]],
            &[&[0, 0, 0, 0], &[0, 1, 1, 0], &[1, 1, 2, 0]],
        )
    }

    #[test]
    fn empty_b_is_already_css() {
        let g = GroupSpec::parse_abelian("5").unwrap();
        let s = MirrorSpec::new(
            g.clone(),
            Subset::new(&g, vec![0, 1]).unwrap(),
            Subset::empty(),
            Variant::Symmetric,
        );
        match is_equiv_css(&s) {
            CssVerdict::EquivCss(c) => {
                assert!(c.tau.iter().all(|&t| t == 0));
                assert!(c.local_basis.iter().all(|&(l0, _)| l0 == PauliKind::Z));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(is_hadamard_css(&s), HadamardVerdict::Witness(_)));
    }

    #[test]
    fn table_rows_hadamard_flags() {
        // [[18,4,4]] says Yes; the projection onto the Z2 factor works
        match is_hadamard_css(&spec_18_4_4()) {
            HadamardVerdict::Witness(w) => {
                assert!(verify_hadamard_witness(&spec_18_4_4(), &w));
            }
            other => panic!("expected witness, got {other:?}"),
        }
        // [[36,6,6]] says No
        assert!(matches!(
            is_hadamard_css(&spec_36_6_6()),
            HadamardVerdict::NotHadamardCss
        ));
        // and it is not even equivalently CSS
        assert!(matches!(is_equiv_css(&spec_36_6_6()), CssVerdict::NotCss(_)));
    }

    #[test]
    fn abelian_fast_path_agrees() {
        for s in [spec_18_4_4(), spec_36_6_6(), fig1_spec()] {
            let general = matches!(is_hadamard_css(&s), HadamardVerdict::Witness(_));
            let fast = matches!(
                hadamard_css_abelian(&s).unwrap(),
                HadamardVerdict::Witness(_)
            );
            assert_eq!(general, fast);
        }
        // odd order → never Hadamard-CSS (with both subsets nonempty)
        let g = GroupSpec::parse_abelian("3x5").unwrap();
        let s = MirrorSpec::new(
            g.clone(),
            Subset::new(&g, vec![0, 1]).unwrap(),
            Subset::new(&g, vec![2, 7]).unwrap(),
            Variant::Symmetric,
        );
        assert!(matches!(
            hadamard_css_abelian(&s).unwrap(),
            HadamardVerdict::NotHadamardCss
        ));
    }

    #[test]
    fn coloring_reconstruction_purifies_rows() {
        let s = spec_18_4_4();
        if let CssVerdict::EquivCss(c) = is_equiv_css(&s) {
            let rows = s.build_rows_unchecked();
            let transformed = apply_coloring_masks(&rows, &c);
            for (i, r) in transformed.iter().enumerate() {
                assert!(
                    r.z_mask.is_zero() || r.x_mask.is_zero(),
                    "row {i} not purified"
                );
                // colour matches the surviving component
                if !r.z_mask.is_zero() {
                    assert_eq!(c.tau[i], 0);
                } else if !r.x_mask.is_zero() {
                    assert_eq!(c.tau[i], 1);
                }
            }
        } else {
            panic!("[[18,4,4]] is Hadamard-CSS, so it must be equivalently CSS");
        }
    }

    #[test]
    fn equiv_css_implied_by_hadamard() {
        for s in [spec_18_4_4(), fig1_spec()] {
            if matches!(is_hadamard_css(&s), HadamardVerdict::Witness(_)) {
                assert!(matches!(is_equiv_css(&s), CssVerdict::EquivCss(_)));
            }
        }
    }

    #[test]
    fn gauge_identity_and_shift_preserve_params() {
        let s = spec_18_4_4();
        let t = s.build_tableau().unwrap();
        let (n, k) = (t.n, logical_dimension(&t));
        let d = match distance_exact(&t, 4).unwrap() {
            DistanceOutcome::Exact { d, .. } => d,
            other => panic!("{other:?}"),
        };
        let id = GaugeMap::identity(&s.group);
        assert_eq!(apply_gauge(&s, &id).unwrap(), s);

        let shift = GaugeMap {
            u: GroupElement(7),
            v: GroupElement(3),
            ..GaugeMap::identity(&s.group)
        };
        let s2 = apply_gauge(&s, &shift).unwrap();
        let t2 = s2.build_tableau().unwrap();
        assert_eq!(t2.n, n);
        assert_eq!(logical_dimension(&t2), k);
        match distance_exact(&t2, 4).unwrap() {
            DistanceOutcome::Exact { d: d2, .. } => assert_eq!(d2, d),
            other => panic!("{other:?}"),
        }
        assert_eq!(t2.row_weight_multiset(), t.row_weight_multiset());
    }

    #[test]
    fn swap_ab_matches_global_hadamard() {
        let s = fig1_spec();
        let swap = GaugeMap {
            swap_ab: true,
            ..GaugeMap::identity(&s.group)
        };
        let s2 = apply_gauge(&s, &swap).unwrap();
        // Hadamard on every qubit swaps Z and X parts; the swapped spec's
        // rows must equal the Hadamard-conjugated originals as a set
        let all = Subset::full(s.n());
        let h_rows = apply_hadamard_masks(&s.build_rows_unchecked(), &all);
        let mut set1: Vec<_> = h_rows.iter().map(|r| r.symplectic_row()).collect();
        let mut set2: Vec<_> = s2
            .build_rows_unchecked()
            .iter()
            .map(|r| r.symplectic_row())
            .collect();
        set1.sort_by(|a, b| a.words().cmp(b.words()));
        set2.sort_by(|a, b| a.words().cmp(b.words()));
        assert_eq!(set1, set2);
    }

    #[test]
    fn gl2_mix_guards() {
        let s = spec_18_4_4(); // exponent 18 > 2
        let mix = GaugeMap {
            gl2_mix: Some([[true, false], [false, true]]),
            ..GaugeMap::identity(&s.group)
        };
        assert_eq!(apply_gauge(&s, &mix).unwrap_err(), CssFormError::OrderViolation);

        let g = GroupSpec::parse_abelian("2x2").unwrap();
        let s = MirrorSpec::new(
            g.clone(),
            Subset::new(&g, vec![0, 1]).unwrap(),
            Subset::new(&g, vec![2]).unwrap(),
            Variant::Symmetric,
        );
        let singular = GaugeMap {
            gl2_mix: Some([[true, true], [true, true]]),
            ..GaugeMap::identity(&g)
        };
        assert_eq!(apply_gauge(&s, &singular).unwrap_err(), CssFormError::SingularMix);
        let ok = GaugeMap {
            gl2_mix: Some([[true, true], [false, true]]),
            ..GaugeMap::identity(&g)
        };
        let s2 = apply_gauge(&s, &ok).unwrap();
        // A' = A, B' = A Δ B
        assert_eq!(s2.a, s.a);
        assert_eq!(s2.b, s.a.sym_diff(&s.b));
    }
}
