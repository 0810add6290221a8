//! Canonical forms for abelian mirror specs and gauge-orbit equivalence.
//!
//! The canonical form is the lexicographically minimal serialized `(A, B)`
//! pair over all permutation gauge maps (automorphism + the reachable shift
//! pairs), the A↔B swap, and — on exponent-2 groups — GL(2,F2)
//! symmetric-difference mixes. Pairs are ordered with shorter sets first, so
//! `|A| ≤ |B|` in canonical form and a nonempty `A` always contains 0.

use crate::groups::{abelian_automorphism_count, GroupElement, GroupError, GroupSpec, PrimePower, Subset};
use crate::mirror::MirrorSpec;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CanonError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("canonical forms are only defined for abelian groups")]
    NotAbelian,
}

/// Default cap on the number of candidate keys examined in exact mode.
pub const DEFAULT_ORBIT_BUDGET: usize = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub factors: Vec<PrimePower>,
    pub a: Vec<Vec<u16>>,
    pub b: Vec<Vec<u16>>,
    /// false when the orbit exceeded the budget and only a deterministic
    /// subset of gauge maps was tried
    pub exact: bool,
}

impl CanonicalForm {
    pub fn serialized(&self) -> String {
        serde_json::to_string(self).expect("canonical form serializes")
    }
}

/// Candidate key: ((|A|, A), (|B|, B)) over element indices; index order on
/// a mixed-radix encoding equals lexicographic tuple order.
type Key = ((usize, Vec<u32>), (usize, Vec<u32>));

fn key_of(a: &[u32], b: &[u32]) -> Key {
    ((a.len(), a.to_vec()), (b.len(), b.to_vec()))
}

fn shift_sorted(group: &GroupSpec, s: &[u32], by: GroupElement) -> Vec<u32> {
    let mut out: Vec<u32> = s
        .iter()
        .map(|&e| group.mul(GroupElement(e), by).0)
        .collect();
    out.sort_unstable();
    out
}

pub fn canonicalize(spec: &MirrorSpec) -> Result<CanonicalForm, CanonError> {
    canonicalize_with_budget(spec, DEFAULT_ORBIT_BUDGET)
}

pub fn canonicalize_with_budget(
    spec: &MirrorSpec,
    budget: usize,
) -> Result<CanonicalForm, CanonError> {
    let g = &spec.group;
    let factors = g.factors().map_err(|_| CanonError::NotAbelian)?.to_vec();
    let exponent2 = factors.iter().all(|f| f.prime == 2 && f.exponent == 1);
    let (key, exact) = if exponent2 {
        if spec.a.len() + spec.b.len() <= 6 {
            // span reduction: at most 5 nonzero translated points, so either
            // independent (closed form) or dimension ≤ 4 (GL enumeration)
            (canonical_key_exponent2(g, &spec.a, &spec.b), true)
        } else {
            // larger sets: wrap the general minimization over the six mixes
            let mut best: Option<Key> = None;
            let mut exact_all = true;
            for mix in GL2_MIXES {
                let pick = |ta: bool, tb: bool| -> Subset {
                    let mut s = if ta { spec.a.clone() } else { Subset::empty() };
                    if tb {
                        s = s.sym_diff(&spec.b);
                    }
                    s
                };
                let p = pick(mix[0][0], mix[1][0]);
                let q = pick(mix[0][1], mix[1][1]);
                let (k, ex) = canonical_key_general(g, &p, &q, budget)?;
                exact_all &= ex;
                if best.as_ref().map_or(true, |b| k < *b) {
                    best = Some(k);
                }
            }
            (best.unwrap(), exact_all)
        }
    } else {
        canonical_key_general(g, &spec.a, &spec.b, budget)?
    };
    let tuples = |members: &[u32]| -> Vec<Vec<u16>> {
        members
            .iter()
            .map(|&e| g.coords(GroupElement(e)).expect("abelian").to_vec())
            .collect()
    };
    Ok(CanonicalForm {
        factors,
        a: tuples(&(key.0).1),
        b: tuples(&(key.1).1),
        exact,
    })
}

/// General abelian groups: minimize over automorphisms, the A↔B swap, and
/// shift pairs `(s, t)` with `s + t ∈ 2G`.
fn canonical_key_general(
    g: &GroupSpec,
    a: &Subset,
    b: &Subset,
    budget: usize,
) -> Result<(Key, bool), CanonError> {
    let two_g = g.doubles_subgroup()?;
    let aut_count = abelian_automorphism_count(g)?;
    let cost = 2usize
        .saturating_mul(aut_count)
        .saturating_mul((a.len().max(1)).max(b.len().max(1)))
        .saturating_mul(two_g.len());
    let exact = cost <= budget;
    let auts: std::sync::Arc<Vec<crate::groups::Automorphism>> = if exact {
        crate::groups::abelian_automorphisms_cached(g)?
    } else {
        std::sync::Arc::new(vec![crate::groups::Automorphism::identity(g.order())])
    };
    let mut best: Option<Key> = None;
    for (pm, qm) in [(a, b), (b, a)] {
        for phi in auts.iter() {
            let p: Vec<u32> = {
                let mut v: Vec<u32> = pm.members().iter().map(|&e| phi.perm()[e as usize]).collect();
                v.sort_unstable();
                v
            };
            let q: Vec<u32> = {
                let mut v: Vec<u32> = qm.members().iter().map(|&e| phi.perm()[e as usize]).collect();
                v.sort_unstable();
                v
            };
            if p.is_empty() {
                // shift on the empty first component is free, so t is free
                let t_cands: Vec<u32> = if q.is_empty() {
                    vec![g.identity().0]
                } else {
                    q.iter().map(|&e| g.inv(GroupElement(e)).0).collect()
                };
                for t in t_cands {
                    let cand = key_of(&p, &shift_sorted(g, &q, GroupElement(t)));
                    if best.as_ref().map_or(true, |b| cand < *b) {
                        best = Some(cand);
                    }
                }
            } else {
                for &pa in &p {
                    let s = g.inv(GroupElement(pa));
                    let ps = shift_sorted(g, &p, s);
                    for &d in &two_g {
                        let t = g.mul(s, GroupElement(d));
                        let cand = key_of(&ps, &shift_sorted(g, &q, t));
                        if best.as_ref().map_or(true, |b| cand < *b) {
                            best = Some(cand);
                        }
                    }
                }
            }
        }
    }
    Ok((best.expect("at least one candidate"), exact))
}

/// Invertible dim×dim bit matrices, rows as bitmasks; cached per dimension.
/// Only dimensions ≤ 4 occur: a dependent configuration of at most 5
/// nonzero points spans at most 4 dimensions.
const GL_CACHE_MAX_DIM: usize = 4;

fn gl2m_matrices(dim: usize) -> &'static Vec<Vec<u32>> {
    assert!(dim <= GL_CACHE_MAX_DIM, "GL enumeration capped at dim {GL_CACHE_MAX_DIM}");
    static CACHE: OnceLock<Vec<Vec<Vec<u32>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| {
        let mut per_dim = Vec::new();
        for d in 0..=GL_CACHE_MAX_DIM {
            let mut mats = Vec::new();
            let total: u64 = 1 << (d * d);
            for code in 0..total {
                let rows: Vec<u32> = (0..d)
                    .map(|r| ((code >> (r * d)) & ((1 << d) - 1)) as u32)
                    .collect();
                // invertibility by elimination
                let mut m = rows.clone();
                let mut rank = 0;
                for col in 0..d {
                    if let Some(p) = (rank..d).find(|&i| (m[i] >> col) & 1 == 1) {
                        m.swap(rank, p);
                        for i in 0..d {
                            if i != rank && (m[i] >> col) & 1 == 1 {
                                m[i] ^= m[rank];
                            }
                        }
                        rank += 1;
                    }
                }
                if rank == d {
                    mats.push(rows);
                }
            }
            per_dim.push(mats);
        }
        per_dim
    });
    &cache[dim]
}

const GL2_MIXES: [[[bool; 2]; 2]; 6] = [
    [[true, false], [false, true]],
    [[true, true], [false, true]],
    [[true, false], [true, true]],
    [[false, true], [true, false]],
    [[false, true], [true, true]],
    [[true, true], [true, false]],
];

/// Exponent-2 groups (G = Z2^m): minimize over GL(2,F2) mixes (which include
/// the swap), common shifts, and GL(m,2) — reduced to the affine span of the
/// points, where at most 5 independent points force a closed form and
/// dependent configurations have span dimension ≤ 4.
fn canonical_key_exponent2(g: &GroupSpec, a: &Subset, b: &Subset) -> Key {
    let m = g.factors().expect("abelian").len();
    let mut best: Option<Key> = None;
    // try mixes in ascending |P| so later, larger ones prune away early
    let mut mixes = GL2_MIXES;
    let size_of = |mix: &[[bool; 2]; 2]| -> (usize, usize) {
        let pick_len = |ta: bool, tb: bool| match (ta, tb) {
            (false, false) => 0,
            (true, false) => a.len(),
            (false, true) => b.len(),
            (true, true) => a.sym_diff(b).len(),
        };
        (pick_len(mix[0][0], mix[1][0]), pick_len(mix[0][1], mix[1][1]))
    };
    mixes.sort_by_key(size_of);
    for mix in mixes {
        if let Some(b0) = &best {
            // keys start with (|P|, …): strictly larger first components
            // can never beat the current best
            let (lp, lq) = size_of(&mix);
            if (lp, lq) > ((b0.0).0, (b0.1).0) && lp != (b0.0).0 {
                continue;
            }
        }
        let pick = |ta: bool, tb: bool| -> Subset {
            let mut s = if ta { a.clone() } else { Subset::empty() };
            if tb {
                s = s.sym_diff(b);
            }
            s
        };
        let p = pick(mix[0][0], mix[1][0]);
        let q = pick(mix[0][1], mix[1][1]);
        let shift_cands: Vec<u32> = if !p.is_empty() {
            p.members().to_vec()
        } else if !q.is_empty() {
            q.members().to_vec()
        } else {
            vec![0]
        };
        for s in shift_cands {
            // translate so s ↦ 0 (exponent 2: group mul is coordinate xor)
            let se = GroupElement(s);
            let pt: Vec<u32> = p.members().iter().map(|&e| g.mul(GroupElement(e), se).0).collect();
            let qt: Vec<u32> = q.members().iter().map(|&e| g.mul(GroupElement(e), se).0).collect();
            minimize_exponent2_config(m, &pt, &qt, &mut best);
        }
    }
    best.expect("at least one candidate")
}

/// Fold the GL(m, 2)-minimal key of a translated configuration into `best`.
/// Points are element indices read as bit vectors (coordinate j has index
/// weight 2^{m−1−j}).
fn minimize_exponent2_config(m: usize, p: &[u32], q: &[u32], best: &mut Option<Key>) {
    // distinct nonzero points with membership flags
    let mut points: Vec<(u32, bool, bool)> = Vec::new();
    let mut flag = |e: u32, in_p: bool| {
        if let Some(entry) = points.iter_mut().find(|(x, _, _)| *x == e) {
            if in_p {
                entry.1 = true;
            } else {
                entry.2 = true;
            }
        } else {
            points.push((e, in_p, !in_p));
        }
    };
    for &e in p {
        if e != 0 {
            flag(e, true);
        }
    }
    for &e in q {
        if e != 0 {
            flag(e, false);
        }
    }
    let p_has_zero = p.contains(&0);
    let q_has_zero = q.contains(&0);
    // basis of the span
    let mut basis: Vec<u32> = Vec::new();
    for &(e, _, _) in &points {
        let mut v = e;
        for &bvec in &basis {
            let top = 31 - bvec.leading_zeros();
            if (v >> top) & 1 == 1 {
                v ^= bvec;
            }
        }
        if v != 0 {
            basis.push(v);
            basis.sort_by_key(|x| std::cmp::Reverse(*x));
        }
    }
    let dim = basis.len();
    let reassemble = |values: &[(u32, bool, bool)]| -> Key {
        let mut pa: Vec<u32> = values.iter().filter(|(_, ip, _)| *ip).map(|(v, _, _)| *v).collect();
        let mut qa: Vec<u32> = values.iter().filter(|(_, _, iq)| *iq).map(|(v, _, _)| *v).collect();
        if p_has_zero {
            pa.push(0);
        }
        if q_has_zero {
            qa.push(0);
        }
        pa.sort_unstable();
        qa.sort_unstable();
        key_of(&pa, &qa)
    };
    if dim == points.len() {
        // independent points: powers of two, P-flagged first (both-flagged
        // among them first so Q also stays small)
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by_key(|&i| {
            let (_, ip, iq) = points[i];
            (!ip, !(ip && iq))
        });
        let values: Vec<(u32, bool, bool)> = order
            .iter()
            .enumerate()
            .map(|(rank, &i)| (1u32 << rank, points[i].1, points[i].2))
            .collect();
        let cand = reassemble(&values);
        if best.as_ref().map_or(true, |b| cand < *b) {
            *best = Some(cand);
        }
        return;
    }
    // dependent: express points in span coordinates (dim ≤ 4 here since at
    // most 5 nonzero points) and enumerate GL(dim, 2) allocation-free
    let coords_of = |e: u32| -> u32 {
        let mut v = e;
        let mut c = 0u32;
        for (j, &bvec) in basis.iter().enumerate() {
            let top = 31 - bvec.leading_zeros();
            if (v >> top) & 1 == 1 {
                v ^= bvec;
                c |= 1 << j;
            }
        }
        debug_assert_eq!(v, 0);
        c
    };
    let npts = points.len();
    let pt_coords: Vec<u32> = points.iter().map(|&(e, _, _)| coords_of(e)).collect();
    let _ = m;
    // running local best as fixed arrays: (lenP, P…, lenQ, Q…)
    let mut loc_p = [u32::MAX; 8];
    let mut loc_q = [u32::MAX; 8];
    let mut loc_lens = (usize::MAX, usize::MAX);
    let mut have_local = false;
    let mut cp = [0u32; 8];
    let mut cq = [0u32; 8];
    for mat in gl2m_matrices(dim) {
        let mut np = 0usize;
        let mut nq = 0usize;
        if p_has_zero {
            cp[np] = 0;
            np += 1;
        }
        if q_has_zero {
            cq[nq] = 0;
            nq += 1;
        }
        for i in 0..npts {
            let c = pt_coords[i];
            let mut v = 0u32;
            for (r, &row) in mat.iter().enumerate() {
                v |= (((row & c).count_ones() & 1) as u32) << r;
            }
            let (_, ip, iq) = points[i];
            if ip {
                // insertion sort
                let mut k = np;
                while k > 0 && cp[k - 1] > v {
                    cp[k] = cp[k - 1];
                    k -= 1;
                }
                cp[k] = v;
                np += 1;
            }
            if iq {
                let mut k = nq;
                while k > 0 && cq[k - 1] > v {
                    cq[k] = cq[k - 1];
                    k -= 1;
                }
                cq[k] = v;
                nq += 1;
            }
        }
        let cand_lens = (np, nq);
        let better = if !have_local {
            true
        } else {
            ((cand_lens.0, &cp[..np]), (cand_lens.1, &cq[..nq]))
                < ((loc_lens.0, &loc_p[..loc_lens.0]), (loc_lens.1, &loc_q[..loc_lens.1]))
        };
        if better {
            loc_p[..np].copy_from_slice(&cp[..np]);
            loc_q[..nq].copy_from_slice(&cq[..nq]);
            loc_lens = cand_lens;
            have_local = true;
        }
    }
    let cand = key_of(&loc_p[..loc_lens.0], &loc_q[..loc_lens.1]);
    if best.as_ref().map_or(true, |b| cand < *b) {
        *best = Some(cand);
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Equivalence {
    Yes,
    No,
    Unknown,
}

/// Gauge equivalence: exact via canonical forms for abelian specs; a
/// fingerprint mismatch is a definite no, matching fingerprints without
/// canonical equality stay unknown.
pub fn gauge_equivalent(s1: &MirrorSpec, s2: &MirrorSpec) -> Equivalence {
    if s1.group.is_abelian() && s2.group.is_abelian() {
        if s1.group.factors().unwrap() != s2.group.factors().unwrap() {
            return Equivalence::No;
        }
        let c1 = canonicalize(s1).expect("abelian");
        let c2 = canonicalize(s2).expect("abelian");
        if c1.exact && c2.exact {
            return if c1 == c2 { Equivalence::Yes } else { Equivalence::No };
        }
        if c1 == c2 {
            return Equivalence::Yes;
        }
    }
    if s1.n() != s2.n() {
        return Equivalence::No;
    }
    let f1 = crate::catalog::fingerprint_spec(s1);
    let f2 = crate::catalog::fingerprint_spec(s2);
    match (f1, f2) {
        (Ok(a), Ok(b)) if a != b => Equivalence::No,
        _ => Equivalence::Unknown,
    }
}

/// Sample a random legal gauge map for tests and orbit checks.
pub fn random_gauge_map(
    spec: &MirrorSpec,
    rng: &mut impl rand::Rng,
) -> crate::cssform::GaugeMap {
    use rand::seq::SliceRandom;
    let g = &spec.group;
    let auts = crate::groups::abelian_automorphisms_cached(g).expect("abelian spec");
    let phi = auts.as_slice().choose(rng).unwrap().clone();
    let u = GroupElement(rng.gen_range(0..g.order()) as u32);
    let v = GroupElement(rng.gen_range(0..g.order()) as u32);
    let exponent2 = g
        .factors()
        .map(|fs| fs.iter().all(|f| f.prime == 2 && f.exponent == 1))
        .unwrap_or(false);
    let gl2_mix = if exponent2 && rng.gen_bool(0.5) {
        Some(GL2_MIXES[rng.gen_range(0..GL2_MIXES.len())])
    } else {
        None
    };
    crate::cssform::GaugeMap {
        phi,
        u,
        v,
        swap_ab: rng.gen_bool(0.5),
        gl2_mix,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cssform::apply_gauge;
    use crate::mirror::Variant;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

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

    #[test]
    fn canonicalize_idempotent() {
        let s = spec_from(
            "2x9",
            &[&[0, 0], &[0, 1], &[0, 2]],
            &[&[1, 0], &[1, 1], &[1, 5]],
        );
        let c1 = canonicalize(&s).unwrap();
        assert!(c1.exact);
        // rebuild a spec from the canonical form and canonicalize again
        let g = &s.group;
        let subset = |ts: &[Vec<u16>]| {
            Subset::new(
                g,
                ts.iter().map(|t| g.element_from_coords(t).unwrap().0).collect(),
            )
            .unwrap()
        };
        let s2 = MirrorSpec::new(g.clone(), subset(&c1.a), subset(&c1.b), Variant::Symmetric);
        let c2 = canonicalize(&s2).unwrap();
        assert_eq!(c1, c2);
        // canonical A contains zero
        assert_eq!(c1.a[0], vec![0, 0]);
        assert!(c1.a.len() <= c1.b.len());
    }

    #[test]
    fn orbit_elements_share_canonical_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let specs = [
            spec_from("2x9", &[&[0, 0], &[0, 1], &[0, 2]], &[&[1, 0], &[1, 1], &[1, 5]]),
            spec_from("16", &[&[0], &[4]], &[&[1], &[3], &[5], &[11]]),
            spec_from(
                "2x2x3x3",
                &[&[0, 0, 0, 0], &[0, 1, 0, 1], &[1, 0, 0, 2]],
                &[&[0, 0, 0, 0], &[0, 1, 1, 0], &[1, 1, 2, 0]],
            ),
        ];
        for s in &specs {
            let c0 = canonicalize(s).unwrap();
            for _ in 0..25 {
                let map = random_gauge_map(s, &mut rng);
                let s2 = apply_gauge(s, &map).unwrap();
                let c2 = canonicalize(&s2).unwrap();
                assert_eq!(c0, c2, "gauge image changed the canonical form");
            }
        }
    }

    #[test]
    fn exponent2_orbit_with_mixes() {
        let g = GroupSpec::parse_abelian("2x2x2x2").unwrap();
        let a = Subset::new(&g, vec![0, 1, 6]).unwrap();
        let b = Subset::new(&g, vec![2, 4, 9]).unwrap();
        let s = MirrorSpec::new(g.clone(), a, b, Variant::Symmetric);
        let c0 = canonicalize(&s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let map = random_gauge_map(&s, &mut rng);
            let s2 = apply_gauge(&s, &map).unwrap();
            assert_eq!(canonicalize(&s2).unwrap(), c0);
        }
    }

    #[test]
    fn swap_in_orbit() {
        let s = spec_from("2x9", &[&[0, 0], &[0, 1]], &[&[1, 0], &[1, 1], &[1, 5]]);
        let swapped = MirrorSpec::new(
            s.group.clone(),
            s.b.clone(),
            s.a.clone(),
            Variant::Symmetric,
        );
        assert_eq!(canonicalize(&s).unwrap(), canonicalize(&swapped).unwrap());
    }

    #[test]
    fn gauge_equivalent_basic() {
        let s = spec_from("16", &[&[0], &[4]], &[&[1], &[3], &[5], &[11]]);
        assert_eq!(gauge_equivalent(&s, &s), Equivalence::Yes);
        let other = spec_from(
            "2x9",
            &[&[0, 0], &[0, 1], &[0, 2]],
            &[&[1, 0], &[1, 1], &[1, 5]],
        );
        assert_eq!(gauge_equivalent(&s, &other), Equivalence::No);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let map = random_gauge_map(&s, &mut rng);
        let image = apply_gauge(&s, &map).unwrap();
        assert_eq!(gauge_equivalent(&s, &image), Equivalence::Yes);
    }
}
