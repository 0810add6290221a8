//! Code-parameter computation: logical dimension, exact and estimated
//! distance, centralizer membership, weight enumerators.

use crate::bits::{BitVec, Rref};
use crate::mirror::{MirrorSpec, StabilizerTableau, Variant};
use crate::pauli::{symplectic_matrix, PauliKind, PauliString};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeParamsError {
    #[error("code has no logical qubits (k = 0)")]
    ZeroLogicals,
    #[error("full weight enumerator needs n−k ≤ {max}, got {got}")]
    TooLarge { got: usize, max: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("commutation routes disagree (implementation bug): set route {set_route}, symplectic route {symplectic_route}")]
    InternalMismatch { set_route: bool, symplectic_route: bool },
}

/// Distance knowledge with the provenance needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Distance {
    Exact { d: usize, w_max: usize },
    Estimated { at_most: usize, trials: usize, seed: u64 },
    AboveSearched { w_max: usize },
    Unknown,
}

impl Distance {
    pub fn value(&self) -> Option<usize> {
        match self {
            Distance::Exact { d, .. } => Some(*d),
            Distance::Estimated { at_most, .. } => Some(*at_most),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Distance::Exact { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub d: Distance,
    pub max_check_weight: usize,
    pub max_qubit_degree: usize,
}

/// k = n − rank of the n×2n symplectic matrix.
pub fn logical_dimension(t: &StabilizerTableau) -> usize {
    let m = symplectic_matrix(&t.rows, t.n);
    t.n - crate::bits::rank_f2(&m)
}

/// Syndrome of `p` against every tableau row (bit i set iff row i
/// anticommutes with p).
pub fn syndrome(t: &StabilizerTableau, p: &PauliString) -> BitVec {
    let mut s = BitVec::zeros(t.rows.len());
    for (i, row) in t.rows.iter().enumerate() {
        if row.anticommutes_with(p) {
            s.set(i, true);
        }
    }
    s
}

/// Check whether `p` commutes with every stabilizer of the spec, evaluated
/// both by the symmetric-difference identity on subsets and by n symplectic
/// products. The two routes must agree.
pub fn commutes_with_all(spec: &MirrorSpec, p: &PauliString) -> Result<bool, CodeParamsError> {
    if p.num_qubits() != spec.n() {
        return Err(CodeParamsError::LengthMismatch {
            expected: spec.n(),
            got: p.num_qubits(),
        });
    }
    let g = &spec.group;
    let n = g.order();
    // set route: Δ_{u∈S} u⁻¹B  ==  Δ_{u∈T} A⁻¹u   (symmetric)
    //            Δ_{u∈S} Bu⁻¹  ==  Δ_{u∈T} A⁻¹u   (asymmetric)
    let mut left = vec![false; n];
    for u in p.z_mask.iter_ones() {
        let ue = g.element(u).expect("mask within range");
        let ui = g.inv(ue);
        for b in spec.b.iter() {
            let v = match spec.variant {
                Variant::Symmetric => g.mul(ui, b),
                Variant::Asymmetric => g.mul(b, ui),
            };
            left[v.index()] ^= true;
        }
    }
    let mut right = vec![false; n];
    for u in p.x_mask.iter_ones() {
        let ue = g.element(u).expect("mask within range");
        for a in spec.a.iter() {
            let v = g.mul(g.inv(a), ue);
            right[v.index()] ^= true;
        }
    }
    let set_route = left == right;
    // symplectic route against the built rows (unsigned masks suffice)
    let rows = spec.build_rows_unchecked();
    let symplectic_route = rows.iter().all(|r| !r.anticommutes_with(p));
    if set_route != symplectic_route {
        return Err(CodeParamsError::InternalMismatch { set_route, symplectic_route });
    }
    Ok(set_route)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DistanceOutcome {
    Exact { d: usize, witness: PauliString },
    Above { w_max: usize },
}

/// Internal flat storage for the meet-in-the-middle enumeration.
struct MitmArena {
    n: usize,
    mask_words: usize,
    syn_words: usize,
    /// per entry: z words, then x words
    masks: Vec<u64>,
    syndromes: Vec<u64>,
    /// map from syndrome hash to entry indices
    buckets: HashMap<u64, Vec<u32>>,
}

fn hash_words(words: &[u64]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &w in words {
        h ^= w;
        h = h.wrapping_mul(0x100000001b3);
        h ^= h >> 29;
    }
    h
}

impl MitmArena {
    /// Enumerate every Pauli of weight ≤ half (including the identity),
    /// bucketed by syndrome. Kinds per qubit are visited Z < X < Y.
    fn build(t: &StabilizerTableau, half: usize) -> MitmArena {
        let n = t.n;
        let mask_words = n.div_ceil(64);
        let n_rows = t.rows.len();
        let syn_words = n_rows.div_ceil(64);
        // column syndromes: anticommutation of a single-qubit kind with each row
        let kinds = [PauliKind::Z, PauliKind::X, PauliKind::Y];
        let mut col_syn = vec![0u64; n * 3 * syn_words];
        for q in 0..n {
            for (ki, &kind) in kinds.iter().enumerate() {
                let base = (q * 3 + ki) * syn_words;
                for (ri, row) in t.rows.iter().enumerate() {
                    if row.kind(q).anticommutes(kind) {
                        col_syn[base + ri / 64] |= 1 << (ri % 64);
                    }
                }
            }
        }
        let mut arena = MitmArena {
            n,
            mask_words,
            syn_words,
            masks: Vec::new(),
            syndromes: Vec::new(),
            buckets: HashMap::new(),
        };
        // DFS over supports
        let mut z = vec![0u64; mask_words];
        let mut x = vec![0u64; mask_words];
        let mut syn = vec![0u64; syn_words];
        arena.push_entry(&z, &x, &syn);
        let mut stack: Vec<(usize, usize)> = Vec::new(); // (qubit, kind) trail
        fn dfs(
            arena: &mut MitmArena,
            col_syn: &[u64],
            z: &mut [u64],
            x: &mut [u64],
            syn: &mut [u64],
            start: usize,
            remaining: usize,
            kinds: &[PauliKind; 3],
            stack: &mut Vec<(usize, usize)>,
        ) {
            if remaining == 0 {
                return;
            }
            let n = arena.n;
            let sw = arena.syn_words;
            for q in start..n {
                for (ki, &kind) in kinds.iter().enumerate() {
                    let (zb, xb) = kind.bits();
                    if zb {
                        z[q / 64] ^= 1 << (q % 64);
                    }
                    if xb {
                        x[q / 64] ^= 1 << (q % 64);
                    }
                    let base = (q * 3 + ki) * sw;
                    for w in 0..sw {
                        syn[w] ^= col_syn[base + w];
                    }
                    arena.push_entry(z, x, syn);
                    stack.push((q, ki));
                    dfs(arena, col_syn, z, x, syn, q + 1, remaining - 1, kinds, stack);
                    stack.pop();
                    for w in 0..sw {
                        syn[w] ^= col_syn[base + w];
                    }
                    if zb {
                        z[q / 64] ^= 1 << (q % 64);
                    }
                    if xb {
                        x[q / 64] ^= 1 << (q % 64);
                    }
                }
            }
        }
        dfs(
            &mut arena, &col_syn, &mut z, &mut x, &mut syn, 0, half, &kinds, &mut stack,
        );
        arena
    }

    fn push_entry(&mut self, z: &[u64], x: &[u64], syn: &[u64]) {
        let idx = (self.masks.len() / (2 * self.mask_words)) as u32;
        self.masks.extend_from_slice(z);
        self.masks.extend_from_slice(x);
        self.syndromes.extend_from_slice(syn);
        self.buckets.entry(hash_words(syn)).or_default().push(idx);
    }

    #[inline]
    fn entry_masks(&self, i: u32) -> (&[u64], &[u64]) {
        let w = self.mask_words;
        let off = i as usize * 2 * w;
        (&self.masks[off..off + w], &self.masks[off + w..off + 2 * w])
    }

    #[inline]
    fn entry_syndrome(&self, i: u32) -> &[u64] {
        let sw = self.syn_words;
        &self.syndromes[i as usize * sw..(i as usize + 1) * sw]
    }
}

/// Exact distance by syndrome-collision meet-in-the-middle.
///
/// All Paulis of weight ≤ ⌈w_max/2⌉ are keyed by syndrome; any same-bucket
/// pair whose product has zero syndrome and is not in the stabilizer rowspan
/// witnesses a logical. Returns the minimum witness weight if ≤ w_max.
pub fn distance_exact(
    t: &StabilizerTableau,
    w_max: usize,
) -> Result<DistanceOutcome, CodeParamsError> {
    let k = logical_dimension(t);
    if k == 0 {
        return Err(CodeParamsError::ZeroLogicals);
    }
    let n = t.n;
    let half = w_max.div_ceil(2);
    let arena = MitmArena::build(t, half);
    let rref = Rref::from_matrix(&symplectic_matrix(&t.rows, n));
    let w = arena.mask_words;
    let n_entries = arena.masks.len() / (2 * w);
    // entry weights, and buckets sorted by weight for pair pruning
    let entry_weight: Vec<u8> = (0..n_entries as u32)
        .map(|i| {
            let (z, x) = arena.entry_masks(i);
            z.iter()
                .zip(x)
                .map(|(a, b)| (a | b).count_ones() as u8)
                .sum()
        })
        .collect();
    let mut buckets: Vec<Vec<u32>> = arena.buckets.values().cloned().collect();
    buckets.sort_by_key(|b| std::cmp::Reverse(b.len()));
    for b in buckets.iter_mut() {
        b.sort_by_key(|&i| (entry_weight[i as usize], i));
    }

    // phase 1: minimum logical weight, with a shared bound for pruning.
    // wt(P·Q) ≥ wt(Q) − wt(P) bounds pairs out once a weight is found.
    let global_best = std::sync::atomic::AtomicUsize::new(w_max + 1);
    let check_pair = |i: u32, j: u32, best_now: usize| -> Option<usize> {
        let (zi, xi) = arena.entry_masks(i);
        let (zj, xj) = arena.entry_masks(j);
        let mut weight = 0usize;
        for t in 0..w {
            weight += ((zi[t] ^ zj[t]) | (xi[t] ^ xj[t])).count_ones() as usize;
        }
        if weight == 0 || weight > w_max || weight >= best_now {
            return None;
        }
        let mut v = BitVec::zeros(2 * n);
        for q in 0..n {
            if ((zi[q / 64] ^ zj[q / 64]) >> (q % 64)) & 1 == 1 {
                v.set(q, true);
            }
            if ((xi[q / 64] ^ xj[q / 64]) >> (q % 64)) & 1 == 1 {
                v.set(n + q, true);
            }
        }
        if rref.contains(&v) {
            None
        } else {
            Some(weight)
        }
    };
    buckets.par_iter().for_each(|bucket| {
        for (ii, &i) in bucket.iter().enumerate() {
            let wi = entry_weight[i as usize] as usize;
            for &j in &bucket[ii + 1..] {
                let best_now = global_best.load(std::sync::atomic::Ordering::Relaxed);
                let wj = entry_weight[j as usize] as usize;
                if wj.saturating_sub(wi) >= best_now {
                    break; // sorted by weight: no later j can do better
                }
                if arena.entry_syndrome(j) != arena.entry_syndrome(i) {
                    continue;
                }
                if let Some(found) = check_pair(i, j, best_now) {
                    global_best.fetch_min(found, std::sync::atomic::Ordering::Relaxed);
                }
            }
        }
    });
    let best = global_best.load(std::sync::atomic::Ordering::Relaxed);
    if best > w_max {
        return Ok(DistanceOutcome::Above { w_max });
    }
    // phase 2: deterministic witness — lexicographically smallest (z, x)
    // among weight-`best` logicals
    let witness = buckets
        .par_iter()
        .map(|bucket| {
            let mut local: Option<(Vec<u64>, Vec<u64>)> = None;
            for (ii, &i) in bucket.iter().enumerate() {
                let wi = entry_weight[i as usize] as usize;
                let (zi, xi) = arena.entry_masks(i);
                let si = arena.entry_syndrome(i);
                for &j in &bucket[ii + 1..] {
                    let wj = entry_weight[j as usize] as usize;
                    if wj.saturating_sub(wi) > best {
                        break;
                    }
                    if arena.entry_syndrome(j) != si {
                        continue;
                    }
                    let (zj, xj) = arena.entry_masks(j);
                    let mut weight = 0usize;
                    let mut pz = vec![0u64; w];
                    let mut px = vec![0u64; w];
                    for t in 0..w {
                        pz[t] = zi[t] ^ zj[t];
                        px[t] = xi[t] ^ xj[t];
                        weight += (pz[t] | px[t]).count_ones() as usize;
                    }
                    if weight != best {
                        continue;
                    }
                    if let Some((bz, bx)) = &local {
                        if (&pz, &px) >= (bz, bx) {
                            continue;
                        }
                    }
                    let mut v = BitVec::zeros(2 * n);
                    for q in 0..n {
                        if (pz[q / 64] >> (q % 64)) & 1 == 1 {
                            v.set(q, true);
                        }
                        if (px[q / 64] >> (q % 64)) & 1 == 1 {
                            v.set(n + q, true);
                        }
                    }
                    if !rref.contains(&v) {
                        local = Some((pz, px));
                    }
                }
            }
            local
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) => x,
                (x, None) => x,
                (Some(a), Some(b)) => {
                    if a <= b {
                        Some(a)
                    } else {
                        Some(b)
                    }
                }
            },
        )
        .expect("phase 1 found a logical at this weight");
    let mut p = PauliString::identity(n);
    for q in 0..n {
        if (witness.0[q / 64] >> (q % 64)) & 1 == 1 {
            p.z_mask.set(q, true);
        }
        if (witness.1[q / 64] >> (q % 64)) & 1 == 1 {
            p.x_mask.set(q, true);
        }
    }
    Ok(DistanceOutcome::Exact { d: best, witness: p })
}

/// Centralizer basis: all of F2^{2n} commuting with every row (dimension
/// n + k), as Paulis.
pub fn centralizer_basis(t: &StabilizerTableau) -> Vec<PauliString> {
    let n = t.n;
    // v commutes with row r iff Ω(v, r) = v_z·r_x + v_x·r_z = 0.
    // Build the constraint matrix M (rows = stabilizers as (x||z)), then the
    // kernel of M is the centralizer.
    let mut constraint = crate::bits::BitMatrix::new(2 * n);
    for r in &t.rows {
        constraint.push_row(r.x_mask.concat(&r.z_mask));
    }
    // kernel via RREF: free columns parameterize the kernel
    let mut pivots: Vec<(usize, BitVec)> = Vec::new();
    for row in constraint.rows() {
        let mut v = row.clone();
        for (pc, prow) in &pivots {
            if v.get(*pc) {
                v.xor_assign(prow);
            }
        }
        if !v.is_zero() {
            let p = v.iter_ones().next().unwrap();
            // back-substitute to keep fully reduced form
            for (_, prow) in pivots.iter_mut() {
                if prow.get(p) {
                    prow.xor_assign(&v);
                }
            }
            pivots.push((p, v));
            pivots.sort_by_key(|(c, _)| *c);
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|(c, _)| *c).collect();
    let mut basis = Vec::new();
    for free in 0..2 * n {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = BitVec::zeros(2 * n);
        v.set(free, true);
        for (pc, prow) in &pivots {
            if prow.get(free) {
                v.set(*pc, true);
            }
        }
        basis.push(PauliString::from_symplectic_row(&v, n, false));
    }
    basis
}

/// A basis of k mutually-commuting logical representatives (the "Z side" of
/// a symplectic logical basis), each independent of the stabilizer rowspan.
///
/// The pairing runs on unsigned symplectic vectors; products of
/// anticommuting representatives are mask XORs (signs are irrelevant to a
/// logical basis).
pub fn logical_basis(t: &StabilizerTableau) -> Vec<PauliString> {
    let n = t.n;
    let stab_rref = Rref::from_matrix(&symplectic_matrix(&t.rows, n));
    // quotient representatives: centralizer vectors independent mod stabilizer
    let mut quot_rref = stab_rref.clone();
    let mut pool: Vec<BitVec> = Vec::new();
    for c in centralizer_basis(t) {
        let row = c.symplectic_row();
        if quot_rref.insert(row.clone()) {
            pool.push(row);
        }
    }
    let omega = |a: &BitVec, b: &BitVec| -> bool {
        // Ω((z1|x1),(z2|x2)) = z1·x2 + x1·z2 over the packed layout
        let pa = PauliString::from_symplectic_row(a, n, false);
        let pb = PauliString::from_symplectic_row(b, n, false);
        pa.anticommutes_with(&pb)
    };
    let mut logicals = Vec::new();
    while let Some(v) = pool.first().cloned() {
        pool.remove(0);
        let Some(wi) = pool.iter().position(|w| omega(&v, w)) else {
            continue;
        };
        let w = pool.remove(wi);
        for u in pool.iter_mut() {
            if omega(u, &w) {
                u.xor_assign(&v);
            }
            if omega(u, &v) {
                u.xor_assign(&w);
            }
        }
        logicals.push(PauliString::from_symplectic_row(&v, n, false));
    }
    logicals
}

/// Randomized information-set style distance upper bound (`d ≤ returned`).
/// Deterministic for a fixed seed. Mixes random support-permutation
/// elimination orders with random CX-conjugation sweeps, 50/50.
pub fn distance_estimate(
    t: &StabilizerTableau,
    trials: usize,
    seed: u64,
) -> Result<usize, CodeParamsError> {
    let k = logical_dimension(t);
    if k == 0 {
        return Err(CodeParamsError::ZeroLogicals);
    }
    let n = t.n;
    let stab_rref = Rref::from_matrix(&symplectic_matrix(&t.rows, n));
    let cent: Vec<BitVec> = centralizer_basis(t)
        .iter()
        .map(|p| p.symplectic_row())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(usize, BitVec)> = None;

    let consider = |v: &BitVec, best: &mut Option<(usize, BitVec)>| {
        let p = PauliString::from_symplectic_row(v, n, false);
        let wt = p.weight();
        if wt == 0 {
            return;
        }
        if let Some((bw, _)) = best {
            if wt >= *bw {
                return;
            }
        }
        if !stab_rref.contains(v) {
            *best = Some((wt, v.clone()));
        }
    };

    for _ in 0..trials {
        if rng.gen_bool(0.5) {
            // random support permutation: eliminate columns in shuffled order
            let mut order: Vec<usize> = (0..2 * n).collect();
            order.shuffle(&mut rng);
            let mut rows = cent.clone();
            let mut used = vec![false; rows.len()];
            for &col in &order {
                let Some(pi) = (0..rows.len()).find(|&i| !used[i] && rows[i].get(col)) else {
                    continue;
                };
                used[pi] = true;
                let prow = rows[pi].clone();
                for (i, r) in rows.iter_mut().enumerate() {
                    if i != pi && r.get(col) {
                        r.xor_assign(&prow);
                    }
                }
            }
            for r in &rows {
                consider(r, &mut best);
            }
            // sums of the lightest few rows
            let mut light: Vec<&BitVec> = rows.iter().collect();
            light.sort_by_key(|r| r.count_ones());
            for i in 0..light.len().min(8) {
                for j in (i + 1)..light.len().min(8) {
                    let mut s = light[i].clone();
                    s.xor_assign(light[j]);
                    consider(&s, &mut best);
                }
            }
        } else {
            // random CX-conjugation sweep in a transformed frame, mapped back
            let sweeps: Vec<(usize, usize)> = (0..n / 2)
                .map(|_| {
                    let a = rng.gen_range(0..n);
                    let mut b = rng.gen_range(0..n);
                    while b == a {
                        b = rng.gen_range(0..n);
                    }
                    (a, b)
                })
                .collect();
            // CX(c→t): z_c += z_t, x_t += x_c  (on symplectic rows z||x)
            let apply = |v: &mut BitVec, c: usize, tq: usize| {
                if v.get(n + c) {
                    v.flip(n + tq);
                }
                if v.get(tq) {
                    v.flip(c);
                }
            };
            let mut rows = cent.clone();
            for r in rows.iter_mut() {
                for &(c, tq) in &sweeps {
                    apply(r, c, tq);
                }
            }
            // plain elimination in the transformed frame
            let mut pivots: Vec<(usize, usize)> = Vec::new(); // (col, row idx)
            for col in 0..2 * n {
                if let Some(pi) = (0..rows.len())
                    .find(|&i| rows[i].get(col) && pivots.iter().all(|&(_, p)| p != i))
                {
                    let prow = rows[pi].clone();
                    for (i, r) in rows.iter_mut().enumerate() {
                        if i != pi && r.get(col) {
                            r.xor_assign(&prow);
                        }
                    }
                    pivots.push((col, pi));
                }
            }
            // map back through the inverse sweep (CX is an involution)
            for r in rows.iter_mut() {
                for &(c, tq) in sweeps.iter().rev() {
                    apply(r, c, tq);
                }
                consider(r, &mut best);
            }
        }
    }
    let (d, _) = best.expect("k ≥ 1 guarantees a centralizer element outside the stabilizer");
    Ok(d)
}

/// Coefficients of the stabilizer-group weight enumerator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightEnumerator {
    /// coefficients w_0..w_n; truncated variants stop at the cutoff
    pub coefficients: Vec<BigUint>,
    pub truncated_at: Option<usize>,
}

pub const ENUMERATOR_FULL_MAX_RANK: usize = 28;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnumeratorMode {
    Full,
    Cutoff(usize),
}

/// Count stabilizer-group elements by weight.
///
/// Full mode walks all 2^(n−k) group elements in Gray-code order and needs
/// n−k ≤ 28. Cutoff mode reuses the meet-in-the-middle enumerator restricted
/// to the rowspan.
pub fn weight_enumerator(
    t: &StabilizerTableau,
    mode: EnumeratorMode,
) -> Result<WeightEnumerator, CodeParamsError> {
    let n = t.n;
    match mode {
        EnumeratorMode::Full => {
            // independent generators from the rref
            let mut rref = Rref::new(2 * n);
            let mut gens: Vec<PauliString> = Vec::new();
            for row in &t.rows {
                if rref.insert(row.symplectic_row()) {
                    gens.push(row.clone());
                }
            }
            let r = gens.len();
            if r > ENUMERATOR_FULL_MAX_RANK {
                return Err(CodeParamsError::TooLarge { got: r, max: ENUMERATOR_FULL_MAX_RANK });
            }
            let mut counts = vec![0u64; n + 1];
            let words = n.div_ceil(64);
            let mut z = vec![0u64; words];
            let mut x = vec![0u64; words];
            counts[0] += 1;
            let total: u64 = 1u64 << r;
            let mut prev_gray = 0u64;
            for i in 1..total {
                let gray = i ^ (i >> 1);
                let changed = (gray ^ prev_gray).trailing_zeros() as usize;
                prev_gray = gray;
                let g = &gens[changed];
                let mut weight = 0usize;
                for (wi, slot) in z.iter_mut().enumerate() {
                    *slot ^= g.z_mask.words()[wi];
                }
                for (wi, slot) in x.iter_mut().enumerate() {
                    *slot ^= g.x_mask.words()[wi];
                    weight += (z[wi] | *slot).count_ones() as usize;
                }
                counts[weight] += 1;
            }
            Ok(WeightEnumerator {
                coefficients: counts.into_iter().map(BigUint::from).collect(),
                truncated_at: None,
            })
        }
        EnumeratorMode::Cutoff(cutoff) => {
            let cutoff = cutoff.min(n);
            let half = cutoff.div_ceil(2);
            let arena = MitmArena::build(t, half);
            let rref = Rref::from_matrix(&symplectic_matrix(&t.rows, n));
            let w = arena.mask_words;
            let mut seen: std::collections::HashSet<Vec<u64>> = std::collections::HashSet::new();
            let mut counts = vec![0u64; cutoff + 1];
            counts[0] = 1;
            for bucket in arena.buckets.values() {
                for (ii, &i) in bucket.iter().enumerate() {
                    let (zi, xi) = arena.entry_masks(i);
                    let si = arena.entry_syndrome(i);
                    for &j in &bucket[ii + 1..] {
                        if arena.entry_syndrome(j) != si {
                            continue;
                        }
                        let (zj, xj) = arena.entry_masks(j);
                        let mut key = Vec::with_capacity(2 * w);
                        let mut weight = 0usize;
                        for u in 0..w {
                            key.push(zi[u] ^ zj[u]);
                        }
                        for u in 0..w {
                            let xv = xi[u] ^ xj[u];
                            weight += (key[u] | xv).count_ones() as usize;
                            key.push(xv);
                        }
                        if weight == 0 || weight > cutoff || seen.contains(&key) {
                            continue;
                        }
                        let mut v = BitVec::zeros(2 * n);
                        for q in 0..n {
                            if (key[q / 64] >> (q % 64)) & 1 == 1 {
                                v.set(q, true);
                            }
                            if (key[w + q / 64] >> (q % 64)) & 1 == 1 {
                                v.set(n + q, true);
                            }
                        }
                        if rref.contains(&v) {
                            counts[weight] += 1;
                            seen.insert(key);
                        }
                    }
                }
            }
            Ok(WeightEnumerator {
                coefficients: counts.into_iter().map(BigUint::from).collect(),
                truncated_at: Some(cutoff),
            })
        }
    }
}

/// Assemble the full parameter record for a tableau.
pub fn code_params(t: &StabilizerTableau, d: Distance) -> CodeParams {
    CodeParams {
        n: t.n,
        k: logical_dimension(t),
        d,
        max_check_weight: t.max_row_weight(),
        max_qubit_degree: t.max_qubit_degree(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{GroupSpec, Subset};
    use crate::mirror::tests::fig1_spec;

    fn spec(group: &str, a: &[&[u16]], b: &[&[u16]]) -> MirrorSpec {
        let g = GroupSpec::parse_abelian(group).unwrap();
        let to = |pts: &[&[u16]]| {
            Subset::new(
                &g,
                pts.iter()
                    .map(|p| g.element_from_coords(p).unwrap().0)
                    .collect(),
            )
            .unwrap()
        };
        MirrorSpec::new(g.clone(), to(a), to(b), Variant::Symmetric)
    }

    /// [[5,1,3]] perfect code fixture.
    fn five_qubit_code() -> StabilizerTableau {
        let mk = |s: &str| {
            let mut p = PauliString::identity(5);
            for (i, c) in s.chars().enumerate() {
                p.set_kind(
                    i,
                    match c {
                        'X' => PauliKind::X,
                        'Z' => PauliKind::Z,
                        'Y' => PauliKind::Y,
                        _ => PauliKind::I,
                    },
                );
            }
            p
        };
        StabilizerTableau {
            n: 5,
            rows: vec![mk("XZZXI"), mk("IXZZX"), mk("XIXZZ"), mk("ZXIXZ")],
        }
    }

    #[test]
    fn k_of_trivial_and_empty() {
        let g = GroupSpec::parse_abelian("4").unwrap();
        let empty = MirrorSpec::new(g.clone(), Subset::empty(), Subset::empty(), Variant::Symmetric);
        let t = empty.build_tableau().unwrap();
        assert_eq!(logical_dimension(&t), 4);
    }

    #[test]
    fn fig1_has_k6() {
        let t = fig1_spec().build_tableau().unwrap();
        assert_eq!(logical_dimension(&t), 6);
    }

    #[test]
    fn table_18_4_4_k() {
        let s = spec(
            "2x9",
            &[&[0, 0], &[0, 1], &[0, 2]],
            &[&[1, 0], &[1, 1], &[1, 5]],
        );
        let t = s.build_tableau().unwrap();
        assert_eq!(logical_dimension(&t), 4);
    }

    #[test]
    fn five_qubit_code_distance() {
        let t = five_qubit_code();
        assert_eq!(logical_dimension(&t), 1);
        match distance_exact(&t, 3).unwrap() {
            DistanceOutcome::Exact { d, witness } => {
                assert_eq!(d, 3);
                assert_eq!(witness.weight(), 3);
                // witness commutes with all rows and is not a stabilizer
                for row in &t.rows {
                    assert!(!row.anticommutes_with(&witness));
                }
            }
            other => panic!("expected exact distance, got {other:?}"),
        }
    }

    #[test]
    fn five_qubit_brute_force_oracle() {
        // brute-force all Paulis up to weight 3 for the minimum-weight logical
        let t = five_qubit_code();
        let rref = Rref::from_matrix(&symplectic_matrix(&t.rows, 5));
        let mut min_w = usize::MAX;
        for code in 0..(4u32.pow(5)) {
            let mut p = PauliString::identity(5);
            let mut c = code;
            for q in 0..5 {
                let k = match c % 4 {
                    0 => PauliKind::I,
                    1 => PauliKind::Z,
                    2 => PauliKind::X,
                    _ => PauliKind::Y,
                };
                p.set_kind(q, k);
                c /= 4;
            }
            if p.is_identity() || p.weight() > 3 {
                continue;
            }
            if t.rows.iter().all(|r| !r.anticommutes_with(&p)) && !rref.contains(&p.symplectic_row())
            {
                min_w = min_w.min(p.weight());
            }
        }
        assert_eq!(min_w, 3);
    }

    #[test]
    fn distance_16_4_4() {
        let g = GroupSpec::parse_abelian("16").unwrap();
        let s = MirrorSpec::new(
            g.clone(),
            Subset::new(&g, vec![0, 4]).unwrap(),
            Subset::new(&g, vec![1, 3, 5, 11]).unwrap(),
            Variant::Symmetric,
        );
        let t = s.build_tableau().unwrap();
        assert_eq!(logical_dimension(&t), 4);
        match distance_exact(&t, 4).unwrap() {
            DistanceOutcome::Exact { d, .. } => assert_eq!(d, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn estimate_matches_exact_on_16_4_4() {
        let g = GroupSpec::parse_abelian("16").unwrap();
        let s = MirrorSpec::new(
            g.clone(),
            Subset::new(&g, vec![0, 4]).unwrap(),
            Subset::new(&g, vec![1, 3, 5, 11]).unwrap(),
            Variant::Symmetric,
        );
        let t = s.build_tableau().unwrap();
        assert_eq!(distance_estimate(&t, 200, 7).unwrap(), 4);
    }

    /// Structured random spec on Z2×Z9 with A in the 0-coset and B in the
    /// 1-coset of the Z2 factor: such specs frequently have k > 0.
    fn random_coset_spec(rng: &mut ChaCha8Rng) -> MirrorSpec {
        let g = GroupSpec::parse_abelian("2x9").unwrap();
        let pick = |rng: &mut ChaCha8Rng, lo: u32, n: usize| -> Vec<u32> {
            let mut v: Vec<u32> = (lo..lo + 9).collect();
            v.shuffle(rng);
            v.truncate(n);
            v
        };
        let a = Subset::new(&g, pick(rng, 0, 3)).unwrap();
        let b = Subset::new(&g, pick(rng, 9, 3)).unwrap();
        MirrorSpec::new(g.clone(), a, b, Variant::Symmetric)
    }

    #[test]
    fn estimate_never_below_exact_on_small_codes() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut tested = 0;
        for _ in 0..400 {
            if tested >= 20 {
                break;
            }
            let s = random_coset_spec(&mut rng);
            let t = s.build_tableau().unwrap();
            if logical_dimension(&t) == 0 {
                continue;
            }
            let exact = match distance_exact(&t, 6).unwrap() {
                DistanceOutcome::Exact { d, .. } => d,
                DistanceOutcome::Above { .. } => continue,
            };
            tested += 1;
            let est = distance_estimate(&t, 100, 5).unwrap();
            assert!(est >= exact, "estimate {est} below exact {exact}");
        }
        assert!(tested >= 5, "too few k>0 samples found ({tested})");
    }

    /// Brute-force DFS over all Paulis of weight ≤ cap; independent oracle
    /// for the minimum logical weight.
    fn brute_force_min_logical(t: &StabilizerTableau, cap: usize) -> Option<usize> {
        let rref = Rref::from_matrix(&symplectic_matrix(&t.rows, t.n));
        let mut best: Option<usize> = None;
        let kinds = [PauliKind::Z, PauliKind::X, PauliKind::Y];
        fn rec(
            t: &StabilizerTableau,
            rref: &Rref,
            kinds: &[PauliKind; 3],
            p: &mut PauliString,
            start: usize,
            left: usize,
            best: &mut Option<usize>,
        ) {
            if !p.is_identity()
                && t.rows.iter().all(|r| !r.anticommutes_with(p))
                && !rref.contains(&p.symplectic_row())
            {
                let w = p.weight();
                if best.map_or(true, |b| w < b) {
                    *best = Some(w);
                }
            }
            if left == 0 {
                return;
            }
            for q in start..t.n {
                for &k in kinds {
                    p.set_kind(q, k);
                    rec(t, rref, kinds, p, q + 1, left - 1, best);
                    p.set_kind(q, PauliKind::I);
                }
            }
        }
        let mut p = PauliString::identity(t.n);
        rec(t, &rref, &kinds, &mut p, 0, cap, &mut best);
        best
    }

    #[test]
    fn mitm_matches_brute_force_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut tested = 0;
        for _ in 0..200 {
            if tested >= 6 {
                break;
            }
            let s = random_coset_spec(&mut rng);
            let t = s.build_tableau().unwrap();
            if logical_dimension(&t) == 0 {
                continue;
            }
            tested += 1;
            let oracle = brute_force_min_logical(&t, 4);
            match distance_exact(&t, 4).unwrap() {
                DistanceOutcome::Exact { d, .. } => assert_eq!(Some(d), oracle),
                DistanceOutcome::Above { .. } => assert_eq!(oracle, None),
            }
        }
        assert!(tested >= 3, "too few k>0 samples found ({tested})");
    }

    #[test]
    fn commutes_with_all_dual_route() {
        let s = spec(
            "2x9",
            &[&[0, 0], &[0, 1], &[0, 2]],
            &[&[1, 0], &[1, 1], &[1, 5]],
        );
        let t = s.build_tableau().unwrap();
        // every stabilizer row commutes with all
        for row in &t.rows {
            assert!(commutes_with_all(&s, row).unwrap());
        }
        // a single Z on one qubit should fail for generic B
        let mut p = PauliString::identity(s.n());
        p.set_kind(3, PauliKind::Z);
        assert!(!commutes_with_all(&s, &p).unwrap());
    }

    #[test]
    fn enumerator_full_counts() {
        // single generator Z⊗Z: w_0 = 1, w_2 = 1
        let mut zz = PauliString::identity(2);
        zz.set_kind(0, PauliKind::Z);
        zz.set_kind(1, PauliKind::Z);
        let t = StabilizerTableau { n: 2, rows: vec![zz] };
        let e = weight_enumerator(&t, EnumeratorMode::Full).unwrap();
        assert_eq!(e.coefficients[0], BigUint::from(1u32));
        assert_eq!(e.coefficients[1], BigUint::from(0u32));
        assert_eq!(e.coefficients[2], BigUint::from(1u32));

        // identity tableau: only w_0
        let g = GroupSpec::parse_abelian("3").unwrap();
        let s = MirrorSpec::new(g.clone(), Subset::empty(), Subset::empty(), Variant::Symmetric);
        let t = s.build_tableau().unwrap();
        let e = weight_enumerator(&t, EnumeratorMode::Full).unwrap();
        assert_eq!(e.coefficients[0], BigUint::from(1u32));
        assert!(e.coefficients[1..].iter().all(|c| *c == BigUint::from(0u32)));
    }

    #[test]
    fn enumerator_sum_is_two_to_rank() {
        let t = five_qubit_code();
        let e = weight_enumerator(&t, EnumeratorMode::Full).unwrap();
        let sum: BigUint = e.coefficients.iter().sum();
        assert_eq!(sum, BigUint::from(16u32)); // 2^(n−k) = 2^4
    }

    #[test]
    fn enumerator_cutoff_matches_full() {
        let t = five_qubit_code();
        let full = weight_enumerator(&t, EnumeratorMode::Full).unwrap();
        let cut = weight_enumerator(&t, EnumeratorMode::Cutoff(4)).unwrap();
        for w in 0..=4 {
            assert_eq!(full.coefficients[w], cut.coefficients[w], "weight {w}");
        }
    }

    #[test]
    fn logical_basis_properties() {
        let t = five_qubit_code();
        let basis = logical_basis(&t);
        assert_eq!(basis.len(), 1);
        let rref = Rref::from_matrix(&symplectic_matrix(&t.rows, 5));
        for (i, l) in basis.iter().enumerate() {
            for row in &t.rows {
                assert!(!row.anticommutes_with(l));
            }
            assert!(!rref.contains(&l.symplectic_row()));
            for m in &basis[i + 1..] {
                assert!(!l.anticommutes_with(m));
            }
        }

        let t = fig1_spec().build_tableau().unwrap();
        let basis = logical_basis(&t);
        assert_eq!(basis.len(), 6);
        let rref = Rref::from_matrix(&symplectic_matrix(&t.rows, t.n));
        let mut all = rref.clone();
        for (i, l) in basis.iter().enumerate() {
            for row in &t.rows {
                assert!(!row.anticommutes_with(l));
            }
            assert!(all.insert(l.symplectic_row()), "logicals independent mod stabilizer");
            for m in &basis[i + 1..] {
                assert!(!l.anticommutes_with(m));
            }
        }
    }
}
