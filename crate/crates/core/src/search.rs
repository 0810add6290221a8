//! Symmetry-pruned exhaustive enumeration of abelian mirror codes, plus the
//! Cayley-table-driven non-abelian path.
//!
//! The candidate space is sharded by (n, group factorization, subset shape);
//! workers own whole shards and the sink serializes appends in shard order,
//! so a run is deterministic for a fixed config regardless of worker count.

use crate::canon::{canonicalize, CanonicalForm};
use crate::catalog::{fingerprint, CatalogEntry, CssFlags, Provenance};
use crate::codeparams::{
    code_params, distance_exact, distance_estimate, logical_dimension, Distance, DistanceOutcome,
};
use crate::cssform::{is_equiv_css, is_hadamard_css, CssVerdict, HadamardVerdict};
use crate::groups::{abelian_automorphism_count, abelian_automorphisms_cached, Automorphism, GroupElement, GroupSpec, Subset};
use crate::mirror::{prefilter, MirrorSpec, PrefilterVerdict, Variant};
use base64::Engine;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("bad search config: {0}")]
    Config(String),
    #[error("bad resume token")]
    BadResumeToken,
    #[error("sink error: {0}")]
    Sink(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n_min: usize,
    pub n_max: usize,
    /// (|A|, |B|) shapes to enumerate
    pub shapes: Vec<(usize, usize)>,
    /// exact-distance search cap; the ladder stops at min(this, 8)
    pub max_exact_w: usize,
    pub estimator_trials: usize,
    pub seed: u64,
    pub skip_pow2: bool,
    pub workers: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resume: Option<String>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            n_min: 2,
            n_max: 36,
            shapes: vec![(3, 3)],
            max_exact_w: 8,
            estimator_trials: 10_000,
            seed: 0,
            skip_pow2: false,
            workers: 0,
            resume: None,
        }
    }
}

/// One unit of deterministic work.
#[derive(Clone, Debug)]
pub struct Shard {
    pub n: usize,
    pub factors: Vec<u64>,
    pub shape: (usize, usize),
}

/// All abelian groups of order n, as ascending prime-power factor lists.
pub fn abelian_groups_of_order(n: usize) -> Vec<Vec<u64>> {
    let mut result = vec![Vec::new()];
    let mut m = n as u64;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            result = extend_with_prime(result, p, e);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        result = extend_with_prime(result, m, 1);
    }
    for f in &mut result {
        f.sort_unstable();
    }
    result.sort();
    result
}

fn extend_with_prime(base: Vec<Vec<u64>>, p: u64, e: u32) -> Vec<Vec<u64>> {
    let parts = partitions(e);
    let mut out = Vec::new();
    for b in base {
        for part in &parts {
            let mut f = b.clone();
            for &a in part {
                f.push(p.pow(a));
            }
            out.push(f);
        }
    }
    out
}

fn partitions(e: u32) -> Vec<Vec<u32>> {
    fn rec(remaining: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        for next in (1..=remaining.min(max)).rev() {
            cur.push(next);
            rec(remaining - next, next, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(e, e, &mut Vec::new(), &mut out);
    out
}

pub fn shards(cfg: &SearchConfig) -> Vec<Shard> {
    let mut out = Vec::new();
    for n in cfg.n_min..=cfg.n_max {
        if n < 2 {
            continue;
        }
        if cfg.skip_pow2 && n.is_power_of_two() {
            continue;
        }
        for factors in abelian_groups_of_order(n) {
            for &shape in &cfg.shapes {
                out.push(Shard { n, factors: factors.clone(), shape });
            }
        }
    }
    out
}

pub fn encode_resume_token(shard_idx: usize) -> String {
    base64::engine::general_purpose::STANDARD.encode(format!("v1:{shard_idx}"))
}

pub fn decode_resume_token(token: &str) -> Result<usize, SearchError> {
    let raw = base64::engine::general_purpose::STANDARD
        .decode(token)
        .map_err(|_| SearchError::BadResumeToken)?;
    let s = String::from_utf8(raw).map_err(|_| SearchError::BadResumeToken)?;
    let rest = s.strip_prefix("v1:").ok_or(SearchError::BadResumeToken)?;
    rest.parse().map_err(|_| SearchError::BadResumeToken)
}

/// Candidate `A` sets: ascending, containing 0, and lexicographically
/// minimal under the automorphism stabilizer of each DFS prefix (skipped
/// when the automorphism group is too large to materialize; the final
/// canonical-form dedup keeps the output correct either way).
fn candidate_a_sets(group: &GroupSpec, size: usize, auts: Option<&[Automorphism]>) -> Vec<Vec<u32>> {
    let n = group.order();
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut prefix = vec![0u32];
    fn minimal_under_auts(prefix: &[u32], auts: &[Automorphism], group: &GroupSpec) -> bool {
        // compare against sorted(φ(prefix) − φ(a)) for every φ and anchor a
        for phi in auts {
            let mapped: Vec<u32> = prefix.iter().map(|&e| phi.perm()[e as usize]).collect();
            for &anchor in &mapped {
                let inv = group.inv(GroupElement(anchor));
                let mut shifted: Vec<u32> = mapped
                    .iter()
                    .map(|&e| group.mul(GroupElement(e), inv).0)
                    .collect();
                shifted.sort_unstable();
                if shifted.as_slice() < prefix {
                    return false;
                }
            }
        }
        true
    }
    fn rec(
        group: &GroupSpec,
        size: usize,
        n: usize,
        auts: Option<&[Automorphism]>,
        prefix: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if prefix.len() == size {
            out.push(prefix.clone());
            return;
        }
        let start = prefix.last().copied().unwrap_or(0) + 1;
        for next in start..n as u32 {
            prefix.push(next);
            let ok = match auts {
                Some(a) => minimal_under_auts(prefix, a, group),
                None => true,
            };
            if ok {
                rec(group, size, n, auts, prefix, out);
            }
            prefix.pop();
        }
    }
    rec(group, size, n, auts, &mut prefix, &mut out);
    out
}

/// First elements allowed for B: minimal representatives of the 2G cosets
/// (the shift freedom `(A, B) → (A+g, B−g)` composed with qubit relabeling
/// lets B shift by any element of 2G, so a canonical B starts at a coset
/// minimum).
fn b_first_candidates(group: &GroupSpec) -> Vec<u32> {
    let two_g = group.doubles_subgroup().expect("abelian");
    let n = group.order();
    let mut is_min = vec![false; n];
    let mut seen = vec![false; n];
    for g in 0..n as u32 {
        if seen[g as usize] {
            continue;
        }
        let mut members: Vec<u32> = two_g
            .iter()
            .map(|&d| group.mul(GroupElement(g), GroupElement(d)).0)
            .collect();
        members.sort_unstable();
        is_min[members[0] as usize] = true;
        for m in members {
            seen[m as usize] = true;
        }
    }
    (0..n as u32).filter(|&g| is_min[g as usize]).collect()
}

/// Upper bound on automorphism groups we are willing to materialize for
/// DFS pruning.
const AUT_MATERIALIZE_CAP: usize = 100_000;

pub struct ShardOutput {
    pub shard_idx: usize,
    pub entries: Vec<CatalogEntry>,
}

/// Run the enumeration, invoking `sink` once per unique catalog entry in a
/// deterministic order. Returns the number of emitted entries.
pub fn enumerate_codes(
    cfg: &SearchConfig,
    mut sink: impl FnMut(&CatalogEntry) -> Result<(), String>,
) -> Result<usize, SearchError> {
    let all_shards = shards(cfg);
    let start = match &cfg.resume {
        Some(tok) => decode_resume_token(tok)?,
        None => 0,
    };
    let run_id = format!("search-{:016x}", cfg.seed ^ 0x6d69_7272_6f72_u64);
    let pending: Vec<(usize, Shard)> = all_shards
        .into_iter()
        .enumerate()
        .skip(start)
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(if cfg.workers == 0 { 0 } else { cfg.workers })
        .build()
        .map_err(|e| SearchError::Config(e.to_string()))?;
    let outputs: Vec<ShardOutput> = pool.install(|| {
        pending
            .par_iter()
            .map(|(idx, shard)| ShardOutput {
                shard_idx: *idx,
                entries: run_shard(cfg, shard, &run_id),
            })
            .collect()
    });
    // serialize in shard order with global canonical dedup
    let mut emitted = 0usize;
    let mut seen: std::collections::HashSet<String> = std::collections::HashSet::new();
    let mut sorted = outputs;
    sorted.sort_by_key(|o| o.shard_idx);
    for out in sorted {
        for entry in out.entries {
            let key = entry
                .canonical
                .as_ref()
                .map(|c| c.serialized())
                .unwrap_or_else(|| entry.fingerprint.clone());
            if !seen.insert(key) {
                continue;
            }
            sink(&entry).map_err(SearchError::Sink)?;
            emitted += 1;
        }
    }
    Ok(emitted)
}

fn run_shard(cfg: &SearchConfig, shard: &Shard, run_id: &str) -> Vec<CatalogEntry> {
    let group = GroupSpec::abelian(&shard.factors).expect("valid factors");
    let (sa, sb) = shard.shape;
    let aut_count = abelian_automorphism_count(&group).unwrap_or(usize::MAX);
    let auts = if aut_count <= AUT_MATERIALIZE_CAP {
        Some(abelian_automorphisms_cached(&group).expect("abelian"))
    } else {
        None
    };
    let a_sets = candidate_a_sets(&group, sa, auts.as_deref().map(|v| v.as_slice()));
    let b_firsts = b_first_candidates(&group);
    let n = group.order();
    let mut seen_forms: std::collections::HashSet<CanonicalForm> = std::collections::HashSet::new();
    let mut entries = Vec::new();
    for a_members in &a_sets {
        let a = Subset::new(&group, a_members.clone()).expect("valid");
        let mut b_members = Vec::with_capacity(sb);
        enumerate_b(&b_firsts, n, sb, &mut b_members, &mut |b_set: &[u32]| {
            let b = Subset::new(&group, b_set.to_vec()).expect("valid");
            let spec = MirrorSpec::new(group.clone(), a.clone(), b, Variant::Symmetric);
            if let Some(entry) = evaluate_candidate(cfg, &spec, run_id, &mut seen_forms) {
                entries.push(entry);
            }
        });
    }
    entries
}

fn enumerate_b(
    b_firsts: &[u32],
    n: usize,
    size: usize,
    cur: &mut Vec<u32>,
    f: &mut impl FnMut(&[u32]),
) {
    if size == 0 {
        f(&[]);
        return;
    }
    fn rec(n: usize, size: usize, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if cur.len() == size {
            f(cur);
            return;
        }
        let start = cur.last().copied().unwrap() + 1;
        for next in start..n as u32 {
            cur.push(next);
            rec(n, size, cur, f);
            cur.pop();
        }
    }
    for &first in b_firsts {
        cur.clear();
        cur.push(first);
        rec(n, size, cur, f);
    }
}

fn evaluate_candidate(
    cfg: &SearchConfig,
    spec: &MirrorSpec,
    run_id: &str,
    seen_forms: &mut std::collections::HashSet<CanonicalForm>,
) -> Option<CatalogEntry> {
    // cheap screens first
    if prefilter(spec) != PrefilterVerdict::Pass {
        return None;
    }
    let t = spec.build_tableau().ok()?;
    if logical_dimension(&t) == 0 {
        return None;
    }
    // dedup by canonical form before any expensive distance work
    let form = canonicalize(spec).ok()?;
    if !seen_forms.insert(form.clone()) {
        return None;
    }
    // recompute everything on the canonical representative
    let canonical_spec = spec_from_form(&spec.group, &form);
    let t = canonical_spec.build_tableau().ok()?;
    let k = logical_dimension(&t);
    if k == 0 {
        return None;
    }
    // distance ladder: exact at 4, 6, then the cap; estimator afterwards
    let cap = cfg.max_exact_w.min(8);
    let mut d = Distance::Unknown;
    for rung in [4usize, 6, 8] {
        let rung = rung.min(cap);
        match distance_exact(&t, rung) {
            Ok(DistanceOutcome::Exact { d: dv, .. }) => {
                d = Distance::Exact { d: dv, w_max: rung };
                break;
            }
            Ok(DistanceOutcome::Above { .. }) => {
                d = Distance::AboveSearched { w_max: rung };
            }
            Err(_) => return None,
        }
        if rung == cap {
            break;
        }
    }
    if let Distance::AboveSearched { .. } = d {
        if let Ok(est) = distance_estimate(&t, cfg.estimator_trials, cfg.seed) {
            d = Distance::Estimated { at_most: est, trials: cfg.estimator_trials, seed: cfg.seed };
        }
    }
    // drop everything with distance ≤ 2: no better than no code at all
    if matches!(d, Distance::Exact { d, .. } if d <= 2) {
        return None;
    }
    let css = match is_equiv_css(&canonical_spec) {
        CssVerdict::EquivCss(_) => true,
        CssVerdict::NotCss(_) => false,
    };
    let (hadamard, witness) = match is_hadamard_css(&canonical_spec) {
        HadamardVerdict::Witness(w) => (
            true,
            Some(
                w.t.iter()
                    .map(|e| canonical_spec.group.coords(e).unwrap().to_vec())
                    .collect::<Vec<_>>(),
            ),
        ),
        HadamardVerdict::NotHadamardCss => (false, None),
    };
    let fp = fingerprint(&t).ok()?;
    Some(CatalogEntry {
        spec: canonical_spec.to_json(),
        canonical: Some(form),
        params: code_params(&t, d),
        css: CssFlags { equiv_css: css, hadamard_css: hadamard, witness },
        fingerprint: format!("{fp:032x}"),
        provenance: Provenance {
            run_id: run_id.to_string(),
            unix_time: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            seed: cfg.seed,
            distance_budget: cfg.max_exact_w.min(8),
            estimator_trials: cfg.estimator_trials,
        },
    })
}

pub fn spec_from_form(group: &GroupSpec, form: &CanonicalForm) -> MirrorSpec {
    let subset = |ts: &[Vec<u16>]| {
        Subset::new(
            group,
            ts.iter()
                .map(|t| group.element_from_coords(t).unwrap().0)
                .collect(),
        )
        .unwrap()
    };
    MirrorSpec::new(group.clone(), subset(&form.a), subset(&form.b), Variant::Symmetric)
}

/// Non-abelian search over user-supplied Cayley tables: both variants per
/// subset pair, validity-filtered, deduplicated by fingerprint only.
pub fn enumerate_cayley_codes(
    cfg: &SearchConfig,
    groups: &[GroupSpec],
    mut sink: impl FnMut(&CatalogEntry) -> Result<(), String>,
) -> Result<usize, SearchError> {
    let run_id = format!("cayley-{:016x}", cfg.seed);
    let mut seen = std::collections::HashSet::new();
    let mut emitted = 0usize;
    for group in groups {
        let n = group.order();
        for &(sa, sb) in &cfg.shapes {
            let a_sets = candidate_a_sets(group, sa, None);
            for a_members in &a_sets {
                let a = Subset::new(group, a_members.clone()).expect("valid");
                let mut cur = Vec::new();
                let firsts: Vec<u32> = (0..n as u32).collect();
                enumerate_b(&firsts, n, sb, &mut cur, &mut |b_set| {
                    let b = Subset::new(group, b_set.to_vec()).expect("valid");
                    for variant in [Variant::Symmetric, Variant::Asymmetric] {
                        let spec = MirrorSpec::new(group.clone(), a.clone(), b.clone(), variant);
                        if !spec.is_valid() || prefilter(&spec) != PrefilterVerdict::Pass {
                            continue;
                        }
                        let Ok(t) = spec.build_tableau() else { continue };
                        if logical_dimension(&t) == 0 {
                            continue;
                        }
                        let Ok(fp) = fingerprint(&t) else { continue };
                        if !seen.insert(fp) {
                            continue;
                        }
                        let cap = cfg.max_exact_w.min(8);
                        let d = match distance_exact(&t, cap) {
                            Ok(DistanceOutcome::Exact { d, .. }) => Distance::Exact { d, w_max: cap },
                            Ok(DistanceOutcome::Above { .. }) => Distance::AboveSearched { w_max: cap },
                            Err(_) => continue,
                        };
                        let entry = CatalogEntry {
                            spec: spec.to_json(),
                            canonical: None,
                            params: code_params(&t, d),
                            css: CssFlags {
                                equiv_css: matches!(is_equiv_css(&spec), CssVerdict::EquivCss(_)),
                                hadamard_css: matches!(
                                    is_hadamard_css(&spec),
                                    HadamardVerdict::Witness(_)
                                ),
                                witness: None,
                            },
                            fingerprint: format!("{fp:032x}"),
                            provenance: Provenance {
                                run_id: run_id.clone(),
                                unix_time: 0,
                                seed: cfg.seed,
                                distance_budget: cap,
                                estimator_trials: cfg.estimator_trials,
                            },
                        };
                        if sink(&entry).is_ok() {
                            emitted += 1;
                        }
                    }
                });
            }
        }
    }
    Ok(emitted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_enumeration_counts() {
        // order 36 = 2²·3²: 4 abelian groups
        assert_eq!(abelian_groups_of_order(36).len(), 4);
        // order 32 = 2⁵: 7 partitions
        assert_eq!(abelian_groups_of_order(32).len(), 7);
        assert_eq!(abelian_groups_of_order(30), vec![vec![2, 3, 5]]);
    }

    #[test]
    fn resume_token_roundtrip() {
        let t = encode_resume_token(17);
        assert_eq!(decode_resume_token(&t).unwrap(), 17);
        assert!(decode_resume_token("###").is_err());
    }

    #[test]
    fn prime_order_small_search_is_empty() {
        // n prime, |A| = |B| = 1: every code is filtered (k = 0 or d ≤ 2)
        for n in [5usize, 7] {
            let cfg = SearchConfig {
                n_min: n,
                n_max: n,
                shapes: vec![(1, 1)],
                ..Default::default()
            };
            let mut got = Vec::new();
            enumerate_codes(&cfg, |e| {
                got.push(e.params.clone());
                Ok(())
            })
            .unwrap();
            assert!(got.is_empty(), "n={n} emitted {got:?}");
        }
    }

    #[test]
    fn finds_16_4_4_class() {
        let cfg = SearchConfig {
            n_min: 16,
            n_max: 16,
            shapes: vec![(2, 4)],
            max_exact_w: 6,
            estimator_trials: 200,
            ..Default::default()
        };
        let mut found = false;
        let mut forms = std::collections::HashSet::new();
        enumerate_codes(&cfg, |e| {
            assert!(forms.insert(e.canonical.clone().unwrap()), "duplicate canonical form");
            if e.params.n == 16 && e.params.k == 4 && e.params.d.value() == Some(4) {
                found = true;
            }
            Ok(())
        })
        .unwrap();
        assert!(found, "search must rediscover the [[16,4,4]] class");
    }

    #[test]
    fn resume_produces_remaining_entries() {
        let cfg = SearchConfig {
            n_min: 9,
            n_max: 12,
            shapes: vec![(2, 2)],
            max_exact_w: 4,
            estimator_trials: 100,
            ..Default::default()
        };
        let mut full = Vec::new();
        enumerate_codes(&cfg, |e| {
            full.push(e.spec.clone());
            Ok(())
        })
        .unwrap();
        let all = shards(&cfg);
        if all.len() > 1 {
            let tok = encode_resume_token(1);
            let cfg2 = SearchConfig { resume: Some(tok), ..cfg.clone() };
            let mut resumed = Vec::new();
            enumerate_codes(&cfg2, |e| {
                resumed.push(e.spec.clone());
                Ok(())
            })
            .unwrap();
            // resumed run yields a suffix-subset of the full run entries
            for r in &resumed {
                assert!(full.contains(r));
            }
            assert!(resumed.len() <= full.len());
        }
    }
}
