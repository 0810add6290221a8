//! Scheduling syndrome-extraction gadgets into parallel ticks.
//!
//! Interleaving two stabilizer measurements is only sound when, over their
//! anticommuting shared qubits, an even number of crossings occur in each
//! time order; otherwise the pair's ancilla measurements pick up a CZ
//! dressing and detectors go nondeterministic. Gadgets are therefore packed
//! into "waves": within a wave all gadget data ops run on a common slot
//! clock (for mirror codes every gadget touches a distinct qubit per slot),
//! and any pair whose crossing parity would be odd is separated into
//! different waves, which serializes it. Wave assignment is greedy colouring
//! in saturation order. An external scheduler can replace this one through
//! [`Scheduler`].

use mirror_core::groups::GroupElement;
use mirror_core::mirror::{MirrorSpec, StabilizerTableau, Variant};
use mirror_core::pauli::PauliKind;

/// One stabilizer's data-coupling plan: ops in execution order, each pinned
/// to a global slot on the wave's clock.
#[derive(Clone, Debug)]
pub struct GadgetPlan {
    pub stab_index: usize,
    /// (data qubit, pauli, slot), strictly increasing slots
    pub ops: Vec<(usize, PauliKind, usize)>,
}

impl GadgetPlan {
    pub fn weight(&self) -> usize {
        self.ops.len()
    }
}

/// Assignment of gadgets to waves plus the shared slot count.
#[derive(Clone, Debug)]
pub struct WavePlan {
    pub gadgets: Vec<GadgetPlan>,
    /// wave id per gadget
    pub wave: Vec<usize>,
    pub n_waves: usize,
    pub n_slots: usize,
}

/// Pluggable wave scheduler.
pub trait Scheduler {
    fn plan(&self, gadgets: Vec<GadgetPlan>, n_qubits: usize) -> WavePlan;
}

/// Slot-aligned plans for a mirror spec: slot r is role r of the global role
/// list (A in sorted order, then B), so every gadget touches a distinct
/// qubit in each slot. Y-overlap qubits merge into the A-role slot.
pub fn mirror_gadget_plans(spec: &MirrorSpec, t: &StabilizerTableau) -> Vec<GadgetPlan> {
    let g = &spec.group;
    let n_roles = spec.a.len() + spec.b.len();
    let mut plans = Vec::with_capacity(t.rows.len());
    for (i, row) in t.rows.iter().enumerate() {
        let ge = GroupElement(i as u32);
        let gi = g.inv(ge);
        let mut ops: Vec<(usize, PauliKind, usize)> = Vec::new();
        let mut seen_qubits: Vec<usize> = Vec::new();
        for (slot, a) in spec.a.iter().enumerate() {
            let q = g.mul(a, ge).index();
            ops.push((q, row.kind(q), slot));
            seen_qubits.push(q);
        }
        for (bslot, b) in spec.b.iter().enumerate() {
            let q = match spec.variant {
                Variant::Symmetric => g.mul(b, gi).index(),
                Variant::Asymmetric => g.mul(gi, b).index(),
            };
            if seen_qubits.contains(&q) {
                // merged into the A-role op as a Y
                continue;
            }
            ops.push((q, row.kind(q), spec.a.len() + bslot));
        }
        debug_assert!(ops.windows(2).all(|w| w[0].2 < w[1].2));
        plans.push(GadgetPlan { stab_index: i, ops });
    }
    let _ = n_roles;
    plans
}

/// Slot-aligned plans for an arbitrary tableau: ops sorted by qubit, slots
/// assigned greedily so no two gadgets share a qubit in a slot.
pub fn generic_gadget_plans(t: &StabilizerTableau) -> Vec<GadgetPlan> {
    let mut plans = Vec::with_capacity(t.rows.len());
    // slot → occupied qubits
    let mut occupancy: Vec<Vec<bool>> = Vec::new();
    for (i, row) in t.rows.iter().enumerate() {
        let mut ops = Vec::new();
        let mut slot = 0usize;
        for q in 0..t.n {
            let kind = row.kind(q);
            if kind == PauliKind::I {
                continue;
            }
            loop {
                if occupancy.len() <= slot {
                    occupancy.push(vec![false; t.n]);
                }
                if !occupancy[slot][q] {
                    occupancy[slot][q] = true;
                    break;
                }
                slot += 1;
            }
            ops.push((q, kind, slot));
            slot += 1;
        }
        plans.push(GadgetPlan { stab_index: i, ops });
    }
    plans
}

/// Crossing parity of an interleaved pair: number of anticommuting shared
/// qubits where gadget `b`'s op lands before gadget `a`'s. Interleaving is
/// valid iff even.
pub fn crossing_parity(a: &GadgetPlan, b: &GadgetPlan) -> bool {
    let mut odd = false;
    for &(qa, pa, sa) in &a.ops {
        for &(qb, pb, sb) in &b.ops {
            if qa == qb && pa.anticommutes(pb) && sb < sa {
                odd = !odd;
            }
        }
    }
    odd
}

/// Pairs whose interleave would break determinism.
pub fn conflict_pairs(gadgets: &[GadgetPlan]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..gadgets.len() {
        for j in (i + 1)..gadgets.len() {
            if crossing_parity(&gadgets[i], &gadgets[j]) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Default scheduler: greedy colouring of the conflict graph in saturation
/// order.
pub struct GreedyWaveScheduler;

impl Scheduler for GreedyWaveScheduler {
    fn plan(&self, gadgets: Vec<GadgetPlan>, _n_qubits: usize) -> WavePlan {
        let n = gadgets.len();
        let conflicts = conflict_pairs(&gadgets);
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(i, j) in &conflicts {
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut wave = vec![usize::MAX; n];
        // saturation-order greedy
        let mut saturation: Vec<std::collections::HashSet<usize>> = vec![Default::default(); n];
        for _ in 0..n {
            let pick = (0..n)
                .filter(|&i| wave[i] == usize::MAX)
                .max_by_key(|&i| (saturation[i].len(), adj[i].len(), std::cmp::Reverse(i)))
                .unwrap();
            let mut c = 0;
            while saturation[pick].contains(&c) {
                c += 1;
            }
            wave[pick] = c;
            for &nb in &adj[pick] {
                saturation[nb].insert(c);
            }
        }
        let n_waves = wave.iter().map(|&w| w + 1).max().unwrap_or(1);
        let n_slots = gadgets
            .iter()
            .flat_map(|g| g.ops.iter().map(|&(_, _, s)| s + 1))
            .max()
            .unwrap_or(0);
        WavePlan { gadgets, wave, n_waves, n_slots }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mirror_core::groups::{GroupSpec, Subset};

    fn spec_18_4_4() -> (MirrorSpec, StabilizerTableau) {
        let g = GroupSpec::parse_abelian("2x9").unwrap();
        let to = |pts: &[[u16; 2]]| {
            Subset::new(
                &g,
                pts.iter().map(|p| g.element_from_coords(p).unwrap().0).collect(),
            )
            .unwrap()
        };
        let spec = MirrorSpec::new(
            g.clone(),
            to(&[[0, 0], [0, 1], [0, 2]]),
            to(&[[1, 0], [1, 1], [1, 5]]),
            Variant::Symmetric,
        );
        let t = spec.build_tableau().unwrap();
        (spec, t)
    }

    #[test]
    fn mirror_plans_touch_distinct_qubits_per_slot() {
        let (spec, t) = spec_18_4_4();
        let plans = mirror_gadget_plans(&spec, &t);
        let n_slots = 6;
        for slot in 0..n_slots {
            let mut seen = std::collections::HashSet::new();
            for p in &plans {
                for &(q, _, s) in &p.ops {
                    if s == slot {
                        assert!(seen.insert(q), "slot {slot} qubit {q} collides");
                    }
                }
            }
        }
    }

    #[test]
    fn conflict_graph_respected_by_waves() {
        let (spec, t) = spec_18_4_4();
        let plans = mirror_gadget_plans(&spec, &t);
        let conflicts = conflict_pairs(&plans);
        let wp = GreedyWaveScheduler.plan(plans, t.n);
        for (i, j) in conflicts {
            assert_ne!(wp.wave[i], wp.wave[j], "conflicting pair {i},{j} share a wave");
        }
        // the Z2 projection separates the two 2G cosets: two waves suffice
        assert_eq!(wp.n_waves, 2);
    }
}
