//! Circuit-level noise: every elementary fault site with its propagated
//! detector-flip and logical-flip signature.
//!
//! Faults are single Pauli (or classical flip) events at one circuit
//! location. Each concrete Pauli component is frame-propagated through the
//! remaining Clifford instructions to a deterministic signature; signs never
//! matter for flip bookkeeping.

use crate::circuit::{Basis, Circuit, Gate1Kind, Gate2Kind, Instruction};
use mirror_core::bits::BitVec;
use mirror_core::pauli::{PauliKind, PauliString};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultKind {
    Depol1,
    Depol2,
    MeasFlip,
    InitFlip,
    Idle,
    ResonatorIdle,
}

/// Per-kind probability multipliers applied to the global physical rate p.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub name: String,
    pub m1: f64,
    pub m2: f64,
    pub m_meas: f64,
    pub m_init: f64,
    pub m_idle: f64,
    pub m_res: f64,
}

impl NoiseModel {
    /// All multipliers 1 (no resonator term); measurement and init are flip
    /// probability p, depolarizing sites have total probability p.
    pub fn uniform() -> NoiseModel {
        NoiseModel {
            name: "uniform".into(),
            m1: 1.0,
            m2: 1.0,
            m_meas: 1.0,
            m_init: 1.0,
            m_idle: 1.0,
            m_res: 0.0,
        }
    }

    /// Superconducting-inspired multipliers; conventions from the circuit
    /// benchmarking literature, config-overridable.
    pub fn si1000() -> NoiseModel {
        NoiseModel {
            name: "si1000".into(),
            m1: 0.1,
            m2: 1.0,
            m_meas: 5.0,
            m_init: 2.0,
            m_idle: 0.1,
            m_res: 2.0,
        }
    }

    pub fn max_multiplier(&self) -> f64 {
        [self.m1, self.m2, self.m_meas, self.m_init, self.m_idle, self.m_res]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// One elementary fault with its propagated signature.
#[derive(Clone, Debug)]
pub struct FaultChannel {
    /// probability multiplier (× p gives the channel probability)
    pub weight: f64,
    pub kind: FaultKind,
    /// instruction index the fault is attached to (tick index for idles)
    pub location: usize,
    /// which Pauli component of the site (0 for measurement flips)
    pub component: u8,
    pub dets: BitVec,
    pub logs: BitVec,
    /// residual Pauli on data qubits at end of circuit (when requested)
    pub residual: Option<PauliString>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Comp {
    z: bool,
    x: bool,
}

impl Comp {
    fn kind(self) -> PauliKind {
        PauliKind::from_bits(self.z, self.x)
    }
    fn is_i(self) -> bool {
        !self.z && !self.x
    }
}

/// One in-flight fault frame: sparse Pauli plus accumulated label flips.
struct Frame {
    support: Vec<(u32, Comp)>,
    flips: Vec<u32>,
}

impl Frame {
    fn comp(&self, q: usize) -> Comp {
        self.support
            .iter()
            .find(|(qq, _)| *qq as usize == q)
            .map(|&(_, c)| c)
            .unwrap_or_default()
    }

}

const PAULI_COMPONENTS: [Comp; 3] = [
    Comp { z: true, x: false },  // Z
    Comp { z: false, x: true },  // X
    Comp { z: true, x: true },   // Y
];

/// All fault channels of the circuit under a noise model, each with its
/// propagated detector/logical signature. `record_residual` also keeps the
/// end-of-circuit residual data Pauli per channel.
pub fn enumerate_faults(c: &Circuit, nm: &NoiseModel, record_residual: bool) -> Vec<FaultChannel> {
    let n_qubits = c.num_qubits();
    let noiseless_from = c.noiseless_from.unwrap_or(c.instructions.len());
    let ticks = c.instruction_ticks();
    let noisy_tick_end = if noiseless_from == 0 {
        0
    } else {
        ticks[noiseless_from - 1] + 1
    };
    // label order and label → detectors / logicals incidence
    let label_order = c.label_order();
    let n_labels = label_order.len();
    let mut label_dets: Vec<Vec<u32>> = vec![Vec::new(); n_labels];
    for (di, d) in c.detectors.iter().enumerate() {
        for l in &d.labels {
            label_dets[label_order[l.as_str()]].push(di as u32);
        }
    }
    let mut label_logs: Vec<Vec<u32>> = vec![Vec::new(); n_labels];
    for (li, l) in c.logicals.iter().enumerate() {
        for lab in &l.labels {
            label_logs[label_order[lab.as_str()]].push(li as u32);
        }
    }

    // qubit liveness per tick: data qubits live through the noisy region,
    // ancillae from reset to measurement
    let n_ticks = c.depth();
    let mut live_from = vec![usize::MAX; n_qubits];
    let mut live: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_qubits]; // inclusive tick spans
    for q in 0..c.n_data {
        live[q].push((0, noisy_tick_end.saturating_sub(1)));
    }
    for (idx, ins) in c.instructions.iter().enumerate() {
        match ins {
            Instruction::Reset { q, .. } if *q >= c.n_data => {
                live_from[*q] = ticks[idx];
            }
            Instruction::Measure { q, .. } if *q >= c.n_data => {
                if live_from[*q] != usize::MAX {
                    live[*q].push((live_from[*q], ticks[idx]));
                    live_from[*q] = usize::MAX;
                }
            }
            _ => {}
        }
    }
    let mut touched: Vec<Vec<bool>> = vec![vec![false; n_qubits]; n_ticks];
    let mut meas_or_reset_tick = vec![false; n_ticks];
    for (idx, ins) in c.instructions.iter().enumerate() {
        for q in ins.qubits() {
            touched[ticks[idx]][q] = true;
        }
        if matches!(ins, Instruction::Measure { .. } | Instruction::Reset { .. })
            && idx < noiseless_from
        {
            meas_or_reset_tick[ticks[idx]] = true;
        }
    }
    let is_live = |q: usize, tick: usize| live[q].iter().any(|&(a, b)| a <= tick && tick <= b);

    // fault frames, born during the sweep
    let mut frames: Vec<Frame> = Vec::new();
    let mut meta: Vec<(f64, FaultKind, usize, u8)> = Vec::new();
    let mut index: Vec<Vec<u32>> = vec![Vec::new(); n_qubits];
    let mut channels_meas: Vec<FaultChannel> = Vec::new();

    let mut born =
        |frames: &mut Vec<Frame>,
         index: &mut Vec<Vec<u32>>,
         meta: &mut Vec<(f64, FaultKind, usize, u8)>,
         weight: f64,
         kind: FaultKind,
         loc: usize,
         comp_id: u8,
         paulis: &[(usize, Comp)]| {
            let id = frames.len() as u32;
            let mut f = Frame { support: Vec::new(), flips: Vec::new() };
            for &(q, cc) in paulis {
                if !cc.is_i() {
                    f.support.push((q as u32, cc));
                    index[q].push(id);
                }
            }
            frames.push(f);
            meta.push((weight, kind, loc, comp_id));
        };

    let mut current_tick = 0usize;
    let spawn_idle = |tick: usize,
                      frames: &mut Vec<Frame>,
                      index: &mut Vec<Vec<u32>>,
                      meta: &mut Vec<(f64, FaultKind, usize, u8)>,
                      born: &mut dyn FnMut(
        &mut Vec<Frame>,
        &mut Vec<Vec<u32>>,
        &mut Vec<(f64, FaultKind, usize, u8)>,
        f64,
        FaultKind,
        usize,
        u8,
        &[(usize, Comp)],
    ),
                      nm: &NoiseModel,
                      touched: &[Vec<bool>],
                      meas_or_reset_tick: &[bool],
                      n_qubits: usize,
                      is_live: &dyn Fn(usize, usize) -> bool| {
        for q in 0..n_qubits {
            if touched[tick][q] || !is_live(q, tick) {
                continue;
            }
            if nm.m_idle > 0.0 {
                for (ci, &cc) in PAULI_COMPONENTS.iter().enumerate() {
                    born(frames, index, meta, nm.m_idle / 3.0, FaultKind::Idle, tick, ci as u8, &[(q, cc)]);
                }
            }
            if nm.m_res > 0.0 && meas_or_reset_tick[tick] {
                for (ci, &cc) in PAULI_COMPONENTS.iter().enumerate() {
                    born(
                        frames,
                        index,
                        meta,
                        nm.m_res / 3.0,
                        FaultKind::ResonatorIdle,
                        tick,
                        ci as u8,
                        &[(q, cc)],
                    );
                }
            }
        }
    };

    if noisy_tick_end > 0 {
        spawn_idle(
            0, &mut frames, &mut index, &mut meta, &mut born, nm, &touched, &meas_or_reset_tick,
            n_qubits, &is_live,
        );
    }

    for (idx, ins) in c.instructions.iter().enumerate() {
        let noisy = idx < noiseless_from;
        match ins {
            Instruction::Tick => {
                current_tick += 1;
                if current_tick < noisy_tick_end {
                    spawn_idle(
                        current_tick, &mut frames, &mut index, &mut meta, &mut born, nm, &touched,
                        &meas_or_reset_tick, n_qubits, &is_live,
                    );
                }
            }
            Instruction::Reset { q, basis } => {
                // collapse existing frames on q
                clear_qubit(*q, &mut frames, &mut index);
                if noisy && nm.m_init > 0.0 {
                    let flip = match basis {
                        Basis::Z => Comp { z: false, x: true },
                        Basis::X => Comp { z: true, x: false },
                    };
                    born(&mut frames, &mut index, &mut meta, nm.m_init, FaultKind::InitFlip, idx, 0, &[(*q, flip)]);
                }
            }
            Instruction::Gate1 { kind, q } => {
                for &fid in &index[*q] {
                    let f = &mut frames[fid as usize];
                    let cc = f.comp(*q);
                    if cc.is_i() {
                        continue;
                    }
                    let nc = match kind {
                        Gate1Kind::H => Comp { z: cc.x, x: cc.z },
                        Gate1Kind::S | Gate1Kind::Sdg => Comp { z: cc.z ^ cc.x, x: cc.x },
                        Gate1Kind::X | Gate1Kind::Z => cc,
                    };
                    set_existing(f, *q, nc);
                }
                if noisy && nm.m1 > 0.0 {
                    for (ci, &cc) in PAULI_COMPONENTS.iter().enumerate() {
                        born(&mut frames, &mut index, &mut meta, nm.m1 / 3.0, FaultKind::Depol1, idx, ci as u8, &[(*q, cc)]);
                    }
                }
            }
            Instruction::Gate2 { kind, control, target } => {
                apply_gate2(*kind, *control, *target, &mut frames, &mut index);
                if noisy && nm.m2 > 0.0 {
                    let mut ci = 0u8;
                    for pc in 0..4usize {
                        for pt in 0..4usize {
                            if pc == 0 && pt == 0 {
                                continue;
                            }
                            let comp_of = |code: usize| -> Comp {
                                match code {
                                    0 => Comp::default(),
                                    1 => Comp { z: true, x: false },
                                    2 => Comp { z: false, x: true },
                                    _ => Comp { z: true, x: true },
                                }
                            };
                            born(
                                &mut frames,
                                &mut index,
                                &mut meta,
                                nm.m2 / 15.0,
                                FaultKind::Depol2,
                                idx,
                                ci,
                                &[(*control, comp_of(pc)), (*target, comp_of(pt))],
                            );
                            ci += 1;
                        }
                    }
                }
            }
            Instruction::Measure { q, basis, label } => {
                let lid = label_order[label.as_str()] as u32;
                for &fid in &index[*q] {
                    let f = &mut frames[fid as usize];
                    let cc = f.comp(*q);
                    let flips = match basis {
                        Basis::Z => cc.x,
                        Basis::X => cc.z,
                    };
                    if flips {
                        f.flips.push(lid);
                    }
                }
                clear_qubit(*q, &mut frames, &mut index);
                if noisy && nm.m_meas > 0.0 {
                    // classical flip channel, no Pauli
                    let mut dets = BitVec::zeros(c.detectors.len());
                    for &d in &label_dets[lid as usize] {
                        dets.flip(d as usize);
                    }
                    let mut logs = BitVec::zeros(c.logicals.len());
                    for &l in &label_logs[lid as usize] {
                        logs.flip(l as usize);
                    }
                    channels_meas.push(FaultChannel {
                        weight: nm.m_meas,
                        kind: FaultKind::MeasFlip,
                        location: idx,
                        component: 0,
                        dets,
                        logs,
                        residual: record_residual.then(|| PauliString::identity(c.n_data)),
                    });
                }
            }
        }
    }

    // assemble channels from frames
    let mut out = Vec::with_capacity(frames.len() + channels_meas.len());
    for (fid, f) in frames.iter().enumerate() {
        let (weight, kind, location, component) = meta[fid];
        let mut dets = BitVec::zeros(c.detectors.len());
        let mut logs = BitVec::zeros(c.logicals.len());
        for &lid in &f.flips {
            for &d in &label_dets[lid as usize] {
                dets.flip(d as usize);
            }
            for &l in &label_logs[lid as usize] {
                logs.flip(l as usize);
            }
        }
        let residual = record_residual.then(|| {
            let mut p = PauliString::identity(c.n_data);
            for &(q, cc) in &f.support {
                if (q as usize) < c.n_data {
                    p.set_kind(q as usize, cc.kind());
                }
            }
            p
        });
        out.push(FaultChannel { weight, kind, location, component, dets, logs, residual });
    }
    out.extend(channels_meas);
    out
}

fn set_existing(f: &mut Frame, q: usize, c: Comp) {
    if let Some(slot) = f.support.iter_mut().find(|(qq, _)| *qq as usize == q) {
        slot.1 = c;
    } else {
        debug_assert!(c.is_i(), "gaining support must go through Frame::set");
    }
}

fn clear_qubit(q: usize, frames: &mut [Frame], index: &mut [Vec<u32>]) {
    for &fid in &index[q] {
        let f = &mut frames[fid as usize];
        f.support.retain(|(qq, _)| *qq as usize != q);
    }
    index[q].clear();
}

fn apply_gate2(kind: Gate2Kind, control: usize, target: usize, frames: &mut Vec<Frame>, index: &mut Vec<Vec<u32>>) {
    // gather affected frames once (a frame may sit on both qubits)
    let mut ids: Vec<u32> = index[control]
        .iter()
        .chain(index[target].iter())
        .copied()
        .collect();
    ids.sort_unstable();
    ids.dedup();
    for fid in ids {
        let f = &mut frames[fid as usize];
        let cc = f.comp(control);
        let ct = f.comp(target);
        let (nc, nt) = match kind {
            Gate2Kind::Cx => (
                Comp { z: cc.z ^ ct.z, x: cc.x },
                Comp { z: ct.z, x: ct.x ^ cc.x },
            ),
            Gate2Kind::Cz => (
                Comp { z: cc.z ^ ct.x, x: cc.x },
                Comp { z: ct.z ^ cc.x, x: ct.x },
            ),
            Gate2Kind::Cp(p) => {
                let p: PauliKind = p.into();
                let anti = ct.kind().anticommutes(p);
                let (pz, px) = p.bits();
                (
                    Comp { z: cc.z ^ anti, x: cc.x },
                    Comp { z: ct.z ^ (cc.x & pz), x: ct.x ^ (cc.x & px) },
                )
            }
        };
        let id = fid;
        if f.comp(control) != nc {
            set_or_grow(f, control, nc, index, id);
        }
        if f.comp(target) != nt {
            set_or_grow(f, target, nt, index, id);
        }
    }
}

fn set_or_grow(f: &mut Frame, q: usize, c: Comp, index: &mut [Vec<u32>], id: u32) {
    if let Some(slot) = f.support.iter_mut().find(|(qq, _)| *qq as usize == q) {
        slot.1 = c;
    } else if !c.is_i() {
        f.support.push((q as u32, c));
        if !index[q].contains(&id) {
            index[q].push(id);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Detector, Logical, PauliKindSer};

    /// bare-style measurement of ZZ on 2 data qubits, one round
    fn zz_circuit() -> Circuit {
        let mut c = Circuit { n_data: 2, n_anc: 1, ..Default::default() };
        c.instructions = vec![
            Instruction::Reset { q: 2, basis: Basis::X },
            Instruction::Tick,
            Instruction::Gate2 { kind: Gate2Kind::Cp(PauliKindSer::Z), control: 2, target: 0 },
            Instruction::Tick,
            Instruction::Gate2 { kind: Gate2Kind::Cp(PauliKindSer::Z), control: 2, target: 1 },
            Instruction::Tick,
            Instruction::Measure { q: 2, basis: Basis::X, label: "m0".into() },
        ];
        c.detectors.push(Detector { labels: vec!["m0".into()] });
        c.logicals.push(Logical { index: 0, labels: vec![] });
        c
    }

    #[test]
    fn depol2_site_count() {
        let c = zz_circuit();
        let nm = NoiseModel {
            m1: 0.0,
            m_meas: 0.0,
            m_init: 0.0,
            m_idle: 0.0,
            m_res: 0.0,
            ..NoiseModel::uniform()
        };
        let ch = enumerate_faults(&c, &nm, false);
        // 2 two-qubit gates × 15 components
        assert_eq!(ch.len(), 30);
        assert!(ch.iter().all(|f| matches!(f.kind, FaultKind::Depol2)));
    }

    #[test]
    fn x_error_before_coupling_flips_syndrome() {
        let mut c = zz_circuit();
        // noiseless circuit except an init flip on data 0? emulate: X on
        // data qubit at tick 0 = idle channel there; simpler: check that a
        // data-X idle channel flips the ZZ measurement
        c.noiseless_from = None;
        let nm = NoiseModel {
            m1: 0.0,
            m2: 0.0,
            m_meas: 0.0,
            m_init: 0.0,
            m_res: 0.0,
            ..NoiseModel::uniform()
        };
        let ch = enumerate_faults(&c, &nm, true);
        // idle X on data qubit 0 in tick 0 (before its CP) must flip m0
        let f = ch
            .iter()
            .find(|f| {
                f.kind == FaultKind::Idle
                    && f.location == 0
                    && f.residual.as_ref().map(|r| r.kind(0)) == Some(PauliKind::X)
            })
            .expect("idle X channel exists");
        assert!(f.dets.get(0), "X before ZZ coupling flips the outcome");
        // idle X in tick 2 (after qubit 0's CP, before measurement) on
        // qubit 0 does not flip anything
        let late = ch
            .iter()
            .find(|f| {
                f.kind == FaultKind::Idle
                    && f.location == 2
                    && f.residual.as_ref().map(|r| r.kind(0)) == Some(PauliKind::X)
            })
            .expect("late idle X exists");
        assert!(!late.dets.get(0));
    }

    #[test]
    fn meas_flip_flips_exactly_its_detector() {
        let c = zz_circuit();
        let nm = NoiseModel {
            m1: 0.0,
            m2: 0.0,
            m_init: 0.0,
            m_idle: 0.0,
            m_res: 0.0,
            ..NoiseModel::uniform()
        };
        let ch = enumerate_faults(&c, &nm, false);
        assert_eq!(ch.len(), 1);
        assert_eq!(ch[0].kind, FaultKind::MeasFlip);
        assert!(ch[0].dets.get(0));
    }

    #[test]
    fn hook_error_propagates_to_data() {
        // X on the ancilla after the first CP: residual on data qubit 1
        let c = zz_circuit();
        let nm = NoiseModel {
            m1: 0.0,
            m_meas: 0.0,
            m_init: 0.0,
            m_idle: 0.0,
            m_res: 0.0,
            ..NoiseModel::uniform()
        };
        let ch = enumerate_faults(&c, &nm, true);
        // depol2 on the first CP, component (control=X, target=I): ci = 7
        let f = ch
            .iter()
            .find(|f| f.location == 2 && f.component == 7)
            .expect("ancilla X hook exists");
        assert_eq!(
            f.residual.as_ref().map(|r| (r.kind(0), r.kind(1))),
            Some((PauliKind::I, PauliKind::Z))
        );
        // it must not flip the X-basis ancilla measurement
        assert!(!f.dets.get(0));
    }
}
