//! Symbolic stabilizer simulation used to verify that every declared
//! detector is deterministic (and zero) in the noiseless circuit.
//!
//! The state is a stabilizer group; measurement outcomes are affine boolean
//! expressions over fresh symbols introduced by nondeterministic
//! measurements. A detector parity is deterministic iff the symbols cancel
//! in the XOR of its outcomes, and correct iff the remaining constant is 0.

use crate::circuit::{Basis, Circuit, Gate1Kind, Gate2Kind, Instruction};
use mirror_core::pauli::{PauliKind, PauliString};
use std::collections::HashMap;

/// c ⊕ Σ r_i over the random symbols r_i.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub constant: bool,
    pub symbols: Vec<u32>, // sorted, XOR semantics
}

impl Outcome {
    fn xor(&self, other: &Outcome) -> Outcome {
        let mut symbols = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.symbols.len() || j < other.symbols.len() {
            match (self.symbols.get(i), other.symbols.get(j)) {
                (Some(&a), Some(&b)) if a == b => {
                    i += 1;
                    j += 1;
                }
                (Some(&a), Some(&b)) if a < b => {
                    symbols.push(a);
                    i += 1;
                }
                (Some(_), Some(&b)) => {
                    symbols.push(b);
                    j += 1;
                }
                (Some(&a), None) => {
                    symbols.push(a);
                    i += 1;
                }
                (None, Some(&b)) => {
                    symbols.push(b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Outcome { constant: self.constant ^ other.constant, symbols }
    }

    pub fn is_deterministic_zero(&self) -> bool {
        !self.constant && self.symbols.is_empty()
    }
}

/// A stabilizer generator with a symbolic sign.
#[derive(Clone, Debug)]
struct SymPauli {
    p: PauliString,
    sign: Outcome,
}

impl SymPauli {
    fn mul(&self, other: &SymPauli) -> SymPauli {
        let mut prod = self.p.mul(&other.p);
        let mut sign = self.sign.xor(&other.sign);
        // fold the concrete ±1 from Pauli algebra into the symbolic sign
        if prod.sign {
            sign.constant = !sign.constant;
            prod.sign = false;
        }
        SymPauli { p: prod, sign }
    }
}

pub struct SymbolicState {
    n: usize,
    gens: Vec<SymPauli>,
    next_symbol: u32,
}

impl SymbolicState {
    /// Start from an explicit stabilizer group (pad with single-qubit Z on
    /// leftover qubits to reach a full n generators).
    pub fn from_generators(n: usize, generators: &[PauliString]) -> SymbolicState {
        let mut gens: Vec<SymPauli> = Vec::new();
        let mut rref = mirror_core::bits::Rref::new(2 * n);
        for g in generators {
            let mut p = g.clone();
            p.sign = false;
            if rref.insert(p.symplectic_row()) {
                gens.push(SymPauli { p, sign: Outcome::default() });
            }
        }
        // complete to a full stabilizer state: greedily add Z_q, then X_q,
        // whichever commutes with everything and is independent
        for q in 0..n {
            for kind in [PauliKind::Z, PauliKind::X] {
                let mut cand = PauliString::identity(n);
                cand.set_kind(q, kind);
                if gens.iter().all(|g| !g.p.anticommutes_with(&cand))
                    && rref.insert(cand.symplectic_row())
                {
                    gens.push(SymPauli { p: cand, sign: Outcome::default() });
                }
            }
        }
        assert_eq!(gens.len(), n, "generator completion must reach n");
        SymbolicState { n, gens, next_symbol: 0 }
    }

    fn apply_gate1(&mut self, kind: Gate1Kind, q: usize) {
        for g in self.gens.iter_mut() {
            let (z, x) = (g.p.z_mask.get(q), g.p.x_mask.get(q));
            let (nz, nx, flip) = match kind {
                // H: X↔Z, Y→−Y
                Gate1Kind::H => (x, z, z && x),
                // S: X→Y, Y→−X, Z→Z
                Gate1Kind::S => (z ^ x, x, z && x),
                // S†: X→−Y, Y→X
                Gate1Kind::Sdg => (z ^ x, x, !z && x),
                // Paulis only flip signs
                Gate1Kind::X => (z, x, z),
                Gate1Kind::Z => (z, x, x),
            };
            g.p.z_mask.set(q, nz);
            g.p.x_mask.set(q, nx);
            if flip {
                g.sign.constant = !g.sign.constant;
            }
        }
    }

    /// Measure `op` (a single-qubit Z or X here); returns the outcome.
    fn measure(&mut self, q: usize, basis: Basis) -> Outcome {
        let mut meas = PauliString::identity(self.n);
        meas.set_kind(
            q,
            match basis {
                Basis::Z => PauliKind::Z,
                Basis::X => PauliKind::X,
            },
        );
        let anti: Vec<usize> = (0..self.gens.len())
            .filter(|&i| self.gens[i].p.anticommutes_with(&meas))
            .collect();
        if anti.is_empty() {
            // deterministic: reduce meas against the group, tracking signs
            let n = self.n;
            let bit = |p: &PauliString, col: usize| {
                if col < n {
                    p.z_mask.get(col)
                } else {
                    p.x_mask.get(col - n)
                }
            };
            let mut acc = SymPauli { p: meas, sign: Outcome::default() };
            let mut work: Vec<SymPauli> = self.gens.clone();
            let mut used = vec![false; work.len()];
            for col in 0..2 * n {
                let Some(r) = (0..work.len()).find(|&r| !used[r] && bit(&work[r].p, col)) else {
                    continue;
                };
                used[r] = true;
                let prow = work[r].clone();
                for (i, w) in work.iter_mut().enumerate() {
                    if i != r && !used[i] && bit(&w.p, col) {
                        *w = w.mul(&prow);
                    }
                }
                if bit(&acc.p, col) {
                    acc = acc.mul(&prow);
                }
            }
            assert!(acc.p.is_identity(), "commuting measurement must be in the group");
            let mut out = acc.sign;
            if acc.p.sign {
                out.constant = !out.constant;
            }
            out
        } else {
            // random: fresh symbol r; replace one anticommuting generator
            let sym = self.next_symbol;
            self.next_symbol += 1;
            let pivot = anti[0];
            let pivot_gen = self.gens[pivot].clone();
            for &i in &anti[1..] {
                self.gens[i] = self.gens[i].mul(&pivot_gen);
            }
            self.gens[pivot] = SymPauli {
                p: meas,
                sign: Outcome { constant: false, symbols: vec![sym] },
            };
            Outcome { constant: false, symbols: vec![sym] }
        }
    }

    fn reset(&mut self, q: usize, basis: Basis) {
        // measure, then conditionally flip to the target state: conjugation
        // by F^o (F anticommuting with the measured operator) XORs the
        // outcome expression into every generator that anticommutes with F
        let o = self.measure(q, basis);
        if o == Outcome::default() {
            return;
        }
        let mut flip = PauliString::identity(self.n);
        flip.set_kind(
            q,
            match basis {
                Basis::Z => PauliKind::X,
                Basis::X => PauliKind::Z,
            },
        );
        for g in self.gens.iter_mut() {
            if g.p.anticommutes_with(&flip) {
                g.sign = g.sign.xor(&o);
            }
        }
    }
}

/// Run the noiseless circuit on the ideal initial state (the joint +1
/// eigenspace of the given stabilizers and logicals) and return each
/// detector's and logical's outcome expression.
pub fn noiseless_outcomes(
    circuit: &Circuit,
    stabilizers: &[PauliString],
    logicals: &[PauliString],
) -> (Vec<Outcome>, Vec<Outcome>) {
    let n_total = circuit.num_qubits();
    // embed data-qubit stabilizers into the full register; ancillae start |0⟩
    let mut gens: Vec<PauliString> = Vec::new();
    let embed = |p: &PauliString| {
        let mut e = PauliString::identity(n_total);
        for q in 0..p.num_qubits() {
            e.set_kind(q, p.kind(q));
        }
        e
    };
    for s in stabilizers {
        gens.push(embed(s));
    }
    for l in logicals {
        gens.push(embed(l));
    }
    for q in circuit.n_data..n_total {
        let mut z = PauliString::identity(n_total);
        z.set_kind(q, PauliKind::Z);
        gens.push(z);
    }
    let mut state = SymbolicState::from_generators(n_total, &gens);
    let mut measured: HashMap<String, Outcome> = HashMap::new();
    for ins in &circuit.instructions {
        match ins {
            Instruction::Tick => {}
            Instruction::Reset { q, basis } => state.reset(*q, *basis),
            Instruction::Gate1 { kind, q } => state.apply_gate1(*kind, *q),
            Instruction::Gate2 { kind, control, target } => {
                apply_lowered_gate2(&mut state, *kind, *control, *target)
            }
            Instruction::Measure { q, basis, label } => {
                let o = state.measure(*q, *basis);
                measured.insert(label.clone(), o);
            }
        }
    }
    let fold = |labels: &[String]| -> Outcome {
        let mut acc = Outcome::default();
        for l in labels {
            acc = acc.xor(&measured[l]);
        }
        acc
    };
    let dets = circuit.detectors.iter().map(|d| fold(&d.labels)).collect();
    let logs = circuit.logicals.iter().map(|l| fold(&l.labels)).collect();
    (dets, logs)
}

/// Lower CZ and CP onto CX with single-qubit basis changes, then apply.
fn apply_lowered_gate2(state: &mut SymbolicState, kind: Gate2Kind, c: usize, t: usize) {
    match kind {
        Gate2Kind::Cx => state.apply_gate2_cx(c, t),
        Gate2Kind::Cz => {
            state.apply_gate1(Gate1Kind::H, t);
            state.apply_gate2_cx(c, t);
            state.apply_gate1(Gate1Kind::H, t);
        }
        Gate2Kind::Cp(p) => {
            let p: PauliKind = p.into();
            match p {
                PauliKind::X => state.apply_gate2_cx(c, t),
                PauliKind::Z => {
                    state.apply_gate1(Gate1Kind::H, t);
                    state.apply_gate2_cx(c, t);
                    state.apply_gate1(Gate1Kind::H, t);
                }
                PauliKind::Y => {
                    // CY = (S_t) CX (S_t†) up to phase
                    state.apply_gate1(Gate1Kind::Sdg, t);
                    state.apply_gate2_cx(c, t);
                    state.apply_gate1(Gate1Kind::S, t);
                }
                PauliKind::I => {}
            }
        }
    }
}

impl SymbolicState {
    fn apply_gate2_cx(&mut self, c: usize, t: usize) {
        for g in self.gens.iter_mut() {
            let (zc, xc) = (g.p.z_mask.get(c), g.p.x_mask.get(c));
            let (zt, xt) = (g.p.z_mask.get(t), g.p.x_mask.get(t));
            if xc && zt && (xt == zc) {
                g.sign.constant = !g.sign.constant;
            }
            g.p.x_mask.set(t, xt ^ xc);
            g.p.z_mask.set(c, zc ^ zt);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Detector, PauliKindSer};

    #[test]
    fn bare_zz_round_pair_is_deterministic() {
        // two rounds of measuring ZZ on two data qubits
        let mut c = Circuit { n_data: 2, n_anc: 1, ..Default::default() };
        for r in 0..2 {
            c.instructions.extend([
                Instruction::Reset { q: 2, basis: Basis::X },
                Instruction::Tick,
                Instruction::Gate2 { kind: Gate2Kind::Cp(PauliKindSer::Z), control: 2, target: 0 },
                Instruction::Tick,
                Instruction::Gate2 { kind: Gate2Kind::Cp(PauliKindSer::Z), control: 2, target: 1 },
                Instruction::Tick,
                Instruction::Measure { q: 2, basis: Basis::X, label: format!("m{r}") },
            ]);
            c.instructions.push(Instruction::Tick);
        }
        c.detectors.push(Detector { labels: vec!["m0".into()] });
        c.detectors.push(Detector { labels: vec!["m0".into(), "m1".into()] });
        let mut zz = PauliString::identity(2);
        zz.set_kind(0, PauliKind::Z);
        zz.set_kind(1, PauliKind::Z);
        let (dets, _) = noiseless_outcomes(&c, &[zz], &[]);
        assert!(dets[0].is_deterministic_zero(), "round-0 absolute: {:?}", dets[0]);
        assert!(dets[1].is_deterministic_zero(), "round comparison: {:?}", dets[1]);
    }

    #[test]
    fn x_basis_reset_gives_plus_state() {
        let mut c = Circuit { n_data: 1, n_anc: 0, ..Default::default() };
        c.instructions.extend([
            Instruction::Reset { q: 0, basis: Basis::X },
            Instruction::Tick,
            Instruction::Measure { q: 0, basis: Basis::X, label: "a".into() },
        ]);
        c.detectors.push(Detector { labels: vec!["a".into()] });
        let (dets, _) = noiseless_outcomes(&c, &[], &[]);
        assert!(dets[0].is_deterministic_zero());
    }
}
