//! Circuit representation and the line-based text format.
//!
//! Instructions are grouped into ticks by `TICK` barriers; no qubit may be
//! touched twice between consecutive barriers. `DETECTOR` and `LOGICAL`
//! lines declare parity sets over measurement labels and sit at the end of
//! the stream.

use mirror_core::pauli::PauliKind;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Gate1Kind {
    H,
    S,
    Sdg,
    X,
    Z,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Gate2Kind {
    Cx,
    Cz,
    /// controlled-Pauli: applies the Pauli to the target when the control
    /// is |1⟩
    Cp(PauliKindSer),
}

/// PauliKind mirror that serializes as a letter.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum PauliKindSer {
    X,
    Y,
    Z,
}

impl From<PauliKindSer> for PauliKind {
    fn from(p: PauliKindSer) -> PauliKind {
        match p {
            PauliKindSer::X => PauliKind::X,
            PauliKindSer::Y => PauliKind::Y,
            PauliKindSer::Z => PauliKind::Z,
        }
    }
}

impl TryFrom<PauliKind> for PauliKindSer {
    type Error = ();
    fn try_from(p: PauliKind) -> Result<PauliKindSer, ()> {
        match p {
            PauliKind::X => Ok(PauliKindSer::X),
            PauliKind::Y => Ok(PauliKindSer::Y),
            PauliKind::Z => Ok(PauliKindSer::Z),
            PauliKind::I => Err(()),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Instruction {
    Tick,
    Reset { q: usize, basis: Basis },
    Gate1 { kind: Gate1Kind, q: usize },
    Gate2 { kind: Gate2Kind, control: usize, target: usize },
    Measure { q: usize, basis: Basis, label: String },
}

impl Instruction {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Instruction::Tick => vec![],
            Instruction::Reset { q, .. } => vec![*q],
            Instruction::Gate1 { q, .. } => vec![*q],
            Instruction::Gate2 { control, target, .. } => vec![*control, *target],
            Instruction::Measure { q, .. } => vec![*q],
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Detector {
    pub labels: Vec<String>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Logical {
    pub index: usize,
    pub labels: Vec<String>,
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct Circuit {
    pub n_data: usize,
    pub n_anc: usize,
    pub instructions: Vec<Instruction>,
    pub detectors: Vec<Detector>,
    pub logicals: Vec<Logical>,
    /// instruction index from which execution is treated as ideal readout
    /// (no fault sites); serialized as a comment so importers can ignore it
    pub noiseless_from: Option<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("qubit {q} touched twice in one tick (instruction {index})")]
    DoubleTouch { q: usize, index: usize },
    #[error("duplicate measurement label {0}")]
    DuplicateLabel(String),
    #[error("unknown measurement label {0} in detector or logical")]
    UnknownLabel(String),
}

impl Circuit {
    pub fn num_qubits(&self) -> usize {
        self.n_data + self.n_anc
    }

    /// Number of ticks (barrier-separated groups).
    pub fn depth(&self) -> usize {
        1 + self
            .instructions
            .iter()
            .filter(|i| matches!(i, Instruction::Tick))
            .count()
    }

    /// Tick index of each instruction.
    pub fn instruction_ticks(&self) -> Vec<usize> {
        let mut t = 0;
        self.instructions
            .iter()
            .map(|i| {
                if matches!(i, Instruction::Tick) {
                    t += 1;
                }
                t
            })
            .collect()
    }

    /// Enforce the structural invariants: one touch per qubit per tick,
    /// unique labels, detectors referencing known labels.
    pub fn validate(&self) -> Result<(), CircuitError> {
        let mut tick_touched: std::collections::HashSet<usize> = Default::default();
        let mut labels: std::collections::HashSet<&str> = Default::default();
        for (idx, ins) in self.instructions.iter().enumerate() {
            if matches!(ins, Instruction::Tick) {
                tick_touched.clear();
                continue;
            }
            for q in ins.qubits() {
                if !tick_touched.insert(q) {
                    return Err(CircuitError::DoubleTouch { q, index: idx });
                }
            }
            if let Instruction::Measure { label, .. } = ins {
                if !labels.insert(label) {
                    return Err(CircuitError::DuplicateLabel(label.clone()));
                }
            }
        }
        for d in &self.detectors {
            for l in &d.labels {
                if !labels.contains(l.as_str()) {
                    return Err(CircuitError::UnknownLabel(l.clone()));
                }
            }
        }
        for l in &self.logicals {
            for lab in &l.labels {
                if !labels.contains(lab.as_str()) {
                    return Err(CircuitError::UnknownLabel(lab.clone()));
                }
            }
        }
        Ok(())
    }

    /// Map from measurement label to its order in the stream.
    pub fn label_order(&self) -> HashMap<&str, usize> {
        let mut m = HashMap::new();
        let mut i = 0;
        for ins in &self.instructions {
            if let Instruction::Measure { label, .. } = ins {
                m.insert(label.as_str(), i);
                i += 1;
            }
        }
        m
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "QUBITS {} {}", self.n_data, self.n_anc).unwrap();
        for (idx, ins) in self.instructions.iter().enumerate() {
            if Some(idx) == self.noiseless_from {
                writeln!(out, "# noiseless-from {idx}").unwrap();
            }
            match ins {
                Instruction::Tick => writeln!(out, "TICK").unwrap(),
                Instruction::Reset { q, basis: Basis::Z } => writeln!(out, "R {q}").unwrap(),
                Instruction::Reset { q, basis: Basis::X } => writeln!(out, "RX {q}").unwrap(),
                Instruction::Gate1 { kind, q } => {
                    let name = match kind {
                        Gate1Kind::H => "H",
                        Gate1Kind::S => "S",
                        Gate1Kind::Sdg => "SDG",
                        Gate1Kind::X => "X",
                        Gate1Kind::Z => "Z",
                    };
                    writeln!(out, "{name} {q}").unwrap();
                }
                Instruction::Gate2 { kind, control, target } => match kind {
                    Gate2Kind::Cx => writeln!(out, "CX {control} {target}").unwrap(),
                    Gate2Kind::Cz => writeln!(out, "CZ {control} {target}").unwrap(),
                    Gate2Kind::Cp(p) => {
                        let letter = match p {
                            PauliKindSer::X => 'X',
                            PauliKindSer::Y => 'Y',
                            PauliKindSer::Z => 'Z',
                        };
                        writeln!(out, "CP {letter} {control} {target}").unwrap();
                    }
                },
                Instruction::Measure { q, basis: Basis::Z, label } => {
                    writeln!(out, "M {q} {label}").unwrap()
                }
                Instruction::Measure { q, basis: Basis::X, label } => {
                    writeln!(out, "MX {q} {label}").unwrap()
                }
            }
        }
        if self.noiseless_from == Some(self.instructions.len()) {
            writeln!(out, "# noiseless-from {}", self.instructions.len()).unwrap();
        }
        for d in &self.detectors {
            writeln!(out, "DETECTOR {}", d.labels.join(" ")).unwrap();
        }
        for l in &self.logicals {
            writeln!(out, "LOGICAL {} {}", l.index, l.labels.join(" ")).unwrap();
        }
        out
    }

    /// Parse the text format. Unknown trailing fields on instruction lines
    /// are ignored; `#` starts a comment (the `noiseless-from` comment is
    /// recognized and restored).
    pub fn from_text(text: &str) -> Result<Circuit, CircuitError> {
        let mut c = Circuit::default();
        let mut saw_header = false;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("noiseless-from") {
                    if let Ok(idx) = v.trim().parse::<usize>() {
                        c.noiseless_from = Some(idx);
                    }
                }
                continue;
            }
            let mut tok = line.split_whitespace();
            let head = tok.next().unwrap();
            let err = |message: String| CircuitError::Parse { line: ln + 1, message };
            let next_usize = |tok: &mut std::str::SplitWhitespace, what: &str| {
                tok.next()
                    .ok_or_else(|| err(format!("missing {what}")))
                    .and_then(|t| t.parse::<usize>().map_err(|e| err(format!("bad {what}: {e}"))))
            };
            match head {
                "QUBITS" => {
                    c.n_data = next_usize(&mut tok, "n_data")?;
                    c.n_anc = next_usize(&mut tok, "n_anc")?;
                    saw_header = true;
                }
                "TICK" => c.instructions.push(Instruction::Tick),
                "R" | "RX" => {
                    let q = next_usize(&mut tok, "qubit")?;
                    c.instructions.push(Instruction::Reset {
                        q,
                        basis: if head == "R" { Basis::Z } else { Basis::X },
                    });
                }
                "H" | "S" | "SDG" | "X" | "Z" => {
                    let q = next_usize(&mut tok, "qubit")?;
                    let kind = match head {
                        "H" => Gate1Kind::H,
                        "S" => Gate1Kind::S,
                        "SDG" => Gate1Kind::Sdg,
                        "X" => Gate1Kind::X,
                        _ => Gate1Kind::Z,
                    };
                    c.instructions.push(Instruction::Gate1 { kind, q });
                }
                "CX" | "CZ" => {
                    let a = next_usize(&mut tok, "control")?;
                    let b = next_usize(&mut tok, "target")?;
                    c.instructions.push(Instruction::Gate2 {
                        kind: if head == "CX" { Gate2Kind::Cx } else { Gate2Kind::Cz },
                        control: a,
                        target: b,
                    });
                }
                "CP" => {
                    let p = tok.next().ok_or_else(|| err("missing pauli".into()))?;
                    let p = match p {
                        "X" => PauliKindSer::X,
                        "Y" => PauliKindSer::Y,
                        "Z" => PauliKindSer::Z,
                        other => return Err(err(format!("bad pauli {other:?}"))),
                    };
                    let a = next_usize(&mut tok, "control")?;
                    let b = next_usize(&mut tok, "target")?;
                    c.instructions.push(Instruction::Gate2 {
                        kind: Gate2Kind::Cp(p),
                        control: a,
                        target: b,
                    });
                }
                "M" | "MX" => {
                    let q = next_usize(&mut tok, "qubit")?;
                    let label = tok
                        .next()
                        .ok_or_else(|| err("missing label".into()))?
                        .to_string();
                    c.instructions.push(Instruction::Measure {
                        q,
                        basis: if head == "M" { Basis::Z } else { Basis::X },
                        label,
                    });
                }
                "DETECTOR" => {
                    c.detectors.push(Detector {
                        labels: tok.map(|s| s.to_string()).collect(),
                    });
                }
                "LOGICAL" => {
                    let index = next_usize(&mut tok, "logical index")?;
                    c.logicals.push(Logical {
                        index,
                        labels: tok.map(|s| s.to_string()).collect(),
                    });
                }
                other => {
                    return Err(CircuitError::Parse {
                        line: ln + 1,
                        message: format!("unknown instruction {other:?}"),
                    })
                }
            }
        }
        if !saw_header {
            return Err(CircuitError::Parse {
                line: 0,
                message: "missing QUBITS header".into(),
            });
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip_bit_exact() {
        let mut c = Circuit {
            n_data: 2,
            n_anc: 1,
            ..Default::default()
        };
        c.instructions = vec![
            Instruction::Reset { q: 2, basis: Basis::X },
            Instruction::Tick,
            Instruction::Gate2 {
                kind: Gate2Kind::Cp(PauliKindSer::Y),
                control: 2,
                target: 0,
            },
            Instruction::Tick,
            Instruction::Gate2 { kind: Gate2Kind::Cx, control: 2, target: 1 },
            Instruction::Tick,
            Instruction::Measure { q: 2, basis: Basis::X, label: "m0".into() },
        ];
        c.detectors.push(Detector { labels: vec!["m0".into()] });
        c.logicals.push(Logical { index: 0, labels: vec!["m0".into()] });
        c.noiseless_from = Some(4);
        c.validate().unwrap();
        let text = c.to_text();
        let back = Circuit::from_text(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn unknown_trailing_fields_ignored() {
        let text = "QUBITS 1 1\nR 1 extra stuff\nTICK\nM 1 lbl trailing junk\n";
        let c = Circuit::from_text(text).unwrap();
        assert_eq!(c.instructions.len(), 3);
        assert!(matches!(
            &c.instructions[2],
            Instruction::Measure { label, .. } if label == "lbl"
        ));
    }

    #[test]
    fn double_touch_rejected() {
        let text = "QUBITS 2 0\nCX 0 1\nCX 1 0\n";
        let c = Circuit::from_text(text).unwrap();
        assert!(matches!(c.validate(), Err(CircuitError::DoubleTouch { q: _, .. })));
    }
}
