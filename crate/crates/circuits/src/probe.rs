//! Exhaustive fault-injection probes: circuit distance up to weight 3 and
//! single-fault flag behaviour classification.

use crate::noise::FaultChannel;
use mirror_core::bits::BitVec;
use mirror_core::pauli::PauliString;
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeResult {
    /// minimal number of faults producing an undetected logical flip
    Found { weight: usize, channels: Vec<usize> },
    Above { up_to: usize },
}

#[derive(Clone, Debug, Default)]
pub struct ProbeCoverage {
    pub pairs_checked: u64,
    pub triples_checked: u64,
    pub triples_budget_hit: bool,
}

/// Search all singletons, pairs, and (optionally) triples of fault channels
/// for a combination with empty detector signature and nonempty logical
/// signature. `triple_budget` caps the pair-anchored triple scan.
pub fn circuit_distance_probe(
    channels: &[FaultChannel],
    up_to: usize,
    triple_budget: u64,
) -> (ProbeResult, ProbeCoverage) {
    assert!((1..=3).contains(&up_to));
    let mut cov = ProbeCoverage::default();
    // singles
    for (i, ch) in channels.iter().enumerate() {
        if ch.dets.is_zero() && !ch.logs.is_zero() {
            return (ProbeResult::Found { weight: 1, channels: vec![i] }, cov);
        }
    }
    if up_to == 1 {
        return (ProbeResult::Above { up_to }, cov);
    }
    // pairs: identical detector signatures with differing logical signatures
    let mut groups: HashMap<&BitVec, Vec<usize>> = HashMap::new();
    for (i, ch) in channels.iter().enumerate() {
        groups.entry(&ch.dets).or_default().push(i);
    }
    for members in groups.values() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                cov.pairs_checked += 1;
                if channels[i].logs != channels[j].logs {
                    return (ProbeResult::Found { weight: 2, channels: vec![i, j] }, cov);
                }
            }
        }
    }
    if up_to == 2 {
        return (ProbeResult::Above { up_to }, cov);
    }
    // triples: anchor on pairs (i, j), look the XOR up in the signature map
    let mut by_sig: HashMap<BitVec, Vec<usize>> = HashMap::new();
    for (i, ch) in channels.iter().enumerate() {
        by_sig.entry(ch.dets.clone()).or_default().push(i);
    }
    'outer: for i in 0..channels.len() {
        for j in (i + 1)..channels.len() {
            if cov.triples_checked >= triple_budget {
                cov.triples_budget_hit = true;
                break 'outer;
            }
            cov.triples_checked += 1;
            let mut need = channels[i].dets.clone();
            need.xor_assign(&channels[j].dets);
            if let Some(ks) = by_sig.get(&need) {
                for &k in ks {
                    if k <= j {
                        continue;
                    }
                    let mut logs = channels[i].logs.clone();
                    logs.xor_assign(&channels[j].logs);
                    logs.xor_assign(&channels[k].logs);
                    if !logs.is_zero() {
                        return (
                            ProbeResult::Found { weight: 3, channels: vec![i, j, k] },
                            cov,
                        );
                    }
                }
            }
        }
    }
    (ProbeResult::Above { up_to }, cov)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultClass {
    DetectedByFlag,
    DetectedBySyndrome,
    Benign,
    Malign,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct FlagReport {
    pub total: usize,
    pub detected_by_flag: usize,
    pub detected_by_syndrome: usize,
    pub benign: usize,
    pub malign: usize,
    /// channel indices of malign faults (undetected with residual weight ≥ 2
    /// modulo the measured stabilizer)
    pub malign_channels: Vec<usize>,
}

impl FlagReport {
    pub fn fault_tolerant(&self) -> bool {
        self.malign == 0
    }
}

/// Classify every single fault of a one-round single-stabilizer circuit.
///
/// `flag_dets` and `syndrome_dets` give the detector indices of the gadget's
/// flags and of its syndrome parity; `stabilizer` is the measured operator
/// (residuals are reduced modulo it).
pub fn verify_flag_behavior(
    channels: &[FaultChannel],
    flag_dets: &[usize],
    syndrome_dets: &[usize],
    stabilizer: &PauliString,
) -> FlagReport {
    let mut report = FlagReport {
        total: channels.len(),
        detected_by_flag: 0,
        detected_by_syndrome: 0,
        benign: 0,
        malign: 0,
        malign_channels: Vec::new(),
    };
    for (i, ch) in channels.iter().enumerate() {
        let flag_hit = flag_dets.iter().any(|&d| ch.dets.get(d));
        let syn_hit = syndrome_dets.iter().any(|&d| ch.dets.get(d));
        let residual = ch
            .residual
            .as_ref()
            .expect("flag verification needs residual recording");
        let w_mod = residual_weight_mod(residual, stabilizer);
        if flag_hit {
            report.detected_by_flag += 1;
        } else if syn_hit {
            report.detected_by_syndrome += 1;
        } else if w_mod <= 1 {
            report.benign += 1;
        } else {
            report.malign += 1;
            report.malign_channels.push(i);
        }
    }
    report
}

/// Residual weight minimized over multiplication by the measured stabilizer.
pub fn residual_weight_mod(residual: &PauliString, stabilizer: &PauliString) -> usize {
    let direct = residual.weight();
    if stabilizer.anticommutes_with(residual) {
        return direct;
    }
    let folded = residual.mul(stabilizer).weight();
    direct.min(folded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mirror_core::bits::BitVec;

    fn ch(dets: &[usize], logs: &[usize]) -> FaultChannel {
        FaultChannel {
            weight: 1.0,
            kind: crate::noise::FaultKind::Depol1,
            location: 0,
            component: 0,
            dets: BitVec::from_indices(8, dets.iter().copied()),
            logs: BitVec::from_indices(2, logs.iter().copied()),
            residual: None,
        }
    }

    #[test]
    fn finds_single_and_pair() {
        let channels = vec![ch(&[0], &[]), ch(&[], &[0])];
        let (r, _) = circuit_distance_probe(&channels, 2, 1000);
        assert_eq!(r, ProbeResult::Found { weight: 1, channels: vec![1] });

        let channels = vec![ch(&[0, 1], &[0]), ch(&[0, 1], &[]), ch(&[2], &[])];
        let (r, _) = circuit_distance_probe(&channels, 2, 1000);
        assert_eq!(r, ProbeResult::Found { weight: 2, channels: vec![0, 1] });

        let channels = vec![ch(&[0], &[0]), ch(&[1], &[0]), ch(&[2], &[])];
        let (r, _) = circuit_distance_probe(&channels, 2, 1000);
        assert_eq!(r, ProbeResult::Above { up_to: 2 });
    }

    #[test]
    fn finds_triple() {
        let channels = vec![ch(&[0], &[0]), ch(&[1], &[]), ch(&[0, 1], &[])];
        let (r, cov) = circuit_distance_probe(&channels, 3, 1000);
        assert_eq!(r, ProbeResult::Found { weight: 3, channels: vec![0, 1, 2] });
        assert!(!cov.triples_budget_hit);
    }
}
