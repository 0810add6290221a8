//! Detector error models: fault channels instantiated at a physical rate,
//! with equal-signature channels merged by XOR-combination.

use mirror_circuits::circuit::Circuit;
use mirror_circuits::noise::{enumerate_faults, FaultChannel, NoiseModel};
use mirror_core::bits::BitVec;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DemError {
    #[error("physical rate {p} outside (0, {max}) for this noise model")]
    RateOutOfRange { p: f64, max: f64 },
}

#[derive(Clone, Debug)]
pub struct Channel {
    pub probability: f64,
    pub dets: BitVec,
    pub logs: BitVec,
}

#[derive(Clone, Debug)]
pub struct DetectorModel {
    pub n_dets: usize,
    pub n_logs: usize,
    pub channels: Vec<Channel>,
}

/// Instantiate channel probabilities as multiplier × p and merge channels
/// with identical (detector, logical) signatures via
/// `q = q₁(1−q₂) + q₂(1−q₁)`.
pub fn build_detector_model(
    c: &Circuit,
    nm: &NoiseModel,
    p: f64,
) -> Result<DetectorModel, DemError> {
    let max = 0.5 / nm.max_multiplier().max(f64::MIN_POSITIVE);
    if !(p > 0.0 && p < max) {
        return Err(DemError::RateOutOfRange { p, max });
    }
    let faults = enumerate_faults(c, nm, false);
    Ok(merge_channels(c.detectors.len(), c.logicals.len(), &faults, p))
}

pub fn merge_channels(
    n_dets: usize,
    n_logs: usize,
    faults: &[FaultChannel],
    p: f64,
) -> DetectorModel {
    let mut index: std::collections::HashMap<(BitVec, BitVec), usize> = Default::default();
    let mut channels: Vec<Channel> = Vec::new();
    for f in faults {
        let q = f.weight * p;
        if q == 0.0 {
            continue;
        }
        if f.dets.is_zero() && f.logs.is_zero() {
            // invisible channel: no detector or logical effect
            continue;
        }
        match index.entry((f.dets.clone(), f.logs.clone())) {
            std::collections::hash_map::Entry::Occupied(e) => {
                let ch = &mut channels[*e.get()];
                ch.probability = ch.probability * (1.0 - q) + q * (1.0 - ch.probability);
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(channels.len());
                channels.push(Channel { probability: q, dets: f.dets.clone(), logs: f.logs.clone() });
            }
        }
    }
    DetectorModel { n_dets, n_logs, channels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mirror_circuits::noise::FaultKind;

    fn fc(w: f64, dets: &[usize], logs: &[usize]) -> FaultChannel {
        FaultChannel {
            weight: w,
            kind: FaultKind::Depol1,
            location: 0,
            component: 0,
            dets: BitVec::from_indices(4, dets.iter().copied()),
            logs: BitVec::from_indices(2, logs.iter().copied()),
            residual: None,
        }
    }

    #[test]
    fn equal_signatures_merge_by_xor_combination() {
        let faults = vec![fc(1.0, &[0], &[]), fc(1.0, &[0], &[]), fc(1.0, &[1], &[0])];
        let m = merge_channels(4, 2, &faults, 0.1);
        assert_eq!(m.channels.len(), 2);
        let q = 0.1;
        let expected = 2.0 * q * (1.0 - q);
        assert!((m.channels[0].probability - expected).abs() < 1e-12);
        assert!((m.channels[1].probability - q).abs() < 1e-12);
    }

    #[test]
    fn probabilities_stay_below_half() {
        let faults = vec![fc(1.0, &[0], &[]); 200];
        let m = merge_channels(1, 2, &faults, 0.4);
        assert!(m.channels[0].probability <= 0.5);
    }
}
