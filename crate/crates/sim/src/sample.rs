//! Bit-reproducible Monte-Carlo sampling of detector models.
//!
//! Each (shot, channel) Bernoulli draw comes from a counter-based generator
//! keyed by (seed, shot, channel), so sharding across any number of workers
//! cannot change the result of a run.

use crate::dem::DetectorModel;
use mirror_core::bits::BitVec;
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct ShotBatch {
    pub shots: usize,
    pub seed: u64,
    /// per shot: triggered detector bits
    pub syndromes: Vec<BitVec>,
    /// per shot: true logical flips
    pub logical_truth: Vec<BitVec>,
}

/// SplitMix64-style keyed hash: statistically independent streams per
/// (seed, shot, channel) counter triple.
#[inline]
pub fn keyed_u64(seed: u64, shot: u64, channel: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(shot.wrapping_add(1)))
        .wrapping_add(0xd1b54a32d192ed03u64.wrapping_mul(channel.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Independent Bernoulli per channel, XOR-accumulated signatures.
pub fn sample(m: &DetectorModel, shots: usize, seed: u64) -> ShotBatch {
    let thresholds: Vec<u64> = m
        .channels
        .iter()
        .map(|c| (c.probability * (u64::MAX as f64)) as u64)
        .collect();
    let results: Vec<(BitVec, BitVec)> = (0..shots)
        .into_par_iter()
        .map(|shot| {
            let mut dets = BitVec::zeros(m.n_dets);
            let mut logs = BitVec::zeros(m.n_logs);
            for (ci, ch) in m.channels.iter().enumerate() {
                if keyed_u64(seed, shot as u64, ci as u64) < thresholds[ci] {
                    dets.xor_assign(&ch.dets);
                    logs.xor_assign(&ch.logs);
                }
            }
            (dets, logs)
        })
        .collect();
    let (syndromes, logical_truth) = results.into_iter().unzip();
    ShotBatch { shots, seed, syndromes, logical_truth }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dem::Channel;

    fn model(channels: Vec<Channel>) -> DetectorModel {
        DetectorModel { n_dets: 4, n_logs: 2, channels }
    }

    #[test]
    fn zero_rate_gives_all_zero() {
        let m = model(vec![Channel {
            probability: 0.0,
            dets: BitVec::from_indices(4, [0]),
            logs: BitVec::from_indices(2, [0]),
        }]);
        let b = sample(&m, 100, 7);
        assert!(b.syndromes.iter().all(|s| s.is_zero()));
        assert!(b.logical_truth.iter().all(|s| s.is_zero()));
    }

    #[test]
    fn certain_channel_fires_every_shot() {
        let m = model(vec![Channel {
            probability: 1.0 - 1e-18,
            dets: BitVec::from_indices(4, [1, 2]),
            logs: BitVec::from_indices(2, [1]),
        }]);
        let b = sample(&m, 50, 3);
        for s in 0..50 {
            assert!(b.syndromes[s].get(1) && b.syndromes[s].get(2));
            assert!(b.logical_truth[s].get(1));
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let m = model(vec![Channel {
            probability: 0.3,
            dets: BitVec::from_indices(4, [0]),
            logs: BitVec::from_indices(2, [0]),
        }]);
        let a = sample(&m, 200, 42);
        let b = sample(&m, 200, 42);
        assert_eq!(a.syndromes, b.syndromes);
        let c = sample(&m, 200, 43);
        assert_ne!(a.syndromes, c.syndromes);
    }

    #[test]
    fn empirical_rate_within_3_sigma() {
        let q = 0.2;
        let m = model(vec![Channel {
            probability: q,
            dets: BitVec::from_indices(4, [0]),
            logs: BitVec::from_indices(2, []),
        }]);
        let shots = 100_000;
        let b = sample(&m, shots, 11);
        let hits = b.syndromes.iter().filter(|s| s.get(0)).count() as f64;
        let mean = shots as f64 * q;
        let sigma = (shots as f64 * q * (1.0 - q)).sqrt();
        assert!((hits - mean).abs() < 3.0 * sigma, "hits {hits} vs mean {mean}");
    }
}
