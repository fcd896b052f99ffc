use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::layout::{LayoutFn, Swizzle};
use super::pattern::AccessPattern;
use crate::error::{contract, Result};

pub const BANKS: usize = 32;
pub const BANK_BYTES: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BankReport {
    pub phase_wavefronts: Vec<usize>,
    pub total_wavefronts: usize,
    pub conflict: bool,
}

/// Shared-memory bank model.
///
/// 32 banks of 4 bytes; a phase is split into transaction groups of
/// `128 / access_bytes` lanes. Within a group a bank serves one distinct 4-byte
/// word per wavefront and identical words broadcast. A phase costs the largest
/// wavefront count of its groups.
pub fn bank_trace(layout: &LayoutFn, pattern: &AccessPattern) -> Result<BankReport> {
    if layout.rows != pattern.rows || layout.cols != pattern.cols || layout.word_bytes != pattern.word_bytes {
        return Err(contract("layout and access pattern describe different tiles"));
    }
    let group_size = pattern.lanes_per_group();
    let mut phase_wavefronts = Vec::with_capacity(pattern.phases.len());
    for phase in &pattern.phases {
        let mut worst = 1;
        for group in phase.chunks(group_size) {
            let mut banks: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
            for &(row, col) in group.iter().flatten() {
                for w in 0..pattern.access_words {
                    let byte = layout.byte_address(row, col + w)?;
                    for b in (byte..byte + layout.word_bytes).step_by(BANK_BYTES) {
                        let word = b / BANK_BYTES;
                        banks.entry(word % BANKS).or_default().insert(word);
                    }
                }
            }
            let wf = banks.values().map(BTreeSet::len).max().unwrap_or(1);
            worst = worst.max(wf);
        }
        phase_wavefronts.push(worst);
    }
    let total_wavefronts = phase_wavefronts.iter().sum();
    let conflict = phase_wavefronts.iter().any(|&w| w > 1);
    Ok(BankReport {
        phase_wavefronts,
        total_wavefronts,
        conflict,
    })
}

/// Exhaustive search over XOR swizzles `(G, P)`, `G` and `P` powers of two,
/// ordered by `G` then `P`. Returns the first bijective layout under which every
/// phase costs one wavefront.
pub fn search_conflict_free_swizzle(
    pattern: &AccessPattern,
    rows: usize,
    cols: usize,
    word_bytes: usize,
) -> Option<Swizzle> {
    let mut group = 1;
    while group <= cols {
        let mut period = 1;
        while period <= rows {
            let swizzle = Swizzle { group, period };
            if let Ok(layout) = LayoutFn::with_swizzle(rows, cols, word_bytes, swizzle) {
                if layout.is_bijection() {
                    if let Ok(report) = bank_trace(&layout, pattern) {
                        if report.total_wavefronts == pattern.phases.len() {
                            return Some(swizzle);
                        }
                    }
                }
            }
            if group == 1 {
                break;
            }
            period *= 2;
        }
        group *= 2;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpu::pattern::{mma_fragment_pattern, FragmentPrecision, MmaShape, Role, WARP_SIZE};

    fn linear_pattern(words: impl Fn(usize) -> usize) -> AccessPattern {
        AccessPattern {
            rows: 1,
            cols: 64,
            word_bytes: 4,
            access_words: 1,
            phases: vec![(0..WARP_SIZE).map(|l| Some((0, words(l)))).collect()],
        }
    }

    #[test]
    fn micro_cases() {
        let layout = LayoutFn::row_major(1, 64, 4).unwrap();
        let r = bank_trace(&layout, &linear_pattern(|l| l)).unwrap();
        assert_eq!(r.phase_wavefronts, vec![1]);
        assert!(!r.conflict);
        let r = bank_trace(&layout, &linear_pattern(|_| 0)).unwrap();
        assert_eq!(r.phase_wavefronts, vec![1]);
        // stride two in words: lanes l and l + 16 share a bank
        let r = bank_trace(&layout, &linear_pattern(|l| 2 * l)).unwrap();
        assert_eq!(r.phase_wavefronts, vec![2]);
        assert!(r.conflict);
        let r = bank_trace(&layout, &linear_pattern(|l| (l % 2) * 32)).unwrap();
        assert_eq!(r.phase_wavefronts, vec![2]);
    }

    #[test]
    fn out_of_tile() {
        let layout = LayoutFn::row_major(1, 64, 4).unwrap();
        assert!(bank_trace(&layout, &linear_pattern(|l| l + 40)).is_err());
    }

    #[test]
    fn fp64_naive_conflicts_and_swizzle_fixes() {
        let a = mma_fragment_pattern(MmaShape::FP64, FragmentPrecision::Fp64, Role::A).unwrap();
        let naive = bank_trace(&LayoutFn::row_major(8, 8, 8).unwrap(), &a).unwrap();
        assert_eq!(naive.phase_wavefronts, vec![2, 2]);
        let s = search_conflict_free_swizzle(&a, 8, 8, 8).unwrap();
        assert!(s.group > 1);
        let swz = LayoutFn::with_swizzle(8, 8, 8, s).unwrap();
        assert_eq!(bank_trace(&swz, &a).unwrap().phase_wavefronts, vec![1, 1]);
    }

    #[test]
    fn identity_when_already_conflict_free() {
        let c = mma_fragment_pattern(MmaShape::FP64, FragmentPrecision::Fp64, Role::C).unwrap();
        assert_eq!(search_conflict_free_swizzle(&c, 8, 8, 8), Some(Swizzle { group: 1, period: 1 }));
    }
}
