use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub const WARP_SIZE: usize = 32;

/// Per-phase lane requests into a tile; each active lane reads `access_words`
/// consecutive logical elements of one row starting at `(row, col)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessPattern {
    pub rows: usize,
    pub cols: usize,
    pub word_bytes: usize,
    pub access_words: usize,
    pub phases: Vec<Vec<Option<(usize, usize)>>>,
}

impl AccessPattern {
    pub fn access_bytes(&self) -> usize {
        self.word_bytes * self.access_words
    }

    /// Lanes served by one 128-byte transaction.
    pub fn lanes_per_group(&self) -> usize {
        (128 / self.access_bytes()).clamp(1, WARP_SIZE)
    }

    /// Number of times each tile element is touched over all phases.
    pub fn coverage(&self) -> Vec<usize> {
        let mut count = vec![0; self.rows * self.cols];
        for phase in &self.phases {
            for &(r, c) in phase.iter().flatten() {
                for w in 0..self.access_words {
                    if r < self.rows && c + w < self.cols {
                        count[r * self.cols + c + w] += 1;
                    }
                }
            }
        }
        count
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FragmentPrecision {
    Fp64,
    Fp16,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    A,
    B,
    C,
}

/// MMA instruction shape `m x n x k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MmaShape {
    pub m: usize,
    pub n: usize,
    pub k: usize,
}

impl MmaShape {
    pub const FP64: MmaShape = MmaShape { m: 8, n: 8, k: 4 };
    pub const FP16: MmaShape = MmaShape { m: 16, n: 8, k: 16 };
}

/// Shared-memory access pattern of one warp loading an MMA operand.
///
/// FP64 `8x8x4`: the A and B tiles are `8x8` (two consecutive `k` steps); lane `l`
/// reads A element `(l/4, l%4 + 4p)` and B element `(l%4 + 4p, l/4)` in phase
/// `p`; C is written as `double2` pairs `(l/4, 2(l%4))`.
/// FP16 `16x8x16`: operands are read as 8x8 sub-matrices, one per phase, each
/// lane fetching a 16-byte row segment; the fp32 accumulator is written as
/// `float2` pairs.
pub fn mma_fragment_pattern(shape: MmaShape, precision: FragmentPrecision, role: Role) -> Result<AccessPattern> {
    match (precision, shape) {
        (FragmentPrecision::Fp64, MmaShape::FP64) => Ok(fp64_pattern(role)),
        (FragmentPrecision::Fp16, MmaShape::FP16) => Ok(fp16_pattern(role)),
        _ => Err(invalid(format!(
            "unsupported MMA shape {}x{}x{} for {precision:?}",
            shape.m, shape.n, shape.k
        ))),
    }
}

fn fp64_pattern(role: Role) -> AccessPattern {
    let phases = match role {
        Role::A => (0..2)
            .map(|p| (0..WARP_SIZE).map(|l| Some((l / 4, l % 4 + 4 * p))).collect())
            .collect(),
        Role::B => (0..2)
            .map(|p| (0..WARP_SIZE).map(|l| Some((l % 4 + 4 * p, l / 4))).collect())
            .collect(),
        Role::C => vec![(0..WARP_SIZE).map(|l| Some((l / 4, 2 * (l % 4)))).collect()],
    };
    AccessPattern {
        rows: 8,
        cols: 8,
        word_bytes: 8,
        access_words: if role == Role::C { 2 } else { 1 },
        phases,
    }
}

fn fp16_pattern(role: Role) -> AccessPattern {
    let segment = |r0: usize, c0: usize| -> Vec<Option<(usize, usize)>> {
        let mut lanes: Vec<_> = (0..8).map(|i| Some((r0 + i, c0))).collect();
        lanes.resize(WARP_SIZE, None);
        lanes
    };
    match role {
        Role::A => AccessPattern {
            rows: 16,
            cols: 16,
            word_bytes: 2,
            access_words: 8,
            phases: vec![segment(0, 0), segment(8, 0), segment(0, 8), segment(8, 8)],
        },
        Role::B => AccessPattern {
            rows: 16,
            cols: 8,
            word_bytes: 2,
            access_words: 8,
            phases: vec![segment(0, 0), segment(8, 0)],
        },
        Role::C => AccessPattern {
            rows: 16,
            cols: 8,
            word_bytes: 4,
            access_words: 2,
            phases: (0..2)
                .map(|p| (0..WARP_SIZE).map(|l| Some((l / 4 + 8 * p, 2 * (l % 4)))).collect())
                .collect(),
        },
    }
}
