use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// XOR swizzle parameters: rows are grouped in blocks of `period`, and block `b`
/// XORs its column index with `(b mod group)·(cols / group)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Swizzle {
    pub group: usize,
    pub period: usize,
}

/// Mapping of a `rows x cols` tile of `word_bytes`-wide elements to word addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutFn {
    pub rows: usize,
    pub cols: usize,
    pub word_bytes: usize,
    pub swizzle: Option<Swizzle>,
}

impl LayoutFn {
    /// Plain row-major layout.
    pub fn row_major(rows: usize, cols: usize, word_bytes: usize) -> Result<Self> {
        check_tile(rows, cols, word_bytes)?;
        Ok(Self {
            rows,
            cols,
            word_bytes,
            swizzle: None,
        })
    }

    pub fn with_swizzle(rows: usize, cols: usize, word_bytes: usize, swizzle: Swizzle) -> Result<Self> {
        check_tile(rows, cols, word_bytes)?;
        let Swizzle { group, period } = swizzle;
        if group == 0 || !group.is_power_of_two() || !cols.is_multiple_of(group) {
            return Err(invalid(format!("swizzle group {group} must be a power of two dividing {cols}")));
        }
        if !cols.is_power_of_two() && group > 1 {
            return Err(invalid(format!("XOR swizzling needs a power-of-two column count, got {cols}")));
        }
        if period == 0 {
            return Err(invalid("swizzle period must be positive"));
        }
        Ok(Self {
            rows,
            cols,
            word_bytes,
            swizzle: Some(swizzle),
        })
    }

    fn base(&self, row: usize) -> usize {
        match self.swizzle {
            Some(Swizzle { group, period }) => ((row / period) % group) * (self.cols / group),
            None => 0,
        }
    }

    /// Word address of element `(row, col)`.
    pub fn address(&self, row: usize, col: usize) -> Result<usize> {
        if row >= self.rows || col >= self.cols {
            return Err(invalid(format!(
                "element ({row}, {col}) outside the {}x{} tile",
                self.rows, self.cols
            )));
        }
        Ok(row * self.cols + (col ^ self.base(row)))
    }

    pub fn byte_address(&self, row: usize, col: usize) -> Result<usize> {
        Ok(self.address(row, col)? * self.word_bytes)
    }

    /// Exhaustive permutation check over the tile.
    pub fn is_bijection(&self) -> bool {
        let n = self.rows * self.cols;
        let mut seen = vec![false; n];
        for r in 0..self.rows {
            for c in 0..self.cols {
                match self.address(r, c) {
                    Ok(a) if a < n && !seen[a] => seen[a] = true,
                    _ => return false,
                }
            }
        }
        true
    }
}

fn check_tile(rows: usize, cols: usize, word_bytes: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(invalid("tile extents must be positive"));
    }
    if ![2, 4, 8].contains(&word_bytes) {
        return Err(invalid(format!("word size must be 2, 4 or 8 bytes, got {word_bytes}")));
    }
    Ok(())
}

/// `address(row, col) = row·cols + (col XOR (row mod G)·(cols/G))`.
pub fn xor_swizzle_layout(rows: usize, cols: usize, word_bytes: usize, group: usize) -> Result<LayoutFn> {
    LayoutFn::with_swizzle(rows, cols, word_bytes, Swizzle { group, period: 1 })
}
