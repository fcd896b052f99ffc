use serde::{Deserialize, Serialize};

use super::binary16::{from_half, round_to_half, to_half, Binary16};
use crate::error::{Error, Result};

/// Scale applied to the residual half before it is stored.
pub const EC_SCALE: f32 = 2048.0;

const HALF_MAX: f32 = 65504.0;

/// A value split into a binary16 main part and a scaled binary16 residual.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EcPair {
    pub main: Binary16,
    pub residual: Binary16,
}

impl EcPair {
    /// `half2float(main) + half2float(residual) / 2^11`, evaluated exactly.
    pub fn reconstruct(self) -> f64 {
        from_half(self.main) as f64 + from_half(self.residual) as f64 / EC_SCALE as f64
    }
}

/// Splits `x` into main and residual halves.
///
/// Fails with [`Error::Range`] when `x` is not finite or exceeds the binary16 range.
pub fn ec_split(x: f32) -> Result<EcPair> {
    if !x.is_finite() || x.abs() > HALF_MAX {
        return Err(Error::Range(format!("{x} is outside the binary16 range")));
    }
    let (main, residual) = split_unchecked(x);
    Ok(EcPair {
        main: to_half(main),
        residual: to_half(residual),
    })
}

/// Returns `(main, scaled residual)` as fp32 values holding binary16 numbers.
#[inline]
pub(crate) fn split_unchecked(x: f32) -> (f32, f32) {
    let main = round_to_half(x);
    // x - main is exact in fp32 and so is the power-of-two scaling
    let residual = round_to_half((x - main) * EC_SCALE);
    (main, residual)
}

/// Which operands of a product receive a correction term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EcSides {
    #[default]
    Both,
    LeftOnly,
    RightOnly,
}

/// Row-major fp32 matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixF32 {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f32>,
}

impl MatrixF32 {
    pub fn get(&self, i: usize, j: usize) -> f32 {
        self.data[i * self.cols + j]
    }
}

/// Row-major matrix stored as main and residual binary16 planes.
#[derive(Clone, Debug, PartialEq)]
pub struct EcMatrix {
    rows: usize,
    cols: usize,
    main: Vec<f32>,
    residual: Vec<f32>,
}

impl EcMatrix {
    pub fn from_f32(rows: usize, cols: usize, data: &[f32]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let mut main = Vec::with_capacity(data.len());
        let mut residual = Vec::with_capacity(data.len());
        for &x in data {
            let pair = ec_split(x)?;
            main.push(from_half(pair.main));
            residual.push(from_half(pair.residual));
        }
        Ok(Self {
            rows,
            cols,
            main,
            residual,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pair(&self, i: usize, j: usize) -> EcPair {
        let idx = i * self.cols + j;
        EcPair {
            main: to_half(self.main[idx]),
            residual: to_half(self.residual[idx]),
        }
    }
}

/// Error-corrected fp16 product with fp32 accumulation on both operands.
pub fn ec_matmul(a: &EcMatrix, b: &EcMatrix) -> Result<MatrixF32> {
    ec_matmul_with(a, b, EcSides::Both)
}

/// Error-corrected fp16 product.
///
/// Per output entry and in ascending `k`, the main accumulator adds `a*b` and the
/// correction accumulator adds `da*b` then `a*db`; the result is
/// `main + correction / 2^11`.
pub fn ec_matmul_with(a: &EcMatrix, b: &EcMatrix, sides: EcSides) -> Result<MatrixF32> {
    if a.cols != b.rows {
        return Err(Error::ContractViolation(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let (m, n, p) = (a.rows, a.cols, b.cols);
    let mut data = vec![0.0f32; m * p];
    for i in 0..m {
        for j in 0..p {
            let mut acc = 0.0f32;
            let mut corr = 0.0f32;
            for k in 0..n {
                let am = a.main[i * n + k];
                let bm = b.main[k * p + j];
                acc += am * bm;
                if sides != EcSides::RightOnly {
                    corr += a.residual[i * n + k] * bm;
                }
                if sides != EcSides::LeftOnly {
                    corr += am * b.residual[k * p + j];
                }
            }
            data[i * p + j] = acc + corr / EC_SCALE;
        }
    }
    Ok(MatrixF32 { rows: m, cols: p, data })
}
