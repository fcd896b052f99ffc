use std::fmt::Debug;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use super::binary16::round_to_half;
use super::ec::{split_unchecked, EC_SCALE};
use super::mode::PrecisionMode;
use crate::error::{contract, invalid, Error, Result};
use crate::tensor::{axis_split, contract_slice, Matrix1D, TensorField};

const HALF_MAX: f64 = 65504.0;

/// A 1D matrix kept in every representation the precision modes need.
#[derive(Clone, Debug)]
pub struct PreparedMatrix {
    rows: usize,
    cols: usize,
    f64: Vec<f64>,
    f32: Vec<f32>,
    half: Vec<f32>,
    half_residual: Vec<f32>,
    half_range: bool,
}

impl PreparedMatrix {
    pub fn new(m: &Matrix1D) -> Self {
        let f64 = m.as_slice().to_vec();
        let f32: Vec<f32> = f64.iter().map(|&x| x as f32).collect();
        let half_range = f64.iter().all(|x| x.abs() <= HALF_MAX);
        let (half, half_residual) = f32.iter().map(|&x| split_unchecked(x)).unzip();
        Self {
            rows: m.rows(),
            cols: m.cols(),
            f64,
            f32,
            half,
            half_residual,
            half_range,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Whether every entry fits in binary16.
    pub fn fits_half(&self) -> bool {
        self.half_range
    }

    /// Fails when `mode` demotes to binary16 and an entry is out of range.
    pub fn check_mode(&self, mode: PrecisionMode) -> Result<()> {
        if mode.uses_half() && !self.half_range {
            return Err(Error::Range(format!(
                "matrix entries exceed the binary16 range (max |a| = {})",
                self.f64.iter().fold(0.0f64, |m, x| m.max(x.abs()))
            )));
        }
        Ok(())
    }
}

/// Reusable buffers for the half-precision kernels.
#[derive(Clone, Debug, Default)]
pub struct KernelScratch {
    main: Vec<f32>,
    residual: Vec<f32>,
    correction: Vec<f32>,
}

/// Floating-point storage type for vectors.
pub trait Scalar:
    Copy
    + Default
    + Debug
    + PartialOrd
    + Send
    + Sync
    + Sum
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    const ZERO: Self;
    const ONE: Self;

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;

    /// Entries of `m` at storage precision.
    fn entries(m: &PreparedMatrix) -> &[Self];

    /// Directional contraction of `input` by `m` along `axis` under `mode`.
    ///
    /// `f64` storage always computes in fp64; `f32` storage treats `Fp64` like `Fp32`.
    fn contract(
        m: &PreparedMatrix,
        input: &[Self],
        extents: &[usize],
        axis: usize,
        out: &mut [Self],
        mode: PrecisionMode,
        scratch: &mut KernelScratch,
    );
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn entries(m: &PreparedMatrix) -> &[Self] {
        &m.f64
    }

    fn contract(
        m: &PreparedMatrix,
        input: &[f64],
        extents: &[usize],
        axis: usize,
        out: &mut [f64],
        _mode: PrecisionMode,
        _scratch: &mut KernelScratch,
    ) {
        contract_slice(&m.f64, m.rows, m.cols, input, extents, axis, out);
    }
}

impl Scalar for f32 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;

    fn from_f64(v: f64) -> Self {
        v as f32
    }

    fn to_f64(self) -> f64 {
        self as f64
    }

    fn entries(m: &PreparedMatrix) -> &[Self] {
        &m.f32
    }

    fn contract(
        m: &PreparedMatrix,
        input: &[f32],
        extents: &[usize],
        axis: usize,
        out: &mut [f32],
        mode: PrecisionMode,
        scratch: &mut KernelScratch,
    ) {
        match mode {
            PrecisionMode::Fp64 | PrecisionMode::Fp32 => {
                contract_f32(&m.f32, m.rows, m.cols, input, extents, axis, out)
            }
            PrecisionMode::Fp16 => {
                scratch.main.clear();
                scratch.main.extend(input.iter().map(|&x| round_to_half(x)));
                contract_f32(&m.half, m.rows, m.cols, &scratch.main, extents, axis, out);
            }
            PrecisionMode::Fp16Ec => contract_ec(m, input, extents, axis, out, scratch),
        }
    }
}

fn contract_f32(
    m: &[f32],
    rows: usize,
    cols: usize,
    input: &[f32],
    extents: &[usize],
    axis: usize,
    out: &mut [f32],
) {
    let (stride, outer) = axis_split(extents, axis);
    debug_assert_eq!(input.len(), stride * cols * outer);
    debug_assert_eq!(out.len(), stride * rows * outer);
    if stride == 1 {
        for o in 0..outer {
            let src = &input[o * cols..(o + 1) * cols];
            let dst = &mut out[o * rows..(o + 1) * rows];
            for (i, d) in dst.iter_mut().enumerate() {
                let row = &m[i * cols..(i + 1) * cols];
                let mut acc = 0.0f32;
                for k in 0..cols {
                    acc += row[k] * src[k];
                }
                *d = acc;
            }
        }
        return;
    }
    for o in 0..outer {
        let src = &input[o * cols * stride..(o + 1) * cols * stride];
        let dst = &mut out[o * rows * stride..(o + 1) * rows * stride];
        for i in 0..rows {
            let orow = &mut dst[i * stride..(i + 1) * stride];
            orow.fill(0.0);
            for k in 0..cols {
                let a = m[i * cols + k];
                for (d, &x) in orow.iter_mut().zip(&src[k * stride..(k + 1) * stride]) {
                    *d += a * x;
                }
            }
        }
    }
}

/// Error-corrected contraction: main and correction accumulate separately in fp32,
/// ascending in `k`, with the correction adding `da*x` before `a*dx`.
fn contract_ec(
    m: &PreparedMatrix,
    input: &[f32],
    extents: &[usize],
    axis: usize,
    out: &mut [f32],
    scratch: &mut KernelScratch,
) {
    let (rows, cols) = (m.rows, m.cols);
    let (stride, outer) = axis_split(extents, axis);
    scratch.main.clear();
    scratch.residual.clear();
    for &x in input {
        let (hi, lo) = split_unchecked(x);
        scratch.main.push(hi);
        scratch.residual.push(lo);
    }
    scratch.correction.clear();
    scratch.correction.resize(out.len(), 0.0);
    let (xm, xr, corr) = (&scratch.main, &scratch.residual, &mut scratch.correction);
    let (am, ar) = (&m.half, &m.half_residual);
    let inv = 1.0 / EC_SCALE;
    if stride == 1 {
        for o in 0..outer {
            let sm = &xm[o * cols..(o + 1) * cols];
            let sr = &xr[o * cols..(o + 1) * cols];
            for i in 0..rows {
                let (mut acc, mut c) = (0.0f32, 0.0f32);
                for k in 0..cols {
                    let a = am[i * cols + k];
                    acc += a * sm[k];
                    c += ar[i * cols + k] * sm[k];
                    c += a * sr[k];
                }
                out[o * rows + i] = acc + c * inv;
            }
        }
        return;
    }
    for o in 0..outer {
        let base_in = o * cols * stride;
        let base_out = o * rows * stride;
        for i in 0..rows {
            let orow = &mut out[base_out + i * stride..base_out + (i + 1) * stride];
            let crow = &mut corr[base_out + i * stride..base_out + (i + 1) * stride];
            orow.fill(0.0);
            for k in 0..cols {
                let a = am[i * cols + k];
                let da = ar[i * cols + k];
                let im = &xm[base_in + k * stride..base_in + (k + 1) * stride];
                let ir = &xr[base_in + k * stride..base_in + (k + 1) * stride];
                for s in 0..stride {
                    orow[s] += a * im[s];
                    crow[s] += da * im[s];
                    crow[s] += a * ir[s];
                }
            }
            for (d, c) in orow.iter_mut().zip(crow.iter()) {
                *d += c * inv;
            }
        }
    }
}

/// Precision-parameterized directional contraction.
///
/// `Fp64` is bitwise identical to [`crate::tensor::contract_dir`]. Other modes
/// round the input to fp32 first and return the fp32 result widened to f64.
pub fn contract_dir_prec(
    m: &Matrix1D,
    u: &TensorField,
    axis: usize,
    mode: PrecisionMode,
) -> Result<TensorField> {
    if mode == PrecisionMode::Fp64 {
        return crate::tensor::contract_dir(m, u, axis);
    }
    if axis >= u.dim() {
        return Err(invalid(format!("axis {axis} out of range for rank {}", u.dim())));
    }
    if m.cols() != u.extents()[axis] {
        return Err(contract(format!(
            "matrix has {} columns, tensor extent along axis {axis} is {}",
            m.cols(),
            u.extents()[axis]
        )));
    }
    let prepared = PreparedMatrix::new(m);
    prepared.check_mode(mode)?;
    if mode.uses_half() {
        if let Some(x) = u.values().iter().find(|x| !(x.abs() <= HALF_MAX)) {
            return Err(Error::Range(format!("input value {x} exceeds the binary16 range")));
        }
    }
    let input: Vec<f32> = u.values().iter().map(|&x| x as f32).collect();
    let mut extents = u.extents().to_vec();
    extents[axis] = m.rows();
    let mut out = vec![0.0f32; extents.iter().product()];
    let mut scratch = KernelScratch::default();
    f32::contract(&prepared, &input, u.extents(), axis, &mut out, mode, &mut scratch);
    TensorField::new(extents, out.into_iter().map(f64::from).collect())
}
