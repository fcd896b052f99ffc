use rayon::prelude::*;

use super::mesh::{Level, Patch};
use crate::error::{contract, Result};
use crate::precision::{KernelScratch, PrecisionMode, Scalar};

/// Buffers for one patch evaluation.
#[derive(Clone, Debug, Default)]
pub(crate) struct PatchWork<S> {
    pub input: Vec<S>,
    pub a: Vec<S>,
    pub b: Vec<S>,
    pub acc: Vec<S>,
    pub scratch: KernelScratch,
}

impl<S: Scalar> PatchWork<S> {
    pub fn new(len: usize) -> Self {
        Self {
            input: vec![S::ZERO; len],
            a: vec![S::ZERO; len],
            b: vec![S::ZERO; len],
            acc: vec![S::ZERO; len],
            scratch: KernelScratch::default(),
        }
    }
}

/// Applies the ownership-partial Kronecker-sum patch operator to `work.input`,
/// leaving the result in `work.acc`.
pub(crate) fn apply_patch_operator<S: Scalar>(level: &Level, patch: &Patch, mode: PrecisionMode, work: &mut PatchWork<S>) {
    let dim = level.dim;
    let extents = level.patch_extents();
    for term in 0..dim {
        for axis in 0..dim {
            let (m, l) = &level.owned_prepared[patch.kinds[axis].index()];
            let mat = if axis == term { l } else { m };
            let (src, dst) = match axis {
                0 => (&work.input, &mut work.a),
                _ if axis % 2 == 1 => (&work.a, &mut work.b),
                _ => (&work.b, &mut work.a),
            };
            S::contract(mat, src, &extents, axis, dst, mode, &mut work.scratch);
        }
        let result = if dim % 2 == 1 { &work.a } else { &work.b };
        if term == 0 {
            work.acc.copy_from_slice(result);
        } else {
            for (acc, &x) in work.acc.iter_mut().zip(result) {
                *acc += x;
            }
        }
    }
}

/// `v = A u` at storage precision `S`, contractions executed in `mode`.
///
/// Colors are processed in order; patches of a color run in parallel and are
/// scattered sequentially, so the result does not depend on the thread count.
pub fn apply_operator_into<S: Scalar>(level: &Level, u: &[S], v: &mut [S], mode: PrecisionMode) -> Result<()> {
    let n = level.n_dofs();
    if u.len() != n || v.len() != n {
        return Err(contract(format!(
            "vector lengths {} and {} do not match {n} DoFs",
            u.len(),
            v.len()
        )));
    }
    if mode.uses_half() {
        for (m, l) in &level.owned_prepared {
            m.check_mode(mode)?;
            l.check_mode(mode)?;
        }
    }
    v.fill(S::ZERO);
    let len = level.patch_dofs();
    for color in &level.colors {
        let locals: Vec<Vec<S>> = color
            .par_iter()
            .map_init(
                || PatchWork::<S>::new(len),
                |work, patch| {
                    level.gather(patch, u, &mut work.input);
                    apply_patch_operator(level, patch, mode, work);
                    work.acc.clone()
                },
            )
            .collect();
        for (patch, local) in color.iter().zip(&locals) {
            level.scatter_add(patch, local, v);
        }
    }
    Ok(())
}

/// Matrix-free SIPG operator `v = A u`.
///
/// Low-precision modes round `u` to fp32 storage and return the fp32 result widened.
pub fn apply_operator(level: &Level, u: &[f64], mode: PrecisionMode) -> Result<Vec<f64>> {
    let n = level.n_dofs();
    if u.len() != n {
        return Err(contract(format!("vector has length {}, level has {n} DoFs", u.len())));
    }
    if mode == PrecisionMode::Fp64 {
        let mut v = vec![0.0; n];
        apply_operator_into(level, u, &mut v, mode)?;
        return Ok(v);
    }
    let u32: Vec<f32> = u.iter().map(|&x| x as f32).collect();
    let mut v = vec![0.0f32; n];
    apply_operator_into(level, &u32, &mut v, mode)?;
    Ok(v.into_iter().map(f64::from).collect())
}

/// Dense matrix of the operator, column by column (small levels only).
pub fn materialize_operator(level: &Level, max_dofs: usize) -> Result<Vec<Vec<f64>>> {
    let n = level.n_dofs();
    if n > max_dofs {
        return Err(crate::Error::SizeGuard(format!("{n} DoFs exceed {max_dofs}")));
    }
    let mut cols = Vec::with_capacity(n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        cols.push(apply_operator(level, &e, PrecisionMode::Fp64)?);
        e[j] = 0.0;
    }
    Ok(cols)
}
