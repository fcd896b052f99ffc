use rayon::prelude::*;

use crate::error::{contract, Result};
use crate::fe::{Basis1D, Level};
use crate::precision::{KernelScratch, PrecisionMode, PreparedMatrix, Scalar};
use crate::tensor::Matrix1D;

/// 1D embedding of a parent-cell polynomial into its left (`0`) or right (`1`) child:
/// `P_s[i][j] = φ_j((s + ξ_i) / 2)`.
pub fn embedding_matrices_1d(basis: &Basis1D) -> [Matrix1D; 2] {
    let n = basis.n_dofs();
    [0.0, 1.0].map(|s| Matrix1D::from_fn(n, n, |i, j| basis.value(j, 0.5 * (s + basis.nodes[i]))))
}

/// Prepared embedding matrices and their transposes.
#[derive(Clone, Debug)]
pub(crate) struct Transfer {
    p: [PreparedMatrix; 2],
    pt: [PreparedMatrix; 2],
}

impl Transfer {
    pub fn new(basis: &Basis1D) -> Self {
        let p = embedding_matrices_1d(basis);
        Self {
            pt: [PreparedMatrix::new(&p[0].transpose()), PreparedMatrix::new(&p[1].transpose())],
            p: [PreparedMatrix::new(&p[0]), PreparedMatrix::new(&p[1])],
        }
    }

    fn apply_cell<S: Scalar>(
        mats: &[&PreparedMatrix],
        input: &[S],
        out: &mut Vec<S>,
        tmp: &mut Vec<S>,
        mode: PrecisionMode,
        scratch: &mut KernelScratch,
    ) {
        let extents: Vec<usize> = mats.iter().map(|m| m.cols()).collect();
        out.clear();
        out.extend_from_slice(input);
        tmp.resize(input.len(), S::ZERO);
        for (a, m) in mats.iter().enumerate() {
            S::contract(m, out, &extents, a, tmp, mode, scratch);
            std::mem::swap(out, tmp);
        }
    }

    /// `e_fine = I↑ e_coarse`.
    pub fn prolongate<S: Scalar>(&self, coarse: &Level, fine: &Level, e: &[S], mode: PrecisionMode) -> Vec<S> {
        let cd = fine.dofs_per_cell();
        let dim = fine.dim;
        let blocks: Vec<Vec<S>> = (0..fine.n_cells())
            .into_par_iter()
            .map_init(
                || (Vec::new(), Vec::new(), KernelScratch::default()),
                |(out, tmp, scratch), cell| {
                    let c = fine.cell_coords(cell);
                    let parent: Vec<usize> = c[..dim].iter().map(|&x| x / 2).collect();
                    let pc = coarse.cell_index(&parent);
                    let mats: Vec<&PreparedMatrix> = (0..dim).map(|a| &self.p[c[a] & 1]).collect();
                    Self::apply_cell(&mats, &e[pc * cd..(pc + 1) * cd], out, tmp, mode, scratch);
                    out.clone()
                },
            )
            .collect();
        blocks.concat()
    }

    /// `r_coarse = I↓ r_fine = (I↑)ᵀ r_fine`, children summed in fixed order.
    pub fn restrict<S: Scalar>(&self, coarse: &Level, fine: &Level, r: &[S], mode: PrecisionMode) -> Vec<S> {
        let cd = fine.dofs_per_cell();
        let dim = fine.dim;
        let blocks: Vec<Vec<S>> = (0..coarse.n_cells())
            .into_par_iter()
            .map_init(
                || (Vec::new(), Vec::new(), KernelScratch::default()),
                |(out, tmp, scratch), cell| {
                    let c = coarse.cell_coords(cell);
                    let mut acc = vec![S::ZERO; cd];
                    for child in 0..1usize << dim {
                        let fc: Vec<usize> = (0..dim).map(|a| 2 * c[a] + ((child >> a) & 1)).collect();
                        let f = fine.cell_index(&fc);
                        let mats: Vec<&PreparedMatrix> = (0..dim).map(|a| &self.pt[(child >> a) & 1]).collect();
                        Self::apply_cell(&mats, &r[f * cd..(f + 1) * cd], out, tmp, mode, scratch);
                        for (a, &x) in acc.iter_mut().zip(out.iter()) {
                            *a += x;
                        }
                    }
                    acc
                },
            )
            .collect();
        blocks.concat()
    }
}

pub(crate) fn check_pair(coarse: &Level, fine: &Level) -> Result<()> {
    if fine.level != coarse.level + 1 || fine.dim != coarse.dim || fine.degree != coarse.degree {
        return Err(contract("transfer needs consecutive levels of one hierarchy"));
    }
    Ok(())
}
