use serde::{Deserialize, Serialize};

use super::SeparableOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlopVariant {
    Base,
    /// fp16 products with main/residual splitting of both operands.
    ErrorCorrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluation {
    Cell,
    /// Vertex-patch evaluation; every global DoF lies in `2^d` patches.
    Patch,
}

/// Per-phase arithmetic counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlopBreakdown {
    /// Multiply-add work of the matrix products (three products per contraction when error corrected).
    pub contractions: u64,
    /// Residual extraction `(x - main) * 2^11` for both operands of every contraction.
    pub ec_conversions: u64,
    /// Scaling of the correction by `2^-11` and its addition to the main product.
    pub ec_scaling: u64,
    /// Summation of the Kronecker terms.
    pub term_accumulation: u64,
    /// Number of evaluations each DoF takes part in (`2^d` for patches, 1 for cells).
    pub overlap_multiplicity: u64,
    /// `flops_per_dof * overlap_multiplicity`: the cost charged to one unique global DoF.
    pub flops_per_global_dof: f64,
}

/// Arithmetic count of one operator application.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlopReport {
    pub total_flops: u64,
    pub dofs: u64,
    pub flops_per_dof: f64,
    /// `total_flops / dofs` as a reduced fraction `(numerator, denominator)`.
    pub flops_per_dof_exact: (u64, u64),
    pub breakdown: FlopBreakdown,
}

impl FlopReport {
    fn new(breakdown_parts: [u64; 4], dofs: u64, multiplicity: u64) -> Self {
        let total: u64 = breakdown_parts.iter().sum();
        let g = gcd(total, dofs).max(1);
        let flops_per_dof = total as f64 / dofs as f64;
        Self {
            total_flops: total,
            dofs,
            flops_per_dof,
            flops_per_dof_exact: (total / g, dofs / g),
            breakdown: FlopBreakdown {
                contractions: breakdown_parts[0],
                ec_conversions: breakdown_parts[1],
                ec_scaling: breakdown_parts[2],
                term_accumulation: breakdown_parts[3],
                overlap_multiplicity: multiplicity,
                flops_per_global_dof: flops_per_dof * multiplicity as f64,
            },
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Counts the arithmetic of [`apply_separable`](super::apply_separable)'s schedule.
///
/// A contraction of an `m x n` matrix with an `n x p` slab costs `2mnp`. The
/// error-corrected variant triples that, adds `2(mn + np)` for residual
/// extraction and `2mp` for the scaled correction. Terms are summed at `(T-1) * out`.
pub fn count_flops(op: &SeparableOperator, variant: FlopVariant, evaluation: Evaluation) -> FlopReport {
    let mut products = 0u64;
    let mut conversions = 0u64;
    let mut scaling = 0u64;
    for term in op.terms() {
        let mut extents: Vec<u64> = op.input_extents().iter().map(|&e| e as u64).collect();
        for (axis, m) in term.iter().enumerate() {
            let (rows, cols) = (m.rows() as u64, m.cols() as u64);
            let slab: u64 = extents.iter().enumerate().filter(|&(a, _)| a != axis).map(|(_, &e)| e).product();
            products += 2 * rows * cols * slab;
            if variant == FlopVariant::ErrorCorrected {
                conversions += 2 * (rows * cols + cols * slab);
                scaling += 2 * rows * slab;
            }
            extents[axis] = rows;
        }
    }
    if variant == FlopVariant::ErrorCorrected {
        products *= 3;
    }
    let out: u64 = op.output_extents().iter().map(|&e| e as u64).product();
    let accumulation = (op.terms().len() as u64 - 1) * out;
    let dofs: u64 = op.input_extents().iter().map(|&e| e as u64).product();
    let multiplicity = match evaluation {
        Evaluation::Cell => 1,
        Evaluation::Patch => 1 << op.dim(),
    };
    FlopReport::new([products, conversions, scaling, accumulation], dofs, multiplicity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Matrix1D;

    #[test]
    fn single_matvec() {
        let op = SeparableOperator::new(1, vec![vec![Matrix1D::identity(2)]]).unwrap();
        let r = count_flops(&op, FlopVariant::Base, Evaluation::Cell);
        assert_eq!(r.total_flops, 8);
        assert_eq!(r.dofs, 2);
        assert_eq!(r.flops_per_dof_exact, (4, 1));
    }

    #[test]
    fn rectangular_schedule_tracks_extents() {
        // 3x2 on axis 0 then 4x5 on axis 1 of a 2x5 input: 2*3*2*5 + 2*4*5*3
        let op = SeparableOperator::new(2, vec![vec![Matrix1D::zeros(3, 2), Matrix1D::zeros(4, 5)]]).unwrap();
        assert_eq!(count_flops(&op, FlopVariant::Base, Evaluation::Cell).total_flops, 60 + 120);
    }
}
