use serde::{Deserialize, Serialize};

use super::{contract_slice, Matrix1D, TensorField, MAX_DIM};
use crate::error::{contract, invalid, Result};

/// Sum of Kronecker terms. Term `t` is `factors[t][d-1] ⊗ ... ⊗ factors[t][0]`;
/// factor `a` maps input extent `cols` to output extent `rows` along axis `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableOperator {
    dim: usize,
    terms: Vec<Vec<Matrix1D>>,
}

impl SeparableOperator {
    pub fn new(dim: usize, terms: Vec<Vec<Matrix1D>>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(invalid(format!("operator rank {dim} outside 1..={MAX_DIM}")));
        }
        if terms.is_empty() {
            return Err(invalid("operator without terms"));
        }
        if let Some(t) = terms.iter().position(|t| t.len() != dim) {
            return Err(contract(format!("term {t} does not have {dim} factors")));
        }
        let shape = |t: &Vec<Matrix1D>| t.iter().map(|m| (m.rows(), m.cols())).collect::<Vec<_>>();
        let first = shape(&terms[0]);
        if let Some(t) = terms.iter().position(|t| shape(t) != first) {
            return Err(contract(format!("term {t} has extents differing from term 0")));
        }
        Ok(Self { dim, terms })
    }

    /// The three-term Kronecker sum `L⊗M⊗M + M⊗L⊗M + M⊗M⊗L` (or its 2D analogue)
    /// with per-axis mass and stiffness matrices.
    pub fn laplace_like(mass: &[Matrix1D], stiffness: &[Matrix1D]) -> Result<Self> {
        let dim = mass.len();
        if stiffness.len() != dim {
            return Err(contract("mass and stiffness lists differ in length"));
        }
        let terms = (0..dim)
            .map(|t| (0..dim).map(|a| if a == t { stiffness[a].clone() } else { mass[a].clone() }).collect())
            .collect();
        Self::new(dim, terms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Vec<Matrix1D>] {
        &self.terms
    }

    pub fn input_extents(&self) -> Vec<usize> {
        self.terms[0].iter().map(Matrix1D::cols).collect()
    }

    pub fn output_extents(&self) -> Vec<usize> {
        self.terms[0].iter().map(Matrix1D::rows).collect()
    }

    /// Operator with every factor transposed.
    pub fn transposed(&self) -> Self {
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|t| t.iter().map(Matrix1D::transpose).collect()).collect(),
        }
    }
}

/// Applies the separable operator term by term, each term as `d` directional
/// contractions in axis order 0, 1, 2.
pub fn apply_separable(op: &SeparableOperator, u: &TensorField) -> Result<TensorField> {
    if u.extents() != op.input_extents().as_slice() {
        return Err(contract(format!(
            "operator expects extents {:?}, tensor has {:?}",
            op.input_extents(),
            u.extents()
        )));
    }
    let out_extents = op.output_extents();
    let mut acc = vec![0.0; out_extents.iter().product()];
    let mut cur = Vec::new();
    let mut next = Vec::new();
    for term in op.terms() {
        cur.clear();
        cur.extend_from_slice(u.values());
        let mut extents = u.extents().to_vec();
        for (axis, m) in term.iter().enumerate() {
            let mut out_ext = extents.clone();
            out_ext[axis] = m.rows();
            next.resize(out_ext.iter().product(), 0.0);
            contract_slice(m.as_slice(), m.rows(), m.cols(), &cur, &extents, axis, &mut next);
            std::mem::swap(&mut cur, &mut next);
            extents = out_ext;
        }
        for (a, c) in acc.iter_mut().zip(&cur) {
            *a += c;
        }
    }
    TensorField::new(out_extents, acc)
}
