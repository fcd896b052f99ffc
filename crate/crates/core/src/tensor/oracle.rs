use super::{Matrix1D, SeparableOperator};
use crate::error::{Error, Result};

/// Largest input/output tensor size the dense oracle will materialize.
pub const ORACLE_MAX_EXTENT: usize = 10_000;

/// Materializes `sum_t ⊗_a factors[t][a]` as a dense matrix. Test use only.
pub fn dense_kronecker_oracle(op: &SeparableOperator) -> Result<Matrix1D> {
    let in_ext = op.input_extents();
    let out_ext = op.output_extents();
    let n_in: usize = in_ext.iter().product();
    let n_out: usize = out_ext.iter().product();
    if n_in > ORACLE_MAX_EXTENT || n_out > ORACLE_MAX_EXTENT {
        return Err(Error::SizeGuard(format!(
            "dense oracle of {n_out}x{n_in} exceeds {ORACLE_MAX_EXTENT} per side"
        )));
    }
    let unravel = |mut flat: usize, ext: &[usize]| {
        ext.iter()
            .map(|&e| {
                let i = flat % e;
                flat /= e;
                i
            })
            .collect::<Vec<_>>()
    };
    let rows: Vec<Vec<usize>> = (0..n_out).map(|r| unravel(r, &out_ext)).collect();
    let cols: Vec<Vec<usize>> = (0..n_in).map(|c| unravel(c, &in_ext)).collect();
    Ok(Matrix1D::from_fn(n_out, n_in, |r, c| {
        op.terms()
            .iter()
            .map(|term| {
                term.iter()
                    .enumerate()
                    .map(|(a, m)| m.get(rows[r][a], cols[c][a]))
                    .product::<f64>()
            })
            .sum()
    }))
}
