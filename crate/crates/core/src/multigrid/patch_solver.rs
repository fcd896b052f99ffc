use nalgebra::DMatrix;

use crate::error::{contract, Error, Result};
use crate::fe::PatchMatrices1D;
use crate::precision::{KernelScratch, PrecisionMode, PreparedMatrix, Scalar};
use crate::tensor::{contract_slice, Matrix1D};

/// Generalized eigenpairs `L v = λ M v` of one patch direction, with `Vᵀ M V = I`.
#[derive(Clone, Debug)]
pub struct FastDiagonalization {
    pub eigenvectors: Matrix1D,
    pub eigenvalues: Vec<f64>,
}

impl FastDiagonalization {
    pub fn new(m: &Matrix1D, l: &Matrix1D) -> Result<Self> {
        let n = m.rows();
        if !m.is_square() || l.rows() != n || l.cols() != n {
            return Err(contract("patch factors must be square and of equal size"));
        }
        let mm = DMatrix::from_row_slice(n, n, m.as_slice());
        let ll = DMatrix::from_row_slice(n, n, l.as_slice());
        let chol = mm
            .cholesky()
            .ok_or_else(|| Error::Singular("patch mass matrix is not positive definite".into()))?;
        let c = chol.l();
        // C⁻¹ L C⁻ᵀ
        let y = c
            .solve_lower_triangular(&ll)
            .ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
        let s = c
            .solve_lower_triangular(&y.transpose())
            .ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
        let s = (&s + s.transpose()) * 0.5;
        let eig = s.symmetric_eigen();
        let v = c
            .transpose()
            .solve_upper_triangular(&eig.eigenvectors)
            .ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
        Ok(Self {
            eigenvectors: Matrix1D::from_fn(n, n, |i, j| v[(i, j)]),
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Prepared forms of one direction's factors for the precision kernels.
#[derive(Clone, Debug)]
pub(crate) struct PreparedDiagonalization {
    pub v: PreparedMatrix,
    pub vt: PreparedMatrix,
    pub eigenvalues: Vec<f64>,
}

impl PreparedDiagonalization {
    pub fn new(fd: &FastDiagonalization) -> Self {
        Self {
            v: PreparedMatrix::new(&fd.eigenvectors),
            vt: PreparedMatrix::new(&fd.eigenvectors.transpose()),
            eigenvalues: fd.eigenvalues.clone(),
        }
    }
}

/// Applies `(⊗V) diag(1/Σλ) (⊗Vᵀ)` to `r` in place, using `tmp` as a buffer.
pub(crate) fn fast_diagonalization_apply<S: Scalar>(
    dirs: &[&PreparedDiagonalization],
    r: &mut Vec<S>,
    tmp: &mut Vec<S>,
    mode: PrecisionMode,
    scratch: &mut KernelScratch,
) {
    let dim = dirs.len();
    let extents: Vec<usize> = dirs.iter().map(|d| d.eigenvalues.len()).collect();
    tmp.resize(r.len(), S::ZERO);
    for (a, d) in dirs.iter().enumerate() {
        S::contract(&d.vt, r, &extents, a, tmp, mode, scratch);
        std::mem::swap(r, tmp);
    }
    let n0 = extents[0];
    let n1 = if dim > 1 { extents[1] } else { 1 };
    for (idx, x) in r.iter_mut().enumerate() {
        let mut lam = dirs[0].eigenvalues[idx % n0];
        if dim > 1 {
            lam += dirs[1].eigenvalues[(idx / n0) % n1];
        }
        if dim > 2 {
            lam += dirs[2].eigenvalues[idx / (n0 * n1)];
        }
        *x = *x / S::from_f64(lam);
    }
    for (a, d) in dirs.iter().enumerate() {
        S::contract(&d.v, r, &extents, a, tmp, mode, scratch);
        std::mem::swap(r, tmp);
    }
}

/// Exact inverse of a Kronecker-sum patch operator `Σ_t ⊗_a (a == t ? L_a : M_a)`
/// by fast diagonalization.
#[derive(Clone, Debug)]
pub struct PatchSolver {
    dirs: Vec<FastDiagonalization>,
}

impl PatchSolver {
    /// Builds the solver from per-axis mass and stiffness factors.
    pub fn new(factors: &[PatchMatrices1D]) -> Result<Self> {
        let pairs: Vec<(Matrix1D, Matrix1D)> = factors.iter().map(|p| (p.m.clone(), p.l.clone())).collect();
        Self::from_factors(&pairs)
    }

    pub fn from_factors(factors: &[(Matrix1D, Matrix1D)]) -> Result<Self> {
        if factors.is_empty() || factors.len() > 3 {
            return Err(contract("patch solver needs one to three directions"));
        }
        let dirs = factors
            .iter()
            .map(|(m, l)| FastDiagonalization::new(m, l))
            .collect::<Result<Vec<_>>>()?;
        Self::check(&dirs)?;
        Ok(Self { dirs })
    }

    pub(crate) fn from_diagonalizations(dirs: Vec<FastDiagonalization>) -> Result<Self> {
        Self::check(&dirs)?;
        Ok(Self { dirs })
    }

    fn check(dirs: &[FastDiagonalization]) -> Result<()> {
        let min: f64 = dirs
            .iter()
            .map(|d| d.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
            .sum();
        if !(min > 0.0) {
            return Err(Error::Singular(format!("patch operator has eigenvalue sum {min}")));
        }
        Ok(())
    }

    pub fn directions(&self) -> &[FastDiagonalization] {
        &self.dirs
    }

    pub fn len(&self) -> usize {
        self.dirs.iter().map(|d| d.size()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `e = A_patch⁻¹ r` in double precision.
    pub fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        if r.len() != self.len() {
            return Err(contract(format!("residual has length {}, patch has {}", r.len(), self.len())));
        }
        let extents: Vec<usize> = self.dirs.iter().map(|d| d.size()).collect();
        let mut cur = r.to_vec();
        let mut tmp = vec![0.0; r.len()];
        for (a, d) in self.dirs.iter().enumerate() {
            let vt = d.eigenvectors.transpose();
            contract_slice(vt.as_slice(), vt.rows(), vt.cols(), &cur, &extents, a, &mut tmp);
            std::mem::swap(&mut cur, &mut tmp);
        }
        for (idx, x) in cur.iter_mut().enumerate() {
            let mut rem = idx;
            let mut lam = 0.0;
            for d in &self.dirs {
                lam += d.eigenvalues[rem % d.size()];
                rem /= d.size();
            }
            *x /= lam;
        }
        for (a, d) in self.dirs.iter().enumerate() {
            let v = &d.eigenvectors;
            contract_slice(v.as_slice(), v.rows(), v.cols(), &cur, &extents, a, &mut tmp);
            std::mem::swap(&mut cur, &mut tmp);
        }
        Ok(cur)
    }
}

/// `patch_inverse_apply`: solves with the patch operator of `solver`.
pub fn patch_inverse_apply(solver: &PatchSolver, r: &[f64]) -> Result<Vec<f64>> {
    solver.apply(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_factors() {
        let m = Matrix1D::identity(3);
        let l = Matrix1D::diagonal(&[1.0, 2.0, 4.0]);
        let solver = PatchSolver::from_factors(&[(m.clone(), l.clone()), (m.clone(), l.clone())]).unwrap();
        let r: Vec<f64> = (0..9).map(|i| i as f64 + 1.0).collect();
        let e = solver.apply(&r).unwrap();
        let lam = [1.0, 2.0, 4.0];
        for j in 0..3 {
            for i in 0..3 {
                let expect = r[i + 3 * j] / (lam[i] + lam[j]);
                assert!((e[i + 3 * j] - expect).abs() < 1e-14);
            }
        }
        assert!(solver.apply(&[1.0]).is_err());
    }

    #[test]
    fn mass_orthonormal_eigenvectors() {
        let m = Matrix1D::from_rows(&[&[2.0, 0.5], &[0.5, 1.0]]).unwrap();
        let l = Matrix1D::from_rows(&[&[3.0, -1.0], &[-1.0, 2.0]]).unwrap();
        let fd = FastDiagonalization::new(&m, &l).unwrap();
        let v = &fd.eigenvectors;
        let vtmv = v.transpose().matmul(&m).unwrap().matmul(v).unwrap();
        let vtlv = v.transpose().matmul(&l).unwrap().matmul(v).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((vtmv.get(i, j) - id).abs() < 1e-14);
                let lam = if i == j { fd.eigenvalues[i] } else { 0.0 };
                assert!((vtlv.get(i, j) - lam).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn singular_is_reported() {
        let m = Matrix1D::identity(2);
        let l = Matrix1D::from_rows(&[&[1.0, -1.0], &[-1.0, 1.0]]).unwrap();
        let neg = Matrix1D::diagonal(&[-1.0, 1.0]);
        assert!(matches!(
            PatchSolver::from_factors(&[(m.clone(), neg.clone())]),
            Err(Error::Singular(_))
        ));
        // L singular but the mass term of the other direction regularizes
        assert!(PatchSolver::from_factors(&[(m.clone(), l.clone()), (m.clone(), Matrix1D::identity(2))]).is_ok());
        assert!(matches!(
            PatchSolver::from_factors(&[(neg.clone(), l)]),
            Err(Error::Singular(_))
        ));
    }
}
