use serde::{Deserialize, Serialize};

use super::basis::Basis1D;
use crate::error::{invalid, Result};
use crate::tensor::Matrix1D;

/// Interior penalty parameter of a face between cells of size `h_plus`, `h_minus`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyParams {
    pub degree: usize,
    pub h_plus: f64,
    pub h_minus: f64,
}

impl PenaltyParams {
    pub fn value(&self) -> f64 {
        penalty(self.degree, self.h_plus, self.h_minus)
    }
}

/// `γ_e = k(k+1)(1/h⁺ + 1/h⁻)`.
pub fn penalty(k: usize, h_plus: f64, h_minus: f64) -> f64 {
    let k = k as f64;
    k * (k + 1.0) * (1.0 / h_plus + 1.0 / h_minus)
}

/// Position of a two-cell vertex patch relative to the domain boundary along one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Interior,
    LeftBoundary,
    RightBoundary,
    /// The patch spans the whole axis (two cells in total).
    Both,
}

impl BoundaryKind {
    pub const ALL: [BoundaryKind; 4] = [
        Self::Interior,
        Self::LeftBoundary,
        Self::RightBoundary,
        Self::Both,
    ];

    /// Kind of the patch around interior vertex `vertex` (1..n_cells) of an axis with `n_cells` cells.
    pub fn for_vertex(vertex: usize, n_cells: usize) -> Self {
        debug_assert!(vertex >= 1 && vertex < n_cells);
        match (vertex == 1, vertex + 1 == n_cells) {
            (true, true) => Self::Both,
            (true, false) => Self::LeftBoundary,
            (false, true) => Self::RightBoundary,
            (false, false) => Self::Interior,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn touches_left(self) -> bool {
        matches!(self, Self::LeftBoundary | Self::Both)
    }

    pub fn touches_right(self) -> bool {
        matches!(self, Self::RightBoundary | Self::Both)
    }
}

/// 1D factors of a two-cell vertex patch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatchMatrices1D {
    pub m: Matrix1D,
    pub l: Matrix1D,
    pub boundary_kind: BoundaryKind,
}

/// Cell mass `h·∫φ_iφ_j` and stiffness `(1/h)·∫φ_i'φ_j'` on the reference interval.
pub fn cell_matrices_1d(k: usize, h: f64) -> Result<(Matrix1D, Matrix1D)> {
    check_h(h)?;
    let basis = Basis1D::new(k)?;
    Ok(cell_matrices_from_basis(&basis, h))
}

pub(crate) fn cell_matrices_from_basis(basis: &Basis1D, h: f64) -> (Matrix1D, Matrix1D) {
    let n = basis.n_dofs();
    let w = &basis.quadrature.weights;
    let mut m = Matrix1D::zeros(n, n);
    let mut l = Matrix1D::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut sm = 0.0;
            let mut sl = 0.0;
            for (q, &wq) in w.iter().enumerate() {
                sm += wq * basis.s.get(q, i) * basis.s.get(q, j);
                sl += wq * basis.d.get(q, i) * basis.d.get(q, j);
            }
            m.set(i, j, h * sm);
            l.set(i, j, sl / h);
        }
    }
    (m, l)
}

/// SIPG terms `γ[u][v] − {u'}[v] − [u]{v'}` of the face between a left cell
/// (size `h_minus`) and a right cell (size `h_plus`), over the `2(k+1)` DoFs of both cells.
pub(crate) fn interior_face_1d(basis: &Basis1D, h_minus: f64, h_plus: f64) -> Matrix1D {
    let n = basis.n_dofs();
    let gamma = penalty(basis.degree, h_plus, h_minus);
    let mut jump = vec![0.0; 2 * n];
    let mut avg = vec![0.0; 2 * n];
    for j in 0..n {
        jump[j] = basis.value(j, 1.0);
        jump[n + j] = -basis.value(j, 0.0);
        avg[j] = 0.5 * basis.derivative(j, 1.0) / h_minus;
        avg[n + j] = 0.5 * basis.derivative(j, 0.0) / h_plus;
    }
    Matrix1D::from_fn(2 * n, 2 * n, |i, j| {
        gamma * jump[i] * jump[j] - jump[i] * avg[j] - avg[i] * jump[j]
    })
}

/// Nitsche terms `γuv − (∂_n u)v − u(∂_n v)` of a boundary face; `left` selects `x = 0`.
pub(crate) fn boundary_face_1d(basis: &Basis1D, h: f64, left: bool) -> Matrix1D {
    let n = basis.n_dofs();
    let gamma = penalty(basis.degree, h, h);
    let (x, normal) = if left { (0.0, -1.0) } else { (1.0, 1.0) };
    let val: Vec<f64> = (0..n).map(|j| basis.value(j, x)).collect();
    let dn: Vec<f64> = (0..n).map(|j| normal * basis.derivative(j, x) / h).collect();
    Matrix1D::from_fn(n, n, |i, j| gamma * val[i] * val[j] - val[i] * dn[j] - dn[i] * val[j])
}

fn add_block(target: &mut Matrix1D, block: &Matrix1D, r0: usize, c0: usize) {
    for i in 0..block.rows() {
        for j in 0..block.cols() {
            target.add_to(r0 + i, c0 + j, block.get(i, j));
        }
    }
}

/// Global 1D mass and SIPG stiffness on `n_cells` uniform cells of size `h`,
/// Dirichlet conditions imposed weakly on both ends.
pub fn global_matrices_1d(k: usize, n_cells: usize, h: f64) -> Result<(Matrix1D, Matrix1D)> {
    check_h(h)?;
    if n_cells == 0 {
        return Err(invalid("need at least one cell"));
    }
    let basis = Basis1D::new(k)?;
    Ok(global_from_basis(&basis, n_cells, h))
}

fn global_from_basis(basis: &Basis1D, n_cells: usize, h: f64) -> (Matrix1D, Matrix1D) {
    let n = basis.n_dofs();
    let size = n * n_cells;
    let (cm, cl) = cell_matrices_from_basis(basis, h);
    let face = interior_face_1d(basis, h, h);
    let mut m = Matrix1D::zeros(size, size);
    let mut l = Matrix1D::zeros(size, size);
    for c in 0..n_cells {
        add_block(&mut m, &cm, c * n, c * n);
        add_block(&mut l, &cl, c * n, c * n);
    }
    for c in 1..n_cells {
        add_block(&mut l, &face, (c - 1) * n, (c - 1) * n);
    }
    add_block(&mut l, &boundary_face_1d(basis, h, true), 0, 0);
    add_block(&mut l, &boundary_face_1d(basis, h, false), (n_cells - 1) * n, (n_cells - 1) * n);
    (m, l)
}

/// Local-solver factors of a vertex patch: the two-cell mass and the restriction
/// of the global SIPG stiffness to the patch DoFs.
///
/// Outer faces contribute their patch-side terms, so `L` is symmetric positive
/// definite for every kind.
pub fn patch_matrices_1d(k: usize, h: f64, boundary_kind: BoundaryKind) -> Result<PatchMatrices1D> {
    check_h(h)?;
    let basis = Basis1D::new(k)?;
    Ok(patch_from_basis(&basis, h, boundary_kind))
}

pub(crate) fn patch_from_basis(basis: &Basis1D, h: f64, boundary_kind: BoundaryKind) -> PatchMatrices1D {
    let n = basis.n_dofs();
    // smallest uniform mesh on which a patch of this kind exists
    let (cells, first) = match boundary_kind {
        BoundaryKind::Interior => (4, 1),
        BoundaryKind::LeftBoundary => (3, 0),
        BoundaryKind::RightBoundary => (3, 1),
        BoundaryKind::Both => (2, 0),
    };
    let (m, l) = global_from_basis(basis, cells, h);
    PatchMatrices1D {
        m: m.block(first * n, first * n, 2 * n, 2 * n),
        l: l.block(first * n, first * n, 2 * n, 2 * n),
        boundary_kind,
    }
}

/// Ownership-partial factors used by operator evaluation.
///
/// Summed over all interior vertices of an axis they reproduce the global 1D
/// matrices exactly: a patch owns its left cell and its center face; the last
/// patch also owns its right cell; boundary faces belong to the adjacent patch.
pub(crate) fn owned_patch_from_basis(basis: &Basis1D, h: f64, kind: BoundaryKind) -> PatchMatrices1D {
    let n = basis.n_dofs();
    let (cm, cl) = cell_matrices_from_basis(basis, h);
    let mut m = Matrix1D::zeros(2 * n, 2 * n);
    let mut l = Matrix1D::zeros(2 * n, 2 * n);
    add_block(&mut m, &cm, 0, 0);
    add_block(&mut l, &cl, 0, 0);
    add_block(&mut l, &interior_face_1d(basis, h, h), 0, 0);
    if kind.touches_right() {
        add_block(&mut m, &cm, n, n);
        add_block(&mut l, &cl, n, n);
        add_block(&mut l, &boundary_face_1d(basis, h, false), n, n);
    }
    if kind.touches_left() {
        add_block(&mut l, &boundary_face_1d(basis, h, true), 0, 0);
    }
    PatchMatrices1D {
        m,
        l,
        boundary_kind: kind,
    }
}

/// Ownership-partial patch factors (see [`owned_patch_from_basis`]).
pub fn owned_patch_matrices_1d(k: usize, h: f64, kind: BoundaryKind) -> Result<PatchMatrices1D> {
    check_h(h)?;
    let basis = Basis1D::new(k)?;
    Ok(owned_patch_from_basis(&basis, h, kind))
}

fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid(format!("cell size must be positive, got {h}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn to_na(m: &Matrix1D) -> DMatrix<f64> {
        DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
    }

    fn min_eig(m: &Matrix1D) -> f64 {
        to_na(m).symmetric_eigen().eigenvalues.min()
    }

    #[test]
    fn penalty_values() {
        assert_eq!(penalty(1, 1.0, 1.0), 4.0);
        assert_eq!(penalty(3, 0.5, 0.5), 48.0);
        assert_eq!(penalty(3, 0.25, 0.25), 96.0);
        assert_eq!(penalty(2, 0.5, 0.25), penalty(2, 0.25, 0.5));
        let p = PenaltyParams { degree: 3, h_plus: 0.25, h_minus: 0.25 };
        assert_eq!(p.value(), 96.0);
    }

    #[test]
    fn linear_cell_matrices() {
        let (m, l) = cell_matrices_1d(1, 1.0).unwrap();
        let em = [[1.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 3.0]];
        let el = [[1.0, -1.0], [-1.0, 1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m.get(i, j) - em[i][j]).abs() < 1e-15);
                assert!((l.get(i, j) - el[i][j]).abs() < 1e-15);
            }
        }
        assert!(cell_matrices_1d(1, 0.0).is_err());
    }

    #[test]
    fn cell_scaling_and_row_sums() {
        for k in 1..=4 {
            let (m1, l1) = cell_matrices_1d(k, 1.0).unwrap();
            let (mh, lh) = cell_matrices_1d(k, 0.125).unwrap();
            for i in 0..=k {
                let row: f64 = (0..=k).map(|j| l1.get(i, j)).sum();
                assert!(row.abs() < 1e-11);
                for j in 0..=k {
                    assert!((mh.get(i, j) - 0.125 * m1.get(i, j)).abs() < 1e-15);
                    assert!((lh.get(i, j) - 8.0 * l1.get(i, j)).abs() < 1e-11);
                }
            }
            let total: f64 = m1.as_slice().iter().sum();
            assert!((total - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn patch_matrices_are_spd() {
        for k in 1..=4 {
            for kind in BoundaryKind::ALL {
                let p = patch_matrices_1d(k, 0.25, kind).unwrap();
                assert_eq!(p.m.rows(), 2 * (k + 1));
                assert!(p.m.is_symmetric(1e-14));
                assert!(p.l.is_symmetric(1e-12));
                assert!(min_eig(&p.m) > 0.0);
                assert!(min_eig(&p.l) > 0.0, "k={k} {kind:?}");
            }
        }
    }

    #[test]
    fn patch_mass_is_block_diagonal() {
        let (cm, _) = cell_matrices_1d(3, 0.5).unwrap();
        let p = patch_matrices_1d(3, 0.5, BoundaryKind::Interior).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let expect = if i / 4 == j / 4 { cm.get(i % 4, j % 4) } else { 0.0 };
                assert_eq!(p.m.get(i, j), expect);
            }
        }
    }

    #[test]
    fn linear_interior_patch_face_coupling() {
        // direct hand assembly for k = 1, h = 1/2: left cell nodes (a0, a1), right (b0, b1)
        let h = 0.5;
        let p = patch_matrices_1d(1, h, BoundaryKind::Interior).unwrap();
        let gamma = penalty(1, h, h);
        let g = 1.0 / h;
        // derivative of the trace functions: φ0' = -1/h, φ1' = 1/h
        // face at the center: jump = (0, 1, -1, 0), avg = (-g/2, g/2, -g/2, g/2)
        let jump = [0.0, 1.0, -1.0, 0.0];
        let avg = [-g / 2.0, g / 2.0, -g / 2.0, g / 2.0];
        let mut expect = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                expect[i][j] = gamma * jump[i] * jump[j] - jump[i] * avg[j] - avg[i] * jump[j];
            }
        }
        // outer faces contribute only the patch-side traces
        let (lo, hi) = (0usize, 3usize);
        expect[lo][lo] += gamma;
        expect[hi][hi] += gamma;
        // consistency terms at outer faces: -{u'}[v] restricted to patch-side DoFs
        // left outer face: jump of patch side = -u(a0); avg = (φ'(0) on the patch side)/2
        let da = [-g, g];
        for j in 0..2 {
            expect[lo][j] += 0.5 * da[j];
            expect[j][lo] += 0.5 * da[j];
            expect[hi][2 + j] -= 0.5 * da[j];
            expect[2 + j][hi] -= 0.5 * da[j];
        }
        let cell = [[g, -g], [-g, g]];
        for c in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    expect[2 * c + i][2 * c + j] += cell[i][j];
                }
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                assert!((p.l.get(i, j) - expect[i][j]).abs() < 1e-12, "({i},{j})");
            }
        }
        // the two nodes away from the center face do not couple
        assert_eq!(p.l.get(0, 3), 0.0);
        assert_eq!(p.l.get(3, 0), 0.0);
        assert!(p.l.get(1, 2) != 0.0);
        assert!(min_eig(&p.l) >= -1e-12);
    }

    #[test]
    fn owned_pieces_sum_to_global() {
        for k in 1..=3 {
            for n in 2..=6 {
                let h = 1.0 / n as f64;
                let basis = Basis1D::new(k).unwrap();
                let (gm, gl) = global_from_basis(&basis, n, h);
                let dofs = k + 1;
                let mut sm = Matrix1D::zeros(n * dofs, n * dofs);
                let mut sl = Matrix1D::zeros(n * dofs, n * dofs);
                for v in 1..n {
                    let p = owned_patch_from_basis(&basis, h, BoundaryKind::for_vertex(v, n));
                    let off = (v - 1) * dofs;
                    add_block(&mut sm, &p.m, off, off);
                    add_block(&mut sl, &p.l, off, off);
                }
                for i in 0..n * dofs {
                    for j in 0..n * dofs {
                        assert!((sm.get(i, j) - gm.get(i, j)).abs() < 1e-14);
                        assert!((sl.get(i, j) - gl.get(i, j)).abs() < 1e-11 * gl.max_abs());
                    }
                }
            }
        }
    }

    #[test]
    fn global_matrix_is_spd() {
        for k in 1..=3 {
            let (m, l) = global_matrices_1d(k, 4, 0.25).unwrap();
            assert!(l.is_symmetric(1e-12));
            assert!(min_eig(&l) > 0.0);
            assert!(min_eig(&m) > 0.0);
        }
    }

    #[test]
    fn vertex_kinds() {
        assert_eq!(BoundaryKind::for_vertex(1, 2), BoundaryKind::Both);
        assert_eq!(BoundaryKind::for_vertex(1, 4), BoundaryKind::LeftBoundary);
        assert_eq!(BoundaryKind::for_vertex(2, 4), BoundaryKind::Interior);
        assert_eq!(BoundaryKind::for_vertex(3, 4), BoundaryKind::RightBoundary);
    }
}
