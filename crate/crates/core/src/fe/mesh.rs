use serde::Serialize;

use super::basis::Basis1D;
use super::sipg::{cell_matrices_from_basis, owned_patch_from_basis, patch_from_basis, BoundaryKind, PatchMatrices1D};
use crate::error::{invalid, Error, Result};
use crate::precision::PreparedMatrix;
use crate::tensor::Matrix1D;

/// Largest number of DoFs a hierarchy may allocate on its finest level.
pub const DEFAULT_DOF_CAP: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HierarchyConfig {
    pub dim: usize,
    pub degree: usize,
    pub max_level: usize,
    pub dof_cap: usize,
}

impl HierarchyConfig {
    pub fn new(dim: usize, degree: usize, max_level: usize) -> Self {
        Self {
            dim,
            degree,
            max_level,
            dof_cap: DEFAULT_DOF_CAP,
        }
    }
}

/// A vertex patch: the `2^d` cells around one interior mesh vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Patch {
    pub vertex: [usize; 3],
    pub kinds: [BoundaryKind; 3],
    /// Cell indices in patch-local order: bit `a` of the position selects the side along axis `a`.
    pub cells: Vec<usize>,
}

/// One refinement level of the uniform Cartesian mesh of `[0,1]^d`.
#[derive(Clone, Debug)]
pub struct Level {
    pub level: usize,
    pub dim: usize,
    pub degree: usize,
    pub cells_per_axis: usize,
    pub h: f64,
    pub basis: Basis1D,
    pub cell_mass: Matrix1D,
    pub cell_stiffness: Matrix1D,
    /// Local-solver factors indexed by [`BoundaryKind::index`].
    pub local: [PatchMatrices1D; 4],
    /// Ownership-partial factors indexed by [`BoundaryKind::index`].
    pub owned: [PatchMatrices1D; 4],
    pub(crate) owned_prepared: [(PreparedMatrix, PreparedMatrix); 4],
    /// Vertex patches grouped into `2^d` colors of pairwise disjoint patches.
    pub colors: Vec<Vec<Patch>>,
    /// `patch_map[b * dofs_per_cell + j]` is the patch-local index of DoF `j` of patch cell `b`.
    patch_map: Vec<usize>,
}

impl Level {
    pub fn new(dim: usize, degree: usize, level: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(invalid(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if level == 0 {
            return Err(invalid("vertex patches need at least two cells per axis (level >= 1)"));
        }
        if level > 20 {
            return Err(invalid(format!("level {level} is too deep")));
        }
        let basis = Basis1D::new(degree)?;
        let n = 1usize << level;
        let h = 1.0 / n as f64;
        let (cell_mass, cell_stiffness) = cell_matrices_from_basis(&basis, h);
        let local = BoundaryKind::ALL.map(|kind| patch_from_basis(&basis, h, kind));
        let owned = BoundaryKind::ALL.map(|kind| owned_patch_from_basis(&basis, h, kind));
        let owned_prepared = owned
            .clone()
            .map(|p| (PreparedMatrix::new(&p.m), PreparedMatrix::new(&p.l)));

        let mut colors = vec![Vec::new(); 1 << dim];
        let verts = n - 1;
        let n_patches = verts.pow(dim as u32);
        for flat in 0..n_patches {
            let mut vertex = [0usize; 3];
            let mut kinds = [BoundaryKind::Both; 3];
            let mut color = 0;
            let mut rem = flat;
            for a in 0..dim {
                vertex[a] = rem % verts + 1;
                rem /= verts;
                kinds[a] = BoundaryKind::for_vertex(vertex[a], n);
                color |= ((vertex[a] - 1) & 1) << a;
            }
            let cells = (0..1usize << dim)
                .map(|b| {
                    (0..dim)
                        .map(|a| (vertex[a] - 1 + ((b >> a) & 1)) * n.pow(a as u32))
                        .sum()
                })
                .collect();
            colors[color].push(Patch { vertex, kinds, cells });
        }

        let k1 = degree + 1;
        let cell_dofs = k1.pow(dim as u32);
        let big = 2 * k1;
        let mut patch_map = Vec::with_capacity(cell_dofs << dim);
        for b in 0..1usize << dim {
            for j in 0..cell_dofs {
                let mut rem = j;
                let mut p = 0;
                for a in 0..dim {
                    let ja = rem % k1;
                    rem /= k1;
                    p += (((b >> a) & 1) * k1 + ja) * big.pow(a as u32);
                }
                patch_map.push(p);
            }
        }

        Ok(Self {
            level,
            dim,
            degree,
            cells_per_axis: n,
            h,
            basis,
            cell_mass,
            cell_stiffness,
            local,
            owned,
            owned_prepared,
            colors,
            patch_map,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.cells_per_axis.pow(self.dim as u32)
    }

    pub fn dofs_per_cell(&self) -> usize {
        (self.degree + 1).pow(self.dim as u32)
    }

    pub fn n_dofs(&self) -> usize {
        self.n_cells() * self.dofs_per_cell()
    }

    /// Extent of a patch tensor along each axis, `2(k+1)`.
    pub fn patch_size(&self) -> usize {
        2 * (self.degree + 1)
    }

    pub fn patch_extents(&self) -> Vec<usize> {
        vec![self.patch_size(); self.dim]
    }

    pub fn patch_dofs(&self) -> usize {
        self.patch_size().pow(self.dim as u32)
    }

    pub fn n_patches(&self) -> usize {
        self.colors.iter().map(Vec::len).sum()
    }

    pub fn patches(&self) -> impl Iterator<Item = &Patch> {
        self.colors.iter().flatten()
    }

    pub fn cell_coords(&self, cell: usize) -> [usize; 3] {
        let mut c = [0; 3];
        let mut rem = cell;
        for a in 0..self.dim {
            c[a] = rem % self.cells_per_axis;
            rem /= self.cells_per_axis;
        }
        c
    }

    pub fn cell_index(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .take(self.dim)
            .rev()
            .fold(0, |acc, &c| acc * self.cells_per_axis + c)
    }

    /// Physical coordinates of global DoF `dof` (a Gauss-Lobatto node).
    pub fn dof_coords(&self, dof: usize) -> [f64; 3] {
        let cd = self.dofs_per_cell();
        let cell = self.cell_coords(dof / cd);
        let mut rem = dof % cd;
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            let j = rem % (self.degree + 1);
            rem /= self.degree + 1;
            x[a] = (cell[a] as f64 + self.basis.nodes[j]) * self.h;
        }
        x
    }

    /// Copies the patch DoFs of `u` into the patch tensor `out`.
    pub fn gather<S: Copy>(&self, patch: &Patch, u: &[S], out: &mut [S]) {
        let cd = self.dofs_per_cell();
        for (b, &cell) in patch.cells.iter().enumerate() {
            let src = &u[cell * cd..(cell + 1) * cd];
            let map = &self.patch_map[b * cd..(b + 1) * cd];
            for (&p, &x) in map.iter().zip(src) {
                out[p] = x;
            }
        }
    }

    /// Adds the patch tensor `local` into `v`.
    pub fn scatter_add<S: Copy + std::ops::AddAssign>(&self, patch: &Patch, local: &[S], v: &mut [S]) {
        let cd = self.dofs_per_cell();
        for (b, &cell) in patch.cells.iter().enumerate() {
            let dst = &mut v[cell * cd..(cell + 1) * cd];
            let map = &self.patch_map[b * cd..(b + 1) * cd];
            for (&p, d) in map.iter().zip(dst) {
                *d += local[p];
            }
        }
    }
}

/// Nested uniform levels `1..=max_level`.
#[derive(Clone, Debug)]
pub struct MeshHierarchy {
    pub dim: usize,
    pub degree: usize,
    levels: Vec<Level>,
}

impl MeshHierarchy {
    pub fn new(config: &HierarchyConfig) -> Result<Self> {
        if config.degree == 0 {
            return Err(invalid("degree must be at least 1"));
        }
        if config.max_level == 0 {
            return Err(invalid("max level must be at least 1"));
        }
        let cells = 1u128 << (config.max_level * config.dim).min(120);
        let dofs = cells * ((config.degree + 1) as u128).pow(config.dim as u32);
        if config.max_level > 20 || dofs > config.dof_cap as u128 {
            return Err(Error::SizeGuard(format!(
                "level {} with k = {} needs {dofs} DoFs, cap is {}",
                config.max_level, config.degree, config.dof_cap
            )));
        }
        let levels = (1..=config.max_level)
            .map(|l| Level::new(config.dim, config.degree, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dim: config.dim,
            degree: config.degree,
            levels,
        })
    }

    pub fn max_level(&self) -> usize {
        self.levels.len()
    }

    /// Level `l`, counted from 1.
    pub fn level(&self, l: usize) -> &Level {
        &self.levels[l - 1]
    }

    pub fn finest(&self) -> &Level {
        self.levels.last().expect("hierarchy has at least one level")
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }
}

/// Three-dimensional hierarchy with the default DoF cap.
pub fn build_hierarchy(max_level: usize, k: usize) -> Result<MeshHierarchy> {
    MeshHierarchy::new(&HierarchyConfig::new(3, k, max_level))
}
