use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Dyn, LU};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::patch_solver::{fast_diagonalization_apply, FastDiagonalization, PatchSolver, PreparedDiagonalization};
use super::transfer::{check_pair, Transfer};
use crate::error::{contract, invalid, Error, Result};
use crate::fe::{apply_operator_into, BoundaryKind, Level, MeshHierarchy, Patch};
use crate::precision::{KernelScratch, PrecisionMode, Scalar};

/// Largest coarse problem factored densely.
pub const COARSE_MAX_DOFS: usize = 8192;

/// Order in which the colored patch sub-passes run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmootherOrdering {
    /// Colors `0..2^d` in every pass.
    #[default]
    Forward,
    /// Forward colors before the coarse correction, reversed colors after it.
    Symmetric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VCycleConfig {
    pub pre_smooth_steps: usize,
    pub post_smooth_steps: usize,
    pub coarse_level: usize,
    pub mode: PrecisionMode,
    pub smoother_ordering: SmootherOrdering,
}

impl Default for VCycleConfig {
    fn default() -> Self {
        Self {
            pre_smooth_steps: 1,
            post_smooth_steps: 1,
            coarse_level: 1,
            mode: PrecisionMode::Fp64,
            smoother_ordering: SmootherOrdering::Forward,
        }
    }
}

impl VCycleConfig {
    pub fn with_mode(mode: PrecisionMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }
}

#[derive(Debug)]
enum CoarseSolver {
    F64(LU<f64, Dyn, Dyn>),
    F32(LU<f32, Dyn, Dyn>),
}

struct SmootherLevel {
    fds: [FastDiagonalization; 4],
    prepared: [PreparedDiagonalization; 4],
}

/// Geometric V-cycle with multiplicative vertex-patch smoothing.
///
/// All level work runs at the storage precision of the configured mode (f64 for
/// `Fp64`, f32 otherwise); conversion happens only on entry and exit.
pub struct Multigrid {
    hierarchy: Arc<MeshHierarchy>,
    config: VCycleConfig,
    smoothers: Vec<SmootherLevel>,
    transfer: Transfer,
    coarse: CoarseSolver,
}

impl std::fmt::Debug for Multigrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Multigrid")
            .field("levels", &self.hierarchy.max_level())
            .field("config", &self.config)
            .finish()
    }
}

fn materialize<S: Scalar + nalgebra::RealField>(level: &Level, mode: PrecisionMode) -> Result<DMatrix<S>> {
    let n = level.n_dofs();
    let mut a = DMatrix::<S>::zeros(n, n);
    let mut e = vec![S::ZERO; n];
    let mut col = vec![S::ZERO; n];
    for j in 0..n {
        e[j] = S::ONE;
        apply_operator_into(level, &e, &mut col, mode)?;
        e[j] = S::ZERO;
        for (i, &v) in col.iter().enumerate() {
            a[(i, j)] = v;
        }
    }
    Ok(a)
}

impl Multigrid {
    pub fn new(hierarchy: Arc<MeshHierarchy>, config: VCycleConfig) -> Result<Self> {
        if config.coarse_level == 0 || config.coarse_level > hierarchy.max_level() {
            return Err(invalid(format!(
                "coarse level {} outside 1..={}",
                config.coarse_level,
                hierarchy.max_level()
            )));
        }
        if config.pre_smooth_steps + config.post_smooth_steps == 0 && config.coarse_level < hierarchy.max_level() {
            return Err(invalid("at least one smoothing step is required"));
        }
        let smoothers = hierarchy
            .levels()
            .iter()
            .map(|level| {
                let fds = BoundaryKind::ALL
                    .iter()
                    .map(|&kind| {
                        let p = &level.local[kind.index()];
                        FastDiagonalization::new(&p.m, &p.l)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let fds: [FastDiagonalization; 4] = fds.try_into().expect("four kinds");
                let prepared = fds.clone().map(|fd| PreparedDiagonalization::new(&fd));
                if config.mode.uses_half() {
                    for p in &prepared {
                        p.v.check_mode(config.mode)?;
                        p.vt.check_mode(config.mode)?;
                    }
                }
                Ok(SmootherLevel { fds, prepared })
            })
            .collect::<Result<Vec<_>>>()?;
        let coarse_level = hierarchy.level(config.coarse_level);
        let n = coarse_level.n_dofs();
        if n > COARSE_MAX_DOFS {
            return Err(Error::SizeGuard(format!(
                "coarse problem has {n} DoFs, dense limit is {COARSE_MAX_DOFS}"
            )));
        }
        let coarse = if config.mode == PrecisionMode::Fp64 {
            let lu = materialize::<f64>(coarse_level, config.mode)?.lu();
            if !lu.is_invertible() {
                return Err(Error::Singular("coarse operator".into()));
            }
            CoarseSolver::F64(lu)
        } else {
            let lu = materialize::<f32>(coarse_level, config.mode)?.lu();
            if !lu.is_invertible() {
                return Err(Error::Singular("coarse operator".into()));
            }
            CoarseSolver::F32(lu)
        };
        let transfer = Transfer::new(&hierarchy.finest().basis);
        Ok(Self {
            hierarchy,
            config,
            smoothers,
            transfer,
            coarse,
        })
    }

    pub fn config(&self) -> &VCycleConfig {
        &self.config
    }

    pub fn hierarchy(&self) -> &MeshHierarchy {
        &self.hierarchy
    }

    pub fn mode(&self) -> PrecisionMode {
        self.config.mode
    }

    fn level(&self, l: usize) -> Result<&Level> {
        if l < self.config.coarse_level || l > self.hierarchy.max_level() {
            return Err(invalid(format!(
                "level {l} outside {}..={}",
                self.config.coarse_level,
                self.hierarchy.max_level()
            )));
        }
        Ok(self.hierarchy.level(l))
    }

    fn check_len(level: &Level, v: &[f64]) -> Result<()> {
        if v.len() != level.n_dofs() {
            return Err(contract(format!(
                "vector has length {}, level {} has {} DoFs",
                v.len(),
                level.level,
                level.n_dofs()
            )));
        }
        Ok(())
    }

    /// Fast-diagonalization solver of the local problem on `patch` of level `l`.
    pub fn patch_solver(&self, l: usize, patch: &Patch) -> Result<PatchSolver> {
        let level = self.level(l)?;
        let dirs = (0..level.dim)
            .map(|a| self.smoothers[l - 1].fds[patch.kinds[a].index()].clone())
            .collect();
        PatchSolver::from_diagonalizations(dirs)
    }

    /// One V-cycle on level `l` starting from `x`.
    pub fn vcycle(&self, l: usize, x: &[f64], b: &[f64]) -> Result<Vec<f64>> {
        let level = self.level(l)?;
        Self::check_len(level, x)?;
        Self::check_len(level, b)?;
        if self.config.mode == PrecisionMode::Fp64 {
            let mut x = x.to_vec();
            self.vcycle_s::<f64>(l, &mut x, b)?;
            Ok(x)
        } else {
            let mut xs: Vec<f32> = x.iter().map(|&v| v as f32).collect();
            let bs: Vec<f32> = b.iter().map(|&v| v as f32).collect();
            self.vcycle_s::<f32>(l, &mut xs, &bs)?;
            Ok(xs.into_iter().map(f64::from).collect())
        }
    }

    /// One V-cycle on the finest level with zero initial guess.
    pub fn precondition(&self, b: &[f64]) -> Result<Vec<f64>> {
        let l = self.hierarchy.max_level();
        self.vcycle(l, &vec![0.0; b.len()], b)
    }

    /// One multiplicative smoothing pass on level `l` in `mode`.
    pub fn smooth(&self, l: usize, x: &[f64], b: &[f64], mode: PrecisionMode) -> Result<Vec<f64>> {
        let level = self.level(l)?;
        Self::check_len(level, x)?;
        Self::check_len(level, b)?;
        if mode == PrecisionMode::Fp64 {
            let mut x = x.to_vec();
            self.smooth_s::<f64>(l, &mut x, b, mode, false)?;
            Ok(x)
        } else {
            let mut xs: Vec<f32> = x.iter().map(|&v| v as f32).collect();
            let bs: Vec<f32> = b.iter().map(|&v| v as f32).collect();
            self.smooth_s::<f32>(l, &mut xs, &bs, mode, false)?;
            Ok(xs.into_iter().map(f64::from).collect())
        }
    }

    /// `I↓`: level `l` to level `l - 1`.
    pub fn restrict(&self, l: usize, r: &[f64]) -> Result<Vec<f64>> {
        if l < 2 || l > self.hierarchy.max_level() {
            return Err(invalid(format!("cannot restrict from level {l}")));
        }
        let (coarse, fine) = (self.hierarchy.level(l - 1), self.hierarchy.level(l));
        check_pair(coarse, fine)?;
        Self::check_len(fine, r)?;
        Ok(self.transfer.restrict(coarse, fine, r, PrecisionMode::Fp64))
    }

    /// `I↑`: level `l` to level `l + 1`.
    pub fn prolongate(&self, l: usize, e: &[f64]) -> Result<Vec<f64>> {
        if l == 0 || l >= self.hierarchy.max_level() {
            return Err(invalid(format!("cannot prolongate from level {l}")));
        }
        let (coarse, fine) = (self.hierarchy.level(l), self.hierarchy.level(l + 1));
        check_pair(coarse, fine)?;
        Self::check_len(coarse, e)?;
        Ok(self.transfer.prolongate(coarse, fine, e, PrecisionMode::Fp64))
    }

    /// Direct solve on the coarse level in the configured precision.
    pub fn coarse_solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        Self::check_len(self.hierarchy.level(self.config.coarse_level), b)?;
        match &self.coarse {
            CoarseSolver::F64(_) => self.coarse_solve_s::<f64>(b),
            CoarseSolver::F32(_) => {
                let bs: Vec<f32> = b.iter().map(|&v| v as f32).collect();
                Ok(self.coarse_solve_s::<f32>(&bs)?.into_iter().map(f64::from).collect())
            }
        }
    }

    fn coarse_solve_s<S: Scalar>(&self, b: &[S]) -> Result<Vec<S>> {
        let singular = || Error::Singular("coarse solve failed".into());
        match &self.coarse {
            CoarseSolver::F64(lu) => {
                let rhs = DVector::from_iterator(b.len(), b.iter().map(|v| v.to_f64()));
                let x = lu.solve(&rhs).ok_or_else(singular)?;
                Ok(x.iter().map(|&v| S::from_f64(v)).collect())
            }
            CoarseSolver::F32(lu) => {
                let rhs = DVector::from_iterator(b.len(), b.iter().map(|v| v.to_f64() as f32));
                let x = lu.solve(&rhs).ok_or_else(singular)?;
                Ok(x.iter().map(|&v| S::from_f64(v as f64)).collect())
            }
        }
    }

    fn residual_s<S: Scalar>(level: &Level, x: &[S], b: &[S], r: &mut [S], mode: PrecisionMode) -> Result<()> {
        apply_operator_into(level, x, r, mode)?;
        for (ri, &bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        Ok(())
    }

    fn smooth_s<S: Scalar>(&self, l: usize, x: &mut [S], b: &[S], mode: PrecisionMode, reverse: bool) -> Result<()> {
        let level = self.hierarchy.level(l);
        let sm = &self.smoothers[l - 1];
        let mut r = vec![S::ZERO; x.len()];
        let len = level.patch_dofs();
        let n_colors = level.colors.len();
        for c in 0..n_colors {
            let color = &level.colors[if reverse { n_colors - 1 - c } else { c }];
            Self::residual_s(level, x, b, &mut r, mode)?;
            let corrections: Vec<Vec<S>> = color
                .par_iter()
                .map_init(
                    || (vec![S::ZERO; len], KernelScratch::default()),
                    |(tmp, scratch), patch| {
                        let mut local = vec![S::ZERO; len];
                        level.gather(patch, &r, &mut local);
                        let dirs: Vec<&PreparedDiagonalization> =
                            (0..level.dim).map(|a| &sm.prepared[patch.kinds[a].index()]).collect();
                        fast_diagonalization_apply(&dirs, &mut local, tmp, mode, scratch);
                        local
                    },
                )
                .collect();
            for (patch, e) in color.iter().zip(&corrections) {
                level.scatter_add(patch, e, x);
            }
        }
        Ok(())
    }

    fn vcycle_s<S: Scalar>(&self, l: usize, x: &mut Vec<S>, b: &[S]) -> Result<()> {
        let mode = self.config.mode;
        if l == self.config.coarse_level {
            *x = self.coarse_solve_s(b)?;
            return Ok(());
        }
        let level = self.hierarchy.level(l);
        let coarse = self.hierarchy.level(l - 1);
        for _ in 0..self.config.pre_smooth_steps {
            self.smooth_s(l, x, b, mode, false)?;
        }
        let mut r = vec![S::ZERO; x.len()];
        Self::residual_s(level, x, b, &mut r, mode)?;
        let rc = self.transfer.restrict(coarse, level, &r, mode);
        let mut ec = vec![S::ZERO; rc.len()];
        self.vcycle_s(l - 1, &mut ec, &rc)?;
        let ef = self.transfer.prolongate(coarse, level, &ec, mode);
        for (xi, e) in x.iter_mut().zip(ef) {
            *xi += e;
        }
        let reverse = self.config.smoother_ordering == SmootherOrdering::Symmetric;
        for _ in 0..self.config.post_smooth_steps {
            self.smooth_s(l, x, b, mode, reverse)?;
        }
        Ok(())
    }
}
