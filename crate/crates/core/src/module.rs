//! Grid modules and their morphisms.
//!
//! A [`GridModule`] stores a functor on a finite grid: a dimension per vertex and one matrix per
//! unit edge. It stands for its extension to R^n: the value at `x` is the value at the largest
//! grid vertex below `x`, or zero when there is none.

use crate::error::{CoreError, Violation};
use crate::field::{FieldConfig, Mat};
use crate::grid::Grid;
use crate::rational::Q;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridModule {
    field: FieldConfig,
    grid: Grid,
    dims: Vec<usize>,
    /// `steps[k][v]` maps `v` to its successor along axis `k`; empty placeholder at the last layer.
    steps: Vec<Vec<Mat>>,
}

impl GridModule {
    /// Build and fully validate a module.
    pub fn new(field: FieldConfig, grid: Grid, dims: Vec<usize>, steps: Vec<Vec<Mat>>) -> Result<Self, CoreError> {
        let m = Self::from_parts_unchecked(field, grid, dims, steps)?;
        m.validate()?;
        Ok(m)
    }

    /// Build with shape checks only; commutativity is not checked.
    pub fn from_parts_unchecked(
        field: FieldConfig,
        grid: Grid,
        dims: Vec<usize>,
        mut steps: Vec<Vec<Mat>>,
    ) -> Result<Self, CoreError> {
        if dims.len() != grid.num_vertices() {
            return Err(CoreError::Invalid(format!(
                "expected {} dimensions, found {}",
                grid.num_vertices(),
                dims.len()
            )));
        }
        if steps.len() != grid.n() || steps.iter().any(|s| s.len() != grid.num_vertices()) {
            return Err(CoreError::Invalid("step table has the wrong size".into()));
        }
        for (k, sk) in steps.iter_mut().enumerate() {
            for (v, s) in sk.iter_mut().enumerate() {
                match grid.successor(v, k) {
                    Some(w) => {
                        if s.shape() != (dims[w], dims[v]) {
                            return Err(Violation::Shape {
                                what: format!("step along axis {k}"),
                                vertex: grid.multi(v),
                                expected: (dims[w], dims[v]),
                                found: s.shape(),
                            }
                            .into());
                        }
                        if s.data().iter().any(|&x| x >= field.p()) {
                            return Err(CoreError::Invalid(format!(
                                "step entry out of range at vertex {:?}",
                                grid.multi(v)
                            )));
                        }
                    }
                    None => *s = Mat::zeros(0, 0),
                }
            }
        }
        Ok(GridModule { field, grid, dims, steps })
    }

    /// Build from a closure giving the step `v -> w` along axis `k`; validated.
    pub fn from_fn(
        field: FieldConfig,
        grid: Grid,
        dims: Vec<usize>,
        mut step: impl FnMut(usize, usize, usize) -> Mat,
    ) -> Result<Self, CoreError> {
        let steps = (0..grid.n())
            .map(|k| {
                grid.vertices()
                    .map(|v| match grid.successor(v, k) {
                        Some(w) => step(k, v, w),
                        None => Mat::zeros(0, 0),
                    })
                    .collect()
            })
            .collect();
        Self::new(field, grid, dims, steps)
    }

    pub fn zero(field: FieldConfig, grid: Grid) -> Self {
        let nv = grid.num_vertices();
        let steps = (0..grid.n()).map(|_| vec![Mat::zeros(0, 0); nv]).collect();
        GridModule { field, grid, dims: vec![0; nv], steps }
    }

    /// The free module at vertex `i`: 𝕜 on the up-set of `i`, identity steps.
    pub fn free_module(field: FieldConfig, grid: Grid, i: usize) -> Self {
        let dims: Vec<usize> = grid.vertices().map(|v| usize::from(grid.leq(i, v))).collect();
        let d = dims.clone();
        Self::from_fn(field, grid, dims, |_, v, w| {
            if d[v] == 1 && d[w] == 1 {
                Mat::identity(1)
            } else {
                Mat::zeros(d[w], d[v])
            }
        })
        .expect("free module is valid")
    }

    /// 𝕜 on the hook `[a, b) = {x : a ≤ x, x ≱ b}`, stored on the corner grid `{a_i, b_i}`.
    pub fn interval_module(field: FieldConfig, a: &[Q], b: &[Q]) -> Result<Self, CoreError> {
        if a.len() != b.len() || a.is_empty() {
            return Err(CoreError::Invalid("interval endpoints must have equal positive length".into()));
        }
        if a.iter().zip(b).any(|(x, y)| x >= y) {
            return Err(CoreError::Invalid("interval needs a < b in every coordinate".into()));
        }
        let grid = Grid::new(a.iter().zip(b).map(|(x, y)| vec![x.clone(), y.clone()]).collect())?;
        let dims: Vec<usize> = grid
            .vertices()
            .map(|v| usize::from((0..grid.n()).any(|k| grid.coord_index(v, k) == 0)))
            .collect();
        let d = dims.clone();
        Self::from_fn(field, grid, dims, |_, v, w| {
            if d[v] == 1 && d[w] == 1 {
                Mat::identity(1)
            } else {
                Mat::zeros(d[w], d[v])
            }
        })
    }

    /// 𝕜 on the box `{x : a_i ≤ x_i < b_i for all i}`.
    pub fn box_module(field: FieldConfig, a: &[Q], b: &[Q]) -> Result<Self, CoreError> {
        if a.len() != b.len() || a.is_empty() {
            return Err(CoreError::Invalid("box corners must have equal positive length".into()));
        }
        if a.iter().zip(b).any(|(x, y)| x >= y) {
            return Err(CoreError::Invalid("box needs a < b in every coordinate".into()));
        }
        let grid = Grid::new(a.iter().zip(b).map(|(x, y)| vec![x.clone(), y.clone()]).collect())?;
        let dims: Vec<usize> = grid.vertices().map(|v| usize::from(v == 0)).collect();
        let d = dims.clone();
        Self::from_fn(field, grid, dims, |_, v, w| Mat::zeros(d[w], d[v]))
    }

    #[inline]
    pub fn field(&self) -> FieldConfig {
        self.field
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    #[inline]
    pub fn dim(&self, v: usize) -> usize {
        self.dims[v]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    pub fn max_pointwise_dim(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    /// Step from `v` along axis `k`, if `v` has a successor there.
    #[inline]
    pub fn step(&self, k: usize, v: usize) -> Option<&Mat> {
        self.grid.successor(v, k).map(|_| &self.steps[k][v])
    }

    pub fn steps(&self) -> &[Vec<Mat>] {
        &self.steps
    }

    pub fn same_grid(&self, other: &GridModule) -> bool {
        self.grid == other.grid
    }

    pub fn check_compatible(&self, other: &GridModule) -> Result<(), CoreError> {
        if self.field != other.field {
            return Err(CoreError::FieldMismatch(self.field.p(), other.field.p()));
        }
        if !self.same_grid(other) {
            return Err(CoreError::GridMismatch);
        }
        Ok(())
    }

    /// Check that every unit square commutes.
    pub fn validate(&self) -> Result<(), Violation> {
        let g = &self.grid;
        let f = self.field;
        for v in g.vertices() {
            for j in 0..g.n() {
                let Some(vj) = g.successor(v, j) else { continue };
                for k in (j + 1)..g.n() {
                    let Some(vk) = g.successor(v, k) else { continue };
                    let vjk = vj + g.stride(k);
                    if self.dims[v] == 0 || self.dims[vjk] == 0 {
                        continue;
                    }
                    let a = self.steps[k][vj].mul(f, &self.steps[j][v]);
                    let b = self.steps[j][vk].mul(f, &self.steps[k][v]);
                    if a != b {
                        return Err(Violation::Square { vertex: g.multi(v), axes: (j, k), residual: a.sub(f, &b) });
                    }
                }
            }
        }
        Ok(())
    }

    /// Composite of steps from `p` to `q` (requires `p <= q`).
    pub fn structure_map(&self, p: usize, q: usize) -> Result<Mat, CoreError> {
        if !self.grid.leq(p, q) {
            return Err(CoreError::NotComparable(self.grid.multi(p), self.grid.multi(q)));
        }
        Ok(self.structure_map_unchecked(p, q))
    }

    pub(crate) fn structure_map_unchecked(&self, p: usize, q: usize) -> Mat {
        let g = &self.grid;
        let f = self.field;
        let mut cur = p;
        let mut acc: Option<Mat> = None;
        for k in 0..g.n() {
            let target = g.coord_index(q, k);
            while g.coord_index(cur, k) < target {
                let s = &self.steps[k][cur];
                acc = Some(match acc {
                    None => s.clone(),
                    Some(a) => s.mul(f, &a),
                });
                cur += g.stride(k);
            }
        }
        acc.unwrap_or_else(|| Mat::identity(self.dims[p]))
    }

    /// Vertex whose value the extension takes at `x`.
    pub fn floor_vertex(&self, x: &[Q]) -> Option<usize> {
        self.grid.floor(x)
    }

    /// Dimension of the extension at `x`.
    pub fn dim_at(&self, x: &[Q]) -> usize {
        self.floor_vertex(x).map_or(0, |v| self.dims[v])
    }

    /// Structure map of the extension from `x` to `y` (`x <= y`).
    pub fn map_between_points(&self, x: &[Q], y: &[Q]) -> Mat {
        match (self.floor_vertex(x), self.floor_vertex(y)) {
            (Some(a), Some(b)) => self.structure_map_unchecked(a, b),
            (a, b) => Mat::zeros(b.map_or(0, |b| self.dims[b]), a.map_or(0, |a| self.dims[a])),
        }
    }

    /// The module `M_P` on grid `P`: value at `q` is the extension's value at `q`.
    pub fn restriction_extension(&self, p: &Grid) -> GridModule {
        let amap = p.axis_floor_map(&self.grid, &Q::from_integer(0.into()));
        self.resample(p, &amap)
    }

    /// Resample on `p` through a precomputed floor map (allows shifted lookups).
    pub fn resample(&self, p: &Grid, amap: &crate::grid::AxisMap) -> GridModule {
        let floors = amap.floors(p);
        let dims: Vec<usize> = floors.iter().map(|fl| fl.map_or(0, |v| self.dims[v])).collect();
        let steps = (0..p.n())
            .map(|k| {
                p.vertices()
                    .map(|v| match p.successor(v, k) {
                        None => Mat::zeros(0, 0),
                        Some(w) => match (floors[v], floors[w]) {
                            (Some(a), Some(b)) => self.axis_map(k, a, b),
                            _ => Mat::zeros(dims[w], dims[v]),
                        },
                    })
                    .collect()
            })
            .collect();
        GridModule { field: self.field, grid: p.clone(), dims, steps }
    }

    /// Structure map between two vertices that differ only along axis `k`.
    fn axis_map(&self, k: usize, a: usize, b: usize) -> Mat {
        if a == b {
            return Mat::identity(self.dims[a]);
        }
        let f = self.field;
        let mut cur = a;
        let mut acc = self.steps[k][cur].clone();
        cur += self.grid.stride(k);
        while cur != b {
            acc = self.steps[k][cur].mul(f, &acc);
            cur += self.grid.stride(k);
        }
        acc
    }

    /// Data on a translated grid: `(M[r])(x) = M(x + r)`.
    pub fn translate(&self, offset: &[Q]) -> GridModule {
        let neg: Vec<Q> = offset.iter().map(|o| -o).collect();
        GridModule { field: self.field, grid: self.grid.translate(&neg), dims: self.dims.clone(), steps: self.steps.clone() }
    }

    pub fn direct_sum(&self, other: &GridModule) -> Result<GridModule, CoreError> {
        self.check_compatible(other)?;
        let g = &self.grid;
        let dims: Vec<usize> = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let steps = (0..g.n())
            .map(|k| {
                g.vertices()
                    .map(|v| match g.successor(v, k) {
                        None => Mat::zeros(0, 0),
                        Some(_) => Mat::block_diag(&[&self.steps[k][v], &other.steps[k][v]]),
                    })
                    .collect()
            })
            .collect();
        Ok(GridModule { field: self.field, grid: g.clone(), dims, steps })
    }

    /// Direct sum of a nonempty list on a shared grid.
    pub fn direct_sum_all(mods: &[&GridModule]) -> Result<GridModule, CoreError> {
        let (first, rest) = mods.split_first().ok_or_else(|| CoreError::Invalid("empty direct sum".into()))?;
        let mut acc = (*first).clone();
        for m in rest {
            acc = acc.direct_sum(m)?;
        }
        Ok(acc)
    }

    /// Change basis by invertible `t[v]`; returns the new module. `t` becomes an isomorphism
    /// from `self` to the result.
    pub fn conjugate(&self, t: &[Mat]) -> Result<GridModule, CoreError> {
        let f = self.field;
        let g = &self.grid;
        let mut inv = Vec::with_capacity(t.len());
        for (v, m) in t.iter().enumerate() {
            if m.shape() != (self.dims[v], self.dims[v]) {
                return Err(CoreError::Invalid(format!("basis change at vertex {:?} has wrong shape", g.multi(v))));
            }
            inv.push(m.inverse(f).ok_or_else(|| CoreError::Invalid("basis change is singular".into()))?);
        }
        let steps = (0..g.n())
            .map(|k| {
                g.vertices()
                    .map(|v| match g.successor(v, k) {
                        None => Mat::zeros(0, 0),
                        Some(w) => t[w].mul(f, &self.steps[k][v]).mul(f, &inv[v]),
                    })
                    .collect()
            })
            .collect();
        Ok(GridModule { field: f, grid: g.clone(), dims: self.dims.clone(), steps })
    }

    /// Vertices with nonzero value.
    pub fn support(&self) -> Vec<usize> {
        self.grid.vertices().filter(|&v| self.dims[v] > 0).collect()
    }

    /// Smallest and largest coordinate of the support on each axis.
    pub fn support_bounds(&self) -> Option<Vec<(Q, Q)>> {
        let sup = self.support();
        if sup.is_empty() {
            return None;
        }
        Some(
            (0..self.n())
                .map(|k| {
                    let lo = sup.iter().map(|&v| self.grid.coord_index(v, k)).min().unwrap();
                    let hi = sup.iter().map(|&v| self.grid.coord_index(v, k)).max().unwrap();
                    (self.grid.axis(k)[lo].clone(), self.grid.axis(k)[hi].clone())
                })
                .collect(),
        )
    }
}

/// A natural transformation between two modules on a common grid.
#[derive(Clone, Debug)]
pub struct ModuleMorphism {
    source: Arc<GridModule>,
    target: Arc<GridModule>,
    mats: Vec<Mat>,
}

impl PartialEq for ModuleMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.mats == other.mats && *self.source == *other.source && *self.target == *other.target
    }
}

impl ModuleMorphism {
    /// Checks shapes but not naturality; see [`ModuleMorphism::check_natural`].
    pub fn new(source: Arc<GridModule>, target: Arc<GridModule>, mats: Vec<Mat>) -> Result<Self, CoreError> {
        if !Arc::ptr_eq(&source, &target) {
            source.check_compatible(&target)?;
        }
        if mats.len() != source.grid.num_vertices() {
            return Err(CoreError::Invalid("morphism needs one matrix per vertex".into()));
        }
        for (v, m) in mats.iter().enumerate() {
            let want = (target.dims[v], source.dims[v]);
            if m.shape() != want {
                return Err(Violation::Shape {
                    what: "morphism component".into(),
                    vertex: source.grid.multi(v),
                    expected: want,
                    found: m.shape(),
                }
                .into());
            }
        }
        Ok(ModuleMorphism { source, target, mats })
    }

    /// Build and require naturality.
    pub fn new_natural(source: Arc<GridModule>, target: Arc<GridModule>, mats: Vec<Mat>) -> Result<Self, CoreError> {
        let m = Self::new(source, target, mats)?;
        m.check_natural()?;
        Ok(m)
    }

    pub fn identity(m: Arc<GridModule>) -> Self {
        let mats = m.dims.iter().map(|&d| Mat::identity(d)).collect();
        ModuleMorphism { source: m.clone(), target: m, mats }
    }

    pub fn zero(source: Arc<GridModule>, target: Arc<GridModule>) -> Result<Self, CoreError> {
        let mats = source.dims.iter().zip(&target.dims).map(|(&s, &t)| Mat::zeros(t, s)).collect();
        Self::new(source, target, mats)
    }

    pub fn source(&self) -> &Arc<GridModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GridModule> {
        &self.target
    }

    pub fn mats(&self) -> &[Mat] {
        &self.mats
    }

    pub fn mat(&self, v: usize) -> &Mat {
        &self.mats[v]
    }

    pub fn into_mats(self) -> Vec<Mat> {
        self.mats
    }

    pub fn field(&self) -> FieldConfig {
        self.source.field
    }

    pub fn grid(&self) -> &Grid {
        &self.source.grid
    }

    pub fn check_natural(&self) -> Result<(), Violation> {
        let g = &self.source.grid;
        let f = self.field();
        for k in 0..g.n() {
            for v in g.vertices() {
                let Some(w) = g.successor(v, k) else { continue };
                if self.target.dims[w] == 0 || self.source.dims[v] == 0 {
                    continue;
                }
                let a = self.target.steps[k][v].mul(f, &self.mats[v]);
                let b = self.mats[w].mul(f, &self.source.steps[k][v]);
                if a != b {
                    return Err(Violation::Naturality { vertex: g.multi(v), axis: k, residual: a.sub(f, &b) });
                }
            }
        }
        Ok(())
    }

    pub fn is_natural(&self) -> bool {
        self.check_natural().is_ok()
    }

    /// `self ∘ other`.
    pub fn after(&self, other: &ModuleMorphism) -> Result<ModuleMorphism, CoreError> {
        if !(Arc::ptr_eq(&other.target, &self.source) || *other.target == *self.source) {
            return Err(CoreError::Invalid("composition: intermediate modules differ".into()));
        }
        let f = self.field();
        let mats = self.mats.iter().zip(&other.mats).map(|(a, b)| a.mul(f, b)).collect();
        Ok(ModuleMorphism { source: other.source.clone(), target: self.target.clone(), mats })
    }

    fn same_ends(&self, other: &ModuleMorphism) -> Result<(), CoreError> {
        let ok = (Arc::ptr_eq(&self.source, &other.source) || *self.source == *other.source)
            && (Arc::ptr_eq(&self.target, &other.target) || *self.target == *other.target);
        if ok {
            Ok(())
        } else {
            Err(CoreError::Invalid("morphisms have different source or target".into()))
        }
    }

    pub fn add(&self, other: &ModuleMorphism) -> Result<ModuleMorphism, CoreError> {
        self.same_ends(other)?;
        let f = self.field();
        let mats = self.mats.iter().zip(&other.mats).map(|(a, b)| a.add(f, b)).collect();
        Ok(ModuleMorphism { source: self.source.clone(), target: self.target.clone(), mats })
    }

    pub fn sub(&self, other: &ModuleMorphism) -> Result<ModuleMorphism, CoreError> {
        self.same_ends(other)?;
        let f = self.field();
        let mats = self.mats.iter().zip(&other.mats).map(|(a, b)| a.sub(f, b)).collect();
        Ok(ModuleMorphism { source: self.source.clone(), target: self.target.clone(), mats })
    }

    pub fn scale(&self, s: u32) -> ModuleMorphism {
        let f = self.field();
        let mats = self.mats.iter().map(|a| a.scale(f, s)).collect();
        ModuleMorphism { source: self.source.clone(), target: self.target.clone(), mats }
    }

    pub fn is_zero(&self) -> bool {
        self.mats.iter().all(|m| m.is_zero())
    }

    /// Invertible at every vertex.
    pub fn is_iso(&self) -> bool {
        let f = self.field();
        self.mats.iter().all(|m| m.is_invertible(f))
    }

    /// Pointwise inverse, if every component is invertible.
    pub fn inverse(&self) -> Option<ModuleMorphism> {
        let f = self.field();
        let mats = self.mats.iter().map(|m| m.inverse(f)).collect::<Option<Vec<_>>>()?;
        Some(ModuleMorphism { source: self.target.clone(), target: self.source.clone(), mats })
    }

    /// Block-diagonal `self ⊕ other : S1 ⊕ S2 → T1 ⊕ T2`.
    pub fn direct_sum(&self, other: &ModuleMorphism) -> Result<ModuleMorphism, CoreError> {
        let s = Arc::new(self.source.direct_sum(&other.source)?);
        let t = Arc::new(self.target.direct_sum(&other.target)?);
        self.direct_sum_into(other, s, t)
    }

    /// As [`ModuleMorphism::direct_sum`] with the sum modules supplied by the caller.
    pub fn direct_sum_into(
        &self,
        other: &ModuleMorphism,
        source: Arc<GridModule>,
        target: Arc<GridModule>,
    ) -> Result<ModuleMorphism, CoreError> {
        let mats = self.mats.iter().zip(&other.mats).map(|(a, b)| Mat::block_diag(&[a, b])).collect();
        ModuleMorphism::new(source, target, mats)
    }

    /// Same matrices, relabelled source and target (must have identical shapes).
    pub fn with_ends(&self, source: Arc<GridModule>, target: Arc<GridModule>) -> Result<ModuleMorphism, CoreError> {
        ModuleMorphism::new(source, target, self.mats.clone())
    }
}
