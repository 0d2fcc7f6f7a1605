//! Restriction, extension and shifts of grid modules.

use num_traits::{Signed, Zero};
use pmod_core::{CoreError, Grid, GridModule, Mat, ModuleMorphism, Q};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KanError {
    #[error("target grid is not a subgrid of the module's grid")]
    NotSubgrid,
    #[error("shift must be non-negative")]
    NegativeShift,
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// `M|_Q` for a subgrid `Q` of `M`'s grid.
pub fn restrict(m: &GridModule, q: &Grid) -> Result<GridModule, KanError> {
    if !q.is_subgrid_of(m.grid()) {
        return Err(KanError::NotSubgrid);
    }
    Ok(m.restriction_extension(q))
}

/// `M_P`: the extension of `M` sampled on `P`.
pub fn restriction_extension(m: &GridModule, p: &Grid) -> GridModule {
    m.restriction_extension(p)
}

/// `f_P : M_P -> N_P`.
pub fn morphism_restriction_extension(f: &ModuleMorphism, p: &Grid) -> ModuleMorphism {
    let s = Arc::new(f.source().restriction_extension(p));
    let t = if Arc::ptr_eq(f.source(), f.target()) { s.clone() } else { Arc::new(f.target().restriction_extension(p)) };
    morphism_restriction_extension_into(f, p, s, t)
}

/// As [`morphism_restriction_extension`] with precomputed `M_P` and `N_P`.
pub fn morphism_restriction_extension_into(
    f: &ModuleMorphism,
    p: &Grid,
    source: Arc<GridModule>,
    target: Arc<GridModule>,
) -> ModuleMorphism {
    let amap = p.axis_floor_map(f.grid(), &Q::zero());
    let mats = p
        .vertices()
        .map(|v| match amap.floor(&p.multi(v)) {
            Some(u) => f.mat(u).clone(),
            None => Mat::zeros(target.dim(v), source.dim(v)),
        })
        .collect();
    ModuleMorphism::new(source, target, mats).expect("resampled shapes agree")
}

/// `M[r]`, with `M[r](x) = M(x + r·1)`.
pub fn shift(m: &GridModule, r: &Q) -> GridModule {
    m.translate(&vec![r.clone(); m.n()])
}

/// Shift by an arbitrary vector.
pub fn shift_by(m: &GridModule, r: &[Q]) -> GridModule {
    m.translate(r)
}

/// `f[r] : M[r] -> N[r]`.
pub fn shift_morphism(f: &ModuleMorphism, r: &Q) -> ModuleMorphism {
    let s = Arc::new(shift(f.source(), r));
    let t = if Arc::ptr_eq(f.source(), f.target()) { s.clone() } else { Arc::new(shift(f.target(), r)) };
    ModuleMorphism::new(s, t, f.mats().to_vec()).expect("shift keeps shapes")
}

/// Coordinates of `M` together with those of `M` translated by `-r`.
pub fn unit_grid(m: &GridModule, r: &Q) -> Grid {
    m.grid().union(&m.grid().translate_diag(&-r)).expect("same parameter count")
}

/// `η^M_r : M -> M[r]` on the grid `coords(M) ∪ (coords(M) - r)`.
pub fn shift_unit(m: &GridModule, r: &Q) -> Result<ModuleMorphism, KanError> {
    shift_unit_on(m, r, &unit_grid(m, r))
}

/// `η^M_r` sampled on an arbitrary grid `Q`: a morphism `M_Q -> (M[r])_Q`.
pub fn shift_unit_on(m: &GridModule, r: &Q, q: &Grid) -> Result<ModuleMorphism, KanError> {
    if r.is_negative() {
        return Err(KanError::NegativeShift);
    }
    let source = Arc::new(m.restriction_extension(q));
    let lo = q.axis_floor_map(m.grid(), &Q::zero());
    let hi = q.axis_floor_map(m.grid(), r);
    let target = Arc::new(m.resample(q, &hi));
    let mats = q
        .vertices()
        .map(|v| {
            let mi = q.multi(v);
            phi(m, lo.floor(&mi), hi.floor(&mi))
        })
        .collect();
    Ok(ModuleMorphism::new(source, target, mats)?)
}

/// `(M[r])_Q`, sampled directly without building the translated grid.
pub fn shifted_resample(m: &GridModule, q: &Grid, r: &Q) -> GridModule {
    m.resample(q, &q.axis_floor_map(m.grid(), r))
}

/// Structure map of `m` between two optional floor vertices (zero when the source is absent).
pub fn phi(m: &GridModule, a: Option<usize>, b: Option<usize>) -> Mat {
    match (a, b) {
        (Some(a), Some(b)) => m.structure_map(a, b).expect("floors are ordered"),
        (a, b) => Mat::zeros(b.map_or(0, |b| m.dim(b)), a.map_or(0, |a| m.dim(a))),
    }
}

/// Both modules resampled on the per-axis union of their coordinates.
pub fn common_refinement(m: &GridModule, n: &GridModule) -> Result<(GridModule, GridModule), KanError> {
    Ok(pmod_core::iso::refine_pair(m, n)?)
}

/// Equality of the extensions to R^n (not up to isomorphism).
pub fn semantically_equal(m: &GridModule, n: &GridModule) -> bool {
    if m == n {
        return true;
    }
    match common_refinement(m, n) {
        Ok((a, b)) => a == b,
        Err(_) => false,
    }
}

/// Grid with every coordinate of `g` plus each coordinate translated by each offset.
pub fn grid_with_offsets(g: &Grid, offsets: &[Q]) -> Grid {
    let mut out = g.clone();
    for o in offsets {
        out = out.union(&g.translate_diag(o)).expect("same parameter count");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use pmod_core::rational::{q, qr};
    use pmod_core::FieldConfig;

    fn fd() -> FieldConfig {
        FieldConfig::new(5).unwrap()
    }

    #[test]
    fn restrict_to_self() {
        let m = GridModule::interval_module(fd(), &[q(0), q(0)], &[q(1), q(2)]).unwrap();
        assert_eq!(restrict(&m, m.grid()).unwrap(), m);
        let bad = Grid::new(vec![vec![qr(1, 2)], vec![q(0)]]).unwrap();
        assert!(matches!(restrict(&m, &bad), Err(KanError::NotSubgrid)));
    }

    #[test]
    fn zero_shift_unit_is_identity() {
        let m = GridModule::interval_module(fd(), &[q(0), q(0)], &[q(1), q(2)]).unwrap();
        let eta = shift_unit(&m, &q(0)).unwrap();
        assert!(eta.mats().iter().all(|x| x.is_identity()));
        assert!(eta.is_natural());
    }

    #[test]
    fn shift_additivity() {
        let m = GridModule::interval_module(fd(), &[q(0)], &[q(3)]).unwrap();
        assert_eq!(shift(&shift(&m, &q(1)), &qr(1, 2)), shift(&m, &qr(3, 2)));
    }

    #[test]
    fn unit_of_interval_vanishes_past_width() {
        let m = GridModule::interval_module(fd(), &[q(0)], &[q(1)]).unwrap();
        let eta = shift_unit(&m, &q(1)).unwrap();
        assert!(eta.is_natural());
        assert!(eta.is_zero());
        let eta = shift_unit(&m, &qr(1, 2)).unwrap();
        assert!(!eta.is_zero());
        assert!(shift_unit(&m, &q(-1)).is_err());
    }

    #[test]
    fn refinement_is_semantic_identity() {
        let m = GridModule::interval_module(fd(), &[q(0), q(0)], &[q(1), q(2)]).unwrap();
        let r = m.restriction_extension(&Grid::regular(2, 5, &qr(1, 2)));
        assert!(semantically_equal(&m, &r));
        assert!(!semantically_equal(&m, &shift(&m, &q(1))));
    }
}
