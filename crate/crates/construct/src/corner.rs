//! Thin corners: a vertex with value 𝕜 and nothing strictly below it.

use crate::rect::{check_lattice, glue, HyperRectangle};
use crate::{check_indecomposable, compress, fmt_point, Checks, ConstructError, Stage};
use num_traits::Signed;
use pmod_core::rational::{is_multiple_of, qr};
use pmod_core::{GridModule, Mat, Q};
use pmod_interleave::{local_change_certificate, HalfOpenBox, TrivialRegion};
use std::sync::Arc;

/// Support vertices with no other support vertex below them, in lexicographic order.
pub(crate) fn minimal_support(m: &GridModule) -> Vec<usize> {
    let sup = m.support();
    let g = m.grid();
    let mut out: Vec<usize> = sup
        .iter()
        .copied()
        .filter(|&v| !sup.iter().any(|&u| u != v && g.leq(u, v)))
        .collect();
    out.sort_by_key(|&v| g.multi(v));
    out
}

/// Whether `r` is a vertex with value 𝕜 and zero strictly below it.
pub(crate) fn is_thin_corner_at(m: &GridModule, r: &[Q]) -> bool {
    let g = m.grid();
    match g.vertex_at(r) {
        Some(v) => m.dim(v) == 1 && !m.support().iter().any(|&u| u != v && g.leq(u, v)),
        None => false,
    }
}

/// A vertex `r` with `A(r) = 𝕜` and `A(s) = 0` for every `s < r`, if there is one.
pub fn has_thin_corner(a: &GridModule) -> Option<Vec<Q>> {
    minimal_support(a).into_iter().find(|&v| a.dim(v) == 1).map(|v| a.grid().coords(v))
}

/// Same, restricted to vertices whose coordinates lie in `pitch·ℤ`.
pub(crate) fn thin_corner_on(a: &GridModule, pitch: &Q) -> Option<Vec<Q>> {
    minimal_support(a)
        .into_iter()
        .map(|v| (v, a.grid().coords(v)))
        .find(|(v, c)| a.dim(*v) == 1 && c.iter().all(|x| is_multiple_of(x, pitch)))
        .map(|(_, c)| c)
}

/// Replace the value at a minimal support vertex `r` by 𝕜, mapping into the old value through
/// a fixed nonzero `ι`. The result has a thin corner over `(ε/2 ℤ)^n` at `r` and differs from
/// `A` only on `[r, r + ε/2)^n`.
pub fn add_thin_corner(a: &Arc<GridModule>, eps: &Q) -> Result<Stage, ConstructError> {
    add_thin_corner_with(a, eps, Checks::ALL)
}

pub(crate) fn add_thin_corner_with(a: &Arc<GridModule>, eps: &Q, checks: Checks) -> Result<Stage, ConstructError> {
    if !eps.is_positive() {
        return Err(ConstructError::Precondition("ε must be positive".into()));
    }
    if a.is_zero() {
        return Err(ConstructError::ZeroModule);
    }
    check_lattice(a, eps, "A")?;
    if checks.input {
        check_indecomposable(a, false)?;
    }
    let g = a.grid();
    let rv = minimal_support(a)[0];
    let r = g.coords(rv);
    let f = a.field();
    let iota_col = (0..a.n())
        .filter_map(|k| g.successor(rv, k).map(|_| a.step(k, rv).unwrap()))
        .find_map(|s| (0..s.cols()).find(|&j| (0..s.rows()).any(|i| s.get(i, j) != 0)))
        .unwrap_or(0);
    let mut iota = Mat::zeros(a.dim(rv), 1);
    iota.set(iota_col, 0, 1);
    let half = eps * qr(1, 2);
    let s = HyperRectangle::point(&half, &r)?;
    let out = glue(a, &s, false, |_| 1, |_, v, w, dv, dw| {
        if v == r.as_slice() {
            // out of the corner: ι followed by the (identity) old map inside A's cell
            a.map_between_points(v, w).mul(f, &iota)
        } else {
            Mat::zeros(dw, dv)
        }
    })?;
    let out = Arc::new(compress(&out));
    if checks.output {
        check_indecomposable(&out, true)?;
    }
    let region = TrivialRegion::single(HalfOpenBox::cube(&r, &half));
    let certificate = local_change_certificate(a, &out, &region, &half)?;
    if !is_thin_corner_at(&out, &r) {
        return Err(ConstructError::Precondition(format!("no thin corner produced at {}", fmt_point(&r))));
    }
    Ok(Stage { module: out, certificate, region, point: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::module_g;
    use pmod_core::rational::q;
    use pmod_core::{FieldConfig, Grid};

    #[test]
    fn gadget_gets_a_corner_at_its_minimum() {
        let f = FieldConfig::new(65521).unwrap();
        let g = Arc::new(module_g(f));
        let st = add_thin_corner(&g, &q(1)).unwrap();
        assert_eq!(st.point, vec![q(0), q(3)]);
        assert_eq!(has_thin_corner(&st.module), Some(vec![q(0), q(3)]));
        assert_eq!(st.certificate.eps(), &qr(1, 2));
        assert!(st.region.is_eps_trivial(&qr(1, 2)));
    }

    #[test]
    fn existing_thin_corner_is_still_refined() {
        let f = FieldConfig::new(7).unwrap();
        let x = GridModule::interval_module(f, &[q(0), q(0)], &[q(2), q(2)]).unwrap();
        let m = Arc::new(x.restriction_extension(&Grid::regular(2, 3, &q(1))));
        let st = add_thin_corner(&m, &q(1)).unwrap();
        assert_eq!(st.point, vec![q(0), q(0)]);
        assert_eq!(st.module.dim_at(&[q(0), q(0)]), 1);
        assert!(st.certificate.verify().is_ok());
    }

    #[test]
    fn refuses_zero_and_decomposable() {
        let f = FieldConfig::new(7).unwrap();
        let z = Arc::new(GridModule::zero(f, Grid::regular(2, 2, &q(1))));
        assert!(matches!(add_thin_corner(&z, &q(1)), Err(ConstructError::ZeroModule)));
        let x = GridModule::interval_module(f, &[q(0), q(0)], &[q(1), q(1)]).unwrap();
        let y = GridModule::interval_module(f, &[q(2), q(2)], &[q(3), q(3)]).unwrap();
        let s = Arc::new(pmod_interleave::sum_modules(&x, &y).unwrap());
        assert!(matches!(add_thin_corner(&s, &q(1)), Err(ConstructError::Decomposable)));
        assert!(has_thin_corner(&z).is_none());
    }
}
