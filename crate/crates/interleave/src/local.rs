//! Certificates for modules that agree outside an ε-trivial region.

use crate::cert::{fmt_point, Certificate};
use crate::trivial::TrivialRegion;
use crate::InterleaveError;
use num_traits::Signed;
use pmod_core::rational::fmt_q;
use pmod_core::{Grid, GridModule, Mat, Q};
use pmod_kan::phi;
use std::sync::Arc;

/// If `M` and `M'` agree outside `U` and `U` is ε-trivial, they are ε-interleaved by
/// `f_t = φ^M_{t,t+ε}` for `t ∈ U` and `φ^{M'}_{t,t+ε}` otherwise (and symmetrically for `g`).
pub fn local_change_certificate(
    m: &Arc<GridModule>,
    m2: &Arc<GridModule>,
    u: &TrivialRegion,
    eps: &Q,
) -> Result<Certificate, InterleaveError> {
    if eps.is_negative() {
        return Err(InterleaveError::NegativeEps);
    }
    if !u.is_eps_trivial(eps) {
        return Err(InterleaveError::RegionNotTrivial(fmt_q(eps)));
    }
    let n = m.n();
    let base = m.grid().union(m2.grid())?.with_coords(&u.corner_coords(n));
    check_agreement(m, m2, u, &base)?;
    let q = base.union(&base.translate_diag(&-eps))?;
    let f = half(m, m2, u, eps, &q)?;
    let g = half(m2, m, u, eps, &q)?;
    Certificate::new(m.clone(), m2.clone(), eps.clone(), f, g)
}

fn check_agreement(m: &GridModule, m2: &GridModule, u: &TrivialRegion, base: &Grid) -> Result<(), InterleaveError> {
    let a = m.restriction_extension(base);
    let b = m2.restriction_extension(base);
    let inside: Vec<bool> = base.vertices().map(|v| u.contains_cell(base, v)).collect();
    let err = |v: usize| InterleaveError::Disagreement(vec![fmt_point(base, v)]);
    for v in base.vertices() {
        if inside[v] {
            continue;
        }
        if a.dim(v) != b.dim(v) {
            return Err(err(v));
        }
        for k in 0..base.n() {
            let Some(w) = base.successor(v, k) else { continue };
            if !inside[w] && a.step(k, v) != b.step(k, v) {
                return Err(err(v));
            }
        }
    }
    Ok(())
}

/// Components `x(t) -> y(t+ε)`: through `x` inside the region, through `y` outside it.
fn half(x: &GridModule, y: &GridModule, u: &TrivialRegion, eps: &Q, q: &Grid) -> Result<pmod_core::ModuleMorphism, InterleaveError> {
    let zero = Q::from_integer(0.into());
    let x0 = q.axis_floor_map(x.grid(), &zero).floors(q);
    let x1 = q.axis_floor_map(x.grid(), eps).floors(q);
    let y0 = q.axis_floor_map(y.grid(), &zero).floors(q);
    let y1 = q.axis_floor_map(y.grid(), eps).floors(q);
    let mats: Vec<Mat> = q
        .vertices()
        .map(|v| if u.contains(&q.coords(v)) { phi(x, x0[v], x1[v]) } else { phi(y, y0[v], y1[v]) })
        .collect();
    Certificate::half(x, y, eps, q, mats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trivial::HalfOpenBox;
    use pmod_core::rational::{q, qr};
    use pmod_core::FieldConfig;

    #[test]
    fn identical_modules_empty_region() {
        let f = FieldConfig::new(7).unwrap();
        let m = Arc::new(GridModule::interval_module(f, &[q(0), q(0)], &[q(2), q(2)]).unwrap());
        let c = local_change_certificate(&m, &m, &TrivialRegion::empty(), &qr(1, 3)).unwrap();
        assert_eq!(c.eps(), &qr(1, 3));
    }

    #[test]
    fn removing_a_small_corner() {
        let f = FieldConfig::new(7).unwrap();
        // [0,2)^2 hook versus the same hook with the cell [0,1)^2 cut away
        let m = Arc::new(GridModule::interval_module(f, &[q(0), q(0)], &[q(2), q(2)]).unwrap());
        let g = Grid::regular(2, 3, &q(1));
        let r = m.restriction_extension(&g);
        let dims: Vec<usize> = g.vertices().map(|v| if v == 0 { 0 } else { r.dim(v) }).collect();
        let d = dims.clone();
        let m2 = Arc::new(
            GridModule::from_fn(f, g, dims, |k, v, w| {
                if d[v] == 0 || d[w] == 0 { Mat::zeros(d[w], d[v]) } else { r.step(k, v).unwrap().clone() }
            })
            .unwrap(),
        );
        let u = TrivialRegion::single(HalfOpenBox::cube(&[q(0), q(0)], &q(1)));
        assert!(local_change_certificate(&m, &m2, &u, &q(1)).is_ok());
        assert!(matches!(
            local_change_certificate(&m, &m2, &u, &qr(1, 2)),
            Err(InterleaveError::RegionNotTrivial(_))
        ));
        assert!(matches!(
            local_change_certificate(&m, &m2, &TrivialRegion::empty(), &q(1)),
            Err(InterleaveError::Disagreement(_))
        ));
    }
}
