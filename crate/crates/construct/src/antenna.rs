//! Antenna attachments: adding one through a copy of `G`, and moving it along a staircase.

use crate::corner::thin_corner_on;
use crate::gadget::{gadget_dim, module_g};
use crate::rect::{check_lattice, glue, HyperRectangle};
use crate::{check_indecomposable, compress, fmt_point, Checks, ConstructError, Stage};
use num_traits::{Signed, ToPrimitive};
use pmod_core::rational::{is_multiple_of, qr};
use pmod_core::{GridModule, Mat, Q};
use pmod_interleave::{local_change_certificate, HalfOpenBox, TrivialRegion};
use std::sync::Arc;

/// Whether `A` has an axis-`axis` antenna attachment over `(pitch ℤ)^n` at `r`: `A(r) = 𝕜`,
/// nothing below `r` along `axis`, and zero maps to `r + pitch·e_j` for every other `j`.
pub(crate) fn is_antenna_at(a: &GridModule, axis: usize, pitch: &Q, r: &[Q]) -> bool {
    if r.len() != a.n() || a.dim_at(r) != 1 || !r.iter().all(|c| is_multiple_of(c, pitch)) {
        return false;
    }
    let at = |k: usize, c: Q| {
        let mut p = r.to_vec();
        p[k] = c;
        p
    };
    let below = &r[axis] - pitch;
    let behind = std::iter::once(below.clone()).chain(a.grid().axis(axis).iter().filter(|c| **c < below).cloned());
    for c in behind {
        if a.dim_at(&at(axis, c)) != 0 {
            return false;
        }
    }
    (0..a.n()).filter(|&j| j != axis).all(|j| a.map_between_points(r, &at(j, &r[j] + pitch)).is_zero())
}

/// The first vertex (in lexicographic order) carrying an axis-`axis` antenna over `(pitch ℤ)^n`.
pub fn has_antenna(a: &GridModule, axis: usize, pitch: &Q) -> Option<Vec<Q>> {
    if axis >= a.n() {
        return None;
    }
    let g = a.grid();
    let mut cands: Vec<usize> = a.support().into_iter().filter(|&v| a.dim(v) == 1).collect();
    cands.sort_by_key(|&v| g.multi(v));
    cands.into_iter().map(|v| g.coords(v)).find(|r| is_antenna_at(a, axis, pitch, r))
}

/// Whether `x` vanishes at every lattice point of the finite rectangle `s`.
pub(crate) fn vanishes_on(x: &GridModule, s: &HyperRectangle) -> bool {
    let g = x.grid();
    let axes: Vec<Vec<Q>> = (0..s.n())
        .map(|k| {
            let (lo, hi) = (s.lo()[k].clone().unwrap(), s.hi()[k].clone().unwrap());
            let mut a: Vec<Q> = g.axis(k).iter().filter(|c| **c > lo && **c <= hi).cloned().collect();
            a.push(lo);
            a
        })
        .collect();
    let mut idx = vec![0usize; axes.len()];
    loop {
        let p: Vec<Q> = idx.iter().enumerate().map(|(k, &i)| axes[k][i].clone()).collect();
        if x.dim_at(&p) != 0 {
            return false;
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return true;
            }
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn lattice_index(c: &Q, origin: &Q, pitch: &Q) -> usize {
    ((c - origin) / pitch).to_integer().to_usize().expect("point inside the patch")
}

/// Splice `G` into the first two coordinates at the thin corner `r` (other coordinates frozen at
/// `r`), on the pitch `ε/5`. The result has an axis-1 antenna at `r + (3ε/5)·e_2` and differs
/// from `A` only on `[r, r + 4ε/5)^n`.
pub fn add_antenna(a: &Arc<GridModule>, eps: &Q) -> Result<Stage, ConstructError> {
    add_antenna_with(a, eps, Checks::ALL)
}

pub(crate) fn add_antenna_with(a: &Arc<GridModule>, eps: &Q, checks: Checks) -> Result<Stage, ConstructError> {
    let n = a.n();
    if n < 2 {
        return Err(ConstructError::OneParameter);
    }
    if !eps.is_positive() {
        return Err(ConstructError::Precondition("ε must be positive".into()));
    }
    check_lattice(a, eps, "A")?;
    if checks.input {
        check_indecomposable(a, false)?;
    }
    let r = thin_corner_on(a, eps).ok_or_else(|| ConstructError::Precondition("no thin corner over the ε-lattice".into()))?;
    let f = a.field();
    let d = eps * qr(1, 5);
    let mut hi = r.clone();
    hi[0] = &r[0] + &d * Q::from_integer(3.into());
    hi[1] = &r[1] + &d * Q::from_integer(3.into());
    let s = HyperRectangle::finite(&d, &r, &hi)?;
    let gm = module_g(f);
    let gi = |c: &[Q]| (lattice_index(&c[0], &r[0], &d), lattice_index(&c[1], &r[1], &d));
    let gv = |c: &[Q]| {
        let (x, y) = gi(c);
        gm.grid().index(&[x, y])
    };
    let top = gm.grid().index(&[4, 4]);
    let out = glue(a, &s, true, |c| {
        let (x, y) = gi(c);
        gadget_dim(x, y)
    }, |_, v, w, dv, dw| {
        match (s.contains(v), s.contains(w)) {
            (true, true) => gm.structure_map(gv(v), gv(w)).unwrap(),
            (true, false) => {
                let to_top = gm.structure_map(gv(v), top).unwrap();
                a.map_between_points(&r, w).mul(f, &to_top)
            }
            _ => Mat::zeros(dw, dv),
        }
    })?;
    let out = Arc::new(compress(&out));
    if checks.output {
        check_indecomposable(&out, true)?;
    }
    let region = TrivialRegion::single(HalfOpenBox::cube(&r, &(&d * Q::from_integer(4.into()))));
    let certificate = local_change_certificate(a, &out, &region, eps)?;
    let mut point = r.clone();
    point[1] = &r[1] + &d * Q::from_integer(3.into());
    if !is_antenna_at(&out, 0, &d, &point) {
        return Err(ConstructError::Precondition(format!("no antenna produced at {}", fmt_point(&point))));
    }
    Ok(Stage { module: out, certificate, region, point })
}

/// Antenna axis after moving: the first axis for an even number of parameters, else the last.
pub(crate) fn moved_axis(n: usize) -> usize {
    if n % 2 == 0 {
        0
    } else {
        n - 1
    }
}

/// Staircase boxes `S_1, …, S_n` from the antenna at `r` to `s`.
fn staircase(eps: &Q, r: &[Q], s: &[Q]) -> Result<Vec<HyperRectangle>, ConstructError> {
    let n = r.len();
    (0..n)
        .map(|k| {
            let mut lo: Vec<Q> = (0..n).map(|i| if i < k { s[i].clone() } else { r[i].clone() }).collect();
            let mut hi = lo.clone();
            if k % 2 == 0 {
                lo[k] = s[k].clone();
                hi[k] = &r[k] - eps;
            } else {
                lo[k] = &r[k] + eps;
                hi[k] = s[k].clone();
            }
            HyperRectangle::finite(eps, &lo, &hi)
        })
        .collect()
}

/// Set `x` to 𝕜 on each box in turn, with identities along the path through the boxes and the
/// anchor and zero maps everywhere else; `x` must vanish on the boxes.
pub(crate) fn lay_path(x: &GridModule, boxes: &[HyperRectangle], anchor: &[Q]) -> Result<GridModule, ConstructError> {
    let mut cur = x.clone();
    for (k, b) in boxes.iter().enumerate() {
        if !vanishes_on(&cur, b) {
            return Err(ConstructError::Precondition(format!(
                "the module is nonzero on the path box starting at {}",
                fmt_point(&b.lo().iter().map(|c| c.clone().unwrap()).collect::<Vec<_>>())
            )));
        }
        let on_path = |c: &[Q]| c == anchor || boxes[..=k].iter().any(|bb| bb.contains(c));
        cur = glue(&cur, b, false, |_| 1, |_, v, w, dv, dw| {
            if dv == 1 && dw == 1 && on_path(v) && on_path(w) {
                Mat::identity(1)
            } else {
                Mat::zeros(dw, dv)
            }
        })?;
    }
    Ok(cur)
}

/// Move the axis-1 antenna at `r` to `s` along the staircase of boxes. Needs `s_k < r_k` for
/// odd `k`, `s_k > r_k` for even `k` (1-based), and `A(t) = 0` whenever `t_1 ≤ s_1`. The new
/// antenna points along axis 1 when `n` is even and along axis `n` otherwise.
pub fn move_antenna(a: &Arc<GridModule>, eps: &Q, r: &[Q], s: &[Q]) -> Result<Stage, ConstructError> {
    move_antenna_with(a, eps, r, s, Checks::ALL)
}

pub(crate) fn move_antenna_with(a: &Arc<GridModule>, eps: &Q, r: &[Q], s: &[Q], checks: Checks) -> Result<Stage, ConstructError> {
    let n = a.n();
    if n < 2 {
        return Err(ConstructError::OneParameter);
    }
    if r.len() != n || s.len() != n {
        return Err(pmod_core::CoreError::DimensionMismatch(n, r.len().min(s.len())).into());
    }
    if !eps.is_positive() {
        return Err(ConstructError::Precondition("ε must be positive".into()));
    }
    check_lattice(a, eps, "A")?;
    if !is_antenna_at(a, 0, eps, r) {
        return Err(ConstructError::Precondition(format!("no axis-1 antenna at {}", fmt_point(r))));
    }
    if !s.iter().all(|c| is_multiple_of(c, eps)) {
        return Err(ConstructError::NotOnLattice(format!("target {}", fmt_point(s))));
    }
    for k in 0..n {
        let ok = if k % 2 == 0 { s[k] < r[k] } else { s[k] > r[k] };
        if !ok {
            return Err(ConstructError::Precondition(format!("target coordinate {} is on the wrong side", k + 1)));
        }
    }
    let g = a.grid();
    if a.support().iter().any(|&v| g.axis(0)[g.coord_index(v, 0)] <= s[0]) {
        return Err(ConstructError::Precondition("the module is nonzero at or below the target's first coordinate".into()));
    }
    if checks.input {
        check_indecomposable(a, false)?;
    }
    let boxes = staircase(eps, r, s)?;
    let out = Arc::new(compress(&lay_path(a, &boxes, r)?));
    if checks.output {
        check_indecomposable(&out, true)?;
    }
    let region = TrivialRegion::from_boxes(boxes.iter().map(|b| b.hat().unwrap()).collect());
    let certificate = local_change_certificate(a, &out, &region, eps)?;
    let axis = moved_axis(n);
    if !is_antenna_at(&out, axis, eps, s) {
        return Err(ConstructError::Precondition(format!("no antenna produced at {}", fmt_point(s))));
    }
    Ok(Stage { module: out, certificate, region, point: s.to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corner::add_thin_corner;
    use pmod_core::rational::q;
    use pmod_core::FieldConfig;

    fn f() -> FieldConfig {
        FieldConfig::new(65521).unwrap()
    }

    #[test]
    fn gadget_antennas() {
        let g = module_g(f());
        assert_eq!(has_antenna(&g, 0, &q(1)), Some(vec![q(0), q(3)]));
        assert_eq!(has_antenna(&g, 1, &q(1)), Some(vec![q(3), q(0)]));
        let z = GridModule::zero(f(), g.grid().clone());
        assert_eq!(has_antenna(&z, 0, &q(1)), None);
    }

    #[test]
    fn antenna_on_a_thin_cornered_gadget() {
        let g = Arc::new(module_g(f()));
        let c = add_thin_corner(&g, &q(1)).unwrap();
        let st = add_antenna(&c.module, &qr(1, 2)).unwrap();
        assert_eq!(st.certificate.eps(), &qr(1, 2));
        assert!(st.region.is_eps_trivial(&qr(1, 2)));
        let d = qr(1, 10);
        assert!(is_antenna_at(&st.module, 0, &d, &st.point));
        let m = &st.module;
        let v = m.grid().vertex_at(&st.point).unwrap();
        let up = m.grid().successor(v, 1).unwrap();
        assert!(m.structure_map(v, up).unwrap().is_zero());
    }

    #[test]
    fn moving_in_two_parameters() {
        let fld = f();
        let x = GridModule::box_module(fld, &[qr(1, 2), q(0)], &[q(6), q(2)]).unwrap();
        assert!(matches!(add_antenna(&Arc::new(x), &q(1)), Err(ConstructError::NotOnLattice(_))));
        let g = Arc::new(module_g(fld).translate(&[q(-4), q(0)]));
        let r = vec![q(4), q(3)];
        assert!(is_antenna_at(&g, 0, &q(1), &r));
        let s = vec![q(1), q(6)];
        let st = move_antenna(&g, &q(1), &r, &s).unwrap();
        assert!(is_antenna_at(&st.module, 0, &q(1), &s));
        assert_eq!(st.region.boxes.len(), 2);
        assert!(st.region.is_eps_trivial(&q(1)));
        for p in [[2, 3], [3, 3], [1, 4], [1, 6]] {
            assert_eq!(st.module.dim_at(&[q(p[0]), q(p[1])]), 1);
        }
        assert_eq!(st.module.dim_at(&[q(1), q(7)]), 0);
    }

    #[test]
    fn moving_refuses_bad_targets() {
        let g = Arc::new(module_g(f()).translate(&[q(-4), q(0)]));
        let r = vec![q(4), q(3)];
        assert!(move_antenna(&g, &q(1), &r, &[q(5), q(6)]).is_err());
        assert!(move_antenna(&g, &q(1), &r, &[q(1), q(3)]).is_err());
        assert!(move_antenna(&g, &q(1), &r, &[q(4), q(6)]).is_err());
    }
}
