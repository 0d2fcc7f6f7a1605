//! Tacking two indecomposables together through a copy of `G`.

use crate::antenna::{add_antenna_with, is_antenna_at, lay_path, move_antenna_with, moved_axis};
use crate::corner::add_thin_corner_with;
use crate::gadget::{gadget_dim, module_g};
use crate::rect::{check_lattice, glue, HyperRectangle};
use crate::{check_indecomposable, compress, fmt_point, Checks, ConstructError, Stage};
use num_traits::{Signed, ToPrimitive, Zero};
use pmod_core::rational::{q, qr, rational_gcd};
use pmod_core::{GridModule, Mat, Q};
use pmod_interleave::{compose_certificates, direct_sum_certificates, local_change_certificate, sum_modules, Certificate, TrivialRegion};
use std::sync::Arc;

/// Every stage of a tacking run together with the composed certificate.
#[derive(Clone, Debug)]
pub struct TackReport {
    pub module: Arc<GridModule>,
    /// From `A ⊕ B` to `module`.
    pub certificate: Certificate,
    pub eps0: Q,
    /// Thin corners, antennas and moved antennas for `A` then `B`, followed by the final gluing.
    pub stages: Vec<(String, Stage)>,
}

fn min_support_coord(m: &GridModule, axis: usize) -> Option<Q> {
    let g = m.grid();
    m.support().into_iter().map(|v| g.axis(axis)[g.coord_index(v, axis)].clone()).min()
}

/// Glue `A` (antenna along `ℓ` at `r`) and `B` (antenna along `ℓ` at `r - ε·e_ℓ'`) into one
/// module: two arms run from the antennas down to a copy of `G` placed below both supports.
/// The result agrees with `A ⊕ B` outside a 5ε-trivial set.
pub fn tack_pair(a: &Arc<GridModule>, b: &Arc<GridModule>, eps: &Q, l: usize, l2: usize, r: &[Q]) -> Result<Stage, ConstructError> {
    tack_pair_with(a, b, eps, l, l2, r, Checks::OUTPUT)
}

pub(crate) fn tack_pair_with(
    a: &Arc<GridModule>,
    b: &Arc<GridModule>,
    eps: &Q,
    l: usize,
    l2: usize,
    r: &[Q],
    checks: Checks,
) -> Result<Stage, ConstructError> {
    let n = a.n();
    if n < 2 {
        return Err(ConstructError::OneParameter);
    }
    if b.n() != n || r.len() != n || l >= n || l2 >= n || l == l2 {
        return Err(ConstructError::Precondition("mismatched parameter counts or axes".into()));
    }
    if !eps.is_positive() {
        return Err(ConstructError::Precondition("ε must be positive".into()));
    }
    check_lattice(a, eps, "A")?;
    check_lattice(b, eps, "B")?;
    let mut rb = r.to_vec();
    rb[l2] = &r[l2] - eps;
    if !is_antenna_at(a, l, eps, r) {
        return Err(ConstructError::Precondition(format!("A has no antenna at {}", fmt_point(r))));
    }
    if !is_antenna_at(b, l, eps, &rb) {
        return Err(ConstructError::Precondition(format!("B has no antenna at {}", fmt_point(&rb))));
    }
    let k = |i: i64| Q::from_integer(i.into()) * eps;
    let lowest = [min_support_coord(a, l), min_support_coord(b, l)].into_iter().flatten().min().unwrap();
    let a_ = &lowest - eps;
    let b_ = &r[l2] + k(2);
    let pt = |x: Q, y: Q| {
        let mut p = r.to_vec();
        p[l] = x;
        p[l2] = y;
        p
    };
    let bx = |lo: Vec<Q>, hi: Vec<Q>| HyperRectangle::finite(eps, &lo, &hi);
    let ah = bx(pt(&a_ - eps, r[l2].clone()), pt(&r[l] - eps, r[l2].clone()))?;
    let av = bx(pt(&a_ - eps, &r[l2] + eps), pt(&a_ - eps, &b_ - eps))?;
    let bh = bx(pt(&a_ - k(2), &r[l2] - eps), pt(&r[l] - eps, &r[l2] - eps))?;
    let bv = bx(pt(&a_ - k(2), r[l2].clone()), pt(&a_ - k(2), &b_ - eps))?;
    let xa = lay_path(a, &[ah, av.clone()], r)?;
    let xb = lay_path(b, &[bh, bv.clone()], &rb)?;
    let z = sum_modules(&xa, &xb)?;

    let g0 = pt(&a_ - k(5), b_.clone());
    let sg = bx(g0.clone(), pt(&a_ - eps, &b_ + k(4)))?;
    let gm = module_g(a.field());
    let gi = |c: &[Q]| {
        let x = ((&c[l] - &g0[l]) / eps).to_integer().to_usize().unwrap();
        let y = ((&c[l2] - &g0[l2]) / eps).to_integer().to_usize().unwrap();
        (x, y)
    };
    let gv = |c: &[Q]| {
        let (x, y) = gi(c);
        gm.grid().index(&[x, y])
    };
    let feet = [pt(&a_ - k(2), &b_ - eps), pt(&a_ - eps, &b_ - eps)];
    let out = glue(&z, &sg, true, |c| {
        let (x, y) = gi(c);
        gadget_dim(x, y)
    }, |_, v, w, dv, dw| match (sg.contains(v), sg.contains(w)) {
        (true, true) => gm.structure_map(gv(v), gv(w)).unwrap(),
        (false, true) if dv == 1 && dw == 1 && feet.iter().any(|p| p.as_slice() == v) => Mat::identity(1),
        _ => Mat::zeros(dw, dv),
    })?;
    let out = Arc::new(compress(&out));
    if checks.output {
        check_indecomposable(&out, true)?;
    }
    let ah_full = bx(pt(&a_ - eps, r[l2].clone()), pt(r[l].clone(), r[l2].clone()))?;
    let bh_full = bx(pt(&a_ - k(2), &r[l2] - eps), pt(r[l].clone(), &r[l2] - eps))?;
    let region = TrivialRegion::from_boxes(
        [&sg, &ah_full, &bh_full, &av, &bv].iter().map(|s| s.hat().unwrap()).collect(),
    );
    let ab = Arc::new(sum_modules(a, b)?);
    let certificate = local_change_certificate(&ab, &out, &region, &k(5))?;
    Ok(Stage { module: out, certificate, region, point: g0 })
}

/// Tack indecomposables `A` and `B` into one indecomposable `M` with `d_I(M, A ⊕ B) < δ`:
/// thin corners, antennas, a common staircase target, and a final gluing through `G`.
pub fn tack(a: &Arc<GridModule>, b: &Arc<GridModule>, delta: &Q) -> Result<TackReport, ConstructError> {
    tack_with(a, b, delta, Checks::ALL)
}

/// As [`tack`]; `checks.input` tests both inputs, `checks.output` the final module. Intermediate
/// stages are never re-tested.
pub(crate) fn tack_with(a: &Arc<GridModule>, b: &Arc<GridModule>, delta: &Q, checks: Checks) -> Result<TackReport, ConstructError> {
    let n = a.n();
    if n < 2 {
        return Err(ConstructError::OneParameter);
    }
    if b.n() != n {
        return Err(pmod_core::CoreError::DimensionMismatch(n, b.n()).into());
    }
    if !delta.is_positive() {
        return Err(ConstructError::Precondition("δ must be positive".into()));
    }
    if a.is_zero() || b.is_zero() {
        return Err(ConstructError::ZeroModule);
    }
    if checks.input {
        check_indecomposable(a, false)?;
        check_indecomposable(b, false)?;
    }
    let coords: Vec<Q> = (0..n)
        .flat_map(|k| a.grid().axis(k).iter().chain(b.grid().axis(k).iter()).cloned().collect::<Vec<_>>())
        .collect();
    let tau = rational_gcd(coords.iter()).filter(|t| !t.is_zero()).unwrap_or_else(|| q(1));
    let m = (&tau * q(4) / delta).floor() + q(1);
    let eps0 = &tau / &m;
    let h = &eps0 * qr(1, 10);

    let a1 = add_thin_corner_with(a, &eps0, Checks::NONE)?;
    let b1 = add_thin_corner_with(b, &eps0, Checks::NONE)?;
    let half = &eps0 * qr(1, 2);
    let a2 = add_antenna_with(&a1.module, &half, Checks::NONE)?;
    let b2 = add_antenna_with(&b1.module, &half, Checks::NONE)?;
    let (al, be) = (&a2.point, &b2.point);
    let floor0 = [min_support_coord(&a2.module, 0), min_support_coord(&b2.module, 0)]
        .into_iter()
        .flatten()
        .chain([al[0].clone(), be[0].clone()])
        .min()
        .unwrap();
    let two_h = &h * q(2);
    let u: Vec<Q> = (0..n)
        .map(|k| match k {
            0 => &floor0 - &two_h,
            _ if k % 2 == 0 => al[k].clone().min(be[k].clone()) - &two_h,
            _ => al[k].clone().max(be[k].clone()) + &two_h,
        })
        .collect();
    let (l, l2) = if n % 2 == 0 { (0, 1) } else { (n - 1, n - 2) };
    debug_assert_eq!(l, moved_axis(n));
    let mut r = u.clone();
    r[l2] = &u[l2] + &h;
    let a3 = move_antenna_with(&a2.module, &h, al, &r, Checks::NONE)?;
    let b3 = move_antenna_with(&b2.module, &h, be, &u, Checks::NONE)?;
    let fin = tack_pair_with(&a3.module, &b3.module, &h, l, l2, &r, Checks::NONE)?;

    let mut cert = direct_sum_certificates(&a1.certificate, &b1.certificate)?;
    for (x, y) in [(&a2, &b2), (&a3, &b3)] {
        cert = compose_certificates(&cert, &direct_sum_certificates(&x.certificate, &y.certificate)?)?;
    }
    cert = compose_certificates(&cert, &fin.certificate)?;
    if cert.eps() >= delta {
        return Err(ConstructError::Precondition(format!(
            "composed certificate {} is not below δ",
            pmod_core::rational::fmt_q(cert.eps())
        )));
    }
    if checks.output {
        check_indecomposable(&fin.module, true)?;
    }
    let module = fin.module.clone();
    let stages = vec![
        ("thin corner A".to_string(), a1),
        ("thin corner B".to_string(), b1),
        ("antenna A".to_string(), a2),
        ("antenna B".to_string(), b2),
        ("move antenna A".to_string(), a3),
        ("move antenna B".to_string(), b3),
        ("tack pair".to_string(), fin),
    ];
    Ok(TackReport { module, certificate: cert, eps0, stages })
}
