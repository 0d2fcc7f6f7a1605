//! Approximating an arbitrary module by an indecomposable one.

use crate::tack::tack_with;
use crate::{check_indecomposable, Checks, ConstructError};
use num_traits::Signed;
use pmod_core::rational::{ceil_to, q, qr};
use pmod_core::{Grid, GridModule, Q};
use pmod_interleave::{compose_certificates, iso_certificate, snap_certificate, sum_certificates, zero_certificate, Certificate};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct Approximation {
    pub module: Arc<GridModule>,
    /// From the input `N` to `module`.
    pub certificate: Certificate,
    /// `N` snapped onto the `ε/2` lattice.
    pub snapped: Arc<GridModule>,
    /// Number of indecomposable summands of the snapped module.
    pub summands: usize,
    /// Accumulated certificate ε after the snap and after each tacking step.
    pub steps: Vec<Q>,
}

/// The cube module `𝕜` on `[0, ε)^n`.
pub fn cube_module(field: pmod_core::FieldConfig, n: usize, eps: &Q) -> GridModule {
    GridModule::box_module(field, &vec![q(0); n], &vec![eps.clone(); n]).expect("valid cube")
}

/// An indecomposable `M` with a verified certificate `d_I(N, M) ≤ ε`, for `n ≥ 2` and `ε > 0`.
pub fn approximate_indecomposable(nmod: &Arc<GridModule>, eps: &Q) -> Result<Approximation, ConstructError> {
    let n = nmod.n();
    if n < 2 {
        return Err(ConstructError::OneParameter);
    }
    if !eps.is_positive() {
        return Err(ConstructError::Precondition("ε must be positive".into()));
    }
    let f = nmod.field();
    let beta = eps * qr(1, 2);
    let cube = || Arc::new(cube_module(f, n, eps));
    // (0, C) at ε/2, built on a grid fine enough to relabel its source as `z`
    let from_zero = |z: &Arc<GridModule>, c: &Arc<GridModule>| -> Result<Certificate, ConstructError> {
        let fine = Arc::new(c.restriction_extension(&c.grid().union(z.grid())?));
        Ok(zero_certificate(&fine, &beta)?.reversed().with_modules(z.clone(), c.clone())?)
    };
    if nmod.is_zero() {
        let c = cube();
        let certificate = from_zero(nmod, &c)?;
        return Ok(Approximation {
            module: c,
            steps: vec![certificate.eps().clone()],
            certificate,
            snapped: nmod.clone(),
            summands: 0,
        });
    }
    let axes: Vec<Vec<Q>> = (0..n).map(|k| nmod.grid().axis(k).iter().map(|c| ceil_to(c, &beta)).collect()).collect();
    let p = Grid::from_unsorted(axes)?;
    let snap = snap_certificate(nmod, &p, &beta)?;
    let l = snap.n().clone();
    let mut steps = vec![snap.eps().clone()];
    if l.is_zero() {
        let c = cube();
        let certificate = compose_certificates(&snap, &from_zero(&l, &c)?)?;
        steps.push(certificate.eps().clone());
        return Ok(Approximation { module: c, certificate, snapped: l, summands: 0, steps });
    }
    let dec = pmod_decomp::decompose(&l)?;
    let k = dec.len();
    if k == 1 {
        return Ok(Approximation { module: l.clone(), certificate: snap, snapped: l, summands: 1, steps });
    }
    let mut cert = compose_certificates(&snap, &iso_certificate(&l, dec.sum(), &dec.iso)?)?;
    let delta = eps / q(2 * k as i64);
    let xs = &dec.summands;
    let first = tack_with(&xs[0], &xs[1], &delta, Checks::NONE)?;
    let mut acc = first.certificate;
    let mut cur = first.module;
    steps.push(cert.eps() + acc.eps());
    for x in &xs[2..] {
        let lifted = sum_certificates(&acc, x)?;
        let rep = tack_with(&cur, x, &delta, Checks::NONE)?;
        acc = compose_certificates(&lifted, &rep.certificate)?;
        cur = rep.module;
        steps.push(cert.eps() + acc.eps());
    }
    check_indecomposable(&cur, true)?;
    cert = compose_certificates(&cert, &acc)?;
    if cert.eps() > eps {
        return Err(ConstructError::Precondition("accumulated certificate exceeds ε".into()));
    }
    Ok(Approximation { module: cur, certificate: cert, snapped: l, summands: k, steps })
}
