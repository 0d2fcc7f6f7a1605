//! Factoring shift units through a grid with bounded mesh widths.

use crate::InterleaveError;
use num_traits::{Signed, Zero};
use pmod_core::rational::fmt_q;
use pmod_core::{Grid, GridModule, Mat, ModuleMorphism, Q};
use pmod_kan::{phi, shifted_resample};
use std::sync::Arc;

/// `m : L_{P+r}[r] -> L_P[β]` with `η^{L_P}_β = m ∘ (η^L_r)_P`, sampled on `P ∪ (P - β)`.
#[derive(Clone, Debug)]
pub struct FactorWitness {
    pub m: ModuleMorphism,
    pub alpha: Q,
    pub beta: Q,
}

/// Mesh widths of `p` must lie in `[alpha, beta]` with `0 < r <= alpha`; `p` must reach
/// at least as high as the grid of `l` on every axis.
pub fn factor_through_grid(l: &GridModule, p: &Grid, r: &Q) -> Result<FactorWitness, InterleaveError> {
    let widths: Vec<Q> = (0..p.n()).flat_map(|k| p.mesh_widths(k)).collect();
    if (0..p.n()).any(|k| p.axis_len(k) < 2) {
        return Err(InterleaveError::MeshBounds("every axis needs at least two coordinates".into()));
    }
    let alpha = widths.iter().min().unwrap().clone();
    let beta = widths.iter().max().unwrap().clone();
    if !r.is_positive() || r > &alpha {
        return Err(InterleaveError::MeshBounds(format!("need 0 < r <= {} (got {})", fmt_q(&alpha), fmt_q(r))));
    }
    for k in 0..p.n() {
        if p.axis(k).last() < l.grid().axis(k).last() {
            return Err(InterleaveError::MeshBounds(format!("grid ends below the module on axis {k}")));
        }
    }
    let zero = Q::zero();
    let q = p.union(&p.translate_diag(&-&beta))?;
    let lp = l.restriction_extension(p);
    let lpr = l.restriction_extension(&p.translate_diag(r));
    let src = Arc::new(shifted_resample(&lpr, &q, r));
    let tgt = Arc::new(shifted_resample(&lp, &q, &beta));

    let pf0 = q.axis_floor_map(p, &zero).floors(&q);
    let pfb = q.axis_floor_map(p, &beta).floors(&q);
    let lfloor = |v: Option<usize>, shift: &Q| -> Option<usize> {
        v.and_then(|v| {
            let x: Vec<Q> = p.coords(v).iter().map(|c| c + shift).collect();
            l.grid().floor(&x)
        })
    };
    let f = l.field();
    let mut mats = Vec::with_capacity(q.num_vertices());
    for v in q.vertices() {
        let a = lfloor(pf0[v], r);
        let b = lfloor(pfb[v], &zero);
        if let (Some(a), Some(b)) = (a, b) {
            if !l.grid().leq(a, b) {
                return Err(InterleaveError::MeshBounds("a mesh width exceeds β".into()));
            }
        }
        mats.push(if pf0[v].is_some() { phi(l, a, b) } else { Mat::zeros(tgt.dim(v), src.dim(v)) });
    }
    let m = ModuleMorphism::new(src, tgt, mats)?;
    m.check_natural()?;
    for v in q.vertices() {
        let Some(a0) = lfloor(pf0[v], &zero) else { continue };
        let lhs = phi(l, Some(a0), lfloor(pfb[v], &zero));
        let rhs = m.mat(v).mul(f, &phi(l, Some(a0), lfloor(pf0[v], r)));
        if lhs != rhs {
            return Err(InterleaveError::Verification(format!("factorization square fails at vertex {v}")));
        }
    }
    Ok(FactorWitness { m, alpha, beta })
}
