//! Splitting modules along idempotents and Fitting decompositions; full decomposition.

use crate::end::{end_algebra, find_idempotent_with, local_report, DEFAULT_SEED, DEFAULT_TRIALS};
use crate::DecompError;
use pmod_core::{GridModule, Mat, ModuleMorphism};
use std::sync::Arc;

/// `M ≅ first ⊕ second`, witnessed by `iso : M -> first ⊕ second`.
#[derive(Clone, Debug)]
pub struct Split {
    pub first: Arc<GridModule>,
    pub second: Arc<GridModule>,
    pub iso: ModuleMorphism,
}

/// Splits `M` along per-vertex complementary subspaces spanned by `left[v]` and `right[v]`;
/// both families must be preserved by the structure maps.
fn split_along(m: &Arc<GridModule>, left: &[Mat], right: &[Mat]) -> Result<Split, DecompError> {
    let f = m.field();
    let g = m.grid();
    let mut inv = Vec::with_capacity(g.num_vertices());
    for v in g.vertices() {
        let t = left[v].hstack(&right[v]);
        inv.push(t.inverse(f).ok_or_else(|| DecompError::Internal("subspaces are not complementary".into()))?);
    }
    let conj = m.conjugate(&inv)?;
    let r: Vec<usize> = left.iter().map(|l| l.cols()).collect();
    let d = m.dims();
    let mut s1 = Vec::with_capacity(g.n());
    let mut s2 = Vec::with_capacity(g.n());
    for k in 0..g.n() {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for v in g.vertices() {
            let Some(w) = g.successor(v, k) else {
                a.push(Mat::zeros(0, 0));
                b.push(Mat::zeros(0, 0));
                continue;
            };
            let s = conj.step(k, v).unwrap();
            let off1 = s.block(r[w], d[w], 0, r[v]);
            let off2 = s.block(0, r[w], r[v], d[v]);
            if !off1.is_zero() || !off2.is_zero() {
                return Err(DecompError::NotInvariant(fmt_vertex(g, v)));
            }
            a.push(s.block(0, r[w], 0, r[v]));
            b.push(s.block(r[w], d[w], r[v], d[v]));
        }
        s1.push(a);
        s2.push(b);
    }
    let first = Arc::new(GridModule::new(f, g.clone(), r.clone(), s1)?);
    let second = Arc::new(GridModule::new(f, g.clone(), d.iter().zip(&r).map(|(a, b)| a - b).collect(), s2)?);
    let sum = Arc::new(first.direct_sum(&second)?);
    let iso = ModuleMorphism::new_natural(m.clone(), sum, inv)?;
    Ok(Split { first, second, iso })
}

fn fmt_vertex(g: &pmod_core::Grid, v: usize) -> String {
    let c: Vec<String> = g.coords(v).iter().map(pmod_core::rational::fmt_q).collect();
    format!("({})", c.join(", "))
}

/// `(im e, ker e)` for a natural idempotent `e` on `M`.
pub fn split_by_idempotent(m: &Arc<GridModule>, e: &ModuleMorphism) -> Result<Split, DecompError> {
    let f = m.field();
    if e.source().as_ref() != m.as_ref() || e.target().as_ref() != m.as_ref() {
        return Err(DecompError::Internal("idempotent is not an endomorphism of the module".into()));
    }
    e.check_natural().map_err(DecompError::NotNatural)?;
    let mut left = Vec::new();
    let mut right = Vec::new();
    for v in m.grid().vertices() {
        let x = e.mat(v);
        if x.mul(f, x) != *x {
            return Err(DecompError::NotIdempotent);
        }
        left.push(x.image(f));
        right.push(x.kernel(f));
    }
    split_along(m, &left, &right)
}

/// Fitting decomposition `M = ker(φ^D) ⊕ im(φ^D)` with `D` the total dimension.
pub fn fitting_split(m: &Arc<GridModule>, phi: &ModuleMorphism) -> Result<Split, DecompError> {
    let f = m.field();
    phi.check_natural().map_err(DecompError::NotNatural)?;
    let dpow = m.total_dim().max(1) as u64;
    let mut left = Vec::new();
    let mut right = Vec::new();
    for v in m.grid().vertices() {
        let x = phi.mat(v).pow(f, dpow);
        left.push(x.kernel(f));
        right.push(x.image(f));
    }
    split_along(m, &left, &right)
}

/// Indecomposable summands (sorted by total dimension, then dimension vector) with a
/// verified isomorphism from `M` to their direct sum.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub summands: Vec<Arc<GridModule>>,
    pub iso: ModuleMorphism,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn sum(&self) -> &Arc<GridModule> {
        self.iso.target()
    }
}

pub fn decompose(m: &GridModule) -> Result<Decomposition, DecompError> {
    decompose_with(m, DEFAULT_SEED, DEFAULT_TRIALS)
}

pub fn decompose_with(m: &GridModule, seed: u64, trials: usize) -> Result<Decomposition, DecompError> {
    let m = Arc::new(m.clone());
    let f = m.field();
    let mut leaves: Vec<(Arc<GridModule>, Vec<Mat>)> = Vec::new();
    if !m.is_zero() {
        let proj: Vec<Mat> = m.dims().iter().map(|&d| Mat::identity(d)).collect();
        let mut stack = vec![(m.clone(), proj)];
        while let Some((x, px)) = stack.pop() {
            let a = end_algebra(&x)?;
            if local_report(&a)?.local {
                leaves.push((x, px));
                continue;
            }
            let e = find_idempotent_with(&a, seed, trials)?;
            let s = split_by_idempotent(&x, &a.morphism(&e))?;
            let mut parts = [(s.first.clone(), 0usize), (s.second.clone(), 1usize)];
            parts.sort_by_key(|(p, _)| std::cmp::Reverse(p.total_dim()));
            for (part, which) in parts {
                let proj: Vec<Mat> = x
                    .grid()
                    .vertices()
                    .map(|v| {
                        let t = s.iso.mat(v);
                        let r = s.first.dim(v);
                        let rows = if which == 0 { t.block(0, r, 0, t.cols()) } else { t.block(r, t.rows(), 0, t.cols()) };
                        rows.mul(f, &px[v])
                    })
                    .collect();
                stack.push((part, proj));
            }
        }
    }
    leaves.sort_by(|(a, _), (b, _)| (a.total_dim(), a.dims()).cmp(&(b.total_dim(), b.dims())));
    let summands: Vec<Arc<GridModule>> = leaves.iter().map(|(x, _)| x.clone()).collect();
    let refs: Vec<&GridModule> = summands.iter().map(|x| x.as_ref()).collect();
    let sum = Arc::new(if refs.is_empty() { GridModule::zero(f, m.grid().clone()) } else { GridModule::direct_sum_all(&refs)? });
    let mats: Vec<Mat> = m
        .grid()
        .vertices()
        .map(|v| leaves.iter().fold(Mat::zeros(0, m.dim(v)), |acc, (_, p)| acc.vstack(&p[v])))
        .collect();
    let iso = ModuleMorphism::new_natural(m.clone(), sum, mats)?;
    if !iso.is_iso() {
        return Err(DecompError::Internal("assembled decomposition map is not an isomorphism".into()));
    }
    Ok(Decomposition { summands, iso })
}
