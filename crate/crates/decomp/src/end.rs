//! Endomorphism algebras of grid modules and the local-ring test.

use crate::algebra::{columns, is_zero, StructAlgebra};
use crate::DecompError;
use pmod_core::random::rng_from_seed;
use pmod_core::{hom_space, GridModule, HomSpace, Mat, ModuleMorphism};
use std::sync::Arc;

pub const DEFAULT_SEED: u64 = 0x5eed;
pub const DEFAULT_TRIALS: usize = 256;

/// `End(M)` in the basis of [`hom_space`]`(M, M)` with exact structure constants.
#[derive(Clone, Debug)]
pub struct EndAlgebra {
    module: Arc<GridModule>,
    hom: HomSpace,
    algebra: StructAlgebra,
}

pub fn end_algebra(m: &Arc<GridModule>) -> Result<EndAlgebra, DecompError> {
    let hom = hom_space(m, m)?;
    let f = m.field();
    let d = hom.dim();
    let blocks: Vec<Vec<Mat>> = (0..d).map(|i| hom.root_blocks(&hom.vector_from_coords(&unit_vec(d, i)))).collect();
    let mut left = Vec::with_capacity(d);
    for bi in &blocks {
        let mut l = Mat::zeros(d, d);
        for (j, bj) in blocks.iter().enumerate() {
            let prod: Vec<Mat> = bi.iter().zip(bj).map(|(x, y)| x.mul(f, y)).collect();
            let coords = hom.coords_of_vector(&hom.vector_from_root_blocks(&prod));
            for (k, c) in coords.into_iter().enumerate() {
                l.set(k, j, c);
            }
        }
        left.push(l);
    }
    let unit = if d == 0 {
        Vec::new()
    } else {
        hom.coords_of(&ModuleMorphism::identity(m.clone()))
            .ok_or_else(|| DecompError::Internal("identity is not in the computed endomorphism space".into()))?
    };
    Ok(EndAlgebra { module: m.clone(), hom, algebra: StructAlgebra::new(f, left, unit) })
}

fn unit_vec(d: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; d];
    v[i] = 1;
    v
}

impl EndAlgebra {
    pub fn module(&self) -> &Arc<GridModule> {
        &self.module
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// True for the zero module, whose endomorphism algebra has no unit.
    pub fn is_degenerate(&self) -> bool {
        self.dim() == 0
    }

    pub fn algebra(&self) -> &StructAlgebra {
        &self.algebra
    }

    pub fn hom(&self) -> &HomSpace {
        &self.hom
    }

    pub fn morphism(&self, x: &[u32]) -> ModuleMorphism {
        self.hom.morphism_from_coords(x)
    }

    pub fn basis(&self) -> Vec<ModuleMorphism> {
        self.hom.basis_morphisms()
    }

    pub fn coords_of(&self, m: &ModuleMorphism) -> Option<Vec<u32>> {
        self.hom.coords_of(m)
    }

    /// Coordinates of `b_i ∘ b_j`.
    pub fn product(&self, i: usize, j: usize) -> Vec<u32> {
        self.algebra.mul(&self.algebra.basis_vector(i), &self.algebra.basis_vector(j))
    }
}

/// Jacobson radical of `End(M)` (columns in the endomorphism basis), verified nilpotent.
pub fn radical(a: &EndAlgebra) -> Result<Mat, DecompError> {
    a.algebra.radical()
}

/// Outcome of the local-ring test on `A = End(M)`, `B = A / rad(A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalReport {
    pub end_dim: usize,
    pub radical_dim: usize,
    pub quotient_commutative: bool,
    /// Number of field factors of `B` when `B` is commutative.
    pub factor_count: Option<usize>,
    pub local: bool,
}

pub fn local_report(a: &EndAlgebra) -> Result<LocalReport, DecompError> {
    if a.is_degenerate() {
        return Err(DecompError::ZeroModule);
    }
    let rad = a.algebra.radical()?;
    let q = a.algebra.quotient(&rad);
    let b = q.algebra();
    let commutative = b.is_commutative();
    let factor_count = commutative.then(|| b.frobenius_fixed().cols());
    Ok(LocalReport {
        end_dim: a.dim(),
        radical_dim: rad.cols(),
        quotient_commutative: commutative,
        factor_count,
        local: factor_count == Some(1),
    })
}

/// `M` is indecomposable iff `End(M)/rad` is a field: commutative with one Berlekamp factor.
pub fn is_indecomposable(m: &GridModule) -> Result<bool, DecompError> {
    if m.is_zero() {
        return Err(DecompError::ZeroModule);
    }
    let a = end_algebra(&Arc::new(m.clone()))?;
    Ok(local_report(&a)?.local)
}

/// A verified idempotent `e ∉ {0, 1}` of `End(M)`, in endomorphism coordinates.
pub fn find_idempotent(a: &EndAlgebra) -> Result<Vec<u32>, DecompError> {
    find_idempotent_with(a, DEFAULT_SEED, DEFAULT_TRIALS)
}

pub fn find_idempotent_with(a: &EndAlgebra, seed: u64, trials: usize) -> Result<Vec<u32>, DecompError> {
    if a.is_degenerate() {
        return Err(DecompError::ZeroModule);
    }
    let alg = &a.algebra;
    let rad = alg.radical()?;
    let q = alg.quotient(&rad);
    let b = q.algebra();
    let eb = semisimple_idempotent(b, seed, trials)?;
    let e = alg.lift_idempotent(&q.lift(alg.dim(), &eb))?;
    if !alg.is_idempotent(&e) || is_zero(&e) || e == alg.unit() {
        return Err(DecompError::Internal("lifted idempotent is trivial".into()));
    }
    Ok(e)
}

/// Nontrivial idempotent of a semisimple algebra that is not a field.
fn semisimple_idempotent(b: &StructAlgebra, seed: u64, trials: usize) -> Result<Vec<u32>, DecompError> {
    if b.is_commutative() {
        return fixed_space_idempotent(b)?.ok_or(DecompError::Local);
    }
    let (z, emb) = b.center()?;
    if let Some(ez) = fixed_space_idempotent(&z)? {
        return Ok(embed(b, &emb, &ez));
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..trials {
        let x = b.random_element(&mut rng);
        let (_, powers) = b.minimal_polynomial(&x);
        let c = b.subalgebra(&powers)?;
        let rad = c.radical()?;
        let cq = c.quotient(&rad);
        if let Some(ec) = fixed_space_idempotent(cq.algebra())? {
            let ec = c.lift_idempotent(&cq.lift(c.dim(), &ec))?;
            let e = embed(b, &powers, &ec);
            if b.is_idempotent(&e) && !is_zero(&e) && e != b.unit() {
                return Ok(e);
            }
        }
    }
    Err(DecompError::Exhausted { seed, trials })
}

fn embed(b: &StructAlgebra, emb: &Mat, x: &[u32]) -> Vec<u32> {
    let col = emb.mul(b.field(), &crate::algebra::column(x));
    (0..col.rows()).map(|i| col.get(i, 0)).collect()
}

/// Idempotent from a non-scalar element of the Berlekamp subalgebra of a commutative
/// semisimple algebra, or `None` when that subalgebra is one-dimensional.
fn fixed_space_idempotent(c: &StructAlgebra) -> Result<Option<Vec<u32>>, DecompError> {
    let fixed = c.frobenius_fixed();
    if fixed.cols() <= 1 {
        return Ok(None);
    }
    for z in columns(&fixed) {
        if !c.is_scalar(&z) {
            return Ok(c.eigen_idempotent(&z));
        }
    }
    Err(DecompError::Internal("Berlekamp subalgebra contains only scalars".into()))
}

/// Exhaustive search for an idempotent `e ∉ {0, 1}`; `None` when `p^dim > limit`.
pub fn brute_force_is_indecomposable(m: &GridModule, limit: u64) -> Result<Option<bool>, DecompError> {
    if m.is_zero() {
        return Err(DecompError::ZeroModule);
    }
    let a = end_algebra(&Arc::new(m.clone()))?;
    let alg = a.algebra();
    let p = alg.field().p() as u64;
    let d = alg.dim() as u32;
    let Some(total) = p.checked_pow(d).filter(|&t| t <= limit) else { return Ok(None) };
    let mut x = vec![0u32; d as usize];
    for mut code in 0..total {
        for xi in x.iter_mut() {
            *xi = (code % p) as u32;
            code /= p;
        }
        if !is_zero(&x) && x != alg.unit() && alg.is_idempotent(&x) {
            return Ok(Some(false));
        }
    }
    Ok(Some(true))
}
