//! Isomorphism testing with verified witnesses.

use crate::error::CoreError;
use crate::field::Mat;
use crate::hom::{hom_space, HomSpace};
use crate::module::{GridModule, ModuleMorphism};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Default number of random trials.
pub const DEFAULT_TRIALS: usize = 64;
/// Largest number of coefficient vectors enumerated by the exhaustive fallback.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 16;

#[derive(Clone, Debug)]
pub enum IsoOutcome {
    /// A verified isomorphism between the two modules refined to a common grid.
    Isomorphic(ModuleMorphism),
    /// Definitely not isomorphic.
    NotIsomorphic,
    /// No isomorphism found, but the search was not exhaustive.
    ProbablyNotIsomorphic,
}

impl IsoOutcome {
    pub fn is_iso(&self) -> bool {
        matches!(self, IsoOutcome::Isomorphic(_))
    }
}

/// Both modules resampled onto the union of their grids.
pub fn refine_pair(m: &GridModule, n: &GridModule) -> Result<(GridModule, GridModule), CoreError> {
    if m.field() != n.field() {
        return Err(CoreError::FieldMismatch(m.field().p(), n.field().p()));
    }
    if m.same_grid(n) {
        return Ok((m.clone(), n.clone()));
    }
    let u = m.grid().union(n.grid())?;
    Ok((m.restriction_extension(&u), n.restriction_extension(&u)))
}

pub fn is_isomorphic(m: &GridModule, n: &GridModule) -> Result<IsoOutcome, CoreError> {
    is_isomorphic_with(m, n, DEFAULT_TRIALS, 0x5eed)
}

pub fn is_isomorphic_with(m: &GridModule, n: &GridModule, trials: usize, seed: u64) -> Result<IsoOutcome, CoreError> {
    let (m, n) = refine_pair(m, n)?;
    if m.dims() != n.dims() {
        return Ok(IsoOutcome::NotIsomorphic);
    }
    let (m, n) = (Arc::new(m), Arc::new(n));
    let h = hom_space(&m, &n)?;
    Ok(search_iso(&h, trials, seed))
}

/// Look for an invertible element of a hom space between modules with equal dimension vectors.
pub fn search_iso(h: &HomSpace, trials: usize, seed: u64) -> IsoOutcome {
    let f = h.field();
    let d = h.dim();
    let try_coords = |c: &[u32]| -> Option<ModuleMorphism> {
        let blocks: Vec<Mat> = h.root_blocks(&h.vector_from_coords(c));
        if !h.root_blocks_invertible(&blocks) {
            return None;
        }
        let phi = h.morphism_from_root_blocks(&blocks);
        (phi.is_iso() && phi.is_natural()).then_some(phi)
    };
    if h.source().is_zero() {
        return IsoOutcome::Isomorphic(h.morphism_from_coords(&vec![0; d]));
    }
    if d == 0 {
        return IsoOutcome::NotIsomorphic;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let c: Vec<u32> = (0..d).map(|_| rng.gen_range(0..f.p())).collect();
        if let Some(phi) = try_coords(&c) {
            return IsoOutcome::Isomorphic(phi);
        }
    }
    let p = f.p() as u64;
    let total = (0..d).try_fold(1u64, |acc, _| acc.checked_mul(p).filter(|&x| x <= EXHAUSTIVE_LIMIT));
    let Some(total) = total else {
        return IsoOutcome::ProbablyNotIsomorphic;
    };
    let mut c = vec![0u32; d];
    for mut idx in 0..total {
        for ci in c.iter_mut() {
            *ci = (idx % p) as u32;
            idx /= p;
        }
        if let Some(phi) = try_coords(&c) {
            return IsoOutcome::Isomorphic(phi);
        }
    }
    IsoOutcome::NotIsomorphic
}
