//! ε-triviality of modules and of regions.
//!
//! For a module on a grid, `φ_{r, r+ε}` at a point `r` factors through the map at the grid
//! vertex below `r`, so it suffices to test vertices: `M` is ε-trivial iff
//! `φ_{p, floor(p+ε)} = 0` for every vertex `p` with `M(p) ≠ 0`.

use crate::InterleaveError;
use num_traits::{Signed, Zero};
use pmod_core::{Grid, GridModule, Q};

pub fn is_eps_trivial(m: &GridModule, eps: &Q) -> Result<bool, InterleaveError> {
    if !eps.is_positive() {
        return Err(InterleaveError::NonPositiveEps);
    }
    let g = m.grid();
    let up = g.axis_floor_map(g, eps);
    for p in m.support() {
        let b = up.floor(&g.multi(p)).expect("p + ε lies above p");
        if m.dim(b) > 0 && !m.structure_map(p, b).expect("ordered").is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Some(r)`: the least `r >= 0` such that the module is `r`-trivial; `None` if it never is.
pub fn triviality_radius(m: &GridModule) -> Option<Q> {
    let g = m.grid();
    let mut radius = Q::zero();
    for p in m.support() {
        let pc = g.coords(p);
        let mut cands: Vec<Q> = Vec::new();
        for k in 0..g.n() {
            for c in g.axis(k) {
                if c > &pc[k] {
                    cands.push(c - &pc[k]);
                }
            }
        }
        cands.sort();
        cands.dedup();
        let zero_at = |d: &Q| -> bool {
            let x: Vec<Q> = pc.iter().map(|c| c + d).collect();
            let b = g.floor(&x).expect("above p");
            m.dim(b) == 0 || m.structure_map(p, b).expect("ordered").is_zero()
        };
        // monotone: once zero, zero for every larger shift
        if cands.is_empty() || !zero_at(cands.last().unwrap()) {
            return None;
        }
        let idx = cands.partition_point(|d| !zero_at(d));
        if cands[idx] > radius {
            radius = cands[idx].clone();
        }
    }
    Some(radius)
}

/// ε′-trivial for some ε′ < ε.
pub fn is_strictly_eps_trivial(m: &GridModule, eps: &Q) -> Result<bool, InterleaveError> {
    if !eps.is_positive() {
        return Err(InterleaveError::NonPositiveEps);
    }
    Ok(triviality_radius(m).is_some_and(|r| &r < eps))
}

/// Product of half-open intervals `[lo_i, hi_i)`; `hi_i = None` means unbounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfOpenBox {
    pub lo: Vec<Q>,
    pub hi: Vec<Option<Q>>,
}

impl HalfOpenBox {
    pub fn new(lo: Vec<Q>, hi: Vec<Option<Q>>) -> Self {
        assert_eq!(lo.len(), hi.len());
        HalfOpenBox { lo, hi }
    }

    /// `[lo, lo + w)` on every axis.
    pub fn cube(lo: &[Q], w: &Q) -> Self {
        HalfOpenBox { lo: lo.to_vec(), hi: lo.iter().map(|c| Some(c + w)).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| h.as_ref().is_some_and(|h| h <= l))
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.lo.iter().zip(&self.hi).zip(x).all(|((l, h), c)| l <= c && h.as_ref().is_none_or(|h| c < h))
    }

    /// Whether this box meets `other + t·1`.
    pub fn meets_shifted(&self, other: &HalfOpenBox, t: &Q) -> bool {
        (0..self.lo.len()).all(|k| {
            let lo2 = &other.lo[k] + t;
            let lo = if self.lo[k] >= lo2 { &self.lo[k] } else { &lo2 };
            let hi2 = other.hi[k].as_ref().map(|h| h + t);
            match (&self.hi[k], hi2) {
                (None, None) => true,
                (Some(h), None) => lo < h,
                (None, Some(h)) => *lo < h,
                (Some(h1), Some(h2)) => lo < h1 && *lo < h2,
            }
        })
    }
}

/// Finite union of half-open boxes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrivialRegion {
    pub boxes: Vec<HalfOpenBox>,
}

impl TrivialRegion {
    pub fn empty() -> Self {
        TrivialRegion { boxes: Vec::new() }
    }

    pub fn from_boxes(boxes: Vec<HalfOpenBox>) -> Self {
        TrivialRegion { boxes: boxes.into_iter().filter(|b| !b.is_empty()).collect() }
    }

    pub fn single(b: HalfOpenBox) -> Self {
        Self::from_boxes(vec![b])
    }

    pub fn union(&self, other: &TrivialRegion) -> TrivialRegion {
        let mut boxes = self.boxes.clone();
        boxes.extend(other.boxes.iter().cloned());
        TrivialRegion { boxes }
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.boxes.iter().any(|b| b.contains(x))
    }

    /// `U ∩ (U + ε·1) = ∅`.
    pub fn is_eps_trivial(&self, eps: &Q) -> bool {
        self.boxes.iter().all(|a| self.boxes.iter().all(|b| !a.meets_shifted(b, eps)))
    }

    /// Every finite box bound, per axis.
    pub fn corner_coords(&self, n: usize) -> Vec<Vec<Q>> {
        let mut out = vec![Vec::new(); n];
        for b in &self.boxes {
            for k in 0..n {
                out[k].push(b.lo[k].clone());
                if let Some(h) = &b.hi[k] {
                    out[k].push(h.clone());
                }
            }
        }
        out
    }

    /// Whether the cell of vertex `v` (up to the next coordinate) lies inside the region;
    /// exact when the grid contains every box corner.
    pub fn contains_cell(&self, g: &Grid, v: usize) -> bool {
        self.contains(&g.coords(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pmod_core::rational::{q, qr};
    use pmod_core::FieldConfig;

    #[test]
    fn interval_radius() {
        let f = FieldConfig::new(7).unwrap();
        let m = GridModule::interval_module(f, &[q(0), q(0)], &[q(1), q(1)]).unwrap();
        assert_eq!(triviality_radius(&m), Some(q(1)));
        assert!(is_eps_trivial(&m, &q(1)).unwrap());
        assert!(!is_eps_trivial(&m, &qr(1, 2)).unwrap());
        assert!(!is_strictly_eps_trivial(&m, &q(1)).unwrap());
        assert!(is_strictly_eps_trivial(&m, &qr(3, 2)).unwrap());
        assert!(is_eps_trivial(&m, &q(0)).is_err());
    }

    #[test]
    fn zero_and_free() {
        let f = FieldConfig::new(7).unwrap();
        let g = Grid::regular(2, 2, &q(1));
        assert_eq!(triviality_radius(&GridModule::zero(f, g.clone())), Some(q(0)));
        assert_eq!(triviality_radius(&GridModule::free_module(f, g, 0)), None);
    }

    #[test]
    fn region_triviality() {
        let b = HalfOpenBox::cube(&[q(0), q(0)], &q(1));
        let r = TrivialRegion::single(b.clone());
        assert!(r.is_eps_trivial(&q(1)));
        assert!(!r.is_eps_trivial(&qr(1, 2)));
        let thin = HalfOpenBox::new(vec![q(0), q(5)], vec![Some(q(1)), None]);
        assert!(r.union(&TrivialRegion::single(thin)).is_eps_trivial(&q(1)));
        let overlapping = HalfOpenBox::cube(&[qr(1, 2), qr(1, 2)], &q(1));
        assert!(!r.union(&TrivialRegion::single(overlapping)).is_eps_trivial(&q(1)));
        let everything = HalfOpenBox::new(vec![q(0), q(0)], vec![None, None]);
        assert!(!TrivialRegion::single(everything).is_eps_trivial(&q(100)));
    }
}
