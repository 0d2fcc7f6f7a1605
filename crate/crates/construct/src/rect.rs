//! Hyper-rectangles of `(δℤ)^n` and gluing a local patch into a module along one of them.

use crate::{fmt_point, ConstructError};
use num_traits::Signed;
use pmod_core::rational::{fmt_q, is_multiple_of};
use pmod_core::{Grid, GridModule, Mat, Q};
use pmod_interleave::HalfOpenBox;

/// `[a_1, b_1] × ⋯ × [a_n, b_n] ⊆ (δℤ)^n`; `None` bounds stand for `∓∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperRectangle {
    delta: Q,
    lo: Vec<Option<Q>>,
    hi: Vec<Option<Q>>,
}

impl HyperRectangle {
    pub fn new(delta: Q, lo: Vec<Option<Q>>, hi: Vec<Option<Q>>) -> Result<Self, ConstructError> {
        if !delta.is_positive() {
            return Err(ConstructError::Precondition("the pitch must be positive".into()));
        }
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(ConstructError::Precondition("bounds must have equal positive length".into()));
        }
        for b in lo.iter().chain(&hi).flatten() {
            if !is_multiple_of(b, &delta) {
                return Err(ConstructError::NotOnLattice(format!("{} is not a multiple of {}", fmt_q(b), fmt_q(&delta))));
            }
        }
        for (a, b) in lo.iter().zip(&hi) {
            if let (Some(a), Some(b)) = (a, b) {
                if a > b {
                    return Err(ConstructError::Precondition(format!("empty side [{}, {}]", fmt_q(a), fmt_q(b))));
                }
            }
        }
        Ok(HyperRectangle { delta, lo, hi })
    }

    /// Finite closed box `[lo, hi]`.
    pub fn finite(delta: &Q, lo: &[Q], hi: &[Q]) -> Result<Self, ConstructError> {
        Self::new(delta.clone(), lo.iter().cloned().map(Some).collect(), hi.iter().cloned().map(Some).collect())
    }

    /// The single lattice point `p`.
    pub fn point(delta: &Q, p: &[Q]) -> Result<Self, ConstructError> {
        Self::finite(delta, p, p)
    }

    pub fn delta(&self) -> &Q {
        &self.delta
    }

    pub fn n(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[Option<Q>] {
        &self.lo
    }

    pub fn hi(&self) -> &[Option<Q>] {
        &self.hi
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(c, (a, b))| a.as_ref().is_none_or(|a| a <= c) && b.as_ref().is_none_or(|b| c <= b))
    }

    /// `S↑ = [a_1, b_1 + δ] × ⋯`.
    pub fn up(&self) -> HyperRectangle {
        let hi = self.hi.iter().map(|b| b.as_ref().map(|b| b + &self.delta)).collect();
        HyperRectangle { delta: self.delta.clone(), lo: self.lo.clone(), hi }
    }

    /// `S↓ = [a_1 − δ, b_1] × ⋯`.
    pub fn down(&self) -> HyperRectangle {
        let lo = self.lo.iter().map(|a| a.as_ref().map(|a| a - &self.delta)).collect();
        HyperRectangle { delta: self.delta.clone(), lo, hi: self.hi.clone() }
    }

    /// `∂↑S = S↑ ∖ S`.
    pub fn in_upper_boundary(&self, x: &[Q]) -> bool {
        self.up().contains(x) && !self.contains(x)
    }

    /// `∂↓S = S↓ ∖ S`.
    pub fn in_lower_boundary(&self, x: &[Q]) -> bool {
        self.down().contains(x) && !self.contains(x)
    }

    /// `∂S = ∂↑S ∪ ∂↓S`.
    pub fn in_boundary(&self, x: &[Q]) -> bool {
        self.in_upper_boundary(x) || self.in_lower_boundary(x)
    }

    /// `S̄ = S ∪ ∂S`.
    pub fn in_closure(&self, x: &[Q]) -> bool {
        self.contains(x) || self.in_boundary(x)
    }

    /// The cells of the lattice points of `S`: `[a_i, b_i + δ)` on every axis.
    pub fn hat(&self) -> Option<HalfOpenBox> {
        let lo: Option<Vec<Q>> = self.lo.iter().cloned().collect();
        let hi = self.hi.iter().map(|b| b.as_ref().map(|b| b + &self.delta)).collect();
        Some(HalfOpenBox::new(lo?, hi))
    }

    /// Finite coordinates `a − δ, a, b, b + δ` per axis.
    fn frame_coords(&self) -> Vec<Vec<Q>> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| {
                let mut out = Vec::new();
                if let Some(a) = a {
                    out.push(a - &self.delta);
                    out.push(a.clone());
                }
                if let Some(b) = b {
                    out.push(b.clone());
                    out.push(b + &self.delta);
                }
                out
            })
            .collect()
    }
}

pub(crate) fn check_lattice(m: &GridModule, delta: &Q, what: &str) -> Result<(), ConstructError> {
    for k in 0..m.n() {
        if let Some(c) = m.grid().axis(k).iter().find(|c| !is_multiple_of(c, delta)) {
            return Err(ConstructError::NotOnLattice(format!(
                "{what} has coordinate {} on axis {k}, not a multiple of {}",
                fmt_q(c),
                fmt_q(delta)
            )));
        }
    }
    Ok(())
}

/// The unique module `L` with `L = N` on `S` and `L = M` off `S`. Both `M` and `N` must be
/// extensions of modules on `(δℤ)^n`, and they must agree on `S̄ ∖ S` (values and the maps
/// between its points).
pub fn modify_on_rectangle(m: &GridModule, s: &HyperRectangle, nmod: &GridModule) -> Result<GridModule, ConstructError> {
    if m.n() != s.n() || nmod.n() != s.n() {
        return Err(pmod_core::CoreError::DimensionMismatch(m.n(), s.n()).into());
    }
    if m.field() != nmod.field() {
        return Err(pmod_core::CoreError::FieldMismatch(m.field().p(), nmod.field().p()).into());
    }
    let delta = s.delta();
    check_lattice(m, delta, "M")?;
    check_lattice(nmod, delta, "N")?;
    let frame = s.frame_coords();
    let extra: Vec<Vec<Q>> = (0..s.n())
        .map(|k| {
            let mut e = frame[k].clone();
            e.extend(nmod.grid().axis(k).iter().filter(|c| s.down().up().contains_axis(k, c)).cloned());
            e
        })
        .collect();
    let w = m.grid().with_coords(&extra);
    let base = m.restriction_extension(&w);
    let coords: Vec<Vec<Q>> = w.vertices().map(|v| w.coords(v)).collect();
    let inside: Vec<bool> = coords.iter().map(|c| s.contains(c)).collect();
    let rim: Vec<bool> = coords.iter().zip(&inside).map(|(c, &i)| !i && s.in_closure(c)).collect();
    for v in w.vertices() {
        if !rim[v] {
            continue;
        }
        if nmod.dim_at(&coords[v]) != base.dim(v) {
            return Err(ConstructError::Disagreement(fmt_point(&coords[v])));
        }
        for k in 0..w.n() {
            let Some(u) = w.successor(v, k) else { continue };
            if rim[u] && &nmod.map_between_points(&coords[v], &coords[u]) != base.step(k, v).unwrap() {
                return Err(ConstructError::Disagreement(format!("{} -> {}", fmt_point(&coords[v]), fmt_point(&coords[u]))));
            }
        }
    }
    let dims: Vec<usize> = w
        .vertices()
        .map(|v| if inside[v] { nmod.dim_at(&coords[v]) } else { base.dim(v) })
        .collect();
    let out = GridModule::from_fn(m.field(), w, dims, |k, v, u| {
        if inside[v] || inside[u] {
            nmod.map_between_points(&coords[v], &coords[u])
        } else {
            base.step(k, v).unwrap().clone()
        }
    })?;
    Ok(out)
}

impl HyperRectangle {
    fn contains_axis(&self, k: usize, c: &Q) -> bool {
        self.lo[k].as_ref().is_none_or(|a| a <= c) && self.hi[k].as_ref().is_none_or(|b| c <= b)
    }
}

/// A patch on the box grid around `S̄` (with every lattice point of a finite `S` when `lattice`): equal to `x` off `S`, with the given values on `S` and
/// the given maps on every edge touching `S`. Validated.
pub(crate) fn local_patch(
    x: &GridModule,
    s: &HyperRectangle,
    lattice: bool,
    dims_in: impl Fn(&[Q]) -> usize,
    mut step: impl FnMut(usize, &[Q], &[Q], usize, usize) -> Mat,
) -> Result<GridModule, ConstructError> {
    let closure = s.down().up();
    let mut frame = s.frame_coords();
    if lattice {
        for (k, f) in frame.iter_mut().enumerate() {
            if let (Some(a), Some(b)) = (&s.lo[k], &s.hi[k]) {
                let mut c = a.clone();
                while &c <= b {
                    f.push(c.clone());
                    c += &s.delta;
                }
            }
        }
    }
    let axes: Vec<Vec<Q>> = (0..s.n())
        .map(|k| {
            let mut a: Vec<Q> = x.grid().axis(k).iter().filter(|c| closure.contains_axis(k, c)).cloned().collect();
            a.extend(frame[k].iter().cloned());
            a
        })
        .collect();
    let b = Grid::from_unsorted(axes)?;
    let xb = x.restriction_extension(&b);
    let coords: Vec<Vec<Q>> = b.vertices().map(|v| b.coords(v)).collect();
    let inside: Vec<bool> = coords.iter().map(|c| s.contains(c)).collect();
    let dims: Vec<usize> = b
        .vertices()
        .map(|v| if inside[v] { dims_in(&coords[v]) } else { xb.dim(v) })
        .collect();
    let d = dims.clone();
    let patch = GridModule::from_fn(x.field(), b, dims, |k, v, u| {
        if inside[v] || inside[u] {
            step(k, &coords[v], &coords[u], d[v], d[u])
        } else {
            xb.step(k, v).unwrap().clone()
        }
    })?;
    Ok(patch)
}

/// Replace `x` on `S` by a patch built with [`local_patch`].
pub(crate) fn glue(
    x: &GridModule,
    s: &HyperRectangle,
    lattice: bool,
    dims_in: impl Fn(&[Q]) -> usize,
    step: impl FnMut(usize, &[Q], &[Q], usize, usize) -> Mat,
) -> Result<GridModule, ConstructError> {
    let patch = local_patch(x, s, lattice, dims_in, step)?;
    modify_on_rectangle(x, s, &patch)
}

/// The part of the transfer criterion about `N`: every indecomposable summand of `N` is nonzero
/// somewhere on `S̄ ∖ S`.
pub fn summands_meet_boundary(nmod: &GridModule, s: &HyperRectangle) -> Result<bool, ConstructError> {
    let d = pmod_decomp::decompose(nmod)?;
    let closure = s.down().up();
    let frame = s.frame_coords();
    Ok(d.summands.iter().all(|x| {
        let axes: Vec<Vec<Q>> = (0..s.n())
            .map(|k| {
                let mut a: Vec<Q> = x.grid().axis(k).iter().filter(|c| closure.contains_axis(k, c)).cloned().collect();
                a.extend(frame[k].iter().cloned());
                a
            })
            .collect();
        let g = Grid::from_unsorted(axes).expect("nonempty axes");
        g.vertices().any(|v| {
            let c = g.coords(v);
            s.in_boundary(&c) && x.dim_at(&c) > 0
        })
    }))
}

/// Drop every coordinate whose incoming steps are all identities (or, for a first coordinate,
/// whose values are all zero). The extension to `R^n` is unchanged.
pub fn compress(m: &GridModule) -> GridModule {
    let g = m.grid();
    let axes: Vec<Vec<Q>> = (0..g.n())
        .map(|k| {
            let mut droppable = vec![true; g.axis_len(k)];
            for v in g.vertices() {
                let i = g.coord_index(v, k);
                if !droppable[i] {
                    continue;
                }
                droppable[i] = if i == 0 {
                    m.dim(v) == 0
                } else {
                    let u = g.predecessor(v, k).unwrap();
                    m.dim(u) == m.dim(v) && m.step(k, u).unwrap().is_identity()
                };
            }
            let mut kept: Vec<Q> = g.axis(k).iter().zip(&droppable).filter(|(_, &d)| !d).map(|(c, _)| c.clone()).collect();
            if kept.is_empty() {
                kept.push(g.axis(k)[0].clone());
            }
            kept
        })
        .collect();
    if axes.iter().zip(g.axes()).all(|(a, b)| a.len() == b.len()) {
        return m.clone();
    }
    m.restriction_extension(&Grid::new(axes).expect("subsequence of a valid axis"))
}
