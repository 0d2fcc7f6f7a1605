//! Finite product grids in Q^n.
//!
//! Vertices are indexed lexicographically with the first axis most significant.

use crate::error::CoreError;
use crate::rational::Q;
use std::cmp::Ordering;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    axes: Vec<Vec<Q>>,
    strides: Vec<usize>,
    size: usize,
}

impl Grid {
    pub fn new(axes: Vec<Vec<Q>>) -> Result<Grid, CoreError> {
        if axes.is_empty() {
            return Err(CoreError::InvalidGrid("grid needs at least one axis".into()));
        }
        for (k, a) in axes.iter().enumerate() {
            if a.is_empty() {
                return Err(CoreError::InvalidGrid(format!("axis {k} is empty")));
            }
            if a.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CoreError::InvalidGrid(format!("axis {k} is not strictly increasing")));
            }
        }
        Ok(Self::from_sorted(axes))
    }

    fn from_sorted(axes: Vec<Vec<Q>>) -> Grid {
        let n = axes.len();
        let mut strides = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * axes[k + 1].len();
        }
        let size = axes.iter().map(|a| a.len()).product();
        Grid { axes, strides, size }
    }

    /// Sorts and deduplicates each axis first.
    pub fn from_unsorted(mut axes: Vec<Vec<Q>>) -> Result<Grid, CoreError> {
        for a in axes.iter_mut() {
            a.sort();
            a.dedup();
        }
        Grid::new(axes)
    }

    /// `{0, 1, ..., size-1}^n` scaled by `pitch`.
    pub fn regular(n: usize, size: usize, pitch: &Q) -> Grid {
        let axis: Vec<Q> = (0..size).map(|i| pitch * Q::from_integer(i.into())).collect();
        Grid::from_sorted(vec![axis; n])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Vec<Q>] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &[Q] {
        &self.axes[k]
    }

    #[inline]
    pub fn axis_len(&self, k: usize) -> usize {
        self.axes[k].len()
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn stride(&self, k: usize) -> usize {
        self.strides[k]
    }

    pub fn index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn multi(&self, mut v: usize) -> Vec<usize> {
        let mut out = vec![0; self.n()];
        for k in 0..self.n() {
            out[k] = v / self.strides[k];
            v %= self.strides[k];
        }
        out
    }

    #[inline]
    pub fn coord_index(&self, v: usize, k: usize) -> usize {
        (v / self.strides[k]) % self.axes[k].len()
    }

    pub fn coords(&self, v: usize) -> Vec<Q> {
        (0..self.n()).map(|k| self.axes[k][self.coord_index(v, k)].clone()).collect()
    }

    /// Index of the vertex at exactly these coordinates.
    pub fn vertex_at(&self, x: &[Q]) -> Option<usize> {
        let mut v = 0;
        for (k, c) in x.iter().enumerate() {
            v += self.axes[k].binary_search(c).ok()? * self.strides[k];
        }
        Some(v)
    }

    #[inline]
    pub fn successor(&self, v: usize, k: usize) -> Option<usize> {
        if self.coord_index(v, k) + 1 < self.axes[k].len() {
            Some(v + self.strides[k])
        } else {
            None
        }
    }

    #[inline]
    pub fn predecessor(&self, v: usize, k: usize) -> Option<usize> {
        if self.coord_index(v, k) > 0 {
            Some(v - self.strides[k])
        } else {
            None
        }
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        (0..self.n()).all(|k| self.coord_index(a, k) <= self.coord_index(b, k))
    }

    /// Largest axis index `i` with `axis[i] <= x`.
    pub fn floor_axis(&self, k: usize, x: &Q) -> Option<usize> {
        let a = &self.axes[k];
        let pos = a.partition_point(|c| c <= x);
        pos.checked_sub(1)
    }

    /// Largest axis index `i` with `axis[i] < x`.
    pub fn strict_floor_axis(&self, k: usize, x: &Q) -> Option<usize> {
        let a = &self.axes[k];
        let pos = a.partition_point(|c| c < x);
        pos.checked_sub(1)
    }

    /// Vertex `sup{p : p <= x}`, if any.
    pub fn floor(&self, x: &[Q]) -> Option<usize> {
        let mut v = 0;
        for (k, c) in x.iter().enumerate() {
            v += self.floor_axis(k, c)? * self.strides[k];
        }
        Some(v)
    }

    /// Vertex `sup{p : p_i < x_i for all i}`, if any.
    pub fn strict_floor(&self, x: &[Q]) -> Option<usize> {
        let mut v = 0;
        for (k, c) in x.iter().enumerate() {
            v += self.strict_floor_axis(k, c)? * self.strides[k];
        }
        Some(v)
    }

    /// Per-axis union of coordinates.
    pub fn union(&self, other: &Grid) -> Result<Grid, CoreError> {
        if self.n() != other.n() {
            return Err(CoreError::DimensionMismatch(self.n(), other.n()));
        }
        let axes = self
            .axes
            .iter()
            .zip(&other.axes)
            .map(|(a, b)| merge_sorted(a, b))
            .collect();
        Ok(Grid::from_sorted(axes))
    }

    /// Grid with the given extra coordinates inserted on each axis.
    pub fn with_coords(&self, extra: &[Vec<Q>]) -> Grid {
        let axes = self
            .axes
            .iter()
            .zip(extra)
            .map(|(a, e)| {
                let mut e = e.clone();
                e.sort();
                e.dedup();
                merge_sorted(a, &e)
            })
            .collect();
        Grid::from_sorted(axes)
    }

    /// Translate every axis by the corresponding offset.
    pub fn translate(&self, offset: &[Q]) -> Grid {
        let axes = self
            .axes
            .iter()
            .zip(offset)
            .map(|(a, o)| a.iter().map(|c| c + o).collect())
            .collect();
        Grid::from_sorted(axes)
    }

    /// Translate every axis by the same amount.
    pub fn translate_diag(&self, r: &Q) -> Grid {
        self.translate(&vec![r.clone(); self.n()])
    }

    pub fn mesh_widths(&self, k: usize) -> Vec<Q> {
        self.axes[k].windows(2).map(|w| &w[1] - &w[0]).collect()
    }

    /// Every axis of `self` is contained in the matching axis of `other`.
    pub fn is_subgrid_of(&self, other: &Grid) -> bool {
        self.n() == other.n()
            && self
                .axes
                .iter()
                .zip(&other.axes)
                .all(|(a, b)| a.iter().all(|c| b.binary_search(c).is_ok()))
    }

    /// For each axis `k` and each coordinate `c` of `self`, the floor index of `c + shift` in `other`.
    pub fn axis_floor_map(&self, other: &Grid, shift: &Q) -> AxisMap {
        let maps = self
            .axes
            .iter()
            .zip(&other.axes)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len());
                let mut j = 0usize;
                for c in a {
                    let x = c + shift;
                    while j < b.len() && b[j] <= x {
                        j += 1;
                    }
                    out.push(j.checked_sub(1));
                }
                out
            })
            .collect();
        AxisMap { maps, strides: other.strides.clone() }
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.size
    }
}

/// Per-axis floor lookup from one grid into another; vertex floors are assembled axis by axis.
#[derive(Clone, Debug)]
pub struct AxisMap {
    maps: Vec<Vec<Option<usize>>>,
    strides: Vec<usize>,
}

impl AxisMap {
    pub fn axis(&self, k: usize, i: usize) -> Option<usize> {
        self.maps[k][i]
    }

    /// Floor in the target grid of a source vertex given by its multi-index.
    pub fn floor(&self, multi: &[usize]) -> Option<usize> {
        let mut v = 0;
        for (k, &i) in multi.iter().enumerate() {
            v += self.maps[k][i]? * self.strides[k];
        }
        Some(v)
    }

    /// Floor for every vertex of `src` (which must be the grid this map was built from).
    pub fn floors(&self, src: &Grid) -> Vec<Option<usize>> {
        src.vertices().map(|v| self.floor(&src.multi(v))).collect()
    }
}

fn merge_sorted(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.cmp(y),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => unreachable!(),
        };
        match take {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    fn g() -> Grid {
        Grid::new(vec![vec![q(0), q(1), q(3)], vec![q(0), qr(1, 2)]]).unwrap()
    }

    #[test]
    fn indexing_roundtrip() {
        let g = g();
        assert_eq!(g.num_vertices(), 6);
        for v in g.vertices() {
            assert_eq!(g.index(&g.multi(v)), v);
        }
        assert_eq!(g.coords(3), vec![q(1), qr(1, 2)]);
        assert_eq!(g.successor(3, 1), None);
        assert_eq!(g.successor(3, 0), Some(5));
    }

    #[test]
    fn floors() {
        let g = g();
        assert_eq!(g.floor(&[q(2), q(5)]), Some(g.index(&[1, 1])));
        assert_eq!(g.floor(&[q(-1), q(5)]), None);
        assert_eq!(g.strict_floor(&[q(1), qr(1, 2)]), Some(g.index(&[0, 0])));
    }

    #[test]
    fn rejects_unsorted() {
        assert!(Grid::new(vec![vec![q(1), q(0)]]).is_err());
        assert!(Grid::new(vec![vec![]]).is_err());
    }

    #[test]
    fn union_and_map() {
        let a = Grid::new(vec![vec![q(0), q(2)]]).unwrap();
        let b = Grid::new(vec![vec![q(1), q(2), q(5)]]).unwrap();
        let u = a.union(&b).unwrap();
        assert_eq!(u.axis(0), &[q(0), q(1), q(2), q(5)]);
        let m = u.axis_floor_map(&a, &q(0));
        assert_eq!((0..4).map(|i| m.axis(0, i)).collect::<Vec<_>>(), vec![Some(0), Some(0), Some(1), Some(1)]);
        assert!(a.is_subgrid_of(&u) && !u.is_subgrid_of(&a));
    }
}
