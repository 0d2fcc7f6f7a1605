//! Exact computation of `Hom(M, N)` for modules on a common grid.
//!
//! Edges where both modules have invertible steps are contracted: a morphism is determined on
//! each such component by its value at the lexicographically smallest vertex (the root), and
//! the remaining edges give linear equations in the root blocks only.

use crate::error::CoreError;
use crate::field::{FieldConfig, Mat};
use crate::module::{GridModule, ModuleMorphism};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct HomSpace {
    source: Arc<GridModule>,
    target: Arc<GridModule>,
    comp: Vec<usize>,
    roots: Vec<usize>,
    offsets: Vec<usize>,
    /// `N(root) -> N(v)`
    a: Vec<Mat>,
    /// `M(v) -> M(root)`
    b: Vec<Mat>,
    free: Vec<usize>,
    basis: Vec<Vec<u32>>,
    num_unknowns: usize,
}

/// Basis of the space of natural transformations `source -> target`.
pub fn hom_space(source: &Arc<GridModule>, target: &Arc<GridModule>) -> Result<HomSpace, CoreError> {
    if !Arc::ptr_eq(source, target) {
        source.check_compatible(target)?;
    }
    HomSpace::build(source.clone(), target.clone())
}

impl HomSpace {
    fn build(source: Arc<GridModule>, target: Arc<GridModule>) -> Result<Self, CoreError> {
        let f = source.field();
        let g = source.grid().clone();
        let nv = g.num_vertices();
        let (m, n) = (&*source, &*target);

        let is_iso_edge = |k: usize, v: usize| -> bool {
            let (sm, sn) = (m.step(k, v).unwrap(), n.step(k, v).unwrap());
            sm.is_square() && sn.is_square() && sm.is_invertible(f) && sn.is_invertible(f)
        };

        let mut comp = vec![usize::MAX; nv];
        let mut roots = Vec::new();
        let mut a: Vec<Mat> = vec![Mat::default(); nv];
        let mut b: Vec<Mat> = vec![Mat::default(); nv];
        // tree[k][v]: edge v -> v+e_k is a spanning-forest edge
        let mut tree = vec![vec![false; nv]; g.n()];
        let mut iso = vec![vec![false; nv]; g.n()];
        for k in 0..g.n() {
            for v in g.vertices() {
                if g.successor(v, k).is_some() {
                    iso[k][v] = is_iso_edge(k, v);
                }
            }
        }
        let mut stack = Vec::new();
        for r in g.vertices() {
            if comp[r] != usize::MAX {
                continue;
            }
            let c = roots.len();
            roots.push(r);
            comp[r] = c;
            a[r] = Mat::identity(n.dim(r));
            b[r] = Mat::identity(m.dim(r));
            stack.push(r);
            while let Some(u) = stack.pop() {
                for k in 0..g.n() {
                    if let Some(w) = g.successor(u, k) {
                        if iso[k][u] && comp[w] == usize::MAX {
                            comp[w] = c;
                            a[w] = n.step(k, u).unwrap().mul(f, &a[u]);
                            b[w] = b[u].mul(f, &m.step(k, u).unwrap().inverse(f).unwrap());
                            tree[k][u] = true;
                            stack.push(w);
                        }
                    }
                    if let Some(w) = g.predecessor(u, k) {
                        if iso[k][w] && comp[w] == usize::MAX {
                            comp[w] = c;
                            a[w] = n.step(k, w).unwrap().inverse(f).unwrap().mul(f, &a[u]);
                            b[w] = b[u].mul(f, m.step(k, w).unwrap());
                            tree[k][w] = true;
                            stack.push(w);
                        }
                    }
                }
            }
        }
        let mut offsets = Vec::with_capacity(roots.len());
        let mut total = 0;
        for &r in &roots {
            offsets.push(total);
            total += n.dim(r) * m.dim(r);
        }

        let mut elim = Eliminator::new(f, total);
        let mut row: Vec<(usize, u32)> = Vec::new();
        for k in 0..g.n() {
            for u in g.vertices() {
                let Some(w) = g.successor(u, k) else { continue };
                if tree[k][u] || n.dim(w) == 0 || m.dim(u) == 0 {
                    continue;
                }
                let (ru, rw) = (comp[u], comp[w]);
                let ns = n.step(k, u).unwrap();
                let ms = m.step(k, u).unwrap();
                let c = ns.mul(f, &a[u]);
                let e = &a[w];
                let d = &b[u];
                let fm = b[w].mul(f, ms);
                if ru == rw && c == *e && *d == fm {
                    continue;
                }
                let (nru, mru) = (n.dim(roots[ru]), m.dim(roots[ru]));
                let (nrw, mrw) = (n.dim(roots[rw]), m.dim(roots[rw]));
                for i in 0..n.dim(w) {
                    for j in 0..m.dim(u) {
                        row.clear();
                        for aa in 0..nru {
                            let ci = c.get(i, aa);
                            if ci == 0 {
                                continue;
                            }
                            for bb in 0..mru {
                                let dj = d.get(bb, j);
                                if dj != 0 {
                                    row.push((offsets[ru] + aa * mru + bb, f.mul(ci, dj)));
                                }
                            }
                        }
                        for aa in 0..nrw {
                            let ei = e.get(i, aa);
                            if ei == 0 {
                                continue;
                            }
                            for bb in 0..mrw {
                                let fj = fm.get(bb, j);
                                if fj != 0 {
                                    row.push((offsets[rw] + aa * mrw + bb, f.neg(f.mul(ei, fj))));
                                }
                            }
                        }
                        if !row.is_empty() {
                            elim.add_row(&row);
                        }
                    }
                }
            }
        }
        let (free, basis) = elim.nullspace();
        Ok(HomSpace { source, target, comp, roots, offsets, a, b, free, basis, num_unknowns: total })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn source(&self) -> &Arc<GridModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GridModule> {
        &self.target
    }

    pub fn field(&self) -> FieldConfig {
        self.source.field()
    }

    /// Number of contracted components (one root block each).
    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    /// Full unknown vector (all root blocks) of basis element `i`.
    pub fn basis_vector(&self, i: usize) -> &[u32] {
        &self.basis[i]
    }

    /// Unknown vector of the linear combination with the given coordinates.
    pub fn vector_from_coords(&self, coords: &[u32]) -> Vec<u32> {
        assert_eq!(coords.len(), self.dim());
        let f = self.field();
        let mut x = vec![0u32; self.num_unknowns];
        for (c, bvec) in coords.iter().zip(&self.basis) {
            if *c == 0 {
                continue;
            }
            for (xi, bi) in x.iter_mut().zip(bvec) {
                if *bi != 0 {
                    *xi = f.add(*xi, f.mul(*c, *bi));
                }
            }
        }
        x
    }

    /// Coordinates of an unknown vector that lies in the solution space.
    pub fn coords_of_vector(&self, x: &[u32]) -> Vec<u32> {
        self.free.iter().map(|&c| x[c]).collect()
    }

    /// Root blocks `N(root) x M(root)` of an unknown vector.
    pub fn root_blocks(&self, x: &[u32]) -> Vec<Mat> {
        self.roots
            .iter()
            .zip(&self.offsets)
            .map(|(&r, &off)| {
                let (rows, cols) = (self.target.dim(r), self.source.dim(r));
                Mat::from_data(rows, cols, x[off..off + rows * cols].to_vec())
            })
            .collect()
    }

    pub fn vector_from_root_blocks(&self, blocks: &[Mat]) -> Vec<u32> {
        let mut x = Vec::with_capacity(self.num_unknowns);
        for b in blocks {
            x.extend_from_slice(b.data());
        }
        x
    }

    /// Components of the morphism with the given root blocks.
    pub fn morphism_from_root_blocks(&self, blocks: &[Mat]) -> ModuleMorphism {
        let f = self.field();
        let mats = (0..self.comp.len())
            .map(|v| {
                let c = self.comp[v];
                if v == self.roots[c] {
                    blocks[c].clone()
                } else {
                    self.a[v].mul(f, &blocks[c]).mul(f, &self.b[v])
                }
            })
            .collect();
        ModuleMorphism::new(self.source.clone(), self.target.clone(), mats).expect("shapes are consistent")
    }

    pub fn morphism_from_vector(&self, x: &[u32]) -> ModuleMorphism {
        self.morphism_from_root_blocks(&self.root_blocks(x))
    }

    pub fn morphism_from_coords(&self, coords: &[u32]) -> ModuleMorphism {
        self.morphism_from_vector(&self.vector_from_coords(coords))
    }

    pub fn basis_morphism(&self, i: usize) -> ModuleMorphism {
        self.morphism_from_vector(&self.basis[i])
    }

    pub fn basis_morphisms(&self) -> Vec<ModuleMorphism> {
        (0..self.dim()).map(|i| self.basis_morphism(i)).collect()
    }

    /// Root blocks read off a morphism.
    pub fn root_blocks_of(&self, m: &ModuleMorphism) -> Vec<Mat> {
        self.roots.iter().map(|&r| m.mat(r).clone()).collect()
    }

    /// Coordinates of `m`, or `None` if `m` is not in this hom space.
    pub fn coords_of(&self, m: &ModuleMorphism) -> Option<Vec<u32>> {
        let x = self.vector_from_root_blocks(&self.root_blocks_of(m));
        let coords = self.coords_of_vector(&x);
        let back = self.morphism_from_coords(&coords);
        (back.mats() == m.mats()).then_some(coords)
    }

    /// Pointwise invertibility of the morphism given by root blocks (each component is
    /// invertible everywhere iff it is at its root).
    pub fn root_blocks_invertible(&self, blocks: &[Mat]) -> bool {
        let f = self.field();
        blocks.iter().all(|b| b.is_invertible(f))
    }
}

/// Incremental sparse Gaussian elimination producing a nullspace basis.
struct Eliminator {
    f: FieldConfig,
    n: usize,
    pivot_row: Vec<Option<usize>>,
    rows: Vec<Vec<(usize, u32)>>,
    dense: Vec<u32>,
}

impl Eliminator {
    fn new(f: FieldConfig, n: usize) -> Self {
        Eliminator { f, n, pivot_row: vec![None; n], rows: Vec::new(), dense: vec![0; n] }
    }

    fn add_row(&mut self, row: &[(usize, u32)]) {
        if self.rows.len() == self.n {
            return;
        }
        let f = self.f;
        let mut lo = usize::MAX;
        let mut hi = 0;
        for &(c, v) in row {
            self.dense[c] = f.add(self.dense[c], v);
            lo = lo.min(c);
            hi = hi.max(c);
        }
        let mut col = lo;
        let mut pivot = None;
        while col <= hi {
            let val = self.dense[col];
            if val != 0 {
                match self.pivot_row[col] {
                    Some(pr) => {
                        let neg = f.neg(val);
                        for &(c, v) in &self.rows[pr] {
                            self.dense[c] = f.add(self.dense[c], f.mul(neg, v));
                            hi = hi.max(c);
                        }
                    }
                    None => {
                        pivot = Some(col);
                        break;
                    }
                }
            }
            col += 1;
        }
        if let Some(p) = pivot {
            let inv = f.inv(self.dense[p]).unwrap();
            let mut r = Vec::new();
            for c in p..=hi {
                let v = self.dense[c];
                if v != 0 {
                    r.push((c, f.mul(v, inv)));
                }
            }
            self.pivot_row[p] = Some(self.rows.len());
            self.rows.push(r);
        }
        for c in lo..=hi.max(lo) {
            if c < self.n {
                self.dense[c] = 0;
            }
        }
    }

    fn nullspace(&self) -> (Vec<usize>, Vec<Vec<u32>>) {
        let f = self.f;
        let free: Vec<usize> = (0..self.n).filter(|&c| self.pivot_row[c].is_none()).collect();
        let pivots: Vec<usize> = (0..self.n).rev().filter(|&c| self.pivot_row[c].is_some()).collect();
        let basis = free
            .iter()
            .map(|&fc| {
                let mut x = vec![0u32; self.n];
                x[fc] = 1;
                for &pc in &pivots {
                    let row = &self.rows[self.pivot_row[pc].unwrap()];
                    let mut s = 0u32;
                    for &(c, v) in &row[1..] {
                        if x[c] != 0 {
                            s = f.add(s, f.mul(v, x[c]));
                        }
                    }
                    x[pc] = f.neg(s);
                }
                x
            })
            .collect();
        (free, basis)
    }
}
