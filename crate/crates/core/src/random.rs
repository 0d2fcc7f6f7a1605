//! Seeded random modules for tests and experiments.
//!
//! Modules are built as cokernels of random maps between sums of free modules, so every
//! output is a valid functor by construction; a random basis change then scrambles the steps.

use crate::field::{FieldConfig, Mat};
use crate::grid::Grid;
use crate::module::GridModule;
use crate::rational::q;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random module on `{0..size-1}^n` with pointwise dimension at most `max_dim`.
pub fn random_module(field: FieldConfig, n: usize, size: usize, max_dim: usize, seed: u64) -> GridModule {
    let mut rng = rng_from_seed(seed);
    random_module_rng(field, &Grid::regular(n, size, &q(1)), max_dim, &mut rng)
}

/// Random finitely presented module on `grid`.
pub fn random_module_rng(field: FieldConfig, grid: &Grid, max_dim: usize, rng: &mut impl Rng) -> GridModule {
    let nv = grid.num_vertices();
    let ngen = if max_dim == 0 { 0 } else { rng.gen_range(1..=max_dim) };
    let gens: Vec<usize> = (0..ngen).map(|_| rng.gen_range(0..nv)).collect();
    let nrel = rng.gen_range(0..=ngen + 1);
    let rels: Vec<(usize, Vec<u32>)> = (0..nrel)
        .map(|_| {
            let at = rng.gen_range(0..nv);
            let coeffs = gens
                .iter()
                .map(|&g| if grid.leq(g, at) && rng.gen_bool(0.7) { rng.gen_range(0..field.p()) } else { 0 })
                .collect();
            (at, coeffs)
        })
        .collect();
    presented_module(field, grid, &gens, &rels)
}

/// Cokernel of the relations (each an element of the free module on `gens` at a vertex).
pub fn presented_module(field: FieldConfig, grid: &Grid, gens: &[usize], rels: &[(usize, Vec<u32>)]) -> GridModule {
    let ngen = gens.len();
    // per vertex: reduced relation rows and quotient columns
    let mut reduced: Vec<(Mat, Vec<usize>)> = Vec::with_capacity(grid.num_vertices());
    let mut basis: Vec<Vec<usize>> = Vec::with_capacity(grid.num_vertices());
    for v in grid.vertices() {
        let rows: Vec<u32> = rels
            .iter()
            .filter(|(at, _)| grid.leq(*at, v))
            .flat_map(|(_, c)| c.iter().copied())
            .collect();
        let r = Mat::from_data(rows.len() / ngen.max(1), ngen, if ngen == 0 { vec![] } else { rows });
        let (e, piv) = r.rref(field);
        let cols: Vec<usize> = (0..ngen).filter(|&i| grid.leq(gens[i], v) && !piv.contains(&i)).collect();
        basis.push(cols);
        reduced.push((e, piv));
    }
    let dims: Vec<usize> = basis.iter().map(|b| b.len()).collect();
    GridModule::from_fn(field, grid.clone(), dims, |_, v, w| {
        let (e, piv) = &reduced[w];
        let mut m = Mat::zeros(basis[w].len(), basis[v].len());
        for (j, &c) in basis[v].iter().enumerate() {
            let mut x = vec![0u32; ngen];
            x[c] = 1;
            for (i, &pc) in piv.iter().enumerate() {
                let t = x[pc];
                if t != 0 {
                    for col in 0..ngen {
                        x[col] = field.sub(x[col], field.mul(t, e.get(i, col)));
                    }
                }
            }
            for (i, &c2) in basis[w].iter().enumerate() {
                m.set(i, j, x[c2]);
            }
        }
        m
    })
    .expect("presented modules are functors")
}

pub fn random_invertible(field: FieldConfig, d: usize, rng: &mut impl Rng) -> Mat {
    loop {
        let data = (0..d * d).map(|_| rng.gen_range(0..field.p())).collect();
        let m = Mat::from_data(d, d, data);
        if m.is_invertible(field) {
            return m;
        }
    }
}

/// Random pointwise basis change; returns the new module and the change matrices
/// (an isomorphism from the input to the output).
pub fn random_basis_change(m: &GridModule, rng: &mut impl Rng) -> (GridModule, Vec<Mat>) {
    let t: Vec<Mat> = m.dims().iter().map(|&d| random_invertible(m.field(), d, rng)).collect();
    (m.conjugate(&t).expect("invertible change"), t)
}
