//! The gadget module `G` on `{0,…,4}²`.

use pmod_core::rational::q;
use pmod_core::{FieldConfig, Grid, GridModule, Mat};

const DIMS: [[usize; 5]; 5] = [
    // indexed [y][x]
    [0, 0, 0, 1, 1],
    [0, 0, 1, 2, 1],
    [0, 1, 2, 2, 1],
    [1, 2, 2, 2, 1],
    [1, 1, 1, 1, 1],
];

fn step(f: FieldConfig, k: usize, x: usize, y: usize) -> Mat {
    let (x2, y2) = if k == 0 { (x + 1, y) } else { (x, y + 1) };
    let (d, d2) = (DIMS[y][x], DIMS[y2][x2]);
    if d == 0 {
        return Mat::zeros(d2, 0);
    }
    let col = |a: i64, b: i64| Mat::column(f, &[a, b]);
    let diff = || Mat::row(f, &[1, -1]);
    match (k, x, y) {
        (1, 0, 3) | (0, 3, 0) => Mat::zeros(1, 1),
        (0, 0, 3) | (1, 3, 0) => col(1, 1),
        (1, 1..=3, 3) | (0, 3, 1..=3) => diff(),
        (1, 1, 2) | (0, 1, 2) => col(1, 0),
        (1, 2, 1) | (0, 2, 1) => col(0, 1),
        _ => Mat::identity(d),
    }
}

/// `G` over `field`, with `G(x, y)` stored at the grid vertex `(x, y)`.
pub fn module_g(field: FieldConfig) -> GridModule {
    let grid = Grid::regular(2, 5, &q(1));
    let dims: Vec<usize> = grid
        .vertices()
        .map(|v| DIMS[grid.coord_index(v, 1)][grid.coord_index(v, 0)])
        .collect();
    let g2 = grid.clone();
    GridModule::from_fn(field, grid, dims, |k, v, _| step(field, k, g2.coord_index(v, 0), g2.coord_index(v, 1)))
        .expect("the gadget is a valid module")
}

/// The structure map `G(x, y) -> G(4, 4) = 𝕜`.
pub fn gadget_map_to_top(g: &GridModule, x: usize, y: usize) -> Mat {
    let grid = g.grid();
    g.structure_map(grid.index(&[x, y]), grid.index(&[4, 4])).expect("ordered vertices")
}

pub(crate) fn gadget_dim(x: usize, y: usize) -> usize {
    DIMS[y][x]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn displayed_values() {
        let f = FieldConfig::new(65521).unwrap();
        let g = module_g(f);
        assert!(g.validate().is_ok());
        let at = |x: usize, y: usize| g.grid().index(&[x, y]);
        assert_eq!(g.dim(at(2, 2)), 2);
        assert_eq!(g.dim(at(0, 0)), 0);
        assert_eq!(g.dim(at(4, 4)), 1);
        assert_eq!(g.total_dim(), 25);
        assert!(g.structure_map(at(3, 0), at(4, 0)).unwrap().is_zero());
        assert!(g.structure_map(at(0, 3), at(0, 4)).unwrap().is_zero());
        assert_eq!(gadget_map_to_top(&g, 1, 2), Mat::identity(1));
    }

    #[test]
    fn endomorphisms_are_scalars() {
        for p in [2, 3, 65521] {
            let f = FieldConfig::new(p).unwrap();
            let g = Arc::new(module_g(f));
            assert_eq!(pmod_core::hom_space(&g, &g).unwrap().dim(), 1, "p = {p}");
        }
    }
}
