use pmod_core::json::{module_from_str, module_to_string};
use pmod_core::random::{random_basis_change, random_module, rng_from_seed};
use pmod_core::rational::{q, qr};
use pmod_core::{hom_space, is_isomorphic, FieldConfig, Grid, GridModule};
use proptest::prelude::*;
use std::sync::Arc;

fn f() -> FieldConfig {
    FieldConfig::new(65521).unwrap()
}

#[test]
fn hooks_and_boxes_differ_only_above_the_upper_corner() {
    let a = [q(0), q(0)];
    let b = [q(2), q(2)];
    let hook = GridModule::interval_module(f(), &a, &b).unwrap();
    let boxm = GridModule::box_module(f(), &a, &b).unwrap();
    for (x, y, h, bx) in [(1, 1, 1, 1), (3, 1, 1, 0), (1, 5, 1, 0), (2, 2, 0, 0), (-1, 0, 0, 0)] {
        let p = [q(x), q(y)];
        assert_eq!((hook.dim_at(&p), boxm.dim_at(&p)), (h, bx), "at ({x}, {y})");
    }
}

#[test]
fn hom_into_a_double_is_two_dimensional() {
    let x = Arc::new(GridModule::interval_module(f(), &[q(0), q(0)], &[q(2), q(1)]).unwrap());
    let xx = Arc::new(x.direct_sum(&x).unwrap());
    assert_eq!(hom_space(&x, &xx).unwrap().dim(), 2);
    assert_eq!(hom_space(&xx, &xx).unwrap().dim(), 4);
}

#[test]
fn restriction_to_a_finer_grid_keeps_values() {
    let m = random_module(f(), 2, 3, 2, 17);
    let fine = m.grid().union(&Grid::regular(2, 5, &qr(1, 2))).unwrap();
    let r = m.restriction_extension(&fine);
    for v in fine.vertices() {
        let x = fine.coords(v);
        assert_eq!(r.dim_at(&x), m.dim_at(&x));
    }
    r.validate().unwrap();
}

#[test]
fn translation_is_the_shift() {
    let m = GridModule::box_module(f(), &[q(0), q(0)], &[q(1), q(1)]).unwrap();
    let t = m.translate(&[qr(1, 2), q(3)]);
    assert_eq!(t.dim_at(&[-qr(1, 2), q(-3)]), 1);
    assert_eq!(t.dim_at(&[q(0), q(0)]), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_modules_are_functors(seed in 0u64..100_000, size in 2usize..5, max_dim in 1usize..4) {
        let m = random_module(f(), 2, size, max_dim, seed);
        prop_assert!(m.validate().is_ok());
        prop_assert!(m.dims().iter().all(|&d| d <= max_dim));
    }

    #[test]
    fn basis_changes_are_isomorphisms(seed in 0u64..100_000) {
        let m = random_module(f(), 2, 3, 3, seed);
        let (c, _) = random_basis_change(&m, &mut rng_from_seed(seed + 1));
        prop_assert!(c.validate().is_ok());
        prop_assert!(is_isomorphic(&m, &c).unwrap().is_iso());
    }

    #[test]
    fn json_round_trip(seed in 0u64..100_000, p in prop::sample::select(vec![2u32, 3, 7, 65521])) {
        let m = random_module(FieldConfig::new(p).unwrap(), 2, 3, 2, seed);
        let s = module_to_string(&m);
        let back = module_from_str(&s).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(module_to_string(&back), s);
    }
}
