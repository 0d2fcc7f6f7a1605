use crate::MatchError;
use num_traits::Signed;
use pmod_core::{GridModule, Q};
use pmod_interleave::is_strictly_eps_trivial;
use std::sync::Arc;

/// Outcome of the ε-indecomposability test with its witness splitting.
#[derive(Clone, Debug)]
pub struct EpsIndecomposable {
    pub holds: bool,
    /// Set for the zero module, which has no indecomposable summand and is reported as failing.
    pub zero_module: bool,
    /// The indecomposable part when `holds`.
    pub indecomposable: Option<Arc<GridModule>>,
    /// Strictly ε-trivial summands other than the indecomposable part.
    pub trivial: Vec<Arc<GridModule>>,
    /// Summands that are not strictly ε-trivial.
    pub nontrivial: usize,
}

/// Whether `M ≅ X ⊕ T` with `X` indecomposable and `T` strictly ε-trivial.
pub fn is_eps_indecomposable(m: &GridModule, eps: &Q) -> Result<EpsIndecomposable, MatchError> {
    if !eps.is_positive() {
        return Err(MatchError::NonPositiveEps);
    }
    if m.is_zero() {
        return Ok(EpsIndecomposable { holds: false, zero_module: true, indecomposable: None, trivial: vec![], nontrivial: 0 });
    }
    let dec = pmod_decomp::decompose(m)?;
    let mut hard = Vec::new();
    let mut soft = Vec::new();
    for x in dec.summands {
        if is_strictly_eps_trivial(&x, eps)? {
            soft.push(x);
        } else {
            hard.push(x);
        }
    }
    let nontrivial = hard.len();
    let holds = nontrivial <= 1;
    let indecomposable = if nontrivial == 1 {
        hard.pop()
    } else if nontrivial == 0 {
        // every summand is strictly trivial; the largest one plays the indecomposable part
        soft.pop()
    } else {
        None
    };
    Ok(EpsIndecomposable { holds, zero_module: false, indecomposable, trivial: soft, nontrivial })
}

#[cfg(test)]
mod tests {
    use super::*;
    use pmod_construct::module_g;
    use pmod_core::rational::{q, qr};
    use pmod_core::{FieldConfig, Grid};
    use pmod_interleave::sum_modules;

    fn f() -> FieldConfig {
        FieldConfig::new(65521).unwrap()
    }

    #[test]
    fn gadget_plus_small_interval() {
        let g = module_g(f());
        let t = GridModule::interval_module(f(), &[q(0), q(0)], &[qr(1, 4), qr(1, 4)]).unwrap();
        let r = is_eps_indecomposable(&sum_modules(&g, &t).unwrap(), &qr(1, 2)).unwrap();
        assert!(r.holds);
        assert_eq!(r.trivial.len(), 1);
        assert!(pmod_core::is_isomorphic(&r.indecomposable.unwrap(), &g).unwrap().is_iso());
    }

    #[test]
    fn two_gadgets_fail() {
        let g = module_g(f());
        let r = is_eps_indecomposable(&sum_modules(&g, &g).unwrap(), &qr(1, 2)).unwrap();
        assert!(!r.holds);
        assert_eq!(r.nontrivial, 2);
    }

    #[test]
    fn zero_is_flagged() {
        let z = GridModule::zero(f(), Grid::regular(2, 2, &q(1)));
        let r = is_eps_indecomposable(&z, &q(1)).unwrap();
        assert!(!r.holds && r.zero_module);
        assert!(is_eps_indecomposable(&z, &q(0)).is_err());
    }

    #[test]
    fn monotone_in_eps() {
        let a = GridModule::interval_module(f(), &[q(0), q(0)], &[q(1), q(1)]).unwrap();
        let b = GridModule::interval_module(f(), &[q(2), q(2)], &[q(4), q(4)]).unwrap();
        let s = sum_modules(&a, &b).unwrap();
        let flags: Vec<bool> = [qr(1, 2), q(1), qr(3, 2), q(3)]
            .iter()
            .map(|e| is_eps_indecomposable(&s, e).unwrap().holds)
            .collect();
        assert_eq!(flags, vec![false, false, true, true]);
    }
}
