use crate::MatchError;
use num_traits::{Signed, Zero};
use pmod_construct::tack;
use pmod_core::{GridModule, Q};
use pmod_interleave::{compose_certificates, iso_certificate, rank_lower_bound, sum_certificates, Bound, Certificate};
use std::sync::Arc;

/// Lower bound for the matchings that pair the tacked module with summand `partner`
/// (`None`: with a zero slot) and send every other summand to zero.
#[derive(Clone, Debug)]
pub struct CandidateBound {
    pub partner: Option<usize>,
    pub bound: Bound,
}

#[derive(Clone, Debug)]
pub struct InstabilityReport {
    pub summands: Vec<Arc<GridModule>>,
    /// The indecomposable obtained by tacking the summands together.
    pub tacked: Arc<GridModule>,
    /// From `M` to `tacked`.
    pub certificate: Certificate,
    pub candidates: Vec<CandidateBound>,
    /// Minimum over the candidates: no ε-matching exists for ε below it.
    pub bottleneck_lower: Bound,
}

impl InstabilityReport {
    pub fn interleaving_upper(&self) -> &Q {
        self.certificate.eps()
    }

    /// `d_B` lower bound over `d_I` upper bound; `None` if the lower bound is infinite.
    pub fn gap(&self) -> Option<Q> {
        match &self.bottleneck_lower {
            Bound::Finite(b) if !self.interleaving_upper().is_zero() => Some(b / self.interleaving_upper()),
            _ => None,
        }
    }

    /// Whether every ε-matching between the decompositions is ruled out at `ε`.
    pub fn excludes(&self, eps: &Q) -> bool {
        self.candidates.iter().all(|c| !c.bound.le(eps) && c.bound != Bound::Finite(eps.clone()))
    }
}

/// Tack the summands of a decomposable `M` into one indecomposable within `δ` of `M`, and bound
/// the bottleneck distance between the two decompositions from below by rank obstructions.
pub fn instability_demo(m: &Arc<GridModule>, delta: &Q) -> Result<InstabilityReport, MatchError> {
    if !delta.is_positive() {
        return Err(MatchError::NonPositiveEps);
    }
    if m.is_zero() {
        return Err(MatchError::Precondition("M is zero".into()));
    }
    let dec = pmod_decomp::decompose(m)?;
    let k = dec.len();
    if k < 2 {
        return Err(MatchError::Precondition("M is indecomposable".into()));
    }
    let xs = dec.summands.clone();
    let step = delta / Q::from_integer(((k - 1) as i64).into());
    let first = tack(&xs[0], &xs[1], &step)?;
    let mut acc = first.certificate;
    let mut cur = first.module;
    for x in &xs[2..] {
        let rep = tack(&cur, x, &step)?;
        acc = compose_certificates(&sum_certificates(&acc, x)?, &rep.certificate)?;
        cur = rep.module;
    }
    let certificate = compose_certificates(&iso_certificate(m, dec.sum(), &dec.iso)?, &acc)?;

    let zero_of = |x: &GridModule| GridModule::zero(x.field(), x.grid().clone());
    let to_zero: Vec<Bound> = xs.iter().map(|x| rank_lower_bound(x, &zero_of(x))).collect();
    let others = |skip: Option<usize>| {
        to_zero
            .iter()
            .enumerate()
            .filter(|(j, _)| Some(*j) != skip)
            .fold(Bound::zero(), |acc, (_, b)| acc.max(b.clone()))
    };
    let mut candidates: Vec<CandidateBound> = (0..k)
        .map(|i| CandidateBound { partner: Some(i), bound: rank_lower_bound(&xs[i], &cur).max(others(Some(i))) })
        .collect();
    candidates.push(CandidateBound { partner: None, bound: rank_lower_bound(&cur, &zero_of(&cur)).max(others(None)) });
    let bottleneck_lower = candidates
        .iter()
        .map(|c| c.bound.clone())
        .min_by(|a, b| a.partial_cmp(b).expect("total order"))
        .expect("at least one candidate");
    Ok(InstabilityReport { summands: xs, tacked: cur, certificate, candidates, bottleneck_lower })
}

#[cfg(test)]
mod tests {
    use super::*;
    use pmod_core::rational::{q, qr};
    use pmod_core::FieldConfig;
    use pmod_interleave::sum_modules;

    fn f() -> FieldConfig {
        FieldConfig::new(65521).unwrap()
    }

    fn hooks(far: i64) -> Arc<GridModule> {
        let a = GridModule::interval_module(f(), &[q(0), q(0)], &[q(2), q(2)]).unwrap();
        let b = GridModule::interval_module(f(), &[q(far), q(far)], &[q(far + 2), q(far + 2)]).unwrap();
        Arc::new(sum_modules(&a, &b).unwrap())
    }

    #[test]
    fn two_separated_hooks() {
        let rep = instability_demo(&hooks(10), &qr(1, 10)).unwrap();
        assert!(rep.interleaving_upper() < &qr(1, 10));
        assert!(rep.certificate.verify().is_ok());
        assert!(pmod_decomp::is_indecomposable(&rep.tacked).unwrap());
        assert!(rep.excludes(&qr(9, 10)));
        assert!(rep.gap().unwrap() >= q(9));
    }

    #[test]
    fn indecomposable_is_refused() {
        let a = Arc::new(GridModule::interval_module(f(), &[q(0), q(0)], &[q(2), q(2)]).unwrap());
        assert!(matches!(instability_demo(&a, &q(1)), Err(MatchError::Precondition(_))));
    }
}
