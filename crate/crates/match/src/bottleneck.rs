use crate::hk::max_bipartite_matching;
use crate::MatchError;
use num_traits::Signed;
use pmod_core::iso::{is_isomorphic, IsoOutcome};
use pmod_core::{GridModule, Q};
use pmod_interleave::{
    direct_sum_certificates, iso_certificate, local_change_certificate, rank_lower_bound, triviality_radius, weaken,
    zero_certificate, Bound, Certificate, HalfOpenBox, TrivialRegion,
};
use std::sync::Arc;

/// One side of a matched pair: a summand by index or a zero padding slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Summand(usize),
    Zero,
}

/// The search result for one candidate pair.
#[derive(Clone, Debug)]
pub struct EdgeReport {
    pub left: Slot,
    pub right: Slot,
    /// Rank lower bound on the distance between the two sides.
    pub obstruction: Bound,
    pub certificate: Option<Certificate>,
}

#[derive(Clone, Debug)]
pub struct MatchOutcome {
    /// A perfect matching of the padded decompositions was found; this certifies `d_B ≤ ε`.
    /// `false` is not a lower bound.
    pub matched: bool,
    pub left: Vec<Arc<GridModule>>,
    pub right: Vec<Arc<GridModule>>,
    /// Matched pairs other than zero with zero.
    pub pairs: Vec<(Slot, Slot)>,
    /// One certificate per entry of `pairs`, all at ε.
    pub certificates: Vec<Certificate>,
    /// Direct sum of the pair certificates, between the sums of the matched sides.
    pub assembled: Option<Certificate>,
    pub edges: Vec<EdgeReport>,
}

fn differing_cells(x: &GridModule, y: &GridModule) -> Result<TrivialRegion, MatchError> {
    let (xr, yr) = pmod_core::iso::refine_pair(x, y)?;
    let g = xr.grid();
    let mut bad: Vec<bool> = g.vertices().map(|v| xr.dim(v) != yr.dim(v)).collect();
    // maps only need to agree between cells that are both kept
    for v in g.vertices() {
        for k in 0..g.n() {
            if let Some(w) = g.successor(v, k) {
                if !bad[v] && !bad[w] && xr.step(k, v) != yr.step(k, v) {
                    bad[v] = true;
                }
            }
        }
    }
    let mut boxes = Vec::new();
    for v in g.vertices().filter(|&v| bad[v]) {
        let hi = (0..g.n()).map(|k| g.axis(k).get(g.coord_index(v, k) + 1).cloned()).collect();
        boxes.push(HalfOpenBox::new(g.coords(v), hi));
    }
    Ok(TrivialRegion::from_boxes(boxes))
}

/// A certificate between `x` and `y` at exactly `ε`, if one of the constructions applies: an
/// isomorphism, or agreement outside an ε-trivial set of cells.
pub fn edge_certificate(x: &Arc<GridModule>, y: &Arc<GridModule>, eps: &Q) -> Result<Option<Certificate>, MatchError> {
    if eps.is_negative() {
        return Err(MatchError::NegativeEps);
    }
    if let IsoOutcome::Isomorphic(iso) = is_isomorphic(x, y)? {
        let c = iso_certificate(x, y, &iso)?;
        return Ok(Some(weaken(&c, eps)?));
    }
    if eps.is_positive() {
        let region = differing_cells(x, y)?;
        if region.is_eps_trivial(eps) {
            if let Ok(c) = local_change_certificate(x, y, &region, eps) {
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

fn to_zero(x: &Arc<GridModule>, eps: &Q) -> Result<Option<Certificate>, MatchError> {
    let two = eps * Q::from_integer(2.into());
    if triviality_radius(x).is_some_and(|r| r <= two) {
        Ok(Some(zero_certificate(x, eps)?))
    } else {
        Ok(None)
    }
}

fn zero_edge(x: &Arc<GridModule>, eps: &Q) -> Result<(Bound, Option<Certificate>), MatchError> {
    let z = GridModule::zero(x.field(), x.grid().clone());
    Ok((rank_lower_bound(x, &z), to_zero(x, eps)?))
}

/// Search for an ε-matching between decompositions of `M` and `N`, both padded with zero
/// summands, using only verified certificates as edges.
pub fn bottleneck_upper_bound(m: &GridModule, n: &GridModule, eps: &Q) -> Result<MatchOutcome, MatchError> {
    if eps.is_negative() {
        return Err(MatchError::NegativeEps);
    }
    let summands = |x: &GridModule| -> Result<Vec<Arc<GridModule>>, MatchError> {
        if x.is_zero() {
            Ok(vec![])
        } else {
            Ok(pmod_decomp::decompose(x)?.summands)
        }
    };
    let left = summands(m)?;
    let right = summands(n)?;
    let (a, b) = (left.len(), right.len());
    // left slots: summands of M then b zeros; right slots: summands of N then a zeros
    let slot_l = |i: usize| if i < a { Slot::Summand(i) } else { Slot::Zero };
    let slot_r = |j: usize| if j < b { Slot::Summand(j) } else { Slot::Zero };
    let size = a + b;
    let mut adj = vec![Vec::new(); size];
    let mut edges = Vec::new();
    let mut cert_of = std::collections::HashMap::new();
    let zero_l: Vec<(Bound, Option<Certificate>)> = left.iter().map(|x| zero_edge(x, eps)).collect::<Result<_, _>>()?;
    let zero_r: Vec<(Bound, Option<Certificate>)> = right.iter().map(|x| zero_edge(x, eps)).collect::<Result<_, _>>()?;
    for i in 0..size {
        for j in 0..size {
            let (l, r) = (slot_l(i), slot_r(j));
            let (obstruction, certificate) = match (l, r) {
                (Slot::Zero, Slot::Zero) => {
                    adj[i].push(j);
                    continue;
                }
                (Slot::Summand(p), Slot::Summand(q)) => {
                    let lb = rank_lower_bound(&left[p], &right[q]);
                    let c = if lb.le(eps) { edge_certificate(&left[p], &right[q], eps)? } else { None };
                    (lb, c)
                }
                (Slot::Summand(p), Slot::Zero) => zero_l[p].clone(),
                (Slot::Zero, Slot::Summand(q)) => {
                    let (lb, c) = &zero_r[q];
                    (lb.clone(), c.as_ref().map(|c| c.reversed()))
                }
            };
            if let Some(c) = &certificate {
                adj[i].push(j);
                cert_of.insert((i, j), c.clone());
            }
            // zero slots are interchangeable; report each summand against one of them
            if !(matches!(l, Slot::Zero) && i > a) && !(matches!(r, Slot::Zero) && j > b) {
                edges.push(EdgeReport { left: l, right: r, obstruction, certificate });
            }
        }
    }
    let mate = max_bipartite_matching(&adj, size);
    let matched = mate.iter().all(|m| m.is_some());
    let mut pairs = Vec::new();
    let mut certificates = Vec::new();
    if matched {
        for (i, mj) in mate.iter().enumerate() {
            let j = mj.unwrap();
            if let Some(c) = cert_of.get(&(i, j)) {
                pairs.push((slot_l(i), slot_r(j)));
                certificates.push(c.clone());
            }
        }
    }
    let assembled = match certificates.split_first() {
        Some((first, rest)) if matched => {
            let mut acc = first.clone();
            for c in rest {
                acc = direct_sum_certificates(&acc, c)?;
            }
            Some(acc)
        }
        _ => None,
    };
    Ok(MatchOutcome { matched, left, right, pairs, certificates, assembled, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use pmod_core::random::{random_basis_change, rng_from_seed};
    use pmod_core::rational::{q, qr};
    use pmod_core::FieldConfig;
    use pmod_interleave::sum_modules;

    fn f() -> FieldConfig {
        FieldConfig::new(65521).unwrap()
    }

    #[test]
    fn a_module_matches_itself_at_zero() {
        let a = GridModule::interval_module(f(), &[q(0), q(0)], &[q(2), q(2)]).unwrap();
        let b = GridModule::interval_module(f(), &[q(1), q(0)], &[q(3), q(1)]).unwrap();
        let s = sum_modules(&a, &b).unwrap();
        let (t, _) = random_basis_change(&s, &mut rng_from_seed(3));
        let out = bottleneck_upper_bound(&s, &t, &q(0)).unwrap();
        assert!(out.matched);
        assert_eq!(out.pairs.len(), 2);
        assert!(out.assembled.unwrap().verify().is_ok());
    }

    #[test]
    fn small_summands_go_to_zero() {
        let a = GridModule::interval_module(f(), &[q(0), q(0)], &[q(4), q(4)]).unwrap();
        let t = GridModule::box_module(f(), &[q(5), q(5)], &[qr(11, 2), qr(11, 2)]).unwrap();
        let m = sum_modules(&a, &t).unwrap();
        let out = bottleneck_upper_bound(&m, &a, &qr(1, 4)).unwrap();
        assert!(out.matched);
        assert!(out.pairs.contains(&(Slot::Summand(0), Slot::Zero)));
        let out = bottleneck_upper_bound(&m, &a, &qr(1, 8)).unwrap();
        assert!(!out.matched);
        let e = out.edges.iter().find(|e| e.left == Slot::Summand(0) && e.right == Slot::Zero).unwrap();
        assert_eq!(e.obstruction, Bound::Finite(qr(1, 4)));
    }

    #[test]
    fn nearby_intervals_are_matched_by_a_local_change() {
        let a = Arc::new(GridModule::box_module(f(), &[q(0), q(0)], &[q(4), q(4)]).unwrap());
        let b = Arc::new(GridModule::box_module(f(), &[q(0), q(0)], &[qr(9, 2), q(4)]).unwrap());
        let c = edge_certificate(&a, &b, &qr(1, 2)).unwrap().unwrap();
        assert_eq!(c.eps(), &qr(1, 2));
        assert!(edge_certificate(&a, &b, &qr(1, 4)).unwrap().is_none());
    }
}
