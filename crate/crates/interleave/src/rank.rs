//! Rank obstructions: lower bounds on the interleaving distance.
//!
//! If `M` and `N` are δ-interleaved and `x + δ <= y - δ`, then `φ^M_{x,y}` factors through
//! `φ^N_{x+δ, y-δ}`, so its rank is at most the latter's. Any δ violating this inequality is
//! a lower bound on `d_I(M, N)`.

use num_traits::Zero;
use pmod_core::{GridModule, Q};
use std::cmp::Ordering;

/// Default cap on the number of (vertex, cell) pairs examined per direction.
pub const DEFAULT_PAIR_BUDGET: usize = 4000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    Finite(Q),
    Infinite,
}

impl Bound {
    pub fn zero() -> Self {
        Bound::Finite(Q::zero())
    }

    /// Whether the bound is at most `eps`.
    pub fn le(&self, eps: &Q) -> bool {
        matches!(self, Bound::Finite(b) if b <= eps)
    }

    pub fn max(self, other: Bound) -> Bound {
        match (self, other) {
            (Bound::Infinite, _) | (_, Bound::Infinite) => Bound::Infinite,
            (Bound::Finite(a), Bound::Finite(b)) => Bound::Finite(if a >= b { a } else { b }),
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(match (self, other) {
            (Bound::Infinite, Bound::Infinite) => Ordering::Equal,
            (Bound::Infinite, _) => Ordering::Greater,
            (_, Bound::Infinite) => Ordering::Less,
            (Bound::Finite(a), Bound::Finite(b)) => a.cmp(b),
        })
    }
}

pub fn rank_lower_bound(m: &GridModule, n: &GridModule) -> Bound {
    rank_lower_bound_with(m, n, DEFAULT_PAIR_BUDGET)
}

pub fn rank_lower_bound_with(m: &GridModule, n: &GridModule, budget: usize) -> Bound {
    one_way(m, n, budget).max(one_way(n, m, budget))
}

fn one_way(x: &GridModule, y: &GridModule, budget: usize) -> Bound {
    let g = x.grid();
    let support = x.support();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    'outer: for &a in &support {
        for &b in &support {
            if g.leq(a, b) {
                pairs.push((a, b));
                if pairs.len() > budget {
                    pairs = support.iter().map(|&a| (a, a)).collect();
                    break 'outer;
                }
            }
        }
    }
    let mut best = Bound::zero();
    for (a, b) in pairs {
        let r = x.structure_map(a, b).expect("ordered").rank(x.field());
        if r == 0 {
            continue;
        }
        let lo = g.coords(a);
        let hi: Vec<Option<Q>> = (0..g.n())
            .map(|k| g.axis(k).get(g.coord_index(b, k) + 1).cloned())
            .collect();
        best = best.max(pair_bound(y, &lo, &hi, r));
        if best == Bound::Infinite {
            break;
        }
    }
    best
}

/// Supremum of δ with `rank φ^Y_{lo+δ, (hi-δ)^-} < r` (and `2δ < hi - lo`).
fn pair_bound(y: &GridModule, lo: &[Q], hi: &[Option<Q>], r: usize) -> Bound {
    let g = y.grid();
    let two = Q::from_integer(2.into());
    let mut limit: Option<Q> = None;
    let mut cands: Vec<Q> = Vec::new();
    for k in 0..g.n() {
        for c in g.axis(k) {
            if c > &lo[k] {
                cands.push(c - &lo[k]);
            }
            if let Some(h) = &hi[k] {
                if h > c {
                    cands.push(h - c);
                }
            }
        }
        if let Some(h) = &hi[k] {
            let d = (h - &lo[k]) / &two;
            if limit.as_ref().is_none_or(|l| &d < l) {
                limit = Some(d);
            }
        }
    }
    if let Some(l) = &limit {
        cands.retain(|c| c < l);
        cands.push(l.clone());
    }
    cands.sort();
    cands.dedup();
    let holds = |d: &Q| -> bool {
        let x: Vec<Q> = lo.iter().map(|c| c + d).collect();
        let Some(s) = g.floor(&x) else { return true };
        let mut t = 0usize;
        for k in 0..g.n() {
            let idx = match &hi[k] {
                Some(h) => g.strict_floor_axis(k, &(h - d)),
                None => Some(g.axis_len(k) - 1),
            };
            let Some(i) = idx else { return true };
            t += i * g.stride(k);
        }
        if y.dim(s) < r || y.dim(t) < r {
            return true;
        }
        if !g.leq(s, t) {
            return true;
        }
        y.structure_map(s, t).expect("ordered").rank(y.field()) < r
    };
    let mut prev = Q::zero();
    let mut best = Q::zero();
    for t in &cands {
        if t <= &prev {
            continue;
        }
        let mid = (&prev + t) / &two;
        if !holds(&mid) {
            return Bound::Finite(best);
        }
        best = t.clone();
        prev = t.clone();
    }
    if limit.is_none() && holds(&(&prev + Q::from_integer(1.into()))) {
        return Bound::Infinite;
    }
    Bound::Finite(best)
}
