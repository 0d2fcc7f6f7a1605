use crate::InterleaveError;
use num_traits::{Signed, Zero};
use pmod_core::rational::fmt_q;
use pmod_core::{Grid, GridModule, Mat, ModuleMorphism, Q};
use pmod_kan::{phi, semantically_equal, shift_unit_on, shifted_resample, unit_grid};
use std::sync::Arc;

/// An ε-interleaving between the extensions of `m` and `n`.
///
/// `f` is a morphism `M_Q -> (N[ε])_Q` on a grid `Q ⊇ coords(M) ∪ (coords(N) - ε)`; its value
/// at any point `x` is its component at the floor of `x` in `Q`. `g` is the symmetric half.
#[derive(Clone, Debug)]
pub struct Certificate {
    m: Arc<GridModule>,
    n: Arc<GridModule>,
    eps: Q,
    f: ModuleMorphism,
    g: ModuleMorphism,
}

impl Certificate {
    /// Assemble without checking anything; call [`Certificate::verify`].
    pub fn new_unverified(m: Arc<GridModule>, n: Arc<GridModule>, eps: Q, f: ModuleMorphism, g: ModuleMorphism) -> Self {
        Certificate { m, n, eps, f, g }
    }

    pub fn new(m: Arc<GridModule>, n: Arc<GridModule>, eps: Q, f: ModuleMorphism, g: ModuleMorphism) -> Result<Self, InterleaveError> {
        let c = Self::new_unverified(m, n, eps, f, g);
        c.verify()?;
        Ok(c)
    }

    /// Build the morphism half from components on grid `q`.
    pub(crate) fn half(src: &GridModule, dst: &GridModule, eps: &Q, q: &Grid, mats: Vec<Mat>) -> Result<ModuleMorphism, InterleaveError> {
        let s = Arc::new(src.restriction_extension(q));
        let t = Arc::new(shifted_resample(dst, q, eps));
        Ok(ModuleMorphism::new(s, t, mats)?)
    }

    pub fn m(&self) -> &Arc<GridModule> {
        &self.m
    }

    pub fn n(&self) -> &Arc<GridModule> {
        &self.n
    }

    pub fn eps(&self) -> &Q {
        &self.eps
    }

    pub fn f(&self) -> &ModuleMorphism {
        &self.f
    }

    pub fn g(&self) -> &ModuleMorphism {
        &self.g
    }

    /// The same certificate read in the other direction.
    pub fn reversed(&self) -> Certificate {
        Certificate { m: self.n.clone(), n: self.m.clone(), eps: self.eps.clone(), f: self.g.clone(), g: self.f.clone() }
    }

    /// Replace the end modules by semantically equal ones (e.g. a refined copy).
    pub fn with_modules(&self, m: Arc<GridModule>, n: Arc<GridModule>) -> Result<Certificate, InterleaveError> {
        if !semantically_equal(&m, &self.m) || !semantically_equal(&n, &self.n) {
            return Err(InterleaveError::MiddleMismatch);
        }
        let f = Self::half(&m, &n, &self.eps, self.f.grid(), self.f.mats().to_vec())?;
        let g = Self::half(&n, &m, &self.eps, self.g.grid(), self.g.mats().to_vec())?;
        Certificate::new(m, n, self.eps.clone(), f, g)
    }

    /// Check both halves and both triangle identities exactly.
    pub fn verify(&self) -> Result<(), InterleaveError> {
        if self.eps.is_negative() {
            return Err(InterleaveError::NegativeEps);
        }
        check_half("f", &self.m, &self.n, &self.eps, &self.f)?;
        check_half("g", &self.n, &self.m, &self.eps, &self.g)?;
        check_triangle("g[ε]∘f = η^M_2ε", &self.m, &self.eps, &self.f, &self.g)?;
        check_triangle("f[ε]∘g = η^N_2ε", &self.n, &self.eps, &self.g, &self.f)?;
        Ok(())
    }
}

fn check_half(name: &str, src: &GridModule, dst: &GridModule, eps: &Q, h: &ModuleMorphism) -> Result<(), InterleaveError> {
    let q = h.grid();
    let need = src.grid().union(&dst.grid().translate_diag(&-eps))?;
    if !need.is_subgrid_of(q) {
        return Err(InterleaveError::Verification(format!("{name}: grid too coarse")));
    }
    if **h.source() != src.restriction_extension(q) {
        return Err(InterleaveError::Verification(format!("{name}: source is not the resampled module")));
    }
    if **h.target() != shifted_resample(dst, q, eps) {
        return Err(InterleaveError::Verification(format!("{name}: target is not the resampled shifted module")));
    }
    h.check_natural().map_err(|v| InterleaveError::Verification(format!("{name}: {v}")))
}

/// `b[ε] ∘ a = η^X_{2ε}` where `a : X -> Y[ε]`, `b : Y -> X[ε]`.
fn check_triangle(name: &str, x: &GridModule, eps: &Q, a: &ModuleMorphism, b: &ModuleMorphism) -> Result<(), InterleaveError> {
    let r = a.grid().union(&b.grid().translate_diag(&-eps))?;
    let zero = Q::zero();
    let two_eps = eps * Q::from_integer(2.into());
    let fa = r.axis_floor_map(a.grid(), &zero);
    let fb = r.axis_floor_map(b.grid(), eps);
    let x0 = r.axis_floor_map(x.grid(), &zero);
    let x2 = r.axis_floor_map(x.grid(), &two_eps);
    let f = x.field();
    for v in r.vertices() {
        let mi = r.multi(v);
        let Some(va) = fa.floor(&mi) else { continue };
        let xa = x0.floor(&mi);
        if xa.is_none() {
            continue;
        }
        let am = a.mat(va);
        let Some(vb) = fb.floor(&mi) else {
            return Err(InterleaveError::Verification(format!("{name}: second half undefined at {}", fmt_point(&r, v))));
        };
        let bm = b.mat(vb);
        if bm.cols() != am.rows() {
            return Err(InterleaveError::Verification(format!("{name}: shapes disagree at {}", fmt_point(&r, v))));
        }
        let lhs = bm.mul(f, am);
        let rhs = phi(x, xa, x2.floor(&mi));
        if lhs != rhs {
            return Err(InterleaveError::Verification(format!("{name} fails at {}", fmt_point(&r, v))));
        }
    }
    Ok(())
}

pub(crate) fn fmt_point(g: &Grid, v: usize) -> String {
    let c: Vec<String> = g.coords(v).iter().map(fmt_q).collect();
    format!("({})", c.join(", "))
}

/// Components of `h` at every vertex of the finer grid `r` (looked up at `x + shift`).
pub(crate) fn sample(h: &ModuleMorphism, r: &Grid, shift: &Q) -> Vec<Option<usize>> {
    r.axis_floor_map(h.grid(), shift).floors(r)
}

/// `f = g = η^M_ε`.
pub fn identity_certificate(m: &Arc<GridModule>, eps: &Q) -> Result<Certificate, InterleaveError> {
    if eps.is_negative() {
        return Err(InterleaveError::NegativeEps);
    }
    let q = unit_grid(m, eps);
    let eta = shift_unit_on(m, eps, &q)?;
    Certificate::new(m.clone(), m.clone(), eps.clone(), eta.clone(), eta)
}

/// ε = 0 certificate from an isomorphism `φ : M_R -> N_R` on a grid `R` containing both grids.
pub fn iso_certificate(m: &Arc<GridModule>, n: &Arc<GridModule>, iso: &ModuleMorphism) -> Result<Certificate, InterleaveError> {
    let inv = iso
        .inverse()
        .ok_or_else(|| InterleaveError::Verification("witness is not invertible".into()))?;
    let q = iso.grid();
    let zero = Q::zero();
    let f = Certificate::half(m, n, &zero, q, iso.mats().to_vec())?;
    let g = Certificate::half(n, m, &zero, q, inv.mats().to_vec())?;
    Certificate::new(m.clone(), n.clone(), zero, f, g)
}

/// Certificate between `M` and the zero module (on `M`'s grid); valid iff `M` is 2ε-trivial.
pub fn zero_certificate(m: &Arc<GridModule>, eps: &Q) -> Result<Certificate, InterleaveError> {
    if eps.is_negative() {
        return Err(InterleaveError::NegativeEps);
    }
    let z = Arc::new(GridModule::zero(m.field(), m.grid().clone()));
    let q = unit_grid(m, eps);
    let src = m.restriction_extension(&q);
    let fm: Vec<Mat> = q.vertices().map(|v| Mat::zeros(0, src.dim(v))).collect();
    let f = Certificate::half(m, &z, eps, &q, fm)?;
    let tgt = shifted_resample(m, &q, eps);
    let gm: Vec<Mat> = q.vertices().map(|v| Mat::zeros(tgt.dim(v), 0)).collect();
    let g = Certificate::half(&z, m, eps, &q, gm)?;
    let c = Certificate::new_unverified(m.clone(), z, eps.clone(), f, g);
    match c.verify() {
        Ok(()) => Ok(c),
        Err(InterleaveError::Verification(_)) => Err(InterleaveError::NotTrivial(fmt_q(&(eps * Q::from_integer(2.into()))))),
        Err(e) => Err(e),
    }
}

/// Triangle inequality: `(M, N, ε1)` and `(N, L, ε2)` give `(M, L, ε1 + ε2)`.
pub fn compose_certificates(c1: &Certificate, c2: &Certificate) -> Result<Certificate, InterleaveError> {
    if !(Arc::ptr_eq(&c1.n, &c2.m) || semantically_equal(&c1.n, &c2.m)) {
        return Err(InterleaveError::MiddleMismatch);
    }
    let eps = &c1.eps + &c2.eps;
    let f = compose_halves(&c1.m, &c2.n, &eps, &c1.f, &c1.eps, &c2.f)?;
    let g = compose_halves(&c2.n, &c1.m, &eps, &c2.g, &c2.eps, &c1.g)?;
    Certificate::new(c1.m.clone(), c2.n.clone(), eps, f, g)
}

/// `b[e1] ∘ a` where `a : X -> Y[e1]`, `b : Y -> Z[e2]`, as a morphism `X -> Z[e1+e2]`.
fn compose_halves(x: &GridModule, z: &GridModule, eps: &Q, a: &ModuleMorphism, e1: &Q, b: &ModuleMorphism) -> Result<ModuleMorphism, InterleaveError> {
    let q = a.grid().union(&b.grid().translate_diag(&-e1))?;
    let fa = sample(a, &q, &Q::zero());
    let fb = sample(b, &q, e1);
    let src = x.restriction_extension(&q);
    let tgt = shifted_resample(z, &q, eps);
    let f = x.field();
    let mats = q
        .vertices()
        .map(|v| match (fa[v], fb[v]) {
            (Some(i), Some(j)) => b.mat(j).mul(f, a.mat(i)),
            _ => Mat::zeros(tgt.dim(v), src.dim(v)),
        })
        .collect();
    Ok(ModuleMorphism::new(Arc::new(src), Arc::new(tgt), mats)?)
}

/// Weaken to any `eps2 >= ε` by post-composing with shift units.
pub fn weaken(c: &Certificate, eps2: &Q) -> Result<Certificate, InterleaveError> {
    if eps2 < &c.eps {
        return Err(InterleaveError::Verification("cannot weaken to a smaller ε".into()));
    }
    if *eps2 == c.eps {
        return Ok(c.clone());
    }
    let f = weaken_half(&c.m, &c.n, &c.f, &c.eps, eps2)?;
    let g = weaken_half(&c.n, &c.m, &c.g, &c.eps, eps2)?;
    Certificate::new(c.m.clone(), c.n.clone(), eps2.clone(), f, g)
}

fn weaken_half(x: &GridModule, y: &GridModule, h: &ModuleMorphism, e1: &Q, e2: &Q) -> Result<ModuleMorphism, InterleaveError> {
    let q = h.grid().union(&y.grid().translate_diag(&-e2))?;
    let fh = sample(h, &q, &Q::zero());
    let y1 = q.axis_floor_map(y.grid(), e1).floors(&q);
    let y2 = q.axis_floor_map(y.grid(), e2).floors(&q);
    let src = x.restriction_extension(&q);
    let tgt = shifted_resample(y, &q, e2);
    let f = x.field();
    let mats = q
        .vertices()
        .map(|v| match fh[v] {
            Some(i) => phi(y, y1[v], y2[v]).mul(f, h.mat(i)),
            None => Mat::zeros(tgt.dim(v), src.dim(v)),
        })
        .collect();
    Ok(ModuleMorphism::new(Arc::new(src), Arc::new(tgt), mats)?)
}

/// Direct sum of two modules after refining both to the union of their grids.
pub fn sum_modules(a: &GridModule, b: &GridModule) -> Result<GridModule, InterleaveError> {
    let (ra, rb) = pmod_kan::common_refinement(a, b)?;
    Ok(ra.direct_sum(&rb)?)
}

/// `(A, B, ε)` gives `(A ⊕ X, B ⊕ X, ε)`, extending by `η^X_ε`.
pub fn sum_certificates(c: &Certificate, x: &Arc<GridModule>) -> Result<Certificate, InterleaveError> {
    let ex = identity_certificate(x, &c.eps)?;
    direct_sum_equal_eps(c, &ex)
}

/// Direct sum of two certificates; both are first weakened to the larger ε.
pub fn direct_sum_certificates(c1: &Certificate, c2: &Certificate) -> Result<Certificate, InterleaveError> {
    let eps = if c1.eps >= c2.eps { c1.eps.clone() } else { c2.eps.clone() };
    let c1 = weaken(c1, &eps)?;
    let c2 = weaken(c2, &eps)?;
    direct_sum_equal_eps(&c1, &c2)
}

fn direct_sum_equal_eps(c1: &Certificate, c2: &Certificate) -> Result<Certificate, InterleaveError> {
    let eps = c1.eps.clone();
    let m = Arc::new(sum_modules(&c1.m, &c2.m)?);
    let n = Arc::new(sum_modules(&c1.n, &c2.n)?);
    let f = sum_halves(&m, &n, &eps, [(&c1.m, &c1.n, &c1.f), (&c2.m, &c2.n, &c2.f)])?;
    let g = sum_halves(&n, &m, &eps, [(&c1.n, &c1.m, &c1.g), (&c2.n, &c2.m, &c2.g)])?;
    Certificate::new(m, n, eps, f, g)
}

type Part<'a> = (&'a Arc<GridModule>, &'a Arc<GridModule>, &'a ModuleMorphism);

/// Block-diagonal half `X -> Y[ε]` where `X`, `Y` are sums of the parts' ends.
fn sum_halves(x: &GridModule, y: &GridModule, eps: &Q, parts: [Part<'_>; 2]) -> Result<ModuleMorphism, InterleaveError> {
    let mut q = x.grid().union(&y.grid().translate_diag(&-eps))?;
    for (_, _, h) in &parts {
        q = q.union(h.grid())?;
    }
    let src = x.restriction_extension(&q);
    let tgt = shifted_resample(y, &q, eps);
    let zero = Q::zero();
    let blocks: Vec<Vec<Mat>> = parts
        .iter()
        .map(|(px, py, h)| {
            let fh = sample(h, &q, &zero);
            let fx = q.axis_floor_map(px.grid(), &zero).floors(&q);
            let fy = q.axis_floor_map(py.grid(), eps).floors(&q);
            q.vertices()
                .map(|v| match fh[v] {
                    Some(i) => h.mat(i).clone(),
                    None => Mat::zeros(fy[v].map_or(0, |w| py.dim(w)), fx[v].map_or(0, |w| px.dim(w))),
                })
                .collect()
        })
        .collect();
    let mats = q.vertices().map(|v| Mat::block_diag(&[&blocks[0][v], &blocks[1][v]])).collect();
    Ok(ModuleMorphism::new(Arc::new(src), Arc::new(tgt), mats)?)
}

/// `(N, N_P, β)` for a grid `P` that has a coordinate in `[c, c + β]` for every coordinate `c`
/// of `N`'s grid, on every axis (for instance `P` spanning `N`'s grid with mesh widths at most `β`).
pub fn snap_certificate(n: &Arc<GridModule>, p: &Grid, beta: &Q) -> Result<Certificate, InterleaveError> {
    let g = n.grid();
    if p.n() != g.n() {
        return Err(pmod_core::CoreError::DimensionMismatch(g.n(), p.n()).into());
    }
    if beta.is_negative() {
        return Err(InterleaveError::NegativeEps);
    }
    for k in 0..g.n() {
        let pa = p.axis(k);
        for c in g.axis(k) {
            let i = pa.partition_point(|x| x < c);
            if i == pa.len() || &pa[i] > &(c + beta) {
                return Err(InterleaveError::MeshBounds(format!(
                    "no snapping coordinate within {} above {} on axis {k}",
                    fmt_q(beta),
                    fmt_q(c)
                )));
            }
        }
    }
    let np = Arc::new(n.restriction_extension(p));
    let zero = Q::zero();
    // f: N(t) -> N(floor_P(t + β)); g: N(floor_P(t)) -> N(t + β).
    let qf = g.union(p)?;
    let qf = qf.union(&qf.translate_diag(&-beta))?;
    let n0 = qf.axis_floor_map(g, &zero).floors(&qf);
    let pb = qf.axis_floor_map(p, beta).floors(&qf);
    let p0 = qf.axis_floor_map(p, &zero).floors(&qf);
    let nb = qf.axis_floor_map(g, beta).floors(&qf);
    let through = |pv: Option<usize>| pv.and_then(|w| g.floor(&p.coords(w)));
    let fm: Vec<Mat> = qf.vertices().map(|v| phi(n, n0[v], through(pb[v]))).collect();
    let gm: Vec<Mat> = qf.vertices().map(|v| phi(n, through(p0[v]), nb[v])).collect();
    let f = Certificate::half(n, &np, beta, &qf, fm)?;
    let gh = Certificate::half(&np, n, beta, &qf, gm)?;
    Certificate::new(n.clone(), np, beta.clone(), f, gh)
}
