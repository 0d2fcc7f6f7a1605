//! Finite-dimensional associative algebras over `F_p` given by structure constants.

use crate::DecompError;
use pmod_core::{FieldConfig, Mat};
use rand::Rng;

/// Basis `b_0..b_{d-1}`; `left[i]` is the matrix of `y ↦ b_i y` in that basis.
#[derive(Clone, Debug)]
pub struct StructAlgebra {
    field: FieldConfig,
    left: Vec<Mat>,
    unit: Vec<u32>,
}

pub(crate) fn column(v: &[u32]) -> Mat {
    Mat::from_data(v.len(), 1, v.to_vec())
}

pub(crate) fn columns(m: &Mat) -> Vec<Vec<u32>> {
    (0..m.cols()).map(|j| (0..m.rows()).map(|i| m.get(i, j)).collect()).collect()
}

pub(crate) fn from_columns(d: usize, cols: &[Vec<u32>]) -> Mat {
    let mut m = Mat::zeros(d, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (i, &x) in c.iter().enumerate() {
            m.set(i, j, x);
        }
    }
    m
}

impl StructAlgebra {
    pub fn new(field: FieldConfig, left: Vec<Mat>, unit: Vec<u32>) -> Self {
        StructAlgebra { field, left, unit }
    }

    pub fn field(&self) -> FieldConfig {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.left.len()
    }

    pub fn unit(&self) -> &[u32] {
        &self.unit
    }

    pub fn zero(&self) -> Vec<u32> {
        vec![0; self.dim()]
    }

    pub fn basis_vector(&self, i: usize) -> Vec<u32> {
        let mut v = self.zero();
        v[i] = 1;
        v
    }

    /// Matrix of left multiplication by `x`.
    pub fn left_mat(&self, x: &[u32]) -> Mat {
        let d = self.dim();
        let mut m = Mat::zeros(d, d);
        for (i, &c) in x.iter().enumerate() {
            if c != 0 {
                m.axpy(self.field, c, &self.left[i]);
            }
        }
        m
    }

    pub fn mul(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        let f = self.field;
        let d = self.dim();
        let mut out = vec![0u32; d];
        for (i, &c) in x.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let li = &self.left[i];
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                let s = f.mul(c, yj);
                for (k, o) in out.iter_mut().enumerate() {
                    let e = li.get(k, j);
                    if e != 0 {
                        *o = f.add(*o, f.mul(s, e));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        x.iter().zip(y).map(|(&a, &b)| self.field.add(a, b)).collect()
    }

    pub fn sub(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        x.iter().zip(y).map(|(&a, &b)| self.field.sub(a, b)).collect()
    }

    pub fn scale(&self, s: u32, x: &[u32]) -> Vec<u32> {
        x.iter().map(|&a| self.field.mul(s, a)).collect()
    }

    pub fn pow(&self, x: &[u32], mut e: u64) -> Vec<u32> {
        let mut acc = self.unit.clone();
        let mut base = x.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn is_idempotent(&self, x: &[u32]) -> bool {
        self.mul(x, x) == x
    }

    pub fn is_commutative(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..i).all(|j| (0..d).all(|k| self.left[i].get(k, j) == self.left[j].get(k, i))))
    }

    pub fn is_scalar(&self, x: &[u32]) -> bool {
        let f = self.field;
        let Some(pos) = self.unit.iter().position(|&u| u != 0) else { return x.iter().all(|&a| a == 0) };
        let c = f.mul(x[pos], f.inv(self.unit[pos]).unwrap());
        self.scale(c, &self.unit) == x
    }

    pub fn random_element(&self, rng: &mut impl Rng) -> Vec<u32> {
        let p = self.field.p();
        (0..self.dim()).map(|_| rng.gen_range(0..p)).collect()
    }

    /// Subalgebra spanned by the columns of `basis`, which must be closed under products
    /// and contain the unit. Returns the subalgebra in the given basis.
    pub fn subalgebra(&self, basis: &Mat) -> Result<StructAlgebra, DecompError> {
        let f = self.field;
        let cols = columns(basis);
        let k = cols.len();
        let mut left = Vec::with_capacity(k);
        for a in &cols {
            let prods: Vec<Vec<u32>> = cols.iter().map(|b| self.mul(a, b)).collect();
            let rhs = from_columns(self.dim(), &prods);
            let sol = basis.solve(f, &rhs).ok_or_else(|| DecompError::Internal("subspace is not closed under products".into()))?;
            left.push(sol);
        }
        let unit = basis
            .solve(f, &column(&self.unit))
            .ok_or_else(|| DecompError::Internal("subspace does not contain the unit".into()))?;
        debug_assert_eq!(unit.cols(), 1);
        let unit = (0..k).map(|i| unit.get(i, 0)).collect();
        Ok(StructAlgebra::new(f, left, unit))
    }

    /// `A / I` for a two-sided ideal spanned by the columns of `ideal`.
    pub fn quotient(&self, ideal: &Mat) -> Quotient {
        let f = self.field;
        let d = self.dim();
        let (rref, pivots) = ideal.transpose().rref(f);
        let rows: Vec<Vec<u32>> = (0..pivots.len()).map(|i| (0..d).map(|j| rref.get(i, j)).collect()).collect();
        let keep: Vec<usize> = (0..d).filter(|j| !pivots.contains(j)).collect();
        let q = Quotient { rows, pivots, keep, algebra: None };
        let left = q
            .keep
            .iter()
            .map(|&i| {
                let cols: Vec<Vec<u32>> = q.keep.iter().map(|&j| q.project(f, &self.mul(&self.basis_vector(i), &self.basis_vector(j)))).collect();
                from_columns(q.keep.len(), &cols)
            })
            .collect();
        let unit = q.project(f, &self.unit);
        Quotient { algebra: Some(StructAlgebra::new(f, left, unit)), ..q }
    }

    /// Center `{z : zb = bz for all b}` as a subalgebra, with its embedding (columns).
    pub fn center(&self) -> Result<(StructAlgebra, Mat), DecompError> {
        let f = self.field;
        let d = self.dim();
        let mut sys = Mat::zeros(d * d, d);
        for j in 0..d {
            for k in 0..d {
                for i in 0..d {
                    let v = f.sub(self.left[i].get(k, j), self.left[j].get(k, i));
                    sys.set(j * d + k, i, v);
                }
            }
        }
        let basis = sys.kernel(f);
        Ok((self.subalgebra(&basis)?, basis))
    }

    /// Matrix of `x ↦ x^p - x`; only linear when the algebra is commutative.
    pub fn frobenius_minus_identity(&self) -> Mat {
        let d = self.dim();
        let p = self.field.p() as u64;
        let cols: Vec<Vec<u32>> = (0..d).map(|j| {
            let e = self.basis_vector(j);
            self.sub(&self.pow(&e, p), &e)
        }).collect();
        from_columns(d, &cols)
    }

    /// Berlekamp subalgebra `{x : x^p = x}` of a commutative algebra (columns).
    pub fn frobenius_fixed(&self) -> Mat {
        self.frobenius_minus_identity().kernel(self.field)
    }

    /// Monic minimal polynomial of `x`, coefficients from the constant term up, with the
    /// powers `1, x, ..., x^{k-1}` as columns.
    pub fn minimal_polynomial(&self, x: &[u32]) -> (Vec<u32>, Mat) {
        let f = self.field;
        let d = self.dim();
        let mut powers = vec![self.unit.clone()];
        loop {
            let next = self.mul(powers.last().unwrap(), x);
            let basis = from_columns(d, &powers);
            if let Some(sol) = basis.solve(f, &column(&next)) {
                let mut coeffs: Vec<u32> = (0..powers.len()).map(|i| f.neg(sol.get(i, 0))).collect();
                coeffs.push(1);
                return (coeffs, basis);
            }
            powers.push(next);
        }
    }

    /// Regular-representation trace of `b_k` for each basis element.
    fn traces(&self) -> Vec<u32> {
        self.left.iter().map(|l| l.trace(self.field)).collect()
    }

    /// Jacobson radical (columns). Uses the trace form when `p > dim`, otherwise the
    /// iterated `p`-power trace refinement; the result is checked to be a nilpotent ideal.
    pub fn radical(&self) -> Result<Mat, DecompError> {
        let r = if (self.field.p() as usize) > self.dim() { self.radical_trace_form()? } else { self.radical_iterated() };
        self.check_nilpotent_ideal(&r)?;
        Ok(r)
    }

    /// Kernel of `(x, y) ↦ tr(L_{xy})`; refuses when `p <= dim`.
    pub fn radical_trace_form(&self) -> Result<Mat, DecompError> {
        let f = self.field;
        let d = self.dim();
        if (f.p() as usize) <= d {
            return Err(DecompError::CharacteristicTooSmall { p: f.p(), dim: d });
        }
        let t = self.traces();
        let mut form = Mat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let mut s = 0u32;
                for (k, &tk) in t.iter().enumerate() {
                    s = f.add(s, f.mul(self.left[i].get(k, j), tk));
                }
                form.set(j, i, s);
            }
        }
        Ok(form.kernel(f))
    }

    /// Radical for small characteristic: `I_{-1} = A`,
    /// `I_i = {x ∈ I_{i-1} : g_i(xy) = 0 for all y}` with `g_i(a) = tr(ã^{p^i}) / p^i mod p`,
    /// ending at the largest `i` with `p^i <= dim`.
    pub fn radical_iterated(&self) -> Mat {
        let f = self.field;
        let p = f.p() as u64;
        let d = self.dim();
        let mut ideal = Mat::identity(d);
        let mut i = 0u32;
        while p.pow(i) <= d as u64 {
            let modulus = p.pow(i + 1);
            let cols = columns(&ideal);
            let mut g = Mat::zeros(cols.len(), d);
            for (a, x) in cols.iter().enumerate() {
                for y in 0..d {
                    let z = self.mul(x, &self.basis_vector(y));
                    let tr = lifted_power_trace(&self.left_mat(&z), p, i, modulus);
                    g.set(a, y, ((tr / p.pow(i)) % p) as u32);
                }
            }
            let kernel = g.transpose().kernel(f);
            ideal = ideal.mul(f, &kernel);
            if ideal.cols() == 0 {
                break;
            }
            i += 1;
        }
        ideal
    }

    /// Checks that the span of `r` is a two-sided ideal with `r^k = 0` for some `k <= dim + 1`.
    pub fn check_nilpotent_ideal(&self, r: &Mat) -> Result<(), DecompError> {
        let f = self.field;
        let d = self.dim();
        let rs = columns(r);
        for x in &rs {
            for j in 0..d {
                let b = self.basis_vector(j);
                for prod in [self.mul(x, &b), self.mul(&b, x)] {
                    if r.solve(f, &column(&prod)).is_none() {
                        return Err(DecompError::Internal("radical candidate is not an ideal".into()));
                    }
                }
            }
        }
        let lefts: Vec<Mat> = rs.iter().map(|x| self.left_mat(x)).collect();
        let mut power = r.clone();
        for _ in 0..=d {
            if power.cols() == 0 || power.is_zero() {
                return Ok(());
            }
            let mut next = Mat::zeros(d, 0);
            for l in &lefts {
                next = next.hstack(&l.mul(f, &power));
            }
            power = next.image(f);
        }
        Err(DecompError::Internal("radical candidate is not nilpotent".into()))
    }

    /// Newton iteration `e <- 3e^2 - 2e^3` from an element idempotent modulo a nilpotent ideal.
    pub fn lift_idempotent(&self, x: &[u32]) -> Result<Vec<u32>, DecompError> {
        let f = self.field;
        let (three, two) = (f.from_i64(3), f.from_i64(2));
        let mut e = x.to_vec();
        for _ in 0..64 {
            let e2 = self.mul(&e, &e);
            if e2 == e {
                return Ok(e);
            }
            let e3 = self.mul(&e2, &e);
            e = self.sub(&self.scale(three, &e2), &self.scale(two, &e3));
        }
        Err(DecompError::Internal("idempotent lifting did not converge".into()))
    }

    /// For `z` with `z^p = z` and not a scalar, a nontrivial idempotent `1 - (z - λ)^{p-1}`
    /// where `λ` is a root of the minimal polynomial of `z`.
    pub fn eigen_idempotent(&self, z: &[u32]) -> Option<Vec<u32>> {
        let f = self.field;
        let (poly, _) = self.minimal_polynomial(z);
        let lambda = (0..f.p()).find(|&l| eval(f, &poly, l) == 0)?;
        let shifted = self.sub(z, &self.scale(lambda, &self.unit));
        let e = self.sub(&self.unit, &self.pow(&shifted, f.p() as u64 - 1));
        (self.is_idempotent(&e) && !is_zero(&e) && e != self.unit).then_some(e)
    }
}

pub(crate) fn is_zero(x: &[u32]) -> bool {
    x.iter().all(|&a| a == 0)
}

fn eval(f: FieldConfig, poly: &[u32], x: u32) -> u32 {
    poly.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

/// `tr(ã^{p^i}) mod modulus` for the integer lift `ã` of `a` with entries in `[0, p)`.
fn lifted_power_trace(a: &Mat, p: u64, i: u32, modulus: u64) -> u64 {
    let n = a.rows();
    let mut m: Vec<u64> = a.data().iter().map(|&x| x as u64 % modulus).collect();
    let mul = |x: &[u64], y: &[u64]| -> Vec<u64> {
        let mut out = vec![0u64; n * n];
        for r in 0..n {
            for k in 0..n {
                let xv = x[r * n + k];
                if xv == 0 {
                    continue;
                }
                for c in 0..n {
                    out[r * n + c] = (out[r * n + c] + xv * y[k * n + c]) % modulus;
                }
            }
        }
        out
    };
    for _ in 0..i {
        let mut acc = m.clone();
        for _ in 1..p {
            acc = mul(&acc, &m);
        }
        m = acc;
    }
    (0..n).map(|r| m[r * n + r]).sum::<u64>() % modulus
}

/// Quotient data: reduction rows of the ideal (leading ones at `pivots`) and the kept
/// coordinates that index the quotient basis.
#[derive(Clone, Debug)]
pub struct Quotient {
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    keep: Vec<usize>,
    algebra: Option<StructAlgebra>,
}

impl Quotient {
    pub fn algebra(&self) -> &StructAlgebra {
        self.algebra.as_ref().unwrap()
    }

    pub fn project(&self, f: FieldConfig, x: &[u32]) -> Vec<u32> {
        let mut x = x.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = x[p];
            if c != 0 {
                for (xi, &ri) in x.iter_mut().zip(row) {
                    *xi = f.sub(*xi, f.mul(c, ri));
                }
            }
        }
        self.keep.iter().map(|&j| x[j]).collect()
    }

    pub fn lift(&self, d: usize, y: &[u32]) -> Vec<u32> {
        let mut x = vec![0; d];
        for (&j, &v) in self.keep.iter().zip(y) {
            x[j] = v;
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `F_p[x]/(x^k)` in the basis `1, x, ..., x^{k-1}`.
    fn truncated(f: FieldConfig, k: usize) -> StructAlgebra {
        let left = (0..k)
            .map(|i| {
                let mut m = Mat::zeros(k, k);
                for j in 0..k {
                    if i + j < k {
                        m.set(i + j, j, 1);
                    }
                }
                m
            })
            .collect();
        let mut unit = vec![0; k];
        unit[0] = 1;
        StructAlgebra::new(f, left, unit)
    }

    /// `F_p × F_p` in the basis of its two idempotents.
    fn split(f: FieldConfig) -> StructAlgebra {
        let mut a = Mat::zeros(2, 2);
        a.set(0, 0, 1);
        let mut b = Mat::zeros(2, 2);
        b.set(1, 1, 1);
        StructAlgebra::new(f, vec![a, b], vec![1, 1])
    }

    #[test]
    fn radical_of_truncated_polynomials() {
        for p in [2, 3, 5, 65521] {
            let f = FieldConfig::new(p).unwrap();
            for k in 1..5 {
                let a = truncated(f, k);
                assert_eq!(a.radical().unwrap().cols(), k - 1, "p={p} k={k}");
            }
        }
    }

    #[test]
    fn radical_of_split_algebra_is_zero() {
        for p in [2, 3, 7] {
            let f = FieldConfig::new(p).unwrap();
            assert_eq!(split(f).radical().unwrap().cols(), 0);
        }
    }

    #[test]
    fn trace_form_refuses_small_characteristic() {
        let f = FieldConfig::new(2).unwrap();
        assert!(matches!(truncated(f, 3).radical_trace_form(), Err(DecompError::CharacteristicTooSmall { p: 2, dim: 3 })));
    }

    #[test]
    fn berlekamp_counts_factors() {
        let f = FieldConfig::new(5).unwrap();
        assert_eq!(split(f).frobenius_fixed().cols(), 2);
        assert_eq!(truncated(f, 1).frobenius_fixed().cols(), 1);
        let e = split(f).eigen_idempotent(&[2, 3]).unwrap();
        assert!(e == vec![1, 0] || e == vec![0, 1]);
    }

    #[test]
    fn lifting_through_the_radical() {
        let f = FieldConfig::new(3).unwrap();
        // (F_3[x]/x^2) × F_3 as a 3-dim algebra: basis (1,0), (x,0), (0,1).
        let mut l0 = Mat::zeros(3, 3);
        l0.set(0, 0, 1);
        l0.set(1, 1, 1);
        let mut l1 = Mat::zeros(3, 3);
        l1.set(1, 0, 1);
        let mut l2 = Mat::zeros(3, 3);
        l2.set(2, 2, 1);
        let a = StructAlgebra::new(f, vec![l0, l1, l2], vec![1, 0, 1]);
        let e = a.lift_idempotent(&[1, 1, 0]).unwrap();
        assert!(a.is_idempotent(&e));
        assert_eq!(e, vec![1, 0, 0]);
    }
}
