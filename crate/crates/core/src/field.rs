//! Prime-field scalars and dense row-major matrices over F_p.

use crate::error::CoreError;
use serde::{Deserialize, Serialize};

/// The ground field F_p. All scalars are canonical representatives in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldConfig {
    p: u32,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig { p: Self::DEFAULT_P }
    }
}

impl FieldConfig {
    pub const DEFAULT_P: u32 = 65521;

    pub fn new(p: u32) -> Result<Self, CoreError> {
        if !is_prime(p) {
            return Err(CoreError::NotPrime(p));
        }
        Ok(FieldConfig { p })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + self.p as u64 - b as u64;
        (s % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u32) -> Option<u32> {
        if a % self.p == 0 {
            None
        } else {
            Some(self.pow(a, self.p as u64 - 2))
        }
    }

    /// Reduce a signed integer into `[0, p)`.
    pub fn from_i64(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Dense matrix over F_p, row-major, `rows` = target dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Build from row-major data; panics if the length is wrong.
    pub fn from_data(rows: usize, cols: usize, data: Vec<u32>) -> Mat {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Mat { rows, cols, data }
    }

    pub fn from_rows(f: FieldConfig, rows: &[Vec<i64>]) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&x| f.from_i64(x)));
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn column(f: FieldConfig, entries: &[i64]) -> Mat {
        Mat::from_data(entries.len(), 1, entries.iter().map(|&x| f.from_i64(x)).collect())
    }

    pub fn row(f: FieldConfig, entries: &[i64]) -> Mat {
        Mat::from_data(1, entries.len(), entries.iter().map(|&x| f.from_i64(x)).collect())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == u32::from(i == j)))
    }

    pub fn mul(&self, f: FieldConfig, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let (r, k, c) = (self.rows, self.cols, other.cols);
        let mut out = Mat::zeros(r, c);
        if r == 0 || c == 0 || k == 0 {
            return out;
        }
        let p = f.p() as u64;
        let mut acc = vec![0u64; c];
        for i in 0..r {
            acc.iter_mut().for_each(|a| *a = 0);
            let arow = &self.data[i * k..(i + 1) * k];
            for (t, &a) in arow.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let brow = &other.data[t * c..(t + 1) * c];
                for (slot, &b) in acc.iter_mut().zip(brow) {
                    *slot += a as u64 * b as u64;
                }
                // keep accumulators bounded well below u64::MAX
                if t % 1024 == 1023 {
                    acc.iter_mut().for_each(|a| *a %= p);
                }
            }
            for (j, a) in acc.iter().enumerate() {
                out.data[i * c + j] = (a % p) as u32;
            }
        }
        out
    }

    pub fn add(&self, f: FieldConfig, other: &Mat) -> Mat {
        assert_eq!(self.shape(), other.shape(), "matrix sum shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, f: FieldConfig, other: &Mat) -> Mat {
        assert_eq!(self.shape(), other.shape(), "matrix difference shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, f: FieldConfig, s: u32) -> Mat {
        let data = self.data.iter().map(|&a| f.mul(a, s)).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self, f: FieldConfig) -> Mat {
        let data = self.data.iter().map(|&a| f.neg(a)).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    /// `self += s * other`
    pub fn axpy(&mut self, f: FieldConfig, s: u32, other: &Mat) {
        assert_eq!(self.shape(), other.shape());
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = f.add(*a, f.mul(s, b));
        }
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, f: FieldConfig) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place(f);
        (m, pivots)
    }

    fn rref_in_place(&mut self, f: FieldConfig) -> Vec<usize> {
        let (r, c) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..c {
            if row == r {
                break;
            }
            let Some(piv) = (row..r).find(|&i| self.data[i * c + col] != 0) else {
                continue;
            };
            if piv != row {
                for j in 0..c {
                    self.data.swap(piv * c + j, row * c + j);
                }
            }
            let inv = f.inv(self.data[row * c + col]).expect("nonzero pivot");
            for j in col..c {
                self.data[row * c + j] = f.mul(self.data[row * c + j], inv);
            }
            for i in 0..r {
                if i == row {
                    continue;
                }
                let factor = self.data[i * c + col];
                if factor == 0 {
                    continue;
                }
                for j in col..c {
                    let v = f.mul(factor, self.data[row * c + j]);
                    self.data[i * c + j] = f.sub(self.data[i * c + j], v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self, f: FieldConfig) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.rref(f).1.len()
    }

    /// Columns form a basis of the right null space (`cols x nullity`).
    pub fn kernel(&self, f: FieldConfig) -> Mat {
        let c = self.cols;
        let (e, pivots) = self.rref(f);
        let free: Vec<usize> = (0..c).filter(|j| !pivots.contains(j)).collect();
        let mut k = Mat::zeros(c, free.len());
        for (t, &fc) in free.iter().enumerate() {
            k.set(fc, t, 1);
            for (i, &pc) in pivots.iter().enumerate() {
                k.set(pc, t, f.neg(e.get(i, fc)));
            }
        }
        k
    }

    /// Columns of `self` at the pivot positions: a basis of the column space.
    pub fn image(&self, f: FieldConfig) -> Mat {
        let (_, pivots) = self.rref(f);
        self.select_cols(&pivots)
    }

    pub fn select_cols(&self, cols: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (t, &j) in cols.iter().enumerate() {
                out.data[i * cols.len() + t] = self.get(i, j);
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> Mat {
        let mut out = Mat::zeros(rows.len(), self.cols);
        for (t, &i) in rows.iter().enumerate() {
            out.data[t * self.cols..(t + 1) * self.cols]
                .copy_from_slice(&self.data[i * self.cols..(i + 1) * self.cols]);
        }
        out
    }

    /// Sub-block with rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Mat {
        let mut out = Mat::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out.set(i - r0, j - c0, self.get(i, j));
            }
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j));
            }
        }
    }

    pub fn inverse(&self, f: FieldConfig) -> Option<Mat> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Mat::zeros(0, 0));
        }
        let aug = self.hstack(&Mat::identity(n));
        let (e, pivots) = aug.rref(f);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(e.block(0, n, n, 2 * n))
    }

    pub fn is_invertible(&self, f: FieldConfig) -> bool {
        self.is_square() && self.rank(f) == self.rows
    }

    /// Solve `self * x = b` for `x`; `None` if inconsistent.
    pub fn solve(&self, f: FieldConfig, b: &Mat) -> Option<Mat> {
        assert_eq!(self.rows, b.rows, "solve shape mismatch");
        let (n, m) = (self.cols, b.cols);
        let aug = self.hstack(b);
        let (e, pivots) = aug.rref(f);
        if pivots.iter().any(|&p| p >= n) {
            return None;
        }
        let mut x = Mat::zeros(n, m);
        for (i, &pc) in pivots.iter().enumerate() {
            for j in 0..m {
                x.set(pc, j, e.get(i, n + j));
            }
        }
        Some(x)
    }

    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let c = self.cols + other.cols;
        let mut out = Mat::zeros(self.rows, c);
        for i in 0..self.rows {
            out.data[i * c..i * c + self.cols]
                .copy_from_slice(&self.data[i * self.cols..(i + 1) * self.cols]);
            out.data[i * c + self.cols..(i + 1) * c]
                .copy_from_slice(&other.data[i * other.cols..(i + 1) * other.cols]);
        }
        out
    }

    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn block_diag(blocks: &[&Mat]) -> Mat {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Mat::zeros(r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn trace(&self, f: FieldConfig) -> u32 {
        (0..self.rows.min(self.cols)).fold(0, |acc, i| f.add(acc, self.get(i, i)))
    }

    /// `self^e` for a square matrix.
    pub fn pow(&self, f: FieldConfig, mut e: u64) -> Mat {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Mat::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(f, &base);
            }
        }
        acc
    }

    /// Row-major entries as signed representatives in `(-p/2, p/2]`, for display.
    pub fn to_signed_rows(&self, f: FieldConfig) -> Vec<Vec<i64>> {
        let p = f.p() as i64;
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let v = self.get(i, j) as i64;
                        if v > p / 2 {
                            v - p
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> FieldConfig {
        FieldConfig::new(7).unwrap()
    }

    #[test]
    fn primes() {
        assert!(is_prime(2) && is_prime(3) && is_prime(65521));
        assert!(!is_prime(1) && !is_prime(65520));
        assert!(FieldConfig::new(9).is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let f = f7();
        let a = Mat::from_rows(f, &[vec![1, 2], vec![3, 4]]);
        let inv = a.inverse(f).unwrap();
        assert!(a.mul(f, &inv).is_identity());
        let sing = Mat::from_rows(f, &[vec![1, 2], vec![2, 4]]);
        assert!(sing.inverse(f).is_none());
        assert_eq!(sing.rank(f), 1);
    }

    #[test]
    fn kernel_is_annihilated() {
        let f = f7();
        let a = Mat::from_rows(f, &[vec![1, 2, 3], vec![2, 4, 6]]);
        let k = a.kernel(f);
        assert_eq!(k.cols(), 2);
        assert!(a.mul(f, &k).is_zero());
    }

    #[test]
    fn solve_consistent_and_not() {
        let f = f7();
        let a = Mat::from_rows(f, &[vec![1, 0], vec![0, 0]]);
        let b = Mat::column(f, &[3, 0]);
        let x = a.solve(f, &b).unwrap();
        assert_eq!(a.mul(f, &x), b);
        assert!(a.solve(f, &Mat::column(f, &[0, 1])).is_none());
    }

    #[test]
    fn empty_shapes() {
        let f = f7();
        let a = Mat::zeros(0, 3);
        let b = Mat::zeros(3, 2);
        assert_eq!(a.mul(f, &b).shape(), (0, 2));
        assert!(Mat::zeros(0, 0).inverse(f).unwrap().is_identity());
    }
}
