//! Field-generic dense elimination, shared by F_p and the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::field::PrimeField;

pub trait FieldOps: Sync {
    type E: Clone + PartialEq + std::fmt::Debug + Send + Sync;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn from_i64(&self, v: i64) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    /// Characteristic of the field (0 for the rationals).
    fn characteristic(&self) -> u64;
}

impl FieldOps for PrimeField {
    type E = u32;
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1 % self.p()
    }
    fn from_i64(&self, v: i64) -> u32 {
        PrimeField::from_i64(*self, v)
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        PrimeField::add(*self, *a, *b)
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        PrimeField::sub(*self, *a, *b)
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        PrimeField::mul(*self, *a, *b)
    }
    fn inv(&self, a: &u32) -> u32 {
        PrimeField::inv(*self, *a)
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn characteristic(&self) -> u64 {
        self.p() as u64
    }
}

/// The rationals with exact big-integer arithmetic.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Rationals;

impl FieldOps for Rationals {
    type E = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn characteristic(&self) -> u64 {
        0
    }
}

/// Dense row-major matrix over any `FieldOps` field.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<E> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<E>,
}

impl<E: Clone> Mat<E> {
    pub fn filled(rows: usize, cols: usize, z: E) -> Self {
        Mat { rows, cols, data: vec![z; rows * cols] }
    }
    pub fn at(&self, r: usize, c: usize) -> &E {
        &self.data[r * self.cols + c]
    }
    pub fn set(&mut self, r: usize, c: usize, v: E) {
        self.data[r * self.cols + c] = v;
    }
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref<F: FieldOps>(f: &F, m: &mut Mat<F::E>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(piv) = (r..m.rows).find(|&i| !f.is_zero(m.at(i, c))) else {
            continue;
        };
        if piv != r {
            for k in 0..m.cols {
                m.data.swap(piv * m.cols + k, r * m.cols + k);
            }
        }
        let inv = f.inv(m.at(r, c));
        for k in c..m.cols {
            let v = f.mul(m.at(r, k), &inv);
            m.set(r, k, v);
        }
        for i in 0..m.rows {
            if i == r || f.is_zero(m.at(i, c)) {
                continue;
            }
            let a = m.at(i, c).clone();
            for k in c..m.cols {
                let v = f.sub(m.at(i, k), &f.mul(&a, m.at(r, k)));
                m.set(i, k, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: FieldOps>(f: &F, m: &Mat<F::E>) -> usize {
    let mut m = m.clone();
    rref(f, &mut m).len()
}

/// Kernel basis vectors of `m` (as a right multiplier).
pub fn kernel<F: FieldOps>(f: &F, m: &Mat<F::E>) -> Vec<Vec<F::E>> {
    let mut r = m.clone();
    let pivots = rref(f, &mut r);
    let mut is_piv = vec![None; m.cols];
    for (i, &c) in pivots.iter().enumerate() {
        is_piv[c] = Some(i);
    }
    (0..m.cols)
        .filter(|&j| is_piv[j].is_none())
        .map(|j| {
            let mut v = vec![f.zero(); m.cols];
            v[j] = f.one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = f.sub(&f.zero(), r.at(i, j));
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_rank() {
        let q = Rationals;
        let mut m = Mat::filled(2, 2, q.zero());
        m.set(0, 0, q.from_i64(2));
        m.set(0, 1, q.from_i64(4));
        m.set(1, 0, q.from_i64(1));
        m.set(1, 1, q.from_i64(2));
        assert_eq!(rank(&q, &m), 1);
        assert_eq!(kernel(&q, &m).len(), 1);
    }

    #[test]
    fn same_answer_as_prime_field_path() {
        let f = PrimeField::new(5).unwrap();
        let mut m = Mat::filled(2, 3, 0u32);
        m.set(0, 0, 1);
        m.set(1, 0, 2);
        m.set(0, 2, 3);
        m.set(1, 2, 1);
        assert_eq!(rank(&f, &m), 1);
    }
}
