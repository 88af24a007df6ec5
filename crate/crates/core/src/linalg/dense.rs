//! Dense elimination kernels: bit-packed rows over F_2, word rows otherwise.

use crate::field::PrimeField;

/// Row-major bit matrix over F_2.
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix { rows, cols, words, data: vec![0; rows * words] }
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] |= 1 << (c % 64);
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] ^= 1 << (c % 64);
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Rank by forward elimination; destroys the contents.
    pub fn rank(mut self) -> usize {
        let w = self.words;
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let (wi, bit) = (c / 64, 1u64 << (c % 64));
            let Some(piv) = (rank..self.rows).find(|&r| self.data[r * w + wi] & bit != 0) else {
                continue;
            };
            if piv != rank {
                for k in wi..w {
                    self.data.swap(piv * w + k, rank * w + k);
                }
            }
            let (head, tail) = self.data.split_at_mut((rank + 1) * w);
            let prow = &head[rank * w + wi..(rank + 1) * w];
            eliminate_below(tail, w, wi, bit, prow);
            rank += 1;
        }
        rank
    }
}

fn eliminate_below(tail: &mut [u64], w: usize, wi: usize, bit: u64, prow: &[u64]) {
    let xor_row = |row: &mut [u64]| {
        if row[wi] & bit != 0 {
            for (x, &y) in row[wi..].iter_mut().zip(prow) {
                *x ^= y;
            }
        }
    };
    #[cfg(feature = "parallel")]
    if crate::exec::is_parallel() && tail.len() / w > 256 {
        use rayon::prelude::*;
        tail.par_chunks_mut(w).with_min_len(64).for_each(xor_row);
        return;
    }
    tail.chunks_mut(w).for_each(xor_row);
}

/// Row-major matrix over F_p with word entries.
pub struct DenseMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl DenseMatrix {
    pub fn new(field: PrimeField, rows: usize, cols: usize) -> Self {
        DenseMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn rank(mut self) -> usize {
        let f = self.field;
        if f.p() < 128 {
            let bytes: Vec<u8> = self.data.iter().map(|&x| x as u8).collect();
            return byte_rank(f, self.rows, self.cols, bytes);
        }
        let n = self.cols;
        let mut rank = 0;
        for c in 0..n {
            if rank == self.rows {
                break;
            }
            let Some(piv) = (rank..self.rows).find(|&r| self.data[r * n + c] != 0) else {
                continue;
            };
            if piv != rank {
                for k in c..n {
                    self.data.swap(piv * n + k, rank * n + k);
                }
            }
            let inv = f.inv(self.data[rank * n + c]);
            for k in c..n {
                self.data[rank * n + k] = f.mul(self.data[rank * n + k], inv);
            }
            let (head, tail) = self.data.split_at_mut((rank + 1) * n);
            let prow = &head[rank * n + c..(rank + 1) * n];
            let p = f.p() as u64;
            let upd = |row: &mut [u32]| {
                let a = row[c];
                if a != 0 {
                    let na = p - a as u64;
                    for (x, &y) in row[c..].iter_mut().zip(prow) {
                        *x = ((*x as u64 + na * y as u64) % p) as u32;
                    }
                }
            };
            for_each_row(tail, n, upd);
            rank += 1;
        }
        rank
    }
}

fn for_each_row<T: Send>(tail: &mut [T], n: usize, upd: impl Fn(&mut [T]) + Sync + Send) {
    #[cfg(feature = "parallel")]
    if crate::exec::is_parallel() && tail.len() / n.max(1) > 128 {
        use rayon::prelude::*;
        tail.par_chunks_mut(n).with_min_len(32).for_each(upd);
        return;
    }
    tail.chunks_mut(n).for_each(upd);
}

/// Elimination for `p < 128` on bytes: each pivot row is expanded into its
/// `p - 1` multiples once, so the row update is an add and a conditional subtract.
fn byte_rank(f: PrimeField, rows: usize, n: usize, mut data: Vec<u8>) -> usize {
    let p = f.p() as u8;
    let mut multiples = vec![0u8; p as usize * n];
    let mut rank = 0;
    for c in 0..n {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| data[r * n + c] != 0) else {
            continue;
        };
        if piv != rank {
            for k in c..n {
                data.swap(piv * n + k, rank * n + k);
            }
        }
        let inv = f.inv(data[rank * n + c] as u32);
        let width = n - c;
        for k in 0..width {
            let y = f.mul(data[rank * n + c + k] as u32, inv);
            for m in 1..p as u32 {
                multiples[m as usize * width + k] = f.mul(y, m) as u8;
            }
        }
        let tail = &mut data[(rank + 1) * n..];
        let multiples = &multiples;
        let upd = |row: &mut [u8]| {
            let a = row[c];
            if a != 0 {
                let na = (p - a) as usize;
                let m = &multiples[na * width..(na + 1) * width];
                for (x, &y) in row[c..].iter_mut().zip(m) {
                    let s = *x + y;
                    *x = s.min(s.wrapping_sub(p));
                }
            }
        };
        for_each_row(tail, n, upd);
        rank += 1;
    }
    rank
}
