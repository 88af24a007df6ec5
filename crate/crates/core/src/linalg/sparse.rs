use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::exec;
use crate::field::PrimeField;

/// Sparse vector: strictly increasing indices, nonzero values.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SparseVec(pub Vec<(u32, u32)>);

impl SparseVec {
    pub fn new() -> Self {
        SparseVec(Vec::new())
    }

    pub fn unit(i: usize) -> Self {
        SparseVec(vec![(i as u32, 1)])
    }

    /// Sorts, merges duplicates mod p and drops zeros.
    pub fn from_unsorted(field: PrimeField, mut e: Vec<(u32, u32)>) -> Self {
        canonicalize(field, &mut e);
        SparseVec(e)
    }

    pub fn from_dense(field: PrimeField, v: &[u32]) -> Self {
        SparseVec(
            v.iter()
                .enumerate()
                .filter_map(|(i, &x)| {
                    let x = x % field.p();
                    (x != 0).then_some((i as u32, x))
                })
                .collect(),
        )
    }

    pub fn to_dense(&self, n: usize) -> Vec<u32> {
        let mut out = vec![0; n];
        for &(i, v) in &self.0 {
            out[i as usize] = v;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u32 {
        match self.0.binary_search_by_key(&(i as u32), |e| e.0) {
            Ok(k) => self.0[k].1,
            Err(_) => 0,
        }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.last().map(|e| e.0 as usize)
    }

    /// `self + c * other`.
    pub fn axpy(&self, field: PrimeField, c: u32, other: &SparseVec) -> SparseVec {
        SparseVec(axpy_entries(field, &self.0, c, &other.0))
    }

    pub fn scale(&self, field: PrimeField, c: u32) -> SparseVec {
        if c == 0 {
            return SparseVec::new();
        }
        SparseVec(self.0.iter().map(|&(i, v)| (i, field.mul(v, c))).collect())
    }
}

pub(crate) fn canonicalize(field: PrimeField, e: &mut Vec<(u32, u32)>) {
    if e.len() > 1 {
        e.sort_unstable_by_key(|x| x.0);
    }
    let mut w = 0;
    for r in 0..e.len() {
        let (i, v) = e[r];
        if w > 0 && e[w - 1].0 == i {
            e[w - 1].1 = field.add(e[w - 1].1, v);
        } else {
            e[w] = (i, v % field.p());
            w += 1;
        }
    }
    e.truncate(w);
    e.retain(|x| x.1 != 0);
}

/// `a + c * b` on sorted entry lists.
pub(crate) fn axpy_entries(field: PrimeField, a: &[(u32, u32)], c: u32, b: &[(u32, u32)]) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (ia, va) = a[i];
        let (ib, vb) = b[j];
        if ia < ib {
            out.push((ia, va));
            i += 1;
        } else if ib < ia {
            let v = field.mul(c, vb);
            if v != 0 {
                out.push((ib, v));
            }
            j += 1;
        } else {
            let v = field.add(va, field.mul(c, vb));
            if v != 0 {
                out.push((ia, v));
            }
            i += 1;
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    for &(ib, vb) in &b[j..] {
        let v = field.mul(c, vb);
        if v != 0 {
            out.push((ib, v));
        }
    }
    out
}

/// Compressed sparse column matrix over F_p, kept canonical so that `==` is
/// matrix equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    vals: Vec<u32>,
}

const BUILD_CHUNK: usize = 2048;

impl SparseMatrix {
    pub fn zero(field: PrimeField, rows: usize, cols: usize) -> Self {
        SparseMatrix { field, rows, cols, col_ptr: vec![0; cols + 1], row_idx: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        SparseMatrix {
            field,
            rows: n,
            cols: n,
            col_ptr: (0..=n).collect(),
            row_idx: (0..n as u32).collect(),
            vals: vec![1 % field.p(); n],
        }
    }

    /// Builds column `j` by calling `f(j, buf)`; entries may be unsorted and
    /// repeated. Columns are generated in parallel chunks.
    pub fn from_column_fn<F>(field: PrimeField, rows: usize, cols: usize, f: F) -> Self
    where
        F: Fn(usize, &mut Vec<(u32, u32)>) + Sync + Send,
    {
        let nchunks = cols.div_ceil(BUILD_CHUNK);
        let parts = exec::map_range(nchunks, |c| {
            let lo = c * BUILD_CHUNK;
            let hi = (lo + BUILD_CHUNK).min(cols);
            let mut lens = Vec::with_capacity(hi - lo);
            let mut ri = Vec::new();
            let mut vs = Vec::new();
            let mut buf = Vec::new();
            for j in lo..hi {
                buf.clear();
                f(j, &mut buf);
                canonicalize(field, &mut buf);
                debug_assert!(buf.iter().all(|e| (e.0 as usize) < rows));
                lens.push(buf.len());
                for &(r, v) in &buf {
                    ri.push(r);
                    vs.push(v);
                }
            }
            (lens, ri, vs)
        });
        let nnz: usize = parts.iter().map(|p| p.1.len()).sum();
        let mut col_ptr = Vec::with_capacity(cols + 1);
        col_ptr.push(0);
        let mut row_idx = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        for (lens, ri, vs) in parts {
            for l in lens {
                let last = *col_ptr.last().unwrap();
                col_ptr.push(last + l);
            }
            row_idx.extend(ri);
            vals.extend(vs);
        }
        SparseMatrix { field, rows, cols, col_ptr, row_idx, vals }
    }

    pub fn from_columns(field: PrimeField, rows: usize, columns: &[SparseVec]) -> Self {
        let mut col_ptr = Vec::with_capacity(columns.len() + 1);
        col_ptr.push(0);
        let mut row_idx = Vec::new();
        let mut vals = Vec::new();
        for c in columns {
            for &(r, v) in &c.0 {
                debug_assert!((r as usize) < rows);
                row_idx.push(r);
                vals.push(v);
            }
            col_ptr.push(row_idx.len());
        }
        SparseMatrix { field, rows, cols: columns.len(), col_ptr, row_idx, vals }
    }

    pub fn from_triplets(
        field: PrimeField,
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, u32)>,
    ) -> Result<Self> {
        let mut per_col: Vec<Vec<(u32, u32)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::DimensionMismatch {
                    op: "from_triplets",
                    detail: format!("entry ({r},{c}) outside {rows}x{cols}"),
                });
            }
            per_col[c].push((r as u32, v % field.p()));
        }
        let columns: Vec<SparseVec> = per_col.into_iter().map(|e| SparseVec::from_unsorted(field, e)).collect();
        Ok(Self::from_columns(field, rows, &columns))
    }

    /// Dense constructor from signed integers, mostly for tests.
    pub fn from_dense(field: PrimeField, rows: &[Vec<i64>]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        Self::from_column_fn(field, nr, nc, |j, buf| {
            for (i, row) in rows.iter().enumerate() {
                let v = field.from_i64(row[j]);
                if v != 0 {
                    buf.push((i as u32, v));
                }
            }
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<u32>> {
        let mut out = vec![vec![0; self.cols]; self.rows];
        for j in 0..self.cols {
            let (ri, vs) = self.col(j);
            for (&r, &v) in ri.iter().zip(vs) {
                out[r as usize][j] = v;
            }
        }
        out
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    #[inline]
    pub fn col(&self, j: usize) -> (&[u32], &[u32]) {
        let (a, b) = (self.col_ptr[j], self.col_ptr[j + 1]);
        (&self.row_idx[a..b], &self.vals[a..b])
    }

    pub fn col_vec(&self, j: usize) -> SparseVec {
        let (ri, vs) = self.col(j);
        SparseVec(ri.iter().copied().zip(vs.iter().copied()).collect())
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        (0..self.cols).map(|j| self.col_vec(j)).collect()
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        let (ri, vs) = self.col(c);
        match ri.binary_search(&(r as u32)) {
            Ok(k) => vs[k],
            Err(_) => 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }

    /// Entries in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, u32)> {
        let t = self.transpose();
        let mut out = Vec::with_capacity(self.nnz());
        for r in 0..t.cols {
            let (ci, vs) = t.col(r);
            for (&c, &v) in ci.iter().zip(vs) {
                out.push((r, c as usize, v));
            }
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.rows + 1];
        for &r in &self.row_idx {
            counts[r as usize + 1] += 1;
        }
        for i in 0..self.rows {
            counts[i + 1] += counts[i];
        }
        let col_ptr = counts.clone();
        let mut next = counts;
        let mut row_idx = vec![0u32; self.nnz()];
        let mut vals = vec![0u32; self.nnz()];
        for j in 0..self.cols {
            let (ri, vs) = self.col(j);
            for (&r, &v) in ri.iter().zip(vs) {
                let slot = next[r as usize];
                row_idx[slot] = j as u32;
                vals[slot] = v;
                next[r as usize] += 1;
            }
        }
        SparseMatrix { field: self.field, rows: self.cols, cols: self.rows, col_ptr, row_idx, vals }
    }

    fn check_same_field(&self, other: &SparseMatrix, op: &'static str) -> Result<()> {
        if self.field != other.field {
            return Err(Error::DimensionMismatch {
                op,
                detail: format!("fields {} and {}", self.field, other.field),
            });
        }
        Ok(())
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.check_same_field(other, "mul")?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "mul",
                detail: format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols),
            });
        }
        let f = self.field;
        Ok(SparseMatrix::from_column_fn(f, self.rows, other.cols, |j, buf| {
            let (ki, kv) = other.col(j);
            for (&k, &bv) in ki.iter().zip(kv) {
                let (ri, av) = self.col(k as usize);
                for (&r, &a) in ri.iter().zip(av) {
                    buf.push((r, f.mul(a, bv)));
                }
            }
        }))
    }

    /// `Σ c_i M_i` for matrices of equal shape.
    pub fn lin_comb(terms: &[(u32, &SparseMatrix)]) -> Result<SparseMatrix> {
        let (_, first) = terms.first().ok_or(Error::DimensionMismatch { op: "lin_comb", detail: "no terms".into() })?;
        for (_, m) in terms {
            first.check_same_field(m, "lin_comb")?;
            if m.rows != first.rows || m.cols != first.cols {
                return Err(Error::DimensionMismatch {
                    op: "lin_comb",
                    detail: format!("{}x{} vs {}x{}", first.rows, first.cols, m.rows, m.cols),
                });
            }
        }
        let f = first.field;
        Ok(SparseMatrix::from_column_fn(f, first.rows, first.cols, |j, buf| {
            for &(c, m) in terms {
                if c % f.p() == 0 {
                    continue;
                }
                let (ri, vs) = m.col(j);
                for (&r, &v) in ri.iter().zip(vs) {
                    buf.push((r, f.mul(c, v)));
                }
            }
        }))
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        Self::lin_comb(&[(1, self), (1, other)])
    }

    pub fn sub(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        Self::lin_comb(&[(1, self), (self.field.neg(1), other)])
    }

    pub fn scale(&self, c: u32) -> SparseMatrix {
        let c = c % self.field.p();
        if c == 0 {
            return SparseMatrix::zero(self.field, self.rows, self.cols);
        }
        let mut out = self.clone();
        for v in &mut out.vals {
            *v = self.field.mul(*v, c);
        }
        out
    }

    pub fn neg(&self) -> SparseMatrix {
        self.scale(self.field.neg(1))
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let f = self.field;
        let mut buf = Vec::new();
        for &(k, c) in &v.0 {
            let (ri, vs) = self.col(k as usize);
            for (&r, &a) in ri.iter().zip(vs) {
                buf.push((r, f.mul(a, c)));
            }
        }
        SparseVec::from_unsorted(f, buf)
    }

    pub fn select_cols(&self, cols: &[usize]) -> SparseMatrix {
        let f = self.field;
        SparseMatrix::from_column_fn(f, self.rows, cols.len(), |j, buf| {
            let (ri, vs) = self.col(cols[j]);
            buf.extend(ri.iter().copied().zip(vs.iter().copied()));
        })
    }

    /// Keeps the given rows, renumbered in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> SparseMatrix {
        let mut map = vec![u32::MAX; self.rows];
        for (new, &old) in rows.iter().enumerate() {
            map[old] = new as u32;
        }
        SparseMatrix::from_column_fn(self.field, rows.len(), self.cols, |j, buf| {
            let (ri, vs) = self.col(j);
            for (&r, &v) in ri.iter().zip(vs) {
                let m = map[r as usize];
                if m != u32::MAX {
                    buf.push((m, v));
                }
            }
        })
    }

    /// Block matrix with the given row and column block sizes; missing blocks are zero.
    pub fn from_blocks(
        field: PrimeField,
        row_dims: &[usize],
        col_dims: &[usize],
        blocks: &[(usize, usize, &SparseMatrix)],
    ) -> Result<SparseMatrix> {
        let row_off: Vec<usize> = offsets(row_dims);
        let col_off: Vec<usize> = offsets(col_dims);
        let mut by_col: Vec<Vec<(usize, &SparseMatrix)>> = vec![Vec::new(); col_dims.len()];
        for &(bi, bj, m) in blocks {
            if m.rows != row_dims[bi] || m.cols != col_dims[bj] || m.field != field {
                return Err(Error::DimensionMismatch {
                    op: "from_blocks",
                    detail: format!("block ({bi},{bj}) is {}x{}, expected {}x{}", m.rows, m.cols, row_dims[bi], col_dims[bj]),
                });
            }
            by_col[bj].push((row_off[bi], m));
        }
        let total_rows = *row_off.last().unwrap();
        let total_cols = *col_off.last().unwrap();
        Ok(SparseMatrix::from_column_fn(field, total_rows, total_cols, |j, buf| {
            let bj = col_off.partition_point(|&o| o <= j) - 1;
            let local = j - col_off[bj];
            for &(ro, m) in &by_col[bj] {
                let (ri, vs) = m.col(local);
                buf.extend(ri.iter().zip(vs).map(|(&r, &v)| (r + ro as u32, v)));
            }
        }))
    }

    /// `self^k` for square matrices.
    pub fn pow(&self, k: usize) -> Result<SparseMatrix> {
        let mut acc = SparseMatrix::identity(self.field, self.rows);
        for _ in 0..k {
            acc = self.mul(&acc)?;
        }
        Ok(acc)
    }

    /// Text triples: header `p rows cols`, then `r c v` per line in row-major order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {} {}", self.field.p(), self.rows, self.cols).unwrap();
        for (r, c, v) in self.triplets() {
            writeln!(s, "{r} {c} {v}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<SparseMatrix> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix text".into()))?;
        let h = parse_ints(header, 3)?;
        let field = PrimeField::new(h[0])?;
        let (rows, cols) = (h[1] as usize, h[2] as usize);
        let mut trip = Vec::new();
        let mut prev: Option<(usize, usize)> = None;
        for line in lines {
            let t = parse_ints(line, 3)?;
            let (r, c) = (t[0] as usize, t[1] as usize);
            if prev.is_some_and(|q| q >= (r, c)) {
                return Err(Error::Parse(format!("triples not in row-major order at `{line}`")));
            }
            if t[2] == 0 || t[2] >= field.p() as u64 {
                return Err(Error::Parse(format!("value out of range at `{line}`")));
            }
            prev = Some((r, c));
            trip.push((r, c, t[2] as u32));
        }
        SparseMatrix::from_triplets(field, rows, cols, trip)
    }
}

pub(crate) fn offsets(dims: &[usize]) -> Vec<usize> {
    let mut off = Vec::with_capacity(dims.len() + 1);
    off.push(0);
    for d in dims {
        off.push(off.last().unwrap() + d);
    }
    off
}

fn parse_ints(line: &str, n: usize) -> Result<Vec<u64>> {
    let v: std::result::Result<Vec<u64>, _> = line.split_whitespace().map(|t| t.parse::<u64>()).collect();
    match v {
        Ok(v) if v.len() == n => Ok(v),
        _ => Err(Error::Parse(format!("expected {n} integers in `{line}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn text_round_trip() {
        let m = SparseMatrix::from_dense(f(5), &[vec![1, 0, 3], vec![0, 0, 0], vec![4, 2, 0]]);
        let t = m.to_text();
        assert_eq!(t, "5 3 3\n0 0 1\n0 2 3\n2 0 4\n2 1 2\n");
        assert_eq!(SparseMatrix::from_text(&t).unwrap(), m);
    }

    #[test]
    fn empty_matrices() {
        let m = SparseMatrix::zero(f(2), 0, 4);
        assert_eq!(m.transpose().rows(), 4);
        assert_eq!(SparseMatrix::from_text(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn mul_and_blocks() {
        let fld = f(7);
        let a = SparseMatrix::from_dense(fld, &[vec![1, 2], vec![3, 4]]);
        let b = SparseMatrix::from_dense(fld, &[vec![0, 1], vec![1, 0]]);
        assert_eq!(a.mul(&b).unwrap().to_dense(), vec![vec![2, 1], vec![4, 3]]);
        let blk = SparseMatrix::from_blocks(fld, &[2, 2], &[2], &[(1, 0, &a)]).unwrap();
        assert_eq!(blk.to_dense(), vec![vec![0, 0], vec![0, 0], vec![1, 2], vec![3, 4]]);
        assert!(a.sub(&a).unwrap().is_zero());
    }
}
