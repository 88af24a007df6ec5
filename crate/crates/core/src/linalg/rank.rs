//! Rank of large sparse matrices: connected-component splitting, structured
//! elimination (singletons, then Markowitz pivots) and a dense finish.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::dense::{BitMatrix, DenseMatrix};
use super::sparse::{axpy_entries, SparseMatrix};
use crate::exec;
use crate::field::PrimeField;

/// Dense finish is allowed once the active block has at most this many cells.
const DENSE_CELLS_F2: usize = 1 << 28;
const DENSE_CELLS: usize = 1 << 24;
/// Markowitz pivots costlier than this trigger the dense finish when it fits.
const MARKOWITZ_CAP: u64 = 64;

type Col = Vec<(u32, u32)>;

/// A connected block: local row count and columns with local row indices.
pub(crate) struct Block {
    pub rows: usize,
    pub cols: Vec<Col>,
}

pub fn rank(m: &SparseMatrix) -> usize {
    if m.rows() == 0 || m.cols() == 0 || m.is_zero() {
        return 0;
    }
    let field = m.field();
    let blocks = split_components(m);
    exec::map_vec(blocks, |b| rank_block(field, b)).into_iter().sum()
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let g = parent[parent[x as usize] as usize];
        parent[x as usize] = g;
        x = g;
    }
    x
}

/// Splits into blocks of the bipartite row/column incidence graph.
pub(crate) fn split_components(m: &SparseMatrix) -> Vec<Block> {
    let mut parent: Vec<u32> = (0..m.rows() as u32).collect();
    for j in 0..m.cols() {
        let (ri, _) = m.col(j);
        if let Some((&first, rest)) = ri.split_first() {
            let mut a = find(&mut parent, first);
            for &r in rest {
                let b = find(&mut parent, r);
                if a != b {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    parent[hi as usize] = lo;
                    a = lo;
                }
            }
        }
    }
    let mut block_of_root = vec![u32::MAX; m.rows()];
    let mut local = vec![0u32; m.rows()];
    let mut row_counts: Vec<u32> = Vec::new();
    let mut used = vec![false; m.rows()];
    for j in 0..m.cols() {
        for &r in m.col(j).0 {
            used[r as usize] = true;
        }
    }
    for r in 0..m.rows() {
        if !used[r] {
            continue;
        }
        let root = find(&mut parent, r as u32) as usize;
        if block_of_root[root] == u32::MAX {
            block_of_root[root] = row_counts.len() as u32;
            row_counts.push(0);
        }
        let b = block_of_root[root] as usize;
        local[r] = row_counts[b];
        row_counts[b] += 1;
    }
    let mut blocks: Vec<Block> = row_counts.iter().map(|&n| Block { rows: n as usize, cols: Vec::new() }).collect();
    for j in 0..m.cols() {
        let (ri, vs) = m.col(j);
        if ri.is_empty() {
            continue;
        }
        let b = block_of_root[find(&mut parent, ri[0]) as usize] as usize;
        let col: Col = ri.iter().zip(vs).map(|(&r, &v)| (local[r as usize], v)).collect();
        blocks[b].cols.push(col);
    }
    blocks
}

pub(crate) fn rank_block(field: PrimeField, b: Block) -> usize {
    let cells = b.rows.saturating_mul(b.cols.len());
    let cap = if field.p() == 2 { DENSE_CELLS_F2 } else { DENSE_CELLS };
    if cells <= 4096 || (cells <= cap && b.cols.len().min(b.rows) <= 64) {
        return dense_rank(field, b.rows, b.cols.iter());
    }
    Sge::new(field, b).run(cap)
}

fn dense_rank<'a>(field: PrimeField, rows: usize, cols: impl Iterator<Item = &'a Col>) -> usize {
    let cols: Vec<&Col> = cols.collect();
    if field.p() == 2 {
        let mut m = BitMatrix::new(cols.len(), rows);
        for (i, c) in cols.iter().enumerate() {
            for &(r, _) in c.iter() {
                m.set(i, r as usize);
            }
        }
        m.rank()
    } else {
        let mut m = DenseMatrix::new(field, cols.len(), rows);
        for (i, c) in cols.iter().enumerate() {
            for &(r, v) in c.iter() {
                m.set(i, r as usize, v);
            }
        }
        m.rank()
    }
}

/// Structured Gaussian elimination state. Columns hold exact sorted entries;
/// `row_cols` may contain stale column ids, `row_count` is exact.
struct Sge {
    field: PrimeField,
    cols: Vec<Col>,
    col_alive: Vec<bool>,
    row_cols: Vec<Vec<u32>>,
    row_count: Vec<u32>,
    row_alive: Vec<bool>,
    live_cols: usize,
    live_rows: usize,
    live_nnz: usize,
    rank: usize,
    col_queue: Vec<u32>,
    row_queue: Vec<u32>,
    heap: BinaryHeap<Reverse<(u32, u32)>>,
}

impl Sge {
    fn new(field: PrimeField, b: Block) -> Self {
        let mut row_cols: Vec<Vec<u32>> = vec![Vec::new(); b.rows];
        let mut row_count = vec![0u32; b.rows];
        let mut nnz = 0;
        for (j, c) in b.cols.iter().enumerate() {
            nnz += c.len();
            for &(r, _) in c {
                row_cols[r as usize].push(j as u32);
                row_count[r as usize] += 1;
            }
        }
        let ncols = b.cols.len();
        let mut s = Sge {
            field,
            col_alive: vec![true; ncols],
            row_alive: row_count.iter().map(|&c| c > 0).collect(),
            live_rows: row_count.iter().filter(|&&c| c > 0).count(),
            live_cols: ncols,
            live_nnz: nnz,
            cols: b.cols,
            row_cols,
            row_count,
            rank: 0,
            col_queue: Vec::new(),
            row_queue: Vec::new(),
            heap: BinaryHeap::new(),
        };
        for j in 0..ncols {
            if s.cols[j].len() == 1 {
                s.col_queue.push(j as u32);
            }
            s.heap.push(Reverse((s.cols[j].len() as u32, j as u32)));
        }
        for r in 0..s.row_count.len() {
            if s.row_count[r] == 1 {
                s.row_queue.push(r as u32);
            }
        }
        s
    }

    fn contains(&self, c: u32, r: u32) -> bool {
        self.col_alive[c as usize] && self.cols[c as usize].binary_search_by_key(&r, |e| e.0).is_ok()
    }

    fn dec_row(&mut self, r: u32) {
        let k = &mut self.row_count[r as usize];
        *k -= 1;
        if *k == 1 {
            self.row_queue.push(r);
        } else if *k == 0 && self.row_alive[r as usize] {
            self.row_alive[r as usize] = false;
            self.live_rows -= 1;
        }
    }

    fn kill_col(&mut self, c: u32) {
        if !self.col_alive[c as usize] {
            return;
        }
        self.col_alive[c as usize] = false;
        self.live_cols -= 1;
        let col = std::mem::take(&mut self.cols[c as usize]);
        self.live_nnz -= col.len();
        for &(r, _) in &col {
            self.dec_row(r);
        }
    }

    fn after_col_change(&mut self, c: u32) {
        let len = self.cols[c as usize].len();
        if len == 0 {
            self.col_alive[c as usize] = false;
            self.live_cols -= 1;
        } else {
            if len == 1 {
                self.col_queue.push(c);
            }
            self.heap.push(Reverse((len as u32, c)));
        }
    }

    /// Removes row `r` from every live column, without fill (column singleton pivot).
    fn kill_row_plain(&mut self, r: u32) {
        let list = std::mem::take(&mut self.row_cols[r as usize]);
        for &c in &list {
            if !self.col_alive[c as usize] {
                continue;
            }
            let col = &mut self.cols[c as usize];
            if let Ok(k) = col.binary_search_by_key(&r, |e| e.0) {
                col.remove(k);
                self.live_nnz -= 1;
                self.after_col_change(c);
            }
        }
        self.row_count[r as usize] = 0;
        if self.row_alive[r as usize] {
            self.row_alive[r as usize] = false;
            self.live_rows -= 1;
        }
    }

    fn singletons(&mut self) {
        loop {
            if let Some(c) = self.col_queue.pop() {
                if !self.col_alive[c as usize] || self.cols[c as usize].len() != 1 {
                    continue;
                }
                let r = self.cols[c as usize][0].0;
                self.rank += 1;
                self.kill_col(c);
                self.kill_row_plain(r);
                continue;
            }
            if let Some(r) = self.row_queue.pop() {
                if !self.row_alive[r as usize] || self.row_count[r as usize] != 1 {
                    continue;
                }
                let list = std::mem::take(&mut self.row_cols[r as usize]);
                let c = list.iter().copied().find(|&c| self.contains(c, r));
                self.row_cols[r as usize] = list;
                let c = c.expect("row count out of sync");
                self.rank += 1;
                self.kill_col(c);
                continue;
            }
            break;
        }
    }

    /// Cheapest Markowitz pivot among shortest columns.
    fn choose_pivot(&mut self) -> Option<(u64, u32, u32)> {
        let mut best: Option<(u64, u32, u32)> = None;
        let mut seen = 0;
        while let Some(&Reverse((len, c))) = self.heap.peek() {
            if !self.col_alive[c as usize] || self.cols[c as usize].len() as u32 != len {
                self.heap.pop();
                continue;
            }
            if let Some((cost, _, _)) = best {
                if len as u64 - 1 > cost || seen >= 8 {
                    break;
                }
            }
            self.heap.pop();
            seen += 1;
            let (r, cnt) = self.cols[c as usize]
                .iter()
                .map(|&(r, _)| (r, self.row_count[r as usize]))
                .min_by_key(|x| x.1)
                .unwrap();
            let cost = (len as u64 - 1) * (cnt as u64 - 1);
            if best.is_none_or(|b| cost < b.0) {
                if let Some((_, _, bc)) = best {
                    self.heap.push(Reverse((self.cols[bc as usize].len() as u32, bc)));
                }
                best = Some((cost, r, c));
            } else {
                self.heap.push(Reverse((len, c)));
            }
            if cost == 0 {
                break;
            }
        }
        best
    }

    fn eliminate(&mut self, r: u32, c: u32) {
        let f = self.field;
        let pcol = std::mem::take(&mut self.cols[c as usize]);
        let pv = pcol.iter().find(|e| e.0 == r).unwrap().1;
        let ninv = f.neg(f.inv(pv));
        let list = std::mem::take(&mut self.row_cols[r as usize]);
        for &c2 in &list {
            if c2 == c || !self.col_alive[c2 as usize] {
                continue;
            }
            let old = std::mem::take(&mut self.cols[c2 as usize]);
            let Ok(k) = old.binary_search_by_key(&r, |e| e.0) else {
                self.cols[c2 as usize] = old;
                continue;
            };
            let factor = f.mul(old[k].1, ninv);
            let new = axpy_entries(f, &old, factor, &pcol);
            let (mut i, mut j) = (0, 0);
            while i < old.len() || j < new.len() {
                let a = old.get(i).map_or(u32::MAX, |e| e.0);
                let b = new.get(j).map_or(u32::MAX, |e| e.0);
                if a == b {
                    i += 1;
                    j += 1;
                } else if a < b {
                    self.dec_row(a);
                    i += 1;
                } else {
                    self.row_count[b as usize] += 1;
                    self.row_cols[b as usize].push(c2);
                    j += 1;
                }
            }
            self.live_nnz = self.live_nnz + new.len() - old.len();
            self.cols[c2 as usize] = new;
            self.after_col_change(c2);
        }
        self.cols[c as usize] = pcol;
        self.rank += 1;
        self.kill_col(c);
        if self.row_alive[r as usize] {
            self.row_alive[r as usize] = false;
            self.live_rows -= 1;
            self.row_count[r as usize] = 0;
        }
    }

    fn run(mut self, dense_cap: usize) -> usize {
        loop {
            self.singletons();
            if self.live_cols == 0 || self.live_rows == 0 {
                return self.rank;
            }
            let cells = self.live_rows.saturating_mul(self.live_cols);
            let dense_ok = cells <= dense_cap;
            if dense_ok && (self.live_nnz as f64) > 0.05 * cells as f64 {
                return self.finish_dense();
            }
            let Some((cost, r, c)) = self.choose_pivot() else {
                return self.rank;
            };
            if dense_ok && cost > MARKOWITZ_CAP {
                self.heap.push(Reverse((self.cols[c as usize].len() as u32, c)));
                return self.finish_dense();
            }
            self.eliminate(r, c);
        }
    }

    fn finish_dense(self) -> usize {
        let mut local = vec![u32::MAX; self.row_alive.len()];
        let mut n = 0u32;
        for (r, &alive) in self.row_alive.iter().enumerate() {
            if alive {
                local[r] = n;
                n += 1;
            }
        }
        let cols: Vec<Col> = self
            .cols
            .iter()
            .zip(&self.col_alive)
            .filter(|(_, &a)| a)
            .map(|(c, _)| c.iter().map(|&(r, v)| (local[r as usize], v)).collect())
            .collect();
        debug_assert!(cols.iter().all(|c| c.iter().all(|e| e.0 != u32::MAX)));
        self.rank + dense_rank(self.field, n as usize, cols.iter())
    }
}
