//! Chain complexes, bicomplexes and their totalizations, homology, induced
//! maps and spectral-sequence pages of the column filtration.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::exec;
use crate::field::PrimeField;
use crate::linalg::{self, kernel_basis, rank, SparseMatrix, SparseVec, Subspace};

/// A complex with `C_n` for `lo ≤ n ≤ hi` and zero below `lo`. When
/// `truncated` is set the spaces above `hi` are unknown, so `H_hi` is not
/// available.
#[derive(Debug)]
pub struct ChainComplex {
    field: PrimeField,
    lo: i64,
    dims: Vec<usize>,
    d: Vec<SparseMatrix>,
    truncated: bool,
    ranks: Vec<OnceLock<usize>>,
}

impl Clone for ChainComplex {
    fn clone(&self) -> Self {
        ChainComplex::new_unchecked(self.field, self.lo, self.dims.clone(), self.d.clone(), self.truncated)
    }
}

impl ChainComplex {
    /// `d[k]` is `d_{lo+k+1}: C_{lo+k+1} → C_{lo+k}`; shapes and `d∘d = 0` are checked.
    pub fn new(lo: i64, dims: Vec<usize>, d: Vec<SparseMatrix>, truncated: bool) -> Result<Self> {
        let Some(field) = d.first().map(|m| m.field()) else {
            return Err(Error::DimensionMismatch { op: "ChainComplex::new", detail: "no differential to take the field from".into() });
        };
        let c = ChainComplex::new_unchecked(field, lo, dims, d, truncated);
        c.verify()?;
        Ok(c)
    }

    pub fn new_unchecked(field: PrimeField, lo: i64, dims: Vec<usize>, d: Vec<SparseMatrix>, truncated: bool) -> Self {
        let ranks = (0..d.len()).map(|_| OnceLock::new()).collect();
        ChainComplex { field, lo, dims, d, truncated, ranks }
    }

    /// A complex concentrated in the given degrees with no nonzero differential.
    pub fn with_zero_differentials(field: PrimeField, lo: i64, dims: Vec<usize>) -> Self {
        let d = dims.windows(2).map(|w| SparseMatrix::zero(field, w[0], w[1])).collect();
        ChainComplex::new_unchecked(field, lo, dims, d, false)
    }

    pub fn verify(&self) -> Result<()> {
        if self.d.len() + 1 != self.dims.len() {
            return Err(Error::DimensionMismatch { op: "ChainComplex", detail: "need one differential between consecutive degrees".into() });
        }
        for (k, m) in self.d.iter().enumerate() {
            if m.cols() != self.dims[k + 1] || m.rows() != self.dims[k] {
                return Err(Error::DimensionMismatch {
                    op: "ChainComplex",
                    detail: format!("d_{} is {}x{}, expected {}x{}", self.lo + k as i64 + 1, m.rows(), m.cols(), self.dims[k], self.dims[k + 1]),
                });
            }
        }
        let bad = exec::map_range(self.d.len().saturating_sub(1), |k| !self.d[k].mul(&self.d[k + 1]).unwrap().is_zero());
        if let Some(k) = bad.iter().position(|&b| b) {
            return Err(Error::NotChainCompatible(format!("d∘d != 0 at degree {}", self.lo + k as i64 + 2)));
        }
        Ok(())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.dims.len() as i64 - 1
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn dim(&self, n: i64) -> usize {
        if n < self.lo || n > self.hi() {
            0
        } else {
            self.dims[(n - self.lo) as usize]
        }
    }

    /// `d_n: C_n → C_{n-1}` when both ends are stored.
    pub fn d(&self, n: i64) -> Option<&SparseMatrix> {
        if n <= self.lo || n > self.hi() {
            None
        } else {
            Some(&self.d[(n - self.lo - 1) as usize])
        }
    }

    pub fn rank_d(&self, n: i64) -> usize {
        if n <= self.lo || n > self.hi() {
            return 0;
        }
        let k = (n - self.lo - 1) as usize;
        *self.ranks[k].get_or_init(|| rank(&self.d[k]))
    }

    pub fn check_degree(&self, n: i64) -> Result<()> {
        if n < self.lo || n > self.hi() || (n == self.hi() && self.truncated) {
            return Err(Error::OutOfRange(format!("H_{n} needs degrees {}..={} to be known, complex has {}..={}{}",
                n, n + 1, self.lo, self.hi(), if self.truncated { " (truncated)" } else { "" })));
        }
        Ok(())
    }

    pub fn homology_dim(&self, n: i64) -> Result<usize> {
        self.check_degree(n)?;
        Ok(self.dim(n) - self.rank_d(n) - self.rank_d(n + 1))
    }

    pub fn homology_dims(&self, range: std::ops::RangeInclusive<i64>) -> Result<Vec<usize>> {
        for n in range.clone() {
            self.check_degree(n)?;
        }
        let degrees: Vec<i64> = (*range.start()..=*range.end() + 1).collect();
        exec::map_slice(&degrees, |&n| self.rank_d(n));
        range.map(|n| self.homology_dim(n)).collect()
    }

    /// `(Z_n, B_n)` as subspaces of `C_n`.
    pub fn cycles_and_boundaries(&self, n: i64) -> Result<(Subspace, Subspace)> {
        self.check_degree(n)?;
        let z = match self.d(n) {
            Some(d) => kernel_basis(d),
            None => Subspace::full(self.field, self.dim(n)),
        };
        let b = match self.d(n + 1) {
            Some(d) => linalg::image_basis(d),
            None => Subspace::zero(self.field, self.dim(n)),
        };
        Ok((z, b))
    }

    /// Degrees `lo..=hi` as one block-free dump: header, dims, then each
    /// differential in triple format.
    pub fn to_dump(&self) -> String {
        let mut s = format!("complex {} {} {} {}\n", self.field.p(), self.lo, self.hi(), self.truncated as u8);
        s.push_str(&self.dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" "));
        s.push('\n');
        for (k, m) in self.d.iter().enumerate() {
            s.push_str(&format!("d {} {}\n", self.lo + k as i64 + 1, m.nnz()));
            s.push_str(&m.to_text());
        }
        s
    }

    pub fn from_dump(text: &str) -> Result<Self> {
        let bad = |w: &str| Error::Parse(format!("complex dump: {w}"));
        let mut lines = text.lines();
        let head: Vec<&str> = lines.next().ok_or_else(|| bad("empty"))?.split_whitespace().collect();
        if head.len() != 5 || head[0] != "complex" {
            return Err(bad("bad header"));
        }
        let num = |s: &str| s.parse::<i64>().map_err(|_| bad("bad number"));
        let p = num(head[1])? as u64;
        let lo = num(head[2])?;
        let truncated = head[4] == "1";
        let field = PrimeField::new(p)?;
        let dims: Vec<usize> = lines
            .next()
            .ok_or_else(|| bad("missing dims"))?
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| bad("bad dim")))
            .collect::<Result<_>>()?;
        let mut d = Vec::new();
        while let Some(line) = lines.next() {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 || parts[0] != "d" {
                return Err(bad("expected differential header"));
            }
            let nnz: usize = parts[2].parse().map_err(|_| bad("bad nnz"))?;
            let mut block = String::new();
            for _ in 0..=nnz {
                block.push_str(lines.next().ok_or_else(|| bad("truncated matrix"))?);
                block.push('\n');
            }
            d.push(SparseMatrix::from_text(&block)?);
        }
        let c = ChainComplex::new_unchecked(field, lo, dims, d, truncated);
        c.verify()?;
        Ok(c)
    }
}

/// Degreewise maps `f_n: S_n → T_n` for `n` in the common range.
#[derive(Debug, Clone)]
pub struct ChainMap {
    pub source: ChainComplex,
    pub target: ChainComplex,
    lo: i64,
    maps: Vec<SparseMatrix>,
}

impl ChainMap {
    /// `maps[k]` is `f_{lo+k}` with `lo = max(source.lo, target.lo)`.
    pub fn new(source: ChainComplex, target: ChainComplex, maps: Vec<SparseMatrix>) -> Result<Self> {
        let f = ChainMap::new_unchecked(source, target, maps)?;
        f.verify()?;
        Ok(f)
    }

    pub fn new_unchecked(source: ChainComplex, target: ChainComplex, maps: Vec<SparseMatrix>) -> Result<Self> {
        let lo = source.lo().max(target.lo());
        for (k, m) in maps.iter().enumerate() {
            let n = lo + k as i64;
            if m.cols() != source.dim(n) || m.rows() != target.dim(n) {
                return Err(Error::DimensionMismatch { op: "ChainMap", detail: format!("f_{n} has the wrong shape") });
            }
        }
        Ok(ChainMap { source, target, lo, maps })
    }

    pub fn verify(&self) -> Result<()> {
        for k in 1..self.maps.len() {
            let n = self.lo + k as i64;
            let (Some(ds), Some(dt)) = (self.source.d(n), self.target.d(n)) else { continue };
            if self.maps[k - 1].mul(ds)? != dt.mul(&self.maps[k])? {
                return Err(Error::ChainMapViolation { level: n as usize, detail: "f d != d f".into() });
            }
        }
        Ok(())
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn map(&self, n: i64) -> Option<&SparseMatrix> {
        if n < self.lo {
            return None;
        }
        self.maps.get((n - self.lo) as usize)
    }

    pub fn compose(&self, g: &ChainMap) -> Result<ChainMap> {
        let lo = self.lo.max(g.lo);
        let hi = (self.lo + self.maps.len() as i64).min(g.lo + g.maps.len() as i64);
        let maps = (lo..hi).map(|n| g.map(n).unwrap().mul(self.map(n).unwrap())).collect::<Result<Vec<_>>>()?;
        ChainMap::new_unchecked(self.source.clone(), g.target.clone(), maps)
    }
}

/// Matrix of `H_n(f)` in the canonical quotient bases.
pub fn induced_on_homology(f: &ChainMap, n: i64) -> Result<SparseMatrix> {
    let m = f.map(n).ok_or_else(|| Error::OutOfRange(format!("no component of the chain map in degree {n}")))?;
    induced_between(m, &f.source, n, &f.target, n)
}

/// Rank of `H_n(f)`.
pub fn induced_rank(f: &ChainMap, n: i64) -> Result<usize> {
    let m = f.map(n).ok_or_else(|| Error::OutOfRange(format!("no component of the chain map in degree {n}")))?;
    induced_rank_between(m, &f.source, n, &f.target, n)
}

/// Matrix of the map `H_n(S) → H_m(T)` induced by `f: S_n → T_m`, which must
/// send cycles to cycles and boundaries to boundaries.
pub fn induced_between(f: &SparseMatrix, src: &ChainComplex, n: i64, dst: &ChainComplex, m: i64) -> Result<SparseMatrix> {
    let (zs, bs) = src.cycles_and_boundaries(n)?;
    let (zt, bt) = dst.cycles_and_boundaries(m)?;
    linalg::induced_map(f, &zs, &bs, &zt, &bt)
}

/// Rank of the induced map without bases of the target:
/// `rank[d_{m+1} | f(Z_n)] - rank d_{m+1}`.
pub fn induced_rank_between(f: &SparseMatrix, src: &ChainComplex, n: i64, dst: &ChainComplex, m: i64) -> Result<usize> {
    dst.check_degree(m)?;
    let (zs, _) = src.cycles_and_boundaries(n)?;
    image_rank_mod_boundaries(dst, m, zs.basis().iter().map(|v| f.apply(v)).collect())
}

/// `dim (span(vectors) + B_m) / B_m` in `C_m` of `c`.
pub fn image_rank_mod_boundaries(c: &ChainComplex, m: i64, vectors: Vec<SparseVec>) -> Result<usize> {
    c.check_degree(m)?;
    let img = SparseMatrix::from_columns(c.field(), c.dim(m), &vectors);
    let joined = match c.d(m + 1) {
        Some(d) => SparseMatrix::from_blocks(c.field(), &[c.dim(m)], &[d.cols(), img.cols()], &[(0, 0, d), (0, 1, &img)])?,
        None => img,
    };
    Ok(rank(&joined) - c.rank_d(m + 1))
}

/// Whether anticommutation is built in, or the vertical maps get the sign
/// `(-1)^{column}` on totalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignConvention {
    Commuting,
    Anticommuting,
}

/// A bicomplex on cells `(i, j)` with `h: (i,j) → (i-1,j)` and
/// `v: (i,j) → (i,j-1)`, total degree `i + j`. Every cell of total degree
/// at most `complete_upto` is present.
#[derive(Debug, Clone)]
pub struct Bicomplex {
    pub field: PrimeField,
    pub dims: BTreeMap<(usize, usize), usize>,
    pub h: BTreeMap<(usize, usize), SparseMatrix>,
    pub v: BTreeMap<(usize, usize), SparseMatrix>,
    pub convention: SignConvention,
    pub complete_upto: usize,
}

impl Bicomplex {
    pub fn dim(&self, c: (usize, usize)) -> usize {
        self.dims.get(&c).copied().unwrap_or(0)
    }

    /// Checks shapes, `h∘h = 0`, `v∘v = 0` and the (anti)commutation of each square.
    pub fn verify(&self) -> Result<()> {
        let f = self.field;
        for (&(i, j), m) in &self.h {
            if i == 0 || m.cols() != self.dim((i, j)) || m.rows() != self.dim((i - 1, j)) {
                return Err(Error::DimensionMismatch { op: "Bicomplex", detail: format!("h at ({i},{j})") });
            }
        }
        for (&(i, j), m) in &self.v {
            if j == 0 || m.cols() != self.dim((i, j)) || m.rows() != self.dim((i, j - 1)) {
                return Err(Error::DimensionMismatch { op: "Bicomplex", detail: format!("v at ({i},{j})") });
            }
        }
        let cells: Vec<(usize, usize)> = self.dims.keys().copied().collect();
        let failures = exec::map_slice(&cells, |&(i, j)| -> Result<Option<String>> {
            if i >= 2 {
                if let (Some(a), Some(b)) = (self.h.get(&(i, j)), self.h.get(&(i - 1, j))) {
                    if !b.mul(a)?.is_zero() {
                        return Ok(Some(format!("h∘h != 0 at ({i},{j})")));
                    }
                }
            }
            if j >= 2 {
                if let (Some(a), Some(b)) = (self.v.get(&(i, j)), self.v.get(&(i, j - 1))) {
                    if !b.mul(a)?.is_zero() {
                        return Ok(Some(format!("v∘v != 0 at ({i},{j})")));
                    }
                }
            }
            if i >= 1 && j >= 1 {
                let hv = match (self.v.get(&(i - 1, j)), self.h.get(&(i, j))) {
                    (Some(v), Some(h)) => Some(v.mul(h)?),
                    _ => None,
                };
                let vh = match (self.h.get(&(i, j - 1)), self.v.get(&(i, j))) {
                    (Some(h), Some(v)) => Some(h.mul(v)?),
                    _ => None,
                };
                let zero = SparseMatrix::zero(f, self.dim((i - 1, j - 1)), self.dim((i, j)));
                let (x, y) = (hv.unwrap_or_else(|| zero.clone()), vh.unwrap_or(zero));
                let ok = match self.convention {
                    SignConvention::Commuting => x == y,
                    SignConvention::Anticommuting => x.add(&y)?.is_zero(),
                };
                if !ok {
                    return Ok(Some(format!("square at ({i},{j}) does not {}", match self.convention {
                        SignConvention::Commuting => "commute",
                        SignConvention::Anticommuting => "anticommute",
                    })));
                }
            }
            Ok(None)
        });
        for r in failures {
            if let Some(msg) = r? {
                return Err(Error::NotChainCompatible(msg));
            }
        }
        Ok(())
    }

    pub fn to_multicomplex(&self) -> Multicomplex {
        self.to_indexed_multicomplex().0
    }

    /// Keeps the columns `i < cols`.
    pub fn restrict_columns(&self, cols: usize) -> Bicomplex {
        let keep = |c: &(usize, usize)| c.0 < cols;
        Bicomplex {
            field: self.field,
            dims: self.dims.iter().filter(|e| keep(e.0)).map(|(k, v)| (*k, *v)).collect(),
            h: self.h.iter().filter(|e| keep(e.0)).map(|(k, v)| (*k, v.clone())).collect(),
            v: self.v.iter().filter(|e| keep(e.0)).map(|(k, v)| (*k, v.clone())).collect(),
            convention: self.convention,
            complete_upto: self.complete_upto,
        }
    }

    /// The multicomplex with the cell index of every `(i, j)`.
    pub fn to_indexed_multicomplex(&self) -> (Multicomplex, BTreeMap<(usize, usize), usize>) {
        let mut m = Multicomplex::new(self.field, self.complete_upto as i64);
        let mut index = BTreeMap::new();
        for (&(i, j), &d) in &self.dims {
            index.insert((i, j), m.add_cell((i + j) as i64, i as i64, d));
        }
        for (&(i, j), h) in &self.h {
            m.add_map(index[&(i, j)], index[&(i - 1, j)], h.clone());
        }
        for (&(i, j), v) in &self.v {
            let v = if self.convention == SignConvention::Commuting && i % 2 == 1 { v.neg() } else { v.clone() };
            m.add_map(index[&(i, j)], index[&(i, j - 1)], v);
        }
        (m, index)
    }
}

/// Cells with a total degree and a filtration index, joined by maps that
/// already carry their totalization signs.
#[derive(Debug, Clone)]
pub struct Multicomplex {
    pub field: PrimeField,
    pub cells: Vec<Cell>,
    pub maps: Vec<(usize, usize, SparseMatrix)>,
    /// Every cell of total degree at most this value is present.
    pub complete_upto: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub degree: i64,
    pub filtration: i64,
    pub dim: usize,
}

/// Placement of each cell of a total complex: degree, offset, filtration.
#[derive(Debug, Clone)]
pub struct Layout {
    pub lo: i64,
    /// `(degree, offset in C_degree)` per cell.
    pub place: Vec<(i64, usize)>,
    pub dims: Vec<usize>,
}

impl Layout {
    /// Degree and offset of a cell, if it lies in the laid-out range.
    pub fn place_of(&self, cell: usize) -> Option<(i64, usize)> {
        let (d, o) = self.place[cell];
        (d != i64::MIN).then_some((d, o))
    }

    pub fn dim(&self, n: i64) -> usize {
        if n < self.lo {
            return 0;
        }
        self.dims.get((n - self.lo) as usize).copied().unwrap_or(0)
    }
}

/// The map `src_n → dst_m` assembled from blocks `(dst cell, src cell, matrix)`.
pub fn map_between(field: PrimeField, dst: &Layout, m: i64, src: &Layout, n: i64, blocks: &[(usize, usize, &SparseMatrix)]) -> SparseMatrix {
    let placed: Vec<(usize, usize, &SparseMatrix)> = blocks
        .iter()
        .filter_map(|&(t, s, mat)| {
            let (dt, ot) = dst.place_of(t)?;
            let (ds, os) = src.place_of(s)?;
            (dt == m && ds == n).then_some((ot, os, mat))
        })
        .collect();
    assemble(field, dst.dim(m), src.dim(n), &placed)
}

impl Multicomplex {
    pub fn new(field: PrimeField, complete_upto: i64) -> Self {
        Multicomplex { field, cells: Vec::new(), maps: Vec::new(), complete_upto }
    }

    pub fn add_cell(&mut self, degree: i64, filtration: i64, dim: usize) -> usize {
        self.cells.push(Cell { degree, filtration, dim });
        self.cells.len() - 1
    }

    pub fn add_map(&mut self, src: usize, dst: usize, m: SparseMatrix) {
        debug_assert_eq!(self.cells[src].degree, self.cells[dst].degree + 1);
        debug_assert_eq!((m.rows(), m.cols()), (self.cells[dst].dim, self.cells[src].dim));
        self.maps.push((src, dst, m));
    }

    pub fn layout(&self, top: i64) -> Layout {
        let lo = self.cells.iter().map(|c| c.degree).min().unwrap_or(0).min(top);
        let mut dims = vec![0usize; (top - lo + 1).max(0) as usize];
        let mut order: Vec<usize> = (0..self.cells.len()).collect();
        order.sort_by_key(|&k| (self.cells[k].degree, self.cells[k].filtration, k));
        let mut place = vec![(i64::MIN, 0usize); self.cells.len()];
        for k in order {
            let c = self.cells[k];
            if c.degree > top {
                continue;
            }
            let slot = &mut dims[(c.degree - lo) as usize];
            place[k] = (c.degree, *slot);
            *slot += c.dim;
        }
        Layout { lo, place, dims }
    }

    /// The total complex in degrees up to `top`; requires `top ≤ complete_upto`.
    pub fn total(&self, top: i64) -> Result<(ChainComplex, Layout)> {
        if top > self.complete_upto {
            return Err(Error::WindowTooSmall(format!("total degree {top} needs cells beyond the window (complete up to {})", self.complete_upto)));
        }
        let layout = self.layout(top);
        let nd = layout.dims.len();
        let mut per_degree: Vec<Vec<(usize, usize, &SparseMatrix)>> = vec![Vec::new(); nd];
        for (s, t, m) in &self.maps {
            let (ds, os) = layout.place[*s];
            let (dt, ot) = layout.place[*t];
            if ds == i64::MIN || dt == i64::MIN {
                continue;
            }
            per_degree[(ds - layout.lo) as usize].push((ot, os, m));
        }
        let d = exec::map_range(nd.saturating_sub(1), |k| {
            let n = k + 1;
            assemble(self.field, layout.dims[n - 1], layout.dims[n], &per_degree[n])
        });
        let c = ChainComplex::new_unchecked(self.field, layout.lo, layout.dims.clone(), d, true);
        Ok((c, layout))
    }
}

/// Sums blocks placed at `(row offset, col offset)` into one matrix.
fn assemble(field: PrimeField, rows: usize, cols: usize, blocks: &[(usize, usize, &SparseMatrix)]) -> SparseMatrix {
    let mut by_col: Vec<Vec<(usize, &SparseMatrix)>> = Vec::new();
    let mut col_starts: Vec<usize> = blocks.iter().map(|b| b.1).collect();
    col_starts.sort_unstable();
    col_starts.dedup();
    by_col.resize(col_starts.len(), Vec::new());
    for &(ro, co, m) in blocks {
        let k = col_starts.binary_search(&co).unwrap();
        by_col[k].push((ro, m));
    }
    SparseMatrix::from_column_fn(field, rows, cols, |j, buf| {
        let k = match col_starts.binary_search(&j) {
            Ok(k) => k,
            Err(0) => return,
            Err(k) => k - 1,
        };
        for &(ro, m) in &by_col[k] {
            let local = j - col_starts[k];
            if local < m.cols() {
                let (ri, vs) = m.col(local);
                buf.extend(ri.iter().zip(vs).map(|(&r, &v)| (r + ro as u32, v)));
            }
        }
    })
}

/// Homology of the total complex of a bicomplex.
pub fn total_complex(b: &Bicomplex, top: usize) -> Result<ChainComplex> {
    Ok(b.to_multicomplex().total(top as i64)?.0)
}

/// `dim E_r` for `r = 1..=pages` and the limit page, keyed by `(filtration, degree)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralPages {
    pub pages: Vec<BTreeMap<(i64, i64), usize>>,
    pub infinity: BTreeMap<(i64, i64), usize>,
    pub total: BTreeMap<i64, usize>,
}

/// Spectral sequence of the filtration by cell filtration index, in total
/// degrees `0..complete_upto` (the top degree only feeds the differential).
pub fn spectral_sequence_dims(m: &Multicomplex, pages: usize) -> Result<SpectralPages> {
    spectral_sequence_degrees(m, pages, m.complete_upto - 1)
}

pub fn spectral_sequence_degrees(m: &Multicomplex, pages: usize, max_degree: i64) -> Result<SpectralPages> {
    if max_degree + 1 > m.complete_upto {
        return Err(Error::WindowTooSmall(format!("degree {max_degree} needs the window complete up to {}", max_degree + 1)));
    }
    let (total, layout) = m.total(max_degree + 1)?;
    let field = m.field;
    let fmin = m.cells.iter().map(|c| c.filtration).min().unwrap_or(0);
    let fmax = m.cells.iter().map(|c| c.filtration).max().unwrap_or(0);
    let spread = (fmax - fmin + 2) as usize;
    // filtration index of each coordinate in each degree
    let mut filt: Vec<Vec<i64>> = layout.dims.iter().map(|&d| vec![0; d]).collect();
    for (k, c) in m.cells.iter().enumerate() {
        let (deg, off) = layout.place[k];
        if deg == i64::MIN {
            continue;
        }
        for x in 0..c.dim {
            filt[(deg - layout.lo) as usize][off + x] = c.filtration;
        }
    }
    let lo = layout.lo;
    let dim_total = |n: i64| total.dim(n);
    // Z_r^p(n) = {x ∈ F_p C_n : dx ∈ F_{p-r} C_{n-1}}
    let z = |r: i64, p: i64, n: i64| -> Subspace {
        let ambient = dim_total(n);
        if n < lo || n > max_degree + 1 {
            return Subspace::zero(field, ambient);
        }
        let fv = &filt[(n - lo) as usize];
        let cols: Vec<usize> = (0..ambient).filter(|&x| fv[x] <= p).collect();
        let basis: Vec<SparseVec> = match total.d(n) {
            None => cols.iter().map(|&x| SparseVec::unit(x)).collect(),
            Some(d) => {
                let fr = &filt[(n - 1 - lo) as usize];
                let rows: Vec<usize> = (0..d.rows()).filter(|&y| fr[y] > p - r).collect();
                let sub = d.select_cols(&cols).select_rows(&rows);
                kernel_basis(&sub)
                    .basis()
                    .iter()
                    .map(|v| SparseVec(v.0.iter().map(|&(i, c)| (cols[i as usize] as u32, c)).collect()))
                    .collect()
            }
        };
        Subspace::span(field, ambient, basis.iter())
    };
    let e_dim = |r: i64, p: i64, n: i64| -> usize {
        let zr = z(r, p, n);
        if zr.dim() == 0 {
            return 0;
        }
        let low = z(r - 1, p - 1, n);
        let from = z(r - 1, p + r - 1, n + 1);
        let img: Vec<SparseVec> = match total.d(n + 1) {
            Some(d) => from.basis().iter().map(|v| d.apply(v)).collect(),
            None => Vec::new(),
        };
        let denom = low.sum(&Subspace::span(field, dim_total(n), img.iter()));
        zr.dim() - denom.dim()
    };
    let keys: Vec<(i64, i64)> = (0.max(lo)..=max_degree).flat_map(|n| (fmin..=fmax).map(move |p| (p, n))).collect();
    let page = |r: i64| -> BTreeMap<(i64, i64), usize> {
        exec::map_slice(&keys, |&(p, n)| ((p, n), e_dim(r, p, n))).into_iter().filter(|e| e.1 > 0).collect()
    };
    let pages_out: Vec<_> = (1..=pages as i64).map(page).collect();
    let infinity = page(spread as i64 + 1);
    let mut totals = BTreeMap::new();
    for n in 0.max(lo)..=max_degree {
        totals.insert(n, total.homology_dim(n)?);
    }
    Ok(SpectralPages { pages: pages_out, infinity, total: totals })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fld(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn small_homologies() {
        let f = fld(2);
        let single = ChainComplex::with_zero_differentials(f, 0, vec![1]);
        assert_eq!(single.homology_dims(0..=0).unwrap(), vec![1]);
        let id = ChainComplex::new(0, vec![1, 1], vec![SparseMatrix::identity(f, 1)], false).unwrap();
        assert_eq!(id.homology_dims(0..=1).unwrap(), vec![0, 0]);
        let zero = ChainComplex::new(0, vec![1, 1], vec![SparseMatrix::zero(f, 1, 1)], false).unwrap();
        assert_eq!(zero.homology_dims(0..=1).unwrap(), vec![1, 1]);
        let t = ChainComplex::new(0, vec![1, 1], vec![SparseMatrix::zero(f, 1, 1)], true).unwrap();
        assert!(matches!(t.homology_dims(0..=1), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn dump_round_trip() {
        let f = fld(3);
        let d = SparseMatrix::from_dense(f, &[vec![1, 2]]);
        let c = ChainComplex::new(0, vec![1, 2], vec![d], false).unwrap();
        let back = ChainComplex::from_dump(&c.to_dump()).unwrap();
        assert_eq!(back.to_dump(), c.to_dump());
    }

    fn two_cell(m: SparseMatrix) -> Bicomplex {
        let f = m.field();
        let mut dims = BTreeMap::new();
        dims.insert((0, 0), m.rows());
        dims.insert((1, 0), m.cols());
        let mut h = BTreeMap::new();
        h.insert((1, 0), m);
        Bicomplex { field: f, dims, h, v: BTreeMap::new(), convention: SignConvention::Commuting, complete_upto: 2 }
    }

    #[test]
    fn two_cells_with_identity_are_acyclic() {
        let b = two_cell(SparseMatrix::identity(fld(5), 2));
        b.verify().unwrap();
        let t = total_complex(&b, 2).unwrap();
        assert_eq!(t.homology_dims(0..=1).unwrap(), vec![0, 0]);
        let ss = spectral_sequence_dims(&b.to_multicomplex(), 2).unwrap();
        assert_eq!(ss.pages[0].get(&(0, 0)), Some(&2));
        assert!(ss.pages[1].is_empty());
    }

    #[test]
    fn zero_differentials_give_constant_pages() {
        let b = two_cell(SparseMatrix::zero(fld(2), 1, 3));
        let ss = spectral_sequence_dims(&b.to_multicomplex(), 3).unwrap();
        for p in &ss.pages {
            assert_eq!(p, &ss.infinity);
        }
        assert_eq!(ss.infinity.get(&(1, 1)), Some(&3));
    }

    #[test]
    fn identity_induces_identity() {
        let f = fld(2);
        let d = SparseMatrix::from_dense(f, &[vec![1, 1]]);
        let c = ChainComplex::new(0, vec![1, 2], vec![d], false).unwrap();
        let id = ChainMap::new(c.clone(), c.clone(), vec![SparseMatrix::identity(f, 1), SparseMatrix::identity(f, 2)]).unwrap();
        assert_eq!(induced_on_homology(&id, 1).unwrap(), SparseMatrix::identity(f, 1));
        assert_eq!(induced_rank(&id, 1).unwrap(), 1);
        let zero = ChainMap::new(c.clone(), c, vec![SparseMatrix::zero(f, 1, 1), SparseMatrix::zero(f, 2, 2)]).unwrap();
        assert!(induced_on_homology(&zero, 1).unwrap().is_zero());
    }
}
