use super::sparse::{SparseMatrix, SparseVec};
use crate::error::{Error, Result};
use crate::field::PrimeField;

/// Incremental reduced echelon basis. Each vector is normalized at its pivot
/// (its smallest index) and vanishes at every other pivot.
#[derive(Debug, Clone)]
pub struct Echelon {
    field: PrimeField,
    ambient: usize,
    vecs: Vec<SparseVec>,
    pivot_of: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl Echelon {
    pub fn new(field: PrimeField, ambient: usize) -> Self {
        Echelon { field, ambient, vecs: Vec::new(), pivot_of: vec![NONE; ambient] }
    }

    pub fn dim(&self) -> usize {
        self.vecs.len()
    }

    /// `v` minus its projection onto the span along the pivot coordinates.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let f = self.field;
        let mut acc: Vec<(u32, u32)> = v.0.clone();
        for &(i, c) in &v.0 {
            let b = self.pivot_of[i as usize];
            if b != NONE {
                let nc = f.neg(c);
                for &(k, x) in &self.vecs[b as usize].0 {
                    acc.push((k, f.mul(nc, x)));
                }
            }
        }
        SparseVec::from_unsorted(f, acc)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let f = self.field;
        let r = self.reduce(v);
        let Some(&(piv, lead)) = r.0.first() else {
            return false;
        };
        let r = r.scale(f, f.inv(lead));
        for b in &mut self.vecs {
            let c = b.get(piv as usize);
            if c != 0 {
                *b = b.axpy(f, f.neg(c), &r);
            }
        }
        self.pivot_of[piv as usize] = self.vecs.len() as u32;
        self.vecs.push(r);
        true
    }

    pub fn into_subspace(self) -> Subspace {
        let mut basis = self.vecs;
        basis.sort_by_key(|v| v.0[0].0);
        Subspace { field: self.field, ambient: self.ambient, basis }
    }
}

/// Subspace of F_p^n in canonical reduced echelon form; equality of
/// subspaces is equality of values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    field: PrimeField,
    ambient: usize,
    basis: Vec<SparseVec>,
}

impl Subspace {
    pub fn zero(field: PrimeField, ambient: usize) -> Self {
        Subspace { field, ambient, basis: Vec::new() }
    }

    pub fn full(field: PrimeField, ambient: usize) -> Self {
        Subspace { field, ambient, basis: (0..ambient).map(SparseVec::unit).collect() }
    }

    pub fn span<'a>(field: PrimeField, ambient: usize, vecs: impl IntoIterator<Item = &'a SparseVec>) -> Self {
        let mut e = Echelon::new(field, ambient);
        for v in vecs {
            e.insert(v);
        }
        e.into_subspace()
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis.iter().map(|v| v.0[0].0 as usize).collect()
    }

    /// Basis as the columns of an `ambient × dim` matrix.
    pub fn basis_matrix(&self) -> SparseMatrix {
        SparseMatrix::from_columns(self.field, self.ambient, &self.basis)
    }

    fn echelon(&self) -> Echelon {
        let mut pivot_of = vec![NONE; self.ambient];
        for (i, v) in self.basis.iter().enumerate() {
            pivot_of[v.0[0].0 as usize] = i as u32;
        }
        Echelon { field: self.field, ambient: self.ambient, vecs: self.basis.clone(), pivot_of }
    }

    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let f = self.field;
        let mut acc: Vec<(u32, u32)> = v.0.clone();
        for b in &self.basis {
            let piv = b.0[0].0 as usize;
            let c = v.get(piv);
            if c != 0 {
                let nc = f.neg(c);
                acc.extend(b.0.iter().map(|&(k, x)| (k, f.mul(nc, x))));
            }
        }
        SparseVec::from_unsorted(f, acc)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|v| other.contains(v))
    }

    /// Coordinates of `v` (assumed in the span) with respect to the basis.
    pub fn coordinates(&self, v: &SparseVec) -> SparseVec {
        let mut out = Vec::new();
        for (i, b) in self.basis.iter().enumerate() {
            let c = v.get(b.0[0].0 as usize);
            if c != 0 {
                out.push((i as u32, c));
            }
        }
        SparseVec(out)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut e = self.echelon();
        for v in &other.basis {
            e.insert(v);
        }
        e.into_subspace()
    }
}

/// Row-reduced echelon form of the row space of `m`.
fn row_space(m: &SparseMatrix) -> Subspace {
    let t = m.transpose();
    Subspace::span(m.field(), m.cols(), t.columns().iter())
}

pub fn kernel_basis(m: &SparseMatrix) -> Subspace {
    let f = m.field();
    let rs = row_space(m);
    let mut is_pivot = vec![false; m.cols()];
    let mut lists: Vec<Vec<(u32, u32)>> = vec![Vec::new(); m.cols()];
    for b in rs.basis() {
        let piv = b.0[0].0;
        is_pivot[piv as usize] = true;
        for &(k, x) in &b.0[1..] {
            lists[k as usize].push((piv, f.neg(x)));
        }
    }
    let vecs: Vec<SparseVec> = (0..m.cols())
        .filter(|&j| !is_pivot[j])
        .map(|j| {
            let mut e = std::mem::take(&mut lists[j]);
            e.push((j as u32, 1));
            SparseVec::from_unsorted(f, e)
        })
        .collect();
    Subspace::span(f, m.cols(), vecs.iter())
}

pub fn image_basis(m: &SparseMatrix) -> Subspace {
    Subspace::span(m.field(), m.rows(), m.columns().iter())
}

/// Canonical complement of `sub` inside `sup`: the vectors of `sup` that
/// vanish on the pivots of `sub`.
pub fn quotient_basis(sub: &Subspace, sup: &Subspace) -> Result<Subspace> {
    if sub.ambient != sup.ambient || !sub.is_subspace_of(sup) {
        return Err(Error::NotContained);
    }
    let reps: Vec<SparseVec> = sup.basis.iter().map(|v| sub.reduce(v)).collect();
    Ok(Subspace::span(sup.field, sup.ambient, reps.iter()))
}

/// Coordinates of a class of `sup/sub` in the basis returned by `quotient_basis`.
pub fn quotient_coordinates(sub: &Subspace, quot: &Subspace, v: &SparseVec) -> SparseVec {
    quot.coordinates(&sub.reduce(v))
}

pub fn induced_map(
    f: &SparseMatrix,
    src_ker: &Subspace,
    src_im: &Subspace,
    dst_ker: &Subspace,
    dst_im: &Subspace,
) -> Result<SparseMatrix> {
    if f.cols() != src_ker.ambient || f.rows() != dst_ker.ambient {
        return Err(Error::DimensionMismatch {
            op: "induced_map",
            detail: format!("map is {}x{}, spaces live in {} and {}", f.rows(), f.cols(), src_ker.ambient, dst_ker.ambient),
        });
    }
    for v in src_ker.basis() {
        if !dst_ker.contains(&f.apply(v)) {
            return Err(Error::NotChainCompatible("f(src_ker) is not inside dst_ker".into()));
        }
    }
    for v in src_im.basis() {
        if !dst_im.contains(&f.apply(v)) {
            return Err(Error::NotChainCompatible("f(src_im) is not inside dst_im".into()));
        }
    }
    let qs = quotient_basis(src_im, src_ker)?;
    let qd = quotient_basis(dst_im, dst_ker)?;
    let cols: Vec<SparseVec> = qs.basis().iter().map(|q| quotient_coordinates(dst_im, &qd, &f.apply(q))).collect();
    Ok(SparseMatrix::from_columns(f.field(), qd.dim(), &cols))
}
