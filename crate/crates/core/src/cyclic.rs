//! p-cyclic objects as matrices, the cyclic bicomplex and HC, the filtered
//! complex with two periodicities `u` and `u'`, stabilized HP and Tate homology.
//!
//! Level `[N]` carries the signed `τ` of order `pN`, the faces `m_0..m_{N-1}`
//! to `[N-1]`, `b = Σ_{i<N} (-1)^i m_i` and `b' = Σ_{i<N-1} (-1)^i m_i`.
//! The bicomplex has cells `(c, j)` holding `E([j+1])` in total degree `c + j`;
//! even columns carry `b`, odd columns `b'`, and the horizontal maps are
//! `1 - τ` out of odd columns and the norm `Σ_{k<pN} τ^k` out of even ones.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::algebra::{frobenius_twist, Algebra};
use crate::bar;
use crate::cache;
use crate::complexes::{
    image_rank_mod_boundaries, induced_between, induced_rank_between, map_between, Bicomplex, ChainComplex, Layout,
    Multicomplex, SignConvention,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::field::PrimeField;
use crate::linalg::{kernel_basis, rank, SparseMatrix, SparseVec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjectKind {
    /// `A_#` on `Λ`.
    Cyclic,
    /// `i^*A_#` on `Λ_p`, levels `A^{⊗pN}`.
    PullbackI,
    /// `π^*A^{(1)}_#` on `Λ_p`, levels `A^{(1)⊗N}` with trivial `σ`.
    PullbackPi,
    /// A quotient by a coordinate sub-object.
    Quotient,
    Zero,
    Custom,
}

impl ObjectKind {
    pub fn name(self) -> &'static str {
        match self {
            ObjectKind::Cyclic => "A_#",
            ObjectKind::PullbackI => "i^*A_#",
            ObjectKind::PullbackPi => "pi^*A^(1)_#",
            ObjectKind::Quotient => "quotient",
            ObjectKind::Zero => "zero",
            ObjectKind::Custom => "custom",
        }
    }
}

#[derive(Debug, Default)]
struct LevelOps {
    one_minus_tau: OnceLock<SparseMatrix>,
    norm: OnceLock<SparseMatrix>,
    d_tau: OnceLock<SparseMatrix>,
    sigma: OnceLock<SparseMatrix>,
    one_minus_sigma: OnceLock<SparseMatrix>,
    norm_sigma: OnceLock<SparseMatrix>,
}

#[derive(Debug)]
pub struct Level {
    pub dim: usize,
    pub tau: SparseMatrix,
    /// `m_0, …, m_{N-1}: [N] → [N-1]`; empty at `[1]`.
    pub faces: Vec<SparseMatrix>,
    b: Option<SparseMatrix>,
    bprime: Option<SparseMatrix>,
    ops: LevelOps,
}

impl Clone for Level {
    fn clone(&self) -> Self {
        Level::new(self.tau.clone(), self.faces.clone())
    }
}

/// `Σ_{k<count} t^k`.
fn power_sum(t: &SparseMatrix, count: usize) -> SparseMatrix {
    let f = t.field();
    let n = t.cols();
    let mut acc = SparseMatrix::zero(f, n, n);
    let mut pw = SparseMatrix::identity(f, n);
    for k in 0..count {
        acc = acc.add(&pw).unwrap();
        if k + 1 < count {
            pw = t.mul(&pw).unwrap();
        }
    }
    acc
}

impl Level {
    fn new(tau: SparseMatrix, faces: Vec<SparseMatrix>) -> Self {
        let f = tau.field();
        let n = faces.len();
        let (b, bprime) = if n == 0 {
            (None, None)
        } else {
            let signs: Vec<u32> = (0..n).map(|i| f.sign(i)).collect();
            let terms: Vec<(u32, &SparseMatrix)> = signs.iter().copied().zip(faces.iter()).collect();
            let bp = SparseMatrix::lin_comb(&terms[..n - 1])
                .unwrap_or_else(|_| SparseMatrix::zero(f, faces[0].rows(), faces[0].cols()));
            let b = SparseMatrix::lin_comb(&terms).unwrap();
            (Some(b), Some(bp))
        };
        Level { dim: tau.cols(), tau, faces, b, bprime, ops: LevelOps::default() }
    }

    pub fn b(&self) -> Option<&SparseMatrix> {
        self.b.as_ref()
    }

    pub fn bprime(&self) -> Option<&SparseMatrix> {
        self.bprime.as_ref()
    }
}

/// A p-cyclic object on levels `[1]..=[n_max]`.
#[derive(Debug, Clone)]
pub struct CyclicObjectData {
    pub p: usize,
    pub field: PrimeField,
    pub kind: ObjectKind,
    /// Hash of the algebra it came from, when there is one.
    pub source: Option<String>,
    levels: Vec<Level>,
}

impl CyclicObjectData {
    /// `A_#` for `p = 1`, `i^*A_#` otherwise.
    pub fn from_algebra(a: &Algebra, p: usize, n_max: usize) -> Result<Self> {
        assert!(p >= 1 && n_max >= 1);
        let levels = (1..=n_max)
            .map(|n| {
                let key = |what: String| cache::Key::new(a, &format!("{what}:p={p}"), n);
                let tau = cache::matrix(key("tau".into()), || bar::tau_matrix(a, p, n))?;
                let faces = if n == 1 {
                    Vec::new()
                } else {
                    exec::map_range(n, |i| cache::matrix(key(format!("face{i}")), || bar::face_matrix(a, p, n, i)))
                        .into_iter()
                        .collect::<Result<Vec<_>>>()?
                };
                Ok(Level::new(tau, faces))
            })
            .collect::<Result<Vec<_>>>()?;
        let kind = if p == 1 { ObjectKind::Cyclic } else { ObjectKind::PullbackI };
        let e = CyclicObjectData { p, field: a.field(), kind, source: Some(a.hash()), levels };
        e.verify()?;
        Ok(e)
    }

    /// `π^*A^{(1)}_#`: the cyclic object of the Frobenius twist seen on `Λ_p`.
    pub fn pi_pullback(a: &Algebra, p: usize, n_max: usize) -> Result<Self> {
        let twist = frobenius_twist(a);
        let mut e = CyclicObjectData::from_algebra(&twist, 1, n_max)?;
        e.p = p;
        e.kind = ObjectKind::PullbackPi;
        e.verify()?;
        Ok(e)
    }

    pub fn zero(p: usize, field: PrimeField, n_max: usize) -> Self {
        let levels = (1..=n_max)
            .map(|n| {
                let faces = if n == 1 { Vec::new() } else { (0..n).map(|_| SparseMatrix::zero(field, 0, 0)).collect() };
                Level::new(SparseMatrix::zero(field, 0, 0), faces)
            })
            .collect();
        CyclicObjectData { p, field, kind: ObjectKind::Zero, source: None, levels }
    }

    /// Builds from `(τ, faces)` per level, verifying the relations.
    pub fn from_levels(p: usize, field: PrimeField, kind: ObjectKind, data: Vec<(SparseMatrix, Vec<SparseMatrix>)>) -> Result<Self> {
        let levels = data.into_iter().map(|(t, f)| Level::new(t, f)).collect();
        let e = CyclicObjectData { p, field, kind, source: None, levels };
        e.verify()?;
        Ok(e)
    }

    /// Same data without re-verification; used to probe deliberately broken objects.
    pub fn from_levels_unchecked(p: usize, field: PrimeField, kind: ObjectKind, data: Vec<(SparseMatrix, Vec<SparseMatrix>)>) -> Self {
        let levels = data.into_iter().map(|(t, f)| Level::new(t, f)).collect();
        CyclicObjectData { p, field, kind, source: None, levels }
    }

    pub fn n_max(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, n: usize) -> &Level {
        &self.levels[n - 1]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.dim).collect()
    }

    /// Levels `[1]..=[n]` only.
    pub fn truncate(&self, n: usize) -> Self {
        let mut e = self.clone();
        e.levels.truncate(n);
        e
    }

    fn need(&self, n: usize, what: &str) -> Result<()> {
        if n > self.n_max() {
            return Err(Error::WindowTooSmall(format!("{what} needs level [{n}], object has levels up to [{}]", self.n_max())));
        }
        Ok(())
    }

    /// Checks `m_{i+1}τ = -τ m_i`, `m_0 τ = (-1)^{N-1} m_{N-1}` and `τ^{pN} = 1` on every level.
    pub fn verify(&self) -> Result<()> {
        let f = self.field;
        let checks = exec::map_range(self.levels.len(), |k| -> Result<Option<String>> {
            let n = k + 1;
            let l = &self.levels[k];
            if l.tau.rows() != l.dim || l.tau.cols() != l.dim {
                return Ok(Some(format!("τ at [{n}] is not square")));
            }
            if power_order_fails(&l.tau, self.p * n) {
                return Ok(Some(format!("τ^{} != 1 at [{n}]", self.p * n)));
            }
            if n == 1 {
                return Ok(None);
            }
            if l.faces.len() != n {
                return Ok(Some(format!("level [{n}] needs {n} faces")));
            }
            let prev = &self.levels[k - 1];
            for (i, m) in l.faces.iter().enumerate() {
                if m.rows() != prev.dim || m.cols() != l.dim {
                    return Ok(Some(format!("m_{i} at [{n}] has the wrong shape")));
                }
            }
            for i in 0..n - 1 {
                let lhs = l.faces[i + 1].mul(&l.tau)?;
                let rhs = prev.tau.mul(&l.faces[i])?.neg();
                if lhs != rhs {
                    return Ok(Some(format!("m_{} τ != -τ m_{i} at [{n}]", i + 1)));
                }
            }
            let lhs = l.faces[0].mul(&l.tau)?;
            let rhs = l.faces[n - 1].scale(f.sign(n - 1));
            if lhs != rhs {
                return Ok(Some(format!("m_0 τ != ±m_{} at [{n}]", n - 1)));
            }
            Ok(None)
        });
        for c in checks {
            if let Some(msg) = c? {
                return Err(Error::NotChainCompatible(format!("cyclic relations: {msg}")));
            }
        }
        Ok(())
    }

    pub fn one_minus_tau(&self, n: usize) -> &SparseMatrix {
        let l = self.level(n);
        l.ops.one_minus_tau.get_or_init(|| SparseMatrix::identity(self.field, l.dim).sub(&l.tau).unwrap())
    }

    /// `Σ_{k<pN} τ^k = d_τ ∘ N_σ`.
    pub fn norm(&self, n: usize) -> &SparseMatrix {
        let l = self.level(n);
        l.ops.norm.get_or_init(|| self.d_tau(n).mul(self.norm_sigma(n)).unwrap())
    }

    /// `Σ_{k<N} τ^k`.
    pub fn d_tau(&self, n: usize) -> &SparseMatrix {
        let l = self.level(n);
        l.ops.d_tau.get_or_init(|| power_sum(&l.tau, n))
    }

    /// `σ = τ^N`.
    pub fn sigma(&self, n: usize) -> &SparseMatrix {
        let l = self.level(n);
        l.ops.sigma.get_or_init(|| l.tau.pow(n).unwrap())
    }

    pub fn one_minus_sigma(&self, n: usize) -> &SparseMatrix {
        let l = self.level(n);
        l.ops.one_minus_sigma.get_or_init(|| SparseMatrix::identity(self.field, l.dim).sub(self.sigma(n)).unwrap())
    }

    /// `Σ_{k<p} σ^k`.
    pub fn norm_sigma(&self, n: usize) -> &SparseMatrix {
        let l = self.level(n);
        l.ops.norm_sigma.get_or_init(|| power_sum(self.sigma(n), self.p))
    }

    /// Quotient by the sub-object spanned by the listed coordinates of each level.
    pub fn quotient_by_coordinates(&self, dropped: &[Vec<usize>]) -> Result<Self> {
        if dropped.len() != self.n_max() {
            return Err(Error::DimensionMismatch { op: "quotient_by_coordinates", detail: "one coordinate list per level".into() });
        }
        let keep: Vec<Vec<usize>> = self
            .levels
            .iter()
            .zip(dropped)
            .map(|(l, d)| {
                let mut gone = vec![false; l.dim];
                for &x in d {
                    gone[x] = true;
                }
                (0..l.dim).filter(|&x| !gone[x]).collect()
            })
            .collect();
        let stable = |m: &SparseMatrix, src: &[usize], dst_keep: &[usize], dst_dim: usize| -> bool {
            let mut kept = vec![false; dst_dim];
            for &x in dst_keep {
                kept[x] = true;
            }
            src.iter().all(|&c| m.col(c).0.iter().all(|&r| !kept[r as usize]))
        };
        let mut data = Vec::new();
        for (k, l) in self.levels.iter().enumerate() {
            if !stable(&l.tau, &dropped[k], &keep[k], l.dim) {
                return Err(Error::NotChainCompatible(format!("dropped span at [{}] is not τ-stable", k + 1)));
            }
            let tau = l.tau.select_cols(&keep[k]).select_rows(&keep[k]);
            let mut faces = Vec::new();
            for m in &l.faces {
                if !stable(m, &dropped[k], &keep[k - 1], self.levels[k - 1].dim) {
                    return Err(Error::NotChainCompatible(format!("dropped span at [{}] is not stable under faces", k + 1)));
                }
                faces.push(m.select_cols(&keep[k]).select_rows(&keep[k - 1]));
            }
            data.push((tau, faces));
        }
        let mut e = CyclicObjectData::from_levels(self.p, self.field, ObjectKind::Quotient, data)?;
        e.source = self.source.clone();
        Ok(e)
    }
}

fn power_order_fails(t: &SparseMatrix, order: usize) -> bool {
    match t.pow(order) {
        Ok(m) => m != SparseMatrix::identity(t.field(), t.cols()),
        Err(_) => true,
    }
}

/// The named identities between `b`, `b'` and the cyclic operators at level `[n]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub level: usize,
    pub name: String,
    pub holds: bool,
}

pub fn check_identities(e: &CyclicObjectData, n: usize) -> Result<Vec<IdentityCheck>> {
    e.need(n, "identity check")?;
    let mut out = Vec::new();
    let mut push = |name: &str, holds: bool| out.push(IdentityCheck { level: n, name: name.to_string(), holds });
    let l = e.level(n);
    push("τ^(pN) = 1", !power_order_fails(&l.tau, e.p * n));
    let id = SparseMatrix::identity(e.field, l.dim);
    push("(1-τ)·norm = 0", e.one_minus_tau(n).mul(e.norm(n))?.is_zero());
    push("norm·(1-τ) = 0", e.norm(n).mul(e.one_minus_tau(n))?.is_zero());
    push("d_τ(1-τ) = 1-σ", e.d_tau(n).mul(e.one_minus_tau(n))? == id.sub(e.sigma(n))?);
    if n >= 2 {
        let (b, bp) = (l.b().unwrap(), l.bprime().unwrap());
        for i in 0..n - 1 {
            let lhs = l.faces[i + 1].mul(&l.tau)?;
            let rhs = e.level(n - 1).tau.mul(&l.faces[i])?.neg();
            push(&format!("m_{} τ = -τ m_{i}", i + 1), lhs == rhs);
        }
        push("(1-τ) b' = b (1-τ)", e.one_minus_tau(n - 1).mul(bp)? == b.mul(e.one_minus_tau(n))?);
        push("norm b = b' norm", e.norm(n - 1).mul(b)? == bp.mul(e.norm(n))?);
        push("b' d_τ = d_τ b", bp.mul(e.d_tau(n))? == e.d_tau(n - 1).mul(b)?);
        push("b σ = σ b", b.mul(e.sigma(n))? == e.sigma(n - 1).mul(b)?);
        if n >= 3 {
            let (b1, bp1) = (e.level(n - 1).b().unwrap(), e.level(n - 1).bprime().unwrap());
            push("b b = 0", b1.mul(b)?.is_zero());
            push("b' b' = 0", bp1.mul(bp)?.is_zero());
        }
    }
    Ok(out)
}

/// The cyclic bicomplex with all cells of total degree `≤ top`.
pub fn cyclic_bicomplex(e: &CyclicObjectData, top: usize) -> Result<Bicomplex> {
    cyclic_bicomplex_columns(e, top, usize::MAX)
}

fn cyclic_bicomplex_columns(e: &CyclicObjectData, top: usize, cols: usize) -> Result<Bicomplex> {
    e.need(top + 1, "the cyclic bicomplex")?;
    let mut cells = Vec::new();
    for c in 0..=top.min(cols.saturating_sub(1)) {
        for j in 0..=top - c {
            cells.push((c, j));
        }
    }
    let dims = cells.iter().map(|&(c, j)| ((c, j), e.level(j + 1).dim)).collect();
    let h = exec::map_slice(&cells, |&(c, j)| {
        (c >= 1).then(|| ((c, j), if c % 2 == 1 { e.one_minus_tau(j + 1).clone() } else { e.norm(j + 1).clone() }))
    });
    let v = cells
        .iter()
        .filter(|&&(_, j)| j >= 1)
        .map(|&(c, j)| {
            let l = e.level(j + 1);
            ((c, j), if c % 2 == 0 { l.b().unwrap().clone() } else { l.bprime().unwrap().clone() })
        })
        .collect();
    Ok(Bicomplex {
        field: e.field,
        dims,
        h: h.into_iter().flatten().collect(),
        v,
        convention: SignConvention::Commuting,
        complete_upto: top,
    })
}

/// Total complex of the cyclic bicomplex with its cell bookkeeping.
pub struct CyclicTotal {
    pub bicomplex: Bicomplex,
    pub multi: Multicomplex,
    pub index: BTreeMap<(usize, usize), usize>,
    pub total: ChainComplex,
    pub layout: Layout,
}

impl CyclicTotal {
    fn new(b: Bicomplex) -> Result<Self> {
        let (multi, index) = b.to_indexed_multicomplex();
        let (total, layout) = multi.total(b.complete_upto as i64)?;
        Ok(CyclicTotal { bicomplex: b, multi, index, total, layout })
    }

    pub fn build(e: &CyclicObjectData, top: usize) -> Result<Self> {
        CyclicTotal::new(cyclic_bicomplex(e, top)?)
    }

    /// Only the columns `0` and `1`: the complex computing Hochschild homology.
    pub fn hochschild_part(e: &CyclicObjectData, top: usize) -> Result<Self> {
        CyclicTotal::new(cyclic_bicomplex_columns(e, top, 2)?)
    }

    fn identity_blocks(&self, pairs: &[((usize, usize), (usize, usize))], other: &CyclicTotal) -> (Vec<SparseMatrix>, Vec<(usize, usize)>) {
        let mats = pairs.iter().map(|&(_, s)| SparseMatrix::identity(self.bicomplex.field, other.bicomplex.dim(s))).collect();
        let idx = pairs.iter().map(|&(t, s)| (self.index[&t], other.index[&s])).collect();
        (mats, idx)
    }

    /// `u: T_n → T_{n-2}`, shifting columns by two.
    pub fn u_matrix(&self, n: i64) -> SparseMatrix {
        let pairs: Vec<_> = self
            .index
            .keys()
            .filter(|&&(c, j)| c >= 2 && (c + j) as i64 == n)
            .map(|&(c, j)| ((c - 2, j), (c, j)))
            .filter(|(t, _)| self.index.contains_key(t))
            .collect();
        let (mats, idx) = self.identity_blocks(&pairs, self);
        let blocks: Vec<_> = idx.iter().zip(&mats).map(|(&(t, s), m)| (t, s, m)).collect();
        map_between(self.bicomplex.field, &self.layout, n - 2, &self.layout, n, &blocks)
    }

    /// A section of `u`: `T_{n-2} → T_n`, shifting columns up by two.
    fn lift_matrix(&self, n: i64) -> SparseMatrix {
        let pairs: Vec<_> = self
            .index
            .keys()
            .filter(|&&(c, j)| (c + j + 2) as i64 == n)
            .map(|&(c, j)| ((c + 2, j), (c, j)))
            .filter(|(t, _)| self.index.contains_key(t))
            .collect();
        let (mats, idx) = self.identity_blocks(&pairs, self);
        let blocks: Vec<_> = idx.iter().zip(&mats).map(|(&(t, s), m)| (t, s, m)).collect();
        map_between(self.bicomplex.field, &self.layout, n, &self.layout, n - 2, &blocks)
    }

    /// Inclusion of the first two columns `K_n → T_n`.
    fn inclusion_from(&self, k: &CyclicTotal, n: i64) -> SparseMatrix {
        let pairs: Vec<_> = k.index.keys().filter(|&&(c, j)| (c + j) as i64 == n).map(|&cell| (cell, cell)).collect();
        let (mats, idx) = self.identity_blocks(&pairs, k);
        let blocks: Vec<_> = idx.iter().zip(&mats).map(|(&(t, s), m)| (t, s, m)).collect();
        map_between(self.bicomplex.field, &self.layout, n, &k.layout, n, &blocks)
    }

    /// Projection `T_n → K_n` onto the first two columns.
    fn projection_to(&self, k: &CyclicTotal, n: i64) -> SparseMatrix {
        let pairs: Vec<_> = k.index.keys().filter(|&&(c, j)| (c + j) as i64 == n).map(|&cell| (cell, cell)).collect();
        let mats: Vec<SparseMatrix> = pairs.iter().map(|&(c, _)| SparseMatrix::identity(self.bicomplex.field, k.bicomplex.dim(c))).collect();
        let blocks: Vec<_> = pairs.iter().zip(&mats).map(|(&(t, s), m)| (k.index[&t], self.index[&s], m)).collect();
        map_between(self.bicomplex.field, &k.layout, n, &self.layout, n, &blocks)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportKind {
    HH,
    HC,
    HP,
    Tate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UCheck {
    /// `u: HC_{degree+2} → HC_degree`.
    pub degree: usize,
    pub iso: bool,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stabilization {
    pub from_degree: usize,
    pub checks: Vec<UCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub kind: ReportKind,
    pub object: String,
    pub p: usize,
    pub field: u32,
    pub algebra: Option<String>,
    /// Degree of `dims[0]`.
    pub first_degree: usize,
    pub dims: Vec<usize>,
    /// Highest level `[N]` used.
    pub levels_used: usize,
    pub stabilization: Option<Stabilization>,
    pub notes: Vec<String>,
}

impl HomologyReport {
    fn new(kind: ReportKind, e: &CyclicObjectData, first_degree: usize, dims: Vec<usize>, levels_used: usize) -> Self {
        HomologyReport {
            kind,
            object: e.kind.name().to_string(),
            p: e.p,
            field: e.field.p(),
            algebra: e.source.clone(),
            first_degree,
            dims,
            levels_used,
            stabilization: None,
            notes: Vec::new(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kind: {:?}", self.kind);
        let _ = writeln!(s, "object: {}", self.object);
        let _ = writeln!(s, "p: {}", self.p);
        let _ = writeln!(s, "field: F_{}", self.field);
        if let Some(h) = &self.algebra {
            let _ = writeln!(s, "algebra: {h}");
        }
        let _ = writeln!(s, "levels used: [1]..[{}]", self.levels_used);
        let label = if self.kind == ReportKind::HP || self.kind == ReportKind::Tate { "parity" } else { "degree" };
        for (k, d) in self.dims.iter().enumerate() {
            let _ = writeln!(s, "{label} {}: {d}", self.first_degree + k);
        }
        if let Some(st) = &self.stabilization {
            let _ = writeln!(s, "stable from degree: {}", st.from_degree);
            for c in &st.checks {
                let _ = writeln!(s, "u: HC_{} -> HC_{}: {} ({})", c.degree + 2, c.degree, if c.iso { "iso" } else { "not iso" }, c.method);
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

/// Hochschild homology of `E`: homology of the `b` column, degrees `0..=n_max`.
pub fn hh_dims(e: &CyclicObjectData, n_max: usize) -> Result<HomologyReport> {
    e.need(n_max + 2, "HH")?;
    let dims: Vec<usize> = (1..=n_max + 2).map(|n| e.level(n).dim).collect();
    let d: Vec<SparseMatrix> = (2..=n_max + 2).map(|n| e.level(n).b().unwrap().clone()).collect();
    let c = ChainComplex::new_unchecked(e.field, 0, dims, d, true);
    let hh = c.homology_dims(0..=n_max as i64)?;
    Ok(HomologyReport::new(ReportKind::HH, e, 0, hh, n_max + 2))
}

/// `HC_n(E)` for `n ≤ n_max`.
pub fn hc_dims(e: &CyclicObjectData, n_max: usize) -> Result<HomologyReport> {
    let t = CyclicTotal::build(e, n_max + 1)?;
    let dims = t.total.homology_dims(0..=n_max as i64)?;
    Ok(HomologyReport::new(ReportKind::HC, e, 0, dims, n_max + 2))
}

/// Matrix of `u: HC_{n+2} → HC_n` in quotient bases.
pub fn periodicity_u(e: &CyclicObjectData, n: usize) -> Result<SparseMatrix> {
    let t = CyclicTotal::build(e, n + 3)?;
    let n = n as i64;
    induced_between(&t.u_matrix(n + 2), &t.total, n + 2, &t.total, n)
}

/// Ranks in the Connes sequence `HH_n → HC_n → HC_{n-2} → HH_{n-1}` at one degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnesNode {
    pub degree: usize,
    pub hh: usize,
    pub hc: usize,
    pub hc_minus_2: usize,
    pub rank_i: usize,
    pub rank_u: usize,
    pub rank_boundary: usize,
    /// Exactness at `HC_n`, at `HC_{n-2}`, and at `HH_n` when the next boundary is known.
    pub exact: bool,
}

/// Ranks of `I`, `u` and the connecting map for `n ≤ n_max`, with exactness
/// at every node where all three are known.
pub fn connes_check(e: &CyclicObjectData, n_max: usize) -> Result<Vec<ConnesNode>> {
    let t = CyclicTotal::build(e, n_max + 1)?;
    let k = CyclicTotal::hochschild_part(e, n_max + 1)?;
    let f = e.field;
    let mut out = Vec::new();
    for n in 0..=n_max as i64 {
        let hh = k.total.homology_dim(n)?;
        let hc = t.total.homology_dim(n)?;
        let hc2 = if n >= 2 { t.total.homology_dim(n - 2)? } else { 0 };
        let rank_i = induced_rank_between(&t.inclusion_from(&k, n), &k.total, n, &t.total, n)?;
        let rank_u = if n >= 2 { induced_rank_between(&t.u_matrix(n), &t.total, n, &t.total, n - 2)? } else { 0 };
        let rank_boundary = if n >= 2 {
            let d = t.total.d(n).cloned().unwrap_or_else(|| SparseMatrix::zero(f, t.total.dim(n - 1), t.total.dim(n)));
            let m = t.projection_to(&k, n - 1).mul(&d)?.mul(&t.lift_matrix(n))?;
            induced_rank_between(&m, &t.total, n - 2, &k.total, n - 1)?
        } else {
            0
        };
        let exact = hc == rank_i + rank_u && hc2 == rank_u + rank_boundary;
        out.push(ConnesNode { degree: n as usize, hh, hc, hc_minus_2: hc2, rank_i, rank_u, rank_boundary, exact });
    }
    for n in 0..out.len().saturating_sub(1) {
        let next = out[n + 1].rank_boundary;
        if out[n].hh != out[n].rank_i + next {
            out[n].exact = false;
        }
    }
    Ok(out)
}

/// HP from the stabilization window `[bound, bound+2]`.
///
/// `u: HC_{n+2} → HC_n` is certified iso from the exact sequence of
/// `0 → K → T → T[-2] → 0` (`K` the first two columns) when
/// `H_{n+1}(K) = H_{n+2}(K) = 0`, and otherwise by the rank of its induced
/// matrix. Needs levels up to `[bound+6]`.
pub fn hp_stabilized(e: &CyclicObjectData, bound: usize) -> Result<HomologyReport> {
    hp_stabilized_window(e, bound, 2)
}

pub fn hp_stabilized_window(e: &CyclicObjectData, bound: usize, width: usize) -> Result<HomologyReport> {
    let last = bound + width;
    e.need(last + 4, "HP stabilization")?;
    let k = CyclicTotal::hochschild_part(e, last + 3)?;
    let hk: Vec<usize> = exec::map_range(last + 2 - bound, |i| k.total.homology_dim((bound + 1 + i) as i64))
        .into_iter()
        .collect::<Result<_>>()?;
    let k_zero = |m: usize| hk[m - bound - 1] == 0;
    let mut full: Option<CyclicTotal> = None;
    let mut checks = Vec::new();
    for n in bound..=last {
        if k_zero(n + 1) && k_zero(n + 2) {
            checks.push(UCheck { degree: n, iso: true, method: format!("first two columns acyclic in degrees {} and {}", n + 1, n + 2) });
            continue;
        }
        if full.is_none() {
            full = Some(CyclicTotal::build(e, last + 3)?);
        }
        let t = full.as_ref().unwrap();
        let (hi, lo) = (t.total.homology_dim(n as i64 + 2)?, t.total.homology_dim(n as i64)?);
        let r = induced_rank_between(&t.u_matrix(n as i64 + 2), &t.total, n as i64 + 2, &t.total, n as i64)?;
        let iso = r == hi && r == lo;
        checks.push(UCheck { degree: n, iso, method: format!("rank {r} on dims {hi} -> {lo}") });
        if !iso {
            return Err(Error::NotStabilized {
                degree: n,
                detail: format!("u: HC_{} -> HC_{n} has rank {r} between dims {hi} and {lo}", n + 2),
            });
        }
    }
    let t = match full {
        Some(t) => t,
        None => CyclicTotal::build(e, bound + 2)?,
    };
    let a = t.total.homology_dim(bound as i64)?;
    let b = t.total.homology_dim(bound as i64 + 1)?;
    let hp = if bound % 2 == 0 { vec![a, b] } else { vec![b, a] };
    let mut r = HomologyReport::new(ReportKind::HP, e, 0, hp, last + 4);
    r.stabilization = Some(Stabilization { from_degree: bound, checks });
    Ok(r)
}

/// The filtered complex replacing each row of the cyclic bicomplex by its
/// two-periodicity resolution. Cells `(a, β, N)` in degree `a + β + N - 1`.
pub struct HsComplex {
    pub multi: Multicomplex,
    pub cells: Vec<(usize, usize, usize)>,
    pub total: ChainComplex,
    pub layout: Layout,
    index: BTreeMap<(usize, usize, usize), usize>,
}

/// Builds the filtered complex in total degrees `≤ top`. Differential:
/// `σ`-maps (`1-σ` out of odd `a`, `N_σ` out of even `a`), `(-1)^a` times the
/// `τ`-maps (`1-τ` out of odd `β`, `d_τ` out of even `β`), `(-1)^{a+β}` times
/// `b` or `b'`, and `-id` from even `a` to `(a+1, β-2)`.
pub fn hs_complex(e: &CyclicObjectData, top: usize) -> Result<HsComplex> {
    e.need(top + 1, "the filtered complex")?;
    let f = e.field;
    let mut cells = Vec::new();
    for n in 1..=top + 1 {
        for a in 0..=top + 1 - n {
            for beta in 0..=top + 1 - n - a {
                cells.push((a, beta, n));
            }
        }
    }
    let mut multi = Multicomplex::new(f, top as i64);
    let mut index = BTreeMap::new();
    for &(a, beta, n) in &cells {
        let k = multi.add_cell((a + beta + n - 1) as i64, a as i64, e.level(n).dim);
        index.insert((a, beta, n), k);
    }
    let signed = |m: &SparseMatrix, s: bool| if s { m.neg() } else { m.clone() };
    let maps = exec::map_slice(&cells, |&(a, beta, n)| {
        let src = index[&(a, beta, n)];
        let mut out = Vec::new();
        if a >= 1 {
            let m = if a % 2 == 1 { e.one_minus_sigma(n) } else { e.norm_sigma(n) };
            out.push((src, index[&(a - 1, beta, n)], m.clone()));
        }
        if beta >= 1 {
            let m = if beta % 2 == 1 { e.one_minus_tau(n) } else { e.d_tau(n) };
            out.push((src, index[&(a, beta - 1, n)], signed(m, a % 2 == 1)));
        }
        if n >= 2 {
            let l = e.level(n);
            let m = if beta % 2 == 0 { l.b().unwrap() } else { l.bprime().unwrap() };
            out.push((src, index[&(a, beta, n - 1)], signed(m, (a + beta) % 2 == 1)));
        }
        if a % 2 == 0 && beta >= 2 {
            if let Some(&dst) = index.get(&(a + 1, beta - 2, n)) {
                out.push((src, dst, SparseMatrix::identity(f, e.level(n).dim).neg()));
            }
        }
        out
    });
    for (s, t, m) in maps.into_iter().flatten() {
        multi.add_map(s, t, m);
    }
    let (total, layout) = multi.total(top as i64)?;
    total.verify()?;
    Ok(HsComplex { multi, cells, total, layout, index })
}

impl HsComplex {
    fn shift(&self, n: i64, da: usize, db: usize) -> SparseMatrix {
        let f = self.multi.field;
        let pairs: Vec<(usize, usize)> = self
            .cells
            .iter()
            .filter(|&&(a, b, m)| (a + b + m - 1) as i64 == n && a >= da && b >= db)
            .filter_map(|&(a, b, m)| self.index.get(&(a - da, b - db, m)).map(|&t| (t, self.index[&(a, b, m)])))
            .collect();
        let mats: Vec<SparseMatrix> = pairs.iter().map(|&(_, s)| SparseMatrix::identity(f, self.multi.cells[s].dim)).collect();
        let blocks: Vec<_> = pairs.iter().zip(&mats).map(|(&(t, s), m)| (t, s, m)).collect();
        map_between(f, &self.layout, n - 2, &self.layout, n, &blocks)
    }

    fn check_top(&self, n: i64) -> Result<()> {
        if n < 0 || n > self.total.hi() {
            return Err(Error::WindowTooSmall(format!("degree {n} is outside the built range 0..={}", self.total.hi())));
        }
        Ok(())
    }

    /// `u: T_n → T_{n-2}`, two columns to the left.
    pub fn u_matrix(&self, n: i64) -> SparseMatrix {
        self.shift(n, 2, 0)
    }

    /// `u': T_n → T_{n-2}`, two rows down.
    pub fn uprime_matrix(&self, n: i64) -> SparseMatrix {
        self.shift(n, 0, 2)
    }

    /// Rank of `u'` on `HC_n → HC_{n-2}` from `rank[d_n; W u'] - rank d_n`,
    /// where the rows of `W` span the functionals vanishing on `B_{n-2}`.
    pub fn uprime_rank(&self, n: i64) -> Result<usize> {
        self.check_top(n)?;
        if n < 2 {
            return Ok(0);
        }
        let f = self.multi.field;
        let m = self.total.dim(n - 2);
        let w = match self.total.d(n - 1) {
            Some(d) => kernel_basis(&d.transpose()),
            None => crate::linalg::Subspace::full(f, m),
        };
        if w.dim() == 0 {
            return Ok(0);
        }
        let wm = SparseMatrix::from_columns(f, m, w.basis()).transpose();
        let rows = wm.mul(&self.uprime_matrix(n))?;
        let d = self.total.d(n).cloned().unwrap_or_else(|| SparseMatrix::zero(f, self.total.dim(n - 1), self.total.dim(n)));
        let stacked = SparseMatrix::from_blocks(f, &[d.rows(), rows.rows()], &[d.cols()], &[(0, 0, &d), (1, 0, &rows)])?;
        Ok(rank(&stacked) - self.total.rank_d(n))
    }

    /// A cycle `x ∈ Z_n` with `u'x ∉ B_{n-2}`, if one exists.
    pub fn uprime_witness(&self, n: i64) -> Result<Option<SparseVec>> {
        self.check_top(n)?;
        let f = self.multi.field;
        let z = match self.total.d(n) {
            Some(d) => kernel_basis(d),
            None => crate::linalg::Subspace::full(f, self.total.dim(n)),
        };
        let u = self.uprime_matrix(n);
        for x in z.basis() {
            if image_rank_mod_boundaries(&self.total, n - 2, vec![u.apply(x)])? > 0 {
                return Ok(Some(x.clone()));
            }
        }
        Ok(None)
    }
}

/// One row block of the filtered complex for a single representation: `τ` of
/// order `pN` on `V`, cells `(a, β)` in degree `a + β`. Computes `H_*(Z/pN, V)`.
pub fn hs_group_complex(p: usize, n: usize, tau: &SparseMatrix, top: usize) -> Result<ChainComplex> {
    if power_order_fails(tau, p * n) {
        return Err(Error::NotARepresentation(format!("τ^{} != 1", p * n)));
    }
    let f = tau.field();
    let dim = tau.cols();
    let id = SparseMatrix::identity(f, dim);
    let sigma = tau.pow(n)?;
    let (one_minus_sigma, norm_sigma) = (id.sub(&sigma)?, power_sum(&sigma, p));
    let (one_minus_tau, d_tau) = (id.sub(tau)?, power_sum(tau, n));
    let mut multi = Multicomplex::new(f, top as i64 + 1);
    let mut index = BTreeMap::new();
    for a in 0..=top + 1 {
        for beta in 0..=top + 1 - a {
            index.insert((a, beta), multi.add_cell((a + beta) as i64, a as i64, dim));
        }
    }
    for (&(a, beta), &src) in &index {
        if a >= 1 {
            multi.add_map(src, index[&(a - 1, beta)], if a % 2 == 1 { one_minus_sigma.clone() } else { norm_sigma.clone() });
        }
        if beta >= 1 {
            let m = if beta % 2 == 1 { &one_minus_tau } else { &d_tau };
            multi.add_map(src, index[&(a, beta - 1)], if a % 2 == 1 { m.neg() } else { m.clone() });
        }
        if a % 2 == 0 && beta >= 2 {
            if let Some(&dst) = index.get(&(a + 1, beta - 2)) {
                multi.add_map(src, dst, id.neg());
            }
        }
    }
    let (total, _) = multi.total(top as i64 + 1)?;
    total.verify()?;
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UprimeCertificate {
    pub p: usize,
    pub field: u32,
    pub degrees: Vec<usize>,
}

/// Certifies that `u'` induces zero on `HC_n` for every requested degree.
pub fn check_uprime_zero(e: &CyclicObjectData, degrees: &[usize]) -> Result<UprimeCertificate> {
    let Some(&top) = degrees.iter().max() else {
        return Ok(UprimeCertificate { p: e.p, field: e.field.p(), degrees: Vec::new() });
    };
    let hs = hs_complex(e, top)?;
    for &n in degrees {
        if hs.uprime_rank(n as i64)? != 0 {
            let witness = hs.uprime_witness(n as i64)?.map(|v| v.0).unwrap_or_default();
            return Err(Error::NonzeroUPrime {
                degree: n,
                witness: witness.into_iter().map(|(i, c)| (i as usize, c)).collect(),
            });
        }
    }
    let mut degrees = degrees.to_vec();
    degrees.sort_unstable();
    degrees.dedup();
    Ok(UprimeCertificate { p: e.p, field: e.field.p(), degrees })
}

/// Tate homology of `Z/m` acting through `sigma`: `(even, odd)` dims.
pub fn tate_dims(m: usize, sigma: &SparseMatrix) -> Result<(usize, usize)> {
    let n = sigma.cols();
    if sigma.rows() != n {
        return Err(Error::NotARepresentation("the generator is not square".into()));
    }
    if power_order_fails(sigma, m) {
        return Err(Error::NotARepresentation(format!("σ^{m} != 1")));
    }
    let f = sigma.field();
    let d_minus = SparseMatrix::identity(f, n).sub(sigma)?;
    let d_plus = power_sum(sigma, m);
    let (rm, rp) = exec::join(|| rank(&d_minus), || rank(&d_plus));
    Ok((n - rm - rp, n - rp - rm))
}

/// Whether `W` is free over `k[Z/m]`, for `m = char k` prime.
pub fn is_free_module(m: usize, sigma: &SparseMatrix) -> Result<bool> {
    if sigma.field().p() as usize != m {
        return Err(Error::NotARepresentation(format!("freeness test needs m = char k, got m = {m} over F_{}", sigma.field().p())));
    }
    Ok(tate_dims(m, sigma)? == (0, 0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingCertificate {
    pub p: usize,
    pub bound: usize,
    /// Levels checked free over `k[Z/p]`.
    pub free_levels: Vec<usize>,
    /// `HC_n` for `n ≤ bound + 1`.
    pub hc: Vec<usize>,
    pub hp: (usize, usize),
}

/// HP vanishing for an object with free levels: every level used is free over
/// `k[Z/p]` (so the Tate rows are exact), and `HC_bound = HC_{bound+1} = 0`,
/// which with stabilization from `bound` gives `HP = 0`. Needs levels up to `[bound+3]`.
pub fn hp_vanishing_check(e: &CyclicObjectData, bound: usize) -> Result<VanishingCertificate> {
    e.need(bound + 3, "HP vanishing")?;
    let free = exec::map_range(bound + 3, |k| is_free_module(e.p, e.sigma(k + 1)));
    for (k, r) in free.into_iter().enumerate() {
        if !r? {
            return Err(Error::FreenessFailed { level: k + 1 });
        }
    }
    let hc = hc_dims(e, bound + 1)?.dims;
    for n in bound..=bound + 1 {
        if hc[n] != 0 {
            return Err(Error::NotStabilized { degree: n, detail: format!("HC_{n} = {} is not zero", hc[n]) });
        }
    }
    Ok(VanishingCertificate { p: e.p, bound, free_levels: (1..=bound + 3).collect(), hc, hp: (0, 0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{group_algebra, truncated_polynomial, GroupTable};

    fn kz(n: usize, p: u64) -> Algebra {
        group_algebra(&GroupTable::cyclic(n), PrimeField::new(p).unwrap()).unwrap()
    }

    #[test]
    fn ground_field_rows() {
        let k = kz(1, 5);
        let e = CyclicObjectData::from_algebra(&k, 1, 4).unwrap();
        for n in 1..=4 {
            assert_eq!(e.norm(n).get(0, 0), (n as u32 * if n % 2 == 0 { 0 } else { 1 }) % 5);
            let t = e.level(n).tau.get(0, 0);
            assert_eq!(t, if n % 2 == 1 { 1 } else { 4 });
        }
    }

    #[test]
    fn hc_of_ground_field() {
        let e = CyclicObjectData::from_algebra(&kz(1, 5), 1, 8).unwrap();
        assert_eq!(hc_dims(&e, 6).unwrap().dims, vec![1, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn identities_hold_for_kz2_p2() {
        let e = CyclicObjectData::from_algebra(&kz(2, 2), 2, 4).unwrap();
        for n in 1..=4 {
            for c in check_identities(&e, n).unwrap() {
                assert!(c.holds, "{} at [{}]", c.name, c.level);
            }
        }
    }

    #[test]
    fn hs_total_matches_cyclic_bicomplex() {
        for (a, p) in [(kz(2, 2), 2), (kz(3, 2), 1), (truncated_polynomial(1, 2, PrimeField::new(2).unwrap()), 2)] {
            let e = CyclicObjectData::from_algebra(&a, p, 5).unwrap();
            let hs = hs_complex(&e, 4).unwrap();
            let hc = hc_dims(&e, 3).unwrap().dims;
            assert_eq!(hs.total.homology_dims(0..=3).unwrap(), hc);
        }
    }

    #[test]
    fn shifts_commute_on_chains() {
        let e = CyclicObjectData::from_algebra(&kz(2, 2), 2, 6).unwrap();
        let hs = hs_complex(&e, 5).unwrap();
        for n in 4..=5 {
            let a = hs.u_matrix(n - 2).mul(&hs.uprime_matrix(n)).unwrap();
            let b = hs.uprime_matrix(n - 2).mul(&hs.u_matrix(n)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn tate_of_trivial_and_regular() {
        let f = PrimeField::new(2).unwrap();
        assert_eq!(tate_dims(2, &SparseMatrix::identity(f, 1)).unwrap(), (1, 1));
        let swap = SparseMatrix::from_dense(f, &[vec![0, 1], vec![1, 0]]);
        assert_eq!(tate_dims(2, &swap).unwrap(), (0, 0));
        assert!(is_free_module(2, &swap).unwrap());
        assert!(matches!(tate_dims(3, &swap), Err(Error::NotARepresentation(_))));
    }

    #[test]
    fn zero_object() {
        let e = CyclicObjectData::zero(2, PrimeField::new(2).unwrap(), 6);
        assert_eq!(hc_dims(&e, 3).unwrap().dims, vec![0, 0, 0, 0]);
        let u = periodicity_u(&e, 0).unwrap();
        assert!(u.is_zero());
        assert_eq!(hp_vanishing_check(&e, 2).unwrap().hp, (0, 0));
    }

    fn dual2() -> Algebra {
        truncated_polynomial(1, 2, PrimeField::new(2).unwrap())
    }

    #[test]
    fn matrix_algebra_is_morita_trivial() {
        let f = PrimeField::new(3).unwrap();
        let e = CyclicObjectData::from_algebra(&crate::algebra::matrix_algebra(2, f), 1, 6).unwrap();
        assert_eq!(hc_dims(&e, 4).unwrap().dims, vec![1, 0, 1, 0, 1]);
        let r = hp_stabilized(&e, 0).unwrap();
        assert_eq!(r.dims, vec![1, 0]);
    }

    #[test]
    fn pullback_matches_cyclic() {
        for a in [kz(2, 2), kz(3, 2), dual2()] {
            let e1 = CyclicObjectData::from_algebra(&a, 1, 5).unwrap();
            let e2 = CyclicObjectData::from_algebra(&a, 2, 5).unwrap();
            assert_eq!(hc_dims(&e1, 3).unwrap().dims, hc_dims(&e2, 3).unwrap().dims);
        }
    }

    #[test]
    fn uprime_vanishes_in_matching_characteristic() {
        let e = CyclicObjectData::from_algebra(&kz(2, 2), 2, 4).unwrap();
        assert_eq!(check_uprime_zero(&e, &[0, 1, 2, 3]).unwrap().degrees, vec![0, 1, 2, 3]);
        let e = CyclicObjectData::from_algebra(&kz(3, 3), 3, 3).unwrap();
        check_uprime_zero(&e, &[0, 1, 2]).unwrap();
    }

    #[test]
    fn uprime_in_other_characteristic_is_reported() {
        let e = CyclicObjectData::from_algebra(&kz(1, 5), 2, 5).unwrap();
        let hs = hs_complex(&e, 4).unwrap();
        let ranks: Vec<usize> = (0..=4).map(|n| hs.uprime_rank(n).unwrap()).collect();
        assert_eq!(ranks[0], 0);
        assert!(ranks.iter().any(|&r| r > 0), "{ranks:?}");
    }

    #[test]
    fn semisimple_hp() {
        let e = CyclicObjectData::from_algebra(&kz(3, 2), 1, 6).unwrap();
        let r = hp_stabilized(&e, 0).unwrap();
        assert_eq!(r.dims, vec![3, 0]);
        assert_eq!(r.stabilization.unwrap().from_degree, 0);
    }

    #[test]
    fn dual_numbers_do_not_stabilize() {
        let e = CyclicObjectData::from_algebra(&dual2(), 1, 10).unwrap();
        match hp_stabilized(&e, 4) {
            Err(Error::NotStabilized { degree, .. }) => assert!((4..=6).contains(&degree)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn connes_sequence_is_exact() {
        for (a, p) in [(kz(2, 2), 1), (dual2(), 1), (kz(2, 2), 2), (kz(3, 5), 1)] {
            let e = CyclicObjectData::from_algebra(&a, p, 6).unwrap();
            for node in connes_check(&e, 4).unwrap() {
                assert!(node.exact, "{node:?}");
            }
        }
    }

    #[test]
    fn periodicity_on_ground_field_is_iso() {
        let e = CyclicObjectData::from_algebra(&kz(1, 5), 1, 8).unwrap();
        for n in [0, 2, 4] {
            let u = periodicity_u(&e, n).unwrap();
            assert_eq!((u.rows(), u.cols(), rank(&u)), (1, 1, 1));
        }
    }

    #[test]
    fn non_free_level_fails_vanishing() {
        let e = CyclicObjectData::from_algebra(&kz(3, 2), 2, 5).unwrap();
        assert!(matches!(hp_vanishing_check(&e, 2), Err(Error::FreenessFailed { level: 1 })));
    }

    fn periodic_group_homology(m: usize, tau: &SparseMatrix, top: usize) -> Vec<usize> {
        let f = tau.field();
        let n = tau.cols();
        let minus = SparseMatrix::identity(f, n).sub(tau).unwrap();
        let plus = power_sum(tau, m);
        let d: Vec<SparseMatrix> = (1..=top + 1).map(|k| if k % 2 == 1 { minus.clone() } else { plus.clone() }).collect();
        let c = ChainComplex::new(0, vec![n; top + 2], d, true).unwrap();
        c.homology_dims(0..=top as i64).unwrap()
    }

    #[test]
    fn single_row_block_computes_group_homology() {
        let f = PrimeField::new(2).unwrap();
        let cyc4 = SparseMatrix::from_column_fn(f, 8, 8, |j, buf| buf.push((((j + 1) % 4 + 4 * (j / 4)) as u32, 1)));
        let trivial = SparseMatrix::identity(f, 2);
        for tau in [cyc4, trivial] {
            let hs = hs_group_complex(2, 2, &tau, 5).unwrap();
            assert_eq!(hs.homology_dims(0..=5).unwrap(), periodic_group_homology(4, &tau, 5));
        }
    }
}
