//! Finite-dimensional algebras by structure constants, bimodules, tensor
//! powers with the cyclic action, and the twisted diagonal bimodule.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exec;
use crate::field::PrimeField;
use crate::linalg::{SparseMatrix, SparseVec};

/// Mixed-radix index of a tuple of basis indices, factor 0 least significant.
pub fn encode(digits: &[u32], radix: usize) -> usize {
    digits.iter().rev().fold(0usize, |acc, &d| acc * radix + d as usize)
}

pub fn decode(mut x: usize, radix: usize, len: usize, out: &mut Vec<u32>) {
    out.clear();
    for _ in 0..len {
        out.push((x % radix) as u32);
        x /= radix;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra {
    field: PrimeField,
    dim: usize,
    labels: Vec<String>,
    unit: SparseVec,
    mult: Vec<SparseVec>,
    weights: Option<Vec<i64>>,
    /// `Some` when every product of basis elements is zero or a scaled basis element.
    mono: Option<Vec<Option<(u32, u32)>>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Shape(String),
    Associativity { i: usize, j: usize, k: usize },
    LeftUnit { i: usize },
    RightUnit { i: usize },
    Grading { i: usize, j: usize },
}

impl Algebra {
    /// Builds an algebra from structure constants without checking the axioms
    /// (see `check_algebra`). `mult[i * dim + j]` is `e_i * e_j`.
    pub fn from_parts(
        field: PrimeField,
        labels: Vec<String>,
        unit: SparseVec,
        mult: Vec<SparseVec>,
        weights: Option<Vec<i64>>,
    ) -> Result<Self> {
        let dim = labels.len();
        if dim == 0 {
            return Err(Error::InvalidAlgebra("dimension must be at least 1".into()));
        }
        if mult.len() != dim * dim {
            return Err(Error::InvalidAlgebra(format!("expected {} products, got {}", dim * dim, mult.len())));
        }
        let in_range = |v: &SparseVec| v.0.iter().all(|&(k, c)| (k as usize) < dim && c != 0 && c < field.p());
        if !in_range(&unit) || !mult.iter().all(in_range) {
            return Err(Error::InvalidAlgebra("coefficient index or value out of range".into()));
        }
        if weights.as_ref().is_some_and(|w| w.len() != dim) {
            return Err(Error::InvalidAlgebra("weights length differs from dim".into()));
        }
        let mono = mult
            .iter()
            .map(|v| match v.0.len() {
                0 => Some(None),
                1 => Some(Some(v.0[0])),
                _ => None,
            })
            .collect::<Option<Vec<_>>>();
        Ok(Algebra { field, dim, labels, unit, mult, weights, mono })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> &SparseVec {
        &self.unit
    }

    pub fn weights(&self) -> Option<&[i64]> {
        self.weights.as_deref()
    }

    pub fn product(&self, i: usize, j: usize) -> &SparseVec {
        &self.mult[i * self.dim + j]
    }

    /// Product of basis elements when it is a single term (or zero).
    #[inline]
    pub fn mono_product(&self, i: u32, j: u32) -> Option<Option<(u32, u32)>> {
        self.mono.as_ref().map(|m| m[i as usize * self.dim + j as usize])
    }

    pub fn is_monomial(&self) -> bool {
        self.mono.is_some()
    }

    /// The unit is a basis element with coefficient 1.
    pub fn basic_unit(&self) -> Option<u32> {
        match self.unit.0.as_slice() {
            [(i, 1)] => Some(*i),
            _ => None,
        }
    }

    pub fn mul_vec(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let f = self.field;
        let mut acc = Vec::new();
        for &(i, a) in &x.0 {
            for &(j, b) in &y.0 {
                let ab = f.mul(a, b);
                for &(k, c) in &self.product(i as usize, j as usize).0 {
                    acc.push((k, f.mul(ab, c)));
                }
            }
        }
        SparseVec::from_unsorted(f, acc)
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| self.product(i, j) == self.product(j, i)))
    }

    /// Left multiplication by a basis element as a matrix.
    pub fn left_mul_matrix(&self, i: usize) -> SparseMatrix {
        SparseMatrix::from_column_fn(self.field, self.dim, self.dim, |j, buf| buf.extend_from_slice(&self.product(i, j).0))
    }

    pub fn with_labels(&self, labels: Vec<String>) -> Algebra {
        assert_eq!(labels.len(), self.dim);
        Algebra { labels, ..self.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&AlgebraFile::from(self)).expect("algebra serializes")
    }

    pub fn from_json(text: &str) -> Result<Algebra> {
        let file: AlgebraFile = serde_json::from_str(text)?;
        file.try_into()
    }

    /// Content hash of the canonical JSON form.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

/// On-disk algebra definition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub p: u64,
    pub dim: usize,
    pub labels: Vec<String>,
    pub unit: Vec<(u32, u32)>,
    pub mult: Vec<Vec<Vec<(u32, u32)>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<i64>>,
}

impl From<&Algebra> for AlgebraFile {
    fn from(a: &Algebra) -> Self {
        AlgebraFile {
            p: a.field.p() as u64,
            dim: a.dim,
            labels: a.labels.clone(),
            unit: a.unit.0.clone(),
            mult: (0..a.dim).map(|i| (0..a.dim).map(|j| a.product(i, j).0.clone()).collect()).collect(),
            weights: a.weights.clone(),
        }
    }
}

impl TryFrom<AlgebraFile> for Algebra {
    type Error = Error;
    fn try_from(f: AlgebraFile) -> Result<Algebra> {
        let field = PrimeField::new(f.p)?;
        if f.labels.len() != f.dim || f.mult.len() != f.dim || f.mult.iter().any(|r| r.len() != f.dim) {
            return Err(Error::InvalidAlgebra("dim does not match labels or mult shape".into()));
        }
        let canon = |e: Vec<(u32, u32)>| -> Result<SparseVec> {
            let v = SparseVec::from_unsorted(field, e.clone());
            if v.0 != e {
                return Err(Error::InvalidAlgebra("coefficient lists must be sorted, reduced and nonzero".into()));
            }
            Ok(v)
        };
        let unit = canon(f.unit)?;
        let mult = f.mult.into_iter().flatten().map(canon).collect::<Result<Vec<_>>>()?;
        Algebra::from_parts(field, f.labels, unit, mult, f.weights)
    }
}

/// Associativity, unit and grading violations; empty iff the algebra is valid.
pub fn check_algebra(a: &Algebra) -> Vec<Violation> {
    let n = a.dim;
    let mut out = Vec::new();
    let basis: Vec<SparseVec> = (0..n).map(SparseVec::unit).collect();
    let assoc: Vec<Vec<Violation>> = exec::map_range(n, |i| {
        let mut v = Vec::new();
        for j in 0..n {
            let ij = a.product(i, j);
            for k in 0..n {
                let lhs = a.mul_vec(ij, &basis[k]);
                let rhs = a.mul_vec(&basis[i], a.product(j, k));
                if lhs != rhs {
                    v.push(Violation::Associativity { i, j, k });
                }
            }
        }
        v
    });
    out.extend(assoc.into_iter().flatten());
    for i in 0..n {
        if a.mul_vec(&a.unit, &basis[i]) != basis[i] {
            out.push(Violation::LeftUnit { i });
        }
        if a.mul_vec(&basis[i], &a.unit) != basis[i] {
            out.push(Violation::RightUnit { i });
        }
    }
    if let Some(w) = &a.weights {
        for i in 0..n {
            for j in 0..n {
                if a.product(i, j).0.iter().any(|&(k, _)| w[k as usize] != w[i] + w[j]) {
                    out.push(Violation::Grading { i, j });
                }
            }
        }
    }
    out
}

/// A finite group by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    pub labels: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

impl GroupTable {
    pub fn cyclic(n: usize) -> Self {
        GroupTable {
            labels: (0..n).map(|i| if i == 0 { "1".into() } else { format!("g{i}") }).collect(),
            table: (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect(),
        }
    }

    /// S_3 as permutations of {0,1,2}, identity first.
    pub fn symmetric3() -> Self {
        let perms: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
        let names = ["1", "(01)", "(12)", "(02)", "(012)", "(021)"];
        let idx = |q: [usize; 3]| perms.iter().position(|&p| p == q).unwrap();
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        GroupTable { labels: names.iter().map(|s| s.to_string()).collect(), table }
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> Option<usize> {
        let n = self.order();
        (0..n).find(|&e| (0..n).all(|g| self.table[e][g] == g && self.table[g][e] == g))
    }

    pub fn validate(&self) -> Result<usize> {
        let n = self.order();
        if n == 0 || self.labels.len() != n || self.table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::NotAGroup("table is not a square table over 0..n".into()));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]] {
                        return Err(Error::NotAGroup(format!("associativity fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        let e = self.identity().ok_or_else(|| Error::NotAGroup("no identity element".into()))?;
        for a in 0..n {
            if !(0..n).any(|b| self.table[a][b] == e && self.table[b][a] == e) {
                return Err(Error::NotAGroup(format!("element {a} has no inverse")));
            }
        }
        Ok(e)
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.table[a][b] == self.table[b][a]))
    }
}

pub fn group_algebra(g: &GroupTable, field: PrimeField) -> Result<Algebra> {
    let e = g.validate()?;
    let n = g.order();
    let mult = (0..n * n).map(|x| SparseVec(vec![(g.table[x / n][x % n] as u32, 1)])).collect();
    Algebra::from_parts(field, g.labels.clone(), SparseVec::unit(e), mult, None)
}

/// `M_n(k)` with basis `e_ij` at index `i * n + j`.
pub fn matrix_algebra(n: usize, field: PrimeField) -> Algebra {
    assert!(n >= 1);
    let d = n * n;
    let labels = (0..d).map(|x| format!("e{}{}", x / n + 1, x % n + 1)).collect();
    let mult = (0..d * d)
        .map(|x| {
            let (a, b) = (x / d, x % d);
            let (i, j, k, l) = (a / n, a % n, b / n, b % n);
            if j == k {
                SparseVec(vec![((i * n + l) as u32, 1)])
            } else {
                SparseVec::new()
            }
        })
        .collect();
    let unit = SparseVec((0..n).map(|i| ((i * n + i) as u32, 1)).collect());
    Algebra::from_parts(field, labels, unit, mult, None).expect("matrix algebra is well formed")
}

/// Exponent vectors of total degree below `cap`, ordered by degree then lexicographically.
pub fn monomials(nvars: usize, cap: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for deg in 0..cap {
        monomials_of_degree(nvars, deg, &mut out);
    }
    out
}

pub fn monomials_of_degree(nvars: usize, deg: usize, out: &mut Vec<Vec<u32>>) {
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
    }
    let mut cur = vec![0; nvars];
    rec(0, deg as u32, &mut cur, out);
}

fn monomial_label(e: &[u32]) -> String {
    let vars = ["x", "y", "z", "w"];
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| {
            let v = vars.get(i).map_or(format!("x{i}"), |s| s.to_string());
            if k == 1 {
                v
            } else {
                format!("{v}^{k}")
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("")
    }
}

/// `k[x_1..x_n]` modulo all monomials of total degree at least `cap`.
pub fn truncated_polynomial(nvars: usize, cap: usize, field: PrimeField) -> Algebra {
    assert!(nvars >= 1 && cap >= 1);
    let mons = monomials(nvars, cap);
    let index: std::collections::HashMap<Vec<u32>, usize> =
        mons.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let d = mons.len();
    let mult = (0..d * d)
        .map(|x| {
            let s: Vec<u32> = mons[x / d].iter().zip(&mons[x % d]).map(|(a, b)| a + b).collect();
            match index.get(&s) {
                Some(&k) => SparseVec(vec![(k as u32, 1)]),
                None => SparseVec::new(),
            }
        })
        .collect();
    let weights = mons.iter().map(|m| m.iter().map(|&e| e as i64).sum()).collect();
    let labels = mons.iter().map(|m| monomial_label(m)).collect();
    Algebra::from_parts(field, labels, SparseVec::unit(0), mult, Some(weights)).expect("truncated polynomial ring")
}

/// The cyclic permutation of tensor factors on `A^{⊗p}`: factor `j` moves to slot `j+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicSymmetry {
    pub order: usize,
    /// `perm[x]` is the basis index of `σ(e_x)`.
    pub perm: Vec<u32>,
}

impl CyclicSymmetry {
    pub fn permutation_matrix(&self, field: PrimeField) -> SparseMatrix {
        let n = self.perm.len();
        SparseMatrix::from_column_fn(field, n, n, |j, buf| buf.push((self.perm[j], 1)))
    }

    pub fn apply_index(&self, x: usize) -> usize {
        self.perm[x] as usize
    }
}

/// Rotation of a tuple of length `len`: slot `j` moves to slot `j + shift`.
pub fn rotate_index(x: usize, radix: usize, len: usize, shift: usize) -> usize {
    let mut d = Vec::with_capacity(len);
    decode(x, radix, len, &mut d);
    d.rotate_right(shift % len.max(1));
    encode(&d, radix)
}

pub fn tensor_power(a: &Algebra, p: usize) -> Result<(Algebra, CyclicSymmetry)> {
    assert!(p >= 1);
    let d = a.dim;
    let n = exec::check_budget(|| format!("A^(x{p})"), exec::pow_size(d, p))?;
    exec::check_budget(|| format!("structure constants of A^(x{p})"), (n as u128) * (n as u128))?;
    let f = a.field;
    let tensor_vec = |parts: &[&SparseVec]| -> SparseVec {
        let mut acc: Vec<(u32, u32)> = vec![(0, 1)];
        let mut stride = 1u32;
        for v in parts {
            let mut next = Vec::with_capacity(acc.len() * v.len());
            for &(x, c) in &acc {
                for &(k, e) in &v.0 {
                    next.push((x + k * stride, f.mul(c, e)));
                }
            }
            acc = next;
            stride *= d as u32;
        }
        SparseVec::from_unsorted(f, acc)
    };
    let digits = |x: usize| {
        let mut v = Vec::new();
        decode(x, d, p, &mut v);
        v
    };
    let mult: Vec<SparseVec> = exec::map_range(n * n, |x| {
        let (u, v) = (digits(x / n), digits(x % n));
        let parts: Vec<&SparseVec> = (0..p).map(|j| a.product(u[j] as usize, v[j] as usize)).collect();
        tensor_vec(&parts)
    });
    let unit = tensor_vec(&vec![&a.unit; p]);
    let labels = (0..n)
        .map(|x| digits(x).iter().map(|&i| a.labels[i as usize].as_str()).collect::<Vec<_>>().join("⊗"))
        .collect();
    let weights = a.weights.as_ref().map(|w| (0..n).map(|x| digits(x).iter().map(|&i| w[i as usize]).sum()).collect());
    let alg = Algebra::from_parts(f, labels, unit, mult, weights)?;
    let perm = (0..n).map(|x| rotate_index(x, d, p, 1) as u32).collect();
    Ok((alg, CyclicSymmetry { order: p, perm }))
}

/// A bimodule over an algebra of dimension `algebra_dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bimodule {
    field: PrimeField,
    dim: usize,
    algebra_dim: usize,
    /// `left[a * dim + m]` is `e_a · m`.
    left: Vec<SparseVec>,
    /// `right[m * algebra_dim + a]` is `m · e_a`.
    right: Vec<SparseVec>,
    mono: Option<(Vec<Option<(u32, u32)>>, Vec<Option<(u32, u32)>>)>,
}

fn mono_table(v: &[SparseVec]) -> Option<Vec<Option<(u32, u32)>>> {
    v.iter()
        .map(|x| match x.0.len() {
            0 => Some(None),
            1 => Some(Some(x.0[0])),
            _ => None,
        })
        .collect()
}

impl Bimodule {
    pub fn from_parts(field: PrimeField, dim: usize, algebra_dim: usize, left: Vec<SparseVec>, right: Vec<SparseVec>) -> Result<Self> {
        if left.len() != algebra_dim * dim || right.len() != algebra_dim * dim {
            return Err(Error::InvalidAlgebra("bimodule action tables have the wrong size".into()));
        }
        let mono = mono_table(&left).zip(mono_table(&right));
        Ok(Bimodule { field, dim, algebra_dim, left, right, mono })
    }

    pub fn diagonal(a: &Algebra) -> Bimodule {
        let n = a.dim;
        let left = (0..n * n).map(|x| a.product(x / n, x % n).clone()).collect();
        let right = (0..n * n).map(|x| a.product(x / n, x % n).clone()).collect();
        Bimodule::from_parts(a.field, n, n, left, right).expect("diagonal bimodule")
    }

    /// Content hash of both action tables.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{} {} {}", self.field.p(), self.dim, self.algebra_dim));
        for (tag, table) in [("l", &self.left), ("r", &self.right)] {
            h.update(tag);
            for v in table.iter() {
                for (k, c) in &v.0 {
                    h.update(format!("{k}:{c},"));
                }
                h.update(";");
            }
        }
        hex::encode(h.finalize())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn algebra_dim(&self) -> usize {
        self.algebra_dim
    }

    pub fn left(&self, a: usize, m: usize) -> &SparseVec {
        &self.left[a * self.dim + m]
    }

    pub fn right(&self, m: usize, a: usize) -> &SparseVec {
        &self.right[m * self.algebra_dim + a]
    }

    #[inline]
    pub fn mono_left(&self, a: u32, m: u32) -> Option<Option<(u32, u32)>> {
        self.mono.as_ref().map(|t| t.0[a as usize * self.dim + m as usize])
    }

    #[inline]
    pub fn mono_right(&self, m: u32, a: u32) -> Option<Option<(u32, u32)>> {
        self.mono.as_ref().map(|t| t.1[m as usize * self.algebra_dim + a as usize])
    }

    fn act_left(&self, a: usize, v: &SparseVec) -> SparseVec {
        let f = self.field;
        let acc = v.0.iter().flat_map(|&(m, c)| self.left(a, m as usize).0.iter().map(move |&(k, e)| (k, f.mul(c, e)))).collect();
        SparseVec::from_unsorted(f, acc)
    }

    fn act_right(&self, v: &SparseVec, a: usize) -> SparseVec {
        let f = self.field;
        let acc = v.0.iter().flat_map(|&(m, c)| self.right(m as usize, a).0.iter().map(move |&(k, e)| (k, f.mul(c, e)))).collect();
        SparseVec::from_unsorted(f, acc)
    }

    /// Unitality, associativity of both actions and their commutation.
    pub fn check(&self, a: &Algebra) -> Vec<String> {
        let mut out = Vec::new();
        if a.dim != self.algebra_dim {
            out.push("algebra dimension differs".into());
            return out;
        }
        let f = self.field;
        let lin_left = |x: &SparseVec, v: &SparseVec| -> SparseVec {
            let acc = x.0.iter().flat_map(|&(i, c)| self.act_left(i as usize, v).scale(f, c).0).collect();
            SparseVec::from_unsorted(f, acc)
        };
        let lin_right = |v: &SparseVec, x: &SparseVec| -> SparseVec {
            let acc = x.0.iter().flat_map(|&(i, c)| self.act_right(v, i as usize).scale(f, c).0).collect();
            SparseVec::from_unsorted(f, acc)
        };
        for m in 0..self.dim {
            let em = SparseVec::unit(m);
            if lin_left(&a.unit, &em) != em {
                out.push(format!("left unit fails on m={m}"));
            }
            if lin_right(&em, &a.unit) != em {
                out.push(format!("right unit fails on m={m}"));
            }
            for x in 0..a.dim {
                let xm = self.act_left(x, &em);
                let mx = self.act_right(&em, x);
                for y in 0..a.dim {
                    if self.act_right(&xm, y) != lin_left(&SparseVec::unit(x), &self.act_right(&em, y)) {
                        out.push(format!("(x·m)·y != x·(m·y) at x={x} m={m} y={y}"));
                    }
                    if lin_left(a.product(y, x), &em) != self.act_left(y, &xm) {
                        out.push(format!("left action not associative at {y},{x},{m}"));
                    }
                    if lin_right(&em, a.product(x, y)) != self.act_right(&mx, y) {
                        out.push(format!("right action not associative at {m},{x},{y}"));
                    }
                }
            }
        }
        out
    }
}

/// `A^{⊗p}` as a bimodule over itself with right action `b·c = bσ(c)`.
/// Returns the algebra `A^{⊗p}` together with the bimodule.
pub fn twisted_diagonal_bimodule(a: &Algebra, p: usize) -> Result<(Algebra, Bimodule)> {
    let (ap, sigma) = tensor_power(a, p)?;
    let n = ap.dim;
    let left = (0..n * n).map(|x| ap.product(x / n, x % n).clone()).collect();
    let right = (0..n * n).map(|x| ap.product(x / n, sigma.apply_index(x % n)).clone()).collect();
    let m = Bimodule::from_parts(ap.field, n, n, left, right)?;
    Ok((ap, m))
}

/// Frobenius twist over a prime field: the same algebra with relabeled basis.
pub fn frobenius_twist(a: &Algebra) -> Algebra {
    const SUFFIX: &str = "^(1)";
    let labels = a
        .labels
        .iter()
        .map(|l| if l.ends_with(SUFFIX) { l.clone() } else { format!("{l}{SUFFIX}") })
        .collect();
    a.with_labels(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fld(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn constructors_are_valid() {
        let f2 = fld(2);
        assert!(check_algebra(&group_algebra(&GroupTable::cyclic(2), f2).unwrap()).is_empty());
        assert!(check_algebra(&matrix_algebra(2, fld(3))).is_empty());
        let s3 = group_algebra(&GroupTable::symmetric3(), fld(5)).unwrap();
        assert_eq!(s3.dim(), 6);
        assert!(!s3.is_commutative());
        assert!(check_algebra(&s3).is_empty());
        let z3 = group_algebra(&GroupTable::cyclic(3), f2).unwrap();
        assert!(z3.is_commutative());
        assert!(check_algebra(&truncated_polynomial(2, 3, fld(3))).is_empty());
    }

    #[test]
    fn broken_associativity_is_reported() {
        let a = group_algebra(&GroupTable::cyclic(2), fld(2)).unwrap();
        let mut file = AlgebraFile::from(&a);
        file.mult[0][0] = vec![];
        let b = Algebra::try_from(file).unwrap();
        let report = check_algebra(&b);
        assert!(!report.is_empty());
        assert!(matches!(report[0], Violation::Associativity { i: 0, j: 0, .. }));
    }

    #[test]
    fn missing_identity_is_not_a_group() {
        let g = GroupTable { labels: vec!["a".into(), "b".into()], table: vec![vec![1, 1], vec![1, 1]] };
        assert!(matches!(group_algebra(&g, fld(2)), Err(Error::NotAGroup(_))));
    }

    #[test]
    fn matrix_units() {
        let m = matrix_algebra(2, fld(2));
        assert_eq!(m.dim(), 4);
        assert_eq!(m.product(1, 2), &SparseVec(vec![(0, 1)]));
        assert_eq!(matrix_algebra(1, fld(5)).dim(), 1);
    }

    #[test]
    fn truncated_examples() {
        let dual = truncated_polynomial(1, 2, fld(2));
        assert_eq!(dual.dim(), 2);
        assert!(dual.product(1, 1).is_zero());
        assert_eq!(truncated_polynomial(2, 2, fld(3)).dim(), 3);
    }

    #[test]
    fn tensor_square_of_kz2() {
        let a = group_algebra(&GroupTable::cyclic(2), fld(2)).unwrap();
        let (t, s) = tensor_power(&a, 2).unwrap();
        assert_eq!(t.dim(), 4);
        assert!(check_algebra(&t).is_empty());
        for x in 0..4 {
            assert_eq!(s.apply_index(s.apply_index(x)), x);
            for y in 0..4 {
                let want = encode(&[((x % 2) ^ (y % 2)) as u32, ((x / 2) ^ (y / 2)) as u32], 2);
                assert_eq!(t.product(x, y), &SparseVec::unit(want));
                let (sx, sy) = (s.apply_index(x), s.apply_index(y));
                let img: Vec<(u32, u32)> = t.product(x, y).0.iter().map(|&(k, c)| (s.perm[k as usize], c)).collect();
                assert_eq!(t.product(sx, sy).0, img);
            }
        }
        let (_, s3) = tensor_power(&group_algebra(&GroupTable::cyclic(3), fld(2)).unwrap(), 3).unwrap();
        assert!((0..27).any(|x| s3.apply_index(x) != x));
    }

    #[test]
    fn twisted_diagonal_right_action() {
        let a = group_algebra(&GroupTable::cyclic(2), fld(2)).unwrap();
        let (ap, m) = twisted_diagonal_bimodule(&a, 2).unwrap();
        assert!(m.check(&ap).is_empty());
        let g1 = encode(&[1, 0], 2);
        let one = encode(&[0, 0], 2);
        assert_eq!(m.right(one, g1), &SparseVec::unit(encode(&[0, 1], 2)));
        let (a1, m1) = twisted_diagonal_bimodule(&a, 1).unwrap();
        assert_eq!(m1, Bimodule::diagonal(&a1));
    }

    #[test]
    fn json_round_trip_and_twist() {
        let a = truncated_polynomial(2, 3, fld(3));
        let b = Algebra::from_json(&a.to_json()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.hash(), b.hash());
        let t = frobenius_twist(&a);
        assert_eq!(frobenius_twist(&t), t);
        assert!(t.labels()[0].ends_with("^(1)"));
    }
}
