//! Quasi-Frobenius maps `F: A^{(1)} → A^{⊗p}`, the induced map
//! `F_#: π^*A^{(1)}_# → i^*A_#`, the Cartier map on periodic cyclic homology
//! and the commutative inverse Cartier isomorphism.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::algebra::{decode, encode, frobenius_twist, group_algebra, tensor_power, Algebra, CyclicSymmetry, GroupTable};
use crate::complexes::{induced_between, map_between};
use crate::cyclic::{hh_dims, hp_stabilized, is_free_module, CyclicObjectData, CyclicTotal, Stabilization};
use crate::derham::{cartier_operator, cohomology_slice, form_basis, Form};
use crate::error::{Error, Result};
use crate::exec;
use crate::field::PrimeField;
use crate::linalg::{image_basis, induced_map, quotient_coordinates, rank, SparseMatrix, SparseVec, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Construction {
    /// Diagonal embedding `g ↦ g^{⊗p}` of a group algebra.
    Group { labels: Vec<String>, table: Vec<Vec<usize>>, field: u32, p: usize },
    /// `v_i ↦ v_i^{⊗p}` on the basis of `V`, extended to `T(V)`.
    Free { dim_v: usize, field: u32, p: usize, weight_cap: usize },
    /// Inverse Cartier map on `k[x_1..x_nvars]`.
    Commutative { nvars: usize, p: usize, weight_cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QfCheck {
    pub name: String,
    /// Weight slice for graded constructions.
    pub weight: Option<usize>,
    pub holds: bool,
    pub detail: String,
}

/// `F` on one slice: source with trivial `Z/p`, target with `σ`.
#[derive(Debug, Clone)]
pub struct QfSlice {
    pub weight: Option<usize>,
    pub matrix: SparseMatrix,
    pub sigma: SparseMatrix,
}

#[derive(Debug, Clone)]
pub struct QuasiFrobenius {
    pub p: usize,
    pub field: PrimeField,
    pub construction: Construction,
    /// `A`, when it is finite-dimensional.
    pub base: Option<Algebra>,
    pub slices: Vec<QfSlice>,
    pub checks: Vec<QfCheck>,
}

impl QuasiFrobenius {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kind: quasi-Frobenius");
        let _ = writeln!(s, "p: {}", self.p);
        let _ = writeln!(s, "field: F_{}", self.field.p());
        if let Some(a) = &self.base {
            let _ = writeln!(s, "algebra: {}", a.hash());
        }
        for c in &self.checks {
            let w = c.weight.map(|w| format!(" (weight {w})")).unwrap_or_default();
            let _ = writeln!(s, "{}{w}: {} {}", c.name, if c.holds { "ok" } else { "FAILED" }, c.detail);
        }
        s
    }
}

fn require_char(field: PrimeField, p: usize) -> Result<()> {
    if field.p() as usize != p {
        return Err(Error::ValidationFailed(format!(
            "Tate condition: over F_{} with p = {p} both Tate groups vanish only for the wrong reason; quasi-Frobenius maps need char k = p",
            field.p()
        )));
    }
    Ok(())
}

/// The checks shared by every slice: equivariance, injectivity, free
/// cokernel and the isomorphism on Tate homology.
fn slice_checks(p: usize, s: &QfSlice) -> Result<Vec<QfCheck>> {
    let f = s.matrix.field();
    let (tgt, src) = (s.matrix.rows(), s.matrix.cols());
    let mut out = Vec::new();
    let mut push = |name: &str, holds: bool, detail: String| {
        out.push(QfCheck { name: name.into(), weight: s.weight, holds, detail });
    };
    push("equivariance", s.sigma.mul(&s.matrix)? == s.matrix, String::new());
    let r = rank(&s.matrix);
    push("injective", r == src, format!("rank {r} of {src}"));
    let full = Subspace::full(f, tgt);
    let image = image_basis(&s.matrix);
    let coker_sigma = induced_map(&s.sigma, &full, &image, &full, &image)?;
    let free = is_free_module(p, &coker_sigma)?;
    push("free cokernel", free, format!("cokernel dim {}", coker_sigma.cols()));
    let id = SparseMatrix::identity(f, tgt);
    let d_minus = id.sub(&s.sigma)?;
    let mut d_plus = SparseMatrix::zero(f, tgt, tgt);
    let mut pw = id.clone();
    for _ in 0..p {
        d_plus = d_plus.add(&pw)?;
        pw = s.sigma.mul(&pw)?;
    }
    let (ker_m, im_p) = (crate::linalg::kernel_basis(&d_minus), image_basis(&d_plus));
    let (ker_p, im_m) = (crate::linalg::kernel_basis(&d_plus), image_basis(&d_minus));
    let src_full = Subspace::full(f, src);
    let src_zero = Subspace::zero(f, src);
    let even = induced_map(&s.matrix, &src_full, &src_zero, &ker_m, &im_p)?;
    let odd = induced_map(&s.matrix, &src_full, &src_zero, &ker_p, &im_m)?;
    let iso = |m: &SparseMatrix| m.rows() == m.cols() && rank(m) == m.cols();
    push(
        "Tate isomorphism",
        iso(&even) && iso(&odd),
        format!("dims ({src},{src}) -> ({},{})", even.rows(), odd.rows()),
    );
    Ok(out)
}

fn finish(mut qf: QuasiFrobenius, extra: Vec<QfCheck>) -> Result<QuasiFrobenius> {
    let mut checks = extra;
    for s in &qf.slices {
        checks.extend(slice_checks(qf.p, s)?);
    }
    qf.checks = checks;
    let failed: Vec<String> = qf
        .checks
        .iter()
        .filter(|c| !c.holds)
        .map(|c| format!("{}{}", c.name, c.weight.map(|w| format!(" at weight {w}")).unwrap_or_default()))
        .collect();
    if !failed.is_empty() {
        return Err(Error::ValidationFailed(failed.join(", ")));
    }
    Ok(qf)
}

/// The diagonal embedding `G ⊂ G^p` on `k[G]`.
pub fn qf_group(g: &GroupTable, p: usize, field: PrimeField) -> Result<QuasiFrobenius> {
    require_char(field, p)?;
    let a = group_algebra(g, field)?;
    let n = a.dim();
    let (ap, sym) = tensor_power(&a, p)?;
    let diag = |x: usize| encode(&vec![x as u32; p], n);
    let matrix = SparseMatrix::from_column_fn(field, ap.dim(), n, |x, buf| buf.push((diag(x) as u32, 1)));
    let sigma = sym.permutation_matrix(field);
    let twist = frobenius_twist(&a);
    let mut mult_ok = true;
    for i in 0..n {
        for j in 0..n {
            let lhs = matrix.apply(twist.product(i, j));
            let rhs = ap.mul_vec(&matrix.col_vec(i), &matrix.col_vec(j));
            mult_ok &= lhs == rhs;
        }
    }
    let unit_ok = matrix.apply(twist.unit()) == *ap.unit();
    let extra = vec![QfCheck {
        name: "algebra map".into(),
        weight: None,
        holds: mult_ok && unit_ok,
        detail: format!("{n}x{n} basis products, unit {}", if unit_ok { "preserved" } else { "not preserved" }),
    }];
    let qf = QuasiFrobenius {
        p,
        field,
        construction: Construction::Group { labels: g.labels.clone(), table: g.table.clone(), field: field.p(), p },
        base: Some(a),
        slices: vec![QfSlice { weight: None, matrix, sigma }],
        checks: Vec::new(),
    };
    finish(qf, extra)
}

/// `T(V)` with `v_i ↦ v_i^{⊗p}`, in weight slices `1..=weight_cap`. A word
/// `x` of weight `w` goes to `x^{⊗p}` in the weight `(w, …, w)` part of `T(V)^{⊗p}`.
pub fn qf_free(dim_v: usize, p: usize, field: PrimeField, weight_cap: usize) -> Result<QuasiFrobenius> {
    require_char(field, p)?;
    if dim_v == 0 {
        return Err(Error::OutOfRange("V must be nonzero".into()));
    }
    let mut slices = Vec::new();
    for w in 1..=weight_cap {
        let words = exec::check_budget(|| format!("weight {w} words"), exec::pow_size(dim_v, w))?;
        let tgt = exec::check_budget(|| format!("weight {w} part of T(V)^(x{p})"), exec::pow_size(words, p))?;
        let matrix = SparseMatrix::from_column_fn(field, tgt, words, |x, buf| buf.push((encode(&vec![x as u32; p], words) as u32, 1)));
        let sym = CyclicSymmetry { order: p, perm: (0..tgt).map(|x| crate::algebra::rotate_index(x, words, p, 1) as u32).collect() };
        slices.push(QfSlice { weight: Some(w), matrix, sigma: sym.permutation_matrix(field) });
    }
    // F(xy) = F(x)F(y) on words, the product on T(V)^{⊗p} being concatenation in each factor
    let mut extra = Vec::new();
    for w1 in 1..weight_cap {
        for w2 in 1..=weight_cap - w1 {
            let (n1, n2) = (dim_v.pow(w1 as u32), dim_v.pow(w2 as u32));
            let f_at = |w: usize, x: usize| slices[w - 1].matrix.col(x).0[0] as usize;
            let mut ok = true;
            for x in 0..n1 {
                for y in 0..n2 {
                    let (fx, fy) = (f_at(w1, x), f_at(w2, y));
                    let mut parts = Vec::with_capacity(p);
                    let (mut dx, mut dy) = (Vec::new(), Vec::new());
                    decode(fx, n1, p, &mut dx);
                    decode(fy, n2, p, &mut dy);
                    for j in 0..p {
                        parts.push(dx[j] + dy[j] * n1 as u32);
                    }
                    let prod = encode(&parts, n1 * n2);
                    ok &= prod == f_at(w1 + w2, x + y * n1);
                }
            }
            extra.push(QfCheck {
                name: "algebra map".into(),
                weight: Some(w1 + w2),
                holds: ok,
                detail: format!("products of weights {w1} and {w2}"),
            });
        }
    }
    let qf = QuasiFrobenius {
        p,
        field,
        construction: Construction::Free { dim_v, field: field.p(), p, weight_cap },
        base: None,
        slices,
        checks: Vec::new(),
    };
    finish(qf, extra)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QfSearchReport {
    pub algebra: String,
    pub p: usize,
    pub field: u32,
    pub candidates: u64,
    pub algebra_maps: u64,
    /// Maps passing every check, in triple format.
    pub found: Vec<String>,
}

impl QfSearchReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kind: quasi-Frobenius search");
        let _ = writeln!(s, "algebra: {}", self.algebra);
        let _ = writeln!(s, "p: {}", self.p);
        let _ = writeln!(s, "field: F_{}", self.field);
        let _ = writeln!(s, "candidates: {}", self.candidates);
        let _ = writeln!(s, "unital algebra maps: {}", self.algebra_maps);
        let _ = writeln!(s, "passing all checks: {}", self.found.len());
        for (k, m) in self.found.iter().enumerate() {
            let _ = writeln!(s, "map {k}:");
            for line in m.lines() {
                let _ = writeln!(s, "  {line}");
            }
        }
        s
    }
}

/// Exhaustive search over linear maps `A^{(1)} → (A^{⊗p})^σ`, keeping the
/// unital algebra maps that pass the quasi-Frobenius checks.
pub fn qf_search(a: &Algebra, p: usize, max_candidates: u64) -> Result<QfSearchReport> {
    let field = a.field();
    require_char(field, p)?;
    let (ap, sym) = tensor_power(a, p)?;
    let n = a.dim();
    let mut seen = vec![false; ap.dim()];
    let mut orbits: Vec<SparseVec> = Vec::new();
    for x in 0..ap.dim() {
        if seen[x] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut y = x;
        while !seen[y] {
            seen[y] = true;
            orbit.push((y as u32, 1));
            y = sym.apply_index(y);
        }
        orbits.push(SparseVec::from_unsorted(field, orbit));
    }
    let q = field.p() as u128;
    let slots = orbits.len() * n;
    let total = (0..slots).try_fold(1u128, |acc, _| acc.checked_mul(q)).filter(|&t| t <= max_candidates as u128);
    let Some(total) = total else {
        return Err(Error::SizeBudgetExceeded { what: "quasi-Frobenius candidates".into(), size: u128::MAX, budget: max_candidates as usize });
    };
    let twist = frobenius_twist(a);
    let sigma = sym.permutation_matrix(field);
    let mut algebra_maps = 0u64;
    let mut found = Vec::new();
    let mut digits = vec![0u32; slots];
    for t in 0..total {
        let mut r = t;
        for d in digits.iter_mut() {
            *d = (r % q) as u32;
            r /= q;
        }
        let cols: Vec<SparseVec> = (0..n)
            .map(|j| {
                let mut v = SparseVec::new();
                for (k, o) in orbits.iter().enumerate() {
                    let c = digits[j * orbits.len() + k];
                    if c != 0 {
                        v = v.axpy(field, c, o);
                    }
                }
                v
            })
            .collect();
        let matrix = SparseMatrix::from_columns(field, ap.dim(), &cols);
        if matrix.apply(twist.unit()) != *ap.unit() {
            continue;
        }
        let hom = (0..n).all(|i| (0..n).all(|j| matrix.apply(twist.product(i, j)) == ap.mul_vec(&cols[i], &cols[j])));
        if !hom {
            continue;
        }
        algebra_maps += 1;
        let slice = QfSlice { weight: None, matrix, sigma: sigma.clone() };
        if slice_checks(p, &slice)?.iter().all(|c| c.holds) {
            found.push(slice.matrix.to_text());
        }
    }
    Ok(QfSearchReport { algebra: a.hash(), p, field: field.p(), candidates: total as u64, algebra_maps, found })
}

/// `F^{⊗n}` on every level together with both p-cyclic objects.
pub struct FSharp {
    pub source: CyclicObjectData,
    pub target: CyclicObjectData,
    pub maps: Vec<SparseMatrix>,
}

impl FSharp {
    pub fn map(&self, n: usize) -> &SparseMatrix {
        &self.maps[n - 1]
    }
}

/// `F^{⊗n}: A^{(1)⊗n} → A^{⊗pn}`; slot `jn + i` of the target holds factor `j` of `F(a_i)`.
fn tensor_power_map(f: &SparseMatrix, d: usize, p: usize, n: usize) -> Result<SparseMatrix> {
    let field = f.field();
    let cols = exec::check_budget(|| format!("A^(x{n})"), exec::pow_size(d, n))?;
    let rows = exec::check_budget(|| format!("A^(x{})", p * n), exec::pow_size(d, p * n))?;
    Ok(SparseMatrix::from_column_fn(field, rows, cols, |x, buf| {
        let mut src = Vec::with_capacity(n);
        decode(x, d, n, &mut src);
        let mut terms: Vec<(Vec<u32>, u32)> = vec![(vec![0; p * n], 1)];
        let mut digits = Vec::with_capacity(p);
        for (i, &g) in src.iter().enumerate() {
            let (ri, vi) = f.col(g as usize);
            let mut next = Vec::with_capacity(terms.len() * ri.len());
            for (slots, c) in &terms {
                for (&r, &v) in ri.iter().zip(vi) {
                    decode(r as usize, d, p, &mut digits);
                    let mut s = slots.clone();
                    for j in 0..p {
                        s[j * n + i] = digits[j];
                    }
                    next.push((s, field.mul(*c, v)));
                }
            }
            terms = next;
        }
        for (s, c) in terms {
            buf.push((encode(&s, d) as u32, c));
        }
    }))
}

/// `F_#` on levels `[1]..=[n_max]`, checked against `τ` and every face.
pub fn f_sharp(qf: &QuasiFrobenius, n_max: usize) -> Result<FSharp> {
    let a = qf
        .base
        .as_ref()
        .ok_or_else(|| Error::UnsupportedAlgebra("F_# needs a finite-dimensional algebra".into()))?;
    let p = qf.p;
    let source = CyclicObjectData::pi_pullback(a, p, n_max)?;
    let target = CyclicObjectData::from_algebra(a, p, n_max)?;
    let f = &qf.slices[0].matrix;
    let maps = (1..=n_max).map(|n| tensor_power_map(f, a.dim(), p, n)).collect::<Result<Vec<_>>>()?;
    let failures = exec::map_range(n_max, |k| -> Result<Option<String>> {
        let n = k + 1;
        let (s, t) = (source.level(n), target.level(n));
        if t.tau.mul(&maps[k])? != maps[k].mul(&s.tau)? {
            return Ok(Some(format!("τ at level [{n}]")));
        }
        for i in 0..s.faces.len() {
            if t.faces[i].mul(&maps[k])? != maps[k - 1].mul(&s.faces[i])? {
                return Ok(Some(format!("m_{i} at level [{n}]")));
            }
        }
        Ok(None)
    });
    for r in failures {
        if let Some(what) = r? {
            return Err(Error::CommutationFailed(format!("F_# does not commute with {what}")));
        }
    }
    Ok(FSharp { source, target, maps })
}

/// `coker(F_#)` as a quotient of `i^*A_#` by coordinates; `F_#` must send
/// basis vectors to distinct basis vectors.
pub fn cokernel(fs: &FSharp) -> Result<CyclicObjectData> {
    let dropped = fs
        .maps
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let mut rows = Vec::with_capacity(m.cols());
            for j in 0..m.cols() {
                match m.col(j).0 {
                    [r] => rows.push(*r as usize),
                    _ => return Err(Error::UnsupportedAlgebra(format!("F^(x{}) is not monomial", k + 1))),
                }
            }
            let mut sorted = rows.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != rows.len() {
                return Err(Error::ValidationFailed(format!("F^(x{}) is not injective", k + 1)));
            }
            Ok(sorted)
        })
        .collect::<Result<Vec<_>>>()?;
    fs.target.quotient_by_coordinates(&dropped)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateEntry {
    /// `HC_n`, or `H^i` of a weight slice.
    pub label: String,
    pub degree: usize,
    pub weight: Option<usize>,
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
    pub iso: bool,
    /// `C ∘ C^{-1} = id` on the slice.
    pub round_trip: Option<bool>,
    /// Triple format.
    pub matrix: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartierCertificate {
    pub version: String,
    pub construction: Construction,
    pub algebra: Option<String>,
    pub p: usize,
    pub field: u32,
    /// Stabilization bound, or the weight cap in the commutative case.
    pub bound: usize,
    pub levels: usize,
    pub entries: Vec<CertificateEntry>,
    pub hh_source: Vec<usize>,
    pub hp_source: Option<Vec<usize>>,
    pub hp_target: Option<Vec<usize>>,
    pub source_stabilization: Option<Stabilization>,
    pub target_stabilization: Option<Stabilization>,
    pub notes: Vec<String>,
}

impl CartierCertificate {
    pub fn all_iso(&self) -> bool {
        !self.entries.is_empty() && self.entries.iter().all(|e| e.iso && e.round_trip != Some(false))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kind: Cartier certificate");
        let _ = writeln!(s, "version: {}", self.version);
        let _ = writeln!(s, "construction: {}", serde_json::to_string(&self.construction).unwrap_or_default());
        if let Some(h) = &self.algebra {
            let _ = writeln!(s, "algebra: {h}");
        }
        let _ = writeln!(s, "p: {}", self.p);
        let _ = writeln!(s, "field: F_{}", self.field);
        let _ = writeln!(s, "bound: {}", self.bound);
        let _ = writeln!(s, "levels used: [1]..[{}]", self.levels);
        if !self.hh_source.is_empty() {
            let hh: Vec<String> = self.hh_source.iter().map(|d| d.to_string()).collect();
            let _ = writeln!(s, "HH of the twist: [{}]", hh.join(","));
        }
        for (name, hp) in [("source", &self.hp_source), ("target", &self.hp_target)] {
            if let Some(hp) = hp {
                let _ = writeln!(s, "HP {name}: ({}, {})", hp[0], hp[1]);
            }
        }
        for (name, st) in [("source", &self.source_stabilization), ("target", &self.target_stabilization)] {
            if let Some(st) = st {
                for c in &st.checks {
                    let _ = writeln!(s, "{name} u: HC_{} -> HC_{}: {} ({})", c.degree + 2, c.degree, if c.iso { "iso" } else { "not iso" }, c.method);
                }
            }
        }
        for e in &self.entries {
            let rt = e.round_trip.map(|b| format!(", C∘C^-1 = id: {b}")).unwrap_or_default();
            let _ = writeln!(s, "{}: {} -> {}, rank {}, iso {}{rt}", e.label, e.source_dim, e.target_dim, e.rank, e.iso);
            for line in e.matrix.lines() {
                let _ = writeln!(s, "  {line}");
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let _ = writeln!(s, "all iso: {}", self.all_iso());
        s
    }
}

/// `Φ = HP(F_#)` on the stabilization window `[bound, bound+1]` (both parities),
/// with `u` certified iso on both sides from `bound`. Needs `n_max ≥ bound + 6`.
pub fn cartier_phi(qf: &QuasiFrobenius, bound: usize, n_max: usize) -> Result<CartierCertificate> {
    if n_max < bound + 6 {
        return Err(Error::WindowTooSmall(format!("stabilization from degree {bound} needs levels up to [{}]", bound + 6)));
    }
    let fs = f_sharp(qf, n_max)?;
    let field = qf.field;
    for n in 1..=n_max {
        if !fs.source.norm(n).is_zero() {
            return Err(Error::OddDifferentialNonzero { level: n });
        }
    }
    let (src_hp, tgt_hp) = exec::join(|| hp_stabilized(&fs.source, bound), || hp_stabilized(&fs.target, bound));
    let (src_hp, tgt_hp) = (src_hp?, tgt_hp?);
    let top = bound + 2;
    let ts = CyclicTotal::build(&fs.source, top)?;
    let tt = CyclicTotal::build(&fs.target, top)?;
    let phi: Vec<SparseMatrix> = (0..=top as i64)
        .map(|n| {
            let blocks: Vec<(usize, usize, &SparseMatrix)> = ts
                .index
                .iter()
                .filter(|(&(c, j), _)| (c + j) as i64 == n)
                .map(|(cell, &s)| (tt.index[cell], s, fs.map(cell.1 + 1)))
                .collect();
            map_between(field, &tt.layout, n, &ts.layout, n, &blocks)
        })
        .collect();
    for n in 1..=top as i64 {
        let (Some(dt), Some(ds)) = (tt.total.d(n), ts.total.d(n)) else { continue };
        if dt.mul(&phi[n as usize])? != phi[n as usize - 1].mul(ds)? {
            return Err(Error::CommutationFailed(format!("Φ is not a chain map in degree {n}")));
        }
    }
    let mut entries = Vec::new();
    for n in bound..=bound + 1 {
        let m = induced_between(&phi[n], &ts.total, n as i64, &tt.total, n as i64)?;
        let r = rank(&m);
        entries.push(CertificateEntry {
            label: format!("HC_{n} (HP_{})", n % 2),
            degree: n,
            weight: None,
            source_dim: m.cols(),
            target_dim: m.rows(),
            rank: r,
            iso: r == m.rows() && r == m.cols(),
            round_trip: None,
            matrix: m.to_text(),
        });
    }
    let hh = hh_dims(&fs.source, bound + 1)?.dims;
    Ok(CartierCertificate {
        version: env!("CARGO_PKG_VERSION").to_string(),
        construction: qf.construction.clone(),
        algebra: qf.base.as_ref().map(|a| a.hash()),
        p: qf.p,
        field: field.p(),
        bound,
        levels: n_max,
        entries,
        hh_source: hh,
        hp_source: Some(src_hp.dims),
        hp_target: Some(tgt_hp.dims),
        source_stabilization: src_hp.stabilization,
        target_stabilization: tgt_hp.stabilization,
        notes: vec![format!("HH((u)) truncated to u-powers landing in HC_{bound}..HC_{}", bound + 1)],
    })
}

/// `C^{-1}(x^a dx_I) = x^{pa + (p-1)1_I} dx_I`.
pub fn inverse_cartier_representative(f: &Form, p: usize) -> Form {
    let exps = f.exps.iter().enumerate().map(|(k, &e)| e * p as u32 + (p as u32 - 1) * (f.mask >> k & 1)).collect();
    Form { exps, mask: f.mask }
}

/// `C^{-1}: Ω^i_{w} of the twist → H^i_DR` in weight `pw`, for all target weights `≤ weight_cap`.
pub fn inverse_cartier_commutative(nvars: usize, p: usize, weight_cap: usize) -> Result<CartierCertificate> {
    let field = PrimeField::new(p as u64)?;
    let jobs: Vec<(usize, usize)> = (0..=weight_cap).flat_map(|w| (0..=nvars).map(move |i| (i, w))).collect();
    let entries = exec::map_slice(&jobs, |&(i, w)| -> Result<CertificateEntry> {
        let cs = cohomology_slice(nvars, field, i, w)?;
        let src = if w % p == 0 { form_basis(nvars, i, w / p) } else { Vec::new() };
        let index: std::collections::HashMap<&Form, usize> = cs.forms.iter().enumerate().map(|(k, f)| (f, k)).collect();
        let reps: Vec<SparseVec> = src.iter().map(|f| SparseVec::unit(index[&inverse_cartier_representative(f, p)])).collect();
        if let Some(v) = reps.iter().find(|v| !cs.cycles.contains(v)) {
            return Err(Error::ValidationFailed(format!("C^-1 representative {v:?} is not closed")));
        }
        let cols: Vec<SparseVec> = reps.iter().map(|v| quotient_coordinates(&cs.boundaries, &cs.classes, v)).collect();
        let m = SparseMatrix::from_columns(field, cs.classes.dim(), &cols);
        let r = rank(&m);
        let c = cartier_operator(nvars, field, i, w);
        let back: Vec<SparseVec> = reps.iter().map(|v| c.apply(v)).collect();
        let round_trip = SparseMatrix::from_columns(field, src.len(), &back) == SparseMatrix::identity(field, src.len());
        Ok(CertificateEntry {
            label: format!("H^{i} weight {w}"),
            degree: i,
            weight: Some(w),
            source_dim: src.len(),
            target_dim: cs.classes.dim(),
            rank: r,
            iso: r == src.len() && r == cs.classes.dim(),
            round_trip: Some(round_trip),
            matrix: m.to_text(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(CartierCertificate {
        version: env!("CARGO_PKG_VERSION").to_string(),
        construction: Construction::Commutative { nvars, p, weight_cap },
        algebra: None,
        p,
        field: field.p(),
        bound: weight_cap,
        levels: 0,
        entries,
        hh_source: Vec::new(),
        hp_source: None,
        hp_target: None,
        source_stabilization: None,
        target_stabilization: None,
        notes: vec!["C^-1 on forms: f dg -> f^p g^(p-1) dg".into()],
    })
}

/// Re-runs the computation a certificate describes and compares.
pub fn verify_certificate(cert: &CartierCertificate) -> Result<CartierCertificate> {
    let fresh = match &cert.construction {
        Construction::Group { labels, table, field, p } => {
            let g = GroupTable { labels: labels.clone(), table: table.clone() };
            let qf = qf_group(&g, *p, PrimeField::new(*field as u64)?)?;
            cartier_phi(&qf, cert.bound, cert.levels)?
        }
        Construction::Commutative { nvars, p, weight_cap } => inverse_cartier_commutative(*nvars, *p, *weight_cap)?,
        Construction::Free { .. } => {
            return Err(Error::UnsupportedAlgebra("certificates are issued for group algebras and polynomial rings".into()))
        }
    };
    let mut expected = cert.clone();
    expected.version = fresh.version.clone();
    if fresh != expected {
        return Err(Error::ValidationFailed("recomputed certificate differs from the stored one".into()));
    }
    if !fresh.all_iso() {
        return Err(Error::ValidationFailed("certificate does not certify an isomorphism".into()));
    }
    Ok(fresh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclic::{hc_dims, hp_vanishing_check};

    fn fld(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn search_finds_the_diagonal() {
        let g = GroupTable::cyclic(2);
        let a = group_algebra(&g, fld(2)).unwrap();
        let rep = qf_search(&a, 2, 1 << 12).unwrap();
        assert_eq!(rep.candidates, 64);
        let diag = qf_group(&g, 2, fld(2)).unwrap().slices[0].matrix.to_text();
        assert!(rep.found.contains(&diag));
        let dual = crate::algebra::truncated_polynomial(1, 2, fld(2));
        assert!(matches!(qf_search(&dual, 3, 1 << 12), Err(Error::ValidationFailed(_))));
    }

    #[test]
    fn diagonal_embedding_checks() {
        let qf = qf_group(&GroupTable::cyclic(3), 2, fld(2)).unwrap();
        assert!(qf.checks.iter().all(|c| c.holds));
        let free = qf.checks.iter().find(|c| c.name == "free cokernel").unwrap();
        assert_eq!(free.detail, "cokernel dim 6");
        let qf = qf_group(&GroupTable::cyclic(2), 2, fld(2)).unwrap();
        let tate = qf.checks.iter().find(|c| c.name == "Tate isomorphism").unwrap();
        assert_eq!(tate.detail, "dims (2,2) -> (2,2)");
        assert!(matches!(qf_group(&GroupTable::cyclic(2), 2, fld(3)), Err(Error::ValidationFailed(_))));
    }

    #[test]
    fn free_algebra_slices() {
        let qf = qf_free(1, 2, fld(2), 4).unwrap();
        for (w, s) in qf.slices.iter().enumerate() {
            assert_eq!((s.matrix.rows(), s.matrix.cols()), (1, 1), "weight {}", w + 1);
        }
        let qf = qf_free(2, 2, fld(2), 3).unwrap();
        assert!(qf.checks.iter().all(|c| c.holds));
        let tate = qf.checks.iter().find(|c| c.name == "Tate isomorphism" && c.weight == Some(1)).unwrap();
        assert_eq!(tate.detail, "dims (2,2) -> (2,2)");
        qf_free(2, 3, fld(3), 2).unwrap();
    }

    #[test]
    fn f_sharp_commutes_and_has_free_cokernel() {
        let qf = qf_group(&GroupTable::cyclic(3), 2, fld(2)).unwrap();
        let fs = f_sharp(&qf, 3).unwrap();
        assert_eq!(fs.map(1), &qf.slices[0].matrix);
        let coker = cokernel(&fs).unwrap();
        for n in 1..=3 {
            assert_eq!(rank(fs.map(n)), fs.source.level(n).dim);
            assert!(is_free_module(2, coker.sigma(n)).unwrap());
        }
    }

    #[test]
    fn cokernel_has_no_periodic_homology() {
        let qf = qf_group(&GroupTable::cyclic(3), 2, fld(2)).unwrap();
        let coker = cokernel(&f_sharp(&qf, 5).unwrap()).unwrap();
        let cert = hp_vanishing_check(&coker, 2).unwrap();
        assert_eq!(cert.hp, (0, 0));
        assert_eq!(hc_dims(&coker, 3).unwrap().dims, vec![0, 0, 0, 0]);
    }

    #[test]
    fn commutative_inverse_cartier() {
        let c = inverse_cartier_commutative(1, 3, 8).unwrap();
        assert!(c.all_iso());
        let x_dx = Form { exps: vec![1], mask: 1 };
        assert_eq!(inverse_cartier_representative(&x_dx, 3), Form { exps: vec![5], mask: 1 });
        for p in [2, 3, 5] {
            for nvars in 1..=2 {
                assert!(inverse_cartier_commutative(nvars, p, 8).unwrap().all_iso(), "nvars={nvars} p={p}");
            }
        }
        let c = inverse_cartier_commutative(2, 2, 6).unwrap();
        verify_certificate(&c).unwrap();
    }
}
