//! De Rham complexes of `k[x_1..x_v]` in weight slices, over `F_p` or the
//! rationals, and the spectral-sequence bookkeeping for degeneration.
//!
//! The form `x^a dx_I` has degree `|I|` and weight `|a| + |I|`; `d` preserves
//! the weight, so every slice is a finite complex.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::algebra::{monomials_of_degree, Algebra};
use crate::complexes::{spectral_sequence_degrees, Multicomplex};
use crate::cyclic::{cyclic_bicomplex, CyclicObjectData};
use crate::error::{Error, Result};
use crate::exec;
use crate::field::PrimeField;
use crate::linalg::generic::{self, Mat, Rationals};
use crate::linalg::{image_basis, kernel_basis, quotient_basis, rank, SparseMatrix, Subspace};

/// A monomial form `x^exps dx_I`, `I` as a bit mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    pub exps: Vec<u32>,
    pub mask: u32,
}

impl Form {
    pub fn label(&self) -> String {
        let mut s = String::new();
        for (k, &e) in self.exps.iter().enumerate() {
            match e {
                0 => {}
                1 => {
                    let _ = write!(s, "x{}", k + 1);
                }
                _ => {
                    let _ = write!(s, "x{}^{e}", k + 1);
                }
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        for k in 0..self.exps.len() {
            if self.mask >> k & 1 == 1 {
                let _ = write!(s, " dx{}", k + 1);
            }
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scalars {
    Prime(PrimeField),
    Rationals,
}

impl Scalars {
    /// `0` for the rationals.
    pub fn new(characteristic: u64) -> Result<Self> {
        if characteristic == 0 {
            Ok(Scalars::Rationals)
        } else {
            Ok(Scalars::Prime(PrimeField::new(characteristic)?))
        }
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Scalars::Prime(f) => f.p() as u64,
            Scalars::Rationals => 0,
        }
    }
}

/// Basis of `Ω^i` in weight `w`, sorted.
pub fn form_basis(nvars: usize, i: usize, w: usize) -> Vec<Form> {
    let mut out = Vec::new();
    if i > nvars || i > w {
        return out;
    }
    let mut mons = Vec::new();
    monomials_of_degree(nvars, w - i, &mut mons);
    for mask in 0u32..1 << nvars {
        if mask.count_ones() as usize == i {
            out.extend(mons.iter().map(|m| Form { exps: m.clone(), mask }));
        }
    }
    out.sort();
    out
}

/// One slice `d: Ω^i_w → Ω^{i+1}_w` with integer entries.
#[derive(Debug, Clone)]
pub struct DeRhamSlice {
    pub nvars: usize,
    pub degree: usize,
    pub weight: usize,
    pub source: Vec<Form>,
    pub target: Vec<Form>,
    pub entries: Vec<(usize, usize, i64)>,
}

impl DeRhamSlice {
    pub fn new(nvars: usize, i: usize, w: usize) -> Result<Self> {
        let source = form_basis(nvars, i, w);
        let target = form_basis(nvars, i + 1, w);
        exec::check_budget(|| format!("Ω^{i} slice of weight {w}"), source.len() as u128 + target.len() as u128)?;
        let index: HashMap<&Form, usize> = target.iter().enumerate().map(|(k, f)| (f, k)).collect();
        let mut entries = Vec::new();
        for (c, f) in source.iter().enumerate() {
            for k in 0..nvars {
                if f.exps[k] == 0 || f.mask >> k & 1 == 1 {
                    continue;
                }
                let mut exps = f.exps.clone();
                exps[k] -= 1;
                let g = Form { exps, mask: f.mask | 1 << k };
                // dx_k moves past the dx_j with j < k
                let sign = if (f.mask & ((1 << k) - 1)).count_ones() % 2 == 0 { 1 } else { -1 };
                entries.push((index[&g], c, sign * f.exps[k] as i64));
            }
        }
        Ok(DeRhamSlice { nvars, degree: i, weight: w, source, target, entries })
    }

    pub fn matrix(&self, field: PrimeField) -> SparseMatrix {
        SparseMatrix::from_triplets(
            field,
            self.target.len(),
            self.source.len(),
            self.entries.iter().map(|&(r, c, v)| (r, c, field.from_i64(v))),
        )
        .expect("slice entries are in range")
    }

    pub fn dense<F: generic::FieldOps>(&self, f: &F) -> Mat<F::E> {
        let mut m = Mat::filled(self.target.len(), self.source.len(), f.zero());
        for &(r, c, v) in &self.entries {
            m.set(r, c, f.from_i64(v));
        }
        m
    }

    pub fn rank(&self, s: Scalars) -> usize {
        match s {
            Scalars::Prime(f) => rank(&self.matrix(f)),
            Scalars::Rationals => generic::rank(&Rationals, &self.dense(&Rationals)),
        }
    }
}

/// The slices `d_0..d_{v-1}` of one weight.
pub fn weight_slices(nvars: usize, w: usize) -> Result<Vec<DeRhamSlice>> {
    (0..nvars).map(|i| DeRhamSlice::new(nvars, i, w)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceDims {
    pub weight: usize,
    /// `dim Ω^i_w` for `i = 0..=nvars`.
    pub forms: Vec<usize>,
    /// `dim H^i_w`.
    pub cohomology: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeRhamReport {
    pub nvars: usize,
    pub characteristic: u64,
    pub weight_cap: usize,
    pub slices: Vec<SliceDims>,
}

impl DeRhamReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kind: de Rham");
        let _ = writeln!(s, "nvars: {}", self.nvars);
        let _ = writeln!(s, "characteristic: {}", self.characteristic);
        let _ = writeln!(s, "weights: 0..={}", self.weight_cap);
        for sl in &self.slices {
            let h: Vec<String> = sl.cohomology.iter().map(|d| d.to_string()).collect();
            let om: Vec<String> = sl.forms.iter().map(|d| d.to_string()).collect();
            let _ = writeln!(s, "weight {}: forms [{}] H [{}]", sl.weight, om.join(","), h.join(","));
        }
        s
    }

    pub fn h(&self, i: usize, w: usize) -> usize {
        self.slices[w].cohomology[i]
    }
}

pub fn slice_dims(nvars: usize, s: Scalars, w: usize) -> Result<SliceDims> {
    let slices = weight_slices(nvars, w)?;
    let forms: Vec<usize> = (0..=nvars).map(|i| form_basis(nvars, i, w).len()).collect();
    let ranks: Vec<usize> = exec::map_slice(&slices, |sl| sl.rank(s));
    let cohomology = (0..=nvars)
        .map(|i| forms[i] - if i < nvars { ranks[i] } else { 0 } - if i > 0 { ranks[i - 1] } else { 0 })
        .collect();
    Ok(SliceDims { weight: w, forms, cohomology })
}

/// `dim H^i_DR` of `k[x_1..x_nvars]` per weight `0..=weight_cap`; characteristic `0` means the rationals.
pub fn derham_cohomology(nvars: usize, characteristic: u64, weight_cap: usize) -> Result<DeRhamReport> {
    if nvars == 0 || nvars > 16 {
        return Err(Error::OutOfRange(format!("nvars = {nvars} must be in 1..=16")));
    }
    let s = Scalars::new(characteristic)?;
    let slices = exec::map_range(weight_cap + 1, |w| slice_dims(nvars, s, w)).into_iter().collect::<Result<_>>()?;
    Ok(DeRhamReport { nvars, characteristic, weight_cap, slices })
}

/// `Z^i_w`, `B^i_w` and a basis of `H^i_w` by representatives, over `F_p`.
pub struct CohomologySlice {
    pub forms: Vec<Form>,
    pub cycles: Subspace,
    pub boundaries: Subspace,
    pub classes: Subspace,
}

pub fn cohomology_slice(nvars: usize, field: PrimeField, i: usize, w: usize) -> Result<CohomologySlice> {
    let forms = form_basis(nvars, i, w);
    let cycles = if i < nvars {
        kernel_basis(&DeRhamSlice::new(nvars, i, w)?.matrix(field))
    } else {
        Subspace::full(field, forms.len())
    };
    let boundaries = if i > 0 {
        image_basis(&DeRhamSlice::new(nvars, i - 1, w)?.matrix(field))
    } else {
        Subspace::zero(field, forms.len())
    };
    let classes = quotient_basis(&boundaries, &cycles)?;
    Ok(CohomologySlice { forms, cycles, boundaries, classes })
}

/// The Cartier operator on monomial forms: `x^{pa + (p-1)1_I} dx_I ↦ x^a dx_I`,
/// every other monomial to zero. Maps `Ω^i_w` to the twist slice `Ω^i_{w/p}`.
pub fn cartier_operator(nvars: usize, field: PrimeField, i: usize, w: usize) -> SparseMatrix {
    let p = field.p() as usize;
    let src = form_basis(nvars, i, w);
    let dst = if w % p == 0 { form_basis(nvars, i, w / p) } else { Vec::new() };
    let index: HashMap<&Form, usize> = dst.iter().enumerate().map(|(k, f)| (f, k)).collect();
    let mut trips = Vec::new();
    for (c, f) in src.iter().enumerate() {
        let mut exps = Vec::with_capacity(nvars);
        let ok = (0..nvars).all(|k| {
            let bit = (f.mask >> k & 1) as usize;
            let e = f.exps[k] as usize + bit;
            if e % p != 0 {
                return false;
            }
            exps.push((e / p - bit) as u32);
            true
        });
        if ok {
            if let Some(&r) = index.get(&Form { exps, mask: f.mask }) {
                trips.push((r, c, 1));
            }
        }
    }
    SparseMatrix::from_triplets(field, dst.len(), src.len(), trips).expect("entries are in range")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSums {
    pub degree: i64,
    pub e1: usize,
    pub e2: usize,
    pub e_infinity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenerationReport {
    pub object: String,
    pub field: u64,
    pub degrees: Vec<DegreeSums>,
    /// `Σ E_1 = Σ E_∞` in every listed degree.
    pub degenerate: bool,
    /// Commutative mode: the page after `d_1` is de Rham cohomology.
    pub first_differential_is_de_rham: Option<bool>,
    pub notes: Vec<String>,
}

impl DegenerationReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kind: degeneration");
        let _ = writeln!(s, "object: {}", self.object);
        let _ = writeln!(s, "field: {}", if self.field == 0 { "Q".to_string() } else { format!("F_{}", self.field) });
        for d in &self.degrees {
            let _ = writeln!(s, "degree {}: E1 {} E2 {} Einf {}", d.degree, d.e1, d.e2, d.e_infinity);
        }
        let _ = writeln!(s, "degenerate at E1: {}", self.degenerate);
        if let Some(b) = self.first_differential_is_de_rham {
            let _ = writeln!(s, "d1 is the de Rham differential: {b}");
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

fn sums(pages: &BTreeMap<(i64, i64), usize>, n: i64) -> usize {
    pages.iter().filter(|e| e.0 .1 == n).map(|e| *e.1).sum()
}

/// The column filtration of the cyclic bicomplex, `E_1 = HH ⇒ HC`, in total degrees `≤ max_degree`.
pub fn hodge_degeneration_cyclic(a: &Algebra, max_degree: usize) -> Result<DegenerationReport> {
    let e = CyclicObjectData::from_algebra(a, 1, max_degree + 2)?;
    let b = cyclic_bicomplex(&e, max_degree + 1)?;
    let ss = spectral_sequence_degrees(&b.to_multicomplex(), 2, max_degree as i64)?;
    let degrees: Vec<DegreeSums> = (0..=max_degree as i64)
        .map(|n| DegreeSums { degree: n, e1: sums(&ss.pages[0], n), e2: sums(&ss.pages[1], n), e_infinity: ss.total[&n] })
        .collect();
    let degenerate = degrees.iter().all(|d| d.e1 == d.e_infinity);
    Ok(DegenerationReport {
        object: format!("algebra {}", a.hash()),
        field: a.field().p() as u64,
        degrees,
        degenerate,
        first_differential_is_de_rham: None,
        notes: Vec::new(),
    })
}

/// The Hodge filtration on the weight slices of `k[x_1..x_nvars]`: `E_1 = Ω`,
/// `d_1 = d`, so `E_2` should be de Rham cohomology and nothing happens later.
/// Total degree is the form degree, summed over weights `≤ weight_cap`.
pub fn hodge_degeneration_polynomial(nvars: usize, characteristic: u64, weight_cap: usize) -> Result<DegenerationReport> {
    let dr = derham_cohomology(nvars, characteristic, weight_cap)?;
    let mut e1 = vec![0; nvars + 1];
    let mut e2 = vec![0; nvars + 1];
    let mut matches = true;
    for sl in &dr.slices {
        for i in 0..=nvars {
            e1[i] += sl.forms[i];
        }
        match Scalars::new(characteristic)? {
            Scalars::Prime(f) => {
                // cell Ω^i in homological degree nvars - i so that d lowers degree and filtration
                let mut m = Multicomplex::new(f, nvars as i64 + 1);
                let cells: Vec<usize> = (0..=nvars).map(|i| m.add_cell((nvars - i) as i64, (nvars - i) as i64, sl.forms[i])).collect();
                for (i, d) in weight_slices(nvars, sl.weight)?.iter().enumerate() {
                    m.add_map(cells[i], cells[i + 1], d.matrix(f));
                }
                let ss = spectral_sequence_degrees(&m, 2, nvars as i64)?;
                for i in 0..=nvars {
                    let n = (nvars - i) as i64;
                    let page2 = sums(&ss.pages[1], n);
                    e2[i] += page2;
                    matches &= page2 == sl.cohomology[i] && sums(&ss.infinity, n) == sl.cohomology[i];
                }
            }
            Scalars::Rationals => {
                for i in 0..=nvars {
                    e2[i] += sl.cohomology[i];
                }
            }
        }
    }
    let degrees: Vec<DegreeSums> = (0..=nvars)
        .map(|i| {
            let h: usize = dr.slices.iter().map(|s| s.cohomology[i]).sum();
            DegreeSums { degree: i as i64, e1: e1[i], e2: e2[i], e_infinity: h }
        })
        .collect();
    let degenerate = degrees.iter().all(|d| d.e1 == d.e_infinity);
    let mut notes = vec![format!("weights 0..={weight_cap}")];
    if characteristic == 0 {
        notes.push("pages over Q from exact ranks; E_2 = E_inf since each weight slice is one filtered complex".into());
    }
    Ok(DegenerationReport {
        object: format!("k[x1..x{nvars}]"),
        field: characteristic,
        degrees,
        degenerate,
        first_differential_is_de_rham: Some(matches && degrees_match(&dr, &e2)),
        notes,
    })
}

fn degrees_match(dr: &DeRhamReport, e2: &[usize]) -> bool {
    (0..=dr.nvars).all(|i| dr.slices.iter().map(|s| s.cohomology[i]).sum::<usize>() == e2[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{group_algebra, matrix_algebra, truncated_polynomial, GroupTable};

    fn fld(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn square_zero_on_slices() {
        for nvars in 1..=3 {
            for w in 0..=5 {
                let sl = weight_slices(nvars, w).unwrap();
                for i in 0..nvars.saturating_sub(1) {
                    let mut prod: HashMap<(usize, usize), i64> = HashMap::new();
                    for &(r, k, v) in &sl[i + 1].entries {
                        for &(k2, c, u) in &sl[i].entries {
                            if k == k2 {
                                *prod.entry((r, c)).or_default() += v * u;
                            }
                        }
                    }
                    assert!(prod.values().all(|&v| v == 0), "nvars={nvars} w={w} i={i}");
                }
            }
        }
    }

    #[test]
    fn poincare_over_rationals() {
        for nvars in 1..=2 {
            let r = derham_cohomology(nvars, 0, 6).unwrap();
            for w in 0..=6 {
                for i in 0..=nvars {
                    assert_eq!(r.h(i, w), usize::from(i == 0 && w == 0), "H^{i} weight {w}");
                }
            }
        }
    }

    #[test]
    fn one_variable_char_three() {
        let r = derham_cohomology(1, 3, 9).unwrap();
        for w in 0..=9 {
            assert_eq!(r.h(0, w), usize::from(w % 3 == 0));
            assert_eq!(r.h(1, w), usize::from(w % 3 == 0 && w > 0));
        }
    }

    #[test]
    fn kunneth_in_two_variables() {
        for p in [2, 3] {
            let one = derham_cohomology(1, p, 6).unwrap();
            let two = derham_cohomology(2, p, 6).unwrap();
            for w in 0..=6 {
                for i in 0..=2 {
                    let mut expect = 0;
                    for w1 in 0..=w {
                        for i1 in 0..=1.min(i) {
                            if i - i1 <= 1 {
                                expect += one.h(i1, w1) * one.h(i - i1, w - w1);
                            }
                        }
                    }
                    assert_eq!(two.h(i, w), expect, "p={p} i={i} w={w}");
                }
            }
        }
    }

    #[test]
    fn cartier_operator_kills_exact_forms() {
        for (nvars, p) in [(1, 3), (2, 2), (2, 3)] {
            let f = fld(p);
            for w in 1..=6 {
                for i in 0..nvars {
                    let d = DeRhamSlice::new(nvars, i, w).unwrap().matrix(f);
                    assert!(cartier_operator(nvars, f, i + 1, w).mul(&d).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn cyclic_side_degeneration() {
        let r = hodge_degeneration_cyclic(&matrix_algebra(2, fld(3)), 3).unwrap();
        assert!(r.degenerate, "{}", r.to_text());
        let r = hodge_degeneration_cyclic(&group_algebra(&GroupTable::cyclic(3), fld(2)).unwrap(), 3).unwrap();
        assert!(r.degenerate);
        let r = hodge_degeneration_cyclic(&truncated_polynomial(1, 2, fld(2)), 3).unwrap();
        assert_eq!(r.degrees.len(), 4);
    }

    #[test]
    fn polynomial_mode_reaches_de_rham_after_first_differential() {
        for p in [0, 2, 3] {
            let r = hodge_degeneration_polynomial(2, p, 5).unwrap();
            for d in &r.degrees {
                assert_eq!(d.e2, d.e_infinity);
            }
            assert_eq!(r.first_differential_is_de_rham, Some(true));
        }
    }
}
