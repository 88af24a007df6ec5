//! Bar and Hochschild complexes, their p-fold versions on `A^{⊗pN}`, and the
//! comparison map `M`.
//!
//! Level `[N]` of the p-fold complex is `A^{⊗pN}` with factors indexed by
//! `Z/pN` in copy-major order: slot `j*N + i` holds the `i`-th factor of copy
//! `j`. The face `m_i` (`i ≤ N-2`) multiplies slots `jN+i` and `jN+i+1` of
//! every copy; the last face `m_{N-1}` is `m_0 ∘ T` where `T` moves slot `x`
//! to `x+1`. The signed cyclic operator is `τ = (-1)^{N-1} T`.

use crate::algebra::{decode, encode, Algebra, Bimodule};
use crate::cache;
use crate::complexes::{ChainComplex, ChainMap};
use crate::error::{Error, Result};
use crate::exec;
use crate::field::PrimeField;
use crate::linalg::{rank, SparseMatrix};

/// Expands a product of per-slot coefficient lists into encoded targets.
/// `slots[k]` lists `(basis index, coefficient)` for target slot `k`.
fn expand(field: PrimeField, radix: usize, slots: &[&[(u32, u32)]], coeff: u32, buf: &mut Vec<(u32, u32)>) {
    let mut acc: Vec<(usize, u32)> = vec![(0, coeff)];
    let mut stride = 1usize;
    for s in slots {
        if s.len() == 1 {
            let (k, c) = s[0];
            for e in acc.iter_mut() {
                e.0 += k as usize * stride;
                e.1 = field.mul(e.1, c);
            }
        } else {
            let mut next = Vec::with_capacity(acc.len() * s.len());
            for &(x, c) in &acc {
                for &(k, e) in s.iter() {
                    next.push((x + k as usize * stride, field.mul(c, e)));
                }
            }
            acc = next;
        }
        stride *= radix;
    }
    buf.extend(acc.into_iter().filter(|e| e.1 != 0).map(|(x, c)| (x as u32, c)));
}

/// Appends `coeff · m_i(e_s)` for the basis tuple `s` of `A^{⊗pN}`.
pub(crate) fn pface_terms(a: &Algebra, p: usize, n: usize, i: usize, s: &[u32], coeff: u32, buf: &mut Vec<(u32, u32)>) {
    debug_assert!(n >= 2 && i < n && s.len() == p * n);
    let d = a.dim();
    let f = a.field();
    let len = p * n;
    let pair = |j: usize| -> (u32, u32) {
        if i + 1 < n {
            (s[j * n + i], s[j * n + i + 1])
        } else {
            (s[(j * n + len - 1) % len], s[j * n])
        }
    };
    let keep = |j: usize, k: usize| -> u32 {
        if i + 1 < n {
            if k < i {
                s[j * n + k]
            } else {
                s[j * n + k + 1]
            }
        } else {
            s[j * n + k]
        }
    };
    let prod_slot = if i + 1 < n { i } else { 0 };
    if a.is_monomial() {
        let mut c = coeff;
        let mut x = 0usize;
        for j in (0..p).rev() {
            for k in (0..n - 1).rev() {
                let digit = if k == prod_slot {
                    let (l, r) = pair(j);
                    match a.mono_product(l, r).unwrap() {
                        None => return,
                        Some((t, e)) => {
                            c = f.mul(c, e);
                            t
                        }
                    }
                } else {
                    keep(j, k)
                };
                x = x * d + digit as usize;
            }
        }
        buf.push((x as u32, c));
        return;
    }
    let single: Vec<[(u32, u32); 1]> = (0..p * (n - 1)).map(|t| [(keep(t / (n - 1), t % (n - 1)), 1)]).collect();
    let mut slots: Vec<&[(u32, u32)]> = Vec::with_capacity(p * (n - 1));
    for t in 0..p * (n - 1) {
        let (j, k) = (t / (n - 1), t % (n - 1));
        if k == prod_slot {
            let (l, r) = pair(j);
            let v = a.product(l as usize, r as usize);
            if v.is_zero() {
                return;
            }
            slots.push(&v.0);
        } else {
            slots.push(&single[t]);
        }
    }
    expand(f, d, &slots, coeff, buf);
}

fn level_size(a: &Algebra, p: usize, n: usize) -> Result<usize> {
    exec::check_budget(|| format!("level [{n}] of the {p}-fold complex"), exec::pow_size(a.dim(), p * n))
}

/// Builds `Σ_i coeff_i · m_i` from level `[n]` to `[n-1]`.
fn face_combination(a: &Algebra, p: usize, n: usize, faces: &[(usize, u32)]) -> Result<SparseMatrix> {
    assert!(n >= 2);
    let cols = level_size(a, p, n)?;
    let rows = level_size(a, p, n - 1)?;
    let d = a.dim();
    Ok(SparseMatrix::from_column_fn(a.field(), rows, cols, |x, buf| {
        let mut s = Vec::with_capacity(p * n);
        decode(x, d, p * n, &mut s);
        for &(i, c) in faces {
            pface_terms(a, p, n, i, &s, c, buf);
        }
    }))
}

/// The face `m_i: A^{⊗pn} → A^{⊗p(n-1)}`.
pub fn face_matrix(a: &Algebra, p: usize, n: usize, i: usize) -> Result<SparseMatrix> {
    face_combination(a, p, n, &[(i, 1)])
}

/// Unsigned rotation `T` of `A^{⊗len}`; `T^k` moves slot `x` to `x + k`.
pub fn rotation_matrix(field: PrimeField, radix: usize, len: usize, k: usize) -> Result<SparseMatrix> {
    let n = exec::check_budget(|| format!("A^(x{len})"), exec::pow_size(radix, len))?;
    let k = k % len.max(1);
    let hi = exec::pow_size(radix, len - k) as usize;
    let lo = exec::pow_size(radix, k) as usize;
    // digits x_0..x_{len-1} become x_{len-k}..x_{len-1}, x_0..x_{len-k-1}
    Ok(SparseMatrix::from_column_fn(field, n, n, |x, buf| {
        let y = (x % hi) * lo + x / hi;
        buf.push((y as u32, 1));
    }))
}

/// The signed cyclic operator `τ = (-1)^{n-1} T` on level `[n]`.
pub fn tau_matrix(a: &Algebra, p: usize, n: usize) -> Result<SparseMatrix> {
    let t = rotation_matrix(a.field(), a.dim(), p * n, 1)?;
    Ok(if n % 2 == 0 { t.neg() } else { t })
}

/// `(b_p, b'_p)` from level `[n]` to `[n-1]`.
pub fn level_differentials(a: &Algebra, p: usize, n: usize) -> Result<(SparseMatrix, SparseMatrix)> {
    let f = a.field();
    let signs: Vec<(usize, u32)> = (0..n - 1).map(|i| (i, f.sign(i))).collect();
    let key = |kind: &str| cache::Key::new(a, &format!("{kind}:p={p}"), n);
    let bp = cache::matrix(key("bprime"), || face_combination(a, p, n, &signs))?;
    let mut all = signs.clone();
    all.push((n - 1, f.sign(n - 1)));
    let b = cache::matrix(key("b"), || face_combination(a, p, n, &all))?;
    Ok((b, bp))
}

/// `(b_p, b'_p): A^{⊗p(n+2)} → A^{⊗p(n+1)}`.
pub fn p_differentials(a: &Algebra, p: usize, n: usize) -> Result<(SparseMatrix, SparseMatrix)> {
    level_differentials(a, p, n + 2)
}

/// The comparison map `M: A^{⊗pn} → A^{⊗n}`: multiplies the first
/// `pn - n + 1` factors together and keeps the last `n - 1`.
pub fn comparison_matrix(a: &Algebra, p: usize, n: usize) -> Result<SparseMatrix> {
    let cols = level_size(a, p, n)?;
    let rows = level_size(a, 1, n)?;
    let d = a.dim();
    let f = a.field();
    let len = p * n;
    let head = len - n + 1;
    Ok(SparseMatrix::from_column_fn(f, rows, cols, |x, buf| {
        let mut s = Vec::with_capacity(len);
        decode(x, d, len, &mut s);
        let mut v = a.unit().clone();
        for &k in &s[..head] {
            v = a.mul_vec(&v, &crate::linalg::SparseVec::unit(k as usize));
            if v.is_zero() {
                return;
            }
        }
        let tail = encode(&s[head..], d);
        let shift = d;
        for &(k, c) in &v.0 {
            buf.push(((tail * shift + k as usize) as u32, c));
        }
    }))
}

/// The p-fold Hochschild complex `C(i^*A_#)` with `b_p`, degrees `0..=top`
/// (degree `n` is level `[n+1]`).
pub fn p_hochschild_complex(a: &Algebra, p: usize, top: usize) -> Result<ChainComplex> {
    let dims = (0..=top).map(|n| level_size(a, p, n + 1)).collect::<Result<Vec<_>>>()?;
    let d = (1..=top).map(|n| level_differentials(a, p, n + 1).map(|x| x.0)).collect::<Result<Vec<_>>>()?;
    ChainComplex::new(0, dims, d, true)
}

/// `M` as a chain map from the p-fold Hochschild complex to the ordinary one,
/// degrees `0..n_max`; `M ∘ b_p = b ∘ M` is checked at every level.
pub fn comparison_map_m(a: &Algebra, p: usize, n_max: usize) -> Result<ChainMap> {
    let src = p_hochschild_complex(a, p, n_max)?;
    let dst = p_hochschild_complex(a, 1, n_max)?;
    let maps = (0..=n_max).map(|n| comparison_matrix(a, p, n + 1)).collect::<Result<Vec<_>>>()?;
    for n in 1..=n_max {
        let lhs = maps[n - 1].mul(src.d(n as i64).unwrap())?;
        let rhs = dst.d(n as i64).unwrap().mul(&maps[n])?;
        if lhs != rhs {
            return Err(Error::ChainMapViolation { level: n, detail: "M b_p != b M".into() });
        }
    }
    ChainMap::new_unchecked(src, dst, maps)
}

/// Bimodule Hochschild chains `C_n = M ⊗ A^{⊗n}`, index `m + dim M · (a_1, …, a_n)`.
/// Faces: `d_0 = m·a_1`, `d_i = a_i a_{i+1}`, `d_n = a_n·m`.
fn bimodule_face_terms(a: &Algebra, m: &Bimodule, n: usize, i: usize, s: &[u32], coeff: u32, buf: &mut Vec<(u32, u32)>) {
    let f = a.field();
    let (dm, da) = (m.dim(), a.dim());
    // s[0] is the module digit, s[1..=n] the algebra digits
    if i == 0 || i == n {
        let (prod, rest) = if i == 0 {
            (m.right(s[0] as usize, s[1] as usize), &s[2..=n])
        } else {
            (m.left(s[n] as usize, s[0] as usize), &s[1..n])
        };
        let tail = dm * encode(rest, da);
        buf.extend(prod.0.iter().map(|&(k, c)| ((k as usize + tail) as u32, f.mul(coeff, c))));
        return;
    }
    let mut r: Vec<u32> = Vec::with_capacity(n - 1);
    r.extend_from_slice(&s[1..i]);
    r.push(0);
    r.extend_from_slice(&s[i + 2..=n]);
    for &(k, c) in &a.product(s[i] as usize, s[i + 1] as usize).0 {
        r[i - 1] = k;
        let x = s[0] as usize + dm * encode(&r, da);
        buf.push((x as u32, f.mul(coeff, c)));
    }
}

fn bimodule_size(a: &Algebra, m: &Bimodule, n: usize) -> Result<usize> {
    exec::check_budget(|| format!("M ⊗ A^(x{n})"), exec::pow_size(a.dim(), n) * m.dim() as u128)
}

fn bimodule_combination(a: &Algebra, m: &Bimodule, n: usize, faces: &[(usize, u32)]) -> Result<SparseMatrix> {
    if m.algebra_dim() != a.dim() {
        return Err(Error::DimensionMismatch { op: "bar", detail: "bimodule is over a different algebra".into() });
    }
    let cols = bimodule_size(a, m, n + 1)?;
    let rows = bimodule_size(a, m, n)?;
    let (dm, da) = (m.dim(), a.dim());
    Ok(SparseMatrix::from_column_fn(a.field(), rows, cols, |x, buf| {
        let mut s = Vec::with_capacity(n + 2);
        s.push((x % dm) as u32);
        let mut y = x / dm;
        for _ in 0..=n {
            s.push((y % da) as u32);
            y /= da;
        }
        for &(i, c) in faces {
            bimodule_face_terms(a, m, n + 1, i, &s, c, buf);
        }
    }))
}

/// `b': M ⊗ A^{⊗(n+1)} → M ⊗ A^{⊗n}`, the alternating sum of faces `0..=n`.
pub fn bprime_matrix(a: &Algebra, m: &Bimodule, n: usize) -> Result<SparseMatrix> {
    let f = a.field();
    let faces: Vec<(usize, u32)> = (0..=n).map(|i| (i, f.sign(i))).collect();
    bimodule_combination(a, m, n, &faces)
}

/// `b = b' + (-1)^{n+1} t: M ⊗ A^{⊗(n+1)} → M ⊗ A^{⊗n}`.
pub fn hochschild_b_matrix(a: &Algebra, m: &Bimodule, n: usize) -> Result<SparseMatrix> {
    let f = a.field();
    let faces: Vec<(usize, u32)> = (0..=n + 1).map(|i| (i, f.sign(i))).collect();
    bimodule_combination(a, m, n, &faces)
}

pub fn hochschild_complex(a: &Algebra, m: &Bimodule, top: usize) -> Result<ChainComplex> {
    let dims = (0..=top).map(|n| bimodule_size(a, m, n)).collect::<Result<Vec<_>>>()?;
    let d = (1..=top).map(|n| hochschild_b_matrix(a, m, n - 1)).collect::<Result<Vec<_>>>()?;
    ChainComplex::new(0, dims, d, true)
}

/// `dim HH_n(A, M)` for `n = 0..n_max`.
pub fn hh_dims(a: &Algebra, m: &Bimodule, n_max: usize) -> Result<Vec<usize>> {
    let dims = (0..=n_max).map(|n| bimodule_size(a, m, n)).collect::<Result<Vec<_>>>()?;
    let construction = format!("hochschild-rank:{}", m.hash());
    let ranks = exec::map_range(n_max, |n| {
        cache::rank(cache::Key::new(a, &construction, n), || hochschild_b_matrix(a, m, n).map(|b| rank(&b)))
    });
    let ranks = ranks.into_iter().collect::<Result<Vec<_>>>()?;
    Ok((0..n_max)
        .map(|n| dims[n] - if n > 0 { ranks[n - 1] } else { 0 } - ranks[n])
        .collect())
}
