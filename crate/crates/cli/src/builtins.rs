//! Named sample algebras. `builtin:NAME` uses the default field,
//! `builtin:NAME/F_q` overrides it.

use serde::Serialize;

use cyclotome::algebra::{group_algebra, matrix_algebra, truncated_polynomial, Algebra, GroupTable};
use cyclotome::{Error, PrimeField, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Builtin {
    pub name: &'static str,
    pub field: u64,
    pub dim: usize,
    pub description: &'static str,
    pub notes: &'static str,
}

const ENTRIES: &[(&str, u64, &str, &str)] = &[
    ("dual2", 2, "dual numbers k[x]/(x^2)", "not semisimple; u fails to be an isomorphism at small bounds, so HP is reported as not stabilized"),
    ("dual3", 3, "truncated polynomials k[x]/(x^3)", "graded by degree; over F_3 the cube of x vanishes"),
    ("kS3", 3, "group algebra of the symmetric group S_3", "non-abelian; over F_3 the diagonal embedding into the p-fold tensor power applies for p = 3"),
    ("kZ2", 2, "group algebra of Z/2", "over F_2 the diagonal embedding g -> g^(x2) is quasi-Frobenius for p = 2"),
    ("kZ3", 2, "group algebra of Z/3", "semisimple over F_2; the diagonal embedding is quasi-Frobenius for p = 2"),
    ("mat2", 3, "2x2 matrices M_2(k)", "Morita equivalent to k, so HC and HP agree with the ground field"),
    ("mat3", 2, "3x3 matrices M_3(k)", "Morita equivalent to k"),
    ("poly", 3, "k[x,y] modulo monomials of degree >= 3", "weight-graded slice of the polynomial ring in two variables"),
];

/// Sorted by name.
pub fn builtin_catalog() -> Vec<Builtin> {
    let mut out: Vec<Builtin> = ENTRIES
        .iter()
        .map(|&(name, field, description, notes)| Builtin {
            name,
            field,
            dim: build(name, PrimeField::new(field).expect("prime")).expect("builtin").0.dim(),
            description,
            notes,
        })
        .collect();
    out.sort_by(|a, b| a.name.cmp(b.name));
    out
}

fn build(name: &str, field: PrimeField) -> Result<(Algebra, Option<GroupTable>)> {
    let group = |g: GroupTable| -> Result<(Algebra, Option<GroupTable>)> { Ok((group_algebra(&g, field)?, Some(g))) };
    match name {
        "dual2" => Ok((truncated_polynomial(1, 2, field), None)),
        "dual3" => Ok((truncated_polynomial(1, 3, field), None)),
        "kS3" => group(GroupTable::symmetric3()),
        "kZ2" => group(GroupTable::cyclic(2)),
        "kZ3" => group(GroupTable::cyclic(3)),
        "mat2" => Ok((matrix_algebra(2, field), None)),
        "mat3" => Ok((matrix_algebra(3, field), None)),
        "poly" => Ok((truncated_polynomial(2, 3, field), None)),
        _ => Err(Error::Parse(format!("unknown builtin {name:?}; known: {}", ENTRIES.iter().map(|e| e.0).collect::<Vec<_>>().join(", ")))),
    }
}

/// Resolves `NAME` or `NAME/F_q`.
pub fn resolve(spec: &str) -> Result<(Algebra, Option<GroupTable>)> {
    let (name, field) = match spec.split_once('/') {
        Some((n, f)) => {
            let q = f
                .strip_prefix("F_")
                .and_then(|q| q.parse::<u64>().ok())
                .ok_or_else(|| Error::Parse(format!("bad field suffix {f:?}; expected F_q")))?;
            (n, Some(q))
        }
        None => (spec, None),
    };
    let default = ENTRIES
        .iter()
        .find(|e| e.0 == name)
        .map(|e| e.1)
        .ok_or_else(|| Error::Parse(format!("unknown builtin {name:?}")))?;
    build(name, PrimeField::new(field.unwrap_or(default))?)
}

/// Recovers a group table when `a` is a group algebra on its basis.
pub fn group_structure(a: &Algebra) -> Option<GroupTable> {
    a.basic_unit()?;
    let n = a.dim();
    let mut table = vec![vec![0; n]; n];
    for (i, row) in table.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            match a.product(i, j).0.as_slice() {
                [(k, 1)] => *slot = *k as usize,
                _ => return None,
            }
        }
    }
    let g = GroupTable { labels: a.labels().to_vec(), table };
    g.validate().ok()?;
    Some(g)
}
