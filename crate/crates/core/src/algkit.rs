//! Finite-dimensional commutative unital algebras given by structure constants.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exactlin::Field;

/// Textual description of an algebra, independent of the coefficient field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AlgebraSpec {
    /// k[x]/(x^N)
    Trunc(usize),
    /// k[Z/M]
    Group(usize),
    /// k^R
    Prod(usize),
    File(PathBuf),
    Tensor(Box<AlgebraSpec>, Box<AlgebraSpec>),
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraSpec::Trunc(n) => write!(f, "trunc:{n}"),
            AlgebraSpec::Group(m) => write!(f, "group:{m}"),
            AlgebraSpec::Prod(r) => write!(f, "prod:{r}"),
            AlgebraSpec::File(p) => write!(f, "file:{}", p.display()),
            AlgebraSpec::Tensor(a, b) => write!(f, "tensor({a},{b})"),
        }
    }
}

impl FromStr for AlgebraSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("tensor(").and_then(|r| r.strip_suffix(')')) {
            let split = top_level_comma(inner)
                .ok_or_else(|| Error::Parse(format!("tensor needs two arguments: {s:?}")))?;
            let a = inner[..split].parse()?;
            let b = inner[split + 1..].parse()?;
            return Ok(AlgebraSpec::Tensor(Box::new(a), Box::new(b)));
        }
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("unknown algebra spec {s:?}")))?;
        let count = |what: &str| -> Result<usize> {
            let n: usize = arg
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad {what} in {s:?}")))?;
            if n == 0 {
                return Err(Error::Parse(format!("{what} must be at least 1 in {s:?}")));
            }
            Ok(n)
        };
        match kind.trim() {
            "trunc" => Ok(AlgebraSpec::Trunc(count("N")?)),
            "group" => Ok(AlgebraSpec::Group(count("M")?)),
            "prod" => Ok(AlgebraSpec::Prod(count("R")?)),
            "file" if !arg.trim().is_empty() => Ok(AlgebraSpec::File(PathBuf::from(arg.trim()))),
            _ => Err(Error::Parse(format!("unknown algebra spec {s:?}"))),
        }
    }
}

fn top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

/// A commutative unital algebra with a chosen basis e_0, …, e_{d-1}.
#[derive(Clone, Debug)]
pub struct Algebra<F: Field> {
    field: F,
    name: String,
    dim: usize,
    unit: Vec<F::Elem>,
    /// `table[i][j]` is the coefficient vector of e_i e_j.
    table: Vec<Vec<Vec<F::Elem>>>,
    /// Set when every product e_i e_j is zero or a single basis element with coefficient one.
    monomial: Option<Vec<Vec<Option<usize>>>>,
    unit_index: Option<usize>,
}

impl<F: Field> Algebra<F> {
    /// Validates commutativity, associativity and the unit.
    pub fn new(
        field: &F,
        name: impl Into<String>,
        unit: Vec<F::Elem>,
        table: Vec<Vec<Vec<F::Elem>>>,
    ) -> Result<Self> {
        let dim = unit.len();
        let name = name.into();
        if dim == 0 {
            return Err(Error::Invalid(format!("algebra {name} has dimension 0")));
        }
        if table.len() != dim
            || table.iter().any(|r| r.len() != dim || r.iter().any(|v| v.len() != dim))
        {
            return Err(Error::Dimension(format!(
                "structure table of {name} is not {dim}x{dim}x{dim}"
            )));
        }
        let monomial = monomial_table(field, &table);
        let unit_index = single_basis(field, &unit);
        let a = Algebra { field: field.clone(), name, dim, unit, table, monomial, unit_index };
        a.check_axioms()?;
        Ok(a)
    }

    fn check_axioms(&self) -> Result<()> {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                if self.table[i][j] != self.table[j][i] {
                    return Err(Error::Axiom(format!(
                        "{}: commutativity fails for (e{i}, e{j})",
                        self.name
                    )));
                }
            }
        }
        for i in 0..d {
            if self.mul_dense(&self.unit, &self.basis_vector(i)) != self.basis_vector(i) {
                return Err(Error::Axiom(format!("{}: unit fails on e{i}", self.name)));
            }
        }
        for i in 0..d {
            for j in 0..d {
                let ij = self.table[i][j].clone();
                for l in 0..d {
                    let left = self.mul_dense(&ij, &self.basis_vector(l));
                    let right = self.mul_dense(&self.basis_vector(i), &self.table[j][l]);
                    if left != right {
                        return Err(Error::Axiom(format!(
                            "{}: associativity fails for (e{i}, e{j}, e{l})",
                            self.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn unit(&self) -> &[F::Elem] {
        &self.unit
    }
    pub fn table(&self) -> &[Vec<Vec<F::Elem>>] {
        &self.table
    }

    pub fn basis_vector(&self, i: usize) -> Vec<F::Elem> {
        let mut v = vec![self.field.zero(); self.dim];
        v[i] = self.field.one();
        v
    }

    /// Index of e_i e_j when the table is monomial.
    pub fn monomial_product(&self, i: usize, j: usize) -> Option<Option<usize>> {
        self.monomial.as_ref().map(|m| m[i][j])
    }

    pub fn is_monomial(&self) -> bool {
        self.monomial.is_some() && self.unit_index.is_some()
    }

    pub fn unit_index(&self) -> Option<usize> {
        self.unit_index
    }

    fn mul_dense(&self, u: &[F::Elem], v: &[F::Elem]) -> Vec<F::Elem> {
        let f = &self.field;
        let mut out = vec![f.zero(); self.dim];
        for (i, a) in u.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in v.iter().enumerate() {
                if f.is_zero(b) {
                    continue;
                }
                let ab = f.mul(a, b);
                for (k, c) in self.table[i][j].iter().enumerate() {
                    if !f.is_zero(c) {
                        out[k] = f.add(&out[k], &f.mul(&ab, c));
                    }
                }
            }
        }
        out
    }

    pub fn multiply(&self, u: &[F::Elem], v: &[F::Elem]) -> Result<Vec<F::Elem>> {
        if u.len() != self.dim || v.len() != self.dim {
            return Err(Error::Dimension(format!(
                "vectors of length {} and {} in an algebra of dimension {}",
                u.len(),
                v.len(),
                self.dim
            )));
        }
        Ok(self.mul_dense(u, v))
    }

    /// Product of the listed basis elements; the empty product is the unit.
    pub fn multiset_product(&self, indices: &[usize]) -> Vec<F::Elem> {
        let mut acc = self.unit.clone();
        for &i in indices {
            acc = self.mul_by_basis(&acc, i);
        }
        acc
    }

    pub fn mul_by_basis(&self, u: &[F::Elem], i: usize) -> Vec<F::Elem> {
        let f = &self.field;
        let mut out = vec![f.zero(); self.dim];
        for (j, a) in u.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (k, c) in self.table[j][i].iter().enumerate() {
                if !f.is_zero(c) {
                    out[k] = f.add(&out[k], &f.mul(a, c));
                }
            }
        }
        out
    }

    /// The same algebra on a basis whose first vector is the unit, or `None` if the
    /// unit already is a basis vector. The unit replaces e_k for the first k with u_k ≠ 0.
    pub fn unit_adapted(&self) -> Option<Result<Algebra<F>>> {
        if self.unit_index.is_some() {
            return None;
        }
        let f = &self.field;
        let u = &self.unit;
        let k = u.iter().position(|x| !f.is_zero(x))?;
        let rest: Vec<usize> = (0..self.dim).filter(|&i| i != k).collect();
        let old = |a: usize| if a == 0 { u.clone() } else { self.basis_vector(rest[a - 1]) };
        let coords = |v: Vec<F::Elem>| -> Vec<F::Elem> {
            let c = f.div(&v[k], &u[k]).expect("u_k is nonzero");
            std::iter::once(c.clone())
                .chain(rest.iter().map(|&i| f.sub(&v[i], &f.mul(&c, &u[i]))))
                .collect()
        };
        let table = (0..self.dim)
            .map(|a| (0..self.dim).map(|b| coords(self.mul_dense(&old(a), &old(b)))).collect())
            .collect();
        let mut unit = vec![f.zero(); self.dim];
        unit[0] = f.one();
        Some(Algebra::new(f, self.name.clone(), unit, table))
    }

    /// Stable digest of the field, unit and table.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.field.kind().to_string().as_bytes());
        h.update(format!("|{}|", self.dim).as_bytes());
        for x in &self.unit {
            h.update(self.field.render_plain(x).as_bytes());
            h.update(b",");
        }
        for row in &self.table {
            for v in row {
                for x in v {
                    h.update(self.field.render_plain(x).as_bytes());
                    h.update(b",");
                }
                h.update(b";");
            }
        }
        hex::encode(h.finalize())
    }
}

fn single_basis<F: Field>(f: &F, v: &[F::Elem]) -> Option<usize> {
    let nz: Vec<usize> = (0..v.len()).filter(|&k| !f.is_zero(&v[k])).collect();
    match nz.as_slice() {
        [k] if f.is_one(&v[*k]) => Some(*k),
        _ => None,
    }
}

fn monomial_table<F: Field>(f: &F, table: &[Vec<Vec<F::Elem>>]) -> Option<Vec<Vec<Option<usize>>>> {
    let mut out = Vec::with_capacity(table.len());
    for row in table {
        let mut r = Vec::with_capacity(row.len());
        for v in row {
            if v.iter().all(|x| f.is_zero(x)) {
                r.push(None);
            } else {
                r.push(Some(single_basis(f, v)?));
            }
        }
        out.push(r);
    }
    Some(out)
}

pub fn build_algebra<F: Field>(spec: &AlgebraSpec, field: &F) -> Result<Algebra<F>> {
    let z = || field.zero();
    let basis = |d: usize, k: usize| {
        let mut v = vec![field.zero(); d];
        v[k] = field.one();
        v
    };
    match spec {
        AlgebraSpec::Trunc(n) => {
            let d = *n;
            let table = (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| if i + j < d { basis(d, i + j) } else { vec![z(); d] })
                        .collect()
                })
                .collect();
            Algebra::new(field, spec.to_string(), basis(d, 0), table)
        }
        AlgebraSpec::Group(m) => {
            let d = *m;
            let table = (0..d)
                .map(|i| (0..d).map(|j| basis(d, (i + j) % d)).collect())
                .collect();
            Algebra::new(field, spec.to_string(), basis(d, 0), table)
        }
        AlgebraSpec::Prod(r) => {
            let d = *r;
            let table = (0..d)
                .map(|i| (0..d).map(|j| if i == j { basis(d, i) } else { vec![z(); d] }).collect())
                .collect();
            Algebra::new(field, spec.to_string(), vec![field.one(); d], table)
        }
        AlgebraSpec::File(path) => {
            let text = std::fs::read_to_string(path)?;
            algebra_from_json(field, &text)
        }
        AlgebraSpec::Tensor(a, b) => {
            let a = build_algebra(a, field)?;
            let b = build_algebra(b, field)?;
            tensor(&a, &b, spec.to_string())
        }
    }
}

/// Algebra on the basis e_i ⊗ f_j, index i * dim(B) + j.
fn tensor<F: Field>(a: &Algebra<F>, b: &Algebra<F>, name: String) -> Result<Algebra<F>> {
    let f = a.field();
    let (da, db) = (a.dim(), b.dim());
    let d = da * db;
    let kron = |u: &[F::Elem], v: &[F::Elem]| -> Vec<F::Elem> {
        let mut out = Vec::with_capacity(d);
        for x in u {
            for y in v {
                out.push(f.mul(x, y));
            }
        }
        out
    };
    let mut table = vec![vec![Vec::new(); d]; d];
    for i1 in 0..da {
        for j1 in 0..db {
            for i2 in 0..da {
                for j2 in 0..db {
                    table[i1 * db + j1][i2 * db + j2] = kron(&a.table()[i1][i2], &b.table()[j1][j2]);
                }
            }
        }
    }
    Algebra::new(f, name, kron(a.unit(), b.unit()), table)
}

fn parse_scalar<F: Field>(field: &F, v: &Value) -> Result<F::Elem> {
    match v {
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(field.from_i64(i)),
            None => field.parse_elem(&n.to_string()),
        },
        Value::String(s) => field.parse_elem(s),
        other => Err(Error::Parse(format!("expected a scalar, found {other}"))),
    }
}

/// Reads `{"name", "dim", "unit", "table"}` and validates the axioms.
pub fn algebra_from_json<F: Field>(field: &F, text: &str) -> Result<Algebra<F>> {
    let v: Value = serde_json::from_str(text)?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("algebra JSON must be an object".into()))?;
    let name = obj.get("name").and_then(Value::as_str).unwrap_or("custom").to_string();
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("algebra JSON needs an integer \"dim\"".into()))? as usize;
    let arr = |v: Option<&Value>, what: &str| -> Result<Vec<Value>> {
        v.and_then(Value::as_array)
            .cloned()
            .ok_or_else(|| Error::Parse(format!("algebra JSON needs an array {what:?}")))
    };
    let unit = arr(obj.get("unit"), "unit")?
        .iter()
        .map(|x| parse_scalar(field, x))
        .collect::<Result<Vec<_>>>()?;
    if unit.len() != dim {
        return Err(Error::Dimension(format!("unit has length {} but dim is {dim}", unit.len())));
    }
    let mut table = Vec::with_capacity(dim);
    for row in arr(obj.get("table"), "table")? {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Parse("table rows must be arrays".into()))?;
        let mut r = Vec::with_capacity(dim);
        for cell in row {
            let cell = cell
                .as_array()
                .ok_or_else(|| Error::Parse("table cells must be arrays".into()))?;
            r.push(cell.iter().map(|x| parse_scalar(field, x)).collect::<Result<Vec<_>>>()?);
        }
        table.push(r);
    }
    Algebra::new(field, name, unit, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{PrimeField, Rationals};

    #[test]
    fn spec_grammar() {
        assert_eq!("trunc:2".parse::<AlgebraSpec>().unwrap(), AlgebraSpec::Trunc(2));
        assert_eq!(
            "tensor(trunc:2,group:3)".parse::<AlgebraSpec>().unwrap().to_string(),
            "tensor(trunc:2,group:3)"
        );
        assert!("trunc:0".parse::<AlgebraSpec>().is_err());
        assert!("poly:2".parse::<AlgebraSpec>().is_err());
        assert!("trunc:x".parse::<AlgebraSpec>().is_err());
    }

    #[test]
    fn defining_relations() {
        let q = Rationals;
        let t = build_algebra(&AlgebraSpec::Trunc(2), &q).unwrap();
        assert_eq!(t.multiset_product(&[1, 1]), vec![q.zero(), q.zero()]);
        assert_eq!(t.multiset_product(&[]), t.unit().to_vec());
        let g = build_algebra(&AlgebraSpec::Group(3), &q).unwrap();
        assert_eq!(g.multiset_product(&[1, 1, 1]), g.basis_vector(0));
        assert_eq!(g.multiply(&g.basis_vector(1), &g.basis_vector(2)).unwrap(), g.basis_vector(0));
        let p = build_algebra(&AlgebraSpec::Prod(2), &q).unwrap();
        assert_eq!(p.multiset_product(&[0, 1]), vec![q.zero(), q.zero()]);
        assert_eq!(p.multiset_product(&[1, 1]), p.basis_vector(1));
        assert!(!p.is_monomial());
        assert!(t.is_monomial());
    }

    #[test]
    fn trunc3_square_over_f2() {
        let f = PrimeField::new(2).unwrap();
        let t = build_algebra(&AlgebraSpec::Trunc(3), &f).unwrap();
        let x1 = vec![1, 1, 0];
        assert_eq!(t.multiply(&x1, &x1).unwrap(), vec![1, 0, 1]);
        assert!(t.multiply(&x1, &[1]).is_err());
    }

    #[test]
    fn json_roundtrip_and_axiom_errors() {
        let q = Rationals;
        let ok = r#"{"name":"dual","dim":2,"unit":[1,0],"table":[[[1,0],[0,1]],[[0,1],[0,0]]]}"#;
        let a = algebra_from_json(&q, ok).unwrap();
        assert_eq!(a.dim(), 2);
        let noncomm = r#"{"name":"bad","dim":2,"unit":[1,0],"table":[[[1,0],[0,1]],[[0,"1/2"],[0,0]]]}"#;
        match algebra_from_json(&q, noncomm) {
            Err(Error::Axiom(m)) => assert!(m.contains("(e0, e1)"), "{m}"),
            other => panic!("unexpected {other:?}"),
        }
        let golden = r#"{"name":"golden","dim":2,"unit":[1,0],"table":[[[1,0],[0,1]],[[0,1],[1,1]]]}"#;
        assert!(algebra_from_json(&q, golden).is_ok());
        let nonassoc = r#"{"name":"bad","dim":3,"unit":[1,0,0],"table":[
            [[1,0,0],[0,1,0],[0,0,1]],
            [[0,1,0],[0,0,1],[0,0,0]],
            [[0,0,1],[0,0,0],[0,1,0]]]}"#;
        match algebra_from_json(&q, nonassoc) {
            Err(Error::Axiom(m)) => assert!(m.contains("associativity"), "{m}"),
            other => panic!("unexpected {other:?}"),
        }
        let nonunital = r#"{"name":"bad","dim":2,"unit":[0,1],"table":[[[1,0],[0,1]],[[0,1],[0,0]]]}"#;
        assert!(matches!(algebra_from_json(&q, nonunital), Err(Error::Axiom(_))));
    }

    #[test]
    fn unit_adapted_basis() {
        let a = build_algebra(&AlgebraSpec::Prod(3), &Rationals).unwrap();
        let b = a.unit_adapted().unwrap().unwrap();
        assert_eq!(b.unit_index(), Some(0));
        assert!(b.is_monomial());
        let t = build_algebra(&AlgebraSpec::Trunc(2), &Rationals).unwrap();
        assert!(t.unit_adapted().is_none());
    }

    #[test]
    fn tensor_dimension_and_fingerprint() {
        let f = PrimeField::new(3).unwrap();
        let spec: AlgebraSpec = "tensor(trunc:2,prod:2)".parse().unwrap();
        let a = build_algebra(&spec, &f).unwrap();
        assert_eq!(a.dim(), 4);
        let b = build_algebra(&spec, &f).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = build_algebra(&AlgebraSpec::Trunc(4), &f).unwrap();
        assert_ne!(a.fingerprint(), c.fingerprint());
    }
}
