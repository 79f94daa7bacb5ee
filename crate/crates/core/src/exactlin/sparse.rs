use std::fmt::Write as _;

use super::field::{Field, ScalarField};
use crate::error::{Error, Result};

/// Sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseVec<E> {
    entries: Vec<(usize, E)>,
}

impl<E> Default for SparseVec<E> {
    fn default() -> Self {
        SparseVec { entries: Vec::new() }
    }
}

impl<E: Clone> SparseVec<E> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Caller guarantees sorted distinct indices and nonzero values.
    pub fn from_sorted(entries: Vec<(usize, E)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        SparseVec { entries }
    }

    pub fn unit<F: Field<Elem = E>>(field: &F, i: usize) -> Self {
        SparseVec { entries: vec![(i, field.one())] }
    }

    /// Sorts, merges duplicate indices and drops zeros.
    pub fn from_pairs<F: Field<Elem = E>>(field: &F, mut pairs: Vec<(usize, E)>) -> Self {
        pairs.sort_by_key(|(i, _)| *i);
        let mut out: Vec<(usize, E)> = Vec::with_capacity(pairs.len());
        for (i, x) in pairs {
            match out.last_mut() {
                Some((j, y)) if *j == i => *y = field.add(y, &x),
                _ => {
                    if let Some((_, y)) = out.last() {
                        if field.is_zero(y) {
                            out.pop();
                        }
                    }
                    out.push((i, x));
                }
            }
        }
        if let Some((_, y)) = out.last() {
            if field.is_zero(y) {
                out.pop();
            }
        }
        SparseVec { entries: out }
    }

    pub fn from_dense<F: Field<Elem = E>>(field: &F, dense: &[E]) -> Self {
        SparseVec {
            entries: dense
                .iter()
                .enumerate()
                .filter(|(_, x)| !field.is_zero(x))
                .map(|(i, x)| (i, x.clone()))
                .collect(),
        }
    }

    pub fn to_dense<F: Field<Elem = E>>(&self, field: &F, len: usize) -> Vec<E> {
        let mut d = vec![field.zero(); len];
        for (i, x) in &self.entries {
            d[*i] = x.clone();
        }
        d
    }

    pub fn entries(&self) -> &[(usize, E)] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [(usize, E)] {
        &mut self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, E)> {
        self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, E)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn leading(&self) -> Option<usize> {
        self.entries.first().map(|(i, _)| *i)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn get(&self, i: usize) -> Option<&E> {
        self.entries
            .binary_search_by_key(&i, |(j, _)| *j)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn scale<F: Field<Elem = E>>(&self, field: &F, c: &E) -> Self {
        if field.is_zero(c) {
            return Self::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, x)| (*i, field.mul(x, c))).collect(),
        }
    }

    pub fn neg<F: Field<Elem = E>>(&self, field: &F) -> Self {
        SparseVec {
            entries: self.entries.iter().map(|(i, x)| (*i, field.neg(x))).collect(),
        }
    }

    pub fn add<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        let one = field.one();
        lincomb(field, &self.entries, &one, &other.entries, &one)
    }

    pub fn sub<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        lincomb(field, &self.entries, &field.one(), &other.entries, &field.neg(&field.one()))
    }

    /// Adds `offset` to every index.
    pub fn shifted(&self, offset: usize) -> Self {
        SparseVec {
            entries: self.entries.iter().map(|(i, x)| (i + offset, x.clone())).collect(),
        }
    }

    /// Entries with index in `[lo, hi)`, reindexed from zero.
    pub fn window(&self, lo: usize, hi: usize) -> Self {
        SparseVec {
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| *i >= lo && *i < hi)
                .map(|(i, x)| (i - lo, x.clone()))
                .collect(),
        }
    }

    pub fn dot<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> E {
        let (mut a, mut b) = (0, 0);
        let mut acc = field.zero();
        while a < self.entries.len() && b < other.entries.len() {
            let (i, x) = &self.entries[a];
            let (j, y) = &other.entries[b];
            if i < j {
                a += 1;
            } else if j < i {
                b += 1;
            } else {
                acc = field.add(&acc, &field.mul(x, y));
                a += 1;
                b += 1;
            }
        }
        acc
    }
}

/// `ca * a + cb * b` for sorted slices.
pub fn lincomb<F: Field>(
    field: &F,
    a: &[(usize, F::Elem)],
    ca: &F::Elem,
    b: &[(usize, F::Elem)],
    cb: &F::Elem,
) -> SparseVec<F::Elem> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let a_one = field.is_one(ca);
    let b_one = field.is_one(cb);
    let sa = |x: &F::Elem| if a_one { x.clone() } else { field.mul(x, ca) };
    let sb = |x: &F::Elem| if b_one { x.clone() } else { field.mul(x, cb) };
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (ka, xa) = &a[i];
        let (kb, xb) = &b[j];
        if ka < kb {
            out.push((*ka, sa(xa)));
            i += 1;
        } else if kb < ka {
            out.push((*kb, sb(xb)));
            j += 1;
        } else {
            let s = field.add(&sa(xa), &sb(xb));
            if !field.is_zero(&s) {
                out.push((*ka, s));
            }
            i += 1;
            j += 1;
        }
    }
    out.extend(a[i..].iter().map(|(k, x)| (*k, sa(x))));
    out.extend(b[j..].iter().map(|(k, x)| (*k, sb(x))));
    if field.is_zero(ca) || field.is_zero(cb) {
        out.retain(|(_, x)| !field.is_zero(x));
    }
    SparseVec { entries: out }
}

/// Column-major sparse matrix over a field.
#[derive(Clone, Debug)]
pub struct SparseMatrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    col_ptr: Vec<usize>,
    entries: Vec<(usize, F::Elem)>,
}

impl<F: Field> PartialEq for SparseMatrix<F> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.col_ptr == other.col_ptr
            && self.entries == other.entries
    }
}

impl<F: Field> SparseMatrix<F> {
    pub fn zero(field: &F, rows: usize, cols: usize) -> Self {
        SparseMatrix {
            field: field.clone(),
            rows,
            cols,
            col_ptr: vec![0; cols + 1],
            entries: Vec::new(),
        }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = MatrixBuilder::new(field, n);
        for i in 0..n {
            m.push_column(SparseVec::unit(field, i));
        }
        m.finish()
    }

    pub fn from_columns(field: &F, rows: usize, columns: Vec<SparseVec<F::Elem>>) -> Result<Self> {
        let mut b = MatrixBuilder::new(field, rows);
        for (j, c) in columns.into_iter().enumerate() {
            if let Some(m) = c.max_index() {
                if m >= rows {
                    return Err(Error::Dimension(format!(
                        "column {j} has row index {m} but the matrix has {rows} rows"
                    )));
                }
            }
            b.push_column(c);
        }
        Ok(b.finish())
    }

    /// Builds from `(row, col, value)` triplets; duplicate positions are rejected.
    pub fn from_triplets(
        field: &F,
        rows: usize,
        cols: usize,
        triplets: Vec<(usize, usize, F::Elem)>,
    ) -> Result<Self> {
        let mut t = triplets;
        t.sort_by_key(|(r, c, _)| (*c, *r));
        for w in t.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::Parse(format!(
                    "duplicate entry at ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }
        let mut columns: Vec<Vec<(usize, F::Elem)>> = vec![Vec::new(); cols];
        for (r, c, x) in t {
            if r >= rows || c >= cols {
                return Err(Error::Dimension(format!(
                    "entry ({r}, {c}) outside a {rows}x{cols} matrix"
                )));
            }
            if !field.is_zero(&x) {
                columns[c].push((r, x));
            }
        }
        Self::from_columns(
            field,
            rows,
            columns.into_iter().map(SparseVec::from_sorted).collect(),
        )
    }

    /// Row-major dense input, mostly for tests.
    pub fn from_dense_rows(field: &F, rows: &[Vec<F::Elem>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged dense rows".into()));
        }
        let mut t = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !field.is_zero(x) {
                    t.push((i, j, x.clone()));
                }
            }
        }
        Self::from_triplets(field, r, c, t)
    }

    pub fn from_i64_rows(field: &F, rows: &[&[i64]]) -> Result<Self> {
        let dense: Vec<Vec<F::Elem>> = rows
            .iter()
            .map(|r| r.iter().map(|x| field.from_i64(*x)).collect())
            .collect();
        Self::from_dense_rows(field, &dense)
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn column_slice(&self, j: usize) -> &[(usize, F::Elem)] {
        &self.entries[self.col_ptr[j]..self.col_ptr[j + 1]]
    }

    pub fn column(&self, j: usize) -> SparseVec<F::Elem> {
        SparseVec::from_sorted(self.column_slice(j).to_vec())
    }

    pub fn columns(&self) -> impl Iterator<Item = &[(usize, F::Elem)]> + '_ {
        (0..self.cols).map(move |j| self.column_slice(j))
    }

    pub fn get(&self, r: usize, c: usize) -> F::Elem {
        let col = self.column_slice(c);
        match col.binary_search_by_key(&r, |(i, _)| *i) {
            Ok(k) => col[k].1.clone(),
            Err(_) => self.field.zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn first_nonzero_column(&self) -> Option<usize> {
        (0..self.cols).find(|&j| self.col_ptr[j + 1] > self.col_ptr[j])
    }

    /// Sorted by (row, col).
    pub fn triplets(&self) -> Vec<(usize, usize, F::Elem)> {
        let mut t: Vec<_> = (0..self.cols)
            .flat_map(|j| self.column_slice(j).iter().map(move |(i, x)| (*i, j, x.clone())))
            .collect();
        t.sort_by_key(|(r, c, _)| (*r, *c));
        t
    }

    pub fn mul_vec(&self, v: &SparseVec<F::Elem>) -> Result<SparseVec<F::Elem>> {
        if let Some(m) = v.max_index() {
            if m >= self.cols {
                return Err(Error::Dimension(format!(
                    "vector index {m} exceeds {} columns",
                    self.cols
                )));
            }
        }
        Ok(self.apply_slice(v.entries()))
    }

    /// `self * v` where `v` is known to fit.
    pub fn apply_slice(&self, v: &[(usize, F::Elem)]) -> SparseVec<F::Elem> {
        match v.len() {
            0 => SparseVec::new(),
            1 => {
                let (j, c) = &v[0];
                SparseVec::from_sorted(self.column_slice(*j).to_vec()).scale(&self.field, c)
            }
            _ => {
                let mut pairs = Vec::new();
                for (j, c) in v {
                    for (i, x) in self.column_slice(*j) {
                        pairs.push((*i, self.field.mul(x, c)));
                    }
                }
                SparseVec::from_pairs(&self.field, pairs)
            }
        }
    }

    pub fn mul(&self, other: &SparseMatrix<F>) -> Result<SparseMatrix<F>> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut b = MatrixBuilder::new(&self.field, self.rows);
        for j in 0..other.cols {
            b.push_column(self.apply_slice(other.column_slice(j)));
        }
        Ok(b.finish())
    }

    fn same_shape(&self, other: &Self, op: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "cannot {op} {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// `a * self + b * other`.
    pub fn lincomb(&self, a: &F::Elem, other: &Self, b: &F::Elem) -> Result<Self> {
        self.same_shape(other, "combine")?;
        let mut out = MatrixBuilder::new(&self.field, self.rows);
        for j in 0..self.cols {
            out.push_column(lincomb(
                &self.field,
                self.column_slice(j),
                a,
                other.column_slice(j),
                b,
            ));
        }
        Ok(out.finish())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let one = self.field.one();
        self.lincomb(&one, other, &one)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let one = self.field.one();
        self.lincomb(&one, other, &self.field.neg(&one))
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let mut out = MatrixBuilder::new(&self.field, self.rows);
        for j in 0..self.cols {
            out.push_column(SparseVec::from_sorted(self.column_slice(j).to_vec()).scale(&self.field, c));
        }
        out.finish()
    }

    pub fn neg(&self) -> Self {
        self.scale(&self.field.neg(&self.field.one()))
    }

    pub fn transpose(&self) -> Self {
        let mut cols: Vec<Vec<(usize, F::Elem)>> = vec![Vec::new(); self.rows];
        for j in 0..self.cols {
            for (i, x) in self.column_slice(j) {
                cols[*i].push((j, x.clone()));
            }
        }
        let mut b = MatrixBuilder::new(&self.field, self.cols);
        for c in cols {
            b.push_column(SparseVec::from_sorted(c));
        }
        b.finish()
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut b = MatrixBuilder::new(&self.field, self.rows);
        for &j in idx {
            b.push_column(self.column(j));
        }
        b.finish()
    }

    /// Header line `rows cols field`, then one `row col value` line per entry.
    pub fn to_triplet_string(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.cols, self.field.kind());
        for (r, c, x) in self.triplets() {
            let _ = writeln!(s, "{r} {c} {}", self.field.render_plain(&x));
        }
        s
    }

    pub fn parse_triplets(field: &F, text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 {
            return Err(Error::Parse(format!("bad header {header:?}")));
        }
        let rows: usize = h[0].parse().map_err(|_| Error::Parse(format!("bad row count {:?}", h[0])))?;
        let cols: usize = h[1].parse().map_err(|_| Error::Parse(format!("bad column count {:?}", h[1])))?;
        let kind: ScalarField = h[2].parse()?;
        if kind != field.kind() {
            return Err(Error::InvalidField(format!(
                "matrix is over {kind} but {} was requested",
                field.kind()
            )));
        }
        let mut t = Vec::new();
        for l in lines {
            let parts: Vec<&str> = l.splitn(3, char::is_whitespace).collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!("bad entry line {l:?}")));
            }
            let r: usize = parts[0].parse().map_err(|_| Error::Parse(format!("bad row in {l:?}")))?;
            let c: usize = parts[1].trim().parse().map_err(|_| Error::Parse(format!("bad column in {l:?}")))?;
            t.push((r, c, field.parse_elem(parts[2])?));
        }
        Self::from_triplets(field, rows, cols, t)
    }
}

/// Appends columns one at a time into CSC storage.
pub struct MatrixBuilder<F: Field> {
    field: F,
    rows: usize,
    col_ptr: Vec<usize>,
    entries: Vec<(usize, F::Elem)>,
}

impl<F: Field> MatrixBuilder<F> {
    pub fn new(field: &F, rows: usize) -> Self {
        MatrixBuilder {
            field: field.clone(),
            rows,
            col_ptr: vec![0],
            entries: Vec::new(),
        }
    }

    pub fn push_column(&mut self, c: SparseVec<F::Elem>) {
        debug_assert!(c.max_index().map_or(true, |m| m < self.rows));
        self.entries.extend(c.into_entries());
        self.col_ptr.push(self.entries.len());
    }

    pub fn finish(self) -> SparseMatrix<F> {
        SparseMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.col_ptr.len() - 1,
            col_ptr: self.col_ptr,
            entries: self.entries,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::field::{PrimeField, Rationals};

    #[test]
    fn from_pairs_merges_and_drops_zeros() {
        let f = PrimeField::new(3).unwrap();
        let v = SparseVec::from_pairs(&f, vec![(4, 1), (1, 2), (4, 2), (0, 1), (1, 1)]);
        assert_eq!(v.entries(), &[(0, 1)]);
    }

    #[test]
    fn triplet_roundtrip_over_q() {
        let q = Rationals;
        let m = SparseMatrix::from_triplets(
            &q,
            2,
            3,
            vec![
                (0, 2, q.parse_elem("3/2").unwrap()),
                (1, 0, q.parse_elem("-1").unwrap()),
            ],
        )
        .unwrap();
        let s = m.to_triplet_string();
        assert_eq!(s, "2 3 Q\n0 2 3/2\n1 0 -1\n");
        assert_eq!(SparseMatrix::parse_triplets(&q, &s).unwrap(), m);
    }

    #[test]
    fn triplets_reject_bad_input() {
        let f = PrimeField::new(2).unwrap();
        assert!(SparseMatrix::from_triplets(&f, 2, 2, vec![(0, 0, 1), (0, 0, 1)]).is_err());
        assert!(SparseMatrix::from_triplets(&f, 2, 2, vec![(2, 0, 1)]).is_err());
        assert!(SparseMatrix::parse_triplets(&f, "2 2 Q\n").is_err());
    }

    #[test]
    fn product_and_transpose() {
        let q = Rationals;
        let a = SparseMatrix::from_i64_rows(&q, &[&[1, 2], &[0, 1]]).unwrap();
        let b = SparseMatrix::from_i64_rows(&q, &[&[1, -2], &[0, 1]]).unwrap();
        assert_eq!(a.mul(&b).unwrap(), SparseMatrix::identity(&q, 2));
        assert_eq!(a.transpose().get(1, 0), q.from_i64(2));
        assert!(a.mul(&SparseMatrix::zero(&q, 3, 1)).is_err());
    }
}
