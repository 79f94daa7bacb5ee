use super::field::Field;
use super::sparse::{lincomb, SparseVec};

const NO_ROW: usize = usize::MAX;

/// Result of reducing a vector: `remainder = scale * v - (combination of rows)`.
#[derive(Clone, Debug)]
pub struct Reduction<E> {
    pub remainder: SparseVec<E>,
    pub scale: E,
}

/// Incremental row echelon form.
///
/// Only indices below `pivot_limit` can become pivots; indices at or above it
/// act as tag coordinates that ride along with each row.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    field: F,
    pivot_limit: usize,
    rows: Vec<SparseVec<F::Elem>>,
    pivot_row: Vec<usize>,
}

impl<F: Field> Echelon<F> {
    pub fn new(field: &F, pivot_limit: usize) -> Self {
        Echelon {
            field: field.clone(),
            pivot_limit,
            rows: Vec::new(),
            pivot_row: vec![NO_ROW; pivot_limit],
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn pivot_limit(&self) -> usize {
        self.pivot_limit
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Rows in insertion order; each row's leading index is its pivot.
    pub fn rows(&self) -> &[SparseVec<F::Elem>] {
        &self.rows
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.rows.iter().filter_map(|r| r.leading()).collect();
        p.sort_unstable();
        p
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        c < self.pivot_limit && self.pivot_row[c] != NO_ROW
    }

    pub fn reduce(&self, v: &SparseVec<F::Elem>) -> Reduction<F::Elem> {
        self.reduce_slice(v.entries())
    }

    pub fn reduce_slice(&self, v: &[(usize, F::Elem)]) -> Reduction<F::Elem> {
        let f = &self.field;
        let mut cur = SparseVec::from_sorted(v.to_vec());
        let mut scale = f.one();
        let mut pos = 0;
        loop {
            let next = cur.entries()[pos..]
                .iter()
                .position(|(c, _)| *c >= self.pivot_limit || self.pivot_row[*c] != NO_ROW);
            let k = match next {
                Some(off) => pos + off,
                None => break,
            };
            let (c, coef) = cur.entries()[k].clone();
            if c >= self.pivot_limit {
                break;
            }
            let row = &self.rows[self.pivot_row[c]];
            let lead = &row.entries()[0].1;
            let minus = f.neg(&coef);
            if f.is_one(lead) {
                cur = lincomb(f, cur.entries(), &f.one(), row.entries(), &minus);
            } else {
                cur = lincomb(f, cur.entries(), lead, row.entries(), &minus);
                scale = f.mul(&scale, lead);
                f.shrink(cur.entries_mut(), &mut scale);
            }
            pos = k;
        }
        Reduction { remainder: cur, scale }
    }

    /// True when `v` lies in the span of the rows (ignoring nothing).
    pub fn contains(&self, v: &SparseVec<F::Elem>) -> bool {
        self.reduce(v).remainder.is_zero()
    }

    /// Inserts the reduced remainder if it has a new pivot; returns that pivot.
    pub fn insert(&mut self, v: &SparseVec<F::Elem>) -> Option<usize> {
        let red = self.reduce(v);
        self.insert_remainder(red.remainder)
    }

    /// Inserts an already reduced vector.
    pub fn insert_remainder(&mut self, mut r: SparseVec<F::Elem>) -> Option<usize> {
        let lead = r.leading()?;
        if lead >= self.pivot_limit {
            return None;
        }
        debug_assert_eq!(self.pivot_row[lead], NO_ROW);
        self.field.normalize(r.entries_mut());
        self.pivot_row[lead] = self.rows.len();
        self.rows.push(r);
        Some(lead)
    }

    /// Reduced row echelon basis (leading coefficient one, pivot columns cleared),
    /// sorted by pivot.
    pub fn rref_rows(&self) -> Vec<SparseVec<F::Elem>> {
        let f = &self.field;
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| self.rows[i].leading());
        let mut done: Vec<SparseVec<F::Elem>> = vec![SparseVec::new(); order.len()];
        let mut slot_of_row = vec![0usize; self.rows.len()];
        for (slot, &i) in order.iter().enumerate() {
            slot_of_row[i] = slot;
        }
        for slot in (0..order.len()).rev() {
            let mut cur = self.rows[order[slot]].clone();
            let mut pos = 1;
            loop {
                let next = cur.entries()[pos..]
                    .iter()
                    .position(|(c, _)| *c < self.pivot_limit && self.pivot_row[*c] != NO_ROW);
                let k = match next {
                    Some(off) => pos + off,
                    None => break,
                };
                let (c, coef) = cur.entries()[k].clone();
                let other = &done[slot_of_row[self.pivot_row[c]]];
                cur = lincomb(f, cur.entries(), &f.one(), other.entries(), &f.neg(&coef));
                pos = k;
            }
            let inv = f.inv(&cur.entries()[0].1).expect("pivot is nonzero");
            done[slot] = cur.scale(f, &inv);
        }
        done
    }
}
