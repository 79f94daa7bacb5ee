//! Kähler differentials computed straight from the multiplication table.

use crate::algkit::Algebra;
use crate::exactlin::{rank, Field, MatrixBuilder, SparseVec};

fn kron<F: Field>(f: &F, u: &[F::Elem], v: &[F::Elem]) -> SparseVec<F::Elem> {
    let d = v.len();
    let mut out = Vec::new();
    for (i, x) in u.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in v.iter().enumerate() {
            let p = f.mul(x, y);
            if !f.is_zero(&p) {
                out.push((i * d + j, p));
            }
        }
    }
    SparseVec::from_sorted(out)
}

fn relations<F: Field>(a: &Algebra<F>, with_exact: bool) -> MatrixBuilder<F> {
    let f = a.field();
    let d = a.dim();
    let mut mb = MatrixBuilder::new(f, d * d);
    // x ⊗ y stands for x dy; relations x d(yz) = xy dz + xz dy
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                let ex = a.basis_vector(x);
                let xy = a.mul_by_basis(&ex, y);
                let xz = a.mul_by_basis(&ex, z);
                let yz = a.mul_by_basis(&a.basis_vector(y), z);
                let v = kron(f, &xy, &a.basis_vector(z))
                    .add(f, &kron(f, &xz, &a.basis_vector(y)))
                    .sub(f, &kron(f, &ex, &yz));
                mb.push_column(v);
            }
        }
    }
    if with_exact {
        for y in 0..d {
            mb.push_column(kron(f, a.unit(), &a.basis_vector(y)));
        }
    }
    mb
}

/// dim Ω¹ of the algebra over its ground field.
pub fn kahler_dim<F: Field>(a: &Algebra<F>) -> usize {
    let m = relations(a, false).finish();
    m.rows() - rank(&m)
}

/// dim Ω¹ / dA.
pub fn kahler_mod_exact_dim<F: Field>(a: &Algebra<F>) -> usize {
    let m = relations(a, true).finish();
    m.rows() - rank(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algkit::{build_algebra, AlgebraSpec};
    use crate::exactlin::{PrimeField, Rationals};

    fn dims(spec: &str) -> [usize; 3] {
        let s: AlgebraSpec = spec.parse().unwrap();
        let q = kahler_dim(&build_algebra(&s, &Rationals).unwrap());
        let f2 = kahler_dim(&build_algebra(&s, &PrimeField::new(2).unwrap()).unwrap());
        let f3 = kahler_dim(&build_algebra(&s, &PrimeField::new(3).unwrap()).unwrap());
        [q, f2, f3]
    }

    #[test]
    fn omega_one_on_the_corpus() {
        assert_eq!(dims("trunc:2"), [1, 2, 1]);
        assert_eq!(dims("trunc:3"), [2, 2, 3]);
        assert_eq!(dims("group:2"), [0, 2, 0]);
        assert_eq!(dims("group:3"), [0, 0, 3]);
        assert_eq!(dims("prod:2"), [0, 0, 0]);
    }

    #[test]
    fn exact_forms_removed() {
        let a = build_algebra(&AlgebraSpec::Trunc(2), &Rationals).unwrap();
        assert_eq!(kahler_mod_exact_dim(&a), 0);
        let a = build_algebra(&AlgebraSpec::Trunc(2), &PrimeField::new(2).unwrap()).unwrap();
        assert_eq!(kahler_mod_exact_dim(&a), 1);
    }
}
