use super::echelon::Echelon;
use super::field::{Field, ScalarField};
use super::sparse::{MatrixBuilder, SparseMatrix, SparseVec};
use crate::error::{Error, Result};

/// Rank, kernel basis and image basis of a matrix.
#[derive(Clone, Debug)]
pub struct RankKernelImage<F: Field> {
    pub rank: usize,
    /// Basis of the null space, as vectors in the source.
    pub kernel: Vec<SparseVec<F::Elem>>,
    /// Columns of the matrix that span the image.
    pub image: Vec<SparseVec<F::Elem>>,
    pub image_columns: Vec<usize>,
}

/// Column processing order: leading row, then sparsest, then lowest index.
fn pivot_order<F: Field>(m: &SparseMatrix<F>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m.cols()).collect();
    order.sort_by_key(|&j| {
        let c = m.column_slice(j);
        (c.first().map_or(usize::MAX, |(i, _)| *i), c.len(), j)
    });
    order
}

pub fn rank_kernel_image<F: Field>(m: &SparseMatrix<F>) -> RankKernelImage<F> {
    let f = m.field();
    let rows = m.rows();
    let mut ech = Echelon::new(f, rows);
    let mut kernel = Vec::new();
    let mut image_columns = Vec::new();
    for j in pivot_order(m) {
        let mut aug = m.column_slice(j).to_vec();
        aug.push((rows + j, f.one()));
        let red = ech.reduce(&SparseVec::from_sorted(aug));
        match red.remainder.leading() {
            Some(l) if l < rows => {
                ech.insert_remainder(red.remainder);
                image_columns.push(j);
            }
            _ => {
                let mut k = red.remainder.window(rows, rows + m.cols());
                f.normalize(k.entries_mut());
                kernel.push(k);
            }
        }
    }
    kernel.sort_by_key(|k| k.max_index());
    image_columns.sort_unstable();
    let image = image_columns.iter().map(|&j| m.column(j)).collect();
    RankKernelImage {
        rank: image_columns.len(),
        kernel,
        image,
        image_columns,
    }
}

pub fn rank<F: Field>(m: &SparseMatrix<F>) -> usize {
    let mut ech = Echelon::new(m.field(), m.rows());
    for j in pivot_order(m) {
        ech.insert(&m.column(j));
    }
    ech.rank()
}

/// A subspace given by spanning vectors, kept in reduced echelon form.
#[derive(Clone, Debug)]
pub struct SubspacePresentation<F: Field> {
    ambient_dim: usize,
    echelon: Echelon<F>,
    reduced: Vec<SparseVec<F::Elem>>,
}

impl<F: Field> SubspacePresentation<F> {
    pub fn new<I>(field: &F, ambient_dim: usize, spanning: I) -> Result<Self>
    where
        I: IntoIterator<Item = SparseVec<F::Elem>>,
    {
        let mut echelon = Echelon::new(field, ambient_dim);
        for v in spanning {
            if let Some(m) = v.max_index() {
                if m >= ambient_dim {
                    return Err(Error::Dimension(format!(
                        "spanning vector index {m} outside ambient dimension {ambient_dim}"
                    )));
                }
            }
            echelon.insert(&v);
        }
        let reduced = echelon.rref_rows();
        Ok(SubspacePresentation { ambient_dim, echelon, reduced })
    }

    pub fn zero(field: &F, ambient_dim: usize) -> Self {
        SubspacePresentation {
            ambient_dim,
            echelon: Echelon::new(field, ambient_dim),
            reduced: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.reduced.len()
    }

    pub fn reduced_basis(&self) -> &[SparseVec<F::Elem>] {
        &self.reduced
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.reduced.iter().filter_map(|r| r.leading()).collect()
    }

    pub fn contains(&self, v: &SparseVec<F::Elem>) -> bool {
        self.echelon.contains(v)
    }

    pub fn field(&self) -> &F {
        self.echelon.field()
    }
}

/// Quotient V/W with a projection and a section through the non-pivot basis vectors.
#[derive(Clone, Debug)]
pub struct QuotientPresentation<F: Field> {
    pub proj: SparseMatrix<F>,
    pub section: SparseMatrix<F>,
    /// Ambient basis indices that survive in the quotient, in order.
    pub complement: Vec<usize>,
}

impl<F: Field> QuotientPresentation<F> {
    pub fn dim(&self) -> usize {
        self.complement.len()
    }
}

pub fn quotient_presentation<F: Field>(sub: &SubspacePresentation<F>) -> QuotientPresentation<F> {
    let f = sub.field();
    let n = sub.ambient_dim();
    let mut row_of_pivot = vec![usize::MAX; n];
    for (r, v) in sub.reduced.iter().enumerate() {
        row_of_pivot[v.leading().expect("nonzero row")] = r;
    }
    let complement: Vec<usize> = (0..n).filter(|&c| row_of_pivot[c] == usize::MAX).collect();
    let mut pos = vec![usize::MAX; n];
    for (k, &c) in complement.iter().enumerate() {
        pos[c] = k;
    }
    let mut proj = MatrixBuilder::new(f, complement.len());
    for c in 0..n {
        if pos[c] != usize::MAX {
            proj.push_column(SparseVec::unit(f, pos[c]));
        } else {
            let row = &sub.reduced[row_of_pivot[c]];
            proj.push_column(SparseVec::from_sorted(
                row.entries()[1..]
                    .iter()
                    .map(|(i, x)| (pos[*i], f.neg(x)))
                    .collect(),
            ));
        }
    }
    let mut section = MatrixBuilder::new(f, n);
    for &c in &complement {
        section.push_column(SparseVec::unit(f, c));
    }
    QuotientPresentation {
        proj: proj.finish(),
        section: section.finish(),
        complement,
    }
}

/// Homology of `C_{n+1} -> C_n -> C_{n-1}` at `C_n`, with coordinates on representatives.
#[derive(Clone, Debug)]
pub struct HomologyResult<F: Field> {
    pub degree: usize,
    pub dim: usize,
    pub chain_dim: usize,
    pub cycles_dim: usize,
    pub boundary_rank: usize,
    pub field: ScalarField,
    pub representatives: Vec<SparseVec<F::Elem>>,
    basis: Echelon<F>,
}

impl<F: Field> HomologyResult<F> {
    /// `cycles` must be a basis of the cycle space; `boundaries` any spanning set of B.
    pub fn from_parts<I>(
        field: &F,
        degree: usize,
        chain_dim: usize,
        cycles: &[SparseVec<F::Elem>],
        boundaries: I,
    ) -> Self
    where
        I: IntoIterator<Item = SparseVec<F::Elem>>,
    {
        let mut basis = Echelon::new(field, chain_dim);
        for b in boundaries {
            basis.insert(&b);
        }
        let boundary_rank = basis.rank();
        let mut reps = Vec::new();
        for z in cycles {
            let mut tagged = z.entries().to_vec();
            tagged.push((chain_dim + reps.len(), field.one()));
            let red = basis.reduce(&SparseVec::from_sorted(tagged));
            if matches!(red.remainder.leading(), Some(l) if l < chain_dim) {
                basis.insert_remainder(red.remainder);
                reps.push(z.clone());
            }
        }
        HomologyResult {
            degree,
            dim: reps.len(),
            chain_dim,
            cycles_dim: cycles.len(),
            boundary_rank,
            field: field.kind(),
            representatives: reps,
            basis,
        }
    }

    /// Coordinates of the class of a cycle `z` in the representative basis.
    pub fn coordinates(&self, z: &SparseVec<F::Elem>) -> Result<Vec<F::Elem>> {
        let f = self.basis.field();
        let red = self.basis.reduce(z);
        if matches!(red.remainder.leading(), Some(l) if l < self.chain_dim) {
            return Err(Error::Invalid(format!(
                "vector is not a cycle in degree {}",
                self.degree
            )));
        }
        let mut out = vec![f.zero(); self.dim];
        for (i, t) in red.remainder.entries() {
            let k = i - self.chain_dim;
            out[k] = f.div(&f.neg(t), &red.scale).expect("scale is nonzero");
        }
        Ok(out)
    }

    /// True when `z` is a boundary.
    pub fn is_boundary(&self, z: &SparseVec<F::Elem>) -> Result<bool> {
        let f = self.basis.field();
        Ok(self.coordinates(z)?.iter().all(|c| f.is_zero(c)))
    }
}

/// Homology at the middle of `d_in: C_{n+1} -> C_n` and `d_out: C_n -> C_{n-1}`.
/// Fails if the composite is nonzero.
pub fn homology_at<F: Field>(
    d_in: &SparseMatrix<F>,
    d_out: &SparseMatrix<F>,
) -> Result<HomologyResult<F>> {
    if d_in.rows() != d_out.cols() {
        return Err(Error::Dimension(format!(
            "incoming map lands in dimension {} but outgoing map starts in {}",
            d_in.rows(),
            d_out.cols()
        )));
    }
    let comp = d_out.mul(d_in)?;
    if let Some(column) = comp.first_nonzero_column() {
        return Err(Error::NonzeroComposition {
            location: "homology_at".into(),
            column,
        });
    }
    let cycles = rank_kernel_image(d_out).kernel;
    Ok(HomologyResult::from_parts(
        d_in.field(),
        0,
        d_out.cols(),
        &cycles,
        (0..d_in.cols()).map(|j| d_in.column(j)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::field::{PrimeField, Rationals};

    #[test]
    fn two_by_two_over_f2_rank_one() {
        let f = PrimeField::new(2).unwrap();
        let m = SparseMatrix::from_i64_rows(&f, &[&[1, 1], &[1, 1]]).unwrap();
        let r = rank_kernel_image(&m);
        assert_eq!(r.rank, 1);
        assert_eq!(r.kernel.len(), 1);
        assert_eq!(r.kernel[0].entries(), &[(0, 1), (1, 1)]);
        let q = Rationals;
        let m = SparseMatrix::from_i64_rows(&q, &[&[1, 1], &[1, -1]]).unwrap();
        assert_eq!(rank(&m), 2);
        let f2m = SparseMatrix::from_i64_rows(&f, &[&[1, 1], &[1, -1]]).unwrap();
        assert_eq!(rank(&f2m), 1);
    }

    #[test]
    fn kernel_vectors_are_killed() {
        let q = Rationals;
        let m = SparseMatrix::from_i64_rows(&q, &[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]).unwrap();
        let r = rank_kernel_image(&m);
        assert_eq!(r.rank, 2);
        assert_eq!(r.kernel.len(), 2);
        for k in &r.kernel {
            assert!(m.mul_vec(k).unwrap().is_zero());
        }
    }

    #[test]
    fn circle_homology() {
        // triangle boundary: three vertices, three edges
        let q = Rationals;
        let d1 = SparseMatrix::from_i64_rows(&q, &[&[-1, 0, 1], &[1, -1, 0], &[0, 1, -1]]).unwrap();
        let d0 = SparseMatrix::zero(&q, 0, 3);
        let d2 = SparseMatrix::zero(&q, 3, 0);
        assert_eq!(homology_at(&d1, &d0).unwrap().dim, 1);
        assert_eq!(homology_at(&d2, &d1).unwrap().dim, 1);
    }

    #[test]
    fn nonzero_composite_reports_column() {
        let q = Rationals;
        let a = SparseMatrix::from_i64_rows(&q, &[&[0, 1]]).unwrap();
        let b = SparseMatrix::from_i64_rows(&q, &[&[1]]).unwrap();
        match homology_at(&a, &b) {
            Err(Error::NonzeroComposition { column, .. }) => assert_eq!(column, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn quotient_projection_and_section() {
        let q = Rationals;
        let w = SubspacePresentation::new(
            &q,
            3,
            vec![SparseVec::from_pairs(&q, vec![(0, q.from_i64(1)), (2, q.from_i64(-1))])],
        )
        .unwrap();
        let qp = quotient_presentation(&w);
        assert_eq!(qp.dim(), 2);
        assert_eq!(qp.proj.mul(&qp.section).unwrap(), SparseMatrix::identity(&q, 2));
        assert!(qp.proj.mul_vec(&w.reduced_basis()[0]).unwrap().is_zero());
    }

    #[test]
    fn coordinates_of_classes() {
        let q = Rationals;
        // C_1 = Q^2 with zero boundary out, image spanned by (1,1)
        let d_in = SparseMatrix::from_i64_rows(&q, &[&[1], &[1]]).unwrap();
        let d_out = SparseMatrix::zero(&q, 0, 2);
        let h = homology_at(&d_in, &d_out).unwrap();
        assert_eq!(h.dim, 1);
        let z = SparseVec::from_pairs(&q, vec![(0, q.from_i64(3)), (1, q.from_i64(1))]);
        let c = h.coordinates(&z).unwrap();
        let rep = &h.representatives[0];
        // z - c * rep must be a boundary multiple of (1,1)
        let diff = z.sub(&q, &rep.scale(&q, &c[0]));
        assert_eq!(diff.get(0), diff.get(1));
    }
}
