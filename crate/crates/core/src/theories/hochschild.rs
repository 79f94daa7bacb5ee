use crate::chaincore::{quotient_complex, ChainComplex};
use crate::error::Result;
use crate::exactlin::{Field, SparseMatrix, SubspacePresentation};
use crate::fincat::{degeneracy, face};
use crate::funmod::FunctorModule;

/// Sign pattern of the Hochschild boundary.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum HochschildSign {
    /// b = Σ (−1)^i G(d_i)
    #[default]
    Alternating,
    /// b = Σ G(d_i); fails b² = 0 away from characteristic 2
    Unsigned,
}

pub fn hochschild_boundary<F: Field>(
    g: &dyn FunctorModule<F>,
    n: usize,
    sign: HochschildSign,
) -> Result<SparseMatrix<F>> {
    let f = g.field();
    let mut acc = SparseMatrix::zero(f, g.dim(n - 1)?, g.dim(n)?);
    for i in 0..=n {
        let m = g.matrix(&face(g.site(), n, i)?)?;
        let neg = sign == HochschildSign::Alternating && i % 2 == 1;
        acc = acc.lincomb(&f.one(), &m, &f.sign(neg))?;
    }
    Ok(acc)
}

/// C_n = G(n) with the Hochschild boundary, through degree `top`.
pub fn hochschild_complex<F: Field>(g: &dyn FunctorModule<F>, top: usize) -> Result<ChainComplex<F>> {
    hochschild_complex_signed(g, top, HochschildSign::Alternating)
}

pub fn hochschild_complex_signed<F: Field>(
    g: &dyn FunctorModule<F>,
    top: usize,
    sign: HochschildSign,
) -> Result<ChainComplex<F>> {
    let ranks = (0..=top).map(|n| g.dim(n)).collect::<Result<Vec<_>>>()?;
    let boundaries = (1..=top)
        .map(|n| hochschild_boundary(g, n, sign))
        .collect::<Result<Vec<_>>>()?;
    ChainComplex::new(g.field(), ranks, boundaries)
}

/// Span of the unit insertions in degree n.
pub fn degenerate_chains<F: Field>(g: &dyn FunctorModule<F>, n: usize) -> Result<SubspacePresentation<F>> {
    let dim = g.dim(n)?;
    let mut spanning = Vec::new();
    for i in 1..=n {
        let m = g.matrix(&degeneracy(g.site(), n, i)?)?;
        spanning.extend((0..m.cols()).map(|j| m.column(j)));
    }
    SubspacePresentation::new(g.field(), dim, spanning)
}

/// The Hochschild complex modulo degenerate chains.
pub fn normalized_hochschild_complex<F: Field>(
    g: &dyn FunctorModule<F>,
    top: usize,
) -> Result<ChainComplex<F>> {
    let c = hochschild_complex(g, top)?;
    let spans = (0..=top)
        .map(|n| degenerate_chains(g, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(quotient_complex(&c, &spans)?.complex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algkit::{build_algebra, AlgebraSpec};
    use crate::error::Error;
    use crate::exactlin::{PrimeField, Rationals};
    use crate::funmod::{loday, mu_pullback};
    use std::sync::Arc;

    fn gamma<F: Field>(spec: AlgebraSpec, f: &F) -> Arc<dyn FunctorModule<F>> {
        let a = Arc::new(build_algebra(&spec, f).unwrap());
        Arc::new(mu_pullback(Arc::new(loday(a))).unwrap())
    }

    #[test]
    fn ground_field_is_concentrated_in_degree_zero() {
        let g = gamma(AlgebraSpec::Trunc(1), &Rationals);
        let c = hochschild_complex(g.as_ref(), 4).unwrap();
        assert_eq!(c.homology_dims(3).unwrap(), vec![1, 0, 0, 0]);
    }

    #[test]
    fn b1_vanishes_for_commutative_algebras() {
        let g = gamma(AlgebraSpec::Trunc(3), &Rationals);
        assert!(hochschild_boundary(g.as_ref(), 1, HochschildSign::Alternating).unwrap().is_zero());
    }

    #[test]
    fn unsigned_boundary_fails_over_q() {
        let g = gamma(AlgebraSpec::Trunc(2), &Rationals);
        assert!(matches!(
            hochschild_complex_signed(g.as_ref(), 3, HochschildSign::Unsigned),
            Err(Error::NonzeroComposition { .. })
        ));
    }

    #[test]
    fn normalization_preserves_homology() {
        let f2 = PrimeField::new(2).unwrap();
        let g = gamma(AlgebraSpec::Trunc(2), &Rationals);
        assert_eq!(degenerate_chains(g.as_ref(), 1).unwrap().dim(), 2);
        let u = hochschild_complex(g.as_ref(), 4).unwrap();
        let n = normalized_hochschild_complex(g.as_ref(), 4).unwrap();
        assert_eq!(n.rank(1), 2);
        assert_eq!(u.homology_dims(3).unwrap(), n.homology_dims(3).unwrap());
        let g2 = gamma(AlgebraSpec::Trunc(2), &f2);
        let u = hochschild_complex(g2.as_ref(), 4).unwrap();
        let n = normalized_hochschild_complex(g2.as_ref(), 4).unwrap();
        assert_eq!(u.homology_dims(3).unwrap(), n.homology_dims(3).unwrap());
    }

    #[test]
    fn trunc2_values() {
        let g = gamma(AlgebraSpec::Trunc(2), &Rationals);
        let c = hochschild_complex(g.as_ref(), 4).unwrap();
        assert_eq!(c.homology_dims(3).unwrap(), vec![2, 1, 1, 1]);
        let f2 = PrimeField::new(2).unwrap();
        let g = gamma(AlgebraSpec::Trunc(2), &f2);
        let c = hochschild_complex(g.as_ref(), 4).unwrap();
        assert_eq!(c.homology_dims(3).unwrap(), vec![2, 2, 2, 2]);
    }
}
