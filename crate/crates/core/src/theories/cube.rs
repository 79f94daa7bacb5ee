//! The cube construction Q(G) for a Γ-module G, the stabilization map and Q⁰.

use std::sync::Arc;

use rayon::prelude::*;

use crate::chaincore::{ChainComplex, ChainMap};
use crate::error::{Error, Result};
use crate::exactlin::{
    quotient_presentation, rank, Echelon, Field, HomologyResult, MatrixBuilder, QuotientPresentation,
    SparseMatrix, SparseVec, SubspacePresentation,
};
use crate::fincat::{cube_map, degenerate_family, staircase, subset_inclusion, CubeMap, DiagonalRule, Site};
use crate::funmod::{ColumnFn, FunctorModule};

const STREAM_CHUNK: usize = 2048;

/// δ_n on G[2^n] as a list of signed column generators.
pub struct CubeBoundary<'a, F: Field> {
    field: F,
    terms: Vec<(bool, ColumnFn<'a, F::Elem>)>,
}

impl<'a, F: Field> CubeBoundary<'a, F> {
    pub fn new(g: &'a dyn FunctorModule<F>, n: usize) -> Result<Self> {
        let mut terms = Vec::with_capacity(3 * n);
        for i in 1..=n {
            for kind in [CubeMap::P, CubeMap::R, CubeMap::S] {
                let neg = (kind == CubeMap::P) == (i % 2 == 1);
                terms.push((neg, g.columns(&cube_map(kind, n, i)?)?));
            }
        }
        Ok(CubeBoundary { field: g.field().clone(), terms })
    }

    pub fn column(&self, j: usize) -> SparseVec<F::Elem> {
        let f = &self.field;
        let mut pairs = Vec::new();
        for (neg, col) in &self.terms {
            for (i, x) in col(j).into_entries() {
                pairs.push((i, if *neg { f.neg(&x) } else { x }));
            }
        }
        SparseVec::from_pairs(f, pairs)
    }

    pub fn apply(&self, v: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        let f = &self.field;
        let mut pairs = Vec::new();
        for (j, c) in v.iter() {
            for (i, x) in self.column(*j).into_entries() {
                pairs.push((i, f.mul(c, &x)));
            }
        }
        SparseVec::from_pairs(f, pairs)
    }
}

fn check_cap<F: Field>(g: &dyn FunctorModule<F>, n: usize, cap: u128) -> Result<usize> {
    let object = 1usize
        .checked_shl(n as u32)
        .filter(|_| n < usize::BITS as usize - 1)
        .ok_or_else(|| Error::Resource(format!("the {n}-cube has too many vertices")))?;
    let dim = g.dim(object).map_err(|e| match e {
        Error::Resource(m) => Error::Resource(m),
        other => Error::Resource(format!("G[{object}] is out of reach: {other}")),
    })?;
    if dim as u128 > cap {
        return Err(Error::Resource(format!(
            "cube degree {n} needs G[{object}] of dimension {dim}, above the cap {cap}"
        )));
    }
    Ok(dim)
}

/// Q_n = G[2^n] / D_n for n ≤ top, with δ̄ presented below the top and only its image at the top.
pub struct CubeComplex<F: Field> {
    module: Arc<dyn FunctorModule<F>>,
    top: usize,
    rule: DiagonalRule,
    ambient: Vec<usize>,
    degenerate: Vec<SubspacePresentation<F>>,
    quotients: Vec<QuotientPresentation<F>>,
    complex: ChainComplex<F>,
}

/// Spanning vectors of D_n, labelled by the vertex subset they come from.
fn degenerate_spanning<F: Field>(
    g: &dyn FunctorModule<F>,
    n: usize,
    rule: DiagonalRule,
) -> Result<Vec<(String, SparseVec<F::Elem>)>> {
    let mut out = Vec::new();
    for w in degenerate_family(n, rule) {
        let iota = subset_inclusion(n, &w.vertices)?;
        let cols = g.columns(&iota)?;
        for j in 0..g.dim(w.vertices.len())? {
            let v = cols(j);
            if !v.is_zero() {
                out.push((format!("{}#{j}", w.label), v));
            }
        }
    }
    Ok(out)
}

/// D_n as a subspace of G[2^n].
pub fn degenerate_subspace<F: Field>(
    g: &dyn FunctorModule<F>,
    n: usize,
    rule: DiagonalRule,
    cap: u128,
) -> Result<SubspacePresentation<F>> {
    let dim = check_cap(g, n, cap)?;
    let spanning = degenerate_spanning(g, n, rule)?.into_iter().map(|(_, v)| v);
    SubspacePresentation::new(g.field(), dim, spanning)
}

impl<F: Field> CubeComplex<F> {
    pub fn build(module: Arc<dyn FunctorModule<F>>, top: usize, rule: DiagonalRule, cap: u128) -> Result<Self> {
        let g = module.as_ref();
        if g.site() != Site::Gamma {
            return Err(Error::Invalid("the cube construction needs a Γ-module".into()));
        }
        let f = g.field().clone();
        check_cap(g, top, cap)?;
        let ambient = (0..=top).map(|n| g.dim(1 << n)).collect::<Result<Vec<_>>>()?;

        let mut degenerate = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let spanning = degenerate_spanning(g, n, rule)?;
            let pres = SubspacePresentation::new(&f, ambient[n], spanning.iter().map(|(_, v)| v.clone()))?;
            if n >= 1 {
                let delta = CubeBoundary::new(g, n)?;
                let lower: &SubspacePresentation<F> = &degenerate[n - 1];
                let bad = spanning.par_iter().find_first(|(_, v)| !lower.contains(&delta.apply(v)));
                if let Some((label, _)) = bad {
                    return Err(Error::NotSubcomplex {
                        degree: n,
                        witness: format!("δ of the degenerate cube {label} leaves D_{}", n - 1),
                    });
                }
            }
            degenerate.push(pres);
        }
        let quotients: Vec<QuotientPresentation<F>> = degenerate.iter().map(quotient_presentation).collect();
        let ranks: Vec<usize> = quotients.iter().map(|q| q.dim()).collect();

        let mut boundaries = Vec::with_capacity(top.saturating_sub(1));
        for n in 1..top {
            let delta = CubeBoundary::new(g, n)?;
            let cols: Vec<SparseVec<F::Elem>> = quotients[n]
                .complement
                .par_iter()
                .map(|&c| quotients[n - 1].proj.apply_slice(delta.column(c).entries()))
                .collect();
            boundaries.push(SparseMatrix::from_columns(&f, ranks[n - 1], cols)?);
        }

        let complex = if top == 0 {
            ChainComplex::new(&f, ranks, Vec::new())?
        } else {
            // only im δ̄_top is needed; stop once it fills the cycles below
            let cycles_below = match top - 1 {
                0 => ranks[0],
                k => ranks[k] - rank(&boundaries[k - 1]),
            };
            let delta = CubeBoundary::new(g, top)?;
            let proj = &quotients[top - 1].proj;
            let mut ech = Echelon::new(&f, ranks[top - 1]);
            let mut generators = Vec::new();
            let mut start = 0;
            while start < ambient[top] && ech.rank() < cycles_below {
                let end = (start + STREAM_CHUNK).min(ambient[top]);
                let chunk: Vec<SparseVec<F::Elem>> = (start..end)
                    .into_par_iter()
                    .map(|j| proj.apply_slice(delta.column(j).entries()))
                    .collect();
                for v in chunk {
                    if !v.is_zero() && ech.insert(&v).is_some() {
                        generators.push(v);
                    }
                }
                start = end;
            }
            ChainComplex::with_top_image(&f, ranks, boundaries, generators)?
        };
        Ok(CubeComplex { module, top, rule, ambient, degenerate, quotients, complex })
    }

    pub fn module(&self) -> &Arc<dyn FunctorModule<F>> {
        &self.module
    }

    pub fn field(&self) -> &F {
        self.complex.field()
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn rule(&self) -> DiagonalRule {
        self.rule
    }

    pub fn complex(&self) -> &ChainComplex<F> {
        &self.complex
    }

    pub fn ambient_dim(&self, n: usize) -> usize {
        self.ambient[n]
    }

    pub fn degenerate(&self, n: usize) -> &SubspacePresentation<F> {
        &self.degenerate[n]
    }

    pub fn quotient(&self, n: usize) -> &QuotientPresentation<F> {
        &self.quotients[n]
    }

    /// HΓ_n, available for n < top.
    pub fn homology(&self, n: usize) -> Result<HomologyResult<F>> {
        if n >= self.top {
            return Err(Error::Truncation(format!(
                "homology in degree {n} needs cube degree {}, built through {}",
                n + 1,
                self.top
            )));
        }
        self.complex.homology(n)
    }

    pub fn project(&self, n: usize, v: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        self.quotients[n].proj.apply_slice(v.entries())
    }

    pub fn lift(&self, n: usize, v: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        self.quotients[n].section.apply_slice(v.entries())
    }

    /// δ̄_n of a vector of Q_n, valid at every degree including the top.
    pub fn boundary_of(&self, n: usize, v: &SparseVec<F::Elem>) -> Result<SparseVec<F::Elem>> {
        let delta = CubeBoundary::new(self.module.as_ref(), n)?;
        Ok(self.project(n - 1, &delta.apply(&self.lift(n, v))))
    }

    /// (−1)^{⌊n/2⌋} G(σ_n): G[n+1] → G[2^n].
    pub fn stab_ambient(&self, n: usize) -> Result<SparseMatrix<F>> {
        stab_ambient(self.module.as_ref(), n)
    }

    /// stab_n: G[n+1] → Q_n.
    pub fn stab(&self, n: usize) -> Result<SparseMatrix<F>> {
        self.quotients[n].proj.mul(&self.stab_ambient(n)?)
    }

    /// stab as a chain map C_{n+1} → Q_n from the Hochschild complex of the same module.
    pub fn stab_chain_map(&self, hochschild_top: usize) -> Result<ChainMap<F>> {
        let mut phi = ChainMap::new(-1, 1);
        for n in 0..self.top.min(hochschild_top) {
            phi.insert(n + 1, self.stab(n)?);
        }
        Ok(phi)
    }
}

pub fn stab_ambient<F: Field>(g: &dyn FunctorModule<F>, n: usize) -> Result<SparseMatrix<F>> {
    let m = g.matrix(&staircase(n))?;
    Ok(if (n / 2) % 2 == 1 { m.neg() } else { (*m).clone() })
}

/// The subcomplex Q⁰ spanned by the images of stab, in the coordinates of its reduced bases.
pub struct Q0Complex<F: Field> {
    pub spans: Vec<SubspacePresentation<F>>,
    pub complex: ChainComplex<F>,
}

pub fn q0_complex<F: Field>(cube: &CubeComplex<F>) -> Result<Q0Complex<F>> {
    let f = cube.field().clone();
    let mut spans = Vec::with_capacity(cube.top() + 1);
    for n in 0..=cube.top() {
        let s = cube.stab(n)?;
        spans.push(SubspacePresentation::new(&f, s.rows(), (0..s.cols()).map(|j| s.column(j)))?);
    }
    let mut boundaries = Vec::new();
    for n in 1..=cube.top() {
        let pivots = spans[n - 1].pivots();
        let mut mb = MatrixBuilder::new(&f, spans[n - 1].dim());
        for v in spans[n].reduced_basis() {
            let w = cube.boundary_of(n, v)?;
            if !spans[n - 1].contains(&w) {
                return Err(Error::NotSubcomplex {
                    degree: n,
                    witness: "δ of a stabilized chain leaves Q⁰".into(),
                });
            }
            mb.push_column(SparseVec::from_sorted(
                pivots
                    .iter()
                    .enumerate()
                    .filter_map(|(k, p)| w.get(*p).map(|x| (k, x.clone())))
                    .collect(),
            ));
        }
        boundaries.push(mb.finish());
    }
    let ranks = spans.iter().map(|s| s.dim()).collect();
    let complex = ChainComplex::new(&f, ranks, boundaries)?;
    Ok(Q0Complex { spans, complex })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algkit::{build_algebra};
    use crate::exactlin::{PrimeField, Rationals};
    use crate::funmod::{loday, mu_pullback, representable};
    use crate::theories::hochschild::hochschild_complex;

    const CAP: u128 = 1 << 18;

    fn gamma<F: Field>(spec: &str, f: &F) -> Arc<dyn FunctorModule<F>> {
        let a = Arc::new(build_algebra(&spec.parse().unwrap(), f).unwrap());
        Arc::new(mu_pullback(Arc::new(loday(a))).unwrap())
    }

    #[test]
    fn product_algebra_has_no_gamma_homology() {
        let g = gamma("prod:2", &Rationals);
        let q = CubeComplex::build(g, 3, DiagonalRule::Adjacent, CAP).unwrap();
        assert_eq!(q.complex().homology_dims(2).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn trunc2_over_q_and_f2() {
        let g = gamma("trunc:2", &Rationals);
        let q = CubeComplex::build(g, 3, DiagonalRule::Adjacent, CAP).unwrap();
        assert_eq!(q.complex().homology_dims(2).unwrap(), vec![1, 1, 0]);
        let f2 = PrimeField::new(2).unwrap();
        let g = gamma("trunc:2", &f2);
        let q = CubeComplex::build(g, 3, DiagonalRule::Adjacent, CAP).unwrap();
        assert_eq!(q.complex().homology_dims(2).unwrap(), vec![2, 2, 2]);
    }

    #[test]
    fn representables() {
        for (n, expect) in [(1usize, vec![1usize, 0, 0]), (2, vec![2, 0, 0])] {
            let g: Arc<dyn FunctorModule<Rationals>> = Arc::new(representable(&Rationals, Site::Gamma, n));
            let q = CubeComplex::build(g, 3, DiagonalRule::Adjacent, CAP).unwrap();
            assert_eq!(q.complex().homology_dims(2).unwrap(), expect, "Γ^{n}");
        }
    }

    #[test]
    fn all_pairs_breaks_closure() {
        let g = gamma("trunc:2", &Rationals);
        let err = CubeComplex::build(g, 3, DiagonalRule::AllPairs, CAP).err().unwrap();
        assert!(matches!(err, Error::NotSubcomplex { degree: 3, .. }), "{err}");
    }

    #[test]
    fn stab_is_a_chain_map() {
        let f3 = PrimeField::new(3).unwrap();
        let g = gamma("trunc:3", &f3);
        let q = CubeComplex::build(g.clone(), 2, DiagonalRule::Adjacent, CAP).unwrap();
        let c = hochschild_complex(g.as_ref(), 3).unwrap();
        q.stab_chain_map(3).unwrap().check(&c, q.complex()).unwrap();
    }

    #[test]
    fn cap_is_enforced() {
        let g = gamma("trunc:3", &Rationals);
        let err = CubeComplex::build(g, 4, DiagonalRule::Adjacent, CAP).err().unwrap();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn q0_of_reduced_trunc2() {
        let f2 = PrimeField::new(2).unwrap();
        let g = gamma("trunc:2", &f2);
        let red: Arc<dyn FunctorModule<PrimeField>> = Arc::new(crate::funmod::reduced_part(g.clone()).unwrap());
        let q = CubeComplex::build(red, 3, DiagonalRule::Adjacent, CAP).unwrap();
        let q0 = q0_complex(&q).unwrap();
        let hh = hochschild_complex(g.as_ref(), 4).unwrap().homology_dims(3).unwrap();
        assert_eq!(q0.complex.homology_dims(2).unwrap(), hh[1..].to_vec());
    }
}
