use crate::chaincore::{homology_map, Bicomplex, ChainComplex, TotalComplex};
use crate::error::{Error, Result};
use crate::exactlin::{Field, HomologyResult, MatrixBuilder, SparseMatrix, SparseVec};
use crate::fincat::{shift, tau, SetMap, Site};
use crate::funmod::FunctorModule;

use super::hochschild::hochschild_boundary;
use super::hochschild::HochschildSign;

/// Which sign pattern to use for B: C_n → C_{n+1}.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BConvention {
    /// Σ_{i=0}^{n} (−1)^{ni} [F(s τ^i) − (−1)^{n+1} F(τ' s τ^i)], i.e. (1 − t) s N.
    #[default]
    Standard,
    /// (−1)^n Σ_{i=1}^{n+1} (−1)^i [F(s τ^i) − F(τ' s τ^i)]; fails B² = 0 over Q.
    Literal,
}

fn tau_power(n: usize, i: usize) -> Result<SetMap> {
    let t = tau(n);
    let mut acc = SetMap::identity(Site::Fin, n);
    for _ in 0..i {
        acc = t.compose(&acc)?;
    }
    Ok(acc)
}

/// The Connes operator B on an F-module.
pub fn connes_b<F: Field>(g: &dyn FunctorModule<F>, n: usize, conv: BConvention) -> Result<SparseMatrix<F>> {
    let (s_part, t_part) = connes_b_parts(g, n, conv)?;
    s_part.add(&t_part)
}

/// B split into its F(s τ^i) terms and its F(τ' s τ^i) terms.
pub fn connes_b_parts<F: Field>(
    g: &dyn FunctorModule<F>,
    n: usize,
    conv: BConvention,
) -> Result<(SparseMatrix<F>, SparseMatrix<F>)> {
    if g.site() != Site::Fin {
        return Err(Error::Invalid("Connes' operator needs an F-module".into()));
    }
    let f = g.field();
    let s = shift(n);
    let t1 = tau(n + 1);
    let mut s_part = SparseMatrix::zero(f, g.dim(n + 1)?, g.dim(n)?);
    let mut t_part = s_part.clone();
    // (i, s-term negative, τ'-term negative)
    let terms: Vec<(usize, bool, bool)> = match conv {
        BConvention::Standard => (0..=n)
            .map(|i| {
                let eps = n * i % 2 == 1;
                (i, eps, eps ^ (n % 2 == 1))
            })
            .collect(),
        BConvention::Literal => (1..=n + 1)
            .map(|i| {
                let eps = (n + i) % 2 == 1;
                (i, eps, !eps)
            })
            .collect(),
    };
    for (i, neg_s, neg_t) in terms {
        let st = s.compose(&tau_power(n, i)?)?;
        let tst = t1.compose(&st)?;
        s_part = s_part.lincomb(&f.one(), &*g.matrix(&st)?, &f.sign(neg_s))?;
        t_part = t_part.lincomb(&f.one(), &*g.matrix(&tst)?, &f.sign(neg_t))?;
    }
    Ok((s_part, t_part))
}

/// The cyclic bicomplex with C_{q−p} at (p, q), b vertical and B horizontal.
pub struct CyclicBicomplex<F: Field> {
    pub bicomplex: Bicomplex<F>,
    pub total: TotalComplex<F>,
    pub top: usize,
}

pub fn cyclic_bicomplex<F: Field>(
    g: &dyn FunctorModule<F>,
    top: usize,
    conv: BConvention,
) -> Result<CyclicBicomplex<F>> {
    let f = g.field();
    let mut bc = Bicomplex::new(f);
    let dims = (0..=top).map(|n| g.dim(n)).collect::<Result<Vec<_>>>()?;
    let bs = (1..=top)
        .map(|n| hochschild_boundary(g, n, HochschildSign::Alternating))
        .collect::<Result<Vec<_>>>()?;
    let big_b = (0..top).map(|n| connes_b(g, n, conv)).collect::<Result<Vec<_>>>()?;
    for p in 0..=top / 2 {
        for q in p..=top - p {
            bc.add_entry(p, q, dims[q - p]);
        }
    }
    for p in 0..=top / 2 {
        for q in p..=top - p {
            let n = q - p;
            if n >= 1 {
                bc.set_vertical(p, q, bs[n - 1].clone())?;
            }
            if p >= 1 {
                bc.set_horizontal(p, q, big_b[n].clone())?;
            }
        }
    }
    let total = bc.total_complex(top)?;
    Ok(CyclicBicomplex { bicomplex: bc, total, top })
}

impl<F: Field> CyclicBicomplex<F> {
    pub fn complex(&self) -> &ChainComplex<F> {
        &self.total.complex
    }

    pub fn homology(&self, n: usize) -> Result<HomologyResult<F>> {
        self.total.complex.homology(n)
    }

    /// I: C_n → Tot_n, inclusion of the column p = 0.
    pub fn inclusion(&self, n: usize) -> Result<SparseMatrix<F>> {
        let f = self.total.complex.field();
        let block = self.total.block(n, 0).ok_or_else(|| Error::Dimension(format!("no column 0 in degree {n}")))?;
        let mut mb = MatrixBuilder::new(f, self.total.complex.rank(n));
        for j in 0..block.dim {
            mb.push_column(SparseVec::unit(f, block.offset + j));
        }
        Ok(mb.finish())
    }

    /// S: Tot_n → Tot_{n−2}, dropping column 0 and moving column p to p − 1.
    pub fn periodicity(&self, n: usize) -> Result<SparseMatrix<F>> {
        let f = self.total.complex.field();
        if n < 2 {
            return Ok(SparseMatrix::zero(f, 0, self.total.complex.rank(n)));
        }
        let mut entries = Vec::new();
        for p in 1..=n / 2 {
            if let (Some(src), Some(tgt)) = (self.total.block(n, p), self.total.block(n - 2, p - 1)) {
                for j in 0..src.dim {
                    entries.push((tgt.offset + j, src.offset + j, f.one()));
                }
            }
        }
        SparseMatrix::from_triplets(f, self.total.complex.rank(n - 2), self.total.complex.rank(n), entries)
    }

    /// Column-0 component Tot_n → C_n.
    pub fn column_zero(&self, n: usize) -> Result<SparseMatrix<F>> {
        Ok(self.inclusion(n)?.transpose())
    }
}

/// The maps of the periodicity sequence on homology, in representative coordinates.
pub struct PeriodicityMaps<F: Field> {
    /// I_n: HH_n → HC_n
    pub i: Vec<SparseMatrix<F>>,
    /// S_n: HC_n → HC_{n−2} (zero target for n < 2)
    pub s: Vec<SparseMatrix<F>>,
    /// B_n: HC_n → HH_{n+1}
    pub b: Vec<SparseMatrix<F>>,
    pub hh: Vec<usize>,
    pub hc: Vec<usize>,
}

/// Exactness witness at one node of the periodicity sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessCheck {
    pub node: String,
    pub composite_zero: bool,
    pub rank_in: usize,
    pub rank_out: usize,
    pub dim: usize,
}

impl ExactnessCheck {
    pub fn holds(&self) -> bool {
        self.composite_zero && self.rank_in + self.rank_out == self.dim
    }
}

pub fn periodicity_maps<F: Field>(
    hochschild: &ChainComplex<F>,
    cyclic: &CyclicBicomplex<F>,
    hb: &dyn Fn(usize) -> Result<SparseMatrix<F>>,
    max: usize,
) -> Result<PeriodicityMaps<F>> {
    let hh: Vec<HomologyResult<F>> = (0..=max + 1).map(|n| hochschild.homology(n)).collect::<Result<_>>()?;
    let hc: Vec<HomologyResult<F>> = (0..=max).map(|n| cyclic.homology(n)).collect::<Result<_>>()?;
    let f = hochschild.field();
    let mut out = PeriodicityMaps { i: vec![], s: vec![], b: vec![], hh: vec![], hc: vec![] };
    for n in 0..=max {
        out.i.push(homology_map(&cyclic.inclusion(n)?, &hh[n], &hc[n])?);
        if n >= 2 {
            out.s.push(homology_map(&cyclic.periodicity(n)?, &hc[n], &hc[n - 2])?);
        } else {
            out.s.push(SparseMatrix::zero(f, 0, hc[n].dim));
        }
        let phi = hb(n)?.mul(&cyclic.column_zero(n)?)?;
        out.b.push(homology_map(&phi, &hc[n], &hh[n + 1])?);
    }
    out.hh = hh.iter().map(|h| h.dim).collect();
    out.hc = hc.iter().map(|h| h.dim).collect();
    Ok(out)
}

impl<F: Field> PeriodicityMaps<F> {
    /// Exactness of … → HH_n → HC_n → HC_{n−2} → HH_{n−1} → … at every node through `max`.
    pub fn exactness(&self) -> Result<Vec<ExactnessCheck>> {
        use crate::exactlin::rank;
        let max = self.i.len() - 1;
        let mut out = Vec::new();
        for n in 0..=max {
            let comp = self.s[n].mul(&self.i[n])?;
            out.push(ExactnessCheck {
                node: format!("HC_{n}"),
                composite_zero: comp.is_zero(),
                rank_in: rank(&self.i[n]),
                rank_out: rank(&self.s[n]),
                dim: self.hc[n],
            });
            let (rank_in, zero) = if n >= 1 {
                (rank(&self.b[n - 1]), self.i[n].mul(&self.b[n - 1])?.is_zero())
            } else {
                (0, true)
            };
            out.push(ExactnessCheck {
                node: format!("HH_{n}"),
                composite_zero: zero,
                rank_in,
                rank_out: rank(&self.i[n]),
                dim: self.hh[n],
            });
            if n + 2 <= max {
                let comp = self.b[n].mul(&self.s[n + 2])?;
                out.push(ExactnessCheck {
                    node: format!("HC_{n} (S in, B out)"),
                    composite_zero: comp.is_zero(),
                    rank_in: rank(&self.s[n + 2]),
                    rank_out: rank(&self.b[n]),
                    dim: self.hc[n],
                });
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algkit::{build_algebra, AlgebraSpec};
    use crate::exactlin::{PrimeField, Rationals};
    use crate::funmod::loday;
    use std::sync::Arc;

    fn fmod<F: Field>(spec: AlgebraSpec, f: &F) -> Arc<dyn FunctorModule<F>> {
        Arc::new(loday(Arc::new(build_algebra(&spec, f).unwrap())))
    }

    #[test]
    fn b_in_degree_zero_is_symmetric_unit_insertion() {
        let g = fmod(AlgebraSpec::Trunc(2), &Rationals);
        let b = connes_b(g.as_ref(), 0, BConvention::Standard).unwrap();
        // a ↦ 1⊗a + a⊗1, words 00, 01, 10, 11
        let one = Rationals.one();
        assert_eq!(b.column(0).entries(), &[(0, Rationals.from_i64(2))]);
        assert_eq!(b.column(1).entries(), &[(1, one.clone()), (2, one)]);
    }

    #[test]
    fn standard_b_squares_and_anticommutes() {
        let g = fmod(AlgebraSpec::Trunc(3), &Rationals);
        let bb = |n| connes_b(g.as_ref(), n, BConvention::Standard).unwrap();
        let hb = |n| hochschild_boundary(g.as_ref(), n, HochschildSign::Alternating).unwrap();
        for m in 0..3 {
            assert!(bb(m + 1).mul(&bb(m)).unwrap().is_zero(), "B² on C_{m}");
            let lhs = hb(m + 1).mul(&bb(m)).unwrap();
            if m == 0 {
                assert!(lhs.is_zero());
            } else {
                let rhs = bb(m - 1).mul(&hb(m)).unwrap();
                assert!(lhs.add(&rhs).unwrap().is_zero(), "bB + Bb on C_{m}");
            }
        }
    }

    #[test]
    fn literal_b_fails_over_q() {
        let g = fmod(AlgebraSpec::Trunc(2), &Rationals);
        let fails = (0..3).any(|n| {
            let b0 = connes_b(g.as_ref(), n, BConvention::Literal).unwrap();
            let b1 = connes_b(g.as_ref(), n + 1, BConvention::Literal).unwrap();
            !b1.mul(&b0).unwrap().is_zero()
        });
        assert!(fails);
    }

    #[test]
    fn cyclic_homology_of_ground_field() {
        let g = fmod(AlgebraSpec::Trunc(1), &Rationals);
        let c = cyclic_bicomplex(g.as_ref(), 5, BConvention::Standard).unwrap();
        assert_eq!(c.complex().homology_dims(4).unwrap(), vec![1, 0, 1, 0, 1]);
        let f2 = PrimeField::new(2).unwrap();
        let g = fmod(AlgebraSpec::Trunc(1), &f2);
        let c = cyclic_bicomplex(g.as_ref(), 5, BConvention::Standard).unwrap();
        assert_eq!(c.complex().homology_dims(4).unwrap(), vec![1, 0, 1, 0, 1]);
    }
}
