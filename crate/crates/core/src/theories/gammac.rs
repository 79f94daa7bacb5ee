//! HΓC as the cone of F(0̄) → Q_0, with the maps of its low-degree exact sequence.

use std::sync::Arc;

use crate::chaincore::{homology_map, mapping_cone, ChainComplex};
use crate::error::{Error, Result};
use crate::exactlin::{Field, HomologyResult, MatrixBuilder, SparseMatrix, SparseVec};
use crate::fincat::{shift, Site};
use crate::funmod::FunctorModule;

use super::cube::CubeComplex;

pub struct GammaCone<F: Field> {
    pub cube: Arc<CubeComplex<F>>,
    /// c: F(0̄) → Q_0, a ↦ class of 1 ⊗ a
    pub c: SparseMatrix<F>,
    pub complex: ChainComplex<F>,
}

impl<F: Field> GammaCone<F> {
    pub fn build(fmod: &dyn FunctorModule<F>, cube: Arc<CubeComplex<F>>) -> Result<Self> {
        if fmod.site() != Site::Fin {
            return Err(Error::Invalid("the cone needs the underlying F-module".into()));
        }
        let s = fmod.matrix(&shift(0))?;
        let c = cube.quotient(0).proj.mul(&s)?;
        let complex = mapping_cone(&c, cube.complex())?;
        Ok(GammaCone { cube, c, complex })
    }

    pub fn x_dim(&self) -> usize {
        self.c.cols()
    }

    /// HΓC_n, available for n below the cube top.
    pub fn homology(&self, n: usize) -> Result<HomologyResult<F>> {
        if n >= self.cube.top() {
            return Err(Error::Truncation(format!(
                "HΓC in degree {n} needs cube degree {}, built through {}",
                n + 1,
                self.cube.top()
            )));
        }
        self.complex.homology(n)
    }
}

/// The maps HΓ_1 → HΓC_1 → F(0̄) → HΓ_0 → HΓC_0 → 0 in representative coordinates.
pub struct FiveTerm<F: Field> {
    pub j: SparseMatrix<F>,
    pub delta: SparseMatrix<F>,
    pub bbar: SparseMatrix<F>,
    pub pi0: SparseMatrix<F>,
    pub dims: [usize; 5],
}

pub fn five_term<F: Field>(cone: &GammaCone<F>) -> Result<FiveTerm<F>> {
    let f = cone.complex.field().clone();
    let x = cone.x_dim();
    let h1 = cone.cube.homology(1)?;
    let h0 = cone.cube.homology(0)?;
    let c1 = cone.homology(1)?;
    let c0 = cone.homology(0)?;
    let q1 = cone.cube.complex().rank(1);
    let q0 = cone.cube.complex().rank(0);

    let incl = SparseMatrix::from_triplets(&f, x + q1, q1, (0..q1).map(|k| (x + k, k, f.one())).collect())?;
    let j = homology_map(&incl, &h1, &c1)?;

    let mut mb = MatrixBuilder::new(&f, x);
    for z in &c1.representatives {
        mb.push_column(z.window(0, x));
    }
    let delta = mb.finish();

    let mut mb = MatrixBuilder::new(&f, h0.dim);
    for a in 0..x {
        let coords = h0.coordinates(&cone.c.column(a))?;
        mb.push_column(SparseVec::from_dense(&f, &coords));
    }
    let bbar = mb.finish();

    let pi0 = homology_map(&SparseMatrix::identity(&f, q0), &h0, &c0)?;
    Ok(FiveTerm { j, delta, bbar, pi0, dims: [h1.dim, c1.dim, x, h0.dim, c0.dim] })
}

impl<F: Field> FiveTerm<F> {
    /// (node, composite zero, rank in + rank out == dim) at the five nodes.
    pub fn exactness(&self) -> Result<Vec<(String, bool, bool)>> {
        use crate::exactlin::rank;
        let (rj, rd, rb, rp) = (rank(&self.j), rank(&self.delta), rank(&self.bbar), rank(&self.pi0));
        let zero = |m: &SparseMatrix<F>| m.is_zero();
        Ok(vec![
            ("HΓ_1".into(), true, rj == self.dims[0]),
            ("HΓC_1".into(), zero(&self.delta.mul(&self.j)?), rj + rd == self.dims[1]),
            ("F(0)".into(), zero(&self.bbar.mul(&self.delta)?), rd + rb == self.dims[2]),
            ("HΓ_0".into(), zero(&self.pi0.mul(&self.bbar)?), rb + rp == self.dims[3]),
            ("HΓC_0".into(), true, rp == self.dims[4]),
        ])
    }
}
