//! Hochschild, cyclic, Γ- and ΓC-homology of functor modules and algebras.

pub mod cube;
pub mod cyclic;
pub mod gammac;
pub mod hochschild;
pub mod kahler;
pub mod stab;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::algkit::{build_algebra, Algebra, AlgebraSpec};
use crate::chaincore::ChainComplex;
use crate::error::{Error, Result};
use crate::exactlin::{Field, PrimeField, Rationals, ScalarField, SparseMatrix};
use crate::fincat::{DiagonalRule, Site};
use crate::funmod::{loday, mu_pullback, FunctorModule};

pub use cube::{q0_complex, stab_ambient, CubeComplex, Q0Complex};
pub use cyclic::{connes_b, connes_b_parts, cyclic_bicomplex, periodicity_maps, BConvention, CyclicBicomplex};
pub use gammac::{five_term, FiveTerm, GammaCone};
pub use hochschild::{hochschild_boundary, hochschild_complex, normalized_hochschild_complex, HochschildSign};

/// Default ceiling on the dimension of any single ambient space.
pub const DEFAULT_CAP: u128 = 1 << 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Theory {
    HH,
    HC,
    HGamma,
    HGammaC,
}

impl Theory {
    pub const ALL: [Theory; 4] = [Theory::HH, Theory::HC, Theory::HGamma, Theory::HGammaC];

    pub fn key(&self) -> &'static str {
        match self {
            Theory::HH => "hh",
            Theory::HC => "hc",
            Theory::HGamma => "hgamma",
            Theory::HGammaC => "hgammac",
        }
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theory::HH => "HH",
            Theory::HC => "HC",
            Theory::HGamma => "HΓ",
            Theory::HGammaC => "HΓC",
        })
    }
}

impl FromStr for Theory {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hh" => Ok(Theory::HH),
            "hc" => Ok(Theory::HC),
            "hgamma" | "hγ" => Ok(Theory::HGamma),
            "hgammac" | "hγc" => Ok(Theory::HGammaC),
            other => Err(Error::Parse(format!("unknown theory {other:?} (hh, hc, hgamma, hgammac)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub max_degree: usize,
    pub chain_top: usize,
    pub largest_space: u128,
    pub cap: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyTable {
    pub theory: String,
    pub input: String,
    pub field: String,
    pub rows: Vec<TableRow>,
    pub truncation: Truncation,
    pub fixture_signs: BTreeMap<String, String>,
}

impl HomologyTable {
    pub fn dims(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.dim).collect()
    }
}

pub fn fixture_signs() -> BTreeMap<String, String> {
    [
        ("hochschild_b", "sum (-1)^i G(d_i)"),
        ("connes_B", "(1 - t) s N"),
        ("cube_delta", "sum (-1)^i [G(p_i) - G(r_i) - G(s_i)]"),
        ("stab", "(-1)^floor(n/2) G(sigma_n)"),
        ("cone", "d(x, y) = delta(y) - c(x)"),
        ("diagonals", "adjacent"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

type Slot<T> = Mutex<Option<Arc<T>>>;

fn cached<T>(slot: &Slot<T>, enough: impl Fn(&T) -> bool, build: impl FnOnce() -> Result<T>) -> Result<Arc<T>> {
    let mut guard = slot.lock().expect("pipeline lock");
    if let Some(x) = guard.as_ref() {
        if enough(x) {
            return Ok(x.clone());
        }
    }
    let x = Arc::new(build()?);
    *guard = Some(x.clone());
    Ok(x)
}

/// Lazily built complexes for one F-module and its pullback along μ.
pub struct Pipeline<F: Field> {
    input: String,
    algebra: Option<Arc<Algebra<F>>>,
    fmod: Arc<dyn FunctorModule<F>>,
    gmod: Arc<dyn FunctorModule<F>>,
    cap: u128,
    rule: DiagonalRule,
    hoch: Slot<ChainComplex<F>>,
    cyc: Slot<CyclicBicomplex<F>>,
    cube: Slot<CubeComplex<F>>,
    cone: Slot<GammaCone<F>>,
}

impl<F: Field> Pipeline<F> {
    /// Works on a basis containing the unit when the given one does not; dimensions are unaffected.
    pub fn from_algebra(algebra: Algebra<F>, cap: u128) -> Result<Self> {
        match algebra.unit_adapted() {
            Some(adapted) => Self::from_algebra_as_given(adapted?, cap),
            None => Self::from_algebra_as_given(algebra, cap),
        }
    }

    /// Keeps the given basis, so chain-level output is in its coordinates.
    pub fn from_algebra_as_given(algebra: Algebra<F>, cap: u128) -> Result<Self> {
        let algebra = Arc::new(algebra);
        let fmod: Arc<dyn FunctorModule<F>> = Arc::new(loday(algebra.clone()));
        let mut p = Self::from_module(algebra.name().to_string(), fmod, cap)?;
        p.algebra = Some(algebra);
        Ok(p)
    }

    pub fn from_module(input: String, fmod: Arc<dyn FunctorModule<F>>, cap: u128) -> Result<Self> {
        if fmod.site() != Site::Fin {
            return Err(Error::Invalid("a pipeline starts from an F-module".into()));
        }
        let gmod: Arc<dyn FunctorModule<F>> = Arc::new(mu_pullback(fmod.clone())?);
        Ok(Pipeline {
            input,
            algebra: None,
            fmod,
            gmod,
            cap,
            rule: DiagonalRule::Adjacent,
            hoch: Mutex::new(None),
            cyc: Mutex::new(None),
            cube: Mutex::new(None),
            cone: Mutex::new(None),
        })
    }

    pub fn input(&self) -> &str {
        &self.input
    }

    pub fn field(&self) -> &F {
        self.fmod.field()
    }

    pub fn cap(&self) -> u128 {
        self.cap
    }

    pub fn cube_rule(&self) -> DiagonalRule {
        self.rule
    }

    pub fn algebra(&self) -> Option<&Arc<Algebra<F>>> {
        self.algebra.as_ref()
    }

    pub fn fmod(&self) -> &Arc<dyn FunctorModule<F>> {
        &self.fmod
    }

    pub fn gmod(&self) -> &Arc<dyn FunctorModule<F>> {
        &self.gmod
    }

    fn check_linear(&self, top: usize) -> Result<u128> {
        let dim = self.fmod.dim(top).map_err(|e| Error::Resource(e.to_string()))? as u128;
        if dim > self.cap {
            return Err(Error::Resource(format!(
                "chains in degree {top} have dimension {dim}, above the cap {}",
                self.cap
            )));
        }
        Ok(dim)
    }

    pub fn hochschild(&self, top: usize) -> Result<Arc<ChainComplex<F>>> {
        self.check_linear(top)?;
        cached(&self.hoch, |c| c.top() >= top, || hochschild_complex(self.fmod.as_ref(), top))
    }

    pub fn cyclic(&self, top: usize) -> Result<Arc<CyclicBicomplex<F>>> {
        self.check_linear(top)?;
        cached(&self.cyc, |c| c.top >= top, || {
            cyclic_bicomplex(self.fmod.as_ref(), top, BConvention::Standard)
        })
    }

    pub fn cube(&self, top: usize) -> Result<Arc<CubeComplex<F>>> {
        cached(&self.cube, |c| c.top() >= top, || {
            CubeComplex::build(self.gmod.clone(), top, self.rule, self.cap)
        })
    }

    pub fn cone(&self, top: usize) -> Result<Arc<GammaCone<F>>> {
        let cube = self.cube(top)?;
        cached(&self.cone, |c| c.cube.top() >= top, || GammaCone::build(self.fmod.as_ref(), cube))
    }

    pub fn connes_b(&self, n: usize) -> Result<SparseMatrix<F>> {
        connes_b(self.fmod.as_ref(), n, BConvention::Standard)
    }

    /// Homology dimensions through `max`.
    pub fn table(&self, theory: Theory, max: usize) -> Result<HomologyTable> {
        let top = max + 1;
        let (dims, largest) = match theory {
            Theory::HH => {
                let c = self.hochschild(top)?;
                (c.homology_dims(max)?, c.ranks().iter().copied().max().unwrap_or(0) as u128)
            }
            Theory::HC => {
                let c = self.cyclic(top)?;
                let ranks = c.complex().ranks();
                (c.complex().homology_dims(max)?, self.fmod.dim(top)?.max(ranks.iter().copied().max().unwrap_or(0)) as u128)
            }
            Theory::HGamma => {
                let c = self.cube(top)?;
                ((0..=max).map(|n| c.homology(n).map(|h| h.dim)).collect::<Result<_>>()?, c.ambient_dim(top) as u128)
            }
            Theory::HGammaC => {
                let c = self.cone(top)?;
                ((0..=max).map(|n| c.homology(n).map(|h| h.dim)).collect::<Result<_>>()?, c.cube.ambient_dim(top) as u128)
            }
        };
        Ok(HomologyTable {
            theory: theory.to_string(),
            input: self.input.clone(),
            field: self.field().kind().to_string(),
            rows: dims.into_iter().enumerate().map(|(n, dim)| TableRow { n, dim }).collect(),
            truncation: Truncation { max_degree: max, chain_top: top, largest_space: largest, cap: self.cap },
            fixture_signs: fixture_signs(),
        })
    }
}

/// A pipeline over a field chosen at run time.
pub enum AnyPipeline {
    Q(Pipeline<Rationals>),
    P(Pipeline<PrimeField>),
}

/// Runs `$body` with `$p` bound to the concrete pipeline.
#[macro_export]
macro_rules! with_pipeline {
    ($any:expr, $p:ident => $body:expr) => {
        match $any {
            $crate::theories::AnyPipeline::Q($p) => $body,
            $crate::theories::AnyPipeline::P($p) => $body,
        }
    };
}

impl AnyPipeline {
    pub fn for_algebra(spec: &AlgebraSpec, field: ScalarField, cap: u128) -> Result<Self> {
        Ok(match field {
            ScalarField::Rationals => AnyPipeline::Q(Pipeline::from_algebra(build_algebra(spec, &Rationals)?, cap)?),
            ScalarField::Prime(p) => {
                let f = PrimeField::new(p)?;
                AnyPipeline::P(Pipeline::from_algebra(build_algebra(spec, &f)?, cap)?)
            }
        })
    }

    pub fn table(&self, theory: Theory, max: usize) -> Result<HomologyTable> {
        with_pipeline!(self, p => p.table(theory, max))
    }

    pub fn algebra_dim(&self) -> Option<usize> {
        with_pipeline!(self, p => p.algebra().map(|a| a.dim()))
    }
}

/// One-shot table computation.
pub fn compute_table(
    spec: &AlgebraSpec,
    field: ScalarField,
    theory: Theory,
    max: usize,
    cap: u128,
) -> Result<HomologyTable> {
    AnyPipeline::for_algebra(spec, field, cap)?.table(theory, max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theory_names_roundtrip() {
        for t in Theory::ALL {
            assert_eq!(t.key().parse::<Theory>().unwrap(), t);
        }
        assert!("hq".parse::<Theory>().is_err());
    }

    #[test]
    fn tables_for_trunc2() {
        let s = AlgebraSpec::Trunc(2);
        let f2 = ScalarField::Prime(2);
        assert_eq!(compute_table(&s, f2, Theory::HH, 3, DEFAULT_CAP).unwrap().dims(), vec![2, 2, 2, 2]);
        assert_eq!(compute_table(&s, f2, Theory::HGamma, 2, DEFAULT_CAP).unwrap().dims(), vec![2, 2, 2]);
        assert_eq!(
            compute_table(&s, ScalarField::Rationals, Theory::HGammaC, 1, DEFAULT_CAP).unwrap().dims(),
            vec![0, 2]
        );
        assert_eq!(compute_table(&s, f2, Theory::HGammaC, 1, DEFAULT_CAP).unwrap().dims(), vec![1, 3]);
    }

    #[test]
    fn oversized_requests_are_refused() {
        let err = compute_table(&AlgebraSpec::Trunc(3), ScalarField::Rationals, Theory::HGamma, 3, DEFAULT_CAP);
        assert!(matches!(err, Err(Error::Resource(_))));
    }
}
