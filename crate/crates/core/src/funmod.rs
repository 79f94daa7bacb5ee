//! Covariant functors from F or Γ to vector spaces, given by their induced matrices.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::algkit::Algebra;
use crate::error::{Error, Result};
use crate::exactlin::{Field, MatrixBuilder, SparseMatrix, SparseVec, SubspacePresentation};
use crate::fincat::{enumerate_maps, SetMap, Site};

/// Column `j` of an induced matrix, with per-map preparation done once.
pub type ColumnFn<'a, E> = Box<dyn Fn(usize) -> SparseVec<E> + Send + Sync + 'a>;

/// Write-once memo of induced matrices.
#[derive(Default)]
pub struct Memo<F: Field> {
    table: Mutex<HashMap<SetMap, Arc<SparseMatrix<F>>>>,
}

impl<F: Field> Memo<F> {
    pub fn new() -> Self {
        Memo { table: Mutex::new(HashMap::new()) }
    }

    fn get_or_build(
        &self,
        key: &SetMap,
        build: impl FnOnce() -> Result<SparseMatrix<F>>,
    ) -> Result<Arc<SparseMatrix<F>>> {
        if let Some(m) = self.table.lock().expect("memo lock").get(key) {
            return Ok(m.clone());
        }
        let m = Arc::new(build()?);
        let mut t = self.table.lock().expect("memo lock");
        Ok(t.entry(key.clone()).or_insert(m).clone())
    }
}

pub trait FunctorModule<F: Field>: Send + Sync {
    fn site(&self) -> Site;
    fn field(&self) -> &F;
    /// Number of basis elements at the object with index `n`; fails on overflow.
    fn dim(&self, n: usize) -> Result<usize>;
    /// Stable description used in cache keys.
    fn descriptor(&self) -> String;
    fn labels(&self, n: usize) -> Result<Vec<String>>;
    /// Column generator for the induced map of `f` (site already checked).
    fn columns<'a>(&'a self, f: &SetMap) -> Result<ColumnFn<'a, F::Elem>>;
    fn memo(&self) -> &Memo<F>;

    /// Induced matrix of `f`, memoized.
    fn matrix(&self, f: &SetMap) -> Result<Arc<SparseMatrix<F>>> {
        self.check_site(f)?;
        self.memo().get_or_build(f, || {
            let rows = self.dim(f.target())?;
            let cols = self.dim(f.source())?;
            let col = self.columns(f)?;
            let mut b = MatrixBuilder::new(self.field(), rows);
            for j in 0..cols {
                b.push_column(col(j));
            }
            Ok(b.finish())
        })
    }

    /// Induced matrix without storing it.
    fn matrix_uncached(&self, f: &SetMap) -> Result<SparseMatrix<F>> {
        self.check_site(f)?;
        let rows = self.dim(f.target())?;
        let cols = self.dim(f.source())?;
        let col = self.columns(f)?;
        let mut b = MatrixBuilder::new(self.field(), rows);
        for j in 0..cols {
            b.push_column(col(j));
        }
        Ok(b.finish())
    }

    fn check_site(&self, f: &SetMap) -> Result<()> {
        if f.site() != self.site() {
            return Err(Error::Invalid(format!(
                "map on {} applied to a module on {}",
                f.site(),
                self.site()
            )));
        }
        Ok(())
    }
}

fn checked_pow(base: usize, exp: usize, what: &str) -> Result<usize> {
    u32::try_from(exp)
        .ok()
        .and_then(|e| base.checked_pow(e))
        .ok_or_else(|| Error::Resource(format!("{what}: {base}^{exp} overflows")))
}

/// The Loday functor n̄ ↦ A^{⊗(n+1)}.
pub struct Loday<F: Field> {
    algebra: Arc<Algebra<F>>,
    memo: Memo<F>,
}

pub fn loday<F: Field>(algebra: Arc<Algebra<F>>) -> Loday<F> {
    Loday { algebra, memo: Memo::new() }
}

impl<F: Field> Loday<F> {
    pub fn algebra(&self) -> &Algebra<F> {
        &self.algebra
    }

    /// Basis word of index `j` among words of length `len` (leftmost digit most significant).
    pub fn decode_word(&self, len: usize, mut j: usize) -> Vec<usize> {
        let d = self.algebra.dim();
        let mut w = vec![0; len];
        for k in (0..len).rev() {
            w[k] = j % d;
            j /= d;
        }
        w
    }

    pub fn encode_word(&self, w: &[usize]) -> usize {
        let d = self.algebra.dim();
        w.iter().fold(0, |acc, &x| acc * d + x)
    }
}

impl<F: Field> FunctorModule<F> for Loday<F> {
    fn site(&self) -> Site {
        Site::Fin
    }
    fn field(&self) -> &F {
        self.algebra.field()
    }
    fn dim(&self, n: usize) -> Result<usize> {
        checked_pow(self.algebra.dim(), n + 1, "tensor power")
    }
    fn descriptor(&self) -> String {
        format!("loday[{}]", self.algebra.fingerprint())
    }
    fn labels(&self, n: usize) -> Result<Vec<String>> {
        let total = self.dim(n)?;
        Ok((0..total)
            .map(|j| {
                self.decode_word(n + 1, j)
                    .iter()
                    .map(|x| format!("e{x}"))
                    .collect::<Vec<_>>()
                    .join("⊗")
            })
            .collect())
    }
    fn memo(&self) -> &Memo<F> {
        &self.memo
    }

    fn columns<'a>(&'a self, f: &SetMap) -> Result<ColumnFn<'a, F::Elem>> {
        let pre = f.preimages();
        let len = f.source() + 1;
        let alg = &self.algebra;
        let field = alg.field().clone();
        let d = alg.dim();
        if alg.is_monomial() {
            let unit = alg.unit_index().expect("monomial algebra has a basis unit");
            return Ok(Box::new(move |j| {
                let w = self.decode_word(len, j);
                let mut idx = 0usize;
                for p in &pre {
                    let mut acc = unit;
                    for &k in p {
                        match alg.monomial_product(acc, w[k]).flatten() {
                            Some(x) => acc = x,
                            None => return SparseVec::new(),
                        }
                    }
                    idx = idx * d + acc;
                }
                SparseVec::from_sorted(vec![(idx, field.one())])
            }));
        }
        Ok(Box::new(move |j| {
            let w = self.decode_word(len, j);
            let factors: Vec<Vec<(usize, F::Elem)>> = pre
                .iter()
                .map(|p| {
                    let idx: Vec<usize> = p.iter().map(|&k| w[k]).collect();
                    alg.multiset_product(&idx)
                        .into_iter()
                        .enumerate()
                        .filter(|(_, x)| !field.is_zero(x))
                        .collect()
                })
                .collect();
            kronecker(&field, d, &factors)
        }))
    }
}

/// Tensor product of sparse factor vectors, each of length `d`, in lex order.
fn kronecker<F: Field>(field: &F, d: usize, factors: &[Vec<(usize, F::Elem)>]) -> SparseVec<F::Elem> {
    if factors.iter().any(|f| f.is_empty()) {
        return SparseVec::new();
    }
    let mut out: Vec<(usize, F::Elem)> = vec![(0, field.one())];
    for fac in factors {
        let mut next = Vec::with_capacity(out.len() * fac.len());
        for (i, x) in &out {
            for (k, y) in fac {
                next.push((i * d + k, field.mul(x, y)));
            }
        }
        out = next;
    }
    SparseVec::from_sorted(out)
}

/// Pullback of an F-module along the forgetful functor Γ → F.
pub struct MuPullback<F: Field> {
    inner: Arc<dyn FunctorModule<F>>,
    memo: Memo<F>,
}

pub fn mu_pullback<F: Field>(inner: Arc<dyn FunctorModule<F>>) -> Result<MuPullback<F>> {
    if inner.site() != Site::Fin {
        return Err(Error::Invalid("pullback along Γ → F needs an F-module".into()));
    }
    Ok(MuPullback { inner, memo: Memo::new() })
}

impl<F: Field> MuPullback<F> {
    pub fn inner(&self) -> &Arc<dyn FunctorModule<F>> {
        &self.inner
    }
}

impl<F: Field> FunctorModule<F> for MuPullback<F> {
    fn site(&self) -> Site {
        Site::Gamma
    }
    fn field(&self) -> &F {
        self.inner.field()
    }
    fn dim(&self, n: usize) -> Result<usize> {
        self.inner.dim(n)
    }
    fn descriptor(&self) -> String {
        format!("mu*{}", self.inner.descriptor())
    }
    fn labels(&self, n: usize) -> Result<Vec<String>> {
        self.inner.labels(n)
    }
    fn memo(&self) -> &Memo<F> {
        &self.memo
    }
    fn columns<'a>(&'a self, f: &SetMap) -> Result<ColumnFn<'a, F::Elem>> {
        self.inner.columns(&f.with_site(Site::Fin)?)
    }
    fn matrix(&self, f: &SetMap) -> Result<Arc<SparseMatrix<F>>> {
        self.check_site(f)?;
        self.inner.matrix(&f.with_site(Site::Fin)?)
    }
}

/// F^n (maps out of n̄) or Γ^n (pointed maps out of [n]).
pub struct Representable<F: Field> {
    field: F,
    site: Site,
    n: usize,
    memo: Memo<F>,
}

pub fn representable<F: Field>(field: &F, site: Site, n: usize) -> Representable<F> {
    Representable { field: field.clone(), site, n, memo: Memo::new() }
}

impl<F: Field> Representable<F> {
    fn free_digits(&self) -> usize {
        match self.site {
            Site::Fin => self.n + 1,
            Site::Gamma => self.n,
        }
    }

    /// Index of a map out of the representing object in `enumerate_maps` order.
    pub fn index_of(&self, m: usize, images: &[usize]) -> usize {
        let skip = self.n + 1 - self.free_digits();
        images[skip..].iter().fold(0, |acc, &x| acc * (m + 1) + x)
    }

    pub fn images_of(&self, m: usize, mut j: usize) -> Vec<usize> {
        let k = self.free_digits();
        let mut digits = vec![0; k];
        for slot in (0..k).rev() {
            digits[slot] = j % (m + 1);
            j /= m + 1;
        }
        match self.site {
            Site::Fin => digits,
            Site::Gamma => std::iter::once(0).chain(digits).collect(),
        }
    }
}

impl<F: Field> FunctorModule<F> for Representable<F> {
    fn site(&self) -> Site {
        self.site
    }
    fn field(&self) -> &F {
        &self.field
    }
    fn dim(&self, m: usize) -> Result<usize> {
        checked_pow(m + 1, self.free_digits(), "representable")
    }
    fn descriptor(&self) -> String {
        format!("rep[{}^{}]", self.site, self.n)
    }
    fn labels(&self, m: usize) -> Result<Vec<String>> {
        self.dim(m)?;
        Ok(enumerate_maps(self.site, self.n, m).iter().map(|g| g.to_string()).collect())
    }
    fn memo(&self) -> &Memo<F> {
        &self.memo
    }
    fn columns<'a>(&'a self, f: &SetMap) -> Result<ColumnFn<'a, F::Elem>> {
        let f = f.clone();
        Ok(Box::new(move |j| {
            let g = self.images_of(f.source(), j);
            let fg: Vec<usize> = g.iter().map(|&x| f.apply(x)).collect();
            SparseVec::unit(&self.field, self.index_of(f.target(), &fg))
        }))
    }
}

/// The reduced part G' with G'[n] = ker(G([n] → [0])).
pub struct Reduced<F: Field> {
    inner: Arc<dyn FunctorModule<F>>,
    kernels: Mutex<HashMap<usize, Arc<SubspacePresentation<F>>>>,
    memo: Memo<F>,
}

pub fn reduced_part<F: Field>(inner: Arc<dyn FunctorModule<F>>) -> Result<Reduced<F>> {
    if inner.site() != Site::Gamma {
        return Err(Error::Invalid("reduced part needs a Γ-module".into()));
    }
    Ok(Reduced { inner, kernels: Mutex::new(HashMap::new()), memo: Memo::new() })
}

impl<F: Field> Reduced<F> {
    /// Kernel of G([n] → [0]) in reduced echelon form.
    pub fn kernel(&self, n: usize) -> Result<Arc<SubspacePresentation<F>>> {
        if let Some(k) = self.kernels.lock().expect("kernel lock").get(&n) {
            return Ok(k.clone());
        }
        let collapse = SetMap::pointed(n, 0, vec![0; n + 1])?;
        let m = self.inner.matrix(&collapse)?;
        let ker = crate::exactlin::rank_kernel_image(&m).kernel;
        let pres = Arc::new(SubspacePresentation::new(self.inner.field(), m.cols(), ker)?);
        let mut t = self.kernels.lock().expect("kernel lock");
        Ok(t.entry(n).or_insert(pres).clone())
    }

    /// Basis vectors of G'[n] as vectors in G[n].
    pub fn embedding(&self, n: usize) -> Result<SparseMatrix<F>> {
        let k = self.kernel(n)?;
        SparseMatrix::from_columns(self.inner.field(), k.ambient_dim(), k.reduced_basis().to_vec())
    }
}

impl<F: Field> FunctorModule<F> for Reduced<F> {
    fn site(&self) -> Site {
        Site::Gamma
    }
    fn field(&self) -> &F {
        self.inner.field()
    }
    fn dim(&self, n: usize) -> Result<usize> {
        Ok(self.kernel(n)?.dim())
    }
    fn descriptor(&self) -> String {
        format!("reduced[{}]", self.inner.descriptor())
    }
    fn labels(&self, n: usize) -> Result<Vec<String>> {
        Ok((0..self.dim(n)?).map(|k| format!("k{k}")).collect())
    }
    fn memo(&self) -> &Memo<F> {
        &self.memo
    }
    fn columns<'a>(&'a self, f: &SetMap) -> Result<ColumnFn<'a, F::Elem>> {
        let src = self.kernel(f.source())?;
        let tgt = self.kernel(f.target())?;
        let m = self.inner.matrix(f)?;
        let pivots = tgt.pivots();
        Ok(Box::new(move |j| {
            let image = m.apply_slice(src.reduced_basis()[j].entries());
            // coordinates in a reduced echelon basis are the values at its pivots
            let coords: Vec<(usize, F::Elem)> = pivots
                .iter()
                .enumerate()
                .filter_map(|(k, &p)| image.get(p).map(|x| (k, x.clone())))
                .collect();
            SparseVec::from_sorted(coords)
        }))
    }
}

/// The isomorphism μ*F^n ≅ Γ^{n+1} at the object [m], g ↦ (0, g(0), …, g(n)).
pub fn lemma31_iso<F: Field>(field: &F, n: usize, m: usize) -> Result<SparseMatrix<F>> {
    let src = representable(field, Site::Fin, n);
    let tgt = representable(field, Site::Gamma, n + 1);
    let dim = src.dim(m)?;
    let mut b = MatrixBuilder::new(field, tgt.dim(m)?);
    for j in 0..dim {
        let g = src.images_of(m, j);
        let h: Vec<usize> = std::iter::once(0).chain(g).collect();
        b.push_column(SparseVec::unit(field, tgt.index_of(m, &h)));
    }
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algkit::{build_algebra, AlgebraSpec};
    use crate::exactlin::{PrimeField, Rationals};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_map<R: Rng>(rng: &mut R, site: Site, s: usize, t: usize) -> SetMap {
        let mut images: Vec<usize> = (0..=s).map(|_| rng.gen_range(0..=t)).collect();
        if site == Site::Gamma {
            images[0] = 0;
        }
        SetMap::new(site, s, t, images).unwrap()
    }

    fn check_functorial<F: Field>(m: &dyn FunctorModule<F>, seed: u64, max: usize, trials: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let (a, b, c) = (rng.gen_range(0..=max), rng.gen_range(0..=max), rng.gen_range(0..=max));
            let f = random_map(&mut rng, m.site(), a, b);
            let g = random_map(&mut rng, m.site(), b, c);
            let gf = g.compose(&f).unwrap();
            let lhs = m.matrix(&gf).unwrap();
            let rhs = m.matrix(&g).unwrap().mul(&m.matrix(&f).unwrap()).unwrap();
            assert_eq!(*lhs, rhs, "functoriality fails for {g} after {f}");
        }
        for n in 0..=max {
            let id = SetMap::identity(m.site(), n);
            assert_eq!(*m.matrix(&id).unwrap(), SparseMatrix::identity(m.field(), m.dim(n).unwrap()));
        }
    }

    #[test]
    fn loday_examples() {
        let q = Rationals;
        let a = Arc::new(build_algebra(&AlgebraSpec::Trunc(2), &q).unwrap());
        let l = loday(a);
        let mult = SetMap::fin(1, 0, vec![0, 0]).unwrap();
        let m = l.matrix(&mult).unwrap();
        let expect = SparseMatrix::from_i64_rows(&q, &[&[1, 0, 0, 0], &[0, 1, 1, 0]]).unwrap();
        assert_eq!(*m, expect);
        let ins = SetMap::fin(0, 1, vec![1]).unwrap();
        let m = l.matrix(&ins).unwrap();
        // a ↦ 1 ⊗ a
        assert_eq!(m.column(1).entries(), &[(1, q.one())]);
        let g = Arc::new(build_algebra(&AlgebraSpec::Group(2), &q).unwrap());
        let lg = loday(g);
        let tau = crate::fincat::tau(1);
        let m = lg.matrix(&tau).unwrap();
        assert_eq!(m.column(1).entries(), &[(2, q.one())]);
    }

    #[test]
    fn loday_functorial_on_random_pairs() {
        let f2 = PrimeField::new(2).unwrap();
        for spec in [AlgebraSpec::Trunc(3), AlgebraSpec::Prod(2), AlgebraSpec::Group(3)] {
            let a = Arc::new(build_algebra(&spec, &f2).unwrap());
            check_functorial(&loday(a), 7, 3, 100);
        }
        let q = Rationals;
        let a = Arc::new(build_algebra(&AlgebraSpec::Prod(2), &q).unwrap());
        let mu = mu_pullback(Arc::new(loday(a))).unwrap();
        check_functorial(&mu, 9, 3, 100);
    }

    #[test]
    fn representables() {
        let q = Rationals;
        let f1 = representable(&q, Site::Fin, 1);
        assert_eq!(f1.dim(1).unwrap(), 4);
        let g2 = representable(&q, Site::Gamma, 2);
        assert_eq!(g2.dim(2).unwrap(), 9);
        check_functorial(&f1, 11, 3, 100);
        check_functorial(&g2, 12, 3, 100);
        let m = g2.matrix(&SetMap::pointed(2, 1, vec![0, 1, 1]).unwrap()).unwrap();
        for col in m.columns() {
            assert_eq!(col.len(), 1);
        }
    }

    #[test]
    fn lemma31_natural() {
        let q = Rationals;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 0..=3 {
            let src = mu_pullback(Arc::new(representable(&q, Site::Fin, n))).unwrap();
            let tgt = representable(&q, Site::Gamma, n + 1);
            for m in 0..=4 {
                assert_eq!(src.dim(m).unwrap(), tgt.dim(m).unwrap());
            }
            for _ in 0..20 {
                let (a, b) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
                let f = random_map(&mut rng, Site::Gamma, a, b);
                let left = lemma31_iso(&q, n, b).unwrap().mul(&src.matrix(&f).unwrap()).unwrap();
                let right = tgt.matrix(&f).unwrap().mul(&lemma31_iso(&q, n, a).unwrap()).unwrap();
                assert_eq!(left, right);
            }
        }
    }

    #[test]
    fn reduced_parts() {
        let q = Rationals;
        let a = Arc::new(build_algebra(&AlgebraSpec::Trunc(2), &q).unwrap());
        let g: Arc<dyn FunctorModule<Rationals>> = Arc::new(mu_pullback(Arc::new(loday(a))).unwrap());
        let r = reduced_part(g.clone()).unwrap();
        assert_eq!(r.dim(0).unwrap(), 0);
        assert_eq!(r.dim(1).unwrap(), 2);
        for n in 0..=4 {
            assert_eq!(r.dim(n).unwrap() + g.dim(0).unwrap(), g.dim(n).unwrap());
        }
        check_functorial(&r, 5, 3, 100);
        let rep = reduced_part(Arc::new(representable(&q, Site::Gamma, 1))).unwrap();
        assert_eq!(rep.dim(0).unwrap(), 0);
    }

    #[test]
    fn site_mismatch_is_an_error() {
        let q = Rationals;
        let f1 = representable(&q, Site::Fin, 1);
        assert!(f1.matrix(&SetMap::pointed(1, 1, vec![0, 1]).unwrap()).is_err());
        assert!(mu_pullback(Arc::new(representable(&q, Site::Gamma, 1))).is_err());
    }
}
