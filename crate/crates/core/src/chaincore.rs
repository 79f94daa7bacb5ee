//! Chain complexes, bicomplexes, quotients, cones and chain maps.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::exactlin::{
    quotient_presentation, rank_kernel_image, Field, HomologyResult, MatrixBuilder,
    QuotientPresentation, SparseMatrix, SparseVec, SubspacePresentation,
};

/// A boundary map, or only a spanning set of its image when the source is not presented.
#[derive(Clone, Debug)]
pub enum Boundary<F: Field> {
    Matrix(SparseMatrix<F>),
    Image {
        rows: usize,
        generators: Vec<SparseVec<F::Elem>>,
    },
}

impl<F: Field> Boundary<F> {
    pub fn rows(&self) -> usize {
        match self {
            Boundary::Matrix(m) => m.rows(),
            Boundary::Image { rows, .. } => *rows,
        }
    }

    fn image_generators(&self) -> Vec<SparseVec<F::Elem>> {
        match self {
            Boundary::Matrix(m) => (0..m.cols()).map(|j| m.column(j)).collect(),
            Boundary::Image { generators, .. } => generators.clone(),
        }
    }
}

/// A chain complex C_0 ← C_1 ← … ← C_top.
#[derive(Clone, Debug)]
pub struct ChainComplex<F: Field> {
    field: F,
    ranks: Vec<usize>,
    /// `boundaries[n - 1]` is d_n.
    boundaries: Vec<Boundary<F>>,
    /// True when C_{top+1} = 0, so homology at `top` is meaningful.
    bounded: bool,
}

impl<F: Field> ChainComplex<F> {
    /// Checks shapes and d² = 0.
    pub fn new(field: &F, ranks: Vec<usize>, boundaries: Vec<SparseMatrix<F>>) -> Result<Self> {
        Self::from_boundaries(field, ranks, boundaries.into_iter().map(Boundary::Matrix).collect())
    }

    /// Like `new`, but the top boundary is only known through its image.
    pub fn with_top_image(
        field: &F,
        ranks: Vec<usize>,
        boundaries: Vec<SparseMatrix<F>>,
        top_image: Vec<SparseVec<F::Elem>>,
    ) -> Result<Self> {
        let rows = ranks.get(ranks.len().wrapping_sub(2)).copied().unwrap_or(0);
        let mut b: Vec<Boundary<F>> = boundaries.into_iter().map(Boundary::Matrix).collect();
        b.push(Boundary::Image { rows, generators: top_image });
        Self::from_boundaries(field, ranks, b)
    }

    pub fn from_boundaries(field: &F, ranks: Vec<usize>, boundaries: Vec<Boundary<F>>) -> Result<Self> {
        if ranks.is_empty() || boundaries.len() + 1 != ranks.len() {
            return Err(Error::Dimension(format!(
                "{} ranks need {} boundaries, got {}",
                ranks.len(),
                ranks.len().saturating_sub(1),
                boundaries.len()
            )));
        }
        for (k, d) in boundaries.iter().enumerate() {
            let n = k + 1;
            let shape_ok = match d {
                Boundary::Matrix(m) => m.rows() == ranks[n - 1] && m.cols() == ranks[n],
                Boundary::Image { rows, generators } => {
                    *rows == ranks[n - 1]
                        && generators.iter().all(|g| g.max_index().map_or(true, |m| m < *rows))
                }
            };
            if !shape_ok {
                return Err(Error::Dimension(format!("boundary d_{n} has the wrong shape")));
            }
            if matches!(d, Boundary::Image { .. }) && n != boundaries.len() {
                return Err(Error::Invalid("only the top boundary may be image-only".into()));
            }
        }
        let c = ChainComplex { field: field.clone(), ranks, boundaries, bounded: false };
        c.check_square()?;
        Ok(c)
    }

    /// Declares that there are no chains above the top degree.
    pub fn bounded(mut self) -> Self {
        self.bounded = true;
        self
    }

    fn check_square(&self) -> Result<()> {
        for n in 2..=self.top() {
            let lower = match &self.boundaries[n - 2] {
                Boundary::Matrix(m) => m,
                Boundary::Image { .. } => unreachable!("checked above"),
            };
            match &self.boundaries[n - 1] {
                Boundary::Matrix(upper) => {
                    if let Some(column) = lower.mul(upper)?.first_nonzero_column() {
                        return Err(Error::NonzeroComposition {
                            location: format!("d_{} d_{n}", n - 1),
                            column,
                        });
                    }
                }
                Boundary::Image { generators, .. } => {
                    if let Some(column) = generators.iter().position(|g| !lower.mul_vec(g).is_ok_and(|v| v.is_zero())) {
                        return Err(Error::NonzeroComposition {
                            location: format!("d_{} on the image of d_{n}", n - 1),
                            column,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn top(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, n: usize) -> usize {
        self.ranks.get(n).copied().unwrap_or(0)
    }

    pub fn boundary(&self, n: usize) -> Option<&Boundary<F>> {
        if n == 0 {
            None
        } else {
            self.boundaries.get(n - 1)
        }
    }

    /// d_n as a matrix; d_0 is the zero map to the zero space.
    pub fn d(&self, n: usize) -> Result<SparseMatrix<F>> {
        if n == 0 {
            return Ok(SparseMatrix::zero(&self.field, 0, self.rank(0)));
        }
        match self.boundaries.get(n - 1) {
            Some(Boundary::Matrix(m)) => Ok(m.clone()),
            Some(Boundary::Image { .. }) => Err(Error::Truncation(format!(
                "d_{n} is only known through its image"
            ))),
            None => Err(Error::Truncation(format!("d_{n} is above the top degree {}", self.top()))),
        }
    }

    /// Spanning set of the boundaries B_n = im d_{n+1}.
    pub fn boundary_generators(&self, n: usize) -> Result<Vec<SparseVec<F::Elem>>> {
        match self.boundaries.get(n) {
            Some(b) => Ok(b.image_generators()),
            None if self.bounded && n == self.top() => Ok(Vec::new()),
            None => Err(Error::Truncation(format!(
                "homology in degree {n} needs chains in degree {}",
                n + 1
            ))),
        }
    }

    pub fn homology(&self, n: usize) -> Result<HomologyResult<F>> {
        if n > self.top() {
            return Err(Error::Truncation(format!("degree {n} is above the top degree {}", self.top())));
        }
        let boundaries = self.boundary_generators(n)?;
        let cycles = if n == 0 {
            (0..self.rank(0)).map(|i| SparseVec::unit(&self.field, i)).collect()
        } else {
            rank_kernel_image(&self.d(n)?).kernel
        };
        Ok(HomologyResult::from_parts(&self.field, n, self.rank(n), &cycles, boundaries))
    }

    pub fn homology_dims(&self, max: usize) -> Result<Vec<usize>> {
        (0..=max).map(|n| self.homology(n).map(|h| h.dim)).collect()
    }

    /// Σ (−1)^n rank C_n over the stored degrees.
    pub fn euler_characteristic(&self) -> i64 {
        self.ranks
            .iter()
            .enumerate()
            .map(|(n, &r)| if n % 2 == 0 { r as i64 } else { -(r as i64) })
            .sum()
    }

    /// Rank list followed by each boundary in triplet format.
    pub fn debug_dump(&self) -> String {
        let mut s = String::new();
        let ranks: Vec<String> = self.ranks.iter().map(|r| r.to_string()).collect();
        let _ = writeln!(s, "ranks {}", ranks.join(" "));
        for (k, b) in self.boundaries.iter().enumerate() {
            let _ = writeln!(s, "# d_{}", k + 1);
            match b {
                Boundary::Matrix(m) => s.push_str(&m.to_triplet_string()),
                Boundary::Image { rows, generators } => {
                    let m = SparseMatrix::from_columns(&self.field, *rows, generators.clone())
                        .expect("generators fit");
                    s.push_str(&m.to_triplet_string());
                }
            }
        }
        s
    }
}

/// A first-quadrant bicomplex with vertical maps (p,q) → (p,q−1) and
/// horizontal maps (p,q) → (p−1,q).
#[derive(Clone, Debug)]
pub struct Bicomplex<F: Field> {
    field: F,
    dims: BTreeMap<(usize, usize), usize>,
    vertical: BTreeMap<(usize, usize), SparseMatrix<F>>,
    horizontal: BTreeMap<(usize, usize), SparseMatrix<F>>,
}

impl<F: Field> Bicomplex<F> {
    pub fn new(field: &F) -> Self {
        Bicomplex {
            field: field.clone(),
            dims: BTreeMap::new(),
            vertical: BTreeMap::new(),
            horizontal: BTreeMap::new(),
        }
    }

    pub fn add_entry(&mut self, p: usize, q: usize, dim: usize) {
        self.dims.insert((p, q), dim);
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.dims.get(&(p, q)).copied().unwrap_or(0)
    }

    fn check_shape(&self, m: &SparseMatrix<F>, src: (usize, usize), tgt: (usize, usize)) -> Result<()> {
        if !self.dims.contains_key(&src) || !self.dims.contains_key(&tgt) {
            return Err(Error::Dimension(format!("bidegree {src:?} or {tgt:?} is not an entry")));
        }
        if m.cols() != self.dim(src.0, src.1) || m.rows() != self.dim(tgt.0, tgt.1) {
            return Err(Error::Dimension(format!("map {src:?} → {tgt:?} has the wrong shape")));
        }
        Ok(())
    }

    pub fn set_vertical(&mut self, p: usize, q: usize, m: SparseMatrix<F>) -> Result<()> {
        if q == 0 {
            return Err(Error::Invalid("no vertical map out of row 0".into()));
        }
        self.check_shape(&m, (p, q), (p, q - 1))?;
        self.vertical.insert((p, q), m);
        Ok(())
    }

    pub fn set_horizontal(&mut self, p: usize, q: usize, m: SparseMatrix<F>) -> Result<()> {
        if p == 0 {
            return Err(Error::Invalid("no horizontal map out of column 0".into()));
        }
        self.check_shape(&m, (p, q), (p - 1, q))?;
        self.horizontal.insert((p, q), m);
        Ok(())
    }

    pub fn vertical(&self, p: usize, q: usize) -> Option<&SparseMatrix<F>> {
        self.vertical.get(&(p, q))
    }

    pub fn horizontal(&self, p: usize, q: usize) -> Option<&SparseMatrix<F>> {
        self.horizontal.get(&(p, q))
    }

    /// Entries of total degree n, ordered by column p.
    fn blocks(&self, n: usize) -> Vec<(usize, usize, usize)> {
        (0..=n)
            .filter_map(|p| self.dims.get(&(p, n - p)).map(|&d| (p, n - p, d)))
            .collect()
    }

    /// Total complex through degree `top`, with D = vertical + horizontal.
    pub fn total_complex(&self, top: usize) -> Result<TotalComplex<F>> {
        let layout: Vec<Vec<Block>> = (0..=top)
            .map(|n| {
                let mut off = 0;
                self.blocks(n)
                    .into_iter()
                    .map(|(p, q, dim)| {
                        let b = Block { p, q, offset: off, dim };
                        off += dim;
                        b
                    })
                    .collect()
            })
            .collect();
        let ranks: Vec<usize> = layout.iter().map(|l| l.iter().map(|b| b.dim).sum()).collect();
        let mut boundaries = Vec::with_capacity(top);
        for n in 1..=top {
            let find = |p: usize| layout[n - 1].iter().find(|b| b.p == p).copied();
            let mut mb = MatrixBuilder::new(&self.field, ranks[n - 1]);
            for blk in &layout[n] {
                let v = if blk.q >= 1 { self.vertical(blk.p, blk.q) } else { None };
                let h = if blk.p >= 1 { self.horizontal(blk.p, blk.q) } else { None };
                let vb = if blk.q >= 1 { find(blk.p) } else { None };
                let hb = if blk.p >= 1 { find(blk.p - 1) } else { None };
                for j in 0..blk.dim {
                    let mut col = SparseVec::new();
                    if let (Some(m), Some(t)) = (v, vb) {
                        col = col.add(&self.field, &SparseVec::from_sorted(m.column_slice(j).to_vec()).shifted(t.offset));
                    }
                    if let (Some(m), Some(t)) = (h, hb) {
                        col = col.add(&self.field, &SparseVec::from_sorted(m.column_slice(j).to_vec()).shifted(t.offset));
                    }
                    mb.push_column(col);
                }
            }
            boundaries.push(mb.finish());
        }
        let complex = match ChainComplex::new(&self.field, ranks, boundaries) {
            Ok(c) => c,
            Err(Error::NonzeroComposition { location, column }) => {
                let n: usize = location
                    .rsplit('_')
                    .next()
                    .and_then(|s| s.parse().ok())
                    .unwrap_or(0);
                let blk = layout[n].iter().find(|b| column >= b.offset && column < b.offset + b.dim);
                let where_ = blk.map_or("unknown".to_string(), |b| format!("bidegree ({}, {})", b.p, b.q));
                return Err(Error::NonzeroComposition {
                    location: format!("total differential squared at {where_}"),
                    column,
                });
            }
            Err(e) => return Err(e),
        };
        Ok(TotalComplex { complex, layout })
    }
}

/// Position of the entry (p,q) inside the total chain group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub p: usize,
    pub q: usize,
    pub offset: usize,
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub struct TotalComplex<F: Field> {
    pub complex: ChainComplex<F>,
    pub layout: Vec<Vec<Block>>,
}

impl<F: Field> TotalComplex<F> {
    pub fn block(&self, n: usize, p: usize) -> Option<Block> {
        self.layout.get(n)?.iter().find(|b| b.p == p).copied()
    }

    /// The (p, n−p) component of a vector in Tot_n.
    pub fn component(&self, n: usize, p: usize, v: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        match self.block(n, p) {
            Some(b) => v.window(b.offset, b.offset + b.dim),
            None => SparseVec::new(),
        }
    }

    /// Places a vector of the (p, n−p) entry into Tot_n.
    pub fn embed(&self, n: usize, p: usize, v: &SparseVec<F::Elem>) -> Result<SparseVec<F::Elem>> {
        let b = self
            .block(n, p)
            .ok_or_else(|| Error::Truncation(format!("no entry in column {p} of total degree {n}")))?;
        Ok(v.shifted(b.offset))
    }
}

/// A quotient complex together with the per-degree presentations used to build it.
#[derive(Clone, Debug)]
pub struct QuotientComplex<F: Field> {
    pub complex: ChainComplex<F>,
    pub presentations: Vec<QuotientPresentation<F>>,
}

/// C/W for a subcomplex W given by per-degree spans; membership d(W_n) ⊆ W_{n−1} is checked.
pub fn quotient_complex<F: Field>(
    c: &ChainComplex<F>,
    spans: &[SubspacePresentation<F>],
) -> Result<QuotientComplex<F>> {
    let f = c.field();
    if spans.len() != c.top() + 1 {
        return Err(Error::Dimension(format!(
            "{} spans for a complex with top degree {}",
            spans.len(),
            c.top()
        )));
    }
    for (n, s) in spans.iter().enumerate() {
        if s.ambient_dim() != c.rank(n) {
            return Err(Error::Dimension(format!("span in degree {n} has the wrong ambient dimension")));
        }
    }
    for n in 1..=c.top() {
        let d = c.d(n)?;
        for v in spans[n].reduced_basis() {
            let image = d.mul_vec(v)?;
            if !spans[n - 1].contains(&image) {
                return Err(Error::NotSubcomplex {
                    degree: n,
                    witness: format!("boundary of {:?} leaves the span", v.entries().iter().map(|(i, _)| *i).collect::<Vec<_>>()),
                });
            }
        }
    }
    let presentations: Vec<QuotientPresentation<F>> = spans.iter().map(quotient_presentation).collect();
    let mut boundaries = Vec::with_capacity(c.top());
    for n in 1..=c.top() {
        let d = c.d(n)?;
        boundaries.push(presentations[n - 1].proj.mul(&d.mul(&presentations[n].section)?)?);
    }
    let ranks = presentations.iter().map(|p| p.dim()).collect();
    let mut complex = ChainComplex::new(f, ranks, boundaries)?;
    complex.bounded = c.bounded;
    Ok(QuotientComplex { complex, presentations })
}

/// Cone of φ: X_0 → Y_0 with X concentrated in degree 0:
/// Cone_0 = Y_0, Cone_1 = X_0 ⊕ Y_1, Cone_n = Y_n above, d(x, y) = d_Y y − φ x.
pub fn mapping_cone<F: Field>(phi: &SparseMatrix<F>, y: &ChainComplex<F>) -> Result<ChainComplex<F>> {
    let f = y.field();
    if phi.rows() != y.rank(0) {
        return Err(Error::Dimension(format!(
            "map lands in dimension {} but Y_0 has dimension {}",
            phi.rows(),
            y.rank(0)
        )));
    }
    let x = phi.cols();
    let mut ranks = y.ranks().to_vec();
    if ranks.len() < 2 {
        ranks.push(0);
    }
    ranks[1] += x;
    let mut boundaries = Vec::new();
    let top = ranks.len() - 1;
    for n in 1..=top {
        let yb = y.boundary(n);
        let b = match n {
            1 => {
                let mut gens: Vec<SparseVec<F::Elem>> = (0..x).map(|j| phi.column(j).neg(f)).collect();
                match yb {
                    Some(Boundary::Matrix(m)) => {
                        let mut mb = MatrixBuilder::new(f, ranks[0]);
                        for g in gens {
                            mb.push_column(g);
                        }
                        for j in 0..m.cols() {
                            mb.push_column(m.column(j));
                        }
                        Boundary::Matrix(mb.finish())
                    }
                    Some(Boundary::Image { generators, .. }) => {
                        gens.extend(generators.iter().cloned());
                        Boundary::Image { rows: ranks[0], generators: gens }
                    }
                    None => {
                        let mut mb = MatrixBuilder::new(f, ranks[0]);
                        for g in gens {
                            mb.push_column(g);
                        }
                        Boundary::Matrix(mb.finish())
                    }
                }
            }
            2 => match yb {
                Some(Boundary::Matrix(m)) => {
                    let mut mb = MatrixBuilder::new(f, ranks[1]);
                    for j in 0..m.cols() {
                        mb.push_column(m.column(j).shifted(x));
                    }
                    Boundary::Matrix(mb.finish())
                }
                Some(Boundary::Image { generators, .. }) => Boundary::Image {
                    rows: ranks[1],
                    generators: generators.iter().map(|g| g.shifted(x)).collect(),
                },
                None => unreachable!("top ≥ 2 means d_2 exists"),
            },
            _ => yb.cloned().expect("degree within top"),
        };
        boundaries.push(b);
    }
    let mut cone = ChainComplex::from_boundaries(f, ranks, boundaries)?;
    cone.bounded = y.bounded;
    Ok(cone)
}

/// Per-degree maps C_n → D_{n+shift} commuting with boundaries up to `sign`.
#[derive(Clone, Debug)]
pub struct ChainMap<F: Field> {
    pub shift: isize,
    pub sign: i8,
    components: BTreeMap<usize, SparseMatrix<F>>,
}

impl<F: Field> ChainMap<F> {
    pub fn new(shift: isize, sign: i8) -> Self {
        ChainMap { shift, sign, components: BTreeMap::new() }
    }

    pub fn insert(&mut self, n: usize, m: SparseMatrix<F>) {
        self.components.insert(n, m);
    }

    pub fn component(&self, n: usize) -> Option<&SparseMatrix<F>> {
        self.components.get(&n)
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.components.keys().copied()
    }

    /// Checks d φ_n = sign · φ_{n−1} d wherever both sides are available.
    pub fn check(&self, source: &ChainComplex<F>, target: &ChainComplex<F>) -> Result<()> {
        for (&n, phi) in &self.components {
            let tn = n as isize + self.shift;
            if tn < 0 {
                return Err(Error::Dimension(format!("component {n} lands in negative degree")));
            }
            let tn = tn as usize;
            if phi.cols() != source.rank(n) || phi.rows() != target.rank(tn) {
                return Err(Error::Dimension(format!("component {n} has the wrong shape")));
            }
            let lhs = match tn {
                0 => SparseMatrix::zero(phi.field(), 0, phi.cols()),
                _ => match target.boundary(tn) {
                    Some(Boundary::Matrix(d)) => d.mul(phi)?,
                    _ => continue,
                },
            };
            let rhs = if n == 0 {
                SparseMatrix::zero(phi.field(), lhs.rows(), phi.cols())
            } else {
                match (self.components.get(&(n - 1)), source.boundary(n)) {
                    (Some(prev), Some(Boundary::Matrix(d))) => prev.mul(d)?,
                    _ => continue,
                }
            };
            let sign = phi.field().sign(self.sign < 0);
            let diff = lhs.lincomb(&phi.field().one(), &rhs, &phi.field().neg(&sign))?;
            if let Some(column) = diff.first_nonzero_column() {
                return Err(Error::NotChainMap { degree: n, column });
            }
        }
        Ok(())
    }
}

/// Matrix of the map on homology induced by `phi`, in representative coordinates.
pub fn homology_map<F: Field>(
    phi: &SparseMatrix<F>,
    source: &HomologyResult<F>,
    target: &HomologyResult<F>,
) -> Result<SparseMatrix<F>> {
    let f = phi.field();
    let mut mb = MatrixBuilder::new(f, target.dim);
    for (i, rep) in source.representatives.iter().enumerate() {
        let image = phi.mul_vec(rep)?;
        let coords = target.coordinates(&image).map_err(|_| {
            Error::Undefined(format!(
                "image of representative {i} in degree {} is not a cycle of the target",
                source.degree
            ))
        })?;
        mb.push_column(SparseVec::from_dense(f, &coords));
    }
    Ok(mb.finish())
}

/// Chain data needed to report homology through a given degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeRequirements {
    /// Highest chain degree that must be built.
    pub chain_top: usize,
    /// Highest bicomplex column that must be built (cyclic theories).
    pub columns: usize,
    /// Dimension of the largest ambient space touched.
    pub largest_space: u128,
}

fn pow_u128(base: usize, exp: u128) -> Option<u128> {
    let e = u32::try_from(exp).ok()?;
    (base as u128).checked_pow(e)
}

/// Truncation bounds for homology through degree `n` of an algebra of dimension `d`.
pub fn degree_requirements(
    theory: crate::theories::Theory,
    n: usize,
    d: usize,
    cap: u128,
) -> Result<DegreeRequirements> {
    use crate::theories::Theory;
    let chain_top = n + 1;
    let (columns, largest) = match theory {
        Theory::HH => (0, pow_u128(d, chain_top as u128 + 1)),
        Theory::HC => (chain_top / 2, pow_u128(d, chain_top as u128 + 1)),
        Theory::HGamma | Theory::HGammaC => {
            let exp = 1u128.checked_shl(chain_top as u32).map(|v| v + 1);
            (0, exp.and_then(|e| pow_u128(d, e)))
        }
    };
    let largest = largest.ok_or_else(|| {
        Error::Resource(format!("{theory} through degree {n} needs a space of dimension beyond 2^128"))
    })?;
    if largest > cap {
        return Err(Error::Resource(format!(
            "{theory} through degree {n} needs a space of dimension {largest}, above the cap {cap}"
        )));
    }
    Ok(DegreeRequirements { chain_top, columns, largest_space: largest })
}
