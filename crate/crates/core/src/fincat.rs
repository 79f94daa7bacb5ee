//! The skeletal categories F (sets {0..n}) and Γ (pointed sets [n], basepoint 0),
//! their named generator maps, and the cube-vertex combinatorics.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which category a functor is defined on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Site {
    /// Finite sets n̄ = {0,…,n} and all maps.
    Fin,
    /// Pointed finite sets [n] with basepoint 0 and basepoint-preserving maps.
    Gamma,
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Fin => write!(f, "F"),
            Site::Gamma => write!(f, "Gamma"),
        }
    }
}

/// The object {0,…,n} of one of the two categories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinObj {
    pub n: usize,
    pub site: Site,
}

impl FinObj {
    pub fn fin(n: usize) -> Self {
        FinObj { n, site: Site::Fin }
    }
    pub fn pointed(n: usize) -> Self {
        FinObj { n, site: Site::Gamma }
    }
    pub fn card(&self) -> usize {
        self.n + 1
    }
}

/// A morphism, stored as its list of images `images[j] = f(j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetMap {
    site: Site,
    source: usize,
    target: usize,
    images: Vec<usize>,
}

impl SetMap {
    pub fn new(site: Site, source: usize, target: usize, images: Vec<usize>) -> Result<Self> {
        if images.len() != source + 1 {
            return Err(Error::Invalid(format!(
                "map out of {{0..{source}}} needs {} images, got {}",
                source + 1,
                images.len()
            )));
        }
        if let Some(bad) = images.iter().find(|&&x| x > target) {
            return Err(Error::Invalid(format!("image {bad} outside {{0..{target}}}")));
        }
        if site == Site::Gamma && images[0] != 0 {
            return Err(Error::Invalid("pointed map must send 0 to 0".into()));
        }
        Ok(SetMap { site, source, target, images })
    }

    pub fn fin(source: usize, target: usize, images: Vec<usize>) -> Result<Self> {
        Self::new(Site::Fin, source, target, images)
    }

    pub fn pointed(source: usize, target: usize, images: Vec<usize>) -> Result<Self> {
        Self::new(Site::Gamma, source, target, images)
    }

    fn raw(site: Site, source: usize, target: usize, images: Vec<usize>) -> Self {
        debug_assert!(Self::new(site, source, target, images.clone()).is_ok());
        SetMap { site, source, target, images }
    }

    pub fn identity(site: Site, n: usize) -> Self {
        SetMap::raw(site, n, n, (0..=n).collect())
    }

    pub fn site(&self) -> Site {
        self.site
    }
    pub fn source(&self) -> usize {
        self.source
    }
    pub fn target(&self) -> usize {
        self.target
    }
    pub fn images(&self) -> &[usize] {
        &self.images
    }
    pub fn apply(&self, j: usize) -> usize {
        self.images[j]
    }

    /// Same images viewed in the other category (pointed maps are in particular maps).
    pub fn with_site(&self, site: Site) -> Result<Self> {
        Self::new(site, self.source, self.target, self.images.clone())
    }

    /// `self ∘ g`: apply `g` first.
    pub fn compose(&self, g: &SetMap) -> Result<SetMap> {
        if g.target != self.source {
            return Err(Error::Invalid(format!(
                "cannot compose: inner map lands in {{0..{}}}, outer starts at {{0..{}}}",
                g.target, self.source
            )));
        }
        if g.site != self.site {
            return Err(Error::Invalid("cannot compose maps from different sites".into()));
        }
        Ok(SetMap::raw(
            self.site,
            g.source,
            self.target,
            g.images.iter().map(|&j| self.images[j]).collect(),
        ))
    }

    /// `preimages()[i]` lists `j` with `f(j) = i`, ascending.
    pub fn preimages(&self) -> Vec<Vec<usize>> {
        let mut pre = vec![Vec::new(); self.target + 1];
        for (j, &i) in self.images.iter().enumerate() {
            pre[i].push(j);
        }
        pre
    }

    pub fn is_injective(&self) -> bool {
        self.preimages().iter().all(|p| p.len() <= 1)
    }

    pub fn is_surjective(&self) -> bool {
        self.preimages().iter().all(|p| !p.is_empty())
    }
}

impl fmt::Display for SetMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imgs: Vec<String> = self.images.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", imgs.join(","))
    }
}

/// All morphisms between two objects in lexicographic order of image tuples.
pub fn enumerate_maps(site: Site, source: usize, target: usize) -> Vec<SetMap> {
    let free = match site {
        Site::Fin => source + 1,
        Site::Gamma => source,
    };
    let base = target + 1;
    let count = base.checked_pow(free as u32).unwrap_or(usize::MAX);
    let mut out = Vec::with_capacity(count.min(1 << 20));
    let mut digits = vec![0usize; free];
    loop {
        let images = match site {
            Site::Fin => digits.clone(),
            Site::Gamma => std::iter::once(0).chain(digits.iter().copied()).collect(),
        };
        out.push(SetMap::raw(site, source, target, images));
        let mut k = free;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < base {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// Hochschild face d_i on {0..n}, 0 ≤ i ≤ n: for i < n it merges i and i+1,
/// and d_n merges n into 0.
pub fn face(site: Site, n: usize, i: usize) -> Result<SetMap> {
    if n == 0 || i > n {
        return Err(Error::Invalid(format!("face d_{i} undefined on {{0..{n}}}")));
    }
    let images = (0..=n)
        .map(|j| {
            if i == n {
                if j == n {
                    0
                } else {
                    j
                }
            } else if j <= i {
                j
            } else {
                j - 1
            }
        })
        .collect();
    Ok(SetMap::raw(site, n, n - 1, images))
}

/// Injection {0..n-1} → {0..n} missing the value `i` (1 ≤ i ≤ n); its action
/// inserts the unit in slot `i`.
pub fn degeneracy(site: Site, n: usize, i: usize) -> Result<SetMap> {
    if n == 0 || i == 0 || i > n {
        return Err(Error::Invalid(format!("degeneracy {i} undefined into {{0..{n}}}")));
    }
    let images = (0..n).map(|j| if j < i { j } else { j + 1 }).collect();
    Ok(SetMap::raw(site, n - 1, n, images))
}

/// Cyclic rotation τ on n̄: j ↦ j+1 mod n+1.
pub fn tau(n: usize) -> SetMap {
    SetMap::raw(Site::Fin, n, n, (0..=n).map(|j| (j + 1) % (n + 1)).collect())
}

/// Shift s: n̄ → (n+1)‾, j ↦ j+1.
pub fn shift(n: usize) -> SetMap {
    SetMap::raw(Site::Fin, n, n + 1, (1..=n + 1).collect())
}

/// Vertex `v ∈ {0,1}^n` ↦ 1 + Σ v_i 2^{n-i} (v_1 most significant).
pub fn vertex_index(v: &[u8]) -> usize {
    1 + v.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
}

pub fn vertex_of(n: usize, idx: usize) -> Vec<u8> {
    debug_assert!(idx >= 1 && idx <= 1 << n);
    let k = idx - 1;
    (0..n).map(|i| ((k >> (n - 1 - i)) & 1) as u8).collect()
}

fn delete_coord(v: &[u8], i: usize) -> Vec<u8> {
    v.iter()
        .enumerate()
        .filter(|(k, _)| *k + 1 != i)
        .map(|(_, b)| *b)
        .collect()
}

/// The three cube maps on the vertex coding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CubeMap {
    /// delete coordinate i
    P,
    /// delete coordinate i where v_i = 0, basepoint elsewhere
    R,
    /// delete coordinate i where v_i = 1, basepoint elsewhere
    S,
}

/// The pointed map [2^n] → [2^{n-1}] for one of p_i, r_i, s_i, 1 ≤ i ≤ n.
pub fn cube_map(kind: CubeMap, n: usize, i: usize) -> Result<SetMap> {
    if n == 0 || i == 0 || i > n {
        return Err(Error::Invalid(format!("cube map index {i} out of range for n = {n}")));
    }
    let total = 1usize << n;
    let mut images = vec![0usize; total + 1];
    for (idx, img) in images.iter_mut().enumerate().skip(1) {
        let v = vertex_of(n, idx);
        let keep = match kind {
            CubeMap::P => true,
            CubeMap::R => v[i - 1] == 0,
            CubeMap::S => v[i - 1] == 1,
        };
        if keep {
            *img = vertex_index(&delete_coord(&v, i));
        }
    }
    Ok(SetMap::raw(Site::Gamma, total, total >> 1, images))
}

/// Staircase σ_n: [n+1] → [2^n], j ↦ vertex (0,…,0,1,…,1) with j−1 ones.
pub fn staircase(n: usize) -> SetMap {
    let mut images = vec![0usize; n + 2];
    for (j, img) in images.iter_mut().enumerate().skip(1) {
        let ones = j - 1;
        let v: Vec<u8> = (0..n).map(|k| u8::from(k >= n - ones)).collect();
        *img = vertex_index(&v);
    }
    SetMap::raw(Site::Gamma, n + 1, 1 << n, images)
}

/// Order-preserving inclusion [|W|] → [2^n] of a vertex subset W (given by indices).
pub fn subset_inclusion(n: usize, w: &[usize]) -> Result<SetMap> {
    let mut sorted = w.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != w.len() {
        return Err(Error::Invalid("vertex subset has repeated entries".into()));
    }
    if let Some(bad) = sorted.iter().find(|&&x| x == 0 || x > 1 << n) {
        return Err(Error::Invalid(format!("{bad} is not a vertex of the {n}-cube")));
    }
    let images = std::iter::once(0).chain(sorted.iter().copied()).collect();
    Ok(SetMap::raw(Site::Gamma, sorted.len(), 1 << n, images))
}

/// Which diagonals Δ_ij enter the degenerate family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum DiagonalRule {
    /// Only Δ_{i,i+1}; closed under the cube boundary.
    #[default]
    Adjacent,
    /// Every Δ_ij with i < j.
    AllPairs,
}

/// A named vertex subset of the n-cube.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSubset {
    pub label: String,
    /// Vertex indices, ascending.
    pub vertices: Vec<usize>,
}

/// The supports of degenerate cubes: ∅, the faces {v_i = c}, and the diagonals {v_i = v_j}.
pub fn degenerate_family(n: usize, rule: DiagonalRule) -> Vec<VertexSubset> {
    let all: Vec<Vec<u8>> = (1..=1usize << n).map(|k| vertex_of(n, k)).collect();
    let pick = |pred: &dyn Fn(&[u8]) -> bool| -> Vec<usize> {
        all.iter()
            .filter(|v| pred(v))
            .map(|v| vertex_index(v))
            .collect()
    };
    let mut out = vec![VertexSubset { label: "empty".into(), vertices: Vec::new() }];
    for i in 1..=n {
        for c in 0..=1u8 {
            out.push(VertexSubset {
                label: format!("F{i}^{c}"),
                vertices: pick(&|v| v[i - 1] == c),
            });
        }
    }
    for i in 1..=n {
        for j in i + 1..=n {
            if rule == DiagonalRule::Adjacent && j != i + 1 {
                continue;
            }
            out.push(VertexSubset {
                label: format!("D{i}{j}"),
                vertices: pick(&|v| v[i - 1] == v[j - 1]),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_associates_and_has_identity() {
        let f = SetMap::fin(2, 1, vec![0, 1, 1]).unwrap();
        let g = SetMap::fin(1, 2, vec![2, 0]).unwrap();
        let h = SetMap::fin(0, 1, vec![1]).unwrap();
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        assert_eq!(left, right);
        assert_eq!(f.compose(&SetMap::identity(Site::Fin, 2)).unwrap(), f);
        assert!(f.compose(&f).is_err());
    }

    #[test]
    fn tau_has_order_n_plus_one() {
        for n in 0..=6 {
            let t = tau(n);
            let mut acc = SetMap::identity(Site::Fin, n);
            for _ in 0..=n {
                acc = t.compose(&acc).unwrap();
            }
            assert_eq!(acc, SetMap::identity(Site::Fin, n));
        }
        let d0 = face(Site::Fin, 2, 0).unwrap();
        assert_eq!(d0.compose(&shift(1)).unwrap().images(), &[0, 1]);
    }

    #[test]
    fn enumeration_is_complete_and_distinct() {
        for n in 0..=3 {
            for m in 0..=3 {
                for site in [Site::Fin, Site::Gamma] {
                    let maps = enumerate_maps(site, n, m);
                    let free = if site == Site::Fin { n + 1 } else { n };
                    assert_eq!(maps.len(), (m + 1).pow(free as u32));
                    let set: std::collections::HashSet<_> = maps.iter().collect();
                    assert_eq!(set.len(), maps.len());
                }
            }
        }
    }

    #[test]
    fn map_counts() {
        assert_eq!(enumerate_maps(Site::Fin, 1, 2).len(), 9);
        assert_eq!(enumerate_maps(Site::Gamma, 2, 3).len(), 16);
        let maps = enumerate_maps(Site::Gamma, 2, 1);
        assert_eq!(maps[1].images(), &[0, 0, 1]);
        assert!(SetMap::pointed(1, 1, vec![1, 0]).is_err());
    }

    #[test]
    fn faces_match_definition() {
        assert_eq!(face(Site::Fin, 3, 1).unwrap().images(), &[0, 1, 1, 2]);
        assert_eq!(face(Site::Fin, 3, 3).unwrap().images(), &[0, 1, 2, 0]);
        assert_eq!(face(Site::Gamma, 1, 0).unwrap().images(), &[0, 0]);
        assert_eq!(degeneracy(Site::Fin, 2, 1).unwrap().images(), &[0, 2]);
    }

    #[test]
    fn staircase_two_matches_example() {
        assert_eq!(staircase(2).images(), &[0, 1, 2, 4]);
        let f = SetMap::pointed(6, 3, vec![0, 3, 1, 3, 1, 0, 2]).unwrap();
        let g = staircase(2).compose(&f).unwrap();
        assert_eq!(g.images(), &[0, 4, 1, 4, 1, 0, 2]);
    }

    #[test]
    fn staircase_has_trailing_ones() {
        for n in 0..=5 {
            let s = staircase(n);
            for j in 1..=n + 1 {
                let v = vertex_of(n, s.apply(j));
                let ones = v.iter().rev().take_while(|&&b| b == 1).count();
                assert_eq!(ones, j - 1);
                assert_eq!(v.iter().filter(|&&b| b == 1).count(), j - 1);
            }
        }
    }

    #[test]
    fn vertex_coding_roundtrip() {
        assert_eq!(vertex_index(&[0, 0]), 1);
        assert_eq!(vertex_index(&[0, 1]), 2);
        assert_eq!(vertex_index(&[1, 1]), 4);
        for n in 0..6 {
            for k in 1..=1usize << n {
                assert_eq!(vertex_index(&vertex_of(n, k)), k);
            }
        }
    }

    #[test]
    fn cube_maps_on_small_cubes() {
        assert_eq!(cube_map(CubeMap::P, 1, 1).unwrap().images(), &[0, 1, 1]);
        assert_eq!(cube_map(CubeMap::R, 1, 1).unwrap().images(), &[0, 1, 0]);
        assert_eq!(cube_map(CubeMap::S, 1, 1).unwrap().images(), &[0, 0, 1]);
        assert_eq!(cube_map(CubeMap::R, 2, 1).unwrap().images(), &[0, 1, 2, 0, 0]);
        assert_eq!(cube_map(CubeMap::S, 2, 2).unwrap().images(), &[0, 0, 1, 0, 2]);
    }

    #[test]
    fn degenerate_family_counts() {
        assert_eq!(degenerate_family(0, DiagonalRule::Adjacent).len(), 1);
        let w1 = degenerate_family(1, DiagonalRule::Adjacent);
        let sets: Vec<_> = w1.iter().map(|w| w.vertices.clone()).collect();
        assert_eq!(sets, vec![vec![], vec![1], vec![2]]);
        let w2 = degenerate_family(2, DiagonalRule::Adjacent);
        assert_eq!(w2.len(), 6);
        assert_eq!(w2[5].vertices, vec![1, 4]);
        for n in 1..6 {
            assert_eq!(degenerate_family(n, DiagonalRule::AllPairs).len(), 1 + 2 * n + n * (n - 1) / 2);
            assert_eq!(degenerate_family(n, DiagonalRule::Adjacent).len(), 1 + 2 * n + (n - 1));
        }
    }

    #[test]
    fn subset_inclusion_is_order_preserving() {
        let m = subset_inclusion(2, &[4, 1]).unwrap();
        assert_eq!(m.images(), &[0, 1, 4]);
        assert!(subset_inclusion(2, &[5]).is_err());
    }
}
