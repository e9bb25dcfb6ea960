//! Modules over `kP/Q` and their minimal projective resolutions.
//!
//! A module stores a vector space per element and a matrix per Hasse cover
//! arrow. Composites along killed arrows must vanish; since surviving pairs are
//! closed under taking intervals, every surviving arrow is a composite of
//! surviving covers and the radical at `r` is spanned by the images of the
//! lower covers of `r`.

use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{quotient_basis, FpMatrix, LinalgError};
use crate::poset::{ElemId, QuotientPoset};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResolutionError {
    #[error("nonzero space at forbidden element {0}")]
    ForbiddenSupport(ElemId),
    #[error("cover map {from} -> {to} has the wrong shape")]
    MapShape { from: ElemId, to: ElemId },
    #[error("relations fail between {from} and {to}")]
    Relations { from: ElemId, to: ElemId },
    #[error("projective cover is not surjective at {0}")]
    NotSurjective(ElemId),
    #[error("image of {from} -> {to} leaves the target subspace")]
    NotSubmodule { from: ElemId, to: ElemId },
    #[error("resolution longer than the depth guard {guard}; syzygy dimensions {dims:?}")]
    DepthExceeded { guard: usize, dims: Vec<usize> },
    #[error("{0}")]
    Frontend(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A representation of `(P, Q)`: dims per element, maps on lower covers.
#[derive(Debug, Clone)]
pub struct PosetModule {
    poset: Arc<QuotientPoset>,
    p: u32,
    dims: Vec<usize>,
    // into[r][t] is the map from poset.lower_covers(r)[t] to r
    into: Vec<Vec<FpMatrix>>,
}

/// Generators of the top: an element and a lift vector in the module there.
#[derive(Debug, Clone, PartialEq)]
pub struct TopGenerator {
    pub element: ElemId,
    pub lift: Vec<u32>,
}

/// `P = ⊕ P_{g}` with the cover map `P → N` given pointwise.
#[derive(Debug, Clone)]
pub struct ProjectiveCover {
    pub generators: Vec<TopGenerator>,
    /// Generators surviving to each element, in generator order.
    pub basis: Vec<Vec<usize>>,
    /// `N_r × |basis[r]|` matrices.
    pub components: Vec<FpMatrix>,
}

/// Kernel of a cover together with the embedding of its basis into `P`.
#[derive(Debug, Clone)]
pub struct Syzygy {
    pub module: PosetModule,
    /// Per element, `|basis[r]| × dim K_r` kernel basis.
    pub embedding: Vec<FpMatrix>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionResult {
    /// Generator elements of the `k`-th projective, for `k = 0..=length`.
    pub betti: Vec<Vec<ElemId>>,
    /// `differentials[k][j]`: the image of generator `j` of degree `k` as
    /// coefficients on the generators of degree `k - 1`. Empty for `k = 0`.
    pub differentials: Vec<Vec<Vec<(usize, u32)>>>,
    /// Total dimension of the module and its successive syzygies.
    pub syzygy_dims: Vec<usize>,
    pub length: usize,
}

impl ResolutionResult {
    pub fn total(&self) -> usize {
        self.betti.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.betti.is_empty()
    }
}

impl PosetModule {
    pub fn new(
        poset: Arc<QuotientPoset>,
        p: u32,
        dims: Vec<usize>,
        into: Vec<Vec<FpMatrix>>,
    ) -> Result<Self, ResolutionError> {
        assert_eq!(dims.len(), poset.len());
        assert_eq!(into.len(), poset.len());
        for r in 0..poset.len() {
            if poset.is_forbidden(r) && dims[r] != 0 {
                return Err(ResolutionError::ForbiddenSupport(r));
            }
            let lower = poset.lower_covers(r);
            if into[r].len() != lower.len() {
                return Err(ResolutionError::MapShape { from: usize::MAX, to: r });
            }
            for (t, &q) in lower.iter().enumerate() {
                if into[r][t].shape() != (dims[r], dims[q]) {
                    return Err(ResolutionError::MapShape { from: q, to: r });
                }
            }
        }
        Ok(PosetModule { poset, p, dims, into })
    }

    pub fn zero(poset: Arc<QuotientPoset>, p: u32) -> Self {
        let into = (0..poset.len())
            .map(|r| poset.lower_covers(r).iter().map(|_| FpMatrix::zeros(0, 0, p)).collect())
            .collect();
        PosetModule { dims: vec![0; poset.len()], poset, p, into }
    }

    /// The simple module at a non-forbidden element.
    pub fn simple(poset: Arc<QuotientPoset>, p: u32, at: ElemId) -> Result<Self, ResolutionError> {
        if poset.is_forbidden(at) {
            return Err(ResolutionError::ForbiddenSupport(at));
        }
        let mut dims = vec![0; poset.len()];
        dims[at] = 1;
        let into = (0..poset.len())
            .map(|r| {
                poset
                    .lower_covers(r)
                    .iter()
                    .map(|&q| FpMatrix::zeros(dims[r], dims[q], p))
                    .collect()
            })
            .collect();
        Ok(PosetModule { poset, p, dims, into })
    }

    /// The indecomposable projective `P_g`: `k` wherever `g` survives.
    pub fn projective(poset: Arc<QuotientPoset>, p: u32, g: ElemId) -> Self {
        let dims: Vec<usize> = (0..poset.len()).map(|r| usize::from(poset.survives(g, r))).collect();
        let into = (0..poset.len())
            .map(|r| {
                poset
                    .lower_covers(r)
                    .iter()
                    .map(|&q| {
                        let mut m = FpMatrix::zeros(dims[r], dims[q], p);
                        if dims[r] == 1 && dims[q] == 1 {
                            m.set(0, 0, 1);
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        PosetModule { poset, p, dims, into }
    }

    pub fn poset(&self) -> &Arc<QuotientPoset> {
        &self.poset
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// Map along the cover `q ⋖ r`.
    pub fn cover_map(&self, q: ElemId, r: ElemId) -> Option<&FpMatrix> {
        let t = self.poset.lower_covers(r).iter().position(|&x| x == q)?;
        Some(&self.into[r][t])
    }

    /// Maps from `q` to every `r` with `q ≤ r` surviving (`None` elsewhere).
    pub fn maps_from(&self, q: ElemId) -> Vec<Option<FpMatrix>> {
        let poset = &*self.poset;
        let mut out: Vec<Option<FpMatrix>> = vec![None; poset.len()];
        if poset.is_forbidden(q) {
            return out;
        }
        let lin = poset.linear_extension();
        let start = lin.iter().position(|&x| x == q).unwrap();
        out[q] = Some(FpMatrix::identity(self.dims[q], self.p));
        for &r in &lin[start + 1..] {
            if !poset.survives(q, r) {
                continue;
            }
            let lower = poset.lower_covers(r);
            let t = lower.iter().position(|&x| out[x].is_some()).unwrap();
            let m = self.into[r][t].mul(out[lower[t]].as_ref().unwrap()).unwrap();
            out[r] = Some(m);
        }
        out
    }

    /// Exhaustive check that all chains agree on surviving pairs and vanish on
    /// killed ones. Quadratic in the poset; meant for tests.
    pub fn check_relations(&self) -> Result<(), ResolutionError> {
        let poset = &*self.poset;
        let lin = poset.linear_extension();
        for (start, &q) in lin.iter().enumerate() {
            if self.dims[q] == 0 {
                continue;
            }
            // composites along every chain, taken through each lower cover
            let mut out: Vec<Option<FpMatrix>> = vec![None; poset.len()];
            out[q] = Some(FpMatrix::identity(self.dims[q], self.p));
            for &r in &lin[start + 1..] {
                if !poset.leq(q, r) {
                    continue;
                }
                let mut value: Option<FpMatrix> = None;
                for (t, &x) in poset.lower_covers(r).iter().enumerate() {
                    let Some(prev) = out[x].as_ref() else { continue };
                    let m = self.into[r][t].mul(prev)?;
                    match &value {
                        None => value = Some(m),
                        Some(v) if *v != m => {
                            return Err(ResolutionError::Relations { from: q, to: r })
                        }
                        _ => {}
                    }
                }
                let m = value.unwrap();
                if !poset.survives(q, r) && !m.is_zero() {
                    return Err(ResolutionError::Relations { from: q, to: r });
                }
                out[r] = Some(m);
            }
        }
        Ok(())
    }

    /// Cokernel of the radical inclusion at each element, with unit-vector lifts.
    pub fn top(&self) -> Result<Vec<TopGenerator>, ResolutionError> {
        let mut gens = Vec::new();
        for &r in self.poset.linear_extension() {
            let d = self.dims[r];
            if d == 0 {
                continue;
            }
            let parts: Vec<&FpMatrix> = self.into[r].iter().collect();
            let rad = FpMatrix::hstack(d, self.p, &parts)?;
            let q = quotient_basis(d, &rad)?;
            for &c in &q.complement {
                let mut lift = vec![0; d];
                lift[c] = 1;
                gens.push(TopGenerator { element: r, lift });
            }
        }
        Ok(gens)
    }

    pub fn projective_cover(&self, gens: Vec<TopGenerator>) -> Result<ProjectiveCover, ResolutionError> {
        let poset = &*self.poset;
        let len = poset.len();
        let mut basis: Vec<Vec<usize>> = vec![Vec::new(); len];
        let mut components: Vec<FpMatrix> = vec![FpMatrix::zeros(0, 0, self.p); len];
        for &r in poset.linear_extension() {
            let b: Vec<usize> =
                (0..gens.len()).filter(|&g| poset.survives(gens[g].element, r)).collect();
            let mut c = FpMatrix::zeros(self.dims[r], b.len(), self.p);
            for (col, &g) in b.iter().enumerate() {
                let e = gens[g].element;
                let v = if e == r {
                    gens[g].lift.clone()
                } else {
                    let lower = poset.lower_covers(r);
                    let t = lower
                        .iter()
                        .position(|&x| poset.survives(e, x))
                        .expect("surviving arrow factors through a lower cover");
                    let x = lower[t];
                    let pos = basis[x].binary_search(&g).unwrap();
                    self.into[r][t].mul_vec(&components[x].column(pos))?
                };
                for (row, val) in v.into_iter().enumerate() {
                    c.set(row, col, val);
                }
            }
            if c.rank() != self.dims[r] {
                return Err(ResolutionError::NotSurjective(r));
            }
            basis[r] = b;
            components[r] = c;
        }
        Ok(ProjectiveCover { generators: gens, basis, components })
    }

    /// Pointwise kernel of a cover, with the maps it inherits from `P`.
    pub fn syzygy(&self, cover: &ProjectiveCover) -> Result<Syzygy, ResolutionError> {
        let poset = self.poset.clone();
        let len = poset.len();
        let kernels: Vec<_> = cover.components.iter().map(FpMatrix::kernel).collect();
        let dims: Vec<usize> = kernels.iter().map(|k| k.dim()).collect();
        let mut into = Vec::with_capacity(len);
        for r in 0..len {
            let mut row = Vec::new();
            for &q in poset.lower_covers(r) {
                let mut m = FpMatrix::zeros(dims[r], dims[q], self.p);
                if dims[r] > 0 && dims[q] > 0 {
                    let br = &cover.basis[r];
                    let kr = &kernels[r];
                    for c in 0..dims[q] {
                        let w = kernels[q].basis.column(c);
                        let mut u = vec![0; br.len()];
                        for (pos, &g) in cover.basis[q].iter().enumerate() {
                            if let Ok(tpos) = br.binary_search(&g) {
                                u[tpos] = w[pos];
                            }
                        }
                        debug_assert!(cover.components[r].mul_vec(&u).unwrap().iter().all(|&v| v == 0));
                        for (i, &f) in kr.free.iter().enumerate() {
                            m.set(i, c, u[f]);
                        }
                    }
                }
                row.push(m);
            }
            into.push(row);
        }
        let embedding = kernels.into_iter().map(|k| k.basis).collect();
        Ok(Syzygy { module: PosetModule { poset, p: self.p, dims, into }, embedding })
    }

    /// Minimal projective resolution; errors once degree `depth_guard + 1` is reached.
    pub fn minimal_resolution(&self, depth_guard: usize) -> Result<ResolutionResult, ResolutionError> {
        let mut betti = Vec::new();
        let mut differentials = Vec::new();
        let mut syzygy_dims = Vec::new();
        let mut current = self.clone();
        // embedding of `current` into the previous projective, if any
        let mut previous: Option<(Vec<FpMatrix>, ProjectiveCover)> = None;
        loop {
            syzygy_dims.push(current.total_dim());
            if current.is_zero() {
                break;
            }
            let degree = betti.len();
            if degree > depth_guard {
                return Err(ResolutionError::DepthExceeded { guard: depth_guard, dims: syzygy_dims });
            }
            let gens = current.top()?;
            let mut diff = Vec::new();
            if let Some((embedding, prev_cover)) = &previous {
                for g in &gens {
                    let r = g.element;
                    let ambient = embedding[r].mul_vec(&g.lift)?;
                    let col: Vec<(usize, u32)> = ambient
                        .iter()
                        .enumerate()
                        .filter(|&(_, &v)| v != 0)
                        .map(|(pos, &v)| (prev_cover.basis[r][pos], v))
                        .collect();
                    diff.push(col);
                }
            }
            betti.push(gens.iter().map(|g| g.element).collect::<Vec<_>>());
            differentials.push(diff);
            let cover = current.projective_cover(gens)?;
            let syz = current.syzygy(&cover)?;
            current = syz.module;
            previous = Some((syz.embedding, cover));
        }
        let length = betti.len().saturating_sub(1);
        Ok(ResolutionResult { betti, differentials, syzygy_dims, length })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::GridPoset;

    fn grid_poset(shape: &[usize]) -> Arc<QuotientPoset> {
        Arc::new(QuotientPoset::grid(&GridPoset::integer(shape, false).unwrap()).unwrap())
    }

    #[test]
    fn projective_resolves_in_degree_zero() {
        let poset = grid_poset(&[3, 3]);
        let pm = PosetModule::projective(poset.clone(), 2, 4);
        pm.check_relations().unwrap();
        let res = pm.minimal_resolution(4).unwrap();
        assert_eq!(res.betti, vec![vec![4]]);
        assert_eq!(res.length, 0);
        let zero = PosetModule::zero(poset, 2);
        assert!(zero.top().unwrap().is_empty());
        assert!(zero.minimal_resolution(0).unwrap().is_zero());
    }

    #[test]
    fn simple_on_a_square_is_koszul() {
        let poset = grid_poset(&[2, 2]);
        let s = PosetModule::simple(poset.clone(), 3, 0).unwrap();
        let res = s.minimal_resolution(3).unwrap();
        let g = poset.grid_poset();
        assert_eq!(res.betti[0], vec![0]);
        let mut b1 = res.betti[1].clone();
        b1.sort_unstable();
        assert_eq!(b1, vec![g.index(&[0, 1]), g.index(&[1, 0])]);
        assert_eq!(res.betti[2], vec![g.index(&[1, 1])]);
        assert_eq!(res.length, 2);
        assert_eq!(res.differentials[1].len(), 2);
        assert!(res.differentials[2][0].len() == 2);
    }

    #[test]
    fn depth_guard_is_enforced() {
        let poset = grid_poset(&[2, 2]);
        let s = PosetModule::simple(poset, 2, 0).unwrap();
        assert!(matches!(s.minimal_resolution(1), Err(ResolutionError::DepthExceeded { guard: 1, .. })));
    }

    #[test]
    fn simple_at_forbidden_is_rejected() {
        let g = GridPoset::integer(&[2], true).unwrap();
        let poset = Arc::new(QuotientPoset::pairs(&g).unwrap());
        let diag = poset.pair_id(0, 0).unwrap();
        assert!(PosetModule::simple(poset, 2, diag).is_err());
    }

    #[test]
    fn radical_from_covers_matches_all_arrows() {
        // on projectives and simples of the pairs poset the two radicals agree
        let g = GridPoset::integer(&[2, 2], true).unwrap();
        let poset = Arc::new(QuotientPoset::pairs(&g).unwrap());
        for e in 0..poset.len() {
            if poset.is_forbidden(e) {
                continue;
            }
            let pm = PosetModule::projective(poset.clone(), 2, e);
            pm.check_relations().unwrap();
            let top = pm.top().unwrap();
            assert_eq!(top, vec![TopGenerator { element: e, lift: vec![1] }]);
            for r in 0..poset.len() {
                if pm.dims()[r] == 0 {
                    continue;
                }
                let maps = (0..poset.len())
                    .filter(|&q| q != r && poset.survives(q, r))
                    .filter_map(|q| pm.maps_from(q)[r].clone())
                    .collect::<Vec<_>>();
                let parts: Vec<&FpMatrix> = maps.iter().collect();
                let all = FpMatrix::hstack(1, 2, &parts).unwrap();
                let covers: Vec<&FpMatrix> = pm.into[r].iter().collect();
                let cov = FpMatrix::hstack(1, 2, &covers).unwrap();
                assert_eq!(all.rank(), cov.rank());
            }
        }
    }
}
