//! The Koszul-type free resolution of an upset module on a grid.
//!
//! For generators `f(0), …, f(m−1)` the term in degree `k` is
//! `⊕_{|A| = k+1} P_{∨f(A)}`, with the simplicial boundary: the summand of
//! `A = {a_0 < … < a_k}` maps to that of `A ∖ a_l` with sign `(−1)^l`.

use thiserror::Error;

use crate::linalg::FpMatrix;
use crate::poset::{ElemId, GridPoset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KoszulError {
    #[error("at least one generator is required")]
    NoGenerators,
    #[error("generator {0} is not a grid point")]
    NotAPoint(ElemId),
    #[error("consecutive boundaries do not compose to zero at point {point}, degree {degree}")]
    NotComplex { point: ElemId, degree: usize },
    #[error("homology at point {point}, degree {degree}")]
    NotExact { point: ElemId, degree: usize },
}

#[derive(Debug, Clone)]
pub struct KoszulComplex {
    grid: GridPoset,
    generators: Vec<ElemId>,
    /// `terms[k]`: subsets of size `k + 1` (as bitmasks) with their joins.
    terms: Vec<Vec<(u32, ElemId)>>,
    minimal: bool,
}

pub fn koszul_upset_resolution(grid: &GridPoset, gens: &[ElemId]) -> Result<KoszulComplex, KoszulError> {
    if gens.is_empty() {
        return Err(KoszulError::NoGenerators);
    }
    if let Some(&g) = gens.iter().find(|&&g| g >= grid.num_points()) {
        return Err(KoszulError::NotAPoint(g));
    }
    assert!(gens.len() < 32, "too many generators for a subset mask");
    let m = gens.len();
    let join_of = |mask: u32| -> ElemId {
        let mut it = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| gens[i]);
        let first = it.next().unwrap();
        it.fold(first, |acc, g| grid.join(acc, g))
    };
    let mut terms: Vec<Vec<(u32, ElemId)>> = vec![Vec::new(); m];
    for mask in 1u32..1 << m {
        terms[mask.count_ones() as usize - 1].push((mask, join_of(mask)));
    }
    let full = (1u32 << m) - 1;
    let top = join_of(full);
    let minimal = (1..full).all(|mask| join_of(mask) != top);
    Ok(KoszulComplex { grid: grid.clone(), generators: gens.to_vec(), terms, minimal })
}

impl KoszulComplex {
    pub fn generators(&self) -> &[ElemId] {
        &self.generators
    }

    /// `m − 1`.
    pub fn length(&self) -> usize {
        self.terms.len() - 1
    }

    /// Whether every proper subset of generators has a strictly smaller join,
    /// in which case no shorter free resolution exists.
    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    /// Joins of the summands in degree `k`.
    pub fn grades(&self, k: usize) -> Vec<ElemId> {
        self.terms[k].iter().map(|&(_, j)| j).collect()
    }

    fn basis_at(&self, k: usize, x: ElemId) -> Vec<u32> {
        self.terms[k].iter().filter(|&&(_, j)| self.grid.leq(j, x)).map(|&(s, _)| s).collect()
    }

    /// Boundary `C_k(x) → C_{k−1}(x)` for `k ≥ 1`.
    pub fn boundary_at(&self, k: usize, x: ElemId, p: u32) -> FpMatrix {
        let src = self.basis_at(k, x);
        let dst = self.basis_at(k - 1, x);
        let mut d = FpMatrix::zeros(dst.len(), src.len(), p);
        for (c, &a) in src.iter().enumerate() {
            for (l, i) in (0..32).filter(|&i| a >> i & 1 == 1).enumerate() {
                let face = a & !(1 << i);
                let r = dst.iter().position(|&b| b == face).expect("faces of a summand survive");
                d.set(r, c, if l % 2 == 0 { 1 } else { p - 1 });
            }
        }
        d
    }

    /// Augmentation `C_0(x) → k_I(x)`: every generator maps to `1`.
    pub fn augmentation_at(&self, x: ElemId, p: u32) -> FpMatrix {
        let cols = self.basis_at(0, x).len();
        let rows = usize::from(cols > 0);
        let mut e = FpMatrix::zeros(rows, cols, p);
        for c in 0..cols {
            e.set(0, c, 1);
        }
        e
    }

    /// Exactness of `0 → C_{m−1} → … → C_0 → k_I → 0` at every grid point.
    pub fn check_exact(&self, p: u32) -> Result<(), KoszulError> {
        for x in 0..self.grid.num_points() {
            let in_upset = self.generators.iter().any(|&g| self.grid.leq(g, x));
            // maps[k] : C_k → C_{k−1}, with C_{−1} = k_I and maps[0] the augmentation
            let mut maps = vec![self.augmentation_at(x, p)];
            for k in 1..=self.length() {
                maps.push(self.boundary_at(k, x, p));
            }
            if maps[0].rows() != usize::from(in_upset) || maps[0].rank() != maps[0].rows() {
                return Err(KoszulError::NotExact { point: x, degree: 0 });
            }
            for k in 1..maps.len() {
                if !maps[k - 1].mul(&maps[k]).unwrap().is_zero() {
                    return Err(KoszulError::NotComplex { point: x, degree: k });
                }
            }
            for k in 0..maps.len() {
                let dim = maps[k].cols();
                let next = maps.get(k + 1).map_or(0, FpMatrix::rank);
                if maps[k].rank() + next != dim {
                    return Err(KoszulError::NotExact { point: x, degree: k });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_generator() {
        let g = GridPoset::integer(&[3, 3], false).unwrap();
        let k = koszul_upset_resolution(&g, &[g.index(&[1, 1])]).unwrap();
        assert_eq!(k.length(), 0);
        assert!(k.is_minimal());
        k.check_exact(2).unwrap();
    }

    #[test]
    fn two_generators() {
        let g = GridPoset::integer(&[3, 3], false).unwrap();
        let k = koszul_upset_resolution(&g, &[g.index(&[0, 1]), g.index(&[1, 0])]).unwrap();
        assert_eq!(k.length(), 1);
        assert_eq!(k.grades(1), vec![g.index(&[1, 1])]);
        assert!(k.is_minimal());
        k.check_exact(3).unwrap();
    }

    #[test]
    fn three_generators_in_three_dimensions() {
        let g = GridPoset::integer(&[2, 2, 2], false).unwrap();
        let gens = [g.index(&[1, 0, 0]), g.index(&[0, 1, 0]), g.index(&[0, 0, 1])];
        let k = koszul_upset_resolution(&g, &gens).unwrap();
        assert!(k.is_minimal());
        assert_eq!(k.length(), 2);
        k.check_exact(5).unwrap();
        let k = koszul_upset_resolution(&g, &[gens[0], gens[0], gens[1]]).unwrap();
        assert!(!k.is_minimal());
        k.check_exact(2).unwrap();
    }
}
