//! Rank exactness of short exact sequences of persistence modules.

use thiserror::Error;

use crate::module::{ModuleError, ModuleMap, PersistenceModule};
use crate::poset::ElemId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error("maps do not compose to zero at point {0}")]
    NotComplex(ElemId),
    #[error("sequence is not exact at point {0}")]
    NotExact(ElemId),
}

/// `0 → a →f→ b →g→ c → 0`.
#[derive(Debug, Clone)]
pub struct ShortExactSequence {
    pub a: PersistenceModule,
    pub b: PersistenceModule,
    pub c: PersistenceModule,
    pub f: ModuleMap,
    pub g: ModuleMap,
}

impl ShortExactSequence {
    /// Naturality, `g ∘ f = 0` and pointwise exactness.
    pub fn check(&self) -> Result<(), ExactError> {
        self.f.check(&self.a, &self.b)?;
        self.g.check(&self.b, &self.c)?;
        let gf = self.g.after(&self.f)?;
        for (x, m) in gf.components.iter().enumerate() {
            if !m.is_zero() {
                return Err(ExactError::NotComplex(x));
            }
        }
        for x in 0..self.a.grid().num_points() {
            let (da, db, dc) = (self.a.dim(x), self.b.dim(x), self.c.dim(x));
            let injective = self.f.components[x].rank() == da;
            let surjective = self.g.components[x].rank() == dc;
            if !injective || !surjective || db != da + dc {
                return Err(ExactError::NotExact(x));
            }
        }
        Ok(())
    }
}

/// Whether `rk(b) = rk(a) + rk(c)` on every comparable pair.
pub fn is_rank_exact(ses: &ShortExactSequence) -> Result<bool, ExactError> {
    ses.check()?;
    let mut sum = ses.a.rank_invariant();
    sum.add_scaled(&ses.c.rank_invariant(), 1);
    Ok(sum.first_difference(&ses.b.rank_invariant()).is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::FpMatrix;
    use crate::poset::GridPoset;

    fn inclusion(src: &PersistenceModule, dst: &PersistenceModule) -> ModuleMap {
        let components = (0..src.grid().num_points())
            .map(|x| {
                let mut m = FpMatrix::zeros(dst.dim(x), src.dim(x), src.p());
                if src.dim(x) == 1 {
                    m.set(0, 0, 1);
                }
                m
            })
            .collect();
        ModuleMap { components }
    }

    fn interval(g: &GridPoset, keep: impl Fn(&[usize]) -> bool) -> PersistenceModule {
        let support: Vec<bool> = (0..g.num_points()).map(|x| keep(&g.point(x))).collect();
        PersistenceModule::interval(g, 2, &support).unwrap()
    }

    #[test]
    fn split_sequence() {
        let g = GridPoset::integer(&[3, 3], false).unwrap();
        let a = interval(&g, |q| q[0] >= 1);
        let c = interval(&g, |q| q[1] <= 1);
        let b = PersistenceModule::direct_sum(&[a.clone(), c.clone()]).unwrap();
        let f = ModuleMap {
            components: (0..g.num_points())
                .map(|x| {
                    let mut m = FpMatrix::zeros(b.dim(x), a.dim(x), 2);
                    if a.dim(x) == 1 {
                        m.set(0, 0, 1);
                    }
                    m
                })
                .collect(),
        };
        let gm = ModuleMap {
            components: (0..g.num_points())
                .map(|x| {
                    let mut m = FpMatrix::zeros(c.dim(x), b.dim(x), 2);
                    if c.dim(x) == 1 {
                        m.set(0, a.dim(x), 1);
                    }
                    m
                })
                .collect(),
        };
        let ses = ShortExactSequence { a, b, c, f, g: gm };
        assert_eq!(is_rank_exact(&ses), Ok(true));
    }

    #[test]
    fn injective_quotient_is_not_rank_exact() {
        // limit exact, but rk(P_0) = 1 on ((0,0),(2,2)) where both ends vanish
        let g = GridPoset::integer(&[3, 3], false).unwrap();
        let a = interval(&g, |q| q[0] == 2 || q[1] == 2);
        let b = interval(&g, |_| true);
        let c = interval(&g, |q| q[0] <= 1 && q[1] <= 1);
        let f = inclusion(&a, &b);
        let gm = ModuleMap {
            components: (0..g.num_points())
                .map(|x| {
                    let mut m = FpMatrix::zeros(c.dim(x), 1, 2);
                    if c.dim(x) == 1 {
                        m.set(0, 0, 1);
                    }
                    m
                })
                .collect(),
        };
        let ses = ShortExactSequence { a, b, c, f, g: gm };
        assert_eq!(is_rank_exact(&ses), Ok(false));
    }

    #[test]
    fn simple_in_square_is_not_rank_exact() {
        let g = GridPoset::integer(&[2, 2], false).unwrap();
        let a = interval(&g, |q| q == [1, 1]);
        let b = interval(&g, |_| true);
        let c = interval(&g, |q| q != [1, 1]);
        let f = inclusion(&a, &b);
        let gm = ModuleMap {
            components: (0..g.num_points())
                .map(|x| {
                    let mut m = FpMatrix::zeros(c.dim(x), 1, 2);
                    if c.dim(x) == 1 {
                        m.set(0, 0, 1);
                    }
                    m
                })
                .collect(),
        };
        let ses = ShortExactSequence { a, b, c, f, g: gm };
        assert_eq!(is_rank_exact(&ses), Ok(false));
    }

    #[test]
    fn rejects_non_exact() {
        let g = GridPoset::integer(&[2, 2], false).unwrap();
        let a = interval(&g, |q| q == [1, 1]);
        let b = interval(&g, |_| true);
        let f = inclusion(&a, &b);
        let ses = ShortExactSequence { a: a.clone(), b: b.clone(), c: b.clone(), f, g: inclusion(&b, &b) };
        assert!(matches!(is_rank_exact(&ses), Err(ExactError::NotComplex(_))));
    }
}
