//! Modules attaining the global dimension of the rank exact and limit exact
//! structures on finite grids.
//!
//! Both constructions resolve a simple module over the projectivized algebra,
//! realize the first differential `X_1 → X_0` as a map between sums of
//! interval modules, and return its kernel, whose relative projective
//! dimension is two less than that of the simple.

use std::sync::Arc;

use crate::linalg::FpMatrix;
use crate::module::{ModuleMap, PersistenceModule};
use crate::poset::{GridPoset, QuotientPoset, Upset};

use super::frontend::{rank_depth_guard, rank_exact_of_module, upset_betti, upset_depth_guard};
use super::quiver::{PosetModule, ResolutionError};

#[derive(Debug, Clone)]
pub struct Witness {
    pub module: PersistenceModule,
    /// Projective dimension of the simple over the projectivized algebra.
    pub simple_pdim: usize,
    /// Relative projective dimension of `module`.
    pub pdim: usize,
}

fn frontend<E: std::fmt::Display>(e: E) -> ResolutionError {
    ResolutionError::Frontend(e.to_string())
}

/// `⊕ X_1 → ⊕ X_0` where `diff[j]` lists coefficients of summand `j` of `X_1`
/// on summands of `X_0`, each realized as the canonical map between interval
/// modules (identity where both supports meet).
fn realize_differential(
    x0: &[PersistenceModule],
    x1: &[PersistenceModule],
    diff: &[Vec<(usize, u32)>],
) -> Result<(PersistenceModule, ModuleMap), ResolutionError> {
    let source = PersistenceModule::direct_sum(x1).map_err(frontend)?;
    let target = PersistenceModule::direct_sum(x0).map_err(frontend)?;
    let grid = source.grid();
    let p = source.p();
    let mut components = Vec::with_capacity(grid.num_points());
    for x in 0..grid.num_points() {
        let row_of: Vec<Option<usize>> = x0
            .iter()
            .scan(0, |next, m| {
                let here = (m.dim(x) == 1).then_some(*next);
                *next += m.dim(x);
                Some(here)
            })
            .collect();
        let mut mat = FpMatrix::zeros(target.dim(x), source.dim(x), p);
        let mut col = 0;
        for (j, m) in x1.iter().enumerate() {
            if m.dim(x) == 0 {
                continue;
            }
            for &(i, v) in &diff[j] {
                if let Some(r) = row_of[i] {
                    mat.set(r, col, v);
                }
            }
            col += 1;
        }
        components.push(mat);
    }
    let map = ModuleMap { components };
    map.check(&source, &target).map_err(frontend)?;
    Ok((source, map))
}

/// Kernel of a realized `X_1 → X_0` on `[m]^n` whose rank exact projective
/// dimension is `2n − 2`. Requires `n ≥ 2` and `m ≥ 3`.
pub fn rank_gldim_witness(n: usize, m: usize, p: u32) -> Result<Witness, ResolutionError> {
    if n < 2 || m < 3 {
        return Err(ResolutionError::Frontend(format!("witness needs n >= 2 and m >= 3, got n={n}, m={m}")));
    }
    let grid = GridPoset::integer(&vec![m; n], true).map_err(frontend)?;
    let poset = Arc::new(QuotientPoset::pairs(&grid).map_err(frontend)?);
    let zero = grid.index(&vec![0; n]);
    let one = grid.index(&vec![1; n]);
    let at = poset.pair_id(zero, one).expect("(0, 1) is a pair");
    let simple = PosetModule::simple(poset.clone(), p, at)?;
    let res = simple.minimal_resolution(rank_depth_guard(&grid))?;
    let hook = |e: usize| {
        let (a, b) = poset.pair(e);
        PersistenceModule::hook(&grid, p, a, b).map_err(frontend)
    };
    let x0: Vec<_> = res.betti[0].iter().map(|&e| hook(e)).collect::<Result<_, _>>()?;
    let x1: Vec<_> = res.betti[1].iter().map(|&e| hook(e)).collect::<Result<_, _>>()?;
    let (source, map) = realize_differential(&x0, &x1, &res.differentials[1])?;
    let module = map.kernel(&source).map_err(frontend)?;
    let pdim = rank_exact_of_module(&module, None)?.resolution.length;
    Ok(Witness { module, simple_pdim: res.length, pdim })
}

/// Kernel of a realized `X_1 → X_0` on `[m]²` whose limit exact projective
/// dimension is `m − 2`, from the upset generated by the antidiagonal
/// `a + b = m − 1`. Requires `m ≥ 3`.
pub fn upset_gldim_witness(m: usize, p: u32) -> Result<Witness, ResolutionError> {
    if m < 3 {
        return Err(ResolutionError::Frontend(format!("witness needs m >= 3, got m={m}")));
    }
    let grid = GridPoset::integer(&[m, m], false).map_err(frontend)?;
    let poset = Arc::new(QuotientPoset::upsets(&grid).map_err(frontend)?);
    let antidiagonal: Vec<usize> = (0..m).map(|a| grid.index(&[a, m - 1 - a])).collect();
    let v = Upset::generated_by(&grid, &antidiagonal);
    let at = poset.upset_id(&v.members).expect("generated upset is enumerated");
    let simple = PosetModule::simple(poset.clone(), p, at)?;
    let res = simple.minimal_resolution(upset_depth_guard(&grid))?;
    let upset_module = |e: usize| {
        let u = poset.upset(e);
        let support: Vec<bool> = (0..grid.num_points()).map(|x| u.contains(x)).collect();
        PersistenceModule::interval(&grid, p, &support).map_err(frontend)
    };
    let x0: Vec<_> = res.betti[0].iter().map(|&e| upset_module(e)).collect::<Result<_, _>>()?;
    let x1: Vec<_> = res.betti[1].iter().map(|&e| upset_module(e)).collect::<Result<_, _>>()?;
    let (source, map) = realize_differential(&x0, &x1, &res.differentials[1])?;
    let module = map.kernel(&source).map_err(frontend)?;
    let pdim = upset_betti(&module, None)?.pdim();
    Ok(Witness { module, simple_pdim: res.length, pdim })
}
