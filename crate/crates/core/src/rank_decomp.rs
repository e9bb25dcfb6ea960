//! Minimal rank decompositions by hooks and by right-open rectangles.

use thiserror::Error;

use crate::barcode::{Bar, Shape, SignedBarcode};
use crate::module::RankInvariant;
use crate::poset::{ElemId, GridPoset};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecompError {
    #[error("rank identity fails at grades {x:?} -> {y:?}: barcode gives {got}, module has {want}")]
    Identity { x: Vec<f64>, y: Vec<f64>, got: i64, want: i64 },
}

fn push_bars(sbc: &mut SignedBarcode, bar: Bar, mult: i64) {
    let side = if mult > 0 { &mut sbc.positive } else { &mut sbc.negative };
    for _ in 0..mult.unsigned_abs() {
        side.push(bar.clone());
    }
}

/// Check `Σ± rk(bar) = rk` on every comparable pair of grid points.
pub fn verify_rank_decomposition(sbc: &SignedBarcode, rk: &RankInvariant) -> Result<(), DecompError> {
    let grid = rk.grid();
    let grades: Vec<Vec<f64>> = (0..grid.num_points()).map(|x| grid.grade(x).unwrap()).collect();
    for (a, b) in rk.pairs() {
        let want = rk.get(a, b).unwrap();
        let got = sbc.rank(&grades[a], &grades[b]);
        if got != want {
            return Err(DecompError::Identity { x: grades[a].clone(), y: grades[b].clone(), got, want });
        }
    }
    Ok(())
}

/// Hooks `L_{i,j}`, `i < j` in the grid with `⊤`, whose signed rank functions sum to `rk`.
///
/// With `N(a,b) = rk(a,a) − rk(a,b)` and `N(a,⊤) = rk(a,a)`, the multiplicities
/// satisfy `N(a,b) = Σ m(i,j)` over `i ≤ a`, `j ≤ b`, `j ≰ a`, a unitriangular
/// system solved in order of increasing height.
pub fn mrd_hooks(rk: &RankInvariant, p: u32) -> Result<SignedBarcode, DecompError> {
    let grid = rk.grid().with_top(true);
    let top = grid.top().unwrap();
    let np = grid.num_points();
    let mut unknowns: Vec<(ElemId, ElemId)> = Vec::new();
    for a in 0..np {
        for b in 0..=np {
            if a != b && grid.leq(a, b) {
                unknowns.push((a, b));
            }
        }
    }
    unknowns.sort_by_key(|&(a, b)| (grid.height(a) + grid.height(b), a, b));
    let mut found: Vec<(ElemId, ElemId, i64)> = Vec::new();
    for &(a, b) in &unknowns {
        let daa = rk.get(a, a).unwrap();
        let n_ab = if b == top { daa } else { daa - rk.get(a, b).unwrap() };
        let below: i64 = found
            .iter()
            .filter(|&&(i, j, _)| grid.leq(i, a) && grid.leq(j, b) && !grid.leq(j, a))
            .map(|&(_, _, m)| m)
            .sum();
        let m = n_ab - below;
        if m != 0 {
            found.push((a, b, m));
        }
    }
    let mut sbc = SignedBarcode::empty(grid.n(), p, Shape::Hook);
    for (a, b, m) in found {
        let i = grid.grade(a).unwrap();
        let bar = if b == top { Bar::free(i) } else { Bar::new(i, grid.grade(b).unwrap()) };
        push_bars(&mut sbc, bar, m);
    }
    verify_rank_decomposition(&sbc, rk)?;
    Ok(sbc)
}

/// Right end of the closed grid rectangle ending at `c`, as a right-open end in grades.
fn open_end(grid: &GridPoset, c: ElemId) -> Vec<f64> {
    (0..grid.n())
        .map(|k| {
            let idx = grid.axis_index(c, k) + 1;
            grid.axis_coords(k).get(idx).copied().unwrap_or(f64::INFINITY)
        })
        .collect()
}

/// Right-open rectangles whose signed rank functions sum to `rk`, by Möbius
/// inversion over closed grid rectangles `[a, c]`.
pub fn mrd_rectangles(rk: &RankInvariant, p: u32) -> Result<SignedBarcode, DecompError> {
    let grid = rk.grid();
    let n = grid.n();
    let mut sbc = SignedBarcode::empty(n, p, Shape::Rectangle);
    let shift = |x: ElemId, set: usize, up: bool| -> Option<ElemId> {
        let mut y = x;
        for k in 0..n {
            if set >> k & 1 == 1 {
                y = if up { grid.step(y, k)? } else { grid.step_down(y, k)? };
            }
        }
        Some(y)
    };
    for (a, c) in rk.pairs() {
        let mut m = 0i64;
        for s in 0..1usize << n {
            let Some(a2) = shift(a, s, false) else { continue };
            for t in 0..1usize << n {
                let Some(c2) = shift(c, t, true) else { continue };
                let sign = if (s.count_ones() + t.count_ones()) % 2 == 0 { 1 } else { -1 };
                m += sign * rk.get(a2, c2).unwrap();
            }
        }
        if m != 0 {
            push_bars(&mut sbc, Bar::new(grid.grade(a).unwrap(), open_end(grid, c)), m);
        }
    }
    verify_rank_decomposition(&sbc, rk)?;
    Ok(sbc)
}

/// Rectangles of a hook `L_{i,j}` by inclusion–exclusion over the maximal
/// rectangles `[i, (∞, …, j_k, …, ∞))` covering its support.
pub fn mrd_rect_of_hook(bar: &Bar, p: u32) -> SignedBarcode {
    let n = bar.n();
    let mut sbc = SignedBarcode::empty(n, p, Shape::Rectangle);
    if bar.j_is_top() {
        sbc.positive.push(Bar::new(bar.i.clone(), vec![f64::INFINITY; n]));
        return sbc;
    }
    let axes: Vec<usize> = (0..n).filter(|&k| bar.i[k] < bar.j[k]).collect();
    for s in 1..1usize << axes.len() {
        let mut end = vec![f64::INFINITY; n];
        for (t, &k) in axes.iter().enumerate() {
            if s >> t & 1 == 1 {
                end[k] = bar.j[k];
            }
        }
        let r = Bar::new(bar.i.clone(), end);
        if s.count_ones() % 2 == 1 {
            sbc.positive.push(r);
        } else {
            sbc.negative.push(r);
        }
    }
    sbc
}

/// Rectangle barcode of a hook barcode, bar by bar, with cancellation.
pub fn rect_of_hook_barcode(sbc: &SignedBarcode) -> SignedBarcode {
    let mut out = SignedBarcode::empty(sbc.n, sbc.p, Shape::Rectangle);
    for (bars, sign) in [(&sbc.positive, true), (&sbc.negative, false)] {
        for b in bars {
            let r = mrd_rect_of_hook(b, sbc.p);
            let (pos, neg) = if sign { (r.positive, r.negative) } else { (r.negative, r.positive) };
            out.positive.extend(pos);
            out.negative.extend(neg);
        }
    }
    out.cancelled()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::{PersistenceModule, Presentation};

    fn realize(pres: &Presentation) -> PersistenceModule {
        PersistenceModule::realize(pres, &pres.compress_grades().unwrap()).unwrap()
    }

    #[test]
    fn single_hook_and_rectangle() {
        let h = Presentation::hook(2, &[0., 1.], Some(&[2., 3.])).unwrap();
        let m = realize(&h);
        let sbc = mrd_hooks(&m.rank_invariant(), 2).unwrap();
        assert_eq!(sbc.positive, vec![Bar::new(vec![0., 1.], vec![2., 3.])]);
        assert!(sbc.negative.is_empty());

        let r = Presentation::rectangle(2, &[0., 1.], &[Some(2.), None]).unwrap();
        let m = realize(&r);
        let sbc = mrd_rectangles(&m.rank_invariant(), 2).unwrap();
        assert_eq!(sbc.positive, vec![Bar::new(vec![0., 1.], vec![2., f64::INFINITY])]);
        assert!(sbc.negative.is_empty());
    }

    #[test]
    fn rect_of_hook_examples() {
        let s = mrd_rect_of_hook(&Bar::new(vec![0., 0.], vec![1., 1.]), 2);
        assert_eq!(s.positive.len(), 2);
        assert_eq!(s.negative, vec![Bar::new(vec![0., 0.], vec![1., 1.])]);
        let s = mrd_rect_of_hook(&Bar::free(vec![0., 0.]), 2);
        assert_eq!(s.num_bars(), 1);
        let s = mrd_rect_of_hook(&Bar::new(vec![0., 3.], vec![1., 1.]), 2);
        assert_eq!(s.positive, vec![Bar::new(vec![0., 3.], vec![1., f64::INFINITY])]);
        assert!(s.negative.is_empty());
    }

    #[test]
    fn verification_rejects_perturbation() {
        let pres = Presentation::parse(
            "rkdec-presentation v1\nn=2 p=2\ngenerators 1\n0 0\nrelations 3\n0 2 ; 0:1\n1 1 ; 0:1\n2 0 ; 0:1\n",
        )
        .unwrap();
        let rk = realize(&pres).rank_invariant();
        let mut sbc = mrd_hooks(&rk, 2).unwrap();
        assert_eq!(sbc.positive.len(), 3);
        assert_eq!(sbc.negative.len(), 2);
        sbc.negative.pop();
        assert!(verify_rank_decomposition(&sbc, &rk).is_err());
        let rects = mrd_rectangles(&rk, 2).unwrap();
        assert!(rects.is_disjoint());
    }
}
