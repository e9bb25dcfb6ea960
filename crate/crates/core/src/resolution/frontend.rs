//! Projectivization frontends: usual, rank exact (hooks) and limit exact (upsets).

use std::sync::Arc;

use crate::barcode::{Bar, Shape, SignedBarcode};
use crate::linalg::{FpMatrix, Kernel};
use crate::module::{PersistenceModule, Presentation};
use crate::poset::{ElemId, GridPoset, QuotientPoset};

use super::quiver::{PosetModule, ResolutionError, ResolutionResult};

fn frontend<E: std::fmt::Display>(e: E) -> ResolutionError {
    ResolutionError::Frontend(e.to_string())
}

pub fn rank_depth_guard(grid: &GridPoset) -> usize {
    2 * grid.n() + 2
}

pub fn upset_depth_guard(grid: &GridPoset) -> usize {
    grid.shape().iter().copied().max().unwrap_or(1) + 2
}

pub fn usual_depth_guard(grid: &GridPoset) -> usize {
    grid.n() + 1
}

/// All structure maps `φ_{a,b}` between grid points, indexed `[a][b]`.
fn all_maps(m: &PersistenceModule) -> Vec<Vec<Option<FpMatrix>>> {
    (0..m.grid().num_points()).map(|a| m.maps_from(a)).collect()
}

/// Coordinates of `vectors` (columns, assumed inside the kernel) in the kernel basis.
fn coords_in(kernel: &Kernel, vectors: &FpMatrix) -> FpMatrix {
    kernel.coordinates(vectors)
}

fn full_space(dim: usize, p: u32) -> Kernel {
    Kernel { basis: FpMatrix::identity(dim, p), free: (0..dim).collect() }
}

/// `Hom(L, M)` over `kP/Q`: the kernel of `φ_{a,b}` at `(a, b)`, and `M(a)` at `(a, ⊤)`.
pub fn hom_from_hooks(m: &PersistenceModule) -> Result<PosetModule, ResolutionError> {
    let grid = m.grid();
    if !grid.has_top() {
        return Err(ResolutionError::Frontend("hook frontend needs a grid with a top".into()));
    }
    let p = m.p();
    let poset = Arc::new(QuotientPoset::pairs(grid).map_err(frontend)?);
    let phi = all_maps(m);
    let spaces: Vec<Option<Kernel>> = (0..poset.len())
        .map(|e| {
            if poset.is_forbidden(e) {
                return None;
            }
            let (a, b) = poset.pair(e);
            Some(if grid.is_top(b) {
                full_space(m.dim(a), p)
            } else {
                phi[a][b].as_ref().unwrap().kernel()
            })
        })
        .collect();
    let dims: Vec<usize> = spaces.iter().map(|s| s.as_ref().map_or(0, Kernel::dim)).collect();
    let mut into = Vec::with_capacity(poset.len());
    for r in 0..poset.len() {
        let mut row = Vec::new();
        for &q in poset.lower_covers(r) {
            let mut mat = FpMatrix::zeros(dims[r], dims[q], p);
            if dims[r] > 0 && dims[q] > 0 {
                let (a, _) = poset.pair(q);
                let (c, d) = poset.pair(r);
                let sq = spaces[q].as_ref().unwrap();
                let image = phi[a][c].as_ref().unwrap().mul(&sq.basis)?;
                if !grid.is_top(d) && !phi[c][d].as_ref().unwrap().mul(&image)?.is_zero() {
                    return Err(ResolutionError::NotSubmodule { from: q, to: r });
                }
                mat = coords_in(spaces[r].as_ref().unwrap(), &image);
            }
            row.push(mat);
        }
        into.push(row);
    }
    PosetModule::new(poset, p, dims, into)
}

/// `M` itself as a module over the grid (no `⊤`, nothing forbidden).
pub fn grid_module(m: &PersistenceModule) -> Result<PosetModule, ResolutionError> {
    let grid = m.grid();
    let poset = Arc::new(QuotientPoset::grid(grid).map_err(frontend)?);
    let dims: Vec<usize> = (0..poset.len()).map(|x| m.dim(x)).collect();
    let into = (0..poset.len())
        .map(|r| {
            poset
                .lower_covers(r)
                .iter()
                .map(|&q| {
                    let k = (0..grid.n()).find(|&k| grid.step(q, k) == Some(r)).unwrap();
                    m.step(q, k).unwrap().clone()
                })
                .collect()
        })
        .collect();
    PosetModule::new(poset, m.p(), dims, into)
}

/// `Hom(U, M)` over the upset poset: the limit of `M` over each upset.
pub fn hom_from_upsets(m: &PersistenceModule) -> Result<PosetModule, ResolutionError> {
    let grid = m.grid().with_top(false);
    let poset = Arc::new(QuotientPoset::upsets(&grid).map_err(frontend)?);
    upset_module_on(m, poset)
}

/// Same as [`hom_from_upsets`] over a prebuilt upset poset of the module's grid.
pub fn upset_module_on(
    m: &PersistenceModule,
    poset: Arc<QuotientPoset>,
) -> Result<PosetModule, ResolutionError> {
    let grid = poset.grid_poset().clone();
    let p = m.p();
    let phi = all_maps(m);
    let mut spaces = Vec::with_capacity(poset.len());
    let mut offsets_all = Vec::with_capacity(poset.len());
    for e in 0..poset.len() {
        let mins = &poset.upset(e).minimal;
        let mut offsets = Vec::with_capacity(mins.len() + 1);
        let mut total = 0;
        for &u in mins {
            offsets.push(total);
            total += m.dim(u);
        }
        offsets.push(total);
        // compatibility at pairwise joins
        let mut blocks: Vec<FpMatrix> = Vec::new();
        for s in 0..mins.len() {
            for t in s + 1..mins.len() {
                let w = grid.join(mins[s], mins[t]);
                let mut blk = FpMatrix::zeros(m.dim(w), total, p);
                let fs = phi[mins[s]][w].as_ref().unwrap();
                let ft = phi[mins[t]][w].as_ref().unwrap();
                for r in 0..m.dim(w) {
                    for c in 0..fs.cols() {
                        blk.set(r, offsets[s] + c, fs.get(r, c));
                    }
                    for c in 0..ft.cols() {
                        blk.set(r, offsets[t] + c, (p - ft.get(r, c)) % p);
                    }
                }
                blocks.push(blk);
            }
        }
        let rows: usize = blocks.iter().map(FpMatrix::rows).sum();
        let mut constraint = FpMatrix::zeros(rows, total, p);
        let mut r0 = 0;
        for blk in &blocks {
            for r in 0..blk.rows() {
                for c in 0..total {
                    constraint.set(r0 + r, c, blk.get(r, c));
                }
            }
            r0 += blk.rows();
        }
        spaces.push(constraint.kernel());
        offsets_all.push(offsets);
    }
    let dims: Vec<usize> = spaces.iter().map(Kernel::dim).collect();
    let mut into = Vec::with_capacity(poset.len());
    for r in 0..poset.len() {
        let mut row = Vec::new();
        for &q in poset.lower_covers(r) {
            // q ≤ r means the upset of r sits inside the upset of q: restrict
            let mut mat = FpMatrix::zeros(dims[r], dims[q], p);
            if dims[r] > 0 && dims[q] > 0 {
                let mins_q = &poset.upset(q).minimal;
                let mins_r = &poset.upset(r).minimal;
                let total_r = *offsets_all[r].last().unwrap();
                let mut restrict = FpMatrix::zeros(total_r, *offsets_all[q].last().unwrap(), p);
                for (t, &v) in mins_r.iter().enumerate() {
                    let s = mins_q.iter().position(|&u| grid.leq(u, v)).unwrap();
                    let f = phi[mins_q[s]][v].as_ref().unwrap();
                    for rr in 0..f.rows() {
                        for cc in 0..f.cols() {
                            restrict.set(offsets_all[r][t] + rr, offsets_all[q][s] + cc, f.get(rr, cc));
                        }
                    }
                }
                let image = restrict.mul(&spaces[q].basis)?;
                mat = coords_in(&spaces[r], &image);
                if spaces[r].basis.mul(&mat)? != image {
                    return Err(ResolutionError::NotSubmodule { from: q, to: r });
                }
            }
            row.push(mat);
        }
        into.push(row);
    }
    PosetModule::new(poset, p, dims, into)
}

/// Hook bar for a pair `(a, b)` of grid elements; `b = ⊤` gives a free bar.
pub fn pair_bar(grid: &GridPoset, a: ElemId, b: ElemId) -> Bar {
    let i = grid.grade(a).expect("left end is a grid point");
    match grid.grade(b) {
        Some(j) => Bar::new(i, j),
        None => Bar::free(i),
    }
}

/// Minimal rank projective resolution, read as a degree-stratified hook barcode.
#[derive(Debug, Clone)]
pub struct RankExact {
    pub barcode: SignedBarcode,
    pub resolution: ResolutionResult,
    pub poset: Arc<QuotientPoset>,
}

pub fn rank_exact_of_module(
    m: &PersistenceModule,
    depth_guard: Option<usize>,
) -> Result<RankExact, ResolutionError> {
    let n = hom_from_hooks(m)?;
    let guard = depth_guard.unwrap_or_else(|| rank_depth_guard(m.grid()));
    let res = n.minimal_resolution(guard)?;
    let poset = n.poset().clone();
    let grid = m.grid();
    let by_degree = res
        .betti
        .iter()
        .map(|gens| {
            gens.iter()
                .map(|&e| {
                    let (a, b) = poset.pair(e);
                    pair_bar(grid, a, b)
                })
                .collect()
        })
        .collect();
    let barcode = SignedBarcode::from_degrees(grid.n(), m.p(), Shape::Hook, by_degree);
    Ok(RankExact { barcode, resolution: res, poset })
}

/// Compress grades, realize, and resolve relative to hooks.
pub fn rank_exact_decomposition(
    pres: &Presentation,
    depth_guard: Option<usize>,
) -> Result<RankExact, ResolutionError> {
    let grid = pres.compress_grades().map_err(frontend)?;
    let m = PersistenceModule::realize(pres, &grid).map_err(frontend)?;
    rank_exact_of_module(&m, depth_guard)
}

/// Usual multigraded Betti numbers, as grades per degree.
#[derive(Debug, Clone)]
pub struct UsualBetti {
    pub grades: Vec<Vec<Vec<f64>>>,
    pub resolution: ResolutionResult,
}

impl UsualBetti {
    pub fn sizes(&self) -> Vec<usize> {
        self.grades.iter().map(Vec::len).collect()
    }

    pub fn total(&self) -> usize {
        self.resolution.total()
    }
}

pub fn usual_betti(m: &PersistenceModule, depth_guard: Option<usize>) -> Result<UsualBetti, ResolutionError> {
    let n = grid_module(m)?;
    let guard = depth_guard.unwrap_or_else(|| usual_depth_guard(m.grid()));
    let res = n.minimal_resolution(guard)?;
    let grades = res
        .betti
        .iter()
        .map(|gens| gens.iter().map(|&x| m.grid().grade(x).unwrap()).collect())
        .collect();
    Ok(UsualBetti { grades, resolution: res })
}

/// Minimal presentation from the first two steps of the usual resolution.
pub fn minimal_presentation(pres: &Presentation) -> Result<Presentation, ResolutionError> {
    let grid = pres.compress_grades().map_err(frontend)?;
    let m = PersistenceModule::realize(pres, &grid).map_err(frontend)?;
    let ub = usual_betti(&m, None)?;
    let gens = ub.grades.first().cloned().unwrap_or_default();
    let relations = match (ub.grades.get(1), ub.resolution.differentials.get(1)) {
        (Some(grades), Some(cols)) => grades
            .iter()
            .zip(cols)
            .map(|(g, col)| crate::module::Relation { grade: g.clone(), column: col.clone() })
            .collect(),
        _ => Vec::new(),
    };
    Presentation::new(pres.n, pres.p, gens, relations).map_err(frontend)
}

/// Limit exact Betti numbers: upsets (by minimal grades) per degree.
#[derive(Debug, Clone)]
pub struct UpsetBetti {
    pub upsets: Vec<Vec<Vec<Vec<f64>>>>,
    pub resolution: ResolutionResult,
    pub poset: Arc<QuotientPoset>,
}

impl UpsetBetti {
    /// Projective dimension; `0` for the zero module.
    pub fn pdim(&self) -> usize {
        self.resolution.length
    }
}

pub fn upset_betti(m: &PersistenceModule, depth_guard: Option<usize>) -> Result<UpsetBetti, ResolutionError> {
    let n = hom_from_upsets(m)?;
    upset_betti_of(m, n, depth_guard)
}

pub fn upset_betti_of(
    m: &PersistenceModule,
    n: PosetModule,
    depth_guard: Option<usize>,
) -> Result<UpsetBetti, ResolutionError> {
    let guard = depth_guard.unwrap_or_else(|| upset_depth_guard(m.grid()));
    let res = n.minimal_resolution(guard)?;
    let poset = n.poset().clone();
    let grid = poset.grid_poset();
    let upsets = res
        .betti
        .iter()
        .map(|gens| {
            gens.iter()
                .map(|&e| poset.upset(e).minimal.iter().map(|&x| grid.grade(x).unwrap()).collect())
                .collect()
        })
        .collect();
    Ok(UpsetBetti { upsets, resolution: res, poset })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barcode::sort_bars;

    fn corner_interval() -> Presentation {
        Presentation::parse(
            "rkdec-presentation v1\nn=2 p=2\ngenerators 1\n0 0\nrelations 3\n0 2 ; 0:1\n1 1 ; 0:1\n2 0 ; 0:1\n",
        )
        .unwrap()
    }

    fn bars(v: &[([f64; 2], [f64; 2])]) -> Vec<Bar> {
        let mut out: Vec<Bar> = v.iter().map(|(i, j)| Bar::new(i.to_vec(), j.to_vec())).collect();
        sort_bars(&mut out);
        out
    }

    fn sorted(mut v: Vec<Bar>) -> Vec<Bar> {
        sort_bars(&mut v);
        v
    }

    #[test]
    fn corner_hom_spaces() {
        let pres = corner_interval();
        let grid = pres.compress_grades().unwrap();
        let m = PersistenceModule::realize(&pres, &grid).unwrap();
        let n = hom_from_hooks(&m).unwrap();
        n.check_relations().unwrap();
        let poset = n.poset();
        let o = grid.index(&[0, 0]);
        assert_eq!(n.dims()[poset.pair_id(o, grid.index(&[1, 1])).unwrap()], 1);
        assert_eq!(n.dims()[poset.pair_id(o, grid.index(&[0, 1])).unwrap()], 0);
        let zero = PersistenceModule::zero(grid.clone(), 2);
        assert!(hom_from_hooks(&zero).unwrap().is_zero());
    }

    #[test]
    fn corner_rank_exact() {
        let re = rank_exact_decomposition(&corner_interval(), None).unwrap();
        let sbc = &re.barcode;
        assert_eq!(
            sorted(sbc.degree(0)),
            bars(&[([0., 0.], [0., 2.]), ([0., 0.], [1., 1.]), ([0., 0.], [2., 0.])])
        );
        assert_eq!(sorted(sbc.degree(1)), bars(&[([0., 0.], [2., 1.]), ([0., 0.], [1., 2.])]));
        assert!(sbc.degree(2).is_empty());
        assert_eq!(re.resolution.length, 1);
    }

    #[test]
    fn corner_usual() {
        let pres = corner_interval();
        let grid = pres.compress_grades().unwrap();
        let m = PersistenceModule::realize(&pres, &grid).unwrap();
        let ub = usual_betti(&m, None).unwrap();
        let mut g = ub.grades.clone();
        for d in g.iter_mut() {
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        assert_eq!(
            g,
            vec![
                vec![vec![0., 0.]],
                vec![vec![0., 2.], vec![1., 1.], vec![2., 0.]],
                vec![vec![1., 2.], vec![2., 1.]],
            ]
        );
    }

    #[test]
    fn single_hook_is_relative_projective() {
        let pres = Presentation::hook(3, &[1., 0.], Some(&[2., 3.])).unwrap();
        let re = rank_exact_decomposition(&pres, None).unwrap();
        assert_eq!(re.barcode.positive, bars(&[([1., 0.], [2., 3.])]));
        assert!(re.barcode.negative.is_empty());
    }

    #[test]
    fn upset_frontend_examples() {
        let grid = GridPoset::integer(&[3, 3], false).unwrap();
        let o = grid.index(&[0, 0]);
        let i = grid.index(&[1, 1]);
        let rect = PersistenceModule::rectangle(&grid, 2, o, i).unwrap();
        let n = hom_from_upsets(&rect).unwrap();
        n.check_relations().unwrap();
        let poset = n.poset();
        let u = crate::poset::Upset::generated_by(&grid, &[grid.index(&[1, 0]), grid.index(&[0, 1])]);
        let id = poset.upset_id(&u.members).unwrap();
        assert_eq!(n.dims()[id], 1);
        let principal = crate::poset::Upset::generated_by(&grid, &[grid.index(&[0, 1])]);
        assert_eq!(n.dims()[poset.upset_id(&principal.members).unwrap()], 1);

        let ub = upset_betti(&rect, None).unwrap();
        assert_eq!(ub.pdim(), 1);
        assert_eq!(ub.upsets[0], vec![vec![vec![0., 0.]]]);
        let mut b1 = ub.upsets[1][0].clone();
        b1.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(b1, vec![vec![0., 2.], vec![2., 0.]]);

        let zero = PersistenceModule::zero(grid.clone(), 2);
        assert!(upset_betti(&zero, None).unwrap().resolution.is_zero());
        let up = PersistenceModule::interval(&grid, 2, &u.members.ones().fold(vec![false; 9], |mut v, x| {
            v[x] = true;
            v
        }))
        .unwrap();
        assert_eq!(upset_betti(&up, None).unwrap().pdim(), 0);
    }

    #[test]
    fn minimal_presentation_drops_redundancy() {
        let mut pres = corner_interval();
        pres.generators.push(vec![1., 0.]);
        pres.relations.push(crate::module::Relation { grade: vec![1., 0.], column: vec![(1, 1)] });
        let pres = Presentation::new(2, 2, pres.generators, pres.relations).unwrap();
        let min = minimal_presentation(&pres).unwrap();
        assert_eq!(min.generators.len(), 1);
        assert_eq!(min.relations.len(), 3);
    }
}
