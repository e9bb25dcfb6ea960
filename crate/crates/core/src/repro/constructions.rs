//! Named modules and random generators.

use rand::Rng;

use crate::barcode::Bar;
use crate::module::{ModuleError, PersistenceModule, Presentation, RankInvariant, Relation};
use crate::poset::{GridPoset, PosetError};

fn rel(grade: &[f64], column: &[(usize, u32)]) -> Relation {
    Relation { grade: grade.to_vec(), column: column.to_vec() }
}

/// `k_I` with `I = [0,2)×[0,1) ∪ [0,1)×[0,2)`.
pub fn corner_interval(p: u32) -> Presentation {
    let rels = vec![rel(&[0., 2.], &[(0, 1)]), rel(&[1., 1.], &[(0, 1)]), rel(&[2., 0.], &[(0, 1)])];
    Presentation::new(2, p, vec![vec![0., 0.]], rels).expect("valid")
}

/// The square `[0,5)²` and the interval `[0,5)×[0,4) ∪ [0,4)×[0,5)`, which
/// are 1-interleaved.
pub fn interleaved_pair(p: u32) -> (Presentation, Presentation) {
    let m = Presentation::rectangle(p, &[0., 0.], &[Some(5.), Some(5.)]).expect("valid");
    let rels = vec![rel(&[5., 0.], &[(0, 1)]), rel(&[4., 4.], &[(0, 1)]), rel(&[0., 5.], &[(0, 1)])];
    let n = Presentation::new(2, p, vec![vec![0., 0.]], rels).expect("valid");
    (m, n)
}

/// `k` on `[0,b)×[0,a) ∪ [0,a)×[0,b)`, for `a < b`.
pub fn l_shape(p: u32, a: f64, b: f64) -> Presentation {
    let rels = vec![rel(&[b, 0.], &[(0, 1)]), rel(&[a, a], &[(0, 1)]), rel(&[0., b], &[(0, 1)])];
    Presentation::new(2, p, vec![vec![0., 0.]], rels).expect("valid")
}

/// `k` on `[0,c)²`.
pub fn square(p: u32, c: f64) -> Presentation {
    Presentation::rectangle(p, &[0., 0.], &[Some(c), Some(c)]).expect("valid")
}

/// Support of [`l_shape`] at a grade.
pub fn in_l_shape(x: &[f64], a: f64, b: f64) -> bool {
    (x[0] < b && x[1] < a) || (x[0] < a && x[1] < b)
}

/// Support of [`square`] at a grade.
pub fn in_square(x: &[f64], c: f64) -> bool {
    x[0] < c && x[1] < c
}

/// Two interval-decomposable modules that are `ε/2`-interleaved, with
/// `ε = 1/(k+1)`: `A = ⊕_i M_{a_i,b} ⊕ T_{a_i}` and `B = ⊕_i M_{a_i,b} ⊕ T_{a_{i+1}}`
/// where `a_i = a + iε`, `i = 0..=k`, `a = 2`, `b = 10`.
#[derive(Debug, Clone)]
pub struct InstabilityPair {
    pub k: usize,
    pub epsilon: f64,
    pub grid: GridPoset,
    pub rank_a: RankInvariant,
    pub rank_b: RankInvariant,
}

pub const INSTABILITY_A: f64 = 2.0;
pub const INSTABILITY_B: f64 = 10.0;

/// `a + iε` computed from integers so equal grades compare equal.
fn instability_grade(k: usize, i: usize) -> f64 {
    let a = INSTABILITY_A as usize;
    (a * (k + 1) + i) as f64 / (k + 1) as f64
}

pub fn instability_pair(k: usize) -> Result<InstabilityPair, PosetError> {
    let b = INSTABILITY_B;
    let mut coords = vec![0.0];
    coords.extend((0..=k + 1).map(|i| instability_grade(k, i)));
    coords.push(b);
    let grid = GridPoset::build(vec![coords.clone(), coords], false)?;
    let grades: Vec<Vec<f64>> = (0..grid.num_points()).map(|x| grid.grade(x).unwrap()).collect();
    let support = |f: &dyn Fn(&[f64]) -> bool| -> Vec<bool> { grades.iter().map(|g| f(g)).collect() };
    let mut rank_a = RankInvariant::zero(&grid);
    let mut rank_b = RankInvariant::zero(&grid);
    for i in 0..=k {
        let ai = instability_grade(k, i);
        let next = instability_grade(k, i + 1);
        let l = support(&|x| in_l_shape(x, ai, b));
        rank_a.add_interval(&l);
        rank_b.add_interval(&l);
        rank_a.add_interval(&support(&|x| in_square(x, ai)));
        rank_b.add_interval(&support(&|x| in_square(x, next)));
    }
    Ok(InstabilityPair { k, epsilon: 1.0 / (k + 1) as f64, grid, rank_a, rank_b })
}

/// Generators `g_i = (i−1, k−i)` and cogenerators `c_i = (k+i, 2k+1−i)`, `i = 1..=k`.
pub fn staircase_points(k: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let kf = k as f64;
    let g = (1..=k).map(|i| vec![i as f64 - 1., kf - i as f64]).collect();
    let c = (1..=k).map(|i| vec![kf + i as f64, 2. * kf + 1. - i as f64]).collect();
    (g, c)
}

fn join(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x.max(*y)).collect()
}

fn meet(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x.min(*y)).collect()
}

/// The upset generated by the staircase generators.
pub fn staircase_upset(k: usize, p: u32) -> Presentation {
    let (g, _) = staircase_points(k);
    let rels = (0..k.saturating_sub(1))
        .map(|a| rel(&join(&g[a], &g[a + 1]), &[(a, 1), (a + 1, p - 1)]))
        .collect();
    Presentation::new(2, p, g, rels).expect("valid")
}

/// `k_I` for `I = ∪_{a,b} [g_a, c_b)`: the staircase upset modulo the upset
/// generated by the inner corners of the cogenerators and two outer corners.
pub fn staircase(k: usize, p: u32) -> Presentation {
    let (g, c) = staircase_points(k);
    let base = staircase_upset(k, p);
    let mut corners = vec![vec![g[0][0], c[0][1]]];
    corners.extend((0..k - 1).map(|b| meet(&c[b], &c[b + 1])));
    corners.push(vec![c[k - 1][0], g[k - 1][1]]);
    let mut rels = base.relations;
    for corner in corners {
        let a = g.iter().position(|ga| ga.iter().zip(&corner).all(|(x, y)| x <= y)).expect("corner above a generator");
        rels.push(rel(&corner, &[(a, 1)]));
    }
    Presentation::new(2, p, g, rels).expect("valid")
}

/// Whether `x` lies in the staircase interval.
pub fn in_staircase(k: usize, x: &[f64]) -> bool {
    let (g, c) = staircase_points(k);
    let above = g.iter().any(|ga| ga.iter().zip(x).all(|(a, v)| a <= v));
    let below = c.iter().any(|cb| cb.iter().zip(x).all(|(b, v)| v < b));
    above && below
}

/// Random presentation with integer grades in `[0, shape_k)`: each relation
/// picks a generator, a grade above it, and random coefficients on the
/// generators below that grade.
pub fn random_presentation<R: Rng>(
    rng: &mut R,
    shape: &[usize],
    generators: usize,
    relations: usize,
    p: u32,
) -> Presentation {
    let n = shape.len();
    let point = |rng: &mut R| -> Vec<f64> { shape.iter().map(|&s| rng.gen_range(0..s) as f64).collect() };
    let gens: Vec<Vec<f64>> = (0..generators).map(|_| point(rng)).collect();
    let mut rels = Vec::with_capacity(relations);
    for _ in 0..relations {
        let s = rng.gen_range(0..generators);
        let grade = join(&gens[s], &point(rng));
        let mut column = vec![(s, rng.gen_range(1..p))];
        for (t, gt) in gens.iter().enumerate() {
            if t != s && gt.iter().zip(&grade).all(|(a, b)| a <= b) && rng.gen_bool(0.5) {
                column.push((t, rng.gen_range(0..p)));
            }
        }
        rels.push(Relation { grade, column });
    }
    Presentation::new(n, p, gens, rels).expect("relations dominate their columns")
}

/// A random presentation with 1 to 4 generators and up to one more than
/// twice as many relations, realized on the integer grid of `shape` (with `⊤` when asked).
pub fn random_module<R: Rng>(
    rng: &mut R,
    shape: &[usize],
    p: u32,
    with_top: bool,
) -> Result<(Presentation, PersistenceModule), ModuleError> {
    let g = rng.gen_range(1..=4);
    let r = rng.gen_range(0..=2 * g + 1);
    let pres = random_presentation(rng, shape, g, r, p);
    let grid = GridPoset::integer(shape, with_top)?;
    let m = PersistenceModule::realize(&pres, &grid)?;
    Ok((pres, m))
}

/// A random hook with integer ends in `[0, side)`; `j` is `⊤` one time in four.
pub fn random_hook<R: Rng>(rng: &mut R, n: usize, side: usize) -> Bar {
    let i: Vec<f64> = (0..n).map(|_| rng.gen_range(0..side) as f64).collect();
    if rng.gen_range(0..4) == 0 {
        return Bar::free(i);
    }
    loop {
        let j: Vec<f64> = i.iter().map(|&a| a + rng.gen_range(0..side) as f64).collect();
        if j != i {
            return Bar::new(i, j);
        }
    }
}

/// A random right-open rectangle with integer corners; coordinates of `j`
/// are infinite one time in four.
pub fn random_rectangle<R: Rng>(rng: &mut R, n: usize, side: usize) -> Bar {
    let i: Vec<f64> = (0..n).map(|_| rng.gen_range(0..side) as f64).collect();
    let j = i
        .iter()
        .map(|&a| if rng.gen_range(0..4) == 0 { f64::INFINITY } else { a + rng.gen_range(1..=side) as f64 })
        .collect();
    Bar::new(i, j)
}

/// Presentation of a hook bar.
pub fn hook_presentation(bar: &Bar, p: u32) -> Presentation {
    let j = (!bar.j_is_top()).then_some(bar.j.as_slice());
    Presentation::hook(p, &bar.i, j).expect("valid hook")
}
