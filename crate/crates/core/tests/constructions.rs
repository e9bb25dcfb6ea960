use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rkdec_core::barcode::{Bar, Shape};
use rkdec_core::metric::{bottleneck, distance, to_zero, TOLERANCE};
use rkdec_core::module::PersistenceModule;
use rkdec_core::poset::{GridPoset, Upset};
use rkdec_core::rank_decomp::mrd_rectangles;
use rkdec_core::repro::{random_hook, random_rectangle, run_experiment, staircase, staircase_sizes, ReproConfig};
use rkdec_core::resolution::{
    koszul_upset_resolution, rank_gldim_witness, upset_betti, upset_gldim_witness, usual_betti,
};

/// Smallest `ε` over all partial matchings, by enumeration.
fn brute_bottleneck(shape: Shape, left: &[Bar], right: &[Bar]) -> f64 {
    fn go(shape: Shape, l: &[Bar], right: &[Bar], used: &mut Vec<bool>, acc: f64) -> f64 {
        let Some((x, rest)) = l.split_first() else {
            return right
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(y, _)| to_zero(shape, y))
                .fold(acc, f64::max);
        };
        let mut best = go(shape, rest, right, used, acc.max(to_zero(shape, x)));
        for k in 0..right.len() {
            if !used[k] {
                used[k] = true;
                best = best.min(go(shape, rest, right, used, acc.max(distance(shape, x, &right[k]))));
                used[k] = false;
            }
        }
        best
    }
    go(shape, left, right, &mut vec![false; right.len()], 0.0)
}

#[test]
fn bottleneck_agrees_with_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for round in 0..400 {
        let shape = if round % 2 == 0 { Shape::Hook } else { Shape::Rectangle };
        let bar = |rng: &mut ChaCha8Rng| match shape {
            Shape::Hook => random_hook(rng, 2, 5),
            Shape::Rectangle => random_rectangle(rng, 2, 5),
        };
        let left: Vec<Bar> = (0..rng.gen_range(0..5)).map(|_| bar(&mut rng)).collect();
        let right: Vec<Bar> = (0..rng.gen_range(0..5)).map(|_| bar(&mut rng)).collect();
        let fast = bottleneck(shape, &left, &right);
        let slow = brute_bottleneck(shape, &left, &right);
        assert!((fast.epsilon - slow).abs() <= TOLERANCE || fast.epsilon == slow, "{left:?} {right:?}");
        assert!(fast.realized_cost() <= fast.epsilon + TOLERANCE);
    }
}

#[test]
fn witnesses_attain_the_global_dimension() {
    let w = rank_gldim_witness(2, 4, 3).unwrap();
    assert_eq!(w.pdim, 2);
    for m in 3..=4 {
        let w = upset_gldim_witness(m, 2).unwrap();
        assert_eq!(w.pdim, m - 2, "m={m}");
    }
}

#[test]
fn koszul_matches_the_resolution_engine() {
    let grid = GridPoset::integer(&[6, 6], false).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..60 {
        let m = rng.gen_range(1..=5);
        let gens: Vec<usize> = (0..m).map(|_| rng.gen_range(0..grid.num_points())).collect();
        let k = koszul_upset_resolution(&grid, &gens).unwrap();
        k.check_exact(3).unwrap();
        if k.is_minimal() {
            let u = Upset::generated_by(&grid, &gens);
            let support: Vec<bool> = (0..grid.num_points()).map(|x| u.contains(x)).collect();
            let module = PersistenceModule::interval(&grid, 3, &support).unwrap();
            assert_eq!(usual_betti(&module, None).unwrap().resolution.length, k.length());
        }
    }
}

#[test]
fn staircase_counts() {
    let want = [(2, 8, 15, 9, 3), (3, 12, 35, 25, 5), (4, 16, 63, 49, 7)];
    for (k, b, b_rk, b_rect, upset_b) in want {
        let s = staircase_sizes(k, 2, None).unwrap();
        assert_eq!((s.b, s.b_rk, s.b_rect, s.upset_b), (b, b_rk, b_rect, upset_b), "k={k}");
    }
}

#[test]
fn staircase_rectangles_for_three_steps() {
    let pres = staircase(3, 2);
    let m = PersistenceModule::realize(&pres, &pres.compress_grades().unwrap()).unwrap();
    let rect = mrd_rectangles(&m.rank_invariant(), 2).unwrap().sorted();
    // every rectangle [g_a, c_b) with a <= b is positive, and the overlaps
    // of consecutive ones are negative
    let g = |a: usize| vec![a as f64 - 1., 3. - a as f64];
    let c = |b: usize| vec![3. + b as f64, 7. - b as f64];
    let rect_at = |i: Vec<f64>, j: Vec<f64>| Bar::new(i, j);
    assert_eq!(rect.positive.len() + rect.negative.len(), 25);
    for a in 1..=3 {
        for b in 1..=3 {
            let bar = rect_at(g(a), c(b));
            assert!(rect.positive.contains(&bar), "missing [g{a}, c{b})");
        }
    }
    assert_eq!(rect.positive.len(), 13);
    assert_eq!(rect.negative.len(), 12);
}

#[test]
fn injective_rectangle_has_upset_pdim_one() {
    let grid = GridPoset::integer(&[3, 3], false).unwrap();
    let inj = PersistenceModule::rectangle(&grid, 2, 0, grid.index(&[1, 1])).unwrap();
    assert_eq!(upset_betti(&inj, None).unwrap().pdim(), 1);
}

#[test]
fn reports_are_deterministic() {
    let cfg = ReproConfig { seed: 17, instances: Some(12), ..ReproConfig::default() };
    for name in ["stability-sweep", "gldim-upset", "koszul"] {
        let a = run_experiment(name, &cfg).unwrap().to_json();
        let b = run_experiment(name, &cfg).unwrap().to_json();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn out_of_range_parameters_are_rejected() {
    let cfg = ReproConfig { ks: Some(vec![0]), ..ReproConfig::default() };
    assert!(run_experiment("staircase", &cfg).is_err());
    assert!(run_experiment("instability", &cfg).is_err());
    assert!(run_experiment("nope", &ReproConfig::default()).is_err());
}
