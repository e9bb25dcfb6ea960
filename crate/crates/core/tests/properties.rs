use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rkdec_core::barcode::{Bar, Shape};
use rkdec_core::linalg::FpMatrix;
use rkdec_core::metric::{bottleneck, distance, hook_distance, rect_distance, to_zero};
use rkdec_core::rank_decomp::{mrd_hooks, mrd_rect_of_hook, mrd_rectangles, verify_rank_decomposition};
use rkdec_core::repro::{hilbert_identity_holds, random_hook, random_module, random_presentation, random_rectangle};
use rkdec_core::resolution::{
    minimal_presentation, rank_exact_decomposition, rank_exact_of_module, upset_betti, usual_betti,
};

fn prime() -> impl Strategy<Value = u32> {
    prop_oneof![Just(2u32), Just(3u32)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rank_exact_barcode_reproduces_rank(seed in any::<u64>(), p in prime(), cube in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape: &[usize] = if cube { &[3, 3, 3] } else { &[4, 4] };
        let (_, m) = random_module(&mut rng, shape, p, true).unwrap();
        let rk = rank_exact_of_module(&m, None).unwrap();
        verify_rank_decomposition(&rk.barcode, &m.rank_invariant()).unwrap();
        prop_assert!(rk.resolution.length <= 2 * shape.len() - 2);
        let ub = usual_betti(&m, None).unwrap();
        prop_assert!(hilbert_identity_holds(&ub, &m));
        prop_assert!(ub.resolution.length <= shape.len());
    }

    #[test]
    fn minimal_rank_decompositions(seed in any::<u64>(), p in prime()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, m) = random_module(&mut rng, &[4, 4], p, true).unwrap();
        let rk = m.rank_invariant();
        for sbc in [mrd_hooks(&rk, p).unwrap(), mrd_rectangles(&rk, p).unwrap()] {
            verify_rank_decomposition(&sbc, &rk).unwrap();
            prop_assert!(sbc.is_disjoint());
        }
        // the minimal hook decomposition is the cancelled rank exact one
        let exact = rank_exact_of_module(&m, None).unwrap().barcode.cancelled().sorted();
        let hooks = mrd_hooks(&rk, p).unwrap().sorted();
        prop_assert_eq!(exact.positive, hooks.positive);
        prop_assert_eq!(exact.negative, hooks.negative);
    }

    #[test]
    fn grade_grid_does_not_matter(seed in any::<u64>(), p in prime()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = rng.gen_range(1..=4);
        let r = rng.gen_range(0..=2 * g + 1);
        let pres = random_presentation(&mut rng, &[4, 4], g, r, p);
        let min = minimal_presentation(&pres).unwrap();
        let a = rank_exact_decomposition(&pres, None).unwrap().barcode.sorted();
        let b = rank_exact_decomposition(&min, None).unwrap().barcode.sorted();
        prop_assert_eq!(a.positive, b.positive);
        prop_assert_eq!(a.negative, b.negative);
    }

    #[test]
    fn upset_depth_bound(seed in any::<u64>(), m in 3usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, module) = random_module(&mut rng, &[m, m], 2, false).unwrap();
        prop_assert!(upset_betti(&module, None).unwrap().pdim() <= m - 2);
    }

    #[test]
    fn triangle_inequality(seed in any::<u64>(), rect in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = if rect { Shape::Rectangle } else { Shape::Hook };
        for _ in 0..50 {
            let n = rng.gen_range(1..=3);
            let bar = |rng: &mut ChaCha8Rng| if rect { random_rectangle(rng, n, 6) } else { random_hook(rng, n, 6) };
            let (x, y, z) = (bar(&mut rng), bar(&mut rng), bar(&mut rng));
            let tol = 1e-9;
            prop_assert!(distance(shape, &x, &z) <= distance(shape, &x, &y) + distance(shape, &y, &z) + tol);
            prop_assert!(to_zero(shape, &x) <= distance(shape, &x, &y) + to_zero(shape, &y) + tol);
            prop_assert_eq!(distance(shape, &x, &y), distance(shape, &y, &x));
            prop_assert_eq!(distance(shape, &x, &x), 0.0);
        }
    }

    #[test]
    fn hook_matchings_transfer_to_rectangles(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let finite = |rng: &mut ChaCha8Rng| {
            let i: Vec<f64> = (0..2).map(|_| rng.gen_range(0..6) as f64).collect();
            let j: Vec<f64> = i.iter().map(|a| a + rng.gen_range(1..6) as f64).collect();
            Bar::new(i, j)
        };
        let left: Vec<Bar> = (0..rng.gen_range(0..5)).map(|_| finite(&mut rng)).collect();
        let right: Vec<Bar> = (0..rng.gen_range(0..5)).map(|_| finite(&mut rng)).collect();
        for (x, y) in left.iter().zip(&right) {
            prop_assert!(rect_distance(x, y) <= hook_distance(x, y) + 1e-9);
            prop_assert!(to_zero(Shape::Rectangle, x) <= to_zero(Shape::Hook, x) + 1e-9);
        }
        let hooks = bottleneck(Shape::Hook, &left, &right);
        let eps = hooks.epsilon;
        for &(a, b, _) in &hooks.pairs {
            prop_assert!(rect_distance(&left[a], &right[b]) <= eps + 1e-9);
        }
        for &(a, _) in &hooks.unmatched_left {
            prop_assert!(to_zero(Shape::Rectangle, &left[a]) <= eps + 1e-9);
        }
        for &(b, _) in &hooks.unmatched_right {
            prop_assert!(to_zero(Shape::Rectangle, &right[b]) <= eps + 1e-9);
        }
        prop_assert!(bottleneck(Shape::Rectangle, &left, &right).epsilon <= eps + 1e-9);
    }

    #[test]
    fn hooks_have_at_most_three_rectangles(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hook(&mut rng, 2, 6);
        prop_assert!(mrd_rect_of_hook(&h, 2).num_bars() <= 3);
    }

    #[test]
    fn rank_nullity(rows in 1usize..7, cols in 1usize..7, seed in any::<u64>(), p in prop_oneof![Just(2u32), Just(3u32), Just(7u32)]) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0..p as i64)).collect()).collect();
        let a = FpMatrix::from_rows(p, &data);
        let k = a.kernel_basis();
        prop_assert_eq!(a.rank() + k.cols(), cols);
        prop_assert!(a.mul(&k).unwrap().is_zero());
        prop_assert_eq!(a.transpose().rank(), a.rank());
        let x: Vec<u32> = (0..cols).map(|_| rng.gen_range(0..p)).collect();
        let b = a.mul_vec(&x).unwrap();
        let y = a.solve(&b).unwrap().expect("b is in the image");
        prop_assert_eq!(a.mul_vec(&y).unwrap(), b);
    }
}
