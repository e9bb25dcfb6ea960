//! Values computed independently and frozen here.

use rkdec_core::barcode::{Bar, Shape, SignedBarcode};
use rkdec_core::metric::{distance, signed_bottleneck, to_zero};
use rkdec_core::module::{PersistenceModule, Presentation};
use rkdec_core::poset::{GridPoset, QuotientPoset};
use rkdec_core::repro::{certify_bottleneck, interleaved_pair};
use rkdec_core::resolution::rank_exact_decomposition;

#[test]
fn pairs_and_upset_counts() {
    let g = GridPoset::integer(&[2, 2], true).unwrap();
    let pairs = QuotientPoset::pairs(&g).unwrap();
    assert_eq!(pairs.len(), 14);
    assert_eq!(pairs.forbidden_count(), 5);
    for (shape, count) in [(vec![3, 3], 19), (vec![2, 2], 5), (vec![2], 2), (vec![4, 4], 69)] {
        let g = GridPoset::integer(&shape, false).unwrap();
        assert_eq!(QuotientPoset::upsets(&g).unwrap().len(), count, "{shape:?}");
    }
}

#[test]
fn rank_invariant_of_a_two_generator_module() {
    let pres = Presentation::parse(
        "rkdec-presentation v1\nn=2 p=3\ngenerators 2\n0 0\n1 0\nrelations 3\n1 1 ; 0:1 1:2\n2 1 ; 1:1\n0 2 ; 0:1\n",
    )
    .unwrap();
    let grid = GridPoset::integer(&[3, 3], false).unwrap();
    let m = PersistenceModule::realize(&pres, &grid).unwrap();
    let dims: Vec<usize> = (0..9).map(|x| m.dim(x)).collect();
    // row-major over (x, y)
    assert_eq!(dims, vec![1, 1, 0, 2, 1, 0, 2, 0, 0]);
    let rk = m.rank_invariant();
    let at = |a: [usize; 2], b: [usize; 2]| rk.get(grid.index(&a), grid.index(&b)).unwrap();
    assert_eq!(at([0, 0], [2, 2]), 0);
    assert_eq!(at([1, 0], [2, 0]), 2);
    assert_eq!(at([0, 0], [1, 1]), 1);
    assert_eq!(at([1, 0], [1, 1]), 1);
    let total: i64 = rk.pairs().map(|(a, b)| rk.get(a, b).unwrap()).sum();
    assert_eq!(total, 15);
}

#[test]
fn hook_distances() {
    let h = |i: [f64; 2], j: [f64; 2]| Bar::new(i.to_vec(), j.to_vec());
    assert_eq!(to_zero(Shape::Hook, &h([0., 0.], [5., 5.])), 2.5);
    assert_eq!(to_zero(Shape::Rectangle, &h([0., 0.], [10., 2.])), 1.0);
    assert_eq!(distance(Shape::Hook, &h([0., 0.], [4., 4.]), &h([0., 0.], [5., 5.])), 1.0);
    assert_eq!(distance(Shape::Hook, &h([0., 0.], [1., 1.]), &h([10., 10.], [11., 11.])), 0.5);
}

#[test]
fn square_and_corner_cut_are_one_apart() {
    let (m, n) = interleaved_pair(2);
    let bm = rank_exact_decomposition(&m, None).unwrap().barcode;
    let bn = rank_exact_decomposition(&n, None).unwrap().barcode;
    let d = signed_bottleneck(&bm, &bn).unwrap();
    assert_eq!(d.epsilon(), 1.0);
    assert!(certify_bottleneck(&bm, &bn, 1.0).unwrap());
    let empty = SignedBarcode::empty(2, 2, Shape::Hook);
    let mut single = empty.clone();
    single.positive.push(Bar::new(vec![0., 0.], vec![5., 5.]));
    assert_eq!(signed_bottleneck(&single, &empty).unwrap().epsilon(), 2.5);
}
