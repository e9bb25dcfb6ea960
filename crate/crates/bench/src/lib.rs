//! Fixed workloads shared by the benchmarks and their smoke tests.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rkdec_core::barcode::SignedBarcode;
use rkdec_core::module::PersistenceModule;
use rkdec_core::rank_decomp::mrd_rectangles;
use rkdec_core::repro::{instability_pair, random_module};

/// `count` seeded random modules on the integer grid of `shape`, with `⊤`.
pub fn modules(seed: u64, shape: &[usize], count: usize) -> Vec<PersistenceModule> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_module(&mut rng, shape, 2, true).expect("valid module").1).collect()
}

/// Rectangle decompositions of the two sides of the instability pair.
pub fn instability_barcodes(k: usize) -> (SignedBarcode, SignedBarcode) {
    let pair = instability_pair(k).expect("valid grid");
    let a = mrd_rectangles(&pair.rank_a, 2).expect("decomposes");
    let b = mrd_rectangles(&pair.rank_b, 2).expect("decomposes");
    (a, b)
}
