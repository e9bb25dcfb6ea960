//! Seeded experiment suites with pass/fail verdicts.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::barcode::{Bar, Shape, SignedBarcode};
use crate::metric::{signed_bottleneck, signed_candidates, signed_matching_at, MetricError, TOLERANCE};
use crate::module::{ModuleError, PersistenceModule, Presentation};
use crate::poset::{GridPoset, PosetError};
use crate::rank_decomp::{mrd_hooks, mrd_rectangles, rect_of_hook_barcode, DecompError};
use crate::resolution::{
    koszul_upset_resolution, rank_exact_decomposition, rank_exact_of_module, rank_gldim_witness,
    upset_betti, upset_gldim_witness, usual_betti, KoszulError, ResolutionError, UsualBetti,
};

use super::constructions::*;

pub const PRNG: &str = "ChaCha8Rng";
pub const REPORT_VERSION: u32 = 1;

pub const EXPERIMENTS: [&str; 8] =
    ["figure1", "example52", "instability", "staircase", "gldim-rank", "gldim-upset", "stability-sweep", "koszul"];

#[derive(Debug, Error)]
pub enum ReproError {
    #[error("unknown experiment {0:?}")]
    UnknownExperiment(String),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Koszul(#[from] KoszulError),
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

/// Deterministic given experiment, seed and parameters.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ExperimentReport {
    pub version: u32,
    pub experiment: String,
    pub prng: String,
    pub seed: u64,
    pub p: u32,
    pub parameters: BTreeMap<String, Value>,
    pub records: Vec<Value>,
    pub verdicts: Vec<Verdict>,
}

impl ExperimentReport {
    fn new(experiment: &str, cfg: &ReproConfig) -> Self {
        ExperimentReport {
            version: REPORT_VERSION,
            experiment: experiment.to_string(),
            prng: PRNG.to_string(),
            seed: cfg.seed,
            p: cfg.p,
            parameters: BTreeMap::new(),
            records: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    fn param(&mut self, key: &str, v: impl Serialize) {
        self.parameters.insert(key.to_string(), json!(v));
    }

    fn verdict(&mut self, check: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict { check: check.into(), passed, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Knobs shared by all suites; `None` picks the documented default.
#[derive(Debug, Clone)]
pub struct ReproConfig {
    pub p: u32,
    pub seed: u64,
    pub instances: Option<usize>,
    pub ks: Option<Vec<usize>>,
    pub ms: Option<Vec<usize>>,
    pub epsilon: Option<f64>,
    pub max_depth: Option<usize>,
}

impl Default for ReproConfig {
    fn default() -> Self {
        ReproConfig { p: 2, seed: 0, instances: None, ks: None, ms: None, epsilon: None, max_depth: None }
    }
}

pub fn run_experiment(name: &str, cfg: &ReproConfig) -> Result<ExperimentReport, ReproError> {
    match name {
        "figure1" => corner_report(cfg),
        "example52" => interleaved_report(cfg),
        "instability" => instability_report(cfg),
        "staircase" => staircase_report(cfg),
        "gldim-rank" => gldim_rank_report(cfg),
        "gldim-upset" => gldim_upset_report(cfg),
        "stability-sweep" => stability_report(cfg),
        "koszul" => koszul_report(cfg),
        other => Err(ReproError::UnknownExperiment(other.to_string())),
    }
}

fn barcode_value(sbc: &SignedBarcode) -> Value {
    serde_json::from_str(&sbc.to_json()).expect("barcode JSON parses")
}

fn same_bars(got: &[Bar], want: &[Bar]) -> bool {
    let mut a = got.to_vec();
    let mut b = want.to_vec();
    crate::barcode::sort_bars(&mut a);
    crate::barcode::sort_bars(&mut b);
    a == b
}

fn hook(i: [f64; 2], j: [f64; 2]) -> Bar {
    Bar::new(i.to_vec(), j.to_vec())
}

fn realize(pres: &Presentation) -> Result<PersistenceModule, ReproError> {
    Ok(PersistenceModule::realize(pres, &pres.compress_grades()?)?)
}

/// `Σ_k (−1)^k #{g ∈ β_k : g ≤ x} = dim M(x)` at every grid point.
pub fn hilbert_identity_holds(ub: &UsualBetti, m: &PersistenceModule) -> bool {
    let grid = m.grid();
    (0..grid.num_points()).all(|x| {
        let mut total = 0i64;
        for (k, gens) in ub.resolution.betti.iter().enumerate() {
            let c = gens.iter().filter(|&&g| grid.leq(g, x)).count() as i64;
            total += if k % 2 == 0 { c } else { -c };
        }
        total == m.dim(x) as i64
    })
}

/// Exact optimum certified by feasibility at `d` and infeasibility at the
/// largest candidate threshold below it.
pub fn certify_bottleneck(c: &SignedBarcode, d: &SignedBarcode, value: f64) -> Result<bool, MetricError> {
    let cands = signed_candidates(c, d)?;
    let below = cands.iter().copied().filter(|&x| x < value - TOLERANCE).last();
    let feasible = signed_matching_at(c, d, value)?;
    let tight = match below {
        Some(b) => !signed_matching_at(c, d, b)?,
        None => true,
    };
    Ok(feasible && tight)
}

fn corner_report(cfg: &ReproConfig) -> Result<ExperimentReport, ReproError> {
    let mut rep = ExperimentReport::new("figure1", cfg);
    let pres = corner_interval(cfg.p);
    let rk = rank_exact_decomposition(&pres, cfg.max_depth)?;
    let want0 = vec![hook([0., 0.], [0., 2.]), hook([0., 0.], [1., 1.]), hook([0., 0.], [2., 0.])];
    let want1 = vec![hook([0., 0.], [2., 1.]), hook([0., 0.], [1., 2.])];
    rep.records.push(json!({"rank_exact": barcode_value(&rk.barcode)}));
    rep.verdict("rank exact degree 0", same_bars(&rk.barcode.degree(0), &want0), format!("{} bars", rk.barcode.degree(0).len()));
    rep.verdict("rank exact degree 1", same_bars(&rk.barcode.degree(1), &want1), format!("{} bars", rk.barcode.degree(1).len()));
    rep.verdict("rank exact length", rk.resolution.length == 1, format!("length {}", rk.resolution.length));
    let m = realize(&pres)?;
    let ub = usual_betti(&m, cfg.max_depth)?;
    rep.records.push(json!({"usual_betti": ub.grades}));
    rep.verdict("usual betti sizes", ub.sizes() == [1, 3, 2], format!("{:?}", ub.sizes()));
    let total_usual = ub.total();
    let total_rk = rk.barcode.num_bars();
    rep.verdict("b = 6, b^rk = 5", total_usual == 6 && total_rk == 5, format!("b={total_usual} b^rk={total_rk}"));
    Ok(rep)
}

fn interleaved_report(cfg: &ReproConfig) -> Result<ExperimentReport, ReproError> {
    let mut rep = ExperimentReport::new("example52", cfg);
    let (pm, pn) = interleaved_pair(cfg.p);
    let bm = rank_exact_decomposition(&pm, cfg.max_depth)?.barcode;
    let bn = rank_exact_decomposition(&pn, cfg.max_depth)?.barcode;
    rep.records.push(json!({"M": barcode_value(&bm), "N": barcode_value(&bn)}));
    rep.verdict(
        "beta^rk(M)",
        same_bars(&bm.positive, &[hook([0., 0.], [0., 5.]), hook([0., 0.], [5., 0.])])
            && same_bars(&bm.negative, &[hook([0., 0.], [5., 5.])]),
        format!("{}+{}", bm.positive.len(), bm.negative.len()),
    );
    rep.verdict(
        "beta^rk(N)",
        same_bars(&bn.positive, &[hook([0., 0.], [0., 5.]), hook([0., 0.], [4., 4.]), hook([0., 0.], [5., 0.])])
            && same_bars(&bn.negative, &[hook([0., 0.], [5., 4.]), hook([0., 0.], [4., 5.])]),
        format!("{}+{}", bn.positive.len(), bn.negative.len()),
    );
    let d = signed_bottleneck(&bm, &bn)?;
    let eps = d.epsilon();
    let certified = certify_bottleneck(&bm, &bn, 1.0)?;
    rep.records.push(json!({"signed_bottleneck": eps, "matching": serde_json::from_str::<Value>(&d.to_json()).unwrap()}));
    rep.verdict("signed bottleneck = 1", eps == 1.0 && certified, format!("{eps}, certified={certified}"));
    Ok(rep)
}

fn instability_report(cfg: &ReproConfig) -> Result<ExperimentReport, ReproError> {
    let mut rep = ExperimentReport::new("instability", cfg);
    let ks = cfg.ks.clone().unwrap_or_else(|| vec![4, 9, 19]);
    if ks.iter().any(|&k| k == 0 || k > 40) {
        return Err(ReproError::Parameter("instability k must be in 1..=40".into()));
    }
    rep.param("k", &ks);
    rep.param("a", INSTABILITY_A);
    rep.param("b", INSTABILITY_B);

    // the building block and its hook analog
    let m = realize(&l_shape(cfg.p, INSTABILITY_A, INSTABILITY_B))?;
    let rect = mrd_rectangles(&m.rank_invariant(), cfg.p)?;
    let (a, b) = (INSTABILITY_A, INSTABILITY_B);
    let ok = same_bars(&rect.positive, &[Bar::new(vec![0., 0.], vec![a, b]), Bar::new(vec![0., 0.], vec![b, a])])
        && same_bars(&rect.negative, &[Bar::new(vec![0., 0.], vec![a, a])]);
    rep.records.push(json!({"mrd_rect_M_a_b": barcode_value(&rect)}));
    rep.verdict("mrd_rect(M_{2,10}) = ({V,H},{T_2})", ok, format!("{}+{}", rect.positive.len(), rect.negative.len()));
    let t = realize(&square(cfg.p, a))?;
    let hooks = mrd_hooks(&t.rank_invariant(), cfg.p)?;
    let ok = same_bars(&hooks.positive, &[hook([0., 0.], [a, 0.]), hook([0., 0.], [0., a])])
        && same_bars(&hooks.negative, &[hook([0., 0.], [a, a])]);
    rep.verdict("mrd_hooks(T_2) = ({L_(2,0), L_(0,2)},{L_(2,2)})", ok, format!("{}+{}", hooks.positive.len(), hooks.negative.len()));

    for &k in &ks {
        let pair = instability_pair(k)?;
        let ra = mrd_rectangles(&pair.rank_a, cfg.p)?;
        let rb = mrd_rectangles(&pair.rank_b, cfg.p)?;
        let d = signed_bottleneck(&ra, &rb)?.epsilon();
        let bound = pair.epsilon / 2.0;
        rep.records.push(json!({
            "k": k,
            "epsilon": pair.epsilon,
            "interleaving_bound": bound,
            "signed_bottleneck": d,
            "bars_A": [ra.positive.len(), ra.negative.len()],
            "bars_B": [rb.positive.len(), rb.negative.len()],
        }));
        rep.verdict(format!("k={k}: d_B >= 1"), d >= 1.0 - TOLERANCE, format!("d_B = {d}, bound = {bound}"));
    }
    Ok(rep)
}

/// `(b, b^rk, b^rect)` of the staircase interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StaircaseSizes {
    pub k: usize,
    pub b: usize,
    pub b_rk: usize,
    pub b_rect: usize,
    pub upset_b: usize,
}

pub fn staircase_sizes(k: usize, p: u32, max_depth: Option<usize>) -> Result<StaircaseSizes, ReproError> {
    let pres = staircase(k, p);
    let m = realize(&pres)?;
    let b = usual_betti(&m, max_depth)?.total();
    let rk = rank_exact_of_module(&m, max_depth)?;
    let rect = mrd_rectangles(&m.rank_invariant(), p)?;
    if rect_of_hook_barcode(&rk.barcode).sorted() != rect.sorted() {
        return Err(ReproError::Parameter(format!("hook to rectangle transfer disagrees for k={k}")));
    }
    let upset = realize(&staircase_upset(k, p))?;
    let upset_b = usual_betti(&upset, max_depth)?.total();
    Ok(StaircaseSizes { k, b, b_rk: rk.barcode.num_bars(), b_rect: rect.num_bars(), upset_b })
}

fn staircase_report(cfg: &ReproConfig) -> Result<ExperimentReport, ReproError> {
    let mut rep = ExperimentReport::new("staircase", cfg);
    let ks = cfg.ks.clone().unwrap_or_else(|| (2..=6).collect());
    if ks.iter().any(|&k| !(1..=10).contains(&k)) {
        return Err(ReproError::Parameter("staircase k must be in 1..=10".into()));
    }
    rep.param("k", &ks);
    for &k in &ks {
        let s = staircase_sizes(k, cfg.p, cfg.max_depth)?;
        // context only: the general upper bound (4b)^((2n+1)^(2n-1)) with n = 2
        let log10_upper = 125.0 * (4.0 * s.b as f64).log10();
        let ratio = s.b_rk as f64 / (s.b as f64).powi(3);
        rep.records.push(json!({
            "k": k,
            "b": s.b,
            "b_rk": s.b_rk,
            "b_rect": s.b_rect,
            "upset_b": s.upset_b,
            "log10_upper_bound": log10_upper,
            "b_rk_over_b_cubed": ratio,
        }));
        let k2 = k * k;
        rep.verdict(format!("k={k}: b <= 4k"), s.b <= 4 * k, format!("b = {}", s.b));
        rep.verdict(format!("k={k}: b^rect >= k^2"), s.b_rect >= k2, format!("b^rect = {}", s.b_rect));
        rep.verdict(format!("k={k}: 3 b^rk >= k^2"), 3 * s.b_rk >= k2, format!("b^rk = {}", s.b_rk));
        rep.verdict(format!("k={k}: upset b = 2k-1"), s.upset_b == 2 * k - 1, format!("b = {}", s.upset_b));
    }
    Ok(rep)
}

fn random_depths(
    rng: &mut ChaCha8Rng,
    shape: &[usize],
    count: usize,
    cfg: &ReproConfig,
    upset: bool,
) -> Result<Vec<usize>, ReproError> {
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let (_, m) = random_module(rng, shape, cfg.p, !upset)?;
        let depth = if upset {
            upset_betti(&m, cfg.max_depth)?.pdim()
        } else {
            rank_exact_of_module(&m, cfg.max_depth)?.resolution.length
        };
        out.push(depth);
    }
    Ok(out)
}

fn gldim_rank_report(cfg: &ReproConfig) -> Result<ExperimentReport, ReproError> {
    let mut rep = ExperimentReport::new("gldim-rank", cfg);
    let ms = cfg.ms.clone().unwrap_or_else(|| vec![3, 4, 5]);
    if ms.iter().any(|&m| !(2..=6).contains(&m)) {
        return Err(ReproError::Parameter("gldim-rank m must be in 2..=6".into()));
    }
    let count = cfg.instances.unwrap_or(200);
    rep.param("m", &ms);
    rep.param("instances", count);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut shapes: Vec<Vec<usize>> = ms.iter().map(|&m| vec![m, m]).collect();
    shapes.push(vec![3, 3, 3]);
    for shape in shapes {
        let n = shape.len();
        let c = if n == 3 { count.div_ceil(10).max(1) } else { count };
        let depths = random_depths(&mut rng, &shape, c, cfg, false)?;
        let max = depths.iter().copied().max().unwrap_or(0);
        let bound = 2 * n - 2;
        rep.records.push(json!({"shape": shape, "instances": c, "max_depth": max, "histogram": histogram(&depths)}));
        rep.verdict(format!("{shape:?}: depth <= {bound}"), max <= bound, format!("max depth {max}"));
    }
    let w = rank_gldim_witness(2, 3, cfg.p)?;
    rep.records.push(json!({"witness": {"n": 2, "m": 3, "simple_pdim": w.simple_pdim, "pdim": w.pdim}}));
    rep.verdict("witness n=2, m=3 attains 2", w.pdim == 2, format!("pdim {}", w.pdim));
    Ok(rep)
}

fn histogram(depths: &[usize]) -> Vec<usize> {
    let max = depths.iter().copied().max().unwrap_or(0);
    let mut h = vec![0; max + 1];
    for &d in depths {
        h[d] += 1;
    }
    h
}

fn gldim_upset_report(cfg: &ReproConfig) -> Result<ExperimentReport, ReproError> {
    let mut rep = ExperimentReport::new("gldim-upset", cfg);
    let ms = cfg.ms.clone().unwrap_or_else(|| vec![3, 4]);
    if ms.iter().any(|&m| !(3..=5).contains(&m)) {
        return Err(ReproError::Parameter("gldim-upset m must be in 3..=5".into()));
    }
    let count = cfg.instances.unwrap_or(100);
    rep.param("m", &ms);
    rep.param("instances", count);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for &m in &ms {
        let depths = random_depths(&mut rng, &[m, m], count, cfg, true)?;
        let max = depths.iter().copied().max().unwrap_or(0);
        rep.records.push(json!({"m": m, "instances": count, "max_depth": max, "histogram": histogram(&depths)}));
        rep.verdict(format!("m={m}: depth <= {}", m - 2), max <= m - 2, format!("max depth {max}"));
    }
    for m in 3..=5 {
        let w = upset_gldim_witness(m, cfg.p)?;
        rep.records.push(json!({"witness": {"m": m, "simple_pdim": w.simple_pdim, "pdim": w.pdim}}));
        if m <= 4 {
            rep.verdict(format!("witness m={m} attains {}", m - 2), w.pdim == m - 2, format!("pdim {}", w.pdim));
        }
    }
    let grid = GridPoset::integer(&[3, 3], false)?;
    let inj = PersistenceModule::rectangle(&grid, cfg.p, 0, grid.index(&[1, 1]))?;
    let pd = upset_betti(&inj, cfg.max_depth)?.pdim();
    rep.verdict("injective R_{0,(1,1)} has pdim 1", pd == 1, format!("pdim {pd}"));
    Ok(rep)
}

/// A pair with `d_I(M, N) ≤ ε` by construction: `N` is `M'` translated by
/// `ε·(1,…,1)` plus the hook summands of `M` with each end moved by at most
/// `ε` in every coordinate.
pub fn stability_pair<R: Rng>(rng: &mut R, eps: f64, p: u32) -> Result<(Presentation, Presentation), ModuleError> {
    let g = rng.gen_range(1..=2);
    let r = rng.gen_range(0..=2 * g);
    let base = random_presentation(rng, &[3, 3], g, r, p);
    let shifted = base.translate(&[eps, eps]);
    let mut ms = vec![base];
    let mut ns = vec![shifted];
    for _ in 0..rng.gen_range(0..=2) {
        let h = random_hook(rng, 2, 3);
        let mut moved = h.clone();
        for _ in 0..8 {
            let mut step = |v: f64| if v.is_infinite() { v } else { v + eps * rng.gen_range(-1..=1) as f64 };
            let i: Vec<f64> = h.i.iter().map(|&v| step(v)).collect();
            let j: Vec<f64> = h.j.iter().map(|&v| step(v)).collect();
            let cand = Bar::new(i, j);
            if cand.is_valid(Shape::Hook) {
                moved = cand;
                break;
            }
        }
        ms.push(hook_presentation(&h, p));
        ns.push(hook_presentation(&moved, p));
    }
    Ok((Presentation::direct_sum(&ms)?, Presentation::direct_sum(&ns)?))
}

fn stability_report(cfg: &ReproConfig) -> Result<ExperimentReport, ReproError> {
    let mut rep = ExperimentReport::new("stability-sweep", cfg);
    let count = cfg.instances.unwrap_or(100);
    let epsilons = cfg.epsilon.map_or_else(|| vec![0.25, 0.5, 1.0], |e| vec![e]);
    if epsilons.iter().any(|&e| !(e > 0.0 && e <= 2.0)) {
        return Err(ReproError::Parameter("stability epsilon must be in (0, 2]".into()));
    }
    rep.param("instances", count);
    rep.param("epsilon", &epsilons);
    let factor = 9.0;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst: f64 = 0.0;
    let mut violations = 0;
    for idx in 0..count {
        let eps = epsilons[idx % epsilons.len()];
        let (pm, pn) = stability_pair(&mut rng, eps, cfg.p)?;
        let bm = rank_exact_decomposition(&pm, cfg.max_depth)?.barcode;
        let bn = rank_exact_decomposition(&pn, cfg.max_depth)?.barcode;
        let d = signed_bottleneck(&bm, &bn)?.epsilon();
        worst = worst.max(d / eps);
        if d > factor * eps + TOLERANCE {
            violations += 1;
            rep.records.push(json!({"instance": idx, "epsilon": eps, "d_B": d, "M": pm.to_text(), "N": pn.to_text()}));
        }
    }
    rep.records.push(json!({"instances": count, "worst_ratio": worst, "violations": violations}));
    rep.verdict("d_B <= 9 eps on every pair", violations == 0, format!("worst d_B/eps = {worst}"));
    Ok(rep)
}

/// Random generator sets of size `1..=5` on `[6]²`, checked for exactness and,
/// under the minimality hypothesis, against the resolution engine.
fn koszul_report(cfg: &ReproConfig) -> Result<ExperimentReport, ReproError> {
    let mut rep = ExperimentReport::new("koszul", cfg);
    let count = cfg.instances.unwrap_or(50);
    rep.param("instances", count);
    rep.param("grid", [6, 6]);
    let grid = GridPoset::integer(&[6, 6], false)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut exact, mut minimal, mut agree) = (0, 0, 0);
    for _ in 0..count {
        let m = rng.gen_range(1..=5);
        let gens: Vec<usize> = (0..m).map(|_| rng.gen_range(0..grid.num_points())).collect();
        let k = koszul_upset_resolution(&grid, &gens)?;
        if k.check_exact(cfg.p).is_ok() {
            exact += 1;
        }
        if k.is_minimal() {
            minimal += 1;
            let u = crate::poset::Upset::generated_by(&grid, &gens);
            let support: Vec<bool> = (0..grid.num_points()).map(|x| u.contains(x)).collect();
            let module = PersistenceModule::interval(&grid, cfg.p, &support)?;
            let pd = usual_betti(&module, cfg.max_depth)?.resolution.length;
            if pd == k.length() {
                agree += 1;
            }
        }
    }
    rep.records.push(json!({"instances": count, "exact": exact, "minimal": minimal, "length_agrees": agree}));
    rep.verdict("exact onto k_I", exact == count, format!("{exact}/{count}"));
    rep.verdict("minimal length = usual pdim", agree == minimal, format!("{agree}/{minimal}"));
    Ok(rep)
}
