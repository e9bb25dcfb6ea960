use std::fmt;

use rkdec_core::barcode::SignedBarcode;
use rkdec_core::metric::signed_bottleneck;
use rkdec_core::module::{PersistenceModule, Presentation};
use rkdec_core::rank_decomp::{mrd_hooks, mrd_rectangles, verify_rank_decomposition};
use rkdec_core::repro::{hilbert_identity_holds, run_experiment, ReproConfig, ReproError};
use rkdec_core::resolution::{rank_exact_of_module, ResolutionError};
use serde_json::{json, Value};

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input, or a bad parameter.
    Input(String),
    /// A computation failed or its result did not check out.
    Verify(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Verify(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Verify(m) => write!(f, "verification failed: {m}"),
        }
    }
}

fn verify<E: fmt::Display>(e: E) -> CliError {
    CliError::Verify(e.to_string())
}

fn input<E: fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

pub struct Globals {
    pub field: Option<u32>,
    pub seed: u64,
    pub max_depth: Option<usize>,
}

fn load(text: &str, g: &Globals) -> Result<(Presentation, PersistenceModule), CliError> {
    let pres = Presentation::parse(text).map_err(input)?;
    if let Some(p) = g.field {
        if p != pres.p {
            return Err(CliError::Input(format!("--field {p} does not match the presentation's p={}", pres.p)));
        }
    }
    let grid = pres.compress_grades().map_err(input)?;
    let m = PersistenceModule::realize(&pres, &grid).map_err(input)?;
    Ok((pres, m))
}

fn resolution_error(e: ResolutionError) -> CliError {
    verify(e)
}

fn compact(v: &Value) -> String {
    v.to_string()
}

pub fn rank_inv(text: &str, g: &Globals) -> Result<String, CliError> {
    let (pres, m) = load(text, g)?;
    let rk = m.rank_invariant();
    let grid = m.grid();
    // cross-check against the rank exact decomposition
    let dec = rank_exact_of_module(&m, g.max_depth).map_err(resolution_error)?;
    verify_rank_decomposition(&dec.barcode, &rk).map_err(verify)?;
    let ranks: Vec<Value> = rk
        .pairs()
        .filter_map(|(a, b)| {
            let r = rk.get(a, b)?;
            (r != 0).then(|| json!({"a": grid.grade(a), "b": grid.grade(b), "rank": r}))
        })
        .collect();
    let axes: Vec<&[f64]> = (0..grid.n()).map(|k| grid.axis_coords(k)).collect();
    Ok(compact(&json!({"version": 1, "n": pres.n, "p": pres.p, "grid": axes, "ranks": ranks})))
}

pub fn betti(text: &str, g: &Globals) -> Result<String, CliError> {
    let (pres, m) = load(text, g)?;
    let ub = rkdec_core::resolution::usual_betti(&m, g.max_depth).map_err(resolution_error)?;
    if !hilbert_identity_holds(&ub, &m) {
        return Err(CliError::Verify("Betti numbers do not reproduce the Hilbert function".into()));
    }
    let mut sizes = ub.sizes();
    sizes.resize(sizes.len().max(pres.n + 1), 0);
    let degrees: serde_json::Map<String, Value> =
        ub.grades.iter().enumerate().map(|(k, gs)| (k.to_string(), json!(gs))).collect();
    Ok(compact(&json!({
        "version": 1,
        "n": pres.n,
        "p": pres.p,
        "sizes": sizes,
        "total": ub.total(),
        "degrees": degrees,
    })))
}

pub fn rkdec(text: &str, g: &Globals) -> Result<String, CliError> {
    let (_, m) = load(text, g)?;
    let dec = rank_exact_of_module(&m, g.max_depth).map_err(resolution_error)?;
    verify_rank_decomposition(&dec.barcode, &m.rank_invariant()).map_err(verify)?;
    Ok(dec.barcode.to_json())
}

pub fn mrd(text: &str, rect: bool, g: &Globals) -> Result<String, CliError> {
    let (pres, m) = load(text, g)?;
    let rk = m.rank_invariant();
    let sbc = if rect { mrd_rectangles(&rk, pres.p) } else { mrd_hooks(&rk, pres.p) }.map_err(verify)?;
    verify_rank_decomposition(&sbc, &rk).map_err(verify)?;
    if !sbc.is_disjoint() {
        return Err(CliError::Verify("positive and negative bars overlap".into()));
    }
    Ok(sbc.to_json())
}

pub fn upset_betti(text: &str, g: &Globals) -> Result<String, CliError> {
    let (pres, m) = load(text, g)?;
    let ub = rkdec_core::resolution::upset_betti(&m, g.max_depth).map_err(resolution_error)?;
    // Euler identity: signed count of upsets containing x is dim M(x)
    let grid = m.grid();
    for x in 0..grid.num_points() {
        let gx = grid.grade(x).expect("grid point");
        let mut total = 0i64;
        for (k, ups) in ub.upsets.iter().enumerate() {
            let inside = ups
                .iter()
                .filter(|mins| mins.iter().any(|g| g.iter().zip(&gx).all(|(a, b)| a <= b)))
                .count() as i64;
            total += if k % 2 == 0 { inside } else { -inside };
        }
        if total != m.dim(x) as i64 {
            return Err(CliError::Verify(format!("upset Betti numbers disagree with dim M at {gx:?}")));
        }
    }
    let degrees: serde_json::Map<String, Value> = ub
        .upsets
        .iter()
        .enumerate()
        .map(|(k, ups)| (k.to_string(), json!(ups.iter().map(|u| json!({"minimal": u})).collect::<Vec<_>>())))
        .collect();
    Ok(compact(&json!({
        "version": 1,
        "n": pres.n,
        "p": pres.p,
        "sizes": ub.upsets.iter().map(Vec::len).collect::<Vec<_>>(),
        "pdim": ub.pdim(),
        "degrees": degrees,
    })))
}

pub fn matching(first: &str, second: &str) -> Result<String, CliError> {
    let c = SignedBarcode::from_json(first).map_err(input)?;
    let d = SignedBarcode::from_json(second).map_err(input)?;
    let m = signed_bottleneck(&c, &d).map_err(input)?;
    Ok(m.to_json())
}

pub fn repro(
    name: &str,
    ks: Option<Vec<usize>>,
    ms: Option<Vec<usize>>,
    instances: Option<usize>,
    epsilon: Option<f64>,
    g: &Globals,
) -> Result<(String, bool), CliError> {
    let cfg = ReproConfig {
        p: g.field.unwrap_or(2),
        seed: g.seed,
        instances,
        ks,
        ms,
        epsilon,
        max_depth: g.max_depth,
    };
    if rkdec_core::linalg::check_prime(cfg.p).is_err() {
        return Err(CliError::Input(format!("{} is not a supported prime", cfg.p)));
    }
    let start = std::time::Instant::now();
    let rep = run_experiment(name, &cfg).map_err(|e| match e {
        ReproError::UnknownExperiment(_) | ReproError::Parameter(_) => input(e),
        other => verify(other),
    })?;
    for v in &rep.verdicts {
        eprintln!("{} {}: {}", if v.passed { "ok  " } else { "FAIL" }, v.check, v.detail);
    }
    eprintln!("{name}: {:.2}s", start.elapsed().as_secs_f64());
    Ok((rep.to_json(), rep.passed()))
}
