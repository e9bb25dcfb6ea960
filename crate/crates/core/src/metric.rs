//! Interleaving distances between hooks and between rectangles, matchings,
//! the bottleneck distance and the signed bottleneck dissimilarity.

use petgraph::algo::maximum_matching;
use petgraph::graph::{NodeIndex, UnGraph};
use serde_json::{json, Value};
use thiserror::Error;

use crate::barcode::{Bar, Shape, SignedBarcode};

/// Slack when comparing a distance to a threshold.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("cannot compare {0:?} bars with {1:?} bars")]
    ShapeMismatch(Shape, Shape),
    #[error("barcodes have {0} and {1} parameters")]
    ArityMismatch(usize, usize),
}

/// `|x − y|` with `|∞ − ∞| = 0` and `|a − ∞| = ∞`.
fn gap(x: f64, y: f64) -> f64 {
    if x.is_infinite() && y.is_infinite() {
        0.0
    } else {
        (x - y).abs()
    }
}

fn sup_gap(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| gap(*a, *b)).fold(0.0, f64::max)
}

pub fn hook_to_zero(b: &Bar) -> f64 {
    sup_gap(&b.j, &b.i) / 2.0
}

pub fn rect_to_zero(b: &Bar) -> f64 {
    b.i.iter().zip(&b.j).map(|(a, c)| gap(*c, *a)).fold(f64::INFINITY, f64::min) / 2.0
}

pub fn to_zero(shape: Shape, b: &Bar) -> f64 {
    match shape {
        Shape::Hook => hook_to_zero(b),
        Shape::Rectangle => rect_to_zero(b),
    }
}

/// Distance between two bars of the same shape.
pub fn distance(shape: Shape, x: &Bar, y: &Bar) -> f64 {
    let ends = sup_gap(&x.i, &y.i).max(sup_gap(&x.j, &y.j));
    let trivial = to_zero(shape, x).max(to_zero(shape, y));
    ends.min(trivial)
}

pub fn hook_distance(x: &Bar, y: &Bar) -> f64 {
    distance(Shape::Hook, x, y)
}

pub fn rect_distance(x: &Bar, y: &Bar) -> f64 {
    distance(Shape::Rectangle, x, y)
}

/// A partial bijection between two multisets of bars with its cost.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchingResult {
    pub epsilon: f64,
    pub pairs: Vec<(usize, usize, f64)>,
    pub unmatched_left: Vec<(usize, f64)>,
    pub unmatched_right: Vec<(usize, f64)>,
}

impl MatchingResult {
    /// Cost actually realized by the recorded pairs and unmatched bars.
    pub fn realized_cost(&self) -> f64 {
        self.pairs
            .iter()
            .map(|p| p.2)
            .chain(self.unmatched_left.iter().map(|u| u.1))
            .chain(self.unmatched_right.iter().map(|u| u.1))
            .fold(0.0, f64::max)
    }
}

fn ext(v: f64) -> Value {
    if v.is_infinite() {
        json!("inf")
    } else {
        json!(v)
    }
}

/// An ε-matching, if one exists: every bar farther than ε from zero must be
/// paired with a bar within ε.
pub fn epsilon_matching(shape: Shape, left: &[Bar], right: &[Bar], eps: f64) -> Option<MatchingResult> {
    let (nl, nr) = (left.len(), right.len());
    let ok = |d: f64| d <= eps + TOLERANCE || (d.is_infinite() && eps.is_infinite());
    let zl: Vec<f64> = left.iter().map(|b| to_zero(shape, b)).collect();
    let zr: Vec<f64> = right.iter().map(|b| to_zero(shape, b)).collect();
    // left side: left bars, then one diagonal slot per right bar;
    // right side: right bars, then one diagonal slot per left bar
    let mut g = UnGraph::<(), ()>::with_capacity(2 * (nl + nr), 0);
    let lnodes: Vec<NodeIndex> = (0..nl + nr).map(|_| g.add_node(())).collect();
    let rnodes: Vec<NodeIndex> = (0..nr + nl).map(|_| g.add_node(())).collect();
    let mut dist = vec![f64::INFINITY; nl * nr];
    for i in 0..nl {
        for j in 0..nr {
            let d = distance(shape, &left[i], &right[j]);
            dist[i * nr + j] = d;
            if ok(d) {
                g.add_edge(lnodes[i], rnodes[j], ());
            }
        }
        if ok(zl[i]) {
            g.add_edge(lnodes[i], rnodes[nr + i], ());
        }
    }
    for j in 0..nr {
        if ok(zr[j]) {
            g.add_edge(lnodes[nl + j], rnodes[j], ());
        }
        for i in 0..nl {
            g.add_edge(lnodes[nl + j], rnodes[nr + i], ());
        }
    }
    let m = maximum_matching(&g);
    if m.len() != nl + nr {
        return None;
    }
    let mut pairs = Vec::new();
    let mut unmatched_left = Vec::new();
    let mut unmatched_right = Vec::new();
    for i in 0..nl {
        let mate = m.mate(lnodes[i]).unwrap();
        let k = rnodes.iter().position(|&x| x == mate).unwrap();
        if k < nr {
            pairs.push((i, k, dist[i * nr + k]));
        } else {
            unmatched_left.push((i, zl[i]));
        }
    }
    for j in 0..nr {
        let mate = m.mate(rnodes[j]).unwrap();
        if lnodes[nl..].contains(&mate) {
            unmatched_right.push((j, zr[j]));
        }
    }
    let mut res = MatchingResult { epsilon: 0.0, pairs, unmatched_left, unmatched_right };
    res.epsilon = res.realized_cost();
    Some(res)
}

/// Sorted distinct finite thresholds at which matching feasibility can change,
/// including `0`.
pub fn candidate_thresholds(shape: Shape, left: &[Bar], right: &[Bar]) -> Vec<f64> {
    let mut cands: Vec<f64> = Vec::with_capacity(left.len() * right.len() + left.len() + right.len() + 1);
    cands.push(0.0);
    for x in left {
        cands.push(to_zero(shape, x));
        for y in right {
            cands.push(distance(shape, x, y));
        }
    }
    cands.extend(right.iter().map(|y| to_zero(shape, y)));
    cands.retain(|c| c.is_finite());
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    cands
}

/// Bottleneck distance: the least candidate threshold admitting a matching.
pub fn bottleneck(shape: Shape, left: &[Bar], right: &[Bar]) -> MatchingResult {
    let cands = candidate_thresholds(shape, left, right);
    let (mut lo, mut hi) = (0usize, cands.len());
    let mut best = None;
    while lo < hi {
        let mid = (lo + hi) / 2;
        match epsilon_matching(shape, left, right, cands[mid]) {
            Some(m) => {
                best = Some((cands[mid], m));
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    match best {
        Some((eps, mut m)) => {
            m.epsilon = eps;
            m
        }
        None => {
            let mut m = epsilon_matching(shape, left, right, f64::INFINITY).expect("always feasible at infinity");
            m.epsilon = f64::INFINITY;
            m
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    FirstPositive,
    FirstNegative,
    SecondPositive,
    SecondNegative,
}

impl Origin {
    fn name(self) -> &'static str {
        match self {
            Origin::FirstPositive => "first+",
            Origin::FirstNegative => "first-",
            Origin::SecondPositive => "second+",
            Origin::SecondNegative => "second-",
        }
    }
}

/// A matching between `C+ ∪ D−` and `D+ ∪ C−`, with where each bar came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedMatching {
    pub shape: Shape,
    pub result: MatchingResult,
    pub left: Vec<(Origin, usize, Bar)>,
    pub right: Vec<(Origin, usize, Bar)>,
}

impl SignedMatching {
    pub fn epsilon(&self) -> f64 {
        self.result.epsilon
    }

    pub fn to_json(&self) -> String {
        let bar = |b: &Bar| {
            json!({
                "i": b.i.iter().map(|&v| ext(v)).collect::<Vec<_>>(),
                "j": b.j.iter().map(|&v| ext(v)).collect::<Vec<_>>(),
            })
        };
        let side = |s: &[(Origin, usize, Bar)], k: usize| {
            let (o, idx, b) = &s[k];
            json!({"from": o.name(), "index": idx, "bar": bar(b)})
        };
        let pairs: Vec<Value> = self
            .result
            .pairs
            .iter()
            .map(|&(l, r, d)| json!({"left": side(&self.left, l), "right": side(&self.right, r), "distance": ext(d)}))
            .collect();
        let unl: Vec<Value> = self
            .result
            .unmatched_left
            .iter()
            .map(|&(l, d)| json!({"bar": side(&self.left, l), "to_zero": ext(d)}))
            .collect();
        let unr: Vec<Value> = self
            .result
            .unmatched_right
            .iter()
            .map(|&(r, d)| json!({"bar": side(&self.right, r), "to_zero": ext(d)}))
            .collect();
        json!({
            "shape": self.shape.name(),
            "epsilon": ext(self.result.epsilon),
            "pairs": pairs,
            "unmatched_left": unl,
            "unmatched_right": unr,
        })
        .to_string()
    }
}

fn crossed(c: &SignedBarcode, d: &SignedBarcode) -> (Vec<(Origin, usize, Bar)>, Vec<(Origin, usize, Bar)>) {
    let tag = |o: Origin, bars: &[Bar]| -> Vec<(Origin, usize, Bar)> {
        bars.iter().enumerate().map(|(i, b)| (o, i, b.clone())).collect()
    };
    let mut left = tag(Origin::FirstPositive, &c.positive);
    left.extend(tag(Origin::SecondNegative, &d.negative));
    let mut right = tag(Origin::SecondPositive, &d.positive);
    right.extend(tag(Origin::FirstNegative, &c.negative));
    (left, right)
}

/// `d_B(C+ ∪ D−, D+ ∪ C−)`.
pub fn signed_bottleneck(c: &SignedBarcode, d: &SignedBarcode) -> Result<SignedMatching, MetricError> {
    check_compatible(c, d)?;
    let (left, right) = crossed(c, d);
    let lb: Vec<Bar> = left.iter().map(|x| x.2.clone()).collect();
    let rb: Vec<Bar> = right.iter().map(|x| x.2.clone()).collect();
    let result = bottleneck(c.shape, &lb, &rb);
    Ok(SignedMatching { shape: c.shape, result, left, right })
}

/// Candidate thresholds for the crossed unions.
pub fn signed_candidates(c: &SignedBarcode, d: &SignedBarcode) -> Result<Vec<f64>, MetricError> {
    check_compatible(c, d)?;
    let (left, right) = crossed(c, d);
    let lb: Vec<Bar> = left.into_iter().map(|x| x.2).collect();
    let rb: Vec<Bar> = right.into_iter().map(|x| x.2).collect();
    Ok(candidate_thresholds(c.shape, &lb, &rb))
}

/// Whether the crossed unions admit an ε-matching.
pub fn signed_matching_at(c: &SignedBarcode, d: &SignedBarcode, eps: f64) -> Result<bool, MetricError> {
    check_compatible(c, d)?;
    let (left, right) = crossed(c, d);
    let lb: Vec<Bar> = left.into_iter().map(|x| x.2).collect();
    let rb: Vec<Bar> = right.into_iter().map(|x| x.2).collect();
    Ok(epsilon_matching(c.shape, &lb, &rb, eps).is_some())
}

fn check_compatible(c: &SignedBarcode, d: &SignedBarcode) -> Result<(), MetricError> {
    if c.shape != d.shape {
        return Err(MetricError::ShapeMismatch(c.shape, d.shape));
    }
    if c.n != d.n {
        return Err(MetricError::ArityMismatch(c.n, d.n));
    }
    Ok(())
}
