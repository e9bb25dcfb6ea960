//! Signed barcodes of hooks or right-open rectangles, and their JSON form.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::ser::{SerializeMap, SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Hook,
    Rectangle,
}

impl Shape {
    pub fn name(self) -> &'static str {
        match self {
            Shape::Hook => "hook",
            Shape::Rectangle => "rect",
        }
    }
}

/// An interval descriptor `(i, j)`.
///
/// For hooks `j` is a grade or `⊤`, the latter stored as all coordinates
/// infinite. For rectangles `[i, j)` each coordinate of `j` may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Bar {
    pub i: Vec<f64>,
    pub j: Vec<f64>,
}

impl Bar {
    pub fn new(i: Vec<f64>, j: Vec<f64>) -> Self {
        Bar { i, j }
    }

    /// Hook `L_{i,⊤}`, i.e. the free module at `i`.
    pub fn free(i: Vec<f64>) -> Self {
        let j = vec![f64::INFINITY; i.len()];
        Bar { i, j }
    }

    pub fn n(&self) -> usize {
        self.i.len()
    }

    pub fn j_is_top(&self) -> bool {
        self.j.iter().all(|v| v.is_infinite())
    }

    /// Rank of `L_{i,j}(x) → L_{i,j}(y)` for `x ≤ y`.
    pub fn hook_rank(&self, x: &[f64], y: &[f64]) -> i64 {
        let i_le_x = self.i.iter().zip(x).all(|(a, b)| a <= b);
        let j_le_y = !self.j_is_top() && self.j.iter().zip(y).all(|(a, b)| a <= b);
        i64::from(i_le_x && !j_le_y)
    }

    /// Rank of `[i, j)(x) → [i, j)(y)` for `x ≤ y`.
    pub fn rect_rank(&self, x: &[f64], y: &[f64]) -> i64 {
        let i_le_x = self.i.iter().zip(x).all(|(a, b)| a <= b);
        let y_lt_j = y.iter().zip(&self.j).all(|(a, b)| a < b);
        i64::from(i_le_x && y_lt_j)
    }

    pub fn rank(&self, shape: Shape, x: &[f64], y: &[f64]) -> i64 {
        match shape {
            Shape::Hook => self.hook_rank(x, y),
            Shape::Rectangle => self.rect_rank(x, y),
        }
    }

    /// Total order used to canonicalize multisets.
    pub fn cmp_total(&self, other: &Bar) -> Ordering {
        let a = self.i.iter().chain(&self.j);
        let b = other.i.iter().chain(&other.j);
        for (x, y) in a.zip(b) {
            match x.total_cmp(y) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        self.n().cmp(&other.n())
    }

    pub fn is_valid(&self, shape: Shape) -> bool {
        if self.i.len() != self.j.len() || self.i.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match shape {
            Shape::Hook => {
                self.j_is_top()
                    || (self.j.iter().all(|v| v.is_finite())
                        && self.i.iter().zip(&self.j).all(|(a, b)| a <= b)
                        && self.i != self.j)
            }
            Shape::Rectangle => self.i.iter().zip(&self.j).all(|(a, b)| a < b),
        }
    }
}

pub fn sort_bars(bars: &mut [Bar]) {
    bars.sort_by(Bar::cmp_total);
}

/// `(positive, negative)` multisets of bars, optionally split by degree.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedBarcode {
    pub n: usize,
    pub p: u32,
    pub shape: Shape,
    pub positive: Vec<Bar>,
    pub negative: Vec<Bar>,
    /// Degree `k` lists indices into `positive` (even `k`) or `negative` (odd `k`).
    pub degrees: Option<BTreeMap<usize, Vec<usize>>>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BarcodeError {
    #[error("invalid barcode JSON: {0}")]
    Json(String),
}

impl SignedBarcode {
    pub fn empty(n: usize, p: u32, shape: Shape) -> Self {
        SignedBarcode { n, p, shape, positive: Vec::new(), negative: Vec::new(), degrees: None }
    }

    /// Build from bars stratified by degree; even degrees are positive.
    pub fn from_degrees(n: usize, p: u32, shape: Shape, by_degree: Vec<Vec<Bar>>) -> Self {
        let mut out = Self::empty(n, p, shape);
        let mut degrees = BTreeMap::new();
        for (k, bars) in by_degree.into_iter().enumerate() {
            let side = if k % 2 == 0 { &mut out.positive } else { &mut out.negative };
            let idx: Vec<usize> = (side.len()..side.len() + bars.len()).collect();
            side.extend(bars);
            degrees.insert(k, idx);
        }
        out.degrees = Some(degrees);
        out
    }

    /// Bars of degree `k`, if stratified.
    pub fn degree(&self, k: usize) -> Vec<Bar> {
        let side = if k % 2 == 0 { &self.positive } else { &self.negative };
        self.degrees
            .as_ref()
            .and_then(|d| d.get(&k))
            .map(|idx| idx.iter().map(|&i| side[i].clone()).collect())
            .unwrap_or_default()
    }

    pub fn num_bars(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    /// Canonical order on both sides; degree stratification is dropped.
    pub fn sorted(&self) -> SignedBarcode {
        let mut s = self.clone();
        sort_bars(&mut s.positive);
        sort_bars(&mut s.negative);
        s.degrees = None;
        s
    }

    /// Remove bars common to both sides, with multiplicity.
    pub fn cancelled(&self) -> SignedBarcode {
        let s = self.sorted();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        let (mut a, mut b) = (0, 0);
        while a < s.positive.len() && b < s.negative.len() {
            match s.positive[a].cmp_total(&s.negative[b]) {
                Ordering::Less => {
                    pos.push(s.positive[a].clone());
                    a += 1;
                }
                Ordering::Greater => {
                    neg.push(s.negative[b].clone());
                    b += 1;
                }
                Ordering::Equal => {
                    a += 1;
                    b += 1;
                }
            }
        }
        pos.extend_from_slice(&s.positive[a..]);
        neg.extend_from_slice(&s.negative[b..]);
        SignedBarcode { positive: pos, negative: neg, ..s }
    }

    /// True when no bar appears on both sides.
    pub fn is_disjoint(&self) -> bool {
        self.cancelled().num_bars() == self.num_bars()
    }

    /// Signed sum of bar rank functions at `x ≤ y`.
    pub fn rank(&self, x: &[f64], y: &[f64]) -> i64 {
        let pos: i64 = self.positive.iter().map(|b| b.rank(self.shape, x, y)).sum();
        let neg: i64 = self.negative.iter().map(|b| b.rank(self.shape, x, y)).sum();
        pos - neg
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("barcode serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, BarcodeError> {
        let bad = |m: &str| BarcodeError::Json(m.to_string());
        let v: Value = serde_json::from_str(text).map_err(|e| BarcodeError::Json(e.to_string()))?;
        if v.get("version").and_then(Value::as_u64) != Some(1) {
            return Err(bad("expected version 1"));
        }
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| bad("missing n"))? as usize;
        let p = v.get("p").and_then(Value::as_u64).ok_or_else(|| bad("missing p"))? as u32;
        let shape = match v.get("shape").and_then(Value::as_str) {
            Some("hook") => Shape::Hook,
            Some("rect") => Shape::Rectangle,
            _ => return Err(bad("shape must be 'hook' or 'rect'")),
        };
        let inf = v.get("inf").and_then(Value::as_str).unwrap_or("inf").to_string();
        let coord = |x: &Value| -> Result<f64, BarcodeError> {
            match x {
                Value::Number(num) => num.as_f64().ok_or_else(|| bad("bad number")),
                Value::String(s) if *s == inf => Ok(f64::INFINITY),
                _ => Err(bad("coordinates must be numbers or the inf marker")),
            }
        };
        let vector = |x: &Value, allow_whole_inf: bool| -> Result<Vec<f64>, BarcodeError> {
            match x {
                Value::String(s) if allow_whole_inf && *s == inf => Ok(vec![f64::INFINITY; n]),
                Value::Array(a) if a.len() == n => a.iter().map(coord).collect(),
                _ => Err(bad("coordinate vector of the wrong length")),
            }
        };
        let bars = |key: &str| -> Result<Vec<Bar>, BarcodeError> {
            let arr = v.get(key).and_then(Value::as_array).ok_or_else(|| bad("missing bar list"))?;
            arr.iter()
                .map(|b| {
                    let i = vector(b.get("i").ok_or_else(|| bad("bar without i"))?, false)?;
                    let j = vector(b.get("j").ok_or_else(|| bad("bar without j"))?, shape == Shape::Hook)?;
                    let bar = Bar { i, j };
                    if bar.is_valid(shape) {
                        Ok(bar)
                    } else {
                        Err(bad("invalid bar"))
                    }
                })
                .collect()
        };
        let positive = bars("positive")?;
        let negative = bars("negative")?;
        let degrees = match v.get("degrees") {
            None | Some(Value::Null) => None,
            Some(Value::Object(map)) => {
                let mut d = BTreeMap::new();
                for (k, idx) in map {
                    let k: usize = k.parse().map_err(|_| bad("degree keys must be integers"))?;
                    let side = if k % 2 == 0 { positive.len() } else { negative.len() };
                    let idx: Vec<usize> = idx
                        .as_array()
                        .ok_or_else(|| bad("degree entry must be a list"))?
                        .iter()
                        .map(|x| x.as_u64().map(|u| u as usize).filter(|&u| u < side))
                        .collect::<Option<_>>()
                        .ok_or_else(|| bad("degree index out of range"))?;
                    d.insert(k, idx);
                }
                Some(d)
            }
            _ => return Err(bad("degrees must be an object")),
        };
        Ok(SignedBarcode { n, p, shape, positive, negative, degrees })
    }
}

struct Coord(f64);

impl Serialize for Coord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_infinite() {
            s.serialize_str("inf")
        } else if v.fract() == 0.0 && v.abs() < 9.0e15 {
            s.serialize_i64(v as i64)
        } else {
            s.serialize_f64(v)
        }
    }
}

struct Coords<'a>(&'a [f64]);

impl Serialize for Coords<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for &v in self.0 {
            seq.serialize_element(&Coord(v))?;
        }
        seq.end()
    }
}

struct BarJson<'a>(&'a Bar, Shape);

impl Serialize for BarJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Bar", 2)?;
        st.serialize_field("i", &Coords(&self.0.i))?;
        if self.1 == Shape::Hook && self.0.j_is_top() {
            st.serialize_field("j", "inf")?;
        } else {
            st.serialize_field("j", &Coords(&self.0.j))?;
        }
        st.end()
    }
}

struct Bars<'a>(&'a [Bar], Shape);

impl Serialize for Bars<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for b in self.0 {
            seq.serialize_element(&BarJson(b, self.1))?;
        }
        seq.end()
    }
}

struct Degrees<'a>(&'a BTreeMap<usize, Vec<usize>>);

impl Serialize for Degrees<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            m.serialize_entry(&k.to_string(), v)?;
        }
        m.end()
    }
}

impl Serialize for SignedBarcode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let fields = if self.degrees.is_some() { 8 } else { 7 };
        let mut st = s.serialize_struct("SignedBarcode", fields)?;
        st.serialize_field("version", &1)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("shape", self.shape.name())?;
        st.serialize_field("positive", &Bars(&self.positive, self.shape))?;
        st.serialize_field("negative", &Bars(&self.negative, self.shape))?;
        if let Some(d) = &self.degrees {
            st.serialize_field("degrees", &Degrees(d))?;
        }
        st.serialize_field("inf", "inf")?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(i: [f64; 2], j: [f64; 2]) -> Bar {
        Bar::new(i.to_vec(), j.to_vec())
    }

    #[test]
    fn json_layout() {
        let sbc = SignedBarcode::from_degrees(
            2,
            2,
            Shape::Hook,
            vec![vec![b([0., 0.], [0., 2.]), Bar::free(vec![0.5, 1.])], vec![b([0., 0.], [2., 1.])]],
        );
        let text = sbc.to_json();
        assert_eq!(
            text,
            r#"{"version":1,"n":2,"p":2,"shape":"hook","positive":[{"i":[0,0],"j":[0,2]},{"i":[0.5,1],"j":"inf"}],"negative":[{"i":[0,0],"j":[2,1]}],"degrees":{"0":[0,1],"1":[0]},"inf":"inf"}"#
        );
        assert_eq!(SignedBarcode::from_json(&text).unwrap(), sbc);
    }

    #[test]
    fn rect_json_per_coordinate_infinity() {
        let mut sbc = SignedBarcode::empty(2, 3, Shape::Rectangle);
        sbc.positive.push(b([0., 0.], [f64::INFINITY, 2.]));
        let text = sbc.to_json();
        assert!(text.contains(r#"{"i":[0,0],"j":["inf",2]}"#));
        assert_eq!(SignedBarcode::from_json(&text).unwrap(), sbc);
        assert!(SignedBarcode::from_json(r#"{"version":2}"#).is_err());
    }

    #[test]
    fn cancellation_and_disjointness() {
        let mut sbc = SignedBarcode::empty(2, 2, Shape::Hook);
        sbc.positive = vec![b([0., 0.], [1., 1.]), b([0., 0.], [1., 1.]), b([0., 0.], [2., 2.])];
        sbc.negative = vec![b([0., 0.], [1., 1.]), b([1., 0.], [2., 2.])];
        assert!(!sbc.is_disjoint());
        let c = sbc.cancelled();
        assert_eq!(c.positive.len(), 2);
        assert_eq!(c.negative.len(), 1);
        assert!(c.is_disjoint());
    }

    #[test]
    fn rank_functions() {
        let h = b([0., 0.], [1., 1.]);
        assert_eq!(h.hook_rank(&[0., 0.], &[5., 0.]), 1);
        assert_eq!(h.hook_rank(&[0., 0.], &[1., 1.]), 0);
        assert_eq!(Bar::free(vec![0., 0.]).hook_rank(&[1., 1.], &[9., 9.]), 1);
        let r = b([0., 0.], [2., f64::INFINITY]);
        assert_eq!(r.rect_rank(&[0., 0.], &[1.5, 100.]), 1);
        assert_eq!(r.rect_rank(&[0., 0.], &[2., 0.]), 0);
    }
}
