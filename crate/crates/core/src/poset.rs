//! Finite posets: product grids with an optional top, the pairs poset with
//! its diagonal, and the poset of non-empty upsets of a grid.

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// Interned element id inside a [`QuotientPoset`] or [`GridPoset`].
pub type ElemId = usize;

/// Exhaustive order validation runs at construction below this size.
pub const VALIDATE_LIMIT: usize = 1500;

/// Default cap on the number of upsets enumerated by [`QuotientPoset::upsets`].
pub const UPSET_LIMIT: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PosetError {
    #[error("a grid needs at least one axis")]
    NoAxes,
    #[error("axis {axis} is empty")]
    EmptyAxis { axis: usize },
    #[error("axis {axis} has a non-finite coordinate")]
    NonFinite { axis: usize },
    #[error("axis {axis} is not strictly increasing at position {pos}")]
    NotIncreasing { axis: usize, pos: usize },
    #[error("the pairs poset needs a grid with a top element")]
    MissingTop,
    #[error("the upset poset needs a grid without a top element")]
    UnexpectedTop,
    #[error("more than {limit} upsets")]
    TooManyUpsets { limit: usize },
    #[error("not a partial order: {0}")]
    InvalidOrder(String),
}

/// Product of finite chains with real grades per axis, plus an optional top `⊤`.
///
/// Grid points are numbered in row-major order (last axis fastest), which is a
/// linear extension of the product order. `⊤`, when present, has id `num_points()`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoset {
    shape: Vec<usize>,
    coords: Vec<Vec<f64>>,
    has_top: bool,
    strides: Vec<usize>,
    num_points: usize,
}

impl GridPoset {
    pub fn build(axis_coords: Vec<Vec<f64>>, with_top: bool) -> Result<Self, PosetError> {
        if axis_coords.is_empty() {
            return Err(PosetError::NoAxes);
        }
        for (axis, c) in axis_coords.iter().enumerate() {
            if c.is_empty() {
                return Err(PosetError::EmptyAxis { axis });
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(PosetError::NonFinite { axis });
            }
            if let Some(pos) = c.windows(2).position(|w| w[0] >= w[1]) {
                return Err(PosetError::NotIncreasing { axis, pos: pos + 1 });
            }
        }
        let shape: Vec<usize> = axis_coords.iter().map(Vec::len).collect();
        let mut strides = vec![1; shape.len()];
        for k in (0..shape.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * shape[k + 1];
        }
        let num_points = shape.iter().product();
        Ok(GridPoset {
            shape,
            coords: axis_coords,
            has_top: with_top,
            strides,
            num_points,
        })
    }

    /// Integer grid `[m_1] × … × [m_n]` with grades `0, 1, …`.
    pub fn integer(shape: &[usize], with_top: bool) -> Result<Self, PosetError> {
        Self::build(
            shape.iter().map(|&m| (0..m).map(|v| v as f64).collect()).collect(),
            with_top,
        )
    }

    pub fn n(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn axis_coords(&self, axis: usize) -> &[f64] {
        &self.coords[axis]
    }

    pub fn has_top(&self) -> bool {
        self.has_top
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    /// Number of elements, `⊤` included.
    pub fn len(&self) -> usize {
        self.num_points + usize::from(self.has_top)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn top(&self) -> Option<ElemId> {
        self.has_top.then_some(self.num_points)
    }

    pub fn is_top(&self, id: ElemId) -> bool {
        self.has_top && id == self.num_points
    }

    pub fn max_point(&self) -> ElemId {
        self.num_points - 1
    }

    pub fn index(&self, point: &[usize]) -> ElemId {
        debug_assert_eq!(point.len(), self.n());
        point.iter().zip(&self.strides).map(|(x, s)| x * s).sum()
    }

    pub fn try_index(&self, point: &[usize]) -> Option<ElemId> {
        (point.len() == self.n() && point.iter().zip(&self.shape).all(|(x, m)| x < m))
            .then(|| self.index(point))
    }

    /// Index vector of a grid point; panics on `⊤`.
    pub fn point(&self, id: ElemId) -> Vec<usize> {
        assert!(id < self.num_points, "element {id} is not a grid point");
        self.shape
            .iter()
            .zip(&self.strides)
            .map(|(m, s)| (id / s) % m)
            .collect()
    }

    #[inline]
    pub fn axis_index(&self, id: ElemId, axis: usize) -> usize {
        (id / self.strides[axis]) % self.shape[axis]
    }

    /// Real grade of a grid point; `None` for `⊤`.
    pub fn grade(&self, id: ElemId) -> Option<Vec<f64>> {
        (id < self.num_points).then(|| {
            (0..self.n())
                .map(|k| self.coords[k][self.axis_index(id, k)])
                .collect()
        })
    }

    /// Grid point whose grade equals `grade` exactly.
    pub fn locate(&self, grade: &[f64]) -> Option<ElemId> {
        if grade.len() != self.n() {
            return None;
        }
        let mut idx = Vec::with_capacity(self.n());
        for (k, &g) in grade.iter().enumerate() {
            idx.push(self.coords[k].iter().position(|&c| c == g)?);
        }
        Some(self.index(&idx))
    }

    /// Largest grid point whose grade is `≤ grade`, if any.
    pub fn floor(&self, grade: &[f64]) -> Option<ElemId> {
        let mut idx = Vec::with_capacity(self.n());
        for (k, &g) in grade.iter().enumerate() {
            let c = &self.coords[k];
            let below = c.partition_point(|&v| v <= g);
            if below == 0 {
                return None;
            }
            idx.push(below - 1);
        }
        Some(self.index(&idx))
    }

    pub fn leq(&self, a: ElemId, b: ElemId) -> bool {
        if self.is_top(b) {
            return true;
        }
        if self.is_top(a) {
            return false;
        }
        (0..self.n()).all(|k| self.axis_index(a, k) <= self.axis_index(b, k))
    }

    pub fn join(&self, a: ElemId, b: ElemId) -> ElemId {
        if self.is_top(a) || self.is_top(b) {
            return self.num_points;
        }
        let p: Vec<usize> = (0..self.n())
            .map(|k| self.axis_index(a, k).max(self.axis_index(b, k)))
            .collect();
        self.index(&p)
    }

    pub fn meet(&self, a: ElemId, b: ElemId) -> ElemId {
        if self.is_top(a) {
            return b;
        }
        if self.is_top(b) {
            return a;
        }
        let p: Vec<usize> = (0..self.n())
            .map(|k| self.axis_index(a, k).min(self.axis_index(b, k)))
            .collect();
        self.index(&p)
    }

    /// One step up along `axis`, if it stays in the grid.
    pub fn step(&self, id: ElemId, axis: usize) -> Option<ElemId> {
        (id < self.num_points && self.axis_index(id, axis) + 1 < self.shape[axis])
            .then(|| id + self.strides[axis])
    }

    pub fn step_down(&self, id: ElemId, axis: usize) -> Option<ElemId> {
        (id < self.num_points && self.axis_index(id, axis) > 0).then(|| id - self.strides[axis])
    }

    /// Upper covers, `⊤` included when it covers the maximum.
    pub fn upper_covers(&self, id: ElemId) -> Vec<ElemId> {
        if self.is_top(id) {
            return Vec::new();
        }
        let mut out: Vec<ElemId> = (0..self.n()).filter_map(|k| self.step(id, k)).collect();
        if self.has_top && id == self.max_point() {
            out.push(self.num_points);
        }
        out
    }

    pub fn lower_covers(&self, id: ElemId) -> Vec<ElemId> {
        if self.is_top(id) {
            return vec![self.max_point()];
        }
        (0..self.n()).filter_map(|k| self.step_down(id, k)).collect()
    }

    /// Minimal elements of `{x : x ≰ id}`.
    pub fn min_not_below(&self, id: ElemId) -> Vec<ElemId> {
        if self.is_top(id) {
            return Vec::new();
        }
        let p = self.point(id);
        let mut out = Vec::new();
        for k in 0..self.n() {
            if p[k] + 1 < self.shape[k] {
                let mut q = vec![0; self.n()];
                q[k] = p[k] + 1;
                out.push(self.index(&q));
            }
        }
        if out.is_empty() && self.has_top {
            out.push(self.num_points);
        }
        out
    }

    /// Sum of indices; `⊤` sits one above the maximum.
    pub fn height(&self, id: ElemId) -> usize {
        if self.is_top(id) {
            self.shape.iter().map(|m| m - 1).sum::<usize>() + 1
        } else {
            (0..self.n()).map(|k| self.axis_index(id, k)).sum()
        }
    }

    /// Same grid with or without `⊤`.
    pub fn with_top(&self, top: bool) -> GridPoset {
        let mut g = self.clone();
        g.has_top = top;
        g
    }
}

/// An upset of a grid, stored by membership and by its minimal elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Upset {
    pub members: FixedBitSet,
    pub minimal: Vec<ElemId>,
}

impl Upset {
    pub fn contains(&self, x: ElemId) -> bool {
        self.members.contains(x)
    }

    pub fn generated_by(grid: &GridPoset, gens: &[ElemId]) -> Upset {
        let mut members = FixedBitSet::with_capacity(grid.num_points());
        for x in 0..grid.num_points() {
            if gens.iter().any(|&g| grid.leq(g, x)) {
                members.insert(x);
            }
        }
        Self::from_members(grid, members)
    }

    fn from_members(grid: &GridPoset, members: FixedBitSet) -> Upset {
        let minimal = members
            .ones()
            .filter(|&x| {
                (0..grid.n())
                    .filter_map(|k| grid.step_down(x, k))
                    .all(|y| !members.contains(y))
            })
            .collect();
        Upset { members, minimal }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PosetKind {
    /// Grid points with the product order, `Q = ∅`.
    Grid,
    /// Pairs `a ≤ b` in `S∞`, `Q` the diagonal.
    Pairs,
    /// Non-empty upsets ordered by reverse inclusion, `Q = ∅`.
    Upsets,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Point(ElemId),
    Pair(ElemId, ElemId),
    Upset(Upset),
}

/// A finite poset `P` with a forbidden set `Q`; an arrow `i ≤ j` survives when no
/// element of `Q` lies between its endpoints.
#[derive(Debug, Clone)]
pub struct QuotientPoset {
    grid: GridPoset,
    kind: PosetKind,
    elements: Vec<Element>,
    forbidden: Vec<bool>,
    upper: Vec<Vec<ElemId>>,
    lower: Vec<Vec<ElemId>>,
    linear: Vec<ElemId>,
    pair_ids: Vec<usize>,
    // row i holds {j : i ≤ j}; only the upset poset needs explicit rows
    up_rows: Vec<FixedBitSet>,
}

const NONE: usize = usize::MAX;

impl QuotientPoset {
    /// The grid points (any `⊤` is dropped) with `Q = ∅`.
    pub fn grid(grid: &GridPoset) -> Result<Self, PosetError> {
        let g = grid.with_top(false);
        let len = g.num_points();
        let elements = (0..len).map(Element::Point).collect();
        let upper = (0..len).map(|x| g.upper_covers(x)).collect();
        let lower = (0..len).map(|x| g.lower_covers(x)).collect();
        Self::finish(QuotientPoset {
            grid: g,
            kind: PosetKind::Grid,
            elements,
            forbidden: vec![false; len],
            upper,
            lower,
            linear: (0..len).collect(),
            pair_ids: Vec::new(),
            up_rows: Vec::new(),
        })
    }

    pub fn pairs(grid: &GridPoset) -> Result<Self, PosetError> {
        if !grid.has_top() {
            return Err(PosetError::MissingTop);
        }
        let g = grid.clone();
        let s = g.len();
        let mut pair_ids = vec![NONE; s * s];
        let mut elements = Vec::new();
        let mut forbidden = Vec::new();
        for a in 0..s {
            for b in 0..s {
                if g.leq(a, b) {
                    pair_ids[a * s + b] = elements.len();
                    elements.push(Element::Pair(a, b));
                    forbidden.push(a == b);
                }
            }
        }
        let len = elements.len();
        let mut upper = vec![Vec::new(); len];
        let mut lower = vec![Vec::new(); len];
        for (id, e) in elements.iter().enumerate() {
            let Element::Pair(a, b) = *e else { unreachable!() };
            for a2 in g.upper_covers(a) {
                if g.leq(a2, b) {
                    upper[id].push(pair_ids[a2 * s + b]);
                }
            }
            for b2 in g.upper_covers(b) {
                upper[id].push(pair_ids[a * s + b2]);
            }
            for a2 in g.lower_covers(a) {
                lower[id].push(pair_ids[a2 * s + b]);
            }
            for b2 in g.lower_covers(b) {
                if g.leq(a, b2) {
                    lower[id].push(pair_ids[a * s + b2]);
                }
            }
        }
        let mut linear: Vec<ElemId> = (0..len).collect();
        linear.sort_by_key(|&id| {
            let Element::Pair(a, b) = elements[id] else { unreachable!() };
            (g.height(a) + g.height(b), id)
        });
        Self::finish(QuotientPoset {
            grid: g,
            kind: PosetKind::Pairs,
            elements,
            forbidden,
            upper,
            lower,
            linear,
            pair_ids,
            up_rows: Vec::new(),
        })
    }

    pub fn upsets(grid: &GridPoset) -> Result<Self, PosetError> {
        Self::upsets_with_limit(grid, UPSET_LIMIT)
    }

    pub fn upsets_with_limit(grid: &GridPoset, limit: usize) -> Result<Self, PosetError> {
        if grid.has_top() {
            return Err(PosetError::UnexpectedTop);
        }
        let g = grid.clone();
        let np = g.num_points();
        // decide membership from the maximum downwards; x may join only if its
        // upper covers already did
        let mut found: Vec<FixedBitSet> = Vec::new();
        let mut current = FixedBitSet::with_capacity(np);
        fn rec(
            g: &GridPoset,
            x: usize,
            current: &mut FixedBitSet,
            found: &mut Vec<FixedBitSet>,
            limit: usize,
        ) -> Result<(), PosetError> {
            if x == 0 {
                if current.count_ones(..) > 0 {
                    if found.len() == limit {
                        return Err(PosetError::TooManyUpsets { limit });
                    }
                    found.push(current.clone());
                }
                return Ok(());
            }
            let y = x - 1;
            rec(g, y, current, found, limit)?;
            if g.upper_covers(y).iter().all(|&z| current.contains(z)) {
                current.insert(y);
                rec(g, y, current, found, limit)?;
                current.set(y, false);
            }
            Ok(())
        }
        rec(&g, np, &mut current, &mut found, limit)?;
        found.sort_by_key(|m| (std::cmp::Reverse(m.count_ones(..)), m.ones().collect::<Vec<_>>()));
        let elements: Vec<Element> = found
            .iter()
            .map(|m| Element::Upset(Upset::from_members(&g, m.clone())))
            .collect();
        let len = elements.len();
        let mut up_rows = vec![FixedBitSet::with_capacity(len); len];
        for i in 0..len {
            for j in 0..len {
                if found[j].is_subset(&found[i]) {
                    up_rows[i].insert(j);
                }
            }
        }
        let (upper, lower) = covers_from_rows(&up_rows);
        Self::finish(QuotientPoset {
            grid: g,
            kind: PosetKind::Upsets,
            elements,
            forbidden: vec![false; len],
            upper,
            lower,
            linear: (0..len).collect(),
            pair_ids: Vec::new(),
            up_rows,
        })
    }

    fn finish(p: QuotientPoset) -> Result<Self, PosetError> {
        if p.len() <= VALIDATE_LIMIT {
            p.validate_order()?;
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn kind(&self) -> PosetKind {
        self.kind
    }

    pub fn grid_poset(&self) -> &GridPoset {
        &self.grid
    }

    pub fn element(&self, id: ElemId) -> &Element {
        &self.elements[id]
    }

    pub fn is_forbidden(&self, id: ElemId) -> bool {
        self.forbidden[id]
    }

    pub fn forbidden_count(&self) -> usize {
        self.forbidden.iter().filter(|&&f| f).count()
    }

    /// Elements in an order where `i < j` implies `i` comes first.
    pub fn linear_extension(&self) -> &[ElemId] {
        &self.linear
    }

    pub fn upper_covers(&self, id: ElemId) -> &[ElemId] {
        &self.upper[id]
    }

    pub fn lower_covers(&self, id: ElemId) -> &[ElemId] {
        &self.lower[id]
    }

    pub fn pair(&self, id: ElemId) -> (ElemId, ElemId) {
        match self.elements[id] {
            Element::Pair(a, b) => (a, b),
            _ => panic!("element {id} is not a pair"),
        }
    }

    pub fn pair_id(&self, a: ElemId, b: ElemId) -> Option<ElemId> {
        let s = self.grid.len();
        if self.kind != PosetKind::Pairs || a >= s || b >= s {
            return None;
        }
        let id = self.pair_ids[a * s + b];
        (id != NONE).then_some(id)
    }

    pub fn upset(&self, id: ElemId) -> &Upset {
        match &self.elements[id] {
            Element::Upset(u) => u,
            _ => panic!("element {id} is not an upset"),
        }
    }

    /// Id of the upset with exactly these members.
    pub fn upset_id(&self, members: &FixedBitSet) -> Option<ElemId> {
        (0..self.len()).find(|&i| &self.upset(i).members == members)
    }

    pub fn leq(&self, i: ElemId, j: ElemId) -> bool {
        match self.kind {
            PosetKind::Grid => self.grid.leq(i, j),
            PosetKind::Pairs => {
                let (a, b) = self.pair(i);
                let (c, d) = self.pair(j);
                self.grid.leq(a, c) && self.grid.leq(b, d)
            }
            PosetKind::Upsets => self.up_rows[i].contains(j),
        }
    }

    /// `i ≤ j` with no forbidden element in between.
    pub fn survives(&self, i: ElemId, j: ElemId) -> bool {
        if !self.leq(i, j) {
            return false;
        }
        match self.kind {
            PosetKind::Pairs => {
                let (_, b) = self.pair(i);
                let (c, _) = self.pair(j);
                !self.grid.leq(b, c)
            }
            _ => true,
        }
    }

    /// Survival straight from the definition, by scanning `Q`.
    pub fn survives_raw(&self, i: ElemId, j: ElemId) -> bool {
        self.leq(i, j)
            && !(0..self.len()).any(|x| self.forbidden[x] && self.leq(i, x) && self.leq(x, j))
    }

    /// Minimal elements of `{x : x ≰ i}`.
    pub fn min_not_below(&self, i: ElemId) -> Vec<ElemId> {
        let not_below: Vec<ElemId> = (0..self.len()).filter(|&x| !self.leq(x, i)).collect();
        not_below
            .iter()
            .copied()
            .filter(|&x| !not_below.iter().any(|&y| y != x && self.leq(y, x)))
            .collect()
    }

    /// Exhaustive check of reflexivity, antisymmetry, transitivity, the cover
    /// lists and the linear extension.
    pub fn validate_order(&self) -> Result<(), PosetError> {
        let len = self.len();
        let rows: Vec<FixedBitSet> = (0..len)
            .map(|i| {
                let mut r = FixedBitSet::with_capacity(len);
                for j in 0..len {
                    if self.leq(i, j) {
                        r.insert(j);
                    }
                }
                r
            })
            .collect();
        for i in 0..len {
            if !rows[i].contains(i) {
                return Err(PosetError::InvalidOrder(format!("{i} is not ≤ itself")));
            }
            for j in rows[i].ones() {
                if j != i && rows[j].contains(i) {
                    return Err(PosetError::InvalidOrder(format!("{i} and {j} are equivalent")));
                }
                if !rows[j].is_subset(&rows[i]) {
                    return Err(PosetError::InvalidOrder(format!("transitivity fails through {i} ≤ {j}")));
                }
            }
        }
        let (upper, _) = covers_from_rows(&rows);
        for i in 0..len {
            let mut mine = self.upper[i].clone();
            mine.sort_unstable();
            if mine != upper[i] {
                return Err(PosetError::InvalidOrder(format!("wrong upper covers at {i}")));
            }
            for &j in &self.upper[i] {
                if !self.lower[j].contains(&i) {
                    return Err(PosetError::InvalidOrder(format!("cover {i} < {j} missing below")));
                }
            }
        }
        let mut pos = vec![0; len];
        for (k, &e) in self.linear.iter().enumerate() {
            pos[e] = k;
        }
        for i in 0..len {
            for &j in &self.upper[i] {
                if pos[i] >= pos[j] {
                    return Err(PosetError::InvalidOrder("linear extension out of order".into()));
                }
            }
        }
        Ok(())
    }
}

/// Upper and lower covers (sorted) from rows `{j : i ≤ j}`.
fn covers_from_rows(rows: &[FixedBitSet]) -> (Vec<Vec<ElemId>>, Vec<Vec<ElemId>>) {
    let len = rows.len();
    let mut upper = vec![Vec::new(); len];
    let mut lower = vec![Vec::new(); len];
    for i in 0..len {
        let strict: Vec<usize> = rows[i].ones().filter(|&j| j != i).collect();
        for &j in &strict {
            let between = strict.iter().any(|&k| k != j && rows[k].contains(j));
            if !between {
                upper[i].push(j);
                lower[j].push(i);
            }
        }
    }
    (upper, lower)
}
