//! Persistence modules on grids: presentations, realization as cokernels,
//! interval modules, direct sums, structure maps and the rank invariant.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::linalg::{check_prime, quotient_basis, reduce, FpMatrix, LinalgError};
use crate::poset::{ElemId, GridPoset, PosetError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModuleError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("relation {relation} touches generator {generator} graded above it")]
    Domination { relation: usize, generator: usize },
    #[error("grade has {got} coordinates, expected {expected}")]
    Arity { expected: usize, got: usize },
    #[error("relation {relation} refers to missing generator {generator}")]
    MissingGenerator { relation: usize, generator: usize },
    #[error("grade {0:?} is not a point of the grid")]
    GridTooSmall(Vec<f64>),
    #[error("support is not an interval: {0}")]
    NotInterval(&'static str),
    #[error("elements {0} and {1} are not comparable")]
    Incomparable(ElemId, ElemId),
    #[error("modules live on different grids or fields")]
    GridMismatch,
    #[error("structure maps do not commute at point {point} for axes {k} and {l}")]
    Commutativity { point: ElemId, k: usize, l: usize },
    #[error("map at point {point} along axis {axis} has the wrong shape")]
    MapShape { point: ElemId, axis: usize },
    #[error("shift by {0:?} does not fit the grid")]
    Shift(Vec<isize>),
    #[error("morphism is not natural at point {point} along axis {axis}")]
    Naturality { point: ElemId, axis: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// A relation: a grade and a sparse column over the generators.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub grade: Vec<f64>,
    pub column: Vec<(usize, u32)>,
}

/// A finite presentation `⊕ P_{r} → ⊕ P_{g} → M → 0` over `F_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    pub n: usize,
    pub p: u32,
    pub generators: Vec<Vec<f64>>,
    pub relations: Vec<Relation>,
}

fn grade_leq(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl Presentation {
    /// Validates arities, the field and grade domination; merges repeated column
    /// entries and drops zero coefficients.
    pub fn new(
        n: usize,
        p: u32,
        generators: Vec<Vec<f64>>,
        relations: Vec<Relation>,
    ) -> Result<Self, ModuleError> {
        check_prime(p)?;
        for g in &generators {
            if g.len() != n {
                return Err(ModuleError::Arity { expected: n, got: g.len() });
            }
        }
        let mut clean = Vec::with_capacity(relations.len());
        for (ri, rel) in relations.into_iter().enumerate() {
            if rel.grade.len() != n {
                return Err(ModuleError::Arity { expected: n, got: rel.grade.len() });
            }
            let mut dense = std::collections::BTreeMap::new();
            for (c, v) in rel.column {
                if c >= generators.len() {
                    return Err(ModuleError::MissingGenerator { relation: ri, generator: c });
                }
                let e = dense.entry(c).or_insert(0u32);
                *e = (*e + v % p) % p;
            }
            let column: Vec<(usize, u32)> = dense.into_iter().filter(|&(_, v)| v != 0).collect();
            for &(c, _) in &column {
                if !grade_leq(&generators[c], &rel.grade) {
                    return Err(ModuleError::Domination { relation: ri, generator: c });
                }
            }
            clean.push(Relation { grade: rel.grade, column });
        }
        Ok(Presentation { n, p, generators, relations: clean })
    }

    pub fn parse(text: &str) -> Result<Self, ModuleError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line: usize, msg: &str| ModuleError::Parse { line, msg: msg.to_string() };
        let (ln, header) = lines.next().ok_or_else(|| err(0, "empty input"))?;
        match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["rkdec-presentation", "v1"] => {}
            ["rkdec-presentation", v] => return Err(err(ln, &format!("unsupported version {v}"))),
            _ => return Err(err(ln, "expected header 'rkdec-presentation v1'")),
        }
        let (ln, params) = lines.next().ok_or_else(|| err(ln, "missing 'n=<int> p=<prime>'"))?;
        let (mut n, mut p) = (None, None);
        for tok in params.split_whitespace() {
            match tok.split_once('=') {
                Some(("n", v)) => n = v.parse::<usize>().ok(),
                Some(("p", v)) => p = v.parse::<u32>().ok(),
                _ => return Err(err(ln, &format!("unexpected token '{tok}'"))),
            }
        }
        let (Some(n), Some(p)) = (n, p) else {
            return Err(err(ln, "expected 'n=<int> p=<prime>'"));
        };
        if n == 0 {
            return Err(err(ln, "n must be positive"));
        }
        if check_prime(p).is_err() {
            return Err(err(ln, &format!("{p} is not a supported prime")));
        }
        let parse_grade = |ln: usize, s: &str| -> Result<Vec<f64>, ModuleError> {
            let g: Vec<f64> = s
                .split_whitespace()
                .map(|t| t.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect::<Option<_>>()
                .ok_or_else(|| err(ln, "expected decimal reals"))?;
            if g.len() != n {
                return Err(err(ln, &format!("expected {n} coordinates, found {}", g.len())));
            }
            Ok(g)
        };
        let count = |ln: usize, line: &str, key: &str| -> Result<usize, ModuleError> {
            match line.split_whitespace().collect::<Vec<_>>().as_slice() {
                [k, c] if *k == key => c.parse().map_err(|_| err(ln, "bad count")),
                _ => Err(err(ln, &format!("expected '{key} <count>'"))),
            }
        };
        let (ln, line) = lines.next().ok_or_else(|| err(ln, "missing generators"))?;
        let g = count(ln, line, "generators")?;
        let mut generators = Vec::with_capacity(g);
        let mut last = ln;
        for _ in 0..g {
            let (ln, line) = lines.next().ok_or_else(|| err(last, "too few generator lines"))?;
            generators.push(parse_grade(ln, line)?);
            last = ln;
        }
        let (ln, line) = lines.next().ok_or_else(|| err(last, "missing relations"))?;
        let r = count(ln, line, "relations")?;
        let mut relations = Vec::with_capacity(r);
        last = ln;
        for _ in 0..r {
            let (ln, line) = lines.next().ok_or_else(|| err(last, "too few relation lines"))?;
            let (grade, col) = line.split_once(';').ok_or_else(|| err(ln, "missing ';'"))?;
            let grade = parse_grade(ln, grade)?;
            let mut column = Vec::new();
            for tok in col.split_whitespace() {
                let (c, v) = tok.split_once(':').ok_or_else(|| err(ln, "expected <col>:<coeff>"))?;
                let c: usize = c.parse().map_err(|_| err(ln, "bad column index"))?;
                let v: i64 = v.parse().map_err(|_| err(ln, "bad coefficient"))?;
                if c >= g {
                    return Err(err(ln, &format!("column {c} out of range")));
                }
                column.push((c, reduce(v, p)));
            }
            relations.push(Relation { grade, column });
            last = ln;
        }
        if let Some((ln, _)) = lines.next() {
            return Err(err(ln, "trailing content"));
        }
        Presentation::new(n, p, generators, relations)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let grade = |g: &[f64]| g.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(" ");
        writeln!(s, "rkdec-presentation v1").unwrap();
        writeln!(s, "n={} p={}", self.n, self.p).unwrap();
        writeln!(s, "generators {}", self.generators.len()).unwrap();
        for g in &self.generators {
            writeln!(s, "{}", grade(g)).unwrap();
        }
        writeln!(s, "relations {}", self.relations.len()).unwrap();
        for r in &self.relations {
            let col: Vec<String> = r.column.iter().map(|(c, v)| format!("{c}:{v}")).collect();
            writeln!(s, "{} ; {}", grade(&r.grade), col.join(" ")).unwrap();
        }
        s
    }

    /// All grades, generators first.
    pub fn grades(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.generators.iter().chain(self.relations.iter().map(|r| &r.grade))
    }

    /// Product of the distinct coordinates of all grades, with `⊤` adjoined.
    pub fn compress_grades(&self) -> Result<GridPoset, ModuleError> {
        let mut axes = vec![Vec::new(); self.n];
        for g in self.grades() {
            for (k, &v) in g.iter().enumerate() {
                axes[k].push(v);
            }
        }
        for a in axes.iter_mut() {
            a.sort_by(f64::total_cmp);
            a.dedup();
            if a.is_empty() {
                a.push(0.0);
            }
        }
        Ok(GridPoset::build(axes, true)?)
    }

    pub fn direct_sum(parts: &[Presentation]) -> Result<Presentation, ModuleError> {
        let first = parts.first().ok_or(ModuleError::GridMismatch)?;
        let mut generators = Vec::new();
        let mut relations = Vec::new();
        for part in parts {
            if part.n != first.n || part.p != first.p {
                return Err(ModuleError::GridMismatch);
            }
            let off = generators.len();
            generators.extend(part.generators.iter().cloned());
            relations.extend(part.relations.iter().map(|r| Relation {
                grade: r.grade.clone(),
                column: r.column.iter().map(|&(c, v)| (c + off, v)).collect(),
            }));
        }
        Presentation::new(first.n, first.p, generators, relations)
    }

    /// Translate every grade by `delta`.
    pub fn translate(&self, delta: &[f64]) -> Presentation {
        let mv = |g: &Vec<f64>| g.iter().zip(delta).map(|(a, d)| a + d).collect();
        Presentation {
            n: self.n,
            p: self.p,
            generators: self.generators.iter().map(mv).collect(),
            relations: self
                .relations
                .iter()
                .map(|r| Relation { grade: mv(&r.grade), column: r.column.clone() })
                .collect(),
        }
    }

    /// Presentation of the hook `L_{i,j}`; `j = None` is `⊤`.
    pub fn hook(p: u32, i: &[f64], j: Option<&[f64]>) -> Result<Presentation, ModuleError> {
        let relations = match j {
            Some(j) => vec![Relation {
                grade: i.iter().zip(j).map(|(a, b)| a.max(*b)).collect(),
                column: vec![(0, 1)],
            }],
            None => Vec::new(),
        };
        Presentation::new(i.len(), p, vec![i.to_vec()], relations)
    }

    /// Presentation of the right-open rectangle `[a, b)`; `None` coordinates are infinite.
    pub fn rectangle(p: u32, a: &[f64], b: &[Option<f64>]) -> Result<Presentation, ModuleError> {
        let relations = b
            .iter()
            .enumerate()
            .filter_map(|(k, bk)| {
                bk.map(|v| {
                    let mut g = a.to_vec();
                    g[k] = v;
                    Relation { grade: g, column: vec![(0, 1)] }
                })
            })
            .collect();
        Presentation::new(a.len(), p, vec![a.to_vec()], relations)
    }
}

/// A pointwise finite-dimensional representation of a grid over `F_p`, given by
/// dimensions and unit-step matrices. `⊤`, if the grid has one, carries zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceModule {
    grid: GridPoset,
    p: u32,
    dims: Vec<usize>,
    steps: Vec<Vec<Option<FpMatrix>>>,
}

impl PersistenceModule {
    /// Checks shapes and commutativity of every unit square.
    pub fn new(
        grid: GridPoset,
        p: u32,
        dims: Vec<usize>,
        steps: Vec<Vec<Option<FpMatrix>>>,
    ) -> Result<Self, ModuleError> {
        check_prime(p)?;
        let np = grid.num_points();
        if dims.len() != np || steps.len() != np {
            return Err(ModuleError::GridMismatch);
        }
        for x in 0..np {
            if steps[x].len() != grid.n() {
                return Err(ModuleError::GridMismatch);
            }
            for k in 0..grid.n() {
                match (grid.step(x, k), &steps[x][k]) {
                    (None, None) => {}
                    (Some(y), Some(m)) if m.shape() == (dims[y], dims[x]) && m.p() == p => {}
                    _ => return Err(ModuleError::MapShape { point: x, axis: k }),
                }
            }
        }
        let m = PersistenceModule { grid, p, dims, steps };
        m.check_commutativity()?;
        Ok(m)
    }

    pub fn check_commutativity(&self) -> Result<(), ModuleError> {
        let g = &self.grid;
        for x in 0..g.num_points() {
            for k in 0..g.n() {
                for l in k + 1..g.n() {
                    let (Some(xk), Some(xl)) = (g.step(x, k), g.step(x, l)) else { continue };
                    let a = self.step(xk, l).unwrap().mul(self.step(x, k).unwrap())?;
                    let b = self.step(xl, k).unwrap().mul(self.step(x, l).unwrap())?;
                    if a != b {
                        return Err(ModuleError::Commutativity { point: x, k, l });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn zero(grid: GridPoset, p: u32) -> Self {
        let np = grid.num_points();
        let steps = (0..np)
            .map(|x| (0..grid.n()).map(|k| grid.step(x, k).map(|_| FpMatrix::zeros(0, 0, p))).collect())
            .collect();
        PersistenceModule { grid, p, dims: vec![0; np], steps }
    }

    /// `M(x) = coker(relations ≤ x → generators ≤ x)` at each grid point.
    ///
    /// Grades need not be grid points; the grid then samples the module.
    pub fn realize_sampled(pres: &Presentation, grid: &GridPoset) -> Result<Self, ModuleError> {
        let p = pres.p;
        let np = grid.num_points();
        if grid.n() != pres.n {
            return Err(ModuleError::Arity { expected: grid.n(), got: pres.n });
        }
        let mut gens_at = Vec::with_capacity(np);
        let mut quotients = Vec::with_capacity(np);
        for x in 0..np {
            let gx = grid.grade(x).unwrap();
            let gens: Vec<usize> = (0..pres.generators.len())
                .filter(|&i| grade_leq(&pres.generators[i], &gx))
                .collect();
            let mut local = vec![usize::MAX; pres.generators.len()];
            for (pos, &i) in gens.iter().enumerate() {
                local[i] = pos;
            }
            let rels: Vec<&Relation> =
                pres.relations.iter().filter(|r| grade_leq(&r.grade, &gx)).collect();
            let mut a = FpMatrix::zeros(gens.len(), rels.len(), p);
            for (j, r) in rels.iter().enumerate() {
                for &(c, v) in &r.column {
                    a.set(local[c], j, v);
                }
            }
            quotients.push(quotient_basis(gens.len(), &a)?);
            gens_at.push((gens, local));
        }
        let dims: Vec<usize> = quotients.iter().map(|q| q.dim()).collect();
        let mut steps = Vec::with_capacity(np);
        for x in 0..np {
            let mut row = Vec::with_capacity(grid.n());
            for k in 0..grid.n() {
                row.push(grid.step(x, k).map(|y| {
                    let mut m = FpMatrix::zeros(dims[y], dims[x], p);
                    let (gx, _) = &gens_at[x];
                    let (_, ly) = &gens_at[y];
                    for (c, &pos) in quotients[x].complement.iter().enumerate() {
                        let target = ly[gx[pos]];
                        for r in 0..dims[y] {
                            m.set(r, c, quotients[y].projection.get(r, target));
                        }
                    }
                    m
                }));
            }
            steps.push(row);
        }
        Ok(PersistenceModule { grid: grid.clone(), p, dims, steps })
    }

    /// Like [`Self::realize_sampled`] but every grade must be a grid point.
    pub fn realize(pres: &Presentation, grid: &GridPoset) -> Result<Self, ModuleError> {
        for g in pres.grades() {
            if grid.locate(g).is_none() {
                return Err(ModuleError::GridTooSmall(g.clone()));
            }
        }
        Self::realize_sampled(pres, grid)
    }

    /// Interval module with identity maps inside `support` (indexed by grid point).
    pub fn interval(grid: &GridPoset, p: u32, support: &[bool]) -> Result<Self, ModuleError> {
        check_prime(p)?;
        let np = grid.num_points();
        if support.len() != np {
            return Err(ModuleError::GridMismatch);
        }
        if !is_interval(grid, support) {
            return Err(ModuleError::NotInterval("support must be non-empty, connected and convex"));
        }
        let dims: Vec<usize> = support.iter().map(|&s| usize::from(s)).collect();
        let steps = (0..np)
            .map(|x| {
                (0..grid.n())
                    .map(|k| {
                        grid.step(x, k).map(|y| {
                            let mut m = FpMatrix::zeros(dims[y], dims[x], p);
                            if dims[x] == 1 && dims[y] == 1 {
                                m.set(0, 0, 1);
                            }
                            m
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(PersistenceModule { grid: grid.clone(), p, dims, steps })
    }

    /// Hook `L_{i,j}`, support `{k : i ≤ k, j ≰ k}`; `j` may be `⊤`.
    pub fn hook(grid: &GridPoset, p: u32, i: ElemId, j: ElemId) -> Result<Self, ModuleError> {
        let support: Vec<bool> = (0..grid.num_points())
            .map(|k| grid.leq(i, k) && !grid.leq(j, k))
            .collect();
        Self::interval(grid, p, &support)
    }

    /// Closed rectangle `{k : i ≤ k ≤ j}` on the grid.
    pub fn rectangle(grid: &GridPoset, p: u32, i: ElemId, j: ElemId) -> Result<Self, ModuleError> {
        let support: Vec<bool> = (0..grid.num_points())
            .map(|k| grid.leq(i, k) && grid.leq(k, j))
            .collect();
        Self::interval(grid, p, &support)
    }

    pub fn grid(&self) -> &GridPoset {
        &self.grid
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Dimension at a grid point, `0` at `⊤`.
    pub fn dim(&self, x: ElemId) -> usize {
        self.dims.get(x).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    pub fn step(&self, x: ElemId, axis: usize) -> Option<&FpMatrix> {
        self.steps[x][axis].as_ref()
    }

    /// `φ_{a,b}` along the staircase that exhausts axis 0 first, then axis 1, …
    /// Maps into `⊤` are zero.
    pub fn structure_map(&self, a: ElemId, b: ElemId) -> Result<FpMatrix, ModuleError> {
        if !self.grid.leq(a, b) {
            return Err(ModuleError::Incomparable(a, b));
        }
        if self.grid.is_top(b) {
            return Ok(FpMatrix::zeros(0, self.dim(a), self.p));
        }
        let target = self.grid.point(b);
        let mut x = a;
        let mut m = FpMatrix::identity(self.dims[a], self.p);
        for (k, &t) in target.iter().enumerate() {
            while self.grid.axis_index(x, k) < t {
                m = self.steps[x][k].as_ref().unwrap().mul(&m)?;
                x = self.grid.step(x, k).unwrap();
            }
        }
        Ok(m)
    }

    /// All structure maps out of `a`, indexed by grid point (`None` where `a ≰ x`).
    pub fn maps_from(&self, a: ElemId) -> Vec<Option<FpMatrix>> {
        let g = &self.grid;
        let np = g.num_points();
        let mut out: Vec<Option<FpMatrix>> = vec![None; np];
        out[a] = Some(FpMatrix::identity(self.dims[a], self.p));
        for x in a + 1..np {
            if !g.leq(a, x) {
                continue;
            }
            let k = (0..g.n()).find(|&k| g.axis_index(x, k) > g.axis_index(a, k)).unwrap();
            let prev = g.step_down(x, k).unwrap();
            let m = self.steps[prev][k].as_ref().unwrap().mul(out[prev].as_ref().unwrap()).unwrap();
            out[x] = Some(m);
        }
        out
    }

    pub fn rank_invariant(&self) -> RankInvariant {
        let np = self.grid.num_points();
        let mut rk = RankInvariant::zero(&self.grid);
        for a in 0..np {
            if self.dims[a] == 0 {
                continue;
            }
            for (b, m) in self.maps_from(a).into_iter().enumerate() {
                if let Some(m) = m {
                    rk.set(a, b, m.rank() as i64);
                }
            }
        }
        rk
    }

    pub fn direct_sum(parts: &[PersistenceModule]) -> Result<Self, ModuleError> {
        let first = parts.first().ok_or(ModuleError::GridMismatch)?;
        let grid = first.grid.clone();
        let p = first.p;
        if parts.iter().any(|m| m.grid != grid || m.p != p) {
            return Err(ModuleError::GridMismatch);
        }
        let np = grid.num_points();
        let dims: Vec<usize> = (0..np).map(|x| parts.iter().map(|m| m.dims[x]).sum()).collect();
        let mut steps = Vec::with_capacity(np);
        for x in 0..np {
            let mut row = Vec::with_capacity(grid.n());
            for k in 0..grid.n() {
                row.push(grid.step(x, k).map(|y| {
                    let mut m = FpMatrix::zeros(dims[y], dims[x], p);
                    let (mut ro, mut co) = (0, 0);
                    for part in parts {
                        let s = part.steps[x][k].as_ref().unwrap();
                        for r in 0..s.rows() {
                            for c in 0..s.cols() {
                                m.set(ro + r, co + c, s.get(r, c));
                            }
                        }
                        ro += part.dims[y];
                        co += part.dims[x];
                    }
                    m
                }));
            }
            steps.push(row);
        }
        Ok(PersistenceModule { grid, p, dims, steps })
    }

    /// `N(x) = M(x + s)` in grid steps, reading `M` as constant beyond the
    /// largest grade on each axis and zero below the smallest.
    ///
    /// Fails when a positive shift would drop a nonzero value, or when a
    /// negative shift would expose values of `M` that are not yet constant.
    pub fn shift_on_grid(&self, s: &[isize]) -> Result<Self, ModuleError> {
        let g = &self.grid;
        let n = g.n();
        if s.len() != n {
            return Err(ModuleError::Shift(s.to_vec()));
        }
        let np = g.num_points();
        for y in 0..np {
            for k in 0..n {
                let yk = g.axis_index(y, k) as isize;
                let mk = g.shape()[k] as isize;
                if s[k] > 0 && yk < s[k] && self.dims[y] > 0 {
                    return Err(ModuleError::Shift(s.to_vec()));
                }
                if s[k] < 0 && yk >= mk - 1 + s[k] && yk < mk - 1 {
                    let m = self.steps[y][k].as_ref().unwrap();
                    if m.rows() != m.cols() || m.rank() != m.rows() {
                        return Err(ModuleError::Shift(s.to_vec()));
                    }
                }
            }
        }
        let source = |x: ElemId| -> Option<ElemId> {
            let mut q = Vec::with_capacity(n);
            for k in 0..n {
                let v = g.axis_index(x, k) as isize + s[k];
                if v < 0 {
                    return None;
                }
                q.push((v as usize).min(g.shape()[k] - 1));
            }
            Some(g.index(&q))
        };
        let dims: Vec<usize> = (0..np).map(|x| source(x).map_or(0, |y| self.dims[y])).collect();
        let mut steps = Vec::with_capacity(np);
        for x in 0..np {
            let mut row = Vec::with_capacity(n);
            for k in 0..n {
                row.push(g.step(x, k).map(|x2| match (source(x), source(x2)) {
                    (Some(a), Some(b)) if a == b => FpMatrix::identity(self.dims[a], self.p),
                    (Some(a), Some(b)) => self.structure_map(a, b).unwrap(),
                    _ => FpMatrix::zeros(dims[x2], dims[x], self.p),
                }));
            }
            steps.push(row);
        }
        PersistenceModule::new(g.clone(), self.p, dims, steps)
    }
}

/// A morphism of persistence modules on one grid: a matrix per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleMap {
    pub components: Vec<FpMatrix>,
}

impl ModuleMap {
    pub fn zero(source: &PersistenceModule, target: &PersistenceModule) -> Self {
        let components = (0..source.grid.num_points())
            .map(|x| FpMatrix::zeros(target.dims[x], source.dims[x], source.p))
            .collect();
        ModuleMap { components }
    }

    /// Shapes and naturality along every unit step.
    pub fn check(&self, source: &PersistenceModule, target: &PersistenceModule) -> Result<(), ModuleError> {
        let g = &source.grid;
        if *g != target.grid || source.p != target.p || self.components.len() != g.num_points() {
            return Err(ModuleError::GridMismatch);
        }
        for x in 0..g.num_points() {
            if self.components[x].shape() != (target.dims[x], source.dims[x]) {
                return Err(ModuleError::MapShape { point: x, axis: usize::MAX });
            }
        }
        for x in 0..g.num_points() {
            for k in 0..g.n() {
                let Some(y) = g.step(x, k) else { continue };
                let a = self.components[y].mul(source.step(x, k).unwrap())?;
                let b = target.step(x, k).unwrap().mul(&self.components[x])?;
                if a != b {
                    return Err(ModuleError::Naturality { point: x, axis: k });
                }
            }
        }
        Ok(())
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &ModuleMap) -> Result<ModuleMap, ModuleError> {
        let components = self
            .components
            .iter()
            .zip(&first.components)
            .map(|(a, b)| a.mul(b))
            .collect::<Result<_, _>>()?;
        Ok(ModuleMap { components })
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(FpMatrix::is_zero)
    }

    /// Pointwise kernel with the induced structure maps.
    pub fn kernel(&self, source: &PersistenceModule) -> Result<PersistenceModule, ModuleError> {
        let g = &source.grid;
        let kernels: Vec<_> = self.components.iter().map(FpMatrix::kernel).collect();
        let dims: Vec<usize> = kernels.iter().map(|k| k.dim()).collect();
        let steps = (0..g.num_points())
            .map(|x| {
                (0..g.n())
                    .map(|k| {
                        g.step(x, k).map(|y| {
                            let image = source.step(x, k).unwrap().mul(&kernels[x].basis).unwrap();
                            kernels[y].coordinates(&image)
                        })
                    })
                    .collect()
            })
            .collect();
        PersistenceModule::new(g.clone(), source.p, dims, steps)
    }
}

/// Non-empty, convex and connected (through unit steps).
pub fn is_interval(grid: &GridPoset, support: &[bool]) -> bool {
    let pts: Vec<ElemId> = (0..support.len()).filter(|&x| support[x]).collect();
    let Some(&start) = pts.first() else { return false };
    for &a in &pts {
        for &b in &pts {
            if !grid.leq(a, b) {
                continue;
            }
            for x in 0..support.len() {
                if !support[x] && grid.leq(a, x) && grid.leq(x, b) {
                    return false;
                }
            }
        }
    }
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        let nbrs = (0..grid.n()).flat_map(|k| [grid.step(x, k), grid.step_down(x, k)]).flatten();
        for y in nbrs {
            if support[y] && seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen.len() == pts.len()
}

/// Ranks of structure maps on comparable pairs of grid points (`⊤` excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct RankInvariant {
    grid: GridPoset,
    table: Vec<i64>,
}

impl RankInvariant {
    pub fn zero(grid: &GridPoset) -> Self {
        let np = grid.num_points();
        RankInvariant { grid: grid.clone(), table: vec![0; np * np] }
    }

    pub fn grid(&self) -> &GridPoset {
        &self.grid
    }

    pub fn get(&self, a: ElemId, b: ElemId) -> Option<i64> {
        let np = self.grid.num_points();
        (a < np && b < np && self.grid.leq(a, b)).then(|| self.table[a * np + b])
    }

    pub fn set(&mut self, a: ElemId, b: ElemId, v: i64) {
        let np = self.grid.num_points();
        self.table[a * np + b] = v;
    }

    pub fn add_scaled(&mut self, other: &RankInvariant, s: i64) {
        for (a, b) in self.table.iter_mut().zip(&other.table) {
            *a += s * b;
        }
    }

    /// Add the rank invariant of the interval module supported on `support`.
    pub fn add_interval(&mut self, support: &[bool]) {
        let np = self.grid.num_points();
        for a in (0..np).filter(|&a| support[a]) {
            for b in (a..np).filter(|&b| support[b] && self.grid.leq(a, b)) {
                self.table[a * np + b] += 1;
            }
        }
    }

    /// Comparable pairs `(a, b)` of grid points.
    pub fn pairs(&self) -> impl Iterator<Item = (ElemId, ElemId)> + '_ {
        let np = self.grid.num_points();
        (0..np).flat_map(move |a| (a..np).filter(move |&b| self.grid.leq(a, b)).map(move |b| (a, b)))
    }

    /// First comparable pair where the two tables differ.
    pub fn first_difference(&self, other: &RankInvariant) -> Option<(ElemId, ElemId)> {
        self.pairs().find(|&(a, b)| self.get(a, b) != other.get(a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn corner_interval() -> Presentation {
        Presentation::parse(
            "rkdec-presentation v1\nn=2 p=2\ngenerators 1\n0 0\nrelations 3\n0 2 ; 0:1\n1 1 ; 0:1\n2 0 ; 0:1\n",
        )
        .unwrap()
    }

    #[test]
    fn parse_and_roundtrip() {
        let p = corner_interval();
        assert_eq!(p.generators, vec![vec![0., 0.]]);
        assert_eq!(p.relations.len(), 3);
        assert_eq!(Presentation::parse(&p.to_text()).unwrap(), p);
        let one = Presentation::parse("# c\nrkdec-presentation v1\nn=2 p=3\ngenerators 1\n0 0\nrelations 0\n").unwrap();
        assert_eq!(one.relations.len(), 0);
    }

    #[test]
    fn parse_errors() {
        let bad_version = "rkdec-presentation v2\nn=1 p=2\ngenerators 0\nrelations 0\n";
        assert!(matches!(Presentation::parse(bad_version), Err(ModuleError::Parse { line: 1, .. })));
        let below = "rkdec-presentation v1\nn=1 p=2\ngenerators 1\n1\nrelations 1\n0 ; 0:1\n";
        assert_eq!(
            Presentation::parse(below),
            Err(ModuleError::Domination { relation: 0, generator: 0 })
        );
        let syntax = "rkdec-presentation v1\nn=2 p=2\ngenerators 1\n0 x\nrelations 0\n";
        assert!(matches!(Presentation::parse(syntax), Err(ModuleError::Parse { line: 4, .. })));
        let prime = "rkdec-presentation v1\nn=2 p=4\ngenerators 0\nrelations 0\n";
        assert!(matches!(Presentation::parse(prime), Err(ModuleError::Parse { line: 2, .. })));
    }

    #[test]
    fn compress_examples() {
        let g = corner_interval().compress_grades().unwrap();
        assert_eq!(g.axis_coords(0), &[0., 1., 2.]);
        assert_eq!(g.axis_coords(1), &[0., 1., 2.]);
        assert!(g.has_top());
        let single = Presentation::new(2, 2, vec![vec![3.5, 7.]], vec![]).unwrap();
        assert_eq!(single.compress_grades().unwrap().num_points(), 1);
        let p = Presentation::new(
            2,
            2,
            vec![vec![0., 0.], vec![1., 2.]],
            vec![Relation { grade: vec![2., 2.], column: vec![(0, 1)] }],
        )
        .unwrap();
        let g = p.compress_grades().unwrap();
        assert_eq!(g.axis_coords(0), &[0., 1., 2.]);
        assert_eq!(g.axis_coords(1), &[0., 2.]);
    }

    #[test]
    fn realize_corner_interval() {
        let p = corner_interval();
        let g = p.compress_grades().unwrap();
        let m = PersistenceModule::realize(&p, &g).unwrap();
        for x in 0..g.num_points() {
            let pt = g.point(x);
            let inside = (pt[0] < 2 && pt[1] == 0) || (pt[0] == 0 && pt[1] < 2);
            assert_eq!(m.dim(x), usize::from(inside), "{pt:?}");
        }
        let o = g.index(&[0, 0]);
        assert_eq!(m.structure_map(o, g.index(&[1, 0])).unwrap(), FpMatrix::identity(1, 2));
        assert_eq!(m.structure_map(o, g.index(&[1, 1])).unwrap().shape(), (0, 1));
        assert_eq!(m.structure_map(o, o).unwrap(), FpMatrix::identity(1, 2));
        assert!(m.structure_map(g.index(&[1, 0]), g.index(&[0, 1])).is_err());
    }

    #[test]
    fn realize_small_examples() {
        let g = GridPoset::integer(&[3, 3], true).unwrap();
        let free = Presentation::new(2, 2, vec![vec![0., 0.]], vec![]).unwrap();
        let m = PersistenceModule::realize(&free, &g).unwrap();
        assert!(m.dims().iter().all(|&d| d == 1));
        let rk = m.rank_invariant();
        assert!(rk.pairs().all(|(a, b)| rk.get(a, b) == Some(1)));

        let two = Presentation::new(
            2,
            3,
            vec![vec![0., 0.], vec![0., 0.]],
            vec![Relation { grade: vec![1., 1.], column: vec![(0, 1), (1, 2)] }],
        )
        .unwrap();
        let m = PersistenceModule::realize(&two, &g).unwrap();
        for x in 0..g.num_points() {
            let pt = g.point(x);
            let want = if pt[0] >= 1 && pt[1] >= 1 { 1 } else { 2 };
            assert_eq!(m.dim(x), want);
        }
        let off = Presentation::new(2, 2, vec![vec![0.5, 0.]], vec![]).unwrap();
        assert!(matches!(PersistenceModule::realize(&off, &g), Err(ModuleError::GridTooSmall(_))));
    }

    #[test]
    fn hooks_and_rectangles() {
        let g = GridPoset::integer(&[3, 3], true).unwrap();
        let o = g.index(&[0, 0]);
        let top = g.top().unwrap();
        let proj = PersistenceModule::hook(&g, 2, o, top).unwrap();
        assert!(proj.dims().iter().all(|&d| d == 1));
        let h = PersistenceModule::hook(&g, 2, o, g.index(&[1, 1])).unwrap();
        let support: Vec<Vec<usize>> =
            (0..g.num_points()).filter(|&x| h.dim(x) == 1).map(|x| g.point(x)).collect();
        assert_eq!(support, vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![2, 0]]);
        let rk = h.rank_invariant();
        assert_eq!(rk.get(o, g.index(&[1, 0])), Some(1));
        assert_eq!(rk.get(o, g.index(&[1, 1])), Some(0));
        let mut disconnected = vec![false; 9];
        disconnected[g.index(&[0, 0])] = true;
        disconnected[g.index(&[2, 2])] = true;
        assert!(PersistenceModule::interval(&g, 2, &disconnected).is_err());
        let r = PersistenceModule::rectangle(&g, 2, o, g.index(&[1, 2])).unwrap();
        assert_eq!(r.total_dim(), 6);
    }

    #[test]
    fn sums_and_shifts() {
        let g = GridPoset::integer(&[4, 4], false).unwrap();
        let o = g.index(&[0, 0]);
        let h = PersistenceModule::hook(&g, 2, o, g.index(&[2, 1])).unwrap();
        let z = PersistenceModule::zero(g.clone(), 2);
        let s = PersistenceModule::direct_sum(&[h.clone(), z]).unwrap();
        assert_eq!(s.dims(), h.dims());
        let hh = PersistenceModule::direct_sum(&[h.clone(), h.clone()]).unwrap();
        let mut twice = h.rank_invariant();
        twice.add_scaled(&h.rank_invariant(), 1);
        assert_eq!(hh.rank_invariant(), twice);

        // shifting the hook at (1,1) down by one step gives the hook at the origin
        let h11 = PersistenceModule::hook(&g, 2, g.index(&[1, 1]), g.index(&[3, 2])).unwrap();
        let back = h11.shift_on_grid(&[1, 1]).unwrap();
        let want = PersistenceModule::hook(&g, 2, o, g.index(&[2, 1])).unwrap();
        assert_eq!(back.rank_invariant(), want.rank_invariant());
        assert!(h.shift_on_grid(&[1, 0]).is_err());
        let fwd = want.shift_on_grid(&[-1, -1]).unwrap();
        assert_eq!(fwd.rank_invariant(), h11.rank_invariant());
    }
}
