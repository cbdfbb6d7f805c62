//! Time grids, sampled paths, two-parameter fields and empirical Hölder seminorms.

use crate::error::{Error, Result};
use crate::tensor::{Tensorial, Vector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

/// Largest step count for which `PairBudget::Auto` scans every pair.
pub const ALL_PAIRS_LIMIT: usize = 4096;

/// Partition `0 = t_0 < t_1 < … < t_N = T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Grid {
    times: Vec<f64>,
}

impl Grid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {}", times.len())));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidGrid(format!("grid must start at 0, starts at {}", times[0])));
        }
        if let Some(k) = times.windows(2).position(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "times not strictly increasing at index {} ({} -> {})",
                k + 1,
                times[k],
                times[k + 1]
            )));
        }
        Ok(Self { times })
    }

    /// `steps` equal steps on `[0, horizon]`; the last point is exactly `horizon`.
    pub fn uniform(steps: usize, horizon: f64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidGrid("need at least one step".into()));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidGrid(format!("horizon must be positive, got {horizon}")));
        }
        let mut times: Vec<f64> = (0..=steps).map(|i| horizon * i as f64 / steps as f64).collect();
        times[steps] = horizon;
        Self::new(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn t(&self, i: usize) -> f64 {
        self.times[i]
    }

    pub fn points(&self) -> usize {
        self.times.len()
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn mesh(&self) -> f64 {
        self.times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.times.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, points: self.times.len() })
        }
    }

    pub fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i > j {
            return Err(Error::UnorderedPair(i, j));
        }
        Ok(())
    }

    /// Points `i0..=i1` shifted so that the window starts at 0.
    pub fn window(&self, i0: usize, i1: usize) -> Result<Grid> {
        self.check_pair(i0, i1)?;
        if i0 == i1 {
            return Err(Error::InvalidGrid("window must contain at least one step".into()));
        }
        let t0 = self.times[i0];
        let mut times: Vec<f64> = self.times[i0..=i1].iter().map(|t| t - t0).collect();
        times[0] = 0.0;
        Grid::new(times)
    }

    /// Keeps every `factor`-th point; the step count must be divisible by `factor`.
    pub fn subsample(&self, factor: usize) -> Result<Grid> {
        if factor == 0 || !self.steps().is_multiple_of(factor) {
            return Err(Error::InvalidGrid(format!("cannot subsample {} steps by {factor}", self.steps())));
        }
        Grid::new(self.times.iter().step_by(factor).copied().collect())
    }
}

impl TryFrom<Vec<f64>> for Grid {
    type Error = Error;
    fn try_from(times: Vec<f64>) -> Result<Self> {
        Grid::new(times)
    }
}

impl From<Grid> for Vec<f64> {
    fn from(g: Grid) -> Self {
        g.times
    }
}

/// Values of kind `T` at every grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPath<T> {
    grid: Arc<Grid>,
    values: Vec<T>,
}

impl<T: Tensorial> GridPath<T> {
    pub fn new(grid: Arc<Grid>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.points() {
            return Err(Error::DimensionMismatch { expected: grid.points(), found: values.len() });
        }
        if let Some(first) = values.first() {
            if values.iter().any(|v| !v.same_shape(first)) {
                return Err(Error::DimensionMismatch { expected: first.data().len(), found: 0 });
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteOutput("path value".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> T) -> Result<Self> {
        let values = grid.times().iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &T {
        &self.values[i]
    }

    pub fn first(&self) -> &T {
        &self.values[0]
    }

    pub fn last(&self) -> &T {
        &self.values[self.values.len() - 1]
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn increment(&self, i: usize, j: usize) -> Result<T> {
        self.grid.check_pair(i, j)?;
        Ok(self.values[j].diff(&self.values[i]))
    }

    pub fn map<U: Tensorial>(&self, f: impl Fn(&T) -> U) -> GridPath<U> {
        GridPath { grid: self.grid.clone(), values: self.values.iter().map(f).collect() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| v.scaled(c))
    }

    /// `max_i |values[i]|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max_i |values[i] - other[i]|` for paths on the same number of points.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        if self.values.len() != other.values.len() {
            return Err(Error::GridMismatch);
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a.dist(b)).fold(0.0, f64::max))
    }

    /// The points `i0..=i1`, re-based onto the shifted window grid.
    pub fn window(&self, i0: usize, i1: usize) -> Result<Self> {
        let grid = Arc::new(self.grid.window(i0, i1)?);
        Ok(Self { grid, values: self.values[i0..=i1].to_vec() })
    }

    /// Same values on a different (but equally long) grid.
    pub fn with_grid(&self, grid: Arc<Grid>) -> Result<Self> {
        Self::new(grid, self.values.clone())
    }

    pub fn subsample(&self, factor: usize) -> Result<Self> {
        let grid = Arc::new(self.grid.subsample(factor)?);
        Ok(Self { grid, values: self.values.iter().step_by(factor).cloned().collect() })
    }
}

impl GridPath<Vector> {
    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.values.iter().map(|v| v.as_slice().to_vec()).collect()
    }

    pub fn from_rows(grid: Arc<Grid>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let values = rows.into_iter().map(Vector::new).collect::<Result<Vec<_>>>()?;
        Self::new(grid, values)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        write_table_csv(out, self.grid.times(), &self.to_rows(), "x")
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    /// Reads `t,x0,x1,...` rows.
    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input);
        let width = reader.headers()?.len();
        if width < 2 {
            return Err(Error::InvalidConfig("path CSV needs a time column and at least one coordinate".into()));
        }
        let mut times = Vec::new();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let parsed = record
                .iter()
                .map(|f| f.parse::<f64>().map_err(|e| Error::InvalidConfig(format!("bad number '{f}': {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            if parsed.len() != width {
                return Err(Error::DimensionMismatch { expected: width, found: parsed.len() });
            }
            times.push(parsed[0]);
            rows.push(parsed[1..].to_vec());
        }
        let grid = Arc::new(Grid::new(times)?);
        Self::from_rows(grid, rows)
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

/// Writes a `t,<prefix>0,<prefix>1,...` table using round-trip float formatting.
pub fn write_table_csv<W: std::io::Write>(out: W, times: &[f64], rows: &[Vec<f64>], prefix: &str) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let width = rows.first().map_or(0, |r| r.len());
    let mut header = vec!["t".to_string()];
    header.extend((0..width).map(|k| format!("{prefix}{k}")));
    w.write_record(&header)?;
    for (t, row) in times.iter().zip(rows) {
        let mut rec = vec![fmt_f64(*t)];
        rec.extend(row.iter().map(|x| fmt_f64(*x)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Which grid pairs a seminorm scan visits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairBudget {
    /// All pairs up to `ALL_PAIRS_LIMIT` steps, dyadic beyond.
    #[default]
    Auto,
    AllPairs,
    /// Pairs `(i, i + 2^k)` plus every pair anchored at the origin.
    Dyadic,
}

/// The concrete policy a scan used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairPolicy {
    AllPairs,
    Dyadic,
}

impl PairBudget {
    pub fn resolve(self, steps: usize) -> PairPolicy {
        match self {
            PairBudget::AllPairs => PairPolicy::AllPairs,
            PairBudget::Dyadic => PairPolicy::Dyadic,
            PairBudget::Auto if steps <= ALL_PAIRS_LIMIT => PairPolicy::AllPairs,
            PairBudget::Auto => PairPolicy::Dyadic,
        }
    }
}

impl PairPolicy {
    /// Right endpoints visited from left endpoint `i` on a grid with `steps` steps.
    pub fn row(self, i: usize, steps: usize) -> Box<dyn Iterator<Item = usize>> {
        match self {
            PairPolicy::AllPairs => Box::new((i + 1)..=steps),
            PairPolicy::Dyadic if i == 0 => Box::new(1..=steps),
            PairPolicy::Dyadic => {
                Box::new((0..usize::BITS).map(|k| 1usize << k).map(move |h| i + h).take_while(move |&j| j <= steps))
            }
        }
    }

    pub fn pairs(self, steps: usize) -> Vec<(usize, usize)> {
        (0..steps).flat_map(|i| self.row(i, steps).map(move |j| (i, j))).collect()
    }
}

/// Result of an empirical Hölder scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub exponent: f64,
    pub seminorm: f64,
    pub argmax: (usize, usize),
    pub policy: PairPolicy,
}

/// Anything that assigns a magnitude to grid pairs `i < j`.
pub trait PairField: Sync {
    fn grid(&self) -> &Grid;
    fn pair_norm(&self, i: usize, j: usize) -> f64;

    /// Norms for pairs `(i, j)` with `j` in the increasing list `js`.
    fn row_norms(&self, i: usize, js: &[usize]) -> Vec<f64> {
        js.iter().map(|&j| self.pair_norm(i, j)).collect()
    }
}

impl<T: Tensorial> PairField for GridPath<T> {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn pair_norm(&self, i: usize, j: usize) -> f64 {
        self.values[j].dist(&self.values[i])
    }
}

/// A pair-indexed field, stored densely or evaluated on demand.
#[derive(Clone)]
pub struct TwoParamField<T> {
    grid: Arc<Grid>,
    repr: FieldRepr<T>,
}

type PairFn<T> = Arc<dyn Fn(usize, usize) -> T + Send + Sync>;

#[derive(Clone)]
enum FieldRepr<T> {
    /// Row-major upper triangle: pairs (0,1),(0,2),…,(0,N),(1,2),…
    Dense(Vec<T>),
    Lazy(PairFn<T>),
}

impl<T: Tensorial> TwoParamField<T> {
    pub fn lazy(grid: Arc<Grid>, f: impl Fn(usize, usize) -> T + Send + Sync + 'static) -> Self {
        Self { grid, repr: FieldRepr::Lazy(Arc::new(f)) }
    }

    /// Evaluates `f` on every pair `i < j` and stores the results.
    pub fn dense(grid: Arc<Grid>, f: impl Fn(usize, usize) -> T + Sync) -> Self {
        let n = grid.steps();
        let rows: Vec<Vec<T>> = (0..n).into_par_iter().map(|i| ((i + 1)..=n).map(|j| f(i, j)).collect()).collect();
        Self { grid, repr: FieldRepr::Dense(rows.into_iter().flatten().collect()) }
    }

    /// Dense field from rows `table[i]` holding pairs `(i, i+1..=N)`.
    pub fn from_upper_rows(grid: Arc<Grid>, table: Vec<Vec<T>>) -> Result<Self> {
        let n = grid.steps();
        if table.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: table.len() });
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n - i {
                return Err(Error::DimensionMismatch { expected: n - i, found: row.len() });
            }
        }
        Ok(Self { grid, repr: FieldRepr::Dense(table.into_iter().flatten().collect()) })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, FieldRepr::Dense(_))
    }

    pub fn value(&self, i: usize, j: usize) -> Result<T> {
        self.grid.check_pair(i, j)?;
        if i == j {
            return Err(Error::UnorderedPair(i, j));
        }
        Ok(self.value_unchecked(i, j))
    }

    fn value_unchecked(&self, i: usize, j: usize) -> T {
        match &self.repr {
            FieldRepr::Lazy(f) => f(i, j),
            FieldRepr::Dense(v) => {
                let n = self.grid.steps();
                // Rows before i hold n + (n-1) + … + (n-i+1) entries.
                let offset = i * n - i * i.saturating_sub(1) / 2;
                v[offset + (j - i - 1)].clone()
            }
        }
    }
}

impl<T: Tensorial> PairField for TwoParamField<T> {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn pair_norm(&self, i: usize, j: usize) -> f64 {
        self.value_unchecked(i, j).norm()
    }
}

/// Wraps a closure returning the pair magnitude directly.
pub struct NormField<'a, F> {
    grid: &'a Grid,
    f: F,
}

impl<'a, F: Fn(usize, usize) -> f64 + Sync> NormField<'a, F> {
    pub fn new(grid: &'a Grid, f: F) -> Self {
        Self { grid, f }
    }
}

impl<F: Fn(usize, usize) -> f64 + Sync> PairField for NormField<'_, F> {
    fn grid(&self) -> &Grid {
        self.grid
    }
    fn pair_norm(&self, i: usize, j: usize) -> f64 {
        (self.f)(i, j)
    }
}

/// `|Δ| / gap^exponent`, computed through the logarithm.
pub fn holder_quotient(norm: f64, gap: f64, exponent: f64) -> f64 {
    if norm == 0.0 {
        0.0
    } else {
        norm * (-exponent * gap.ln()).exp()
    }
}

fn better(a: (f64, (usize, usize)), b: (f64, (usize, usize))) -> (f64, (usize, usize)) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Deterministic parallel max of `field`'s Hölder quotients over the policy's pairs.
pub fn scan_pairs(field: &impl PairField, exponent: f64, budget: PairBudget) -> HolderReport {
    let grid = field.grid();
    let n = grid.steps();
    let policy = budget.resolve(n);
    let times = grid.times();
    let (seminorm, argmax) = (0..n)
        .into_par_iter()
        .map(|i| {
            let js: Vec<usize> = policy.row(i, n).collect();
            let norms = field.row_norms(i, &js);
            let mut best = (0.0, (0, 1));
            for (&j, &v) in js.iter().zip(&norms) {
                best = better(best, (holder_quotient(v, times[j] - times[i], exponent), (i, j)));
            }
            best
        })
        .reduce(|| (0.0, (0, 1)), better);
    HolderReport { exponent, seminorm, argmax, policy }
}

/// `sup |X_{s,t}| / (t-s)^alpha` over the enumerated pairs.
pub fn holder_seminorm<T: Tensorial>(p: &GridPath<T>, alpha: f64, budget: PairBudget) -> Result<HolderReport> {
    check_exponent(alpha, 1.0)?;
    Ok(scan_pairs(p, alpha, budget))
}

/// Hölder scan of a two-parameter field at an exponent in `(0, 2]`.
pub fn two_param_seminorm(f: &impl PairField, exponent: f64, budget: PairBudget) -> Result<HolderReport> {
    check_exponent(exponent, 2.0)?;
    Ok(scan_pairs(f, exponent, budget))
}

/// `|Y_0| + T^alpha ‖Y‖_alpha`.
pub fn sup_bound_from_holder<T: Tensorial>(p: &GridPath<T>, alpha: f64) -> Result<f64> {
    let h = holder_seminorm(p, alpha, PairBudget::Auto)?;
    Ok(p.first().norm() + p.grid().horizon().powf(alpha) * h.seminorm)
}

fn check_exponent(e: f64, upper: f64) -> Result<()> {
    if e > 0.0 && e <= upper {
        Ok(())
    } else {
        Err(Error::InvalidExponent { value: e, range: if upper == 1.0 { "(0, 1]" } else { "(0, 2]" } })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scalar_path(grid: &Arc<Grid>, f: impl Fn(f64) -> f64) -> GridPath<Vector> {
        GridPath::from_fn(grid.clone(), |t| Vector::new(vec![f(t)]).unwrap()).unwrap()
    }

    fn unit(n: usize) -> Arc<Grid> {
        Arc::new(Grid::uniform(n, 1.0).unwrap())
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(vec![0.0]).is_err());
        assert!(Grid::new(vec![0.1, 1.0]).is_err());
        assert!(Grid::new(vec![0.0, 0.5, 0.5]).is_err());
        assert!(Grid::new(vec![0.0, f64::NAN]).is_err());
        let g = Grid::new(vec![0.0, 0.25, 1.0]).unwrap();
        assert_eq!(g.mesh(), 0.75);
        assert_eq!(g.horizon(), 1.0);
        let w = Grid::uniform(8, 2.0).unwrap().window(2, 6).unwrap();
        assert_eq!(w.times(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn increment_examples() {
        let g = unit(10);
        let c = scalar_path(&g, |_| 3.0);
        assert_eq!(c.increment(2, 7).unwrap().as_slice(), &[0.0]);
        let x = scalar_path(&g, |t| t);
        assert_eq!(x.increment(0, 10).unwrap().as_slice(), &[1.0]);
        let g = Arc::new(Grid::new(vec![0.0, 0.5, 1.0]).unwrap());
        let sq = scalar_path(&g, |t| t * t);
        assert_eq!(sq.increment(0, 1).unwrap().as_slice(), &[0.25]);
        assert_eq!(sq.increment(1, 1).unwrap().as_slice(), &[0.0]);
        assert!(matches!(sq.increment(0, 3), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(sq.increment(2, 1), Err(Error::UnorderedPair(2, 1))));
    }

    #[test]
    fn holder_examples() {
        let g = unit(64);
        let c = scalar_path(&g, |_| -2.0);
        assert_eq!(holder_seminorm(&c, 0.5, PairBudget::Auto).unwrap().seminorm, 0.0);

        let x = scalar_path(&g, |t| t);
        let r = holder_seminorm(&x, 0.5, PairBudget::Auto).unwrap();
        assert!((r.seminorm - 1.0).abs() < 1e-15);
        assert_eq!(r.argmax, (0, 64));
        assert_eq!(r.policy, PairPolicy::AllPairs);

        let r = holder_seminorm(&x, 1.0, PairBudget::Auto).unwrap();
        assert!((r.seminorm - 1.0).abs() < 1e-12);

        assert!(matches!(holder_seminorm(&x, 0.0, PairBudget::Auto), Err(Error::InvalidExponent { .. })));
        assert!(holder_seminorm(&x, 1.1, PairBudget::Auto).is_err());
    }

    #[test]
    fn two_param_examples() {
        let g = unit(32);
        let zero = TwoParamField::lazy(g.clone(), |_, _| Vector::zeros(2));
        assert_eq!(two_param_seminorm(&zero, 1.0, PairBudget::Auto).unwrap().seminorm, 0.0);

        let gg = g.clone();
        let s = TwoParamField::lazy(g.clone(), move |i, j| {
            let h = gg.t(j) - gg.t(i);
            Vector::new(vec![0.5 * h * h]).unwrap()
        });
        let r = two_param_seminorm(&s, 1.0, PairBudget::Auto).unwrap();
        assert!((r.seminorm - 0.5).abs() < 1e-15);
        assert_eq!(r.argmax, (0, 32));

        let gg = g.clone();
        let c = 1.7;
        let rf = TwoParamField::dense(g.clone(), move |i, j| {
            Vector::new(vec![c * (gg.t(j) - gg.t(i)).powf(0.9)]).unwrap()
        });
        let r = two_param_seminorm(&rf, 0.9, PairBudget::Auto).unwrap();
        assert!((r.seminorm - c).abs() < 1e-12);
        assert!(two_param_seminorm(&rf, 2.5, PairBudget::Auto).is_err());
    }

    #[test]
    fn dense_and_lazy_agree() {
        let g = unit(9);
        let f = |i: usize, j: usize| Vector::new(vec![(i * 100 + j) as f64]).unwrap();
        let dense = TwoParamField::dense(g.clone(), f);
        let lazy = TwoParamField::lazy(g.clone(), f);
        for i in 0..9 {
            for j in (i + 1)..=9 {
                assert_eq!(dense.value(i, j).unwrap(), lazy.value(i, j).unwrap());
            }
        }
        assert!(dense.value(3, 3).is_err());
    }

    #[test]
    fn sup_bound_examples() {
        let g = unit(16);
        let c = scalar_path(&g, |_| -4.0);
        assert_eq!(sup_bound_from_holder(&c, 0.5).unwrap(), 4.0);
        let x = scalar_path(&g, |t| t);
        let b = sup_bound_from_holder(&x, 0.5).unwrap();
        assert!((b - 1.0).abs() < 1e-14 && b >= x.sup_norm() - 1e-12);
        let y = scalar_path(&g, |t| 2.0 + t);
        let b = sup_bound_from_holder(&y, 1.0).unwrap();
        assert!((b - 3.0).abs() < 1e-12);
    }

    #[test]
    fn dyadic_policy_contains_anchored_pairs() {
        let pairs = PairPolicy::Dyadic.pairs(10);
        for j in 1..=10 {
            assert!(pairs.contains(&(0, j)));
        }
        assert!(pairs.contains(&(3, 7)));
        assert!(!pairs.contains(&(3, 6)));
        assert_eq!(PairBudget::Auto.resolve(ALL_PAIRS_LIMIT + 1), PairPolicy::Dyadic);
    }

    #[test]
    fn csv_round_trip() {
        let g = Arc::new(Grid::new(vec![0.0, 0.1, 0.30000000000000004, 1.0]).unwrap());
        let p = GridPath::from_fn(g, |t| Vector::new(vec![t.sin(), 1e-300 * t, -t]).unwrap()).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,x0,x1,x2\n"));
        let q = GridPath::read_csv(buf.as_slice()).unwrap();
        assert_eq!(p, q);
    }

    fn arb_path() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (2usize..40).prop_flat_map(|n| {
            (
                proptest::collection::vec(0.01..1.0f64, n),
                proptest::collection::vec(-5.0..5.0f64, n + 1),
            )
        })
    }

    fn build((gaps, xs): (Vec<f64>, Vec<f64>)) -> GridPath<Vector> {
        let mut t = vec![0.0];
        for g in gaps {
            t.push(t.last().unwrap() + g);
        }
        let grid = Arc::new(Grid::new(t).unwrap());
        GridPath::from_rows(grid, xs.into_iter().map(|x| vec![x]).collect()).unwrap()
    }

    proptest! {
        #[test]
        fn report_bounds_every_pair(data in arb_path(), alpha in 0.05..1.0f64) {
            let p = build(data);
            let r = holder_seminorm(&p, alpha, PairBudget::AllPairs).unwrap();
            let n = p.grid().steps();
            for i in 0..n {
                for j in (i + 1)..=n {
                    let gap = p.grid().t(j) - p.grid().t(i);
                    let lhs = p.pair_norm(i, j);
                    prop_assert!(lhs <= r.seminorm * gap.powf(alpha) * (1.0 + 1e-12) + 1e-300);
                }
            }
            let (i, j) = r.argmax;
            let q = p.pair_norm(i, j) / (p.grid().t(j) - p.grid().t(i)).powf(alpha);
            prop_assert!(r.seminorm >= q - 1e-12 * q.max(1.0));
        }

        #[test]
        fn increments_are_additive(data in arb_path()) {
            let p = build(data);
            let n = p.grid().steps();
            let (i, j, k) = (0, n / 2, n);
            let lhs = p.increment(i, k).unwrap();
            let rhs = &p.increment(i, j).unwrap() + &p.increment(j, k).unwrap();
            prop_assert!(lhs.dist(&rhs) <= 1e-14 * lhs.norm().max(1.0));
        }

        #[test]
        fn sup_bound_dominates(data in arb_path(), alpha in 0.05..1.0f64) {
            let p = build(data);
            prop_assert!(sup_bound_from_holder(&p, alpha).unwrap() >= p.sup_norm() - 1e-12);
        }

        #[test]
        fn seminorm_scales(data in arb_path(), c in -4.0..4.0f64, alpha in 0.1..1.0f64) {
            let p = build(data);
            let a = holder_seminorm(&p, alpha, PairBudget::Auto).unwrap().seminorm;
            let b = holder_seminorm(&p.scaled(c), alpha, PairBudget::Auto).unwrap().seminorm;
            prop_assert!((b - c.abs() * a).abs() <= 1e-12 * b.max(1.0));
        }
    }
}
