//! Reduced rough paths `(X, S)` with symmetric second level.
//!
//! The second level is stored one value per grid step and composed on demand
//! through the reduced Chen relation
//! `S_{ik} = S_{ij} + S_{jk} + Sym(X_{ij} ⊗ X_{jk})`.

use crate::error::{check_rough_exponent, Error, Result};
use crate::grid::{scan_pairs, Grid, GridPath, HolderReport, PairBudget, PairField, TwoParamField};
use crate::tensor::{sym_outer_raw, SymTensor2, Tensorial, Vector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;
use std::sync::Arc;

pub const RRP_SCHEMA: &str = "rrpath.reduced_rough_path/1";
pub const RRP_TABLE_SCHEMA: &str = "rrpath.second_level_table/1";

/// Default Chen tolerance, scaled up by the size of the compared terms.
pub const TOL_CHEN: f64 = 1e-10;

/// Symmetry tolerance applied when loading second-level values from files.
pub const LOAD_SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ReducedRoughPath {
    alpha: f64,
    path: GridPath<Vector>,
    steps: Vec<SymTensor2>,
    /// `S_{t_0, t_j}` for every `j` (zero at `j = 0`).
    prefix: Vec<SymTensor2>,
    fingerprint: String,
}

/// Pair spans above this use the prefix form of Chen instead of a fold.
const FOLD_SPAN_LIMIT: usize = 64;

/// `‖X‖_α`, `‖S‖_{2α}` and their sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RrpNorms {
    pub x_alpha: f64,
    pub s_2alpha: f64,
    pub total: f64,
}

impl ReducedRoughPath {
    /// Assembles a rough path from its first level and per-step second-level values.
    pub fn from_steps(alpha: f64, path: GridPath<Vector>, steps: Vec<SymTensor2>) -> Result<Self> {
        check_rough_exponent(alpha)?;
        let n = path.grid().steps();
        if steps.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: steps.len() });
        }
        let d = path.dim();
        if let Some(bad) = steps.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: bad.dim() });
        }
        if steps.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFiniteOutput("second-level step".into()));
        }
        let fingerprint = fingerprint(alpha, &path, &steps);
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(SymTensor2::zeros(d));
        for k in 0..n {
            let x0k: Vec<f64> = path.value(k).diff(path.value(0)).into_inner();
            let dxk: Vec<f64> = path.value(k + 1).diff(path.value(k)).into_inner();
            let next = prefix[k].chen_step(&steps[k], &x0k, &dxk);
            prefix.push(next);
        }
        Ok(Self { alpha, path, steps, prefix, fingerprint })
    }

    /// Canonical lift `S_{t_i,t_{i+1}} = ½ ΔX_i ⊗ ΔX_i`.
    pub fn geometric_lift(path: GridPath<Vector>, alpha: f64) -> Result<Self> {
        check_rough_exponent(alpha)?;
        let steps = (0..path.grid().steps())
            .map(|i| {
                let dx = path.value(i + 1).diff(path.value(i));
                sym_outer_raw(dx.as_slice(), dx.as_slice()).scaled(0.5)
            })
            .collect();
        Self::from_steps(alpha, path, steps)
    }

    /// Geometric lift shifted by `φ_t = -(t/2) Id`.
    pub fn ito_lift(path: GridPath<Vector>, alpha: f64) -> Result<Self> {
        let geo = Self::geometric_lift(path, alpha)?;
        let d = geo.dim();
        let phi = GridPath::from_fn(geo.path.grid_arc().clone(), |t| SymTensor2::identity(d).scaled(-0.5 * t))?;
        geo.perturbed_lift(&phi)
    }

    /// The trivial rough path: constant first level `x0`, zero second level.
    pub fn trivial(grid: Arc<Grid>, x0: Vector, alpha: f64) -> Result<Self> {
        let d = x0.dim();
        let n = grid.steps();
        let path = GridPath::new(grid, vec![x0; n + 1])?;
        Self::from_steps(alpha, path, vec![SymTensor2::zeros(d); n])
    }

    /// `S̃_{s,t} = S_{s,t} + φ_t − φ_s`.
    pub fn perturbed_lift(&self, phi: &GridPath<SymTensor2>) -> Result<Self> {
        if phi.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        if phi.first().dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: phi.first().dim() });
        }
        let steps = self
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| s.sum(&phi.value(i + 1).diff(phi.value(i))))
            .collect();
        Self::from_steps(self.alpha, self.path.clone(), steps)
    }

    /// The same data tagged with a different exponent.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::from_steps(alpha, self.path.clone(), self.steps.clone())
    }

    /// Restriction to the points `i0..=i1`, with time shifted to start at 0.
    pub fn restrict(&self, i0: usize, i1: usize) -> Result<Self> {
        let path = self.path.window(i0, i1)?;
        Self::from_steps(self.alpha, path, self.steps[i0..i1].to_vec())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.path.dim()
    }

    pub fn grid(&self) -> &Grid {
        self.path.grid()
    }

    pub fn grid_arc(&self) -> &Arc<Grid> {
        self.path.grid_arc()
    }

    pub fn path(&self) -> &GridPath<Vector> {
        &self.path
    }

    pub fn steps(&self) -> &[SymTensor2] {
        &self.steps
    }

    /// Content hash of exponent, grid, path and second level.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn increment(&self, i: usize, j: usize) -> Result<Vector> {
        self.path.increment(i, j)
    }

    pub(crate) fn x(&self, i: usize) -> &[f64] {
        self.path.value(i).as_slice()
    }

    pub(crate) fn dx(&self, i: usize, j: usize) -> Vec<f64> {
        self.x(j).iter().zip(self.x(i)).map(|(a, b)| a - b).collect()
    }

    /// `S_{t_i, t_j}` by left-folding the steps through the Chen relation.
    pub fn second_level(&self, i: usize, j: usize) -> Result<SymTensor2> {
        self.grid().check_pair(i, j)?;
        if i == j {
            return Err(Error::UnorderedPair(i, j));
        }
        Ok(self.fold(i, j))
    }

    fn fold(&self, i: usize, j: usize) -> SymTensor2 {
        let mut acc = self.steps[i].clone();
        for k in (i + 1)..j {
            acc = acc.chen_step(&self.steps[k], &self.dx(i, k), &self.dx(k, k + 1));
        }
        acc
    }

    /// `S_{0j} − S_{0i} − Sym(X_{0i} ⊗ X_{ij})`: constant cost, roundoff relative to `S_{0j}`.
    fn via_prefix(&self, i: usize, j: usize) -> SymTensor2 {
        if i == 0 {
            return self.prefix[j].clone();
        }
        let cross = sym_outer_raw(&self.dx(0, i), &self.dx(i, j));
        self.prefix[j].diff(&self.prefix[i]).diff(&cross)
    }

    /// Pair value used by seminorm scans: a fold for short spans, the prefix form otherwise.
    pub(crate) fn pair_value(&self, i: usize, j: usize) -> SymTensor2 {
        if j - i <= FOLD_SPAN_LIMIT {
            self.fold(i, j)
        } else {
            self.via_prefix(i, j)
        }
    }

    /// Frobenius norm of `S_{ik} − S_{ij} − S_{jk} − Sym(X_{ij} ⊗ X_{jk})`.
    pub fn chen_defect(&self, i: usize, j: usize, k: usize) -> Result<f64> {
        self.grid().check_index(i)?;
        self.grid().check_index(j)?;
        self.grid().check_index(k)?;
        if !(i < j && j < k) {
            return Err(Error::NonMonotoneTriple(i, j, k));
        }
        let cross = sym_outer_raw(&self.dx(i, j), &self.dx(j, k));
        let expect = self.fold(i, j).sum(&self.fold(j, k)).sum(&cross);
        Ok(self.fold(i, k).dist(&expect))
    }

    /// The Chen tolerance for triple `(i, j, k)`: `TOL_CHEN` scaled by the term sizes.
    pub fn chen_tolerance(&self, i: usize, j: usize, k: usize) -> f64 {
        let scale = self.fold(i, k).norm()
            + self.fold(i, j).norm()
            + self.fold(j, k).norm()
            + crate::tensor::l2(&self.dx(i, j)) * crate::tensor::l2(&self.dx(j, k));
        TOL_CHEN * scale.max(1.0)
    }

    /// The second level as a lazily evaluated two-parameter field.
    pub fn second_level_field(self: &Arc<Self>) -> TwoParamField<SymTensor2> {
        let r = self.clone();
        TwoParamField::lazy(self.grid_arc().clone(), move |i, j| r.fold(i, j))
    }

    pub fn norms(&self, budget: PairBudget) -> RrpNorms {
        let x = scan_pairs(&self.path, self.alpha, budget).seminorm;
        let s = scan_pairs(&SecondLevelDiff { a: self, b: None }, 2.0 * self.alpha, budget).seminorm;
        RrpNorms { x_alpha: x, s_2alpha: s, total: x + s }
    }

    /// `‖X‖_γ` at an arbitrary exponent in `(0, 1]`.
    pub fn x_seminorm(&self, gamma: f64, budget: PairBudget) -> Result<HolderReport> {
        crate::grid::holder_seminorm(&self.path, gamma, budget)
    }

    /// `‖S‖_{γ}` at an arbitrary exponent in `(0, 2]`.
    pub fn s_seminorm(&self, gamma: f64, budget: PairBudget) -> Result<HolderReport> {
        crate::grid::two_param_seminorm(&SecondLevelDiff { a: self, b: None }, gamma, budget)
    }

    pub fn to_json(&self) -> RrpJson {
        RrpJson {
            schema: RRP_SCHEMA.to_string(),
            alpha: self.alpha,
            grid: self.grid().times().to_vec(),
            path: self.path.to_rows(),
            second_level_steps: self.steps.iter().map(|s| s.to_rows()).collect(),
        }
    }

    pub fn from_json(doc: RrpJson) -> Result<Self> {
        if doc.schema != RRP_SCHEMA {
            return Err(Error::InvalidConfig(format!("unexpected schema '{}'", doc.schema)));
        }
        let grid = Arc::new(Grid::new(doc.grid)?);
        let path = GridPath::from_rows(grid, doc.path)?;
        let steps = doc
            .second_level_steps
            .iter()
            .map(|rows| SymTensor2::from_rows_tol(rows, LOAD_SYMMETRY_TOL))
            .collect::<Result<Vec<_>>>()?;
        Self::from_steps(doc.alpha, path, steps)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json())?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let doc: RrpJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Self::from_json(doc)
    }
}

/// On-disk form of a reduced rough path.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RrpJson {
    pub schema: String,
    pub alpha: f64,
    pub grid: Vec<f64>,
    pub path: Vec<Vec<f64>>,
    pub second_level_steps: Vec<Vec<Vec<f64>>>,
}

/// `d_α(a, b) = ‖X − X̃‖_α + ‖S − S̃‖_{2α}` over the enumerated pairs.
pub fn rrp_distance(a: &ReducedRoughPath, b: &ReducedRoughPath, budget: PairBudget) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    if a.alpha != b.alpha {
        return Err(Error::ExponentMismatch(a.alpha, b.alpha));
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let first = crate::grid::NormField::new(a.grid(), |i, j| {
        a.x(j)
            .iter()
            .zip(a.x(i))
            .zip(b.x(j).iter().zip(b.x(i)))
            .map(|((aj, ai), (bj, bi))| {
                let d = (aj - ai) - (bj - bi);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    });
    let x = scan_pairs(&first, a.alpha, budget).seminorm;
    let s = scan_pairs(&SecondLevelDiff { a, b: Some(b) }, 2.0 * a.alpha, budget).seminorm;
    Ok(x + s)
}

pub fn rrp_norm(r: &ReducedRoughPath, budget: PairBudget) -> RrpNorms {
    r.norms(budget)
}

/// `|S^a_{ij} − S^b_{ij}|` (or `|S^a_{ij}|` alone), folded row by row in scans.
struct SecondLevelDiff<'a> {
    a: &'a ReducedRoughPath,
    b: Option<&'a ReducedRoughPath>,
}

impl PairField for SecondLevelDiff<'_> {
    fn grid(&self) -> &Grid {
        self.a.grid()
    }

    fn pair_norm(&self, i: usize, j: usize) -> f64 {
        match self.b {
            None => self.a.pair_value(i, j).norm(),
            Some(b) => self.a.pair_value(i, j).dist(&b.pair_value(i, j)),
        }
    }

    fn row_norms(&self, i: usize, js: &[usize]) -> Vec<f64> {
        let Some(&last) = js.last() else { return Vec::new() };
        let span = last - i;
        if span > 8 * js.len() {
            return js.iter().map(|&j| self.pair_norm(i, j)).collect();
        }
        let mut out = Vec::with_capacity(js.len());
        let mut next = js.iter().peekable();
        let mut acc_a = self.a.steps[i].clone();
        let mut acc_b = self.b.map(|b| b.steps[i].clone());
        for j in (i + 1)..=last {
            if j > i + 1 {
                let k = j - 1;
                acc_a = acc_a.chen_step(&self.a.steps[k], &self.a.dx(i, k), &self.a.dx(k, j));
                if let (Some(b), Some(acc)) = (self.b, acc_b.as_mut()) {
                    *acc = acc.chen_step(&b.steps[k], &b.dx(i, k), &b.dx(k, j));
                }
            }
            if next.peek() == Some(&&j) {
                next.next();
                out.push(match &acc_b {
                    None => acc_a.norm(),
                    Some(acc) => acc_a.dist(acc),
                });
            }
        }
        out
    }
}

/// Outcome of checking a dense pairwise second-level table against Chen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChenValidation {
    pub passed: bool,
    pub worst_defect: f64,
    pub worst_triple: Option<(usize, usize, usize)>,
    pub triples_checked: usize,
}

/// On-disk dense second-level table: `second_level_table[i][j - i - 1] = S_{t_i, t_j}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SecondLevelTableJson {
    pub schema: String,
    pub grid: Vec<f64>,
    pub path: Vec<Vec<f64>>,
    pub second_level_table: Vec<Vec<Vec<Vec<f64>>>>,
}

/// Checks Chen on every triple `(i, j, j + 1)` of a dense table, which implies it on all triples.
pub fn validate_dense_table(path: &GridPath<Vector>, table: &TwoParamField<SymTensor2>) -> Result<ChenValidation> {
    if path.grid() != table.grid() {
        return Err(Error::GridMismatch);
    }
    let n = path.grid().steps();
    let mut worst = (0.0_f64, None, true);
    let mut checked = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let k = j + 1;
            let (sik, sij, sjk) = (table.value(i, k)?, table.value(i, j)?, table.value(j, k)?);
            let (xij, xjk) = (path.increment(i, j)?, path.increment(j, k)?);
            let cross = sym_outer_raw(xij.as_slice(), xjk.as_slice());
            let defect = sik.dist(&sij.sum(&sjk).sum(&cross));
            let tol = TOL_CHEN * (sik.norm() + sij.norm() + sjk.norm() + xij.norm() * xjk.norm()).max(1.0);
            checked += 1;
            if defect > worst.0 {
                worst.0 = defect;
                worst.1 = Some((i, j, k));
            }
            if defect > tol {
                worst.2 = false;
            }
        }
    }
    Ok(ChenValidation { passed: worst.2, worst_defect: worst.0, worst_triple: worst.1, triples_checked: checked })
}

impl SecondLevelTableJson {
    pub fn parse(self) -> Result<(GridPath<Vector>, TwoParamField<SymTensor2>)> {
        if self.schema != RRP_TABLE_SCHEMA {
            return Err(Error::InvalidConfig(format!("unexpected schema '{}'", self.schema)));
        }
        let grid = Arc::new(Grid::new(self.grid)?);
        let path = GridPath::from_rows(grid.clone(), self.path)?;
        let rows = self
            .second_level_table
            .iter()
            .map(|row| row.iter().map(|m| SymTensor2::from_rows_tol(m, LOAD_SYMMETRY_TOL)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok((path, TwoParamField::from_upper_rows(grid, rows)?))
    }

    pub fn from_rough_path(r: &ReducedRoughPath) -> Self {
        let n = r.grid().steps();
        Self {
            schema: RRP_TABLE_SCHEMA.to_string(),
            grid: r.grid().times().to_vec(),
            path: r.path().to_rows(),
            second_level_table: (0..n).map(|i| ((i + 1)..=n).map(|j| r.fold(i, j).to_rows()).collect()).collect(),
        }
    }
}

fn fingerprint(alpha: f64, path: &GridPath<Vector>, steps: &[SymTensor2]) -> String {
    let mut h = Sha256::new();
    h.update(alpha.to_le_bytes());
    h.update((path.dim() as u64).to_le_bytes());
    for t in path.grid().times() {
        h.update(t.to_le_bytes());
    }
    for v in path.values() {
        for x in v.as_slice() {
            h.update(x.to_le_bytes());
        }
    }
    for s in steps {
        for x in s.data() {
            h.update(x.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::sym_outer;
    use proptest::prelude::*;

    fn line(n: usize) -> GridPath<Vector> {
        let g = Arc::new(Grid::uniform(n, 1.0).unwrap());
        GridPath::from_fn(g, |t| Vector::new(vec![t]).unwrap()).unwrap()
    }

    fn circle(n: usize, horizon: f64) -> GridPath<Vector> {
        let g = Arc::new(Grid::uniform(n, horizon).unwrap());
        GridPath::from_fn(g, |t| Vector::new(vec![t.cos(), t.sin()]).unwrap()).unwrap()
    }

    #[test]
    fn second_level_examples() {
        let g = Arc::new(Grid::new(vec![0.0, 0.5, 1.0]).unwrap());
        let x = GridPath::from_fn(g, |t| Vector::new(vec![t]).unwrap()).unwrap();
        let r = ReducedRoughPath::geometric_lift(x, 0.5).unwrap();
        assert_eq!(r.second_level(0, 1).unwrap().get(0, 0), 0.125);
        assert_eq!(r.second_level(0, 2).unwrap().get(0, 0), 0.5);
        assert!(r.second_level(1, 1).is_err());
        assert!(matches!(r.second_level(0, 5), Err(Error::IndexOutOfRange { .. })));

        let r = ReducedRoughPath::geometric_lift(circle(50, 3.0), 0.45).unwrap();
        let (i, j, k) = (3, 20, 41);
        let lhs = r.second_level(i, k).unwrap();
        let rhs = r
            .second_level(i, j)
            .unwrap()
            .sum(&r.second_level(j, k).unwrap())
            .sum(&sym_outer(&r.increment(i, j).unwrap(), &r.increment(j, k).unwrap()).unwrap());
        assert!(lhs.dist(&rhs) < 1e-14);
    }

    #[test]
    fn chen_defect_examples() {
        let r = ReducedRoughPath::geometric_lift(circle(200, 6.0), 0.5).unwrap();
        assert!(r.chen_defect(0, 77, 200).unwrap() <= 1e-12);
        assert!(matches!(r.chen_defect(5, 5, 9), Err(Error::NonMonotoneTriple(5, 5, 9))));
        assert!(matches!(r.chen_defect(5, 3, 9), Err(Error::NonMonotoneTriple(..))));

        // Per-step zero storage composes through Chen, so its defect is roundoff;
        // the violation only shows up for a dense table (see `dense_table_validation`).
        let p = circle(20, 1.0);
        let zero = ReducedRoughPath::from_steps(0.5, p, vec![SymTensor2::zeros(2); 20]).unwrap();
        assert!(zero.chen_defect(2, 9, 15).unwrap() <= 1e-14);
    }

    #[test]
    fn geometric_lift_examples() {
        let r = ReducedRoughPath::geometric_lift(line(16), 0.5).unwrap();
        for (i, j) in [(0, 16), (3, 11), (7, 8)] {
            let h = r.grid().t(j) - r.grid().t(i);
            assert!((r.second_level(i, j).unwrap().get(0, 0) - 0.5 * h * h).abs() < 1e-15);
        }
        let g = Arc::new(Grid::uniform(8, 1.0).unwrap());
        let c = GridPath::from_fn(g, |_| Vector::new(vec![1.0, -2.0]).unwrap()).unwrap();
        let r = ReducedRoughPath::geometric_lift(c, 0.4).unwrap();
        assert_eq!(r.second_level(0, 8).unwrap().norm(), 0.0);

        let r = ReducedRoughPath::geometric_lift(circle(64, 2.0), 0.45).unwrap();
        let s = r.second_level(5, 40).unwrap();
        let x = r.increment(5, 40).unwrap();
        assert!((s.trace() - 0.5 * x.norm().powi(2)).abs() < 1e-13);

        assert!(matches!(
            ReducedRoughPath::geometric_lift(line(4), 0.3),
            Err(Error::InvalidExponent { .. })
        ));
    }

    #[test]
    fn perturbed_lift_examples() {
        let r = ReducedRoughPath::geometric_lift(line(10), 0.5).unwrap();
        let zero = GridPath::from_fn(r.grid_arc().clone(), |_| SymTensor2::zeros(1)).unwrap();
        let same = r.perturbed_lift(&zero).unwrap();
        assert_eq!(same.steps(), r.steps());
        assert_eq!(same.fingerprint(), r.fingerprint());

        let ito = ReducedRoughPath::ito_lift(line(10), 0.5).unwrap();
        for (i, j) in [(0, 10), (2, 7)] {
            let h = r.grid().t(j) - r.grid().t(i);
            let s = ito.second_level(i, j).unwrap().get(0, 0);
            assert!((s - (0.5 * h * h - 0.5 * h)).abs() < 1e-15);
        }
        let other = Arc::new(Grid::uniform(10, 2.0).unwrap());
        let phi = GridPath::from_fn(other, |_| SymTensor2::zeros(1)).unwrap();
        assert!(matches!(r.perturbed_lift(&phi), Err(Error::GridMismatch)));
    }

    #[test]
    fn norm_and_distance_examples() {
        let r = ReducedRoughPath::geometric_lift(line(32), 0.5).unwrap();
        let n = r.norms(PairBudget::Auto);
        assert!((n.x_alpha - 1.0).abs() < 1e-14);
        assert!((n.s_2alpha - 0.5).abs() < 1e-14);
        assert_eq!(n.total, n.x_alpha + n.s_2alpha);

        let one = ReducedRoughPath::trivial(r.grid_arc().clone(), Vector::zeros(1), 0.5).unwrap();
        assert_eq!(one.norms(PairBudget::Auto).total, 0.0);
        assert_eq!(rrp_distance(&r, &r, PairBudget::Auto).unwrap(), 0.0);
        assert!((rrp_distance(&r, &one, PairBudget::Auto).unwrap() - n.total).abs() < 1e-14);

        let other_alpha = r.with_alpha(0.45).unwrap();
        assert!(matches!(rrp_distance(&r, &other_alpha, PairBudget::Auto), Err(Error::ExponentMismatch(..))));
    }

    #[test]
    fn dyadic_rows_match_pointwise() {
        let r = ReducedRoughPath::geometric_lift(circle(300, 4.0), 0.4).unwrap();
        let f = SecondLevelDiff { a: &r, b: None };
        for i in [0, 5, 100] {
            let js: Vec<usize> = ((i + 1)..=300).collect();
            let rows = f.row_norms(i, &js);
            for (k, &j) in js.iter().enumerate() {
                assert!((rows[k] - f.pair_norm(i, j)).abs() < 1e-13);
                assert!((rows[k] - r.fold(i, j).norm()).abs() < 1e-15);
            }
        }
        let all = r.norms(PairBudget::AllPairs);
        let dy = r.norms(PairBudget::Dyadic);
        assert!(dy.total <= all.total + 1e-15);
    }

    #[test]
    fn json_round_trip_and_symmetry_check() {
        let r = ReducedRoughPath::ito_lift(circle(12, 1.0), 0.45).unwrap();
        let back = ReducedRoughPath::from_json(r.to_json()).unwrap();
        assert_eq!(back.fingerprint(), r.fingerprint());

        let mut doc = r.to_json();
        doc.second_level_steps[3][0][1] += 1e-6;
        assert!(matches!(ReducedRoughPath::from_json(doc), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn dense_table_validation() {
        let r = ReducedRoughPath::geometric_lift(circle(10, 1.0), 0.5).unwrap();
        let (p, t) = SecondLevelTableJson::from_rough_path(&r).parse().unwrap();
        let v = validate_dense_table(&p, &t).unwrap();
        assert!(v.passed);
        assert_eq!(v.triples_checked, 45);

        let mut doc = SecondLevelTableJson::from_rough_path(&r);
        doc.second_level_table[2][3][0][0] += 0.1;
        let (p, t) = doc.parse().unwrap();
        let v = validate_dense_table(&p, &t).unwrap();
        assert!(!v.passed);
        let (i, j, k) = v.worst_triple.unwrap();
        assert!(i == 2 || j == 2 || k == 6 || j == 6);

        // A zero table on a moving path violates Chen.
        let zero = TwoParamField::dense(p.grid_arc().clone(), |_, _| SymTensor2::zeros(2));
        assert!(!validate_dense_table(&p, &zero).unwrap().passed);
    }

    fn arb_path(n: usize) -> impl Strategy<Value = GridPath<Vector>> {
        proptest::collection::vec(-1.0..1.0f64, 2 * n).prop_map(move |inc| {
            let g = Arc::new(Grid::uniform(n, 1.0).unwrap());
            let mut rows = vec![vec![0.0, 0.0]];
            for k in 0..n {
                let last = rows.last().unwrap().clone();
                rows.push(vec![last[0] + inc[2 * k], last[1] + inc[2 * k + 1]]);
            }
            GridPath::from_rows(g, rows).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn geometric_fold_matches_closed_form(p in arb_path(40)) {
            let r = ReducedRoughPath::geometric_lift(p, 0.4).unwrap();
            for (i, j) in [(0, 40), (3, 17), (20, 39)] {
                let x = r.increment(i, j).unwrap();
                let closed = sym_outer(&x, &x).unwrap().scaled(0.5);
                prop_assert!(r.second_level(i, j).unwrap().dist(&closed) <= 1e-12 * closed.norm().max(1.0));
            }
        }

        #[test]
        fn perturbations_add(p in arb_path(20), a in -1.0..1.0f64, b in -1.0..1.0f64) {
            let r = ReducedRoughPath::geometric_lift(p, 0.5).unwrap();
            let g = r.grid_arc().clone();
            let phi = GridPath::from_fn(g.clone(), |t| SymTensor2::identity(2).scaled(a * t.sin())).unwrap();
            let psi = GridPath::from_fn(g.clone(), |t| SymTensor2::identity(2).scaled(b * t * t)).unwrap();
            let both = GridPath::from_fn(g, |t| SymTensor2::identity(2).scaled(a * t.sin() + b * t * t)).unwrap();
            let lhs = r.perturbed_lift(&phi).unwrap().perturbed_lift(&psi).unwrap();
            let rhs = r.perturbed_lift(&both).unwrap();
            for (x, y) in lhs.steps().iter().zip(rhs.steps()) {
                prop_assert!(x.dist(y) <= 1e-14);
            }
            prop_assert!(lhs.chen_defect(1, 7, 19).unwrap() <= 1e-12);
        }

        #[test]
        fn distance_axioms(p in arb_path(16), q in arb_path(16), s in arb_path(16)) {
            let a = ReducedRoughPath::geometric_lift(p, 0.45).unwrap();
            let b = ReducedRoughPath::ito_lift(q, 0.45).unwrap();
            let c = ReducedRoughPath::geometric_lift(s, 0.45).unwrap();
            let ab = rrp_distance(&a, &b, PairBudget::Auto).unwrap();
            let ba = rrp_distance(&b, &a, PairBudget::Auto).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-12 * ab.max(1.0));
            prop_assert!(rrp_distance(&a, &a, PairBudget::Auto).unwrap() <= 1e-12);
            let ac = rrp_distance(&a, &c, PairBudget::Auto).unwrap();
            let bc = rrp_distance(&b, &c, PairBudget::Auto).unwrap();
            prop_assert!(ac <= ab + bc + 1e-12);
        }

        #[test]
        fn norms_are_homogeneous(p in arb_path(16), c in -3.0..3.0f64) {
            let a = ReducedRoughPath::geometric_lift(p.clone(), 0.45).unwrap();
            let b = ReducedRoughPath::geometric_lift(p.scaled(c), 0.45).unwrap();
            let (na, nb) = (a.norms(PairBudget::Auto), b.norms(PairBudget::Auto));
            prop_assert!((nb.x_alpha - c.abs() * na.x_alpha).abs() <= 1e-12 * nb.x_alpha.max(1.0));
            prop_assert!((nb.s_2alpha - c * c * na.s_2alpha).abs() <= 1e-12 * nb.s_2alpha.max(1.0));
        }
    }
}
