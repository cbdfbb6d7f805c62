//! Controlled paths `(Y, Y′)` over a reduced rough path, with remainder
//! `R^Y_{s,t} = Y_{s,t} − Y′_s X_{s,t}`.

use crate::error::{Error, Result};
use crate::grid::{scan_pairs, GridPath, PairBudget, PairField};
use crate::rough_path::ReducedRoughPath;
use crate::smooth::{Codomain, ProbeBall, SmoothFunction};
use crate::tensor::{apply_bilinear_first_raw, apply_linmap_raw, BilinMap, LinMap, Tensorial, Vector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const CONTROLLED_SCHEMA: &str = "rrpath.controlled_path/1";

/// A Gubinelli derivative: something that maps a driver increment to a value increment.
pub trait GubinelliDerivative: Tensorial {
    type Value: Tensorial;

    /// `Y′ · dx`.
    fn act(&self, dx: &[f64]) -> Self::Value;

    /// Whether `self` acts on `ℝᵈ` and lands in the space of `value`.
    fn fits(&self, value: &Self::Value, d: usize) -> bool;
}

impl GubinelliDerivative for LinMap {
    type Value = Vector;

    fn act(&self, dx: &[f64]) -> Vector {
        Vector::from_raw(apply_linmap_raw(self, dx))
    }

    fn fits(&self, value: &Vector, d: usize) -> bool {
        self.cols() == d && self.rows() == value.dim()
    }
}

impl GubinelliDerivative for BilinMap {
    type Value = LinMap;

    fn act(&self, dx: &[f64]) -> LinMap {
        apply_bilinear_first_raw(self, dx)
    }

    fn fits(&self, value: &LinMap, d: usize) -> bool {
        self.dim() == d && self.rows() == value.rows() && value.cols() == d
    }
}

/// `(Y, Y′)` sampled on the grid of its base rough path.
#[derive(Clone, Debug)]
pub struct ControlledPath<D: GubinelliDerivative> {
    base: Arc<ReducedRoughPath>,
    y: GridPath<D::Value>,
    y_prime: GridPath<D>,
}

/// Controlled path with values in `W = ℝⁿ`.
pub type ControlledVector = ControlledPath<LinMap>;

/// Integrand with values in `L(V, W)` and derivative in `L(V ⊗ V, W)`.
pub type ControlledIntegrand = ControlledPath<BilinMap>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlledNorms {
    pub y_prime_alpha: f64,
    pub remainder_2alpha: f64,
    pub seminorm: f64,
    pub full_norm: f64,
}

/// A bound evaluated two ways: the collapsed closed form and the explicit term-by-term
/// chain with measured quantities. `bound` is their maximum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBound {
    pub closed_form: f64,
    pub chain: f64,
    pub bound: f64,
}

impl NormBound {
    pub(crate) fn new(closed_form: f64, chain: f64) -> Self {
        Self { closed_form, chain, bound: closed_form.max(chain) }
    }
}

impl<D: GubinelliDerivative> ControlledPath<D> {
    pub fn new(base: Arc<ReducedRoughPath>, y: GridPath<D::Value>, y_prime: GridPath<D>) -> Result<Self> {
        if y.grid() != base.grid() || y_prime.grid() != base.grid() {
            return Err(Error::GridMismatch);
        }
        let d = base.dim();
        if !y_prime.first().fits(y.first(), d) {
            return Err(Error::DimensionMismatch { expected: d, found: y_prime.first().data().len() });
        }
        Ok(Self { base, y, y_prime })
    }

    pub(crate) fn from_parts(base: Arc<ReducedRoughPath>, y: Vec<D::Value>, y_prime: Vec<D>) -> Result<Self> {
        let grid = base.grid_arc().clone();
        let y = GridPath::new(grid.clone(), y)?;
        let y_prime = GridPath::new(grid, y_prime)?;
        Self::new(base, y, y_prime)
    }

    pub fn base(&self) -> &Arc<ReducedRoughPath> {
        &self.base
    }

    pub fn y(&self) -> &GridPath<D::Value> {
        &self.y
    }

    pub fn y_prime(&self) -> &GridPath<D> {
        &self.y_prime
    }

    pub fn same_base(&self, other: &ReducedRoughPath) -> bool {
        std::ptr::eq(self.base.as_ref(), other) || self.base.fingerprint() == other.fingerprint()
    }

    pub(crate) fn check_base(&self, other: &ReducedRoughPath) -> Result<()> {
        if self.same_base(other) {
            Ok(())
        } else if self.base.grid() != other.grid() {
            Err(Error::GridMismatch)
        } else {
            Err(Error::BaseMismatch)
        }
    }

    /// `Y_{ij} − Y′_i X_{ij}`.
    pub fn remainder(&self, i: usize, j: usize) -> Result<D::Value> {
        self.base.grid().check_pair(i, j)?;
        Ok(self.remainder_unchecked(i, j))
    }

    pub(crate) fn remainder_unchecked(&self, i: usize, j: usize) -> D::Value {
        let dx = self.base.dx(i, j);
        self.y.value(j).diff(self.y.value(i)).diff(&self.y_prime.value(i).act(&dx))
    }

    /// `‖Y′‖_α`, `‖R^Y‖_{2α}` and the derived sums at the base exponent.
    pub fn norms(&self, budget: PairBudget) -> ControlledNorms {
        self.norms_at(self.base.alpha(), budget)
    }

    /// As [`norms`](Self::norms) at an arbitrary exponent `gamma ∈ (0, 1]`.
    pub fn norms_at(&self, gamma: f64, budget: PairBudget) -> ControlledNorms {
        let yp = scan_pairs(&self.y_prime, gamma, budget).seminorm;
        let r = self.remainder_seminorm(2.0 * gamma, budget);
        let seminorm = yp + r;
        ControlledNorms {
            y_prime_alpha: yp,
            remainder_2alpha: r,
            seminorm,
            full_norm: seminorm + self.y.first().norm() + self.y_prime.first().norm(),
        }
    }

    pub fn remainder_seminorm(&self, exponent: f64, budget: PairBudget) -> f64 {
        scan_pairs(&RemainderField { c: self }, exponent, budget).seminorm
    }

    /// `max(sup |Y − Ỹ|, sup |Y′ − Ỹ′|)`.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        Ok(self.y.sup_distance(&other.y)?.max(self.y_prime.sup_distance(&other.y_prime)?))
    }

    /// Componentwise difference, itself controlled by the same base.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        other.check_base(&self.base)?;
        let y = self.y.values().iter().zip(other.y.values()).map(|(a, b)| a.diff(b)).collect();
        let yp = self.y_prime.values().iter().zip(other.y_prime.values()).map(|(a, b)| a.diff(b)).collect();
        Self::from_parts(self.base.clone(), y, yp)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { base: self.base.clone(), y: self.y.scaled(c), y_prime: self.y_prime.scaled(c) }
    }
}

struct RemainderField<'a, D: GubinelliDerivative> {
    c: &'a ControlledPath<D>,
}

impl<D: GubinelliDerivative> PairField for RemainderField<'_, D> {
    fn grid(&self) -> &crate::grid::Grid {
        self.c.base.grid()
    }
    fn pair_norm(&self, i: usize, j: usize) -> f64 {
        self.c.remainder_unchecked(i, j).norm()
    }
}

impl ControlledVector {
    /// Constant path `Y ≡ y0`, `Y′ ≡ 0`.
    pub fn constant(base: Arc<ReducedRoughPath>, y0: Vector) -> Result<Self> {
        let n = base.grid().points();
        let d = base.dim();
        let k = y0.dim();
        Self::from_parts(base, vec![y0; n], vec![LinMap::zeros(k, d); n])
    }

    /// `(X, Id)`.
    pub fn driver(base: Arc<ReducedRoughPath>) -> Result<Self> {
        let d = base.dim();
        let y = base.path().values().to_vec();
        let yp = vec![LinMap::identity(d); y.len()];
        Self::from_parts(base, y, yp)
    }

    pub fn dim(&self) -> usize {
        self.y.first().dim()
    }

    pub fn to_json(&self) -> ControlledJson {
        ControlledJson {
            schema: CONTROLLED_SCHEMA.to_string(),
            base_fingerprint: self.base.fingerprint().to_string(),
            grid: self.base.grid().times().to_vec(),
            y: self.y.to_rows(),
            y_prime: self.y_prime.values().iter().map(|m| m.to_rows()).collect(),
        }
    }

    /// Loads a controlled path; `base` must be the rough path it was saved against.
    pub fn from_json(doc: ControlledJson, base: Arc<ReducedRoughPath>) -> Result<Self> {
        if doc.schema != CONTROLLED_SCHEMA {
            return Err(Error::InvalidConfig(format!("unexpected schema '{}'", doc.schema)));
        }
        if doc.base_fingerprint != base.fingerprint() {
            return Err(Error::BaseMismatch);
        }
        if doc.grid.as_slice() != base.grid().times() {
            return Err(Error::GridMismatch);
        }
        let y = doc.y.into_iter().map(Vector::new).collect::<Result<Vec<_>>>()?;
        let yp = doc.y_prime.iter().map(|rows| LinMap::from_rows(rows)).collect::<Result<Vec<_>>>()?;
        Self::from_parts(base, y, yp)
    }

    /// `(F(Y), DF(Y) Y′)` for a vector-valued `F`.
    pub fn compose(&self, f: &SmoothFunction) -> Result<ControlledVector> {
        let Codomain::Vector(k) = f.codomain() else {
            return Err(Error::InvalidConfig(format!("'{}' is field-valued; use compose_integrand", f.name())));
        };
        self.check_domain(f)?;
        let n = self.dim();
        let pts: Vec<(Vector, LinMap)> = (0..self.y.values().len())
            .into_par_iter()
            .map(|t| {
                let y = self.y.value(t).as_slice();
                let fy = f.eval_flat(y)?;
                let df = LinMap::from_raw(k, n, f.derivative_flat(1, y)?);
                Ok((Vector::from_raw(fy), df.compose(self.y_prime.value(t))?))
            })
            .collect::<Result<_>>()?;
        let (y, yp) = pts.into_iter().unzip();
        ControlledPath::from_parts(self.base.clone(), y, yp)
    }

    /// `(F(Y), DF(Y) Y′)` for a field `F: W → L(V, E)`, packaged as an integrand with
    /// `Ξ′[k][i][j] = Σ_l ∂_l F_{kj}(Y) Y′[l][i]`.
    pub fn compose_integrand(&self, f: &SmoothFunction) -> Result<ControlledIntegrand> {
        let Codomain::Field { rows, cols } = f.codomain() else {
            return Err(Error::InvalidConfig(format!("'{}' is vector-valued; use compose", f.name())));
        };
        let d = self.base.dim();
        if cols != d {
            return Err(Error::DimensionMismatch { expected: d, found: cols });
        }
        self.check_domain(f)?;
        let n = self.dim();
        let pts: Vec<(LinMap, BilinMap)> = (0..self.y.values().len())
            .into_par_iter()
            .map(|t| {
                let y = self.y.value(t).as_slice();
                let fy = f.eval_flat(y)?;
                let df = f.derivative_flat(1, y)?;
                let yp = self.y_prime.value(t);
                let mut b = vec![0.0; rows * d * d];
                for k in 0..rows {
                    for j in 0..d {
                        let grad = &df[(k * d + j) * n..(k * d + j + 1) * n];
                        for i in 0..d {
                            b[(k * d + i) * d + j] = (0..n).map(|l| grad[l] * yp.get(l, i)).sum();
                        }
                    }
                }
                Ok((LinMap::from_raw(rows, d, fy), BilinMap::new(rows, d, b)?))
            })
            .collect::<Result<_>>()?;
        let (y, yp) = pts.into_iter().unzip();
        ControlledPath::from_parts(self.base.clone(), y, yp)
    }

    fn check_domain(&self, f: &SmoothFunction) -> Result<()> {
        if f.domain_dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: f.domain_dim() });
        }
        Ok(())
    }
}

impl ControlledIntegrand {
    /// Scalar integrand `Y_t = X_tᵀ ∈ L(ℝᵈ, ℝ)` with `Y′[0][i][j] = δ_{ij}`, so that `∫ Y d𝕏 = ∫ X · dX`.
    pub fn driver_identity(base: Arc<ReducedRoughPath>) -> Result<Self> {
        let d = base.dim();
        let y: Vec<LinMap> = base.path().values().iter().map(|x| LinMap::from_raw(1, d, x.as_slice().to_vec())).collect();
        let mut id = BilinMap::zeros(1, d);
        for i in 0..d {
            id.set(0, i, i, 1.0);
        }
        let yp = vec![id; y.len()];
        Self::from_parts(base, y, yp)
    }

    /// Constant integrand `Y ≡ κ`, `Y′ ≡ 0`.
    pub fn constant(base: Arc<ReducedRoughPath>, kappa: LinMap) -> Result<Self> {
        let n = base.grid().points();
        let rows = kappa.rows();
        let d = base.dim();
        Self::from_parts(base, vec![kappa; n], vec![BilinMap::zeros(rows, d); n])
    }

    /// Output dimension of the integral.
    pub fn out_dim(&self) -> usize {
        self.y.first().rows()
    }

    /// Replaces every `Y′_t` by its symmetrization in the last two indices.
    pub fn symmetrized(&self) -> Self {
        Self { base: self.base.clone(), y: self.y.clone(), y_prime: self.y_prime.map(|b| b.symmetrized()) }
    }

    /// `max_t ‖Y′_t − Sym(Y′_t)‖`.
    pub fn antisymmetry_defect(&self) -> f64 {
        self.y_prime.values().iter().map(|b| b.antisymmetry_defect()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ControlledJson {
    pub schema: String,
    pub base_fingerprint: String,
    pub grid: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub y_prime: Vec<Vec<Vec<f64>>>,
}

/// Sup norms of `F, DF, D²F` covering every segment `[Y_s, Y_t]`: global bounds when the
/// function has them, otherwise the ball around `Y_0` containing the path.
pub(crate) fn segment_sup_norms(f: &SmoothFunction, y: &GridPath<Vector>) -> Result<[f64; 3]> {
    if let Some(b) = f.global_bounds() {
        return Ok([b[0], b[1], b[2]]);
    }
    let center = y.first().as_slice().to_vec();
    let radius = y.values().iter().map(|v| v.dist(y.first())).fold(0.0, f64::max);
    let s = f.sup_norms_on(2.min(f.order()), &ProbeBall { center, radius }, 64)?;
    Ok([s[0], s.get(1).copied().unwrap_or(0.0), s.get(2).copied().unwrap_or(0.0)])
}

fn time_factor(t: f64, alpha: f64) -> f64 {
    1.0 + t.powf(alpha) + t.powf(2.0 * alpha)
}

/// Bound on `‖F(Y)‖_{X;α}` given `‖Y, Y′‖_{X;α} ≤ M`, `M ≥ 1`.
///
/// Closed form `C M ‖F‖_{C²_b} (1 + ‖X‖_α)² (|Y′_0| + ‖Y, Y′‖)` with
/// `C = 2(1 + T^α + T^{2α})(1 + M)`; chain
/// `‖DF‖‖Y′‖_α + ‖Y′‖_∞‖D²F‖‖Y‖_α + ½‖D²F‖‖Y‖_α² + ‖DF‖‖R^Y‖_{2α}`.
pub fn compose_norm_bound<D>(f: &SmoothFunction, c: &ControlledPath<D>, m: f64, budget: PairBudget) -> Result<NormBound>
where
    D: GubinelliDerivative<Value = Vector>,
{
    if !(m >= 1.0) {
        return Err(Error::BoundPreconditionViolated(format!("M = {m} must be at least 1")));
    }
    let alpha = c.base.alpha();
    let norms = c.norms(budget);
    if norms.seminorm > m {
        return Err(Error::BoundPreconditionViolated(format!(
            "controlled seminorm {} exceeds M = {m}",
            norms.seminorm
        )));
    }
    if f.order() < 2 {
        return Err(Error::OrderUnavailable { requested: 2, declared: f.order() });
    }
    let [f0, f1, f2] = segment_sup_norms(f, &c.y)?;
    let cb2 = f0 + f1 + f2;
    let t = c.base.grid().horizon();
    let x_alpha = scan_pairs(c.base.path(), alpha, budget).seminorm;
    let closed = 2.0 * time_factor(t, alpha) * (1.0 + m) * m * cb2 * (1.0 + x_alpha).powi(2)
        * (c.y_prime.first().norm() + norms.seminorm);
    let y_alpha = scan_pairs(&c.y, alpha, budget).seminorm;
    let yp_sup = c.y_prime.sup_norm();
    let chain = f1 * norms.y_prime_alpha + yp_sup * f2 * y_alpha + 0.5 * f2 * y_alpha * y_alpha + f1 * norms.remainder_2alpha;
    Ok(NormBound::new(closed, chain))
}

/// `U = Y Z`, `U′ = Y Z′ + Z ⊗ Y′` for a scalar path `a = (Y, Y′)` and a vector path `b = (Z, Z′)`.
pub fn leibniz_product(a: &ControlledVector, b: &ControlledVector) -> Result<ControlledVector> {
    a.check_base(&b.base)?;
    if a.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: a.dim() });
    }
    let d = a.base.dim();
    let k = b.dim();
    let n = a.y.values().len();
    let mut u = Vec::with_capacity(n);
    let mut up = Vec::with_capacity(n);
    for t in 0..n {
        let y = a.y.value(t).as_slice()[0];
        let z = b.y.value(t).as_slice();
        let yp = a.y_prime.value(t);
        let zp = b.y_prime.value(t);
        u.push(Vector::new(z.iter().map(|x| y * x).collect())?);
        let mut m = vec![0.0; k * d];
        for r in 0..k {
            for j in 0..d {
                m[r * d + j] = y * zp.get(r, j) + z[r] * yp.get(0, j);
            }
        }
        up.push(LinMap::new(k, d, m)?);
    }
    ControlledPath::from_parts(a.base.clone(), u, up)
}

/// Bound on `‖Y Z‖_{X;α}`.
///
/// Closed form `(1 + T^α + T^{2α})(1 + ‖X‖_α)(|Y_0| + |Y′_0| + ‖Y‖)(|Z_0| + |Z′_0| + ‖Z‖)`; chain
/// `‖Y‖_α‖Z′‖_∞ + ‖Y‖_∞‖Z′‖_α + ‖Z‖_α‖Y′‖_∞ + ‖Z‖_∞‖Y′‖_α + ‖Y‖_∞‖R^Z‖ + ‖Z‖_∞‖R^Y‖ + ‖Y‖_α‖Z‖_α`.
pub fn leibniz_norm_bound(a: &ControlledVector, b: &ControlledVector, budget: PairBudget) -> Result<NormBound> {
    a.check_base(&b.base)?;
    let alpha = a.base.alpha();
    let t = a.base.grid().horizon();
    let (na, nb) = (a.norms(budget), b.norms(budget));
    let x_alpha = scan_pairs(a.base.path(), alpha, budget).seminorm;
    let closed = time_factor(t, alpha) * (1.0 + x_alpha) * na.full_norm * nb.full_norm;
    let (ya, za) = (scan_pairs(&a.y, alpha, budget).seminorm, scan_pairs(&b.y, alpha, budget).seminorm);
    let (ys, zs) = (a.y.sup_norm(), b.y.sup_norm());
    let chain = ya * b.y_prime.sup_norm()
        + ys * nb.y_prime_alpha
        + za * a.y_prime.sup_norm()
        + zs * na.y_prime_alpha
        + ys * nb.remainder_2alpha
        + zs * na.remainder_2alpha
        + ya * za;
    Ok(NormBound::new(closed, chain))
}
