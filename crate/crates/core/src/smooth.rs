//! Smooth maps `F: ℝⁿ → ℝᵏ` or `F: ℝⁿ → L(ℝᵈ, ℝᵏ)` with analytic derivatives up to order 3.
//!
//! Outputs are handled as flat arrays. For a field codomain with `rows × cols`
//! entries, output index `o = k * cols + j` holds `F_{kj}`. Derivatives are laid
//! out with the output index first: `D¹[o*n + l] = ∂_l F_o`,
//! `D²[(o*n + l)*n + m] = ∂_l ∂_m F_o`, and so on. Sup norms of derivative
//! tensors are Frobenius norms of these arrays.

use crate::error::{Error, Result};
use crate::tensor::{l2, LinMap, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Shape of `F(y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Codomain {
    Vector(usize),
    Field { rows: usize, cols: usize },
}

impl Codomain {
    pub fn flat_len(self) -> usize {
        match self {
            Codomain::Vector(k) => k,
            Codomain::Field { rows, cols } => rows * cols,
        }
    }
}

/// Evaluators for a smooth map with flat outputs.
pub trait FieldModel: Send + Sync {
    fn domain_dim(&self) -> usize;
    fn out_len(&self) -> usize;
    fn order(&self) -> usize;
    fn eval(&self, y: &[f64], out: &mut [f64]);
    /// Order-`m` derivative, `1 ≤ m ≤ order()`, written into `out` of length `out_len * n^m`.
    fn derivative(&self, m: usize, y: &[f64], out: &mut [f64]);
    /// Global sup norms of `D⁰F, …, D³F` when they are known in closed form.
    fn global_bounds(&self) -> Option<[f64; 4]> {
        None
    }
    /// Sup norms of `D⁰F, …, D³F` over the ball `|y − center| ≤ radius`, when known in closed form.
    fn ball_bounds(&self, _center: &[f64], _radius: f64) -> Option<[f64; 4]> {
        self.global_bounds()
    }
}

/// A smooth map with a declared codomain shape.
#[derive(Clone)]
pub struct SmoothFunction {
    model: Arc<dyn FieldModel>,
    codomain: Codomain,
    name: String,
}

impl std::fmt::Debug for SmoothFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothFunction")
            .field("name", &self.name)
            .field("domain_dim", &self.domain_dim())
            .field("codomain", &self.codomain)
            .field("order", &self.order())
            .finish()
    }
}

/// A derivative tensor with its shape `[out..., n, ..., n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiLinear {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl MultiLinear {
    pub fn norm(&self) -> f64 {
        l2(&self.data)
    }
}

/// Probe region for box-relative sup estimates: the Euclidean ball around `center`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeBall {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Per-order sup norms and their sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CbNorm {
    pub per_order: Vec<f64>,
    pub total: f64,
    pub probe: Option<ProbeBall>,
    pub probe_count: usize,
    /// True when the values come from closed-form bounds rather than probing.
    pub exact: bool,
}

impl SmoothFunction {
    pub fn from_model(name: impl Into<String>, codomain: Codomain, model: Arc<dyn FieldModel>) -> Result<Self> {
        if model.out_len() != codomain.flat_len() {
            return Err(Error::DimensionMismatch { expected: codomain.flat_len(), found: model.out_len() });
        }
        if !(1..=3).contains(&model.order()) {
            return Err(Error::InvalidConfig(format!("declared order {} outside 1..=3", model.order())));
        }
        Ok(Self { model, codomain, name: name.into() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn codomain(&self) -> Codomain {
        self.codomain
    }

    pub fn domain_dim(&self) -> usize {
        self.model.domain_dim()
    }

    pub fn order(&self) -> usize {
        self.model.order()
    }

    pub fn model(&self) -> &Arc<dyn FieldModel> {
        &self.model
    }

    /// Global `C³_b`-type bounds, if the function carries them.
    pub fn global_bounds(&self) -> Option<[f64; 4]> {
        self.model.global_bounds()
    }

    pub fn is_bounded(&self) -> bool {
        self.global_bounds().is_some()
    }

    fn check_input(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.domain_dim() {
            return Err(Error::DimensionMismatch { expected: self.domain_dim(), found: y.len() });
        }
        Ok(())
    }

    /// `F(y)` as a flat array.
    pub fn eval_flat(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_input(y)?;
        let mut out = vec![0.0; self.model.out_len()];
        self.model.eval(y, &mut out);
        finite(out, &self.name)
    }

    /// `F(y)` for a vector codomain.
    pub fn eval_vector(&self, y: &Vector) -> Result<Vector> {
        match self.codomain {
            Codomain::Vector(_) => Ok(Vector::from_raw(self.eval_flat(y.as_slice())?)),
            Codomain::Field { .. } => Err(Error::InvalidConfig(format!("'{}' is field-valued", self.name))),
        }
    }

    /// `F(y)` for a field codomain.
    pub fn eval_field(&self, y: &Vector) -> Result<LinMap> {
        match self.codomain {
            Codomain::Field { rows, cols } => Ok(LinMap::from_raw(rows, cols, self.eval_flat(y.as_slice())?)),
            Codomain::Vector(_) => Err(Error::InvalidConfig(format!("'{}' is vector-valued", self.name))),
        }
    }

    /// The order-`m` derivative tensor at `y` (order 0 returns `F(y)` itself).
    pub fn derivative(&self, m: usize, y: &Vector) -> Result<MultiLinear> {
        let data = self.derivative_flat(m, y.as_slice())?;
        let mut shape = match self.codomain {
            Codomain::Vector(k) => vec![k],
            Codomain::Field { rows, cols } => vec![rows, cols],
        };
        shape.extend(std::iter::repeat_n(self.domain_dim(), m));
        Ok(MultiLinear { shape, data })
    }

    pub fn derivative_flat(&self, m: usize, y: &[f64]) -> Result<Vec<f64>> {
        if m == 0 {
            return self.eval_flat(y);
        }
        if m > self.order() {
            return Err(Error::OrderUnavailable { requested: m, declared: self.order() });
        }
        self.check_input(y)?;
        let mut out = vec![0.0; self.model.out_len() * self.domain_dim().pow(m as u32)];
        self.model.derivative(m, y, &mut out);
        finite(out, &self.name)
    }

    /// `c · F`.
    pub fn scaled(&self, c: f64) -> SmoothFunction {
        SmoothFunction {
            model: Arc::new(Scaled { inner: self.model.clone(), c }),
            codomain: self.codomain,
            name: format!("{c}*{}", self.name),
        }
    }

    /// `‖F‖_{C^m_b}`: exact when closed-form bounds exist, otherwise probed over `ball`.
    pub fn cb_norm(&self, m: usize, ball: &ProbeBall, count: usize) -> Result<CbNorm> {
        if m > self.order() {
            return Err(Error::OrderUnavailable { requested: m, declared: self.order() });
        }
        self.check_input(&ball.center)?;
        if let Some(b) = self.model.ball_bounds(&ball.center, ball.radius) {
            let per_order = b[..=m].to_vec();
            let total = per_order.iter().sum();
            let probe = if self.global_bounds().is_some() { None } else { Some(ball.clone()) };
            return Ok(CbNorm { per_order, total, probe, probe_count: 0, exact: true });
        }
        let probes = probe_points(&ball.center, ball.radius, count);
        let mut per_order = vec![0.0_f64; m + 1];
        for p in &probes {
            for (k, slot) in per_order.iter_mut().enumerate() {
                *slot = slot.max(l2(&self.derivative_flat(k, p)?));
            }
        }
        let total = per_order.iter().sum();
        Ok(CbNorm { per_order, total, probe: Some(ball.clone()), probe_count: probes.len(), exact: false })
    }

    /// Sup norms of `D⁰F..D^mF` over a ball: closed form if available, else probed.
    pub fn sup_norms_on(&self, m: usize, ball: &ProbeBall, count: usize) -> Result<Vec<f64>> {
        Ok(self.cb_norm(m, ball, count)?.per_order)
    }

    /// Central finite differences of the order-`(order−1)` evaluator against the supplied
    /// order-`order` one; returns `max ‖fd − supplied‖ / max(‖fd‖, 1)` over the probes.
    pub fn fd_check(&self, order: usize, probes: &[Vector], h: f64) -> Result<f64> {
        if order == 0 || order > self.order() {
            return Err(Error::OrderUnavailable { requested: order, declared: self.order() });
        }
        let n = self.domain_dim();
        let mut worst = 0.0_f64;
        for y in probes {
            self.check_input(y.as_slice())?;
            let supplied = self.derivative_flat(order, y.as_slice())?;
            let lower_len = supplied.len() / n;
            let mut fd = vec![0.0; supplied.len()];
            for l in 0..n {
                let mut yp = y.as_slice().to_vec();
                let mut ym = yp.clone();
                yp[l] += h;
                ym[l] -= h;
                let fp = self.derivative_flat(order - 1, &yp)?;
                let fm = self.derivative_flat(order - 1, &ym)?;
                for q in 0..lower_len {
                    fd[q * n + l] = (fp[q] - fm[q]) / (2.0 * h);
                }
            }
            let err = fd.iter().zip(&supplied).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            worst = worst.max(err / l2(&fd).max(1.0));
        }
        Ok(worst)
    }
}

fn finite(out: Vec<f64>, name: &str) -> Result<Vec<f64>> {
    if out.iter().all(|x| x.is_finite()) {
        Ok(out)
    } else {
        Err(Error::NonFiniteOutput(format!("evaluating '{name}'")))
    }
}

/// Deterministic probes: Halton directions in the unit ball, scaled along the radius
/// ladder `2^{k/4}` (all rungs up to `radius`), plus the center itself. A larger ball
/// visits a superset of the points of a smaller one with the same center and count.
pub fn probe_points(center: &[f64], radius: f64, count: usize) -> Vec<Vec<f64>> {
    let n = center.len();
    let dirs: Vec<Vec<f64>> = (1..=count)
        .map(|i| {
            let mut u: Vec<f64> = (0..n).map(|k| 2.0 * halton(i, PRIMES[k % PRIMES.len()]) - 1.0).collect();
            let r = l2(&u);
            if r > 1.0 {
                u.iter_mut().for_each(|x| *x /= r);
            }
            u
        })
        .collect();
    let mut rungs = Vec::new();
    if radius > 0.0 {
        let top = (4.0 * radius.log2()).floor() as i32;
        for k in (top - 40..=top).rev() {
            rungs.push(2f64.powf(k as f64 / 4.0));
        }
    }
    let mut out = vec![center.to_vec()];
    for r in rungs {
        for u in &dirs {
            out.push(center.iter().zip(u).map(|(c, x)| c + r * x).collect());
        }
    }
    out
}

const PRIMES: [usize; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn halton(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

struct Scaled {
    inner: Arc<dyn FieldModel>,
    c: f64,
}

impl FieldModel for Scaled {
    fn domain_dim(&self) -> usize {
        self.inner.domain_dim()
    }
    fn out_len(&self) -> usize {
        self.inner.out_len()
    }
    fn order(&self) -> usize {
        self.inner.order()
    }
    fn eval(&self, y: &[f64], out: &mut [f64]) {
        self.inner.eval(y, out);
        out.iter_mut().for_each(|x| *x *= self.c);
    }
    fn derivative(&self, m: usize, y: &[f64], out: &mut [f64]) {
        self.inner.derivative(m, y, out);
        out.iter_mut().for_each(|x| *x *= self.c);
    }
    fn global_bounds(&self) -> Option<[f64; 4]> {
        self.inner.global_bounds().map(|b| b.map(|x| x * self.c.abs()))
    }
    fn ball_bounds(&self, center: &[f64], radius: f64) -> Option<[f64; 4]> {
        self.inner.ball_bounds(center, radius).map(|b| b.map(|x| x * self.c.abs()))
    }
}

/// `F(y) = A y + b` (flat output).
pub struct Affine {
    a: LinMap,
    b: Vec<f64>,
}

impl Affine {
    pub fn new(a: LinMap, b: Vec<f64>) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch { expected: a.rows(), found: b.len() });
        }
        Ok(Self { a, b })
    }
}

impl FieldModel for Affine {
    fn domain_dim(&self) -> usize {
        self.a.cols()
    }
    fn out_len(&self) -> usize {
        self.a.rows()
    }
    fn order(&self) -> usize {
        3
    }
    fn eval(&self, y: &[f64], out: &mut [f64]) {
        let ay = crate::tensor::apply_linmap_raw(&self.a, y);
        for ((o, a), b) in out.iter_mut().zip(ay).zip(&self.b) {
            *o = a + b;
        }
    }
    fn derivative(&self, m: usize, _y: &[f64], out: &mut [f64]) {
        if m == 1 {
            out.copy_from_slice(crate::tensor::Tensorial::data(&self.a));
        } else {
            out.iter_mut().for_each(|x| *x = 0.0);
        }
    }
    fn global_bounds(&self) -> Option<[f64; 4]> {
        let a_zero = crate::tensor::Tensorial::data(&self.a).iter().all(|&x| x == 0.0);
        a_zero.then(|| [l2(&self.b), 0.0, 0.0, 0.0])
    }
    fn ball_bounds(&self, center: &[f64], radius: f64) -> Option<[f64; 4]> {
        let mut fc = vec![0.0; self.b.len()];
        self.eval(center, &mut fc);
        let op = self.a.operator_norm();
        let a_f = crate::tensor::Tensorial::norm(&self.a);
        let exact_zero = l2(&fc) == 0.0;
        // |A(c + r u) + b| ≤ |F(c)| + ‖A‖_op r, attained when F(c) = 0.
        let sup0 = if exact_zero { op * radius } else { l2(&fc) + op * radius };
        Some([sup0, a_f, 0.0, 0.0])
    }
}

/// One-dimensional profile used by ridge functions.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    Sin,
    Cos,
    Tanh,
    /// `z ↦ z²` (unbounded; for local tests).
    Square,
    /// `p(z) · exp(−1/(1 − z²))` on `|z| < 1`, zero outside; `p` given by ascending coefficients.
    PolyBump(Vec<f64>),
}

impl Profile {
    pub fn bump() -> Self {
        Profile::PolyBump(vec![1.0])
    }

    /// `σ^{(k)}(z)` for `k = 0..=3`.
    pub fn derivs(&self, z: f64) -> [f64; 4] {
        match self {
            Profile::Sin => {
                let (s, c) = z.sin_cos();
                [s, c, -s, -c]
            }
            Profile::Cos => {
                let (s, c) = z.sin_cos();
                [c, -s, -c, s]
            }
            Profile::Tanh => {
                let t = z.tanh();
                let s2 = 1.0 - t * t;
                [t, s2, -2.0 * t * s2, s2 * (6.0 * t * t - 2.0)]
            }
            Profile::Square => [z * z, 2.0 * z, 2.0, 0.0],
            Profile::PolyBump(p) => {
                let b = bump_derivs(z);
                if b[0] == 0.0 {
                    return [0.0; 4];
                }
                let q = poly_derivs(p, z);
                [
                    q[0] * b[0],
                    q[1] * b[0] + q[0] * b[1],
                    q[2] * b[0] + 2.0 * q[1] * b[1] + q[0] * b[2],
                    q[3] * b[0] + 3.0 * q[2] * b[1] + 3.0 * q[1] * b[2] + q[0] * b[3],
                ]
            }
        }
    }

    /// `sup |σ^{(k)}|` over ℝ, or `None` when unbounded.
    pub fn sup_bounds(&self) -> Option<[f64; 4]> {
        match self {
            Profile::Sin | Profile::Cos => Some([1.0; 4]),
            Profile::Tanh => Some([1.0, 1.0, 4.0 / (3.0 * 3f64.sqrt()), 2.0]),
            Profile::Square => None,
            Profile::PolyBump(_) => Some(scan_bounds(self)),
        }
    }
}

fn bump_derivs(z: f64) -> [f64; 4] {
    let w = 1.0 - z * z;
    if w <= 0.0 {
        return [0.0; 4];
    }
    let s = (-1.0 / w).exp();
    if s == 0.0 {
        return [0.0; 4];
    }
    let g1 = -2.0 * z / (w * w);
    let g2 = -(2.0 + 6.0 * z * z) / (w * w * w);
    let g3 = -24.0 * z * (1.0 + z * z) / (w * w * w * w);
    [s, g1 * s, (g2 + g1 * g1) * s, (g3 + 3.0 * g1 * g2 + g1 * g1 * g1) * s]
}

fn poly_derivs(p: &[f64], z: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = p
            .iter()
            .enumerate()
            .skip(k)
            .map(|(e, &c)| c * ((e - k + 1)..=e).map(|x| x as f64).product::<f64>() * z.powi((e - k) as i32))
            .sum();
    }
    out
}

/// Dense scan of `|z| < 1` with a 1e-3 relative safety margin.
fn scan_bounds(p: &Profile) -> [f64; 4] {
    const SAMPLES: usize = 200_000;
    let mut best = [0.0_f64; 4];
    for i in 0..=SAMPLES {
        let z = -1.0 + 2.0 * i as f64 / SAMPLES as f64;
        let d = p.derivs(z);
        for k in 0..4 {
            best[k] = best[k].max(d[k].abs());
        }
    }
    best.map(|x| x * (1.0 + 1e-3))
}

/// `F_o(y) = c_o σ(a_o · y + b_o)` for each flat output `o`.
pub struct Ridge {
    n: usize,
    profile: Profile,
    coef: Vec<f64>,
    dirs: Vec<Vec<f64>>,
    shift: Vec<f64>,
    profile_bounds: Option<[f64; 4]>,
}

impl Ridge {
    pub fn new(n: usize, profile: Profile, coef: Vec<f64>, dirs: Vec<Vec<f64>>, shift: Vec<f64>) -> Result<Self> {
        if dirs.len() != coef.len() || shift.len() != coef.len() {
            return Err(Error::DimensionMismatch { expected: coef.len(), found: dirs.len().min(shift.len()) });
        }
        if let Some(bad) = dirs.iter().find(|a| a.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
        }
        let profile_bounds = profile.sup_bounds();
        Ok(Self { n, profile, coef, dirs, shift, profile_bounds })
    }

    fn z(&self, o: usize, y: &[f64]) -> f64 {
        self.dirs[o].iter().zip(y).map(|(a, x)| a * x).sum::<f64>() + self.shift[o]
    }
}

impl FieldModel for Ridge {
    fn domain_dim(&self) -> usize {
        self.n
    }
    fn out_len(&self) -> usize {
        self.coef.len()
    }
    fn order(&self) -> usize {
        3
    }
    fn eval(&self, y: &[f64], out: &mut [f64]) {
        for (o, slot) in out.iter_mut().enumerate() {
            *slot = if self.coef[o] == 0.0 { 0.0 } else { self.coef[o] * self.profile.derivs(self.z(o, y))[0] };
        }
    }
    fn derivative(&self, m: usize, y: &[f64], out: &mut [f64]) {
        let n = self.n;
        let block = n.pow(m as u32);
        for o in 0..self.coef.len() {
            let dst = &mut out[o * block..(o + 1) * block];
            if self.coef[o] == 0.0 {
                dst.iter_mut().for_each(|x| *x = 0.0);
                continue;
            }
            let s = self.coef[o] * self.profile.derivs(self.z(o, y))[m];
            let a = &self.dirs[o];
            for (idx, slot) in dst.iter_mut().enumerate() {
                let mut prod = s;
                let mut rest = idx;
                for _ in 0..m {
                    prod *= a[rest % n];
                    rest /= n;
                }
                *slot = prod;
            }
        }
    }
    fn global_bounds(&self) -> Option<[f64; 4]> {
        let pb = self.profile_bounds?;
        let mut out = [0.0; 4];
        for (m, slot) in out.iter_mut().enumerate() {
            let s: f64 = self.coef.iter().zip(&self.dirs).map(|(c, a)| (c * l2(a).powi(m as i32)).powi(2)).sum();
            *slot = pb[m] * s.sqrt();
        }
        Some(out)
    }
}

type Evaluator = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// User-supplied closures.
pub struct Custom {
    n: usize,
    out: usize,
    f: Evaluator,
    derivs: Vec<Evaluator>,
    bounds: Option<[f64; 4]>,
}

impl Custom {
    /// `derivs[m-1]` evaluates `D^m F`; the declared order is `derivs.len()`.
    pub fn new(n: usize, out: usize, f: Evaluator, derivs: Vec<Evaluator>, bounds: Option<[f64; 4]>) -> Self {
        Self { n, out, f, derivs, bounds }
    }
}

impl FieldModel for Custom {
    fn domain_dim(&self) -> usize {
        self.n
    }
    fn out_len(&self) -> usize {
        self.out
    }
    fn order(&self) -> usize {
        self.derivs.len()
    }
    fn eval(&self, y: &[f64], out: &mut [f64]) {
        (self.f)(y, out)
    }
    fn derivative(&self, m: usize, y: &[f64], out: &mut [f64]) {
        (self.derivs[m - 1])(y, out)
    }
    fn global_bounds(&self) -> Option<[f64; 4]> {
        self.bounds
    }
}

/// Built-in catalog.
impl SmoothFunction {
    pub fn affine(a: LinMap, b: Vec<f64>) -> Result<Self> {
        let codomain = Codomain::Vector(a.rows());
        Self::from_model("affine", codomain, Arc::new(Affine::new(a, b)?))
    }

    pub fn linear(a: LinMap) -> Result<Self> {
        let rows = a.rows();
        Self::affine(a, vec![0.0; rows]).map(|f| f.renamed("linear"))
    }

    /// Field `W → L(V, W)` given by `F(y)_{kj} = Σ_l A[(k*cols + j)][l] y_l`.
    pub fn linear_field(a: LinMap, rows: usize, cols: usize) -> Result<Self> {
        let b = vec![0.0; a.rows()];
        Self::from_model("linear_field", Codomain::Field { rows, cols }, Arc::new(Affine::new(a, b)?))
    }

    pub fn constant(value: Vec<f64>, n: usize, codomain: Codomain) -> Result<Self> {
        let a = LinMap::zeros(value.len(), n);
        Self::from_model("const", codomain, Arc::new(Affine::new(a, value)?))
    }

    /// Scalar `y ↦ σ(y)` on ℝ.
    pub fn scalar(profile: Profile) -> Self {
        let name = profile_name(&profile);
        let model = Ridge::new(1, profile, vec![1.0], vec![vec![1.0]], vec![0.0]).expect("valid ridge");
        Self::from_model(name, Codomain::Vector(1), Arc::new(model)).expect("valid ridge")
    }

    /// Scalar profile as an RDE field `ℝ → L(ℝ, ℝ)`.
    pub fn scalar_field(profile: Profile) -> Self {
        let name = profile_name(&profile);
        let model = Ridge::new(1, profile, vec![1.0], vec![vec![1.0]], vec![0.0]).expect("valid ridge");
        Self::from_model(name, Codomain::Field { rows: 1, cols: 1 }, Arc::new(model)).expect("valid ridge")
    }

    /// `F(y)_{kk} = σ(y_k)`, zero off the diagonal: `ℝⁿ → L(ℝⁿ, ℝⁿ)`.
    pub fn diagonal_field(profile: Profile, n: usize) -> Self {
        let name = format!("diag_{}", profile_name(&profile));
        let mut coef = vec![0.0; n * n];
        let mut dirs = vec![vec![0.0; n]; n * n];
        for k in 0..n {
            coef[k * n + k] = 1.0;
            dirs[k * n + k][k] = 1.0;
        }
        let model = Ridge::new(n, profile, coef, dirs, vec![0.0; n * n]).expect("valid ridge");
        Self::from_model(name, Codomain::Field { rows: n, cols: n }, Arc::new(model)).expect("valid ridge")
    }

    /// Scalar output `ℝ → L(ℝᵈ, ℝ)` with every entry equal to `σ(y)`.
    pub fn shared_field(profile: Profile, d: usize) -> Self {
        let name = format!("shared_{}", profile_name(&profile));
        let model = Ridge::new(1, profile, vec![1.0; d], vec![vec![1.0]; d], vec![0.0; d]).expect("valid ridge");
        Self::from_model(name, Codomain::Field { rows: 1, cols: d }, Arc::new(model)).expect("valid ridge")
    }

    /// Entrywise `tanh` ridges with seeded random directions: `ℝⁿ → L(ℝᵈ, ℝⁿ)`, bounded with all derivatives.
    pub fn tanh_matrix(n: usize, d: usize, seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let m = n * d;
        let coef = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let dirs = (0..m).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let shift = (0..m).map(|_| rng.random_range(-0.5..0.5)).collect();
        let model = Ridge::new(n, Profile::Tanh, coef, dirs, shift).expect("valid ridge");
        Self::from_model(format!("tanh_matrix:seed={seed}"), Codomain::Field { rows: n, cols: d }, Arc::new(model))
            .expect("valid ridge")
    }

    /// Random entrywise ridges `F_{kj}(y) = c_{kj} σ(a_{kj} · y + b_{kj})`: `ℝⁿ → L(ℝ^cols, ℝ^rows)`.
    pub fn ridge_field(profile: Profile, rows: usize, cols: usize, n: usize, seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let m = rows * cols;
        let coef = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let dirs = (0..m).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let shift = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let name = format!("ridge_{}:seed={seed}", profile_name(&profile));
        let model = Ridge::new(n, profile, coef, dirs, shift).expect("valid ridge");
        Self::from_model(name, Codomain::Field { rows, cols }, Arc::new(model)).expect("valid ridge")
    }

    /// Vector-valued random ridge map `ℝⁿ → ℝᵏ`.
    pub fn ridge_vector(profile: Profile, n: usize, k: usize, seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let coef = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
        let dirs = (0..k).map(|_| (0..n).map(|_| rng.random_range(-1.5..1.5)).collect()).collect();
        let shift = (0..k).map(|_| rng.random_range(-PI..PI)).collect();
        let name = format!("ridge_vec_{}:seed={seed}", profile_name(&profile));
        let model = Ridge::new(n, profile, coef, dirs, shift).expect("valid ridge");
        Self::from_model(name, Codomain::Vector(k), Arc::new(model)).expect("valid ridge")
    }

    /// Rotation field for a scalar driver: `F(y) = R y` as an element of `L(ℝ, ℝ²)`, `R = [[0, −w], [w, 0]]`.
    pub fn rotation(w: f64) -> Self {
        let a = LinMap::from_raw(2, 2, vec![0.0, -w, w, 0.0]);
        let model = Affine::new(a, vec![0.0, 0.0]).expect("valid affine");
        Self::from_model(format!("rotation:w={w}"), Codomain::Field { rows: 2, cols: 1 }, Arc::new(model))
            .expect("valid affine")
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// The same map with its codomain reinterpreted (flat lengths must agree).
    pub fn with_codomain(&self, codomain: Codomain) -> Result<Self> {
        Self::from_model(self.name.clone(), codomain, self.model.clone())
    }
}

fn profile_name(p: &Profile) -> String {
    match p {
        Profile::Sin => "sin".into(),
        Profile::Cos => "cos".into(),
        Profile::Tanh => "tanh".into(),
        Profile::Square => "square".into(),
        Profile::PolyBump(c) if c == &[1.0] => "bump".into(),
        Profile::PolyBump(_) => "poly_bump".into(),
    }
}
