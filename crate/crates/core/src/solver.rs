//! Picard fixed-point solver for `dY = F(Y) d𝕏` on windows of the driver grid, with step
//! halving, contraction monitoring and continuation over `[0, T]`.

use crate::controlled::{ControlledPath, ControlledVector};
use crate::error::{Error, Result};
use crate::grid::{GridPath, PairBudget};
use crate::rough_path::ReducedRoughPath;
use crate::sewing::{integrate_values, sewing_constant};
use crate::smooth::{Codomain, ProbeBall, SmoothFunction};
use crate::tensor::{apply_linmap_raw, LinMap, Vector};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

const ROUGH_FLOOR: f64 = 1.0 / 3.0;
const WORKING_OFFSET: f64 = 0.05;
const NOISE_ULPS: f64 = 64.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StartGuess {
    /// `P_t = ξ + F(ξ) X_{0,t}`, `P′ = F(ξ)`.
    #[default]
    Canonical,
    /// Canonical center plus the bump `½ amplitude τ^{2α} (t/τ)²` in every coordinate; each
    /// coordinate moves at most `amplitude` away from the center in the controlled seminorm.
    Perturbed { amplitude: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Working exponent; `None` picks `β − 0.05`, or the midpoint of `(1/3, β)` when that is too low.
    pub alpha: Option<f64>,
    /// First window length; `None` means `min(1, T)`.
    pub tau_init: Option<f64>,
    pub tau_min: f64,
    pub contraction_target: f64,
    pub max_picard_iters: usize,
    pub fixed_point_tol: f64,
    pub ball_radius: f64,
    pub budget: PairBudget,
    pub start: StartGuess,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            alpha: None,
            tau_init: None,
            tau_min: 1e-9,
            contraction_target: 0.5,
            max_picard_iters: 100,
            fixed_point_tol: 1e-12,
            ball_radius: 1.0,
            budget: PairBudget::Auto,
            start: StartGuess::Canonical,
        }
    }
}

impl SolverConfig {
    /// Working exponent for a driver of regularity `beta`.
    pub fn working_alpha(&self, beta: f64) -> Result<f64> {
        match self.alpha {
            Some(a) if a > ROUGH_FLOOR && a < beta => Ok(a),
            Some(a) => Err(Error::InvalidExponent { value: a, range: "(1/3, β)" }),
            None if beta - WORKING_OFFSET > ROUGH_FLOOR => Ok(beta - WORKING_OFFSET),
            None => Ok(0.5 * (ROUGH_FLOOR + beta)),
        }
    }

    pub fn initial_tau(&self, horizon: f64) -> f64 {
        self.tau_init.unwrap_or(horizon.min(1.0))
    }

    pub fn validate(&self, horizon: f64) -> Result<()> {
        let tau = self.initial_tau(horizon);
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.tau_min > 0.0 && self.tau_min <= tau && tau <= horizon * (1.0 + 1e-12)) {
            return bad("solver needs 0 < tau_min ≤ tau_init ≤ T");
        }
        if !(self.contraction_target > 0.0 && self.contraction_target < 1.0) {
            return bad("contraction_target must lie in (0, 1)");
        }
        if self.max_picard_iters == 0 || !(self.fixed_point_tol > 0.0) || !(self.ball_radius > 0.0) {
            return bad("max_picard_iters, fixed_point_tol and ball_radius must be positive");
        }
        if let StartGuess::Perturbed { amplitude } = self.start {
            if !amplitude.is_finite() {
                return bad("start amplitude must be finite");
            }
        }
        Ok(())
    }
}

/// One accepted window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub start: usize,
    pub end: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub picard_iterations: usize,
    /// Last recorded `d_k / d_{k−1}`; 0 when the first application was already a fixed point.
    pub final_contraction_ratio: f64,
    pub tau_used: f64,
    pub halvings: usize,
    pub ratios: Vec<f64>,
    /// `‖Y − P, Y′ − P′‖_{X;α}` of the accepted fixed point.
    pub ball_seminorm: f64,
    /// False only for single-step windows accepted outside the ball.
    pub ball_ok: bool,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    /// `(Y, F(Y))` on the full driver grid.
    pub solution: ControlledVector,
    pub xi: Vector,
    pub steps: Vec<StepLog>,
    pub residual_norm: f64,
    /// `F` has global `C³_b` bounds.
    pub global: bool,
    pub alpha: f64,
    pub beta: f64,
    /// Window length from the invariance estimate; reported, not used to drive the step.
    pub theory_tau: f64,
}

/// Serializable part of a [`SolveReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub schema: String,
    pub function: String,
    pub xi: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub global: bool,
    pub theory_tau: f64,
    pub residual_norm: f64,
    pub final_value: Vec<f64>,
    pub steps: Vec<StepLog>,
}

pub const SOLVE_SCHEMA: &str = "rrpath.solve_report/1";

impl SolveReport {
    pub fn summary(&self, f: &SmoothFunction) -> SolveSummary {
        SolveSummary {
            schema: SOLVE_SCHEMA.to_string(),
            function: f.name().to_string(),
            xi: self.xi.as_slice().to_vec(),
            alpha: self.alpha,
            beta: self.beta,
            global: self.global,
            theory_tau: self.theory_tau,
            residual_norm: self.residual_norm,
            final_value: self.solution.y().last().as_slice().to_vec(),
            steps: self.steps.clone(),
        }
    }

    pub fn max_final_ratio(&self) -> f64 {
        self.steps.iter().map(|s| s.final_contraction_ratio).fold(0.0, f64::max)
    }
}

fn check_field(xi: &Vector, f: &SmoothFunction, d: usize) -> Result<()> {
    let n = xi.dim();
    if f.domain_dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: f.domain_dim() });
    }
    match f.codomain() {
        Codomain::Field { rows, cols } if rows == n && cols == d => Ok(()),
        Codomain::Field { rows, .. } if rows != n => Err(Error::DimensionMismatch { expected: n, found: rows }),
        Codomain::Field { cols, .. } => Err(Error::DimensionMismatch { expected: d, found: cols }),
        Codomain::Vector(_) => Err(Error::InvalidConfig(format!("'{}' must be field-valued", f.name()))),
    }
}

/// `P_t = ξ + F(ξ) X_{0,t}`, `P′ ≡ F(ξ)` on the grid of `r`.
pub fn canonical_center(xi: &Vector, f: &SmoothFunction, r: &Arc<ReducedRoughPath>) -> Result<ControlledVector> {
    check_field(xi, f, r.dim())?;
    let fx = f.eval_field(xi)?;
    let y: Vec<Vector> = (0..r.grid().points())
        .map(|t| {
            let v = apply_linmap_raw(&fx, &r.dx(0, t));
            Vector::new(xi.as_slice().iter().zip(v).map(|(a, b)| a + b).collect())
        })
        .collect::<Result<_>>()?;
    ControlledPath::from_parts(r.clone(), y, vec![fx; r.grid().points()])
}

fn perturbed_center(center: &ControlledVector, amplitude: f64, alpha: f64) -> Result<ControlledVector> {
    let grid = center.base().grid();
    let len = grid.horizon();
    let c = 0.5 * amplitude * len.powf(2.0 * alpha);
    let y = center
        .y()
        .values()
        .iter()
        .zip(grid.times())
        .map(|(p, &t)| {
            let bump = c * (t / len).powi(2);
            Vector::new(p.as_slice().iter().map(|v| v + bump).collect())
        })
        .collect::<Result<_>>()?;
    ControlledPath::from_parts(center.base().clone(), y, center.y_prime().values().to_vec())
}

/// `(Y, Y′) ↦ (ξ + ∫ F(Y) d𝕏, F(Y))` with integrand derivative `DF(Y) Y′`.
pub fn picard_map(y: &ControlledVector, f: &SmoothFunction, xi: &Vector) -> Result<ControlledVector> {
    let base = y.base();
    check_field(xi, f, base.dim())?;
    let c = y.compose_integrand(f)?;
    let integral = integrate_values(&c, base)?;
    let values = integral
        .values()
        .iter()
        .map(|v| Vector::new(v.as_slice().iter().zip(xi.as_slice()).map(|(a, b)| a + b).collect()))
        .collect::<Result<_>>()?;
    ControlledPath::new(base.clone(), GridPath::new(base.grid_arc().clone(), values)?, c.y().clone())
}

struct Attempt {
    solution: ControlledVector,
    iterations: usize,
    ratios: Vec<f64>,
    converged: bool,
    contracting: bool,
    ball_seminorm: f64,
}

fn scale_of(y: &ControlledVector) -> f64 {
    1f64.max(y.y().sup_norm()).max(y.y_prime().sup_norm())
}

/// With `enforce_contraction` off (single-step windows) ratios are recorded but never abort.
fn iterate(
    xi: &Vector,
    f: &SmoothFunction,
    base: &Arc<ReducedRoughPath>,
    cfg: &SolverConfig,
    alpha: f64,
    rel_tol: f64,
    enforce_contraction: bool,
) -> Result<Attempt> {
    let center = canonical_center(xi, f, base)?;
    let mut cur = match cfg.start {
        StartGuess::Canonical => center.clone(),
        StartGuess::Perturbed { amplitude } => perturbed_center(&center, amplitude, alpha)?,
    };
    let mut ratios = Vec::new();
    let mut prev_d = f64::INFINITY;
    let mut converged = false;
    let mut contracting = true;
    let mut iterations = 0;
    while iterations < cfg.max_picard_iters {
        let next = picard_map(&cur, f, xi)?;
        iterations += 1;
        let d = next.sup_distance(&cur)?;
        let scale = scale_of(&next);
        let noise = NOISE_ULPS * f64::EPSILON * scale;
        if prev_d.is_finite() && prev_d > noise {
            let ratio = d / prev_d;
            ratios.push(ratio);
            if enforce_contraction && ratio > cfg.contraction_target && d > noise {
                contracting = false;
                cur = next;
                break;
            }
        }
        cur = next;
        if d <= (rel_tol * scale).max(noise) {
            converged = true;
            break;
        }
        prev_d = d;
    }
    let diff = cur.difference(&center)?;
    let ball_seminorm = diff.norms_at(alpha, cfg.budget).seminorm;
    Ok(Attempt { solution: cur, iterations, ratios, converged, contracting, ball_seminorm })
}

fn window_end(r: &ReducedRoughPath, start: usize, tau: f64) -> usize {
    let times = r.grid().times();
    let limit = times[start] + tau * (1.0 + 1e-12);
    let end = times.partition_point(|&t| t <= limit) - 1;
    end.max(start + 1).min(times.len() - 1)
}

struct Window {
    log: StepLog,
    values: Vec<Vector>,
}

/// Solve on the window starting at grid index `start`, halving `tau` until the fixed point
/// contracts and stays in the ball.
pub fn solve_local(
    xi: &Vector,
    f: &SmoothFunction,
    r: &ReducedRoughPath,
    start: usize,
    tau: f64,
    cfg: &SolverConfig,
) -> Result<(StepLog, Vec<Vector>)> {
    let alpha = cfg.working_alpha(r.alpha())?;
    let w = solve_window(xi, f, r, start, tau, cfg, alpha)?;
    Ok((w.log, w.values))
}

fn solve_window(xi: &Vector, f: &SmoothFunction, r: &ReducedRoughPath, start: usize, tau: f64, cfg: &SolverConfig, alpha: f64) -> Result<Window> {
    let horizon = r.grid().horizon();
    let t_start = r.grid().t(start);
    let mut tau = tau;
    let mut halvings = 0;
    loop {
        let end = window_end(r, start, tau);
        let single = end == start + 1;
        let base = Arc::new(r.restrict(start, end)?);
        let len = r.grid().t(end) - t_start;
        let rel_tol = cfg.fixed_point_tol * len / horizon;
        let accepted = match iterate(xi, f, &base, cfg, alpha, rel_tol, !single) {
            Ok(a) if a.converged && a.contracting && (single || a.ball_seminorm <= cfg.ball_radius) => Some(a),
            Ok(a) if single => {
                if !a.converged {
                    return Err(Error::MaxItersExceeded(cfg.max_picard_iters));
                }
                Some(a)
            }
            Ok(_) => None,
            Err(e) if e.is_numerical() && !single => None,
            Err(e) => return Err(e),
        };
        if let Some(a) = accepted {
            let log = StepLog {
                start,
                end,
                t_start,
                t_end: r.grid().t(end),
                picard_iterations: a.iterations,
                final_contraction_ratio: a.ratios.last().copied().unwrap_or(0.0),
                tau_used: tau,
                halvings,
                ratios: a.ratios,
                ball_seminorm: a.ball_seminorm,
                ball_ok: a.ball_seminorm <= cfg.ball_radius,
            };
            return Ok(Window { log, values: a.solution.y().values().to_vec() });
        }
        tau *= 0.5;
        halvings += 1;
        if tau < cfg.tau_min {
            return Err(Error::StepTooSmall { t_start, tau });
        }
    }
}

/// Window length at which the invariance estimate `C τ^{β−α} ≤ ½` holds, with `C` assembled
/// from `‖F‖_{C²_b}`, `M = ‖F‖_∞ + 1`, `‖X‖_β`, `‖𝕊‖_{2β}` and the sewing constant.
pub fn theory_tau(xi: &Vector, f: &SmoothFunction, r: &ReducedRoughPath, alpha: f64, budget: PairBudget) -> Result<f64> {
    let beta = r.alpha();
    let b = match f.global_bounds() {
        Some(b) => vec![b[0], b[1], b[2]],
        None => f.sup_norms_on(2.min(f.order()), &ProbeBall { center: xi.as_slice().to_vec(), radius: 2.0 }, 64)?,
    };
    let cf2: f64 = b.iter().sum();
    let m = b[0] + 1.0;
    let n = r.norms(budget);
    let horizon = r.grid().horizon();
    let c = sewing_constant(alpha) * m * cf2.max(f64::MIN_POSITIVE) * (1.0 + n.x_alpha + n.s_2alpha).powi(2) * horizon.max(1.0).powf(2.0 * alpha);
    Ok(horizon.min((0.5 / c).powf(1.0 / (beta - alpha))))
}

/// Solve `Y_t = ξ + ∫₀ᵗ F(Y) d𝕏` on the whole grid of `r`.
pub fn solve_global(xi: &Vector, f: &SmoothFunction, r: &Arc<ReducedRoughPath>, cfg: &SolverConfig) -> Result<SolveReport> {
    check_field(xi, f, r.dim())?;
    let horizon = r.grid().horizon();
    cfg.validate(horizon)?;
    let beta = r.alpha();
    let alpha = cfg.working_alpha(beta)?;
    let n = r.grid().steps();
    let mut values: Vec<Vector> = Vec::with_capacity(n + 1);
    values.push(xi.clone());
    let mut steps = Vec::new();
    let mut tau = cfg.initial_tau(horizon);
    let mut start = 0;
    while start < n {
        let xi_w = values[start].clone();
        let w = solve_window(&xi_w, f, r, start, tau, cfg, alpha).map_err(|e| Error::Segment {
            segment: steps.len(),
            t_start: r.grid().t(start),
            source: Box::new(e),
        })?;
        tau = w.log.tau_used;
        values.extend(w.values.into_iter().skip(1));
        start = w.log.end;
        steps.push(w.log);
    }
    let yp = values.iter().map(|y| f.eval_field(y)).collect::<Result<Vec<LinMap>>>()?;
    let solution = ControlledPath::from_parts(r.clone(), values, yp)?;
    let verification = verify_solution(&solution, f, xi, cfg.budget)?;
    Ok(SolveReport {
        solution,
        xi: xi.clone(),
        steps,
        residual_norm: verification.residual,
        global: f.global_bounds().is_some(),
        alpha,
        beta,
        theory_tau: theory_tau(xi, f, r, alpha, cfg.budget)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    /// `sup_t |Y_t − ξ − ∫₀ᵗ F(Y) d𝕏|`.
    pub residual: f64,
    /// Measured `‖R^Y‖_{2β}` at the driver exponent.
    pub remainder_2beta: f64,
}

pub fn verify_solution(solution: &ControlledVector, f: &SmoothFunction, xi: &Vector, budget: PairBudget) -> Result<Verification> {
    let base = solution.base();
    let c = solution.compose_integrand(f)?;
    let integral = integrate_values(&c, base)?;
    let residual = solution
        .y()
        .values()
        .iter()
        .zip(integral.values())
        .map(|(y, i)| y.as_slice().iter().zip(xi.as_slice()).zip(i.as_slice()).map(|((y, x), i)| (y - x - i).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    Ok(Verification { residual, remainder_2beta: solution.remainder_seminorm(2.0 * base.alpha(), budget) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::smooth::Profile;

    fn line(n: usize, horizon: f64) -> Arc<ReducedRoughPath> {
        let g = Arc::new(Grid::uniform(n, horizon).unwrap());
        let x = GridPath::from_fn(g, |t| Vector::new(vec![t]).unwrap()).unwrap();
        Arc::new(ReducedRoughPath::geometric_lift(x, 0.5).unwrap())
    }

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    fn identity_field() -> SmoothFunction {
        SmoothFunction::linear_field(LinMap::identity(1), 1, 1).unwrap()
    }

    #[test]
    fn working_alpha_rules() {
        let cfg = SolverConfig::default();
        assert!((cfg.working_alpha(0.5).unwrap() - 0.45).abs() < 1e-15);
        assert!((cfg.working_alpha(0.36).unwrap() - (1.0 / 3.0 + 0.36) / 2.0).abs() < 1e-15);
        let bad = SolverConfig { alpha: Some(0.5), ..cfg };
        assert!(matches!(bad.working_alpha(0.5), Err(Error::InvalidExponent { .. })));
        let bad = SolverConfig { contraction_target: 1.0, ..cfg };
        assert!(bad.validate(1.0).is_err());
    }

    #[test]
    fn center_examples() {
        let r = line(16, 1.0);
        let zero = SmoothFunction::constant(vec![0.0], 1, Codomain::Field { rows: 1, cols: 1 }).unwrap();
        let p = canonical_center(&v(&[2.0]), &zero, &r).unwrap();
        assert!(p.y().values().iter().all(|y| y.as_slice() == [2.0]));

        let one = SmoothFunction::constant(vec![1.0], 1, Codomain::Field { rows: 1, cols: 1 }).unwrap();
        let p = canonical_center(&v(&[0.0]), &one, &r).unwrap();
        for (y, t) in p.y().values().iter().zip(r.grid().times()) {
            assert!((y.as_slice()[0] - t).abs() < 1e-15);
        }
        assert_eq!(p.norms(PairBudget::Auto).seminorm, 0.0);

        let p = canonical_center(&v(&[0.3]), &SmoothFunction::scalar_field(Profile::Sin), &r).unwrap();
        assert!(p.norms(PairBudget::Auto).seminorm < 1e-14);
        assert!(canonical_center(&v(&[0.0, 1.0]), &one, &r).is_err());
    }

    #[test]
    fn picard_examples() {
        let r = line(1024, 1.0);
        let one = SmoothFunction::constant(vec![1.0], 1, Codomain::Field { rows: 1, cols: 1 }).unwrap();
        let xi = v(&[0.0]);
        let start = canonical_center(&xi, &SmoothFunction::scalar_field(Profile::Cos), &r).unwrap();
        let out = picard_map(&start, &one, &xi).unwrap();
        for (y, t) in out.y().values().iter().zip(r.grid().times()) {
            assert!((y.as_slice()[0] - t).abs() < 1e-14);
        }

        let xi = v(&[1.0]);
        let f = identity_field();
        let p = canonical_center(&xi, &f, &r).unwrap();
        let out = picard_map(&p, &f, &xi).unwrap();
        assert_eq!(out.y().first().as_slice(), xi.as_slice());
        assert_eq!(out.y_prime().first().get(0, 0), 1.0);
        for (y, t) in out.y().values().iter().zip(r.grid().times()) {
            let exact = 1.0 + t + 0.5 * t * t;
            assert!((y.as_slice()[0] - exact).abs() < 1e-3, "{t}");
        }
    }

    #[test]
    fn zero_field_is_constant() {
        let r = line(64, 3.0);
        let zero = SmoothFunction::constant(vec![0.0], 1, Codomain::Field { rows: 1, cols: 1 }).unwrap();
        let rep = solve_global(&v(&[0.7]), &zero, &r, &SolverConfig::default()).unwrap();
        assert!(rep.solution.y().values().iter().all(|y| y.as_slice() == [0.7]));
        assert!(rep.steps.iter().all(|s| s.picard_iterations == 1));
        assert_eq!(rep.residual_norm, 0.0);
    }

    #[test]
    fn exponential_oracle() {
        let r = line(4096, 1.0);
        let f = identity_field();
        let rep = solve_global(&v(&[1.0]), &f, &r, &SolverConfig::default()).unwrap();
        let err = rep
            .solution
            .y()
            .values()
            .iter()
            .zip(r.grid().times())
            .map(|(y, t)| (y.as_slice()[0] - t.exp()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "err {err}");
        assert!(!rep.global);
        assert!(rep.residual_norm <= 10.0 * 1e-12 * std::f64::consts::E);
        for s in &rep.steps {
            assert!(s.final_contraction_ratio <= 0.5);
            assert!(s.ball_ok);
            assert!(s.ratios.windows(2).all(|w| w[1] < w[0] || w[1] <= 0.5), "{:?}", s.ratios);
        }
        for (yp, y) in rep.solution.y_prime().values().iter().zip(rep.solution.y().values()) {
            assert_eq!(yp.get(0, 0), y.as_slice()[0]);
        }
    }

    #[test]
    fn sine_oracle_and_verification() {
        let r = line(4096, 2.0);
        let f = SmoothFunction::scalar_field(Profile::Sin);
        let xi = v(&[1.0]);
        let rep = solve_global(&xi, &f, &r, &SolverConfig::default()).unwrap();
        assert!(rep.global);
        let err = rep
            .solution
            .y()
            .values()
            .iter()
            .zip(r.grid().times())
            .map(|(y, t)| (y.as_slice()[0] - 2.0 * ((0.5f64).tan() * t.exp()).atan()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-5, "err {err}");
        let ver = verify_solution(&rep.solution, &f, &xi, PairBudget::Auto).unwrap();
        assert!(ver.residual <= 10.0 * 1e-12);
        assert!(ver.remainder_2beta.is_finite());

        let mut y = rep.solution.y().values().to_vec();
        y[2000] = Vector::new(vec![y[2000].as_slice()[0] + 1e-3]).unwrap();
        let yp = rep.solution.y_prime().values().to_vec();
        let bad = ControlledPath::from_parts(r.clone(), y, yp).unwrap();
        assert!(verify_solution(&bad, &f, &xi, PairBudget::Auto).unwrap().residual >= 1e-4);
    }

    #[test]
    fn constant_field_on_circle_is_exact() {
        let g = Arc::new(Grid::uniform(1000, 2.0 * std::f64::consts::PI).unwrap());
        let x = GridPath::from_fn(g, |t| v(&[t.cos(), t.sin()])).unwrap();
        let r = Arc::new(ReducedRoughPath::geometric_lift(x, 0.5).unwrap());
        let (a, b) = (0.7, -1.3);
        let f = SmoothFunction::constant(vec![a, b], 1, Codomain::Field { rows: 1, cols: 2 }).unwrap();
        let xi = v(&[0.25]);
        let rep = solve_global(&xi, &f, &r, &SolverConfig::default()).unwrap();
        for (y, x) in rep.solution.y().values().iter().zip(r.path().values()) {
            let exact = 0.25 + a * (x.as_slice()[0] - 1.0) + b * x.as_slice()[1];
            assert!((y.as_slice()[0] - exact).abs() < 1e-12);
        }
        assert!(rep.residual_norm <= 1e-12);
    }

    #[test]
    fn starting_guess_does_not_matter() {
        let r = line(2048, 2.0);
        let f = SmoothFunction::scalar_field(Profile::Sin);
        let xi = v(&[1.0]);
        let cfg = SolverConfig::default();
        let a = solve_global(&xi, &f, &r, &cfg).unwrap();
        let b = solve_global(&xi, &f, &r, &SolverConfig { start: StartGuess::Perturbed { amplitude: 0.5 }, ..cfg }).unwrap();
        assert!(a.solution.y().sup_distance(b.solution.y()).unwrap() <= 10.0 * cfg.fixed_point_tol);
    }

    #[test]
    fn blow_up_is_numerical() {
        let r = line(256, 2.0);
        let square = SmoothFunction::scalar_field(Profile::Square);
        let cfg = SolverConfig { tau_min: 0.1, ..SolverConfig::default() };
        let err = solve_global(&v(&[1.0]), &square, &r, &cfg).unwrap_err();
        assert!(err.is_numerical(), "{err}");
        assert!(matches!(err, Error::Segment { .. }));
    }
}
