//! Refinement sweeps over dyadic grids with closed-form oracles.

use crate::controlled::{ControlledIntegrand, ControlledVector};
use crate::drivers::{gen_smooth, Curve, FbmGenerator, FbmMethod};
use crate::error::{Error, Result};
use crate::grid::{fmt_f64, Grid, GridPath};
use crate::rough_path::ReducedRoughPath;
use crate::sewing::{integrate_values, loglog_slope};
use crate::smooth::{Codomain, Profile, SmoothFunction};
use crate::solver::{solve_global, SolverConfig};
use crate::tensor::{LinMap, Vector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Errors below this are treated as exact and left out of the fit.
pub const EXACT_FLOOR: f64 = 1e-13;

pub const CONVERGENCE_SCHEMA: &str = "rrpath.convergence/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Circle driver, constant field `[0.7, −1.3]`, `ξ = 0.25`: exact telescoping.
    CircleConstant,
    /// `X_t = t`, `F(y) = y`, `ξ = 1` on `[0, 1]` against `eᵗ`.
    LinearExp,
    /// fBm, integrand `(X, Id)`, `∫₀ᵀ X dX` against `½ X_T²`.
    FbmDriverIdentity,
    /// fBm, integrand `sin(X)`, `∫₀ᵀ sin X dX` against `1 − cos X_T`.
    FbmSin,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: Scenario,
    #[serde(default = "default_min_level")]
    pub min_level: u32,
    #[serde(default = "default_max_level")]
    pub max_level: u32,
    /// Independent fBm samples per level; the error is their root mean square.
    #[serde(default = "default_seeds")]
    pub seeds: u64,
    #[serde(default = "default_hurst")]
    pub hurst: f64,
}

fn default_min_level() -> u32 {
    4
}
fn default_max_level() -> u32 {
    12
}
fn default_seeds() -> u64 {
    8
}
fn default_hurst() -> f64 {
    0.45
}

impl ScenarioSpec {
    pub fn new(name: Scenario) -> Self {
        Self { name, min_level: default_min_level(), max_level: default_max_level(), seeds: default_seeds(), hurst: default_hurst() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub steps: usize,
    /// Value at `T` (first coordinate; first seed for fBm scenarios).
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub schema: String,
    pub scenario: Scenario,
    pub rows: Vec<ConvergenceRow>,
    /// `−d log(error) / d log(N)` over rows with error above the exactness floor.
    pub fitted_order: Option<f64>,
}

impl ConvergenceTable {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["N", "value", "error"])?;
        for r in &self.rows {
            w.write_record([r.steps.to_string(), fmt_f64(r.value), fmt_f64(r.error)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn max_error(&self) -> f64 {
        self.rows.iter().map(|r| r.error).fold(0.0, f64::max)
    }
}

fn fitted_order(rows: &[ConvergenceRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.error > EXACT_FLOOR).map(|r| ((r.steps as f64).ln(), r.error.ln())).collect();
    (pts.len() >= 2).then(|| -loglog_slope(&pts))
}

fn scalar(x: f64) -> Vector {
    Vector::new(vec![x]).expect("finite")
}

fn sup_error(y: &GridPath<Vector>, exact: impl Fn(f64, &[f64]) -> f64, driver: &GridPath<Vector>) -> f64 {
    y.values()
        .iter()
        .zip(driver.values())
        .zip(y.grid().times())
        .map(|((y, x), &t)| (y.as_slice()[0] - exact(t, x.as_slice())).abs())
        .fold(0.0, f64::max)
}

fn solve_cell(steps: usize, scenario: Scenario) -> Result<ConvergenceRow> {
    let cfg = SolverConfig::default();
    let (curve, horizon, f, xi) = match scenario {
        Scenario::CircleConstant => (
            Curve::Circle,
            2.0 * std::f64::consts::PI,
            SmoothFunction::constant(vec![0.7, -1.3], 1, Codomain::Field { rows: 1, cols: 2 })?,
            0.25,
        ),
        _ => (Curve::Line { velocity: vec![1.0] }, 1.0, SmoothFunction::linear_field(LinMap::identity(1), 1, 1)?, 1.0),
    };
    let grid = Arc::new(Grid::uniform(steps, horizon)?);
    let x = gen_smooth(&curve, grid)?;
    let r = Arc::new(ReducedRoughPath::geometric_lift(x, 0.5)?);
    let rep = solve_global(&scalar(xi), &f, &r, &cfg)?;
    let y = rep.solution.y();
    let error = match scenario {
        Scenario::CircleConstant => sup_error(y, |_, x| 0.25 + 0.7 * (x[0] - 1.0) - 1.3 * x[1], r.path()),
        _ => sup_error(y, |t, _| t.exp(), r.path()),
    };
    Ok(ConvergenceRow { steps, value: y.last().as_slice()[0], error })
}

/// `(value at T, oracle)` for one fBm sample subsampled to `steps`.
fn fbm_cell(fine: &GridPath<Vector>, steps: usize, hurst: f64, scenario: Scenario) -> Result<(f64, f64)> {
    let factor = fine.grid().steps() / steps;
    let x = fine.subsample(factor)?;
    let xt = x.last().as_slice()[0];
    let r = Arc::new(ReducedRoughPath::geometric_lift(x, hurst)?);
    let (c, oracle) = match scenario {
        Scenario::FbmDriverIdentity => (ControlledIntegrand::driver_identity(r.clone())?, 0.5 * xt * xt),
        _ => {
            let y = ControlledVector::driver(r.clone())?;
            (y.compose_integrand(&SmoothFunction::scalar_field(Profile::Sin))?, 1.0 - xt.cos())
        }
    };
    Ok((integrate_values(&c, &r)?.last().as_slice()[0], oracle))
}

/// Run a refinement sweep; fBm scenarios draw seeds `seed, seed + 1, …`.
pub fn convergence_sweep(spec: &ScenarioSpec, seed: u64) -> Result<ConvergenceTable> {
    if spec.min_level < 1 || spec.max_level < spec.min_level || spec.max_level > 20 {
        return Err(Error::InvalidConfig("levels must satisfy 1 ≤ min_level ≤ max_level ≤ 20".into()));
    }
    let levels: Vec<usize> = (spec.min_level..=spec.max_level).map(|k| 1usize << k).collect();
    let rows = match spec.name {
        Scenario::CircleConstant | Scenario::LinearExp => {
            levels.par_iter().map(|&n| solve_cell(n, spec.name)).collect::<Result<Vec<_>>>()?
        }
        Scenario::FbmDriverIdentity | Scenario::FbmSin => {
            if spec.seeds == 0 {
                return Err(Error::InvalidConfig("seeds must be positive".into()));
            }
            let finest = *levels.last().expect("non-empty");
            let gen = FbmGenerator::new(spec.hurst, 1, Arc::new(Grid::uniform(finest, 1.0)?), FbmMethod::Auto)?;
            let cells: Vec<(usize, u64)> = levels.iter().flat_map(|&n| (0..spec.seeds).map(move |s| (n, s))).collect();
            let samples = (0..spec.seeds).into_par_iter().map(|s| gen.sample(seed + s)).collect::<Result<Vec<_>>>()?;
            let results = cells
                .par_iter()
                .map(|&(n, s)| fbm_cell(&samples[s as usize], n, spec.hurst, spec.name))
                .collect::<Result<Vec<_>>>()?;
            levels
                .iter()
                .zip(results.chunks(spec.seeds as usize))
                .map(|(&n, chunk)| {
                    let mse = chunk.iter().map(|(v, o)| (v - o).powi(2)).sum::<f64>() / chunk.len() as f64;
                    ConvergenceRow { steps: n, value: chunk[0].0, error: mse.sqrt() }
                })
                .collect()
        }
    };
    Ok(ConvergenceTable { schema: CONVERGENCE_SCHEMA.into(), scenario: spec.name, fitted_order: fitted_order(&rows), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_constant_is_exact() {
        let spec = ScenarioSpec { min_level: 4, max_level: 9, ..ScenarioSpec::new(Scenario::CircleConstant) };
        let t = convergence_sweep(&spec, 0).unwrap();
        assert_eq!(t.rows.len(), 6);
        assert!(t.max_error() <= 1e-12, "{}", t.max_error());
    }

    #[test]
    fn linear_exp_order() {
        let spec = ScenarioSpec { min_level: 4, max_level: 10, ..ScenarioSpec::new(Scenario::LinearExp) };
        let t = convergence_sweep(&spec, 0).unwrap();
        assert!(t.fitted_order.unwrap() >= 1.0, "{:?}", t.fitted_order);
    }

    #[test]
    fn fbm_identity_telescopes_and_sin_converges() {
        let spec = ScenarioSpec { min_level: 4, max_level: 12, ..ScenarioSpec::new(Scenario::FbmDriverIdentity) };
        let t = convergence_sweep(&spec, 3).unwrap();
        assert!(t.max_error() <= 1e-12);
        assert!(t.fitted_order.is_none());

        let spec = ScenarioSpec { name: Scenario::FbmSin, seeds: 16, ..spec };
        let t = convergence_sweep(&spec, 3).unwrap();
        assert!(t.fitted_order.unwrap() >= 3.0 * 0.45 - 1.0 - 0.1, "{:?}", t.fitted_order);

        let mut out = Vec::new();
        t.write_csv(&mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().starts_with("N,value,error\n16,"));
    }
}
