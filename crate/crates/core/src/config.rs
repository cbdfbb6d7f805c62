//! JSON run configuration, driver construction and the field-name catalog.

use crate::convergence::ScenarioSpec;
use crate::drivers::{gen_piecewise_linear, gen_smooth, Curve, FbmGenerator, FbmMethod};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridPath, PairBudget};
use crate::rough_path::ReducedRoughPath;
use crate::smooth::{Codomain, Profile, SmoothFunction};
use crate::solver::SolverConfig;
use crate::tensor::{LinMap, Vector};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub const DEFAULT_ALPHA: f64 = 0.45;
pub const DEFAULT_BETA: f64 = 0.5;
pub const DEFAULT_SEED: u64 = 0;

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriverSpec {
    Smooth {
        curve: String,
        #[serde(default)]
        params: Vec<f64>,
        steps: usize,
        horizon: f64,
    },
    /// Rows `[t, x_0, …, x_{d−1}]`.
    PiecewiseLinear { nodes: Vec<Vec<f64>>, steps: usize, horizon: f64 },
    Fbm {
        hurst: f64,
        #[serde(default = "one")]
        dim: usize,
        steps: usize,
        horizon: f64,
        #[serde(default)]
        method: FbmMethod,
    },
    /// Path CSV with header `t,x0,…`.
    Csv { path: PathBuf },
    /// Saved reduced rough path JSON; the lift setting is ignored.
    Rrp { path: PathBuf },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lift {
    #[default]
    Geometric,
    /// Geometric lift perturbed by `φ_t = −(t/2) Id`.
    Ito,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub driver: DriverSpec,
    #[serde(default)]
    pub lift: Lift,
    /// Exponent of the lift for `lift`/`integrate`; working exponent for `solve`.
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Driver regularity for `solve`.
    #[serde(default)]
    pub beta: Option<f64>,
    /// RDE vector field, see [`parse_field`].
    #[serde(default)]
    pub field: Option<String>,
    #[serde(default)]
    pub xi: Option<Vec<f64>>,
    /// `driver` for `(X, Id)`, or a field name composed with the driver.
    #[serde(default)]
    pub integrand: Option<String>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub budget: PairBudget,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub scenario: Option<ScenarioSpec>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Parse a config file; relative driver paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_json(&std::fs::read_to_string(path)?)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// Exponent used when lifting for `lift` and `integrate`.
    pub fn lift_exponent(&self) -> f64 {
        self.alpha.or(self.beta).unwrap_or(DEFAULT_ALPHA)
    }

    /// Driver regularity used by `solve`.
    pub fn solve_exponent(&self) -> f64 {
        self.beta.unwrap_or(DEFAULT_BETA)
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn driver_path(&self) -> Result<GridPath<Vector>> {
        match &self.driver {
            DriverSpec::Smooth { curve, params, steps, horizon } => {
                gen_smooth(&Curve::from_name(curve, params)?, uniform(*steps, *horizon)?)
            }
            DriverSpec::PiecewiseLinear { nodes, steps, horizon } => {
                if nodes.iter().any(|r| r.len() < 2) {
                    return Err(Error::InvalidConfig("piecewise-linear nodes are rows [t, x0, ...]".into()));
                }
                let times: Vec<f64> = nodes.iter().map(|r| r[0]).collect();
                let values: Vec<Vec<f64>> = nodes.iter().map(|r| r[1..].to_vec()).collect();
                gen_piecewise_linear(&times, &values, uniform(*steps, *horizon)?)
            }
            DriverSpec::Fbm { hurst, dim, steps, horizon, method } => {
                FbmGenerator::new(*hurst, *dim, uniform(*steps, *horizon)?, *method)?.sample(self.seed())
            }
            DriverSpec::Csv { path } => GridPath::load_csv(&self.resolve(path)),
            DriverSpec::Rrp { path } => Ok(ReducedRoughPath::load(&self.resolve(path))?.path().clone()),
        }
    }

    /// The lifted driver at exponent `alpha`.
    pub fn rough_path(&self, alpha: f64) -> Result<ReducedRoughPath> {
        if let DriverSpec::Rrp { path } = &self.driver {
            let r = ReducedRoughPath::load(&self.resolve(path))?;
            return if self.alpha.is_some() || self.beta.is_some() { r.with_alpha(alpha) } else { Ok(r) };
        }
        lift(self.driver_path()?, alpha, self.lift)
    }
}

pub fn lift(path: GridPath<Vector>, alpha: f64, lift: Lift) -> Result<ReducedRoughPath> {
    match lift {
        Lift::Geometric => ReducedRoughPath::geometric_lift(path, alpha),
        Lift::Ito => ReducedRoughPath::ito_lift(path, alpha),
    }
}

fn uniform(steps: usize, horizon: f64) -> Result<Arc<Grid>> {
    Ok(Arc::new(Grid::uniform(steps, horizon)?))
}

fn parse_matrix(text: &str, rows: usize, cols: usize) -> Result<Vec<f64>> {
    let m: Vec<Vec<f64>> = serde_json::from_str(text)?;
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidConfig(format!("expected a {rows}×{cols} matrix, got '{text}'")));
    }
    Ok(m.concat())
}

fn parse_param<T: std::str::FromStr>(arg: &str, key: &str) -> Result<T> {
    arg.strip_prefix(key)
        .and_then(|v| v.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::InvalidConfig(format!("expected {key}=<value>, got '{arg}'")))
}

fn parse_profile(name: &str) -> Option<Profile> {
    match name {
        "sin" => Some(Profile::Sin),
        "cos" => Some(Profile::Cos),
        "tanh" => Some(Profile::Tanh),
        "bump" => Some(Profile::bump()),
        "square" => Some(Profile::Square),
        _ => None,
    }
}

/// Field `ℝⁿ → L(ℝᵈ, ℝⁿ)` by name.
///
/// * `zero`
/// * `const:[[..]]`, an `n × d` matrix
/// * `linear:[[..]]`, an `(n·d) × n` matrix `A` with `F(y)_{kj} = Σ_l A[k·d + j][l] y_l`
/// * `sin`, `cos`, `tanh`, `bump`, `square`: diagonal when `n = d`, every entry `σ(y)` when `n = 1`
/// * `tanh_matrix:seed=S`
/// * `ridge:<profile>:seed=S`
/// * `rotation:w=W` (`n = 2`, `d = 1`)
pub fn parse_field(spec: &str, n: usize, d: usize) -> Result<SmoothFunction> {
    let field = Codomain::Field { rows: n, cols: d };
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let f = match head {
        "zero" => SmoothFunction::constant(vec![0.0; n * d], n, field)?,
        "const" => SmoothFunction::constant(parse_matrix(rest, n, d)?, n, field)?,
        "linear" => SmoothFunction::linear_field(LinMap::new(n * d, n, parse_matrix(rest, n * d, n)?)?, n, d)?,
        "tanh_matrix" => SmoothFunction::tanh_matrix(n, d, parse_param(rest, "seed")?),
        "ridge" => {
            let (p, seed) = rest.split_once(':').unwrap_or((rest, ""));
            let profile = parse_profile(p).ok_or_else(|| Error::UnknownField(spec.to_string()))?;
            SmoothFunction::ridge_field(profile, n, d, n, parse_param(seed, "seed")?)
        }
        "rotation" if n == 2 && d == 1 => SmoothFunction::rotation(parse_param(rest, "w")?),
        "rotation" => return Err(Error::DimensionMismatch { expected: 2, found: n }),
        name => match parse_profile(name) {
            Some(p) if rest.is_empty() && n == d => SmoothFunction::diagonal_field(p, n),
            Some(p) if rest.is_empty() && n == 1 => SmoothFunction::shared_field(p, d),
            Some(_) if rest.is_empty() => {
                return Err(Error::InvalidConfig(format!("'{name}' needs n = d or n = 1 (n = {n}, d = {d})")))
            }
            _ => return Err(Error::UnknownField(spec.to_string())),
        },
    };
    Ok(f.renamed(spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let cfg = RunConfig::from_json(
            r#"{"driver": {"kind": "smooth", "curve": "circle", "steps": 64, "horizon": 6.0},
                "lift": "ito", "beta": 0.45, "field": "sin", "xi": [1.0, 0.0],
                "solver": {"tau_init": 0.5}}"#,
        )
        .unwrap();
        assert_eq!(cfg.lift, Lift::Ito);
        assert_eq!(cfg.solver.tau_init, Some(0.5));
        assert_eq!(cfg.solver.contraction_target, 0.5);
        assert_eq!(cfg.lift_exponent(), 0.45);
        let r = cfg.rough_path(0.45).unwrap();
        assert_eq!(r.dim(), 2);
        assert!((r.second_level(0, 64).unwrap().get(0, 0) - (0.5 * (6f64.cos() - 1.0).powi(2) - 3.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_unknown_keys_and_curves() {
        assert!(RunConfig::from_json(r#"{"driver": {"kind": "smooth", "curve": "circle", "steps": 8, "horizon": 1}, "alhpa": 0.4}"#).is_err());
        let cfg = RunConfig::from_json(r#"{"driver": {"kind": "smooth", "curve": "spiral", "steps": 8, "horizon": 1}}"#).unwrap();
        assert!(matches!(cfg.driver_path(), Err(Error::UnknownCurve(_))));
    }

    #[test]
    fn piecewise_and_fbm_drivers() {
        let cfg = RunConfig::from_json(
            r#"{"driver": {"kind": "piecewise_linear", "nodes": [[0, 0, 0], [0.5, 1, -1], [1, 0, 2]], "steps": 4, "horizon": 1}}"#,
        )
        .unwrap();
        assert_eq!(cfg.driver_path().unwrap().value(1).as_slice(), &[0.5, -0.5]);

        let cfg = RunConfig::from_json(r#"{"driver": {"kind": "fbm", "hurst": 0.4, "steps": 32, "horizon": 1}, "seed": 5}"#).unwrap();
        let a = cfg.driver_path().unwrap();
        assert_eq!(a, cfg.driver_path().unwrap());
        let bad = RunConfig::from_json(r#"{"driver": {"kind": "fbm", "hurst": 0.3, "steps": 32, "horizon": 1}}"#).unwrap();
        assert!(matches!(bad.driver_path(), Err(Error::InvalidHurst(_))));
    }

    #[test]
    fn field_catalog() {
        let y = Vector::new(vec![0.3]).unwrap();
        let f = parse_field("linear:[[2]]", 1, 1).unwrap();
        assert_eq!(f.eval_field(&y).unwrap().get(0, 0), 0.6);
        let f = parse_field("const:[[1, -2]]", 1, 2).unwrap();
        assert_eq!(f.eval_field(&y).unwrap().to_rows(), vec![vec![1.0, -2.0]]);
        let f = parse_field("sin", 1, 3).unwrap();
        assert_eq!(f.codomain(), Codomain::Field { rows: 1, cols: 3 });
        let f = parse_field("tanh", 2, 2).unwrap();
        assert_eq!(f.codomain(), Codomain::Field { rows: 2, cols: 2 });
        assert!(parse_field("tanh_matrix:seed=7", 2, 3).unwrap().is_bounded());
        assert!(parse_field("ridge:cos:seed=1", 2, 3).is_ok());
        assert!(parse_field("rotation:w=2", 2, 1).is_ok());
        assert!(matches!(parse_field("spline", 1, 1), Err(Error::UnknownField(_))));
        assert!(parse_field("sin", 2, 3).is_err());
        assert!(parse_field("const:[[1]]", 1, 2).is_err());
    }
}
