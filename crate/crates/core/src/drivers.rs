//! Synthetic drivers: closed-form curves, piecewise-linear interpolation and fractional
//! Brownian motion.

use crate::error::{Error, Result};
use crate::grid::{Grid, GridPath};
use crate::tensor::Vector;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Largest grid for which the Cholesky fallback is attempted.
pub const CHOLESKY_LIMIT: usize = 1 << 11;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "name")]
pub enum Curve {
    /// `X_t = v t`.
    Line { velocity: Vec<f64> },
    /// `X_t = (cos t, sin t)`.
    Circle,
    /// `X^i_t = Σ_k c_{ik} t^k`.
    Polynomial { coefficients: Vec<Vec<f64>> },
    /// `X_t = (sin(a t), sin(b t))`.
    Lissajous { a: f64, b: f64 },
}

impl Curve {
    /// Build a curve from a catalog name and numeric parameters.
    ///
    /// `line` takes the velocity, `lissajous` takes `a, b`, `polynomial` takes the coefficients
    /// of a scalar polynomial, `circle` takes nothing.
    pub fn from_name(name: &str, params: &[f64]) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidConfig(format!("curve '{name}': {msg}")));
        match name {
            "line" if params.is_empty() => bad("needs a velocity"),
            "line" => Ok(Curve::Line { velocity: params.to_vec() }),
            "circle" if !params.is_empty() => bad("takes no parameters"),
            "circle" => Ok(Curve::Circle),
            "polynomial" if params.is_empty() => bad("needs coefficients"),
            "polynomial" => Ok(Curve::Polynomial { coefficients: vec![params.to_vec()] }),
            "lissajous" => match params {
                [a, b] => Ok(Curve::Lissajous { a: *a, b: *b }),
                _ => bad("needs a and b"),
            },
            _ => Err(Error::UnknownCurve(name.to_string())),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Curve::Line { velocity } => velocity.len(),
            Curve::Circle | Curve::Lissajous { .. } => 2,
            Curve::Polynomial { coefficients } => coefficients.len(),
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        match self {
            Curve::Line { velocity } => velocity.iter().map(|v| v * t).collect(),
            Curve::Circle => vec![t.cos(), t.sin()],
            Curve::Polynomial { coefficients } => {
                coefficients.iter().map(|c| c.iter().rev().fold(0.0, |acc, a| acc * t + a)).collect()
            }
            Curve::Lissajous { a, b } => vec![(a * t).sin(), (b * t).sin()],
        }
    }
}

/// Sample a closed-form curve at the grid times.
pub fn gen_smooth(curve: &Curve, grid: Arc<Grid>) -> Result<GridPath<Vector>> {
    if curve.dim() == 0 {
        return Err(Error::InvalidConfig("curve has dimension 0".into()));
    }
    GridPath::new(grid.clone(), grid.times().iter().map(|&t| Vector::new(curve.eval(t))).collect::<Result<_>>()?)
}

/// Linear interpolation through `(t_k, x_k)` nodes; the nodes must cover the grid.
pub fn gen_piecewise_linear(times: &[f64], values: &[Vec<f64>], grid: Arc<Grid>) -> Result<GridPath<Vector>> {
    if times.len() != values.len() || times.len() < 2 {
        return Err(Error::InvalidConfig("piecewise-linear driver needs at least two nodes".into()));
    }
    let d = values[0].len();
    if d == 0 || values.iter().any(|v| v.len() != d) {
        return Err(Error::InvalidConfig("piecewise-linear nodes have inconsistent dimensions".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidConfig("piecewise-linear node times must increase strictly".into()));
    }
    let (t0, t1) = (times[0], times[times.len() - 1]);
    if t0 > 0.0 || t1 < grid.horizon() {
        return Err(Error::InvalidConfig(format!("nodes cover [{t0}, {t1}], grid needs [0, {}]", grid.horizon())));
    }
    let values = grid
        .times()
        .iter()
        .map(|&t| {
            let k = (times.partition_point(|&s| s <= t).max(1) - 1).min(times.len() - 2);
            let w = (t - times[k]) / (times[k + 1] - times[k]);
            Vector::new(values[k].iter().zip(&values[k + 1]).map(|(a, b)| a + w * (b - a)).collect())
        })
        .collect::<Result<_>>()?;
    GridPath::new(grid, values)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FbmMethod {
    /// Circulant embedding on uniform grids, Cholesky otherwise or when the embedding fails.
    #[default]
    Auto,
    CirculantEmbedding,
    Cholesky,
}

/// `Cov(X_s, X_t) = ½(s^{2H} + t^{2H} − |t − s|^{2H})`.
pub fn fbm_covariance(hurst: f64, s: f64, t: f64) -> f64 {
    let h2 = 2.0 * hurst;
    0.5 * (s.powf(h2) + t.powf(h2) - (t - s).abs().powf(h2))
}

pub fn check_hurst(hurst: f64) -> Result<()> {
    if hurst > 1.0 / 3.0 && hurst <= 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidHurst(hurst))
    }
}

enum Sampler {
    /// `sqrt(λ_k / 2M)` for the circulant of size `2M`.
    Circulant { sqrt_eig: Vec<f64>, fft: Arc<dyn rustfft::Fft<f64>>, scale: f64 },
    Cholesky { factor: DMatrix<f64> },
}

/// Exact-covariance fBm sampler on a fixed grid; each sample is determined by its seed.
pub struct FbmGenerator {
    hurst: f64,
    dim: usize,
    grid: Arc<Grid>,
    sampler: Sampler,
    fallback: Option<String>,
}

impl FbmGenerator {
    pub fn new(hurst: f64, dim: usize, grid: Arc<Grid>, method: FbmMethod) -> Result<Self> {
        check_hurst(hurst)?;
        if dim == 0 {
            return Err(Error::InvalidConfig("fbm dimension must be positive".into()));
        }
        let uniform = is_uniform(&grid);
        let circulant = match method {
            FbmMethod::Cholesky => None,
            FbmMethod::CirculantEmbedding if !uniform => {
                return Err(Error::InvalidGrid("circulant embedding needs a uniform grid".into()))
            }
            FbmMethod::CirculantEmbedding => Some(Ok(circulant_sampler(hurst, &grid)?)),
            FbmMethod::Auto if uniform => Some(circulant_sampler(hurst, &grid)),
            FbmMethod::Auto => None,
        };
        let (sampler, fallback) = match circulant {
            Some(Ok(s)) => (s, None),
            Some(Err(e)) => (cholesky_sampler(hurst, &grid)?, Some(e.to_string())),
            None => (cholesky_sampler(hurst, &grid)?, None),
        };
        Ok(Self { hurst, dim, grid, sampler, fallback })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn method(&self) -> FbmMethod {
        match self.sampler {
            Sampler::Circulant { .. } => FbmMethod::CirculantEmbedding,
            Sampler::Cholesky { .. } => FbmMethod::Cholesky,
        }
    }

    /// Why circulant embedding was abandoned, if it was.
    pub fn fallback_reason(&self) -> Option<&str> {
        self.fallback.as_deref()
    }

    /// One sample path with independent coordinates, `X_0 = 0`.
    pub fn sample(&self, seed: u64) -> Result<GridPath<Vector>> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let n = self.grid.steps();
        let coords: Vec<Vec<f64>> = (0..self.dim).map(|_| self.sample_scalar(&mut rng, n)).collect();
        let values = (0..=n).map(|k| Vector::new(coords.iter().map(|c| c[k]).collect())).collect::<Result<_>>()?;
        GridPath::new(self.grid.clone(), values)
    }

    fn sample_scalar(&self, rng: &mut ChaCha20Rng, n: usize) -> Vec<f64> {
        match &self.sampler {
            Sampler::Circulant { sqrt_eig, fft, scale } => {
                let mut buf: Vec<Complex<f64>> = sqrt_eig
                    .iter()
                    .map(|s| {
                        let re: f64 = StandardNormal.sample(rng);
                        let im: f64 = StandardNormal.sample(rng);
                        Complex::new(s * re, s * im)
                    })
                    .collect();
                fft.process(&mut buf);
                let mut out = Vec::with_capacity(n + 1);
                out.push(0.0);
                let mut acc = 0.0;
                for z in &buf[..n] {
                    acc += scale * z.re;
                    out.push(acc);
                }
                out
            }
            Sampler::Cholesky { factor } => {
                let z = DVector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(rng)));
                let x = factor * z;
                std::iter::once(0.0).chain(x.iter().copied()).collect()
            }
        }
    }
}

fn is_uniform(grid: &Grid) -> bool {
    let h = grid.horizon() / grid.steps() as f64;
    grid.times().windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
}

/// Davies–Harte embedding of unit-spacing fractional Gaussian noise, rescaled by `h^H`.
fn circulant_sampler(hurst: f64, grid: &Grid) -> Result<Sampler> {
    let n = grid.steps();
    let m = 2 * n;
    let gamma = |k: usize| {
        let k = k as f64;
        let h2 = 2.0 * hurst;
        0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
    };
    let mut row: Vec<Complex<f64>> = (0..m).map(|k| Complex::new(gamma(k.min(m - k)), 0.0)).collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);
    let max = row.iter().map(|z| z.re).fold(0.0, f64::max);
    let mut sqrt_eig = Vec::with_capacity(m);
    for (k, z) in row.iter().enumerate() {
        if z.re < -1e-10 * max {
            return Err(Error::EmbeddingFailure(format!("eigenvalue {k} is {:e}", z.re)));
        }
        sqrt_eig.push((z.re.max(0.0) / m as f64).sqrt());
    }
    let h = grid.horizon() / n as f64;
    Ok(Sampler::Circulant { sqrt_eig, fft, scale: h.powf(hurst) })
}

fn cholesky_sampler(hurst: f64, grid: &Grid) -> Result<Sampler> {
    let n = grid.steps();
    if n > CHOLESKY_LIMIT {
        return Err(Error::EmbeddingFailure(format!("Cholesky fallback limited to {CHOLESKY_LIMIT} steps, grid has {n}")));
    }
    let t = &grid.times()[1..];
    let cov = DMatrix::from_fn(n, n, |i, j| fbm_covariance(hurst, t[i], t[j]));
    let factor = cov
        .cholesky()
        .ok_or_else(|| Error::EmbeddingFailure("covariance matrix is not positive definite".into()))?
        .unpack();
    Ok(Sampler::Cholesky { factor })
}

/// One fBm sample on `grid`.
pub fn gen_fbm(hurst: f64, dim: usize, seed: u64, grid: Arc<Grid>) -> Result<GridPath<Vector>> {
    FbmGenerator::new(hurst, dim, grid, FbmMethod::Auto)?.sample(seed)
}
