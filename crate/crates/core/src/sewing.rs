//! The reduced rough integral `∫ Y d𝕏` as a compensated Riemann sum, with the
//! local error certificate and the integral packaged as a controlled path.

use crate::controlled::{ControlledIntegrand, ControlledPath, ControlledVector, NormBound};
use crate::error::Result;
use crate::grid::{scan_pairs, GridPath, PairBudget};
use crate::rough_path::ReducedRoughPath;
use crate::tensor::{apply_linmap_raw, pair_bilinear_raw, Tensorial, Vector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Sewing constant `2 / (1 − 2^{1−3α})`.
pub fn sewing_constant(alpha: f64) -> f64 {
    2.0 / (1.0 - 2f64.powf(1.0 - 3.0 * alpha))
}

/// Constant of the point-removal argument on arbitrary partitions, `2^{3α} ζ(3α)`.
pub fn removal_constant(alpha: f64) -> f64 {
    2f64.powf(3.0 * alpha) * zeta(3.0 * alpha)
}

/// Riemann zeta for real `s > 1` (Euler–Maclaurin with ten explicit terms).
pub fn zeta(s: f64) -> f64 {
    const N: usize = 10;
    let head: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    let n = N as f64;
    let b = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
    let mut tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // Σ B_{2k}/(2k)! · s(s+1)…(s+2k−2) · N^{−s−2k+1}
    let mut rising = s;
    let mut fact = 2.0;
    for (k, bk) in b.iter().enumerate() {
        let p = 2 * k + 1;
        tail += bk / fact * rising * n.powf(-s - p as f64);
        rising *= (s + p as f64) * (s + p as f64 + 1.0);
        fact *= ((p + 2) * (p + 3)) as f64;
    }
    head + tail
}

/// `A_{ij} = Y_i X_{ij} + Y′_i S_{ij}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Germ {
    pub s_index: usize,
    pub t_index: usize,
    pub value: Vector,
}

#[derive(Clone, Debug)]
pub struct IntegralResult {
    /// `I_{t_k}` at every grid point, `I_0 = 0`.
    pub values: GridPath<Vector>,
    /// Dyadic levels below the grid (always 0: the grid is the finest partition of the data).
    pub refinement_depth: usize,
    /// Empirical `‖δA‖_{3α}` over aligned dyadic triples.
    pub germ_defect_3alpha: f64,
    /// `max_t ‖Y′_t − Sym(Y′_t)‖`; nonzero means the integrand is not symmetric.
    pub antisymmetry_defect: f64,
}

pub(crate) fn germ_raw(c: &ControlledIntegrand, r: &ReducedRoughPath, i: usize, j: usize) -> Vec<f64> {
    let dx = r.dx(i, j);
    let s = if j == i + 1 { r.steps()[i].clone() } else { r.pair_value(i, j) };
    let mut a = apply_linmap_raw(c.y().value(i), &dx);
    for (x, b) in a.iter_mut().zip(pair_bilinear_raw(c.y_prime().value(i), s.data())) {
        *x += b;
    }
    a
}

pub fn germ(c: &ControlledIntegrand, r: &ReducedRoughPath, i: usize, j: usize) -> Result<Germ> {
    c.check_base(r)?;
    r.grid().check_pair(i, j)?;
    if i == j {
        return Err(crate::error::Error::UnorderedPair(i, j));
    }
    Ok(Germ { s_index: i, t_index: j, value: Vector::new(germ_raw(c, r, i, j))? })
}

/// Running sums with Neumaier compensation, one accumulator per coordinate.
fn compensated_prefix(steps: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut sum = vec![0.0; dim];
    let mut comp = vec![0.0; dim];
    let mut out = Vec::with_capacity(steps.len() + 1);
    out.push(vec![0.0; dim]);
    for step in steps {
        for k in 0..dim {
            let x = step[k];
            let t = sum[k] + x;
            if sum[k].abs() >= x.abs() {
                comp[k] += (sum[k] - t) + x;
            } else {
                comp[k] += (x - t) + sum[k];
            }
            sum[k] = t;
        }
        out.push(sum.iter().zip(&comp).map(|(s, c)| s + c).collect());
    }
    out
}

/// Grid-level compensated Riemann sum, without diagnostics.
pub fn integrate_values(c: &ControlledIntegrand, r: &ReducedRoughPath) -> Result<GridPath<Vector>> {
    c.check_base(r)?;
    let n = r.grid().steps();
    let steps: Vec<Vec<f64>> = (0..n).into_par_iter().map(|i| germ_raw(c, r, i, i + 1)).collect();
    let sums = compensated_prefix(&steps, c.out_dim());
    let values = sums.into_iter().map(Vector::new).collect::<Result<Vec<_>>>()?;
    GridPath::new(r.grid_arc().clone(), values)
}

/// `∫₀^t Y d𝕏` at every grid time, with the germ defect and symmetry diagnostics.
pub fn integrate(c: &ControlledIntegrand, r: &ReducedRoughPath) -> Result<IntegralResult> {
    let values = integrate_values(c, r)?;
    Ok(IntegralResult {
        values,
        refinement_depth: 0,
        germ_defect_3alpha: germ_defect(c, r, DEFECT_TRIPLES_PER_LEVEL),
        antisymmetry_defect: c.antisymmetry_defect(),
    })
}

const DEFECT_TRIPLES_PER_LEVEL: usize = 256;

/// `max |A_{st} − A_{su} − A_{ut}| / (t − s)^{3α}` over triples `(i, i + h, i + 2h)`, `h = 2^k`,
/// with at most `per_level` evenly spread triples per level.
pub fn germ_defect(c: &ControlledIntegrand, r: &ReducedRoughPath, per_level: usize) -> f64 {
    let n = r.grid().steps();
    let alpha = r.alpha();
    let t = r.grid().times();
    let mut triples = Vec::new();
    let mut h = 1;
    while 2 * h <= n {
        let starts: Vec<usize> = (0..=(n - 2 * h)).step_by(2 * h).collect();
        let stride = starts.len().div_ceil(per_level).max(1);
        triples.extend(starts.into_iter().step_by(stride).map(|i| (i, i + h, i + 2 * h)));
        h *= 2;
    }
    triples
        .par_iter()
        .map(|&(i, u, j)| {
            let a = germ_raw(c, r, i, j);
            let b = germ_raw(c, r, i, u);
            let d = germ_raw(c, r, u, j);
            let norm = a.iter().zip(&b).zip(&d).map(|((a, b), d)| (a - b - d).powi(2)).sum::<f64>().sqrt();
            crate::grid::holder_quotient(norm, t[j] - t[i], 3.0 * alpha)
        })
        .reduce(|| 0.0, f64::max)
}

/// Left and right side of the local error estimate on one pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub lhs: f64,
    pub rhs: f64,
}

/// Precomputed integral and seminorms for repeated local error certificates.
pub struct Certifier<'a> {
    c: &'a ControlledIntegrand,
    r: &'a ReducedRoughPath,
    integral: GridPath<Vector>,
    /// `C_α (‖X‖_α ‖R^Y‖_{2α} + ‖S‖_{2α} ‖Y′‖_α)`.
    factor: f64,
}

impl<'a> Certifier<'a> {
    pub fn new(c: &'a ControlledIntegrand, r: &'a ReducedRoughPath, budget: PairBudget) -> Result<Self> {
        let integral = integrate_values(c, r)?;
        let alpha = r.alpha();
        let rn = r.norms(budget);
        let cn = c.norms(budget);
        let factor = sewing_constant(alpha) * (rn.x_alpha * cn.remainder_2alpha + rn.s_2alpha * cn.y_prime_alpha);
        Ok(Self { c, r, integral, factor })
    }

    pub fn integral(&self) -> &GridPath<Vector> {
        &self.integral
    }

    pub fn certificate(&self, i: usize, j: usize) -> Result<Certificate> {
        self.r.grid().check_pair(i, j)?;
        if i == j {
            return Err(crate::error::Error::UnorderedPair(i, j));
        }
        let inc = self.integral.value(j).diff(self.integral.value(i));
        let a = germ_raw(self.c, self.r, i, j);
        let lhs = inc.as_slice().iter().zip(&a).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let h = self.r.grid().t(j) - self.r.grid().t(i);
        Ok(Certificate { lhs, rhs: self.factor * h.powf(3.0 * self.r.alpha()) })
    }

    /// Certificates on aligned dyadic pairs `(m·2^k, (m+1)·2^k)`, at most `per_scale` per level,
    /// with the log–log slope of the per-scale maximum of `lhs` against the pair length.
    pub fn sweep(&self, min_scale: usize, per_scale: usize) -> Result<CertificateReport> {
        let n = self.r.grid().steps();
        let mut pairs = Vec::new();
        let mut k = min_scale;
        while (1usize << k) <= n {
            let h = 1usize << k;
            let starts: Vec<usize> = (0..=(n - h)).step_by(h).collect();
            let stride = starts.len().div_ceil(per_scale).max(1);
            pairs.extend(starts.into_iter().step_by(stride).map(|i| (i, i + h)));
            k += 1;
        }
        let certs = pairs.par_iter().map(|&(i, j)| self.certificate(i, j)).collect::<Result<Vec<_>>>()?;
        let mut per_scale_max: Vec<(usize, f64)> = Vec::new();
        for (&(i, j), cert) in pairs.iter().zip(&certs) {
            match per_scale_max.iter_mut().find(|(span, _)| *span == j - i) {
                Some(slot) => slot.1 = slot.1.max(cert.lhs),
                None => per_scale_max.push((j - i, cert.lhs)),
            }
        }
        let mesh = self.r.grid().horizon() / n as f64;
        let pts: Vec<(f64, f64)> = per_scale_max
            .iter()
            .filter(|(_, m)| *m > 0.0)
            .map(|(span, m)| ((*span as f64 * mesh).ln(), m.ln()))
            .collect();
        let slope = loglog_slope(&pts);
        let scales = per_scale_max.len();
        let violations = certs.iter().filter(|c| c.lhs > c.rhs).count();
        Ok(CertificateReport {
            pairs,
            lhs: certs.iter().map(|c| c.lhs).collect(),
            rhs: certs.iter().map(|c| c.rhs).collect(),
            slope,
            scales,
            violations,
        })
    }
}

/// Local error certificates over dyadic scales.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub pairs: Vec<(usize, usize)>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub slope: f64,
    pub scales: usize,
    pub violations: usize,
}

/// Least-squares slope of `y` against `x`; `NaN` with fewer than two points.
pub fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// `|I_{ij} − A_{ij}|` against `C_α(‖X‖_α‖R^Y‖_{2α} + ‖S‖_{2α}‖Y′‖_α)(t_j − t_i)^{3α}`.
pub fn local_error_certificate(c: &ControlledIntegrand, r: &ReducedRoughPath, i: usize, j: usize) -> Result<Certificate> {
    Certifier::new(c, r, PairBudget::Auto)?.certificate(i, j)
}

/// `(Z, Z′) = (∫₀^· Y d𝕏, Y)`.
pub fn integral_as_controlled(c: &ControlledIntegrand, r: &ReducedRoughPath) -> Result<ControlledVector> {
    let values = integrate_values(c, r)?;
    ControlledPath::new(c.base().clone(), values, c.y().clone())
}

/// Bound on `‖Z, Z′‖_{X;α}` for the integral path.
///
/// Closed form `‖Y‖_α + ‖Y′‖_∞‖S‖_{2α} + C_α T^α (‖X‖_α‖R^Y‖_{2α} + ‖S‖_{2α}‖Y′‖_α)`; the chain is the
/// same expression with the point-removal constant `2^{3α}ζ(3α)` in place of `C_α`.
pub fn integral_norm_bound(c: &ControlledIntegrand, r: &ReducedRoughPath, budget: PairBudget) -> Result<NormBound> {
    c.check_base(r)?;
    let alpha = r.alpha();
    let rn = r.norms(budget);
    let cn = c.norms(budget);
    let y_alpha = scan_pairs(c.y(), alpha, budget).seminorm;
    let yp_sup = c.y_prime().sup_norm();
    let t_alpha = r.grid().horizon().powf(alpha);
    let cross = rn.x_alpha * cn.remainder_2alpha + rn.s_2alpha * cn.y_prime_alpha;
    let head = y_alpha + yp_sup * rn.s_2alpha;
    Ok(NormBound::new(
        head + sewing_constant(alpha) * t_alpha * cross,
        head + removal_constant(alpha) * t_alpha * cross,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::smooth::{Profile, SmoothFunction};
    use crate::tensor::{BilinMap, LinMap};
    use std::sync::Arc;

    fn line(n: usize, ito: bool) -> Arc<ReducedRoughPath> {
        let g = Arc::new(Grid::uniform(n, 1.0).unwrap());
        let x = GridPath::from_fn(g, |t| Vector::new(vec![t]).unwrap()).unwrap();
        Arc::new(if ito {
            ReducedRoughPath::ito_lift(x, 0.5).unwrap()
        } else {
            ReducedRoughPath::geometric_lift(x, 0.5).unwrap()
        })
    }

    fn circle(n: usize, alpha: f64) -> Arc<ReducedRoughPath> {
        let g = Arc::new(Grid::uniform(n, 2.0 * std::f64::consts::PI).unwrap());
        let x = GridPath::from_fn(g, |t| Vector::new(vec![t.cos(), t.sin()]).unwrap()).unwrap();
        Arc::new(ReducedRoughPath::geometric_lift(x, alpha).unwrap())
    }

    #[test]
    fn zeta_values() {
        assert!((zeta(2.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
        assert!((zeta(1.5) - 2.612_375_348_685_488).abs() < 1e-10);
        assert!((zeta(4.0) - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-12);
    }

    #[test]
    fn germ_examples() {
        let r = line(8, false);
        let zero = ControlledIntegrand::constant(r.clone(), LinMap::zeros(1, 1)).unwrap();
        assert_eq!(germ(&zero, &r, 0, 8).unwrap().value.as_slice(), &[0.0]);

        let id = ControlledIntegrand::driver_identity(r.clone()).unwrap();
        assert!((germ(&id, &r, 0, 8).unwrap().value.as_slice()[0] - 0.5).abs() < 1e-15);

        let ito = line(8, true);
        let id = ControlledIntegrand::driver_identity(ito.clone()).unwrap();
        assert!(germ(&id, &ito, 0, 8).unwrap().value.as_slice()[0].abs() < 1e-15);

        assert!(matches!(germ(&id, &r, 0, 8), Err(crate::error::Error::BaseMismatch)));
    }

    #[test]
    fn integrate_examples() {
        for n in [2, 16, 1024] {
            let r = line(n, false);
            let id = ControlledIntegrand::driver_identity(r.clone()).unwrap();
            let res = integrate(&id, &r).unwrap();
            assert_eq!(res.values.first().as_slice(), &[0.0]);
            assert!((res.values.last().as_slice()[0] - 0.5).abs() <= 1e-14);
            assert_eq!(res.refinement_depth, 0);

            let ito = line(n, true);
            let id = ControlledIntegrand::driver_identity(ito.clone()).unwrap();
            assert!(integrate_values(&id, &ito).unwrap().last().as_slice()[0].abs() <= 1e-14);
        }

        let r = circle(100, 0.45);
        let kappa = LinMap::from_rows(&[vec![2.0, -1.0]]).unwrap();
        let k = ControlledIntegrand::constant(r.clone(), kappa.clone()).unwrap();
        let vals = integrate_values(&k, &r).unwrap();
        for t in [0, 37, 100] {
            let x0t = r.increment(0, t).unwrap();
            let expect = apply_linmap_raw(&kappa, x0t.as_slice());
            assert!((vals.value(t).as_slice()[0] - expect[0]).abs() < 1e-13);
        }
    }

    #[test]
    fn additivity_and_symmetry() {
        let r = circle(512, 0.45);
        let y = ControlledVector::driver(r.clone()).unwrap();
        let f = SmoothFunction::tanh_matrix(2, 2, 3);
        let c = y.compose_integrand(&f).unwrap();
        assert!(c.antisymmetry_defect() > 0.0);
        let vals = integrate_values(&c, &r).unwrap();
        let (j, k) = (100, 400);
        let direct: f64 = (j..k).map(|i| germ_raw(&c, &r, i, i + 1)[0]).sum();
        let inc = vals.value(k).as_slice()[0] - vals.value(j).as_slice()[0];
        assert!((inc - direct).abs() <= 1e-13 * direct.abs().max(1.0));

        let sym = integrate_values(&c.symmetrized(), &r).unwrap();
        assert!(vals.sup_distance(&sym).unwrap() <= 1e-14);
    }

    #[test]
    fn certificate_examples() {
        let r = line(64, false);
        let id = ControlledIntegrand::driver_identity(r.clone()).unwrap();
        let cert = local_error_certificate(&id, &r, 0, 64).unwrap();
        assert!(cert.lhs <= 1e-15 && cert.lhs <= cert.rhs);

        let k = ControlledIntegrand::constant(r.clone(), LinMap::from_rows(&[vec![3.0]]).unwrap()).unwrap();
        let cert = local_error_certificate(&k, &r, 5, 40).unwrap();
        assert!(cert.lhs <= 1e-15);
    }

    #[test]
    fn certificate_slope_on_circle() {
        let r = circle(4096, 0.45);
        let y = ControlledVector::driver(r.clone()).unwrap();
        let f = SmoothFunction::diagonal_field(Profile::Sin, 2);
        let c = y.compose_integrand(&f).unwrap();
        let cert = Certifier::new(&c, &r, PairBudget::Auto).unwrap();
        let rep = cert.sweep(1, 64).unwrap();
        assert!(rep.scales >= 6);
        assert_eq!(rep.violations, 0);
        assert!(rep.slope >= 3.0 * 0.45 - 0.2, "slope {}", rep.slope);
    }

    #[test]
    fn integral_as_controlled_examples() {
        let r = line(64, false);
        let kappa = LinMap::from_rows(&[vec![1.5]]).unwrap();
        let k = ControlledIntegrand::constant(r.clone(), kappa).unwrap();
        let z = integral_as_controlled(&k, &r).unwrap();
        assert!(z.norms(PairBudget::Auto).remainder_2alpha < 1e-14);

        let id = ControlledIntegrand::driver_identity(r.clone()).unwrap();
        let z = integral_as_controlled(&id, &r).unwrap();
        for (i, j) in [(0, 64), (10, 50)] {
            let (s, t) = (r.grid().t(i), r.grid().t(j));
            assert!((z.y().value(j).as_slice()[0] - 0.5 * t * t).abs() < 1e-14);
            assert!((z.remainder(i, j).unwrap().as_slice()[0] - 0.5 * (t - s).powi(2)).abs() < 1e-14);
        }
        let n = z.norms(PairBudget::Auto);
        assert!((n.y_prime_alpha - 1.0).abs() < 1e-14);
        assert!((n.remainder_2alpha - 0.5).abs() < 1e-14);

        let b = integral_norm_bound(&id, &r, PairBudget::Auto).unwrap();
        assert!((b.closed_form - 1.5).abs() < 1e-14);
        assert!(b.bound >= n.seminorm - 1e-14);

        let b = integral_norm_bound(&k, &r, PairBudget::Auto).unwrap();
        assert!(b.bound >= 0.0);
    }

    #[test]
    fn non_symmetric_part_is_invisible_to_integral() {
        let r = circle(64, 0.4);
        let y = ControlledIntegrand::driver_identity(r.clone()).unwrap();
        let mut skew = BilinMap::zeros(1, 2);
        skew.set(0, 0, 1, 1.0);
        skew.set(0, 1, 0, -1.0);
        let yp: Vec<BilinMap> = y.y_prime().values().iter().map(|b| b.sum(&skew)).collect();
        let twisted = ControlledPath::from_parts(r.clone(), y.y().values().to_vec(), yp).unwrap();
        let a = integrate_values(&y, &r).unwrap();
        let b = integrate_values(&twisted, &r).unwrap();
        assert!(a.sup_distance(&b).unwrap() <= 1e-14);
    }
}
