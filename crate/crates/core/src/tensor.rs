//! Dense coordinate algebra for step-2 objects.
//!
//! Everything is a row-major `f64` buffer with a fixed shape. Norms are
//! Euclidean on vectors and Frobenius on every higher-order tensor, so a
//! single `norm` on the flat buffer serves all kinds.

use crate::error::{Error, Result};
use std::ops::{Add, Mul, Neg, Sub};

/// Common behaviour of every tensor kind stored along a path.
pub trait Tensorial: Clone + PartialEq + std::fmt::Debug + Send + Sync + 'static {
    fn data(&self) -> &[f64];
    fn data_mut(&mut self) -> &mut [f64];
    fn shape(&self) -> Vec<usize>;

    /// Same shape, all zeros.
    fn zeros_like(&self) -> Self;

    fn norm(&self) -> f64 {
        l2(self.data())
    }

    fn is_finite(&self) -> bool {
        self.data().iter().all(|x| x.is_finite())
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.data().len() == other.data().len() && self.shape() == other.shape()
    }

    fn combine(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert!(self.same_shape(other));
        let mut out = self.clone();
        for (o, b) in out.data_mut().iter_mut().zip(other.data()) {
            *o = f(*o, *b);
        }
        out
    }

    fn diff(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    fn sum(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.data_mut().iter_mut().for_each(|x| *x *= c);
        out
    }

    /// Euclidean/Frobenius norm of `self - other` without allocating.
    fn dist(&self, other: &Self) -> f64 {
        self.data()
            .iter()
            .zip(other.data())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn l2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn ensure_finite(data: &[f64], what: &str) -> Result<()> {
    if data.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteOutput(what.to_string()))
    }
}

macro_rules! impl_arith {
    ($t:ty) => {
        impl Add for &$t {
            type Output = $t;
            fn add(self, rhs: &$t) -> $t {
                self.sum(rhs)
            }
        }
        impl Sub for &$t {
            type Output = $t;
            fn sub(self, rhs: &$t) -> $t {
                self.diff(rhs)
            }
        }
        impl Mul<f64> for &$t {
            type Output = $t;
            fn mul(self, rhs: f64) -> $t {
                self.scaled(rhs)
            }
        }
        impl Neg for &$t {
            type Output = $t;
            fn neg(self) -> $t {
                self.scaled(-1.0)
            }
        }
    };
}

/// Element of V or W.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        ensure_finite(&entries, "vector entry")?;
        Ok(Self(entries))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        Self(entries)
    }
}

impl From<&[f64]> for Vector {
    fn from(v: &[f64]) -> Self {
        Self(v.to_vec())
    }
}

impl Tensorial for Vector {
    fn data(&self) -> &[f64] {
        &self.0
    }
    fn data_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
    fn shape(&self) -> Vec<usize> {
        vec![self.0.len()]
    }
    fn zeros_like(&self) -> Self {
        Self::zeros(self.0.len())
    }
}
impl_arith!(Vector);

/// Element of V ⊗ V as a d×d matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor2 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor2 {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        ensure_finite(&data, "tensor entry")?;
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::new(dim, data)
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j];
            }
        }
        Self { dim: d, data }
    }
}

impl Tensorial for Tensor2 {
    fn data(&self) -> &[f64] {
        &self.data
    }
    fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
    fn shape(&self) -> Vec<usize> {
        vec![self.dim, self.dim]
    }
    fn zeros_like(&self) -> Self {
        Self::zeros(self.dim)
    }
}
impl_arith!(Tensor2);

/// Element of Sym(V ⊗ V), stored as a full d×d matrix that is exactly symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor2 {
    dim: usize,
    data: Vec<f64>,
}

impl SymTensor2 {
    /// Accepts only exactly symmetric input.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        let t = Tensor2::new(dim, data)?;
        let defect = antisymmetric_defect(&t);
        if defect != 0.0 {
            return Err(Error::NotSymmetric(defect));
        }
        Ok(Self { dim, data: t.data })
    }

    /// Accepts input whose antisymmetric part is within `tol` (relative to
    /// the entry size), then stores the exact symmetrization.
    pub fn from_rows_tol(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        let t = Tensor2::from_rows(rows)?;
        let d = t.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in (i + 1)..d {
                let (a, b) = (t.get(i, j), t.get(j, i));
                let scale = a.abs().max(b.abs()).max(1.0);
                worst = worst.max((a - b).abs() / scale);
            }
        }
        if worst > tol {
            return Err(Error::NotSymmetric(worst));
        }
        Ok(symmetrize(&t))
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut s = Self::zeros(dim);
        for i in 0..dim {
            s.data[i * dim + i] = 1.0;
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn as_tensor(&self) -> Tensor2 {
        Tensor2 { dim: self.dim, data: self.data.clone() }
    }

    /// `self + other + sym_outer(u, v)` in one pass; keeps exact symmetry.
    pub(crate) fn chen_step(&self, other: &SymTensor2, u: &[f64], v: &[f64]) -> SymTensor2 {
        let d = self.dim;
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            for j in i..d {
                let cross = 0.5 * (u[i] * v[j] + u[j] * v[i]);
                let x = self.data[i * d + j] + other.data[i * d + j] + cross;
                data[i * d + j] = x;
                data[j * d + i] = x;
            }
        }
        SymTensor2 { dim: d, data }
    }
}

impl Tensorial for SymTensor2 {
    fn data(&self) -> &[f64] {
        &self.data
    }
    fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
    fn shape(&self) -> Vec<usize> {
        vec![self.dim, self.dim]
    }
    fn zeros_like(&self) -> Self {
        Self::zeros(self.dim)
    }
}
impl_arith!(SymTensor2);

/// Element of L(V, W): `rows = dim W`, `cols = dim V`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinMap {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl LinMap {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        ensure_finite(&data, "linear map entry")?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        Self::new(r, c, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        if self.cols == 0 {
            return vec![Vec::new(); self.rows];
        }
        self.data.chunks(self.cols).map(|r| r.to_vec()).collect()
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &LinMap) -> Result<LinMap> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        let mut out = vec![0.0; self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(LinMap::from_raw(self.rows, rhs.cols, out))
    }

    /// Spectral norm via power iteration on AᵀA.
    pub fn operator_norm(&self) -> f64 {
        if self.data.iter().all(|&x| x == 0.0) {
            return 0.0;
        }
        let mut v = vec![1.0 / (self.cols as f64).sqrt(); self.cols];
        let mut sigma = 0.0;
        for _ in 0..500 {
            let av: Vec<f64> = (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
                .collect();
            let mut atav: Vec<f64> = (0..self.cols)
                .map(|j| (0..self.rows).map(|i| self.get(i, j) * av[i]).sum())
                .collect();
            let n = l2(&atav);
            if n == 0.0 {
                return l2(&av);
            }
            atav.iter_mut().for_each(|x| *x /= n);
            let next = n.sqrt();
            let done = (next - sigma).abs() <= 1e-15 * next;
            sigma = next;
            v = atav;
            if done {
                break;
            }
        }
        // Power iteration converges from below; never report less than the row norms allow.
        sigma.max(self.to_rows().iter().map(|r| l2(r)).fold(0.0, f64::max))
    }
}

impl Tensorial for LinMap {
    fn data(&self) -> &[f64] {
        &self.data
    }
    fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
    fn shape(&self) -> Vec<usize> {
        vec![self.rows, self.cols]
    }
    fn zeros_like(&self) -> Self {
        Self::zeros(self.rows, self.cols)
    }
}
impl_arith!(LinMap);

/// Element of L(V ⊗ V, W) ≅ L(V, L(V, W)), indexed `[k][i][j]` with `k` the
/// output coordinate. Acting on a vector `u` fills the first slot:
/// `(b u)[k][j] = Σ_i b[k][i][j] u[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BilinMap {
    rows: usize,
    dim: usize,
    data: Vec<f64>,
}

impl BilinMap {
    pub fn new(rows: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * dim * dim {
            return Err(Error::DimensionMismatch { expected: rows * dim * dim, found: data.len() });
        }
        ensure_finite(&data, "bilinear map entry")?;
        Ok(Self { rows, dim, data })
    }

    pub fn zeros(rows: usize, dim: usize) -> Self {
        Self { rows, dim, data: vec![0.0; rows * dim * dim] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, value: f64) {
        let d = self.dim;
        self.data[(k * d + i) * d + j] = value;
    }

    /// Symmetrization in the last two indices.
    pub fn symmetrized(&self) -> BilinMap {
        let d = self.dim;
        let mut out = self.clone();
        for k in 0..self.rows {
            for i in 0..d {
                for j in i..d {
                    let s = 0.5 * (self.get(k, i, j) + self.get(k, j, i));
                    out.set(k, i, j, s);
                    out.set(k, j, i, s);
                }
            }
        }
        out
    }

    /// Frobenius norm of the antisymmetric part in the last two indices.
    pub fn antisymmetry_defect(&self) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for k in 0..self.rows {
            for i in 0..d {
                for j in 0..d {
                    let a = 0.5 * (self.get(k, i, j) - self.get(k, j, i));
                    acc += a * a;
                }
            }
        }
        acc.sqrt()
    }
}

impl Tensorial for BilinMap {
    fn data(&self) -> &[f64] {
        &self.data
    }
    fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
    fn shape(&self) -> Vec<usize> {
        vec![self.rows, self.dim, self.dim]
    }
    fn zeros_like(&self) -> Self {
        Self::zeros(self.rows, self.dim)
    }
}
impl_arith!(BilinMap);

fn antisymmetric_defect(t: &Tensor2) -> f64 {
    let d = t.dim;
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            worst = worst.max((t.get(i, j) - t.get(j, i)).abs());
        }
    }
    worst
}

/// ½(T + Tᵀ).
pub fn symmetrize(t: &Tensor2) -> SymTensor2 {
    let d = t.dim;
    let mut data = vec![0.0; d * d];
    for i in 0..d {
        data[i * d + i] = t.get(i, i);
        for j in (i + 1)..d {
            let s = 0.5 * (t.get(i, j) + t.get(j, i));
            data[i * d + j] = s;
            data[j * d + i] = s;
        }
    }
    SymTensor2 { dim: d, data }
}

pub fn outer(u: &Vector, v: &Vector) -> Result<Tensor2> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: v.dim() });
    }
    let d = u.dim();
    let mut data = Vec::with_capacity(d * d);
    for a in u.as_slice() {
        for b in v.as_slice() {
            data.push(a * b);
        }
    }
    Ok(Tensor2 { dim: d, data })
}

/// Sym(u ⊗ v).
pub fn sym_outer(u: &Vector, v: &Vector) -> Result<SymTensor2> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: v.dim() });
    }
    Ok(sym_outer_raw(u.as_slice(), v.as_slice()))
}

pub(crate) fn sym_outer_raw(u: &[f64], v: &[f64]) -> SymTensor2 {
    let d = u.len();
    let mut data = vec![0.0; d * d];
    for i in 0..d {
        for j in i..d {
            let s = 0.5 * (u[i] * v[j] + u[j] * v[i]);
            data[i * d + j] = s;
            data[j * d + i] = s;
        }
    }
    SymTensor2 { dim: d, data }
}

/// `Σ_{i,j} b[k][i][j] s[i][j]` for each output coordinate `k`.
pub fn pair_bilinear(b: &BilinMap, s: &SymTensor2) -> Result<Vector> {
    if b.dim != s.dim {
        return Err(Error::DimensionMismatch { expected: b.dim, found: s.dim });
    }
    Ok(Vector(pair_bilinear_raw(b, s.data())))
}

pub(crate) fn pair_bilinear_raw(b: &BilinMap, s: &[f64]) -> Vec<f64> {
    let dd = b.dim * b.dim;
    (0..b.rows)
        .map(|k| b.data[k * dd..(k + 1) * dd].iter().zip(s).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn apply_linmap(a: &LinMap, v: &Vector) -> Result<Vector> {
    if a.cols != v.dim() {
        return Err(Error::DimensionMismatch { expected: a.cols, found: v.dim() });
    }
    Ok(Vector(apply_linmap_raw(a, v.as_slice())))
}

pub(crate) fn apply_linmap_raw(a: &LinMap, v: &[f64]) -> Vec<f64> {
    a.data.chunks(a.cols.max(1)).take(a.rows).map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Feeds `u` into the first slot of `b`, giving an element of L(V, W).
pub fn apply_bilinear_first(b: &BilinMap, u: &Vector) -> Result<LinMap> {
    if b.dim != u.dim() {
        return Err(Error::DimensionMismatch { expected: b.dim, found: u.dim() });
    }
    Ok(apply_bilinear_first_raw(b, u.as_slice()))
}

pub(crate) fn apply_bilinear_first_raw(b: &BilinMap, u: &[f64]) -> LinMap {
    let d = b.dim;
    let mut out = vec![0.0; b.rows * d];
    for k in 0..b.rows {
        for i in 0..d {
            let ui = u[i];
            if ui == 0.0 {
                continue;
            }
            for j in 0..d {
                out[k * d + j] += b.get(k, i, j) * ui;
            }
        }
    }
    LinMap::from_raw(b.rows, d, out)
}
