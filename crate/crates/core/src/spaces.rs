//! Finite-dimensional real normed spaces from the `lp` family.
//!
//! Everything geometric flows from [`Space`]: norm evaluation, the one-sided
//! derivatives of `t -> ||x + t y||` at `t = 0`, the extreme points of the
//! supporting-functional set `J(x)`, and seeded sampling of the unit sphere.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Coordinates below this fraction of `||x||_inf` count as zero in the
/// piecewise L1 / Linf formulas.
pub const ZERO_COORD_REL: f64 = 1e-12;

/// Maximum number of zero coordinates whose sign completions
/// [`support_extremes`] enumerates for an L1 base point (2^10 functionals).
pub const L1_SUPPORT_CAP: usize = 10;

/// Norm descriptor. Text form: `lp:<p>` or `linf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Norm {
    Lp(f64),
    Linf,
}

impl Norm {
    pub const L1: Norm = Norm::Lp(1.0);
    pub const L2: Norm = Norm::Lp(2.0);

    pub fn lp(p: f64) -> Result<Norm> {
        if p.is_finite() && p >= 1.0 {
            Ok(Norm::Lp(p))
        } else {
            Err(Error::InvalidNorm(format!("lp:{p}")))
        }
    }

    /// Norm of the dual space: `Lp <-> Lq` with `1/p + 1/q = 1`, `L1 <-> Linf`.
    pub fn dual(self) -> Norm {
        match self {
            Norm::Linf => Norm::L1,
            Norm::Lp(p) if p == 1.0 => Norm::Linf,
            Norm::Lp(p) => Norm::Lp(p / (p - 1.0)),
        }
    }

    pub fn is_l1(self) -> bool {
        matches!(self, Norm::Lp(p) if p == 1.0)
    }

    pub fn is_euclidean(self) -> bool {
        matches!(self, Norm::Lp(p) if p == 2.0)
    }

    /// Smooth off the origin (unique supporting functional everywhere).
    pub fn is_smooth(self) -> bool {
        matches!(self, Norm::Lp(p) if p > 1.0)
    }

    /// Strictly convex unit ball. In this family it coincides with smoothness.
    pub fn is_strictly_convex(self) -> bool {
        self.is_smooth()
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::Lp(p) => write!(f, "lp:{p}"),
            Norm::Linf => f.write_str("linf"),
        }
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Norm> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("linf") || s.eq_ignore_ascii_case("lp:inf") {
            return Ok(Norm::Linf);
        }
        let p = s
            .strip_prefix("lp:")
            .and_then(|p| p.parse::<f64>().ok())
            .ok_or_else(|| Error::InvalidNorm(s.to_string()))?;
        Norm::lp(p).map_err(|_| Error::InvalidNorm(s.to_string()))
    }
}

impl Serialize for Norm {
    fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Norm {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `(R^dim, norm)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Space {
    pub dim: usize,
    pub norm: Norm,
}

impl Space {
    pub fn new(dim: usize, norm: Norm) -> Result<Space> {
        if dim == 0 {
            return Err(Error::InvalidSpace("dimension must be positive".into()));
        }
        if let Norm::Lp(p) = norm {
            Norm::lp(p)?;
        }
        Ok(Space { dim, norm })
    }

    pub fn lp(dim: usize, p: f64) -> Result<Space> {
        Space::new(dim, Norm::lp(p)?)
    }

    pub fn linf(dim: usize) -> Result<Space> {
        Space::new(dim, Norm::Linf)
    }

    pub fn dual(&self) -> Space {
        Space { dim: self.dim, norm: self.norm.dual() }
    }

    pub(crate) fn check(&self, other: &Space) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        if self.norm != other.norm {
            return Err(Error::SpaceMismatch { left: self.norm.to_string(), right: other.norm.to_string() });
        }
        Ok(())
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.norm, self.dim)
    }
}

/// Element of a [`Space`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vector<S> {
    coords: Vec<S>,
    space: Space,
}

impl<S: Scalar> Vector<S> {
    pub fn new(space: Space, coords: Vec<S>) -> Result<Self> {
        if coords.len() != space.dim {
            return Err(Error::DimensionMismatch { expected: space.dim, found: coords.len() });
        }
        Ok(Vector { coords, space })
    }

    pub fn from_f64(space: Space, coords: &[f64]) -> Result<Self> {
        Vector::new(space, coords.iter().map(|&c| S::lit(c)).collect())
    }

    pub fn zeros(space: Space) -> Self {
        Vector { coords: vec![S::zero(); space.dim], space }
    }

    pub fn basis(space: Space, index: usize) -> Self {
        let mut v = Vector::zeros(space);
        v.coords[index] = S::one();
        v
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> S {
        raw_norm(&self.coords, self.space.norm)
    }

    pub fn max_abs(&self) -> S {
        max_abs(&self.coords)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, alpha: S) -> Self {
        Vector { coords: self.coords.iter().map(|&c| c * alpha).collect(), space: self.space }
    }

    /// `self + alpha * other`.
    pub fn plus_scaled(&self, alpha: S, other: &Self) -> Result<Self> {
        self.space.check(&other.space)?;
        Ok(Vector {
            coords: self.coords.iter().zip(&other.coords).map(|(&a, &b)| a + alpha * b).collect(),
            space: self.space,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.plus_scaled(S::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.plus_scaled(-S::one(), other)
    }

    pub fn neg(&self) -> Self {
        self.scale(-S::one())
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale(n.recip()))
    }

    /// Coordinate (Euclidean) dot product, independent of the space's norm.
    pub fn dot(&self, other: &Self) -> S {
        self.coords.iter().zip(&other.coords).map(|(&a, &b)| a * b).sum()
    }

    pub fn euclidean_distance(&self, other: &Self) -> S {
        self.coords.iter().zip(&other.coords).map(|(&a, &b)| (a - b) * (a - b)).sum::<S>().sqrt()
    }

    /// Reinterprets the coordinates in another space of the same dimension.
    pub fn in_space(&self, space: Space) -> Result<Self> {
        Vector::new(space, self.coords.clone())
    }
}

/// Linear functional on a [`Space`]; its norm is the dual norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Functional<S> {
    coords: Vec<S>,
    predual: Space,
}

impl<S: Scalar> Functional<S> {
    pub fn new(predual: Space, coords: Vec<S>) -> Result<Self> {
        if coords.len() != predual.dim {
            return Err(Error::DimensionMismatch { expected: predual.dim, found: coords.len() });
        }
        Ok(Functional { coords, predual })
    }

    pub fn from_f64(predual: Space, coords: &[f64]) -> Result<Self> {
        Functional::new(predual, coords.iter().map(|&c| S::lit(c)).collect())
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn predual(&self) -> Space {
        self.predual
    }

    pub fn dual_norm(&self) -> S {
        raw_norm(&self.coords, self.predual.norm.dual())
    }

    pub fn apply(&self, x: &Vector<S>) -> Result<S> {
        self.predual.check(&x.space)?;
        Ok(self.apply_unchecked(x.coords()))
    }

    pub(crate) fn apply_unchecked(&self, x: &[S]) -> S {
        self.coords.iter().zip(x).map(|(&a, &b)| a * b).sum()
    }

    /// The functional viewed as a vector of the dual space.
    pub fn as_dual_vector(&self) -> Vector<S> {
        Vector { coords: self.coords.clone(), space: self.predual.dual() }
    }

    pub fn scale(&self, alpha: S) -> Self {
        Functional { coords: self.coords.iter().map(|&c| c * alpha).collect(), predual: self.predual }
    }
}

/// One-sided derivatives of `t -> ||x + t y||` at `t = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativePair<S> {
    pub left: S,
    pub right: S,
}

pub(crate) fn max_abs<S: Scalar>(coords: &[S]) -> S {
    coords.iter().fold(S::zero(), |m, c| m.max(c.abs()))
}

pub(crate) fn raw_norm<S: Scalar>(coords: &[S], norm: Norm) -> S {
    match norm {
        Norm::Linf => max_abs(coords),
        Norm::Lp(p) if p == 1.0 => coords.iter().map(|c| c.abs()).sum(),
        Norm::Lp(p) => {
            let m = max_abs(coords);
            if m.is_zero() {
                return S::zero();
            }
            if p == 2.0 {
                let s: S = coords.iter().map(|&c| (c / m) * (c / m)).sum();
                return m * s.sqrt();
            }
            let pp = S::lit(p);
            let s: S = coords.iter().map(|&c| (c.abs() / m).powf(pp)).sum();
            m * s.powf(pp.recip())
        }
    }
}

/// `||v||` under the norm of `space`.
pub fn norm_eval<S: Scalar>(space: &Space, v: &Vector<S>) -> Result<S> {
    space.check(&v.space)?;
    Ok(v.norm())
}

/// Closed-form one-sided derivatives `(rho'_-(x,y), rho'_+(x,y))`.
pub fn one_sided_derivatives<S: Scalar>(x: &Vector<S>, y: &Vector<S>) -> Result<DerivativePair<S>> {
    x.space.check(&y.space)?;
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    let xs = x.coords();
    let ys = y.coords();
    let pair = match x.space.norm {
        Norm::Linf => {
            let m = x.max_abs();
            let cut = m - S::lit(ZERO_COORD_REL) * m;
            let mut left = S::infinity();
            let mut right = S::neg_infinity();
            for (&xi, &yi) in xs.iter().zip(ys) {
                if xi.abs() >= cut {
                    let d = xi.sgn() * yi;
                    left = left.min(d);
                    right = right.max(d);
                }
            }
            DerivativePair { left, right }
        }
        Norm::Lp(p) if p == 1.0 => {
            let cut = S::lit(ZERO_COORD_REL) * x.max_abs();
            let mut smooth = S::zero();
            let mut kink = S::zero();
            for (&xi, &yi) in xs.iter().zip(ys) {
                if xi.abs() > cut {
                    smooth = smooth + xi.sgn() * yi;
                } else {
                    kink = kink + yi.abs();
                }
            }
            DerivativePair { left: smooth - kink, right: smooth + kink }
        }
        Norm::Lp(p) => {
            let n = x.norm();
            let e = S::lit(p - 1.0);
            let d: S = xs.iter().zip(ys).map(|(&xi, &yi)| (xi.abs() / n).powf(e) * xi.sgn() * yi).sum();
            DerivativePair { left: d, right: d }
        }
    };
    Ok(pair)
}

/// Difference-quotient estimate of the one-sided derivatives, steps
/// `1e-4, 5e-5, 2.5e-5` with one Richardson step. Cross-check only.
pub fn numeric_derivatives<S: Scalar>(x: &Vector<S>, y: &Vector<S>) -> Result<DerivativePair<S>> {
    x.space.check(&y.space)?;
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    let base = x.norm();
    let quotient = |t: f64| -> Result<S> {
        let t = S::lit(t);
        Ok((x.plus_scaled(t, y)?.norm() - base) / t)
    };
    let two = S::lit(2.0);
    let steps = [1e-4, 5e-5, 2.5e-5];
    let right: Vec<S> = steps.iter().map(|&t| quotient(t)).collect::<Result<_>>()?;
    let left: Vec<S> = steps.iter().map(|&t| quotient(-t)).collect::<Result<_>>()?;
    Ok(DerivativePair {
        left: two * left[2] - left[1],
        right: two * right[2] - right[1],
    })
}

/// Extreme points of `J(x) = { f : ||f||_* = 1, f(x) = ||x|| }`.
///
/// Smooth `Lp`: the single normalized duality map. `Linf`: `sgn(x_i) e_i` for
/// every maximal coordinate. `L1`: `sgn(x)` completed by every sign pattern on
/// the zero coordinates, `+1` before `-1` in binary order.
pub fn support_extremes<S: Scalar>(x: &Vector<S>) -> Result<Vec<Functional<S>>> {
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    let space = x.space;
    let xs = x.coords();
    let m = x.max_abs();
    match space.norm {
        Norm::Linf => {
            let cut = m - S::lit(ZERO_COORD_REL) * m;
            Ok(xs
                .iter()
                .enumerate()
                .filter(|(_, xi)| xi.abs() >= cut)
                .map(|(i, &xi)| {
                    let mut c = vec![S::zero(); space.dim];
                    c[i] = xi.sgn();
                    Functional { coords: c, predual: space }
                })
                .collect())
        }
        Norm::Lp(p) if p == 1.0 => {
            let cut = S::lit(ZERO_COORD_REL) * m;
            let zeros: Vec<usize> = (0..xs.len()).filter(|&i| xs[i].abs() <= cut).collect();
            if zeros.len() > L1_SUPPORT_CAP {
                return Err(Error::SupportOverflow { zeros: zeros.len(), cap: L1_SUPPORT_CAP });
            }
            let base: Vec<S> = xs.iter().map(|&xi| if xi.abs() > cut { xi.sgn() } else { S::zero() }).collect();
            Ok((0..1usize << zeros.len())
                .map(|mask| {
                    let mut c = base.clone();
                    for (bit, &i) in zeros.iter().enumerate() {
                        c[i] = if mask & (1 << bit) == 0 { S::one() } else { -S::one() };
                    }
                    Functional { coords: c, predual: space }
                })
                .collect())
        }
        Norm::Lp(p) => {
            let n = x.norm();
            let e = S::lit(p - 1.0);
            let c = xs.iter().map(|&xi| xi.sgn() * (xi.abs() / n).powf(e)).collect();
            Ok(vec![Functional { coords: c, predual: space }])
        }
    }
}

/// Unit vector from a Gaussian direction, normalized in `space`.
pub fn random_unit<S: Scalar, R: Rng + ?Sized>(rng: &mut R, space: Space) -> Vector<S> {
    loop {
        let coords: Vec<S> = (0..space.dim).map(|_| S::lit(rng.sample::<f64, _>(StandardNormal))).collect();
        let v = Vector { coords, space };
        if let Ok(u) = v.normalized() {
            return u;
        }
    }
}

/// `count` seeded pseudo-random unit vectors of `space`.
pub fn sphere_sample<S: Scalar>(space: Space, count: usize, seed: u64) -> Vec<Vector<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_unit(&mut rng, space)).collect()
}
