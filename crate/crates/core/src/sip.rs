//! Semi-inner products and the `x+` / `x-` direction classes.
//!
//! A semi-inner product compatible with the norm is a choice `v -> f_v` of
//! one supporting functional per point, extended homogeneously, with
//! `[u, v] = ||v|| f_{v/||v||}(u)`. Selections are represented by indices
//! into [`support_extremes`]; suprema of `f -> f(y)` over the whole
//! supporting set are attained at its extreme points, so nothing is lost by
//! restricting to them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::search::golden_section;
use crate::spaces::{one_sided_derivatives, support_extremes, Vector};

/// Absolute tolerance on derivative signs, for unit-normalized base points.
pub const DIRECTION_TOL: f64 = 1e-9;

/// Grid size for [`direction_class_eps_search`].
pub const EPS_SEARCH_GRID: usize = 1 << 12;

/// Which supporting functional the semi-inner product picks at the base point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SipSelector {
    /// The unique functional at smooth points, the first extreme one otherwise.
    CanonicalSmooth,
    ExtremeIndex(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionClass {
    pub in_plus: bool,
    pub in_minus: bool,
}

impl DirectionClass {
    /// Both classes at once is exactly Birkhoff-James orthogonality.
    pub fn is_orthogonal(&self) -> bool {
        self.in_plus && self.in_minus
    }
}

/// `[y, x]` for the selected semi-inner product. `[y, 0] = 0`.
pub fn sip_eval<S: Scalar>(y: &Vector<S>, x: &Vector<S>, sel: SipSelector) -> Result<S> {
    y.space().check(&x.space())?;
    if x.is_zero() {
        return Ok(S::zero());
    }
    let extremes = support_extremes(x)?;
    let index = match sel {
        SipSelector::CanonicalSmooth => 0,
        SipSelector::ExtremeIndex(k) => k,
    };
    let f = extremes.get(index).ok_or(Error::InvalidSelector { index, len: extremes.len() })?;
    Ok(x.norm() * f.apply_unchecked(y.coords()))
}

/// Range of `[y, x]` over every compatible semi-inner product (the extreme
/// supporting functionals at `x`), as `(min, max)`.
pub fn sip_range<S: Scalar>(y: &Vector<S>, x: &Vector<S>) -> Result<(S, S)> {
    y.space().check(&x.space())?;
    let n = x.norm();
    let extremes = support_extremes(x)?;
    Ok(extremes.iter().fold((S::infinity(), S::neg_infinity()), |(lo, hi), f| {
        let v = n * f.apply_unchecked(y.coords());
        (lo.min(v), hi.max(v))
    }))
}

/// Membership of `y` in `x+` and `x-` from the signs of the one-sided
/// derivatives of `t -> ||x + t y||` at zero.
pub fn direction_class<S: Scalar>(x: &Vector<S>, y: &Vector<S>) -> Result<DirectionClass> {
    let d = one_sided_derivatives(x, y)?;
    let tol = S::lit(DIRECTION_TOL);
    Ok(DirectionClass { in_plus: d.right >= -tol, in_minus: d.left <= tol })
}

fn check_eps(eps: f64) -> Result<()> {
    if (0.0..1.0).contains(&eps) {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange(eps))
    }
}

/// Relaxed membership `y in x^{+eps}`: `||x + l y||^2 >= ||x||^2 - 2 eps ||x|| ||l y||`
/// for every `l >= 0` (and `l <= 0` for `x^{-eps}`).
///
/// The left side minus the right is convex in `l` and vanishes at zero, so
/// the condition holds on the whole half line exactly when its one-sided
/// slope at zero is nonnegative: `rho'_+(x, y) >= -eps ||y||`, and
/// `rho'_-(x, y) <= eps ||y||` for the minus side.
pub fn direction_class_eps<S: Scalar>(x: &Vector<S>, y: &Vector<S>, eps: f64) -> Result<DirectionClass> {
    check_eps(eps)?;
    let d = one_sided_derivatives(x, y)?;
    let slack = S::lit(eps) * y.norm() + S::lit(DIRECTION_TOL);
    Ok(DirectionClass { in_plus: d.right >= -slack, in_minus: d.left <= slack })
}

/// [`direction_class_eps`] decided by direct search over `l`: bracket by
/// doubling from `[0, 1]` until the relaxed gap grows, a `2^12`-point grid,
/// then golden-section refinement around the best grid point.
pub fn direction_class_eps_search<S: Scalar>(x: &Vector<S>, y: &Vector<S>, eps: f64) -> Result<DirectionClass> {
    check_eps(eps)?;
    x.space().check(&y.space())?;
    let x = x.normalized()?;
    if y.is_zero() {
        return Ok(DirectionClass { in_plus: true, in_minus: true });
    }
    let in_plus = relaxed_gap_min(&x, y, eps)? >= -S::lit(1e-12);
    let in_minus = relaxed_gap_min(&x, &y.neg(), eps)? >= -S::lit(1e-12);
    Ok(DirectionClass { in_plus, in_minus })
}

/// `min_{l >= 0} ||x + l y||^2 - ||x||^2 + 2 eps ||x|| ||y|| l` for unit `x`.
fn relaxed_gap_min<S: Scalar>(x: &Vector<S>, y: &Vector<S>, eps: f64) -> Result<S> {
    let slope = S::lit(2.0 * eps) * y.norm();
    let gap = |l: S| -> S {
        let v = x.plus_scaled(l, y).expect("same space").norm();
        v * v - S::one() + slope * l
    };
    let mut reach = S::one();
    for _ in 0..80 {
        if gap(reach) > gap(reach / S::lit(2.0)) {
            break;
        }
        reach = reach + reach;
    }
    let h = reach / S::lit(EPS_SEARCH_GRID as f64);
    let (mut best_k, mut best) = (0usize, S::zero());
    for k in 1..=EPS_SEARCH_GRID {
        let v = gap(h * S::lit(k as f64));
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let lo = h * S::lit(best_k.saturating_sub(1) as f64);
    let hi = h * S::lit((best_k + 1) as f64);
    let refined = golden_section(gap, lo, hi, h * S::lit(1e-9));
    Ok(best.min(refined.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{random_unit, Space};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(space: Space, c: &[f64]) -> Vector<f64> {
        Vector::from_f64(space, c).unwrap()
    }

    #[test]
    fn euclidean_sip_is_dot_product() {
        let space = Space::lp(3, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = random_unit::<f64, _>(&mut rng, space).scale(2.5);
            let y = random_unit::<f64, _>(&mut rng, space).scale(0.7);
            assert_relative_eq!(sip_eval(&y, &x, SipSelector::CanonicalSmooth).unwrap(), y.dot(&x), epsilon = 1e-12);
        }
    }

    #[test]
    fn sip_is_compatible_with_norm() {
        for space in [Space::lp(3, 1.0), Space::lp(3, 3.0), Space::linf(3)] {
            let space = space.unwrap();
            let x = v(space, &[0.5, -2.0, 1.0]);
            let n = x.norm();
            let k = support_extremes(&x).unwrap().len();
            for i in 0..k {
                assert_relative_eq!(sip_eval(&x, &x, SipSelector::ExtremeIndex(i)).unwrap(), n * n, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn smooth_lp_sip_example() {
        let l3 = Space::lp(2, 3.0).unwrap();
        let (x, y) = (v(l3, &[1.0, 1.0]), v(l3, &[1.0, 0.0]));
        let value = sip_eval(&y, &x, SipSelector::CanonicalSmooth).unwrap();
        assert_relative_eq!(value, 2f64.powf(-1.0 / 3.0), epsilon = 1e-14);
        // derivative route: rho' * ||x|| from difference quotients
        let h = 1e-6;
        let n = |t: f64| x.plus_scaled(t, &y).unwrap().norm();
        let rho = (n(h) - n(-h)) / (2.0 * h);
        assert_relative_eq!(rho * x.norm(), value, epsilon = 1e-8);
    }

    #[test]
    fn selector_errors_and_zero_base() {
        let l2 = Space::lp(2, 2.0).unwrap();
        let y = v(l2, &[1.0, 2.0]);
        assert_eq!(sip_eval(&y, &Vector::zeros(l2), SipSelector::CanonicalSmooth).unwrap(), 0.0);
        assert_eq!(
            sip_eval(&y, &v(l2, &[1.0, 0.0]), SipSelector::ExtremeIndex(1)),
            Err(Error::InvalidSelector { index: 1, len: 1 })
        );
    }

    #[test]
    fn direction_class_examples() {
        for space in [Space::lp(2, 1.0), Space::lp(2, 2.0), Space::linf(2)] {
            let space = space.unwrap();
            let x = v(space, &[0.3, -1.0]);
            assert_eq!(direction_class(&x, &x).unwrap(), DirectionClass { in_plus: true, in_minus: false });
        }
        let l2 = Space::lp(2, 2.0).unwrap();
        assert!(direction_class(&v(l2, &[1.0, 0.0]), &v(l2, &[0.0, 1.0])).unwrap().is_orthogonal());
        let linf = Space::linf(2).unwrap();
        assert!(direction_class(&v(linf, &[1.0, 1.0]), &v(linf, &[1.0, -1.0])).unwrap().is_orthogonal());
        // grid oracle for the Linf example: min over [-4, 4] is 1, at 0
        let min = (0..=8000)
            .map(|k| -4.0 + k as f64 * 1e-3)
            .map(|l| (1.0 + l).abs().max((1.0 - l).abs()))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(min, 1.0);
    }

    #[test]
    fn eps_relaxation_example() {
        let l2 = Space::lp(2, 2.0).unwrap();
        let (x, y) = (v(l2, &[1.0, 0.0]), v(l2, &[-0.1, 1.0]));
        assert!(!direction_class(&x, &y).unwrap().in_plus);
        assert!(direction_class_eps(&x, &y, 0.2).unwrap().in_plus);
        assert!(direction_class_eps_search(&x, &y, 0.2).unwrap().in_plus);
        // dense grid oracle of the relaxed inequality
        let ny = y.norm();
        let ok = (0..=100_000).map(|k| k as f64 * 1e-4).all(|l| {
            let v = x.plus_scaled(l, &y).unwrap().norm();
            v * v >= 1.0 - 2.0 * 0.2 * l * ny - 1e-15
        });
        assert!(ok);
    }

    #[test]
    fn eps_range_is_validated() {
        let l2 = Space::lp(2, 2.0).unwrap();
        let x = v(l2, &[1.0, 0.0]);
        assert_eq!(direction_class_eps(&x, &x, 1.0), Err(Error::EpsilonOutOfRange(1.0)));
        assert_eq!(direction_class_eps(&x, &x, -0.1), Err(Error::EpsilonOutOfRange(-0.1)));
    }

    #[test]
    fn eps_zero_matches_exact_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for space in [Space::lp(3, 1.0), Space::lp(3, 2.0), Space::lp(3, 3.0), Space::linf(3)] {
            let space = space.unwrap();
            for _ in 0..250 {
                let x = random_unit::<f64, _>(&mut rng, space);
                let y = random_unit::<f64, _>(&mut rng, space);
                let exact = direction_class(&x, &y).unwrap();
                assert_eq!(direction_class_eps(&x, &y, 0.0).unwrap(), exact);
                assert_eq!(direction_class_eps_search(&x, &y, 0.0).unwrap(), exact);
            }
        }
    }

    #[test]
    fn eps_membership_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let grid: Vec<f64> = (0..10).map(|k| k as f64 / 10.0).collect();
        for space in [Space::lp(2, 1.0), Space::lp(3, 2.0), Space::linf(4)] {
            let space = space.unwrap();
            for _ in 0..100 {
                let x = random_unit::<f64, _>(&mut rng, space);
                let y = random_unit::<f64, _>(&mut rng, space);
                let mut seen_plus = false;
                let mut seen_minus = false;
                for &e in &grid {
                    let c = direction_class_eps(&x, &y, e).unwrap();
                    let s = direction_class_eps_search(&x, &y, e).unwrap();
                    assert_eq!(c, s, "eps {e}");
                    assert!(c.in_plus || !seen_plus);
                    assert!(c.in_minus || !seen_minus);
                    seen_plus |= c.in_plus;
                    seen_minus |= c.in_minus;
                }
            }
        }
    }
}
