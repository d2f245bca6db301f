//! Derivative-free minimization primitives: golden-section search on an
//! expanding bracket for convex functions of one variable, and stochastic
//! axis search on products of unit spheres for nonsmooth maximization.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::scalar::Scalar;
use crate::spaces::Vector;

/// `(sqrt(5) - 1) / 2`
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Upper bound on bracket doublings; `2^80` times the initial width is far
/// beyond any finite minimizer of a nonconstant convex norm map.
const MAX_DOUBLINGS: usize = 80;

const MAX_GOLDEN_ITERS: usize = 500;

/// Minimizer and minimum of a one-dimensional search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineMinimum<S> {
    pub arg: S,
    pub value: S,
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`,
/// stopping once the interval is narrower than `width`.
pub fn golden_section<S: Scalar, F: FnMut(S) -> S>(mut f: F, lo: S, hi: S, width: S) -> LineMinimum<S> {
    let r = S::lit(INV_PHI);
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iters = 0;
    while (b - a) > width && iters < MAX_GOLDEN_ITERS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        iters += 1;
    }
    let mid = (a + b) / S::lit(2.0);
    let fm = f(mid);
    let mut best = LineMinimum { arg: mid, value: fm };
    for (x, fx) in [(c, fc), (d, fd)] {
        if fx < best.value {
            best = LineMinimum { arg: x, value: fx };
        }
    }
    best
}

/// Expands `[center - w, center + w]` by doubling each side until `f` at the
/// end point is no smaller than `f(center)`. For convex `f` the minimizer
/// then lies inside the returned interval.
pub fn expand_bracket<S: Scalar, F: FnMut(S) -> S>(f: &mut F, center: S, half_width: S) -> (S, S) {
    let f0 = f(center);
    let side = |dir: S, f: &mut F| {
        let mut w = half_width;
        for _ in 0..MAX_DOUBLINGS {
            if f(center + dir * w) >= f0 {
                break;
            }
            w = w + w;
        }
        center + dir * w
    };
    let lo = side(-S::one(), f);
    let hi = side(S::one(), f);
    (lo, hi)
}

/// Global minimum of a convex function of one real variable: expanding
/// bracket from `[center - half_width, center + half_width]`, then golden
/// section down to `width`.
pub fn minimize_convex<S: Scalar, F: FnMut(S) -> S>(mut f: F, center: S, half_width: S, width: S) -> LineMinimum<S> {
    let (lo, hi) = expand_bracket(&mut f, center, half_width);
    let found = golden_section(&mut f, lo, hi, width);
    let at_center = f(center);
    if at_center <= found.value {
        LineMinimum { arg: center, value: at_center }
    } else {
        found
    }
}

/// Settings for [`refine_on_spheres`].
#[derive(Clone, Copy, Debug)]
pub struct SphereRefine {
    pub iterations: usize,
    pub initial_step: f64,
    pub min_step: f64,
}

impl Default for SphereRefine {
    fn default() -> Self {
        SphereRefine { iterations: 200, initial_step: 0.25, min_step: 1e-13 }
    }
}

/// Hill climbing on a product of unit spheres.
///
/// Each iteration perturbs one randomly chosen block along a random axis
/// (alternating with a random Gaussian direction), renormalizes the block in
/// its own space, and keeps the move when `objective` increases. The step
/// halves after a run of failures as long as the block dimension. `objective`
/// returns `None` for infeasible points; such moves are never accepted.
pub fn refine_on_spheres<S, F, R>(mut blocks: Vec<Vector<S>>, mut objective: F, cfg: SphereRefine, rng: &mut R) -> (Vec<Vector<S>>, S)
where
    S: Scalar,
    F: FnMut(&[Vector<S>]) -> Option<S>,
    R: Rng + ?Sized,
{
    let mut best = match objective(&blocks) {
        Some(v) => v,
        None => return (blocks, S::neg_infinity()),
    };
    let total_dim: usize = blocks.iter().map(|b| b.dim()).sum();
    let mut step = S::lit(cfg.initial_step);
    let min_step = S::lit(cfg.min_step);
    let mut failures = 0;
    for it in 0..cfg.iterations {
        if step < min_step {
            break;
        }
        let which = rng.random_range(0..blocks.len());
        let block = blocks[which].clone();
        let dim = block.dim();
        let mut direction = vec![S::zero(); dim];
        if it % 2 == 0 {
            direction[rng.random_range(0..dim)] = S::one();
        } else {
            for d in direction.iter_mut() {
                *d = S::lit(rng.sample::<f64, _>(StandardNormal));
            }
            let n = direction.iter().map(|&d| d * d).sum::<S>().sqrt();
            if n.is_zero() {
                continue;
            }
            for d in direction.iter_mut() {
                *d = *d / n;
            }
        }
        let mut improved = false;
        for sign in [S::one(), -S::one()] {
            let coords: Vec<S> = block.coords().iter().zip(&direction).map(|(&c, &d)| c + sign * step * d).collect();
            let Ok(moved) = Vector::new(block.space(), coords).and_then(|v| v.normalized()) else {
                continue;
            };
            let previous = std::mem::replace(&mut blocks[which], moved);
            match objective(&blocks) {
                Some(v) if v > best => {
                    best = v;
                    improved = true;
                    break;
                }
                _ => blocks[which] = previous,
            }
        }
        if improved {
            failures = 0;
        } else {
            failures += 1;
            if failures >= total_dim.max(2) {
                step = step / S::lit(2.0);
                failures = 0;
            }
        }
    }
    (blocks, best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::Space;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn golden_finds_quadratic_minimum() {
        let m = golden_section(|x: f64| (x - 0.3) * (x - 0.3) + 2.0, -1.0, 1.0, 1e-10);
        assert!((m.arg - 0.3).abs() < 1e-7);
        assert!((m.value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn golden_handles_kinks() {
        let m = golden_section(|x: f64| (x + 1.5).abs().max((x + 0.5).abs() * 2.0), -10.0, 10.0, 1e-12);
        // kink where |x + 1.5| = 2|x + 0.5|, x = -5/6
        assert!((m.arg + 5.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn expanding_bracket_reaches_far_minimizer() {
        let m = minimize_convex(|x: f64| (x - 1000.0).abs() + 1.0, 0.0, 1.0, 1e-10);
        assert!((m.arg - 1000.0).abs() < 1e-6);
        assert!((m.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn constant_function_stays_at_center() {
        let m = minimize_convex(|_x: f64| 4.0, 0.0, 1.0, 1e-10);
        assert_eq!(m.arg, 0.0);
        assert_eq!(m.value, 4.0);
    }

    #[test]
    fn sphere_refinement_reaches_linf_corner() {
        let space = Space::linf(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let start = Vector::<f64>::from_f64(space, &[1.0, 0.3]).unwrap();
        let f = |b: &[Vector<f64>]| Some((b[0].coords()[0].abs() + b[0].coords()[1].abs()) / 2.0);
        let (pts, best) = refine_on_spheres(vec![start], f, SphereRefine::default(), &mut rng);
        assert!(best > 1.0 - 1e-9, "best {best}");
        assert!((pts[0].coords()[1] - 1.0).abs() < 1e-8);
    }
}
