//! Reference computations the suites compare against. They use nothing but
//! norm evaluation, so they are independent of the derivative formulas under
//! test.

use bjortho_core::Vector64;

/// Grid points on the ray search interval.
pub const RAY_GRID: usize = 4096;

/// Relative rounding slack for comparing minima found by the ray search.
pub const RAY_ROUNDING: f64 = 1e-13;

/// `inf { ||x + l y|| : l >= 0 }`.
pub fn ray_minimum(x: &Vector64, y: &Vector64) -> f64 {
    tilted_ray_minimum(x, y, 0.0)
}

/// `inf { ||x + l y|| + slope * l : l >= 0 }`.
///
/// The interval `[0, R]` doubles from `R = 1` until the objective at `R` is
/// back above its value at zero, after which convexity keeps the minimizer
/// inside; the best of a uniform grid is then refined by golden section on
/// its neighbouring cells.
pub fn tilted_ray_minimum(x: &Vector64, y: &Vector64, slope: f64) -> f64 {
    let at = |l: f64| x.plus_scaled(l, y).expect("same space").norm() + slope * l;
    let base = x.norm();
    if y.is_zero() {
        return base;
    }
    let mut reach = 1.0;
    for _ in 0..60 {
        if at(reach) >= base {
            break;
        }
        reach *= 2.0;
    }
    let h = reach / RAY_GRID as f64;
    let (mut best_k, mut best) = (0, base);
    for k in 1..=RAY_GRID {
        let v = at(k as f64 * h);
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let lo = (best_k as f64 - 1.0).max(0.0) * h;
    let hi = (best_k as f64 + 1.0) * h;
    best.min(golden(at, lo, hi))
}

fn golden<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a < 1e-15 * (1.0 + b.abs()) {
            break;
        }
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
    }
    fc.min(fd).min(f(a)).min(f(b))
}

/// `y` in `x+` up to slope `tol`: `||x + l y|| >= ||x|| - tol l ||y||` for
/// every `l >= 0`. Matches a derivative test `rho'_+(x, y) >= -tol ||y||`
/// by convexity, but is computed from norm values alone.
pub fn oracle_plus(x: &Vector64, y: &Vector64, tol: f64) -> bool {
    tilted_ray_minimum(x, y, tol * y.norm()) >= x.norm() * (1.0 - RAY_ROUNDING)
}

pub fn oracle_minus(x: &Vector64, y: &Vector64, tol: f64) -> bool {
    oracle_plus(x, &y.neg(), tol)
}

/// `y` in `x+` up to a fixed value drop: `||x + l y|| >= ||x|| - tol` for
/// every `l >= 0`. At smooth points a slope `-d` only lowers the norm by
/// about `d^2 / 2` (unit vectors), so this form cannot see slopes below
/// roughly `sqrt(2 tol)`.
pub fn value_oracle_plus(x: &Vector64, y: &Vector64, tol: f64) -> bool {
    ray_minimum(x, y) >= x.norm() - tol
}

pub fn value_oracle_minus(x: &Vector64, y: &Vector64, tol: f64) -> bool {
    value_oracle_plus(x, &y.neg(), tol)
}

/// Hausdorff distance between planar points and `{+-(1, b) : |b| <= 1}`,
/// the segments discretized at `segment_points` each.
pub fn hausdorff_to_vertical_segments(points: &[[f64; 2]], segment_points: usize) -> f64 {
    let to_segments = |p: &[f64; 2]| {
        [1.0f64, -1.0]
            .iter()
            .map(|&s| ((p[0] - s).powi(2) + (p[1].abs() - 1.0).max(0.0).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min)
    };
    let forward = points.iter().map(to_segments).fold(0.0, f64::max);
    let mut backward: f64 = 0.0;
    for s in [1.0, -1.0] {
        for k in 0..segment_points {
            let b = -1.0 + 2.0 * k as f64 / (segment_points - 1) as f64;
            let nearest = points.iter().map(|p| ((p[0] - s).powi(2) + (p[1] - b).powi(2)).sqrt()).fold(f64::INFINITY, f64::min);
            backward = backward.max(nearest);
        }
    }
    forward.max(backward)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bjortho_core::Space;

    #[test]
    fn ray_minimum_examples() {
        let l2 = Space::lp(2, 2.0).unwrap();
        let x = Vector64::from_f64(l2, &[1.0, 0.0]).unwrap();
        // ||(1 - l, l)|| is smallest at l = 1/2
        let y = Vector64::from_f64(l2, &[-1.0, 1.0]).unwrap();
        assert!((ray_minimum(&x, &y) - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(!oracle_plus(&x, &y, 1e-9));
        assert!(oracle_minus(&x, &y, 1e-9));
        assert!(!value_oracle_plus(&x, &y, 1e-9));
        // far minimizer needs the expanding interval
        let tiny = Vector64::from_f64(l2, &[-1e-3, 0.0]).unwrap();
        assert!(ray_minimum(&x, &tiny) < 1e-9);
    }

    #[test]
    fn slope_and_value_oracles_differ_on_shallow_descent() {
        let l2 = Space::lp(2, 2.0).unwrap();
        let x = Vector64::from_f64(l2, &[1.0, 0.0]).unwrap();
        // slope -1e-5: the norm drops by only 5e-11 along the ray
        let y = Vector64::from_f64(l2, &[-1e-5, 1.0]).unwrap().normalized().unwrap();
        assert!(!oracle_plus(&x, &y, 1e-9));
        assert!(value_oracle_plus(&x, &y, 1e-9));
        // a slope within tolerance passes the slope form
        let z = Vector64::from_f64(l2, &[-1e-10, 1.0]).unwrap();
        assert!(oracle_plus(&x, &z, 1e-9));
    }

    #[test]
    fn hausdorff_examples() {
        let full: Vec<[f64; 2]> = (0..=200).flat_map(|k| {
            let b = -1.0 + k as f64 / 100.0;
            [[1.0, b], [-1.0, -b]]
        }).collect();
        assert!(hausdorff_to_vertical_segments(&full, 501) < 0.011);
        let half: Vec<[f64; 2]> = full.iter().copied().filter(|p| p[1] * p[0] >= 0.0).collect();
        assert!(hausdorff_to_vertical_segments(&half, 501) > 0.9);
    }
}
