//! Best approximation of an operator from a finite-dimensional subspace of
//! operators: direct minimization of `||T - A||`, the supremum formula for
//! the distance, the Hilbert-space counterexample, and the attainment-set
//! experiment behind the Euclidean characterization.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures;
use crate::linalg::sym_eigen;
use crate::operators::{attainment_sample, norm_derivatives, op_norm, Operator, DEFAULT_ATTAIN_TOL};
use crate::orthogonality::{bisect_subgradient, bj_op, LINE_WIDTH};
use crate::scalar::Scalar;
use crate::search::{minimize_convex, refine_on_spheres, SphereRefine};
use crate::spaces::{random_unit, Space, Vector};

/// Unit samples for the outer supremum of the distance formula.
pub const SUP_FORMULA_SAMPLES: usize = 1 << 12;
pub const SUP_FORMULA_KEEP: usize = 16;
/// Points of the hypothesis grid on `[l0 - 2, l0 + 2]`.
pub const HYPOTHESIS_GRID: usize = 21;
pub const HYPOTHESIS_BUDGET: usize = 2048;
/// Smallest eigenvalue of the normalized Gram matrix of an independent basis.
pub const RANK_TOL: f64 = 1e-10;

const MAX_CYCLES: usize = 500;
const STALL_CYCLES: usize = 3;
const CYCLE_IMPROVEMENT: f64 = 1e-10;

/// `(l0, min)` for the convex map `l -> ||T + l A||`.
///
/// Golden section on an expanding bracket; on exact norm paths the result is
/// polished by bisection on the exact one-sided derivatives, so
/// `T + l0 A _|_B A` holds to rounding precision.
pub fn line_min<S: Scalar>(t: &Operator<S>, a: &Operator<S>) -> Result<(S, S)> {
    t.check_shape(a)?;
    if a.is_zero() {
        return Err(Error::ZeroOperator);
    }
    let norm_a = op_norm(a).value;
    let scale = op_norm(t).value.max(norm_a * S::lit(1e-12)) / norm_a;
    let g = |l: S| op_norm(&t.plus_scaled(l, a).expect("same shape")).value;
    let found = minimize_convex(&g, S::zero(), scale, scale * S::lit(LINE_WIDTH));
    if norm_derivatives(t, a)?.is_none() {
        return Ok((found.arg, found.value));
    }
    // a zero of the subgradient is the minimizer; near-ties in value between
    // it and the golden-section point are rounding noise
    let l0 = bisect_subgradient(found.arg, scale, |l| Ok(norm_derivatives(&t.plus_scaled(l, a)?, a)?.expect("exact norm path")))?;
    Ok((l0, g(l0)))
}

/// How the attainment hypothesis of the distance formula was settled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Hypothesis {
    /// Euclidean operators: every `M_{T + l A}` is the sphere of a subspace.
    Automatic,
    /// `(l, antipodal_ok)` on a grid around the minimizer.
    Grid { points: Vec<(f64, bool)> },
}

impl Hypothesis {
    pub fn holds(&self) -> bool {
        match self {
            Hypothesis::Automatic => true,
            Hypothesis::Grid { points } => points.iter().all(|&(_, ok)| ok),
        }
    }
}

/// Value of the supremum formula and the status of its hypothesis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupFormula<S> {
    pub value: S,
    pub hypothesis: Hypothesis,
    /// `false` when a grid point fails: the formula was still evaluated but
    /// need not equal the distance.
    pub guaranteed: bool,
}

/// `sup { [Tx, y] : x in S_X, y in S_Y, [Ax, y] = 0 }` with its hypothesis
/// check. See [`sup_formula_value`].
pub fn dist_sup_formula<S: Scalar>(t: &Operator<S>, a: &Operator<S>) -> Result<SupFormula<S>> {
    t.check_shape(a)?;
    let value = sup_formula_value(t, a)?;
    let hypothesis = if t.is_euclidean() {
        Hypothesis::Automatic
    } else {
        let l0 = if a.is_zero() { S::zero() } else { line_min(t, a)?.0 };
        let mut points = Vec::with_capacity(HYPOTHESIS_GRID);
        for k in 0..HYPOTHESIS_GRID {
            let l = l0 + S::lit(-2.0 + 4.0 * k as f64 / (HYPOTHESIS_GRID - 1) as f64);
            let shifted = t.plus_scaled(l, a)?;
            let ok = match attainment_sample(&shifted, DEFAULT_ATTAIN_TOL, HYPOTHESIS_BUDGET, k as u64) {
                Ok(s) => s.antipodal_ok,
                // M_0 is the whole sphere, which is connected and symmetric
                Err(Error::ZeroOperator) => true,
                Err(e) => return Err(e),
            };
            points.push((l.to_f64_lossy(), ok));
        }
        Hypothesis::Grid { points }
    };
    let guaranteed = hypothesis.holds();
    Ok(SupFormula { value, hypothesis, guaranteed })
}

/// The supremum in the distance formula.
///
/// For fixed unit `x` the semi-inner products `[., y]` over unit `y` range
/// over all supporting functionals, i.e. the whole unit sphere of `Y*`, so
/// the inner supremum is `max { f(Tx) : ||f||* <= 1, f(Ax) = 0 }`, which by
/// duality is `min_m ||Tx + m Ax||` (the distance from `Tx` to the line
/// through `Ax`; `||Tx||` when `Ax = 0`). Euclidean codomains use the
/// orthogonal projection. The outer supremum over `x` is sampled and refined.
pub fn sup_formula_value<S: Scalar>(t: &Operator<S>, a: &Operator<S>) -> Result<S> {
    t.check_shape(a)?;
    let cod = t.codomain();
    let inner = |x: &[S]| -> S {
        let tx = Vector::new(cod, t.apply_raw(x)).expect("codomain");
        let ax = Vector::new(cod, a.apply_raw(x)).expect("codomain");
        if ax.is_zero() {
            return tx.norm();
        }
        if cod.norm.is_euclidean() {
            let u = ax.normalized().expect("nonzero");
            return tx.plus_scaled(-tx.dot(&u), &u).expect("same space").norm();
        }
        let scale = tx.norm().max(S::min_positive_value()) / ax.norm();
        minimize_convex(|m| tx.plus_scaled(m, &ax).expect("same space").norm(), S::zero(), scale, scale * S::lit(1e-12)).value
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x0d15_7a9c);
    let mut scored: Vec<(S, Vector<S>)> = (0..SUP_FORMULA_SAMPLES)
        .map(|_| {
            let x = random_unit::<S, _>(&mut rng, t.domain());
            (inner(x.coords()), x)
        })
        .collect();
    scored.sort_by(|p, q| q.0.partial_cmp(&p.0).unwrap_or(std::cmp::Ordering::Equal));
    scored.truncate(SUP_FORMULA_KEEP);
    let cfg = SphereRefine { iterations: 400, ..SphereRefine::default() };
    let mut best = S::zero();
    for (_, x) in scored {
        let (_, v) = refine_on_spheres(vec![x], |b: &[Vector<S>]| Some(inner(b[0].coords())), cfg, &mut rng);
        best = best.max(v);
    }
    Ok(best)
}

/// Distance from `T` to a subspace of operators, computed two ways.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistanceReport<S> {
    /// `min_c ||T - sum c_i B_i||` by direct descent.
    pub dist_min: S,
    /// The supremum formula at the best approximation `A0 = sum c_i B_i`.
    pub dist_sup: S,
    pub coefficients: Vec<S>,
    /// `|dist_min - dist_sup|`
    pub agreement: S,
    pub hypothesis: Hypothesis,
}

/// `dist(T, span(basis))` by cyclic coordinate golden-section descent on
/// `c -> ||T - sum c_i B_i||`, each cycle followed by a pattern move and
/// line searches along random directions (coordinate moves alone can stall
/// at a kink of the nonsmooth objective). Stops after a few consecutive
/// cycles improving by less than `1e-10`.
pub fn dist_subspace<S: Scalar>(t: &Operator<S>, basis: &[Operator<S>]) -> Result<DistanceReport<S>> {
    if basis.is_empty() {
        return Err(Error::InvalidParameter("basis must be nonempty".into()));
    }
    for b in basis {
        t.check_shape(b)?;
    }
    check_independent(basis)?;
    let k = basis.len();
    let combine = |c: &[S]| -> Operator<S> {
        let mut out = t.clone();
        for (ci, b) in c.iter().zip(basis) {
            out = out.plus_scaled(-*ci, b).expect("same shape");
        }
        out
    };
    let phi = |c: &[S]| op_norm(&combine(c)).value;
    let norm_t = op_norm(t).value;
    let scales: Vec<S> = basis.iter().map(|b| norm_t.max(S::lit(1e-12)) / op_norm(b).value).collect();
    let unit = scales.iter().fold(S::zero(), |m, &s| m.max(s));

    let line = |c: &[S], d: &[S], half: S| -> (Vec<S>, S) {
        let at = |s: S| -> Vec<S> { c.iter().zip(d).map(|(&ci, &di)| ci + s * di).collect() };
        let m = minimize_convex(|s| phi(&at(s)), S::zero(), half, half * S::lit(LINE_WIDTH));
        (at(m.arg), m.value)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0xc0de_face);
    let mut c = vec![S::zero(); k];
    let mut value = phi(&c);
    let mut stalled = 0;
    for _ in 0..MAX_CYCLES {
        let start = (c.clone(), value);
        for i in 0..k {
            let mut d = vec![S::zero(); k];
            d[i] = S::one();
            let (nc, nv) = line(&c, &d, scales[i]);
            if nv < value {
                c = nc;
                value = nv;
            }
        }
        let pattern: Vec<S> = c.iter().zip(&start.0).map(|(&a, &b)| a - b).collect();
        let plen = pattern.iter().map(|&p| p * p).sum::<S>().sqrt();
        if plen > S::zero() {
            let (nc, nv) = line(&c, &pattern, S::one());
            if nv < value {
                c = nc;
                value = nv;
            }
        }
        if k > 1 {
            for _ in 0..2 * k {
                let d: Vec<S> = (0..k).map(|i| S::lit(StandardNormal.sample(&mut rng)) * scales[i]).collect();
                let (nc, nv) = line(&c, &d, S::one());
                if nv < value {
                    c = nc;
                    value = nv;
                }
            }
        }
        if start.1 - value < S::lit(CYCLE_IMPROVEMENT) * unit.min(S::one()).max(norm_t.min(S::one())) {
            stalled += 1;
            if stalled >= STALL_CYCLES {
                break;
            }
        } else {
            stalled = 0;
        }
    }
    let a0 = combine(&c).sub(t)?.scale(-S::one());
    let sup = dist_sup_formula(t, &a0)?;
    Ok(DistanceReport { dist_min: value, dist_sup: sup.value, agreement: (value - sup.value).abs(), coefficients: c, hypothesis: sup.hypothesis })
}

fn check_independent<S: Scalar>(basis: &[Operator<S>]) -> Result<()> {
    let k = basis.len();
    let norms: Vec<S> = basis.iter().map(|b| b.frobenius()).collect();
    if norms.iter().any(|n| n.is_zero()) {
        return Err(Error::DependentBasis(0.0));
    }
    let mut g = vec![S::zero(); k * k];
    for i in 0..k {
        for j in 0..k {
            let dot: S = basis[i].flat().iter().zip(basis[j].flat()).map(|(&x, &y)| x * y).sum();
            g[i * k + j] = dot / (norms[i] * norms[j]);
        }
    }
    let smallest = *sym_eigen(&g, k).values.last().expect("k >= 1");
    if smallest < S::lit(RANK_TOL) {
        return Err(Error::DependentBasis(smallest.to_f64_lossy()));
    }
    Ok(())
}

/// The distance from `T` to `span{A1, A2}` against the supremum over
/// `y _|_ Bx`, `B` in the span, for the fixed Euclidean triple of
/// [`fixtures::counterexample`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub norm_t: f64,
    /// `M_T` sample points.
    pub m_t: Vec<Vec<f64>>,
    pub ortho_a1: bool,
    pub ortho_a2: bool,
    /// `dist(T, span{A1, A2})`
    pub lhs: f64,
    pub lhs_coefficients: Vec<f64>,
    /// `sup { |<Tx, y>| : x, y unit, B in span, y _|_ Bx }`
    pub rhs: f64,
    pub rhs_witness: Vec<f64>,
    pub strict_gap: f64,
}

pub fn counterexample_report() -> Result<CounterexampleReport> {
    let (t, a1, a2) = fixtures::counterexample::<f64>();
    let norm_t = op_norm(&t).value;
    let sample = attainment_sample(&t, DEFAULT_ATTAIN_TOL, 256, 0)?;
    let ortho_a1 = bj_op(&t, &a1)?.verdict;
    let ortho_a2 = bj_op(&t, &a2)?.verdict;
    let dist = dist_subspace(&t, &[a1.clone(), a2.clone()])?;
    // |<Tx, y>| over unit y orthogonal to Bx peaks at the component of Tx
    // orthogonal to Bx; ||T|| bounds the supremum, so points of M_T suffice.
    let mut rhs = 0.0;
    let mut witness = Vec::new();
    for x in &sample.points {
        let tx = t.apply(x)?;
        for b in [&a1, &a2] {
            let bx = b.apply(x)?;
            let v = match bx.normalized() {
                Ok(u) => tx.plus_scaled(-tx.dot(&u), &u)?.norm(),
                Err(_) => tx.norm(),
            };
            if v > rhs {
                rhs = v;
                witness = x.coords().to_vec();
            }
        }
    }
    Ok(CounterexampleReport {
        norm_t,
        m_t: sample.points.iter().map(|p| p.coords().to_vec()).collect(),
        ortho_a1,
        ortho_a2,
        lhs: dist.dist_min,
        lhs_coefficients: dist.coefficients,
        rhs,
        rhs_witness: witness,
        strict_gap: rhs - dist.dist_min,
    })
}

impl fmt::Display for CounterexampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_vec = |v: &[f64]| v.iter().map(|c| format!("{c:.6}")).collect::<Vec<_>>().join(", ");
        writeln!(f, "{:<28}{}", "quantity", "value")?;
        writeln!(f, "{:<28}{:.12}", "||T||", self.norm_t)?;
        let m: Vec<String> = self.m_t.iter().map(|p| format!("({})", fmt_vec(p))).collect();
        writeln!(f, "{:<28}{}", "M_T", m.join(" "))?;
        writeln!(f, "{:<28}{}", "T _|_B A1", self.ortho_a1)?;
        writeln!(f, "{:<28}{}", "T _|_B A2", self.ortho_a2)?;
        writeln!(f, "{:<28}{:.12}", "dist(T, span{A1,A2})", self.lhs)?;
        writeln!(f, "{:<28}({})", "  best coefficients", fmt_vec(&self.lhs_coefficients))?;
        writeln!(f, "{:<28}{:.12}", "sup |<Tx,y>|, y _|_ Bx", self.rhs)?;
        writeln!(f, "{:<28}({})", "  attained at x = y", fmt_vec(&self.rhs_witness))?;
        write!(f, "{:<28}{:.12}", "strict gap", self.strict_gap)
    }
}

/// Tally of attainment-set shapes over random operators on one space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EuclideanSummary {
    pub space: Space,
    pub trials: usize,
    pub seed: u64,
    /// `M_T = D u (-D)` with `D` connected.
    pub antipodal_ok: usize,
    /// `M_T` is the unit sphere of a subspace.
    pub subspace_sphere: usize,
    /// Trials failing either condition.
    pub violators: Vec<usize>,
    /// Trial 0 is the four-corner operator (only on `linf^2`).
    pub fixture_injected: bool,
}

impl EuclideanSummary {
    pub fn antipodal_rate(&self) -> f64 {
        self.antipodal_ok as f64 / self.trials as f64
    }

    pub fn subspace_rate(&self) -> f64 {
        self.subspace_sphere as f64 / self.trials as f64
    }
}

/// Per-trial seed: trial `i` of a run seeded `seed` is reproducible alone.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    let mut z = seed ^ (trial as u64).wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Random `space -> space` operator with standard Gaussian entries.
pub fn random_operator<S: Scalar>(domain: Space, codomain: Space, seed: u64) -> Operator<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..domain.dim * codomain.dim).map(|_| S::lit(StandardNormal.sample(&mut rng))).collect();
    Operator::from_flat(domain, codomain, data).expect("matching size")
}

/// Samples `M_T` for `trials` random operators on `space` and counts how
/// often it is the sphere of a subspace and how often it splits as
/// `D u (-D)` with `D` connected. Both hold for every operator exactly when
/// the space is Euclidean.
pub fn euclidean_experiment(space: Space, trials: usize, seed: u64, budget: usize) -> Result<EuclideanSummary> {
    if !(2..=4).contains(&space.dim) {
        return Err(Error::InvalidSpace(format!("experiment needs dimension 2 to 4, got {}", space.dim)));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let inject = space == Space::linf(2)?;
    let mut summary = EuclideanSummary { space, trials, seed, antipodal_ok: 0, subspace_sphere: 0, violators: Vec::new(), fixture_injected: inject };
    for i in 0..trials {
        let ts = trial_seed(seed, i);
        let t = if inject && i == 0 { fixtures::four_corner::<f64>() } else { random_operator::<f64>(space, space, ts) };
        let s = attainment_sample(&t, DEFAULT_ATTAIN_TOL, budget, ts)?;
        summary.antipodal_ok += s.antipodal_ok as usize;
        summary.subspace_sphere += s.is_subspace_sphere as usize;
        if !(s.antipodal_ok && s.is_subspace_sphere) {
            summary.violators.push(i);
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn l2(n: usize) -> Space {
        Space::lp(n, 2.0).unwrap()
    }

    #[test]
    fn line_min_examples() {
        let s = l2(2);
        let t = Operator::<f64>::from_f64(s, s, &[&[2.0, 0.0], &[0.0, 1.0]]).unwrap();
        let (l0, v) = line_min(&t, &Operator::identity(s)).unwrap();
        assert_relative_eq!(l0, -1.5, epsilon = 1e-9);
        assert_relative_eq!(v, 0.5, epsilon = 1e-10);
        let (l0, v) = line_min(&t, &t).unwrap();
        assert_relative_eq!(l0, -1.0, epsilon = 1e-9);
        assert!(v < 1e-9);
        let (t, a1, _) = fixtures::counterexample::<f64>();
        let (l0, v) = line_min(&t, &a1).unwrap();
        assert!(l0.abs() < 1e-9);
        assert_relative_eq!(v, 1.0, epsilon = 1e-12);
        assert_eq!(line_min(&t, &Operator::zero(l2(3), l2(3))).unwrap_err(), Error::ZeroOperator);
    }

    #[test]
    fn line_min_on_sampled_norms() {
        let s = Space::lp(2, 3.0).unwrap();
        let t = Operator::<f64>::from_f64(s, s, &[&[2.0, 0.0], &[0.0, 1.0]]).unwrap();
        // diag(2 + l, 1 + l) on l3: norm max(|2 + l|, |1 + l|), minimized at -1.5
        let (l0, v) = line_min(&t, &Operator::identity(s)).unwrap();
        assert!((l0 + 1.5).abs() < 1e-4);
        assert!((v - 0.5).abs() < 1e-6);
    }

    #[test]
    fn sup_formula_on_counterexample_pair() {
        let (t, a1, _) = fixtures::counterexample::<f64>();
        let r = dist_sup_formula(&t, &a1).unwrap();
        assert_eq!(r.hypothesis, Hypothesis::Automatic);
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sup_formula_flags_are_reported_for_linf() {
        let t = fixtures::remark_shift::<f64>();
        let s = t.domain();
        let a = Operator::from_f64(s, s, &[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let r = dist_sup_formula(&t, &a).unwrap();
        let Hypothesis::Grid { points } = &r.hypothesis else { panic!("grid expected") };
        assert_eq!(points.len(), HYPOTHESIS_GRID);
        assert_eq!(r.guaranteed, r.hypothesis.holds());
    }

    #[test]
    fn dist_subspace_examples() {
        let s = l2(2);
        let t = Operator::<f64>::from_f64(s, s, &[&[2.0, 1.0], &[0.0, 1.0]]).unwrap();
        let b1 = Operator::from_f64(s, s, &[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
        let b2 = Operator::from_f64(s, s, &[&[0.0, 1.0], &[0.0, 1.0]]).unwrap();
        let r = dist_subspace(&t, &[b1.clone(), b2.clone()]).unwrap();
        assert!(r.dist_min < 1e-8, "{}", r.dist_min);
        assert_relative_eq!(r.coefficients[0], 2.0, epsilon = 1e-6);

        let id = Operator::identity(s);
        let r = dist_subspace(&t, &[id.clone()]).unwrap();
        let (_, v) = line_min(&t, &id).unwrap();
        assert!((r.dist_min - v).abs() < 1e-9);

        assert!(matches!(dist_subspace(&t, &[b1.clone(), b1.scale(2.0)]), Err(Error::DependentBasis(_))));
        assert!(matches!(dist_subspace(&t, &[]), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn counterexample_distance_is_below_one() {
        let (t, a1, a2) = fixtures::counterexample::<f64>();
        let r = dist_subspace(&t, &[a1, a2]).unwrap();
        assert!(r.dist_min < 1.0 - 1e-3);
        assert!(r.agreement < 2e-3);
    }

    #[test]
    fn counterexample_report_has_strict_gap() {
        let r = counterexample_report().unwrap();
        assert_relative_eq!(r.norm_t, 1.0, epsilon = 1e-12);
        assert!(r.ortho_a1 && !r.ortho_a2);
        assert!(r.rhs >= 1.0 - 1e-9);
        assert!(r.strict_gap > 0.0);
        let text = r.to_string();
        assert!(text.contains("strict gap"));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"strict_gap\""));
    }

    #[test]
    fn experiment_examples() {
        let e = euclidean_experiment(l2(3), 20, 1, 512).unwrap();
        assert_eq!(e.subspace_sphere, 20);
        assert_eq!(e.antipodal_ok, 20);
        let linf = euclidean_experiment(Space::linf(2).unwrap(), 3, 1, 2048).unwrap();
        assert!(linf.fixture_injected);
        assert!(linf.violators.contains(&0));
        assert!(euclidean_experiment(l2(5), 1, 0, 16).is_err());
    }

    #[test]
    fn trial_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| trial_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
    }
}
