//! Birkhoff-James orthogonality certificates for vectors and operators, the
//! pointwise witness search on `M_T`, and norm retrieval from the
//! orthogonality set.
//!
//! Suprema over "all semi-inner products on Y" are taken over pairs
//! `(y, f)` with `y` a unit vector and `f` an extreme supporting functional at
//! `y`: every compatible semi-inner product evaluates `[z, y] = f(z)` for some
//! `f` in `J(y)`, and a linear objective over the convex set `J(y)` peaks at
//! an extreme point. This reduction is what makes the suprema computable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{norm_derivatives, op_norm, restricted_form, AttainmentSample, NormMethod, OpNorm, Operator};
use crate::scalar::Scalar;
use crate::search::{minimize_convex, refine_on_spheres, SphereRefine};
use crate::sip::{direction_class, direction_class_eps, DIRECTION_TOL};
use crate::spaces::{one_sided_derivatives, random_unit, support_extremes, DerivativePair, Functional, Vector};

/// Relative tolerance for operator orthogonality verdicts.
pub const VERDICT_TOL: f64 = 1e-7;
/// Finite-difference steps for the derivatives of `l -> ||T + l A||`, in
/// units of `||T|| / ||A||`.
pub const DERIV_STEPS: [f64; 3] = [1e-3, 5e-4, 2.5e-4];
/// Joint samples for the retrieval suprema.
pub const SUP_SAMPLES: usize = 1 << 13;
pub const SUP_KEEP: usize = 32;
pub const SUP_SEED: u64 = 0x0517_7e11;

const MIN_DERIV_STEP: f64 = 1e-7;
pub(crate) const LINE_WIDTH: f64 = 1e-10;
const BISECT_ITERS: usize = 200;

/// Verdict for `x _|_B y`. A zero base point is orthogonal to everything.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorOrthogonality {
    pub orthogonal: bool,
    pub zero_base: bool,
}

/// `x _|_B y` from the derivative signs `rho'_-(x,y) <= tol <= rho'_+(x,y) + 2 tol`.
pub fn bj_vec<S: Scalar>(x: &Vector<S>, y: &Vector<S>) -> Result<VectorOrthogonality> {
    x.space().check(&y.space())?;
    if x.is_zero() {
        return Ok(VectorOrthogonality { orthogonal: true, zero_base: true });
    }
    Ok(VectorOrthogonality { orthogonal: direction_class(x, y)?.is_orthogonal(), zero_base: false })
}

/// The scalar `l0` minimizing `||x + l y||`, so that `x + l0 y _|_B y`.
///
/// Bisection on the sign of the one-sided derivatives, which are monotone in
/// `l` by convexity, so `l0` is located to rounding precision.
pub fn vector_line_min<S: Scalar>(x: &Vector<S>, y: &Vector<S>) -> Result<S> {
    x.space().check(&y.space())?;
    if y.is_zero() {
        return Ok(S::zero());
    }
    let scale = (x.norm() / y.norm()).max(S::lit(1e-300));
    let start = minimize_convex(|l| x.plus_scaled(l, y).expect("same space").norm(), S::zero(), scale, scale * S::lit(LINE_WIDTH)).arg;
    let derivs = |l: S| -> Result<DerivativePair<S>> {
        let p = x.plus_scaled(l, y)?;
        if p.is_zero() {
            return Ok(DerivativePair { left: -y.norm(), right: y.norm() });
        }
        one_sided_derivatives(&p, y)
    };
    bisect_subgradient(start, scale, derivs)
}

/// Finds `l` with `left(l) <= 0 <= right(l)` for monotone one-sided
/// derivatives, starting the bracket search at `start`.
pub(crate) fn bisect_subgradient<S: Scalar, F: FnMut(S) -> Result<DerivativePair<S>>>(start: S, scale: S, mut derivs: F) -> Result<S> {
    let d = derivs(start)?;
    if d.left <= S::zero() && d.right >= S::zero() {
        return Ok(start);
    }
    let (mut lo, mut hi) = (start, start);
    let mut w = scale * S::lit(1e-6);
    if d.right < S::zero() {
        for _ in 0..200 {
            hi = start + w;
            if derivs(hi)?.right >= S::zero() {
                break;
            }
            lo = hi;
            w = w + w;
        }
    } else {
        for _ in 0..200 {
            lo = start - w;
            if derivs(lo)?.left <= S::zero() {
                break;
            }
            hi = lo;
            w = w + w;
        }
    }
    for _ in 0..BISECT_ITERS {
        let mid = (lo + hi) / S::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let d = derivs(mid)?;
        if d.right < S::zero() {
            lo = mid;
        } else if d.left > S::zero() {
            hi = mid;
        } else {
            return Ok(mid);
        }
    }
    Ok((lo + hi) / S::lit(2.0))
}

/// Evidence for or against `T _|_B A`, read off `g(l) = ||T + l A||`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrthoCertificate<S> {
    pub verdict: bool,
    /// Global minimizer of `g`.
    pub lambda_star: S,
    pub min_value: S,
    pub norm_t: S,
    pub left_right_derivs: DerivativePair<S>,
    /// `x` in `M_T` with `Tx _|_B Ax` (Euclidean operators only).
    pub witness: Option<Vector<S>>,
    /// Absolute tolerance applied to the derivative signs.
    pub tol: S,
    pub method: NormMethod,
}

/// Decides `T _|_B A` from the one-sided derivatives of `g(l) = ||T + l A||`
/// at zero and locates the global minimizer of `g` by golden section on an
/// expanding bracket. The derivatives are exact whenever the operator norm
/// is ([`norm_derivatives`]); for sampled norms they are difference
/// quotients with two Richardson levels, and an accuracy estimate too coarse
/// to resolve the quotients gives [`Error::Inconclusive`].
pub fn bj_op<S: Scalar>(t: &Operator<S>, a: &Operator<S>) -> Result<OrthoCertificate<S>> {
    t.check_shape(a)?;
    if t.is_zero() {
        return Err(Error::ZeroOperator);
    }
    let base = op_norm(t);
    let norm_t = base.value;
    let norm_a = op_norm(a).value;
    let method = base.method;
    if a.is_zero() {
        return Ok(OrthoCertificate {
            verdict: true,
            lambda_star: S::zero(),
            min_value: norm_t,
            norm_t,
            left_right_derivs: DerivativePair { left: S::zero(), right: S::zero() },
            witness: None,
            tol: S::zero(),
            method,
        });
    }
    let tol = S::lit(VERDICT_TOL) * norm_a;
    let scale = norm_t / norm_a;
    if !base.is_exact() {
        let noise = base.accuracy.max(S::lit(1e-12) * norm_t) / (S::lit(DERIV_STEPS[2]) * scale);
        if noise > tol {
            return Err(Error::Inconclusive { accuracy: base.accuracy.to_f64_lossy(), tol: VERDICT_TOL });
        }
    }
    let g = |l: S| op_norm(&t.plus_scaled(l, a).expect("same shape")).value;
    // difference quotients misjudge kinks and non-quadratic minima (an `lp`
    // coordinate crossing zero contributes `|l|^p`), so exact paths skip them
    let derivs = match norm_derivatives(t, a)? {
        Some(d) => d,
        None => richardson_derivatives(&g, norm_t, scale, norm_a),
    };
    let verdict = derivs.left <= tol && derivs.right >= -tol;
    let found = minimize_convex(&g, S::zero(), scale, scale * S::lit(LINE_WIDTH));
    let witness = if verdict && t.is_euclidean() {
        euclidean_witness(t, a, &base, VERDICT_TOL)
    } else {
        None
    };
    Ok(OrthoCertificate {
        verdict,
        lambda_star: found.arg,
        min_value: found.value.min(norm_t),
        norm_t,
        left_right_derivs: derivs,
        witness,
        tol,
        method,
    })
}

/// One-sided derivatives of `g` at zero. Quotients at `t, t/2, t/4` are
/// extrapolated twice; when the two first-level extrapolations disagree by
/// more than a tenth of the verdict tolerance (a kink or strong curvature
/// inside the stencil) the stencil shrinks eightfold, down to `1e-7`.
fn richardson_derivatives<S: Scalar, G: Fn(S) -> S>(g: &G, g0: S, scale: S, norm_a: S) -> DerivativePair<S> {
    let consistency = S::lit(0.1 * VERDICT_TOL) * norm_a;
    let one_side = |dir: S| -> S {
        let mut step = S::lit(DERIV_STEPS[0]);
        let min_step = S::lit(MIN_DERIV_STEP);
        let two = S::lit(2.0);
        let mut last = S::nan();
        while step >= min_step {
            let q = |h: S| (g(dir * h * scale) - g0) / (h * scale);
            let (d1, d2, d3) = (q(step), q(step / two), q(step / S::lit(4.0)));
            let r1 = two * d2 - d1;
            let r2 = two * d3 - d2;
            last = (S::lit(4.0) * r2 - r1) / S::lit(3.0);
            if (r1 - r2).abs() <= consistency {
                break;
            }
            step = step / S::lit(8.0);
        }
        dir * last
    };
    DerivativePair { left: one_side(-S::one()), right: one_side(S::one()) }
}

fn euclidean_witness<S: Scalar>(t: &Operator<S>, a: &Operator<S>, norm: &OpNorm<S>, rel: f64) -> Option<Vector<S>> {
    let basis: Vec<Vec<S>> = norm.maximizers.iter().skip(1).step_by(2).map(|v| v.coords().to_vec()).collect();
    quadratic_form_witness(t, a, &basis, rel)
}

/// Zero of `x -> <Tx, Ax>` on the unit sphere of `span(basis)`, if the form
/// changes sign there (within `rel * ||T|| ||A||`): an eigenvector when an
/// extreme eigenvalue is already zero, otherwise the interpolation
/// `c e_min + s e_max` with `c^2 l_min + s^2 l_max = 0`.
fn quadratic_form_witness<S: Scalar>(t: &Operator<S>, a: &Operator<S>, basis: &[Vec<S>], rel: f64) -> Option<Vector<S>> {
    if basis.is_empty() {
        return None;
    }
    let eig = restricted_form(t, a, basis);
    let k = basis.len();
    let tol = S::lit(rel) * op_norm(t).value * op_norm(a).value;
    let (lmax, lmin) = (eig.values[0], eig.values[k - 1]);
    if lmin > tol || lmax < -tol {
        return None;
    }
    let coeffs: Vec<S> = if lmin.abs() <= tol {
        eig.vectors[k - 1].clone()
    } else if lmax.abs() <= tol {
        eig.vectors[0].clone()
    } else {
        let span = lmax - lmin;
        let c = (lmax / span).sqrt();
        let s = (-lmin / span).sqrt();
        eig.vectors[k - 1].iter().zip(&eig.vectors[0]).map(|(&u, &v)| c * u + s * v).collect()
    };
    let dim = t.cols();
    let mut x = vec![S::zero(); dim];
    for (c, b) in coeffs.iter().zip(basis) {
        for (xi, &bi) in x.iter_mut().zip(b) {
            *xi = *xi + *c * bi;
        }
    }
    Vector::new(t.domain(), x).ok()?.normalized().ok()
}

/// Resolution at which [`witness_search`] decides `Tx _|_B Ax` on a sample:
/// the verdict tolerance when `M_T` is exact, otherwise `sqrt(2 tol)`, the
/// distance from `M_T` a point with `||Tx|| >= (1 - tol) ||T||` can have.
pub fn witness_resolution<S>(s: &AttainmentSample<S>) -> f64 {
    if s.exact {
        VERDICT_TOL
    } else {
        (2.0 * s.tol).sqrt().max(VERDICT_TOL)
    }
}

/// Looks for `x` in the sampled `M_T` with `Tx _|_B Ax`, up to
/// [`witness_resolution`] (relative to `||Ax||`).
///
/// Euclidean samples with a known attaining subspace use the quadratic form
/// `x -> <Tx, Ax>` restricted to it. Otherwise sample points are classified
/// by `direction_class(Tx, Ax)`, and linked pairs of opposite classes are
/// bisected along the chord (kept only while the chord stays in `M_T`).
pub fn witness_search<S: Scalar>(t: &Operator<S>, a: &Operator<S>, s: &AttainmentSample<S>) -> Result<Option<Vector<S>>> {
    t.check_shape(a)?;
    if let (true, Some(basis)) = (t.is_euclidean(), &s.subspace_basis) {
        let basis: Vec<Vec<S>> = basis.iter().map(|b| b.coords().to_vec()).collect();
        return Ok(quadratic_form_witness(t, a, &basis, VERDICT_TOL));
    }
    let resolution = witness_resolution(s).min(0.5);
    let classify = |x: &Vector<S>| -> Result<(bool, bool)> {
        let (tx, ax) = (t.apply(x)?, a.apply(x)?);
        if tx.is_zero() {
            return Ok((true, true));
        }
        let c = direction_class_eps(&tx, &ax, resolution)?;
        Ok((c.in_plus, c.in_minus))
    };
    let mut plus_only = Vec::new();
    let mut minus_only = Vec::new();
    for x in &s.points {
        match classify(x)? {
            (true, true) => return Ok(Some(x.clone())),
            (true, false) => plus_only.push(x),
            (false, true) => minus_only.push(x),
            (false, false) => {}
        }
    }
    let threshold = s.norm_value - S::lit(s.tol) * s.norm_value;
    for u in &plus_only {
        let Some(v) = minus_only
            .iter()
            .filter(|v| u.euclidean_distance(v) < s.link_radius)
            .min_by(|p, q| u.euclidean_distance(p).partial_cmp(&u.euclidean_distance(q)).unwrap_or(std::cmp::Ordering::Equal))
        else {
            continue;
        };
        let (mut lo, mut hi) = ((*u).clone(), (*v).clone());
        for _ in 0..60 {
            let Ok(mid) = lo.add(&hi).and_then(|m| m.normalized()) else { break };
            if t.apply(&mid)?.norm() < threshold {
                break;
            }
            match classify(&mid)? {
                (true, true) => return Ok(Some(mid)),
                (true, false) => lo = mid,
                (false, true) => hi = mid,
                (false, false) => break,
            }
        }
    }
    Ok(None)
}

/// Norm-retrieval suprema. Fields not computed by a given call are `None`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RetrievalReport<S> {
    /// `||T||` or `||f||`.
    pub norm: S,
    pub sup_pos: Option<S>,
    pub sup_neg: Option<S>,
    pub eps: Option<f64>,
    pub l1_eps: Option<S>,
    pub l2_eps: Option<S>,
    pub l3_eps: Option<S>,
    pub k1: Option<S>,
    pub k2: Option<S>,
    pub l_eps: Option<S>,
    /// The dual space is strictly convex, so `k1 = k2 = ||f||` is asserted.
    pub exact_identity: Option<bool>,
}

impl<S: Scalar> RetrievalReport<S> {
    fn empty(norm: S) -> Self {
        RetrievalReport {
            norm,
            sup_pos: None,
            sup_neg: None,
            eps: None,
            l1_eps: None,
            l2_eps: None,
            l3_eps: None,
            k1: None,
            k2: None,
            l_eps: None,
            exact_identity: None,
        }
    }

    /// Largest deviation from the norm among the quantities the retrieval
    /// theorems assert to equal it.
    pub fn identity_gap(&self) -> S {
        let n = self.norm;
        let mut gaps: Vec<S> = Vec::new();
        let max_of = |a: Option<S>, b: Option<S>| match (a, b) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        if self.k1.is_none() {
            gaps.extend(self.sup_pos.iter().chain(&self.sup_neg).map(|&v| (v - n).abs()));
            gaps.extend(max_of(self.l1_eps, self.l2_eps).map(|v| (v - n).abs()));
            gaps.extend(max_of(self.l1_eps, self.l3_eps).map(|v| (v - n).abs()));
        } else {
            if self.exact_identity == Some(true) {
                gaps.extend(self.k1.iter().chain(&self.k2).map(|&v| (v - n).abs()));
            }
            gaps.extend(max_of(self.l_eps, self.k1).map(|v| (v - n).abs()));
            gaps.extend(max_of(self.l_eps, self.k2).map(|v| (v - n).abs()));
        }
        gaps.into_iter().fold(S::zero(), S::max)
    }

    /// Largest excess of any reported supremum over the norm.
    pub fn max_excess(&self) -> S {
        [self.sup_pos, self.sup_neg, self.l1_eps, self.l2_eps, self.l3_eps, self.k1, self.k2, self.l_eps]
            .into_iter()
            .flatten()
            .map(|v| v - self.norm)
            .fold(S::neg_infinity(), S::max)
    }
}

/// Feasibility rule for `(x, y, f)` in a retrieval supremum.
#[derive(Clone, Copy, Debug)]
enum SipConstraint {
    /// `[Ax, y] >= 0`
    NonNeg,
    /// `[Ax, y] <= 0`
    NonPos,
    /// `|[Ax, y]| < eps`
    Below(f64),
    /// `Ax in y^{+eps}`
    PlusEps(f64),
    /// `Ax in y^{-eps}`
    MinusEps(f64),
}

/// `sup { [Tx, y] : x in S_X, y in S_Y, [,] a semi-inner product, constraint }`
/// by joint sampling of `(x, y)` over every extreme functional at `y`,
/// followed by local refinement of the best feasible candidates.
fn sip_sup<S: Scalar>(t: &Operator<S>, a: &Operator<S>, constraint: SipConstraint, seed: u64) -> Result<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (dom, cod) = (t.domain(), t.codomain());
    let objective = |b: &[Vector<S>]| -> Option<S> {
        let (x, y) = (&b[0], &b[1]);
        let tx = t.apply_raw(x.coords());
        let ax = a.apply_raw(x.coords());
        let ax_vec = Vector::new(cod, ax.clone()).ok()?;
        let rel = match constraint {
            SipConstraint::PlusEps(e) | SipConstraint::MinusEps(e) => {
                let d = one_sided_derivatives(y, &ax_vec).ok()?;
                let slack = S::lit(e) * ax_vec.norm() + S::lit(DIRECTION_TOL);
                let ok = match constraint {
                    SipConstraint::PlusEps(_) => d.right >= -slack,
                    _ => d.left <= slack,
                };
                if !ok {
                    return None;
                }
                None
            }
            other => Some(other),
        };
        support_extremes(y)
            .ok()?
            .iter()
            .filter(|f| match rel {
                None => true,
                Some(SipConstraint::NonNeg) => f.apply_unchecked(&ax) >= S::zero(),
                Some(SipConstraint::NonPos) => f.apply_unchecked(&ax) <= S::zero(),
                Some(SipConstraint::Below(e)) => f.apply_unchecked(&ax).abs() < S::lit(e),
                Some(_) => true,
            })
            .map(|f| f.apply_unchecked(&tx))
            .fold(None, |best: Option<S>, v| Some(best.map_or(v, |b| b.max(v))))
    };
    let mut scored: Vec<(S, Vec<Vector<S>>)> = Vec::with_capacity(SUP_KEEP + 1);
    for _ in 0..SUP_SAMPLES {
        let x = random_unit::<S, _>(&mut rng, dom);
        // half the samples look along Tx, where the supremum concentrates
        let y = if rng.random::<bool>() {
            match t.apply(&x)?.plus_scaled(S::lit(0.3), &random_unit::<S, _>(&mut rng, cod))?.normalized() {
                Ok(y) => y,
                Err(_) => random_unit::<S, _>(&mut rng, cod),
            }
        } else {
            random_unit::<S, _>(&mut rng, cod)
        };
        let blocks = vec![x, y];
        if let Some(v) = objective(&blocks) {
            scored.push((v, blocks));
            if scored.len() > 4 * SUP_KEEP {
                keep_best(&mut scored, SUP_KEEP);
            }
        }
    }
    keep_best(&mut scored, SUP_KEEP);
    let mut best = S::neg_infinity();
    for (_, blocks) in scored {
        let (_, v) = refine_on_spheres(blocks, objective, SphereRefine::default(), &mut rng);
        best = best.max(v);
    }
    Ok(best)
}

fn keep_best<S: Scalar, T>(v: &mut Vec<(S, T)>, k: usize) {
    v.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    v.truncate(k);
}

fn require_orthogonal<S: Scalar>(t: &Operator<S>, a: &Operator<S>) -> Result<()> {
    let cert = bj_op(t, a)?;
    if cert.verdict {
        Ok(())
    } else {
        Err(Error::HypothesisViolation(format!(
            "T is not Birkhoff-James orthogonal to A (derivatives {:e}, {:e})",
            cert.left_right_derivs.left.to_f64_lossy(),
            cert.left_right_derivs.right.to_f64_lossy()
        )))
    }
}

/// `sup [Tx, y]` over `[Ax, y] >= 0` and over `[Ax, y] <= 0`; both equal
/// `||T||` when `T _|_B A`.
pub fn norm_retrieval_op<S: Scalar>(t: &Operator<S>, a: &Operator<S>) -> Result<RetrievalReport<S>> {
    require_orthogonal(t, a)?;
    Ok(RetrievalReport {
        sup_pos: Some(sip_sup(t, a, SipConstraint::NonNeg, SUP_SEED)?),
        sup_neg: Some(sip_sup(t, a, SipConstraint::NonPos, SUP_SEED ^ 1)?),
        ..RetrievalReport::empty(op_norm(t).value)
    })
}

/// The relaxed suprema `l1(eps)` (`|[Ax, y]| < eps`), `l2(eps)`
/// (`Ax in y^{+eps}`) and `l3(eps)` (`Ax in y^{-eps}`), alongside the exact
/// ones. `max(l1, l2) = max(l1, l3) = ||T||` when `T _|_B A`.
pub fn norm_retrieval_op_eps<S: Scalar>(t: &Operator<S>, a: &Operator<S>, eps: f64) -> Result<RetrievalReport<S>> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    let mut report = norm_retrieval_op(t, a)?;
    report.eps = Some(eps);
    report.l1_eps = Some(sip_sup(t, a, SipConstraint::Below(eps), SUP_SEED ^ 2)?);
    report.l2_eps = Some(sip_sup(t, a, SipConstraint::PlusEps(eps), SUP_SEED ^ 3)?);
    report.l3_eps = Some(sip_sup(t, a, SipConstraint::MinusEps(eps), SUP_SEED ^ 4)?);
    Ok(report)
}

/// `sup f(x)` over unit `x` with `accept(g(x))`.
fn functional_sup<S: Scalar, C: Fn(S) -> bool>(f: &Functional<S>, g: &Functional<S>, accept: C, seed: u64) -> S {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = f.predual();
    let objective = |b: &[Vector<S>]| -> Option<S> {
        let x = b[0].coords();
        accept(g.apply_unchecked(x)).then(|| f.apply_unchecked(x))
    };
    let mut scored: Vec<(S, Vec<Vector<S>>)> = Vec::new();
    for _ in 0..SUP_SAMPLES {
        let blocks = vec![random_unit::<S, _>(&mut rng, space)];
        if let Some(v) = objective(&blocks) {
            scored.push((v, blocks));
            if scored.len() > 4 * SUP_KEEP {
                keep_best(&mut scored, SUP_KEEP);
            }
        }
    }
    keep_best(&mut scored, SUP_KEEP);
    scored
        .into_iter()
        .map(|(_, b)| refine_on_spheres(b, objective, SphereRefine::default(), &mut rng).1)
        .fold(S::neg_infinity(), S::max)
}

/// Norm retrieval for functionals `f _|_B g` (orthogonality in the dual norm).
///
/// `k1 = sup { f(x) : g(x) >= 0 }`, `k2 = sup { f(x) : g(x) <= 0 }` over the
/// unit sphere, and `l(eps) = sup { f(x) : |g(x)| < eps }` when `eps` is
/// given. `k1 = k2 = ||f||` needs a strictly convex dual; without it only
/// `max(l(eps), k1) = max(l(eps), k2) = ||f||` holds, and omitting `eps`
/// is an error.
pub fn norm_retrieval_functional<S: Scalar>(f: &Functional<S>, g: &Functional<S>, eps: Option<f64>) -> Result<RetrievalReport<S>> {
    f.predual().check(&g.predual())?;
    if let Some(e) = eps {
        if !(e > 0.0) || !e.is_finite() {
            return Err(Error::EpsilonOutOfRange(e));
        }
    }
    if !bj_vec(&f.as_dual_vector(), &g.as_dual_vector())?.orthogonal {
        return Err(Error::HypothesisViolation("f is not Birkhoff-James orthogonal to g".into()));
    }
    let strictly_convex = f.predual().norm.dual().is_strictly_convex();
    if !strictly_convex && eps.is_none() {
        return Err(Error::NotStrictlyConvex);
    }
    let zero = S::zero();
    Ok(RetrievalReport {
        k1: Some(functional_sup(f, g, |v| v >= zero, SUP_SEED ^ 5)),
        k2: Some(functional_sup(f, g, |v| v <= zero, SUP_SEED ^ 6)),
        eps,
        l_eps: eps.map(|e| functional_sup(f, g, |v| v.abs() < S::lit(e), SUP_SEED ^ 7)),
        exact_identity: Some(strictly_convex),
        ..RetrievalReport::empty(f.dual_norm())
    })
}
