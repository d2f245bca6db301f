//! Linear operators between `lp` spaces: operator norms, norm attainment sets
//! `M_T = { x in S_X : ||Tx|| = ||T|| }` and their connectivity structure.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, top_singular, SymEigen};
use crate::scalar::Scalar;
use crate::search::{refine_on_spheres, SphereRefine};
use crate::spaces::{one_sided_derivatives, raw_norm, sphere_sample, support_extremes, DerivativePair, Norm, Space, Vector};

/// Default sampling budget for sampled norms and attainment sets (2^13).
pub const DEFAULT_BUDGET: usize = 1 << 13;
/// Default relative tolerance for membership in `M_T`.
pub const DEFAULT_ATTAIN_TOL: f64 = 1e-6;
/// Largest dimension for which `{-1, 1}^n` is enumerated.
pub const SIGN_ENUM_MAX_DIM: usize = 20;
pub const DEFAULT_SEED: u64 = 0x5eed_b1a5;

const REFINE_KEEP: usize = 32;
const ATTAIN_REFINE_KEEP: usize = 64;
const TIE_REL: f64 = 1e-12;
/// Cap on points drawn inside an exactly known attaining subspace.
const SUBSPACE_SAMPLE_CAP: usize = 1024;
/// Link radius as a multiple of the largest spanning-tree edge of the raw sample.
const LINK_FACTOR: f64 = 1.5;
const COMBINATION_PAIRS: usize = 64;
/// Largest sign-vector length enumerated to seed an attainment sample.
const EXTREME_SEED_MAX_DIM: usize = 12;

/// Dense real matrix `T : domain -> codomain`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
    domain: Space,
    codomain: Space,
}

impl<S: Scalar> Operator<S> {
    pub fn new(domain: Space, codomain: Space, matrix: Vec<Vec<S>>) -> Result<Self> {
        if matrix.len() != codomain.dim {
            return Err(Error::DimensionMismatch { expected: codomain.dim, found: matrix.len() });
        }
        let mut data = Vec::with_capacity(domain.dim * codomain.dim);
        for row in matrix {
            if row.len() != domain.dim {
                return Err(Error::DimensionMismatch { expected: domain.dim, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Operator { rows: codomain.dim, cols: domain.dim, data, domain, codomain })
    }

    pub fn from_f64(domain: Space, codomain: Space, matrix: &[&[f64]]) -> Result<Self> {
        Operator::new(domain, codomain, matrix.iter().map(|r| r.iter().map(|&c| S::lit(c)).collect()).collect())
    }

    /// Operator whose `j`-th column is the image of the `j`-th basis vector.
    pub fn from_images(domain: Space, codomain: Space, images: &[&[f64]]) -> Result<Self> {
        if images.len() != domain.dim {
            return Err(Error::DimensionMismatch { expected: domain.dim, found: images.len() });
        }
        let matrix = (0..codomain.dim)
            .map(|r| images.iter().map(|col| col.get(r).copied().map(S::lit)).collect::<Option<Vec<S>>>())
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::DimensionMismatch { expected: codomain.dim, found: images.iter().map(|c| c.len()).min().unwrap_or(0) })?;
        Operator::new(domain, codomain, matrix)
    }

    pub fn from_flat(domain: Space, codomain: Space, data: Vec<S>) -> Result<Self> {
        if data.len() != domain.dim * codomain.dim {
            return Err(Error::DimensionMismatch { expected: domain.dim * codomain.dim, found: data.len() });
        }
        Ok(Operator { rows: codomain.dim, cols: domain.dim, data, domain, codomain })
    }

    pub fn zero(domain: Space, codomain: Space) -> Self {
        Operator { rows: codomain.dim, cols: domain.dim, data: vec![S::zero(); domain.dim * codomain.dim], domain, codomain }
    }

    pub fn identity(space: Space) -> Self {
        let mut op = Operator::zero(space, space);
        for i in 0..space.dim {
            op.data[i * space.dim + i] = S::one();
        }
        op
    }

    pub fn domain(&self) -> Space {
        self.domain
    }

    pub fn codomain(&self) -> Space {
        self.codomain
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> S {
        self.data[r * self.cols + c]
    }

    pub fn flat(&self) -> &[S] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<S> {
        (0..self.rows).map(|r| self.entry(r, c)).collect()
    }

    pub fn matrix(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn apply(&self, x: &Vector<S>) -> Result<Vector<S>> {
        self.domain.check(&x.space())?;
        Vector::new(self.codomain, self.apply_raw(x.coords()))
    }

    pub(crate) fn apply_raw(&self, x: &[S]) -> Vec<S> {
        (0..self.rows).map(|r| self.row(r).iter().zip(x).map(|(&a, &b)| a * b).sum()).collect()
    }

    /// `||T x||` without allocating a codomain vector wrapper.
    pub(crate) fn image_norm(&self, x: &[S]) -> S {
        raw_norm(&self.apply_raw(x), self.codomain.norm)
    }

    pub fn scale(&self, alpha: S) -> Self {
        Operator { data: self.data.iter().map(|&v| v * alpha).collect(), ..self.clone() }
    }

    /// `self + alpha * other`.
    pub fn plus_scaled(&self, alpha: S, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Operator { data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + alpha * b).collect(), ..self.clone() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.plus_scaled(S::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.plus_scaled(-S::one(), other)
    }

    pub fn check_shape(&self, other: &Self) -> Result<()> {
        self.domain.check(&other.domain)?;
        self.codomain.check(&other.codomain)
    }

    /// Adjoint `T^T : Y* -> X*`, which has the same operator norm.
    pub fn adjoint(&self) -> Self {
        let data = (0..self.cols).flat_map(|c| (0..self.rows).map(move |r| (r, c))).map(|(r, c)| self.entry(r, c)).collect();
        Operator { rows: self.cols, cols: self.rows, data, domain: self.codomain.dual(), codomain: self.domain.dual() }
    }

    pub fn is_euclidean(&self) -> bool {
        self.domain.norm.is_euclidean() && self.codomain.norm.is_euclidean()
    }

    pub fn frobenius(&self) -> S {
        self.data.iter().map(|&v| v * v).sum::<S>().sqrt()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
struct OperatorRepr<S> {
    matrix: Vec<Vec<S>>,
    domain: Norm,
    codomain: Norm,
}

impl<S: Scalar + Serialize> Serialize for Operator<S> {
    fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        OperatorRepr { matrix: self.matrix(), domain: self.domain.norm, codomain: self.codomain.norm }.serialize(serializer)
    }
}

impl<'de, S: Scalar + Deserialize<'de>> Deserialize<'de> for Operator<S> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = OperatorRepr::<S>::deserialize(deserializer)?;
        let rows = repr.matrix.len();
        let cols = repr.matrix.first().map_or(0, |r| r.len());
        let domain = Space::new(cols, repr.domain).map_err(serde::de::Error::custom)?;
        let codomain = Space::new(rows, repr.codomain).map_err(serde::de::Error::custom)?;
        Operator::new(domain, codomain, repr.matrix).map_err(serde::de::Error::custom)
    }
}

/// How an operator norm was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    /// Largest singular value (`L2 -> L2`).
    Spectral,
    /// Largest column norm (`L1` domain).
    ColumnMax,
    /// Largest dual norm of a row (`Linf` codomain).
    RowDualMax,
    /// Maximum over sign vectors (`Linf` domain).
    SignEnumeration,
    /// Sign enumeration on the adjoint (`L1` codomain).
    AdjointSignEnumeration,
    /// Sphere sampling with local refinement.
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpNorm<S> {
    pub value: S,
    /// Zero for exact methods; half the gap between the best and fifth-best
    /// refined value otherwise.
    pub accuracy: S,
    pub method: NormMethod,
    /// Unit vectors where the value was attained (both signs for exact methods).
    #[serde(skip)]
    pub maximizers: Vec<Vector<S>>,
}

impl<S: Scalar> OpNorm<S> {
    pub fn is_exact(&self) -> bool {
        self.method != NormMethod::Sampled
    }
}

/// Sampling settings for the non-exact paths.
#[derive(Clone, Copy, Debug)]
pub struct SampleOptions {
    pub budget: usize,
    pub seed: u64,
    pub refine: SphereRefine,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions { budget: DEFAULT_BUDGET, seed: DEFAULT_SEED, refine: SphereRefine::default() }
    }
}

/// `||T||` with default sampling settings.
pub fn op_norm<S: Scalar>(t: &Operator<S>) -> OpNorm<S> {
    op_norm_with(t, &SampleOptions::default())
}

pub fn op_norm_with<S: Scalar>(t: &Operator<S>, opts: &SampleOptions) -> OpNorm<S> {
    let (dom, cod) = (t.domain.norm, t.codomain.norm);
    if dom.is_euclidean() && cod.is_euclidean() {
        let top = top_singular(&t.data, t.rows, t.cols, S::lit(TIE_REL));
        let maximizers = top
            .basis
            .iter()
            .flat_map(|v| {
                let x = Vector::new(t.domain, v.clone()).expect("basis vector dimension");
                [x.neg(), x]
            })
            .collect();
        return OpNorm { value: top.sigma, accuracy: S::zero(), method: NormMethod::Spectral, maximizers };
    }
    if dom.is_l1() {
        let values: Vec<S> = (0..t.cols).map(|c| raw_norm(&t.column(c), cod)).collect();
        return exact_from_candidates(values, NormMethod::ColumnMax, |c| vec![Vector::basis(t.domain, c)]);
    }
    if dom == Norm::Linf && t.cols <= SIGN_ENUM_MAX_DIM {
        let signs = sign_vectors::<S>(t.cols);
        let values: Vec<S> = signs.iter().map(|s| t.image_norm(s)).collect();
        return exact_from_candidates(values, NormMethod::SignEnumeration, |k| {
            vec![Vector::new(t.domain, signs[k].clone()).expect("sign vector dimension")]
        });
    }
    if cod == Norm::Linf {
        let values: Vec<S> = (0..t.rows).map(|r| raw_norm(t.row(r), dom.dual())).collect();
        return exact_from_candidates(values, NormMethod::RowDualMax, |r| dual_support(t.domain, t.row(r)));
    }
    if cod.is_l1() && t.rows <= SIGN_ENUM_MAX_DIM {
        let adj = t.adjoint();
        let signs = sign_vectors::<S>(t.rows);
        let images: Vec<Vec<S>> = signs.iter().map(|s| adj.apply_raw(s)).collect();
        let values: Vec<S> = images.iter().map(|w| raw_norm(w, dom.dual())).collect();
        return exact_from_candidates(values, NormMethod::AdjointSignEnumeration, |k| dual_support(t.domain, &images[k]));
    }
    sampled_norm(t, opts)
}

/// Representative unit vectors of `{x : ||x|| = 1, <w, x> = ||w||_*}`.
fn dual_support<S: Scalar>(domain: Space, w: &[S]) -> Vec<Vector<S>> {
    let dual = Vector::new(domain.dual(), w.to_vec()).expect("dual vector dimension");
    match support_extremes(&dual) {
        Ok(fs) => fs.into_iter().filter_map(|f| Vector::new(domain, f.coords().to_vec()).ok()).collect(),
        Err(_) => Vec::new(),
    }
}

fn sign_vectors<S: Scalar>(n: usize) -> Vec<Vec<S>> {
    // first sign fixed: ||T(-s)|| = ||Ts||
    (0..1usize << (n - 1))
        .map(|mask| {
            (0..n)
                .map(|i| if i > 0 && mask & (1 << (i - 1)) != 0 { -S::one() } else { S::one() })
                .collect()
        })
        .collect()
}

fn exact_from_candidates<S: Scalar, F: Fn(usize) -> Vec<Vector<S>>>(values: Vec<S>, method: NormMethod, argmax: F) -> OpNorm<S> {
    let best = values.iter().copied().fold(S::zero(), S::max);
    let cut = best - S::lit(TIE_REL) * best;
    let mut maximizers = Vec::new();
    if best > S::zero() {
        for (k, &v) in values.iter().enumerate() {
            if v >= cut {
                for x in argmax(k) {
                    if let Ok(u) = x.normalized() {
                        maximizers.push(u.neg());
                        maximizers.push(u);
                    }
                }
            }
        }
    }
    OpNorm { value: best, accuracy: S::zero(), method, maximizers }
}

fn sampled_norm<S: Scalar>(t: &Operator<S>, opts: &SampleOptions) -> OpNorm<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let candidates: Vec<Vector<S>> = sphere_sample(t.domain, opts.budget.max(1), rng.random());
    let mut scored: Vec<(S, Vector<S>)> = candidates.into_iter().map(|x| (t.image_norm(x.coords()), x)).collect();
    sort_desc(&mut scored);
    scored.truncate(REFINE_KEEP);
    let mut refined: Vec<(S, Vector<S>)> = scored
        .into_iter()
        .map(|(_, x)| {
            let (mut blocks, value) =
                refine_on_spheres(vec![x], |b: &[Vector<S>]| Some(t.image_norm(b[0].coords())), opts.refine, &mut rng);
            (value, blocks.remove(0))
        })
        .collect();
    sort_desc(&mut refined);
    let value = refined[0].0;
    let fifth = refined[refined.len().min(5) - 1].0;
    let best = refined[0].1.clone();
    OpNorm { value, accuracy: (value - fifth) / S::lit(2.0), method: NormMethod::Sampled, maximizers: vec![best.neg(), best] }
}

fn sort_desc<S: Scalar, T>(v: &mut [(S, T)]) {
    v.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
}

/// Exact one-sided derivatives of `l -> ||T + l A||` at `l = 0`, from the
/// active pieces of the norm formula (max of convex functions: the right
/// derivative is the largest active right derivative, the left the smallest
/// active left derivative). `None` when the norm is only sampled.
pub fn norm_derivatives<S: Scalar>(t: &Operator<S>, a: &Operator<S>) -> Result<Option<DerivativePair<S>>> {
    t.check_shape(a)?;
    let norm = op_norm(t);
    if t.is_zero() {
        let n = op_norm(a).value;
        return Ok(Some(DerivativePair { left: -n, right: n }));
    }
    let cut = norm.value - S::lit(ACTIVE_REL) * norm.value;
    let mut acc = ActiveSet::new();
    let (dom, cod) = (t.domain, t.codomain);
    match norm.method {
        NormMethod::Spectral => {
            let top = top_singular(&t.data, t.rows, t.cols, S::lit(ACTIVE_REL));
            let (lo, hi) = restricted_form_range(t, a, &top.basis);
            return Ok(Some(DerivativePair { left: lo / top.sigma, right: hi / top.sigma }));
        }
        NormMethod::ColumnMax => {
            for c in 0..t.cols {
                if raw_norm(&t.column(c), cod.norm) >= cut {
                    acc.push(cod, t.column(c), a.column(c))?;
                }
            }
        }
        NormMethod::RowDualMax => {
            for r in 0..t.rows {
                if raw_norm(t.row(r), dom.norm.dual()) >= cut {
                    acc.push(dom.dual(), t.row(r).to_vec(), a.row(r).to_vec())?;
                }
            }
        }
        NormMethod::SignEnumeration => {
            for s in sign_vectors::<S>(t.cols) {
                let w = t.apply_raw(&s);
                if raw_norm(&w, cod.norm) >= cut {
                    acc.push(cod, w, a.apply_raw(&s))?;
                }
            }
        }
        NormMethod::AdjointSignEnumeration => {
            let (ta, aa) = (t.adjoint(), a.adjoint());
            for s in sign_vectors::<S>(t.rows) {
                let w = ta.apply_raw(&s);
                if raw_norm(&w, dom.norm.dual()) >= cut {
                    acc.push(dom.dual(), w, aa.apply_raw(&s))?;
                }
            }
        }
        NormMethod::Sampled => return Ok(None),
    }
    Ok(Some(acc.finish()))
}

const ACTIVE_REL: f64 = 1e-9;

struct ActiveSet<S> {
    left: S,
    right: S,
}

impl<S: Scalar> ActiveSet<S> {
    fn new() -> Self {
        ActiveSet { left: S::infinity(), right: S::neg_infinity() }
    }

    fn push(&mut self, space: Space, base: Vec<S>, dir: Vec<S>) -> Result<()> {
        let d = one_sided_derivatives(&Vector::new(space, base)?, &Vector::new(space, dir)?)?;
        self.left = self.left.min(d.left);
        self.right = self.right.max(d.right);
        Ok(())
    }

    fn finish(self) -> DerivativePair<S> {
        DerivativePair { left: self.left, right: self.right }
    }
}

/// Extreme values `(min, max)` of the quadratic form `x -> <Tx, Ax>` on the
/// unit sphere of `span(basis)` (orthonormal basis, Euclidean spaces).
pub fn restricted_form_range<S: Scalar>(t: &Operator<S>, a: &Operator<S>, basis: &[Vec<S>]) -> (S, S) {
    let eig = restricted_form(t, a, basis);
    (*eig.values.last().expect("nonempty basis"), eig.values[0])
}

pub(crate) fn restricted_form<S: Scalar>(t: &Operator<S>, a: &Operator<S>, basis: &[Vec<S>]) -> SymEigen<S> {
    let k = basis.len();
    let tb: Vec<Vec<S>> = basis.iter().map(|b| t.apply_raw(b)).collect();
    let ab: Vec<Vec<S>> = basis.iter().map(|b| a.apply_raw(b)).collect();
    let dot = |u: &[S], v: &[S]| u.iter().zip(v).map(|(&x, &y)| x * y).sum::<S>();
    let mut q = vec![S::zero(); k * k];
    for i in 0..k {
        for j in 0..k {
            q[i * k + j] = (dot(&tb[i], &ab[j]) + dot(&tb[j], &ab[i])) / S::lit(2.0);
        }
    }
    sym_eigen(&q, k)
}

/// Discrete approximation of `M_T` with its connectivity analysis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AttainmentSample<S> {
    pub points: Vec<Vector<S>>,
    /// Relative tolerance: members satisfy `||Tx|| >= (1 - tol) ||T||`.
    pub tol: f64,
    pub norm_value: S,
    /// Partition of `points` (indices) into connected components of the sample graph.
    pub components: Vec<Vec<usize>>,
    pub antipodal_ok: bool,
    pub is_subspace_sphere: bool,
    /// Graph resolution: points closer than this (Euclidean) are linked.
    pub link_radius: S,
    /// `M_T` known in closed form (top singular subspace).
    pub exact: bool,
    /// Orthonormal basis of the attaining subspace on the exact path.
    pub subspace_basis: Option<Vec<Vector<S>>>,
}

impl<S: Scalar> AttainmentSample<S> {
    /// Builds a sample from given attaining points: components at
    /// `link_radius`, antipodal verdict, and the combination test against `t`.
    pub fn from_points(t: &Operator<S>, points: Vec<Vector<S>>, tol: f64, link_radius: S, seed: u64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyAttainment { budget: 0 });
        }
        let norm_value = op_norm(t).value;
        let components = link_components(&points, link_radius);
        let mut sample = AttainmentSample {
            points,
            tol,
            norm_value,
            components,
            antipodal_ok: false,
            is_subspace_sphere: false,
            link_radius,
            exact: false,
            subspace_basis: None,
        };
        sample.antipodal_ok = antipodal_structure(&sample);
        sample.is_subspace_sphere = closed_under_combinations(t, &sample, seed);
        Ok(sample)
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }
}

/// Samples `M_T` for relative tolerance `tol` from `budget` candidates.
///
/// `L2 -> L2` is exact: `M_T` is the unit sphere of the top right singular
/// subspace. Other pairs keep the sampled and locally refined candidates
/// (plus any exact maximizers) within `tol` of `||T||`.
pub fn attainment_sample<S: Scalar>(t: &Operator<S>, tol: f64, budget: usize, seed: u64) -> Result<AttainmentSample<S>> {
    if t.is_zero() {
        return Err(Error::ZeroOperator);
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("attainment tolerance must be positive, got {tol}")));
    }
    if t.is_euclidean() {
        return euclidean_attainment(t, tol, budget, seed);
    }
    let opts = SampleOptions { budget, seed, refine: SphereRefine::default() };
    let norm = op_norm_with(t, &opts);
    let threshold = norm.value - S::lit(tol) * norm.value;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa77a_1e55);
    let raw: Vec<Vector<S>> = sphere_sample(t.domain, budget.max(1), rng.random());
    let link_radius = S::lit(LINK_FACTOR) * max_spanning_edge(&raw);

    let mut scored: Vec<(S, Vector<S>)> = raw.into_iter().map(|x| (t.image_norm(x.coords()), x)).collect();
    sort_desc(&mut scored);
    let mut points: Vec<Vector<S>> = scored.iter().filter(|(v, _)| *v >= threshold).map(|(_, x)| x.clone()).collect();
    for (_, x) in scored.into_iter().take(ATTAIN_REFINE_KEEP) {
        let (mut b, v) = refine_on_spheres(vec![x], |b: &[Vector<S>]| Some(t.image_norm(b[0].coords())), SphereRefine::default(), &mut rng);
        if v >= threshold {
            points.push(b.remove(0));
        }
    }
    points.extend(norm.maximizers.iter().chain(&extreme_candidates(t, norm.method)).filter(|x| t.image_norm(x.coords()) >= threshold).cloned());
    if points.is_empty() {
        return Err(Error::EmptyAttainment { budget });
    }
    sort_points(&mut points);
    // a link needs its normalized midpoint in M_T too: distinct near-tied
    // maximizers can sit closer than the sample spacing
    let bridge = |p: &Vector<S>, q: &Vector<S>| p.add(q).and_then(|m| m.normalized()).is_ok_and(|m| t.image_norm(m.coords()) >= threshold);
    let components = link_components_with(&points, link_radius, bridge);
    let mut sample = AttainmentSample {
        points,
        tol,
        norm_value: norm.value,
        components,
        antipodal_ok: false,
        is_subspace_sphere: false,
        link_radius,
        exact: false,
        subspace_basis: None,
    };
    sample.antipodal_ok = antipodal_structure(&sample);
    sample.is_subspace_sphere = closed_under_combinations(t, &sample, seed);
    Ok(sample)
}

/// Every candidate an exact norm formula scans, not just the maximizing ones:
/// cube vertices (`linf` domain), `+-e_i` (`l1` domain), or the norming points
/// of each row / each `T^T s` (`linf` / `l1` codomain). Candidates within the
/// attainment tolerance but short of an exact tie are separate pieces of
/// `M_T` that random sampling can miss.
fn extreme_candidates<S: Scalar>(t: &Operator<S>, method: NormMethod) -> Vec<Vector<S>> {
    let both = |x: Vector<S>| [x.neg(), x];
    match method {
        NormMethod::ColumnMax => (0..t.cols).flat_map(|i| both(Vector::basis(t.domain, i))).collect(),
        NormMethod::SignEnumeration if t.cols <= EXTREME_SEED_MAX_DIM => {
            sign_vectors::<S>(t.cols).into_iter().flat_map(|s| both(Vector::new(t.domain, s).expect("domain size"))).collect()
        }
        NormMethod::RowDualMax => (0..t.rows).flat_map(|r| dual_support(t.domain, t.row(r))).flat_map(both).collect(),
        NormMethod::AdjointSignEnumeration if t.rows <= EXTREME_SEED_MAX_DIM => {
            let adj = t.adjoint();
            sign_vectors::<S>(t.rows).iter().flat_map(|s| dual_support(t.domain, &adj.apply_raw(s))).flat_map(both).collect()
        }
        _ => Vec::new(),
    }
}

fn euclidean_attainment<S: Scalar>(t: &Operator<S>, tol: f64, budget: usize, seed: u64) -> Result<AttainmentSample<S>> {
    let top = top_singular(t.flat(), t.rows, t.cols, S::lit(tol));
    let basis: Vec<Vector<S>> = top.basis.iter().map(|v| Vector::new(t.domain, v.clone())).collect::<Result<_>>()?;
    let (points, components) = if basis.len() == 1 {
        (vec![basis[0].clone(), basis[0].neg()], vec![vec![0], vec![1]])
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = budget.clamp(2, SUBSPACE_SAMPLE_CAP);
        let points: Vec<Vector<S>> = (0..m)
            .map(|_| loop {
                let mut x = Vector::zeros(t.domain);
                for b in &basis {
                    x = x.plus_scaled(S::lit(rng.sample::<f64, _>(StandardNormal)), b).expect("same space");
                }
                if let Ok(u) = x.normalized() {
                    break u;
                }
            })
            .collect();
        (points, vec![(0..m).collect()])
    };
    let mut sample = AttainmentSample {
        points,
        tol,
        norm_value: top.sigma,
        components,
        antipodal_ok: false,
        is_subspace_sphere: false,
        link_radius: S::zero(),
        exact: true,
        subspace_basis: Some(basis),
    };
    sample.antipodal_ok = antipodal_structure(&sample);
    sample.is_subspace_sphere = closed_under_combinations(t, &sample, seed);
    Ok(sample)
}

fn sort_points<S: Scalar>(points: &mut [Vector<S>]) {
    points.sort_by(|a, b| {
        a.coords()
            .iter()
            .zip(b.coords())
            .map(|(x, y)| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// Longest edge of the Euclidean minimum spanning tree (Prim, `O(n^2)`):
/// the smallest radius at which the sample graph is connected.
pub fn max_spanning_edge<S: Scalar>(points: &[Vector<S>]) -> S {
    let n = points.len();
    if n < 2 {
        return S::zero();
    }
    let mut in_tree = vec![false; n];
    let mut dist = vec![S::infinity(); n];
    dist[0] = S::zero();
    let mut longest = S::zero();
    for _ in 0..n {
        let mut next = usize::MAX;
        let mut best = S::infinity();
        for i in 0..n {
            if !in_tree[i] && dist[i] < best {
                best = dist[i];
                next = i;
            }
        }
        if next == usize::MAX {
            break;
        }
        in_tree[next] = true;
        longest = longest.max(best);
        for i in 0..n {
            if !in_tree[i] {
                let d = points[next].euclidean_distance(&points[i]);
                if d < dist[i] {
                    dist[i] = d;
                }
            }
        }
    }
    longest
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Connected components of the graph linking points closer than `radius`,
/// each sorted, ordered by smallest member.
pub fn link_components<S: Scalar>(points: &[Vector<S>], radius: S) -> Vec<Vec<usize>> {
    link_components_with(points, radius, |_, _| true)
}

/// [`link_components`] keeping only the links that `bridge` accepts.
fn link_components_with<S: Scalar, B: Fn(&Vector<S>, &Vector<S>) -> bool>(points: &[Vector<S>], radius: S, bridge: B) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if points[i].euclidean_distance(&points[j]) < radius && find(&mut parent, i) != find(&mut parent, j) && bridge(&points[i], &points[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Whether the sample splits as `D u (-D)` with `D` connected: negation maps
/// components onto components, and the quotient by `x ~ -x` is connected.
pub fn antipodal_structure<S: Scalar>(s: &AttainmentSample<S>) -> bool {
    let k = s.components.len();
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    let mut owner = vec![0usize; s.points.len()];
    for (c, members) in s.components.iter().enumerate() {
        for &i in members {
            owner[i] = c;
        }
    }
    let nearest_owner = |x: &Vector<S>| -> usize {
        let minus = x.neg();
        let (mut best, mut best_d) = (0, S::infinity());
        for (i, p) in s.points.iter().enumerate() {
            let d = p.euclidean_distance(&minus);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        owner[best]
    };
    let mut image = vec![usize::MAX; k];
    for (c, members) in s.components.iter().enumerate() {
        for &i in members {
            let target = nearest_owner(&s.points[i]);
            if image[c] == usize::MAX {
                image[c] = target;
            } else if image[c] != target {
                return false;
            }
        }
    }
    if (0..k).any(|c| image[image[c]] != c) {
        return false;
    }
    // quotient components are the orbits {c, -c}
    let orbits = (0..k).filter(|&c| image[c] >= c).count();
    orbits == 1
}

/// Whether normalized combinations of sampled pairs stay in `M_T` (within ten
/// times the sample tolerance). Nearly cancelling combinations are skipped.
fn closed_under_combinations<S: Scalar>(t: &Operator<S>, s: &AttainmentSample<S>, seed: u64) -> bool {
    let n = s.points.len();
    let threshold = s.norm_value - S::lit(10.0 * s.tol.max(1e-12)) * s.norm_value;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0b1_7a11);
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    if pairs.len() > COMBINATION_PAIRS {
        pairs.shuffle(&mut rng);
        pairs.truncate(COMBINATION_PAIRS);
    }
    for (i, j) in pairs {
        for _ in 0..4 {
            let a = S::lit(rng.random_range(0.1..1.0));
            let b = S::lit(rng.random_range(0.1..1.0));
            let w = s.points[i].scale(a).plus_scaled(b, &s.points[j]).expect("same space");
            if w.norm() < S::lit(0.1) * (a + b) {
                continue;
            }
            let w = w.normalized().expect("nonzero combination");
            if t.image_norm(w.coords()) < threshold {
                return false;
            }
        }
    }
    true
}
