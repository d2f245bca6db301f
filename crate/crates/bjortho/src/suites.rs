//! One check per suite: instance construction and the pass/fail decision.

use bjortho_core::approximation::{counterexample_report, dist_subspace, dist_sup_formula, line_min, trial_seed};
use bjortho_core::linalg::top_singular;
use bjortho_core::operators::{attainment_sample, op_norm, restricted_form_range, NormMethod, DEFAULT_ATTAIN_TOL};
use bjortho_core::orthogonality::{
    bj_op, norm_retrieval_functional, norm_retrieval_op, norm_retrieval_op_eps, witness_resolution, witness_search, OrthoCertificate, VERDICT_TOL,
};
use bjortho_core::sip::direction_class;
use bjortho_core::spaces::support_extremes;
use bjortho_core::{fixtures, Error, Operator64, Space};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::{Suite, SuiteConfig};
use crate::instance::{gaussian_matrix, gen_instance, spaces, trial_rng, Instance, InstanceKind};
use crate::oracles::{hausdorff_to_vertical_segments, oracle_minus, oracle_plus, value_oracle_minus, value_oracle_plus};
use crate::HarnessError;

/// Segment discretization for the Hausdorff check of the shift operator.
const SEGMENT_POINTS: usize = 2001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub status: Status,
    pub metrics: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Accumulates metrics and the first failure reason of a trial.
struct Check {
    metrics: Map<String, Value>,
    failure: Option<String>,
    inconclusive: Option<String>,
}

impl Check {
    fn new() -> Self {
        Check { metrics: Map::new(), failure: None, inconclusive: None }
    }

    fn metric(&mut self, key: &str, v: impl Into<Value>) {
        self.metrics.insert(key.to_string(), v.into());
    }

    fn require(&mut self, ok: bool, reason: impl FnOnce() -> String) {
        if !ok && self.failure.is_none() {
            self.failure = Some(reason());
        }
    }

    fn finish(self, trial: usize, seed: u64) -> TrialOutcome {
        let (status, note) = match (self.failure, self.inconclusive) {
            (Some(f), _) => (Status::Fail, Some(f)),
            (None, Some(i)) => (Status::Inconclusive, Some(i)),
            (None, None) => (Status::Pass, None),
        };
        TrialOutcome { trial, seed, status, metrics: self.metrics, note }
    }
}

/// The instance of trial `trial` of a suite.
pub fn suite_instance(config: &SuiteConfig, trial: usize) -> Result<Instance, HarnessError> {
    use InstanceKind::*;
    Ok(match config.suite {
        Suite::ThmConnectedAttainment => gen_instance(if trial % 2 == 0 { OrthogonalOperatorPair } else { OperatorPair }, config, trial)?,
        Suite::CorHilbertBhatiaSemrl => match trial % 4 {
            0 | 1 => gen_instance(OrthogonalOperatorPair, config, trial)?,
            2 => gen_instance(OperatorPair, config, trial)?,
            _ => degenerate_pair(config, trial)?,
        },
        Suite::ThmSipPlus => gen_instance(VectorPair, config, trial)?,
        Suite::ThmNormRetrievalOp | Suite::ThmNormRetrievalOpEps => gen_instance(OrthogonalOperatorPair, config, trial)?,
        Suite::ThmNormRetrievalFunctional | Suite::ThmNormRetrievalFunctionalEps => gen_instance(OrthogonalFunctionalPair, config, trial)?,
        Suite::ThmDistSpan => gen_instance(OperatorPair, config, trial)?,
        Suite::ThmDistSubspace => {
            let mut rng = trial_rng(config, trial);
            let (dom, cod) = spaces(config)?;
            let t = gaussian_matrix(&mut rng, dom, cod);
            let basis = vec![gaussian_matrix(&mut rng, dom, cod), gaussian_matrix(&mut rng, dom, cod)];
            Instance::OperatorBasis { t, basis }
        }
        Suite::EuclideanCharacterization => {
            let (dom, _) = spaces(config)?;
            if trial == 0 && dom == Space::linf(2)? {
                Instance::Fixture { name: "four-corner".into() }
            } else {
                Instance::Operator { t: gaussian_matrix(&mut trial_rng(config, trial), dom, dom) }
            }
        }
        Suite::ExampleCounterexample => Instance::Fixture { name: "counterexample".into() },
        Suite::RemarkLinfAttainment => Instance::Fixture { name: "remark-shift".into() },
    })
}

/// `T = Q1 diag(1, 1, s3, ...) Q2^T` with random orthogonal `Q1, Q2`, so the
/// top singular value is double, and a Gaussian `A`.
fn degenerate_pair(config: &SuiteConfig, trial: usize) -> Result<Instance, HarnessError> {
    let mut rng = trial_rng(config, trial);
    let (dom, cod) = spaces(config)?;
    let n = dom.dim;
    let q1 = orthonormal_columns(&gaussian_matrix(&mut rng, dom, cod));
    let q2 = orthonormal_columns(&gaussian_matrix(&mut rng, dom, cod));
    let s: Vec<f64> = (0..n).map(|i| if i < 2 { 1.0 } else { 0.9 * rng.random::<f64>() }).collect();
    let mut data = vec![0.0; n * n];
    for r in 0..n {
        for c in 0..n {
            data[r * n + c] = (0..n).map(|k| q1[k][r] * s[k] * q2[k][c]).sum();
        }
    }
    let t = Operator64::from_flat(dom, cod, data)?;
    Ok(Instance::OperatorPair { t, a: gaussian_matrix(&mut rng, dom, cod) })
}

/// Gram-Schmidt on the columns.
fn orthonormal_columns(m: &Operator64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for c in 0..m.cols() {
        let mut v = m.column(c);
        for _ in 0..2 {
            for q in &out {
                let d: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(vi, qi)| *vi -= d * qi);
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.push(v.into_iter().map(|x| x / n).collect());
    }
    out
}

/// Runs the suite's check on an instance.
pub fn check_instance(config: &SuiteConfig, trial: usize, seed: u64, instance: &Instance) -> TrialOutcome {
    let mut check = Check::new();
    if let Err(e) = dispatch(config, seed, instance, &mut check) {
        match e {
            HarnessError::Core(Error::Inconclusive { .. }) => check.inconclusive = Some(e.to_string()),
            e => check.require(false, || e.to_string()),
        }
    }
    check.finish(trial, seed)
}

/// Generates and checks trial `trial`.
pub fn run_trial(config: &SuiteConfig, trial: usize) -> TrialOutcome {
    let seed = trial_seed(config.seed, trial);
    match suite_instance(config, trial) {
        Ok(instance) => check_instance(config, trial, seed, &instance),
        Err(e) => {
            let mut c = Check::new();
            c.require(false, || format!("instance generation failed: {e}"));
            c.finish(trial, seed)
        }
    }
}

fn wrong_instance(suite: Suite) -> HarnessError {
    HarnessError::Config(format!("instance kind does not match suite {suite}"))
}

fn dispatch(config: &SuiteConfig, seed: u64, instance: &Instance, c: &mut Check) -> Result<(), HarnessError> {
    let suite = config.suite;
    match (suite, instance) {
        (Suite::ThmConnectedAttainment, Instance::OperatorPair { t, a } | Instance::OrthogonalOperatorPair { t, a, .. }) => {
            connected_attainment(config, seed, t, a, c)
        }
        (Suite::CorHilbertBhatiaSemrl, Instance::OperatorPair { t, a } | Instance::OrthogonalOperatorPair { t, a, .. }) => hilbert_pair(config, seed, t, a, c),
        (Suite::ThmSipPlus, Instance::VectorPair { x, y }) => {
            let class = direction_class(x, y)?;
            let supp = support_extremes(x)?;
            let values: Vec<f64> = supp.iter().map(|f| f.apply(y)).collect::<Result<_, _>>()?;
            let fmax = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let fmin = values.iter().copied().fold(f64::INFINITY, f64::min);
            let (op, om) = (oracle_plus(x, y, config.tol), oracle_minus(x, y, config.tol));
            c.metric("in_plus", class.in_plus);
            c.metric("in_minus", class.in_minus);
            c.metric("support_max", fmax);
            c.metric("support_min", fmin);
            c.metric("oracle_plus", op);
            c.metric("oracle_minus", om);
            // fixed-drop form, for reference only: blind to slopes below ~sqrt(2 tol)
            c.metric("value_oracle_plus", value_oracle_plus(x, y, config.tol));
            c.metric("value_oracle_minus", value_oracle_minus(x, y, config.tol));
            c.require(class.in_plus == (fmax >= -config.tol), || format!("x+ by derivative {} but max f(y) = {fmax:e}", class.in_plus));
            c.require(class.in_minus == (fmin <= config.tol), || format!("x- by derivative {} but min f(y) = {fmin:e}", class.in_minus));
            c.require(class.in_plus == op, || format!("x+ by derivative {} but ray oracle {op}", class.in_plus));
            c.require(class.in_minus == om, || format!("x- by derivative {} but ray oracle {om}", class.in_minus));
            c.require(class.in_plus || class.in_minus, || "pair in neither x+ nor x-".into());
            Ok(())
        }
        (Suite::ThmNormRetrievalOp, Instance::OrthogonalOperatorPair { t, a, .. }) => {
            let r = norm_retrieval_op(t, a)?;
            let (sp, sn) = (r.sup_pos.unwrap_or(f64::NAN), r.sup_neg.unwrap_or(f64::NAN));
            c.metric("norm", r.norm);
            c.metric("sup_pos", sp);
            c.metric("sup_neg", sn);
            close(c, "sup_pos", sp, r.norm, config.tol);
            close(c, "sup_neg", sn, r.norm, config.tol);
            c.require(r.max_excess() <= config.tol, || format!("a supremum exceeds the norm by {:e}", r.max_excess()));
            Ok(())
        }
        (Suite::ThmNormRetrievalOpEps, Instance::OrthogonalOperatorPair { t, a, .. }) => {
            let r = norm_retrieval_op_eps(t, a, config.eps)?;
            let (l1, l2, l3) = (r.l1_eps.unwrap_or(f64::NAN), r.l2_eps.unwrap_or(f64::NAN), r.l3_eps.unwrap_or(f64::NAN));
            c.metric("norm", r.norm);
            c.metric("eps", config.eps);
            c.metric("l1", l1);
            c.metric("l2", l2);
            c.metric("l3", l3);
            close(c, "max(l1, l2)", l1.max(l2), r.norm, config.tol);
            close(c, "max(l1, l3)", l1.max(l3), r.norm, config.tol);
            c.require(r.max_excess() <= config.tol, || format!("a supremum exceeds the norm by {:e}", r.max_excess()));
            Ok(())
        }
        (Suite::ThmNormRetrievalFunctional, Instance::OrthogonalFunctionalPair { f, g }) => {
            let r = norm_retrieval_functional(f, g, None)?;
            let (k1, k2) = (r.k1.unwrap_or(f64::NAN), r.k2.unwrap_or(f64::NAN));
            c.metric("norm", r.norm);
            c.metric("k1", k1);
            c.metric("k2", k2);
            close(c, "k1", k1, r.norm, config.tol);
            close(c, "k2", k2, r.norm, config.tol);
            Ok(())
        }
        (Suite::ThmNormRetrievalFunctionalEps, Instance::OrthogonalFunctionalPair { f, g }) => {
            let r = norm_retrieval_functional(f, g, Some(config.eps))?;
            let (k1, k2, l) = (r.k1.unwrap_or(f64::NAN), r.k2.unwrap_or(f64::NAN), r.l_eps.unwrap_or(f64::NAN));
            c.metric("norm", r.norm);
            c.metric("eps", config.eps);
            c.metric("k1", k1);
            c.metric("k2", k2);
            c.metric("l", l);
            close(c, "max(l, k1)", l.max(k1), r.norm, config.tol);
            close(c, "max(l, k2)", l.max(k2), r.norm, config.tol);
            Ok(())
        }
        (Suite::ThmDistSpan, Instance::OperatorPair { t, a }) => {
            let (l0, v) = line_min(t, a)?;
            let sup = dist_sup_formula(t, a)?;
            let shifted = t.plus_scaled(l0, a)?;
            let cert = bj_op(&shifted, a)?;
            c.metric("lambda0", l0);
            c.metric("line_min", v);
            c.metric("dist_sup", sup.value);
            c.metric("hypothesis_holds", sup.guaranteed);
            c.metric("shifted_orthogonal", cert.verdict);
            c.require(cert.verdict, || "T + l0 A is not orthogonal to A at the line minimizer".into());
            if sup.guaranteed {
                close(c, "dist_sup", sup.value, v, config.tol);
            } else if (sup.value - v).abs() > config.tol {
                c.metric("unguaranteed_gap", (sup.value - v).abs());
            }
            Ok(())
        }
        (Suite::ThmDistSubspace, Instance::OperatorBasis { t, basis }) => {
            let r = dist_subspace(t, basis)?;
            let first = dist_subspace(t, &basis[..1])?;
            let norm_t = op_norm(t).value;
            c.metric("dist_min", r.dist_min);
            c.metric("dist_sup", r.dist_sup);
            c.metric("dist_first", first.dist_min);
            c.metric("coefficients", r.coefficients.clone());
            c.require(r.dist_min <= first.dist_min + 1e-9, || format!("distance grew with the basis: {:e} > {:e}", r.dist_min, first.dist_min));
            c.require(r.dist_min >= 0.0 && r.dist_min <= norm_t + 1e-9, || format!("distance {:e} outside [0, ||T||]", r.dist_min));
            if r.hypothesis.holds() {
                close(c, "dist_sup", r.dist_sup, r.dist_min, config.tol);
            }
            Ok(())
        }
        (Suite::EuclideanCharacterization, Instance::Operator { .. } | Instance::Fixture { .. }) => {
            let t = match instance {
                Instance::Operator { t } => t.clone(),
                _ => fixtures::four_corner(),
            };
            let s = attainment_sample(&t, config.tol, config.budget, seed)?;
            c.metric("antipodal_ok", s.antipodal_ok);
            c.metric("is_subspace_sphere", s.is_subspace_sphere);
            c.metric("components", s.component_count());
            c.metric("violator", !(s.antipodal_ok && s.is_subspace_sphere));
            if t.is_euclidean() {
                c.require(s.antipodal_ok && s.is_subspace_sphere, || "Euclidean attainment set is not the sphere of a subspace".into());
            }
            if matches!(instance, Instance::Fixture { .. }) {
                c.require(!s.antipodal_ok, || "four-corner attainment set reported antipodal".into());
            }
            Ok(())
        }
        (Suite::ExampleCounterexample, Instance::Fixture { .. }) => {
            let r = counterexample_report()?;
            let far = r.m_t.iter().map(|p| dist_to_pm_e1(p)).fold(0.0, f64::max);
            c.metric("norm_t", r.norm_t);
            c.metric("ortho_a1", r.ortho_a1);
            c.metric("ortho_a2", r.ortho_a2);
            c.metric("lhs", r.lhs);
            c.metric("rhs", r.rhs);
            c.metric("strict_gap", r.strict_gap);
            c.metric("m_t_spread", far);
            c.require((r.norm_t - 1.0).abs() <= 1e-9, || format!("||T|| = {}", r.norm_t));
            c.require(far <= 1e-4, || format!("M_T sample reaches {far:e} from +-e1"));
            c.require(r.ortho_a1, || "T not orthogonal to A1".into());
            c.require(!r.ortho_a2, || "T orthogonal to A2".into());
            c.require(r.rhs >= 1.0 - config.tol, || format!("rhs = {}", r.rhs));
            c.require(r.lhs <= 1.0 - 1e-3, || format!("lhs = {}", r.lhs));
            c.require(r.strict_gap > 0.0, || format!("strict gap = {}", r.strict_gap));
            Ok(())
        }
        (Suite::RemarkLinfAttainment, Instance::Fixture { .. }) => {
            let t = fixtures::remark_shift::<f64>();
            let norm = op_norm(&t);
            let s = attainment_sample(&t, DEFAULT_ATTAIN_TOL, config.budget, seed)?;
            let pts: Vec<[f64; 2]> = s.points.iter().map(|p| [p.coords()[0], p.coords()[1]]).collect();
            let h = hausdorff_to_vertical_segments(&pts, SEGMENT_POINTS);
            c.metric("norm", norm.value);
            c.metric("exact", norm.method == NormMethod::SignEnumeration);
            c.metric("hausdorff", h);
            c.metric("components", s.component_count());
            c.metric("antipodal_ok", s.antipodal_ok);
            c.metric("points", s.points.len());
            c.require(norm.value == 1.0 && norm.method == NormMethod::SignEnumeration, || format!("norm {} by {:?}", norm.value, norm.method));
            c.require(h < config.tol, || format!("Hausdorff distance {h}"));
            c.require(s.antipodal_ok, || "sample not antipodal".into());
            c.require(s.component_count() == 2, || format!("{} components", s.component_count()));
            Ok(())
        }
        (suite, _) => Err(wrong_instance(suite)),
    }
}

fn close(c: &mut Check, what: &str, value: f64, target: f64, tol: f64) {
    c.require((value - target).abs() <= tol, || format!("{what} = {value} differs from {target} by more than {tol:e}"));
}

fn dist_to_pm_e1(p: &[f64]) -> f64 {
    let rest: f64 = p[1..].iter().map(|x| x * x).sum();
    ((p[0].abs() - 1.0).powi(2) + rest).sqrt()
}

/// Orthogonality and the pointwise witness on `M_T`. The witness always
/// implies orthogonality; the converse is asserted only when the sample
/// splits as `D u (-D)`.
fn connected_attainment(config: &SuiteConfig, seed: u64, t: &Operator64, a: &Operator64, c: &mut Check) -> Result<(), HarnessError> {
    let cert = bj_op(t, a)?;
    let s = attainment_sample(t, DEFAULT_ATTAIN_TOL, config.budget, seed)?;
    let witness = witness_search(t, a, &s)?;
    let margin = derivative_margin(&cert, op_norm(a).value);
    let resolution = witness_resolution(&s);
    c.metric("verdict", cert.verdict);
    c.metric("witness", witness.is_some());
    c.metric("antipodal_ok", s.antipodal_ok);
    c.metric("components", s.component_count());
    c.metric("margin", margin);
    c.metric("resolution", resolution);
    if witness.is_some() && !cert.verdict {
        if margin < resolution {
            c.inconclusive = Some(format!("non-orthogonality margin {margin:e} below the sample resolution {resolution:e}"));
        } else {
            c.require(false, || format!("witness found but T is not orthogonal to A (margin {margin:e})"));
        }
    }
    if cert.verdict && witness.is_none() && s.antipodal_ok {
        c.require(false, || "T orthogonal to A but no witness on a connected-antipodal M_T".into());
    }
    Ok(())
}

/// `max(g'_-(0), -g'_+(0)) / ||A||`: positive exactly when the derivative
/// signs rule orthogonality out.
fn derivative_margin(cert: &OrthoCertificate<f64>, norm_a: f64) -> f64 {
    cert.left_right_derivs.left.max(-cert.left_right_derivs.right) / norm_a.max(f64::MIN_POSITIVE)
}

/// Euclidean operators: the verdict matches the sign change of `<Tx, Ax>`
/// on the top singular subspace, and the witness search returns a point
/// where that form vanishes.
fn hilbert_pair(config: &SuiteConfig, seed: u64, t: &Operator64, a: &Operator64, c: &mut Check) -> Result<(), HarnessError> {
    if !t.is_euclidean() {
        return Err(HarnessError::Config("cor-hilbert-bhatia-semrl needs lp:2 on both sides".into()));
    }
    let cert = bj_op(t, a)?;
    let top = top_singular(t.flat(), t.rows(), t.cols(), VERDICT_TOL);
    let (lo, hi) = restricted_form_range(t, a, &top.basis);
    let norm_a = op_norm(a).value;
    let slack = config.tol * top.sigma * norm_a;
    let form_witness = lo <= slack && hi >= -slack;
    c.metric("verdict", cert.verdict);
    c.metric("form_min", lo / top.sigma);
    c.metric("form_max", hi / top.sigma);
    c.metric("top_multiplicity", top.basis.len());
    c.require(cert.verdict == form_witness, || {
        format!("verdict {} but form range [{:e}, {:e}] on the top subspace", cert.verdict, lo / top.sigma, hi / top.sigma)
    });
    if cert.verdict {
        let s = attainment_sample(t, DEFAULT_ATTAIN_TOL, config.budget.min(1024), seed)?;
        match witness_search(t, a, &s)? {
            Some(x) => {
                let v = t.apply(&x)?.dot(&a.apply(&x)?);
                c.metric("witness_form", v);
                c.require(v.abs() <= 1e-6 * top.sigma * norm_a, || format!("witness has <Tx, Ax> = {v:e}"));
            }
            None => c.require(false, || "orthogonal pair without a witness".into()),
        }
    }
    Ok(())
}
