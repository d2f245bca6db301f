use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use bjortho_core::Norm;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// Property suites, one per result being exercised.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    ThmConnectedAttainment,
    CorHilbertBhatiaSemrl,
    ThmSipPlus,
    ThmNormRetrievalOp,
    ThmNormRetrievalOpEps,
    ThmNormRetrievalFunctional,
    ThmNormRetrievalFunctionalEps,
    ThmDistSpan,
    ThmDistSubspace,
    EuclideanCharacterization,
    ExampleCounterexample,
    RemarkLinfAttainment,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::ThmConnectedAttainment,
        Suite::CorHilbertBhatiaSemrl,
        Suite::ThmSipPlus,
        Suite::ThmNormRetrievalOp,
        Suite::ThmNormRetrievalOpEps,
        Suite::ThmNormRetrievalFunctional,
        Suite::ThmNormRetrievalFunctionalEps,
        Suite::ThmDistSpan,
        Suite::ThmDistSubspace,
        Suite::EuclideanCharacterization,
        Suite::ExampleCounterexample,
        Suite::RemarkLinfAttainment,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ThmConnectedAttainment => "thm-connected-attainment",
            Suite::CorHilbertBhatiaSemrl => "cor-hilbert-bhatia-semrl",
            Suite::ThmSipPlus => "thm-sip-plus",
            Suite::ThmNormRetrievalOp => "thm-norm-retrieval-op",
            Suite::ThmNormRetrievalOpEps => "thm-norm-retrieval-op-eps",
            Suite::ThmNormRetrievalFunctional => "thm-norm-retrieval-functional",
            Suite::ThmNormRetrievalFunctionalEps => "thm-norm-retrieval-functional-eps",
            Suite::ThmDistSpan => "thm-dist-span",
            Suite::ThmDistSubspace => "thm-dist-subspace",
            Suite::EuclideanCharacterization => "euclidean-characterization",
            Suite::ExampleCounterexample => "example-counterexample",
            Suite::RemarkLinfAttainment => "remark-linf-attainment",
        }
    }

    /// Suites on fixed inputs run exactly one trial.
    pub fn is_fixed(self) -> bool {
        matches!(self, Suite::ExampleCounterexample | Suite::RemarkLinfAttainment)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| HarnessError::UnknownSuite(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub domain: Norm,
    pub codomain: Norm,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    /// Pass/fail tolerance of the suite's main comparison.
    pub tol: f64,
    /// Relaxation parameter for the epsilon suites.
    pub eps: f64,
    /// Sample budget for attainment sets.
    pub budget: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl SuiteConfig {
    /// Defaults for `suite`.
    pub fn new(suite: Suite) -> Self {
        let l2 = Norm::L2;
        let mut c = SuiteConfig { suite, domain: l2, codomain: l2, dim: 3, trials: 100, seed: 1, tol: 2e-3, eps: 0.1, budget: 1 << 13, out: None };
        match suite {
            Suite::ThmConnectedAttainment => {
                c.domain = Norm::Linf;
                c.codomain = Norm::Lp(3.0);
                c.tol = 1e-7;
                c.trials = 50;
                c.budget = 1 << 11;
            }
            Suite::CorHilbertBhatiaSemrl => {
                c.tol = 1e-7;
                c.trials = 200;
            }
            Suite::ThmSipPlus => {
                c.domain = Norm::Lp(3.0);
                c.codomain = c.domain;
                c.tol = 1e-9;
                c.trials = 1000;
            }
            Suite::ThmNormRetrievalOp | Suite::ThmNormRetrievalOpEps => {
                c.dim = 2;
                c.trials = 25;
            }
            Suite::ThmNormRetrievalFunctional => {
                c.domain = Norm::Lp(3.0);
                c.codomain = c.domain;
                c.tol = 1e-3;
            }
            Suite::ThmNormRetrievalFunctionalEps => {
                c.domain = Norm::L1;
                c.codomain = c.domain;
                c.dim = 2;
                c.tol = 1e-3;
            }
            Suite::ThmDistSpan => {}
            Suite::ThmDistSubspace => c.trials = 20,
            Suite::EuclideanCharacterization => c.tol = 1e-6,
            Suite::ExampleCounterexample => {
                c.trials = 1;
                c.tol = 1e-6;
            }
            Suite::RemarkLinfAttainment => {
                c.domain = Norm::Linf;
                c.codomain = Norm::Linf;
                c.dim = 2;
                c.trials = 1;
                c.tol = 0.05;
            }
        }
        c
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tolerance must be positive, got {}", self.tol));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if self.dim == 0 {
            return bad("dimension must be at least 1".into());
        }
        if self.budget == 0 {
            return bad("budget must be at least 1".into());
        }
        if self.suite.is_fixed() && self.trials != 1 {
            return bad(format!("{} runs a single fixed trial", self.suite));
        }
        if self.suite == Suite::EuclideanCharacterization && !(2..=4).contains(&self.dim) {
            return bad("euclidean-characterization needs dimension 2 to 4".into());
        }
        Ok(())
    }
}
