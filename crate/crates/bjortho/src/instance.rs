use bjortho_core::approximation::{line_min, trial_seed};
use bjortho_core::orthogonality::vector_line_min;
use bjortho_core::{Functional64, Operator64, Space, Vector64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::SuiteConfig;
use crate::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    VectorPair,
    OperatorPair,
    OrthogonalOperatorPair,
    OrthogonalFunctionalPair,
}

/// Inputs of one trial, serialized into failure records for replay.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Instance {
    VectorPair { x: Vector64, y: Vector64 },
    OperatorPair { t: Operator64, a: Operator64 },
    /// `t` was replaced by `t + lambda0 a`, the minimizer of `||t + l a||`.
    OrthogonalOperatorPair { t: Operator64, a: Operator64, lambda0: f64 },
    OrthogonalFunctionalPair { f: Functional64, g: Functional64 },
    OperatorBasis { t: Operator64, basis: Vec<Operator64> },
    Operator { t: Operator64 },
    Fixture { name: String },
}

pub(crate) fn spaces(config: &SuiteConfig) -> Result<(Space, Space), HarnessError> {
    Ok((Space::new(config.dim, config.domain)?, Space::new(config.dim, config.codomain)?))
}

pub(crate) fn gaussian_matrix<R: Rng>(rng: &mut R, domain: Space, codomain: Space) -> Operator64 {
    let data = (0..domain.dim * codomain.dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Operator64::from_flat(domain, codomain, data).expect("sizes match")
}

fn gaussian_coords<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if v.iter().any(|&c| c != 0.0) {
            return v;
        }
    }
}

/// Small-integer coordinates put pairs on the kinks of `l1` / `linf`.
fn integer_coords<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-2i32..=2) as f64).collect();
        if v.iter().any(|&c| c != 0.0) {
            return v;
        }
    }
}

pub(crate) fn trial_rng(config: &SuiteConfig, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(config.seed, trial))
}

/// Deterministic instance for `(config, trial)`. Entries are standard normal;
/// a quarter of vector pairs use small integers instead. Orthogonal pairs are
/// made orthogonal by line minimization.
pub fn gen_instance(kind: InstanceKind, config: &SuiteConfig, trial: usize) -> Result<Instance, HarnessError> {
    let mut rng = trial_rng(config, trial);
    let (dom, cod) = spaces(config)?;
    Ok(match kind {
        InstanceKind::VectorPair => {
            let integer = rng.random_range(0..4) == 0;
            let draw = |rng: &mut ChaCha8Rng| {
                let c = if integer { integer_coords(rng, dom.dim) } else { gaussian_coords(rng, dom.dim) };
                Vector64::new(dom, c).and_then(|v| v.normalized())
            };
            let x = draw(&mut rng)?;
            let y = draw(&mut rng)?;
            Instance::VectorPair { x, y }
        }
        InstanceKind::OperatorPair => Instance::OperatorPair { t: gaussian_matrix(&mut rng, dom, cod), a: gaussian_matrix(&mut rng, dom, cod) },
        InstanceKind::OrthogonalOperatorPair => {
            let t = gaussian_matrix(&mut rng, dom, cod);
            let a = gaussian_matrix(&mut rng, dom, cod);
            let (lambda0, _) = line_min(&t, &a)?;
            Instance::OrthogonalOperatorPair { t: t.plus_scaled(lambda0, &a)?, a, lambda0 }
        }
        InstanceKind::OrthogonalFunctionalPair => {
            let f = Functional64::new(dom, gaussian_coords(&mut rng, dom.dim))?;
            let g = Functional64::new(dom, gaussian_coords(&mut rng, dom.dim))?;
            let l0 = vector_line_min(&f.as_dual_vector(), &g.as_dual_vector())?;
            let f = Functional64::new(dom, f.coords().iter().zip(g.coords()).map(|(a, b)| a + l0 * b).collect())?;
            Instance::OrthogonalFunctionalPair { f, g }
        }
    })
}
