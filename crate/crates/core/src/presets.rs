//! Canned experiment setups: a generator, the inference model applied to
//! its output, and a Gibbs budget.
//!
//! Three scenarios cover the shapes a cluster-count posterior takes on
//! unimodal data, well-separated data, and data whose true cluster count
//! grows with `n`:
//!
//! * `one-cluster-gaussian`: 300 standard-normal points, inferred with a
//!   unit-variance Gaussian location prior and concentration 1;
//! * `two-cluster-uniform`: 300 points uniform on [0,1] u [2,3], same model;
//! * `dp-generative`: 300 points from the seat-then-observe hierarchy with
//!   concentration 3 and location sd 5, inferred with the matching
//!   (generatively true) hyperparameters.

use crate::datagen::{GeneratorSpec, GeneratorVariant};
use crate::eppf::PitmanYorParams;
use crate::gibbs::GibbsConfig;
use crate::marginal::ComponentPrior;
use crate::posterior::MixtureModel;

/// Default sampling budget for preset runs, sized for desk-scale runtimes.
/// The full budget (the `GibbsConfig` default: 200000 burn-in, 10000 draws,
/// thin 100) reproduces published-scale runs and takes minutes.
pub const REDUCED_BURN_IN: u64 = 20_000;
pub const REDUCED_SAMPLES: u64 = 2_000;
pub const REDUCED_THIN: u64 = 20;

/// A named generator/model pairing.
#[derive(Clone, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub variant: GeneratorVariant,
    pub n: usize,
    pub alpha: f64,
    pub discount: f64,
    pub prior: ComponentPrior,
}

pub const NAMES: [&str; 3] =
    ["one-cluster-gaussian", "two-cluster-uniform", "dp-generative"];

/// Looks a preset up by its exact name.
pub fn by_name(name: &str) -> Option<Preset> {
    let preset = match name {
        "one-cluster-gaussian" => Preset {
            name: "one-cluster-gaussian",
            variant: GeneratorVariant::GaussianIid { mean: 0.0, sd: 1.0 },
            n: 300,
            alpha: 1.0,
            discount: 0.0,
            prior: ComponentPrior::ZeroMeanGaussian { sigma2: 1.0 },
        },
        "two-cluster-uniform" => Preset {
            name: "two-cluster-uniform",
            variant: GeneratorVariant::UniformUnion { intervals: vec![(0.0, 1.0), (2.0, 3.0)] },
            n: 300,
            alpha: 1.0,
            discount: 0.0,
            prior: ComponentPrior::ZeroMeanGaussian { sigma2: 1.0 },
        },
        "dp-generative" => Preset {
            name: "dp-generative",
            variant: GeneratorVariant::CrpGenerative { alpha: 3.0, theta_sd: 5.0, obs_sd: 1.0 },
            n: 300,
            alpha: 3.0,
            discount: 0.0,
            prior: ComponentPrior::ZeroMeanGaussian { sigma2: 25.0 },
        },
        _ => return None,
    };
    Some(preset)
}

impl Preset {
    pub fn model(&self) -> MixtureModel {
        MixtureModel::new(
            PitmanYorParams::new(self.alpha, self.discount).expect("preset parameters are valid"),
            self.prior,
        )
        .expect("preset priors are valid")
    }

    pub fn generator_spec(&self, seed: u64) -> GeneratorSpec {
        GeneratorSpec { variant: self.variant.clone(), n: self.n, seed }
    }

    /// The preset's sampling schedule: reduced by default, the full
    /// published-scale budget on request.
    pub fn gibbs_config(&self, seed: u64, full_budget: bool) -> GibbsConfig {
        if full_budget {
            GibbsConfig { seed, ..Default::default() }
        } else {
            GibbsConfig {
                burn_in: REDUCED_BURN_IN,
                samples: REDUCED_SAMPLES,
                thin: REDUCED_THIN,
                seed,
                ..Default::default()
            }
        }
    }
}
