//! Layered experiment configuration: built-in defaults, then a preset,
//! then a key=value config file, then command-line flags, each layer
//! overriding the one below. The resolved form is echoed into every
//! summary so outputs are self-describing.

use bnpmix::datagen::{GeneratorSpec, GeneratorVariant};
use bnpmix::eppf::PitmanYorParams;
use bnpmix::gibbs::GibbsConfig;
use bnpmix::marginal::ComponentPrior;
use bnpmix::posterior::MixtureModel;
use bnpmix::presets::Preset;
use serde_json::json;

/// One layer of not-yet-resolved settings; `None` means "inherit".
#[derive(Clone, Debug, Default)]
pub struct Overlay {
    pub gen_kind: Option<String>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub intervals: Option<Vec<(f64, f64)>>,
    pub weights: Option<Vec<f64>>,
    pub means: Option<Vec<f64>>,
    pub gen_alpha: Option<f64>,
    pub theta_sd: Option<f64>,
    pub obs_sd: Option<f64>,
    pub alpha: Option<f64>,
    pub discount: Option<f64>,
    pub prior_kind: Option<String>,
    pub sigma2: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub burn_in: Option<u64>,
    pub samples: Option<u64>,
    pub thin: Option<u64>,
}

impl Overlay {
    /// Parses the flat `key=value` file format. Unknown keys and
    /// malformed lines are reported by line number.
    pub fn from_file_text(text: &str) -> Result<Overlay, String> {
        let mut o = Overlay::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value, got {line:?}", idx + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let at = |e: String| format!("line {}: {e}", idx + 1);
            match key {
                "generator.kind" => o.gen_kind = Some(value.to_string()),
                "generator.n" => o.n = Some(parse(key, value).map_err(at)?),
                "generator.mean" => o.mean = Some(parse(key, value).map_err(at)?),
                "generator.sd" => o.sd = Some(parse(key, value).map_err(at)?),
                "generator.intervals" => {
                    o.intervals = Some(parse_intervals(value).map_err(at)?)
                }
                "generator.weights" => o.weights = Some(parse_list(key, value).map_err(at)?),
                "generator.means" => o.means = Some(parse_list(key, value).map_err(at)?),
                "generator.alpha" => o.gen_alpha = Some(parse(key, value).map_err(at)?),
                "generator.theta_sd" => o.theta_sd = Some(parse(key, value).map_err(at)?),
                "generator.obs_sd" => o.obs_sd = Some(parse(key, value).map_err(at)?),
                "model.alpha" => o.alpha = Some(parse(key, value).map_err(at)?),
                "model.discount" => o.discount = Some(parse(key, value).map_err(at)?),
                "prior.kind" => o.prior_kind = Some(value.to_string()),
                "prior.sigma2" => o.sigma2 = Some(parse(key, value).map_err(at)?),
                "prior.lo" => o.lo = Some(parse(key, value).map_err(at)?),
                "prior.hi" => o.hi = Some(parse(key, value).map_err(at)?),
                "gibbs.burn_in" => o.burn_in = Some(parse(key, value).map_err(at)?),
                "gibbs.samples" => o.samples = Some(parse(key, value).map_err(at)?),
                "gibbs.thin" => o.thin = Some(parse(key, value).map_err(at)?),
                "seed" => o.seed = Some(parse(key, value).map_err(at)?),
                other => return Err(format!("line {}: unknown key {other:?}", idx + 1)),
            }
        }
        Ok(o)
    }

    fn apply(&mut self, upper: &Overlay) {
        macro_rules! take {
            ($($f:ident),*) => { $( if upper.$f.is_some() { self.$f = upper.$f.clone(); } )* };
        }
        take!(
            gen_kind, n, seed, mean, sd, intervals, weights, means, gen_alpha, theta_sd,
            obs_sd, alpha, discount, prior_kind, sigma2, lo, hi, burn_in, samples, thin
        );
    }
}

pub fn parse_intervals(value: &str) -> Result<Vec<(f64, f64)>, String> {
    value
        .split(';')
        .map(|pair| {
            let (lo, hi) = pair
                .split_once(',')
                .ok_or_else(|| format!("interval {pair:?} is not lo,hi"))?;
            Ok((
                parse("interval low end", lo.trim())?,
                parse("interval high end", hi.trim())?,
            ))
        })
        .collect()
}

pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, String> {
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("cannot parse {key} value {value:?}"))
}

/// Fully-resolved experiment settings.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub variant: GeneratorVariant,
    pub n: usize,
    pub seed: u64,
    pub alpha: f64,
    pub discount: f64,
    pub prior: ComponentPrior,
    pub burn_in: u64,
    pub samples: u64,
    pub thin: u64,
}

/// Merges the layers bottom-up and materializes every field.
pub fn resolve(
    preset: Option<&Preset>,
    file: Option<Overlay>,
    flags: Overlay,
    full_budget: bool,
) -> Result<Resolved, String> {
    let mut o = Overlay::default();
    if let Some(p) = preset {
        o.apply(&preset_overlay(p, full_budget));
    }
    if let Some(f) = &file {
        o.apply(f);
    }
    o.apply(&flags);

    let kind = o.gen_kind.as_deref().unwrap_or("gaussian-iid");
    let variant = match kind {
        "gaussian-iid" => GeneratorVariant::GaussianIid {
            mean: o.mean.unwrap_or(0.0),
            sd: o.sd.unwrap_or(1.0),
        },
        "uniform-union" => GeneratorVariant::UniformUnion {
            intervals: o
                .intervals
                .clone()
                .ok_or("uniform-union needs generator.intervals")?,
        },
        "finite-mixture" => GeneratorVariant::FiniteMixture {
            weights: o.weights.clone().ok_or("finite-mixture needs generator.weights")?,
            means: o.means.clone().ok_or("finite-mixture needs generator.means")?,
            sd: o.sd.unwrap_or(1.0),
        },
        "crp-generative" => GeneratorVariant::CrpGenerative {
            alpha: o.gen_alpha.unwrap_or(1.0),
            theta_sd: o.theta_sd.unwrap_or(5.0),
            obs_sd: o.obs_sd.unwrap_or(1.0),
        },
        other => return Err(format!("unknown generator kind {other:?}")),
    };

    let prior = match o.prior_kind.as_deref().unwrap_or("gaussian") {
        "gaussian" => ComponentPrior::gaussian(o.sigma2.unwrap_or(1.0)),
        "uniform" => ComponentPrior::uniform(o.lo.unwrap_or(-10.0), o.hi.unwrap_or(10.0)),
        other => return Err(format!("unknown prior kind {other:?}")),
    }
    .map_err(|e| e.to_string())?;

    let defaults = GibbsConfig::default();
    Ok(Resolved {
        variant,
        n: o.n.unwrap_or(100),
        seed: o.seed.unwrap_or(0),
        alpha: o.alpha.unwrap_or(1.0),
        discount: o.discount.unwrap_or(0.0),
        prior,
        burn_in: o.burn_in.unwrap_or(defaults.burn_in),
        samples: o.samples.unwrap_or(defaults.samples),
        thin: o.thin.unwrap_or(defaults.thin),
    })
}

fn preset_overlay(p: &Preset, full_budget: bool) -> Overlay {
    let mut o = Overlay {
        n: Some(p.n),
        alpha: Some(p.alpha),
        discount: Some(p.discount),
        ..Default::default()
    };
    match &p.variant {
        GeneratorVariant::GaussianIid { mean, sd } => {
            o.gen_kind = Some("gaussian-iid".into());
            o.mean = Some(*mean);
            o.sd = Some(*sd);
        }
        GeneratorVariant::UniformUnion { intervals } => {
            o.gen_kind = Some("uniform-union".into());
            o.intervals = Some(intervals.clone());
        }
        GeneratorVariant::FiniteMixture { weights, means, sd } => {
            o.gen_kind = Some("finite-mixture".into());
            o.weights = Some(weights.clone());
            o.means = Some(means.clone());
            o.sd = Some(*sd);
        }
        GeneratorVariant::CrpGenerative { alpha, theta_sd, obs_sd } => {
            o.gen_kind = Some("crp-generative".into());
            o.gen_alpha = Some(*alpha);
            o.theta_sd = Some(*theta_sd);
            o.obs_sd = Some(*obs_sd);
        }
    }
    match p.prior {
        ComponentPrior::ZeroMeanGaussian { sigma2 } => {
            o.prior_kind = Some("gaussian".into());
            o.sigma2 = Some(sigma2);
        }
        ComponentPrior::UniformInterval { lo, hi } => {
            o.prior_kind = Some("uniform".into());
            o.lo = Some(lo);
            o.hi = Some(hi);
        }
    }
    let budget = p.gibbs_config(0, full_budget);
    o.burn_in = Some(budget.burn_in);
    o.samples = Some(budget.samples);
    o.thin = Some(budget.thin);
    o
}

impl Resolved {
    pub fn model(&self) -> Result<MixtureModel, bnpmix::Error> {
        MixtureModel::new(PitmanYorParams::new(self.alpha, self.discount)?, self.prior)
    }

    pub fn generator_spec(&self) -> GeneratorSpec {
        GeneratorSpec { variant: self.variant.clone(), n: self.n, seed: self.seed }
    }

    pub fn gibbs_config(&self, randomize_sweep_order: bool) -> GibbsConfig {
        GibbsConfig {
            burn_in: self.burn_in,
            samples: self.samples,
            thin: self.thin,
            seed: self.seed,
            randomize_sweep_order,
            ..Default::default()
        }
    }

    /// One-line generator description for data-file headers.
    pub fn describe_generator(&self) -> String {
        let params = match &self.variant {
            GeneratorVariant::GaussianIid { mean, sd } => format!("mean={mean} sd={sd}"),
            GeneratorVariant::UniformUnion { intervals } => {
                let list: Vec<String> =
                    intervals.iter().map(|(lo, hi)| format!("{lo},{hi}")).collect();
                format!("intervals={}", list.join(";"))
            }
            GeneratorVariant::FiniteMixture { weights, means, sd } => format!(
                "weights={} means={} sd={sd}",
                join(weights),
                join(means)
            ),
            GeneratorVariant::CrpGenerative { alpha, theta_sd, obs_sd } => {
                format!("alpha={alpha} theta_sd={theta_sd} obs_sd={obs_sd}")
            }
        };
        format!("kind={} {params} n={} seed={}", self.kind_name(), self.n, self.seed)
    }

    pub fn kind_name(&self) -> &'static str {
        match self.variant {
            GeneratorVariant::GaussianIid { .. } => "gaussian-iid",
            GeneratorVariant::UniformUnion { .. } => "uniform-union",
            GeneratorVariant::FiniteMixture { .. } => "finite-mixture",
            GeneratorVariant::CrpGenerative { .. } => "crp-generative",
        }
    }

    /// The fully-resolved config as JSON for summaries.
    pub fn echo_json(&self, input: Option<&std::path::Path>) -> serde_json::Value {
        let generator = match &self.variant {
            GeneratorVariant::GaussianIid { mean, sd } => json!({
                "kind": "gaussian-iid", "mean": mean, "sd": sd,
            }),
            GeneratorVariant::UniformUnion { intervals } => json!({
                "kind": "uniform-union",
                "intervals": intervals.iter().map(|&(lo, hi)| json!([lo, hi])).collect::<Vec<_>>(),
            }),
            GeneratorVariant::FiniteMixture { weights, means, sd } => json!({
                "kind": "finite-mixture", "weights": weights, "means": means, "sd": sd,
            }),
            GeneratorVariant::CrpGenerative { alpha, theta_sd, obs_sd } => json!({
                "kind": "crp-generative", "alpha": alpha, "theta_sd": theta_sd, "obs_sd": obs_sd,
            }),
        };
        let prior = match self.prior {
            ComponentPrior::ZeroMeanGaussian { sigma2 } => {
                json!({"kind": "gaussian", "sigma2": sigma2})
            }
            ComponentPrior::UniformInterval { lo, hi } => {
                json!({"kind": "uniform", "lo": lo, "hi": hi})
            }
        };
        let data = match input {
            Some(path) => json!({"input": path.display().to_string()}),
            None => json!({"generator": generator, "n": self.n}),
        };
        json!({
            "data": data,
            "model": {"alpha": self.alpha, "discount": self.discount, "prior": prior},
            "gibbs": {"burn_in": self.burn_in, "samples": self.samples, "thin": self.thin},
            "seed": self.seed,
        })
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}
