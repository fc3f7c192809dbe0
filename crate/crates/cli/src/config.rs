//! Config-file handling, key=value parsers and the estimator-name grammar.
//!
//! Config files are TOML with sections `[population]`, `[design]`, `[run]`
//! and `[output]`; every key has a command-line flag that overrides it.
//!
//! Estimator grammar: `name` or `name{key=value,key=value}`. Names and keys
//! are kebab-case; see the README for the full list.

use serde::Deserialize;
use thiserror::Error;

use survest::mean::{ExpAuxMember, MeanEstimatorSpec};
use survest::montecarlo::{EstimatorSpec, UndefinedPolicy};
use survest::population::{ColumnMap, DesignConstants, PopulationSummary};
use survest::synthesis::SynthesisTarget;
use survest::variance::{KcMember, ThetaFlavor, ThetaVar, VarianceEstimatorSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

fn cfg(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    #[serde(default)]
    pub population: PopulationSection,
    #[serde(default)]
    pub design: DesignSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PopulationSection {
    pub input: Option<String>,
    pub synthesize: Option<String>,
    pub y_col: Option<String>,
    pub x_col: Option<String>,
    pub phi_col: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct DesignSection {
    pub n: Option<usize>,
    pub n_prime: Option<usize>,
    pub ignore_fpc: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunSection {
    pub replications: Option<usize>,
    pub seed: Option<u64>,
    pub policy: Option<String>,
    pub threads: Option<usize>,
    pub estimators: Option<Vec<String>>,
    pub tolerance_rel: Option<f64>,
    pub max_subsets: Option<u128>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct OutputSection {
    pub format: Option<String>,
    pub path: Option<String>,
}

impl FileConfig {
    pub fn load(path: Option<&str>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let raw = std::fs::read_to_string(p)
                    .map_err(|e| cfg(format!("cannot read config {p}: {e}")))?;
                toml::from_str(&raw).map_err(|e| cfg(format!("bad config {p}: {e}")))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

pub fn format_of(
    common: &crate::CommonOpts,
    file: &FileConfig,
) -> Result<OutputFormat, CliError> {
    let name = common
        .format
        .clone()
        .or_else(|| file.output.format.clone())
        .unwrap_or_else(|| "table".into());
    match name.as_str() {
        "table" => Ok(OutputFormat::Table),
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(cfg(format!("unknown format `{other}`"))),
    }
}

/// Writes to the `--output` flag path, the config `[output] path`, or stdout.
pub fn emit(common: &crate::CommonOpts, file: &FileConfig, text: &str) -> Result<(), CliError> {
    match common.output.as_ref().or(file.output.path.as_ref()) {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Splits a `key=value,key=value` list. Values may not contain commas.
fn parse_kv(list: &str) -> Result<Vec<(String, String)>, CliError> {
    list.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(|part| {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| cfg(format!("expected key=value, got `{part}`")))?;
            Ok((k.trim().to_lowercase(), v.trim().to_string()))
        })
        .collect()
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .parse::<f64>()
        .map_err(|_| cfg(format!("`{key}` must be a number, got `{value}`")))
}

pub fn build_population(
    opts: &crate::PopulationOpts,
    file: &FileConfig,
) -> Result<survest::population::Population, CliError> {
    let input = opts.input.clone().or_else(|| file.population.input.clone());
    let synth = opts
        .synthesize
        .clone()
        .or_else(|| file.population.synthesize.clone());
    match (input, synth) {
        (Some(_), Some(_)) => Err(cfg(
            "exactly one population source: --input or --synthesize, not both",
        )),
        (None, None) => Err(cfg("a population source is required: --input or --synthesize")),
        (Some(path), None) => {
            let columns = ColumnMap {
                y: opts
                    .y_col
                    .clone()
                    .or_else(|| file.population.y_col.clone())
                    .unwrap_or_else(|| "y".into()),
                x: opts.x_col.clone().or_else(|| file.population.x_col.clone()),
                phi: opts
                    .phi_col
                    .clone()
                    .or_else(|| file.population.phi_col.clone()),
            };
            survest::population::load_population_csv(&path, &columns)
                .map_err(|e| cfg(format!("loading {path}: {e}")))
        }
        (None, Some(spec)) => {
            let target = parse_synthesis_target(&spec)?;
            let seed = opts.seed.or(file.run.seed).unwrap_or(0);
            survest::synthesis::synthesize_population(&target, seed)
                .map_err(|e| cfg(e.to_string()))
        }
    }
}

pub fn parse_synthesis_target(spec: &str) -> Result<SynthesisTarget, CliError> {
    let mut target = SynthesisTarget {
        n_units: 0,
        ybar: f64::NAN,
        cy: f64::NAN,
        xbar: None,
        cx: None,
        rho: None,
        p: None,
        cp: None,
        rho_pb: None,
        beta2x: None,
    };
    for (k, v) in parse_kv(spec)? {
        match k.as_str() {
            "n" => {
                target.n_units = v
                    .parse()
                    .map_err(|_| cfg(format!("`n` must be an integer, got `{v}`")))?
            }
            "ybar" => target.ybar = parse_f64(&k, &v)?,
            "cy" => target.cy = parse_f64(&k, &v)?,
            "xbar" => target.xbar = Some(parse_f64(&k, &v)?),
            "cx" => target.cx = Some(parse_f64(&k, &v)?),
            "rho" => target.rho = Some(parse_f64(&k, &v)?),
            "p" => target.p = Some(parse_f64(&k, &v)?),
            "cp" => target.cp = Some(parse_f64(&k, &v)?),
            "rho-pb" | "rho_pb" => target.rho_pb = Some(parse_f64(&k, &v)?),
            "beta2x" => target.beta2x = Some(parse_f64(&k, &v)?),
            other => return Err(cfg(format!("unknown synthesis key `{other}`"))),
        }
    }
    if target.n_units == 0 || target.ybar.is_nan() || target.cy.is_nan() {
        return Err(cfg("synthesis targets need at least n, ybar and cy"));
    }
    Ok(target)
}

/// Builds a summary from published scalar parameters.
pub fn parse_scalars(spec: &str) -> Result<PopulationSummary, CliError> {
    let mut n_units = 0usize;
    let mut s = PopulationSummary::default();
    for (k, v) in parse_kv(spec)? {
        match k.as_str() {
            "n" => {
                n_units = v
                    .parse()
                    .map_err(|_| cfg(format!("`n` must be an integer, got `{v}`")))?
            }
            "ybar" => s.ybar = parse_f64(&k, &v)?,
            "xbar" => s.xbar = Some(parse_f64(&k, &v)?),
            "p" => s.p = Some(parse_f64(&k, &v)?),
            "sy2" => s.sy2 = Some(parse_f64(&k, &v)?),
            "sx2" => s.sx2 = Some(parse_f64(&k, &v)?),
            "sphi2" => s.sphi2 = Some(parse_f64(&k, &v)?),
            "cy" => s.cy = Some(parse_f64(&k, &v)?),
            "cx" => s.cx = Some(parse_f64(&k, &v)?),
            "cp" => s.cp = Some(parse_f64(&k, &v)?),
            "rho" => s.rho = Some(parse_f64(&k, &v)?),
            "rho-pb" | "rho_pb" => s.rho_pb = Some(parse_f64(&k, &v)?),
            "beta2y" => s.beta2y = Some(parse_f64(&k, &v)?),
            "beta2x" => s.beta2x = Some(parse_f64(&k, &v)?),
            "beta2-phi" | "beta2phi" => s.beta2phi = Some(parse_f64(&k, &v)?),
            "h" => s.h = Some(parse_f64(&k, &v)?),
            "c" => s.c = Some(parse_f64(&k, &v)?),
            "k" => s.k = Some(parse_f64(&k, &v)?),
            "kp" | "k-p" => s.kp = Some(parse_f64(&k, &v)?),
            other => return Err(cfg(format!("unknown scalar `{other}`"))),
        }
    }
    if n_units < 2 {
        return Err(cfg("scalars need n >= 2"));
    }
    s.n_units = n_units;
    if s.ybar == 0.0 {
        s.ybar = 1.0; // PREs are invariant to the mean level
    }
    s.fill_derived();
    Ok(s)
}

pub fn design_from(
    file: &FileConfig,
    n_population: usize,
    n: Option<usize>,
    n_prime: Option<usize>,
) -> Result<DesignConstants, CliError> {
    let n = n
        .or(file.design.n)
        .ok_or_else(|| cfg("missing sample size --n"))?;
    let n_prime = n_prime.or(file.design.n_prime);
    let design = match n_prime {
        Some(np) => DesignConstants::two_phase(n_population, np, n),
        None => DesignConstants::single(n_population, n),
    }
    .map_err(|e| cfg(e.to_string()))?;
    Ok(match file.design.ignore_fpc {
        Some(false) => design.with_fpc(),
        _ => design,
    })
}

pub fn parse_policy(
    flag: Option<&str>,
    file: &FileConfig,
) -> Result<UndefinedPolicy, CliError> {
    let name = flag
        .map(str::to_string)
        .or_else(|| file.run.policy.clone())
        .unwrap_or_else(|| "skip-and-count".into());
    match name.as_str() {
        "skip-and-count" | "skip" => Ok(UndefinedPolicy::SkipAndCount),
        "abort" => Ok(UndefinedPolicy::Abort),
        other => Err(cfg(format!("unknown policy `{other}`"))),
    }
}

pub fn parse_estimator_list(
    flag: Option<&str>,
    file: &FileConfig,
) -> Result<Vec<EstimatorSpec>, CliError> {
    let names: Vec<String> = match flag {
        Some(list) => split_estimator_list(list),
        None => file
            .run
            .estimators
            .clone()
            .ok_or_else(|| cfg("missing --estimators"))?,
    };
    if names.is_empty() {
        return Err(cfg("estimator list is empty"));
    }
    names.iter().map(|n| parse_estimator(n)).collect()
}

/// Splits on commas that are not inside `{...}` argument blocks.
fn split_estimator_list(list: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in list.chars() {
        match ch {
            '{' => {
                depth += 1;
                current.push(ch);
            }
            '}' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            ',' if depth == 0 => {
                if !current.trim().is_empty() {
                    out.push(current.trim().to_string());
                }
                current.clear();
            }
            _ => current.push(ch),
        }
    }
    if !current.trim().is_empty() {
        out.push(current.trim().to_string());
    }
    out
}

struct EstArgs {
    pairs: Vec<(String, String)>,
}

impl EstArgs {
    fn get(&self, key: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn f64_req(&self, name: &str, key: &str) -> Result<f64, CliError> {
        let v = self
            .get(key)
            .ok_or_else(|| cfg(format!("`{name}` needs `{key}=...`")))?;
        parse_f64(key, v)
    }

    fn f64_opt(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.get(key).map(|v| parse_f64(key, v)).transpose()
    }
}

/// Parses one estimator of the form `name` or `name{key=value,...}`.
pub fn parse_estimator(text: &str) -> Result<EstimatorSpec, CliError> {
    let text = text.trim();
    let (name, args) = match text.split_once('{') {
        None => (text, EstArgs { pairs: Vec::new() }),
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix('}')
                .ok_or_else(|| cfg(format!("unterminated `{{` in `{text}`")))?;
            (
                name.trim(),
                EstArgs {
                    pairs: parse_kv(inner)?,
                },
            )
        }
    };
    use MeanEstimatorSpec as M;
    use VarianceEstimatorSpec as V;
    let mean = |m: M| Ok(EstimatorSpec::Mean(m));
    let var = |v: V| Ok(EstimatorSpec::Variance(v));
    match name {
        "mean-per-unit" => mean(M::MeanPerUnit),
        "naik-gupta-ratio" => mean(M::NaikGuptaRatio),
        "naik-gupta-product" => mean(M::NaikGuptaProduct),
        "classical-ratio-aux" => mean(M::ClassicalRatioAux),
        "attr-diff-ratio" => mean(M::AttrDiffRatio {
            m1: args.f64_req(name, "m1")?,
            m2: args.f64_req(name, "m2")?,
            pop_regression: matches!(args.get("pop-b"), Some("true") | Some("1")),
        }),
        "exp-ratio-attr" => mean(M::ExpRatioAttr),
        "exp-product-attr" => mean(M::ExpProductAttr),
        "exp-combined-attr" => mean(M::ExpCombinedAttr {
            alpha: args.f64_req(name, "alpha")?,
        }),
        "exp-ratio-aux" => mean(M::ExpRatioAux {
            a: args.f64_req(name, "a")?,
            b: args.f64_req(name, "b")?,
        }),
        "exp-aux-member" => mean(M::ExpMixedAux {
            member: member_from_args(&args, name)?,
            alpha: 0.0,
        }),
        "exp-mixed-aux" => mean(M::ExpMixedAux {
            member: member_from_args(&args, name)?,
            alpha: args.f64_req(name, "alpha")?,
        }),
        "almost-unbiased-exp" => {
            if let Some(k) = args.f64_opt("k")? {
                let (h0, h1, h2) = survest::mean::almost_unbiased_weights(k);
                mean(M::AlmostUnbiasedExp { h0, h1, h2 })
            } else {
                mean(M::AlmostUnbiasedExp {
                    h0: args.f64_req(name, "h0")?,
                    h1: args.f64_req(name, "h1")?,
                    h2: args.f64_req(name, "h2")?,
                })
            }
        }
        "exp-ratio-attr-2p" => mean(M::ExpRatioAttr2P),
        "exp-product-attr-2p" => mean(M::ExpProductAttr2P),
        "exp-combined-attr-2p" => mean(M::ExpCombinedAttr2P {
            alpha1: args.f64_req(name, "alpha1")?,
        }),
        "classical-ratio-2p" => mean(M::ClassicalRatio2P),
        "classical-product-2p" => mean(M::ClassicalProduct2P),
        "exp-ratio-aux-2p" => mean(M::ExpRatioAux2P),
        "exp-product-aux-2p" => mean(M::ExpProductAux2P),
        "almost-unbiased-exp-2p" => {
            if let Some(k) = args.f64_opt("k")? {
                let (w0, w1, w2) = survest::mean::almost_unbiased_weights_2p(k);
                mean(M::AlmostUnbiasedExp2P { w0, w1, w2 })
            } else {
                mean(M::AlmostUnbiasedExp2P {
                    w0: args.f64_req(name, "w0")?,
                    w1: args.f64_req(name, "w1")?,
                    w2: args.f64_req(name, "w2")?,
                })
            }
        }
        "sample-variance" => var(V::SampleVariance),
        "isaki-ratio" => var(V::IsakiRatio),
        "upadhyaya-singh" => var(V::UpadhyayaSingh),
        "kadilar-cingi" => {
            let member = match args.get("member") {
                Some("t2") => KcMember::T2,
                Some("t3") => KcMember::T3,
                Some("t4") => KcMember::T4,
                Some("t5") => KcMember::T5,
                other => {
                    return Err(cfg(format!(
                        "kadilar-cingi member must be t2..t5, got `{other:?}`"
                    )))
                }
            };
            var(V::KadilarCingiMember { member })
        }
        "general-family" => var(V::GeneralFamily {
            a: args.f64_req(name, "a")?,
            b: args.f64_req(name, "b")?,
            alpha: args.f64_req(name, "alpha")?,
        }),
        "ratio-type-class" => {
            if let (Some(theta), Some(c)) = (args.f64_opt("theta")?, args.f64_opt("c")?) {
                let theta = ThetaVar::from_value(theta, ThetaFlavor::KurtosisShift);
                let (w1, w2, w3) = survest::variance::ratio_class_weights(theta, c)
                    .map_err(|e| cfg(e.to_string()))?;
                var(V::RatioTypeClass { w1, w2, w3 })
            } else {
                var(V::RatioTypeClass {
                    w1: args.f64_req(name, "w1")?,
                    w2: args.f64_req(name, "w2")?,
                    w3: args.f64_req(name, "w3")?,
                })
            }
        }
        "product-type-class" => {
            if let (Some(theta), Some(c)) = (args.f64_opt("theta")?, args.f64_opt("c")?) {
                let theta = ThetaVar::from_value(theta, ThetaFlavor::KurtosisShift);
                let (k1, k2, k3) = survest::variance::product_class_weights(theta, c)
                    .map_err(|e| cfg(e.to_string()))?;
                var(V::ProductTypeClass { k1, k2, k3 })
            } else {
                var(V::ProductTypeClass {
                    k1: args.f64_req(name, "k1")?,
                    k2: args.f64_req(name, "k2")?,
                    k3: args.f64_req(name, "k3")?,
                })
            }
        }
        other => Err(cfg(format!("unknown estimator `{other}`"))),
    }
}

fn member_from_args(args: &EstArgs, name: &str) -> Result<ExpAuxMember, CliError> {
    let idx = args
        .get("i")
        .ok_or_else(|| cfg(format!("`{name}` needs `i=1..10`")))?;
    let idx: u8 = idx
        .parse()
        .map_err(|_| cfg(format!("member index must be an integer, got `{idx}`")))?;
    ExpAuxMember::from_index(idx)
        .ok_or_else(|| cfg(format!("member index {idx} outside 1..=10")))
}
