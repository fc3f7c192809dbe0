//! Empirical verification of the estimator theory: replicated sampling with
//! per-replication RNG streams, exact enumeration over all `C(N, n)` samples,
//! and theory-vs-empirical comparison.
//!
//! Determinism contract: a report depends only on `(population, config)`.
//! Replications are partitioned into fixed-size blocks; blocks may be
//! evaluated on any number of threads, but each block's accumulators are
//! computed sequentially over its own replications, and block partials are
//! combined by pairwise summation in block order. Reports are therefore
//! byte-identical across thread counts.
//!
//! Estimates that are undefined for a particular draw (zero sample
//! proportion, non-positive exponential denominator) are governed by
//! [`UndefinedPolicy`]: skipped and counted, or a hard abort.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::EstimateError;
use crate::mean::{estimate_mean, KnownParams, MeanEstimatorSpec, MeanStats};
use crate::population::{summarize, DesignConstants, Population, PopulationError};
use crate::sampling::{
    binomial, compute_sample_stats, compute_two_phase_stats, draw_srswor, draw_two_phase,
    enumerate_samples, replication_rng, Sample, SamplingError,
};
use crate::theory::{theory_mean, theory_variance, TheoryError, TheoryMoments};
use crate::variance::{estimate_variance, VarianceEstimatorSpec, VarianceKnown};

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error("estimator `{estimator}` incompatible with this run: {reason}")]
    IncompatibleSpec { estimator: String, reason: String },
    #[error("all {replications} draws were undefined for estimator `{estimator}`")]
    AllDrawsUndefined {
        estimator: String,
        replications: usize,
    },
    #[error("undefined draw for estimator `{estimator}` at replication {replication} under abort policy ({undefined_total} undefined draws in the full run)")]
    UndefinedDrawAborted {
        estimator: String,
        replication: usize,
        undefined_total: usize,
    },
    #[error("estimator lists do not match: expected {expected}, got {got}")]
    SpecMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Population(#[from] PopulationError),
}

/// A mean- or variance-estimator entry in a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EstimatorSpec {
    Mean(MeanEstimatorSpec),
    Variance(VarianceEstimatorSpec),
}

impl std::fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EstimatorSpec::Mean(m) => write!(f, "{m}"),
            EstimatorSpec::Variance(v) => write!(f, "{v}"),
        }
    }
}

impl EstimatorSpec {
    fn needs_x(&self) -> bool {
        use MeanEstimatorSpec::*;
        match self {
            EstimatorSpec::Variance(VarianceEstimatorSpec::SampleVariance) => false,
            EstimatorSpec::Variance(_) => true,
            EstimatorSpec::Mean(m) => matches!(
                m,
                ClassicalRatioAux
                    | ExpRatioAux { .. }
                    | ExpMixedAux { .. }
                    | AlmostUnbiasedExp { .. }
                    | ExpRatioAux2P
                    | ExpProductAux2P
                    | AlmostUnbiasedExp2P { .. }
            ),
        }
    }

    fn needs_phi(&self) -> bool {
        use MeanEstimatorSpec::*;
        match self {
            EstimatorSpec::Variance(_) => false,
            EstimatorSpec::Mean(m) => matches!(
                m,
                NaikGuptaRatio
                    | NaikGuptaProduct
                    | AttrDiffRatio { .. }
                    | ExpRatioAttr
                    | ExpProductAttr
                    | ExpCombinedAttr { .. }
                    | ExpRatioAttr2P
                    | ExpProductAttr2P
                    | ExpCombinedAttr2P { .. }
                    | ClassicalRatio2P
                    | ClassicalProduct2P
            ),
        }
    }

    fn is_two_phase(&self) -> bool {
        match self {
            EstimatorSpec::Mean(m) => m.is_two_phase(),
            EstimatorSpec::Variance(_) => false,
        }
    }
}

/// What to do when an estimator is undefined on a drawn sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum UndefinedPolicy {
    #[default]
    SkipAndCount,
    Abort,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub replications: usize,
    pub master_seed: u64,
    pub design: DesignConstants,
    pub estimators: Vec<EstimatorSpec>,
    #[serde(default)]
    pub policy: UndefinedPolicy,
    /// Worker threads; `None` uses the global pool. Reports do not depend on
    /// this value.
    #[serde(default)]
    pub threads: Option<usize>,
}

/// Per-estimator empirical results with theory comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub estimator: String,
    pub replications_used: usize,
    pub undefined_draws: usize,
    pub empirical_mean: f64,
    pub empirical_bias: f64,
    pub empirical_mse: f64,
    /// Monte Carlo standard error of the empirical mean; unset for fewer than
    /// 2 defined draws.
    pub se_mean: Option<f64>,
    /// Monte Carlo standard error of the empirical MSE.
    pub se_mse: Option<f64>,
    /// Empirical PRE against the baseline (`ȳ` or `s_y²`) on the same draws.
    pub pre_empirical: Option<f64>,
    pub theory_bias: Option<f64>,
    pub theory_mse: f64,
    /// `(empirical − theory)/theory` for the MSE.
    pub mse_rel_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub master_seed: u64,
    pub replications: usize,
    pub population_fingerprint: String,
    pub design: DesignConstants,
    /// True `Ȳ`, recomputed from the population at report time.
    pub truth_ybar: f64,
    /// True `S_y²`, recomputed from the population at report time.
    pub truth_sy2: f64,
    /// Empirical MSE of `ȳ` over all replications (PRE baseline).
    pub baseline_mean_mse: f64,
    /// Empirical MSE of `s_y²` over all replications (PRE baseline).
    pub baseline_variance_mse: f64,
    pub estimators: Vec<EstimatorReport>,
}

/// Exact design moments from full enumeration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub estimator: String,
    pub exact_expectation: f64,
    pub exact_bias: f64,
    pub exact_mse: f64,
    pub undefined_subsets: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub n_population: usize,
    pub sample_size: usize,
    pub n_subsets: u64,
    pub population_fingerprint: String,
    pub truth_ybar: f64,
    pub truth_sy2: f64,
    pub estimators: Vec<OracleRow>,
}

const BLOCK: usize = 1024;

/// Sums in balanced pairs; the result is a pure function of the value order.
fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

#[derive(Clone, Default)]
struct Accum {
    n_defined: usize,
    sum_dev: f64,
    sum_dev2: f64,
    sum_dev4: f64,
    undefined: usize,
    first_undefined: Option<usize>,
}

struct BlockPartial {
    per_estimator: Vec<Accum>,
    baseline_mean_dev2: f64,
    baseline_var_dev2: f64,
}

fn evaluate_spec(
    spec: &EstimatorSpec,
    stats: MeanStats<'_>,
    known: &KnownParams,
    vknown: &VarianceKnown,
) -> Result<f64, EstimateError> {
    match (spec, stats) {
        (EstimatorSpec::Mean(m), s) => estimate_mean(m, s, known),
        (EstimatorSpec::Variance(v), MeanStats::Single(s)) => estimate_variance(v, s, vknown),
        (EstimatorSpec::Variance(v), MeanStats::TwoPhase(t)) => {
            estimate_variance(v, &t.second, vknown)
        }
    }
}

fn spec_theory(
    spec: &EstimatorSpec,
    summary: &crate::population::PopulationSummary,
    design: &DesignConstants,
) -> Result<TheoryMoments, TheoryError> {
    match spec {
        EstimatorSpec::Mean(m) => theory_mean(m, summary, design),
        EstimatorSpec::Variance(v) => theory_variance(v, summary, design),
    }
}

fn validate_compat(
    pop: &Population,
    config: &SimulationConfig,
) -> Result<(), SimulationError> {
    for spec in &config.estimators {
        let incompatible = |reason: &str| SimulationError::IncompatibleSpec {
            estimator: spec.to_string(),
            reason: reason.into(),
        };
        if spec.needs_x() && pop.x().is_none() {
            return Err(incompatible("population has no auxiliary variable"));
        }
        if spec.needs_phi() && pop.phi().is_none() {
            return Err(incompatible("population has no attribute column"));
        }
        if spec.is_two_phase() && !config.design.is_two_phase() {
            return Err(incompatible("two-phase estimator under single-phase design"));
        }
        if matches!(spec, EstimatorSpec::Variance(_)) && config.design.is_two_phase() {
            return Err(incompatible("variance estimators are single-phase only"));
        }
        let spec_check = match spec {
            EstimatorSpec::Mean(m) => m.validate(),
            EstimatorSpec::Variance(v) => v.validate(),
        };
        spec_check.map_err(|e| SimulationError::IncompatibleSpec {
            estimator: spec.to_string(),
            reason: e.to_string(),
        })?;
    }
    Ok(())
}

/// Runs `replications` independent draws and aggregates empirical moments
/// for every estimator, with theory values alongside.
pub fn run_simulation(
    pop: &Population,
    config: &SimulationConfig,
) -> Result<SimulationReport, SimulationError> {
    if config.replications == 0 {
        return Err(SimulationError::IncompatibleSpec {
            estimator: "<config>".into(),
            reason: "replications must be at least 1".into(),
        });
    }
    if config.design.n_population != pop.len() {
        return Err(SimulationError::IncompatibleSpec {
            estimator: "<design>".into(),
            reason: format!(
                "design N = {} but population has {} units",
                config.design.n_population,
                pop.len()
            ),
        });
    }
    validate_compat(pop, config)?;

    let summary = summarize(pop)?;
    let known = KnownParams::from_summary(&summary);
    let vknown = VarianceKnown::from_summary(&summary);
    let truth_ybar = summary.ybar;
    let truth_sy2 = summary
        .sy2
        .expect("population of size >= 2 always has S_y^2");

    let theory: Vec<TheoryMoments> = config
        .estimators
        .iter()
        .map(|spec| spec_theory(spec, &summary, &config.design))
        .collect::<Result<_, _>>()?;

    let run = || -> Result<Vec<BlockPartial>, SimulationError> {
        let blocks: Vec<(usize, usize)> = (0..config.replications)
            .step_by(BLOCK)
            .map(|start| (start, (start + BLOCK).min(config.replications)))
            .collect();
        blocks
            .par_iter()
            .map(|&(start, end)| run_block(pop, config, &known, &vknown, truth_ybar, truth_sy2, start, end))
            .collect()
    };
    let partials = match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool construction")
            .install(run),
        None => run(),
    }?;

    let n_est = config.estimators.len();
    let mut rows = Vec::with_capacity(n_est);
    let baseline_mean_mse = pairwise_sum(
        &partials
            .iter()
            .map(|p| p.baseline_mean_dev2)
            .collect::<Vec<_>>(),
    ) / config.replications as f64;
    let baseline_variance_mse = pairwise_sum(
        &partials
            .iter()
            .map(|p| p.baseline_var_dev2)
            .collect::<Vec<_>>(),
    ) / config.replications as f64;

    for (e, spec) in config.estimators.iter().enumerate() {
        let n_defined: usize = partials.iter().map(|p| p.per_estimator[e].n_defined).sum();
        let undefined: usize = partials.iter().map(|p| p.per_estimator[e].undefined).sum();
        let first_undefined = partials
            .iter()
            .filter_map(|p| p.per_estimator[e].first_undefined)
            .min();
        if config.policy == UndefinedPolicy::Abort {
            if let Some(replication) = first_undefined {
                return Err(SimulationError::UndefinedDrawAborted {
                    estimator: spec.to_string(),
                    replication,
                    undefined_total: undefined,
                });
            }
        }
        if n_defined == 0 {
            return Err(SimulationError::AllDrawsUndefined {
                estimator: spec.to_string(),
                replications: config.replications,
            });
        }
        let nf = n_defined as f64;
        let s1 = pairwise_sum(
            &partials
                .iter()
                .map(|p| p.per_estimator[e].sum_dev)
                .collect::<Vec<_>>(),
        );
        let s2 = pairwise_sum(
            &partials
                .iter()
                .map(|p| p.per_estimator[e].sum_dev2)
                .collect::<Vec<_>>(),
        );
        let s4 = pairwise_sum(
            &partials
                .iter()
                .map(|p| p.per_estimator[e].sum_dev4)
                .collect::<Vec<_>>(),
        );
        let truth = match spec {
            EstimatorSpec::Mean(_) => truth_ybar,
            EstimatorSpec::Variance(_) => truth_sy2,
        };
        let bias = s1 / nf;
        let mse = s2 / nf;
        let (se_mean, se_mse) = if n_defined >= 2 {
            let var_dev = ((s2 - s1 * s1 / nf) / (nf - 1.0)).max(0.0);
            let var_dev2 = ((s4 - s2 * s2 / nf) / (nf - 1.0)).max(0.0);
            (
                Some((var_dev / nf).sqrt()),
                Some((var_dev2 / nf).sqrt()),
            )
        } else {
            (None, None)
        };
        let baseline = match spec {
            EstimatorSpec::Mean(_) => baseline_mean_mse,
            EstimatorSpec::Variance(_) => baseline_variance_mse,
        };
        let pre_empirical = (mse > 0.0).then(|| 100.0 * baseline / mse);
        let th = &theory[e];
        rows.push(EstimatorReport {
            estimator: spec.to_string(),
            replications_used: n_defined,
            undefined_draws: undefined,
            empirical_mean: truth + bias,
            empirical_bias: bias,
            empirical_mse: mse,
            se_mean,
            se_mse,
            pre_empirical,
            theory_bias: th.bias,
            theory_mse: th.mse,
            mse_rel_delta: (mse - th.mse) / th.mse,
        });
    }

    Ok(SimulationReport {
        master_seed: config.master_seed,
        replications: config.replications,
        population_fingerprint: pop.fingerprint(),
        design: config.design,
        truth_ybar,
        truth_sy2,
        baseline_mean_mse,
        baseline_variance_mse,
        estimators: rows,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_block(
    pop: &Population,
    config: &SimulationConfig,
    known: &KnownParams,
    vknown: &VarianceKnown,
    truth_ybar: f64,
    truth_sy2: f64,
    start: usize,
    end: usize,
) -> Result<BlockPartial, SimulationError> {
    let n_est = config.estimators.len();
    let mut partial = BlockPartial {
        per_estimator: vec![Accum::default(); n_est],
        baseline_mean_dev2: 0.0,
        baseline_var_dev2: 0.0,
    };
    for r in start..end {
        let mut rng = replication_rng(config.master_seed, r as u64);
        let single;
        let two_phase;
        let stats = match config.design.n_first_phase {
            Some(n_prime) => {
                let tps = draw_two_phase(pop, n_prime, config.design.n_sample, &mut rng)?;
                two_phase = compute_two_phase_stats(pop, &tps);
                MeanStats::TwoPhase(&two_phase)
            }
            None => {
                let sample = draw_srswor(pop, config.design.n_sample, &mut rng)?;
                single = compute_sample_stats(pop, &sample);
                MeanStats::Single(&single)
            }
        };
        let base = match stats {
            MeanStats::Single(s) => s,
            MeanStats::TwoPhase(t) => &t.second,
        };
        let dev_mean = base.ybar - truth_ybar;
        partial.baseline_mean_dev2 += dev_mean * dev_mean;
        let dev_var = base.sy2 - truth_sy2;
        partial.baseline_var_dev2 += dev_var * dev_var;

        for (e, spec) in config.estimators.iter().enumerate() {
            let acc = &mut partial.per_estimator[e];
            match evaluate_spec(spec, stats, known, vknown) {
                Ok(value) => {
                    let truth = match spec {
                        EstimatorSpec::Mean(_) => truth_ybar,
                        EstimatorSpec::Variance(_) => truth_sy2,
                    };
                    let d = value - truth;
                    acc.n_defined += 1;
                    acc.sum_dev += d;
                    acc.sum_dev2 += d * d;
                    acc.sum_dev4 += d * d * d * d;
                }
                Err(EstimateError::Undefined(_)) => {
                    acc.undefined += 1;
                    if acc.first_undefined.is_none() {
                        acc.first_undefined = Some(r);
                    }
                }
                Err(other) => {
                    return Err(SimulationError::IncompatibleSpec {
                        estimator: spec.to_string(),
                        reason: other.to_string(),
                    })
                }
            }
        }
    }
    Ok(partial)
}

/// Exact expectation, bias and MSE of every estimator over all `C(N, n)`
/// equally-likely samples. Single-phase only; estimators undefined on some
/// subsets are averaged over the defined ones, with the undefined count
/// reported.
pub fn exact_moments_enumeration(
    pop: &Population,
    n: usize,
    specs: &[EstimatorSpec],
    cap: Option<u128>,
) -> Result<OracleReport, SimulationError> {
    for spec in specs {
        if spec.is_two_phase() {
            return Err(SimulationError::IncompatibleSpec {
                estimator: spec.to_string(),
                reason: "exact enumeration covers single-phase designs only".into(),
            });
        }
    }
    let summary = summarize(pop)?;
    let known = KnownParams::from_summary(&summary);
    let vknown = VarianceKnown::from_summary(&summary);
    let truth_ybar = summary.ybar;
    let truth_sy2 = summary.sy2.expect("population has S_y^2");

    let mut sums = vec![(0usize, 0.0f64, 0.0f64, 0.0f64); specs.len()]; // (count, Σt, Σd, Σd²)
    let mut undefined = vec![0u64; specs.len()];
    for subset in enumerate_samples(pop.len(), n, cap)? {
        let stats = compute_sample_stats(pop, &Sample::from_indices(subset));
        for (e, spec) in specs.iter().enumerate() {
            match evaluate_spec(spec, MeanStats::Single(&stats), &known, &vknown) {
                Ok(value) => {
                    let truth = match spec {
                        EstimatorSpec::Mean(_) => truth_ybar,
                        EstimatorSpec::Variance(_) => truth_sy2,
                    };
                    let entry = &mut sums[e];
                    entry.0 += 1;
                    entry.1 += value;
                    entry.2 += value - truth;
                    entry.3 += (value - truth) * (value - truth);
                }
                Err(EstimateError::Undefined(_)) => undefined[e] += 1,
                Err(other) => {
                    return Err(SimulationError::IncompatibleSpec {
                        estimator: spec.to_string(),
                        reason: other.to_string(),
                    })
                }
            }
        }
    }

    let mut rows = Vec::with_capacity(specs.len());
    for (e, spec) in specs.iter().enumerate() {
        let (count, sum_t, sum_d, sum_d2) = sums[e];
        if count == 0 {
            return Err(SimulationError::AllDrawsUndefined {
                estimator: spec.to_string(),
                replications: undefined[e] as usize,
            });
        }
        let nf = count as f64;
        rows.push(OracleRow {
            estimator: spec.to_string(),
            exact_expectation: sum_t / nf,
            exact_bias: sum_d / nf,
            exact_mse: sum_d2 / nf,
            undefined_subsets: undefined[e],
        });
    }
    Ok(OracleReport {
        n_population: pop.len(),
        sample_size: n,
        n_subsets: binomial(pop.len(), n) as u64,
        population_fingerprint: pop.fingerprint(),
        truth_ybar,
        truth_sy2,
        estimators: rows,
    })
}

/// Tolerance for a theory-vs-empirical comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum ToleranceSpec {
    Relative(f64),
    Absolute(f64),
}

/// Default relative MSE tolerance for first-order theory at `n ≥ 50`.
pub const DEFAULT_MSE_TOLERANCE: ToleranceSpec = ToleranceSpec::Relative(0.10);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub estimator: String,
    pub empirical_mse: f64,
    pub theory_mse: f64,
    pub delta_abs: f64,
    pub delta_rel: f64,
    pub se_mse: Option<f64>,
    pub pass: bool,
}

/// Either empirical source for [`compare_theory_empirical`].
#[derive(Debug, Clone, Copy)]
pub enum EmpiricalReport<'a> {
    Simulation(&'a SimulationReport),
    Oracle(&'a OracleReport),
}

/// Per-estimator pass/fail verdicts of empirical MSE against supplied theory
/// values, at the given tolerance.
pub fn compare_theory_empirical(
    report: EmpiricalReport<'_>,
    theory: &[TheoryMoments],
    tolerance: ToleranceSpec,
) -> Result<Vec<ComparisonRow>, SimulationError> {
    let rows: Vec<(String, f64, Option<f64>)> = match report {
        EmpiricalReport::Simulation(r) => r
            .estimators
            .iter()
            .map(|row| (row.estimator.clone(), row.empirical_mse, row.se_mse))
            .collect(),
        EmpiricalReport::Oracle(r) => r
            .estimators
            .iter()
            .map(|row| (row.estimator.clone(), row.exact_mse, None))
            .collect(),
    };
    if rows.len() != theory.len() {
        return Err(SimulationError::SpecMismatch {
            expected: rows.len(),
            got: theory.len(),
        });
    }
    Ok(rows
        .into_iter()
        .zip(theory)
        .map(|((estimator, empirical, se_mse), th)| {
            let delta_abs = (empirical - th.mse).abs();
            let delta_rel = if th.mse != 0.0 {
                delta_abs / th.mse.abs()
            } else {
                delta_abs
            };
            let pass = match tolerance {
                ToleranceSpec::Relative(tol) => delta_rel <= tol,
                ToleranceSpec::Absolute(tol) => delta_abs <= tol,
            };
            ComparisonRow {
                estimator,
                empirical_mse: empirical,
                theory_mse: th.mse,
                delta_abs,
                delta_rel,
                se_mse,
                pass,
            }
        })
        .collect())
}
