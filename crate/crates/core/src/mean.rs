//! Population-mean estimators: ratio, product, difference-cum-ratio and
//! exponential families, in single-phase and two-phase SRSWOR designs.
//!
//! Attribute-based families exploit a known population proportion `P`
//! (Naik–Gupta ratio/product, exponential ratio-product combinations, and the
//! difference-cum-ratio family `(ȳ + b_φ(P−p))·(m₁P+m₂)/(m₁p+m₂)`); auxiliary-
//! variable families exploit a known mean `X̄` (classical ratio, Bahl–Tuteja
//! exponential ratio/product, shifted-exponential members built from `C_x`,
//! `β₂(x)` and `ρ`, and almost-unbiased weighted combinations).
//!
//! Besides point evaluation, the module computes each family's optimum
//! mixing constant and the weight triples that annihilate the first-order
//! bias of the exponential combinations.

use serde::{Deserialize, Serialize};

use crate::error::EstimateError;
use crate::population::PopulationSummary;
use crate::sampling::{SampleStats, TwoPhaseStats};

/// Population-level constants an estimator is permitted to know.
///
/// Only the fields actually referenced by the chosen estimator need to be
/// set. `bphi` is the population attribute regression coefficient, used only
/// by the explicitly labeled population-regression variant of the
/// difference-cum-ratio family (handy for enumeration-oracle experiments).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct KnownParams {
    pub xbar: Option<f64>,
    pub p: Option<f64>,
    pub cp: Option<f64>,
    pub cx: Option<f64>,
    pub beta2x: Option<f64>,
    pub beta2phi: Option<f64>,
    pub rho: Option<f64>,
    pub rho_pb: Option<f64>,
    pub bphi: Option<f64>,
}

impl KnownParams {
    pub fn from_summary(summary: &PopulationSummary) -> Self {
        Self {
            xbar: summary.xbar,
            p: summary.p,
            cp: summary.cp,
            cx: summary.cx,
            beta2x: summary.beta2x,
            beta2phi: summary.beta2phi,
            rho: summary.rho,
            rho_pb: summary.rho_pb,
            bphi: summary.bphi,
        }
    }
}

fn need(value: Option<f64>, name: &'static str) -> Result<f64, EstimateError> {
    value.ok_or(EstimateError::MissingKnownParam(name))
}

fn need_stat(value: Option<f64>, name: &'static str) -> Result<f64, EstimateError> {
    value.ok_or(EstimateError::MissingStatistic(name))
}

/// The ten shifted-exponential members `ȳ·exp[a(X̄−x̄)/(a(X̄+x̄)+2b)]`,
/// identified by their `(a, b)` build from known auxiliary parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpAuxMember {
    /// `a = 1, b = 0` (Bahl–Tuteja).
    BahlTuteja,
    /// `a = 1, b = β₂(x)`.
    Beta2xOffset,
    /// `a = 1, b = C_x`.
    CxOffset,
    /// `a = 1, b = ρ`.
    RhoOffset,
    /// `a = β₂(x), b = C_x`.
    Beta2xCx,
    /// `a = C_x, b = β₂(x)`.
    CxBeta2x,
    /// `a = C_x, b = ρ`.
    CxRho,
    /// `a = ρ, b = C_x`.
    RhoCx,
    /// `a = β₂(x), b = ρ`.
    Beta2xRho,
    /// `a = ρ, b = β₂(x)`.
    RhoBeta2x,
}

impl ExpAuxMember {
    pub const ALL: [ExpAuxMember; 10] = [
        ExpAuxMember::BahlTuteja,
        ExpAuxMember::Beta2xOffset,
        ExpAuxMember::CxOffset,
        ExpAuxMember::RhoOffset,
        ExpAuxMember::Beta2xCx,
        ExpAuxMember::CxBeta2x,
        ExpAuxMember::CxRho,
        ExpAuxMember::RhoCx,
        ExpAuxMember::Beta2xRho,
        ExpAuxMember::RhoBeta2x,
    ];

    /// Member slot number, 1 through 10.
    pub fn index(self) -> u8 {
        Self::ALL.iter().position(|m| *m == self).unwrap() as u8 + 1
    }

    pub fn from_index(i: u8) -> Option<Self> {
        Self::ALL.get(i.checked_sub(1)? as usize).copied()
    }

    /// Resolves the `(a, b)` pair from known auxiliary parameters.
    pub fn coefficients(self, known: &KnownParams) -> Result<(f64, f64), EstimateError> {
        use ExpAuxMember::*;
        Ok(match self {
            BahlTuteja => (1.0, 0.0),
            Beta2xOffset => (1.0, need(known.beta2x, "beta2x")?),
            CxOffset => (1.0, need(known.cx, "cx")?),
            RhoOffset => (1.0, need(known.rho, "rho")?),
            Beta2xCx => (need(known.beta2x, "beta2x")?, need(known.cx, "cx")?),
            CxBeta2x => (need(known.cx, "cx")?, need(known.beta2x, "beta2x")?),
            CxRho => (need(known.cx, "cx")?, need(known.rho, "rho")?),
            RhoCx => (need(known.rho, "rho")?, need(known.cx, "cx")?),
            Beta2xRho => (need(known.beta2x, "beta2x")?, need(known.rho, "rho")?),
            RhoBeta2x => (need(known.rho, "rho")?, need(known.beta2x, "beta2x")?),
        })
    }
}

/// A population-mean estimator and its constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum MeanEstimatorSpec {
    /// `ȳ`.
    MeanPerUnit,
    /// `ȳ·P/p`.
    NaikGuptaRatio,
    /// `ȳ·p/P`.
    NaikGuptaProduct,
    /// `ȳ·X̄/x̄`, the classical auxiliary-variable ratio estimator.
    ClassicalRatioAux,
    /// `(ȳ + b_φ(P−p))·(m₁P+m₂)/(m₁p+m₂)`; `m₁ = 1, m₂ = 0` is the plain
    /// difference-cum-ratio estimator. `pop_regression` swaps the sample
    /// coefficient `b_φ` for the population `B_φ`.
    AttrDiffRatio {
        m1: f64,
        m2: f64,
        #[serde(default)]
        pop_regression: bool,
    },
    /// `ȳ·exp((P−p)/(P+p))`.
    ExpRatioAttr,
    /// `ȳ·exp((p−P)/(p+P))`.
    ExpProductAttr,
    /// `ȳ·[α·exp((P−p)/(P+p)) + (1−α)·exp((p−P)/(p+P))]`.
    ExpCombinedAttr { alpha: f64 },
    /// `ȳ·exp[((aX̄+b)−(ax̄+b)) / ((aX̄+b)+(ax̄+b))]`.
    ExpRatioAux { a: f64, b: f64 },
    /// `α·t₁ + (1−α)·t_member`, mixing the Bahl–Tuteja member with a shifted
    /// member.
    ExpMixedAux { member: ExpAuxMember, alpha: f64 },
    /// `h₀ȳ + h₁·ȳe^{(X̄−x̄)/(X̄+x̄)} + h₂·ȳe^{(x̄−X̄)/(x̄+X̄)}` with `Σhᵢ = 1`.
    AlmostUnbiasedExp { h0: f64, h1: f64, h2: f64 },
    /// `ȳ·exp((p′−p)/(p′+p))`.
    ExpRatioAttr2P,
    /// `ȳ·exp((p−p′)/(p+p′))`.
    ExpProductAttr2P,
    /// Two-phase ratio-product exponential mixture in `α₁`.
    ExpCombinedAttr2P { alpha1: f64 },
    /// `ȳ·p′/p`.
    ClassicalRatio2P,
    /// `ȳ·p/p′`.
    ClassicalProduct2P,
    /// `ȳ·exp((x̄′−x̄)/(x̄′+x̄))`.
    ExpRatioAux2P,
    /// `ȳ·exp((x̄−x̄′)/(x̄+x̄′))`.
    ExpProductAux2P,
    /// Two-phase almost-unbiased combination with `Σwᵢ = 1`.
    AlmostUnbiasedExp2P { w0: f64, w1: f64, w2: f64 },
}

impl MeanEstimatorSpec {
    pub fn is_two_phase(&self) -> bool {
        use MeanEstimatorSpec::*;
        matches!(
            self,
            ExpRatioAttr2P
                | ExpProductAttr2P
                | ExpCombinedAttr2P { .. }
                | ClassicalRatio2P
                | ClassicalProduct2P
                | ExpRatioAux2P
                | ExpProductAux2P
                | AlmostUnbiasedExp2P { .. }
        )
    }

    /// Checks the estimator's own constants (weight sums, nonzero `m₁`).
    pub fn validate(&self) -> Result<(), EstimateError> {
        match self {
            MeanEstimatorSpec::AttrDiffRatio { m1, .. } => {
                if *m1 == 0.0 {
                    return Err(EstimateError::InvalidSpec("m1 must be nonzero".into()));
                }
            }
            MeanEstimatorSpec::ExpRatioAux { a, .. } => {
                if *a == 0.0 {
                    return Err(EstimateError::InvalidSpec("a must be nonzero".into()));
                }
            }
            MeanEstimatorSpec::AlmostUnbiasedExp { h0, h1, h2 } => {
                let sum = h0 + h1 + h2;
                let scale = h0.abs().max(h1.abs()).max(h2.abs()).max(1.0);
                if (sum - 1.0).abs() > 1e-9 * scale {
                    return Err(EstimateError::InvalidSpec(format!(
                        "weights must sum to 1 (got {sum})"
                    )));
                }
            }
            MeanEstimatorSpec::AlmostUnbiasedExp2P { w0, w1, w2 } => {
                let sum = w0 + w1 + w2;
                let scale = w0.abs().max(w1.abs()).max(w2.abs()).max(1.0);
                if (sum - 1.0).abs() > 1e-9 * scale {
                    return Err(EstimateError::InvalidSpec(format!(
                        "weights must sum to 1 (got {sum})"
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

impl std::fmt::Display for MeanEstimatorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use MeanEstimatorSpec::*;
        match self {
            MeanPerUnit => write!(f, "mean-per-unit"),
            NaikGuptaRatio => write!(f, "naik-gupta-ratio"),
            NaikGuptaProduct => write!(f, "naik-gupta-product"),
            ClassicalRatioAux => write!(f, "classical-ratio-aux"),
            AttrDiffRatio {
                m1,
                m2,
                pop_regression,
            } => {
                if *pop_regression {
                    write!(f, "attr-diff-ratio{{m1={m1},m2={m2},pop-b=true}}")
                } else {
                    write!(f, "attr-diff-ratio{{m1={m1},m2={m2}}}")
                }
            }
            ExpRatioAttr => write!(f, "exp-ratio-attr"),
            ExpProductAttr => write!(f, "exp-product-attr"),
            ExpCombinedAttr { alpha } => write!(f, "exp-combined-attr{{alpha={alpha}}}"),
            ExpRatioAux { a, b } => write!(f, "exp-ratio-aux{{a={a},b={b}}}"),
            ExpMixedAux { member, alpha } => {
                write!(f, "exp-mixed-aux{{i={},alpha={alpha}}}", member.index())
            }
            AlmostUnbiasedExp { h0, h1, h2 } => {
                write!(f, "almost-unbiased-exp{{h0={h0},h1={h1},h2={h2}}}")
            }
            ExpRatioAttr2P => write!(f, "exp-ratio-attr-2p"),
            ExpProductAttr2P => write!(f, "exp-product-attr-2p"),
            ExpCombinedAttr2P { alpha1 } => {
                write!(f, "exp-combined-attr-2p{{alpha1={alpha1}}}")
            }
            ClassicalRatio2P => write!(f, "classical-ratio-2p"),
            ClassicalProduct2P => write!(f, "classical-product-2p"),
            ExpRatioAux2P => write!(f, "exp-ratio-aux-2p"),
            ExpProductAux2P => write!(f, "exp-product-aux-2p"),
            AlmostUnbiasedExp2P { w0, w1, w2 } => {
                write!(f, "almost-unbiased-exp-2p{{w0={w0},w1={w1},w2={w2}}}")
            }
        }
    }
}

/// Sample statistics for either design phase structure.
#[derive(Debug, Clone, Copy)]
pub enum MeanStats<'a> {
    Single(&'a SampleStats),
    TwoPhase(&'a TwoPhaseStats),
}

impl<'a> MeanStats<'a> {
    fn second(&self) -> &'a SampleStats {
        match self {
            MeanStats::Single(s) => s,
            MeanStats::TwoPhase(t) => &t.second,
        }
    }

    fn two_phase(&self) -> Result<&'a TwoPhaseStats, EstimateError> {
        match self {
            MeanStats::TwoPhase(t) => Ok(t),
            MeanStats::Single(_) => Err(EstimateError::PhaseMismatch { required: "two" }),
        }
    }
}

fn undef(reason: impl Into<String>) -> EstimateError {
    EstimateError::Undefined(reason.into())
}

/// `exp((u − v)/(u + v))`, the ratio-type exponential adjustment.
fn exp_ratio(u: f64, v: f64) -> Result<f64, EstimateError> {
    let denom = u + v;
    if denom <= 0.0 {
        return Err(undef(format!("exponential denominator {denom} <= 0")));
    }
    Ok(((u - v) / denom).exp())
}

/// Evaluates a mean estimator on sample statistics and known parameters.
pub fn estimate_mean(
    spec: &MeanEstimatorSpec,
    stats: MeanStats<'_>,
    known: &KnownParams,
) -> Result<f64, EstimateError> {
    use MeanEstimatorSpec::*;
    spec.validate()?;
    let s = stats.second();
    let ybar = s.ybar;
    match spec {
        MeanPerUnit => Ok(ybar),
        NaikGuptaRatio => {
            let p_cap = need(known.p, "p")?;
            let p = need_stat(s.p, "p")?;
            if p == 0.0 {
                return Err(undef("sample proportion p = 0"));
            }
            Ok(ybar * p_cap / p)
        }
        NaikGuptaProduct => {
            let p_cap = need(known.p, "p")?;
            if p_cap == 0.0 {
                return Err(undef("population proportion P = 0"));
            }
            let p = need_stat(s.p, "p")?;
            Ok(ybar * p / p_cap)
        }
        ClassicalRatioAux => {
            let xbar_cap = need(known.xbar, "xbar")?;
            let xbar = need_stat(s.xbar, "xbar")?;
            if xbar == 0.0 {
                return Err(undef("sample mean of x is 0"));
            }
            Ok(ybar * xbar_cap / xbar)
        }
        AttrDiffRatio {
            m1,
            m2,
            pop_regression,
        } => {
            let p_cap = need(known.p, "p")?;
            let p = need_stat(s.p, "p")?;
            let b = if *pop_regression {
                need(known.bphi, "bphi")?
            } else {
                s.bphi
                    .ok_or_else(|| undef("sample attribute variance is 0, b_phi undefined"))?
            };
            let denom = m1 * p + m2;
            if denom == 0.0 {
                return Err(undef("m1*p + m2 = 0"));
            }
            let scale = m1 * p_cap + m2;
            if scale == 0.0 {
                return Err(undef("m1*P + m2 = 0"));
            }
            Ok((ybar + b * (p_cap - p)) / denom * scale)
        }
        ExpRatioAttr => {
            let p_cap = need(known.p, "p")?;
            let p = need_stat(s.p, "p")?;
            Ok(ybar * exp_ratio(p_cap, p)?)
        }
        ExpProductAttr => {
            let p_cap = need(known.p, "p")?;
            let p = need_stat(s.p, "p")?;
            Ok(ybar * exp_ratio(p, p_cap)?)
        }
        ExpCombinedAttr { alpha } => {
            let p_cap = need(known.p, "p")?;
            let p = need_stat(s.p, "p")?;
            let ratio = exp_ratio(p_cap, p)?;
            Ok(ybar * (alpha * ratio + (1.0 - alpha) / ratio))
        }
        ExpRatioAux { a, b } => {
            let xbar_cap = need(known.xbar, "xbar")?;
            let xbar = need_stat(s.xbar, "xbar")?;
            Ok(ybar * exp_aux_factor(*a, *b, xbar_cap, xbar)?)
        }
        ExpMixedAux { member, alpha } => {
            let xbar_cap = need(known.xbar, "xbar")?;
            let xbar = need_stat(s.xbar, "xbar")?;
            let bahl_tuteja = exp_aux_factor(1.0, 0.0, xbar_cap, xbar)?;
            let (a, b) = member.coefficients(known)?;
            let other = exp_aux_factor(a, b, xbar_cap, xbar)?;
            Ok(ybar * (alpha * bahl_tuteja + (1.0 - alpha) * other))
        }
        AlmostUnbiasedExp { h0, h1, h2 } => {
            let xbar_cap = need(known.xbar, "xbar")?;
            let xbar = need_stat(s.xbar, "xbar")?;
            let ratio = exp_ratio(xbar_cap, xbar)?;
            Ok(ybar * (h0 + h1 * ratio + h2 / ratio))
        }
        ExpRatioAttr2P => {
            let t = stats.two_phase()?;
            let p = need_stat(t.second.p, "p")?;
            let p_prime = need_stat(t.p_prime, "p_prime")?;
            Ok(t.second.ybar * exp_ratio(p_prime, p)?)
        }
        ExpProductAttr2P => {
            let t = stats.two_phase()?;
            let p = need_stat(t.second.p, "p")?;
            let p_prime = need_stat(t.p_prime, "p_prime")?;
            Ok(t.second.ybar * exp_ratio(p, p_prime)?)
        }
        ExpCombinedAttr2P { alpha1 } => {
            let t = stats.two_phase()?;
            let p = need_stat(t.second.p, "p")?;
            let p_prime = need_stat(t.p_prime, "p_prime")?;
            let ratio = exp_ratio(p_prime, p)?;
            Ok(t.second.ybar * (alpha1 * ratio + (1.0 - alpha1) / ratio))
        }
        ClassicalRatio2P => {
            let t = stats.two_phase()?;
            let p = need_stat(t.second.p, "p")?;
            let p_prime = need_stat(t.p_prime, "p_prime")?;
            if p == 0.0 {
                return Err(undef("second-phase proportion p = 0"));
            }
            Ok(t.second.ybar * p_prime / p)
        }
        ClassicalProduct2P => {
            let t = stats.two_phase()?;
            let p = need_stat(t.second.p, "p")?;
            let p_prime = need_stat(t.p_prime, "p_prime")?;
            if p_prime == 0.0 {
                return Err(undef("first-phase proportion p' = 0"));
            }
            Ok(t.second.ybar * p / p_prime)
        }
        ExpRatioAux2P => {
            let t = stats.two_phase()?;
            let xbar = need_stat(t.second.xbar, "xbar")?;
            let xbar_prime = need_stat(t.xbar_prime, "xbar_prime")?;
            Ok(t.second.ybar * exp_ratio(xbar_prime, xbar)?)
        }
        ExpProductAux2P => {
            let t = stats.two_phase()?;
            let xbar = need_stat(t.second.xbar, "xbar")?;
            let xbar_prime = need_stat(t.xbar_prime, "xbar_prime")?;
            Ok(t.second.ybar * exp_ratio(xbar, xbar_prime)?)
        }
        AlmostUnbiasedExp2P { w0, w1, w2 } => {
            let t = stats.two_phase()?;
            let xbar = need_stat(t.second.xbar, "xbar")?;
            let xbar_prime = need_stat(t.xbar_prime, "xbar_prime")?;
            let ratio = exp_ratio(xbar_prime, xbar)?;
            Ok(t.second.ybar * (w0 + w1 * ratio + w2 / ratio))
        }
    }
}

/// `exp[a(X̄−x̄) / (a(X̄+x̄)+2b)]` with both shifted terms required strictly
/// positive.
fn exp_aux_factor(a: f64, b: f64, xbar_cap: f64, xbar: f64) -> Result<f64, EstimateError> {
    let known_term = a * xbar_cap + b;
    let sample_term = a * xbar + b;
    if known_term <= 0.0 {
        return Err(undef(format!("a*Xbar + b = {known_term} <= 0")));
    }
    if sample_term <= 0.0 {
        return Err(undef(format!("a*xbar + b = {sample_term} <= 0")));
    }
    Ok(((known_term - sample_term) / (known_term + sample_term)).exp())
}

/// Optimum mixing constant `α₀ = (2K_p + 1)/2` for the attribute
/// ratio-product exponential combination (same form in both phases).
pub fn optimum_alpha_attr(summary: &PopulationSummary) -> Result<f64, EstimateError> {
    let kp = need(summary.kp, "kp")?;
    Ok((2.0 * kp + 1.0) / 2.0)
}

/// Optimum mixing constant `α = 2(K − θ)/(1 − 2θ)` for the shifted-exponential
/// mixtures. `θ = 1/2` (the unshifted member) has no finite optimum.
pub fn optimum_alpha_exp(summary: &PopulationSummary, theta: f64) -> Result<f64, EstimateError> {
    let k = need(summary.k, "k")?;
    if (1.0 - 2.0 * theta).abs() < 1e-14 {
        return Err(EstimateError::Undefined(
            "theta = 1/2: mixture coefficient does not depend on alpha".into(),
        ));
    }
    Ok(2.0 * (k - theta) / (1.0 - 2.0 * theta))
}

/// `θ = aX̄ / (2(aX̄ + b))`, the expansion constant of the shifted-exponential
/// family.
pub fn theta_exp_family(a: f64, b: f64, xbar: f64) -> Result<f64, EstimateError> {
    let denom = a * xbar + b;
    if denom == 0.0 {
        return Err(EstimateError::Undefined("a*Xbar + b = 0".into()));
    }
    Ok(a * xbar / (2.0 * denom))
}

/// Bias-annihilating weights `(1 − 4K², K + 2K², −K + 2K²)` for the
/// single-phase almost-unbiased exponential combination.
pub fn almost_unbiased_weights(k: f64) -> (f64, f64, f64) {
    let k2 = 2.0 * k * k;
    (1.0 - 2.0 * k2, k + k2, -k + k2)
}

/// Two-phase analog: `(1 − 8K², K + 4K², −K + 4K²)`.
pub fn almost_unbiased_weights_2p(k: f64) -> (f64, f64, f64) {
    let k4 = 4.0 * k * k;
    (1.0 - 2.0 * k4, k + k4, -k + k4)
}

/// `(m₁, m₂)` pairs of the ten difference-cum-ratio members, built from
/// attribute parameters: slot 1 is `(1, 0)`, the rest shift or scale by
/// `β₂(φ)`, `C_p` and `ρ_pb`.
pub fn attr_member_coefficients(
    member: u8,
    summary: &PopulationSummary,
) -> Result<(f64, f64), EstimateError> {
    let beta2phi = || need(summary.beta2phi, "beta2phi");
    let cp = || need(summary.cp, "cp");
    let rho_pb = || need(summary.rho_pb, "rho_pb");
    Ok(match member {
        1 => (1.0, 0.0),
        2 => (1.0, beta2phi()?),
        3 => (1.0, cp()?),
        4 => (1.0, rho_pb()?),
        5 => (beta2phi()?, cp()?),
        6 => (cp()?, beta2phi()?),
        7 => (cp()?, rho_pb()?),
        8 => (rho_pb()?, cp()?),
        9 => (beta2phi()?, rho_pb()?),
        10 => (rho_pb()?, beta2phi()?),
        other => {
            return Err(EstimateError::InvalidSpec(format!(
                "difference-cum-ratio member index {other} outside 1..=10"
            )))
        }
    })
}

/// Ratio constant `R_i = m₁Ȳ / (m₁P + m₂)` of difference-cum-ratio member `i`.
pub fn attr_ratio_constant(member: u8, summary: &PopulationSummary) -> Result<f64, EstimateError> {
    let (m1, m2) = attr_member_coefficients(member, summary)?;
    let p = need(summary.p, "p")?;
    let denom = m1 * p + m2;
    if denom == 0.0 {
        return Err(EstimateError::Undefined("m1*P + m2 = 0".into()));
    }
    Ok(m1 * summary.ybar / denom)
}
