//! First-order (`O(n⁻¹)`) bias and MSE formulas for every implemented
//! estimator, minimum-MSE expressions, percent relative efficiency, and
//! efficiency-condition predicates.
//!
//! Conventions:
//!
//! - Mean-estimator formulas are exact in the sampling fractions
//!   `f₁ = 1/n − 1/N`, `f₂ = 1/n′ − 1/N`, `f₃ = f₁ − f₂`. Variance-estimator
//!   formulas default to the large-`N` factor `λ = 1/n`
//!   ([`DesignConstants::with_fpc`] restores exact `f₁`).
//! - Results are in absolute units (`Ȳ`-scaled for means, `S_y⁴`-scaled for
//!   variances). The `*_mse_rel` helpers return the dimensionless factors,
//!   which is what PRE comparisons and published-table reproduction need when
//!   only coefficients of variation are available.
//! - Estimators whose first-order bias has no published closed form report
//!   `bias: None` rather than an approximation.
//!
//! Known slips in the published formulas are resolved as follows: the
//! difference-cum-ratio family MSE uses the squared ratio constant
//! `Rᵢ²S_φ²` (the `i = 1` case fixes the exponent); the general variance
//! family minimum MSE carries the `C²` factor,
//! `λS_y⁴[β₂(y)−1−{β₂(x)−1}C²]`, which its own efficiency comparison
//! requires; and the shifted-exponential efficiency condition is evaluated
//! as `K ≥ θᵢ/2`, the direction the MSE difference actually implies.

use serde::Serialize;
use thiserror::Error;

use crate::error::EstimateError;
use crate::mean::{theta_exp_family, ExpAuxMember, KnownParams, MeanEstimatorSpec};
use crate::population::{DesignConstants, PopulationSummary};
use crate::variance::VarianceEstimatorSpec;

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("summary field `{0}` is required but unset")]
    MissingSummaryField(&'static str),
    #[error("two-phase estimator requires a two-phase design")]
    PhaseMismatch,
    #[error("infeasible moment combination: {0}")]
    InfeasibleMoments(String),
    #[error("reference/candidate MSE must be positive for a PRE")]
    ZeroMse,
    #[error("invalid specification: {0}")]
    BadSpec(String),
}

impl From<EstimateError> for TheoryError {
    fn from(e: EstimateError) -> Self {
        match e {
            EstimateError::MissingKnownParam(name) | EstimateError::MissingStatistic(name) => {
                TheoryError::MissingSummaryField(name)
            }
            other => TheoryError::BadSpec(other.to_string()),
        }
    }
}

/// First-order bias and MSE of an estimator under a design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoryMoments {
    /// Absolute first-order bias; unset for families without a published
    /// bias expression.
    pub bias: Option<f64>,
    /// Absolute first-order MSE.
    pub mse: f64,
    /// Order marker of the approximation.
    pub approx_order: &'static str,
}

pub const APPROX_ORDER: &str = "O(n^-1)";

impl TheoryMoments {
    fn new(bias: Option<f64>, mse: f64) -> Self {
        Self {
            bias,
            mse,
            approx_order: APPROX_ORDER,
        }
    }
}

fn need(value: Option<f64>, name: &'static str) -> Result<f64, TheoryError> {
    value.ok_or(TheoryError::MissingSummaryField(name))
}

fn f3_of(design: &DesignConstants) -> Result<f64, TheoryError> {
    design.f3().ok_or(TheoryError::PhaseMismatch)
}

/// Relative first-order moments of a mean estimator: `(bias/Ȳ, MSE/Ȳ²)`.
pub fn mean_moments_rel(
    spec: &MeanEstimatorSpec,
    summary: &PopulationSummary,
    design: &DesignConstants,
) -> Result<(Option<f64>, f64), TheoryError> {
    use MeanEstimatorSpec::*;
    let f1 = design.f1();
    let cy = || need(summary.cy, "cy");
    let cp = || need(summary.cp, "cp");
    let cx = || need(summary.cx, "cx");
    let kp = || need(summary.kp, "kp");
    let k = || need(summary.k, "k");
    let rho = || need(summary.rho, "rho");
    let rho_pb = || need(summary.rho_pb, "rho_pb");
    if spec.is_two_phase() && !design.is_two_phase() {
        return Err(TheoryError::PhaseMismatch);
    }
    Ok(match spec {
        MeanPerUnit => {
            let cy = cy()?;
            (Some(0.0), f1 * cy * cy)
        }
        NaikGuptaRatio => {
            let (cy, cp, kp) = (cy()?, cp()?, kp()?);
            (None, f1 * (cy * cy + cp * cp * (1.0 - 2.0 * kp)))
        }
        NaikGuptaProduct => {
            let (cy, cp, kp) = (cy()?, cp()?, kp()?);
            (None, f1 * (cy * cy + cp * cp * (1.0 + 2.0 * kp)))
        }
        ClassicalRatioAux => {
            let (cy, cx, k) = (cy()?, cx()?, k()?);
            (None, f1 * (cy * cy + cx * cx * (1.0 - 2.0 * k)))
        }
        AttrDiffRatio { m1, m2, .. } => {
            let (cy, cp, rho_pb) = (cy()?, cp()?, rho_pb()?);
            let p = need(summary.p, "p")?;
            let denom = m1 * p + m2;
            if denom == 0.0 {
                return Err(TheoryError::BadSpec("m1*P + m2 = 0".into()));
            }
            // R²S_φ²/Ȳ² = m₁²P²C_p²/(m₁P+m₂)²
            let ratio_term = (m1 * p / denom).powi(2) * cp * cp;
            (
                None,
                f1 * (ratio_term + cy * cy * (1.0 - rho_pb * rho_pb)),
            )
        }
        ExpRatioAttr => {
            let (cy, cp, kp) = (cy()?, cp()?, kp()?);
            (
                Some(f1 * cp * cp / 2.0 * (0.25 - kp)),
                f1 * (cy * cy + cp * cp * (0.25 - kp)),
            )
        }
        ExpProductAttr => {
            let (cy, cp, kp) = (cy()?, cp()?, kp()?);
            (
                Some(f1 * cp * cp / 2.0 * (0.25 + kp)),
                f1 * (cy * cy + cp * cp * (0.25 + kp)),
            )
        }
        ExpCombinedAttr { alpha } => {
            let (cy, cp, rho_pb) = (cy()?, cp()?, rho_pb()?);
            let cross = rho_pb * cy * cp;
            (
                Some(f1 * (cp * cp / 8.0 + cross * (0.5 - alpha))),
                f1 * (cy * cy
                    + cp * cp * (0.25 + alpha * alpha - alpha)
                    + 2.0 * cross * (0.5 - alpha)),
            )
        }
        ExpRatioAux { a, b } => {
            let (cy, cx, rho) = (cy()?, cx()?, rho()?);
            let xbar = need(summary.xbar, "xbar")?;
            let theta = theta_exp_family(*a, *b, xbar)?;
            let cross = rho * cy * cx;
            (
                Some(f1 * (theta * theta * cx * cx + theta * cross)),
                f1 * (cy * cy + theta * theta * cx * cx - 2.0 * theta * cross),
            )
        }
        ExpMixedAux { member, alpha } => {
            let (cy, cx, rho) = (cy()?, cx()?, rho()?);
            let theta = member_theta(*member, summary)?;
            let g = alpha / 2.0 + theta - alpha * theta;
            let cross = rho * cy * cx;
            (None, f1 * (cy * cy + cx * cx * g * g - 2.0 * cross * g))
        }
        AlmostUnbiasedExp { h0: _, h1, h2 } => {
            let (cy, cx, k) = (cy()?, cx()?, k()?);
            let h = h1 - h2;
            (
                Some(f1 * cx * cx / 2.0 * ((h1 + h2) / 4.0 - k * h)),
                f1 * (cy * cy + cx * cx * h * (h / 4.0 - k)),
            )
        }
        ExpRatioAttr2P => {
            let (cy, cp, kp) = (cy()?, cp()?, kp()?);
            let f3 = f3_of(design)?;
            (
                Some(f3 * cp * cp / 4.0 * (1.0 - 2.0 * kp)),
                f1 * cy * cy + f3 * cp * cp / 4.0 * (1.0 - 4.0 * kp),
            )
        }
        ExpProductAttr2P => {
            let (cy, cp, kp) = (cy()?, cp()?, kp()?);
            let f3 = f3_of(design)?;
            (
                Some(f3 * cp * cp / 4.0 * (1.0 + 2.0 * kp)),
                f1 * cy * cy + f3 * cp * cp / 4.0 * (1.0 + 4.0 * kp),
            )
        }
        ExpCombinedAttr2P { alpha1 } => {
            let (cy, cp, kp) = (cy()?, cp()?, kp()?);
            let f3 = f3_of(design)?;
            let d = alpha1 - 0.5;
            (
                Some(f3 * cp * cp / 8.0 * (1.0 - 8.0 * kp * d)),
                f1 * cy * cy + f3 * cp * cp * d * (d - 2.0 * kp),
            )
        }
        ClassicalRatio2P => {
            let (cy, cp, kp) = (cy()?, cp()?, kp()?);
            let f3 = f3_of(design)?;
            (None, f1 * cy * cy + f3 * cp * cp * (1.0 - 2.0 * kp))
        }
        ClassicalProduct2P => {
            let (cy, cp, kp) = (cy()?, cp()?, kp()?);
            let f3 = f3_of(design)?;
            (None, f1 * cy * cy + f3 * cp * cp * (1.0 + 2.0 * kp))
        }
        ExpRatioAux2P => {
            let (cy, cx, rho) = (cy()?, cx()?, rho()?);
            let f3 = f3_of(design)?;
            let cross = rho * cy * cx;
            (
                Some(f3 * (cx * cx / 8.0 - cross / 2.0)),
                f1 * cy * cy + f3 * (cx * cx / 4.0 - cross),
            )
        }
        ExpProductAux2P => {
            let (cy, cx, rho) = (cy()?, cx()?, rho()?);
            let f3 = f3_of(design)?;
            let cross = rho * cy * cx;
            (
                Some(f3 * (cx * cx / 8.0 + cross / 2.0)),
                f1 * cy * cy + f3 * (cx * cx / 4.0 + cross),
            )
        }
        AlmostUnbiasedExp2P { w0: _, w1, w2 } => {
            let (cy, cx, k) = (cy()?, cx()?, k()?);
            let f3 = f3_of(design)?;
            let w = w1 - w2;
            let cross = need(summary.rho, "rho")? * cy * cx;
            (
                Some(f3 * ((w1 + w2) / 8.0 * cx * cx - w / 2.0 * cross)),
                f1 * cy * cy + f3 * w * cx * cx * (w / 4.0 - k),
            )
        }
    })
}

/// θ of a shifted-exponential member, resolved from summary parameters.
pub fn member_theta(member: ExpAuxMember, summary: &PopulationSummary) -> Result<f64, TheoryError> {
    let known = KnownParams::from_summary(summary);
    let (a, b) = member.coefficients(&known)?;
    let xbar = need(summary.xbar, "xbar")?;
    Ok(theta_exp_family(a, b, xbar)?)
}

/// First-order moments of a mean estimator in absolute units.
pub fn theory_mean(
    spec: &MeanEstimatorSpec,
    summary: &PopulationSummary,
    design: &DesignConstants,
) -> Result<TheoryMoments, TheoryError> {
    let (bias_rel, mse_rel) = mean_moments_rel(spec, summary, design)?;
    let ybar = summary.ybar;
    Ok(TheoryMoments::new(
        bias_rel.map(|b| b * ybar),
        mse_rel * ybar * ybar,
    ))
}

/// Relative first-order moments of a variance estimator:
/// `(bias/(factor·S_y²), MSE/(factor·S_y⁴))` with `factor = λ` or `f₁`.
pub fn variance_moments_rel(
    spec: &VarianceEstimatorSpec,
    summary: &PopulationSummary,
) -> Result<(Option<f64>, f64), TheoryError> {
    use VarianceEstimatorSpec::*;
    let beta2y = need(summary.beta2y, "beta2y")?;
    let by = beta2y - 1.0;
    let beta2x = || need(summary.beta2x, "beta2x");
    let c = || need(summary.c, "c");
    let cap_sx2 = || need(summary.sx2, "sx2");
    Ok(match spec {
        SampleVariance => (Some(0.0), by),
        IsakiRatio => {
            let (bx, c) = (beta2x()? - 1.0, c()?);
            (None, by + bx * (1.0 - 2.0 * c))
        }
        UpadhyayaSingh => {
            let (beta2x, c, sx2) = (beta2x()?, c()?, cap_sx2()?);
            let bx = beta2x - 1.0;
            let theta = sx2 / (sx2 + beta2x);
            (
                Some(bx * theta * (theta - c)),
                by + theta * bx * (theta - 2.0 * c),
            )
        }
        KadilarCingiMember { member } => {
            let known = crate::variance::VarianceKnown {
                sx2: summary.sx2,
                cx: summary.cx,
                beta2x: summary.beta2x,
            };
            let (a, b) = member.coefficients(&known)?;
            general_rel(by, beta2x()? - 1.0, c()?, cap_sx2()?, a, b, 1.0)?
        }
        GeneralFamily { a, b, alpha } => {
            general_rel(by, beta2x()? - 1.0, c()?, cap_sx2()?, *a, *b, *alpha)?
        }
        RatioTypeClass { w1, w2, w3 } => {
            let (beta2x, c, sx2) = (beta2x()?, c()?, cap_sx2()?);
            let bx = beta2x - 1.0;
            let theta = sx2 / (sx2 + beta2x);
            let r1 = w1 + 2.0 * w2 + 3.0 * w3;
            let bias = 0.5
                * bx
                * [*w1, *w2, *w3]
                    .iter()
                    .enumerate()
                    .map(|(idx, &w)| {
                        let i = (idx + 1) as f64;
                        i * w * theta * (theta * i - 2.0 * c + theta)
                    })
                    .sum::<f64>();
            (Some(bias), by + r1 * theta * bx * (theta * r1 - 2.0 * c))
        }
        ProductTypeClass { k1, k2, k3 } => {
            let (beta2x, c, sx2) = (beta2x()?, c()?, cap_sx2()?);
            let bx = beta2x - 1.0;
            let theta = sx2 / (sx2 + beta2x);
            let r2 = k1 + 2.0 * k2 + 3.0 * k3;
            let bias = 0.5
                * bx
                * [*k1, *k2, *k3]
                    .iter()
                    .enumerate()
                    .map(|(idx, &k)| {
                        let i = (idx + 1) as f64;
                        i * k * theta * (theta * i + 2.0 * c - theta)
                    })
                    .sum::<f64>();
            (Some(bias), by + r2 * theta * bx * (theta * r2 + 2.0 * c))
        }
    })
}

fn general_rel(
    by: f64,
    bx: f64,
    c: f64,
    cap_sx2: f64,
    a: f64,
    b: f64,
    alpha: f64,
) -> Result<(Option<f64>, f64), TheoryError> {
    if a == 0.0 {
        return Err(TheoryError::BadSpec("a must be nonzero".into()));
    }
    let denom = a * cap_sx2 - b;
    if denom == 0.0 {
        return Err(TheoryError::InfeasibleMoments("aS_x² − b = 0".into()));
    }
    let theta = a * cap_sx2 / denom;
    // MSE/(λS_y⁴) = β₂(y) − 1 − 2αθ(h−1) + α²θ²(β₂(x)−1), with h−1 = C(β₂(x)−1)
    let h1 = c * bx;
    Ok((
        None,
        by - 2.0 * alpha * theta * h1 + alpha * alpha * theta * theta * bx,
    ))
}

/// First-order moments of a variance estimator in absolute units.
pub fn theory_variance(
    spec: &VarianceEstimatorSpec,
    summary: &PopulationSummary,
    design: &DesignConstants,
) -> Result<TheoryMoments, TheoryError> {
    let (bias_rel, mse_rel) = variance_moments_rel(spec, summary)?;
    let sy2 = need(summary.sy2, "sy2")?;
    let factor = design.variance_factor();
    Ok(TheoryMoments::new(
        bias_rel.map(|b| b * factor * sy2),
        mse_rel * factor * sy2 * sy2,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinMsePhase {
    Single,
    TwoPhase,
}

/// Which auxiliary information the optimum estimator exploits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxKind {
    /// Continuous auxiliary variable, correlation `ρ`.
    Continuous,
    /// Binary attribute, point-biserial correlation `ρ_pb`.
    Attribute,
}

/// Minimum first-order MSE of the optimum mean estimators: the regression
/// bound `f₁Ȳ²C_y²(1−ρ²)` (single phase) or `Ȳ²C_y²(f₁ − f₃ρ²)` (two-phase).
pub fn min_mse_mean(
    summary: &PopulationSummary,
    design: &DesignConstants,
    phase: MinMsePhase,
    aux: AuxKind,
) -> Result<f64, TheoryError> {
    let cy = need(summary.cy, "cy")?;
    let rho = match aux {
        AuxKind::Continuous => need(summary.rho, "rho")?,
        AuxKind::Attribute => need(summary.rho_pb, "rho_pb")?,
    };
    let ybar2 = summary.ybar * summary.ybar;
    Ok(match phase {
        MinMsePhase::Single => design.f1() * ybar2 * cy * cy * (1.0 - rho * rho),
        MinMsePhase::TwoPhase => {
            let f3 = f3_of(design)?;
            ybar2 * cy * cy * (design.f1() - f3 * rho * rho)
        }
    })
}

/// `ρ₁ = (h−1)/√((β₂(x)−1)(β₂(y)−1))`, the correlation between `(y−Ȳ)²` and
/// `(x−X̄)²`.
pub fn rho1(summary: &PopulationSummary) -> Result<f64, TheoryError> {
    let h = need(summary.h, "h")?;
    let bx = need(summary.beta2x, "beta2x")? - 1.0;
    let by = need(summary.beta2y, "beta2y")? - 1.0;
    if bx <= 0.0 || by <= 0.0 {
        return Err(TheoryError::InfeasibleMoments(
            "kurtoses must exceed 1".into(),
        ));
    }
    Ok((h - 1.0) / (bx * by).sqrt())
}

/// Dimensionless minimum-MSE factor `(β₂(y)−1)(1−ρ₁²)` of the optimum
/// variance estimators.
pub fn min_mse_variance_rel(summary: &PopulationSummary) -> Result<f64, TheoryError> {
    let r1 = rho1(summary)?;
    if r1 * r1 > 1.0 + 1e-12 {
        return Err(TheoryError::InfeasibleMoments(format!(
            "rho1^2 = {} exceeds 1",
            r1 * r1
        )));
    }
    let by = need(summary.beta2y, "beta2y")? - 1.0;
    Ok(by * (1.0 - r1 * r1))
}

/// Minimum first-order MSE of the optimum variance estimators,
/// `factor·S_y⁴(β₂(y)−1)(1−ρ₁²)`.
pub fn min_mse_variance(
    summary: &PopulationSummary,
    design: &DesignConstants,
) -> Result<f64, TheoryError> {
    let sy2 = need(summary.sy2, "sy2")?;
    Ok(design.variance_factor() * sy2 * sy2 * min_mse_variance_rel(summary)?)
}

/// Percent relative efficiency `100·MSE(reference)/MSE(candidate)`.
pub fn pre(mse_reference: f64, mse_candidate: f64) -> Result<f64, TheoryError> {
    if mse_candidate <= 0.0 {
        return Err(TheoryError::ZeroMse);
    }
    Ok(100.0 * mse_reference / mse_candidate)
}

/// One evaluated efficiency predicate with both sides reported.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyReport {
    pub id: String,
    pub description: String,
    pub left: f64,
    pub right: f64,
    pub holds: bool,
}

/// Which family's efficiency conditions to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EfficiencyContext {
    /// Difference-cum-ratio members vs `ȳ` and vs the Naik–Gupta ratio.
    AttrRatioFamily,
    /// Single-phase attribute exponential combination vs its competitors
    /// (each difference is a nonnegative square).
    AttrExponential,
    /// Two-phase analog; needs `f₃` from the design.
    AttrExponentialTwoPhase(DesignConstants),
    /// Shifted-exponential members vs `ȳ`: `K ≥ θᵢ/2`.
    AuxExponential,
    /// General variance family at the optimum vs `s_y²` and vs its members.
    VarianceGeneral,
}

/// Evaluates the requested predicate set on a summary. Both sides of every
/// inequality are reported so a failed condition is as informative as a held
/// one.
pub fn efficiency_conditions(
    summary: &PopulationSummary,
    context: &EfficiencyContext,
) -> Result<Vec<EfficiencyReport>, TheoryError> {
    let mut out = Vec::new();
    match context {
        EfficiencyContext::AttrRatioFamily => {
            let rho_pb = need(summary.rho_pb, "rho_pb")?;
            let cy = need(summary.cy, "cy")?;
            let cp = need(summary.cp, "cp")?;
            let p = need(summary.p, "p")?;
            let kp = need(summary.kp, "kp")?;
            let ybar = summary.ybar;
            // S_φ²/S_y² = (C_p·P)²/(C_y·Ȳ)²
            let sphi2_over_sy2 = (cp * p / (cy * ybar)).powi(2);
            let r1 = crate::mean::attr_ratio_constant(1, summary)?;
            for member in 1..=10u8 {
                let ri = match crate::mean::attr_ratio_constant(member, summary) {
                    Ok(v) => v,
                    Err(EstimateError::MissingKnownParam(_)) => continue,
                    Err(e) => return Err(e.into()),
                };
                let right = sphi2_over_sy2 * ri * ri;
                out.push(EfficiencyReport {
                    id: format!("attr-ratio-vs-mean[{member}]"),
                    description: format!(
                        "member {member} beats the sample mean when rho_pb^2 > (S_phi^2/S_y^2)R{member}^2"
                    ),
                    left: rho_pb * rho_pb,
                    right,
                    holds: rho_pb * rho_pb > right,
                });
                let right_ng = sphi2_over_sy2 * (ri * ri - r1 * r1 + 2.0 * r1 * kp);
                out.push(EfficiencyReport {
                    id: format!("attr-ratio-vs-ng[{member}]"),
                    description: format!(
                        "member {member} beats the Naik-Gupta ratio when rho_pb^2 >= (S_phi^2/S_y^2)[R{member}^2 - R1^2 + 2R1*K_p]"
                    ),
                    left: rho_pb * rho_pb,
                    right: right_ng,
                    holds: rho_pb * rho_pb >= right_ng,
                });
            }
        }
        EfficiencyContext::AttrExponential => {
            let rho_pb = need(summary.rho_pb, "rho_pb")?;
            let cy = need(summary.cy, "cy")?;
            let cp = need(summary.cp, "cp")?;
            let entries: [(&str, &str, f64); 5] = [
                (
                    "attr-exp-opt-vs-mean",
                    "var(ybar) - minMSE = f1*Ybar^2 * rho_pb^2",
                    rho_pb * rho_pb,
                ),
                (
                    "attr-exp-opt-vs-ng-ratio",
                    "MSE(ng-ratio) - minMSE = f1*Ybar^2 * (C_p - rho_pb*C_y)^2",
                    (cp - rho_pb * cy).powi(2),
                ),
                (
                    "attr-exp-opt-vs-ng-product",
                    "MSE(ng-product) - minMSE = f1*Ybar^2 * (C_p + rho_pb*C_y)^2",
                    (cp + rho_pb * cy).powi(2),
                ),
                (
                    "attr-exp-opt-vs-exp-ratio",
                    "MSE(exp-ratio) - minMSE = f1*Ybar^2 * (C_p^2/2 - rho_pb*C_y)^2",
                    (cp * cp / 2.0 - rho_pb * cy).powi(2),
                ),
                (
                    "attr-exp-opt-vs-exp-product",
                    "MSE(exp-product) - minMSE = f1*Ybar^2 * (C_p^2/2 + rho_pb*C_y)^2",
                    (cp * cp / 2.0 + rho_pb * cy).powi(2),
                ),
            ];
            for (id, description, left) in entries {
                out.push(EfficiencyReport {
                    id: id.into(),
                    description: description.into(),
                    left,
                    right: 0.0,
                    holds: left >= 0.0,
                });
            }
        }
        EfficiencyContext::AttrExponentialTwoPhase(design) => {
            let rho_pb = need(summary.rho_pb, "rho_pb")?;
            let cy = need(summary.cy, "cy")?;
            let cp = need(summary.cp, "cp")?;
            let f3 = f3_of(design)?;
            let entries: [(&str, f64); 5] = [
                ("attr-exp2p-opt-vs-mean", f3 * rho_pb * rho_pb),
                (
                    "attr-exp2p-opt-vs-exp-ratio",
                    f3 * (cp / 2.0 - rho_pb * cy).powi(2),
                ),
                (
                    "attr-exp2p-opt-vs-exp-product",
                    f3 * (cp / 2.0 + rho_pb * cy).powi(2),
                ),
                (
                    "attr-exp2p-opt-vs-classical-ratio",
                    f3 * (cp - rho_pb * cy).powi(2),
                ),
                (
                    "attr-exp2p-opt-vs-classical-product",
                    f3 * (cp + rho_pb * cy).powi(2),
                ),
            ];
            for (id, left) in entries {
                out.push(EfficiencyReport {
                    id: id.into(),
                    description: "two-phase MSE difference (times Ybar^2) is a nonnegative square"
                        .into(),
                    left,
                    right: 0.0,
                    holds: left >= 0.0,
                });
            }
        }
        EfficiencyContext::AuxExponential => {
            let k = need(summary.k, "k")?;
            for member in ExpAuxMember::ALL.iter().skip(1) {
                let theta = member_theta(*member, summary)?;
                out.push(EfficiencyReport {
                    id: format!("aux-exp-vs-mean[{}]", member.index()),
                    description: format!(
                        "member {} beats the sample mean when K >= theta/2",
                        member.index()
                    ),
                    left: k,
                    right: theta / 2.0,
                    holds: k >= theta / 2.0,
                });
            }
        }
        EfficiencyContext::VarianceGeneral => {
            let bx = need(summary.beta2x, "beta2x")? - 1.0;
            let c = need(summary.c, "c")?;
            let sx2 = need(summary.sx2, "sx2")?;
            let beta2x = need(summary.beta2x, "beta2x")?;
            let cx = need(summary.cx, "cx")?;
            out.push(EfficiencyReport {
                id: "var-general-opt-vs-s2".into(),
                description: "var(s_y^2) - minMSE = lambda*S_y^4*(beta2x - 1)*C^2".into(),
                left: bx * c * c,
                right: 0.0,
                holds: bx * c * c > 0.0,
            });
            let thetas: [(&str, f64); 6] = [
                ("t1", 1.0),
                ("t2", sx2 / (sx2 - cx)),
                ("t3", sx2 / (sx2 - beta2x)),
                ("t4", sx2 * beta2x / (sx2 * beta2x - cx)),
                ("t5", sx2 * cx / (sx2 * cx - beta2x)),
                ("t6", sx2 / (sx2 + beta2x)),
            ];
            for (name, theta) in thetas {
                let left = bx * (theta - c) * (theta - c);
                out.push(EfficiencyReport {
                    id: format!("var-general-opt-vs-{name}"),
                    description: format!(
                        "MSE({name}) - minMSE = lambda*S_y^4*(beta2x - 1)*(theta - C)^2"
                    ),
                    left,
                    right: 0.0,
                    holds: left >= 0.0,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mean::{almost_unbiased_weights, optimum_alpha_attr};

    fn ch1_summary() -> PopulationSummary {
        let mut s = PopulationSummary::from_scalars(89, 3.36);
        s.p = Some(0.1236);
        s.rho_pb = Some(0.766);
        s.cy = Some(0.604);
        s.cp = Some(2.19);
        s.beta2phi = Some(6.23181);
        s.fill_derived();
        s
    }

    fn design_ch1() -> DesignConstants {
        DesignConstants::single(89, 23).unwrap()
    }

    fn pre_vs_mean(spec: &MeanEstimatorSpec, s: &PopulationSummary, d: &DesignConstants) -> f64 {
        let base = theory_mean(&MeanEstimatorSpec::MeanPerUnit, s, d).unwrap();
        let m = theory_mean(spec, s, d).unwrap();
        pre(base.mse, m.mse).unwrap()
    }

    #[test]
    fn naik_gupta_ratio_published_pre() {
        let s = ch1_summary();
        let d = design_ch1();
        let v = pre_vs_mean(&MeanEstimatorSpec::NaikGuptaRatio, &s, &d);
        assert!((v - 11.6).abs() <= 0.1, "PRE(t_NG) = {v}");
    }

    #[test]
    fn diff_ratio_member_one_published_pre() {
        let s = ch1_summary();
        let d = design_ch1();
        let v = pre_vs_mean(
            &MeanEstimatorSpec::AttrDiffRatio {
                m1: 1.0,
                m2: 0.0,
                pop_regression: false,
            },
            &s,
            &d,
        );
        assert!((v - 7.4).abs() <= 0.1, "PRE(t_1) = {v}");
    }

    #[test]
    fn single_phase_pre_is_invariant_to_n() {
        let s = ch1_summary();
        let mut values = Vec::new();
        for n in [10usize, 50, 200] {
            let d = DesignConstants::single(1000, n).unwrap();
            values.push(pre_vs_mean(&MeanEstimatorSpec::NaikGuptaRatio, &s, &d));
        }
        assert!((values[0] - values[1]).abs() < 1e-12 * values[0]);
        assert!((values[0] - values[2]).abs() < 1e-12 * values[0]);
    }

    #[test]
    fn combined_attr_at_optimum_hits_regression_bound() {
        let s = ch1_summary();
        let d = design_ch1();
        let alpha = optimum_alpha_attr(&s).unwrap();
        let m = theory_mean(&MeanEstimatorSpec::ExpCombinedAttr { alpha }, &s, &d).unwrap();
        let bound = min_mse_mean(&s, &d, MinMsePhase::Single, AuxKind::Attribute).unwrap();
        assert!((m.mse - bound).abs() < 1e-12 * bound);
        // published PRE of the optimum: 241.98
        let base = theory_mean(&MeanEstimatorSpec::MeanPerUnit, &s, &d).unwrap();
        let v = pre(base.mse, bound).unwrap();
        assert!((v - 241.98).abs() < 0.05, "PRE = {v}");
    }

    #[test]
    fn zero_correlation_collapses_bound_to_variance() {
        let mut s = ch1_summary();
        s.rho_pb = Some(0.0);
        s.kp = Some(0.0);
        let d = design_ch1();
        let bound = min_mse_mean(&s, &d, MinMsePhase::Single, AuxKind::Attribute).unwrap();
        let var = theory_mean(&MeanEstimatorSpec::MeanPerUnit, &s, &d).unwrap();
        assert!((bound - var.mse).abs() < 1e-15);
    }

    fn ch2_two_phase_pop1() -> (PopulationSummary, DesignConstants) {
        let mut s = PopulationSummary::from_scalars(89, 1.0);
        s.rho_pb = Some(0.408);
        s.cy = Some(0.69144);
        s.cp = Some(2.7005);
        s.fill_derived();
        (s, DesignConstants::two_phase(89, 45, 23).unwrap())
    }

    #[test]
    fn two_phase_published_pres() {
        let (s, d) = ch2_two_phase_pop1();
        let base = theory_mean(&MeanEstimatorSpec::MeanPerUnit, &s, &d).unwrap();
        let t6 = theory_mean(&MeanEstimatorSpec::ExpRatioAttr2P, &s, &d).unwrap();
        let v6 = pre(base.mse, t6.mse).unwrap();
        assert!((v6 - 40.59).abs() < 0.05, "PRE(t6) = {v6}");
        let bound = min_mse_mean(&s, &d, MinMsePhase::TwoPhase, AuxKind::Attribute).unwrap();
        let v8 = pre(base.mse, bound).unwrap();
        assert!((v8 - 112.32).abs() < 0.05, "PRE((t8)_0) = {v8}");
    }

    #[test]
    fn two_phase_combined_at_optimum_hits_bound() {
        let (s, d) = ch2_two_phase_pop1();
        let alpha1 = optimum_alpha_attr(&s).unwrap();
        let m = theory_mean(&MeanEstimatorSpec::ExpCombinedAttr2P { alpha1 }, &s, &d).unwrap();
        let bound = min_mse_mean(&s, &d, MinMsePhase::TwoPhase, AuxKind::Attribute).unwrap();
        assert!((m.mse - bound).abs() < 1e-12 * bound.abs());
    }

    #[test]
    fn almost_unbiased_at_optimum_hits_bound() {
        let mut s = PopulationSummary::from_scalars(1000, 20.0);
        s.rho = Some(0.887);
        s.cy = Some(1.4177);
        s.cx = Some(1.4045);
        // θ of the unshifted member is 1/2 regardless of the mean level
        s.xbar = Some(1.0);
        s.fill_derived();
        let d = DesignConstants::single(1000, 40).unwrap();
        let (h0, h1, h2) = almost_unbiased_weights(s.k.unwrap());
        let m = theory_mean(&MeanEstimatorSpec::AlmostUnbiasedExp { h0, h1, h2 }, &s, &d).unwrap();
        let bound = min_mse_mean(&s, &d, MinMsePhase::Single, AuxKind::Continuous).unwrap();
        assert!((m.mse - bound).abs() < 1e-10 * bound);
        // published optimum PREs: 272.75 for the ratio member, 468.97 at optimum
        let base = theory_mean(&MeanEstimatorSpec::MeanPerUnit, &s, &d).unwrap();
        let t1 = theory_mean(&MeanEstimatorSpec::ExpRatioAux { a: 1.0, b: 0.0 }, &s, &d).unwrap();
        let v1 = pre(base.mse, t1.mse).unwrap();
        assert!((v1 - 272.75).abs() / 272.75 < 5e-4, "PRE(t1) = {v1}");
        let vh = pre(base.mse, bound).unwrap();
        assert!((vh - 468.97).abs() / 468.97 < 5e-4, "PRE(t_h) = {vh}");
    }

    fn ch5_pop1() -> PopulationSummary {
        let mut s = PopulationSummary::from_scalars(1000, 1.0);
        s.sy2 = Some(1.0);
        s.beta2x = Some(38.8898);
        s.beta2y = Some(25.8969);
        s.h = Some(26.8142);
        s.sx2 = Some(1654.44);
        s.fill_derived();
        s
    }

    #[test]
    fn variance_published_pres() {
        let s = ch5_pop1();
        let base = variance_moments_rel(&VarianceEstimatorSpec::SampleVariance, &s)
            .unwrap()
            .1;
        let isaki = variance_moments_rel(&VarianceEstimatorSpec::IsakiRatio, &s)
            .unwrap()
            .1;
        let v1 = pre(base, isaki).unwrap();
        assert!((v1 - 223.14).abs() / 223.14 < 5e-3, "PRE(t1) = {v1}");
        let us = variance_moments_rel(&VarianceEstimatorSpec::UpadhyayaSingh, &s)
            .unwrap()
            .1;
        let v2 = pre(base, us).unwrap();
        assert!((v2 - 235.19).abs() / 235.19 < 1e-2, "PRE(t2) = {v2}");
        // direct evaluation of the optimum: 340.6, not the published 305.66
        let min = min_mse_variance_rel(&s).unwrap();
        let vopt = pre(base, min).unwrap();
        assert!((vopt - 340.6).abs() <= 0.5, "PRE(opt) = {vopt}");
    }

    #[test]
    fn h_equal_one_means_no_gain() {
        let mut s = ch5_pop1();
        s.h = Some(1.0);
        s.c = None;
        s.fill_derived();
        let base = variance_moments_rel(&VarianceEstimatorSpec::SampleVariance, &s)
            .unwrap()
            .1;
        let min = min_mse_variance_rel(&s).unwrap();
        assert!((min - base).abs() < 1e-12 * base);
    }

    #[test]
    fn general_family_back_solved_consistency() {
        // with C back-solved from PRE(t1) = 201.6564, the corrected optimum
        // formula reproduces the published 214.3942
        let mut s = PopulationSummary::from_scalars(106, 15.37);
        s.sy2 = Some(1.0);
        s.beta2x = Some(25.71);
        s.beta2y = Some(80.13);
        s.sx2 = Some(491.89 * 491.89);
        s.cx = Some(2.02);
        let by = 80.13 - 1.0;
        let bx = 25.71 - 1.0;
        let target = 201.6564f64;
        // PRE(t1) = 100·by/(by + bx(1 − 2C))  ⇒  C
        let c = (1.0 - (100.0 * by / target - by) / bx) / 2.0;
        s.h = Some(1.0 + c * bx);
        s.fill_derived();
        assert!((s.c.unwrap() - 1.3072).abs() < 1e-4);
        let base = variance_moments_rel(&VarianceEstimatorSpec::SampleVariance, &s)
            .unwrap()
            .1;
        let isaki = variance_moments_rel(&VarianceEstimatorSpec::IsakiRatio, &s)
            .unwrap()
            .1;
        assert!((pre(base, isaki).unwrap() - target).abs() < 1e-3);
        let min = min_mse_variance_rel(&s).unwrap();
        let vmin = pre(base, min).unwrap();
        assert!((vmin - 214.3942).abs() < 0.1, "PRE(min) = {vmin}");
    }

    #[test]
    fn general_family_zero_c_is_baseline() {
        let mut s = ch5_pop1();
        s.h = Some(1.0);
        s.c = None;
        s.fill_derived();
        let base = variance_moments_rel(&VarianceEstimatorSpec::SampleVariance, &s)
            .unwrap()
            .1;
        let opt_alpha = 0.0; // C/θ with C = 0
        let fam = variance_moments_rel(
            &VarianceEstimatorSpec::GeneralFamily {
                a: 1.0,
                b: 0.0,
                alpha: opt_alpha,
            },
            &s,
        )
        .unwrap()
        .1;
        assert_eq!(fam, base);
    }

    #[test]
    fn pre_basics() {
        assert_eq!(pre(3.0, 3.0).unwrap(), 100.0);
        assert_eq!(pre(2.0, 1.0).unwrap(), 200.0);
        assert_eq!(pre(1.0, 0.0), Err(TheoryError::ZeroMse));
    }

    #[test]
    fn attr_ratio_conditions_match_observed_inefficiency() {
        let s = ch1_summary();
        let reports = efficiency_conditions(&s, &EfficiencyContext::AttrRatioFamily).unwrap();
        let t1 = reports
            .iter()
            .find(|r| r.id == "attr-ratio-vs-mean[1]")
            .unwrap();
        // PRE(t1) = 7.36 < 100, so the condition must fail
        assert!(!t1.holds);
        assert!((t1.left - 0.587).abs() < 1e-3);
    }

    #[test]
    fn attr_exponential_conditions_are_squares() {
        let s = ch1_summary();
        let reports = efficiency_conditions(&s, &EfficiencyContext::AttrExponential).unwrap();
        assert_eq!(reports.len(), 5);
        assert!(reports.iter().all(|r| r.holds));
    }

    #[test]
    fn aux_exponential_condition_direction() {
        // Murthy data: K = 0.341, θ₂ = 0.494 → K > θ₂/2 = 0.247, holds
        let mut s = PopulationSummary::from_scalars(80, 5182.638);
        s.xbar = Some(283.875);
        s.rho = Some(0.9136);
        s.cy = Some(0.3520);
        s.cx = Some(0.9430);
        s.beta2x = Some(3.65);
        s.fill_derived();
        let reports = efficiency_conditions(&s, &EfficiencyContext::AuxExponential).unwrap();
        let r2 = reports
            .iter()
            .find(|r| r.id == "aux-exp-vs-mean[2]")
            .unwrap();
        assert!((r2.left - 0.341).abs() < 1e-3);
        assert!((r2.right - 0.247).abs() < 1e-3);
        assert!(r2.holds);
    }

    #[test]
    fn phase_mismatch_is_reported() {
        let s = ch1_summary();
        let d = design_ch1();
        let err = theory_mean(&MeanEstimatorSpec::ExpRatioAttr2P, &s, &d).unwrap_err();
        assert_eq!(err, TheoryError::PhaseMismatch);
    }

    #[test]
    fn missing_field_is_reported() {
        let s = PopulationSummary::from_scalars(50, 2.0);
        let d = DesignConstants::single(50, 10).unwrap();
        let err = theory_mean(&MeanEstimatorSpec::NaikGuptaRatio, &s, &d).unwrap_err();
        assert!(matches!(err, TheoryError::MissingSummaryField(_)));
    }
}
