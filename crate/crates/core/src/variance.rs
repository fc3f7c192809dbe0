//! Population-variance estimators built on a known auxiliary variance
//! `S_x²` and kurtosis `β₂(x)`.
//!
//! Covers the Isaki ratio `s_y²·S_x²/s_x²`, the Upadhyaya–Singh
//! kurtosis-shifted ratio, the Kadilar–Cingi shifted members, the general
//! one-parameter family
//! `t = s_y²(aS_x²−b)/[α(as_x²−b) + (1−α)(aS_x²−b)]`,
//! and the power classes `Σᵢ wᵢ·s_y²·r^i` (ratio) and `Σᵢ kᵢ·s_y²·r^{−i}`
//! (product) with `r = (S_x²+β₂(x))/(s_x²+β₂(x))`, together with the weight
//! triples that annihilate their first-order bias and the optimum `α`.

use serde::{Deserialize, Serialize};

use crate::error::EstimateError;
use crate::population::PopulationSummary;
use crate::sampling::SampleStats;

/// Known auxiliary-variable constants consumed by variance estimators.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VarianceKnown {
    pub sx2: Option<f64>,
    pub cx: Option<f64>,
    pub beta2x: Option<f64>,
}

impl VarianceKnown {
    pub fn from_summary(summary: &PopulationSummary) -> Self {
        Self {
            sx2: summary.sx2,
            cx: summary.cx,
            beta2x: summary.beta2x,
        }
    }
}

/// Shifted members of the general family, each `α = 1` with a published
/// `(a, b)` build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KcMember {
    /// `a = 1, b = C_x`.
    T2,
    /// `a = 1, b = β₂(x)`.
    T3,
    /// `a = β₂(x), b = C_x`.
    T4,
    /// `a = C_x, b = β₂(x)`.
    T5,
}

impl KcMember {
    pub fn coefficients(self, known: &VarianceKnown) -> Result<(f64, f64), EstimateError> {
        let cx = known.cx.ok_or(EstimateError::MissingKnownParam("cx"))?;
        let beta2x = known
            .beta2x
            .ok_or(EstimateError::MissingKnownParam("beta2x"))?;
        Ok(match self {
            KcMember::T2 => (1.0, cx),
            KcMember::T3 => (1.0, beta2x),
            KcMember::T4 => (beta2x, cx),
            KcMember::T5 => (cx, beta2x),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            KcMember::T2 => "t2",
            KcMember::T3 => "t3",
            KcMember::T4 => "t4",
            KcMember::T5 => "t5",
        }
    }
}

/// A population-variance estimator and its constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum VarianceEstimatorSpec {
    /// `s_y²`.
    SampleVariance,
    /// `s_y²·S_x²/s_x²`.
    IsakiRatio,
    /// `s_y²·(S_x²+β₂(x))/(s_x²+β₂(x))`.
    UpadhyayaSingh,
    /// Shifted ratio members at `α = 1`.
    KadilarCingiMember { member: KcMember },
    /// `s_y²(aS_x²−b)/[α(as_x²−b) + (1−α)(aS_x²−b)]`.
    GeneralFamily { a: f64, b: f64, alpha: f64 },
    /// `Σᵢ wᵢ·s_y²·r^i`, `Σwᵢ = 1`.
    RatioTypeClass { w1: f64, w2: f64, w3: f64 },
    /// `Σᵢ kᵢ·s_y²·r^{−i}`, `Σkᵢ = 1`.
    ProductTypeClass { k1: f64, k2: f64, k3: f64 },
}

impl VarianceEstimatorSpec {
    pub fn validate(&self) -> Result<(), EstimateError> {
        match self {
            VarianceEstimatorSpec::GeneralFamily { a, .. } => {
                if *a == 0.0 {
                    return Err(EstimateError::InvalidSpec("a must be nonzero".into()));
                }
            }
            VarianceEstimatorSpec::RatioTypeClass { w1, w2, w3 } => {
                let sum = w1 + w2 + w3;
                let scale = w1.abs().max(w2.abs()).max(w3.abs()).max(1.0);
                if (sum - 1.0).abs() > 1e-9 * scale {
                    return Err(EstimateError::InvalidSpec(format!(
                        "weights must sum to 1 (got {sum})"
                    )));
                }
            }
            VarianceEstimatorSpec::ProductTypeClass { k1, k2, k3 } => {
                let sum = k1 + k2 + k3;
                let scale = k1.abs().max(k2.abs()).max(k3.abs()).max(1.0);
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

impl std::fmt::Display for VarianceEstimatorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use VarianceEstimatorSpec::*;
        match self {
            SampleVariance => write!(f, "sample-variance"),
            IsakiRatio => write!(f, "isaki-ratio"),
            UpadhyayaSingh => write!(f, "upadhyaya-singh"),
            KadilarCingiMember { member } => {
                write!(f, "kadilar-cingi{{member={}}}", member.name())
            }
            GeneralFamily { a, b, alpha } => {
                write!(f, "general-family{{a={a},b={b},alpha={alpha}}}")
            }
            RatioTypeClass { w1, w2, w3 } => {
                write!(f, "ratio-type-class{{w1={w1},w2={w2},w3={w3}}}")
            }
            ProductTypeClass { k1, k2, k3 } => {
                write!(f, "product-type-class{{k1={k1},k2={k2},k3={k3}}}")
            }
        }
    }
}

fn undef(reason: impl Into<String>) -> EstimateError {
    EstimateError::Undefined(reason.into())
}

/// Evaluates a variance estimator on sample statistics and known parameters.
pub fn estimate_variance(
    spec: &VarianceEstimatorSpec,
    stats: &SampleStats,
    known: &VarianceKnown,
) -> Result<f64, EstimateError> {
    use VarianceEstimatorSpec::*;
    spec.validate()?;
    let sy2 = stats.sy2;
    let need_sx2 = || {
        stats
            .sx2
            .ok_or(EstimateError::MissingStatistic("sx2"))
    };
    let need_cap_sx2 = || known.sx2.ok_or(EstimateError::MissingKnownParam("sx2"));
    let need_beta2x = || {
        known
            .beta2x
            .ok_or(EstimateError::MissingKnownParam("beta2x"))
    };
    match spec {
        SampleVariance => Ok(sy2),
        IsakiRatio => {
            let sx2 = need_sx2()?;
            if sx2 == 0.0 {
                return Err(undef("sample variance of x is 0"));
            }
            Ok(sy2 * need_cap_sx2()? / sx2)
        }
        UpadhyayaSingh => {
            let sx2 = need_sx2()?;
            let beta2x = need_beta2x()?;
            let denom = sx2 + beta2x;
            if denom == 0.0 {
                return Err(undef("s_x² + β₂(x) = 0"));
            }
            Ok(sy2 * (need_cap_sx2()? + beta2x) / denom)
        }
        KadilarCingiMember { member } => {
            let (a, b) = member.coefficients(known)?;
            general_family(sy2, need_sx2()?, need_cap_sx2()?, a, b, 1.0)
        }
        GeneralFamily { a, b, alpha } => {
            general_family(sy2, need_sx2()?, need_cap_sx2()?, *a, *b, *alpha)
        }
        RatioTypeClass { w1, w2, w3 } => {
            let r = kurtosis_ratio(need_cap_sx2()?, need_sx2()?, need_beta2x()?)?;
            Ok(sy2 * (w1 * r + w2 * r * r + w3 * r * r * r))
        }
        ProductTypeClass { k1, k2, k3 } => {
            let r = kurtosis_ratio(need_cap_sx2()?, need_sx2()?, need_beta2x()?)?;
            let q = 1.0 / r;
            Ok(sy2 * (k1 * q + k2 * q * q + k3 * q * q * q))
        }
    }
}

fn kurtosis_ratio(cap_sx2: f64, sx2: f64, beta2x: f64) -> Result<f64, EstimateError> {
    let denom = sx2 + beta2x;
    if denom == 0.0 {
        return Err(undef("s_x² + β₂(x) = 0"));
    }
    Ok((cap_sx2 + beta2x) / denom)
}

fn general_family(
    sy2: f64,
    sx2: f64,
    cap_sx2: f64,
    a: f64,
    b: f64,
    alpha: f64,
) -> Result<f64, EstimateError> {
    let known_term = a * cap_sx2 - b;
    let denom = alpha * (a * sx2 - b) + (1.0 - alpha) * known_term;
    if denom <= 0.0 {
        return Err(undef(format!("family denominator {denom} <= 0")));
    }
    Ok(sy2 * known_term / denom)
}

/// The expansion constant `θ` of the variance families, in either of its two
/// flavors: the kurtosis-shift `S_x²/(S_x² + β₂(x))` or the general-family
/// `aS_x²/(aS_x² − b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaVar {
    value: f64,
    flavor: ThetaFlavor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaFlavor {
    KurtosisShift,
    GeneralFamily,
}

impl ThetaVar {
    /// `θ = S_x²/(S_x² + β₂(x))`; lies in (0, 1) when `β₂(x) > 0`.
    pub fn kurtosis_shift(sx2: f64, beta2x: f64) -> Result<Self, EstimateError> {
        let denom = sx2 + beta2x;
        if denom == 0.0 {
            return Err(undef("S_x² + β₂(x) = 0"));
        }
        Ok(Self {
            value: sx2 / denom,
            flavor: ThetaFlavor::KurtosisShift,
        })
    }

    /// `θ = aS_x²/(aS_x² − b)`.
    pub fn general(a: f64, b: f64, sx2: f64) -> Result<Self, EstimateError> {
        if a == 0.0 {
            return Err(EstimateError::InvalidSpec("a must be nonzero".into()));
        }
        let denom = a * sx2 - b;
        if denom == 0.0 {
            return Err(undef("aS_x² − b = 0"));
        }
        Ok(Self {
            value: a * sx2 / denom,
            flavor: ThetaFlavor::GeneralFamily,
        })
    }

    /// Wraps a raw θ value (used by property tests and config files).
    pub fn from_value(value: f64, flavor: ThetaFlavor) -> Self {
        Self { value, flavor }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn flavor(&self) -> ThetaFlavor {
        self.flavor
    }
}

fn expect_flavor(theta: ThetaVar, flavor: ThetaFlavor) -> Result<f64, EstimateError> {
    if theta.flavor != flavor {
        return Err(EstimateError::InvalidSpec(format!(
            "theta flavor {:?} required, got {:?}",
            flavor, theta.flavor
        )));
    }
    if theta.value == 0.0 {
        return Err(undef("theta = 0"));
    }
    Ok(theta.value)
}

/// Weights `(w₁, w₂, w₃)` of the ratio-type power class that satisfy
/// `Σwᵢ = 1`, `Σ i·wᵢ = C/θ` and the bias-annihilation row
/// `(θ−C)w₁ + (3θ−2C)w₂ + (6θ−3C)w₃ = 0`.
pub fn ratio_class_weights(theta: ThetaVar, c: f64) -> Result<(f64, f64, f64), EstimateError> {
    let t = expect_flavor(theta, ThetaFlavor::KurtosisShift)?;
    let t2 = t * t;
    Ok((
        (3.0 * t2 - 3.0 * t * c + c * c) / t2,
        (-3.0 * t2 + 5.0 * t * c - 2.0 * c * c) / t2,
        (t2 - 2.0 * t * c + c * c) / t2,
    ))
}

/// Product-class analog: `Σkᵢ = 1` and `Σ i·kᵢ = −C/θ`.
pub fn product_class_weights(theta: ThetaVar, c: f64) -> Result<(f64, f64, f64), EstimateError> {
    let t = expect_flavor(theta, ThetaFlavor::KurtosisShift)?;
    let t2 = t * t;
    Ok((
        (3.0 * t2 + 2.0 * t * c + c * c) / t2,
        -(3.0 * t2 + 3.0 * t * c + 2.0 * c * c) / t2,
        (t2 + t * c + c * c) / t2,
    ))
}

/// Optimum mixing constant `α = C/θ` of the general variance family.
pub fn optimum_alpha_var(c: f64, theta: ThetaVar) -> Result<f64, EstimateError> {
    let t = expect_flavor(theta, ThetaFlavor::GeneralFamily)?;
    Ok(c / t)
}
