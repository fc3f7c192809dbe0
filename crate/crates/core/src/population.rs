//! Finite populations and their summary parameters.
//!
//! A [`Population`] holds the study variable `y` together with an optional
//! continuous auxiliary variable `x` and an optional binary auxiliary
//! attribute `φ`. [`summarize`] computes every population-level constant the
//! theory formulas consume: means, `S²` variances (divisor `N − 1`), central
//! moments `μ_rs` (divisor `N`), coefficients of variation, the product-moment
//! and point-biserial correlations, kurtoses, and the derived ratios
//! `h = μ₂₂/(μ₂₀μ₀₂)`, `C = (h−1)/(β₂(x)−1)`, `K = ρ·C_y/C_x` and
//! `K_p = ρ_pb·C_y/C_p`.
//!
//! Fields whose inputs are absent or degenerate are left unset rather than
//! filled with NaN; downstream theory operations report a missing-field error
//! instead of propagating non-finite numbers.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PopulationError {
    #[error("population must contain at least 2 units (got {0})")]
    EmptyPopulation(usize),
    #[error("column `{column}` has {got} rows, expected {expected}")]
    LengthMismatch {
        column: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("attribute value at row {row} is {value}, must be 0 or 1")]
    AttributeNotBinary { row: usize, value: f64 },
    #[error("value at row {row}, column `{column}` is not finite")]
    NotFinite { row: usize, column: String },
    #[error("CSV parse error at row {row}, column `{column}`: {message}")]
    ParseError {
        row: usize,
        column: String,
        message: String,
    },
    #[error("column `{0}` not found in CSV header")]
    MissingColumn(String),
    #[error("auxiliary variable x is required but absent")]
    MissingAuxiliary,
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A finite population of `N ≥ 2` units.
///
/// All present columns have identical length and finite values; the attribute
/// column contains only 0/1 indicators. Instances are immutable after
/// construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    y: Vec<f64>,
    x: Option<Vec<f64>>,
    phi: Option<Vec<u8>>,
}

impl Population {
    pub fn new(
        y: Vec<f64>,
        x: Option<Vec<f64>>,
        phi: Option<Vec<f64>>,
    ) -> Result<Self, PopulationError> {
        let n = y.len();
        if n < 2 {
            return Err(PopulationError::EmptyPopulation(n));
        }
        for (row, &v) in y.iter().enumerate() {
            if !v.is_finite() {
                return Err(PopulationError::NotFinite {
                    row,
                    column: "y".into(),
                });
            }
        }
        if let Some(ref xs) = x {
            if xs.len() != n {
                return Err(PopulationError::LengthMismatch {
                    column: "x",
                    expected: n,
                    got: xs.len(),
                });
            }
            for (row, &v) in xs.iter().enumerate() {
                if !v.is_finite() {
                    return Err(PopulationError::NotFinite {
                        row,
                        column: "x".into(),
                    });
                }
            }
        }
        let phi = match phi {
            None => None,
            Some(ps) => {
                if ps.len() != n {
                    return Err(PopulationError::LengthMismatch {
                        column: "phi",
                        expected: n,
                        got: ps.len(),
                    });
                }
                let mut bits = Vec::with_capacity(n);
                for (row, &v) in ps.iter().enumerate() {
                    if v == 0.0 {
                        bits.push(0u8);
                    } else if v == 1.0 {
                        bits.push(1u8);
                    } else {
                        return Err(PopulationError::AttributeNotBinary { row, value: v });
                    }
                }
                Some(bits)
            }
        };
        Ok(Self { y, x, phi })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x(&self) -> Option<&[f64]> {
        self.x.as_deref()
    }

    pub fn phi(&self) -> Option<&[u8]> {
        self.phi.as_deref()
    }

    /// Short hex digest of the raw data, echoed in simulation reports so a
    /// report can be tied to the exact population it was produced from.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        for &v in &self.y {
            hasher.update(v.to_le_bytes());
        }
        if let Some(ref xs) = self.x {
            hasher.update([1u8]);
            for &v in xs {
                hasher.update(v.to_le_bytes());
            }
        }
        if let Some(ref ps) = self.phi {
            hasher.update([2u8]);
            hasher.update(ps);
        }
        let digest = hasher.finalize();
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Every population-level symbol consumed by the theory formulas.
///
/// `S²` fields use divisor `N − 1`; kurtoses and `h` are ratios of `μ_rs`
/// central moments (divisor `N`). Unset options mean the underlying column
/// was absent or the quantity is undefined (zero variance, zero mean).
///
/// A summary can also be assembled directly from published scalars via
/// struct update syntax on [`PopulationSummary::from_scalars`]; call
/// [`PopulationSummary::fill_derived`] afterwards to populate `K`, `K_p`,
/// `C` and friends from whatever base fields are present.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PopulationSummary {
    pub n_units: usize,
    pub ybar: f64,
    pub xbar: Option<f64>,
    /// Population proportion `P` of units possessing the attribute.
    pub p: Option<f64>,
    pub sy2: Option<f64>,
    pub sx2: Option<f64>,
    pub sphi2: Option<f64>,
    pub syx: Option<f64>,
    pub syphi: Option<f64>,
    pub cy: Option<f64>,
    pub cx: Option<f64>,
    pub cp: Option<f64>,
    /// Product-moment correlation `ρ` between `y` and `x`.
    pub rho: Option<f64>,
    /// Point-biserial correlation `ρ_pb` between `y` and `φ`.
    pub rho_pb: Option<f64>,
    pub beta2y: Option<f64>,
    pub beta2x: Option<f64>,
    pub beta2phi: Option<f64>,
    /// Standardized cross-moment `h = μ₂₂/(μ₂₀μ₀₂)`.
    pub h: Option<f64>,
    /// `C = (h − 1)/(β₂(x) − 1)`, the variance-estimation regression analog.
    pub c: Option<f64>,
    /// `K = ρ·C_y/C_x`.
    pub k: Option<f64>,
    /// `K_p = ρ_pb·C_y/C_p`.
    pub kp: Option<f64>,
    /// Population attribute regression coefficient `B_φ = S_yφ/S_φ²`.
    pub bphi: Option<f64>,
}

impl PopulationSummary {
    /// Starts a summary from published scalar parameters.
    pub fn from_scalars(n_units: usize, ybar: f64) -> Self {
        Self {
            n_units,
            ybar,
            ..Self::default()
        }
    }

    /// Fills derived ratios (`C_y`, `K`, `K_p`, `C`, `B_φ`, ...) from the base
    /// fields that are present, leaving already-set fields untouched.
    pub fn fill_derived(&mut self) {
        if self.cy.is_none() {
            if let Some(sy2) = self.sy2 {
                if self.ybar != 0.0 {
                    self.cy = Some(sy2.sqrt() / self.ybar.abs());
                }
            }
        }
        if self.cx.is_none() {
            if let (Some(sx2), Some(xbar)) = (self.sx2, self.xbar) {
                if xbar != 0.0 {
                    self.cx = Some(sx2.sqrt() / xbar.abs());
                }
            }
        }
        if self.cp.is_none() {
            if let (Some(sphi2), Some(p)) = (self.sphi2, self.p) {
                if p != 0.0 {
                    self.cp = Some(sphi2.sqrt() / p);
                }
            }
        }
        if self.rho.is_none() {
            if let (Some(syx), Some(sy2), Some(sx2)) = (self.syx, self.sy2, self.sx2) {
                if sy2 > 0.0 && sx2 > 0.0 {
                    self.rho = Some(syx / (sy2.sqrt() * sx2.sqrt()));
                }
            }
        }
        if self.rho_pb.is_none() {
            if let (Some(syphi), Some(sy2), Some(sphi2)) = (self.syphi, self.sy2, self.sphi2) {
                if sy2 > 0.0 && sphi2 > 0.0 {
                    self.rho_pb = Some(syphi / (sy2.sqrt() * sphi2.sqrt()));
                }
            }
        }
        if self.k.is_none() {
            if let (Some(rho), Some(cy), Some(cx)) = (self.rho, self.cy, self.cx) {
                if cx != 0.0 {
                    self.k = Some(rho * cy / cx);
                }
            }
        }
        if self.kp.is_none() {
            if let (Some(rho_pb), Some(cy), Some(cp)) = (self.rho_pb, self.cy, self.cp) {
                if cp != 0.0 {
                    self.kp = Some(rho_pb * cy / cp);
                }
            }
        }
        if self.c.is_none() {
            if let (Some(h), Some(beta2x)) = (self.h, self.beta2x) {
                if beta2x != 1.0 {
                    self.c = Some((h - 1.0) / (beta2x - 1.0));
                }
            }
        }
        if self.bphi.is_none() {
            if let (Some(syphi), Some(sphi2)) = (self.syphi, self.sphi2) {
                if sphi2 > 0.0 {
                    self.bphi = Some(syphi / sphi2);
                }
            }
        }
    }
}

/// Sampling-fraction constants for a single- or two-phase SRSWOR design.
///
/// `f₁ = 1/n − 1/N`, `f₂ = 1/n′ − 1/N`, `f₃ = 1/n − 1/n′ = f₁ − f₂` and
/// `λ = 1/n` (the fpc-ignored variant used by the variance-estimator
/// formulas unless [`DesignConstants::with_fpc`] opts back in).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignConstants {
    pub n_population: usize,
    pub n_sample: usize,
    pub n_first_phase: Option<usize>,
    /// When true (the default), variance-estimator theory uses `λ = 1/n`.
    pub ignore_fpc: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DesignError {
    #[error("sample size must satisfy 2 <= n <= N (n = {n}, N = {n_population})")]
    InvalidSampleSize { n: usize, n_population: usize },
    #[error("two-phase sizes must satisfy n < n' <= N (n = {n}, n' = {n_prime}, N = {n_population})")]
    InvalidPhaseSizes {
        n: usize,
        n_prime: usize,
        n_population: usize,
    },
}

impl DesignConstants {
    pub fn single(n_population: usize, n_sample: usize) -> Result<Self, DesignError> {
        if n_sample < 2 || n_sample > n_population {
            return Err(DesignError::InvalidSampleSize {
                n: n_sample,
                n_population,
            });
        }
        Ok(Self {
            n_population,
            n_sample,
            n_first_phase: None,
            ignore_fpc: true,
        })
    }

    pub fn two_phase(
        n_population: usize,
        n_first_phase: usize,
        n_sample: usize,
    ) -> Result<Self, DesignError> {
        if n_sample < 2 {
            return Err(DesignError::InvalidSampleSize {
                n: n_sample,
                n_population,
            });
        }
        if n_sample >= n_first_phase || n_first_phase > n_population {
            return Err(DesignError::InvalidPhaseSizes {
                n: n_sample,
                n_prime: n_first_phase,
                n_population,
            });
        }
        Ok(Self {
            n_population,
            n_sample,
            n_first_phase: Some(n_first_phase),
            ignore_fpc: true,
        })
    }

    /// Keeps the finite-population correction in variance-estimator theory.
    pub fn with_fpc(mut self) -> Self {
        self.ignore_fpc = false;
        self
    }

    pub fn is_two_phase(&self) -> bool {
        self.n_first_phase.is_some()
    }

    pub fn f1(&self) -> f64 {
        1.0 / self.n_sample as f64 - 1.0 / self.n_population as f64
    }

    pub fn f2(&self) -> Option<f64> {
        self.n_first_phase
            .map(|np| 1.0 / np as f64 - 1.0 / self.n_population as f64)
    }

    pub fn f3(&self) -> Option<f64> {
        self.n_first_phase
            .map(|np| 1.0 / self.n_sample as f64 - 1.0 / np as f64)
    }

    pub fn lambda(&self) -> f64 {
        1.0 / self.n_sample as f64
    }

    /// Leading factor for variance-estimator formulas: `λ` or exact `f₁`.
    pub fn variance_factor(&self) -> f64 {
        if self.ignore_fpc {
            self.lambda()
        } else {
            self.f1()
        }
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Central moment `μ_rs = (1/N) Σ (yᵢ − Ȳ)^r (xᵢ − X̄)^s`.
///
/// Divisor is `N`, unlike the `S²` fields of the summary. `s > 0` requires
/// the auxiliary variable to be present.
pub fn central_moment_rs(pop: &Population, r: u32, s: u32) -> Result<f64, PopulationError> {
    let n = pop.len() as f64;
    let ybar = mean(pop.y());
    let x = if s > 0 {
        Some(pop.x().ok_or(PopulationError::MissingAuxiliary)?)
    } else {
        None
    };
    let xbar = x.map(mean);
    let mut acc = 0.0;
    for i in 0..pop.len() {
        let dy = pop.y()[i] - ybar;
        let term = match (x, xbar) {
            (Some(xs), Some(xb)) => dy.powi(r as i32) * (xs[i] - xb).powi(s as i32),
            _ => dy.powi(r as i32),
        };
        acc += term;
    }
    Ok(acc / n)
}

fn sum_sq_dev(values: &[f64], center: f64) -> f64 {
    values.iter().map(|&v| (v - center) * (v - center)).sum()
}

/// Computes all population parameters from the raw data.
pub fn summarize(pop: &Population) -> Result<PopulationSummary, PopulationError> {
    let n = pop.len();
    if n < 2 {
        return Err(PopulationError::EmptyPopulation(n));
    }
    let nf = n as f64;
    let denom = nf - 1.0;
    let ybar = mean(pop.y());
    let sy2 = sum_sq_dev(pop.y(), ybar) / denom;

    let mut summary = PopulationSummary {
        n_units: n,
        ybar,
        sy2: Some(sy2),
        ..PopulationSummary::default()
    };
    // C_y = S_y/Ȳ; the zero-variance case gives C_y = 0, a zero mean leaves
    // the CV unset.
    if ybar != 0.0 {
        summary.cy = Some(sy2.sqrt() / ybar.abs());
    }
    let mu20 = sum_sq_dev(pop.y(), ybar) / nf;
    if mu20 > 0.0 {
        let mu40 = pop.y().iter().map(|&v| (v - ybar).powi(4)).sum::<f64>() / nf;
        summary.beta2y = Some(mu40 / (mu20 * mu20));
    }

    if let Some(xs) = pop.x() {
        let xbar = mean(xs);
        let sx2 = sum_sq_dev(xs, xbar) / denom;
        summary.xbar = Some(xbar);
        summary.sx2 = Some(sx2);
        if xbar != 0.0 {
            summary.cx = Some(sx2.sqrt() / xbar.abs());
        }
        let syx = pop
            .y()
            .iter()
            .zip(xs)
            .map(|(&yv, &xv)| (yv - ybar) * (xv - xbar))
            .sum::<f64>()
            / denom;
        summary.syx = Some(syx);
        let mu02 = sum_sq_dev(xs, xbar) / nf;
        if mu02 > 0.0 {
            let mu04 = xs.iter().map(|&v| (v - xbar).powi(4)).sum::<f64>() / nf;
            summary.beta2x = Some(mu04 / (mu02 * mu02));
            if mu20 > 0.0 {
                let mu22 = pop
                    .y()
                    .iter()
                    .zip(xs)
                    .map(|(&yv, &xv)| (yv - ybar).powi(2) * (xv - xbar).powi(2))
                    .sum::<f64>()
                    / nf;
                summary.h = Some(mu22 / (mu20 * mu02));
            }
        }
    }

    if let Some(ps) = pop.phi() {
        let p = ps.iter().map(|&b| b as f64).sum::<f64>() / nf;
        let sphi2 = ps
            .iter()
            .map(|&b| {
                let d = b as f64 - p;
                d * d
            })
            .sum::<f64>()
            / denom;
        summary.p = Some(p);
        summary.sphi2 = Some(sphi2);
        if p != 0.0 {
            summary.cp = Some(sphi2.sqrt() / p);
        }
        let syphi = pop
            .y()
            .iter()
            .zip(ps)
            .map(|(&yv, &b)| (yv - ybar) * (b as f64 - p))
            .sum::<f64>()
            / denom;
        summary.syphi = Some(syphi);
        let mu2 = sphi2 * denom / nf;
        if mu2 > 0.0 {
            let mu4 = ps
                .iter()
                .map(|&b| {
                    let d = b as f64 - p;
                    d.powi(4)
                })
                .sum::<f64>()
                / nf;
            summary.beta2phi = Some(mu4 / (mu2 * mu2));
        }
    }

    summary.fill_derived();
    Ok(summary)
}

/// Column-name selection for [`load_population_csv`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMap {
    pub y: String,
    pub x: Option<String>,
    pub phi: Option<String>,
}

impl ColumnMap {
    pub fn y_only(y: impl Into<String>) -> Self {
        Self {
            y: y.into(),
            x: None,
            phi: None,
        }
    }
}

/// Loads a population from a headered CSV file, rows kept in file order.
///
/// Numbers use a decimal point (no locale variants); the attribute column
/// must contain literal `0`/`1` values.
pub fn load_population_csv(
    path: impl AsRef<Path>,
    columns: &ColumnMap,
) -> Result<Population, PopulationError> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| PopulationError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e.to_string()),
    })?;
    let headers = reader
        .headers()
        .map_err(|e| PopulationError::ParseError {
            row: 0,
            column: "<header>".into(),
            message: e.to_string(),
        })?
        .clone();
    let col_index = |name: &str| -> Result<usize, PopulationError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| PopulationError::MissingColumn(name.to_string()))
    };
    let yi = col_index(&columns.y)?;
    let xi = columns.x.as_deref().map(col_index).transpose()?;
    let pi = columns.phi.as_deref().map(col_index).transpose()?;

    let mut y = Vec::new();
    let mut x = xi.map(|_| Vec::new());
    let mut phi = pi.map(|_| Vec::new());
    for (row_no, record) in reader.records().enumerate() {
        // row numbers are 1-based data rows, matching what a user sees below
        // the header line
        let row = row_no + 1;
        let record = record.map_err(|e| PopulationError::ParseError {
            row,
            column: "<record>".into(),
            message: e.to_string(),
        })?;
        let parse = |idx: usize, name: &str| -> Result<f64, PopulationError> {
            let raw = record.get(idx).ok_or_else(|| PopulationError::ParseError {
                row,
                column: name.to_string(),
                message: "missing field".into(),
            })?;
            raw.trim()
                .parse::<f64>()
                .map_err(|e| PopulationError::ParseError {
                    row,
                    column: name.to_string(),
                    message: e.to_string(),
                })
        };
        y.push(parse(yi, &columns.y)?);
        if let (Some(idx), Some(out)) = (xi, x.as_mut()) {
            out.push(parse(idx, columns.x.as_deref().unwrap())?);
        }
        if let (Some(idx), Some(out)) = (pi, phi.as_mut()) {
            let v = parse(idx, columns.phi.as_deref().unwrap())?;
            if v != 0.0 && v != 1.0 {
                return Err(PopulationError::AttributeNotBinary { row, value: v });
            }
            out.push(v);
        }
    }
    Population::new(y, x, phi)
}

/// Writes a population back out as CSV with columns `y[,x][,phi]`.
pub fn write_population_csv(
    pop: &Population,
    path: impl AsRef<Path>,
) -> Result<(), PopulationError> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| PopulationError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e.to_string()),
    })?;
    let mut header = vec!["y"];
    if pop.x().is_some() {
        header.push("x");
    }
    if pop.phi().is_some() {
        header.push("phi");
    }
    let io_err = |e: csv::Error| PopulationError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e.to_string()),
    };
    writer.write_record(&header).map_err(io_err)?;
    for i in 0..pop.len() {
        let mut record = vec![format!("{}", pop.y()[i])];
        if let Some(xs) = pop.x() {
            record.push(format!("{}", xs[i]));
        }
        if let Some(ps) = pop.phi() {
            record.push(format!("{}", ps[i]));
        }
        writer.write_record(&record).map_err(io_err)?;
    }
    writer.flush().map_err(|e| PopulationError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn summarize_four_point_population() {
        let pop = Population::new(vec![1.0, 2.0, 3.0, 4.0], None, None).unwrap();
        let s = summarize(&pop).unwrap();
        assert_eq!(s.ybar, 2.5);
        assert!(close(s.sy2.unwrap(), 5.0 / 3.0, 1e-15));
        assert!(s.xbar.is_none());
        assert!(s.p.is_none());
    }

    #[test]
    fn summarize_constant_y_has_zero_cv() {
        let pop = Population::new(vec![3.0; 5], None, None).unwrap();
        let s = summarize(&pop).unwrap();
        assert_eq!(s.sy2, Some(0.0));
        assert_eq!(s.cy, Some(0.0));
        assert!(s.beta2y.is_none());
    }

    #[test]
    fn summarize_attribute_proportion_and_variance() {
        let pop = Population::new(
            vec![1.0, 2.0, 3.0, 4.0],
            None,
            Some(vec![1.0, 1.0, 0.0, 0.0]),
        )
        .unwrap();
        let s = summarize(&pop).unwrap();
        assert_eq!(s.p, Some(0.5));
        assert!(close(s.sphi2.unwrap(), 1.0 / 3.0, 1e-15));
    }

    #[test]
    fn attribute_variance_matches_np_closed_form() {
        // S_φ² = N·P(1−P)/(N−1) exactly for 0/1 data.
        let phi: Vec<f64> = (0..13).map(|i| if i < 5 { 1.0 } else { 0.0 }).collect();
        let y: Vec<f64> = (0..13).map(|i| i as f64).collect();
        let pop = Population::new(y, None, Some(phi)).unwrap();
        let s = summarize(&pop).unwrap();
        let p = 5.0 / 13.0;
        let expect = 13.0 * p * (1.0 - p) / 12.0;
        assert!((s.sphi2.unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn central_moments_basics() {
        let pop = Population::new(vec![1.0, 2.0, 3.0, 4.0], None, None).unwrap();
        assert_eq!(central_moment_rs(&pop, 0, 0).unwrap(), 1.0);
        assert!(central_moment_rs(&pop, 1, 0).unwrap().abs() < 1e-15);
        assert!((central_moment_rs(&pop, 2, 0).unwrap() - 1.25).abs() < 1e-15);
        assert!(matches!(
            central_moment_rs(&pop, 0, 2),
            Err(PopulationError::MissingAuxiliary)
        ));
    }

    #[test]
    fn mu20_relates_to_sy2() {
        let pop = Population::new(vec![2.0, 7.0, 1.0, 9.0, 4.0], None, None).unwrap();
        let s = summarize(&pop).unwrap();
        let mu20 = central_moment_rs(&pop, 2, 0).unwrap();
        let n = pop.len() as f64;
        assert!((mu20 * n / (n - 1.0) - s.sy2.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn scale_covariance_of_summary() {
        let y = vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
        let x = vec![2.0, 7.0, 1.0, 8.0, 2.0, 8.0, 1.0, 8.0];
        let phi = vec![1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0];
        let pop = Population::new(y.clone(), Some(x.clone()), Some(phi.clone())).unwrap();
        let scaled = Population::new(
            y.iter().map(|v| v * 3.5).collect(),
            Some(x),
            Some(phi),
        )
        .unwrap();
        let a = summarize(&pop).unwrap();
        let b = summarize(&scaled).unwrap();
        assert!(close(b.ybar, 3.5 * a.ybar, 1e-10));
        assert!(close(b.sy2.unwrap(), 3.5 * 3.5 * a.sy2.unwrap(), 1e-10));
        assert!(close(b.cy.unwrap(), a.cy.unwrap(), 1e-10));
        assert!(close(b.rho.unwrap(), a.rho.unwrap(), 1e-10));
        assert!(close(b.rho_pb.unwrap(), a.rho_pb.unwrap(), 1e-10));
        assert!(close(b.beta2y.unwrap(), a.beta2y.unwrap(), 1e-10));
    }

    #[test]
    fn rejects_non_binary_attribute() {
        let err = Population::new(vec![1.0, 2.0, 3.0], None, Some(vec![0.0, 1.0, 2.0]))
            .unwrap_err();
        assert!(matches!(
            err,
            PopulationError::AttributeNotBinary { row: 2, value } if value == 2.0
        ));
    }

    #[test]
    fn csv_round_trip_preserves_summary() {
        let dir = std::env::temp_dir().join(format!("survest-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("pop.csv");
        let pop = Population::new(
            vec![1.5, 2.25, 3.125, 4.0625, 0.1],
            Some(vec![2.0, 4.0, 6.0, 8.0, 1.0]),
            Some(vec![1.0, 0.0, 1.0, 0.0, 1.0]),
        )
        .unwrap();
        write_population_csv(&pop, &path).unwrap();
        let loaded = load_population_csv(
            &path,
            &ColumnMap {
                y: "y".into(),
                x: Some("x".into()),
                phi: Some("phi".into()),
            },
        )
        .unwrap();
        assert_eq!(pop, loaded);
        assert_eq!(summarize(&pop).unwrap(), summarize(&loaded).unwrap());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn csv_reports_bad_attribute_row() {
        let dir = std::env::temp_dir().join(format!("survest-test-phi-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.csv");
        std::fs::write(&path, "y,phi\n1.0,0\n2.0,1\n3.0,2\n4.0,0\n").unwrap();
        let err = load_population_csv(
            &path,
            &ColumnMap {
                y: "y".into(),
                x: None,
                phi: Some("phi".into()),
            },
        )
        .unwrap_err();
        assert!(matches!(
            err,
            PopulationError::AttributeNotBinary { row: 3, .. }
        ));
        std::fs::remove_dir_all(&dir).ok();
    }
}
