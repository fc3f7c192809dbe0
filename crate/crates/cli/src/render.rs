//! Output rendering: aligned text tables for humans, CSV and JSON for
//! machines. CSV and JSON cells print floats in shortest round-trip form, so
//! re-parsing reproduces the in-memory values exactly; text tables round for
//! display.

use serde::Serialize;

use survest::montecarlo::{OracleReport, SimulationReport};
use survest::population::{DesignConstants, PopulationSummary};
use survest::tables::PaperTable;
use survest::theory::{mean_moments_rel, theory_mean, theory_variance, TheoryError};
use survest::montecarlo::EstimatorSpec;

use crate::config::{CliError, OutputFormat};

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn theory_err(e: TheoryError) -> CliError {
    match e {
        TheoryError::MissingSummaryField(name) => {
            CliError::Config(format!("missing scalar `{name}` for the requested estimator"))
        }
        other => CliError::Runtime(other.to_string()),
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(runtime)
}

/// Round-trip-exact float cell for CSV.
fn cell(v: f64) -> String {
    format!("{v}")
}

fn cell_opt(v: Option<f64>) -> String {
    v.map(cell).unwrap_or_default()
}

/// Display-rounded float for text tables.
fn disp(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-4..1e7).contains(&a) {
        let s = format!("{v:.5}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s.is_empty() || s == "-" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{v:.5e}")
    }
}

fn disp_opt(v: Option<f64>) -> String {
    v.map(disp).unwrap_or_else(|| "unset".into())
}

fn text_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let fmt_row = |cells: &[String]| -> String {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:<width$}", c, width = widths[i]))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    out.push_str(&fmt_row(
        &headers.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
    ));
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for row in rows {
        out.push_str(&fmt_row(row));
        out.push('\n');
    }
    out
}

fn csv_table(headers: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(headers).map_err(runtime)?;
    for row in rows {
        writer.write_record(row).map_err(runtime)?;
    }
    let bytes = writer.into_inner().map_err(|e| runtime(e.to_string()))?;
    String::from_utf8(bytes).map_err(runtime)
}

// ── summarize ──────────────────────────────────────────────────────────────

pub fn render_summary(
    summary: &PopulationSummary,
    format: OutputFormat,
) -> Result<String, CliError> {
    if format == OutputFormat::Json {
        return json(summary);
    }
    let entries: Vec<(&str, &str, String, String)> = vec![
        ("N", "n_units", format!("{}", summary.n_units), cell(summary.n_units as f64)),
        ("Ȳ", "ybar", disp(summary.ybar), cell(summary.ybar)),
        ("X̄", "xbar", disp_opt(summary.xbar), cell_opt(summary.xbar)),
        ("P", "p", disp_opt(summary.p), cell_opt(summary.p)),
        ("S_y²", "sy2", disp_opt(summary.sy2), cell_opt(summary.sy2)),
        ("S_x²", "sx2", disp_opt(summary.sx2), cell_opt(summary.sx2)),
        ("S_φ²", "sphi2", disp_opt(summary.sphi2), cell_opt(summary.sphi2)),
        ("S_yx", "syx", disp_opt(summary.syx), cell_opt(summary.syx)),
        ("S_yφ", "syphi", disp_opt(summary.syphi), cell_opt(summary.syphi)),
        ("C_y", "cy", disp_opt(summary.cy), cell_opt(summary.cy)),
        ("C_x", "cx", disp_opt(summary.cx), cell_opt(summary.cx)),
        ("C_p", "cp", disp_opt(summary.cp), cell_opt(summary.cp)),
        ("ρ", "rho", disp_opt(summary.rho), cell_opt(summary.rho)),
        ("ρ_pb", "rho_pb", disp_opt(summary.rho_pb), cell_opt(summary.rho_pb)),
        ("β₂(y)", "beta2y", disp_opt(summary.beta2y), cell_opt(summary.beta2y)),
        ("β₂(x)", "beta2x", disp_opt(summary.beta2x), cell_opt(summary.beta2x)),
        ("β₂(φ)", "beta2phi", disp_opt(summary.beta2phi), cell_opt(summary.beta2phi)),
        ("h", "h", disp_opt(summary.h), cell_opt(summary.h)),
        ("C", "c", disp_opt(summary.c), cell_opt(summary.c)),
        ("K", "k", disp_opt(summary.k), cell_opt(summary.k)),
        ("K_p", "kp", disp_opt(summary.kp), cell_opt(summary.kp)),
        ("B_φ", "bphi", disp_opt(summary.bphi), cell_opt(summary.bphi)),
    ];
    match format {
        OutputFormat::Table => {
            let rows: Vec<Vec<String>> = entries
                .iter()
                .map(|(symbol, key, shown, _)| {
                    vec![symbol.to_string(), key.to_string(), shown.clone()]
                })
                .collect();
            Ok(text_table(&["symbol", "field", "value"], &rows))
        }
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = entries
                .iter()
                .map(|(symbol, key, _, exact)| {
                    vec![key.to_string(), symbol.to_string(), exact.clone()]
                })
                .collect();
            csv_table(&["field", "symbol", "value"], &rows)
        }
        OutputFormat::Json => unreachable!(),
    }
}

// ── theory ─────────────────────────────────────────────────────────────────

pub fn render_paper_table(table: &PaperTable, format: OutputFormat) -> Result<String, CliError> {
    if format == OutputFormat::Json {
        return json(table);
    }
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            let marker = if r.flagged { "KNOWN-DISCREPANCY" } else { "" };
            let (printed, delta) = match format {
                OutputFormat::Table => (
                    disp_opt(r.printed),
                    r.rel_delta
                        .map(|d| format!("{:+.3}%", d * 100.0))
                        .unwrap_or_default(),
                ),
                _ => (cell_opt(r.printed), cell_opt(r.rel_delta)),
            };
            let computed = match format {
                OutputFormat::Table => disp(r.computed),
                _ => cell(r.computed),
            };
            vec![
                r.population.to_string(),
                r.label.to_string(),
                printed,
                computed,
                delta,
                marker.to_string(),
                r.note.unwrap_or("").to_string(),
            ]
        })
        .collect();
    let headers = [
        "population",
        "estimator",
        "printed",
        "computed",
        "delta",
        "marker",
        "note",
    ];
    match format {
        OutputFormat::Table => {
            let mut out = format!("{} — {}\n", table.id, table.title);
            if let Some(d) = table.discrepancy {
                out.push_str(&format!("KNOWN DISCREPANCY: {d}\n"));
            }
            out.push_str(&text_table(&headers, &rows));
            Ok(out)
        }
        OutputFormat::Csv => csv_table(&headers, &rows),
        OutputFormat::Json => unreachable!(),
    }
}

#[derive(Serialize)]
struct TheoryRow {
    estimator: String,
    bias: Option<f64>,
    mse: f64,
    pre_vs_baseline: f64,
}

pub fn render_theory_rows(
    summary: &PopulationSummary,
    design: &DesignConstants,
    specs: &[EstimatorSpec],
    format: OutputFormat,
) -> Result<String, CliError> {
    let mut rows = Vec::new();
    for spec in specs {
        let (moments, base_mse) = match spec {
            EstimatorSpec::Mean(m) => {
                let moments = theory_mean(m, summary, design).map_err(theory_err)?;
                let base = mean_moments_rel(
                    &survest::mean::MeanEstimatorSpec::MeanPerUnit,
                    summary,
                    design,
                )
                .map_err(theory_err)?
                .1 * summary.ybar
                    * summary.ybar;
                (moments, base)
            }
            EstimatorSpec::Variance(v) => {
                let moments = theory_variance(v, summary, design).map_err(theory_err)?;
                let base = theory_variance(
                    &survest::variance::VarianceEstimatorSpec::SampleVariance,
                    summary,
                    design,
                )
                .map_err(theory_err)?
                .mse;
                (moments, base)
            }
        };
        let pre = survest::theory::pre(base_mse, moments.mse).map_err(theory_err)?;
        rows.push(TheoryRow {
            estimator: spec.to_string(),
            bias: moments.bias,
            mse: moments.mse,
            pre_vs_baseline: pre,
        });
    }
    match format {
        OutputFormat::Json => json(&rows),
        OutputFormat::Table => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.estimator.clone(),
                        disp_opt(r.bias),
                        disp(r.mse),
                        disp(r.pre_vs_baseline),
                    ]
                })
                .collect();
            Ok(text_table(&["estimator", "bias", "mse", "pre"], &cells))
        }
        OutputFormat::Csv => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.estimator.clone(),
                        cell_opt(r.bias),
                        cell(r.mse),
                        cell(r.pre_vs_baseline),
                    ]
                })
                .collect();
            csv_table(&["estimator", "bias", "mse", "pre"], &cells)
        }
    }
}

// ── simulate ───────────────────────────────────────────────────────────────

#[derive(Serialize)]
struct SimulationEnvelope<'a> {
    tolerance_rel: f64,
    report: &'a SimulationReport,
    verdicts: Vec<Verdict>,
}

#[derive(Serialize)]
struct Verdict {
    estimator: String,
    pass: bool,
}

pub fn render_simulation(
    report: &SimulationReport,
    tolerance_rel: f64,
    format: OutputFormat,
) -> Result<String, CliError> {
    let verdicts: Vec<Verdict> = report
        .estimators
        .iter()
        .map(|r| Verdict {
            estimator: r.estimator.clone(),
            pass: r.mse_rel_delta.abs() <= tolerance_rel,
        })
        .collect();
    if format == OutputFormat::Json {
        return json(&SimulationEnvelope {
            tolerance_rel,
            report,
            verdicts,
        });
    }
    let headers = [
        "estimator",
        "used",
        "undefined",
        "emp_mean",
        "emp_bias",
        "emp_mse",
        "se_mean",
        "se_mse",
        "pre_emp",
        "theory_bias",
        "theory_mse",
        "mse_rel_delta",
        "pass",
    ];
    let to_cells = |exact: bool| -> Vec<Vec<String>> {
        report
            .estimators
            .iter()
            .zip(&verdicts)
            .map(|(r, v)| {
                let f = |x: f64| if exact { cell(x) } else { disp(x) };
                let fo = |x: Option<f64>| {
                    if exact {
                        cell_opt(x)
                    } else {
                        disp_opt(x)
                    }
                };
                vec![
                    r.estimator.clone(),
                    r.replications_used.to_string(),
                    r.undefined_draws.to_string(),
                    f(r.empirical_mean),
                    f(r.empirical_bias),
                    f(r.empirical_mse),
                    fo(r.se_mean),
                    fo(r.se_mse),
                    fo(r.pre_empirical),
                    fo(r.theory_bias),
                    f(r.theory_mse),
                    f(r.mse_rel_delta),
                    if v.pass { "pass" } else { "FAIL" }.to_string(),
                ]
            })
            .collect()
    };
    match format {
        OutputFormat::Table => {
            let mut out = format!(
                "seed={} replications={} population={} N={} n={}{}\n",
                report.master_seed,
                report.replications,
                report.population_fingerprint,
                report.design.n_population,
                report.design.n_sample,
                report
                    .design
                    .n_first_phase
                    .map(|np| format!(" n'={np}"))
                    .unwrap_or_default(),
            );
            out.push_str(&format!(
                "truth: Ybar={} Sy2={}\n",
                disp(report.truth_ybar),
                disp(report.truth_sy2)
            ));
            out.push_str(&text_table(&headers, &to_cells(false)));
            Ok(out)
        }
        OutputFormat::Csv => csv_table(&headers, &to_cells(true)),
        OutputFormat::Json => unreachable!(),
    }
}

// ── oracle ─────────────────────────────────────────────────────────────────

pub fn render_oracle(report: &OracleReport, format: OutputFormat) -> Result<String, CliError> {
    if format == OutputFormat::Json {
        return json(report);
    }
    let headers = [
        "estimator",
        "exact_expectation",
        "exact_bias",
        "exact_mse",
        "undefined_subsets",
    ];
    let to_cells = |exact: bool| -> Vec<Vec<String>> {
        report
            .estimators
            .iter()
            .map(|r| {
                let f = |x: f64| if exact { cell(x) } else { disp(x) };
                vec![
                    r.estimator.clone(),
                    f(r.exact_expectation),
                    f(r.exact_bias),
                    f(r.exact_mse),
                    r.undefined_subsets.to_string(),
                ]
            })
            .collect()
    };
    match format {
        OutputFormat::Table => {
            let mut out = format!(
                "N={} n={} subsets={} population={}\n",
                report.n_population,
                report.sample_size,
                report.n_subsets,
                report.population_fingerprint
            );
            out.push_str(&format!(
                "truth: Ybar={} Sy2={}\n",
                disp(report.truth_ybar),
                disp(report.truth_sy2)
            ));
            out.push_str(&text_table(&headers, &to_cells(false)));
            Ok(out)
        }
        OutputFormat::Csv => csv_table(&headers, &to_cells(true)),
        OutputFormat::Json => unreachable!(),
    }
}
