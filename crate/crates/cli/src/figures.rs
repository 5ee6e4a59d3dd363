//! Figure dataset generation and rendering.

use std::path::Path;

use clap::ValueEnum;

use crate::output::emit;
use crate::svg::{self, LineStyle, Panel, Series};
use crate::{CliError, CliResult, Format, OutputArgs};
use wva_core::experiments::{
    run_scenario, scenario_fig2, scenario_fig3, scenario_fig4, Fig4Axis, PointSource,
    ScenarioOutput, ScenarioSpec, SweepRow,
};
use wva_core::quantum::BsMode;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Which {
    /// Quantum shift vs imbalance, with the reconstructed settings
    Fig2,
    /// Prior/likelihood/posterior densities for growing imbalance
    Fig3,
    /// Shift vs imbalance at fixed amplitude
    Fig4a,
    /// Shift vs dark-port intensity at fixed imbalance
    Fig4b,
}

pub fn run(which: Which, format: Format, out: &OutputArgs) -> CliResult {
    let spec = match which {
        Which::Fig2 => scenario_fig2(),
        Which::Fig3 => scenario_fig3(),
        Which::Fig4a => scenario_fig4(Fig4Axis::VsDelta),
        Which::Fig4b => scenario_fig4(Fig4Axis::VsDarkportIntensity),
    };
    let result = run_scenario(&spec)?;
    let content = match format {
        Format::Csv => {
            if matches!(which, Which::Fig3) {
                result.densities_to_csv(out.precision)
            } else {
                result.rows_to_csv(out.precision)
            }
        }
        Format::Json => {
            let mut s = result.to_json();
            s.push('\n');
            s
        }
        Format::Svg => render_svg(which, &result),
        Format::Text => {
            return Err(CliError::Usage(
                "figures support csv, json, or svg output".to_string(),
            ))
        }
    };
    emit(out.out.as_deref(), &content)?;
    Ok(())
}

pub fn run_config(config: &Path, format: Format, out: &OutputArgs) -> CliResult {
    let spec = ScenarioSpec::from_toml_str(
        &std::fs::read_to_string(config)
            .map_err(|e| CliError::Usage(format!("cannot read {config:?}: {e}")))?,
    )?;
    let result = run_scenario(&spec)?;
    let content = match format {
        Format::Csv => {
            let mut s = result.rows_to_csv(out.precision);
            if !result.densities.is_empty() {
                s.push('\n');
                s.push_str(&result.densities_to_csv(out.precision));
            }
            s
        }
        Format::Json => {
            let mut s = result.to_json();
            s.push('\n');
            s
        }
        _ => {
            return Err(CliError::Usage(
                "scenario supports csv or json output".to_string(),
            ))
        }
    };
    emit(out.out.as_deref(), &content)?;
    Ok(())
}

fn curve(rows: &[&SweepRow], x: impl Fn(&SweepRow) -> f64, y: impl Fn(&SweepRow) -> Option<f64>) -> Vec<(f64, f64)> {
    rows.iter()
        .filter_map(|r| y(r).map(|v| (x(r), v)))
        .collect()
}

fn render_svg(which: Which, result: &ScenarioOutput) -> String {
    match which {
        Which::Fig2 => render_fig2(result),
        Which::Fig3 => render_fig3(result),
        Which::Fig4a => render_fig4(result, false),
        Which::Fig4b => render_fig4(result, true),
    }
}

fn render_fig2(result: &ScenarioOutput) -> String {
    let grid: Vec<&SweepRow> = result
        .rows
        .iter()
        .filter(|r| r.source == PointSource::Grid)
        .collect();
    let settings: Vec<&SweepRow> = result
        .rows
        .iter()
        .filter(|r| r.source == PointSource::Reconstructed)
        .collect();
    let panel = Panel {
        title: "Post-selected intensity shift vs imbalance".to_string(),
        x_label: "delta".to_string(),
        y_label: "D_I".to_string(),
        log_x: false,
        series: vec![
            Series {
                label: "weak-value prediction (1 + 1/delta)/2".to_string(),
                points: curve(&grid, |r| r.delta, |r| r.d_quantum),
                style: LineStyle::Dashed,
                color: 0,
            },
            Series {
                label: "reconstructed settings (theory value)".to_string(),
                points: curve(&settings, |r| r.delta, |r| r.d_quantum),
                style: LineStyle::Markers,
                color: 1,
            },
        ],
        vlines: vec![],
        hlines: vec![(0.5, "base shift 1/2".to_string())],
    };
    svg::render(&[panel])
}

fn render_fig3(result: &ScenarioOutput) -> String {
    let panels: Vec<Panel> = result
        .densities
        .iter()
        .map(|t| {
            let zip = |ys: &[f64]| -> Vec<(f64, f64)> {
                t.e1.iter().cloned().zip(ys.iter().cloned()).collect()
            };
            Panel {
                title: format!("Field densities, delta = {}", t.delta),
                x_label: "E1".to_string(),
                y_label: "density".to_string(),
                log_x: false,
                series: vec![
                    Series {
                        label: "prior P(E1)".to_string(),
                        points: zip(&t.prior),
                        style: LineStyle::Dashed,
                        color: 0,
                    },
                    Series {
                        label: "click likelihood (rescaled)".to_string(),
                        points: zip(&t.likelihood),
                        style: LineStyle::Dashed,
                        color: 2,
                    },
                    Series {
                        label: "posterior P(E1|click)".to_string(),
                        points: zip(&t.posterior),
                        style: LineStyle::Solid,
                        color: 1,
                    },
                    Series {
                        label: "shifted-Gaussian approximation".to_string(),
                        points: zip(&t.gaussian_approx),
                        style: LineStyle::Solid,
                        color: 3,
                    },
                ],
                vlines: vec![
                    (t.marker_prior_mean, "prior mean".to_string()),
                    (t.marker_posterior_mean, "posterior mean".to_string()),
                    (t.marker_likelihood_zero, "likelihood zero".to_string()),
                ],
                hlines: vec![],
            }
        })
        .collect();
    svg::render(&panels)
}

fn render_fig4(result: &ScenarioOutput, log_x: bool) -> String {
    // Solid stochastic curves per (group, mode = first-order), dashed
    // quantum reference, base-shift line from the exact-unitary delta = 1
    // rows where present.
    let first_order: Vec<&SweepRow> = result
        .rows
        .iter()
        .filter(|r| r.bs_mode == BsMode::FirstOrder)
        .collect();
    let x = |r: &SweepRow| {
        if log_x {
            r.darkport_intensity.unwrap_or(f64::NAN)
        } else {
            r.delta
        }
    };
    // Group curves by the quantity held fixed.
    let mut keys: Vec<String> = Vec::new();
    for r in &first_order {
        let key = if log_x {
            format!("delta = {}", r.delta)
        } else {
            format!("alpha = {:.3}", r.e0.unwrap_or(f64::NAN))
        };
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut series = Vec::new();
    for (i, key) in keys.iter().enumerate() {
        let rows: Vec<&SweepRow> = first_order
            .iter()
            .filter(|r| {
                let k = if log_x {
                    format!("delta = {}", r.delta)
                } else {
                    format!("alpha = {:.3}", r.e0.unwrap_or(f64::NAN))
                };
                k == *key
            })
            .cloned()
            .collect();
        series.push(Series {
            label: format!("stochastic optics, {key}"),
            points: curve(&rows, &x, |r| r.d_exact),
            style: LineStyle::Solid,
            color: i,
        });
        series.push(Series {
            label: format!("weak value, {key}"),
            points: curve(&rows, &x, |r| r.d_quantum),
            style: LineStyle::Dashed,
            color: i,
        });
    }
    let panel = Panel {
        title: if log_x {
            "Shift vs dark-port intensity".to_string()
        } else {
            "Shift vs imbalance".to_string()
        },
        x_label: if log_x {
            "delta^2 alpha^2".to_string()
        } else {
            "delta".to_string()
        },
        y_label: "D_I".to_string(),
        log_x,
        series,
        vlines: vec![],
        hlines: vec![(0.5, "delta = 1 base shift".to_string())],
    };
    svg::render(&[panel])
}
