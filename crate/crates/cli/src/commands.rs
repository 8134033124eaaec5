use std::f64::consts::PI;

use clap::Args;
use macrocat::entanglement::{
    closed_form_witness, moments9, partial_transpose, standard_settings, witness_expectation, Settings, DEFAULT_EPS,
    DEFAULT_W,
};
use macrocat::linalg::min_eigenvalue;
use macrocat::nonclassicality::{region_scan, Axis, Certificate, Grid};
use macrocat::oracle;
use macrocat::ramsey::{
    conditional_state, outcome_probabilities, prepare_conditional, sampled_modular_expectation, BellVariant, Outcome,
    RamseySetting,
};
use macrocat::schema::{parse_state, AnyState, StateDescriptor};
use macrocat::states::{cat_state, decohere, entangled_cat, SingleModeState, TwoModeState};
use macrocat::Error;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::output::{complex, csv, json};
use crate::{Common, Format};

/// Largest oracle discrepancy `--verify` accepts.
pub const VERIFY_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write {0}: {1}")]
    Io(String, std::io::Error),
}

impl CliError {
    /// 2 for bad input, 3 for numeric or consistency failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(..) => 2,
            CliError::Numeric(_) => 3,
            CliError::Core(e) => match e {
                Error::NonFinite(_)
                | Error::DegenerateNorm(_)
                | Error::InvalidWeights(_)
                | Error::InvalidParameter(_)
                | Error::Unsupported(_)
                | Error::EmptyGrid
                | Error::Descriptor(_)
                | Error::Json(_) => 2,
                _ => 3,
            },
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub struct Report {
    pub text: String,
    pub oracle_delta: Option<f64>,
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("'{s}' is not RE or RE,IM")),
    }
}

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    s.parse::<Grid>().map_err(|e| e.to_string())
}

fn parse_outcomes(s: &str) -> std::result::Result<(Outcome, Outcome), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("'{s}' is not O1,O2 (each + or -)"))?;
    Ok((a.parse().map_err(|e: Error| e.to_string())?, b.parse().map_err(|e: Error| e.to_string())?))
}

fn load(state: &str) -> Result<AnyState> {
    let d = parse_state(state)?;
    Ok(d.build()?)
}

fn load_single(state: &str) -> Result<SingleModeState> {
    Ok(load(state)?.single()?)
}

fn load_two(state: &str) -> Result<TwoModeState> {
    Ok(load(state)?.two()?)
}

fn format_or(common: &Common, default: Format, allowed: &[Format]) -> Result<Format> {
    let f = common.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::Usage(format!("--format {f:?} is not available for this subcommand").to_lowercase()))
    }
}

fn max_delta(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn table(header: &[&str], rows: &[Vec<f64>], format: Format) -> Result<String> {
    match format {
        Format::Csv => Ok(csv(header, rows)),
        Format::Json => {
            let objs: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    let map: serde_json::Map<String, serde_json::Value> =
                        header.iter().zip(r).map(|(k, v)| (k.to_string(), json!(v))).collect();
                    serde_json::Value::Object(map)
                })
                .collect();
            json(&serde_json::Value::Array(objs))
        }
    }
}

fn with_delta_column<'a>(header: &[&'a str], verify: bool) -> Vec<&'a str> {
    let mut h = header.to_vec();
    if verify {
        h.push("oracle_delta");
    }
    h
}

#[derive(Debug, Args)]
pub struct ChiArgs {
    /// State descriptor: JSON or shorthand such as `cat:2,0`.
    #[arg(long, allow_hyphen_values = true)]
    pub state: String,
    /// Displacement `RE[,IM]`; repeatable.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub alpha: Vec<Complex64>,
    /// `min:max:step[,min:max:step]` over Re alpha and Im alpha.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_grid)]
    pub grid: Option<Grid>,
    #[command(flatten)]
    pub common: Common,
}

pub fn chi(a: &ChiArgs) -> Result<Report> {
    let state = load_single(&a.state)?;
    let format = format_or(&a.common, Format::Csv, &[Format::Csv, Format::Json])?;
    let mut points = a.alpha.clone();
    if let Some(g) = &a.grid {
        let ys = g.axis2.unwrap_or(Axis::single(0.0)).values();
        for x in g.axis1.values() {
            points.extend(ys.iter().map(|&y| Complex64::new(x, y)));
        }
    }
    if points.is_empty() {
        return Err(CliError::Usage("chi needs --alpha or --grid".into()));
    }
    let rows: Vec<(Vec<f64>, f64)> = points
        .par_iter()
        .map(|&z| {
            let c = state.chi(z);
            let n = state.chi_normal(z);
            let mut row = vec![z.re, z.im, c.re, c.im, n.re, n.im];
            let mut delta = 0.0;
            if a.common.verify {
                delta = (oracle::chi(&state, z)? - c).norm();
                row.push(delta);
            }
            Ok((row, delta))
        })
        .collect::<Result<_>>()?;
    let header = with_delta_column(&["alpha_re", "alpha_im", "chi_re", "chi_im", "chiN_re", "chiN_im"], a.common.verify);
    let deltas = rows.iter().map(|r| r.1);
    let oracle_delta = a.common.verify.then(|| max_delta(deltas));
    let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r.0).collect();
    Ok(Report { text: table(&header, &rows, format)?, oracle_delta })
}

#[derive(Debug, Args)]
pub struct NcRegionArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub state: String,
    /// `min:max:step[,min:max:step]`. Axis 1 and 2 are Re/Im alpha for
    /// `nc1` and the two real test amplitudes for `nc2-det`/`nc2-eig`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_grid)]
    pub grid: Grid,
    /// `nc1`, `nc2-det` or `nc2-eig`.
    #[arg(long, default_value = "nc1", value_parser = |s: &str| s.parse::<Certificate>().map_err(|e| e.to_string()))]
    pub certificate: Certificate,
    /// Detection threshold (default 1e-10 for nc1, -0.01 otherwise).
    #[arg(long, allow_hyphen_values = true)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

fn oracle_chi_delta(state: &SingleModeState, points: &[Complex64]) -> Result<f64> {
    let mut d: f64 = 0.0;
    for &z in points {
        d = d.max((oracle::chi(state, z)? - state.chi(z)).norm());
    }
    Ok(d)
}

pub fn ncregion(a: &NcRegionArgs) -> Result<Report> {
    let state = load_single(&a.state)?;
    let format = format_or(&a.common, Format::Csv, &[Format::Csv, Format::Json])?;
    let scan = region_scan(&state, &a.grid, a.certificate, a.threshold)?;
    let (d1, d2) = a.grid.directions.unwrap_or(a.certificate.default_directions());
    let deltas: Option<Vec<f64>> = if a.common.verify {
        Some(
            scan.cells
                .par_iter()
                .map(|c| {
                    let (z1, z2) = (d1 * c.axis1, d2 * c.axis2);
                    let points = match a.certificate {
                        Certificate::Nc1 => vec![z1 + z2],
                        _ => vec![z1, z2, z1 - z2],
                    };
                    oracle_chi_delta(&state, &points)
                })
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };
    let text = match (format, &deltas) {
        (Format::Csv, None) => scan.to_csv(),
        (Format::Csv, Some(d)) => {
            let mut out = String::from("axis1,axis2,value,detected,oracle_delta\n");
            for (c, dv) in scan.cells.iter().zip(d) {
                out.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e},{},{:.16e}\n",
                    c.axis1, c.axis2, c.value, c.detected, dv
                ));
            }
            out
        }
        (Format::Json, _) => {
            let cells: Vec<serde_json::Value> = scan
                .cells
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let mut v = json!({"axis1": c.axis1, "axis2": c.axis2, "value": c.value, "detected": c.detected});
                    if let Some(d) = &deltas {
                        v["oracle_delta"] = json!(d[i]);
                    }
                    v
                })
                .collect();
            json(&json!({
                "certificate": scan.certificate.to_string(),
                "threshold": scan.threshold,
                "shape": [scan.shape.0, scan.shape.1],
                "detected": scan.detected_count(),
                "cells": cells,
            }))?
        }
    };
    Ok(Report { text, oracle_delta: deltas.map(max_delta) })
}

#[derive(Debug, Args)]
pub struct DecayArgs {
    /// State at gamma t = 0.
    #[arg(long, allow_hyphen_values = true)]
    pub state: String,
    /// Probe displacement `RE[,IM]`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub alpha: Complex64,
    /// Axis over gamma t, `min:max:step`.
    #[arg(long, value_parser = |s: &str| s.parse::<Axis>().map_err(|e| e.to_string()))]
    pub grid: Axis,
    /// Thermal occupation of the bath.
    #[arg(long, default_value_t = 0.0)]
    pub nth: f64,
    #[command(flatten)]
    pub common: Common,
}

pub fn decay(a: &DecayArgs) -> Result<Report> {
    let state = load_single(&a.state)?;
    let format = format_or(&a.common, Format::Csv, &[Format::Csv, Format::Json])?;
    let times = a.grid.values();
    if times.is_empty() {
        return Err(Error::EmptyGrid.into());
    }
    let rows: Vec<(Vec<f64>, f64)> = times
        .par_iter()
        .map(|&gt| {
            let s = decohere(&state, gt, a.nth)?;
            let value = s.chi_normal(a.alpha).norm();
            let mut row = vec![gt, value];
            let mut delta = 0.0;
            if a.common.verify {
                delta = (oracle::chi(&s, a.alpha)? - s.chi(a.alpha)).norm();
                row.push(delta);
            }
            Ok((row, delta))
        })
        .collect::<Result<_>>()?;
    for w in rows.windows(2) {
        if w[1].0[1] > w[0].0[1] * (1.0 + 1e-12) {
            log::warn!(
                "|chi_N| increases between gamma t = {} and {} ({} -> {})",
                w[0].0[0],
                w[1].0[0],
                w[0].0[1],
                w[1].0[1]
            );
        }
    }
    let oracle_delta = a.common.verify.then(|| max_delta(rows.iter().map(|r| r.1)));
    let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r.0).collect();
    let header = with_delta_column(&["gamma_t", "absChiN"], a.common.verify);
    Ok(Report { text: table(&header, &rows, format)?, oracle_delta })
}

fn moment_delta(state: &TwoModeState, s: &Settings, m: &DMatrix<Complex64>) -> Result<f64> {
    let g = oracle::moments(state, &s.mode1(), &s.mode2())?;
    Ok(max_delta((m - g).iter().map(|z| z.norm())))
}

#[derive(Debug, Args)]
pub struct PtMinArgs {
    /// `xi0_min:xi0_max:step[,eps_min:eps_max:step]`; eps defaults to pi/2.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Grid,
    /// Use the product of two cat states instead of the entangled cat.
    #[arg(long, conflicts_with = "state")]
    pub product: bool,
    /// Fixed two-mode state evaluated on every cell instead of the entangled cat.
    #[arg(long, allow_hyphen_values = true)]
    pub state: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

pub fn ptmin(a: &PtMinArgs) -> Result<Report> {
    let format = format_or(&a.common, Format::Csv, &[Format::Csv, Format::Json])?;
    let fixed = a.state.as_deref().map(load_two).transpose()?;
    let xs = a.grid.axis1.values();
    let es = a.grid.axis2.unwrap_or(Axis::single(DEFAULT_EPS)).values();
    if xs.is_empty() || es.is_empty() {
        return Err(Error::EmptyGrid.into());
    }
    let cells: Vec<(f64, f64)> = xs.iter().flat_map(|&x| es.iter().map(move |&e| (x, e))).collect();
    let rows: Vec<(Vec<f64>, f64)> = cells
        .par_iter()
        .map(|&(xi0, eps)| {
            let s = standard_settings(xi0, eps)?;
            let state = match &fixed {
                Some(st) => st.clone(),
                None if a.product => {
                    let cat = cat_state(Complex64::new(xi0, 0.0), 0.0)?;
                    TwoModeState::product(cat.clone(), cat)
                }
                None => entangled_cat(Complex64::new(xi0, 0.0), 1)?,
            };
            let m = moments9(&state, &s).entries;
            let lambda = min_eigenvalue(&partial_transpose(&m))?;
            let mut row = vec![xi0, eps, lambda];
            let mut delta = 0.0;
            if a.common.verify {
                delta = moment_delta(&state, &s, &m)?;
                row.push(delta);
            }
            Ok((row, delta))
        })
        .collect::<Result<_>>()?;
    let oracle_delta = a.common.verify.then(|| max_delta(rows.iter().map(|r| r.1)));
    let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r.0).collect();
    let header = with_delta_column(&["xi0", "eps", "lambda_min"], a.common.verify);
    Ok(Report { text: table(&header, &rows, format)?, oracle_delta })
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    /// Axis over xi0, `min:max:step`.
    #[arg(long, value_parser = |s: &str| s.parse::<Axis>().map_err(|e| e.to_string()))]
    pub grid: Axis,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
    #[arg(long, default_value_t = DEFAULT_W)]
    pub w: f64,
    /// Fixed two-mode state (for example a separable control) instead of the entangled cat.
    #[arg(long, allow_hyphen_values = true)]
    pub state: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

pub fn witness(a: &WitnessArgs) -> Result<Report> {
    let format = format_or(&a.common, Format::Csv, &[Format::Csv, Format::Json])?;
    let fixed = a.state.as_deref().map(load_two).transpose()?;
    let xs = a.grid.values();
    if xs.is_empty() {
        return Err(Error::EmptyGrid.into());
    }
    let rows: Vec<(Vec<f64>, f64)> = xs
        .par_iter()
        .map(|&xi0| {
            let w = closed_form_witness(xi0, a.eps, a.w)?;
            let state = match &fixed {
                Some(st) => st.clone(),
                None => entangled_cat(Complex64::new(xi0, 0.0), 1)?,
            };
            let value = witness_expectation(&state, &w)?;
            let mut row = vec![xi0, value];
            let mut delta = 0.0;
            if a.common.verify {
                let words: Vec<_> = w.terms.iter().map(|t| (t.coeff * t.phase, t.amp1, t.amp2)).collect();
                delta = (oracle::expval_words(&state, &words)? - value).norm();
                row.push(delta);
            }
            Ok((row, delta))
        })
        .collect::<Result<_>>()?;
    let oracle_delta = a.common.verify.then(|| max_delta(rows.iter().map(|r| r.1)));
    let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r.0).collect();
    let header = with_delta_column(&["xi0", "expectation"], a.common.verify);
    Ok(Report { text: table(&header, &rows, format)?, oracle_delta })
}

#[derive(Debug, Args)]
pub struct RamseyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub state: String,
    /// Total qubit phase.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub phi: f64,
    /// Conditional displacement `RE[,IM]`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub alpha: Complex64,
    /// Free-evolution angle `omega tau` (0 in the rotating frame).
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub free_angle: f64,
    /// Number of simulated shots; no sampling when absent.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

pub fn ramsey(a: &RamseyArgs) -> Result<Report> {
    let state = load_single(&a.state)?;
    format_or(&a.common, Format::Json, &[Format::Json])?;
    let s = RamseySetting::with_free_angle(a.phi, a.alpha, a.free_angle)?;
    let (p_plus, p_minus) = outcome_probabilities(&state, &s);
    let mut conditional = serde_json::Map::new();
    for outcome in [Outcome::Plus, Outcome::Minus] {
        let value = match conditional_state(&state, &s, outcome) {
            Ok((post, p)) => json!({
                "probability": p,
                "state": serde_json::to_value(StateDescriptor::from(&post)).map_err(Error::from)?,
            }),
            Err(Error::Unsupported(msg)) => json!({"unsupported": msg}),
            Err(Error::ZeroProbability(p)) => json!({"probability": p, "state": null}),
            Err(e) => return Err(e.into()),
        };
        conditional.insert(outcome.symbol().to_string(), value);
    }
    let mut out = json!({
        "phi": a.phi,
        "alpha": complex(a.alpha),
        "free_angle": a.free_angle,
        "p_plus": p_plus,
        "p_minus": p_minus,
        "conditional": conditional,
    });
    if let Some(shots) = a.shots {
        let sample = sampled_modular_expectation(&state, &s, shots, a.seed)?;
        out["shots"] = json!({
            "seed": a.seed,
            "shots": sample.shots,
            "plus_count": sample.plus_count,
            "minus_count": sample.shots - sample.plus_count,
            "estimate": sample.estimate,
        });
    }
    let mut oracle_delta = None;
    if a.common.verify {
        let (op, om) = oracle::outcome_probabilities(&state, a.phi, a.alpha, a.free_angle)?;
        let d = (op - p_plus).abs().max((om - p_minus).abs());
        out["oracle_delta"] = json!(d);
        oracle_delta = Some(d);
    }
    Ok(Report { text: json(&out)?, oracle_delta })
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    /// Initial state of each mode (a coherent superposition).
    #[arg(long, allow_hyphen_values = true, default_value = "vacuum")]
    pub state: String,
    /// Relative phase of the qubit Bell pair.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub theta: f64,
    /// Pulse phase.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub phi0: f64,
    /// Ramsey phase.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub phi: f64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub alpha: Complex64,
    /// Readout pair, e.g. `+,-`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_outcomes, default_value = "-,-")]
    pub outcome: (Outcome, Outcome),
    /// Bell pair `phi` (|gg> + e^{i Theta}|ee>) or `psi` (|ge> + e^{i Theta}|eg>).
    #[arg(long, default_value = "phi", value_parser = ["phi", "psi"])]
    pub variant: String,
    #[command(flatten)]
    pub common: Common,
}

fn branch_label(o: (Outcome, Outcome)) -> String {
    format!("{}{}", o.0.symbol(), o.1.symbol())
}

pub fn prepare(a: &PrepareArgs) -> Result<Report> {
    let psi = load_single(&a.state)?;
    format_or(&a.common, Format::Json, &[Format::Json])?;
    let variant = if a.variant == "psi" { BellVariant::Psi } else { BellVariant::Phi };
    let s = RamseySetting::new(a.phi, a.alpha)?;
    let (state, p) = prepare_conditional(&psi, a.theta, a.phi0, &s, a.outcome, variant)?;
    let mut branches = serde_json::Map::new();
    let mut total = 0.0;
    let mut oracle_delta: f64 = 0.0;
    // the pulse simulation realises phi0 = pi; shift Theta so the relative phase matches
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let zero = Complex64::new(0.0, 0.0);
    let bell = match variant {
        BellVariant::Phi => {
            [Complex64::new(h, 0.0), zero, zero, Complex64::from_polar(h, a.theta - 2.0 * a.phi0 + 2.0 * PI)]
        }
        BellVariant::Psi => [zero, Complex64::new(h, 0.0), Complex64::from_polar(h, a.theta), zero],
    };
    for o1 in [Outcome::Plus, Outcome::Minus] {
        for o2 in [Outcome::Plus, Outcome::Minus] {
            let q = match prepare_conditional(&psi, a.theta, a.phi0, &s, (o1, o2), variant) {
                Ok((st, q)) => {
                    if a.common.verify {
                        oracle_delta = oracle_delta.max(prepare_delta(&psi, &st, q, bell, a, (o1, o2))?);
                    }
                    q
                }
                Err(Error::ZeroProbability(q)) => q,
                Err(e) => return Err(e.into()),
            };
            total += q;
            branches.insert(branch_label((o1, o2)), json!(q));
        }
    }
    let mut out = json!({
        "outcome": branch_label(a.outcome),
        "variant": a.variant,
        "theta": a.theta,
        "phi0": a.phi0,
        "phi": a.phi,
        "alpha": complex(a.alpha),
        "probability": p,
        "state": serde_json::to_value(StateDescriptor::from(&state)).map_err(Error::from)?,
        "branches": branches,
        "branch_total": total,
    });
    let delta = a.common.verify.then(|| {
        out["oracle_delta"] = json!(oracle_delta);
        oracle_delta
    });
    Ok(Report { text: json(&out)?, oracle_delta: delta })
}

fn prepare_delta(
    psi: &SingleModeState,
    state: &TwoModeState,
    p: f64,
    bell: [Complex64; 4],
    a: &PrepareArgs,
    o: (Outcome, Outcome),
) -> Result<f64> {
    let probes = [Complex64::new(0.5, 0.0), Complex64::new(-0.3, 0.7), Complex64::new(1.0, -1.0)];
    let extent = psi.extent() + a.alpha.norm() + 1.5;
    let (v, _) = oracle::converge(extent, |dim| {
        let branch = oracle::ramsey_pair_branch(psi, bell, a.phi, a.alpha, (o.0.sign(), o.1.sign()), dim)?;
        let q = branch.trace();
        let mut out = vec![Complex64::new(q, 0.0)];
        for &x in &probes {
            let y = -x.conj();
            let e = oracle::expval2(&oracle::displacement_matrix(x, dim), &oracle::displacement_matrix(y, dim), &branch)?;
            out.push(e / q);
        }
        Ok(out)
    })?;
    let mut d = (v[0].re - p).abs();
    for (k, &x) in probes.iter().enumerate() {
        d = d.max((v[k + 1] - state.chi2(x, -x.conj())).norm());
    }
    Ok(d)
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// Two-mode state; the entangled cat at `--xi0` when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub state: Option<String>,
    #[arg(long, default_value_t = 2.0)]
    pub xi0: f64,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
    #[command(flatten)]
    pub common: Common,
}

pub fn moments(a: &MomentsArgs) -> Result<Report> {
    format_or(&a.common, Format::Json, &[Format::Json])?;
    let state = match &a.state {
        Some(s) => load_two(s)?,
        None => entangled_cat(Complex64::new(a.xi0, 0.0), 1)?,
    };
    let s = standard_settings(a.xi0, a.eps)?;
    let m = moments9(&state, &s);
    let pt = partial_transpose(&m.entries);
    let rows = |x: &DMatrix<Complex64>| -> Vec<Vec<serde_json::Value>> {
        (0..9).map(|i| (0..9).map(|j| complex(x[(i, j)])).collect()).collect()
    };
    let mut out = json!({
        "xi0": a.xi0,
        "eps": a.eps,
        "settings": serde_json::to_value(s).map_err(Error::from)?,
        "entries": rows(&m.entries),
        "partial_transpose_min_eigenvalue": min_eigenvalue(&pt)?,
        "gram_min_eigenvalue": min_eigenvalue(&m.entries)?,
    });
    let mut oracle_delta = None;
    if a.common.verify {
        let d = moment_delta(&state, &s, &m.entries)?;
        out["oracle_delta"] = json!(d);
        oracle_delta = Some(d);
    }
    Ok(Report { text: json(&out)?, oracle_delta })
}
