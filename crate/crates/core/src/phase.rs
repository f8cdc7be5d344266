//! Geometric phase of state paths, determinant winding of unitary paths,
//! and the eigenbasis sum rule tying the two together.
//!
//! The winding regularizes the continuous determinant phase with the sum of
//! principal eigenphases of W = U(0)†U(T). Evaluated on the eigenbasis of W,
//! the geometric phases then add up to 2π times the winding.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::evolution::{self, EvolutionError, Resolution, Schedule, Trajectory, MIN_OVERLAP};
use crate::linalg::{self, principal_arg, wrap_phase, ComplexMatrix, LinalgError};

/// Sign fixed so that flattened representatives give ν_U = 2mν_H.
pub const SIGN_CONVENTION: i32 = -1;
pub const WINDING_RESIDUAL_TOL: f64 = 1e-6;
pub const SUM_RULE_TOL: f64 = 1e-5;
const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhaseError {
    #[error("trajectory carries no states")]
    MissingStates,
    #[error("trajectory carries no unitaries")]
    MissingUnitaries,
    #[error("refine trajectory: overlap {overlap:.3} at step {step}")]
    Overlap { step: usize, overlap: f64 },
    #[error("refine trajectory: determinant phase step {step_size:.3} at step {step}")]
    DeterminantStep { step: usize, step_size: f64 },
    #[error("non-integer winding: raw {raw}, residual {residual:.3e}")]
    NonInteger { raw: f64, residual: f64 },
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PhaseOptions {
    /// Remove the winding of the overall phase contributed by Tr(H_eff).
    pub gauge_correction: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseReport {
    pub connection_integral: f64,
    pub closing_arg: f64,
    pub gauge_correction: f64,
    pub gamma: f64,
}

/// −2π·sgn(Φ)·⌊|Φ|/2π⌋ for an accumulated identity phase Φ = ∫ Tr(H)/dim dt.
pub fn large_gauge_term(identity_phase: f64) -> f64 {
    -TWO_PI * identity_phase.signum() * (identity_phase.abs() / TWO_PI).floor()
}

/// Correction that maps γ of a path with identity phase Φ onto γ of the
/// traceless path. It is the large-gauge term plus a branch term at the endpoint.
pub fn gauge_correction(closing_arg: f64, identity_phase: f64) -> f64 {
    let exact = -identity_phase + wrap_phase(closing_arg + identity_phase) - closing_arg;
    // Snap to the nearest multiple of 2π; the value is one up to rounding.
    TWO_PI * (exact / TWO_PI).round()
}

pub fn geometric_phase(traj: &Trajectory, opts: PhaseOptions) -> Result<PhaseReport, PhaseError> {
    let states = traj.states.as_ref().ok_or(PhaseError::MissingStates)?;
    let mut connection = 0.0;
    for (k, w) in states.windows(2).enumerate() {
        let ov = linalg::inner(&w[0], &w[1]);
        if ov.norm() <= MIN_OVERLAP {
            return Err(PhaseError::Overlap { step: k, overlap: ov.norm() });
        }
        connection -= ov.arg();
    }
    let closing = principal_arg(linalg::inner(&states[0], &states[states.len() - 1]));
    let correction = if opts.gauge_correction { gauge_correction(closing, traj.identity_phase()) } else { 0.0 };
    Ok(PhaseReport {
        connection_integral: connection,
        closing_arg: closing,
        gauge_correction: correction,
        gamma: connection + closing + correction,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindingReport {
    pub nu_u: i64,
    /// Signed (Δ arg det − Σ principal eigenphases of W)/2π before rounding.
    pub raw_winding: f64,
    pub arg_trace: Vec<f64>,
    pub residual: f64,
    /// Winding regularized by the principal branch of the determinant itself.
    pub contour_winding: i64,
    pub endpoint_eigenphases: Vec<f64>,
    pub sign_convention: i32,
}

fn unwrap_det_phases(dets: impl Iterator<Item = Complex64>) -> Result<Vec<f64>, PhaseError> {
    let mut trace: Vec<f64> = Vec::new();
    let mut prev: Option<Complex64> = None;
    for (k, d) in dets.enumerate() {
        match prev {
            None => trace.push(principal_arg(d)),
            Some(p) => {
                let step = (d / p).arg();
                if step.abs() >= PI / 2.0 {
                    return Err(PhaseError::DeterminantStep { step: k, step_size: step });
                }
                trace.push(trace[k - 1] + step);
            }
        }
        prev = Some(d);
    }
    Ok(trace)
}

fn winding_from(arg_trace: Vec<f64>, w: &ComplexMatrix) -> Result<WindingReport, PhaseError> {
    let eig = linalg::eig_unitary(w)?;
    let endpoint: f64 = eig.eigenphases.iter().sum();
    let delta = arg_trace[arg_trace.len() - 1] - arg_trace[0];
    let sigma = SIGN_CONVENTION as f64;
    let raw = sigma * (delta - endpoint) / TWO_PI;
    let residual = (raw - raw.round()).abs();
    if residual >= WINDING_RESIDUAL_TOL {
        return Err(PhaseError::NonInteger { raw, residual });
    }
    let contour = sigma * (delta - wrap_phase(delta)) / TWO_PI;
    Ok(WindingReport {
        nu_u: raw.round() as i64,
        raw_winding: raw,
        arg_trace,
        residual,
        contour_winding: contour.round() as i64,
        endpoint_eigenphases: eig.eigenphases,
        sign_convention: SIGN_CONVENTION,
    })
}

pub fn winding_number(traj: &Trajectory) -> Result<WindingReport, PhaseError> {
    let us = traj.unitaries.as_ref().ok_or(PhaseError::MissingUnitaries)?;
    let trace = unwrap_det_phases(us.iter().map(|u| u.det()))?;
    let w = &us[0].adjoint() * &us[us.len() - 1];
    winding_from(trace, &w)
}

/// Winding of the path t ↦ e^{iρ(t)}U(t).
pub fn winding_number_gauged(traj: &Trajectory, rho: &dyn Fn(f64) -> f64) -> Result<WindingReport, PhaseError> {
    let us = traj.unitaries.as_ref().ok_or(PhaseError::MissingUnitaries)?;
    let dim = traj.dim as f64;
    let dets = us.iter().zip(&traj.times).map(|(u, &t)| u.det() * Complex64::from_polar(1.0, dim * rho(t)));
    let trace = unwrap_det_phases(dets)?;
    let n = us.len() - 1;
    let u0 = us[0].scale(Complex64::from_polar(1.0, rho(traj.times[0])));
    let ut = us[n].scale(Complex64::from_polar(1.0, rho(traj.times[n])));
    winding_from(trace, &(&u0.adjoint() * &ut))
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenstatePhase {
    pub eigenphase: f64,
    pub state: Vec<[f64; 2]>,
    pub phase: PhaseReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SumRuleRecord {
    pub nu_u: i64,
    pub winding: WindingReport,
    pub gammas: Vec<EigenstatePhase>,
    pub gamma_sum_over_2pi: f64,
    pub consistent: bool,
    /// Winding after the per-state gauge corrections, when requested.
    pub corrected_nu_u: Option<f64>,
}

fn amplitudes(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

/// γ for each column of `basis`, evolved through `schedule`.
pub fn phases_for_states(
    schedule: &Schedule,
    states: &[Vec<Complex64>],
    res: &Resolution,
    opts: PhaseOptions,
) -> Result<Vec<PhaseReport>, PhaseError> {
    let run = |psi: &Vec<Complex64>| -> Result<PhaseReport, PhaseError> {
        let traj = evolution::evolve_state(schedule, psi, res)?;
        geometric_phase(&traj, opts)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        states.par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        states.iter().map(run).collect()
    }
}

pub fn sum_rule(schedule: &Schedule, res: &Resolution, opts: PhaseOptions) -> Result<SumRuleRecord, PhaseError> {
    let traj = evolution::propagate(schedule, &Resolution { max_phase_step: f64::INFINITY, ..*res })?;
    let winding = winding_number(&traj)?;
    let us = traj.unitaries.as_ref().expect("propagate keeps unitaries");
    let w = &us[0].adjoint() * &us[us.len() - 1];
    let eig = linalg::eig_unitary(&w)?;
    let dim = traj.dim;
    let states: Vec<Vec<Complex64>> = (0..dim).map(|k| linalg::normalized(&eig.vector(k))).collect();
    let reports = phases_for_states(schedule, &states, res, opts)?;
    let total: f64 = reports.iter().map(|r| r.gamma - r.gauge_correction).sum();
    let sum_over_2pi = total / TWO_PI;
    let corrected = opts
        .gauge_correction
        .then(|| reports.iter().map(|r| r.gamma).sum::<f64>() / TWO_PI);
    let gammas = states
        .iter()
        .zip(&reports)
        .zip(&eig.eigenphases)
        .map(|((s, r), &theta)| EigenstatePhase { eigenphase: theta, state: amplitudes(s), phase: *r })
        .collect();
    Ok(SumRuleRecord {
        nu_u: winding.nu_u,
        consistent: (sum_over_2pi - winding.nu_u as f64).abs() < SUM_RULE_TOL,
        winding,
        gammas,
        gamma_sum_over_2pi: sum_over_2pi,
        corrected_nu_u: corrected,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GaugeCheck {
    pub delta_rho: f64,
    pub nu_u_before: i64,
    pub nu_u_after: i64,
    pub unchanged: bool,
    /// |Δρ|·dim < 2π.
    pub small: bool,
    /// No eigenphase of W is pushed across the branch cut by Δρ.
    pub branch_safe: bool,
    /// Winding after the gauged path is corrected state by state.
    pub corrected_nu_u: f64,
}

/// Compares ν_U of U(t) and e^{iρ(t)}U(t) with ρ rising smoothly by `delta_rho`.
pub fn gauge_check(schedule: &Schedule, delta_rho: f64, res: &Resolution) -> Result<GaugeCheck, PhaseError> {
    let traj = evolution::propagate(schedule, res)?;
    let before = winding_number(&traj)?;
    let total = traj.times[traj.times.len() - 1];
    let rho = move |t: f64| delta_rho * 0.5 * (1.0 - (PI * t / total).cos());
    let after = winding_number_gauged(&traj, &rho)?;
    let branch_safe = before
        .endpoint_eigenphases
        .iter()
        .all(|&th| (wrap_phase(th + delta_rho) - (th + delta_rho)).abs() < 1e-9);
    let correction: f64 = after
        .endpoint_eigenphases
        .iter()
        .map(|&chi| gauge_correction(chi, -delta_rho))
        .sum::<f64>()
        / TWO_PI;
    Ok(GaugeCheck {
        delta_rho,
        nu_u_before: before.nu_u,
        nu_u_after: after.nu_u,
        unchanged: before.nu_u == after.nu_u,
        small: delta_rho.abs() * (traj.dim as f64) < TWO_PI,
        branch_safe,
        corrected_nu_u: after.nu_u as f64 + correction,
    })
}
