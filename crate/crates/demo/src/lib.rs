//! WebAssembly entry points for the browser demo in `www/`.
//!
//! Each export returns a flat `Float64Array`; the layouts are documented per
//! function. The `*_values` functions hold the logic and are what the native
//! tests call.

use std::f64::consts::{FRAC_PI_2, PI};

use qgtop::evolution::{self, Cycles, Resolution};
use qgtop::gates::{self, Couplings, Family, GateName};
use qgtop::io;
use qgtop::phase;
use wasm_bindgen::prelude::*;

fn grid(n: usize, hi: f64) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|k| hi * k as f64 / (n - 1) as f64).collect()
}

fn demo_resolution() -> Resolution {
    Resolution { min_steps: 128, ..Resolution::default() }
}

fn phase_of(gate: GateName, family: Family, a: f64, b: f64, cycles: Cycles) -> Result<f64, String> {
    let recipe = gates::build(gate, Couplings::default(), true).map_err(|e| e.to_string())?;
    let r = gates::family_phase(&recipe, family, a, b, cycles, &demo_resolution()).map_err(|e| e.to_string())?;
    Ok(r.gamma)
}

/// Rows of `[α₀, γ SWAP1², γ SWAP2², π(1+cos α₀)]` on symmetric states, with
/// the phases branch-continued in α₀.
pub fn swap_curve_values(points: usize) -> Result<Vec<f64>, String> {
    let alphas = grid(points, FRAC_PI_2);
    let mut one = Vec::new();
    let mut two = Vec::new();
    for &a in &alphas {
        one.push(phase_of(GateName::Swap1, Family::Symmetric, a, 0.0, Cycles::ONE)?);
        two.push(phase_of(GateName::Swap2, Family::Symmetric, a, 0.0, Cycles::ONE)?);
    }
    let one = gates::branch_continue(&one, one[0]);
    let two = gates::branch_continue(&two, 2.0 * PI);
    Ok(alphas
        .iter()
        .zip(one.iter().zip(&two))
        .flat_map(|(&a, (&g1, &g2))| [a, g1, g2, PI * (1.0 + a.cos())])
        .collect())
}

/// Row-major `alphas × betas` grid of γ(CNOT2²) − γ(CNOT1²) on antisymmetric
/// states, α₀ ∈ [0, π/2] and β₀ ∈ [0, 2π], each difference reduced to (−π, π].
pub fn cnot_map_values(alphas: usize, betas: usize) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for &a in &grid(alphas, FRAC_PI_2) {
        for &b in &grid(betas, 2.0 * PI) {
            let g1 = phase_of(GateName::Cnot1, Family::Antisymmetric, a, b, Cycles::ONE)?;
            let g2 = phase_of(GateName::Cnot2, Family::Antisymmetric, a, b, Cycles::ONE)?;
            out.push(qgtop::linalg::wrap_phase(g2 - g1));
        }
    }
    Ok(out)
}

/// `[ν_U, residual, t₀, arg det U(t₀), t₁, arg det U(t₁), …]` for a circuit file.
pub fn winding_trace_values(circuit: &str) -> Result<Vec<f64>, String> {
    let schedule = io::parse(circuit).map_err(|e| e.to_string())?;
    let traj = evolution::propagate(&schedule, &demo_resolution()).map_err(|e| e.to_string())?;
    let w = phase::winding_number(&traj).map_err(|e| e.to_string())?;
    let mut out = vec![w.nu_u as f64, w.residual];
    out.extend(traj.times.iter().zip(&w.arg_trace).flat_map(|(&t, &arg)| [t, arg]));
    Ok(out)
}

#[wasm_bindgen]
pub fn swap_curve(points: usize) -> Result<Vec<f64>, JsError> {
    swap_curve_values(points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn cnot_map(alphas: usize, betas: usize) -> Result<Vec<f64>, JsError> {
    cnot_map_values(alphas, betas).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn winding_trace(circuit: &str) -> Result<Vec<f64>, JsError> {
    winding_trace_values(circuit).map_err(|e| JsError::new(&e))
}
