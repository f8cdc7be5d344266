//! Gate schedules, closed-form phase predictions and the computational-basis table.
//!
//! A recipe's segment list is one full cycle, the gate applied twice. Its
//! default cycle count of 1/2 therefore plays the gate once; cycle count 1
//! plays the squared gate.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::evolution::{Cycles, EvolutionError, Resolution, Schedule, Segment};
use crate::linalg::ComplexMatrix;
use crate::pauli::{self, PauliError};
use crate::phase::{self, PhaseError, PhaseOptions, PhaseReport};

pub const RECIPE_TOL: f64 = 1e-8;
pub const MAX_NOISE_RATIO: f64 = 0.2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("unknown gate {0:?}")]
    UnknownGate(String),
    #[error("unknown state family {0:?}")]
    UnknownFamily(String),
    #[error("coupling {name} must be positive, got {value}")]
    BadCoupling { name: &'static str, value: f64 },
    #[error("B/λ = {0} outside the perturbative range [0, 0.2]")]
    NoiseOutOfRange(f64),
    #[error("recipe for {gate} misses its target by {distance:.3e}")]
    RecipeMismatch { gate: GateName, distance: f64 },
    #[error("no closed form for {gate} on {family} states")]
    NoClosedForm { gate: GateName, family: Family },
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GateName {
    #[serde(rename = "SWAP1")]
    Swap1,
    #[serde(rename = "SWAP2")]
    Swap2,
    #[serde(rename = "CNOT1")]
    Cnot1,
    #[serde(rename = "CNOT2")]
    Cnot2,
    #[serde(rename = "NOISY_SWAP")]
    NoisySwap,
}

impl GateName {
    pub const TABLE: [GateName; 4] = [GateName::Swap1, GateName::Swap2, GateName::Cnot1, GateName::Cnot2];
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateName::Swap1 => "SWAP1",
            GateName::Swap2 => "SWAP2",
            GateName::Cnot1 => "CNOT1",
            GateName::Cnot2 => "CNOT2",
            GateName::NoisySwap => "NOISY_SWAP",
        })
    }
}

impl FromStr for GateName {
    type Err = GateError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "SWAP1" => Ok(GateName::Swap1),
            "SWAP2" => Ok(GateName::Swap2),
            "CNOT1" => Ok(GateName::Cnot1),
            "CNOT2" => Ok(GateName::Cnot2),
            "NOISY_SWAP" | "NOISYSWAP" => Ok(GateName::NoisySwap),
            _ => Err(GateError::UnknownGate(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Symmetric,
    Antisymmetric,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Symmetric => "symmetric",
            Family::Antisymmetric => "antisymmetric",
        })
    }
}

impl FromStr for Family {
    type Err = GateError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sym" | "symmetric" => Ok(Family::Symmetric),
            "asym" | "antisymmetric" => Ok(Family::Antisymmetric),
            _ => Err(GateError::UnknownFamily(s.to_string())),
        }
    }
}

/// Initial states of the closed-form families.
///
/// Symmetric: cos(α/2)e^{-iβ/2}|00⟩ + sin(α/2)e^{iβ/2}|11⟩.
/// Antisymmetric: cos(α/2)e^{-iβ/2}|01⟩ + sin(α/2)e^{iβ/2}|10⟩, where |01⟩ has
/// qubit 1 in |0⟩. This is the ordering under which the CNOT and noise
/// predictions hold for a control on qubit 1.
pub fn family_state(family: Family, alpha0: f64, beta0: f64) -> Vec<Complex64> {
    let a = Complex64::from_polar((alpha0 / 2.0).cos(), -beta0 / 2.0);
    let b = Complex64::from_polar((alpha0 / 2.0).sin(), beta0 / 2.0);
    let z = Complex64::new(0.0, 0.0);
    match family {
        Family::Symmetric => vec![a, z, z, b],
        Family::Antisymmetric => vec![z, a, b, z],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Couplings {
    pub lambda: f64,
    pub w: f64,
    pub energy: f64,
    pub b: f64,
}

impl Default for Couplings {
    fn default() -> Self {
        Self { lambda: 1.0, w: 1.0, energy: 1.0, b: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateRecipe {
    pub name: GateName,
    pub couplings: Couplings,
    pub schedule: Schedule,
    pub include_global_phase: bool,
    /// Distance to the target gate up to a global phase, one application.
    pub target_distance: f64,
}

pub fn swap_matrix() -> ComplexMatrix {
    ComplexMatrix::from_real(4, &[1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 1.]).expect("4x4")
}

/// CNOT with qubit 1 as control.
pub fn cnot_matrix() -> ComplexMatrix {
    ComplexMatrix::from_real(4, &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.]).expect("4x4")
}

fn gate_segments(name: GateName, c: &Couplings, include_global_phase: bool) -> Result<Vec<Segment>, GateError> {
    let quarter = |lambda: f64| PI / (4.0 * lambda);
    let cnot_time = PI / (2.0 * c.w);
    let had_time = PI / (2.0 * c.energy);
    let prefix = if include_global_phase { PI / 4.0 } else { 0.0 };
    Ok(match name {
        GateName::Swap1 => {
            vec![Segment::new(pauli::heisenberg(c.lambda), quarter(c.lambda)).with_global_phase(prefix)]
        }
        GateName::NoisySwap => vec![
            Segment::new(pauli::parasitic_heisenberg(c.b, c.lambda), quarter(c.lambda)).with_global_phase(prefix),
        ],
        GateName::Swap2 => vec![
            Segment::new(pauli::cross_resonance(c.w), cnot_time),
            Segment::new(pauli::cross_resonance_reversed(c.w), cnot_time),
            Segment::new(pauli::cross_resonance(c.w), cnot_time),
        ],
        GateName::Cnot1 => vec![Segment::new(pauli::cross_resonance(c.w), cnot_time)],
        GateName::Cnot2 => {
            let h1 = Segment::new(pauli::hadamard_h(c.energy, 1)?, had_time);
            let h2 = Segment::new(pauli::hadamard_h(c.energy, 2)?, had_time);
            vec![
                h1.clone(),
                h2.clone(),
                Segment::new(pauli::cross_resonance_reversed(c.w), cnot_time),
                h1,
                h2,
            ]
        }
    })
}

fn check_couplings(name: GateName, c: &Couplings) -> Result<(), GateError> {
    let positive = |label: &'static str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(GateError::BadCoupling { name: label, value: v })
        }
    };
    match name {
        GateName::Swap1 => positive("lambda", c.lambda),
        GateName::NoisySwap => {
            positive("lambda", c.lambda)?;
            let ratio = c.b / c.lambda;
            if !(0.0..=MAX_NOISE_RATIO).contains(&ratio.abs()) || !ratio.is_finite() {
                return Err(GateError::NoiseOutOfRange(ratio));
            }
            Ok(())
        }
        GateName::Swap2 | GateName::Cnot1 => positive("w", c.w),
        GateName::Cnot2 => {
            positive("w", c.w)?;
            positive("energy", c.energy)
        }
    }
}

/// Builds the recipe and checks one application against its target gate.
/// The noisy SWAP is checked with the parasitic field switched off.
pub fn build(name: GateName, couplings: Couplings, include_global_phase: bool) -> Result<GateRecipe, GateError> {
    check_couplings(name, &couplings)?;
    let once = gate_segments(name, &couplings, include_global_phase)?;
    let reference = match name {
        GateName::NoisySwap => gate_segments(name, &Couplings { b: 0.0, ..couplings }, include_global_phase)?,
        _ => once.clone(),
    };
    let target = match name {
        GateName::Swap1 | GateName::Swap2 | GateName::NoisySwap => swap_matrix(),
        GateName::Cnot1 | GateName::Cnot2 => cnot_matrix(),
    };
    let u = Schedule::new(2, reference, Cycles::ONE)?.final_unitary()?;
    let distance = u.distance_up_to_phase(&target);
    if distance >= RECIPE_TOL {
        return Err(GateError::RecipeMismatch { gate: name, distance });
    }
    let mut cycle = once.clone();
    cycle.extend(once);
    Ok(GateRecipe {
        name,
        couplings,
        schedule: Schedule::new(2, cycle, Cycles::HALF)?,
        include_global_phase,
        target_distance: distance,
    })
}

impl GateRecipe {
    pub fn with_cycles(&self, cycles: Cycles) -> Result<Schedule, GateError> {
        Ok(self.schedule.with_cycles(cycles)?)
    }
}

/// Cycle count at which each closed form applies.
pub fn prediction_cycles(name: GateName, family: Family) -> Result<Cycles, GateError> {
    match (name, family) {
        (GateName::Swap1 | GateName::Swap2, Family::Symmetric) => Ok(Cycles::ONE),
        (GateName::Swap1 | GateName::Swap2 | GateName::NoisySwap, Family::Antisymmetric) => Ok(Cycles::TWO),
        (GateName::Cnot1 | GateName::Cnot2, Family::Antisymmetric) => Ok(Cycles::ONE),
        _ => Err(GateError::NoClosedForm { gate: name, family }),
    }
}

fn cnot1_closed_form(alpha0: f64) -> f64 {
    FRAC_PI_2 * (alpha0.cos() - 1.0)
}

pub fn predicted_phase(name: GateName, family: Family, alpha0: f64, beta0: f64) -> Result<f64, GateError> {
    match (name, family) {
        (GateName::Swap1, Family::Symmetric) => Ok(PI),
        (GateName::Swap2, Family::Symmetric) => Ok(PI * (1.0 + alpha0.cos())),
        (GateName::Swap1 | GateName::Swap2, Family::Antisymmetric) => Ok(2.0 * PI * alpha0.sin() * beta0.cos()),
        (GateName::Cnot1, Family::Antisymmetric) => Ok(cnot1_closed_form(alpha0)),
        (GateName::Cnot2, Family::Antisymmetric) => {
            Ok((1.0 + SQRT_2) * cnot1_closed_form(alpha0) + PI * FRAC_1_SQRT_2 * alpha0.sin() * beta0.cos())
        }
        _ => Err(GateError::NoClosedForm { gate: name, family }),
    }
}

/// π(B/λ)cos α₀.
pub fn noise_correction(b_over_lambda: f64, alpha0: f64) -> f64 {
    PI * b_over_lambda * alpha0.cos()
}

/// Chooses the 2π branch of each value so the sequence runs continuously,
/// starting from the branch of `values[0]` nearest `anchor`.
pub fn branch_continue(values: &[f64], anchor: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    for &v in values {
        let reference = out.last().copied().unwrap_or(anchor);
        let k = ((reference - v) / (2.0 * PI)).round();
        out.push(v + 2.0 * PI * k);
    }
    out
}

/// Geometric phase of a family state under a recipe at the given cycle count.
pub fn family_phase(
    recipe: &GateRecipe,
    family: Family,
    alpha0: f64,
    beta0: f64,
    cycles: Cycles,
    res: &Resolution,
) -> Result<PhaseReport, GateError> {
    let schedule = recipe.with_cycles(cycles)?;
    let psi = family_state(family, alpha0, beta0);
    let traj = crate::evolution::evolve_state(&schedule, &psi, res)?;
    Ok(phase::geometric_phase(&traj, PhaseOptions::default())?)
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Entry {
    pub global_phase_included: bool,
    pub cycles: Cycles,
    /// γ for |00⟩, |01⟩, |10⟩, |11⟩.
    pub computational: Vec<f64>,
    pub computational_sum: f64,
    pub gamma_sum_over_2pi: f64,
    pub nu_u: i64,
    pub sum_rule_consistent: bool,
    pub matches_reference: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Row {
    pub gate: GateName,
    pub reference_gamma_sum_over_2pi: f64,
    pub reference_nu_u: i64,
    pub reference_computational: Vec<f64>,
    pub entries: Vec<Table1Entry>,
    pub reproduced: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1 {
    pub rows: Vec<Table1Row>,
}

fn reference_row(gate: GateName) -> (f64, i64, Vec<f64>) {
    let s2 = SQRT_2;
    match gate {
        GateName::Swap1 => (1.0, 1, vec![PI, 0.0, 0.0, PI]),
        GateName::Swap2 => (1.0, 1, vec![2.0 * PI, 0.0, 0.0, 0.0]),
        GateName::Cnot1 => (-1.0, -1, vec![0.0, 0.0, -PI, -PI]),
        _ => (-1.0, -1, vec![2.0 * s2 * PI, 0.0, -(1.0 + s2) * PI, -(1.0 + s2) * PI]),
    }
}

pub fn table1_row(gate: GateName, couplings: Couplings, res: &Resolution) -> Result<Table1Row, GateError> {
    let (reference_sum, reference_nu, reference_states) = reference_row(gate);
    let mut entries = Vec::new();
    for include in [false, true] {
        let recipe = build(gate, couplings, include)?;
        for cycles in [Cycles::HALF, Cycles::ONE] {
            let schedule = recipe.with_cycles(cycles)?;
            let rule = phase::sum_rule(&schedule, res, PhaseOptions::default())?;
            let basis: Vec<Vec<Complex64>> = (0..4)
                .map(|k| {
                    let mut v = vec![Complex64::new(0.0, 0.0); 4];
                    v[k] = Complex64::new(1.0, 0.0);
                    v
                })
                .collect();
            let reports = phase::phases_for_states(&schedule, &basis, res, PhaseOptions::default())?;
            let computational: Vec<f64> = reports.iter().map(|r| r.gamma).collect();
            let matches = (rule.gamma_sum_over_2pi - reference_sum).abs() < phase::SUM_RULE_TOL && rule.nu_u == reference_nu;
            entries.push(Table1Entry {
                global_phase_included: include,
                cycles,
                computational_sum: computational.iter().sum(),
                computational,
                gamma_sum_over_2pi: rule.gamma_sum_over_2pi,
                nu_u: rule.nu_u,
                sum_rule_consistent: rule.consistent,
                matches_reference: matches,
            });
        }
    }
    Ok(Table1Row {
        gate,
        reference_gamma_sum_over_2pi: reference_sum,
        reference_nu_u: reference_nu,
        reference_computational: reference_states,
        reproduced: entries.iter().any(|e| e.matches_reference),
        entries,
    })
}

pub fn table1(res: &Resolution) -> Result<Table1, GateError> {
    let rows = GateName::TABLE
        .iter()
        .map(|&g| table1_row(g, Couplings::default(), res))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Table1 { rows })
}

/// One point of an (α₀, β₀) sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha0: f64,
    pub beta0: f64,
    pub concurrence: f64,
    pub gamma_numeric: f64,
    /// Schmidt-sphere line integral; NaN where the path hits a singular chart.
    pub gamma_closed_form: f64,
    pub prediction: f64,
    pub difference: f64,
}

/// Sweeps a family over the grid at the gate's prediction cycle count.
///
/// Rows come out β₀-major with α₀ ascending. Within each β₀ the numeric and
/// closed-form phases are branch-continued in α₀, anchored to the prediction
/// at the first α₀; `difference` is taken modulo 2π.
pub fn sweep(
    recipe: &GateRecipe,
    family: Family,
    alphas: &[f64],
    betas: &[f64],
    res: &Resolution,
) -> Result<Vec<SweepRow>, GateError> {
    let cycles = prediction_cycles(recipe.name, family)?;
    let schedule = recipe.with_cycles(cycles)?;
    let mut alphas = alphas.to_vec();
    alphas.sort_by(f64::total_cmp);
    let points: Vec<(f64, f64)> = betas.iter().flat_map(|&b| alphas.iter().map(move |&a| (a, b))).collect();
    let run = |&(a, b): &(f64, f64)| -> Result<(f64, f64), GateError> {
        let psi = family_state(family, a, b);
        let traj = crate::evolution::evolve_state(&schedule, &psi, res)?;
        let g = phase::geometric_phase(&traj, PhaseOptions::default())?.gamma;
        let cf = crate::schmidt::gamma_closed_form(&traj, crate::schmidt::SINGULARITY_MARGIN).unwrap_or(f64::NAN);
        Ok((g, cf))
    };
    #[cfg(feature = "parallel")]
    let raw: Vec<(f64, f64)> = {
        use rayon::prelude::*;
        points.par_iter().map(run).collect::<Result<_, _>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let raw: Vec<(f64, f64)> = points.iter().map(run).collect::<Result<_, _>>()?;

    let mut rows = Vec::with_capacity(points.len());
    for (chunk_points, chunk_raw) in points.chunks(alphas.len().max(1)).zip(raw.chunks(alphas.len().max(1))) {
        let predictions: Vec<f64> = chunk_points
            .iter()
            .map(|&(a, b)| predicted_phase(recipe.name, family, a, b))
            .collect::<Result<_, _>>()?;
        let numeric: Vec<f64> = chunk_raw.iter().map(|r| r.0).collect();
        let numeric = branch_continue(&numeric, predictions[0]);
        for (k, (&(a, b), &(_, cf))) in chunk_points.iter().zip(chunk_raw).enumerate() {
            let cf = if cf.is_finite() { branch_continue(&[cf], numeric[k])[0] } else { cf };
            rows.push(SweepRow {
                alpha0: a,
                beta0: b,
                concurrence: a.sin().abs(),
                gamma_numeric: numeric[k],
                gamma_closed_form: cf,
                prediction: predictions[k],
                difference: crate::linalg::wrap_phase(numeric[k] - predictions[k]),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseRow {
    pub alpha0: f64,
    pub b_over_lambda: f64,
    pub gamma_clean: f64,
    pub gamma_noisy: f64,
    pub shift: f64,
    pub prediction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseFit {
    pub alpha0: f64,
    pub slope: f64,
    pub intercept: f64,
    pub predicted_slope: f64,
    pub relative_error: f64,
}

/// Phase shift of the noisy SWAP on antisymmetric states (β₀ = 0) relative
/// to the clean gate, with a least-squares line per α₀.
pub fn noise_sweep(
    ratios: &[f64],
    alphas: &[f64],
    lambda: f64,
    res: &Resolution,
) -> Result<(Vec<NoiseRow>, Vec<NoiseFit>), GateError> {
    let cycles = prediction_cycles(GateName::NoisySwap, Family::Antisymmetric)?;
    let schedule_for = |ratio: f64| -> Result<Schedule, GateError> {
        let c = Couplings { lambda, b: ratio * lambda, ..Default::default() };
        build(GateName::NoisySwap, c, true)?.with_cycles(cycles)
    };
    let clean = schedule_for(0.0)?;
    let noisy: Vec<Schedule> = ratios.iter().map(|&r| schedule_for(r)).collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &a in alphas {
        let psi = family_state(Family::Antisymmetric, a, 0.0);
        let g0 = phase::phases_for_states(&clean, std::slice::from_ref(&psi), res, PhaseOptions::default())?[0].gamma;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (&r, s) in ratios.iter().zip(&noisy) {
            let g = phase::phases_for_states(s, std::slice::from_ref(&psi), res, PhaseOptions::default())?[0].gamma;
            let shift = branch_continue(&[g - g0], 0.0)[0];
            xs.push(r);
            ys.push(shift);
            rows.push(NoiseRow {
                alpha0: a,
                b_over_lambda: r,
                gamma_clean: g0,
                gamma_noisy: g0 + shift,
                shift,
                prediction: noise_correction(r, a),
            });
        }
        let (slope, intercept) = linear_fit(&xs, &ys);
        let predicted = PI * a.cos();
        fits.push(NoiseFit {
            alpha0: a,
            slope,
            intercept,
            predicted_slope: predicted,
            relative_error: ((slope - predicted) / predicted).abs(),
        });
    }
    Ok((rows, fits))
}

/// Ordinary least squares y = slope·x + intercept.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recipes_realize_targets() {
        for (name, include) in [
            (GateName::Swap1, true),
            (GateName::Swap1, false),
            (GateName::Swap2, false),
            (GateName::Cnot1, false),
            (GateName::Cnot2, false),
        ] {
            let r = build(name, Couplings::default(), include).unwrap();
            assert!(r.target_distance < RECIPE_TOL, "{name}");
        }
        let r = build(GateName::NoisySwap, Couplings { b: 0.05, ..Default::default() }, true).unwrap();
        assert!(r.target_distance < RECIPE_TOL);
    }

    #[test]
    fn swap1_with_prefactor_is_exact_swap() {
        let r = build(GateName::Swap1, Couplings::default(), true).unwrap();
        assert!(r.schedule.final_unitary().unwrap().distance(&swap_matrix()) < 1e-12);
        assert_eq!(r.schedule.playback(), vec![0]);
    }

    #[test]
    fn cnot2_controls_on_qubit_one() {
        let r = build(GateName::Cnot2, Couplings { w: 2.0, energy: 0.5, ..Default::default() }, false).unwrap();
        assert!(r.schedule.final_unitary().unwrap().distance_up_to_phase(&cnot_matrix()) < 1e-10);
    }

    #[test]
    fn squared_gates_are_identity_up_to_phase() {
        for name in GateName::TABLE {
            let r = build(name, Couplings::default(), false).unwrap();
            let u = r.with_cycles(Cycles::ONE).unwrap().final_unitary().unwrap();
            assert!(u.distance_up_to_phase(&ComplexMatrix::identity(4).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn coupling_validation() {
        assert!(build(GateName::Swap1, Couplings { lambda: 0.0, ..Default::default() }, true).is_err());
        assert!(matches!(
            build(GateName::NoisySwap, Couplings { b: 0.5, ..Default::default() }, true),
            Err(GateError::NoiseOutOfRange(_))
        ));
    }

    #[test]
    fn predictions() {
        let p = |g, f, a, b| predicted_phase(g, f, a, b).unwrap();
        assert!((p(GateName::Swap2, Family::Symmetric, 0.0, 0.0) - 2.0 * PI).abs() < 1e-15);
        assert!((p(GateName::Swap2, Family::Symmetric, FRAC_PI_2, 0.0) - PI).abs() < 1e-15);
        for g in [GateName::Swap1, GateName::Swap2] {
            assert!((p(g, Family::Antisymmetric, FRAC_PI_2, 0.0) - 2.0 * PI).abs() < 1e-15);
        }
        assert!((p(GateName::Cnot2, Family::Antisymmetric, FRAC_PI_2, 0.0) + FRAC_PI_2).abs() < 1e-15);
        assert!(predicted_phase(GateName::Cnot1, Family::Symmetric, 0.0, 0.0).is_err());
    }

    #[test]
    fn noise_correction_values() {
        assert_eq!(noise_correction(0.0, 0.4), 0.0);
        assert!((noise_correction(0.02, 0.0) - 0.02 * PI).abs() < 1e-15);
        assert!(noise_correction(0.1, FRAC_PI_2).abs() < 1e-16);
    }

    #[test]
    fn branch_continuation() {
        let v = branch_continue(&[0.1 - 2.0 * PI, 0.2, 0.3 + 2.0 * PI], 0.0);
        assert!((v[0] - 0.1).abs() < 1e-12 && (v[1] - 0.2).abs() < 1e-12 && (v[2] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn linear_fit_recovers_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let (m, c) = linear_fit(&xs, &ys);
        assert!((m - 2.5).abs() < 1e-14 && (c + 1.0).abs() < 1e-14);
    }

    #[test]
    fn swap2_symmetric_sweep_endpoints() {
        let r = build(GateName::Swap2, Couplings::default(), false).unwrap();
        let rows = sweep(&r, Family::Symmetric, &[0.0, FRAC_PI_2], &[0.0], &Resolution::default()).unwrap();
        for row in rows {
            assert!(row.difference.abs() < 2e-4, "{row:?}");
        }
    }

    #[test]
    fn family_states_are_normalized() {
        for f in [Family::Symmetric, Family::Antisymmetric] {
            let s = family_state(f, 0.7, 2.1);
            assert!((crate::linalg::norm(&s) - 1.0).abs() < 1e-15);
            let c = crate::schmidt::concurrence(&s).unwrap();
            assert!((c - 0.7f64.sin()).abs() < 1e-15);
        }
    }
}
