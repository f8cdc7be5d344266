//! Piecewise-constant schedules and exact trajectory sampling.
//!
//! Every sample is the closed-form solution e^{-i H_eff τ} applied to the
//! state at the start of the segment, so refinement only changes where the
//! path is observed, never its values.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{self, ComplexMatrix, HermitianEig, LinalgError};
use crate::pauli::{HamiltonianSpec, PauliError};

pub const DEFAULT_MIN_STEPS: usize = 256;
pub const DEFAULT_MAX_PHASE_STEP: f64 = 1e-3;
pub const MAX_STEPS_PER_SEGMENT: usize = 1 << 20;
pub const MIN_OVERLAP: f64 = 0.9;
const MAX_DET_STEP: f64 = std::f64::consts::FRAC_PI_2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolutionError {
    #[error("schedule has no segments")]
    EmptySchedule,
    #[error("segment {index}: duration must be positive and finite, got {value}")]
    BadDuration { index: usize, value: f64 },
    #[error("segment {index}: {got} qubits, schedule has {expected}")]
    QubitMismatch { index: usize, expected: usize, got: usize },
    #[error("invalid cycle count: {0}")]
    BadCycles(String),
    #[error("half-integer cycle count needs a segment list made of two identical halves")]
    AsymmetricHalfList,
    #[error("segment {segment}: step control failed at {steps} steps per segment")]
    StepControl { segment: usize, steps: usize },
    #[error("initial state norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("state has {got} amplitudes, register needs {expected}")]
    StateLength { expected: usize, got: usize },
    #[error("invalid ramp profile: {0}")]
    BadRamp(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Cycle count m, restricted to whole and half-integer values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cycles {
    halves: u32,
}

impl Cycles {
    pub const HALF: Cycles = Cycles { halves: 1 };
    pub const ONE: Cycles = Cycles { halves: 2 };
    pub const TWO: Cycles = Cycles { halves: 4 };

    pub fn whole(m: u32) -> Self {
        Self { halves: 2 * m }
    }

    pub fn from_halves(halves: u32) -> Result<Self, EvolutionError> {
        if halves == 0 {
            return Err(EvolutionError::BadCycles("must be positive".into()));
        }
        Ok(Self { halves })
    }

    pub fn halves(self) -> u32 {
        self.halves
    }

    pub fn as_f64(self) -> f64 {
        self.halves as f64 / 2.0
    }

    pub fn is_whole(self) -> bool {
        self.halves % 2 == 0
    }
}

impl Default for Cycles {
    fn default() -> Self {
        Self::ONE
    }
}

impl fmt::Display for Cycles {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_whole() {
            write!(f, "{}", self.halves / 2)
        } else {
            write!(f, "{}/2", self.halves)
        }
    }
}

impl FromStr for Cycles {
    type Err = EvolutionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || EvolutionError::BadCycles(s.to_string());
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let p: u64 = p.parse().map_err(|_| bad())?;
        let q: u64 = q.parse().map_err(|_| bad())?;
        if q == 0 || p == 0 || (2 * p) % q != 0 {
            return Err(bad());
        }
        let halves = u32::try_from(2 * p / q).map_err(|_| bad())?;
        Self::from_halves(halves)
    }
}

impl Serialize for Cycles {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Piecewise-linear strength profile over normalized time s ∈ [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct RampProfile {
    points: Vec<(f64, f64)>,
}

impl RampProfile {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, EvolutionError> {
        if points.len() < 2 {
            return Err(EvolutionError::BadRamp("need at least two breakpoints".into()));
        }
        if points[0].0 != 0.0 || points[points.len() - 1].0 != 1.0 {
            return Err(EvolutionError::BadRamp("breakpoints must span s = 0 to s = 1".into()));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(EvolutionError::BadRamp("breakpoints must be strictly increasing".into()));
        }
        if let Some(p) = points.iter().find(|p| !(p.1 > 0.0) || !p.1.is_finite()) {
            return Err(EvolutionError::BadRamp(format!("strength {} at s = {} is not positive", p.1, p.0)));
        }
        Ok(Self { points })
    }

    pub fn constant() -> Self {
        Self { points: vec![(0.0, 1.0), (1.0, 1.0)] }
    }

    pub fn tent() -> Self {
        Self { points: vec![(0.0, 0.1), (0.5, 1.0), (1.0, 0.1)] }
    }

    pub fn trapezoid() -> Self {
        Self { points: vec![(0.0, 0.1), (0.25, 1.0), (0.75, 1.0), (1.0, 0.1)] }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "const" => Some(Self::constant()),
            "tent" => Some(Self::tent()),
            "trapezoid" => Some(Self::trapezoid()),
            _ => None,
        }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn is_constant(&self) -> bool {
        self.points.iter().all(|p| p.1 == self.points[0].1)
    }

    pub fn max(&self) -> f64 {
        self.points.iter().fold(0.0_f64, |m, p| m.max(p.1))
    }

    pub fn min(&self) -> f64 {
        self.points.iter().fold(f64::INFINITY, |m, p| m.min(p.1))
    }

    /// ∫_0^1 λ(s) ds.
    pub fn mean(&self) -> f64 {
        self.clock(1.0)
    }

    /// ∫_0^s λ(u) du, exact for the piecewise-linear profile.
    pub fn clock(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for w in self.points.windows(2) {
            let ((s0, l0), (s1, l1)) = (w[0], w[1]);
            if s <= s0 {
                break;
            }
            let end = s.min(s1);
            let slope = (l1 - l0) / (s1 - s0);
            let l_end = l0 + slope * (end - s0);
            acc += 0.5 * (l0 + l_end) * (end - s0);
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ramp {
    pub name: String,
    pub profile: RampProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub hamiltonian: HamiltonianSpec,
    /// Wall-clock duration.
    pub duration: f64,
    /// Total phase e^{i φ} applied across the segment.
    pub global_phase: f64,
    pub ramp: Option<Ramp>,
}

impl Segment {
    pub fn new(hamiltonian: HamiltonianSpec, duration: f64) -> Self {
        Self { hamiltonian, duration, global_phase: 0.0, ramp: None }
    }

    pub fn with_global_phase(mut self, phi: f64) -> Self {
        self.global_phase = phi;
        self
    }

    /// ∫ λ dt over the segment; equals the duration without a ramp.
    pub fn effective_time(&self) -> f64 {
        match &self.ramp {
            Some(r) => self.duration * r.profile.mean(),
            None => self.duration,
        }
    }

    /// Hamiltonian with the global phase folded in as an identity term.
    pub fn effective_hamiltonian(&self) -> HamiltonianSpec {
        if self.global_phase == 0.0 {
            self.hamiltonian.clone()
        } else {
            self.hamiltonian.gauge_shift(-self.global_phase / self.effective_time())
        }
    }

    /// Elapsed clock ∫_0^t λ for wall time t within the segment.
    pub fn clock_at(&self, t: f64) -> f64 {
        match &self.ramp {
            Some(r) => self.duration * r.profile.clock((t / self.duration).clamp(0.0, 1.0)),
            None => t,
        }
    }

    fn max_strength(&self) -> f64 {
        self.ramp.as_ref().map_or(1.0, |r| r.profile.max())
    }

    pub fn final_unitary(&self) -> Result<ComplexMatrix, EvolutionError> {
        let h = self.effective_hamiltonian().to_matrix()?;
        Ok(linalg::expm_minus_iht(&h, self.effective_time())?)
    }
}

/// Reparametrizes a segment by a positive profile, stretching the wall-clock
/// duration so that ∫λ dt matches the original effective time.
pub fn apply_ramp(segment: &Segment, name: &str, profile: RampProfile) -> Result<Segment, EvolutionError> {
    if !(profile.min() > 0.0) {
        return Err(EvolutionError::BadRamp("profile must be strictly positive".into()));
    }
    let tau = segment.effective_time();
    let duration = tau / profile.mean();
    let ramp = if profile.is_constant() && profile.points[0].1 == 1.0 {
        None
    } else {
        Some(Ramp { name: name.to_string(), profile })
    };
    Ok(Segment { hamiltonian: segment.hamiltonian.clone(), duration, global_phase: segment.global_phase, ramp })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub qubits: usize,
    pub segments: Vec<Segment>,
    pub cycles: Cycles,
}

impl Schedule {
    pub fn new(qubits: usize, segments: Vec<Segment>, cycles: Cycles) -> Result<Self, EvolutionError> {
        let s = Self { qubits, segments, cycles };
        s.validate()?;
        Ok(s)
    }

    pub fn single(segment: Segment) -> Result<Self, EvolutionError> {
        let q = segment.hamiltonian.qubits;
        Self::new(q, vec![segment], Cycles::ONE)
    }

    pub fn validate(&self) -> Result<(), EvolutionError> {
        if self.segments.is_empty() {
            return Err(EvolutionError::EmptySchedule);
        }
        for (index, seg) in self.segments.iter().enumerate() {
            if seg.hamiltonian.qubits != self.qubits {
                return Err(EvolutionError::QubitMismatch {
                    index,
                    expected: self.qubits,
                    got: seg.hamiltonian.qubits,
                });
            }
            if !(seg.duration > 0.0) || !seg.duration.is_finite() {
                return Err(EvolutionError::BadDuration { index, value: seg.duration });
            }
        }
        if !self.cycles.is_whole() {
            let n = self.segments.len();
            if n % 2 != 0 || self.segments[..n / 2] != self.segments[n / 2..] {
                return Err(EvolutionError::AsymmetricHalfList);
            }
        }
        Ok(())
    }

    pub fn with_cycles(&self, cycles: Cycles) -> Result<Self, EvolutionError> {
        Self::new(self.qubits, self.segments.clone(), cycles)
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    /// Segment indices in playback order.
    pub fn playback(&self) -> Vec<usize> {
        let n = self.segments.len();
        let halves = self.cycles.halves() as usize;
        let mut out: Vec<usize> = (0..halves / 2).flat_map(|_| 0..n).collect();
        if halves % 2 == 1 {
            out.extend(0..n / 2);
        }
        out
    }

    pub fn total_duration(&self) -> f64 {
        self.playback().iter().map(|&i| self.segments[i].duration).sum()
    }

    /// Copy with every global phase removed.
    pub fn bare(&self) -> Self {
        let mut out = self.clone();
        for s in &mut out.segments {
            s.global_phase = 0.0;
        }
        out
    }

    /// Copy with μ added to every segment Hamiltonian.
    pub fn gauge_shift(&self, mu: f64) -> Self {
        let mut out = self.clone();
        for s in &mut out.segments {
            s.hamiltonian = s.hamiltonian.gauge_shift(mu);
        }
        out
    }

    /// Exact U(T) as the ordered product of segment propagators.
    pub fn final_unitary(&self) -> Result<ComplexMatrix, EvolutionError> {
        self.validate()?;
        let props = self
            .segments
            .iter()
            .map(|s| s.final_unitary())
            .collect::<Result<Vec<_>, _>>()?;
        let mut u = ComplexMatrix::identity(self.dim())?;
        for i in self.playback() {
            u = &props[i] * &u;
        }
        Ok(u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    pub min_steps: usize,
    /// Largest allowed spectral phase advance per step when sampling states.
    pub max_phase_step: f64,
    pub max_steps: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self { min_steps: DEFAULT_MIN_STEPS, max_phase_step: DEFAULT_MAX_PHASE_STEP, max_steps: MAX_STEPS_PER_SEGMENT }
    }
}

impl Resolution {
    /// A fixed number of steps per segment, refined only when an invariant fails.
    pub fn fixed(steps: usize) -> Self {
        Self { min_steps: steps.max(1), max_phase_step: f64::INFINITY, max_steps: MAX_STEPS_PER_SEGMENT }
    }

    pub fn with_max_phase_step(mut self, h: f64) -> Self {
        self.max_phase_step = h;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dim: usize,
    /// Wall-clock sample times; segment boundaries are included once.
    pub times: Vec<f64>,
    pub unitaries: Option<Vec<ComplexMatrix>>,
    pub states: Option<Vec<Vec<Complex64>>>,
    /// Sample index of the end of each played segment.
    pub boundaries: Vec<usize>,
    /// Tr(H_eff)·τ for each played segment.
    pub segment_trace_phases: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// ∫ Tr(H_eff)/dim dt over the whole path.
    pub fn identity_phase(&self) -> f64 {
        self.segment_trace_phases.iter().sum::<f64>() / self.dim as f64
    }

    pub fn final_unitary(&self) -> Option<&ComplexMatrix> {
        self.unitaries.as_ref().and_then(|u| u.last())
    }

    pub fn final_state(&self) -> Option<&[Complex64]> {
        self.states.as_ref().and_then(|s| s.last()).map(|v| v.as_slice())
    }
}

struct PreparedSegment {
    eig: HermitianEig,
    trace: f64,
    spread: f64,
}

fn prepare(schedule: &Schedule) -> Result<Vec<PreparedSegment>, EvolutionError> {
    schedule
        .segments
        .iter()
        .map(|s| {
            let h = s.effective_hamiltonian();
            let eig = linalg::eig_hermitian(&h.to_matrix()?)?;
            let spread = eig.eigenvalues[eig.eigenvalues.len() - 1] - eig.eigenvalues[0];
            Ok(PreparedSegment { eig, trace: h.trace(), spread })
        })
        .collect()
}

fn phases(eig: &HermitianEig, tau: f64) -> Vec<Complex64> {
    eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -l * tau)).collect()
}

/// ψ(τ) = V (e^{-iEτ} ⊙ c), with c = V†ψ(0).
fn state_at(eig: &HermitianEig, coeffs: &[Complex64], tau: f64) -> Vec<Complex64> {
    let v = &eig.eigenvectors;
    let n = v.dim();
    let ph: Vec<Complex64> = phases(eig, tau).iter().zip(coeffs).map(|(p, c)| p * c).collect();
    (0..n).map(|i| (0..n).map(|k| v[(i, k)] * ph[k]).sum()).collect()
}

fn sample_segment_states(
    seg: &Segment,
    prep: &PreparedSegment,
    start: &[Complex64],
    steps: usize,
) -> Option<Vec<Vec<Complex64>>> {
    let v = &prep.eig.eigenvectors;
    let n = v.dim();
    let coeffs: Vec<Complex64> = (0..n).map(|k| (0..n).map(|i| v[(i, k)].conj() * start[i]).sum()).collect();
    let mut out = Vec::with_capacity(steps);
    let mut prev = start.to_vec();
    for j in 1..=steps {
        let t = seg.duration * j as f64 / steps as f64;
        let psi = state_at(&prep.eig, &coeffs, seg.clock_at(t));
        if linalg::inner(&prev, &psi).norm() <= MIN_OVERLAP {
            return None;
        }
        prev = psi.clone();
        out.push(psi);
    }
    Some(out)
}

fn initial_steps(seg: &Segment, prep: &PreparedSegment, res: &Resolution, states: bool) -> usize {
    let max_clock_rate = seg.max_strength();
    let mut n = res.min_steps as f64;
    // Keep the determinant phase step well under the unwrapping limit.
    n = n.max((prep.trace.abs() * seg.duration * max_clock_rate / (MAX_DET_STEP / 2.0)).ceil());
    if states && res.max_phase_step.is_finite() {
        n = n.max((prep.spread * seg.duration * max_clock_rate / res.max_phase_step).ceil());
    }
    n.min(usize::MAX as f64) as usize
}

/// Samples the schedule. Unitaries are kept when `keep_unitaries`; a state
/// path is kept when `psi0` is given.
pub fn sample(
    schedule: &Schedule,
    psi0: Option<&[Complex64]>,
    keep_unitaries: bool,
    res: &Resolution,
) -> Result<Trajectory, EvolutionError> {
    schedule.validate()?;
    let dim = schedule.dim();
    if let Some(p) = psi0 {
        if p.len() != dim {
            return Err(EvolutionError::StateLength { expected: dim, got: p.len() });
        }
        let nrm = linalg::norm(p);
        if (nrm - 1.0).abs() > 1e-10 {
            return Err(EvolutionError::NotNormalized(nrm));
        }
    }
    let prepared = prepare(schedule)?;
    let mut times = vec![0.0];
    let mut unitaries = keep_unitaries.then(|| vec![ComplexMatrix::identity(dim).expect("valid dim")]);
    let mut states = psi0.map(|p| vec![p.to_vec()]);
    let mut boundaries = Vec::new();
    let mut trace_phases = Vec::new();
    let mut u_start = ComplexMatrix::identity(dim)?;
    let mut psi_start = psi0.map(|p| p.to_vec());
    let mut t0 = 0.0;
    for idx in schedule.playback() {
        let seg = &schedule.segments[idx];
        let prep = &prepared[idx];
        let mut steps = initial_steps(seg, prep, res, psi0.is_some());
        let seg_states = loop {
            if steps > res.max_steps {
                return Err(EvolutionError::StepControl { segment: idx, steps });
            }
            match &psi_start {
                Some(p) => match sample_segment_states(seg, prep, p, steps) {
                    Some(s) => break Some(s),
                    None => steps *= 2,
                },
                None => break None,
            }
        };
        for j in 1..=steps {
            let t = seg.duration * j as f64 / steps as f64;
            times.push(t0 + t);
            if let Some(us) = unitaries.as_mut() {
                let u = linalg::spectral_exp(&prep.eig, seg.clock_at(t));
                us.push(&u * &u_start);
            }
        }
        if let (Some(all), Some(new)) = (states.as_mut(), seg_states) {
            psi_start = new.last().cloned();
            all.extend(new);
        }
        u_start = &linalg::spectral_exp(&prep.eig, seg.effective_time()) * &u_start;
        t0 += seg.duration;
        boundaries.push(times.len() - 1);
        trace_phases.push(prep.trace * seg.effective_time());
    }
    Ok(Trajectory { dim, times, unitaries, states, boundaries, segment_trace_phases: trace_phases })
}

pub fn propagate(schedule: &Schedule, res: &Resolution) -> Result<Trajectory, EvolutionError> {
    sample(schedule, None, true, res)
}

pub fn evolve_state(schedule: &Schedule, psi0: &[Complex64], res: &Resolution) -> Result<Trajectory, EvolutionError> {
    sample(schedule, Some(psi0), false, res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn basis(k: usize) -> Vec<Complex64> {
        let mut v = vec![c(0.0, 0.0); 4];
        v[k] = c(1.0, 0.0);
        v
    }

    fn swap() -> ComplexMatrix {
        ComplexMatrix::from_real(4, &[1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 1.]).unwrap()
    }

    fn swap1() -> Schedule {
        Schedule::single(Segment::new(pauli::heisenberg(1.0), PI / 4.0).with_global_phase(PI / 4.0)).unwrap()
    }

    #[test]
    fn cycles_parse_and_display() {
        assert_eq!("1/2".parse::<Cycles>().unwrap(), Cycles::HALF);
        assert_eq!("2".parse::<Cycles>().unwrap(), Cycles::TWO);
        assert_eq!("4/2".parse::<Cycles>().unwrap(), Cycles::TWO);
        assert_eq!("3/2".parse::<Cycles>().unwrap().to_string(), "3/2");
        assert!("1/3".parse::<Cycles>().is_err());
        assert!("0".parse::<Cycles>().is_err());
        assert!("x".parse::<Cycles>().is_err());
    }

    #[test]
    fn swap1_segment_realizes_swap() {
        let traj = propagate(&swap1(), &Resolution::default()).unwrap();
        assert!(traj.final_unitary().unwrap().distance(&swap()) < 1e-12);
        assert!(swap1().final_unitary().unwrap().distance(&swap()) < 1e-12);
    }

    #[test]
    fn three_cross_resonance_segments_swap() {
        let w = 1.0;
        let t = PI / (2.0 * w);
        let segs = vec![
            Segment::new(pauli::cross_resonance(w), t),
            Segment::new(pauli::cross_resonance_reversed(w), t),
            Segment::new(pauli::cross_resonance(w), t),
        ];
        let s = Schedule::new(2, segs, Cycles::ONE).unwrap();
        let u = propagate(&s, &Resolution::default()).unwrap();
        assert!(u.final_unitary().unwrap().distance_up_to_phase(&swap()) < 1e-10);
    }

    #[test]
    fn empty_schedule_rejected() {
        assert_eq!(Schedule::new(2, vec![], Cycles::ONE).unwrap_err(), EvolutionError::EmptySchedule);
        let bad = Segment::new(pauli::heisenberg(1.0), 0.0);
        assert!(matches!(Schedule::single(bad), Err(EvolutionError::BadDuration { .. })));
    }

    #[test]
    fn half_cycle_requires_symmetric_list() {
        let a = Segment::new(pauli::heisenberg(1.0), 1.0);
        let b = Segment::new(pauli::cross_resonance(1.0), 1.0);
        assert!(Schedule::new(2, vec![a.clone(), b.clone()], Cycles::HALF).is_err());
        let s = Schedule::new(2, vec![a.clone(), b.clone(), a, b], Cycles::from_halves(3).unwrap()).unwrap();
        assert_eq!(s.playback(), vec![0, 1, 2, 3, 0, 1]);
    }

    #[test]
    fn swap_fixes_00() {
        let traj = evolve_state(&swap1(), &basis(0), &Resolution::default()).unwrap();
        let f = traj.final_state().unwrap();
        assert!((linalg::inner(&basis(0), f).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        let s = Schedule::single(Segment::new(pauli::cross_resonance(1.0), PI / 2.0)).unwrap();
        let traj = evolve_state(&s, &basis(2), &Resolution::default()).unwrap();
        let f = traj.final_state().unwrap();
        assert!((f[3].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_state_returns_under_swap_squared() {
        let s = swap1().with_cycles(Cycles::TWO).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let psi = vec![c(0.0, 0.0), c(r, 0.0), c(r, 0.0), c(0.0, 0.0)];
        let traj = evolve_state(&s, &psi, &Resolution::default()).unwrap();
        assert!((linalg::inner(&psi, traj.final_state().unwrap()).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn repetition_squares_unitary() {
        let seg = Segment::new(pauli::entangling(0.3, -0.7, 1.1).gauge_shift(0.2), 1.3);
        let s1 = Schedule::single(seg).unwrap();
        let s2 = s1.with_cycles(Cycles::TWO).unwrap();
        let u1 = propagate(&s1, &Resolution::default()).unwrap();
        let u2 = propagate(&s2, &Resolution::default()).unwrap();
        let sq = u1.final_unitary().unwrap() * u1.final_unitary().unwrap();
        assert!(u2.final_unitary().unwrap().distance(&sq) < 1e-9);
    }

    #[test]
    fn determinant_law_within_segment() {
        let seg = Segment::new(pauli::heisenberg(1.0).gauge_shift(0.37), 2.0);
        let s = Schedule::single(seg).unwrap();
        let traj = propagate(&s, &Resolution::fixed(64)).unwrap();
        for (t, u) in traj.times.iter().zip(traj.unitaries.as_ref().unwrap()) {
            let want = Complex64::from_polar(1.0, -4.0 * 0.37 * t);
            assert!((u.det() - want).norm() < 1e-9);
        }
    }

    #[test]
    fn constant_ramp_is_identity_transform() {
        let seg = Segment::new(pauli::heisenberg(1.0), 0.5);
        let r = apply_ramp(&seg, "const", RampProfile::constant()).unwrap();
        assert_eq!(r, seg);
    }

    #[test]
    fn tent_ramp_preserves_final_unitary() {
        let seg = Segment::new(pauli::heisenberg(1.0), PI / 4.0).with_global_phase(PI / 4.0);
        let ramped = apply_ramp(&seg, "tent", RampProfile::tent()).unwrap();
        assert!(ramped.duration > seg.duration);
        let a = propagate(&Schedule::single(seg).unwrap(), &Resolution::default()).unwrap();
        let b = propagate(&Schedule::single(ramped).unwrap(), &Resolution::default()).unwrap();
        assert!(a.final_unitary().unwrap().distance(b.final_unitary().unwrap()) < 1e-9);
    }

    #[test]
    fn ramp_profile_validation() {
        assert!(RampProfile::new(vec![(0.0, 1.0), (1.0, 0.0)]).is_err());
        assert!(RampProfile::new(vec![(0.0, 1.0)]).is_err());
        assert!(RampProfile::new(vec![(0.0, 1.0), (0.5, 1.0), (0.4, 1.0), (1.0, 1.0)]).is_err());
        assert!((RampProfile::tent().mean() - 0.55).abs() < 1e-15);
        assert!((RampProfile::tent().clock(0.5) - 0.275).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_state_rejected() {
        let v = vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(matches!(evolve_state(&swap1(), &v, &Resolution::default()), Err(EvolutionError::NotNormalized(_))));
    }

    #[test]
    fn boundaries_and_times() {
        let seg = Segment::new(pauli::heisenberg(1.0), 1.0);
        let s = Schedule::new(2, vec![seg.clone(), seg], Cycles::ONE).unwrap();
        let traj = propagate(&s, &Resolution::fixed(10)).unwrap();
        assert_eq!(traj.boundaries, vec![10, 20]);
        assert_eq!(traj.len(), 21);
        assert!((traj.times[20] - 2.0).abs() < 1e-15);
    }
}
