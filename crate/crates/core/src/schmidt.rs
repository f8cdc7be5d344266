//! Two-qubit pure-state entanglement in Schmidt-sphere coordinates.
//!
//! A state is written as
//! e^{iχ}[cos(α/2)e^{-iβ/2}|n̂₁,n̂₂⟩ + sin(α/2)e^{iβ/2}|−n̂₁,−n̂₂⟩] with
//! |n̂⟩ = cos(θ/2)e^{-iφ/2}|0⟩ + sin(θ/2)e^{iφ/2}|1⟩ and
//! |−n̂⟩ = −sin(θ/2)e^{-iφ/2}|0⟩ + cos(θ/2)e^{iφ/2}|1⟩.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::evolution::Trajectory;
use crate::linalg::{self, principal_arg};

pub const SINGULARITY_MARGIN: f64 = 1e-6;
const TWO_PI: f64 = 2.0 * PI;
const DEGENERATE_GAP: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchmidtError {
    #[error("expected 4 amplitudes, got {0}")]
    WrongDimension(usize),
    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("trajectory carries no states")]
    MissingStates,
    #[error("closed form inapplicable, use geometric_phase: {reason} at sample {sample}")]
    Singular { sample: usize, reason: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchmidtForm {
    pub alpha: f64,
    pub beta: f64,
    pub theta1: f64,
    pub phi1: f64,
    pub theta2: f64,
    pub phi2: f64,
    pub global_phase: f64,
    /// α = 0, β carries no information and is set to 0.
    pub product: bool,
    /// α = π/2, the Schmidt basis was fixed by convention.
    pub maximal: bool,
    /// n̂₁ or n̂₂ sits on a pole and its φ was set to 0.
    pub polar: [bool; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchmidtVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

fn check_state(psi: &[Complex64]) -> Result<(), SchmidtError> {
    if psi.len() != 4 {
        return Err(SchmidtError::WrongDimension(psi.len()));
    }
    let n = linalg::norm(psi);
    if (n - 1.0).abs() > 1e-9 {
        return Err(SchmidtError::NotNormalized(n));
    }
    Ok(())
}

/// 2|ad − bc|, the Wootters concurrence of a pure two-qubit state.
pub fn concurrence(psi: &[Complex64]) -> Result<f64, SchmidtError> {
    if psi.len() != 4 {
        return Err(SchmidtError::WrongDimension(psi.len()));
    }
    Ok((2.0 * (psi[0] * psi[3] - psi[1] * psi[2]).norm()).min(1.0))
}

pub fn up_ket(theta: f64, phi: f64) -> [Complex64; 2] {
    [
        Complex64::from_polar((theta / 2.0).cos(), -phi / 2.0),
        Complex64::from_polar((theta / 2.0).sin(), phi / 2.0),
    ]
}

pub fn down_ket(theta: f64, phi: f64) -> [Complex64; 2] {
    [
        Complex64::from_polar(-(theta / 2.0).sin(), -phi / 2.0),
        Complex64::from_polar((theta / 2.0).cos(), phi / 2.0),
    ]
}

fn product(a: &[Complex64; 2], b: &[Complex64; 2]) -> [Complex64; 4] {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

/// Bloch angles of a single-qubit ket, φ wrapped into [0, 2π).
fn bloch_angles(v: [Complex64; 2]) -> (f64, f64, bool) {
    let n2 = v[0].norm_sqr() + v[1].norm_sqr();
    let z = (v[0].norm_sqr() - v[1].norm_sqr()) / n2;
    let xy = v[0].conj() * v[1] / n2;
    let r = 2.0 * xy.norm();
    if r < 1e-12 {
        return (if z > 0.0 { 0.0 } else { PI }, 0.0, true);
    }
    (r.atan2(z), xy.arg().rem_euclid(TWO_PI), false)
}

/// Schmidt decomposition with the larger weight on |n̂₁,n̂₂⟩, so α ∈ [0, π/2].
pub fn schmidt_decompose(psi: &[Complex64]) -> Result<SchmidtForm, SchmidtError> {
    check_state(psi)?;
    let (a, b, c, d) = (psi[0], psi[1], psi[2], psi[3]);
    // M M† for M = [[a, b], [c, d]] (rows: qubit 1).
    let p = a.norm_sqr() + b.norm_sqr();
    let q = c.norm_sqr() + d.norm_sqr();
    let r = a * c.conj() + b * d.conj();
    let gap = ((p - q).powi(2) + 4.0 * r.norm_sqr()).sqrt();
    let maximal = gap < DEGENERATE_GAP;
    let u = if maximal {
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
    } else {
        let top = 0.5 * (p + q + gap);
        // Eigenvector of [[p, r], [r*, q]] for the larger eigenvalue.
        let cand1 = [r, Complex64::new(top - p, 0.0)];
        let cand2 = [Complex64::new(top - q, 0.0), r.conj()];
        let n1 = cand1[0].norm_sqr() + cand1[1].norm_sqr();
        let n2 = cand2[0].norm_sqr() + cand2[1].norm_sqr();
        if n1 > n2 { cand1 } else { cand2 }
    };
    let v = [u[0].conj() * a + u[1].conj() * c, u[0].conj() * b + u[1].conj() * d];
    let (theta1, phi1, polar1) = bloch_angles(u);
    let (theta2, phi2, polar2) = if v[0].norm_sqr() + v[1].norm_sqr() < 1e-24 {
        (0.0, 0.0, true)
    } else {
        bloch_angles(v)
    };
    let up = product(&up_ket(theta1, phi1), &up_ket(theta2, phi2));
    let down = product(&down_ket(theta1, phi1), &down_ket(theta2, phi2));
    let c_up = linalg::inner(&up, psi);
    let c_down = linalg::inner(&down, psi);
    let alpha = 2.0 * c_down.norm().atan2(c_up.norm());
    let product_state = c_down.norm() < 1e-12;
    let beta = if product_state { 0.0 } else { (c_down.arg() - c_up.arg()).rem_euclid(TWO_PI) };
    let global = if product_state { c_up.arg() } else { c_up.arg() + beta / 2.0 };
    Ok(SchmidtForm {
        alpha: alpha.min(FRAC_PI_2),
        beta,
        theta1,
        phi1,
        theta2,
        phi2,
        global_phase: global,
        product: product_state,
        maximal,
        polar: [polar1, polar2],
    })
}

/// State rebuilt from its coordinates, without the global phase.
pub fn representative(alpha: f64, beta: f64, theta1: f64, phi1: f64, theta2: f64, phi2: f64) -> [Complex64; 4] {
    let up = product(&up_ket(theta1, phi1), &up_ket(theta2, phi2));
    let down = product(&down_ket(theta1, phi1), &down_ket(theta2, phi2));
    let cu = Complex64::from_polar((alpha / 2.0).cos(), -beta / 2.0);
    let cd = Complex64::from_polar((alpha / 2.0).sin(), beta / 2.0);
    [0, 1, 2, 3].map(|k| cu * up[k] + cd * down[k])
}

impl SchmidtForm {
    pub fn reconstruct(&self) -> [Complex64; 4] {
        let rep = representative(self.alpha, self.beta, self.theta1, self.phi1, self.theta2, self.phi2);
        let g = Complex64::from_polar(1.0, self.global_phase);
        rep.map(|z| z * g)
    }

    pub fn concurrence(&self) -> f64 {
        self.alpha.sin()
    }

    pub fn bloch1(&self) -> [f64; 3] {
        bloch_vector(self.theta1, self.phi1)
    }

    pub fn bloch2(&self) -> [f64; 3] {
        bloch_vector(self.theta2, self.phi2)
    }
}

pub fn bloch_vector(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

pub fn schmidt_vector(form: &SchmidtForm) -> SchmidtVector {
    SchmidtVector {
        x: form.alpha.sin() * form.beta.cos(),
        y: form.alpha.sin() * form.beta.sin(),
        z: form.alpha.cos(),
    }
}

/// ⟨Σ̃⟩ evaluated directly from the operators built on |⇑⟩ = |n̂₁n̂₂⟩, |⇓⟩ = |−n̂₁,−n̂₂⟩.
pub fn sigma_tilde_expectation(psi: &[Complex64], form: &SchmidtForm) -> SchmidtVector {
    let up = product(&up_ket(form.theta1, form.phi1), &up_ket(form.theta2, form.phi2));
    let down = product(&down_ket(form.theta1, form.phi1), &down_ket(form.theta2, form.phi2));
    let pu = linalg::inner(&up, psi);
    let pd = linalg::inner(&down, psi);
    let cross = pu.conj() * pd;
    SchmidtVector { x: 2.0 * cross.re, y: 2.0 * cross.im, z: pu.norm_sqr() - pd.norm_sqr() }
}

/// Nearest-branch continuation of an angle sequence.
fn unwrap_angles(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    for (k, &v) in values.iter().enumerate() {
        if k == 0 {
            out.push(v);
        } else {
            let prev: f64 = out[k - 1];
            out.push(prev + linalg::wrap_phase(v - prev));
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Track {
    Regular,
    Pinned,
}

fn classify(values: &[f64], low: f64, high: f64, margin: f64) -> Result<Track, usize> {
    let near = |x: f64| x < low + margin || x > high - margin;
    if values.iter().all(|&x| !near(x)) {
        Ok(Track::Regular)
    } else if values.iter().all(|&x| near(x)) && values.iter().all(|&x| (x - values[0]).abs() < margin) {
        Ok(Track::Pinned)
    } else {
        Err(values.iter().position(|&x| near(x)).unwrap_or(0))
    }
}

/// Polar distance below which a path is moved to another frame.
const POLE_CLEARANCE: f64 = 0.1;
const FRAME_AXES: usize = 64;
/// Largest turn of n̂ between samples before the path counts as discontinuous.
const MAX_AXIS_STEP: f64 = 0.25;

/// SU(2) matrix taking the Bloch axis `a` to +z.
fn frame_to_z(a: [f64; 3]) -> [Complex64; 4] {
    let (x, y) = (a[1], -a[0]);
    let s = (x * x + y * y).sqrt();
    if s < 1e-15 {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        return if a[2] > 0.0 { [one, zero, zero, one] } else { [zero, -one, one, zero] };
    }
    let half = 0.5 * a[2].clamp(-1.0, 1.0).acos();
    let (c, sn) = (half.cos(), half.sin());
    let (nx, ny) = (x / s, y / s);
    // cos I − i sin (nx X + ny Y)
    [
        Complex64::new(c, 0.0),
        Complex64::new(-sn * ny, -sn * nx),
        Complex64::new(sn * ny, -sn * nx),
        Complex64::new(c, 0.0),
    ]
}

fn fibonacci_axes(n: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (k as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * k as f64;
            [r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

fn clearance(path: &[[f64; 3]], axis: [f64; 3]) -> f64 {
    path.iter()
        .map(|n| {
            let t = (n[0] * axis[0] + n[1] * axis[1] + n[2] * axis[2]).clamp(-1.0, 1.0).acos();
            t.min(PI - t)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Axis whose polar cap the path avoids best; `None` when +z already does.
fn best_axis(path: &[[f64; 3]]) -> Option<[f64; 3]> {
    if clearance(path, [0.0, 0.0, 1.0]) >= POLE_CLEARANCE {
        return None;
    }
    fibonacci_axes(FRAME_AXES)
        .into_iter()
        .map(|a| (clearance(path, a), a))
        .max_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(_, a)| a)
}

fn apply_local(r1: &[Complex64; 4], r2: &[Complex64; 4], psi: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + j] += r1[2 * i + k] * r2[2 * j + l] * psi[2 * k + l];
                }
            }
        }
    }
    out
}

/// γ from the Schmidt-sphere parameters of a state path, integrated by the
/// trapezoid rule, plus the endpoint term of the unwrapped representative.
///
/// When n̂₁ or n̂₂ moves near a pole of the computational frame, the path is
/// first carried to a fixed local frame that keeps it clear of the poles;
/// γ does not depend on that choice. Paths through α = π/2 are
/// rejected.
pub fn gamma_closed_form(traj: &Trajectory, margin: f64) -> Result<f64, SchmidtError> {
    let states = traj.states.as_ref().ok_or(SchmidtError::MissingStates)?;
    let forms = states.iter().map(|s| schmidt_decompose(s)).collect::<Result<Vec<_>, _>>()?;
    let moving = |path: &[[f64; 3]]| path.iter().any(|n| (0..3).any(|i| (n[i] - path[0][i]).abs() > margin));
    let n1: Vec<[f64; 3]> = forms.iter().map(|f| f.bloch1()).collect();
    let n2: Vec<[f64; 3]> = forms.iter().map(|f| f.bloch2()).collect();
    // Passing close to α = π/2 swaps the Schmidt ordering and flips n̂ to −n̂.
    for path in [&n1, &n2] {
        if let Some(k) = path.windows(2).position(|w| {
            let dot: f64 = (0..3).map(|i| w[0][i] * w[1][i]).sum();
            dot.clamp(-1.0, 1.0).acos() > MAX_AXIS_STEP
        }) {
            if !forms[k].product && !forms[k + 1].product {
                return Err(SchmidtError::Singular { sample: k, reason: "Schmidt axes jump near α = π/2" });
            }
        }
    }
    let a1 = if moving(&n1) { best_axis(&n1) } else { None };
    let a2 = if moving(&n2) { best_axis(&n2) } else { None };
    if a1.is_none() && a2.is_none() {
        return closed_form_in_frame(&forms, margin);
    }
    let r1 = frame_to_z(a1.unwrap_or([0.0, 0.0, 1.0]));
    let r2 = frame_to_z(a2.unwrap_or([0.0, 0.0, 1.0]));
    let forms = states
        .iter()
        .map(|s| schmidt_decompose(&apply_local(&r1, &r2, s)))
        .collect::<Result<Vec<_>, _>>()?;
    closed_form_in_frame(&forms, margin)
}

fn closed_form_in_frame(forms: &[SchmidtForm], margin: f64) -> Result<f64, SchmidtError> {
    let alphas: Vec<f64> = forms.iter().map(|f| f.alpha).collect();
    let separable = alphas.iter().all(|&a| a < margin);
    // Near α = 0 a jump in β only moves the representative's phase, and the
    // trapezoid step ½ cos α Δβ accounts for it. Near α = π/2 the Schmidt
    // basis itself is undefined.
    if let Some(k) = alphas.iter().position(|&a| a > FRAC_PI_2 - margin) {
        return Err(SchmidtError::Singular { sample: k, reason: "α near π/2" });
    }
    let t1: Vec<f64> = forms.iter().map(|f| f.theta1).collect();
    let t2: Vec<f64> = forms.iter().map(|f| f.theta2).collect();
    let track1 = classify(&t1, 0.0, PI, margin).map_err(|k| SchmidtError::Singular { sample: k, reason: "n̂₁ near a pole" })?;
    let track2 = classify(&t2, 0.0, PI, margin).map_err(|k| SchmidtError::Singular { sample: k, reason: "n̂₂ near a pole" })?;
    let pin = |v: &[f64], track: Track| -> Vec<f64> {
        match track {
            Track::Regular => v.to_vec(),
            Track::Pinned => vec![if v[0] < FRAC_PI_2 { 0.0 } else { PI }; v.len()],
        }
    };
    let t1 = pin(&t1, track1);
    let t2 = pin(&t2, track2);
    let alphas = if separable { vec![0.0; alphas.len()] } else { alphas };
    let beta = if separable {
        vec![0.0; forms.len()]
    } else {
        unwrap_angles(&forms.iter().map(|f| f.beta).collect::<Vec<_>>())
    };
    let phi_track = |sel: fn(&SchmidtForm) -> f64, track: Track| -> Vec<f64> {
        match track {
            Track::Regular => unwrap_angles(&forms.iter().map(sel).collect::<Vec<_>>()),
            Track::Pinned => vec![0.0; forms.len()],
        }
    };
    let p1 = phi_track(|f| f.phi1, track1);
    let p2 = phi_track(|f| f.phi2, track2);
    let mut integral = 0.0;
    for k in 0..forms.len() - 1 {
        let ca = 0.5 * (alphas[k].cos() + alphas[k + 1].cos());
        let w1 = 0.5 * (alphas[k].cos() * t1[k].cos() + alphas[k + 1].cos() * t1[k + 1].cos());
        let w2 = 0.5 * (alphas[k].cos() * t2[k].cos() + alphas[k + 1].cos() * t2[k + 1].cos());
        integral += ca * (beta[k + 1] - beta[k]) + w1 * (p1[k + 1] - p1[k]) + w2 * (p2[k + 1] - p2[k]);
    }
    let n = forms.len() - 1;
    let start = representative(alphas[0], beta[0], t1[0], p1[0], t2[0], p2[0]);
    let end = representative(alphas[n], beta[n], t1[n], p1[n], t2[n], p2[n]);
    Ok(0.5 * integral + principal_arg(linalg::inner(&start, &end)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn state(v: [(f64, f64); 4]) -> Vec<Complex64> {
        v.iter().map(|&(r, i)| c(r, i)).collect()
    }

    fn distance_up_to_phase(a: &[Complex64], b: &[Complex64]) -> f64 {
        let ov = linalg::inner(a, b).norm();
        (2.0 - 2.0 * ov).max(0.0).sqrt()
    }

    #[test]
    fn concurrence_examples() {
        let r = FRAC_1_SQRT_2;
        assert!((concurrence(&state([(r, 0.), (0., 0.), (0., 0.), (r, 0.)])).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(concurrence(&state([(0., 0.), (1., 0.), (0., 0.), (0., 0.)])).unwrap(), 0.0);
        let psi = state([(0.6, 0.), (0., 0.), (0., 0.), (0.8, 0.)]);
        assert!((concurrence(&psi).unwrap() - 0.96).abs() < 1e-15);
        // Θ = (σy⊗σy)K evaluated directly.
        let yy = [c(0., 0.), c(0., 0.), c(0., 0.), c(-1., 0.), c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.),
                  c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)];
        let conj: Vec<Complex64> = psi.iter().map(|z| z.conj()).collect();
        let theta_psi: Vec<Complex64> = (0..4).map(|i| (0..4).map(|j| yy[i * 4 + j] * conj[j]).sum()).collect();
        assert!((linalg::inner(&psi, &theta_psi).norm() - 0.96).abs() < 1e-15);
        assert!(concurrence(&[c(1., 0.)]).is_err());
    }

    #[test]
    fn decompose_unequal_weights() {
        let psi = state([(0.6, 0.), (0., 0.), (0., 0.), (0.8, 0.)]);
        let f = schmidt_decompose(&psi).unwrap();
        assert!((f.alpha - 2.0 * 0.8f64.acos()).abs() < 1e-12);
        assert!((f.alpha - 1.2870022175865687).abs() < 1e-12);
        assert!((f.theta1 - PI).abs() < 1e-12 && (f.theta2 - PI).abs() < 1e-12);
        assert!((f.alpha.sin() - 0.96).abs() < 1e-12);
        assert!(distance_up_to_phase(&f.reconstruct(), &psi) < 1e-12);
    }

    #[test]
    fn decompose_product_and_bell() {
        let f = schmidt_decompose(&state([(1., 0.), (0., 0.), (0., 0.), (0., 0.)])).unwrap();
        assert_eq!((f.alpha, f.beta, f.theta1, f.theta2), (0.0, 0.0, 0.0, 0.0));
        assert!(f.product);
        let r = FRAC_1_SQRT_2;
        let f = schmidt_decompose(&state([(r, 0.), (0., 0.), (0., 0.), (r, 0.)])).unwrap();
        assert!((f.alpha - FRAC_PI_2).abs() < 1e-12);
        assert!(f.beta.abs() < 1e-12);
        assert!(f.maximal);
        assert_eq!(f.theta1, 0.0);
    }

    #[test]
    fn schmidt_vector_examples() {
        let mut f = schmidt_decompose(&state([(1., 0.), (0., 0.), (0., 0.), (0., 0.)])).unwrap();
        let v = schmidt_vector(&f);
        assert_eq!((v.x, v.y, v.z), (0.0, 0.0, 1.0));
        f.alpha = FRAC_PI_2;
        let v = schmidt_vector(&f);
        assert!((v.x - 1.0).abs() < 1e-15 && v.y.abs() < 1e-15 && v.z.abs() < 1e-15);
        f.alpha = PI / 4.0;
        f.beta = FRAC_PI_2;
        let v = schmidt_vector(&f);
        assert!(v.x.abs() < 1e-15 && (v.y - FRAC_1_SQRT_2).abs() < 1e-15 && (v.z - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn sigma_tilde_matches_pauli_form() {
        // Anchored on |00⟩, |11⟩: Σ̃ = (½(XX − YY), ½(XY + YX), ½(ZI + IZ)).
        use crate::pauli::HamiltonianSpec;
        let alpha = PI / 4.0;
        let beta = FRAC_PI_2;
        let psi: Vec<Complex64> = representative(alpha, beta, 0.0, 0.0, 0.0, 0.0).to_vec();
        let op = |terms: &[(f64, &str)]| {
            let mut s = HamiltonianSpec::new(2).unwrap();
            for (c, p) in terms {
                s = s.with_term(*c, p).unwrap();
            }
            let m = s.to_matrix().unwrap();
            linalg::inner(&psi, &m.mat_vec(&psi)).re
        };
        let x = op(&[(0.5, "XX"), (-0.5, "YY")]);
        let y = op(&[(0.5, "XY"), (0.5, "YX")]);
        let z = op(&[(0.5, "ZI"), (0.5, "IZ")]);
        assert!(x.abs() < 1e-15);
        assert!((y - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((z - FRAC_1_SQRT_2).abs() < 1e-15);
        let f = schmidt_decompose(&psi).unwrap();
        let direct = sigma_tilde_expectation(&psi, &f);
        let formula = schmidt_vector(&f);
        assert!((direct.x - formula.x).abs() < 1e-12);
        assert!((direct.y - formula.y).abs() < 1e-12);
        assert!((direct.z - formula.z).abs() < 1e-12);
    }

    #[test]
    fn ket_basis_is_orthonormal() {
        let u = up_ket(1.1, 4.0);
        let d = down_ket(1.1, 4.0);
        assert!(linalg::inner(&u, &d).norm() < 1e-15);
        assert!((linalg::norm(&u) - 1.0).abs() < 1e-15);
        // |n̂⟩ is the +1 eigenvector of n̂·σ.
        let [x, y, z] = bloch_vector(1.1, 4.0);
        let nu0 = c(z, 0.) * u[0] + c(x, -y) * u[1];
        let nu1 = c(x, y) * u[0] - c(z, 0.) * u[1];
        assert!((nu0 - u[0]).norm() < 1e-14 && (nu1 - u[1]).norm() < 1e-14);
    }

    fn path(terms: &[(f64, &str)], duration: f64, psi: &[Complex64]) -> crate::evolution::Trajectory {
        use crate::evolution::{evolve_state, Resolution, Schedule, Segment};
        use crate::pauli::HamiltonianSpec;
        let mut h = HamiltonianSpec::new(2).unwrap();
        for &(c, p) in terms {
            h = h.with_term(c, p).unwrap();
        }
        let s = Schedule::single(Segment::new(h, duration)).unwrap();
        evolve_state(&s, psi, &Resolution::default()).unwrap()
    }

    fn numeric(traj: &crate::evolution::Trajectory) -> f64 {
        crate::phase::geometric_phase(traj, crate::phase::PhaseOptions::default()).unwrap().gamma
    }

    #[test]
    fn closed_form_through_product_state() {
        // ZX for a full period takes cos|01⟩ + sin|10⟩ through separable states.
        let (a, b) = (0.3f64, 0.2f64);
        let psi = [c(0., 0.), Complex64::from_polar(a.cos(), -b), Complex64::from_polar(a.sin(), b), c(0., 0.)];
        let traj = path(&[(1.0, "ZX")], PI, &psi);
        let cf = gamma_closed_form(&traj, SINGULARITY_MARGIN).unwrap();
        assert!(linalg::wrap_phase(cf - numeric(&traj)).abs() < 1e-6);
    }

    #[test]
    fn closed_form_leaves_a_polar_frame() {
        // n̂₁ starts on +z and is rotated off it by XI.
        let psi = state([(0.8, 0.), (0., 0.), (0., 0.), (0.6, 0.)]);
        let traj = path(&[(0.7, "XI"), (0.4, "ZZ")], 2.0 * PI, &psi);
        let cf = gamma_closed_form(&traj, SINGULARITY_MARGIN).unwrap();
        assert!(linalg::wrap_phase(cf - numeric(&traj)).abs() < 1e-6);
    }

    #[test]
    fn closed_form_rejects_maximal_crossing() {
        // The exchange coupling swaps |01⟩ into |10⟩ through a Bell state.
        let psi = state([(0., 0.), (1., 0.), (0., 0.), (0., 0.)]);
        let traj = path(&[(1.0, "XX"), (1.0, "YY")], PI / 2.0, &psi);
        assert!(matches!(gamma_closed_form(&traj, SINGULARITY_MARGIN), Err(SchmidtError::Singular { .. })));
    }
}
