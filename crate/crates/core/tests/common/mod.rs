#![allow(dead_code)]

use num_complex::Complex64;
use qgtop::evolution::{Cycles, Schedule, Segment};
use qgtop::pauli::{HamiltonianSpec, PauliString};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> =
            (0..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let n = qgtop::linalg::norm(&v);
        if n > 1e-3 {
            return v.iter().map(|z| z / n).collect();
        }
    }
}

/// Random single-qubit terms on both qubits of a two-qubit register.
pub fn random_local<R: Rng>(rng: &mut R, scale: f64) -> HamiltonianSpec {
    let mut h = HamiltonianSpec::new(2).unwrap();
    for s in ["XI", "YI", "ZI", "IX", "IY", "IZ"] {
        h.push_term(rng.gen_range(-scale..scale), s.parse::<PauliString>().unwrap()).unwrap();
    }
    h
}

pub fn random_entangling<R: Rng>(rng: &mut R) -> HamiltonianSpec {
    let mut h = random_local(rng, 1.0);
    for s in ["XX", "YY", "ZZ"] {
        h.push_term(rng.gen_range(-1.0..1.0), s.parse::<PauliString>().unwrap()).unwrap();
    }
    h
}

/// Two qubits, one to five segments of entangling plus local terms, durations in [0.1, 5].
pub fn random_schedule<R: Rng>(rng: &mut R) -> Schedule {
    let n = rng.gen_range(1..=5);
    let segments = (0..n).map(|_| Segment::new(random_entangling(rng), rng.gen_range(0.1..5.0))).collect();
    Schedule::new(2, segments, Cycles::ONE).unwrap()
}

pub fn random_local_schedule<R: Rng>(rng: &mut R) -> Schedule {
    let n = rng.gen_range(1..=5);
    let segments = (0..n).map(|_| Segment::new(random_local(rng, 1.0), rng.gen_range(0.1..5.0))).collect();
    Schedule::new(2, segments, Cycles::ONE).unwrap()
}

pub fn random_circuit_text<R: Rng>(rng: &mut R) -> String {
    let qubits = rng.gen_range(1..=3);
    let mut s = format!("qubits {qubits}\n");
    for _ in 0..rng.gen_range(1..=4) {
        s += &format!("segment duration={}", rng.gen_range(0.01..10.0));
        if rng.gen_bool(0.5) {
            s += &format!(" global_phase={}", rng.gen_range(-4.0..4.0));
        }
        match rng.gen_range(0..4) {
            0 => s += " ramp=tent",
            1 => s += " ramp=trapezoid",
            2 => s += " ramp=const",
            _ => {}
        }
        s.push('\n');
        for _ in 0..rng.gen_range(1..=5) {
            let p: String = (0..qubits).map(|_| ['I', 'X', 'Y', 'Z'][rng.gen_range(0..4)]).collect();
            s += &format!("term {} {p}\n", rng.gen_range(-3.0..3.0));
        }
    }
    if rng.gen_bool(0.5) {
        s += &format!("cycles {}\n", rng.gen_range(1..4));
    }
    s
}
