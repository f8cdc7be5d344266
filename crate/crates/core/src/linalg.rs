//! Dense complex linear algebra for registers of one to four qubits.
//!
//! Matrices are row-major with a power-of-two dimension between 2 and 16.
//! The Hermitian eigensolver is a cyclic complex Jacobi iteration; unitary
//! matrices are diagonalized through their Hermitian and anti-Hermitian parts.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

pub const MAX_DIM: usize = 16;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-8;

/// Relative width of a degenerate eigenvalue cluster.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Phases this close to the branch cut are reported as exactly +pi.
const BRANCH_SNAP: f64 = 1e-12;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension {0} is not a power of two in 2..=16")]
    BadDimension(usize),
    #[error("dimension overflow: {0} exceeds 16")]
    DimensionOverflow(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not Hermitian: asymmetry norm {asymmetry:.3e} (tolerance {tolerance:.0e} relative)")]
    NotHermitian { asymmetry: f64, tolerance: f64 },
    #[error("matrix is not unitary: deviation {deviation:.3e} (tolerance {tolerance:.0e})")]
    NotUnitary { deviation: f64, tolerance: f64 },
    #[error("expected {expected} entries, got {got}")]
    BadLength { expected: usize, got: usize },
}

pub fn valid_dim(dim: usize) -> bool {
    (2..=MAX_DIM).contains(&dim) && dim.is_power_of_two()
}

/// Principal argument in (-pi, pi].
pub fn principal_arg(z: Complex64) -> f64 {
    wrap_phase(z.arg())
}

/// Reduces an angle to (-pi, pi].
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    } else if y <= -PI {
        y += 2.0 * PI;
    }
    if y <= -PI + BRANCH_SNAP || y >= PI - BRANCH_SNAP {
        PI
    } else {
        y
    }
}

/// Conjugate-linear in the first argument.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalized(a: &[Complex64]) -> Vec<Complex64> {
    let n = norm(a);
    a.iter().map(|x| x / n).collect()
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({})", self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self, LinalgError> {
        if !valid_dim(dim) {
            return Err(if dim > MAX_DIM {
                LinalgError::DimensionOverflow(dim)
            } else {
                LinalgError::BadDimension(dim)
            });
        }
        Ok(Self { dim, data: vec![C0; dim * dim] })
    }

    pub fn identity(dim: usize) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = C1;
        }
        Ok(m)
    }

    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        let m = Self::zeros(dim)?;
        if data.len() != dim * dim {
            return Err(LinalgError::BadLength { expected: dim * dim, got: data.len() });
        }
        Ok(Self { dim: m.dim, data })
    }

    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self, LinalgError> {
        Self::from_row_major(dim, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn diag(values: &[Complex64]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(values.len())?;
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        Ok(m)
    }

    pub fn diag_real(values: &[f64]) -> Result<Self, LinalgError> {
        let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self, LinalgError> {
        let dim = columns.len();
        let mut m = Self::zeros(dim)?;
        for (j, col) in columns.iter().enumerate() {
            if col.len() != dim {
                return Err(LinalgError::BadLength { expected: dim, got: col.len() });
            }
            for (i, z) in col.iter().enumerate() {
                m[(i, j)] = *z;
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mat_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        (0..n)
            .map(|i| self.data[i * n..(i + 1) * n].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn kron(&self, other: &Self) -> Result<Self, LinalgError> {
        let (na, nb) = (self.dim, other.dim);
        let n = na * nb;
        if n > MAX_DIM {
            return Err(LinalgError::DimensionOverflow(n));
        }
        let mut out = Self::zeros(n)?;
        for i in 0..na {
            for j in 0..na {
                let a = self[(i, j)];
                if a == C0 {
                    continue;
                }
                for k in 0..nb {
                    for l in 0..nb {
                        out[(i * nb + k, j * nb + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(self * other)
    }

    /// ||A - A†|| / max(||A||, tiny)
    pub fn hermitian_defect(&self) -> f64 {
        let d = (self - &self.adjoint()).norm();
        d / self.norm().max(f64::MIN_POSITIVE)
    }

    /// ||A†A - I||
    pub fn unitary_defect(&self) -> f64 {
        let p = &self.adjoint() * self;
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { C1 } else { C0 };
                s += (p[(i, j)] - target).norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn det(&self) -> Complex64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = C1;
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].norm();
            for i in (k + 1)..n {
                let v = a[i * n + k].norm();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == 0.0 {
                return C0;
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in (k + 1)..n {
                let f = a[i * n + k] / pivot;
                if f == C0 {
                    continue;
                }
                for j in (k + 1)..n {
                    let akj = a[k * n + j];
                    a[i * n + j] -= f * akj;
                }
            }
        }
        det
    }

    /// min over global phases of ||A - e^{i phi} B||, Frobenius.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let overlap: Complex64 = self.data.iter().zip(&other.data).map(|(a, b)| b.conj() * a).sum();
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b * phase).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    /// Panics on mismatched dimensions; see `checked_mul`.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut data = vec![C0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C0 {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                for (out, b) in data[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *out += a * b;
                }
            }
        }
        ComplexMatrix { dim: n, data }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::diag_real(&self.eigenvalues).expect("valid dim");
        &(&self.eigenvectors * &d) * &self.eigenvectors.adjoint()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

#[derive(Debug, Clone)]
pub struct UnitaryEig {
    /// Principal branch, ascending.
    pub eigenphases: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl UnitaryEig {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let d: Vec<Complex64> = self.eigenphases.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        let d = ComplexMatrix::diag(&d).expect("valid dim");
        &(&self.eigenvectors * &d) * &self.eigenvectors.adjoint()
    }
}

/// Cyclic Jacobi on an n×n Hermitian row-major buffer. Returns eigenvalues
/// (unsorted) and eigenvector columns in a row-major buffer.
fn jacobi(n: usize, mut a: Vec<Complex64>) -> (Vec<f64>, Vec<Complex64>) {
    let mut v = vec![C0; n * n];
    for i in 0..n {
        v[i * n + i] = C1;
    }
    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if total == 0.0 {
        return (vec![0.0; n], v);
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-17 * total {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag <= 1e-300 || mag <= 1e-18 * total {
                    continue;
                }
                let phase = apq / mag;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = diag(1, conj(phase)) · [[c, s], [-s, c]]
                let jpp = Complex64::new(c, 0.0);
                let jpq = Complex64::new(s, 0.0);
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * jpp + akq * jqp;
                    a[k * n + q] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[q * n + k] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[p * n + q] = C0;
                a[q * n + p] = C0;
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * jpp + vkq * jqp;
                    v[k * n + q] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i * n + i].re).collect(), v)
}

/// Phase-fix: first amplitude above noise level becomes real positive.
fn fix_phase(v: &mut [Complex64]) {
    let scale = norm(v);
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-10 * scale).copied() {
        let rot = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= rot;
        }
    }
}

/// Replaces a cluster of orthonormal vectors spanning a degenerate subspace
/// with the Gram-Schmidt image of the computational basis projected onto it.
fn canonical_basis(cluster: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = cluster[0].len();
    let k = cluster.len();
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    // Pick basis vectors by largest projected weight so the result is insensitive to noise.
    let mut used = vec![false; n];
    while out.len() < k {
        let mut best: Option<(usize, f64, Vec<Complex64>)> = None;
        for j in 0..n {
            if used[j] {
                continue;
            }
            let mut w = vec![C0; n];
            for c in cluster {
                let amp = c[j].conj();
                for (wi, ci) in w.iter_mut().zip(c) {
                    *wi += ci * amp;
                }
            }
            for o in &out {
                let ov = inner(o, &w);
                for (wi, oi) in w.iter_mut().zip(o) {
                    *wi -= oi * ov;
                }
            }
            let nw = norm(&w);
            // Take the first index with substantial weight; ties go to lower index.
            let better = match &best {
                None => true,
                Some((_, b, _)) => nw > b + 1e-8,
            };
            if better {
                best = Some((j, nw, w));
            }
            if nw > 0.5 {
                break;
            }
        }
        let (j, nw, w) = best.expect("cluster larger than space");
        used[j] = true;
        let mut w: Vec<Complex64> = w.iter().map(|x| x / nw).collect();
        fix_phase(&mut w);
        out.push(w);
    }
    out
}

/// Groups indices of sorted values into runs whose neighbours differ by less than `tol`.
fn clusters(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || (values[i] - values[i - 1]).abs() >= tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

fn eig_hermitian_raw(n: usize, a: Vec<Complex64>) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let (vals, v) = jacobi(n, a.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let mut values: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let mut vectors: Vec<Vec<Complex64>> =
        order.iter().map(|&j| (0..n).map(|i| v[i * n + j]).collect()).collect();
    let scale = values.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    for r in clusters(&values, DEGENERACY_TOL * scale) {
        if r.len() > 1 {
            let canon = canonical_basis(&vectors[r.clone()]);
            for (k, vec) in r.clone().zip(canon) {
                let hv: Vec<Complex64> =
                    (0..n).map(|i| (0..n).map(|j| a[i * n + j] * vec[j]).sum()).collect();
                values[k] = inner(&vec, &hv).re;
                vectors[k] = vec;
            }
        } else {
            fix_phase(&mut vectors[r.start]);
        }
    }
    (values, vectors)
}

pub fn eig_hermitian(h: &ComplexMatrix) -> Result<HermitianEig, LinalgError> {
    let defect = h.hermitian_defect();
    if defect >= HERMITIAN_TOL {
        return Err(LinalgError::NotHermitian { asymmetry: defect * h.norm(), tolerance: HERMITIAN_TOL });
    }
    let (eigenvalues, vectors) = eig_hermitian_raw(h.dim, h.data.clone());
    Ok(HermitianEig { eigenvalues, eigenvectors: ComplexMatrix::from_columns(&vectors)? })
}

/// e^{-iht} through the spectral decomposition.
pub fn expm_minus_iht(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix, LinalgError> {
    let eig = eig_hermitian(h)?;
    Ok(spectral_exp(&eig, t))
}

/// V·diag(e^{-i λ t})·V† for a precomputed decomposition.
pub fn spectral_exp(eig: &HermitianEig, t: f64) -> ComplexMatrix {
    let n = eig.eigenvectors.dim;
    let v = &eig.eigenvectors;
    let phases: Vec<Complex64> = eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -l * t)).collect();
    let mut out = ComplexMatrix::zeros(n).expect("valid dim");
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = (0..n).map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj()).sum();
        }
    }
    out
}

pub fn eig_unitary(w: &ComplexMatrix) -> Result<UnitaryEig, LinalgError> {
    let deviation = w.unitary_defect();
    if deviation >= UNITARY_TOL {
        return Err(LinalgError::NotUnitary { deviation, tolerance: UNITARY_TOL });
    }
    let n = w.dim;
    let wd = w.adjoint();
    let half = Complex64::new(0.5, 0.0);
    let c = (w + &wd).scale(half);
    let s = (w - &wd).scale(Complex64::new(0.0, -0.5));
    let (cvals, cvecs) = eig_hermitian_raw(n, c.data.clone());
    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for r in clusters(&cvals, 1e-6) {
        let q = &cvecs[r.clone()];
        let k = q.len();
        if k == 1 {
            vectors.push(q[0].clone());
            continue;
        }
        let sq: Vec<Vec<Complex64>> = q.iter().map(|col| s.mat_vec(col)).collect();
        let mut proj = vec![C0; k * k];
        for a in 0..k {
            for b in 0..k {
                proj[a * k + b] = inner(&q[a], &sq[b]);
            }
        }
        // Symmetrize against rounding before the Jacobi pass.
        for a in 0..k {
            for b in a..k {
                let m = (proj[a * k + b] + proj[b * k + a].conj()) * 0.5;
                proj[a * k + b] = m;
                proj[b * k + a] = m.conj();
            }
        }
        let (_, sub) = eig_hermitian_raw(k, proj);
        for coeffs in sub {
            let mut v = vec![C0; n];
            for (qa, ca) in q.iter().zip(&coeffs) {
                for (vi, qi) in v.iter_mut().zip(qa) {
                    *vi += qi * ca;
                }
            }
            vectors.push(v);
        }
    }
    let mut pairs: Vec<(f64, Vec<Complex64>)> = vectors
        .into_iter()
        .map(|v| {
            let wv = w.mat_vec(&v);
            (principal_arg(inner(&v, &wv)), v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut phases: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut vecs: Vec<Vec<Complex64>> = pairs.into_iter().map(|p| p.1).collect();
    // Degenerate eigenphase groups, with the group at +pi also absorbing phases near -pi.
    let mut groups = clusters(&phases, 1e-9);
    if groups.len() > 1 {
        let first = groups[0].clone();
        let last = groups[groups.len() - 1].clone();
        if phases[first.start] + 2.0 * PI - phases[last.end - 1] < 1e-9 {
            for i in first.clone() {
                phases[i] = PI;
            }
            let moved: Vec<Vec<Complex64>> = vecs.drain(first.clone()).collect();
            let moved_phases: Vec<f64> = phases.drain(first.clone()).collect();
            vecs.extend(moved);
            phases.extend(moved_phases);
            groups = clusters(&phases, 1e-9);
        }
    }
    for r in groups {
        if r.len() > 1 {
            let canon = canonical_basis(&vecs[r.clone()]);
            for (k, v) in r.zip(canon) {
                vecs[k] = v;
            }
        } else {
            fix_phase(&mut vecs[r.start]);
        }
    }
    Ok(UnitaryEig { eigenphases: phases, eigenvectors: ComplexMatrix::from_columns(&vecs)? })
}
