//! Small dense Hermitian linear algebra.

use nalgebra::SymmetricEigen;

use crate::{CMatrix, Complex64, Error, Result};

/// Absolute Hermiticity tolerance, scaled by the largest entry magnitude.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues within this distance below zero are clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;

/// Spectral decomposition `m = V diag(values) V†`.
#[derive(Debug, Clone)]
pub struct Eigen {
    /// Descending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, ordered like `values`.
    pub vectors: CMatrix,
}

impl Eigen {
    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&v| Complex64::new(v, 0.0)),
        ));
        &self.vectors * d * self.vectors.adjoint()
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Largest |m_ij − conj(m_ji)|.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn ensure_hermitian(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL * max_abs(m).max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Tr(a·b) without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Residual tolerance for accepting a decomposition, relative to the largest entry.
const EIG_RESIDUAL_TOL: f64 = 1e-10;

/// Hermitian eigendecomposition with descending eigenvalues.
///
/// The input is symmetrised before diagonalisation. Eigenvalues in
/// `[-CLAMP_TOL, 0)` are set to exactly zero; more negative values are kept
/// so that callers can detect non-PSD input.
///
/// nalgebra's implicit QR occasionally returns non-finite eigenvalues on
/// highly degenerate inputs (seen for dephased W states with 7 qubits), so
/// its result is checked and replaced by a Jacobi sweep when it is off.
pub fn eigh(m: &CMatrix) -> Result<Eigen> {
    ensure_hermitian(m)?;
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym.clone());
    let (raw_values, raw_vectors) = if decomposes(&sym, &eig.eigenvalues, &eig.eigenvectors) {
        (eig.eigenvalues, eig.eigenvectors)
    } else {
        jacobi_eigh(sym)
    };
    let mut order: Vec<usize> = (0..raw_values.len()).collect();
    order.sort_by(|&a, &b| raw_values[b].total_cmp(&raw_values[a]));
    let n = m.nrows();
    let mut vectors = CMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let v = raw_values[src];
        values.push(if (-CLAMP_TOL..0.0).contains(&v) { 0.0 } else { v });
        vectors.set_column(dst, &raw_vectors.column(src));
    }
    Ok(Eigen { values, vectors })
}

/// True when `values`/`vectors` are finite, orthonormal and reproduce `m`.
fn decomposes(m: &CMatrix, values: &nalgebra::DVector<f64>, vectors: &CMatrix) -> bool {
    if !values.iter().all(|v| v.is_finite()) || !vectors.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return false;
    }
    let n = m.nrows();
    let tol = EIG_RESIDUAL_TOL * max_abs(m).max(f64::MIN_POSITIVE);
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        scaled.column_mut(j).scale_mut(v);
    }
    let residual = max_abs_diff(&(m * vectors), &scaled);
    let gram = vectors.adjoint() * vectors;
    residual <= tol && max_abs_diff(&gram, &CMatrix::identity(n, n)) <= EIG_RESIDUAL_TOL
}

/// Cyclic complex Jacobi diagonalisation of a Hermitian matrix.
fn jacobi_eigh(mut a: CMatrix) -> (nalgebra::DVector<f64>, CMatrix) {
    const MAX_SWEEPS: usize = 100;
    let n = a.nrows();
    let mut v = CMatrix::identity(n, n);
    let scale = max_abs(&a);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| a[(i, j)].norm_sqr()).sum();
        if off.sqrt() <= f64::EPSILON * scale * 1e-2 || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                // phase e makes the pivot real, then a real rotation zeroes it
                let e = apq / mag;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = diag(1, conj e) · [[c, s], [-s, c]] on the (p, q) plane
                let jpp = Complex64::new(c, 0.0);
                let jpq = Complex64::new(s, 0.0);
                let jqp = e.conj() * -s;
                let jqq = e.conj() * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    (nalgebra::DVector::from_iterator(n, (0..n).map(|i| a[(i, i)].re)), v)
}
