//! Quantum Fisher information for temperature estimation.
//!
//! The general evaluator works from the spectral decomposition
//! ρ = Σ ϱ_i |ψ_i⟩⟨ψ_i| and the parameter derivative ∂ρ:
//!
//! ```text
//! F = 2 Σ_{i,j} |⟨ψ_i|∂ρ|ψ_j⟩|² / (ϱ_i + ϱ_j)      (pairs with ϱ_i + ϱ_j < SUPPORT_CUTOFF skipped)
//! ```
//!
//! The SLD is assembled in the same eigenbasis, L_ij = 2(∂ρ)_ij/(ϱ_i + ϱ_j).

mod bound;
mod catalog;
mod measurement;

pub use bound::{upper_bound_kraus, upper_bound_closed, KrausBound, KrausBoundReport};
pub use catalog::{qfi_closed_catalog, qfi_closed_single_mixed, qfi_closed_single_pure, ClosedForm, W_SPECIAL_CASES};
pub use measurement::{classical_fi, Povm, OUTCOME_CUTOFF};

use crate::linalg::{self, Eigen};
use crate::state::DensityMatrix;
use crate::{CMatrix, Complex64, Error, Result};

/// Eigenvalue pairs whose sum falls below this are outside the support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// How a QFI value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Spectral,
    FiniteDifference,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Spectral => "spectral",
            Method::FiniteDifference => "finite_difference",
        }
    }
}

/// A QFI value together with the inputs that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiResult {
    /// Fisher information for T (units 1/T²).
    pub value: f64,
    /// Matching Kraus-derivative bound C^n_T, when defined.
    pub bound: Option<f64>,
    pub gamma: f64,
    pub dgamma: f64,
    pub method: Method,
}

fn check_pair(rho: &DensityMatrix, drho: &CMatrix) -> Result<()> {
    if drho.nrows() != rho.dim() || drho.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: drho.nrows(),
        });
    }
    linalg::ensure_hermitian(drho)
}

/// ∂ρ expressed in the eigenbasis of ρ.
fn rotate(eig: &Eigen, drho: &CMatrix) -> CMatrix {
    eig.vectors.adjoint() * drho * &eig.vectors
}

/// Spectral QFI from a precomputed eigendecomposition.
pub fn qfi_from_eigen(eig: &Eigen, drho: &CMatrix) -> f64 {
    let m = rotate(eig, drho);
    let d = eig.values.len();
    let mut acc = crate::summation::NeumaierSum::new();
    for i in 0..d {
        for j in 0..d {
            let s = eig.values[i] + eig.values[j];
            if s >= SUPPORT_CUTOFF {
                acc.add(2.0 * m[(i, j)].norm_sqr() / s);
            }
        }
    }
    acc.value().max(0.0)
}

/// General spectral QFI of the family ρ(T) with derivative ∂ρ.
pub fn qfi_spectral(rho: &DensityMatrix, drho: &CMatrix) -> Result<f64> {
    check_pair(rho, drho)?;
    let eig = crate::state::eigendecompose(rho)?;
    Ok(qfi_from_eigen(&eig, drho))
}

/// Symmetric logarithmic derivative, restricted to the support of ρ.
pub fn sld(rho: &DensityMatrix, drho: &CMatrix) -> Result<CMatrix> {
    check_pair(rho, drho)?;
    let eig = crate::state::eigendecompose(rho)?;
    let m = rotate(&eig, drho);
    let d = eig.values.len();
    let l = CMatrix::from_fn(d, d, |i, j| {
        let s = eig.values[i] + eig.values[j];
        if s >= SUPPORT_CUTOFF {
            m[(i, j)] * (2.0 / s)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(&eig.vectors * l * eig.vectors.adjoint())
}

/// The three SLD-based expressions of the QFI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SldConsistency {
    /// Tr[ρL].
    pub mean: f64,
    /// Tr[ρL²].
    pub rho_l2: f64,
    /// Tr[(∂ρ)L].
    pub drho_l: f64,
    /// ‖∂ρ − ½{ρ, L}‖_max.
    pub defect: f64,
}

pub fn sld_consistency(rho: &DensityMatrix, drho: &CMatrix, l: &CMatrix) -> SldConsistency {
    let r = rho.matrix();
    let half = linalg::anticommutator(r, l).scale(0.5);
    SldConsistency {
        mean: linalg::trace_product(r, l).re,
        rho_l2: linalg::trace_product(r, &(l * l)).re,
        drho_l: linalg::trace_product(drho, l).re,
        defect: linalg::max_abs_diff(drho, &half),
    }
}

/// A closed-form single-qubit SLD and how well it solves ∂ρ = ½{ρ, L}.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedSld {
    pub matrix: CMatrix,
    /// ‖∂ρ − ½{ρ, L}‖_max for the matching dephased qubit.
    pub defect: f64,
    pub satisfies_definition: bool,
}

const SLD_DEFECT_TOL: f64 = 1e-9;

fn dephased_qubit(p: f64, q: Complex64, gamma: f64, dgamma: f64) -> (CMatrix, CMatrix) {
    let e = (-gamma).exp();
    let z = Complex64::new(0.0, 0.0);
    let rho = CMatrix::from_row_slice(2, 2, &[Complex64::new(p, 0.0), q * e, q.conj() * e, Complex64::new(1.0 - p, 0.0)]);
    let drho = CMatrix::from_row_slice(2, 2, &[z, -q * e * dgamma, -q.conj() * e * dgamma, z]);
    (rho, drho)
}

fn closed_sld_report(matrix: CMatrix, p: f64, q: Complex64, gamma: f64, dgamma: f64) -> ClosedSld {
    let (rho, drho) = dephased_qubit(p, q, gamma, dgamma);
    let defect = linalg::max_abs_diff(&drho, &linalg::anticommutator(&rho, &matrix).scale(0.5));
    ClosedSld {
        matrix,
        defect,
        satisfies_definition: defect <= SLD_DEFECT_TOL * (1.0 + linalg::max_abs(&drho)),
    }
}

fn check_bloch(p: f64, q: Complex64) -> Result<()> {
    if !p.is_finite() || !q.re.is_finite() || !q.im.is_finite() {
        return Err(Error::NonFinite("Bloch data"));
    }
    if !(0.0..=1.0).contains(&p) || q.norm_sqr() > p * (1.0 - p) + 1e-12 {
        return Err(Error::InvalidParameter(format!("invalid single-qubit data p = {p}, q = {q}")));
    }
    Ok(())
}

/// The printed general single-qubit SLD, with its (∂Γ/∂T)² prefactor.
///
/// Populations p and coherence q describe the initial state
/// [[p, q], [q*, 1 − p]]; the evolved coherence is q·e^{−Γ}.
pub fn sld_closed_single(p: f64, q: Complex64, gamma: f64, dgamma: f64) -> Result<ClosedSld> {
    check_bloch(p, q)?;
    if dgamma == 0.0 {
        return Ok(closed_sld_report(CMatrix::zeros(2, 2), p, q, gamma, dgamma));
    }
    let q2 = q.norm_sqr();
    let e2 = (2.0 * gamma).exp();
    let den = q2 + e2 * (p - 1.0) * p;
    if den == 0.0 {
        return Err(Error::Divergent("single-qubit SLD denominator vanishes"));
    }
    let eg = gamma.exp();
    let pre = dgamma * dgamma;
    let r = |x: f64| Complex64::new(x, 0.0);
    let matrix = CMatrix::from_row_slice(
        2,
        2,
        &[
            r(pre * 2.0 * (p - 1.0) * q2 / den),
            q * (pre * -2.0 * eg * (p - 1.0) * p / den),
            q.conj() * (pre * -2.0 * eg * (p - 1.0) * p / den),
            r(pre * -2.0 * p * q2 / den),
        ],
    );
    Ok(closed_sld_report(matrix, p, q, gamma, dgamma))
}

/// The printed compact SLD for θ = π/2 with phase φ.
///
/// The defect is measured against the probe cos(π/4)|0⟩ + sin(π/4)e^{−iφ}|1⟩,
/// whose initial coherence is q = e^{iφ}/2.
pub fn sld_closed_compact(phi: f64, gamma: f64, dgamma: f64) -> Result<ClosedSld> {
    if gamma <= 0.0 {
        return Err(Error::Divergent("compact SLD at gamma = 0"));
    }
    let e2 = (2.0 * gamma).exp();
    let pre = dgamma * dgamma;
    let diag = Complex64::new(pre / (e2 - 1.0), 0.0);
    let off = |sign: f64| (Complex64::new(1.0, 0.0) + Complex64::from_polar(gamma.exp(), sign * phi)) * (pre / (1.0 - e2));
    let matrix = CMatrix::from_row_slice(2, 2, &[diag, off(1.0), off(-1.0), diag]);
    Ok(closed_sld_report(matrix, 0.5, Complex64::from_polar(0.5, phi), gamma, dgamma))
}

/// Quantum Cramér–Rao variance bound 1/(M·F).
pub fn qcr_variance(qfi: f64, repetitions: u64) -> Result<f64> {
    if repetitions == 0 {
        return Err(Error::InvalidParameter("repetitions must be >= 1".into()));
    }
    if !qfi.is_finite() || qfi < 0.0 {
        return Err(Error::InvalidParameter(format!("QFI must be finite and >= 0, got {qfi}")));
    }
    if qfi == 0.0 {
        return Err(Error::InfiniteVariance);
    }
    Ok(1.0 / (repetitions as f64 * qfi))
}
