//! Channel-extension upper bound C_T = 4[⟨I₁⟩ − ⟨I₂⟩²] built from the
//! temperature derivatives of the tensor-product Kraus operators:
//!
//! ```text
//! I₁ = Σ_l ∂Π_l† ∂Π_l,    I₂ = i Σ_l ∂Π_l† Π_l,    ⟨X⟩ = Tr(X ρ₀)
//! ```

use crate::linalg;
use crate::state::{kraus_weights, tensor_product, DensityMatrix, ProbeLayout};
use crate::{CMatrix, Complex64, Error, Result};

/// C^n_T = (n/2)(coth Γ − 1)(∂Γ/∂T)².
pub fn upper_bound_closed(n_noisy: usize, gamma: f64, dgamma: f64) -> Result<f64> {
    if gamma <= 0.0 {
        return Err(Error::Divergent("Kraus bound at gamma = 0"));
    }
    // (coth Γ − 1)/2 = 1/(e^{2Γ} − 1)
    Ok(n_noisy as f64 * dgamma * dgamma / (2.0 * gamma).exp_m1())
}

/// I₁ and I₂ for one layout at fixed (Γ, ∂Γ/∂T).
#[derive(Debug, Clone)]
pub struct KrausBound {
    layout: ProbeLayout,
    gamma: f64,
    dgamma: f64,
    i1: CMatrix,
    i2: CMatrix,
}

/// Outcome of the generic bound contraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausBoundReport {
    pub value: f64,
    /// I₁[0,0]; equals (n/8)(coth Γ − 1)(∂Γ/∂T)² when I₁ ∝ identity.
    pub i1_scale: f64,
    /// max |I₁ − I₁[0,0]·1|.
    pub i1_identity_deviation: f64,
    /// max |I₂|.
    pub i2_max_abs: f64,
}

impl KrausBound {
    pub fn new(layout: &ProbeLayout, gamma: f64, dgamma: f64) -> Result<Self> {
        if gamma <= 0.0 {
            return Err(Error::Divergent("Kraus derivative at gamma = 0"));
        }
        let (w1, w2) = kraus_weights(gamma);
        let e = (-gamma).exp();
        // d/dT √((1 ± e^{−Γ})/2) = ∓ e^{−Γ} ∂Γ/∂T / (4 w)
        let dw1 = -e * dgamma / (4.0 * w1);
        let dw2 = e * dgamma / (4.0 * w2);
        let diag = |a: f64, b: f64| {
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![Complex64::new(a, 0.0), Complex64::new(b, 0.0)]))
        };
        let k = [diag(w1, w1), diag(w2, -w2)];
        let dk = [diag(dw1, dw1), diag(dw2, -dw2)];
        let id = CMatrix::identity(2, 2);

        let n_total = layout.n_total();
        let d = 1usize << n_total;
        let noisy = layout.noisy();
        let slot_of = |q: usize| noisy.iter().position(|&p| p == q);
        let mut i1 = CMatrix::zeros(d, d);
        let mut i2 = CMatrix::zeros(d, d);
        for string in 0..1usize << noisy.len() {
            let pick = |slot: usize| string >> slot & 1;
            let ops: Vec<CMatrix> = (0..n_total)
                .map(|q| slot_of(q).map_or_else(|| id.clone(), |s| k[pick(s)].clone()))
                .collect();
            let pi = tensor_product(&ops);
            let mut dpi = CMatrix::zeros(d, d);
            for (s, &q) in noisy.iter().enumerate() {
                let mut ops_d = ops.clone();
                ops_d[q] = dk[pick(s)].clone();
                dpi += tensor_product(&ops_d);
            }
            let dpi_h = dpi.adjoint();
            i1 += &dpi_h * &dpi;
            i2 += &dpi_h * &pi;
        }
        i2 *= Complex64::new(0.0, 1.0);
        Ok(Self {
            layout: layout.clone(),
            gamma,
            dgamma,
            i1,
            i2,
        })
    }

    pub fn i1(&self) -> &CMatrix {
        &self.i1
    }

    pub fn i2(&self) -> &CMatrix {
        &self.i2
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dgamma(&self) -> f64 {
        self.dgamma
    }

    pub fn evaluate(&self, rho0: &DensityMatrix) -> Result<KrausBoundReport> {
        if rho0.n_qubits() != self.layout.n_total() {
            return Err(Error::DimensionMismatch {
                expected: self.layout.n_total(),
                got: rho0.n_qubits(),
            });
        }
        let m1 = linalg::trace_product(&self.i1, rho0.matrix());
        let m2 = linalg::trace_product(&self.i2, rho0.matrix());
        let scale = self.i1[(0, 0)];
        let d = self.i1.nrows();
        Ok(KrausBoundReport {
            value: 4.0 * (m1.re - (m2 * m2).re),
            i1_scale: scale.re,
            i1_identity_deviation: linalg::max_abs_diff(&self.i1, &CMatrix::identity(d, d).scale(scale.re)),
            i2_max_abs: linalg::max_abs(&self.i2),
        })
    }
}

/// Generic Kraus-derivative bound for initial state ρ₀.
pub fn upper_bound_kraus(rho0: &DensityMatrix, layout: &ProbeLayout, gamma: f64, dgamma: f64) -> Result<KrausBoundReport> {
    KrausBound::new(layout, gamma, dgamma)?.evaluate(rho0)
}
