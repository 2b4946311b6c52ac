//! Closed-form QFIs for the single-qubit, Bell, GHZ and W probes.
//!
//! Every formula is a factor times (∂Γ/∂T)². With x = e^{2Γ}:
//!
//! | family            | factor                                  |
//! |-------------------|-----------------------------------------|
//! | single, pure      | ½(coth Γ − 1) sin²θ₀                    |
//! | Bell, ancilla     | ½(coth Γ − 1)                           |
//! | Bell, parallel    | 4/(e^{4Γ} − 1)                          |
//! | GHZ (N, n = 1)    | ½(coth Γ − 1)                           |
//! | GHZ (N, n > 1)    | n²/(e^{2nΓ} − 1)                        |
//! | GHZ parallel      | N²/(e^{2NΓ} − 1), N ≥ 3                 |
//! | W ancilla (n = 1) | 2(N − 1)/N² (coth Γ − 1), N ≥ 3         |
//! | W parallel        | 4(N − 1)/(x² + (N − 2)x − (N − 1)), N ≥ 3 |
//! | W (3,2)           | 8(1 + x)/(6x² − 3x − 3)                 |
//! | W (4,2)           | 2(2x + 1)/(3x² − 2x − 1)                |
//! | W (4,3)           | 3(x + 2)/(2(x² − 1))                    |
//! | W (6,2)           | 4(4x + 1)/(15x² − 12x − 3)              |
//! | W (6,5)           | 5(x + 4)/(3x² + 3x − 6)                 |

use super::{bound::upper_bound_closed, Method, QfiResult};
use crate::state::{make_ghz, make_w, ProbeLayout, PureState};
use crate::{Complex64, Error, Result};

/// Probe families with a closed-form QFI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosedForm {
    /// Bell pair, one qubit noisy.
    BellAncilla,
    /// Bell pair, both qubits noisy.
    BellParallel,
    /// GHZ on N qubits with n noisy.
    Ghz { n_total: usize, n_noisy: usize },
    /// GHZ on N qubits, all noisy.
    GhzParallel { n_total: usize },
    /// W on N qubits, one noisy.
    WAncilla { n_total: usize },
    /// W on N qubits, all noisy.
    WParallel { n_total: usize },
    /// W on N qubits with n noisy, for the tabulated (N, n).
    WSpecial { n_total: usize, n_noisy: usize },
}

/// (N, n) pairs with a tabulated W-state formula.
pub const W_SPECIAL_CASES: [(usize, usize); 5] = [(3, 2), (4, 2), (4, 3), (6, 2), (6, 5)];

impl ClosedForm {
    pub fn n_total(&self) -> usize {
        match *self {
            ClosedForm::BellAncilla | ClosedForm::BellParallel => 2,
            ClosedForm::Ghz { n_total, .. }
            | ClosedForm::GhzParallel { n_total }
            | ClosedForm::WAncilla { n_total }
            | ClosedForm::WParallel { n_total }
            | ClosedForm::WSpecial { n_total, .. } => n_total,
        }
    }

    pub fn n_noisy(&self) -> usize {
        match *self {
            ClosedForm::BellAncilla | ClosedForm::WAncilla { .. } => 1,
            ClosedForm::BellParallel => 2,
            ClosedForm::Ghz { n_noisy, .. } | ClosedForm::WSpecial { n_noisy, .. } => n_noisy,
            ClosedForm::GhzParallel { n_total } | ClosedForm::WParallel { n_total } => n_total,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Unsupported(msg));
        match *self {
            ClosedForm::BellAncilla | ClosedForm::BellParallel => Ok(()),
            ClosedForm::Ghz { n_total, n_noisy } => {
                if n_total < 2 || n_noisy < 1 || n_noisy > n_total {
                    return bad(format!("GHZ closed form needs N >= 2 and 1 <= n <= N, got N = {n_total}, n = {n_noisy}"));
                }
                Ok(())
            }
            ClosedForm::GhzParallel { n_total } | ClosedForm::WAncilla { n_total } | ClosedForm::WParallel { n_total } => {
                if n_total < 3 {
                    return bad(format!("closed form {self:?} is stated for N >= 3"));
                }
                Ok(())
            }
            ClosedForm::WSpecial { n_total, n_noisy } => {
                if W_SPECIAL_CASES.contains(&(n_total, n_noisy)) {
                    Ok(())
                } else {
                    bad(format!(
                        "no closed form for the W state with (N, n) = ({n_total}, {n_noisy}); use the spectral evaluator"
                    ))
                }
            }
        }
    }

    /// The initial state and layout the formula describes. Noisy qubits are
    /// the last n of the register.
    pub fn probe(&self) -> Result<(PureState, ProbeLayout)> {
        self.validate()?;
        let (n_total, n_noisy) = (self.n_total(), self.n_noisy());
        let state = match self {
            ClosedForm::BellAncilla | ClosedForm::BellParallel | ClosedForm::Ghz { .. } | ClosedForm::GhzParallel { .. } => {
                make_ghz(n_total)?
            }
            _ => make_w(n_total)?,
        };
        Ok((state, ProbeLayout::ancilla(n_total, n_noisy)?))
    }

    /// The (∂Γ/∂T)²-free factor of the formula.
    fn factor(&self, gamma: f64) -> f64 {
        let x = (2.0 * gamma).exp();
        // ½(coth Γ − 1)
        let half_coth_m1 = 1.0 / (2.0 * gamma).exp_m1();
        match *self {
            ClosedForm::BellAncilla => half_coth_m1,
            ClosedForm::BellParallel => 4.0 / (4.0 * gamma).exp_m1(),
            ClosedForm::Ghz { n_noisy: 1, .. } => half_coth_m1,
            ClosedForm::Ghz { n_noisy, .. } => {
                let n = n_noisy as f64;
                n * n / (2.0 * n * gamma).exp_m1()
            }
            ClosedForm::GhzParallel { n_total } => {
                let n = n_total as f64;
                n * n / (2.0 * n * gamma).exp_m1()
            }
            ClosedForm::WAncilla { n_total } => {
                let n = n_total as f64;
                2.0 * (n - 1.0) / (n * n) * 2.0 * half_coth_m1
            }
            ClosedForm::WParallel { n_total } => {
                let n = n_total as f64;
                4.0 * (n - 1.0) / (x * x + (n - 2.0) * x - (n - 1.0))
            }
            ClosedForm::WSpecial { n_total, n_noisy } => match (n_total, n_noisy) {
                (3, 2) => 8.0 * (1.0 + x) / (6.0 * x * x - 3.0 * x - 3.0),
                (4, 2) => 2.0 * (2.0 * x + 1.0) / (3.0 * x * x - 2.0 * x - 1.0),
                (4, 3) => 3.0 * (x + 2.0) / (2.0 * (x * x - 1.0)),
                (6, 2) => 4.0 * (4.0 * x + 1.0) / (15.0 * x * x - 12.0 * x - 3.0),
                (6, 5) => 5.0 * (x + 4.0) / (3.0 * x * x + 3.0 * x - 6.0),
                _ => unreachable!("validated above"),
            },
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !gamma.is_finite() {
        return Err(Error::NonFinite("gamma"));
    }
    if gamma < 0.0 {
        return Err(Error::NegativeGamma(gamma));
    }
    if gamma == 0.0 {
        return Err(Error::Divergent("closed-form QFI at gamma = 0"));
    }
    Ok(())
}

/// Evaluates a catalog formula.
pub fn qfi_closed_catalog(family: ClosedForm, gamma: f64, dgamma: f64) -> Result<QfiResult> {
    family.validate()?;
    check_gamma(gamma)?;
    Ok(QfiResult {
        value: family.factor(gamma) * dgamma * dgamma,
        bound: Some(upper_bound_closed(family.n_noisy(), gamma, dgamma)?),
        gamma,
        dgamma,
        method: Method::ClosedForm,
    })
}

/// Single qubit with initial populations p and coherence q:
/// F = 4(p − 1)p|q|² / (|q|² + e^{2Γ}(p − 1)p) · (∂Γ/∂T)².
pub fn qfi_closed_single_mixed(p: f64, q: Complex64, gamma: f64, dgamma: f64) -> Result<QfiResult> {
    if !(0.0..=1.0).contains(&p) || q.norm_sqr() > p * (1.0 - p) + 1e-12 {
        return Err(Error::InvalidParameter(format!("invalid single-qubit data p = {p}, q = {q}")));
    }
    if !gamma.is_finite() {
        return Err(Error::NonFinite("gamma"));
    }
    if gamma < 0.0 {
        return Err(Error::NegativeGamma(gamma));
    }
    let bound = if gamma > 0.0 { Some(upper_bound_closed(1, gamma, dgamma)?) } else { None };
    let q2 = q.norm_sqr();
    let pp = (p - 1.0) * p;
    let value = if q2 == 0.0 || pp == 0.0 {
        0.0
    } else {
        let den = q2 + (2.0 * gamma).exp() * pp;
        if den == 0.0 {
            return Err(Error::Divergent("pure single-qubit probe at gamma = 0"));
        }
        4.0 * pp * q2 / den * dgamma * dgamma
    };
    Ok(QfiResult {
        value,
        bound,
        gamma,
        dgamma,
        method: Method::ClosedForm,
    })
}

/// Pure single-qubit probe: F = ½(coth Γ − 1) sin²θ₀ (∂Γ/∂T)².
pub fn qfi_closed_single_pure(theta0: f64, gamma: f64, dgamma: f64) -> Result<QfiResult> {
    check_gamma(gamma)?;
    let s = theta0.sin();
    Ok(QfiResult {
        value: s * s * dgamma * dgamma / (2.0 * gamma).exp_m1(),
        bound: Some(upper_bound_closed(1, gamma, dgamma)?),
        gamma,
        dgamma,
        method: Method::ClosedForm,
    })
}
