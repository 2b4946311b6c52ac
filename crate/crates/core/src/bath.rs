//! Dephasing decay factor of a qubit coupled to a squeezed thermal Ohmic bath.
//!
//! The decay factor is
//!
//! ```text
//! Γ(t) = (λ/π) [ A_t cosh 2r − sinh 2r (B_t cos δθ + C_t sin δθ) ]
//! A_t  = a_η + Σ_{n≥1} T a_t(n)     (likewise B_t, C_t)
//! ```
//!
//! with η = Ω_c t and τ(n) = Ω_c t / (1 + nΩ_c/2T). The thermal sums have a
//! positive 1/n tail (T a_t(n) → 4T²t²/n), so they are evaluated as truncated
//! series: ascending n, compensated summation, `n_max` terms unless the
//! early-stop tolerance fires first. Every reported value is defined at the
//! truncation recorded in the returned [`DecayResult`].
//!
//! Two temperature derivatives are produced from the same truncation:
//! the exact termwise derivative of the truncated Γ (normative), and the
//! closed 𝒜/ℬ/𝒞 series written in ζ = 2tTΩ_c/(nΩ_c + 2T), kept so that the
//! gap between the two stays observable.

use std::f64::consts::PI;

use crate::summation::NeumaierSum;
use crate::{Error, Result};

/// Physical parameters of the squeezed Ohmic bath (ħ = k_B = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    /// Dimensionless system-bath coupling λ.
    pub lambda: f64,
    /// Squeezing strength r.
    pub r: f64,
    /// Squeezing phase relative to the coupling phase, radians.
    pub delta_theta: f64,
    /// Ohmic cutoff frequency Ω_c.
    pub omega_c: f64,
    /// Bath temperature T.
    pub temp: f64,
}

impl BathParams {
    pub fn new(lambda: f64, r: f64, delta_theta: f64, omega_c: f64, temp: f64) -> Result<Self> {
        let params = Self {
            lambda,
            r,
            delta_theta,
            omega_c,
            temp,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("lambda", self.lambda),
            ("r", self.r),
            ("delta_theta", self.delta_theta),
            ("omega_c", self.omega_c),
            ("temp", self.temp),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        if self.lambda < 0.0 {
            return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if self.r < 0.0 {
            return Err(Error::InvalidParameter(format!("r must be >= 0, got {}", self.r)));
        }
        if self.omega_c <= 0.0 {
            return Err(Error::InvalidParameter(format!("omega_c must be > 0, got {}", self.omega_c)));
        }
        if self.temp <= 0.0 {
            return Err(Error::InvalidParameter(format!("temp must be > 0, got {}", self.temp)));
        }
        Ok(())
    }

    pub fn with_temp(self, temp: f64) -> Self {
        Self { temp, ..self }
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn with_omega_c(self, omega_c: f64) -> Self {
        Self { omega_c, ..self }
    }

    pub fn with_r(self, r: f64) -> Self {
        Self { r, ..self }
    }

    pub fn with_delta_theta(self, delta_theta: f64) -> Self {
        Self { delta_theta, ..self }
    }

    /// Squeezing weights (cosh 2r, sinh 2r cos δθ, sinh 2r sin δθ).
    fn squeeze_weights(&self) -> (f64, f64, f64) {
        let (s, c) = self.delta_theta.sin_cos();
        let sh = (2.0 * self.r).sinh();
        ((2.0 * self.r).cosh(), sh * c, sh * s)
    }
}

/// Truncation control for the thermal series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Largest summation index included.
    pub n_max: u32,
    /// Early-stop tolerance: summation stops once the magnitude of the latest
    /// Γ term is at most `rel_tol · |Γ_partial|`. Zero disables early stop.
    pub rel_tol: f64,
    /// When set, a truncation that ends above `rel_tol` is returned as
    /// [`Error::NotConverged`] instead of only being flagged.
    pub report_tail: bool,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            n_max: 1000,
            rel_tol: 0.0,
            report_tail: false,
        }
    }
}

impl SeriesControl {
    pub fn with_n_max(n_max: u32) -> Self {
        Self {
            n_max,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be >= 1".into()));
        }
        if !(self.rel_tol >= 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rel_tol must be a finite nonnegative number, got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

/// Γ(t), its temperature derivatives and truncation metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayResult {
    pub gamma: f64,
    /// Exact ∂Γ/∂T of the truncated series.
    pub dgamma_dt_temp: f64,
    /// ∂Γ/∂T from the closed 𝒜/ℬ/𝒞 series at the same truncation.
    pub dgamma_paper: f64,
    pub terms_used: u32,
    /// Magnitude of the last included Γ term.
    pub tail_estimate: f64,
    /// True when the last term is within `rel_tol` of the partial sum.
    pub converged: bool,
}

impl DecayResult {
    const ZERO: Self = Self {
        gamma: 0.0,
        dgamma_dt_temp: 0.0,
        dgamma_paper: 0.0,
        terms_used: 0,
        tail_estimate: 0.0,
        converged: true,
    };

    /// Γ < 0 can occur for strong squeezing; it is reported, never clamped.
    pub fn is_physical(&self) -> bool {
        self.gamma >= 0.0
    }
}

/// Vacuum (temperature-independent) coefficients (a_η, b_η, c_η).
pub fn eta_coefficients(eta: f64) -> Result<(f64, f64, f64)> {
    if !eta.is_finite() {
        return Err(Error::NonFinite("eta"));
    }
    if eta < 0.0 {
        return Err(Error::InvalidParameter(format!("eta must be >= 0, got {eta}")));
    }
    if eta == 0.0 {
        return Ok((0.0, 0.0, 0.0));
    }
    let e2 = eta * eta;
    let a = e2.ln_1p();
    let b = 0.5 * (4.0 * e2).ln_1p() - e2.ln_1p();
    // 2 atan η − atan 2η, folded into one arctangent
    let c = (2.0 * e2 * eta / (1.0 + 3.0 * e2)).atan();
    Ok((a, b, c))
}

/// τ(n) = Ω_c t / (1 + nΩ_c/2T).
pub fn tau(n: u32, t: f64, params: &BathParams) -> f64 {
    let denom = 1.0 + n as f64 * params.omega_c / (2.0 * params.temp);
    params.omega_c * t / denom
}

/// ∂τ/∂T at fixed n and t.
fn dtau_dtemp(n: u32, t: f64, params: &BathParams) -> f64 {
    let nw = n as f64 * params.omega_c;
    let d = 2.0 * params.temp + nw;
    params.omega_c * t * 2.0 * nw / (d * d)
}

// Below this τ the thermal kernels are replaced by their τ → 0 limits.
const TAU_FLOOR: f64 = 1e-100;

/// The bracketed τ-kernels of (a_t, b_t, c_t), each divided by τ, so that
/// a_t = 2t·g_a(τ) and similarly for b_t, c_t.
fn kernels(tau: f64) -> (f64, f64, f64) {
    if tau < TAU_FLOOR {
        return (0.0, 0.0, 0.0);
    }
    let t2 = tau * tau;
    let l1 = t2.ln_1p();
    let l4 = (4.0 * t2).ln_1p();
    let ga = 2.0 * tau.atan() - l1 / tau;
    // atan 2τ − atan τ
    let d21 = (tau / (1.0 + 2.0 * t2)).atan();
    let gb = 2.0 * d21 - (0.5 * l4 - l1) / tau;
    // 2 atan τ − atan 2τ
    let m = (2.0 * t2 * tau / (1.0 + 3.0 * t2)).atan();
    let gc = (l4 - l1) - m / tau;
    (ga, gb, gc)
}

/// τ-derivatives of [`kernels`]; each reduces to (·)/τ².
fn kernel_derivatives(tau: f64) -> (f64, f64, f64) {
    if tau < TAU_FLOOR {
        return (1.0, 1.0, 0.0);
    }
    let t2 = tau * tau;
    let l1 = t2.ln_1p();
    let l4 = (4.0 * t2).ln_1p();
    let m = (2.0 * t2 * tau / (1.0 + 3.0 * t2)).atan();
    (l1 / t2, (0.5 * l4 - l1) / t2, m / t2)
}

/// Thermal coefficients (a_t, b_t, c_t) at summation index n.
pub fn thermal_term(n: u32, t: f64, params: &BathParams) -> (f64, f64, f64) {
    let (ga, gb, gc) = kernels(tau(n, t, params));
    (2.0 * t * ga, 2.0 * t * gb, 2.0 * t * gc)
}

/// Summands of the closed 𝒜/ℬ/𝒞 derivative series at index n (ζ = τ(n)).
fn paper_derivative_terms(zeta: f64, t: f64, omega_c: f64) -> (f64, f64, f64) {
    let z2 = zeta * zeta;
    let l1 = z2.ln_1p();
    let l4 = (4.0 * z2).ln_1p();
    let at1 = zeta.atan();
    let d21 = (zeta / (1.0 + 2.0 * z2)).atan();
    let m = (2.0 * z2 * zeta / (1.0 + 3.0 * z2)).atan();
    let a = 2.0 * (4.0 * t * at1 - 2.0 / omega_c * l1);
    let b = 2.0 * (-2.0 / omega_c * (0.5 * l4 - l1) + 4.0 * t * d21);
    let c = 2.0 * (2.0 / omega_c) * (t * omega_c * (l4 - l1) - m);
    (a, b, c)
}

fn check_inputs(params: &BathParams, t: f64, ctrl: &SeriesControl) -> Result<()> {
    params.validate()?;
    ctrl.validate()?;
    if !t.is_finite() {
        return Err(Error::NonFinite("t"));
    }
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
    }
    Ok(())
}

/// Evaluates Γ(t) and both temperature derivatives at the requested truncation.
pub fn gamma(params: &BathParams, t: f64, ctrl: &SeriesControl) -> Result<DecayResult> {
    check_inputs(params, t, ctrl)?;
    if t == 0.0 {
        return Ok(DecayResult::ZERO);
    }
    let pref = params.lambda / PI;
    let (w_a, w_b, w_c) = params.squeeze_weights();
    let temp = params.temp;

    let (ae, be, ce) = eta_coefficients(params.omega_c * t)?;
    let mut g = NeumaierSum::new();
    g.add(pref * (w_a * ae - w_b * be - w_c * ce));
    let mut dg = NeumaierSum::new();
    let (mut pa, mut pb, mut pc) = (NeumaierSum::new(), NeumaierSum::new(), NeumaierSum::new());

    let mut terms_used = 0;
    let mut tail = 0.0;
    let mut stopped_early = false;
    for n in 1..=ctrl.n_max {
        let tau_n = tau(n, t, params);
        let (ga, gb, gc) = kernels(tau_n);
        let (da, db, dc) = kernel_derivatives(tau_n);
        let term = pref * temp * 2.0 * t * (w_a * ga - w_b * gb - w_c * gc);
        g.add(term);

        // d/dT [T·k(τ)] = k(τ) + T·k'(τ)·∂τ/∂T
        let chain = temp * dtau_dtemp(n, t, params);
        let dk = |k: f64, dk: f64| 2.0 * t * (k + chain * dk);
        dg.add(pref * (w_a * dk(ga, da) - w_b * dk(gb, db) - w_c * dk(gc, dc)));

        let (sa, sb, sc) = paper_derivative_terms(tau_n, t, params.omega_c);
        pa.add(sa);
        pb.add(sb);
        pc.add(sc);

        terms_used = n;
        tail = term.abs();
        if ctrl.rel_tol > 0.0 && tail <= ctrl.rel_tol * g.value().abs() {
            stopped_early = true;
            break;
        }
    }

    let gamma = g.value();
    let converged = stopped_early || tail <= ctrl.rel_tol * gamma.abs();
    if ctrl.report_tail && !converged {
        return Err(Error::NotConverged {
            n_max: ctrl.n_max,
            rel_tail: if gamma != 0.0 { tail / gamma.abs() } else { f64::INFINITY },
            rel_tol: ctrl.rel_tol,
        });
    }
    Ok(DecayResult {
        gamma,
        dgamma_dt_temp: dg.value(),
        dgamma_paper: pref * (w_a * pa.value() - w_b * pb.value() - w_c * pc.value()),
        terms_used,
        tail_estimate: tail,
        converged,
    })
}

/// Exact ∂Γ/∂T of the truncated series.
pub fn dgamma_dtemp_termwise(params: &BathParams, t: f64, ctrl: &SeriesControl) -> Result<f64> {
    gamma(params, t, ctrl).map(|d| d.dgamma_dt_temp)
}

/// ∂Γ/∂T from the closed 𝒜/ℬ/𝒞 series (not the normative derivative).
pub fn dgamma_dtemp_paper(params: &BathParams, t: f64, ctrl: &SeriesControl) -> Result<f64> {
    gamma(params, t, ctrl).map(|d| d.dgamma_paper)
}

/// One row of [`discrepancy_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyRow {
    pub t: f64,
    pub gamma: f64,
    pub dgamma_termwise: f64,
    pub dgamma_paper: f64,
    /// (paper − termwise)/|termwise|; zero when both vanish.
    pub rel_diff: f64,
    pub terms_used: u32,
    pub tail_estimate: f64,
}

/// Tabulates the gap between the termwise and the closed-series derivatives.
pub fn discrepancy_report(
    params: &BathParams,
    t_grid: &[f64],
    ctrl: &SeriesControl,
) -> Result<Vec<DiscrepancyRow>> {
    if t_grid.is_empty() {
        return Err(Error::EmptyRange);
    }
    t_grid
        .iter()
        .map(|&t| {
            let d = gamma(params, t, ctrl)?;
            let rel_diff = if d.dgamma_dt_temp != 0.0 {
                (d.dgamma_paper - d.dgamma_dt_temp) / d.dgamma_dt_temp.abs()
            } else if d.dgamma_paper == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            Ok(DiscrepancyRow {
                t,
                gamma: d.gamma,
                dgamma_termwise: d.dgamma_dt_temp,
                dgamma_paper: d.dgamma_paper,
                rel_diff,
                terms_used: d.terms_used,
                tail_estimate: d.tail_estimate,
            })
        })
        .collect()
}

/// Doubling-truncation diagnostic for the logarithmic tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationDiagnostic {
    pub gamma_k: f64,
    pub gamma_2k: f64,
    /// Γ(n_max = 2k) − Γ(n_max = k).
    pub difference: f64,
    /// Actual Γ summand at n = k.
    pub term_at_k: f64,
    /// Asymptotic summand 4T²t²(cosh 2r − sinh 2r cos δθ)(λ/π)/k.
    pub predicted_term_at_k: f64,
}

pub fn truncation_diagnostic(params: &BathParams, t: f64, k: u32) -> Result<TruncationDiagnostic> {
    let lo = gamma(params, t, &SeriesControl::with_n_max(k))?;
    let hi = gamma(params, t, &SeriesControl::with_n_max(2 * k))?;
    let (w_a, w_b, w_c) = params.squeeze_weights();
    let (a, b, c) = thermal_term(k, t, params);
    let pref = params.lambda / PI;
    let term_at_k = pref * params.temp * (w_a * a - w_b * b - w_c * c);
    let temp = params.temp;
    let predicted = 4.0 * temp * temp * t * t * (w_a - w_b) * pref / k as f64;
    Ok(TruncationDiagnostic {
        gamma_k: lo.gamma,
        gamma_2k: hi.gamma,
        difference: hi.gamma - lo.gamma,
        term_at_k,
        predicted_term_at_k: predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo() -> BathParams {
        BathParams::new(0.4, 0.5, 0.9, 1.0, 10.0).unwrap()
    }

    #[test]
    fn eta_coefficients_at_zero_and_one() {
        assert_eq!(eta_coefficients(0.0).unwrap(), (0.0, 0.0, 0.0));
        let (a, b, c) = eta_coefficients(1.0).unwrap();
        assert!((a - 2f64.ln()).abs() < 1e-15);
        assert!((b - (5f64.sqrt() / 2.0).ln()).abs() < 1e-15);
        assert!((c - (PI / 2.0 - 2f64.atan())).abs() < 1e-15);
    }

    #[test]
    fn eta_rejects_bad_input() {
        assert!(matches!(eta_coefficients(f64::NAN), Err(Error::NonFinite(_))));
        assert!(eta_coefficients(f64::INFINITY).is_err());
        assert!(eta_coefficients(-1.0).is_err());
    }

    #[test]
    fn tau_examples() {
        let p = BathParams::new(0.1, 0.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(tau(2, 3.0, &p), 1.5);
        assert_eq!(tau(7, 0.0, &p), 0.0);
        let hot = p.with_temp(1e12);
        assert!((tau(3, 2.0, &hot) - 2.0).abs() < 1e-10);
        assert!(tau(5, 1.0, &p) < tau(4, 1.0, &p));
    }

    #[test]
    fn thermal_term_vanishes_at_t_zero() {
        assert_eq!(thermal_term(1, 0.0, &demo()), (0.0, 0.0, 0.0));
    }

    #[test]
    fn thermal_term_small_tau_asymptotics() {
        let p = demo();
        let t = 0.5;
        for n in [1000u32, 10_000, 100_000] {
            let tau_n = tau(n, t, &p);
            assert!(tau_n < 0.1);
            let (a, _, _) = thermal_term(n, t, &p);
            assert!((a / (2.0 * t * tau_n) - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn gamma_zero_at_t_zero() {
        let d = gamma(&demo(), 0.0, &SeriesControl::default()).unwrap();
        assert_eq!(d.gamma, 0.0);
        assert_eq!(d.dgamma_dt_temp, 0.0);
        assert_eq!(d.dgamma_paper, 0.0);
    }

    #[test]
    fn lambda_zero_gives_zero_derivatives() {
        let p = demo().with_lambda(0.0);
        let d = gamma(&p, 0.7, &SeriesControl::default()).unwrap();
        assert_eq!(d.gamma, 0.0);
        assert_eq!(d.dgamma_dt_temp, 0.0);
        assert_eq!(d.dgamma_paper, 0.0);
    }

    #[test]
    fn unsqueezed_bath_ignores_phase() {
        let ctrl = SeriesControl::default();
        let p = demo().with_r(0.0);
        let a = gamma(&p.with_delta_theta(0.3), 0.5, &ctrl).unwrap();
        let b = gamma(&p.with_delta_theta(2.9), 0.5, &ctrl).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn terms_used_respects_n_max() {
        let d = gamma(&demo(), 0.5, &SeriesControl::with_n_max(37)).unwrap();
        assert_eq!(d.terms_used, 37);
        assert!(!d.converged);
    }

    #[test]
    fn early_stop_and_strict_mode() {
        let loose = SeriesControl {
            n_max: 100_000,
            rel_tol: 1e-3,
            report_tail: true,
        };
        let d = gamma(&demo(), 0.5, &loose).unwrap();
        assert!(d.converged);
        assert!(d.terms_used < 100_000);
        assert!(d.tail_estimate <= 1e-3 * d.gamma.abs());

        let strict = SeriesControl {
            n_max: 10,
            rel_tol: 1e-9,
            report_tail: true,
        };
        assert!(matches!(
            gamma(&demo(), 0.5, &strict),
            Err(Error::NotConverged { n_max: 10, .. })
        ));
    }

    #[test]
    fn invalid_inputs_rejected() {
        let ctrl = SeriesControl::default();
        assert!(gamma(&demo(), -1.0, &ctrl).is_err());
        assert!(gamma(&demo(), f64::NAN, &ctrl).is_err());
        assert!(gamma(&demo(), 1.0, &SeriesControl::with_n_max(0)).is_err());
        assert!(BathParams::new(0.1, 0.0, 0.0, 0.0, 1.0).is_err());
        assert!(BathParams::new(0.1, 0.0, 0.0, 1.0, 0.0).is_err());
        assert!(BathParams::new(-0.1, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(BathParams::new(0.1, -0.5, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn discrepancy_rows() {
        let ctrl = SeriesControl::default();
        let rows = discrepancy_report(&demo(), &[0.0], &ctrl).unwrap();
        assert_eq!(rows[0].gamma, 0.0);
        assert_eq!(rows[0].rel_diff, 0.0);
        let rows = discrepancy_report(&demo().with_lambda(0.0), &[0.4], &ctrl).unwrap();
        assert_eq!(rows[0].dgamma_termwise, 0.0);
        assert_eq!(rows[0].dgamma_paper, 0.0);
        assert!(discrepancy_report(&demo(), &[], &ctrl).is_err());
    }

    #[test]
    fn truncation_tail_matches_asymptote() {
        let p = BathParams::new(0.4, 0.5, 0.9, 1.0, 1.0).unwrap();
        for k in [1000u32, 4000] {
            let d = truncation_diagnostic(&p, 0.5, k).unwrap();
            assert!((d.term_at_k / d.predicted_term_at_k - 1.0).abs() < 0.05);
            // Σ_{k<n≤2k} c/n ≈ c·k·ln 2 in units of the per-term coefficient
            let predicted = d.predicted_term_at_k * k as f64 * 2f64.ln();
            assert!((d.difference / predicted - 1.0).abs() < 0.05);
        }
    }
}
