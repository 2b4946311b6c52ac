//! Estimation scenarios assembled from the bath, state and QFI layers.

use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::bath::{self, BathParams, DecayResult, SeriesControl};
use crate::lambert::lambert_w0;
use crate::qfi::{self, upper_bound_closed, ClosedForm, Method, QfiResult, W_SPECIAL_CASES};
use crate::state::{self, apply_dephasing, drho_dtemp, make_ghz, make_single, make_w, ProbeLayout, PureState};
use crate::{Error, Result};

/// Relative tolerance between the closed-form and spectral paths.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

/// Largest register cross-checked by the spectral evaluator in channel-use sweeps.
pub const SPECTRAL_LIMIT: usize = 8;

/// Largest register for random-state search.
pub const SEARCH_LIMIT: usize = 6;

/// Initial probe family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Single { theta0: f64, phi0: f64 },
    Bell,
    Ghz,
    W,
    Random { seed: u64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Single { .. } => "single",
            Family::Bell => "bell",
            Family::Ghz => "ghz",
            Family::W => "w",
            Family::Random { .. } => "random",
        }
    }
}

/// Probe family, layout, bath and series truncation for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategySpec {
    pub family: Family,
    pub layout: ProbeLayout,
    pub bath: BathParams,
    pub series: SeriesControl,
}

enum Closed {
    SinglePure(f64),
    Catalog(ClosedForm),
}

impl StrategySpec {
    pub fn new(family: Family, layout: ProbeLayout, bath: BathParams, series: SeriesControl) -> Result<Self> {
        let spec = Self {
            family,
            layout,
            bath,
            series,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.bath.validate()?;
        self.series.validate()?;
        let n = self.layout.n_total();
        let ok = match self.family {
            Family::Single { .. } => n == 1,
            Family::Bell => n == 2,
            Family::Ghz | Family::W => n >= 2,
            Family::Random { .. } => true,
        };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "family {} is incompatible with a {n}-qubit layout",
                self.family.name()
            )));
        }
        Ok(())
    }

    pub fn initial_state(&self) -> Result<PureState> {
        let n = self.layout.n_total();
        match self.family {
            Family::Single { theta0, phi0 } => Ok(make_single(theta0, phi0)),
            Family::Bell | Family::Ghz => make_ghz(n),
            Family::W => make_w(n),
            Family::Random { seed } => state::random_pure(n, seed),
        }
    }

    fn closed(&self) -> Option<Closed> {
        let (n_total, n_noisy) = (self.layout.n_total(), self.layout.n_noisy());
        match self.family {
            Family::Single { theta0, .. } => Some(Closed::SinglePure(theta0)),
            Family::Bell => Some(Closed::Catalog(if n_noisy == 1 {
                ClosedForm::BellAncilla
            } else {
                ClosedForm::BellParallel
            })),
            Family::Ghz => Some(Closed::Catalog(ClosedForm::Ghz { n_total, n_noisy })),
            Family::W if n_total >= 3 && n_noisy == n_total => Some(Closed::Catalog(ClosedForm::WParallel { n_total })),
            Family::W if n_total >= 3 && n_noisy == 1 => Some(Closed::Catalog(ClosedForm::WAncilla { n_total })),
            Family::W if W_SPECIAL_CASES.contains(&(n_total, n_noisy)) => {
                Some(Closed::Catalog(ClosedForm::WSpecial { n_total, n_noisy }))
            }
            _ => None,
        }
    }

    /// Closed-form QFI at (Γ, ∂Γ/∂T) when the family has one.
    pub fn closed_form_qfi(&self, gamma: f64, dgamma: f64) -> Result<Option<f64>> {
        Ok(match self.closed() {
            Some(Closed::SinglePure(theta0)) => Some(qfi::qfi_closed_single_pure(theta0, gamma, dgamma)?.value),
            Some(Closed::Catalog(form)) => Some(qfi::qfi_closed_catalog(form, gamma, dgamma)?.value),
            None => None,
        })
    }
}

/// Spectral QFI of `psi` after dephasing, at (Γ, ∂Γ/∂T).
pub fn spectral_qfi(psi: &PureState, layout: &ProbeLayout, gamma: f64, dgamma: f64) -> Result<f64> {
    let rho0 = psi.density();
    let rho = apply_dephasing(&rho0, layout, gamma)?;
    let drho = drho_dtemp(&rho0, layout, gamma, dgamma)?;
    qfi::qfi_spectral(&rho, &drho)
}

fn relative_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Below this magnitude the closed forms underflow (e^{2Γ} overflows) and
/// both paths are treated as zero.
pub const UNDERFLOW_FLOOR: f64 = 1e-250;

/// Fails with [`Error::ClosedFormMismatch`] when the two paths disagree.
pub fn cross_check(closed: f64, spectral: f64) -> Result<()> {
    if closed.abs() < UNDERFLOW_FLOOR && spectral.abs() < UNDERFLOW_FLOOR {
        return Ok(());
    }
    let rel = relative_gap(closed, spectral);
    if rel > CROSS_CHECK_TOL {
        return Err(Error::ClosedFormMismatch { closed, spectral, rel });
    }
    Ok(())
}

/// One evaluated scenario point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    /// Spectral QFI with the matching bound.
    pub qfi: QfiResult,
    /// Closed-form value, when the family has one.
    pub closed: Option<f64>,
    pub decay: DecayResult,
}

/// Evaluates a scenario at known (Γ, ∂Γ/∂T).
pub fn evaluate_at(spec: &StrategySpec, gamma: f64, dgamma: f64) -> Result<(QfiResult, Option<f64>)> {
    if gamma < 0.0 {
        return Err(Error::NegativeGamma(gamma));
    }
    if gamma == 0.0 {
        return Err(Error::Divergent("QFI at gamma = 0"));
    }
    let psi = spec.initial_state()?;
    let value = spectral_qfi(&psi, &spec.layout, gamma, dgamma)?;
    let closed = spec.closed_form_qfi(gamma, dgamma)?;
    if let Some(c) = closed {
        cross_check(c, value)?;
    }
    Ok((
        QfiResult {
            value,
            bound: Some(upper_bound_closed(spec.layout.n_noisy(), gamma, dgamma)?),
            gamma,
            dgamma,
            method: Method::Spectral,
        },
        closed,
    ))
}

/// Evaluates a scenario at time t.
pub fn evaluate(spec: &StrategySpec, t: f64) -> Result<Evaluation> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("evaluation time must be > 0, got {t}")));
    }
    spec.validate()?;
    let decay = bath::gamma(&spec.bath, t, &spec.series)?;
    let (qfi, closed) = evaluate_at(spec, decay.gamma, decay.dgamma_dt_temp)?;
    Ok(Evaluation { qfi, closed, decay })
}

/// One row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    /// Value of the swept variable (t, N, ...).
    pub x: f64,
    pub gamma: f64,
    pub dgamma: f64,
    pub qfi: f64,
    /// qfi / max over the sweep.
    pub qfi_normalized: f64,
    pub bound: f64,
    pub closed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub records: Vec<SweepRecord>,
    /// Index of the first record with the largest QFI.
    pub peak_index: usize,
}

impl Sweep {
    fn from_records(mut records: Vec<SweepRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyRange);
        }
        let mut peak_index = 0;
        for (i, r) in records.iter().enumerate() {
            if r.qfi > records[peak_index].qfi {
                peak_index = i;
            }
        }
        let max = records[peak_index].qfi;
        for r in &mut records {
            r.qfi_normalized = if max > 0.0 { r.qfi / max } else { 0.0 };
        }
        Ok(Self { records, peak_index })
    }

    pub fn peak(&self) -> &SweepRecord {
        &self.records[self.peak_index]
    }
}

fn check_time_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::EmptyRange);
    }
    if t_grid.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::InvalidParameter("time grid values must be finite and > 0".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("time grid must be strictly ascending".into()));
    }
    Ok(())
}

/// QFI over a time grid. Points are evaluated in parallel; record order
/// follows the grid.
pub fn sweep_time(spec: &StrategySpec, t_grid: &[f64]) -> Result<Sweep> {
    check_time_grid(t_grid)?;
    let records = t_grid
        .par_iter()
        .map(|&t| {
            let e = evaluate(spec, t)?;
            Ok(SweepRecord {
                x: t,
                gamma: e.decay.gamma,
                dgamma: e.decay.dgamma_dt_temp,
                qfi: e.qfi.value,
                qfi_normalized: 0.0,
                bound: e.qfi.bound.unwrap_or(f64::NAN),
                closed: e.closed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Sweep::from_records(records)
}

/// Refined maximum of the QFI over time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimePeak {
    pub t: f64,
    pub qfi: f64,
    pub gamma: f64,
    pub dgamma: f64,
}

/// Locates the QFI maximum: grid sweep, then golden-section search in ln t
/// between the neighbours of the best grid point.
pub fn locate_time_peak(spec: &StrategySpec, t_grid: &[f64]) -> Result<TimePeak> {
    let sweep = sweep_time(spec, t_grid)?;
    let i = sweep.peak_index;
    let lo = t_grid[i.saturating_sub(1)].ln();
    let hi = t_grid[(i + 1).min(t_grid.len() - 1)].ln();
    let f = |lt: f64| evaluate(spec, lt.exp()).map(|e| e.qfi.value);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > 1e-11 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let t = (0.5 * (a + b)).exp();
    let e = evaluate(spec, t)?;
    let best = TimePeak {
        t,
        qfi: e.qfi.value,
        gamma: e.decay.gamma,
        dgamma: e.decay.dgamma_dt_temp,
    };
    let grid_best = sweep.peak();
    if grid_best.qfi > best.qfi {
        return Ok(TimePeak {
            t: grid_best.x,
            qfi: grid_best.qfi,
            gamma: grid_best.gamma,
            dgamma: grid_best.dgamma,
        });
    }
    Ok(best)
}

/// Logarithmically spaced grid from `start` to `end` inclusive.
pub fn log_grid(start: f64, end: f64, steps: usize) -> Result<Vec<f64>> {
    if !(start > 0.0) || !(end > start) || steps < 2 {
        return Err(Error::InvalidParameter("log grid needs 0 < start < end and steps >= 2".into()));
    }
    let (a, b) = (start.ln(), end.ln());
    Ok((0..steps)
        .map(|i| match i {
            0 => start,
            _ if i == steps - 1 => end,
            _ => (a + (b - a) * i as f64 / (steps - 1) as f64).exp(),
        })
        .collect())
}

/// Linearly spaced grid from `start` to `end` inclusive.
pub fn linear_grid(start: f64, end: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 1 {
        return Ok(vec![start]);
    }
    if steps == 0 || !(end > start) {
        return Err(Error::InvalidParameter("linear grid needs start < end and steps >= 1".into()));
    }
    Ok((0..steps)
        .map(|i| if i == steps - 1 { end } else { start + (end - start) * i as f64 / (steps - 1) as f64 })
        .collect())
}

/// (W₀(−2e^{−2}) + 2)/2, the Γ·N product at the GHZ-parallel optimum.
pub fn ghz_opt_constant() -> f64 {
    let w = lambert_w0(-2.0 * (-2.0f64).exp()).expect("-2/e² lies above the branch point");
    (w + 2.0) / 2.0
}

/// Optimal GHZ-parallel register size: round-half-even(c/Γ), floored at 3.
pub fn optimal_n_ghz(gamma: f64) -> Result<usize> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma must be finite and > 0, got {gamma}")));
    }
    let x = (ghz_opt_constant() / gamma).round_ties_even();
    if x > 1e15 {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} gives an unrepresentable register size")));
    }
    Ok((x as usize).max(3))
}

/// N²/(e^{2NΓ} − 1), the GHZ-parallel QFI per unit (∂Γ/∂T)².
fn ghz_parallel_factor(n: usize, gamma: f64) -> f64 {
    let n = n as f64;
    n * n / (2.0 * n * gamma).exp_m1()
}

/// Argmax of the GHZ-parallel QFI over an integer range, ties to smaller N.
pub fn brute_force_optimal_n(gamma: f64, range: RangeInclusive<usize>) -> Result<usize> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma must be > 0, got {gamma}")));
    }
    if range.is_empty() {
        return Err(Error::EmptyRange);
    }
    if *range.start() < 3 || *range.end() > 1_000_000 {
        return Err(Error::InvalidParameter("range must lie within [3, 1e6]".into()));
    }
    let mut best = *range.start();
    let mut best_val = ghz_parallel_factor(best, gamma);
    for n in range {
        let v = ghz_parallel_factor(n, gamma);
        if v > best_val {
            best = n;
            best_val = v;
        }
    }
    Ok(best)
}

/// Parallel-strategy families swept over the number of channel uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParallelFamily {
    Ghz,
    W,
}

/// QFI versus N for a parallel family at fixed t. Closed forms for every N;
/// spectral cross-check up to [`SPECTRAL_LIMIT`] qubits.
pub fn sweep_channel_uses(
    family: ParallelFamily,
    n_range: RangeInclusive<usize>,
    bath: &BathParams,
    t: f64,
    series: &SeriesControl,
) -> Result<Sweep> {
    if n_range.is_empty() {
        return Err(Error::EmptyRange);
    }
    if *n_range.start() < 3 {
        return Err(Error::InvalidParameter("parallel closed forms are stated for N >= 3".into()));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t must be > 0, got {t}")));
    }
    let decay = bath::gamma(bath, t, series)?;
    let (g, dg) = (decay.gamma, decay.dgamma_dt_temp);
    if g < 0.0 {
        return Err(Error::NegativeGamma(g));
    }
    let ns: Vec<usize> = n_range.collect();
    let records = ns
        .par_iter()
        .map(|&n| {
            let form = match family {
                ParallelFamily::Ghz => ClosedForm::GhzParallel { n_total: n },
                ParallelFamily::W => ClosedForm::WParallel { n_total: n },
            };
            let closed = qfi::qfi_closed_catalog(form, g, dg)?;
            if n <= SPECTRAL_LIMIT {
                let (psi, layout) = form.probe()?;
                cross_check(closed.value, spectral_qfi(&psi, &layout, g, dg)?)?;
            }
            Ok(SweepRecord {
                x: n as f64,
                gamma: g,
                dgamma: dg,
                qfi: closed.value,
                qfi_normalized: 0.0,
                bound: closed.bound.unwrap_or(f64::NAN),
                closed: Some(closed.value),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Sweep::from_records(records)
}

/// Optimal GHZ register size across squeezing strengths at fixed t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingOptimum {
    pub r: f64,
    pub gamma: f64,
    pub n_opt: usize,
    pub n_brute: usize,
}

/// Sweep recipe for the squeezing dependence of the optimal GHZ size.
pub fn optimal_n_vs_squeezing(
    bath: &BathParams,
    t: f64,
    r_grid: &[f64],
    series: &SeriesControl,
    n_cap: usize,
) -> Result<Vec<SqueezingOptimum>> {
    r_grid
        .iter()
        .map(|&r| {
            let g = bath::gamma(&bath.with_r(r), t, series)?.gamma;
            Ok(SqueezingOptimum {
                r,
                gamma: g,
                n_opt: optimal_n_ghz(g)?,
                n_brute: brute_force_optimal_n(g, 3..=n_cap)?,
            })
        })
        .collect()
}

/// Outcome of a random-state search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub samples: u64,
    pub seed: u64,
    pub best_index: u64,
    pub best_state: PureState,
    pub best_qfi: f64,
    pub ghz_qfi: f64,
    pub w_qfi: f64,
    pub bound: f64,
    /// True when the best random QFI exceeds max(GHZ, W) by more than 1e-9.
    pub exceeded: bool,
}

impl SearchReport {
    pub fn reference(&self) -> f64 {
        self.ghz_qfi.max(self.w_qfi)
    }
}

/// Random search with a caller-supplied sampler for sample index i.
pub fn search_with_sampler<F>(
    layout: &ProbeLayout,
    gamma: f64,
    dgamma: f64,
    samples: u64,
    seed: u64,
    sampler: F,
) -> Result<SearchReport>
where
    F: Fn(u64) -> Result<PureState> + Sync,
{
    let n = layout.n_total();
    if !(2..=SEARCH_LIMIT).contains(&n) {
        return Err(Error::InvalidParameter(format!("random search supports 2 <= N <= {SEARCH_LIMIT}, got {n}")));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    if !(gamma > 0.0) {
        return Err(Error::Divergent("random search at gamma <= 0"));
    }
    let values = (0..samples)
        .into_par_iter()
        .map(|i| spectral_qfi(&sampler(i)?, layout, gamma, dgamma))
        .collect::<Result<Vec<f64>>>()?;
    let mut best_index = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best_index] {
            best_index = i;
        }
    }
    let best_qfi = values[best_index];
    let ghz_qfi = spectral_qfi(&make_ghz(n)?, layout, gamma, dgamma)?;
    let w_qfi = spectral_qfi(&make_w(n)?, layout, gamma, dgamma)?;
    Ok(SearchReport {
        samples,
        seed,
        best_index: best_index as u64,
        best_state: sampler(best_index as u64)?,
        best_qfi,
        ghz_qfi,
        w_qfi,
        bound: upper_bound_closed(layout.n_noisy(), gamma, dgamma)?,
        exceeded: best_qfi > ghz_qfi.max(w_qfi) + 1e-9,
    })
}

/// Haar-random search at (Γ, ∂Γ/∂T); sample i uses stream i of `seed`.
pub fn search_random_states(layout: &ProbeLayout, gamma: f64, dgamma: f64, samples: u64, seed: u64) -> Result<SearchReport> {
    let n = layout.n_total();
    search_with_sampler(layout, gamma, dgamma, samples, seed, |i| state::random_pure_indexed(n, seed, i))
}

/// Haar-random search with (Γ, ∂Γ/∂T) taken from the bath at time t.
pub fn search_random_states_at(
    layout: &ProbeLayout,
    bath: &BathParams,
    t: f64,
    series: &SeriesControl,
    samples: u64,
    seed: u64,
) -> Result<SearchReport> {
    let d = bath::gamma(bath, t, series)?;
    if d.gamma < 0.0 {
        return Err(Error::NegativeGamma(d.gamma));
    }
    search_random_states(layout, d.gamma, d.dgamma_dt_temp, samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn opt_constant_and_examples() {
        assert!((ghz_opt_constant() - 0.7968).abs() < 5e-5);
        assert_eq!(optimal_n_ghz(0.1).unwrap(), 8);
        assert_eq!(optimal_n_ghz(0.7968).unwrap(), 3);
        assert_eq!(optimal_n_ghz(0.2656).unwrap(), 3);
        assert_eq!(optimal_n_ghz(1.0).unwrap(), 3);
        assert!(optimal_n_ghz(0.0).is_err());
        assert!(optimal_n_ghz(-1.0).is_err());
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_optimal_n(0.1, 3..=200).unwrap(), 8);
        assert_eq!(brute_force_optimal_n(2.0, 3..=200).unwrap(), 3);
        let a = brute_force_optimal_n(0.01, 3..=1000).unwrap() as i64;
        let b = optimal_n_ghz(0.01).unwrap() as i64;
        assert!((a - b).abs() <= 1);
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 10..=5;
        assert_eq!(brute_force_optimal_n(0.1, empty), Err(Error::EmptyRange));
    }

    #[test]
    fn cross_check_tolerances() {
        assert!(cross_check(1.0, 1.0 + 1e-10).is_ok());
        assert!(matches!(cross_check(1.0, 1.0 + 1e-8), Err(Error::ClosedFormMismatch { .. })));
        assert!(cross_check(0.0, 1.4e-300).is_ok());
        assert!(cross_check(0.0, 1e-200).is_err());
    }

    #[test]
    fn grids() {
        let g = log_grid(1e-3, 1.0, 4).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!((g[0], g[3]), (1e-3, 1.0));
        assert!((g[1] - 1e-2).abs() < 1e-15);
        assert_eq!(linear_grid(0.5, 0.5, 1).unwrap(), vec![0.5]);
        assert!(log_grid(0.0, 1.0, 3).is_err());
    }

    #[test]
    fn spec_family_layout_consistency() {
        let bath = BathParams::new(0.4, 0.5, 0.9, 1.0, 100.0).unwrap();
        let two = ProbeLayout::parallel(2).unwrap();
        assert!(StrategySpec::new(Family::Single { theta0: 1.0, phi0: 0.0 }, two.clone(), bath, SeriesControl::default()).is_err());
        assert!(StrategySpec::new(Family::Bell, ProbeLayout::parallel(3).unwrap(), bath, SeriesControl::default()).is_err());
        assert!(StrategySpec::new(Family::W, two, bath, SeriesControl::default()).is_ok());
    }

    #[test]
    fn single_time_sweep_normalises_to_one() {
        let bath = BathParams::new(0.4, 0.5, 0.9, 1.0, 100.0).unwrap();
        let spec = StrategySpec::new(
            Family::Single { theta0: std::f64::consts::FRAC_PI_2, phi0: 0.0 },
            ProbeLayout::parallel(1).unwrap(),
            bath,
            SeriesControl::default(),
        )
        .unwrap();
        let s = sweep_time(&spec, &[0.01]).unwrap();
        assert_eq!(s.records[0].qfi_normalized, 1.0);
        assert!(sweep_time(&spec, &[0.02, 0.01]).is_err());
        assert!(sweep_time(&spec, &[0.0]).is_err());
        assert!(evaluate(&spec, 0.0).is_err());
    }
}
