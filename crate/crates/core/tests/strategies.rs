use std::f64::consts::FRAC_PI_2;

use qthermo::bath::{BathParams, SeriesControl};
use qthermo::lambert::lambert_w0;
use qthermo::qfi::{qfi_closed_catalog, ClosedForm};
use qthermo::state::{make_ghz, ProbeLayout};
use qthermo::strategies::{self, Family, ParallelFamily, StrategySpec};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn demo_bath() -> BathParams {
    BathParams::new(0.4, 0.5, 0.9, 1.0, 100.0).unwrap()
}

fn spec(family: Family, layout: ProbeLayout) -> StrategySpec {
    StrategySpec::new(family, layout, demo_bath(), SeriesControl::default()).unwrap()
}

#[test]
fn lambert_constant_against_bisection() {
    // plain bisection oracle on w·e^w = −2e^{−2} over [−1, 0]
    let z = -2.0 * (-2.0f64).exp();
    let (mut lo, mut hi) = (-1.0f64, 0.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * mid.exp() < z {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let w = lambert_w0(z).unwrap();
    assert!((w - lo).abs() < 1e-12);
    assert!((w + 0.406375).abs() < 1e-6);
    let c = strategies::ghz_opt_constant();
    assert_eq!(format!("{c:.4}"), "0.7968");
}

#[test]
fn optimal_n_agrees_with_brute_force() {
    for &g in &[0.005, 0.01, 0.05, 0.1, 0.3] {
        let a = strategies::optimal_n_ghz(g).unwrap() as i64;
        let b = strategies::brute_force_optimal_n(g, 3..=10_000).unwrap() as i64;
        assert!((a - b).abs() <= 1, "Γ = {g}: {a} vs {b}");
    }
    assert_eq!(strategies::optimal_n_ghz(0.05).unwrap(), 16);
    assert_eq!(strategies::brute_force_optimal_n(0.05, 3..=200).unwrap(), 16);
}

#[test]
fn evaluate_cross_checks_closed_forms() {
    let t = 0.01;
    let single = strategies::evaluate(&spec(Family::Single { theta0: FRAC_PI_2, phi0: 0.0 }, ProbeLayout::parallel(1).unwrap()), t).unwrap();
    assert!(single.closed.is_some());
    let w43 = strategies::evaluate(&spec(Family::W, ProbeLayout::ancilla(4, 3).unwrap()), t).unwrap();
    let special = qfi_closed_catalog(ClosedForm::WSpecial { n_total: 4, n_noisy: 3 }, w43.decay.gamma, w43.decay.dgamma_dt_temp).unwrap();
    assert!(rel(w43.qfi.value, special.value) < 1e-9);
    // ghz(3,1) and the equatorial single qubit give the same QFI
    let ghz31 = strategies::evaluate(&spec(Family::Ghz, ProbeLayout::ancilla(3, 1).unwrap()), t).unwrap();
    assert!(rel(ghz31.qfi.value, single.qfi.value) < 1e-12);
}

#[test]
fn ghz_qfi_depends_only_on_noisy_count() {
    let t = 0.008;
    for n in 1..=6 {
        let vals: Vec<f64> = (n.max(2)..=6)
            .map(|total| strategies::evaluate(&spec(Family::Ghz, ProbeLayout::ancilla(total, n).unwrap()), t).unwrap().qfi.value)
            .collect();
        for v in &vals {
            assert!(rel(*v, vals[0]) < 1e-9, "n = {n}");
        }
    }
}

#[test]
fn time_sweep_has_single_interior_peak() {
    let s = spec(Family::Single { theta0: FRAC_PI_2, phi0: 0.0 }, ProbeLayout::parallel(1).unwrap());
    let grid = strategies::log_grid(1e-4, 0.1, 120).unwrap();
    let sweep = strategies::sweep_time(&s, &grid).unwrap();
    let p = sweep.peak_index;
    assert!(p > 0 && p < grid.len() - 1);
    assert!(sweep.records[..=p].windows(2).all(|w| w[1].qfi > w[0].qfi));
    assert!(sweep.records[p..].windows(2).all(|w| w[1].qfi < w[0].qfi));
    assert!(sweep.records.iter().all(|r| (0.0..=1.0).contains(&r.qfi_normalized)));
    assert_eq!(sweep.peak().qfi_normalized, 1.0);
    let peak = strategies::locate_time_peak(&s, &grid).unwrap();
    assert!((peak.gamma - 0.797).abs() < 0.01, "Γ at peak {}", peak.gamma);
    // sweeps are deterministic despite parallel evaluation
    assert_eq!(strategies::sweep_time(&s, &grid).unwrap(), sweep);
}

#[test]
fn channel_use_sweeps() {
    let bath = BathParams::new(0.1, 0.2, 0.4, 1.0, 100.0).unwrap();
    let t = 0.004;
    let ghz = strategies::sweep_channel_uses(ParallelFamily::Ghz, 3..=40, &bath, t, &SeriesControl::default()).unwrap();
    let g = ghz.records[0].gamma;
    let n_best = strategies::brute_force_optimal_n(g, 3..=40).unwrap();
    assert_eq!(ghz.peak().x as usize, n_best);
    let after: Vec<f64> = ghz.records.iter().filter(|r| r.x as usize >= n_best).map(|r| r.qfi).collect();
    assert!(after.windows(2).all(|w| w[1] < w[0]));

    let w = strategies::sweep_channel_uses(ParallelFamily::W, 3..=12, &bath, t, &SeriesControl::default()).unwrap();
    assert!(w.records.windows(2).all(|p| p[1].qfi > p[0].qfi));
}

#[test]
fn squeezing_shifts_optimal_register_size() {
    let bath = BathParams::new(0.1, 0.2, 0.4, 1.0, 100.0).unwrap();
    let rows = strategies::optimal_n_vs_squeezing(&bath, 0.004, &[0.2, 2.0], &SeriesControl::default(), 1000).unwrap();
    assert_ne!(rows[0].n_brute, rows[1].n_brute);
    for r in &rows {
        assert!((r.n_opt as i64 - r.n_brute as i64).abs() <= 1);
    }
}

#[test]
fn search_with_injected_ghz_returns_reference() {
    let layout = ProbeLayout::parallel(3).unwrap();
    let r = strategies::search_with_sampler(&layout, 0.2, 1.0, 1, 0, |_| make_ghz(3)).unwrap();
    assert_eq!(r.best_qfi, r.ghz_qfi);
    assert!(!r.exceeded);
}

#[test]
fn search_is_deterministic() {
    let layout = ProbeLayout::ancilla(3, 1).unwrap();
    let a = strategies::search_random_states(&layout, 0.3, 1.0, 500, 42).unwrap();
    let b = strategies::search_random_states(&layout, 0.3, 1.0, 500, 42).unwrap();
    assert_eq!(a, b);
    assert!(a.best_qfi <= a.bound + 1e-9);
    assert!(strategies::search_random_states(&ProbeLayout::parallel(7).unwrap(), 0.3, 1.0, 1, 0).is_err());
    assert!(strategies::search_random_states(&layout, 0.3, 1.0, 0, 0).is_err());
}
