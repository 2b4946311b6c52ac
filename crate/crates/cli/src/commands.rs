use qthermo::bath::{self, DecayResult};
use qthermo::qfi::{self, KrausBound};
use qthermo::state::{apply_dephasing, drho_dtemp};
use qthermo::strategies::{self, ParallelFamily, StrategySpec};
use qthermo::Error;

use crate::config::{RunConfig, StateKind, StrategyKind, SweepVar};
use crate::output::{Cell, Report};
use crate::CliError;

/// Largest register handled by the dense per-state commands (bound, sld).
const DENSE_LIMIT: usize = 6;

fn decay(cfg: &RunConfig, t: f64) -> Result<DecayResult, CliError> {
    let d = bath::gamma(&cfg.bath, t, &cfg.series)?;
    if !d.is_physical() {
        eprintln!("warning: negative decay factor Γ = {} at t = {t}", d.gamma);
    }
    Ok(d)
}

pub fn gamma(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut rep = Report::new(
        "gamma",
        cfg.echo(),
        vec!["t", "gamma", "dgamma_termwise", "dgamma_paper", "terms_used", "tail_estimate"],
    );
    for t in cfg.time_grid()? {
        let d = decay(cfg, t)?;
        rep.push(vec![
            t.into(),
            d.gamma.into(),
            d.dgamma_dt_temp.into(),
            d.dgamma_paper.into(),
            d.terms_used.into(),
            d.tail_estimate.into(),
        ]);
    }
    Ok(rep)
}

fn spec(cfg: &RunConfig) -> Result<StrategySpec, CliError> {
    Ok(StrategySpec::new(cfg.family(), cfg.layout()?, cfg.bath, cfg.series)?)
}

pub fn qfi(cfg: &RunConfig) -> Result<Report, CliError> {
    let (x_name, sweep) = match cfg.sweep {
        SweepVar::T => ("t", strategies::sweep_time(&spec(cfg)?, &cfg.time_grid()?)?),
        SweepVar::N => {
            let family = match (cfg.state, cfg.strategy) {
                (StateKind::Ghz, StrategyKind::Parallel) => ParallelFamily::Ghz,
                (StateKind::W, StrategyKind::Parallel) => ParallelFamily::W,
                _ => return Err(CliError::input("--sweep N needs --state ghz|w with --strategy parallel".into())),
            };
            let t = cfg.single_time()?;
            ("N", strategies::sweep_channel_uses(family, cfg.n_start..=cfg.n_end, &cfg.bath, t, &cfg.series)?)
        }
    };
    let mut columns = vec![x_name, "gamma", "dgamma", "qfi"];
    if cfg.normalize {
        columns.push("qfi_normalized");
    }
    columns.extend(["bound", "qfi_closed", "peak"]);
    let mut rep = Report::new("qfi", cfg.echo(), columns);
    for (i, r) in sweep.records.iter().enumerate() {
        let x = if x_name == "N" { Cell::Int(r.x as i64) } else { r.x.into() };
        let mut row = vec![x, r.gamma.into(), r.dgamma.into(), r.qfi.into()];
        if cfg.normalize {
            row.push(r.qfi_normalized.into());
        }
        row.extend([r.bound.into(), r.closed.into(), (i == sweep.peak_index).into()]);
        rep.push(row);
    }
    let peak = sweep.peak();
    rep.summary = vec![("peak_x", peak.x.into()), ("peak_qfi", peak.qfi.into()), ("peak_gamma", peak.gamma.into())];
    Ok(rep)
}

fn check_dense(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.n_total > DENSE_LIMIT {
        return Err(CliError::input(format!("this command supports N <= {DENSE_LIMIT}, got {}", cfg.n_total)));
    }
    Ok(())
}

fn positive_gamma(d: &DecayResult) -> Result<(), CliError> {
    if d.gamma < 0.0 {
        return Err(Error::NegativeGamma(d.gamma).into());
    }
    Ok(())
}

pub fn bound(cfg: &RunConfig) -> Result<Report, CliError> {
    check_dense(cfg)?;
    let spec = spec(cfg)?;
    let layout = cfg.layout()?;
    let rho0 = spec.initial_state()?.density();
    let mut rep = Report::new(
        "bound",
        cfg.echo(),
        vec![
            "t",
            "gamma",
            "dgamma",
            "qfi",
            "bound_closed",
            "bound_kraus",
            "i1_identity_deviation",
            "i2_max_abs",
            "saturation",
        ],
    );
    for t in cfg.time_grid()? {
        let d = decay(cfg, t)?;
        positive_gamma(&d)?;
        let (g, dg) = (d.gamma, d.dgamma_dt_temp);
        let e = strategies::evaluate_at(&spec, g, dg)?.0;
        let closed = qfi::upper_bound_closed(layout.n_noisy(), g, dg)?;
        let k = KrausBound::new(&layout, g, dg)?.evaluate(&rho0)?;
        rep.push(vec![
            t.into(),
            g.into(),
            dg.into(),
            e.value.into(),
            closed.into(),
            k.value.into(),
            k.i1_identity_deviation.into(),
            k.i2_max_abs.into(),
            (e.value / closed).into(),
        ]);
    }
    Ok(rep)
}

pub fn sld(cfg: &RunConfig) -> Result<Report, CliError> {
    check_dense(cfg)?;
    let spec = spec(cfg)?;
    let layout = cfg.layout()?;
    let rho0 = spec.initial_state()?.density();
    let single = cfg.n_total == 1;
    let mut columns = vec!["t", "gamma", "dgamma", "qfi", "tr_rho_l2", "tr_drho_l", "sld_defect"];
    if single {
        columns.extend(["l00", "l01_re", "l01_im", "l11", "printed_sld_defect"]);
    }
    let mut rep = Report::new("sld", cfg.echo(), columns);
    for t in cfg.time_grid()? {
        let d = decay(cfg, t)?;
        positive_gamma(&d)?;
        let (g, dg) = (d.gamma, d.dgamma_dt_temp);
        let rho = apply_dephasing(&rho0, &layout, g)?;
        let drho = drho_dtemp(&rho0, &layout, g, dg)?;
        let l = qfi::sld(&rho, &drho)?;
        let c = qfi::sld_consistency(&rho, &drho, &l);
        let mut row = vec![
            t.into(),
            g.into(),
            dg.into(),
            qfi::qfi_spectral(&rho, &drho)?.into(),
            c.rho_l2.into(),
            c.drho_l.into(),
            c.defect.into(),
        ];
        if single {
            let m = rho0.matrix();
            let printed = qfi::sld_closed_single(m[(0, 0)].re, m[(0, 1)], g, dg)?;
            row.extend([
                l[(0, 0)].re.into(),
                l[(0, 1)].re.into(),
                l[(0, 1)].im.into(),
                l[(1, 1)].re.into(),
                printed.defect.into(),
            ]);
        }
        rep.push(row);
    }
    Ok(rep)
}

fn brute_cap(gamma: f64) -> usize {
    let guess = 4.0 * strategies::ghz_opt_constant() / gamma;
    (guess.ceil() as usize).clamp(1000, 1_000_000)
}

pub fn opt_n(cfg: &RunConfig) -> Result<Report, CliError> {
    let c = strategies::ghz_opt_constant();
    let mut rep = Report::new("opt-n", cfg.echo(), vec!["r", "t", "gamma", "n_opt", "n_brute_force", "lambert_constant"]);
    let mut row = |r: Cell, t: Cell, g: f64| -> Result<(), CliError> {
        let n_opt = strategies::optimal_n_ghz(g)?;
        let brute = strategies::brute_force_optimal_n(g, 3..=brute_cap(g))?;
        rep.push(vec![r, t, g.into(), n_opt.into(), brute.into(), c.into()]);
        Ok(())
    };
    match (&cfg.r_values, cfg.gamma) {
        (Some(_), Some(_)) => return Err(CliError::input("--r-values and --gamma are mutually exclusive".into())),
        (None, Some(g)) => row(Cell::Empty, Cell::Empty, g)?,
        (None, None) => {
            let t = cfg.single_time()?;
            row(cfg.bath.r.into(), t.into(), decay(cfg, t)?.gamma)?
        }
        (Some(rs), None) => {
            let t = cfg.single_time()?;
            for &r in rs {
                let g = bath::gamma(&cfg.bath.with_r(r), t, &cfg.series)?.gamma;
                row(r.into(), t.into(), g)?;
            }
        }
    }
    Ok(rep)
}

pub fn search(cfg: &RunConfig) -> Result<Report, CliError> {
    if cfg.samples == 0 {
        return Err(CliError::input("--samples must be >= 1".into()));
    }
    if cfg.n_total > strategies::SEARCH_LIMIT {
        return Err(CliError::input(format!(
            "random search supports N <= {}, got {}",
            strategies::SEARCH_LIMIT,
            cfg.n_total
        )));
    }
    let t = cfg.single_time()?;
    let layout = cfg.layout()?;
    let rep_search = strategies::search_random_states_at(&layout, &cfg.bath, t, &cfg.series, cfg.samples, cfg.seed)?;
    let d = decay(cfg, t)?;
    let mut rep = Report::new("search", cfg.echo(), vec!["index", "basis", "re", "im"]);
    rep.summary = vec![
        ("gamma", d.gamma.into()),
        ("dgamma", d.dgamma_dt_temp.into()),
        ("best_index", Cell::Int(rep_search.best_index as i64)),
        ("best_qfi", rep_search.best_qfi.into()),
        ("ghz_qfi", rep_search.ghz_qfi.into()),
        ("w_qfi", rep_search.w_qfi.into()),
        ("bound", rep_search.bound.into()),
        ("verdict", if rep_search.exceeded { "exceeded" } else { "not exceeded" }.into()),
    ];
    let n = cfg.n_total;
    for (i, a) in rep_search.best_state.amplitudes().iter().enumerate() {
        rep.push(vec![i.into(), Cell::Text(format!("{i:0n$b}")), a.re.into(), a.im.into()]);
    }
    Ok(rep)
}
