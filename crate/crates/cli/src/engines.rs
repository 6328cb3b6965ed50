//! Scenario execution.

use std::time::Instant;

use anyhow::{anyhow, bail, Context};

use cqednet_core::chains::{
    build_single_chain, build_two_chain, eavesdrop_measure, initial_state, pair_reduction, site_populations,
    transmission_ratio, uniform_grid, werner_initial, TwoChainInitial,
};
use cqednet_core::correlations::{
    detect_kinks, BellDiagonalState, CorrelationPoint, Measure, Side, SuddenChangeOptions,
};
use cqednet_core::mme::{integrate_observed, temperature_for_occupation, Audit, IntegratorOptions, RateWeighting, TwoNodeModel};
use cqednet_core::multipartite::tangle_bounds;
use cqednet_core::network::{BareState, InitialState, NetworkParams};
use cqednet_core::qstate::{ComplexVector, DensityOperator, SubsystemLayout, ONE, ZERO};

use crate::config::{
    parse_pair, parse_site, ChainEngineParams, Engine, EngineParams, InitialSpec, MeasuredSide, Scenario,
    TwoNodeParams, Weighting,
};
use crate::output::{Summary, Table};

pub struct RunOutput {
    pub table: Table,
    pub summary: Summary,
}

/// Columns of the two-node series, after `t`.
pub const TWO_NODE_MEASURES: [&str; 8] = ["mutual_info", "cc", "qd", "gqd", "eof", "concurrence", "ge", "ree"];

pub fn run_scenario(s: &Scenario) -> anyhow::Result<RunOutput> {
    let start = Instant::now();
    let mut out = match (&s.params, s.raw.engine) {
        (EngineParams::TwoNode(p), Engine::TwoNodeMme) => run_two_node(s, p)?,
        (EngineParams::Chain(p), Engine::Chain) => run_single_chain(s, p)?,
        (EngineParams::Chain(p), Engine::TwoChain) => run_two_chain(s, p)?,
        (EngineParams::Chain(p), Engine::Tangle) => run_tangle(s, p)?,
        _ => unreachable!("parameters are parsed per engine"),
    };
    let mut head = Summary::default();
    head.push("scenario", &s.name);
    head.push("engine", s.raw.engine.name());
    head.push("samples", out.table.rows.len());
    head.push("wall_time_s", format!("{:.3}", start.elapsed().as_secs_f64()));
    head.extend(out.summary);
    out.summary = head;
    Ok(out)
}

fn push_audit(summary: &mut Summary, audit: &Audit) {
    summary.push("audit.max_trace_drift", format!("{:e}", audit.max_trace_drift));
    summary.push("audit.min_eigenvalue", format!("{:e}", audit.min_eigenvalue));
    summary.push("audit.steps", audit.steps);
}

fn detector_options(s: &Scenario) -> SuddenChangeOptions {
    let d = &s.raw.detector;
    SuddenChangeOptions {
        kappa: d.kappa,
        noise_factor: d.noise_factor,
        window: d.window,
        range: d.range.map(|r| (r[0], r[1])),
        ..SuddenChangeOptions::default()
    }
}

fn late_mean(v: &[f64], fraction: f64) -> f64 {
    let k = ((v.len() as f64 * fraction).ceil() as usize).clamp(1, v.len());
    v[v.len() - k..].iter().sum::<f64>() / k as f64
}

/// (max − min)/mean over the window.
pub fn flatness(t: &[f64], v: &[f64], window: [f64; 2]) -> Option<f64> {
    let w: Vec<f64> = t
        .iter()
        .zip(v)
        .filter(|(t, _)| **t >= window[0] && **t <= window[1])
        .map(|p| *p.1)
        .collect();
    if w.is_empty() {
        return None;
    }
    let max = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    Some((max - min) / mean.abs().max(1e-300))
}

fn fmt_times(v: &[f64]) -> String {
    v.iter().map(|t| format!("{t:.6}")).collect::<Vec<_>>().join(",")
}

fn analyse_columns(s: &Scenario, table: &Table, prefix: &str, summary: &mut Summary) -> anyhow::Result<()> {
    let t = table.column("t").context("missing time column")?;
    let opts = detector_options(s);
    for m in &s.raw.detector.measures {
        let Some(col) = table.column(&format!("{prefix}{m}")) else {
            continue;
        };
        let report = detect_kinks(&t, &col, &opts)?;
        summary.push(format!("sudden.{prefix}{m}.count"), report.count());
        summary.push(format!("sudden.{prefix}{m}.times"), fmt_times(&report.change_times));
    }
    let frac = s.raw.analysis.late_fraction.unwrap_or(0.05);
    for m in ["cc", "qd", "gqd", "eof", "concurrence"] {
        if let Some(col) = table.column(&format!("{prefix}{m}")) {
            summary.push(format!("late.{prefix}{m}"), format!("{:.9}", late_mean(&col, frac)));
            if let Some(w) = s.raw.analysis.plateau {
                if let Some(f) = flatness(&t, &col, w) {
                    summary.push(format!("flatness.{prefix}{m}"), format!("{f:.9}"));
                }
            }
        }
    }
    Ok(())
}

fn requested(s: &Scenario, measure: &str) -> bool {
    measure != "ree" && (s.raw.outputs.is_empty() || s.raw.outputs.iter().any(|o| o == measure))
}

fn point_value(p: &CorrelationPoint, name: &str) -> Option<f64> {
    Measure::from_name(name).map(|m| p.get(m))
}

pub fn network_params(p: &TwoNodeParams) -> anyhow::Result<NetworkParams> {
    let given = [p.nbar.is_some(), p.temps.is_some(), p.temp.is_some()];
    if given.iter().filter(|&&b| b).count() > 1 {
        bail!("give at most one of params.nbar, params.temps and params.temp");
    }
    let temps = match (p.nbar, p.temps) {
        (Some(n), _) => [
            temperature_for_occupation(p.omega_0, n[0])?,
            temperature_for_occupation(p.omega_0, n[1])?,
            temperature_for_occupation(p.omega_f, n[2])?,
        ],
        (None, Some(t)) => t,
        (None, None) => [p.temp.unwrap_or(0.0); 3],
    };
    Ok(NetworkParams {
        omega_a: p.omega_a,
        omega_0: p.omega_0,
        omega_f: p.omega_f,
        g1: p.g,
        g2: p.g,
        j: p.j,
        gamma: [p.gamma; 3],
        temps,
    })
}

fn run_two_node(s: &Scenario, p: &TwoNodeParams) -> anyhow::Result<RunOutput> {
    let params = network_params(p)?;
    let weighting = match p.weighting {
        Weighting::ChannelOccupation => RateWeighting::ChannelOccupation,
        Weighting::GroundMatrixElement => RateWeighting::GroundMatrixElement,
    };
    let init = match &s.raw.initial_state {
        InitialSpec::BellDiagonal { c } => InitialState::BellDiagonal(BellDiagonalState::new(*c)?),
        InitialSpec::Bare { label } => InitialState::Bare(BareState::parse(label)?),
        other => bail!("initial state {other:?} is not available for engine two_node_mme"),
    };
    let model = TwoNodeModel::new(params, p.n_max, weighting)?;
    let rho0 = model.initial_state(&init)?;

    // the grid is given in γt unless the unit says otherwise
    let unit = s.raw.time_grid.unit.as_deref().unwrap_or("gamma_t");
    let scale = match unit {
        "gamma_t" => {
            if !(p.gamma > 0.0) {
                bail!("time unit gamma_t needs gamma > 0");
            }
            1.0 / p.gamma
        }
        "t" => 1.0,
        u => bail!("unknown time unit {u:?} for engine two_node_mme (use gamma_t or t)"),
    };
    let grid_scaled = uniform_grid(s.raw.time_grid.t_max, s.raw.time_grid.n_samples);
    let grid: Vec<f64> = grid_scaled.iter().map(|t| t * scale).collect();
    let traj = model.integrate(&rho0, &grid, &IntegratorOptions::default())?;
    let side = match p.side {
        MeasuredSide::A => Side::A,
        MeasuredSide::B => Side::B,
    };
    let series = model.correlations(&traj, side)?;

    let mut header = vec!["t".to_string()];
    header.extend(TWO_NODE_MEASURES.iter().map(|m| m.to_string()));
    header.push("p_vac".into());
    let mut table = Table::new(header);
    for (ts, point) in grid_scaled.iter().zip(&series.points) {
        let mut row = vec![Some(*ts)];
        for m in TWO_NODE_MEASURES {
            row.push(if requested(s, m) { point_value(point, m) } else { None });
        }
        row.push(Some(point.p_vac));
        table.rows.push(row);
    }

    let mut summary = Summary::default();
    summary.push("time_unit", unit);
    push_audit(&mut summary, &traj.audit);
    summary.push("general_path_samples", series.general_path_count());
    for w in &model.warnings {
        summary.push("warning", w);
    }
    summary.push("dressed_dimension", model.dressed.dim());
    analyse_columns(s, &table, "", &mut summary)?;
    Ok(RunOutput { table, summary })
}

fn check_chain_unit(s: &Scenario) -> anyhow::Result<()> {
    match s.raw.time_grid.unit.as_deref() {
        None | Some("lambda_t") => Ok(()),
        Some(u) => bail!("unknown time unit {u:?} for engine {} (use lambda_t)", s.raw.engine.name()),
    }
}

fn chain_options(p: &ChainEngineParams) -> IntegratorOptions {
    IntegratorOptions {
        audit_positivity: p.audit_positivity,
        step_factor: p.step_factor,
        ..IntegratorOptions::default()
    }
}

fn site_labels(sites: usize) -> Vec<String> {
    (1..=sites).flat_map(|k| [format!("{k}"), format!("{k}'")]).collect()
}

fn run_single_chain(s: &Scenario, p: &ChainEngineParams) -> anyhow::Result<RunOutput> {
    check_chain_unit(s)?;
    let cp = p.chain_params();
    let warnings = cp.validate()?;
    let net = build_single_chain(&cp)?;
    let start = match s.raw.initial_state {
        InitialSpec::Site { site } if site >= 1 && site <= p.sites => site - 1,
        InitialSpec::Site { site } => bail!("initial site {site} outside a {}-site chain", p.sites),
        ref other => bail!("initial state {other:?} is not available for engine chain"),
    };
    let dim = 1usize << p.sites;
    let mut psi = ComplexVector::from_element(dim, ZERO);
    psi[cqednet_core::chains::basis_index(&[start], p.sites)?] = ONE;
    let rho0 = DensityOperator::from_pure(&psi)?;

    let grid = uniform_grid(s.raw.time_grid.t_max, s.raw.time_grid.n_samples);
    let mut header = vec!["t".to_string(), "purity".to_string()];
    header.extend((1..=p.sites).map(|k| format!("pop_{k}")));
    let mut table = Table::new(header);
    let audit = integrate_observed(&net, rho0.matrix(), &grid, &chain_options(p), |t, rho| {
        let mut row = vec![Some(t), Some(rho.iter().map(|z| z.norm_sqr()).sum())];
        row.extend(site_populations(rho).into_iter().map(Some));
        table.rows.push(row);
        Ok(())
    })?;

    let mut summary = Summary::default();
    summary.push("time_unit", "lambda_t");
    summary.push("lambda", format!("{:e}", cp.lambda()));
    push_audit(&mut summary, &audit);
    for w in warnings {
        summary.push("warning", w);
    }
    let t = table.column("t").unwrap();
    let last = table.column(&format!("pop_{}", p.sites)).unwrap();
    let i = (0..last.len()).max_by(|&a, &b| last[a].total_cmp(&last[b])).unwrap_or(0);
    summary.push("end_site.peak_population", format!("{:.9}", last[i]));
    summary.push("end_site.peak_time", format!("{:.6}", t[i]));
    Ok(RunOutput { table, summary })
}

fn two_chain_initial(s: &Scenario, sites: usize) -> anyhow::Result<DensityOperator> {
    Ok(match &s.raw.initial_state {
        InitialSpec::PsiA { theta } => initial_state(TwoChainInitial::A, theta.radians()?, sites)?,
        InitialSpec::PsiB { theta } => initial_state(TwoChainInitial::B, theta.radians()?, sites)?,
        InitialSpec::Werner { a } => werner_initial(*a, sites)?,
        other => bail!("initial state {other:?} is not available for two-chain engines"),
    })
}

const PAIR_MEASURES: [&str; 7] = ["mutual_info", "cc", "qd", "gqd", "eof", "concurrence", "ge"];

fn run_two_chain(s: &Scenario, p: &ChainEngineParams) -> anyhow::Result<RunOutput> {
    check_chain_unit(s)?;
    let cp = p.chain_params();
    let warnings = cp.validate()?;
    let net = build_two_chain(&cp)?;
    let rho0 = two_chain_initial(s, p.sites)?;
    let pairs: Vec<(String, (usize, usize))> = p
        .pairs
        .iter()
        .map(|l| Ok((l.clone(), parse_pair(l, p.sites)?)))
        .collect::<anyhow::Result<_>>()?;
    let measured = p.measure_site.as_deref().map(|l| parse_site(l, p.sites)).transpose()?;

    let labels = site_labels(p.sites);
    let mut header = vec!["t".to_string(), "purity".to_string()];
    header.extend(labels.iter().map(|l| format!("pop_{l}")));
    for (l, _) in &pairs {
        header.extend(PAIR_MEASURES.iter().map(|m| format!("{l}_{m}")));
        header.push(format!("{l}_ree"));
        if measured.is_some() {
            header.push(format!("{l}_qdm"));
        }
    }
    let mut table = Table::new(header);
    let grid = uniform_grid(s.raw.time_grid.t_max, s.raw.time_grid.n_samples);
    let audit = integrate_observed(&net, rho0.matrix(), &grid, &chain_options(p), |t, rho| {
        let mut row = vec![Some(t), Some(rho.iter().map(|z| z.norm_sqr()).sum())];
        row.extend(site_populations(rho).into_iter().map(Some));
        let after = measured.map(|site| eavesdrop_measure(rho, site)).transpose()?;
        for (_, (a, b)) in &pairs {
            let point = CorrelationPoint::evaluate(t, &pair_reduction(rho, *a, *b)?, f64::NAN, Side::B)?;
            for m in PAIR_MEASURES {
                row.push(if requested(s, m) { point_value(&point, m) } else { None });
            }
            row.push(None);
            if let Some(m) = &after {
                let q = CorrelationPoint::evaluate(t, &pair_reduction(m.matrix(), *a, *b)?, f64::NAN, Side::B)?;
                row.push(Some(q.qd));
            }
        }
        table.rows.push(row);
        Ok(())
    })?;

    let mut summary = Summary::default();
    summary.push("time_unit", "lambda_t");
    summary.push("lambda", format!("{:e}", cp.lambda()));
    push_audit(&mut summary, &audit);
    for w in warnings {
        summary.push("warning", w);
    }
    let purity = table.column("purity").unwrap();
    summary.push("purity.min", format!("{:.9}", purity.iter().cloned().fold(f64::INFINITY, f64::min)));
    for (l, _) in &pairs {
        let mean = |name: &str| {
            table
                .column(&format!("{l}_{name}"))
                .filter(|v| !v.is_empty())
                .map(|v| v.iter().sum::<f64>() / v.len() as f64)
        };
        for m in ["qd", "eof", "concurrence", "qdm"] {
            if let Some(v) = mean(m) {
                summary.push(format!("mean.{l}_{m}"), format!("{v:.9}"));
            }
        }
        if let (Some(e), Some(q)) = (table.column(&format!("{l}_eof")), table.column(&format!("{l}_qd"))) {
            let hits = e.iter().zip(&q).filter(|(e, q)| **e == 0.0 && **q > 0.01).count();
            summary.push(format!("robust.{l}_samples_eof0_qd_gt_0.01"), hits);
        }
    }
    if let Some([src, dst]) = &p.transmission {
        let c_src = table
            .column(&format!("{src}_concurrence"))
            .ok_or_else(|| anyhow!("transmission source {src:?} is not among the analysed pairs"))?;
        let c_dst = table
            .column(&format!("{dst}_concurrence"))
            .ok_or_else(|| anyhow!("transmission destination {dst:?} is not among the analysed pairs"))?;
        let peak = transmission_ratio(&grid, &c_dst, c_src[0])?;
        summary.push("transmission.percent", format!("{:.6}", peak.percent));
        summary.push("transmission.t_peak", format!("{:.6}", peak.t_peak));
    }
    for (l, _) in &pairs {
        analyse_columns(s, &table, &format!("{l}_"), &mut summary)?;
    }
    Ok(RunOutput { table, summary })
}

fn run_tangle(s: &Scenario, p: &ChainEngineParams) -> anyhow::Result<RunOutput> {
    check_chain_unit(s)?;
    let cp = p.chain_params();
    let warnings = cp.validate()?;
    let net = build_two_chain(&cp)?;
    let rho0 = two_chain_initial(s, p.sites)?;
    let reference = parse_site(&p.reference_site, p.sites)?;
    let n = 2 * p.sites;
    let layout = SubsystemLayout::qubits(n);
    let labels = site_labels(p.sites);

    let mut header: Vec<String> = [
        "t",
        "purity",
        "marginal_purity",
        "one_to_rest_c2",
        "pairwise_c2_sum",
        "tau_lower",
        "tau_upper",
        "valid",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend((0..n).filter(|&k| k != reference).map(|k| format!("c2_{}", labels[k])));
    let mut table = Table::new(header);
    let grid = uniform_grid(s.raw.time_grid.t_max, s.raw.time_grid.n_samples);
    let audit = integrate_observed(&net, rho0.matrix(), &grid, &chain_options(p), |t, rho| {
        let state = DensityOperator::from_matrix_unchecked(rho.clone());
        let r = tangle_bounds(&state, reference, &layout, p.purity_threshold)?;
        let mut row = vec![
            Some(t),
            Some(r.total_purity),
            Some(r.marginal_purity),
            Some(r.one_to_rest_c2),
            Some(r.pairwise_sum()),
            Some(r.tau_lower),
            Some(r.tau_upper),
            Some(if r.valid { 1.0 } else { 0.0 }),
        ];
        row.extend(r.pairwise_c2.iter().map(|c| Some(c.1)));
        table.rows.push(row);
        Ok(())
    })?;

    let mut summary = Summary::default();
    summary.push("time_unit", "lambda_t");
    summary.push("reference_site", &p.reference_site);
    push_audit(&mut summary, &audit);
    for w in warnings {
        summary.push("warning", w);
    }
    let t = table.column("t").unwrap();
    let purity = table.column("purity").unwrap();
    let lower = table.column("tau_lower").unwrap();
    let upper = table.column("tau_upper").unwrap();
    let valid = table.column("valid").unwrap();
    summary.push("tau.initial_upper", format!("{:e}", upper[0]));
    summary.push("tau.max_abs_upper", format!("{:e}", upper.iter().fold(0.0f64, |a, v| a.max(v.abs()))));
    summary.push("tau.max_upper", format!("{:.9}", upper.iter().cloned().fold(f64::NEG_INFINITY, f64::max)));
    summary.push("purity.min", format!("{:.9}", purity.iter().cloned().fold(f64::INFINITY, f64::min)));
    let i_low = (0..lower.len()).min_by(|&a, &b| lower[a].total_cmp(&lower[b])).unwrap_or(0);
    summary.push("tau.min_lower", format!("{:.9}", lower[i_low]));
    summary.push("tau.min_lower_time", format!("{:.6}", t[i_low]));
    let invalid: Vec<f64> = t.iter().zip(&valid).filter(|(_, v)| **v == 0.0).map(|p| *p.0).collect();
    summary.push("invalid.fraction", format!("{:.6}", invalid.len() as f64 / t.len() as f64));
    summary.push("invalid.first_time", invalid.first().map(|t| format!("{t:.6}")).unwrap_or_default());
    Ok(RunOutput { table, summary })
}
