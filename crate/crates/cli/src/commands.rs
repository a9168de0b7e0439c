//! One runner per subcommand.

use serde_json::json;

use fdeform_core::acceptance::Check;
use fdeform_core::classical::{
    integrate, measure_frequency, predicted_frequency, Integrator, OscState, TrajectoryConfig,
};
use fdeform_core::deform::{
    f_bar_fermion, f_squared_boson, lepton_fit, solve_f_from_gh_boson, solve_f_from_gh_fermion, DeformationSpec,
};
use fdeform_core::field::{
    build_field_with_margin, hamiltonian, verify_deformed_relations, FieldConfig, MassSquared,
};
use fdeform_core::fock::{
    build_boson_rep, build_fermion_modes, check_general_relation, check_jordan_schwinger, check_qboson_relation,
    deform, deformed_spectrum, ResidualReport,
};
use fdeform_core::hubbard::{
    build_deformed_hubbard, diagonalize, hopping_amplitude_table, solve, Geometry, LatticeSpec, SpinOrdering,
};
use fdeform_core::noise::{
    converged_quadratic_form, deformed_frequency, mc_quadratic_form, sample_paths, small_lambda_structure,
    spectral_quadratic_form, CovarianceConvention, NoiseConfig, TestFunction, STRUCTURE_LAMBDAS,
};

use crate::{
    AlgebraArgs, AlgebraCheck, ClassicalArgs, CmdError, ConventionArg, FieldArgs, GeometryArg, HubbardArgs,
    IntegratorArg, LeptonArgs, NoiseArgs, OrderingArg, Outcome, XiArg,
};

const MAX_NOISE_CUTOFF: usize = 1 << 16;

fn residual_check(r: &ResidualReport) -> Check {
    Check::below(format!("normalized residual: {}", r.identity), r.normalized_residual, r.tolerance)
}

pub fn algebra(args: &AlgebraArgs) -> Result<Outcome, CmdError> {
    let mut out = Outcome::default();
    let lambda = args.lambda;
    match args.which {
        AlgebraCheck::Qboson | AlgebraCheck::General => {
            let margin = args.margin.unwrap_or(1);
            let rep = build_boson_rep(args.dim).map_err(CmdError::domain)?.with_margin(margin);
            out.insert("build_boson_rep", json!({ "dimension": rep.dimension(), "interior_margin": margin }));
            let (spec, g, h) = if args.which == AlgebraCheck::Qboson {
                (DeformationSpec::q_boson(lambda), Vec::new(), Vec::new())
            } else {
                let g: Vec<f64> = (0..args.dim).map(|n| 1.0 + args.g_slope * n as f64).collect();
                let h: Vec<f64> = (0..args.dim).map(|n| 1.0 + args.h_curvature * (n * n) as f64).collect();
                let table = solve_f_from_gh_boson(&g, &h, args.dim - 1).map_err(CmdError::domain)?;
                out.insert("solve_f_from_gh_boson", &table);
                (DeformationSpec::FromGH { g: g.clone(), h: h.clone() }, g, h)
            };
            let used = if args.force_f_identity { DeformationSpec::canonical() } else { spec.clone() };
            let ops = deform(&rep, &used, "a").map_err(CmdError::domain)?;
            out.insert("deform", json!({ "spec": used, "f": ops.f }));
            let report = if args.which == AlgebraCheck::Qboson {
                let table: Vec<f64> = (0..args.dim).map(|n| f_squared_boson(n, lambda)).collect();
                out.insert("f_squared_boson", &table);
                let spectrum = deformed_spectrum(&spec, args.dim.min(16)).map_err(CmdError::domain)?;
                out.checks.push(Check::below(
                    "spectrum deviation",
                    spectrum.max_abs_deviation,
                    spectrum.tolerance,
                ));
                out.insert("deformed_spectrum", &spectrum);
                let r = check_qboson_relation(&ops, lambda).map_err(CmdError::domain)?;
                out.insert("check_qboson_relation", &r);
                r
            } else {
                let r = check_general_relation(&ops, &g, &h).map_err(CmdError::domain)?;
                out.insert("check_general_relation", &r);
                r
            };
            out.checks.push(residual_check(&report));
        }
        AlgebraCheck::JordanSchwingerBoson | AlgebraCheck::JordanSchwingerFermion => {
            if args.force_f_identity {
                return Err(CmdError::Usage("--force-f-identity applies to qboson and general only".into()));
            }
            let fermionic = args.which == AlgebraCheck::JordanSchwingerFermion;
            let margin = args.margin.unwrap_or(2);
            let spec = if fermionic {
                let rep = build_fermion_modes(2).map_err(CmdError::domain)?;
                out.insert("build_fermion_modes", json!({ "modes": 2, "dimension": rep.dimension() }));
                let f_bar: Vec<f64> = (0..3).map(|n| f_bar_fermion(n, lambda)).collect();
                out.insert("f_bar_fermion", &f_bar);
                let q = lambda.exp();
                let sol = solve_f_from_gh_fermion(&[q, q], &[1.0, q]).map_err(CmdError::domain)?;
                out.checks.push(Check::above("fermion (ḡ, h̄) consistency", f64::from(u8::from(sol.consistent)), 0.5));
                out.insert("solve_f_from_gh_fermion", sol);
                DeformationSpec::q_fermion(lambda)
            } else {
                let rep = build_boson_rep(args.dim).map_err(CmdError::domain)?;
                out.insert("build_boson_rep", json!({ "modes": 2, "dimension": rep.dimension().pow(2), "interior_margin": margin }));
                DeformationSpec::q_boson(lambda)
            };
            let reports = check_jordan_schwinger(fermionic, &spec, args.dim, margin).map_err(CmdError::domain)?;
            out.checks.extend(reports.iter().map(residual_check));
            out.insert("check_jordan_schwinger", &reports);
        }
    }
    Ok(out)
}

pub fn leptons(args: &LeptonArgs) -> Result<Outcome, CmdError> {
    let fit = lepton_fit(args.m_e, args.m_mu, args.m_tau, args.n_max).map_err(CmdError::domain)?;
    let mut out = Outcome::default();
    let min_gap = fit.masses.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    out.checks.push(Check::above("smallest mass gap (MeV)", min_gap, 0.0));
    let mut columns = String::from("# n mass_mev\n");
    for (n, m) in fit.masses.iter().enumerate() {
        columns.push_str(&format!("{n} {m:.12e}\n"));
    }
    out.columns = Some(columns);
    out.insert("lepton_fit", &fit);
    Ok(out)
}

pub fn classical(args: &ClassicalArgs) -> Result<Outcome, CmdError> {
    if args.stride == 0 {
        return Err(CmdError::Usage("--stride must be positive".into()));
    }
    let spec = DeformationSpec::q_boson(args.lambda);
    let start = OscState::new(args.q0, args.p0);
    let omega = predicted_frequency(&spec, start).map_err(CmdError::domain)?;
    let steps = (args.periods * 2.0 * std::f64::consts::PI / (omega.abs() * args.dt.abs())).ceil().max(1.0) as usize;
    let integrator = match args.integrator {
        IntegratorArg::Rk4 => Integrator::Rk4,
        IntegratorArg::Midpoint => Integrator::SymplecticMidpoint,
    };
    let cfg = TrajectoryConfig { dt: args.dt, steps, integrator };
    let traj = integrate(&spec, start, &cfg).map_err(CmdError::domain)?;
    let measured = measure_frequency(&traj).map_err(CmdError::domain)?;
    let mut out = Outcome::default();
    let rel = (measured - omega).abs() / omega.abs();
    out.checks.push(Check::below("relative frequency error", rel, 1e-4));
    out.checks.push(Check::below("relative energy drift", traj.energy_drift(), 1e-6));
    out.insert("predicted_frequency", json!({ "omega": omega, "u0": start.action() }));
    out.insert("measure_frequency", json!({ "omega": measured, "relative_error": rel }));
    out.insert(
        "integrate",
        json!({
            "config": cfg,
            "elapsed": traj.elapsed(),
            "energy_drift": traj.energy_drift(),
            "action_drift": traj.action_drift(),
            "final_state": traj.last_state(),
        }),
    );
    let full = traj.to_columns();
    let mut lines = full.lines();
    let mut columns = format!("{}\n", lines.next().unwrap_or_default());
    for line in lines.step_by(args.stride) {
        columns.push_str(line);
        columns.push('\n');
    }
    out.columns = Some(columns);
    Ok(out)
}

pub fn hubbard(args: &HubbardArgs) -> Result<Outcome, CmdError> {
    if args.q.is_nan() || args.q <= 0.0 {
        return Err(CmdError::Usage(format!("--q must be positive, got {}", args.q)));
    }
    let geometry = match args.geometry {
        GeometryArg::Open => Geometry::OpenChain,
        GeometryArg::Ring => Geometry::Ring,
    };
    let mut spec = LatticeSpec::new(args.sites, geometry, args.t, args.u, args.q.ln());
    spec.ordering = match args.ordering {
        OrderingArg::SiteMajor => SpinOrdering::SiteMajor,
        OrderingArg::SpinMajor => SpinOrdering::SpinMajor,
    };
    let mut out = Outcome::default();
    let result = match args.sector {
        Some((u, d)) => {
            spec = spec.with_sector(u, d);
            let h = build_deformed_hubbard(&spec).map_err(CmdError::domain)?;
            out.insert("build_deformed_hubbard", json!({ "sector": h.sector, "dimension": h.basis.len() }));
            diagonalize(&h).map_err(CmdError::domain)?
        }
        None => {
            let r = solve(&spec).map_err(CmdError::domain)?;
            let dims: Vec<_> = r.sectors.iter().map(|s| json!([s.n_up, s.n_down, s.eigenvalues.len()])).collect();
            out.insert("build_deformed_hubbard", json!({ "sectors": dims }));
            r
        }
    };
    out.checks.push(Check::below("Hermiticity residual", result.hermiticity_residual, 1e-12));
    if args.sites == 2 && args.q == 1.0 && matches!(args.sector, Some((1, 1)) | None) {
        let exact = -(args.u * args.u / 4.0 + 4.0 * args.t * args.t).sqrt();
        if let Some(e) = result.sector(1, 1).and_then(|s| s.first()) {
            out.checks.push(Check::below("|E₀ − closed form| at half filling", (e - exact).abs(), 1e-10));
        }
    }
    out.insert("hopping_amplitude_table", hopping_amplitude_table(&spec).map_err(CmdError::domain)?);
    out.columns = Some(result.to_columns());
    out.insert("diagonalize", &result);
    Ok(out)
}

pub fn noise(args: &NoiseArgs, seed: Option<u64>) -> Result<Outcome, CmdError> {
    let seed = seed.ok_or_else(|| CmdError::Usage("noise requires --seed".into()))?;
    if args.grid_points < 2 || args.t_max.is_nan() || args.t_max <= 0.0 {
        return Err(CmdError::Usage("need --grid-points ≥ 2 and --t-max > 0".into()));
    }
    let xi = match args.xi {
        XiArg::Gaussian => TestFunction::gaussian(args.xi_width.unwrap_or(1.0)),
        XiArg::RaisedCosine => TestFunction::raised_cosine(args.xi_width.unwrap_or(2.0)),
    };
    let (exact, cutoff) = match args.cutoff {
        Some(m) => (spectral_quadratic_form(&xi, args.lambda, m).map_err(CmdError::domain)?, m),
        None => converged_quadratic_form(&xi, args.lambda, MAX_NOISE_CUTOFF).map_err(CmdError::domain)?,
    };
    let mut cfg = NoiseConfig::new(args.lambda, cutoff, args.samples, seed);
    cfg.convention = match args.convention {
        ConventionArg::Complex => CovarianceConvention::ComplexHermitian,
        ConventionArg::Real => CovarianceConvention::RealConjugatePaired,
    };
    let mut out = Outcome::default();
    let omegas: Vec<f64> = (0..=cutoff.min(10) as i64).map(|n| deformed_frequency(n, args.lambda)).collect();
    out.insert("deformed_frequency", &omegas);
    out.insert("spectral_quadratic_form", json!({ "value": exact, "cutoff": cutoff, "test_function": xi }));
    let est = mc_quadratic_form(&xi, &cfg).map_err(CmdError::domain)?;
    if let Some(z) = est.z_score(exact) {
        out.checks.push(Check::below("Monte Carlo z-score", z, 3.0));
    }
    out.insert("mc_quadratic_form", json!({ "estimate": est, "z_score": est.z_score(exact) }));

    let step = args.t_max / (args.grid_points - 1) as f64;
    let mut path_cfg = cfg.clone();
    path_cfg.samples = args.paths.max(1);
    path_cfg.time_grid = (0..args.grid_points).map(|k| k as f64 * step).collect();
    let paths = sample_paths(&path_cfg).map_err(CmdError::domain)?;
    out.columns = Some(paths[0].to_columns(&path_cfg.time_grid));
    let kept: Vec<_> = paths.iter().take(args.paths).collect();
    out.insert("sample_paths", json!({ "time_grid": path_cfg.time_grid, "paths": kept }));

    if args.structure {
        let family = fdeform_core::noise::default_structure_family();
        let fit = small_lambda_structure(&family, &STRUCTURE_LAMBDAS, MAX_NOISE_CUTOFF).map_err(CmdError::domain)?;
        out.checks.push(Check::below("|c₂ log-log slope − 2|", (fit.c2_slope - 2.0).abs(), 0.1));
        out.insert("small_lambda_structure", json!({ "family": family, "fit": fit }));
    }
    Ok(out)
}

fn parse_table(s: &str) -> Result<MassSquared, CmdError> {
    let bad = || CmdError::Usage(format!("--m2-table expects min_charge:v0,v1,..., got {s:?}"));
    let (min, vals) = s.split_once(':').ok_or_else(bad)?;
    let min_charge = min.trim().parse::<i64>().map_err(|_| bad())?;
    let values = vals
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| bad())?;
    Ok(MassSquared::Table { min_charge, values })
}

pub fn field(args: &FieldArgs) -> Result<Outcome, CmdError> {
    let m2 = match (&args.m2, &args.m2_table) {
        (_, Some(t)) => parse_table(t)?,
        (Some(c), None) => MassSquared::Polynomial { coefficients: c.clone() },
        (None, None) => MassSquared::constant(args.m0 * args.m0),
    };
    let cfg = FieldConfig::new(args.modes.clone(), args.m0, m2, args.cutoff);
    let ops = build_field_with_margin(&cfg, args.margin).map_err(CmdError::domain)?;
    let mut out = Outcome::default();
    out.insert(
        "build_field",
        json!({ "config": cfg, "dimension": ops.dimension(), "interior_dimension": ops.interior.len() }),
    );
    let spectrum = hamiltonian(&ops);
    let scale = spectrum.closed_form.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    out.checks.push(Check::below("spectrum deviation / scale", spectrum.max_abs_deviation / scale, 1e-12));
    out.checks.push(Check::below("off-diagonal of H / scale", spectrum.max_off_diagonal / scale, 1e-12));
    let table: Vec<_> = ops
        .occupations
        .iter()
        .zip(&ops.charges)
        .zip(&spectrum.closed_form)
        .map(|((occ, q), e)| json!({ "occupations": occ, "charge": q, "energy": e }))
        .collect();
    out.insert(
        "hamiltonian",
        json!({
            "max_abs_deviation": spectrum.max_abs_deviation,
            "max_off_diagonal": spectrum.max_off_diagonal,
            "eigenvalues": table,
        }),
    );
    let mut reports = ops.charge_ladder_residuals();
    for k in 0..cfg.modes.len() {
        for kp in 0..cfg.modes.len() {
            reports.extend(verify_deformed_relations(&ops, k, kp).map_err(CmdError::domain)?);
        }
    }
    out.checks.extend(reports.iter().map(residual_check));
    out.insert("verify_deformed_relations", &reports);
    out.columns = Some(spectrum.to_columns(&ops));
    Ok(out)
}
