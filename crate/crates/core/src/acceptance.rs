//! Acceptance criteria, each a self-contained check with explicit bounds.
//!
//! Every criterion returns a [`CriterionOutcome`] listing the measured
//! quantities next to their bounds, so the same code drives both the test
//! suite and the `verify-all` command.

use std::time::Instant;

use serde::Serialize;

use crate::classical::{frequency_experiment, OscState};
use crate::deform::{lepton_fit, DeformationSpec, LEPTON_MASSES_MEV};
use crate::field::{build_field, hamiltonian, verify_deformed_relations, FieldConfig, MassSquared};
use crate::fock::{
    build_boson_rep, check_general_relation, check_jordan_schwinger, check_qboson_relation, deform,
};
use crate::hubbard::{solve, Geometry, LatticeSpec};
use crate::noise::{
    converged_quadratic_form, mc_quadratic_form, small_lambda_structure, default_structure_family,
    NoiseConfig, TestFunction, STRUCTURE_LAMBDAS,
};
use crate::oracle::undeformed_hubbard_sector_spectra;

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Below,
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub relation: Bound,
    pub passed: bool,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, bound, relation: Bound::Below, passed: value < bound }
    }

    pub fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, bound, relation: Bound::Above, passed: value > bound }
    }

    /// A check that could not be evaluated.
    pub fn error(name: impl Into<String>, message: &str) -> Self {
        Check {
            name: format!("{}: {message}", name.into()),
            value: f64::NAN,
            bound: f64::NAN,
            relation: Bound::Below,
            passed: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: &'static str,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub runtime_s: f64,
    pub budget_s: f64,
    pub passed: bool,
}

impl CriterionOutcome {
    /// `PASS id  summary` line with the worst check.
    pub fn summary_line(&self) -> String {
        let failing: Vec<&Check> = self.checks.iter().filter(|c| !c.passed).collect();
        let detail = match failing.first() {
            Some(c) => format!("failed {} = {:.3e} (bound {:.3e})", c.name, c.value, c.bound),
            None if self.runtime_s >= self.budget_s => "over time budget".to_string(),
            None => format!("{} checks", self.checks.len()),
        };
        format!(
            "{} {:<18} {:<44} {:>8.3}s / {:>5.0}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.runtime_s,
            self.budget_s,
            detail
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcceptanceOptions {
    pub seed: u64,
}

impl Default for AcceptanceOptions {
    fn default() -> Self {
        AcceptanceOptions { seed: DEFAULT_SEED }
    }
}

pub struct Criterion {
    pub id: &'static str,
    pub title: &'static str,
    pub budget_s: f64,
    run: fn(&AcceptanceOptions) -> Vec<Check>,
}

impl Criterion {
    pub fn run(&self, opts: &AcceptanceOptions) -> CriterionOutcome {
        let start = Instant::now();
        let checks = (self.run)(opts);
        let runtime_s = start.elapsed().as_secs_f64();
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed) && runtime_s < self.budget_s;
        CriterionOutcome {
            id: self.id,
            title: self.title,
            checks,
            runtime_s,
            budget_s: self.budget_s,
            passed,
        }
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: "lepton_fit", title: "lepton mass fit", budget_s: 1.0, run: lepton_checks },
        Criterion { id: "q_boson", title: "q-boson commutation relation", budget_s: 1.0, run: q_boson_checks },
        Criterion { id: "general_f", title: "general f-deformation from (g, h)", budget_s: 1.0, run: general_f_checks },
        Criterion { id: "jordan_schwinger", title: "SU_q(2) two-mode realization", budget_s: 5.0, run: jordan_schwinger_checks },
        Criterion { id: "classical", title: "classical frequency law", budget_s: 30.0, run: classical_checks },
        Criterion { id: "hubbard", title: "deformed Hubbard model", budget_s: 30.0, run: hubbard_checks },
        Criterion { id: "noise", title: "deformed white noise", budget_s: 60.0, run: noise_checks },
        Criterion { id: "field", title: "charge-dependent boson field", budget_s: 30.0, run: field_checks },
    ]
}

pub fn run_all(opts: &AcceptanceOptions) -> Vec<CriterionOutcome> {
    criteria().iter().map(|c| c.run(opts)).collect()
}

fn lepton_checks(_: &AcceptanceOptions) -> Vec<Check> {
    let (me, mm, mt) = LEPTON_MASSES_MEV;
    match lepton_fit(me, mm, mt, 3) {
        Ok(fit) => vec![
            Check::below("|k − 105 MeV|/105 MeV", (fit.k - 105.0).abs() / 105.0, 0.02),
            Check::below("|λ − 2.82|/2.82", (fit.lambda - 2.82).abs() / 2.82, 0.02),
            Check::below("|m₃ − 30 GeV|/30 GeV", (fit.mass(3) - 30_000.0).abs() / 30_000.0, 0.05),
        ],
        Err(e) => vec![Check::error("lepton fit", &e.to_string())],
    }
}

fn q_boson_checks(_: &AcceptanceOptions) -> Vec<Check> {
    let rep = match build_boson_rep(32) {
        Ok(r) => r,
        Err(e) => return vec![Check::error("d = 32", &e.to_string())],
    };
    let mut checks = Vec::new();
    for lambda in [0.1, 0.5, 1.0] {
        let name = format!("residual λ = {lambda}");
        match deform(&rep, &DeformationSpec::q_boson(lambda), "a").and_then(|ops| check_qboson_relation(&ops, lambda)) {
            Ok(r) => checks.push(Check::below(name, r.normalized_residual, 1e-10)),
            Err(e) => checks.push(Check::error(name, &e.to_string())),
        }
    }
    let name = "negative control f ≡ 1, λ = 1";
    match deform(&rep, &DeformationSpec::canonical(), "a").and_then(|ops| check_qboson_relation(&ops, 1.0)) {
        Ok(r) => checks.push(Check::above(name, r.max_abs_residual, 0.5)),
        Err(e) => checks.push(Check::error(name, &e.to_string())),
    }
    checks
}

fn general_f_checks(_: &AcceptanceOptions) -> Vec<Check> {
    let d = 24;
    let rep = match build_boson_rep(d) {
        Ok(r) => r,
        Err(e) => return vec![Check::error("d = 24", &e.to_string())],
    };
    let choices: [(&str, Vec<f64>, Vec<f64>); 2] = [
        (
            "g = 1 + n/10, h = 1",
            (0..d).map(|n| 1.0 + 0.1 * n as f64).collect(),
            vec![1.0; d],
        ),
        (
            "g = 1, h = 1 + n²/20",
            vec![1.0; d],
            (0..d).map(|n| 1.0 + (n * n) as f64 / 20.0).collect(),
        ),
    ];
    choices
        .into_iter()
        .map(|(name, g, h)| {
            let spec = DeformationSpec::FromGH { g: g.clone(), h: h.clone() };
            match deform(&rep, &spec, "a").and_then(|ops| check_general_relation(&ops, &g, &h)) {
                Ok(r) => Check::below(format!("residual {name}"), r.normalized_residual, 1e-10),
                Err(e) => Check::error(name, &e.to_string()),
            }
        })
        .collect()
}

fn jordan_schwinger_checks(_: &AcceptanceOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    for (fermionic, spec, tol) in [
        (false, DeformationSpec::q_boson(0.5), 1e-10),
        (true, DeformationSpec::q_fermion(0.5), 1e-13),
    ] {
        let kind = if fermionic { "fermion" } else { "boson" };
        match check_jordan_schwinger(fermionic, &spec, 12, 2) {
            Ok(reports) => checks.extend(
                reports
                    .into_iter()
                    .map(|r| Check::below(format!("{kind} {}", r.identity), r.normalized_residual, tol)),
            ),
            Err(e) => checks.push(Check::error(kind, &e.to_string())),
        }
    }
    checks
}

fn classical_checks(_: &AcceptanceOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    for lambda in [0.1, 0.5, 1.0] {
        for u0 in [-0.4, 0.5, 1.5, 3.0] {
            let name = format!("relative error λ = {lambda}, u₀ = {u0}");
            match frequency_experiment(&DeformationSpec::q_boson(lambda), OscState::from_action(u0), 1e-3, 3.0) {
                Ok((res, _)) => checks.push(Check::below(name, res.relative_error(), 1e-4)),
                Err(e) => checks.push(Check::error(name, &e.to_string())),
            }
        }
    }
    let name = "|Ω − 1| at λ = 1e-4, u₀ = 0.5";
    match frequency_experiment(&DeformationSpec::q_boson(1e-4), OscState::from_action(0.5), 1e-3, 3.0) {
        Ok((res, _)) => checks.push(Check::below(name, (res.omega_measured - 1.0).abs(), 1e-6)),
        Err(e) => checks.push(Check::error(name, &e.to_string())),
    }
    checks
}

fn hubbard_checks(_: &AcceptanceOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    let (t, u) = (1.0, 4.0);
    for (sites, geometry) in [(2, Geometry::OpenChain), (3, Geometry::OpenChain), (3, Geometry::Ring)] {
        let name = format!("q = 1 vs reference, L = {sites} {geometry:?}");
        let ours = match solve(&LatticeSpec::new(sites, geometry, t, u, 0.0)) {
            Ok(s) => s,
            Err(e) => {
                checks.push(Check::error(name, &e.to_string()));
                continue;
            }
        };
        let reference = undeformed_hubbard_sector_spectra(sites, geometry == Geometry::Ring, t, u);
        let mut worst = 0.0f64;
        for (nu, nd, expected) in reference {
            match ours.sector(nu, nd) {
                Some(got) if got.len() == expected.len() => {
                    for (a, b) in got.iter().zip(&expected) {
                        worst = worst.max((a - b).abs());
                    }
                }
                _ => worst = f64::INFINITY,
            }
        }
        checks.push(Check::below(name, worst, 1e-10));
    }

    let name = "2-site half-filled ground energy";
    match solve(&LatticeSpec::new(2, Geometry::OpenChain, t, u, 0.0).with_sector(1, 1)) {
        Ok(s) => {
            let exact = -(u * u / 4.0 + 4.0 * t * t).sqrt();
            checks.push(Check::below(name, (s.ground_energy - exact).abs(), 1e-10));
        }
        Err(e) => checks.push(Check::error(name, &e.to_string())),
    }

    let mut single: Option<Vec<f64>> = None;
    for q in [1.0f64, 1.5, 4.0] {
        let spec = LatticeSpec::new(3, Geometry::Ring, t, u, q.ln());
        match solve(&spec) {
            Ok(s) => {
                checks.push(Check::below(format!("Hermiticity residual q = {q}"), s.hermiticity_residual, 1e-12));
                let one: Vec<f64> = s.sector(1, 0).map(<[f64]>::to_vec).unwrap_or_default();
                match &single {
                    None => single = Some(one),
                    Some(base) => {
                        let dev = if base.len() == one.len() {
                            base.iter().zip(&one).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
                        } else {
                            f64::INFINITY
                        };
                        checks.push(Check::below(format!("single-electron shift q = {q}"), dev, 1e-12));
                    }
                }
            }
            Err(e) => checks.push(Check::error(format!("q = {q}"), &e.to_string())),
        }
    }
    checks
}

fn noise_checks(opts: &AcceptanceOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    let max_cutoff = 1 << 14;
    for lambda in [0.0, 0.15, 0.3] {
        for (label, xi) in [("Gaussian", TestFunction::gaussian(1.0)), ("raised cosine", TestFunction::raised_cosine(2.0))] {
            let name = format!("MC z-score λ = {lambda}, {label}");
            let result = converged_quadratic_form(&xi, lambda, max_cutoff).and_then(|(exact, m)| {
                mc_quadratic_form(&xi, &NoiseConfig::new(lambda, m, 10_000, opts.seed)).map(|est| (exact, est))
            });
            match result {
                Ok((exact, est)) => checks.push(Check::below(name, est.z_score(exact).unwrap_or(f64::INFINITY), 3.0)),
                Err(e) => checks.push(Check::error(name, &e.to_string())),
            }
        }
    }
    let xi = TestFunction::raised_cosine(2.5);
    let name = "λ = 0 relative deviation from Parseval";
    match converged_quadratic_form(&xi, 0.0, max_cutoff) {
        Ok((q, _)) => {
            let parseval = std::f64::consts::PI * xi.norm_sq();
            checks.push(Check::below(name, (q - parseval).abs() / parseval, 1e-8));
        }
        Err(e) => checks.push(Check::error(name, &e.to_string())),
    }
    let name = "|slope of log|c₂| − 2|";
    match small_lambda_structure(&default_structure_family(), &STRUCTURE_LAMBDAS, max_cutoff) {
        Ok(fit) => {
            checks.push(Check::below(name, (fit.c2_slope - 2.0).abs(), 0.1));
            checks.push(Check::above(
                "c₂ sign consistency",
                if fit.c2_sign_consistent { 1.0 } else { 0.0 },
                0.5,
            ));
        }
        Err(e) => checks.push(Check::error(name, &e.to_string())),
    }
    checks
}

fn field_checks(_: &AcceptanceOptions) -> Vec<Check> {
    let m0 = 1.0;
    let window = 12;
    let choices = [
        ("M² = m₀²", MassSquared::constant(m0 * m0)),
        ("M² = m₀² + q²", MassSquared::Polynomial { coefficients: vec![m0 * m0, 0.0, 1.0] }),
        (
            "M² = m₀²(1 + |q|)",
            MassSquared::Table {
                min_charge: -window,
                values: (-window..=window).map(|q| m0 * m0 * (1.0 + q.abs() as f64)).collect(),
            },
        ),
    ];
    let mut checks = Vec::new();
    for (label, m2) in choices {
        for modes in [vec![0.0], vec![0.0, 1.0]] {
            let tag = format!("{label}, {} mode(s)", modes.len());
            let ops = match build_field(&FieldConfig::new(modes.clone(), m0, m2.clone(), 5)) {
                Ok(o) => o,
                Err(e) => {
                    checks.push(Check::error(tag, &e.to_string()));
                    continue;
                }
            };
            let spectrum = hamiltonian(&ops);
            let tol = if label == "M² = m₀²" { "undeformed " } else { "" };
            checks.push(Check::below(format!("{tol}spectrum deviation {tag}"), spectrum.max_abs_deviation, 1e-12));
            checks.push(Check::below(format!("{tol}off-diagonal of H {tag}"), spectrum.max_off_diagonal, 1e-12));
            let mut worst = 0.0f64;
            for k in 0..modes.len() {
                for kp in 0..modes.len() {
                    match verify_deformed_relations(&ops, k, kp) {
                        Ok(reports) => {
                            for r in reports {
                                worst = worst.max(r.max_abs_residual);
                            }
                        }
                        Err(_) => worst = f64::INFINITY,
                    }
                }
            }
            let bound = if label == "M² = m₀²" { 1e-12 } else { 1e-10 };
            checks.push(Check::below(format!("{tol}relation residual {tag}"), worst, bound));
        }
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criterion_ids_are_unique() {
        let ids: Vec<&str> = criteria().iter().map(|c| c.id).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(ids.len(), sorted.len());
    }

    #[test]
    fn failing_check_fails_outcome() {
        let c = Criterion { id: "x", title: "x", budget_s: 10.0, run: |_| vec![Check::below("v", 2.0, 1.0)] };
        let out = c.run(&AcceptanceOptions::default());
        assert!(!out.passed);
        assert!(out.summary_line().starts_with("FAIL"));
        let empty = Criterion { id: "y", title: "y", budget_s: 10.0, run: |_| Vec::new() };
        assert!(!empty.run(&AcceptanceOptions::default()).passed);
        assert!(!Check::error("e", "broken").passed);
    }
}
