//! Classical limit of the deformed oscillator.
//!
//! With `a = (q + ip)/√2` the Hamiltonian `A†A` becomes `H = E(u)` where
//! `u = ½(q² + p² − 1)` and `E(u) = u f²(u)`. Hamilton's equations give a
//! rotation in the `(q, p)` plane at the amplitude-dependent rate
//! `Ω(u) = E'(u) = f²(u) + u f²'(u)`, and `u` is conserved along the flow.
//!
//! The initial point `(q₀, p₀)` is taken as the actual phase-space point at
//! `t = 0`, so the frequency law is explicit in `u₀`.

use serde::Serialize;
use thiserror::Error;

use crate::deform::{sinh_ratio, DeformError, DeformationSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassicalError {
    #[error("state became non-finite at step {step}")]
    NonFiniteState { step: usize },
    #[error("phase winding {winding:.3} rad is below two full periods")]
    InsufficientData { winding: f64 },
    #[error("invalid trajectory config: {0}")]
    InvalidConfig(String),
    #[error("classical flow needs a bosonic deformation, got {0}")]
    Unsupported(String),
    #[error(transparent)]
    Deform(#[from] DeformError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscState {
    pub q: f64,
    pub p: f64,
}

impl OscState {
    pub fn new(q: f64, p: f64) -> Self {
        OscState { q, p }
    }

    /// Point on the `p = 0` axis with the given action variable.
    pub fn from_action(u: f64) -> Self {
        OscState::new((2.0 * u + 1.0).max(0.0).sqrt(), 0.0)
    }

    /// `u = ½(q² + p² − 1)`.
    pub fn action(&self) -> f64 {
        0.5 * (self.q * self.q + self.p * self.p - 1.0)
    }

    fn is_finite(&self) -> bool {
        self.q.is_finite() && self.p.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Rk4,
    /// Implicit midpoint rule.
    SymplecticMidpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryConfig {
    /// Step size; negative values integrate backward in time.
    pub dt: f64,
    pub steps: usize,
    pub integrator: Integrator,
}

impl TrajectoryConfig {
    pub fn rk4(dt: f64, steps: usize) -> Self {
        TrajectoryConfig { dt, steps, integrator: Integrator::Rk4 }
    }

    fn validate(&self) -> Result<(), ClassicalError> {
        if !(self.dt.is_finite() && self.dt != 0.0) {
            return Err(ClassicalError::InvalidConfig(format!("dt = {}", self.dt)));
        }
        if self.steps == 0 {
            return Err(ClassicalError::InvalidConfig("steps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Natural cubic spline through `(i, y_i)`, linear outside the knots.
#[derive(Debug, Clone, PartialEq)]
struct CubicSpline {
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    fn new(y: Vec<f64>) -> Self {
        let n = y.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Tridiagonal system m[i-1] + 4 m[i] + m[i+1] = 6 Δ²y[i], m[0] = m[n-1] = 0.
            let k = n - 2;
            let mut c = vec![0.0; k];
            let mut d = vec![0.0; k];
            for i in 0..k {
                let rhs = 6.0 * (y[i + 2] - 2.0 * y[i + 1] + y[i]);
                let denom = if i == 0 { 4.0 } else { 4.0 - c[i - 1] };
                c[i] = 1.0 / denom;
                d[i] = if i == 0 { rhs / denom } else { (rhs - d[i - 1]) / denom };
            }
            for i in (0..k).rev() {
                m[i + 1] = if i + 1 == k { d[i] } else { d[i] - c[i] * m[i + 2] };
            }
        }
        CubicSpline { y, m }
    }

    fn segment(&self, x: f64) -> usize {
        let last = self.y.len() - 2;
        (x.floor().max(0.0) as usize).min(last)
    }

    fn eval(&self, x: f64) -> f64 {
        let hi = (self.y.len() - 1) as f64;
        if x < 0.0 {
            return self.y[0] + x * self.deriv(0.0);
        }
        if x > hi {
            return self.y[self.y.len() - 1] + (x - hi) * self.deriv(hi);
        }
        let i = self.segment(x);
        let t = x - i as f64;
        let s = 1.0 - t;
        s * self.y[i]
            + t * self.y[i + 1]
            + ((s * s * s - s) * self.m[i] + (t * t * t - t) * self.m[i + 1]) / 6.0
    }

    fn deriv(&self, x: f64) -> f64 {
        let hi = (self.y.len() - 1) as f64;
        let x = x.clamp(0.0, hi);
        let i = self.segment(x);
        let t = x - i as f64;
        let s = 1.0 - t;
        self.y[i + 1] - self.y[i]
            + ((1.0 - 3.0 * s * s) * self.m[i] + (3.0 * t * t - 1.0) * self.m[i + 1]) / 6.0
    }
}

/// The classical energy curve `E(u) = u f²(u)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassicalHamiltonian {
    /// `E(u) = sinh(λu)/sinh λ`.
    QBoson { lambda: f64 },
    /// Spline through `E(n) = n f²(n)`.
    Table(CubicSplineCurve),
}

/// Opaque spline-backed energy curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSplineCurve(CubicSpline);

/// Knots used when a `(g, h)` deformation is tabulated.
const GH_TABLE_LEN: usize = 64;

impl ClassicalHamiltonian {
    pub fn from_spec(spec: &DeformationSpec) -> Result<Self, ClassicalError> {
        let f_sq = match spec {
            DeformationSpec::QBoson { lambda } => {
                spec.validate()?;
                return Ok(ClassicalHamiltonian::QBoson { lambda: *lambda });
            }
            DeformationSpec::QFermion { .. } => {
                return Err(ClassicalError::Unsupported(format!("{spec:?}")));
            }
            DeformationSpec::Custom { f_squared } => {
                if f_squared.len() < 3 {
                    return Err(DeformError::SequenceTooShort { needed: 3, got: f_squared.len() }.into());
                }
                spec.boson_f_squared_table(f_squared.len() - 1)?
            }
            DeformationSpec::FromGH { g, .. } => spec.boson_f_squared_table(g.len().min(GH_TABLE_LEN))?,
        };
        let energies = f_sq.iter().enumerate().map(|(n, f)| n as f64 * f).collect();
        Ok(ClassicalHamiltonian::Table(CubicSplineCurve(CubicSpline::new(energies))))
    }

    pub fn energy_of(&self, u: f64) -> f64 {
        match self {
            ClassicalHamiltonian::QBoson { lambda } => {
                if *lambda == 0.0 {
                    u
                } else {
                    sinh_ratio(lambda * u, *lambda)
                }
            }
            ClassicalHamiltonian::Table(s) => s.0.eval(u),
        }
    }

    /// `Ω(u) = dE/du`.
    pub fn frequency(&self, u: f64) -> f64 {
        match self {
            ClassicalHamiltonian::QBoson { lambda } => {
                if *lambda == 0.0 {
                    1.0
                } else {
                    lambda * (lambda * u).cosh() / lambda.sinh()
                }
            }
            ClassicalHamiltonian::Table(s) => s.0.deriv(u),
        }
    }

    pub fn energy(&self, state: &OscState) -> f64 {
        self.energy_of(state.action())
    }

    fn velocity(&self, s: &OscState) -> OscState {
        let w = self.frequency(s.action());
        OscState::new(w * s.p, -w * s.q)
    }
}

/// One recorded point of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub q: f64,
    pub p: f64,
    pub energy: f64,
    pub action: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn last_state(&self) -> OscState {
        let s = self.samples.last().expect("trajectory is never empty");
        OscState::new(s.q, s.p)
    }

    pub fn elapsed(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t) - self.samples[0].t
    }

    /// Largest `|H(t) − H(0)| / max(|H(0)|, 1)`.
    pub fn energy_drift(&self) -> f64 {
        let h0 = self.samples[0].energy;
        let denom = h0.abs().max(1.0);
        self.samples
            .iter()
            .map(|s| (s.energy - h0).abs() / denom)
            .fold(0.0, f64::max)
    }

    /// Largest `|u(t) − u(0)| / max(|u(0)|, 1)`.
    pub fn action_drift(&self) -> f64 {
        let u0 = self.samples[0].action;
        let denom = u0.abs().max(1.0);
        self.samples
            .iter()
            .map(|s| (s.action - u0).abs() / denom)
            .fold(0.0, f64::max)
    }

    /// Whitespace-separated `t q p H u` rows with a header line.
    pub fn to_columns(&self) -> String {
        let mut out = String::from("# t q p H u\n");
        for s in &self.samples {
            out.push_str(&format!("{:.12e} {:.12e} {:.12e} {:.12e} {:.12e}\n", s.t, s.q, s.p, s.energy, s.action));
        }
        out
    }
}

fn rk4_step(h: &ClassicalHamiltonian, s: &OscState, dt: f64) -> OscState {
    let add = |a: &OscState, k: &OscState, c: f64| OscState::new(a.q + c * k.q, a.p + c * k.p);
    let k1 = h.velocity(s);
    let k2 = h.velocity(&add(s, &k1, 0.5 * dt));
    let k3 = h.velocity(&add(s, &k2, 0.5 * dt));
    let k4 = h.velocity(&add(s, &k3, dt));
    OscState::new(
        s.q + dt / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q),
        s.p + dt / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p),
    )
}

fn midpoint_step(h: &ClassicalHamiltonian, s: &OscState, dt: f64) -> OscState {
    let mut next = rk4_step(h, s, dt);
    for _ in 0..100 {
        let mid = OscState::new(0.5 * (s.q + next.q), 0.5 * (s.p + next.p));
        let v = h.velocity(&mid);
        let cand = OscState::new(s.q + dt * v.q, s.p + dt * v.p);
        let delta = (cand.q - next.q).abs().max((cand.p - next.p).abs());
        next = cand;
        if delta <= 1e-16 * (1.0 + next.q.abs() + next.p.abs()) {
            break;
        }
    }
    next
}

/// Integrates Hamilton's equations for `steps · dt`.
pub fn integrate(spec: &DeformationSpec, start: OscState, cfg: &TrajectoryConfig) -> Result<Trajectory, ClassicalError> {
    let h = ClassicalHamiltonian::from_spec(spec)?;
    integrate_with(&h, start, cfg)
}

pub fn integrate_with(h: &ClassicalHamiltonian, start: OscState, cfg: &TrajectoryConfig) -> Result<Trajectory, ClassicalError> {
    cfg.validate()?;
    if !start.is_finite() {
        return Err(ClassicalError::NonFiniteState { step: 0 });
    }
    let record = |t: f64, s: &OscState| Sample {
        t,
        q: s.q,
        p: s.p,
        energy: h.energy(s),
        action: s.action(),
    };
    let mut samples = Vec::with_capacity(cfg.steps + 1);
    samples.push(record(0.0, &start));
    let mut state = start;
    for step in 1..=cfg.steps {
        state = match cfg.integrator {
            Integrator::Rk4 => rk4_step(h, &state, cfg.dt),
            Integrator::SymplecticMidpoint => midpoint_step(h, &state, cfg.dt),
        };
        if !state.is_finite() {
            return Err(ClassicalError::NonFiniteState { step });
        }
        samples.push(record(step as f64 * cfg.dt, &state));
    }
    Ok(Trajectory { samples })
}

/// Angular frequency from the accumulated phase winding around the origin.
pub fn measure_frequency(traj: &Trajectory) -> Result<f64, ClassicalError> {
    let winding: f64 = traj
        .samples
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let cross = a.q * b.p - a.p * b.q;
            let dot = a.q * b.q + a.p * b.p;
            cross.atan2(dot)
        })
        .sum();
    let winding = winding.abs();
    if winding < 4.0 * std::f64::consts::PI {
        return Err(ClassicalError::InsufficientData { winding });
    }
    Ok(winding / traj.elapsed().abs())
}

/// `Ω(u₀) = f²(u₀) + u₀ f²'(u₀)` at the start point.
pub fn predicted_frequency(spec: &DeformationSpec, start: OscState) -> Result<f64, ClassicalError> {
    Ok(ClassicalHamiltonian::from_spec(spec)?.frequency(start.action()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyResult {
    pub omega_measured: f64,
    pub omega_predicted: f64,
    pub u0: f64,
    pub energy_drift: f64,
}

impl FrequencyResult {
    pub fn relative_error(&self) -> f64 {
        (self.omega_measured - self.omega_predicted).abs() / self.omega_predicted.abs()
    }
}

/// Integrates for `periods` predicted periods and compares frequencies.
pub fn frequency_experiment(
    spec: &DeformationSpec,
    start: OscState,
    dt: f64,
    periods: f64,
) -> Result<(FrequencyResult, Trajectory), ClassicalError> {
    let h = ClassicalHamiltonian::from_spec(spec)?;
    let u0 = start.action();
    let omega = h.frequency(u0);
    let period = 2.0 * std::f64::consts::PI / omega.abs();
    let steps = (periods * period / dt.abs()).ceil().max(1.0) as usize;
    let traj = integrate_with(&h, start, &TrajectoryConfig::rk4(dt, steps))?;
    let measured = measure_frequency(&traj)?;
    Ok((
        FrequencyResult {
            omega_measured: measured,
            omega_predicted: omega,
            u0,
            energy_drift: traj.energy_drift(),
        },
        traj,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deform::f_squared_boson;

    #[test]
    fn harmonic_circle() {
        let traj = integrate(&DeformationSpec::canonical(), OscState::new(1.0, 0.0), &TrajectoryConfig::rk4(1e-3, 10_000)).unwrap();
        for s in &traj.samples {
            assert!(((s.q * s.q + s.p * s.p).sqrt() - 1.0).abs() < 1e-10);
        }
        assert!(traj.energy_drift() < 1e-8);
        // Ω = 1 rotation, clockwise
        let end = traj.last_state();
        assert!((end.q - 10.0f64.cos()).abs() < 1e-9);
        assert!((end.p + 10.0f64.sin()).abs() < 1e-9);
        assert!(matches!(measure_frequency(&traj), Err(ClassicalError::InsufficientData { .. })));
        let long = integrate(&DeformationSpec::canonical(), OscState::new(1.0, 0.0), &TrajectoryConfig::rk4(1e-3, 20_000)).unwrap();
        assert!((measure_frequency(&long).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn q_case_conserves_action() {
        let traj = integrate(&DeformationSpec::q_boson(0.5), OscState::new(2.0, 0.0), &TrajectoryConfig::rk4(1e-3, 20_000)).unwrap();
        let u0 = 1.5;
        for s in &traj.samples {
            assert!((s.action - u0).abs() < 1e-8 * u0);
        }
    }

    #[test]
    fn time_reversal() {
        let spec = DeformationSpec::q_boson(0.5);
        let start = OscState::new(2.0, 0.0);
        let fwd = integrate(&spec, start, &TrajectoryConfig::rk4(1e-3, 5000)).unwrap();
        let back = integrate(&spec, fwd.last_state(), &TrajectoryConfig::rk4(-1e-3, 5000)).unwrap();
        let end = back.last_state();
        assert!((end.q - start.q).abs() < 1e-6 && (end.p - start.p).abs() < 1e-6);
    }

    #[test]
    fn predicted_examples() {
        let start = OscState::new(2.0, 0.0);
        assert_eq!(predicted_frequency(&DeformationSpec::canonical(), start).unwrap(), 1.0);
        let w = predicted_frequency(&DeformationSpec::q_boson(0.5), start).unwrap();
        assert!((w - 0.5 * 0.75f64.cosh() / 0.5f64.sinh()).abs() < 1e-15);
        assert!((w - 1.2423).abs() < 1e-4);
        let unit = OscState::new(0.6, 0.8);
        let w = predicted_frequency(&DeformationSpec::q_boson(1.0), unit).unwrap();
        assert!((w - f_squared_boson(0, 1.0)).abs() < 1e-12);
        assert!((w - 0.8509).abs() < 1e-4);
    }

    #[test]
    fn measured_matches_predicted() {
        let (res, _) = frequency_experiment(&DeformationSpec::q_boson(0.5), OscState::new(2.0, 0.0), 1e-3, 3.0).unwrap();
        assert!(res.relative_error() < 1e-4, "{res:?}");
        assert!((res.omega_measured - 1.2423).abs() < 1e-3);
    }

    #[test]
    fn origin_is_insufficient() {
        let traj = integrate(&DeformationSpec::q_boson(0.5), OscState::new(0.0, 0.0), &TrajectoryConfig::rk4(1e-3, 1000)).unwrap();
        assert!(matches!(measure_frequency(&traj), Err(ClassicalError::InsufficientData { .. })));
    }

    #[test]
    fn short_trajectory_is_insufficient() {
        let traj = integrate(&DeformationSpec::canonical(), OscState::new(1.0, 0.0), &TrajectoryConfig::rk4(1e-3, 6000)).unwrap();
        assert!(matches!(measure_frequency(&traj), Err(ClassicalError::InsufficientData { .. })));
    }

    #[test]
    fn overflow_is_reported() {
        let spec = DeformationSpec::q_boson(5.0);
        let err = integrate(&spec, OscState::new(300.0, 0.0), &TrajectoryConfig::rk4(1.0, 10)).unwrap_err();
        assert!(matches!(err, ClassicalError::NonFiniteState { .. }));
    }

    #[test]
    fn midpoint_preserves_radius() {
        let cfg = TrajectoryConfig { dt: 1e-2, steps: 2000, integrator: Integrator::SymplecticMidpoint };
        let traj = integrate(&DeformationSpec::q_boson(1.0), OscState::new(1.5, 0.5), &cfg).unwrap();
        assert!(traj.action_drift() < 1e-12);
        let w = measure_frequency(&traj).unwrap();
        let wp = predicted_frequency(&DeformationSpec::q_boson(1.0), OscState::new(1.5, 0.5)).unwrap();
        // second-order phase error at dt = 1e-2
        assert!((w - wp).abs() / wp < 1e-3);
    }

    #[test]
    fn spline_tracks_analytic_curve() {
        let lambda = 0.5;
        let table: Vec<f64> = (0..=24).map(|n| f_squared_boson(n, lambda)).collect();
        let custom = ClassicalHamiltonian::from_spec(&DeformationSpec::Custom { f_squared: table }).unwrap();
        let exact = ClassicalHamiltonian::QBoson { lambda };
        for u in [1.5, 2.0, 3.3, 5.0, 10.0] {
            let (a, b) = (custom.frequency(u), exact.frequency(u));
            assert!((a - b).abs() / b < 1e-3, "u = {u}: {a} vs {b}");
        }
        // knots reproduce the table
        assert!((custom.energy_of(7.0) - exact.energy_of(7.0)).abs() < 1e-12 * exact.energy_of(7.0));
    }

    #[test]
    fn spline_from_gh_runs() {
        let spec = DeformationSpec::from_gh_fn(|n| 1.0 + 0.05 * n as f64, |_| 1.0, 32);
        let start = OscState::from_action(2.0);
        let (res, _) = frequency_experiment(&spec, start, 1e-3, 3.0).unwrap();
        assert!(res.relative_error() < 1e-3, "{res:?}");
    }

    #[test]
    fn frequency_grows_with_amplitude() {
        let h = ClassicalHamiltonian::QBoson { lambda: 0.5 };
        let grid: Vec<f64> = (0..=16).map(|i| i as f64 * 0.2).collect();
        for w in grid.windows(2) {
            assert!(h.frequency(w[1]) > h.frequency(w[0]));
        }
    }

    #[test]
    fn fermion_rejected() {
        assert!(matches!(
            ClassicalHamiltonian::from_spec(&DeformationSpec::q_fermion(0.1)),
            Err(ClassicalError::Unsupported(_))
        ));
    }

    #[test]
    fn columns_header_and_rows() {
        let traj = integrate(&DeformationSpec::canonical(), OscState::new(1.0, 0.0), &TrajectoryConfig::rk4(0.1, 3)).unwrap();
        let text = traj.to_columns();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("# t q p H u"));
    }
}
