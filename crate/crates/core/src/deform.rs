//! Scalar layer of the deformation toolkit.
//!
//! A deformation is described by the function `f²(n)` that rescales the
//! canonical ladder operators, `A = a f(N)`. The q-boson case has the closed
//! form `f²(n) = sinh(λn) / (n sinh λ)` with `q = e^λ`; general deformations
//! are obtained from a pair of sequences `(g, h)` by solving the recursion
//! that makes `A A† − g(N) A† A = h(N)` hold exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance used for closed-form identities.
pub const IDENTITY_RTOL: f64 = 1e-12;
/// Tolerance used when deciding consistency booleans.
pub const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeformError {
    #[error("non-positive f² = {value} at n = {n}")]
    NonPositive { n: usize, value: f64 },
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("sequence too short: need {needed} entries, got {got}")]
    SequenceTooShort { needed: usize, got: usize },
    #[error("invalid deformation: {0}")]
    Invalid(String),
}

/// How a mode is deformed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeformationSpec {
    /// q-boson with `q = e^λ`.
    QBoson { lambda: f64 },
    /// q-fermion with `f̄(N) = q^{(N-1)/2}`.
    QFermion { lambda: f64 },
    /// Explicit `f²(n)` table; entry 0 is a convention slot.
    Custom { f_squared: Vec<f64> },
    /// Deformation defined by the commutator data `(g, h)`.
    FromGH { g: Vec<f64>, h: Vec<f64> },
}

impl DeformationSpec {
    pub fn q_boson(lambda: f64) -> Self {
        DeformationSpec::QBoson { lambda }
    }

    pub fn q_fermion(lambda: f64) -> Self {
        DeformationSpec::QFermion { lambda }
    }

    /// The undeformed oscillator.
    pub fn canonical() -> Self {
        DeformationSpec::QBoson { lambda: 0.0 }
    }

    /// Samples `g` and `h` on `0..len`.
    pub fn from_gh_fn(g: impl Fn(usize) -> f64, h: impl Fn(usize) -> f64, len: usize) -> Self {
        DeformationSpec::FromGH {
            g: (0..len).map(&g).collect(),
            h: (0..len).map(&h).collect(),
        }
    }

    /// Checks the type-level invariants.
    pub fn validate(&self) -> Result<(), DeformError> {
        match self {
            DeformationSpec::QBoson { lambda } | DeformationSpec::QFermion { lambda } => {
                if !lambda.is_finite() {
                    return Err(DeformError::Invalid(format!("λ = {lambda} is not finite")));
                }
            }
            DeformationSpec::Custom { f_squared } => {
                if let Some((n, &v)) = f_squared
                    .iter()
                    .enumerate()
                    .skip(1)
                    .find(|(_, v)| !(**v > 0.0) || !v.is_finite())
                {
                    return Err(DeformError::NonPositive { n, value: v });
                }
            }
            DeformationSpec::FromGH { g, h } => {
                if g.len() != h.len() {
                    return Err(DeformError::Invalid(format!(
                        "g has {} entries but h has {}",
                        g.len(),
                        h.len()
                    )));
                }
            }
        }
        Ok(())
    }

    /// `f²(n)` for `0 ≤ n ≤ n_max` of a bosonic mode.
    ///
    /// Entry 0 follows the convention of the source: the analytic limit for
    /// the q-boson, 1 for the recursion solver and whatever the table holds
    /// for custom tables.
    pub fn boson_f_squared_table(&self, n_max: usize) -> Result<Vec<f64>, DeformError> {
        self.validate()?;
        match self {
            DeformationSpec::QBoson { lambda } => {
                Ok((0..=n_max).map(|n| f_squared_boson(n, *lambda)).collect())
            }
            DeformationSpec::QFermion { .. } => Err(DeformError::Invalid(
                "q-fermion deformation applied to a boson".into(),
            )),
            DeformationSpec::Custom { f_squared } => {
                if f_squared.len() < n_max + 1 {
                    return Err(DeformError::SequenceTooShort {
                        needed: n_max + 1,
                        got: f_squared.len(),
                    });
                }
                Ok(f_squared[..=n_max].to_vec())
            }
            DeformationSpec::FromGH { g, h } => solve_f_from_gh_boson(g, h, n_max),
        }
    }

    /// `f̄²(n)` for fermionic occupancies `0 ≤ n ≤ n_max`.
    ///
    /// Slots the source leaves undetermined are filled with 1.
    pub fn fermion_f_squared_table(&self, n_max: usize) -> Result<Vec<f64>, DeformError> {
        self.validate()?;
        match self {
            DeformationSpec::QFermion { lambda } => Ok((0..=n_max)
                .map(|n| f_bar_fermion(n, *lambda).powi(2))
                .collect()),
            DeformationSpec::QBoson { .. } => Err(DeformError::Invalid(
                "q-boson deformation applied to a fermion".into(),
            )),
            DeformationSpec::Custom { f_squared } => {
                if f_squared.len() < n_max + 1 {
                    return Err(DeformError::SequenceTooShort {
                        needed: n_max + 1,
                        got: f_squared.len(),
                    });
                }
                Ok(f_squared[..=n_max].to_vec())
            }
            DeformationSpec::FromGH { g, h } => {
                let sol = solve_f_from_gh_fermion(g, h)?;
                let mut table = vec![1.0; n_max + 1];
                if n_max >= 1 {
                    table[1] = sol.f_bar_squared_1;
                }
                Ok(table)
            }
        }
    }
}

/// `sinh(a) / sinh(b)` without overflow for large arguments.
///
/// Uses `sinh(a)/sinh(b) = e^{|a|-|b|} (1 - e^{-2|a|}) / (1 - e^{-2|b|})`
/// with the sign restored, so the ratio is finite whenever it is
/// representable.
pub fn sinh_ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        return if a == 0.0 { 1.0 } else { f64::NAN };
    }
    if a == 0.0 {
        return 0.0;
    }
    let (aa, ab) = (a.abs(), b.abs());
    if aa < 20.0 && ab < 20.0 {
        return a.sinh() / b.sinh();
    }
    let sign = a.signum() * b.signum();
    sign * (aa - ab).exp() * (-(-2.0 * aa).exp_m1()) / (-(-2.0 * ab).exp_m1())
}

/// `f²(n) = sinh(λn) / (n sinh λ)` for the q-boson.
///
/// At `n = 0` this returns the analytic limit `λ / sinh λ`, and at `λ = 0`
/// it returns 1.
pub fn f_squared_boson(n: usize, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 1.0;
    }
    if n == 0 {
        return lambda / lambda.sinh();
    }
    let nf = n as f64;
    sinh_ratio(lambda * nf, lambda) / nf
}

/// The q-bracket `[n]_q = sinh(λn)/sinh(λ)`, i.e. `n f²(n)`.
pub fn q_bracket(x: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return x;
    }
    sinh_ratio(lambda * x, lambda)
}

/// Solves `f²(n+1)(n+1) = h(n) + g(n) f²(n) n` upward from `f²(1) = h(0)`.
///
/// Returns `f²(0..=n_max)` with `f²(0) = 1`, an unused convention slot.
pub fn solve_f_from_gh_boson(g: &[f64], h: &[f64], n_max: usize) -> Result<Vec<f64>, DeformError> {
    let needed = n_max;
    if g.len() < needed || h.len() < needed {
        return Err(DeformError::SequenceTooShort {
            needed,
            got: g.len().min(h.len()),
        });
    }
    let mut table = vec![1.0; n_max + 1];
    for n in 0..n_max {
        let nf = n as f64;
        let next = (h[n] + g[n] * table[n] * nf) / (nf + 1.0);
        if !(next > 0.0) {
            return Err(DeformError::NonPositive { n: n + 1, value: next });
        }
        table[n + 1] = next;
    }
    Ok(table)
}

/// Result of the fermionic consistency solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FermionSolution {
    pub f_bar_squared_1: f64,
    pub consistent: bool,
}

/// Fermionic analogue of the boson recursion.
///
/// The `N = 0` instance fixes `f̄²(1) = h̄(0)`; at `N = 1` the coefficient of
/// `f̄²(2)` vanishes, so `ḡ(1) f̄²(1) = h̄(1)` is a pure constraint.
pub fn solve_f_from_gh_fermion(g_bar: &[f64], h_bar: &[f64]) -> Result<FermionSolution, DeformError> {
    if g_bar.len() < 2 || h_bar.len() < 2 {
        return Err(DeformError::SequenceTooShort {
            needed: 2,
            got: g_bar.len().min(h_bar.len()),
        });
    }
    let f1 = h_bar[0];
    if !(f1 > 0.0) {
        return Err(DeformError::NonPositive { n: 1, value: f1 });
    }
    let lhs = g_bar[1] * f1;
    let scale = lhs.abs().max(h_bar[1].abs()).max(1.0);
    let consistent = (lhs - h_bar[1]).abs() <= CONSISTENCY_TOL * scale;
    Ok(FermionSolution {
        f_bar_squared_1: f1,
        consistent,
    })
}

/// `f̄(n) = q^{(n-1)/2}` with `q = e^λ`.
pub fn f_bar_fermion(n: usize, lambda: f64) -> f64 {
    (0.5 * lambda * (n as f64 - 1.0)).exp()
}

/// Exact three-point fit of `m_n = k sinh(λn)/sinh λ + m_e`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeptonFitResult {
    /// MeV.
    pub k: f64,
    pub lambda: f64,
    /// MeV, indexed by excitation number.
    pub masses: Vec<f64>,
}

impl LeptonFitResult {
    pub fn mass(&self, n: usize) -> f64 {
        lepton_mass(self.k, self.lambda, self.masses[0], n)
    }
}

fn lepton_mass(k: f64, lambda: f64, m_e: f64, n: usize) -> f64 {
    k * q_bracket(n as f64, lambda) + m_e
}

/// Default lepton masses in MeV (electron, muon, tau).
pub const LEPTON_MASSES_MEV: (f64, f64, f64) = (0.511, 105.658, 1776.86);

pub fn lepton_fit(m_e: f64, m_mu: f64, m_tau: f64, n_max: usize) -> Result<LeptonFitResult, DeformError> {
    if !(m_e < m_mu && m_mu < m_tau) {
        return Err(DeformError::DomainError(format!(
            "masses must be strictly increasing, got ({m_e}, {m_mu}, {m_tau})"
        )));
    }
    let k = m_mu - m_e;
    // m_2 = 2k cosh λ + m_e
    let arg = (m_tau - m_e) / (2.0 * k);
    if !(arg > 1.0) {
        return Err(DeformError::DomainError(format!(
            "arccosh argument {arg} must exceed 1"
        )));
    }
    let lambda = arg.acosh();
    let masses = (0..=n_max).map(|n| lepton_mass(k, lambda, m_e, n)).collect();
    Ok(LeptonFitResult { k, lambda, masses })
}
