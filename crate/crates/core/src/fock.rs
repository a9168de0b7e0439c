//! Truncated Fock-space matrices for boson and fermion modes.
//!
//! All operators are dense complex matrices in the occupation basis. The
//! basis index is mixed-radix with the first mode most significant, so for
//! two fermion modes the states are ordered `|00⟩, |01⟩, |10⟩, |11⟩`.
//! Fermion modes carry a Jordan–Wigner string over the fermion modes that
//! precede them.
//!
//! Identities involving `a a†` fail on the top level of any truncation, so
//! every check is evaluated on the interior subspace: states whose bosonic
//! occupations are at least `interior_margin` below the cutoff.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::deform::{q_bracket, DeformError, DeformationSpec};

pub type CMat = DMatrix<Complex64>;

/// Default tolerance for identities on a bosonic interior.
pub const BOSON_CHECK_TOL: f64 = 1e-10;
/// Fermionic identities hold on the full (small) space.
pub const FERMION_CHECK_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("dimension {0} is too small (need at least 2)")]
    DimensionTooSmall(usize),
    #[error("deformation {spec} is incompatible with {statistics} statistics")]
    IncompatibleStatistics { spec: String, statistics: String },
    #[error("no mode labelled {0:?}")]
    UnknownMode(String),
    #[error("interior subspace is empty")]
    EmptyInterior,
    #[error("SU_q(2) checks need a q-deformation, got {0}")]
    NotQDeformation(String),
    #[error(transparent)]
    Deform(#[from] DeformError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Statistics {
    /// Boson truncated to `cutoff` levels `0..cutoff`.
    Boson { cutoff: usize },
    Fermion,
}

impl Statistics {
    fn levels(self) -> usize {
        match self {
            Statistics::Boson { cutoff } => cutoff,
            Statistics::Fermion => 2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Statistics::Boson { .. } => "boson",
            Statistics::Fermion => "fermion",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mode {
    pub statistics: Statistics,
    pub label: String,
}

/// Matrix representation of a set of modes.
#[derive(Debug, Clone)]
pub struct FockRep {
    modes: Vec<Mode>,
    dimension: usize,
    /// Occupation of every mode, per basis state.
    occupations: Vec<Vec<usize>>,
    a: Vec<CMat>,
    a_dag: Vec<CMat>,
    number: Vec<CMat>,
    interior_margin: usize,
}

/// Single boson mode truncated to `d` levels, interior margin 1.
pub fn build_boson_rep(d: usize) -> Result<FockRep, FockError> {
    FockRep::new(vec![Mode {
        statistics: Statistics::Boson { cutoff: d },
        label: "a".into(),
    }])
}

/// `count` boson modes of `d` levels each, labelled `a1, a2, ...`.
pub fn build_boson_modes(count: usize, d: usize) -> Result<FockRep, FockError> {
    FockRep::new(
        (1..=count)
            .map(|i| Mode {
                statistics: Statistics::Boson { cutoff: d },
                label: format!("a{i}"),
            })
            .collect(),
    )
}

/// `count` Jordan–Wigner fermion modes labelled `c1, c2, ...`.
pub fn build_fermion_modes(count: usize) -> Result<FockRep, FockError> {
    FockRep::new(
        (1..=count)
            .map(|i| Mode {
                statistics: Statistics::Fermion,
                label: format!("c{i}"),
            })
            .collect(),
    )
}

impl FockRep {
    pub fn new(modes: Vec<Mode>) -> Result<Self, FockError> {
        if modes.is_empty() {
            return Err(FockError::DimensionTooSmall(0));
        }
        for m in &modes {
            if let Statistics::Boson { cutoff } = m.statistics {
                if cutoff < 2 {
                    return Err(FockError::DimensionTooSmall(cutoff));
                }
            }
        }
        let levels: Vec<usize> = modes.iter().map(|m| m.statistics.levels()).collect();
        let dimension: usize = levels.iter().product();

        let mut strides = vec![1usize; modes.len()];
        for i in (0..modes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * levels[i + 1];
        }
        let occupations: Vec<Vec<usize>> = (0..dimension)
            .map(|s| {
                (0..modes.len())
                    .map(|i| (s / strides[i]) % levels[i])
                    .collect()
            })
            .collect();

        let mut a = Vec::with_capacity(modes.len());
        let mut a_dag = Vec::with_capacity(modes.len());
        let mut number = Vec::with_capacity(modes.len());
        for (i, mode) in modes.iter().enumerate() {
            let mut op = CMat::zeros(dimension, dimension);
            for (s, occ) in occupations.iter().enumerate() {
                let n = occ[i];
                if n == 0 {
                    continue;
                }
                let target = s - strides[i];
                let amp = match mode.statistics {
                    Statistics::Boson { .. } => (n as f64).sqrt(),
                    Statistics::Fermion => {
                        let parity: usize = modes[..i]
                            .iter()
                            .zip(occ)
                            .filter(|(m, _)| m.statistics == Statistics::Fermion)
                            .map(|(_, &o)| o)
                            .sum();
                        if parity.is_multiple_of(2) {
                            1.0
                        } else {
                            -1.0
                        }
                    }
                };
                op[(target, s)] = Complex64::new(amp, 0.0);
            }
            a_dag.push(op.adjoint());
            a.push(op);
            number.push(CMat::from_diagonal(&nalgebra::DVector::from_iterator(
                dimension,
                occupations.iter().map(|o| Complex64::new(o[i] as f64, 0.0)),
            )));
        }

        Ok(FockRep {
            modes,
            dimension,
            occupations,
            a,
            a_dag,
            number,
            interior_margin: 1,
        })
    }

    pub fn with_margin(mut self, margin: usize) -> Self {
        self.interior_margin = margin;
        self
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn interior_margin(&self) -> usize {
        self.interior_margin
    }

    pub fn mode_index(&self, label: &str) -> Result<usize, FockError> {
        self.modes
            .iter()
            .position(|m| m.label == label)
            .ok_or_else(|| FockError::UnknownMode(label.to_string()))
    }

    pub fn a(&self, mode: usize) -> &CMat {
        &self.a[mode]
    }

    pub fn a_dag(&self, mode: usize) -> &CMat {
        &self.a_dag[mode]
    }

    pub fn number(&self, mode: usize) -> &CMat {
        &self.number[mode]
    }

    pub fn occupation(&self, state: usize, mode: usize) -> usize {
        self.occupations[state][mode]
    }

    /// Basis states whose bosonic occupations all lie at least
    /// `interior_margin` below the cutoff.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.dimension)
            .filter(|&s| {
                self.modes.iter().enumerate().all(|(i, m)| match m.statistics {
                    Statistics::Boson { cutoff } => {
                        self.occupations[s][i] + self.interior_margin < cutoff
                    }
                    Statistics::Fermion => true,
                })
            })
            .collect()
    }
}

/// Deformed ladder pair `A = a f(N)`, `A† = f(N) a†` for one mode.
#[derive(Debug, Clone)]
pub struct DeformedOperators {
    pub a: CMat,
    pub a_dag: CMat,
    pub statistics: Statistics,
    pub label: String,
    /// `f(n)` on the mode's occupation levels.
    pub f: Vec<f64>,
    occupation: Vec<usize>,
    interior: Vec<usize>,
}

impl DeformedOperators {
    /// Occupation of the deformed mode in each basis state.
    pub fn occupation(&self) -> &[usize] {
        &self.occupation
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// Diagonal matrix `g(N)` for this mode.
    pub fn diag_fn(&self, g: impl Fn(usize) -> f64) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            self.occupation.len(),
            self.occupation.iter().map(|&n| Complex64::new(g(n), 0.0)),
        ))
    }
}

/// Builds `A = a f(N)` for the labelled mode.
pub fn deform(rep: &FockRep, spec: &DeformationSpec, mode: &str) -> Result<DeformedOperators, FockError> {
    let idx = rep.mode_index(mode)?;
    let statistics = rep.modes[idx].statistics;
    let incompatible = matches!(
        (spec, statistics),
        (DeformationSpec::QFermion { .. }, Statistics::Boson { .. })
            | (DeformationSpec::QBoson { .. }, Statistics::Fermion)
    );
    if incompatible {
        return Err(FockError::IncompatibleStatistics {
            spec: format!("{spec:?}"),
            statistics: statistics.name().into(),
        });
    }
    let f_sq = match statistics {
        Statistics::Boson { cutoff } => spec.boson_f_squared_table(cutoff - 1)?,
        Statistics::Fermion => spec.fermion_f_squared_table(1)?,
    };
    let f: Vec<f64> = f_sq.iter().map(|v| v.sqrt()).collect();
    let occupation: Vec<usize> = (0..rep.dimension).map(|s| rep.occupations[s][idx]).collect();

    // a · diag(f(N)) as a column scaling; entries are single products, so
    // the adjoint below equals f(N) a† exactly.
    let mut a = rep.a[idx].clone();
    for (col, &n) in occupation.iter().enumerate() {
        let scale = f[n];
        a.column_mut(col).iter_mut().for_each(|z| *z *= scale);
    }
    let a_dag = a.adjoint();
    Ok(DeformedOperators {
        a,
        a_dag,
        statistics,
        label: mode.to_string(),
        f,
        occupation,
        interior: rep.interior(),
    })
}

/// Outcome of one operator-identity check.
///
/// `max_abs_residual` is the raw interior residual. Deep-interior entries of
/// deformed operators grow like `q^n`, so the pass decision uses the
/// residual normalized by `max(1, scale)`, where `scale` is the largest
/// interior entry among the terms of the identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub identity: String,
    pub max_abs_residual: f64,
    pub scale: f64,
    pub normalized_residual: f64,
    pub interior_dimension: usize,
    pub tolerance: f64,
    pub passed: bool,
}

impl ResidualReport {
    pub fn new(identity: impl Into<String>, residual: f64, scale: f64, interior_dimension: usize, tolerance: f64) -> Self {
        let normalized = residual / scale.max(1.0);
        ResidualReport {
            identity: identity.into(),
            max_abs_residual: residual,
            scale,
            normalized_residual: normalized,
            interior_dimension,
            tolerance,
            passed: normalized.is_finite() && normalized < tolerance,
        }
    }

    /// Report for `Σ terms = 0` on `interior`.
    pub fn from_terms(identity: impl Into<String>, terms: &[CMat], interior: &[usize], tolerance: f64) -> Self {
        let scale = terms.iter().map(|t| interior_max_abs(t, interior)).fold(0.0, f64::max);
        let sum = terms[1..].iter().fold(terms[0].clone(), |acc, t| acc + t);
        ResidualReport::new(identity, interior_max_abs(&sum, interior), scale, interior.len(), tolerance)
    }
}

/// `max |X_ij|` over `i, j` in `interior`.
pub fn interior_max_abs(x: &CMat, interior: &[usize]) -> f64 {
    let mut worst = 0.0f64;
    for &i in interior {
        for &j in interior {
            let v = x[(i, j)].norm();
            if v.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(v);
        }
    }
    worst
}

fn default_tol(statistics: Statistics) -> f64 {
    match statistics {
        Statistics::Boson { .. } => BOSON_CHECK_TOL,
        Statistics::Fermion => FERMION_CHECK_TOL,
    }
}

/// Residual of `A A† − q⁻¹ A† A − q^N` on the interior.
pub fn check_qboson_relation(ops: &DeformedOperators, lambda: f64) -> Result<ResidualReport, FockError> {
    if ops.interior.is_empty() {
        return Err(FockError::EmptyInterior);
    }
    let q = lambda.exp();
    let terms = [
        &ops.a * &ops.a_dag,
        (&ops.a_dag * &ops.a) * Complex64::new(-1.0 / q, 0.0),
        -ops.diag_fn(|n| (lambda * n as f64).exp()),
    ];
    Ok(ResidualReport::from_terms(
        "A A† − q⁻¹ A† A = q^N",
        &terms,
        &ops.interior,
        BOSON_CHECK_TOL,
    ))
}

/// Residual of `A A† − g(N) A† A = h(N)` (bosons) or
/// `C C† + ḡ(N) C† C = h̄(N)` (fermions) on the interior.
pub fn check_general_relation(ops: &DeformedOperators, g: &[f64], h: &[f64]) -> Result<ResidualReport, FockError> {
    if ops.interior.is_empty() {
        return Err(FockError::EmptyInterior);
    }
    let needed = ops.interior.iter().map(|&s| ops.occupation[s]).max().unwrap_or(0) + 1;
    if g.len() < needed || h.len() < needed {
        return Err(DeformError::SequenceTooShort {
            needed,
            got: g.len().min(h.len()),
        }
        .into());
    }
    // Rows outside the interior are never inspected.
    let at = |seq: &[f64], n: usize| seq.get(n).copied().unwrap_or(0.0);
    let g_diag = ops.diag_fn(|n| at(g, n));
    let h_diag = ops.diag_fn(|n| at(h, n));
    let aa_dag = &ops.a * &ops.a_dag;
    let a_dag_a = &ops.a_dag * &ops.a;
    let (terms, name) = match ops.statistics {
        Statistics::Boson { .. } => ([aa_dag, -(g_diag * a_dag_a), -h_diag], "A A† − g(N) A† A = h(N)"),
        Statistics::Fermion => ([aa_dag, g_diag * a_dag_a, -h_diag], "C C† + ḡ(N) C† C = h̄(N)"),
    };
    Ok(ResidualReport::from_terms(
        name,
        &terms,
        &ops.interior,
        default_tol(ops.statistics),
    ))
}

/// Closed-form spectrum `n f²(n)` of `A† A` next to the eigenvalues of the
/// assembled matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumComparison {
    pub closed_form: Vec<f64>,
    pub matrix: Vec<f64>,
    pub max_abs_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Levels past `n_max` carried by the matrix representation.
pub const SPECTRUM_MARGIN: usize = 4;

pub fn deformed_spectrum(spec: &DeformationSpec, n_max: usize) -> Result<SpectrumComparison, FockError> {
    let n_max = n_max.max(1);
    let d = n_max + 1 + SPECTRUM_MARGIN;
    let rep = build_boson_rep(d)?;
    let ops = deform(&rep, spec, "a")?;

    let mut all_closed: Vec<f64> = ops
        .f
        .iter()
        .enumerate()
        .map(|(n, f)| n as f64 * f * f)
        .collect();
    all_closed.sort_by(f64::total_cmp);

    let h = &ops.a_dag * &ops.a;
    let mut eig: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);

    let scale = all_closed
        .iter()
        .chain(&eig)
        .fold(1.0f64, |m, v| m.max(v.abs()));
    let tolerance = 1e-10 * scale;
    let dev = all_closed
        .iter()
        .zip(&eig)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let closed_form: Vec<f64> = (0..=n_max).map(|n| n as f64 * ops.f[n] * ops.f[n]).collect();
    let matrix = eig[..=n_max].to_vec();
    Ok(SpectrumComparison {
        closed_form,
        matrix,
        max_abs_deviation: dev,
        tolerance,
        passed: dev < tolerance,
    })
}

fn q_lambda(spec: &DeformationSpec) -> Result<f64, FockError> {
    match spec {
        DeformationSpec::QBoson { lambda } | DeformationSpec::QFermion { lambda } => Ok(*lambda),
        other => Err(FockError::NotQDeformation(format!("{other:?}"))),
    }
}

/// Two-mode realization `S₊ = A₁†A₂`, `S₋ = A₂†A₁`, `S₃ = ½(N₁ − N₂)` and
/// residuals of the SU_q(2) relations.
///
/// `d` is the per-mode cutoff for bosons and is ignored for fermions.
pub fn check_jordan_schwinger(
    fermionic: bool,
    spec: &DeformationSpec,
    d: usize,
    margin: usize,
) -> Result<Vec<ResidualReport>, FockError> {
    let lambda = q_lambda(spec)?;
    let rep = if fermionic {
        build_fermion_modes(2)?
    } else {
        build_boson_modes(2, d)?.with_margin(margin)
    };
    let labels: Vec<String> = rep.modes.iter().map(|m| m.label.clone()).collect();
    let m1 = deform(&rep, spec, &labels[0])?;
    let m2 = deform(&rep, spec, &labels[1])?;
    let interior = rep.interior();
    if interior.is_empty() {
        return Err(FockError::EmptyInterior);
    }
    let tol = if fermionic { FERMION_CHECK_TOL } else { BOSON_CHECK_TOL };

    let s_plus = &m1.a_dag * &m2.a;
    let s_minus = &m2.a_dag * &m1.a;
    let half = Complex64::new(0.5, 0.0);
    let s3 = (rep.number(0) - rep.number(1)) * half;

    let bracket_2s3 = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        rep.dimension,
        (0..rep.dimension).map(|s| {
            let two_s3 = rep.occupations[s][0] as f64 - rep.occupations[s][1] as f64;
            Complex64::new(q_bracket(two_s3, lambda), 0.0)
        }),
    ));

    let s3_plus = [&s3 * &s_plus, -(&s_plus * &s3), -s_plus.clone()];
    let s3_minus = [&s3 * &s_minus, -(&s_minus * &s3), s_minus.clone()];
    let plus_minus = [&s_plus * &s_minus, -(&s_minus * &s_plus), -bracket_2s3];
    Ok(vec![
        ResidualReport::from_terms("[S₃, S₊] = S₊", &s3_plus, &interior, tol),
        ResidualReport::from_terms("[S₃, S₋] = −S₋", &s3_minus, &interior, tol),
        ResidualReport::from_terms("[S₊, S₋] = [2S₃]_q", &plus_minus, &interior, tol),
    ])
}
