//! Truncated charged-boson field with a charge-dependent deformation.
//!
//! Each discrete mode `k` carries two species `±` of bosons. With the charge
//! `Q = Σ_k (N₊(k) − N₋(k))` the deformed operators are
//! `A±(k) = a±(k) f(k,Q)` and `A†±(k) = f(k,Q) a†±(k)`, where
//! `f(k,Q)² = (k² + M²(Q))/(k² + m₀²)`.
//!
//! Every operator here is sparse; the charge-dependent factors are diagonal
//! in the occupation basis and are applied by scaling rows or columns.

use nalgebra_sparse::{CooMatrix, CsrMatrix};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::ResidualReport;

pub const MAX_FIELD_DIMENSION: usize = 1_000_000;
pub const FIELD_RELATION_TOL: f64 = 1e-10;
pub const FIELD_SPECTRUM_TOL: f64 = 1e-12;
pub const DEFAULT_FIELD_MARGIN: usize = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("M²({charge}) = {value} is negative")]
    NegativeMassSquared { charge: i64, value: f64 },
    #[error("M² is not defined at reachable charge {0}")]
    MissingCharge(i64),
    #[error("f(k = {k}, q = {charge}) vanishes, coefficient ratios are undefined")]
    SingularCoefficient { k: f64, charge: i64 },
    #[error("dimension {0} exceeds the limit of {MAX_FIELD_DIMENSION}")]
    DimensionTooLarge(usize),
    #[error("no mode with index {0}")]
    UnknownMode(usize),
    #[error("interior is empty for cutoff {cutoff} and margin {margin}")]
    EmptyInterior { cutoff: usize, margin: usize },
    #[error("invalid field config: {0}")]
    InvalidConfig(String),
}

/// `M²` as a function of integer charge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MassSquared {
    /// `Σ_j coefficients[j] q^j`.
    Polynomial { coefficients: Vec<f64> },
    /// `values[i] = M²(min_charge + i)`.
    Table { min_charge: i64, values: Vec<f64> },
}

impl MassSquared {
    pub fn constant(value: f64) -> Self {
        MassSquared::Polynomial { coefficients: vec![value] }
    }

    pub fn eval(&self, q: i64) -> Option<f64> {
        match self {
            MassSquared::Polynomial { coefficients } => {
                Some(coefficients.iter().rev().fold(0.0, |acc, c| acc * q as f64 + c))
            }
            MassSquared::Table { min_charge, values } => {
                usize::try_from(q - min_charge).ok().and_then(|i| values.get(i).copied())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    /// Momentum magnitudes of the discrete modes.
    pub modes: Vec<f64>,
    pub m0: f64,
    pub mass_squared: MassSquared,
    /// Maximum occupation per mode and species.
    pub cutoff: usize,
}

impl FieldConfig {
    pub fn new(modes: Vec<f64>, m0: f64, mass_squared: MassSquared, cutoff: usize) -> Self {
        FieldConfig { modes, m0, mass_squared, cutoff }
    }

    /// Occupation slots: mode `i` species `+` at `2i`, species `−` at `2i + 1`.
    pub fn slots(&self) -> usize {
        2 * self.modes.len()
    }

    pub fn dimension(&self) -> Option<usize> {
        u32::try_from(self.slots()).ok().and_then(|s| (self.cutoff + 1).checked_pow(s))
    }

    /// Largest `|Q|` in the truncated space.
    pub fn max_charge(&self) -> i64 {
        (self.cutoff * self.modes.len()) as i64
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        if self.modes.is_empty() {
            return Err(FieldError::InvalidConfig("at least one mode is required".into()));
        }
        if !(self.m0 > 0.0) || !self.m0.is_finite() {
            return Err(FieldError::InvalidConfig(format!("m₀ = {} must be positive", self.m0)));
        }
        if self.cutoff < 1 {
            return Err(FieldError::InvalidConfig("cutoff must be at least 1".into()));
        }
        if self.modes.iter().any(|k| !k.is_finite()) {
            return Err(FieldError::InvalidConfig("mode momenta must be finite".into()));
        }
        match self.dimension() {
            Some(d) if d <= MAX_FIELD_DIMENSION => {}
            Some(d) => return Err(FieldError::DimensionTooLarge(d)),
            None => return Err(FieldError::DimensionTooLarge(usize::MAX)),
        }
        let w = self.max_charge();
        for q in -w..=w {
            let m2 = self.mass_squared.eval(q).ok_or(FieldError::MissingCharge(q))?;
            if !(m2 >= 0.0) {
                return Err(FieldError::NegativeMassSquared { charge: q, value: m2 });
            }
        }
        Ok(())
    }

    /// `k⁰ = √(k² + m₀²)`.
    pub fn k0(&self, mode: usize) -> f64 {
        self.modes[mode].hypot(self.m0)
    }

    /// `f²(k, q)`, or `None` outside the charge range where `M²` is known.
    pub fn f_squared(&self, mode: usize, q: i64) -> Option<f64> {
        let k = self.modes[mode];
        self.mass_squared.eval(q).map(|m2| (k * k + m2) / (k * k + self.m0 * self.m0))
    }

    /// Closed-form energy `Σ_k (k² + M²(q))/√(k² + m₀²) (n₊ + n₋)` of an
    /// occupation list in slot order.
    pub fn closed_form_energy(&self, occupations: &[usize]) -> f64 {
        let q: i64 = occupations.chunks(2).map(|c| c[0] as i64 - c[1] as i64).sum();
        let m2 = self.mass_squared.eval(q).unwrap_or(f64::NAN);
        self.modes
            .iter()
            .enumerate()
            .map(|(i, k)| (k * k + m2) / self.k0(i) * (occupations[2 * i] + occupations[2 * i + 1]) as f64)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Species {
    Plus,
    Minus,
}

impl Species {
    fn offset(self) -> usize {
        match self {
            Species::Plus => 0,
            Species::Minus => 1,
        }
    }
}

/// Operators on the truncated space `⊗_slots C^{cutoff+1}`, first slot most
/// significant in the basis index.
#[derive(Debug, Clone)]
pub struct FieldOperators {
    pub config: FieldConfig,
    pub occupations: Vec<Vec<usize>>,
    pub charges: Vec<i64>,
    pub charge: CsrMatrix<f64>,
    ladders: Vec<CsrMatrix<f64>>,
    raisers: Vec<CsrMatrix<f64>>,
    pub interior: Vec<usize>,
    pub interior_margin: usize,
}

fn diagonal(values: &[f64]) -> CsrMatrix<f64> {
    let n = values.len();
    CsrMatrix::try_from_csr_data(n, n, (0..=n).collect(), (0..n).collect(), values.to_vec())
        .expect("diagonal pattern is valid")
}

/// `diag(d) · m`.
fn scale_rows(m: &CsrMatrix<f64>, d: &[f64]) -> CsrMatrix<f64> {
    let mut out = m.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        for v in row.values_mut() {
            *v *= d[i];
        }
    }
    out
}

/// `m · diag(d)`.
fn scale_cols(m: &CsrMatrix<f64>, d: &[f64]) -> CsrMatrix<f64> {
    let mut out = m.clone();
    let (_, cols, vals) = out.csr_data_mut();
    for (c, v) in cols.iter().zip(vals.iter_mut()) {
        *v *= d[*c];
    }
    out
}

impl FieldOperators {
    pub fn dimension(&self) -> usize {
        self.charges.len()
    }

    fn slot(&self, mode: usize, species: Species) -> Result<usize, FieldError> {
        if mode >= self.config.modes.len() {
            return Err(FieldError::UnknownMode(mode));
        }
        Ok(2 * mode + species.offset())
    }

    pub fn a(&self, mode: usize, species: Species) -> Result<&CsrMatrix<f64>, FieldError> {
        Ok(&self.ladders[self.slot(mode, species)?])
    }

    pub fn a_dag(&self, mode: usize, species: Species) -> Result<&CsrMatrix<f64>, FieldError> {
        Ok(&self.raisers[self.slot(mode, species)?])
    }

    /// Diagonal of `f(k, Q + shift)`; zero where `M²` is unknown, which only
    /// happens on states at the edge of the truncated charge range.
    pub fn f_diag(&self, mode: usize, shift: i64) -> Vec<f64> {
        self.charges
            .iter()
            .map(|&q| self.config.f_squared(mode, q + shift).map_or(0.0, f64::sqrt))
            .collect()
    }

    fn f_squared_diag(&self, mode: usize, shift: i64) -> Vec<f64> {
        self.charges
            .iter()
            .map(|&q| self.config.f_squared(mode, q + shift).unwrap_or(0.0))
            .collect()
    }

    /// `A±(k) = a±(k) f(k,Q)`.
    pub fn big_a(&self, mode: usize, species: Species) -> Result<CsrMatrix<f64>, FieldError> {
        Ok(scale_cols(self.a(mode, species)?, &self.f_diag(mode, 0)))
    }

    /// `A†±(k) = f(k,Q) a†±(k)`.
    pub fn big_a_dag(&self, mode: usize, species: Species) -> Result<CsrMatrix<f64>, FieldError> {
        Ok(scale_rows(self.a_dag(mode, species)?, &self.f_diag(mode, 0)))
    }

    fn interior_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.dimension()];
        for &i in &self.interior {
            mask[i] = true;
        }
        mask
    }

    fn interior_max_abs(&self, m: &CsrMatrix<f64>, mask: &[bool]) -> f64 {
        m.triplet_iter()
            .filter(|(i, j, _)| mask[*i] && mask[*j])
            .map(|(_, _, v)| v.abs())
            .fold(0.0, |acc, v| if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(v) })
    }

    fn report(&self, identity: &str, lhs: &CsrMatrix<f64>, rhs: &CsrMatrix<f64>, mask: &[bool]) -> ResidualReport {
        let scale = self.interior_max_abs(lhs, mask).max(self.interior_max_abs(rhs, mask));
        let residual = self.interior_max_abs(&(lhs - rhs), mask);
        ResidualReport::new(identity, residual, scale, self.interior.len(), FIELD_RELATION_TOL)
    }

    /// `[Q, a†₊] = a†₊`, `[Q, a†₋] = −a†₋` and `[Q, A†₊] = A†₊` for every mode.
    pub fn charge_ladder_residuals(&self) -> Vec<ResidualReport> {
        let mask = self.interior_mask();
        let q = &self.charge;
        let mut out = Vec::new();
        for mode in 0..self.config.modes.len() {
            let ap = self.a_dag(mode, Species::Plus).expect("mode in range");
            let am = self.a_dag(mode, Species::Minus).expect("mode in range");
            let big = self.big_a_dag(mode, Species::Plus).expect("mode in range");
            out.push(self.report(&format!("[Q, a†₊(k{mode})] = a†₊"), &(q * ap - ap * q), ap, &mask));
            out.push(self.report(&format!("[Q, a†₋(k{mode})] = −a†₋"), &(q * am - am * q), &(am * -1.0), &mask));
            out.push(self.report(&format!("[Q, A†₊(k{mode})] = A†₊"), &(q * &big - &big * q), &big, &mask));
        }
        out
    }
}

pub fn build_field(cfg: &FieldConfig) -> Result<FieldOperators, FieldError> {
    build_field_with_margin(cfg, DEFAULT_FIELD_MARGIN)
}

pub fn build_field_with_margin(cfg: &FieldConfig, margin: usize) -> Result<FieldOperators, FieldError> {
    cfg.validate()?;
    let slots = cfg.slots();
    let radix = cfg.cutoff + 1;
    let dim = cfg.dimension().expect("validated");
    let strides: Vec<usize> = (0..slots).map(|j| radix.pow((slots - 1 - j) as u32)).collect();
    let occupations: Vec<Vec<usize>> = (0..dim)
        .map(|idx| strides.iter().map(|s| (idx / s) % radix).collect())
        .collect();
    let charges: Vec<i64> = occupations
        .iter()
        .map(|occ| occ.chunks(2).map(|c| c[0] as i64 - c[1] as i64).sum())
        .collect();

    let mut ladders = Vec::with_capacity(slots);
    let mut raisers = Vec::with_capacity(slots);
    for (j, &stride) in strides.iter().enumerate() {
        let mut coo = CooMatrix::new(dim, dim);
        for (idx, occ) in occupations.iter().enumerate() {
            if occ[j] > 0 {
                coo.push(idx - stride, idx, (occ[j] as f64).sqrt());
            }
        }
        let a = CsrMatrix::from(&coo);
        raisers.push(a.transpose());
        ladders.push(a);
    }
    let interior = occupations
        .iter()
        .enumerate()
        .filter(|(_, occ)| occ.iter().all(|&n| n + margin <= cfg.cutoff))
        .map(|(i, _)| i)
        .collect();
    let charge = diagonal(&charges.iter().map(|&q| q as f64).collect::<Vec<_>>());
    Ok(FieldOperators {
        config: cfg.clone(),
        occupations,
        charges,
        charge,
        ladders,
        raisers,
        interior,
        interior_margin: margin,
    })
}

/// Matrix Hamiltonian with its closed-form diagonal.
#[derive(Debug, Clone)]
pub struct FieldSpectrum {
    pub matrix: CsrMatrix<f64>,
    pub matrix_diagonal: Vec<f64>,
    pub closed_form: Vec<f64>,
    pub max_off_diagonal: f64,
    pub max_abs_deviation: f64,
    pub passed: bool,
}

impl FieldSpectrum {
    pub fn to_columns(&self, ops: &FieldOperators) -> String {
        let mut out = String::from("# index charge occupations matrix closed_form\n");
        for (i, occ) in ops.occupations.iter().enumerate() {
            let occ: Vec<String> = occ.iter().map(|n| n.to_string()).collect();
            out.push_str(&format!(
                "{} {} {} {:.15e} {:.15e}\n",
                i,
                ops.charges[i],
                occ.join(","),
                self.matrix_diagonal[i],
                self.closed_form[i]
            ));
        }
        out
    }
}

/// `H = Σ_k k⁰ (A†₊A₊ + A†₋A₋)` compared with the closed form on the full space.
pub fn hamiltonian(ops: &FieldOperators) -> FieldSpectrum {
    let dim = ops.dimension();
    let mut h = CsrMatrix::<f64>::zeros(dim, dim);
    for mode in 0..ops.config.modes.len() {
        for species in [Species::Plus, Species::Minus] {
            let a = ops.big_a(mode, species).expect("mode in range");
            let ad = ops.big_a_dag(mode, species).expect("mode in range");
            h = h + (&ad * &a) * ops.config.k0(mode);
        }
    }
    let mut diag = vec![0.0; dim];
    let mut off = 0.0f64;
    for (i, j, v) in h.triplet_iter() {
        if i == j {
            diag[i] = *v;
        } else {
            off = off.max(v.abs());
        }
    }
    let closed: Vec<f64> = ops.occupations.iter().map(|occ| ops.config.closed_form_energy(occ)).collect();
    let dev = diag.iter().zip(&closed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let scale = closed.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    FieldSpectrum {
        passed: dev <= FIELD_SPECTRUM_TOL * scale && off <= FIELD_SPECTRUM_TOL * scale,
        matrix: h,
        matrix_diagonal: diag,
        closed_form: closed,
        max_off_diagonal: off,
        max_abs_deviation: dev,
    }
}

/// Residuals of the deformed commutation relations between modes `k` and `k′`:
///
/// `A±(k)A†±(k′) − R± A†±(k′)A±(k) = f²(k,Q±1) δ_{kk′}` with
/// `R± = f(k,Q±1)f(k′,Q±1)/(f(k,Q)f(k′,Q))`, and the mixed relations
/// `A₊(k)A†₋(k′) − R A†₋(k′)A₊(k) = 0` with `R = f(k,Q+1)f(k′,Q+1)/(f(k,Q+2)f(k′,Q))`
/// (and its mirror with `Q+1, Q+2 → Q−1, Q−2`). The ratios are
/// charge-diagonal operators multiplying the second term from the left.
pub fn verify_deformed_relations(ops: &FieldOperators, k: usize, kp: usize) -> Result<Vec<ResidualReport>, FieldError> {
    let n_modes = ops.config.modes.len();
    for m in [k, kp] {
        if m >= n_modes {
            return Err(FieldError::UnknownMode(m));
        }
    }
    if ops.interior.is_empty() {
        return Err(FieldError::EmptyInterior { cutoff: ops.config.cutoff, margin: ops.interior_margin });
    }
    let w = ops.config.max_charge();
    for m in [k, kp] {
        for q in -w..=w {
            if ops.config.f_squared(m, q).is_some_and(|v| v == 0.0) {
                return Err(FieldError::SingularCoefficient { k: ops.config.modes[m], charge: q });
            }
        }
    }
    let mask = ops.interior_mask();
    let ratio = |num: [(usize, i64); 2], den: [(usize, i64); 2]| -> Vec<f64> {
        let n0 = ops.f_diag(num[0].0, num[0].1);
        let n1 = ops.f_diag(num[1].0, num[1].1);
        let d0 = ops.f_diag(den[0].0, den[0].1);
        let d1 = ops.f_diag(den[1].0, den[1].1);
        (0..ops.dimension())
            .map(|i| {
                let d = d0[i] * d1[i];
                if d == 0.0 { 0.0 } else { n0[i] * n1[i] / d }
            })
            .collect()
    };
    let zero = CsrMatrix::<f64>::zeros(ops.dimension(), ops.dimension());

    let mut reports = Vec::new();
    for (species, s, sign) in [(Species::Plus, 1i64, "+"), (Species::Minus, -1i64, "−")] {
        let a = ops.big_a(k, species)?;
        let ad = ops.big_a_dag(kp, species)?;
        let r = ratio([(k, s), (kp, s)], [(k, 0), (kp, 0)]);
        let lhs = &a * &ad - scale_rows(&(&ad * &a), &r);
        let rhs = if k == kp { diagonal(&ops.f_squared_diag(k, s)) } else { zero.clone() };
        reports.push(ops.report(&format!("A{sign}(k{k})A†{sign}(k{kp}) relation"), &lhs, &rhs, &mask));
    }
    for (sa, sb, s, name) in [
        (Species::Plus, Species::Minus, 1i64, "A₊(k{})A†₋(k{}) relation"),
        (Species::Minus, Species::Plus, -1i64, "A₋(k{})A†₊(k{}) relation"),
    ] {
        let a = ops.big_a(k, sa)?;
        let ad = ops.big_a_dag(kp, sb)?;
        let r = ratio([(k, s), (kp, s)], [(k, 2 * s), (kp, 0)]);
        let lhs = &a * &ad - scale_rows(&(&ad * &a), &r);
        let name = name.replacen("{}", &k.to_string(), 1).replacen("{}", &kp.to_string(), 1);
        reports.push(ops.report(&name, &lhs, &zero, &mask));
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic(m0: f64) -> MassSquared {
        MassSquared::Polynomial { coefficients: vec![m0 * m0, 0.0, 1.0] }
    }

    fn index_of(ops: &FieldOperators, occ: &[usize]) -> usize {
        ops.occupations.iter().position(|o| o == occ).unwrap()
    }

    #[test]
    fn undeformed_reduction() {
        let cfg = FieldConfig::new(vec![0.0, 1.0], 1.0, MassSquared::constant(1.0), 4);
        let ops = build_field(&cfg).unwrap();
        for mode in 0..2 {
            for s in [Species::Plus, Species::Minus] {
                let diff = &ops.big_a(mode, s).unwrap() - ops.a(mode, s).unwrap();
                assert!(diff.values().iter().all(|v| v.abs() < 1e-15));
            }
        }
        for (k, kp) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            for r in verify_deformed_relations(&ops, k, kp).unwrap() {
                assert!(r.max_abs_residual < 1e-12, "{r:?}");
            }
        }
        let spec = hamiltonian(&ops);
        assert!(spec.passed);
        let one = index_of(&ops, &[0, 0, 1, 0]);
        assert!((spec.matrix_diagonal[one] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn single_mode_quadratic_mass() {
        let cfg = FieldConfig::new(vec![0.0], 1.0, quadratic(1.0), 5);
        let ops = build_field(&cfg).unwrap();
        let f = ops.f_diag(0, 0);
        for (i, &q) in ops.charges.iter().enumerate() {
            assert!((f[i] * f[i] - (1.0 + (q * q) as f64)).abs() < 1e-12);
        }
        let spec = hamiltonian(&ops);
        assert!(spec.passed, "{} {}", spec.max_abs_deviation, spec.max_off_diagonal);
        assert!((spec.matrix_diagonal[index_of(&ops, &[1, 0])] - 2.0).abs() < 1e-12);
        assert!((spec.matrix_diagonal[index_of(&ops, &[1, 1])] - 2.0).abs() < 1e-12);
        for r in verify_deformed_relations(&ops, 0, 0).unwrap() {
            assert!(r.passed && r.max_abs_residual < 1e-10, "{r:?}");
        }
        for r in ops.charge_ladder_residuals() {
            assert!(r.max_abs_residual < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn relation_grid() {
        let m0 = 1.3;
        let choices = [
            MassSquared::constant(m0 * m0),
            quadratic(m0),
            MassSquared::Table {
                min_charge: -12,
                values: (-12i64..=12).map(|q| m0 * m0 * (1.0 + q.abs() as f64)).collect(),
            },
        ];
        for m2 in choices {
            for modes in [vec![0.0], vec![0.0, 1.0]] {
                let cfg = FieldConfig::new(modes.clone(), m0, m2.clone(), 5);
                let ops = build_field(&cfg).unwrap();
                for k in 0..modes.len() {
                    for kp in 0..modes.len() {
                        for r in verify_deformed_relations(&ops, k, kp).unwrap() {
                            assert!(r.max_abs_residual < 1e-10, "{m2:?} {modes:?}: {r:?}");
                        }
                    }
                }
                assert!(hamiltonian(&ops).passed);
            }
        }
    }

    #[test]
    fn distinct_modes_have_zero_right_side() {
        let cfg = FieldConfig::new(vec![0.0, 1.0], 1.0, quadratic(1.0), 4);
        let ops = build_field(&cfg).unwrap();
        let reports = verify_deformed_relations(&ops, 0, 1).unwrap();
        assert_eq!(reports.len(), 4);
        assert!(reports.iter().all(|r| r.max_abs_residual < 1e-10));
    }

    #[test]
    fn right_multiplied_ratio_fails() {
        // the ordering of the charge-dependent coefficient matters
        let cfg = FieldConfig::new(vec![0.0], 1.0, quadratic(1.0), 5);
        let ops = build_field(&cfg).unwrap();
        let a = ops.big_a(0, Species::Plus).unwrap();
        let ad = ops.big_a_dag(0, Species::Minus).unwrap();
        let num = ops.f_diag(0, 1);
        let den = ops.f_diag(0, 2);
        let den0 = ops.f_diag(0, 0);
        let r: Vec<f64> = (0..ops.dimension())
            .map(|i| if den[i] * den0[i] == 0.0 { 0.0 } else { num[i] * num[i] / (den[i] * den0[i]) })
            .collect();
        let zero = CsrMatrix::<f64>::zeros(ops.dimension(), ops.dimension());
        let mask = ops.interior_mask();
        let left = ops.report("left", &(&a * &ad - scale_rows(&(&ad * &a), &r)), &zero, &mask);
        assert!(left.max_abs_residual < 1e-10);
        let rep = ops.report("right", &(&a * &ad - scale_cols(&(&ad * &a), &r)), &zero, &mask);
        assert!(rep.max_abs_residual > 1e-3);
    }

    #[test]
    fn excitation_cost_depends_on_charge() {
        let cfg = FieldConfig::new(vec![0.0, 1.0], 1.0, quadratic(1.0), 4);
        let ops = build_field(&cfg).unwrap();
        let spec = hamiltonian(&ops);
        // one k=1 quantum of + on top of backgrounds of charge 0, 1, 2
        for background in 0..3usize {
            let before = [background, 0, 0, 0];
            let after = [background, 0, 1, 0];
            let e0 = spec.matrix_diagonal[index_of(&ops, &before)];
            let e1 = spec.matrix_diagonal[index_of(&ops, &after)];
            let q = background as i64;
            let m2 = |q: i64| 1.0 + (q * q) as f64;
            let expected = (1.0 + m2(q + 1)) / 2f64.sqrt() + (m2(q + 1) - m2(q)) * background as f64;
            assert!((e1 - e0 - expected).abs() < 1e-12, "background {background}");
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let neg = MassSquared::Polynomial { coefficients: vec![1.0, 1.0] };
        let err = build_field(&FieldConfig::new(vec![0.0], 1.0, neg, 3)).unwrap_err();
        assert!(matches!(err, FieldError::NegativeMassSquared { charge: -3, .. }));
        let big = FieldConfig::new(vec![0.0; 4], 1.0, MassSquared::constant(1.0), 6);
        assert!(matches!(build_field(&big), Err(FieldError::DimensionTooLarge(_))));
        let short = MassSquared::Table { min_charge: 0, values: vec![1.0; 4] };
        assert!(matches!(build_field(&FieldConfig::new(vec![0.0], 1.0, short, 2)), Err(FieldError::MissingCharge(-2))));
        let zero_f = MassSquared::Polynomial { coefficients: vec![0.0, 0.0, 1.0] };
        let ops = build_field(&FieldConfig::new(vec![0.0], 1.0, zero_f, 4)).unwrap();
        assert!(matches!(verify_deformed_relations(&ops, 0, 0), Err(FieldError::SingularCoefficient { charge: 0, .. })));
        let tiny = build_field(&FieldConfig::new(vec![0.0], 1.0, MassSquared::constant(1.0), 1)).unwrap();
        assert!(matches!(verify_deformed_relations(&tiny, 0, 0), Err(FieldError::EmptyInterior { .. })));
    }

    #[test]
    fn charge_matrix_is_exact() {
        let cfg = FieldConfig::new(vec![0.5, 2.0], 1.0, quadratic(1.0), 3);
        let ops = build_field(&cfg).unwrap();
        assert_eq!(ops.dimension(), 256);
        for (occ, &q) in ops.occupations.iter().zip(&ops.charges) {
            assert_eq!(q, occ[0] as i64 - occ[1] as i64 + occ[2] as i64 - occ[3] as i64);
        }
        for r in ops.charge_ladder_residuals() {
            assert_eq!(r.max_abs_residual, 0.0, "{r:?}");
        }
    }
}
