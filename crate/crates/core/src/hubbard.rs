//! Exact diagonalization of the f-deformed Hubbard model on small chains and
//! rings.
//!
//! The hopping term is
//! `−t Σ_{σ,⟨x,y⟩} f̄(N_x) f̄(N_y + 1) c†_{xσ} c_{yσ}` with `N_x = N_{x↑} + N_{x↓}`
//! and the occupancy factors acting to the left of `c†c`; the bond sum runs
//! over both orientations of every nearest-neighbour pair. The on-site term is
//! `Σ_x U_x (N_{x↑} − ½)(N_{x↓} − ½)`, which differs from the `U n↑ n↓`
//! convention by `−U/2 · N_x + U/4` per site.
//!
//! States are bit masks over spin orbitals. The default Jordan–Wigner order
//! is site-major (`orbital = 2x + σ`); spectra do not depend on the choice.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::deform::{f_bar_fermion, DeformError, DeformationSpec};

/// Largest sector dimension accepted by the dense builder.
pub const MAX_SECTOR_DIMENSION: usize = 1_000_000;
/// Hermiticity guard applied before diagonalizing.
pub const HERMITICITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HubbardError {
    #[error("sector ({n_up}, {n_down}) is empty on {sites} sites")]
    SectorEmpty { n_up: usize, n_down: usize, sites: usize },
    #[error("sector dimension {0} exceeds the dense limit")]
    DimensionTooLarge(usize),
    #[error("matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error(transparent)]
    Deform(#[from] DeformError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    OpenChain,
    Ring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinOrdering {
    /// `orbital = 2x + σ`
    SiteMajor,
    /// `orbital = σL + x`
    SpinMajor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OnSite {
    Uniform(f64),
    PerSite(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub sites: usize,
    pub geometry: Geometry,
    pub t: f64,
    pub u: OnSite,
    /// q-fermion, or a custom `f̄²` table over occupancies 0, 1, 2.
    pub deformation: DeformationSpec,
    /// `(N↑, N↓)`; `None` means every sector.
    pub sector: Option<(usize, usize)>,
    pub ordering: SpinOrdering,
}

impl LatticeSpec {
    /// Uniform `U`, q-deformation `q = e^λ`, site-major ordering.
    pub fn new(sites: usize, geometry: Geometry, t: f64, u: f64, lambda: f64) -> Self {
        LatticeSpec {
            sites,
            geometry,
            t,
            u: OnSite::Uniform(u),
            deformation: DeformationSpec::q_fermion(lambda),
            sector: None,
            ordering: SpinOrdering::SiteMajor,
        }
    }

    pub fn with_sector(mut self, n_up: usize, n_down: usize) -> Self {
        self.sector = Some((n_up, n_down));
        self
    }

    fn validate(&self) -> Result<(), HubbardError> {
        if self.sites < 2 {
            return Err(HubbardError::InvalidLattice(format!("need at least 2 sites, got {}", self.sites)));
        }
        if 2 * self.sites > 62 {
            return Err(HubbardError::InvalidLattice("too many orbitals for a 64-bit mask".into()));
        }
        if let OnSite::PerSite(v) = &self.u {
            if v.len() != self.sites {
                return Err(HubbardError::InvalidLattice(format!(
                    "{} on-site energies for {} sites",
                    v.len(),
                    self.sites
                )));
            }
        }
        Ok(())
    }

    fn u_at(&self, x: usize) -> f64 {
        match &self.u {
            OnSite::Uniform(u) => *u,
            OnSite::PerSite(v) => v[x],
        }
    }

    fn orbital(&self, x: usize, spin: usize) -> usize {
        match self.ordering {
            SpinOrdering::SiteMajor => 2 * x + spin,
            SpinOrdering::SpinMajor => spin * self.sites + x,
        }
    }

    /// Unordered nearest-neighbour pairs; a two-site ring has a single bond.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut bonds: Vec<(usize, usize)> = (0..self.sites - 1).map(|x| (x, x + 1)).collect();
        if self.geometry == Geometry::Ring && self.sites > 2 {
            bonds.push((self.sites - 1, 0));
        }
        bonds
    }

    /// `f̄` on occupancies 0, 1, 2.
    pub fn f_bar(&self) -> Result<[f64; 3], HubbardError> {
        let table = match &self.deformation {
            DeformationSpec::QFermion { lambda } => {
                [f_bar_fermion(0, *lambda), f_bar_fermion(1, *lambda), f_bar_fermion(2, *lambda)]
            }
            other => {
                let sq = other.fermion_f_squared_table(2)?;
                [sq[0].sqrt(), sq[1].sqrt(), sq[2].sqrt()]
            }
        };
        if let Some(v) = table.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(HubbardError::InvalidLattice(format!("f̄ must be positive, got {v}")));
        }
        Ok(table)
    }

    /// `f̄(3)`, which only appears in unphysical entries of the amplitude table.
    fn f_bar_3(&self) -> Option<f64> {
        match &self.deformation {
            DeformationSpec::QFermion { lambda } => Some(f_bar_fermion(3, *lambda)),
            _ => None,
        }
    }

    fn sectors(&self) -> Vec<(usize, usize)> {
        match self.sector {
            Some(s) => vec![s],
            None => (0..=self.sites)
                .flat_map(|u| (0..=self.sites).map(move |d| (u, d)))
                .collect(),
        }
    }
}

/// Which form of the deformed hopping is assembled; both give the same matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoppingForm {
    /// `C†_{xσ} C_{yσ}` with `C = c f̄(N)`.
    DeformedOperators,
    /// `f̄(N_x) f̄(N_y + 1) c†_{xσ} c_{yσ}` evaluated as written.
    Literal,
}

/// Hamiltonian restricted to one `(N↑, N↓)` sector, or to the full space.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorHamiltonian {
    pub sector: Option<(usize, usize)>,
    /// Basis masks in increasing order.
    pub basis: Vec<u64>,
    pub matrix: DMatrix<f64>,
}

fn parity_below(mask: u64, orbital: usize) -> f64 {
    if (mask & ((1u64 << orbital) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn occupancy(spec: &LatticeSpec, mask: u64, x: usize) -> usize {
    (0..2).filter(|&s| mask >> spec.orbital(x, s) & 1 == 1).count()
}

fn spin_count(spec: &LatticeSpec, mask: u64, spin: usize) -> usize {
    (0..spec.sites).filter(|&x| mask >> spec.orbital(x, spin) & 1 == 1).count()
}

fn basis(spec: &LatticeSpec, sector: Option<(usize, usize)>) -> Vec<u64> {
    let total = 1u64 << (2 * spec.sites);
    (0..total)
        .filter(|&m| match sector {
            Some((u, d)) => spin_count(spec, m, 0) == u && spin_count(spec, m, 1) == d,
            None => true,
        })
        .collect()
}

fn assemble(
    spec: &LatticeSpec,
    sector: Option<(usize, usize)>,
    form: HoppingForm,
) -> Result<SectorHamiltonian, HubbardError> {
    spec.validate()?;
    if let Some((u, d)) = sector {
        if u > spec.sites || d > spec.sites {
            return Err(HubbardError::SectorEmpty { n_up: u, n_down: d, sites: spec.sites });
        }
    }
    let f_bar = spec.f_bar()?;
    let basis = basis(spec, sector);
    if basis.is_empty() {
        let (u, d) = sector.unwrap_or((0, 0));
        return Err(HubbardError::SectorEmpty { n_up: u, n_down: d, sites: spec.sites });
    }
    if basis.len() > MAX_SECTOR_DIMENSION {
        return Err(HubbardError::DimensionTooLarge(basis.len()));
    }
    let index: HashMap<u64, usize> = basis.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let dim = basis.len();
    let mut h = DMatrix::<f64>::zeros(dim, dim);

    let mut ordered_bonds = Vec::new();
    for (x, y) in spec.bonds() {
        ordered_bonds.push((x, y));
        ordered_bonds.push((y, x));
    }

    for (col, &mask) in basis.iter().enumerate() {
        let coulomb: f64 = (0..spec.sites)
            .map(|x| {
                let up = (mask >> spec.orbital(x, 0) & 1) as f64;
                let dn = (mask >> spec.orbital(x, 1) & 1) as f64;
                spec.u_at(x) * (up - 0.5) * (dn - 0.5)
            })
            .sum();
        h[(col, col)] += coulomb;

        for &(x, y) in &ordered_bonds {
            for spin in 0..2 {
                let (ox, oy) = (spec.orbital(x, spin), spec.orbital(y, spin));
                if mask >> oy & 1 == 0 || mask >> ox & 1 == 1 {
                    continue;
                }
                let removed = mask ^ (1u64 << oy);
                let sign = parity_below(mask, oy) * parity_below(removed, ox);
                let after = removed | (1u64 << ox);
                let factor = match form {
                    HoppingForm::DeformedOperators => {
                        f_bar[occupancy(spec, after, x)] * f_bar[occupancy(spec, mask, y)]
                    }
                    HoppingForm::Literal => {
                        f_bar[occupancy(spec, after, x)] * f_bar[occupancy(spec, after, y) + 1]
                    }
                };
                let row = index[&after];
                h[(row, col)] += -spec.t * factor * sign;
            }
        }
    }
    Ok(SectorHamiltonian { sector, basis, matrix: h })
}

/// Hamiltonian of the sector given in `spec` (which must name one).
pub fn build_deformed_hubbard(spec: &LatticeSpec) -> Result<SectorHamiltonian, HubbardError> {
    let sector = spec
        .sector
        .ok_or_else(|| HubbardError::InvalidLattice("no sector given; use build_sector or solve".into()))?;
    assemble(spec, Some(sector), HoppingForm::DeformedOperators)
}

pub fn build_sector(spec: &LatticeSpec, n_up: usize, n_down: usize) -> Result<SectorHamiltonian, HubbardError> {
    assemble(spec, Some((n_up, n_down)), HoppingForm::DeformedOperators)
}

/// Hamiltonian on the whole `4^L`-dimensional Fock space.
pub fn build_full(spec: &LatticeSpec) -> Result<SectorHamiltonian, HubbardError> {
    assemble(spec, None, HoppingForm::DeformedOperators)
}

pub fn build_sector_with_form(
    spec: &LatticeSpec,
    n_up: usize,
    n_down: usize,
    form: HoppingForm,
) -> Result<SectorHamiltonian, HubbardError> {
    assemble(spec, Some((n_up, n_down)), form)
}

/// `max |H − Hᵀ|`.
pub fn hermiticity_residual(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorSpectrum {
    pub n_up: usize,
    pub n_down: usize,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub sectors: Vec<SectorSpectrum>,
    pub ground_energy: f64,
    pub hermiticity_residual: f64,
}

impl SpectrumResult {
    /// Spectrum of one sector, if it was computed.
    pub fn sector(&self, n_up: usize, n_down: usize) -> Option<&[f64]> {
        self.sectors
            .iter()
            .find(|s| s.n_up == n_up && s.n_down == n_down)
            .map(|s| s.eigenvalues.as_slice())
    }

    pub fn to_columns(&self) -> String {
        let mut out = String::from("# n_up n_down index energy\n");
        for s in &self.sectors {
            for (i, e) in s.eigenvalues.iter().enumerate() {
                out.push_str(&format!("{} {} {} {:.12e}\n", s.n_up, s.n_down, i, e));
            }
        }
        out
    }
}

/// Sorted real eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn diagonalize(h: &SectorHamiltonian) -> Result<SpectrumResult, HubbardError> {
    let residual = hermiticity_residual(&h.matrix);
    if !(residual < HERMITICITY_TOL) {
        return Err(HubbardError::NotHermitian(residual));
    }
    let eigenvalues = symmetric_eigenvalues(&h.matrix);
    let (n_up, n_down) = h.sector.unwrap_or((usize::MAX, usize::MAX));
    Ok(SpectrumResult {
        ground_energy: eigenvalues[0],
        sectors: vec![SectorSpectrum { n_up, n_down, eigenvalues }],
        hermiticity_residual: residual,
    })
}

/// Diagonalizes every requested sector.
pub fn solve(spec: &LatticeSpec) -> Result<SpectrumResult, HubbardError> {
    let parts: Vec<SpectrumResult> = spec
        .sectors()
        .into_par_iter()
        .map(|(u, d)| build_sector(spec, u, d).and_then(|h| diagonalize(&h)))
        .collect::<Result<_, _>>()?;
    let mut sectors = Vec::with_capacity(parts.len());
    let mut ground = f64::INFINITY;
    let mut residual = 0.0f64;
    for p in parts {
        ground = ground.min(p.ground_energy);
        residual = residual.max(p.hermiticity_residual);
        sectors.extend(p.sectors);
    }
    Ok(SpectrumResult { sectors, ground_energy: ground, hermiticity_residual: residual })
}

/// Effective hopping amplitude `t f̄(n_x) f̄(n_y + 1)` indexed by the
/// occupancies `[n_x][n_y]` of the two sites after the hop.
///
/// Entries that no hop can produce (`n_x = 0` or `n_y = 2`) are `None`.
pub fn hopping_amplitude_table(spec: &LatticeSpec) -> Result<[[Option<f64>; 3]; 3], HubbardError> {
    let f_bar = spec.f_bar()?;
    let f = |n: usize| if n < 3 { Some(f_bar[n]) } else { spec.f_bar_3() };
    let mut table = [[None; 3]; 3];
    for (nx, row) in table.iter_mut().enumerate() {
        for (ny, cell) in row.iter_mut().enumerate() {
            if nx == 0 || ny == 2 {
                continue;
            }
            *cell = match (f(nx), f(ny + 1)) {
                (Some(a), Some(b)) => Some(spec.t * a * b),
                _ => None,
            };
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::undeformed_hubbard_sector_spectra;

    fn dimer(lambda: f64, u: f64) -> LatticeSpec {
        LatticeSpec::new(2, Geometry::OpenChain, 1.0, u, lambda)
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn tight_binding_dimer() {
        let r = solve(&dimer(0.0, 0.0).with_sector(1, 0)).unwrap();
        assert!(close(r.sector(1, 0).unwrap(), &[-1.0, 1.0], 1e-12));
    }

    #[test]
    fn half_filled_dimer_ground_energy() {
        let r = solve(&dimer(0.0, 4.0).with_sector(1, 1)).unwrap();
        let exact = -(4.0f64 + 4.0).sqrt();
        assert!((r.ground_energy - exact).abs() < 1e-10);
        assert!((r.ground_energy + 2.8284).abs() < 1e-4);
    }

    #[test]
    fn single_electron_sector_is_undeformed() {
        for q in [1.5f64, 4.0, 0.3] {
            let r = solve(&dimer(q.ln(), 0.0).with_sector(1, 0)).unwrap();
            assert!(close(r.sector(1, 0).unwrap(), &[-1.0, 1.0], 1e-12), "q = {q}");
            let ring = LatticeSpec::new(4, Geometry::Ring, 1.0, 2.0, q.ln()).with_sector(0, 1);
            let base = LatticeSpec::new(4, Geometry::Ring, 1.0, 2.0, 0.0).with_sector(0, 1);
            assert!(close(&solve(&ring).unwrap().sectors[0].eigenvalues, &solve(&base).unwrap().sectors[0].eigenvalues, 1e-12));
        }
    }

    #[test]
    fn undeformed_matches_dense_oracle() {
        for (sites, geometry) in [(2, Geometry::OpenChain), (3, Geometry::OpenChain), (3, Geometry::Ring)] {
            let spec = LatticeSpec::new(sites, geometry, 1.0, 3.0, 0.0);
            let ours = solve(&spec).unwrap();
            let oracle = undeformed_hubbard_sector_spectra(sites, geometry == Geometry::Ring, 1.0, 3.0);
            for (nu, nd, ev) in oracle {
                assert!(close(ours.sector(nu, nd).unwrap(), &ev, 1e-10), "L={sites} ({nu},{nd})");
            }
        }
    }

    #[test]
    fn hermitian_for_all_q() {
        for q in [1.0f64, 1.5, 4.0] {
            for sites in [2, 3, 4] {
                let spec = LatticeSpec::new(sites, Geometry::Ring, 1.0, 2.5, q.ln());
                let full = build_full(&spec).unwrap();
                assert!(hermiticity_residual(&full.matrix) < 1e-12);
            }
        }
    }

    #[test]
    fn operator_and_literal_forms_agree() {
        let spec = LatticeSpec::new(3, Geometry::Ring, 0.7, 1.3, 4.0f64.ln());
        for (u, d) in [(1, 1), (2, 1), (2, 2), (3, 1)] {
            let a = build_sector_with_form(&spec, u, d, HoppingForm::DeformedOperators).unwrap();
            let b = build_sector_with_form(&spec, u, d, HoppingForm::Literal).unwrap();
            assert_eq!(a.matrix, b.matrix);
        }
    }

    #[test]
    fn orderings_share_spectra() {
        for sites in [2, 3] {
            let mut spec = LatticeSpec::new(sites, Geometry::OpenChain, 1.0, 2.0, 1.5f64.ln());
            let a = solve(&spec).unwrap();
            spec.ordering = SpinOrdering::SpinMajor;
            let b = solve(&spec).unwrap();
            for s in &a.sectors {
                assert!(close(&s.eigenvalues, b.sector(s.n_up, s.n_down).unwrap(), 1e-10));
            }
        }
    }

    #[test]
    fn sectors_are_blocks_of_full_space() {
        let spec = LatticeSpec::new(3, Geometry::Ring, 1.0, 2.0, 4.0f64.ln());
        let full = build_full(&spec).unwrap();
        let dim = full.basis.len();
        // [H, N↑] = [H, N↓] = 0
        for spin in 0..2 {
            let n: Vec<f64> = full.basis.iter().map(|&m| spin_count(&spec, m, spin) as f64).collect();
            for i in 0..dim {
                for j in 0..dim {
                    assert_eq!(full.matrix[(i, j)] * (n[j] - n[i]), 0.0);
                }
            }
        }
        for (u, d) in [(1, 1), (2, 1), (1, 2)] {
            let block = build_sector(&spec, u, d).unwrap();
            let pos: Vec<usize> = block.basis.iter().map(|m| full.basis.iter().position(|x| x == m).unwrap()).collect();
            for (a, &i) in pos.iter().enumerate() {
                for (b, &j) in pos.iter().enumerate() {
                    assert_eq!(block.matrix[(a, b)], full.matrix[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn ring_translation_invariance() {
        let u = vec![1.0, 2.5, -0.5, 3.0];
        let mut spec = LatticeSpec::new(4, Geometry::Ring, 1.0, 0.0, 1.5f64.ln());
        spec.u = OnSite::PerSite(u.clone());
        let base = solve(&spec).unwrap();
        for shift in 1..4 {
            let rotated: Vec<f64> = (0..4).map(|x| u[(x + shift) % 4]).collect();
            spec.u = OnSite::PerSite(rotated);
            let r = solve(&spec).unwrap();
            for s in &base.sectors {
                assert!(close(&s.eigenvalues, r.sector(s.n_up, s.n_down).unwrap(), 1e-10));
            }
        }
    }

    #[test]
    fn continuity_towards_undeformed() {
        let reference = solve(&dimer(0.0, 4.0).with_sector(1, 1)).unwrap();
        let mut last = f64::INFINITY;
        for q in [1.5f64, 1.1, 1.01, 1.001] {
            let r = solve(&dimer(q.ln(), 4.0).with_sector(1, 1)).unwrap();
            let dev = r.sectors[0]
                .eigenvalues
                .iter()
                .zip(&reference.sectors[0].eigenvalues)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(dev < last, "q = {q}: {dev} !< {last}");
            last = dev;
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn amplitude_table() {
        let t = hopping_amplitude_table(&dimer(0.0, 0.0)).unwrap();
        for nx in 1..3 {
            for ny in 0..2 {
                assert_eq!(t[nx][ny], Some(1.0));
            }
        }
        assert_eq!(t[0][0], None);
        let t = hopping_amplitude_table(&dimer(4.0f64.ln(), 0.0)).unwrap();
        assert!((t[2][0].unwrap() - 2.0).abs() < 1e-14);
        assert!((t[1][0].unwrap() - 1.0).abs() < 1e-14);
        assert!((t[1][1].unwrap() - 2.0).abs() < 1e-14);
        assert!((t[2][1].unwrap() - 4.0).abs() < 1e-14);
        // a hop and its reverse see the same amplitude
        for nx in 1..3 {
            for ny in 0..2 {
                assert_eq!(t[nx][ny], t[ny + 1][nx - 1]);
            }
        }
    }

    #[test]
    fn custom_table_and_errors() {
        let mut spec = dimer(0.0, 1.0).with_sector(1, 1);
        spec.deformation = DeformationSpec::Custom { f_squared: vec![0.25, 1.0, 4.0] };
        let a = solve(&spec).unwrap();
        spec.deformation = DeformationSpec::q_fermion(4.0f64.ln());
        let b = solve(&spec).unwrap();
        assert!(close(&a.sectors[0].eigenvalues, &b.sectors[0].eigenvalues, 1e-12));

        assert!(matches!(build_sector(&spec, 3, 0), Err(HubbardError::SectorEmpty { .. })));
        let bad = LatticeSpec::new(1, Geometry::OpenChain, 1.0, 1.0, 0.0);
        assert!(matches!(solve(&bad), Err(HubbardError::InvalidLattice(_))));
        spec.deformation = DeformationSpec::Custom { f_squared: vec![0.0, 1.0, 4.0] };
        assert!(solve(&spec).is_err());
    }

    #[test]
    fn non_hermitian_guard() {
        let h = SectorHamiltonian {
            sector: Some((1, 0)),
            basis: vec![1, 4],
            matrix: DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]),
        };
        assert!(matches!(diagonalize(&h), Err(HubbardError::NotHermitian(_))));
        let d = SectorHamiltonian {
            sector: Some((1, 0)),
            basis: vec![1, 4],
            matrix: DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, -1.0]),
        };
        assert_eq!(diagonalize(&d).unwrap().sectors[0].eigenvalues, vec![-1.0, 3.0]);
    }

    #[test]
    fn two_site_ring_has_one_bond() {
        let ring = LatticeSpec::new(2, Geometry::Ring, 1.0, 0.0, 0.0).with_sector(1, 0);
        assert_eq!(ring.bonds(), vec![(0, 1)]);
        assert!(close(&solve(&ring).unwrap().sectors[0].eigenvalues, &[-1.0, 1.0], 1e-12));
    }
}
