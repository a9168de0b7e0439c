//! Independent reference computations used by the verification suite.
//!
//! Nothing here calls into the implementation paths it is compared with:
//! the Hubbard reference is assembled from Kronecker products of 2×2
//! matrices, and the noise references use plain quadrature and direct sums.

use nalgebra::DMatrix;

fn kron_chain(factors: &[DMatrix<f64>]) -> DMatrix<f64> {
    factors[1..]
        .iter()
        .fold(factors[0].clone(), |acc, f| acc.kronecker(f))
}

/// Undeformed Hubbard spectra, per `(N↑, N↓)` sector, on `sites` sites with
/// the `(n↑ − ½)(n↓ − ½)` on-site convention.
pub fn undeformed_hubbard_sector_spectra(sites: usize, ring: bool, t: f64, u: f64) -> Vec<(usize, usize, Vec<f64>)> {
    let orbitals = 2 * sites;
    let id = DMatrix::<f64>::identity(2, 2);
    let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let lower = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let c: Vec<DMatrix<f64>> = (0..orbitals)
        .map(|j| {
            let factors: Vec<DMatrix<f64>> = (0..orbitals)
                .map(|k| match k.cmp(&j) {
                    std::cmp::Ordering::Less => z.clone(),
                    std::cmp::Ordering::Equal => lower.clone(),
                    std::cmp::Ordering::Greater => id.clone(),
                })
                .collect();
            kron_chain(&factors)
        })
        .collect();
    let dim = 1usize << orbitals;
    let n: Vec<DMatrix<f64>> = c.iter().map(|cj| cj.transpose() * cj).collect();
    let half = DMatrix::<f64>::identity(dim, dim) * 0.5;

    let mut pairs: Vec<(usize, usize)> = (0..sites - 1).map(|x| (x, x + 1)).collect();
    if ring && sites > 2 {
        pairs.push((sites - 1, 0));
    }
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for &(x, y) in &pairs {
        for s in 0..2 {
            let (i, j) = (2 * x + s, 2 * y + s);
            h -= (c[i].transpose() * &c[j] + c[j].transpose() * &c[i]) * t;
        }
    }
    for x in 0..sites {
        h += (&n[2 * x] - &half) * (&n[2 * x + 1] - &half) * u;
    }

    let n_up: Vec<usize> = (0..dim)
        .map(|k| (0..sites).map(|x| n[2 * x][(k, k)]).sum::<f64>().round() as usize)
        .collect();
    let n_down: Vec<usize> = (0..dim)
        .map(|k| (0..sites).map(|x| n[2 * x + 1][(k, k)]).sum::<f64>().round() as usize)
        .collect();

    let mut out = Vec::new();
    for nu in 0..=sites {
        for nd in 0..=sites {
            let idx: Vec<usize> = (0..dim).filter(|&k| n_up[k] == nu && n_down[k] == nd).collect();
            let block = DMatrix::from_fn(idx.len(), idx.len(), |a, b| h[(idx[a], idx[b])]);
            let mut ev: Vec<f64> = block.symmetric_eigen().eigenvalues.iter().copied().collect();
            ev.sort_by(f64::total_cmp);
            out.push((nu, nd, ev));
        }
    }
    out
}

/// Composite Gauss–Legendre quadrature of `f` on `[a, b]`.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    // 8-point rule
    const X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
    const W: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = a + (p as f64 + 0.5) * h;
            let half = 0.5 * h;
            X.iter()
                .zip(W)
                .map(|(&x, w)| w * (f(mid - half * x) + f(mid + half * x)))
                .sum::<f64>()
                * half
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_is_accurate() {
        let v = gauss_legendre(|t| (-t * t).exp(), -8.0, 8.0, 64);
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn dimer_reference() {
        let spectra = undeformed_hubbard_sector_spectra(2, false, 1.0, 4.0);
        let half = spectra.iter().find(|(u, d, _)| *u == 1 && *d == 1).unwrap();
        assert!((half.2[0] + 8.0f64.sqrt()).abs() < 1e-12);
    }
}
