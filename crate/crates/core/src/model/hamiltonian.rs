use crate::error::{invalid, Result};
use crate::model::basis::{mode_index, SectorBasis, Spin};
use crate::model::operator::SparseHermitianOperator;
use crate::model::params::ModelParams;

/// Real-space Hamiltonian of `params` restricted to the sector of `basis`.
///
/// Bosons: `-κ Σ (a†_i a_j + h.c.) + U/2 Σ n(n-1) + V Σ n_i n_j` over bonds
/// `(i, j)`. Fermions: `-κ Σ_σ (c†_{iσ} c_{jσ} + h.c.) + U Σ n↑ n↓ + V Σ n_i n_j`
/// with the canonical mode order (site, then up before down).
pub fn build_real_space_hamiltonian(
    params: &ModelParams,
    basis: &SectorBasis,
) -> Result<SparseHermitianOperator> {
    params.validate()?;
    if basis.n_sites() != params.n_sites {
        return Err(invalid("basis", "basis chain length differs from params.n_sites"));
    }
    if basis.statistics() != params.statistics {
        return Err(invalid("basis", "basis statistics differ from params.statistics"));
    }
    let bonds: Vec<(usize, usize)> = params.bonds().collect();
    let entries = match basis.sector() {
        crate::model::basis::Sector::Bose { .. } => bose_entries(params, basis, &bonds),
        crate::model::basis::Sector::Fermi { n_up, .. } => fermi_entries(params, basis, &bonds, n_up),
    };
    SparseHermitianOperator::from_real_upper(basis.len(), entries)
}

fn bose_entries(
    params: &ModelParams,
    basis: &SectorBasis,
    bonds: &[(usize, usize)],
) -> Vec<(usize, usize, f64)> {
    let n = params.n_sites;
    let mut entries = Vec::new();
    let mut occ = vec![0u32; n];
    let mut target: Vec<u16> = Vec::new();
    for idx in 0..basis.len() {
        let sites = basis.sites(idx);
        occ.iter_mut().for_each(|o| *o = 0);
        for &s in sites {
            occ[s as usize] += 1;
        }
        let mut diag = 0.0;
        for &s in dedup(sites).iter() {
            let m = occ[s as usize] as f64;
            diag += 0.5 * params.u * m * (m - 1.0);
        }
        for &(i, j) in bonds {
            diag += params.v * (occ[i] * occ[j]) as f64;
        }
        entries.push((idx, idx, diag));

        // a†_to a_from for every bond direction
        for &(i, j) in bonds {
            for (from, to) in [(i, j), (j, i)] {
                if occ[from] == 0 {
                    continue;
                }
                let amp = ((occ[from] * (occ[to] + 1)) as f64).sqrt();
                target.clear();
                target.extend_from_slice(sites);
                let pos = target.iter().position(|&s| s as usize == from).unwrap();
                target[pos] = to as u16;
                target.sort_unstable();
                let col = basis
                    .index_of_sites(&target)
                    .expect("hopping stays inside the particle-number sector");
                if col > idx {
                    entries.push((idx, col, -params.kappa * amp));
                }
            }
        }
    }
    entries
}

fn dedup(sites: &[u16]) -> Vec<u16> {
    let mut v = sites.to_vec();
    v.dedup();
    v
}

fn fermi_entries(
    params: &ModelParams,
    basis: &SectorBasis,
    bonds: &[(usize, usize)],
    n_up: usize,
) -> Vec<(usize, usize, f64)> {
    let n = params.n_sites;
    let mut entries = Vec::new();
    let mut up_occ = vec![false; n];
    let mut dn_occ = vec![false; n];
    let mut target: Vec<u16> = Vec::new();
    for idx in 0..basis.len() {
        let sites = basis.sites(idx);
        let (ups, downs) = sites.split_at(n_up);
        up_occ.iter_mut().for_each(|o| *o = false);
        dn_occ.iter_mut().for_each(|o| *o = false);
        ups.iter().for_each(|&s| up_occ[s as usize] = true);
        downs.iter().for_each(|&s| dn_occ[s as usize] = true);
        let dens = |s: usize| up_occ[s] as u32 + dn_occ[s] as u32;

        let mut diag = 0.0;
        for s in 0..n {
            if up_occ[s] && dn_occ[s] {
                diag += params.u;
            }
        }
        for &(i, j) in bonds {
            diag += params.v * (dens(i) * dens(j)) as f64;
        }
        entries.push((idx, idx, diag));

        for &(i, j) in bonds {
            for (from, to) in [(i, j), (j, i)] {
                for spin in [Spin::Up, Spin::Down] {
                    let occ = match spin {
                        Spin::Up => &up_occ,
                        Spin::Down => &dn_occ,
                    };
                    if !occ[from] || occ[to] {
                        continue;
                    }
                    // sign of c†_to c_from: parity of filled modes strictly between
                    let (m_from, m_to) = (mode_index(from as u16, spin), mode_index(to as u16, spin));
                    let (lo, hi) = (m_from.min(m_to), m_from.max(m_to));
                    let between = ups
                        .iter()
                        .map(|&s| mode_index(s, Spin::Up))
                        .chain(downs.iter().map(|&s| mode_index(s, Spin::Down)))
                        .filter(|&m| m > lo && m < hi)
                        .count();
                    let sign = if between % 2 == 0 { 1.0 } else { -1.0 };
                    target.clear();
                    target.extend_from_slice(sites);
                    let (tu, td) = target.split_at_mut(n_up);
                    let list = match spin {
                        Spin::Up => tu,
                        Spin::Down => td,
                    };
                    let pos = list.iter().position(|&s| s as usize == from).unwrap();
                    list[pos] = to as u16;
                    list.sort_unstable();
                    let col = basis
                        .index_of_sites(&target)
                        .expect("hopping stays inside the spin sector");
                    if col > idx {
                        entries.push((idx, col, -params.kappa * sign));
                    }
                }
            }
        }
    }
    entries
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::basis::{enumerate_basis, Configuration, Sector};
    use crate::model::params::Boundary;
    use nalgebra::DMatrix;

    fn sorted_eigs(m: &DMatrix<f64>) -> Vec<f64> {
        let mut e: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn two_site_two_bosons_by_hand() {
        let u = 3.0;
        let p = ModelParams::bose(1.0, u, 0.0, 2, Boundary::Open).unwrap();
        let b = enumerate_basis(&p, Sector::Bose { n_particles: 2 }).unwrap();
        let h = build_real_space_hamiltonian(&p, &b).unwrap().to_dense_real().unwrap();
        // basis order |20>, |11>, |02>
        let r2 = 2f64.sqrt();
        let expect = DMatrix::from_row_slice(3, 3, &[u, -r2, 0.0, -r2, 0.0, -r2, 0.0, -r2, u]);
        assert!((h - &expect).amax() < 1e-15);
        let zero_u = ModelParams { u: 0.0, ..p };
        let h0 = build_real_space_hamiltonian(&zero_u, &b).unwrap().to_dense_real().unwrap();
        let e = sorted_eigs(&h0);
        for (a, b) in e.iter().zip([-2.0, 0.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn fermi_signs_on_two_sites() {
        let p = ModelParams::fermi(1.0, 5.0, 2, Boundary::Open).unwrap();
        let b = enumerate_basis(&p, Sector::Fermi { n_up: 1, n_down: 1 }).unwrap();
        let h = build_real_space_hamiltonian(&p, &b).unwrap().to_dense_real().unwrap();
        // singlet-triplet structure: the triplet (1,1) combination has energy 0
        let e = sorted_eigs(&h);
        let s = (25.0f64 + 16.0).sqrt();
        let expect = [(5.0 - s) / 2.0, 0.0, 5.0, (5.0 + s) / 2.0];
        for (a, b) in e.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{e:?}");
        }
        let both = b.index_of(&Configuration::Fermi { up: vec![0], down: vec![0] }).unwrap();
        assert_eq!(h[(both, both)], 5.0);
    }

    #[test]
    fn mismatched_basis_rejected() {
        let p = ModelParams::bose(1.0, 1.0, 0.0, 4, Boundary::Open).unwrap();
        let b = enumerate_basis(&p, Sector::Bose { n_particles: 2 }).unwrap();
        let q = ModelParams { n_sites: 5, ..p };
        assert!(build_real_space_hamiltonian(&q, &b).is_err());
    }
}
