//! Fixed particle-number (and spin) sectors of the chain.
//!
//! Configurations are stored by their occupied sites: a nondecreasing site
//! list for bosons (a doubly occupied site appears twice), and strictly
//! increasing up-spin then down-spin site lists for fermions. The basis is
//! ordered lexicographically on that list, which for bosons is the same as
//! descending lexicographic order of the occupation vectors
//! `(n_0, n_1, ..., n_{N-1})`, and for fermions the same order applied to the
//! concatenated `(n_↑ vector, n_↓ vector)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::params::{ModelParams, Statistics};

/// Largest particle count a sector may hold; keys pack four 16-bit sites into a `u64`.
pub const MAX_PARTICLES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sector {
    Bose { n_particles: usize },
    Fermi { n_up: usize, n_down: usize },
}

impl Sector {
    pub fn n_particles(&self) -> usize {
        match *self {
            Sector::Bose { n_particles } => n_particles,
            Sector::Fermi { n_up, n_down } => n_up + n_down,
        }
    }
}

/// A many-body Fock configuration in site-list form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Configuration {
    /// Occupied sites with multiplicity, nondecreasing.
    Bose { sites: Vec<u16> },
    /// Occupied sites per spin, each strictly increasing.
    Fermi { up: Vec<u16>, down: Vec<u16> },
}

impl Configuration {
    pub fn bose_vacuum() -> Self {
        Configuration::Bose { sites: Vec::new() }
    }

    pub fn fermi_vacuum() -> Self {
        Configuration::Fermi {
            up: Vec::new(),
            down: Vec::new(),
        }
    }

    pub fn from_bose_occupations(occupations: &[u8]) -> Self {
        let mut sites = Vec::new();
        for (site, &n) in occupations.iter().enumerate() {
            sites.extend(std::iter::repeat_n(site as u16, n as usize));
        }
        Configuration::Bose { sites }
    }

    pub fn from_fermi_occupations(up: &[u8], down: &[u8]) -> Self {
        let pick = |occ: &[u8]| {
            occ.iter()
                .enumerate()
                .filter(|(_, &n)| n > 0)
                .map(|(s, _)| s as u16)
                .collect::<Vec<_>>()
        };
        Configuration::Fermi {
            up: pick(up),
            down: pick(down),
        }
    }

    pub fn n_particles(&self) -> usize {
        match self {
            Configuration::Bose { sites } => sites.len(),
            Configuration::Fermi { up, down } => up.len() + down.len(),
        }
    }

    /// Total occupation of every site (both spins summed for fermions).
    pub fn densities(&self, n_sites: usize) -> Vec<u8> {
        let mut occ = vec![0u8; n_sites];
        match self {
            Configuration::Bose { sites } => sites.iter().for_each(|&s| occ[s as usize] += 1),
            Configuration::Fermi { up, down } => {
                up.iter().chain(down).for_each(|&s| occ[s as usize] += 1)
            }
        }
        occ
    }

    /// Applies `a†_site` and returns the amplitude `√(n_site + 1)`.
    ///
    /// Panics on a fermionic configuration.
    pub fn create_boson(&mut self, site: u16) -> f64 {
        match self {
            Configuration::Bose { sites } => {
                let n = sites.iter().filter(|&&s| s == site).count();
                let at = sites.partition_point(|&s| s <= site);
                sites.insert(at, site);
                ((n + 1) as f64).sqrt()
            }
            Configuration::Fermi { .. } => panic!("boson creation on a fermionic configuration"),
        }
    }

    /// Applies `c†_{site,spin}` with modes ordered by site, up before down.
    ///
    /// Returns the fermionic sign, or `None` when the mode is already filled.
    pub fn create_fermion(&mut self, site: u16, spin: Spin) -> Option<f64> {
        match self {
            Configuration::Fermi { up, down } => {
                let list = match spin {
                    Spin::Up => &*up,
                    Spin::Down => &*down,
                };
                if list.contains(&site) {
                    return None;
                }
                let mode = mode_index(site, spin);
                let before = up
                    .iter()
                    .map(|&s| mode_index(s, Spin::Up))
                    .chain(down.iter().map(|&s| mode_index(s, Spin::Down)))
                    .filter(|&m| m < mode)
                    .count();
                let list = match spin {
                    Spin::Up => up,
                    Spin::Down => down,
                };
                let at = list.partition_point(|&s| s < site);
                list.insert(at, site);
                Some(if before % 2 == 0 { 1.0 } else { -1.0 })
            }
            Configuration::Bose { .. } => panic!("fermion creation on a bosonic configuration"),
        }
    }
}

/// Canonical position of the fermionic mode `(site, spin)`.
pub(crate) fn mode_index(site: u16, spin: Spin) -> u32 {
    2 * site as u32 + matches!(spin, Spin::Down) as u32
}

fn pack(sites: impl Iterator<Item = u16>) -> u64 {
    sites.fold(0u64, |key, s| (key << 16) | s as u64)
}

/// Complete, ordered enumeration of one sector.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    n_sites: usize,
    sector: Sector,
    stride: usize,
    sites: Vec<u16>,
    keys: Vec<u64>,
}

impl SectorBasis {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn statistics(&self) -> Statistics {
        match self.sector {
            Sector::Bose { .. } => Statistics::Bose,
            Sector::Fermi { .. } => Statistics::FermiSpinHalf,
        }
    }

    /// Raw site list of configuration `index` (ups then downs for fermions).
    pub fn sites(&self, index: usize) -> &[u16] {
        &self.sites[index * self.stride..(index + 1) * self.stride]
    }

    pub fn configuration(&self, index: usize) -> Configuration {
        let sites = self.sites(index);
        match self.sector {
            Sector::Bose { .. } => Configuration::Bose {
                sites: sites.to_vec(),
            },
            Sector::Fermi { n_up, .. } => Configuration::Fermi {
                up: sites[..n_up].to_vec(),
                down: sites[n_up..].to_vec(),
            },
        }
    }

    pub fn configurations(&self) -> impl Iterator<Item = Configuration> + '_ {
        (0..self.len()).map(|i| self.configuration(i))
    }

    pub fn index_of(&self, config: &Configuration) -> Option<usize> {
        match (config, self.sector) {
            (Configuration::Bose { sites }, Sector::Bose { n_particles })
                if sites.len() == n_particles =>
            {
                self.index_of_sites(sites)
            }
            (Configuration::Fermi { up, down }, Sector::Fermi { n_up, n_down })
                if up.len() == n_up && down.len() == n_down =>
            {
                self.index_of_key(pack(up.iter().chain(down).copied()))
            }
            _ => None,
        }
    }

    /// Lookup by raw site list in the same layout as [`SectorBasis::sites`].
    pub fn index_of_sites(&self, sites: &[u16]) -> Option<usize> {
        if sites.len() != self.stride {
            return None;
        }
        self.index_of_key(pack(sites.iter().copied()))
    }

    fn index_of_key(&self, key: u64) -> Option<usize> {
        self.keys.binary_search(&key).ok()
    }
}

fn multisets(n_sites: usize, n: usize, out: &mut Vec<Vec<u16>>) {
    fn rec(n_sites: usize, left: usize, start: u16, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for s in start..n_sites as u16 {
            cur.push(s);
            rec(n_sites, left - 1, s, cur, out);
            cur.pop();
        }
    }
    rec(n_sites, n, 0, &mut Vec::with_capacity(n), out);
}

fn subsets(n_sites: usize, n: usize) -> Vec<Vec<u16>> {
    fn rec(n_sites: usize, left: usize, start: u16, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for s in start..n_sites as u16 {
            cur.push(s);
            rec(n_sites, left - 1, s + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n_sites, n, 0, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Enumerates every configuration of `sector` on the chain of `params`.
pub fn enumerate_basis(params: &ModelParams, sector: Sector) -> Result<SectorBasis> {
    params.validate()?;
    let n_sites = params.n_sites;
    let stride = sector.n_particles();
    if stride > MAX_PARTICLES {
        return Err(Error::UnsupportedSector(format!(
            "{stride} particles exceeds the supported maximum of {MAX_PARTICLES}"
        )));
    }
    let lists: Vec<Vec<u16>> = match (sector, params.statistics) {
        (Sector::Bose { n_particles }, Statistics::Bose) => {
            let mut out = Vec::new();
            multisets(n_sites, n_particles, &mut out);
            out
        }
        (Sector::Fermi { n_up, n_down }, Statistics::FermiSpinHalf) => {
            if n_up > n_sites || n_down > n_sites {
                return Err(invalid(
                    "sector",
                    format!("Pauli capacity exceeded: n_up={n_up}, n_down={n_down} on {n_sites} sites"),
                ));
            }
            let ups = subsets(n_sites, n_up);
            let downs = subsets(n_sites, n_down);
            let mut out = Vec::with_capacity(ups.len() * downs.len());
            for u in &ups {
                for d in &downs {
                    let mut l = u.clone();
                    l.extend_from_slice(d);
                    out.push(l);
                }
            }
            out
        }
        _ => {
            return Err(invalid(
                "sector",
                "sector statistics do not match the model statistics",
            ))
        }
    };
    let keys: Vec<u64> = lists.iter().map(|l| pack(l.iter().copied())).collect();
    debug_assert!(keys.windows(2).all(|w| w[0] < w[1]));
    let sites = lists.into_iter().flatten().collect();
    Ok(SectorBasis {
        n_sites,
        sector,
        stride,
        sites,
        keys,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::params::Boundary;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn dimensions_match_counting() {
        let p = ModelParams::bose(1.0, 0.0, 0.0, 3, Boundary::Open).unwrap();
        assert_eq!(enumerate_basis(&p, Sector::Bose { n_particles: 2 }).unwrap().len(), 6);
        let p5 = ModelParams { n_sites: 5, ..p };
        assert_eq!(enumerate_basis(&p5, Sector::Bose { n_particles: 3 }).unwrap().len(), 35);
        let f = ModelParams::fermi(1.0, 1.0, 3, Boundary::Open).unwrap();
        let fb = enumerate_basis(&f, Sector::Fermi { n_up: 1, n_down: 1 }).unwrap();
        assert_eq!(fb.len(), 9);
        for n in 2..9 {
            let f = ModelParams::fermi(1.0, 1.0, n, Boundary::Open).unwrap();
            let b = enumerate_basis(&f, Sector::Fermi { n_up: 2, n_down: 1 }).unwrap();
            assert_eq!(b.len(), binom(n, 2) * n);
            let p = ModelParams::bose(1.0, 0.0, 0.0, n, Boundary::Open).unwrap();
            let b = enumerate_basis(&p, Sector::Bose { n_particles: 3 }).unwrap();
            assert_eq!(b.len(), binom(n + 2, 3));
        }
    }

    #[test]
    fn rejects_pauli_overflow_and_mismatch() {
        let f = ModelParams::fermi(1.0, 1.0, 3, Boundary::Open).unwrap();
        assert!(enumerate_basis(&f, Sector::Fermi { n_up: 4, n_down: 0 }).is_err());
        assert!(enumerate_basis(&f, Sector::Bose { n_particles: 2 }).is_err());
        let p = ModelParams::bose(1.0, 0.0, 0.0, 3, Boundary::Open).unwrap();
        assert!(enumerate_basis(&p, Sector::Bose { n_particles: 5 }).is_err());
    }

    #[test]
    fn index_roundtrip_and_occupation_order() {
        let p = ModelParams::bose(1.0, 0.0, 0.0, 5, Boundary::Open).unwrap();
        let b = enumerate_basis(&p, Sector::Bose { n_particles: 3 }).unwrap();
        let occs: Vec<Vec<u8>> = b.configurations().map(|c| c.densities(5)).collect();
        for (i, c) in b.configurations().enumerate() {
            assert_eq!(b.index_of(&c), Some(i));
        }
        // descending lexicographic order of occupation vectors
        assert!(occs.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(occs[0], vec![3, 0, 0, 0, 0]);

        let f = ModelParams::fermi(1.0, 1.0, 4, Boundary::Open).unwrap();
        let fb = enumerate_basis(&f, Sector::Fermi { n_up: 2, n_down: 1 }).unwrap();
        for (i, c) in fb.configurations().enumerate() {
            assert_eq!(fb.index_of(&c), Some(i));
        }
    }

    #[test]
    fn fermion_creation_signs() {
        let mut c = Configuration::fermi_vacuum();
        assert_eq!(c.create_fermion(0, Spin::Down), Some(1.0));
        // c†_{0↑} has to pass nothing: mode (0,↑) precedes (0,↓)
        assert_eq!(c.create_fermion(0, Spin::Up), Some(1.0));
        assert_eq!(c.create_fermion(0, Spin::Up), None);
        // c†_{1↑} passes both filled modes of site 0
        assert_eq!(c.create_fermion(1, Spin::Up), Some(1.0));
        let mut d = Configuration::Fermi { up: vec![2], down: vec![] };
        assert_eq!(d.create_fermion(3, Spin::Down), Some(-1.0));
    }

    #[test]
    fn boson_creation_amplitudes() {
        let mut c = Configuration::bose_vacuum();
        assert_eq!(c.create_boson(1), 1.0);
        assert_eq!(c.create_boson(1), 2f64.sqrt());
        assert_eq!(c.create_boson(0), 1.0);
        assert_eq!(c, Configuration::Bose { sites: vec![0, 1, 1] });
    }
}
