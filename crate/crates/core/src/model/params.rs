use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistics {
    Bose,
    FermiSpinHalf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Periodic,
    Open,
}

/// Couplings and lattice of the extended Bose-Hubbard chain
///
/// `H = -κ Σ (a†_i a_{i+1} + h.c.) + U/2 Σ n_i(n_i - 1) + V Σ n_i n_{i+1}`
///
/// or, for spin-1/2 fermions, the Hubbard chain with on-site `U n↑ n↓`
/// (and the same optional `V` density coupling, zero in the plain Hubbard model).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub kappa: f64,
    pub u: f64,
    pub v: f64,
    pub n_sites: usize,
    pub statistics: Statistics,
    pub boundary: Boundary,
}

impl ModelParams {
    pub fn new(
        kappa: f64,
        u: f64,
        v: f64,
        n_sites: usize,
        statistics: Statistics,
        boundary: Boundary,
    ) -> Result<Self> {
        let params = Self {
            kappa,
            u,
            v,
            n_sites,
            statistics,
            boundary,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn bose(kappa: f64, u: f64, v: f64, n_sites: usize, boundary: Boundary) -> Result<Self> {
        Self::new(kappa, u, v, n_sites, Statistics::Bose, boundary)
    }

    pub fn fermi(kappa: f64, u: f64, n_sites: usize, boundary: Boundary) -> Result<Self> {
        Self::new(kappa, u, 0.0, n_sites, Statistics::FermiSpinHalf, boundary)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa != 0.0) {
            return Err(invalid("kappa", "hopping must be finite and nonzero"));
        }
        if !self.u.is_finite() {
            return Err(invalid("u", "must be finite"));
        }
        if !self.v.is_finite() {
            return Err(invalid("v", "must be finite"));
        }
        if self.n_sites < 2 {
            return Err(invalid("n_sites", "need at least 2 sites"));
        }
        if self.n_sites > u16::MAX as usize {
            return Err(invalid("n_sites", "at most 65535 sites"));
        }
        Ok(())
    }

    /// Site reached from `site` by moving `offset` bonds, honoring the boundary.
    pub fn shifted_site(&self, site: usize, offset: isize) -> Option<usize> {
        let n = self.n_sites as isize;
        let target = site as isize + offset;
        match self.boundary {
            Boundary::Open => (0..n).contains(&target).then_some(target as usize),
            Boundary::Periodic => Some(target.rem_euclid(n) as usize),
        }
    }

    /// Bonds `(i, i+1)` of the chain; the wrap-around bond is included for periodic chains.
    pub fn bonds(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n_sites;
        let count = match self.boundary {
            Boundary::Open => n - 1,
            Boundary::Periodic => n,
        };
        (0..count).map(move |i| (i, (i + 1) % n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_kappa_and_short_chains() {
        assert!(ModelParams::bose(0.0, 1.0, 0.0, 5, Boundary::Open).is_err());
        assert!(ModelParams::bose(1.0, 1.0, 0.0, 1, Boundary::Open).is_err());
        assert!(ModelParams::bose(1.0, f64::NAN, 0.0, 5, Boundary::Open).is_err());
        assert!(ModelParams::fermi(1.0, 4.0, 2, Boundary::Open).is_ok());
    }

    #[test]
    fn bonds_follow_boundary() {
        let open = ModelParams::bose(1.0, 0.0, 0.0, 4, Boundary::Open).unwrap();
        assert_eq!(open.bonds().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 3)]);
        let ring = ModelParams { boundary: Boundary::Periodic, ..open };
        assert_eq!(ring.bonds().last(), Some((3, 0)));
        assert_eq!(ring.shifted_site(0, -1), Some(3));
        assert_eq!(open.shifted_site(0, -1), None);
    }
}
