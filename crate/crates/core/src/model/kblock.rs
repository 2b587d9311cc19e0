use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::params::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KBlockMode {
    /// Exact block on the momentum grid `k = 2πn/N`, `N = 2 n0 + 1`.
    PeriodicExact,
    /// Semi-infinite relative chain cut at `n0` with no boundary term.
    Truncated,
}

/// Relative-coordinate Hamiltonian of two bosons at centre-of-mass momentum `k`.
///
/// Rows are `r = 0..=n0`; `r = 0` is the doubly occupied state.
#[derive(Clone, Debug)]
pub struct KBlockMatrix {
    pub k: f64,
    pub n0: usize,
    pub t_k: f64,
    pub boundary_t: f64,
    pub matrix: DMatrix<f64>,
}

/// Default relative-coordinate cutoff for truncated blocks.
pub const DEFAULT_N0: usize = 200;

/// Grid index `n` with `k = 2πn/N`, if `k` lies on the grid.
fn grid_index(k: f64, n_sites: usize) -> Option<i64> {
    let x = k * n_sites as f64 / (2.0 * PI);
    let n = x.round();
    ((x - n).abs() < 1e-9).then_some(n as i64)
}

pub fn build_k_block(params: &ModelParams, k: f64, n0: usize, mode: KBlockMode) -> Result<KBlockMatrix> {
    // κ = 0 is allowed here: the block is then diagonal
    if !(params.kappa.is_finite() && params.u.is_finite() && params.v.is_finite()) {
        return Err(invalid("params", "couplings must be finite"));
    }
    if !k.is_finite() {
        return Err(Error::MomentumDomain { k, reason: "not finite" });
    }
    if n0 < 1 {
        return Err(invalid("n0", "need at least the r = 0 and r = 1 rows"));
    }
    let t_k = -2.0 * params.kappa * (k / 2.0).cos();
    let boundary_t = match mode {
        KBlockMode::Truncated => 0.0,
        KBlockMode::PeriodicExact => {
            if params.n_sites != 2 * n0 + 1 {
                return Err(invalid(
                    "n0",
                    format!("periodic block needs N = 2 n0 + 1, got N = {} and n0 = {n0}", params.n_sites),
                ));
            }
            let n = grid_index(k, params.n_sites).ok_or(Error::MomentumDomain {
                k,
                reason: "not on the grid 2πn/N",
            })?;
            if n.rem_euclid(2) == 0 {
                t_k
            } else {
                -t_k
            }
        }
    };
    let dim = n0 + 1;
    let mut m = DMatrix::zeros(dim, dim);
    m[(0, 0)] = params.u;
    m[(1, 1)] = params.v;
    m[(0, 1)] = 2f64.sqrt() * t_k;
    m[(1, 0)] = m[(0, 1)];
    for r in 1..n0 {
        m[(r, r + 1)] = t_k;
        m[(r + 1, r)] = t_k;
    }
    m[(n0, n0)] += boundary_t;
    Ok(KBlockMatrix {
        k,
        n0,
        t_k,
        boundary_t,
        matrix: m,
    })
}

/// Momenta `2πn/N` mapped into `(-π, π]`, ordered by `n = 0..N`.
pub fn periodic_k_grid(n_sites: usize) -> Vec<f64> {
    (0..n_sites)
        .map(|n| {
            let k = 2.0 * PI * n as f64 / n_sites as f64;
            if k > PI {
                k - 2.0 * PI
            } else {
                k
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::params::Boundary;

    #[test]
    fn block_entries() {
        let p = ModelParams::bose(1.0, 8.0, 0.5, 5, Boundary::Periodic).unwrap();
        let b = build_k_block(&p, 2.0 * PI / 5.0, 2, KBlockMode::PeriodicExact).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((b.t_k + golden).abs() < 1e-12);
        assert!((b.boundary_t - golden).abs() < 1e-12);
        assert_eq!(b.matrix[(0, 0)], 8.0);
        assert_eq!(b.matrix[(1, 1)], 0.5);
        assert!((b.matrix[(0, 1)] - 2f64.sqrt() * b.t_k).abs() < 1e-15);
        assert_eq!(b.matrix, b.matrix.transpose());
    }

    #[test]
    fn zero_hopping_is_diagonal() {
        let mut p = ModelParams::bose(1.0, 3.0, -1.0, 9, Boundary::Open).unwrap();
        p.kappa = 0.0;
        let b = build_k_block(&p, 0.3, 6, KBlockMode::Truncated).unwrap();
        let mut expect = DMatrix::zeros(7, 7);
        expect[(0, 0)] = 3.0;
        expect[(1, 1)] = -1.0;
        assert_eq!(b.matrix.map(|x| x.abs()), expect.map(|x: f64| x.abs()));
    }

    #[test]
    fn off_grid_rejected() {
        let p = ModelParams::bose(1.0, 8.0, 0.5, 7, Boundary::Periodic).unwrap();
        assert!(build_k_block(&p, 0.4, 3, KBlockMode::PeriodicExact).is_err());
        assert!(build_k_block(&p, 2.0 * PI / 7.0, 2, KBlockMode::PeriodicExact).is_err());
        assert!(build_k_block(&p, 0.4, 3, KBlockMode::Truncated).is_ok());
    }
}
