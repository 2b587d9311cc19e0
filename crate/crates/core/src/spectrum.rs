//! Bound-state branches of the two-boson k-blocks.

use nalgebra::{DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_k_block, KBlockMatrix, KBlockMode, ModelParams};

/// Eigenvectors whose overlap with the previous k point falls below this are not followed.
pub const OVERLAP_THRESHOLD: f64 = 0.5;
/// Minimum localization weight for seeding a branch.
pub const SEED_WEIGHT_THRESHOLD: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchType {
    OnSite,
    NearestNeighbor,
    Bonding,
    AntiBonding,
}

impl std::fmt::Display for BranchType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BranchType::OnSite => "on-site",
            BranchType::NearestNeighbor => "nearest-neighbor",
            BranchType::Bonding => "bonding",
            BranchType::AntiBonding => "anti-bonding",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: DVector<f64>,
}

/// Full spectrum of a block, ascending.
///
/// Eigenvectors are orthonormal, with the largest-magnitude component made
/// positive; equal eigenvalues are ordered by the site of that component.
pub fn solve_k_block(block: &KBlockMatrix) -> Vec<EigenPair> {
    let eig = SymmetricEigen::new(block.matrix.clone());
    let mut pairs: Vec<(EigenPair, usize)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&value, col)| {
            let mut vector = col.into_owned();
            let dominant = vector.iamax();
            if vector[dominant] < 0.0 {
                vector.neg_mut();
            }
            (EigenPair { value, vector }, dominant)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.value.total_cmp(&b.0.value).then(a.1.cmp(&b.1)));
    pairs.into_iter().map(|(p, _)| p).collect()
}

#[derive(Clone, Debug)]
pub struct BoundStateBranch {
    pub branch_type: BranchType,
    pub k_grid: Vec<f64>,
    pub energies: Vec<f64>,
    pub profiles: Vec<DVector<f64>>,
    pub weight_r0: Vec<f64>,
    pub weight_r1: Vec<f64>,
}

impl BoundStateBranch {
    pub fn bandwidth(&self) -> f64 {
        let max = self.energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.energies.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    /// Least-squares fit `ε_k ≈ c0 + 2 c1 cos k`, returning `(c0, c1)`.
    pub fn cosine_fit(&self) -> (f64, f64) {
        cosine_fit(&self.k_grid, &self.energies)
    }
}

pub fn cosine_fit(ks: &[f64], energies: &[f64]) -> (f64, f64) {
    let n = ks.len() as f64;
    let (mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (&k, &e) in ks.iter().zip(energies) {
        let x = 2.0 * k.cos();
        sx += x;
        sxx += x * x;
        sy += e;
        sxy += x * e;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (intercept, slope)
}

fn score(branch: BranchType, v: &DVector<f64>) -> f64 {
    let w0 = v[0] * v[0];
    let w1 = v[1] * v[1];
    match branch {
        BranchType::OnSite => w0,
        BranchType::NearestNeighbor => w1,
        BranchType::Bonding | BranchType::AntiBonding => w0 + w1,
    }
}

fn seed(branch: BranchType, pairs: &[EigenPair]) -> Option<usize> {
    let mut ranked: Vec<usize> = (0..pairs.len()).collect();
    ranked.sort_by(|&a, &b| score(branch, &pairs[b].vector).total_cmp(&score(branch, &pairs[a].vector)));
    match branch {
        BranchType::OnSite | BranchType::NearestNeighbor => ranked.first().copied(),
        BranchType::Bonding | BranchType::AntiBonding => {
            let (a, b) = (*ranked.first()?, *ranked.get(1)?);
            let (lo, hi) = if pairs[a].value <= pairs[b].value { (a, b) } else { (b, a) };
            Some(if branch == BranchType::Bonding { lo } else { hi })
        }
    }
    .filter(|&i| score(branch, &pairs[i].vector) >= SEED_WEIGHT_THRESHOLD)
}

/// Follows one bound branch across `k_grid` (in the given order) on
/// truncated blocks of cutoff `n0`.
///
/// The branch is seeded at the first momentum by localization weight and
/// continued by maximal eigenvector overlap with the previous momentum.
pub fn extract_branch(
    params: &ModelParams,
    branch_type: BranchType,
    k_grid: &[f64],
    n0: usize,
) -> Result<BoundStateBranch> {
    if k_grid.is_empty() {
        return Err(crate::error::invalid("k_grid", "empty momentum grid"));
    }
    let spectra: Vec<Vec<EigenPair>> = k_grid
        .iter()
        .map(|&k| build_k_block(params, k, n0, KBlockMode::Truncated).map(|b| solve_k_block(&b)))
        .collect::<Result<_>>()?;

    let not_found = |reason: String| Error::BranchNotFound {
        branch: branch_type.to_string(),
        reason,
    };
    let first = seed(branch_type, &spectra[0]).ok_or_else(|| {
        not_found(format!(
            "no eigenstate at k = {} reaches localization weight {SEED_WEIGHT_THRESHOLD}",
            k_grid[0]
        ))
    })?;

    let mut chosen = vec![first];
    for (i, pairs) in spectra.iter().enumerate().skip(1) {
        let prev = &spectra[i - 1][chosen[i - 1]].vector;
        let (best, overlap) = pairs
            .iter()
            .enumerate()
            .map(|(j, p)| (j, prev.dot(&p.vector).abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if overlap < OVERLAP_THRESHOLD {
            return Err(not_found(format!(
                "branch lost at k = {}: best overlap {overlap:.3}",
                k_grid[i]
            )));
        }
        chosen.push(best);
    }

    let mut branch = BoundStateBranch {
        branch_type,
        k_grid: k_grid.to_vec(),
        energies: Vec::with_capacity(k_grid.len()),
        profiles: Vec::with_capacity(k_grid.len()),
        weight_r0: Vec::with_capacity(k_grid.len()),
        weight_r1: Vec::with_capacity(k_grid.len()),
    };
    for (pairs, &j) in spectra.iter().zip(&chosen) {
        let p = &pairs[j];
        branch.energies.push(p.value);
        branch.weight_r0.push(p.vector[0] * p.vector[0]);
        branch.weight_r1.push(p.vector[1] * p.vector[1]);
        branch.profiles.push(p.vector.clone());
    }
    Ok(branch)
}

/// Second-order estimate `U + 4κ²/U (cos k + 1)` of the on-site pair band.
pub fn perturbative_onsite_energy(kappa: f64, u: f64, k: f64) -> f64 {
    u + 4.0 * kappa * kappa / u * (k.cos() + 1.0)
}

/// Uniform grid of `n` momenta over `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}
