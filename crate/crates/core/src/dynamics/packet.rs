//! Initial states: a Gaussian single-particle packet incident on a pair.

use std::collections::HashMap;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::effective::{EffectiveBasis, EffectiveConfig, PairKind};
use crate::error::{invalid, Error, Result};
use crate::model::{Configuration, ModelParams, SectorBasis, Spin, Statistics};
use crate::spectrum::{extract_branch, BranchType};

type C64 = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavepacketSpec {
    pub k0: f64,
    pub sigma: f64,
    pub center: usize,
}

/// Half-width of the packet: beyond it amplitudes are below `e^{-25/4}` of
/// the peak. Layouts keep this window clear of the pair and the walls.
pub fn support_radius(sigma: f64) -> usize {
    (5.0 * sigma).ceil() as usize
}

impl WavepacketSpec {
    pub fn validate(&self, n_sites: usize) -> Result<()> {
        if !(self.sigma >= 2.0 && self.sigma.is_finite()) {
            return Err(invalid("sigma", "packet width must be at least 2 sites"));
        }
        if !(self.k0.abs() > 0.0 && self.k0.abs() < std::f64::consts::PI) {
            return Err(invalid("k0", "|k0| must lie strictly inside (0, π)"));
        }
        let r = support_radius(self.sigma);
        if self.center < r || self.center + r >= n_sites {
            return Err(invalid(
                "center",
                format!("packet support center ± {r} must lie inside the {n_sites}-site chain"),
            ));
        }
        Ok(())
    }

    /// Normalized `e^{i k0 j} e^{-(j - center)²/(4σ²)}` over the source-side
    /// sites `0..segment`, keeping only the Fourier components that move
    /// toward the pair (`q ∈ (0, π)` for `κ > 0`).
    ///
    /// Cutting the Gaussian at the chain ends leaves a tiny backward-moving
    /// part; removing it makes the prepared state purely incoming.
    pub fn amplitudes(&self, segment: usize, kappa_sign: f64) -> Vec<(usize, C64)> {
        let mut buf: Vec<C64> = (0..segment)
            .map(|j| {
                let d = j as f64 - self.center as f64;
                let env = (-d * d / (4.0 * self.sigma * self.sigma)).exp();
                C64::from_polar(env, self.k0 * j as f64)
            })
            .collect();
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(segment).process(&mut buf);
        for (m, x) in buf.iter_mut().enumerate() {
            let twice = 2 * m;
            let forward = twice != 0 && twice != segment && (twice < segment) == (kappa_sign > 0.0);
            if !forward {
                *x = C64::new(0.0, 0.0);
            }
        }
        planner.plan_fft_inverse(segment).process(&mut buf);
        let norm = buf.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        buf.into_iter().enumerate().map(|(j, a)| (j, a / norm)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preparation {
    /// Pair constituents placed exactly on their sites.
    #[default]
    Bare,
    /// Wannier-like superposition of bound-branch eigenstates centered on the pair site.
    Dressed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundPairSpec {
    pub kind: PairKind,
    pub position: usize,
    #[serde(default)]
    pub preparation: Preparation,
}

impl BoundPairSpec {
    pub fn validate(&self, wp: &WavepacketSpec, n_sites: usize) -> Result<()> {
        let gap = 4.0 * wp.sigma + 10.0;
        if (self.position as f64) - (wp.center as f64) <= gap {
            return Err(invalid("position", format!("pair must sit more than {gap} sites right of the packet center")));
        }
        let right = self.position + self.kind.footprint() - 1;
        if ((n_sites - 1 - right.min(n_sites - 1)) as f64) <= gap {
            return Err(invalid("position", format!("pair must sit more than {gap} sites from the right edge")));
        }
        // nearest-neighbor pairs also keep the particle off the site next to the dimer
        let clearance = match self.kind {
            PairKind::NNBose => 2,
            _ => 1,
        };
        if wp.center + support_radius(wp.sigma) + clearance > self.position {
            return Err(Error::InvalidSetup("packet support overlaps the pair".into()));
        }
        Ok(())
    }
}

/// Number of source-side sites `0..n` available to the particle.
pub fn source_segment(bp: &BoundPairSpec) -> usize {
    bp.position + 1 - bp.kind.footprint()
}

fn require_sector(params: &ModelParams, basis: &SectorBasis, kind: PairKind, spin: Spin) -> Result<()> {
    let ok = match (kind, params.statistics) {
        (PairKind::OnsiteBose | PairKind::NNBose, Statistics::Bose) => basis.sector().n_particles() == 3,
        (PairKind::FermiSinglet, Statistics::FermiSpinHalf) => {
            let want = match spin {
                Spin::Up => crate::model::Sector::Fermi { n_up: 2, n_down: 1 },
                Spin::Down => crate::model::Sector::Fermi { n_up: 1, n_down: 2 },
            };
            basis.sector() == want
        }
        _ => false,
    };
    if !ok || basis.n_sites() != params.n_sites {
        return Err(Error::UnsupportedSector(format!(
            "{kind:?} with incident spin {spin:?} does not live in {:?} on {} sites",
            basis.sector(),
            basis.n_sites()
        )));
    }
    Ok(())
}

/// Relative-coordinate cutoff and momentum count of the dressed pair.
const DRESSED_N0: usize = 12;
const DRESSED_MOMENTA: usize = 65;

/// Two-particle pair state as (configuration, amplitude) pairs.
fn pair_state(params: &ModelParams, bp: &BoundPairSpec) -> Result<Vec<(Configuration, f64)>> {
    let p = bp.position as u16;
    let fermi = params.statistics == Statistics::FermiSpinHalf;
    match bp.preparation {
        Preparation::Bare => {
            Ok(vec![match bp.kind {
                PairKind::OnsiteBose => (Configuration::Bose { sites: vec![p, p] }, 1.0),
                PairKind::NNBose => (Configuration::Bose { sites: vec![p, p + 1] }, 1.0),
                PairKind::FermiSinglet => up_down_pair(p, p, 1.0),
            }])
        }
        Preparation::Dressed => {
            let branch_type = match bp.kind {
                PairKind::NNBose => BranchType::NearestNeighbor,
                _ => BranchType::OnSite,
            };
            // the spin singlet has the symmetric two-boson relative problem at V = 0
            let rel = ModelParams {
                v: if fermi { 0.0 } else { params.v },
                statistics: Statistics::Bose,
                ..*params
            };
            let m = DRESSED_MOMENTA;
            let ks: Vec<f64> = (0..m)
                .map(|i| -std::f64::consts::PI + std::f64::consts::PI * (2 * i + 1) as f64 / m as f64)
                .collect();
            let branch = extract_branch(&rel, branch_type, &ks, DRESSED_N0)?;
            let n = params.n_sites as i64;
            let mut out = Vec::new();
            for x1 in 0..n {
                for r in 0..=DRESSED_N0 as i64 {
                    let x2 = x1 + r;
                    if x2 >= n {
                        break;
                    }
                    let rel_pos = x1 as f64 + r as f64 / 2.0 - bp.position as f64 - (bp.kind.footprint() - 1) as f64 / 2.0;
                    let amp: f64 = ks
                        .iter()
                        .zip(&branch.profiles)
                        .map(|(&k, f)| (k * rel_pos).cos() * f[r as usize])
                        .sum::<f64>()
                        / m as f64;
                    if amp.abs() < 1e-14 {
                        continue;
                    }
                    let (a, b) = (x1 as u16, x2 as u16);
                    if !fermi {
                        out.push((Configuration::Bose { sites: vec![a, b] }, amp));
                    } else if r == 0 {
                        out.push(up_down_pair(a, a, amp));
                    } else {
                        let s = amp / std::f64::consts::SQRT_2;
                        out.push(up_down_pair(a, b, s));
                        out.push(up_down_pair(b, a, s));
                    }
                }
            }
            Ok(out)
        }
    }
}

/// `amp · c†_{up,↑} c†_{down,↓} |vac⟩` in canonical (mode-ordered) form.
fn up_down_pair(up: u16, down: u16, amp: f64) -> (Configuration, f64) {
    let mut c = Configuration::fermi_vacuum();
    let s1 = c.create_fermion(down, Spin::Down).unwrap();
    let s2 = c.create_fermion(up, Spin::Up).unwrap();
    (c, amp * s1 * s2)
}

/// `Σ_j φ(j) a_j† |pair⟩`, normalized, in the full-model basis.
///
/// `spin` is the incident particle's spin (ignored for bosons).
pub fn prepare_scattering_state(
    params: &ModelParams,
    basis: &SectorBasis,
    wp: &WavepacketSpec,
    bp: &BoundPairSpec,
    spin: Spin,
) -> Result<Vec<C64>> {
    wp.validate(params.n_sites)?;
    bp.validate(wp, params.n_sites)?;
    require_sector(params, basis, bp.kind, spin)?;
    let pair = pair_state(params, bp)?;
    let mut psi = vec![C64::new(0.0, 0.0); basis.len()];
    for (j, phi) in wp.amplitudes(source_segment(bp), params.kappa.signum()) {
        for (config, amp) in &pair {
            let mut c = config.clone();
            let factor = match c {
                Configuration::Bose { .. } => c.create_boson(j as u16),
                Configuration::Fermi { .. } => match c.create_fermion(j as u16, spin) {
                    Some(s) => s,
                    None => continue,
                },
            };
            let idx = basis.index_of(&c).ok_or(Error::ConfigurationNotInBasis)?;
            psi[idx] += phi * (amp * factor);
        }
    }
    normalize(&mut psi)?;
    Ok(psi)
}

pub(crate) fn normalize(psi: &mut [C64]) -> Result<()> {
    let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidSetup("prepared state vanishes".into()));
    }
    for a in psi.iter_mut() {
        *a /= norm;
    }
    Ok(())
}

/// Same packet in the effective one-pair + one-particle basis (bare pair only).
pub fn prepare_effective_state(
    basis: &EffectiveBasis,
    wp: &WavepacketSpec,
    bp: &BoundPairSpec,
    spin: Spin,
    kappa_sign: f64,
) -> Result<Vec<C64>> {
    wp.validate(basis.n_sites)?;
    bp.validate(wp, basis.n_sites)?;
    if bp.preparation != Preparation::Bare {
        return Err(Error::InvalidSetup("effective models hold bare pairs only".into()));
    }
    let spin = (bp.kind == PairKind::FermiSinglet).then_some(spin);
    let mut psi = vec![C64::new(0.0, 0.0); basis.len()];
    let index: HashMap<EffectiveConfig, usize> = basis.configs().iter().enumerate().map(|(i, c)| (*c, i)).collect();
    for (j, phi) in wp.amplitudes(source_segment(bp), kappa_sign) {
        let c = EffectiveConfig {
            bp: bp.position as u16,
            particle: j as u16,
            spin,
        };
        let idx = *index.get(&c).ok_or(Error::ConfigurationNotInBasis)?;
        psi[idx] = phi;
    }
    Ok(psi)
}
