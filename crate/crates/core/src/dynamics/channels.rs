//! Channel decomposition of a one-pair + one-particle state.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::effective::{map_configuration, map_effective, ChannelLabel, EffectiveBasis, PairKind, Side};
use crate::model::{SectorBasis, SparseHermitianOperator, Spin};

type C64 = Complex64;

/// Channel probabilities at one instant. Probabilities are normalized by
/// `norm²` and so always sum to one; `p_shifted` is the operational
/// "coherent shift" measure (particle beyond the pair, pair displaced).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScatteringObservables {
    pub time: f64,
    /// Particle on the source side of the pair and moving toward it.
    pub p_incident: f64,
    /// Particle on the source side moving away from the pair.
    pub p_reflected: f64,
    pub p_shifted: f64,
    pub p_pair_broken: f64,
    /// Mean pair displacement toward the source within the shifted channel
    /// (0 when that channel is empty).
    pub shift_estimate: f64,
    pub norm: f64,
    pub energy: f64,
    /// Weight of intact-pair configurations with the particle on an end site.
    pub edge_occupancy: f64,
    /// Mean particle-pair distance within intact-pair configurations.
    pub separation: f64,
}

/// Channel data of one basis state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChannelEntry {
    /// `None` for pair-broken configurations.
    pub side: Option<Side>,
    pub particle: usize,
    pub bp: usize,
    pub spin: Option<Spin>,
}

impl From<ChannelLabel> for ChannelEntry {
    fn from(label: ChannelLabel) -> Self {
        match label {
            ChannelLabel::Channel {
                side,
                bp_site,
                particle_site,
                spin,
                ..
            } => ChannelEntry {
                side: Some(side),
                particle: particle_site,
                bp: bp_site,
                spin,
            },
            ChannelLabel::PairBroken => ChannelEntry {
                side: None,
                particle: 0,
                bp: 0,
                spin: None,
            },
        }
    }
}

const BROKEN: u8 = 0;
const INCIDENT: u8 = 1;
const SHIFTED: u8 = 2;

/// Precomputed classification of every basis state.
///
/// Source-side weight is split into incoming and outgoing parts by a
/// discrete Fourier transform of the particle amplitude over the source-side
/// sites, separately for each pair position (and particle spin).
pub struct ChannelMap {
    side: Vec<u8>,
    displacement: Vec<i32>,
    separation: Vec<u32>,
    edge: Vec<bool>,
    groups: Vec<Vec<u32>>,
    plans: HashMap<usize, Arc<dyn Fft<f64>>>,
    incoming_positive: bool,
}

/// Source-side segment: pair site and the particle's spin.
type SegmentKey = (usize, Option<Spin>);

impl ChannelMap {
    /// `bp0` is the initial pair site; `kappa_sign` fixes which Fourier
    /// half carries positive group velocity.
    pub fn from_entries(entries: impl IntoIterator<Item = ChannelEntry>, n_sites: usize, bp0: usize, kappa_sign: f64) -> Self {
        let mut side = Vec::new();
        let mut displacement = Vec::new();
        let mut separation = Vec::new();
        let mut edge = Vec::new();
        let mut grouped: BTreeMap<SegmentKey, Vec<(usize, u32)>> = BTreeMap::new();
        for (i, e) in entries.into_iter().enumerate() {
            let code = match e.side {
                None => BROKEN,
                Some(Side::Incident) => INCIDENT,
                Some(Side::Shifted) => SHIFTED,
            };
            side.push(code);
            displacement.push(bp0 as i32 - e.bp as i32);
            separation.push(e.particle.abs_diff(e.bp) as u32);
            edge.push(code != BROKEN && (e.particle == 0 || e.particle + 1 == n_sites));
            if code == INCIDENT {
                grouped.entry((e.bp, e.spin)).or_default().push((e.particle, i as u32));
            }
        }
        let groups: Vec<Vec<u32>> = grouped
            .into_values()
            .map(|mut g| {
                g.sort_unstable();
                g.into_iter().map(|(_, i)| i).collect()
            })
            .collect();
        let mut planner = FftPlanner::new();
        let plans = groups
            .iter()
            .map(|g| g.len())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .map(|n| (n, planner.plan_fft_forward(n)))
            .collect();
        Self {
            side,
            displacement,
            separation,
            edge,
            groups,
            plans,
            incoming_positive: kappa_sign > 0.0,
        }
    }

    pub fn for_full_model(basis: &SectorBasis, kind: PairKind, bp0: usize, kappa_sign: f64) -> Self {
        let entries = basis.configurations().map(|c| ChannelEntry::from(map_configuration(kind, &c)));
        Self::from_entries(entries, basis.n_sites(), bp0, kappa_sign)
    }

    pub fn for_effective(basis: &EffectiveBasis, bp0: usize, kappa_sign: f64) -> Self {
        let entries = basis.configs().iter().map(|c| ChannelEntry::from(map_effective(basis.kind, c)));
        Self::from_entries(entries, basis.n_sites, bp0, kappa_sign)
    }

    pub fn dim(&self) -> usize {
        self.side.len()
    }

    pub fn analyze(&self, time: f64, psi: &[C64], h: &SparseHermitianOperator) -> ScatteringObservables {
        assert_eq!(psi.len(), self.dim());
        let norm2: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        let (mut source, mut shifted, mut broken) = (0.0, 0.0, 0.0);
        let (mut disp, mut sep, mut edge) = (0.0, 0.0, 0.0);
        for (i, a) in psi.iter().enumerate() {
            let w = a.norm_sqr();
            match self.side[i] {
                BROKEN => broken += w,
                code => {
                    if code == SHIFTED {
                        shifted += w;
                        disp += w * self.displacement[i] as f64;
                    } else {
                        source += w;
                    }
                    sep += w * self.separation[i] as f64;
                    if self.edge[i] {
                        edge += w;
                    }
                }
            }
        }

        let mut incoming = 0.0;
        let mut buf = Vec::new();
        for g in &self.groups {
            let n = g.len();
            buf.clear();
            buf.extend(g.iter().map(|&i| psi[i as usize]));
            self.plans[&n].process(&mut buf);
            for (m, x) in buf.iter().enumerate() {
                let w = x.norm_sqr() / n as f64;
                // q = 2πm/n; q in (0, π) moves right for κ > 0
                let twice = 2 * m;
                let forward = if twice == 0 || twice == n {
                    0.5 * w
                } else if (twice < n) == self.incoming_positive {
                    w
                } else {
                    0.0
                };
                incoming += forward;
            }
        }
        let incoming = incoming.min(source);
        let intact = source + shifted;
        let safe = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
        ScatteringObservables {
            time,
            p_incident: safe(incoming, norm2),
            p_reflected: safe(source - incoming, norm2),
            p_shifted: safe(shifted, norm2),
            p_pair_broken: safe(broken, norm2),
            shift_estimate: safe(disp, shifted),
            norm: norm2.sqrt(),
            energy: h.expectation(psi),
            edge_occupancy: edge,
            separation: safe(sep, intact),
        }
    }
}

/// Builds the classification for `basis` and analyzes `psi` in one call.
pub fn analyze_channels(
    psi: &[C64],
    basis: &SectorBasis,
    kind: PairKind,
    bp0: usize,
    h: &SparseHermitianOperator,
    kappa_sign: f64,
) -> ScatteringObservables {
    ChannelMap::for_full_model(basis, kind, bp0, kappa_sign).analyze(0.0, psi, h)
}
