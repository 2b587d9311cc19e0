//! End-to-end scattering runs on the full model, the effective model, or
//! the equivalent impurity chain.

use log::{debug, info};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::channels::{ChannelEntry, ChannelMap, ScatteringObservables};
use super::packet::{prepare_effective_state, prepare_scattering_state, support_radius, BoundPairSpec, Preparation, WavepacketSpec};
use super::propagate::{check_tol, Method, Propagator};
use crate::effective::{build_effective_sector_hamiltonian, reduce_to_impurity_chain, PairKind, Side};
use crate::error::{invalid, Error, Result};
use crate::model::{build_real_space_hamiltonian, enumerate_basis, Boundary, ModelParams, Sector, SparseHermitianOperator, Spin, Statistics};
use crate::transport::{negf_transmission, packet_averaged_t12};

type C64 = Complex64;

/// Runs stop once the incoming weight falls below this...
pub const INCIDENT_DONE: f64 = 1e-3;
/// ...and the particle sits this many widths away from the pair.
pub const SEPARATION_WIDTHS: f64 = 4.0;
/// Weight on the end sites above which a run is contaminated by the walls.
pub const EDGE_GUARD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Exact three-particle Hamiltonian.
    #[default]
    Full,
    /// Effective one-pair + one-particle Hamiltonian with all its terms.
    Effective,
    /// Single particle on the reduced impurity chain.
    ImpurityChain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layout {
    pub n_sites: usize,
    pub center: usize,
    pub bp_position: usize,
}

/// Smallest open chain that keeps the truncated packet off the walls and the
/// pair, places the pair more than `4σ + 10` sites from the packet center,
/// and leaves room for the transmitted packet to clear the pair by `4σ`
/// with its spreading front still `5σ + 2σ` from the far wall.
pub fn auto_layout(kind: PairKind, sigma: f64) -> Layout {
    let r = support_radius(sigma);
    let four_sigma = (SEPARATION_WIDTHS * sigma).ceil() as usize;
    let clearance = if kind == PairKind::NNBose { 2 } else { 1 };
    let center = r + 3;
    let bp_position = center + (four_sigma + 11).max(r + clearance);
    let spread = (2.0 * sigma).ceil() as usize;
    let n_sites = bp_position + kind.footprint() - 1 + four_sigma + r + spread + 5;
    Layout {
        n_sites,
        center,
        bp_position,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: PairKind,
    pub kappa: f64,
    pub u: f64,
    pub v: f64,
    pub k0: f64,
    pub sigma: f64,
    pub incident_spin: Spin,
    pub preparation: Preparation,
    pub backend: Backend,
    /// `None` selects [`auto_layout`].
    pub layout: Option<Layout>,
    /// Sampling interval; the Chebyshev step is exact to `tol` at any size.
    pub dt: f64,
    pub tol: f64,
    pub method: Method,
    /// Replaces the default cap `4N / (2|κ sin k0|)`.
    pub max_time: Option<f64>,
}

impl ExperimentSpec {
    pub fn new(kind: PairKind, kappa: f64, u: f64, v: f64, k0: f64, sigma: f64) -> Self {
        Self {
            kind,
            kappa,
            u,
            v,
            k0,
            sigma,
            incident_spin: Spin::Up,
            preparation: Preparation::Bare,
            backend: Backend::Full,
            layout: None,
            dt: 0.5,
            tol: 1e-9,
            method: Method::Chebyshev,
            max_time: None,
        }
    }

    pub fn layout(&self) -> Layout {
        self.layout.unwrap_or_else(|| auto_layout(self.kind, self.sigma))
    }

    pub fn params(&self) -> Result<ModelParams> {
        let n = self.layout().n_sites;
        match self.kind {
            PairKind::FermiSinglet => {
                if self.v != 0.0 {
                    return Err(invalid("v", "the singlet model has no nearest-neighbor interaction"));
                }
                ModelParams::fermi(self.kappa, self.u, n, Boundary::Open)
            }
            _ => ModelParams::bose(self.kappa, self.u, self.v, n, Boundary::Open),
        }
    }

    fn wavepacket(&self) -> WavepacketSpec {
        WavepacketSpec {
            k0: self.k0,
            sigma: self.sigma,
            center: self.layout().center,
        }
    }

    fn bound_pair(&self) -> BoundPairSpec {
        BoundPairSpec {
            kind: self.kind,
            position: self.layout().bp_position,
            preparation: self.preparation,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let params = self.params()?;
        let wp = self.wavepacket();
        wp.validate(params.n_sites)?;
        self.bound_pair().validate(&wp, params.n_sites)?;
        if self.kappa * self.k0.sin() <= 0.0 {
            return Err(invalid("k0", "group velocity 2κ sin k0 must point toward the pair"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", "must be positive"));
        }
        check_tol(self.tol)?;
        if let Some(t) = self.max_time {
            if !(t > 0.0 && t.is_finite()) {
                return Err(invalid("max_time", "must be positive"));
            }
        }
        if self.preparation == Preparation::Dressed && self.backend != Backend::Full {
            return Err(Error::InvalidSetup("dressed pairs exist only in the full model".into()));
        }
        Ok(())
    }

    /// Default time cap `4N / (2|κ sin k0|)`.
    pub fn time_cap(&self) -> f64 {
        self.max_time.unwrap_or_else(|| {
            4.0 * self.layout().n_sites as f64 / (2.0 * (self.kappa * self.k0.sin()).abs())
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// Incoming weight exhausted and outgoing packets cleared the pair.
    Separated,
    TimeCap,
    /// Edge guard tripped; the run is invalid.
    EdgeContamination,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub kind: PairKind,
    pub backend: Backend,
    pub layout: Layout,
    pub dimension: usize,
    pub steps: usize,
    pub stop_reason: StopReason,
    #[serde(rename = "final")]
    pub final_observables: ScatteringObservables,
    pub max_norm_drift: f64,
    pub max_energy_drift: f64,
    pub max_edge_occupancy: f64,
    pub valid: bool,
    /// Impurity-chain transmission at the central momentum.
    pub analytic_t12: f64,
    /// The same averaged over the packet's momentum distribution.
    pub packet_averaged_t12: f64,
    pub expected_shift: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub series: Vec<ScatteringObservables>,
    pub summary: ExperimentSummary,
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    run_experiment_with(spec, |_| {})
}

struct System {
    h: SparseHermitianOperator,
    psi: Vec<C64>,
    map: ChannelMap,
}

fn full_system(spec: &ExperimentSpec) -> Result<System> {
    let params = spec.params()?;
    let sector = match (params.statistics, spec.incident_spin) {
        (Statistics::Bose, _) => Sector::Bose { n_particles: 3 },
        (Statistics::FermiSpinHalf, Spin::Up) => Sector::Fermi { n_up: 2, n_down: 1 },
        (Statistics::FermiSpinHalf, Spin::Down) => Sector::Fermi { n_up: 1, n_down: 2 },
    };
    let basis = enumerate_basis(&params, sector)?;
    info!("full model: {} sites, dimension {}", params.n_sites, basis.len());
    let h = build_real_space_hamiltonian(&params, &basis)?;
    let psi = prepare_scattering_state(&params, &basis, &spec.wavepacket(), &spec.bound_pair(), spec.incident_spin)?;
    let map = ChannelMap::for_full_model(&basis, spec.kind, spec.layout().bp_position, spec.kappa.signum());
    Ok(System { h, psi, map })
}

fn effective_system(spec: &ExperimentSpec) -> Result<System> {
    let params = spec.params()?;
    let eff = build_effective_sector_hamiltonian(&params, spec.kind, params.n_sites)?;
    let psi = prepare_effective_state(&eff.basis, &spec.wavepacket(), &spec.bound_pair(), spec.incident_spin, spec.kappa.signum())?;
    let map = ChannelMap::for_effective(&eff.basis, spec.layout().bp_position, spec.kappa.signum());
    Ok(System {
        h: eff.operator,
        psi,
        map,
    })
}

/// The chain runs over the channel states `|l⟩`: chain site `i` holds the
/// particle at lattice site `i` on the source side and at `i + 2(f - 1)`
/// on the shifted side, `f` being the pair footprint.
fn chain_system(spec: &ExperimentSpec) -> Result<System> {
    let params = spec.params()?;
    let layout = spec.layout();
    let chain = reduce_to_impurity_chain(&params, spec.kind);
    let d = layout.bp_position;
    let f = spec.kind.footprint();
    let n_source = d + 1 - f;
    let n_shifted = params.n_sites - d - (f - 1);
    let dev = chain.device_len();
    let split = chain.channel_split();
    let h = chain.finite_hamiltonian(n_source - split, n_shifted - (dev - split))?;
    let total = n_source + n_shifted;
    let shifted_bp = d - chain.shift_distance;
    let entries: Vec<ChannelEntry> = (0..total)
        .map(|i| {
            if i < n_source {
                ChannelEntry {
                    side: Some(Side::Incident),
                    particle: i,
                    bp: d,
                    spin: None,
                }
            } else {
                ChannelEntry {
                    side: Some(Side::Shifted),
                    particle: i + 2 * (f - 1),
                    bp: shifted_bp,
                    spin: None,
                }
            }
        })
        .collect();
    let wp = spec.wavepacket();
    wp.validate(params.n_sites)?;
    spec.bound_pair().validate(&wp, params.n_sites)?;
    let mut psi = vec![C64::new(0.0, 0.0); total];
    for (j, a) in wp.amplitudes(n_source, spec.kappa.signum()) {
        psi[j] = a;
    }
    let map = ChannelMap::from_entries(entries, params.n_sites, d, spec.kappa.signum());
    Ok(System { h, psi, map })
}

/// Runs the experiment, handing every sample (including `t = 0`) to `observer`.
pub fn run_experiment_with(spec: &ExperimentSpec, mut observer: impl FnMut(&ScatteringObservables)) -> Result<ExperimentResult> {
    spec.validate()?;
    let mut sys = match spec.backend {
        Backend::Full => full_system(spec)?,
        Backend::Effective => effective_system(spec)?,
        Backend::ImpurityChain => chain_system(spec)?,
    };
    let params = spec.params()?;
    let chain = reduce_to_impurity_chain(&params, spec.kind);
    let k = spec.k0.abs();
    let analytic_t12 = negf_transmission(&chain, k)?.transmission;
    let packet_t12 = if chain.is_uniform() {
        1.0
    } else {
        packet_averaged_t12(spec.kappa, spec.v, k, spec.sigma)
    };

    let cap = spec.time_cap();
    let mut prop = Propagator::new(&sys.h, spec.method, spec.dt, spec.tol)?;
    let first = sys.map.analyze(0.0, &sys.psi, &sys.h);
    observer(&first);
    let e0 = first.energy;
    let mut series = vec![first];
    let (mut norm_drift, mut energy_drift) = ((first.norm - 1.0).abs(), 0.0f64);
    let mut max_edge = first.edge_occupancy;
    let mut steps = 0;
    let stop_reason = loop {
        if max_edge > EDGE_GUARD {
            break StopReason::EdgeContamination;
        }
        let last = series.last().unwrap();
        if steps > 0 && last.p_incident <= INCIDENT_DONE && last.separation >= SEPARATION_WIDTHS * spec.sigma {
            break StopReason::Separated;
        }
        if last.time >= cap - 1e-9 {
            break StopReason::TimeCap;
        }
        prop.step(&mut sys.psi)?;
        steps += 1;
        let obs = sys.map.analyze(steps as f64 * spec.dt, &sys.psi, &sys.h);
        debug!(
            "t = {:.2}: incident {:.4} reflected {:.4} shifted {:.4} broken {:.2e}",
            obs.time, obs.p_incident, obs.p_reflected, obs.p_shifted, obs.p_pair_broken
        );
        norm_drift = norm_drift.max((obs.norm - 1.0).abs());
        energy_drift = energy_drift.max((obs.energy - e0).abs() / (1.0 + e0.abs()));
        max_edge = max_edge.max(obs.edge_occupancy);
        observer(&obs);
        series.push(obs);
    };
    let final_observables = *series.last().unwrap();
    info!(
        "{:?}/{:?} stopped ({stop_reason:?}) at t = {}: p_shifted = {:.6}",
        spec.kind, spec.backend, final_observables.time, final_observables.p_shifted
    );
    Ok(ExperimentResult {
        summary: ExperimentSummary {
            kind: spec.kind,
            backend: spec.backend,
            layout: spec.layout(),
            dimension: sys.psi.len(),
            steps,
            stop_reason,
            final_observables,
            max_norm_drift: norm_drift,
            max_energy_drift: energy_drift,
            max_edge_occupancy: max_edge,
            valid: stop_reason != StopReason::EdgeContamination,
            analytic_t12,
            packet_averaged_t12: packet_t12,
            expected_shift: chain.shift_distance,
        },
        series,
    })
}
