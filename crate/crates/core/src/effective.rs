//! Effective one-pair + one-particle Hamiltonians and their reduction to a
//! single particle on a chain with an embedded impurity.

use std::collections::HashMap;

use log::warn;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{Configuration, ModelParams, SectorBasis, SparseHermitianOperator, Spin};

/// The three bound-pair species.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairKind {
    /// Doubly occupied site of the extended Bose-Hubbard chain, bound by `U`.
    OnsiteBose,
    /// Two bosons on neighboring sites, bound by `V`.
    #[serde(rename = "nn-bose")]
    NNBose,
    /// Spin singlet on one site of the Fermi-Hubbard chain.
    FermiSinglet,
}

impl PairKind {
    /// Lattice displacement of the pair when the particle is transmitted.
    pub fn shift_distance(self) -> usize {
        match self {
            PairKind::OnsiteBose | PairKind::FermiSinglet => 1,
            PairKind::NNBose => 2,
        }
    }

    /// Number of sites covered by the pair.
    pub fn footprint(self) -> usize {
        match self {
            PairKind::NNBose => 2,
            _ => 1,
        }
    }
}

/// Single particle on a uniform chain (hopping `lead_hopping`) with a finite
/// device window of custom potentials and bonds.
///
/// Chain coordinates: left lead `l < 0`, device `0..n`, right lead `l >= n`.
/// Both contacts use `lead_hopping`. `device_hoppings[j]` is the bond between
/// device sites `j` and `j + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImpurityChain {
    pub lead_hopping: f64,
    pub device_potentials: Vec<f64>,
    pub device_hoppings: Vec<f64>,
    pub shift_distance: usize,
}

impl ImpurityChain {
    pub fn uniform(kappa: f64, shift_distance: usize) -> Self {
        Self {
            lead_hopping: -kappa,
            device_potentials: Vec::new(),
            device_hoppings: Vec::new(),
            shift_distance,
        }
    }

    pub fn device_len(&self) -> usize {
        self.device_potentials.len()
    }

    pub fn is_uniform(&self) -> bool {
        self.device_potentials.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lead_hopping.is_finite() && self.lead_hopping != 0.0) {
            return Err(invalid("lead_hopping", "must be finite and nonzero"));
        }
        if self.device_hoppings.len() + 1 != self.device_potentials.len().max(1) {
            return Err(invalid(
                "device_hoppings",
                "need exactly one bond between consecutive device sites",
            ));
        }
        Ok(())
    }

    /// First chain site counted on the transmitted (shifted) side.
    pub fn channel_split(&self) -> usize {
        self.device_len().div_ceil(2)
    }

    /// Finite realization with `n_left` lead sites, the device, and `n_right`
    /// lead sites, indexed from the leftmost lead site.
    pub fn finite_hamiltonian(&self, n_left: usize, n_right: usize) -> Result<SparseHermitianOperator> {
        self.validate()?;
        let n = self.device_len();
        let dim = n_left + n + n_right;
        let mut entries = Vec::with_capacity(2 * dim);
        for (j, &e) in self.device_potentials.iter().enumerate() {
            entries.push((n_left + j, n_left + j, e));
        }
        for i in 0..dim.saturating_sub(1) {
            let bond = if i >= n_left && i + 1 < n_left + n {
                self.device_hoppings[i - n_left]
            } else {
                self.lead_hopping
            };
            entries.push((i, i + 1, bond));
        }
        SparseHermitianOperator::from_real_upper(dim, entries)
    }
}

/// Drops every `κ²/U`, `κ²/V`, `κ²/(V-U)` term and keeps hopping, swap and
/// (for on-site bosons) the `2V` contact potential.
pub fn reduce_to_impurity_chain(params: &ModelParams, kind: PairKind) -> ImpurityChain {
    let kappa = params.kappa;
    match kind {
        PairKind::OnsiteBose => ImpurityChain {
            lead_hopping: -kappa,
            device_potentials: vec![2.0 * params.v, 2.0 * params.v],
            device_hoppings: vec![-2.0 * kappa],
            shift_distance: 1,
        },
        PairKind::NNBose => ImpurityChain::uniform(kappa, 2),
        PairKind::FermiSinglet => ImpurityChain::uniform(kappa, 1),
    }
}

/// One bound pair plus one particle in the effective (hardcore) description.
///
/// `bp` is the pair site (left site for nearest-neighbor pairs).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EffectiveConfig {
    pub bp: u16,
    pub particle: u16,
    pub spin: Option<Spin>,
}

#[derive(Clone, Debug)]
pub struct EffectiveBasis {
    pub kind: PairKind,
    pub n_sites: usize,
    configs: Vec<EffectiveConfig>,
    index: HashMap<EffectiveConfig, usize>,
}

impl EffectiveBasis {
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn config(&self, i: usize) -> EffectiveConfig {
        self.configs[i]
    }

    pub fn configs(&self) -> &[EffectiveConfig] {
        &self.configs
    }

    pub fn index_of(&self, c: &EffectiveConfig) -> Option<usize> {
        self.index.get(c).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EffectiveOrder {
    /// Every term of the effective Hamiltonian, including `κ²`-scale ones.
    Full,
    /// Hopping and swap (plus the `2V` contact term for on-site bosons).
    Leading,
}

/// Effective Hamiltonian on an `n_sites` chain. `operator` excludes the
/// pair's constant energy, kept separately in `constant_offset`.
#[derive(Clone, Debug)]
pub struct EffectiveSectorHamiltonian {
    pub kind: PairKind,
    pub order: EffectiveOrder,
    pub basis: EffectiveBasis,
    pub operator: SparseHermitianOperator,
    pub constant_offset: f64,
}

/// Sites the single particle may not occupy when the pair sits at `bp`.
fn blocked_sites(params: &ModelParams, kind: PairKind, bp: usize) -> Option<Vec<usize>> {
    let at = |o: isize| params.shifted_site(bp, o);
    match kind {
        PairKind::OnsiteBose | PairKind::FermiSinglet => Some(vec![bp]),
        PairKind::NNBose => {
            // the partner site must exist; the particle also avoids both
            // neighbors of the dimer (those states carry an extra V)
            let partner = at(1)?;
            let mut v = vec![bp, partner];
            v.extend(at(-1));
            v.extend(at(2));
            Some(v)
        }
    }
}

fn enumerate_effective(params: &ModelParams, kind: PairKind, n_sites: usize) -> EffectiveBasis {
    let spins: Vec<Option<Spin>> = match kind {
        PairKind::FermiSinglet => vec![Some(Spin::Up), Some(Spin::Down)],
        _ => vec![None],
    };
    let mut configs = Vec::new();
    for bp in 0..n_sites {
        let Some(blocked) = blocked_sites(params, kind, bp) else {
            continue;
        };
        for particle in (0..n_sites).filter(|s| !blocked.contains(s)) {
            for &spin in &spins {
                configs.push(EffectiveConfig {
                    bp: bp as u16,
                    particle: particle as u16,
                    spin,
                });
            }
        }
    }
    configs.sort();
    let index = configs.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    EffectiveBasis {
        kind,
        n_sites,
        configs,
        index,
    }
}

struct Couplings {
    swap: f64,
    pair_hop: f64,
    contact: f64,
    offset: f64,
}

fn couplings(params: &ModelParams, kind: PairKind, order: EffectiveOrder) -> Result<Couplings> {
    let (k, u, v) = (params.kappa, params.u, params.v);
    let k2 = k * k;
    let full = order == EffectiveOrder::Full;
    let c = match kind {
        PairKind::OnsiteBose => {
            if u == 0.0 {
                return Err(invalid("u", "on-site pair needs U != 0"));
            }
            if u.abs() < 10.0 * k.abs() {
                warn!("on-site effective model used outside |U| >> κ (U/κ = {})", u / k);
            }
            Couplings {
                swap: -2.0 * k,
                pair_hop: if full { 2.0 * k2 / u } else { 0.0 },
                contact: if full { 2.0 * v - 7.0 * k2 / (2.0 * u) } else { 2.0 * v },
                offset: u + 4.0 * k2 / u,
            }
        }
        PairKind::NNBose => {
            if v == 0.0 || v == u {
                return Err(invalid("v", "nearest-neighbor pair needs V != 0 and V != U"));
            }
            if v.abs() < 10.0 * k.abs() || (v - u).abs() < 10.0 * k.abs() {
                warn!("nearest-neighbor effective model used outside |V|, |V-U| >> κ");
            }
            Couplings {
                swap: -k,
                pair_hop: if full { k2 / v + 2.0 * k2 / (v - u) } else { 0.0 },
                contact: if full { -2.0 * k2 / v } else { 0.0 },
                offset: v + 2.0 * k2 / v + 4.0 * k2 / (v - u),
            }
        }
        PairKind::FermiSinglet => {
            if u == 0.0 {
                return Err(invalid("u", "singlet pair needs U != 0"));
            }
            if u.abs() < 10.0 * k.abs() {
                warn!("singlet effective model used outside |U| >> κ (U/κ = {})", u / k);
            }
            Couplings {
                swap: -k,
                pair_hop: if full { 2.0 * k2 / u } else { 0.0 },
                contact: if full { -2.0 * k2 / u } else { 0.0 },
                offset: u + 4.0 * k2 / u,
            }
        }
    };
    Ok(c)
}

/// Effective Hamiltonian with every term (on-site bosons: hardcore `ã`, `b̃`
/// with swap `-2κ`; nearest-neighbor pairs: three-site swap `-κ`; singlets:
/// projected fermion with swap `-κ`).
pub fn build_effective_sector_hamiltonian(
    params: &ModelParams,
    kind: PairKind,
    n_sites: usize,
) -> Result<EffectiveSectorHamiltonian> {
    build_effective(params, kind, n_sites, EffectiveOrder::Full)
}

/// Hopping + swap (+ `2V` contact) only: the terms that survive in the impurity chain.
pub fn build_leading_order_hamiltonian(
    params: &ModelParams,
    kind: PairKind,
    n_sites: usize,
) -> Result<EffectiveSectorHamiltonian> {
    build_effective(params, kind, n_sites, EffectiveOrder::Leading)
}

fn build_effective(
    params: &ModelParams,
    kind: PairKind,
    n_sites: usize,
    order: EffectiveOrder,
) -> Result<EffectiveSectorHamiltonian> {
    let params = ModelParams { n_sites, ..*params };
    params.validate()?;
    let c = couplings(&params, kind, order)?;
    let basis = enumerate_effective(&params, kind, n_sites);
    if basis.is_empty() {
        return Err(invalid(
            "n_sites",
            format!("{n_sites} sites cannot host one pair and one particle"),
        ));
    }
    let at = |s: usize, o: isize| params.shifted_site(s, o);
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let push = |from: usize, to: EffectiveConfig, value: f64, entries: &mut Vec<(usize, usize, f64)>| {
        if value == 0.0 {
            return;
        }
        if let Some(j) = basis.index_of(&to) {
            if j > from {
                entries.push((from, j, value));
            }
        }
    };
    for (i, cfg) in basis.configs().iter().enumerate() {
        let (bp, s) = (cfg.bp as usize, cfg.particle as usize);
        let with = |bp: usize, particle: usize| EffectiveConfig {
            bp: bp as u16,
            particle: particle as u16,
            spin: cfg.spin,
        };

        // particle hopping; targets outside the basis are blocked
        for o in [-1, 1] {
            if let Some(t) = at(s, o) {
                push(i, with(bp, t), -params.kappa, &mut entries);
            }
        }
        // pair hopping
        for o in [-1, 1] {
            if let Some(b) = at(bp, o) {
                push(i, with(b, s), c.pair_hop, &mut entries);
            }
        }
        // swap and contact interaction
        let mut contact = false;
        match kind {
            PairKind::OnsiteBose | PairKind::FermiSinglet => {
                for o in [-1, 1] {
                    if at(bp, o) == Some(s) {
                        contact = true;
                        push(i, with(s, bp), c.swap, &mut entries);
                    }
                }
            }
            PairKind::NNBose => {
                // particle at i, pair at i+2 <-> pair at i, particle at i+3
                if at(bp, -2) == Some(s) {
                    if let (Some(nb), Some(ns)) = (at(bp, -2), at(bp, 1)) {
                        push(i, with(nb, ns), c.swap, &mut entries);
                    }
                }
                if at(bp, 3) == Some(s) {
                    if let Some(nb) = at(bp, 2) {
                        push(i, with(nb, bp), c.swap, &mut entries);
                    }
                }
                contact = at(bp, -2) == Some(s) || at(bp, 3) == Some(s);
            }
        }
        let diag = if contact { c.contact } else { 0.0 };
        entries.push((i, i, diag));
    }
    let operator = SparseHermitianOperator::from_real_upper(basis.len(), entries)?;
    Ok(EffectiveSectorHamiltonian {
        kind,
        order,
        basis,
        operator,
        constant_offset: c.offset,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// Particle on the source side of the pair (incoming or reflected).
    Incident,
    /// Pair displaced toward the source, particle beyond it.
    Shifted,
}

/// Classification of a one-pair + one-particle configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelLabel {
    Channel {
        /// Index of the channel basis state relative to the pair position.
        l: i64,
        side: Side,
        bp_site: usize,
        particle_site: usize,
        spin: Option<Spin>,
    },
    PairBroken,
}

fn label(kind: PairKind, bp: usize, s: usize, spin: Option<Spin>) -> ChannelLabel {
    let (bp_i, s_i) = (bp as i64, s as i64);
    let (side, l) = match kind {
        PairKind::OnsiteBose | PairKind::FermiSinglet => {
            if s_i < bp_i {
                (Side::Incident, s_i - bp_i)
            } else {
                (Side::Shifted, s_i - bp_i - 1)
            }
        }
        PairKind::NNBose => {
            if s_i < bp_i {
                (Side::Incident, s_i - bp_i + 2)
            } else {
                (Side::Shifted, s_i - bp_i - 2)
            }
        }
    };
    ChannelLabel::Channel {
        l,
        side,
        bp_site: bp,
        particle_site: s,
        spin,
    }
}

/// Classifies a full-model three-particle configuration.
///
/// On-site kinds need exactly one doubly occupied site plus one single
/// particle; nearest-neighbor pairs need one adjacent pair with the third
/// boson at least two sites away. Everything else is [`ChannelLabel::PairBroken`].
/// `l` follows the channel basis: on-site pairs use `l = s - bp < 0` on the
/// incident side and `l = s - bp - 1 >= 0` on the shifted side;
/// nearest-neighbor pairs use `l = s - bp + 2 <= 0` and `l = s - bp - 2 > 0`.
pub fn map_configuration(kind: PairKind, config: &Configuration) -> ChannelLabel {
    match (kind, config) {
        (PairKind::OnsiteBose, Configuration::Bose { sites }) if sites.len() == 3 => {
            let (a, b, c) = (sites[0] as usize, sites[1] as usize, sites[2] as usize);
            if a == b && b != c {
                label(kind, a, c, None)
            } else if b == c && a != b {
                label(kind, b, a, None)
            } else {
                ChannelLabel::PairBroken
            }
        }
        (PairKind::NNBose, Configuration::Bose { sites }) if sites.len() == 3 => {
            let (a, b, c) = (sites[0] as usize, sites[1] as usize, sites[2] as usize);
            if a == b || b == c {
                ChannelLabel::PairBroken
            } else if b == a + 1 && c >= b + 2 {
                label(kind, a, c, None)
            } else if c == b + 1 && b >= a + 2 {
                label(kind, b, a, None)
            } else {
                ChannelLabel::PairBroken
            }
        }
        (PairKind::FermiSinglet, Configuration::Fermi { up, down }) if up.len() + down.len() == 3 => {
            let (pair_list, single_list, spin) = match (up.len(), down.len()) {
                (2, 1) => (down, up, Spin::Up),
                (1, 2) => (up, down, Spin::Down),
                _ => return ChannelLabel::PairBroken,
            };
            let d = pair_list[0];
            if !single_list.contains(&d) {
                return ChannelLabel::PairBroken;
            }
            let s = *single_list.iter().find(|&&x| x != d).unwrap();
            label(kind, d as usize, s as usize, Some(spin))
        }
        _ => ChannelLabel::PairBroken,
    }
}

/// Channel label of an effective-model configuration.
pub fn map_effective(kind: PairKind, c: &EffectiveConfig) -> ChannelLabel {
    label(kind, c.bp as usize, c.particle as usize, c.spin)
}

/// Full-model configuration of the channel basis state `|l⟩` for a pair that
/// starts at `anchor` (the pair site for `l` on the incident side).
///
/// On-site bosons: `l < 0` is the particle at `anchor + l` with the pair at
/// `anchor`; `l >= 0` is the pair at `anchor - 1` with the particle at
/// `anchor + l`. Nearest-neighbor pairs: `l <= 0` is the particle at
/// `anchor - 2 + l` with the dimer at `(anchor, anchor + 1)`; `l > 0` is the
/// dimer at `(anchor - 2, anchor - 1)` with the particle at `anchor + l`.
/// Singlets follow the on-site rule with a particle of spin `spin`.
pub fn channel_configuration(kind: PairKind, l: i64, anchor: usize, spin: Spin) -> Option<Configuration> {
    let a = anchor as i64;
    let site = |x: i64| u16::try_from(x).ok();
    match kind {
        PairKind::OnsiteBose => {
            let (bp, s) = if l < 0 { (a, a + l) } else { (a - 1, a + l) };
            let mut sites = vec![site(bp)?, site(bp)?, site(s)?];
            sites.sort_unstable();
            Some(Configuration::Bose { sites })
        }
        PairKind::NNBose => {
            let (bp, s) = if l <= 0 { (a, a - 2 + l) } else { (a - 2, a + l) };
            let mut sites = vec![site(bp)?, site(bp + 1)?, site(s)?];
            sites.sort_unstable();
            Some(Configuration::Bose { sites })
        }
        PairKind::FermiSinglet => {
            let (bp, s) = if l < 0 { (a, a + l) } else { (a - 1, a + l) };
            let (bp, s) = (site(bp)?, site(s)?);
            let mut c = Configuration::fermi_vacuum();
            c.create_fermion(bp, Spin::Up);
            c.create_fermion(bp, Spin::Down);
            c.create_fermion(s, spin)?;
            Some(c)
        }
    }
}

/// `⟨l|H|l'⟩` for the given full-model states (real operators only).
pub fn project_onto_states(
    op: &SparseHermitianOperator,
    basis: &SectorBasis,
    states: &[Configuration],
) -> Result<DMatrix<f64>> {
    let idx: Vec<usize> = states
        .iter()
        .map(|c| basis.index_of(c).ok_or(Error::ConfigurationNotInBasis))
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(idx.len(), idx.len(), |a, b| op.get(idx[a], idx[b]).re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_real_space_hamiltonian, enumerate_basis, Boundary, Sector};

    fn eigs(m: DMatrix<f64>) -> Vec<f64> {
        let mut e: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    fn bose(u: f64, v: f64, n: usize) -> ModelParams {
        ModelParams::bose(1.0, u, v, n, Boundary::Open).unwrap()
    }

    #[test]
    fn impurity_chain_reductions() {
        let p = bose(100.0, 0.5, 10);
        let c = reduce_to_impurity_chain(&p, PairKind::OnsiteBose);
        assert_eq!(c.device_potentials, vec![1.0, 1.0]);
        assert_eq!(c.device_hoppings, vec![-2.0]);
        assert_eq!(c.shift_distance, 1);
        let nn = reduce_to_impurity_chain(&bose(0.0, 50.0, 10), PairKind::NNBose);
        assert!(nn.is_uniform());
        assert_eq!(nn.shift_distance, 2);
        let f = reduce_to_impurity_chain(&ModelParams::fermi(1.0, 50.0, 10, Boundary::Open).unwrap(), PairKind::FermiSinglet);
        assert!(f.is_uniform());
        assert_eq!(f.shift_distance, 1);
    }

    #[test]
    fn effective_dimensions_and_swap_elements() {
        let n = 9;
        let h = build_effective_sector_hamiltonian(&bose(20.0, 0.5, n), PairKind::OnsiteBose, n).unwrap();
        assert_eq!(h.basis.len(), n * (n - 1));
        let a = h.basis.index_of(&EffectiveConfig { bp: 4, particle: 3, spin: None }).unwrap();
        let b = h.basis.index_of(&EffectiveConfig { bp: 3, particle: 4, spin: None }).unwrap();
        assert_eq!(h.operator.get(a, b).re, -2.0);
        assert_eq!(h.operator.get(a, a).re, 2.0 * 0.5 - 7.0 / 40.0);
        let hop = h.basis.index_of(&EffectiveConfig { bp: 5, particle: 3, spin: None }).unwrap();
        assert_eq!(h.operator.get(a, hop).re, 2.0 / 20.0);
        assert_eq!(h.constant_offset, 20.0 + 4.0 / 20.0);

        let f = build_effective_sector_hamiltonian(&ModelParams::fermi(1.0, 50.0, n, Boundary::Open).unwrap(), PairKind::FermiSinglet, n).unwrap();
        assert_eq!(f.basis.len(), 2 * n * (n - 1));
        let a = f.basis.index_of(&EffectiveConfig { bp: 4, particle: 3, spin: Some(Spin::Up) }).unwrap();
        let b = f.basis.index_of(&EffectiveConfig { bp: 3, particle: 4, spin: Some(Spin::Up) }).unwrap();
        let c = f.basis.index_of(&EffectiveConfig { bp: 3, particle: 4, spin: Some(Spin::Down) }).unwrap();
        assert_eq!(f.operator.get(a, b).re, -1.0);
        assert_eq!(f.operator.get(a, c).re, 0.0);

        let v = build_effective_sector_hamiltonian(&bose(0.0, 50.0, n), PairKind::NNBose, n).unwrap();
        let a = v.basis.index_of(&EffectiveConfig { bp: 4, particle: 2, spin: None }).unwrap();
        let b = v.basis.index_of(&EffectiveConfig { bp: 2, particle: 5, spin: None }).unwrap();
        assert_eq!(v.operator.get(a, b).re, -1.0);
        assert_eq!(v.operator.get(a, a).re, -2.0 / 50.0);
        assert!(v.basis.index_of(&EffectiveConfig { bp: 4, particle: 3, spin: None }).is_none());
        assert_eq!(v.constant_offset, 50.0 + 2.0 / 50.0 + 4.0 / 50.0);
        for h in [&h, &f, &v] {
            let d = h.operator.to_dense().unwrap();
            assert!((&d - d.adjoint()).iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn too_short_chain_rejected() {
        assert!(build_effective_sector_hamiltonian(&bose(0.0, 50.0, 3), PairKind::NNBose, 3).is_err());
        assert!(build_effective_sector_hamiltonian(&bose(10.0, 0.0, 5), PairKind::OnsiteBose, 1).is_err());
    }

    /// Spectrum of the leading-order effective model on an open chain equals
    /// the union of finite impurity chains, one per pair placement.
    #[test]
    fn leading_order_spectrum_is_impurity_chain_union() {
        for l in [6usize, 11, 30] {
            for (kind, params) in [
                (PairKind::OnsiteBose, bose(30.0, 0.7, l)),
                (PairKind::NNBose, bose(0.0, 40.0, l)),
                (PairKind::FermiSinglet, ModelParams::fermi(1.0, 30.0, l, Boundary::Open).unwrap()),
            ] {
                let h = build_leading_order_hamiltonian(&params, kind, l).unwrap();
                let eff = eigs(h.operator.to_dense_real().unwrap());
                let chain = reduce_to_impurity_chain(&params, kind);
                let mut union = Vec::new();
                let placements: Vec<(usize, usize)> = match kind {
                    PairKind::OnsiteBose => (1..l).map(|b| (b - 1, l - 1 - b)).collect(),
                    PairKind::NNBose => (2..l - 1).map(|b| (b - 1, l - 1 - b)).collect(),
                    PairKind::FermiSinglet => (1..l).flat_map(|b| [(b, l - b), (b, l - b)]).collect(),
                };
                for (left, right) in placements {
                    let m = chain.finite_hamiltonian(left, right).unwrap().to_dense_real().unwrap();
                    union.extend(eigs(m));
                }
                union.sort_by(f64::total_cmp);
                assert_eq!(eff.len(), union.len(), "{kind:?} L={l}");
                for (a, b) in eff.iter().zip(&union) {
                    assert!((a - b).abs() < 1e-12, "{kind:?} L={l}");
                }
            }
        }
    }

    /// The exact Bose-Hubbard Hamiltonian in the |l⟩_u states is the
    /// impurity chain plus the constant U, entry by entry.
    #[test]
    fn full_hamiltonian_in_channel_basis_is_impurity_chain() {
        let n = 16;
        let anchor = 8;
        for v in [0.0, 0.5] {
            let p = bose(12.0, v, n);
            let basis = enumerate_basis(&p, Sector::Bose { n_particles: 3 }).unwrap();
            let h = build_real_space_hamiltonian(&p, &basis).unwrap();
            let ls: Vec<i64> = (-5..5).collect();
            let states: Vec<Configuration> = ls
                .iter()
                .map(|&l| channel_configuration(PairKind::OnsiteBose, l, anchor, Spin::Up).unwrap())
                .collect();
            let m = project_onto_states(&h, &basis, &states).unwrap();
            let chain = reduce_to_impurity_chain(&p, PairKind::OnsiteBose)
                .finite_hamiltonian(4, 4)
                .unwrap()
                .to_dense_real()
                .unwrap();
            let expect = chain + DMatrix::identity(10, 10) * 12.0;
            assert_eq!(m, expect);
        }

        // dimer of the nearest-neighbor pair: uniform chain plus V
        let p = bose(0.0, 30.0, n);
        let basis = enumerate_basis(&p, Sector::Bose { n_particles: 3 }).unwrap();
        let h = build_real_space_hamiltonian(&p, &basis).unwrap();
        let states: Vec<Configuration> = (-4..5)
            .map(|l| channel_configuration(PairKind::NNBose, l, anchor, Spin::Up).unwrap())
            .collect();
        let m = project_onto_states(&h, &basis, &states).unwrap();
        let expect = ImpurityChain::uniform(1.0, 2).finite_hamiltonian(9, 0).unwrap().to_dense_real().unwrap()
            + DMatrix::identity(9, 9) * 30.0;
        assert_eq!(m, expect);
    }

    #[test]
    fn singlet_channel_basis_has_unit_swap() {
        let n = 12;
        let p = ModelParams::fermi(1.0, 20.0, n, Boundary::Open).unwrap();
        let basis = enumerate_basis(&p, Sector::Fermi { n_up: 2, n_down: 1 }).unwrap();
        let h = build_real_space_hamiltonian(&p, &basis).unwrap();
        let states: Vec<Configuration> = (-3..3)
            .map(|l| channel_configuration(PairKind::FermiSinglet, l, 6, Spin::Up).unwrap())
            .collect();
        let m = project_onto_states(&h, &basis, &states).unwrap();
        for i in 0..5 {
            assert_eq!(m[(i, i + 1)].abs(), 1.0);
            assert_eq!(m[(i, i)], 20.0);
        }
    }

    #[test]
    fn configuration_labels() {
        let onsite = |occ: &[u8]| map_configuration(PairKind::OnsiteBose, &Configuration::from_bose_occupations(occ));
        // pair at 3, particle at 1: incident, l = -2
        match onsite(&[0, 1, 0, 2, 0]) {
            ChannelLabel::Channel { l, side, bp_site, .. } => {
                assert_eq!((l, side, bp_site), (-2, Side::Incident, 3))
            }
            _ => panic!(),
        }
        // pair at 2 (one left of 3), particle at 3: shifted, l = 0
        match onsite(&[0, 0, 2, 1, 0]) {
            ChannelLabel::Channel { l, side, .. } => assert_eq!((l, side), (0, Side::Shifted)),
            _ => panic!(),
        }
        assert_eq!(onsite(&[0, 3, 0, 0, 0]), ChannelLabel::PairBroken);
        assert_eq!(onsite(&[1, 1, 1, 0, 0]), ChannelLabel::PairBroken);

        let nn = |occ: &[u8]| map_configuration(PairKind::NNBose, &Configuration::from_bose_occupations(occ));
        // dimer (0,1), particle at l + 2 = 4: shifted side, l = 2
        match nn(&[1, 1, 0, 0, 1, 0]) {
            ChannelLabel::Channel { l, side, .. } => assert_eq!((l, side), (2, Side::Shifted)),
            _ => panic!(),
        }
        // particle at 0, dimer at (2,3): incident, l = 0
        match nn(&[1, 0, 1, 1, 0, 0]) {
            ChannelLabel::Channel { l, side, .. } => assert_eq!((l, side), (0, Side::Incident)),
            _ => panic!(),
        }
        assert_eq!(nn(&[0, 1, 1, 1, 0, 0]), ChannelLabel::PairBroken);
        assert_eq!(nn(&[2, 0, 0, 1, 0, 0]), ChannelLabel::PairBroken);
        assert_eq!(nn(&[1, 0, 1, 0, 1, 0]), ChannelLabel::PairBroken);

        let f = Configuration::Fermi { up: vec![1, 4], down: vec![4] };
        match map_configuration(PairKind::FermiSinglet, &f) {
            ChannelLabel::Channel { side, spin, bp_site, .. } => {
                assert_eq!((side, spin, bp_site), (Side::Incident, Some(Spin::Up), 4))
            }
            _ => panic!(),
        }
        let g = Configuration::Fermi { up: vec![1, 4], down: vec![3] };
        assert_eq!(map_configuration(PairKind::FermiSinglet, &g), ChannelLabel::PairBroken);

        // channel states round-trip through the classifier
        for kind in [PairKind::OnsiteBose, PairKind::NNBose] {
            for l in -4..5 {
                let c = channel_configuration(kind, l, 10, Spin::Up).unwrap();
                match map_configuration(kind, &c) {
                    ChannelLabel::Channel { l: got, .. } => assert_eq!(got, l),
                    _ => panic!(),
                }
            }
        }
    }
}
