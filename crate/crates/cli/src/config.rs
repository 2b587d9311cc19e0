//! Strict JSON schema for `scatter` and `compare-effective`.

use std::path::PathBuf;

use coherent_shift::dynamics::{Backend, ExperimentSpec, Layout, Method, Preparation};
use coherent_shift::effective::PairKind;
use coherent_shift::model::Spin;
use coherent_shift::transport::resonance_v;
use serde::Deserialize;

/// Nearest-neighbor coupling: a number (units of κ) or one of the resonance roots at `k0`.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Coupling {
    Value(f64),
    Named(Resonant),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Resonant {
    ResonantPlus,
    ResonantMinus,
}

/// Relative paths resolve against the config file's directory.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub series_csv: Option<PathBuf>,
    pub summary_json: Option<PathBuf>,
}

fn default_kappa() -> f64 {
    1.0
}
fn default_dt() -> f64 {
    0.5
}
fn default_tol() -> f64 {
    1e-9
}
fn default_spin() -> Spin {
    Spin::Up
}

/// Energies `u`, `v` are in units of `kappa`; times in units of `1/kappa`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: PairKind,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    pub u: f64,
    #[serde(default = "zero_coupling")]
    pub v: Coupling,
    pub k0: f64,
    pub sigma: f64,
    #[serde(default = "default_spin")]
    pub incident_spin: Spin,
    #[serde(default)]
    pub preparation: Preparation,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default)]
    pub layout: Option<Layout>,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub max_time: Option<f64>,
    #[serde(default)]
    pub output: Outputs,
}

fn zero_coupling() -> Coupling {
    Coupling::Value(0.0)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// `v` in units of κ.
    pub fn v_reduced(&self) -> f64 {
        match self.v {
            Coupling::Value(v) => v,
            Coupling::Named(r) => {
                let (plus, minus) = resonance_v(1.0, self.k0.abs());
                match r {
                    Resonant::ResonantPlus => plus,
                    Resonant::ResonantMinus => minus,
                }
            }
        }
    }

    pub fn to_spec(&self) -> ExperimentSpec {
        ExperimentSpec {
            kind: self.kind,
            kappa: self.kappa,
            u: self.u * self.kappa,
            v: self.v_reduced() * self.kappa,
            k0: self.k0,
            sigma: self.sigma,
            incident_spin: self.incident_spin,
            preparation: self.preparation,
            backend: self.backend,
            layout: self.layout,
            dt: self.dt / self.kappa.abs(),
            tol: self.tol,
            method: self.method,
            max_time: self.max_time.map(|t| t / self.kappa.abs()),
        }
    }
}
