//! Exact wavepacket scattering of a particle off a bound pair.

pub mod channels;
pub mod experiment;
pub mod packet;
pub mod propagate;

pub use channels::{analyze_channels, ChannelEntry, ChannelMap, ScatteringObservables};
pub use experiment::{auto_layout, run_experiment, run_experiment_with, Backend, ExperimentResult, ExperimentSpec, ExperimentSummary, Layout, StopReason};
pub use packet::{prepare_effective_state, prepare_scattering_state, support_radius, BoundPairSpec, Preparation, WavepacketSpec};
pub use propagate::{bessel_j_sequence, lanczos_step, propagate, propagate_with, ChebyshevPropagator, Method, Propagator};
