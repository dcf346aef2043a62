//! Pulse engineering and simulation for error-protected gates on driven
//! two-level systems.
//!
//! The crate builds the zero-area-pulse family of energy-selective
//! conditional gates (Walsh-1/Walsh-3 ZAPs, augmented P-ZAPs, and PUDDING
//! composites), solves their construction constraints, verifies their
//! error-cancellation properties, and estimates gate errors under
//! quasi-static and dynamical dephasing noise, including a desk-scale
//! randomized-benchmarking simulator.
//!
//! Conventions used throughout:
//!
//! * Rotating-frame Hamiltonian `H = (Ω/2)(cos φ σx + sin φ σy) + (δ/2) σz`,
//!   with Ω the Rabi frequency, φ the drive phase and δ the detuning, all in
//!   angular units (rad/s). A negative Rabi frequency is the same drive with
//!   its phase shifted by π.
//! * A 2π rotation is −I (SU(2) double cover); conditional-gate targets are
//!   recorded with their construction-exact global phase.
//! * The default gate-error metric is the raw Frobenius EPG (root mean
//!   square of entrywise differences); the phase-aligned variant is
//!   available everywhere.

pub mod fit;
pub mod noise;
pub mod project;
pub mod pulse;
pub mod rb;
pub mod solver;
pub mod unitary;

pub use fit::{fit_decay, net_epg, DecayFit, FitForm, ValueWithError};
pub use noise::{
    calibrate, monte_carlo_epg, one_over_f_trajectory, preset, sample_quasistatic,
    t1_survival_factor, MonteCarloResult, NoiseModel, NoiseTrajectory, Preset,
};
pub use pulse::{
    escong_strong, escong_weak, evaluate_conditional, pi_2pi_gate, pudding, pzap, rect_gate,
    seven_pulse, u5a_pi, walsh1_zap, walsh3_zap, ConditionalGateSpec, PulseSegment, PulseSequence,
    U5A_PHASES,
};
pub use rb::{
    clifford_group, compile_clifford, reference_idle_run, rb_run, two_qubit_repeat_run,
    CliffordElement, DecayCurve, GateSet, RbConfig, TwoQubitGate,
};
pub use solver::{
    derivative_null_report, g_of_alpha, h_of_alpha, magnus_check, seven_pulse_params,
    solve_augmenting, AugmentingBranch, AugmentingSolution, DerivativeReport, MagnusCoefficients,
    SevenPulseParams, Walsh3Params,
};
pub use unitary::{
    frobenius_epg, phase_aligned_epg, propagate_constant, rotation_unitary, small_error_epg,
    ErrorPair, RotationSpec, Unitary2,
};

/// Gate-error metric selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum Metric {
    /// Raw Frobenius distance, sensitive to the global phase.
    #[default]
    #[serde(rename = "raw")]
    Raw,
    /// Frobenius distance minimized over a global phase.
    #[serde(rename = "aligned")]
    Aligned,
}

impl Metric {
    /// Evaluate the metric between an achieved and a target propagator.
    pub fn epg(self, actual: &Unitary2, target: &Unitary2) -> f64 {
        match self {
            Metric::Raw => frobenius_epg(actual, target),
            Metric::Aligned => phase_aligned_epg(actual, target),
        }
    }
}

/// Errors produced by solvers, calibration and configuration validation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A root scan failed to bracket a valid solution.
    #[error("solver error: {message}; scan trace: {trace}")]
    Solver { message: String, trace: String },
    /// Noise-model calibration could not bracket the target decay time.
    #[error("calibration error: {0}")]
    Calibration(String),
    /// A noise trajectory does not cover the requested duration.
    #[error("trajectory covers {covered_s} s but the sequence lasts {needed_s} s")]
    TrajectoryTooShort { covered_s: f64, needed_s: f64 },
    /// Decay-curve fitting failed outright (degenerate fits are flagged, not errors).
    #[error("fit error: {0}")]
    Fit(String),
    /// Invalid run configuration.
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Convert an ordinary frequency in Hz to angular units (rad/s).
///
/// Configuration files and CLI flags accept Hz; this is the single
/// conversion point.
pub fn angular_from_hz(f_hz: f64) -> f64 {
    2.0 * std::f64::consts::PI * f_hz
}
