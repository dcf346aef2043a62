//! Pulse-sequence data model and constructors for every gate family:
//! rectangular pulses, BB-COMP composites (U5a and the seven-pulse
//! arbitrary-angle generalization), zero-area pulses (Walsh-1/Walsh-3),
//! augmented P-ZAPs, PUDDING embeddings and the three energy-selective
//! conditional-gate baselines.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::solver::{self, AugmentingBranch};
use crate::unitary::{propagate_constant, rotation_unitary, RotationSpec, Unitary2};
use crate::{Error, Metric, Result};

const TAU: f64 = 2.0 * PI;

/// U5a composite-π phase backbone.
pub const U5A_PHASES: [f64; 5] = [0.0, 5.0 * PI / 6.0, PI / 3.0, 5.0 * PI / 6.0, 0.0];

/// One piecewise-constant drive segment.
///
/// `carrier_offset` is the detuning of the drive carrier from the reference
/// transition; it is zero for every gate except the strong-regime
/// energy-selective gate, whose carrier sits halfway between the two
/// transitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSegment {
    /// Rabi amplitude Ω ≥ 0 (rad/s).
    pub amplitude: f64,
    /// Drive phase φ, stored in [0, 2π).
    pub phase: f64,
    /// Duration (s), ≥ 0.
    pub duration: f64,
    /// Carrier offset from the reference transition (rad/s).
    pub carrier_offset: f64,
}

impl PulseSegment {
    pub fn new(amplitude: f64, phase: f64, duration: f64) -> Self {
        assert!(amplitude >= 0.0 && duration >= 0.0, "segment fields must be non-negative");
        Self { amplitude, phase: phase.rem_euclid(TAU), duration, carrier_offset: 0.0 }
    }

    pub fn with_carrier(mut self, carrier_offset: f64) -> Self {
        self.carrier_offset = carrier_offset;
        self
    }

    /// Signed Rabi area, the sign taken from the phase parity
    /// (cos φ, exactly ±1 for φ ∈ {0, π}).
    pub fn signed_area(&self) -> f64 {
        self.amplitude * self.duration * self.phase.cos()
    }
}

/// An ordered list of drive segments with a human-readable label.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    pub segments: Vec<PulseSegment>,
    pub label: String,
}

impl PulseSequence {
    pub fn new(label: impl Into<String>, segments: Vec<PulseSegment>) -> Self {
        Self { segments, label: label.into() }
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Σ ±Ω·T with the sign from the phase parity.
    pub fn signed_area(&self) -> f64 {
        self.segments.iter().map(|s| s.signed_area()).sum()
    }

    /// Σ Ω·T regardless of phase.
    pub fn unsigned_area(&self) -> f64 {
        self.segments.iter().map(|s| s.amplitude * s.duration).sum()
    }

    /// True when the segment list equals its reverse (amplitudes, durations,
    /// carriers exact; phases mod 2π).
    pub fn is_time_symmetric(&self) -> bool {
        let n = self.segments.len();
        (0..n).all(|k| {
            let (a, b) = (&self.segments[k], &self.segments[n - 1 - k]);
            a.amplitude == b.amplitude
                && a.duration == b.duration
                && a.carrier_offset == b.carrier_offset
                && ((a.phase - b.phase).rem_euclid(TAU)).min((b.phase - a.phase).rem_euclid(TAU))
                    < 1e-12
        })
    }

    /// A copy with every segment phase advanced by `phi` — the frame
    /// conjugation `e^{-iφσz/2} U e^{iφσz/2}` realized as a drive-phase
    /// offset.
    pub fn phase_shifted(&self, phi: f64) -> Self {
        Self {
            segments: self
                .segments
                .iter()
                .map(|s| PulseSegment {
                    phase: (s.phase + phi).rem_euclid(TAU),
                    ..*s
                })
                .collect(),
            label: self.label.clone(),
        }
    }

    /// Concatenate another sequence's segments after this one's.
    pub fn extended(mut self, other: &PulseSequence) -> Self {
        self.segments.extend(other.segments.iter().copied());
        self
    }

    /// Propagator on a subspace with the given base detuning, a relative
    /// amplitude scale error ε and a constant extra detuning (quasi-static
    /// noise). Each segment is one exact matrix exponential; segments with a
    /// carrier offset are propagated in their own rotating frame and
    /// transformed back with the frame factors `Z(c·t)` at the segment
    /// boundaries.
    pub fn propagate(&self, base_detuning: f64, eps: f64, extra_detuning: f64) -> Unitary2 {
        let mut u = Unitary2::identity();
        let mut t = 0.0;
        for seg in &self.segments {
            let delta = base_detuning + extra_detuning - seg.carrier_offset;
            let step =
                propagate_constant(seg.amplitude * (1.0 + eps), seg.phase, seg.duration, delta);
            let step = if seg.carrier_offset != 0.0 {
                Unitary2::z_rotation(seg.carrier_offset * (t + seg.duration))
                    * step
                    * Unitary2::z_rotation(-seg.carrier_offset * t)
            } else {
                step
            };
            u = step * u;
            t += seg.duration;
        }
        u
    }
}

/// The two target propagators defining an energy-selective conditional
/// gate: one on the subspace resonant with the drive reference, one on the
/// subspace shifted by Δ.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalGateSpec {
    /// Conditional frequency shift Δ > 0 (rad/s).
    pub delta: f64,
    /// Target on the resonant subspace.
    pub resonant_target: Unitary2,
    /// Target on the Δ-detuned subspace.
    pub detuned_target: Unitary2,
}

impl ConditionalGateSpec {
    pub fn new(delta: f64, resonant_target: Unitary2, detuned_target: Unitary2) -> Self {
        assert!(delta > 0.0, "conditional shift must be positive");
        Self { delta, resonant_target, detuned_target }
    }
}

/// Single rectangular pulse realizing a rotation by `angle` about the
/// in-plane axis `phase`. A negative angle is folded into a π phase flip.
pub fn rect_gate(angle: f64, phase: f64, rabi: f64) -> PulseSequence {
    assert!(rabi > 0.0);
    let (angle, phase) = if angle < 0.0 { (-angle, phase + PI) } else { (angle, phase) };
    PulseSequence::new("rect", vec![PulseSegment::new(rabi, phase, angle / rabi)])
}

/// Five-π composite with the U5a phase set; both first-order error
/// derivatives of the gate error vanish. Total duration 5π/Ω.
pub fn u5a_pi(rabi: f64) -> PulseSequence {
    assert!(rabi > 0.0);
    PulseSequence::new(
        "u5a",
        U5A_PHASES.iter().map(|&p| PulseSegment::new(rabi, p, PI / rabi)).collect(),
    )
}

/// Arbitrary-angle composite: five π pulses sandwiched between two
/// (π−α)/2 pulses, palindromic phases `{0, φ1, φ2, φ3, φ2, φ1, 0}` from
/// [`solver::seven_pulse_params`]. First-order insensitive to both
/// amplitude and detuning errors for 0 < α ≤ π.
pub fn seven_pulse(alpha: f64, rabi: f64) -> Result<PulseSequence> {
    assert!(rabi > 0.0);
    if !(alpha > 0.0 && alpha <= PI) {
        return Err(Error::Domain(format!("seven_pulse requires 0 < alpha <= pi, got {alpha}")));
    }
    let p = solver::seven_pulse_params(alpha)?;
    let phases = [0.0, p.phi1, p.phi2, p.phi3, p.phi2, p.phi1, 0.0];
    let angles = [p.beta, PI, PI, PI, PI, PI, p.beta];
    Ok(PulseSequence::new(
        "seven",
        phases
            .iter()
            .zip(angles)
            .map(|(&ph, a)| PulseSegment::new(rabi, ph, a / rabi))
            .collect(),
    ))
}

/// Walsh-1 zero-area pulse: two segments of equal amplitude Δ and duration
/// π/(√2Δ) with opposite phase. Identity on resonance to all orders in
/// amplitude error; a net π rotation on the Δ-detuned subspace.
pub fn walsh1_zap(delta: f64) -> PulseSequence {
    assert!(delta > 0.0);
    let t = PI / (2.0f64.sqrt() * delta);
    PulseSequence::new(
        "walsh1",
        vec![PulseSegment::new(delta, 0.0, t), PulseSegment::new(delta, PI, t)],
    )
}

/// Symmetric (ABBA) zero-area pulse rotating the detuned subspace by
/// `theta`. Segment amplitude and generalized angle come from
/// [`solver::walsh3_params`].
pub fn walsh3_zap(delta: f64, theta: f64) -> Result<PulseSequence> {
    assert!(delta > 0.0);
    let p = solver::walsh3_params(theta)?;
    let omega = p.omega_over_delta * delta;
    let t = p.alpha_tilde / omega.hypot(delta);
    let a = PulseSegment::new(omega, 0.0, t);
    let b = PulseSegment::new(omega, PI, t);
    Ok(PulseSequence::new("walsh3", vec![a, b, b, a]))
}

/// Protected zero-area pulse ACBDDBCA: the Walsh-3 (θ=π) core augmented
/// with 2π pulses C/D from [`solver::solve_augmenting`], cancelling the
/// remaining first-order σz detuning response on the resonant subspace.
pub fn pzap(delta: f64, branch: AugmentingBranch) -> Result<PulseSequence> {
    assert!(delta > 0.0);
    let w3 = solver::walsh3_params(PI)?;
    let sol = solver::solve_augmenting(branch)?;
    let (wa, wc) = (w3.omega_over_delta * delta, sol.omega_ratio * delta);
    let ta = w3.rabi_area / wa;
    let tc = sol.rabi_area / wc;
    // C carries the sign required by the branch (relative to A's positive
    // sign); D is always C's opposite so the pair area cancels.
    let (c_phase, d_phase) = if sol.c_sign_positive { (0.0, PI) } else { (PI, 0.0) };
    let a = PulseSegment::new(wa, 0.0, ta);
    let b = PulseSegment::new(wa, PI, ta);
    let c = PulseSegment::new(wc, c_phase, tc);
    let d = PulseSegment::new(wc, d_phase, tc);
    Ok(PulseSequence::new("pzap", vec![a, c, b, d, d, b, c, a]))
}

/// PUDDING: one P-ZAP per backbone phase, the k-th with every segment phase
/// advanced by φ_k. The default U5a backbone gives 40 segments.
pub fn pudding(delta: f64, backbone: &[f64]) -> Result<PulseSequence> {
    let core = pzap(delta, AugmentingBranch::Condition1)?;
    let mut segments = Vec::with_capacity(core.segments.len() * backbone.len());
    for &phi in backbone {
        segments.extend(core.phase_shifted(phi).segments);
    }
    Ok(PulseSequence::new("pudding", segments))
}

/// Weak-interaction baseline: a plain π pulse with Ω ≪ Δ driven on the
/// action transition, leaving a residual |Ω/Δ| on the spectator subspace.
pub fn escong_weak(_delta: f64, rabi: f64) -> PulseSequence {
    assert!(rabi > 0.0);
    let mut seq = rect_gate(PI, 0.0, rabi);
    seq.label = "escong-weak".into();
    seq
}

/// Strong-interaction baseline: two π/2 pulses at a carrier halfway between
/// the transitions, phase-shifted by π/2 and separated by an idle gap of
/// π/Δ; the differential phase flips the shifted subspace. Residual O(Δ/Ω).
pub fn escong_strong(delta: f64, rabi: f64) -> PulseSequence {
    assert!(delta > 0.0 && rabi > 0.0);
    let tp = PI / (2.0 * rabi);
    let c = delta / 2.0;
    PulseSequence::new(
        "escong-strong",
        vec![
            PulseSegment::new(rabi, 0.0, tp).with_carrier(c),
            PulseSegment::new(0.0, 0.0, PI / delta).with_carrier(c),
            PulseSegment::new(rabi, PI / 2.0, tp).with_carrier(c),
        ],
    )
}

/// Exact π–2π conditional gate: one pulse with Ω = Δ/√3 and T = √3π/Δ. The
/// driven transition rotates by π while the Δ-shifted transition completes
/// a 2π rotation (propagator −I).
pub fn pi_2pi_gate(delta: f64) -> PulseSequence {
    assert!(delta > 0.0);
    PulseSequence::new(
        "pi-2pi",
        vec![PulseSegment::new(delta / 3.0f64.sqrt(), 0.0, 3.0f64.sqrt() * PI / delta)],
    )
}

/// Named conditional gates with their construction-exact targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Walsh1,
    Walsh3,
    Pzap,
    Pudding,
    Pi2Pi,
    EscongWeak,
    EscongStrong,
}

impl GateKind {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "walsh1" => Self::Walsh1,
            "walsh3" => Self::Walsh3,
            "pzap" => Self::Pzap,
            "pudding" => Self::Pudding,
            "pi2pi" | "pi-2pi" => Self::Pi2Pi,
            "escong-weak" => Self::EscongWeak,
            "escong-strong" => Self::EscongStrong,
            other => return Err(Error::InvalidConfig(format!("unknown gate '{other}'"))),
        })
    }
}

/// Build a named conditional gate and its [`ConditionalGateSpec`]. `rabi`
/// feeds only the weak/strong baselines (their drive strength is a free
/// parameter); `theta` feeds walsh3.
pub fn conditional_gate(
    kind: GateKind,
    delta: f64,
    rabi: f64,
    theta: f64,
) -> Result<(PulseSequence, ConditionalGateSpec)> {
    let id = Unitary2::identity();
    let minus = |u: Unitary2| u.scaled(C64::new(-1.0, 0.0));
    match kind {
        GateKind::Walsh1 => {
            // Detuned-subspace propagator is exactly -iσy = R(π, φ=π/2).
            let det = rotation_unitary(RotationSpec::new(PI, PI / 2.0, 0.0));
            Ok((walsh1_zap(delta), ConditionalGateSpec::new(delta, id, det)))
        }
        GateKind::Walsh3 => {
            // Net detuned rotation is -R(θ, φ=0) (global sign from the
            // symmetric construction).
            let det = minus(rotation_unitary(RotationSpec::new(theta, 0.0, 0.0)));
            Ok((walsh3_zap(delta, theta)?, ConditionalGateSpec::new(delta, id, det)))
        }
        GateKind::Pzap => {
            // The 2π augmenting pulses contribute (-I)^4; the detuned action
            // is the walsh3(π) core's: -R(π, 0) = iσx.
            let det = minus(rotation_unitary(RotationSpec::new(PI, 0.0, 0.0)));
            Ok((
                pzap(delta, AugmentingBranch::Condition1)?,
                ConditionalGateSpec::new(delta, id, det),
            ))
        }
        GateKind::Pudding => {
            let seq = pudding(delta, &U5A_PHASES)?;
            // Product of the frame-conjugated P-ZAP actions, composed from
            // the per-block analytic targets (not from propagation).
            let block = minus(rotation_unitary(RotationSpec::new(PI, 0.0, 0.0)));
            let mut det = Unitary2::identity();
            for &phi in U5A_PHASES.iter() {
                det = Unitary2::z_rotation(phi) * block * Unitary2::z_rotation(-phi) * det;
            }
            Ok((seq, ConditionalGateSpec::new(delta, id, det)))
        }
        GateKind::Pi2Pi => {
            let res = rotation_unitary(RotationSpec::new(PI, 0.0, 0.0));
            Ok((pi_2pi_gate(delta), ConditionalGateSpec::new(delta, res, minus(id))))
        }
        GateKind::EscongWeak => {
            let res = rotation_unitary(RotationSpec::new(PI, 0.0, 0.0));
            Ok((escong_weak(delta, rabi), ConditionalGateSpec::new(delta, res, id)))
        }
        GateKind::EscongStrong => {
            let seq = escong_strong(delta, rabi);
            let t_tot = seq.total_duration();
            let gap = PI / delta;
            let frame = Unitary2::z_rotation(delta / 2.0 * t_tot);
            let r1 = rotation_unitary(RotationSpec::new(PI / 2.0, 0.0, 0.0));
            let r2 = rotation_unitary(RotationSpec::new(PI / 2.0, PI / 2.0, 0.0));
            let res = frame * r2 * Unitary2::z_rotation(-delta / 2.0 * gap) * r1;
            let det = frame * r2 * Unitary2::z_rotation(delta / 2.0 * gap) * r1;
            Ok((seq, ConditionalGateSpec::new(delta, res, det)))
        }
    }
}

/// Evaluate a conditional gate on both subspaces: once at detuning η·Δ with
/// amplitude scale 1+ε (resonant subspace with its detuning error) and once
/// at Δ(1+η) (detuned subspace). Returns (EPG vs resonant target, EPG vs
/// detuned target) under the chosen metric.
pub fn evaluate_conditional(
    seq: &PulseSequence,
    spec: &ConditionalGateSpec,
    eps: f64,
    eta: f64,
    metric: Metric,
) -> (f64, f64) {
    let shift = eta * spec.delta;
    let res = seq.propagate(0.0, eps, shift);
    let det = seq.propagate(spec.delta, eps, shift);
    (metric.epg(&res, &spec.resonant_target), metric.epg(&det, &spec.detuned_target))
}
