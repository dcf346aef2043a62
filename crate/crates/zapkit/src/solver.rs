//! Closed-form and numerical solution of the composite-pulse construction
//! constraints, the first-order (Magnus) error functionals of zero-area
//! sequences, and finite-difference verification of derivative nulling.

use std::f64::consts::PI;

use crate::pulse::{ConditionalGateSpec, PulseSequence};
use crate::unitary::{frobenius_epg, Unitary2};
use crate::{Error, Result};

const TAU: f64 = 2.0 * PI;

/// Phase function g(α) = arccos(α/4π − 1/2 − sin(α/2)/4) of the seven-pulse
/// composite. Together with [`h_of_alpha`] it solves the first-order
/// insensitivity conditions of the palindromic β₀ π π π π π β₀ sequence;
/// g(π) = arccos(−1/2) = 2π/3.
pub fn g_of_alpha(alpha: f64) -> Result<f64> {
    arccos_checked(alpha / (4.0 * PI) - 0.5 - (alpha / 2.0).sin() / 4.0, "g")
}

/// Companion phase function h(α) = arccos(α/4π − 1/2 + sin(α/2)/4);
/// h(π) = arccos(0) = π/2.
pub fn h_of_alpha(alpha: f64) -> Result<f64> {
    arccos_checked(alpha / (4.0 * PI) - 0.5 + (alpha / 2.0).sin() / 4.0, "h")
}

fn arccos_checked(x: f64, which: &str) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) || !x.is_finite() {
        return Err(Error::Domain(format!("{which}: arccos argument {x} outside [-1, 1]")));
    }
    Ok(x.acos())
}

/// Seven-pulse composite parameters: end-pulse angle β = (π−α)/2 and the
/// palindromic phase triple {φ1, φ2, φ3} = {g, 2g+h, 2g+2h}, reduced
/// mod 2π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SevenPulseParams {
    pub beta: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
}

pub fn seven_pulse_params(alpha: f64) -> Result<SevenPulseParams> {
    let g = g_of_alpha(alpha)?;
    let h = h_of_alpha(alpha)?;
    Ok(SevenPulseParams {
        beta: (PI - alpha) / 2.0,
        phi1: g.rem_euclid(TAU),
        phi2: (2.0 * g + h).rem_euclid(TAU),
        phi3: (2.0 * g + 2.0 * h).rem_euclid(TAU),
    })
}

/// Symmetric-ZAP (ABBA) parameters for a detuned-subspace rotation by θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Walsh3Params {
    /// Segment amplitude over the conditional shift, Ω/Δ = sin(θ/4).
    pub omega_over_delta: f64,
    /// Generalized rotation angle of one segment on the detuned subspace,
    /// α̃ = arccos(−sin²(θ/4)).
    pub alpha_tilde: f64,
    /// Resonant-subspace Rabi area of one segment, α̃·sin β with
    /// tan β = Ω/Δ.
    pub rabi_area: f64,
}

pub fn walsh3_params(theta: f64) -> Result<Walsh3Params> {
    if !(theta > 0.0 && theta <= TAU) {
        return Err(Error::Domain(format!("walsh3 requires 0 < theta <= 2pi, got {theta}")));
    }
    let s = (theta / 4.0).sin();
    let omega_over_delta = s;
    let alpha_tilde = (-s * s).acos();
    let sin_beta = omega_over_delta / (1.0 + omega_over_delta * omega_over_delta).sqrt();
    let cos2_beta = 1.0 - sin_beta * sin_beta;
    // Design identity: cos α̃ cos²β + sin²β = 0.
    let residual = alpha_tilde.cos() * cos2_beta + sin_beta * sin_beta;
    debug_assert!(residual.abs() < 1e-12, "walsh3 identity residual {residual}");
    Ok(Walsh3Params { omega_over_delta, alpha_tilde, rabi_area: alpha_tilde * sin_beta })
}

/// The two published cancellation conditions for the augmenting 2π pulses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AugmentingBranch {
    /// Tangent relation |Ω_C| tan(α_A/2) = −|Ω_A| tan(α_C/2).
    Condition1,
    /// Cosine relation cos((α_A + p·α_C)/2) = 0 with p = ±1 the relative
    /// sign of Ω_C and Ω_A.
    Condition2 { p: i8 },
}

impl AugmentingBranch {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "condition-1" | "cond1" => Self::Condition1,
            "condition-2" | "condition-2+" | "cond2+" => Self::Condition2 { p: 1 },
            "condition-2-" | "cond2-" => Self::Condition2 { p: -1 },
            other => return Err(Error::InvalidConfig(format!("unknown branch '{other}'"))),
        })
    }

    pub fn name(&self) -> String {
        match self {
            Self::Condition1 => "condition-1".into(),
            Self::Condition2 { p } => format!("condition-2({})", if *p > 0 { "+1" } else { "-1" }),
        }
    }
}

/// Solved augmenting-pulse parameters (all in units of the conditional
/// shift Δ).
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentingSolution {
    pub branch: AugmentingBranch,
    /// |Ω_C| / Δ.
    pub omega_ratio: f64,
    /// Resonant-subspace Rabi area α_C = |Ω_C|·T_C (rad).
    pub rabi_area: f64,
    /// T_C in units of 1/Δ.
    pub duration_c: f64,
    /// Whether Ω_C shares A's (positive) sign; condition-2 with p = −1
    /// requires the opposite sign.
    pub c_sign_positive: bool,
    /// Defining-constraint residual at the root.
    pub condition_residual: f64,
    /// 2π-on-detuned constraint residual √(x²+1)·Δ·T_C − 2π.
    pub two_pi_residual: f64,
    /// Tangent-relation residual |Ω_C|tan(α_A/2) + |Ω_A|tan(α_C/2)
    /// (zero for condition-1 roots; O(1) otherwise).
    pub tangent_cross_check: f64,
    /// Residual of the *other* condition at this root (the two conditions
    /// are mutually exclusive: this stays O(1)).
    pub other_condition_residual: f64,
    /// Full P-ZAP duration 4(α_A/|Ω_A| + α_C/|Ω_C|) in units of 2π/Δ.
    pub pzap_duration: f64,
    /// Every bracketed root found in the scan (ω ratios), smallest duration
    /// first.
    pub all_roots: Vec<f64>,
}

/// Rabi area of a 2π-on-detuned pulse as a function of x = |Ω_C|/Δ:
/// α_C = 2πx/√(x²+1).
fn alpha_c_of(x: f64) -> f64 {
    TAU * x / x.hypot(1.0)
}

fn walsh3_pi_core() -> (f64, f64) {
    // α_A = 2π/(3√3), |Ω_A|/Δ = 1/√2 for the θ = π symmetric ZAP.
    (TAU / (3.0 * 3.0f64.sqrt()), 1.0 / 2.0f64.sqrt())
}

/// Solve for the augmenting-pulse amplitude on the chosen branch by a
/// uniform 1000-point scan of x = |Ω_C|/Δ over (0, 10] followed by
/// bisection to 1e-12. Tangent poles are rejected by the residual check;
/// with several roots the smallest-duration one is returned (the rest in
/// `all_roots`).
pub fn solve_augmenting(branch: AugmentingBranch) -> Result<AugmentingSolution> {
    let (alpha_a, omega_a) = walsh3_pi_core();
    let f = |x: f64| -> f64 {
        match branch {
            AugmentingBranch::Condition1 => {
                x * (alpha_a / 2.0).tan() + omega_a * (alpha_c_of(x) / 2.0).tan()
            }
            AugmentingBranch::Condition2 { p } => {
                ((alpha_a + f64::from(p) * alpha_c_of(x)) / 2.0).cos()
            }
        }
    };

    const N: usize = 1000;
    let grid: Vec<f64> = (1..=N).map(|k| 10.0 * k as f64 / N as f64).collect();
    let mut roots = Vec::new();
    for w in grid.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if f(x0) == 0.0 {
            roots.push(x0);
            continue;
        }
        if f(x0) * f(x1) < 0.0 {
            let (mut lo, mut hi) = (x0, x1);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if f(lo) * f(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let x = 0.5 * (lo + hi);
            // A sign change across a tangent pole bisects to the pole, where
            // the residual stays O(1).
            if f(x).abs() < 1e-9 {
                roots.push(x);
            }
        }
    }
    if roots.is_empty() {
        let trace: Vec<String> =
            grid.iter().step_by(100).map(|&x| format!("f({x:.1})={:+.3e}", f(x))).collect();
        return Err(Error::Solver {
            message: format!("no root of {} in (0, 10]", branch.name()),
            trace: trace.join(", "),
        });
    }
    // Duration 4(α_A/|Ω_A| + α_C(x)/x) decreases with x; smallest duration
    // first.
    roots.sort_by(|a, b| {
        let d = |x: f64| alpha_c_of(x) / x;
        d(*a).partial_cmp(&d(*b)).unwrap()
    });

    let x = roots[0];
    let rabi_area = alpha_c_of(x);
    let duration_c = rabi_area / x;
    let tangent = x * (alpha_a / 2.0).tan() + omega_a * (rabi_area / 2.0).tan();
    let (p, other) = match branch {
        AugmentingBranch::Condition1 => {
            // Closest condition-2 residual over p = ±1.
            let o = [1.0f64, -1.0]
                .iter()
                .map(|&p| ((alpha_a + p * rabi_area) / 2.0).cos().abs())
                .fold(f64::INFINITY, f64::min);
            (1i8, o)
        }
        AugmentingBranch::Condition2 { p } => (p, tangent.abs()),
    };
    Ok(AugmentingSolution {
        branch,
        omega_ratio: x,
        rabi_area,
        duration_c,
        c_sign_positive: p >= 0,
        condition_residual: f(x).abs(),
        two_pi_residual: x.hypot(1.0) * duration_c - TAU,
        tangent_cross_check: tangent,
        other_condition_residual: other,
        pzap_duration: 4.0 * (alpha_a / omega_a + rabi_area / x) / TAU,
        all_roots: roots,
    })
}

/// First-order-in-δ error functionals of a resonant, phase-coaxial pulse
/// sequence, evaluated by exact per-segment quadrature in the toggling
/// frame of the drive.
///
/// * `sigma_x`: the signed Rabi area ∫Ω dt (rad) — zero for any ZAP;
/// * `sigma_y`: ∫ sin Θ(t) dt (s) with Θ the accumulated signed angle —
///   zero for time-symmetric ZAPs;
/// * `sigma_z`: ∫ cos Θ(t) dt (s) — zero only when an augmenting condition
///   holds.
///
/// `relative()` normalizes by the unsigned area (σx) or the total duration
/// (σy, σz).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnusCoefficients {
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub sigma_z: f64,
    pub unsigned_area: f64,
    pub duration: f64,
}

impl MagnusCoefficients {
    pub fn relative(&self) -> [f64; 3] {
        [
            self.sigma_x / self.unsigned_area.max(f64::MIN_POSITIVE),
            self.sigma_y / self.duration.max(f64::MIN_POSITIVE),
            self.sigma_z / self.duration.max(f64::MIN_POSITIVE),
        ]
    }
}

/// Evaluate the first-order error functionals of `seq`. Requires a resonant
/// sequence (zero carrier offsets) whose phases are multiples of π (the
/// ZAP family); other sequences have no single toggling axis.
pub fn magnus_check(seq: &PulseSequence) -> Result<MagnusCoefficients> {
    let mut theta = 0.0f64;
    let (mut kx, mut ky, mut kz) = (0.0f64, 0.0f64, 0.0f64);
    for seg in &seq.segments {
        if seg.carrier_offset != 0.0 {
            return Err(Error::Domain("magnus_check requires a resonant sequence".into()));
        }
        let parity = (seg.phase / PI).round();
        if (seg.phase - parity * PI).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "magnus_check requires coaxial phases (multiples of pi), got {}",
                seg.phase
            )));
        }
        let w = seg.amplitude * if parity.rem_euclid(2.0) == 0.0 { 1.0 } else { -1.0 };
        if w == 0.0 {
            kz += theta.cos() * seg.duration;
            ky += theta.sin() * seg.duration;
        } else {
            let theta2 = theta + w * seg.duration;
            kz += (theta2.sin() - theta.sin()) / w;
            ky += (theta.cos() - theta2.cos()) / w;
            kx += w * seg.duration;
            theta = theta2;
        }
    }
    Ok(MagnusCoefficients {
        sigma_x: kx,
        sigma_y: ky,
        sigma_z: kz,
        unsigned_area: seq.unsigned_area(),
        duration: seq.total_duration(),
    })
}

/// Finite-difference first-order detuning response of a resonant sequence:
/// Pauli components of (dU/dδ)·U₀†, for cross-checking [`magnus_check`].
pub fn first_order_response_fd(seq: &PulseSequence, h: f64) -> [f64; 3] {
    let u0 = seq.propagate(0.0, 0.0, 0.0);
    let up = seq.propagate(0.0, 0.0, h);
    let um = seq.propagate(0.0, 0.0, -h);
    let ud = u0.dagger();
    let mut comps = [0.0f64; 3];
    let paulis = [Unitary2::sigma_x(), Unitary2::sigma_y(), Unitary2::sigma_z()];
    for (k, pauli) in paulis.iter().enumerate() {
        let gp = (*pauli * (up * ud)).trace();
        let gm = (*pauli * (um * ud)).trace();
        comps[k] = (gp - gm).im / (2.0 * h);
    }
    comps
}

/// Central-difference derivative report of the gate error with respect to
/// the relative amplitude and detuning errors.
///
/// The EPG has a |·| cusp at an exact operating point, so the report
/// differentiates EPG²: the quadratic coefficient q₂ = (∂EPG/∂ε)² is
/// estimated from second central differences at steps h and h/2 and
/// Richardson-extrapolated, which removes the quartic contamination from
/// second-order error terms (k₂·h ≈ 2e-4 at h = 1e-4 otherwise).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeReport {
    pub step: f64,
    /// |∂EPG/∂ε| at the operating point (Richardson-extrapolated).
    pub deriv_eps: f64,
    /// |∂EPG/∂η| at the operating point.
    pub deriv_eta: f64,
    /// Raw single-step estimates [h, h/2] before extrapolation.
    pub deriv_eps_raw: [f64; 2],
    pub deriv_eta_raw: [f64; 2],
    /// εη coefficient of EPG² from cross differences.
    pub mixed_epg2: f64,
    /// Second-order EPG coefficients (EPG/err² at err = 1e-3), the slope-2
    /// scale left after first-order nulling.
    pub curvature_eps: f64,
    pub curvature_eta: f64,
}

/// Which subspace of a conditional gate to differentiate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subspace {
    Resonant,
    Detuned,
}

/// Derivative report for a conditional gate on the chosen subspace: the
/// detuning error is η·Δ on both subspaces, the amplitude scale 1+ε.
pub fn derivative_null_report(
    seq: &PulseSequence,
    spec: &ConditionalGateSpec,
    subspace: Subspace,
    step: f64,
) -> DerivativeReport {
    let (base, target) = match subspace {
        Subspace::Resonant => (0.0, spec.resonant_target),
        Subspace::Detuned => (spec.delta, spec.detuned_target),
    };
    let epg =
        |eps: f64, eta: f64| frobenius_epg(&seq.propagate(base, eps, eta * spec.delta), &target);
    report_from(epg, step)
}

/// Derivative report for a single-qubit resonant gate; η is relative to the
/// drive amplitude `rabi` (δ = η·Ω).
pub fn derivative_null_report_single(
    seq: &PulseSequence,
    target: &Unitary2,
    rabi: f64,
    step: f64,
) -> DerivativeReport {
    let epg = |eps: f64, eta: f64| frobenius_epg(&seq.propagate(0.0, eps, eta * rabi), target);
    report_from(epg, step)
}

fn report_from(epg: impl Fn(f64, f64) -> f64, h: f64) -> DerivativeReport {
    let e00 = epg(0.0, 0.0).powi(2);
    let q2 = |hh: f64, eps_dir: bool| -> f64 {
        let (p, m) = if eps_dir {
            (epg(hh, 0.0).powi(2), epg(-hh, 0.0).powi(2))
        } else {
            (epg(0.0, hh).powi(2), epg(0.0, -hh).powi(2))
        };
        (p + m - 2.0 * e00) / (2.0 * hh * hh)
    };
    let mut raw = [[0.0f64; 2]; 2];
    let mut deriv = [0.0f64; 2];
    for (d, eps_dir) in [true, false].into_iter().enumerate().map(|(i, b)| (i, b)) {
        let (qh, qh2) = (q2(h, eps_dir), q2(h / 2.0, eps_dir));
        raw[d] = [qh.max(0.0).sqrt(), qh2.max(0.0).sqrt()];
        deriv[d] = ((4.0 * qh2 - qh) / 3.0).max(0.0).sqrt();
    }
    let mixed = (epg(h, h).powi(2) + epg(-h, -h).powi(2)
        - epg(h, -h).powi(2)
        - epg(-h, h).powi(2))
        / (4.0 * h * h);
    let ec = 1e-3;
    DerivativeReport {
        step: h,
        deriv_eps: deriv[0],
        deriv_eta: deriv[1],
        deriv_eps_raw: raw[0],
        deriv_eta_raw: raw[1],
        mixed_epg2: mixed,
        curvature_eps: epg(ec, 0.0) / (ec * ec),
        curvature_eta: epg(0.0, ec) / (ec * ec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{pzap, rect_gate, seven_pulse, u5a_pi, walsh1_zap, walsh3_zap, PulseSegment, PulseSequence};
    use crate::unitary::{rotation_unitary, RotationSpec};

    #[test]
    fn g_h_reference_values() {
        assert!((g_of_alpha(PI).unwrap() - 2.0 * PI / 3.0).abs() < 1e-14);
        assert!((h_of_alpha(PI).unwrap() - PI / 2.0).abs() < 1e-14);
        // α → 0 limit of the corrected forms: both arccos(−1/2).
        assert!((g_of_alpha(0.0).unwrap() - 2.0 * PI / 3.0).abs() < 1e-14);
        assert!((h_of_alpha(0.0).unwrap() - 2.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn seven_params_match_solved_roots() {
        // Machine-precision roots of the nulling conditions (independent
        // numerical solve of the four constraints).
        let p = seven_pulse_params(PI / 2.0).unwrap();
        assert!((p.beta - PI / 4.0).abs() < 1e-14);
        assert!((p.phi1 - 2.155289418).abs() < 1e-8, "phi1 {}", p.phi1);
        assert!((p.phi2 - 6.080920086).abs() < 1e-8, "phi2 {}", p.phi2);
        assert!((p.phi3 - (7.851261336 - TAU)).abs() < 1e-8, "phi3 {}", p.phi3);
        let p = seven_pulse_params(PI).unwrap();
        assert!(p.beta.abs() < 1e-14);
        assert!((p.phi1 - 2.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn walsh3_reference_values() {
        let p = walsh3_params(PI).unwrap();
        assert!((p.omega_over_delta - 1.0 / 2.0f64.sqrt()).abs() < 1e-15);
        assert!((p.alpha_tilde - 2.0 * PI / 3.0).abs() < 1e-14);
        assert!((p.rabi_area - TAU / (3.0 * 3.0f64.sqrt())).abs() < 1e-14);
        // θ → 0 limit: vanishing drive with α̃ → π/2.
        let p = walsh3_params(1e-9).unwrap();
        assert!(p.omega_over_delta < 1e-9 && (p.alpha_tilde - PI / 2.0).abs() < 1e-9);
        assert!(walsh3_params(0.0).is_err());
        assert!(walsh3_params(2.1 * TAU).is_err());
    }

    #[test]
    fn augmenting_condition1_constants() {
        let s = solve_augmenting(AugmentingBranch::Condition1).unwrap();
        assert!((s.omega_ratio - 1.0969).abs() < 1e-3, "ratio {}", s.omega_ratio);
        assert!((s.rabi_area / PI - 1.478).abs() < 1e-3, "area {}", s.rabi_area / PI);
        assert!((s.pzap_duration - 3.784).abs() < 0.002);
        assert!(s.condition_residual < 1e-9);
        assert!(s.two_pi_residual.abs() < 1e-9);
        assert!(s.tangent_cross_check.abs() < 1e-9);
        // Conditions are mutually exclusive.
        assert!(s.other_condition_residual > 0.05);
        assert!(s.c_sign_positive);
    }

    #[test]
    fn augmenting_condition2_roots() {
        let sp = solve_augmenting(AugmentingBranch::Condition2 { p: 1 }).unwrap();
        assert!((sp.omega_ratio - 0.3232155).abs() < 1e-5, "{}", sp.omega_ratio);
        assert!(sp.c_sign_positive);
        let sm = solve_augmenting(AugmentingBranch::Condition2 { p: -1 }).unwrap();
        assert!((sm.omega_ratio - 0.9597823).abs() < 1e-5, "{}", sm.omega_ratio);
        assert!(!sm.c_sign_positive);
        for s in [&sp, &sm] {
            assert!(s.condition_residual < 1e-9);
            assert!(s.two_pi_residual.abs() < 1e-9);
        }
    }

    #[test]
    fn determinism_of_solver() {
        let a = solve_augmenting(AugmentingBranch::Condition1).unwrap();
        let b = solve_augmenting(AugmentingBranch::Condition1).unwrap();
        assert!(a.omega_ratio == b.omega_ratio && a.rabi_area == b.rabi_area);
    }

    #[test]
    fn magnus_functionals() {
        let w1 = walsh1_zap(1.0);
        let m = magnus_check(&w1).unwrap();
        assert!(m.sigma_x.abs() < 1e-12);
        assert!((m.sigma_y - 3.2114).abs() < 1e-3, "Ky {}", m.sigma_y);
        assert!((m.sigma_z - 1.5914).abs() < 1e-3, "Kz {}", m.sigma_z);

        let w3 = walsh3_zap(1.0, PI).unwrap();
        let m = magnus_check(&w3).unwrap();
        assert!(m.sigma_x.abs() < 1e-12 && m.sigma_y.abs() < 1e-12);
        assert!((m.sigma_z - 5.2910).abs() < 1e-3, "Kz {}", m.sigma_z);

        let pz = pzap(1.0, AugmentingBranch::Condition1).unwrap();
        let m = magnus_check(&pz).unwrap();
        let rel = m.relative();
        assert!(rel.iter().all(|c| c.abs() < 1e-9), "pzap rel {:?}", rel);
    }

    #[test]
    fn magnus_matches_finite_differences() {
        for seq in [
            walsh1_zap(1.0),
            walsh3_zap(1.0, PI).unwrap(),
            pzap(1.0, AugmentingBranch::Condition1).unwrap(),
        ] {
            let m = magnus_check(&seq).unwrap();
            let fd = first_order_response_fd(&seq, 1e-7);
            // fd components carry the −δ/2 generator normalization.
            let scale = seq.total_duration();
            assert!((fd[1].abs() - m.sigma_y.abs()).abs() < 0.01 * scale, "{}", seq.label);
            assert!((fd[2].abs() - m.sigma_z.abs()).abs() < 0.01 * scale, "{}", seq.label);
        }
    }

    #[test]
    fn magnus_rejects_non_coaxial() {
        let seq = PulseSequence::new("odd", vec![PulseSegment::new(1.0, 0.3, 1.0)]);
        assert!(magnus_check(&seq).is_err());
    }

    #[test]
    fn derivative_report_simple_and_composite() {
        // Simple π pulse: matrix-level derivatives are (α/2)/√2 for ε and
        // sin(α/2)/√2 for η.
        let seq = rect_gate(PI, 0.0, 1.0);
        let target = rotation_unitary(RotationSpec::new(PI, 0.0, 0.0));
        let r = derivative_null_report_single(&seq, &target, 1.0, 1e-4);
        assert!((r.deriv_eps - PI / (2.0 * 2.0f64.sqrt())).abs() < 1e-4, "{}", r.deriv_eps);
        assert!((r.deriv_eta - 1.0 / 2.0f64.sqrt()).abs() < 1e-4, "{}", r.deriv_eta);

        // U5a nulls both; second-order coefficients stay O(1).
        let seq = u5a_pi(1.0);
        let target = rotation_unitary(RotationSpec::new(PI, 2.0 * PI / 3.0, 0.0));
        let r = derivative_null_report_single(&seq, &target, 1.0, 1e-4);
        assert!(r.deriv_eps < 1e-6 && r.deriv_eta < 1e-6, "{} {}", r.deriv_eps, r.deriv_eta);
        assert!(r.curvature_eps > 1.0 && r.curvature_eta > 1.0);
        // Raw single-step estimates are contaminated; extrapolation is what
        // resolves the null.
        assert!(r.deriv_eps_raw[0] > 1e-5);

        // Three equal π pulses {0, 2π/3, 0}: amplitude derivative nulls,
        // detuning derivative stays √2.
        let seq = PulseSequence::new(
            "three",
            [0.0, 2.0 * PI / 3.0, 0.0]
                .iter()
                .map(|&p| PulseSegment::new(1.0, p, PI))
                .collect(),
        );
        let t = seq.propagate(0.0, 0.0, 0.0);
        let r = derivative_null_report_single(&seq, &t, 1.0, 1e-4);
        assert!(r.deriv_eps < 1e-6, "{}", r.deriv_eps);
        assert!((r.deriv_eta - 2.0f64.sqrt()).abs() < 1e-3, "{}", r.deriv_eta);
    }

    #[test]
    fn seven_pulse_nulls_both_derivatives() {
        for &alpha in &[PI / 4.0, PI / 2.0, 2.0 * PI / 3.0, PI] {
            let seq = seven_pulse(alpha, 1.0).unwrap();
            let target = seq.propagate(0.0, 0.0, 0.0);
            let r = derivative_null_report_single(&seq, &target, 1.0, 1e-4);
            assert!(
                r.deriv_eps < 1e-6 && r.deriv_eta < 1e-6,
                "alpha {alpha}: {} {}",
                r.deriv_eps,
                r.deriv_eta
            );
        }
    }
}
