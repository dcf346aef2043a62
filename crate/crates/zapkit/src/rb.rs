//! Randomized-benchmarking simulation: the 24-element single-qubit Clifford
//! group with frame-compiled ZXZ decompositions, survival-decay runs for
//! unprotected and composite gate sets, the repeated-gate two-qubit
//! protocol, and idle reference runs.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::noise::{build_trajectory, propagate_sampled_from, t1_survival_factor, NoiseModel, NoiseTrajectory, DEFAULT_STEP_BUDGET};
use crate::pulse::{rect_gate, seven_pulse, u5a_pi, ConditionalGateSpec, PulseSegment, PulseSequence};
use crate::unitary::Unitary2;
use crate::{Error, Result};

const TAU: f64 = 2.0 * PI;

/// One element of the single-qubit Clifford group.
#[derive(Debug, Clone)]
pub struct CliffordElement {
    pub index: usize,
    /// Canonical unitary (fixed representative phase from the closure).
    pub unitary: Unitary2,
    /// ZXZ decomposition: `U ≅ Z(φ1)·X(x)·Z(φ3)` up to a global phase, all
    /// angles multiples of π/2 with x ∈ {0, π/2, π, 3π/2}.
    pub zxz: (f64, f64, f64),
}

/// The Clifford group plus its composition and inversion tables.
#[derive(Debug, Clone)]
pub struct CliffordGroup {
    pub elements: Vec<CliffordElement>,
    mult: Vec<[usize; 24]>,
    inverse: [usize; 24],
}

fn phase_equal(a: &Unitary2, b: &Unitary2) -> bool {
    ((b.dagger() * *a).trace().norm() - 2.0).abs() < 1e-9
}

/// Generate the 24-element group by closure over {X_{π/2}, Y_{π/2},
/// Z_{π/2}} with phase-insensitive deduplication, then annotate each
/// element with a ZXZ decomposition found by exhaustive search over
/// multiples of π/2.
pub fn clifford_group() -> CliffordGroup {
    let gens = [
        crate::unitary::rotation_unitary(crate::unitary::RotationSpec::new(PI / 2.0, 0.0, 0.0)),
        crate::unitary::rotation_unitary(crate::unitary::RotationSpec::new(PI / 2.0, PI / 2.0, 0.0)),
        Unitary2::z_rotation(PI / 2.0),
    ];
    let mut elems: Vec<Unitary2> = vec![Unitary2::identity()];
    let mut frontier = vec![0usize];
    while let Some(i) = frontier.pop() {
        for g in &gens {
            let u = *g * elems[i];
            if !elems.iter().any(|e| phase_equal(e, &u)) {
                elems.push(u);
                frontier.push(elems.len() - 1);
            }
        }
    }
    assert_eq!(elems.len(), 24, "Clifford closure must have 24 elements");

    let quarter = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
    let elements: Vec<CliffordElement> = elems
        .iter()
        .enumerate()
        .map(|(index, u)| {
            let mut combos = Vec::with_capacity(64);
            for &p1 in &quarter {
                for &x in &quarter {
                    for &p3 in &quarter {
                        combos.push((p1, x, p3));
                    }
                }
            }
            let zxz = combos
                .into_iter()
                .find(|&(p1, x, p3)| {
                    let cand = Unitary2::z_rotation(p1)
                        * crate::unitary::rotation_unitary(crate::unitary::RotationSpec::new(
                            x, 0.0, 0.0,
                        ))
                        * Unitary2::z_rotation(p3);
                    phase_equal(&cand, u)
                })
                .expect("every Clifford has a ZXZ decomposition");
            CliffordElement { index, unitary: *u, zxz }
        })
        .collect();

    let mut mult = vec![[0usize; 24]; 24];
    for i in 0..24 {
        for j in 0..24 {
            let u = elements[i].unitary * elements[j].unitary;
            mult[i][j] = elements
                .iter()
                .position(|e| phase_equal(&e.unitary, &u))
                .expect("group closed under composition");
        }
    }
    let mut inverse = [0usize; 24];
    for (i, e) in elements.iter().enumerate() {
        let d = e.unitary.dagger();
        inverse[i] = elements
            .iter()
            .position(|f| phase_equal(&f.unitary, &d))
            .expect("group closed under inversion");
    }
    CliffordGroup { elements, mult, inverse }
}

impl CliffordGroup {
    pub fn product_index(&self, seq: &[usize]) -> usize {
        // Index of C_m · … · C_1 (time order = slice order).
        seq.iter().fold(usize::MAX, |acc, &k| if acc == usize::MAX { k } else { self.mult[k][acc] })
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        self.inverse[i]
    }
}

/// Physical realization of the X rotations in the compiled Cliffords; Z
/// rotations are free frame jumps in every set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateSet {
    /// Plain rectangular pulses (x = 3π/2 compiled as a π/2 pulse with a π
    /// phase flip).
    Unprotected { rabi: f64 },
    /// First-order-protected composites: the five-π composite for X_π and
    /// the seven-pulse composite for X_{π/2}.
    Composite { rabi: f64 },
}

impl GateSet {
    fn x_pulse(&self, x_angle: f64, frame: f64) -> Result<Vec<PulseSegment>> {
        let quarter_turns = (x_angle / (PI / 2.0)).round() as i32;
        let (angle, extra_phase) = match quarter_turns.rem_euclid(4) {
            0 => return Ok(Vec::new()),
            1 => (PI / 2.0, 0.0),
            2 => (PI, 0.0),
            // A 3π/2 rotation is a π/2 rotation about the opposite axis.
            3 => (PI / 2.0, PI),
            _ => unreachable!(),
        };
        // Composite sequences realize their rotation about an offset axis
        // (the five-π composite about φ = 2π/3, the seven-pulse about
        // φ = π up to a global phase); the offset is absorbed into the
        // emitted phases.
        let (seq, axis_fix) = match self {
            GateSet::Unprotected { rabi } => (rect_gate(angle, 0.0, *rabi), 0.0),
            GateSet::Composite { rabi } => {
                if (angle - PI).abs() < 1e-12 {
                    (u5a_pi(*rabi), -2.0 * PI / 3.0)
                } else {
                    (seven_pulse(angle, *rabi)?, PI)
                }
            }
        };
        Ok(seq.phase_shifted(extra_phase + frame + axis_fix).segments)
    }

    /// Mean compiled gate duration over the 24 Cliffords.
    pub fn mean_gate_duration(&self, group: &CliffordGroup) -> f64 {
        let total: f64 = group
            .elements
            .iter()
            .map(|e| compile_clifford(e, self, 0.0).unwrap().0.total_duration())
            .sum();
        total / 24.0
    }
}

/// Compile one Clifford into physical segments given the incoming frame
/// phase. Z rotations advance the frame (zero duration); X rotations become
/// pulses whose phase carries the accumulated frame. Returns the segments
/// and the outgoing frame; the compiled ideal propagator satisfies
/// `Z(frame_out)·Π(segments) ≅ Z(frame_in)·U_clifford` up to a global
/// phase.
pub fn compile_clifford(
    elem: &CliffordElement,
    gateset: &GateSet,
    frame_in: f64,
) -> Result<(PulseSequence, f64)> {
    let (p1, x, p3) = elem.zxz;
    // Time order: Z(p3), X(x), Z(p1).
    let mut frame = frame_in + p3;
    let segments = gateset.x_pulse(x, -frame)?;
    frame += p1;
    Ok((PulseSequence::new("clifford", segments), frame.rem_euclid(TAU)))
}

/// Compile a Clifford sequence (time order = slice order) into one pulse
/// train; returns the train, the final frame and the per-Clifford durations.
pub fn compile_sequence(
    indices: &[usize],
    group: &CliffordGroup,
    gateset: &GateSet,
) -> Result<(PulseSequence, f64, Vec<f64>)> {
    let mut segments = Vec::new();
    let mut frame = 0.0;
    let mut durations = Vec::with_capacity(indices.len());
    for &i in indices {
        let (seq, f) = compile_clifford(&group.elements[i], gateset, frame)?;
        durations.push(seq.total_duration());
        segments.extend(seq.segments);
        frame = f;
    }
    Ok((PulseSequence::new("rb-train", segments), frame, durations))
}

/// Decay-curve rows: one entry per sequence length.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayCurve {
    pub lengths: Vec<usize>,
    pub mean_survival: Vec<f64>,
    pub std_error: Vec<f64>,
    pub n_trials: Vec<usize>,
}

impl DecayCurve {
    fn from_rows(lengths: &[usize], rows: Vec<Vec<f64>>) -> Self {
        let mean: Vec<f64> = rows.iter().map(|r| r.iter().sum::<f64>() / r.len() as f64).collect();
        let stderr: Vec<f64> = rows
            .iter()
            .zip(&mean)
            .map(|(r, &m)| {
                if r.len() < 2 {
                    return 0.0;
                }
                let var = r.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (r.len() - 1) as f64;
                (var / r.len() as f64).sqrt()
            })
            .collect();
        DecayCurve {
            lengths: lengths.to_vec(),
            mean_survival: mean,
            std_error: stderr,
            n_trials: rows.iter().map(Vec::len).collect(),
        }
    }
}

/// Randomized-benchmarking run configuration.
#[derive(Debug, Clone)]
pub struct RbConfig {
    pub lengths: Vec<usize>,
    pub trials: usize,
    pub gateset: GateSet,
    /// Coherent noise; `None` runs noiselessly. One fresh realization per
    /// sequence (quasi-static per-shot redraw; dynamical redrawn per
    /// sequence).
    pub noise: Option<NoiseModel>,
    /// Analytic depolarizing channel applied per Clifford (inverse
    /// included): survival → 1/2 + (survival − 1/2)·p^(m+1).
    pub depolarizing_p: Option<f64>,
    /// Electron relaxation folded in as exp(−duration/T₁) on the survival.
    pub t1: Option<f64>,
    /// Measured survival = spam_scale · survival + spam_offset.
    pub spam_scale: f64,
    pub spam_offset: f64,
    pub seed: u64,
}

impl RbConfig {
    pub fn new(lengths: Vec<usize>, trials: usize, gateset: GateSet, seed: u64) -> Result<Self> {
        if lengths.is_empty() || lengths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("lengths must be strictly increasing".into()));
        }
        if trials == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        Ok(Self {
            lengths,
            trials,
            gateset,
            noise: None,
            depolarizing_p: None,
            t1: None,
            spam_scale: 1.0,
            spam_offset: 0.0,
            seed,
        })
    }
}

fn survival_from_zero(u: &Unitary2) -> f64 {
    u.m[0].norm_sqr()
}

/// Run the standard protocol: per trial draw m Cliffords uniformly, append
/// the exact group inverse, compile, propagate under one fresh noise
/// realization, and record the |0⟩ return probability (times the SPAM/T₁
/// factors). Trials run in parallel on counter-derived RNG substreams.
pub fn rb_run(config: &RbConfig, group: &CliffordGroup) -> Result<DecayCurve> {
    let rows: Vec<Vec<f64>> = config
        .lengths
        .iter()
        .enumerate()
        .map(|(li, &m)| -> Result<Vec<f64>> {
            (0..config.trials as u64)
                .into_par_iter()
                .map(|trial| -> Result<f64> {
                    let idx = (li as u64) * config.trials as u64 + trial;
                    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                    rng.set_stream(idx);
                    let mut seq: Vec<usize> = (0..m).map(|_| rng.gen_range(0..24)).collect();
                    let inv = group.inverse_index(group.product_index(&seq));
                    seq.push(inv);
                    let (train, _frame, durations) = compile_sequence(&seq, group, &config.gateset)?;
                    let total: f64 = durations.iter().sum();

                    let mut s = match &config.noise {
                        None => {
                            let u = train.propagate(0.0, 0.0, 0.0);
                            survival_from_zero(&u)
                        }
                        Some(model) => {
                            // Noise draws use a seed offset so they stay
                            // independent of the Clifford choices.
                            let traj = build_trajectory(model, total, config.seed ^ NOISE_SEED_XOR, idx);
                            let (u, _) = propagate_sampled_from(
                                &train,
                                &traj,
                                traj.eps,
                                DEFAULT_STEP_BUDGET,
                                0.0,
                                0.0,
                            )?;
                            survival_from_zero(&u)
                        }
                    };
                    if let Some(p) = config.depolarizing_p {
                        s = 0.5 + (s - 0.5) * p.powi(seq.len() as i32);
                    }
                    if let Some(t1) = config.t1 {
                        s *= t1_survival_factor(total, t1);
                    }
                    Ok(config.spam_scale * s + config.spam_offset)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(DecayCurve::from_rows(&config.lengths, rows))
}

const NOISE_SEED_XOR: u64 = 0x6e6f_6973_65;

/// Reference run: the gates are replaced by idle periods of the same
/// compiled duration, so the survival is set purely by T₁ relaxation (and
/// SPAM).
pub fn reference_idle_run(config: &RbConfig, group: &CliffordGroup) -> Result<DecayCurve> {
    let t1 = config
        .t1
        .ok_or_else(|| Error::InvalidConfig("reference run requires t1".into()))?;
    let rows: Vec<Vec<f64>> = config
        .lengths
        .iter()
        .enumerate()
        .map(|(li, &m)| -> Result<Vec<f64>> {
            (0..config.trials as u64)
                .map(|trial| -> Result<f64> {
                    let idx = (li as u64) * config.trials as u64 + trial;
                    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                    rng.set_stream(idx);
                    let mut seq: Vec<usize> = (0..m).map(|_| rng.gen_range(0..24)).collect();
                    let inv = group.inverse_index(group.product_index(&seq));
                    seq.push(inv);
                    let (_, _, durations) = compile_sequence(&seq, group, &config.gateset)?;
                    let s = t1_survival_factor(durations.iter().sum(), t1);
                    Ok(config.spam_scale * s + config.spam_offset)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(DecayCurve::from_rows(&config.lengths, rows))
}

/// Repeated conditional-gate protocol configuration.
#[derive(Debug, Clone)]
pub struct TwoQubitGate {
    pub sequence: PulseSequence,
    pub spec: ConditionalGateSpec,
}

/// Repeated-gate two-qubit protocol: starting from |0⟩ on the active
/// (detuned) subspace of an initially flipped register, apply the gate m
/// times and then its inverse m times, and record the return probability.
/// The gate's conditional π target is self-inverse up to a global phase, so
/// the inverse is the same pulse; one trial therefore simulates a single
/// 2·m_max-application train under one evolving noise realization and reads
/// the survival at every requested checkpoint.
pub fn two_qubit_repeat_run(
    gate: &TwoQubitGate,
    lengths: &[usize],
    trials: usize,
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<DecayCurve> {
    if lengths.is_empty() || lengths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("lengths must be strictly increasing".into()));
    }
    let m_max = *lengths.last().unwrap();
    let gate_t = gate.sequence.total_duration();
    let per_trial: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<Vec<f64>> {
            let traj: Option<NoiseTrajectory> = noise
                .map(|model| build_trajectory(model, 2.0 * m_max as f64 * gate_t, seed, trial));
            let mut survivals = Vec::with_capacity(lengths.len());
            let mut w = Unitary2::identity();
            if traj.as_ref().map_or(true, |t| t.is_constant()) {
                // Frozen noise: the per-application propagator repeats.
                let u = match &traj {
                    None => gate.sequence.propagate(gate.spec.delta, 0.0, 0.0),
                    Some(t) => {
                        gate.sequence.propagate(gate.spec.delta, t.eps, t.eval(0.0))
                    }
                };
                let mut li = 0;
                for m in 1..=m_max {
                    w = u * w;
                    w = u * w;
                    if lengths[li] == m {
                        survivals.push(survival_from_zero(&w));
                        li += 1;
                        if li == lengths.len() {
                            break;
                        }
                    }
                }
            } else {
                let traj = traj.as_ref().unwrap();
                let mut t = 0.0;
                let mut li = 0;
                for m in 1..=m_max {
                    for _ in 0..2 {
                        let (u, t_next) = propagate_sampled_from(
                            &gate.sequence,
                            traj,
                            traj.eps,
                            DEFAULT_STEP_BUDGET,
                            gate.spec.delta,
                            t,
                        )?;
                        w = u * w;
                        t = t_next;
                    }
                    if lengths[li] == m {
                        survivals.push(survival_from_zero(&w));
                        li += 1;
                        if li == lengths.len() {
                            break;
                        }
                    }
                }
            }
            Ok(survivals)
        })
        .collect::<Result<_>>()?;

    let rows: Vec<Vec<f64>> = (0..lengths.len())
        .map(|li| per_trial.iter().map(|t| t[li]).collect())
        .collect();
    Ok(DecayCurve::from_rows(lengths, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{conditional_gate, GateKind};

    fn group() -> CliffordGroup {
        clifford_group()
    }

    #[test]
    fn group_has_24_elements_with_valid_structure() {
        let g = group();
        assert_eq!(g.elements.len(), 24);
        // Identity present; X_{π/2}^4 = I up to phase.
        let x90 = g
            .elements
            .iter()
            .find(|e| {
                phase_equal(
                    &e.unitary,
                    &crate::unitary::rotation_unitary(crate::unitary::RotationSpec::new(
                        PI / 2.0,
                        0.0,
                        0.0,
                    )),
                )
            })
            .unwrap();
        let mut idx = x90.index;
        for _ in 0..3 {
            idx = g.mult[x90.index][idx];
        }
        assert!(phase_equal(&g.elements[idx].unitary, &Unitary2::identity()));
        // Every inverse is in the set and composes to the identity.
        for e in &g.elements {
            let inv = g.inverse_index(e.index);
            let prod = g.mult[inv][e.index];
            assert!(phase_equal(&g.elements[prod].unitary, &Unitary2::identity()));
        }
    }

    #[test]
    fn zxz_recomposition_matches() {
        let g = group();
        for e in &g.elements {
            let (p1, x, p3) = e.zxz;
            let cand = Unitary2::z_rotation(p1)
                * crate::unitary::rotation_unitary(crate::unitary::RotationSpec::new(x, 0.0, 0.0))
                * Unitary2::z_rotation(p3);
            assert!(
                ((cand.dagger() * e.unitary).trace().norm() - 2.0).abs() < 1e-10,
                "element {}",
                e.index
            );
        }
    }

    #[test]
    fn compiled_ideal_propagator_matches_canonical() {
        let g = group();
        let gs = GateSet::Unprotected { rabi: 1.0 };
        for e in &g.elements {
            let (seq, frame) = compile_clifford(e, &gs, 0.0).unwrap();
            let u = Unitary2::z_rotation(frame) * seq.propagate(0.0, 0.0, 0.0);
            assert!(phase_equal(&u, &e.unitary), "element {}", e.index);
        }
        // Frame carry-over across a random sequence: noiseless survival 1.
        let cfg = RbConfig::new(vec![1, 4, 16], 8, gs, 11).unwrap();
        let curve = rb_run(&cfg, &g).unwrap();
        for s in curve.mean_survival {
            assert!((s - 1.0).abs() < 1e-9, "{s}");
        }
    }

    #[test]
    fn composite_gateset_also_inverts_exactly() {
        let g = group();
        let gs = GateSet::Composite { rabi: 1.0 };
        let cfg = RbConfig::new(vec![1, 3, 9], 6, gs, 3).unwrap();
        let curve = rb_run(&cfg, &g).unwrap();
        for s in curve.mean_survival {
            assert!((s - 1.0).abs() < 1e-9, "{s}");
        }
    }

    #[test]
    fn pure_z_cliffords_compile_to_zero_duration() {
        let g = group();
        let gs = GateSet::Unprotected { rabi: 1.0 };
        let zero_len = g
            .elements
            .iter()
            .filter(|e| compile_clifford(e, &gs, 0.0).unwrap().0.total_duration() == 0.0)
            .count();
        assert_eq!(zero_len, 4);
    }

    #[test]
    fn mean_gate_times_match_the_13us_pi_time() {
        let g = group();
        let rabi = PI / 13.0e-6;
        let t_unprot = GateSet::Unprotected { rabi }.mean_gate_duration(&g);
        assert!((t_unprot - 6.5e-6).abs() < 1e-8, "{t_unprot}");
        let t_comp = GateSet::Composite { rabi }.mean_gate_duration(&g);
        assert!((t_comp - 58.5e-6).abs() < 1e-7, "{t_comp}");
    }

    #[test]
    fn depolarizing_injection_recovers_repg() {
        let g = group();
        let mut cfg =
            RbConfig::new(vec![1, 2, 5, 12, 30, 80, 200, 500, 1000], 20, GateSet::Unprotected { rabi: 1.0 }, 5)
                .unwrap();
        cfg.depolarizing_p = Some(0.999);
        let curve = rb_run(&cfg, &g).unwrap();
        let fit = crate::fit::fit_decay(&curve, crate::fit::FitForm::Exponential).unwrap();
        assert!((fit.repg - 5.0e-4).abs() < 5.0e-5, "repg {}", fit.repg);
    }

    #[test]
    fn reference_run_decays_by_t1() {
        let g = group();
        let rabi = PI / 13.0e-6;
        let mut cfg =
            RbConfig::new(vec![1, 8, 64, 256], 20, GateSet::Unprotected { rabi }, 2).unwrap();
        cfg.t1 = Some(5.7e-3);
        let curve = reference_idle_run(&cfg, &g).unwrap();
        let fit = crate::fit::fit_decay(&curve, crate::fit::FitForm::Exponential).unwrap();
        // Per-gate decay ≈ T_mean/T1 = 6.5e-6/5.7e-3; fitted EPG ≈ half.
        let expect = 6.5e-6 / 5.7e-3 / 2.0;
        assert!((fit.epg - expect).abs() < 0.2 * expect, "epg {}", fit.epg);
        // T1 → ∞ is flat.
        cfg.t1 = Some(1e12);
        let curve = reference_idle_run(&cfg, &g).unwrap();
        assert!(curve.mean_survival.iter().all(|s| (s - 1.0).abs() < 1e-9));
    }

    #[test]
    fn two_qubit_noiseless_is_flat() {
        let (seq, spec) = conditional_gate(GateKind::Walsh1, 1.0e6, 0.0, 0.0).unwrap();
        let gate = TwoQubitGate { sequence: seq, spec };
        let curve = two_qubit_repeat_run(&gate, &[1, 2, 4, 8], 4, None, 7).unwrap();
        for s in curve.mean_survival {
            assert!((s - 1.0).abs() < 1e-9);
        }
    }
}
