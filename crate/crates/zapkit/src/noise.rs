//! Noise synthesis and Monte-Carlo gate-error estimation: quasi-static
//! Gaussian offsets, a truncated-1/f dynamical detuning model calibrated
//! against Ramsey and Hahn-echo decay times, and the stepped propagator for
//! time-dependent detuning.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::pulse::{ConditionalGateSpec, PulseSequence};
use crate::unitary::{propagate_constant, Unitary2};
use crate::{Error, Result};

const TAU: f64 = 2.0 * PI;

/// Default number of harmonics in the dynamical model.
pub const DEFAULT_HARMONICS: usize = 100;
/// Default integration budget: maximum accumulated angle per step (rad).
pub const DEFAULT_STEP_BUDGET: f64 = 0.01;
/// Default Monte-Carlo realization count.
pub const DEFAULT_REALIZATIONS: usize = 50;

/// Stochastic error model for a gate simulation.
///
/// Detuning values are angular (rad/s). The dynamical variant synthesizes
/// `δ(t) = (A/T₂*) Σ_{n=1}^{N} (1/n) cos(2π f_c n t / N + φ_n)` with φ_n
/// uniform per realization; `f_c` is therefore the top frequency of the
/// comb and `f_c/N` its fundamental (the alternative reading rescales `f_c`
/// by N and is absorbed by calibration). `amplitude`/`cutoff_hz` stay
/// `None` until [`calibrate`] fixes them.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseModel {
    QuasiStaticDetuning { t2_star: f64 },
    QuasiStaticAmplitude { sigma_alpha: f64 },
    Dynamical1F { t2_star: f64, t2: f64, harmonics: usize, amplitude: Option<f64>, cutoff_hz: Option<f64> },
    Systematic { eps0: f64, detuning0: f64 },
    Composite(Vec<NoiseModel>),
}

impl NoiseModel {
    pub fn quasi_static(t2_star: f64) -> Self {
        assert!(t2_star > 0.0);
        Self::QuasiStaticDetuning { t2_star }
    }

    pub fn amplitude(sigma_alpha: f64) -> Self {
        assert!(sigma_alpha >= 0.0);
        Self::QuasiStaticAmplitude { sigma_alpha }
    }

    pub fn dynamical(t2_star: f64, t2: f64) -> Self {
        assert!(t2_star > 0.0 && t2 >= t2_star);
        Self::Dynamical1F { t2_star, t2, harmonics: DEFAULT_HARMONICS, amplitude: None, cutoff_hz: None }
    }

    /// True when any component needs stepped (time-dependent) propagation.
    pub fn is_dynamical(&self) -> bool {
        match self {
            Self::Dynamical1F { .. } => true,
            Self::Composite(list) => list.iter().any(Self::is_dynamical),
            _ => false,
        }
    }
}

/// One noise realization: a detuning waveform δ(t) plus a constant relative
/// amplitude offset ε. The waveform is an exact evaluator (constant offset
/// plus an optional harmonic comb), deterministic in (model, seed, index);
/// [`NoiseTrajectory::samples`] materializes it on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTrajectory {
    pub eps: f64,
    offset: f64,
    harmonics: Option<Harmonics>,
    duration: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Harmonics {
    amps: Vec<f64>,
    omegas: Vec<f64>,
    phases: Vec<f64>,
}

impl NoiseTrajectory {
    pub fn constant(detuning: f64, eps: f64, duration: f64) -> Self {
        Self { eps, offset: detuning, harmonics: None, duration }
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn is_constant(&self) -> bool {
        self.harmonics.is_none()
    }

    /// δ(t) in rad/s.
    pub fn eval(&self, t: f64) -> f64 {
        let mut d = self.offset;
        if let Some(h) = &self.harmonics {
            for k in 0..h.amps.len() {
                d += h.amps[k] * (h.omegas[k] * t + h.phases[k]).cos();
            }
        }
        d
    }

    /// ∫_{t0}^{t1} δ(t) dt, in closed form.
    pub fn phase_integral(&self, t0: f64, t1: f64) -> f64 {
        let mut p = self.offset * (t1 - t0);
        if let Some(h) = &self.harmonics {
            for k in 0..h.amps.len() {
                p += h.amps[k] / h.omegas[k]
                    * ((h.omegas[k] * t1 + h.phases[k]).sin() - (h.omegas[k] * t0 + h.phases[k]).sin());
            }
        }
        p
    }

    /// Upper bound on |δ(t)|.
    pub fn max_abs(&self) -> f64 {
        self.offset.abs()
            + self.harmonics.as_ref().map_or(0.0, |h| h.amps.iter().map(|a| a.abs()).sum())
    }

    /// Materialize (times, values) on a uniform grid of n points.
    pub fn samples(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let times: Vec<f64> =
            (0..n).map(|k| self.duration * k as f64 / (n.max(2) - 1) as f64).collect();
        let values = times.iter().map(|&t| self.eval(t)).collect();
        (times, values)
    }

    /// Incremental evaluator over uniform time steps starting at `t0`:
    /// each harmonic is advanced by one complex multiply per step.
    fn stepper(&self, t0: f64, h: f64) -> TrajectoryStepper {
        let rotors = self.harmonics.as_ref().map(|harm| {
            let state: Vec<(f64, f64)> = harm
                .omegas
                .iter()
                .zip(&harm.phases)
                .map(|(&w, &p)| ((w * t0 + p).cos(), (w * t0 + p).sin()))
                .collect();
            let step: Vec<(f64, f64)> =
                harm.omegas.iter().map(|&w| ((w * h).cos(), (w * h).sin())).collect();
            (state, step, harm.amps.clone())
        });
        TrajectoryStepper { offset: self.offset, rotors }
    }
}

/// See [`NoiseTrajectory::stepper`].
struct TrajectoryStepper {
    offset: f64,
    rotors: Option<(Vec<(f64, f64)>, Vec<(f64, f64)>, Vec<f64>)>,
}

impl TrajectoryStepper {
    fn next_value(&mut self) -> f64 {
        let mut d = self.offset;
        if let Some((state, step, amps)) = &mut self.rotors {
            for k in 0..amps.len() {
                d += amps[k] * state[k].0;
                let (c, s) = state[k];
                let (dc, ds) = step[k];
                state[k] = (c * dc - s * ds, c * ds + s * dc);
            }
        }
        d
    }
}

fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draw a quasi-static realization: constant δ ~ N(0, (1/T₂*)²) and/or
/// constant ε ~ N(0, σ_α²). Realization `index` uses an independent
/// counter-derived substream of the master seed.
pub fn sample_quasistatic(model: &NoiseModel, seed: u64, index: u64) -> NoiseTrajectory {
    let mut rng = substream(seed, index);
    draw(model, &mut rng, f64::INFINITY)
}

/// Synthesize a dynamical realization covering `duration`; the model must
/// be calibrated first.
pub fn one_over_f_trajectory(
    model: &NoiseModel,
    duration: f64,
    seed: u64,
    index: u64,
) -> Result<NoiseTrajectory> {
    match model {
        NoiseModel::Dynamical1F { amplitude: None, .. }
        | NoiseModel::Dynamical1F { cutoff_hz: None, .. } => Err(Error::Calibration(
            "dynamical model is uncalibrated: run calibrate(T2*, T2) first".into(),
        )),
        _ => {
            let mut rng = substream(seed, index);
            Ok(draw(model, &mut rng, duration))
        }
    }
}

/// Build a realization of any model (quasi-static models ignore
/// `duration`). Panics on uncalibrated dynamical models; use
/// [`one_over_f_trajectory`] for a checked version.
pub fn build_trajectory(model: &NoiseModel, duration: f64, seed: u64, index: u64) -> NoiseTrajectory {
    let mut rng = substream(seed, index);
    draw(model, &mut rng, duration)
}

fn draw(model: &NoiseModel, rng: &mut ChaCha8Rng, duration: f64) -> NoiseTrajectory {
    match model {
        NoiseModel::QuasiStaticDetuning { t2_star } => {
            let d = Normal::new(0.0, 1.0 / t2_star).unwrap().sample(rng);
            NoiseTrajectory::constant(d, 0.0, duration)
        }
        NoiseModel::QuasiStaticAmplitude { sigma_alpha } => {
            let e = if *sigma_alpha > 0.0 {
                Normal::new(0.0, *sigma_alpha).unwrap().sample(rng)
            } else {
                0.0
            };
            NoiseTrajectory { eps: e, offset: 0.0, harmonics: None, duration }
        }
        NoiseModel::Systematic { eps0, detuning0 } => {
            NoiseTrajectory { eps: *eps0, offset: *detuning0, harmonics: None, duration }
        }
        NoiseModel::Dynamical1F { t2_star, harmonics, amplitude, cutoff_hz, .. } => {
            let a0 = amplitude.expect("uncalibrated dynamical model") / t2_star;
            let fc = cutoff_hz.expect("uncalibrated dynamical model");
            let n = *harmonics;
            let mut h = Harmonics {
                amps: Vec::with_capacity(n),
                omegas: Vec::with_capacity(n),
                phases: Vec::with_capacity(n),
            };
            for k in 1..=n {
                h.amps.push(a0 / k as f64);
                h.omegas.push(TAU * fc * k as f64 / n as f64);
                h.phases.push(rng.gen_range(0.0..TAU));
            }
            NoiseTrajectory { eps: 0.0, offset: 0.0, harmonics: Some(h), duration }
        }
        NoiseModel::Composite(list) => {
            let mut out = NoiseTrajectory::constant(0.0, 0.0, duration);
            for m in list {
                let t = draw(m, rng, duration);
                out.eps += t.eps;
                out.offset += t.offset;
                if t.harmonics.is_some() {
                    assert!(out.harmonics.is_none(), "at most one dynamical component");
                    out.harmonics = t.harmonics;
                }
            }
            out
        }
    }
}

/// Propagate a sequence under a detuning trajectory, amplitude scale 1+ε
/// and subspace base detuning, starting the trajectory clock at `t_start`.
///
/// Time is split so each step's accumulated angle
/// `max(|Ω(1+ε)|, |δ|)·h ≤ step_budget`; δ is held at its mid-step value
/// and each step is an exact constant-drive exponential. Constant
/// trajectories take one exact step per segment. Returns the propagator and
/// the trajectory clock after the sequence.
pub fn propagate_sampled_from(
    seq: &PulseSequence,
    traj: &NoiseTrajectory,
    eps: f64,
    step_budget: f64,
    base_detuning: f64,
    t_start: f64,
) -> Result<(Unitary2, f64)> {
    assert!(step_budget > 0.0);
    let needed = t_start + seq.total_duration();
    if traj.duration() < needed - 1e-15 * needed.abs() {
        return Err(Error::TrajectoryTooShort { covered_s: traj.duration(), needed_s: needed });
    }
    let mut u = Unitary2::identity();
    let mut t = t_start;
    let bound = traj.max_abs();
    for seg in &seq.segments {
        if seg.duration == 0.0 {
            continue;
        }
        let base = base_detuning - seg.carrier_offset;
        let step = if traj.is_constant() {
            propagate_constant(
                seg.amplitude * (1.0 + eps),
                seg.phase,
                seg.duration,
                base + traj.eval(0.0),
            )
        } else {
            let rate = (seg.amplitude * (1.0 + eps)).abs().max(base.abs() + bound);
            let n = ((rate * seg.duration / step_budget).ceil() as usize).max(1);
            let h = seg.duration / n as f64;
            let mut w = Unitary2::identity();
            // Uniform steps within the segment: the harmonic comb advances
            // by phasor multiplication instead of re-evaluating cosines.
            let mut stepper = traj.stepper(t + 0.5 * h, h);
            let amp = seg.amplitude * (1.0 + eps);
            for _ in 0..n {
                let d = base + stepper.next_value();
                w = propagate_constant(amp, seg.phase, h, d) * w;
            }
            w
        };
        let step = if seg.carrier_offset != 0.0 {
            Unitary2::z_rotation(seg.carrier_offset * (t - t_start + seg.duration))
                * step
                * Unitary2::z_rotation(-seg.carrier_offset * (t - t_start))
        } else {
            step
        };
        u = step * u;
        t += seg.duration;
    }
    Ok((u, t))
}

/// [`propagate_sampled_from`] with the trajectory clock starting at zero.
pub fn propagate_sampled(
    seq: &PulseSequence,
    traj: &NoiseTrajectory,
    eps: f64,
    step_budget: f64,
    base_detuning: f64,
) -> Result<Unitary2> {
    propagate_sampled_from(seq, traj, eps, step_budget, base_detuning, 0.0).map(|(u, _)| u)
}

/// Analytic survival factor of pure relaxation over `duration`:
/// exp(−duration/T₁).
pub fn t1_survival_factor(duration: f64, t1: f64) -> f64 {
    assert!(t1 > 0.0);
    (-duration / t1).exp()
}

// ---------------------------------------------------------------------------
// Ramsey / Hahn simulation and calibration
// ---------------------------------------------------------------------------

/// 1/e decay time of a simulated Ramsey fringe envelope under `model`
/// (ideal instantaneous π/2 pulses; envelope = ⟨cos ∫δ⟩ over realizations).
pub fn ramsey_decay_time(model: &NoiseModel, n_realizations: usize, seed: u64) -> Result<f64> {
    let scale = model_t2_star(model);
    decay_time(n_realizations, seed, model, 4.0 * scale, |traj, t| traj.phase_integral(0.0, t))
}

/// 1/e decay time of a simulated Hahn-echo envelope (total evolution time
/// 2τ with an ideal π pulse at τ).
pub fn hahn_echo_decay_time(model: &NoiseModel, n_realizations: usize, seed: u64) -> Result<f64> {
    let scale = match model {
        NoiseModel::Dynamical1F { t2, .. } => *t2,
        _ => model_t2_star(model),
    };
    decay_time(n_realizations, seed, model, 2.0 * scale, |traj, t| {
        traj.phase_integral(t / 2.0, t) - traj.phase_integral(0.0, t / 2.0)
    })
}

fn model_t2_star(model: &NoiseModel) -> f64 {
    match model {
        NoiseModel::QuasiStaticDetuning { t2_star } | NoiseModel::Dynamical1F { t2_star, .. } => *t2_star,
        NoiseModel::Composite(list) => {
            list.iter().map(model_t2_star).fold(f64::INFINITY, f64::min)
        }
        _ => f64::INFINITY,
    }
}

fn decay_time(
    n: usize,
    seed: u64,
    model: &NoiseModel,
    t_max0: f64,
    phase: impl Fn(&NoiseTrajectory, f64) -> f64 + Sync,
) -> Result<f64> {
    let mut t_max = t_max0;
    let target = (-1.0f64).exp();
    for _ in 0..12 {
        let trajs: Vec<NoiseTrajectory> =
            (0..n as u64).map(|i| build_trajectory(model, t_max, seed, i)).collect();
        let grid: Vec<f64> = (1..=80).map(|k| t_max * k as f64 / 80.0).collect();
        let sig: Vec<f64> = grid
            .par_iter()
            .map(|&t| trajs.iter().map(|tr| phase(tr, t).cos()).sum::<f64>() / n as f64)
            .collect();
        let mut prev = (0.0, 1.0);
        for (&t, &s) in grid.iter().zip(&sig) {
            if s < target {
                let f = (prev.1 - target) / (prev.1 - s);
                return Ok(prev.0 + f * (t - prev.0));
            }
            prev = (t, s);
        }
        t_max *= 2.0;
    }
    Err(Error::Calibration("no 1/e crossing found (decay slower than the grid)".into()))
}

/// Calibrated dynamical-model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    /// Dimensionless amplitude A.
    pub amplitude: f64,
    /// Top comb frequency f_c (Hz).
    pub cutoff_hz: f64,
}

/// Fix the dynamical model's `A` and `f_c` for the given coherence pair:
/// first, with the comb quasi-static (f_c = 1e-2/T₂*), bisect `A` until the
/// simulated Ramsey 1/e time equals T₂* (within 2%); then bisect `f_c`
/// until the simulated Hahn-echo 1/e time equals T₂ (within 5%). The same
/// realization set (common random numbers) is reused across bisection
/// steps.
pub fn calibrate(t2_star: f64, t2: f64) -> Result<Calibration> {
    calibrate_with(t2_star, t2, DEFAULT_HARMONICS, 256, 0x5eed)
}

pub fn calibrate_with(
    t2_star: f64,
    t2: f64,
    harmonics: usize,
    n_realizations: usize,
    seed: u64,
) -> Result<Calibration> {
    if !(t2 >= t2_star && t2_star > 0.0) {
        return Err(Error::Calibration(format!("need T2 ({t2}) >= T2* ({t2_star}) > 0")));
    }
    let n = n_realizations.max(200);
    let make = |a: f64, fc: f64| NoiseModel::Dynamical1F {
        t2_star,
        t2,
        harmonics,
        amplitude: Some(a),
        cutoff_hz: Some(fc),
    };

    // Stage 1: amplitude against Ramsey. Larger A ⇒ faster decay.
    let fc0 = 1e-2 / t2_star;
    let (mut lo, mut hi) = (0.02f64, 80.0f64);
    let mut amplitude = f64::NAN;
    for _ in 0..60 {
        let mid = (lo * hi).sqrt();
        let t = ramsey_decay_time(&make(mid, fc0), n, seed)?;
        if (t - t2_star).abs() <= 0.02 * t2_star {
            amplitude = mid;
            break;
        }
        if t > t2_star {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if amplitude.is_nan() {
        amplitude = (lo * hi).sqrt();
        let t = ramsey_decay_time(&make(amplitude, fc0), n, seed)?;
        if (t - t2_star).abs() > 0.02 * t2_star {
            return Err(Error::Calibration(format!(
                "Ramsey bisection stalled: A in [{lo}, {hi}], decay {t} vs target {t2_star}"
            )));
        }
    }

    // Stage 2: cutoff against the echo. Larger f_c ⇒ faster echo decay.
    let (mut lo, mut hi) = (1e-3 / t2, 1e3 / t2);
    let mut cutoff = f64::NAN;
    for _ in 0..80 {
        let mid = (lo * hi).sqrt();
        let t = hahn_echo_decay_time(&make(amplitude, mid), n, seed)?;
        if (t - t2).abs() <= 0.05 * t2 {
            cutoff = mid;
            break;
        }
        if t > t2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if cutoff.is_nan() {
        return Err(Error::Calibration(format!(
            "echo bisection failed to converge: f_c in [{lo}, {hi}]"
        )));
    }
    Ok(Calibration { amplitude, cutoff_hz: cutoff })
}

/// Apply a calibration to a dynamical (or composite) model.
pub fn apply_calibration(model: &mut NoiseModel, cal: Calibration) {
    match model {
        NoiseModel::Dynamical1F { amplitude, cutoff_hz, .. } => {
            *amplitude = Some(cal.amplitude);
            *cutoff_hz = Some(cal.cutoff_hz);
        }
        NoiseModel::Composite(list) => list.iter_mut().for_each(|m| apply_calibration(m, cal)),
        _ => {}
    }
}

/// Build a calibrated dynamical model for (T₂*, T₂).
pub fn calibrated_dynamical(t2_star: f64, t2: f64) -> Result<NoiseModel> {
    let mut m = NoiseModel::dynamical(t2_star, t2);
    let cal = calibrate(t2_star, t2)?;
    apply_calibration(&mut m, cal);
    Ok(m)
}

// ---------------------------------------------------------------------------
// Monte-Carlo EPG
// ---------------------------------------------------------------------------

/// What a Monte-Carlo run compares the noisy propagator against.
#[derive(Debug, Clone)]
pub enum EvalTarget<'a> {
    /// Both subspaces of a conditional gate (mean over all 8 entries).
    Conditional(&'a ConditionalGateSpec),
    /// One resonant single-qubit gate.
    Single(&'a Unitary2),
}

/// Monte-Carlo EPG estimate: √(mean over realizations and matrix entries of
/// the squared element differences), with a bootstrap standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloResult {
    pub epg: f64,
    pub std_error: f64,
    pub n_realizations: usize,
    pub seed: u64,
    /// Per-subspace estimates for conditional targets.
    pub epg_resonant: f64,
    pub epg_detuned: f64,
}

/// Estimate the gate error of `seq` under `model`. Each realization draws
/// one trajectory and amplitude offset, propagates the relevant
/// subspace(s), and contributes the per-entry squared differences; the
/// result is the square root of the grand mean. Realizations run in
/// parallel on counter-derived substreams, so the result is independent of
/// scheduling.
pub fn monte_carlo_epg(
    seq: &PulseSequence,
    target: EvalTarget<'_>,
    model: &NoiseModel,
    n_realizations: usize,
    seed: u64,
) -> Result<MonteCarloResult> {
    assert!(n_realizations >= 2);
    let duration = seq.total_duration();
    let budget = DEFAULT_STEP_BUDGET;
    let per: Vec<(f64, f64)> = (0..n_realizations as u64)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64)> {
            let traj = build_trajectory(model, duration, seed, i);
            match &target {
                EvalTarget::Conditional(spec) => {
                    let ur = propagate_sampled(seq, &traj, traj.eps, budget, 0.0)?;
                    let ud = propagate_sampled(seq, &traj, traj.eps, budget, spec.delta)?;
                    Ok((mean_sq(&ur, &spec.resonant_target), mean_sq(&ud, &spec.detuned_target)))
                }
                EvalTarget::Single(t) => {
                    let u = propagate_sampled(seq, &traj, traj.eps, budget, 0.0)?;
                    let m = mean_sq(&u, t);
                    Ok((m, m))
                }
            }
        })
        .collect::<Result<_>>()?;

    let combined: Vec<f64> = per.iter().map(|(r, d)| 0.5 * (r + d)).collect();
    let epg = mean(&combined).sqrt();
    let epg_resonant = mean(&per.iter().map(|p| p.0).collect::<Vec<_>>()).sqrt();
    let epg_detuned = mean(&per.iter().map(|p| p.1).collect::<Vec<_>>()).sqrt();
    Ok(MonteCarloResult {
        epg,
        std_error: bootstrap_stderr(&combined, seed ^ 0x9e3779b97f4a7c15),
        n_realizations,
        seed,
        epg_resonant,
        epg_detuned,
    })
}

fn mean_sq(a: &Unitary2, b: &Unitary2) -> f64 {
    (0..4).map(|k| (a.m[k] - b.m[k]).norm_sqr()).sum::<f64>() / 4.0
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Bootstrap standard error of √(mean): 200 resamples on a dedicated
/// substream.
fn bootstrap_stderr(values: &[f64], seed: u64) -> f64 {
    let mut rng = substream(seed, 0);
    let n = values.len();
    let reps: Vec<f64> = (0..200)
        .map(|_| {
            let s: f64 = (0..n).map(|_| values[rng.gen_range(0..n)]).sum();
            (s / n as f64).sqrt()
        })
        .collect();
    let m = mean(&reps);
    (reps.iter().map(|r| (r - m) * (r - m)).sum::<f64>() / (reps.len() - 1) as f64).sqrt()
}

// ---------------------------------------------------------------------------
// Coherence presets
// ---------------------------------------------------------------------------

/// T₁/T₂/T₂* for one spin species; `None` means effectively infinite (or
/// not specified at this temperature).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoherenceTimes {
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub t2_star: Option<f64>,
}

/// Named coherence preset binding electron and nuclear times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub electron: CoherenceTimes,
    pub nuclear: CoherenceTimes,
}

/// Coherence presets for the two sample grades at 300 K and 4 K.
pub fn preset(name: &str) -> Result<Preset> {
    let p = match name {
        "elsc-300k" => Preset {
            name: "elsc-300k",
            electron: CoherenceTimes { t1: Some(5.7e-3), t2: Some(4.0e-5), t2_star: Some(2.99e-6) },
            nuclear: CoherenceTimes { t1: None, t2: None, t2_star: Some(3.21e-3) },
        },
        "elsc-4k" => Preset {
            name: "elsc-4k",
            electron: CoherenceTimes { t1: None, t2: Some(4.0e-5), t2_star: Some(2.99e-6) },
            nuclear: CoherenceTimes { t1: None, t2: None, t2_star: Some(7.35e-3) },
        },
        "c12-300k" => Preset {
            name: "c12-300k",
            electron: CoherenceTimes { t1: Some(2.22e-3), t2: Some(4.29e-4), t2_star: Some(1.285e-5) },
            nuclear: CoherenceTimes { t1: Some(100.0), t2: Some(3.33e-3), t2_star: None },
        },
        "c12-4k" => Preset {
            name: "c12-4k",
            electron: CoherenceTimes { t1: None, t2: Some(1.8e-3), t2_star: Some(3.0e-4) },
            nuclear: CoherenceTimes { t1: None, t2: Some(5.7), t2_star: Some(0.55) },
        },
        other => return Err(Error::InvalidConfig(format!("unknown preset '{other}'"))),
    };
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{walsh1_zap, GateKind};
    use crate::unitary::frobenius_epg;

    #[test]
    fn quasistatic_statistics() {
        let t2s = 3.0e-6;
        let model = NoiseModel::quasi_static(t2s);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|i| sample_quasistatic(&model, 7, i).eval(0.0)).collect();
        let m = draws.iter().sum::<f64>() / n as f64;
        let sd =
            (draws.iter().map(|d| (d - m) * (d - m)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
        let sigma = 1.0 / t2s;
        assert!(m.abs() < 3.0 * sigma / (n as f64).sqrt(), "mean {m}");
        assert!((sd - sigma).abs() < 0.01 * sigma, "sd {sd} vs {sigma}");
    }

    #[test]
    fn quasistatic_ramsey_time_is_sqrt2_t2star() {
        // σ = 1/T2* gives an e^{−(t/T2*)²/2} envelope: 1/e at √2·T2*.
        let t2s = 1.0e-3;
        let t = ramsey_decay_time(&NoiseModel::quasi_static(t2s), 4000, 3).unwrap();
        assert!((t - 2.0f64.sqrt() * t2s).abs() < 0.05 * t2s, "ramsey {t}");
    }

    #[test]
    fn trajectory_determinism_and_variance() {
        let model = NoiseModel::Dynamical1F {
            t2_star: 1e-3,
            t2: 1e-2,
            harmonics: 100,
            amplitude: Some(1.5),
            cutoff_hz: Some(300.0),
        };
        let a = one_over_f_trajectory(&model, 1.0, 42, 5).unwrap();
        let b = one_over_f_trajectory(&model, 1.0, 42, 5).unwrap();
        assert_eq!(a, b);
        let c = one_over_f_trajectory(&model, 1.0, 42, 6).unwrap();
        assert!(a.eval(0.3) != c.eval(0.3));

        // Variance over realizations ≈ (A/T2*)²·(1/2)Σ1/n².
        let n = 3000;
        let vals: Vec<f64> = (0..n)
            .map(|i| one_over_f_trajectory(&model, 1.0, 9, i).unwrap().eval(0.123))
            .collect();
        let var = vals.iter().map(|v| v * v).sum::<f64>() / n as f64;
        let expect = (1.5f64 / 1e-3).powi(2) * 0.5 * (1..=100).map(|k| 1.0 / (k * k) as f64).sum::<f64>();
        assert!((var / expect - 1.0).abs() < 0.1, "var {var} vs {expect}");
    }

    #[test]
    fn uncalibrated_model_is_rejected() {
        let model = NoiseModel::dynamical(1e-3, 1e-2);
        let err = one_over_f_trajectory(&model, 1.0, 0, 0).unwrap_err();
        assert!(err.to_string().contains("calibrate"));
    }

    #[test]
    fn single_harmonic_is_a_cosine() {
        let model = NoiseModel::Dynamical1F {
            t2_star: 1.0,
            t2: 10.0,
            harmonics: 1,
            amplitude: Some(2.0),
            cutoff_hz: Some(5.0),
        };
        let tr = one_over_f_trajectory(&model, 1.0, 1, 0).unwrap();
        // δ(t) = 2 cos(2π·5·t + φ); check the identity δ(t)² + δ(t+T/4)² = A².
        let quarter = 1.0 / (4.0 * 5.0);
        let s = tr.eval(0.1).powi(2) + tr.eval(0.1 + quarter).powi(2);
        assert!((s - 4.0).abs() < 1e-9, "{s}");
    }

    #[test]
    fn sampled_propagation_matches_closed_form_for_constant_noise() {
        let seq = walsh1_zap(1.0e6);
        let traj = NoiseTrajectory::constant(2.0e4, 0.0, seq.total_duration());
        let a = propagate_sampled(&seq, &traj, 0.01, 0.01, 0.0).unwrap();
        let b = seq.propagate(0.0, 0.01, 2.0e4);
        assert!(frobenius_epg(&a, &b) < 1e-10);
    }

    #[test]
    fn sampled_propagation_rejects_short_trajectory() {
        let seq = walsh1_zap(1.0e6);
        let traj = NoiseTrajectory::constant(0.0, 0.0, seq.total_duration() / 2.0);
        assert!(matches!(
            propagate_sampled(&seq, &traj, 0.0, 0.01, 0.0),
            Err(Error::TrajectoryTooShort { .. })
        ));
    }

    #[test]
    fn step_budget_convergence() {
        let model = NoiseModel::Dynamical1F {
            t2_star: 1e-5,
            t2: 1e-4,
            harmonics: 50,
            amplitude: Some(1.5),
            cutoff_hz: Some(3.0e4),
        };
        let seq = walsh1_zap(1.0e6);
        let traj = one_over_f_trajectory(&model, seq.total_duration(), 5, 0).unwrap();
        let a = propagate_sampled(&seq, &traj, 0.0, 0.01, 1.0e6).unwrap();
        let b = propagate_sampled(&seq, &traj, 0.0, 0.005, 1.0e6).unwrap();
        assert!(a.max_entry_distance(&b) < 1e-8, "{}", a.max_entry_distance(&b));
    }

    #[test]
    fn zero_noise_epg_is_tiny_and_t1_factor() {
        let (seq, spec) = crate::pulse::conditional_gate(GateKind::Walsh1, 1.0e6, 0.0, 0.0).unwrap();
        let model = NoiseModel::Systematic { eps0: 0.0, detuning0: 0.0 };
        let r =
            monte_carlo_epg(&seq, EvalTarget::Conditional(&spec), &model, 4, 1).unwrap();
        assert!(r.epg < 1e-9);
        assert_eq!(t1_survival_factor(0.0, 1.0), 1.0);
        assert!((t1_survival_factor(1.0, 1.0) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_determinism() {
        let (seq, spec) = crate::pulse::conditional_gate(GateKind::Walsh1, 1.0e6, 0.0, 0.0).unwrap();
        let model = NoiseModel::quasi_static(1e-4);
        let a = monte_carlo_epg(&seq, EvalTarget::Conditional(&spec), &model, 32, 9).unwrap();
        let b = monte_carlo_epg(&seq, EvalTarget::Conditional(&spec), &model, 32, 9).unwrap();
        assert_eq!(a.epg.to_bits(), b.epg.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn presets_resolve() {
        let p = preset("c12-4k").unwrap();
        assert_eq!(p.electron.t2_star, Some(3.0e-4));
        assert_eq!(p.electron.t2, Some(1.8e-3));
        assert!(preset("elsc-300k").unwrap().electron.t1.unwrap() > 5.0e-3);
        assert!(preset("nope").is_err());
    }
}
