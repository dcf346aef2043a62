//! Exact 2×2 unitary algebra: axis-angle rotations, constant-drive
//! propagation and the Frobenius gate-error metrics.

use num_complex::Complex64 as C64;

const I: C64 = C64::new(0.0, 1.0);

/// A 2×2 complex matrix, row-major. Constructed values are unitary up to
/// floating-point roundoff; composition chains of 10⁴ factors stay unitary
/// to ~1e-12 per entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    /// Entries `[a, b, c, d]` for the matrix [[a, b], [c, d]].
    pub m: [C64; 4],
}

impl Unitary2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { m: [a, b, c, d] }
    }

    pub fn identity() -> Self {
        Self::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn sigma_x() -> Self {
        Self::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    }

    pub fn sigma_y() -> Self {
        Self::new(C64::new(0.0, 0.0), -I, I, C64::new(0.0, 0.0))
    }

    pub fn sigma_z() -> Self {
        Self::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0))
    }

    /// In-plane Pauli `cos φ σx + sin φ σy`.
    pub fn sigma_phi(phi: f64) -> Self {
        Self::new(
            C64::new(0.0, 0.0),
            C64::new(phi.cos(), -phi.sin()),
            C64::new(phi.cos(), phi.sin()),
            C64::new(0.0, 0.0),
        )
    }

    /// `e^{-i θ σz / 2}`, the frame rotation used for phase jumps.
    pub fn z_rotation(theta: f64) -> Self {
        Self::new(
            C64::from_polar(1.0, -theta / 2.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::from_polar(1.0, theta / 2.0),
        )
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::new(self.m[0].conj(), self.m[2].conj(), self.m[1].conj(), self.m[3].conj())
    }

    pub fn trace(&self) -> C64 {
        self.m[0] + self.m[3]
    }

    pub fn det(&self) -> C64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    /// Multiply every entry by a complex scalar.
    pub fn scaled(&self, s: C64) -> Self {
        Self { m: [self.m[0] * s, self.m[1] * s, self.m[2] * s, self.m[3] * s] }
    }

    /// Entrywise sum of the entrywise product deviation from unitarity,
    /// `max_ij |(U†U - I)_ij|`.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.dagger() * *self;
        let id = Self::identity();
        (0..4).map(|k| (p.m[k] - id.m[k]).norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise distance to another matrix.
    pub fn max_entry_distance(&self, other: &Self) -> f64 {
        (0..4).map(|k| (self.m[k] - other.m[k]).norm()).fold(0.0, f64::max)
    }

    /// Pauli decomposition `U = a0 I + ax σx + ay σy + az σz`.
    pub fn pauli_components(&self) -> [C64; 4] {
        let half = C64::new(0.5, 0.0);
        [
            (self.m[0] + self.m[3]) * half,
            (self.m[1] + self.m[2]) * half,
            (self.m[1] - self.m[2]) * half * I,
            (self.m[0] - self.m[3]) * half,
        ]
    }

    /// Rotation-generator components of `target† · self`, after aligning the
    /// global phase so the identity part is real. For `self` close to
    /// `target` the result is the (axis·angle) error vector; useful for
    /// separating σx/σy/σz error channels.
    pub fn error_components(&self, target: &Self) -> [f64; 3] {
        let d = target.dagger() * *self;
        let tr = d.trace();
        let phase = if tr.norm() > 1e-300 {
            C64::from_polar(1.0, -tr.arg())
        } else {
            C64::new(1.0, 0.0)
        };
        let c = d.scaled(phase).pauli_components();
        [-2.0 * c[1].im, -2.0 * c[2].im, -2.0 * c[3].im]
    }
}

impl std::ops::Mul for Unitary2 {
    type Output = Unitary2;

    fn mul(self, rhs: Unitary2) -> Unitary2 {
        let a = &self.m;
        let b = &rhs.m;
        Unitary2::new(
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        )
    }
}

/// Axis-angle description of a rotation: angle `alpha` about the unit axis
/// `n̂ = (cos θ cos φ, cos θ sin φ, sin θ)` with `φ` the in-plane phase and
/// `θ` the elevation toward z (tan θ = δ/Ω when built from a drive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationSpec {
    pub angle: f64,
    pub axis_phase: f64,
    pub axis_tilt: f64,
}

impl RotationSpec {
    pub fn new(angle: f64, axis_phase: f64, axis_tilt: f64) -> Self {
        Self { angle, axis_phase, axis_tilt }.normalized()
    }

    /// Fold a negative angle into the axis: R(-α, n̂) = R(α, -n̂).
    pub fn normalized(self) -> Self {
        if self.angle < 0.0 {
            Self {
                angle: -self.angle,
                axis_phase: self.axis_phase + std::f64::consts::PI,
                axis_tilt: -self.axis_tilt,
            }
        } else {
            self
        }
    }
}

/// `e^{-i α n̂·σ / 2} = cos(α/2) I − i sin(α/2) (n̂·σ)`.
pub fn rotation_unitary(spec: RotationSpec) -> Unitary2 {
    let spec = spec.normalized();
    let (c, s) = ((spec.angle / 2.0).cos(), (spec.angle / 2.0).sin());
    let nx = spec.axis_tilt.cos() * spec.axis_phase.cos();
    let ny = spec.axis_tilt.cos() * spec.axis_phase.sin();
    let nz = spec.axis_tilt.sin();
    Unitary2::new(
        C64::new(c, -s * nz),
        C64::new(-s * ny, -s * nx),
        C64::new(s * ny, -s * nx),
        C64::new(c, s * nz),
    )
}

/// Propagator of a constant drive segment under
/// `H = (Ω/2)(cos φ σx + sin φ σy) + (δ/2) σz` for a duration `t`.
///
/// The generalized rotation angle is `√(Ω² + δ²)·t` about the axis tilted
/// by `tan θ = δ/Ω`. A signed `rabi` is canonicalized to a positive
/// amplitude with `phase + π`.
pub fn propagate_constant(rabi: f64, phase: f64, duration: f64, detuning: f64) -> Unitary2 {
    let (rabi, phase) =
        if rabi < 0.0 { (-rabi, phase + std::f64::consts::PI) } else { (rabi, phase) };
    let norm = rabi.hypot(detuning);
    if norm * duration == 0.0 {
        return Unitary2::identity();
    }
    rotation_unitary(RotationSpec {
        angle: norm * duration,
        axis_phase: phase,
        axis_tilt: detuning.atan2(rabi),
    })
}

/// Relative amplitude error ε (Ω → Ω(1+ε)) and relative detuning error
/// η = δ/Ω, both dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorPair {
    pub eps: f64,
    pub eta: f64,
}

impl ErrorPair {
    pub fn new(eps: f64, eta: f64) -> Self {
        Self { eps, eta }
    }

    pub fn magnitude(&self) -> f64 {
        self.eps.hypot(self.eta)
    }
}

/// Raw Frobenius error per gate: the square root of the mean of the squared
/// entrywise differences. No global-phase alignment.
pub fn frobenius_epg(actual: &Unitary2, target: &Unitary2) -> f64 {
    let sum: f64 = (0..4).map(|k| (actual.m[k] - target.m[k]).norm_sqr()).sum();
    (sum / 4.0).sqrt()
}

/// Frobenius EPG minimized over a global phase of `actual`. Closed form:
/// `√(1 − |tr(target†·actual)|/2)` for unitary inputs.
pub fn phase_aligned_epg(actual: &Unitary2, target: &Unitary2) -> f64 {
    let tr = (target.dagger() * *actual).trace();
    (1.0 - tr.norm() / 2.0).max(0.0).sqrt()
}

/// Small-error closed form for a single rotation by `alpha`:
/// `EPG = |sin(α/2)·√(η² + ε²)| / √2`.
///
/// Exact to first order for detuning errors at any α; for amplitude errors
/// the true Frobenius coefficient is α/2 rather than sin(α/2), so the two
/// agree only for α ≲ 1.5 rad or detuning-dominated errors.
pub fn small_error_epg(alpha: f64, err: ErrorPair) -> f64 {
    ((alpha / 2.0).sin() * err.magnitude() / std::f64::consts::SQRT_2).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn rotation_identities() {
        let x = rotation_unitary(RotationSpec::new(PI, 0.0, 0.0));
        // R(π, x) = -i σx
        assert!(x.max_entry_distance(&Unitary2::sigma_x().scaled(-I)) < 1e-15);
        let id = rotation_unitary(RotationSpec::new(0.0, 1.2, 0.4));
        assert!(id.max_entry_distance(&Unitary2::identity()) < 1e-15);
        let full = rotation_unitary(RotationSpec::new(2.0 * PI, 0.0, 0.0));
        assert!(full.max_entry_distance(&Unitary2::identity().scaled(C64::new(-1.0, 0.0))) < 1e-15);
    }

    #[test]
    fn negative_angle_folds_into_axis() {
        let a = rotation_unitary(RotationSpec::new(-1.3, 0.7, 0.2));
        let b = rotation_unitary(RotationSpec::new(1.3, 0.7 + PI, -0.2));
        assert!(a.max_entry_distance(&b) < 1e-15);
    }

    #[test]
    fn constant_pulse_matches_rotation() {
        let omega = 2.0e5;
        let u = propagate_constant(omega, 0.0, PI / omega, 0.0);
        assert!(frobenius_epg(&u, &rotation_unitary(RotationSpec::new(PI, 0.0, 0.0))) < 1e-14);
        // Ω = Δ, T = π/(√2 Δ), δ = Δ: angle π about an axis tilted π/4.
        let delta = 1.0;
        let u = propagate_constant(delta, 0.0, PI / (2.0f64.sqrt() * delta), delta);
        let t = rotation_unitary(RotationSpec::new(PI, 0.0, PI / 4.0));
        assert!(frobenius_epg(&u, &t) < 1e-14);
        // Ω = Δ/√3, T = √3π/Δ, δ = Δ: 2π rotation = -I on the detuned level.
        let u = propagate_constant(delta / 3.0f64.sqrt(), 0.0, 3.0f64.sqrt() * PI / delta, delta);
        assert!(u.max_entry_distance(&Unitary2::identity().scaled(C64::new(-1.0, 0.0))) < 1e-13);
    }

    #[test]
    fn signed_rabi_is_pi_phase_shift() {
        let a = propagate_constant(-1.0, 0.3, 1.1, 0.4);
        let b = propagate_constant(1.0, 0.3 + PI, 1.1, 0.4);
        assert!(a.max_entry_distance(&b) < 1e-15);
    }

    #[test]
    fn frobenius_epg_values() {
        let u = rotation_unitary(RotationSpec::new(1.0, 0.3, 0.1));
        assert!(frobenius_epg(&u, &u) == 0.0);
        let mi = Unitary2::identity().scaled(C64::new(-1.0, 0.0));
        assert!(approx(frobenius_epg(&mi, &Unitary2::identity()), 2.0f64.sqrt(), 1e-15));
        assert!(phase_aligned_epg(&mi, &Unitary2::identity()) < 1e-12);
        // π rotation vs identity: aligned distance saturates at 1.
        let x = rotation_unitary(RotationSpec::new(PI, 0.0, 0.0));
        assert!(approx(phase_aligned_epg(&x, &Unitary2::identity()), 1.0, 1e-15));
    }

    #[test]
    fn small_error_formula_values() {
        assert_eq!(small_error_epg(PI, ErrorPair::new(0.0, 0.0)), 0.0);
        assert!(approx(small_error_epg(PI, ErrorPair::new(0.01, 0.0)), 0.0070711, 1e-6));
        // Detuning branch agrees with the propagated matrix at first order.
        let target = rotation_unitary(RotationSpec::new(PI, 0.0, 0.0));
        let u = propagate_constant(1.0, 0.0, PI, 0.01);
        assert!(approx(frobenius_epg(&u, &target), small_error_epg(PI, ErrorPair::new(0.0, 0.01)), 1e-6));
    }

    #[test]
    fn amplitude_error_frobenius_coefficient_is_alpha_over_two() {
        // For Ω → Ω(1+ε) at fixed duration the exact first-order Frobenius
        // coefficient is (α/2)/√2, not sin(α/2)/√2.
        let target = rotation_unitary(RotationSpec::new(PI, 0.0, 0.0));
        let eps = 1e-4;
        let u = propagate_constant(1.0 + eps, 0.0, PI, 0.0);
        let coeff = frobenius_epg(&u, &target) / eps;
        assert!(approx(coeff, PI / (2.0 * 2.0f64.sqrt()), 1e-6), "coeff = {coeff}");
    }

    #[test]
    fn formula_tracks_matrix_epg_at_mixed_small_errors() {
        // O(err²) agreement for a π/2 pulse with ε = η = 0.02.
        let alpha = PI / 2.0;
        let target = rotation_unitary(RotationSpec::new(alpha, 0.0, 0.0));
        let (eps, eta) = (0.02, 0.02);
        let u = propagate_constant(1.0 + eps, 0.0, alpha, eta);
        let diff = (frobenius_epg(&u, &target) - small_error_epg(alpha, ErrorPair::new(eps, eta))).abs();
        let err2 = ErrorPair::new(eps, eta).magnitude().powi(2);
        assert!(diff < 5.0 * err2, "diff {diff} vs err² {err2}");
    }

    #[test]
    fn error_components_pick_out_channels() {
        let target = Unitary2::identity();
        let u = rotation_unitary(RotationSpec::new(1e-3, PI / 2.0, 0.0)); // pure σy
        let c = u.error_components(&target);
        assert!(c[0].abs() < 1e-9 && approx(c[1], 1e-3, 1e-9) && c[2].abs() < 1e-9);
    }
}
