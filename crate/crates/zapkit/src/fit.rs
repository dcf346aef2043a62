//! Exponential decay-curve fitting for benchmarking data and the error-
//! per-gate arithmetic derived from it.

use serde::Serialize;

use crate::rb::DecayCurve;
use crate::{Error, Result};

/// Decay parameterization: `A e^{−B·m} + C` or the equivalent
/// survival-probability form `A p^m + C` with `p = e^{−B}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FitForm {
    #[serde(rename = "exp")]
    Exponential,
    #[serde(rename = "survival-p")]
    SurvivalP,
}

/// A scalar with a 1σ uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValueWithError {
    pub value: f64,
    pub error: f64,
}

impl ValueWithError {
    pub fn new(value: f64, error: f64) -> Self {
        Self { value, error }
    }
}

/// Fitted decay parameters with uncertainties and derived error-per-gate
/// values.
#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub form: FitForm,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Survival parameter p = e^{−B}.
    pub p: f64,
    /// EPG = (1 − e^{−B}) / 2.
    pub epg: f64,
    pub epg_error: f64,
    /// rEPG = (d−1)/d · (1−p) with d = 2 (identical to `epg`); the d = 4
    /// variant for the repeated two-qubit protocol is `repg_d4`.
    pub repg: f64,
    pub repg_d4: f64,
    /// Covariance of (A, B, C) (or (A, p, C) for the survival form).
    pub covariance: [[f64; 3]; 3],
    pub residual_norm: f64,
    /// True when B (or p) is unresolved (relative uncertainty > 100%); the
    /// EPG is then only an upper bound `epg + epg_error`.
    pub degenerate: bool,
}

impl DecayFit {
    /// The fitted decay rate as a value with uncertainty.
    pub fn epg_value(&self) -> ValueWithError {
        ValueWithError::new(self.epg, self.epg_error)
    }
}

/// Difference of a gate-run EPG and a reference-run EPG with independently
/// summed confidence bounds (root of the sum of squares). A negative
/// difference is reported as an upper bound |difference| per the
/// subtraction convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetEpg {
    pub value: f64,
    pub uncertainty: f64,
    pub is_upper_bound: bool,
    /// |value| when `is_upper_bound`, else value + uncertainty.
    pub upper_bound: f64,
}

pub fn net_epg(gates: ValueWithError, reference: ValueWithError) -> NetEpg {
    let value = gates.value - reference.value;
    let uncertainty = gates.error.hypot(reference.error);
    if value < 0.0 {
        NetEpg { value, uncertainty, is_upper_bound: true, upper_bound: value.abs() }
    } else {
        NetEpg { value, uncertainty, is_upper_bound: false, upper_bound: value + uncertainty }
    }
}

/// Convert a fitted decay constant to an error per gate.
pub fn epg_from_b(b: f64) -> f64 {
    (1.0 - (-b).exp()) / 2.0
}

/// Nonlinear least squares of `A e^{−B·m} + C` (or `A p^m + C`) on a decay
/// curve.
///
/// Initialization: C₀ = mean of the longest 10% of lengths, B₀ from a
/// log-linear regression of P − C₀, A₀ = P(first) − C₀. Points are weighted
/// by 1/stderr² when standard errors are present. Needs at least three
/// distinct lengths; a constant curve or an unresolved decay sets the
/// `degenerate` flag instead of failing.
pub fn fit_decay(curve: &DecayCurve, form: FitForm) -> Result<DecayFit> {
    let m: Vec<f64> = curve.lengths.iter().map(|&x| x as f64).collect();
    let y = &curve.mean_survival;
    let n = m.len();
    if n < 3 {
        return Err(Error::Fit(format!("need >= 3 lengths, got {n}")));
    }
    let w: Vec<f64> = curve
        .std_error
        .iter()
        .map(|&s| if s > 0.0 { 1.0 / (s * s) } else { 1.0 })
        .collect();

    // Initialization per the tail/log-linear recipe.
    let tail = (n / 10).max(1);
    let mut c0 = y[n - tail..].iter().sum::<f64>() / tail as f64;
    let spread = y.iter().cloned().fold(f64::MIN, f64::max) - y.iter().cloned().fold(f64::MAX, f64::min);
    if spread < 1e-12 {
        // Constant curve: B unresolved by construction.
        return Ok(degenerate_fit(form, y[0]));
    }
    if c0 >= y[0] {
        c0 = y.iter().cloned().fold(f64::MAX, f64::min) - 0.1 * spread;
    }
    let mut pairs: Vec<(f64, f64)> = m
        .iter()
        .zip(y)
        .filter(|(_, &p)| p - c0 > 1e-12)
        .map(|(&mm, &p)| (mm, (p - c0).ln()))
        .collect();
    if pairs.len() < 2 {
        pairs = vec![(m[0], (0.5f64).ln()), (m[n - 1], (0.25f64).ln())];
    }
    let (slope, _) = linreg(&pairs);
    let b0 = (-slope).clamp(1e-12, 50.0);
    let a0 = (y[0] - c0).max(1e-6);

    // Levenberg–Marquardt on the chosen parameterization.
    let model = |params: &[f64; 3], mm: f64| -> (f64, [f64; 3]) {
        match form {
            FitForm::Exponential => {
                let e = (-params[1] * mm).exp();
                (params[0] * e + params[2], [e, -params[0] * mm * e, 1.0])
            }
            FitForm::SurvivalP => {
                let p = params[1].max(1e-12);
                let pm = p.powf(mm);
                (params[0] * pm + params[2], [pm, params[0] * mm * pm / p, 1.0])
            }
        }
    };
    let mut params = match form {
        FitForm::Exponential => [a0, b0, c0],
        FitForm::SurvivalP => [a0, (-b0).exp(), c0],
    };
    let chi2 = |p: &[f64; 3]| -> f64 {
        m.iter().zip(y).zip(&w).map(|((&mm, &yy), &ww)| ww * (model(p, mm).0 - yy).powi(2)).sum()
    };
    let mut lambda = 1e-3;
    let mut cost = chi2(&params);
    for _ in 0..200 {
        // Normal equations JᵀWJ + λ diag, JᵀW r.
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for ((&mm, &yy), &ww) in m.iter().zip(y).zip(&w) {
            let (f, jac) = model(&params, mm);
            let r = yy - f;
            for i in 0..3 {
                jtr[i] += ww * jac[i] * r;
                for j in 0..3 {
                    jtj[i][j] += ww * jac[i] * jac[j];
                }
            }
        }
        let mut aug = jtj;
        for (i, row) in aug.iter_mut().enumerate() {
            row[i] += lambda * jtj[i][i].max(1e-30);
        }
        let Some(step) = solve3(&aug, &jtr) else {
            lambda *= 10.0;
            continue;
        };
        let trial = [params[0] + step[0], params[1] + step[1], params[2] + step[2]];
        let trial_cost = chi2(&trial);
        if trial_cost < cost {
            let rel = (cost - trial_cost) / cost.max(1e-300);
            params = trial;
            cost = trial_cost;
            lambda = (lambda * 0.3).max(1e-12);
            if rel < 1e-12 {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }

    // Covariance = σ² (JᵀWJ)⁻¹ with σ² = χ²/(n−3).
    let mut jtj = [[0.0f64; 3]; 3];
    for (&mm, &ww) in m.iter().zip(&w) {
        let (_, jac) = model(&params, mm);
        for i in 0..3 {
            for j in 0..3 {
                jtj[i][j] += ww * jac[i] * jac[j];
            }
        }
    }
    let dof = (n as f64 - 3.0).max(1.0);
    let sigma2 = cost / dof;
    let cov = invert3(&jtj).map(|inv| {
        let mut c = inv;
        for row in c.iter_mut() {
            for v in row.iter_mut() {
                *v *= sigma2;
            }
        }
        c
    });

    let (a, c) = (params[0], params[2]);
    let (b, p, b_err) = match form {
        FitForm::Exponential => {
            let b = params[1];
            let be = cov.map_or(f64::INFINITY, |c| c[1][1].max(0.0).sqrt());
            (b, (-b).exp(), be)
        }
        FitForm::SurvivalP => {
            let p = params[1].max(1e-12);
            let pe = cov.map_or(f64::INFINITY, |c| c[1][1].max(0.0).sqrt());
            // b = −ln p, σ_b = σ_p / p.
            (-p.ln(), p, pe / p)
        }
    };
    let degenerate = !(b > 0.0) || !b_err.is_finite() || b_err / b.abs() > 1.0;
    let epg = epg_from_b(b);
    let epg_error = ((-b).exp() / 2.0) * b_err;
    Ok(DecayFit {
        form,
        a,
        b,
        c,
        p,
        epg,
        epg_error,
        repg: 0.5 * (1.0 - p),
        repg_d4: 0.75 * (1.0 - p),
        covariance: cov.unwrap_or([[f64::NAN; 3]; 3]),
        residual_norm: cost.sqrt(),
        degenerate,
    })
}

/// One-parameter fit of `a·e^{−B·m} + c` with the SPAM levels `a` and `c`
/// held fixed ("searching only for B"), for protocols whose decay shape is
/// not a clean exponential and would make the three-parameter fit
/// degenerate. B is located by a deterministic log-space scan plus golden-
/// section refinement; its uncertainty comes from the χ² curvature.
pub fn fit_decay_b_only(curve: &DecayCurve, a: f64, c: f64) -> Result<DecayFit> {
    let m: Vec<f64> = curve.lengths.iter().map(|&x| x as f64).collect();
    let y = &curve.mean_survival;
    if m.len() < 3 {
        return Err(Error::Fit(format!("need >= 3 lengths, got {}", m.len())));
    }
    let chi2 = |b: f64| -> f64 {
        m.iter().zip(y).map(|(&mm, &yy)| (a * (-b * mm).exp() + c - yy).powi(2)).sum()
    };
    // Bracket the minimum on a log grid spanning decays from ~immeasurably
    // slow to one-step.
    let m_max = *m.last().unwrap();
    let grid: Vec<f64> =
        (0..400).map(|k| 10f64.powf(-8.0 + 9.0 * k as f64 / 399.0) / m_max.max(1.0)).collect();
    let mut best = (f64::INFINITY, grid[0]);
    for &b in &grid {
        let v = chi2(b);
        if v < best.0 {
            best = (v, b);
        }
    }
    let (mut lo, mut hi) = (best.1 / 10.0, best.1 * 10.0);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) * (1.0 - 0.618_033_988_75);
        let m2 = lo + (hi - lo) * 0.618_033_988_75;
        if chi2(m1) < chi2(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
        if (hi - lo) < 1e-14 * hi {
            break;
        }
    }
    let b = 0.5 * (lo + hi);
    // σ_B² = 2σ̂² / (d²χ²/dB²).
    let dof = (m.len() as f64 - 1.0).max(1.0);
    let sigma2 = chi2(b) / dof;
    let db = (b * 1e-3).max(1e-12);
    let curv = (chi2(b + db) + chi2(b - db) - 2.0 * chi2(b)) / (db * db);
    let b_err = if curv > 0.0 { (2.0 * sigma2 / curv).sqrt() } else { f64::INFINITY };
    let degenerate = !b_err.is_finite() || b_err / b.abs() > 1.0;
    let p = (-b).exp();
    let mut cov = [[f64::NAN; 3]; 3];
    cov[1][1] = b_err * b_err;
    Ok(DecayFit {
        form: FitForm::Exponential,
        a,
        b,
        c,
        p,
        epg: epg_from_b(b),
        epg_error: (p / 2.0) * b_err,
        repg: 0.5 * (1.0 - p),
        repg_d4: 0.75 * (1.0 - p),
        covariance: cov,
        residual_norm: chi2(b).sqrt(),
        degenerate,
    })
}

fn degenerate_fit(form: FitForm, level: f64) -> DecayFit {
    DecayFit {
        form,
        a: 0.0,
        b: 0.0,
        c: level,
        p: 1.0,
        epg: 0.0,
        epg_error: f64::INFINITY,
        repg: 0.0,
        repg_d4: 0.0,
        covariance: [[f64::NAN; 3]; 3],
        residual_norm: 0.0,
        degenerate: true,
    }
}

fn linreg(pairs: &[(f64, f64)]) -> (f64, f64) {
    let n = pairs.len() as f64;
    let sx: f64 = pairs.iter().map(|p| p.0).sum();
    let sy: f64 = pairs.iter().map(|p| p.1).sum();
    let sxx: f64 = pairs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pairs.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return (0.0, sy / n);
    }
    let slope = (n * sxy - sx * sy) / denom;
    (slope, (sy - slope * sx) / n)
}

fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut m = *a;
    let mut v = *b;
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        v.swap(col, piv);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in 0..3 {
                    m[row][k] -= f * m[col][k];
                }
                v[row] -= f * v[col];
            }
        }
    }
    Some([v[0] / m[0][0], v[1] / m[1][1], v[2] / m[2][2]])
}

fn invert3(a: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let mut out = [[0.0f64; 3]; 3];
    for (col, outcol) in [(0usize, [1.0, 0.0, 0.0]), (1, [0.0, 1.0, 0.0]), (2, [0.0, 0.0, 1.0])] {
        let x = solve3(a, &outcol)?;
        for row in 0..3 {
            out[row][col] = x[row];
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rb::DecayCurve;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn curve(lengths: &[usize], mut f: impl FnMut(f64) -> f64) -> DecayCurve {
        DecayCurve {
            lengths: lengths.to_vec(),
            mean_survival: lengths.iter().map(|&m| f(m as f64)).collect(),
            std_error: vec![0.005; lengths.len()],
            n_trials: vec![200; lengths.len()],
        }
    }

    #[test]
    fn recovers_synthetic_decay() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let lengths: Vec<usize> = (0..12).map(|k| 1 << k).collect();
        let c = curve(&lengths, |m| {
            0.4 * (-0.01 * m).exp() + 0.5 + 0.005 * rng.gen_range(-1.0..1.0)
        });
        let fit = fit_decay(&c, FitForm::Exponential).unwrap();
        assert!((fit.b - 0.01).abs() < 0.001, "B {}", fit.b);
        assert!(!fit.degenerate);
        // The survival-p form agrees within its uncertainty.
        let fit_p = fit_decay(&c, FitForm::SurvivalP).unwrap();
        assert!((fit_p.p - (-fit.b).exp()).abs() < 3.0 * fit_p.covariance[1][1].sqrt().max(1e-6));
    }

    #[test]
    fn epg_formula_values() {
        assert!((epg_from_b(0.002) - 9.990006663334605e-4).abs() < 1e-12);
        // rEPG with d = 2 equals (1 − e^{−B})/2 exactly under p = e^{−B}.
        let c = curve(&[1, 10, 100, 1000], |m| 0.5 * (-0.002 * m).exp() + 0.5);
        let fit = fit_decay(&c, FitForm::Exponential).unwrap();
        assert!((fit.repg - fit.epg).abs() < 1e-9);
    }

    #[test]
    fn net_epg_conventions() {
        let n = net_epg(ValueWithError::new(0.0039, 0.0011), ValueWithError::new(0.0013, 0.0002));
        assert!((n.value - 0.0026).abs() < 1e-12);
        assert!((n.uncertainty - (0.0011f64.powi(2) + 0.0002f64.powi(2)).sqrt()).abs() < 1e-12);
        assert!(!n.is_upper_bound);
        let eq = net_epg(ValueWithError::new(0.01, 0.001), ValueWithError::new(0.01, 0.001));
        assert!(eq.value == 0.0 && !eq.is_upper_bound);
        let n = net_epg(ValueWithError::new(0.0114, 0.0008), ValueWithError::new(0.0120, 0.0009));
        assert!(n.is_upper_bound && (n.upper_bound - 0.0006).abs() < 1e-12);
    }

    #[test]
    fn constant_curve_flags_degenerate() {
        let c = curve(&[1, 2, 4, 8], |_| 0.75);
        let fit = fit_decay(&c, FitForm::Exponential).unwrap();
        assert!(fit.degenerate);
        assert!(fit_decay(&curve(&[1, 2], |m| 1.0 - 0.01 * m), FitForm::Exponential).is_err());
    }
}
