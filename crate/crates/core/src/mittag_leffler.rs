//! Two-parameter Mittag-Leffler function E_{a,b}(z) for real z ≤ 1.
//!
//! Three evaluation regimes: the power series where it is well conditioned,
//! a real-line Laplace-inversion integral in the crossover zone, and the
//! algebraic asymptotic series for large negative arguments.

use crate::error::{config, numeric, Result};
use crate::quad;
use crate::special::{rgamma, rgamma_log, sin_pi};
use serde::Serialize;
use std::f64::consts::PI;

/// Default bound on |z| for negative arguments.
pub const DEFAULT_Z_MAX: f64 = 1e6;

/// Start of the asymptotic regime on the negative axis.
pub const ASYMPTOTIC_FROM: f64 = 50.0;

/// The series is used on |z| ≤ this bound when well conditioned.
pub const TAYLOR_UP_TO: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MLParams {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Taylor,
    Integral,
    Asymptotic,
}

impl MLParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 2.0) {
            return config(format!("Mittag-Leffler a={a} outside (0, 2]"));
        }
        if !(-3.0..=3.0).contains(&b) {
            return config(format!("Mittag-Leffler b={b} outside [-3, 3]"));
        }
        Ok(MLParams { a, b })
    }

    pub fn eval(&self, z: f64) -> Result<f64> {
        ml_bounded(self.a, self.b, z, DEFAULT_Z_MAX)
    }
}

/// E_{a,b}(z) with the default |z| bound.
pub fn ml(a: f64, b: f64, z: f64) -> Result<f64> {
    MLParams::new(a, b)?;
    ml_bounded(a, b, z, DEFAULT_Z_MAX)
}

/// E_{a,b}(z) for z ∈ [-z_max, 1].
pub fn ml_bounded(a: f64, b: f64, z: f64, z_max: f64) -> Result<f64> {
    if !z.is_finite() || z > 1.0 || z < -z_max {
        return config(format!("Mittag-Leffler argument z={z} outside [-{z_max}, 1]"));
    }
    if z == 0.0 {
        return Ok(rgamma(b));
    }
    if a == 1.0 {
        if let Some(v) = exp_family(b, z) {
            return Ok(v);
        }
    }
    let x = -z;
    if x < 0.0 || x <= TAYLOR_UP_TO {
        let t = taylor(a, b, z);
        if z > 0.0 || t.condition <= 1e4 {
            return Ok(t.value);
        }
    }
    if x >= ASYMPTOTIC_FROM {
        let s = asymptotic(a, b, z);
        if s.error <= 1e-13 * s.value.abs().max(1e-300) {
            return Ok(s.value);
        }
    }
    if a < 1.0 {
        return integral(a, b, z);
    }
    // a ≥ 1: fall back on whichever expansion is acceptable
    let t = taylor(a, b, z);
    if t.condition <= 1e6 {
        return Ok(t.value);
    }
    let s = asymptotic(a, b, z);
    if s.error <= 1e-9 * s.value.abs().max(1e-300) {
        return Ok(s.value);
    }
    numeric(format!(
        "no accurate regime for E_{{{a},{b}}}({z}): series condition {:.2e}, asymptotic error {:.2e}",
        t.condition, s.error
    ))
}

/// Evaluate in a forced regime (regime-consistency checks).
pub fn ml_regime(a: f64, b: f64, z: f64, regime: Regime) -> Result<f64> {
    MLParams::new(a, b)?;
    match regime {
        Regime::Taylor => Ok(taylor(a, b, z).value),
        Regime::Asymptotic => {
            if z >= 0.0 {
                return config("asymptotic regime needs z < 0");
            }
            Ok(asymptotic(a, b, z).value)
        }
        Regime::Integral => {
            if !(a < 1.0) || z >= 0.0 {
                return config("integral regime needs a < 1 and z < 0");
            }
            integral(a, b, z)
        }
    }
}

/// |E_{a,b}(z) - 1/Γ(b) - z E_{a,a+b}(z)| / (1 + |E_{a,b}(z)|).
pub fn ml_recurrence_residual(params: MLParams, z: f64) -> Result<f64> {
    let e = params.eval(z)?;
    if z == 0.0 {
        return Ok((e - rgamma(params.b)).abs() / (1.0 + e.abs()));
    }
    let b2 = params.a + params.b;
    let e2 = ml_bounded(params.a, b2, z, DEFAULT_Z_MAX)?;
    Ok((e - rgamma(params.b) - z * e2).abs() / (1.0 + e.abs()))
}

struct SeriesValue {
    value: f64,
    /// Σ|terms| / |Σ terms|, the relative error amplification.
    condition: f64,
    error: f64,
}

fn taylor(a: f64, b: f64, z: f64) -> SeriesValue {
    // Neumaier compensated summation
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut abs_sum = 0.0;
    let mut small_run = 0;
    let mut zk = 1.0;
    let mut k = 0usize;
    while k < 5000 {
        let arg = a * k as f64 + b;
        let term = if arg > 170.0 {
            let (s, l) = rgamma_log(arg);
            let lz = if z == 0.0 { f64::NEG_INFINITY } else { k as f64 * z.abs().ln() };
            let sign = if z < 0.0 && k % 2 == 1 { -s } else { s };
            sign * (l + lz).exp()
        } else {
            zk * rgamma(arg)
        };
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        abs_sum += term.abs();
        let total = (sum + comp).abs();
        if arg > 1.0 && term.abs() <= 1e-18 * total.max(1e-300) {
            small_run += 1;
            if small_run >= 2 {
                break;
            }
        } else {
            small_run = 0;
        }
        zk *= z;
        k += 1;
    }
    let value = sum + comp;
    SeriesValue {
        value,
        condition: abs_sum / value.abs().max(1e-300),
        error: f64::EPSILON * abs_sum,
    }
}

fn asymptotic(a: f64, b: f64, z: f64) -> SeriesValue {
    let x = -z;
    let lx = x.ln();
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut last = 0.0;
    for k in 1..2000usize {
        let (s, l) = rgamma_log(b - a * k as f64);
        if s == 0.0 {
            continue;
        }
        let mag = (l - k as f64 * lx).exp();
        if mag > prev {
            break;
        }
        prev = mag;
        // -z^{-k}/Γ(b-ak) with z = -x
        let sign = if k % 2 == 0 { -s } else { s };
        let term = sign * mag;
        sum += term;
        abs_sum += mag;
        last = mag;
        if mag < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    if a > 1.0 && a < 2.0 + 1e-15 {
        // residues of the two poles s^a = z on the principal sheet
        let r = x.powf(1.0 / a);
        let th = PI / a;
        let (re, im) = (r * th.cos(), r * th.sin());
        // s^{1-b} e^{s} with s = r e^{iθ}
        let mag = r.powf(1.0 - b) * re.exp();
        let ph = (1.0 - b) * th + im;
        sum += 2.0 / a * mag * ph.cos();
    }
    SeriesValue {
        value: sum,
        condition: abs_sum / sum.abs().max(1e-300),
        error: last,
    }
}

/// Laplace-inversion integral collapsed onto the branch cut, valid for
/// 0 < a < 1, b < 1 + a and negative z; larger b by downward recursion.
fn integral(a: f64, b: f64, z: f64) -> Result<f64> {
    if b >= 1.0 + a {
        let lower = integral(a, b - a, z)?;
        return Ok((lower - rgamma(b - a)) / z);
    }
    let x = -z;
    let s1 = sin_pi(1.0 - b);
    let s2 = sin_pi(1.0 - b + a);
    let c = (PI * a).cos();
    let xa_peak = (-x * c).max(0.0);
    let core = move |s: f64| -> f64 {
        let sa = s.powf(a);
        let num = sa * s1 + x * s2;
        let den = sa * sa + 2.0 * sa * x * c + x * x;
        (-s).exp() * num / den
    };
    let p = a - b + 1.0;
    let s_max = 70.0 + 5.0 * (a - b).abs();
    let mut points = vec![0.0, s_max];
    for cand in [1.0, xa_peak.powf(1.0 / a), x.powf(1.0 / a)] {
        if cand > 0.0 && cand < s_max {
            points.push(cand);
            points.push(0.5 * cand);
            points.push((1.5 * cand).min(s_max));
        }
    }
    points.sort_by(|u, v| u.partial_cmp(v).unwrap());
    points.dedup();
    let q = if a - b >= 0.0 {
        let mut f = |s: f64| s.powf(a - b) * core(s);
        quad::adaptive_points(&mut f, &points, 1e-300, 1e-13, 4000)
    } else {
        // w = s^p removes the integrable endpoint singularity s^{a-b}
        let wpts: Vec<f64> = points.iter().map(|s| s.powf(p)).collect();
        let mut f = |w: f64| {
            if w == 0.0 {
                0.0
            } else {
                core(w.powf(1.0 / p)) / p
            }
        };
        quad::adaptive_points(&mut f, &wpts, 1e-300, 1e-13, 4000)
    };
    let v = q.value / PI;
    if !v.is_finite() || q.error / PI > 1e-9 * v.abs().max(1e-300) {
        return numeric(format!(
            "crossover integral for E_{{{a},{b}}}({z}) did not converge (error {:.2e})",
            q.error
        ));
    }
    Ok(v)
}

/// a = 1 closed forms: E_{1,1}(z) = e^z, integer b by recursion, b > 1 by
/// the Beta-integral form.
fn exp_family(b: f64, z: f64) -> Option<f64> {
    if b == 1.0 {
        return Some(z.exp());
    }
    if b == b.round() && b <= 0.0 {
        // E_{1,-m}(z) = z^{m+1} e^z
        return Some(z.powi(1 - b as i32) * z.exp());
    }
    if b > 1.0 {
        if z.abs() <= 1.0 {
            return None;
        }
        if b == b.round() {
            let mut e = z.exp();
            let mut bb = 1.0;
            while bb < b {
                e = (e - rgamma(bb)) / z;
                bb += 1.0;
            }
            return Some(e);
        }
        // (1/Γ(b-1)) ∫_0^1 e^{zt} (1-t)^{b-2} dt with u = (1-t)^{b-1}
        let p = b - 1.0;
        let q = quad::adaptive(|u: f64| (z * (1.0 - u.powf(1.0 / p))).exp() / p, 0.0, 1.0, 1e-300, 1e-13);
        return Some(q.value * rgamma(b - 1.0));
    }
    None
}
