//! Riemann–Liouville integrals and Caputo / Riemann–Liouville derivatives
//! of order α on uniform time grids t_k = k·Δt.
//!
//! I^α uses the product trapezoidal rule (piecewise-linear interpolant);
//! the Caputo derivative uses the L1 scheme.

use crate::error::{config, Result};
use crate::special::{gamma, rgamma};
use serde::Serialize;

/// Samples φ(kΔt), k = 0 … n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    pub dt: f64,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return config(format!("time step must be positive, got {dt}"));
        }
        if values.len() < 2 {
            return config("a time series needs at least two samples");
        }
        Ok(TimeSeries { dt, values })
    }

    /// φ sampled at kΔt, k = 0 … steps.
    pub fn from_fn<F: FnMut(f64) -> f64>(dt: f64, steps: usize, mut f: F) -> Result<Self> {
        Self::new(dt, (0..=steps).map(|k| f(k as f64 * dt)).collect())
    }

    /// Uniform grid with `steps` steps on [0, horizon].
    pub fn on_interval<F: FnMut(f64) -> f64>(horizon: f64, steps: usize, f: F) -> Result<Self> {
        if steps == 0 {
            return config("at least one time step is needed");
        }
        Self::from_fn(horizon / steps as f64, steps, f)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.values.len()).map(|k| k as f64 * self.dt).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// √(Σ (a − b)²) / √(Σ b²).
    pub fn relative_distance(&self, reference: &TimeSeries) -> f64 {
        relative_l2(&self.values, &reference.values)
    }
}

pub(crate) fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

/// Product-trapezoid weights of I^α for n + 1 samples. Row k of the
/// quadrature is Δt^α/Γ(α+2)·(w_end(k) φ_0 + Σ_{j=1}^{k} c_{k−j} φ_j).
#[derive(Debug, Clone)]
pub struct RlWeights {
    pub alpha: f64,
    pub dt: f64,
    scale: f64,
    first: Vec<f64>,
    conv: Vec<f64>,
}

impl RlWeights {
    pub fn new(alpha: f64, dt: f64, steps: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return config(format!("integral order must be positive, got {alpha}; use a derivative for α ≤ 0"));
        }
        if !(dt > 0.0) {
            return config("time step must be positive");
        }
        let p = |x: f64| x.powf(alpha + 1.0);
        // weight of φ_0 in row k
        let first = (0..=steps)
            .map(|k| {
                let k = k as f64;
                if k == 0.0 {
                    0.0
                } else {
                    p(k - 1.0) - (k - alpha - 1.0) * k.powf(alpha)
                }
            })
            .collect();
        // weight of φ_j, j ≥ 1, depends on m = k − j: 1 for m = 0,
        // (m+1)^{α+1} − 2m^{α+1} + (m−1)^{α+1} otherwise
        let conv = (0..=steps)
            .map(|m| {
                let m = m as f64;
                if m == 0.0 {
                    1.0
                } else {
                    p(m + 1.0) - 2.0 * p(m) + p(m - 1.0)
                }
            })
            .collect();
        Ok(RlWeights {
            alpha,
            dt,
            scale: dt.powf(alpha) * rgamma(alpha + 2.0),
            first,
            conv,
        })
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() > self.conv.len() {
            return config("series longer than the weight table");
        }
        let mut out = vec![0.0; v.len()];
        for k in 1..v.len() {
            let mut s = self.first[k] * v[0];
            for j in 1..=k {
                s += self.conv[k - j] * v[j];
            }
            out[k] = self.scale * s;
        }
        Ok(out)
    }
}

/// L1 weights for the Caputo derivative of order α ∈ (0, 1]:
/// ∂^α φ(t_k) ≈ Δt^{−α}/Γ(2−α) Σ_{j=0}^{k−1} b_j (φ_{k−j} − φ_{k−j−1}),
/// b_j = (j+1)^{1−α} − j^{1−α}.
#[derive(Debug, Clone)]
pub struct L1Weights {
    pub alpha: f64,
    pub dt: f64,
    scale: f64,
    b: Vec<f64>,
}

impl L1Weights {
    pub fn new(alpha: f64, dt: f64, steps: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return config(format!("Caputo order must lie in (0, 1], got {alpha}"));
        }
        if !(dt > 0.0) {
            return config("time step must be positive");
        }
        let e = 1.0 - alpha;
        let b = (0..=steps)
            .map(|j| ((j + 1) as f64).powf(e) - (j as f64).powf(e))
            .collect();
        Ok(L1Weights {
            alpha,
            dt,
            scale: dt.powf(-alpha) / gamma(2.0 - alpha),
            b,
        })
    }

    /// Leading coefficient: ∂^α φ(t_k) = b0·φ_k + (history terms).
    pub fn b0(&self) -> f64 {
        self.scale * self.b[0]
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() > self.b.len() {
            return config("series longer than the weight table");
        }
        let mut out = vec![0.0; v.len()];
        for k in 1..v.len() {
            out[k] = self.scale * self.history(v, k) + self.b0() * v[k];
        }
        Ok(out)
    }

    /// Σ_{j=1}^{k−1} b_j(φ_{k−j} − φ_{k−j−1}) − b_0 φ_{k−1}, the part of
    /// step k that does not involve φ_k (without the Δt^{−α}/Γ factor).
    pub fn history(&self, v: &[f64], k: usize) -> f64 {
        let mut s = -self.b[0] * v[k - 1];
        for j in 1..k {
            s += self.b[j] * (v[k - j] - v[k - j - 1]);
        }
        s
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

/// I^α φ, α > 0.
pub fn rl_integral(series: &TimeSeries, alpha: f64) -> Result<TimeSeries> {
    let w = RlWeights::new(alpha, series.dt, series.len() - 1)?;
    TimeSeries::new(series.dt, w.apply(&series.values)?)
}

/// Caputo derivative ∂^α φ, α ∈ (0, 1], by the L1 scheme; 0 at t = 0.
pub fn caputo(series: &TimeSeries, alpha: f64) -> Result<TimeSeries> {
    let w = L1Weights::new(alpha, series.dt, series.len() - 1)?;
    TimeSeries::new(series.dt, w.apply(&series.values)?)
}

/// Riemann–Liouville derivative D^α φ = ∂^α φ + φ(0) t^{−α}/Γ(1−α).
/// The value at t = 0 is NaN when φ(0) ≠ 0.
pub fn rl_derivative(series: &TimeSeries, alpha: f64) -> Result<TimeSeries> {
    let mut c = caputo(series, alpha)?;
    let v0 = series.values[0];
    if v0 != 0.0 {
        let g = rgamma(1.0 - alpha);
        c.values[0] = f64::NAN;
        for (k, v) in c.values.iter_mut().enumerate().skip(1) {
            *v += v0 * (k as f64 * series.dt).powf(-alpha) * g;
        }
    }
    Ok(c)
}

/// Relative residual of I^α I^β φ = I^{α+β} φ.
pub fn check_semigroup(series: &TimeSeries, alpha: f64, beta: f64) -> Result<f64> {
    let lhs = rl_integral(&rl_integral(series, beta)?, alpha)?;
    let rhs = rl_integral(series, alpha + beta)?;
    Ok(lhs.relative_distance(&rhs))
}

/// Relative residual of I^α ∂^α u = u; needs u(0) = 0.
pub fn inverse_residual(series: &TimeSeries, alpha: f64) -> Result<f64> {
    if series.values[0] != 0.0 {
        return config("I^α ∂^α u = u is checked for u(0) = 0");
    }
    let back = rl_integral(&caputo(series, alpha)?, alpha)?;
    Ok(back.relative_distance(series))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mittag_leffler::ml;
    use std::f64::consts::PI;

    fn max_rel(a: &TimeSeries, f: impl Fn(f64) -> f64, from: usize) -> f64 {
        a.times()
            .iter()
            .zip(&a.values)
            .skip(from)
            .map(|(t, v)| ((v - f(*t)) / f(*t)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn integral_closed_forms() {
        let one = TimeSeries::on_interval(1.0, 1000, |_| 1.0).unwrap();
        let i = rl_integral(&one, 0.5).unwrap();
        assert!(max_rel(&i, |t| 2.0 * (t / PI).sqrt(), 1) < 1e-12);
        let lin = TimeSeries::on_interval(1.0, 1000, |t| t).unwrap();
        let i = rl_integral(&lin, 1.0).unwrap();
        assert!(max_rel(&i, |t| t * t / 2.0, 1) < 1e-12);
        // I^{0.7} t^{0.3} = Γ(1.3)/Γ(2)·t
        let s = TimeSeries::on_interval(1.0, 1000, |t| t.powf(0.3)).unwrap();
        let i = rl_integral(&s, 0.7).unwrap();
        assert!(max_rel(&i, |t| gamma(1.3) * t, 100) < 1e-3);
        assert!(rl_integral(&s, 0.0).is_err());
    }

    #[test]
    fn caputo_closed_forms() {
        let lin = TimeSeries::on_interval(1.0, 1000, |t| t).unwrap();
        let d = caputo(&lin, 0.5).unwrap();
        assert!(max_rel(&d, |t| t.sqrt() / gamma(1.5), 1) < 1e-12);
        let c = TimeSeries::on_interval(1.0, 100, |_| 3.0).unwrap();
        assert!(caputo(&c, 0.4).unwrap().values.iter().all(|v| *v == 0.0));
        // E_{α,1}(−t^α) is an eigenfunction: ∂^α φ = −φ
        for alpha in [1.0 / 3.0, 0.5, 2.0 / 3.0] {
            let phi = TimeSeries::on_interval(1.0, 1000, |t| ml(alpha, 1.0, -t.powf(alpha)).unwrap()).unwrap();
            let d = caputo(&phi, alpha).unwrap();
            // the t^α singularity leaves an initial layer of O(Δt·t^{α−1})
            let late = d.values.iter().zip(&phi.values).skip(50).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max);
            assert!(late < 1e-3, "alpha={alpha} {late}");
        }
    }

    #[test]
    fn rl_derivative_of_constant() {
        let c = TimeSeries::on_interval(1.0, 100, |_| 1.0).unwrap();
        let d = rl_derivative(&c, 0.5).unwrap();
        assert!(d.values[0].is_nan());
        assert!((d.values[100] - 1.0 / PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn composition_identities() {
        let lin = TimeSeries::on_interval(1.0, 1000, |t| t).unwrap();
        assert!(check_semigroup(&lin, 0.5, 0.5).unwrap() < 1e-4);
        let s = TimeSeries::on_interval(1.0, 1000, f64::sin).unwrap();
        let i = rl_integral(&rl_integral(&s, 0.3).unwrap(), 0.7).unwrap();
        let exact = TimeSeries::on_interval(1.0, 1000, |t| 1.0 - t.cos()).unwrap();
        assert!(i.relative_distance(&exact) < 1e-4);
        assert!(check_semigroup(&s, 0.3, 0.7).unwrap() < 1e-4);
        let sq = TimeSeries::on_interval(1.0, 1000, |t| t * t).unwrap();
        assert!(inverse_residual(&sq, 0.5).unwrap() < 1e-4);
        assert!(inverse_residual(&TimeSeries::on_interval(1.0, 10, |_| 1.0).unwrap(), 0.5).is_err());
    }

    #[test]
    fn l1_order_on_square() {
        // ∂^α t² = 2t^{2−α}/Γ(3−α)
        for alpha in [0.3, 0.5, 0.7] {
            let err = |n: usize| {
                let s = TimeSeries::on_interval(1.0, n, |t| t * t).unwrap();
                let d = caputo(&s, alpha).unwrap();
                (d.values[n] - 2.0 / gamma(3.0 - alpha)).abs()
            };
            let order = (err(800) / err(1600)).log2();
            assert!(order >= 2.0 - alpha - 0.02, "alpha={alpha} order={order}");
            if alpha < 0.5 {
                assert!(order >= 1.5);
            }
        }
    }
}
