//! Quadrature rules: fixed Gauss–Legendre panels, adaptive Gauss–Kronrod and
//! series acceleration for oscillatory tails.

use crate::error::{numeric, Result};
use std::sync::OnceLock;

/// Nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// ∫_a^b f.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub fn gl8() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(8))
}

pub fn gl16() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(16))
}

pub fn gl32() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(32))
}

/// ∫_a^b f(s) ds for 0 < a < b after s = e^w, one panel per `1/per_decade` decade.
pub fn log_panels<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    per_decade: f64,
    rule: &GaussLegendre,
) -> f64 {
    assert!(a > 0.0 && b >= a);
    if a == b {
        return 0.0;
    }
    let (wa, wb) = (a.ln(), b.ln());
    let width = std::f64::consts::LN_10 / per_decade;
    let n = ((wb - wa) / width).ceil().max(1.0) as usize;
    let step = (wb - wa) / n as f64;
    let mut total = 0.0;
    for k in 0..n {
        let lo = wa + step * k as f64;
        total += rule.integrate(
            |w| {
                let s = w.exp();
                f(s) * s
            },
            lo,
            lo + step,
        );
    }
    total
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = WK[7] * fc;
    let mut rg = WG[3] * fc;
    for j in 0..7 {
        let x = h * XK[j];
        let s = f(c - x) + f(c + x);
        rk += WK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    let err = ((rk - rg) * h).abs();
    (rk * h, err)
}

/// Globally adaptive 7–15 Gauss–Kronrod on [a, b] with finite endpoints.
/// Stops when the summed error estimate is below max(abs_tol, rel_tol·|I|).
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Quad {
    adaptive_points(&mut f, &[a, b], abs_tol, rel_tol, 4000)
}

/// As [`adaptive`], seeded with the breakpoints in `points` (sorted).
pub fn adaptive_points<F: FnMut(f64) -> f64>(
    f: &mut F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Quad {
    let mut ivs: Vec<(f64, f64, f64, f64)> = Vec::new();
    let mut evals = 0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (v, e) = gk15(f, w[0], w[1]);
            evals += 15;
            ivs.push((w[0], w[1], v, e));
        }
    }
    loop {
        let total: f64 = ivs.iter().map(|iv| iv.2).sum();
        let err: f64 = ivs.iter().map(|iv| iv.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) || ivs.len() >= max_intervals {
            return Quad {
                value: total,
                error: err,
                evals,
            };
        }
        let (idx, _) = ivs
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, iv)| if iv.3 > acc.1 { (i, iv.3) } else { acc });
        let (lo, hi, _, _) = ivs.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            return Quad {
                value: total,
                error: err,
                evals,
            };
        }
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        evals += 30;
        ivs.push((lo, mid, v1, e1));
        ivs.push((mid, hi, v2, e2));
    }
}

/// Adaptive integration that fails when the tolerance is not met.
pub fn integrate<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    let q = adaptive(f, a, b, abs_tol, rel_tol);
    check(q, abs_tol, rel_tol)
}

pub(crate) fn check(q: Quad, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if !q.value.is_finite() {
        return numeric(format!("quadrature produced {}", q.value));
    }
    // allow a modest safety factor: the Kronrod estimate is pessimistic
    if q.error > 100.0 * abs_tol.max(rel_tol * q.value.abs()) {
        return numeric(format!(
            "quadrature did not converge: value {:.6e}, error estimate {:.3e}, {} evaluations",
            q.value, q.error, q.evals
        ));
    }
    Ok(q.value)
}

/// Wynn's epsilon algorithm on a sequence of partial sums; returns the
/// accelerated limit estimate.
pub fn wynn_epsilon(partial: &[f64]) -> f64 {
    let n = partial.len();
    if n < 3 {
        return *partial.last().unwrap_or(&0.0);
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = partial.to_vec();
    let mut best = partial[n - 1];
    let mut best_err = (partial[n - 1] - partial[n - 2]).abs();
    let mut last_even = partial[n - 1];
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            let scale = cur[i + 1].abs().max(cur[i].abs());
            if col % 2 == 0 && diff.abs() <= 1e-15 * scale {
                // converged to rounding; deeper columns are noise
                return if diff.abs() < best_err { cur[i + 1] } else { best };
            }
            next.push(prev[i + 1] + 1.0 / diff);
        }
        col += 1;
        if col % 2 == 0 {
            match next.last() {
                Some(&v) if v.is_finite() => {
                    let err = (v - last_even).abs();
                    if err < best_err {
                        best = v;
                        best_err = err;
                    }
                    last_even = v;
                }
                _ => break,
            }
        }
        prev = cur;
        cur = next;
    }
    best
}

/// Panels per decade used by [`log_integral`].
pub const LOG_PANELS: f64 = 8.0;

/// ∫_a^b f(t) dt for 0 ≤ a < b ≤ ∞ on GL16 panels in ln t, aligned to the
/// grid 10^{j/8} and split at `breaks`. An open end (a = 0 or b = ∞) is
/// approached panel by panel until a panel adds less than 1e-13 of the
/// total; the remainder is closed by the geometric series of the last two
/// panels. Fails when the end contributions do not decay.
pub fn log_integral<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, breaks: &[f64]) -> Result<f64> {
    log_integral_impl(&mut f, a, b, breaks, 1e-13)
}

/// [`log_integral`] with open ends closed once a panel adds less than
/// `tol` of the total.
pub fn log_integral_tol<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> Result<f64> {
    log_integral_impl(&mut f, a, b, breaks, tol)
}

fn log_integral_impl(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64) -> Result<f64> {
    if !(a >= 0.0 && b > a) {
        return numeric(format!("log_integral: bad interval [{a}, {b}]"));
    }
    if a == 0.0 && b == f64::INFINITY {
        let lo = log_integral_impl(f, 0.0, 1.0, breaks, tol)?;
        let hi = log_integral_impl(f, 1.0, f64::INFINITY, breaks, tol)?;
        return Ok(lo + hi);
    }
    let step = std::f64::consts::LN_10 / LOG_PANELS;
    let rule = gl16();
    let panel = |f: &mut dyn FnMut(f64) -> f64, wa: f64, wb: f64| {
        rule.integrate(
            |w| {
                let t = w.exp();
                f(t) * t
            },
            wa,
            wb,
        )
    };
    let wa = if a > 0.0 { a.ln() } else { f64::NEG_INFINITY };
    let wb = if b.is_finite() { b.ln() } else { f64::INFINITY };
    let lo_f = if a > 0.0 { wa } else { wb };
    let hi_f = if b.is_finite() { wb } else { wa };
    // finite core [lo_f, hi_f] (empty when one end is open)
    let mut cuts: Vec<f64> = vec![lo_f, hi_f];
    if hi_f > lo_f {
        let j0 = (lo_f / step).floor() as i64 + 1;
        let j1 = (hi_f / step).ceil() as i64 - 1;
        for j in j0..=j1 {
            cuts.push(j as f64 * step);
        }
        for &t in breaks {
            if t > 0.0 && t.ln() > lo_f && t.ln() < hi_f {
                cuts.push(t.ln());
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-13);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            total += panel(f, w[0], w[1]);
        }
    }
    let open: Option<(f64, f64)> = if a == 0.0 {
        Some((wb, -1.0))
    } else if b == f64::INFINITY {
        Some((wa, 1.0))
    } else {
        None
    };
    if let Some((start, dir)) = open {
        let mut edge = start;
        // first step to the aligned grid
        let aligned = if dir < 0.0 {
            ((edge / step).ceil() - 1.0) * step
        } else {
            ((edge / step).floor() + 1.0) * step
        };
        let mut next = aligned;
        let mut prev = f64::NAN;
        let mut n = 0;
        loop {
            let c = if dir < 0.0 {
                panel(f, next, edge)
            } else {
                panel(f, edge, next)
            };
            if !c.is_finite() {
                return numeric(format!("log_integral: panel value {c} near t = {:.3e}", next.exp()));
            }
            total += c;
            n += 1;
            if n > 2 * LOG_PANELS as usize && c.abs() <= tol * total.abs() {
                let q = c / prev;
                if q.is_finite() && q.abs() < 1.0 {
                    total += c * q / (1.0 - q);
                }
                return Ok(total);
            }
            if n > 400 * LOG_PANELS as usize {
                return numeric(format!(
                    "log_integral: contributions at the open end do not decay (last panel {c:.3e}, total {total:.3e})"
                ));
            }
            prev = c;
            edge = next;
            next = edge + dir * step;
        }
    }
    Ok(total)
}
