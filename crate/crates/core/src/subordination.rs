//! Inverse α-stable subordinator: density of Q₁, density φ(t, r) of R_t,
//! its fractional time derivatives φ_{α,β}, Monte-Carlo oracles and the
//! subordination integral ∫ p(r) φ(t, r) dr.

use crate::error::{config, numeric, Result};
use crate::quad::{adaptive_points, check};
use crate::report::{spread, BoundReport, Sample, Verdict};
use crate::special::{gamma, ln_gamma};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Absolute truncation target of [`subordinate`].
pub const SUBORDINATE_TOL: f64 = 1e-6;
/// Relative agreement of successive Grünwald–Letnikov refinements.
pub const GL_TOL: f64 = 1e-4;
/// Sup-CDF distance accepted by the Monte-Carlo gate.
pub const KS_TOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubordinatorSpec {
    pub alpha: f64,
}

impl SubordinatorSpec {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return config(format!("alpha = {alpha} outside (0, 1)"));
        }
        Ok(SubordinatorSpec { alpha })
    }
}

/// φ_{α,β} = D_t^{β−α} φ for β ∈ {α, 1}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiFamily {
    pub spec: SubordinatorSpec,
    pub beta: f64,
}

impl PhiFamily {
    pub fn new(spec: SubordinatorSpec, beta: f64) -> Result<Self> {
        if beta != spec.alpha && beta != 1.0 {
            return config(format!("φ_(α,β) supported for β = α or β = 1, got β = {beta}"));
        }
        Ok(PhiFamily { spec, beta })
    }

    pub fn eval(&self, t: f64, r: f64) -> Result<f64> {
        phi_beta(self.spec.alpha, self.beta, t, r)
    }
}

/// ln of Kanter's function A(θ) = sin(αθ)^{α/(1−α)} sin((1−α)θ) / sin(θ)^{1/(1−α)}.
fn ln_kanter(alpha: f64, theta: f64) -> f64 {
    let k = 1.0 / (1.0 - alpha);
    if theta < 1e-8 {
        return alpha * k * alpha.ln() + (1.0 - alpha).ln();
    }
    alpha * k * (alpha * theta).sin().ln() + ((1.0 - alpha) * theta).sin().ln() - k * theta.sin().ln()
}

/// θ ∈ (0, π) with x·A(θ) = 1 (A is increasing), or None when x·A(0) ≥ 1.
fn kanter_peak(alpha: f64, x: f64) -> Option<f64> {
    let target = -x.ln();
    if ln_kanter(alpha, 0.0) >= target {
        return None;
    }
    let (mut lo, mut hi) = (0.0, PI);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ln_kanter(alpha, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn kanter_integral<F: Fn(f64) -> f64>(alpha: f64, x: f64, f: F) -> Result<f64> {
    let mut pts = vec![0.0];
    if let Some(p) = kanter_peak(alpha, x) {
        let w = (PI - p).min(p);
        for q in [p - 0.5 * w, p, p + 0.5 * w] {
            if q > pts[pts.len() - 1] && q < PI {
                pts.push(q);
            }
        }
    }
    pts.push(PI);
    let mut g = |th: f64| {
        let la = ln_kanter(alpha, th);
        let xa = x * la.exp();
        if !xa.is_finite() || xa > 745.0 {
            0.0
        } else {
            f(la) * (-xa).exp()
        }
    };
    let q = adaptive_points(&mut g, &pts, 1e-300, 1e-11, 4000);
    Ok(check(q, 1e-300, 1e-11)? / PI)
}

/// Convergent series g_α(s) = π⁻¹ Σ_{k≥1} (−1)^{k+1} Γ(kα+1)/k! s^{−kα−1} sin(kπα),
/// used when s^{−α} is small.
fn stable_density_series(alpha: f64, s: f64) -> Option<f64> {
    let ls = s.ln();
    let mut sum = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let lt = ln_gamma(kf * alpha + 1.0) - ln_gamma(kf + 1.0) - (kf * alpha + 1.0) * ls;
        let term = lt.exp() * (kf * PI * alpha).sin();
        sum += if k % 2 == 1 { term } else { -term };
        if lt.exp() < 1e-17 * sum.abs() {
            return Some(sum / PI);
        }
    }
    None
}

/// Density g_α of Q₁ (E e^{−λQ₁} = e^{−λ^α}).
pub fn stable_density(alpha: f64, s: f64) -> Result<f64> {
    SubordinatorSpec::new(alpha)?;
    if !(s > 0.0) {
        return config(format!("stable density needs s > 0, got {s}"));
    }
    if alpha == 0.5 {
        return Ok((-0.25 / s).exp() / (2.0 * PI.sqrt() * s.powf(1.5)));
    }
    if s.powf(-alpha) < 0.05 {
        if let Some(v) = stable_density_series(alpha, s) {
            return Ok(v);
        }
    }
    let k = 1.0 / (1.0 - alpha);
    let x = s.powf(-alpha * k);
    if !x.is_finite() || x > 1e300 {
        return Ok(0.0);
    }
    let v = kanter_integral(alpha, x, |la| la.exp())?;
    Ok(alpha * k * s.powf(-k) * v)
}

/// P(Q₁ ≤ s).
pub fn stable_cdf(alpha: f64, s: f64) -> Result<f64> {
    SubordinatorSpec::new(alpha)?;
    if s <= 0.0 {
        return Ok(0.0);
    }
    if alpha == 0.5 {
        return Ok(erfc_half(s));
    }
    let x = s.powf(-alpha / (1.0 - alpha));
    if !x.is_finite() || x > 1e300 {
        return Ok(0.0);
    }
    kanter_integral(alpha, x, |_| 1.0)
}

/// P(Q₁ ≤ s) for α = 1/2: erfc(1/(2√s)).
fn erfc_half(s: f64) -> f64 {
    erfc(0.5 / s.sqrt())
}

/// Complementary error function (Numerical Recipes' erfcc refined with a
/// continued fraction for large arguments, ~1e-15 relative).
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.5 {
        // series for erf
        let mut term = x;
        let mut sum = x;
        let x2 = x * x;
        let mut n = 0.0;
        while term.abs() > 1e-17 * sum.abs() {
            n += 1.0;
            term *= -x2 / n;
            sum += term / (2.0 * n + 1.0);
        }
        return 1.0 - 2.0 / PI.sqrt() * sum;
    }
    // Lentz continued fraction erfc(x) = e^{−x²}/√π · 1/(x + 1/2/(x + 1/(x + 3/2/(x + …))))
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..300 {
        let a = 0.5 * n as f64;
        d = x + a * d;
        d = if d.abs() < tiny { tiny } else { d };
        c = x + a / c;
        c = if c.abs() < tiny { tiny } else { c };
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

/// Density of R_t: φ(t, r) = (t/α) r^{−1−1/α} g_α(t r^{−1/α}); 0 at t = 0.
pub fn phi(alpha: f64, t: f64, r: f64) -> Result<f64> {
    SubordinatorSpec::new(alpha)?;
    if !(r > 0.0) || t < 0.0 {
        return config(format!("φ needs t ≥ 0 and r > 0, got t = {t}, r = {r}"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let s = t * r.powf(-1.0 / alpha);
    if s == 0.0 {
        return Ok(0.0);
    }
    let v = t / alpha * r.powf(-1.0 - 1.0 / alpha) * stable_density(alpha, s)?;
    Ok(if v.is_finite() { v } else { 0.0 })
}

/// P(R_t > r) = P(Q₁ < t r^{−1/α}).
pub fn phi_tail(alpha: f64, t: f64, r: f64) -> Result<f64> {
    stable_cdf(alpha, t * r.powf(-1.0 / alpha))
}

/// P(R_t ≤ r).
pub fn phi_cdf(alpha: f64, t: f64, r: f64) -> Result<f64> {
    Ok(1.0 - phi_tail(alpha, t, r)?)
}

/// Riemann–Liouville derivative of order γ ∈ (0, 1) at t of a function
/// vanishing at 0, by Grünwald–Letnikov sums on nested grids with
/// first-order Richardson extrapolation; stops when two successive
/// extrapolated values agree to [`GL_TOL`].
pub fn grunwald_letnikov<F: FnMut(f64) -> Result<f64>>(mut f: F, t: f64, gamma_order: f64) -> Result<f64> {
    let mut n = 32usize;
    let mut vals: Vec<f64> = Vec::with_capacity(n + 1);
    for j in 0..=n {
        vals.push(f(t * j as f64 / n as f64)?);
    }
    let gl = |vals: &[f64], n: usize| {
        let h = t / n as f64;
        let mut w = 1.0;
        let mut s = w * vals[n];
        for k in 1..=n {
            w *= 1.0 - (gamma_order + 1.0) / k as f64;
            s += w * vals[n - k];
        }
        s * h.powf(-gamma_order)
    };
    let mut d_prev = gl(&vals, n);
    let mut r_prev = f64::NAN;
    while n < (1 << 18) {
        let m = 2 * n;
        let mut fine = Vec::with_capacity(m + 1);
        for j in 0..=m {
            if j % 2 == 0 {
                fine.push(vals[j / 2]);
            } else {
                fine.push(f(t * j as f64 / m as f64)?);
            }
        }
        let d = gl(&fine, m);
        let r = 2.0 * d - d_prev;
        if (r - r_prev).abs() <= GL_TOL * r.abs() || (r == 0.0 && r_prev == 0.0) {
            return Ok(r);
        }
        vals = fine;
        n = m;
        d_prev = d;
        r_prev = r;
    }
    numeric(format!("Grünwald–Letnikov derivative at t = {t} did not settle"))
}

/// φ_{α,β}(t, r) for β = α (φ itself) or β = 1. For β = 1 the Laplace
/// transform λ^{α−1}e^{−rλ^α} of φ(·, r) gives D_t^{1−α}φ(·, r) as the
/// density of Q_r at t, r^{−1/α} g_α(t r^{−1/α}).
pub fn phi_beta(alpha: f64, beta: f64, t: f64, r: f64) -> Result<f64> {
    PhiFamily::new(SubordinatorSpec::new(alpha)?, beta)?;
    if beta == alpha {
        return phi(alpha, t, r);
    }
    if !(r > 0.0 && t > 0.0) {
        return config(format!("φ_(α,1) needs t, r > 0, got t = {t}, r = {r}"));
    }
    let s = t * r.powf(-1.0 / alpha);
    if s == 0.0 {
        return Ok(0.0);
    }
    let v = r.powf(-1.0 / alpha) * stable_density(alpha, s)?;
    Ok(if v.is_finite() { v } else { 0.0 })
}

/// D_t^{1−α}φ(·, r)(t) by Grünwald–Letnikov differencing. Settles when
/// r t^{−α} is not small; below that φ(·, r) is close to s^{−α}/Γ(1−α),
/// whose derivative of order 1 − α vanishes, and the sums cancel.
pub fn phi_one_gl(alpha: f64, t: f64, r: f64) -> Result<f64> {
    SubordinatorSpec::new(alpha)?;
    grunwald_letnikov(|s| phi(alpha, s, r), t, 1.0 - alpha)
}

/// Samples of Q₁ by Kanter's representation (A(U)/E)^{(1−α)/α}.
pub fn sample_stable<R: Rng>(alpha: f64, rng: &mut R) -> f64 {
    let u = PI * (1.0 - rng.random::<f64>());
    let e = -(1.0 - rng.random::<f64>()).ln();
    ((ln_kanter(alpha, u) - e.ln()) * (1.0 - alpha) / alpha).exp()
}

/// n samples of R_t = (t/Q₁)^α from a seeded stream.
pub fn sample_inverse_subordinator(spec: SubordinatorSpec, t: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (t / sample_stable(spec.alpha, &mut rng)).powf(spec.alpha))
        .collect()
}

/// First passage of Q above t along simulated paths with steps dr; each
/// value overestimates R_t by less than dr.
pub fn pathwise_inverse_subordinator(spec: SubordinatorSpec, t: f64, dr: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = dr.powf(1.0 / spec.alpha);
    (0..n)
        .map(|_| {
            let mut q = 0.0;
            let mut k = 0u64;
            while q <= t {
                q += step * sample_stable(spec.alpha, &mut rng);
                k += 1;
            }
            k as f64 * dr
        })
        .collect()
}

/// Sup distance between the empirical CDF of `samples` and P(R_t ≤ ·),
/// evaluated at `probes` empirical quantiles.
pub fn ks_distance(spec: SubordinatorSpec, t: f64, samples: &[f64], probes: usize) -> Result<f64> {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    let mut worst = 0.0f64;
    for i in 1..probes {
        let idx = i * n / probes;
        let f = phi_cdf(spec.alpha, t, s[idx])?;
        // the empirical CDF jumps from idx/n to (idx+1)/n at s[idx]
        let lo = idx as f64 / n as f64;
        let hi = (idx + 1) as f64 / n as f64;
        worst = worst.max((f - lo).abs()).max((f - hi).abs());
    }
    Ok(worst)
}

/// Monte-Carlo gate for φ: sup-CDF distance of 10^6-type samples against
/// the closed-form CDF must be below [`KS_TOL`].
pub fn monte_carlo_gate(spec: SubordinatorSpec, t: f64, n: usize, seed: u64) -> Result<BoundReport> {
    let samples = sample_inverse_subordinator(spec, t, n, seed);
    let ks = ks_distance(spec, t, &samples, 2000)?;
    let mut rep = BoundReport::new(format!("phi_monte_carlo[alpha={}, t={t}]", spec.alpha));
    rep.fit("ks", ks);
    rep.fit("samples", n as f64);
    let mean = samples.iter().sum::<f64>() / n as f64;
    let exact = t.powf(spec.alpha) / gamma(1.0 + spec.alpha);
    rep.fit("mean_rel_err", (mean / exact - 1.0).abs());
    rep.verdict = Verdict::from_bool(ks < KS_TOL);
    Ok(rep)
}

/// Fraction of samples in [r − w, r + w] divided by 2w.
pub fn empirical_density(samples: &[f64], r: f64, w: f64) -> f64 {
    let c = samples.iter().filter(|&&x| (x - r).abs() <= w).count();
    c as f64 / (samples.len() as f64 * 2.0 * w)
}

/// Fits, for each t, C_small in |φ_{α,β}| ≤ C r t^{−α−β} (β integer) or
/// C t^{−β} (otherwise) on r t^{−α} ≤ 1, and (C_large, c) in
/// |φ_{α,β}| ≤ C t^{−β} e^{−c (r t^{−α})^{1/(1−α)}} on r t^{−α} ≥ 1.
/// Passes iff all constants are finite, c > 0 and max/min of each C across
/// t is below 3.
pub fn check_phi_bounds(spec: SubordinatorSpec, beta: f64, t_list: &[f64], points: usize) -> Result<BoundReport> {
    let fam = PhiFamily::new(spec, beta)?;
    let a = spec.alpha;
    let p = 1.0 / (1.0 - a);
    let integer = beta == 1.0;
    let mut rep = BoundReport::new(format!("phi_bounds[alpha={a}, beta={beta}]"));
    let (mut cs, mut cl, mut rates) = (Vec::new(), Vec::new(), Vec::new());
    let w_max = 30.0;
    for &t in t_list {
        let mut c_small = 0.0f64;
        for i in 0..points {
            let z = 10f64.powf(-3.0 + 3.0 * i as f64 / (points - 1) as f64);
            let r = z * t.powf(a);
            let v = fam.eval(t, r)?.abs();
            let bound = if integer { r * t.powf(-a - beta) } else { t.powf(-beta) };
            c_small = c_small.max(v / bound);
            if i % 4 == 0 {
                rep.samples.push(Sample::new(&[("t", t), ("r", r)], v / bound));
            }
        }
        let mut ws = Vec::new();
        let mut ys = Vec::new();
        for i in 0..points {
            let w = 1.0 + (w_max - 1.0) * i as f64 / (points - 1) as f64;
            let r = w.powf(1.0 / p) * t.powf(a);
            let v = fam.eval(t, r)?.abs() * t.powf(beta);
            if v > 0.0 {
                ws.push(w);
                ys.push(v.ln());
            }
        }
        let n = ws.len() as f64;
        let (mw, my) = (ws.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = ws.iter().zip(&ys).map(|(w, y)| (w - mw) * (y - my)).sum();
        let sxx: f64 = ws.iter().map(|w| (w - mw).powi(2)).sum();
        let c = -sxy / sxx;
        let c_large = ws.iter().zip(&ys).map(|(w, y)| (y + c * w).exp()).fold(0.0, f64::max);
        rep.fit(&format!("C_small[t={t}]"), c_small);
        rep.fit(&format!("C_large[t={t}]"), c_large);
        rep.fit(&format!("c[t={t}]"), c);
        cs.push(c_small);
        cl.push(c_large);
        rates.push(c);
    }
    let (ss, sl) = (spread(&cs), spread(&cl));
    rep.fit("C_small_spread", ss);
    rep.fit("C_large_spread", sl);
    let ok = ss < 3.0 && sl < 3.0 && rates.iter().all(|c| *c > 0.0 && c.is_finite());
    rep.verdict = Verdict::from_bool(ok);
    Ok(rep)
}

/// ∫_0^∞ p(r) φ(t, r) dr. `p_bound` bounds |p| beyond the cut-off, which
/// is pushed out until p_bound·P(R_t > R) < 10^−7.
pub fn subordinate<P: FnMut(f64) -> f64>(mut p: P, p_bound: f64, alpha: f64, t: f64) -> Result<f64> {
    SubordinatorSpec::new(alpha)?;
    if !(t > 0.0) {
        return config("subordination needs t > 0");
    }
    let scale = t.powf(alpha);
    let mut cut = scale;
    let mut tries = 0;
    while p_bound * phi_tail(alpha, t, cut)? >= 0.1 * SUBORDINATE_TOL {
        cut *= 2.0;
        tries += 1;
        if tries > 200 {
            return numeric("subordination tail does not fall below the truncation target");
        }
    }
    let mut pts = vec![0.0];
    let mut b = scale * 1e-6;
    while b < cut {
        pts.push(b);
        b *= 10f64.sqrt();
    }
    pts.push(cut);
    let mut err = None;
    let mut g = |r: f64| match phi(alpha, t, r) {
        Ok(v) => v * p(r),
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    };
    let q = adaptive_points(&mut g, &pts, 0.01 * SUBORDINATE_TOL, 1e-9, 4000);
    if let Some(e) = err {
        return Err(e);
    }
    check(q, 0.01 * SUBORDINATE_TOL, 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    #[test]
    fn half_density_closed_form() {
        let g = stable_density(0.5, 1.0).unwrap();
        assert!((g - 0.219_695_644_733_861).abs() < 1e-12);
        assert!((phi(0.5, 1.0, 1.0).unwrap() - 0.439_391_289_467_722).abs() < 1e-12);
    }

    #[test]
    fn kanter_matches_closed_form_at_half() {
        let k = 2.0;
        for s in [0.05f64, 0.3, 1.0, 4.0, 50.0] {
            let x = s.powf(-0.5 * k);
            let v = 0.5 * k * s.powf(-k) * kanter_integral(0.5, x, |la| la.exp()).unwrap();
            let exact = (-0.25 / s).exp() / (2.0 * PI.sqrt() * s.powf(1.5));
            assert!((v / exact - 1.0).abs() < 1e-9, "s={s}");
        }
    }

    #[test]
    fn series_matches_kanter() {
        for alpha in [0.3, 0.6, 0.8] {
            for s in [1e3f64, 1e5] {
                let k = 1.0 / (1.0 - alpha);
                let x = s.powf(-alpha * k);
                let direct = alpha * k * s.powf(-k) * kanter_integral(alpha, x, |la| la.exp()).unwrap();
                let series = stable_density_series(alpha, s).unwrap();
                assert!((direct / series - 1.0).abs() < 1e-8, "alpha={alpha} s={s}");
            }
        }
    }

    #[test]
    fn density_normalization_and_laplace() {
        for alpha in [1.0 / 3.0, 0.5, 2.0 / 3.0] {
            let mass = integrate(|u: f64| stable_density(alpha, u.exp()).unwrap() * u.exp(), -12.0, 60.0, 1e-12, 1e-10).unwrap();
            assert!((mass - 1.0).abs() < 1e-6, "alpha={alpha} mass={mass}");
            let lap = integrate(
                |u: f64| {
                    let s = u.exp();
                    (-s).exp() * stable_density(alpha, s).unwrap() * s
                },
                -12.0,
                5.0,
                1e-12,
                1e-10,
            )
            .unwrap();
            assert!((lap - (-1f64).exp()).abs() < 1e-6, "alpha={alpha}");
            // CDF consistency at one point
            let c = stable_cdf(alpha, 2.0).unwrap();
            let d = integrate(|u: f64| stable_density(alpha, u.exp()).unwrap() * u.exp(), -12.0, 2f64.ln(), 1e-13, 1e-11).unwrap();
            assert!((c - d).abs() < 1e-8);
        }
    }

    #[test]
    fn phi_mass_and_mean() {
        for alpha in [1.0 / 3.0, 0.5, 2.0 / 3.0] {
            for t in [0.25, 1.0, 4.0] {
                let m = integrate(|u: f64| phi(alpha, t, u.exp()).unwrap() * u.exp(), -30.0, 6.0, 1e-12, 1e-10).unwrap();
                assert!((m - 1.0).abs() < 1e-5);
                let mean = integrate(|u: f64| phi(alpha, t, u.exp()).unwrap() * (2.0 * u).exp(), -30.0, 6.0, 1e-12, 1e-10).unwrap();
                let exact = t.powf(alpha) / gamma(1.0 + alpha);
                assert!((mean / exact - 1.0).abs() < 1e-2);
            }
        }
    }

    #[test]
    fn erfc_values() {
        assert!((erfc(1.0) - 0.157_299_207_050_285_13).abs() < 1e-15);
        assert!((erfc(3.0) / 2.209_049_699_858_544e-5 - 1.0).abs() < 1e-13);
        assert!((erfc(0.1) - 0.887_537_083_981_715_1).abs() < 1e-15);
    }

    #[test]
    fn gl_derivative_matches_density_of_q_r() {
        // D^{1−α}φ(·, r)(t) = r^{−1/α} g_α(t r^{−1/α}), the density of Q_r at t
        let alpha = 0.5;
        for (t, r) in [(1.0, 0.5), (1.0, 2.0), (2.0, 1.0)] {
            let v = phi_one_gl(alpha, t, r).unwrap();
            let exact = r.powf(-1.0 / alpha) * stable_density(alpha, t * r.powf(-1.0 / alpha)).unwrap();
            assert!((v / exact - 1.0).abs() < 1e-3, "t={t} r={r} v={v} exact={exact}");
        }
        assert_eq!(phi_beta(alpha, alpha, 1.0, 1.0).unwrap(), phi(alpha, 1.0, 1.0).unwrap());
        assert!(phi_beta(alpha, 0.7, 1.0, 1.0).is_err());
    }

    #[test]
    fn subordinate_constant_is_one() {
        let v = subordinate(|_| 1.0, 1.0, 0.5, 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
    }

    #[test]
    fn small_monte_carlo_runs() {
        let spec = SubordinatorSpec::new(0.5).unwrap();
        let rep = monte_carlo_gate(spec, 1.0, 20_000, 7).unwrap();
        assert!(rep.fitted_value("ks").unwrap() < 0.02);
        let again = monte_carlo_gate(spec, 1.0, 20_000, 7).unwrap();
        assert_eq!(rep.fitted_value("ks"), again.fitted_value("ks"));
    }
}
