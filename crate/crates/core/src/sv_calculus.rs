//! Slowly varying intensities ℓ: a catalog of closed forms and tabulated
//! profiles, the weak scaling check, the class-𝒢 statistic, route
//! classification, closure generators and the strictly increasing envelope.

use crate::error::{config, Error, Result};
use crate::kernel_scales::KernelScales;
use crate::quad::gl16;
use crate::report::{spread, BoundReport, Verdict};
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, LN_10, PI};

/// Grid density used by every log-spaced sweep in this module.
pub const PER_DECADE: usize = 64;
/// Values of `a` sampled by the class-𝒢 checker.
pub const CLASS_G_A: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
/// Nested windows r_max for the stabilization test.
pub const CLASS_G_WINDOWS: [f64; 3] = [1e4, 1e6, 1e8];
/// Relative growth between the last two windows below which ℓ is in 𝒢.
pub const CLASS_G_TOL: f64 = 0.01;
/// Relative growth above which ℓ is declared outside 𝒢.
pub const NOT_IN_G_GROWTH: f64 = 0.1;
/// Allowed drift of fitted constants between nested windows.
pub const DRIFT_TOL: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Bounded,
    HComparable,
    ClassG,
    /// No route applies (or, as a declaration, the route is unknown).
    None,
}

/// Scaling exponents: `large` = (δ₁, δ₂) on [1,∞), `small` = (δ₃, δ₄) on (0,1].
/// Profiles that only make sense at infinity carry `small = None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exponents {
    pub large: [f64; 2],
    pub small: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Power(f64),
    Const(f64),
    /// r^γ ∧ 1.
    LogCapped(f64),
    /// exp((log(1+r))^b) − 1.
    ExpLogPow(f64),
    /// ∏ ℓ_k(r)^b over (k, b) with ℓ_1 = log(1+r) and ℓ_{k+1} = log(1+ℓ_k).
    LogIterates(Vec<(u32, f64)>),
    /// base(r^b).
    PowerSubst(Box<Family>, f64),
    /// num / den.
    Divide(Box<Family>, Box<Family>),
    /// (shift + sin(r^freq + phase))·base(r).
    Oscillating {
        base: Box<Family>,
        shift: f64,
        phase: f64,
        freq: f64,
    },
    /// log-log linear interpolation, no extrapolation.
    Tabulated { ln_r: Vec<f64>, ln_v: Vec<f64> },
}

impl Family {
    /// Raw value; NaN outside a tabulated domain.
    pub fn value(&self, r: f64) -> f64 {
        match self {
            Family::Power(d) => r.powf(*d),
            Family::Const(c) => *c,
            Family::LogCapped(g) => r.powf(*g).min(1.0),
            Family::ExpLogPow(b) => r.ln_1p().powf(*b).exp_m1(),
            Family::LogIterates(terms) => {
                let mut out = 1.0;
                for &(k, b) in terms {
                    let mut x = r;
                    for _ in 0..k {
                        x = x.ln_1p();
                    }
                    out *= x.powf(b);
                }
                out
            }
            Family::PowerSubst(base, b) => base.value(r.powf(*b)),
            Family::Divide(n, d) => n.value(r) / d.value(r),
            Family::Oscillating {
                base,
                shift,
                phase,
                freq,
            } => (shift + (r.powf(*freq) + phase).sin()) * base.value(r),
            Family::Tabulated { ln_r, ln_v } => {
                let x = r.ln();
                let n = ln_r.len();
                if !(x >= ln_r[0] - 1e-12 && x <= ln_r[n - 1] + 1e-12) {
                    return f64::NAN;
                }
                let k = ln_r.partition_point(|&v| v <= x).clamp(1, n - 1);
                let w = (x - ln_r[k - 1]) / (ln_r[k] - ln_r[k - 1]);
                (ln_v[k - 1] + w * (ln_v[k] - ln_v[k - 1])).exp()
            }
        }
    }

    fn domain(&self) -> (f64, f64) {
        match self {
            Family::Tabulated { ln_r, .. } => (ln_r[0].exp(), ln_r[ln_r.len() - 1].exp()),
            Family::PowerSubst(base, b) => {
                let (lo, hi) = base.domain();
                (lo.powf(1.0 / b), hi.powf(1.0 / b))
            }
            Family::Divide(n, d) => {
                let (a, b) = n.domain();
                let (c, e) = d.domain();
                (a.max(c), b.min(e))
            }
            Family::Oscillating { base, .. } => base.domain(),
            _ => (0.0, f64::INFINITY),
        }
    }

    fn is_oscillating(&self) -> bool {
        matches!(self, Family::Oscillating { .. })
    }
}

/// Upper exponent declared at infinity for a slowly varying profile whose
/// growth is like a `power`-th power of a logarithm; keeps the maximizing
/// R of log(R)^power·R^{−δ} inside the first four decades.
fn slow_upper(power: f64) -> f64 {
    (power / 8.0).clamp(0.125, 0.95)
}

fn log_power(terms: &[(u32, f64)]) -> f64 {
    terms.iter().filter(|t| t.0 == 1).map(|t| t.1).sum::<f64>()
        + 0.5 * terms.iter().filter(|t| t.0 > 1).map(|t| t.1).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingProfile {
    pub name: String,
    pub family: Family,
    pub exponents: Exponents,
    pub declared_route: Route,
}

/// Catalog entries: (syntax, description, declared route).
pub const CATALOG: [(&str, &str, Route); 9] = [
    ("power:delta", "r^delta, 0 < delta <= 1", Route::HComparable),
    ("log", "log(1+r)", Route::ClassG),
    (
        "log-pow:b,c1,c2",
        "[log(1+r^b)]^c1 [log(1+log(1+r^b))]^c2",
        Route::ClassG,
    ),
    ("log-capped:gamma", "r^gamma ∧ 1", Route::Bounded),
    ("exp-log-pow:b", "exp((log(1+r))^b) - 1", Route::ClassG),
    ("sin-log", "(2+sin r) log(1+r)", Route::ClassG),
    ("const:c", "c (at infinity only)", Route::Bounded),
    (
        "iter-log-ratio",
        "log(1+log(1+r)) / log(1+log(1+log(1+r))) (at infinity only)",
        Route::ClassG,
    ),
    ("cos-iter-log", "(2+cos r) log(1+log(1+r))", Route::ClassG),
];

fn parse_params(spec: &str, args: Option<&str>, n: usize) -> Result<Vec<f64>> {
    let args = match (args, n) {
        (None, 0) => return Ok(Vec::new()),
        (Some(a), k) if k > 0 => a,
        _ => return config(format!("profile '{spec}' expects {n} parameter(s)")),
    };
    let vals: std::result::Result<Vec<f64>, _> =
        args.split(',').map(|s| s.trim().parse::<f64>()).collect();
    match vals {
        Ok(v) if v.len() == n && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => config(format!("profile '{spec}' expects {n} numeric parameter(s)")),
    }
}

impl ScalingProfile {
    pub fn new(
        name: impl Into<String>,
        family: Family,
        exponents: Exponents,
        declared_route: Route,
    ) -> Self {
        ScalingProfile {
            name: name.into(),
            family,
            exponents,
            declared_route,
        }
    }

    /// Parse a catalog name such as `log-pow:1,2,0.5`; checks parameter
    /// ranges and exponent admissibility (not the weak scaling sweep).
    pub fn from_catalog(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (head, args) = match spec.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (spec, None),
        };
        let p = |n| parse_params(spec, args, n);
        let profile = match head {
            "power" => {
                let d = p(1)?[0];
                if !(d > 0.0 && d <= 1.0) {
                    return config(format!("power exponent {d} outside (0, 1]"));
                }
                Self::new(
                    spec,
                    Family::Power(d),
                    Exponents {
                        large: [d, d],
                        small: Some([d, d]),
                    },
                    Route::HComparable,
                )
            }
            "log" => {
                p(0)?;
                Self::new(
                    spec,
                    Family::LogIterates(vec![(1, 1.0)]),
                    Exponents {
                        large: [0.0, slow_upper(1.0)],
                        small: Some([1.0, 1.0]),
                    },
                    Route::ClassG,
                )
            }
            "log-pow" => {
                let v = p(3)?;
                let (b, c1, c2) = (v[0], v[1], v[2]);
                if !(b > 0.0 && c1 > 0.0 && c2 > 0.0) {
                    return config("log-pow parameters must be positive");
                }
                let near = b * (c1 + c2);
                Self::new(
                    spec,
                    Family::PowerSubst(Box::new(Family::LogIterates(vec![(1, c1), (2, c2)])), b),
                    Exponents {
                        large: [0.0, slow_upper(c1 + 0.5 * c2)],
                        small: (near < 2.0).then_some([near, near]),
                    },
                    Route::ClassG,
                )
            }
            "log-capped" => {
                let g = p(1)?[0];
                if !(g > 0.0 && g < 2.0) {
                    return config(format!("log-capped exponent {g} outside (0, 2)"));
                }
                Self::new(
                    spec,
                    Family::LogCapped(g),
                    Exponents {
                        large: [0.0, 0.0],
                        small: Some([g, g]),
                    },
                    Route::Bounded,
                )
            }
            "exp-log-pow" => {
                let b = p(1)?[0];
                if !(b > 0.0 && b < 1.0) {
                    return config(format!("exp-log-pow exponent {b} outside (0, 1)"));
                }
                Self::new(
                    spec,
                    Family::ExpLogPow(b),
                    Exponents {
                        large: [0.0, slow_upper(1.0)],
                        small: Some([b, b]),
                    },
                    if b < 0.5 { Route::ClassG } else { Route::None },
                )
            }
            "sin-log" => {
                p(0)?;
                Self::new(
                    spec,
                    Family::Oscillating {
                        base: Box::new(Family::LogIterates(vec![(1, 1.0)])),
                        shift: 2.0,
                        phase: 0.0,
                        freq: 1.0,
                    },
                    Exponents {
                        large: [0.0, slow_upper(1.0)],
                        small: Some([1.0, 1.0]),
                    },
                    Route::ClassG,
                )
            }
            "const" => {
                let c = p(1)?[0];
                if !(c > 0.0) {
                    return config(format!("const value {c} must be positive"));
                }
                Self::new(
                    spec,
                    Family::Const(c),
                    Exponents {
                        large: [0.0, 0.0],
                        small: None,
                    },
                    Route::Bounded,
                )
            }
            "iter-log-ratio" => {
                p(0)?;
                Self::new(
                    spec,
                    Family::Divide(
                        Box::new(Family::LogIterates(vec![(2, 1.0)])),
                        Box::new(Family::LogIterates(vec![(3, 1.0)])),
                    ),
                    Exponents {
                        large: [0.0, slow_upper(0.5)],
                        small: None,
                    },
                    Route::ClassG,
                )
            }
            "cos-iter-log" => {
                p(0)?;
                Self::new(
                    spec,
                    Family::Oscillating {
                        base: Box::new(Family::LogIterates(vec![(2, 1.0)])),
                        shift: 2.0,
                        phase: FRAC_PI_2,
                        freq: 1.0,
                    },
                    Exponents {
                        large: [0.0, slow_upper(0.5)],
                        small: Some([1.0, 1.0]),
                    },
                    Route::ClassG,
                )
            }
            _ => return config(format!("unknown profile '{spec}'")),
        };
        profile.admissible()?;
        Ok(profile)
    }

    /// User-supplied table (r_i, ℓ_i), interpolated log-log linearly.
    pub fn tabulated(
        name: impl Into<String>,
        r: &[f64],
        values: &[f64],
        exponents: Exponents,
    ) -> Result<Self> {
        if r.len() < 2 || r.len() != values.len() {
            return config("tabulated profile needs at least two (r, value) pairs");
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) || !(r[0] > 0.0) {
            return config("tabulated r must be positive and strictly increasing");
        }
        if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return config("tabulated values must be positive and finite");
        }
        let p = Self::new(
            name,
            Family::Tabulated {
                ln_r: r.iter().map(|x| x.ln()).collect(),
                ln_v: values.iter().map(|x| x.ln()).collect(),
            },
            exponents,
            Route::None,
        );
        p.admissible()?;
        Ok(p)
    }

    /// Raw evaluation without domain checks.
    pub fn value(&self, r: f64) -> f64 {
        self.family.value(r)
    }

    /// Interval on which the profile may be evaluated.
    pub fn domain(&self) -> (f64, f64) {
        self.family.domain()
    }

    /// Whether the profile is defined with scaling exponents near zero.
    pub fn full_range(&self) -> bool {
        self.exponents.small.is_some()
    }

    /// Exponent constraints 0 ≤ δ₁ ≤ δ₂ ≤ 1 and 0 < δ₃ ≤ δ₄ < 2. The
    /// boundary δ₂ = 1 (the Cauchy intensity) is accepted.
    pub fn admissible(&self) -> Result<()> {
        let [d1, d2] = self.exponents.large;
        if !(0.0 <= d1 && d1 <= d2 && d2 <= 1.0) {
            return config(format!(
                "profile '{}': exponents at infinity ({d1}, {d2}) violate 0 <= d1 <= d2 <= 1",
                self.name
            ));
        }
        if let Some([d3, d4]) = self.exponents.small {
            if !(0.0 < d3 && d3 <= d4 && d4 < 2.0) {
                return config(format!(
                    "profile '{}': exponents near zero ({d3}, {d4}) violate 0 < d3 <= d4 < 2",
                    self.name
                ));
            }
        }
        Ok(())
    }

    /// Full validation: admissible exponents, positivity and a passing weak
    /// scaling sweep. Returns the sweep report.
    pub fn validate(&self) -> Result<BoundReport> {
        self.admissible()?;
        let (lo, hi) = self.domain();
        let grid: Vec<f64> = default_scaling_grid()
            .into_iter()
            .filter(|&r| r >= lo * (1.0 - 1e-12) && r <= hi * (1.0 + 1e-12))
            .collect();
        let report = check_weak_scaling(self, &grid)?;
        if !report.passed() {
            return config(format!(
                "profile '{}' fails the weak scaling check: {}",
                self.name,
                report.notes.join("; ")
            ));
        }
        Ok(report)
    }
}

/// ℓ(r) with domain and finiteness checks.
pub fn eval_ell(profile: &ScalingProfile, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Range(format!("ℓ evaluated at non-positive r = {r}")));
    }
    let (lo, hi) = profile.domain();
    if r < lo * (1.0 - 1e-12) || r > hi * (1.0 + 1e-12) {
        return Err(Error::Range(format!(
            "r = {r} outside the tabulated range [{lo}, {hi}] of '{}'",
            profile.name
        )));
    }
    let v = profile.value(r);
    if !v.is_finite() || v < 0.0 {
        return Err(Error::ProfileEval(format!(
            "'{}' evaluated to {v} at r = {r}",
            profile.name
        )));
    }
    Ok(v)
}

/// Log grid from 10^lo to 10^hi with `per_decade` points per decade.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let n = ((hi - lo) * per_decade as f64).round() as usize;
    (0..=n)
        .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / n as f64))
        .collect()
}

/// 10^−8 … 10^8 at [`PER_DECADE`].
pub fn default_scaling_grid() -> Vec<f64> {
    log_grid(-8.0, 8.0, PER_DECADE)
}

/// (min, max) over ordered pairs i ≤ j of (ℓ_j/ℓ_i)·(r_i/r_j)^δ for the two
/// exponents; returns (C_lower, C_upper).
fn pair_constants(r: &[f64], v: &[f64], lower: f64, upper: f64) -> (f64, f64) {
    let mut min_up = f64::INFINITY;
    let mut max_lo = f64::NEG_INFINITY;
    let mut c_lo = f64::INFINITY;
    let mut c_up = f64::NEG_INFINITY;
    for (x, y) in r.iter().zip(v) {
        let a = y.ln() - lower * x.ln();
        let b = y.ln() - upper * x.ln();
        max_lo = max_lo.max(a);
        min_up = min_up.min(b);
        c_lo = c_lo.min(a - max_lo);
        c_up = c_up.max(b - min_up);
    }
    (c_lo.exp(), c_up.exp())
}

struct Side {
    c_lower: f64,
    c_upper: f64,
    drift: f64,
}

fn scaling_side(
    profile: &ScalingProfile,
    r: &[f64],
    inner: &[f64],
    exps: [f64; 2],
) -> Result<Side> {
    let v: Vec<f64> = r.iter().map(|&x| eval_ell(profile, x)).collect::<Result<_>>()?;
    let vi: Vec<f64> = inner.iter().map(|&x| eval_ell(profile, x)).collect::<Result<_>>()?;
    if v.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::ProfileEval(format!(
            "'{}' is not strictly positive on the scaling grid",
            profile.name
        )));
    }
    let (lo, up) = pair_constants(r, &v, exps[0], exps[1]);
    let (lo_i, up_i) = pair_constants(inner, &vi, exps[0], exps[1]);
    Ok(Side {
        c_lower: lo,
        c_upper: up,
        drift: (up / up_i).max(lo_i / lo),
    })
}

fn decades(r: &[f64]) -> f64 {
    match (r.first(), r.last()) {
        (Some(a), Some(b)) => (b / a).log10(),
        _ => 0.0,
    }
}

/// Fitted C₁, C₂ on [1,∞) and C₃, C₄ on (0,1] over all ordered grid pairs.
/// Passes iff the constants are finite and positive, do not drift by more
/// than [`DRIFT_TOL`] between the inner half of the decades and the full
/// grid, and the declared exponents are admissible.
pub fn check_weak_scaling(profile: &ScalingProfile, r_grid: &[f64]) -> Result<BoundReport> {
    let mut large: Vec<f64> = r_grid.iter().copied().filter(|&r| r >= 1.0).collect();
    let mut small: Vec<f64> = r_grid.iter().copied().filter(|&r| r <= 1.0).collect();
    large.sort_by(f64::total_cmp);
    small.sort_by(f64::total_cmp);
    if decades(&large) < 4.0 - 1e-9 {
        return config("scaling grid must span at least 4 decades above 1");
    }
    if profile.full_range() && decades(&small) < 4.0 - 1e-9 {
        return config("scaling grid must span at least 4 decades below 1");
    }
    let mut rep = BoundReport::new(format!("weak_scaling[{}]", profile.name));
    let mut verdicts = Vec::new();
    if let Err(e) = profile.admissible() {
        rep.note(e.to_string());
        verdicts.push(Verdict::Fail);
    }
    if profile.exponents.large[1] >= 1.0 {
        rep.note("upper exponent at infinity equals 1 (boundary case)");
    }

    let top = *large.last().unwrap();
    let mid = top.sqrt();
    let inner: Vec<f64> = large.iter().copied().filter(|&r| r <= mid * (1.0 + 1e-12)).collect();
    let s = scaling_side(profile, &large, &inner, profile.exponents.large)?;
    rep.fit("c1", s.c_lower);
    rep.fit("c2", s.c_upper);
    rep.fit("drift_large", s.drift);
    let ok = s.c_lower > 0.0 && s.c_upper.is_finite() && s.drift <= DRIFT_TOL;
    if !ok {
        rep.note(format!(
            "constants at infinity drift by {:.3} (c1 = {:.4e}, c2 = {:.4e})",
            s.drift, s.c_lower, s.c_upper
        ));
    }
    verdicts.push(Verdict::from_bool(ok));

    if let Some(exps) = profile.exponents.small {
        let bottom = small[0];
        let mid = bottom.sqrt();
        let inner: Vec<f64> =
            small.iter().copied().filter(|&r| r >= mid * (1.0 - 1e-12)).collect();
        let s = scaling_side(profile, &small, &inner, exps)?;
        rep.fit("c3", s.c_lower);
        rep.fit("c4", s.c_upper);
        rep.fit("drift_small", s.drift);
        let ok = s.c_lower > 0.0 && s.c_upper.is_finite() && s.drift <= DRIFT_TOL;
        if !ok {
            rep.note(format!(
                "constants near zero drift by {:.3} (c3 = {:.4e}, c4 = {:.4e})",
                s.drift, s.c_lower, s.c_upper
            ));
        }
        verdicts.push(Verdict::from_bool(ok));
    } else {
        rep.note("profile defined at infinity only; near-zero exponents not checked");
    }
    rep.verdict = Verdict::all(verdicts);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// class 𝒢

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassGVerdict {
    InG,
    NotInG,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassGReport {
    pub profile: String,
    pub a_values: Vec<f64>,
    pub windows: Vec<f64>,
    /// `statistics[i][w]`: sup for `a_values[i]` over (1, `windows[w]`].
    pub statistics: Vec<Vec<f64>>,
    /// Relative growth between the last two windows, per a.
    pub growth: Vec<f64>,
    pub verdict: ClassGVerdict,
}

/// Where three integrations by parts replace panel quadrature of the
/// oscillating factor.
const BY_PARTS_FROM: f64 = 1000.0;

/// ∫ sin(τ+φ) W(τ) dτ over [τa, τb] (τb may be ∞) with W(τ) = t^k g(t) dt/dτ,
/// t = τ^{1/p}. Half-period panels below [`BY_PARTS_FROM`], integration by
/// parts above it (remainder below ∫|W‴|).
fn wave(base: &Family, k: f64, p: f64, phase: f64, ta: f64, tb: f64) -> f64 {
    let w = |tau: f64| {
        let t = tau.powf(1.0 / p);
        t.powf(k) * base.value(t) * t / (p * tau)
    };
    let (lo, hi) = (ta.powf(p), tb.powf(p));
    let mut total = 0.0;
    let mid = hi.min(BY_PARTS_FROM);
    if mid > lo {
        let n = ((mid - lo) / PI).ceil().max(1.0) as usize;
        let h = (mid - lo) / n as f64;
        for j in 0..n {
            let a = lo + h * j as f64;
            total += gl16().integrate(|tau| (tau + phase).sin() * w(tau), a, a + h);
        }
    }
    let start = lo.max(BY_PARTS_FROM);
    if hi > start {
        let prim = |tau: f64| {
            if tau.is_infinite() {
                return 0.0;
            }
            let h = 1e-3 * tau;
            let (wm, w0, wp) = (w(tau - h), w(tau), w(tau + h));
            let d1 = (wp - wm) / (2.0 * h);
            let d2 = (wp - 2.0 * w0 + wm) / (h * h);
            let (s, c) = (tau + phase).sin_cos();
            -c * w0 + s * d1 + c * d2
        };
        total += prim(hi) - prim(start);
    }
    total
}

/// ∫_{ta}^{tb} t^k ℓ(t) dt for 0 ≤ ta < tb ≤ ∞.
pub fn ell_moment(family: &Family, k: f64, ta: f64, tb: f64) -> Result<f64> {
    let plain = |f: &Family, a: f64, b: f64| {
        crate::quad::log_integral(|t| t.powf(k) * f.value(t), a, b, &[1.0])
    };
    match family {
        Family::Oscillating {
            base,
            shift,
            phase,
            freq,
        } => {
            let mut total = 0.0;
            if ta < 1.0 {
                total += plain(family, ta, tb.min(1.0))?;
            }
            let a = ta.max(1.0);
            if tb > a {
                total += shift * plain(base, a, tb)? + wave(base, k, *freq, *phase, a, tb);
            }
            Ok(total)
        }
        f => plain(f, ta, tb),
    }
}

/// I(u) = ∫_0^u ℓ(e^v) dv evaluated cell by cell.
struct Scan<'a> {
    ell: &'a Family,
    osc: Option<(f64, f64)>,
}

impl<'a> Scan<'a> {
    fn new(ell: &'a Family) -> Self {
        let osc = match ell {
            Family::Oscillating { phase, freq, .. } => Some((*phase, *freq)),
            _ => None,
        };
        Scan { ell, osc }
    }

    fn ell(&self, u: f64) -> f64 {
        self.ell.value(u.exp())
    }


    /// ∫_{ua}^{ub} ℓ(e^v) dv.
    fn integral(&self, ua: f64, ub: f64) -> Result<f64> {
        if ub <= ua {
            return Ok(0.0);
        }
        ell_moment(self.ell, -1.0, ua.exp(), ub.exp())
    }

    /// First and last u' in [ua, ub] at which the oscillating factor peaks.
    /// Between peaks the statistic only falls below its smooth envelope
    /// through the peak values, so these two bound it on the cell.
    fn peaks_in(&self, ua: f64, ub: f64) -> Vec<f64> {
        let Some((phase, p)) = self.osc else {
            return Vec::new();
        };
        let peak = |k: f64| (FRAC_PI_2 - phase + 2.0 * PI * k).ln() / p;
        let k0 = (((p * ua).exp() + phase - FRAC_PI_2) / (2.0 * PI)).ceil();
        let k1 = (((p * ub).exp() + phase - FRAC_PI_2) / (2.0 * PI)).floor();
        let mut out: Vec<f64> = [k0, k1]
            .iter()
            .filter(|k| **k <= k1 && FRAC_PI_2 - phase + 2.0 * PI * **k > 0.0)
            .map(|k| peak(*k))
            .filter(|u| *u > ua && *u <= ub)
            .collect();
        out.dedup();
        out
    }
}

fn g_stat(i: f64, ell: f64, a: f64) -> f64 {
    i * (-a * i / ell).exp()
}

/// Suprema of I(r)·exp(−aI(r)/ℓ(r)) over (1, w] for each window w (sorted)
/// and each a, I(r) = ∫_1^r ℓ(s)/s ds.
fn class_g_scan(profile: &ScalingProfile, a_values: &[f64], windows: &[f64]) -> Result<Vec<Vec<f64>>> {
    if a_values.iter().any(|a| !(*a > 0.0)) {
        return config("class-G statistic needs a > 0");
    }
    if windows.iter().any(|w| !(*w > 1.0)) || windows.windows(2).any(|w| w[1] <= w[0]) {
        return config("class-G windows must exceed 1 and increase");
    }
    let (lo, hi) = profile.domain();
    let top = *windows.last().unwrap();
    if lo > 1.0 || hi < top * (1.0 - 1e-12) {
        return Err(Error::Range(format!(
            "profile '{}' is not defined on [1, {top}]",
            profile.name
        )));
    }
    let scan = Scan::new(&profile.family);
    let mut sup = vec![vec![0.0f64; windows.len()]; a_values.len()];
    let mut best: Vec<Vec<(f64, usize)>> = vec![vec![(0.0, 0); windows.len()]; a_values.len()];
    let mut nodes: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    let mut u = 0.0;
    let mut i_acc = 0.0;
    for (wi, &w) in windows.iter().enumerate() {
        let u_end = w.ln();
        while u < u_end {
            let next = (u + LN_10 / PER_DECADE as f64).min(u_end);
            let next = if u_end - next < 1e-9 { u_end } else { next };
            for up in scan.peaks_in(u, next) {
                let ip = i_acc + scan.integral(u, up)?;
                let lp = scan.ell(up);
                for (ai, &a) in a_values.iter().enumerate() {
                    let s = g_stat(ip, lp, a);
                    for k in wi..windows.len() {
                        sup[ai][k] = sup[ai][k].max(s);
                    }
                }
            }
            i_acc += scan.integral(u, next)?;
            u = next;
            if !i_acc.is_finite() {
                return Err(Error::Numeric(format!(
                    "inner integral of '{}' is {i_acc} at r = {:.4e}",
                    profile.name,
                    u.exp()
                )));
            }
            nodes.push((u, i_acc));
            let l = scan.ell(u);
            for (ai, &a) in a_values.iter().enumerate() {
                let s = g_stat(i_acc, l, a);
                for k in wi..windows.len() {
                    if s > sup[ai][k] {
                        sup[ai][k] = s;
                    }
                    if s > best[ai][k].0 {
                        best[ai][k] = (s, nodes.len() - 1);
                    }
                }
            }
        }
    }
    // golden-section refinement around the best grid node
    for (ai, &a) in a_values.iter().enumerate() {
        for (k, &w) in windows.iter().enumerate() {
            let idx = best[ai][k].1;
            if idx == 0 {
                continue;
            }
            let (u0, i0) = nodes[idx - 1];
            let u1 = if idx + 1 < nodes.len() {
                nodes[idx + 1].0.min(w.ln())
            } else {
                nodes[idx].0
            };
            let f = |x: f64| match scan.integral(u0, x) {
                Ok(v) => g_stat(i0 + v, scan.ell(x), a),
                Err(_) => f64::NAN,
            };
            let refined = golden_max(f, u0, u1);
            if refined.is_finite() {
                sup[ai][k] = sup[ai][k].max(refined);
            }
        }
    }
    Ok(sup)
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if hi - lo < 1e-12 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

/// sup over r ∈ (1, r_max] of I(r)·exp(−a I(r)/ℓ(r)).
pub fn class_g_statistic(profile: &ScalingProfile, a: f64, r_max: f64) -> Result<f64> {
    Ok(class_g_scan(profile, &[a], &[r_max])?[0][0])
}

/// Statistic over nested windows with the stabilization verdict.
pub fn class_g_report(
    profile: &ScalingProfile,
    a_values: &[f64],
    windows: &[f64],
) -> Result<ClassGReport> {
    if windows.len() < 2 {
        return config("class-G verdict needs at least two windows");
    }
    let statistics = class_g_scan(profile, a_values, windows)?;
    let n = windows.len();
    let growth: Vec<f64> = statistics
        .iter()
        .map(|s| (s[n - 1] - s[n - 2]) / s[n - 2])
        .collect();
    let verdict = if growth.iter().all(|g| *g < CLASS_G_TOL) {
        ClassGVerdict::InG
    } else if growth.iter().any(|g| !(*g <= NOT_IN_G_GROWTH)) {
        ClassGVerdict::NotInG
    } else {
        ClassGVerdict::Inconclusive
    };
    Ok(ClassGReport {
        profile: profile.name.clone(),
        a_values: a_values.to_vec(),
        windows: windows.to_vec(),
        statistics,
        growth,
        verdict,
    })
}

/// [`class_g_report`] with the default a values and windows.
pub fn class_g_default(profile: &ScalingProfile) -> Result<ClassGReport> {
    class_g_report(profile, &CLASS_G_A, &CLASS_G_WINDOWS)
}

fn sup_on(profile: &ScalingProfile, lo: f64, hi: f64) -> Result<f64> {
    let mut m = 0.0f64;
    for r in log_grid(lo, hi, PER_DECADE) {
        m = m.max(eval_ell(profile, r)?);
    }
    Ok(m)
}

/// First route satisfied, tested in the order bounded → h_comparable →
/// class_g. The h_comparable test needs `scales` built from the same profile
/// and is skipped when none are available (profiles defined at infinity only).
pub fn classify_route(profile: &ScalingProfile, scales: Option<&KernelScales>) -> Result<Route> {
    if sup_on(profile, 6.0, 8.0)? <= 1.01 * sup_on(profile, 0.0, 6.0)? {
        return Ok(Route::Bounded);
    }
    if let Some(sc) = scales {
        if h_comparable_drift(profile, sc)? <= DRIFT_TOL {
            return Ok(Route::HComparable);
        }
    }
    if class_g_default(profile)?.verdict == ClassGVerdict::InG {
        return Ok(Route::ClassG);
    }
    Ok(Route::None)
}

/// spread of h(r)/ℓ(1/r) on [10^−6, 1] divided by its spread on [10^−3, 1].
pub fn h_comparable_drift(profile: &ScalingProfile, scales: &KernelScales) -> Result<f64> {
    let mut full = Vec::new();
    let mut inner = Vec::new();
    for r in log_grid(-6.0, 0.0, PER_DECADE) {
        let q = scales.h(r)? / eval_ell(profile, 1.0 / r)?;
        full.push(q);
        if r >= 1e-3 * (1.0 - 1e-12) {
            inner.push(q);
        }
    }
    Ok(spread(&full) / spread(&inner))
}

// ---------------------------------------------------------------------------
// closure generators

#[derive(Debug, Clone, PartialEq)]
pub enum ClosureRule {
    /// ℓ·(shift + sin(r + phase)), shift > 1.
    ScaleBoundedFactor { shift: f64, phase: f64 },
    /// ℓ(r^b).
    PowerSubstitution { b: f64 },
    /// ℓ/ℓ₂ with ℓ₂ increasing and bounded below on [1,∞).
    DivideIncreasing { by: Box<ScalingProfile> },
    /// ∏ ℓ_k^b, independent of the base.
    LogIterates { terms: Vec<(u32, f64)> },
    /// exp((log(1+r))^b) − 1, b ∈ (0, 1/2), independent of the base.
    ExpLogPower { b: f64 },
}

fn require_in_g(base: &ScalingProfile) -> Result<()> {
    let rep = class_g_default(base)?;
    if rep.verdict != ClassGVerdict::InG {
        return config(format!(
            "closure base '{}' is not in class G (verdict {:?})",
            base.name, rep.verdict
        ));
    }
    Ok(())
}

/// Build a new profile by one of the closure rules of class 𝒢.
pub fn closure_generate(base: &ScalingProfile, rule: &ClosureRule) -> Result<ScalingProfile> {
    let out = match rule {
        ClosureRule::ScaleBoundedFactor { shift, phase } => {
            if !(*shift > 1.0) || !phase.is_finite() {
                return config("bounded factor needs shift > 1");
            }
            if base.family.is_oscillating() {
                return config("nested oscillating factors are not supported");
            }
            require_in_g(base)?;
            ScalingProfile::new(
                format!("({shift}+sin(r+{phase}))*{}", base.name),
                Family::Oscillating {
                    base: Box::new(base.family.clone()),
                    shift: *shift,
                    phase: *phase,
                    freq: 1.0,
                },
                base.exponents,
                Route::ClassG,
            )
        }
        ClosureRule::PowerSubstitution { b } => {
            if !(*b > 0.0) {
                return config("power substitution needs b > 0");
            }
            require_in_g(base)?;
            let [d1, d2] = base.exponents.large;
            let large = if d1 > 0.0 { [d1 * b, d2 * b] } else { [0.0, d2] };
            let small = base
                .exponents
                .small
                .map(|[x, y]| [x * b, y * b])
                .filter(|s| s[1] < 2.0);
            let family = match &base.family {
                Family::Oscillating {
                    base: inner,
                    shift,
                    phase,
                    freq,
                } => Family::Oscillating {
                    base: Box::new(Family::PowerSubst(inner.clone(), *b)),
                    shift: *shift,
                    phase: *phase,
                    freq: freq * b,
                },
                f => Family::PowerSubst(Box::new(f.clone()), *b),
            };
            ScalingProfile::new(
                format!("{}∘r^{b}", base.name),
                family,
                Exponents { large, small },
                Route::ClassG,
            )
        }
        ClosureRule::DivideIncreasing { by } => {
            if by.family.is_oscillating() {
                return config("divisor must be increasing");
            }
            let grid = log_grid(0.0, 8.0, PER_DECADE);
            let vals: Vec<f64> = grid.iter().map(|&r| eval_ell(by, r)).collect::<Result<_>>()?;
            if vals.windows(2).any(|w| w[1] < w[0]) || !(vals[0] > 0.0) {
                return config(format!(
                    "divisor '{}' is not increasing and positive on [1, 1e8]",
                    by.name
                ));
            }
            require_in_g(base)?;
            let small = match (base.exponents.small, by.exponents.small) {
                (Some([a, b]), Some([c, d])) if a - d > 0.0 => Some([a - d, b - c]),
                _ => None,
            };
            let family = match &base.family {
                Family::Oscillating {
                    base: inner,
                    shift,
                    phase,
                    freq,
                } => Family::Oscillating {
                    base: Box::new(Family::Divide(inner.clone(), Box::new(by.family.clone()))),
                    shift: *shift,
                    phase: *phase,
                    freq: *freq,
                },
                f => Family::Divide(Box::new(f.clone()), Box::new(by.family.clone())),
            };
            ScalingProfile::new(
                format!("{}/{}", base.name, by.name),
                family,
                Exponents {
                    large: [0.0, base.exponents.large[1]],
                    small,
                },
                Route::ClassG,
            )
        }
        ClosureRule::LogIterates { terms } => {
            if terms.is_empty() || terms.iter().any(|&(k, b)| k == 0 || !(b > 0.0)) {
                return config("log iterates need k >= 1 and positive powers");
            }
            let total: f64 = terms.iter().map(|t| t.1).sum();
            let name = terms
                .iter()
                .map(|(k, b)| format!("log{k}^{b}"))
                .collect::<Vec<_>>()
                .join("*");
            ScalingProfile::new(
                name,
                Family::LogIterates(terms.clone()),
                Exponents {
                    large: [0.0, slow_upper(log_power(terms))],
                    small: (total < 2.0).then_some([total, total]),
                },
                Route::ClassG,
            )
        }
        ClosureRule::ExpLogPower { b } => {
            if !(*b > 0.0 && *b < 0.5) {
                return config("exp-log power needs b in (0, 1/2)");
            }
            ScalingProfile::new(
                format!("exp-log-pow:{b}"),
                Family::ExpLogPow(*b),
                Exponents {
                    large: [0.0, slow_upper(1.0)],
                    small: Some([*b, *b]),
                },
                Route::ClassG,
            )
        }
    };
    out.admissible()?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// strictly increasing envelope

#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    pub r: Vec<f64>,
    pub values: Vec<f64>,
    /// max f̃/f on the table.
    pub constant: f64,
    /// c₁ · max_k ((l_k+ε_k)/l_k)^δ over the flat runs.
    pub bound: f64,
}

pub fn running_max(values: &[f64]) -> Vec<f64> {
    let mut m = f64::NEG_INFINITY;
    values
        .iter()
        .map(|&v| {
            m = m.max(v);
            m
        })
        .collect()
}

/// Replace every maximal flat run [r_k, l_k] of a non-decreasing table by the
/// linear ramp reaching f(l_k+ε_k), ε_k = min(half the gap to the next table
/// point, 1). A flat run at the end of the table ramps to f(l)·((l+ε)/l)^δ,
/// the slowest continuation allowed by the upper scaling.
pub fn monotone_envelope(r: &[f64], f: &[f64], delta: f64, c1: f64) -> Result<Envelope> {
    let n = r.len();
    if n < 2 || f.len() != n {
        return config("envelope needs at least two samples of equal length");
    }
    if !(r[0] > 0.0) || r.windows(2).any(|w| !(w[1] > w[0])) {
        return config("envelope abscissae must be positive and increasing");
    }
    if f.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return config("envelope values must be positive and finite");
    }
    if !(delta > 0.0) || !(c1 >= 1.0) {
        return config("envelope needs delta > 0 and c1 >= 1");
    }
    if f.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Invariant(
            "envelope input decreases; apply running_max first".into(),
        ));
    }
    let mut out = f.to_vec();
    let mut bound = 1.0f64;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && f[j + 1] == f[i] {
            j += 1;
        }
        if j > i {
            let (end, f_end) = if j + 1 < n {
                let gap = r[j + 1] - r[j];
                let eps = (0.5 * gap).min(1.0);
                (r[j] + eps, f[j] + (f[j + 1] - f[j]) * eps / gap)
            } else {
                let eps = (0.5 * (r[j] - r[i])).min(1.0);
                let end = r[j] + eps;
                (end, f[j] * (end / r[j]).powf(delta))
            };
            for k in i..=j {
                out[k] = f[i] + (f_end - f[i]) * (r[k] - r[i]) / (end - r[i]);
            }
            bound = bound.max(c1 * (end / r[j]).powf(delta));
        }
        i = j + 1;
    }
    if out.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Invariant("envelope is not strictly increasing".into()));
    }
    let constant = out
        .iter()
        .zip(f)
        .map(|(a, b)| a / b)
        .fold(1.0f64, f64::max);
    Ok(Envelope {
        r: r.to_vec(),
        values: out,
        constant,
        bound,
    })
}
