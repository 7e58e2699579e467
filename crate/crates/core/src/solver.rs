//! Zero-initial-data solutions of ∂_t^α u = 𝓛u + f on periodic grids.
//!
//! 𝓛 acts as the radial multiplier −ψ(|ξ|). The representation
//! u = ∫_0^t q^{α,1}(t−s) ∗ f(s) ds is evaluated mode by mode:
//! û(t, ξ) = ∫_0^t g_λ(t−s) f̂(s, ξ) ds with λ = ψ(|ξ|) and
//! g_λ(τ) = τ^{α−1}E_{α,α}(−λτ^α), using product-trapezoid weights built
//! from the exact primitives of g_λ.

use crate::error::{config, Result};
use crate::fractional_time::L1Weights;
use crate::grid::{GridField, SpaceGrid};
use crate::kernel_scales::LevySymbol;
use crate::mittag_leffler::ml_bounded;
use crate::report::{BoundReport, Sample, Verdict};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Allowed growth of a fitted constant under one 2× refinement.
pub const REFINEMENT_GROWTH: f64 = 1.25;
/// Residual tolerance of the cross-discretization check.
pub const RESIDUAL_TOL: f64 = 0.05;

/// Fields u(t_k, ·), t_k = kΔt, k = 0 … steps, on one spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    pub grid: SpaceGrid,
    pub dt: f64,
    pub values: Vec<GridField>,
}

impl SpaceTimeField {
    pub fn new(grid: SpaceGrid, dt: f64, values: Vec<GridField>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return config(format!("time step must be positive, got {dt}"));
        }
        if values.len() < 2 {
            return config("a space-time field needs at least two time slices");
        }
        if values.iter().any(|v| v.grid != grid) {
            return config("all time slices must share one grid");
        }
        Ok(SpaceTimeField { grid, dt, values })
    }

    pub fn zeros(grid: SpaceGrid, horizon: f64, steps: usize) -> Result<Self> {
        Self::from_fn(grid, horizon, steps, |_, _| 0.0)
    }

    /// f(t, x) sampled on `steps` uniform steps of [0, horizon].
    pub fn from_fn<F: Fn(f64, &[f64]) -> f64>(grid: SpaceGrid, horizon: f64, steps: usize, f: F) -> Result<Self> {
        if steps == 0 || !(horizon > 0.0) {
            return config("time grid needs a positive horizon and at least one step");
        }
        let dt = horizon / steps as f64;
        let values = (0..=steps)
            .map(|k| GridField::from_fn(grid, |x| f(k as f64 * dt, x)))
            .collect();
        Self::new(grid, dt, values)
    }

    /// Time-constant field g on the given time grid.
    pub fn constant_in_time(g: &GridField, horizon: f64, steps: usize) -> Result<Self> {
        if steps == 0 || !(horizon > 0.0) {
            return config("time grid needs a positive horizon and at least one step");
        }
        Self::new(g.grid, horizon / steps as f64, vec![g.clone(); steps + 1])
    }

    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.steps() as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.values.len()).map(|k| k as f64 * self.dt).collect()
    }

    /// u(t_k, x_flat) for every k.
    pub fn point_series(&self, flat: usize) -> Vec<f64> {
        self.values.iter().map(|v| v.values[flat]).collect()
    }

    fn from_columns(grid: SpaceGrid, dt: f64, columns: &[Vec<f64>]) -> Result<Self> {
        let nt = columns.first().map_or(0, Vec::len);
        let values = (0..nt)
            .map(|k| GridField::new(grid, columns.iter().map(|c| c[k]).collect()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid, dt, values)
    }

    fn same_shape(&self, other: &SpaceTimeField) -> Result<()> {
        if self.grid != other.grid || self.values.len() != other.values.len() || self.dt != other.dt {
            return config("space-time fields on different grids");
        }
        Ok(())
    }

    /// a·self + b·other.
    pub fn combine(&self, a: f64, other: &SpaceTimeField, b: f64) -> Result<Self> {
        self.same_shape(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| GridField::new(self.grid, u.values.iter().zip(&v.values).map(|(x, y)| a * x + b * y).collect()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.grid, self.dt, values)
    }

    /// Slice-wise map.
    pub fn map_slices<F: Fn(&GridField) -> Result<GridField> + Sync + Send>(&self, f: F) -> Result<Self> {
        let values = self.values.par_iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(self.grid, self.dt, values)
    }

    /// Copy with every slice after t* set to zero.
    pub fn truncated_after(&self, t_star: f64) -> Self {
        let mut out = self.clone();
        for (k, v) in out.values.iter_mut().enumerate() {
            if k as f64 * self.dt > t_star * (1.0 + 1e-12) {
                *v = GridField::from_fn(self.grid, |_| 0.0);
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|v| v.values.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// 𝓛f: multiplier −ψ(|ξ|).
pub fn apply_generator(field: &GridField, symbol: &LevySymbol) -> Result<GridField> {
    field.apply_radial_multiplier(|rho| Ok(-symbol.eval(rho)?))
}

/// (1 − 𝓛)^{γ/2} f: multiplier (1 + ψ)^{γ/2}.
pub fn bessel_potential(field: &GridField, symbol: &LevySymbol, gamma: f64) -> Result<GridField> {
    if !gamma.is_finite() {
        return config(format!("order must be finite, got {gamma}"));
    }
    field.apply_radial_multiplier(|rho| Ok((1.0 + symbol.eval(rho)?).powf(gamma / 2.0)))
}

/// u(t) for ∂^α u = 𝓛u, u(0) = u₀: multiplier E_{α,1}(−t^α ψ).
pub fn homogeneous_solution(symbol: &LevySymbol, alpha: f64, u0: &GridField, t: f64) -> Result<GridField> {
    check_alpha(alpha)?;
    if !(t >= 0.0) {
        return config(format!("time must be non-negative, got {t}"));
    }
    let ta = t.powf(alpha);
    u0.apply_radial_multiplier(|rho| ml_bounded(alpha, 1.0, -ta * symbol.eval(rho)?, f64::INFINITY))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return config(format!("α must lie in (0, 1], got {alpha}"));
    }
    Ok(())
}

/// Caputo derivative by the L1 scheme at every grid point.
pub fn caputo_field(field: &SpaceTimeField, alpha: f64) -> Result<SpaceTimeField> {
    let w = L1Weights::new(alpha, field.dt, field.steps())?;
    let columns = (0..field.grid.len())
        .into_par_iter()
        .map(|flat| w.apply(&field.point_series(flat)))
        .collect::<Result<Vec<_>>>()?;
    SpaceTimeField::from_columns(field.grid, field.dt, &columns)
}

/// Product-trapezoid weights of one mode. With G₁(τ) = τ^α E_{α,α+1}(−λτ^α)
/// and G₂(τ) = τ^{α+1} E_{α,α+2}(−λτ^α), the hat function at lag m has
/// weight (G₂(m+1) − 2G₂(m) + G₂(m−1))/Δt; the half hats at the two ends
/// are G₂(1)/Δt and G₁(k) − (G₂(k) − G₂(k−1))/Δt.
#[derive(Debug, Clone)]
struct ModeWeights {
    lambda: f64,
    first: f64,
    interior: Vec<f64>,
    last: Vec<f64>,
}

impl ModeWeights {
    fn new(alpha: f64, lambda: f64, dt: f64, steps: usize) -> Result<Self> {
        let mut g1 = Vec::with_capacity(steps + 2);
        let mut g2 = Vec::with_capacity(steps + 2);
        for m in 0..=steps + 1 {
            let tau = m as f64 * dt;
            if m == 0 {
                g1.push(0.0);
                g2.push(0.0);
                continue;
            }
            let ta = tau.powf(alpha);
            let z = -lambda * ta;
            g1.push(ta * ml_bounded(alpha, alpha + 1.0, z, f64::INFINITY)?);
            g2.push(tau * ta * ml_bounded(alpha, alpha + 2.0, z, f64::INFINITY)?);
        }
        let interior = (0..=steps)
            .map(|m| if m == 0 { 0.0 } else { (g2[m + 1] - 2.0 * g2[m] + g2[m - 1]) / dt })
            .collect();
        let last = (0..=steps)
            .map(|k| if k == 0 { 0.0 } else { g1[k] - (g2[k] - g2[k - 1]) / dt })
            .collect();
        Ok(ModeWeights {
            lambda,
            first: g2[1] / dt,
            interior,
            last,
        })
    }

    /// Σ of the Volterra sum at every step, scaled by `c`.
    fn apply(&self, f: &[Complex64], c: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); f.len()];
        for k in 1..f.len() {
            let mut s = self.first * f[k] + self.last[k] * f[0];
            for m in 1..k {
                s += self.interior[m] * f[k - m];
            }
            out[k] = c * s;
        }
        out
    }
}

/// Modal Volterra operator for one (symbol, α, grid, Δt, steps).
#[derive(Debug, Clone)]
pub struct ModalVolterra {
    pub alpha: f64,
    pub grid: SpaceGrid,
    pub dt: f64,
    pub steps: usize,
    modes: Vec<ModeWeights>,
    index: Vec<usize>,
}

impl ModalVolterra {
    pub fn new(symbol: &LevySymbol, alpha: f64, grid: SpaceGrid, dt: f64, steps: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if symbol.dimension() != grid.dimension {
            return config(format!(
                "symbol is {}-dimensional, grid is {}-dimensional",
                symbol.dimension(),
                grid.dimension
            ));
        }
        let mut keys: BTreeMap<u64, usize> = BTreeMap::new();
        let index_keys: Vec<u64> = (0..grid.len()).map(|flat| grid.wavenumber_sq(flat)).collect();
        for k in &index_keys {
            let n = keys.len();
            keys.entry(*k).or_insert(n);
        }
        let mut ordered: Vec<(u64, usize)> = keys.iter().map(|(k, i)| (*k, *i)).collect();
        ordered.sort_by_key(|(_, i)| *i);
        let step = PI / grid.half_width;
        let modes = ordered
            .par_iter()
            .map(|(k, _)| {
                let lambda = symbol.eval(step * (*k as f64).sqrt())?;
                ModeWeights::new(alpha, lambda, dt, steps)
            })
            .collect::<Result<Vec<_>>>()?;
        let index = index_keys.iter().map(|k| keys[k]).collect();
        Ok(ModalVolterra {
            alpha,
            grid,
            dt,
            steps,
            modes,
            index,
        })
    }

    /// Per-mode Volterra sum with kernel c(λ)·g_λ.
    fn run<C: Fn(f64) -> f64 + Sync>(&self, f: &SpaceTimeField, c: C) -> Result<SpaceTimeField> {
        if f.grid != self.grid || f.steps() != self.steps || (f.dt - self.dt).abs() > 1e-12 * self.dt {
            return config("forcing does not match the operator's space-time grid");
        }
        let spectra: Vec<&[Complex64]> = f.values.par_iter().map(|v| v.spectrum()).collect();
        let columns: Vec<Vec<Complex64>> = (0..self.grid.len())
            .into_par_iter()
            .map(|flat| {
                let w = &self.modes[self.index[flat]];
                let series: Vec<Complex64> = spectra.iter().map(|s| s[flat]).collect();
                w.apply(&series, c(w.lambda))
            })
            .collect();
        let values = (0..=self.steps)
            .into_par_iter()
            .map(|k| GridField::from_spectrum(self.grid, columns.iter().map(|col| col[k]).collect()))
            .collect();
        SpaceTimeField::new(self.grid, self.dt, values)
    }

    /// u = ∫_0^t q^{α,1}(t−s) ∗ f(s) ds.
    pub fn solve(&self, f: &SpaceTimeField) -> Result<SpaceTimeField> {
        self.run(f, |_| 1.0)
    }

    /// Lf with the multiplier −(t−s)^{α−1}ψ E_{α,α}(−(t−s)^α ψ).
    pub fn cz(&self, f: &SpaceTimeField) -> Result<SpaceTimeField> {
        self.run(f, |lambda| -lambda)
    }
}

/// Solution of ∂^α u = 𝓛u + f, u(0) = 0.
pub fn solve_zero_ic(symbol: &LevySymbol, alpha: f64, f: &SpaceTimeField) -> Result<SpaceTimeField> {
    ModalVolterra::new(symbol, alpha, f.grid, f.dt, f.steps())?.solve(f)
}

/// Calderón–Zygmund operator Lf = 𝓛(solve_zero_ic(f)).
pub fn cz_operator(symbol: &LevySymbol, alpha: f64, f: &SpaceTimeField) -> Result<SpaceTimeField> {
    ModalVolterra::new(symbol, alpha, f.grid, f.dt, f.steps())?.cz(f)
}

/// Exponents and horizon of the discrete L_q((0, T); L_p) norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedNormSpec {
    pub p: f64,
    pub q: f64,
    pub horizon: f64,
}

impl MixedNormSpec {
    pub fn new(p: f64, q: f64, horizon: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite() && q > 1.0 && q.is_finite()) {
            return config(format!("mixed norm exponents must lie in (1, ∞), got p = {p}, q = {q}"));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return config(format!("horizon must be positive, got {horizon}"));
        }
        Ok(MixedNormSpec { p, q, horizon })
    }
}

/// (Σ_k w_k ‖u(t_k)‖_{L_p}^q)^{1/q} with trapezoid weights on [0, T].
pub fn mixed_norm(field: &SpaceTimeField, spec: &MixedNormSpec) -> Result<f64> {
    let last = (spec.horizon / field.dt * (1.0 + 1e-12)).floor() as usize;
    if last == 0 || last > field.steps() {
        return config(format!(
            "horizon {} outside the field's time range (0, {}]",
            spec.horizon,
            field.horizon()
        ));
    }
    let mut s = 0.0;
    for k in 0..=last {
        let w = if k == 0 || k == last { 0.5 } else { 1.0 } * field.dt;
        s += w * field.values[k].lp_norm(spec.p).powf(spec.q);
    }
    Ok(s.powf(1.0 / spec.q))
}

/// Relative L²-in-space-time size of ∂^α u − 𝓛u − f, with ∂^α taken by
/// the L1 scheme. Returns 0 when f and the defect both vanish.
pub fn residual(u: &SpaceTimeField, f: &SpaceTimeField, symbol: &LevySymbol, alpha: f64) -> Result<f64> {
    u.same_shape(f)?;
    let du = caputo_field(u, alpha)?;
    let lu = u.map_slices(|v| apply_generator(v, symbol))?;
    let defect = du.combine(1.0, &lu, -1.0)?.combine(1.0, f, -1.0)?;
    let spec = MixedNormSpec::new(2.0, 2.0, u.horizon())?;
    let num = mixed_norm(&defect, &spec)?;
    let den = mixed_norm(f, &spec)?;
    if den == 0.0 {
        return Ok(if num == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(num / den)
}

/// Residuals of the time-constant forcing g at `steps` and 2·`steps`.
/// Passes iff the coarse residual is below [`RESIDUAL_TOL`] and the fine
/// one is smaller.
pub fn check_solver_residual(
    symbol: &LevySymbol,
    alpha: f64,
    g: &GridField,
    horizon: f64,
    steps: usize,
) -> Result<BoundReport> {
    let mut rep = BoundReport::new(format!("solver residual, α = {alpha:.4}"));
    let mut res = Vec::new();
    for n in [steps, 2 * steps] {
        let f = SpaceTimeField::constant_in_time(g, horizon, n)?;
        let u = solve_zero_ic(symbol, alpha, &f)?;
        let r = residual(&u, &f, symbol, alpha)?;
        rep.samples.push(Sample::new(&[("steps", n as f64)], r));
        res.push(r);
    }
    rep.fit("residual", res[0]);
    rep.fit("residual_refined", res[1]);
    rep.fit("order", (res[0] / res[1]).log2());
    rep.verdict = Verdict::from_bool(res[0] < RESIDUAL_TOL && res[1] < res[0]);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// random band-limited data

/// Random real field Σ_k a_k cos(ξ_k·x + φ_k) over wavenumbers |k_i| ≤ K,
/// each term with a smooth random time profile Σ_m c_m cos(mπt/T + θ_m).
/// The coefficients depend only on (d, K, terms, seed), so the same
/// continuum field can be sampled on refined grids.
#[derive(Debug, Clone)]
pub struct RandomForcing {
    pub dimension: usize,
    pub max_wavenumber: usize,
    modes: Vec<RandomMode>,
}

#[derive(Debug, Clone)]
struct RandomMode {
    k: [i64; 3],
    phase: f64,
    time: Vec<(f64, f64)>,
}

impl RandomForcing {
    pub fn new(dimension: usize, max_wavenumber: usize, time_terms: usize, seed: u64) -> Result<Self> {
        if !(1..=3).contains(&dimension) || time_terms == 0 {
            return config("random forcing needs dimension 1 to 3 and at least one time term");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kk = max_wavenumber as i64;
        let mut modes = Vec::new();
        let range = |a: usize| if a < dimension { -kk..=kk } else { 0..=0 };
        for k0 in 0..=kk {
            for k1 in range(1) {
                for k2 in range(2) {
                    let time = (0..time_terms)
                        .map(|m| (rng.random_range(-1.0..1.0) / (1.0 + m as f64), rng.random_range(0.0..2.0 * PI)))
                        .collect();
                    modes.push(RandomMode {
                        k: [k0, k1, k2],
                        phase: rng.random_range(0.0..2.0 * PI),
                        time,
                    });
                }
            }
        }
        Ok(RandomForcing {
            dimension,
            max_wavenumber,
            modes,
        })
    }

    /// The field at one time t ∈ [0, T], synthesized in Fourier space.
    fn slice(&self, grid: &SpaceGrid, t: f64, horizon: f64) -> GridField {
        let n = grid.points_per_axis as i64;
        let vol = (2.0 * grid.half_width).powi(grid.dimension as i32);
        let mut spec = vec![Complex64::new(0.0, 0.0); grid.len()];
        let flat = |k: &[i64; 3]| (0..grid.dimension).fold(0usize, |acc, i| acc * n as usize + k[i].rem_euclid(n) as usize);
        for m in &self.modes {
            let a: f64 = m
                .time
                .iter()
                .enumerate()
                .map(|(j, (c, th))| c * (j as f64 * PI * t / horizon + th).cos())
                .sum();
            let c = Complex64::from_polar(0.5 * vol * a, m.phase);
            let neg = [-m.k[0], -m.k[1], -m.k[2]];
            spec[flat(&m.k)] += c;
            spec[flat(&neg)] += c.conj();
        }
        GridField::from_spectrum(*grid, spec)
    }

    /// Space-time samples; the grid must resolve the band (K < n/2).
    pub fn sample(&self, grid: SpaceGrid, horizon: f64, steps: usize) -> Result<SpaceTimeField> {
        if grid.dimension != self.dimension || 2 * self.max_wavenumber >= grid.points_per_axis {
            return config("grid does not resolve the random field's band");
        }
        if steps == 0 || !(horizon > 0.0) {
            return config("time grid needs a positive horizon and at least one step");
        }
        let dt = horizon / steps as f64;
        let values = (0..=steps)
            .into_par_iter()
            .map(|k| self.slice(&grid, k as f64 * dt, horizon))
            .collect();
        SpaceTimeField::new(grid, dt, values)
    }

    /// The field at t = 0 alone.
    pub fn sample_space(&self, grid: SpaceGrid) -> Result<GridField> {
        if grid.dimension != self.dimension || 2 * self.max_wavenumber >= grid.points_per_axis {
            return config("grid does not resolve the random field's band");
        }
        Ok(self.slice(&grid, 0.0, 1.0))
    }
}

/// Coarse and refined resolutions of the random-sample studies. At each
/// level the random band is a quarter of the axis size, the lower half of
/// that grid's spectrum, so unbounded operators show up as growth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleSetup {
    pub dimension: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
    pub horizon: f64,
    pub steps: usize,
    pub samples: usize,
    pub seed: u64,
}

impl SampleSetup {
    pub fn band(&self, refine: usize) -> usize {
        (self.points_per_axis << refine) / 4
    }

    fn level(&self, refine: usize) -> Result<(SpaceGrid, usize)> {
        Ok((
            SpaceGrid::new(self.dimension, self.half_width, self.points_per_axis << refine)?,
            self.steps << refine,
        ))
    }

    fn forcing(&self, i: usize, refine: usize) -> Result<RandomForcing> {
        let seed = self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64);
        let mut r = RandomForcing::new(self.dimension, self.band(refine), 4, seed)?;
        // a zero draw is excluded
        let mut bump = 1u64;
        while r.modes.iter().all(|m| m.time.iter().all(|(c, _)| *c == 0.0)) {
            r = RandomForcing::new(self.dimension, self.band(refine), 4, seed ^ (bump << 32))?;
            bump += 1;
        }
        Ok(r)
    }
}

/// Per-sample norms at one resolution.
struct SampleNorms {
    f: Vec<f64>,
    u: Vec<f64>,
    du: Vec<f64>,
    lu: Vec<f64>,
    cz_ratio: f64,
}

fn sample_norms(
    symbol: &LevySymbol,
    alpha: f64,
    setup: &SampleSetup,
    refine: usize,
    specs: &[MixedNormSpec],
) -> Result<Vec<SampleNorms>> {
    let (grid, steps) = setup.level(refine)?;
    let op = ModalVolterra::new(symbol, alpha, grid, setup.horizon / steps as f64, steps)?;
    let l2 = MixedNormSpec::new(2.0, 2.0, setup.horizon)?;
    (0..setup.samples)
        .into_par_iter()
        .map(|i| {
            let f = setup.forcing(i, refine)?.sample(grid, setup.horizon, steps)?;
            let u = op.solve(&f)?;
            let du = caputo_field(&u, alpha)?;
            let lu = op.cz(&f)?;
            let norms = |field: &SpaceTimeField| specs.iter().map(|s| mixed_norm(field, s)).collect::<Result<Vec<_>>>();
            Ok(SampleNorms {
                f: norms(&f)?,
                u: norms(&u)?,
                du: norms(&du)?,
                lu: norms(&lu)?,
                cz_ratio: mixed_norm(&lu, &l2)? / mixed_norm(&f, &l2)?,
            })
        })
        .collect()
}

/// Reports of the empirical a priori estimate, one per norm spec, and the
/// L² bound of the Calderón–Zygmund operator.
#[derive(Debug, Clone, Serialize)]
pub struct AprioriSuite {
    pub estimates: Vec<BoundReport>,
    pub cz_l2: BoundReport,
}

fn growth_report(name: String, coarse: &[f64], fine: &[f64], key: &str, rep: &mut BoundReport) -> bool {
    let c0 = coarse.iter().copied().fold(0.0, f64::max);
    let c1 = fine.iter().copied().fold(0.0, f64::max);
    let growth = c1 / c0;
    rep.fit(&format!("{key}c_coarse"), c0);
    rep.fit(&format!("{key}c_fine"), c1);
    rep.fit(&format!("{key}growth"), growth);
    if rep.name.is_empty() {
        rep.name = name;
    }
    c0.is_finite() && c1.is_finite() && c0 > 0.0 && growth < REFINEMENT_GROWTH
}

/// Fitted constants C = max_f (‖u‖ + ‖∂^α u‖ + ‖𝓛u‖)/‖f‖ and
/// max ‖𝓛u‖/‖f‖ in every norm of `specs`, at the setup's resolution and
/// after one 2× refinement in space and time. Each report passes iff both
/// constants grow less than [`REFINEMENT_GROWTH`]. Every spec horizon
/// must lie within the setup's horizon.
pub fn apriori_suite(
    symbol: &LevySymbol,
    alpha: f64,
    setup: &SampleSetup,
    specs: &[MixedNormSpec],
) -> Result<AprioriSuite> {
    if setup.samples == 0 {
        return config("at least one random sample is needed");
    }
    let coarse = sample_norms(symbol, alpha, setup, 0, specs)?;
    let fine = sample_norms(symbol, alpha, setup, 1, specs)?;
    let mut estimates = Vec::new();
    for (j, s) in specs.iter().enumerate() {
        let mut rep = BoundReport::new(format!(
            "a priori estimate, p = {}, q = {}, T = {}, α = {alpha:.4}",
            s.p, s.q, s.horizon
        ));
        let full = |n: &SampleNorms| (n.u[j] + n.du[j] + n.lu[j]) / n.f[j];
        let gen = |n: &SampleNorms| n.lu[j] / n.f[j];
        for (level, set) in [(0.0, &coarse), (1.0, &fine)] {
            for (i, n) in set.iter().enumerate() {
                rep.samples.push(Sample::new(&[("sample", i as f64), ("refinement", level)], full(n)));
            }
        }
        let a: Vec<f64> = coarse.iter().map(full).collect();
        let b: Vec<f64> = fine.iter().map(full).collect();
        let ok_full = growth_report(String::new(), &a, &b, "", &mut rep);
        let a: Vec<f64> = coarse.iter().map(gen).collect();
        let b: Vec<f64> = fine.iter().map(gen).collect();
        let ok_gen = growth_report(String::new(), &a, &b, "generator_", &mut rep);
        rep.verdict = Verdict::from_bool(ok_full && ok_gen);
        estimates.push(rep);
    }
    let mut cz_l2 = BoundReport::new(format!("Calderón–Zygmund L² bound, α = {alpha:.4}"));
    for (level, set) in [(0.0, &coarse), (1.0, &fine)] {
        for (i, n) in set.iter().enumerate() {
            cz_l2.samples.push(Sample::new(&[("sample", i as f64), ("refinement", level)], n.cz_ratio));
        }
    }
    let a: Vec<f64> = coarse.iter().map(|n| n.cz_ratio).collect();
    let b: Vec<f64> = fine.iter().map(|n| n.cz_ratio).collect();
    let ok = growth_report(String::new(), &a, &b, "", &mut cz_l2);
    cz_l2.verdict = Verdict::from_bool(ok);
    Ok(AprioriSuite { estimates, cz_l2 })
}

/// Single-spec form of [`apriori_suite`].
pub fn apriori_report(symbol: &LevySymbol, alpha: f64, spec: &MixedNormSpec, setup: &SampleSetup) -> Result<BoundReport> {
    Ok(apriori_suite(symbol, alpha, setup, std::slice::from_ref(spec))?
        .estimates
        .remove(0))
}

/// Two-sided constants of ‖u‖_p + ‖𝓛u‖_p ≍ ‖(1 − 𝓛)u‖_p on random
/// band-limited fields, at the setup's grid and one 2× refinement. The
/// lower ratio is ≥ 1 by the triangle inequality; the check passes iff
/// the upper one is finite and grows less than [`REFINEMENT_GROWTH`].
pub fn check_norm_equivalence(symbol: &LevySymbol, p: f64, setup: &SampleSetup) -> Result<BoundReport> {
    let mut rep = BoundReport::new(format!("norm equivalence, p = {p}"));
    let mut uppers = Vec::new();
    let mut lowers = Vec::new();
    for refine in 0..2 {
        let (grid, _) = setup.level(refine)?;
        let ratios = (0..setup.samples)
            .into_par_iter()
            .map(|i| {
                let u = setup.forcing(i, refine)?.sample_space(grid)?;
                let lu = apply_generator(&u, symbol)?;
                let one_minus = bessel_potential(&u, symbol, 2.0)?;
                Ok((u.lp_norm(p) + lu.lp_norm(p)) / one_minus.lp_norm(p))
            })
            .collect::<Result<Vec<f64>>>()?;
        for (i, r) in ratios.iter().enumerate() {
            rep.samples.push(Sample::new(&[("sample", i as f64), ("refinement", refine as f64)], *r));
        }
        uppers.push(ratios.iter().copied().fold(0.0, f64::max));
        lowers.push(ratios.iter().copied().fold(f64::INFINITY, f64::min));
    }
    rep.fit("lower", lowers[0].min(lowers[1]));
    rep.fit("upper_coarse", uppers[0]);
    rep.fit("upper_fine", uppers[1]);
    let growth = uppers[1] / uppers[0];
    rep.fit("growth", growth);
    rep.verdict = Verdict::from_bool(
        lowers.iter().all(|l| *l >= 1.0 - 1e-9) && uppers.iter().all(|u| u.is_finite()) && growth < REFINEMENT_GROWTH,
    );
    Ok(rep)
}
