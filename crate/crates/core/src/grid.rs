//! Periodic uniform grids on [−Λ, Λ)^d, sampled fields and radial Fourier
//! multipliers applied through the FFT.
//!
//! Values are stored row-major in FFT (wrap-around) order: index j on an
//! axis is the point j·dx for j < n/2 and (j − n)·dx otherwise, so the
//! origin sits at index 0.

use crate::error::{config, Error, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceGrid {
    pub dimension: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
}

impl SpaceGrid {
    pub fn new(dimension: usize, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return config(format!("grid dimension {dimension} not supported (1, 2 or 3)"));
        }
        if points_per_axis < 64 || !points_per_axis.is_power_of_two() {
            return config(format!("points per axis must be a power of two ≥ 64, got {points_per_axis}"));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return config(format!("half width must be positive, got {half_width}"));
        }
        Ok(SpaceGrid {
            dimension,
            half_width,
            points_per_axis,
        })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell volume dx^d.
    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.dimension as i32)
    }

    /// Signed integer offset of axis index j.
    pub fn wrap(&self, j: usize) -> i64 {
        let n = self.points_per_axis;
        if j < n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        self.wrap(j) as f64 * self.spacing()
    }

    pub fn frequency(&self, j: usize) -> f64 {
        PI * self.wrap(j) as f64 / self.half_width
    }

    /// Largest resolved frequency along an axis, π/dx.
    pub fn nyquist(&self) -> f64 {
        PI / self.spacing()
    }

    /// Axis indices of a flat index.
    pub fn indices(&self, flat: usize) -> [usize; 3] {
        let n = self.points_per_axis;
        let mut out = [0; 3];
        let mut f = flat;
        for a in (0..self.dimension).rev() {
            out[a] = f % n;
            f /= n;
        }
        out
    }

    pub fn radius(&self, flat: usize) -> f64 {
        let idx = self.indices(flat);
        (0..self.dimension)
            .map(|a| self.coordinate(idx[a]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Σ k_a² over the signed wavenumbers of a flat index; |ξ| = (π/Λ)·√·.
    pub fn wavenumber_sq(&self, flat: usize) -> u64 {
        let idx = self.indices(flat);
        (0..self.dimension).map(|a| self.wrap(idx[a]).pow(2) as u64).sum()
    }

    pub fn frequency_norm(&self, flat: usize) -> f64 {
        let idx = self.indices(flat);
        (0..self.dimension)
            .map(|a| self.frequency(idx[a]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Flat index of the point j·dx on the first axis (others at 0).
    pub fn axis_index(&self, j: usize) -> usize {
        j * self.points_per_axis.pow(self.dimension as u32 - 1)
    }

    /// Same grid with Λ and n doubled (spacing kept).
    pub fn doubled(&self) -> Self {
        SpaceGrid {
            half_width: 2.0 * self.half_width,
            points_per_axis: 2 * self.points_per_axis,
            ..*self
        }
    }
}

fn plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    let mut planner = FftPlanner::new();
    (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
}

/// Unnormalized d-dimensional FFT in place (forward: e^{−2πi jk/n}).
pub fn fft_nd(data: &mut [Complex64], grid: &SpaceGrid, inverse: bool) {
    let n = grid.points_per_axis;
    let d = grid.dimension;
    let (fwd, inv) = plans(n);
    let plan = if inverse { inv } else { fwd };
    let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        if stride == 1 {
            for chunk in data.chunks_mut(n) {
                plan.process_with_scratch(chunk, &mut scratch);
            }
            continue;
        }
        let block = stride * n;
        for base in (0..data.len()).step_by(block) {
            for off in 0..stride {
                for (k, c) in line.iter_mut().enumerate() {
                    *c = data[base + off + k * stride];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for (k, c) in line.iter().enumerate() {
                    data[base + off + k * stride] = *c;
                }
            }
        }
    }
}

/// Real field on a grid with a lazily computed spectrum
/// m(|ξ|) at every grid mode, evaluated once per distinct |ξ|.
fn radial_samples<M: FnMut(f64) -> Result<f64>>(grid: &SpaceGrid, mut m: M) -> Result<Vec<f64>> {
    let mut memo: HashMap<u64, f64> = HashMap::new();
    let step = PI / grid.half_width;
    let mut out = Vec::with_capacity(grid.len());
    for flat in 0..grid.len() {
        let k = grid.wavenumber_sq(flat);
        let v = match memo.get(&k) {
            Some(v) => *v,
            None => {
                let v = m(step * (k as f64).sqrt())?;
                memo.insert(k, v);
                v
            }
        };
        out.push(v);
    }
    Ok(out)
}

/// F(ξ_k) ≈ Σ_j f(x_j) e^{−iξ_k·x_j} dx^d.
#[derive(Debug, Clone)]
pub struct GridField {
    pub grid: SpaceGrid,
    pub values: Vec<f64>,
    spectral: OnceLock<Vec<Complex64>>,
}

impl PartialEq for GridField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values == other.values
    }
}

impl GridField {
    pub fn new(grid: SpaceGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "field has {} values, grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridField {
            grid,
            values,
            spectral: OnceLock::new(),
        })
    }

    pub fn from_fn<F: FnMut(&[f64]) -> f64>(grid: SpaceGrid, mut f: F) -> Self {
        let mut x = vec![0.0; grid.dimension];
        let values = (0..grid.len())
            .map(|flat| {
                let idx = grid.indices(flat);
                for a in 0..grid.dimension {
                    x[a] = grid.coordinate(idx[a]);
                }
                f(&x)
            })
            .collect();
        GridField {
            grid,
            values,
            spectral: OnceLock::new(),
        }
    }

    /// Field whose spectrum is m(|ξ|): f(x_j) = (2Λ)^{−d} Σ_k m(|ξ_k|) e^{iξ_k·x_j}.
    pub fn from_radial_multiplier<M: FnMut(f64) -> Result<f64>>(grid: SpaceGrid, m: M) -> Result<Self> {
        let spec = radial_samples(&grid, m)?
            .into_iter()
            .map(|v| Complex64::new(v, 0.0))
            .collect();
        let mut f = Self::from_spectrum(grid, spec);
        f.symmetrize();
        Ok(f)
    }

    /// Flat index of −x.
    pub fn reflected(&self, flat: usize) -> usize {
        let g = &self.grid;
        let n = g.points_per_axis;
        let idx = g.indices(flat);
        (0..g.dimension).fold(0, |acc, a| acc * n + (n - idx[a]) % n)
    }

    /// Replace values by ½(f(x) + f(−x)); even fields then satisfy
    /// f(x) = f(−x) bit for bit. The cached spectrum is kept.
    pub fn symmetrize(&mut self) {
        for flat in 0..self.values.len() {
            let m = self.reflected(flat);
            if m > flat {
                let v = 0.5 * (self.values[flat] + self.values[m]);
                self.values[flat] = v;
                self.values[m] = v;
            }
        }
    }

    /// Inverse of [`GridField::spectrum`]; the imaginary part is dropped.
    pub fn from_spectrum(grid: SpaceGrid, spectrum: Vec<Complex64>) -> Self {
        let mut data = spectrum.clone();
        fft_nd(&mut data, &grid, true);
        let norm = 1.0 / (2.0 * grid.half_width).powi(grid.dimension as i32);
        let values = data.iter().map(|c| c.re * norm).collect();
        let cache = OnceLock::new();
        let _ = cache.set(spectrum);
        GridField {
            grid,
            values,
            spectral: cache,
        }
    }

    pub fn spectrum(&self) -> &[Complex64] {
        self.spectral.get_or_init(|| {
            let mut data: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fft_nd(&mut data, &self.grid, false);
            let cell = self.grid.cell();
            data.iter_mut().for_each(|c| *c *= cell);
            data
        })
    }

    /// Field with spectrum m(|ξ|)·F(ξ).
    pub fn apply_radial_multiplier<M: FnMut(f64) -> Result<f64>>(&self, m: M) -> Result<GridField> {
        let w = radial_samples(&self.grid, m)?;
        let out = self.spectrum().iter().zip(w).map(|(c, v)| c * v).collect();
        Ok(Self::from_spectrum(self.grid, out))
    }

    /// ∂/∂x₁ by the spectral multiplier iξ₁.
    pub fn axis_derivative(&self) -> GridField {
        self.partial_derivative(0)
    }

    /// ∂/∂x_axis; the Nyquist mode is dropped.
    pub fn partial_derivative(&self, axis: usize) -> GridField {
        let spec = self.spectrum();
        let g = &self.grid;
        let out = spec
            .iter()
            .enumerate()
            .map(|(flat, c)| {
                let j = g.indices(flat)[axis];
                let xi = if g.wrap(j) == -(g.points_per_axis as i64 / 2) { 0.0 } else { g.frequency(j) };
                c * Complex64::new(0.0, xi)
            })
            .collect();
        Self::from_spectrum(*g, out)
    }

    /// ∂/∂x_axis with Lanczos σ-factors: the symbol i·sin(ξ dx)/dx, the
    /// centered difference. Used for fields whose spectrum decays slowly,
    /// where the bare iξ alternates between neighbouring cells.
    pub fn smoothed_partial_derivative(&self, axis: usize) -> GridField {
        let spec = self.spectrum();
        let g = &self.grid;
        let h = g.spacing();
        let out = spec
            .iter()
            .enumerate()
            .map(|(flat, c)| {
                let xi = g.frequency(g.indices(flat)[axis]);
                c * Complex64::new(0.0, (xi * h).sin() / h)
            })
            .collect();
        Self::from_spectrum(*g, out)
    }

    /// Circular convolution (f ∗ g)(x) = ∫ f(x − y) g(y) dy.
    pub fn convolve(&self, other: &GridField) -> Result<GridField> {
        if self.grid != other.grid {
            return config("convolution of fields on different grids");
        }
        let out = self
            .spectrum()
            .iter()
            .zip(other.spectrum())
            .map(|(a, b)| a * b)
            .collect();
        Ok(Self::from_spectrum(self.grid, out))
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.grid.cell()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        (self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * self.grid.cell()).powf(1.0 / p)
    }

    pub fn l1_distance(&self, other: &GridField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * self.grid.cell()
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Values at j·dx, j = 0 … n/2 − 1, along the positive first axis.
    pub fn axis_profile(&self) -> (Vec<f64>, Vec<f64>) {
        let g = &self.grid;
        let h = g.spacing();
        (0..g.points_per_axis / 2)
            .map(|j| (j as f64 * h, self.values[g.axis_index(j)]))
            .unzip()
    }

    /// Largest |value| on the boundary layer |x|_∞ = Λ relative to the
    /// largest |value|.
    pub fn boundary_ratio(&self) -> f64 {
        let g = &self.grid;
        let half = g.points_per_axis / 2;
        let mut worst = 0.0f64;
        for (flat, v) in self.values.iter().enumerate() {
            let idx = g.indices(flat);
            if (0..g.dimension).any(|a| idx[a] == half) {
                worst = worst.max(v.abs());
            }
        }
        worst / self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Values in natural order (from −Λ upwards on every axis).
    pub fn natural_order(&self) -> Vec<f64> {
        let g = &self.grid;
        let n = g.points_per_axis;
        let half = n / 2;
        let mut out = vec![0.0; self.values.len()];
        for (flat, v) in self.values.iter().enumerate() {
            let idx = g.indices(flat);
            let mut dst = 0;
            for a in 0..g.dimension {
                dst = dst * n + (idx[a] + half) % n;
            }
            out[dst] = *v;
        }
        out
    }

    /// `x,value` lines in increasing x (one-dimensional fields).
    pub fn to_csv(&self) -> Result<String> {
        if self.grid.dimension != 1 {
            return config("CSV export is for one-dimensional fields; use the binary export");
        }
        let g = &self.grid;
        let mut s = String::from("x,value\n");
        for (i, v) in self.natural_order().iter().enumerate() {
            let x = (i as f64 - (g.points_per_axis / 2) as f64) * g.spacing();
            let _ = writeln!(s, "{x:.12e},{v:.12e}");
        }
        Ok(s)
    }

    /// Row-major little-endian f64 values in natural order.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.natural_order().iter().flat_map(|v| v.to_le_bytes()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_roundtrip_1d() {
        let g = SpaceGrid::new(1, 20.0, 256).unwrap();
        let f = GridField::from_fn(g, |x| (-x[0] * x[0]).exp());
        // continuous transform √π e^{−ξ²/4}
        let s = f.spectrum();
        for j in [0usize, 3, 10] {
            let xi = g.frequency(j);
            assert!((s[j].re - PI.sqrt() * (-xi * xi / 4.0).exp()).abs() < 1e-12);
        }
        let back = GridField::from_spectrum(g, s.to_vec());
        for (a, b) in back.values.iter().zip(&f.values) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((f.mass() - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn multiplier_gaussian_2d() {
        // m(|ξ|) = e^{−|ξ|²} is the transform of (4π)^{−1} e^{−|x|²/4}
        let g = SpaceGrid::new(2, 16.0, 128).unwrap();
        let f = GridField::from_radial_multiplier(g, |r| Ok((-r * r).exp())).unwrap();
        for flat in [0usize, 5, 130, 1000] {
            let r = g.radius(flat);
            let exact = (-r * r / 4.0).exp() / (4.0 * PI);
            assert!((f.values[flat] - exact).abs() < 1e-13);
        }
        let dx = f.axis_derivative();
        let j = 7;
        let x = g.coordinate(j);
        let exact = -x / 2.0 * (-x * x / 4.0).exp() / (4.0 * PI);
        assert!((dx.values[g.axis_index(j)] - exact).abs() < 1e-12);
    }

    #[test]
    fn convolution_of_gaussians() {
        let g = SpaceGrid::new(1, 30.0, 512).unwrap();
        let a = GridField::from_fn(g, |x| (-x[0] * x[0] / 2.0).exp() / (2.0 * PI).sqrt());
        let c = a.convolve(&a).unwrap();
        let exact = GridField::from_fn(g, |x| (-x[0] * x[0] / 4.0).exp() / (4.0 * PI).sqrt());
        assert!(c.l1_distance(&exact) < 1e-12);
    }

    #[test]
    fn natural_order_and_csv() {
        let g = SpaceGrid::new(1, 1.0, 64).unwrap();
        let f = GridField::from_fn(g, |x| x[0]);
        let nat = f.natural_order();
        assert!((nat[0] + 1.0).abs() < 1e-15);
        assert!(nat.windows(2).all(|w| w[1] > w[0]));
        let csv = f.to_csv().unwrap();
        assert!(csv.starts_with("x,value\n-1.000000000000e0,"));
        assert_eq!(f.to_bytes().len(), 64 * 8);
        assert!(SpaceGrid::new(1, 1.0, 100).is_err());
    }
}
