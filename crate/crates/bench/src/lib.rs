//! Shared fixtures for the criterion benchmarks.

use nonlocal_frac::grid::{GridField, SpaceGrid};
use nonlocal_frac::kernel_scales::{default_symbol, JumpKernel, KernelScales, LevySymbol};
use nonlocal_frac::sv_calculus::ScalingProfile;

/// Symbol and scale tables for a catalog profile in dimension d.
pub fn symbol(spec: &str, d: usize) -> (LevySymbol, KernelScales) {
    let p = ScalingProfile::from_catalog(spec).expect("catalog profile");
    let k = JumpKernel::for_profile(&p, d).expect("jump kernel");
    (default_symbol(&k).expect("symbol"), KernelScales::new(&p).expect("scales"))
}

pub fn gaussian(grid: SpaceGrid) -> GridField {
    GridField::from_fn(grid, |x| (-x.iter().map(|v| v * v).sum::<f64>()).exp())
}
