//! End-to-end acceptance criteria. Each test writes one PASS/FAIL line to
//! standard error (bypassing output capture) and then asserts.

use nonlocal_frac::fundamental_solution::*;
use nonlocal_frac::grid::{GridField, SpaceGrid};
use nonlocal_frac::heat_kernel::{chapman_kolmogorov_defect, heat_kernel_grid, ANNULUS_CELLS};
use nonlocal_frac::kernel_scales::*;
use nonlocal_frac::mittag_leffler::{ml, ml_recurrence_residual, MLParams};
use nonlocal_frac::solver::*;
use nonlocal_frac::subordination::{erfc, monte_carlo_gate, SubordinatorSpec};
use nonlocal_frac::sv_calculus::*;
use nonlocal_frac::Error;
use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

fn line(n: u32, title: &str, ok: bool, elapsed: Duration, limit_s: u64, detail: &str) {
    let in_time = elapsed.as_secs_f64() <= limit_s as f64;
    let verdict = if ok && in_time { "PASS" } else { "FAIL" };
    let msg = format!(
        "criterion {n:>2} [{verdict}] {title}: {detail} ({:.1} s, limit {limit_s} s)\n",
        elapsed.as_secs_f64()
    );
    let _ = std::io::stderr().write_all(msg.as_bytes());
}

fn finish(n: u32, title: &str, start: Instant, limit_s: u64, failures: &[String], detail: &str) {
    let elapsed = start.elapsed();
    let ok = failures.is_empty();
    let detail = if ok { detail.to_string() } else { failures.join("; ") };
    line(n, title, ok, elapsed, limit_s, &detail);
    assert!(ok, "{}", failures.join("\n"));
    assert!(elapsed.as_secs() <= limit_s, "runtime {:?} over {limit_s} s", elapsed);
}

fn profile(spec: &str) -> ScalingProfile {
    ScalingProfile::from_catalog(spec).unwrap()
}

fn symbol_and_scales(spec: &str, d: usize) -> (LevySymbol, KernelScales) {
    let p = profile(spec);
    let k = JumpKernel::for_profile(&p, d).unwrap();
    (default_symbol(&k).unwrap(), KernelScales::new(&p).unwrap())
}

const ALPHAS: [f64; 3] = [1.0 / 3.0, 0.5, 2.0 / 3.0];

#[test]
fn criterion_01_mittag_leffler() {
    let start = Instant::now();
    let mut fails = Vec::new();
    // 200 log-spaced |z| in [1e-3, 30] on the negative axis and in [1e-3, 1] on the positive one
    let mut worst_exp = 0.0f64;
    for i in 0..200 {
        let z = if i < 150 {
            -(10f64.powf(-3.0 + (3.0 + 30f64.log10()) * i as f64 / 149.0))
        } else {
            10f64.powf(-3.0 + 3.0 * (i - 150) as f64 / 49.0)
        };
        let e = ml(1.0, 1.0, z).unwrap();
        worst_exp = worst_exp.max((e - z.exp()).abs() / z.exp());
    }
    if worst_exp >= 1e-10 {
        fails.push(format!("E_1,1 vs exp: {worst_exp:.2e}"));
    }
    let half = (ml(0.5, 1.0, -1.0).unwrap() - 1f64.exp() * erfc(1.0)).abs();
    if half >= 1e-8 {
        fails.push(format!("E_1/2,1(-1) vs e·erfc(1): {half:.2e}"));
    }
    let mut worst_rec = 0.0f64;
    for a in [0.3, 0.5, 0.7, 0.9] {
        for b in [a, 1.0, 1.0 + a, 2.0] {
            let p = MLParams::new(a, b).unwrap();
            let mut zs = vec![0.0];
            zs.extend((0..=24).map(|k| -(10f64.powf(-2.0 + k as f64 / 4.0))));
            for z in zs {
                worst_rec = worst_rec.max(ml_recurrence_residual(p, z).unwrap());
            }
        }
    }
    if worst_rec >= 1e-8 {
        fails.push(format!("recurrence residual {worst_rec:.2e}"));
    }
    finish(
        1,
        "Mittag-Leffler correctness",
        start,
        10,
        &fails,
        &format!("exp rel {worst_exp:.1e}, erfc {half:.1e}, recurrence {worst_rec:.1e}"),
    );
}

#[test]
fn criterion_02_heat_kernel_closed_form() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let (sym, _) = symbol_and_scales("power:1", 1);
    let mut worst = 0.0f64;
    let mut mass_err = 0.0f64;
    for t in [0.5, 1.0, 2.0] {
        let n = if t < 1.0 { 1 << 17 } else { 1 << 16 };
        let g = SpaceGrid::new(1, 2048.0, n).unwrap();
        let f = heat_kernel_grid(&sym, t, &g).unwrap();
        mass_err = mass_err.max((f.mass() - 1.0).abs());
        let dx = g.spacing();
        for j in 0..n {
            let x = g.coordinate(j);
            if x.abs() > 10.0 || (x.abs() < ANNULUS_CELLS as f64 * dx && x != 0.0) {
                continue;
            }
            let exact = t / (PI * (t * t + x * x));
            worst = worst.max((f.values[j] / exact - 1.0).abs());
        }
    }
    if worst >= 1e-4 {
        fails.push(format!("closed-form relative error {worst:.2e}"));
    }
    if mass_err >= 1e-6 {
        fails.push(format!("mass error {mass_err:.2e}"));
    }
    let g = SpaceGrid::new(1, 2048.0, 1 << 16).unwrap();
    let ck = chapman_kolmogorov_defect(&sym, 1.0, 1.0, &g).unwrap();
    if ck >= 1e-6 {
        fails.push(format!("Chapman–Kolmogorov defect {ck:.2e}"));
    }
    finish(
        2,
        "heat kernel closed form",
        start,
        30,
        &fails,
        &format!("max rel {worst:.1e}, mass {mass_err:.1e}, CK {ck:.1e}"),
    );
}

#[test]
fn criterion_03_fundamental_solution_mass() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let (sym, sc) = symbol_and_scales("power:1", 1);
    let mut spreads = Vec::new();
    for alpha in ALPHAS {
        for beta in [alpha, 1.0, alpha + 1.0] {
            let spec = FundamentalSolutionSpec::new(sym.clone(), alpha, beta).unwrap();
            match check_q_mass_scaling(&spec, &sc, &[0.25, 0.5, 1.0, 2.0], q_options(1)) {
                Ok(rep) => {
                    let s = rep.fitted_value("spread").unwrap();
                    spreads.push(s);
                    if !rep.passed() {
                        fails.push(format!("α={alpha:.3} β={beta:.3}: {:?}", rep.fitted));
                    }
                }
                Err(e) => fails.push(format!("α={alpha:.3} β={beta:.3}: {e}")),
            }
        }
    }
    let top = spreads.iter().copied().fold(0.0, f64::max);
    finish(
        3,
        "fundamental solution mass and scaling",
        start,
        120,
        &fails,
        &format!("9 (α, β) pairs, worst band ratio {top:.3}"),
    );
}

#[test]
fn criterion_04_subordination_cross_check() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let gate = monte_carlo_gate(SubordinatorSpec::new(0.5).unwrap(), 1.0, 1_000_000, 20240611).unwrap();
    let ks = gate.fitted_value("ks").unwrap();
    if !gate.passed() {
        fails.push(format!("Monte-Carlo gate KS {ks:.2e}"));
    }
    let (sym, sc) = symbol_and_scales("power:1", 1);
    let spec = FundamentalSolutionSpec::new(sym, 0.5, 0.5).unwrap();
    let mut dists = Vec::new();
    if gate.passed() {
        for t in [0.5, 1.0] {
            let q = q_auto(&spec, &sc, t, q_options(1)).unwrap();
            let rep = check_route_consistency(
                &q,
                0.5,
                t,
                |r, x| r / (PI * (r * r + x * x)),
                |x| 1.0 / (2.0 * PI * x),
                8.0,
            )
            .unwrap();
            let key = rep.fitted.keys().find(|k| k.contains("l1")).cloned();
            let dist = key.and_then(|k| rep.fitted_value(&k)).unwrap_or(f64::NAN);
            dists.push(dist);
            if !rep.passed() {
                fails.push(format!("t={t}: {:?}", rep.fitted));
            }
        }
    }
    finish(
        4,
        "subordination cross-check",
        start,
        300,
        &fails,
        &format!("KS {ks:.1e} over 1e6 paths, relative L1 {}", dists.iter().map(|d| format!("{d:.1e}")).collect::<Vec<_>>().join(", ")),
    );
}

#[test]
fn criterion_05_pointwise_q_bound() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    let mut count = 0;
    for (name, opts) in [("power:1", q_options(1)), ("power:0.5", q_options_slow(1)), ("log", q_options_slow(1))] {
        let (sym, sc) = symbol_and_scales(name, 1);
        for alpha in ALPHAS {
            for beta in [alpha, 1.0, alpha + 1.0] {
                let spec = FundamentalSolutionSpec::new(sym.clone(), alpha, beta).unwrap();
                for m in [0usize, 1] {
                    count += 1;
                    match check_q_pointwise(&spec, &sc, &[0.5, 1.0, 2.0], m, opts) {
                        Ok(rep) => {
                            worst = worst.max(rep.fitted_value("spread").unwrap());
                            if !rep.passed() {
                                fails.push(format!("{name} α={alpha:.3} β={beta:.3} m={m}: {:?}", rep.fitted));
                            }
                        }
                        Err(e) => fails.push(format!("{name} α={alpha:.3} β={beta:.3} m={m}: {e}")),
                    }
                }
            }
        }
    }
    finish(
        5,
        "pointwise q bound",
        start,
        300,
        &fails,
        &format!("{count} (symbol, α, β, m) cases, worst max/min {worst:.3}"),
    );
}

#[test]
fn criterion_06_cz_kernel_integrals() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let (sym, sc) = symbol_and_scales("power:1", 1);
    let b = [0.5, 1.0, 2.0, 4.0];
    let cz = check_cz_kernel_bounds(&sym, &sc, 0.5, &b, cz_options(1)).unwrap();
    if !cz.passed() {
        fails.push(format!("kernel integrals: {:?}", cz.fitted));
    }
    let lem = check_integral_lemmas(&sc, 0.5, &b, &[1.0, 2.0]).unwrap();
    if !lem.passed() {
        fails.push(format!("lemma products: {:?}", lem.fitted));
    }
    let get = |r: &nonlocal_frac::BoundReport, k: &str| r.fitted_value(k).unwrap_or(f64::NAN);
    finish(
        6,
        "Calderón–Zygmund kernel integrals",
        start,
        600,
        &fails,
        &format!(
            "B1 spread {:.3}, B0 spread {:.3}, k=1 {:.3}, k=2 {:.3}, triple {:.3}",
            get(&cz, "B1_spread"),
            get(&cz, "B0_spread"),
            get(&lem, "offdiag_spread[k=1]"),
            get(&lem, "offdiag_spread[k=2]"),
            get(&lem, "triple_spread")
        ),
    );
}

#[test]
fn criterion_07_solver_residual() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let (sym, _) = symbol_and_scales("power:1", 1);
    let g = SpaceGrid::new(1, 8.0, 256).unwrap();
    let f = GridField::from_fn(g, |x| (-x[0] * x[0]).exp());
    let mut parts = Vec::new();
    for alpha in ALPHAS {
        let rep = check_solver_residual(&sym, alpha, &f, 1.0, 512).unwrap();
        let (r0, r1) = (rep.fitted_value("residual").unwrap(), rep.fitted_value("residual_refined").unwrap());
        parts.push(format!("α={alpha:.3}: {r0:.4} → {r1:.4}"));
        if !rep.passed() {
            fails.push(format!("α={alpha:.3}: residual {r0:.4}, refined {r1:.4}"));
        }
    }
    finish(7, "solver residual", start, 300, &fails, &parts.join(", "));
}

#[test]
fn criterion_08_apriori_estimate() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let specs: Vec<MixedNormSpec> = [(2.0, 2.0), (3.0, 3.0), (2.0, 4.0)]
        .iter()
        .map(|(p, q)| MixedNormSpec::new(*p, *q, 1.0).unwrap())
        .collect();
    let setup = SampleSetup {
        dimension: 1,
        half_width: PI,
        points_per_axis: 64,
        horizon: 1.0,
        steps: 64,
        samples: 20,
        seed: 20240611,
    };
    let mut worst = 0.0f64;
    for (name, alpha) in [("power:1", 0.5), ("log", 1.0 / 3.0)] {
        let (sym, _) = symbol_and_scales(name, 1);
        let suite = apriori_suite(&sym, alpha, &setup, &specs).unwrap();
        for r in suite.estimates.iter().chain([&suite.cz_l2]) {
            worst = worst.max(r.fitted_value("growth").unwrap());
            if !r.passed() {
                fails.push(format!("{name}: {} {:?}", r.name, r.fitted));
            }
        }
    }
    finish(
        8,
        "empirical a priori estimate",
        start,
        900,
        &fails,
        &format!("20 samples, 3 norms + L² Calderón–Zygmund, 2 symbols, worst growth {worst:.3}"),
    );
}

#[test]
fn criterion_09_class_g_catalog() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let families = [
        "log",
        "log-pow:1,1,1",
        "log-pow:2,0.5,1",
        "exp-log-pow:0.25",
        "exp-log-pow:0.4",
        "sin-log",
        "iter-log-ratio",
        "cos-iter-log",
    ];
    for name in families {
        let rep = class_g_default(&profile(name)).unwrap();
        if rep.verdict != ClassGVerdict::InG {
            fails.push(format!("{name}: {:?} growth {:?}", rep.verdict, rep.growth));
        }
    }
    let root = profile("power:0.5");
    let rep = class_g_default(&root).unwrap();
    let growth = class_g_statistic(&root, 1.0, 1e8).unwrap() / class_g_statistic(&root, 1.0, 1e4).unwrap();
    if rep.verdict != ClassGVerdict::NotInG || growth < 10.0 {
        fails.push(format!("r^0.5: {:?}, growth {growth:.1}", rep.verdict));
    }
    let root_scales = KernelScales::new(&root).unwrap();
    let route = classify_route(&root, Some(&root_scales)).unwrap();
    if route != Route::HComparable {
        fails.push(format!("r^0.5 routed {route:?}"));
    }
    let capped = classify_route(&profile("log-capped:0.5"), None).unwrap();
    if capped != Route::Bounded {
        fails.push(format!("r^0.5 ∧ 1 routed {capped:?}"));
    }
    let r = default_scaling_grid();
    let v: Vec<f64> = r.iter().map(|x| 1.0 / x.ln_1p()).collect();
    let ex = Exponents {
        large: [0.0, 0.5],
        small: Some([0.5, 1.5]),
    };
    let rejected = match ScalingProfile::tabulated("inv-log", &r, &v, ex) {
        Ok(p) => matches!(p.validate(), Err(Error::Config(_))),
        Err(_) => true,
    };
    if !rejected {
        fails.push("1/log(1+r) accepted".into());
    }
    finish(
        9,
        "class-G catalog",
        start,
        60,
        &fails,
        &format!(
            "{} families in_g, r^0.5 not_in_g (growth {growth:.0}×) routed h-comparable, capped routed bounded, 1/log rejected",
            families.len()
        ),
    );
}

#[test]
fn criterion_10_scale_function_identities() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let names = [
        "power:1",
        "power:0.5",
        "log",
        "log-pow:0.5,1,1",
        "log-capped:0.5",
        "exp-log-pow:0.25",
        "sin-log",
        "cos-iter-log",
    ];
    let mut sum_err = 0.0f64;
    let mut tail_err = 0.0f64;
    let mut upper = 0.0f64;
    let mut skipped = Vec::new();
    for name in names {
        let p = profile(name);
        if !p.full_range() {
            skipped.push(name);
            continue;
        }
        let sc = KernelScales::new(&p).unwrap();
        for a in [1e-3, 0.1, 1.0, 10.0, 1e3] {
            let (k, l, h) = (compute_k(&p, a).unwrap(), compute_l(&p, a).unwrap(), compute_h(&p, a).unwrap());
            sum_err = sum_err.max((h - k - l).abs() / h);
            let i = sc.r.iter().position(|r| (r / a - 1.0).abs() < 1e-9);
            if let Some(i) = i {
                sum_err = sum_err.max((sc.h[i] - sc.k[i] - sc.l[i]).abs() / sc.h[i]);
            }
            let tail = k_tail_integral(&p, a).unwrap();
            tail_err = tail_err.max((0.5 * (k + l) - tail).abs() / tail);
        }
        for d in 1..=3 {
            let sym = default_symbol(&JumpKernel::for_profile(&p, d).unwrap()).unwrap();
            let rep = check_symbol_h_comparability(&sym, &sc).unwrap();
            let u = rep.fitted_value("upper").unwrap_or(f64::NAN);
            upper = upper.max(u);
            if !rep.passed() || !(u <= 2.1) {
                fails.push(format!("{name} d={d}: {:?}", rep.fitted));
            }
        }
    }
    if sum_err >= 1e-10 {
        fails.push(format!("h − K − L relative {sum_err:.2e}"));
    }
    if tail_err >= 1e-6 {
        fails.push(format!("½(K+L) vs tail integral relative {tail_err:.2e}"));
    }
    finish(
        10,
        "scale-function identities",
        start,
        120,
        &fails,
        &format!(
            "h=K+L {sum_err:.1e}, ½(K+L) tail {tail_err:.1e}, upper ψ/h {upper:.3} over d=1..3 (skipped, no exponents near zero: {skipped:?})"
        ),
    );
}
