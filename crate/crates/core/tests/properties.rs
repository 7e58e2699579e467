use nonlocal_frac::fractional_time::{caputo, rl_integral, TimeSeries};
use nonlocal_frac::grid::{GridField, SpaceGrid};
use nonlocal_frac::kernel_scales::{default_symbol, invert_h, JumpKernel, KernelScales, LevySymbol};
use nonlocal_frac::mittag_leffler::{ml, ml_recurrence_residual, MLParams};
use nonlocal_frac::solver::{mixed_norm, solve_zero_ic, MixedNormSpec, RandomForcing};
use nonlocal_frac::subordination::{phi_cdf, stable_density};
use nonlocal_frac::sv_calculus::ScalingProfile;
use proptest::prelude::*;
use std::sync::OnceLock;

fn cauchy() -> &'static (LevySymbol, KernelScales) {
    static S: OnceLock<(LevySymbol, KernelScales)> = OnceLock::new();
    S.get_or_init(|| {
        let p = ScalingProfile::from_catalog("power:1").unwrap();
        let k = JumpKernel::for_profile(&p, 1).unwrap();
        (default_symbol(&k).unwrap(), KernelScales::new(&p).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ml_recurrence_holds(a in 0.2f64..1.0, b in 0.3f64..2.5, x in -200.0f64..0.0) {
        let r = ml_recurrence_residual(MLParams::new(a, b).unwrap(), x).unwrap();
        prop_assert!(r < 1e-8, "a={a} b={b} z={x}: {r}");
    }

    #[test]
    fn ml_completely_monotone_on_negative_axis(a in 0.2f64..1.0, x in 0.0f64..50.0, dx in 0.01f64..5.0) {
        let e0 = ml(a, 1.0, -x).unwrap();
        let e1 = ml(a, 1.0, -x - dx).unwrap();
        prop_assert!(e1 > 0.0 && e1 <= e0 + 1e-14);
    }

    #[test]
    fn fractional_integral_is_positive_and_linear(
        alpha in 0.1f64..1.5,
        c in proptest::collection::vec(0.0f64..1.0, 4),
        k in -3.0f64..3.0,
    ) {
        let f = |t: f64| c[0] + c[1] * t + c[2] * (5.0 * t).sin().abs() + c[3] * t * t;
        let a = TimeSeries::on_interval(1.0, 64, f).unwrap();
        let b = TimeSeries::on_interval(1.0, 64, |t| (3.0 * t).cos()).unwrap();
        let ia = rl_integral(&a, alpha).unwrap();
        prop_assert!(ia.values.iter().all(|v| *v >= 0.0));
        let sum = TimeSeries::new(a.dt, a.values.iter().zip(&b.values).map(|(x, y)| x + k * y).collect()).unwrap();
        let ib = rl_integral(&b, alpha).unwrap();
        let is = rl_integral(&sum, alpha).unwrap();
        for i in 0..is.len() {
            prop_assert!((is.values[i] - ia.values[i] - k * ib.values[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn caputo_kills_constants(alpha in 0.05f64..1.0, c in -10.0f64..10.0) {
        let s = TimeSeries::on_interval(2.0, 50, |_| c).unwrap();
        prop_assert!(caputo(&s, alpha).unwrap().values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn stable_density_is_positive(alpha in 0.15f64..0.95, s in 0.01f64..50.0) {
        let v = stable_density(alpha, s).unwrap();
        prop_assert!(v.is_finite() && v >= 0.0);
    }

    #[test]
    fn inverse_subordinator_cdf_is_monotone(alpha in 0.2f64..0.9, t in 0.1f64..3.0, r in 0.01f64..3.0) {
        let a = phi_cdf(alpha, t, r).unwrap();
        let b = phi_cdf(alpha, t, r * 1.3).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&a));
        prop_assert!(b >= a - 1e-10);
    }

    #[test]
    fn h_inverse_roundtrip(e in -4.0f64..4.0) {
        let (_, sc) = cauchy();
        let v = 10f64.powf(e);
        let r = invert_h(sc, v).unwrap();
        prop_assert!((sc.h(r).unwrap() / v - 1.0).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mixed_norm_triangle_inequality(
        s1 in 0u64..1000, s2 in 0u64..1000,
        p in 1.1f64..6.0, q in 1.1f64..6.0,
    ) {
        let g = SpaceGrid::new(1, 3.0, 64).unwrap();
        let a = RandomForcing::new(1, 12, 3, s1).unwrap().sample(g, 1.0, 16).unwrap();
        let b = RandomForcing::new(1, 12, 3, s2).unwrap().sample(g, 1.0, 16).unwrap();
        let spec = MixedNormSpec::new(p, q, 1.0).unwrap();
        let lhs = mixed_norm(&a.combine(1.0, &b, 1.0).unwrap(), &spec).unwrap();
        let rhs = mixed_norm(&a, &spec).unwrap() + mixed_norm(&b, &spec).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        let scaled = mixed_norm(&a.combine(-2.5, &a, 0.0).unwrap(), &spec).unwrap();
        prop_assert!((scaled - 2.5 * mixed_norm(&a, &spec).unwrap()).abs() < 1e-12 * scaled);
    }

    #[test]
    fn solver_is_linear(s1 in 0u64..1000, s2 in 0u64..1000, k in -3.0f64..3.0, alpha in 0.2f64..1.0) {
        let (sym, _) = cauchy();
        let g = SpaceGrid::new(1, 4.0, 64).unwrap();
        let a = RandomForcing::new(1, 8, 3, s1).unwrap().sample(g, 1.0, 24).unwrap();
        let b = RandomForcing::new(1, 8, 3, s2).unwrap().sample(g, 1.0, 24).unwrap();
        let ua = solve_zero_ic(sym, alpha, &a).unwrap();
        let ub = solve_zero_ic(sym, alpha, &b).unwrap();
        let us = solve_zero_ic(sym, alpha, &a.combine(1.0, &b, k).unwrap()).unwrap();
        let defect = us.combine(1.0, &ua.combine(1.0, &ub, k).unwrap(), -1.0).unwrap();
        prop_assert!(defect.max_abs() < 1e-12 * (1.0 + us.max_abs()));
    }

    #[test]
    fn multipliers_preserve_evenness(a in 0.2f64..3.0, t in 0.1f64..2.0) {
        let (sym, _) = cauchy();
        let g = SpaceGrid::new(1, 8.0, 128).unwrap();
        let f = GridField::from_fn(g, |x| (-a * x[0] * x[0]).exp());
        let u = f.apply_radial_multiplier(|r| Ok((-t * sym.eval(r)?).exp())).unwrap();
        for j in 1..64 {
            prop_assert!((u.values[j] - u.values[128 - j]).abs() < 1e-13);
        }
        prop_assert!((u.mass() - f.mass()).abs() < 1e-12 * f.mass());
    }
}
