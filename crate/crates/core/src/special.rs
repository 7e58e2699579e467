//! Gamma-family helpers, the order-zero Bessel function and spherical cosine averages.

use std::f64::consts::PI;

// Taylor coefficients of 1/Γ(1+y) about y = 0.
const RGAMMA_1P: [f64; 25] = [
    1.000_000_000_000_000_00e0,
    5.772_156_649_015_328_66e-1,
    -6.558_780_715_202_539_02e-1,
    -4.200_263_503_409_523_70e-2,
    1.665_386_113_822_914_79e-1,
    -4.219_773_455_554_433_34e-2,
    -9.621_971_527_876_973_03e-3,
    7.218_943_246_663_099_90e-3,
    -1.165_167_591_859_065_17e-3,
    -2.152_416_741_149_509_75e-4,
    1.280_502_823_881_161_96e-4,
    -2.013_485_478_078_823_87e-5,
    -1.250_493_482_142_670_63e-6,
    1.133_027_231_981_695_93e-6,
    -2.056_338_416_977_607_07e-7,
    6.116_095_104_481_416_09e-9,
    5.002_007_644_469_222_95e-9,
    -1.181_274_570_487_020_04e-9,
    1.043_426_711_691_100_54e-10,
    7.782_263_439_905_070_81e-12,
    -3.696_805_618_642_205_98e-12,
    5.100_370_287_454_475_75e-13,
    -2.058_326_053_566_506_64e-14,
    -5.348_122_539_423_017_82e-15,
    1.226_778_628_238_260_84e-15,
];

fn rgamma_near_one(y: f64) -> f64 {
    RGAMMA_1P.iter().rev().fold(0.0, |acc, c| acc * y + c)
}

/// Γ(x): series for 1/Γ on [1/2, 3/2], exact products outside, reflection
/// for negative arguments.
pub fn gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 && x == x.round() {
        return f64::NAN;
    }
    if x < 0.5 {
        return PI / (sin_pi(x) * gamma(1.0 - x));
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    let n = x.round();
    let y = x - n;
    // Γ(x) = Γ(1+y) (y+1)(y+2)...(y+n-1)
    let mut g = 1.0 / rgamma_near_one(y);
    let mut k = 1.0;
    while k < n {
        g *= y + k;
        k += 1.0;
    }
    g
}

/// ln|Γ(x)|.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI.ln() - sin_pi(x).abs().ln() - ln_gamma(1.0 - x);
    }
    if x < 150.0 {
        return gamma(x).ln();
    }
    // Stirling series
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

/// sin(πx) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).floor();
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    if r < 0.5 {
        (PI * r).sin()
    } else if r < 1.5 {
        (PI * (1.0 - r)).sin()
    } else {
        (PI * (r - 2.0)).sin()
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// 1/Γ(x); the poles of Γ give exactly zero.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > 0.5 && x < 1.5 {
        return rgamma_near_one(x - 1.0);
    }
    if x > 0.5 {
        if x > 170.0 {
            return (-ln_gamma(x)).exp();
        }
        return 1.0 / gamma(x);
    }
    // reflection: 1/Γ(x) = sin(πx) Γ(1-x) / π
    let s = sin_pi(x);
    let y = 1.0 - x;
    if y > 170.0 {
        s.signum() * (ln_gamma(y) + s.abs().ln() - PI.ln()).exp()
    } else {
        s * gamma(y) / PI
    }
}

/// ln|1/Γ(x)| and its sign, for terms that overflow in direct form.
/// Returns (sign, log-magnitude); sign is 0 at the poles.
pub fn rgamma_log(x: f64) -> (f64, f64) {
    if is_nonpositive_integer(x) {
        return (0.0, f64::NEG_INFINITY);
    }
    if x > 0.0 {
        return (1.0, -ln_gamma(x));
    }
    let s = sin_pi(x);
    (s.signum(), s.abs().ln() + ln_gamma(1.0 - x) - PI.ln())
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 14.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            term *= -q / (k * k);
            sum += term;
            if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > q.sqrt() {
                break;
            }
            k += 1.0;
        }
        sum
    } else {
        let (p, q) = hankel_pq(x);
        let phase = x - 0.25 * PI;
        (2.0 / (PI * x)).sqrt() * (p * phase.cos() - q * phase.sin())
    }
}

fn hankel_pq(x: f64) -> (f64, f64) {
    let mut t = 1.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        t *= -(odd * odd) / (kf * 8.0 * x);
        if t.abs() > prev || t.abs() < 1e-18 {
            break;
        }
        prev = t.abs();
        match k % 4 {
            0 => p += t,
            1 => q += t,
            2 => p -= t,
            _ => q -= t,
        }
    }
    (p, q)
}

/// Spherical average of cos(ξ·x) over |x| = u/|ξ| in dimension d.
pub fn spherical_cos_avg(d: usize, u: f64) -> f64 {
    match d {
        1 => u.cos(),
        2 => bessel_j0(u),
        3 => {
            if u == 0.0 {
                1.0
            } else {
                u.sin() / u
            }
        }
        _ => f64::NAN,
    }
}

/// 1 - A_d(u) without cancellation for small u.
pub fn one_minus_cos_avg(d: usize, u: f64) -> f64 {
    if u < 1e-4 {
        return u * u / (2.0 * d as f64);
    }
    match d {
        1 => {
            let s = (0.5 * u).sin();
            2.0 * s * s
        }
        2 => {
            if u < 2.0 {
                let q = 0.25 * u * u;
                let mut term = 1.0;
                let mut sum = 0.0;
                let mut k = 1.0;
                loop {
                    term *= -q / (k * k);
                    sum -= term;
                    if term.abs() < 1e-18 {
                        break;
                    }
                    k += 1.0;
                }
                sum
            } else {
                1.0 - bessel_j0(u)
            }
        }
        3 => {
            if u < 1.0 {
                let u2 = u * u;
                let mut term = 1.0;
                let mut sum = 0.0;
                let mut k = 1.0;
                loop {
                    term *= -u2 / ((2.0 * k) * (2.0 * k + 1.0));
                    sum -= term;
                    if term.abs() < 1e-18 {
                        break;
                    }
                    k += 1.0;
                }
                sum
            } else {
                1.0 - u.sin() / u
            }
        }
        _ => f64::NAN,
    }
}

/// Surface measure of the unit sphere in R^d.
pub fn sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_values() {
        assert_relative_eq!(gamma(5.0), 24.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(0.5), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(-0.5), -2.0 * PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn rgamma_poles_vanish() {
        for k in 0..6 {
            assert_eq!(rgamma(-(k as f64)), 0.0);
        }
        assert_relative_eq!(rgamma(1.5), 1.0 / gamma(1.5), max_relative = 1e-14);
        assert_relative_eq!(rgamma(-2.5), 1.0 / gamma(-2.5), max_relative = 1e-12);
        let (s, l) = rgamma_log(-2.5);
        assert_relative_eq!(s * l.exp(), rgamma(-2.5), max_relative = 1e-12);
        assert!(rgamma(175.0) > 0.0 && rgamma(175.0) < 1e-300);
    }

    #[test]
    fn sin_pi_is_exact_at_integers_and_halves() {
        assert_eq!(sin_pi(3.0), 0.0);
        assert_eq!(sin_pi(-4.0), 0.0);
        assert_relative_eq!(sin_pi(0.5), 1.0);
        assert_relative_eq!(sin_pi(-0.5), -1.0);
        assert_relative_eq!(sin_pi(2.25), (PI * 0.25).sin(), max_relative = 1e-15);
    }

    #[test]
    fn j0_against_reference_values() {
        // tabulated J0 values
        assert_relative_eq!(bessel_j0(1.0), 0.765_197_686_557_966_6, max_relative = 1e-13);
        assert_relative_eq!(bessel_j0(10.0), -0.245_935_764_451_348_3, max_relative = 1e-11);
        assert_relative_eq!(bessel_j0(20.0), 0.167_024_664_340_583_2, max_relative = 1e-10);
        assert_relative_eq!(bessel_j0(50.0), 0.055_812_327_669_251_86, max_relative = 1e-10);
    }

    #[test]
    fn j0_continuous_across_branch() {
        let a = bessel_j0(14.0 - 1e-12);
        let b = bessel_j0(14.0 + 1e-12);
        assert!((a - 0.171_073_476_110_458_66).abs() < 2e-10);
        assert!((b - 0.171_073_476_110_458_66).abs() < 1e-12);
    }

    #[test]
    fn one_minus_avg_matches_direct_form() {
        for d in 1..=3 {
            for &u in &[1e-5, 0.01, 0.5, 1.5, 3.0, 30.0] {
                let direct = 1.0 - spherical_cos_avg(d, u);
                let stable = one_minus_cos_avg(d, u);
                assert!((direct - stable).abs() < 1e-12 + 1e-8 * stable, "d={d} u={u}");
            }
        }
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(1), 2.0, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(2), 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(3), 4.0 * PI, max_relative = 1e-14);
    }
}
