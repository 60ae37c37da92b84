use bandtsp::certifier::quadrature::integrate;
use bandtsp::certifier::{cert_constants, erf_eval, f_of, h_of, CertParams};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use std::f64::consts::PI;

/// Fractional bits of the fixed-point oracle.
const P: u32 = 400;

fn fixed(x: f64) -> BigInt {
    let bits = x.abs().to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1 << 52), exp - 1075)
    };
    let m = BigInt::from(m);
    let shift = P as i64 + e;
    let v = if shift >= 0 {
        m << shift as usize
    } else {
        m >> (-shift) as usize
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

fn to_f64(v: &BigInt) -> f64 {
    v.to_f64().unwrap() * 2f64.powi(-(P as i32))
}

fn atan_inv(n: u32) -> BigInt {
    let one = BigInt::from(1) << P as usize;
    let n2 = BigInt::from(n * n);
    let mut term = one / n;
    let mut sum = BigInt::zero();
    let mut k = 0u32;
    while !term.is_zero() {
        let t = &term / (2 * k + 1);
        if k.is_multiple_of(2) {
            sum += t;
        } else {
            sum -= t;
        }
        term /= &n2;
        k += 1;
    }
    sum
}

struct Oracle {
    sqrt_pi: BigInt,
}

impl Oracle {
    fn new() -> Self {
        let pi: BigInt = atan_inv(5) * 16 - atan_inv(239) * 4;
        Self {
            sqrt_pi: BigInt::sqrt(&(pi << P as usize)),
        }
    }

    /// Maclaurin series `2/sqrt(pi) sum (-1)^n x^(2n+1) / (n! (2n+1))`.
    fn erf(&self, x: f64) -> f64 {
        let xf = fixed(x);
        let x2 = (&xf * &xf) >> P as usize;
        let mut term = xf;
        let mut sum = BigInt::zero();
        let mut n = 0u64;
        while !term.is_zero() {
            let t = &term / (2 * n + 1);
            if n.is_multiple_of(2) {
                sum += t;
            } else {
                sum -= t;
            }
            n += 1;
            term = ((term * &x2) >> P as usize) / n;
        }
        to_f64(&((sum << (P as usize + 1)) / &self.sqrt_pi))
    }
}

#[test]
fn erf_against_arbitrary_precision_series() {
    let oracle = Oracle::new();
    assert_eq!(oracle.erf(0.0), 0.0);
    let mut worst: f64 = 0.0;
    for i in 0..10_000 {
        let x = -6.0 + 12.0 * i as f64 / 9_999.0;
        let e = erf_eval(x);
        let o = oracle.erf(x);
        assert!(e.err <= 1e-14, "err bound {} at {x}", e.err);
        let diff = (e.value - o).abs();
        assert!(
            diff <= e.err + f64::EPSILON * o.abs(),
            "x={x}: {} vs {o} (bound {})",
            e.value,
            e.err
        );
        worst = worst.max(diff);
    }
    assert!(worst < 1e-15, "worst {worst}");
}

#[test]
fn erf_anchor_points() {
    let oracle = Oracle::new();
    let one = erf_eval(1.0);
    assert!((one.value - 0.842_700_792_949_714_9).abs() <= 1e-14);
    assert!((oracle.erf(1.0) - 0.842_700_792_949_714_9).abs() <= 1e-16);
    // 1 - erf(6) is about 2.15e-17.
    let six = erf_eval(6.0);
    assert!((1.0 - six.value).abs() <= six.err.max(f64::EPSILON));
    assert_eq!(erf_eval(-0.5).value, -erf_eval(0.5).value);
    assert!(erf_eval(f64::NAN).value.is_nan());
}

fn rayleigh(r: f64) -> f64 {
    PI * r * (-0.5 * PI * r * r).exp()
}

#[test]
fn f_and_h_against_quadrature() {
    for &a in &[0.0, 0.1, 0.5, 1.0, 2.0, 3.5, 10.0] {
        let fq = integrate(|r| (a - r) * rayleigh(r), 0.0, a, 1e-15, 1e-14).value;
        assert!((f_of(a).unwrap() - fq).abs() <= 1e-10, "F({a})");
        let hq = integrate(|t| f_of(t).unwrap(), 0.0, a, 1e-15, 1e-14).value;
        assert!((h_of(a).unwrap() - hq).abs() <= 1e-10, "H({a})");
    }
    assert!((f_of(10.0).unwrap() - (10.0 - std::f64::consts::FRAC_1_SQRT_2)).abs() < 1e-15);

    let c = cert_constants(&CertParams::default()).unwrap();
    let a0 = c.a_of(0.0);
    assert!((a0 - 0.970_127_5).abs() < 1e-7);
    let hq = integrate(|t| f_of(t).unwrap(), 0.0, a0, 1e-15, 1e-14).value;
    assert!((h_of(a0).unwrap() - hq).abs() <= 1e-10);
}

#[test]
fn h_derivative_is_f() {
    let eps = 1e-5;
    for i in 1..=500 {
        let a = i as f64 * 0.01;
        let fd = (h_of(a + eps).unwrap() - h_of(a - eps).unwrap()) / (2.0 * eps);
        assert!((fd - f_of(a).unwrap()).abs() <= 1e-6, "a={a}");
    }
}

#[test]
fn h_of_a_is_decreasing_below_u1_star() {
    let c = cert_constants(&CertParams::default()).unwrap();
    let vals: Vec<f64> = (0..=10_000)
        .map(|i| h_of(c.a_of(c.u1_star * i as f64 / 1e4).max(0.0)).unwrap())
        .collect();
    assert!(vals.windows(2).all(|w| w[1] <= w[0]));
    assert!(c.a_of(c.u1_star).abs() < 1e-15);
    for i in 0..=1000 {
        let u = i as f64 / 1000.0;
        assert!(c.a_of(u) - c.slope_b * (1.0 - u) < 0.0);
    }
}
