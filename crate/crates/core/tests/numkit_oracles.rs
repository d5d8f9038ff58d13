use num_bigint::BigInt;
use num_traits::{Float, ToPrimitive, Zero};
use propsign::numkit::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FRAC_BITS: u32 = 300;

fn to_fixed(x: f64) -> BigInt {
    let (mant, exp, sign) = x.integer_decode();
    let mut v = BigInt::from(mant);
    let shift = exp as i64 + FRAC_BITS as i64;
    v = if shift >= 0 { v << shift as usize } else { v >> (-shift) as usize };
    if sign < 0 {
        -v
    } else {
        v
    }
}

fn from_fixed(v: &BigInt) -> f64 {
    let top: BigInt = v >> (FRAC_BITS - 100) as usize;
    top.to_f64().unwrap() / 2f64.powi(100)
}

/// J0 by its ascending series in 300-bit fixed point.
fn j0_oracle(z: f64) -> f64 {
    let half = to_fixed(z) >> 1usize;
    let q: BigInt = (&half * &half) >> FRAC_BITS as usize;
    let mut term = BigInt::from(1) << FRAC_BITS as usize;
    let mut sum = term.clone();
    let mut m = 1u64;
    loop {
        term = -((&term * &q) >> FRAC_BITS as usize) / BigInt::from(m * m);
        if term.is_zero() {
            break;
        }
        sum += &term;
        m += 1;
    }
    from_fixed(&sum)
}

/// erfi by its positive series in fixed point.
fn erfi_oracle(x: f64) -> f64 {
    let xf = to_fixed(x.abs());
    let x2: BigInt = (&xf * &xf) >> FRAC_BITS as usize;
    let mut pow = xf.clone();
    let mut sum = xf;
    let mut m = 1u64;
    loop {
        pow = ((&pow * &x2) >> FRAC_BITS as usize) / BigInt::from(m);
        let t = &pow / BigInt::from(2 * m + 1);
        if t.is_zero() {
            break;
        }
        sum += t;
        m += 1;
    }
    let v = std::f64::consts::FRAC_2_SQRT_PI * from_fixed(&sum);
    if x < 0.0 {
        -v
    } else {
        v
    }
}

#[test]
fn j0_against_fixed_point_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let z: f64 = rng.random_range(0.0..30.0);
        let d = (bessel_j0(z).unwrap() - j0_oracle(z)).abs();
        worst = worst.max(d);
        assert!(d <= 1e-9, "z={z}: diff {d:e}");
    }
    assert!(worst <= 1e-10, "worst {worst:e}");
}

#[test]
fn j0_accuracy_up_to_fifty() {
    for i in 0..=500 {
        let z = i as f64 * 0.1;
        let d = (bessel_j0(z).unwrap() - j0_oracle(z)).abs();
        assert!(d <= 1e-10, "z={z}: diff {d:e}");
    }
}

#[test]
fn j0_derivative_is_minus_j1() {
    let h = 1e-5;
    let mut z = 0.1;
    while z <= 20.0 {
        let d = (bessel_j0(z + h).unwrap() - bessel_j0(z - h).unwrap()) / (2.0 * h);
        assert!((d + bessel_j1(z).unwrap()).abs() <= 1e-7, "z={z}");
        z += 0.037;
    }
}

#[test]
fn erfi_against_series_and_quadrature() {
    let rule = QuadratureRule::gauss_legendre(40);
    let mut x = -6.0;
    while x <= 6.0 {
        let v = erfi(x).unwrap();
        let scale = v.abs().max(1.0);
        assert!((v - erfi_oracle(x)).abs() <= 1e-9 * scale, "x={x}");
        let q: f64 = rule
            .integrate_composite(0.0, x.abs(), 16, |t| (t * t).exp())
            .unwrap();
        let q = std::f64::consts::FRAC_2_SQRT_PI * q.copysign(x);
        assert!((v - q).abs() <= 1e-9 * scale, "x={x}: {v} vs {q}");
        x += 0.0625;
    }
}

#[test]
fn tabulated_identities_on_lattice() {
    let rule = QuadratureRule::gauss_legendre(20);
    for p in identity_lattice() {
        let a = gr_3876_1_check(p.m, p.dt, p.x, &rule).unwrap();
        assert!(a.passes(GR_3876_1_TOL), "{p:?}: {a:?}");
        let b = gr_6677_6_check(p.m, p.dt, p.x, &rule).unwrap();
        assert!(b.passes(GR_6677_6_TOL), "{p:?}: {b:?}");
    }
}

proptest! {
    #[test]
    fn erfi_is_odd(x in -6.0f64..6.0) {
        prop_assert_eq!(erfi(-x).unwrap() + erfi(x).unwrap(), 0.0);
    }

    #[test]
    fn j0_even_j1_odd(z in -50.0f64..50.0) {
        prop_assert_eq!(bessel_j0(-z).unwrap(), bessel_j0(z).unwrap());
        prop_assert_eq!(bessel_j1(-z).unwrap(), -bessel_j1(z).unwrap());
    }

    #[test]
    fn gauss_legendre_integrates_constants(n in 1usize..80, a in -10.0f64..10.0, len in 0.0f64..20.0) {
        let rule = QuadratureRule::gauss_legendre(n);
        let v: f64 = integrate_1d(|_| 1.0, a, a + len, &rule).unwrap();
        let b = a + len;
        prop_assert!((v - (b - a)).abs() <= 1e-12 * (b - a).abs().max(1e-300));
    }
}
