//! Bessel functions of order 0 and 1 and the imaginary error function.

use std::f64::consts::{FRAC_2_SQRT_PI, PI};

use super::NumError;

/// Below this |z| the power series is used, above it the Hankel expansion.
pub const BESSEL_SWITCH: f64 = 12.0;

/// Largest |x| accepted by [`erfi`].
pub const ERFI_MAX_ARG: f64 = 6.0;

pub fn bessel_j0(z: f64) -> Result<f64, NumError> {
    if !z.is_finite() {
        return Err(NumError::Domain(format!("bessel_j0 needs a finite argument, got {z}")));
    }
    let z = z.abs();
    Ok(if z <= BESSEL_SWITCH {
        j_series(0, z)
    } else {
        j_hankel(0, z)
    })
}

pub fn bessel_j1(z: f64) -> Result<f64, NumError> {
    if !z.is_finite() {
        return Err(NumError::Domain(format!("bessel_j1 needs a finite argument, got {z}")));
    }
    let a = z.abs();
    let v = if a <= BESSEL_SWITCH {
        j_series(1, a)
    } else {
        j_hankel(1, a)
    };
    Ok(if z < 0.0 { -v } else { v })
}

/// Ascending series `Σ (-1)^m (z/2)^(2m+n) / (m! (m+n)!)` for `n ∈ {0, 1}`.
pub(crate) fn j_series(n: u32, z: f64) -> f64 {
    let half = 0.5 * z;
    let q = -half * half;
    let mut term = if n == 0 { 1.0 } else { half };
    let mut sum = term;
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= q / (m * (m + n as f64));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && m > half {
            break;
        }
        if m > 200.0 {
            break;
        }
    }
    sum
}

/// Hankel asymptotic expansion, truncated at the smallest term.
pub(crate) fn j_hankel(n: u32, z: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let mut p = 0.0;
    let mut q = 0.0;
    // a_k / z^k with a_k = prod_{j=1..k} (mu - (2j-1)^2) / (k! 8^k)
    let mut term: f64 = 1.0;
    let mut prev = f64::INFINITY;
    let mut k = 0u32;
    loop {
        if term.abs() > prev {
            break;
        }
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        prev = term.abs();
        if prev < 1e-18 {
            break;
        }
        k += 1;
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * z);
    }
    let (s, c) = z.sin_cos();
    let (cos_chi, sin_chi) = if n == 0 {
        // chi = z - pi/4
        ((c + s) / 2f64.sqrt(), (s - c) / 2f64.sqrt())
    } else {
        // chi = z - 3 pi/4
        ((s - c) / 2f64.sqrt(), -(s + c) / 2f64.sqrt())
    };
    (2.0 / (PI * z)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Imaginary error function `erfi(x) = -i erf(ix)` for `|x| <= 6`.
pub fn erfi(x: f64) -> Result<f64, NumError> {
    if !x.is_finite() || x.abs() > ERFI_MAX_ARG {
        return Err(NumError::Domain(format!(
            "erfi argument {x} outside [-{ERFI_MAX_ARG}, {ERFI_MAX_ARG}]"
        )));
    }
    let a = x.abs();
    let a2 = a * a;
    // x^(2m+1)/m! carried in `pow`, divided by (2m+1) on accumulation
    let mut pow = a;
    let mut sum = a;
    let mut m = 0.0;
    loop {
        m += 1.0;
        pow *= a2 / m;
        let t = pow / (2.0 * m + 1.0);
        sum += t;
        if t <= 1e-17 * sum {
            break;
        }
    }
    let v = FRAC_2_SQRT_PI * sum;
    Ok(if x < 0.0 { -v } else { v })
}
