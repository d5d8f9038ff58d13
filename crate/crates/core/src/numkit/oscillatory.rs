//! Slowly decaying oscillatory tails `∫_U^∞ f`, summed between consecutive
//! zeros of `sin(phase)` and accelerated by repeated averaging (Euler).

use std::f64::consts::PI;

use super::quadrature::QuadratureRule;
use super::NumError;

/// Number of half-period intervals summed before acceleration.
const INTERVALS: usize = 48;

/// Monotone phase `φ` on `[start, ∞)` such that the integrand changes sign
/// where `φ` crosses multiples of π.
pub struct MonotonePhase<F: Fn(f64) -> f64> {
    pub phase: F,
    pub increasing: bool,
    /// |dφ/du| for large u; only used to size the bracketing steps.
    pub slope_hint: f64,
}

impl<F: Fn(f64) -> f64> MonotonePhase<F> {
    /// Smallest u ≥ `from` with φ(u) = `target`, assuming φ(from) has not
    /// yet reached the target.
    fn solve(&self, from: f64, target: f64) -> Result<f64, NumError> {
        let passed = |u: f64| {
            let p = (self.phase)(u);
            if self.increasing {
                p >= target
            } else {
                p <= target
            }
        };
        let step = 0.5 * PI / self.slope_hint.max(1e-12);
        let mut lo = from;
        let mut hi = from + step;
        let mut guard = 0;
        while !passed(hi) {
            lo = hi;
            hi += step;
            guard += 1;
            if guard > 1_000_000 {
                return Err(NumError::NoConvergence(
                    "phase did not reach the next zero".into(),
                ));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if passed(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// `∫_start^∞ f(u) du` for an integrand whose sign alternates between the
/// zeros of `sin(φ)`, with amplitude decaying slowly and monotonically.
pub fn integrate_oscillatory_tail<F, P>(
    f: F,
    phase: &MonotonePhase<P>,
    start: f64,
    rule: &QuadratureRule,
) -> Result<f64, NumError>
where
    F: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    let p0 = (phase.phase)(start);
    let first = if phase.increasing {
        (p0 / PI).floor() + 1.0
    } else {
        (p0 / PI).ceil() - 1.0
    };
    let dir = if phase.increasing { 1.0 } else { -1.0 };

    let mut zeros = Vec::with_capacity(INTERVALS + 1);
    let mut u = start;
    for n in 0..=INTERVALS {
        let target = (first + dir * n as f64) * PI;
        u = phase.solve(u, target)?;
        zeros.push(u);
    }
    let lead: f64 = rule.integrate(start, zeros[0], &f)?;
    let pieces = zeros
        .windows(2)
        .map(|w| rule.integrate(w[0], w[1], &f))
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(lead + euler_sum(&pieces)?)
}

/// Limit of the partial sums of an alternating series by repeated averaging.
pub fn euler_sum(terms: &[f64]) -> Result<f64, NumError> {
    if terms.is_empty() {
        return Ok(0.0);
    }
    let mut sums: Vec<f64> = terms
        .iter()
        .scan(0.0, |acc, &t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let mut last_two = (sums[sums.len() - 1], sums[sums.len() - 1]);
    while sums.len() > 1 {
        sums = sums.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        if sums.len() == 2 {
            last_two = (sums[0], sums[1]);
        }
    }
    let value = sums[0];
    let spread = (last_two.0 - last_two.1).abs();
    if spread > 1e-9 * scale.max(value.abs()) + 1e-14 {
        return Err(NumError::NoConvergence(format!(
            "alternating tail not converged (spread {spread:e})"
        )));
    }
    Ok(value)
}
