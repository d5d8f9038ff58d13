//! Two tabulated Bessel integrals, evaluated by quadrature and in closed form.
//!
//! * `∫_0^∞ sin(dt √(u²+m²)) / √(u²+m²) · cos(r u) du = θ(dt − r) (π/2) J0(m √(dt² − r²))`
//! * `∫_0^dt J0(m √(dt² − r²)) cos(s r) dr = sin(dt √(s²+m²)) / √(s²+m²)`

use std::f64::consts::PI;

use serde::Serialize;

use super::oscillatory::{integrate_oscillatory_tail, MonotonePhase};
use super::quadrature::QuadratureRule;
use super::special::bessel_j0;
use super::NumError;

pub const GR_3876_1_TOL: f64 = 1e-5;
pub const GR_6677_6_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentityCheck {
    pub fn abs_diff(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.abs_diff() <= tol
    }
}

/// Heaviside step with θ(0) = 1/2.
pub fn theta(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

fn require_positive(name: &str, v: f64) -> Result<(), NumError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(NumError::Domain(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Quadrature and closed form of the first identity. `r = 0` is accepted.
pub fn gr_3876_1_check(
    m: f64,
    dt: f64,
    r: f64,
    rule: &QuadratureRule,
) -> Result<IdentityCheck, NumError> {
    require_positive("m", m)?;
    require_positive("dt", dt)?;
    if !(r.is_finite() && r >= 0.0) {
        return Err(NumError::Domain(format!("r must be non-negative, got {r}")));
    }

    let rhs = theta(dt - r) * 0.5 * PI * bessel_j0(m * (dt * dt - r * r).max(0.0).sqrt())?;

    // sin(dt s) cos(r u) = [sin(dt s + r u) + sin(dt s - r u)] / 2
    let s = move |u: f64| (u * u + m * m).sqrt();
    let plus = |u: f64| dt * s(u) + r * u;
    let minus = |u: f64| dt * s(u) - r * u;

    // Beyond `cut` both phases are monotone.
    let stationary = if r < dt { r * m / (dt * dt - r * r).sqrt() } else { 0.0 };
    let cut = (2.0 * stationary).max(4.0 * m).max(2.0 * PI / (dt + r));
    let max_freq = dt + r;
    let panels = ((cut * max_freq / PI).ceil() as usize).max(4) * 2;

    let head: f64 = rule.integrate_composite(0.0, cut, panels, |u| {
        0.5 * ((plus(u)).sin() + (minus(u)).sin()) / s(u)
    })?;

    let plus_tail = integrate_oscillatory_tail(
        |u| plus(u).sin() / s(u),
        &MonotonePhase {
            phase: plus,
            increasing: true,
            slope_hint: dt + r,
        },
        cut,
        rule,
    )?;

    let minus_tail = if r == dt {
        // dt s - r u = dt m² / (s + u) → 0; map u = 1/v onto (0, 1/cut]
        let g = |v: f64| {
            let q = (1.0 + m * m * v * v).sqrt();
            (dt * m * m * v / (1.0 + q)).sin() / (v * q)
        };
        let vmax = 1.0 / cut;
        rule.integrate_composite(0.0, vmax, 8, g)?
    } else {
        integrate_oscillatory_tail(
            |u| minus(u).sin() / s(u),
            &MonotonePhase {
                phase: minus,
                increasing: r < dt,
                slope_hint: (dt - r).abs(),
            },
            cut,
            rule,
        )?
    };

    Ok(IdentityCheck {
        lhs: head + 0.5 * (plus_tail + minus_tail),
        rhs,
    })
}

/// Quadrature and closed form of the second identity. `dt = 0` gives 0 = 0.
pub fn gr_6677_6_check(
    m: f64,
    dt: f64,
    s: f64,
    rule: &QuadratureRule,
) -> Result<IdentityCheck, NumError> {
    require_positive("m", m)?;
    if !(dt.is_finite() && dt >= 0.0) {
        return Err(NumError::Domain(format!("dt must be non-negative, got {dt}")));
    }
    if !(s.is_finite() && s >= 0.0) {
        return Err(NumError::Domain(format!("s must be non-negative, got {s}")));
    }
    let w = (s * s + m * m).sqrt();
    let rhs = (dt * w).sin() / w;
    if dt == 0.0 {
        return Ok(IdentityCheck { lhs: 0.0, rhs });
    }
    // J0(m sqrt(x)) is entire in x, so the integrand is smooth up to r = dt.
    let panels = (((s + m) * dt / PI).ceil() as usize).max(2) * 2;
    let mut failure = None;
    let lhs: f64 = rule.integrate_composite(0.0, dt, panels, |r| {
        match bessel_j0(m * (dt * dt - r * r).max(0.0).sqrt()) {
            Ok(j) => j * (s * r).cos(),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(IdentityCheck { lhs, rhs })
}

/// Lattice point used by the identity sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticePoint {
    pub m: f64,
    pub dt: f64,
    /// `r` for the first identity, `s` for the second.
    pub x: f64,
}

/// The 5×5×5 sweep lattice.
pub fn identity_lattice() -> Vec<LatticePoint> {
    const M: [f64; 5] = [0.25, 0.5, 1.0, 1.5, 2.0];
    const DT: [f64; 5] = [0.5, 1.0, 2.0, 3.0, 4.0];
    const X: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 3.9];
    let mut out = Vec::with_capacity(125);
    for m in M {
        for dt in DT {
            for x in X {
                out.push(LatticePoint { m, dt, x });
            }
        }
    }
    out
}
