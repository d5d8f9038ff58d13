use std::f64::consts::PI;

use serde::Serialize;

use super::{FieldConfig, FieldError, Sign, Spatial, Temporal, TestFunction, PANEL_NODES};
use crate::numkit::{integrate_oscillatory_tail, MonotonePhase, QuadratureRule};

/// Largest relative change tolerated when the grids are doubled.
pub const CONVERGENCE_LIMIT: f64 = 0.01;
/// Default agreement required between the two routes for Im iΔ_F.
pub const WITNESS_TOL: f64 = 1e-3;

fn two_pi_cubed() -> f64 {
    (2.0 * PI).powi(3)
}

fn check_converged(coarse: f64, fine: f64, what: &str) -> Result<(), FieldError> {
    let scale = coarse.abs().max(fine.abs());
    if scale == 0.0 {
        return Ok(());
    }
    let change = (coarse - fine).abs() / scale;
    if change > CONVERGENCE_LIMIT {
        return Err(FieldError::Underresolved(format!(
            "{what} changed by {:.3}% when the grids were doubled",
            100.0 * change
        )));
    }
    Ok(())
}

/// `Re iΔ_F[f]`: half the vacuum anticommutator functional, evaluated in
/// momentum space.
pub fn re_idf_free(f: &TestFunction, cfg: &FieldConfig) -> Result<f64, FieldError> {
    f.validate()?;
    cfg.validate()?;
    cfg.check_resolution(&f.spatial)?;
    let coarse = re_on_grid(f, cfg);
    let fine = re_on_grid(f, &cfg.with_doubled_grids());
    check_converged(coarse, fine, "Re iDelta_F")?;
    Ok(coarse)
}

fn re_on_grid(f: &TestFunction, cfg: &FieldConfig) -> f64 {
    let (ks, ws) = cfg.radial_grid();
    let m = cfg.mass;
    let mut acc = 0.0;
    for (&k, &w) in ks.iter().zip(&ws) {
        let omega = (k * k + m * m).sqrt();
        let temporal =
            f.temporal.transform(omega).norm_sqr() + f.temporal.transform(-omega).norm_sqr();
        let measure = 4.0 * PI * k * k / (two_pi_cubed() * 2.0 * omega);
        acc += w * measure * f.spatial.angular_mean_sq(k) * temporal;
    }
    0.5 * f.amplitude * f.amplitude * acc
}

/// `Im iΔ_F[f]` through the time-ordered double integral with the inner
/// Bessel integral in closed form: `-(2π)^{-3} ∫ d³x |G|² T(Ω)/Ω`, where
/// `T(Ω) = Re ∫_0^∞ A(Δ) sin(ΩΔ) dΔ` and `A` is the autocorrelation of f0.
pub fn im_idf_free(f: &TestFunction, cfg: &FieldConfig) -> Result<f64, FieldError> {
    f.validate()?;
    cfg.validate()?;
    cfg.check_resolution(&f.spatial)?;
    let coarse = im_on_grid(f, cfg)?;
    let fine = im_on_grid(f, &cfg.with_doubled_grids())?;
    check_converged(coarse, fine, "Im iDelta_F")?;
    Ok(coarse)
}

fn im_on_grid(f: &TestFunction, cfg: &FieldConfig) -> Result<f64, FieldError> {
    let (xs, ws) = cfg.radial_grid();
    let m = cfg.mass;
    let omegas: Vec<f64> = xs.iter().map(|x| (x * x + m * m).sqrt()).collect();
    let ts = match f.temporal {
        Temporal::DeltaPv { beta, sign, mass } => {
            let rule = QuadratureRule::gauss_legendre(20);
            omegas
                .iter()
                .map(|&om| delta_pv_sine_transform(beta * mass, om, &rule).map(|t| sign.factor() * t))
                .collect::<Result<Vec<_>, _>>()?
        }
        _ => sine_transform_on_grid(&f.temporal, cfg, &omegas)?,
    };
    let mut acc = 0.0;
    for i in 0..xs.len() {
        let x = xs[i];
        acc += ws[i] * 4.0 * PI * x * x * f.spatial.angular_mean_sq(x) * ts[i] / omegas[i];
    }
    Ok(-f.amplitude * f.amplitude * acc / two_pi_cubed())
}

/// `∫_0^t_max A(Δ) sin(ΩΔ) dΔ` for every Ω, with A tabulated once.
fn sine_transform_on_grid(
    temporal: &Temporal,
    cfg: &FieldConfig,
    omegas: &[f64],
) -> Result<Vec<f64>, FieldError> {
    let a0 = temporal.autocorrelation(0.0).unwrap_or(0.0);
    let a_end = temporal.autocorrelation(cfg.t_max).unwrap_or(0.0);
    if cfg.t_max <= 0.0 || a_end > 1e-12 * a0 {
        return Err(FieldError::Underresolved(format!(
            "t_max = {} does not cover the temporal correlation",
            cfg.t_max
        )));
    }
    let panels = cfg.n_t.div_ceil(PANEL_NODES);
    let width = cfg.t_max / panels as f64;
    let omega_max = omegas.iter().cloned().fold(0.0, f64::max);
    if width * omega_max > 2.0 * PI {
        return Err(FieldError::Underresolved(format!(
            "time panels of width {width} cannot resolve frequency {omega_max}"
        )));
    }
    let (ts, tw) = QuadratureRule::gauss_legendre(PANEL_NODES).composite_grid(0.0, cfg.t_max, panels);
    let weighted: Vec<f64> = ts
        .iter()
        .zip(&tw)
        .map(|(&t, &w)| w * temporal.autocorrelation(t).unwrap_or(0.0))
        .collect();
    Ok(omegas
        .iter()
        .map(|&om| {
            ts.iter()
                .zip(&weighted)
                .map(|(&t, &aw)| aw * (om * t).sin())
                .sum()
        })
        .collect())
}

/// `(1/2π) ∫_0^∞ sin(bΔ) sin(ΩΔ)/Δ dΔ` for `Ω > b > 0`, written as
/// `(1/4π) ∫_0^∞ [cos((Ω-b)Δ) - cos((Ω+b)Δ)]/Δ dΔ` and integrated numerically.
fn delta_pv_sine_transform(b: f64, omega: f64, rule: &QuadratureRule) -> Result<f64, FieldError> {
    let alpha = omega - b;
    let gamma = omega + b;
    // first zero of cos(αΔ)
    let split = 0.5 * PI / alpha;
    let panels = ((split * gamma / (0.5 * PI)).ceil() as usize).max(4);
    let head: f64 = rule.integrate_composite(0.0, split, panels, |d| {
        if d < 1e-8 / gamma {
            0.5 * (gamma * gamma - alpha * alpha) * d
        } else {
            ((alpha * d).cos() - (gamma * d).cos()) / d
        }
    })?;
    let tail = |freq: f64| {
        integrate_oscillatory_tail(
            |d: f64| (freq * d).cos() / d,
            &MonotonePhase {
                phase: move |d: f64| freq * d + 0.5 * PI,
                increasing: true,
                slope_hint: freq,
            },
            split,
            rule,
        )
    };
    let total = head + tail(alpha)? - tail(gamma)?;
    Ok(total / (4.0 * PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormPair {
    pub value_plus: f64,
    pub value_minus: f64,
}

/// `±(1/(2(2π)⁴)) ∫ |G|²/Ω · ln((Ω-βm)/(Ω+βm)) d³x` for the two signs.
pub fn im_idf_closed_form(
    beta: f64,
    m: f64,
    g: &Spatial,
    cfg: &FieldConfig,
) -> Result<ClosedFormPair, FieldError> {
    Temporal::DeltaPv {
        beta,
        sign: Sign::Plus,
        mass: m,
    }
    .validate()?;
    g.validate()?;
    let cfg = FieldConfig { mass: m, ..*cfg };
    cfg.validate()?;
    cfg.check_resolution(g)?;
    let (xs, ws) = cfg.radial_grid();
    let bm = beta * m;
    let mut acc = 0.0;
    for (&x, &w) in xs.iter().zip(&ws) {
        let om = (x * x + m * m).sqrt();
        let log = (-2.0 * bm / (om + bm)).ln_1p();
        acc += w * 4.0 * PI * x * x * g.angular_mean_sq(x) / om * log;
    }
    let value_plus = acc / (2.0 * (2.0 * PI).powi(4));
    Ok(ClosedFormPair {
        value_plus,
        value_minus: -value_plus,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub mass: f64,
    pub beta: f64,
    pub closed_plus: f64,
    pub closed_minus: f64,
    pub quadrature_plus: f64,
    pub quadrature_minus: f64,
    /// `quadrature_plus · quadrature_minus`.
    pub product: f64,
    /// Largest relative gap between the two routes.
    pub discrepancy: f64,
    pub pass: bool,
}

/// Evaluate `Im iΔ_F` on both signs of the delta/principal-value family by
/// the two routes and check that the signs are opposite.
pub fn indeterminacy_witness(
    m: f64,
    beta: f64,
    g: &Spatial,
    cfg: &FieldConfig,
    tol: f64,
) -> Result<WitnessReport, FieldError> {
    let closed = im_idf_closed_form(beta, m, g, cfg)?;
    let cfg = FieldConfig { mass: m, ..*cfg };
    let quad = |sign| {
        im_idf_free(
            &TestFunction::new(Temporal::DeltaPv { beta, sign, mass: m }, *g),
            &cfg,
        )
    };
    let qp = quad(Sign::Plus)?;
    let qm = quad(Sign::Minus)?;
    let rel = |q: f64, c: f64| (q - c).abs() / c.abs().max(f64::MIN_POSITIVE);
    let discrepancy = rel(qp, closed.value_plus).max(rel(qm, closed.value_minus));
    let product = qp * qm;
    let pass = product < 0.0
        && closed.value_plus * closed.value_minus < 0.0
        && discrepancy <= tol;
    Ok(WitnessReport {
        mass: m,
        beta,
        closed_plus: closed.value_plus,
        closed_minus: closed.value_minus,
        quadrature_plus: qp,
        quadrature_minus: qm,
        product,
        discrepancy,
        pass,
    })
}
