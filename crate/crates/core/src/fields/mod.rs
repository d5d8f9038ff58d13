//! Separable test functions `f(t, x) = f0(t) g(x)`, their Fourier transforms,
//! and the quadratic functionals of the free scalar Feynman propagator.

mod functionals;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numkit::{NumError, QuadratureRule};

pub use functionals::{
    im_idf_closed_form, im_idf_free, indeterminacy_witness, re_idf_free, ClosedFormPair,
    WitnessReport, CONVERGENCE_LIMIT, WITNESS_TOL,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid under-resolved: {0}")]
    Underresolved(String),
    #[error(transparent)]
    Num(#[from] NumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Temporal {
    /// `e^{-ω̄ t}` for `t >= 0`, zero before.
    Exponential { omega_bar: f64 },
    /// `½[δ(t) + (i/π) P e^{∓iβmt}/t]`; only its Fourier transform is used.
    DeltaPv { beta: f64, sign: Sign, mass: f64 },
    /// `exp(-(t - center)² / (2 width²))`.
    Gaussian { center: f64, width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Spatial {
    /// `exp(-|x|² / (2 width²))`.
    Gaussian3d { width: f64 },
    /// `exp(i k0·x) exp(-|x|² / (2 width²))`.
    PlaneWavePacket { k0: [f64; 3], width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub temporal: Temporal,
    pub spatial: Spatial,
    /// Overall real prefactor.
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

fn positive(name: &str, v: f64) -> Result<(), FieldError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(FieldError::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

impl Temporal {
    pub fn validate(&self) -> Result<(), FieldError> {
        match *self {
            Temporal::Exponential { omega_bar } => positive("omega_bar", omega_bar),
            Temporal::DeltaPv { beta, mass, .. } => {
                if !(beta > 0.0 && beta < 1.0) {
                    return Err(FieldError::InvalidParameter(format!(
                        "beta must lie in (0, 1), got {beta}"
                    )));
                }
                positive("mass", mass)
            }
            Temporal::Gaussian { center, width } => {
                if !center.is_finite() {
                    return Err(FieldError::InvalidParameter("center must be finite".into()));
                }
                positive("width", width)
            }
        }
    }

    /// `F0(ν) = ∫ f0(t) e^{iνt} dt`.
    pub fn transform(&self, nu: f64) -> Complex64 {
        match *self {
            Temporal::Exponential { omega_bar } => {
                Complex64::new(1.0, 0.0) / Complex64::new(omega_bar, -nu)
            }
            Temporal::DeltaPv { beta, sign, mass } => {
                Complex64::new(crate::numkit::theta(sign.factor() * beta * mass - nu), 0.0)
            }
            Temporal::Gaussian { center, width } => {
                let mag = width * (2.0 * PI).sqrt() * (-0.5 * width * width * nu * nu).exp();
                Complex64::from_polar(mag, nu * center)
            }
        }
    }

    /// `∫ |f0|² dt`, infinite for the distributional variant.
    pub fn norm_sq(&self) -> Option<f64> {
        match *self {
            Temporal::Exponential { omega_bar } => Some(0.5 / omega_bar),
            Temporal::DeltaPv { .. } => None,
            Temporal::Gaussian { width, .. } => Some(width * PI.sqrt()),
        }
    }

    /// `A(Δ) = ∫ f0*(t + Δ) f0(t) dt` for `Δ >= 0`; the distributional
    /// variant has none.
    pub(crate) fn autocorrelation(&self, delta: f64) -> Option<f64> {
        match *self {
            Temporal::Exponential { omega_bar } => Some((-omega_bar * delta).exp() / (2.0 * omega_bar)),
            Temporal::Gaussian { width, .. } => {
                Some(width * PI.sqrt() * (-delta * delta / (4.0 * width * width)).exp())
            }
            Temporal::DeltaPv { .. } => None,
        }
    }

    /// Lag beyond which the autocorrelation is negligible.
    pub(crate) fn correlation_time(&self) -> f64 {
        match *self {
            Temporal::Exponential { omega_bar } => 40.0 / omega_bar,
            Temporal::Gaussian { width, .. } => 14.0 * width,
            Temporal::DeltaPv { .. } => f64::INFINITY,
        }
    }
}

impl Spatial {
    pub fn validate(&self) -> Result<(), FieldError> {
        match *self {
            Spatial::Gaussian3d { width } => positive("width", width),
            Spatial::PlaneWavePacket { k0, width } => {
                if k0.iter().any(|c| !c.is_finite()) {
                    return Err(FieldError::InvalidParameter("k0 must be finite".into()));
                }
                positive("width", width)
            }
        }
    }

    fn width(&self) -> f64 {
        match *self {
            Spatial::Gaussian3d { width } | Spatial::PlaneWavePacket { width, .. } => width,
        }
    }

    fn k0_norm(&self) -> f64 {
        match *self {
            Spatial::Gaussian3d { .. } => 0.0,
            Spatial::PlaneWavePacket { k0, .. } => norm3(k0),
        }
    }

    /// Rough upper edge of the spatial frequency content.
    pub fn bandwidth(&self) -> f64 {
        self.k0_norm() + 1.0 / self.width()
    }

    /// `∫ |g|² d³x`.
    pub fn norm_sq(&self) -> f64 {
        PI.powf(1.5) * self.width().powi(3)
    }

    /// Value of `G` at the centre of its peak.
    fn peak(&self) -> f64 {
        (2.0 * PI).powf(1.5) * self.width().powi(3)
    }

    /// Mean of `|G(x)|²` over directions of `x` at fixed `|x|`.
    pub fn angular_mean_sq(&self, x_norm: f64) -> f64 {
        let c2 = self.peak().powi(2);
        let w2 = self.width().powi(2);
        match *self {
            Spatial::Gaussian3d { .. } => c2 * (-w2 * x_norm * x_norm).exp(),
            Spatial::PlaneWavePacket { .. } => {
                let k0 = self.k0_norm();
                let a = 4.0 * w2 * x_norm * k0;
                // sinh(a/2)/(a/2) e^{-a/2}, written without overflow
                let ratio = if a < 1e-12 { 1.0 - 0.5 * a } else { -(-a).exp_m1() / a };
                c2 * (-w2 * (x_norm - k0).powi(2)).exp() * ratio
            }
        }
    }
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// `G(x) = ∫ e^{-i x·y} g(y) d³y` in closed form.
pub fn fourier3(g: &Spatial, x: [f64; 3]) -> Complex64 {
    let w = g.width();
    let shifted = match *g {
        Spatial::Gaussian3d { .. } => x,
        Spatial::PlaneWavePacket { k0, .. } => [x[0] - k0[0], x[1] - k0[1], x[2] - k0[2]],
    };
    let d = norm3(shifted);
    Complex64::new(g.peak() * (-0.5 * w * w * d * d).exp(), 0.0)
}

/// `G` at `|x|` for a spherically symmetric profile, in closed form.
pub fn fourier3_radial(g: &Spatial, x_norm: f64) -> Result<Complex64, FieldError> {
    match g {
        Spatial::Gaussian3d { .. } => Ok(fourier3(g, [0.0, 0.0, x_norm])),
        Spatial::PlaneWavePacket { .. } => Err(FieldError::InvalidParameter(
            "plane-wave packet is not spherically symmetric".into(),
        )),
    }
}

/// `4π ∫_0^r_max r² g(r) sin(|x| r)/(|x| r) dr` by composite Gauss–Legendre,
/// for radial profiles with no closed-form transform.
pub fn fourier3_by_quadrature<F: Fn(f64) -> f64>(
    g_radial: F,
    x_norm: f64,
    r_max: f64,
    panels: usize,
) -> Result<f64, FieldError> {
    let rule = QuadratureRule::gauss_legendre(16);
    let v: f64 = rule.integrate_composite(0.0, r_max, panels, |r| {
        let kr = x_norm * r;
        let sinc = if kr.abs() < 1e-8 { 1.0 - kr * kr / 6.0 } else { kr.sin() / kr };
        4.0 * PI * r * r * g_radial(r) * sinc
    })?;
    Ok(v)
}

impl TestFunction {
    pub fn new(temporal: Temporal, spatial: Spatial) -> Self {
        Self {
            temporal,
            spatial,
            amplitude: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        if !self.amplitude.is_finite() {
            return Err(FieldError::InvalidParameter("amplitude must be finite".into()));
        }
        self.temporal.validate()?;
        self.spatial.validate()
    }

    /// `∫ |f|² d⁴x` where finite.
    pub fn l2_norm_sq(&self) -> Option<f64> {
        self.temporal
            .norm_sq()
            .map(|t| self.amplitude * self.amplitude * t * self.spatial.norm_sq())
    }

    /// Draw a test function with random parameters from the non-distributional
    /// variants.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let temporal = if rng.random_bool(0.5) {
            Temporal::Exponential {
                omega_bar: rng.random_range(0.2..5.0),
            }
        } else {
            Temporal::Gaussian {
                center: rng.random_range(-5.0..5.0),
                width: rng.random_range(0.2..3.0),
            }
        };
        let width = rng.random_range(0.3..3.0);
        let spatial = if rng.random_bool(0.5) {
            Spatial::Gaussian3d { width }
        } else {
            let k0 = [
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            ];
            Spatial::PlaneWavePacket { k0, width }
        };
        Self {
            temporal,
            spatial,
            amplitude: rng.random_range(0.1..2.0),
        }
    }
}

/// Grid parameters for the radial momentum and time quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    pub mass: f64,
    pub k_max: f64,
    pub n_k: usize,
    pub t_max: f64,
    pub n_t: usize,
}

pub const MIN_N_K: usize = 64;
/// Nodes per Gauss–Legendre panel on every grid.
pub(crate) const PANEL_NODES: usize = 16;

impl FieldConfig {
    /// Defaults sized to the given spatial profile and temporal factor.
    pub fn for_function(mass: f64, f: &TestFunction) -> Self {
        let k_max = Self::default_k_max(mass, &f.spatial);
        let t_max = f.temporal.correlation_time();
        let t_max = if t_max.is_finite() { t_max } else { 0.0 };
        let omega_max = (k_max * k_max + mass * mass).sqrt();
        let n_t = PANEL_NODES * ((2.0 * t_max * omega_max / PI).ceil() as usize).max(64);
        Self {
            mass,
            k_max,
            n_k: 256,
            t_max,
            n_t,
        }
    }

    pub fn default_k_max(mass: f64, g: &Spatial) -> f64 {
        (20.0 * mass).max(5.0 * mass.max(g.bandwidth()))
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        positive("mass", self.mass)?;
        positive("k_max", self.k_max)?;
        if self.n_k == 0 || self.n_t == 0 {
            return Err(FieldError::InvalidParameter("grid counts must be positive".into()));
        }
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            return Err(FieldError::InvalidParameter("t_max must be non-negative".into()));
        }
        Ok(())
    }

    /// Resolution requirements for profile `g`.
    pub(crate) fn check_resolution(&self, g: &Spatial) -> Result<(), FieldError> {
        if self.n_k < MIN_N_K {
            return Err(FieldError::Underresolved(format!(
                "n_k = {} is below the minimum {MIN_N_K}",
                self.n_k
            )));
        }
        let need = 5.0 * self.mass.max(g.bandwidth());
        if self.k_max < need {
            return Err(FieldError::Underresolved(format!(
                "k_max = {} below 5 max(m, bandwidth) = {need}",
                self.k_max
            )));
        }
        Ok(())
    }

    pub fn with_doubled_grids(&self) -> Self {
        Self {
            n_k: 2 * self.n_k,
            n_t: 2 * self.n_t,
            ..*self
        }
    }

    /// Radial Gauss–Legendre grid on `[0, k_max]` with about `n_k` nodes.
    pub(crate) fn radial_grid(&self) -> (Vec<f64>, Vec<f64>) {
        let panels = self.n_k.div_ceil(PANEL_NODES);
        QuadratureRule::gauss_legendre(PANEL_NODES).composite_grid(0.0, self.k_max, panels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_transform_at_origin_is_total_integral() {
        let g = Spatial::Gaussian3d { width: 1.0 };
        let v = fourier3(&g, [0.0; 3]);
        assert!((v.re - (2.0 * PI).powf(1.5)).abs() < 1e-12);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn gaussian_transform_matches_radial_quadrature() {
        for w in [0.5, 1.0, 2.0] {
            let g = Spatial::Gaussian3d { width: w };
            for x in [0.0, 0.3, 1.0, 2.5] {
                let q = fourier3_by_quadrature(|r| (-r * r / (2.0 * w * w)).exp(), x, 14.0 * w, 64)
                    .unwrap();
                let c = fourier3_radial(&g, x).unwrap().re;
                assert!((q - c).abs() <= 1e-10 * c.abs().max(1.0), "w={w} x={x}");
            }
        }
    }

    #[test]
    fn plane_wave_peaks_at_k0() {
        let k0 = [1.0, -2.0, 0.5];
        let g = Spatial::PlaneWavePacket { k0, width: 1.0 };
        let at = fourier3(&g, k0).norm();
        for d in [0.1, 0.5, 1.0] {
            let off = fourier3(&g, [k0[0] + d, k0[1], k0[2]]).norm();
            assert!(off < at);
        }
        assert!(fourier3_radial(&g, 1.0).is_err());
    }

    #[test]
    fn angular_mean_matches_direct_average() {
        let g = Spatial::PlaneWavePacket { k0: [0.0, 0.0, 1.5], width: 0.8 };
        let rule = QuadratureRule::gauss_legendre(48);
        for x in [0.0, 0.4, 1.5, 3.0] {
            let direct: f64 = rule
                .integrate(-1.0, 1.0, |c: f64| {
                    let s = (1.0 - c * c).sqrt();
                    fourier3(&g, [x * s, 0.0, x * c]).norm_sqr()
                })
                .unwrap();
            let mean = g.angular_mean_sq(x);
            assert!((0.5 * direct - mean).abs() <= 1e-10 * mean.max(1.0), "x={x}");
        }
    }

    #[test]
    fn temporal_transforms() {
        let e = Temporal::Exponential { omega_bar: 2.0 };
        assert!((e.transform(0.0).re - 0.5).abs() < 1e-15);
        let d = Temporal::DeltaPv { beta: 0.5, sign: Sign::Plus, mass: 1.0 };
        assert_eq!(d.transform(0.2).re, 1.0);
        assert_eq!(d.transform(0.5).re, 0.5);
        assert_eq!(d.transform(0.7).re, 0.0);
        let dm = Temporal::DeltaPv { beta: 0.5, sign: Sign::Minus, mass: 1.0 };
        assert_eq!(dm.transform(-0.7).re, 1.0);
        assert_eq!(dm.transform(0.0).re, 0.0);
    }

    #[test]
    fn validation() {
        assert!(Temporal::Exponential { omega_bar: 0.0 }.validate().is_err());
        assert!(Temporal::DeltaPv { beta: 1.0, sign: Sign::Plus, mass: 1.0 }.validate().is_err());
        assert!(Temporal::DeltaPv { beta: 0.5, sign: Sign::Plus, mass: 0.0 }.validate().is_err());
        assert!(Spatial::Gaussian3d { width: -1.0 }.validate().is_err());
    }
}
