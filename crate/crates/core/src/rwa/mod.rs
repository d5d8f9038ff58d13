//! Rotating-wave master equation for a charged scalar field: closed-form
//! two-time averages, their double Laplace transforms, and the sign of the
//! interacting functional for exponential test functions.

pub mod fixtures;
mod oracle;

pub use oracle::{generator_commutators, lindblad_oracle, OracleValue, MIN_N_MAX};

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::{FieldConfig, FieldError, Spatial};
use crate::numkit::{integrate_semi_infinite_with, NumError, QuadratureRule, SemiInfiniteOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RwaError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("Fock truncation leakage {leakage:e} exceeds {limit:e}")]
    Truncation { leakage: f64, limit: f64 },
    #[error("quadrature not converged: {0}")]
    Accuracy(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Num(#[from] NumError),
}

pub(crate) fn two_pi_cubed() -> f64 {
    (2.0 * PI).powi(3)
}

/// `|h_ij(k)|²` as a function of `|k|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum H2Profile {
    Constant { value: f64 },
    /// `amplitude · exp(-k² / (2 width²))`
    Gaussian { amplitude: f64, width: f64 },
}

impl H2Profile {
    pub fn zero() -> Self {
        H2Profile::Constant { value: 0.0 }
    }

    pub fn eval(&self, k: f64) -> f64 {
        match *self {
            H2Profile::Constant { value } => value,
            H2Profile::Gaussian { amplitude, width } => {
                amplitude * (-k * k / (2.0 * width * width)).exp()
            }
        }
    }

    fn validate(&self, name: &str) -> Result<(), RwaError> {
        let ok = match *self {
            H2Profile::Constant { value } => value.is_finite() && value >= 0.0,
            H2Profile::Gaussian { amplitude, width } => {
                amplitude.is_finite() && amplitude >= 0.0 && width.is_finite() && width > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(RwaError::InvalidParameter(format!("{name}: {self:?} is not a nonnegative profile")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H2Set {
    pub h11: H2Profile,
    pub h12: H2Profile,
    pub h21: H2Profile,
    pub h22: H2Profile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwaModel {
    pub mass: f64,
    pub mode_volume: f64,
    pub h2: H2Set,
}

fn check_index(name: &str, v: u8) -> Result<(), RwaError> {
    if v == 1 || v == 2 {
        Ok(())
    } else {
        Err(RwaError::InvalidParameter(format!("{name} must be 1 or 2, got {v}")))
    }
}

impl RwaModel {
    /// All couplings zero.
    pub fn free(mass: f64) -> Self {
        Self::constant(mass, [0.0; 4])
    }

    /// Momentum-independent couplings `[h11, h12, h21, h22]`.
    pub fn constant(mass: f64, h2: [f64; 4]) -> Self {
        let c = |value| H2Profile::Constant { value };
        Self {
            mass,
            mode_volume: 1.0,
            h2: H2Set {
                h11: c(h2[0]),
                h12: c(h2[1]),
                h21: c(h2[2]),
                h22: c(h2[3]),
            },
        }
    }

    pub fn validate(&self) -> Result<(), RwaError> {
        for (name, v) in [("mass", self.mass), ("mode_volume", self.mode_volume)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(RwaError::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        self.h2.h11.validate("h11")?;
        self.h2.h12.validate("h12")?;
        self.h2.h21.validate("h21")?;
        self.h2.h22.validate("h22")
    }

    pub fn from_json(s: &str) -> Result<Self, RwaError> {
        let m: Self = serde_json::from_str(s)
            .map_err(|e| RwaError::InvalidParameter(format!("model JSON: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    pub fn omega(&self, k: f64) -> f64 {
        (k * k + self.mass * self.mass).sqrt()
    }

    /// `|h_lj(k)|²`.
    pub fn h2(&self, l: u8, j: u8, k: f64) -> f64 {
        let p = match (l, j) {
            (1, 1) => &self.h2.h11,
            (1, 2) => &self.h2.h12,
            (2, 1) => &self.h2.h21,
            _ => &self.h2.h22,
        };
        p.eval(k)
    }

    /// `κ_lj = (2π)³ 2ω_k |h_lj(k)|²`, the rate each dissipator contributes.
    pub fn kappa(&self, l: u8, j: u8, k: f64) -> f64 {
        two_pi_cubed() * 2.0 * self.omega(k) * self.h2(l, j, k)
    }

    /// Amplitude growth rate `κ_l1 - κ_l2` of species `l`.
    pub fn net_rate(&self, l: u8, k: f64) -> f64 {
        self.kappa(l, 1, k) - self.kappa(l, 2, k)
    }

    /// True when some species grows at some sampled `|k| ≤ k_max`.
    pub fn is_pumped(&self, k_max: f64) -> bool {
        (0..=256).any(|n| {
            let k = k_max * n as f64 / 256.0;
            self.net_rate(1, k) > 0.0 || self.net_rate(2, k) > 0.0
        })
    }

    /// Gaussian-in-k couplings with amplitudes in `[0, max_amp]`.
    pub fn random_gaussian<R: Rng + ?Sized>(rng: &mut R, max_amp: f64) -> Self {
        let mut p = || H2Profile::Gaussian {
            amplitude: rng.random_range(0.0..=max_amp),
            width: rng.random_range(0.3..3.0),
        };
        let h2 = H2Set {
            h11: p(),
            h12: p(),
            h21: p(),
            h22: p(),
        };
        Self {
            mass: 1.0,
            mode_volume: 1.0,
            h2,
        }
    }
}

/// `⟨0| Γ̃_τ(C_ij(k, t') C_lm(k, t'')) |0⟩` with `C_11 = a`, `C_12 = a†`,
/// `C_21 = b`, `C_22 = b†`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoTimeQuery {
    pub i: u8,
    pub j: u8,
    pub l: u8,
    pub m: u8,
    pub k_norm: f64,
    pub t_prime: f64,
    pub t_doubleprime: f64,
    pub tau: f64,
}

impl TwoTimeQuery {
    pub fn validate(&self) -> Result<(), RwaError> {
        check_index("i", self.i)?;
        check_index("j", self.j)?;
        check_index("l", self.l)?;
        check_index("m", self.m)?;
        for (name, v) in [
            ("k_norm", self.k_norm),
            ("t_prime", self.t_prime),
            ("t_doubleprime", self.t_doubleprime),
            ("tau", self.tau),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(RwaError::InvalidParameter(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Same species, one raising and one lowering operator.
    pub fn allowed(&self) -> bool {
        self.i == self.l && self.j != self.m
    }
}

/// `χ_l(k₁, k₂, t₁, t₂)`.
pub fn chi(l: u8, k1: f64, k2: f64, t1: f64, t2: f64, model: &RwaModel) -> f64 {
    model.net_rate(l, k1) * t1 + model.net_rate(l, k2) * t2
}

/// `expm1(x)/x`, continuous at 0.
pub fn expm1_ratio(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 + 0.5 * x
    } else {
        x.exp_m1() / x
    }
}

fn sign_of(index: u8) -> f64 {
    // (1 - 2δ_{1,index})
    if index == 1 {
        -1.0
    } else {
        1.0
    }
}

/// The coefficient `g_ijlm` multiplying `δ³(k' - k'')`.
pub fn two_time_average(q: &TwoTimeQuery, model: &RwaModel) -> Result<Complex64, RwaError> {
    q.validate()?;
    if !q.allowed() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let k = q.k_norm;
    let w = model.omega(k);
    let l = q.l;
    let chi_tt = chi(l, k, k, q.t_prime, q.t_doubleprime, model);
    let chi_tau = chi(l, k, k, q.tau, q.tau, model);
    let phase = w * (q.t_prime * sign_of(q.j) + q.t_doubleprime * sign_of(q.m));
    let first = if q.j == 1 && q.m == 2 {
        Complex64::from_polar(chi_tau.exp(), w * (sign_of(q.j) + sign_of(q.m)) * q.tau)
    } else {
        Complex64::new(0.0, 0.0)
    };
    let second = 4.0 * two_pi_cubed() * model.h2(l, q.m, k) * w * q.tau * expm1_ratio(chi_tau);
    Ok(Complex64::from_polar(two_pi_cubed() * 2.0 * w * chi_tt.exp(), phase) * (first + second))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LaplaceKind {
    /// `g(t₁, 0, t₂)`
    First,
    /// `g(0, t₁, t₂)`
    Second,
}

/// `∫₀^∞∫₀^∞ e^{-ω₁t₁ - ω₂t₂} g_ijlm(…) dt₁ dt₂` by iterated quadrature.
pub fn laplace_g(
    which: LaplaceKind,
    idx: [u8; 4],
    omega1: f64,
    omega2: f64,
    k: f64,
    model: &RwaModel,
) -> Result<Complex64, RwaError> {
    model.validate()?;
    for (name, v) in [("omega1", omega1), ("omega2", omega2)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(RwaError::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    let [i, j, l, m] = idx;
    let probe = TwoTimeQuery { i, j, l, m, k_norm: k, t_prime: 0.0, t_doubleprime: 0.0, tau: 0.0 };
    probe.validate()?;
    if !probe.allowed() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let r = model.net_rate(l, k);
    let rate1 = omega1 - r;
    if rate1 <= 0.0 {
        return Err(RwaError::Range(format!(
            "t1 integrand does not decay: omega1 = {omega1} <= growth rate {r}"
        )));
    }
    let rate2 = omega2 - 2.0 * r.max(0.0);
    if rate2 <= 0.0 {
        return Err(RwaError::Range(format!(
            "t2 integrand does not decay: omega2 = {omega2} <= growth rate {}",
            2.0 * r
        )));
    }
    let rule = QuadratureRule::gauss_legendre(20);
    let inner_opts = SemiInfiniteOptions::new(1.0 / rate1).oscillating(model.omega(k));
    let outer_opts = SemiInfiniteOptions::new(1.0 / rate2);
    let mut failure: Option<RwaError> = None;
    let outer = integrate_semi_infinite_with(
        |t2: f64| {
            if failure.is_some() {
                return Complex64::new(0.0, 0.0);
            }
            let inner = integrate_semi_infinite_with(
                |t1: f64| {
                    let (tp, tpp) = match which {
                        LaplaceKind::First => (t1, 0.0),
                        LaplaceKind::Second => (0.0, t1),
                    };
                    let q = TwoTimeQuery { t_prime: tp, t_doubleprime: tpp, tau: t2, ..probe };
                    // the query was validated above; only times change
                    two_time_average(&q, model).unwrap_or_default() * (-omega1 * t1).exp()
                },
                inner_opts,
                &rule,
            );
            match inner {
                Ok(v) => v.value * (-omega2 * t2).exp(),
                Err(e) => {
                    failure = Some(e.into());
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        outer_opts,
        &rule,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(outer?.value)
}

fn check_sector(i: u8, omega_bar: f64) -> Result<(), RwaError> {
    check_index("i", i)?;
    if !(omega_bar.is_finite() && omega_bar > 0.0) {
        return Err(RwaError::InvalidParameter(format!("omega_bar must be positive, got {omega_bar}")));
    }
    Ok(())
}

/// `Re[G⁽¹⁾ + G⁽²⁾]` of sector `i` at `(ω̄, 2ω̄)` by quadrature.
pub fn laplace_sign_combination(i: u8, omega_bar: f64, k: f64, model: &RwaModel) -> Result<f64, RwaError> {
    check_sector(i, omega_bar)?;
    let o = 3 - i;
    let g1 = laplace_g(LaplaceKind::First, [i, i, i, o], omega_bar, 2.0 * omega_bar, k, model)?;
    let g2 = laplace_g(LaplaceKind::Second, [i, o, i, i], omega_bar, 2.0 * omega_bar, k, model)?;
    Ok((g1 + g2).re)
}

/// Closed form of [`laplace_sign_combination`]:
/// `(2π)³ω[1 + (κ_i1 + κ_i2)/ω̄] / (ω² + (ω̄ + κ_i2 - κ_i1)²)`.
pub fn rwa_sign_closed_form(i: u8, omega_bar: f64, k: f64, model: &RwaModel) -> Result<f64, RwaError> {
    check_sector(i, omega_bar)?;
    let w = model.omega(k);
    let (k1, k2) = (model.kappa(i, 1, k), model.kappa(i, 2, k));
    let num = two_pi_cubed() * w * (1.0 + (k1 + k2) / omega_bar);
    let den = w * w + (omega_bar + k2 - k1).powi(2);
    Ok(num / den)
}

/// Both double Laplace transforms of sector `i` converge at `(ω̄, 2ω̄)`.
pub fn transforms_converge(i: u8, omega_bar: f64, k: f64, model: &RwaModel) -> bool {
    model.net_rate(i, k) < omega_bar
}

/// `Re ∬ f* iΔ_F,int f` for `f = e^{-ω̄t} h(x)`, `t ≥ 0`, by radial
/// quadrature over `|k|` with grid doubling as the accuracy check.
pub fn interacting_functional(
    h_spatial: &Spatial,
    omega_bar: f64,
    model: &RwaModel,
    cfg: &FieldConfig,
) -> Result<f64, RwaError> {
    h_spatial.validate()?;
    model.validate()?;
    cfg.validate()?;
    check_sector(1, omega_bar)?;
    if (cfg.mass - model.mass).abs() > 1e-12 * model.mass {
        return Err(RwaError::InvalidParameter("grid mass differs from model mass".into()));
    }
    let coarse = functional_on_grid(h_spatial, omega_bar, model, cfg)?;
    let fine = functional_on_grid(h_spatial, omega_bar, model, &cfg.with_doubled_grids())?;
    let scale = coarse.abs().max(fine.abs());
    if (coarse - fine).abs() > 0.01 * scale {
        return Err(RwaError::Accuracy(format!(
            "radial grid change moved the functional from {coarse} to {fine}"
        )));
    }
    Ok(coarse)
}

fn functional_on_grid(g: &Spatial, omega_bar: f64, model: &RwaModel, cfg: &FieldConfig) -> Result<f64, RwaError> {
    let panels = cfg.n_k.div_ceil(16).max(1);
    let (ks, ws) = QuadratureRule::gauss_legendre(16).composite_grid(0.0, cfg.k_max, panels);
    let mut acc = 0.0;
    for (&k, &wt) in ks.iter().zip(&ws) {
        for i in [1, 2] {
            if !transforms_converge(i, omega_bar, k, model) {
                return Err(RwaError::Range(format!(
                    "sector {i} transforms diverge at |k| = {k}: growth rate {} >= omega_bar {omega_bar}",
                    model.net_rate(i, k)
                )));
            }
        }
        let norm = two_pi_cubed() * 2.0 * model.omega(k);
        // directions are integrated over, so |G(k)|² and |G(-k)|² share one mean
        let weight = 4.0 * PI * k * k * g.angular_mean_sq(k) / (norm * norm);
        let sectors = rwa_sign_closed_form(1, omega_bar, k, model)? + rwa_sign_closed_form(2, omega_bar, k, model)?;
        acc += wt * weight * sectors;
    }
    Ok(acc)
}

/// One point of the closed-form positivity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignSample {
    pub sector: u8,
    pub omega_bar: f64,
    pub k: f64,
    pub h2: [f64; 4],
    pub value: f64,
}

/// Draws `ω̄ ∈ (0, 10]`, `k ∈ [0, 10]`, constant `|h|² ∈ [0, 1]` and evaluates
/// the closed form at unit mass.
pub fn sample_sign_point<R: Rng + ?Sized>(rng: &mut R) -> Result<SignSample, RwaError> {
    let omega_bar = 10.0 - rng.random_range(0.0..10.0);
    let k = rng.random_range(0.0..=10.0);
    let h2 = [(); 4].map(|_| rng.random_range(0.0..=1.0));
    let sector = rng.random_range(1..=2u8);
    let model = RwaModel::constant(1.0, h2);
    let value = rwa_sign_closed_form(sector, omega_bar, k, &model)?;
    Ok(SignSample { sector, omega_bar, k, h2, value })
}
