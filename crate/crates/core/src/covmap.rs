//! The Lorentz-covariant Gaussian dephasing map `ρ ↦ e^{-τ{λ·p, ·, λ·p}} ρ`
//! in a discrete momentum basis, its formal inverse, and the witness that
//! the inverse leaves the physical states.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channels::{purity, CMatrix, CVector, ChannelError, DensityMatrix};
use crate::numkit::{
    erfi, integrate_semi_infinite_with, NumError, QuadratureRule, SemiInfiniteOptions,
};

/// Largest exponent accepted by [`gaussian_backward`].
pub const BACKWARD_EXPONENT_LIMIT: f64 = 700.0;
/// Below this the witness cross term counts as zero.
pub const CROSS_TERM_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CovError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("witness inconclusive: cross term vanishes (w+ = {w_plus}, w- = {w_minus})")]
    Inconclusive { w_plus: f64, w_minus: f64 },
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Minkowski product with signature (+, -, -, -).
pub fn minkowski_dot(a: [f64; 4], b: [f64; 4]) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumBasis {
    /// `λ·p` for each basis vector.
    scalars: Vec<f64>,
    /// Some pair of points shares the same `λ·p`.
    degenerate: bool,
}

impl MomentumBasis {
    pub fn from_momenta(lambda: [f64; 4], points: &[[f64; 4]]) -> Result<Self, CovError> {
        Self::from_scalars(points.iter().map(|p| minkowski_dot(lambda, *p)).collect())
    }

    pub fn from_scalars(scalars: Vec<f64>) -> Result<Self, CovError> {
        if scalars.is_empty() {
            return Err(CovError::InvalidParameter("empty basis".into()));
        }
        if scalars.iter().any(|s| !s.is_finite()) {
            return Err(CovError::InvalidParameter("non-finite lambda.p".into()));
        }
        let mut sorted = scalars.clone();
        sorted.sort_by(f64::total_cmp);
        let degenerate = sorted.windows(2).any(|w| w[0] == w[1]);
        Ok(Self { scalars, degenerate })
    }

    pub fn scalars(&self) -> &[f64] {
        &self.scalars
    }

    pub fn dim(&self) -> usize {
        self.scalars.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Same basis with `λ` scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, CovError> {
        Self::from_scalars(self.scalars.iter().map(|s| s * factor).collect())
    }

    fn delta(&self, p: usize, q: usize) -> f64 {
        self.scalars[p] - self.scalars[q]
    }

    /// The diagonal operator `λ·p`.
    pub fn operator(&self) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            self.dim(),
            self.scalars.iter().map(|&s| Complex64::new(s, 0.0)),
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PState {
    pub basis: MomentumBasis,
    pub rho: DensityMatrix,
}

impl PState {
    pub fn new(basis: MomentumBasis, rho: DensityMatrix) -> Result<Self, CovError> {
        if basis.dim() != rho.dim() {
            return Err(CovError::InvalidParameter(format!(
                "basis has {} points, state has dimension {}",
                basis.dim(),
                rho.dim()
            )));
        }
        Ok(Self { basis, rho })
    }
}

fn check_tau(tau: f64) -> Result<(), CovError> {
    if tau.is_finite() && tau > 0.0 {
        Ok(())
    } else {
        Err(CovError::InvalidParameter(format!("tau must be positive, got {tau}")))
    }
}

fn scale_elements(basis: &MomentumBasis, m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |p, q| m[(p, q)] * f(basis.delta(p, q)))
}

/// Multiplies `ρ_pq` by `exp(-[λ·(p - q)]² τ)`.
pub fn gaussian_forward(s: &PState, tau: f64) -> Result<PState, CovError> {
    check_tau(tau)?;
    let out = scale_elements(&s.basis, s.rho.entries(), |d| (-d * d * tau).exp());
    Ok(PState {
        basis: s.basis.clone(),
        rho: DensityMatrix::new(out)?,
    })
}

/// Multiplies `m_pq` by `exp(+[λ·(p - q)]² τ)`; the input need not be a state.
pub fn gaussian_backward(basis: &MomentumBasis, m: &CMatrix, tau: f64) -> Result<CMatrix, CovError> {
    check_tau(tau)?;
    if m.nrows() != basis.dim() || m.ncols() != basis.dim() {
        return Err(CovError::InvalidParameter("matrix does not match the basis".into()));
    }
    let worst = (0..basis.dim())
        .flat_map(|p| (0..basis.dim()).map(move |q| (p, q)))
        .map(|(p, q)| basis.delta(p, q).powi(2) * tau)
        .fold(0.0, f64::max);
    if worst > BACKWARD_EXPONENT_LIMIT {
        return Err(CovError::Range(format!(
            "backward exponent {worst:.1} exceeds {BACKWARD_EXPONENT_LIMIT}"
        )));
    }
    Ok(scale_elements(basis, m, |d| (d * d * tau).exp()))
}

/// `{A, ρ, B} = B A† ρ + ρ B A† - 2 A† ρ B`.
pub fn bracket(a: &CMatrix, rho: &CMatrix, b: &CMatrix) -> CMatrix {
    let ad = a.adjoint();
    let bad = b * &ad;
    &bad * rho + rho * &bad - (&ad * rho * b) * Complex64::new(2.0, 0.0)
}

/// Right-hand side of the master equation, `-{λ·p, ρ, λ·p}`.
pub fn generator(basis: &MomentumBasis, rho: &CMatrix) -> CMatrix {
    let l = basis.operator();
    -bracket(&l, rho, &l)
}

/// `-4 Var_ψ(λ·p)`, the initial slope of the purity.
pub fn purity_rate(psi: &CVector, scalars: &[f64]) -> Result<f64, CovError> {
    if psi.len() != scalars.len() {
        return Err(CovError::InvalidParameter("state and basis sizes differ".into()));
    }
    let n = psi.norm_squared();
    if (n - 1.0).abs() > 1e-10 {
        return Err(CovError::InvalidParameter(format!("state norm^2 {n} is not 1")));
    }
    let (m1, m2) = psi.iter().zip(scalars).fold((0.0, 0.0), |(a, b), (z, &s)| {
        let w = z.norm_sqr();
        (a + w * s, b + w * s * s)
    });
    Ok(-4.0 * (m2 - m1 * m1))
}

/// Finite-difference slope `(Tr ρ(h)² - 1)/h` of the purity of a pure state.
pub fn purity_slope_fd(basis: &MomentumBasis, psi: &CVector, h: f64) -> Result<f64, CovError> {
    let s = PState::new(basis.clone(), DensityMatrix::pure(psi)?)?;
    let out = gaussian_forward(&s, h)?;
    Ok((purity(&out.rho) - purity(&s.rho)) / h)
}

/// `(1/(2√(πτ))) ∫ e^{-u²/4τ} e^{-iΔu} du` by quadrature (equals `e^{-Δ²τ}`).
pub fn forward_multiplier_by_quadrature(delta: f64, tau: f64) -> Result<f64, CovError> {
    check_tau(tau)?;
    let half = 20.0 * tau.sqrt();
    let panels = ((2.0 * half * (delta.abs() + 1.0) / PI).ceil() as usize).max(16);
    let rule = QuadratureRule::gauss_legendre(20);
    let v: Complex64 = rule.integrate_composite(-half, half, panels, |u| {
        Complex64::from_polar((-u * u / (4.0 * tau)).exp(), -delta * u)
    })?;
    Ok(v.re / (2.0 * (PI * tau).sqrt()))
}

/// `(1/(2√(πτ))) ∫ e^{-u²/4τ} e^{Δu} du` by quadrature (equals `e^{Δ²τ}`).
pub fn backward_multiplier_by_quadrature(delta: f64, tau: f64) -> Result<f64, CovError> {
    check_tau(tau)?;
    // the integrand peaks at u = 2Δτ
    let centre = 2.0 * delta * tau;
    let half = 20.0 * tau.sqrt();
    let rule = QuadratureRule::gauss_legendre(20);
    let v: f64 = rule.integrate_composite(centre - half, centre + half, 32, |u| {
        (-u * u / (4.0 * tau) + delta * u).exp()
    })?;
    Ok(v / (2.0 * (PI * tau).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfSign {
    Plus,
    Minus,
}

impl HalfSign {
    fn factor(self) -> f64 {
        match self {
            HalfSign::Plus => 1.0,
            HalfSign::Minus => -1.0,
        }
    }
}

fn normalized(psi: &CVector, what: &str) -> Result<(), CovError> {
    let n = psi.norm_squared();
    if (n - 1.0).abs() > 1e-10 {
        return Err(CovError::InvalidParameter(format!("{what} has norm^2 {n}, expected 1")));
    }
    Ok(())
}

/// `σ_{ψ,±}(τ) = (1/√(πτ)) ∫_0^∞ e^{-u²/4τ} e^{∓iλ·p u} |ψ⟩⟨ψ| e^{±iλ·p u} du`,
/// one semi-infinite quadrature per matrix element.
pub fn sigma_pm(
    basis: &MomentumBasis,
    psi: &CVector,
    tau: f64,
    sign: HalfSign,
) -> Result<DensityMatrix, CovError> {
    check_tau(tau)?;
    normalized(psi, "psi")?;
    if psi.len() != basis.dim() {
        return Err(CovError::InvalidParameter("state and basis sizes differ".into()));
    }
    let d = basis.dim();
    let rule = QuadratureRule::gauss_legendre(20);
    let norm = 1.0 / (PI * tau).sqrt();
    let mut out = CMatrix::zeros(d, d);
    for p in 0..d {
        for q in 0..d {
            let delta = basis.delta(p, q);
            let opts = SemiInfiniteOptions::new(0.5 * tau.sqrt()).oscillating(delta);
            let r = integrate_semi_infinite_with(
                |u: f64| {
                    Complex64::from_polar((-u * u / (4.0 * tau)).exp(), -sign.factor() * delta * u)
                },
                opts,
                &rule,
            )?;
            out[(p, q)] = psi[p] * psi[q].conj() * r.value * norm;
        }
    }
    Ok(DensityMatrix::new(out)?)
}

/// Closed form of one element factor: `e^{-Δ²τ}[1 ∓ i erfi(Δ√τ)]`.
pub fn sigma_factor_closed_form(delta: f64, tau: f64, sign: HalfSign) -> Result<Complex64, CovError> {
    let e = erfi(delta * tau.sqrt())?;
    Ok(Complex64::new(1.0, -sign.factor() * e) * (-delta * delta * tau).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessVerdict {
    /// One of the backward images has a negative diagonal element.
    NotOnto,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub tau: f64,
    pub lambda_scalars: Vec<f64>,
    pub w_plus: f64,
    pub w_minus: f64,
    pub w_plus_erfi: f64,
    pub w_minus_erfi: f64,
    pub route_gap: f64,
    pub verdict: WitnessVerdict,
}

/// `w_± = ⟨φ| backward(σ_{ψ,±}) |φ⟩`, by matrices and by the erfi sum.
pub fn nononto_witness(
    basis: &MomentumBasis,
    psi: &CVector,
    phi: &CVector,
    tau: f64,
) -> Result<WitnessReport, CovError> {
    normalized(psi, "psi")?;
    normalized(phi, "phi")?;
    if phi.len() != basis.dim() || psi.len() != basis.dim() {
        return Err(CovError::InvalidParameter("state and basis sizes differ".into()));
    }
    let overlap = phi.dotc(psi);
    if overlap.norm() > 1e-10 {
        return Err(CovError::InvalidParameter(format!(
            "psi and phi are not orthogonal (overlap {})",
            overlap.norm()
        )));
    }

    let direct = |sign| -> Result<f64, CovError> {
        let sigma = sigma_pm(basis, psi, tau, sign)?;
        let back = gaussian_backward(basis, sigma.entries(), tau)?;
        Ok(phi.dotc(&(back * phi)).re)
    };
    let w_plus = direct(HalfSign::Plus)?;
    let w_minus = direct(HalfSign::Minus)?;

    let d = basis.dim();
    let mut cross = 0.0;
    for p in 0..d {
        for q in 0..d {
            if p == q {
                continue;
            }
            let z = psi[p] * phi[p].conj() * psi[q].conj() * phi[q];
            cross += erfi(basis.delta(p, q) * tau.sqrt())? * z.im;
        }
    }
    let ov = overlap.norm_sqr();
    let w_plus_erfi = ov + cross;
    let w_minus_erfi = ov - cross;
    let route_gap = (w_plus - w_plus_erfi).abs().max((w_minus - w_minus_erfi).abs());
    if cross.abs() < CROSS_TERM_FLOOR {
        return Err(CovError::Inconclusive { w_plus, w_minus });
    }
    Ok(WitnessReport {
        tau,
        lambda_scalars: basis.scalars().to_vec(),
        w_plus,
        w_minus,
        w_plus_erfi,
        w_minus_erfi,
        route_gap,
        verdict: WitnessVerdict::NotOnto,
    })
}

/// Three-point basis `λ·p ∈ {0, 1, 2}` with `ψ` the uniform superposition and
/// `φ` its discrete Fourier partner, at `τ = 1`.
pub fn default_witness_fixture() -> (MomentumBasis, CVector, CVector, f64) {
    let basis = MomentumBasis::from_scalars(vec![0.0, 1.0, 2.0]).expect("static basis");
    let s = 1.0 / 3f64.sqrt();
    let psi = CVector::from_element(3, Complex64::new(s, 0.0));
    let phi = CVector::from_fn(3, |p, _| Complex64::from_polar(s, 2.0 * PI * p as f64 / 3.0));
    (basis, psi, phi, 1.0)
}
