//! Truncated-Fock integration of the single-mode reduction of the master
//! equation, used as an independent check on the closed-form averages.

use num_complex::Complex64;
use serde::Serialize;

use super::{two_pi_cubed, RwaError, RwaModel, TwoTimeQuery};
use crate::channels::CMatrix;

pub const MIN_N_MAX: usize = 8;
pub const LEAKAGE_LIMIT: f64 = 1e-8;
/// RK4 step times the generator scale.
const STEP_SCALE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleValue {
    pub value: Complex64,
    /// Vacuum population that reached the top Fock level.
    pub leakage: f64,
}

fn lowering(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |r, c| {
        if c == r + 1 {
            Complex64::new((c as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// One mode: frequency, gain rate `κ₁` (dissipator in `a`) and loss rate
/// `κ₂` (dissipator in `a†`).
struct Mode {
    a: CMatrix,
    ad: CMatrix,
    n: CMatrix,
    omega: f64,
    gain: f64,
    loss: f64,
}

impl Mode {
    fn new(a: CMatrix, omega: f64, gain: f64, loss: f64) -> Self {
        let ad = a.adjoint();
        let n = &ad * &a;
        Self { a, ad, n, omega, gain, loss }
    }

    fn dissipator_adjoint(&self, o: &CMatrix) -> CMatrix {
        let (a, ad) = (&self.a, &self.ad);
        let g = (a * (o * ad - ad * o) + (a * o - o * a) * ad) * Complex64::new(self.gain, 0.0);
        let l = (ad * (o * a - a * o) + (ad * o - o * ad) * a) * Complex64::new(self.loss, 0.0);
        g + l
    }

    /// `dO/dt = -i[O, H] + L̃₁(O) + L̃₂(O)` with `H = ω a†a`.
    fn heisenberg(&self, o: &CMatrix) -> CMatrix {
        let comm = &self.n * o - o * &self.n;
        comm * Complex64::new(0.0, self.omega) + self.dissipator_adjoint(o)
    }

    /// The trace dual of [`Mode::heisenberg`].
    fn schrodinger(&self, rho: &CMatrix) -> CMatrix {
        let (a, ad) = (&self.a, &self.ad);
        let two = Complex64::new(2.0, 0.0);
        let aad = a * ad;
        let ada = &self.n;
        let comm = &self.n * rho - rho * &self.n;
        let g = (ad * rho * a * two - &aad * rho - rho * &aad) * Complex64::new(self.gain, 0.0);
        let l = (a * rho * ad * two - ada * rho - rho * ada) * Complex64::new(self.loss, 0.0);
        comm * Complex64::new(0.0, -self.omega) + g + l
    }

    fn scale(&self) -> f64 {
        let top = (self.a.nrows() as f64).max(1.0);
        self.omega * top + 4.0 * (self.gain + self.loss) * top
    }
}

fn rk4(x0: &CMatrix, t: f64, scale: f64, f: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
    if t == 0.0 {
        return x0.clone();
    }
    let steps = (t * scale / STEP_SCALE).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let half = Complex64::new(0.5 * h, 0.0);
    let full = Complex64::new(h, 0.0);
    let sixth = Complex64::new(h / 6.0, 0.0);
    let two = Complex64::new(2.0, 0.0);
    let mut x = x0.clone();
    for _ in 0..steps {
        let k1 = f(&x);
        let k2 = f(&(&x + &k1 * half));
        let k3 = f(&(&x + &k2 * half));
        let k4 = f(&(&x + &k3 * full));
        x += (k1 + k2 * two + k3 * two + k4) * sixth;
    }
    x
}

fn vacuum_expectation(o: &CMatrix) -> Complex64 {
    o[(0, 0)]
}

/// Single-mode reduction for species `l` with `â = a / √(2ωV)` and
/// `δ³(0) → V/(2π)³`.
fn species_mode(model: &RwaModel, l: u8, k: f64, dim: usize) -> Mode {
    let w = model.omega(k);
    let v = model.mode_volume;
    // per-mode coupling |h|² (2π)³/V times the commutator norm 2ωV
    let rate = |j| model.h2(l, j, k) * two_pi_cubed() / v * 2.0 * w * v;
    Mode::new(lowering(dim), w, rate(1), rate(2))
}

fn ladder(mode: &Mode, j: u8) -> &CMatrix {
    if j == 1 {
        &mode.a
    } else {
        &mode.ad
    }
}

/// The closed-form coefficient recomputed from the truncated-Fock ODE by
/// propagating observables: `⟨0| Γ̃_τ(Γ̃_t'(C_ij) Γ̃_t''(C_lm)) |0⟩`.
pub fn lindblad_oracle(q: &TwoTimeQuery, model: &RwaModel, n_max: usize) -> Result<OracleValue, RwaError> {
    q.validate()?;
    model.validate()?;
    if n_max < MIN_N_MAX {
        return Err(RwaError::InvalidParameter(format!("n_max must be >= {MIN_N_MAX}, got {n_max}")));
    }
    let dim = n_max + 1;
    let k = q.k_norm;
    let first = species_mode(model, q.i, k, dim);
    let second = species_mode(model, q.l, k, dim);

    let t_end = q.t_prime.max(q.t_doubleprime) + q.tau;
    let leakage = [&first, &second]
        .iter()
        .map(|mode| {
            let mut rho0 = CMatrix::zeros(dim, dim);
            rho0[(0, 0)] = Complex64::new(1.0, 0.0);
            let rho = rk4(&rho0, t_end, mode.scale(), |r| mode.schrodinger(r));
            rho[(n_max, n_max)].re.abs()
        })
        .fold(0.0, f64::max);
    if leakage > LEAKAGE_LIMIT {
        return Err(RwaError::Truncation { leakage, limit: LEAKAGE_LIMIT });
    }

    let evolve = |mode: &Mode, o: &CMatrix, t: f64| rk4(o, t, mode.scale(), |x| mode.heisenberg(x));
    let a_t = evolve(&first, ladder(&first, q.j), q.t_prime);
    let b_t = evolve(&second, ladder(&second, q.m), q.t_doubleprime);
    let normalized = if q.i == q.l {
        vacuum_expectation(&evolve(&first, &(a_t * b_t), q.tau))
    } else {
        // independent modes: the vacuum average factorizes
        vacuum_expectation(&evolve(&first, &a_t, q.tau)) * vacuum_expectation(&evolve(&second, &b_t, q.tau))
    };
    let w = model.omega(k);
    let v = model.mode_volume;
    // back to continuum operators, then strip δ³(0) = V/(2π)³
    let value = normalized * (2.0 * w * v) * (two_pi_cubed() / v);
    Ok(OracleValue { value, leakage })
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn unit(dim: usize, r: usize, c: usize) -> CMatrix {
    let mut e = CMatrix::zeros(dim, dim);
    e[(r, c)] = Complex64::new(1.0, 0.0);
    e
}

/// Largest deviations, relative to the size of the compositions, of
/// `[[·, H], L̃_i1 + L̃_i2]` (single mode, both species) and of
/// `[L̃_11 + L̃_12, L̃_21 + L̃_22]` (two modes), over a basis of operators.
pub fn generator_commutators(model: &RwaModel, k: f64, n_max: usize) -> Result<(f64, f64), RwaError> {
    model.validate()?;
    if n_max == 0 {
        return Err(RwaError::InvalidParameter("n_max must be positive".into()));
    }
    let dim = n_max + 1;
    let mut free_dev: f64 = 0.0;
    for l in [1, 2] {
        let mode = species_mode(model, l, k, dim);
        let h = &mode.n * Complex64::new(mode.omega, 0.0);
        let ad_h = |o: &CMatrix| o * &h - &h * o;
        for r in 0..dim {
            for c in 0..dim {
                let e = unit(dim, r, c);
                let x = ad_h(&mode.dissipator_adjoint(&e));
                let y = mode.dissipator_adjoint(&ad_h(&e));
                free_dev = free_dev.max(max_abs(&(&x - &y)) / max_abs(&x).max(max_abs(&y)).max(1.0));
            }
        }
    }

    let id = CMatrix::identity(dim, dim);
    let a = lowering(dim);
    let wa = species_mode(model, 1, k, dim);
    let wb = species_mode(model, 2, k, dim);
    let mode_a = Mode::new(a.kronecker(&id), wa.omega, wa.gain, wa.loss);
    let mode_b = Mode::new(id.kronecker(&a), wb.omega, wb.gain, wb.loss);
    let big = dim * dim;
    let mut cross_dev: f64 = 0.0;
    for r in 0..big {
        for c in 0..big {
            let e = unit(big, r, c);
            let x = mode_a.dissipator_adjoint(&mode_b.dissipator_adjoint(&e));
            let y = mode_b.dissipator_adjoint(&mode_a.dissipator_adjoint(&e));
            cross_dev = cross_dev.max(max_abs(&(&x - &y)) / max_abs(&x).max(max_abs(&y)).max(1.0));
        }
    }
    Ok((free_dev, cross_dev))
}
