use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use propsign::channels::{random_density, DensityMatrix};
use propsign::covmap::{
    default_witness_fixture, gaussian_backward, gaussian_forward, nononto_witness, purity_rate,
    purity_slope_fd, sigma_pm, CovError, HalfSign, PState,
};

use crate::config::RunConfig;
use crate::output::{CheckRow, Failure, Outcome};

fn max_abs_diff(a: &propsign::channels::CMatrix, b: &propsign::channels::CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn row(check: &str, case: &str, value: f64, reference: Option<f64>, error: f64, tolerance: f64, pass: bool) -> CheckRow {
    CheckRow {
        check: check.into(),
        case: case.into(),
        value,
        reference,
        error,
        tolerance,
        pass,
    }
}

pub fn covmap(cfg: &RunConfig) -> Result<Outcome, Failure> {
    cfg.accept(
        &["roundtrip", "decomposition", "sigma_trace", "purity_rate", "route_gap", "odd_sum"],
        &["tau", "lambda"],
        &["default"],
    )?;
    let (basis, psi, phi, tau0) = default_witness_fixture();
    let tau = cfg.param("tau").unwrap_or(tau0);
    if !(tau > 0.0) {
        return Err(Failure::Usage(format!("tau must be positive, got {tau}")));
    }
    let lambda = cfg.param("lambda").unwrap_or(1.0);
    let basis = basis.scaled(lambda).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut out = Outcome::new();
    match run(cfg, &basis, &psi, &phi, tau, &mut out) {
        Ok(()) => Ok(out),
        Err(CovError::InvalidParameter(m)) => Err(Failure::Usage(m)),
        Err(e) => Ok(out.accuracy_failure(e.to_string())),
    }
}

fn record(out: &mut Outcome, r: CheckRow) {
    if !r.pass {
        out.claim_failed(format!("{} ({}) failed: error {} > {}", r.check, r.case, r.error, r.tolerance));
    }
    out.push(&r);
}

fn run(
    cfg: &RunConfig,
    basis: &propsign::covmap::MomentumBasis,
    psi: &propsign::channels::CVector,
    phi: &propsign::channels::CVector,
    tau: f64,
    out: &mut Outcome,
) -> Result<(), CovError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tol = cfg.tol("roundtrip", 1e-12);
    let pure = DensityMatrix::pure(psi)?;
    for (case, rho) in [("pure_psi", pure.clone()), ("random_density", random_density(basis.dim(), &mut rng))] {
        let s = PState::new(basis.clone(), rho)?;
        let back = gaussian_backward(basis, gaussian_forward(&s, tau)?.rho.entries(), tau)?;
        let err = max_abs_diff(&back, s.rho.entries());
        record(out, row("roundtrip", case, err, Some(0.0), err, tol, err <= tol));
    }

    let sp = sigma_pm(basis, psi, tau, HalfSign::Plus)?;
    let sm = sigma_pm(basis, psi, tau, HalfSign::Minus)?;
    let fwd = gaussian_forward(&PState::new(basis.clone(), pure)?, tau)?;
    let avg = (sp.entries() + sm.entries()) * Complex64::new(0.5, 0.0);
    let err = max_abs_diff(&avg, fwd.rho.entries());
    let tol = cfg.tol("decomposition", 1e-9);
    record(out, row("decomposition", "half_sum_of_sigmas", err, Some(0.0), err, tol, err <= tol));
    let tol = cfg.tol("sigma_trace", 1e-10);
    for (case, s) in [("sigma_plus", &sp), ("sigma_minus", &sm)] {
        let t = s.trace().re;
        let err = (t - 1.0).abs();
        record(out, row("sigma_trace", case, t, Some(1.0), err, tol, err <= tol));
    }

    let exact = purity_rate(psi, basis.scalars())?;
    let fd = purity_slope_fd(basis, psi, 1e-6)?;
    let err = (fd - exact).abs();
    let tol = cfg.tol("purity_rate", 1e-4);
    let pass = err <= tol * exact.abs().max(1e-8);
    record(out, row("purity_rate", "finite_difference_h=1e-6", fd, Some(exact), err, tol, pass));

    match nononto_witness(basis, psi, phi, tau) {
        Ok(w) => {
            let tol = cfg.tol("route_gap", 1e-6);
            record(out, row("route_gap", "w_plus", w.w_plus, Some(w.w_plus_erfi), (w.w_plus - w.w_plus_erfi).abs(), tol, (w.w_plus - w.w_plus_erfi).abs() <= tol));
            record(out, row("route_gap", "w_minus", w.w_minus, Some(w.w_minus_erfi), (w.w_minus - w.w_minus_erfi).abs(), tol, (w.w_minus - w.w_minus_erfi).abs() <= tol));
            let tol = cfg.tol("odd_sum", 1e-8);
            let sum = w.w_plus + w.w_minus;
            record(out, row("odd_sum", "w_plus+w_minus", sum, Some(0.0), sum.abs(), tol, sum.abs() <= tol));
            let w_min = w.w_plus.min(w.w_minus);
            record(out, row("witness_min", "min(w_plus,w_minus)", w_min, Some(0.0), w_min.max(0.0), 0.0, w_min < 0.0));
        }
        Err(CovError::Inconclusive { w_plus, w_minus }) => {
            out.notes.push(format!(
                "warning: witness inconclusive, cross term vanishes (w_plus = {w_plus:e}, w_minus = {w_minus:e})"
            ));
            out.verdict = Some("inconclusive".into());
        }
        Err(e) => return Err(e),
    }
    Ok(())
}
