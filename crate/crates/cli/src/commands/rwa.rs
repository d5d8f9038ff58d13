use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use propsign::fields::{FieldConfig, Temporal, TestFunction};
use propsign::rwa::fixtures::{
    functional_fixtures, laplace_lattice, lattice_model, model_with_rates, oracle_fixture,
};
use propsign::rwa::{
    interacting_functional, laplace_sign_combination, lindblad_oracle, rwa_sign_closed_form,
    sample_sign_point, two_time_average, RwaError, RwaModel,
};

use crate::config::RunConfig;
use crate::output::{Failure, Outcome};

#[derive(Serialize, Default)]
struct RwaRow {
    part: &'static str,
    case: String,
    sector: Option<u8>,
    omega_bar: Option<f64>,
    k: Option<f64>,
    value: f64,
    value_im: Option<f64>,
    reference: Option<f64>,
    reference_im: Option<f64>,
    leakage: Option<f64>,
    error: f64,
    tolerance: f64,
    pass: bool,
}

fn two_pi_cubed() -> f64 {
    (2.0 * std::f64::consts::PI).powi(3)
}

fn is_free(model: &RwaModel) -> bool {
    [1u8, 2].iter().all(|&l| [1u8, 2].iter().all(|&j| (0..=20).all(|n| model.h2(l, j, 0.5 * n as f64) == 0.0)))
}

fn load(path: &Path) -> Result<RwaModel, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    RwaModel::from_json(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn record(out: &mut Outcome, r: RwaRow) {
    if !r.pass {
        out.claim_failed(format!("{} {} failed: error {} > {}", r.part, r.case, r.error, r.tolerance));
    }
    out.push(&r);
}

pub fn rwa(cfg: &RunConfig, model_file: Option<&Path>) -> Result<Outcome, Failure> {
    cfg.accept(
        &["laplace", "oracle", "functional", "golden"],
        &["sweep_n", "omega_bar", "n_max"],
        &["default", "free", "pumped"],
    )?;
    let model = match model_file {
        Some(p) => load(p)?,
        None => match cfg.fixture_or("default") {
            "free" => RwaModel::free(1.0),
            // gain rate 2 on particles: transforms diverge for omega_bar <= 2
            "pumped" => model_with_rates(1.0, 0.0, [2.0, 0.0, 0.0, 0.0]),
            _ => lattice_model(),
        },
    };
    let sweep_n = cfg.count("sweep_n", 10_000)?;
    let n_max = cfg.count("n_max", 12)?;
    let omega_override = cfg.param("omega_bar").map(|_| cfg.positive("omega_bar", 1.0)).transpose()?;
    let mut out = Outcome::new();
    match run(cfg, &model, model_file.is_some(), sweep_n, n_max, omega_override, &mut out) {
        Ok(()) => Ok(out),
        Err(RwaError::InvalidParameter(m)) => Err(Failure::Usage(m)),
        Err(e) => Ok(out.accuracy_failure(e.to_string())),
    }
}

fn run(
    cfg: &RunConfig,
    model: &RwaModel,
    from_file: bool,
    sweep_n: usize,
    n_max: usize,
    omega_override: Option<f64>,
    out: &mut Outcome,
) -> Result<(), RwaError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for n in 0..sweep_n {
        let s = sample_sign_point(&mut rng)?;
        record(out, RwaRow {
            part: "sweep",
            case: format!("point {n} h2={:?}", s.h2),
            sector: Some(s.sector),
            omega_bar: Some(s.omega_bar),
            k: Some(s.k),
            value: s.value,
            error: (-s.value).max(0.0),
            pass: s.value >= 0.0,
            ..Default::default()
        });
    }

    let lattice: Vec<(f64, f64, u8)> = laplace_lattice()
        .into_iter()
        .map(|(wb, k)| (omega_override.unwrap_or(wb), k))
        .flat_map(|(wb, k)| [(wb, k, 1u8), (wb, k, 2u8)])
        .collect();
    let mut dedup = lattice.clone();
    dedup.dedup();
    let tol = cfg.tol("laplace", 1e-5);
    let laplace: Vec<Result<(f64, f64), RwaError>> = dedup
        .par_iter()
        .map(|&(wb, k, i)| Ok((laplace_sign_combination(i, wb, k, model)?, rwa_sign_closed_form(i, wb, k, model)?)))
        .collect();
    let free = is_free(model);
    let golden_tol = cfg.tol("golden", 1e-12);
    for (&(wb, k, i), res) in dedup.iter().zip(laplace) {
        let (quad, closed) = res?;
        let err = (quad - closed).abs() / closed.abs();
        record(out, RwaRow {
            part: "laplace",
            case: format!("sector {i}"),
            sector: Some(i),
            omega_bar: Some(wb),
            k: Some(k),
            value: quad,
            reference: Some(closed),
            error: err,
            tolerance: tol,
            pass: err <= tol,
            ..Default::default()
        });
        if free {
            let w = (k * k + model.mass * model.mass).sqrt();
            let golden = two_pi_cubed() * w / (w * w + wb * wb);
            let err = (closed - golden).abs() / golden;
            record(out, RwaRow {
                part: "free_golden",
                case: format!("sector {i}"),
                sector: Some(i),
                omega_bar: Some(wb),
                k: Some(k),
                value: closed,
                reference: Some(golden),
                error: err,
                tolerance: golden_tol,
                pass: err <= golden_tol,
                ..Default::default()
            });
        }
    }

    let tol = cfg.tol("oracle", 1e-4);
    let queries: Vec<_> = oracle_fixture()
        .into_iter()
        .map(|(q, m)| (q, if from_file { *model } else { m }))
        .collect();
    let oracle: Vec<Result<_, RwaError>> = queries
        .par_iter()
        .map(|(q, m)| Ok((two_time_average(q, m)?, lindblad_oracle(q, m, n_max)?)))
        .collect();
    for ((q, _), res) in queries.iter().zip(oracle) {
        let (c, o) = res?;
        let diff = (c - o.value).norm();
        let err = if c.norm() > 0.0 { diff / c.norm() } else { diff };
        record(out, RwaRow {
            part: "oracle",
            case: format!(
                "ijlm={}{}{}{} t'={} t''={} tau={}",
                q.i, q.j, q.l, q.m, q.t_prime, q.t_doubleprime, q.tau
            ),
            leakage: Some(o.leakage),
            k: Some(q.k_norm),
            value: c.re,
            value_im: Some(c.im),
            reference: Some(o.value.re),
            reference_im: Some(o.value.im),
            error: err,
            tolerance: tol,
            pass: err <= tol,
            ..Default::default()
        });
    }

    let tol = cfg.tol("functional", 1e-9);
    let fixtures: Vec<_> = functional_fixtures(cfg.seed)
        .into_iter()
        .map(|(m, g, wb)| (if from_file || cfg.fixture.is_some() { *model } else { m }, g, omega_override.unwrap_or(wb)))
        .collect();
    let values: Vec<Result<f64, RwaError>> = fixtures
        .par_iter()
        .map(|(m, g, wb)| {
            let grid = FieldConfig::for_function(m.mass, &TestFunction::new(Temporal::Exponential { omega_bar: *wb }, *g));
            interacting_functional(g, *wb, m, &grid)
        })
        .collect();
    for ((_, g, wb), res) in fixtures.iter().zip(values) {
        let v = res?;
        record(out, RwaRow {
            part: "functional",
            case: serde_json::to_string(g).expect("plain data serializes"),
            omega_bar: Some(*wb),
            value: v,
            reference: Some(0.0),
            error: (-v).max(0.0),
            tolerance: tol,
            pass: v >= -tol * v.abs(),
            ..Default::default()
        });
    }
    Ok(())
}
