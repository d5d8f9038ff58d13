use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use propsign::fields::{
    indeterminacy_witness, re_idf_free, FieldConfig, FieldError, Spatial, Temporal, TestFunction,
    WITNESS_TOL,
};

use crate::config::RunConfig;
use crate::output::{Failure, Outcome};

#[derive(Serialize)]
struct FreeSignRow {
    index: usize,
    temporal: String,
    spatial: String,
    amplitude: f64,
    value: f64,
    l2_norm_sq: f64,
    relative: f64,
    pass: bool,
}

fn describe<T: Serialize>(x: &T) -> String {
    serde_json::to_string(x).expect("plain data serializes")
}

pub fn free_sign(cfg: &RunConfig) -> Result<Outcome, Failure> {
    cfg.accept(&["free_sign"], &["n", "mass", "n_k", "k_max"], &[])?;
    let n = cfg.count("n", 100)?;
    let mass = cfg.positive("mass", 1.0)?;
    let n_k = cfg.param("n_k").map(|_| cfg.count("n_k", 0)).transpose()?;
    let k_max = cfg.param("k_max").map(|_| cfg.positive("k_max", 1.0)).transpose()?;
    let tol = cfg.tol("free_sign", 1e-9);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let functions: Vec<TestFunction> = (0..n).map(|_| TestFunction::random(&mut rng)).collect();
    let values: Vec<Result<(f64, f64), FieldError>> = functions
        .par_iter()
        .map(|f| {
            let mut grid = FieldConfig::for_function(mass, f);
            if let Some(v) = n_k {
                grid.n_k = v;
            }
            if let Some(v) = k_max {
                grid.k_max = v;
            }
            let value = re_idf_free(f, &grid)?;
            let norm = f.l2_norm_sq().unwrap_or(f64::NAN);
            Ok((value, norm))
        })
        .collect();

    let mut out = Outcome::new();
    for (index, (f, res)) in functions.iter().zip(values).enumerate() {
        let (value, norm) = match res {
            Ok(v) => v,
            Err(FieldError::InvalidParameter(m)) => return Err(Failure::Usage(m)),
            Err(e) => return Ok(out.accuracy_failure(format!("function {index}: {e}"))),
        };
        let pass = value >= -tol * norm;
        out.push(&FreeSignRow {
            index,
            temporal: describe(&f.temporal),
            spatial: describe(&f.spatial),
            amplitude: f.amplitude,
            value,
            l2_norm_sq: norm,
            relative: value / norm,
            pass,
        });
        if !pass {
            out.claim_failed(format!("function {index}: Re iDelta_F = {value} is negative"));
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct WitnessRow {
    profile: String,
    #[serde(flatten)]
    report: propsign::fields::WitnessReport,
    tolerance: f64,
}

pub fn im_indeterminate(cfg: &RunConfig) -> Result<Outcome, Failure> {
    cfg.accept(&["witness"], &["beta", "mass", "width", "n_k"], &["gaussian", "plane-wave"])?;
    let beta = cfg.param("beta").unwrap_or(0.5);
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Failure::Usage(format!("beta must lie in (0, 1), got {beta}")));
    }
    let mass = cfg.positive("mass", 1.0)?;
    let width = cfg.positive("width", 1.0)?;
    let tol = cfg.tol("witness", WITNESS_TOL);
    let g = match cfg.fixture_or("gaussian") {
        "plane-wave" => Spatial::PlaneWavePacket { k0: [1.0, 0.0, 0.0], width },
        _ => Spatial::Gaussian3d { width },
    };
    let mut grid = FieldConfig::for_function(mass, &TestFunction::new(Temporal::Exponential { omega_bar: 1.0 }, g));
    if cfg.param("n_k").is_some() {
        grid.n_k = cfg.count("n_k", 0)?;
    }

    let mut out = Outcome::new();
    let report = match indeterminacy_witness(mass, beta, &g, &grid, tol) {
        Ok(r) => r,
        Err(FieldError::InvalidParameter(m)) => return Err(Failure::Usage(m)),
        Err(e) => return Ok(out.accuracy_failure(e.to_string())),
    };
    let pass = report.pass;
    let (plus, minus, gap) = (report.quadrature_plus, report.quadrature_minus, report.discrepancy);
    out.push(&WitnessRow { profile: describe(&g), report, tolerance: tol });
    if !pass {
        out.claim_failed(format!(
            "witness failed: value_plus = {plus}, value_minus = {minus}, route gap {gap}"
        ));
    }
    Ok(out)
}
