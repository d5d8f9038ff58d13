use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use propsign::channels::{
    analyze_channel, apply_channel, invert_channel, random_density, ChannelError, ChannelReport,
    KrausSet, Verdict,
};

use crate::config::RunConfig;
use crate::output::{Failure, Outcome};

const ROUND_TRIP_STATES: usize = 20;

#[derive(Serialize)]
struct KrausRow {
    #[serde(flatten)]
    report: ChannelReport,
    samples: usize,
    round_trip_error: Option<f64>,
}

pub fn load(path: &Path) -> Result<KrausSet, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

pub fn kraus(cfg: &RunConfig, path: &Path) -> Result<Outcome, Failure> {
    cfg.accept(&[], &["samples"], &[])?;
    let k = load(path)?;
    let d = k.dim();
    let samples = cfg.count("samples", 2 * d * d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Outcome::new();
    let map_err = |e: ChannelError| match e {
        ChannelError::Precondition(m) => Err(Failure::Usage(m)),
        other => Ok(other.to_string()),
    };
    let report = match analyze_channel(&k, samples, &mut rng) {
        Ok(r) => r,
        Err(e) => return map_err(e).map(|m| out.accuracy_failure(m)),
    };
    let round_trip_error = if report.verdict == Verdict::InvertibleUnitary {
        let inv = match invert_channel(&k, samples, &mut rng) {
            Ok(i) => i,
            Err(e) => return map_err(e).map(|m| out.accuracy_failure(m)),
        };
        let mut worst: f64 = 0.0;
        for _ in 0..ROUND_TRIP_STATES {
            let rho = random_density(d, &mut rng);
            let back = apply_channel(&k, &rho).and_then(|o| apply_channel(&inv, &o));
            match back {
                Ok(b) => worst = worst.max(b.max_distance(&rho)),
                Err(e) => return map_err(e).map(|m| out.accuracy_failure(m)),
            }
        }
        Some(worst)
    } else {
        None
    };
    let verdict = match report.verdict {
        Verdict::InvertibleUnitary => "invertible_unitary",
        Verdict::NotInvertible => "not_invertible",
    };
    out.verdict = Some(verdict.into());
    out.push(&KrausRow { report, samples, round_trip_error });
    Ok(out)
}
