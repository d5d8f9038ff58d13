//! Standard parameter sets shared by the tests and the command line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{two_pi_cubed, RwaModel, TwoTimeQuery};
use crate::fields::Spatial;

/// Constant couplings chosen so that every rate `κ_lj` at momentum `k`
/// equals the given value.
pub fn model_with_rates(mass: f64, k: f64, kappas: [f64; 4]) -> RwaModel {
    let w = (k * k + mass * mass).sqrt();
    RwaModel::constant(mass, kappas.map(|kap| kap / (two_pi_cubed() * 2.0 * w)))
}

/// Ten queries with rates in `[0, 0.05]` and times in `[0, 2]`, kept short
/// enough that twelve Fock levels hold the vacuum.
pub fn oracle_fixture() -> Vec<(TwoTimeQuery, RwaModel)> {
    let rows: [([u8; 4], f64, f64, f64, f64, [f64; 4]); 10] = [
        ([1, 1, 1, 2], 0.0, 0.0, 0.0, 0.0, [0.0; 4]),
        ([1, 1, 1, 2], 0.5, 1.0, 0.0, 0.7, [0.04, 0.0, 0.0, 0.0]),
        ([1, 1, 1, 2], 1.0, 0.3, 1.2, 1.5, [0.02, 0.05, 0.0, 0.0]),
        ([1, 2, 1, 1], 0.8, 1.5, 0.5, 0.8, [0.05, 0.02, 0.0, 0.0]),
        ([1, 2, 1, 1], 0.0, 0.0, 2.0, 2.0, [0.03, 0.03, 0.0, 0.0]),
        ([2, 1, 2, 2], 1.5, 1.1, 0.4, 0.9, [0.0, 0.0, 0.01, 0.04]),
        ([2, 2, 2, 1], 0.3, 0.6, 1.4, 0.8, [0.0, 0.0, 0.05, 0.02]),
        ([2, 2, 2, 1], 2.0, 1.9, 0.0, 0.2, [0.01, 0.02, 0.03, 0.04]),
        ([1, 1, 1, 1], 0.7, 0.5, 0.5, 0.5, [0.02, 0.02, 0.02, 0.02]),
        ([1, 2, 2, 1], 1.2, 1.0, 1.0, 1.0, [0.05, 0.0, 0.05, 0.0]),
    ];
    rows.iter()
        .map(|&(idx, k, t1, t2, tau, kappas)| {
            let q = TwoTimeQuery {
                i: idx[0],
                j: idx[1],
                l: idx[2],
                m: idx[3],
                k_norm: k,
                t_prime: t1,
                t_doubleprime: t2,
                tau,
            };
            (q, model_with_rates(1.0, k, kappas))
        })
        .collect()
}

/// Coupled model used on the `(ω̄, k)` lattice; species 2 is mildly pumped.
pub fn lattice_model() -> RwaModel {
    RwaModel::constant(1.0, [4e-4, 9e-4, 3e-4, 1e-4])
}

/// The 3×3 `(ω̄, k)` lattice for the transform cross-check.
pub fn laplace_lattice() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for wb in [0.5, 1.0, 2.0] {
        for k in [0.0, 1.0, 2.0] {
            out.push((wb, k));
        }
    }
    out
}

/// Ten (model, profile, ω̄) triples with Gaussian-in-k couplings small
/// enough that every transform converges.
pub fn functional_fixtures(seed: u64) -> Vec<(RwaModel, Spatial, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..10)
        .map(|n| {
            let model = RwaModel::random_gaussian(&mut rng, 1e-4);
            let width = rng.random_range(0.5..2.0);
            let g = if n % 2 == 0 {
                Spatial::Gaussian3d { width }
            } else {
                let k0 = [(); 3].map(|_| rng.random_range(-1.5..1.5));
                Spatial::PlaneWavePacket { k0, width }
            };
            let omega_bar = rng.random_range(0.5..3.0);
            (model, g, omega_bar)
        })
        .collect()
}
