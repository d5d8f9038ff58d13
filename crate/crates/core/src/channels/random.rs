use nalgebra::SymmetricEigen;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{c, max_abs, CMatrix, CVector, ChannelError, DensityMatrix, KrausSet};

fn gaussian_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random unit vector: a normalized complex Gaussian.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(d, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let n = v.norm();
    v / c(n, 0.0)
}

/// Haar-random unitary from the QR factorization of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let qr = gaussian_matrix(d, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { c(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Full-rank random state `G G† / Tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let g = gaussian_matrix(d, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_trusted(m / c(tr, 0.0))
}

/// `{√p_i e^{iθ_i} U}` with random weights and phases.
pub fn split_unitary<R: Rng + ?Sized>(
    u: &CMatrix,
    pieces: usize,
    rng: &mut R,
) -> Result<KrausSet, ChannelError> {
    if pieces == 0 {
        return Err(ChannelError::Precondition("need at least one piece".into()));
    }
    let raw: Vec<f64> = (0..pieces).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let ops = raw
        .iter()
        .map(|w| {
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            u * (c(0.0, theta).exp() * (w / total).sqrt())
        })
        .collect();
    KrausSet::new(ops)
}

/// Two-operator channel `{A S^{-1/2}, B S^{-1/2}}` with `S = A†A + B†B`,
/// redrawn until the operators neither commute nor are proportional.
pub fn random_nonproportional_pair<R: Rng + ?Sized>(
    d: usize,
    rng: &mut R,
) -> Result<KrausSet, ChannelError> {
    if d < 2 {
        return Err(ChannelError::Precondition(
            "non-proportional pairs need dimension >= 2".into(),
        ));
    }
    loop {
        let a = gaussian_matrix(d, rng);
        let b = gaussian_matrix(d, rng);
        let s = a.adjoint() * &a + b.adjoint() * &b;
        let eig = SymmetricEigen::new(s);
        if eig.eigenvalues.iter().any(|&l| l < 1e-6) {
            continue;
        }
        let inv_sqrt = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| c(1.0 / l.sqrt(), 0.0)));
        let t = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint();
        let v0 = &a * &t;
        let v1 = &b * &t;
        let comm = max_abs(&(&v0 * &v1 - &v1 * &v0));
        // proportional ops have v1 = γ v0; measure distance from that span
        let gamma = v0.dotc(&v1) / v0.dotc(&v0);
        let resid = max_abs(&(&v1 - &v0 * gamma));
        if comm < 1e-3 || resid < 1e-3 {
            continue;
        }
        if let Ok(k) = KrausSet::new(vec![v0, v1]) {
            return Ok(k);
        }
    }
}
