use rand::Rng;
use serde::Serialize;

use super::random::random_pure_state;
use super::{
    apply_channel, c, max_abs, purity, CMatrix, CVector, ChannelError, DensityMatrix,
    KrausSet,
};

/// A vector `V ψ` counts as zero below this fraction of `‖V‖`.
pub const NONZERO_THRESHOLD: f64 = 1e-8;
/// Largest accepted `max |U†U - 1|`.
pub const UNITARY_TOL: f64 = 1e-9;
/// Largest spread of `‖V_{j*} ψ‖²` across samples.
const NORMALIZATION_SPREAD: f64 = 1e-8;
const PURE_TOL: f64 = 1e-10;

fn operator_norm(m: &CMatrix) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

fn check_samples(k: &KrausSet, samples: usize) -> Result<(), ChannelError> {
    let need = 2 * k.dim() * k.dim();
    if samples < need {
        return Err(ChannelError::Precondition(format!(
            "{samples} samples is below 2 dim^2 = {need}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Proportionality {
    pub proportional: bool,
    pub j_star: Option<usize>,
}

/// Checks on random pure states that every `V_i ψ` is parallel to
/// `V_{j*} ψ` for one operator `j*` that annihilates none of them.
pub fn proportionality_test<R: Rng + ?Sized>(
    k: &KrausSet,
    samples: usize,
    rng: &mut R,
) -> Result<Proportionality, ChannelError> {
    check_samples(k, samples)?;
    let norms: Vec<f64> = k.ops().iter().map(operator_norm).collect();
    let states: Vec<CVector> = (0..samples).map(|_| random_pure_state(k.dim(), rng)).collect();
    let images: Vec<Vec<CVector>> = states
        .iter()
        .map(|psi| k.ops().iter().map(|v| v * psi).collect())
        .collect();

    let nonzero = |j: usize, img: &[CVector]| norms[j] > 0.0 && img[j].norm() > NONZERO_THRESHOLD * norms[j];
    let j_star = (0..k.ops().len()).find(|&j| images.iter().all(|img| nonzero(j, img)));
    let Some(js) = j_star else {
        return Ok(Proportionality {
            proportional: false,
            j_star: None,
        });
    };
    for img in &images {
        let u = &img[js];
        let uu = u.dotc(u);
        for (i, v) in img.iter().enumerate() {
            if i == js {
                continue;
            }
            let vn = v.norm();
            if vn <= NONZERO_THRESHOLD * norms[i] {
                continue;
            }
            let resid = v - u * (u.dotc(v) / uu);
            if resid.norm() > NONZERO_THRESHOLD * vn {
                return Ok(Proportionality {
                    proportional: false,
                    j_star: Some(js),
                });
            }
        }
    }
    Ok(Proportionality {
        proportional: true,
        j_star: Some(js),
    })
}

/// `U = N^{-1/2} V_{j*}` with `N = ‖V_{j*} ψ‖²`, phase fixed so the first
/// nonzero entry of the first column is real and positive.
pub fn extract_unitary<R: Rng + ?Sized>(
    k: &KrausSet,
    samples: usize,
    rng: &mut R,
) -> Result<(CMatrix, f64), ChannelError> {
    let prop = proportionality_test(k, samples, rng)?;
    let js = match prop {
        Proportionality {
            proportional: true,
            j_star: Some(js),
        } => js,
        _ => {
            return Err(ChannelError::NotInvertible(
                "Kraus operators are not proportional on all sampled states".into(),
            ))
        }
    };
    let v = &k.ops()[js];
    let ns: Vec<f64> = (0..samples)
        .map(|_| (v * random_pure_state(k.dim(), rng)).norm_squared())
        .collect();
    let lo = ns.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ns.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo > NORMALIZATION_SPREAD {
        return Err(ChannelError::NotInvertible(format!(
            "|V_j* psi|^2 varies over [{lo}, {hi}]"
        )));
    }
    let n = ns.iter().sum::<f64>() / ns.len() as f64;
    if !(n > 0.0 && n <= 1.0 + NORMALIZATION_SPREAD) {
        return Err(ChannelError::Consistency(format!("normalization {n} outside (0, 1]")));
    }
    let n = n.min(1.0);
    let mut u = v / c(n.sqrt(), 0.0);
    if let Some(z) = u.column(0).iter().copied().find(|z| z.norm() > 1e-12) {
        u *= z.conj() / z.norm();
    }
    let d = k.dim();
    let dev = max_abs(&(u.adjoint() * &u - CMatrix::identity(d, d)));
    if dev > UNITARY_TOL {
        return Err(ChannelError::Consistency(format!(
            "extracted operator deviates from unitarity by {dev:e}"
        )));
    }
    Ok((u, n))
}

/// The single-operator inverse `{U†}`.
pub fn invert_channel<R: Rng + ?Sized>(
    k: &KrausSet,
    samples: usize,
    rng: &mut R,
) -> Result<KrausSet, ChannelError> {
    let (u, _) = extract_unitary(k, samples, rng)?;
    KrausSet::new(vec![u.adjoint()])
        .map_err(|e| ChannelError::Consistency(format!("inverse is not a channel: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    InvertibleUnitary,
    NotInvertible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelReport {
    pub dim: usize,
    pub kraus_count: usize,
    pub purity_preserving: bool,
    pub proportional: bool,
    pub j_star: Option<usize>,
    pub normalization: Option<f64>,
    pub unitary_deviation: Option<f64>,
    pub verdict: Verdict,
}

/// Runs the full criterion: purity preservation on pure states,
/// proportionality, and unitary extraction.
pub fn analyze_channel<R: Rng + ?Sized>(
    k: &KrausSet,
    samples: usize,
    rng: &mut R,
) -> Result<ChannelReport, ChannelError> {
    check_samples(k, samples)?;
    let mut purity_preserving = true;
    for _ in 0..samples {
        let rho = DensityMatrix::pure(&random_pure_state(k.dim(), rng))?;
        if purity(&apply_channel(k, &rho)?) < 1.0 - PURE_TOL {
            purity_preserving = false;
            break;
        }
    }
    let prop = proportionality_test(k, samples, rng)?;
    let (normalization, unitary_deviation) = if prop.proportional {
        match extract_unitary(k, samples, rng) {
            Ok((u, n)) => {
                let d = k.dim();
                (Some(n), Some(max_abs(&(u.adjoint() * &u - CMatrix::identity(d, d)))))
            }
            Err(ChannelError::NotInvertible(_)) => (None, None),
            Err(e) => return Err(e),
        }
    } else {
        (None, None)
    };
    let invertible = purity_preserving
        && prop.proportional
        && unitary_deviation.is_some_and(|d| d <= UNITARY_TOL);
    Ok(ChannelReport {
        dim: k.dim(),
        kraus_count: k.ops().len(),
        purity_preserving,
        proportional: prop.proportional,
        j_star: prop.j_star,
        normalization,
        unitary_deviation,
        verdict: if invertible {
            Verdict::InvertibleUnitary
        } else {
            Verdict::NotInvertible
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureProbe {
    pub input_purity: f64,
    pub image_purity: f64,
    pub image_pure: bool,
    /// `Λ(ρ1)` and `Λ(ρ2)` both equal the pure image.
    pub images_coincide: bool,
    /// Two distinct inputs share an image.
    pub not_one_to_one: bool,
}

/// Checks whether a mixture of two distinct states is sent to a pure state,
/// and if so whether both components are sent to that same state.
pub fn mixture_to_pure_probe(
    k: &KrausSet,
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    p: f64,
) -> Result<MixtureProbe, ChannelError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(ChannelError::Precondition(format!("p = {p} outside (0, 1)")));
    }
    if rho1.max_distance(rho2) <= 1e-8 {
        return Err(ChannelError::Precondition("the two states coincide".into()));
    }
    let mix = rho1.mix(rho2, p)?;
    let image = apply_channel(k, &mix)?;
    let image_purity = purity(&image);
    let image_pure = image_purity > 1.0 - PURE_TOL;
    let a = apply_channel(k, rho1)?;
    let b = apply_channel(k, rho2)?;
    let images_coincide =
        image_pure && a.max_distance(&image) <= 1e-9 && b.max_distance(&image) <= 1e-9;
    Ok(MixtureProbe {
        input_purity: purity(&mix),
        image_purity,
        image_pure,
        images_coincide,
        not_one_to_one: a.max_distance(&b) <= 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{paulis, random_unitary, split_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn phase_multiples_are_proportional() {
        let mut r = rng();
        let u = random_unitary(3, &mut r);
        let k = KrausSet::new(vec![
            &u * c(0.5f64.sqrt(), 0.0),
            &u * (c(0.0, std::f64::consts::FRAC_PI_3).exp() * 0.5f64.sqrt()),
        ])
        .unwrap();
        let p = proportionality_test(&k, 18, &mut r).unwrap();
        assert_eq!(p, Proportionality { proportional: true, j_star: Some(0) });
        let p = proportionality_test(&KrausSet::unitary(u).unwrap(), 18, &mut r).unwrap();
        assert_eq!(p, Proportionality { proportional: true, j_star: Some(0) });
    }

    #[test]
    fn dephasing_is_not_proportional() {
        let mut r = rng();
        let k = KrausSet::dephasing_qubit(0.3).unwrap();
        assert!(!proportionality_test(&k, 8, &mut r).unwrap().proportional);
        // the |+> witness directly
        let plus = CVector::from_vec(vec![c(0.5f64.sqrt(), 0.0), c(0.5f64.sqrt(), 0.0)]);
        let zp = &paulis()[3] * &plus;
        assert!(zp.dotc(&plus).norm() < 1e-15);
        assert!(proportionality_test(&k, 7, &mut r).is_err());
    }

    #[test]
    fn extract_known_unitary() {
        let mut r = rng();
        let u0 = random_unitary(2, &mut r);
        let k = KrausSet::new(vec![&u0 * c(0.5f64.sqrt(), 0.0), &u0 * c(0.0, 0.5f64.sqrt())]).unwrap();
        let (u, n) = extract_unitary(&k, 8, &mut r).unwrap();
        assert!((n - 0.5).abs() < 1e-12);
        let phase = u0.adjoint() * &u;
        let z = phase[(0, 0)];
        assert!((z.norm() - 1.0).abs() < 1e-12);
        assert!(max_abs(&(phase - CMatrix::identity(2, 2) * z)) < 1e-12);
        assert!(u[(0, 0)].im.abs() < 1e-15 && u[(0, 0)].re > 0.0);
        let (u, n) = extract_unitary(&KrausSet::identity(2), 8, &mut r).unwrap();
        assert_eq!(n, 1.0);
        assert!(max_abs(&(u - CMatrix::identity(2, 2))) < 1e-15);
        assert!(matches!(
            extract_unitary(&KrausSet::depolarizing_qubit(), 8, &mut r),
            Err(ChannelError::NotInvertible(_))
        ));
    }

    #[test]
    fn inversion_round_trip_and_refusals() {
        let mut r = rng();
        let u = random_unitary(4, &mut r);
        let k = split_unitary(&u, 3, &mut r).unwrap();
        let inv = invert_channel(&k, 32, &mut r).unwrap();
        for _ in 0..20 {
            let rho = crate::channels::random_density(4, &mut r);
            let back = apply_channel(&inv, &apply_channel(&k, &rho).unwrap()).unwrap();
            assert!(back.max_distance(&rho) < 1e-10);
        }
        assert!(invert_channel(&KrausSet::depolarizing_qubit(), 8, &mut r).is_err());
        assert!(invert_channel(&KrausSet::amplitude_damping(0.5).unwrap(), 8, &mut r).is_err());
    }

    #[test]
    fn reports() {
        let mut r = rng();
        let u = random_unitary(2, &mut r);
        let rep = analyze_channel(&KrausSet::unitary(u).unwrap(), 8, &mut r).unwrap();
        assert_eq!(rep.verdict, Verdict::InvertibleUnitary);
        let rep = analyze_channel(&KrausSet::depolarizing_qubit(), 8, &mut r).unwrap();
        assert_eq!(rep.verdict, Verdict::NotInvertible);
        assert!(!rep.purity_preserving);
    }

    #[test]
    fn mixture_probe() {
        let mut r = rng();
        let zero = DensityMatrix::pure(&CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])).unwrap();
        let one = DensityMatrix::pure(&CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)])).unwrap();
        let unitary = KrausSet::unitary(random_unitary(2, &mut r)).unwrap();
        let probe = mixture_to_pure_probe(&unitary, &zero, &one, 0.5).unwrap();
        assert!(!probe.image_pure && probe.image_purity < 1.0);
        let probe = mixture_to_pure_probe(&KrausSet::reset_qubit(), &zero, &one, 0.5).unwrap();
        assert!(probe.image_pure && probe.images_coincide && probe.not_one_to_one);
        assert!(mixture_to_pure_probe(&unitary, &zero, &one, 0.0).is_err());
        assert!(mixture_to_pure_probe(&unitary, &zero, &zero, 0.5).is_err());
    }
}
