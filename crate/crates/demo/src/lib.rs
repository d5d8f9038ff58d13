//! wasm-bindgen exports for the static page in `www/`. Curves come back as
//! flat `Float64Array`s of `[x, y1, y2]` triples; failed points are NaN.

use propsign::covmap::{default_witness_fixture, nononto_witness, CovError};
use propsign::fields::{
    im_idf_closed_form, indeterminacy_witness, FieldConfig, Spatial, Temporal, TestFunction,
    WITNESS_TOL,
};
use propsign::numkit::{gr_3876_1_check, QuadratureRule};
use wasm_bindgen::prelude::*;

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn field_grid(mass: f64, g: Spatial) -> FieldConfig {
    FieldConfig::for_function(mass, &TestFunction::new(Temporal::Exponential { omega_bar: 1.0 }, g))
}

/// `Im iΔ_F` of the two delta/principal-value functions against β, by the
/// closed radial form. Triples `[β, value_plus, value_minus]`.
#[wasm_bindgen]
pub fn im_sign_curve(mass: f64, width: f64, n: usize) -> Vec<f64> {
    let g = Spatial::Gaussian3d { width };
    let cfg = field_grid(mass, g);
    let mut out = Vec::with_capacity(3 * n);
    for beta in grid(0.02, 0.98, n) {
        let (p, m) = match im_idf_closed_form(beta, mass, &g, &cfg) {
            Ok(c) => (c.value_plus, c.value_minus),
            Err(_) => (f64::NAN, f64::NAN),
        };
        out.extend([beta, p, m]);
    }
    out
}

/// Both routes at a single β, as JSON.
#[wasm_bindgen]
pub fn im_witness(beta: f64, mass: f64, width: f64) -> Result<String, JsError> {
    let g = Spatial::Gaussian3d { width };
    let r = indeterminacy_witness(mass, beta, &g, &field_grid(mass, g), WITNESS_TOL)?;
    Ok(serde_json::to_string(&r)?)
}

/// Non-onto witness of the covariant map against τ on the three-point
/// fixture with momenta scaled by `lambda`. Triples `[τ, w_plus, w_minus]`.
#[wasm_bindgen]
pub fn covmap_witness_curve(lambda: f64, tau_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let (basis, psi, phi, _) = default_witness_fixture();
    let basis = basis.scaled(lambda)?;
    let mut out = Vec::with_capacity(3 * n);
    for tau in grid(tau_max / n.max(2) as f64, tau_max, n) {
        let (p, m) = match nononto_witness(&basis, &psi, &phi, tau) {
            Ok(w) => (w.w_plus, w.w_minus),
            Err(CovError::Inconclusive { w_plus, w_minus }) => (w_plus, w_minus),
            Err(_) => (f64::NAN, f64::NAN),
        };
        out.extend([tau, p, m]);
    }
    Ok(out)
}

/// The first Bessel identity against `r` at fixed `m`, `Δt`; the light
/// cone sits at `r = Δt`. Triples `[r, quadrature, closed form]`.
#[wasm_bindgen]
pub fn bessel_identity_curve(m: f64, dt: f64, r_max: f64, n: usize) -> Vec<f64> {
    let rule = QuadratureRule::gauss_legendre(20);
    let mut out = Vec::with_capacity(3 * n);
    for r in grid(0.0, r_max, n) {
        let (l, c) = match gr_3876_1_check(m, dt, r, &rule) {
            Ok(c) => (c.lhs, c.rhs),
            Err(_) => (f64::NAN, f64::NAN),
        };
        out.extend([r, l, c]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn im_curve_has_opposite_signs() {
        let c = im_sign_curve(1.0, 1.0, 5);
        assert_eq!(c.len(), 15);
        for t in c.chunks(3) {
            assert!(t[1] < 0.0 && t[2] > 0.0, "{t:?}");
        }
    }

    #[test]
    fn covmap_curve_is_odd() {
        let c = covmap_witness_curve(1.0, 2.0, 4).unwrap();
        for t in c.chunks(3) {
            assert!((t[1] + t[2]).abs() < 1e-8 && t[1].min(t[2]) < 0.0);
        }
    }

    #[test]
    fn bessel_curve_routes_agree() {
        let c = bessel_identity_curve(1.0, 2.0, 4.0, 9);
        for t in c.chunks(3) {
            assert!((t[1] - t[2]).abs() <= 1e-5, "{t:?}");
        }
    }

    #[test]
    fn witness_json_has_both_routes() {
        let s = im_witness(0.5, 1.0, 1.0).unwrap();
        assert!(s.contains("quadrature_plus") && s.contains("closed_plus"));
    }
}
