use rayon::prelude::*;
use serde::Serialize;

use propsign::numkit::{
    gr_3876_1_check, gr_6677_6_check, identity_lattice, IdentityCheck, NumError, QuadratureRule,
    GR_3876_1_TOL, GR_6677_6_TOL,
};

use crate::config::RunConfig;
use crate::output::{Failure, Outcome};

#[derive(Serialize)]
struct IdentityRow {
    identity: &'static str,
    m: f64,
    dt: f64,
    x: f64,
    lhs: f64,
    rhs: f64,
    error: f64,
    tolerance: f64,
    pass: bool,
}

pub fn bessel_identities(cfg: &RunConfig) -> Result<Outcome, Failure> {
    cfg.accept(&["gr_3876_1", "gr_6677_6"], &[], &[])?;
    let tol_a = cfg.tol("gr_3876_1", GR_3876_1_TOL);
    let tol_b = cfg.tol("gr_6677_6", GR_6677_6_TOL);
    let rule = QuadratureRule::gauss_legendre(20);
    let lattice = identity_lattice();
    let checks: Vec<Result<(IdentityCheck, IdentityCheck), NumError>> = lattice
        .par_iter()
        .map(|p| Ok((gr_3876_1_check(p.m, p.dt, p.x, &rule)?, gr_6677_6_check(p.m, p.dt, p.x, &rule)?)))
        .collect();
    let mut out = Outcome::new();
    for (p, res) in lattice.iter().zip(checks) {
        let (a, b) = match res {
            Ok(v) => v,
            Err(e) => return Ok(out.accuracy_failure(format!("m={} dt={} x={}: {e}", p.m, p.dt, p.x))),
        };
        for (identity, c, tol) in [("gr_3876_1", a, tol_a), ("gr_6677_6", b, tol_b)] {
            let pass = c.passes(tol);
            if !pass {
                out.claim_failed(format!("{identity} at m={} dt={} x={}: |lhs - rhs| = {}", p.m, p.dt, p.x, c.abs_diff()));
            }
            out.push(&IdentityRow {
                identity,
                m: p.m,
                dt: p.dt,
                x: p.x,
                lhs: c.lhs,
                rhs: c.rhs,
                error: c.abs_diff(),
                tolerance: tol,
                pass,
            });
        }
    }
    Ok(out)
}
