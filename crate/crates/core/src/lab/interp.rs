use rayon::prelude::*;
use serde_json::json;

use super::counterexample::pair;
use super::{rel_dev, ExperimentKind, ExperimentReport, Tolerances};
use crate::corpus::TestFunction;
use crate::error::{Error, Result};
use crate::exponent::{from_f64, interpolation_exponents, SobolevIndex};
use crate::norms::{full_norm, gagliardo_seminorm, grad_lp_norm, lp_norm, ConcreteDomain};

/// rho(theta) = ||u||_theta / (||u||_1^theta ||u||_2^{1-theta}) along the
/// interpolation curve between `first` (theta = 1) and `second` (theta = 0).
pub fn verify_interpolation(
    u: &TestFunction,
    dom: &ConcreteDomain,
    first: &SobolevIndex,
    second: &SobolevIndex,
    thetas: &[f64],
    tol: &Tolerances,
) -> Result<ExperimentReport> {
    if first.dim != u.dim || second.dim != u.dim {
        return Err(Error::DimensionMismatch(first.dim, u.dim));
    }
    if thetas.is_empty() {
        return Err(Error::Precondition("empty theta grid".into()));
    }
    let mut grid = thetas.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let q = tol.quadrature;
    let n1 = full_norm(u, dom, first, q)?.value;
    let n2 = full_norm(u, dom, second, q)?.value;
    let rho: Vec<f64> = grid
        .par_iter()
        .map(|&t| {
            let (s, p) = interpolation_exponents(&first.s, &first.p, &second.s, &second.p, &from_f64(t)?)?;
            let idx = SobolevIndex::new(u.dim, s, p)?;
            Ok(full_norm(u, dom, &idx, q)?.value / (n1.powf(t) * n2.powf(1.0 - t)))
        })
        .collect::<Result<_>>()?;
    let mut rep = ExperimentReport::new(
        ExperimentKind::Interpolation,
        format!("{}-{}-{}", u.label, pair(first), pair(second)),
        json!({"function": u.label, "dim": u.dim, "first": pair(first), "second": pair(second), "domain": dom}),
        "theta",
    );
    rep.deviation = grid
        .iter()
        .zip(&rho)
        .filter(|(t, _)| **t == 0.0 || **t == 1.0)
        .map(|(_, r)| (r - 1.0).abs())
        .fold(0.0, f64::max);
    let max_rho = rho.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b));
    rep.constant = Some(max_rho);
    rep.threshold = tol.endpoint;
    rep.pass = rep.deviation <= rep.threshold && max_rho.is_finite();
    rep.notes.push(format!("max rho {max_rho:.9e}; the constant is only known to exist"));
    rep.schedule = grid;
    rep.measured = rho;
    Ok(rep)
}

/// [u]_{W^{s,p}} over a schedule of s, compared at the ends with ||u||_p
/// (s -> 0) and ||grad u||_p (s -> 1).
pub fn bbm_limit_sweep(
    u: &TestFunction,
    dom: &ConcreteDomain,
    p: f64,
    s_schedule: &[f64],
    tol: &Tolerances,
) -> Result<ExperimentReport> {
    if s_schedule.len() < 2 {
        return Err(Error::Precondition("the s schedule needs both ends".into()));
    }
    let mut grid = s_schedule.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let q = tol.quadrature;
    let reports: Vec<_> = grid
        .par_iter()
        .map(|&s| gagliardo_seminorm(u, dom, s, p, q))
        .collect::<Result<_>>()?;
    let lp = lp_norm(u, dom, p, q)?.value;
    let grad = grad_lp_norm(u, dom, p, q)?.value;
    let lo = reports.first().expect("nonempty");
    let hi = reports.last().expect("nonempty");
    let dev_lo = rel_dev(lo.value, lp);
    let dev_hi = rel_dev(hi.value, grad);

    // Refinement contract: halving the tolerance moves each endpoint by no
    // more than its previous error estimate.
    let mut refine_ok = true;
    for (s, before) in [(grid[0], lo), (*grid.last().expect("nonempty"), hi)] {
        let after = gagliardo_seminorm(u, dom, s, p, 0.5 * q)?;
        if (after.value - before.value).abs() > before.error {
            refine_ok = false;
        }
    }
    let mut rep = ExperimentReport::new(
        ExperimentKind::BbmLimit,
        format!("{}-p{p}", u.label),
        json!({"function": u.label, "dim": u.dim, "p": p, "domain": dom}),
        "s",
    );
    rep.schedule = grid;
    rep.measured = reports.iter().map(|r| r.value).collect();
    rep.predicted = vec![lp, grad];
    rep.deviation = dev_lo.max(dev_hi);
    rep.threshold = tol.bbm;
    rep.pass = rep.deviation <= rep.threshold && refine_ok;
    rep.notes.push(format!("s = {} vs ||u||_p: {dev_lo:.3e}", rep.schedule[0]));
    rep.notes.push(format!("s = {} vs ||grad u||_p: {dev_hi:.3e}", rep.schedule.last().expect("nonempty")));
    rep.notes.push(format!("refinement consistent: {refine_ok}"));
    rep.notes.push("predicted holds [||u||_p, ||grad u||_p]".into());
    Ok(rep)
}
