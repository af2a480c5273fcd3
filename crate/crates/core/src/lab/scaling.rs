use rayon::prelude::*;
use serde_json::json;

use super::{rel_dev, sorted_schedule, ExperimentKind, ExperimentReport, Tolerances};
use crate::corpus::{scale_function, ScalingSpec, TestFunction};
use crate::error::{Error, Result};
use crate::exponent::SobolevIndex;
use crate::norms::{full_norm, lp_norm, seminorm, ConcreteDomain, NormReport};

fn check_index(u: &TestFunction, idx: &SobolevIndex) -> Result<(f64, f64)> {
    if idx.dim != u.dim {
        return Err(Error::DimensionMismatch(idx.dim, u.dim));
    }
    let (s, p) = (idx.s_f64(), idx.p_f64());
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Precondition(format!("scaling checks need 0 < s <= 1, got {s}")));
    }
    if p.is_infinite() && s == 1.0 {
        return Err(Error::Precondition("the sup-norm scaling identity needs s < 1".into()));
    }
    Ok((s, p))
}

/// Checks ||v||_{W^{s,p}(R^N)} for v(x) = eps^gamma u(eps^beta x) against
/// the value predicted from the norms of u.
pub fn verify_scaling_identity(
    u: &TestFunction,
    idx: &SobolevIndex,
    gamma: f64,
    beta: f64,
    epsilons: &[f64],
    tol: &Tolerances,
) -> Result<ExperimentReport> {
    let (s, p) = check_index(u, idx)?;
    if u.support().is_none() {
        return Err(Error::Precondition(format!("{} is not compactly supported", u.label)));
    }
    let eps = sorted_schedule(epsilons)?;
    let rn = ConcreteDomain::whole(u.dim);
    let n = u.dim as f64;
    let q = tol.quadrature;
    // Normalize -0 so names and inputs do not depend on the sign of zero.
    let gamma = gamma + 0.0;
    let base = lp_norm(u, &rn, p, q)?;
    let semi = seminorm(u, &rn, s, p, q)?;
    let predict = |e: f64| {
        if p.is_infinite() {
            e.powf(gamma) * base.value + e.powf(gamma + beta * s) * semi.value
        } else {
            e.powf(gamma - beta * n / p + beta * s)
                * (e.powf(-beta * s * p) * base.value.powf(p) + semi.value.powf(p)).powf(1.0 / p)
        }
    };
    let measured: Vec<NormReport> = eps
        .par_iter()
        .map(|&e| {
            let v = scale_function(u, &ScalingSpec::whole_space(gamma, beta, e))?;
            full_norm(&v, &rn, idx, q)
        })
        .collect::<Result<_>>()?;
    let mut rep = ExperimentReport::new(
        ExperimentKind::ScalingIdentity,
        format!("{}-s{s}-p{p}-g{gamma:.4}-b{beta}", u.label),
        json!({"function": u.label, "dim": u.dim, "s": s, "p": p, "gamma": gamma, "beta": beta}),
        "epsilon",
    );
    rep.predicted = eps.iter().map(|&e| predict(e)).collect();
    rep.measured = measured.iter().map(|m| m.value).collect();
    rep.schedule = eps;
    rep.deviation = rep.measured.iter().zip(&rep.predicted).map(|(m, w)| rel_dev(*m, *w)).fold(0.0, f64::max);
    // Error budget: the measured norm plus the two base norms feeding the
    // prediction, each relative.
    let base_rel = (base.error / base.value.max(f64::MIN_POSITIVE)) + (semi.error / semi.value.max(f64::MIN_POSITIVE));
    let budget = measured
        .iter()
        .map(|m| m.error / m.value.max(f64::MIN_POSITIVE) + base_rel)
        .fold(0.0, f64::max);
    rep.threshold = tol.scaling;
    rep.pass = rep.deviation <= rep.threshold;
    rep.notes.push(format!("combined relative error estimate {budget:.3e}"));
    if p.is_infinite() {
        rep.notes.push("sup quantities are grid lower bounds".into());
    }
    Ok(rep)
}

/// Checks the two-sided bound for v(x) = eps^gamma u(x0 + (x - x0)/eps) on a
/// bounded domain, where u is supported in B_R(x0) inside the domain.
pub fn verify_bounded_scaling_bounds(
    u: &TestFunction,
    idx: &SobolevIndex,
    gamma: f64,
    epsilons: &[f64],
    dom: &ConcreteDomain,
    tol: &Tolerances,
) -> Result<ExperimentReport> {
    let (s, p) = check_index(u, idx)?;
    if !dom.is_bounded() {
        return Err(Error::Precondition("the bounded scaling check needs a bounded domain".into()));
    }
    let (x0, r) = u
        .support()
        .ok_or_else(|| Error::Precondition(format!("{} is not compactly supported", u.label)))?;
    if !dom.contains_ball(&x0, r) {
        return Err(Error::Precondition(format!("support of {} is not inside the domain", u.label)));
    }
    let eps = sorted_schedule(epsilons)?;
    let n = u.dim as f64;
    let q = tol.quadrature;
    let gamma = gamma + 0.0;
    let ball = ConcreteDomain::ball(u.dim, x0, r)?;
    let base = lp_norm(u, dom, p, q)?.value;
    let semi_ball = seminorm(u, &ball, s, p, q)?.value;
    let semi_rn = seminorm(u, &ConcreteDomain::whole(u.dim), s, p, q)?.value;
    let bound = |e: f64, semi: f64| {
        if p.is_infinite() {
            e.powf(gamma) * base + e.powf(gamma - s) * semi
        } else {
            e.powf(gamma + n / p - s) * (e.powf(s * p) * base.powf(p) + semi.powf(p)).powf(1.0 / p)
        }
    };
    let measured: Vec<f64> = eps
        .par_iter()
        .map(|&e| {
            let v = scale_function(u, &ScalingSpec::bounded_translate(gamma, e, x0))?;
            Ok(full_norm(&v, dom, idx, q)?.value)
        })
        .collect::<Result<_>>()?;
    let mut rep = ExperimentReport::new(
        ExperimentKind::BoundedScaling,
        format!("{}-s{s}-p{p}-g{gamma:.4}", u.label),
        json!({"function": u.label, "dim": u.dim, "s": s, "p": p, "gamma": gamma, "domain": dom}),
        "epsilon",
    );
    let lower: Vec<f64> = eps.iter().map(|&e| bound(e, semi_ball)).collect();
    rep.predicted = eps.iter().map(|&e| bound(e, semi_rn)).collect();
    rep.deviation = measured
        .iter()
        .zip(lower.iter().zip(&rep.predicted))
        .map(|(m, (lo, hi))| ((lo - m) / lo).max((m - hi) / hi).max(0.0))
        .fold(0.0, f64::max);
    rep.measured = measured;
    rep.schedule = eps;
    rep.threshold = tol.scaling;
    rep.pass = rep.deviation <= rep.threshold;
    rep.notes.push(format!(
        "lower bounds {}",
        lower.iter().map(|v| format!("{v:.6e}")).collect::<Vec<_>>().join(" ")
    ));
    rep.notes.push("predicted holds the upper bounds; deviation measures violation of either side".into());
    Ok(rep)
}
