//! Numerical norms: L^p, gradient L^p, Gagliardo seminorm with its
//! normalizing constant, Hölder seminorm, full W^{s,p} norm and BMO.
//!
//! Tolerances are relative to the returned value.

mod bmo;
mod domain;
mod gagliardo;
mod holder;
pub mod quadrature;
pub mod special;

pub use bmo::{bmo_norm, bmo_prefactor, BallFamily};
pub use domain::ConcreteDomain;
pub use gagliardo::{gagliardo_integral, gagliardo_seminorm};
pub use holder::holder_seminorm;
pub use special::{gamma, normalizing_constant};

use serde::Serialize;

use crate::corpus::{Point, TestFunction};
use crate::error::{Error, Result};
use crate::exponent::SobolevIndex;
use crate::report::{ser_f64, ser_f64_opt};
use domain::check_dims;
use quadrature::{integrate_1d, integrate_2d, QuadOptions, QuadResult, Rect};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormReport {
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    /// Absolute error estimate of `value`.
    #[serde(serialize_with = "ser_f64")]
    pub error: f64,
    pub cells: usize,
    #[serde(serialize_with = "ser_f64")]
    pub tolerance: f64,
    /// Normalizing constant used, when one applies.
    #[serde(serialize_with = "ser_f64_opt")]
    pub constant: Option<f64>,
    pub converged: bool,
    /// Set for sup-based quantities, which are grid lower bounds.
    pub lower_bound: bool,
}

impl NormReport {
    /// Report for `I^{1/p}` given a quadrature result for `I`, scaled by `c`.
    pub(crate) fn from_power(q: QuadResult, c: f64, p: f64, tol: f64, constant: Option<f64>) -> Self {
        let i = (c * q.value).max(0.0);
        let value = i.powf(1.0 / p);
        let error = if i > 0.0 { value * c * q.error / (p * i) } else { (c * q.error).powf(1.0 / p) };
        NormReport { value, error, cells: q.cells, tolerance: tol, constant, converged: q.converged, lower_bound: false }
    }
}

#[inline]
pub(crate) fn pow_abs(v: f64, p: f64) -> f64 {
    if p == 2.0 {
        v * v
    } else if p == 1.0 {
        v.abs()
    } else {
        v.abs().powf(p)
    }
}

/// Where a single integral over `dom` of something supported with `u` lives.
pub(crate) enum Region {
    Interval(f64, f64),
    Rect(Rect),
    Disc(Point, f64),
}

pub(crate) fn single_region(u: &TestFunction, dom: &ConcreteDomain) -> Result<Region> {
    let support = u.effective_support();
    if u.dim == 1 {
        let (mut a, mut b) = dom.bounds_1d().unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
        if let Some((c, r)) = support {
            a = a.max(c[0] - r);
            b = b.min(c[0] + r);
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Precondition(format!(
                "{} has unbounded support; whole-space integrals need compact support",
                u.label
            )));
        }
        return Ok(Region::Interval(a, b.max(a)));
    }
    if let Some((c, r)) = support {
        if dom.contains_ball(&c, r) {
            return Ok(Region::Disc(c, r));
        }
    }
    match dom {
        ConcreteDomain::Whole { .. } => Err(Error::Precondition(format!(
            "{} has unbounded support; whole-space integrals need compact support",
            u.label
        ))),
        ConcreteDomain::Box { lo, hi, .. } => {
            let mut rect = Rect::new(lo[0], hi[0], lo[1], hi[1]);
            if let Some((c, r)) = support {
                rect = Rect::new(rect.x0.max(c[0] - r), rect.x1.min(c[0] + r), rect.y0.max(c[1] - r), rect.y1.min(c[1] + r));
                rect.x1 = rect.x1.max(rect.x0);
                rect.y1 = rect.y1.max(rect.y0);
            }
            Ok(Region::Rect(rect))
        }
        ConcreteDomain::Ball { center, radius, .. } => Ok(Region::Disc(*center, *radius)),
    }
}

pub(crate) fn integrate_region(
    region: &Region,
    breaks: &[f64],
    f: &(dyn Fn(&Point) -> f64 + Sync),
    opts: &QuadOptions,
) -> QuadResult {
    match *region {
        Region::Interval(a, b) => integrate_1d(&|x| f(&[x, 0.0]), a, b, breaks, opts),
        Region::Rect(r) => integrate_2d(&|x| f(&x), &[r], opts),
        Region::Disc(c, r) => {
            let polar = |q: [f64; 2]| {
                let (sn, cs) = q[1].sin_cos();
                q[0] * f(&[c[0] + q[0] * cs, c[1] + q[0] * sn])
            };
            integrate_2d(&polar, &[Rect::new(0.0, r, 0.0, std::f64::consts::TAU)], opts)
        }
    }
}

/// Integral of |u|^p over the domain (finite p).
pub(crate) fn lp_power(u: &TestFunction, dom: &ConcreteDomain, p: f64, rel_tol: f64) -> Result<QuadResult> {
    check_dims(u, dom)?;
    let region = single_region(u, dom)?;
    let opts = QuadOptions::new(rel_tol).cells(20_000);
    Ok(integrate_region(&region, &u.breakpoints(), &|x| pow_abs(u.eval(x), p), &opts))
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("integrability must be at least 1, got {p}")))
    }
}

/// ||u||_{L^p}; p = inf gives a grid-based sup (a lower bound).
pub fn lp_norm(u: &TestFunction, dom: &ConcreteDomain, p: f64, tol: f64) -> Result<NormReport> {
    check_p(p)?;
    check_dims(u, dom)?;
    if p.is_infinite() {
        let (value, gain) = holder::grid_sup(u, dom, &|x| u.eval(x).abs())?;
        return Ok(sup_report(value, gain, tol));
    }
    let q = lp_power(u, dom, p, 0.5 * p * tol)?;
    Ok(NormReport::from_power(q, 1.0, p, tol, None))
}

/// ||grad u||_{L^p} with the Euclidean norm of the gradient.
pub fn grad_lp_norm(u: &TestFunction, dom: &ConcreteDomain, p: f64, tol: f64) -> Result<NormReport> {
    check_p(p)?;
    check_dims(u, dom)?;
    if !u.has_gradient() {
        return Err(Error::Precondition(format!("{} has no gradient", u.label)));
    }
    let grad = |x: &Point| {
        let g = u.gradient(x);
        (g[0] * g[0] + g[1] * g[1]).sqrt()
    };
    if p.is_infinite() {
        let (value, gain) = holder::grid_sup(u, dom, &grad)?;
        return Ok(sup_report(value, gain, tol));
    }
    let region = single_region(u, dom)?;
    let opts = QuadOptions::new(0.5 * p * tol).cells(20_000);
    let q = integrate_region(&region, &u.breakpoints(), &|x| pow_abs(grad(x), p), &opts);
    Ok(NormReport::from_power(q, 1.0, p, tol, None))
}

pub(crate) fn sup_report(value: f64, gain: f64, tol: f64) -> NormReport {
    NormReport { value, error: gain, cells: 0, tolerance: tol, constant: None, converged: true, lower_bound: true }
}

/// The W^{s,p} norm: L^p for s = 0, ([u]^p + ||u||_p^p)^{1/p} otherwise,
/// and ||u||_inf + [u]_{C^{0,s}} for p = inf.
pub fn full_norm(u: &TestFunction, dom: &ConcreteDomain, idx: &SobolevIndex, tol: f64) -> Result<NormReport> {
    if idx.dim != u.dim {
        return Err(Error::DimensionMismatch(idx.dim, u.dim));
    }
    let s = idx.s_f64();
    let p = idx.p_f64();
    if s == 0.0 {
        return lp_norm(u, dom, p, tol);
    }
    let base = lp_norm(u, dom, p, 0.5 * tol)?;
    let semi = seminorm(u, dom, s, p, 0.5 * tol)?;
    Ok(combine(&base, &semi, p, tol))
}

/// [u] for 0 < s <= 1: Gagliardo (s < 1, p < inf), gradient (s = 1) or
/// Hölder (p = inf).
pub fn seminorm(u: &TestFunction, dom: &ConcreteDomain, s: f64, p: f64, tol: f64) -> Result<NormReport> {
    if s == 1.0 {
        grad_lp_norm(u, dom, p, tol)
    } else if p.is_infinite() {
        holder_seminorm(u, dom, s)
    } else {
        gagliardo_seminorm(u, dom, s, p, tol)
    }
}

/// ([u]^p + ||u||^p)^{1/p}, or the plain sum when p = inf.
pub(crate) fn combine(base: &NormReport, semi: &NormReport, p: f64, tol: f64) -> NormReport {
    let (value, error) = if p.is_infinite() {
        (base.value + semi.value, base.error + semi.error)
    } else {
        let a = base.value.powf(p);
        let b = semi.value.powf(p);
        let value = (a + b).powf(1.0 / p);
        // d value / d x = (x / value)^{p-1} for each component x.
        let w = |x: f64| if value > 0.0 { (x / value).powf(p - 1.0) } else { 1.0 };
        (value, w(base.value) * base.error + w(semi.value) * semi.error)
    };
    NormReport {
        value,
        error,
        cells: base.cells + semi.cells,
        tolerance: tol,
        constant: semi.constant,
        converged: base.converged && semi.converged,
        lower_bound: base.lower_bound || semi.lower_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{make_bump, make_constant, make_gaussian, make_tent};

    #[test]
    fn lp_examples() {
        let unit = ConcreteDomain::interval(0.0, 1.0).unwrap();
        let c = make_constant(1, 1.0).unwrap();
        assert!((lp_norm(&c, &unit, 3.0, 1e-10).unwrap().value - 1.0).abs() < 1e-12);
        let t = make_tent(1.0).unwrap();
        let rn = ConcreteDomain::whole(1);
        assert!((lp_norm(&t, &rn, 2.0, 1e-10).unwrap().value - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        let sup = lp_norm(&t, &rn, f64::INFINITY, 1e-10).unwrap();
        assert!((sup.value - 1.0).abs() < 1e-12 && sup.lower_bound);
        assert!((grad_lp_norm(&t, &rn, 2.0, 1e-10).unwrap().value - 2f64.sqrt()).abs() < 1e-12);
        let g = make_gaussian(1, 1.0).unwrap();
        let want = (std::f64::consts::PI.sqrt() / 2.0).sqrt();
        assert!((grad_lp_norm(&g, &rn, 2.0, 1e-10).unwrap().value - want).abs() < 1e-10);
        assert_eq!(grad_lp_norm(&c, &unit, 2.0, 1e-10).unwrap().value, 0.0);
    }

    #[test]
    fn bump_2d_l1_against_trapezoid() {
        let u = make_bump(2, 1.0).unwrap();
        let q = lp_norm(&u, &ConcreteDomain::whole(2), 1.0, 1e-11).unwrap();
        // Trapezoid rule on a fine grid; the bump is flat at its boundary so
        // the rule converges fast.
        let n = 1600;
        let h = 2.0 / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            for j in 0..=n {
                acc += u.eval(&[-1.0 + i as f64 * h, -1.0 + j as f64 * h]);
            }
        }
        assert!((q.value - acc * h * h).abs() < 1e-8, "{} vs {}", q.value, acc * h * h);
    }

    #[test]
    fn full_norm_tent() {
        let t = make_tent(1.0).unwrap();
        let idx = SobolevIndex::parse(1, "1,2").unwrap();
        let v = full_norm(&t, &ConcreteDomain::whole(1), &idx, 1e-10).unwrap();
        assert!((v.value - (2.0f64 / 3.0 + 2.0).sqrt()).abs() < 1e-12);
        let idx0 = SobolevIndex::parse(1, "0,2").unwrap();
        let a = full_norm(&t, &ConcreteDomain::whole(1), &idx0, 1e-10).unwrap();
        let b = lp_norm(&t, &ConcreteDomain::whole(1), 2.0, 1e-10).unwrap();
        assert_eq!(a.value, b.value);
    }
}
