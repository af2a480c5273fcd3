//! The Gagliardo double integral
//!   I = int int |u(x) - u(y)|^p / |x - y|^{N + sp} dx dy
//! written with h = y - x in polar form as
//!   I = int_{directions} int_0^inf rho^{-1-sp} D(rho w) d rho,
//!   D(h) = int |u(x + h) - u(x)|^p dx.
//! The radial weight is removed by rho = rho_max t^{1/a}, a = p(1 - s), which
//! turns the diagonal singularity into a bounded integrand on t in [0, 1].
//! For small rho the difference quotient is evaluated as the average of the
//! gradient along the segment, so there is no cancellation near the diagonal.
//! On the whole space, D(h) = 2 ||u||_p^p once |h| exceeds the support
//! diameter and that tail is summed in closed form.

use std::f64::consts::{PI, TAU};

use super::domain::check_dims;
use super::quadrature::{gl4, integrate_1d, integrate_2d, QuadOptions, QuadResult, Rect};
use super::{lp_power, pow_abs, ConcreteDomain, NormReport};
use crate::corpus::{Point, Profile, TestFunction};
use crate::error::{Error, Result};
use crate::norms::special::normalizing_constant;

/// rho below this fraction of the length scale uses the gradient form.
const GRADIENT_SWITCH: f64 = 1e-3;

/// Length below which the gradient form is used: a fraction of the smaller
/// of the support radius and the largest relevant separation.
fn gradient_switch(u: &TestFunction, rho_max: f64) -> f64 {
    let scale = u.effective_support().map_or(rho_max, |(_, r)| r.min(rho_max));
    GRADIENT_SWITCH * scale
}

/// [u]_{W^{s,p}} = (c_{N,s,p} I)^{1/p}.
pub fn gagliardo_seminorm(
    u: &TestFunction,
    dom: &ConcreteDomain,
    s: f64,
    p: f64,
    tol: f64,
) -> Result<NormReport> {
    let c = normalizing_constant(u.dim, s, p)?;
    let q = gagliardo_integral(u, dom, s, p, tol)?;
    Ok(NormReport::from_power(q, c, p, tol, Some(c)))
}

/// The raw double integral I, without the normalizing constant. `tol` is the
/// relative tolerance wanted on I^{1/p}.
pub fn gagliardo_integral(
    u: &TestFunction,
    dom: &ConcreteDomain,
    s: f64,
    p: f64,
    tol: f64,
) -> Result<QuadResult> {
    check_dims(u, dom)?;
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Precondition(format!("Gagliardo seminorm needs 0 < s < 1, got {s}")));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Precondition(format!("Gagliardo seminorm needs 1 <= p < inf, got {p}")));
    }
    let tol_i = p * tol;
    if u.dim == 1 {
        integral_1d(u, dom, s, p, tol_i)
    } else {
        integral_2d(u, dom, s, p, tol_i)
    }
}

/// Difference quotient (u(x + rho w) - u(x)) / rho along direction w.
fn quotient(u: &TestFunction, x: &Point, w: &Point, rho: f64, switch: f64) -> f64 {
    if rho < switch {
        let (nodes, weights) = gl4();
        let mut acc = 0.0;
        for (t, wt) in nodes.iter().zip(weights) {
            let r = 0.5 * rho * (1.0 + t);
            let g = u.gradient(&[x[0] + r * w[0], x[1] + r * w[1]]);
            acc += 0.5 * wt * (g[0] * w[0] + g[1] * w[1]);
        }
        acc
    } else {
        (u.eval(&[x[0] + rho * w[0], x[1] + rho * w[1]]) - u.eval(x)) / rho
    }
}

fn support_or_whole(u: &TestFunction) -> Result<(Point, f64)> {
    u.effective_support().ok_or_else(|| {
        Error::Precondition(format!(
            "{} has unbounded support; whole-space seminorms need compact support",
            u.label
        ))
    })
}

/// Closed-form far field: directions * 2 ||u||_p^p * rho_max^{-sp} / (sp).
fn tail(u: &TestFunction, dom: &ConcreteDomain, s: f64, p: f64, rho_max: f64, directions: f64, tol_i: f64) -> Result<QuadResult> {
    let lpp = lp_power(u, dom, p, 1e-2 * tol_i)?;
    let k = directions * 2.0 * rho_max.powf(-s * p) / (s * p);
    Ok(lpp.scale(k))
}

/// Breakpoints in t for separations `rho_breaks`, with geometric points
/// (ratio 2 in rho) between consecutive breaks. Beyond the support diameter
/// the integrand decays like rho^{-p}, and without them a long cell can be
/// accepted while both of its rules miss the mass near its left end.
fn t_breaks(mut rho_breaks: Vec<f64>, rho_max: f64, a: f64) -> Vec<f64> {
    rho_breaks.retain(|&r| r > 0.0 && r < rho_max);
    rho_breaks.sort_by(f64::total_cmp);
    rho_breaks.dedup();
    let mut out = Vec::new();
    for (i, &r) in rho_breaks.iter().enumerate() {
        let next = rho_breaks.get(i + 1).copied().unwrap_or(rho_max);
        let mut x = r;
        while x < next / 1.5 {
            out.push((x / rho_max).powf(a));
            x *= 2.0;
        }
    }
    out
}

fn integral_1d(u: &TestFunction, dom: &ConcreteDomain, s: f64, p: f64, tol_i: f64) -> Result<QuadResult> {
    let a = p * (1.0 - s);
    let support = u.effective_support().map(|(c, r)| (c[0] - r, c[0] + r));
    let (sa, sb) = support.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let (xa, xb, rho_max, whole) = match dom.bounds_1d() {
        Some((lo, hi)) => (lo, hi, hi - lo, false),
        None => {
            let (_, r) = support_or_whole(u)?;
            (f64::NEG_INFINITY, f64::INFINITY, 2.0 * r, true)
        }
    };
    let kinks = u.breakpoints();
    let switch = gradient_switch(u, rho_max);
    let inner_opts = QuadOptions::new(0.05 * tol_i).cells(4000);
    let w = [1.0, 0.0];
    let g = |rho: f64| -> f64 {
        let lo = xa.max(sa - rho);
        let hi = (xb - rho).min(sb);
        if !(hi > lo) {
            return 0.0;
        }
        let mut breaks = kinks.clone();
        breaks.extend(kinks.iter().map(|k| k - rho));
        let f = |x: f64| pow_abs(quotient(u, &[x, 0.0], &w, rho, switch), p);
        integrate_1d(&f, lo, hi, &breaks, &inner_opts).value
    };
    let mut rho_breaks: Vec<f64> = Vec::new();
    for (i, ki) in kinks.iter().enumerate() {
        for kj in &kinks[i + 1..] {
            rho_breaks.push((ki - kj).abs());
        }
        if !whole {
            rho_breaks.push(xb - ki);
            rho_breaks.push(ki - xa);
        }
    }
    if let Some((_, r)) = u.effective_support() {
        rho_breaks.push(2.0 * r);
    }
    let t_breaks = t_breaks(rho_breaks, rho_max, a);
    let outer = QuadOptions::new(0.5 * tol_i).cells(4000).parallel(true);
    let near = integrate_1d(&|t: f64| g(rho_max * t.powf(1.0 / a)), 0.0, 1.0, &t_breaks, &outer);
    let scale = 2.0 * rho_max.powf(a) / a;
    let mut out = near.scale(scale);
    out.error += inner_opts.rel_tol * out.value;
    if whole {
        out = out.add(tail(u, dom, s, p, rho_max, 2.0, tol_i)?);
    }
    Ok(out)
}

fn is_radial(u: &TestFunction) -> bool {
    matches!(u.profile, Profile::Bump { .. } | Profile::Gaussian { .. } | Profile::Constant { .. })
}

/// D(rho w) / rho^p in two dimensions.
fn inner_2d(
    u: &TestFunction,
    dom: &ConcreteDomain,
    support: Option<(Point, f64)>,
    p: f64,
    rho: f64,
    w: Point,
    switch: f64,
    opts: &QuadOptions,
) -> f64 {
    let h = [rho * w[0], rho * w[1]];
    let f = |x: [f64; 2]| pow_abs(quotient(u, &x, &w, rho, switch), p);
    match dom {
        ConcreteDomain::Ball { center, radius, .. } => lens(&f, center, *radius, &h, opts),
        _ => {
            let mut rects = match support {
                Some((c, r)) => {
                    let own = Rect::new(c[0] - r, c[0] + r, c[1] - r, c[1] + r);
                    let shifted = Rect::new(own.x0 - h[0], own.x1 - h[0], own.y0 - h[1], own.y1 - h[1]);
                    union_cells(&own, &shifted)
                }
                None => vec![Rect::new(f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY)],
            };
            if let ConcreteDomain::Box { lo, hi, .. } = dom {
                for rect in &mut rects {
                    rect.x0 = rect.x0.max(lo[0]).max(lo[0] - h[0]);
                    rect.x1 = rect.x1.min(hi[0]).min(hi[0] - h[0]);
                    rect.y0 = rect.y0.max(lo[1]).max(lo[1] - h[1]);
                    rect.y1 = rect.y1.min(hi[1]).min(hi[1] - h[1]);
                }
            }
            rects.retain(|r| r.x1 > r.x0 && r.y1 > r.y0);
            if rects.is_empty() {
                return 0.0;
            }
            integrate_2d(&f, &rects, opts).value
        }
    }
}

/// Disjoint rectangles covering the union of two rectangles: the cells of
/// the grid spanned by their edges whose centers lie in either one.
fn union_cells(a: &Rect, b: &Rect) -> Vec<Rect> {
    let inside = |r: &Rect, x: f64, y: f64| x > r.x0 && x < r.x1 && y > r.y0 && y < r.y1;
    let mut xs = vec![a.x0, a.x1, b.x0, b.x1];
    let mut ys = vec![a.y0, a.y1, b.y0, b.y1];
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    xs.dedup();
    ys.dedup();
    let mut out = Vec::new();
    for yw in ys.windows(2) {
        for xw in xs.windows(2) {
            let (cx, cy) = (0.5 * (xw[0] + xw[1]), 0.5 * (yw[0] + yw[1]));
            if inside(a, cx, cy) || inside(b, cx, cy) {
                out.push(Rect::new(xw[0], xw[1], yw[0], yw[1]));
            }
        }
    }
    out
}

/// Integral over the lens {x in B_r(c) : x + h in B_r(c)} in polar
/// coordinates about c.
fn lens(f: &(dyn Fn([f64; 2]) -> f64 + Sync), c: &Point, r: f64, h: &Point, opts: &QuadOptions) -> f64 {
    let hh = h[0] * h[0] + h[1] * h[1];
    if hh >= 4.0 * r * r {
        return 0.0;
    }
    let g = |q: [f64; 2]| {
        let (sn, cs) = q[1].sin_cos();
        let eh = cs * h[0] + sn * h[1];
        let disc = eh * eh - hh + r * r;
        if disc <= 0.0 {
            return 0.0;
        }
        let root = disc.sqrt();
        let lo = (-eh - root).max(0.0);
        let hi = (-eh + root).min(r);
        if !(hi > lo) {
            return 0.0;
        }
        let t = lo + q[0] * (hi - lo);
        t * (hi - lo) * f([c[0] + t * cs, c[1] + t * sn])
    };
    integrate_2d(&g, &[Rect::new(0.0, 1.0, 0.0, TAU)], opts).value
}

/// Distance from x (inside dom) to the boundary of a box or disc along e.
fn exit_distance(dom: &ConcreteDomain, x: &Point, e: [f64; 2]) -> f64 {
    match dom {
        ConcreteDomain::Box { lo, hi, .. } => {
            let mut r = f64::INFINITY;
            for i in 0..2 {
                if e[i] > 0.0 {
                    r = r.min((hi[i] - x[i]) / e[i]);
                } else if e[i] < 0.0 {
                    r = r.min((lo[i] - x[i]) / e[i]);
                }
            }
            r
        }
        ConcreteDomain::Ball { center, radius, .. } => {
            let d = [x[0] - center[0], x[1] - center[1]];
            let de = d[0] * e[0] + d[1] * e[1];
            -de + (de * de - d[0] * d[0] - d[1] * d[1] + radius * radius).max(0.0).sqrt()
        }
        ConcreteDomain::Whole { .. } => f64::INFINITY,
    }
}

/// For u supported inside a bounded box or disc, the pairs lost relative to
/// the whole space are those with one point outside:
///   I_dom = I_{R^2} - 2 int |u(x)|^p kappa(x) dx,
///   kappa(x) = (1 / sp) int_0^{2 pi} r(x, theta)^{-sp} d theta,
/// with r the exit distance. Both pieces are cheap, unlike the clipped
/// four-dimensional integral.
fn interior_2d(u: &TestFunction, dom: &ConcreteDomain, s: f64, p: f64, tol_i: f64) -> Result<Option<QuadResult>> {
    let Some((c, r)) = u.support() else {
        return Ok(None);
    };
    if matches!(dom, ConcreteDomain::Whole { .. }) || !dom.contains_ball(&c, r) {
        return Ok(None);
    }
    let whole = integral_2d(u, &ConcreteDomain::whole(2), s, p, tol_i)?;
    let sp = s * p;
    let kappa_opts = QuadOptions::new(0.01 * tol_i).cells(400);
    let kappa = |x: &Point| -> f64 {
        // Kinks where the exit ray passes a corner.
        let breaks: Vec<f64> = match dom {
            ConcreteDomain::Box { lo, hi, .. } => [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]]
                .iter()
                .map(|k| (k[1] - x[1]).atan2(k[0] - x[0]).rem_euclid(TAU))
                .collect(),
            _ => Vec::new(),
        };
        let f = |t: f64| {
            let (sn, cs) = t.sin_cos();
            exit_distance(dom, x, [cs, sn]).powf(-sp)
        };
        integrate_1d(&f, 0.0, TAU, &breaks, &kappa_opts).value / sp
    };
    let region = super::Region::Disc(c, r);
    let opts = QuadOptions::new(0.1 * tol_i).cells(20_000);
    let lost = super::integrate_region(&region, &[], &|x| pow_abs(u.eval(x), p) * kappa(x), &opts).scale(2.0);
    let mut out = whole;
    out.value -= lost.value;
    out.error += lost.error + kappa_opts.rel_tol * lost.value;
    out.cells += lost.cells;
    out.converged &= lost.converged;
    Ok(Some(out))
}

fn integral_2d(u: &TestFunction, dom: &ConcreteDomain, s: f64, p: f64, tol_i: f64) -> Result<QuadResult> {
    if let Some(q) = interior_2d(u, dom, s, p, tol_i)? {
        return Ok(q);
    }
    clipped_2d(u, dom, s, p, tol_i)
}

/// Direct evaluation: directions and separations outside, the clipped
/// overlap D(h) inside.
fn clipped_2d(u: &TestFunction, dom: &ConcreteDomain, s: f64, p: f64, tol_i: f64) -> Result<QuadResult> {
    let a = p * (1.0 - s);
    let support = u.effective_support();
    let (rho_max, whole) = match dom {
        ConcreteDomain::Whole { .. } => (2.0 * support_or_whole(u)?.1, true),
        _ => (dom.diameter(), false),
    };
    let switch = gradient_switch(u, rho_max);
    let inner_opts = QuadOptions::new(0.05 * tol_i).cells(400);
    let g = |rho: f64, w: Point| -> f64 {
        inner_2d(u, dom, support, p, rho, w, switch, &inner_opts)
    };
    let scale = rho_max.powf(a) / a;
    let near = if whole && is_radial(u) {
        let outer = QuadOptions::new(0.5 * tol_i).cells(2000).parallel(true);
        integrate_1d(&|t: f64| g(rho_max * t.powf(1.0 / a), [1.0, 0.0]), 0.0, 1.0, &[], &outer).scale(TAU * scale)
    } else {
        let outer = QuadOptions::new(0.5 * tol_i).cells(400).parallel(true);
        let f = |q: [f64; 2]| {
            let (sn, cs) = q[1].sin_cos();
            g(rho_max * q[0].powf(1.0 / a), [cs, sn])
        };
        let mut edges = vec![0.0];
        edges.extend(t_breaks(support.map(|(_, r)| vec![2.0 * r]).unwrap_or_default(), rho_max, a));
        edges.push(1.0);
        let rects: Vec<Rect> = edges.windows(2).map(|w| Rect::new(w[0], w[1], 0.0, PI)).collect();
        integrate_2d(&f, &rects, &outer).scale(2.0 * scale)
    };
    let mut out = near;
    out.error += inner_opts.rel_tol * out.value;
    if whole {
        out = out.add(tail(u, dom, s, p, rho_max, TAU, tol_i)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{make_bump, make_constant, make_tent};

    #[test]
    fn constant_has_zero_seminorm() {
        let c = make_constant(1, 3.0).unwrap();
        let d = ConcreteDomain::interval(0.0, 1.0).unwrap();
        assert_eq!(gagliardo_seminorm(&c, &d, 0.5, 2.0, 1e-6).unwrap().value, 0.0);
    }

    #[test]
    fn homogeneity() {
        let u = make_bump(1, 1.0).unwrap();
        let rn = ConcreteDomain::whole(1);
        let a = gagliardo_seminorm(&u, &rn, 0.3, 3.0, 1e-6).unwrap().value;
        let b = gagliardo_seminorm(&u.times(2.0), &rn, 0.3, 3.0, 1e-6).unwrap().value;
        assert!((b / a - 2.0).abs() < 1e-10);
    }

    #[test]
    fn tent_half_two_against_closed_form() {
        // Independent evaluation: D(h) by direct quadrature in x, then the
        // h integral on (0, 2) plus the exact tail 2 * 2 ||u||_2^2 / 2.
        let u = make_tent(1.0).unwrap();
        let rn = ConcreteDomain::whole(1);
        let got = gagliardo_integral(&u, &rn, 0.5, 2.0, 1e-9).unwrap();
        let d = |h: f64| {
            let f = |x: f64| (u.eval1(x + h) - u.eval1(x)).powi(2);
            integrate_1d(&f, -1.0 - h, 1.0, &[-1.0, 0.0, 1.0, -1.0 - h, -h, 1.0 - h], &QuadOptions::new(1e-14)).value
        };
        let near = integrate_1d(&|h: f64| d(h) / (h * h), 0.0, 2.0, &[1.0], &QuadOptions::new(1e-13)).value;
        let want = 2.0 * near + 4.0 * (2.0 / 3.0) * 0.5;
        assert!(((got.value - want) / want).abs() < 1e-9, "{} vs {want}", got.value);
    }

    #[test]
    fn exterior_subtraction_matches_clipped_integral() {
        let u = TestFunction { center: [0.3, -0.2], ..make_bump(2, 0.4).unwrap() };
        for dom in [
            ConcreteDomain::boxed(2, [-1.0, -1.0], [1.0, 1.0]).unwrap(),
            ConcreteDomain::ball(2, [0.0, 0.0], 1.0).unwrap(),
        ] {
            let fast = interior_2d(&u, &dom, 0.4, 2.0, 1e-5).unwrap().unwrap();
            let direct = clipped_2d(&u, &dom, 0.4, 2.0, 1e-4).unwrap();
            assert!(((fast.value - direct.value) / direct.value).abs() < 1e-4, "{} vs {}", fast.value, direct.value);
        }
    }
}
