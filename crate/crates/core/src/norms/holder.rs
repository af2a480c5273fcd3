//! Sup-type quantities: grid search for sup |f| and the Hölder seminorm
//!   sup_{x != y} |u(x) - u(y)| / |x - y|^s.
//! Both are lower bounds; the best grid candidate is refined by a compass
//! search and the gain from that refinement is reported as the error.

use rayon::prelude::*;

use super::domain::{check_dims, dist};
use super::{sup_report, ConcreteDomain, NormReport};
use crate::corpus::{Point, TestFunction};
use crate::error::{Error, Result};

/// Bounding box of the part of the domain where `u` can be nonzero.
fn sample_box(u: &TestFunction, dom: &ConcreteDomain) -> Result<(Point, Point)> {
    let n = u.dim as usize;
    let (mut lo, mut hi) = match dom {
        ConcreteDomain::Whole { .. } => ([f64::NEG_INFINITY; 2], [f64::INFINITY; 2]),
        ConcreteDomain::Box { lo, hi, .. } => (*lo, *hi),
        ConcreteDomain::Ball { center, radius, .. } => (
            [center[0] - radius, center[1] - radius],
            [center[0] + radius, center[1] + radius],
        ),
    };
    if let Some((c, r)) = u.effective_support() {
        for k in 0..n {
            lo[k] = lo[k].max(c[k] - r);
            hi[k] = hi[k].min(c[k] + r);
        }
    }
    for k in 0..n {
        if !lo[k].is_finite() || !hi[k].is_finite() {
            return Err(Error::Precondition(format!("{} is unbounded on the whole space", u.label)));
        }
        if hi[k] < lo[k] {
            hi[k] = lo[k];
        }
    }
    if n == 1 {
        lo[1] = 0.0;
        hi[1] = 0.0;
    }
    Ok((lo, hi))
}

fn admissible(u: &TestFunction, dom: &ConcreteDomain, x: &Point) -> bool {
    if !dom.contains(x) {
        return false;
    }
    match u.effective_support() {
        Some((c, r)) => dist(x, &c, u.dim as usize) <= r * (1.0 + 1e-12),
        None => true,
    }
}

fn grid(u: &TestFunction, dom: &ConcreteDomain, per_axis: usize) -> Result<Vec<Point>> {
    let (lo, hi) = sample_box(u, dom)?;
    let at = |k: usize, i: usize| lo[k] + (hi[k] - lo[k]) * i as f64 / (per_axis - 1) as f64;
    let mut pts = Vec::new();
    if u.dim == 1 {
        pts.extend((0..per_axis).map(|i| [at(0, i), 0.0]));
    } else {
        for i in 0..per_axis {
            for j in 0..per_axis {
                pts.push([at(0, i), at(1, j)]);
            }
        }
    }
    pts.retain(|x| admissible(u, dom, x));
    Ok(pts)
}

/// Compass search maximizing `f` over points of dimension `dims`, starting
/// at `x` with step `step`.
fn compass<const D: usize>(f: &dyn Fn(&[f64; D]) -> f64, mut x: [f64; D], dims: &[usize], mut step: f64) -> (f64, [f64; D]) {
    let mut best = f(&x);
    while step > 1e-12 {
        let mut moved = false;
        for &k in dims {
            for sgn in [1.0, -1.0] {
                let mut y = x;
                y[k] += sgn * step;
                let v = f(&y);
                if v > best {
                    best = v;
                    x = y;
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (best, x)
}

/// Grid lower bound for sup |f| over the domain, with the refinement gain.
pub(crate) fn grid_sup(u: &TestFunction, dom: &ConcreteDomain, f: &(dyn Fn(&Point) -> f64 + Sync)) -> Result<(f64, f64)> {
    check_dims(u, dom)?;
    let per_axis = if u.dim == 1 { 8193 } else { 257 };
    let pts = grid(u, dom, per_axis)?;
    let (lo, hi) = sample_box(u, dom)?;
    let (v0, x0) = pts
        .par_iter()
        .map(|x| (f(x).abs(), *x))
        .reduce(|| (0.0, [0.0; 2]), |a, b| if b.0 > a.0 { b } else { a });
    let guarded = |x: &Point| if admissible(u, dom, x) { f(x).abs() } else { 0.0 };
    let dims: &[usize] = if u.dim == 1 { &[0] } else { &[0, 1] };
    let step = (hi[0] - lo[0]).max(hi[1] - lo[1]) / (per_axis - 1) as f64;
    let (v1, _) = compass(&guarded, x0, dims, step);
    Ok((v1.max(v0), (v1 - v0).max(0.0)))
}

/// Hölder seminorm of exponent `s` in (0, 1]; a grid lower bound.
pub fn holder_seminorm(u: &TestFunction, dom: &ConcreteDomain, s: f64) -> Result<NormReport> {
    check_dims(u, dom)?;
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Precondition(format!("Hölder exponent must lie in (0, 1], got {s}")));
    }
    let n = u.dim as usize;
    let per_axis = if u.dim == 1 { 1025 } else { 41 };
    let pts = grid(u, dom, per_axis)?;
    let vals: Vec<f64> = pts.iter().map(|x| u.eval(x)).collect();
    let (v0, i0, j0) = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let mut best = (0.0, i, i);
            for j in i + 1..pts.len() {
                let d = dist(&pts[i], &pts[j], n);
                let q = (vals[i] - vals[j]).abs() / d.powf(s);
                if q > best.0 {
                    best = (q, i, j);
                }
            }
            best
        })
        .reduce(|| (0.0, 0, 0), |a, b| if b.0 > a.0 { b } else { a });
    if v0 == 0.0 {
        return Ok(holder_report(0.0, 0.0));
    }
    let quotient = |z: &[f64; 4]| {
        let x = [z[0], z[1]];
        let y = [z[2], z[3]];
        let d = dist(&x, &y, n);
        if d == 0.0 || !admissible(u, dom, &x) || !admissible(u, dom, &y) {
            return 0.0;
        }
        (u.eval(&x) - u.eval(&y)).abs() / d.powf(s)
    };
    let (lo, hi) = sample_box(u, dom)?;
    let step = (hi[0] - lo[0]).max(hi[1] - lo[1]) / (per_axis - 1) as f64;
    let start = [pts[i0][0], pts[i0][1], pts[j0][0], pts[j0][1]];
    let dims: &[usize] = if n == 1 { &[0, 2] } else { &[0, 1, 2, 3] };
    let (v1, _) = compass(&quotient, start, dims, step);
    Ok(holder_report(v1.max(v0), (v1 - v0).max(0.0)))
}

fn holder_report(value: f64, gain: f64) -> NormReport {
    sup_report(value, gain, 0.0)
}
