//! BMO norm as the largest mean oscillation over a finite family of balls,
//!   sup_B |B|^{-2} int_B int_B |u(y) - u(z)| dy dz.

use std::f64::consts::TAU;

use serde::Serialize;

use super::domain::check_dims;
use super::quadrature::{integrate_1d, integrate_2d, QuadOptions, QuadResult, Rect};
use super::special::{normalizing_constant, unit_ball_volume};
use super::{ConcreteDomain, NormReport};
use crate::corpus::{Point, TestFunction};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallFamily {
    pub balls: Vec<(Point, f64)>,
}

impl BallFamily {
    pub fn new(balls: Vec<(Point, f64)>) -> Result<Self> {
        if balls.is_empty() {
            return Err(Error::Precondition("ball family is empty".into()));
        }
        if balls.iter().any(|b| !(b.1 > 0.0) || !b.1.is_finite()) {
            return Err(Error::Precondition("ball radii must be positive and finite".into()));
        }
        Ok(BallFamily { balls })
    }

    /// Balls centered on a uniform grid of `centers` points per axis over
    /// [lo, hi]^dim, with radii r_max 2^{-k}, k = 0..levels.
    pub fn grid(dim: u32, lo: f64, hi: f64, centers: usize, r_max: f64, levels: usize) -> Result<Self> {
        let at = |i: usize| if centers == 1 { 0.5 * (lo + hi) } else { lo + (hi - lo) * i as f64 / (centers - 1) as f64 };
        let mut balls = Vec::new();
        for k in 0..levels.max(1) {
            let r = r_max * 0.5f64.powi(k as i32);
            for i in 0..centers {
                if dim == 1 {
                    balls.push(([at(i), 0.0], r));
                } else {
                    for j in 0..centers {
                        balls.push(([at(i), at(j)], r));
                    }
                }
            }
        }
        Self::new(balls)
    }
}

/// The constant K with ||u||_BMO <= K ||u||_{W^{s,p}} produced by Hölder's
/// inequality on each ball when sp = N:
///   K = c_{N,s,p}^{-1/p} (2r)^{2N/p} |B_r|^{-2/p},
/// which does not depend on r.
pub fn bmo_prefactor(dim: u32, s: f64, p: f64) -> Result<f64> {
    let n = dim as f64;
    if ((s * p - n) / n).abs() > 1e-12 {
        return Err(Error::Precondition(format!("BMO prefactor needs sp = N, got s = {s}, p = {p}, N = {dim}")));
    }
    let c = normalizing_constant(dim, s, p)?;
    let omega = unit_ball_volume(dim);
    Ok(c.powf(-1.0 / p) * (2f64.powf(n) / omega).powf(2.0 / p))
}

fn oscillation_1d(u: &TestFunction, c: f64, r: f64, tol: f64) -> QuadResult {
    let (a, b) = (c - r, c + r);
    let kinks = u.breakpoints();
    let inner_opts = QuadOptions::new(0.1 * tol).abs(1e-300).cells(2000);
    let outer = QuadOptions::new(0.5 * tol).cells(2000).parallel(true);
    let inner = |y: f64| {
        let uy = u.eval1(y);
        let mut breaks = kinks.clone();
        breaks.push(y);
        integrate_1d(&|z: f64| (uy - u.eval1(z)).abs(), a, b, &breaks, &inner_opts).value
    };
    integrate_1d(&inner, a, b, &kinks, &outer)
}

fn oscillation_2d(u: &TestFunction, c: Point, r: f64, tol: f64) -> QuadResult {
    let disc = [Rect::new(0.0, r, 0.0, TAU)];
    let at = |q: [f64; 2]| {
        let (sn, cs) = q[1].sin_cos();
        [c[0] + q[0] * cs, c[1] + q[0] * sn]
    };
    let inner_opts = QuadOptions::new(0.1 * tol).abs(1e-300).cells(200);
    let outer = QuadOptions::new(0.5 * tol).cells(400).parallel(true);
    let inner = |qy: [f64; 2]| {
        let uy = u.eval(&at(qy));
        qy[0] * integrate_2d(&|qz: [f64; 2]| qz[0] * (uy - u.eval(&at(qz))).abs(), &disc, &inner_opts).value
    };
    integrate_2d(&inner, &disc, &outer)
}

/// Largest mean oscillation over the family; a lower bound for the BMO norm.
pub fn bmo_norm(u: &TestFunction, dom: &ConcreteDomain, family: &BallFamily, tol: f64) -> Result<NormReport> {
    check_dims(u, dom)?;
    if family.balls.is_empty() {
        return Err(Error::Precondition("ball family is empty".into()));
    }
    let mut best = NormReport { value: 0.0, error: 0.0, cells: 0, tolerance: tol, constant: None, converged: true, lower_bound: true };
    for &(c, r) in &family.balls {
        if !dom.contains_ball(&c, r) {
            return Err(Error::Precondition(format!("ball ({:?}, {r}) is not inside the domain", &c[..u.dim as usize])));
        }
        let vol = unit_ball_volume(u.dim) * r.powi(u.dim as i32);
        let q = if u.dim == 1 { oscillation_1d(u, c[0], r, tol) } else { oscillation_2d(u, c, r, tol) };
        let value = q.value / (vol * vol);
        best.cells += q.cells;
        best.converged &= q.converged;
        if value > best.value {
            best.value = value;
            best.error = q.error / (vol * vol);
        }
    }
    Ok(best)
}
