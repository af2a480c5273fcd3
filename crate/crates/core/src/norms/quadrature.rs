//! Globally adaptive Gauss-Legendre quadrature in one and two dimensions.
//!
//! Each cell carries the order-8 rule on itself and on its bisection; the
//! difference is the cell's error estimate and the bisected value is kept.
//! The worst cell is split until the summed estimate meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use rayon::prelude::*;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

pub(crate) fn gl8() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(8))
}

pub(crate) fn gl4() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(4))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_cells: usize,
    /// Evaluate the nodes of a refinement step in parallel.
    pub parallel: bool,
}

impl QuadOptions {
    pub fn new(rel_tol: f64) -> Self {
        QuadOptions { rel_tol, abs_tol: 0.0, max_cells: 4000, parallel: false }
    }
    pub fn abs(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
    pub fn cells(mut self, max_cells: usize) -> Self {
        self.max_cells = max_cells;
        self
    }
    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub cells: usize,
    pub converged: bool,
}

impl QuadResult {
    pub fn add(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            error: self.error + other.error,
            cells: self.cells + other.cells,
            converged: self.converged && other.converged,
        }
    }

    pub fn scale(self, c: f64) -> QuadResult {
        QuadResult { value: self.value * c, error: self.error * c.abs(), ..self }
    }
}

struct Keyed<T> {
    err: f64,
    seq: usize,
    item: T,
}

impl<T> PartialEq for Keyed<T> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl<T> Eq for Keyed<T> {}
impl<T> PartialOrd for Keyed<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Keyed<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err).then(o.seq.cmp(&self.seq))
    }
}

fn eval_all(f: &(dyn Fn(f64) -> f64 + Sync), xs: &[f64], parallel: bool) -> Vec<f64> {
    if parallel {
        xs.par_iter().map(|&x| f(x)).collect()
    } else {
        xs.iter().map(|&x| f(x)).collect()
    }
}

fn nodes_1d(a: f64, b: f64, out: &mut Vec<f64>) {
    let (x, _) = gl8();
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    out.extend(x.iter().map(|xi| c + h * xi));
}

fn apply_1d(a: f64, b: f64, vals: &[f64]) -> f64 {
    let (_, w) = gl8();
    0.5 * (b - a) * w.iter().zip(vals).map(|(w, v)| w * v).sum::<f64>()
}

#[derive(Clone, Copy)]
struct Cell1 {
    a: f64,
    b: f64,
    halves: [f64; 2],
}

/// Adaptive integral of `f` over [a, b] with the given interior breakpoints
/// as initial cell boundaries.
pub fn integrate_1d(
    f: &(dyn Fn(f64) -> f64 + Sync),
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: &QuadOptions,
) -> QuadResult {
    if !(b > a) {
        return QuadResult { converged: true, ..Default::default() };
    }
    let mut edges = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(b);
    let spans: Vec<(f64, f64)> = edges.windows(2).map(|w| (w[0], w[1])).filter(|(x, y)| y > x).collect();

    // Coarse and bisected values for the initial spans in one batch.
    let mut xs = Vec::with_capacity(spans.len() * 24);
    for &(x, y) in &spans {
        let m = 0.5 * (x + y);
        nodes_1d(x, y, &mut xs);
        nodes_1d(x, m, &mut xs);
        nodes_1d(m, y, &mut xs);
    }
    let vals = eval_all(f, &xs, opts.parallel);
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    let (mut total, mut total_err) = (0.0, 0.0);
    for (k, &(x, y)) in spans.iter().enumerate() {
        let m = 0.5 * (x + y);
        let v = &vals[k * 24..(k + 1) * 24];
        let coarse = apply_1d(x, y, &v[..8]);
        let halves = [apply_1d(x, m, &v[8..16]), apply_1d(m, y, &v[16..])];
        let err = (halves[0] + halves[1] - coarse).abs();
        total += halves[0] + halves[1];
        total_err += err;
        heap.push(Keyed { err, seq, item: Cell1 { a: x, b: y, halves } });
        seq += 1;
    }
    let mut count = heap.len();
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= target || count >= opts.max_cells {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let c = worst.item;
        let m = 0.5 * (c.a + c.b);
        if !(m > c.a && m < c.b) || (c.b - c.a) <= 1e-14 * c.a.abs().max(c.b.abs()).max(1e-300) {
            // Cannot split further: freeze the cell.
            total_err -= worst.err;
            heap.push(Keyed { err: 0.0, seq: worst.seq, item: c });
            if heap.iter().all(|k| k.err == 0.0) {
                break;
            }
            continue;
        }
        let ml = 0.5 * (c.a + m);
        let mr = 0.5 * (m + c.b);
        let mut xs = Vec::with_capacity(32);
        nodes_1d(c.a, ml, &mut xs);
        nodes_1d(ml, m, &mut xs);
        nodes_1d(m, mr, &mut xs);
        nodes_1d(mr, c.b, &mut xs);
        let v = eval_all(f, &xs, opts.parallel);
        let left = [apply_1d(c.a, ml, &v[..8]), apply_1d(ml, m, &v[8..16])];
        let right = [apply_1d(m, mr, &v[16..24]), apply_1d(mr, c.b, &v[24..])];
        let el = (left[0] + left[1] - c.halves[0]).abs();
        let er = (right[0] + right[1] - c.halves[1]).abs();
        total += left[0] + left[1] + right[0] + right[1] - c.halves[0] - c.halves[1];
        total_err += el + er - worst.err;
        heap.push(Keyed { err: el, seq, item: Cell1 { a: c.a, b: m, halves: left } });
        heap.push(Keyed { err: er, seq: seq + 1, item: Cell1 { a: m, b: c.b, halves: right } });
        seq += 2;
        count += 1;
    }
    finish(heap.into_vec().into_iter().map(|k| (k.item.a, k.item.halves[0] + k.item.halves[1], k.err)), opts, count)
}

fn finish(cells: impl Iterator<Item = (f64, f64, f64)>, opts: &QuadOptions, count: usize) -> QuadResult {
    let mut cells: Vec<(f64, f64, f64)> = cells.collect();
    cells.sort_by(|x, y| x.0.total_cmp(&y.0));
    let value: f64 = cells.iter().map(|c| c.1).sum();
    let error: f64 = cells.iter().map(|c| c.2).sum();
    let converged = error <= opts.abs_tol.max(opts.rel_tol * value.abs());
    QuadResult { value, error, cells: count, converged }
}

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    fn quarters(&self) -> [Rect; 4] {
        let xm = 0.5 * (self.x0 + self.x1);
        let ym = 0.5 * (self.y0 + self.y1);
        [
            Rect::new(self.x0, xm, self.y0, ym),
            Rect::new(xm, self.x1, self.y0, ym),
            Rect::new(self.x0, xm, ym, self.y1),
            Rect::new(xm, self.x1, ym, self.y1),
        ]
    }

    fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }
}

fn nodes_2d(r: &Rect, out: &mut Vec<[f64; 2]>) {
    let (x, _) = gl8();
    let (cx, hx) = (0.5 * (r.x0 + r.x1), 0.5 * (r.x1 - r.x0));
    let (cy, hy) = (0.5 * (r.y0 + r.y1), 0.5 * (r.y1 - r.y0));
    for xi in x {
        for yj in x {
            out.push([cx + hx * xi, cy + hy * yj]);
        }
    }
}

fn apply_2d(r: &Rect, vals: &[f64]) -> f64 {
    let (_, w) = gl8();
    let mut acc = 0.0;
    for (i, wi) in w.iter().enumerate() {
        for (j, wj) in w.iter().enumerate() {
            acc += wi * wj * vals[i * 8 + j];
        }
    }
    0.25 * r.area() * acc
}

fn eval_all_2d(f: &(dyn Fn([f64; 2]) -> f64 + Sync), xs: &[[f64; 2]], parallel: bool) -> Vec<f64> {
    if parallel {
        xs.par_iter().map(|&x| f(x)).collect()
    } else {
        xs.iter().map(|&x| f(x)).collect()
    }
}

/// Adaptive integral over a union of rectangles (used as initial cells).
pub fn integrate_2d(
    f: &(dyn Fn([f64; 2]) -> f64 + Sync),
    rects: &[Rect],
    opts: &QuadOptions,
) -> QuadResult {
    let rects: Vec<Rect> = rects.iter().copied().filter(|r| r.area() > 0.0).collect();
    if rects.is_empty() {
        return QuadResult { converged: true, ..Default::default() };
    }
    let mut xs = Vec::with_capacity(rects.len() * 320);
    for r in &rects {
        nodes_2d(r, &mut xs);
        for q in r.quarters() {
            nodes_2d(&q, &mut xs);
        }
    }
    let vals = eval_all_2d(f, &xs, opts.parallel);
    let mut heap = BinaryHeap::new();
    let (mut total, mut total_err) = (0.0, 0.0);
    let mut seq = 0;
    for (k, r) in rects.iter().enumerate() {
        let v = &vals[k * 320..(k + 1) * 320];
        let coarse = apply_2d(r, &v[..64]);
        let qs = r.quarters();
        let parts: [f64; 4] = std::array::from_fn(|i| apply_2d(&qs[i], &v[64 * (i + 1)..64 * (i + 2)]));
        let fine: f64 = parts.iter().sum();
        let err = (fine - coarse).abs();
        total += fine;
        total_err += err;
        heap.push(Keyed { err, seq, item: (*r, parts) });
        seq += 1;
    }
    let mut count = heap.len();
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= target || count >= opts.max_cells {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let (r, parts) = worst.item;
        let qs = r.quarters();
        let mut xs = Vec::with_capacity(1024);
        for q in &qs {
            for qq in q.quarters() {
                nodes_2d(&qq, &mut xs);
            }
        }
        let v = eval_all_2d(f, &xs, opts.parallel);
        total_err -= worst.err;
        for (i, q) in qs.iter().enumerate() {
            let qq = q.quarters();
            let sub: [f64; 4] = std::array::from_fn(|j| {
                let o = (i * 4 + j) * 64;
                apply_2d(&qq[j], &v[o..o + 64])
            });
            let fine: f64 = sub.iter().sum();
            let err = (fine - parts[i]).abs();
            total += fine - parts[i];
            total_err += err;
            heap.push(Keyed { err, seq, item: (*q, sub) });
            seq += 1;
        }
        count += 3;
    }
    let mut cells: Vec<(Rect, f64, f64)> =
        heap.into_vec().into_iter().map(|k| (k.item.0, k.item.1.iter().sum::<f64>(), k.err)).collect();
    cells.sort_by(|a, b| a.0.y0.total_cmp(&b.0.y0).then(a.0.x0.total_cmp(&b.0.x0)));
    let value: f64 = cells.iter().map(|c| c.1).sum();
    let error: f64 = cells.iter().map(|c| c.2).sum();
    let converged = error <= opts.abs_tol.max(opts.rel_tol * value.abs());
    QuadResult { value, error, cells: count, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_matches_known_nodes() {
        let (x, w) = gauss_legendre(8);
        assert!((x[7] - 0.960_289_856_497_536_3).abs() < 1e-15);
        assert!((w[7] - 0.101_228_536_290_376_3).abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn polynomials_are_exact() {
        let r = integrate_1d(&|x| x.powi(15) + 3.0 * x * x, -1.0, 2.0, &[], &QuadOptions::new(1e-14));
        let exact = (2f64.powi(16) - 1.0) / 16.0 + 9.0;
        assert!((r.value - exact).abs() < 1e-10);
    }

    #[test]
    fn kinks_and_breakpoints() {
        let f = |x: f64| (1.0 - x.abs()).max(0.0).powi(2);
        let r = integrate_1d(&f, -2.0, 2.0, &[-1.0, 0.0, 1.0], &QuadOptions::new(1e-12));
        assert!((r.value - 2.0 / 3.0).abs() < 1e-14);
        let r = integrate_1d(&|x: f64| x.abs().sqrt(), -1.0, 1.0, &[], &QuadOptions::new(1e-10).cells(10_000));
        assert!((r.value - 4.0 / 3.0).abs() < 1e-9, "{r:?}");
        assert!(r.converged);
    }

    #[test]
    fn two_dimensional() {
        let r = integrate_2d(&|p| (p[0] * p[1]).cos(), &[Rect::new(0.0, 1.0, 0.0, 2.0)], &QuadOptions::new(1e-12));
        // int_0^1 sin(2x)/x dx
        let exact = integrate_1d(&|x: f64| (2.0 * x).sin() / x, 0.0, 1.0, &[], &QuadOptions::new(1e-14)).value;
        assert!((r.value - exact).abs() < 1e-11);
    }
}
