//! Acceptance criteria 1-10. Each test prints one `[criterion k] ... PASS|FAIL`
//! line (visible with `--nocapture`) before asserting.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use soblab::corpus::{builtin, by_label, make_tent};
use soblab::exponent::{classify_compact, classify_continuous, Compactness, Continuity, CurveLemma, DomainKind, SobolevIndex};
use soblab::lab::{
    bbm_limit_sweep, bmo_chain, counterexample_run, curve_round_trip, default_epsilons, lemma_parameters,
    partition_check, reference_domain, verify_interpolation, verify_scaling_identity, Tolerances,
};
use soblab::norms::{gagliardo_seminorm, BallFamily, ConcreteDomain};
use soblab::exponent::Tag;

fn idx(n: u32, sp: &str) -> SobolevIndex {
    SobolevIndex::parse(n, sp).unwrap()
}

fn report(k: u32, name: &str, ok: bool, detail: String) {
    println!("[criterion {k}] {name}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
}

const REGIMES: [(u32, &str); 3] = [(2, "0.5,2"), (1, "0.5,2"), (1, "0.9,2")];

#[test]
fn c01_partition_completeness() {
    let mut worst = 0.0f64;
    let mut violations = 0;
    let mut counts_ok = true;
    for (n, sp) in REGIMES {
        for d in [DomainKind::WholeSpace, DomainKind::BoundedLipschitz] {
            let t0 = Instant::now();
            let r = partition_check(&idx(n, sp), d, 100).unwrap();
            worst = worst.max(t0.elapsed().as_secs_f64());
            violations += r.violations.len();
            counts_ok &= r.cells == 10_000 && r.region + r.complement == r.cells;
        }
    }
    let ok = violations == 0 && counts_ok && worst < 5.0;
    report(1, "partition completeness", ok, format!("{violations} violations, slowest grid {worst:.2} s"));
    assert!(ok);
}

#[test]
fn c02_curve_round_trip() {
    let mut detail = Vec::new();
    let mut ok = true;
    for (n, sp, lemma) in [
        (2, "0.5,2", CurveLemma::SubcriticalCont),
        (2, "0.5,2", CurveLemma::SubcriticalCompact),
        (1, "0.5,2", CurveLemma::Critical),
    ] {
        let r = curve_round_trip(&idx(n, sp), lemma, 1000, 20_240_601).unwrap();
        ok &= r.samples == 1000 && r.exact_failures == 0 && r.float_max_error <= 1e-12;
        detail.push(format!("{lemma:?}: {} exact failures, float {:.1e}", r.exact_failures, r.float_max_error));
    }
    report(2, "curve reconstruction", ok, detail.join("; "));
    assert!(ok);
}

#[test]
fn c03_scaling_identity() {
    let tol = Tolerances { quadrature: 1e-6, ..Tolerances::default() };
    let src = idx(1, "0.5,2");
    let eps = [1.0, 0.5, 0.25, 0.125];
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for label in ["tent", "bump"] {
        for tag in [Tag::Lemma2_3, Tag::Lemma2_4, Tag::Lemma2_5, Tag::Lemma2_6] {
            let (g, b) = lemma_parameters(tag, &src).unwrap();
            let r = verify_scaling_identity(&by_label(label).unwrap(), &src, g, b, &eps, &tol).unwrap();
            worst = worst.max(r.deviation);
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let ok = worst <= 1e-3 && secs < 60.0;
    report(3, "scaling identity", ok, format!("max relative deviation {worst:.2e}, {secs:.1} s"));
    assert!(ok);
}

#[test]
fn c04_counterexample_slopes() {
    let tol = Tolerances::default();
    let eps = default_epsilons();
    let cases = [
        ("0.5,2", "0.5,6", -1.0 / 3.0),
        ("0.5,2", "0.5,1", -0.5),
        ("0.5,2", "0.5,4", -0.25),
        // Supercritical, outside the region: -N/p + N/p~ + s - s~ = -1/4.
        ("0.9,2", "0.9,4", -0.25),
    ];
    let t0 = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for (a, b, predicted) in cases {
        let r = counterexample_run(&idx(1, a), &idx(1, b), DomainKind::WholeSpace, &eps, &tol, None).unwrap();
        let fitted = r.fitted_exponent.unwrap();
        let rel = ((fitted - predicted) / predicted).abs();
        ok &= rel <= 0.05 && r.pass;
        detail.push(format!("({a})->({b}) {fitted:.4} vs {predicted:.4}"));
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 300.0;
    report(4, "counterexample slopes", ok, format!("{}; {secs:.1} s", detail.join(", ")));
    assert!(ok);
}

/// Composite Simpson on [a, b] with n (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

#[test]
fn c05_bbm_endpoint_limits() {
    let u = by_label("bump").unwrap();
    let rn = ConcreteDomain::whole(1);
    // Oracles: ||u||_2 and ||u'||_2 of exp(1 - 1/(1 - x^2)) on (-1, 1).
    let bump = |x: f64| if x.abs() < 1.0 { (1.0 - 1.0 / (1.0 - x * x)).exp() } else { 0.0 };
    let dbump = |x: f64| if x.abs() < 1.0 { bump(x) * (-2.0 * x / (1.0 - x * x).powi(2)) } else { 0.0 };
    let l2 = simpson(|x| bump(x).powi(2), -1.0, 1.0, 20_000).sqrt();
    let h1 = simpson(|x| dbump(x).powi(2), -1.0, 1.0, 20_000).sqrt();
    let lo = gagliardo_seminorm(&u, &rn, 0.001, 2.0, 1e-6).unwrap().value;
    let hi = gagliardo_seminorm(&u, &rn, 0.999, 2.0, 1e-6).unwrap().value;
    let (d_lo, d_hi) = ((lo / l2 - 1.0).abs(), (hi / h1 - 1.0).abs());
    let sweep = bbm_limit_sweep(&u, &rn, 2.0, &[0.001, 0.999], &Tolerances::default()).unwrap();
    let ok = d_lo <= 0.05 && d_hi <= 0.05 && sweep.pass;
    report(5, "BBM endpoint limits", ok, format!("s=0.001: {d_lo:.2e}, s=0.999: {d_hi:.2e}"));
    assert!(ok);
}

/// Dense oracle for [tent]_{W^{1/2,2}(R)}^2 / c on [-1,1] x [-1,1] plus the
/// exact exterior term. Cells align with the kink at 0, so pairs on the same
/// linear piece contribute exactly slope^2 * h^2; the remaining pairs use a
/// 4 x 4 Gauss-Legendre product rule.
fn tent_half_oracle(cells_per_half: usize) -> f64 {
    let tent = |x: f64| 1.0 - x.abs();
    let nodes = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
    let weights = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];
    let m = 2 * cells_per_half;
    let h = 2.0 / m as f64;
    let mut inner = 0.0;
    for i in 0..m {
        for j in 0..m {
            let same_piece = (i < cells_per_half) == (j < cells_per_half);
            if same_piece {
                inner += h * h;
                continue;
            }
            let (a, b) = (-1.0 + i as f64 * h, -1.0 + j as f64 * h);
            let mut acc = 0.0;
            for (xi, wi) in nodes.iter().zip(weights) {
                for (yj, wj) in nodes.iter().zip(weights) {
                    let x = a + 0.5 * h * (1.0 + xi);
                    let y = b + 0.5 * h * (1.0 + yj);
                    acc += wi * wj * (tent(x) - tent(y)).powi(2) / (x - y).powi(2);
                }
            }
            inner += acc * 0.25 * h * h;
        }
    }
    // 2 * int_{-1}^{1} tent^2 (1/(1-x) + 1/(1+x)) dx = 8 (2 ln 2 - 1).
    inner + 8.0 * (2.0 * std::f64::consts::LN_2 - 1.0)
}

#[test]
fn c06_seminorm_oracle() {
    use statrs::function::gamma::gamma;
    let (n, s) = (1.0f64, 0.5f64);
    // Fractional Laplacian constant, halved for the double integral.
    let c = 0.5 * s * 4f64.powf(s) * gamma((n + 2.0 * s) / 2.0) / (std::f64::consts::PI.powf(n / 2.0) * gamma(1.0 - s));
    let u = make_tent(1.0).unwrap();
    let engine = gagliardo_seminorm(&u, &ConcreteDomain::whole(1), s, 2.0, 1e-8).unwrap();
    // The engine needs `engine.cells` cells; the oracle uses a 4x finer, and
    // at least 1024-cell, uniform grid.
    let per_half = (2 * engine.cells).max(512);
    let oracle = (c * tent_half_oracle(per_half)).sqrt();
    let rel = (engine.value / oracle - 1.0).abs();
    let ok = rel <= 1e-4;
    report(6, "brute-force seminorm oracle", ok, format!("engine {:.10}, oracle {oracle:.10}, rel {rel:.2e}", engine.value));
    assert!(ok);
}

#[test]
fn c07_interpolation_endpoints() {
    let tol = Tolerances::default();
    let mut worst = 0.0f64;
    let mut max_rho = BTreeMap::new();
    for u in builtin() {
        let dom = if u.effective_support().is_some() {
            ConcreteDomain::whole(u.dim)
        } else {
            reference_domain(DomainKind::BoundedLipschitz, u.dim).unwrap()
        };
        let (a, b) = (idx(u.dim, "0,2"), idx(u.dim, "0.8,2"));
        let r = verify_interpolation(&u, &dom, &a, &b, &[0.0, 0.25, 0.5, 0.75, 1.0], &tol).unwrap();
        worst = worst.max(r.deviation);
        max_rho.insert(u.label.clone(), r.constant.unwrap());
    }
    let overall = max_rho.values().fold(0.0f64, |a, b| a.max(*b));
    let ok = worst <= 1e-6 && overall.is_finite();
    report(7, "interpolation endpoints", ok, format!("endpoint deviation {worst:.2e}, max rho {overall:.6} over {max_rho:?}"));
    assert!(ok);
}

#[test]
fn c08_bmo_chain() {
    let corpus: Vec<_> = ["bump", "tent", "gaussian"].iter().map(|l| by_label(l).unwrap()).collect();
    let family = BallFamily::grid(1, -2.0, 2.0, 7, 2.0, 4).unwrap();
    let r = bmo_chain(&idx(1, "0.5,2"), &corpus, &family, &Tolerances::default()).unwrap();
    let k = r.threshold;
    let ok = r.measured.len() == 3 && r.measured.iter().all(|m| m.is_finite() && *m <= k);
    report(8, "BMO chain", ok, format!("ratios {:?} <= prefactor {k:.6} over {} balls", r.measured, family.balls.len()));
    assert!(ok);
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn c09_report_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = tmp.path().join(name);
        let st = Command::new(env!("CARGO_BIN_EXE_soblab"))
            .args(["report", "--out"])
            .arg(&out)
            .env("SOBLAB_THREADS", threads)
            .output()
            .unwrap();
        let stdout = String::from_utf8_lossy(&st.stdout).replace(&*out.to_string_lossy(), "<out>");
        (st, stdout, dir_bytes(&out))
    };
    let (st1, log1, a) = run("first", "4");
    let (st2, log2, b) = run("second", "1");
    let differing: Vec<&String> = a.keys().filter(|k| a.get(*k) != b.get(*k)).collect();
    let ok = st1.status.success() && st2.status.success() && a.len() == b.len() && differing.is_empty() && log1 == log2;
    report(9, "determinism", ok, format!("{} files, {} differ, exit codes {:?}/{:?}", a.len(), differing.len(), st1.status.code(), st2.status.code()));
    assert!(ok, "{differing:?}");
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum V {
    Y,
    N,
    /// Compactness is not a question on R^N.
    Na,
}

/// Hand-evaluated verdicts: (N, source, target, bounded, continuous, compact).
///
/// Sources: A = (N=2, 1/2, 2), sp = 1 < N, p~ bound 4/(1 + 2 s~);
/// B = (N=1, 1/2, 2), sp = N, bound s~ p~ <= 1;
/// C = (N=1, 9/10, 2), sp > N, (sp - N)/p = 2/5, bound p~ <= 1/(s~ - 2/5).
const SPOT: &[(u32, &str, &str, bool, V, V)] = &[
    // A on R^2: s~ <= 1/2, 2 <= p~ <= 4/(1 + 2 s~).
    (2, "1/2,2", "1/4,5/2", false, V::Y, V::Na), // 5/2 <= 8/3
    (2, "1/2,2", "1/4,8/3", false, V::Y, V::Na), // on the curve
    (2, "1/2,2", "1/4,3", false, V::N, V::Na),   // 3 > 8/3
    (2, "1/2,2", "1/4,inf", false, V::N, V::Na),
    (2, "1/2,2", "0,4", false, V::Y, V::Na), // curve end, p* = 4
    (2, "1/2,2", "0,5", false, V::N, V::Na),
    (2, "1/2,2", "0,2", false, V::Y, V::Na),
    (2, "1/2,2", "1/4,3/2", false, V::N, V::Na), // p~ < p
    (2, "1/2,2", "3/4,2", false, V::N, V::Na),   // s~ > s
    (2, "1/2,2", "1/2,2", false, V::Y, V::Na),   // identity
    (2, "1/2,2", "1/2,3", false, V::N, V::Na),   // bound at s~ = s is 2
    (2, "1/2,2", "1/10,3", false, V::Y, V::Na),  // bound 10/3
    (2, "1/2,2", "0,1", false, V::N, V::Na),
    // A on a bounded domain: s~ < 1/2, 1 <= p~ <= bound; compact iff p~ < bound.
    (2, "1/2,2", "1/4,3/2", true, V::Y, V::Y),
    (2, "1/2,2", "1/4,8/3", true, V::Y, V::N),
    (2, "1/2,2", "1/4,3", true, V::N, V::N),
    (2, "1/2,2", "0,1", true, V::Y, V::Y),
    (2, "1/2,2", "0,4", true, V::Y, V::N),
    (2, "1/2,2", "1/2,2", true, V::Y, V::N), // identity is never compact
    (2, "1/2,2", "1/2,1", true, V::N, V::N), // s~ = s < 1 needs p~ = p
    (2, "1/2,2", "3/4,1", true, V::N, V::N),
    (2, "1/2,2", "1/10,10/3", true, V::Y, V::N),
    (2, "1/2,2", "1/10,1", true, V::Y, V::Y),
    // B on R: 0 < s~ <= 1/2 with 2 <= p~ <= 1/s~, or s~ = 0 with 2 <= p~ < inf.
    (1, "1/2,2", "1/4,4", false, V::Y, V::Na),
    (1, "1/2,2", "1/4,5", false, V::N, V::Na),
    (1, "1/2,2", "1/4,3", false, V::Y, V::Na),
    (1, "1/2,2", "0,100", false, V::Y, V::Na),
    (1, "1/2,2", "0,inf", false, V::N, V::Na),
    (1, "1/2,2", "1/2,2", false, V::Y, V::Na),
    (1, "1/2,2", "1/4,3/2", false, V::N, V::Na),
    (1, "1/2,2", "1/2,4", false, V::N, V::Na),
    // B bounded: 1 <= p~, s~ < 1/2; compact iff s~ p~ < 1.
    (1, "1/2,2", "1/4,4", true, V::Y, V::N),
    (1, "1/2,2", "1/4,2", true, V::Y, V::Y),
    (1, "1/2,2", "0,inf", true, V::N, V::N),
    (1, "1/2,2", "0,1", true, V::Y, V::Y),
    (1, "1/2,2", "1/4,5", true, V::N, V::N),
    (1, "1/2,2", "1/3,1", true, V::Y, V::Y),
    // C on R: s~ <= 2/5 with p~ >= 2 (inf allowed), or 2/5 < s~ <= 9/10 with
    // 2 <= p~ <= 1/(s~ - 2/5).
    (1, "9/10,2", "2/5,inf", false, V::Y, V::Na),
    (1, "9/10,2", "1/5,inf", false, V::Y, V::Na),
    (1, "9/10,2", "1/2,10", false, V::Y, V::Na),
    (1, "9/10,2", "1/2,11", false, V::N, V::Na),
    (1, "9/10,2", "1/2,3/2", false, V::N, V::Na),
    (1, "9/10,2", "9/10,2", false, V::Y, V::Na),
    (1, "9/10,2", "1,2", false, V::N, V::Na),
    // C bounded: p~ >= 1, s~ < 9/10 in the second block; compact drops the curve.
    (1, "9/10,2", "1/5,1", true, V::Y, V::Y),
    (1, "9/10,2", "1/2,10", true, V::Y, V::N),
    (1, "9/10,2", "1/2,5", true, V::Y, V::Y),
    (1, "9/10,2", "1/2,11", true, V::N, V::N),
    (1, "9/10,2", "1/5,inf", true, V::Y, V::Y),
    (1, "9/10,2", "9/10,1", true, V::N, V::N),
];

#[test]
fn c10_classifier_spot_oracle() {
    let mut mismatches = Vec::new();
    for &(n, src, tgt, bounded, cont, comp) in SPOT {
        let d = if bounded { DomainKind::BoundedLipschitz } else { DomainKind::WholeSpace };
        let (s, t) = (idx(n, src), idx(n, tgt));
        let c = classify_continuous(&s, &t, d).unwrap();
        let k = classify_compact(&s, &t, d).unwrap();
        let got_c = match c.continuous {
            Continuity::Yes => Some(V::Y),
            Continuity::No => Some(V::N),
            Continuity::Unsupported => None,
        };
        let got_k = match k.compact {
            Compactness::Yes => Some(V::Y),
            Compactness::No => Some(V::N),
            Compactness::NotApplicable => Some(V::Na),
            Compactness::Unsupported => None,
        };
        if got_c != Some(cont) || got_k != Some(comp) {
            mismatches.push(format!("N{n} ({src})->({tgt}) bounded={bounded}: got {got_c:?}/{got_k:?}"));
        }
    }
    let ok = SPOT.len() == 50 && mismatches.is_empty();
    report(10, "classifier spot oracle", ok, format!("{} verdicts, {} mismatches", SPOT.len(), mismatches.len()));
    assert!(ok, "{mismatches:#?}");
}
